//! CSV and JSON artifacts. Floats use Rust's shortest round-trip formatting,
//! so output is byte-identical across runs.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use nsl_core::{Side, Trajectory};
use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

/// Output destination: a file, or stdout when no path is given.
pub fn sink(path: Option<&str>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) if p != "-" => Box::new(BufWriter::new(File::create(p)?)),
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceRow {
    pub x: f64,
    pub p: f64,
    pub branch: usize,
    pub v: f64,
    #[serde(rename = "H")]
    pub h: f64,
}

pub fn write_surface(rows: &[SurfaceRow], format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            if rows.is_empty() {
                w.write_record(["x", "p", "branch", "v", "H"])?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer(&mut *out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Name of the second trajectory column.
pub fn q2_name(side: Side) -> &'static str {
    match side {
        Side::Lagrangian => "v",
        Side::Hamiltonian => "p",
    }
}

pub fn write_trajectory(traj: &Trajectory, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let q2 = q2_name(traj.side);
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["t", "x", q2])?;
            for (t, s) in traj.times.iter().zip(&traj.states) {
                w.serialize((t, s[0], s[1]))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let v = serde_json::json!({ "t": traj.times, "x": traj.xs(), q2: traj.qs() });
            serde_json::to_writer(&mut *out, &v)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn write_json(value: &impl Serialize, out: &mut dyn Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
