use alloc::vec::Vec;

/// Which phase-space coordinates a trajectory carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `(x, v)` with `v = dx/dt`.
    Lagrangian,
    /// `(x, p)` on a single Hamiltonian branch.
    Hamiltonian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum State {
    Velocity { x: f64, v: f64 },
    Momentum { x: f64, p: f64 },
}

impl State {
    pub fn x(&self) -> f64 {
        match *self {
            State::Velocity { x, .. } | State::Momentum { x, .. } => x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitReason {
    /// Momentum reached the edge of the branch domain or a coalescence locus.
    BranchBoundary,
    /// A Lagrangian-side state left the domain of the vector field.
    LeftDomain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitEvent {
    pub time: f64,
    pub reason: ExitReason,
}

/// Uniformly sampled solution. `states[i]` holds `(x, v)` or `(x, p)`
/// according to `side`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub side: Side,
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<[f64; 2]>,
    pub branch_id: Option<usize>,
    pub exit_event: Option<ExitEvent>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> State {
        let [x, q] = self.states[i];
        match self.side {
            Side::Lagrangian => State::Velocity { x, v: q },
            Side::Hamiltonian => State::Momentum { x, p: q },
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        self.states.iter().map(|s| s[0]).collect()
    }

    /// Second coordinate: `v` or `p` depending on the side.
    pub fn qs(&self) -> Vec<f64> {
        self.states.iter().map(|s| s[1]).collect()
    }

    pub fn end_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }
}
