use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::lienard::{build_lagrangian, cheillini_solve, LienardSystem};
use crate::numerics::{central_diff, Poly, RationalExponent};
use crate::Ell;

fn lienard_model(ell: i64) -> LagrangianModel {
    let sys = LienardSystem::new(Poly::x(), Poly::new(vec![0.0, 1.0, 0.0, -1.0])).unwrap();
    let sol = cheillini_solve(&sys).unwrap().into_iter().find(|s| s.ell == Ell::Exact(ell.into())).unwrap();
    build_lagrangian(&sys, &sol).unwrap().into()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

fn catalog() -> Vec<LagrangianModel> {
    vec![
        LagrangianFamily::TrialReciprocal { alpha: 1.0, beta: 1.0, mu: Poly::x() }.into(),
        LagrangianFamily::TrialLogarithmic { gamma: 0.5, delta: 2.0, mu: Poly::new(vec![1.0, 0.0, 1.0]) }.into(),
        LagrangianFamily::QuarticVelocity { kappa: 1.7 }.into(),
        LagrangianFamily::CzPower { k: 1, potential: Poly::new(vec![0.0, 0.0, 1.0]) }.into(),
        LagrangianFamily::CzPower { k: 3, potential: Poly::x() }.into(),
        LagrangianFamily::CzVelocityPotential { lambda: 0.4, delta: 0.1, potential: Poly::new(vec![0.0, 0.0, 0.5]) }
            .into(),
        LagrangianFamily::HigherPower {
            m: RationalExponent::integer(0),
            delta: 1.2,
            sigma: Poly::new(vec![0.3, 0.0, 1.0]),
        }
        .into(),
        LagrangianFamily::HigherPower {
            m: RationalExponent::new(1, 3).unwrap(),
            delta: 0.8,
            sigma: Poly::new(vec![0.0, 1.0]),
        }
        .into(),
        LagrangianFamily::ReciprocalShifted { s: 1.5, lambda: 0.3 }.into(),
        LagrangianFamily::ReciprocalShifted { s: -0.7, lambda: 0.3 }.into(),
        lienard_model(1),
        lienard_model(-2),
    ]
}

#[test]
fn inversion_examples() {
    assert_eq!(invert_momentum(&lienard_model(1), 0.0, 0.5).unwrap(), vec![0.0, 2.0]);

    let qv: LagrangianModel = LagrangianFamily::QuarticVelocity { kappa: 3.0 }.into();
    let vs = invert_momentum(&qv, 0.0, 0.0).unwrap();
    let r3 = libm::sqrt(3.0);
    assert_eq!(vs.len(), 3);
    assert!(close(vs[0], -r3, 1e-15) && vs[1].abs() < 1e-15 && close(vs[2], r3, 1e-15));

    let cz: LagrangianModel = LagrangianFamily::CzPower { k: 1, potential: Poly::zero() }.into();
    assert_eq!(invert_momentum(&cz, 0.0, 0.25).unwrap(), vec![-1.0, 3.0]);
    assert_eq!(invert_momentum(&cz, 0.0, -1.0), Err(Error::EmptyDomain { p: -1.0 }));
}

#[test]
fn inversion_round_trip_across_catalog() {
    for model in catalog() {
        let bh = hamiltonian_branches(model.clone()).unwrap();
        for b in bh.branches() {
            for p in b.domain.sample_points(8) {
                for x in [-0.8, 0.0, 0.6] {
                    let Ok(v) = bh.v_of(b.id, x, p) else { continue };
                    let q = model.momentum(x, v).unwrap();
                    assert!(close(q, p, 1e-9), "{} branch {} p {p}: got {q}", model.name(), b.id);
                }
            }
        }
    }
}

#[test]
fn hamiltonian_examples() {
    let bh = hamiltonian_branches(lienard_model(1)).unwrap();
    assert!(close(bh.h_of(0, 0.0, 0.5).unwrap(), 5.0 / 6.0, 1e-14));
    assert!(close(bh.h_of(1, 0.0, 0.5).unwrap(), 1.0 / 6.0, 1e-14));

    let bh = hamiltonian_branches(lienard_model(-2)).unwrap();
    assert_eq!(bh.branch_count(), 1);
    assert!(close(bh.h_of(0, 1.0, 2.0).unwrap(), 2.0 / 3.0, 1e-14));

    let cz = LagrangianFamily::CzPower { k: 1, potential: Poly::zero() };
    let bh = hamiltonian_branches(cz).unwrap();
    assert!(close(bh.h_of(0, 0.0, 0.25).unwrap(), 1.25, 1e-14));
    assert!(close(bh.h_of(1, 0.0, 0.25).unwrap(), -0.75, 1e-14));

    let rs = LagrangianFamily::ReciprocalShifted { s: 1.0, lambda: 0.0 };
    let bh = hamiltonian_branches(rs).unwrap();
    assert!(close(bh.h_of(0, 0.0, 1.0).unwrap(), 2.0, 1e-14));
    assert!(close(bh.h_of(1, 0.0, 1.0).unwrap(), -2.0, 1e-14));
}

#[test]
fn lienard_hamiltonians_match_worked_examples() {
    let one = hamiltonian_branches(lienard_model(1)).unwrap();
    let two = hamiltonian_branches(lienard_model(-2)).unwrap();
    for x in [-1.2, -0.3, 0.0, 0.7, 1.5] {
        for p in [0.01, 0.3, 1.0, 2.7] {
            let r = libm::sqrt(2.0 * p) * 2.0 / 3.0;
            let plus = p * (1.0 - x * x + r);
            let minus = p * (1.0 - x * x - r);
            assert!(close(one.h_of(0, x, p).unwrap(), plus, 1e-12));
            assert!(close(one.h_of(1, x, p).unwrap(), minus, 1e-12));
            let h2 = p * p * p / 12.0 - p * (1.0 - x * x) / 2.0;
            assert!(close(two.h_of(0, x, p).unwrap(), h2, 1e-12));
        }
    }
}

#[test]
fn quartic_hamiltonian_in_terms_of_velocity() {
    let bh = hamiltonian_branches(LagrangianFamily::QuarticVelocity { kappa: 1.0 }).unwrap();
    let v = bh.v_of(2, 0.0, 6.0).unwrap();
    assert!(close(v, 2.0, 1e-15));
    assert!(close(bh.h_of(2, 0.0, 6.0).unwrap(), 10.0, 1e-14));
}

#[test]
fn hamilton_first_equation_holds() {
    for model in catalog() {
        let bh = hamiltonian_branches(model.clone()).unwrap();
        for b in bh.branches() {
            for p in b.domain.sample_points(5) {
                let x = 0.35;
                let Ok(v) = bh.v_of(b.id, x, p) else { continue };
                let h = 1e-6 * (1.0 + p.abs());
                if !(b.domain.contains(p - h) && b.domain.contains(p + h)) {
                    continue;
                }
                let d = central_diff(|q| bh.h_of(b.id, x, q).unwrap(), p, h);
                assert!((d - v).abs() <= 1e-6 * (1.0 + v.abs()), "{} {}: {d} vs {v}", model.name(), b.id);
            }
        }
    }
}

#[test]
fn coalescence_examples() {
    let bh = hamiltonian_branches(lienard_model(1)).unwrap();
    for x in [-1.0, 0.0, 0.4, 2.0] {
        assert_eq!(coalescence_points(&bh, x), vec![0.0]);
    }
    let bh = hamiltonian_branches(lienard_model(-2)).unwrap();
    assert!(coalescence_points(&bh, 0.3).is_empty());

    let (lambda, k) = (0.8, 1.5);
    let bh = BranchedHamiltonian::higher_power_lienard(lambda, k).unwrap();
    let pts = coalescence_points(&bh, 0.5);
    assert_eq!(pts.len(), 1);
    assert!(close(pts[0], 3.0 * lambda / (2.0 * k), 1e-12));

    let kappa = 2.0;
    let bh = hamiltonian_branches(LagrangianFamily::QuarticVelocity { kappa }).unwrap();
    let pc = quartic_critical_momentum(kappa);
    let pts = coalescence_points(&bh, 0.0);
    assert_eq!(pts.len(), 2, "{pts:?}");
    assert!(close(pts[0], -pc, 1e-12) && close(pts[1], pc, 1e-12));
}

#[test]
fn coalescing_branches_agree() {
    for model in catalog() {
        let bh = hamiltonian_branches(model.clone()).unwrap();
        for p in coalescence_points(&bh, 0.2) {
            let hs: Vec<f64> = bh.branches().iter().filter_map(|b| bh.h_closure(b.id, 0.2, p).ok()).collect();
            assert!(hs.len() >= 2);
        }
    }
}

#[test]
fn momentum_mass_examples() {
    let bh = hamiltonian_branches(lienard_model(-2)).unwrap();
    let mm = momentum_mass_decompose(&bh, 0).unwrap();
    for p in [0.3, 1.0, 2.5] {
        assert!(close(mm.mass(p).unwrap(), 1.0 / p, 1e-12));
        assert!(close(mm.potential(p).unwrap(), p * p * p / 12.0 - p / 2.0, 1e-12));
    }

    let (s, lambda) = (1.5, 0.4);
    let bh = hamiltonian_branches(LagrangianFamily::ReciprocalShifted { s, lambda }).unwrap();
    for (id, sg) in [(0, 1.0), (1, -1.0)] {
        let mm = momentum_mass_decompose(&bh, id).unwrap();
        for p in [0.2, 1.0, 3.0] {
            assert!(close(mm.mass(p).unwrap(), 3.0 / (2.0 * s * p), 1e-10));
            let u = 3.0 / s * lambda * p + sg * 2.0 * (p / s).sqrt();
            assert!(close(mm.potential(p).unwrap(), u, 1e-12));
        }
    }

    let cz = LagrangianFamily::CzPower { k: 1, potential: Poly::new(vec![0.0, 0.0, 1.0]) };
    let bh = hamiltonian_branches(cz).unwrap();
    let mm = momentum_mass_decompose(&bh, 0).unwrap();
    assert!(close(mm.mass(0.7).unwrap(), 0.5, 1e-12));
    assert!(close(mm.potential(0.7).unwrap(), 0.7 + 0.5 / 0.7f64.sqrt(), 1e-12));

    let quartic_v = LagrangianFamily::CzPower { k: 1, potential: Poly::monomial(1.0, 4) };
    let bh = hamiltonian_branches(quartic_v).unwrap();
    assert!(matches!(momentum_mass_decompose(&bh, 0), Err(Error::NotDecomposable(_))));
}

#[test]
fn translated_higher_power_mass() {
    let (lambda, k) = (0.8, 1.5);
    let bh = BranchedHamiltonian::higher_power_lienard(lambda, k).unwrap();
    for id in [0, 1] {
        let mm = momentum_mass_decompose(&bh, id).unwrap();
        for p in [-2.0, 0.0, 0.5] {
            assert!(close(mm.mass(p).unwrap(), 1.0 / (lambda - 2.0 * k * p / 3.0), 1e-10));
        }
        let intervals = mm.positive_mass_intervals().unwrap();
        assert_eq!(intervals.len(), 1);
        assert_eq!(intervals[0].0, f64::NEG_INFINITY);
        assert!(close(intervals[0].1, 3.0 * lambda / (2.0 * k), 1e-9));
    }
}

#[test]
fn mass_reconstruction_on_probe_grid() {
    let bh = hamiltonian_branches(lienard_model(-2)).unwrap();
    let mm = momentum_mass_decompose(&bh, 0).unwrap();
    for x in [-1.5, -0.2, 0.9] {
        for p in [0.1, 1.3] {
            let h = bh.h_of(0, x, p).unwrap();
            assert!((mm.reconstruct(x, p).unwrap() - h).abs() < 1e-10);
        }
    }
}

#[test]
fn legendre_identity_across_catalog() {
    let pts = [(0.3, -0.7), (-0.4, 2.2), (0.9, 0.45), (0.1, 3.4), (-0.6, -2.5)];
    for model in catalog() {
        let mut tested = 0;
        for (x, v) in pts {
            if model.momentum(x, v).is_err() || model.value(x, v).is_err() {
                continue;
            }
            let r = legendre_identity_check(&model, x, v).unwrap();
            assert!(r < 1e-10 * (1.0 + model.value(x, v).unwrap().abs()), "{} at ({x}, {v}): {r}", model.name());
            tested += 1;
        }
        assert!(tested > 0, "{}", model.name());
    }
    let qv: LagrangianModel = LagrangianFamily::QuarticVelocity { kappa: 1.0 }.into();
    assert!(legendre_identity_check(&qv, 0.0, 2.0).unwrap() < 1e-10);
    let one = lienard_model(1);
    assert!(legendre_identity_check(&one, 0.5, 0.75).unwrap() < 1e-10);
}

#[test]
fn generalized_reciprocal_inversion() {
    let gr: LagrangianModel = LagrangianFamily::GeneralizedReciprocal {
        alpha: 1.0,
        beta: 1.0,
        mu: Poly::x(),
        rho: Poly::new(vec![0.0, 1.0, 0.0, 0.2]),
    }
    .into();
    assert!(matches!(hamiltonian_branches(gr.clone()), Err(Error::UnsupportedFamily(_))));
    let vs = invert_momentum(&gr, 0.5, -0.3).unwrap();
    assert!(!vs.is_empty());
    for v in &vs {
        assert!(close(gr.momentum(0.5, *v).unwrap(), -0.3, 1e-9));
        assert!(legendre_identity_check(&gr, 0.5, *v).unwrap() < 1e-10);
    }

    let linear: LagrangianModel =
        LagrangianFamily::GeneralizedReciprocal { alpha: 1.0, beta: 1.0, mu: Poly::x(), rho: Poly::x() }.into();
    let tr: LagrangianModel = LagrangianFamily::TrialReciprocal { alpha: 1.0, beta: 1.0, mu: Poly::x() }.into();
    let a = invert_momentum(&linear, 0.3, -0.5).unwrap();
    let b = invert_momentum(&tr, 0.3, -0.5).unwrap();
    assert_eq!(a.len(), b.len());
    for (u, w) in a.iter().zip(&b) {
        assert!(close(*u, *w, 1e-12));
    }
}

#[test]
fn out_of_domain_branch_queries() {
    let bh = hamiltonian_branches(lienard_model(1)).unwrap();
    assert!(matches!(bh.v_of(0, 0.0, -0.1), Err(Error::Domain(_))));
    assert!(bh.branch(5).is_err());
    assert!(!bh.contains(1, -1.0));
}
