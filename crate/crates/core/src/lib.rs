//! Nonstandard Lagrangians and their branched Hamiltonians.
//!
//! The crate is `no_std` with `alloc`. It covers:
//!
//! * [`numerics`]: dense polynomials, Sturm-based real root isolation,
//!   sign-preserving rational powers, central differences and a fixed-step
//!   RK4 integrator.
//! * [`families`]: closed-form Lagrangian families (reciprocal, logarithmic,
//!   quartic-velocity, fractional-power, higher-power and shifted reciprocal)
//!   with analytic partial derivatives and Euler-Lagrange coefficients.
//! * [`lienard`]: the last-multiplier construction for Lienard systems
//!   `x'' + f(x) x' + g(x) = 0`, from the Cheillini condition to the
//!   nonstandard Lagrangian.
//! * [`legendre`]: inversion of the momentum map into real velocity branches,
//!   branched Hamiltonians, coalescence loci and momentum-dependent mass.
//! * [`dynamics`]: Lienard and Hamilton flows, conservation and consistency
//!   diagnostics.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dynamics;
mod error;
pub mod families;
pub mod legendre;
pub mod lienard;
pub mod numerics;
pub mod trajectory;

pub use error::{Error, Result};
pub use families::{ElCoefficients, Lagrangian, LagrangianFamily};
pub use legendre::{BranchedHamiltonian, LagrangianModel};
pub use lienard::{CheilliniSolution, Ell, LienardLagrangian, LienardSystem};
pub use numerics::{Poly, RationalExponent};
pub use trajectory::{ExitEvent, ExitReason, Side, State, Trajectory};
