//! Numerical kernels: polynomials, root isolation, real powers, finite
//! differences and fixed-step integration.

mod diff;
mod ode;
mod poly;
mod power;
mod roots;

pub use diff::{central_diff, central_diff_series, central_second_diff, second_diff_series};
pub use ode::{integrate_ode, integrate_ode_unbounded, rk4_step, OdeSpec, OdeTrajectory};
pub use poly::Poly;
pub use power::{approximate_ratio, pow_nonneg, rpow_real, sqrt_nonneg, RationalExponent, RealPower};
pub use roots::{
    poly_gcd, poly_real_roots, sign_variations, square_free_part, sturm_root_count, sturm_sequence, RealRoot,
    DEFAULT_ROOT_TOL,
};
