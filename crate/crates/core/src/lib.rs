//! Numerical library for fractional Allen-Cahn energies on planar curves:
//! the 1D fractional Laplacian and nonlocal optimal profile, the fractional
//! heat kernel and fundamental solution, the profile-derived constants of the
//! Willmore-type limit, planar geometry (signed distance, Fermi charts), and
//! the 2D recovery-sequence energy experiments.
//!
//! The closed-form layer ([`special`], [`quad`]) is generic over the scalar
//! type through [`scalar::Real`]; everything that carries solver state or
//! file formats is pinned to [`Scalar`].

pub mod error;
pub mod scalar;

pub mod quad;
pub mod special;

pub mod constants;
pub mod energy;
pub mod field;
pub mod flap1d;
pub mod flap2d;
pub mod geometry;
pub mod heat;
pub mod potential;
pub mod profile;
pub mod tailed;

/// Concrete scalar used by the solvers, grids and file formats.
pub type Scalar = f64;

pub use error::{Error, Result};
pub use scalar::Real;

pub use constants::{eta, ibp_identity_residual, kappa_star, mu_log_rate, mu_w, EtaSpec};
pub use energy::{energy_f, energy_g, run_limsup_experiment, EnergyConfig, ExperimentReport};
pub use field::RecoveryField;
pub use flap1d::{flap_bound_check, flap_pointwise, flap_spectral};
pub use flap2d::{fermi_expansion_residual, flap2d};
pub use geometry::{PlanarCurve, SmoothedDistance, Vec2};
pub use heat::{fundamental_solution, heat_kernel, heat_kernel_deriv};
pub use potential::DoubleWell;
pub use profile::{decay_fit, profile_residual, solve_profile, SampledProfile};
pub use special::{beta_fn, gamma_ds, gamma_fn, kernel_reduction_constant, radial_moment};
pub use tailed::TailedFunction1D;
