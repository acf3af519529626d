//! Output-field squeezing of a two-tone driven cavity magnomechanical system.
//!
//! The crate computes the noise spectral density of the microwave cavity
//! output in the rotating-wave approximation ([`rwa`]), the same spectrum
//! with the counter-rotating terms kept through a truncated Floquet
//! expansion ([`floquet`]), and the stationary covariance of the three
//! modes ([`steadystate`]). [`sweep`] optimizes the blue-sideband coupling
//! and scans parameters; [`figures`] bundles the standard reproduction
//! workflows.
//!
//! All frequencies and rates are angular (rad/s); temperatures are in K.
//! Numerical code is generic over [`Real`] (`f32` or `f64`).
//!
//! ```
//! use magnomech::{nsd_zero_freq, optimize_gplus, Objective, SystemParamsF64};
//!
//! let p = SystemParamsF64::default();
//! let opt = optimize_gplus(&p, Objective::RwaNsd, 0.0, std::f64::consts::FRAC_PI_2).unwrap();
//! let best = nsd_zero_freq(&p.with_g_plus(opt.g_plus_opt).unwrap());
//! assert!(best.squeezing_db > 15.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocktri;
pub mod drive;
pub mod error;
pub mod figures;
pub mod floquet;
pub mod params;
pub mod rwa;
pub mod scalar;
pub mod steadystate;
pub mod susceptibility;
pub mod sweep;
pub mod table;

pub use drive::{calibrate_rabi, mean_amplitude, DriveSpec, Sideband};
pub use error::{Error, Result};
pub use figures::Figure;
pub use floquet::{converge, floquet_nsd, Converged, SolveMethod};
pub use params::{load_config, ParamField, RawParams, SystemParams, ThermalOccupations, UnitStyle};
pub use rwa::{nsd_components, nsd_zero_freq, spectrum, NoiseSpectrum, NsdPoint};
pub use scalar::{Complex, Real};
pub use steadystate::{
    is_stable, quadrature_model, quadrature_variances, steady_covariance, symplectic_eigenvalues,
    CovarianceState, Mode, QuadratureModel, Stability,
};
pub use susceptibility::{chi_set, ChiSet};
pub use sweep::{optimize_gplus, sensitivity, Objective, Optimum, Sensitivity, SweepSpec};
pub use table::{Cell, Table};

pub type RawParamsF64 = RawParams<f64>;
pub type RawParamsF32 = RawParams<f32>;
pub type SystemParamsF64 = SystemParams<f64>;
pub type SystemParamsF32 = SystemParams<f32>;
pub type NsdPointF64 = NsdPoint<f64>;
pub type NsdPointF32 = NsdPoint<f32>;
pub type NoiseSpectrumF64 = NoiseSpectrum<f64>;
pub type NoiseSpectrumF32 = NoiseSpectrum<f32>;
pub type ChiSetF64 = ChiSet<f64>;
pub type ChiSetF32 = ChiSet<f32>;
pub type DriveSpecF64 = DriveSpec<f64>;
pub type DriveSpecF32 = DriveSpec<f32>;
pub type QuadratureModelF64 = QuadratureModel<f64>;
pub type QuadratureModelF32 = QuadratureModel<f32>;
pub type CovarianceStateF64 = CovarianceState<f64>;
pub type CovarianceStateF32 = CovarianceState<f32>;
pub type OptimumF64 = Optimum<f64>;
pub type OptimumF32 = Optimum<f32>;
pub type SweepSpecF64 = SweepSpec<f64>;
pub type SweepSpecF32 = SweepSpec<f32>;
