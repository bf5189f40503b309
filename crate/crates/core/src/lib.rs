//! Numerical certification of nonexistence of finite-energy traveling waves
//! for the nonlocal Gross-Pitaevskii equation
//!
//! ```text
//!     i ∂ₜu + Δu + u (W * (1 - |u|²)) = 0,   |u| → 1 at infinity,
//! ```
//!
//! where the interaction kernel `W` is supplied through its Fourier transform
//! `Ŵ`. Given `Ŵ` the crate computes the sonic speed, traces the zero set of
//! the dispersion quartic near the origin, and checks the sufficient
//! conditions (Pohozaev identities closed by a Farkas argument) under which
//! no nontrivial traveling wave of speed `c` exists.
//!
//! Every "certified" verdict is a numerical certification: conditions that
//! must hold for almost every frequency are verified on finite grids, and the
//! verdict lists those assumptions explicitly.
//!
//! The crate is `no_std` (it needs `alloc`). IO, configuration and report
//! formats live in the `ngp-cert` companion crate.

#![no_std]
// `!(x >= y)` is the NaN-rejecting form used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod certifier;
pub mod dispersion;
pub mod extrapolate;
pub mod potential;
pub mod quadrature;
pub mod roots;
pub mod simplex;

pub use error::{Error, Result};

pub use certifier::{
    build_farkas_system, certify_speed, check_static, corollary_gradient_bound,
    corollary_speed_window, epsilon_bound, radial_inf_ratio, sigma_feasibility, sweep,
    verify_sigma, Assumption, CertifyOptions, Certifier, EpsilonBound, Evidence, FarkasSystem,
    Route, SigmaCertificate, SpeedVerdict, Status, SweepReport,
};
pub use dispersion::{
    check_ell_equality, estimate_ell, morse_crosscheck, omega_squared, sonic_speed, trace_gamma,
    CurveSample, CurveTrace, EllEqualityReport, MorseReport, SonicData, TraceOptions,
};
pub use potential::{
    build_potential, check_hypotheses, GridSpec, HypothesisReport, KernelKind, PotentialModel,
    PotentialSpec, RadialProfile,
};
