//! Interaction kernels described by their Fourier transform `Ŵ`.
//!
//! A [`PotentialSpec`] is the declarative description (family, parameters,
//! dimension); [`build_potential`] turns it into an immutable
//! [`PotentialModel`] that evaluates `Ŵ(ξ)`, its gradient, and the scaled
//! gradient components `ξₖ ∂ₖŴ(ξ)` that enter every nonexistence criterion.

mod grid;
mod hypotheses;
pub mod profile;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::math::{norm_sq, sqrt};
use crate::{Error, Result};

pub use grid::GridSpec;
pub use hypotheses::{check_hypotheses, HypothesisCheck, HypothesisReport, HypothesisStatus};
pub use profile::{
    ConstantProfile, FnProfile, Gaussian, GaussianPerturbed, MonotoneCubic, RadialProfile,
    ShchesnovichKraenkel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KernelKind {
    /// `W = a δ`, `Ŵ ≡ a`.
    Delta,
    /// `Ŵ(ξ) = (1 + a|ξ|²)^{-b/2}`.
    RadialSk,
    /// `W = δ + ε e^{-|x|²}`.
    DeltaPlusF,
    /// `Ŵ(ξ) = a + b̃ (3ξ₃²/|ξ|² - 1)` on `ℝ³`.
    Dipolar,
    /// Radial kernel with a user-supplied profile.
    CustomRadial,
}

impl KernelKind {
    pub const ALL: [KernelKind; 5] = [
        KernelKind::Delta,
        KernelKind::RadialSk,
        KernelKind::DeltaPlusF,
        KernelKind::Dipolar,
        KernelKind::CustomRadial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Delta => "delta",
            KernelKind::RadialSk => "radial-sk",
            KernelKind::DeltaPlusF => "delta-plus-f",
            KernelKind::Dipolar => "dipolar",
            KernelKind::CustomRadial => "custom-radial",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    fn param_names(self) -> &'static [&'static str] {
        match self {
            KernelKind::Delta => &["a"],
            KernelKind::RadialSk => &["a", "b"],
            KernelKind::DeltaPlusF => &["epsilon"],
            KernelKind::Dipolar => &["a", "b_tilde"],
            KernelKind::CustomRadial => &[],
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub kind: KernelKind,
    pub dim: usize,
    pub params: BTreeMap<String, f64>,
    /// `(r, ρ(r))` rows for [`KernelKind::CustomRadial`].
    pub table: Option<Vec<(f64, f64)>>,
}

impl PotentialSpec {
    pub fn new(kind: KernelKind, dim: usize) -> Self {
        Self { kind, dim, params: BTreeMap::new(), table: None }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn delta(a: f64, dim: usize) -> Self {
        Self::new(KernelKind::Delta, dim).with_param("a", a)
    }

    pub fn radial_sk(a: f64, b: f64, dim: usize) -> Self {
        Self::new(KernelKind::RadialSk, dim).with_param("a", a).with_param("b", b)
    }

    pub fn delta_plus_f(epsilon: f64, dim: usize) -> Self {
        Self::new(KernelKind::DeltaPlusF, dim).with_param("epsilon", epsilon)
    }

    pub fn dipolar(a: f64, b_tilde: f64) -> Self {
        Self::new(KernelKind::Dipolar, 3).with_param("a", a).with_param("b_tilde", b_tilde)
    }

    pub fn custom_radial(table: Vec<(f64, f64)>, dim: usize) -> Self {
        Self { table: Some(table), ..Self::new(KernelKind::CustomRadial, dim) }
    }

    fn param(&self, name: &str) -> Result<f64> {
        match self.params.get(name) {
            Some(v) if v.is_finite() => Ok(*v),
            Some(_) => Err(invalid(name, "must be finite")),
            None => Err(invalid(name, "missing")),
        }
    }

    /// Checks dimension and parameter domains. Dimension support is checked
    /// before parameters so that a dipolar kernel outside `ℝ³` is reported as
    /// such even when its parameters are also incomplete.
    pub fn validate(&self) -> Result<()> {
        if self.kind == KernelKind::Dipolar && self.dim != 3 {
            return Err(Error::UnsupportedDimension { kind: self.kind.name(), dim: self.dim });
        }
        let known = self.kind.param_names();
        if let Some(name) = self.params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(invalid(name, "unknown parameter for this kernel"));
        }
        match self.kind {
            KernelKind::Delta => positive(self, "a")?,
            KernelKind::RadialSk => {
                positive(self, "a")?;
                positive(self, "b")?;
            }
            KernelKind::DeltaPlusF => {
                if self.param("epsilon")? < 0.0 {
                    return Err(invalid("epsilon", "must be >= 0"));
                }
            }
            KernelKind::Dipolar => {
                positive(self, "a")?;
                self.param("b_tilde")?;
            }
            KernelKind::CustomRadial => {
                let table = self.table.as_ref().ok_or_else(|| invalid("table", "missing"))?;
                MonotoneCubic::new(table)?;
            }
        }
        if self.dim < 2 {
            return Err(invalid("dim", "must be at least 2"));
        }
        Ok(())
    }
}

fn invalid(name: &str, reason: &str) -> Error {
    Error::InvalidParameter { name: name.to_string(), reason: reason.to_string() }
}

fn positive(spec: &PotentialSpec, name: &str) -> Result<()> {
    if spec.param(name)? > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, "must be > 0"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flags {
    pub radial: bool,
    pub even_per_component: bool,
    pub smooth_at_origin: bool,
}

#[derive(Clone)]
enum Kernel {
    Radial(Arc<dyn RadialProfile>),
    Dipolar { a: f64, b_tilde: f64 },
}

/// Immutable evaluator of `Ŵ`. Cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct PotentialModel {
    spec: PotentialSpec,
    kernel: Kernel,
    flags: Flags,
    w_hat_origin: Option<f64>,
}

impl fmt::Debug for PotentialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialModel")
            .field("spec", &self.spec)
            .field("flags", &self.flags)
            .field("w_hat_origin", &self.w_hat_origin)
            .finish()
    }
}

pub fn build_potential(spec: PotentialSpec) -> Result<PotentialModel> {
    spec.validate()?;
    let (kernel, flags) = match spec.kind {
        KernelKind::Delta => radial(Arc::new(ConstantProfile(spec.param("a")?)), true),
        KernelKind::RadialSk => radial(
            Arc::new(ShchesnovichKraenkel { a: spec.param("a")?, b: spec.param("b")? }),
            true,
        ),
        KernelKind::DeltaPlusF => radial(
            Arc::new(GaussianPerturbed { epsilon: spec.param("epsilon")?, dim: spec.dim }),
            true,
        ),
        KernelKind::CustomRadial => {
            let interp = MonotoneCubic::new(spec.table.as_deref().unwrap_or_default())?;
            let smooth = interp.starts_at_origin();
            radial(Arc::new(interp), smooth)
        }
        KernelKind::Dipolar => (
            Kernel::Dipolar { a: spec.param("a")?, b_tilde: spec.param("b_tilde")? },
            Flags { radial: false, even_per_component: true, smooth_at_origin: false },
        ),
    };
    Ok(PotentialModel::assemble(spec, kernel, flags))
}

fn radial(profile: Arc<dyn RadialProfile>, smooth_at_origin: bool) -> (Kernel, Flags) {
    let flags = Flags { radial: true, even_per_component: true, smooth_at_origin };
    (Kernel::Radial(profile), flags)
}

impl PotentialModel {
    fn assemble(spec: PotentialSpec, kernel: Kernel, flags: Flags) -> Self {
        let w_hat_origin = match (&kernel, flags.smooth_at_origin) {
            (Kernel::Radial(p), true) => Some(p.value(0.0)),
            _ => None,
        };
        Self { spec, kernel, flags, w_hat_origin }
    }

    /// Radial kernel from an arbitrary profile. `smooth_at_origin` declares
    /// whether `Ŵ(0) = ρ(0)` is meaningful; the C² claim itself is checked
    /// separately by [`check_hypotheses`].
    pub fn from_profile(dim: usize, profile: Arc<dyn RadialProfile>, smooth_at_origin: bool) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("dim", "must be at least 2"));
        }
        let spec = PotentialSpec::new(KernelKind::CustomRadial, dim);
        let flags = Flags { radial: true, even_per_component: true, smooth_at_origin };
        Ok(Self::assemble(spec, Kernel::Radial(profile), flags))
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn kind(&self) -> KernelKind {
        self.spec.kind
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    /// `Ŵ(0)` when the kernel is smooth at the origin.
    pub fn w_hat_origin(&self) -> Option<f64> {
        self.w_hat_origin
    }

    pub fn radial_profile(&self) -> Option<&dyn RadialProfile> {
        match &self.kernel {
            Kernel::Radial(p) => Some(p.as_ref()),
            Kernel::Dipolar { .. } => None,
        }
    }

    fn check_len(&self, xi: &[f64]) -> Result<()> {
        if xi.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), got: xi.len() })
        }
    }

    pub fn eval_w_hat(&self, xi: &[f64]) -> Result<f64> {
        self.check_len(xi)?;
        if !self.flags.smooth_at_origin && norm_sq(xi) == 0.0 {
            return Err(Error::OriginEvaluation);
        }
        Ok(self.w_hat(xi))
    }

    /// Unchecked evaluation; `xi` must have length `dim` and be nonzero for
    /// kernels that are not smooth at the origin.
    pub(crate) fn w_hat(&self, xi: &[f64]) -> f64 {
        match &self.kernel {
            Kernel::Radial(p) => p.value(sqrt(norm_sq(xi))),
            Kernel::Dipolar { a, b_tilde } => {
                let r2 = norm_sq(xi);
                a + b_tilde * (3.0 * xi[2] * xi[2] / r2 - 1.0)
            }
        }
    }

    /// Full gradient `∇Ŵ(ξ)` for `ξ ≠ 0`.
    pub fn gradient(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.check_len(xi)?;
        let mut out = alloc::vec![0.0; xi.len()];
        let r2 = norm_sq(xi);
        if r2 == 0.0 {
            return if self.flags.smooth_at_origin { Ok(out) } else { Err(Error::OriginEvaluation) };
        }
        match &self.kernel {
            Kernel::Radial(p) => {
                let r = sqrt(r2);
                let d = p.derivative(r);
                for (o, x) in out.iter_mut().zip(xi) {
                    *o = d * x / r;
                }
            }
            Kernel::Dipolar { b_tilde, .. } => {
                let u = xi[2] * xi[2] / r2;
                for (k, o) in out.iter_mut().enumerate() {
                    let direct = if k == 2 { 2.0 * xi[2] / r2 } else { 0.0 };
                    *o = 3.0 * b_tilde * (direct - 2.0 * u * xi[k] / r2);
                }
            }
        }
        Ok(out)
    }

    /// Components `ξₖ ∂ₖŴ(ξ)`, `k = 1..N`, for `ξ ≠ 0`.
    pub fn eval_grad_scaled(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.check_len(xi)?;
        if norm_sq(xi) == 0.0 {
            return Err(Error::OriginEvaluation);
        }
        let mut out = alloc::vec![0.0; xi.len()];
        self.grad_scaled_into(xi, &mut out);
        Ok(out)
    }

    pub(crate) fn grad_scaled_into(&self, xi: &[f64], out: &mut [f64]) {
        let r2 = norm_sq(xi);
        match &self.kernel {
            Kernel::Radial(p) => {
                let r = sqrt(r2);
                let d = p.derivative(r);
                for (o, x) in out.iter_mut().zip(xi) {
                    *o = d * x * x / r;
                }
            }
            Kernel::Dipolar { b_tilde, .. } => {
                let u = xi[2] * xi[2] / r2;
                for (k, o) in out.iter_mut().enumerate() {
                    let v = xi[k] * xi[k] / r2;
                    let direct = if k == 2 { u } else { 0.0 };
                    *o = 6.0 * b_tilde * (direct - u * v);
                }
            }
        }
    }
}
