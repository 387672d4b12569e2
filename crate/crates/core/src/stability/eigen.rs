use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use super::assemble::{assemble, OperatorMatrices};
use crate::error::{Error, Result};
use crate::surfaces::SampledHypersurface;

/// Declared discretization tolerance for δ-stability verdicts.
pub const DEFAULT_TOL_DISC: f64 = 1e-3;

/// Lowest eigenpairs of the Dirichlet problem (K - P)φ = λMφ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub region_radius: f64,
    pub h: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// M-orthonormal eigenvectors over `free`.
    pub eigenfields: Vec<Vec<f64>>,
    pub free: Vec<usize>,
    /// ‖M⁻¹(K - P)φ - λφ‖_M per eigenpair.
    pub residuals: Vec<f64>,
    pub operator: String,
    pub radial_only: bool,
}

impl SpectralResult {
    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Eigenfield `k` scattered to all samples (zero off the free set).
    pub fn field_on(&self, surface: &SampledHypersurface, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; surface.len()];
        for (j, &s) in self.free.iter().enumerate() {
            out[s] = self.eigenfields[k][j];
        }
        out
    }
}

/// Solve for the `m` lowest eigenpairs of assembled forms.
pub fn solve_spectrum(ops: &OperatorMatrices, m: usize, h: f64, operator: &str) -> Result<SpectralResult> {
    let k = ops.len();
    if m == 0 {
        return Err(Error::InvalidParameter("eigenvalue count must be positive".into()));
    }
    let m = m.min(k);
    let scale: Vec<f64> = ops.mass.iter().map(|v| 1.0 / v.sqrt()).collect();
    let a = Mat::<f64>::from_fn(k, k, |i, j| {
        let kij = 0.5 * (ops.stiffness[(i, j)] + ops.stiffness[(j, i)]);
        let mut v = kij * scale[i] * scale[j];
        if i == j {
            v -= ops.potential[i] / ops.mass[i];
        }
        v
    });
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut eigenvalues = Vec::with_capacity(m);
    let mut eigenfields = Vec::with_capacity(m);
    let mut residuals = Vec::with_capacity(m);
    for c in 0..m {
        let lam = s[c];
        let phi: Vec<f64> = (0..k).map(|i| u[(i, c)] * scale[i]).collect();
        let mut res = 0.0;
        for i in 0..k {
            let mut row = -ops.potential[i] * phi[i];
            for j in 0..k {
                row += ops.stiffness[(i, j)] * phi[j];
            }
            let r = row - lam * ops.mass[i] * phi[i];
            res += r * r / ops.mass[i];
        }
        eigenvalues.push(lam);
        eigenfields.push(phi);
        residuals.push(res.sqrt());
    }
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("non-finite eigenvalue".into()));
    }
    Ok(SpectralResult {
        region_radius: ops.region_radius,
        h,
        eigenvalues,
        eigenfields,
        free: ops.free.clone(),
        residuals,
        operator: operator.into(),
        radial_only: ops.radial_only,
    })
}

/// Lowest `m` Dirichlet eigenvalues of -L on Σ ∩ B_R.
pub fn first_eigenvalue(surface: &SampledHypersurface, r: f64, m: usize) -> Result<SpectralResult> {
    let ops = assemble(surface, r)?;
    solve_spectrum(&ops, m, surface.spacing(), "shrinker")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaVerdict {
    pub verdict: bool,
    pub lambda1: f64,
    pub margin: f64,
    pub delta: f64,
    pub tol_disc: f64,
}

pub fn delta_verdict(lambda1: f64, delta: f64, tol_disc: f64) -> DeltaVerdict {
    DeltaVerdict {
        verdict: lambda1 >= -delta - tol_disc,
        lambda1,
        margin: lambda1 + delta,
        delta,
        tol_disc,
    }
}

/// λ₁ ≥ -δ - tol_disc on Σ ∩ B_R.
pub fn is_delta_stable(surface: &SampledHypersurface, r: f64, delta: f64, tol_disc: f64) -> Result<DeltaVerdict> {
    if !delta.is_finite() || !(tol_disc >= 0.0) {
        return Err(Error::InvalidParameter(
            "delta must be finite and tol_disc nonnegative".into(),
        ));
    }
    let spec = first_eigenvalue(surface, r, 1)?;
    Ok(delta_verdict(spec.lambda1(), delta, tol_disc))
}

/// `spectrum.v1` report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub schema: String,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub h: f64,
    pub eigenvalues: Vec<f64>,
    pub delta: Option<f64>,
    pub verdict: Option<bool>,
    pub margin: Option<f64>,
    pub tol_disc: f64,
    pub seed: Option<u64>,
    pub operator: String,
    pub radial_only: bool,
    pub residuals: Vec<f64>,
}

impl SpectrumReport {
    pub fn new(spec: &SpectralResult, delta: Option<f64>, tol_disc: f64, seed: Option<u64>) -> Self {
        let v = delta.map(|d| delta_verdict(spec.lambda1(), d, tol_disc));
        SpectrumReport {
            schema: "spectrum.v1".into(),
            r: spec.region_radius.is_finite().then_some(spec.region_radius),
            h: spec.h,
            eigenvalues: spec.eigenvalues.clone(),
            delta,
            verdict: v.as_ref().map(|v| v.verdict),
            margin: v.as_ref().map(|v| v.margin),
            tol_disc,
            seed,
            operator: spec.operator.clone(),
            radial_only: spec.radial_only,
            residuals: spec.residuals.clone(),
        }
    }
}
