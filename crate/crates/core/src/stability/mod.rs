//! Drift and stability operators applied to known fields, weak-form
//! assembly of the weighted Dirichlet eigenproblem, δ-stability verdicts and
//! the graphical stability certificate.

mod assemble;
mod certificate;
mod eigen;
mod fields;

pub use assemble::{assemble, assemble_weighted, OperatorMatrices, WeightKind};
pub use certificate::{graphical_stability_certificate, stability_inequality};
pub use eigen::{
    delta_verdict, first_eigenvalue, is_delta_stable, solve_spectrum, DeltaVerdict, SpectralResult, SpectrumReport,
    DEFAULT_TOL_DISC,
};
pub use fields::{random_bump, random_bumps, TestField};

use serde::{Deserialize, Serialize};

use crate::diffops::DiffOps;
use crate::error::{Error, Result};
use crate::geometry::{compute_geometry, GeometryFields};
use crate::stencil::Accuracy;
use crate::surfaces::SampledHypersurface;
use crate::vecops::dot;

/// Per-sample values with a short description of what they hold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub tag: String,
    pub values: Vec<f64>,
    /// Samples where only one-sided stencils were available.
    pub lower_accuracy: Vec<bool>,
}

fn check_field(surface: &SampledHypersurface, f: &[f64]) -> Result<()> {
    if f.len() != surface.len() {
        return Err(Error::InvalidParameter(
            "field length does not match the sample count".into(),
        ));
    }
    if let Some(i) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "input field".into(),
            sample: i,
        });
    }
    Ok(())
}

fn finish(surface: &SampledHypersurface, tag: &str, values: Vec<f64>, acc: Vec<Accuracy>) -> Result<ScalarField> {
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() && !surface.samples[i].boundary {
            return Err(Error::NonFinite {
                what: format!("{tag} stencil"),
                sample: i,
            });
        }
    }
    let lower_accuracy = acc
        .iter()
        .zip(&surface.samples)
        .map(|(a, s)| *a == Accuracy::OneSided || s.boundary)
        .collect();
    Ok(ScalarField {
        tag: tag.into(),
        values,
        lower_accuracy,
    })
}

/// 𝓛f = Δf - ½<x, ∇f>.
pub fn drift_apply(surface: &SampledHypersurface, f: &[f64]) -> Result<ScalarField> {
    check_field(surface, f)?;
    let ops = DiffOps::new(surface)?;
    drift_with(&ops, f).and_then(|(v, a)| finish(surface, "drift", v, a))
}

fn drift_with(ops: &DiffOps, f: &[f64]) -> Result<(Vec<f64>, Vec<Accuracy>)> {
    let (lap, acc1) = ops.laplacian(f);
    let (grad, acc2) = ops.gradient(f);
    let out = ops
        .surface
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| lap[i] - 0.5 * dot(&s.x, &grad[i]))
        .collect();
    let acc = acc1.iter().zip(&acc2).map(|(a, b)| *a.max(b)).collect();
    Ok((out, acc))
}

/// Lf = 𝓛f + (|A|² + ½) f.
pub fn stability_apply(surface: &SampledHypersurface, f: &[f64]) -> Result<ScalarField> {
    let geo = compute_geometry(surface)?;
    stability_apply_with(surface, &geo, f)
}

pub fn stability_apply_with(surface: &SampledHypersurface, geo: &GeometryFields, f: &[f64]) -> Result<ScalarField> {
    check_field(surface, f)?;
    let ops = DiffOps::new(surface)?;
    let (mut v, acc) = drift_with(&ops, f)?;
    for i in 0..v.len() {
        v[i] += (geo.norm_a2[i] + 0.5) * f[i];
    }
    finish(surface, "stability", v, acc)
}

fn sup_interior(surface: &SampledHypersurface, r: &[f64]) -> f64 {
    surface
        .interior()
        .into_iter()
        .filter(|&i| r[i].is_finite())
        .map(|i| r[i].abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    /// sup |LH - H|
    pub r_h: f64,
    /// sup |L<v,n> - ½<v,n>|
    pub r_v: f64,
}

pub fn eigen_identity_residuals(surface: &SampledHypersurface, v: &[f64]) -> Result<IdentityResiduals> {
    if v.len() != surface.ambient_dim() {
        return Err(Error::InvalidParameter("direction has the wrong dimension".into()));
    }
    let geo = compute_geometry(surface)?;
    let h = geo.mean_curvature.clone();
    let lh = stability_apply_with(surface, &geo, &h)?;
    let w: Vec<f64> = surface.samples.iter().map(|s| dot(v, &s.nu)).collect();
    let lw = stability_apply_with(surface, &geo, &w)?;
    let rh: Vec<f64> = lh.values.iter().zip(&h).map(|(a, b)| a - b).collect();
    let rv: Vec<f64> = lw.values.iter().zip(&w).map(|(a, b)| a - 0.5 * b).collect();
    Ok(IdentityResiduals {
        r_h: sup_interior(surface, &rh),
        r_v: sup_interior(surface, &rv),
    })
}

/// sup |𝓛|A|² - (|A|² - 2|A|⁴ + 2|∇A|²)| over interior samples.
pub fn simons_identity_residual(surface: &SampledHypersurface) -> Result<f64> {
    let geo = compute_geometry(surface)?;
    let a2 = &geo.norm_a2;
    let d = drift_apply(surface, a2)?;
    let r: Vec<f64> = (0..a2.len())
        .map(|i| d.values[i] - (a2[i] - 2.0 * a2[i] * a2[i] + 2.0 * geo.grad_a2[i]))
        .collect();
    Ok(sup_interior(surface, &r))
}
