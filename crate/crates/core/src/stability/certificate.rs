use serde_json::json;

use super::fields::{random_bumps, TestField};
use super::{drift_apply, sup_interior};
use crate::diffops::DiffOps;
use crate::error::{Error, Result};
use crate::geometry::{compute_geometry, shrinker_residual, GeometryFields};
use crate::report::EstimateReport;
use crate::surfaces::SampledHypersurface;
use crate::vecops::{dot, norm, norm2};

/// Both sides of ∫|A|²φ²ρ ≤ ∫|∇φ|²ρ for one compactly supported φ, with
/// the tangential gradient taken from the ambient one analytically.
pub fn stability_inequality(
    surface: &SampledHypersurface,
    geo: &GeometryFields,
    phi: &TestField,
    r: f64,
) -> Result<(f64, f64)> {
    phi.check_support(r)?;
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for (i, s) in surface.samples.iter().enumerate() {
        let v = phi.value(&s.x);
        let g = phi.gradient(&s.x);
        if v == 0.0 && g.iter().all(|c| *c == 0.0) {
            continue;
        }
        let rho = (-norm2(&s.x) / 4.0).exp() * s.dmu;
        let gn = dot(&g, &s.nu);
        lhs += geo.norm_a2[i] * v * v * rho;
        rhs += (norm2(&g) - gn * gn) * rho;
    }
    Ok((lhs, rhs))
}

/// Graphical surfaces are ½-stable: checks 𝓛h = -|∇h|² - |A|² for
/// h = log<v,n> and the stability inequality for seeded random bumps.
pub fn graphical_stability_certificate(
    surface: &SampledHypersurface,
    v: &[f64],
    r: f64,
    trials: usize,
    seed: u64,
) -> Result<EstimateReport> {
    if v.len() != surface.ambient_dim() || norm(v) == 0.0 {
        return Err(Error::InvalidParameter(
            "direction must be a nonzero ambient vector".into(),
        ));
    }
    if !surface.coverage.contains_ball(&vec![0.0; v.len()], r) {
        return Err(Error::Precondition(format!("surface does not cover B_{r}")));
    }
    let w: Vec<f64> = surface.samples.iter().map(|s| dot(v, &s.nu)).collect();
    for (i, s) in surface.samples.iter().enumerate() {
        if norm(&s.x) < r && !(w[i] > 0.0) {
            return Err(Error::Precondition(format!(
                "<v,n> = {} ≤ 0 at sample {i}: not graphical",
                w[i]
            )));
        }
    }
    let geo = compute_geometry(surface)?;
    let h: Vec<f64> = w.iter().map(|x| if *x > 0.0 { x.ln() } else { 0.0 }).collect();
    let ops = DiffOps::new(surface)?;
    let (grad, _) = ops.gradient(&h);
    let lh = drift_apply(surface, &h)?;
    let resid: Vec<f64> = (0..surface.len())
        .map(|i| {
            if norm(&surface.samples[i].x) < r {
                lh.values[i] + norm2(&grad[i]) + geo.norm_a2[i]
            } else {
                f64::NAN
            }
        })
        .collect();
    let eq_resid = sup_interior(surface, &resid);
    let shrink = shrinker_residual(surface, &geo).sup;

    let mut rep = EstimateReport::new("graphical_stability");
    rep.param("v", v.to_vec());
    rep.param("R", r);
    rep.param("trials", trials);
    rep.param("seed", seed);
    rep.measure("log_w_equation_residual", eq_resid);
    rep.measure("shrinker_residual", shrink);
    if shrink > 1e-6 {
        rep.note("surface is not a shrinker; the log<v,n> equation residual is informational only");
    }
    let fields = random_bumps(surface, r, trials, seed)?;
    let mut worst: Option<(f64, f64)> = None;
    let mut all = Vec::with_capacity(trials);
    for phi in &fields {
        let (l, rr) = stability_inequality(surface, &geo, phi, r)?;
        all.push(json!({"lhs": l, "rhs": rr}));
        let ratio = if rr > 0.0 {
            l / rr
        } else if l > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        let prev = worst.map(|(a, b)| {
            if b > 0.0 {
                a / b
            } else if a > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        });
        if prev.map_or(true, |p| ratio > p) {
            worst = Some((l, rr));
        }
    }
    rep.measure("trials", all);
    let (lhs, rhs) = worst.unwrap_or((0.0, 0.0));
    rep.note("lhs and rhs are taken from the trial with the largest ratio");
    Ok(rep.finish(lhs, rhs))
}
