use serde::{Deserialize, Serialize};

use super::constants::*;
use crate::diffops::DiffOps;
use crate::error::{Error, Result};
use crate::gaussian::volume_growth_constant;
use crate::geometry::{compute_geometry, linear_growth_constant};
use crate::report::EstimateReport;
use crate::stability::{first_eigenvalue, DEFAULT_TOL_DISC};
use crate::surfaces::{BallQuery, SampledHypersurface};
use crate::vecops::{dist, norm, norm2, unit_ball_volume};

/// Outcome of the eigenvalue test for ½-stability on B_R.
pub(crate) fn half_stability(surface: &SampledHypersurface, r: f64) -> (bool, String, Option<f64>) {
    match first_eigenvalue(surface, r, 1) {
        Ok(spec) => {
            let l = spec.lambda1();
            if l >= -0.5 - DEFAULT_TOL_DISC {
                (true, format!("verified: lambda1 = {l:.6} >= -1/2 - tol_disc"), Some(l))
            } else {
                (
                    false,
                    format!("not 1/2-stable: lambda1 = {l:.6} < -1/2 - tol_disc"),
                    Some(l),
                )
            }
        }
        Err(e) => (false, format!("unverified: {e}"), None),
    }
}

fn require_cover(surface: &SampledHypersurface, p: &[f64], r: f64) -> Result<()> {
    if surface.coverage.contains_ball(p, r) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("surface is not sampled on B_{r}({p:?})")))
    }
}

/// ∫_{B_{R-2a}} |A|² ≤ C Rⁿ e^{-aR/2} under ½-stability on B_R.
pub fn integral_curvature_decay(surface: &SampledHypersurface, r: f64, lambda0: f64, a: f64) -> Result<EstimateReport> {
    if !(r > 1.0) {
        return Err(Error::InvalidParameter(format!("R must exceed 1, got {r}")));
    }
    if !(a > 0.0) || !(r - 2.0 * a > 0.0) {
        return Err(Error::InvalidParameter(format!("need 0 < a < R/2, got a={a}")));
    }
    let n = surface.n;
    let origin = vec![0.0; surface.ambient_dim()];
    require_cover(surface, &origin, r)?;
    let geo = compute_geometry(surface)?;
    let ball = BallQuery::new(surface, &origin, r - 2.0 * a)?;
    let lhs = ball.integrate(surface, |i| geo.norm_a2[i]);
    let mut rep = EstimateReport::new("prop31");
    rep.param("R", r);
    rep.param("lambda0", lambda0);
    rep.param("a", a);
    rep.param("n", n);
    rep.constant("V0", volume_growth_constant(n, lambda0), V0_FORMULA, "derived");
    let c = rep.constant("C", decay_constant(n, lambda0, a), DECAY_FORMULA, "derived");
    let (ok, status, l1) = half_stability(surface, r);
    if let Some(l) = l1 {
        rep.measure("lambda1", l);
    }
    rep.hypothesis(ok, status);
    let rhs = c * r.powi(n as i32) * (-a * r / 2.0).exp();
    Ok(rep.finish(lhs, rhs))
}

/// Pointwise Δ|A|² ≥ -|x|²|A|²/8 + |A|² - 2|A|⁴; reports the largest
/// violation as lhs against the tolerance.
pub fn simons_inequality_check(surface: &SampledHypersurface, tol: f64) -> Result<EstimateReport> {
    let geo = compute_geometry(surface)?;
    let ops = DiffOps::new(surface)?;
    let (lap, _) = ops.laplacian(&geo.norm_a2);
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    for i in surface.interior() {
        if !lap[i].is_finite() {
            continue;
        }
        let a2 = geo.norm_a2[i];
        let bound = -norm2(&surface.samples[i].x) * a2 / 8.0 + a2 - 2.0 * a2 * a2;
        let v = bound - lap[i];
        if v > worst {
            worst = v;
            at = Some(i);
        }
    }
    let Some(at) = at else {
        return Err(Error::EmptyRegion(
            "no interior samples with a Laplacian stencil".into(),
        ));
    };
    let mut rep = EstimateReport::new("simons_inequality");
    rep.param("tol", tol);
    rep.measure("worst_sample", at);
    rep.measure("laplacian_at_worst", lap[at]);
    rep.note("lhs = sup over interior samples of (-|x|^2|A|^2/8 + |A|^2 - 2|A|^4 - Laplacian |A|^2)");
    Ok(rep.finish(worst, tol))
}

/// g(s) = s^{-n}∫_{B_s(x₀)}|A|² and h(s) = g(s) exp(C'R²s² + Rs/2).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanValueTrace {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    #[serde(rename = "R")]
    pub r: f64,
    pub c_meas: f64,
    pub c_prime: f64,
    pub monotone: bool,
    /// max_i (h(s_i) - h(s_{i+1})), negative when strictly increasing.
    pub worst_drop: f64,
}

impl MeanValueTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,g,h\n");
        for i in 0..self.radii.len() {
            out.push_str(&format!("{},{},{}\n", self.radii[i], self.g[i], self.h[i]));
        }
        out
    }
}

fn on_surface(surface: &SampledHypersurface, x0: &[f64]) -> Result<usize> {
    let i = surface
        .nearest_sample(x0)
        .ok_or_else(|| Error::EmptyRegion("surface has no samples".into()))?;
    let d = dist(&surface.samples[i].x, x0);
    if d > 1e-9 * (1.0 + norm(x0)) {
        return Err(Error::Precondition(format!(
            "x0 is not a sample point (nearest at distance {d})"
        )));
    }
    Ok(i)
}

pub fn mean_value_monotonicity(
    surface: &SampledHypersurface,
    x0: &[f64],
    r: f64,
    s_max: f64,
    count: usize,
) -> Result<MeanValueTrace> {
    if count < 2 {
        return Err(Error::InvalidParameter("need at least two radii".into()));
    }
    on_surface(surface, x0)?;
    if norm(x0) > r - 2.0 {
        return Err(Error::Precondition(format!("x0 must lie in B_(R-2) = B_{}", r - 2.0)));
    }
    let rim = surface.coverage.radius_about(x0);
    if !(s_max > 0.0) || s_max > 1.0 || s_max > rim {
        return Err(Error::Precondition(format!(
            "s_max = {s_max} must be positive and at most min(1, rim distance {rim})"
        )));
    }
    let n = surface.n;
    let geo = compute_geometry(surface)?;
    let outer = BallQuery::new(surface, x0, s_max)?;
    if outer.sample_count(surface) < 20 {
        return Err(Error::EmptyRegion(format!(
            "only {} samples in B_{s_max}(x0); at least 20 are needed",
            outer.sample_count(surface)
        )));
    }
    let c_meas = linear_growth_constant(surface, &geo, r - 1.0)?;
    let c_prime = mean_value_constant(c_meas);
    let radii: Vec<f64> = (0..count)
        .map(|i| s_max * (0.25 + 0.75 * i as f64 / (count - 1) as f64))
        .collect();
    let mut g = Vec::with_capacity(count);
    let mut h = Vec::with_capacity(count);
    for &s in &radii {
        let b = BallQuery::new(surface, x0, s)?;
        let gv = b.integrate(surface, |i| geo.norm_a2[i]) / s.powi(n as i32);
        g.push(gv);
        h.push(gv * (c_prime * r * r * s * s + 0.5 * r * s).exp());
    }
    let worst_drop = h.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max);
    Ok(MeanValueTrace {
        center: x0.to_vec(),
        radii,
        g,
        h,
        r,
        c_meas,
        c_prime,
        monotone: worst_drop <= 1e-8,
        worst_drop,
    })
}

/// |A|²(x₀) ≤ (e^{C'+1/2}/ωₙ) Rⁿ · C Rⁿ e^{-R/4}.
pub fn bootstrap_pointwise_bound(
    surface: &SampledHypersurface,
    x0: &[f64],
    r: f64,
    lambda0: f64,
) -> Result<EstimateReport> {
    if !(r >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "R must be at least 1 so that s = 1/R <= 1, got {r}"
        )));
    }
    let i0 = on_surface(surface, x0)?;
    if norm(x0) > r - 2.0 {
        return Err(Error::Precondition(format!("x0 must lie in B_(R-2) = B_{}", r - 2.0)));
    }
    require_cover(surface, &vec![0.0; x0.len()], r)?;
    let n = surface.n;
    let geo = compute_geometry(surface)?;
    let mut rep = EstimateReport::new("bootstrap");
    rep.param("x0", x0.to_vec());
    rep.param("R", r);
    rep.param("lambda0", lambda0);
    rep.param("n", n);
    let c_meas = rep.constant(
        "C_meas",
        linear_growth_constant(surface, &geo, r - 1.0)?,
        "sup_{B_(R-1)} |A|/(1+|x|)",
        "measured",
    );
    let c_prime = rep.constant("C_prime", mean_value_constant(c_meas), MEAN_VALUE_FORMULA, "derived");
    rep.constant("V0", volume_growth_constant(n, lambda0), V0_FORMULA, "derived");
    let c = rep.constant("C", decay_constant(n, lambda0, 0.5), DECAY_FORMULA, "derived");
    let omega = rep.constant("omega_n", unit_ball_volume(n), "pi^(n/2)/Gamma(n/2+1)", "derived");
    let (ok, status, l1) = half_stability(surface, r);
    if let Some(l) = l1 {
        rep.measure("lambda1", l);
    }
    if !ok {
        rep.note("hypothesis not met: the bound is not applicable to this surface");
    }
    rep.hypothesis(ok, status);
    let rn = r.powi(n as i32);
    let rhs = (c_prime + 0.5).exp() / omega * rn * c * rn * (-r / 4.0).exp();
    Ok(rep.finish(geo.norm_a2[i0], rhs))
}
