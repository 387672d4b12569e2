use super::constants::*;
use super::cutoff::Cutoff;
use crate::error::{Error, Result};
use crate::gaussian::volume_growth_constant;
use crate::geometry::compute_geometry;
use crate::report::EstimateReport;
use crate::surfaces::{BallQuery, SampledHypersurface};
use crate::vecops::{dist, norm, norm2};

const SIGMA_STEPS: usize = 32;
const MIN_RING_SAMPLES: usize = 4;

fn require_cover(surface: &SampledHypersurface, p: &[f64], r: f64) -> Result<()> {
    if surface.coverage.contains_ball(p, r) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("surface is not sampled on B_{r}({p:?})")))
    }
}

fn check_scale(r: f64, limit: f64, what: &str) -> Result<()> {
    if !(r > 0.0) || r > limit * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("{what} = {r} must lie in (0, {limit}]")));
    }
    Ok(())
}

/// Small energy ∫_{B_{r₀}(x₀)}|A|ⁿ < ε implies σ²|A|²(y) ≤ 1 on B_{r₀-σ}(x₀).
pub fn choi_schoen(surface: &SampledHypersurface, x0: &[f64], r0: f64, epsilon: Option<f64>) -> Result<EstimateReport> {
    let n = surface.n;
    let th = theta(norm(x0));
    check_scale(r0, th, "r0")?;
    require_cover(surface, x0, r0)?;
    let geo = compute_geometry(surface)?;
    let mut rep = EstimateReport::new("choischoen");
    rep.param("x0", x0.to_vec());
    rep.param("r0", r0);
    rep.param("n", n);
    rep.constant("theta", th, "min(1, 1/|x0|)", "derived");
    let eps = match epsilon {
        Some(e) => rep.constant("epsilon", e, "caller", "input"),
        None => rep.constant("epsilon", choi_schoen_epsilon(n), CHOI_SCHOEN_FORMULA, "derived"),
    };
    let ball = BallQuery::new(surface, x0, r0)?;
    let energy = ball.integrate(surface, |i| geo.norm_a2[i].powf(n as f64 / 2.0));
    rep.measure("energy", energy);
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for j in 1..=SIGMA_STEPS {
        let sigma = r0 * j as f64 / SIGMA_STEPS as f64;
        for (i, s) in surface.samples.iter().enumerate() {
            if dist(&s.x, x0) < r0 - sigma {
                worst = worst.max(sigma * sigma * geo.norm_a2[i]);
                checked += 1;
            }
        }
    }
    rep.measure("checked_pairs", checked);
    if energy < eps {
        rep.hypothesis(true, "verified: energy below epsilon");
    } else {
        rep.hypothesis(false, "hypothesis fails: energy is not below epsilon");
        if worst <= 1.0 {
            rep.note("the conclusion sigma^2 |A|^2 <= 1 holds anyway on the sampled pairs");
        }
    }
    Ok(rep.finish(worst, 1.0))
}

/// Weight used by the SSY-type inequality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SsyWeight {
    /// e^{-|x|²/4} with the R² term.
    Gaussian,
    /// e^{x_{n+1}} with the R² term replaced by 4.
    Translator,
}

/// ∫|A|^{4+2q}φ²w ≤ C(∫|A|^{2+2q}|∇φ|²w + R²∫|A|^{2+2q}φ²w).
pub fn ssy_inequality(
    surface: &SampledHypersurface,
    cutoff: &Cutoff,
    q: f64,
    a: Option<f64>,
    r: f64,
) -> Result<EstimateReport> {
    ssy_weighted(surface, cutoff, q, a, r, SsyWeight::Gaussian)
}

pub fn ssy_weighted(
    surface: &SampledHypersurface,
    cutoff: &Cutoff,
    q: f64,
    a: Option<f64>,
    r: f64,
    weight: SsyWeight,
) -> Result<EstimateReport> {
    let n = surface.n;
    let a = a.unwrap_or_else(|| ssy_default_a(n, q));
    let qmax = (2.0 / (n as f64 + 1.0)).sqrt();
    if !(q >= 0.0) || q >= qmax {
        return Err(Error::InvalidParameter(format!("q must lie in [0, {qmax}), got {q}")));
    }
    let c = ssy_constant(n, q, a)?;
    let reach = norm(&cutoff.center) + cutoff.support_radius();
    if reach > r * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "cutoff support reaches radius {reach}, outside B_{r}"
        )));
    }
    require_cover(surface, &cutoff.center, cutoff.support_radius())?;
    let geo = compute_geometry(surface)?;
    let bound = cutoff.bind(surface)?;
    let factor = match weight {
        SsyWeight::Gaussian => r * r,
        SsyWeight::Translator => 4.0,
    };
    let (mut lhs, mut i_grad, mut i_mass) = (0.0, 0.0, 0.0);
    for (i, s) in surface.samples.iter().enumerate() {
        let (phi, dphi) = (bound.values[i], bound.grad_norms[i]);
        if phi == 0.0 && dphi == 0.0 {
            continue;
        }
        let w = match weight {
            SsyWeight::Gaussian => (-norm2(&s.x) / 4.0).exp(),
            SsyWeight::Translator => s.x[n].exp(),
        } * s.dmu;
        let a2 = geo.norm_a2[i];
        let low = a2.powf(1.0 + q);
        lhs += a2.powf(2.0 + q) * phi * phi * w;
        i_grad += low * dphi * dphi * w;
        i_mass += low * phi * phi * w;
    }
    let mut rep = EstimateReport::new("ssy");
    rep.param("q", q);
    rep.param("a", a);
    rep.param("R", r);
    rep.param("n", n);
    rep.param("cutoff", serde_json::to_value(cutoff)?);
    rep.constant("D", ssy_d(n, q, a), "2/(n+1) - q^2 - a*q", "derived");
    rep.constant("C", c, SSY_FORMULA, "derived");
    rep.measure("gradient_term", i_grad);
    rep.measure("mass_term", i_mass);
    rep.hypothesis(true, "assumed: stability is the caller's responsibility");
    if weight == SsyWeight::Translator {
        rep.operator = Some("translator".into());
        rep.note("translator weight exp(x_(n+1)); the R^2 factor is replaced by 4");
    }
    Ok(rep.finish(lhs, c * (i_grad + factor * i_mass)))
}

/// ∫_{B_r(x₀)}|A|^p ≤ C_p r^{n-p} at scales r ≤ θ/2.
pub fn scale_invariant_energy(
    surface: &SampledHypersurface,
    x0: &[f64],
    r: f64,
    p: f64,
    lambda0: f64,
) -> Result<EstimateReport> {
    if !(2.0..=4.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [2, 4], got {p}")));
    }
    let th = theta(norm(x0));
    check_scale(r, 0.5 * th, "r")?;
    require_cover(surface, x0, r)?;
    let n = surface.n;
    let geo = compute_geometry(surface)?;
    let lhs = BallQuery::new(surface, x0, r)?.integrate(surface, |i| geo.norm_a2[i].powf(p / 2.0));
    let mut rep = EstimateReport::new("lemma43");
    rep.param("x0", x0.to_vec());
    rep.param("r", r);
    rep.param("p", p);
    rep.param("lambda0", lambda0);
    rep.param("n", n);
    rep.constant("theta", th, "min(1, 1/|x0|)", "derived");
    rep.constant("V0", volume_growth_constant(n, lambda0), V0_FORMULA, "derived");
    rep.constant("C2", lemma_p2(n, lambda0), LEMMA_P2_FORMULA, "derived");
    rep.constant("C4", lemma_p4(n, lambda0)?, LEMMA_P4_FORMULA, "derived");
    let c = rep.constant("C_p", lemma_p(n, p, lambda0)?, LEMMA_P_FORMULA, "derived");
    rep.hypothesis(true, "assumed: 1/2-stability on B_R is not checked");
    Ok(rep.finish(lhs, c * r.powf(n as f64 - p)))
}

/// ∫|A|²η² ≤ (C/k) r₀^{n-2} for the logarithmic cutoff η about p.
pub fn log_cutoff_energy(
    surface: &SampledHypersurface,
    p: &[f64],
    r0: f64,
    k: u32,
    lambda0: f64,
) -> Result<EstimateReport> {
    let cutoff = Cutoff::logarithmic(p.to_vec(), r0, k)?;
    let th = theta(norm(p));
    check_scale(r0, 0.25 * th, "r0")?;
    require_cover(surface, p, r0)?;
    let n = surface.n;
    let kf = k as f64;
    let geo = compute_geometry(surface)?;
    let excess = cutoff.gradient_bound_excess(surface, 1e-12)?;
    if excess > 0.0 {
        return Err(Error::Invariant(format!(
            "log cutoff gradient exceeds 1/(kr) by {excess}"
        )));
    }
    let bound = cutoff.bind(surface)?;
    let mut counts = vec![0usize; k as usize];
    let mut ring_sums = vec![0.0; k as usize];
    let mut lhs = 0.0;
    for (i, s) in surface.samples.iter().enumerate() {
        let d = dist(&s.x, p);
        let eta = bound.values[i];
        lhs += geo.norm_a2[i] * eta * eta * s.dmu;
        if d <= r0 && d > (-kf).exp() * r0 {
            let l = ((r0 / d).ln().floor() as usize).min(k as usize - 1);
            counts[l] += 1;
            ring_sums[l] += s.dmu / (d * d);
        }
    }
    if let Some(l) = counts.iter().position(|c| *c < MIN_RING_SAMPLES) {
        return Err(Error::Precondition(format!(
            "ring {l} of the logarithmic annulus holds {} samples; at least {MIN_RING_SAMPLES} are needed",
            counts[l]
        )));
    }
    let inner = BallQuery::new(surface, p, (-kf).exp() * r0)?.integrate(surface, |i| geo.norm_a2[i]);
    let mut rep = EstimateReport::new("logcutoff");
    rep.param("p", p.to_vec());
    rep.param("r0", r0);
    rep.param("k", k);
    rep.param("lambda0", lambda0);
    rep.param("n", n);
    rep.param("cutoff", serde_json::to_value(&cutoff)?);
    rep.constant("theta", th, "min(1, 1/|p|)", "derived");
    rep.constant("V0", volume_growth_constant(n, lambda0), V0_FORMULA, "derived");
    let c = rep.constant("C", log_cutoff_constant(n, lambda0), LOG_CUTOFF_FORMULA, "derived");
    rep.measure("ring_counts", counts);
    rep.measure("ring_sums", ring_sums.clone());
    rep.measure("annulus_sum", ring_sums.iter().sum::<f64>());
    rep.measure("inner_energy", inner);
    rep.hypothesis(true, "assumed: 1/2-stability on B_R is not checked");
    rep.note("lhs is the full integral of |A|^2 eta^2, which dominates the energy of the inner ball");
    Ok(rep.finish(lhs, c / kf * r0.powi(n as i32 - 2)))
}
