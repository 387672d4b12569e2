//! Gaussian-weighted integrals, the F-functional, entropy and the
//! polynomial volume-growth certificate.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::maximize;
use crate::report::EstimateReport;
use crate::surfaces::{BallQuery, Chart, SampledHypersurface};
use crate::vecops::norm2;

/// Volume-growth constant e^{-1/4} (4π)^{n/2} λ₀: vol(B_r(p) ∩ Σ) ≤ V₀ rⁿ.
pub fn volume_growth_constant(n: usize, lambda0: f64) -> f64 {
    (-0.25f64).exp() * (4.0 * PI).powf(n as f64 / 2.0) * lambda0
}

/// ρ = exp(-|x - x₀|² / 4t₀) at every sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianWeight {
    pub center: Vec<f64>,
    pub t0: f64,
    pub values: Vec<f64>,
    pub normalizer: f64,
}

impl GaussianWeight {
    pub fn new(surface: &SampledHypersurface, center: &[f64], t0: f64) -> Result<Self> {
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::InvalidParameter(format!("scale t0 must be positive, got {t0}")));
        }
        if center.len() != surface.ambient_dim() {
            return Err(Error::InvalidParameter("centre has the wrong dimension".into()));
        }
        if matches!(surface.chart, Chart::Profile(_)) && center[..surface.n].iter().any(|c| *c != 0.0) {
            return Err(Error::Unsupported(
                "rotational profiles take centres on the symmetry axis only".into(),
            ));
        }
        let values = surface
            .samples
            .iter()
            .map(|s| {
                let d2: f64 = s.x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (4.0 * t0)).exp()
            })
            .collect();
        let normalizer = (4.0 * PI * t0).powf(-(surface.n as f64) / 2.0);
        Ok(GaussianWeight {
            center: center.to_vec(),
            t0,
            values,
            normalizer,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub value: f64,
    pub truncation_tail_bound: f64,
    /// Radius about the centre inside which the surface is fully sampled;
    /// for closed surfaces the largest sample distance.
    pub region_radius: f64,
}

/// Bound on ∫_{Σ \ B_D(x₀)} ρ from dyadic annuli and the volume-growth
/// estimate.
fn tail_bound(n: usize, d: f64, t0: f64, lambda0: f64) -> f64 {
    let v0 = volume_growth_constant(n, lambda0);
    let mut sum = 0.0;
    for j in 0..200 {
        let inner = d * 2f64.powi(j);
        let term = v0 * (2.0 * inner).powi(n as i32) * (-(inner * inner) / (4.0 * t0)).exp();
        sum += term;
        if inner * inner / (4.0 * t0) > 800.0 {
            break;
        }
    }
    sum
}

/// Σ field·ρ·dμ, with a certified bound on the unsampled remainder.
pub fn weighted_integral(
    surface: &SampledHypersurface,
    field: &[f64],
    weight: &GaussianWeight,
    lambda0: Option<f64>,
) -> Result<FunctionalValue> {
    if field.len() != surface.len() || weight.values.len() != surface.len() {
        return Err(Error::InvalidParameter(
            "field length does not match the sample count".into(),
        ));
    }
    let mut value = 0.0;
    for (i, s) in surface.samples.iter().enumerate() {
        if !field[i].is_finite() {
            return Err(Error::NonFinite {
                what: "integrand".into(),
                sample: i,
            });
        }
        value += field[i] * weight.values[i] * s.dmu;
    }
    if surface.coverage.is_complete() {
        let region_radius = surface
            .samples
            .iter()
            .map(|s| norm2(&crate::vecops::sub(&s.x, &weight.center)).sqrt())
            .fold(0.0, f64::max);
        return Ok(FunctionalValue {
            value,
            truncation_tail_bound: 0.0,
            region_radius,
        });
    }
    let lambda0 = lambda0.ok_or_else(|| {
        Error::Precondition("an entropy bound λ0 is required to bound the tail of a noncompact surface".into())
    })?;
    let d = surface.coverage.radius_about(&weight.center);
    if !(d > 0.0) {
        return Err(Error::Precondition(
            "the weight centre lies outside the sampled region".into(),
        ));
    }
    let sup = field.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tail = sup * tail_bound(surface.n, d, weight.t0, lambda0);
    Ok(FunctionalValue {
        value,
        truncation_tail_bound: tail,
        region_radius: d,
    })
}

/// F_{x₀,t₀}(Σ) = (4πt₀)^{-n/2} ∫ ρ dμ.
pub fn f_functional(
    surface: &SampledHypersurface,
    x0: &[f64],
    t0: f64,
    lambda0: Option<f64>,
) -> Result<FunctionalValue> {
    let w = GaussianWeight::new(surface, x0, t0)?;
    let ones = vec![1.0; surface.len()];
    let mut v = weighted_integral(surface, &ones, &w, lambda0)?;
    v.value *= w.normalizer;
    v.truncation_tail_bound *= w.normalizer;
    Ok(v)
}

/// Plain F value without tail bookkeeping, for the optimizer.
fn f_raw(surface: &SampledHypersurface, x0: &[f64], t0: f64) -> f64 {
    let inv = 1.0 / (4.0 * t0);
    let mut acc = 0.0;
    for s in &surface.samples {
        let d2: f64 = s.x.iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum();
        acc += (-d2 * inv).exp() * s.dmu;
    }
    acc * (4.0 * PI * t0).powf(-(surface.n as f64) / 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult {
    pub schema: String,
    pub value: f64,
    pub center: Vec<f64>,
    pub t0: f64,
    /// The maximum is not isolated (some Hessian eigenvalue vanishes).
    pub flat_directions: bool,
    pub converged: bool,
    pub tail_bound: f64,
    pub search_box: Vec<[f64; 2]>,
    pub log_t0_range: [f64; 2],
    pub evaluations: usize,
}

const GRID_POINTS: usize = 5;
const LOG_T_POINTS: usize = 9;

/// sup over centres and scales of F, by a coarse grid followed by
/// Nelder-Mead in (x₀, log t₀).
pub fn entropy(surface: &SampledHypersurface, lambda0_hint: Option<f64>) -> Result<EntropyResult> {
    if surface.is_empty() {
        return Err(Error::EmptyRegion("surface has no samples".into()));
    }
    if !surface.coverage.is_complete() && lambda0_hint.is_none() {
        return Err(Error::Precondition(
            "entropy of a truncated surface needs an entropy bound hint for the tail".into(),
        ));
    }
    let d = surface.ambient_dim();
    let profile = matches!(surface.chart, Chart::Profile(_));
    // Free coordinates: all ambient ones, or the axis coordinate for profiles.
    let free: Vec<usize> = if profile { vec![surface.n] } else { (0..d).collect() };
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for s in &surface.samples {
        for c in 0..d {
            lo[c] = lo[c].min(s.x[c]);
            hi[c] = hi[c].max(s.x[c]);
        }
    }
    let search_box: Vec<[f64; 2]> = (0..d)
        .map(|c| {
            let mid = 0.5 * (lo[c] + hi[c]);
            let half = hi[c] - lo[c];
            if profile && c < surface.n {
                [0.0, 0.0]
            } else {
                [mid - half, mid + half]
            }
        })
        .collect();
    // Scales below (2h)² are not resolved by the samples.
    let log_range = [(4.0 * surface.spacing().powi(2)).ln().max(-4.0), 4.0];
    let dim = free.len() + 1;
    let unpack = |p: &[f64]| -> (Vec<f64>, f64) {
        let mut x0 = vec![0.0; d];
        for c in 0..d {
            x0[c] = 0.5 * (search_box[c][0] + search_box[c][1]);
        }
        for (k, &c) in free.iter().enumerate() {
            x0[c] = p[k];
        }
        (x0, p[free.len()].exp())
    };
    let objective = |p: &[f64]| {
        let below = log_range[0] - p[free.len()];
        if below > 0.0 {
            let mut q = p.to_vec();
            q[free.len()] = log_range[0];
            let (x0, t0) = unpack(&q);
            return f_raw(surface, &x0, t0) - below;
        }
        let (x0, t0) = unpack(p);
        f_raw(surface, &x0, t0)
    };
    let mut evaluations = 0usize;
    let mut best_p = vec![0.0; dim];
    let mut best_v = f64::NEG_INFINITY;
    let axis = |c: usize, i: usize| {
        let [a, b] = search_box[c];
        a + (b - a) * i as f64 / (GRID_POINTS - 1) as f64
    };
    let total = GRID_POINTS.pow(free.len() as u32) * LOG_T_POINTS;
    for code in 0..total {
        let mut rest = code;
        let mut p = vec![0.0; dim];
        let lt = rest % LOG_T_POINTS;
        rest /= LOG_T_POINTS;
        p[free.len()] = log_range[0] + (log_range[1] - log_range[0]) * lt as f64 / (LOG_T_POINTS - 1) as f64;
        for (k, &c) in free.iter().enumerate() {
            p[k] = axis(c, rest % GRID_POINTS);
            rest /= GRID_POINTS;
        }
        let v = objective(&p);
        evaluations += 1;
        if v > best_v {
            best_v = v;
            best_p = p;
        }
    }
    let mut edges: Vec<f64> = free
        .iter()
        .map(|&c| ((search_box[c][1] - search_box[c][0]) / (GRID_POINTS - 1) as f64).max(0.1) * 0.5)
        .collect();
    edges.push(0.5);
    let counted = std::cell::Cell::new(0usize);
    let counting = |p: &[f64]| {
        counted.set(counted.get() + 1);
        objective(p)
    };
    let m = maximize(&counting, &best_p, &edges, 4000)?;
    evaluations += counted.get();
    let (mut point, mut value) = (best_p, best_v);
    if m.value >= value {
        point = m.point;
        value = m.value;
    }
    let hess = hessian(&objective, &point, 1e-3);
    evaluations += 2 * dim * dim + 1;
    let flat = SymmetricEigen::new(hess).eigenvalues.iter().any(|e| e.abs() < 1e-8);
    let (center, t0) = unpack(&point);
    let tail = if surface.coverage.is_complete() {
        0.0
    } else {
        f_functional(surface, &center, t0, lambda0_hint)?.truncation_tail_bound
    };
    Ok(EntropyResult {
        schema: "functional.v1".into(),
        value,
        center,
        t0,
        flat_directions: flat,
        converged: m.converged,
        tail_bound: tail,
        search_box,
        log_t0_range: log_range,
        evaluations,
    })
}

/// Central-difference Hessian.
fn hessian(f: &dyn Fn(&[f64]) -> f64, p: &[f64], h: f64) -> DMatrix<f64> {
    let k = p.len();
    let f0 = f(p);
    let at = |di: usize, si: f64, dj: usize, sj: f64| {
        let mut q = p.to_vec();
        q[di] += si * h;
        q[dj] += sj * h;
        f(&q)
    };
    let mut hm = DMatrix::zeros(k, k);
    for i in 0..k {
        let mut q = p.to_vec();
        q[i] += h;
        let fp = f(&q);
        q[i] -= 2.0 * h;
        let fm = f(&q);
        hm[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let v =
                (at(i, 1.0, j, 1.0) - at(i, 1.0, j, -1.0) - at(i, -1.0, j, 1.0) + at(i, -1.0, j, -1.0)) / (4.0 * h * h);
            hm[(i, j)] = v;
            hm[(j, i)] = v;
        }
    }
    hm
}

/// Report in the `functional.v1` layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub schema: String,
    pub name: String,
    pub value: f64,
    pub tail_bound: f64,
    pub params: serde_json::Map<String, serde_json::Value>,
    pub pass: Option<bool>,
}

impl FunctionalReport {
    pub fn from_entropy(e: &EntropyResult) -> Self {
        let mut params = serde_json::Map::new();
        params.insert("center".into(), serde_json::json!(e.center));
        params.insert("t0".into(), serde_json::json!(e.t0));
        params.insert("flat_directions".into(), serde_json::json!(e.flat_directions));
        params.insert("converged".into(), serde_json::json!(e.converged));
        params.insert("search_box".into(), serde_json::json!(e.search_box));
        params.insert("log_t0_range".into(), serde_json::json!(e.log_t0_range));
        FunctionalReport {
            schema: "functional.v1".into(),
            name: "entropy".into(),
            value: e.value,
            tail_bound: e.tail_bound,
            params,
            pass: None,
        }
    }
}

/// vol(B_r(p) ∩ Σ) ≤ e^{-1/4}(4π)^{n/2} λ₀ rⁿ.
pub fn volume_growth_certificate(
    surface: &SampledHypersurface,
    p: &[f64],
    r: f64,
    lambda0: f64,
) -> Result<EstimateReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let n = surface.n;
    let ball = BallQuery::new(surface, p, r)?;
    let lhs = ball.volume(surface);
    let mut rep = EstimateReport::new("volgrowth");
    rep.param("p", p.to_vec());
    rep.param("r", r);
    rep.param("lambda0", lambda0);
    rep.param("n", n);
    let v0 = rep.constant(
        "V0",
        volume_growth_constant(n, lambda0),
        "exp(-1/4)*(4*pi)^(n/2)*lambda0",
        "derived",
    );
    rep.measure("samples_in_ball", ball.sample_count(surface));
    Ok(rep.finish(lhs, v0 * r.powi(n as i32)))
}
