use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surfaces::{Chart, SampledHypersurface};
use crate::vecops::{dist, dot};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CutoffKind {
    /// 1 on B_{outer-a}, linear in r down to 0 at `outer`.
    LinearAnnulus { outer: f64, a: f64 },
    /// 1 for r ≤ e^{-k} r₀, (log r₀ - log r)/k on the annulus, 0 beyond r₀.
    Logarithmic { r0: f64, k: u32 },
    /// Piecewise-linear radial profile through (radius, value) knots;
    /// zero past the last knot.
    CustomRadial { knots: Vec<[f64; 2]> },
}

/// Radial cutoff about a centre.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub kind: CutoffKind,
    pub center: Vec<f64>,
}

/// Cutoff values and tangential gradient norms at every sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCutoff {
    pub values: Vec<f64>,
    pub grad_norms: Vec<f64>,
}

impl Cutoff {
    pub fn linear(center: Vec<f64>, outer: f64, a: f64) -> Result<Self> {
        if !(a > 0.0) || !(outer >= a) {
            return Err(Error::InvalidParameter(format!(
                "annulus needs 0 < a <= outer, got a={a}, outer={outer}"
            )));
        }
        Ok(Cutoff {
            kind: CutoffKind::LinearAnnulus { outer, a },
            center,
        })
    }

    pub fn logarithmic(center: Vec<f64>, r0: f64, k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
        }
        if !(r0 > 0.0) {
            return Err(Error::InvalidParameter("r0 must be positive".into()));
        }
        Ok(Cutoff {
            kind: CutoffKind::Logarithmic { r0, k },
            center,
        })
    }

    /// Outer edge of the support.
    pub fn support_radius(&self) -> f64 {
        match &self.kind {
            CutoffKind::LinearAnnulus { outer, .. } => *outer,
            CutoffKind::Logarithmic { r0, .. } => *r0,
            CutoffKind::CustomRadial { knots } => knots.last().map_or(0.0, |k| k[0]),
        }
    }

    /// Value and radial derivative at distance r from the centre.
    pub fn radial(&self, r: f64) -> (f64, f64) {
        match &self.kind {
            CutoffKind::LinearAnnulus { outer, a } => {
                if r <= outer - a {
                    (1.0, 0.0)
                } else if r < *outer {
                    ((outer - r) / a, -1.0 / a)
                } else {
                    (0.0, 0.0)
                }
            }
            CutoffKind::Logarithmic { r0, k } => {
                let kf = *k as f64;
                if r <= (-kf).exp() * r0 {
                    (1.0, 0.0)
                } else if r < *r0 {
                    ((r0.ln() - r.ln()) / kf, -1.0 / (kf * r))
                } else {
                    (0.0, 0.0)
                }
            }
            CutoffKind::CustomRadial { knots } => {
                if knots.is_empty() {
                    return (0.0, 0.0);
                }
                if r <= knots[0][0] {
                    return (knots[0][1], 0.0);
                }
                for w in knots.windows(2) {
                    let ([r0, v0], [r1, v1]) = (w[0], w[1]);
                    if r <= r1 {
                        let s = (v1 - v0) / (r1 - r0);
                        return (v0 + s * (r - r0), s);
                    }
                }
                (0.0, 0.0)
            }
        }
    }

    /// Samplewise values and |∇φ| using the tangential part of ∇r.
    pub fn bind(&self, surface: &SampledHypersurface) -> Result<BoundCutoff> {
        if self.center.len() != surface.ambient_dim() {
            return Err(Error::InvalidParameter("cutoff centre has the wrong dimension".into()));
        }
        if matches!(surface.chart, Chart::Profile(_)) && self.center[..surface.n].iter().any(|c| *c != 0.0) {
            return Err(Error::Unsupported(
                "cutoffs on rotational profiles must be centred on the axis".into(),
            ));
        }
        let mut values = Vec::with_capacity(surface.len());
        let mut grad_norms = Vec::with_capacity(surface.len());
        for s in &surface.samples {
            let r = dist(&s.x, &self.center);
            let (v, dv) = self.radial(r);
            let tangential = if r > 0.0 {
                let dn = (dot(&s.x, &s.nu) - dot(&self.center, &s.nu)) / r;
                (1.0 - dn * dn).max(0.0).sqrt()
            } else {
                1.0
            };
            values.push(v);
            grad_norms.push(dv.abs() * tangential);
        }
        Ok(BoundCutoff { values, grad_norms })
    }

    /// Largest excess of |∇φ| over its analytic bound on the samples.
    pub fn gradient_bound_excess(&self, surface: &SampledHypersurface, tol: f64) -> Result<f64> {
        let b = self.bind(surface)?;
        let mut worst = f64::NEG_INFINITY;
        for (i, s) in surface.samples.iter().enumerate() {
            let r = dist(&s.x, &self.center);
            let bound = match &self.kind {
                CutoffKind::LinearAnnulus { a, .. } => 2.0 / a,
                CutoffKind::Logarithmic { k, .. } => {
                    if r > 0.0 {
                        1.0 / (*k as f64 * r)
                    } else {
                        f64::INFINITY
                    }
                }
                CutoffKind::CustomRadial { .. } => f64::INFINITY,
            };
            worst = worst.max(b.grad_norms[i] - bound - tol);
        }
        Ok(worst)
    }
}

/// Seeded linear annulus cutoffs about axis points, supported in B_R.
pub fn random_annulus_cutoffs(ambient: usize, r: f64, count: usize, seed: u64) -> Result<Vec<Cutoff>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut center = vec![0.0; ambient];
            center[ambient - 1] = rng.gen_range(-0.1 * r..0.1 * r);
            let room = r - center[ambient - 1].abs();
            let outer = rng.gen_range(0.5 * room..0.95 * room);
            let a = rng.gen_range(0.2 * outer..0.8 * outer);
            Cutoff::linear(center, outer, a)
        })
        .collect()
}
