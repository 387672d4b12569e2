use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surfaces::SampledHypersurface;
use crate::vecops::norm;

/// ψ(t) = exp(-1/(1 - t²)) on (-1, 1), zero outside, and its derivative.
fn bump1(t: f64) -> (f64, f64) {
    if t.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - t * t;
    let v = (-1.0 / q).exp();
    (v, v * (-2.0 * t / (q * q)))
}

/// Test function in ambient coordinates restricted to the surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestField {
    /// Π_c ψ((x_c - center_c) / half_width_c): smooth with compact support.
    Bump { center: Vec<f64>, half_widths: Vec<f64> },
    /// Constant value; never compactly supported.
    Constant { value: f64 },
}

impl TestField {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            TestField::Bump { center, half_widths } => x
                .iter()
                .zip(center)
                .zip(half_widths)
                .map(|((xc, c), w)| bump1((xc - c) / w).0)
                .product(),
            TestField::Constant { value } => *value,
        }
    }

    /// Ambient gradient.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            TestField::Bump { center, half_widths } => {
                let parts: Vec<(f64, f64)> = x
                    .iter()
                    .zip(center)
                    .zip(half_widths)
                    .map(|((xc, c), w)| {
                        let (v, dv) = bump1((xc - c) / w);
                        (v, dv / w)
                    })
                    .collect();
                (0..x.len())
                    .map(|c| {
                        parts
                            .iter()
                            .enumerate()
                            .map(|(e, &(v, dv))| if e == c { dv } else { v })
                            .product()
                    })
                    .collect()
            }
            TestField::Constant { .. } => vec![0.0; x.len()],
        }
    }

    /// Radius of a ball about the origin containing the support.
    pub fn support_radius(&self) -> f64 {
        match self {
            TestField::Bump { center, half_widths } => {
                let corner: Vec<f64> = center.iter().zip(half_widths).map(|(c, w)| c.abs() + w).collect();
                norm(&corner)
            }
            TestField::Constant { .. } => f64::INFINITY,
        }
    }

    /// Errors unless the support lies strictly inside B_R.
    pub fn check_support(&self, r: f64) -> Result<()> {
        if self.support_radius() < r {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "test field is not compactly supported in B_{r}"
            )))
        }
    }

    pub fn on(&self, surface: &SampledHypersurface) -> Vec<f64> {
        surface.samples.iter().map(|s| self.value(&s.x)).collect()
    }
}

/// Random bump centred at a sample inside B_{R/2}, supported in B_{0.95R}.
pub fn random_bump(surface: &SampledHypersurface, r: f64, rng: &mut ChaCha8Rng) -> Result<TestField> {
    let inner: Vec<usize> = (0..surface.len())
        .filter(|&i| norm(&surface.samples[i].x) < 0.5 * r)
        .collect();
    if inner.is_empty() {
        return Err(Error::EmptyRegion(format!("no samples inside B_{}", 0.5 * r)));
    }
    let d = surface.ambient_dim();
    let center = surface.samples[inner[rng.gen_range(0..inner.len())]].x.clone();
    let cmax = 0.45 * r / (d as f64).sqrt();
    let half_widths = (0..d).map(|_| rng.gen_range(0.4 * cmax..cmax)).collect();
    Ok(TestField::Bump { center, half_widths })
}

pub fn random_bumps(surface: &SampledHypersurface, r: f64, count: usize, seed: u64) -> Result<Vec<TestField>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_bump(surface, r, &mut rng)).collect()
}
