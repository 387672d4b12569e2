//! Fraction of each sample's cell lying inside a Euclidean ball, for
//! integrals over Σ ∩ B_r(p).

use std::f64::consts::PI;

use super::chart::{Chart, GridChart, Topology};
use super::{analytic_frame, volume_element, SampledHypersurface, Shape};
use crate::error::{Error, Result};
use crate::vecops::{dist, norm2};

/// A ball query with the per-sample coverage fractions it produced.
#[derive(Clone, Debug)]
pub struct BallQuery {
    pub center: Vec<f64>,
    pub radius: f64,
    pub fractions: Vec<f64>,
}

impl BallQuery {
    pub fn new(surface: &SampledHypersurface, center: &[f64], radius: f64) -> Result<Self> {
        Ok(BallQuery {
            center: center.to_vec(),
            radius,
            fractions: ball_fractions(surface, center, radius)?,
        })
    }

    /// ∫_{Σ ∩ B} f dμ
    pub fn integrate(&self, surface: &SampledHypersurface, f: impl Fn(usize) -> f64) -> f64 {
        self.fractions
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, &w)| w * surface.samples[i].dmu * f(i))
            .sum()
    }

    pub fn volume(&self, surface: &SampledHypersurface) -> f64 {
        self.integrate(surface, |_| 1.0)
    }

    /// Samples whose own position lies in the ball.
    pub fn sample_count(&self, surface: &SampledHypersurface) -> usize {
        surface
            .samples
            .iter()
            .filter(|s| dist(&s.x, &self.center) <= self.radius)
            .count()
    }
}

/// Per-sample fraction (by area) of the sample's chart cell inside B_r(p).
/// Cells straddling the sphere ∂B_r(p) are subdivided.
pub fn ball_fractions(surface: &SampledHypersurface, p: &[f64], r: f64) -> Result<Vec<f64>> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ball radius must be positive, got {r}"
        )));
    }
    if p.len() != surface.n + 1 {
        return Err(Error::InvalidParameter("ball centre has the wrong dimension".into()));
    }
    if !surface.coverage.contains_ball(p, r) {
        return Err(Error::Precondition(format!(
            "B_{r}({p:?}) is not inside the sampled region"
        )));
    }
    match &surface.chart {
        Chart::Grid(g) => Ok(grid_fractions(surface, g, p, r)),
        Chart::Profile(_) => Ok(profile_fractions(surface, p, r)),
    }
}

fn subdivisions(n: usize) -> usize {
    match n {
        2 => 16,
        3 => 8,
        _ => 4,
    }
}

fn grid_fractions(surface: &SampledHypersurface, g: &GridChart, p: &[f64], r: f64) -> Vec<f64> {
    let n = surface.n;
    let mut out = vec![0.0; surface.len()];
    for s in 0..surface.len() {
        let x = &surface.samples[s].x;
        let d = dist(x, p);
        let reach = cell_reach(surface, g, s);
        if d + reach <= r {
            out[s] = 1.0;
            continue;
        }
        if d - reach > r {
            continue;
        }
        out[s] = subdivided_fraction(surface, g, s, p, r, n);
    }
    out
}

/// Upper bound on the distance from a sample to any point of its cell.
fn cell_reach(surface: &SampledHypersurface, g: &GridChart, s: usize) -> f64 {
    let x = &surface.samples[s].x;
    if g.is_pole(s) {
        if let Shape::Sphere { radius, .. } = &surface.shape {
            return radius * g.axes[0].spacing;
        }
    }
    let mut acc = 0.0;
    for a in 0..g.dim() {
        let mut step: f64 = 0.0;
        for o in [-1, 1] {
            if let Some(t) = g.neighbor(s, a, o) {
                step = step.max(dist(&surface.samples[t].x, x));
            }
        }
        if step == 0.0 {
            step = g.axes[a].spacing;
        }
        acc += step * step;
    }
    acc.sqrt()
}

fn subdivided_fraction(surface: &SampledHypersurface, g: &GridChart, s: usize, p: &[f64], r: f64, n: usize) -> f64 {
    let m = subdivisions(n);
    let idx = g.index_of(s);
    let q0 = g.params_of(&idx);
    // Parameter ranges of the cell.
    let mut lo = vec![0.0; n];
    let mut width = vec![0.0; n];
    for a in 0..n {
        lo[a] = q0[a] - g.axes[a].spacing / 2.0;
        width[a] = g.axes[a].spacing;
    }
    if g.topology == Topology::LatLong && g.is_pole(s) {
        let dt = g.axes[0].spacing;
        if idx[0] == 0 {
            lo[0] = 0.0;
        } else {
            lo[0] = q0[0] - dt / 2.0;
        }
        width[0] = dt / 2.0;
        lo[1] = 0.0;
        width[1] = 2.0 * PI;
    }
    let analytic = matches!(
        surface.shape,
        Shape::Sphere { .. } | Shape::Cylinder { .. } | Shape::Plane { .. }
    );
    let x0 = &surface.samples[s].x;
    // Tangent directions per index step for non-analytic charts.
    let steps: Vec<Vec<f64>> = if analytic {
        Vec::new()
    } else {
        (0..n)
            .map(|a| {
                let plus = g.neighbor(s, a, 1).map(|t| &surface.samples[t].x);
                let minus = g.neighbor(s, a, -1).map(|t| &surface.samples[t].x);
                match (minus, plus) {
                    (Some(mi), Some(pl)) => pl.iter().zip(mi).map(|(a, b)| (a - b) / 2.0).collect(),
                    (None, Some(pl)) => pl.iter().zip(x0).map(|(a, b)| a - b).collect(),
                    (Some(mi), None) => x0.iter().zip(mi).map(|(a, b)| a - b).collect(),
                    (None, None) => vec![0.0; n + 1],
                }
            })
            .collect()
    };
    let total = m.pow(n as u32);
    let mut inside = 0.0;
    let mut all = 0.0;
    let mf = m as f64;
    for code in 0..total {
        let mut c = code;
        let mut t = vec![0.0; n];
        for a in (0..n).rev() {
            t[a] = ((c % m) as f64 + 0.5) / mf;
            c /= m;
        }
        // Position, weight and ambient sub-cell edge vectors.
        let (x, w, edges): (Vec<f64>, f64, Vec<Vec<f64>>) = if analytic {
            let q: Vec<f64> = (0..n).map(|a| lo[a] + t[a] * width[a]).collect();
            let f = analytic_frame(&surface.shape, &q).unwrap();
            let w = volume_element(&f.tangents);
            let e = (0..n)
                .map(|a| f.tangents[a].iter().map(|v| v * width[a] / mf).collect())
                .collect();
            (f.x, w, e)
        } else if let Shape::Graph(patch) = &surface.shape {
            let q: Vec<f64> = (0..n).map(|a| lo[a] + t[a] * width[a]).collect();
            let e = steps.iter().map(|s| s.iter().map(|v| v / mf).collect()).collect();
            (patch.lift(&q, patch.interpolate(&q)), 1.0, e)
        } else {
            let mut x = x0.clone();
            for a in 0..n {
                for (xc, sc) in x.iter_mut().zip(&steps[a]) {
                    *xc += (t[a] - 0.5) * sc;
                }
            }
            let e = steps.iter().map(|s| s.iter().map(|v| v / mf).collect()).collect();
            (x, 1.0, e)
        };
        all += w;
        let d = dist(&x, p);
        // Linear ramp across the sub-cell's extent along the distance gradient.
        let extent: f64 = if d > 0.0 {
            edges
                .iter()
                .map(|e| {
                    e.iter()
                        .zip(&x)
                        .zip(p)
                        .map(|((ec, xc), pc)| ec * (xc - pc))
                        .sum::<f64>()
                        .abs()
                        / d
                })
                .sum()
        } else {
            0.0
        };
        let frac = if extent > 0.0 {
            (0.5 + (r - d) / extent).clamp(0.0, 1.0)
        } else if d <= r {
            1.0
        } else {
            0.0
        };
        inside += w * frac;
    }
    if all > 0.0 {
        inside / all
    } else {
        0.0
    }
}

/// Fraction of the unit sphere S^(m) in R^(m+1) where <ω, e> >= c.
pub(crate) fn cap_fraction(m: usize, c: f64) -> f64 {
    if c <= -1.0 {
        return 1.0;
    }
    if c >= 1.0 {
        return 0.0;
    }
    match m {
        1 => c.acos() / PI,
        2 => (1.0 - c) / 2.0,
        _ => {
            // ∫_0^α sin^(m-1) / ∫_0^π sin^(m-1) by Simpson's rule.
            let simpson = |b: f64| {
                let k = 400;
                let h = b / k as f64;
                let f = |t: f64| t.sin().powi(m as i32 - 1);
                let mut acc = f(0.0) + f(b);
                for i in 1..k {
                    acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                acc * h / 3.0
            };
            simpson(c.acos()) / simpson(PI)
        }
    }
}

fn profile_fractions(surface: &SampledHypersurface, p: &[f64], r: f64) -> Vec<f64> {
    let prof = surface.profile().unwrap();
    let n = surface.n;
    let h = prof.spacing;
    let q = norm2(&p[..n]).sqrt();
    let pz = p[n];
    let subs = 32;
    let mut out = vec![0.0; surface.len()];
    for (s, &node) in prof.nodes.iter().enumerate() {
        let node = node as usize;
        let r0 = prof.radius(node);
        let (u0, du0) = (prof.u[node], prof.du[node]);
        let lo = (r0 - h / 2.0).max(0.0);
        let hi = r0 + h / 2.0;
        let mut inside = 0.0;
        let mut all = 0.0;
        for k in 0..subs {
            let rho = lo + (k as f64 + 0.5) / subs as f64 * (hi - lo);
            let w = rho.powi(n as i32 - 1);
            let u = u0 + du0 * (rho - r0);
            let dz = u - pz;
            let frac = if q < 1e-14 || rho < 1e-14 {
                if rho * rho + q * q + dz * dz <= r * r {
                    1.0
                } else {
                    0.0
                }
            } else {
                cap_fraction(n - 1, (rho * rho + q * q + dz * dz - r * r) / (2.0 * rho * q))
            };
            inside += w * frac;
            all += w;
        }
        out[s] = inside / all;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{make_catalog, CatalogId, Resolution};

    #[test]
    fn cap_fraction_limits() {
        for m in 1..5 {
            assert!((cap_fraction(m, 0.0) - 0.5).abs() < 1e-9);
            assert_eq!(cap_fraction(m, 1.5), 0.0);
            assert_eq!(cap_fraction(m, -1.5), 1.0);
        }
    }

    #[test]
    fn disk_area_on_plane() {
        let s = make_catalog(
            &CatalogId::Hyperplane {
                normal: vec![0.0, 0.0, 1.0],
                offset: 0.0,
            },
            &Resolution::spacing(0.1).with_rtrunc(3.0),
        )
        .unwrap();
        let b = BallQuery::new(&s, &[0.3, 0.1, 0.0], 1.0).unwrap();
        assert!((b.volume(&s) - PI).abs() < 2e-3);
        assert!(BallQuery::new(&s, &[0.0, 0.0, 0.0], 3.5).is_err());
    }

    #[test]
    fn spherical_cap_area_at_pole() {
        // A ball of radius s around a point of a sphere cuts a cap of area π s².
        let s = make_catalog(&CatalogId::Sphere { n: 2 }, &Resolution::polar(32)).unwrap();
        let b = BallQuery::new(&s, &[2.0, 0.0, 0.0], 0.5).unwrap();
        assert!((b.volume(&s) - PI * 0.25).abs() < 1e-3);
    }
}
