//! Strong-form Laplace-Beltrami operator and tangential gradient on sampled
//! surfaces, built from chart frames.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::stencil::{node_d1, Accuracy, GridDiff, ProfileDiff};
use crate::surfaces::{GridChart, ProfileChart, SampledHypersurface, Shape};
use crate::vecops::{dot, norm, sub};

pub(crate) use crate::surfaces::Frame;

/// Chart frames (position derivatives) at every grid sample; `None` at the
/// poles of latitude/longitude charts.
pub(crate) fn grid_frames(surface: &SampledHypersurface, chart: &GridChart) -> Result<Vec<Option<Frame>>> {
    let n = surface.n;
    let m = surface.len();
    match &surface.shape {
        Shape::Sphere { .. } | Shape::Cylinder { .. } | Shape::Plane { .. } => Ok((0..m)
            .map(|s| {
                if chart.is_pole(s) {
                    None
                } else {
                    crate::surfaces::analytic_frame(&surface.shape, &chart.params(s))
                }
            })
            .collect()),
        Shape::Graph(patch) => {
            let (grad, hess, _) = patch.derivatives();
            Ok((0..m)
                .map(|s| {
                    let l = chart.nodes[s] as usize;
                    let tangents = (0..n)
                        .map(|i| {
                            let mut t = patch.basis[i].clone();
                            for (a, v) in t.iter_mut().zip(&patch.direction) {
                                *a += grad[l][i] * v;
                            }
                            t
                        })
                        .collect();
                    let second = (0..n)
                        .map(|i| {
                            (0..n)
                                .map(|j| patch.direction.iter().map(|v| hess[l][i][j] * v).collect())
                                .collect()
                        })
                        .collect();
                    Some(Frame {
                        x: surface.samples[s].x.clone(),
                        tangents,
                        second,
                        normal: surface.samples[s].nu.clone(),
                    })
                })
                .collect())
        }
        Shape::Samples => {
            let diff = GridDiff { chart };
            let d = n + 1;
            let comps: Vec<Vec<f64>> = (0..d)
                .map(|c| surface.samples.iter().map(|s| s.x[c]).collect())
                .collect();
            let mut out = Vec::with_capacity(m);
            for s in 0..m {
                if chart.is_pole(s) {
                    return Err(Error::Unsupported(
                        "pole samples need an analytic sphere description".into(),
                    ));
                }
                let mut tangents = vec![vec![0.0; d]; n];
                let mut second = vec![vec![vec![0.0; d]; n]; n];
                let mut ok = true;
                for c in 0..d {
                    for i in 0..n {
                        match diff.d1(&comps[c], s, i) {
                            Some((v, _)) => tangents[i][c] = v,
                            None => ok = false,
                        }
                        for j in 0..n {
                            let v = if i == j {
                                diff.d2(&comps[c], s, i)
                            } else {
                                diff.mixed(&comps[c], s, i, j)
                            };
                            match v {
                                Some((v, _)) => second[i][j][c] = v,
                                None => ok = false,
                            }
                        }
                    }
                }
                out.push(ok.then(|| Frame {
                    x: surface.samples[s].x.clone(),
                    tangents,
                    second,
                    normal: surface.samples[s].nu.clone(),
                }));
            }
            Ok(out)
        }
        Shape::Profile => Err(Error::Unsupported("profile surfaces have no grid frames".into())),
    }
}

/// Inverse metric of a frame.
pub(crate) fn inverse_metric(f: &Frame) -> DMatrix<f64> {
    let n = f.tangents.len();
    let g = DMatrix::from_fn(n, n, |i, j| dot(&f.tangents[i], &f.tangents[j]));
    g.try_inverse().unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN))
}

struct GridData {
    frames: Vec<Option<Frame>>,
    ginv: Vec<DMatrix<f64>>,
    /// c^k = g^{kl} <g^{ij} X_ij, X_l>
    ck: Vec<Vec<f64>>,
}

struct ProfileData {
    r: Vec<f64>,
    du: Vec<f64>,
    w: Vec<f64>,
    wr: Vec<f64>,
}

enum Kind {
    Grid(GridData),
    Profile(ProfileData),
}

/// Differential operators bound to one surface.
pub struct DiffOps<'a> {
    pub surface: &'a SampledHypersurface,
    kind: Kind,
}

/// Second derivative u'' at every profile node, by fourth-order differences
/// of the stored slopes.
pub(crate) fn profile_u2(p: &ProfileChart) -> Vec<f64> {
    (0..p.node_count())
        .map(|m| node_d1(&p.du, m, p.spacing, true).map_or(f64::NAN, |(v, _)| v))
        .collect()
}

impl<'a> DiffOps<'a> {
    pub fn new(surface: &'a SampledHypersurface) -> Result<Self> {
        let kind = match (&surface.chart, surface.grid(), surface.profile()) {
            (_, Some(chart), _) => {
                let frames = grid_frames(surface, chart)?;
                let n = surface.n;
                let mut ginv = Vec::with_capacity(frames.len());
                let mut ck = Vec::with_capacity(frames.len());
                for f in &frames {
                    match f {
                        None => {
                            ginv.push(DMatrix::zeros(n, n));
                            ck.push(vec![0.0; n]);
                        }
                        Some(f) => {
                            let gi = inverse_metric(f);
                            let d = n + 1;
                            let mut trace = vec![0.0; d];
                            for i in 0..n {
                                for j in 0..n {
                                    for c in 0..d {
                                        trace[c] += gi[(i, j)] * f.second[i][j][c];
                                    }
                                }
                            }
                            let proj: Vec<f64> = (0..n).map(|l| dot(&trace, &f.tangents[l])).collect();
                            let c: Vec<f64> = (0..n).map(|k| (0..n).map(|l| gi[(k, l)] * proj[l]).sum()).collect();
                            ginv.push(gi);
                            ck.push(c);
                        }
                    }
                }
                Kind::Grid(GridData { frames, ginv, ck })
            }
            (_, None, Some(p)) => {
                let u2 = profile_u2(p);
                let mut data = ProfileData {
                    r: vec![],
                    du: vec![],
                    w: vec![],
                    wr: vec![],
                };
                for &m in &p.nodes {
                    let m = m as usize;
                    let du = p.du[m];
                    let w = (1.0 + du * du).sqrt();
                    data.r.push(p.radius(m));
                    data.du.push(du);
                    data.w.push(w);
                    data.wr.push(du * u2[m] / w);
                }
                Kind::Profile(data)
            }
            _ => unreachable!(),
        };
        Ok(DiffOps { surface, kind })
    }

    pub(crate) fn frames(&self) -> Option<&[Option<Frame>]> {
        match &self.kind {
            Kind::Grid(g) => Some(&g.frames),
            Kind::Profile(_) => None,
        }
    }

    pub(crate) fn inverse_metric_at(&self, s: usize) -> Option<&DMatrix<f64>> {
        match &self.kind {
            Kind::Grid(g) => g.frames[s].as_ref().map(|_| &g.ginv[s]),
            Kind::Profile(_) => None,
        }
    }

    /// Laplace-Beltrami of a per-sample field with the worst stencil
    /// accuracy used at each sample. Samples without a usable stencil get NaN.
    pub fn laplacian(&self, f: &[f64]) -> (Vec<f64>, Vec<Accuracy>) {
        let m = self.surface.len();
        let mut out = vec![f64::NAN; m];
        let mut acc = vec![Accuracy::High; m];
        match &self.kind {
            Kind::Grid(g) => {
                let chart = self.surface.grid().unwrap();
                let diff = GridDiff { chart };
                let n = self.surface.n;
                for s in 0..m {
                    if chart.is_pole(s) {
                        if let Some(v) = self.pole_laplacian(chart, f, s) {
                            out[s] = v;
                        } else {
                            acc[s] = Accuracy::OneSided;
                        }
                        continue;
                    }
                    if g.frames[s].is_none() {
                        acc[s] = Accuracy::OneSided;
                        continue;
                    }
                    let gi = &g.ginv[s];
                    let mut v = 0.0;
                    let mut worst = Accuracy::High;
                    let mut ok = true;
                    for i in 0..n {
                        for j in 0..n {
                            let gij = gi[(i, j)];
                            if i != j && gij.abs() <= 1e-14 {
                                continue;
                            }
                            let d = if i == j {
                                diff.d2(f, s, i)
                            } else {
                                diff.mixed(f, s, i, j)
                            };
                            match d {
                                Some((d, a)) => {
                                    v += gij * d;
                                    worst = worst.max(a);
                                }
                                None => ok = false,
                            }
                        }
                        if g.ck[s][i] != 0.0 {
                            match diff.d1(f, s, i) {
                                Some((d, a)) => {
                                    v -= g.ck[s][i] * d;
                                    worst = worst.max(a);
                                }
                                None => ok = false,
                            }
                        }
                    }
                    acc[s] = if ok { worst } else { Accuracy::OneSided };
                    if ok {
                        out[s] = v;
                    }
                }
            }
            Kind::Profile(p) => {
                let chart = self.surface.profile().unwrap();
                let diff = ProfileDiff { chart };
                let n = self.surface.n as f64;
                for s in 0..m {
                    let node = chart.nodes[s] as usize;
                    let (Some((fr, a1)), Some((frr, a2))) = (diff.d1(f, node, false), diff.d2(f, node, false)) else {
                        acc[s] = Accuracy::OneSided;
                        continue;
                    };
                    acc[s] = a1.max(a2);
                    out[s] = if node == 0 {
                        n * frr
                    } else {
                        let w = p.w[s];
                        frr / (w * w) - fr * p.wr[s] / (w * w * w) + (n - 1.0) * fr / (p.r[s] * w * w)
                    };
                }
            }
        }
        (out, acc)
    }

    /// Ambient tangential gradient of a per-sample field.
    pub fn gradient(&self, f: &[f64]) -> (Vec<Vec<f64>>, Vec<Accuracy>) {
        let m = self.surface.len();
        let d = self.surface.n + 1;
        let mut out = vec![vec![f64::NAN; d]; m];
        let mut acc = vec![Accuracy::High; m];
        match &self.kind {
            Kind::Grid(g) => {
                let chart = self.surface.grid().unwrap();
                let diff = GridDiff { chart };
                let n = self.surface.n;
                for s in 0..m {
                    if chart.is_pole(s) {
                        match self.pole_gradient(chart, f, s) {
                            Some(v) => out[s] = v,
                            None => acc[s] = Accuracy::OneSided,
                        }
                        continue;
                    }
                    let Some(fr) = &g.frames[s] else {
                        acc[s] = Accuracy::OneSided;
                        continue;
                    };
                    let mut df = vec![0.0; n];
                    let mut ok = true;
                    let mut worst = Accuracy::High;
                    for i in 0..n {
                        match diff.d1(f, s, i) {
                            Some((v, a)) => {
                                df[i] = v;
                                worst = worst.max(a);
                            }
                            None => ok = false,
                        }
                    }
                    if !ok {
                        acc[s] = Accuracy::OneSided;
                        continue;
                    }
                    acc[s] = worst;
                    let gi = &g.ginv[s];
                    let mut v = vec![0.0; d];
                    for i in 0..n {
                        let coef: f64 = (0..n).map(|j| gi[(i, j)] * df[j]).sum();
                        for c in 0..d {
                            v[c] += coef * fr.tangents[i][c];
                        }
                    }
                    out[s] = v;
                }
            }
            Kind::Profile(p) => {
                let chart = self.surface.profile().unwrap();
                let diff = ProfileDiff { chart };
                for s in 0..m {
                    let node = chart.nodes[s] as usize;
                    let Some((fr, a)) = diff.d1(f, node, false) else {
                        acc[s] = Accuracy::OneSided;
                        continue;
                    };
                    acc[s] = a;
                    let w = p.w[s];
                    let mut v = vec![0.0; d];
                    v[0] = fr / (w * w);
                    v[d - 1] = fr * p.du[s] / (w * w);
                    out[s] = v;
                }
            }
        }
        (out, acc)
    }

    /// Samples on the first two rings around a pole, with the geodesic ring
    /// radius.
    fn pole_rings(&self, chart: &GridChart, s: usize) -> Option<[(Vec<usize>, f64); 2]> {
        let Shape::Sphere { radius, .. } = &self.surface.shape else {
            return None;
        };
        let j = chart.index_of(s)[0];
        let dir = if j == 0 { 1 } else { -1 };
        let nphi = chart.axes[1].count as i64;
        let dt = chart.axes[0].spacing;
        let ring = |r: i64| -> Option<(Vec<usize>, f64)> {
            let ids = (0..nphi)
                .map(|k| chart.sample_at(&[j + dir * r, k]))
                .collect::<Option<Vec<_>>>()?;
            Some((ids, radius * dt * r as f64))
        };
        Some([ring(1)?, ring(2)?])
    }

    fn pole_laplacian(&self, chart: &GridChart, f: &[f64], s: usize) -> Option<f64> {
        let [(r1, s1), (r2, _)] = self.pole_rings(chart, s)?;
        let mean = |ids: &[usize]| ids.iter().map(|&i| f[i]).sum::<f64>() / ids.len() as f64;
        let (m1, m2, f0) = (mean(&r1), mean(&r2), f[s]);
        // m(s) = f0 + (lap/4) s^2 + O(s^4); Richardson over the two rings.
        Some(4.0 * (16.0 * (m1 - f0) - (m2 - f0)) / (12.0 * s1 * s1))
    }

    fn pole_gradient(&self, chart: &GridChart, f: &[f64], s: usize) -> Option<Vec<f64>> {
        let rings = self.pole_rings(chart, s)?;
        let xp = &self.surface.samples[s].x;
        let nu = &self.surface.samples[s].nu;
        let d = xp.len();
        let mut gs = Vec::new();
        for (ids, rad) in &rings {
            let mut g = vec![0.0; d];
            for &i in ids {
                let mut t = sub(&self.surface.samples[i].x, xp);
                let c = dot(&t, nu);
                t.iter_mut().zip(nu).for_each(|(a, b)| *a -= c * b);
                let len = norm(&t);
                for k in 0..d {
                    g[k] += f[i] * t[k] / len;
                }
            }
            let scale = 2.0 / (rad * ids.len() as f64);
            gs.push(g.iter().map(|v| v * scale).collect::<Vec<f64>>());
        }
        Some((0..d).map(|k| (4.0 * gs[0][k] - gs[1][k]) / 3.0).collect())
    }
}
