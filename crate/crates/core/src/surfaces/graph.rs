//! Graph patches x = sum p_i b_i + u(p) v over an axis-aligned box.

use serde::{Deserialize, Serialize};

use super::chart::{Chart, GridAxis, GridChart, Topology};
use super::{Coverage, Origin, Sample, SampledHypersurface, Shape};
use crate::error::{Error, Result};
use crate::vecops::{dot, norm, orthonormal_complement};

/// Closed-form height functions, kept so patches can be resampled exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeightFn {
    /// sum_i slope_i p_i
    Linear { slope: Vec<f64> },
    /// c (p_1^2 - p_2^2)
    Saddle { c: f64 },
    /// c p_1 p_2
    Bilinear { c: f64 },
    /// amplitude * prod_i sin(p_i)
    SinProduct { amplitude: f64 },
}

impl HeightFn {
    pub fn value(&self, p: &[f64]) -> f64 {
        match self {
            HeightFn::Linear { slope } => dot(slope, p),
            HeightFn::Saddle { c } => c * (p[0] * p[0] - p[1] * p[1]),
            HeightFn::Bilinear { c } => c * p[0] * p[1],
            HeightFn::SinProduct { amplitude } => amplitude * p.iter().map(|t| t.sin()).product::<f64>(),
        }
    }

    pub fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let n = p.len();
        match self {
            HeightFn::Linear { slope } => slope.clone(),
            HeightFn::Saddle { c } => {
                let mut g = vec![0.0; n];
                g[0] = 2.0 * c * p[0];
                g[1] = -2.0 * c * p[1];
                g
            }
            HeightFn::Bilinear { c } => {
                let mut g = vec![0.0; n];
                g[0] = c * p[1];
                g[1] = c * p[0];
                g
            }
            HeightFn::SinProduct { amplitude } => (0..n)
                .map(|i| {
                    amplitude
                        * (0..n)
                            .map(|j| if i == j { p[j].cos() } else { p[j].sin() })
                            .product::<f64>()
                })
                .collect(),
        }
    }

    pub fn hessian(&self, p: &[f64]) -> Vec<Vec<f64>> {
        let n = p.len();
        let mut h = vec![vec![0.0; n]; n];
        match self {
            HeightFn::Linear { .. } => {}
            HeightFn::Saddle { c } => {
                h[0][0] = 2.0 * c;
                h[1][1] = -2.0 * c;
            }
            HeightFn::Bilinear { c } => {
                h[0][1] = *c;
                h[1][0] = *c;
            }
            HeightFn::SinProduct { amplitude } => {
                for i in 0..n {
                    for j in 0..n {
                        h[i][j] = amplitude
                            * (0..n)
                                .map(|l| match (l == i, l == j) {
                                    (true, true) => -p[l].sin(),
                                    (true, false) | (false, true) => p[l].cos(),
                                    _ => p[l].sin(),
                                })
                                .product::<f64>();
                    }
                }
            }
        }
        h
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphPatch {
    /// Lower corner of the parameter box.
    pub origin: Vec<f64>,
    /// Nodes per axis.
    pub counts: Vec<usize>,
    pub spacing: f64,
    /// Heights at the nodes, row-major with the first axis slowest.
    pub heights: Vec<f64>,
    /// Graph direction v.
    pub direction: Vec<f64>,
    /// Orthonormal basis of the base plane (orthogonal to v).
    pub basis: Vec<Vec<f64>>,
    pub height_fn: Option<HeightFn>,
}

impl GraphPatch {
    pub fn from_fn(
        origin: Vec<f64>,
        counts: Vec<usize>,
        spacing: f64,
        f: HeightFn,
        direction: Vec<f64>,
    ) -> Result<Self> {
        let mut patch = GraphPatch {
            origin,
            counts,
            spacing,
            heights: Vec::new(),
            direction,
            basis: Vec::new(),
            height_fn: None,
        };
        patch.check_layout()?;
        let len = norm(&patch.direction);
        patch.direction.iter_mut().for_each(|v| *v /= len);
        patch.basis = orthonormal_complement(&patch.direction);
        patch.heights = (0..patch.node_count()).map(|l| f.value(&patch.params(l))).collect();
        patch.height_fn = Some(f);
        Ok(patch)
    }

    /// Square patch [-half, half]^n with the given spacing.
    pub fn centered(n: usize, half: f64, spacing: f64, f: HeightFn) -> Result<Self> {
        let m = (half / spacing).round() as usize;
        let mut v = vec![0.0; n + 1];
        v[n] = 1.0;
        GraphPatch::from_fn(vec![-(m as f64) * spacing; n], vec![2 * m + 1; n], spacing, f, v)
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn node_count(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn multi(&self, mut l: usize) -> Vec<i64> {
        let mut idx = vec![0i64; self.dim()];
        for d in (0..self.dim()).rev() {
            idx[d] = (l % self.counts[d]) as i64;
            l /= self.counts[d];
        }
        idx
    }

    pub fn linear(&self, idx: &[i64]) -> Option<usize> {
        let mut l = 0usize;
        for (d, &i) in idx.iter().enumerate() {
            if i < 0 || i as usize >= self.counts[d] {
                return None;
            }
            l = l * self.counts[d] + i as usize;
        }
        Some(l)
    }

    pub fn params(&self, l: usize) -> Vec<f64> {
        self.multi(l)
            .iter()
            .zip(&self.origin)
            .map(|(&i, o)| o + i as f64 * self.spacing)
            .collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.origin
            .iter()
            .zip(&self.counts)
            .map(|(o, &c)| o + (c - 1) as f64 * self.spacing)
            .collect()
    }

    /// Ambient point above base parameters `p` at height `u`.
    pub fn lift(&self, p: &[f64], u: f64) -> Vec<f64> {
        let mut x: Vec<f64> = self.direction.iter().map(|v| u * v).collect();
        for (b, &pi) in self.basis.iter().zip(p) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += pi * bi;
            }
        }
        x
    }

    fn check_layout(&self) -> Result<()> {
        let n = self.counts.len();
        if n < 2 {
            return Err(Error::InvalidParameter(
                "graph patches need at least 2 base dimensions".into(),
            ));
        }
        if self.origin.len() != n || self.direction.len() != n + 1 {
            return Err(Error::InvalidParameter("graph patch dimensions disagree".into()));
        }
        if let Some(c) = self.counts.iter().find(|&&c| c < 5) {
            return Err(Error::InvalidParameter(format!(
                "grid too small: {c} nodes on an axis (need 5)"
            )));
        }
        if !(self.spacing > 0.0) || !self.spacing.is_finite() {
            return Err(Error::InvalidParameter("graph spacing must be positive".into()));
        }
        if !(norm(&self.direction) > 0.0) {
            return Err(Error::InvalidParameter("graph direction must be nonzero".into()));
        }
        Ok(())
    }

    /// Check shape, finiteness and the orthonormal frame.
    pub fn validate(&self) -> Result<()> {
        self.check_layout()?;
        if self.heights.len() != self.node_count() {
            return Err(Error::InvalidParameter(format!(
                "heights have {} entries, grid has {}",
                self.heights.len(),
                self.node_count()
            )));
        }
        if let Some(i) = self.heights.iter().position(|u| !u.is_finite()) {
            return Err(Error::NonFinite {
                what: "height".into(),
                sample: i,
            });
        }
        let n = self.dim();
        if self.basis.len() != n {
            return Err(Error::InvalidParameter("base-plane basis has the wrong size".into()));
        }
        let mut frame = self.basis.clone();
        frame.push(self.direction.clone());
        for i in 0..=n {
            for j in 0..=n {
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot(&frame[i], &frame[j]) - want).abs() > 1e-10 {
                    return Err(Error::InvalidParameter("graph frame is not orthonormal".into()));
                }
            }
        }
        Ok(())
    }

    /// Finite differences of u at every node: gradient and Hessian, centred
    /// (second order) in the interior and one-sided on the rim. The flag
    /// marks nodes where a one-sided formula was used.
    pub fn derivatives(&self) -> (Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>, Vec<bool>) {
        let n = self.dim();
        let nn = self.node_count();
        let h = self.spacing;
        let mut rim = vec![false; nn];
        let first = |vals: &dyn Fn(usize) -> f64, l: usize, d: usize, rim: &mut bool| -> f64 {
            let idx = self.multi(l);
            let at = |o: i64| {
                let mut j = idx.clone();
                j[d] += o;
                self.linear(&j).map(|m| vals(m))
            };
            match (at(-1), at(1)) {
                (Some(a), Some(b)) => (b - a) / (2.0 * h),
                (None, Some(b)) => {
                    *rim = true;
                    (-3.0 * vals(l) + 4.0 * b - at(2).unwrap()) / (2.0 * h)
                }
                (Some(a), None) => {
                    *rim = true;
                    (3.0 * vals(l) - 4.0 * a + at(-2).unwrap()) / (2.0 * h)
                }
                (None, None) => unreachable!("axes have at least 5 nodes"),
            }
        };
        let u = |m: usize| self.heights[m];
        let mut grad = vec![vec![0.0; n]; nn];
        for l in 0..nn {
            for d in 0..n {
                grad[l][d] = first(&u, l, d, &mut rim[l]);
            }
        }
        let mut hess = vec![vec![vec![0.0; n]; n]; nn];
        for l in 0..nn {
            let idx = self.multi(l);
            for a in 0..n {
                // Pure second derivative.
                let at = |o: i64| {
                    let mut j = idx.clone();
                    j[a] += o;
                    self.linear(&j).map(|m| self.heights[m])
                };
                let f0 = self.heights[l];
                hess[l][a][a] = match (at(-1), at(1)) {
                    (Some(m), Some(p)) => (p - 2.0 * f0 + m) / (h * h),
                    (None, Some(p1)) => (2.0 * f0 - 5.0 * p1 + 4.0 * at(2).unwrap() - at(3).unwrap()) / (h * h),
                    (Some(m1), None) => (2.0 * f0 - 5.0 * m1 + 4.0 * at(-2).unwrap() - at(-3).unwrap()) / (h * h),
                    (None, None) => unreachable!(),
                };
                for b in 0..n {
                    if b == a {
                        continue;
                    }
                    let gb = |m: usize| grad[m][b];
                    let mut dummy = false;
                    hess[l][a][b] = first(&gb, l, a, &mut dummy);
                }
            }
            // Symmetrize the mixed entries.
            for a in 0..n {
                for b in a + 1..n {
                    let m = 0.5 * (hess[l][a][b] + hess[l][b][a]);
                    hess[l][a][b] = m;
                    hess[l][b][a] = m;
                }
            }
        }
        (grad, hess, rim)
    }

    /// Height at arbitrary base parameters by tensor-product cubic
    /// interpolation of the node values.
    pub fn interpolate(&self, p: &[f64]) -> f64 {
        let n = self.dim();
        let mut stencil: Vec<(usize, [f64; 4])> = Vec::with_capacity(n);
        for d in 0..n {
            let t = (p[d] - self.origin[d]) / self.spacing;
            let c = self.counts[d];
            let base = (t.floor() as i64 - 1).clamp(0, c as i64 - 4) as usize;
            let mut w = [0.0; 4];
            for (k, wk) in w.iter_mut().enumerate() {
                let xk = (base + k) as f64;
                *wk = (0..4)
                    .filter(|&m| m != k)
                    .map(|m| (t - (base + m) as f64) / (xk - (base + m) as f64))
                    .product();
            }
            stencil.push((base, w));
        }
        let mut total = 0.0;
        for code in 0..4usize.pow(n as u32) {
            let mut c = code;
            let mut idx = vec![0i64; n];
            let mut w = 1.0;
            for d in (0..n).rev() {
                let k = c % 4;
                c /= 4;
                idx[d] = (stencil[d].0 + k) as i64;
                w *= stencil[d].1[k];
            }
            total += w * self.heights[self.linear(&idx).unwrap()];
        }
        total
    }

    /// Same box, spacing divided by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor < 2 {
            return Err(Error::InvalidParameter("refinement factor must be at least 2".into()));
        }
        let mut fine = self.clone();
        fine.spacing = self.spacing / factor as f64;
        fine.counts = self.counts.iter().map(|&c| (c - 1) * factor + 1).collect();
        fine.heights = (0..fine.node_count())
            .map(|l| {
                let p = fine.params(l);
                match &self.height_fn {
                    Some(f) => f.value(&p),
                    None => self.interpolate(&p),
                }
            })
            .collect();
        Ok(fine)
    }
}

pub fn make_graph(patch: &GraphPatch) -> Result<SampledHypersurface> {
    patch.validate()?;
    let n = patch.dim();
    let (grad, _, _) = patch.derivatives();
    let cell = patch.spacing.powi(n as i32);
    let mut samples = Vec::with_capacity(patch.node_count());
    for l in 0..patch.node_count() {
        let p = patch.params(l);
        let du = &grad[l];
        let w = (1.0 + du.iter().map(|a| a * a).sum::<f64>()).sqrt();
        let mut nu: Vec<f64> = patch.direction.clone();
        for (b, &ui) in patch.basis.iter().zip(du) {
            for (c, bc) in nu.iter_mut().zip(b) {
                *c -= ui * bc;
            }
        }
        nu.iter_mut().for_each(|c| *c /= w);
        if !(dot(&nu, &patch.direction) > 0.0) || !w.is_finite() {
            return Err(Error::Precondition(format!(
                "graph normal not transverse to v at node {l}"
            )));
        }
        samples.push(Sample {
            x: patch.lift(&p, patch.heights[l]),
            nu,
            dmu: w * cell,
            boundary: false,
        });
    }
    let axes = patch
        .origin
        .iter()
        .zip(&patch.counts)
        .map(|(&o, &c)| GridAxis {
            start: o,
            spacing: patch.spacing,
            count: c,
            periodic: false,
        })
        .collect();
    let reach = patch
        .origin
        .iter()
        .zip(patch.upper())
        .map(|(lo, hi)| (-lo).min(hi))
        .fold(f64::INFINITY, f64::min);
    let mut s = SampledHypersurface {
        n,
        source: "graph patch".into(),
        origin: Origin::Graph,
        shape: Shape::Graph(patch.clone()),
        samples,
        chart: Chart::Grid(GridChart::new(
            axes,
            Topology::Box,
            (0..patch.node_count() as u64).collect(),
        )),
        coverage: Coverage::ball(vec![0.0; n + 1], reach),
        truncation: None,
    };
    s.refresh_boundary();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_differences_are_exact() {
        let p = GraphPatch::centered(2, 1.0, 0.25, HeightFn::Saddle { c: 0.3 }).unwrap();
        let (g, h, rim) = p.derivatives();
        for l in 0..p.node_count() {
            let q = p.params(l);
            let gx = HeightFn::Saddle { c: 0.3 }.gradient(&q);
            assert!((g[l][0] - gx[0]).abs() < 1e-12 && (g[l][1] - gx[1]).abs() < 1e-12);
            assert!((h[l][0][0] - 0.6).abs() < 1e-10 && h[l][0][1].abs() < 1e-10);
        }
        assert!(rim[0] && !rim[p.linear(&[4, 4]).unwrap()]);
    }

    #[test]
    fn cubic_interpolation_reproduces_cubics() {
        let mut p = GraphPatch::centered(2, 1.0, 0.25, HeightFn::Bilinear { c: 1.0 }).unwrap();
        p.heights = (0..p.node_count())
            .map(|l| {
                let q = p.params(l);
                q[0].powi(3) - 2.0 * q[0] * q[1] * q[1]
            })
            .collect();
        let q = [0.33f64, -0.71];
        let want = q[0].powi(3) - 2.0 * q[0] * q[1] * q[1];
        assert!((p.interpolate(&q) - want).abs() < 1e-12);
    }

    #[test]
    fn small_grid_rejected() {
        let v = vec![0.0, 0.0, 1.0];
        let r = GraphPatch::from_fn(vec![0.0, 0.0], vec![4, 6], 0.1, HeightFn::Bilinear { c: 0.0 }, v);
        assert!(r.is_err());
    }
}
