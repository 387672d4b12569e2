use faer::Mat;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::compute_geometry;
use crate::surfaces::{Chart, GridChart, ProfileChart, SampledHypersurface, Topology};
use crate::vecops::{norm, norm2, unit_sphere_area};

/// Largest number of unknowns handed to the dense eigensolver.
pub const MAX_UNKNOWNS: usize = 4000;

/// Weight and potential of the quadratic form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightKind {
    /// ρ = e^{-|x|²/4}, potential |A|² + ½.
    Shrinker,
    /// ρ = e^{x_{n+1}}, potential `potential_scale`·|A|².
    Translator { potential_scale: f64 },
}

impl WeightKind {
    fn weight(&self, x: &[f64]) -> f64 {
        match self {
            WeightKind::Shrinker => (-norm2(x) / 4.0).exp(),
            WeightKind::Translator { .. } => x[x.len() - 1].exp(),
        }
    }

    fn potential(&self, a2: f64) -> f64 {
        match self {
            WeightKind::Shrinker => a2 + 0.5,
            WeightKind::Translator { potential_scale } => potential_scale * a2,
        }
    }
}

/// Weighted quadratic forms restricted to the free samples: stiffness
/// K = ∫<∇φ,∇ψ>w, lumped potential P = ∫V φψ w and lumped mass M = ∫φψ w.
#[derive(Clone, Debug)]
pub struct OperatorMatrices {
    pub kind: WeightKind,
    pub region_radius: f64,
    /// Sample index of each unknown.
    pub free: Vec<usize>,
    pub stiffness: Mat<f64>,
    pub potential: Vec<f64>,
    pub mass: Vec<f64>,
    /// Only rotationally symmetric fields are represented.
    pub radial_only: bool,
}

impl OperatorMatrices {
    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    /// φᵀ(K - P)φ for a vector over the free samples.
    pub fn energy(&self, phi: &[f64]) -> f64 {
        let k = self.len();
        let mut e = 0.0;
        for i in 0..k {
            let mut row = 0.0;
            for j in 0..k {
                row += self.stiffness[(i, j)] * phi[j];
            }
            e += phi[i] * row - self.potential[i] * phi[i] * phi[i];
        }
        e
    }

    /// φᵀMφ.
    pub fn mass_norm2(&self, phi: &[f64]) -> f64 {
        phi.iter().zip(&self.mass).map(|(p, m)| m * p * p).sum()
    }

    pub fn rayleigh(&self, phi: &[f64]) -> f64 {
        self.energy(phi) / self.mass_norm2(phi)
    }

    /// ‖K - Kᵀ‖_F / ‖K‖_F.
    pub fn asymmetry(&self) -> f64 {
        let k = self.len();
        let (mut d, mut t) = (0.0, 0.0);
        for i in 0..k {
            for j in 0..k {
                let a = self.stiffness[(i, j)];
                d += (a - self.stiffness[(j, i)]).powi(2);
                t += a * a;
            }
        }
        if t > 0.0 {
            (d / t).sqrt()
        } else {
            0.0
        }
    }
}

/// Shrinker forms on Σ ∩ B_R with Dirichlet data off the free set.
pub fn assemble(surface: &SampledHypersurface, r: f64) -> Result<OperatorMatrices> {
    assemble_weighted(surface, Some(r), WeightKind::Shrinker)
}

/// Forms for either weight. Free samples are those off the chart rim and,
/// when a radius is given, strictly inside B_R.
pub fn assemble_weighted(surface: &SampledHypersurface, r: Option<f64>, kind: WeightKind) -> Result<OperatorMatrices> {
    if let Some(r) = r {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "region radius must be positive, got {r}"
            )));
        }
    }
    let free: Vec<usize> = (0..surface.len())
        .filter(|&i| {
            let s = &surface.samples[i];
            !s.boundary && r.map_or(true, |r| norm(&s.x) < r)
        })
        .collect();
    if free.len() < 10 {
        return Err(Error::EmptyRegion(format!(
            "only {} interior samples in the region; at least 10 are needed",
            free.len()
        )));
    }
    if free.len() > MAX_UNKNOWNS {
        return Err(Error::Precondition(format!(
            "{} unknowns exceed the dense solver cap of {MAX_UNKNOWNS}; coarsen the surface or shrink R",
            free.len()
        )));
    }
    let a2 = compute_geometry(surface)?.norm_a2;
    let mut slot = vec![usize::MAX; surface.len()];
    for (k, &s) in free.iter().enumerate() {
        slot[s] = k;
    }
    let k = free.len();
    let mut out = OperatorMatrices {
        kind,
        region_radius: r.unwrap_or(f64::INFINITY),
        free,
        stiffness: Mat::zeros(k, k),
        potential: vec![0.0; k],
        mass: vec![0.0; k],
        radial_only: false,
    };
    match &surface.chart {
        Chart::Grid(g) => grid_forms(surface, g, &a2, &slot, &mut out)?,
        Chart::Profile(p) => {
            profile_forms(surface, p, &a2, &slot, &mut out);
            out.radial_only = true;
        }
    }
    if let Some(i) = out.mass.iter().position(|m| !(*m > 0.0)) {
        return Err(Error::Invariant(format!(
            "mass matrix is not positive at sample {}",
            out.free[i]
        )));
    }
    Ok(out)
}

/// Multilinear elements on lattice cells, 2-point Gauss rule per axis,
/// geometry from the corner positions.
fn grid_forms(
    surface: &SampledHypersurface,
    g: &GridChart,
    a2: &[f64],
    slot: &[usize],
    out: &mut OperatorMatrices,
) -> Result<()> {
    if matches!(g.topology, Topology::Polar { .. }) {
        return Err(Error::Unsupported(
            "weak-form assembly on hyperspherical charts; use n = 2 spheres or k = 1 cylinders".into(),
        ));
    }
    let n = g.dim();
    let d = n + 1;
    let nc = 1usize << n;
    let gp = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
    let gw = 1.0 / nc as f64;
    let mut corners = vec![0usize; nc];
    for base in g.cell_corners() {
        let mut ok = true;
        let mut touches = false;
        for (b, c) in corners.iter_mut().enumerate() {
            let idx: Vec<i64> = (0..n).map(|a| base[a] + ((b >> a) & 1) as i64).collect();
            match g.sample_at(&idx) {
                Some(s) => {
                    *c = s;
                    touches |= slot[s] != usize::MAX;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok || !touches {
            continue;
        }
        for q in 0..nc {
            let xi: Vec<f64> = (0..n).map(|a| gp[(q >> a) & 1]).collect();
            let mut shape = vec![1.0; nc];
            let mut dshape = vec![vec![1.0; n]; nc];
            for b in 0..nc {
                for a in 0..n {
                    let (v, dv) = if (b >> a) & 1 == 1 {
                        (xi[a], 1.0)
                    } else {
                        (1.0 - xi[a], -1.0)
                    };
                    shape[b] *= v;
                    for e in 0..n {
                        dshape[b][e] *= if e == a { dv } else { v };
                    }
                }
            }
            let mut x = vec![0.0; d];
            let mut jac = DMatrix::<f64>::zeros(d, n);
            let mut a2q = 0.0;
            for b in 0..nc {
                let xb = &surface.samples[corners[b]].x;
                for c in 0..d {
                    x[c] += shape[b] * xb[c];
                    for a in 0..n {
                        jac[(c, a)] += dshape[b][a] * xb[c];
                    }
                }
                a2q += shape[b] * a2[corners[b]];
            }
            let metric = jac.transpose() * &jac;
            let det = metric.determinant();
            if !(det > 0.0) {
                continue;
            }
            let ginv = metric
                .try_inverse()
                .ok_or_else(|| Error::Invariant("singular cell metric".into()))?;
            let dmu = det.sqrt() * gw;
            let w = out.kind.weight(&x) * dmu;
            let pot = out.kind.potential(a2q);
            for b in 0..nc {
                let pb = slot[corners[b]];
                if pb == usize::MAX {
                    continue;
                }
                out.mass[pb] += shape[b] * w;
                out.potential[pb] += shape[b] * pot * w;
                for c in 0..nc {
                    let pc = slot[corners[c]];
                    if pc == usize::MAX {
                        continue;
                    }
                    let mut gg = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            gg += dshape[b][i] * ginv[(i, j)] * dshape[c][j];
                        }
                    }
                    out.stiffness[(pb, pc)] += gg * w;
                }
            }
        }
    }
    Ok(())
}

/// Piecewise-linear radial elements; each node carries its whole orbit.
fn profile_forms(
    surface: &SampledHypersurface,
    p: &ProfileChart,
    a2: &[f64],
    slot: &[usize],
    out: &mut OperatorMatrices,
) {
    let n = surface.n;
    let orbit = unit_sphere_area(n - 1);
    let h = p.spacing;
    let gp = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
    for s in 0..surface.len() {
        let i = p.nodes[s] as usize;
        let Some(t) = p.sample_of_node(i + 1) else { continue };
        let (ps, pt) = (slot[s], slot[t]);
        if ps == usize::MAX && pt == usize::MAX {
            continue;
        }
        for &xi in &gp {
            let r = (i as f64 + xi) * h;
            let u = (1.0 - xi) * p.u[i] + xi * p.u[i + 1];
            let du = (1.0 - xi) * p.du[i] + xi * p.du[i + 1];
            let w = (1.0 + du * du).sqrt();
            let mut x = vec![0.0; n + 1];
            x[0] = r;
            x[n] = u;
            let dmu = orbit * r.powi(n as i32 - 1) * w * h * 0.5;
            let wt = out.kind.weight(&x) * dmu;
            let pot = out.kind.potential((1.0 - xi) * a2[s] + xi * a2[t]);
            // Gradient of the hat functions along arc length.
            let g = 1.0 / (h * w);
            let basis = [(ps, 1.0 - xi, -g), (pt, xi, g)];
            for &(pa, na, da) in &basis {
                if pa == usize::MAX {
                    continue;
                }
                out.mass[pa] += na * wt;
                out.potential[pa] += na * pot * wt;
                for &(pb, _, db) in &basis {
                    if pb != usize::MAX {
                        out.stiffness[(pa, pb)] += da * db * wt;
                    }
                }
            }
        }
    }
}
