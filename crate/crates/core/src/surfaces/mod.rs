//! Discrete hypersurfaces: samples on a structured chart plus enough source
//! data to recompute geometry analytically or by finite differences.

mod ball;
mod catalog;
pub mod chart;
mod graph;
mod json;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecops::{dist, norm};

pub use ball::{ball_fractions, BallQuery};
pub(crate) use catalog::{analytic_frame, volume_element, Frame};
pub use catalog::{make_catalog, sphere_of_radius, CatalogId, Resolution};
pub use chart::{Chart, GridAxis, GridChart, ProfileChart, ProfileOrientation, Topology};
pub use graph::{make_graph, GraphPatch, HeightFn};
pub use json::{from_json, to_json};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<f64>,
    pub nu: Vec<f64>,
    pub dmu: f64,
    pub boundary: bool,
}

/// A Euclidean ball such that every point of the continuum surface inside it
/// is represented by the samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverBall {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Region of the continuum surface that is faithfully sampled: the
/// intersection of the listed balls (no balls means the whole surface).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub balls: Vec<CoverBall>,
}

impl Coverage {
    pub fn complete() -> Self {
        Coverage { balls: Vec::new() }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Coverage {
            balls: vec![CoverBall { center, radius }],
        }
    }

    pub fn is_complete(&self) -> bool {
        self.balls.is_empty()
    }

    /// True when B_r(p) lies in every covering ball.
    pub fn contains_ball(&self, p: &[f64], r: f64) -> bool {
        self.balls
            .iter()
            .all(|b| dist(p, &b.center) + r <= b.radius * (1.0 + 1e-12) + 1e-12)
    }

    /// Largest radius of a ball around `p` that is covered, infinite when
    /// the whole surface is sampled.
    pub fn radius_about(&self, p: &[f64]) -> f64 {
        self.balls
            .iter()
            .map(|b| b.radius - dist(p, &b.center))
            .fold(f64::INFINITY, f64::min)
    }

    fn intersect(&mut self, other: CoverBall) {
        self.balls.push(other);
    }
}

/// Analytic or discrete description used to evaluate geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Round sphere; the chart parametrizes it by hyperspherical angles.
    Sphere { center: Vec<f64>, radius: f64 },
    /// S^k(radius) x R^(n-k); chart axes are k angles then n-k axial
    /// coordinates.
    Cylinder { k: usize, radius: f64 },
    /// {offset * normal + sum p_i basis_i}; chart axes are the p_i.
    Plane {
        normal: Vec<f64>,
        offset: f64,
        basis: Vec<Vec<f64>>,
    },
    /// Graph over a box; chart axes are the box coordinates.
    Graph(GraphPatch),
    /// Rotational profile stored in the chart.
    Profile,
    /// Positions and normals only.
    Samples,
}

/// How a surface was built, so that it can be rebuilt at finer resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Origin {
    Catalog { id: CatalogId, resolution: Resolution },
    Graph,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledHypersurface {
    pub n: usize,
    pub source: String,
    pub origin: Origin,
    pub shape: Shape,
    pub samples: Vec<Sample>,
    pub chart: Chart,
    pub coverage: Coverage,
    /// Radius of the last truncation, if any.
    pub truncation: Option<f64>,
}

impl SampledHypersurface {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + 1
    }

    pub fn positions(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.iter().map(|s| s.x.as_slice())
    }

    pub fn radii(&self) -> Vec<f64> {
        self.samples.iter().map(|s| norm(&s.x)).collect()
    }

    pub fn total_area(&self) -> f64 {
        self.samples.iter().map(|s| s.dmu).sum()
    }

    pub fn grid(&self) -> Option<&GridChart> {
        match &self.chart {
            Chart::Grid(g) => Some(g),
            Chart::Profile(_) => None,
        }
    }

    pub fn profile(&self) -> Option<&ProfileChart> {
        match &self.chart {
            Chart::Profile(p) => Some(p),
            Chart::Grid(_) => None,
        }
    }

    /// Nominal chart spacing: the largest ambient length of one chart step.
    pub fn spacing(&self) -> f64 {
        match (&self.chart, &self.shape) {
            (Chart::Profile(p), _) => p.spacing,
            (Chart::Grid(g), Shape::Sphere { radius, .. }) => {
                g.axes.iter().map(|a| a.spacing).fold(0.0, f64::max) * radius
            }
            (Chart::Grid(g), Shape::Cylinder { radius, k }) => g
                .axes
                .iter()
                .enumerate()
                .map(|(i, a)| if i < *k { a.spacing * radius } else { a.spacing })
                .fold(0.0, f64::max),
            (Chart::Grid(g), _) => g.axes.iter().map(|a| a.spacing).fold(0.0, f64::max),
        }
    }

    /// Index of the sample closest to `p`.
    pub fn nearest_sample(&self, p: &[f64]) -> Option<usize> {
        let mut best = None;
        let mut bd = f64::INFINITY;
        for (i, s) in self.samples.iter().enumerate() {
            let d = dist(&s.x, p);
            if d < bd {
                bd = d;
                best = Some(i);
            }
        }
        best
    }

    /// Check the structural invariants.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!(
                "intrinsic dimension must be at least 2, got {}",
                self.n
            )));
        }
        let d = self.n + 1;
        for (i, s) in self.samples.iter().enumerate() {
            if s.x.len() != d || s.nu.len() != d {
                return Err(Error::Invariant(format!("sample {i}: expected vectors of length {d}")));
            }
            if s.x.iter().chain(&s.nu).any(|v| !v.is_finite()) || !s.dmu.is_finite() {
                return Err(Error::NonFinite {
                    what: "sample data".into(),
                    sample: i,
                });
            }
            if (norm(&s.nu) - 1.0).abs() > 1e-12 {
                return Err(Error::Invariant(format!(
                    "sample {i}: normal length {} is not 1",
                    norm(&s.nu)
                )));
            }
            if s.dmu <= 0.0 {
                return Err(Error::Invariant(format!(
                    "sample {i}: area weight {} is not positive",
                    s.dmu
                )));
            }
        }
        match &self.chart {
            Chart::Grid(g) => {
                if g.nodes.len() != self.samples.len() {
                    return Err(Error::Invariant("chart node count differs from sample count".into()));
                }
                if g.dim() != self.n {
                    return Err(Error::Invariant("chart dimension differs from n".into()));
                }
                if g.nodes.iter().any(|&l| l >= g.lattice_len()) {
                    return Err(Error::Invariant("chart node outside lattice".into()));
                }
            }
            Chart::Profile(p) => {
                if p.nodes.len() != self.samples.len() {
                    return Err(Error::Invariant("chart node count differs from sample count".into()));
                }
                if p.u.len() != p.du.len() || p.nodes.iter().any(|&k| k as usize >= p.u.len()) {
                    return Err(Error::Invariant("profile arrays inconsistent".into()));
                }
                if p.nodes.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Invariant("profile nodes must increase".into()));
                }
                if !(p.spacing > 0.0) {
                    return Err(Error::Invariant("profile spacing must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// Keep the samples listed in `keep` (ascending) and recompute the
    /// boundary mask from the chart.
    pub fn restrict(&self, keep: &[usize]) -> SampledHypersurface {
        let mut out = self.clone();
        out.samples = keep.iter().map(|&i| self.samples[i].clone()).collect();
        out.chart = match &self.chart {
            Chart::Grid(g) => Chart::Grid(g.restrict(keep)),
            Chart::Profile(p) => {
                let mut q = p.clone();
                q.nodes = keep.iter().map(|&i| p.nodes[i]).collect();
                Chart::Profile(q)
            }
        };
        out.refresh_boundary();
        out
    }

    /// Recompute `boundary` flags: a sample is on the boundary when any
    /// stencil neighbor is missing.
    pub fn refresh_boundary(&mut self) {
        match &self.chart {
            Chart::Grid(g) => {
                for i in 0..self.samples.len() {
                    self.samples[i].boundary = !g.has_full_neighborhood(i);
                }
            }
            Chart::Profile(p) => {
                for (i, &k) in p.nodes.iter().enumerate() {
                    let k = k as i64;
                    let full = (-2..=2).all(|o| {
                        let m = (k + o).unsigned_abs() as usize;
                        p.sample_of_node(m).is_some()
                    });
                    self.samples[i].boundary = !full;
                }
            }
        }
    }

    /// Samples with interior stencils.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.samples.len()).filter(|&i| !self.samples[i].boundary).collect()
    }
}

/// Keep the samples with |x| <= R.
pub fn truncate(surface: &SampledHypersurface, r: f64) -> Result<SampledHypersurface> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "truncation radius must be positive, got {r}"
        )));
    }
    let keep: Vec<usize> = (0..surface.samples.len())
        .filter(|&i| norm(&surface.samples[i].x) <= r)
        .collect();
    if keep.is_empty() {
        return Err(Error::EmptyRegion(format!("no samples with |x| <= {r}")));
    }
    let mut out = surface.restrict(&keep);
    out.coverage.intersect(CoverBall {
        center: vec![0.0; surface.n + 1],
        radius: r,
    });
    out.truncation = Some(surface.truncation.map_or(r, |t| t.min(r)));
    Ok(out)
}

/// Resample at `factor` times finer spacing.
pub fn refine(surface: &SampledHypersurface, factor: usize) -> Result<SampledHypersurface> {
    if factor < 2 {
        return Err(Error::InvalidParameter(format!(
            "refinement factor must be at least 2, got {factor}"
        )));
    }
    let fine = match (&surface.origin, &surface.shape) {
        (Origin::Catalog { id, resolution }, _) => make_catalog(id, &resolution.refined(factor))?,
        (Origin::Graph, Shape::Graph(patch)) => make_graph(&patch.refined(factor)?)?,
        (Origin::Custom, Shape::Sphere { center, radius }) => {
            let g = surface
                .grid()
                .ok_or_else(|| Error::Unsupported("sphere without grid chart".into()))?;
            let nt = g.axes[0].count - if g.topology == Topology::LatLong { 1 } else { 0 };
            let mut s = sphere_of_radius(surface.n, *radius, &Resolution::polar(nt * factor))?;
            s = translate(&s, center)?;
            s.source = surface.source.clone();
            s
        }
        _ => {
            return Err(Error::Unsupported(
                "custom surface carries no interpolation data".into(),
            ))
        }
    };
    match surface.truncation {
        Some(r) => truncate(&fine, r),
        None => Ok(fine),
    }
}

/// Rigidly translate by `offset`.
pub fn translate(surface: &SampledHypersurface, offset: &[f64]) -> Result<SampledHypersurface> {
    if offset.len() != surface.n + 1 {
        return Err(Error::InvalidParameter("offset dimension mismatch".into()));
    }
    let mut out = surface.clone();
    for s in &mut out.samples {
        for (a, b) in s.x.iter_mut().zip(offset) {
            *a += b;
        }
    }
    for b in &mut out.coverage.balls {
        for (a, o) in b.center.iter_mut().zip(offset) {
            *a += o;
        }
    }
    out.shape = match &surface.shape {
        Shape::Sphere { center, radius } => Shape::Sphere {
            center: center.iter().zip(offset).map(|(a, b)| a + b).collect(),
            radius: *radius,
        },
        _ => Shape::Samples,
    };
    if offset.iter().any(|&o| o != 0.0) {
        out.origin = Origin::Custom;
        out.truncation = None;
        out.source = format!("{} translated", surface.source);
    }
    Ok(out)
}
