//! Closed-form surfaces: round shrinking spheres and cylinders, hyperplanes,
//! tilted planes written as graphs, and the rotational profiles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::chart::{Chart, GridAxis, GridChart, Topology};
use super::graph::{make_graph, GraphPatch, HeightFn};
use super::{truncate, CoverBall, Coverage, Origin, Sample, SampledHypersurface, Shape};
use crate::error::{Error, Result};
use crate::ode;
use crate::vecops::{dot, norm, orthonormal_complement, unit};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatalogId {
    /// {x : <x, normal> = offset}
    Hyperplane { normal: Vec<f64>, offset: f64 },
    /// S^n of radius sqrt(2n).
    Sphere { n: usize },
    /// S^k(sqrt(2k)) x R^(n-k).
    Cylinder { k: usize, n: usize },
    /// Plane through the origin with the given normal, written as a graph
    /// over {x_(n+1) = 0}.
    TiltedPlaneGraph { normal: Vec<f64> },
    /// Rotationally symmetric translator in direction e_(n+1).
    Bowl { n: usize },
    /// Rotational shrinker graph close to {x_(n+1) = 0}, obtained by shooting
    /// on the tip height so that the profile reaches `edge_height` at the
    /// truncation radius.
    NearPlaneShrinker { n: usize, edge_height: f64 },
}

impl CatalogId {
    pub fn dim(&self) -> usize {
        match self {
            CatalogId::Hyperplane { normal, .. } | CatalogId::TiltedPlaneGraph { normal } => {
                normal.len().saturating_sub(1)
            }
            CatalogId::Sphere { n }
            | CatalogId::Cylinder { n, .. }
            | CatalogId::Bowl { n }
            | CatalogId::NearPlaneShrinker { n, .. } => *n,
        }
    }

    pub fn label(&self) -> String {
        match self {
            CatalogId::Hyperplane { normal, offset } => {
                format!("hyperplane normal={normal:?} offset={offset}")
            }
            CatalogId::Sphere { n } => format!("sphere n={n} radius {}", (2.0 * *n as f64).sqrt()),
            CatalogId::Cylinder { k, n } => format!("cylinder k={k} n={n} radius {}", (2.0 * *k as f64).sqrt()),
            CatalogId::TiltedPlaneGraph { normal } => format!("tilted plane graph normal={normal:?}"),
            CatalogId::Bowl { n } => format!("bowl n={n}"),
            CatalogId::NearPlaneShrinker { n, edge_height } => {
                format!("near-plane shrinker n={n} edge height {edge_height}")
            }
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, CatalogId::Sphere { .. })
    }
}

/// Sampling parameters for catalog surfaces.
///
/// `spacing` is the ambient step (the ODE step for profiles). Spheres use
/// `polar_divisions` polar steps when given, otherwise the count implied by
/// `spacing`. `window` optionally restricts each chart axis to a parameter
/// interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub spacing: f64,
    pub polar_divisions: Option<usize>,
    pub azimuth_divisions: Option<usize>,
    pub r_trunc: Option<f64>,
    pub window: Option<Vec<Option<[f64; 2]>>>,
}

impl Resolution {
    pub fn spacing(h: f64) -> Self {
        Resolution {
            spacing: h,
            polar_divisions: None,
            azimuth_divisions: None,
            r_trunc: None,
            window: None,
        }
    }

    /// Latitude/longitude sampling with `n_theta` polar steps.
    pub fn polar(n_theta: usize) -> Self {
        Resolution {
            spacing: PI / n_theta as f64,
            polar_divisions: Some(n_theta),
            ..Resolution::spacing(0.0)
        }
    }

    pub fn with_rtrunc(mut self, r: f64) -> Self {
        self.r_trunc = Some(r);
        self
    }

    pub fn with_azimuth(mut self, n_phi: usize) -> Self {
        self.azimuth_divisions = Some(n_phi);
        self
    }

    pub fn with_window(mut self, window: Vec<Option<[f64; 2]>>) -> Self {
        self.window = Some(window);
        self
    }

    pub fn refined(&self, factor: usize) -> Self {
        Resolution {
            spacing: self.spacing / factor as f64,
            polar_divisions: self.polar_divisions.map(|d| d * factor),
            azimuth_divisions: self.azimuth_divisions.map(|d| d * factor),
            r_trunc: self.r_trunc,
            window: self.window.clone(),
        }
    }

    fn axis_window(&self, axis: usize) -> Option<[f64; 2]> {
        self.window.as_ref().and_then(|w| w.get(axis).copied().flatten())
    }
}

pub fn make_catalog(id: &CatalogId, res: &Resolution) -> Result<SampledHypersurface> {
    let n = id.dim();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "intrinsic dimension must be at least 2, got {n}"
        )));
    }
    let needs_trunc = !id.is_compact();
    if needs_trunc && res.r_trunc.is_none() {
        return Err(Error::InvalidParameter(format!(
            "{} is noncompact: a truncation radius is required",
            id.label()
        )));
    }
    if let Some(r) = res.r_trunc {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter("truncation radius must be positive".into()));
        }
    }
    let origin = Origin::Catalog {
        id: id.clone(),
        resolution: res.clone(),
    };
    let mut s = match id {
        CatalogId::Sphere { n } => {
            let r = (2.0 * *n as f64).sqrt();
            sphere_build(*n, r, res)?
        }
        CatalogId::Cylinder { k, n } => {
            if *k < 1 || *k >= *n {
                return Err(Error::InvalidParameter(format!(
                    "cylinder needs 1 <= k <= n-1, got k={k}, n={n}"
                )));
            }
            cylinder_build(*k, *n, res)?
        }
        CatalogId::Hyperplane { normal, offset } => plane_build(normal, *offset, res)?,
        CatalogId::TiltedPlaneGraph { normal } => {
            let last = *normal.last().unwrap();
            if norm(normal) == 0.0 || last.abs() < 1e-12 {
                return Err(Error::InvalidParameter(
                    "tilted plane normal must have a nonzero last component".into(),
                ));
            }
            let slope: Vec<f64> = normal[..n].iter().map(|v| -v / last).collect();
            let h = check_spacing(res.spacing)?;
            let m = (res.r_trunc.unwrap() / h).ceil() as usize;
            let patch = GraphPatch::from_fn(
                vec![-(m as f64) * h; n],
                vec![2 * m + 1; n],
                h,
                HeightFn::Linear { slope },
                unit(n + 1, n),
            )?;
            make_graph(&patch)?
        }
        CatalogId::Bowl { n } => {
            let r_max = res.r_trunc.unwrap();
            let prof = ode::bowl_profile(*n, r_max, res.spacing)?;
            ode::profile_surface(*n, &prof, super::ProfileOrientation::Down)
        }
        CatalogId::NearPlaneShrinker { n, edge_height } => {
            let r_max = res.r_trunc.unwrap();
            let prof = ode::near_plane_shrinker(*n, r_max, res.spacing, *edge_height)?;
            ode::profile_surface(*n, &prof, super::ProfileOrientation::Up)
        }
    };
    s.origin = origin;
    s.source = id.label();
    // Graph-like catalog members are cut to the requested ball; profiles are
    // already limited by their radial extent.
    if matches!(
        id,
        CatalogId::Cylinder { .. } | CatalogId::Hyperplane { .. } | CatalogId::TiltedPlaneGraph { .. }
    ) {
        s = truncate(&s, res.r_trunc.unwrap())?;
    }
    Ok(s)
}

/// Round sphere of arbitrary radius centred at the origin; not a catalog
/// member unless the radius is sqrt(2n).
pub fn sphere_of_radius(n: usize, radius: f64, res: &Resolution) -> Result<SampledHypersurface> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "intrinsic dimension must be at least 2, got {n}"
        )));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter("sphere radius must be positive".into()));
    }
    let mut s = sphere_build(n, radius, res)?;
    s.origin = Origin::Custom;
    s.source = format!("sphere n={n} radius {radius}");
    Ok(s)
}

fn check_spacing(h: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("spacing must be positive, got {h}")));
    }
    Ok(h)
}

/// Hyperspherical embedding of S^m: y_k = prod_{l<k} sin a_l * cos a_k for
/// k < m and y_m = prod_{l<m} sin a_l. Returns y, dy/da_i and d2y/da_i da_j.
pub(crate) fn hyperspherical(a: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>) {
    let m = a.len();
    let (s, c): (Vec<f64>, Vec<f64>) = a.iter().map(|t| (t.sin(), t.cos())).unzip();
    // factor(l, k, order): derivative `order` of the l-th factor of y_k.
    let factor = |l: usize, k: usize, order: u8| -> f64 {
        let is_sin = l < k || k == m;
        let is_cos = l == k && k < m;
        match (is_sin, is_cos, order % 4) {
            (true, _, 0) => s[l],
            (true, _, 1) => c[l],
            (true, _, 2) => -s[l],
            (true, _, _) => -c[l],
            (_, true, 0) => c[l],
            (_, true, 1) => -s[l],
            (_, true, 2) => -c[l],
            (_, true, _) => s[l],
            _ => {
                if order == 0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    };
    let comp = |k: usize, orders: &[u8]| -> f64 { (0..m).map(|l| factor(l, k, orders[l])).product() };
    let mut y = vec![0.0; m + 1];
    let mut dy = vec![vec![0.0; m + 1]; m];
    let mut d2y = vec![vec![vec![0.0; m + 1]; m]; m];
    let mut ord = vec![0u8; m];
    for k in 0..=m {
        y[k] = comp(k, &ord);
        for i in 0..m {
            ord[i] = 1;
            dy[i][k] = comp(k, &ord);
            ord[i] = 0;
            for j in 0..m {
                ord[i] += 1;
                ord[j] += 1;
                d2y[i][j][k] = comp(k, &ord);
                ord[i] = 0;
                ord[j] = 0;
            }
        }
    }
    (y, dy, d2y)
}

/// Position, tangents X_i, second derivatives X_ij and unit normal of an
/// analytic chart at parameters `q`.
pub(crate) struct Frame {
    pub x: Vec<f64>,
    pub tangents: Vec<Vec<f64>>,
    pub second: Vec<Vec<Vec<f64>>>,
    pub normal: Vec<f64>,
}

pub(crate) fn analytic_frame(shape: &Shape, q: &[f64]) -> Option<Frame> {
    match shape {
        Shape::Sphere { center, radius } => {
            let (y, dy, d2y) = hyperspherical(q);
            let x = y.iter().zip(center).map(|(a, c)| c + radius * a).collect();
            let t = dy.iter().map(|v| v.iter().map(|a| radius * a).collect()).collect();
            let sec = d2y
                .iter()
                .map(|row| row.iter().map(|v| v.iter().map(|a| radius * a).collect()).collect())
                .collect();
            Some(Frame {
                x,
                tangents: t,
                second: sec,
                normal: y,
            })
        }
        Shape::Cylinder { k, radius } => {
            let n = q.len();
            let (y, dy, d2y) = hyperspherical(&q[..*k]);
            let mut x: Vec<f64> = y.iter().map(|a| radius * a).collect();
            x.extend_from_slice(&q[*k..]);
            let mut normal = y.clone();
            normal.resize(n + 1, 0.0);
            let mut t = vec![vec![0.0; n + 1]; n];
            let mut sec = vec![vec![vec![0.0; n + 1]; n]; n];
            for i in 0..n {
                if i < *k {
                    for c in 0..=*k {
                        t[i][c] = radius * dy[i][c];
                    }
                    for j in 0..*k {
                        for c in 0..=*k {
                            sec[i][j][c] = radius * d2y[i][j][c];
                        }
                    }
                } else {
                    t[i][i + 1] = 1.0;
                }
            }
            Some(Frame {
                x,
                tangents: t,
                second: sec,
                normal,
            })
        }
        Shape::Plane { normal, offset, basis } => {
            let n = basis.len();
            let mut x: Vec<f64> = normal.iter().map(|v| offset * v).collect();
            for (b, &p) in basis.iter().zip(q) {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += p * bi;
                }
            }
            Some(Frame {
                x,
                tangents: basis.clone(),
                second: vec![vec![vec![0.0; n + 1]; n]; n],
                normal: normal.clone(),
            })
        }
        _ => None,
    }
}

/// sqrt(det g) from chart tangents.
pub(crate) fn volume_element(tangents: &[Vec<f64>]) -> f64 {
    let n = tangents.len();
    let g = nalgebra::DMatrix::from_fn(n, n, |i, j| dot(&tangents[i], &tangents[j]));
    g.determinant().max(0.0).sqrt()
}

/// Indices along one axis allowed by an optional parameter window.
fn axis_indices(axis: &GridAxis, window: Option<[f64; 2]>) -> Vec<i64> {
    (0..axis.count as i64)
        .filter(|&k| match window {
            None => true,
            Some([lo, hi]) => {
                let mut t = axis.coord(k);
                if axis.periodic {
                    let period = axis.spacing * axis.count as f64;
                    // Wrap into [lo, lo + period).
                    t = lo + (t - lo).rem_euclid(period);
                }
                t >= lo - 1e-12 && t <= hi + 1e-12
            }
        })
        .collect()
}

/// Enumerate lattice nodes (row-major) from per-axis index lists and build
/// samples from an analytic shape.
fn build_grid(
    n: usize,
    shape: Shape,
    axes: Vec<GridAxis>,
    topology: Topology,
    lists: Vec<Vec<i64>>,
    weight: impl Fn(&[i64], &Frame) -> f64,
) -> Result<SampledHypersurface> {
    let mut nodes = Vec::new();
    let mut samples = Vec::new();
    let total: usize = lists.iter().map(|l| l.len()).product();
    if total == 0 {
        return Err(Error::EmptyRegion("sampling window selects no nodes".into()));
    }
    let probe = GridChart::new(axes.clone(), topology, Vec::new());
    let mut pos = vec![0usize; n];
    for _ in 0..total {
        let idx: Vec<i64> = pos.iter().zip(&lists).map(|(&p, l)| l[p]).collect();
        let keep = match topology {
            Topology::LatLong => {
                let last = axes[0].count as i64 - 1;
                !((idx[0] == 0 || idx[0] == last) && idx[1] != 0)
            }
            _ => true,
        };
        if keep {
            let q = probe.params_of(&idx);
            let f = analytic_frame(&shape, &q).expect("analytic shape");
            let dmu = weight(&idx, &f);
            nodes.push(probe.linear(&idx));
            samples.push(Sample {
                x: f.x,
                nu: f.normal,
                dmu,
                boundary: false,
            });
        }
        for d in (0..n).rev() {
            pos[d] += 1;
            if pos[d] < lists[d].len() {
                break;
            }
            pos[d] = 0;
        }
    }
    let mut s = SampledHypersurface {
        n,
        source: String::new(),
        origin: Origin::Custom,
        shape,
        samples,
        chart: Chart::Grid(GridChart::new(axes, topology, nodes)),
        coverage: Coverage::complete(),
        truncation: None,
    };
    s.refresh_boundary();
    Ok(s)
}

fn polar_count(radius: f64, res: &Resolution) -> Result<usize> {
    let nt = match res.polar_divisions {
        Some(d) => d,
        None => (PI * radius / check_spacing(res.spacing)?).round() as usize,
    };
    if nt < 4 {
        return Err(Error::InvalidParameter(format!(
            "resolution gives {nt} polar steps; at least 4 are required"
        )));
    }
    Ok(nt)
}

fn sphere_build(n: usize, radius: f64, res: &Resolution) -> Result<SampledHypersurface> {
    let nt = polar_count(radius, res)?;
    let nphi = res.azimuth_divisions.unwrap_or(2 * nt);
    if nphi < 6 || nphi % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "azimuthal count must be even and at least 6, got {nphi}"
        )));
    }
    let shape = Shape::Sphere {
        center: vec![0.0; n + 1],
        radius,
    };
    let dt = PI / nt as f64;
    let dphi = 2.0 * PI / nphi as f64;
    if n == 2 {
        let axes = vec![
            GridAxis {
                start: 0.0,
                spacing: dt,
                count: nt + 1,
                periodic: false,
            },
            GridAxis {
                start: 0.0,
                spacing: dphi,
                count: nphi,
                periodic: true,
            },
        ];
        if let Some(w) = &res.window {
            if w.get(1).copied().flatten().is_some() || w.first().copied().flatten().map_or(false, |[lo, _]| lo > 0.0) {
                return Err(Error::Unsupported(
                    "sphere windows must be polar caps [0, theta_max]".into(),
                ));
            }
        }
        let lists = vec![axis_indices(&axes[0], res.axis_window(0)), (0..nphi as i64).collect()];
        let last_row = *lists[0].last().unwrap_or(&0);
        let mut s = build_grid(n, shape, axes, Topology::LatLong, lists, |idx, _| {
            let j = idx[0];
            if j == 0 || j == nt as i64 {
                2.0 * PI * radius * radius * (1.0 - (dt / 2.0).cos())
            } else {
                let th = j as f64 * dt;
                2.0 * radius * radius * dphi * th.sin() * (dt / 2.0).sin()
            }
        })?;
        if (last_row as usize) < nt {
            let th = last_row as f64 * dt;
            s.coverage = Coverage::ball(
                unit(3, 0).iter().map(|v| v * radius).collect(),
                2.0 * radius * (th / 2.0).sin(),
            );
        }
        return Ok(s);
    }
    if res.window.is_some() {
        return Err(Error::Unsupported("windows are only supported on 2-spheres".into()));
    }
    let mut axes: Vec<GridAxis> = (0..n - 1)
        .map(|_| GridAxis {
            start: dt / 2.0,
            spacing: dt,
            count: nt,
            periodic: false,
        })
        .collect();
    axes.push(GridAxis {
        start: 0.0,
        spacing: dphi,
        count: nphi,
        periodic: true,
    });
    let lists = axes.iter().map(|a| (0..a.count as i64).collect()).collect();
    let cell: f64 = axes.iter().map(|a| a.spacing).product();
    build_grid(n, shape, axes, Topology::Polar { polar: n - 1 }, lists, |_, f| {
        volume_element(&f.tangents) * cell
    })
}

fn axial_axis(h: f64, r: f64) -> GridAxis {
    let m = (r / h).ceil() as usize;
    GridAxis {
        start: -(m as f64) * h,
        spacing: h,
        count: 2 * m + 1,
        periodic: false,
    }
}

fn window_ball(
    axes: &[GridAxis],
    lists: &[Vec<i64>],
    res: &Resolution,
    shape: &Shape,
    k_angles: usize,
    radius: f64,
) -> Option<CoverBall> {
    // Conservative ball around the window centre.
    let mut q = Vec::new();
    let mut rad = f64::INFINITY;
    for (d, (a, l)) in axes.iter().zip(lists).enumerate() {
        if l.len() == a.count {
            q.push(if a.periodic { 0.0 } else { a.coord(a.count as i64 / 2) });
            continue;
        }
        // Periodic coordinates are unwrapped relative to the window start.
        let base = res.axis_window(d).map_or(0.0, |w| w[0]);
        let period = a.spacing * a.count as f64;
        let unwrap = |k: &i64| {
            if a.periodic {
                base + (a.coord(*k) - base).rem_euclid(period)
            } else {
                a.coord(*k)
            }
        };
        let lo = l.iter().map(unwrap).fold(f64::INFINITY, f64::min);
        let hi = l.iter().map(unwrap).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            return None;
        }
        let half = (hi - lo) / 2.0;
        q.push(lo + half);
        let r = if d < k_angles {
            2.0 * radius * (half / 2.0).sin()
        } else {
            half
        };
        rad = rad.min(r);
    }
    if !rad.is_finite() {
        return None;
    }
    let f = analytic_frame(shape, &q)?;
    Some(CoverBall {
        center: f.x,
        radius: rad,
    })
}

fn cylinder_build(k: usize, n: usize, res: &Resolution) -> Result<SampledHypersurface> {
    let radius = (2.0 * k as f64).sqrt();
    let h = check_spacing(res.spacing)?;
    let r_trunc = res.r_trunc.unwrap();
    let shape = Shape::Cylinder { k, radius };
    let mut axes = Vec::new();
    let topology;
    if k == 1 {
        let nphi = res
            .azimuth_divisions
            .unwrap_or_else(|| ((2.0 * PI * radius / h).round() as usize).max(8));
        axes.push(GridAxis {
            start: 0.0,
            spacing: 2.0 * PI / nphi as f64,
            count: nphi,
            periodic: true,
        });
        topology = Topology::Box;
    } else {
        let nt = polar_count(radius, res)?;
        let dt = PI / nt as f64;
        for _ in 0..k - 1 {
            axes.push(GridAxis {
                start: dt / 2.0,
                spacing: dt,
                count: nt,
                periodic: false,
            });
        }
        axes.push(GridAxis {
            start: 0.0,
            spacing: dt,
            count: 2 * nt,
            periodic: true,
        });
        topology = Topology::Polar { polar: k - 1 };
    }
    for _ in k..n {
        axes.push(axial_axis(h, r_trunc));
    }
    if k > 1 && res.window.is_some() {
        return Err(Error::Unsupported(
            "windows need a circular cross-section (k = 1)".into(),
        ));
    }
    let lists: Vec<Vec<i64>> = axes
        .iter()
        .enumerate()
        .map(|(d, a)| axis_indices(a, res.axis_window(d)))
        .collect();
    let cover = if res.window.is_some() {
        window_ball(&axes, &lists, res, &shape, k, radius)
    } else {
        None
    };
    let cell: f64 = axes.iter().map(|a| a.spacing).product();
    let mut s = build_grid(n, shape, axes, topology, lists, |_, f| {
        volume_element(&f.tangents) * cell
    })?;
    if let Some(b) = cover {
        s.coverage.intersect(b);
    }
    Ok(s)
}

fn plane_build(normal: &[f64], offset: f64, res: &Resolution) -> Result<SampledHypersurface> {
    let n = normal.len() - 1;
    let len = norm(normal);
    if !(len > 0.0) {
        return Err(Error::InvalidParameter("hyperplane normal must be nonzero".into()));
    }
    let unit_normal: Vec<f64> = normal.iter().map(|v| v / len).collect();
    let h = check_spacing(res.spacing)?;
    let basis = orthonormal_complement(&unit_normal);
    let shape = Shape::Plane {
        normal: unit_normal,
        offset,
        basis,
    };
    let axes: Vec<GridAxis> = (0..n).map(|_| axial_axis(h, res.r_trunc.unwrap())).collect();
    let lists: Vec<Vec<i64>> = axes
        .iter()
        .enumerate()
        .map(|(d, a)| axis_indices(a, res.axis_window(d)))
        .collect();
    let cover = if res.window.is_some() {
        window_ball(&axes, &lists, res, &shape, 0, 0.0)
    } else {
        None
    };
    let cell = h.powi(n as i32);
    let mut s = build_grid(n, shape, axes, Topology::Box, lists, |_, _| cell)?;
    if let Some(b) = cover {
        s.coverage.intersect(b);
    }
    Ok(s)
}
