//! Pointwise curvature fields: mean curvature, shape operator, |A|², the
//! derivative norms |∇A|², |∇|A||², |∇H|, and the shrinker residual.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::diffops::{profile_u2, DiffOps};
use crate::error::{Error, Result};
use crate::stencil::{Accuracy, GridDiff, ProfileDiff};
use crate::surfaces::{Frame, ProfileOrientation, SampledHypersurface, Shape};
use crate::vecops::{dot, norm};

/// Per-sample curvature data. `shape_op` holds the n x n shape operator in an
/// orthonormalized chart frame (row-major), so that its trace is H and its
/// squared Frobenius norm is |A|².
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryFields {
    pub n: usize,
    #[serde(rename = "H")]
    pub mean_curvature: Vec<f64>,
    pub shape_op: Vec<Vec<f64>>,
    #[serde(rename = "normA2")]
    pub norm_a2: Vec<f64>,
    #[serde(rename = "gradA2")]
    pub grad_a2: Vec<f64>,
    #[serde(rename = "gradNormA2")]
    pub grad_norm_a2: Vec<f64>,
    pub radius: Vec<f64>,
    /// |∇H| from differences of H.
    #[serde(rename = "meanH_grad")]
    pub grad_h: Vec<f64>,
    /// Samples evaluated with one-sided or missing stencils.
    pub lower_accuracy: Vec<bool>,
    /// Allowed excess of |∇|A||² over |∇A|² at a sample.
    pub kato_tolerance: f64,
}

impl GeometryFields {
    fn zeros(surface: &SampledHypersurface) -> Self {
        let m = surface.len();
        let n = surface.n;
        GeometryFields {
            n,
            mean_curvature: vec![0.0; m],
            shape_op: vec![vec![0.0; n * n]; m],
            norm_a2: vec![0.0; m],
            grad_a2: vec![0.0; m],
            grad_norm_a2: vec![0.0; m],
            radius: surface.radii(),
            grad_h: vec![0.0; m],
            lower_accuracy: surface.samples.iter().map(|s| s.boundary).collect(),
            kato_tolerance: 1e-10,
        }
    }

    /// |A| at a sample.
    pub fn norm_a(&self, i: usize) -> f64 {
        self.norm_a2[i].max(0.0).sqrt()
    }

    /// Identity-based bound ½|x||A| for |∇H| on shrinkers.
    pub fn grad_h_bound(&self, i: usize) -> f64 {
        0.5 * self.radius[i] * self.norm_a(i)
    }

    /// Largest violation of the trace, Frobenius, Kato and Cauchy-Schwarz
    /// consistency relations over the given samples.
    pub fn consistency_violation(&self, samples: &[usize]) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for &i in samples {
            let s = &self.shape_op[i];
            let tr: f64 = (0..n).map(|a| s[a * n + a]).sum();
            let fro: f64 = s.iter().map(|v| v * v).sum();
            worst = worst.max((tr - self.mean_curvature[i]).abs());
            worst = worst.max((fro - self.norm_a2[i]).abs());
            worst = worst.max(self.grad_norm_a2[i] - self.grad_a2[i] - self.kato_tolerance);
            worst = worst.max(self.mean_curvature[i].abs() - (n as f64).sqrt() * self.norm_a(i) - 1e-10);
        }
        worst
    }
}

fn diag_fields(out: &mut GeometryFields, diag: &[f64]) {
    let n = out.n;
    let h: f64 = diag.iter().sum();
    let a2: f64 = diag.iter().map(|k| k * k).sum();
    for i in 0..out.norm_a2.len() {
        let mut s = vec![0.0; n * n];
        for a in 0..n {
            s[a * n + a] = diag[a];
        }
        out.shape_op[i] = s;
        out.mean_curvature[i] = h;
        out.norm_a2[i] = a2;
    }
}

pub fn compute_geometry(surface: &SampledHypersurface) -> Result<GeometryFields> {
    let mut out = GeometryFields::zeros(surface);
    let n = surface.n;
    match &surface.shape {
        Shape::Sphere { radius, .. } => diag_fields(&mut out, &vec![1.0 / radius; n]),
        Shape::Cylinder { k, radius } => {
            let d: Vec<f64> = (0..n).map(|a| if a < *k { 1.0 / radius } else { 0.0 }).collect();
            diag_fields(&mut out, &d);
        }
        Shape::Plane { .. } => {}
        Shape::Graph(_) | Shape::Samples => frame_geometry(surface, &mut out)?,
        Shape::Profile => profile_geometry(surface, &mut out)?,
    }
    for (i, v) in out.norm_a2.iter().enumerate() {
        if !v.is_finite() || !out.mean_curvature[i].is_finite() {
            return Err(Error::NonFinite {
                what: "curvature".into(),
                sample: i,
            });
        }
    }
    Ok(out)
}

/// Shape operator from a chart frame: S = L^{-1} h L^{-T} with G = L L^T and
/// h_ij = -<n, X_ij>. Returns (S, ambient Weingarten map X G^-1 h G^-1 X^T).
fn frame_shape(f: &Frame) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let n = f.tangents.len();
    let d = n + 1;
    let g = DMatrix::from_fn(n, n, |i, j| dot(&f.tangents[i], &f.tangents[j]));
    let h = DMatrix::from_fn(n, n, |i, j| -dot(&f.normal, &f.second[i][j]));
    let chol = g.clone().cholesky()?;
    let l = chol.l();
    let linv = l.clone().try_inverse()?;
    let s = &linv * &h * linv.transpose();
    let ginv = g.try_inverse()?;
    let x = DMatrix::from_fn(d, n, |c, i| f.tangents[i][c]);
    let amb = &x * &ginv * &h * &ginv * x.transpose();
    Some((s, amb))
}

fn frame_geometry(surface: &SampledHypersurface, out: &mut GeometryFields) -> Result<()> {
    let ops = DiffOps::new(surface)?;
    let frames = ops.frames().unwrap();
    let chart = surface.grid().unwrap();
    let n = surface.n;
    let d = n + 1;
    let m = surface.len();
    let mut amb: Vec<Vec<f64>> = vec![vec![f64::NAN; d * d]; m];
    for s in 0..m {
        let Some(f) = &frames[s] else {
            out.lower_accuracy[s] = true;
            out.mean_curvature[s] = f64::NAN;
            out.norm_a2[s] = f64::NAN;
            continue;
        };
        let (sh, a) = frame_shape(f).ok_or(Error::NonFinite {
            what: "metric".into(),
            sample: s,
        })?;
        let sym = 0.5 * (&sh + sh.transpose());
        out.shape_op[s] = (0..n * n).map(|k| sym[(k / n, k % n)]).collect();
        out.mean_curvature[s] = sym.trace();
        out.norm_a2[s] = sym.iter().map(|v| v * v).sum();
        amb[s] = (0..d * d).map(|k| a[(k / d, k % d)]).collect();
    }
    // Derivatives of the ambient Weingarten map along each chart axis.
    let diff = GridDiff { chart };
    let comps: Vec<Vec<f64>> = (0..d * d).map(|c| amb.iter().map(|a| a[c]).collect()).collect();
    let hfield = out.mean_curvature.clone();
    for s in 0..m {
        let Some(f) = &frames[s] else { continue };
        let ginv = ops.inverse_metric_at(s).unwrap();
        let mut worst = Accuracy::High;
        let mut b: Vec<DMatrix<f64>> = Vec::with_capacity(n);
        let mut dh = vec![0.0; n];
        let mut ok = true;
        for k in 0..n {
            let mut dk = DMatrix::zeros(d, d);
            for c in 0..d * d {
                match diff.d1(&comps[c], s, k) {
                    Some((v, a)) if v.is_finite() => {
                        dk[(c / d, c % d)] = v;
                        worst = worst.max(a);
                    }
                    _ => ok = false,
                }
            }
            match diff.d1(&hfield, s, k) {
                Some((v, _)) if v.is_finite() => dh[k] = v,
                _ => ok = false,
            }
            let nu = DMatrix::from_fn(d, 1, |c, _| f.normal[c]);
            let p = DMatrix::identity(d, d) - &nu * nu.transpose();
            b.push(&p * dk * &p);
        }
        if !ok {
            out.lower_accuracy[s] = true;
            continue;
        }
        if worst == Accuracy::OneSided {
            out.lower_accuracy[s] = true;
        }
        let a = DMatrix::from_fn(d, d, |i, j| amb[s][i * d + j]);
        let mut ga = 0.0;
        let mut gna = 0.0;
        let mut gh = 0.0;
        let dnorm: Vec<f64> = b.iter().map(|bk| 2.0 * (&a * bk).trace()).collect();
        for k in 0..n {
            for l in 0..n {
                let gkl = ginv[(k, l)];
                ga += gkl * (&b[k] * &b[l]).trace();
                gna += gkl * dnorm[k] * dnorm[l];
                gh += gkl * dh[k] * dh[l];
            }
        }
        out.grad_a2[s] = ga.max(0.0);
        let a2 = out.norm_a2[s];
        out.grad_norm_a2[s] = if a2 > 1e-300 { (gna / (4.0 * a2)).max(0.0) } else { 0.0 };
        out.grad_h[s] = gh.max(0.0).sqrt();
    }
    out.kato_tolerance = 1e-10;
    Ok(())
}

fn profile_geometry(surface: &SampledHypersurface, out: &mut GeometryFields) -> Result<()> {
    let prof = surface.profile().unwrap();
    let n = surface.n;
    let u2 = profile_u2(prof);
    let sign = match prof.orientation {
        ProfileOrientation::Up => -1.0,
        ProfileOrientation::Down => 1.0,
    };
    let m = surface.len();
    let mut kr = vec![0.0; m];
    let mut kp = vec![0.0; m];
    let mut w = vec![0.0; m];
    for (s, &node) in prof.nodes.iter().enumerate() {
        let node = node as usize;
        let du = prof.du[node];
        w[s] = (1.0 + du * du).sqrt();
        kr[s] = sign * u2[node] / w[s].powi(3);
        kp[s] = if node == 0 {
            sign * u2[0]
        } else {
            sign * du / (prof.radius(node) * w[s])
        };
        let mut sh = vec![0.0; n * n];
        sh[0] = kr[s];
        for a in 1..n {
            sh[a * n + a] = kp[s];
        }
        out.shape_op[s] = sh;
        out.mean_curvature[s] = kr[s] + (n - 1) as f64 * kp[s];
        out.norm_a2[s] = kr[s] * kr[s] + (n - 1) as f64 * kp[s] * kp[s];
        if !u2[node].is_finite() {
            out.lower_accuracy[s] = true;
        }
    }
    let diff = ProfileDiff { chart: prof };
    let nf = (n - 1) as f64;
    for (s, &node) in prof.nodes.iter().enumerate() {
        let node = node as usize;
        let (Some((dkr, a1)), Some((dkp, a2))) = (diff.d1(&kr, node, false), diff.d1(&kp, node, false)) else {
            out.lower_accuracy[s] = true;
            continue;
        };
        if a1.max(a2) == Accuracy::OneSided {
            out.lower_accuracy[s] = true;
        }
        // Arc-length derivatives along the meridian.
        let (krs, kps) = (dkr / w[s], dkp / w[s]);
        out.grad_a2[s] = krs * krs + 3.0 * nf * kps * kps;
        let a2 = out.norm_a2[s];
        let da2 = 2.0 * (kr[s] * krs + nf * kp[s] * kps);
        out.grad_norm_a2[s] = if a2 > 1e-300 { da2 * da2 / (4.0 * a2) } else { 0.0 };
        out.grad_h[s] = (krs + nf * kps).abs();
    }
    Ok(())
}

/// Samplewise H - ½<x, n> and its sup over interior samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShrinkerResidual {
    pub residual: Vec<f64>,
    pub sup: f64,
}

pub fn shrinker_residual(surface: &SampledHypersurface, fields: &GeometryFields) -> ShrinkerResidual {
    let residual: Vec<f64> = surface
        .samples
        .iter()
        .zip(&fields.mean_curvature)
        .map(|(s, h)| h - 0.5 * dot(&s.x, &s.nu))
        .collect();
    let sup = surface
        .interior()
        .into_iter()
        .map(|i| residual[i].abs())
        .fold(0.0, f64::max);
    ShrinkerResidual { residual, sup }
}

/// sup over samples in B_R of |A| / (1 + |x|).
pub fn linear_growth_constant(surface: &SampledHypersurface, fields: &GeometryFields, r: f64) -> Result<f64> {
    let mut best: Option<f64> = None;
    for (i, s) in surface.samples.iter().enumerate() {
        let rad = norm(&s.x);
        if rad <= r {
            let v = fields.norm_a(i) / (1.0 + rad);
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    best.ok_or_else(|| Error::EmptyRegion(format!("no samples in B_{r}")))
}

/// CSV rows: index, x_0..x_n, H, |A|², residual.
pub fn fields_csv(surface: &SampledHypersurface, fields: &GeometryFields, residual: &[f64]) -> String {
    let d = surface.n + 1;
    let mut out = String::from("index");
    for c in 0..d {
        out.push_str(&format!(",x{c}"));
    }
    out.push_str(",H,normA2,residual\n");
    for (i, s) in surface.samples.iter().enumerate() {
        out.push_str(&i.to_string());
        for v in &s.x {
            out.push_str(&format!(",{v}"));
        }
        out.push_str(&format!(
            ",{},{},{}\n",
            fields.mean_curvature[i], fields.norm_a2[i], residual[i]
        ));
    }
    out
}
