//! Radial ODE profiles: the bowl translator and near-plane rotational
//! shrinkers, with a classical fourth-order Runge-Kutta integrator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surfaces::{Chart, Coverage, Origin, ProfileChart, ProfileOrientation, Sample, SampledHypersurface, Shape};
use crate::vecops::unit_sphere_area;

/// Heights and slopes of a rotational graph x_(n+1) = u(|p|) at r_i = i*step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub n: usize,
    pub step: f64,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
}

type Rhs<'a> = dyn Fn(f64, [f64; 2]) -> [f64; 2] + 'a;

fn rk4(f: &Rhs, r: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let add = |a: [f64; 2], b: [f64; 2], s: f64| [a[0] + s * b[0], a[1] + s * b[1]];
    let k1 = f(r, y);
    let k2 = f(r + h / 2.0, add(y, k1, h / 2.0));
    let k3 = f(r + h / 2.0, add(y, k2, h / 2.0));
    let k4 = f(r + h, add(y, k3, h));
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Series u = c0 + c2 r^2 + c4 r^4 on the first three nodes, then RK4.
fn integrate(n: usize, r_max: f64, step: f64, series: [f64; 3], f: &Rhs) -> Result<RadialProfile> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    if !(r_max > 0.0) || !(step > 0.0) {
        return Err(Error::InvalidParameter("r_max and step must be positive".into()));
    }
    if step > r_max / 100.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "step {step} exceeds r_max/100 = {}",
            r_max / 100.0
        )));
    }
    let count = (r_max / step + 1e-9).floor() as usize;
    let [c0, c2, c4] = series;
    let mut p = RadialProfile {
        n,
        step,
        r: vec![],
        u: vec![],
        du: vec![],
    };
    for i in 0..=count.min(2) {
        let r = i as f64 * step;
        p.r.push(r);
        p.u.push(c0 + c2 * r * r + c4 * r.powi(4));
        p.du.push(2.0 * c2 * r + 4.0 * c4 * r.powi(3));
    }
    let mut y = [p.u[2], p.du[2]];
    for i in 3..=count {
        let r0 = (i - 1) as f64 * step;
        y = rk4(f, r0, y, step);
        if !y[0].is_finite() || !y[1].is_finite() || y[1].abs() > 1e8 {
            return Err(Error::Integration(format!(
                "profile slope blew up near r = {r0}; reduce the step"
            )));
        }
        p.r.push(i as f64 * step);
        p.u.push(y[0]);
        p.du.push(y[1]);
    }
    Ok(p)
}

/// Bowl translator: u'' = (1 + u'^2)(1 - (n-1) u'/r), u(0) = u'(0) = 0.
pub fn bowl_profile(n: usize, r_max: f64, step: f64) -> Result<RadialProfile> {
    let nf = n as f64;
    let c2 = 1.0 / (2.0 * nf);
    let c4 = 1.0 / (4.0 * nf.powi(3) * (nf + 2.0));
    let f = move |r: f64, y: [f64; 2]| [y[1], (1.0 + y[1] * y[1]) * (1.0 - (nf - 1.0) * y[1] / r)];
    integrate(n, r_max, step, [0.0, c2, c4], &f)
}

/// Rotational shrinker graph with tip height `a`:
/// u'' = -(1 + u'^2)((n-1) u'/r + (u - r u')/2).
pub fn shrinker_profile(n: usize, r_max: f64, step: f64, a: f64) -> Result<RadialProfile> {
    let nf = n as f64;
    let c2 = -a / (4.0 * nf);
    let c4 = (c2 / 2.0 + 8.0 * c2.powi(3)) / (4.0 * (nf + 2.0));
    let f = move |r: f64, y: [f64; 2]| {
        [
            y[1],
            -(1.0 + y[1] * y[1]) * ((nf - 1.0) * y[1] / r + (y[0] - r * y[1]) / 2.0),
        ]
    };
    integrate(n, r_max, step, [a, c2, c4], &f)
}

/// Shoot on the tip height so that the shrinker profile ends at
/// `edge_height` at r_max (secant iteration).
pub fn near_plane_shrinker(n: usize, r_max: f64, step: f64, edge_height: f64) -> Result<RadialProfile> {
    if !edge_height.is_finite() || edge_height == 0.0 {
        return Err(Error::InvalidParameter("edge height must be finite and nonzero".into()));
    }
    let end = |a: f64| -> Result<f64> { Ok(*shrinker_profile(n, r_max, step, a)?.u.last().unwrap() - edge_height) };
    let mut a0 = 0.0;
    let mut g0 = end(a0)?;
    let mut a1 = 1e-12 * edge_height.signum();
    let mut g1 = end(a1)?;
    for _ in 0..100 {
        if g1.abs() <= 1e-12 * edge_height.abs().max(1.0) {
            return shrinker_profile(n, r_max, step, a1);
        }
        let mut a2 = a1 - g1 * (a1 - a0) / (g1 - g0);
        if !a2.is_finite() {
            break;
        }
        // Large jumps can leave the near-linear regime; damp them.
        if a2.abs() > 1e3 * a1.abs().max(1e-12) {
            a2 = a1 * 1e3;
        }
        let g2 = match end(a2) {
            Ok(g) => g,
            Err(_) => {
                a1 = 0.5 * (a1 + a0);
                g1 = end(a1)?;
                continue;
            }
        };
        a0 = a1;
        g0 = g1;
        a1 = a2;
        g1 = g2;
    }
    Err(Error::Integration(
        "shooting for the near-plane shrinker did not converge".into(),
    ))
}

/// Lift a radial profile to a sampled rotational hypersurface; each sample
/// stands for its S^(n-1) orbit of radius r.
pub fn profile_surface(n: usize, prof: &RadialProfile, orientation: ProfileOrientation) -> SampledHypersurface {
    let h = prof.step;
    let area = unit_sphere_area(n - 1);
    let nf = n as f64;
    let mut samples = Vec::with_capacity(prof.r.len());
    for i in 0..prof.r.len() {
        let (r, u, du) = (prof.r[i], prof.u[i], prof.du[i]);
        let w = (1.0 + du * du).sqrt();
        let mut x = vec![0.0; n + 1];
        x[0] = r;
        x[n] = u;
        let mut nu = vec![0.0; n + 1];
        let sign = match orientation {
            ProfileOrientation::Up => 1.0,
            ProfileOrientation::Down => -1.0,
        };
        nu[0] = -sign * du / w;
        nu[n] = sign / w;
        let lo = (r - h / 2.0).max(0.0);
        let hi = r + h / 2.0;
        let dmu = area * w * (hi.powi(n as i32) - lo.powi(n as i32)) / nf;
        samples.push(Sample {
            x,
            nu,
            dmu,
            boundary: false,
        });
    }
    let r_max = *prof.r.last().unwrap();
    let mut s = SampledHypersurface {
        n,
        source: "rotational profile".into(),
        origin: Origin::Custom,
        shape: Shape::Profile,
        samples,
        chart: Chart::Profile(ProfileChart {
            spacing: h,
            u: prof.u.clone(),
            du: prof.du.clone(),
            orientation,
            nodes: (0..prof.r.len() as u64).collect(),
        }),
        coverage: Coverage::ball(vec![0.0; n + 1], r_max),
        truncation: None,
    };
    s.refresh_boundary();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bowl_series_matches_curvature_at_tip() {
        for n in 2..=4 {
            let p = bowl_profile(n, 2.0, 0.01).unwrap();
            let u2 = 2.0 * p.u[1] / (p.r[1] * p.r[1]);
            assert!((u2 - 1.0 / n as f64).abs() < 1e-5);
        }
    }

    #[test]
    fn shooting_hits_edge_height() {
        let p = near_plane_shrinker(2, 5.0, 0.01, -0.2).unwrap();
        assert!((p.u.last().unwrap() + 0.2).abs() < 1e-10);
        assert!(p.u[0].abs() < 0.1);
    }

    #[test]
    fn step_precondition() {
        assert!(bowl_profile(2, 10.0, 10.0).is_err());
    }
}
