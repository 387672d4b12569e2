use solitonlab::gaussian::entropy;
use solitonlab::geometry::{compute_geometry, shrinker_residual};
use solitonlab::stability::{eigen_identity_residuals, first_eigenvalue, is_delta_stable, simons_identity_residual};
use solitonlab::surfaces::{
    make_catalog, make_graph, CatalogId, GraphPatch, HeightFn, Resolution, SampledHypersurface,
};

use super::common::*;
use super::Outcome;

const FLOOR: f64 = 1e-12;

fn residual(s: &SampledHypersurface) -> f64 {
    shrinker_residual(s, &compute_geometry(s).unwrap()).sup
}

/// Upper cap of the sphere of radius 2 written as a graph over [-1, 1]².
fn sphere_cap_graph(h: f64) -> SampledHypersurface {
    let mut patch = GraphPatch::centered(2, 1.0, h, HeightFn::Linear { slope: vec![0.0, 0.0] }).unwrap();
    patch.heights = (0..patch.node_count())
        .map(|l| {
            let p = patch.params(l);
            (4.0 - p[0] * p[0] - p[1] * p[1]).sqrt()
        })
        .collect();
    patch.height_fn = None;
    make_graph(&patch).unwrap()
}

pub fn c1_shrinker_residual() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in [
        sphere(2, 32),
        sphere(3, 16),
        cylinder(0.1, 6.0),
        plane(0.25, 6.0),
        make_catalog(
            &CatalogId::Hyperplane {
                normal: vec![1.0, 2.0, 2.0],
                offset: 0.0,
            },
            &Resolution::spacing(0.25).with_rtrunc(6.0),
        )
        .unwrap(),
    ] {
        let r = residual(&s);
        check(r <= 1e-10, || format!("{}: residual {r:e}", s.source))?;
        worst = worst.max(r);
    }
    let tilted: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&h| {
            residual(
                &make_catalog(
                    &CatalogId::TiltedPlaneGraph {
                        normal: vec![0.3, -0.2, 1.0],
                    },
                    &Resolution::spacing(h).with_rtrunc(2.0),
                )
                .unwrap(),
            )
        })
        .collect();
    // Fixed inner region, so every level is compared on the same points.
    let cap: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&h| {
            let s = sphere_cap_graph(h);
            let r = shrinker_residual(&s, &compute_geometry(&s).unwrap()).residual;
            s.samples
                .iter()
                .zip(&r)
                .filter(|(p, _)| p.x[0].abs().max(p.x[1].abs()) <= 0.8 + 1e-9)
                .map(|(_, v)| v.abs())
                .fold(0.0, f64::max)
        })
        .collect();
    for (label, errs) in [("tilted plane graph", &tilted), ("sphere-cap graph", &cap)] {
        for w in errs.windows(2) {
            let ok = (w[0] <= FLOOR && w[1] <= FLOOR) || w[0] / w[1] >= 3.5;
            check(ok, || format!("{label}: residuals {errs:?} do not decay at order 2"))?;
        }
    }
    Ok(format!(
        "closed-form sup {worst:.1e}; tilted graph {:.1e}; cap graph orders {:.2?}",
        tilted.iter().cloned().fold(0.0, f64::max),
        orders(&cap, FLOOR)
    ))
}

pub fn c2_entropy() -> Outcome {
    let p = entropy(&plane(0.2, 9.0), Some(1.0)).map_err(|e| e.to_string())?;
    check((p.value - 1.0).abs() <= 1e-5, || format!("plane entropy {}", p.value))?;
    let s = entropy(&sphere(2, 48), None).map_err(|e| e.to_string())?;
    let target = 4.0 / std::f64::consts::E;
    check((s.value - target).abs() <= 1e-3, || {
        format!("sphere entropy {} vs {target}", s.value)
    })?;
    let off = s
        .center
        .iter()
        .map(|c| c * c)
        .sum::<f64>()
        .sqrt()
        .max((s.t0 - 1.0).abs());
    check(off <= 1e-2, || {
        format!("sphere argmax centre {:?}, t0 {}", s.center, s.t0)
    })?;
    Ok(format!("plane {:.7}, sphere {:.6} at t0 {:.5}", p.value, s.value, s.t0))
}

pub fn c3_identities() -> Outcome {
    let mut detail = Vec::new();
    let sph: Vec<_> = [16, 32, 64].iter().map(|&m| sphere(2, m)).collect();
    let cyl: Vec<_> = [0.2, 0.1, 0.05].iter().map(|&h| cylinder(h, 3.0)).collect();
    for (label, family, v) in [
        ("sphere", &sph, vec![0.3, -0.5, 0.8]),
        ("cylinder", &cyl, vec![1.0, 0.0, 0.0]),
    ] {
        let res: Vec<_> = family
            .iter()
            .map(|s| eigen_identity_residuals(s, &v).unwrap())
            .collect();
        let default = &res[1];
        check(default.r_h <= 1e-3 && default.r_v <= 1e-3, || {
            format!("{label}: {default:?}")
        })?;
        let rh: Vec<f64> = res.iter().map(|r| r.r_h).collect();
        let rv: Vec<f64> = res.iter().map(|r| r.r_v).collect();
        for errs in [&rh, &rv] {
            let o = orders(errs, FLOOR);
            check(o.iter().all(|x| *x >= 1.9), || {
                format!("{label}: residuals {errs:?}, orders {o:?}")
            })?;
        }
        detail.push(format!(
            "{label} r_v {:.1e} orders {:.2?}",
            default.r_v,
            orders(&rv, FLOOR)
        ));
    }
    for s in [&sph[1], &cyl[1], &plane(0.25, 4.0)] {
        let r = simons_identity_residual(s).unwrap();
        check(r <= 1e-8, || format!("{}: Simons residual {r:e}", s.source))?;
    }
    Ok(detail.join("; "))
}

pub fn c4_spectra() -> Outcome {
    let p = plane(0.3, 8.5);
    let mut lams = Vec::new();
    for r in [4.0, 6.0, 8.0] {
        let l = first_eigenvalue(&p, r, 1).map_err(|e| e.to_string())?.lambda1();
        check(l >= -0.5 - 1e-3, || format!("plane B_{r}: lambda1 {l}"))?;
        lams.push(l);
    }
    check((-0.5..=-0.45).contains(&lams[2]), || {
        format!("plane B_8: lambda1 {}", lams[2])
    })?;
    let s = sphere(2, 32);
    let spec = first_eigenvalue(&s, 10.0, 4).map_err(|e| e.to_string())?;
    let ev = &spec.eigenvalues;
    check((ev[0] + 1.0).abs() <= 1e-3, || format!("sphere lambda1 {}", ev[0]))?;
    check(ev[1..4].iter().all(|l| (l + 0.5).abs() <= 1e-3), || {
        format!("sphere eigenvalues {ev:?}")
    })?;
    let f = spec.field_on(&s, 0);
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    let spread = f.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / mean.abs();
    check(spread <= 1e-6, || {
        format!("sphere ground state not constant: relative spread {spread:e}")
    })?;
    let c = cylinder(0.4, 10.5);
    let half = is_delta_stable(&c, 10.0, 0.5, 1e-3).map_err(|e| e.to_string())?;
    let one = is_delta_stable(&c, 10.0, 1.0, 1e-3).map_err(|e| e.to_string())?;
    check(!half.verdict && one.verdict, || {
        format!("cylinder verdicts {half:?} {one:?}")
    })?;
    Ok(format!(
        "plane R=4,6,8 {:.4?}; sphere {:.5?}; cylinder lambda1 {:.5}",
        lams, ev, half.lambda1
    ))
}
