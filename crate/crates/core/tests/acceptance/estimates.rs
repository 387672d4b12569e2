use std::f64::consts::{E, PI, SQRT_2};

use solitonlab::estimates::{
    choi_schoen, integral_curvature_decay, log_cutoff_energy, mean_value_monotonicity, random_annulus_cutoffs,
    scale_invariant_energy, ssy_inequality, theta, EstimateReport,
};
use solitonlab::surfaces::{
    make_catalog, make_graph, CatalogId, GraphPatch, HeightFn, Resolution, SampledHypersurface,
};

use super::common::*;
use super::Outcome;

fn show(r: &EstimateReport) -> String {
    format!(
        "{} lhs {:.4e} rhs {:.4e} pass {} ({})",
        r.name, r.lhs, r.rhs, r.pass, r.hypothesis_status
    )
}

fn near_plane_tip(s: &SampledHypersurface) -> Vec<f64> {
    s.samples[s.nearest_sample(&[0.0, 0.0, 0.0]).unwrap()].x.clone()
}

pub fn c5_prop31() -> Outcome {
    let mut lines = Vec::new();
    let surfaces = [(plane(0.3, 8.5), 1.0), (near_plane(0.02, 9.0), 1.05)];
    for (s, lambda0) in &surfaces {
        for r in [6.0, 8.0] {
            let rep = integral_curvature_decay(s, r, *lambda0, 1.0).map_err(|e| e.to_string())?;
            check(rep.pass && rep.verify(), || {
                format!("{} R={r}: {}", s.source, show(&rep))
            })?;
            lines.push(format!("{} R={r} lhs {:.2e}", s.source, rep.lhs));
        }
    }
    let c = cylinder(0.4, 10.5);
    let rep = integral_curvature_decay(&c, 10.0, 1.48, 1.0).map_err(|e| e.to_string())?;
    check(
        !rep.pass && !rep.hypothesis_holds && rep.hypothesis_status.starts_with("not 1/2-stable"),
        || format!("cylinder: {}", show(&rep)),
    )?;
    lines.push(format!("cylinder R=10 FAIL as expected: {}", rep.hypothesis_status));
    Ok(lines.join("; "))
}

pub fn c6_mean_value() -> Outcome {
    let np = near_plane(0.01, 9.0);
    let cases = [
        (sphere(2, 64), vec![2.0, 0.0, 0.0]),
        (cylinder(0.05, 6.0), vec![SQRT_2, 0.0, 0.0]),
        (near_plane_tip(&np), np.clone()).into_case(),
    ];
    let mut lines = Vec::new();
    for (s, x0) in &cases {
        let rim = s.coverage.radius_about(x0);
        let s_max = rim.min(1.0);
        let trace = mean_value_monotonicity(s, x0, 4.0, s_max, 16).map_err(|e| e.to_string())?;
        check(trace.monotone && trace.radii.len() == 16, || {
            format!("{}: worst drop {:e}", s.source, trace.worst_drop)
        })?;
        lines.push(format!("{} worst drop {:.1e}", s.source, trace.worst_drop));
    }
    Ok(lines.join("; "))
}

trait IntoCase {
    fn into_case(self) -> (SampledHypersurface, Vec<f64>);
}

impl IntoCase for (Vec<f64>, SampledHypersurface) {
    fn into_case(self) -> (SampledHypersurface, Vec<f64>) {
        (self.1, self.0)
    }
}

pub fn c7_choi_schoen() -> Outcome {
    let patch = GraphPatch::centered(2, 1.5, 0.02, HeightFn::Bilinear { c: 0.01 }).unwrap();
    let flat = make_graph(&patch).unwrap();
    let rep = choi_schoen(&flat, &[0.0, 0.0, 0.0], 1.0, None).map_err(|e| e.to_string())?;
    check(rep.pass && rep.hypothesis_holds, || {
        format!("near-flat patch: {}", show(&rep))
    })?;
    let s = sphere(2, 64);
    let sph = choi_schoen(&s, &[2.0, 0.0, 0.0], 0.5, None).map_err(|e| e.to_string())?;
    check(!sph.hypothesis_holds && !sph.pass, || format!("sphere: {}", show(&sph)))?;
    Ok(format!(
        "patch energy {:.2e}; sphere: {}",
        rep.measurements["energy"].as_f64().unwrap(),
        sph.hypothesis_status
    ))
}

pub fn c8_ssy() -> Outcome {
    let np = near_plane(0.02, 7.0);
    let pl = plane(0.25, 6.5);
    let mut worst: f64 = 0.0;
    for q in [0.0, 0.5] {
        for cutoff in random_annulus_cutoffs(3, 6.0, 20, 7).unwrap() {
            let rep = ssy_inequality(&np, &cutoff, q, None, 6.0).map_err(|e| e.to_string())?;
            check(rep.pass, || format!("near-plane q={q}: {}", show(&rep)))?;
            worst = worst.max(rep.lhs / rep.rhs);
        }
        for cutoff in random_annulus_cutoffs(3, 6.0, 5, 11).unwrap() {
            let rep = ssy_inequality(&pl, &cutoff, q, None, 6.0).map_err(|e| e.to_string())?;
            check(rep.pass && rep.lhs == 0.0, || format!("plane q={q}: {}", show(&rep)))?;
        }
    }
    let c = &random_annulus_cutoffs(3, 6.0, 1, 1).unwrap()[0];
    let rejected = ssy_inequality(&np, c, 0.9, None, 6.0);
    check(rejected.is_err(), || "D <= 0 (q = 0.9, n = 2) was not rejected".into())?;
    Ok(format!(
        "40 near-plane cutoffs, worst lhs/rhs {worst:.3e}; D <= 0 rejected"
    ))
}

pub fn c9_lemma43() -> Outcome {
    let s = sphere(2, 128);
    let c = cylinder(0.02, 2.0);
    let mut lines = Vec::new();
    for (surf, x0, lambda0) in [
        (&s, vec![2.0, 0.0, 0.0], 4.0 / E),
        (&c, vec![SQRT_2, 0.0, 0.0], (2.0 * PI / E).sqrt()),
    ] {
        let r = 0.5 * theta(x0.iter().map(|v| v * v).sum::<f64>().sqrt());
        for p in [2.0, 3.0, 4.0] {
            let rep = scale_invariant_energy(surf, &x0, r, p, lambda0).map_err(|e| e.to_string())?;
            check(rep.pass, || format!("{} p={p}: {}", surf.source, show(&rep)))?;
            lines.push(format!("{} p={p} lhs {:.3e}", surf.source, rep.lhs));
        }
    }
    Ok(lines.join("; "))
}

/// Finely sampled patches around the log-cutoff centre, enough to resolve
/// the innermost dyadic ring at k = 4.
fn log_patches() -> Vec<(SampledHypersurface, Vec<f64>, f64)> {
    let cap = make_catalog(
        &CatalogId::Sphere { n: 2 },
        &Resolution::polar(1600).with_window(vec![Some([0.0, 0.08]), None]),
    )
    .unwrap();
    let girth = make_catalog(
        &CatalogId::Cylinder { k: 1, n: 2 },
        &Resolution::spacing(0.004)
            .with_rtrunc(2.0)
            .with_window(vec![Some([-0.12, 0.12]), Some([-0.15, 0.15])]),
    )
    .unwrap();
    vec![
        (cap, vec![2.0, 0.0, 0.0], 4.0 / E),
        (girth, vec![SQRT_2, 0.0, 0.0], (2.0 * PI / E).sqrt()),
    ]
}

pub fn c10_log_cutoff() -> Outcome {
    let mut lines = Vec::new();
    for (s, p, lambda0) in log_patches() {
        let r0 = 0.125;
        for k in [2u32, 3, 4] {
            let rep = log_cutoff_energy(&s, &p, r0, k, lambda0).map_err(|e| format!("{} k={k}: {e}", s.source))?;
            let counts: Vec<u64> = serde_json::from_value(rep.measurements["ring_counts"].clone()).unwrap();
            check(counts.iter().all(|c| *c >= 4), || format!("ring counts {counts:?}"))?;
            check(rep.pass, || format!("{} k={k}: {}", s.source, show(&rep)))?;
            lines.push(format!("{} k={k} lhs {:.3e} rhs {:.3e}", s.source, rep.lhs, rep.rhs));
        }
    }
    Ok(lines.join("; "))
}
