use std::f64::consts::{E, SQRT_2};

use solitonlab::estimates::{
    choi_schoen, integral_curvature_decay, log_cutoff_energy, random_annulus_cutoffs, scale_invariant_energy,
    ssy_inequality, volume_growth_certificate, EstimateReport,
};
use solitonlab::geometry::compute_geometry;
use solitonlab::stability::{graphical_stability_certificate, SpectrumReport};
use solitonlab::surfaces::{
    make_catalog, make_graph, CatalogId, GraphPatch, HeightFn, Resolution, SampledHypersurface,
};
use solitonlab::translators::{
    bowl_solve, translator_first_eigenvalue, translator_residual, translator_simons_residual,
};

use super::common::*;
use super::Outcome;

pub fn c11_translators() -> Outcome {
    let mut lines = Vec::new();
    for n in [2usize, 3] {
        let bowl = bowl_solve(n, 6.0, 0.01).map_err(|e| e.to_string())?;
        let res = translator_residual(&bowl.surface).map_err(|e| e.to_string())?.sup;
        check(res <= 1e-6, || format!("bowl n={n}: residual {res:e}"))?;
        let tip = compute_geometry(&bowl.surface).unwrap().norm_a2[0];
        check((tip - 1.0 / n as f64).abs() <= 1e-4, || {
            format!("bowl n={n}: tip |A|^2 {tip}")
        })?;
        lines.push(format!("n={n} residual {res:.1e} tip {tip:.6}"));
    }
    let mut eig = Vec::new();
    for r in [2.0, 4.0, 6.0] {
        let bowl = bowl_solve(2, r, 0.01).map_err(|e| e.to_string())?;
        let l = translator_first_eigenvalue(&bowl.surface, None, 1, 1.0)
            .map_err(|e| e.to_string())?
            .lambda1();
        check(l >= -1e-3, || format!("bowl patch r <= {r}: lambda1 {l}"))?;
        eig.push(l);
    }
    lines.push(format!("lambda1 on r<=2,4,6 {eig:.4?}"));
    let simons: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&h| translator_simons_residual(&bowl_solve(2, 4.0, h).unwrap().surface, Some((0.5, 3.0))).unwrap())
        .collect();
    let o = orders(&simons, 1e-12);
    check(o.iter().all(|v| *v >= 1.9), || {
        format!("translator Simons residuals {simons:?}, orders {o:?}")
    })?;
    lines.push(format!("Simons residual orders {o:.2?}"));
    Ok(lines.join("; "))
}

pub fn c12_volume_growth() -> Outcome {
    let cases = [
        (plane(0.05, 5.0), vec![0.0, 0.0, 0.0], 1.0),
        (sphere(2, 128), vec![2.0, 0.0, 0.0], 4.0 / E),
        (cylinder(0.05, 6.0), vec![SQRT_2, 0.0, 0.0], 1.5),
    ];
    let mut worst: f64 = 0.0;
    for (s, p, lambda0) in &cases {
        for r in [0.5, 1.0, 2.0, 4.0] {
            let rep = volume_growth_certificate(s, p, r, *lambda0).map_err(|e| e.to_string())?;
            check(rep.pass && rep.verify(), || {
                format!("{} r={r}: lhs {} rhs {}", s.source, rep.lhs, rep.rhs)
            })?;
            worst = worst.max(rep.lhs / rep.rhs);
        }
    }
    Ok(format!("12 certificates, largest lhs/rhs {worst:.3}"))
}

struct Levels {
    sphere: SampledHypersurface,
    cylinder: SampledHypersurface,
    near_plane: SampledHypersurface,
    flat_patch: SampledHypersurface,
}

fn levels(f: usize) -> Levels {
    let f64f = f as f64;
    let patch = GraphPatch::centered(2, 1.5, 0.04 / f64f, HeightFn::Bilinear { c: 0.01 }).unwrap();
    Levels {
        sphere: sphere(2, 32 * f),
        cylinder: cylinder(0.1 / f64f, 6.0),
        near_plane: near_plane(0.02 / f64f, 9.0),
        flat_patch: make_graph(&patch).unwrap(),
    }
}

fn certificates(l: &Levels) -> Vec<EstimateReport> {
    let e = |r: solitonlab::Result<EstimateReport>| r.unwrap();
    let sph = [2.0, 0.0, 0.0];
    let cyl = [SQRT_2, 0.0, 0.0];
    let cutoff = &random_annulus_cutoffs(3, 6.0, 1, 3).unwrap()[0];
    vec![
        e(integral_curvature_decay(&l.near_plane, 8.0, 1.05, 1.0)),
        e(integral_curvature_decay(&l.cylinder, 5.0, 1.52, 1.0)),
        e(choi_schoen(&l.flat_patch, &[0.0, 0.0, 0.0], 1.0, None)),
        e(ssy_inequality(&l.near_plane, cutoff, 0.5, None, 6.0)),
        e(scale_invariant_energy(&l.sphere, &sph, 0.25, 3.0, 4.0 / E)),
        e(scale_invariant_energy(&l.cylinder, &cyl, 0.3, 2.0, 1.52)),
        e(volume_growth_certificate(&l.sphere, &sph, 1.0, 4.0 / E)),
        e(volume_growth_certificate(&l.cylinder, &cyl, 2.0, 1.52)),
    ]
}

fn report_bytes() -> Vec<String> {
    let l = levels(1);
    let mut out: Vec<String> = certificates(&l).iter().map(|r| r.to_json().unwrap()).collect();
    let p = plane(0.3, 6.5);
    let g = graphical_stability_certificate(&p, &[0.0, 0.0, 1.0], 6.0, 10, 42).unwrap();
    out.push(g.to_json().unwrap());
    let spec = solitonlab::stability::first_eigenvalue(&l.sphere, 10.0, 4).unwrap();
    out.push(serde_json::to_string(&SpectrumReport::new(&spec, Some(0.5), 1e-3, Some(42))).unwrap());
    let np = &l.near_plane;
    for c in random_annulus_cutoffs(3, 6.0, 3, 42).unwrap() {
        out.push(ssy_inequality(np, &c, 0.0, None, 6.0).unwrap().to_json().unwrap());
    }
    out
}

pub fn c13_reproducibility() -> Outcome {
    let a = report_bytes();
    let b = report_bytes();
    check(a == b, || "two identical runs produced different report bytes".into())?;
    let coarse = certificates(&levels(1));
    let fine = certificates(&levels(2));
    let mut worst: f64 = 0.0;
    for (c, f) in coarse.iter().zip(&fine) {
        let change = if c.lhs == f.lhs {
            0.0
        } else {
            (c.lhs - f.lhs).abs() / c.lhs.abs().max(f.lhs.abs())
        };
        check(change <= 0.05, || {
            format!("{}: lhs {} -> {} ({:.1}%)", c.name, c.lhs, f.lhs, 100.0 * change)
        })?;
        worst = worst.max(change);
    }
    // The log-cutoff certificate needs its own fine patch; compare two levels of it too.
    let cap = |m: usize| {
        make_catalog(
            &CatalogId::Sphere { n: 2 },
            &Resolution::polar(m).with_window(vec![Some([0.0, 0.08]), None]),
        )
        .unwrap()
    };
    let lc: Vec<f64> = [1600, 3200]
        .iter()
        .map(|&m| {
            log_cutoff_energy(&cap(m), &[2.0, 0.0, 0.0], 0.125, 3, 4.0 / E)
                .unwrap()
                .lhs
        })
        .collect();
    let change = (lc[0] - lc[1]).abs() / lc[1];
    check(change <= 0.05, || format!("logcutoff lhs {lc:?}"))?;
    worst = worst.max(change);
    Ok(format!(
        "{} reports byte-identical; largest lhs change under 2x refinement {:.2}%",
        a.len(),
        100.0 * worst
    ))
}
