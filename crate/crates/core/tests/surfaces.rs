use std::f64::consts::PI;

use proptest::prelude::*;
use solitonlab::geometry::{compute_geometry, shrinker_residual};
use solitonlab::surfaces::*;

fn sphere(nt: usize) -> SampledHypersurface {
    make_catalog(&CatalogId::Sphere { n: 2 }, &Resolution::polar(nt)).unwrap()
}

fn e3_plane(h: f64, r: f64) -> SampledHypersurface {
    make_catalog(
        &CatalogId::Hyperplane {
            normal: vec![0.0, 0.0, 1.0],
            offset: 0.0,
        },
        &Resolution::spacing(h).with_rtrunc(r),
    )
    .unwrap()
}

#[test]
fn sphere_positions_lie_on_radius_two() {
    let s = sphere(32);
    assert!(s
        .samples
        .iter()
        .all(|p| (p.x.iter().map(|v| v * v).sum::<f64>().sqrt() - 2.0).abs() < 1e-14));
    assert!(s
        .samples
        .iter()
        .all(|p| (p.nu.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs() < 1e-12));
    assert!(s.samples.iter().all(|p| p.dmu > 0.0));
}

#[test]
fn plane_is_flat() {
    let s = e3_plane(0.25, 8.0);
    assert!(s.samples.iter().all(|p| p.x[2] == 0.0));
    let g = compute_geometry(&s).unwrap();
    assert!(g.norm_a2.iter().all(|v| *v == 0.0));
}

#[test]
fn cylinder_area_in_ball() {
    let h = 0.05;
    let s = make_catalog(
        &CatalogId::Cylinder { k: 1, n: 2 },
        &Resolution::spacing(h).with_rtrunc(6.0),
    )
    .unwrap();
    let girth = 2.0 * PI * 2f64.sqrt();
    // Kept rows: |z| <= sqrt(36 - 2) on the axial lattice.
    let rows = s
        .samples
        .iter()
        .map(|p| (p.x[2] / h).round() as i64)
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    let total: f64 = s.samples.iter().map(|p| p.dmu).sum();
    assert!((total - girth * rows as f64 * h).abs() < 1e-9 * total);
    let exact = girth * 2.0 * 34f64.sqrt();
    // Sample beyond the ball so that partial rim cells are present.
    let wide = make_catalog(
        &CatalogId::Cylinder { k: 1, n: 2 },
        &Resolution::spacing(h).with_rtrunc(7.0),
    )
    .unwrap();
    let v = BallQuery::new(&wide, &[0.0, 0.0, 0.0], 6.0).unwrap().volume(&wide);
    assert!((v - exact).abs() < 1e-3 * exact, "{v} vs {exact}");
}

#[test]
fn graph_of_zero_is_a_shrinker() {
    let patch = GraphPatch::centered(2, 4.0, 0.25, HeightFn::Linear { slope: vec![0.0, 0.0] }).unwrap();
    let s = make_graph(&patch).unwrap();
    assert!(shrinker_residual(&s, &compute_geometry(&s).unwrap()).sup <= 1e-10);
}

#[test]
fn saddle_graph_is_graphical() {
    let patch = GraphPatch::centered(2, 2.0, 0.125, HeightFn::Saddle { c: 0.1 }).unwrap();
    let s = make_graph(&patch).unwrap();
    assert!(s.samples.iter().all(|p| p.nu[2] > 0.0));
}

#[test]
fn graph_boundary_is_outer_ring() {
    let patch = GraphPatch::centered(2, 1.0, 0.25, HeightFn::Saddle { c: 0.1 }).unwrap();
    let s = make_graph(&patch).unwrap();
    for p in &s.samples {
        let rim = p.x[0].abs().max(p.x[1].abs()) > 1.0 - 1e-9;
        assert_eq!(p.boundary, rim);
    }
}

#[test]
fn tilted_graph_residual_under_refinement() {
    let patch = GraphPatch::centered(2, 2.0, 0.2, HeightFn::Linear { slope: vec![0.3, 0.0] }).unwrap();
    let s = make_graph(&patch).unwrap();
    let fine = refine(&s, 2).unwrap();
    assert_eq!(fine.len(), 41 * 41);
    let r0 = shrinker_residual(&s, &compute_geometry(&s).unwrap()).sup;
    let r1 = shrinker_residual(&fine, &compute_geometry(&fine).unwrap()).sup;
    // Linear heights are differenced exactly, leaving roundoff only.
    assert!(r0 <= 1e-12 && r1 <= 1e-12, "{r0} {r1}");
}

#[test]
fn refine_sphere_doubles_resolution() {
    let s = sphere(16);
    let f = refine(&s, 2).unwrap();
    assert_eq!(f.len(), sphere(32).len());
    assert!(f
        .samples
        .iter()
        .all(|p| (p.x.iter().map(|v| v * v).sum::<f64>().sqrt() - 2.0).abs() < 1e-13));
    assert!(refine(&s, 1).is_err());
}

#[test]
fn refine_uses_interpolation_without_height_function() {
    let mut patch = GraphPatch::centered(2, 1.0, 0.1, HeightFn::Saddle { c: 0.1 }).unwrap();
    patch.height_fn = None;
    let s = make_graph(&patch).unwrap();
    let f = refine(&s, 2).unwrap();
    for p in &f.samples {
        let exact = 0.1 * (p.x[0] * p.x[0] - p.x[1] * p.x[1]);
        assert!((p.x[2] - exact).abs() < 1e-12);
    }
}

#[test]
fn truncate_examples() {
    let s = sphere(16);
    assert_eq!(truncate(&s, 3.0).unwrap().len(), s.len());
    assert!(matches!(truncate(&s, 1.0), Err(solitonlab::Error::EmptyRegion(_))));
    let p = truncate(&e3_plane(0.25, 4.0), 2.0).unwrap();
    assert!(p
        .samples
        .iter()
        .all(|q| q.x.iter().map(|v| v * v).sum::<f64>() <= 4.0 + 1e-12));
}

#[test]
fn json_round_trip_and_rejections() {
    let s = sphere(8);
    let bytes = to_json(&s).unwrap();
    assert_eq!(from_json(&bytes).unwrap(), s);
    let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    v["samples"][3]["nu"] = serde_json::json!([0.0, 0.0, 0.0]);
    assert!(from_json(&serde_json::to_vec(&v).unwrap()).is_err());
    let mut w: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    w["n"] = serde_json::json!(1);
    assert!(from_json(&serde_json::to_vec(&w).unwrap()).is_err());
}

#[test]
fn missing_truncation_and_bad_cylinder_rejected() {
    assert!(make_catalog(&CatalogId::Cylinder { k: 1, n: 2 }, &Resolution::spacing(0.1)).is_err());
    assert!(make_catalog(
        &CatalogId::Cylinder { k: 2, n: 2 },
        &Resolution::spacing(0.1).with_rtrunc(3.0)
    )
    .is_err());
    assert!(make_catalog(&CatalogId::Sphere { n: 1 }, &Resolution::polar(16)).is_err());
}

#[test]
fn catalog_members_satisfy_their_equations() {
    let s3 = make_catalog(&CatalogId::Sphere { n: 3 }, &Resolution::polar(8)).unwrap();
    assert!(s3
        .samples
        .iter()
        .all(|p| (p.x.iter().map(|v| v * v).sum::<f64>() - 6.0).abs() < 1e-12));
    let c = make_catalog(
        &CatalogId::Cylinder { k: 2, n: 3 },
        &Resolution::polar(8).with_rtrunc(3.0),
    )
    .unwrap();
    assert!(c
        .samples
        .iter()
        .all(|p| (p.x[0] * p.x[0] + p.x[1] * p.x[1] + p.x[2] * p.x[2] - 4.0).abs() < 1e-12));
    let t = make_catalog(
        &CatalogId::Hyperplane {
            normal: vec![1.0, 2.0, 2.0],
            offset: 0.5,
        },
        &Resolution::spacing(0.3).with_rtrunc(3.0),
    )
    .unwrap();
    assert!(t
        .samples
        .iter()
        .all(|p| ((p.x[0] + 2.0 * p.x[1] + 2.0 * p.x[2]) / 3.0 - 0.5).abs() < 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn truncate_composes(r1 in 0.5f64..5.0, r2 in 0.5f64..5.0) {
        let s = e3_plane(0.3, 5.0);
        let a = truncate(&truncate(&s, r1).unwrap(), r2).unwrap();
        let b = truncate(&s, r1.min(r2)).unwrap();
        let key = |t: &SampledHypersurface| t.samples.iter().map(|p| p.x.clone()).collect::<Vec<_>>();
        prop_assert_eq!(key(&a), key(&b));
    }

    #[test]
    fn json_round_trip_graph(c in -0.3f64..0.3, h in 0.1f64..0.3) {
        let patch = GraphPatch::centered(2, 1.0, h, HeightFn::Saddle { c }).unwrap();
        let s = make_graph(&patch).unwrap();
        prop_assert_eq!(from_json(&to_json(&s).unwrap()).unwrap(), s);
    }

    #[test]
    fn graph_patches_are_graphical(c in -1.0f64..1.0, a in -0.5f64..0.5) {
        let patch = GraphPatch::centered(2, 1.0, 0.1, HeightFn::SinProduct { amplitude: a + c * 0.1 }).unwrap();
        if let Ok(s) = make_graph(&patch) {
            prop_assert!(s.samples.iter().all(|p| p.nu[2] > 0.0));
        }
    }
}
