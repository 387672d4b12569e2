use std::f64::consts::{E, PI, SQRT_2};

use proptest::prelude::*;
use solitonlab::estimates::constants::*;
use solitonlab::estimates::*;
use solitonlab::surfaces::*;

fn sphere(nt: usize) -> SampledHypersurface {
    make_catalog(&CatalogId::Sphere { n: 2 }, &Resolution::polar(nt)).unwrap()
}

fn plane(h: f64, r: f64) -> SampledHypersurface {
    make_catalog(
        &CatalogId::Hyperplane {
            normal: vec![0.0, 0.0, 1.0],
            offset: 0.0,
        },
        &Resolution::spacing(h).with_rtrunc(r),
    )
    .unwrap()
}

fn cylinder(h: f64, r: f64) -> SampledHypersurface {
    make_catalog(
        &CatalogId::Cylinder { k: 1, n: 2 },
        &Resolution::spacing(h).with_rtrunc(r),
    )
    .unwrap()
}

fn near_plane(step: f64, r: f64) -> SampledHypersurface {
    make_catalog(
        &CatalogId::NearPlaneShrinker {
            n: 2,
            edge_height: 0.05,
        },
        &Resolution::spacing(step).with_rtrunc(r),
    )
    .unwrap()
}

const ORIGIN: [f64; 3] = [0.0, 0.0, 0.0];

#[test]
fn decay_examples() {
    let rep = integral_curvature_decay(&plane(0.4, 6.5), 6.0, 1.0, 0.5).unwrap();
    assert!(rep.pass && rep.lhs == 0.0);
    let c = rep.constants["C"].value;
    assert!((c - 16.0 * (-1.0f64 / 16.0).exp() * 4.0 * PI).abs() < 1e-12 * c);
    assert!((rep.rhs - c * 36.0 * (-1.5f64).exp()).abs() < 1e-12 * rep.rhs);
    let cyl = integral_curvature_decay(&cylinder(0.4, 10.5), 10.0, 4.0 / E, 0.5).unwrap();
    assert!(!cyl.pass && !cyl.hypothesis_holds);
    assert!(cyl.hypothesis_status.starts_with("not 1/2-stable"));
    let np = integral_curvature_decay(&near_plane(0.02, 9.0), 8.0, 1.05, 0.5).unwrap();
    assert!(np.pass && np.hypothesis_holds);
    assert!(integral_curvature_decay(&plane(0.4, 6.5), 1.0, 1.0, 0.25).is_err());
}

#[test]
fn simons_inequality_examples() {
    for s in [sphere(16), plane(0.5, 3.0), cylinder(0.2, 4.0)] {
        let rep = simons_inequality_check(&s, 1e-8).unwrap();
        assert!(rep.pass, "{}: {}", s.source, rep.lhs);
    }
}

#[test]
fn mean_value_examples() {
    let p = plane(0.1, 6.0);
    let t = mean_value_monotonicity(&p, &ORIGIN, 4.0, 1.0, 8).unwrap();
    assert!(t.monotone && t.g.iter().all(|g| *g == 0.0));
    // A chordal ball on the radius-2 sphere has area πs², so g ≡ π/2.
    let s = sphere(96);
    let t = mean_value_monotonicity(&s, &[2.0, 0.0, 0.0], 4.0, 0.5, 8).unwrap();
    assert!(t.monotone);
    assert!(t.g.iter().all(|g| (g - PI / 2.0).abs() < 2e-3 * PI), "{:?}", t.g);
    assert!(t.radii.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(t.to_csv().lines().count(), 9);
    let c = cylinder(0.05, 6.0);
    assert!(
        mean_value_monotonicity(&c, &[SQRT_2, 0.0, 0.0], 4.0, 0.5, 16)
            .unwrap()
            .monotone
    );
    assert!(matches!(
        mean_value_monotonicity(&sphere(16), &[2.0, 0.0, 0.0], 4.0, 0.05, 8),
        Err(solitonlab::Error::EmptyRegion(_))
    ));
    assert!(mean_value_monotonicity(&s, &[2.0, 0.0, 0.0], 3.0, 0.5, 8).is_err());
}

#[test]
fn bootstrap_examples() {
    assert!(
        bootstrap_pointwise_bound(&plane(0.3, 8.5), &ORIGIN, 8.0, 1.0)
            .unwrap()
            .pass
    );
    let np = near_plane(0.02, 9.0);
    let tip = np.samples[np.nearest_sample(&ORIGIN).unwrap()].x.clone();
    let rep = bootstrap_pointwise_bound(&np, &tip, 8.0, 1.05).unwrap();
    assert!(rep.pass, "{} {}", rep.lhs, rep.rhs);
    let cyl = bootstrap_pointwise_bound(&cylinder(0.4, 10.5), &[SQRT_2, 0.0, 0.0], 10.0, 1.52).unwrap();
    assert!(!cyl.pass && !cyl.hypothesis_holds);
}

#[test]
fn choi_schoen_examples() {
    let rep = choi_schoen(&plane(0.1, 2.0), &ORIGIN, 1.0, None).unwrap();
    assert!(rep.pass && rep.measurements["energy"].as_f64() == Some(0.0));
    let eps = rep.constants["epsilon"].value;
    assert!((eps - PI / 4.0 * (-4.0f64).exp()).abs() < 1e-15);
    assert!(choi_schoen(&sphere(32), &[2.0, 0.0, 0.0], 0.75, None).is_err());
}

#[test]
fn ssy_examples() {
    let p = plane(0.25, 6.5);
    let t = make_catalog(
        &CatalogId::TiltedPlaneGraph {
            normal: vec![0.2, 0.1, 1.0],
        },
        &Resolution::spacing(0.25).with_rtrunc(6.5),
    )
    .unwrap();
    for q in [0.0, 0.5] {
        for c in random_annulus_cutoffs(3, 6.0, 10, 21).unwrap() {
            assert!(ssy_inequality(&p, &c, q, None, 6.0).unwrap().pass);
            assert!(ssy_inequality(&t, &c, q, None, 6.0).unwrap().pass);
        }
    }
    let c = Cutoff::linear(ORIGIN.to_vec(), 5.0, 1.0).unwrap();
    assert!(ssy_inequality(&p, &c, 0.9, None, 6.0).is_err());
    assert!(ssy_inequality(&p, &c, 0.0, None, 4.0).is_err());
    let rep = ssy_inequality(&p, &c, 0.5, None, 6.0).unwrap();
    let a = ssy_default_a(2, 0.5);
    assert!((rep.constants["C"].value - ssy_constant(2, 0.5, a).unwrap()).abs() < 1e-12);
}

#[test]
fn lemma43_examples() {
    assert!(
        scale_invariant_energy(&plane(0.1, 2.0), &ORIGIN, 0.5, 3.0, 1.0)
            .unwrap()
            .pass
    );
    let c = cylinder(0.02, 2.0);
    let rep = scale_invariant_energy(&c, &[SQRT_2, 0.0, 0.0], 0.25, 2.0, 1.52).unwrap();
    assert!(
        rep.pass && (rep.lhs - 0.5 * PI * 0.0625).abs() < 0.02 * rep.lhs,
        "{}",
        rep.lhs
    );
    let s = sphere(128);
    let rep = scale_invariant_energy(&s, &[2.0, 0.0, 0.0], 0.25, 4.0, 4.0 / E).unwrap();
    // |A|⁴ = 1/4 times the chordal cap area π r².
    assert!(rep.pass && (rep.lhs - 0.25 * PI * 0.0625).abs() < 1e-3 * rep.lhs);
    assert!(scale_invariant_energy(&s, &[2.0, 0.0, 0.0], 0.25, 5.0, 4.0 / E).is_err());
    assert!(scale_invariant_energy(&s, &[2.0, 0.0, 0.0], 0.3, 2.0, 4.0 / E).is_err());
}

#[test]
fn log_cutoff_examples() {
    let p = make_catalog(
        &CatalogId::Hyperplane {
            normal: vec![0.0, 0.0, 1.0],
            offset: 0.0,
        },
        &Resolution::spacing(0.005)
            .with_rtrunc(1.0)
            .with_window(vec![Some([-0.3, 0.3]), Some([-0.3, 0.3])]),
    )
    .unwrap();
    let rep = log_cutoff_energy(&p, &ORIGIN, 0.25, 3, 1.0).unwrap();
    assert!(rep.pass && rep.lhs == 0.0);
    assert!(log_cutoff_energy(&p, &ORIGIN, 0.25, 1, 1.0).is_err());
    // Too coarse for the innermost ring.
    assert!(log_cutoff_energy(&plane(0.1, 1.0), &ORIGIN, 0.25, 4, 1.0).is_err());
}

#[test]
fn cutoff_gradient_bounds() {
    let s = sphere(64);
    let lin = Cutoff::linear(vec![2.0, 0.0, 0.0], 1.0, 0.4).unwrap();
    assert!(lin.gradient_bound_excess(&s, 4.0 * s.spacing() / 0.16).unwrap() <= 0.0);
    let log = Cutoff::logarithmic(vec![2.0, 0.0, 0.0], 0.25, 3).unwrap();
    assert!(log.gradient_bound_excess(&s, 1e-12).unwrap() <= 0.0);
    let (v, _) = log.radial((-3.0f64).exp() * 0.25 * 0.99);
    assert_eq!(v, 1.0);
    assert!(Cutoff::logarithmic(vec![0.0; 3], 0.25, 1).is_err());
}

#[test]
fn reports_are_consistent() {
    let s = sphere(32);
    let reports = vec![
        scale_invariant_energy(&s, &[2.0, 0.0, 0.0], 0.25, 3.0, 4.0 / E).unwrap(),
        volume_growth_certificate(&s, &[2.0, 0.0, 0.0], 1.0, 4.0 / E).unwrap(),
        choi_schoen(&s, &[2.0, 0.0, 0.0], 0.5, None).unwrap(),
    ];
    for r in &reports {
        assert_eq!(r.pass, r.hypothesis_holds && r.lhs <= r.rhs);
        assert!(!r.pass || r.verify());
        let back: EstimateReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(&back, r);
        for c in r.constants.values() {
            assert!(!c.formula.is_empty());
        }
    }
    let n = 2;
    let lambda0 = 4.0 / E;
    let r = &reports[0];
    let v0 = (-0.25f64).exp() * (4.0 * PI).powf(n as f64 / 2.0) * lambda0;
    assert!((r.constants["V0"].value - v0).abs() < 1e-12 * v0);
    let c2 = 4.0 * E * 4.0 * v0;
    assert!((r.constants["C2"].value - c2).abs() < 1e-12 * c2);
    let csv = batch_csv(&reports);
    assert!(csv.starts_with("name,params,lhs,rhs,pass\n"));
    assert_eq!(csv.lines().count(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn report_json_round_trip(lhs in -1e6f64..1e6, rhs in -1e6f64..1e6, holds in any::<bool>(), x in -10.0f64..10.0) {
        let mut r = EstimateReport::new("prop");
        r.param("x", x);
        r.constant("c", x * 3.0, "3*x", "derived");
        r.measure("m", vec![x, lhs]);
        r.hypothesis(holds, "status");
        let r = r.finish(lhs, rhs);
        prop_assert_eq!(r.pass, holds && lhs <= rhs);
        let back: EstimateReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn ssy_constant_requires_positive_d(q in 0.0f64..1.0, a in 0.01f64..1.0) {
        let d = ssy_d(2, q, a);
        prop_assert_eq!(ssy_constant(2, q, a).is_ok(), d > 0.0);
    }

    #[test]
    fn cutoffs_stay_in_unit_interval(r in 0.0f64..3.0, k in 2u32..6) {
        let c = Cutoff::logarithmic(vec![0.0; 3], 1.0, k).unwrap();
        let (v, dv) = c.radial(r);
        prop_assert!((0.0..=1.0).contains(&v) && dv <= 0.0);
        let l = Cutoff::linear(vec![0.0; 3], 2.0, 0.5).unwrap();
        let (v, dv) = l.radial(r);
        prop_assert!((0.0..=1.0).contains(&v) && dv >= -2.0);
    }
}
