use solitonlab::surfaces::{make_catalog, CatalogId, Resolution, SampledHypersurface};

pub fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

pub fn sphere(n: usize, n_theta: usize) -> SampledHypersurface {
    make_catalog(&CatalogId::Sphere { n }, &Resolution::polar(n_theta)).unwrap()
}

pub fn cylinder(h: f64, r: f64) -> SampledHypersurface {
    make_catalog(
        &CatalogId::Cylinder { k: 1, n: 2 },
        &Resolution::spacing(h).with_rtrunc(r),
    )
    .unwrap()
}

pub fn plane(h: f64, r: f64) -> SampledHypersurface {
    make_catalog(
        &CatalogId::Hyperplane {
            normal: vec![0.0, 0.0, 1.0],
            offset: 0.0,
        },
        &Resolution::spacing(h).with_rtrunc(r),
    )
    .unwrap()
}

pub fn near_plane(step: f64, r: f64) -> SampledHypersurface {
    make_catalog(
        &CatalogId::NearPlaneShrinker {
            n: 2,
            edge_height: 0.05,
        },
        &Resolution::spacing(step).with_rtrunc(r),
    )
    .unwrap()
}

/// Convergence orders log2(e_i / e_{i+1}) for successive halvings. A
/// residual already at the roundoff floor counts as converged.
pub fn orders(errors: &[f64], floor: f64) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| {
            if w[0] <= floor && w[1] <= floor {
                f64::INFINITY
            } else {
                (w[0] / w[1]).log2()
            }
        })
        .collect()
}
