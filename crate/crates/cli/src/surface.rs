//! Builds the surface a command operates on from the merged parameters.

use solitonlab::surfaces::{from_json, make_catalog, CatalogId, Resolution, SampledHypersurface};

use crate::opts::Params;
use crate::CliError;

/// Grid spacing used when none is given; eigenproblems need coarser grids
/// to stay under the dense-solver size limit.
#[derive(Clone, Copy)]
pub enum Density {
    Fine,
    Coarse,
}

impl Density {
    fn spacing(self) -> f64 {
        match self {
            Density::Fine => 0.1,
            Density::Coarse => 0.3,
        }
    }
}

const DEFAULT_NTHETA: usize = 48;
const DEFAULT_PROFILE_STEP: f64 = 0.02;

pub fn catalog_id(p: &mut Params) -> Result<CatalogId, CliError> {
    let kind = p.string("surface", None)?;
    let id = match kind.as_str() {
        "sphere" => CatalogId::Sphere {
            n: p.usize("n", Some(2))?,
        },
        "cylinder" => CatalogId::Cylinder {
            k: p.usize("k", Some(1))?,
            n: p.usize("n", Some(2))?,
        },
        "plane" => {
            let n = p.usize("n", Some(2))?;
            let mut e = vec![0.0; n + 1];
            e[n] = 1.0;
            CatalogId::Hyperplane {
                normal: p.vec("normal", Some(e))?,
                offset: p.f64("offset", Some(0.0))?,
            }
        }
        "tilted" => CatalogId::TiltedPlaneGraph {
            normal: p.vec("normal", None)?,
        },
        "nearplane" => CatalogId::NearPlaneShrinker {
            n: p.usize("n", Some(2))?,
            edge_height: p.f64("edge_height", Some(0.05))?,
        },
        "bowl" => CatalogId::Bowl {
            n: p.usize("n", Some(2))?,
        },
        other => {
            return Err(CliError::Usage(format!(
                "unknown surface {other:?}; expected sphere, plane, cylinder, tilted, nearplane, bowl or file"
            )))
        }
    };
    if id.dim() < 2 {
        return Err(CliError::Usage(format!(
            "intrinsic dimension must be at least 2, got {}",
            id.dim()
        )));
    }
    Ok(id)
}

pub fn build(p: &mut Params, density: Density) -> Result<SampledHypersurface, CliError> {
    if p.string("surface", None)? == "file" {
        let path = p.string("path", None)?;
        let bytes = std::fs::read(&path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
        return Ok(from_json(&bytes)?);
    }
    let id = catalog_id(p)?;
    let profile = matches!(id, CatalogId::NearPlaneShrinker { .. } | CatalogId::Bowl { .. });
    let mut res = if matches!(id, CatalogId::Sphere { .. }) && !p.has("h") {
        Resolution::polar(p.usize("ntheta", Some(DEFAULT_NTHETA))?)
    } else {
        let dflt = if profile {
            DEFAULT_PROFILE_STEP
        } else {
            density.spacing()
        };
        Resolution::spacing(p.f64("h", Some(dflt))?)
    };
    if !id.is_compact() {
        let dflt = match p.opt_f64("R")? {
            Some(r) if profile => Some(r + 1.0),
            Some(r) => Some(r + 0.5),
            None => None,
        };
        res = res.with_rtrunc(p.f64("rtrunc", dflt)?);
    }
    Ok(make_catalog(&id, &res)?)
}
