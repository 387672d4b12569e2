//! `surface.v1` serialization.

use serde::{Deserialize, Serialize};

use super::chart::Chart;
use super::{Coverage, Origin, Sample, SampledHypersurface, Shape};
use crate::error::{Error, Result};

pub const SURFACE_SCHEMA_VERSION: &str = "1";

#[derive(Serialize)]
struct SurfaceOut<'a> {
    version: &'static str,
    n: usize,
    source: &'a str,
    samples: &'a [Sample],
    chart: &'a Chart,
    shape: &'a Shape,
    origin: &'a Origin,
    coverage: &'a Coverage,
    truncation: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceIn {
    version: String,
    n: usize,
    source: String,
    samples: Vec<Sample>,
    chart: Chart,
    #[serde(default = "samples_shape")]
    shape: Shape,
    #[serde(default = "custom_origin")]
    origin: Origin,
    #[serde(default)]
    coverage: Coverage,
    #[serde(default)]
    truncation: Option<f64>,
}

fn samples_shape() -> Shape {
    Shape::Samples
}

fn custom_origin() -> Origin {
    Origin::Custom
}

pub fn to_json(surface: &SampledHypersurface) -> Result<Vec<u8>> {
    let out = SurfaceOut {
        version: SURFACE_SCHEMA_VERSION,
        n: surface.n,
        source: &surface.source,
        samples: &surface.samples,
        chart: &surface.chart,
        shape: &surface.shape,
        origin: &surface.origin,
        coverage: &surface.coverage,
        truncation: surface.truncation,
    };
    Ok(serde_json::to_vec(&out)?)
}

pub fn from_json(bytes: &[u8]) -> Result<SampledHypersurface> {
    let raw: SurfaceIn = serde_json::from_slice(bytes).map_err(|e| Error::Schema(e.to_string()))?;
    if raw.version != SURFACE_SCHEMA_VERSION {
        return Err(Error::Schema(format!("unsupported surface version {:?}", raw.version)));
    }
    let s = SampledHypersurface {
        n: raw.n,
        source: raw.source,
        origin: raw.origin,
        shape: raw.shape,
        samples: raw.samples,
        chart: raw.chart,
        coverage: raw.coverage,
        truncation: raw.truncation,
    };
    s.validate()?;
    Ok(s)
}
