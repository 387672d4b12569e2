//! Run parameters: command-line flags layered over an optional TOML config
//! file, with defaults supplied at the point of use and echoed back.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

/// Every tunable shared by the subcommands. All fields are optional so the
/// config file can fill whatever the command line leaves out.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Opts {
    /// Surface kind: sphere, plane, cylinder, tilted, nearplane, bowl or file.
    #[arg(long)]
    pub surface: Option<String>,
    /// surface.v1 JSON file (with --surface file).
    #[arg(long)]
    pub path: Option<PathBuf>,
    /// Intrinsic dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Sphere factor dimension of a cylinder.
    #[arg(long)]
    pub k: Option<usize>,
    /// Unit normal of a plane, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub normal: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub offset: Option<f64>,
    /// Grid spacing, or the ODE step for rotational surfaces.
    #[arg(long)]
    pub h: Option<f64>,
    /// Polar divisions of a sphere.
    #[arg(long)]
    pub ntheta: Option<usize>,
    /// Truncation radius for noncompact surfaces.
    #[arg(long)]
    pub rtrunc: Option<f64>,
    /// Edge height of the near-plane shrinker.
    #[arg(long)]
    pub edge_height: Option<f64>,

    /// Radius of the region B_R.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub big_r: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Number of eigenvalues.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub tol_disc: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Base point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    #[arg(long)]
    pub r0: Option<f64>,
    /// Small radius r.
    #[arg(long)]
    pub r: Option<f64>,
    /// Number of logarithmic cutoff rings.
    #[arg(long)]
    pub rings: Option<u32>,
    /// Energy exponent.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub smax: Option<f64>,
    /// Number of radii in a mean-value trace.
    #[arg(long)]
    pub radii: Option<usize>,
    /// Number of random annulus cutoffs.
    #[arg(long)]
    pub cutoffs: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub potential_scale: Option<f64>,
    /// Horizontal-radius annulus lo,hi.
    #[arg(long, value_delimiter = ',')]
    pub annulus: Option<Vec<f64>>,
    /// Tolerance for the check run by the command.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub tol_identity: Option<f64>,
    #[arg(long)]
    pub tol_simons: Option<f64>,
}

/// Merged parameter map plus a record of every value actually used.
pub struct Params {
    given: Map<String, Value>,
    pub effective: BTreeMap<String, Value>,
}

fn strip_nulls(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => Map::new(),
    }
}

impl Params {
    pub fn new(flags: &Opts, config: Option<&Path>) -> Result<Self, CliError> {
        let mut given = match config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
                let parsed: Opts = toml::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
                strip_nulls(serde_json::to_value(parsed).expect("options serialize"))
            }
            None => Map::new(),
        };
        given.extend(strip_nulls(serde_json::to_value(flags).expect("options serialize")));
        Ok(Params {
            given,
            effective: BTreeMap::new(),
        })
    }

    pub fn has(&self, key: &str) -> bool {
        self.given.contains_key(key)
    }

    fn lookup(&mut self, key: &str, default: Option<Value>) -> Result<Value, CliError> {
        let v = self
            .given
            .get(key)
            .cloned()
            .or(default)
            .ok_or_else(|| CliError::Usage(format!("missing required parameter --{key}")))?;
        self.effective.insert(key.to_string(), v.clone());
        Ok(v)
    }

    pub fn f64(&mut self, key: &str, default: Option<f64>) -> Result<f64, CliError> {
        let v = self.lookup(key, default.map(Value::from))?;
        v.as_f64()
            .ok_or_else(|| CliError::Usage(format!("--{key} must be a number")))
    }

    pub fn opt_f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        if self.has(key) {
            self.f64(key, None).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn usize(&mut self, key: &str, default: Option<usize>) -> Result<usize, CliError> {
        let v = self.lookup(key, default.map(Value::from))?;
        v.as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| CliError::Usage(format!("--{key} must be a nonnegative integer")))
    }

    pub fn u64(&mut self, key: &str, default: Option<u64>) -> Result<u64, CliError> {
        let v = self.lookup(key, default.map(Value::from))?;
        v.as_u64()
            .ok_or_else(|| CliError::Usage(format!("--{key} must be a nonnegative integer")))
    }

    pub fn vec(&mut self, key: &str, default: Option<Vec<f64>>) -> Result<Vec<f64>, CliError> {
        let v = self.lookup(key, default.map(Value::from))?;
        serde_json::from_value(v).map_err(|_| CliError::Usage(format!("--{key} must be a list of numbers")))
    }

    pub fn string(&mut self, key: &str, default: Option<&str>) -> Result<String, CliError> {
        let v = self.lookup(key, default.map(Value::from))?;
        v.as_str()
            .map(str::to_string)
            .ok_or_else(|| CliError::Usage(format!("--{key} must be a string")))
    }
}
