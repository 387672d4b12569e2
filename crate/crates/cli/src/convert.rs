//! JSON reports to CSV tables and CSV tables back to JSON rows.

use std::path::Path;

use serde_json::{Map, Value};
use solitonlab::estimates::{batch_csv, EstimateReport, MeanValueTrace};
use solitonlab::geometry::{compute_geometry, fields_csv, shrinker_residual};
use solitonlab::stability::SpectrumReport;
use solitonlab::surfaces::from_json;

use crate::CliError;

fn extension(p: &Path) -> String {
    p.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

pub fn convert(input: &Path, output: &Path) -> Result<(), CliError> {
    let bytes = std::fs::read(input).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
    let text = match (extension(input).as_str(), extension(output).as_str()) {
        ("json", "csv") => json_to_csv(&bytes)?,
        ("csv", "json") => csv_to_json(&bytes)?,
        _ => return Err(CliError::Usage("convert maps .json to .csv or .csv to .json".into())),
    };
    std::fs::write(output, text).map_err(|e| CliError::Failed(format!("cannot write {}: {e}", output.display())))
}

fn parse<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Usage(format!("malformed report: {e}")))
}

fn json_to_csv(bytes: &[u8]) -> Result<String, CliError> {
    let v: Value = serde_json::from_slice(bytes).map_err(|e| CliError::Usage(format!("invalid JSON: {e}")))?;
    let schema = |v: &Value| v.get("schema").and_then(Value::as_str).map(str::to_string);
    match (&v, schema(&v).as_deref()) {
        (Value::Array(items), _) if items.iter().all(|i| schema(i).as_deref() == Some("estimate.v1")) => {
            Ok(batch_csv(&parse::<Vec<EstimateReport>>(v)?))
        }
        (_, Some("estimate.v1")) => Ok(batch_csv(&[parse::<EstimateReport>(v)?])),
        (_, Some("spectrum.v1")) => {
            let s: SpectrumReport = parse(v)?;
            let mut out = String::from("index,eigenvalue,residual\n");
            for (i, e) in s.eigenvalues.iter().enumerate() {
                let r = s.residuals.get(i).copied().unwrap_or(f64::NAN);
                out.push_str(&format!("{i},{e},{r}\n"));
            }
            Ok(out)
        }
        _ if v.get("samples").is_some() => {
            let s = from_json(bytes)?;
            let geo = compute_geometry(&s)?;
            let res = shrinker_residual(&s, &geo);
            Ok(fields_csv(&s, &geo, &res.residual))
        }
        _ if v.get("radii").is_some() && v.get("h").is_some() => Ok(parse::<MeanValueTrace>(v)?.to_csv()),
        _ => Err(CliError::Usage("unrecognized JSON document".into())),
    }
}

fn cell(s: &str) -> Value {
    if let Ok(v) = s.parse::<i64>() {
        return v.into();
    }
    if let Ok(v) = s.parse::<f64>() {
        return v.into();
    }
    match s {
        "true" => return true.into(),
        "false" => return false.into(),
        _ => {}
    }
    match serde_json::from_str::<Value>(s) {
        Ok(v @ (Value::Object(_) | Value::Array(_))) => v,
        _ => s.into(),
    }
}

fn csv_to_json(bytes: &[u8]) -> Result<String, CliError> {
    let mut reader = csv::Reader::from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| CliError::Usage(format!("invalid CSV: {e}")))?
        .clone();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::Usage(format!("invalid CSV: {e}")))?;
        let row: Map<String, Value> = headers
            .iter()
            .zip(rec.iter())
            .map(|(h, c)| (h.to_string(), cell(c)))
            .collect();
        rows.push(Value::Object(row));
    }
    let mut text = serde_json::to_string_pretty(&rows).map_err(|e| CliError::Failed(e.to_string()))?;
    text.push('\n');
    Ok(text)
}
