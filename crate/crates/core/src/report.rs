//! Uniform certificate record shared by the estimate, functional and
//! translator checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

/// A named constant together with the formula that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub value: f64,
    pub formula: String,
    /// "derived", "measured" or "input".
    pub provenance: String,
}

/// Outcome of checking one inequality `lhs <= rhs`.
///
/// `pass` requires both the inequality and the hypotheses of the underlying
/// estimate; `inequality_holds` records the bare comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub schema: String,
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub inequality_holds: bool,
    pub hypothesis_holds: bool,
    pub hypothesis_status: String,
    pub constants: BTreeMap<String, Constant>,
    pub params: BTreeMap<String, Value>,
    pub measurements: BTreeMap<String, Value>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
}

impl EstimateReport {
    pub fn new(name: &str) -> Self {
        EstimateReport {
            schema: "estimate.v1".into(),
            name: name.into(),
            lhs: 0.0,
            rhs: 0.0,
            pass: false,
            inequality_holds: false,
            hypothesis_holds: true,
            hypothesis_status: "not required".into(),
            constants: BTreeMap::new(),
            params: BTreeMap::new(),
            measurements: BTreeMap::new(),
            notes: Vec::new(),
            operator: None,
        }
    }

    pub fn constant(&mut self, name: &str, value: f64, formula: &str, provenance: &str) -> f64 {
        self.constants.insert(
            name.into(),
            Constant {
                value,
                formula: formula.into(),
                provenance: provenance.into(),
            },
        );
        value
    }

    pub fn param(&mut self, name: &str, value: impl Into<Value>) {
        self.params.insert(name.into(), value.into());
    }

    pub fn measure(&mut self, name: &str, value: impl Into<Value>) {
        self.measurements.insert(name.into(), value.into());
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn hypothesis(&mut self, holds: bool, status: impl Into<String>) {
        self.hypothesis_holds = holds;
        self.hypothesis_status = status.into();
    }

    /// Sets both sides and recomputes the verdict.
    pub fn finish(mut self, lhs: f64, rhs: f64) -> Self {
        self.lhs = lhs;
        self.rhs = rhs;
        self.inequality_holds = lhs <= rhs;
        self.pass = self.hypothesis_holds && self.inequality_holds;
        self
    }

    /// Re-evaluates the verdict from the stored fields.
    pub fn verify(&self) -> bool {
        self.pass == (self.hypothesis_holds && self.lhs <= self.rhs)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One CSV line per report: name, compact params, lhs, rhs, pass.
pub fn batch_csv(reports: &[EstimateReport]) -> String {
    let mut out = String::from("name,params,lhs,rhs,pass\n");
    for r in reports {
        let params = serde_json::to_string(&r.params)
            .unwrap_or_default()
            .replace('"', "\"\"");
        out.push_str(&format!("{},\"{}\",{},{},{}\n", r.name, params, r.lhs, r.rhs, r.pass));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_combines_hypothesis() {
        let r = EstimateReport::new("x").finish(1.0, 2.0);
        assert!(r.pass && r.verify());
        let mut r = EstimateReport::new("y");
        r.hypothesis(false, "not 1/2-stable");
        let r = r.finish(1.0, 2.0);
        assert!(!r.pass && r.inequality_holds && r.verify());
        let back: EstimateReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
