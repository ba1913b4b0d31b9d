//! Structured result documents with a JSON form and a flat CSV rendering.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] = ["ensemble", "design_rate", "method", "value", "unit", "trivial", "provenance"];

/// One numeric result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub ensemble: Option<String>,
    pub design_rate: Option<f64>,
    pub method: String,
    /// `None` where no value exists, e.g. a sweep point beyond capacity.
    pub value: Option<f64>,
    pub unit: String,
    pub trivial: Option<bool>,
    pub provenance: String,
}

impl ReportRow {
    pub fn new(method: impl Into<String>, value: f64, unit: impl Into<String>) -> Self {
        ReportRow {
            ensemble: None,
            design_rate: None,
            method: method.into(),
            value: Some(value),
            unit: unit.into(),
            trivial: None,
            provenance: "computed".into(),
        }
    }

    /// A row that records a point without a value.
    pub fn missing(method: impl Into<String>, unit: impl Into<String>) -> Self {
        ReportRow {
            value: None,
            ..Self::new(method, 0.0, unit)
        }
    }

    pub fn ensemble(mut self, name: impl Into<String>, rate: f64) -> Self {
        self.ensemble = Some(name.into());
        self.design_rate = Some(rate);
        self
    }

    pub fn trivial(mut self, flag: bool) -> Self {
        self.trivial = Some(flag);
        self
    }

    pub fn provenance(mut self, tag: impl Into<String>) -> Self {
        self.provenance = tag.into();
        self
    }

    fn csv_fields(&self) -> [String; 7] {
        let value = match self.value {
            None => String::new(),
            Some(v) if self.unit == "dB" => format!("{v:.4}"),
            Some(v) => format!("{v}"),
        };
        [
            self.ensemble.clone().unwrap_or_default(),
            self.design_rate.map(|r| format!("{r:.6}")).unwrap_or_default(),
            self.method.clone(),
            value,
            self.unit.clone(),
            self.trivial.map(|t| t.to_string()).unwrap_or_default(),
            self.provenance.clone(),
        ]
    }
}

/// A complete report: what was run, with which inputs, and the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: Vec<String>,
    pub tool_version: String,
    pub timestamp: Option<String>,
    pub inputs: Map<String, Value>,
    pub rows: Vec<ReportRow>,
}

impl ReportDocument {
    pub fn new(command: Vec<String>) -> Self {
        ReportDocument {
            command,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: None,
            inputs: Map::new(),
            rows: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("report: {e}")))
    }

    /// Rows as CSV under the fixed header; dB values carry four decimals.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.csv_fields()).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}
