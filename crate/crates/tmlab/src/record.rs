//! Result records and their CSV / JSON encodings.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, Result};

/// An f64 that survives JSON: non-finite values travel as the strings "inf", "-inf", "nan".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            s.serialize_f64(x)
        } else {
            s.serialize_str(&fmt_sig(x, 1))
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            F(f64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::F(x) => Ok(Num(x)),
            Raw::S(s) => match s.as_str() {
                "inf" => Ok(Num(f64::INFINITY)),
                "-inf" => Ok(Num(f64::NEG_INFINITY)),
                "nan" => Ok(Num(f64::NAN)),
                other => Err(serde::de::Error::custom(format!("not a number: {other:?}"))),
            },
        }
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub version: String,
    /// Seconds since the Unix epoch; taken from SOURCE_DATE_EPOCH when set.
    pub timestamp: u64,
    pub seed: u64,
    /// Significant digits of every emitted number.
    pub precision: usize,
}

impl Provenance {
    pub fn new(seed: u64, precision: usize) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or_else(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            });
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            seed,
            precision,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub command: String,
    pub config: serde_json::Value,
    pub scalars: BTreeMap<String, Num>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Numerical failures that still produced output (the run exits with code 3).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    pub provenance: Provenance,
}

impl ResultRecord {
    pub fn new(command: &str, config: &impl Serialize, provenance: Provenance) -> Self {
        Self {
            command: command.to_string(),
            config: serde_json::to_value(config).expect("configs serialize"),
            scalars: BTreeMap::new(),
            columns: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
            failures: Vec::new(),
            provenance,
        }
    }

    pub fn scalar(&mut self, name: &str, x: f64) -> &mut Self {
        self.scalars.insert(name.to_string(), Num(x));
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.scalars.get(name).map(|n| n.0)
    }

    pub fn set_columns(&mut self, cols: &[&str]) {
        self.columns = cols.iter().map(|c| c.to_string()).collect();
    }

    pub fn push_row(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row.iter().map(|&x| Num(x)).collect());
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j].0).collect())
    }

    /// Copy with every scalar and table entry cut to `precision` significant digits.
    pub fn rounded(&self) -> Self {
        let p = self.provenance.precision;
        let mut out = self.clone();
        for v in out.scalars.values_mut() {
            v.0 = round_sig(v.0, p);
        }
        for row in &mut out.rows {
            for v in row {
                v.0 = round_sig(v.0, p);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.rounded()).expect("records serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("result record: {e}")))
    }

    /// The table as CSV; a record without one becomes a single row of its scalars.
    pub fn to_csv(&self) -> String {
        let p = self.provenance.precision;
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.columns.is_empty() {
            w.write_record(self.scalars.keys())
                .expect("in-memory write");
            w.write_record(self.scalars.values().map(|v| fmt_sig(v.0, p)))
                .expect("in-memory write");
        } else {
            w.write_record(&self.columns).expect("in-memory write");
            for row in &self.rows {
                w.write_record(row.iter().map(|v| fmt_sig(v.0, p)))
                    .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.max(1) - 1, x).parse().unwrap_or(x)
}

/// Shortest %g-style rendering with at most `digits` significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mant), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl fmt::Display for ResultRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}
