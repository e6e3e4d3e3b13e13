//! Two-column profile files: header `r,u`, then one sample per line.

use std::path::Path;

use crate::error::{CliError, Result};
use crate::record::fmt_sig;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSamples {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
}

pub fn read_profile(path: &Path) -> Result<ProfileSamples> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_profile(&text).map_err(|e| match e {
        CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_profile(text: &str) -> Result<ProfileSamples> {
    let bad = |m: String| CliError::Validation(m);
    let mut rd = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rd
        .headers()
        .map_err(|e| bad(format!("unreadable header: {e}")))?;
    if header.len() != 2 || &header[0] != "r" || &header[1] != "u" {
        return Err(bad(format!(
            "header must be `r,u`, got `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = ProfileSamples {
        r: Vec::new(),
        u: Vec::new(),
    };
    for rec in rd.records() {
        let rec = rec.map_err(|e| bad(format!("malformed row: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize, name: &str| -> Result<f64> {
            let v: f64 = rec[i].parse().map_err(|_| {
                bad(format!(
                    "line {line}: {name} = {:?} is not a number",
                    &rec[i]
                ))
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad(format!("line {line}: {name} is not finite")))
            }
        };
        let (r, u) = (num(0, "r")?, num(1, "u")?);
        if r < 0.0 {
            return Err(bad(format!("line {line}: negative radius {r}")));
        }
        if u < 0.0 {
            return Err(bad(format!("line {line}: negative sample u = {u}")));
        }
        if let Some(&prev) = out.r.last() {
            if r <= prev {
                return Err(bad(format!(
                    "line {line}: r = {r} does not increase (previous {prev})"
                )));
            }
        }
        out.r.push(r);
        out.u.push(u);
    }
    if out.r.len() < 3 {
        return Err(bad(format!("need at least 3 samples, got {}", out.r.len())));
    }
    Ok(out)
}

pub fn write_profile(r: &[f64], u: &[f64], precision: usize) -> String {
    let mut s = String::from("r,u\n");
    for (a, b) in r.iter().zip(u) {
        s.push_str(&fmt_sig(*a, precision));
        s.push(',');
        s.push_str(&fmt_sig(*b, precision));
        s.push('\n');
    }
    s
}
