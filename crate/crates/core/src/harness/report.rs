//! Report data model, JSON and CSV serialization.
//!
//! The JSON schema is fixed and versioned; CSV rows carry the columns
//! `family,d,p,chi,n_base,n_twist,delta,a_p,residual,verdict`.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ExactPass,
    PassWithFittedResidual,
    Fail,
    NoModularData,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::ExactPass => "exact-pass",
            Verdict::PassWithFittedResidual => "pass-with-fitted-residual",
            Verdict::Fail => "fail",
            Verdict::NoModularData => "no-modular-data",
        };
        write!(f, "{s}")
    }
}

/// One good prime's comparison row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub p: u64,
    pub chi: i8,
    pub n_base: u64,
    pub n_twist: u64,
    pub delta: i64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a_p: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<i64>,
}

/// The fitted correction absorbed by the even cohomology of the resolved
/// models: `E(p) = Q0(p) + chi_aux(p) * Q1(p)` with integer quadratics, so
/// that `delta = sign * (1 - chi_d(p)) * (a_p + E(p))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualModel {
    /// Coefficients (c0, c1, c2) of the character-free part.
    pub c: [i64; 3],
    /// Fundamental discriminant of the auxiliary character, when one is needed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub aux_discriminant: Option<i64>,
    /// Coefficients of the auxiliary-character part.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub aux_c: Option<[i64; 3]>,
    /// True when the model survived recounting at one more good prime.
    pub stable_under_extension: bool,
}

impl ResidualModel {
    pub fn is_zero(&self) -> bool {
        self.c == [0; 3] && self.aux_c.is_none_or(|a| a == [0; 3])
    }

    /// `E(p)` predicted by the model.
    pub fn evaluate(&self, p: u64) -> i64 {
        let pi = p as i64;
        let poly = |c: &[i64; 3]| c[0] + c[1] * pi + c[2] * pi * pi;
        let mut e = poly(&self.c);
        if let (Some(dd), Some(ac)) = (self.aux_discriminant, &self.aux_c) {
            e += i64::from(crate::charfield::kronecker(dd, pi)) * poly(ac);
        }
        e
    }
}

/// Verification outcome for one (family, d) pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: String,
    pub d: i64,
    pub discriminant: i64,
    pub verdict: Verdict,
    pub rows: Vec<Row>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub global_sign: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual_model: Option<ResidualModel>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub twisted_level: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub level_note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Summary {
    pub entries: usize,
    pub exact_pass: usize,
    pub pass_with_fitted_residual: usize,
    pub fail: usize,
    pub no_modular_data: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub entries: Vec<FamilyReport>,
    pub summary: Summary,
}

impl Report {
    pub fn new(mut entries: Vec<FamilyReport>) -> Self {
        entries.sort_by(|a, b| (&a.family, a.d).cmp(&(&b.family, b.d)));
        let mut summary = Summary {
            entries: entries.len(),
            ..Default::default()
        };
        for e in &entries {
            if e.error.is_some() {
                summary.errors += 1;
            }
            match e.verdict {
                Verdict::ExactPass => summary.exact_pass += 1,
                Verdict::PassWithFittedResidual => summary.pass_with_fitted_residual += 1,
                Verdict::Fail => summary.fail += 1,
                Verdict::NoModularData => summary.no_modular_data += 1,
            }
        }
        Report {
            schema_version: SCHEMA_VERSION,
            entries,
            summary,
        }
    }

    pub fn has_failures(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn to_json(&self) -> Result<String, HarnessError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), HarnessError> {
        writeln!(w, "family,d,p,chi,n_base,n_twist,delta,a_p,residual,verdict")?;
        for e in &self.entries {
            for r in &e.rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{}",
                    e.family,
                    e.d,
                    r.p,
                    r.chi,
                    r.n_base,
                    r.n_twist,
                    r.delta,
                    r.a_p.map(|v| v.to_string()).unwrap_or_default(),
                    r.residual.map(|v| v.to_string()).unwrap_or_default(),
                    e.verdict,
                )?;
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Parse the CSV row form back into per-row data (family, d, Row, verdict).
    pub fn parse_csv(text: &str) -> Result<Vec<(String, i64, Row, String)>, HarnessError> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 10 {
                return Err(HarnessError::Config(format!(
                    "csv line {}: expected 10 columns, got {}",
                    i + 1,
                    cols.len()
                )));
            }
            let parse_err =
                |what: &str| HarnessError::Config(format!("csv line {}: bad {what}", i + 1));
            let opt_i64 = |s: &str, what: &str| -> Result<Option<i64>, HarnessError> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| parse_err(what))
                }
            };
            out.push((
                cols[0].to_string(),
                cols[1].parse().map_err(|_| parse_err("d"))?,
                Row {
                    p: cols[2].parse().map_err(|_| parse_err("p"))?,
                    chi: cols[3].parse().map_err(|_| parse_err("chi"))?,
                    n_base: cols[4].parse().map_err(|_| parse_err("n_base"))?,
                    n_twist: cols[5].parse().map_err(|_| parse_err("n_twist"))?,
                    delta: cols[6].parse().map_err(|_| parse_err("delta"))?,
                    a_p: opt_i64(cols[7], "a_p")?,
                    residual: opt_i64(cols[8], "residual")?,
                },
                cols[9].to_string(),
            ));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report::new(vec![FamilyReport {
            family: "beauville-V".to_string(),
            d: -3,
            discriminant: -3,
            verdict: Verdict::PassWithFittedResidual,
            rows: vec![
                Row {
                    p: 5,
                    chi: -1,
                    n_base: 503,
                    n_twist: 529,
                    delta: -26,
                    a_p: Some(-2),
                    residual: Some(-30),
                },
                Row {
                    p: 7,
                    chi: 1,
                    n_base: 1145,
                    n_twist: 1145,
                    delta: 0,
                    a_p: Some(-24),
                    residual: Some(0),
                },
            ],
            global_sign: Some(-1),
            residual_model: Some(ResidualModel {
                c: [0, 0, 0],
                aux_discriminant: Some(-4),
                aux_c: Some([0, 3, 0]),
                stable_under_extension: true,
            }),
            twisted_level: None,
            level_note: Some("gcd(16, -3) handling".to_string()),
            error: None,
            notes: vec![],
        }])
    }

    #[test]
    fn json_roundtrip_is_identity() {
        let r = sample();
        let text = r.to_json().unwrap();
        let back = Report::from_json(&text).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn csv_roundtrip_preserves_rows() {
        let r = sample();
        let text = r.to_csv().unwrap();
        let rows = Report::parse_csv(&text).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].0, "beauville-V");
        assert_eq!(rows[0].1, -3);
        assert_eq!(rows[0].2, r.entries[0].rows[0]);
        assert_eq!(rows[0].3, "pass-with-fitted-residual");
        assert_eq!(rows[1].2, r.entries[0].rows[1]);
    }

    #[test]
    fn summary_counts_verdicts() {
        let r = sample();
        assert_eq!(r.summary.entries, 1);
        assert_eq!(r.summary.pass_with_fitted_residual, 1);
        assert!(!r.has_failures());
    }

    #[test]
    fn residual_model_evaluation() {
        let m = ResidualModel {
            c: [0, -9, 6],
            aux_discriminant: Some(-3),
            aux_c: Some([0, -9, 6]),
            stable_under_extension: true,
        };
        // chi_{-3}(7) = +1: E = 2 * (6*49 - 63) = 462
        assert_eq!(m.evaluate(7), 462);
        // chi_{-3}(11) = -1: components cancel
        assert_eq!(m.evaluate(11), 0);
    }
}
