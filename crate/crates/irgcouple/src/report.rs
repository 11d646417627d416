//! Experiment reports and their file formats.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::canonical::{format_real, to_canonical_string};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub n: usize,
    /// Stream id the trial was sampled from.
    pub stream: u64,
    /// `Some(true)` inside the main window, `Some(false)` outside, `None`
    /// when the solver bracket straddles it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_window: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_refined_window: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default)]
    pub fields: BTreeMap<String, Value>,
}

impl TrialRecord {
    pub fn new(trial: u64, n: usize, stream: u64) -> Self {
        Self {
            trial,
            n,
            stream,
            in_window: None,
            in_refined_window: None,
            value: None,
            fields: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.fields.insert(
            key.to_string(),
            serde_json::to_value(value).expect("record fields serialize"),
        );
    }
}

/// Coverage and means for one value of `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub trials: u64,
    pub covered: u64,
    pub missed: u64,
    pub indeterminate: u64,
    /// `covered / (covered + missed)`.
    pub coverage: Option<f64>,
    pub coverage_interval: Option<(f64, f64)>,
    pub refined_covered: u64,
    pub refined_coverage: Option<f64>,
    pub refined_interval: Option<(f64, f64)>,
    pub window: Option<(f64, f64)>,
    pub refined_window: Option<(f64, f64)>,
    /// Mean of the per-trial `value` over trials that have one.
    pub mean_value: Option<f64>,
    #[serde(default)]
    pub extra: BTreeMap<String, Value>,
}

impl Summary {
    pub fn from_records(n: usize, records: &[&TrialRecord]) -> Self {
        let covered = records.iter().filter(|r| r.in_window == Some(true)).count() as u64;
        let missed = records
            .iter()
            .filter(|r| r.in_window == Some(false))
            .count() as u64;
        let decided = covered + missed;
        let ref_true = records
            .iter()
            .filter(|r| r.in_refined_window == Some(true))
            .count() as u64;
        let ref_decided = records
            .iter()
            .filter(|r| r.in_refined_window.is_some())
            .count() as u64;
        let values: Vec<f64> = records.iter().filter_map(|r| r.value).collect();
        let ratio = |a: u64, b: u64| (b > 0).then(|| a as f64 / b as f64);
        Self {
            n,
            trials: records.len() as u64,
            covered,
            missed,
            indeterminate: records.len() as u64 - decided,
            coverage: ratio(covered, decided),
            coverage_interval: (decided > 0).then(|| wilson_interval(covered, decided, Z95)),
            refined_covered: ref_true,
            refined_coverage: ratio(ref_true, ref_decided),
            refined_interval: (ref_decided > 0)
                .then(|| wilson_interval(ref_true, ref_decided, Z95)),
            window: None,
            refined_window: None,
            mean_value: (!values.is_empty())
                .then(|| values.iter().sum::<f64>() / values.len() as f64),
            extra: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<Summary>,
    pub assertions: Vec<Assertion>,
    #[serde(default)]
    pub extras: BTreeMap<String, Value>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn summary(&self, n: usize) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.n == n)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(to_canonical_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One row per trial. Fixed columns `trial,n,stream,in_window,
    /// in_refined_window,value` followed by the union of record field
    /// names in sorted order. Missing cells are empty; nested values are
    /// written as compact JSON.
    pub fn to_csv(&self) -> Result<String> {
        let keys: BTreeSet<&String> = self.records.iter().flat_map(|r| r.fields.keys()).collect();
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut header = vec![
            "trial",
            "n",
            "stream",
            "in_window",
            "in_refined_window",
            "value",
        ];
        header.extend(keys.iter().map(|k| k.as_str()));
        w.write_record(&header).map_err(csv_error)?;
        for r in &self.records {
            let mut row = vec![
                r.trial.to_string(),
                r.n.to_string(),
                r.stream.to_string(),
                opt_cell(r.in_window),
                opt_cell(r.in_refined_window),
                r.value.map(format_real).unwrap_or_default(),
            ];
            row.extend(
                keys.iter()
                    .map(|k| r.fields.get(*k).map(cell).unwrap_or_default()),
            );
            w.write_record(&row).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Tab-separated `n coverage window_lo window_hi mean` rows, one per
    /// value of `n`. Undefined entries are written as `nan`.
    pub fn to_plotdata(&self) -> String {
        let mut s = String::from("# n\tcoverage\twindow_lo\twindow_hi\tmean\n");
        let real = |x: Option<f64>| x.map(format_real).unwrap_or_else(|| "nan".into());
        for sm in &self.summaries {
            let (lo, hi) = match sm.window {
                Some((a, b)) => (Some(a), Some(b)),
                None => (None, None),
            };
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                sm.n,
                real(sm.coverage),
                real(lo),
                real(hi),
                real(sm.mean_value)
            ));
        }
        s
    }

    /// Writes `report.json`, `trials.csv` and `plotdata.tsv` into `dir`.
    pub fn write_all(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let files = [
            ("report.json", self.to_json()?),
            ("trials.csv", self.to_csv()?),
            ("plotdata.tsv", self.to_plotdata()),
        ];
        for (name, body) in files {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

fn opt_cell(b: Option<bool>) -> String {
    b.map(|b| b.to_string()).unwrap_or_default()
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => format_real(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate_and_shrinks() {
        let mut prev = f64::INFINITY;
        for n in [100u64, 1000, 10_000] {
            let k = n * 8 / 10;
            let (lo, hi) = wilson_interval(k, n, Z95);
            assert!(lo <= 0.8 && 0.8 <= hi);
            assert!(hi - lo < prev);
            prev = hi - lo;
        }
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
        let (lo, hi) = wilson_interval(30, 30, Z95);
        assert!(lo > 0.88 && hi > 1.0 - 1e-12);
    }

    #[test]
    fn wilson_matches_reference_value() {
        // 24 of 30, evaluated at 30 digits.
        let (lo, hi) = wilson_interval(24, 30, Z95);
        assert!((lo - 0.626_943_035_868_517).abs() < 1e-9, "{lo}");
        assert!((hi - 0.904_948_928_227_101).abs() < 1e-9, "{hi}");
    }

    #[test]
    fn summary_counts_indeterminate_separately() {
        let mut rs = Vec::new();
        for (i, w) in [Some(true), Some(true), Some(false), None]
            .into_iter()
            .enumerate()
        {
            let mut r = TrialRecord::new(i as u64, 10, 0);
            r.in_window = w;
            r.value = Some(i as f64);
            rs.push(r);
        }
        let refs: Vec<&TrialRecord> = rs.iter().collect();
        let s = Summary::from_records(10, &refs);
        assert_eq!((s.covered, s.missed, s.indeterminate), (2, 1, 1));
        assert_eq!(s.coverage, Some(2.0 / 3.0));
        assert_eq!(s.mean_value, Some(1.5));
        assert_eq!(s.refined_coverage, None);
    }
}
