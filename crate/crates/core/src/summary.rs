//! Per-condition means and standard errors.
//!
//! Records are grouped by every single factor and every pair of factors.
//! Within a cell each participant contributes the mean over their trials;
//! the table reports the mean of those participant means and its standard
//! error (sample standard deviation over `sqrt(n)`, zero for one participant).
//! Practice trials are left out.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::record::TrialRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    Depiction,
    Nodes,
    Links,
    Skips,
    Layers,
}

impl Factor {
    pub const ALL: [Factor; 5] = [Factor::Depiction, Factor::Nodes, Factor::Links, Factor::Skips, Factor::Layers];

    pub fn as_str(self) -> &'static str {
        match self {
            Factor::Depiction => "depiction",
            Factor::Nodes => "nodes",
            Factor::Links => "links",
            Factor::Skips => "skips",
            Factor::Layers => "layers",
        }
    }

    pub fn level(self, r: &TrialRecord) -> String {
        let pct = |x: f64| format!("{}", (x * 100.0).round() as i64);
        match self {
            Factor::Depiction => r.depiction.to_string(),
            Factor::Nodes => r.spec.nodes.to_string(),
            Factor::Links => pct(r.spec.link_density),
            Factor::Skips => pct(r.spec.skip_density),
            Factor::Layers => r.spec.layers.to_string(),
        }
    }
}

/// Every single factor followed by every unordered pair.
pub fn groupings() -> Vec<Vec<Factor>> {
    let mut out: Vec<Vec<Factor>> = Factor::ALL.iter().map(|&f| vec![f]).collect();
    for (i, &a) in Factor::ALL.iter().enumerate() {
        for &b in &Factor::ALL[i + 1..] {
            out.push(vec![a, b]);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub factors: Vec<Factor>,
    pub levels: Vec<String>,
    /// Participants contributing to the cell.
    pub n: usize,
    pub trials: usize,
    pub time_mean_s: f64,
    pub time_se_s: f64,
    pub accuracy_mean: f64,
    pub accuracy_se: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SummaryError {
    #[error("the log holds no experimental trials")]
    EmptyLog,
}

/// Mean and standard error of `xs`.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt() / n.sqrt())
}

pub fn summarize(records: &[TrialRecord]) -> Result<Vec<SummaryRow>, SummaryError> {
    let trials: Vec<&TrialRecord> = records.iter().filter(|r| !r.practice).collect();
    if trials.is_empty() {
        return Err(SummaryError::EmptyLog);
    }
    let mut rows = Vec::new();
    for factors in groupings() {
        // cell levels -> participant -> (time sum, accuracy sum, count)
        let mut cells: BTreeMap<Vec<String>, BTreeMap<usize, (f64, f64, usize)>> = BTreeMap::new();
        for r in &trials {
            let levels: Vec<String> = factors.iter().map(|f| f.level(r)).collect();
            let acc = cells.entry(levels).or_default().entry(r.participant).or_insert((0.0, 0.0, 0));
            acc.0 += r.elapsed_ms as f64 / 1000.0;
            acc.1 += f64::from(r.accuracy);
            acc.2 += 1;
        }
        for (levels, people) in cells {
            let times: Vec<f64> = people.values().map(|&(t, _, c)| t / c as f64).collect();
            let accs: Vec<f64> = people.values().map(|&(_, a, c)| a / c as f64).collect();
            let (time_mean_s, time_se_s) = mean_se(&times);
            let (accuracy_mean, accuracy_se) = mean_se(&accs);
            rows.push(SummaryRow {
                factors: factors.clone(),
                levels,
                n: people.len(),
                trials: people.values().map(|p| p.2).sum(),
                time_mean_s,
                time_se_s,
                accuracy_mean,
                accuracy_se,
            });
        }
    }
    Ok(rows)
}

/// Comma-separated table with a header; multi-factor names and levels are
/// joined with `*`.
pub fn to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("factors,levels,n,trials,time_mean_s,time_se_s,accuracy_mean,accuracy_se\n");
    for r in rows {
        let names: Vec<&str> = r.factors.iter().map(|f| f.as_str()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            names.join("*"),
            r.levels.join("*"),
            r.n,
            r.trials,
            r.time_mean_s,
            r.time_se_s,
            r.accuracy_mean,
            r.accuracy_se
        );
    }
    out
}
