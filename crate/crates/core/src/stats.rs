//! Per-instance and aggregate enumeration statistics.

use std::time::{Duration, Instant};

use crate::budget::Budget;
use crate::enumerate::{enumerate_all, EnumerationOptions};
use crate::error::Result;
use crate::explain::ExplanationProblem;
use crate::io::InstanceRow;
use crate::model::Model;
use crate::oracle::Oracle;

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceStats {
    pub row: usize,
    pub prediction: String,
    pub axp_sizes: Vec<usize>,
    pub cxp_sizes: Vec<usize>,
    pub entailment_calls: u64,
    pub witness_calls: u64,
    pub time: Duration,
    pub complete: bool,
}

fn mean(sizes: &[usize]) -> Option<f64> {
    (!sizes.is_empty()).then(|| sizes.iter().sum::<usize>() as f64 / sizes.len() as f64)
}

impl InstanceStats {
    pub fn axps(&self) -> usize {
        self.axp_sizes.len()
    }

    pub fn cxps(&self) -> usize {
        self.cxp_sizes.len()
    }

    pub fn oracle_calls(&self) -> u64 {
        self.entailment_calls + self.witness_calls
    }
}

/// Enumerates every explanation of one instance and records the counts.
pub fn instance_stats(
    model: &Model,
    row: &InstanceRow,
    budget: &Budget,
    options: &EnumerationOptions,
) -> Result<InstanceStats> {
    let start = Instant::now();
    let problem = ExplanationProblem::new(model, row.instance.clone())?;
    let mut oracle = Oracle::with_budget(model, budget);
    let found = enumerate_all(&problem, &mut oracle, budget, options)?;
    let stats = oracle.stats();
    Ok(InstanceStats {
        row: row.row,
        prediction: model.class_name(problem.prediction()).to_string(),
        axp_sizes: found.axps.iter().map(|a| a.len()).collect(),
        cxp_sizes: found.cxps.iter().map(|c| c.len()).collect(),
        entailment_calls: stats.entailment_calls,
        witness_calls: stats.witness_calls,
        time: start.elapsed(),
        complete: found.complete,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub instances: usize,
    pub total_axps: usize,
    pub total_cxps: usize,
    pub mean_axps: f64,
    pub mean_cxps: f64,
    pub avg_axp_size: Option<f64>,
    pub avg_cxp_size: Option<f64>,
    pub max_axp_size: usize,
    pub max_cxp_size: usize,
    pub oracle_calls: u64,
    pub mean_oracle_calls: f64,
    pub time: Duration,
}

impl Aggregate {
    /// Whether CXps are on average no larger than AXps. `None` if either
    /// family is empty over the whole run.
    pub fn cxps_not_larger(&self) -> Option<bool> {
        Some(self.avg_cxp_size? <= self.avg_axp_size?)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StatsReport {
    pub rows: Vec<InstanceStats>,
}

impl StatsReport {
    pub fn aggregate(&self) -> Aggregate {
        let n = self.rows.len();
        let all_axp: Vec<usize> = self
            .rows
            .iter()
            .flat_map(|r| r.axp_sizes.iter().copied())
            .collect();
        let all_cxp: Vec<usize> = self
            .rows
            .iter()
            .flat_map(|r| r.cxp_sizes.iter().copied())
            .collect();
        let calls: u64 = self.rows.iter().map(InstanceStats::oracle_calls).sum();
        let per = |x: f64| if n == 0 { 0.0 } else { x / n as f64 };
        Aggregate {
            instances: n,
            total_axps: all_axp.len(),
            total_cxps: all_cxp.len(),
            mean_axps: per(all_axp.len() as f64),
            mean_cxps: per(all_cxp.len() as f64),
            avg_axp_size: mean(&all_axp),
            avg_cxp_size: mean(&all_cxp),
            max_axp_size: all_axp.iter().copied().max().unwrap_or(0),
            max_cxp_size: all_cxp.iter().copied().max().unwrap_or(0),
            oracle_calls: calls,
            mean_oracle_calls: per(calls as f64),
            time: self.rows.iter().map(|r| r.time).sum(),
        }
    }

    /// CSV with one row per instance and a final `all` row. Wall-clock
    /// columns are included only when `timing` is set, so the default
    /// output is reproducible byte for byte.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "row",
            "prediction",
            "axps",
            "cxps",
            "avg_axp_size",
            "max_axp_size",
            "avg_cxp_size",
            "max_cxp_size",
            "entailment_calls",
            "witness_calls",
            "oracle_calls",
            "complete",
        ];
        if timing {
            header.push("time_ms");
        }
        w.write_record(&header).expect("in-memory write");
        let fmt = |x: Option<f64>| x.map(|v| format!("{v:.3}")).unwrap_or_default();
        let ms = |d: Duration| format!("{:.3}", d.as_secs_f64() * 1e3);
        for r in &self.rows {
            let mut rec = vec![
                r.row.to_string(),
                r.prediction.clone(),
                r.axps().to_string(),
                r.cxps().to_string(),
                fmt(mean(&r.axp_sizes)),
                r.axp_sizes.iter().max().copied().unwrap_or(0).to_string(),
                fmt(mean(&r.cxp_sizes)),
                r.cxp_sizes.iter().max().copied().unwrap_or(0).to_string(),
                r.entailment_calls.to_string(),
                r.witness_calls.to_string(),
                r.oracle_calls().to_string(),
                r.complete.to_string(),
            ];
            if timing {
                rec.push(ms(r.time));
            }
            w.write_record(&rec).expect("in-memory write");
        }
        let a = self.aggregate();
        let mut rec = vec![
            "all".to_string(),
            String::new(),
            a.total_axps.to_string(),
            a.total_cxps.to_string(),
            fmt(a.avg_axp_size),
            a.max_axp_size.to_string(),
            fmt(a.avg_cxp_size),
            a.max_cxp_size.to_string(),
            self.rows
                .iter()
                .map(|r| r.entailment_calls)
                .sum::<u64>()
                .to_string(),
            self.rows
                .iter()
                .map(|r| r.witness_calls)
                .sum::<u64>()
                .to_string(),
            a.oracle_calls.to_string(),
            self.rows.iter().all(|r| r.complete).to_string(),
        ];
        if timing {
            rec.push(ms(a.time));
        }
        w.write_record(&rec).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}
