use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use super::run::MetricsReport;

pub const CSV_HEADER: &str = "run_id,seed,strategy,density,n_rsus,cache_size,interests_sent,data_sent,nacks_sent,total_packets,cs_hits,satisfaction_ratio,completed_trips,mean_travel_time_s,std_travel_time_s,reroutes";

/// One line of the results table. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub run_id: u64,
    pub seed: u64,
    pub strategy: String,
    pub density: f64,
    pub n_rsus: usize,
    pub cache_size: usize,
    pub interests_sent: u64,
    pub data_sent: u64,
    pub nacks_sent: u64,
    pub total_packets: u64,
    pub cs_hits: u64,
    pub satisfaction_ratio: f64,
    pub completed_trips: u64,
    pub mean_travel_time_s: f64,
    pub std_travel_time_s: f64,
    pub reroutes: u64,
}

impl CsvRow {
    pub fn from_report(run_id: u64, r: &MetricsReport) -> Self {
        Self {
            run_id,
            seed: r.seed,
            strategy: r.strategy.as_str().to_string(),
            density: r.density,
            n_rsus: r.n_rsus,
            cache_size: r.cache_size,
            interests_sent: r.interests_sent,
            data_sent: r.data_sent,
            nacks_sent: r.nacks_sent,
            total_packets: r.total_packets,
            cs_hits: r.cs_hits,
            satisfaction_ratio: r.satisfaction_ratio,
            completed_trips: r.completed_trips,
            mean_travel_time_s: r.mean_travel_time_s,
            std_travel_time_s: r.std_travel_time_s,
            reroutes: r.reroutes,
        }
    }

    /// Column value as text, for grouping.
    pub fn field(&self, name: &str) -> Option<String> {
        Some(match name {
            "run_id" => self.run_id.to_string(),
            "seed" => self.seed.to_string(),
            "strategy" => self.strategy.clone(),
            "density" => self.density.to_string(),
            "n_rsus" => self.n_rsus.to_string(),
            "cache_size" => self.cache_size.to_string(),
            other => self.metric(other)?.to_string(),
        })
    }

    /// Numeric column value.
    pub fn metric(&self, name: &str) -> Option<f64> {
        Some(match name {
            "run_id" => self.run_id as f64,
            "seed" => self.seed as f64,
            "density" => self.density,
            "n_rsus" => self.n_rsus as f64,
            "cache_size" => self.cache_size as f64,
            "interests_sent" => self.interests_sent as f64,
            "data_sent" => self.data_sent as f64,
            "nacks_sent" => self.nacks_sent as f64,
            "total_packets" => self.total_packets as f64,
            "cs_hits" => self.cs_hits as f64,
            "satisfaction_ratio" => self.satisfaction_ratio,
            "completed_trips" => self.completed_trips as f64,
            "mean_travel_time_s" => self.mean_travel_time_s,
            "std_travel_time_s" => self.std_travel_time_s,
            "reroutes" => self.reroutes as f64,
            _ => return None,
        })
    }
}

/// Writes header and rows with LF line endings.
pub fn write_csv<W: Write>(out: W, rows: &[CsvRow]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> csv::Result<Vec<CsvRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregateError {
    #[error("group {group:?} has {n} replicate(s); at least 2 are needed")]
    InsufficientReplicates { group: Vec<String>, n: usize },
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
}

/// Sample mean with its 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub ci95_halfwidth: f64,
    pub n: usize,
}

/// Mean and `t(n−1, 0.975) · s / √n`, with `s` the sample standard deviation.
pub fn summarize(values: &[f64]) -> Result<Summary, AggregateError> {
    let n = values.len();
    if n < 2 {
        return Err(AggregateError::InsufficientReplicates { group: Vec::new(), n });
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let s = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 1.0)
        .expect("n - 1 >= 1 degrees of freedom")
        .inverse_cdf(0.975);
    Ok(Summary {
        mean,
        ci95_halfwidth: t * s / nf.sqrt(),
        n,
    })
}

/// Groups rows by the given columns and summarizes `metric` per group.
pub fn aggregate(
    rows: &[CsvRow],
    group_by: &[&str],
    metric: &str,
) -> Result<BTreeMap<Vec<String>, Summary>, AggregateError> {
    let mut groups: BTreeMap<Vec<String>, Vec<f64>> = BTreeMap::new();
    for r in rows {
        let key = group_by
            .iter()
            .map(|g| r.field(g).ok_or_else(|| AggregateError::UnknownColumn(g.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let v = r.metric(metric).ok_or_else(|| AggregateError::UnknownColumn(metric.to_string()))?;
        groups.entry(key).or_default().push(v);
    }
    groups
        .into_iter()
        .map(|(k, vs)| match summarize(&vs) {
            Ok(s) => Ok((k, s)),
            Err(_) => Err(AggregateError::InsufficientReplicates { group: k, n: vs.len() }),
        })
        .collect()
}
