use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use super::{ExperimentConfig, ExperimentKind};
use crate::error::{Error, Result};

/// Column order of every emitted CSV file.
pub const CSV_HEADER: [&str; 13] = [
    "kind",
    "n",
    "k",
    "seed",
    "row",
    "trial",
    "degree",
    "metric",
    "empirical",
    "predicted",
    "rel_error",
    "std",
    "status",
];

const DECIMALS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Trial,
    /// Mean over the successful trials of one `(degree, metric)` cell.
    Summary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    TotalWeight,
    LargestComponent,
    NontrivialCount,
    RankDensity,
    CoreFraction,
    CoreDensity,
    RankDeficit,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::TotalWeight => "total_weight",
            Metric::LargestComponent => "largest_component",
            Metric::NontrivialCount => "nontrivial_count",
            Metric::RankDensity => "rank_density",
            Metric::CoreFraction => "core_fraction",
            Metric::CoreDensity => "core_density",
            Metric::RankDeficit => "rank_deficit",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "total_weight" => Metric::TotalWeight,
            "largest_component" => Metric::LargestComponent,
            "nontrivial_count" => Metric::NontrivialCount,
            "rank_density" => Metric::RankDensity,
            "core_fraction" => Metric::CoreFraction,
            "core_density" => Metric::CoreDensity,
            "rank_deficit" => Metric::RankDeficit,
            _ => return Err(Error::invalid(format!("unknown metric {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub kind: ExperimentKind,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub row: RowKind,
    /// `None` on summary rows.
    pub trial: Option<usize>,
    pub degree: Option<f64>,
    pub metric: Metric,
    /// Summary rows with no successful trial carry no value.
    pub empirical: Option<f64>,
    pub predicted: Option<f64>,
    /// `|empirical - predicted| / max(|predicted|, 1e-12)`.
    pub rel_error: Option<f64>,
    /// Sample standard deviation, summary rows only.
    pub std: Option<f64>,
    pub status: TrialStatus,
}

pub(crate) fn relative_error(empirical: f64, predicted: f64) -> f64 {
    (empirical - predicted).abs() / predicted.abs().max(1e-12)
}

impl ExperimentRecord {
    pub(crate) fn trial_row(
        cfg: &ExperimentConfig,
        trial: usize,
        degree: Option<f64>,
        metric: Metric,
        empirical: f64,
        predicted: Option<f64>,
        ok: bool,
    ) -> Self {
        Self {
            kind: cfg.kind,
            n: cfg.n,
            k: cfg.k,
            seed: cfg.seed,
            row: RowKind::Trial,
            trial: Some(trial),
            degree,
            metric,
            empirical: Some(empirical),
            predicted,
            rel_error: predicted.map(|p| relative_error(empirical, p)),
            std: None,
            status: if ok {
                TrialStatus::Ok
            } else {
                TrialStatus::Failed
            },
        }
    }

    pub(crate) fn summary_row(
        cfg: &ExperimentConfig,
        degree: Option<f64>,
        metric: Metric,
        mean: Option<f64>,
        std: Option<f64>,
        predicted: Option<f64>,
    ) -> Self {
        Self {
            kind: cfg.kind,
            n: cfg.n,
            k: cfg.k,
            seed: cfg.seed,
            row: RowKind::Summary,
            trial: None,
            degree,
            metric,
            empirical: mean,
            predicted,
            rel_error: mean.zip(predicted).map(|(e, p)| relative_error(e, p)),
            std,
            status: if mean.is_some() {
                TrialStatus::Ok
            } else {
                TrialStatus::Failed
            },
        }
    }

    fn to_fields(&self) -> [String; 13] {
        let num = |x: Option<f64>| x.map(|v| format!("{v:.DECIMALS$}")).unwrap_or_default();
        [
            self.kind.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            self.seed.to_string(),
            match self.row {
                RowKind::Trial => "trial",
                RowKind::Summary => "summary",
            }
            .to_string(),
            self.trial.map(|t| t.to_string()).unwrap_or_default(),
            num(self.degree),
            self.metric.to_string(),
            num(self.empirical),
            num(self.predicted),
            num(self.rel_error),
            num(self.std),
            match self.status {
                TrialStatus::Ok => "ok",
                TrialStatus::Failed => "failed",
            }
            .to_string(),
        ]
    }
}

/// Writes the header and one line per record.
pub fn write_records<W: Write>(
    records: &[ExperimentRecord],
    out: W,
) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.to_fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `records` to `path`, replacing any existing file.
pub fn emit_csv(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_records(records, file).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    kind: String,
    n: usize,
    k: usize,
    seed: u64,
    row: String,
    trial: Option<usize>,
    degree: Option<f64>,
    metric: String,
    empirical: Option<f64>,
    predicted: Option<f64>,
    rel_error: Option<f64>,
    std: Option<f64>,
    status: String,
}

impl RawRecord {
    fn into_record(self) -> Result<ExperimentRecord> {
        let row = match self.row.as_str() {
            "trial" => RowKind::Trial,
            "summary" => RowKind::Summary,
            other => return Err(Error::invalid(format!("unknown row kind {other:?}"))),
        };
        let status = match self.status.as_str() {
            "ok" => TrialStatus::Ok,
            "failed" => TrialStatus::Failed,
            other => return Err(Error::invalid(format!("unknown status {other:?}"))),
        };
        if (row == RowKind::Trial) != self.trial.is_some() {
            return Err(Error::invalid(
                "trial index must be present exactly on trial rows",
            ));
        }
        Ok(ExperimentRecord {
            kind: self.kind.parse()?,
            n: self.n,
            k: self.k,
            seed: self.seed,
            row,
            trial: self.trial,
            degree: self.degree,
            metric: self.metric.parse()?,
            empirical: self.empirical,
            predicted: self.predicted,
            rel_error: self.rel_error,
            std: self.std,
            status,
        })
    }
}

/// Parses CSV text written by [`write_records`].
pub fn parse_records<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            msg: "unexpected header".into(),
        });
    }
    let mut out = Vec::new();
    for (i, raw) in reader.deserialize::<RawRecord>().enumerate() {
        let line = i + 2;
        let raw = raw.map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        out.push(raw.into_record().map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_records(file)
}
