use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::decision::MmdReport;
use crate::dominance::{ObjectiveVector, ParetoArchive};
use crate::engine::{Algorithm, RunResult, StopReason, TraceRecord};
use crate::error::{Error, Result};

/// One archive row as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveRow {
    pub x: Vec<f64>,
    pub phi: ObjectiveVector,
}

/// Writes the archive as CSV: `x_0..x_{K-1}` then `phi_0..phi_{Q-1}`, each
/// value in scientific notation with 17 significant digits.
pub fn write_archive_csv<W: Write>(archive: &ParetoArchive, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let Some(first) = archive.members().first() else {
        w.flush()?;
        return Ok(());
    };
    let k = first.design.dim();
    let q = first.phi().len();
    let header: Vec<String> = (0..k)
        .map(|i| format!("x_{i}"))
        .chain((0..q).map(|j| format!("phi_{j}")))
        .collect();
    w.write_record(&header).map_err(csv_error)?;
    for m in archive.members() {
        let row: Vec<String> = m
            .design
            .values()
            .iter()
            .chain(m.phi().as_slice())
            .map(|v| format!("{v:.16e}"))
            .collect();
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Data(format!("archive CSV: {e}"))
}

/// Reads an archive CSV written by [`write_archive_csv`].
pub fn read_archive_csv<R: Read>(input: R) -> Result<Vec<ArchiveRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_error)?.clone();
    let k = header.iter().take_while(|h| h.starts_with("x_")).count();
    let q = header.len() - k;
    for (i, h) in header.iter().enumerate() {
        let expected = if i < k { format!("x_{i}") } else { format!("phi_{}", i - k) };
        if h != expected {
            return Err(Error::Data(format!("archive CSV: column {i} is `{h}`, expected `{expected}`")));
        }
    }
    if q < 2 {
        return Err(Error::Data("archive CSV needs at least two phi columns".into()));
    }
    let mut rows = Vec::new();
    for (n, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let values = record
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Data(format!("archive CSV row {}: `{s}`: {e}", n + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        let (x, phi) = values.split_at(k);
        rows.push(ArchiveRow {
            x: x.to_vec(),
            phi: ObjectiveVector::new(phi.to_vec())?,
        });
    }
    Ok(rows)
}

pub fn save_archive_csv(archive: &ParetoArchive, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_archive_csv(archive, std::io::BufWriter::new(file))
}

pub fn load_archive_csv(path: impl AsRef<Path>) -> Result<Vec<ArchiveRow>> {
    read_archive_csv(std::io::BufReader::new(std::fs::File::open(path)?))
}

/// Best-compromise member as reported in a summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compromise {
    pub index: usize,
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    pub l1_distance: f64,
}

impl Compromise {
    pub fn from_report(report: &MmdReport, rows: &[ArchiveRow]) -> Self {
        let row = &rows[report.index];
        Self {
            index: report.index,
            x: row.x.clone(),
            phi: row.phi.as_slice().to_vec(),
            l1_distance: report.l1_distances[report.index],
        }
    }
}

/// Counters and outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub algo: Algorithm,
    pub seed: u64,
    /// False when the run ended with an error.
    pub complete: bool,
    #[serde(default)]
    pub error: Option<String>,
    pub c_fw: usize,
    pub t_rl: usize,
    pub i_stop: usize,
    pub stop_reason: Option<StopReason>,
    pub failed_evaluations: usize,
    pub archive_size: usize,
    pub wall_time_s: f64,
    /// Error index against the known Pareto front, when there is one.
    #[serde(default)]
    pub xi: Option<f64>,
    #[serde(default)]
    pub compromise: Option<Compromise>,
}

impl Summary {
    pub fn from_result(result: &RunResult, seed: u64) -> Self {
        Self {
            algo: result.algo,
            seed,
            complete: true,
            error: None,
            c_fw: result.c_fw,
            t_rl: result.t_rl,
            i_stop: result.i_stop,
            stop_reason: Some(result.stop_reason),
            failed_evaluations: result.failed,
            archive_size: result.archive.len(),
            wall_time_s: result.wall_time,
            xi: None,
            compromise: None,
        }
    }

    /// Summary of a run that did not finish.
    pub fn incomplete(algo: Algorithm, seed: u64, error: String) -> Self {
        Self {
            algo,
            seed,
            complete: false,
            error: Some(error),
            c_fw: 0,
            t_rl: 0,
            i_stop: 0,
            stop_reason: None,
            failed_evaluations: 0,
            archive_size: 0,
            wall_time_s: 0.0,
            xi: None,
            compromise: None,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Appends trace records as newline-delimited JSON.
pub struct TraceWriter<W: Write> {
    out: W,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn write(&mut self, record: &TraceRecord) -> Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}
