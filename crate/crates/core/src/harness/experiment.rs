//! Experiment records and the drivers that execute them.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{Configuration, LatticeError};
use crate::runtime::{Metrics, ModeError, RunOptions, RuntimeError, ScheduleMode, World};

use super::generators::{generate, GenError};
use super::render::{render, RenderFormat, RenderOptions};
use super::snapshot::Snapshot;

pub const METRICS_HEADER: [&str; 7] = ["n", "mode", "seed", "ticks", "activation_units", "merges", "comparisons"];

/// Everything needed to reproduce a batch of runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Generator family; ignored when `config` is set.
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    /// Configuration file to load instead of a generator.
    #[serde(default)]
    pub config: Option<PathBuf>,
    pub mode: String,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub stability_window: Option<u64>,
    #[serde(default)]
    pub tick_budget: Option<u64>,
    pub out: PathBuf,
    /// `svg` or `ascii`.
    #[serde(default)]
    pub render: Option<String>,
}

/// A list of experiments, read by `sweep`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub runs: Vec<ExperimentSpec>,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Generator(#[from] GenError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error(transparent)]
    Render(#[from] super::render::FormatError),
    #[error("seed {seed}: {source}")]
    Runtime { seed: u64, source: RuntimeError },
    #[error("experiment needs either a family or a config file")]
    NoSource,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("bad spec file {path}: {message}")]
    Spec { path: PathBuf, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.to_path_buf(), source }
}

/// One row of `metrics.csv`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub n: usize,
    pub mode: String,
    pub seed: u64,
    pub ticks: u64,
    pub activation_units: u64,
    pub merges: u64,
    pub comparisons: u64,
}

impl MetricsRow {
    pub fn new(n: usize, mode: ScheduleMode, seed: u64, m: &Metrics) -> Self {
        Self {
            n,
            mode: mode.short_name().to_string(),
            seed,
            ticks: m.ticks,
            activation_units: m.activation_units,
            merges: m.merges,
            comparisons: m.comparisons,
        }
    }
}

/// Outcome of one seed.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub row: MetricsRow,
    pub leaders: usize,
    /// Invariant failures seen by the observer; empty on success.
    pub problems: Vec<String>,
    pub trace: String,
    pub snapshot: Snapshot,
}

impl RunRecord {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

impl ExperimentSpec {
    pub fn configuration(&self, seed: u64) -> Result<Configuration, ExperimentError> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            return Ok(Configuration::from_json(&text)?);
        }
        let family = self.family.as_deref().ok_or(ExperimentError::NoSource)?;
        Ok(generate(family, &self.params, seed)?)
    }

    pub fn options(&self) -> RunOptions {
        RunOptions {
            stability_window: self.stability_window,
            tick_budget: self.tick_budget,
            record_trace: true,
            check_merges: true,
            ..RunOptions::default()
        }
    }

    pub fn render_format(&self) -> Result<Option<RenderFormat>, ExperimentError> {
        Ok(self.render.as_deref().map(str::parse).transpose()?)
    }
}

/// Runs one seed to quiescence and checks the final state.
pub fn run_seed(spec: &ExperimentSpec, seed: u64) -> Result<RunRecord, ExperimentError> {
    let config = spec.configuration(seed)?;
    let n = config.len();
    let mode = ScheduleMode::parse(&spec.mode, n)?;
    let mut world = World::new(config, mode, seed, spec.options());
    let metrics = world
        .run_to_quiescence()
        .map_err(|source| ExperimentError::Runtime { seed, source })?
        .clone();
    let mut problems = Vec::new();
    let leaders = world.leaders().len();
    if leaders != 1 {
        problems.push(format!("{leaders} leaders at quiescence"));
    }
    if let Err(e) = world.check_forest() {
        problems.push(e);
    }
    problems.extend(world.merge_report().violations.iter().cloned());
    Ok(RunRecord {
        row: MetricsRow::new(n, mode, seed, &metrics),
        leaders,
        problems,
        trace: world.trace().to_string(),
        snapshot: Snapshot::capture(&world),
    })
}

pub fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(METRICS_HEADER)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<(), ExperimentError> {
    fs::write(path, text).map_err(io_err(path))
}

/// Runs every seed of `spec`. `metrics.csv` holds one row per seed; trace,
/// snapshot and drawing go to the output directory for a single seed and
/// to `seed-<s>/` subdirectories otherwise.
pub fn run(spec: &ExperimentSpec) -> Result<Vec<RunRecord>, ExperimentError> {
    let format = spec.render_format()?;
    fs::create_dir_all(&spec.out).map_err(io_err(&spec.out))?;
    let mut records = Vec::new();
    for &seed in &spec.seeds {
        let record = run_seed(spec, seed)?;
        let dir = if spec.seeds.len() == 1 {
            spec.out.clone()
        } else {
            spec.out.join(format!("seed-{seed}"))
        };
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        write(&dir.join("trace.log"), &record.trace)?;
        write(&dir.join("final.json"), &record.snapshot.to_json())?;
        match format {
            Some(RenderFormat::Svg) => write(
                &dir.join("render.svg"),
                &render(&record.snapshot, RenderFormat::Svg, RenderOptions::default()),
            )?,
            Some(RenderFormat::Ascii) => write(
                &dir.join("render.txt"),
                &render(&record.snapshot, RenderFormat::Ascii, RenderOptions::default()),
            )?,
            None => {}
        }
        records.push(record);
    }
    let rows: Vec<MetricsRow> = records.iter().map(|r| r.row.clone()).collect();
    write_metrics(&spec.out.join("metrics.csv"), &rows)?;
    Ok(records)
}

pub fn load_sweep(path: &Path) -> Result<SweepSpec, ExperimentError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| ExperimentError::Spec {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Runs the entries on up to `threads` worker threads. Results keep the
/// order of `sweep.runs`.
pub fn sweep(sweep: &SweepSpec, threads: usize) -> Vec<Result<Vec<RunRecord>, ExperimentError>> {
    let threads = threads.max(1);
    let mut results: Vec<Option<Result<Vec<RunRecord>, ExperimentError>>> =
        sweep.runs.iter().map(|_| None).collect();
    for (chunk_specs, chunk_out) in sweep.runs.chunks(threads).zip(results.chunks_mut(threads)) {
        std::thread::scope(|s| {
            let handles: Vec<_> = chunk_specs.iter().map(|spec| s.spawn(move || run(spec))).collect();
            for (slot, h) in chunk_out.iter_mut().zip(handles) {
                *slot = Some(h.join().expect("worker thread panicked"));
            }
        });
    }
    results.into_iter().map(|r| r.expect("every entry ran")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(out: &Path, seeds: Vec<u64>) -> ExperimentSpec {
        ExperimentSpec {
            family: Some("s1".into()),
            params: BTreeMap::new(),
            config: None,
            mode: "sync".into(),
            seeds,
            stability_window: None,
            tick_budget: None,
            out: out.to_path_buf(),
            render: Some("svg".into()),
        }
    }

    #[test]
    fn writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let records = run(&spec(dir.path(), vec![0])).unwrap();
        assert!(records[0].passed());
        let csv = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
        assert_eq!(csv.lines().next().unwrap(), METRICS_HEADER.join(","));
        assert_eq!(csv.lines().count(), 2);
        for f in ["trace.log", "final.json", "render.svg"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }

    #[test]
    fn several_seeds_use_subdirectories() {
        let dir = tempfile::tempdir().unwrap();
        run(&spec(dir.path(), vec![1, 2])).unwrap();
        assert!(dir.path().join("seed-1/final.json").exists());
        assert!(dir.path().join("seed-2/trace.log").exists());
        let csv = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn spec_round_trips() {
        let s = spec(Path::new("out"), vec![0, 1]);
        let text = serde_json::to_string(&SweepSpec { runs: vec![s.clone()] }).unwrap();
        let back: SweepSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.runs[0], s);
    }
}
