//! Declarative experiment suites: config parsing, CSV output and run manifests.
//!
//! A suite config (TOML, or JSON when the file ends in `.json`) has optional
//! `[gap]` and `[calibration]` tables and any number of `[[scaling]]` tables.
//! Seeds may be written as a list or as `{ start = 0, count = 20 }`.
//! Rationals are strings such as `"5/2"`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::theorem_lab::{
    bound_calibration_experiment, iteration_scaling_experiment, theorem1_gap_experiment, CalibrationConfig,
    CalibrationRow, ExperimentRecord, GapCheckConfig, GapExperiment, GapReport, ScalingConfig, SlopeFit,
};

pub const GAP_HEADERS: [&str; 6] = ["seed", "s", "v_A", "v_min_s", "gap_ratio", "subsets_checked"];
pub const CALIBRATION_HEADERS: [&str; 7] = ["q", "m_X", "n_X", "delta", "predicted_beta", "empirical_freq", "trials"];
pub const RECORD_HEADERS: [&str; 9] = [
    "m",
    "n",
    "rho",
    "eps",
    "seed",
    "queries",
    "distinct_vertices",
    "outcome",
    "wall_time_ms",
];

#[derive(Deserialize)]
#[serde(untagged)]
enum SeedSpec {
    List(Vec<u64>),
    Range { start: u64, count: u64 },
}

/// Accepts either a seed list or a `{ start, count }` range.
pub fn seed_list<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<u64>, D::Error> {
    Ok(match SeedSpec::deserialize(d)? {
        SeedSpec::List(v) => v,
        SeedSpec::Range { start, count } => (start..start.saturating_add(count)).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    /// Worker threads; 0 lets the pool decide.
    #[serde(default = "one")]
    pub parallel: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapCheckConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationConfig>,
    #[serde(default)]
    pub scaling: Vec<ScalingConfig>,
}

fn one() -> usize {
    1
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<SuiteConfig> {
        toml::from_str(text).map_err(|e| Error::parse("experiment config", e.message().to_string() + &span_note(text, e.span())))
    }

    pub fn from_json(text: &str) -> Result<SuiteConfig> {
        serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("experiment config (line {}, column {})", e.line(), e.column()), e))
    }

    pub fn load(path: &Path) -> Result<SuiteConfig> {
        let text = fs::read_to_string(path)?;
        let cfg = if path.extension().is_some_and(|e| e == "json") {
            SuiteConfig::from_json(&text)?
        } else {
            SuiteConfig::from_toml(&text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names: Vec<&str> = self.scaling.iter().map(|s| s.name.as_str()).collect();
        for name in &names {
            let ok = !name.is_empty()
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
                && !["gap", "gap_seeds", "gap_summary", "calibration", "slopes", "manifest"].contains(name);
            if !ok {
                return Err(Error::InvalidParameter(format!("scaling experiment name {name:?} is not usable as a file name")));
            }
        }
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("scaling experiment names must be unique".into()));
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form of the parsed config.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serialises");
        hex::encode(Sha256::digest(&canonical))
    }

    pub fn seeds(&self) -> BTreeMap<String, Vec<u64>> {
        let mut out = BTreeMap::new();
        if let Some(g) = &self.gap {
            out.insert("gap".into(), g.seeds.clone());
        }
        if let Some(c) = &self.calibration {
            out.insert("calibration".into(), vec![c.seed]);
        }
        for s in &self.scaling {
            out.insert(s.name.clone(), s.seeds.clone());
        }
        out
    }
}

fn span_note(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(r) => {
            let before = &text[..r.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
            format!(" (line {line}, column {column})")
        }
        None => String::new(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub experiment: String,
    pub cell: String,
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config_digest: String,
    pub seeds: BTreeMap<String, Vec<u64>>,
    pub versions: BTreeMap<String, String>,
    pub started_ms: u64,
    pub finished_ms: u64,
    pub outputs: Vec<OutputFile>,
    pub failures: Vec<CellFailure>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialises") + "\n"
    }

    pub fn from_json(text: &str) -> Result<RunManifest> {
        serde_json::from_str(text).map_err(|e| Error::parse(format!("manifest (line {}, column {})", e.line(), e.column()), e))
    }
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

pub fn module_versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("dwlab".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("generator".to_string(), crate::rng::GENERATOR_VERSION.to_string()),
    ])
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn csv_error(context: &str, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::parse(context, format!("{other:?}")),
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

pub fn write_gap_csv<W: Write>(w: W, rows: &[GapReport]) -> Result<()> {
    let mut out = csv_writer(w);
    let ctx = "gap csv";
    out.write_record(GAP_HEADERS).map_err(|e| csv_error(ctx, e))?;
    for r in rows {
        out.write_record([
            r.seed.to_string(),
            r.s.to_string(),
            rational::format(&r.v_a),
            rational::format(&r.v_min_s),
            rational::format(&r.gap_ratio),
            r.subsets_checked.to_string(),
        ])
        .map_err(|e| csv_error(ctx, e))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_calibration_csv<W: Write>(w: W, rows: &[CalibrationRow]) -> Result<()> {
    let mut out = csv_writer(w);
    let ctx = "calibration csv";
    out.write_record(CALIBRATION_HEADERS).map_err(|e| csv_error(ctx, e))?;
    for r in rows {
        out.write_record([
            rational::format(&r.q),
            r.m_x.to_string(),
            r.n_x.to_string(),
            r.delta.to_string(),
            r.predicted_beta.to_string(),
            r.empirical_freq.to_string(),
            r.trials.to_string(),
        ])
        .map_err(|e| csv_error(ctx, e))?;
    }
    out.flush()?;
    Ok(())
}

/// Experiment records. A trailing `blocks` column is added when `with_blocks`.
pub fn write_records_csv<W: Write>(w: W, rows: &[ExperimentRecord], with_blocks: bool) -> Result<()> {
    let mut out = csv_writer(w);
    let ctx = "experiment csv";
    let mut headers: Vec<&str> = RECORD_HEADERS.to_vec();
    if with_blocks {
        headers.push("blocks");
    }
    out.write_record(&headers).map_err(|e| csv_error(ctx, e))?;
    for r in rows {
        let mut fields = vec![
            r.m.to_string(),
            r.n.to_string(),
            rational::format(&r.rho),
            rational::format(&r.eps),
            r.seed.to_string(),
            opt(&r.queries),
            opt(&r.distinct_vertices),
            r.outcome.clone(),
            opt(&r.wall_time_ms),
        ];
        if with_blocks {
            fields.push(r.blocks.to_string());
        }
        out.write_record(&fields).map_err(|e| csv_error(ctx, e))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_slopes_csv<W: Write>(w: W, rows: &[(String, SlopeFit)]) -> Result<()> {
    let mut out = csv_writer(w);
    let ctx = "slopes csv";
    out.write_record([
        "experiment",
        "variable",
        "m",
        "rho",
        "eps",
        "blocks",
        "slope",
        "intercept",
        "rms_residual",
        "points",
        "skipped",
    ])
    .map_err(|e| csv_error(ctx, e))?;
    for (name, s) in rows {
        out.write_record([
            name.clone(),
            s.variable.name().to_string(),
            s.m.to_string(),
            s.rho.as_ref().map(rational::format).unwrap_or_default(),
            s.eps.as_ref().map(rational::format).unwrap_or_default(),
            opt(&s.blocks),
            opt(&s.fit.as_ref().map(|f| f.slope)),
            opt(&s.fit.as_ref().map(|f| f.intercept)),
            opt(&s.fit.as_ref().map(|f| f.rms_residual)),
            opt(&s.fit.as_ref().map(|f| f.points)),
            s.skipped.to_string(),
        ])
        .map_err(|e| csv_error(ctx, e))?;
    }
    out.flush()?;
    Ok(())
}

fn write_gap_extras(dir: &Path, e: &GapExperiment) -> Result<()> {
    let ctx = "gap csv";
    let mut out = csv_writer(fs::File::create(dir.join("gap_seeds.csv"))?);
    out.write_record(["seed", "effective_seed", "v_A", "v_A_over_p", "width"])
        .map_err(|e| csv_error(ctx, e))?;
    for s in &e.seeds {
        out.write_record([
            s.seed.to_string(),
            s.effective_seed.to_string(),
            rational::format(&s.v_a),
            rational::format(&s.v_a_over_p),
            rational::format(&s.width),
        ])
        .map_err(|e| csv_error(ctx, e))?;
    }
    out.flush()?;

    let mut out = csv_writer(fs::File::create(dir.join("gap_summary.csv"))?);
    out.write_record([
        "s",
        "pass_fraction",
        "min_gap_constant",
        "log_bound",
        "power_bound",
        "active_branch",
    ])
    .map_err(|e| csv_error(ctx, e))?;
    for ((s, frac), (_, c)) in e.pass_fraction.iter().zip(&e.measured_gap_constant) {
        out.write_record([
            s.to_string(),
            frac.to_string(),
            rational::format(c),
            e.size_branch.log_bound.to_string(),
            e.size_branch.power_bound.to_string(),
            e.size_branch.active.to_string(),
        ])
        .map_err(|e| csv_error(ctx, e))?;
    }
    out.flush()?;
    Ok(())
}

fn reader<R: Read>(r: R, context: &str, expected: &[&str]) -> Result<csv::Reader<R>> {
    let mut rd = csv::ReaderBuilder::new().from_reader(r);
    let headers = rd.headers().map_err(|e| csv_error(context, e))?.clone();
    let got: Vec<&str> = headers.iter().collect();
    if !got.starts_with(expected) {
        return Err(Error::parse(context, format!("expected headers {expected:?}, found {got:?}")));
    }
    Ok(rd)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, context: &str, line: u64) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse()
        .map_err(|_| Error::parse(format!("{context} line {line}"), format!("bad value {raw:?} in column {}", i + 1)))
}

fn opt_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, context: &str, line: u64) -> Result<Option<T>> {
    if rec.get(i).unwrap_or("").is_empty() {
        Ok(None)
    } else {
        field(rec, i, context, line).map(Some)
    }
}

fn rat_field(rec: &csv::StringRecord, i: usize, context: &str, line: u64) -> Result<Rational> {
    let raw = rec.get(i).unwrap_or("");
    rational::parse(raw)
        .ok_or_else(|| Error::parse(format!("{context} line {line}"), format!("bad rational {raw:?} in column {}", i + 1)))
}

fn records<R: Read>(rd: &mut csv::Reader<R>, context: &str) -> Result<Vec<(u64, csv::StringRecord)>> {
    rd.records()
        .map(|r| {
            let r = r.map_err(|e| csv_error(context, e))?;
            Ok((r.position().map_or(0, |p| p.line()), r))
        })
        .collect()
}

pub fn read_gap_csv<R: Read>(r: R) -> Result<Vec<GapReport>> {
    let ctx = "gap csv";
    let mut rd = reader(r, ctx, &GAP_HEADERS)?;
    records(&mut rd, ctx)?
        .into_iter()
        .map(|(line, rec)| {
            Ok(GapReport {
                seed: field(&rec, 0, ctx, line)?,
                s: field(&rec, 1, ctx, line)?,
                v_a: rat_field(&rec, 2, ctx, line)?,
                v_min_s: rat_field(&rec, 3, ctx, line)?,
                gap_ratio: rat_field(&rec, 4, ctx, line)?,
                subsets_checked: field(&rec, 5, ctx, line)?,
            })
        })
        .collect()
}

/// `hits` is recovered as `round(empirical_freq * trials)`.
pub fn read_calibration_csv<R: Read>(r: R) -> Result<Vec<CalibrationRow>> {
    let ctx = "calibration csv";
    let mut rd = reader(r, ctx, &CALIBRATION_HEADERS)?;
    records(&mut rd, ctx)?
        .into_iter()
        .map(|(line, rec)| {
            let empirical_freq: f64 = field(&rec, 5, ctx, line)?;
            let trials: u64 = field(&rec, 6, ctx, line)?;
            Ok(CalibrationRow {
                q: rat_field(&rec, 0, ctx, line)?,
                m_x: field(&rec, 1, ctx, line)?,
                n_x: field(&rec, 2, ctx, line)?,
                delta: field(&rec, 3, ctx, line)?,
                predicted_beta: field(&rec, 4, ctx, line)?,
                empirical_freq,
                hits: (empirical_freq * trials as f64).round() as u64,
                trials,
            })
        })
        .collect()
}

/// Reads experiment records; `blocks` defaults to 1 when the column is absent.
/// Error messages are not part of the CSV and come back as `None`.
pub fn read_records_csv<R: Read>(r: R) -> Result<Vec<ExperimentRecord>> {
    let ctx = "experiment csv";
    let mut rd = reader(r, ctx, &RECORD_HEADERS)?;
    let has_blocks = rd.headers().map_err(|e| csv_error(ctx, e))?.get(9) == Some("blocks");
    records(&mut rd, ctx)?
        .into_iter()
        .map(|(line, rec)| {
            Ok(ExperimentRecord {
                m: field(&rec, 0, ctx, line)?,
                n: field(&rec, 1, ctx, line)?,
                rho: rat_field(&rec, 2, ctx, line)?,
                eps: rat_field(&rec, 3, ctx, line)?,
                seed: field(&rec, 4, ctx, line)?,
                queries: opt_field(&rec, 5, ctx, line)?,
                distinct_vertices: opt_field(&rec, 6, ctx, line)?,
                outcome: rec.get(7).unwrap_or("").to_string(),
                wall_time_ms: opt_field(&rec, 8, ctx, line)?,
                blocks: if has_blocks { field(&rec, 9, ctx, line)? } else { 1 },
                error: None,
            })
        })
        .collect()
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
    pub gap: Option<GapExperiment>,
    pub calibration: Option<Vec<CalibrationRow>>,
    pub scaling: Vec<(String, crate::theorem_lab::ScalingRun)>,
}

impl SuiteOutcome {
    pub fn failed(&self) -> bool {
        !self.manifest.failures.is_empty()
    }
}

/// Runs every configured experiment, writes the CSVs and `manifest.json`
/// into `out_dir`. Data files depend only on the config; timestamps live in
/// the manifest.
pub fn run_suite(cfg: &SuiteConfig, out_dir: &Path, command_line: &[String]) -> Result<SuiteOutcome> {
    cfg.validate()?;
    let started_ms = now_ms();
    fs::create_dir_all(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallel)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;

    let mut written: Vec<&str> = Vec::new();
    let mut scaling_files = Vec::new();
    let mut failures = Vec::new();

    let gap = match &cfg.gap {
        Some(g) => {
            let e = pool.install(|| theorem1_gap_experiment(g))?;
            write_gap_csv(fs::File::create(out_dir.join("gap.csv"))?, &e.rows)?;
            write_gap_extras(out_dir, &e)?;
            written.extend(["gap.csv", "gap_seeds.csv", "gap_summary.csv"]);
            Some(e)
        }
        None => None,
    };

    let calibration = match &cfg.calibration {
        Some(c) => {
            let rows = pool.install(|| bound_calibration_experiment(c))?;
            write_calibration_csv(fs::File::create(out_dir.join("calibration.csv"))?, &rows)?;
            written.push("calibration.csv");
            Some(rows)
        }
        None => None,
    };

    let mut scaling = Vec::new();
    let mut slopes = Vec::new();
    for sc in &cfg.scaling {
        let run = pool.install(|| iteration_scaling_experiment(sc))?;
        let file = format!("{}.csv", sc.name);
        write_records_csv(fs::File::create(out_dir.join(&file))?, &run.records, sc.varies_blocks())?;
        for r in run.records.iter().filter(|r| !r.succeeded()) {
            failures.push(CellFailure {
                experiment: sc.name.clone(),
                cell: format!(
                    "m={} rho={} eps={} blocks={} seed={}",
                    r.m / r.blocks.max(1),
                    rational::format(&r.rho),
                    rational::format(&r.eps),
                    r.blocks,
                    r.seed
                ),
                outcome: r.outcome.clone(),
                error: r.error.clone(),
            });
        }
        slopes.extend(run.slopes.iter().cloned().map(|s| (sc.name.clone(), s)));
        scaling_files.push(file);
        scaling.push((sc.name.clone(), run));
    }
    if !cfg.scaling.is_empty() {
        write_slopes_csv(fs::File::create(out_dir.join("slopes.csv"))?, &slopes)?;
    }

    let mut outputs = Vec::new();
    let names = written
        .iter()
        .map(|s| s.to_string())
        .chain(scaling_files)
        .chain((!cfg.scaling.is_empty()).then(|| "slopes.csv".to_string()));
    for name in names {
        let sha256 = sha256_file(&out_dir.join(&name))?;
        outputs.push(OutputFile { path: name, sha256 });
    }

    let manifest = RunManifest {
        command_line: command_line.to_vec(),
        config_digest: cfg.digest(),
        seeds: cfg.seeds(),
        versions: module_versions(),
        started_ms,
        finished_ms: now_ms(),
        outputs,
        failures,
    };
    let manifest_path = out_dir.join("manifest.json");
    fs::write(&manifest_path, manifest.to_json())?;
    Ok(SuiteOutcome {
        manifest,
        manifest_path,
        gap,
        calibration,
        scaling,
    })
}
