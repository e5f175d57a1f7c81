//! Experiment configuration, orchestration and result emission.
//!
//! A run is described by an [`ExperimentSpec`], resolved from a flat JSON
//! config file plus command-line overrides. All SNR values are given in dB
//! here and converted to linear power exactly once before reaching the
//! analysis, Monte Carlo and placement modules.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{outage_closed_form_detailed, OutageQuery, OutageRoute};
use crate::error::{Error, Result};
use crate::montecarlo::{mc_outage, mc_system_outage, McEstimate};
use crate::placement::{
    full_cooperation_sweep, optimize_sweep, OptimizationResult, PlacementPolicy, SearchMode,
    SystemConfig,
};

/// `|z|` above which `validate` reports a failure.
pub const VALIDATION_Z_LIMIT: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Outage,
    Sweep,
    Optimize,
    Simulate,
    Validate,
    Table1,
    Fig2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Flat config file; every field optional. Units are explicit in the names.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub k_ens: Option<usize>,
    pub n_files: Option<usize>,
    pub cache_size: Option<usize>,
    pub cache_sizes: Option<Vec<usize>>,
    pub rho: Option<f64>,
    pub rate_bps_hz: Option<f64>,
    pub snr_db: Option<Vec<f64>>,
    pub t_d: Option<usize>,
    /// Replication degrees of a fixed policy, most popular file first.
    pub policy: Option<Vec<usize>>,
    pub validate_k: Option<Vec<usize>>,
    pub mc_trials: Option<u64>,
    pub seed: Option<u64>,
    pub full_enumeration: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Fields set in `overrides` replace those in `self`.
    pub fn merge(self, overrides: ConfigFile) -> ConfigFile {
        ConfigFile {
            k_ens: overrides.k_ens.or(self.k_ens),
            n_files: overrides.n_files.or(self.n_files),
            cache_size: overrides.cache_size.or(self.cache_size),
            cache_sizes: overrides.cache_sizes.or(self.cache_sizes),
            rho: overrides.rho.or(self.rho),
            rate_bps_hz: overrides.rate_bps_hz.or(self.rate_bps_hz),
            snr_db: overrides.snr_db.or(self.snr_db),
            t_d: overrides.t_d.or(self.t_d),
            policy: overrides.policy.or(self.policy),
            validate_k: overrides.validate_k.or(self.validate_k),
            mc_trials: overrides.mc_trials.or(self.mc_trials),
            seed: overrides.seed.or(self.seed),
            full_enumeration: overrides.full_enumeration.or(self.full_enumeration),
        }
    }
}

/// Fully resolved experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub config: SystemConfig,
    pub snr_db: Vec<f64>,
    pub cache_sizes: Vec<usize>,
    pub t_d: Option<usize>,
    pub policy: Option<PlacementPolicy>,
    pub validate_k: Vec<usize>,
    pub mc_trials: u64,
    pub seed: u64,
    pub search: SearchMode,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

fn grid(from: i32, to: i32, step: usize) -> Vec<f64> {
    (from..=to).step_by(step).map(f64::from).collect()
}

impl ExperimentSpec {
    /// Applies per-mode defaults (`K = 5`, `N = 10`, `rho = 0.8`, `R = 1`) and
    /// validates the result.
    pub fn resolve(
        mode: Mode,
        file: ConfigFile,
        output_path: Option<PathBuf>,
        output_format: OutputFormat,
    ) -> Result<Self> {
        let defaults = SystemConfig::default_profile(3);
        let config = SystemConfig {
            k_ens: file.k_ens.unwrap_or(defaults.k_ens),
            n_files: file.n_files.unwrap_or(defaults.n_files),
            cache_size: file.cache_size.unwrap_or(defaults.cache_size),
            rho: file.rho.unwrap_or(defaults.rho),
            rate: file.rate_bps_hz.unwrap_or(defaults.rate),
        };
        let snr_db = file.snr_db.unwrap_or_else(|| match mode {
            Mode::Fig2 => grid(0, 60, 3),
            Mode::Validate => vec![0.0, 10.0, 20.0],
            _ => grid(0, 30, 3),
        });
        let mc_trials = file.mc_trials.unwrap_or(match mode {
            Mode::Validate => 1_000_000,
            Mode::Simulate => 100_000,
            _ => 0,
        });
        let spec = Self {
            mode,
            cache_sizes: file.cache_sizes.unwrap_or_else(|| match mode {
                Mode::Table1 | Mode::Fig2 => vec![1, 3, 5, 7, 9],
                _ => vec![config.cache_size],
            }),
            config,
            snr_db,
            t_d: file.t_d,
            policy: file
                .policy
                .map(PlacementPolicy::new)
                .transpose()
                .map_err(config_err)?,
            validate_k: file.validate_k.unwrap_or_else(|| vec![2, 3, 5, 8]),
            mc_trials,
            seed: file.seed.unwrap_or(1),
            search: if file.full_enumeration.unwrap_or(false) {
                SearchMode::Full
            } else {
                SearchMode::Pruned
            },
            output_path,
            output_format,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::Config("SNR grid is empty".into()));
        }
        if let Some(db) = self.snr_db.iter().find(|db| !db.is_finite()) {
            return Err(Error::Config(format!("SNR value {db} is not finite")));
        }
        if self.cache_sizes.is_empty() {
            return Err(Error::Config("no cache sizes given".into()));
        }
        for &m in &self.cache_sizes {
            self.config_for(m).validate()?;
        }
        match self.mode {
            Mode::Outage | Mode::Validate => {
                if let Some(t) = self.t_d {
                    let ks: &[usize] = match self.mode {
                        Mode::Outage => std::slice::from_ref(&self.config.k_ens),
                        _ => &self.validate_k,
                    };
                    if t == 0 || ks.iter().any(|&k| t > k) {
                        return Err(Error::Config(format!("t_d={t} outside [1, K]")));
                    }
                }
                if self.mode == Mode::Validate {
                    if self.mc_trials == 0 {
                        return Err(Error::Config("validate needs mc_trials >= 1".into()));
                    }
                    if self.validate_k.is_empty() || self.validate_k.contains(&0) {
                        return Err(Error::Config("validate_k must list K >= 1".into()));
                    }
                }
            }
            Mode::Simulate if self.mc_trials == 0 => {
                return Err(Error::Config("simulate needs mc_trials >= 1".into()));
            }
            _ => {}
        }
        if let Some(policy) = &self.policy {
            for &m in &self.cache_sizes {
                policy
                    .check_feasible(&self.config_for(m))
                    .map_err(config_err)?;
            }
        }
        Ok(())
    }

    fn config_for(&self, cache_size: usize) -> SystemConfig {
        SystemConfig {
            cache_size,
            ..self.config.clone()
        }
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

/// One emitted value.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) => format_number(*x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(serde_json::Value::Null, serde_json::Value::Number),
            Cell::Int(i) => serde_json::Value::from(*i),
            Cell::Text(s) => serde_json::Value::from(s.as_str()),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

/// Scientific notation with 12 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.11e}")
}

fn mc_cells(est: Option<McEstimate>) -> [Cell; 2] {
    match est {
        Some(e) => [Cell::Num(e.mean), Cell::Num(e.std_error)],
        None => [Cell::Empty, Cell::Empty],
    }
}

fn t_vector(policy: &PlacementPolicy) -> String {
    policy
        .t()
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Column-named rows, rendered as CSV or a JSON array of objects.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::to_json))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("JSON values always serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutcome {
    pub table: Table,
    pub rendered: String,
    /// Some `validate` cell breached [`VALIDATION_Z_LIMIT`].
    pub validation_failed: bool,
}

/// Runs the experiment, writing the rendered output when a path is set.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let (table, validation_failed) = match spec.mode {
        Mode::Outage => (outage_table(spec)?, false),
        Mode::Sweep | Mode::Fig2 => (scheme_table(spec, true)?, false),
        Mode::Simulate => (scheme_table(spec, false)?, false),
        Mode::Optimize => (optimize_table(spec)?, false),
        Mode::Validate => validate_table(spec)?,
        Mode::Table1 => (table1(spec)?, false),
    };
    let rendered = table.render(spec.output_format);
    if let Some(path) = &spec.output_path {
        std::fs::write(path, &rendered)?;
    }
    Ok(ExperimentOutcome {
        table,
        rendered,
        validation_failed,
    })
}

/// Decorrelated per-cell seed.
fn cell_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn route_name(route: OutageRoute) -> &'static str {
    match route {
        OutageRoute::Hypoexponential => "hypoexponential",
        OutageRoute::Gamma => "gamma",
        OutageRoute::Series => "series",
    }
}

fn outage_table(spec: &ExperimentSpec) -> Result<Table> {
    let k = spec.config.k_ens;
    let degrees: Vec<usize> = spec.t_d.map_or_else(|| (1..=k).collect(), |t| vec![t]);
    let cells: Vec<(f64, usize)> = spec
        .snr_db
        .iter()
        .flat_map(|&db| degrees.iter().map(move |&t| (db, t)))
        .collect();
    let rows = cells
        .par_iter()
        .enumerate()
        .map(|(idx, &(db, t))| {
            let q = OutageQuery::new(k, t, crate::db_to_linear(db), spec.config.rate)?;
            let eval = outage_closed_form_detailed(&q)?;
            let mc = (spec.mc_trials > 0)
                .then(|| mc_outage(&q, spec.mc_trials, cell_seed(spec.seed, idx as u64)))
                .transpose()?;
            let [mean, se] = mc_cells(mc);
            Ok(vec![
                Cell::Num(db),
                Cell::Int(k as u64),
                Cell::Int(t as u64),
                Cell::Num(q.threshold()),
                Cell::Num(eval.value),
                Cell::Text(route_name(eval.route).into()),
                mean,
                se,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "snr_db",
        "k_ens",
        "t_d",
        "threshold",
        "outage_closed_form",
        "route",
        "outage_mc_mean",
        "outage_mc_stderr",
    ]);
    table.rows = rows;
    Ok(table)
}

/// System outage of one scheme along an SNR grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeCurve {
    pub scheme: &'static str,
    pub cache_size: usize,
    pub snr_db: Vec<f64>,
    pub results: Vec<OptimizationResult>,
}

impl SchemeCurve {
    pub fn outage(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.objective).collect()
    }
}

pub const PROPOSED: &str = "proposed";
pub const FULL_COOPERATION: &str = "full_cooperation";
pub const FIXED_POLICY: &str = "fixed_policy";

/// Optimized proposed-scheme and full-cooperation curves for one cache size.
pub fn scheme_curves(
    base: &SystemConfig,
    cache_size: usize,
    snr_db: &[f64],
    search: SearchMode,
) -> Result<[SchemeCurve; 2]> {
    let config = SystemConfig {
        cache_size,
        ..base.clone()
    };
    let powers: Vec<f64> = snr_db.iter().map(|&db| crate::db_to_linear(db)).collect();
    let proposed = optimize_sweep(&config, &powers, search)?;
    let baseline = full_cooperation_sweep(&config, &powers)?;
    Ok([
        SchemeCurve {
            scheme: PROPOSED,
            cache_size,
            snr_db: snr_db.to_vec(),
            results: proposed,
        },
        SchemeCurve {
            scheme: FULL_COOPERATION,
            cache_size,
            snr_db: snr_db.to_vec(),
            results: baseline,
        },
    ])
}

/// Fixed-policy curve, evaluated rather than optimized.
pub fn fixed_policy_curve(
    config: &SystemConfig,
    policy: &PlacementPolicy,
    snr_db: &[f64],
) -> Result<SchemeCurve> {
    let pop = config.popularity()?;
    let results = snr_db
        .iter()
        .map(|&db| {
            let power = crate::db_to_linear(db);
            let objective = crate::analysis::system_outage(config, policy, &pop, power)?;
            Ok(OptimizationResult {
                best: policy.clone(),
                objective,
                explored: 1,
                power,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SchemeCurve {
        scheme: FIXED_POLICY,
        cache_size: config.cache_size,
        snr_db: snr_db.to_vec(),
        results,
    })
}

const SCHEME_COLUMNS: [&str; 8] = [
    "snr_db",
    "scheme",
    "M",
    "n0",
    "t_vector",
    "outage_closed_form",
    "outage_mc_mean",
    "outage_mc_stderr",
];

/// Sweep-schema rows. `compare` emits the proposed and full-cooperation
/// schemes; otherwise the configured fixed policy (or the proposed optimum).
fn scheme_table(spec: &ExperimentSpec, compare: bool) -> Result<Table> {
    let mut curves = Vec::new();
    for &m in &spec.cache_sizes {
        let config = spec.config_for(m);
        match (&spec.policy, compare) {
            (Some(policy), false) => {
                curves.push(fixed_policy_curve(&config, policy, &spec.snr_db)?)
            }
            _ => {
                let [proposed, baseline] =
                    scheme_curves(&spec.config, m, &spec.snr_db, spec.search)?;
                curves.push(proposed);
                if compare {
                    curves.push(baseline);
                }
            }
        }
    }
    // M-major, then SNR, then scheme
    let mut cells = Vec::new();
    for m in &spec.cache_sizes {
        for j in 0..spec.snr_db.len() {
            for curve in curves.iter().filter(|c| c.cache_size == *m) {
                cells.push((curve, j));
            }
        }
    }
    let rows = cells
        .par_iter()
        .enumerate()
        .map(|(idx, &(curve, j))| {
            let r = &curve.results[j];
            let mc = (spec.mc_trials > 0)
                .then(|| {
                    mc_system_outage(
                        &spec.config_for(curve.cache_size),
                        &r.best,
                        r.power,
                        spec.mc_trials,
                        cell_seed(spec.seed, idx as u64),
                    )
                })
                .transpose()?;
            let [mean, se] = mc_cells(mc);
            Ok(vec![
                Cell::Num(curve.snr_db[j]),
                Cell::Text(curve.scheme.into()),
                Cell::Int(curve.cache_size as u64),
                Cell::Int(r.best.n0() as u64),
                Cell::Text(t_vector(&r.best)),
                Cell::Num(r.objective),
                mean,
                se,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&SCHEME_COLUMNS);
    table.rows = rows;
    Ok(table)
}

fn optimize_table(spec: &ExperimentSpec) -> Result<Table> {
    let mut table = Table::new(&["snr_db", "M", "n0", "t_vector", "objective", "explored"]);
    let powers: Vec<f64> = spec
        .snr_db
        .iter()
        .map(|&db| crate::db_to_linear(db))
        .collect();
    for &m in &spec.cache_sizes {
        let results = optimize_sweep(&spec.config_for(m), &powers, spec.search)?;
        for (db, r) in spec.snr_db.iter().zip(results) {
            table.rows.push(vec![
                Cell::Num(*db),
                Cell::Int(m as u64),
                Cell::Int(r.best.n0() as u64),
                Cell::Text(t_vector(&r.best)),
                Cell::Num(r.objective),
                Cell::Int(r.explored as u64),
            ]);
        }
    }
    Ok(table)
}

/// `t_d` values checked per `K`: `{1, ceil(K/2), K}`, deduplicated.
pub fn validation_degrees(k: usize) -> Vec<usize> {
    let mut v = vec![1, k.div_ceil(2), k];
    v.dedup();
    v
}

fn validate_table(spec: &ExperimentSpec) -> Result<(Table, bool)> {
    let mut cells = Vec::new();
    for &k in &spec.validate_k {
        let degrees = spec.t_d.map_or_else(|| validation_degrees(k), |t| vec![t]);
        for t in degrees {
            for &db in &spec.snr_db {
                cells.push((k, t, db));
            }
        }
    }
    let rows = cells
        .iter()
        .enumerate()
        .map(|(idx, &(k, t, db))| {
            let q = OutageQuery::new(k, t, crate::db_to_linear(db), spec.config.rate)?;
            let closed = outage_closed_form_detailed(&q)?.value;
            let mc = mc_outage(&q, spec.mc_trials, cell_seed(spec.seed, idx as u64))?;
            Ok((closed, mc, k, t, db))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut failed = false;
    let mut table = Table::new(&[
        "k_ens",
        "t_d",
        "snr_db",
        "outage_closed_form",
        "outage_mc_mean",
        "outage_mc_stderr",
        "z_score",
        "trials",
        "pass",
    ]);
    for (closed, mc, k, t, db) in rows {
        let z = mc.z_score(closed);
        let pass = z.abs() <= VALIDATION_Z_LIMIT;
        failed |= !pass;
        table.rows.push(vec![
            Cell::Int(k as u64),
            Cell::Int(t as u64),
            Cell::Num(db),
            Cell::Num(closed),
            Cell::Num(mc.mean),
            Cell::Num(mc.std_error),
            Cell::Num(z),
            Cell::Int(mc.trials),
            Cell::Text(if pass { "true" } else { "false" }.into()),
        ]);
    }
    Ok((table, failed))
}

fn db_label(db: f64) -> String {
    let mut s = String::new();
    write!(s, "{db}dB").unwrap();
    s
}

/// Optimal policy per `(M, SNR)`, consecutive SNR points with the same
/// policy merged into one `"<lo>dB-<hi>dB"` row; degrees zero-padded to `N`.
fn table1(spec: &ExperimentSpec) -> Result<Table> {
    let n = spec.config.n_files;
    let mut columns = vec!["M".to_string(), "snr_db".to_string(), "N_0".to_string()];
    columns.extend((1..=n).map(|i| format!("t_{i}")));
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    let powers: Vec<f64> = spec
        .snr_db
        .iter()
        .map(|&db| crate::db_to_linear(db))
        .collect();
    for &m in &spec.cache_sizes {
        let results = optimize_sweep(&spec.config_for(m), &powers, spec.search)?;
        let mut start = 0;
        while start < results.len() {
            let mut end = start;
            while end + 1 < results.len() && results[end + 1].best == results[start].best {
                end += 1;
            }
            let label = if start == end {
                db_label(spec.snr_db[start])
            } else {
                format!(
                    "{}-{}",
                    db_label(spec.snr_db[start]),
                    db_label(spec.snr_db[end])
                )
            };
            let best = &results[start].best;
            let mut row = vec![
                Cell::Int(m as u64),
                Cell::Text(label),
                Cell::Int(best.n0() as u64),
            ];
            row.extend(best.padded(n).into_iter().map(|t| Cell::Int(t as u64)));
            table.rows.push(row);
            start = end + 1;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(mode: Mode, file: ConfigFile) -> ExperimentSpec {
        ExperimentSpec::resolve(mode, file, None, OutputFormat::Csv).unwrap()
    }

    #[test]
    fn number_format_is_pinned() {
        assert_eq!(format_number(1.0 - (-1.0f64).exp()), "6.32120558829e-1");
        assert_eq!(format_number(0.0), "0.00000000000e0");
    }

    #[test]
    fn single_node_outage_row() {
        let s = spec(
            Mode::Outage,
            ConfigFile {
                k_ens: Some(1),
                t_d: Some(1),
                snr_db: Some(vec![0.0]),
                ..Default::default()
            },
        );
        let out = run_experiment(&s).unwrap();
        assert_eq!(out.table.rows.len(), 1);
        assert!(out.rendered.contains("6.32120558829e-1"));
    }

    #[test]
    fn flags_override_file() {
        let file = ConfigFile::parse(r#"{"k_ens": 4, "cache_size": 2, "seed": 9}"#).unwrap();
        let flags = ConfigFile {
            seed: Some(3),
            ..Default::default()
        };
        let s = spec(Mode::Optimize, file.merge(flags));
        assert_eq!(s.config.k_ens, 4);
        assert_eq!(s.config.cache_size, 2);
        assert_eq!(s.seed, 3);
    }

    #[test]
    fn config_errors() {
        assert!(ConfigFile::parse(r#"{"policy": [2.5, 1]}"#).is_err());
        assert!(ConfigFile::parse(r#"{"bogus": 1}"#).is_err());
        let bad = |mode, file| ExperimentSpec::resolve(mode, file, None, OutputFormat::Csv);
        assert!(matches!(
            bad(
                Mode::Sweep,
                ConfigFile {
                    snr_db: Some(vec![]),
                    ..Default::default()
                }
            ),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            bad(
                Mode::Optimize,
                ConfigFile {
                    cache_size: Some(10),
                    ..Default::default()
                }
            ),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            bad(
                Mode::Simulate,
                ConfigFile {
                    policy: Some(vec![1, 2]),
                    ..Default::default()
                }
            ),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            bad(
                Mode::Outage,
                ConfigFile {
                    t_d: Some(6),
                    ..Default::default()
                }
            ),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn table1_first_row() {
        let s = spec(
            Mode::Table1,
            ConfigFile {
                cache_sizes: Some(vec![1]),
                ..Default::default()
            },
        );
        let out = run_experiment(&s).unwrap();
        let first = out.rendered.lines().nth(1).unwrap();
        assert_eq!(first, "1,0dB,1,5,0,0,0,0,0,0,0,0,0");
        let second = out.rendered.lines().nth(2).unwrap();
        assert_eq!(second, "1,3dB-6dB,2,3,2,0,0,0,0,0,0,0,0");
    }

    #[test]
    fn json_output_shape() {
        let mut s = spec(
            Mode::Optimize,
            ConfigFile {
                snr_db: Some(vec![12.0]),
                ..Default::default()
            },
        );
        s.output_format = OutputFormat::Json;
        let out = run_experiment(&s).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.rendered).unwrap();
        assert_eq!(v[0]["n0"], 10);
        assert_eq!(v[0]["t_vector"], "2;2;2;2;2;1;1;1;1;1");
    }

    #[test]
    fn validation_degree_sets() {
        assert_eq!(validation_degrees(2), vec![1, 2]);
        assert_eq!(validation_degrees(5), vec![1, 3, 5]);
        assert_eq!(validation_degrees(1), vec![1]);
    }

    #[test]
    fn cell_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| cell_seed(1, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
