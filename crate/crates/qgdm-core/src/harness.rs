//! Batch experiment harness: sweep (scenario x policy x episode), aggregate
//! the per-episode metrics, and emit report tables as CSV or JSON.
//!
//! The harness is the reproducibility boundary of the project, so two rules
//! are absolute. First, per-episode randomness depends only on the base seed
//! and the episode index — never on thread scheduling — so serial and
//! parallel runs of the same config produce identical reports. Second, any
//! episode that fails hard (e.g. vehicle placement cannot satisfy the
//! spacing constraint) aborts the whole batch with the failing seed and
//! episode index in the error: silently dropping episodes would corrupt the
//! collision/success-rate denominators.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::payoff::PayoffWeights;
use crate::policy::{DecisionConfig, Policy, PolicyKind, QuantumOverrides};
use crate::sim::{
    compute_metrics, run_episode, ActionMagnitudes, AggregateMetrics, EpisodeOptions,
    EpisodeResult, IdmParams, MobilParams, ScenarioKind, ScenarioSpec, SimError, TraceRecord,
};
use crate::game::EuNormalization;

/// Report serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl ReportFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }

    /// File name of the report this format produces.
    pub fn file_name(self) -> &'static str {
        match self {
            ReportFormat::Csv => "report.csv",
            ReportFormat::Json => "report.json",
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format '{other}'; expected csv or json")),
        }
    }
}

/// A complete description of one batch experiment. Deserialized from JSON;
/// every field has a default, so `{}` is the full five-scenario,
/// seven-policy sweep at the default episode counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Scenarios to sweep. Order does not matter: report rows are always
    /// sorted by (scenario, policy) name.
    pub scenarios: Vec<ScenarioKind>,
    /// Policies to sweep.
    pub policies: Vec<PolicyKind>,
    /// Episodes per (scenario, policy) cell; `null` uses each scenario's
    /// default Monte-Carlo count.
    pub episodes: Option<u64>,
    /// Base seed; episode k draws from the (seed, k) random substream.
    pub seed: u64,
    /// Where report (and trace) files go; `null` means the current
    /// directory at emit time.
    pub out_dir: Option<PathBuf>,
    pub format: ReportFormat,
    /// Record one JSON-lines decision trace file per (scenario, policy).
    pub trace: bool,
    /// Measure wall-clock decision latency. On by default; switch off when
    /// comparing report bytes across runs, since the clock is not seeded.
    pub record_latency: bool,
    /// Worker threads for the episode pool; `null` sizes it to the machine.
    pub threads: Option<usize>,
    pub weights: PayoffWeights,
    pub magnitudes: ActionMagnitudes,
    pub eu_normalization: EuNormalization,
    pub quantum: QuantumOverrides,
    pub idm: IdmParams,
    pub mobil: MobilParams,
    /// Per-scenario geometry/placement overrides; scenarios not listed here
    /// use their built-in spec.
    pub scenario_specs: HashMap<ScenarioKind, ScenarioSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenarios: ScenarioKind::ALL.to_vec(),
            policies: PolicyKind::ALL.to_vec(),
            episodes: None,
            seed: 1,
            out_dir: None,
            format: ReportFormat::Csv,
            trace: false,
            record_latency: true,
            threads: None,
            weights: PayoffWeights::default(),
            magnitudes: ActionMagnitudes::default(),
            eu_normalization: EuNormalization::default(),
            quantum: QuantumOverrides::default(),
            idm: IdmParams::default(),
            mobil: MobilParams::default(),
            scenario_specs: HashMap::new(),
        }
    }
}

impl ExperimentConfig {
    /// Parse and validate a config from JSON text.
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Parse and validate a config file.
    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Checks the cross-field invariants. [`from_json`](Self::from_json)
    /// already calls this; call it again after mutating a parsed config.
    pub fn validate(&self) -> Result<(), HarnessError> {
        fn invalid(msg: String) -> Result<(), HarnessError> {
            Err(HarnessError::Invalid(msg))
        }
        if self.scenarios.is_empty() {
            return invalid("scenario list must not be empty".into());
        }
        if self.policies.is_empty() {
            return invalid("policy list must not be empty".into());
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            if self.scenarios[..i].contains(s) {
                return invalid(format!("scenario '{s}' listed twice"));
            }
        }
        for (i, p) in self.policies.iter().enumerate() {
            if self.policies[..i].contains(p) {
                return invalid(format!("policy '{p}' listed twice"));
            }
        }
        if self.episodes == Some(0) {
            return invalid("episode count must be at least 1".into());
        }
        if self.threads == Some(0) {
            return invalid("thread count must be at least 1".into());
        }
        self.weights.validate().map_err(|e| HarnessError::Invalid(e.to_string()))?;
        for (kind, spec) in &self.scenario_specs {
            if spec.kind != *kind {
                return invalid(format!(
                    "scenario_specs entry '{kind}' holds a spec for '{}'",
                    spec.kind
                ));
            }
            spec.validate().map_err(|e| HarnessError::Invalid(e.to_string()))?;
        }
        for (model, table) in
            [("qgdm_u", &self.quantum.qgdm_u), ("qgdm_g", &self.quantum.qgdm_g)]
        {
            for (circuit, config) in table {
                if config.circuit != *circuit {
                    return invalid(format!(
                        "{model} override keyed {circuit:?} declares circuit {:?}",
                        config.circuit
                    ));
                }
                config
                    .validate()
                    .map_err(|e| HarnessError::Invalid(format!("{model} override: {e}")))?;
            }
        }
        Ok(())
    }

    /// The scenario spec a batch run will use for `kind`.
    pub fn spec_for(&self, kind: ScenarioKind) -> ScenarioSpec {
        self.scenario_specs
            .get(&kind)
            .cloned()
            .unwrap_or_else(|| ScenarioSpec::default_for(kind))
    }

    /// Episode count for one (scenario, policy) cell.
    pub fn episodes_for(&self, kind: ScenarioKind) -> u64 {
        self.episodes.unwrap_or_else(|| kind.default_episodes())
    }

    /// The per-decision configuration shared by every policy in the batch.
    pub fn decision_config(&self) -> DecisionConfig {
        DecisionConfig {
            weights: self.weights,
            magnitudes: self.magnitudes,
            eu_normalization: self.eu_normalization,
            quantum: self.quantum.clone(),
        }
    }

    fn episode_options(&self) -> EpisodeOptions {
        EpisodeOptions {
            trace: self.trace,
            record_latency: self.record_latency,
            magnitudes: self.magnitudes,
            idm: self.idm,
            mobil: self.mobil,
        }
    }
}

/// One aggregate report line: a (scenario, policy) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: ScenarioKind,
    pub method: PolicyKind,
    pub metrics: AggregateMetrics,
}

/// The decision traces of every episode in one (scenario, policy) cell,
/// in episode order. Only collected when the config asks for traces.
#[derive(Debug, Clone)]
pub struct CellTraces {
    pub scenario: ScenarioKind,
    pub policy: PolicyKind,
    pub episodes: Vec<Vec<TraceRecord>>,
}

/// Everything a batch run produces, before any file is written.
#[derive(Debug, Clone)]
pub struct BatchReport {
    /// Sorted by (scenario name, policy name).
    pub rows: Vec<ReportRow>,
    /// One entry per cell when tracing is on, in row order; empty otherwise.
    pub traces: Vec<CellTraces>,
}

/// Harness-level failures.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid experiment config: {0}")]
    Invalid(String),
    #[error("could not parse experiment config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{scenario} x {policy}: episode {episode} under seed {seed} failed: {source}")]
    Episode {
        scenario: ScenarioKind,
        policy: PolicyKind,
        seed: u64,
        episode: u64,
        #[source]
        source: SimError,
    },
    #[error("report output failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Run the full sweep described by `config`.
///
/// Episodes of one cell run in parallel on a private worker pool; results
/// are collected back into episode order before aggregation, so the report
/// is identical whatever the pool size. The first failing episode (in
/// episode order) aborts the batch.
pub fn run_batch(config: &ExperimentConfig) -> Result<BatchReport, HarnessError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Invalid(format!("worker pool: {e}")))?;

    let mut scenarios = config.scenarios.clone();
    scenarios.sort_by_key(|s| s.as_str());
    let mut policies = config.policies.clone();
    policies.sort_by_key(|p| p.as_str());

    let decision = config.decision_config();
    let opts = config.episode_options();

    let mut rows = Vec::with_capacity(scenarios.len() * policies.len());
    let mut traces = Vec::new();
    for &scenario in &scenarios {
        let spec = config.spec_for(scenario);
        let episodes = config.episodes_for(scenario);
        for &kind in &policies {
            let policy = Policy::new(kind, decision.clone());
            let results: Vec<Result<EpisodeResult, SimError>> = pool.install(|| {
                (0..episodes)
                    .into_par_iter()
                    .map(|episode| run_episode(&policy, &spec, config.seed, episode, &opts))
                    .collect()
            });
            let mut completed = Vec::with_capacity(results.len());
            for (episode, result) in results.into_iter().enumerate() {
                match result {
                    Ok(r) => completed.push(r),
                    Err(source) => {
                        return Err(HarnessError::Episode {
                            scenario,
                            policy: kind,
                            seed: config.seed,
                            episode: episode as u64,
                            source,
                        });
                    }
                }
            }
            let metrics = compute_metrics(&completed);
            rows.push(ReportRow { scenario, method: kind, metrics });
            if config.trace {
                traces.push(CellTraces {
                    scenario,
                    policy: kind,
                    episodes: completed.into_iter().map(|r| r.trace).collect(),
                });
            }
        }
    }
    Ok(BatchReport { rows, traces })
}

/// The pinned CSV header. Byte-stable: downstream plotting scripts key on
/// these exact column names.
pub const CSV_HEADER: &str = "scenario,method,episodes,cr_pct,sr_pct,n_col,hd_m,v_mean,a_mean,\
                              t_mean,rho_cll,rho_clr,rho_kl,lat_mean_ms,lat_max_ms";

/// Render rows as CSV: the pinned header plus one line per row, floats with
/// four decimal places. An empty row list yields a header-only file.
pub fn render_csv(rows: &[ReportRow]) -> String {
    let mut out = String::with_capacity(96 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let m = &row.metrics;
        out.push_str(&format!(
            "{},{},{},{:.4},{:.4},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
            row.scenario,
            row.method,
            m.episodes,
            m.cr_pct,
            m.sr_pct,
            m.n_col,
            m.hd_m,
            m.v_mean,
            m.a_mean,
            m.t_mean,
            m.rho_cll,
            m.rho_clr,
            m.rho_kl,
            m.lat_mean_ms,
            m.lat_max_ms,
        ));
    }
    out
}

/// Render rows as a JSON array mirroring the CSV records: same field names,
/// same order, numbers written with the same four decimal places (trailing
/// zeros and all, which JSON permits).
pub fn render_json(rows: &[ReportRow]) -> String {
    let mut out = String::with_capacity(256 * rows.len() + 8);
    out.push('[');
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let m = &row.metrics;
        out.push_str(&format!(
            "\n  {{\"scenario\": \"{}\", \"method\": \"{}\", \"episodes\": {}, \
             \"cr_pct\": {:.4}, \"sr_pct\": {:.4}, \"n_col\": {}, \"hd_m\": {:.4}, \
             \"v_mean\": {:.4}, \"a_mean\": {:.4}, \"t_mean\": {:.4}, \"rho_cll\": {:.4}, \
             \"rho_clr\": {:.4}, \"rho_kl\": {:.4}, \"lat_mean_ms\": {:.4}, \
             \"lat_max_ms\": {:.4}}}",
            row.scenario,
            row.method,
            m.episodes,
            m.cr_pct,
            m.sr_pct,
            m.n_col,
            m.hd_m,
            m.v_mean,
            m.a_mean,
            m.t_mean,
            m.rho_cll,
            m.rho_clr,
            m.rho_kl,
            m.lat_mean_ms,
            m.lat_max_ms,
        ));
    }
    out.push_str(if rows.is_empty() { "]\n" } else { "\n]\n" });
    out
}

/// One trace line: an episode tag plus the decision record.
#[derive(Serialize)]
struct TraceLine<'a> {
    episode: u64,
    #[serde(flatten)]
    record: &'a TraceRecord,
}

/// Write the report (and any traces) under `dir`, creating it if missing.
/// Returns the paths written: the report file first, then one
/// `trace_<scenario>_<policy>.jsonl` per traced cell.
pub fn emit_report(
    report: &BatchReport,
    format: ReportFormat,
    dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir)?;
    let body = match format {
        ReportFormat::Csv => render_csv(&report.rows),
        ReportFormat::Json => render_json(&report.rows),
    };
    let report_path = dir.join(format.file_name());
    fs::write(&report_path, body)?;
    let mut written = vec![report_path];
    for cell in &report.traces {
        let mut body = String::new();
        for (episode, records) in cell.episodes.iter().enumerate() {
            for record in records {
                let line = TraceLine { episode: episode as u64, record };
                body.push_str(
                    &serde_json::to_string(&line).expect("trace records are plain data"),
                );
                body.push('\n');
            }
        }
        let path = dir.join(format!("trace_{}_{}.jsonl", cell.scenario, cell.policy));
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
