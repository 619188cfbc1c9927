//! Experiment configuration and the commands behind the `incentive` binary.
//!
//! Every command returns the full text of its output file. Outputs start with
//! `# `-prefixed provenance lines (CSV) or a `provenance` object (JSON) that
//! echo the resolved configuration, so a file is enough to re-run its job.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytic::{
    cost_coefficients, cost_difference, optimal_incentive, optimal_preference, terminal_time, BoundaryChecks,
    CostCoefficients, RegimeClassification,
};
use crate::dynamics::{cost_quadrature, integrate, Stop};
use crate::game::{feasible_region, Boundary, GameParams, Region, Structure};
use crate::mc::{
    self, calibrate_scale, run_experiment, shape_correlation, Arena, CellSummary, McConfig, TracePoint, UpdateRule,
};
use crate::networks::{self, generate, to_edge_list, Graph, GraphRecord, NetworkModel, NetworkSpec};
use crate::seeding;
use crate::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Sub-seed path entry reserved for network generation.
const NETWORK_STREAM: u64 = 0x6e65_7477_6f72_6b00;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format {s:?}, expected csv or json"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Analytic,
    Ode,
    Mc,
    Classify,
    Netgen,
}

/// Preference grid `start:stop:step`, inclusive of `stop` when it lies on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl PGrid {
    pub const ANALYTIC_DEFAULT: PGrid = PGrid { start: 0.0, stop: 1.0, step: 0.02 };
    pub const MC_DEFAULT: PGrid = PGrid { start: 0.0, stop: 1.0, step: 0.1 };

    pub fn single(p: f64) -> Self {
        PGrid { start: p, stop: p, step: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(unit(self.start) && unit(self.stop) && self.start <= self.stop && self.step > 0.0) {
            return Err(Error::Config(format!("p-grid {self} must satisfy 0 <= start <= stop <= 1, step > 0")));
        }
        Ok(())
    }

    /// Grid points, rounded to 12 decimals so that `0.1 * 3` prints as `0.3`.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| {
                let p = self.start + i as f64 * self.step;
                ((p * 1e12).round() / 1e12).min(1.0)
            })
            .collect()
    }
}

impl fmt::Display for PGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

impl FromStr for PGrid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad p-grid {s:?}")));
        let grid = match parts.as_slice() {
            [p] => PGrid::single(num(p)?),
            [a, b, c] => PGrid { start: num(a)?, stop: num(b)?, step: num(c)? },
            _ => return Err(Error::Config(format!("p-grid {s:?} is not start:stop:step"))),
        };
        grid.validate()?;
        Ok(grid)
    }
}

impl TryFrom<String> for PGrid {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PGrid> for String {
    fn from(g: PGrid) -> String {
        g.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub b: f64,
    pub c: f64,
    /// Incentive magnitude; `None` means the optimal `2c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
}

impl GameConfig {
    pub fn incentive(&self) -> f64 {
        self.u.unwrap_or(2.0 * self.c)
    }

    pub fn params(&self, p: f64) -> Result<GameParams> {
        GameParams::new(self.b, self.c, self.incentive(), p)
    }
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig { b: 2.0, c: 1.0, u: None }
    }
}

/// One JSON document describing a job. Missing fields take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub network: NetworkModel,
    pub game: GameConfig,
    pub bounds: Boundary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<PGrid>,
    pub runs: usize,
    pub seed: u64,
    pub max_sweeps: u64,
    /// Selection strength for Fermi updating and for the regular-graph model.
    pub omega: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<UpdateRule>,
    /// Below this convergence rate an mc job exits with the non-convergence code.
    pub min_convergence: f64,
    pub format: Format,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::Analytic,
            network: NetworkModel::Complete { n: 100 },
            game: GameConfig::default(),
            bounds: Boundary { x0: 0.1, delta: 0.1 },
            p_grid: None,
            runs: 200,
            seed: 42,
            max_sweeps: mc::DEFAULT_MAX_SWEEPS,
            omega: mc::DEFAULT_OMEGA,
            rule: None,
            min_convergence: 0.99,
            format: Format::Csv,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.game.params(0.5)?;
        if let Some(g) = self.p_grid {
            g.validate()?;
        }
        if self.runs == 0 || self.max_sweeps == 0 {
            return Err(Error::Config("runs and max_sweeps must be >= 1".into()));
        }
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(Error::Config(format!("omega must lie in (0, 1], got {}", self.omega)));
        }
        if !(0.0..=1.0).contains(&self.min_convergence) {
            return Err(Error::Config("min_convergence must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> PGrid {
        self.p_grid.unwrap_or(match self.mode {
            Mode::Mc => PGrid::MC_DEFAULT,
            _ => PGrid::ANALYTIC_DEFAULT,
        })
    }

    pub fn network_spec(&self) -> NetworkSpec {
        NetworkSpec::new(self.network, seeding::derive(self.seed, &[NETWORK_STREAM]))
    }

    /// The replicator model used for analytic columns: the complete graph, or
    /// a regular graph with the network's nominal degree.
    pub fn structure(&self) -> Result<Structure> {
        let n = self.network.n();
        let k = match self.network {
            NetworkModel::Complete { n } => return Structure::complete(n),
            NetworkModel::Lattice { .. } => 4,
            NetworkModel::BarabasiAlbert { m, .. } => 2 * m,
            NetworkModel::WattsStrogatz { k, .. } => k,
            NetworkModel::ErdosRenyi { mean_degree, .. } => mean_degree.round() as usize,
        };
        Structure::regular(n, k, self.omega)
    }

    pub fn update_rule(&self) -> UpdateRule {
        self.rule.unwrap_or(match self.network {
            NetworkModel::Complete { .. } => UpdateRule::NormalizedImitation,
            _ => UpdateRule::Fermi { omega: self.omega },
        })
    }

    pub fn mc_config(&self, p: f64) -> Result<McConfig> {
        Ok(McConfig {
            game: self.game.params(p)?,
            bounds: self.bounds,
            rule: self.update_rule(),
            runs: self.runs,
            seed: self.seed,
            max_sweeps: self.max_sweeps,
        })
    }
}

/// CLI-side overrides; every `Some` replaces the config value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub network: Option<NetworkModel>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub u: Option<f64>,
    pub x0: Option<f64>,
    pub delta: Option<f64>,
    pub p_grid: Option<PGrid>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub max_sweeps: Option<u64>,
    pub omega: Option<f64>,
    pub min_convergence: Option<f64>,
    pub format: Option<Format>,
}

impl Overrides {
    pub fn apply(&self, mut cfg: ExperimentConfig) -> ExperimentConfig {
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        set!(
            mode => cfg.mode,
            network => cfg.network,
            b => cfg.game.b,
            c => cfg.game.c,
            x0 => cfg.bounds.x0,
            delta => cfg.bounds.delta,
            runs => cfg.runs,
            seed => cfg.seed,
            max_sweeps => cfg.max_sweeps,
            omega => cfg.omega,
            min_convergence => cfg.min_convergence,
            format => cfg.format,
        );
        if self.u.is_some() {
            cfg.game.u = self.u;
        }
        if self.p_grid.is_some() {
            cfg.p_grid = self.p_grid;
        }
        cfg
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed,
/// scientific notation outside `1e-5 <= |v| < 1e12`.
pub fn fmt_g(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn opt_g(v: Option<f64>) -> String {
    v.map(fmt_g).unwrap_or_default()
}

/// Text of a finished command plus an optional non-fatal failure that should
/// still set the exit code after the output is written.
#[derive(Debug)]
pub struct CommandOutput {
    pub text: String,
    pub failure: Option<Error>,
}

impl CommandOutput {
    fn ok(text: String) -> Self {
        CommandOutput { text, failure: None }
    }
}

struct Provenance {
    command: &'static str,
    seed: Option<u64>,
    config: Value,
    notes: Vec<(String, String)>,
}

impl Provenance {
    fn new(command: &'static str, seed: Option<u64>, config: Value) -> Self {
        Provenance { command, seed, config, notes: Vec::new() }
    }

    fn note(&mut self, key: &str, value: impl Into<String>) {
        self.notes.push((key.into(), value.into()));
    }

    fn csv_header(&self) -> String {
        let mut out = format!("# incentive {VERSION}\n# command: {}\n", self.command);
        if let Some(seed) = self.seed {
            writeln!(out, "# seed: {seed}").unwrap();
        }
        writeln!(out, "# config: {}", self.config).unwrap();
        for (k, v) in &self.notes {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        out
    }

    fn json(&self) -> Value {
        let mut v = json!({
            "tool": "incentive",
            "version": VERSION,
            "command": self.command,
            "config": self.config,
        });
        if let Some(seed) = self.seed {
            v["seed"] = json!(seed);
        }
        for (k, val) in &self.notes {
            v[k] = json!(val);
        }
        v
    }
}

fn emit_table(prov: &Provenance, format: Format, columns: &[&str], rows: &[Vec<String>], json_rows: Value) -> String {
    match format {
        Format::Csv => {
            let mut out = prov.csv_header();
            writeln!(out, "{}", columns.join(",")).unwrap();
            for row in rows {
                writeln!(out, "{}", row.join(",")).unwrap();
            }
            out
        }
        Format::Json => {
            let doc = json!({ "provenance": prov.json(), "rows": json_rows });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
    }
}

/// Two-column `quantity,value` layout used by the single-result commands.
fn emit_pairs(prov: &Provenance, format: Format, pairs: &[(&str, String)]) -> String {
    match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = pairs.iter().map(|(k, v)| vec![k.to_string(), v.clone()]).collect();
            emit_table(prov, format, &["quantity", "value"], &rows, Value::Null)
        }
        Format::Json => {
            let map: serde_json::Map<String, Value> = pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.parse::<f64>().map(|f| json!(f)).unwrap_or_else(|_| json!(v))))
                .collect();
            let doc = json!({ "provenance": prov.json(), "result": map });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub x0: f64,
    pub delta: f64,
    pub region: Region,
    pub classification: RegimeClassification,
    pub checks: BoundaryChecks,
}

/// Regime report for `(x0, δ)`; infeasible inputs are errors.
pub fn classify(x0: f64, delta: f64) -> Result<ClassifyReport> {
    let region = feasible_region(x0, delta)?;
    let bounds = Boundary::new(x0, delta)?;
    // The regime depends on the boundary conditions only; unit scale.
    let coeffs = cost_coefficients(&Structure::Complete { n: 3 }, &bounds, 1.0)?;
    let coeffs = CostCoefficients {
        alpha: coeffs.alpha / coeffs.vartheta,
        beta: coeffs.beta / coeffs.vartheta,
        gamma: coeffs.gamma / coeffs.vartheta,
        vartheta: 1.0,
        ..coeffs
    };
    Ok(ClassifyReport {
        x0,
        delta,
        region,
        classification: optimal_preference(&coeffs)?,
        checks: BoundaryChecks::new(&bounds)?,
    })
}

pub fn cmd_classify(x0: f64, delta: f64, format: Format) -> Result<CommandOutput> {
    let r = classify(x0, delta)?;
    let (g_norm, theta) = cost_difference(&Boundary { x0, delta }, 1.0)?;
    let sign = |v: f64| if v > 0.0 { "+" } else if v < 0.0 { "-" } else { "0" };
    let c = &r.checks;
    let pairs = [
        ("x0", fmt_g(x0)),
        ("delta", fmt_g(delta)),
        ("feasible", "true".into()),
        ("region", format!("{:?}", r.region).to_lowercase()),
        ("theta", fmt_g(theta)),
        ("g_over_vartheta", fmt_g(g_norm)),
        ("g_sign", sign(g_norm).into()),
        ("case", r.classification.case.label().into()),
        ("p_star", fmt_g(r.classification.p_opt())),
        ("check_margin", fmt_g(c.margin)),
        ("check_punish_threshold", fmt_g(c.punish_threshold)),
        ("check_reward_threshold", fmt_g(c.reward_threshold)),
        ("punishment_condition_met", (x0 > delta && c.margin >= c.punish_threshold).to_string()),
        ("reward_condition_met", (x0 < delta && c.margin >= c.reward_threshold).to_string()),
    ];
    let prov = Provenance::new("classify", None, json!({ "x0": x0, "delta": delta }));
    Ok(CommandOutput::ok(emit_pairs(&prov, format, &pairs)))
}

/// One row of a preference sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub j_analytic: f64,
    pub j_analytic_normalized: f64,
    pub j_mc_mean: Option<f64>,
    pub j_mc_stderr: Option<f64>,
    pub convergence_rate: Option<f64>,
    pub regime: String,
    pub status: String,
}

pub const SWEEP_COLUMNS: [&str; 8] = [
    "p",
    "j_analytic",
    "j_analytic_normalized",
    "j_mc_mean",
    "j_mc_stderr",
    "convergence_rate",
    "regime",
    "status",
];

impl SweepRow {
    fn csv(&self) -> Vec<String> {
        vec![
            fmt_g(self.p),
            fmt_g(self.j_analytic),
            fmt_g(self.j_analytic_normalized),
            opt_g(self.j_mc_mean),
            opt_g(self.j_mc_stderr),
            opt_g(self.convergence_rate),
            self.regime.clone(),
            self.status.clone(),
        ]
    }
}

/// The arena for an mc job; the graph is generated once and shared by all
/// replicas and preferences.
pub fn build_graph(cfg: &ExperimentConfig) -> Result<Option<Graph>> {
    match cfg.network {
        NetworkModel::Complete { .. } => Ok(None),
        _ => generate(&cfg.network_spec()).map(Some),
    }
}

fn arena<'g>(cfg: &ExperimentConfig, graph: &'g Option<Graph>) -> Arena<'g> {
    match graph {
        Some(g) => Arena::Network(g),
        None => Arena::WellMixed { n: cfg.network.n() },
    }
}

fn mc_cells(cfg: &ExperimentConfig, ps: &[f64], graph: &Option<Graph>) -> Vec<Result<CellSummary>> {
    let arena = arena(cfg, graph);
    ps.iter()
        .map(|&p| {
            let mcfg = cfg.mc_config(p)?;
            run_experiment(&mcfg, arena, &[p]).map(|mut v| v.remove(0))
        })
        .collect()
}

fn convergence_failure(cfg: &ExperimentConfig, cells: &[&CellSummary]) -> Option<Error> {
    cells
        .iter()
        .map(|c| c.convergence_rate)
        .fold(None, |worst: Option<f64>, r| Some(worst.map_or(r, |w| w.min(r))))
        .filter(|&worst| worst < cfg.min_convergence)
        .map(|rate| Error::NonConvergence { rate, threshold: cfg.min_convergence })
}

pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    let structure = cfg.structure()?;
    let bounds = Boundary::new(cfg.bounds.x0, cfg.bounds.delta)?;
    let coeffs = cost_coefficients(&structure, &bounds, cfg.game.c)?;
    let regime = optimal_preference(&coeffs)?;
    let ps = cfg.grid().points();

    let mut rows = ps
        .iter()
        .map(|&p| {
            let j = crate::analytic::cumulative_cost(&coeffs, p)?;
            Ok(SweepRow {
                p,
                j_analytic: j,
                j_analytic_normalized: j / coeffs.vartheta,
                j_mc_mean: None,
                j_mc_stderr: None,
                convergence_rate: None,
                regime: regime.case.label().into(),
                status: "ok".into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut prov = Provenance::new("sweep", Some(cfg.seed), serde_json::to_value(cfg)?);
    prov.note("structure", serde_json::to_string(&structure)?);
    prov.note("p_opt", fmt_g(regime.p_opt()));
    let mut failure = None;

    if cfg.mode == Mode::Mc {
        let graph = build_graph(cfg)?;
        let cells = mc_cells(cfg, &ps, &graph);
        for (row, cell) in rows.iter_mut().zip(&cells) {
            match cell {
                Ok(c) => {
                    row.j_mc_mean = Some(c.mean_cost);
                    row.j_mc_stderr = Some(c.stderr);
                    row.convergence_rate = Some(c.convergence_rate);
                }
                Err(e) => row.status = format!("error: {e}").replace(',', ";"),
            }
        }
        let ok: Vec<&CellSummary> = cells.iter().filter_map(|c| c.as_ref().ok()).collect();
        if let Some(note) = calibration_note(&rows) {
            prov.note("calibration", note);
        }
        failure = convergence_failure(cfg, &ok);
        if failure.is_none() && ok.len() < cells.len() {
            failure = cells.into_iter().find_map(|c| c.err());
        }
    }

    let json_rows = serde_json::to_value(&rows)?;
    let csv_rows: Vec<Vec<String>> = rows.iter().map(SweepRow::csv).collect();
    Ok(CommandOutput { text: emit_table(&prov, cfg.format, &SWEEP_COLUMNS, &csv_rows, json_rows), failure })
}

/// Scale fitted at the grid point nearest `p = 0.5`, and the shape correlation
/// of mean Monte Carlo costs against the analytic curve.
fn calibration_note(rows: &[SweepRow]) -> Option<String> {
    let usable: Vec<&SweepRow> = rows.iter().filter(|r| r.j_mc_mean.is_some_and(f64::is_finite)).collect();
    let anchor = usable.iter().min_by(|a, b| (a.p - 0.5).abs().total_cmp(&(b.p - 0.5).abs()))?;
    let scale = calibrate_scale(&[(anchor.j_mc_mean?, anchor.j_analytic)]).ok()?;
    let mc: Vec<f64> = usable.iter().filter_map(|r| r.j_mc_mean).collect();
    let an: Vec<f64> = usable.iter().map(|r| r.j_analytic).collect();
    let corr = if usable.len() > 2 { fmt_g(shape_correlation(&mc, &an)) } else { "n/a".into() };
    Some(format!("scale={} at p={} shape_correlation={}", fmt_g(scale), fmt_g(anchor.p), corr))
}

pub const MC_COLUMNS: [&str; 9] = [
    "p",
    "runs",
    "converged",
    "fixated_defection",
    "convergence_rate",
    "mean_cost",
    "stderr",
    "mean_expenditure",
    "mean_sweeps",
];

/// Aggregate Monte Carlo table, plus per-run traces when `with_traces`.
pub fn cmd_mc(cfg: &ExperimentConfig, with_traces: bool) -> Result<(CommandOutput, Option<String>)> {
    cfg.validate()?;
    let graph = build_graph(cfg)?;
    let ps = cfg.grid().points();
    let cells = mc_cells(cfg, &ps, &graph).into_iter().collect::<Result<Vec<_>>>()?;

    let mut prov = Provenance::new("mc", Some(cfg.seed), serde_json::to_value(cfg)?);
    prov.note("rule", serde_json::to_string(&cfg.update_rule())?);
    if let Some(g) = &graph {
        let r = networks::validate(g);
        prov.note("network", format!("nodes={} edges={} mean_degree={}", r.nodes, r.edges, fmt_g(r.mean_degree)));
    }
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            vec![
                fmt_g(c.p),
                c.runs.to_string(),
                c.converged.to_string(),
                c.fixated_defection.to_string(),
                fmt_g(c.convergence_rate),
                fmt_g(c.mean_cost),
                fmt_g(c.stderr),
                fmt_g(c.mean_expenditure),
                fmt_g(c.mean_sweeps),
            ]
        })
        .collect();
    let failure = convergence_failure(cfg, &cells.iter().collect::<Vec<_>>());
    let text = emit_table(&prov, cfg.format, &MC_COLUMNS, &rows, serde_json::to_value(&cells)?);

    let traces = if with_traces { Some(trace_table(cfg, &ps, &graph, &prov)?) } else { None };
    Ok((CommandOutput { text, failure }, traces))
}

fn trace_table(cfg: &ExperimentConfig, ps: &[f64], graph: &Option<Graph>, prov: &Provenance) -> Result<String> {
    let arena = arena(cfg, graph);
    let mut out = prov.csv_header();
    out.push_str("p,replica,sweep,fraction,cost\n");
    for &p in ps {
        let mcfg = cfg.mc_config(p)?;
        for r in 0..cfg.runs {
            let mut trace: Vec<TracePoint> = Vec::new();
            mc::run_replica(&mcfg, arena, mc::replica_seed(cfg.seed, r), Some(&mut trace))?;
            for t in trace {
                writeln!(out, "{},{r},{},{},{}", fmt_g(p), t.sweep, fmt_g(t.fraction), fmt_g(t.cost)).unwrap();
            }
        }
    }
    Ok(out)
}

/// Numerical solve under `u* = 2c`, next to the closed forms.
pub fn cmd_ode(structure: &Structure, bounds: &Boundary, c: f64, p: f64, step: f64, format: Format) -> Result<CommandOutput> {
    let bounds = Boundary::new(bounds.x0, bounds.delta)?;
    let u = optimal_incentive(c)?;
    let tr = integrate(structure, bounds.x0, |_| u, c, step, Stop::AtState(bounds.terminal_state()))?;
    let t_num = tr.crossing_time.expect("AtState reports a crossing");
    let t_exact = terminal_time(structure, &bounds, c)?;
    let j_num = cost_quadrature(structure, &bounds, p, |_| u, c, step)?;
    let coeffs = cost_coefficients(structure, &bounds, c)?;
    let j_exact = crate::analytic::cumulative_cost(&coeffs, p)?;
    let pairs = [
        ("structure", structure.label().to_string()),
        ("u_star", fmt_g(u)),
        ("t_f", fmt_g(t_num)),
        ("t_f_closed_form", fmt_g(t_exact)),
        ("j", fmt_g(j_num)),
        ("j_closed_form", fmt_g(j_exact)),
        ("j_relative_error", fmt_g(((j_num - j_exact) / j_exact).abs())),
        ("vartheta", fmt_g(coeffs.vartheta)),
    ];
    let config = json!({ "structure": structure, "bounds": bounds, "c": c, "p": p, "step": step });
    let prov = Provenance::new("ode", None, config);
    Ok(CommandOutput::ok(emit_pairs(&prov, format, &pairs)))
}

/// Edge list (CSV format) or JSON record for a generated network.
pub fn cmd_netgen(spec: &NetworkSpec, format: Format) -> Result<CommandOutput> {
    let graph = generate(spec)?;
    let report = networks::validate(&graph);
    let mut prov = Provenance::new("netgen", Some(spec.seed), serde_json::to_value(spec)?);
    prov.note(
        "validation",
        format!(
            "passed={} nodes={} edges={} min_degree={} max_degree={} mean_degree={}",
            report.passed,
            report.nodes,
            report.edges,
            report.min_degree,
            report.max_degree,
            fmt_g(report.mean_degree)
        ),
    );
    let text = match format {
        Format::Csv => prov.csv_header() + &to_edge_list(&graph),
        Format::Json => {
            let doc = json!({
                "provenance": prov.json(),
                "validation": report,
                "graph": GraphRecord::new(*spec, &graph),
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    Ok(CommandOutput::ok(text))
}
