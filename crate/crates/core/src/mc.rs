//! Agent-based Monte Carlo simulation with institutional cost accounting.
//!
//! One sweep is `n` elementary updates and counts as one unit of time. After
//! every elementary update the ledger adds `G(x) / n`, where `G` is the
//! squared institutional expenditure rate at the current cooperator fraction.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::game::{pairwise_payoffs, Boundary, GameParams, PairwisePayoffs};
use crate::networks::Graph;
use crate::seeding;
use crate::{Error, Result};

pub const DEFAULT_MAX_SWEEPS: u64 = 100_000;
pub const DEFAULT_OMEGA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    C,
    D,
}

/// Where agents meet: everyone with everyone, or along graph edges.
#[derive(Debug, Clone, Copy)]
pub enum Arena<'g> {
    WellMixed { n: usize },
    Network(&'g Graph),
}

impl Arena<'_> {
    pub fn n(&self) -> usize {
        match self {
            Arena::WellMixed { n } => *n,
            Arena::Network(g) => g.n(),
        }
    }

    /// Ordered interacting pairs: `n(n-1)` when well mixed, `n <k>` otherwise.
    pub fn interaction_count(&self) -> f64 {
        match self {
            Arena::WellMixed { n } => (*n as f64) * (*n as f64 - 1.0),
            Arena::Network(g) => 2.0 * g.edge_count() as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    strategies: Vec<Strategy>,
    cooperators: usize,
}

impl Population {
    pub fn from_strategies(strategies: Vec<Strategy>) -> Self {
        let cooperators = strategies.iter().filter(|&&s| s == Strategy::C).count();
        Population { strategies, cooperators }
    }

    pub fn n(&self) -> usize {
        self.strategies.len()
    }

    pub fn cooperators(&self) -> usize {
        self.cooperators
    }

    pub fn fraction(&self) -> f64 {
        self.cooperators as f64 / self.n() as f64
    }

    pub fn strategy(&self, i: usize) -> Strategy {
        self.strategies[i]
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    fn set(&mut self, i: usize, s: Strategy) {
        let old = std::mem::replace(&mut self.strategies[i], s);
        match (old, s) {
            (Strategy::D, Strategy::C) => self.cooperators += 1,
            (Strategy::C, Strategy::D) => self.cooperators -= 1,
            _ => {}
        }
    }
}

/// Places exactly `round(n x0)` cooperators uniformly at random.
pub fn init_population(n: usize, x0: f64, rng: &mut impl Rng) -> Result<Population> {
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::InvalidParams(format!("x0 must lie in [0, 1], got {x0}")));
    }
    let count = (n as f64 * x0).round() as usize;
    if count == 0 || count >= n {
        return Err(Error::InvalidParams(format!(
            "x0 = {x0} gives {count} of {n} cooperators, an absorbing start"
        )));
    }
    let mut strategies = vec![Strategy::D; n];
    for i in index::sample(rng, n, count) {
        strategies[i] = Strategy::C;
    }
    Ok(Population { strategies, cooperators: count })
}

pub fn fermi_probability(pi_i: f64, pi_j: f64, omega: f64) -> f64 {
    1.0 / (1.0 + (-omega * (pi_j - pi_i)).exp())
}

/// Proportional imitation `(f_j - f_i) / M` for an advantageous model, else 0.
pub fn imitation_probability(f_i: f64, f_j: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::InvalidNormalization { m, diff: f_j - f_i });
    }
    if f_j <= f_i {
        return Ok(0.0);
    }
    let q = (f_j - f_i) / m;
    if q > 1.0 {
        return Err(Error::InvalidNormalization { m, diff: f_j - f_i });
    }
    Ok(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum UpdateRule {
    Fermi { omega: f64 },
    /// Proportional imitation normalized by the payoff-matrix spread. Well-mixed only.
    NormalizedImitation,
}

impl UpdateRule {
    /// The rule used for each arena unless configured otherwise.
    pub fn default_for(arena: &Arena) -> Self {
        match arena {
            Arena::WellMixed { .. } => UpdateRule::NormalizedImitation,
            Arena::Network(_) => UpdateRule::Fermi { omega: DEFAULT_OMEGA },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub game: GameParams,
    pub bounds: Boundary,
    pub rule: UpdateRule,
    pub runs: usize,
    pub seed: u64,
    pub max_sweeps: u64,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        self.game.validate()?;
        if self.runs == 0 {
            return Err(Error::InvalidParams("runs must be >= 1".into()));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidParams("max_sweeps must be >= 1".into()));
        }
        if !(self.bounds.delta > 0.0 && self.bounds.delta < 1.0) {
            return Err(Error::InvalidParams(format!("delta must lie in (0, 1), got {}", self.bounds.delta)));
        }
        if let UpdateRule::Fermi { omega } = self.rule {
            if !(omega > 0.0 && omega <= 1.0) {
                return Err(Error::InvalidParams(format!("omega must lie in (0, 1], got {omega}")));
            }
        }
        Ok(())
    }

    /// Smallest cooperator count strictly above `n (1 - δ)`.
    pub fn target_count(&self, n: usize) -> usize {
        let level = n as f64 * (1.0 - self.bounds.delta);
        ((level + 1e-9).floor() as usize + 1).min(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Reached,
    FixatedDefection,
    MaxSweeps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostLedger {
    /// Accumulated squared-expenditure cost.
    pub cost: f64,
    /// Accumulated raw expenditure `N u [p x + (1-p)(1-x)]`.
    pub expenditure: f64,
    pub updates: u64,
    pub converged: bool,
    /// Sweep during which the target was first exceeded.
    pub crossing_sweep: Option<u64>,
    pub outcome: Option<Outcome>,
    pub final_fraction: f64,
}

impl CostLedger {
    pub fn new() -> Self {
        CostLedger {
            cost: 0.0,
            expenditure: 0.0,
            updates: 0,
            converged: false,
            crossing_sweep: None,
            outcome: None,
            final_fraction: f64::NAN,
        }
    }
}

impl Default for CostLedger {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub sweep: u64,
    pub fraction: f64,
    pub cost: f64,
}

/// A running replica: population, arena and the constants derived from the
/// configuration.
pub struct Simulation<'g> {
    pub pop: Population,
    pub ledger: CostLedger,
    arena: Arena<'g>,
    game: GameParams,
    payoffs: PairwisePayoffs,
    rule: UpdateRule,
    normalization: f64,
    target: usize,
    max_updates: u64,
    interactions: f64,
}

impl<'g> Simulation<'g> {
    pub fn new(cfg: &McConfig, arena: Arena<'g>, pop: Population) -> Result<Self> {
        cfg.validate()?;
        if pop.n() != arena.n() {
            return Err(Error::InvalidParams(format!("population of {} on arena of {}", pop.n(), arena.n())));
        }
        if matches!((cfg.rule, arena), (UpdateRule::NormalizedImitation, Arena::Network(_))) {
            return Err(Error::InvalidParams("normalized imitation is defined for well-mixed populations only".into()));
        }
        let payoffs = pairwise_payoffs(&cfg.game)?;
        let n = arena.n();
        Ok(Simulation {
            pop,
            ledger: CostLedger::new(),
            arena,
            game: cfg.game,
            payoffs,
            rule: cfg.rule,
            normalization: payoffs.spread(),
            target: cfg.target_count(n),
            max_updates: cfg.max_sweeps.saturating_mul(n as u64),
            interactions: arena.interaction_count(),
        })
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn is_finished(&self) -> bool {
        self.ledger.outcome.is_some()
    }

    /// Payoff of agent `i` under its current strategy.
    pub fn payoff(&self, i: usize) -> f64 {
        let pi = &self.payoffs;
        match self.arena {
            Arena::WellMixed { .. } => {
                let x = self.pop.fraction();
                match self.pop.strategy(i) {
                    Strategy::C => pi.cc * x + pi.cd * (1.0 - x),
                    Strategy::D => pi.dc * x + pi.dd * (1.0 - x),
                }
            }
            Arena::Network(g) => {
                let nb = g.neighbors(i);
                let nc = nb.iter().filter(|&&j| self.pop.strategy(j) == Strategy::C).count() as f64;
                let nd = nb.len() as f64 - nc;
                match self.pop.strategy(i) {
                    Strategy::C => pi.cc * nc + pi.cd * nd,
                    Strategy::D => pi.dc * nc + pi.dd * nd,
                }
            }
        }
    }

    fn cost_rate(&self, x: f64) -> (f64, f64) {
        let p = self.game.p;
        let spend = self.interactions * self.game.u * (p * x + (1.0 - p) * (1.0 - x));
        (0.5 * spend * spend, spend)
    }

    /// One elementary update followed by the ledger increment and stop checks.
    pub fn step(&mut self, rng: &mut impl Rng) -> Result<()> {
        if self.is_finished() {
            return Ok(());
        }
        let n = self.pop.n();
        let i = rng.gen_range(0..n);
        let j = match self.arena {
            Arena::WellMixed { .. } => {
                let j = rng.gen_range(0..n - 1);
                if j >= i {
                    j + 1
                } else {
                    j
                }
            }
            Arena::Network(g) => {
                let nb = g.neighbors(i);
                nb[rng.gen_range(0..nb.len())]
            }
        };
        let (si, sj) = (self.pop.strategy(i), self.pop.strategy(j));
        if si != sj {
            let (fi, fj) = (self.payoff(i), self.payoff(j));
            let q = match self.rule {
                UpdateRule::Fermi { omega } => fermi_probability(fi, fj, omega),
                UpdateRule::NormalizedImitation => imitation_probability(fi, fj, self.normalization)?,
            };
            if q > 0.0 && rng.gen::<f64>() < q {
                self.pop.set(i, sj);
            }
        }

        let dt = 1.0 / n as f64;
        let (g, spend) = self.cost_rate(self.pop.fraction());
        self.ledger.cost += dt * g;
        self.ledger.expenditure += dt * spend;
        self.ledger.updates += 1;

        let outcome = if self.pop.cooperators() >= self.target {
            self.ledger.converged = true;
            self.ledger.crossing_sweep = Some((self.ledger.updates - 1) / n as u64);
            Some(Outcome::Reached)
        } else if self.pop.cooperators() == 0 {
            Some(Outcome::FixatedDefection)
        } else if self.ledger.updates >= self.max_updates {
            Some(Outcome::MaxSweeps)
        } else {
            None
        };
        if outcome.is_some() {
            self.ledger.outcome = outcome;
            self.ledger.final_fraction = self.pop.fraction();
        }
        Ok(())
    }

    /// `n` elementary updates, or fewer if the run stops part-way.
    pub fn sweep(&mut self, rng: &mut impl Rng) -> Result<()> {
        for _ in 0..self.pop.n() {
            if self.is_finished() {
                break;
            }
            self.step(rng)?;
        }
        Ok(())
    }

    pub fn run(&mut self, rng: &mut impl Rng, mut trace: Option<&mut Vec<TracePoint>>) -> Result<CostLedger> {
        let mut sweep = 0;
        if let Some(t) = trace.as_deref_mut() {
            t.push(TracePoint { sweep, fraction: self.pop.fraction(), cost: 0.0 });
        }
        while !self.is_finished() {
            self.sweep(rng)?;
            sweep += 1;
            if let Some(t) = trace.as_deref_mut() {
                t.push(TracePoint { sweep, fraction: self.pop.fraction(), cost: self.ledger.cost });
            }
        }
        Ok(self.ledger)
    }
}

/// Runs one replica from a fresh population drawn with `seed`.
pub fn run_replica(cfg: &McConfig, arena: Arena, seed: u64, trace: Option<&mut Vec<TracePoint>>) -> Result<CostLedger> {
    let mut rng = seeding::rng(seed);
    let pop = init_population(arena.n(), cfg.bounds.x0, &mut rng)?;
    Simulation::new(cfg, arena, pop)?.run(&mut rng, trace)
}

/// Seed of replica `r`. It does not depend on `p`, so every point of a
/// preference grid sees the same initial placements and random streams.
pub fn replica_seed(master: u64, replica: usize) -> u64 {
    seeding::derive(master, &[replica as u64])
}

/// All `cfg.runs` replicas, in replica order.
pub fn run_replicas(cfg: &McConfig, arena: Arena) -> Result<Vec<CostLedger>> {
    cfg.validate()?;
    (0..cfg.runs)
        .into_par_iter()
        .map(|r| run_replica(cfg, arena, replica_seed(cfg.seed, r), None))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellSummary {
    pub p: f64,
    pub runs: usize,
    pub converged: usize,
    pub fixated_defection: usize,
    pub convergence_rate: f64,
    /// Mean and standard error over converged runs; NaN when none converged.
    pub mean_cost: f64,
    pub stderr: f64,
    pub mean_expenditure: f64,
    pub mean_sweeps: f64,
}

pub fn summarize(p: f64, ledgers: &[CostLedger], n: usize) -> CellSummary {
    let done: Vec<&CostLedger> = ledgers.iter().filter(|l| l.converged).collect();
    let k = done.len() as f64;
    let mean = |f: &dyn Fn(&CostLedger) -> f64| done.iter().map(|l| f(l)).sum::<f64>() / k;
    let mean_cost = mean(&|l| l.cost);
    let stderr = if done.len() > 1 {
        let var = done.iter().map(|l| (l.cost - mean_cost).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    } else {
        f64::NAN
    };
    CellSummary {
        p,
        runs: ledgers.len(),
        converged: done.len(),
        fixated_defection: ledgers.iter().filter(|l| l.outcome == Some(Outcome::FixatedDefection)).count(),
        convergence_rate: k / ledgers.len() as f64,
        mean_cost,
        stderr,
        mean_expenditure: mean(&|l| l.expenditure),
        mean_sweeps: mean(&|l| l.updates as f64 / n as f64),
    }
}

/// Mean cost per preference on `p_grid`. Replicas share seeds across `p`.
pub fn run_experiment(cfg: &McConfig, arena: Arena, p_grid: &[f64]) -> Result<Vec<CellSummary>> {
    cfg.validate()?;
    let cfgs = p_grid
        .iter()
        .map(|&p| Ok(McConfig { game: cfg.game.with_p(p)?, ..*cfg }))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..cfgs.len()).flat_map(|c| (0..cfg.runs).map(move |r| (c, r))).collect();
    let ledgers = jobs
        .par_iter()
        .map(|&(c, r)| run_replica(&cfgs[c], arena, replica_seed(cfg.seed, r), None))
        .collect::<Result<Vec<_>>>()?;
    Ok(ledgers
        .chunks(cfg.runs)
        .zip(p_grid)
        .map(|(chunk, &p)| summarize(p, chunk, arena.n()))
        .collect())
}

/// Least-squares scale `s` minimizing `Σ (mc - s · analytic)²` over the given
/// pairs. Calibrating at a single preference reduces to a ratio.
pub fn calibrate_scale(pairs: &[(f64, f64)]) -> Result<f64> {
    let (num, den) = pairs.iter().fold((0.0, 0.0), |(n, d), &(mc, an)| (n + mc * an, d + an * an));
    if !(den > 0.0) || !num.is_finite() {
        return Err(Error::InvalidParams("calibration needs finite, nonzero analytic costs".into()));
    }
    Ok(num / den)
}

/// Pearson correlation of two equally long series.
pub fn shape_correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "series lengths differ");
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

/// Grid preference with the smallest mean cost (first one on ties).
pub fn argmin_p(cells: &[CellSummary]) -> Option<f64> {
    cells
        .iter()
        .filter(|c| c.mean_cost.is_finite())
        .fold(None, |best: Option<&CellSummary>, c| match best {
            Some(b) if b.mean_cost <= c.mean_cost => Some(b),
            _ => Some(c),
        })
        .map(|c| c.p)
}
