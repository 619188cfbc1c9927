//! Game parameters, payoffs and the feasible region of boundary conditions.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Prisoner's dilemma with a combined incentive.
///
/// Cooperators receive `p * u` per interaction and defectors are fined
/// `(1 - p) * u` per interaction. Reward and fine share the single magnitude `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub b: f64,
    pub c: f64,
    pub u: f64,
    pub p: f64,
}

impl GameParams {
    pub fn new(b: f64, c: f64, u: f64, p: f64) -> Result<Self> {
        let g = GameParams { b, c, u, p };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let GameParams { b, c, u, p } = *self;
        if ![b, c, u, p].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParams("non-finite game parameter".into()));
        }
        if !(0.0 < c && c < b) {
            return Err(Error::InvalidParams(format!("need 0 < c < b, got b={b}, c={c}")));
        }
        if u < 0.0 {
            return Err(Error::InvalidParams(format!("incentive must be >= 0, got {u}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParams(format!("preference must lie in [0, 1], got {p}")));
        }
        Ok(())
    }

    /// Same game with a different rewarding preference.
    pub fn with_p(self, p: f64) -> Result<Self> {
        GameParams::new(self.b, self.c, self.u, p)
    }

    pub fn reward(&self) -> f64 {
        self.p * self.u
    }

    pub fn fine(&self) -> f64 {
        (1.0 - self.p) * self.u
    }
}

/// Payoff of the row strategy against the column strategy, incentives included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwisePayoffs {
    pub cc: f64,
    pub cd: f64,
    pub dc: f64,
    pub dd: f64,
}

impl PairwisePayoffs {
    pub fn entries(&self) -> [f64; 4] {
        [self.cc, self.cd, self.dc, self.dd]
    }

    /// Largest minus smallest entry.
    pub fn spread(&self) -> f64 {
        let e = self.entries();
        let max = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = e.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }
}

pub fn pairwise_payoffs(g: &GameParams) -> Result<PairwisePayoffs> {
    g.validate()?;
    Ok(PairwisePayoffs {
        cc: g.b - g.c + g.reward(),
        cd: -g.c + g.reward(),
        dc: g.b - g.fine(),
        dd: -g.fine(),
    })
}

/// Expected payoffs `(f_C, f_D)` in a well-mixed population with cooperator
/// fraction `x`. Their difference is always `u - c`.
pub fn mean_field_payoffs(g: &GameParams, x: f64) -> Result<(f64, f64)> {
    check_unit("cooperator fraction", x)?;
    let pi = pairwise_payoffs(g)?;
    let y = 1.0 - x;
    Ok((pi.cc * x + pi.cd * y, pi.dc * x + pi.dd * y))
}

/// Accumulated payoffs `(Π_C, Π_D)` of a C-agent and a D-agent that form a
/// discordant pair on a `k`-regular graph, averaged over the binomial
/// composition of their other `k - 1` neighbours.
pub fn accumulated_payoffs(
    g: &GameParams,
    k: usize,
    x_c_given_c: f64,
    x_c_given_d: f64,
) -> Result<(f64, f64)> {
    g.validate()?;
    if k <= 2 {
        return Err(Error::InvalidParams(format!("degree must exceed 2, got {k}")));
    }
    check_unit("x_C|C", x_c_given_c)?;
    check_unit("x_C|D", x_c_given_d)?;
    let k = k as f64;
    let pi_c = (k - 1.0) * x_c_given_c * g.b + k * (g.reward() - g.c);
    let pi_d = ((k - 1.0) * x_c_given_d + 1.0) * g.b - k * g.fine();
    Ok((pi_c, pi_d))
}

pub(crate) fn check_unit(what: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{what} must lie in [0, 1], got {v}")))
    }
}

/// Population structure for the replicator dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Structure {
    Complete { n: usize },
    Regular { n: usize, k: usize, omega: f64 },
}

impl Structure {
    pub fn complete(n: usize) -> Result<Self> {
        let s = Structure::Complete { n };
        s.validate()?;
        Ok(s)
    }

    pub fn regular(n: usize, k: usize, omega: f64) -> Result<Self> {
        let s = Structure::Regular { n, k, omega };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Structure::Complete { n } if n < 3 => {
                Err(Error::InvalidParams(format!("need at least 3 agents, got {n}")))
            }
            Structure::Regular { n, k, omega } => {
                if n < 3 || !(2 < k && k < n) {
                    return Err(Error::InvalidParams(format!("need 2 < k < n, got n={n}, k={k}")));
                }
                if !(omega > 0.0 && omega <= 1.0) {
                    return Err(Error::InvalidParams(format!(
                        "selection strength must lie in (0, 1], got {omega}"
                    )));
                }
                Ok(())
            }
            Structure::Complete { .. } => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            Structure::Complete { n } | Structure::Regular { n, .. } => n,
        }
    }

    /// Prefactor multiplying `x(1 - x)(u - c)` in the replicator equation.
    pub fn growth_factor(&self) -> f64 {
        match *self {
            Structure::Complete { .. } => 1.0,
            Structure::Regular { k, omega, .. } => {
                let k = k as f64;
                omega * k * (k - 2.0) / (2.0 * (k - 1.0))
            }
        }
    }

    /// Number of incentivized interactions per unit time: `n(n-1)` or `nk`.
    pub fn interaction_count(&self) -> f64 {
        match *self {
            Structure::Complete { n } => (n * (n - 1)) as f64,
            Structure::Regular { n, k, .. } => (n * k) as f64,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Structure::Complete { .. } => "I",
            Structure::Regular { .. } => "S",
        }
    }
}

/// Fixed-endpoint boundary conditions: start at `x0` at time zero and stop at
/// `1 - delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub x0: f64,
    pub delta: f64,
}

impl Boundary {
    pub const T0: f64 = 0.0;

    pub fn new(x0: f64, delta: f64) -> Result<Self> {
        feasible_region(x0, delta)?;
        Ok(Boundary { x0, delta })
    }

    pub fn terminal_state(&self) -> f64 {
        1.0 - self.delta
    }

    pub fn region(&self) -> Result<Region> {
        feasible_region(self.x0, self.delta)
    }

    /// The mirrored problem obtained by exchanging `x0` and `delta`.
    pub fn swapped(&self) -> Boundary {
        Boundary { x0: self.delta, delta: self.x0 }
    }
}

/// Relation between the initial fraction and the terminal gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Equal,
    X0Greater,
    X0Less,
}

/// Classifies `(x0, delta)`; anything outside `0 < x0, delta < 1`,
/// `x0 + delta < 1` is infeasible.
pub fn feasible_region(x0: f64, delta: f64) -> Result<Region> {
    let in_open_unit = |v: f64| v > 0.0 && v < 1.0;
    if !in_open_unit(x0) || !in_open_unit(delta) {
        return Err(Error::Infeasible(format!(
            "x0 and delta must lie in (0, 1), got x0={x0}, delta={delta}"
        )));
    }
    if x0 + delta >= 1.0 {
        return Err(Error::Infeasible(format!(
            "terminal state 1 - delta = {} does not exceed x0 = {x0}",
            1.0 - delta
        )));
    }
    let (region, member) = if x0 == delta {
        (Region::Equal, x0 < 0.5)
    } else if x0 > delta {
        (Region::X0Greater, delta < 0.5 && x0 < 1.0 - delta)
    } else {
        (Region::X0Less, x0 < 0.5 && delta < 1.0 - x0)
    };
    // Implied by the checks above; kept so the region sets stay explicit.
    debug_assert!(member);
    Ok(region)
}
