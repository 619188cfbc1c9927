//! Closed-form results under the optimal constant incentive `u* = 2c`.
//!
//! Along the optimal trajectory the cost functional is a quadratic in the
//! rewarding preference,
//!
//! ```text
//! J*(p) = α p² + 2β p(1-p) + γ (1-p)²
//! ```
//!
//! where `α`, `β`, `γ` are the costs of rewarding everyone, of the
//! cross term and of fining everyone, each equal to a structure-dependent
//! scale `ϑ` times a function of `(x0, δ)` alone.

use serde::{Deserialize, Serialize};

use crate::game::{feasible_region, Boundary, Structure};
use crate::{Error, Result};

fn check_cost(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("cooperation cost must be > 0, got {c}")))
    }
}

/// The optimal time-invariant incentive, identical for both structures and
/// every preference `p`.
pub fn optimal_incentive(c: f64) -> Result<f64> {
    check_cost(c)?;
    Ok(2.0 * c)
}

/// Logistic solution of `dx/dt = rate · x(1 - x)` started at `x0`.
pub fn logistic(x0: f64, rate: f64, t: f64) -> f64 {
    1.0 / (1.0 + (1.0 - x0) / x0 * (-rate * t).exp())
}

/// Rate of the logistic flow under `u = u* = 2c`.
pub fn optimal_rate(structure: &Structure, c: f64) -> Result<f64> {
    structure.validate()?;
    check_cost(c)?;
    Ok(structure.growth_factor() * c)
}

/// Cooperator fraction at time `t` under the optimal incentive.
pub fn trajectory(structure: &Structure, x0: f64, c: f64, t: f64) -> Result<f64> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::InvalidParams(format!("x0 must lie in (0, 1), got {x0}")));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParams(format!("time must be >= 0, got {t}")));
    }
    Ok(logistic(x0, optimal_rate(structure, c)?, t))
}

/// Time at which the optimal trajectory reaches `1 - delta`.
pub fn terminal_time(structure: &Structure, bounds: &Boundary, c: f64) -> Result<f64> {
    feasible_region(bounds.x0, bounds.delta)?;
    let (x0, d) = (bounds.x0, bounds.delta);
    Ok(((1.0 - x0) * (1.0 - d) / (x0 * d)).ln() / optimal_rate(structure, c)?)
}

/// Scale `ϑ` of the cumulative cost: `2n²(n-1)²c` on complete graphs and
/// `4n²k(k-1)c / (ω(k-2))` on regular graphs.
pub fn vartheta(structure: &Structure, c: f64) -> Result<f64> {
    structure.validate()?;
    check_cost(c)?;
    Ok(match *structure {
        Structure::Complete { n } => {
            let n = n as f64;
            2.0 * n * n * (n - 1.0) * (n - 1.0) * c
        }
        Structure::Regular { n, k, omega } => {
            let (n, k) = (n as f64, k as f64);
            4.0 * n * n * k * (k - 1.0) * c / (omega * (k - 2.0))
        }
    })
}

/// Coefficients of the quadratic `J*(p)`, all in absolute units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostCoefficients {
    pub vartheta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub structure: Structure,
    pub bounds: Boundary,
}

impl CostCoefficients {
    /// `(α, β, γ) / ϑ`, which depend on the boundary conditions only.
    pub fn normalized(&self) -> (f64, f64, f64) {
        (self.alpha / self.vartheta, self.beta / self.vartheta, self.gamma / self.vartheta)
    }

    /// Second difference `α - 2β + γ`; positive on the whole feasible region.
    pub fn curvature(&self) -> f64 {
        self.alpha - 2.0 * self.beta + self.gamma
    }
}

pub fn cost_coefficients(structure: &Structure, bounds: &Boundary, c: f64) -> Result<CostCoefficients> {
    feasible_region(bounds.x0, bounds.delta)?;
    let vartheta = vartheta(structure, c)?;
    let (x0, d) = (bounds.x0, bounds.delta);
    let shared = x0 - 1.0 + d;
    Ok(CostCoefficients {
        vartheta,
        alpha: vartheta * (shared + ((1.0 - x0) / d).ln()),
        beta: vartheta * (1.0 - x0 - d),
        gamma: vartheta * (shared + ((1.0 - d) / x0).ln()),
        structure: *structure,
        bounds: *bounds,
    })
}

fn check_preference(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("preference must lie in [0, 1], got {p}")))
    }
}

/// `J*(p)` in absolute units.
pub fn cumulative_cost(coeffs: &CostCoefficients, p: f64) -> Result<f64> {
    check_preference(p)?;
    let q = 1.0 - p;
    Ok(coeffs.alpha * p * p + 2.0 * coeffs.beta * p * q + coeffs.gamma * q * q)
}

/// `J*(p) / ϑ` through the logarithmic form, independent of the coefficient
/// route.
pub fn normalized_cost_log_form(bounds: &Boundary, p: f64) -> Result<f64> {
    check_preference(p)?;
    feasible_region(bounds.x0, bounds.delta)?;
    let (x0, d) = (bounds.x0, bounds.delta);
    let q = 1.0 - p;
    Ok((2.0 * p - 1.0).powi(2) * (x0 - 1.0 + d)
        + p * p * ((1.0 - x0) / d).ln()
        + q * q * ((1.0 - d) / x0).ln())
}

/// Derivative `dJ*/dp`.
pub fn cost_slope(coeffs: &CostCoefficients, p: f64) -> f64 {
    2.0 * (coeffs.curvature() * p + coeffs.beta - coeffs.gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Regime {
    /// `x0 = δ`: reward and punishment cost the same and the even mix is optimal.
    SymmetricHalf,
    Interior { p_star: f64 },
    /// Pure punishment (`p = 0`) is cheapest.
    BoundaryPunishment,
    /// Pure reward (`p = 1`) is cheapest.
    BoundaryReward,
}

impl Regime {
    pub fn p_opt(&self) -> f64 {
        match *self {
            Regime::SymmetricHalf => 0.5,
            Regime::Interior { p_star } => p_star,
            Regime::BoundaryPunishment => 0.0,
            Regime::BoundaryReward => 1.0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::SymmetricHalf => "symmetric_half",
            Regime::Interior { .. } => "interior",
            Regime::BoundaryPunishment => "boundary_punishment",
            Regime::BoundaryReward => "boundary_reward",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeClassification {
    pub case: Regime,
    /// `Θ = (x0 - δ)(1 - x0 - δ)`.
    pub theta: f64,
    /// `𝒢 = J*(1) - J*(0) = α - γ`.
    pub g_diff: f64,
}

impl RegimeClassification {
    pub fn p_opt(&self) -> f64 {
        self.case.p_opt()
    }
}

/// Minimizes `J*(p)` over `[0, 1]`.
///
/// The stationary point `(γ - β) / (α - 2β + γ)` is used when it falls
/// strictly inside the interval; otherwise the minimum sits at the nearer
/// end. A linear `J*` picks its end by the slope sign, ties going to `p = 0`.
pub fn optimal_preference(coeffs: &CostCoefficients) -> Result<RegimeClassification> {
    let b = coeffs.bounds;
    feasible_region(b.x0, b.delta)?;
    let (g_diff, theta) = cost_difference(&b, coeffs.vartheta)?;
    let case = if b.x0 == b.delta {
        Regime::SymmetricHalf
    } else {
        let curvature = coeffs.curvature();
        if curvature > 0.0 {
            let p_star = (coeffs.gamma - coeffs.beta) / curvature;
            if p_star <= 0.0 {
                Regime::BoundaryPunishment
            } else if p_star >= 1.0 {
                Regime::BoundaryReward
            } else {
                Regime::Interior { p_star }
            }
        } else if coeffs.beta - coeffs.gamma >= 0.0 {
            Regime::BoundaryPunishment
        } else {
            Regime::BoundaryReward
        }
    };
    Ok(RegimeClassification { case, theta, g_diff })
}

/// `(𝒢, Θ)` for the given boundary conditions and cost scale.
pub fn cost_difference(bounds: &Boundary, vartheta: f64) -> Result<(f64, f64)> {
    feasible_region(bounds.x0, bounds.delta)?;
    let (x0, d) = (bounds.x0, bounds.delta);
    let g = vartheta * (x0 * (1.0 - x0) / (d * (1.0 - d))).ln();
    let theta = (x0 - d) * (1.0 - x0 - d);
    Ok((g, theta))
}

/// The two threshold comparisons that separate interior from boundary optima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryChecks {
    /// `2(1 - x0 - δ)`, i.e. `2β/ϑ`.
    pub margin: f64,
    /// `ln((1 - δ)/x0)`; pure punishment wins when `x0 > δ` and `margin >=` this.
    pub punish_threshold: f64,
    /// `ln((1 - x0)/δ)`; pure reward wins when `x0 < δ` and `margin >=` this.
    pub reward_threshold: f64,
}

impl BoundaryChecks {
    pub fn new(bounds: &Boundary) -> Result<Self> {
        feasible_region(bounds.x0, bounds.delta)?;
        let (x0, d) = (bounds.x0, bounds.delta);
        Ok(BoundaryChecks {
            margin: 2.0 * (1.0 - x0 - d),
            punish_threshold: ((1.0 - d) / x0).ln(),
            reward_threshold: ((1.0 - x0) / d).ln(),
        })
    }
}
