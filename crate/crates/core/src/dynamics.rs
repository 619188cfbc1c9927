//! Numerical replicator dynamics and the cost functional.
//!
//! Everything here is deliberately independent of the closed forms in
//! [`crate::analytic`]: the integrators only know the right-hand sides and the
//! cost integrands, which makes them usable as oracles for the closed forms.

use serde::Serialize;

use crate::game::{check_unit, Boundary, GameParams, Structure};
use crate::{Error, Result};

/// Horizon multiplier, relative to the optimal-incentive crossing time, after
/// which `integrate` gives up on reaching a target state.
pub const HORIZON_FACTOR: f64 = 100.0;

/// Absolute tolerance of the refined crossing time.
pub const CROSSING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeState {
    pub t: f64,
    pub x: f64,
}

/// Replicator right-hand side `F_v(x, u)`.
pub fn rhs(structure: &Structure, x: f64, u: f64, c: f64) -> Result<f64> {
    structure.validate()?;
    check_unit("cooperator fraction", x)?;
    Ok(flow(structure.growth_factor(), x, u, c))
}

#[inline]
fn flow(factor: f64, x: f64, u: f64, c: f64) -> f64 {
    factor * x * (1.0 - x) * (u - c)
}

fn rk4<const N: usize>(f: &impl Fn(f64, [f64; N]) -> [f64; N], t: f64, y: [f64; N], h: f64) -> [f64; N] {
    let add = |a: [f64; N], b: [f64; N], s: f64| {
        let mut out = a;
        for i in 0..N {
            out[i] += s * b[i];
        }
        out
    };
    let k1 = f(t, y);
    let k2 = f(t + h / 2.0, add(y, k1, h / 2.0));
    let k3 = f(t + h / 2.0, add(y, k2, h / 2.0));
    let k4 = f(t + h, add(y, k3, h));
    let mut out = y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    AtTime(f64),
    /// Stop when the fraction first reaches this level (from either side).
    AtState(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<OdeState>,
    /// Refined time at which the target state was hit, for `Stop::AtState`.
    pub crossing_time: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> OdeState {
        *self.states.last().expect("trajectory holds at least the initial state")
    }
}

/// Fixed-step RK4 with the default horizon for `Stop::AtState`.
pub fn integrate(
    structure: &Structure,
    x0: f64,
    schedule: impl Fn(f64) -> f64,
    c: f64,
    step: f64,
    stop: Stop,
) -> Result<Trajectory> {
    let horizon = match stop {
        Stop::AtTime(t) => t,
        Stop::AtState(target) => default_horizon(structure, x0, target, c)?,
    };
    integrate_with_horizon(structure, x0, schedule, c, step, stop, horizon)
}

/// `HORIZON_FACTOR` times the time the optimal incentive needs to move from
/// `x0` to `target`.
pub fn default_horizon(structure: &Structure, x0: f64, target: f64, c: f64) -> Result<f64> {
    structure.validate()?;
    if !(x0 > 0.0 && x0 < 1.0 && target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParams(format!("need x0, target in (0, 1), got {x0}, {target}")));
    }
    let logit = |x: f64| (x / (1.0 - x)).ln();
    let t = (logit(target) - logit(x0)).abs() / (structure.growth_factor() * c);
    Ok(HORIZON_FACTOR * t.max(1.0 / (structure.growth_factor() * c)))
}

pub fn integrate_with_horizon(
    structure: &Structure,
    x0: f64,
    schedule: impl Fn(f64) -> f64,
    c: f64,
    step: f64,
    stop: Stop,
    horizon: f64,
) -> Result<Trajectory> {
    structure.validate()?;
    check_unit("x0", x0)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParams(format!("step must be positive, got {step}")));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParams(format!("cooperation cost must be > 0, got {c}")));
    }
    let factor = structure.growth_factor();
    let f = |t: f64, y: [f64; 1]| [flow(factor, y[0], schedule(t), c)];
    let mut states = vec![OdeState { t: 0.0, x: x0 }];

    match stop {
        Stop::AtTime(t_end) => {
            if !(t_end >= 0.0) {
                return Err(Error::InvalidParams(format!("stop time must be >= 0, got {t_end}")));
            }
            let n = (t_end / step).ceil() as usize;
            let h = if n == 0 { 0.0 } else { t_end / n as f64 };
            let mut x = x0;
            for i in 0..n {
                let t = i as f64 * h;
                x = rk4(&f, t, [x], h)[0];
                states.push(OdeState { t: (i + 1) as f64 * h, x });
            }
            Ok(Trajectory { states, crossing_time: None })
        }
        Stop::AtState(target) => {
            check_unit("target", target)?;
            let side = (x0 - target).signum();
            if side == 0.0 {
                return Ok(Trajectory { states, crossing_time: Some(0.0) });
            }
            let (mut t, mut x) = (0.0, x0);
            let mut i = 0usize;
            while t < horizon {
                let next = rk4(&f, t, [x], step)[0];
                if (next - target).signum() != side {
                    let s = bisect(|s| rk4(&f, t, [x], s)[0] - target, 0.0, step);
                    let tc = t + s;
                    states.push(OdeState { t: tc, x: target });
                    return Ok(Trajectory { states, crossing_time: Some(tc) });
                }
                i += 1;
                t = i as f64 * step;
                x = next;
                states.push(OdeState { t, x });
            }
            Err(Error::NoCrossing { target, horizon })
        }
    }
}

/// Root of `g` in `[lo, hi]` given a sign change, to `CROSSING_TOL`.
fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g_lo = g(lo);
    while hi - lo > CROSSING_TOL {
        let mid = 0.5 * (lo + hi);
        let v = g(mid);
        if v == 0.0 {
            return mid;
        }
        if v.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    Stable,
    Unstable,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    pub at_zero: Stability,
    pub at_one: Stability,
    /// `dF/dx` at `x = 0` and `x = 1`.
    pub slope_at_zero: f64,
    pub slope_at_one: f64,
}

/// Linear stability of the two equilibria `x = 0` and `x = 1`.
pub fn stability(structure: &Structure, u: f64, c: f64) -> Result<StabilityReport> {
    structure.validate()?;
    if !(u >= 0.0 && c > 0.0) {
        return Err(Error::InvalidParams(format!("need u >= 0 and c > 0, got u={u}, c={c}")));
    }
    // dF/dx = factor (1 - 2x)(u - c)
    let slope = |x: f64| structure.growth_factor() * (1.0 - 2.0 * x) * (u - c);
    let classify = |d: f64| {
        if d < 0.0 {
            Stability::Stable
        } else if d > 0.0 {
            Stability::Unstable
        } else {
            Stability::Degenerate
        }
    };
    let (s0, s1) = (slope(0.0), slope(1.0));
    Ok(StabilityReport { at_zero: classify(s0), at_one: classify(s1), slope_at_zero: s0, slope_at_one: s1 })
}

/// Institutional cost rate `G_v = ½ {N u [p x + (1-p)(1-x)]}²` where `N` is
/// the number of incentivized interactions.
pub fn cost_integrand(structure: &Structure, x: f64, u: f64, p: f64) -> f64 {
    let spend = structure.interaction_count() * u * (p * x + (1.0 - p) * (1.0 - x));
    0.5 * spend * spend
}

/// Cost of steering from `x0` to `1 - δ` under `schedule`, by composite
/// Simpson quadrature along an RK4 trajectory.
///
/// A first pass locates the crossing time; the second re-integrates on a
/// uniform grid with an even number of intervals ending exactly there.
pub fn cost_quadrature(
    structure: &Structure,
    bounds: &Boundary,
    p: f64,
    schedule: impl Fn(f64) -> f64,
    c: f64,
    step: f64,
) -> Result<f64> {
    check_unit("preference", p)?;
    let (x0, target) = (bounds.x0, bounds.terminal_state());
    if !(x0 > 0.0 && x0 < 1.0 && bounds.delta > 0.0 && bounds.delta < 1.0) || x0 > target {
        return Err(Error::Infeasible(format!("x0={x0}, delta={}", bounds.delta)));
    }
    if x0 == target {
        return Ok(0.0);
    }
    let first = integrate(structure, x0, &schedule, c, step, Stop::AtState(target))?;
    let tf = first.crossing_time.expect("AtState integration reports its crossing");

    let mut intervals = (tf / step).ceil() as usize;
    intervals += intervals % 2;
    let h = tf / intervals as f64;
    let factor = structure.growth_factor();
    let f = |t: f64, y: [f64; 1]| [flow(factor, y[0], schedule(t), c)];
    let g = |t: f64, x: f64| cost_integrand(structure, x, schedule(t), p);

    let mut x = x0;
    let mut sum = g(0.0, x0);
    for i in 0..intervals {
        let t = i as f64 * h;
        x = rk4(&f, t, [x], h)[0];
        let weight = if i + 1 == intervals {
            1.0
        } else if (i + 1) % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += weight * g(t + h, x);
    }
    Ok(sum * h / 3.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncentiveScan {
    pub best_u: f64,
    pub best_cost: f64,
    /// `(u, J(u))` for every grid entry, in grid order.
    pub curve: Vec<(f64, f64)>,
}

/// Integration steps per unit of `rate · t` used by the scan.
const SCAN_RESOLUTION: f64 = 1e3;

/// Brute-force cost of every constant incentive on `u_grid`.
pub fn constant_u_cost_scan(
    structure: &Structure,
    bounds: &Boundary,
    p: f64,
    c: f64,
    u_grid: &[f64],
) -> Result<IncentiveScan> {
    if u_grid.is_empty() {
        return Err(Error::InvalidParams("empty incentive grid".into()));
    }
    if let Some(bad) = u_grid.iter().find(|&&u| !(u > c)) {
        return Err(Error::InvalidParams(format!(
            "incentive {bad} <= c = {c} never reaches the target state"
        )));
    }
    let curve = u_grid
        .iter()
        .map(|&u| {
            let step = 1.0 / (SCAN_RESOLUTION * structure.growth_factor() * (u - c));
            cost_quadrature(structure, bounds, p, |_| u, c, step).map(|j| (u, j))
        })
        .collect::<Result<Vec<_>>>()?;
    let (best_u, best_cost) = curve
        .iter()
        .copied()
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    Ok(IncentiveScan { best_u, best_cost, curve })
}

/// Uniform grid `start, start + step, ..., <= stop` built from integer
/// multiples so entries do not accumulate rounding error.
pub fn uniform_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// Pair-approximation state: cooperator fraction and the probability that a
/// cooperator's neighbour cooperates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairState {
    pub x_c: f64,
    pub x_cc: f64,
}

impl PairState {
    pub fn new(x_c: f64, x_cc: f64) -> Result<Self> {
        let s = PairState { x_c, x_cc };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("x_C", self.x_c)?;
        check_unit("x_C|C", self.x_cc)?;
        if self.x_c < 1.0 {
            check_unit("x_C|D", self.x_c_given_d())?;
        }
        Ok(())
    }

    /// `x_C|D = x_C (1 - x_C|C) / (1 - x_C)`.
    pub fn x_c_given_d(&self) -> f64 {
        self.x_c * (1.0 - self.x_cc) / (1.0 - self.x_c)
    }

    pub fn x_d_given_d(&self) -> f64 {
        1.0 - self.x_c_given_d()
    }

    /// Density of CD links, `x_C (1 - x_C|C)`.
    pub fn x_cd(&self) -> f64 {
        self.x_c * (1.0 - self.x_cc)
    }
}

/// Leading-order pair dynamics `(dx_C/dt, dx_C|C/dt)` under Fermi updating
/// with selection strength `omega` on a `k`-regular graph.
///
/// The all-cooperator state `x_C = 1` is terminal and both derivatives vanish
/// there.
pub fn pair_rhs(s: &PairState, g: &GameParams, k: usize, omega: f64) -> Result<(f64, f64)> {
    g.validate()?;
    if k <= 2 {
        return Err(Error::InvalidParams(format!("degree must exceed 2, got {k}")));
    }
    check_unit("x_C", s.x_c)?;
    check_unit("x_C|C", s.x_cc)?;
    Ok(pair_flow(s.x_c, s.x_cc, g, k as f64, omega))
}

fn pair_flow(x_c: f64, x_cc: f64, g: &GameParams, k: f64, omega: f64) -> (f64, f64) {
    if x_c >= 1.0 {
        return (0.0, 0.0);
    }
    let excess = (x_cc - x_c) / (1.0 - x_c);
    let psi = x_c * (1.0 - x_cc) / 2.0 * ((k - 1.0) * g.b * excess + k * (g.u - g.c) - g.b);
    let phi = (1.0 - x_cc) / k * (1.0 - (k - 1.0) * excess);
    (omega * psi, phi)
}

/// The slow manifold `x_C|C = 1/(k-1) + (k-2) x_C / (k-1)`. Requires `k > 2`.
pub fn manifold(x_c: f64, k: usize) -> f64 {
    let k = k as f64;
    1.0 / (k - 1.0) + (k - 2.0) / (k - 1.0) * x_c
}

/// Rate of the reduced logistic flow obtained on the slow manifold.
pub fn reduced_rate(g: &GameParams, k: usize, omega: f64) -> f64 {
    let k = k as f64;
    omega * k * (k - 2.0) / (2.0 * (k - 1.0)) * (g.u - g.c)
}

/// RK4 integration of the two-variable pair system, sampled every step.
pub fn integrate_pair(
    s0: PairState,
    g: &GameParams,
    k: usize,
    omega: f64,
    step: f64,
    t_end: f64,
) -> Result<Vec<(f64, PairState)>> {
    s0.validate()?;
    pair_rhs(&s0, g, k, omega)?;
    if !(step > 0.0 && t_end >= 0.0) {
        return Err(Error::InvalidParams(format!("need step > 0, t_end >= 0, got {step}, {t_end}")));
    }
    let kf = k as f64;
    let f = |_t: f64, y: [f64; 2]| {
        let (a, b) = pair_flow(y[0], y[1], g, kf, omega);
        [a, b]
    };
    let n = (t_end / step).ceil() as usize;
    let mut out = Vec::with_capacity(n + 1);
    let mut y = [s0.x_c, s0.x_cc];
    out.push((0.0, s0));
    for i in 0..n {
        y = rk4(&f, i as f64 * step, y, step);
        out.push(((i + 1) as f64 * step, PairState { x_c: y[0], x_cc: y[1] }));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlowManifoldReport {
    /// First time the distance to the manifold fell below the collapse tolerance.
    pub collapse_time: f64,
    /// How far `x_C` had moved by then.
    pub drift_at_collapse: f64,
    /// Sup-norm distance between `x_C(t)` and the reduced logistic afterwards.
    pub tracking_error: f64,
    /// Time at which the comparison stopped.
    pub t_end: f64,
}

/// Starts `offset` above the manifold at `x_c0` and integrates until `x_C`
/// reaches `x_c_end`, comparing with the reduced model started at `x_c0`.
pub fn slow_manifold_check(
    x_c0: f64,
    offset: f64,
    x_c_end: f64,
    g: &GameParams,
    k: usize,
    omega: f64,
    step: f64,
    collapse_tol: f64,
) -> Result<SlowManifoldReport> {
    let s0 = PairState::new(x_c0, manifold(x_c0, k) + offset)?;
    let rate = reduced_rate(g, k, omega);
    if !(rate > 0.0 && x_c_end > x_c0 && x_c_end < 1.0) {
        return Err(Error::InvalidParams("reduced flow must move x_C up to x_c_end".into()));
    }
    let logit = |x: f64| (x / (1.0 - x)).ln();
    let t_end = (logit(x_c_end) - logit(x_c0)) / rate;
    let path = integrate_pair(s0, g, k, omega, step, t_end)?;

    let collapse = path
        .iter()
        .find(|(_, s)| (s.x_cc - manifold(s.x_c, k)).abs() < collapse_tol)
        .ok_or(Error::NoCrossing { target: collapse_tol, horizon: t_end })?;
    let tracking_error = path
        .iter()
        .filter(|(t, _)| *t >= collapse.0)
        .map(|(t, s)| (s.x_c - crate::analytic::logistic(x_c0, rate, *t)).abs())
        .fold(0.0, f64::max);
    Ok(SlowManifoldReport {
        collapse_time: collapse.0,
        drift_at_collapse: (collapse.1.x_c - x_c0).abs(),
        tracking_error,
        t_end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn complete() -> Structure {
        Structure::complete(100).unwrap()
    }

    fn regular() -> Structure {
        Structure::regular(100, 4, 0.1).unwrap()
    }

    /// Direct substitution into the logistic solution; kept local so these
    /// tests do not route through `analytic`.
    fn logistic(x0: f64, r: f64, t: f64) -> f64 {
        x0 / (x0 + (1.0 - x0) * (-r * t).exp())
    }

    #[test]
    fn rhs_examples() {
        assert_abs_diff_eq!(rhs(&complete(), 0.5, 2.0, 1.0).unwrap(), 0.25, epsilon = 1e-15);
        for s in [complete(), regular()] {
            assert_eq!(rhs(&s, 0.0, 2.0, 1.0).unwrap(), 0.0);
            assert_eq!(rhs(&s, 1.0, 2.0, 1.0).unwrap(), 0.0);
        }
        assert_abs_diff_eq!(rhs(&regular(), 0.5, 2.0, 1.0).unwrap(), 1.0 / 30.0, epsilon = 1e-15);
        assert!(rhs(&complete(), 1.2, 2.0, 1.0).is_err());
    }

    #[test]
    fn integrate_crossing_examples() {
        let tr = integrate(&complete(), 0.1, |_| 2.0, 1.0, 1e-3, Stop::AtState(0.9)).unwrap();
        assert_abs_diff_eq!(tr.crossing_time.unwrap(), 81f64.ln(), epsilon = 1e-8);
        assert_eq!(tr.last().x, 0.9);

        let tr = integrate(&regular(), 0.1, |_| 2.0, 1.0, 1e-3, Stop::AtState(0.9)).unwrap();
        assert_abs_diff_eq!(tr.crossing_time.unwrap(), 7.5 * 81f64.ln(), epsilon = 1e-6);

        let err = integrate(&complete(), 0.1, |_| 1.0, 1.0, 1e-2, Stop::AtState(0.9)).unwrap_err();
        assert!(matches!(err, Error::NoCrossing { .. }));
        let flat = integrate(&complete(), 0.1, |_| 1.0, 1.0, 1e-2, Stop::AtTime(5.0)).unwrap();
        assert!(flat.states.iter().all(|s| s.x == 0.1));

        assert!(integrate(&complete(), 0.1, |_| 2.0, 1.0, 0.0, Stop::AtTime(1.0)).is_err());
    }

    #[test]
    fn integrate_detects_downward_crossing() {
        let tr = integrate(&complete(), 0.5, |_| 0.0, 1.0, 1e-3, Stop::AtState(0.1)).unwrap();
        // x(t) = 1 / (1 + e^{t}) reaches 0.1 at t = ln 9.
        assert_abs_diff_eq!(tr.crossing_time.unwrap(), 9f64.ln(), epsilon = 1e-8);
    }

    #[test]
    fn rk4_tracks_logistic_and_stays_in_unit_interval() {
        for (s, r) in [(complete(), 1.0), (regular(), 2.0 / 15.0)] {
            let tr = integrate(&s, 0.01, |_| 2.0, 1.0, 1e-2 / r, Stop::AtTime(60.0 / r)).unwrap();
            for st in &tr.states {
                assert!((0.0..=1.0).contains(&st.x));
                assert_abs_diff_eq!(st.x, logistic(0.01, r, st.t), epsilon = 1e-8);
            }
            let down = integrate(&s, 0.99, |_| 0.0, 1.0, 1e-2 / r, Stop::AtTime(60.0 / r)).unwrap();
            assert!(down.states.iter().all(|st| (0.0..=1.0).contains(&st.x)));
            assert!(down.states.windows(2).all(|w| w[1].x <= w[0].x));
        }
    }

    #[test]
    fn finite_difference_matches_rhs() {
        let h = 1e-4;
        for (s, r) in [(complete(), 1.0), (regular(), 2.0 / 15.0)] {
            for i in 1..50 {
                let t = i as f64 * 0.2 / r;
                let fd = (logistic(0.1, r, t + h) - logistic(0.1, r, t - h)) / (2.0 * h);
                let exact = rhs(&s, logistic(0.1, r, t), 2.0, 1.0).unwrap();
                assert_relative_eq!(fd, exact, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn stability_examples() {
        for s in [complete(), regular()] {
            let r = stability(&s, 2.0, 1.0).unwrap();
            assert_eq!((r.at_one, r.at_zero), (Stability::Stable, Stability::Unstable));
            let r = stability(&s, 0.5, 1.0).unwrap();
            assert_eq!((r.at_one, r.at_zero), (Stability::Unstable, Stability::Stable));
            let r = stability(&s, 1.0, 1.0).unwrap();
            assert_eq!((r.at_one, r.at_zero), (Stability::Degenerate, Stability::Degenerate));
        }
    }

    /// Closed-form oracle for the complete-graph cost at `u = 2c`, written out
    /// in x-space: `ϑ [ p² A + 2p(1-p) B + (1-p)² C ]`.
    fn oracle_cost(n: f64, x0: f64, d: f64, p: f64) -> f64 {
        let vartheta = 2.0 * n * n * (n - 1.0) * (n - 1.0);
        let a = x0 - 1.0 + d + ((1.0 - x0) / d).ln();
        let b = 1.0 - x0 - d;
        let g = x0 - 1.0 + d + ((1.0 - d) / x0).ln();
        vartheta * (p * p * a + 2.0 * p * (1.0 - p) * b + (1.0 - p) * (1.0 - p) * g)
    }

    #[test]
    fn quadrature_examples() {
        let b = Boundary::new(0.1, 0.1).unwrap();
        let j = cost_quadrature(&complete(), &b, 0.5, |_| 2.0, 1.0, 1e-4).unwrap();
        assert_relative_eq!(j, 1.9602e8 * 0.5 * 9f64.ln(), max_relative = 1e-6);
        let j1 = cost_quadrature(&complete(), &b, 1.0, |_| 2.0, 1.0, 1e-4).unwrap();
        assert_relative_eq!(j1, oracle_cost(100.0, 0.1, 0.1, 1.0), max_relative = 1e-6);

        let empty = Boundary { x0: 0.4, delta: 0.6 };
        assert_eq!(cost_quadrature(&complete(), &empty, 0.3, |_| 2.0, 1.0, 1e-3).unwrap(), 0.0);
        assert!(cost_quadrature(&complete(), &b, 0.5, |_| 1.0, 1.0, 1e-2).is_err());
    }

    #[test]
    fn quadrature_converges_with_step() {
        let b = Boundary::new(0.15, 0.1).unwrap();
        let exact = oracle_cost(100.0, 0.15, 0.1, 0.25);
        let err = |h: f64| {
            (cost_quadrature(&complete(), &b, 0.25, |_| 2.0, 1.0, h).unwrap() - exact).abs() / exact
        };
        assert!(err(1e-1) < 1e-4);
        assert!(err(1e-3) < 1e-9);
    }

    #[test]
    fn scan_examples() {
        let b = Boundary::new(0.1, 0.1).unwrap();
        for &p in &[0.0, 0.5, 1.0] {
            let grid = uniform_grid(1.05, 4.0, 0.01);
            let scan = constant_u_cost_scan(&complete(), &b, p, 1.0, &grid).unwrap();
            assert_abs_diff_eq!(scan.best_u, 2.0, epsilon = 0.01 + 1e-9);
        }
        let scan = constant_u_cost_scan(&complete(), &b, 0.3, 1.0, &[2.0, 3.0]).unwrap();
        assert_abs_diff_eq!(scan.curve[1].1 / scan.curve[0].1, 1.125, epsilon = 1e-4);

        let grid = uniform_grid(0.51, 2.0, 0.01);
        let scan = constant_u_cost_scan(&complete(), &b, 0.7, 0.5, &grid).unwrap();
        assert_abs_diff_eq!(scan.best_u, 1.0, epsilon = 0.01 + 1e-9);

        assert!(constant_u_cost_scan(&complete(), &b, 0.5, 1.0, &[1.0, 2.0]).is_err());
        assert!(constant_u_cost_scan(&complete(), &b, 0.5, 1.0, &[]).is_err());
    }

    #[test]
    fn scan_curve_is_convex() {
        let b = Boundary::new(0.2, 0.1).unwrap();
        for s in [complete(), regular()] {
            for &p in &[0.0, 0.4, 1.0] {
                let grid = uniform_grid(1.1, 4.0, 0.05);
                let scan = constant_u_cost_scan(&s, &b, p, 1.0, &grid).unwrap();
                for w in scan.curve.windows(3) {
                    assert!(w[0].1 + w[2].1 - 2.0 * w[1].1 > 0.0);
                }
            }
        }
    }

    #[test]
    fn uniform_grid_endpoints() {
        let g = uniform_grid(1.01, 4.0, 0.01);
        assert_eq!(g.len(), 300);
        assert_abs_diff_eq!(*g.last().unwrap(), 4.0, epsilon = 1e-12);
        assert_eq!(uniform_grid(0.0, 1.0, 0.1).len(), 11);
    }

    fn game() -> GameParams {
        GameParams::new(2.0, 1.0, 2.0, 0.5).unwrap()
    }

    #[test]
    fn pair_rhs_examples() {
        let on = PairState::new(0.5, manifold(0.5, 4)).unwrap();
        assert_abs_diff_eq!(on.x_cc, 2.0 / 3.0, epsilon = 1e-15);
        let (dx, dxx) = pair_rhs(&on, &game(), 4, 0.1).unwrap();
        assert_abs_diff_eq!(dxx, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dx, 0.1 * 4.0 * 2.0 / 6.0 * 0.25 * 1.0, epsilon = 1e-15);

        let (dx, dxx) = pair_rhs(&PairState::new(0.5, 0.5).unwrap(), &game(), 4, 0.1).unwrap();
        assert_abs_diff_eq!(dx, 0.025, epsilon = 1e-15);
        assert_abs_diff_eq!(dxx, 0.125, epsilon = 1e-15);

        assert_eq!(pair_rhs(&PairState { x_c: 1.0, x_cc: 1.0 }, &game(), 4, 0.1).unwrap(), (0.0, 0.0));
        assert!(pair_rhs(&PairState { x_c: 0.5, x_cc: 0.5 }, &game(), 2, 0.1).is_err());
    }

    #[test]
    fn on_manifold_flow_is_reduced_flow() {
        for k in 3..8 {
            for i in 1..20 {
                let x = i as f64 / 20.0;
                let s = PairState { x_c: x, x_cc: manifold(x, k) };
                let (dx, dxx) = pair_rhs(&s, &game(), k, 0.05).unwrap();
                assert_abs_diff_eq!(dxx, 0.0, epsilon = 1e-14);
                assert_abs_diff_eq!(dx, reduced_rate(&game(), k, 0.05) * x * (1.0 - x), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn manifold_examples() {
        assert_abs_diff_eq!(manifold(0.0, 4), 1.0 / 3.0, epsilon = 1e-15);
        for k in 3..10 {
            assert_abs_diff_eq!(manifold(1.0, k), 1.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(manifold(0.5, 4), 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn pair_state_derived_quantities() {
        let s = PairState::new(0.4, 0.7).unwrap();
        assert_abs_diff_eq!(s.x_c_given_d(), 0.4 * 0.3 / 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(s.x_d_given_d(), (1.0 - 0.8 + 0.28) / 0.6, epsilon = 1e-15);
        // x_C|D would exceed 1.
        assert!(PairState::new(0.9, 0.1).is_err());
    }

    #[test]
    fn off_manifold_start_collapses() {
        let r = slow_manifold_check(0.2, 0.2, 0.9, &game(), 4, 1e-2, 0.05, 1e-3).unwrap();
        assert!(r.drift_at_collapse < 0.05);
        assert!(r.tracking_error < 0.05);
    }
}
