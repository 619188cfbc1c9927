//! Pair approximation on a regular graph: fast collapse onto the slow
//! manifold, then logistic growth at the reduced rate.

use combined_incentive::analytic::logistic;
use combined_incentive::dynamics::{integrate_pair, manifold, reduced_rate, slow_manifold_check, PairState};
use combined_incentive::game::GameParams;

fn main() -> combined_incentive::Result<()> {
    let k = 4;
    let g = GameParams::new(2.0, 1.0, 2.0, 0.5)?;

    for omega in [1e-3, 1e-2, 0.1] {
        let rate = reduced_rate(&g, k, omega);
        let s0 = PairState::new(0.2, manifold(0.2, k) + 0.2)?;
        let t_end = 6.0 / rate;
        let path = integrate_pair(s0, &g, k, omega, 0.05, t_end)?;
        println!("omega={omega}  reduced rate {rate:.3e}");
        println!("        t     x_C   off-manifold   logistic");
        let stride = path.len() / 6;
        for (t, s) in path.iter().step_by(stride.max(1)) {
            println!(
                "  {t:8.1}  {:.4}   {:+.2e}     {:.4}",
                s.x_c,
                s.x_cc - manifold(s.x_c, k),
                logistic(0.2, rate, *t)
            );
        }
        match slow_manifold_check(0.2, 0.2, 0.9, &g, k, omega, 0.05, 1e-3) {
            Ok(r) => println!(
                "  collapse at t={:.2}, x_C moved {:.2e}, tracking error {:.2e}\n",
                r.collapse_time, r.drift_at_collapse, r.tracking_error
            ),
            Err(e) => println!("  no collapse: {e}\n"),
        }
    }
    Ok(())
}
