//! Integrates the replicator equation under the optimal incentive and compares
//! the trajectory, hitting time and cost with their closed forms.

use combined_incentive::analytic::{cost_coefficients, cumulative_cost, optimal_incentive, terminal_time, trajectory};
use combined_incentive::dynamics::{cost_quadrature, integrate, stability, Stop};
use combined_incentive::game::{Boundary, Structure};

fn main() -> combined_incentive::Result<()> {
    let c = 1.0;
    let u = optimal_incentive(c)?;
    let bounds = Boundary::new(0.15, 0.1)?;

    for structure in [Structure::complete(100)?, Structure::regular(100, 4, 0.1)?] {
        let traj = integrate(&structure, bounds.x0, |_| u, c, 1e-3, Stop::AtState(bounds.terminal_state()))?;
        let worst = traj
            .states
            .iter()
            .map(|s| (s.x - trajectory(&structure, bounds.x0, c, s.t).unwrap()).abs())
            .fold(0.0, f64::max);
        let t_f = traj.crossing_time.unwrap_or(f64::NAN);
        let closed_t = terminal_time(&structure, &bounds, c)?;
        let j = cost_quadrature(&structure, &bounds, 0.5, |_| u, c, 1e-3)?;
        let closed_j = cumulative_cost(&cost_coefficients(&structure, &bounds, c)?, 0.5)?;
        let stab = stability(&structure, u, c)?;
        println!("{} structure", structure.label());
        println!("  max |x - logistic|  {worst:.3e}");
        println!("  t_f                 {t_f:.8} (closed form {closed_t:.8})");
        println!("  J(p=0.5)            {j:.8e} (closed form {closed_j:.8e})");
        println!("  x=0 {:?}, x=1 {:?}", stab.at_zero, stab.at_one);
    }
    Ok(())
}
