//! Scans constant incentives and shows that `u = 2c` is the cheapest way to
//! steer a complete population to the target.

use combined_incentive::analytic::{cost_coefficients, cumulative_cost, optimal_incentive};
use combined_incentive::dynamics::{constant_u_cost_scan, uniform_grid};
use combined_incentive::game::{Boundary, Structure};

fn main() -> combined_incentive::Result<()> {
    let c = 1.0;
    let structure = Structure::complete(100)?;
    let bounds = Boundary::new(0.15, 0.1)?;
    let grid = uniform_grid(1.2, 4.0, 0.05);

    for p in [0.0, 0.3, 0.5, 1.0] {
        let scan = constant_u_cost_scan(&structure, &bounds, p, c, &grid)?;
        let closed = cumulative_cost(&cost_coefficients(&structure, &bounds, c)?, p)?;
        println!(
            "p={p:.1}  best u={:.2} (u*={})  J(best)={:.6e}  closed form={closed:.6e}",
            scan.best_u,
            optimal_incentive(c)?,
            scan.best_cost
        );
    }

    let scan = constant_u_cost_scan(&structure, &bounds, 0.5, c, &grid)?;
    println!("\n   u        J(u)/J(u*)");
    for (u, j) in scan.curve.iter().step_by(8) {
        println!("{u:5.2}  {:10.4}", j / scan.best_cost);
    }
    Ok(())
}
