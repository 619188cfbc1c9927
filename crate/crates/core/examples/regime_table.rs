//! Optimal preference and regime across a grid of boundary conditions.

use combined_incentive::analytic::{cost_coefficients, optimal_preference, BoundaryChecks};
use combined_incentive::game::{feasible_region, Boundary, Structure};

fn main() -> combined_incentive::Result<()> {
    let structure = Structure::complete(100)?;
    let levels = [0.05, 0.1, 0.15, 0.2, 0.3, 0.4];

    print!("x0 \\ delta");
    for d in levels {
        print!("{d:>9}");
    }
    println!();
    for x0 in levels {
        print!("{x0:<10}");
        for d in levels {
            if feasible_region(x0, d).is_err() {
                print!("{:>9}", "-");
                continue;
            }
            let coeffs = cost_coefficients(&structure, &Boundary::new(x0, d)?, 1.0)?;
            print!("{:>9.4}", optimal_preference(&coeffs)?.p_opt());
        }
        println!();
    }

    println!("\nboundary checks");
    for (x0, d) in [(0.15, 0.1), (0.3, 0.1), (0.1, 0.3), (0.2, 0.2)] {
        let bounds = Boundary::new(x0, d)?;
        let checks = BoundaryChecks::new(&bounds)?;
        let class = optimal_preference(&cost_coefficients(&structure, &bounds, 1.0)?)?;
        println!(
            "x0={x0} delta={d}: margin={:.4} punish={:.4} reward={:.4} -> {} (p={:.4})",
            checks.margin,
            checks.punish_threshold,
            checks.reward_threshold,
            class.case.label(),
            class.p_opt()
        );
    }
    Ok(())
}
