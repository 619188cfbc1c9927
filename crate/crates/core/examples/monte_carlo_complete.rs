//! Monte Carlo cost curves on a complete graph against the analytic optimum.
//!
//! Run with `cargo run --release --example monte_carlo_complete [runs]`.

use combined_incentive::analytic::{cost_coefficients, cumulative_cost, optimal_preference};
use combined_incentive::game::{Boundary, GameParams, Structure};
use combined_incentive::mc::{argmin_p, calibrate_scale, run_experiment, shape_correlation, Arena, McConfig, UpdateRule};

fn main() -> combined_incentive::Result<()> {
    let runs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let structure = Structure::complete(100)?;
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();

    for (x0, delta) in [(0.1, 0.1), (0.15, 0.1), (0.3, 0.1), (0.1, 0.15), (0.1, 0.3)] {
        let bounds = Boundary::new(x0, delta)?;
        let cfg = McConfig {
            game: GameParams::new(2.0, 1.0, 2.0, 0.5)?,
            bounds,
            rule: UpdateRule::NormalizedImitation,
            runs,
            seed: 1,
            max_sweeps: 100_000,
        };
        let cells = run_experiment(&cfg, Arena::WellMixed { n: 100 }, &grid)?;
        let coeffs = cost_coefficients(&structure, &bounds, 1.0)?;
        let analytic: Vec<f64> = grid.iter().map(|&p| cumulative_cost(&coeffs, p)).collect::<Result<_, _>>()?;
        let mc: Vec<f64> = cells.iter().map(|c| c.mean_cost).collect();
        let pairs: Vec<(f64, f64)> = mc.iter().copied().zip(analytic.iter().copied()).collect();
        let scale = calibrate_scale(&pairs)?;
        println!(
            "x0={x0} delta={delta}: p*={:.3} mc argmin={:.1} corr={:.4} scale={scale:.3e}",
            optimal_preference(&coeffs)?.p_opt(),
            argmin_p(&cells).unwrap_or(f64::NAN),
            shape_correlation(&mc, &analytic)
        );
        for cell in cells.iter().step_by(2) {
            println!(
                "    p={:.1}  J={:.4e} ± {:.1e}  conv={:.3}",
                cell.p, cell.mean_cost, cell.stderr, cell.convergence_rate
            );
        }
    }
    Ok(())
}
