//! Optimally combined reward and punishment for the incentivized prisoner's dilemma.
//!
//! An institution rewards cooperators with weight `p` and punishes defectors
//! with weight `1 - p`, both at per-interaction magnitude `u`. This crate
//! provides:
//!
//! * [`game`]: payoffs, mean-field and accumulated payoffs, the feasible region
//!   of boundary conditions.
//! * [`analytic`]: closed-form replicator trajectories, the optimal incentive
//!   `u* = 2c`, cost coefficients, the cumulative cost `J*(p)` and the regime
//!   classifier that picks the cheapest reward/punishment mix.
//! * [`dynamics`]: RK4 integration with crossing detection, Simpson quadrature
//!   of the cost functional, brute-force scans over constant incentives and the
//!   pair-approximation system with its slow manifold.
//! * [`networks`]: seeded generators for complete graphs, periodic square
//!   lattices, Barabási–Albert, Watts–Strogatz and Erdős–Rényi graphs.
//! * [`mc`]: the agent-based Monte Carlo engine with institutional cost ledgers.
//! * [`harness`]: experiment configuration, sweeps and CSV/JSON emission used
//!   by the `incentive` binary.
//!
//! ```
//! use combined_incentive::analytic::{cost_coefficients, optimal_preference, Regime};
//! use combined_incentive::game::{Boundary, Structure};
//!
//! let structure = Structure::complete(100).unwrap();
//! let bounds = Boundary::new(0.15, 0.1).unwrap();
//! let coeffs = cost_coefficients(&structure, &bounds, 1.0).unwrap();
//! let regime = optimal_preference(&coeffs).unwrap();
//! assert!(matches!(regime.case, Regime::Interior { .. }));
//! assert!((regime.p_opt() - 0.313105).abs() < 1e-6);
//! ```

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod game;
pub mod harness;
pub mod mc;
pub mod networks;
pub mod seeding;

pub use error::{Error, Result};
