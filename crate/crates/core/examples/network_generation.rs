//! Generates the four network families used in the simulations and prints
//! their structural statistics.

use combined_incentive::networks::{generate, to_edge_list, validate, NetworkModel, NetworkSpec};

fn main() -> combined_incentive::Result<()> {
    let models = [
        NetworkModel::Lattice { l: 10 },
        NetworkModel::BarabasiAlbert { n: 100, m0: 6, m: 2 },
        NetworkModel::WattsStrogatz { n: 100, k: 4, rewire: 0.1 },
        NetworkModel::ErdosRenyi { n: 100, mean_degree: 4.0 },
    ];
    for model in models {
        let graph = generate(&NetworkSpec::new(model, 1))?;
        let r = validate(&graph);
        println!(
            "{:<16} n={} edges={} mean degree={:.2} range {}..{} connected={}",
            model.name(),
            r.nodes,
            r.edges,
            r.mean_degree,
            r.min_degree,
            r.max_degree,
            r.connected
        );
    }

    let lattice = generate(&NetworkSpec::new(NetworkModel::Lattice { l: 3 }, 0))?;
    println!("\n3x3 lattice edge list:\n{}", to_edge_list(&lattice));
    Ok(())
}
