//! Seeded generators for the interaction networks and a compact undirected
//! graph type.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seeding;
use crate::{Error, Result};

/// Attempts made to draw a connected graph before giving up.
pub const CONNECTIVITY_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum NetworkModel {
    Complete { n: usize },
    /// Periodic `l × l` square lattice, von Neumann neighbourhood.
    Lattice { l: usize },
    /// Seed clique on `m0` nodes, then `m` preferential links per new node.
    BarabasiAlbert { n: usize, m0: usize, m: usize },
    WattsStrogatz { n: usize, k: usize, rewire: f64 },
    /// `G(n, M)` with `M = round(n · mean_degree / 2)`.
    ErdosRenyi { n: usize, mean_degree: f64 },
}

impl NetworkModel {
    pub fn n(&self) -> usize {
        match *self {
            NetworkModel::Lattice { l } => l * l,
            NetworkModel::Complete { n }
            | NetworkModel::BarabasiAlbert { n, .. }
            | NetworkModel::WattsStrogatz { n, .. }
            | NetworkModel::ErdosRenyi { n, .. } => n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NetworkModel::Complete { .. } => "complete",
            NetworkModel::Lattice { .. } => "lattice",
            NetworkModel::BarabasiAlbert { .. } => "barabasi_albert",
            NetworkModel::WattsStrogatz { .. } => "watts_strogatz",
            NetworkModel::ErdosRenyi { .. } => "erdos_renyi",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match *self {
            NetworkModel::Complete { n } if n < 2 => bad(format!("complete graph needs n >= 2, got {n}")),
            NetworkModel::Lattice { l } if l < 3 => bad(format!("periodic lattice needs l >= 3, got {l}")),
            NetworkModel::BarabasiAlbert { n, m0, m } if !(m >= 1 && m <= m0 && m0 < n) => {
                bad(format!("need 1 <= m <= m0 < n, got n={n}, m0={m0}, m={m}"))
            }
            NetworkModel::WattsStrogatz { n, k, rewire } => {
                if k < 2 || k % 2 != 0 || k >= n {
                    bad(format!("need even k with 2 <= k < n, got n={n}, k={k}"))
                } else if !(0.0..=1.0).contains(&rewire) {
                    bad(format!("rewire must lie in [0, 1], got {rewire}"))
                } else {
                    Ok(())
                }
            }
            NetworkModel::ErdosRenyi { n, mean_degree } => {
                if n < 2 || !(mean_degree > 0.0 && mean_degree <= (n - 1) as f64) {
                    bad(format!("need n >= 2 and 0 < mean_degree <= n-1, got n={n}, {mean_degree}"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    #[serde(flatten)]
    pub model: NetworkModel,
    pub seed: u64,
}

impl NetworkSpec {
    pub fn new(model: NetworkModel, seed: u64) -> Self {
        NetworkSpec { model, seed }
    }
}

/// Undirected graph stored as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Wraps raw adjacency lists without checking them; see [`validate`].
    pub fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Self {
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { adj }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut sets = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidSpec(format!("edge ({u}, {v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::InvalidSpec(format!("self-loop at {u}")));
            }
            if !sets[u].insert(v) {
                return Err(Error::InvalidSpec(format!("duplicate edge ({u}, {v})")));
            }
            sets[v].insert(u);
        }
        Ok(Self::from_sets(sets))
    }

    fn from_sets(sets: Vec<BTreeSet<usize>>) -> Self {
        Graph { adj: sets.into_iter().map(|s| s.into_iter().collect()).collect() }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn mean_degree(&self) -> f64 {
        if self.adj.is_empty() {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.n() as f64
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if v < n && !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }
}

/// Generates the graph described by `spec`; deterministic in `(spec, seed)`.
pub fn generate(spec: &NetworkSpec) -> Result<Graph> {
    spec.model.validate()?;
    match spec.model {
        NetworkModel::Complete { n } => Ok(complete(n)),
        NetworkModel::Lattice { l } => Ok(lattice(l)),
        NetworkModel::BarabasiAlbert { n, m0, m } => {
            Ok(barabasi_albert(n, m0, m, &mut seeding::rng(seeding::derive(spec.seed, &[0]))))
        }
        NetworkModel::WattsStrogatz { n, k, rewire } => {
            retry_connected(spec.seed, |rng| watts_strogatz(n, k, rewire, rng))
        }
        NetworkModel::ErdosRenyi { n, mean_degree } => {
            retry_connected(spec.seed, |rng| erdos_renyi(n, mean_degree, rng))
        }
    }
}

fn retry_connected(seed: u64, mut draw: impl FnMut(&mut seeding::Rng) -> Graph) -> Result<Graph> {
    for attempt in 0..CONNECTIVITY_ATTEMPTS {
        let g = draw(&mut seeding::rng(seeding::derive(seed, &[attempt as u64])));
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Disconnected { attempts: CONNECTIVITY_ATTEMPTS })
}

fn complete(n: usize) -> Graph {
    Graph { adj: (0..n).map(|i| (0..n).filter(|&j| j != i).collect()).collect() }
}

fn lattice(l: usize) -> Graph {
    let id = |r: usize, c: usize| (r % l) * l + (c % l);
    let adj = (0..l * l)
        .map(|i| {
            let (r, c) = (i / l, i % l);
            let mut nb = vec![id(r + l - 1, c), id(r + 1, c), id(r, c + l - 1), id(r, c + 1)];
            nb.sort_unstable();
            nb
        })
        .collect();
    Graph { adj }
}

fn barabasi_albert(n: usize, m0: usize, m: usize, rng: &mut impl Rng) -> Graph {
    let mut sets = vec![BTreeSet::new(); n];
    // Every edge contributes both endpoints, so uniform draws from this list
    // are degree-proportional.
    let mut endpoints = Vec::with_capacity(2 * (m0 * (m0 - 1) / 2 + (n - m0) * m));
    for u in 0..m0 {
        for v in u + 1..m0 {
            sets[u].insert(v);
            sets[v].insert(u);
            endpoints.extend([u, v]);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for v in m0..n {
        targets.clear();
        while targets.len() < m {
            let t = if endpoints.is_empty() {
                rng.gen_range(0..v)
            } else {
                endpoints[rng.gen_range(0..endpoints.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            sets[v].insert(t);
            sets[t].insert(v);
            endpoints.extend([v, t]);
        }
    }
    Graph::from_sets(sets)
}

fn watts_strogatz(n: usize, k: usize, rewire: f64, rng: &mut impl Rng) -> Graph {
    let mut sets = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in 1..=k / 2 {
            let v = (i + j) % n;
            sets[i].insert(v);
            sets[v].insert(i);
        }
    }
    for i in 0..n {
        for j in 1..=k / 2 {
            let old = (i + j) % n;
            if !sets[i].contains(&old) || !rng.gen_bool(rewire) {
                continue;
            }
            let free = n - 1 - sets[i].len();
            if free == 0 {
                continue;
            }
            // Uniform choice among nodes that are neither i nor adjacent to it.
            let mut pick = rng.gen_range(0..free);
            let w = (0..n)
                .filter(|&w| w != i && !sets[i].contains(&w))
                .find(|_| {
                    let hit = pick == 0;
                    pick = pick.wrapping_sub(1);
                    hit
                })
                .expect("free count matches candidates");
            sets[i].remove(&old);
            sets[old].remove(&i);
            sets[i].insert(w);
            sets[w].insert(i);
        }
    }
    Graph::from_sets(sets)
}

fn erdos_renyi(n: usize, mean_degree: f64, rng: &mut impl Rng) -> Graph {
    let pairs = n * (n - 1) / 2;
    let m = ((n as f64 * mean_degree / 2.0).round() as usize).min(pairs);
    let mut sets = vec![BTreeSet::new(); n];
    for idx in index::sample(rng, pairs, m) {
        let (u, v) = pair_from_index(n, idx);
        sets[u].insert(v);
        sets[v].insert(u);
    }
    Graph::from_sets(sets)
}

/// Maps `0..n(n-1)/2` onto pairs `u < v` in row-major order.
fn pair_from_index(n: usize, mut idx: usize) -> (usize, usize) {
    let mut u = 0;
    while idx >= n - 1 - u {
        idx -= n - 1 - u;
        u += 1;
    }
    (u, u + 1 + idx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub symmetric: bool,
    pub simple: bool,
    pub connected: bool,
    pub nodes: usize,
    pub edges: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub mean_degree: f64,
    pub issues: Vec<String>,
}

/// Structural checks; failures are reported, never raised.
pub fn validate(graph: &Graph) -> ValidationReport {
    let n = graph.n();
    let mut issues = Vec::new();
    let mut simple = true;
    let mut symmetric = true;
    for (u, list) in graph.adj.iter().enumerate() {
        if list.iter().any(|&v| v == u) {
            simple = false;
            issues.push(format!("self-loop at node {u}"));
        }
        if list.windows(2).any(|w| w[0] == w[1]) {
            simple = false;
            issues.push(format!("repeated neighbour at node {u}"));
        }
        for &v in list {
            if v >= n {
                symmetric = false;
                issues.push(format!("node {u} lists out-of-range neighbour {v}"));
            } else if graph.adj[v].binary_search(&u).is_err() {
                symmetric = false;
                issues.push(format!("edge {u}->{v} has no reverse"));
            }
        }
    }
    let connected = graph.is_connected();
    if !connected {
        issues.push("disconnected".into());
    }
    let degrees = graph.adj.iter().map(Vec::len);
    ValidationReport {
        passed: simple && symmetric && connected,
        symmetric,
        simple,
        connected,
        nodes: n,
        edges: graph.edge_count(),
        min_degree: degrees.clone().min().unwrap_or(0),
        max_degree: degrees.max().unwrap_or(0),
        mean_degree: graph.mean_degree(),
        issues,
    }
}

/// Plain-text edge list: `n <count>` then one `u v` line per edge.
pub fn to_edge_list(graph: &Graph) -> String {
    let mut out = format!("n {}\n", graph.n());
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}").expect("writing to a String cannot fail");
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::InvalidSpec("empty edge list".into()))?;
    let n = header
        .strip_prefix("n ")
        .and_then(|s| s.trim().parse::<usize>().ok())
        .ok_or_else(|| Error::InvalidSpec(format!("bad edge-list header {header:?}")))?;
    let edges = lines
        .map(|line| {
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => Ok((u, v)),
                _ => Err(Error::InvalidSpec(format!("bad edge line {line:?}"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Graph::from_edges(n, &edges)
}

/// JSON form of a generated graph, carrying what is needed to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub spec: NetworkSpec,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphRecord {
    pub fn new(spec: NetworkSpec, graph: &Graph) -> Self {
        GraphRecord { spec, n: graph.n(), edges: graph.edges() }
    }

    pub fn graph(&self) -> Result<Graph> {
        Graph::from_edges(self.n, &self.edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gen(model: NetworkModel, seed: u64) -> Graph {
        generate(&NetworkSpec::new(model, seed)).unwrap()
    }

    #[test]
    fn complete_example() {
        let g = gen(NetworkModel::Complete { n: 8 }, 0);
        let r = validate(&g);
        assert!(r.passed);
        assert_eq!((r.nodes, r.edges, r.min_degree, r.max_degree), (8, 28, 7, 7));
        assert_eq!(r.mean_degree, 7.0);
    }

    #[test]
    fn lattice_example() {
        let g = gen(NetworkModel::Lattice { l: 10 }, 0);
        let r = validate(&g);
        assert!(r.passed);
        assert_eq!((r.nodes, r.edges, r.min_degree, r.max_degree), (100, 200, 4, 4));
        assert_eq!(g.neighbors(0), &[1, 9, 10, 90]);
    }

    #[test]
    fn barabasi_albert_example() {
        for seed in 0..20 {
            let g = gen(NetworkModel::BarabasiAlbert { n: 100, m0: 6, m: 2 }, seed);
            let r = validate(&g);
            assert!(r.passed);
            assert_eq!((r.nodes, r.edges), (100, 203));
            assert!(r.min_degree >= 2);
        }
    }

    #[test]
    fn barabasi_albert_tail() {
        let mut hist = vec![0usize; 1000];
        for seed in 0..100 {
            let g = gen(NetworkModel::BarabasiAlbert { n: 1000, m0: 6, m: 2 }, seed);
            let max = (0..g.n()).map(|i| g.degree(i)).max().unwrap();
            assert!(max as f64 > 3.0 * g.mean_degree(), "seed {seed}: max degree {max}");
            for i in 0..g.n() {
                hist[g.degree(i)] += 1;
            }
        }
        // Pooled histogram is decreasing from the minimum degree for as long
        // as the bins are well populated.
        let populated: Vec<usize> = hist[2..].iter().copied().take_while(|&c| c >= 200).collect();
        assert!(populated.len() >= 8, "{populated:?}");
        assert!(populated.windows(2).all(|w| w[1] < w[0]), "{populated:?}");
    }

    #[test]
    fn watts_strogatz_examples() {
        let ring = gen(NetworkModel::WattsStrogatz { n: 100, k: 4, rewire: 0.0 }, 3);
        let r = validate(&ring);
        assert!(r.passed);
        assert_eq!((r.min_degree, r.max_degree, r.edges), (4, 4, 200));

        for seed in 0..20 {
            let g = gen(NetworkModel::WattsStrogatz { n: 100, k: 4, rewire: 0.1 }, seed);
            assert!(validate(&g).passed);
            assert_eq!(g.edge_count(), 200);
            assert_ne!(g, ring);
        }
        let g = gen(NetworkModel::WattsStrogatz { n: 60, k: 6, rewire: 1.0 }, 1);
        assert_eq!(g.edge_count(), 180);
    }

    #[test]
    fn erdos_renyi_mean_degree() {
        let mut total = 0.0;
        for seed in 0..100 {
            let g = gen(NetworkModel::ErdosRenyi { n: 100, mean_degree: 4.0 }, seed);
            assert!(validate(&g).passed);
            assert!((g.mean_degree() - 4.0).abs() <= 0.4);
            total += g.mean_degree();
        }
        assert!((total / 100.0 - 4.0).abs() <= 0.4);
    }

    #[test]
    fn sparse_erdos_renyi_gives_up() {
        let err = generate(&NetworkSpec::new(NetworkModel::ErdosRenyi { n: 200, mean_degree: 1.0 }, 0));
        assert!(matches!(err, Err(Error::Disconnected { attempts: 100 })));
    }

    #[test]
    fn invalid_specs() {
        for model in [
            NetworkModel::Complete { n: 1 },
            NetworkModel::Lattice { l: 2 },
            NetworkModel::BarabasiAlbert { n: 100, m0: 2, m: 3 },
            NetworkModel::BarabasiAlbert { n: 6, m0: 6, m: 2 },
            NetworkModel::WattsStrogatz { n: 100, k: 3, rewire: 0.1 },
            NetworkModel::WattsStrogatz { n: 100, k: 4, rewire: 1.5 },
            NetworkModel::ErdosRenyi { n: 100, mean_degree: 0.0 },
        ] {
            assert!(matches!(generate(&NetworkSpec::new(model, 0)), Err(Error::InvalidSpec(_))), "{model:?}");
        }
    }

    #[test]
    fn validate_flags_problems() {
        let isolated = Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        let r = validate(&isolated);
        assert!(!r.passed && !r.connected && r.simple && r.symmetric);
        assert_eq!(r.min_degree, 0);

        let one_way = Graph::from_adjacency(vec![vec![1], vec![]]);
        assert!(!validate(&one_way).symmetric);
        let looped = Graph::from_adjacency(vec![vec![0, 1], vec![0]]);
        assert!(!validate(&looped).simple);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = gen(NetworkModel::WattsStrogatz { n: 30, k: 4, rewire: 0.3 }, 9);
        let text = to_edge_list(&g);
        assert!(text.starts_with("n 30\n"));
        assert_eq!(text.lines().count(), 61);
        assert_eq!(parse_edge_list(&text).unwrap(), g);
        assert!(parse_edge_list("n 3\n0 0\n").is_err());
        assert!(parse_edge_list("nodes 3\n").is_err());
    }

    #[test]
    fn json_record_round_trip() {
        let spec = NetworkSpec::new(NetworkModel::BarabasiAlbert { n: 20, m0: 4, m: 2 }, 5);
        let g = generate(&spec).unwrap();
        let json = serde_json::to_string(&GraphRecord::new(spec, &g)).unwrap();
        let back: GraphRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.spec, spec);
        assert_eq!(back.graph().unwrap(), g);
    }

    #[test]
    fn pair_index_is_bijective() {
        let n = 7;
        let pairs: Vec<_> = (0..n * (n - 1) / 2).map(|i| pair_from_index(n, i)).collect();
        let expected: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        assert_eq!(pairs, expected);
    }

    proptest! {
        #[test]
        fn generation_is_deterministic(seed in any::<u64>(), which in 0usize..4) {
            let model = [
                NetworkModel::BarabasiAlbert { n: 50, m0: 5, m: 2 },
                NetworkModel::WattsStrogatz { n: 50, k: 4, rewire: 0.2 },
                NetworkModel::ErdosRenyi { n: 50, mean_degree: 6.0 },
                NetworkModel::Lattice { l: 5 },
            ][which];
            let a = to_edge_list(&gen(model, seed));
            let b = to_edge_list(&gen(model, seed));
            prop_assert_eq!(a, b);
        }

        #[test]
        fn generated_graphs_validate(seed in any::<u64>(), n in 10usize..60, rewire in 0.0f64..1.0) {
            let g = gen(NetworkModel::WattsStrogatz { n, k: 4, rewire }, seed);
            prop_assert!(validate(&g).passed);
            prop_assert_eq!(g.edge_count(), 2 * n);
            let g = gen(NetworkModel::BarabasiAlbert { n, m0: 3, m: 2 }, seed);
            prop_assert!(validate(&g).passed);
            prop_assert_eq!(g.edge_count(), 3 + 2 * (n - 3));
        }
    }
}
