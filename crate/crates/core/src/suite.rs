//! Seeded random digraphs and the randomized spectral property suites.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{build_incidence, has_globally_reachable_node, Digraph};
use crate::spectral::{analyze_sym_lo, fan_hoffman_holds, proposition1_from, proposition23_from};

/// Edge probabilities of the Erdős–Rényi generator; one is drawn per graph.
pub const EDGE_PROBABILITIES: [f64; 3] = [0.3, 0.5, 0.7];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error("count must be at least 1")]
    EmptyCorpus,
    #[error("n_max must be at least 2, got {0}")]
    TooFewVertices(usize),
}

/// Directed Erdős–Rényi graph on `n` vertices without self-loops.
pub fn erdos_renyi<R: Rng>(rng: &mut R, n: usize, p: f64) -> Digraph {
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.random_bool(p) {
                edges.push((s, t));
            }
        }
    }
    Digraph::from_zero_based(n, &edges).expect("generated edges are valid")
}

/// Erdős–Rényi digraph with `n ∈ [2, n_max]`, resampled until some node is
/// globally reachable.
pub fn random_reachable_digraph<R: Rng>(rng: &mut R, n_max: usize) -> Digraph {
    let n = rng.random_range(2..=n_max.max(2));
    let p = *EDGE_PROBABILITIES.choose(rng).expect("non-empty");
    loop {
        let g = erdos_renyi(rng, n, p);
        if has_globally_reachable_node(&g) {
            return g;
        }
    }
}

/// Balanced digraph built as an edge-disjoint union of random simple cycles.
/// The first cycle is Hamiltonian, so the result is strongly connected.
pub fn random_balanced_digraph<R: Rng>(rng: &mut R, n_max: usize) -> Digraph {
    let n = rng.random_range(2..=n_max.max(2));
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    push_cycle(&mut edges, &order);
    for _ in 0..rng.random_range(0..=n) {
        let len = rng.random_range(2..=n);
        order.shuffle(rng);
        let cycle = &order[..len];
        let closed: Vec<(usize, usize)> = (0..len).map(|i| (cycle[i], cycle[(i + 1) % len])).collect();
        if closed.iter().all(|e| !edges.contains(e)) {
            edges.extend(closed);
        }
    }
    Digraph::from_zero_based(n, &edges).expect("cycles are edge-disjoint")
}

fn push_cycle(edges: &mut Vec<(usize, usize)>, cycle: &[usize]) {
    let len = cycle.len();
    edges.extend((0..len).map(|i| (cycle[i], cycle[(i + 1) % len])));
}

/// The corpus the suites run on: `count` graphs from a ChaCha8 stream seeded with `seed`.
pub fn proposition_corpus(seed: u64, count: usize, n_max: usize) -> Vec<Digraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_reachable_digraph(&mut rng, n_max)).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub check: String,
    pub index: usize,
    pub n_vertices: usize,
    /// 1-based `[source, target]` pairs.
    pub edges: Vec<[usize; 2]>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub count: usize,
    pub n_max: usize,
    pub edge_probabilities: [f64; 3],
    pub balanced_graphs: usize,
    pub proposition1: Tally,
    /// `kernels_equal ⟺ zero_eigenvalue`.
    pub proposition2: Tally,
    /// `kernels_equal ⟺ balanced`.
    pub proposition3: Tally,
    /// The full chain; a failure here is a counterexample.
    pub proposition2_3: Tally,
    pub fan_hoffman: Tally,
    pub counterexamples: Vec<Counterexample>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Runs the Proposition 1, Propositions 2–3 and Fan–Hoffman checks on
/// [`proposition_corpus`]. Same arguments, same report.
///
/// ```
/// let r = netpassivity::suite::run_proposition_suite(7, 20, 6).unwrap();
/// assert_eq!(r.proposition1.passed, 20);
/// assert_eq!(r.proposition3.passed, 20);
/// ```
pub fn run_proposition_suite(seed: u64, count: usize, n_max: usize) -> Result<SuiteReport, SuiteError> {
    if count == 0 {
        return Err(SuiteError::EmptyCorpus);
    }
    if n_max < 2 {
        return Err(SuiteError::TooFewVertices(n_max));
    }
    let mut report = SuiteReport {
        seed,
        count,
        n_max,
        edge_probabilities: EDGE_PROBABILITIES,
        balanced_graphs: 0,
        proposition1: Tally::default(),
        proposition2: Tally::default(),
        proposition3: Tally::default(),
        proposition2_3: Tally::default(),
        fan_hoffman: Tally::default(),
        counterexamples: Vec::new(),
    };
    for (index, g) in proposition_corpus(seed, count, n_max).iter().enumerate() {
        let inc = build_incidence(g);
        let fail = |check: &str, detail: String| Counterexample {
            check: check.to_string(),
            index,
            n_vertices: g.n_vertices(),
            edges: g.edges_one_based(),
            detail,
        };
        let analysis = match analyze_sym_lo(&inc) {
            Ok(a) => a,
            Err(e) => {
                report.proposition1.record(false);
                report.proposition2.record(false);
                report.proposition3.record(false);
                report.proposition2_3.record(false);
                report.fan_hoffman.record(false);
                report.counterexamples.push(fail("spectral", e.to_string()));
                continue;
            }
        };

        let p1 = proposition1_from(g, &analysis);
        let ok1 = p1.applicable && p1.holds;
        report.proposition1.record(ok1);
        if !ok1 {
            report.counterexamples.push(fail(
                "proposition1",
                format!("min eigenvalue {:e} above tolerance {:e}", p1.min_eigenvalue, p1.tol_eig),
            ));
        }

        let p23 = proposition23_from(g, &inc, &analysis);
        if p23.balanced {
            report.balanced_graphs += 1;
        }
        report
            .proposition2
            .record(p23.applicable && p23.kernels_equal == p23.zero_eigenvalue);
        report.proposition3.record(p23.applicable && p23.kernels_equal == p23.balanced);
        let ok23 = p23.applicable && p23.consistent;
        report.proposition2_3.record(ok23);
        if !ok23 {
            report.counterexamples.push(fail(
                "proposition2_3",
                format!(
                    "kernels_equal={} zero_eigenvalue={} balanced={}",
                    p23.kernels_equal, p23.zero_eigenvalue, p23.balanced
                ),
            ));
        }

        let fh = fan_hoffman_holds(&analysis);
        report.fan_hoffman.record(fh);
        if !fh {
            report.counterexamples.push(fail(
                "fan_hoffman",
                format!(
                    "eigenvalues {:?} vs singular values {:?}",
                    analysis.eigenvalues, analysis.singular_values
                ),
            ));
        }
    }
    Ok(report)
}
