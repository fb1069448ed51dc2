//! Brute-force reference computations and bundled fixtures.
//!
//! Nothing here depends on the library under test: each oracle restates its
//! quantity from first principles, usually in a slower or differently
//! ordered way, so agreement is meaningful.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reference value with the steps needed to recompute it by hand.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T> {
    pub description: String,
    pub expected: T,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    GraphTooLarge { nodes: usize, limit: usize },
    LengthMismatch { left: usize, right: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::GraphTooLarge { nodes, limit } => {
                write!(f, "graph has {nodes} nodes, enumeration limit is {limit}")
            }
            OracleError::LengthMismatch { left, right } => {
                write!(f, "vectors have lengths {left} and {right}")
            }
        }
    }
}

impl std::error::Error for OracleError {}

pub const ENUMERATION_LIMIT: usize = 8;

/// Best product of edge weights over every simple directed path from
/// `source` to `target`, found by listing all of them. Zero-weight edges are
/// absent; repeated edges keep their largest weight. Returns `(0, [])` when
/// no path exists.
pub fn enumerate_all_paths(
    edges: &[(&str, &str, f64)],
    source: &str,
    target: &str,
) -> Result<OracleResult<(f64, Vec<String>)>, OracleError> {
    let mut nodes: BTreeSet<&str> = BTreeSet::from([source, target]);
    let mut adj: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
    for &(s, t, w) in edges {
        nodes.insert(s);
        nodes.insert(t);
        if w > 0.0 && s != t {
            let slot = adj.entry(s).or_default().entry(t).or_insert(0.0);
            *slot = slot.max(w.min(1.0));
        }
    }
    if nodes.len() > ENUMERATION_LIMIT {
        return Err(OracleError::GraphTooLarge {
            nodes: nodes.len(),
            limit: ENUMERATION_LIMIT,
        });
    }

    struct Search<'a> {
        adj: &'a BTreeMap<&'a str, BTreeMap<&'a str, f64>>,
        target: &'a str,
        best: f64,
        best_path: Vec<String>,
        trace: Vec<String>,
    }

    fn walk<'a>(s: &mut Search<'a>, path: &mut Vec<&'a str>, weights: &mut Vec<f64>) {
        let here = *path.last().expect("nonempty");
        if here == s.target && path.len() > 1 {
            let product = weights.iter().product::<f64>();
            s.trace.push(format!("{} = {}", path.join("-"), product));
            if product > s.best {
                s.best = product;
                s.best_path = path.iter().map(|n| n.to_string()).collect();
            }
            return;
        }
        let Some(out) = s.adj.get(here) else { return };
        for (&next, &w) in out {
            if path.contains(&next) {
                continue;
            }
            path.push(next);
            weights.push(w);
            walk(s, path, weights);
            path.pop();
            weights.pop();
        }
    }

    let mut search = Search {
        adj: &adj,
        target,
        best: 0.0,
        best_path: Vec::new(),
        trace: Vec::new(),
    };
    if source != target {
        walk(&mut search, &mut vec![source], &mut Vec::new());
    }
    Ok(OracleResult {
        description: format!("max path product {source} -> {target} over all simple paths"),
        expected: (search.best, search.best_path),
        trace: search.trace,
    })
}

/// `sum_i d_i * u_i`, accumulated from the last element to the first.
pub fn dot_product_metric(
    demands: &[f64],
    utilities: &[f64],
) -> Result<OracleResult<f64>, OracleError> {
    if demands.len() != utilities.len() {
        return Err(OracleError::LengthMismatch {
            left: demands.len(),
            right: utilities.len(),
        });
    }
    let mut total = 0.0;
    let mut trace = Vec::with_capacity(demands.len());
    for i in (0..demands.len()).rev() {
        total += demands[i] * utilities[i];
        trace.push(format!("+ {} * {}", demands[i], utilities[i]));
    }
    Ok(OracleResult {
        description: "dot product of demand and utility".into(),
        expected: total,
        trace,
    })
}

/// `n_i^tau / sum_j n_j^tau` straight from the definition, with `0^0 = 1`.
pub fn direct_demand(populations: &[f64], tau: f64) -> Vec<f64> {
    let pow = |n: f64| if tau == 0.0 { 1.0 } else { n.powf(tau) };
    let total: f64 = populations.iter().map(|&n| pow(n)).sum();
    populations.iter().map(|&n| pow(n) / total).collect()
}

/// Midrank percentile by pairwise counting.
pub fn pairwise_percentiles(counts: &[u64]) -> Vec<f64> {
    let n = counts.len() as f64;
    counts
        .iter()
        .map(|c| {
            let below = counts.iter().filter(|x| *x < c).count() as f64;
            let tied = counts.iter().filter(|x| *x == c).count() as f64;
            (below + 0.5 * tied) / n
        })
        .collect()
}

/// Metric after forcing the `k` most populous languages (ties by index) to
/// utility 1, for every `k`, each recomputed from scratch.
pub fn greedy_curve_by_recomputation(
    populations: &[f64],
    demands: &[f64],
    utilities: &[f64],
) -> Vec<f64> {
    let mut order: Vec<usize> = (0..populations.len()).collect();
    order.sort_by(|&a, &b| populations[b].total_cmp(&populations[a]).then(a.cmp(&b)));
    (0..=order.len())
        .map(|k| {
            let mut u = utilities.to_vec();
            for &i in &order[..k] {
                u[i] = 1.0;
            }
            demands.iter().zip(&u).map(|(d, u)| d * u).sum()
        })
        .collect()
}

/// Root of the hand-built sample data set shipped with the repository.
pub fn mini_data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/mini")
}

/// A synthetic document with known language mentions.
#[derive(Debug, Clone)]
pub struct PlantedDocument {
    pub text: String,
    /// Codes of the languages whose names were planted.
    pub planted: BTreeSet<String>,
}

/// Builds a document of `filler` random tokens with one name from each of
/// `pick` randomly chosen `candidates` inserted at random positions, plus
/// every `decoys` form (words that must not count as mentions).
///
/// Filler words start with "qx" so they never collide with a real name.
pub fn planted_corpus(
    seed: u64,
    candidates: &[(&str, &str)],
    pick: usize,
    filler: usize,
    decoys: &[&str],
) -> PlantedDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tokens: Vec<String> = (0..filler)
        .map(|_| {
            let len = rng.gen_range(3..8);
            let tail: String = (0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
            format!("qx{tail}")
        })
        .collect();
    let chosen: Vec<&(&str, &str)> = candidates.choose_multiple(&mut rng, pick).collect();
    let mut planted = BTreeSet::new();
    for (code, name) in chosen {
        let at = rng.gen_range(0..=tokens.len());
        tokens.insert(at, name.to_string());
        planted.insert(code.to_string());
    }
    for decoy in decoys {
        let at = rng.gen_range(0..=tokens.len());
        tokens.insert(at, decoy.to_string());
    }
    let mut text = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            text.push(if i % 17 == 0 { '\n' } else { ' ' });
        }
        text.push_str(t);
        if i % 23 == 22 {
            text.push('.');
        }
    }
    PlantedDocument { text, planted }
}
