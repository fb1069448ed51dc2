//! Translation-quality graph and pivot estimates for unevaluated pairs.
//!
//! An edge `s -> t` carries the best normalized BLEU published for that
//! direction. Chaining systems multiplies their quality, so the estimate for
//! a pair is the largest product of edge weights over any path. All weights
//! lie in `(0, 1]`, which makes path products non-increasing in length and
//! lets a Dijkstra-style label-setting search find the optimum directly on
//! products.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{DefaultPolicy, Normalizer, Subject, TaskResultSet};
use crate::lang::Iso3;
use crate::utility::UtilityTable;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PivotGraph {
    nodes: BTreeSet<Iso3>,
    edges: BTreeMap<Iso3, BTreeMap<Iso3, f64>>,
}

impl PivotGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, lang: Iso3) {
        self.nodes.insert(lang);
    }

    /// Sets the weight of `source -> target`, keeping the larger weight if the
    /// edge exists. Weights above 1 are clamped; zero means no edge.
    pub fn add_edge(&mut self, source: Iso3, target: Iso3, weight: f64) -> Result<()> {
        if source == target {
            return Err(Error::SelfPair(source));
        }
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "edge {source}-{target} has weight {weight}"
            )));
        }
        self.nodes.insert(source);
        self.nodes.insert(target);
        let weight = if weight > 1.0 {
            log::warn!("edge {source}-{target}: weight {weight} clamped to 1");
            1.0
        } else {
            weight
        };
        if weight == 0.0 {
            return Ok(());
        }
        let slot = self.edges.entry(source).or_default().entry(target).or_insert(0.0);
        if weight > *slot {
            *slot = weight;
        }
        Ok(())
    }

    pub fn edge(&self, source: Iso3, target: Iso3) -> Option<f64> {
        self.edges.get(&source).and_then(|m| m.get(&target)).copied()
    }

    pub fn nodes(&self) -> &BTreeSet<Iso3> {
        &self.nodes
    }

    pub fn contains(&self, lang: Iso3) -> bool {
        self.nodes.contains(&lang)
    }

    pub fn edges(&self) -> impl Iterator<Item = (Iso3, Iso3, f64)> + '_ {
        self.edges
            .iter()
            .flat_map(|(&s, out)| out.iter().map(move |(&t, &w)| (s, t, w)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().map(BTreeMap::len).sum()
    }

    fn out_edges(&self, lang: Iso3) -> impl Iterator<Item = (Iso3, f64)> + '_ {
        self.edges
            .get(&lang)
            .into_iter()
            .flat_map(|m| m.iter().map(|(&t, &w)| (t, w)))
    }
}

/// One edge per observed direction, weighted by the best BLEU divided by Z.
pub fn build_graph(results: &TaskResultSet) -> Result<PivotGraph> {
    let z = match results.spec.normalizer {
        Normalizer::FixedConstant(z) if results.spec.is_pairwise() => z,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "task {} is not a BLEU task with a fixed normalizer",
                results.task_id()
            )))
        }
    };
    let mut graph = PivotGraph::new();
    for (subject, score) in results.scores() {
        if let Subject::Pair { source, target } = subject {
            graph.add_edge(source, target, score / z)?;
        }
    }
    Ok(graph)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PivotEstimate {
    pub source: Iso3,
    pub target: Iso3,
    pub estimate: f64,
    /// Languages visited from source to target; empty when unreachable.
    pub path: Vec<Iso3>,
}

impl PivotEstimate {
    pub fn path_label(&self) -> String {
        self.path
            .iter()
            .map(Iso3::as_str)
            .collect::<Vec<_>>()
            .join("-")
    }
}

#[derive(PartialEq)]
struct Frontier {
    product: f64,
    node: Iso3,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on product; smaller code first among equals
        self.product
            .total_cmp(&other.product)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Best product reaching every node from `source`, with predecessors.
fn single_source(graph: &PivotGraph, source: Iso3) -> BTreeMap<Iso3, (f64, Option<Iso3>)> {
    let mut best: BTreeMap<Iso3, (f64, Option<Iso3>)> = BTreeMap::new();
    let mut settled = BTreeSet::new();
    let mut heap = BinaryHeap::new();
    best.insert(source, (1.0, None));
    heap.push(Frontier {
        product: 1.0,
        node: source,
    });
    while let Some(Frontier { product, node }) = heap.pop() {
        if !settled.insert(node) {
            continue;
        }
        for (next, w) in graph.out_edges(node) {
            if settled.contains(&next) {
                continue;
            }
            let candidate = product * w;
            let improves = best.get(&next).is_none_or(|&(p, _)| candidate > p);
            if improves {
                best.insert(next, (candidate, Some(node)));
                heap.push(Frontier {
                    product: candidate,
                    node: next,
                });
            }
        }
    }
    best
}

fn trace(
    labels: &BTreeMap<Iso3, (f64, Option<Iso3>)>,
    source: Iso3,
    target: Iso3,
) -> PivotEstimate {
    if !labels.contains_key(&target) {
        return PivotEstimate {
            source,
            target,
            estimate: 0.0,
            path: Vec::new(),
        };
    }
    let mut path = vec![target];
    let mut at = target;
    while let Some(prev) = labels[&at].1 {
        path.push(prev);
        at = prev;
    }
    path.reverse();
    PivotEstimate {
        source,
        target,
        estimate: labels[&target].0,
        path,
    }
}

/// Highest-product path from `source` to `target`; estimate 0 with an empty
/// path when `target` is unreachable.
pub fn best_pivot_path(graph: &PivotGraph, source: Iso3, target: Iso3) -> Result<PivotEstimate> {
    if source == target {
        return Err(Error::SelfPair(source));
    }
    for lang in [source, target] {
        if !graph.contains(lang) {
            return Err(Error::UnknownNode(lang));
        }
    }
    Ok(trace(&single_source(graph, source), source, target))
}

/// Estimates for every ordered pair of distinct nodes. Sources are searched
/// in parallel over the shared read-only graph.
pub fn all_pairs_estimates(graph: &PivotGraph) -> BTreeMap<(Iso3, Iso3), PivotEstimate> {
    let sources: Vec<Iso3> = graph.nodes().iter().copied().collect();
    sources
        .par_iter()
        .flat_map_iter(|&s| {
            let labels = single_source(graph, s);
            graph
                .nodes()
                .iter()
                .filter(move |&&t| t != s)
                .map(move |&t| ((s, t), trace(&labels, s, t)))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Pair utilities combining published scores with pivot estimates: each pair
/// gets the larger of its direct utility and its best-path estimate.
pub fn pivot_utility_table(direct: &UtilityTable, graph: &PivotGraph) -> Result<UtilityTable> {
    let mut entries = direct.entries.clone();
    for ((source, target), est) in all_pairs_estimates(graph) {
        if est.estimate <= 0.0 {
            continue;
        }
        let slot = entries.entry(Subject::pair(source, target)).or_insert(0.0);
        if est.estimate > *slot {
            *slot = est.estimate;
        }
    }
    let mut table = UtilityTable::from_entries(
        &format!("{}-pivot", direct.task_id),
        entries,
        DefaultPolicy::Zero,
        direct.normalizer,
    )?;
    table.context = direct.context;
    Ok(table)
}
