//! Demand-weighted measurement of how well language technology serves the
//! world's languages.
//!
//! Task scores are normalized into per-language utilities, weighted by a
//! demand distribution that interpolates between treating every language
//! equally (`tau = 0`) and weighting by speaker population (`tau = 1`), and
//! summed into one global metric `M_tau`. Around that core sit a priority
//! ranking, pivot estimates for unevaluated translation pairs, and a
//! publication scanner.

mod tsv;

pub mod dataset;
pub mod demand;
pub mod error;
pub mod ingest;
pub mod lang;
pub mod metric;
pub mod pivot;
pub mod priority;
pub mod pubscan;
pub mod report;
pub mod svg;
pub mod utility;

pub use dataset::{Dataset, TaskSelector};
pub use demand::{demand_vector, econ_pair_demand, DemandVector, PairDemand};
pub use error::{Error, Result};
pub use ingest::{Subject, TaskResultSet, TaskSpec};
pub use lang::{Iso3, LanguageRecord, PopulationBasis, Registry};
pub use metric::{global_metric, metric_curve, restricted_metric, MetricReport};
pub use pivot::{best_pivot_path, PivotEstimate, PivotGraph};
pub use priority::{greedy_population_curve, priority_ranking, PriorityRanking};
pub use utility::{build_utility_table, normalize_score, LanguageUtilities, UtilityTable};
