//! A data directory on disk and the per-task views computed from it.
//!
//! Layout: `languages.tsv` (required), `results.tsv`, and optionally
//! `trade.tsv`, `countries.tsv` with `language_countries.tsv`, and
//! `lexicon.tsv`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::demand::demand_vector;
use crate::error::{Error, Result};
use crate::ingest::{load_results, load_trade, TaskResultSet, TaskSpec, TradeShare};
use crate::lang::{load_countries, load_language_countries, Iso3, LanguageRecord, PopulationBasis, Registry};
use crate::metric::{global_metric, universe_for, MetricReport};
use crate::pivot::{build_graph, pivot_utility_table, PivotGraph};
use crate::utility::{build_utility_table, LanguageUtilities, Projection};

/// A task id as given on the command line. Translation tasks name their
/// fixed side: `mt-to-eng` scores every language translated into English,
/// `mt-from-eng` English into every language.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSelector {
    pub label: String,
    pub spec: TaskSpec,
    pub projection: Projection,
}

impl TaskSelector {
    pub fn parse(id: &str, registry: &Registry) -> Result<Self> {
        let id = id.trim();
        let (base, projection) = if let Some(rest) = id.strip_prefix("mt-to-") {
            ("mt", Projection::IntoTarget(registry.lookup_code(rest)?.iso3))
        } else if let Some(rest) = id.strip_prefix("mt-from-") {
            ("mt", Projection::FromSource(registry.lookup_code(rest)?.iso3))
        } else {
            (id, Projection::Monolingual)
        };
        let spec = TaskSpec::builtin(base)?;
        if spec.is_pairwise() && projection == Projection::Monolingual {
            return Err(Error::InvalidArgument(format!(
                "task {id} is scored on language pairs; use {id}-to-<code> or {id}-from-<code>"
            )));
        }
        Ok(TaskSelector {
            label: id.to_owned(),
            spec,
            projection,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub dir: PathBuf,
    pub registry: Registry,
}

impl Dataset {
    /// Loads the registry and, when both country tables are present, fills
    /// blank GDP values from them.
    pub fn open(dir: &Path) -> Result<Self> {
        let mut registry = Registry::load(&dir.join("languages.tsv"))?;
        let countries = dir.join("countries.tsv");
        let shares = dir.join("language_countries.tsv");
        if countries.is_file() && shares.is_file() {
            registry.attribute_gdp(&load_language_countries(&shares)?, &load_countries(&countries)?)?;
        }
        Ok(Dataset {
            dir: dir.to_owned(),
            registry,
        })
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    pub fn results(&self, spec: &TaskSpec) -> Result<TaskResultSet> {
        load_results(&self.path("results.tsv"), spec, &self.registry)
    }

    pub fn trade(&self) -> Result<Vec<TradeShare>> {
        load_trade(&self.path("trade.tsv"))
    }

    pub fn pivot_graph(&self) -> Result<PivotGraph> {
        build_graph(&self.results(&TaskSpec::builtin("mt")?)?)
    }

    /// Per-language utilities for a task, with pivot estimates filling
    /// unevaluated translation pairs when `pivot` is set.
    pub fn utilities(&self, task: &TaskSelector, pivot: bool) -> Result<LanguageUtilities> {
        let results = self.results(&task.spec)?;
        let mut table = build_utility_table(&results)?;
        if pivot {
            if !task.spec.is_pairwise() {
                return Err(Error::InvalidArgument(format!(
                    "pivot estimates apply to translation tasks, not {}",
                    task.label
                )));
            }
            table = pivot_utility_table(&table, &build_graph(&results)?)?;
        }
        let mut utilities = table.project(task.projection)?;
        utilities.task_id = task.label.clone();
        Ok(utilities)
    }

    /// Utilities and demand universe for a task over the top-level languages,
    /// or over a named subset. Results outside the universe are dropped.
    pub fn scoped(
        &self,
        task: &TaskSelector,
        subset: Option<&str>,
        pivot: bool,
    ) -> Result<(LanguageUtilities, Vec<&LanguageRecord>)> {
        let mut utilities = self.utilities(task, pivot)?;
        let records = match subset {
            None => self.registry.universe(),
            Some(s) => self.registry.subset(s)?,
        };
        let universe = universe_for(&records, &utilities);
        let codes: BTreeSet<Iso3> = universe.iter().map(|r| r.iso3).collect();
        let dropped = utilities.retain_within(&codes);
        if !dropped.is_empty() {
            log::debug!("{}: {} results outside the universe", task.label, dropped.len());
        }
        Ok((utilities, universe))
    }

    pub fn metric(
        &self,
        task: &TaskSelector,
        tau: f64,
        subset: Option<&str>,
        basis: PopulationBasis,
        pivot: bool,
    ) -> Result<MetricReport> {
        let (utilities, universe) = self.scoped(task, subset, pivot)?;
        let demand = demand_vector(universe.iter().copied(), tau, basis)?;
        global_metric(&utilities, &demand)
    }
}
