//! The global utility metric `M_tau = sum_l d_l * u_l`.

use crate::demand::{demand_vector, DemandVector};
use crate::error::{check_tau, Error, Result};
use crate::lang::{Iso3, LanguageRecord, PopulationBasis};
use crate::utility::LanguageUtilities;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contribution {
    pub iso3: Iso3,
    pub demand: f64,
    pub utility: f64,
    pub product: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub task_id: String,
    pub tau: f64,
    pub value: f64,
    /// Languages in the universe with a published (non-default) utility.
    pub coverage: usize,
    /// One entry per universe language, ordered by code.
    pub contributions: Vec<Contribution>,
}

/// Demand-weighted utility over the full demand universe.
///
/// Every stored utility must belong to the universe, and the fixed
/// counterpart of a translation projection must not.
pub fn global_metric(utility: &LanguageUtilities, demand: &DemandVector) -> Result<MetricReport> {
    if let Some(stray) = utility.stored().keys().find(|l| !demand.contains(**l)) {
        return Err(Error::UniverseMismatch(*stray));
    }
    if let Some(c) = utility.counterpart().filter(|c| demand.contains(*c)) {
        return Err(Error::UniverseMismatch(c));
    }
    Ok(weighted_sum(utility, demand))
}

fn weighted_sum(utility: &LanguageUtilities, demand: &DemandVector) -> MetricReport {
    let contributions: Vec<Contribution> = demand
        .weights()
        .iter()
        .map(|(&iso3, &d)| {
            let u = utility.get(iso3);
            Contribution {
                iso3,
                demand: d,
                utility: u,
                product: d * u,
            }
        })
        .collect();
    let value = contributions.iter().map(|c| c.product).sum();
    let coverage = contributions.iter().filter(|c| utility.is_stored(c.iso3)).count();
    MetricReport {
        task_id: utility.task_id.clone(),
        tau: demand.tau,
        value,
        coverage,
        contributions,
    }
}

/// Records minus the projection's fixed counterpart.
pub fn universe_for<'a>(
    records: &[&'a LanguageRecord],
    utility: &LanguageUtilities,
) -> Vec<&'a LanguageRecord> {
    records
        .iter()
        .copied()
        .filter(|r| Some(r.iso3) != utility.counterpart())
        .collect()
}

/// `M_tau` at every grid point.
pub fn metric_curve(
    utility: &LanguageUtilities,
    records: &[&LanguageRecord],
    taus: &[f64],
    basis: PopulationBasis,
) -> Result<Vec<(f64, f64)>> {
    if taus.is_empty() {
        return Err(Error::InvalidArgument("empty tau grid".into()));
    }
    for &tau in taus {
        check_tau(tau)?;
    }
    let universe = universe_for(records, utility);
    taus.iter()
        .map(|&tau| {
            let demand = demand_vector(universe.iter().copied(), tau, basis)?;
            Ok((tau, global_metric(utility, &demand)?.value))
        })
        .collect()
}

/// `M_tau` over a subset of the universe with demand renormalized to it.
/// Utilities outside the subset are ignored.
pub fn restricted_metric(
    utility: &LanguageUtilities,
    demand: &DemandVector,
    subset: &[Iso3],
) -> Result<MetricReport> {
    let sub = demand.renormalized(subset)?;
    Ok(weighted_sum(utility, &sub))
}

/// Eleven evenly spaced points `0.0, 0.1, ..., 1.0`.
pub fn default_tau_grid() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i) / 10.0).collect()
}
