//! Which languages would raise `M_tau` the most if fully served.

use crate::demand::demand_vector;
use crate::error::{Error, Result};
use crate::lang::{Iso3, LanguageRecord, PopulationBasis};
use crate::metric::{global_metric, universe_for};
use crate::utility::LanguageUtilities;

#[derive(Debug, Clone, PartialEq)]
pub struct PriorityRanking {
    pub task_id: String,
    pub tau: f64,
    /// `(language, d_l * (1 - u_l))`, largest gain first.
    pub ranked: Vec<(Iso3, f64)>,
    /// `M_tau` before any improvement.
    pub basis_metric: f64,
}

/// Top-`k` languages by marginal gain `d_l * (1 - u_l)`; ties go to the
/// smaller code.
pub fn priority_ranking(
    utility: &LanguageUtilities,
    records: &[&LanguageRecord],
    tau: f64,
    k: usize,
    basis: PopulationBasis,
) -> Result<PriorityRanking> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let universe = universe_for(records, utility);
    let demand = demand_vector(universe.iter().copied(), tau, basis)?;
    let report = global_metric(utility, &demand)?;
    let mut ranked: Vec<(Iso3, f64)> = report
        .contributions
        .iter()
        .map(|c| (c.iso3, c.demand * (1.0 - c.utility)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(k);
    Ok(PriorityRanking {
        task_id: utility.task_id.clone(),
        tau,
        ranked,
        basis_metric: report.value,
    })
}

/// `M_tau` as the most populous languages are set to utility 1 one by one.
///
/// Element 0 is the current metric, element `i` the metric once the `i` most
/// populous languages are fully served, and the last element is exactly 1.
/// Each element is `1 - (unmet demand of the languages not yet forced)`, with
/// the unmet demand accumulated from the back, so the curve is monotone in
/// floating point as well.
pub fn greedy_population_curve(
    utility: &LanguageUtilities,
    records: &[&LanguageRecord],
    tau: f64,
    basis: PopulationBasis,
) -> Result<Vec<f64>> {
    let mut universe = universe_for(records, utility);
    let demand = demand_vector(universe.iter().copied(), tau, basis)?;
    // Validates that every stored utility is inside the universe.
    global_metric(utility, &demand)?;
    universe.sort_by(|a, b| {
        b.effective_population(basis)
            .total_cmp(&a.effective_population(basis))
            .then(a.iso3.cmp(&b.iso3))
    });
    let gaps: Vec<f64> = universe
        .iter()
        .map(|r| demand.weight(r.iso3).expect("in universe") * (1.0 - utility.get(r.iso3)))
        .collect();
    let mut unmet = vec![0.0; gaps.len() + 1];
    for i in (0..gaps.len()).rev() {
        unmet[i] = unmet[i + 1] + gaps[i];
    }
    Ok(unmet.into_iter().map(|r| 1.0 - r).collect())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;

    fn code(s: &str) -> Iso3 {
        Iso3::parse(s).unwrap()
    }

    fn recs(pops: &[(&str, u64)]) -> Vec<LanguageRecord> {
        pops.iter().map(|&(c, n)| LanguageRecord::new(code(c), c, n)).collect()
    }

    fn utils(pairs: &[(&str, f64)]) -> LanguageUtilities {
        let map: BTreeMap<Iso3, f64> = pairs.iter().map(|&(c, u)| (code(c), u)).collect();
        LanguageUtilities::new("t", map, 0.0).unwrap()
    }

    #[test]
    fn gains_example() {
        let r = recs(&[("aaa", 900), ("bbb", 100)]);
        let refs: Vec<_> = r.iter().collect();
        let u = utils(&[("aaa", 0.5)]);
        let rank = priority_ranking(&u, &refs, 1.0, 2, PopulationBasis::Total).unwrap();
        assert_eq!(rank.ranked[0].0, code("aaa"));
        assert!((rank.ranked[0].1 - 0.45).abs() < 1e-12);
        assert!((rank.ranked[1].1 - 0.1).abs() < 1e-12);
    }

    #[test]
    fn served_language_ranks_last() {
        let r = recs(&[("aaa", 1_000_000), ("bbb", 10), ("ccc", 10)]);
        let refs: Vec<_> = r.iter().collect();
        let u = utils(&[("aaa", 1.0)]);
        let rank = priority_ranking(&u, &refs, 1.0, 3, PopulationBasis::Total).unwrap();
        assert_eq!(rank.ranked.last().unwrap(), &(code("aaa"), 0.0));
        // equal gains: code order
        assert_eq!(rank.ranked[0].0, code("bbb"));
    }

    #[test]
    fn all_gains_sum_to_unmet_demand() {
        let r = recs(&[("aaa", 5), ("bbb", 17), ("ccc", 3), ("ddd", 40)]);
        let refs: Vec<_> = r.iter().collect();
        let u = utils(&[("aaa", 0.2), ("ddd", 0.9), ("ccc", 1.0)]);
        let rank = priority_ranking(&u, &refs, 0.7, 100, PopulationBasis::Total).unwrap();
        assert_eq!(rank.ranked.len(), 4);
        let total: f64 = rank.ranked.iter().map(|g| g.1).sum();
        assert!((total - (1.0 - rank.basis_metric)).abs() < 1e-12);
    }

    #[test]
    fn k_zero_rejected() {
        let r = recs(&[("aaa", 1)]);
        let refs: Vec<_> = r.iter().collect();
        assert!(priority_ranking(&utils(&[]), &refs, 1.0, 0, PopulationBasis::Total).is_err());
        assert!(matches!(
            priority_ranking(&utils(&[]), &[], 1.0, 1, PopulationBasis::Total),
            Err(Error::EmptyUniverse)
        ));
    }

    #[test]
    fn greedy_curve_examples() {
        let r = recs(&[("aaa", 300), ("bbb", 100)]);
        let refs: Vec<_> = r.iter().collect();
        let curve = greedy_population_curve(&utils(&[]), &refs, 1.0, PopulationBasis::Total).unwrap();
        assert_eq!(curve, [0.0, 0.75, 1.0]);

        let served = utils(&[("aaa", 1.0), ("bbb", 1.0)]);
        let flat = greedy_population_curve(&served, &refs, 1.0, PopulationBasis::Total).unwrap();
        assert_eq!(flat, [1.0, 1.0, 1.0]);
    }
}
