//! Demand weights over languages and over translation directions.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{check_tau, Error, Result};
use crate::ingest::{Flow, TradeShare};
use crate::lang::{Iso3, LanguageRecord, PopulationBasis};

/// Demand weights `n_l^tau / sum n^tau` over a language universe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemandVector {
    pub tau: f64,
    weights: BTreeMap<Iso3, f64>,
}

impl DemandVector {
    pub fn weight(&self, lang: Iso3) -> Option<f64> {
        self.weights.get(&lang).copied()
    }

    pub fn weights(&self) -> &BTreeMap<Iso3, f64> {
        &self.weights
    }

    pub fn universe(&self) -> BTreeSet<Iso3> {
        self.weights.keys().copied().collect()
    }

    pub fn contains(&self, lang: Iso3) -> bool {
        self.weights.contains_key(&lang)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Restricts the vector to `subset` and rescales it to sum to one. Equal to
    /// recomputing demand over the subset at the same tau.
    pub fn renormalized(&self, subset: &[Iso3]) -> Result<DemandVector> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut picked = BTreeMap::new();
        for &l in subset {
            let w = self.weight(l).ok_or(Error::UniverseMismatch(l))?;
            if picked.insert(l, w).is_some() {
                return Err(Error::DuplicateLanguage(l));
            }
        }
        let total: f64 = picked.values().sum();
        if total <= 0.0 {
            return Err(Error::AllZeroPopulations(self.tau));
        }
        for w in picked.values_mut() {
            *w /= total;
        }
        Ok(DemandVector {
            tau: self.tau,
            weights: picked,
        })
    }
}

/// Demand over `records` at exponent `tau`; `0^0` counts as 1 so tau = 0 is
/// uniform over every language, speakers or not.
pub fn demand_vector<'a, I>(records: I, tau: f64, basis: PopulationBasis) -> Result<DemandVector>
where
    I: IntoIterator<Item = &'a LanguageRecord>,
{
    check_tau(tau)?;
    let mut pops: BTreeMap<Iso3, f64> = BTreeMap::new();
    for rec in records {
        if pops.insert(rec.iso3, rec.effective_population(basis)).is_some() {
            return Err(Error::DuplicateLanguage(rec.iso3));
        }
    }
    if pops.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    let weights = if tau == 0.0 {
        let w = 1.0 / pops.len() as f64;
        pops.keys().map(|&l| (l, w)).collect()
    } else {
        let largest = pops.values().copied().fold(0.0, f64::max);
        if largest <= 0.0 {
            return Err(Error::AllZeroPopulations(tau));
        }
        // Scaling by the largest population keeps powers in [0, 1].
        let raw: BTreeMap<Iso3, f64> =
            pops.iter().map(|(&l, &n)| (l, (n / largest).powf(tau))).collect();
        let total: f64 = raw.values().sum();
        raw.into_iter().map(|(l, w)| (l, w / total)).collect()
    };
    Ok(DemandVector { tau, weights })
}

/// Translation demand between language pairs derived from trade shares.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDemand {
    pub basis: Flow,
    pub weights: BTreeMap<(Iso3, Iso3), f64>,
}

impl PairDemand {
    /// Pairs by descending weight; ties ordered by (source, target).
    pub fn ranked(&self) -> Vec<((Iso3, Iso3), f64)> {
        let mut pairs: Vec<_> = self.weights.iter().map(|(&p, &w)| (p, w)).collect();
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        pairs
    }
}

/// Weights `s -> t` translation demand by partner trade share, renormalized
/// over the partners covered for each reporting community.
///
/// With import basis the reporter is the target `t` and partners are
/// sources; with export basis the reporter is the source.
pub fn econ_pair_demand(trade: &[TradeShare], basis: Flow) -> Result<PairDemand> {
    let mut per_reporter: BTreeMap<Iso3, BTreeMap<Iso3, f64>> = BTreeMap::new();
    for t in trade.iter().filter(|t| t.flow == basis) {
        *per_reporter.entry(t.reporter).or_default().entry(t.partner).or_default() += t.share;
    }
    if per_reporter.is_empty() {
        return Err(Error::NoRowsForFlow(basis.to_string()));
    }
    let mut weights = BTreeMap::new();
    for (reporter, partners) in per_reporter {
        let total: f64 = partners.values().sum();
        if total <= 0.0 {
            continue;
        }
        for (partner, share) in partners {
            let pair = match basis {
                Flow::Import => (partner, reporter),
                Flow::Export => (reporter, partner),
            };
            weights.insert(pair, share / total);
        }
    }
    Ok(PairDemand { basis, weights })
}
