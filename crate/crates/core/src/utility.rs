//! Raw task scores to utilities in `[0, 1]`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{DefaultPolicy, Direction, Normalizer, Subject, TaskResultSet, TaskSpec};
use crate::lang::Iso3;

/// Constants a normalizer needs beyond the task definition. Fields left as
/// `None` fall back to the task spec where it has them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct NormContext {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
}

impl NormContext {
    pub fn with_max(max: f64) -> Self {
        NormContext {
            max: Some(max),
            ..Self::default()
        }
    }

    pub fn with_z(z: f64) -> Self {
        NormContext {
            z: Some(z),
            ..Self::default()
        }
    }

    pub fn with_range(x_min: f64, x_max: f64) -> Self {
        NormContext {
            x_min: Some(x_min),
            x_max: Some(x_max),
            ..Self::default()
        }
    }
}

fn degenerate(spec: &TaskSpec, detail: String) -> Error {
    Error::DegenerateRange {
        task: spec.task_id.clone(),
        detail,
    }
}

fn out_of_range(spec: &TaskSpec, raw: f64, reason: String) -> Error {
    Error::OutOfRangeScore {
        task: spec.task_id.clone(),
        score: raw,
        reason,
    }
}

/// Maps one raw score to a utility.
pub fn normalize_score(spec: &TaskSpec, raw: f64, ctx: &NormContext) -> Result<f64> {
    if !raw.is_finite() {
        return Err(out_of_range(spec, raw, "not finite".into()));
    }
    let by_max = |max: f64| -> Result<f64> {
        if max.is_nan() || max <= 0.0 {
            return Err(degenerate(spec, format!("maximum is {max}")));
        }
        if raw < 0.0 || raw > max {
            return Err(out_of_range(spec, raw, format!("outside [0, {max}]")));
        }
        Ok(raw / max)
    };
    match (spec.normalizer, spec.direction) {
        (Normalizer::Theoretical, Direction::HigherBetter) => {
            by_max(ctx.max.or(spec.theoretical_max).ok_or(Error::MissingContext("max"))?)
        }
        (Normalizer::Empirical, Direction::HigherBetter) => {
            by_max(ctx.max.ok_or(Error::MissingContext("empirical max"))?)
        }
        (Normalizer::FixedConstant(default_z), Direction::HigherBetter) => {
            let z = ctx.z.unwrap_or(default_z);
            if z.is_nan() || z <= 0.0 {
                return Err(degenerate(spec, format!("Z is {z}")));
            }
            if raw < 0.0 {
                return Err(out_of_range(spec, raw, "negative".into()));
            }
            let u = raw / z;
            if u > 1.0 {
                log::warn!("{}: score {raw} exceeds Z = {z}; clamping utility to 1", spec.task_id);
                Ok(1.0)
            } else {
                Ok(u)
            }
        }
        (Normalizer::RangeInvert, _) => {
            let (lo, hi) = match (ctx.x_min, ctx.x_max) {
                (Some(lo), Some(hi)) => (lo, hi),
                _ => return Err(Error::MissingContext("x_min/x_max")),
            };
            if hi.is_nan() || lo.is_nan() || hi <= lo {
                return Err(degenerate(spec, format!("x_min = {lo}, x_max = {hi}")));
            }
            if raw < lo || raw > hi {
                return Err(out_of_range(spec, raw, format!("outside [{lo}, {hi}]")));
            }
            let u = match spec.direction {
                Direction::LowerBetter => (hi - raw) / (hi - lo),
                Direction::HigherBetter => (raw - lo) / (hi - lo),
            };
            Ok(u)
        }
        (norm, Direction::LowerBetter) => Err(Error::InvalidArgument(format!(
            "{}: {norm:?} cannot normalize a lower-is-better metric",
            spec.task_id
        ))),
    }
}

/// Per-subject utilities for one task.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtilityTable {
    pub task_id: String,
    pub entries: BTreeMap<Subject, f64>,
    pub default_policy: DefaultPolicy,
    pub normalizer: Normalizer,
    pub context: NormContext,
}

impl UtilityTable {
    /// A table from precomputed utilities, e.g. pivot estimates.
    pub fn from_entries(
        task_id: &str,
        entries: BTreeMap<Subject, f64>,
        default_policy: DefaultPolicy,
        normalizer: Normalizer,
    ) -> Result<Self> {
        if let Some((s, u)) = entries.iter().find(|(_, u)| !(0.0..=1.0).contains(*u)) {
            return Err(Error::InvalidArgument(format!("utility {u} for {s} outside [0, 1]")));
        }
        Ok(UtilityTable {
            task_id: task_id.to_owned(),
            entries,
            default_policy,
            normalizer,
            context: NormContext::default(),
        })
    }

    /// Stored utility, or the default policy's value for unseen subjects.
    pub fn utility_or_default(&self, subject: &Subject) -> f64 {
        self.entries
            .get(subject)
            .copied()
            .unwrap_or_else(|| self.default_policy.value())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Reduces the table to one utility per language.
    pub fn project(&self, projection: Projection) -> Result<LanguageUtilities> {
        let mut stored = BTreeMap::new();
        for (subject, &u) in &self.entries {
            let lang = match (projection, *subject) {
                (Projection::Monolingual, Subject::Language(l)) => Some(l),
                (Projection::IntoTarget(t), Subject::Pair { source, target }) => {
                    (target == t).then_some(source)
                }
                (Projection::FromSource(s), Subject::Pair { source, target }) => {
                    (source == s).then_some(target)
                }
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "{projection:?} does not apply to subject {subject} of task {}",
                        self.task_id
                    )))
                }
            };
            if let Some(l) = lang {
                stored.insert(l, u);
            }
        }
        let counterpart = match projection {
            Projection::Monolingual => None,
            Projection::IntoTarget(l) | Projection::FromSource(l) => Some(l),
        };
        Ok(LanguageUtilities {
            task_id: self.task_id.clone(),
            stored,
            fallback: self.default_policy.value(),
            counterpart,
        })
    }
}

/// Normalizes every retained result of a task.
pub fn build_utility_table(results: &TaskResultSet) -> Result<UtilityTable> {
    let spec = &results.spec;
    if results.is_empty() {
        return Err(Error::InsufficientData(format!("no results for task {}", spec.task_id)));
    }
    let scores = || results.scores().map(|(_, x)| x);
    let context = match spec.normalizer {
        Normalizer::Theoretical => NormContext::with_max(
            spec.theoretical_max.ok_or(Error::MissingContext("theoretical max"))?,
        ),
        Normalizer::Empirical => NormContext::with_max(scores().fold(f64::MIN, f64::max)),
        Normalizer::FixedConstant(z) => NormContext::with_z(z),
        Normalizer::RangeInvert => {
            let lo = scores().fold(f64::MAX, f64::min);
            let hi = scores().fold(f64::MIN, f64::max);
            if lo == hi {
                return Err(degenerate(
                    spec,
                    format!("all {} observed scores equal {lo}", results.len()),
                ));
            }
            NormContext::with_range(lo, hi)
        }
    };
    let mut entries = BTreeMap::new();
    for (subject, raw) in results.scores() {
        entries.insert(subject, normalize_score(spec, raw, &context)?);
    }
    Ok(UtilityTable {
        task_id: spec.task_id.clone(),
        entries,
        default_policy: spec.unseen,
        normalizer: spec.normalizer,
        context,
    })
}

/// How pair-valued utilities collapse onto single languages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    Monolingual,
    /// Translation from every language into the given one (X → t).
    IntoTarget(Iso3),
    /// Translation from the given language into every other (s → X).
    FromSource(Iso3),
}

/// One utility per language, with a fallback for languages without results.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageUtilities {
    pub task_id: String,
    stored: BTreeMap<Iso3, f64>,
    fallback: f64,
    counterpart: Option<Iso3>,
}

impl LanguageUtilities {
    pub fn new(task_id: &str, stored: BTreeMap<Iso3, f64>, fallback: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fallback) {
            return Err(Error::InvalidArgument(format!("fallback utility {fallback} outside [0, 1]")));
        }
        if let Some((l, u)) = stored.iter().find(|(_, u)| !(0.0..=1.0).contains(*u)) {
            return Err(Error::InvalidArgument(format!("utility {u} for {l} outside [0, 1]")));
        }
        Ok(LanguageUtilities {
            task_id: task_id.to_owned(),
            stored,
            fallback,
            counterpart: None,
        })
    }

    pub fn get(&self, lang: Iso3) -> f64 {
        self.stored.get(&lang).copied().unwrap_or(self.fallback)
    }

    pub fn is_stored(&self, lang: Iso3) -> bool {
        self.stored.contains_key(&lang)
    }

    pub fn stored(&self) -> &BTreeMap<Iso3, f64> {
        &self.stored
    }

    pub fn fallback(&self) -> f64 {
        self.fallback
    }

    /// The fixed other side of a translation projection, which must be left
    /// out of the demand universe.
    pub fn counterpart(&self) -> Option<Iso3> {
        self.counterpart
    }

    /// Drops stored utilities outside `universe`, returning the dropped codes.
    /// Macro-language members carry results that a top-level universe does
    /// not weigh.
    pub fn retain_within(&mut self, universe: &BTreeSet<Iso3>) -> Vec<Iso3> {
        let dropped: Vec<Iso3> =
            self.stored.keys().filter(|l| !universe.contains(l)).copied().collect();
        for l in &dropped {
            self.stored.remove(l);
        }
        dropped
    }

    /// Copy with one language's utility replaced.
    pub fn with_utility(&self, lang: Iso3, utility: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&utility) {
            return Err(Error::InvalidArgument(format!("utility {utility} outside [0, 1]")));
        }
        let mut next = self.clone();
        next.stored.insert(lang, utility);
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{MetricKind, RawResult};

    fn code(s: &str) -> Iso3 {
        Iso3::parse(s).unwrap()
    }

    fn lang(s: &str) -> Subject {
        Subject::Language(code(s))
    }

    fn results(task: &str, rows: &[(&str, f64)]) -> TaskResultSet {
        let spec = TaskSpec::builtin(task).unwrap();
        let rows = rows.iter().map(|&(l, score)| RawResult {
            task_id: task.into(),
            subject: lang(l),
            score,
            source_tag: String::new(),
        });
        TaskResultSet::from_results(spec, rows).unwrap()
    }

    #[test]
    fn normalization_examples() {
        let inflection = TaskSpec::builtin("inflection").unwrap();
        assert_eq!(normalize_score(&inflection, 64.0, &NormContext::default()).unwrap(), 0.64);

        let mt = TaskSpec::builtin("mt").unwrap();
        assert_eq!(normalize_score(&mt, 70.0, &NormContext::default()).unwrap(), 1.0);
        assert_eq!(normalize_score(&mt, 35.0, &NormContext::default()).unwrap(), 0.5);
        assert_eq!(normalize_score(&mt, 84.0, &NormContext::default()).unwrap(), 1.0);

        let tts = TaskSpec::builtin("tts").unwrap();
        let ctx = NormContext::with_range(4.0, 8.0);
        assert_eq!(normalize_score(&tts, 8.0, &ctx).unwrap(), 0.0);
        assert_eq!(normalize_score(&tts, 4.0, &ctx).unwrap(), 1.0);
        assert_eq!(normalize_score(&tts, 6.0, &ctx).unwrap(), 0.5);
    }

    #[test]
    fn normalization_errors() {
        let tts = TaskSpec::builtin("tts").unwrap();
        assert!(matches!(
            normalize_score(&tts, 5.0, &NormContext::default()),
            Err(Error::MissingContext(_))
        ));
        assert!(matches!(
            normalize_score(&tts, 5.0, &NormContext::with_range(5.0, 5.0)),
            Err(Error::DegenerateRange { .. })
        ));
        let dep = TaskSpec::builtin("dep").unwrap();
        assert!(matches!(
            normalize_score(&dep, 5.0, &NormContext::default()),
            Err(Error::MissingContext(_))
        ));
    }

    #[test]
    fn las_table_tops_out_at_one() {
        let table =
            build_utility_table(&results("dep", &[("eng", 90.0), ("deu", 85.5), ("tgl", 45.0)]))
                .unwrap();
        assert_eq!(table.len(), 3);
        assert_eq!(table.entries[&lang("eng")], 1.0);
        assert_eq!(table.entries[&lang("tgl")], 0.5);
        assert_eq!(table.context.max, Some(90.0));
    }

    #[test]
    fn mcd_table_two_languages() {
        let table = build_utility_table(&results("tts", &[("eng", 4.0), ("tgl", 8.0)])).unwrap();
        assert_eq!(table.entries[&lang("eng")], 1.0);
        assert_eq!(table.entries[&lang("tgl")], 0.0);
    }

    #[test]
    fn single_language_mcd_rejected() {
        assert!(matches!(
            build_utility_table(&results("tts", &[("eng", 4.0)])),
            Err(Error::DegenerateRange { .. })
        ));
        assert!(matches!(
            build_utility_table(&results("tts", &[])),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn unseen_language_defaults() {
        let qa = build_utility_table(&results("qa", &[("eng", 80.0)])).unwrap();
        assert_eq!(qa.utility_or_default(&lang("tgl")), 0.0);
        assert_eq!(qa.utility_or_default(&lang("eng")), 0.8);
        let nli = build_utility_table(&results("nli", &[("eng", 90.0)])).unwrap();
        assert_eq!(nli.utility_or_default(&lang("tgl")), 1.0 / 3.0);
        assert!((nli.utility_or_default(&lang("tgl")) - 0.3333).abs() < 1e-4);
        assert_eq!(nli.utility_or_default(&lang("eng")), 0.9);
    }

    #[test]
    fn projections() {
        let spec = TaskSpec::builtin("mt").unwrap();
        let rows = [("deu", "eng", 35.0), ("eng", "deu", 28.0), ("fra", "eng", 42.0)].map(
            |(s, t, score)| RawResult {
                task_id: "mt".into(),
                subject: Subject::pair(code(s), code(t)),
                score,
                source_tag: String::new(),
            },
        );
        let table = build_utility_table(&TaskResultSet::from_results(spec, rows).unwrap()).unwrap();
        let into_eng = table.project(Projection::IntoTarget(code("eng"))).unwrap();
        assert_eq!(into_eng.get(code("deu")), 0.5);
        assert_eq!(into_eng.get(code("fra")), 0.6);
        assert_eq!(into_eng.get(code("spa")), 0.0);
        assert_eq!(into_eng.counterpart(), Some(code("eng")));
        let from_eng = table.project(Projection::FromSource(code("eng"))).unwrap();
        assert_eq!(from_eng.stored().len(), 1);
        assert_eq!(from_eng.get(code("deu")), 0.4);
        assert!(table.project(Projection::Monolingual).is_err());
    }

    #[test]
    fn lower_better_needs_range_invert() {
        let spec = TaskSpec {
            task_id: "odd".into(),
            metric: MetricKind::Accuracy,
            direction: Direction::LowerBetter,
            theoretical_max: Some(100.0),
            normalizer: Normalizer::Theoretical,
            unseen: DefaultPolicy::Zero,
        };
        assert!(normalize_score(&spec, 1.0, &NormContext::default()).is_err());
    }
}
