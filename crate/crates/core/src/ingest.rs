//! Typed loading of task results and trade shares.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lang::{Iso3, Registry};
use crate::tsv::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Accuracy,
    Fscore,
    Bleu,
    Las,
    Mcd,
}

impl MetricKind {
    /// Scores on a 0-100 percent scale.
    fn is_percent(self) -> bool {
        matches!(self, MetricKind::Accuracy | MetricKind::Fscore | MetricKind::Las)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    HigherBetter,
    LowerBetter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalizer {
    /// Divide by the task's theoretical maximum.
    Theoretical,
    /// Divide by the best observed score.
    Empirical,
    /// Divide by a fixed constant `Z`, clamping at 1.
    FixedConstant(f64),
    /// `(x_max - x) / (x_max - x_min)` over the observed scores.
    RangeInvert,
}

/// Utility assumed for subjects without a published result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DefaultPolicy {
    Zero,
    /// Expected accuracy of a uniform random guess among `k` classes.
    RandomBaseline(u32),
}

impl DefaultPolicy {
    pub fn value(self) -> f64 {
        match self {
            DefaultPolicy::Zero => 0.0,
            DefaultPolicy::RandomBaseline(k) => 1.0 / f64::from(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskSpec {
    pub task_id: String,
    pub metric: MetricKind,
    pub direction: Direction,
    pub theoretical_max: Option<f64>,
    pub normalizer: Normalizer,
    pub unseen: DefaultPolicy,
}

/// Z for normalized BLEU: the highest score in the collected literature
/// (Serbian-Croatian).
pub const BLEU_Z: f64 = 70.0;

pub const BUILTIN_TASKS: [&str; 6] = ["dep", "inflection", "mt", "tts", "nli", "qa"];

impl TaskSpec {
    pub fn new(
        task_id: &str,
        metric: MetricKind,
        direction: Direction,
        theoretical_max: Option<f64>,
        normalizer: Normalizer,
        unseen: DefaultPolicy,
    ) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("task {task_id}: {msg}")));
        if metric == MetricKind::Mcd
            && (direction != Direction::LowerBetter || normalizer != Normalizer::RangeInvert)
        {
            return bad("mcd must be lower_better with range_invert");
        }
        if metric == MetricKind::Bleu {
            match normalizer {
                Normalizer::FixedConstant(z) if z > 0.0 && z.is_finite() => {}
                _ => return bad("bleu needs a fixed constant Z > 0"),
            }
        }
        if let Normalizer::FixedConstant(z) = normalizer {
            if !(z > 0.0 && z.is_finite()) {
                return bad("fixed constant must be positive");
            }
        }
        if direction == Direction::LowerBetter && normalizer != Normalizer::RangeInvert {
            return bad("lower_better metrics are normalized with range_invert");
        }
        if normalizer == Normalizer::Theoretical && theoretical_max.is_none() {
            return bad("theoretical normalizer without a theoretical maximum");
        }
        if let DefaultPolicy::RandomBaseline(0) = unseen {
            return bad("random baseline needs at least one class");
        }
        Ok(TaskSpec {
            task_id: task_id.to_owned(),
            metric,
            direction,
            theoretical_max,
            normalizer,
            unseen,
        })
    }

    /// The six tasks with their standard metric and normalization.
    pub fn builtin(task_id: &str) -> Result<Self> {
        use Direction::*;
        use MetricKind::*;
        let (metric, direction, max, norm, unseen) = match task_id {
            "dep" => (Las, HigherBetter, Some(100.0), Normalizer::Empirical, DefaultPolicy::Zero),
            "inflection" => (
                Accuracy,
                HigherBetter,
                Some(100.0),
                Normalizer::Theoretical,
                DefaultPolicy::Zero,
            ),
            "nli" => (
                Accuracy,
                HigherBetter,
                Some(100.0),
                Normalizer::Theoretical,
                DefaultPolicy::RandomBaseline(3),
            ),
            "qa" => (Fscore, HigherBetter, Some(100.0), Normalizer::Theoretical, DefaultPolicy::Zero),
            "tts" => (Mcd, LowerBetter, None, Normalizer::RangeInvert, DefaultPolicy::Zero),
            "mt" => (
                Bleu,
                HigherBetter,
                None,
                Normalizer::FixedConstant(BLEU_Z),
                DefaultPolicy::Zero,
            ),
            other => return Err(Error::UnknownTask(other.to_owned())),
        };
        TaskSpec::new(task_id, metric, direction, max, norm, unseen)
    }

    /// Translation tasks are scored on ordered language pairs.
    pub fn is_pairwise(&self) -> bool {
        self.metric == MetricKind::Bleu
    }

    /// True if `a` is a strictly better score than `b`.
    pub fn better(&self, a: f64, b: f64) -> bool {
        match self.direction {
            Direction::HigherBetter => a > b,
            Direction::LowerBetter => a < b,
        }
    }

    fn check_range(&self, score: f64) -> Result<()> {
        let reason = if !score.is_finite() {
            Some("not finite")
        } else if score < 0.0 {
            Some("negative")
        } else if (self.metric.is_percent() || self.metric == MetricKind::Bleu) && score > 100.0 {
            Some("above 100")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(Error::OutOfRangeScore {
                task: self.task_id.clone(),
                score,
                reason: reason.to_owned(),
            }),
            None => Ok(()),
        }
    }
}

/// What a score was measured on: one language, or a translation direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subject {
    Language(Iso3),
    Pair { source: Iso3, target: Iso3 },
}

impl Subject {
    pub fn pair(source: Iso3, target: Iso3) -> Self {
        Subject::Pair { source, target }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Language(l) => write!(f, "{l}"),
            Subject::Pair { source, target } => write!(f, "{source}-{target}"),
        }
    }
}

impl Serialize for Subject {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawResult {
    pub task_id: String,
    pub subject: Subject,
    pub score: f64,
    pub source_tag: String,
}

/// Best retained score per subject for one task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskResultSet {
    pub spec: TaskSpec,
    pub results: BTreeMap<Subject, RawResult>,
}

impl TaskResultSet {
    /// Keeps the best score per subject: maximum for higher-is-better
    /// metrics, minimum for lower-is-better. Equal scores keep the
    /// lexicographically smallest source tag so row order never matters.
    pub fn from_results<I>(spec: TaskSpec, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = RawResult>,
    {
        let mut results: BTreeMap<Subject, RawResult> = BTreeMap::new();
        for row in rows {
            spec.check_range(row.score)?;
            match (spec.is_pairwise(), row.subject) {
                (true, Subject::Language(_)) | (false, Subject::Pair { .. }) => {
                    return Err(Error::InvalidArgument(format!(
                        "subject {} does not fit task {}",
                        row.subject, spec.task_id
                    )))
                }
                (true, Subject::Pair { source, target }) if source == target => {
                    return Err(Error::SelfPair(source))
                }
                _ => {}
            }
            match results.get(&row.subject) {
                Some(kept)
                    if !(spec.better(row.score, kept.score)
                        || (row.score == kept.score && row.source_tag < kept.source_tag)) => {}
                _ => {
                    results.insert(row.subject, row);
                }
            }
        }
        Ok(TaskResultSet { spec, results })
    }

    pub fn task_id(&self) -> &str {
        &self.spec.task_id
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }

    pub fn scores(&self) -> impl Iterator<Item = (Subject, f64)> + '_ {
        self.results.iter().map(|(s, r)| (*s, r.score))
    }

    /// Renders the retained rows in the `results.tsv` schema.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("task_id\tsource_iso3\ttarget_iso3\tscore\tsource_tag\n");
        for r in self.results.values() {
            let (src, tgt) = match r.subject {
                Subject::Language(l) => (l.to_string(), String::new()),
                Subject::Pair { source, target } => (source.to_string(), target.to_string()),
            };
            // `{}` on f64 prints the shortest string that round-trips.
            let _ = writeln!(out, "{}\t{src}\t{tgt}\t{}\t{}", r.task_id, r.score, r.source_tag);
        }
        out
    }
}

/// Loads `results.tsv` rows for `spec.task_id`; rows for other tasks are
/// skipped. Every code must be known to `registry`.
pub fn load_results(path: &Path, spec: &TaskSpec, registry: &Registry) -> Result<TaskResultSet> {
    parse_results(Table::open(path)?, spec, registry)
}

pub fn load_results_from_reader<R: Read>(
    name: &str,
    reader: R,
    spec: &TaskSpec,
    registry: &Registry,
) -> Result<TaskResultSet> {
    parse_results(Table::from_reader(name, reader)?, spec, registry)
}

fn parse_results(table: Table, spec: &TaskSpec, registry: &Registry) -> Result<TaskResultSet> {
    let c_task = table.require("task_id")?;
    let c_src = table.require("source_iso3")?;
    let c_tgt = table.require("target_iso3")?;
    let c_score = table.require("score")?;
    let c_tag = table.column("source_tag");

    let known = |row, cell: &str| -> Result<Iso3> {
        let rec = registry.lookup_code(cell).map_err(|_| {
            Error::UnknownLanguage(format!("{cell} ({}:{})", table.file, row))
        })?;
        Ok(rec.iso3)
    };

    let mut rows = Vec::new();
    for row in &table.rows {
        if row.get(c_task) != spec.task_id {
            continue;
        }
        let source = known(row.line, row.get(c_src))?;
        let target = match row.get(c_tgt) {
            "" => None,
            cell => Some(known(row.line, cell)?),
        };
        let subject = match (spec.is_pairwise(), target) {
            (false, None) => Subject::Language(source),
            (true, Some(target)) if target != source => Subject::pair(source, target),
            (true, Some(_)) => return Err(table.err(row, "source and target are identical")),
            (true, None) => return Err(table.err(row, "translation row without a target")),
            (false, Some(_)) => {
                return Err(table.err(row, format!("task {} takes no target", spec.task_id)))
            }
        };
        let score = table.number(row, c_score, "score")?;
        spec.check_range(score).map_err(|e| match e {
            Error::OutOfRangeScore { task, score, reason } => Error::OutOfRangeScore {
                task,
                score,
                reason: format!("{reason} ({}:{})", table.file, row.line),
            },
            other => other,
        })?;
        rows.push(RawResult {
            task_id: spec.task_id.clone(),
            subject,
            score,
            source_tag: row.opt(c_tag).to_owned(),
        });
    }
    TaskResultSet::from_results(spec.clone(), rows)
}

/// Task ids that appear in a results file, in first-seen order.
pub fn task_ids_in(path: &Path) -> Result<Vec<String>> {
    let table = Table::open(path)?;
    let c_task = table.require("task_id")?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for row in &table.rows {
        let id = row.get(c_task);
        if seen.insert(id.to_owned()) {
            out.push(id.to_owned());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flow {
    Import,
    Export,
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flow::Import => "import",
            Flow::Export => "export",
        })
    }
}

impl FromStr for Flow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "import" => Ok(Flow::Import),
            "export" => Ok(Flow::Export),
            other => Err(Error::InvalidArgument(format!("unknown flow {other:?}"))),
        }
    }
}

/// One partner's share of a language community's imports (or exports).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeShare {
    /// The reporting community (`importer_iso3` column); the exporter when
    /// `flow` is export.
    pub reporter: Iso3,
    pub partner: Iso3,
    pub share: f64,
    pub flow: Flow,
}

const SHARE_SLACK: f64 = 1e-9;

pub fn load_trade(path: &Path) -> Result<Vec<TradeShare>> {
    parse_trade(Table::open(path)?)
}

pub fn load_trade_from_reader<R: Read>(name: &str, reader: R) -> Result<Vec<TradeShare>> {
    parse_trade(Table::from_reader(name, reader)?)
}

fn parse_trade(table: Table) -> Result<Vec<TradeShare>> {
    let c_rep = table.require("importer_iso3")?;
    let c_part = table.require("partner_iso3")?;
    let c_share = table.require("share")?;
    let c_flow = table.require("flow")?;
    let mut out = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let code = |idx| Iso3::parse(row.get(idx)).map_err(|e| table.err(row, e.to_string()));
        let share = table.number(row, c_share, "share")?;
        if !(0.0..=1.0).contains(&share) {
            return Err(table.err(row, format!("share {share} outside [0, 1]")));
        }
        out.push(TradeShare {
            reporter: code(c_rep)?,
            partner: code(c_part)?,
            share,
            flow: row.get(c_flow).parse().map_err(|e: Error| table.err(row, e.to_string()))?,
        });
    }
    check_share_sums(&out)?;
    Ok(out)
}

fn check_share_sums(shares: &[TradeShare]) -> Result<()> {
    let mut sums: BTreeMap<(Flow, Iso3), f64> = BTreeMap::new();
    for s in shares {
        *sums.entry((s.flow, s.reporter)).or_default() += s.share;
    }
    for ((flow, reporter), sum) in sums {
        if sum > 1.0 + SHARE_SLACK {
            return Err(Error::ShareSumExceedsOne {
                reporter,
                flow: flow.to_string(),
                sum,
            });
        }
    }
    Ok(())
}

/// Trade share between two countries, before mapping to languages.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryTradeShare {
    pub reporter_country: String,
    pub partner_country: String,
    pub share: f64,
    pub flow: Flow,
}

/// Country → languages, each with the fraction of the country it stands for.
#[derive(Debug, Clone, Default)]
pub struct CountryLanguageMap {
    map: BTreeMap<String, Vec<(Iso3, f64)>>,
}

impl CountryLanguageMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, country: &str, language: Iso3) -> &mut Self {
        self.insert_weighted(country, language, 1.0)
    }

    pub fn insert_weighted(&mut self, country: &str, language: Iso3, weight: f64) -> &mut Self {
        self.map
            .entry(country.to_ascii_uppercase())
            .or_default()
            .push((language, weight));
        self
    }

    fn get(&self, country: &str) -> Result<&[(Iso3, f64)]> {
        self.map
            .get(&country.to_ascii_uppercase())
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnmappedCountry(country.to_owned()))
    }
}

/// Maps country-level trade shares onto languages.
///
/// Partner countries that map to the same language have their shares summed.
/// Reporter countries that map to the same language are averaged (weighted by
/// the mapping fractions), which keeps each reporter's shares summing to at
/// most one. Shares between a language and itself carry no translation demand
/// and are dropped.
pub fn merge_country_weights(
    country_shares: &[CountryTradeShare],
    mapping: &CountryLanguageMap,
) -> Result<Vec<TradeShare>> {
    // (flow, reporter language) -> reporter country -> weight
    let mut reporter_weights: BTreeMap<(Flow, Iso3), BTreeMap<String, f64>> = BTreeMap::new();
    let mut sums: BTreeMap<(Flow, Iso3, Iso3), f64> = BTreeMap::new();
    for cs in country_shares {
        let reporters = mapping.get(&cs.reporter_country)?;
        let partners = mapping.get(&cs.partner_country)?;
        for &(rep_lang, rep_w) in reporters {
            reporter_weights
                .entry((cs.flow, rep_lang))
                .or_default()
                .insert(cs.reporter_country.to_ascii_uppercase(), rep_w);
            for &(part_lang, part_w) in partners {
                if part_lang == rep_lang {
                    continue;
                }
                *sums.entry((cs.flow, rep_lang, part_lang)).or_default() +=
                    rep_w * part_w * cs.share;
            }
        }
    }
    let out: Vec<TradeShare> = sums
        .into_iter()
        .map(|((flow, reporter, partner), sum)| {
            let total_w: f64 = reporter_weights[&(flow, reporter)].values().sum();
            TradeShare {
                reporter,
                partner,
                share: sum / total_w,
                flow,
            }
        })
        .collect();
    check_share_sums(&out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::LanguageRecord;

    fn code(s: &str) -> Iso3 {
        Iso3::parse(s).unwrap()
    }

    fn registry() -> Registry {
        let recs = ["eng", "deu", "fra", "spa", "tgl", "srp", "hrv"]
            .iter()
            .map(|c| LanguageRecord::new(code(c), c, 1))
            .collect();
        Registry::from_records(recs).unwrap()
    }

    fn load(text: &str, task: &str) -> Result<TaskResultSet> {
        let spec = TaskSpec::builtin(task).unwrap();
        load_results_from_reader("results.tsv", text.as_bytes(), &spec, &registry())
    }

    const HEADER: &str = "task_id\tsource_iso3\ttarget_iso3\tscore\tsource_tag\n";

    #[test]
    fn keeps_highest_accuracy() {
        let text = format!("{HEADER}nli\teng\t\t88.0\ta\nnli\teng\t\t91.0\tb\nnli\tdeu\t\t80\tc\n");
        let set = load(&text, "nli").unwrap();
        let eng = &set.results[&Subject::Language(code("eng"))];
        assert_eq!(eng.score, 91.0);
        assert_eq!(eng.source_tag, "b");
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn keeps_lowest_mcd() {
        let text = format!("{HEADER}tts\tspa\t\t6.1\tx\ntts\tspa\t\t5.8\ty\n");
        let set = load(&text, "tts").unwrap();
        assert_eq!(set.results[&Subject::Language(code("spa"))].score, 5.8);
    }

    #[test]
    fn single_row_retained() {
        let set = load(&format!("{HEADER}qa\ttgl\t\t55.5\tsolo\n"), "qa").unwrap();
        assert_eq!(set.results[&Subject::Language(code("tgl"))].score, 55.5);
    }

    #[test]
    fn other_tasks_are_skipped() {
        let text = format!("{HEADER}qa\ttgl\t\t55.5\t\nmt\teng\tdeu\t30\t\n");
        assert_eq!(load(&text, "qa").unwrap().len(), 1);
        let mt = load(&text, "mt").unwrap();
        assert!(mt.results.contains_key(&Subject::pair(code("eng"), code("deu"))));
    }

    #[test]
    fn ties_keep_smallest_tag_regardless_of_order() {
        let a = format!("{HEADER}qa\teng\t\t70\tzeta\nqa\teng\t\t70\talpha\n");
        let b = format!("{HEADER}qa\teng\t\t70\talpha\nqa\teng\t\t70\tzeta\n");
        assert_eq!(load(&a, "qa").unwrap(), load(&b, "qa").unwrap());
    }

    #[test]
    fn rewrite_is_idempotent() {
        let text = format!(
            "{HEADER}mt\teng\tdeu\t30.25\tw1\nmt\teng\tdeu\t31\tw2\nmt\tsrp\thrv\t70\tarcan\n"
        );
        let once = load(&text, "mt").unwrap();
        let twice = load(&once.to_tsv(), "mt").unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn errors_carry_locations() {
        match load(&format!("{HEADER}qa\teng\t\tabc\t\n"), "qa") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match load(&format!("{HEADER}qa\teng\t\t1\t\nqa\tzzz\t\t1\t\n"), "qa") {
            Err(Error::UnknownLanguage(msg)) => assert!(msg.starts_with("zzz"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            load(&format!("{HEADER}qa\teng\t\t101\t\n"), "qa"),
            Err(Error::OutOfRangeScore { .. })
        ));
        assert!(matches!(
            load(&format!("{HEADER}mt\teng\t\t20\t\n"), "mt"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            load(&format!("{HEADER}mt\teng\teng\t20\t\n"), "mt"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn task_spec_invariants() {
        use Direction::*;
        assert!(TaskSpec::new(
            "x",
            MetricKind::Mcd,
            HigherBetter,
            None,
            Normalizer::RangeInvert,
            DefaultPolicy::Zero
        )
        .is_err());
        assert!(TaskSpec::new(
            "x",
            MetricKind::Bleu,
            HigherBetter,
            None,
            Normalizer::Empirical,
            DefaultPolicy::Zero
        )
        .is_err());
        assert!(matches!(TaskSpec::builtin("pos"), Err(Error::UnknownTask(_))));
        for id in BUILTIN_TASKS {
            TaskSpec::builtin(id).unwrap();
        }
    }

    const TRADE_HEADER: &str = "importer_iso3\tpartner_iso3\tshare\tflow\n";

    #[test]
    fn loads_azerbaijani_imports() {
        let text = format!(
            "{TRADE_HEADER}aze\trus\t.168\timport\naze\ttur\t.147\timport\naze\tcmn\t.112\timport\n\
             aze\teng\t.085\timport\naze\tukr\t.055\timport\naze\tdeu\t.055\timport\n"
        );
        let rows = load_trade_from_reader("trade.tsv", text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].partner, code("rus"));
        assert_eq!(rows[0].share, 0.168);
    }

    #[test]
    fn empty_trade_file() {
        assert!(load_trade_from_reader("t", "".as_bytes()).unwrap().is_empty());
        assert!(load_trade_from_reader("t", TRADE_HEADER.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn trade_sum_above_one_rejected() {
        let text = format!("{TRADE_HEADER}aze\trus\t0.7\timport\naze\ttur\t0.5\timport\naze\ttur\t0.9\texport\n");
        assert!(matches!(
            load_trade_from_reader("t", text.as_bytes()),
            Err(Error::ShareSumExceedsOne { .. })
        ));
    }

    fn cshare(rep: &str, part: &str, share: f64) -> CountryTradeShare {
        CountryTradeShare {
            reporter_country: rep.into(),
            partner_country: part.into(),
            share,
            flow: Flow::Import,
        }
    }

    #[test]
    fn merges_countries_sharing_a_language() {
        let mut map = CountryLanguageMap::new();
        map.insert("AZE", code("aze")).insert("DEU", code("deu")).insert("AUT", code("deu"));
        let merged =
            merge_country_weights(&[cshare("AZE", "DEU", 0.05), cshare("AZE", "AUT", 0.02)], &map)
                .unwrap();
        assert_eq!(merged.len(), 1);
        assert!((merged[0].share - 0.07).abs() < 1e-12);
    }

    #[test]
    fn one_to_one_merge_is_identity() {
        let mut map = CountryLanguageMap::new();
        map.insert("AZE", code("aze")).insert("RUS", code("rus")).insert("TUR", code("tur"));
        let merged =
            merge_country_weights(&[cshare("AZE", "RUS", 0.168), cshare("AZE", "TUR", 0.147)], &map)
                .unwrap();
        let shares: Vec<f64> = merged.iter().map(|t| t.share).collect();
        assert_eq!(shares, [0.168, 0.147]);
    }

    #[test]
    fn three_countries_one_language() {
        let mut map = CountryLanguageMap::new();
        map.insert("XXX", code("xxx"));
        for c in ["SAU", "EGY", "MAR"] {
            map.insert(c, code("ara"));
        }
        let rows = [cshare("XXX", "SAU", 0.1), cshare("XXX", "EGY", 0.2), cshare("XXX", "MAR", 0.3)];
        let merged = merge_country_weights(&rows, &map).unwrap();
        assert!((merged[0].share - 0.6).abs() < 1e-12);
    }

    #[test]
    fn reporter_countries_are_averaged() {
        let mut map = CountryLanguageMap::new();
        map.insert("DEU", code("deu")).insert("AUT", code("deu")).insert("RUS", code("rus"));
        let rows = [cshare("DEU", "RUS", 0.4), cshare("AUT", "RUS", 0.2)];
        let merged = merge_country_weights(&rows, &map).unwrap();
        assert!((merged[0].share - 0.3).abs() < 1e-12);
    }

    #[test]
    fn unmapped_country() {
        let map = CountryLanguageMap::new();
        assert!(matches!(
            merge_country_weights(&[cshare("AZE", "RUS", 0.1)], &map),
            Err(Error::UnmappedCountry(_))
        ));
    }
}
