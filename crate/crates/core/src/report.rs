//! Serialized forms of computed results.
//!
//! Every number is written with six fractional digits and every collection
//! in a fixed order, so equal inputs give byte-identical files.

use std::fmt::Write as _;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::demand::PairDemand;
use crate::lang::Iso3;
use crate::metric::MetricReport;
use crate::pivot::PivotEstimate;
use crate::priority::PriorityRanking;
use crate::pubscan::PaperRecord;

/// Six-decimal rendering used in every text output; non-finite values have
/// no JSON form and become `null` there.
pub fn fmt6(v: f64) -> String {
    // avoid "-0.000000"
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.6}")
}

pub fn fixed6<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !v.is_finite() {
        return s.serialize_none();
    }
    RawValue::from_string(fmt6(*v))
        .map_err(serde::ser::Error::custom)?
        .serialize(s)
}

pub fn fixed6_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => fixed6(v, s),
        None => s.serialize_none(),
    }
}

pub fn fixed6_pair_opt<S: Serializer>(v: &Option<(f64, f64)>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some((a, b)) => Fixed6Seq(&[*a, *b]).serialize(s),
        None => s.serialize_none(),
    }
}

struct Fixed6(f64);

impl Serialize for Fixed6 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        fixed6(&self.0, s)
    }
}

struct Fixed6Seq<'a>(&'a [f64]);

impl Serialize for Fixed6Seq<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|&v| Fixed6(v)))
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report values serialize");
    out.push('\n');
    out
}

#[derive(Serialize)]
struct ContributionJson {
    iso3: Iso3,
    #[serde(serialize_with = "fixed6")]
    demand: f64,
    #[serde(serialize_with = "fixed6")]
    utility: f64,
    #[serde(serialize_with = "fixed6")]
    product: f64,
}

#[derive(Serialize)]
struct MetricJson<'a> {
    task: &'a str,
    #[serde(serialize_with = "fixed6")]
    tau: f64,
    #[serde(serialize_with = "fixed6")]
    value: f64,
    coverage: usize,
    contributions: Vec<ContributionJson>,
}

impl<'a> From<&'a MetricReport> for MetricJson<'a> {
    fn from(r: &'a MetricReport) -> Self {
        MetricJson {
            task: &r.task_id,
            tau: r.tau,
            value: r.value,
            coverage: r.coverage,
            contributions: r
                .contributions
                .iter()
                .map(|c| ContributionJson {
                    iso3: c.iso3,
                    demand: c.demand,
                    utility: c.utility,
                    product: c.product,
                })
                .collect(),
        }
    }
}

/// `{task, tau, value, coverage, contributions: [{iso3, demand, utility, product}]}`
pub fn metric_json(report: &MetricReport) -> String {
    to_json(&MetricJson::from(report))
}

/// Several reports as one JSON array.
pub fn metrics_json(reports: &[MetricReport]) -> String {
    to_json(&reports.iter().map(MetricJson::from).collect::<Vec<_>>())
}

/// One line per report: task, tau, value, coverage.
pub fn metrics_tsv(reports: &[MetricReport]) -> String {
    let mut out = String::from("task\ttau\tvalue\tcoverage\n");
    for r in reports {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", r.task_id, fmt6(r.tau), fmt6(r.value), r.coverage);
    }
    out
}

/// Per-language breakdown of one report.
pub fn contributions_tsv(report: &MetricReport) -> String {
    let mut out = String::from("iso3\tdemand\tutility\tproduct\n");
    for c in &report.contributions {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            c.iso3,
            fmt6(c.demand),
            fmt6(c.utility),
            fmt6(c.product)
        );
    }
    out
}

pub fn curve_tsv(curve: &[(f64, f64)]) -> String {
    let mut out = String::from("tau\tvalue\n");
    for (tau, m) in curve {
        let _ = writeln!(out, "{}\t{}", fmt6(*tau), fmt6(*m));
    }
    out
}

#[derive(Serialize)]
struct CurvePoint {
    #[serde(serialize_with = "fixed6")]
    tau: f64,
    #[serde(serialize_with = "fixed6")]
    value: f64,
}

pub fn curve_json(task: &str, curve: &[(f64, f64)]) -> String {
    #[derive(Serialize)]
    struct Curve<'a> {
        task: &'a str,
        points: Vec<CurvePoint>,
    }
    to_json(&Curve {
        task,
        points: curve.iter().map(|&(tau, value)| CurvePoint { tau, value }).collect(),
    })
}

pub fn ranking_csv(ranking: &PriorityRanking) -> String {
    let mut out = String::from("rank,iso3,gain\n");
    for (i, (lang, gain)) in ranking.ranked.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", i + 1, lang, fmt6(*gain));
    }
    out
}

pub fn ranking_json(ranking: &PriorityRanking) -> String {
    #[derive(Serialize)]
    struct Entry {
        rank: usize,
        iso3: Iso3,
        #[serde(serialize_with = "fixed6")]
        gain: f64,
    }
    #[derive(Serialize)]
    struct Ranking<'a> {
        task: &'a str,
        #[serde(serialize_with = "fixed6")]
        tau: f64,
        #[serde(serialize_with = "fixed6")]
        value: f64,
        ranking: Vec<Entry>,
    }
    to_json(&Ranking {
        task: &ranking.task_id,
        tau: ranking.tau,
        value: ranking.basis_metric,
        ranking: ranking
            .ranked
            .iter()
            .enumerate()
            .map(|(i, &(iso3, gain))| Entry {
                rank: i + 1,
                iso3,
                gain,
            })
            .collect(),
    })
}

/// Metric after forcing the `i` most populous languages to full utility.
pub fn greedy_curve_tsv(curve: &[f64]) -> String {
    let mut out = String::from("served\tvalue\n");
    for (i, m) in curve.iter().enumerate() {
        let _ = writeln!(out, "{i}\t{}", fmt6(*m));
    }
    out
}

pub fn pivot_csv(estimates: &[PivotEstimate]) -> String {
    let mut out = String::from("source,target,estimate,path\n");
    for e in estimates {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            e.source,
            e.target,
            fmt6(e.estimate),
            e.path_label()
        );
    }
    out
}

pub fn pivot_json(estimates: &[PivotEstimate]) -> String {
    #[derive(Serialize)]
    struct Entry<'a> {
        source: Iso3,
        target: Iso3,
        #[serde(serialize_with = "fixed6")]
        estimate: f64,
        path: &'a [Iso3],
    }
    to_json(
        &estimates
            .iter()
            .map(|e| Entry {
                source: e.source,
                target: e.target,
                estimate: e.estimate,
                path: &e.path,
            })
            .collect::<Vec<_>>(),
    )
}

pub fn pair_demand_tsv(demand: &PairDemand) -> String {
    let mut out = String::from("source\ttarget\tweight\n");
    for ((s, t), w) in demand.ranked() {
        let _ = writeln!(out, "{s}\t{t}\t{}", fmt6(w));
    }
    out
}

/// paper_id, comma-joined codes, citation percentile (blank if unset).
pub fn mentions_tsv(papers: &[PaperRecord]) -> String {
    let mut sorted: Vec<&PaperRecord> = papers.iter().collect();
    sorted.sort_by(|a, b| a.paper_id.cmp(&b.paper_id));
    let mut out = String::from("paper_id\tlanguages\tcitation_percentile\n");
    for p in sorted {
        let codes: Vec<&str> = p.languages.iter().map(Iso3::as_str).collect();
        let pct = p.citation_percentile.map(fmt6).unwrap_or_default();
        let _ = writeln!(out, "{}\t{}\t{}", p.paper_id, codes.join(","), pct);
    }
    out
}

/// Pretty JSON of any summary whose floats already use the fixed helpers.
pub fn summary_json<T: Serialize>(value: &T) -> String {
    to_json(value)
}
