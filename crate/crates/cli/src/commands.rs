use std::path::Path;

use anyhow::{bail, Result};
use serde::Serialize;

use langequity::ingest::{task_ids_in, Flow};
use langequity::metric::{default_tau_grid, metric_curve, MetricReport};
use langequity::pivot::{all_pairs_estimates, best_pivot_path, PivotEstimate};
use langequity::pubscan::{
    citation_percentiles, languages_vs_citations_summary, load_corpus, load_denylist,
    papers_per_language_summary, scan_corpus, CitationCorrelation, MentionLexicon,
    PapersPerLanguage, DEFAULT_DENYLIST,
};
use langequity::{
    econ_pair_demand, greedy_population_curve, priority_ranking, report, svg, Dataset, Error,
    PopulationBasis, TaskSelector,
};

use crate::args::{Cli, Command, CurveArgs, Format, MetricArgs, PivotArgs, PubscanArgs, RankArgs, UsageError};
use crate::output::{tau_tag, Sink};

pub fn run(cli: &Cli) -> Result<()> {
    let sink = Sink::new(cli.out.clone())?;
    match &cli.command {
        Command::Metric(a) => metric(cli, a, &sink),
        Command::Curve(a) => curve(cli, a, &sink),
        Command::Rank(a) => rank(cli, a, &sink),
        Command::Pivot(a) => pivot(cli, a, &sink),
        Command::Pubscan(a) => pubscan(cli, a, &sink),
        Command::Report(a) => full_report(cli, a.corpus.as_deref(), a.english_default, &sink),
    }
}

fn basis(cli: &Cli) -> PopulationBasis {
    if cli.exclude_l2 {
        PopulationBasis::ExcludingL2
    } else {
        PopulationBasis::Total
    }
}

/// The requested format if the command supports it, else its default.
fn format(cli: &Cli, allowed: &[Format]) -> Result<Format> {
    match cli.format {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => {
            let names: Vec<&str> = allowed.iter().map(|a| a.ext()).collect();
            bail!(UsageError(format!(
                "format {} is not available here; choose one of {}",
                f.ext(),
                names.join(", ")
            )))
        }
    }
}

fn selectors(ds: &Dataset, tasks: &[String]) -> Result<Vec<TaskSelector>> {
    Ok(tasks
        .iter()
        .map(|t| TaskSelector::parse(t, &ds.registry))
        .collect::<Result<_, Error>>()?)
}

/// Task label plus subset, for file names.
fn label(task: &TaskSelector, subset: Option<&str>) -> String {
    match subset {
        Some(s) => format!("{}_{}", task.label, s.replace([',', ' '], "+")),
        None => task.label.clone(),
    }
}

fn metric(cli: &Cli, a: &MetricArgs, sink: &Sink) -> Result<()> {
    let fmt = format(cli, &[Format::Tsv, Format::Json])?;
    let ds = Dataset::open(&cli.data_dir)?;
    let mut taus: Vec<f64> = a.tau.iter().chain(&a.taus).copied().collect();
    if taus.is_empty() {
        taus.push(1.0);
    }
    let subset = a.task.subset.as_deref();
    let mut reports: Vec<MetricReport> = Vec::new();
    for task in selectors(&ds, &a.task.task)? {
        for &tau in &taus {
            let r = ds.metric(&task, tau, subset, basis(cli), a.task.pivot)?;
            if sink.to_files() {
                let name = format!("metric_{}_tau{}.{}", label(&task, subset), tau_tag(tau), fmt.ext());
                let body = match fmt {
                    Format::Json => report::metric_json(&r),
                    _ => report::contributions_tsv(&r),
                };
                sink.emit(&name, &body)?;
            }
            reports.push(r);
        }
    }
    match (fmt, sink.to_files()) {
        (Format::Json, false) if reports.len() == 1 => sink.emit("", &report::metric_json(&reports[0])),
        (Format::Json, false) => sink.emit("", &report::metrics_json(&reports)),
        _ => sink.emit("metrics.tsv", &report::metrics_tsv(&reports)),
    }
}

fn curve(cli: &Cli, a: &CurveArgs, sink: &Sink) -> Result<()> {
    let fmt = format(cli, &[Format::Tsv, Format::Json, Format::Svg])?;
    let ds = Dataset::open(&cli.data_dir)?;
    let grid = if a.taus.is_empty() { default_tau_grid() } else { a.taus.clone() };
    let subset = a.task.subset.as_deref();
    for task in selectors(&ds, &a.task.task)? {
        let (utilities, universe) = ds.scoped(&task, subset, a.task.pivot)?;
        let points = metric_curve(&utilities, &universe, &grid, basis(cli))?;
        let name = format!("curve_{}", label(&task, subset));
        let tsv = report::curve_tsv(&points);
        let rendered = match fmt {
            Format::Json => Some(report::curve_json(&task.label, &points)),
            Format::Svg => Some(svg::line_chart(&format!("M_tau for {}", task.label), &points)),
            _ => None,
        };
        if sink.to_files() {
            sink.emit(&format!("{name}.tsv"), &tsv)?;
            if let Some(body) = &rendered {
                sink.emit(&format!("{name}.{}", fmt.ext()), body)?;
            }
        } else {
            sink.emit("", rendered.as_deref().unwrap_or(&tsv))?;
        }
    }
    Ok(())
}

fn rank(cli: &Cli, a: &RankArgs, sink: &Sink) -> Result<()> {
    let fmt = format(cli, &[Format::Csv, Format::Json])?;
    let ds = Dataset::open(&cli.data_dir)?;
    let subset = a.task.subset.as_deref();
    for task in selectors(&ds, &a.task.task)? {
        let (utilities, universe) = ds.scoped(&task, subset, a.task.pivot)?;
        let ranking = priority_ranking(&utilities, &universe, a.tau, a.top as usize, basis(cli))?;
        let body = match fmt {
            Format::Json => report::ranking_json(&ranking),
            _ => report::ranking_csv(&ranking),
        };
        let name = format!("rank_{}_tau{}.{}", label(&task, subset), tau_tag(a.tau), fmt.ext());
        sink.emit(&name, &body)?;
    }
    Ok(())
}

fn pivot(cli: &Cli, a: &PivotArgs, sink: &Sink) -> Result<()> {
    let fmt = format(cli, &[Format::Csv, Format::Json])?;
    let ds = Dataset::open(&cli.data_dir)?;
    let graph = ds.pivot_graph()?;
    let (estimates, name) = match (&a.source, &a.target) {
        (Some(s), Some(t)) => {
            let source = ds.registry.lookup_code(s)?.iso3;
            let target = ds.registry.lookup_code(t)?.iso3;
            if source == target {
                return Err(Error::SelfPair(source).into());
            }
            // Known languages without any evaluated direction are simply
            // unreachable.
            let est = if graph.contains(source) && graph.contains(target) {
                best_pivot_path(&graph, source, target)?
            } else {
                PivotEstimate {
                    source,
                    target,
                    estimate: 0.0,
                    path: Vec::new(),
                }
            };
            (vec![est], format!("pivot_{source}-{target}"))
        }
        _ => (all_pairs_estimates(&graph).into_values().collect(), "pivot".to_owned()),
    };
    let body = match fmt {
        Format::Json => report::pivot_json(&estimates),
        _ => report::pivot_csv(&estimates),
    };
    sink.emit(&format!("{name}.{}", fmt.ext()), &body)
}

#[derive(Serialize)]
struct PubscanSummary {
    papers: usize,
    papers_without_mentions: usize,
    english_default: bool,
    /// Absent when too few papers carry a percentile.
    citations: Option<CitationCorrelation>,
    languages: PapersPerLanguage,
}

struct Scan {
    mentions: String,
    summary: PubscanSummary,
}

fn scan(ds: &Dataset, corpus: &Path, a: ScanOptions<'_>) -> Result<Scan> {
    let mut deny: Vec<String> = DEFAULT_DENYLIST.iter().map(|s| s.to_string()).collect();
    if let Some(path) = a.denylist {
        deny.extend(load_denylist(path)?);
    }
    let default_lexicon = ds.path("lexicon.tsv");
    let lexicon = match a.lexicon {
        Some(path) => MentionLexicon::load(path, &deny)?,
        None if default_lexicon.is_file() => MentionLexicon::load(&default_lexicon, &deny)?,
        None => MentionLexicon::from_registry(&ds.registry, &deny),
    };
    let metadata = a.metadata.map(Path::to_path_buf).unwrap_or_else(|| corpus.join("metadata.tsv"));
    let mut papers = load_corpus(corpus, &metadata)?;
    scan_corpus(&mut papers, &lexicon, false);
    let without = papers.iter().filter(|p| p.languages.is_empty()).count();
    if a.english_default {
        scan_corpus(&mut papers, &lexicon, true);
    }
    citation_percentiles(&mut papers)?;
    let citations = match languages_vs_citations_summary(&papers) {
        Ok(c) => Some(c),
        Err(Error::InsufficientData(msg)) => {
            log::warn!("citation correlation skipped: {msg}");
            None
        }
        Err(e) => return Err(e.into()),
    };
    Ok(Scan {
        mentions: report::mentions_tsv(&papers),
        summary: PubscanSummary {
            papers: papers.len(),
            papers_without_mentions: without,
            english_default: a.english_default,
            citations,
            languages: papers_per_language_summary(&papers, &ds.registry),
        },
    })
}

#[derive(Clone, Copy, Default)]
struct ScanOptions<'a> {
    metadata: Option<&'a Path>,
    lexicon: Option<&'a Path>,
    denylist: Option<&'a Path>,
    english_default: bool,
}

fn counts_chart(summary: &PubscanSummary) -> String {
    let bars: Vec<(String, f64)> = summary
        .languages
        .rows
        .iter()
        .filter(|r| r.paper_count > 0)
        .map(|r| (r.iso3.to_string(), r.paper_count as f64))
        .collect();
    svg::bar_chart("Papers per language", &bars)
}

fn pubscan(cli: &Cli, a: &PubscanArgs, sink: &Sink) -> Result<()> {
    let fmt = format(cli, &[Format::Tsv, Format::Json, Format::Svg])?;
    let ds = Dataset::open(&cli.data_dir)?;
    let opts = ScanOptions {
        metadata: a.metadata.as_deref(),
        lexicon: a.lexicon.as_deref(),
        denylist: a.denylist.as_deref(),
        english_default: a.english_default,
    };
    let result = scan(&ds, &a.corpus, opts)?;
    let summary = report::summary_json(&result.summary);
    if sink.to_files() {
        sink.emit("mentions.tsv", &result.mentions)?;
        sink.emit("pubscan_summary.json", &summary)?;
        if fmt == Format::Svg {
            sink.emit("papers_per_language.svg", &counts_chart(&result.summary))?;
        }
        return Ok(());
    }
    match fmt {
        Format::Json => sink.emit("", &summary),
        Format::Svg => sink.emit("", &counts_chart(&result.summary)),
        _ => sink.emit("", &result.mentions),
    }
}

/// Task labels with results in the data directory. Translation results are
/// reported into and out of English.
fn report_tasks(ds: &Dataset) -> Result<Vec<TaskSelector>> {
    let mut out = Vec::new();
    for id in task_ids_in(&ds.path("results.tsv"))? {
        let labels: Vec<String> = if id == "mt" {
            vec!["mt-to-eng".into(), "mt-from-eng".into()]
        } else {
            vec![id.clone()]
        };
        for l in labels {
            match TaskSelector::parse(&l, &ds.registry) {
                Ok(t) => out.push(t),
                Err(Error::UnknownTask(_)) => log::warn!("skipping unknown task {id}"),
                Err(e) => return Err(e.into()),
            }
        }
    }
    out.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(out)
}

fn full_report(cli: &Cli, corpus: Option<&Path>, english_default: bool, sink: &Sink) -> Result<()> {
    if !sink.to_files() {
        bail!(UsageError("report writes several files and needs --out".into()));
    }
    let ds = Dataset::open(&cli.data_dir)?;
    let b = basis(cli);
    let mut summary = Vec::new();
    for task in report_tasks(&ds)? {
        let (utilities, universe) = ds.scoped(&task, None, false)?;
        for tau in [0.0, 1.0] {
            let r = ds.metric(&task, tau, None, b, false)?;
            sink.emit(&format!("metric_{}_tau{}.json", task.label, tau_tag(tau)), &report::metric_json(&r))?;
            summary.push(r);
        }
        let points = metric_curve(&utilities, &universe, &default_tau_grid(), b)?;
        sink.emit(&format!("curve_{}.tsv", task.label), &report::curve_tsv(&points))?;
        sink.emit(
            &format!("curve_{}.svg", task.label),
            &svg::line_chart(&format!("M_tau for {}", task.label), &points),
        )?;
        let ranking = priority_ranking(&utilities, &universe, 1.0, 10, b)?;
        sink.emit(&format!("rank_{}_tau1.00.csv", task.label), &report::ranking_csv(&ranking))?;
        let greedy = greedy_population_curve(&utilities, &universe, 1.0, b)?;
        sink.emit(&format!("greedy_{}.tsv", task.label), &report::greedy_curve_tsv(&greedy))?;
        let utility_bars: Vec<(String, f64)> = summary
            .last()
            .expect("pushed above")
            .contributions
            .iter()
            .map(|c| (c.iso3.to_string(), c.utility))
            .collect();
        sink.emit(
            &format!("utility_{}.svg", task.label),
            &svg::bar_chart(&format!("Utility for {}", task.label), &utility_bars),
        )?;
    }
    sink.emit("metrics.tsv", &report::metrics_tsv(&summary))?;

    if summary.iter().any(|r| r.task_id.starts_with("mt-")) {
        let estimates: Vec<PivotEstimate> = all_pairs_estimates(&ds.pivot_graph()?).into_values().collect();
        sink.emit("pivot.csv", &report::pivot_csv(&estimates))?;
    }
    if ds.path("trade.tsv").is_file() {
        let demand = econ_pair_demand(&ds.trade()?, Flow::Import)?;
        sink.emit("pair_demand_import.tsv", &report::pair_demand_tsv(&demand))?;
    }
    let default_corpus = ds.path("corpus");
    let corpus = corpus.or(default_corpus.is_dir().then_some(default_corpus.as_path()));
    if let Some(dir) = corpus {
        let opts = ScanOptions {
            english_default,
            ..ScanOptions::default()
        };
        let result = scan(&ds, dir, opts)?;
        sink.emit("mentions.tsv", &result.mentions)?;
        sink.emit("pubscan_summary.json", &report::summary_json(&result.summary))?;
        sink.emit("papers_per_language.svg", &counts_chart(&result.summary))?;
    }
    Ok(())
}
