//! The bundled sample data set pushed through the whole pipeline.

use std::collections::BTreeSet;
use std::fs;

use langequity::pubscan::{
    citation_percentiles, load_corpus, scan_corpus, scan_languages, MentionLexicon,
    PaperRecord, DEFAULT_DENYLIST,
};
use langequity::{Dataset, Error, Iso3, PopulationBasis, TaskSelector};
use langequity_testkit::{direct_demand, dot_product_metric, mini_data_dir, planted_corpus};

fn code(s: &str) -> Iso3 {
    Iso3::parse(s).unwrap()
}

fn mini() -> Dataset {
    Dataset::open(&mini_data_dir()).unwrap()
}

#[test]
fn registry_aggregates_macrolanguages() {
    let ds = mini();
    assert_eq!(ds.registry.len(), 20);
    let ara = ds.registry.get(code("ara")).unwrap();
    assert_eq!(ara.population, 75_000_000 + 30_000_000 + 12_000_000);
    assert_eq!(ara.gdp, Some(400.0 + 130.0 + 45.0));
    let universe: BTreeSet<Iso3> = ds.registry.universe().iter().map(|r| r.iso3).collect();
    assert_eq!(universe.len(), 15);
    assert!(!universe.contains(&code("arz")));
}

/// Recomputes a metric from the raw tables without the library's utility or
/// demand code.
fn recompute(ds: &Dataset, tau: f64, utility_of: impl Fn(Iso3) -> f64) -> f64 {
    let universe = ds.registry.universe();
    let pops: Vec<f64> = universe.iter().map(|r| r.population as f64).collect();
    let us: Vec<f64> = universe.iter().map(|r| utility_of(r.iso3)).collect();
    dot_product_metric(&direct_demand(&pops, tau), &us).unwrap().expected
}

#[test]
fn qa_metric_matches_hand_computation() {
    let ds = mini();
    let task = TaskSelector::parse("qa", &ds.registry).unwrap();
    // F-score over a theoretical maximum of 100; unseen languages score 0.
    let qa = [("eng", 81.2), ("ben", 70.4), ("rus", 68.9), ("ara", 82.0), ("swa", 72.1)];
    for tau in [0.0, 0.5, 1.0] {
        let got = ds.metric(&task, tau, None, PopulationBasis::Total, false).unwrap();
        let want = recompute(&ds, tau, |l| {
            qa.iter().find(|(c, _)| code(c) == l).map_or(0.0, |(_, s)| s / 100.0)
        });
        assert!((got.value - want).abs() < 1e-12, "tau {tau}: {} vs {want}", got.value);
        assert_eq!(got.coverage, 5);
    }
}

#[test]
fn nli_unseen_languages_score_a_third() {
    let ds = mini();
    let task = TaskSelector::parse("nli", &ds.registry).unwrap();
    let r = ds.metric(&task, 0.0, None, PopulationBasis::Total, false).unwrap();
    let ben = r.contributions.iter().find(|c| c.iso3 == code("ben")).unwrap();
    assert_eq!(ben.utility, 1.0 / 3.0);
    let gen = TaskSelector::parse("inflection", &ds.registry).unwrap();
    let r = ds.metric(&gen, 0.0, None, PopulationBasis::Total, false).unwrap();
    let cmn = r.contributions.iter().find(|c| c.iso3 == code("cmn")).unwrap();
    assert_eq!(cmn.utility, 0.0);
}

#[test]
fn dep_duplicates_keep_the_best_row() {
    let ds = mini();
    let task = TaskSelector::parse("dep", &ds.registry).unwrap();
    let results = ds.results(&task.spec).unwrap();
    let eng = results.results.values().find(|r| r.subject.to_string() == "eng").unwrap();
    assert_eq!((eng.score, eng.source_tag.as_str()), (92.1, "treebank-a"));
    let yor = results.results.values().find(|r| r.subject.to_string() == "yor").unwrap();
    assert_eq!(yor.source_tag, "treebank-a");
}

#[test]
fn vernacular_subset_weights_only_members() {
    let ds = mini();
    let task = TaskSelector::parse("qa", &ds.registry).unwrap();
    let r = ds
        .metric(&task, 1.0, Some("ara-vernaculars"), PopulationBasis::Total, false)
        .unwrap();
    let want = (75.0 * 60.3 + 30.0 * 52.4 + 12.0 * 47.8) / (117.0 * 100.0);
    assert!((r.value - want).abs() < 1e-12);
    assert_eq!(r.contributions.len(), 3);
}

#[test]
fn translation_into_english_excludes_english() {
    let ds = mini();
    let task = TaskSelector::parse("mt-to-eng", &ds.registry).unwrap();
    let r = ds.metric(&task, 1.0, None, PopulationBasis::Total, false).unwrap();
    assert!(r.contributions.iter().all(|c| c.iso3 != code("eng")));
    let cmn = r.contributions.iter().find(|c| c.iso3 == code("cmn")).unwrap();
    // best of two cmn-eng rows, over Z = 70
    assert_eq!(cmn.utility, 25.0 / 70.0);
    let pivot = ds.metric(&task, 1.0, None, PopulationBasis::Total, true).unwrap();
    assert!(pivot.value >= r.value);
}

#[test]
fn l2_exclusion_changes_the_weights() {
    let ds = mini();
    let task = TaskSelector::parse("dep", &ds.registry).unwrap();
    let total = ds.metric(&task, 1.0, None, PopulationBasis::Total, false).unwrap();
    let l1 = ds.metric(&task, 1.0, None, PopulationBasis::ExcludingL2, false).unwrap();
    let eng = |r: &langequity::MetricReport| {
        r.contributions.iter().find(|c| c.iso3 == code("eng")).unwrap().demand
    };
    assert!(eng(&l1) < eng(&total));
}

#[test]
fn bare_mt_needs_a_direction() {
    let ds = mini();
    assert!(matches!(
        TaskSelector::parse("mt", &ds.registry),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        TaskSelector::parse("mt-to-zzz", &ds.registry),
        Err(Error::UnknownLanguage(_))
    ));
    assert!(matches!(
        TaskSelector::parse("pos", &ds.registry),
        Err(Error::UnknownTask(_))
    ));
}

#[test]
fn corpus_scan_respects_the_denylist() {
    let ds = mini();
    let lex = MentionLexicon::from_registry(&ds.registry, DEFAULT_DENYLIST);
    let dir = mini_data_dir().join("corpus");
    let mut papers = load_corpus(&dir, &dir.join("metadata.tsv")).unwrap();
    assert_eq!(papers.len(), 14);
    scan_corpus(&mut papers, &lex, false);
    citation_percentiles(&mut papers).unwrap();
    fn by_id<'a>(papers: &'a [PaperRecord], id: &str) -> &'a PaperRecord {
        papers.iter().find(|p| p.paper_id == id).unwrap()
    }
    assert!(by_id(&papers, "p03").languages.is_empty());
    assert!(by_id(&papers, "p06").languages.is_empty());
    assert_eq!(by_id(&papers, "p12").languages, BTreeSet::from([code("spa"), code("fra")]));
    assert_eq!(by_id(&papers, "p13").languages, BTreeSet::from([code("hin"), code("ben")]));
    scan_corpus(&mut papers, &lex, true);
    assert_eq!(by_id(&papers, "p03").languages, BTreeSet::from([code("eng")]));
}

#[test]
fn planted_mentions_are_recovered_exactly() {
    let ds = mini();
    let lex = MentionLexicon::from_registry(&ds.registry, DEFAULT_DENYLIST);
    let candidates: Vec<(String, String)> = ds
        .registry
        .records()
        .map(|r| (r.iso3.to_string(), r.names[0].clone()))
        .collect();
    let refs: Vec<(&str, &str)> = candidates.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    for seed in 0..20 {
        let doc = planted_corpus(seed, &refs, 12, 10_000, &DEFAULT_DENYLIST);
        let found: BTreeSet<String> =
            scan_languages(&doc.text, &lex).iter().map(|c| c.to_string()).collect();
        assert_eq!(found, doc.planted, "seed {seed}");
    }
}

#[test]
fn malformed_rows_are_reported_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(mini_data_dir().join("languages.tsv"), dir.path().join("languages.tsv")).unwrap();
    fs::write(
        dir.path().join("results.tsv"),
        "task_id\tsource_iso3\ttarget_iso3\tscore\tsource_tag\nqa\teng\t\t80\tx\nqa\tspa\t\tabc\tx\n",
    )
    .unwrap();
    let ds = Dataset::open(dir.path()).unwrap();
    let task = TaskSelector::parse("qa", &ds.registry).unwrap();
    let err = ds.results(&task.spec).unwrap_err();
    assert_eq!(err.code(), "ParseError");
    assert!(err.to_string().contains("results.tsv:3"), "{err}");

    fs::write(
        dir.path().join("results.tsv"),
        "task_id\tsource_iso3\ttarget_iso3\tscore\nqa\teng\t\t180\n",
    )
    .unwrap();
    let err = ds.results(&task.spec).unwrap_err();
    assert_eq!(err.code(), "OutOfRangeScore");
}
