//! Language mentions in publication text and citation statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lang::{Iso3, Registry};
use crate::report::{fixed6, fixed6_opt, fixed6_pair_opt};
use crate::tsv::{split_list, Table};

/// Surface forms that collide with common words, place names, author names
/// or notation.
pub const DEFAULT_DENYLIST: [&str; 16] = [
    "She", "Male", "Label", "Even", "The", "Are", "Colorado", "Nara", "Sydney", "Su", "Kim",
    "Dan", "Ali", "Rama", "Dji", "Dii",
];

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub iso3: Iso3,
    pub names: Vec<String>,
    pub endonyms: Vec<String>,
    pub glottocode: Option<String>,
}

/// Whole-token matcher over language names, endonyms and codes.
#[derive(Debug, Clone, Default)]
pub struct MentionLexicon {
    /// first lowercase token -> (full lowercase token sequence, language)
    names: HashMap<String, Vec<(Vec<String>, Iso3)>>,
    /// exact code -> language
    codes: HashMap<String, Iso3>,
    denylist: BTreeSet<String>,
    languages: BTreeSet<Iso3>,
}

/// Whitespace and punctuation end a token. Other non-ASCII characters are
/// word characters, so combining marks stay inside words like "हिन्दी".
fn is_separator(c: char) -> bool {
    c.is_whitespace()
        || c.is_control()
        || (c.is_ascii() && !c.is_ascii_alphanumeric())
        || ('\u{2000}'..='\u{206f}').contains(&c)
        || ('\u{3000}'..='\u{303f}').contains(&c)
        || ('\u{ff01}'..='\u{ff0f}').contains(&c)
        || matches!(c, '«' | '»' | '¿' | '¡' | '·' | '：' | '；' | '？' | '।')
}

fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(is_separator).filter(|t| !t.is_empty())
}

fn form_key(form: &str) -> String {
    tokens(form).map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

impl MentionLexicon {
    /// Builds the matcher. Denylisted forms are compared whole and without
    /// regard to case, and never produce a mention.
    pub fn new<I, S>(entries: &[LexiconEntry], denylist: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let denylist: BTreeSet<String> = denylist
            .into_iter()
            .map(|d| form_key(d.as_ref()))
            .filter(|d| !d.is_empty())
            .collect();
        let mut lex = MentionLexicon {
            denylist,
            ..Self::default()
        };
        for e in entries {
            lex.languages.insert(e.iso3);
            for name in e.names.iter().chain(&e.endonyms) {
                let key = form_key(name);
                if key.is_empty() || lex.denylist.contains(&key) {
                    continue;
                }
                let seq: Vec<String> = key.split(' ').map(str::to_owned).collect();
                let bucket = lex.names.entry(seq[0].clone()).or_default();
                if !bucket.iter().any(|(s, l)| *s == seq && *l == e.iso3) {
                    bucket.push((seq, e.iso3));
                }
            }
            let codes = std::iter::once(e.iso3.to_string()).chain(e.glottocode.clone());
            for c in codes {
                if !lex.denylist.contains(&form_key(&c)) {
                    lex.codes.insert(c, e.iso3);
                }
            }
        }
        lex
    }

    pub fn from_registry<I, S>(registry: &Registry, denylist: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let entries: Vec<LexiconEntry> = registry
            .records()
            .map(|r| LexiconEntry {
                iso3: r.iso3,
                names: r.names.clone(),
                endonyms: r.endonyms.clone(),
                glottocode: None,
            })
            .collect();
        Self::new(&entries, denylist)
    }

    /// Lexicon TSV with columns iso3, names, endonyms, glottocode.
    pub fn load<I, S>(path: &Path, denylist: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let table = Table::open(path)?;
        let c_iso = table.require("iso3")?;
        let c_names = table.require("names")?;
        let c_endo = table.column("endonyms");
        let c_glotto = table.column("glottocode");
        let mut entries = Vec::with_capacity(table.rows.len());
        for row in &table.rows {
            entries.push(LexiconEntry {
                iso3: Iso3::parse(row.get(c_iso)).map_err(|e| table.err(row, e.to_string()))?,
                names: split_list(row.get(c_names)),
                endonyms: split_list(row.opt(c_endo)),
                glottocode: Some(row.opt(c_glotto).to_owned()).filter(|g| !g.is_empty()),
            });
        }
        Ok(Self::new(&entries, denylist))
    }

    pub fn is_denied(&self, form: &str) -> bool {
        self.denylist.contains(&form_key(form))
    }

    pub fn languages(&self) -> &BTreeSet<Iso3> {
        &self.languages
    }
}

/// Reads a deny-list file: one surface form per line, `#` comments allowed.
pub fn load_denylist(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect())
}

/// Languages mentioned in `text` by whole-token name (any case), endonym, or
/// exact code.
///
/// Names match leftmost-longest: the tokens of "Egyptian Arabic" count as
/// one mention of that variety, not also as a mention of "Arabic".
pub fn scan_languages(text: &str, lexicon: &MentionLexicon) -> BTreeSet<Iso3> {
    let raw: Vec<&str> = tokens(text).collect();
    let lower: Vec<String> = raw.iter().map(|t| t.to_lowercase()).collect();
    let mut found = BTreeSet::new();
    let mut i = 0;
    while i < raw.len() {
        let mut longest = 0;
        let mut hits: Vec<Iso3> = Vec::new();
        for (seq, l) in lexicon.names.get(&lower[i]).into_iter().flatten() {
            let n = seq.len();
            if n < longest || lower.len() - i < n || lower[i..i + n] != seq[..] {
                continue;
            }
            if n > longest {
                longest = n;
                hits.clear();
            }
            hits.push(*l);
        }
        if longest > 0 {
            found.extend(hits);
            i += longest;
            continue;
        }
        if let Some(&l) = lexicon.codes.get(raw[i]) {
            found.insert(l);
        }
        i += 1;
    }
    found
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaperRecord {
    pub paper_id: String,
    pub year: i32,
    pub venue: String,
    pub text: String,
    pub citations: u64,
    pub languages: BTreeSet<Iso3>,
    /// Set by [`citation_percentiles`].
    pub citation_percentile: Option<f64>,
}

/// Fills `languages` for every paper. With `english_default`, papers without
/// any mention are taken to be about English.
pub fn scan_corpus(papers: &mut [PaperRecord], lexicon: &MentionLexicon, english_default: bool) {
    let eng = Iso3::parse("eng").expect("valid code");
    papers.par_iter_mut().for_each(|p| {
        p.languages = scan_languages(&p.text, lexicon);
        if english_default && p.languages.is_empty() {
            p.languages.insert(eng);
        }
    });
}

/// Midrank percentile of each count within its group:
/// `(count strictly below + 0.5 * count tied, self included) / n`.
pub fn percentile_ranks(citations: &[u64]) -> Result<Vec<f64>> {
    if citations.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let mut sorted = citations.to_vec();
    sorted.sort_unstable();
    let n = citations.len();
    Ok(citations
        .iter()
        .map(|c| {
            let below = sorted.partition_point(|x| x < c);
            let tied = sorted.partition_point(|x| x <= c) - below;
            (2 * below + tied) as f64 / (2 * n) as f64
        })
        .collect())
}

/// Sets each paper's citation percentile relative to its (year, venue) group.
pub fn citation_percentiles(papers: &mut [PaperRecord]) -> Result<()> {
    let mut groups: BTreeMap<(i32, String), Vec<usize>> = BTreeMap::new();
    for (i, p) in papers.iter().enumerate() {
        groups.entry((p.year, p.venue.clone())).or_default().push(i);
    }
    for idx in groups.values() {
        let counts: Vec<u64> = idx.iter().map(|&i| papers[i].citations).collect();
        for (&i, pct) in idx.iter().zip(percentile_ranks(&counts)?) {
            papers[i].citation_percentile = Some(pct);
        }
    }
    Ok(())
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties; `None` when either
/// side has no variance.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "paired samples");
    if x.len() < 2 {
        return None;
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 95% interval for a correlation via the Fisher transform.
fn fisher_interval(r: f64, n: usize) -> Option<(f64, f64)> {
    if n <= 3 {
        return None;
    }
    if r.abs() >= 1.0 {
        return Some((r, r));
    }
    let z = r.atanh();
    let half = 1.959_963_984_540_054 / ((n - 3) as f64).sqrt();
    Some(((z - half).tanh(), (z + half).tanh()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanguageCountGroup {
    pub languages: usize,
    pub papers: usize,
    #[serde(serialize_with = "fixed6")]
    pub mean_percentile: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CitationCorrelation {
    pub papers: usize,
    #[serde(serialize_with = "fixed6_opt")]
    pub spearman: Option<f64>,
    #[serde(serialize_with = "fixed6_pair_opt")]
    pub ci95: Option<(f64, f64)>,
    pub groups: Vec<LanguageCountGroup>,
}

/// Rank correlation between how many languages a paper covers and its
/// citation percentile. Descriptive only.
pub fn languages_vs_citations_summary(papers: &[PaperRecord]) -> Result<CitationCorrelation> {
    let scored: Vec<(usize, f64)> = papers
        .iter()
        .filter_map(|p| p.citation_percentile.map(|c| (p.languages.len(), c)))
        .collect();
    if scored.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} papers with a citation percentile, need at least 3",
            scored.len()
        )));
    }
    let x: Vec<f64> = scored.iter().map(|s| s.0 as f64).collect();
    let y: Vec<f64> = scored.iter().map(|s| s.1).collect();
    let rho = spearman(&x, &y);
    let mut by_count: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    for &(k, c) in &scored {
        let e = by_count.entry(k).or_default();
        e.0 += 1;
        e.1 += c;
    }
    Ok(CitationCorrelation {
        papers: scored.len(),
        spearman: rho,
        ci95: rho.and_then(|r| fisher_interval(r, scored.len())),
        groups: by_count
            .into_iter()
            .map(|(languages, (papers, sum))| LanguageCountGroup {
                languages,
                papers,
                mean_percentile: sum / papers as f64,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanguageCountRow {
    pub iso3: Iso3,
    pub paper_count: usize,
    #[serde(serialize_with = "fixed6_opt")]
    pub log_gdp: Option<f64>,
    #[serde(serialize_with = "fixed6_opt")]
    pub log_population: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PapersPerLanguage {
    /// Most-studied language first.
    pub rows: Vec<LanguageCountRow>,
    #[serde(serialize_with = "fixed6_opt")]
    pub spearman_log_gdp: Option<f64>,
    #[serde(serialize_with = "fixed6_opt")]
    pub spearman_log_population: Option<f64>,
}

fn positive_ln(x: f64) -> Option<f64> {
    (x > 0.0).then(|| x.ln())
}

/// Paper counts per registry language with rank correlations against
/// log-GDP and log-population. Languages with no papers count as zero.
pub fn papers_per_language_summary(papers: &[PaperRecord], registry: &Registry) -> PapersPerLanguage {
    let mut counts: BTreeMap<Iso3, usize> = registry.records().map(|r| (r.iso3, 0)).collect();
    for p in papers {
        for l in &p.languages {
            if let Some(c) = counts.get_mut(l) {
                *c += 1;
            }
        }
    }
    let mut rows: Vec<LanguageCountRow> = registry
        .records()
        .map(|r| LanguageCountRow {
            iso3: r.iso3,
            paper_count: counts[&r.iso3],
            log_gdp: r.gdp.and_then(positive_ln),
            log_population: positive_ln(r.population as f64),
        })
        .collect();
    rows.sort_by(|a, b| b.paper_count.cmp(&a.paper_count).then(a.iso3.cmp(&b.iso3)));
    let correlate = |pick: fn(&LanguageCountRow) -> Option<f64>| {
        let (x, y): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter_map(|r| pick(r).map(|v| (r.paper_count as f64, v)))
            .unzip();
        spearman(&x, &y)
    };
    PapersPerLanguage {
        spearman_log_gdp: correlate(|r| r.log_gdp),
        spearman_log_population: correlate(|r| r.log_population),
        rows,
    }
}

/// Reads `<paper_id>.txt` files from `dir` joined with metadata columns
/// paper_id, year, venue, citations. Metadata rows without a text file are
/// skipped.
pub fn load_corpus(dir: &Path, metadata: &Path) -> Result<Vec<PaperRecord>> {
    let table = Table::open(metadata)?;
    let c_id = table.require("paper_id")?;
    let c_year = table.require("year")?;
    let c_venue = table.require("venue")?;
    let c_cit = table.require("citations")?;
    let mut meta: BTreeMap<String, (i32, String, u64)> = BTreeMap::new();
    for row in &table.rows {
        let year = row
            .get(c_year)
            .parse()
            .map_err(|_| table.err(row, format!("bad year {:?}", row.get(c_year))))?;
        let citations = row
            .get(c_cit)
            .parse()
            .map_err(|_| table.err(row, format!("bad citation count {:?}", row.get(c_cit))))?;
        let id = row.get(c_id).to_owned();
        if meta.insert(id.clone(), (year, row.get(c_venue).to_owned(), citations)).is_some() {
            return Err(table.err(row, format!("duplicate paper_id {id}")));
        }
    }
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "txt") {
            files.push(path);
        }
    }
    files.sort();
    let mut papers = Vec::with_capacity(files.len());
    for path in files {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::InvalidArgument(format!("bad file name {}", path.display())))?
            .to_owned();
        let (year, venue, citations) = meta.remove(&id).ok_or_else(|| {
            Error::InvalidArgument(format!("no metadata row for paper {id}"))
        })?;
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        papers.push(PaperRecord {
            paper_id: id,
            year,
            venue,
            text,
            citations,
            languages: BTreeSet::new(),
            citation_percentile: None,
        });
    }
    for id in meta.keys() {
        log::warn!("metadata row {id} has no text file");
    }
    Ok(papers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> Iso3 {
        Iso3::parse(s).unwrap()
    }

    fn entry(iso: &str, names: &[&str]) -> LexiconEntry {
        LexiconEntry {
            iso3: code(iso),
            names: names.iter().map(|s| s.to_string()).collect(),
            endonyms: Vec::new(),
            glottocode: None,
        }
    }

    fn lexicon() -> MentionLexicon {
        let entries = [
            entry("tgl", &["Tagalog"]),
            entry("shx", &["She"]),
            entry("eve", &["Even"]),
            entry("mlf", &["Male"]),
            entry("arb", &["Standard Arabic", "Modern Standard Arabic"]),
            entry("are", &["Western Arrarnta"]),
            entry("nci", &["Classical Nahuatl"]),
        ];
        MentionLexicon::new(&entries, DEFAULT_DENYLIST)
    }

    #[test]
    fn name_and_code() {
        assert_eq!(
            scan_languages("experiments on Tagalog and tgl data", &lexicon()),
            BTreeSet::from([code("tgl")])
        );
    }

    #[test]
    fn denylisted_forms_never_match() {
        assert!(scan_languages("She said the labels are even male", &lexicon()).is_empty());
        assert!(scan_languages("SHE, Even; MALE. Are", &lexicon()).is_empty());
    }

    #[test]
    fn whole_tokens_only() {
        let lex = lexicon();
        assert!(scan_languages("Tagalogs tglx xtgl", &lex).is_empty());
        assert_eq!(scan_languages("(tgl)", &lex), BTreeSet::from([code("tgl")]));
        // codes are case-sensitive, names are not
        assert!(scan_languages("TGL", &lex).is_empty());
        assert_eq!(scan_languages("TAGALOG", &lex).len(), 1);
    }

    #[test]
    fn multi_word_names() {
        let lex = lexicon();
        assert_eq!(
            scan_languages("results on modern  standard\nArabic", &lex),
            BTreeSet::from([code("arb")])
        );
        assert!(scan_languages("a standard approach to Arabic", &lex).is_empty());
        assert!(scan_languages("Classical", &lex).is_empty());
    }

    #[test]
    fn longest_name_wins() {
        let entries = [
            entry("ara", &["Arabic"]),
            entry("arz", &["Egyptian Arabic"]),
            entry("ary", &["Moroccan Arabic"]),
        ];
        let lex = MentionLexicon::new(&entries, DEFAULT_DENYLIST);
        assert_eq!(
            scan_languages("Egyptian Arabic and Moroccan Arabic", &lex),
            BTreeSet::from([code("arz"), code("ary")])
        );
        assert_eq!(
            scan_languages("Egyptian Arabic versus Arabic", &lex),
            BTreeSet::from([code("arz"), code("ara")])
        );
    }

    #[test]
    fn endonyms_with_combining_marks() {
        let mut e = entry("hin", &["Hindi"]);
        e.endonyms = vec!["हिन्दी".into()];
        let lex = MentionLexicon::new(&[e], DEFAULT_DENYLIST);
        assert_eq!(scan_languages("हिन्दी भाषा।", &lex), BTreeSet::from([code("hin")]));
        assert!(scan_languages("हिन्", &lex).is_empty());
    }

    #[test]
    fn scanning_ignores_token_order_and_repeats() {
        let lex = lexicon();
        let a = scan_languages("Tagalog Classical Nahuatl", &lex);
        let b = scan_languages("Classical Nahuatl Tagalog Tagalog", &lex);
        assert_eq!(a, b);
    }

    #[test]
    fn percentile_examples() {
        assert_eq!(percentile_ranks(&[7]).unwrap(), [0.5]);
        assert_eq!(percentile_ranks(&[3, 3, 3]).unwrap(), [0.5, 0.5, 0.5]);
        assert_eq!(percentile_ranks(&[1, 2, 3, 4]).unwrap(), [0.125, 0.375, 0.625, 0.875]);
        assert_eq!(percentile_ranks(&[4, 1, 3, 2]).unwrap(), [0.875, 0.125, 0.625, 0.375]);
        assert!(matches!(percentile_ranks(&[]), Err(Error::EmptyGroup)));
    }

    fn paper(id: &str, year: i32, venue: &str, citations: u64, langs: &[&str]) -> PaperRecord {
        PaperRecord {
            paper_id: id.into(),
            year,
            venue: venue.into(),
            text: String::new(),
            citations,
            languages: langs.iter().map(|l| code(l)).collect(),
            citation_percentile: None,
        }
    }

    #[test]
    fn groups_are_independent() {
        let mut papers = vec![
            paper("a", 2019, "acl", 10, &[]),
            paper("b", 2019, "acl", 20, &[]),
            paper("c", 2020, "acl", 5, &[]),
        ];
        citation_percentiles(&mut papers).unwrap();
        let before = papers[2].citation_percentile;
        papers.push(paper("d", 2019, "acl", 30, &[]));
        citation_percentiles(&mut papers).unwrap();
        assert_eq!(papers[2].citation_percentile, before);
        assert_eq!(before, Some(0.5));
    }

    #[test]
    fn perfectly_increasing_correlation() {
        let mut papers: Vec<PaperRecord> = (0..6)
            .map(|i| {
                let langs: Vec<String> = (0..=i).map(|k| format!("a{}{}", (b'a' + k as u8) as char, 'a')).collect();
                let refs: Vec<&str> = langs.iter().map(String::as_str).collect();
                paper(&format!("p{i}"), 2020, "acl", i as u64 * 10, &refs)
            })
            .collect();
        citation_percentiles(&mut papers).unwrap();
        let report = languages_vs_citations_summary(&papers).unwrap();
        assert_eq!(report.spearman, Some(1.0));
        assert_eq!(report.groups.len(), 6);
    }

    #[test]
    fn correlation_needs_three_papers() {
        let mut papers = vec![paper("a", 2019, "acl", 1, &[]), paper("b", 2019, "acl", 2, &[])];
        citation_percentiles(&mut papers).unwrap();
        assert!(matches!(
            languages_vs_citations_summary(&papers),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn spearman_basics() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), Some(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&[1.0, 1.0, 1.0], &[3.0, 2.0, 1.0]), None);
        let r = spearman(&[1.0, 2.0, 2.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!(r > 0.9 && r < 1.0);
    }
}
