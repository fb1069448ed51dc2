//! Language registry: identities, speaker populations, attributed GDP and
//! macro-language structure.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tsv::{split_list, Table};

/// A lowercase three-letter ISO 639-3 code.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iso3([u8; 3]);

impl Iso3 {
    /// Parses a code, lowercasing it first.
    pub fn parse(code: &str) -> Result<Self> {
        let lower = code.trim().to_ascii_lowercase();
        let bytes = lower.as_bytes();
        if bytes.len() == 3 && bytes.iter().all(u8::is_ascii_lowercase) {
            Ok(Iso3([bytes[0], bytes[1], bytes[2]]))
        } else {
            Err(Error::InvalidCode(code.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        // Only ASCII lowercase bytes are ever stored.
        std::str::from_utf8(&self.0).expect("ascii code")
    }
}

impl FromStr for Iso3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Iso3::parse(s)
    }
}

impl TryFrom<String> for Iso3 {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Iso3::parse(&s)
    }
}

impl From<Iso3> for String {
    fn from(code: Iso3) -> String {
        code.as_str().to_owned()
    }
}

impl fmt::Display for Iso3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Iso3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Iso3({})", self.as_str())
    }
}

/// Which speaker count feeds demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PopulationBasis {
    #[default]
    Total,
    /// Population scaled by `1 - excluded_fraction` (speakers who do not
    /// already use English as a second language).
    ExcludingL2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanguageRecord {
    pub iso3: Iso3,
    pub names: Vec<String>,
    pub endonyms: Vec<String>,
    pub population: u64,
    /// Attributed GDP in USD; `None` when the source left it blank.
    pub gdp: Option<f64>,
    pub member_of: Option<Iso3>,
    pub excluded_fraction: f64,
}

impl LanguageRecord {
    pub fn new(iso3: Iso3, name: &str, population: u64) -> Self {
        LanguageRecord {
            iso3,
            names: vec![name.to_owned()],
            endonyms: Vec::new(),
            population,
            gdp: None,
            member_of: None,
            excluded_fraction: 0.0,
        }
    }

    pub fn name(&self) -> &str {
        self.names.first().map(String::as_str).unwrap_or(self.iso3.as_str())
    }

    pub fn gdp_or_zero(&self) -> f64 {
        self.gdp.unwrap_or(0.0)
    }

    pub fn effective_population(&self, basis: PopulationBasis) -> f64 {
        let n = self.population as f64;
        match basis {
            PopulationBasis::Total => n,
            PopulationBasis::ExcludingL2 => n * (1.0 - self.excluded_fraction),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountryStat {
    pub country_code: String,
    pub population: f64,
    pub gdp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageCountryShare {
    pub iso3: Iso3,
    pub country_code: String,
    pub speaker_count: f64,
}

/// Immutable after construction; lookups take `&self` only.
#[derive(Debug, Clone)]
pub struct Registry {
    records: BTreeMap<Iso3, LanguageRecord>,
    by_name: HashMap<String, BTreeSet<Iso3>>,
}

impl Registry {
    /// Builds a registry, rejecting duplicate codes and malformed
    /// macro-language structure.
    pub fn from_records(records: Vec<LanguageRecord>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for rec in records {
            validate_record(&rec)?;
            let code = rec.iso3;
            if map.insert(code, rec).is_some() {
                return Err(Error::DuplicateLanguage(code));
            }
        }
        check_membership(&map)?;
        Ok(Self::index(map))
    }

    fn index(records: BTreeMap<Iso3, LanguageRecord>) -> Self {
        let mut by_name: HashMap<String, BTreeSet<Iso3>> = HashMap::new();
        for rec in records.values() {
            for name in rec.names.iter().chain(&rec.endonyms) {
                by_name.entry(name.to_lowercase()).or_default().insert(rec.iso3);
            }
        }
        Registry { records, by_name }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_table(Table::open(path)?)
    }

    pub fn from_reader<R: Read>(name: &str, reader: R) -> Result<Self> {
        Self::from_table(Table::from_reader(name, reader)?)
    }

    fn from_table(table: Table) -> Result<Self> {
        let c_iso = table.require("iso3")?;
        let c_names = table.require("names")?;
        let c_endo = table.column("endonyms");
        let c_pop = table.require("population")?;
        let c_gdp = table.column("gdp");
        let c_member = table.column("member_of");
        let c_excl = table.column("excluded_fraction");

        let mut records: BTreeMap<Iso3, LanguageRecord> = BTreeMap::new();
        // Macro rows with a blank population are filled from their members.
        let mut blank_population = Vec::new();
        let mut lines = HashMap::new();
        for row in &table.rows {
            let iso3 =
                Iso3::parse(row.get(c_iso)).map_err(|e| table.err(row, e.to_string()))?;
            let pop_cell = row.get(c_pop);
            let population = if pop_cell.is_empty() {
                blank_population.push(iso3);
                0
            } else {
                let p = table.number(row, c_pop, "population")?;
                if p < 0.0 {
                    return Err(table.err(row, format!("negative population {p}")));
                }
                p.round() as u64
            };
            let gdp = match row.opt(c_gdp) {
                "" => None,
                _ => {
                    let g = table.number(row, c_gdp.unwrap(), "gdp")?;
                    if g < 0.0 {
                        return Err(table.err(row, format!("negative gdp {g}")));
                    }
                    Some(g)
                }
            };
            let member_of = match row.opt(c_member) {
                "" => None,
                code => Some(Iso3::parse(code).map_err(|e| table.err(row, e.to_string()))?),
            };
            let excluded_fraction = match row.opt(c_excl) {
                "" => 0.0,
                _ => {
                    let f = table.number(row, c_excl.unwrap(), "excluded_fraction")?;
                    if !(0.0..=1.0).contains(&f) {
                        return Err(table.err(row, format!("excluded_fraction {f} outside [0, 1]")));
                    }
                    f
                }
            };
            let rec = LanguageRecord {
                iso3,
                names: split_list(row.get(c_names)),
                endonyms: split_list(row.opt(c_endo)),
                population,
                gdp,
                member_of,
                excluded_fraction,
            };
            if records.insert(iso3, rec).is_some() {
                return Err(table.err(row, format!("duplicate language {iso3}")));
            }
            lines.insert(iso3, row.line);
        }
        check_membership(&records)?;

        for code in blank_population {
            let members: Vec<&LanguageRecord> =
                records.values().filter(|r| r.member_of == Some(code)).collect();
            if members.is_empty() {
                return Err(Error::parse(
                    &table.file,
                    lines[&code],
                    format!("population of {code} is blank and it has no members"),
                ));
            }
            let agg = aggregate_macrolanguage(code, &members)?;
            let rec = records.get_mut(&code).expect("present");
            rec.population = agg.population;
            if rec.gdp.is_none() {
                rec.gdp = agg.gdp;
            }
        }
        Ok(Self::index(records))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, code: Iso3) -> Option<&LanguageRecord> {
        self.records.get(&code)
    }

    /// Looks a language up by code only.
    pub fn lookup_code(&self, code: &str) -> Result<&LanguageRecord> {
        let iso = Iso3::parse(code).map_err(|_| Error::UnknownLanguage(code.to_owned()))?;
        self.get(iso).ok_or_else(|| Error::UnknownLanguage(code.to_owned()))
    }

    /// Finds the record whose code, name or endonym equals `query`
    /// case-insensitively. Codes win over names.
    pub fn resolve(&self, query: &str) -> Result<&LanguageRecord> {
        if let Ok(code) = Iso3::parse(query) {
            if let Some(rec) = self.records.get(&code) {
                return Ok(rec);
            }
        }
        match self.by_name.get(&query.trim().to_lowercase()) {
            Some(codes) if codes.len() == 1 => {
                Ok(&self.records[codes.iter().next().expect("one")])
            }
            Some(codes) => Err(Error::AmbiguousName {
                name: query.to_owned(),
                candidates: codes.iter().copied().collect(),
            }),
            None => Err(Error::UnknownLanguage(query.to_owned())),
        }
    }

    pub fn records(&self) -> impl Iterator<Item = &LanguageRecord> {
        self.records.values()
    }

    /// Top-level languages: every record that is not a member of a
    /// macro-language. Members are already counted in their macro's
    /// population, so including them would double-count speakers.
    pub fn universe(&self) -> Vec<&LanguageRecord> {
        self.records.values().filter(|r| r.member_of.is_none()).collect()
    }

    pub fn members_of(&self, macro_code: Iso3) -> Vec<&LanguageRecord> {
        self.records
            .values()
            .filter(|r| r.member_of == Some(macro_code))
            .collect()
    }

    /// Resolves a named subset: `<macro>-vernaculars` selects the members of
    /// a macro-language, otherwise a comma-separated list of codes or names.
    pub fn subset(&self, spec: &str) -> Result<Vec<&LanguageRecord>> {
        let spec = spec.trim();
        if let Some(head) = spec.strip_suffix("-vernaculars") {
            let macro_rec = self.resolve(head)?;
            let members = self.members_of(macro_rec.iso3);
            if members.is_empty() {
                return Err(Error::EmptyMemberSet(macro_rec.iso3));
            }
            return Ok(members);
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let rec = self.resolve(part)?;
            if !seen.insert(rec.iso3) {
                return Err(Error::DuplicateLanguage(rec.iso3));
            }
            out.push(rec);
        }
        if out.is_empty() {
            return Err(Error::EmptySubset);
        }
        out.sort_by_key(|r| r.iso3);
        Ok(out)
    }

    /// Fills blank GDP cells from country-level statistics. Languages that
    /// already carry a GDP value, or have no country shares, are untouched.
    pub fn attribute_gdp(
        &mut self,
        shares: &[LanguageCountryShare],
        countries: &[CountryStat],
    ) -> Result<()> {
        let with_shares: BTreeSet<Iso3> = shares.iter().map(|s| s.iso3).collect();
        for code in with_shares {
            let Some(rec) = self.records.get(&code) else {
                return Err(Error::UnknownLanguage(code.to_string()));
            };
            if rec.gdp.is_none() {
                let gdp = gdp_for_language(code, shares, countries)?;
                self.records.get_mut(&code).expect("present").gdp = Some(gdp);
            }
        }
        Ok(())
    }
}

fn validate_record(rec: &LanguageRecord) -> Result<()> {
    if let Some(g) = rec.gdp {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidArgument(format!("gdp of {} is {g}", rec.iso3)));
        }
    }
    if !(0.0..=1.0).contains(&rec.excluded_fraction) {
        return Err(Error::InvalidArgument(format!(
            "excluded_fraction of {} is {}",
            rec.iso3, rec.excluded_fraction
        )));
    }
    Ok(())
}

fn check_membership(records: &BTreeMap<Iso3, LanguageRecord>) -> Result<()> {
    for rec in records.values() {
        let Some(parent) = rec.member_of else { continue };
        if parent == rec.iso3 {
            return Err(Error::InvalidArgument(format!("{parent} is listed as its own member")));
        }
        match records.get(&parent) {
            None => return Err(Error::UnknownLanguage(parent.to_string())),
            Some(p) if p.member_of.is_some() => {
                return Err(Error::InvalidArgument(format!(
                    "{} is a member of {parent}, which is itself a member of {}",
                    rec.iso3,
                    p.member_of.expect("checked")
                )))
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// Combines member varieties into one macro-language record: populations and
/// GDP are summed. The result does not depend on member order.
pub fn aggregate_macrolanguage(
    macro_iso3: Iso3,
    members: &[&LanguageRecord],
) -> Result<LanguageRecord> {
    if members.is_empty() {
        return Err(Error::EmptyMemberSet(macro_iso3));
    }
    let mut sorted: Vec<&LanguageRecord> = members.to_vec();
    sorted.sort_by_key(|r| r.iso3);
    for m in &sorted {
        if m.member_of != Some(macro_iso3) {
            return Err(Error::NotAMember {
                member: m.iso3,
                macro_code: macro_iso3,
            });
        }
    }
    let population: u64 = sorted.iter().map(|m| m.population).sum();
    let gdp = if sorted.iter().any(|m| m.gdp.is_some()) {
        Some(sorted.iter().map(|m| m.gdp_or_zero()).sum())
    } else {
        None
    };
    let excluded_fraction = if population == 0 {
        0.0
    } else {
        sorted
            .iter()
            .map(|m| m.population as f64 * m.excluded_fraction)
            .sum::<f64>()
            / population as f64
    };
    Ok(LanguageRecord {
        iso3: macro_iso3,
        names: Vec::new(),
        endonyms: Vec::new(),
        population,
        gdp,
        member_of: None,
        excluded_fraction,
    })
}

/// Attributes country GDP to a language in proportion to the share of each
/// country's population that speaks it.
pub fn gdp_for_language(
    iso3: Iso3,
    shares: &[LanguageCountryShare],
    countries: &[CountryStat],
) -> Result<f64> {
    let mut total = 0.0;
    for share in shares.iter().filter(|s| s.iso3 == iso3) {
        let country = countries
            .iter()
            .find(|c| c.country_code.eq_ignore_ascii_case(&share.country_code))
            .ok_or_else(|| Error::UnknownCountry(share.country_code.clone()))?;
        if country.population <= 0.0 {
            return Err(Error::ZeroCountryPopulation(country.country_code.clone()));
        }
        total += share.speaker_count / country.population * country.gdp;
    }
    Ok(total)
}

pub fn load_countries(path: &Path) -> Result<Vec<CountryStat>> {
    let table = Table::open(path)?;
    let c_code = table.require("country_code")?;
    let c_pop = table.require("population")?;
    let c_gdp = table.require("gdp")?;
    let mut out = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let population = table.number(row, c_pop, "population")?;
        let gdp = table.number(row, c_gdp, "gdp")?;
        if population <= 0.0 {
            return Err(table.err(row, "country population must be positive"));
        }
        if gdp < 0.0 {
            return Err(table.err(row, "negative gdp"));
        }
        out.push(CountryStat {
            country_code: row.get(c_code).to_ascii_uppercase(),
            population,
            gdp,
        });
    }
    Ok(out)
}

pub fn load_language_countries(path: &Path) -> Result<Vec<LanguageCountryShare>> {
    let table = Table::open(path)?;
    let c_iso = table.require("iso3")?;
    let c_code = table.require("country_code")?;
    let c_count = table.require("speaker_count")?;
    let mut out = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let speaker_count = table.number(row, c_count, "speaker_count")?;
        if speaker_count < 0.0 {
            return Err(table.err(row, "negative speaker_count"));
        }
        out.push(LanguageCountryShare {
            iso3: Iso3::parse(row.get(c_iso)).map_err(|e| table.err(row, e.to_string()))?,
            country_code: row.get(c_code).to_ascii_uppercase(),
            speaker_count,
        });
    }
    Ok(out)
}
