//! Knowledge-base profiles, property bindings, lexicons and gold grounding maps.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::{Iri, XSD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KbName {
    Wikidata,
    Dbpedia,
}

impl fmt::Display for KbName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KbName::Wikidata => "wikidata",
            KbName::Dbpedia => "dbpedia",
        })
    }
}

impl FromStr for KbName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "wikidata" | "wd" => Ok(KbName::Wikidata),
            "dbpedia" | "dbp" => Ok(KbName::Dbpedia),
            other => Err(format!(
                "unknown knowledge base `{other}` (expected wikidata or dbpedia)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Reification {
    StatementNodes,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbProfile {
    pub name: KbName,
    /// `(prefix, namespace)` pairs in declaration order.
    pub prefixes: Vec<(String, String)>,
    pub birthdate: Iri,
    /// Entity-level interval properties, for things like wars or offices
    /// that carry their own start and end dates.
    pub entity_start: Iri,
    pub entity_end: Iri,
    pub reification: Reification,
}

const WD: &str = "http://www.wikidata.org/entity/";
const WDT: &str = "http://www.wikidata.org/prop/direct/";
const P: &str = "http://www.wikidata.org/prop/";
const PS: &str = "http://www.wikidata.org/prop/statement/";
const PQ: &str = "http://www.wikidata.org/prop/qualifier/";
const DBO: &str = "http://dbpedia.org/ontology/";
const DBR: &str = "http://dbpedia.org/resource/";

fn iri(s: String) -> Iri {
    Iri::new(s).expect("built-in IRIs are valid")
}

/// Prefixes understood by the SPARQL parser when a query does not declare them.
pub fn default_prefixes() -> Vec<(String, String)> {
    let mut out = KbProfile::wikidata().prefixes;
    out.extend(
        KbProfile::dbpedia()
            .prefixes
            .into_iter()
            .filter(|(p, _)| p != "xsd"),
    );
    out.push((
        "rdf".into(),
        "http://www.w3.org/1999/02/22-rdf-syntax-ns#".into(),
    ));
    out.push((
        "rdfs".into(),
        "http://www.w3.org/2000/01/rdf-schema#".into(),
    ));
    out
}

impl KbProfile {
    pub fn wikidata() -> Self {
        let prefixes = [
            ("wd", WD),
            ("wdt", WDT),
            ("p", P),
            ("ps", PS),
            ("pq", PQ),
            ("xsd", XSD),
        ];
        KbProfile {
            name: KbName::Wikidata,
            prefixes: prefixes
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            birthdate: iri(format!("{WDT}P569")),
            entity_start: iri(format!("{WDT}P580")),
            entity_end: iri(format!("{WDT}P582")),
            reification: Reification::StatementNodes,
        }
    }

    pub fn dbpedia() -> Self {
        let prefixes = [("dbo", DBO), ("dbr", DBR), ("xsd", XSD)];
        KbProfile {
            name: KbName::Dbpedia,
            prefixes: prefixes
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            birthdate: iri(format!("{DBO}birthDate")),
            entity_start: iri(format!("{DBO}startDate")),
            entity_end: iri(format!("{DBO}endDate")),
            reification: Reification::None,
        }
    }

    pub fn by_name(name: KbName) -> Self {
        match name {
            KbName::Wikidata => Self::wikidata(),
            KbName::Dbpedia => Self::dbpedia(),
        }
    }

    fn namespace(&self, prefix: &str) -> Option<&str> {
        self.prefixes
            .iter()
            .find(|(p, _)| p == prefix)
            .map(|(_, ns)| ns.as_str())
    }

    /// Expands `wd:Q1`-style names; absolute IRIs must live in one of the
    /// profile's namespaces.
    pub fn expand(&self, name: &str) -> Result<Iri, GroundError> {
        let mismatch = || GroundError::ProfileMismatch {
            kb: self.name,
            detail: format!("`{name}` is outside the {} prefix table", self.name),
        };
        let name = name.trim().trim_start_matches('<').trim_end_matches('>');
        if let Some((prefix, local)) = name.split_once(':') {
            if !local.starts_with("//") {
                let ns = self.namespace(prefix).ok_or_else(mismatch)?;
                return Iri::new(format!("{ns}{local}")).map_err(|_| mismatch());
            }
        }
        if self
            .prefixes
            .iter()
            .any(|(_, ns)| name.starts_with(ns.as_str()))
        {
            return Iri::new(name).map_err(|_| mismatch());
        }
        Err(mismatch())
    }

    fn property_local(&self, pid: &str) -> Result<String, GroundError> {
        let direct_ns = match self.name {
            KbName::Wikidata => WDT,
            KbName::Dbpedia => DBO,
        };
        if pid.contains(':') {
            let full = self.expand(pid)?;
            return full
                .as_str()
                .strip_prefix(direct_ns)
                .map(str::to_string)
                .ok_or_else(|| GroundError::ProfileMismatch {
                    kb: self.name,
                    detail: format!("property `{pid}` is not a direct property"),
                });
        }
        Ok(pid.to_string())
    }

    /// IRIs for a property binding under this profile.
    pub fn property_iris(&self, binding: &PropertyBinding) -> Result<PropertyIris, GroundError> {
        let local = self.property_local(&binding.pid)?;
        match self.name {
            KbName::Wikidata => {
                let (start, end) = match binding.qualifiers {
                    Qualifiers::StartEnd => (
                        Some(iri(format!("{PQ}P580"))),
                        Some(iri(format!("{PQ}P582"))),
                    ),
                    Qualifiers::PointInTime => (
                        Some(iri(format!("{PQ}P585"))),
                        Some(iri(format!("{PQ}P585"))),
                    ),
                    Qualifiers::None => (None, None),
                };
                let bad = |_| GroundError::ProfileMismatch {
                    kb: self.name,
                    detail: format!("`{}` is not a property id", binding.pid),
                };
                Ok(PropertyIris {
                    direct: Iri::new(format!("{WDT}{local}")).map_err(bad)?,
                    claim: binding.reified.then(|| iri(format!("{P}{local}"))),
                    statement_value: binding.reified.then(|| iri(format!("{PS}{local}"))),
                    qualifier_start: start.filter(|_| binding.reified),
                    qualifier_end: end.filter(|_| binding.reified),
                })
            }
            KbName::Dbpedia => {
                if binding.reified {
                    return Err(GroundError::ProfileMismatch {
                        kb: self.name,
                        detail: format!(
                            "`{}` requests statement nodes, which DBpedia does not have",
                            binding.pid
                        ),
                    });
                }
                Ok(PropertyIris {
                    direct: Iri::new(format!("{DBO}{local}")).map_err(|_| {
                        GroundError::ProfileMismatch {
                            kb: self.name,
                            detail: format!("`{}` is not a property name", binding.pid),
                        }
                    })?,
                    claim: None,
                    statement_value: None,
                    qualifier_start: None,
                    qualifier_end: None,
                })
            }
        }
    }

    /// Shortest `prefix:local` form, or `<iri>` when no prefix applies.
    pub fn compact(&self, iri: &Iri) -> String {
        compact_with(&self.prefixes, iri)
    }
}

pub(crate) fn is_pn_local(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
        && !s.ends_with('.')
        && !s.starts_with(['-', '.'])
}

pub fn compact_with(prefixes: &[(String, String)], iri: &Iri) -> String {
    prefixes
        .iter()
        .filter_map(|(p, ns)| {
            let local = iri.as_str().strip_prefix(ns.as_str())?;
            is_pn_local(local).then(|| (ns.len(), format!("{p}:{local}")))
        })
        .max_by_key(|(len, _)| *len)
        .map(|(_, s)| s)
        .unwrap_or_else(|| iri.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Qualifiers {
    StartEnd,
    PointInTime,
    #[default]
    None,
}

/// How a frame maps to a KB property.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PropertyBinding {
    /// Property id such as `P39`, or a prefixed name such as `dbo:director`.
    pub pid: String,
    #[serde(default)]
    pub reified: bool,
    #[serde(default)]
    pub qualifiers: Qualifiers,
    /// Swap subject and object relative to the frame's argument order.
    #[serde(default)]
    pub inverse: bool,
}

/// Resolved IRIs of one binding.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PropertyIris {
    pub direct: Iri,
    pub claim: Option<Iri>,
    pub statement_value: Option<Iri>,
    pub qualifier_start: Option<Iri>,
    pub qualifier_end: Option<Iri>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum GroundError {
    #[error("no entity for `{surface}`{}", suggest(.suggestions))]
    UnlinkedEntity {
        surface: String,
        suggestions: Vec<String>,
    },
    #[error("no relation for `{frame}`{}", suggest(.suggestions))]
    UnlinkedRelation {
        frame: String,
        suggestions: Vec<String>,
    },
    #[error("profile mismatch for {kb}: {detail}")]
    ProfileMismatch { kb: KbName, detail: String },
    #[error("gold grounding has no entry for `{symbol}`")]
    MissingGold { symbol: String },
    #[error("cannot ground `{frame}` with {arity} arguments; give the lexicon a role signature")]
    Arity { frame: String, arity: usize },
    #[error("`{frame}` is used as a time interval but its binding has no qualifiers")]
    MissingQualifiers { frame: String },
    #[error("grounded expression is invalid: {0}")]
    Invalid(String),
}

fn suggest(s: &[String]) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!(" (did you mean: {})", s.join(", "))
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("surface form `{0}` is listed more than once after case folding")]
    DuplicateSurface(String),
    #[error("entity `{surface}` has IRI `{iri}`, which is not absolute or prefixed")]
    BadIri { surface: String, iri: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityEntry {
    pub iri: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseFolding {
    #[default]
    Lowercase,
    None,
}

impl CaseFolding {
    fn fold(self, s: &str) -> String {
        let s = s.split_whitespace().collect::<Vec<_>>().join(" ");
        match self {
            CaseFolding::Lowercase => s.to_lowercase(),
            CaseFolding::None => s,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconFile {
    #[serde(default)]
    pub entities: BTreeMap<String, EntityEntry>,
    /// Keys are a frame name, optionally with a role signature: `star-01(arg0,arg1)`.
    #[serde(default)]
    pub relations: BTreeMap<String, PropertyBinding>,
    #[serde(default)]
    pub case_folding: CaseFolding,
}

/// Dictionary entity and relation linker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    file: LexiconFile,
    index: HashMap<String, String>,
}

fn valid_iri_text(s: &str) -> bool {
    match s.split_once(':') {
        Some((p, rest)) => {
            !p.is_empty() && !rest.is_empty() && (rest.starts_with("//") || is_pn_local(rest))
        }
        None => false,
    }
}

impl Lexicon {
    pub fn new(file: LexiconFile) -> Result<Self, LexiconError> {
        let mut index = HashMap::new();
        for (surface, entry) in &file.entities {
            if !valid_iri_text(&entry.iri) {
                return Err(LexiconError::BadIri {
                    surface: surface.clone(),
                    iri: entry.iri.clone(),
                });
            }
            for form in std::iter::once(surface).chain(&entry.aliases) {
                let key = file.case_folding.fold(form);
                if index.insert(key.clone(), entry.iri.clone()).is_some() {
                    return Err(LexiconError::DuplicateSurface(key));
                }
            }
        }
        Ok(Lexicon { file, index })
    }

    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        Lexicon::new(serde_json::from_str(text)?)
    }

    pub fn file(&self) -> &LexiconFile {
        &self.file
    }

    pub fn entity(&self, surface: &str) -> Option<&str> {
        self.index
            .get(&self.file.case_folding.fold(surface))
            .map(String::as_str)
    }

    pub fn relation(&self, frame: &str, roles: &[&str]) -> Option<&PropertyBinding> {
        let sig = format!("{frame}({})", roles.join(","));
        self.file
            .relations
            .get(&sig)
            .or_else(|| self.file.relations.get(frame))
    }

    pub fn entity_suggestions(&self, surface: &str) -> Vec<String> {
        let key = self.file.case_folding.fold(surface);
        nearest(&key, self.index.keys().map(String::as_str))
    }

    pub fn relation_suggestions(&self, frame: &str) -> Vec<String> {
        nearest(frame, self.file.relations.keys().map(String::as_str))
    }
}

/// Up to three closest keys by Jaro-Winkler similarity.
pub(crate) fn nearest<'a>(key: &str, candidates: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut scored: Vec<(f64, &str)> = candidates
        .map(|c| (strsim::jaro_winkler(key, c), c))
        .filter(|(s, _)| *s >= 0.7)
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
    scored
        .into_iter()
        .take(3)
        .map(|(_, c)| c.to_string())
        .collect()
}

/// Ground-truth linking for one question. Entity keys are surface forms as
/// they appear in the lambda expression (or variable names); relation keys
/// follow the lexicon's key syntax.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldGrounding {
    #[serde(default)]
    pub entities: BTreeMap<String, String>,
    #[serde(default)]
    pub relations: BTreeMap<String, PropertyBinding>,
}

impl GoldGrounding {
    pub fn entity(&self, surface: &str) -> Option<&str> {
        self.entities
            .get(surface)
            .or_else(|| {
                let folded = surface.to_lowercase();
                self.entities
                    .iter()
                    .find(|(k, _)| k.to_lowercase() == folded)
                    .map(|(_, v)| v)
            })
            .map(String::as_str)
    }

    pub fn relation(&self, frame: &str, roles: &[&str]) -> Option<&PropertyBinding> {
        let sig = format!("{frame}({})", roles.join(","));
        self.relations
            .get(&sig)
            .or_else(|| self.relations.get(frame))
    }
}
