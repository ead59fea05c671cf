//! RDF terms shared by the store, the SPARQL AST and the endpoint client.

use std::cmp::Ordering;
use std::fmt;

use chrono::{DateTime, Datelike, Months, NaiveDate, NaiveDateTime, TimeDelta, Utc};
use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("invalid IRI `{0}`")]
    Iri(String),
    #[error("invalid {datatype} literal `{lexical}`")]
    Literal { lexical: String, datatype: String },
}

/// Absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(s: impl Into<String>) -> Result<Self, TermError> {
        let s = s.into();
        let scheme_ok = s.split_once(':').is_some_and(|(scheme, rest)| {
            !rest.is_empty()
                && scheme.starts_with(|c: char| c.is_ascii_alphabetic())
                && scheme
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c))
        });
        let chars_ok = !s
            .chars()
            .any(|c| c.is_whitespace() || "<>\"{}|^`\\".contains(c));
        if scheme_ok && chars_ok {
            Ok(Iri(s))
        } else {
            Err(TermError::Iri(s))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Iri {
    type Error = TermError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Iri::new(s)
    }
}

impl From<Iri> for String {
    fn from(i: Iri) -> String {
        i.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// xsd:duration split into a month part and a seconds part, which is all
/// calendar addition needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Duration {
    pub months: i64,
    pub seconds: i64,
}

impl Duration {
    pub fn years(n: i64) -> Self {
        Duration {
            months: n * 12,
            seconds: 0,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let (neg, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s),
        };
        let rest = rest.strip_prefix('P')?;
        let (date_part, time_part) = match rest.split_once('T') {
            Some((d, t)) if !t.is_empty() => (d, Some(t)),
            Some(_) => return None,
            None => (rest, None),
        };
        let mut months = 0i64;
        let mut seconds = 0i64;
        let mut any = false;
        let mut scan = |part: &str, units: &[(char, i64, bool)]| -> Option<()> {
            let mut num = String::new();
            let mut next_unit = 0;
            for c in part.chars() {
                if c.is_ascii_digit() {
                    num.push(c);
                    continue;
                }
                let idx = units[next_unit..].iter().position(|(u, _, _)| *u == c)? + next_unit;
                if num.is_empty() {
                    return None;
                }
                let n: i64 = num.parse().ok()?;
                let (_, factor, is_month) = units[idx];
                if is_month {
                    months = months.checked_add(n.checked_mul(factor)?)?;
                } else {
                    seconds = seconds.checked_add(n.checked_mul(factor)?)?;
                }
                num.clear();
                next_unit = idx + 1;
                any = true;
            }
            num.is_empty().then_some(())
        };
        scan(
            date_part,
            &[('Y', 12, true), ('M', 1, true), ('D', 86_400, false)],
        )?;
        if let Some(t) = time_part {
            scan(t, &[('H', 3600, false), ('M', 60, false), ('S', 1, false)])?;
        }
        if !any {
            return None;
        }
        Some(if neg {
            Duration {
                months: -months,
                seconds: -seconds,
            }
        } else {
            Duration { months, seconds }
        })
    }

    /// Adds to an instant: months first with end-of-month clamping, then seconds.
    pub fn add_to(&self, t: DateTime<Utc>) -> Option<DateTime<Utc>> {
        let shifted = if self.months >= 0 {
            t.checked_add_months(Months::new(u32::try_from(self.months).ok()?))?
        } else {
            t.checked_sub_months(Months::new(u32::try_from(-self.months).ok()?))?
        };
        shifted.checked_add_signed(TimeDelta::try_seconds(self.seconds)?)
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Mixed signs have no xsd form; they never arise from parsing.
        let neg = self.months < 0 || self.seconds < 0;
        let months = self.months.unsigned_abs();
        let secs = self.seconds.unsigned_abs();
        if neg {
            f.write_str("-")?;
        }
        f.write_str("P")?;
        let (y, m) = (months / 12, months % 12);
        let (d, rem) = (secs / 86_400, secs % 86_400);
        let (h, mi, s) = (rem / 3600, rem % 3600 / 60, rem % 60);
        if y > 0 {
            write!(f, "{y}Y")?;
        }
        if m > 0 {
            write!(f, "{m}M")?;
        }
        if d > 0 {
            write!(f, "{d}D")?;
        }
        if h > 0 || mi > 0 || s > 0 {
            f.write_str("T")?;
            if h > 0 {
                write!(f, "{h}H")?;
            }
            if mi > 0 {
                write!(f, "{mi}M")?;
            }
            if s > 0 {
                write!(f, "{s}S")?;
            }
        }
        if months == 0 && secs == 0 {
            f.write_str("T0S")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    String(String),
    LangString {
        value: String,
        lang: String,
    },
    Integer(i64),
    Decimal(OrderedFloat<f64>),
    Boolean(bool),
    DateTime(DateTime<Utc>),
    Duration(Duration),
    /// Any datatype outside the ones above, kept verbatim.
    Typed {
        lexical: String,
        datatype: Iri,
    },
}

fn parse_datetime(s: &str) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    let s = s.strip_suffix('Z').unwrap_or(s);
    if let Ok(t) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f") {
        return Some(t.and_utc());
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .map(|d| d.and_hms_opt(0, 0, 0).expect("midnight").and_utc())
}

pub fn format_datetime(t: &DateTime<Utc>) -> String {
    let y = t.year();
    let year = if (0..=9999).contains(&y) {
        format!("{y:04}")
    } else if y < 0 {
        format!("-{:04}", -y)
    } else {
        y.to_string()
    };
    format!("{year}-{}", t.format("%m-%dT%H:%M:%SZ"))
}

fn format_decimal(x: f64) -> String {
    let s = format!("{x}");
    if s.contains(['.', 'e', 'E']) || !x.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

impl Literal {
    pub fn date(y: i32, m: u32, d: u32) -> Option<Self> {
        NaiveDate::from_ymd_opt(y, m, d)
            .map(|d| Literal::DateTime(d.and_hms_opt(0, 0, 0).expect("midnight").and_utc()))
    }

    /// Builds a literal from its lexical form and datatype IRI.
    pub fn from_lexical(lexical: &str, datatype: &str) -> Result<Self, TermError> {
        let bad = || TermError::Literal {
            lexical: lexical.to_string(),
            datatype: datatype.to_string(),
        };
        let Some(local) = datatype.strip_prefix(XSD) else {
            return Ok(Literal::Typed {
                lexical: lexical.to_string(),
                datatype: Iri::new(datatype).map_err(|_| bad())?,
            });
        };
        Ok(match local {
            "string" => Literal::String(lexical.to_string()),
            "integer" | "int" | "long" | "short" | "nonNegativeInteger" | "positiveInteger" => {
                Literal::Integer(lexical.trim().parse().map_err(|_| bad())?)
            }
            "decimal" | "double" | "float" => {
                let x: f64 = lexical.trim().parse().map_err(|_| bad())?;
                Literal::Decimal(OrderedFloat(x))
            }
            "boolean" => match lexical.trim() {
                "true" | "1" => Literal::Boolean(true),
                "false" | "0" => Literal::Boolean(false),
                _ => return Err(bad()),
            },
            "dateTime" | "date" | "dateTimeStamp" => {
                Literal::DateTime(parse_datetime(lexical.trim()).ok_or_else(bad)?)
            }
            "duration" | "yearMonthDuration" | "dayTimeDuration" => {
                Literal::Duration(Duration::parse(lexical.trim()).ok_or_else(bad)?)
            }
            _ => Literal::Typed {
                lexical: lexical.to_string(),
                datatype: Iri::new(datatype).map_err(|_| bad())?,
            },
        })
    }

    pub fn lexical(&self) -> String {
        match self {
            Literal::String(s) => s.clone(),
            Literal::LangString { value, .. } => value.clone(),
            Literal::Integer(i) => i.to_string(),
            Literal::Decimal(x) => format_decimal(x.0),
            Literal::Boolean(b) => b.to_string(),
            Literal::DateTime(t) => format_datetime(t),
            Literal::Duration(d) => d.to_string(),
            Literal::Typed { lexical, .. } => lexical.clone(),
        }
    }

    pub fn datatype(&self) -> String {
        let local = match self {
            Literal::String(_) => "string",
            Literal::LangString { .. } => {
                return "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString".into()
            }
            Literal::Integer(_) => "integer",
            Literal::Decimal(_) => "decimal",
            Literal::Boolean(_) => "boolean",
            Literal::DateTime(_) => "dateTime",
            Literal::Duration(_) => "duration",
            Literal::Typed { datatype, .. } => return datatype.as_str().to_string(),
        };
        format!("{XSD}{local}")
    }

    pub(crate) fn numeric(&self) -> Option<f64> {
        match self {
            Literal::Integer(i) => Some(*i as f64),
            Literal::Decimal(x) => Some(x.0),
            _ => None,
        }
    }

    /// Value comparison as used by FILTER; `None` when the two are not comparable.
    pub fn compare(&self, other: &Literal) -> Option<Ordering> {
        match (self, other) {
            (Literal::Integer(a), Literal::Integer(b)) => Some(a.cmp(b)),
            (a, b) if a.numeric().is_some() && b.numeric().is_some() => {
                a.numeric()?.partial_cmp(&b.numeric()?)
            }
            (Literal::String(a), Literal::String(b)) => Some(a.cmp(b)),
            (
                Literal::LangString { value: a, lang: la },
                Literal::LangString { value: b, lang: lb },
            ) if la == lb => Some(a.cmp(b)),
            (Literal::Boolean(a), Literal::Boolean(b)) => Some(a.cmp(b)),
            (Literal::DateTime(a), Literal::DateTime(b)) => Some(a.cmp(b)),
            (Literal::Duration(a), Literal::Duration(b)) if a.seconds == 0 && b.seconds == 0 => {
                Some(a.months.cmp(&b.months))
            }
            (Literal::Duration(a), Literal::Duration(b)) if a.months == 0 && b.months == 0 => {
                Some(a.seconds.cmp(&b.seconds))
            }
            (
                Literal::Typed {
                    lexical: a,
                    datatype: da,
                },
                Literal::Typed {
                    lexical: b,
                    datatype: db,
                },
            ) if da == db => (a == b).then_some(Ordering::Equal),
            _ => None,
        }
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn quote(s: &str) -> String {
    format!("\"{}\"", escape(s))
}

impl fmt::Display for Literal {
    /// N-Triples form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::String(s) => f.write_str(&quote(s)),
            Literal::LangString { value, lang } => write!(f, "{}@{lang}", quote(value)),
            other => write!(f, "{}^^<{}>", quote(&other.lexical()), other.datatype()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RdfTerm {
    Iri(Iri),
    Literal(Literal),
}

impl RdfTerm {
    pub fn iri(s: &str) -> Result<Self, TermError> {
        Iri::new(s).map(RdfTerm::Iri)
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            RdfTerm::Iri(i) => Some(i),
            RdfTerm::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            RdfTerm::Literal(l) => Some(l),
            RdfTerm::Iri(_) => None,
        }
    }

    /// Canonical N-Triples text; used for deterministic tie breaking.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for RdfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RdfTerm::Iri(i) => write!(f, "{i}"),
            RdfTerm::Literal(l) => write!(f, "{l}"),
        }
    }
}

/// Total order used by ORDER BY: unbound first, then IRIs, then literals;
/// comparable literals by value, everything else by canonical text.
pub fn order_terms(a: Option<&RdfTerm>, b: Option<&RdfTerm>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(RdfTerm::Iri(x)), Some(RdfTerm::Iri(y))) => x.cmp(y),
        (Some(RdfTerm::Iri(_)), Some(RdfTerm::Literal(_))) => Ordering::Less,
        (Some(RdfTerm::Literal(_)), Some(RdfTerm::Iri(_))) => Ordering::Greater,
        (Some(RdfTerm::Literal(x)), Some(RdfTerm::Literal(y))) => match x.compare(y) {
            Some(Ordering::Equal) | None => x.to_string().cmp(&y.to_string()),
            Some(o) => o,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dt(s: &str) -> DateTime<Utc> {
        parse_datetime(s).unwrap()
    }

    #[test]
    fn duration_parse_and_display() {
        assert_eq!(Duration::parse("P13Y"), Some(Duration::years(13)));
        assert_eq!(
            Duration::parse("P1Y2M3DT4H5M6S").unwrap().to_string(),
            "P1Y2M3DT4H5M6S"
        );
        assert_eq!(Duration::parse("P14M").unwrap().to_string(), "P1Y2M");
        assert_eq!(Duration::parse("-P1D").unwrap().seconds, -86_400);
        for bad in ["P", "13Y", "PT", "P1H", "PY", "P1M1Y"] {
            assert_eq!(Duration::parse(bad), None, "{bad}");
        }
    }

    #[test]
    fn leap_day_clamps() {
        let t = Duration::years(13)
            .add_to(dt("2000-02-29T00:00:00Z"))
            .unwrap();
        assert_eq!(format_datetime(&t), "2013-02-28T00:00:00Z");
        let t = Duration::years(4)
            .add_to(dt("2000-02-29T00:00:00Z"))
            .unwrap();
        assert_eq!(format_datetime(&t), "2004-02-29T00:00:00Z");
        let t = Duration {
            months: 1,
            seconds: 0,
        }
        .add_to(dt("2001-01-31T00:00:00Z"))
        .unwrap();
        assert_eq!(format_datetime(&t), "2001-02-28T00:00:00Z");
    }

    #[test]
    fn literal_round_trip_lexical() {
        let l = Literal::from_lexical("1997-12-19T00:00:00Z", &format!("{XSD}dateTime")).unwrap();
        assert_eq!(l.lexical(), "1997-12-19T00:00:00Z");
        let l = Literal::from_lexical("1997-12-19", &format!("{XSD}date")).unwrap();
        assert_eq!(l, Literal::date(1997, 12, 19).unwrap());
        assert!(Literal::from_lexical("19-12-1997", &format!("{XSD}dateTime")).is_err());
        assert!(Literal::from_lexical("x", &format!("{XSD}integer")).is_err());
        assert_eq!(Literal::Decimal(OrderedFloat(2.0)).lexical(), "2.0");
    }

    #[test]
    fn comparisons() {
        let a = Literal::Integer(2);
        let b = Literal::Decimal(OrderedFloat(2.5));
        assert_eq!(a.compare(&b), Some(Ordering::Less));
        assert_eq!(a.compare(&Literal::String("2".into())), None);
        assert_eq!(
            order_terms(None, Some(&RdfTerm::Literal(a.clone()))),
            Ordering::Less
        );
    }

    #[test]
    fn iri_validation() {
        assert!(Iri::new("http://www.wikidata.org/entity/Q1").is_ok());
        assert!(Iri::new("Q1").is_err());
        assert!(Iri::new("http://x y").is_err());
    }
}
