//! Grounding: KB-agnostic lambda expressions to KB-specific ones.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::kb::{
    compact_with, default_prefixes, GoldGrounding, GroundError, KbProfile, Lexicon,
    PropertyBinding, PropertyIris,
};
use crate::lambda::{
    Abstraction, Atom, Binder, CalendarDate, CmpOp, Expr, IntervalVar, LambdaExpr, Operand,
    Predicate, Term, Var,
};
use crate::rdf::{Iri, Literal};

/// Subject or object of a grounded predicate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KbTerm {
    Var(Var),
    Iri(Iri),
    Number(String),
}

impl KbTerm {
    fn pretty(&self) -> String {
        match self {
            KbTerm::Var(v) => v.to_string(),
            KbTerm::Iri(i) => compact_with(&default_prefixes(), i),
            KbTerm::Number(n) => n.clone(),
        }
    }

    pub fn literal(&self) -> Option<Literal> {
        match self {
            KbTerm::Number(n) => Some(match n.parse::<i64>() {
                Ok(i) => Literal::Integer(i),
                Err(_) => Literal::Decimal(n.parse::<f64>().ok()?.into()),
            }),
            _ => None,
        }
    }
}

/// Where an interval's start and end come from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntervalSource {
    /// Qualifiers on a statement node (reified property).
    Statement {
        statement: Var,
        start: Iri,
        end: Iri,
    },
    /// A date value used as a point interval (non-reified property).
    Value { value: KbTerm },
    /// Start and end properties of the entity itself.
    Entity {
        entity: KbTerm,
        start: Iri,
        end: Iri,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "pred", rename_all = "snake_case")]
pub enum KbPredicate {
    Triple {
        binding: PropertyBinding,
        property: PropertyIris,
        subject: KbTerm,
        object: KbTerm,
        /// Statement node variable; present exactly when the binding is reified.
        statement: Option<Var>,
    },
    Interval {
        ivar: IntervalVar,
        source: IntervalSource,
    },
    Now {
        ivar: IntervalVar,
    },
    Date {
        ivar: IntervalVar,
        date: CalendarDate,
    },
    Teenager {
        ivar: IntervalVar,
        person: KbTerm,
        birth_property: Iri,
        birth_var: Var,
    },
    Overlap {
        left: IntervalVar,
        right: IntervalVar,
    },
    Before {
        left: IntervalVar,
        right: IntervalVar,
    },
    After {
        left: IntervalVar,
        right: IntervalVar,
    },
    Cmp {
        left: Var,
        right: Var,
        op: CmpOp,
    },
    Coordinate {
        cvar: Var,
        source: KbTerm,
    },
    South {
        left: Var,
        right: Var,
    },
}

pub type KbLambdaExpr = Expr<KbPredicate>;

fn term_binder(t: &KbTerm, out: &mut Vec<Binder>) {
    if let KbTerm::Var(v) = t {
        out.push(Binder::Var(v.clone()));
    }
}

impl Atom for KbPredicate {
    fn binders(&self) -> Vec<Binder> {
        let mut out = Vec::new();
        match self {
            KbPredicate::Triple {
                subject,
                object,
                statement,
                ..
            } => {
                if let Some(s) = statement {
                    out.push(Binder::Var(s.clone()));
                }
                term_binder(subject, &mut out);
                term_binder(object, &mut out);
            }
            KbPredicate::Interval { ivar, source } => {
                out.push(ivar.clone().into());
                match source {
                    IntervalSource::Statement { statement, .. } => {
                        out.push(Binder::Var(statement.clone()))
                    }
                    IntervalSource::Value { value } => term_binder(value, &mut out),
                    IntervalSource::Entity { entity, .. } => term_binder(entity, &mut out),
                }
            }
            KbPredicate::Now { ivar } | KbPredicate::Date { ivar, .. } => {
                out.push(ivar.clone().into())
            }
            KbPredicate::Teenager {
                ivar,
                person,
                birth_var,
                ..
            } => {
                out.push(ivar.clone().into());
                term_binder(person, &mut out);
                out.push(Binder::Var(birth_var.clone()));
            }
            KbPredicate::Overlap { left, right }
            | KbPredicate::Before { left, right }
            | KbPredicate::After { left, right } => {
                out.push(left.clone().into());
                out.push(right.clone().into());
            }
            KbPredicate::Cmp { left, right, .. } | KbPredicate::South { left, right } => {
                out.push(left.clone().into());
                out.push(right.clone().into());
            }
            KbPredicate::Coordinate { cvar, source } => {
                out.push(cvar.clone().into());
                term_binder(source, &mut out);
            }
        }
        out
    }

    fn pretty(&self) -> String {
        let c = |i: &Iri| compact_with(&default_prefixes(), i);
        match self {
            KbPredicate::Triple {
                property,
                subject,
                object,
                statement,
                ..
            } => match statement {
                Some(s) => format!(
                    "{}({s}, {}, {})",
                    c(property.claim.as_ref().unwrap_or(&property.direct)),
                    subject.pretty(),
                    object.pretty()
                ),
                None => format!(
                    "{}({}, {})",
                    c(&property.direct),
                    subject.pretty(),
                    object.pretty()
                ),
            },
            KbPredicate::Interval { ivar, source } => match source {
                IntervalSource::Statement { statement, .. } => {
                    format!("interval({ivar}, {statement})")
                }
                IntervalSource::Value { value } => format!("interval({ivar}, {})", value.pretty()),
                IntervalSource::Entity { entity, .. } => {
                    format!("interval({ivar}, {})", entity.pretty())
                }
            },
            KbPredicate::Now { ivar } => format!("interval({ivar}, now())"),
            KbPredicate::Date { ivar, date } => format!(
                "interval({ivar}, date(\"{:02}-{:02}-{:04}\"))",
                date.day(),
                date.month(),
                date.year()
            ),
            KbPredicate::Teenager { ivar, person, .. } => {
                format!("teenager({ivar}, {})", person.pretty())
            }
            KbPredicate::Overlap { left, right } => format!("overlap({left}, {right})"),
            KbPredicate::Before { left, right } => format!("before({left}, {right})"),
            KbPredicate::After { left, right } => format!("after({left}, {right})"),
            KbPredicate::Cmp { left, right, op } => {
                format!("cmp({left}, {right}, {})", op.symbol())
            }
            KbPredicate::Coordinate { cvar, source } => {
                format!("coordinate({cvar}, {})", source.pretty())
            }
            KbPredicate::South { left, right } => format!("south({left}, {right})"),
        }
    }
}

/// Source of entity IRIs and property bindings.
pub trait Linker {
    /// IRI text (absolute or prefixed) for a surface form.
    fn entity(&self, surface: &str) -> Result<String, GroundError>;
    fn relation(&self, frame: &str, roles: &[&str]) -> Result<PropertyBinding, GroundError>;
}

impl Linker for Lexicon {
    fn entity(&self, surface: &str) -> Result<String, GroundError> {
        Lexicon::entity(self, surface)
            .map(str::to_string)
            .ok_or_else(|| GroundError::UnlinkedEntity {
                surface: surface.to_string(),
                suggestions: self.entity_suggestions(surface),
            })
    }

    fn relation(&self, frame: &str, roles: &[&str]) -> Result<PropertyBinding, GroundError> {
        Lexicon::relation(self, frame, roles)
            .cloned()
            .ok_or_else(|| GroundError::UnlinkedRelation {
                frame: frame.to_string(),
                suggestions: self.relation_suggestions(frame),
            })
    }
}

impl Linker for GoldGrounding {
    fn entity(&self, surface: &str) -> Result<String, GroundError> {
        GoldGrounding::entity(self, surface)
            .map(str::to_string)
            .ok_or_else(|| GroundError::MissingGold {
                symbol: surface.to_string(),
            })
    }

    fn relation(&self, frame: &str, roles: &[&str]) -> Result<PropertyBinding, GroundError> {
        GoldGrounding::relation(self, frame, roles)
            .cloned()
            .ok_or_else(|| GroundError::MissingGold {
                symbol: frame.to_string(),
            })
    }
}

/// Entities from one linker and relations from another, as in the
/// gold-entity and gold-relation ablations.
pub struct SplitLinker<'a> {
    pub entities: &'a dyn Linker,
    pub relations: &'a dyn Linker,
}

impl Linker for SplitLinker<'_> {
    fn entity(&self, surface: &str) -> Result<String, GroundError> {
        self.entities.entity(surface)
    }

    fn relation(&self, frame: &str, roles: &[&str]) -> Result<PropertyBinding, GroundError> {
        self.relations.relation(frame, roles)
    }
}

pub fn ground(e: &LambdaExpr, lex: &Lexicon, kb: &KbProfile) -> Result<KbLambdaExpr, GroundError> {
    ground_with(e, lex, kb)
}

pub fn ground_with_gold(
    e: &LambdaExpr,
    gold: &GoldGrounding,
    kb: &KbProfile,
) -> Result<KbLambdaExpr, GroundError> {
    ground_with(e, gold, kb)
}

pub fn ground_with(
    e: &LambdaExpr,
    linker: &dyn Linker,
    kb: &KbProfile,
) -> Result<KbLambdaExpr, GroundError> {
    let mut g = Grounder::new(e, linker, kb);
    for t in e.terms() {
        for a in t.atoms() {
            if let Predicate::Frame { .. } = a {
                g.frame(a)?;
            }
        }
    }
    let out = match e {
        Expr::Abstraction(a) => Expr::Abstraction(g.abstraction(a, &BTreeSet::new())?),
        Expr::Count(a) => Expr::Count(g.abstraction(a, &BTreeSet::new())?),
        Expr::Min {
            inner,
            offset,
            limit,
        } => Expr::Min {
            inner: g.abstraction(inner, &BTreeSet::new())?,
            offset: *offset,
            limit: *limit,
        },
        Expr::Max {
            inner,
            offset,
            limit,
        } => Expr::Max {
            inner: g.abstraction(inner, &BTreeSet::new())?,
            offset: *offset,
            limit: *limit,
        },
        Expr::ArgMin {
            target,
            key,
            offset,
            limit,
        } => {
            let (target, key) = g.keyed(target, key)?;
            Expr::ArgMin {
                target,
                key,
                offset: *offset,
                limit: *limit,
            }
        }
        Expr::ArgMax {
            target,
            key,
            offset,
            limit,
        } => {
            let (target, key) = g.keyed(target, key)?;
            Expr::ArgMax {
                target,
                key,
                offset: *offset,
                limit: *limit,
            }
        }
        Expr::BooleanQuery { body, .. } => {
            let body = g.term(body)?;
            let exists = crate::lambda::ordered_binders(&body);
            Expr::BooleanQuery { exists, body }
        }
    };
    out.validate().map_err(|v| {
        GroundError::Invalid(
            v.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        )
    })?;
    Ok(out)
}

#[derive(Clone)]
struct GroundedFrame {
    binding: PropertyBinding,
    property: PropertyIris,
    subject: KbTerm,
    object: KbTerm,
    statement: Option<Var>,
}

struct Grounder<'a> {
    linker: &'a dyn Linker,
    kb: &'a KbProfile,
    /// Keyed by the frame's pretty form so repeated atoms share fresh variables.
    frames: HashMap<String, GroundedFrame>,
    by_instance: HashMap<Var, GroundedFrame>,
    taken: HashSet<String>,
}

impl<'a> Grounder<'a> {
    fn new(e: &LambdaExpr, linker: &'a dyn Linker, kb: &'a KbProfile) -> Self {
        let mut taken = HashSet::new();
        for t in e.terms() {
            for b in t.binders() {
                taken.insert(b.name().to_string());
                if let Binder::Interval(i) = &b {
                    taken.insert(i.start_name());
                    taken.insert(i.end_name());
                }
            }
        }
        Grounder {
            linker,
            kb,
            frames: HashMap::new(),
            by_instance: HashMap::new(),
            taken,
        }
    }

    fn fresh(&mut self, base: &str) -> Var {
        let mut name = base.to_string();
        let mut n = 2;
        while self.taken.contains(&name) {
            name = format!("{base}{n}");
            n += 1;
        }
        self.taken.insert(name.clone());
        Var::new(name)
    }

    fn entity(&self, surface: &str) -> Result<Iri, GroundError> {
        let text = self.linker.entity(surface)?;
        self.kb.expand(&text)
    }

    fn operand(&self, o: &Operand) -> Result<KbTerm, GroundError> {
        Ok(match o {
            Operand::Var(v) => KbTerm::Var(v.clone()),
            Operand::Const(c) => KbTerm::Iri(self.entity(c)?),
            Operand::Number(n) => KbTerm::Number(n.to_string()),
        })
    }

    fn frame(&mut self, p: &Predicate) -> Result<GroundedFrame, GroundError> {
        let key = p.pretty();
        if let Some(f) = self.frames.get(&key) {
            return Ok(f.clone());
        }
        let Predicate::Frame {
            name,
            instance,
            args,
        } = p
        else {
            unreachable!("only frame predicates are grounded as triples")
        };
        let roles: Vec<&str> = args.iter().map(|a| a.role.as_str()).collect();
        let binding = self.linker.relation(name, &roles)?;
        let property = self.kb.property_iris(&binding)?;
        let base = instance
            .as_ref()
            .map(|v| v.as_str().to_string())
            .unwrap_or_else(|| "r".into());
        let (subject, object) = match args.as_slice() {
            [only] => (
                self.operand(&only.value)?,
                KbTerm::Var(self.fresh(&format!("x{base}"))),
            ),
            [s, o] => (self.operand(&s.value)?, self.operand(&o.value)?),
            _ => {
                return Err(GroundError::Arity {
                    frame: name.clone(),
                    arity: args.len(),
                })
            }
        };
        let (subject, object) = if binding.inverse {
            (object, subject)
        } else {
            (subject, object)
        };
        let statement = if binding.reified {
            Some(match instance {
                Some(v) => v.clone(),
                None => self.fresh(&format!("s{base}")),
            })
        } else {
            None
        };
        let g = GroundedFrame {
            binding,
            property,
            subject,
            object,
            statement,
        };
        self.frames.insert(key, g.clone());
        if let Some(v) = instance {
            self.by_instance
                .entry(v.clone())
                .or_insert_with(|| g.clone());
        }
        Ok(g)
    }

    fn interval_source(&mut self, source: &Operand) -> Result<IntervalSource, GroundError> {
        if let Operand::Var(v) = source {
            if let Some(f) = self.by_instance.get(v) {
                return match (
                    &f.statement,
                    &f.property.qualifier_start,
                    &f.property.qualifier_end,
                ) {
                    (Some(st), Some(start), Some(end)) => Ok(IntervalSource::Statement {
                        statement: st.clone(),
                        start: start.clone(),
                        end: end.clone(),
                    }),
                    (Some(_), _, _) => Err(GroundError::MissingQualifiers {
                        frame: f.binding.pid.clone(),
                    }),
                    (None, _, _) => Ok(IntervalSource::Value {
                        value: f.object.clone(),
                    }),
                };
            }
        }
        Ok(IntervalSource::Entity {
            entity: self.operand(source)?,
            start: self.kb.entity_start.clone(),
            end: self.kb.entity_end.clone(),
        })
    }

    fn predicate(&mut self, p: &Predicate) -> Result<Vec<KbPredicate>, GroundError> {
        Ok(vec![match p {
            Predicate::Frame { .. } => {
                let f = self.frame(p)?;
                KbPredicate::Triple {
                    binding: f.binding,
                    property: f.property,
                    subject: f.subject,
                    object: f.object,
                    statement: f.statement,
                }
            }
            Predicate::Interval { ivar, source } => KbPredicate::Interval {
                ivar: ivar.clone(),
                source: self.interval_source(source)?,
            },
            Predicate::Now { ivar } => KbPredicate::Now { ivar: ivar.clone() },
            Predicate::Date { ivar, date } => KbPredicate::Date {
                ivar: ivar.clone(),
                date: *date,
            },
            Predicate::Teenager { ivar, person } => {
                let birth_var = self.fresh(&format!("{ivar}Dob"));
                KbPredicate::Teenager {
                    ivar: ivar.clone(),
                    person: self.operand(person)?,
                    birth_property: self.kb.birthdate.clone(),
                    birth_var,
                }
            }
            Predicate::Overlap { left, right } => KbPredicate::Overlap {
                left: left.clone(),
                right: right.clone(),
            },
            Predicate::Before { left, right } => KbPredicate::Before {
                left: left.clone(),
                right: right.clone(),
            },
            Predicate::After { left, right } => KbPredicate::After {
                left: left.clone(),
                right: right.clone(),
            },
            Predicate::Cmp { left, right, op } => KbPredicate::Cmp {
                left: left.clone(),
                right: right.clone(),
                op: *op,
            },
            Predicate::Coordinate { cvar, source } => KbPredicate::Coordinate {
                cvar: cvar.clone(),
                source: self.operand(source)?,
            },
            Predicate::South { left, right } => KbPredicate::South {
                left: left.clone(),
                right: right.clone(),
            },
        }])
    }

    fn term(&mut self, t: &Term<Predicate>) -> Result<Term<KbPredicate>, GroundError> {
        t.try_map(&mut |p| self.predicate(p))
    }

    fn abstraction(
        &mut self,
        a: &Abstraction<Predicate>,
        outer: &BTreeSet<Binder>,
    ) -> Result<Abstraction<KbPredicate>, GroundError> {
        let body = self.term(&a.body)?;
        Ok(Abstraction::closed(a.bound.clone(), body, outer))
    }

    fn keyed(
        &mut self,
        target: &Abstraction<Predicate>,
        key: &Abstraction<Predicate>,
    ) -> Result<(Abstraction<KbPredicate>, Abstraction<KbPredicate>), GroundError> {
        let target = self.abstraction(target, &BTreeSet::new())?;
        let outer: BTreeSet<Binder> = target.bound.iter().chain(&target.exists).cloned().collect();
        let key = self.abstraction(key, &outer)?;
        Ok((target, key))
    }
}
