use std::collections::HashMap;
use std::fmt;

use crate::ontology::{ConceptExpression, TBox, ValueKind};

use super::error::ReasonerError;
use super::interval::Interval;

pub type ConceptId = u32;
pub type RoleId = u32;
pub type AttrId = u32;

/// Axioms in normal form. Every position holds a concept name, either
/// declared or introduced during normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalAxiom {
    /// `A ⊑ B`
    Subsumption { sub: ConceptId, sup: ConceptId },
    /// `A1 ⊓ … ⊓ An ⊑ B`, n ≥ 2, conjuncts sorted and distinct
    Conjunction {
        conjuncts: Vec<ConceptId>,
        sup: ConceptId,
    },
    /// `A ⊑ ∃r.B`
    ExistsRight {
        sub: ConceptId,
        role: RoleId,
        filler: ConceptId,
    },
    /// `∃r.A ⊑ B`
    ExistsLeft {
        role: RoleId,
        filler: ConceptId,
        sup: ConceptId,
    },
    /// `A ⊑ attr(P, op, v)`, the restriction kept as an interval
    AttributeRight {
        sub: ConceptId,
        attribute: AttrId,
        interval: Interval,
    },
    /// `attr(P, op, v) ⊑ B`
    AttributeLeft {
        attribute: AttrId,
        interval: Interval,
        sup: ConceptId,
    },
}

/// Interned names of a TBox's signature.
#[derive(Debug, Clone, Default)]
pub(crate) struct Vocabulary {
    pub concepts: Vec<String>,
    pub concept_ids: HashMap<String, ConceptId>,
    pub capability: Vec<bool>,
    pub roles: Vec<String>,
    pub role_ids: HashMap<String, RoleId>,
    pub attributes: Vec<(String, ValueKind)>,
    pub attribute_ids: HashMap<String, AttrId>,
}

impl Vocabulary {
    fn of(tbox: &TBox) -> Self {
        let mut v = Vocabulary::default();
        for (i, c) in tbox.concepts().iter().enumerate() {
            v.concepts.push(c.clone());
            v.concept_ids.insert(c.clone(), i as ConceptId);
            v.capability.push(tbox.is_capability(c));
        }
        for (i, r) in tbox.roles().iter().enumerate() {
            v.roles.push(r.clone());
            v.role_ids.insert(r.clone(), i as RoleId);
        }
        for (i, (a, kind)) in tbox.attributes().iter().enumerate() {
            v.attributes.push((a.clone(), *kind));
            v.attribute_ids.insert(a.clone(), i as AttrId);
        }
        v
    }

    fn concept(&self, name: &str) -> Result<ConceptId, ReasonerError> {
        self.concept_ids
            .get(name)
            .copied()
            .ok_or_else(|| ReasonerError::undeclared(name))
    }

    fn role(&self, name: &str) -> Result<RoleId, ReasonerError> {
        self.role_ids
            .get(name)
            .copied()
            .ok_or_else(|| ReasonerError::undeclared(name))
    }

    fn attribute(&self, name: &str) -> Result<(AttrId, ValueKind), ReasonerError> {
        let id = *self
            .attribute_ids
            .get(name)
            .ok_or_else(|| ReasonerError::undeclared(name))?;
        Ok((id, self.attributes[id as usize].1))
    }
}

/// A TBox rewritten into normal-form axioms over interned ids.
///
/// Ids below [`named_count`](Self::named_count) are the declared concepts in
/// sorted order; the rest are fresh names, each standing for one complex
/// sub-expression of the input.
#[derive(Debug, Clone)]
pub struct NormalizedTBox {
    pub(crate) vocab: Vocabulary,
    fresh: Vec<ConceptExpression>,
    axioms: Vec<NormalAxiom>,
}

impl NormalizedTBox {
    pub fn axioms(&self) -> &[NormalAxiom] {
        &self.axioms
    }

    pub fn named_count(&self) -> usize {
        self.vocab.concepts.len()
    }

    pub fn concept_count(&self) -> usize {
        self.vocab.concepts.len() + self.fresh.len()
    }

    pub fn fresh_count(&self) -> usize {
        self.fresh.len()
    }

    pub fn role_count(&self) -> usize {
        self.vocab.roles.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.vocab.attributes.len()
    }

    pub fn concept_id(&self, name: &str) -> Option<ConceptId> {
        self.vocab.concept_ids.get(name).copied()
    }

    pub fn role_id(&self, name: &str) -> Option<RoleId> {
        self.vocab.role_ids.get(name).copied()
    }

    pub fn concept_name(&self, id: ConceptId) -> String {
        let i = id as usize;
        match self.vocab.concepts.get(i) {
            Some(name) => name.clone(),
            None => fresh_name(FRESH_PREFIX, i - self.vocab.concepts.len()),
        }
    }

    pub fn role_name(&self, id: RoleId) -> &str {
        &self.vocab.roles[id as usize]
    }

    pub fn attribute_name(&self, id: AttrId) -> &str {
        &self.vocab.attributes[id as usize].0
    }

    pub fn is_capability(&self, id: ConceptId) -> bool {
        self.vocab.capability.get(id as usize).copied().unwrap_or(false)
    }

    /// Fresh names with the sub-expression each one abbreviates.
    pub fn fresh_names(&self) -> impl Iterator<Item = (String, &ConceptExpression)> {
        self.fresh
            .iter()
            .enumerate()
            .map(|(i, e)| (fresh_name(FRESH_PREFIX, i), e))
    }

    pub fn display<'a>(&'a self, axiom: &'a NormalAxiom) -> impl fmt::Display + 'a {
        AxiomDisplay { tbox: self, axiom }
    }
}

struct AxiomDisplay<'a> {
    tbox: &'a NormalizedTBox,
    axiom: &'a NormalAxiom,
}

impl fmt::Display for AxiomDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.tbox;
        let c = |id: &ConceptId| t.concept_name(*id);
        let iv = |a: &AttrId, i: &Interval| {
            let lo = i
                .lower()
                .map(|b| format!("{}{}", if b.strict { "(" } else { "[" }, b.value))
                .unwrap_or_else(|| "(-inf".into());
            let hi = i
                .upper()
                .map(|b| format!("{}{}", b.value, if b.strict { ")" } else { "]" }))
                .unwrap_or_else(|| "+inf)".into());
            format!("{} ∈ {lo}, {hi}", t.attribute_name(*a))
        };
        match self.axiom {
            NormalAxiom::Subsumption { sub, sup } => write!(f, "{} ⊑ {}", c(sub), c(sup)),
            NormalAxiom::Conjunction { conjuncts, sup } => {
                let parts: Vec<String> = conjuncts.iter().map(c).collect();
                write!(f, "{} ⊑ {}", parts.join(" ⊓ "), c(sup))
            }
            NormalAxiom::ExistsRight { sub, role, filler } => {
                write!(f, "{} ⊑ ∃{}.{}", c(sub), t.role_name(*role), c(filler))
            }
            NormalAxiom::ExistsLeft { role, filler, sup } => {
                write!(f, "∃{}.{} ⊑ {}", t.role_name(*role), c(filler), c(sup))
            }
            NormalAxiom::AttributeRight {
                sub,
                attribute,
                interval,
            } => write!(f, "{} ⊑ {}", c(sub), iv(attribute, interval)),
            NormalAxiom::AttributeLeft {
                attribute,
                interval,
                sup,
            } => write!(f, "{} ⊑ {}", iv(attribute, interval), c(sup)),
        }
    }
}

pub(crate) const FRESH_PREFIX: &str = "$fresh";

fn fresh_name(prefix: &str, index: usize) -> String {
    format!("{prefix}{}", index + 1)
}

/// Rewrites `tbox` into normal form.
///
/// Each distinct complex sub-expression gets at most one fresh name, shared
/// by all its occurrences; names are numbered in order of first encounter, so
/// the result is deterministic.
pub fn normalize(tbox: &TBox) -> Result<NormalizedTBox, ReasonerError> {
    let vocab = Vocabulary::of(tbox);
    let mut n = Normalizer::new(&vocab, vocab.concepts.len() as ConceptId);
    for ax in tbox.axioms() {
        n.axiom(&ax.lhs, &ax.rhs)?;
    }
    let (fresh, axioms) = n.finish();
    Ok(NormalizedTBox {
        vocab,
        fresh,
        axioms,
    })
}

struct Entry {
    id: ConceptId,
    // whether `id ⊑ expr` resp. `expr ⊑ id` has been emitted
    positive: bool,
    negative: bool,
}

/// Structural transformation with polarity: a fresh name for an expression
/// on the right gets only `X ⊑ C`, one on the left only `C ⊑ X`.
pub(crate) struct Normalizer<'v> {
    vocab: &'v Vocabulary,
    first_fresh: ConceptId,
    fresh: Vec<ConceptExpression>,
    memo: HashMap<ConceptExpression, Entry>,
    axioms: Vec<NormalAxiom>,
}

impl<'v> Normalizer<'v> {
    pub fn new(vocab: &'v Vocabulary, first_fresh: ConceptId) -> Self {
        Normalizer {
            vocab,
            first_fresh,
            fresh: Vec::new(),
            memo: HashMap::new(),
            axioms: Vec::new(),
        }
    }

    pub fn finish(self) -> (Vec<ConceptExpression>, Vec<NormalAxiom>) {
        (self.fresh, self.axioms)
    }

    pub fn next_id(&self) -> ConceptId {
        self.first_fresh + self.fresh.len() as ConceptId
    }

    pub fn axiom(
        &mut self,
        lhs: &ConceptExpression,
        rhs: &ConceptExpression,
    ) -> Result<(), ReasonerError> {
        if let Some(sup) = rhs.as_named() {
            let sup = self.vocab.concept(sup)?;
            self.left(lhs, sup)
        } else {
            let sub = self.negative(lhs)?;
            self.right(sub, rhs)
        }
    }

    /// A name `X` with `X ⊑ expr`.
    pub fn positive(&mut self, expr: &ConceptExpression) -> Result<ConceptId, ReasonerError> {
        if let Some(n) = expr.as_named() {
            return self.vocab.concept(n);
        }
        let id = self.intern(expr);
        let entry = self.memo.get_mut(expr).unwrap();
        if !entry.positive {
            entry.positive = true;
            self.right(id, expr)?;
        }
        Ok(id)
    }

    /// A name `X` with `expr ⊑ X`.
    pub fn negative(&mut self, expr: &ConceptExpression) -> Result<ConceptId, ReasonerError> {
        if let Some(n) = expr.as_named() {
            return self.vocab.concept(n);
        }
        let id = self.intern(expr);
        let entry = self.memo.get_mut(expr).unwrap();
        if !entry.negative {
            entry.negative = true;
            self.left(expr, id)?;
        }
        Ok(id)
    }

    fn intern(&mut self, expr: &ConceptExpression) -> ConceptId {
        if let Some(e) = self.memo.get(expr) {
            return e.id;
        }
        let id = self.next_id();
        self.fresh.push(expr.clone());
        self.memo.insert(
            expr.clone(),
            Entry {
                id,
                positive: false,
                negative: false,
            },
        );
        id
    }

    fn right(&mut self, sub: ConceptId, expr: &ConceptExpression) -> Result<(), ReasonerError> {
        match expr {
            ConceptExpression::Named(n) => {
                let sup = self.vocab.concept(n)?;
                self.axioms.push(NormalAxiom::Subsumption { sub, sup });
            }
            ConceptExpression::Conjunction(parts) => {
                for p in parts {
                    self.right(sub, p)?;
                }
            }
            ConceptExpression::Existential { role, filler } => {
                let role = self.vocab.role(role)?;
                let filler = self.positive(filler)?;
                self.axioms
                    .push(NormalAxiom::ExistsRight { sub, role, filler });
            }
            ConceptExpression::Attribute(r) => {
                let (attribute, kind) = self.vocab.attribute(&r.attribute)?;
                self.axioms.push(NormalAxiom::AttributeRight {
                    sub,
                    attribute,
                    interval: Interval::from_restriction(r.op, r.value, kind),
                });
            }
        }
        Ok(())
    }

    fn left(&mut self, expr: &ConceptExpression, sup: ConceptId) -> Result<(), ReasonerError> {
        match expr {
            ConceptExpression::Named(n) => {
                let sub = self.vocab.concept(n)?;
                self.axioms.push(NormalAxiom::Subsumption { sub, sup });
            }
            ConceptExpression::Conjunction(parts) => {
                let mut conjuncts = parts
                    .iter()
                    .map(|p| self.negative(p))
                    .collect::<Result<Vec<_>, _>>()?;
                conjuncts.sort_unstable();
                conjuncts.dedup();
                if conjuncts.len() == 1 {
                    self.axioms.push(NormalAxiom::Subsumption {
                        sub: conjuncts[0],
                        sup,
                    });
                } else {
                    self.axioms
                        .push(NormalAxiom::Conjunction { conjuncts, sup });
                }
            }
            ConceptExpression::Existential { role, filler } => {
                let role = self.vocab.role(role)?;
                let filler = self.negative(filler)?;
                self.axioms
                    .push(NormalAxiom::ExistsLeft { role, filler, sup });
            }
            ConceptExpression::Attribute(r) => {
                let (attribute, kind) = self.vocab.attribute(&r.attribute)?;
                self.axioms.push(NormalAxiom::AttributeLeft {
                    attribute,
                    interval: Interval::from_restriction(r.op, r.value, kind),
                    sup,
                });
            }
        }
        Ok(())
    }
}
