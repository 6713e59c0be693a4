use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::ontology::ConceptExpression;
use crate::vocab;

use super::error::ReasonerError;
use super::interval::IntervalConstraint;
use super::normalize::{ConceptId, NormalAxiom, NormalizedTBox, Normalizer};
use super::saturation::{FactView, Overlay, Saturation};

/// How query expressions are brought into the saturated TBox.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QueryStrategy {
    /// Saturate only the consequences of the query's axioms on top of the
    /// existing classification.
    #[default]
    Incremental,
    /// Re-saturate the whole TBox with the query's axioms added.
    Full,
}

/// Classified TBox: the saturated facts plus the capability index.
#[derive(Debug)]
pub struct SubsumptionGraph {
    tbox: Arc<NormalizedTBox>,
    sat: Saturation,
    capabilities: BTreeMap<String, BTreeSet<String>>,
}

impl PartialEq for SubsumptionGraph {
    fn eq(&self, other: &Self) -> bool {
        self.to_map() == other.to_map()
            && self.capabilities == other.capabilities
            && self.unsatisfiable() == other.unsatisfiable()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryAnswer {
    pub matches: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkProfile {
    pub role: String,
    /// Most specific named concepts the successor belongs to.
    pub filler_types: Vec<String>,
    pub intervals: Vec<IntervalConstraint>,
}

/// Everything the reasoner derives about one concept expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConceptProfile {
    pub satisfiable: bool,
    pub subsumers: BTreeSet<String>,
    pub capabilities: BTreeSet<String>,
    pub links: Vec<LinkProfile>,
    pub intervals: Vec<IntervalConstraint>,
}

/// Saturates the normalized TBox.
pub fn classify(tbox: impl Into<Arc<NormalizedTBox>>) -> Result<SubsumptionGraph, ReasonerError> {
    let tbox = tbox.into();
    let kinds = tbox.vocab.attributes.iter().map(|(_, k)| *k).collect();
    let sat = Saturation::run(
        tbox.axioms(),
        tbox.concept_count(),
        tbox.role_count(),
        kinds,
    )?;
    let mut graph = SubsumptionGraph {
        tbox,
        sat,
        capabilities: BTreeMap::new(),
    };
    graph.capabilities = graph.build_capability_index();
    Ok(graph)
}

struct Extension {
    axioms: Vec<NormalAxiom>,
    new_concepts: usize,
    positive: Vec<ConceptId>,
    negative: Vec<ConceptId>,
}

impl SubsumptionGraph {
    pub fn normalized(&self) -> &NormalizedTBox {
        &self.tbox
    }

    /// Rule firings spent on the classification.
    pub fn firings(&self) -> u64 {
        self.sat.firings
    }

    fn named(&self) -> std::ops::Range<ConceptId> {
        0..self.tbox.named_count() as ConceptId
    }

    fn id(&self, name: &str) -> Result<ConceptId, ReasonerError> {
        self.tbox
            .concept_id(name)
            .ok_or_else(|| ReasonerError::undeclared(name))
    }

    fn named_subsumers_in(&self, view: &dyn FactView, c: ConceptId) -> BTreeSet<String> {
        if view.is_unsat(c) {
            return self.named().map(|k| self.tbox.concept_name(k)).collect();
        }
        let mut ids: Vec<ConceptId> = view
            .subsumers(c)
            .into_iter()
            .filter(|k| (*k as usize) < self.tbox.named_count())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids.into_iter().map(|k| self.tbox.concept_name(k)).collect()
    }

    fn capabilities_in(&self, view: &dyn FactView, c: ConceptId) -> BTreeSet<String> {
        if view.is_unsat(c) {
            return self
                .named()
                .filter(|k| self.tbox.is_capability(*k))
                .map(|k| self.tbox.concept_name(k))
                .collect();
        }
        let Some(role) = self.tbox.role_id(vocab::HAS_CAPABILITY) else {
            return BTreeSet::new();
        };
        let mut out = BTreeSet::new();
        for (r, d) in view.links(c) {
            if r != role {
                continue;
            }
            for k in view.subsumers(d) {
                if self.tbox.is_capability(k) {
                    out.insert(self.tbox.concept_name(k));
                }
            }
        }
        out
    }

    fn build_capability_index(&self) -> BTreeMap<String, BTreeSet<String>> {
        self.named()
            .filter_map(|c| {
                let caps = self.capabilities_in(&self.sat, c);
                (!caps.is_empty()).then(|| (self.tbox.concept_name(c), caps))
            })
            .collect()
    }

    /// Named subsumers of a declared concept, itself included.
    pub fn subsumers(&self, name: &str) -> Result<BTreeSet<String>, ReasonerError> {
        Ok(self.named_subsumers_in(&self.sat, self.id(name)?))
    }

    /// `sub ⊑ sup` for two declared concepts, read off the classification.
    pub fn is_named_subsumed_by(&self, sub: &str, sup: &str) -> Result<bool, ReasonerError> {
        let (a, b) = (self.id(sub)?, self.id(sup)?);
        Ok(self.sat.is_unsat(a) || self.sat.has(a, b))
    }

    /// Subsumers of every declared concept.
    pub fn to_map(&self) -> BTreeMap<String, BTreeSet<String>> {
        self.named()
            .map(|c| (self.tbox.concept_name(c), self.named_subsumers_in(&self.sat, c)))
            .collect()
    }

    pub fn unsatisfiable(&self) -> BTreeSet<String> {
        self.named()
            .filter(|c| self.sat.is_unsat(*c))
            .map(|c| self.tbox.concept_name(c))
            .collect()
    }

    /// Declared concept name to every capability it is deduced to have.
    /// Concepts without capabilities are absent.
    pub fn capability_index(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.capabilities
    }

    pub fn deduce_capabilities(&self, concept: &str) -> Result<BTreeSet<String>, ReasonerError> {
        self.id(concept)?;
        Ok(self.capabilities.get(concept).cloned().unwrap_or_default())
    }

    /// Derived facts `C ⊑ ∃r.D` between declared concepts.
    pub fn derived_existentials(&self) -> BTreeSet<(String, String, String)> {
        let mut out = BTreeSet::new();
        for c in self.named() {
            if self.sat.is_unsat(c) {
                continue;
            }
            for (r, d) in self.sat.links(c) {
                for k in self.named_subsumers_in(&self.sat, d) {
                    out.insert((
                        self.tbox.concept_name(c),
                        self.tbox.role_name(r).to_string(),
                        k,
                    ));
                }
            }
        }
        out
    }

    fn extend(
        &self,
        positive: &[&ConceptExpression],
        negative: &[&ConceptExpression],
    ) -> Result<Extension, ReasonerError> {
        let first = self.tbox.concept_count() as ConceptId;
        let mut n = Normalizer::new(&self.tbox.vocab, first);
        let positive = positive
            .iter()
            .map(|e| n.positive(e))
            .collect::<Result<Vec<_>, _>>()?;
        let negative = negative
            .iter()
            .map(|e| n.negative(e))
            .collect::<Result<Vec<_>, _>>()?;
        let new_concepts = (n.next_id() - first) as usize;
        let (_, axioms) = n.finish();
        Ok(Extension {
            axioms,
            new_concepts,
            positive,
            negative,
        })
    }

    fn evaluate<T>(
        &self,
        ext: &Extension,
        seeds: &[ConceptId],
        strategy: QueryStrategy,
        read: impl FnOnce(&dyn FactView) -> T,
    ) -> Result<T, ReasonerError> {
        match strategy {
            QueryStrategy::Incremental => {
                let overlay = Overlay::run(
                    &self.sat,
                    &ext.axioms,
                    ext.new_concepts,
                    self.tbox.role_count(),
                    seeds.iter().copied(),
                )?;
                Ok(read(&overlay))
            }
            QueryStrategy::Full => {
                let mut axioms = self.tbox.axioms().to_vec();
                axioms.extend(ext.axioms.iter().cloned());
                let sat = Saturation::run(
                    &axioms,
                    self.tbox.concept_count() + ext.new_concepts,
                    self.tbox.role_count(),
                    self.sat.kinds.clone(),
                )?;
                Ok(read(&sat))
            }
        }
    }

    pub fn is_subsumed_by(
        &self,
        sub: &ConceptExpression,
        sup: &ConceptExpression,
    ) -> Result<bool, ReasonerError> {
        self.is_subsumed_by_with(sub, sup, QueryStrategy::Incremental)
    }

    pub fn is_subsumed_by_with(
        &self,
        sub: &ConceptExpression,
        sup: &ConceptExpression,
        strategy: QueryStrategy,
    ) -> Result<bool, ReasonerError> {
        let ext = self.extend(&[sub], &[sup])?;
        let (p, q) = (ext.positive[0], ext.negative[0]);
        self.evaluate(&ext, &[p], strategy, |v| v.is_unsat(p) || v.has(p, q))
    }

    /// Candidates subsumed by `query`, sorted.
    pub fn answer_query(
        &self,
        query: &ConceptExpression,
        candidates: &[String],
    ) -> Result<QueryAnswer, ReasonerError> {
        self.answer_query_with(query, candidates, QueryStrategy::Incremental)
    }

    pub fn answer_query_with(
        &self,
        query: &ConceptExpression,
        candidates: &[String],
        strategy: QueryStrategy,
    ) -> Result<QueryAnswer, ReasonerError> {
        let mut ids = candidates
            .iter()
            .map(|c| self.id(c))
            .collect::<Result<Vec<_>, _>>()?;
        ids.sort_unstable();
        ids.dedup();
        let ext = self.extend(&[], &[query])?;
        let q = ext.negative[0];
        let hits = self.evaluate(&ext, &ids, strategy, |v| {
            ids.iter()
                .filter(|c| v.is_unsat(**c) || v.has(**c, q))
                .map(|c| (*c, v.is_unsat(*c)))
                .collect::<Vec<_>>()
        })?;
        let mut matches: Vec<String> = hits.iter().map(|(c, _)| self.tbox.concept_name(*c)).collect();
        matches.sort();
        let warnings = hits
            .iter()
            .filter(|(_, unsat)| *unsat)
            .map(|(c, _)| {
                format!(
                    "`{}` is unsatisfiable and matches every query",
                    self.tbox.concept_name(*c)
                )
            })
            .collect();
        Ok(QueryAnswer { matches, warnings })
    }

    pub fn is_satisfiable(&self, expr: &ConceptExpression) -> Result<bool, ReasonerError> {
        let ext = self.extend(&[expr], &[])?;
        let p = ext.positive[0];
        self.evaluate(&ext, &[p], QueryStrategy::Incremental, |v| !v.is_unsat(p))
    }

    pub fn profile(&self, expr: &ConceptExpression) -> Result<ConceptProfile, ReasonerError> {
        let ext = self.extend(&[expr], &[])?;
        let p = ext.positive[0];
        self.evaluate(&ext, &[p], QueryStrategy::Incremental, |v| {
            let satisfiable = !v.is_unsat(p);
            let mut links: Vec<LinkProfile> = v
                .links(p)
                .into_iter()
                .map(|(r, d)| LinkProfile {
                    role: self.tbox.role_name(r).to_string(),
                    filler_types: self.most_specific(v.subsumers(d)),
                    intervals: self.interval_report(v, d),
                })
                .collect();
            links.sort_by(|a, b| (&a.role, &a.filler_types).cmp(&(&b.role, &b.filler_types)));
            links.dedup();
            ConceptProfile {
                satisfiable,
                subsumers: self.named_subsumers_in(v, p),
                capabilities: self.capabilities_in(v, p),
                links,
                intervals: self.interval_report(v, p),
            }
        })
    }

    fn interval_report(&self, v: &dyn FactView, c: ConceptId) -> Vec<IntervalConstraint> {
        let mut out: Vec<IntervalConstraint> = v
            .intervals(c)
            .iter()
            .map(|(a, iv)| IntervalConstraint::new(self.tbox.attribute_name(*a), iv))
            .collect();
        out.sort_by(|a, b| a.attribute.cmp(&b.attribute));
        out
    }

    /// Declared concepts among `ids` that have no strictly more specific
    /// declared concept among `ids`.
    fn most_specific(&self, ids: Vec<ConceptId>) -> Vec<String> {
        let named: HashSet<ConceptId> = ids
            .into_iter()
            .filter(|k| (*k as usize) < self.tbox.named_count())
            .collect();
        let strictly_below = |y: ConceptId, x: ConceptId| {
            y != x && self.sat.has(y, x) && !self.sat.has(x, y)
        };
        let mut out: Vec<String> = named
            .iter()
            .filter(|x| !named.iter().any(|y| strictly_below(*y, **x)))
            .map(|x| self.tbox.concept_name(*x))
            .collect();
        out.sort();
        out
    }
}
