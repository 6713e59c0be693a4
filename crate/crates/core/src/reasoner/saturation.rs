//! Completion-rule saturation.
//!
//! Facts per concept `C`: its subsumers `S(C)`, its successors `C →r D`
//! (`C ⊑ ∃r.D`), one interval per attribute, and whether `C` is
//! unsatisfiable. Rules fire from a worklist until nothing changes.
//!
//! A saturation can be extended by an overlay that adds axioms and concepts
//! without touching the base: the overlay stores only new facts and reads
//! through to the base for the rest.

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use crate::ontology::ValueKind;

use super::error::ReasonerError;
use super::interval::Interval;
use super::normalize::{AttrId, ConceptId, NormalAxiom, RoleId};

/// Insertion-ordered set of concept ids with constant-time membership.
#[derive(Debug, Clone, Default)]
pub(crate) struct ConceptSet {
    bits: Vec<u64>,
    items: Vec<ConceptId>,
}

impl ConceptSet {
    pub fn contains(&self, c: &ConceptId) -> bool {
        let (word, bit) = (*c as usize / 64, *c % 64);
        self.bits.get(word).is_some_and(|w| w & (1 << bit) != 0)
    }

    pub fn insert(&mut self, c: ConceptId) -> bool {
        let (word, bit) = (c as usize / 64, c % 64);
        if word >= self.bits.len() {
            self.bits.resize(word + 1, 0);
        }
        let fresh = self.bits[word] & (1 << bit) == 0;
        if fresh {
            self.bits[word] |= 1 << bit;
            self.items.push(c);
        }
        fresh
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ConceptId> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Facts {
    pub subsumers: ConceptSet,
    pub links: HashSet<(RoleId, ConceptId)>,
    pub preds: HashSet<(RoleId, ConceptId)>,
    pub intervals: HashMap<AttrId, Interval>,
    pub unsat: bool,
}

#[derive(Debug, Default)]
pub(crate) struct AxiomIndex {
    told: HashMap<ConceptId, Vec<ConceptId>>,
    conj_by: HashMap<ConceptId, Vec<usize>>,
    conjunctions: Vec<(Vec<ConceptId>, ConceptId)>,
    exists_right: HashMap<ConceptId, Vec<(RoleId, ConceptId)>>,
    exists_left: HashMap<(RoleId, ConceptId), Vec<ConceptId>>,
    /// `exists_left` keyed by filler alone, and by role alone.
    exists_left_by_filler: HashMap<ConceptId, Vec<(RoleId, ConceptId)>>,
    exists_left_by_role: HashMap<RoleId, Vec<(ConceptId, ConceptId)>>,
    attr_right: HashMap<ConceptId, Vec<(AttrId, Interval)>>,
    attr_left: HashMap<AttrId, Vec<(Interval, ConceptId)>>,
    attr_right_count: usize,
}

impl AxiomIndex {
    pub fn build(axioms: &[NormalAxiom]) -> Self {
        let mut idx = AxiomIndex::default();
        for ax in axioms {
            match ax {
                NormalAxiom::Subsumption { sub, sup } => {
                    idx.told.entry(*sub).or_default().push(*sup)
                }
                NormalAxiom::Conjunction { conjuncts, sup } => {
                    let k = idx.conjunctions.len();
                    idx.conjunctions.push((conjuncts.clone(), *sup));
                    for c in conjuncts {
                        idx.conj_by.entry(*c).or_default().push(k);
                    }
                }
                NormalAxiom::ExistsRight { sub, role, filler } => idx
                    .exists_right
                    .entry(*sub)
                    .or_default()
                    .push((*role, *filler)),
                NormalAxiom::ExistsLeft { role, filler, sup } => {
                    idx.exists_left.entry((*role, *filler)).or_default().push(*sup);
                    idx.exists_left_by_filler
                        .entry(*filler)
                        .or_default()
                        .push((*role, *sup));
                    idx.exists_left_by_role
                        .entry(*role)
                        .or_default()
                        .push((*filler, *sup));
                }
                NormalAxiom::AttributeRight {
                    sub,
                    attribute,
                    interval,
                } => {
                    idx.attr_right_count += 1;
                    idx.attr_right
                        .entry(*sub)
                        .or_default()
                        .push((*attribute, *interval))
                }
                NormalAxiom::AttributeLeft {
                    attribute,
                    interval,
                    sup,
                } => idx
                    .attr_left
                    .entry(*attribute)
                    .or_default()
                    .push((*interval, *sup)),
            }
        }
        idx
    }
}

/// Upper bound on rule firings; reaching it means a bug, not a big input.
pub(crate) fn firing_limit(concepts: usize, roles: usize, attribute_axioms: usize) -> u64 {
    let n = concepts as u64 + 1;
    let r = roles as u64 + 2;
    let a = attribute_axioms as u64 + 1;
    n.saturating_mul(n)
        .saturating_mul(r)
        .saturating_add(n.saturating_mul(a).saturating_mul(2))
}

#[derive(Debug, Clone, Copy)]
enum Event {
    Add(ConceptId, ConceptId),
    Link(ConceptId, RoleId, ConceptId),
    Restrict(ConceptId, AttrId, Interval),
    Unsat(ConceptId),
}

/// A finished saturation of a complete axiom set.
#[derive(Debug)]
pub(crate) struct Saturation {
    pub facts: Vec<Facts>,
    pub index: AxiomIndex,
    pub kinds: Vec<ValueKind>,
    pub firings: u64,
}

impl Saturation {
    pub fn run(
        axioms: &[NormalAxiom],
        concepts: usize,
        roles: usize,
        kinds: Vec<ValueKind>,
    ) -> Result<Saturation, ReasonerError> {
        let index = AxiomIndex::build(axioms);
        let limit = firing_limit(concepts, roles, index.attr_right_count);
        let mut engine = Engine {
            base: None,
            index: &index,
            kinds: &kinds,
            layer: Store::Dense(vec![Facts::default(); concepts]),
            queue: Vec::new(),
            scratch: Vec::new(),
            firings: 0,
            limit,
        };
        for c in 0..concepts as ConceptId {
            engine.queue.push(Event::Add(c, c));
        }
        engine.drain()?;
        let firings = engine.firings;
        let Store::Dense(facts) = engine.layer else {
            unreachable!()
        };
        Ok(Saturation {
            facts,
            index,
            kinds,
            firings,
        })
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }
}

/// Read access to saturated facts.
pub(crate) trait FactView {
    fn has(&self, c: ConceptId, a: ConceptId) -> bool;
    fn is_unsat(&self, c: ConceptId) -> bool;
    fn subsumers(&self, c: ConceptId) -> Vec<ConceptId>;
    fn links(&self, c: ConceptId) -> Vec<(RoleId, ConceptId)>;
    fn intervals(&self, c: ConceptId) -> HashMap<AttrId, Interval>;
}

impl FactView for Saturation {
    fn has(&self, c: ConceptId, a: ConceptId) -> bool {
        self.facts
            .get(c as usize)
            .is_some_and(|f| f.subsumers.contains(&a))
    }

    fn is_unsat(&self, c: ConceptId) -> bool {
        self.facts.get(c as usize).is_some_and(|f| f.unsat)
    }

    fn subsumers(&self, c: ConceptId) -> Vec<ConceptId> {
        self.facts
            .get(c as usize)
            .map(|f| f.subsumers.iter().copied().collect())
            .unwrap_or_default()
    }

    fn links(&self, c: ConceptId) -> Vec<(RoleId, ConceptId)> {
        self.facts
            .get(c as usize)
            .map(|f| f.links.iter().copied().collect())
            .unwrap_or_default()
    }

    fn intervals(&self, c: ConceptId) -> HashMap<AttrId, Interval> {
        self.facts
            .get(c as usize)
            .map(|f| f.intervals.clone())
            .unwrap_or_default()
    }
}

/// New facts on top of a base saturation, caused by extra axioms over extra
/// concepts with ids `base.len()..`.
#[derive(Debug)]
pub(crate) struct Overlay<'b> {
    base: &'b Saturation,
    facts: HashMap<ConceptId, Facts>,
}

impl<'b> Overlay<'b> {
    /// Saturates `axioms` into `base` for the new concepts and for every
    /// base concept reachable from `seeds` or from the new concepts.
    pub fn run(
        base: &'b Saturation,
        axioms: &[NormalAxiom],
        new_concepts: usize,
        roles: usize,
        seeds: impl IntoIterator<Item = ConceptId>,
    ) -> Result<Overlay<'b>, ReasonerError> {
        let index = AxiomIndex::build(axioms);
        let total = base.len() + new_concepts;
        let limit = firing_limit(
            total,
            roles,
            index.attr_right_count + base.index.attr_right_count,
        );
        let mut engine = Engine {
            base: Some(base),
            index: &index,
            kinds: &base.kinds,
            layer: Store::Sparse(HashMap::default()),
            queue: Vec::new(),
            scratch: Vec::new(),
            firings: 0,
            limit,
        };
        let mut scope = Scope {
            axioms,
            seen: HashSet::default(),
        };
        for c in base.len()..total {
            engine.queue.push(Event::Add(c as ConceptId, c as ConceptId));
        }
        for s in seeds {
            scope.activate(&mut engine, s);
        }
        engine.drain_with(&mut scope)?;
        let Store::Sparse(facts) = engine.layer else {
            unreachable!()
        };
        Ok(Overlay { base, facts })
    }

}

impl FactView for Overlay<'_> {
    fn has(&self, c: ConceptId, a: ConceptId) -> bool {
        self.base.has(c, a) || self.facts.get(&c).is_some_and(|f| f.subsumers.contains(&a))
    }

    fn is_unsat(&self, c: ConceptId) -> bool {
        self.base.is_unsat(c) || self.facts.get(&c).is_some_and(|f| f.unsat)
    }

    fn subsumers(&self, c: ConceptId) -> Vec<ConceptId> {
        let mut out = self.base.subsumers(c);
        if let Some(f) = self.facts.get(&c) {
            out.extend(f.subsumers.iter().copied());
        }
        out
    }

    fn links(&self, c: ConceptId) -> Vec<(RoleId, ConceptId)> {
        let mut out = self.base.links(c);
        if let Some(f) = self.facts.get(&c) {
            out.extend(f.links.iter().copied());
        }
        out
    }

    fn intervals(&self, c: ConceptId) -> HashMap<AttrId, Interval> {
        let mut out = self.base.intervals(c);
        if let Some(f) = self.facts.get(&c) {
            out.extend(f.intervals.iter().map(|(k, v)| (*k, *v)));
        }
        out
    }
}

/// Base concepts whose existing facts have been matched against the
/// overlay's axioms.
struct Scope<'x> {
    axioms: &'x [NormalAxiom],
    seen: HashSet<ConceptId>,
}

impl Scope<'_> {
    fn activate(&mut self, engine: &mut Engine<'_>, start: ConceptId) {
        let Some(base) = engine.base else { return };
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            if c as usize >= base.len() || !self.seen.insert(c) {
                continue;
            }
            for ax in self.axioms {
                match ax {
                    NormalAxiom::Subsumption { sub, sup } => {
                        if engine.has(c, *sub) {
                            engine.queue.push(Event::Add(c, *sup));
                        }
                    }
                    NormalAxiom::Conjunction { conjuncts, sup } => {
                        if conjuncts.iter().all(|k| engine.has(c, *k)) {
                            engine.queue.push(Event::Add(c, *sup));
                        }
                    }
                    NormalAxiom::ExistsRight { sub, role, filler } => {
                        if engine.has(c, *sub) {
                            engine.queue.push(Event::Link(c, *role, *filler));
                        }
                    }
                    NormalAxiom::ExistsLeft { role, filler, sup } => {
                        let hit = engine
                            .links_of(c)
                            .any(|(r, d)| r == *role && engine.has(d, *filler));
                        if hit {
                            engine.queue.push(Event::Add(c, *sup));
                        }
                    }
                    NormalAxiom::AttributeRight {
                        sub,
                        attribute,
                        interval,
                    } => {
                        if engine.has(c, *sub) {
                            engine.queue.push(Event::Restrict(c, *attribute, *interval));
                        }
                    }
                    NormalAxiom::AttributeLeft {
                        attribute,
                        interval,
                        sup,
                    } => {
                        let entailed = engine
                            .interval(c, *attribute)
                            .is_some_and(|i| i.is_subset_of(interval));
                        if entailed {
                            engine.queue.push(Event::Add(c, *sup));
                        }
                    }
                }
            }
            stack.extend(base.facts[c as usize].links.iter().map(|(_, d)| *d));
        }
    }
}

enum Store {
    Dense(Vec<Facts>),
    Sparse(HashMap<ConceptId, Facts>),
}

impl Store {
    fn get(&self, c: ConceptId) -> Option<&Facts> {
        match self {
            Store::Dense(v) => v.get(c as usize),
            Store::Sparse(m) => m.get(&c),
        }
    }

    fn get_mut(&mut self, c: ConceptId) -> &mut Facts {
        match self {
            Store::Dense(v) => &mut v[c as usize],
            Store::Sparse(m) => m.entry(c).or_default(),
        }
    }
}

struct Engine<'a> {
    base: Option<&'a Saturation>,
    index: &'a AxiomIndex,
    kinds: &'a [ValueKind],
    layer: Store,
    queue: Vec<Event>,
    scratch: Vec<Event>,
    firings: u64,
    limit: u64,
}

impl Engine<'_> {
    fn base_facts(&self, c: ConceptId) -> Option<&Facts> {
        self.base.and_then(|b| b.facts.get(c as usize))
    }

    fn has(&self, c: ConceptId, a: ConceptId) -> bool {
        self.base_facts(c).is_some_and(|f| f.subsumers.contains(&a))
            || self.layer.get(c).is_some_and(|f| f.subsumers.contains(&a))
    }

    fn is_unsat(&self, c: ConceptId) -> bool {
        self.base_facts(c).is_some_and(|f| f.unsat) || self.layer.get(c).is_some_and(|f| f.unsat)
    }

    fn has_link(&self, c: ConceptId, r: RoleId, d: ConceptId) -> bool {
        self.base_facts(c).is_some_and(|f| f.links.contains(&(r, d)))
            || self.layer.get(c).is_some_and(|f| f.links.contains(&(r, d)))
    }

    fn interval(&self, c: ConceptId, p: AttrId) -> Option<Interval> {
        self.layer
            .get(c)
            .and_then(|f| f.intervals.get(&p))
            .or_else(|| self.base_facts(c).and_then(|f| f.intervals.get(&p)))
            .copied()
    }

    fn subsumers_of(&self, c: ConceptId) -> impl Iterator<Item = ConceptId> + '_ {
        self.base_facts(c)
            .into_iter()
            .flat_map(|f| f.subsumers.iter().copied())
            .chain(
                self.layer
                    .get(c)
                    .into_iter()
                    .flat_map(|f| f.subsumers.iter().copied()),
            )
    }

    fn subsumer_count(&self, c: ConceptId) -> usize {
        self.base_facts(c).map_or(0, |f| f.subsumers.len())
            + self.layer.get(c).map_or(0, |f| f.subsumers.len())
    }

    fn links_of(&self, c: ConceptId) -> impl Iterator<Item = (RoleId, ConceptId)> + '_ {
        self.base_facts(c)
            .into_iter()
            .flat_map(|f| f.links.iter().copied())
            .chain(
                self.layer
                    .get(c)
                    .into_iter()
                    .flat_map(|f| f.links.iter().copied()),
            )
    }

    fn preds_of(&self, c: ConceptId) -> impl Iterator<Item = (RoleId, ConceptId)> + '_ {
        self.base_facts(c)
            .into_iter()
            .flat_map(|f| f.preds.iter().copied())
            .chain(
                self.layer
                    .get(c)
                    .into_iter()
                    .flat_map(|f| f.preds.iter().copied()),
            )
    }

    fn indexes(&self) -> impl Iterator<Item = &AxiomIndex> + '_ {
        self.base.map(|b| &b.index).into_iter().chain(Some(self.index))
    }

    fn fire(&mut self) -> Result<(), ReasonerError> {
        self.firings += 1;
        if self.firings > self.limit {
            return Err(ReasonerError::InternalLimitExceeded {
                firings: self.firings,
                limit: self.limit,
            });
        }
        Ok(())
    }

    fn drain(&mut self) -> Result<(), ReasonerError> {
        while let Some(ev) = self.queue.pop() {
            self.step(ev)?;
        }
        Ok(())
    }

    /// Like [`drain`](Self::drain), but base concepts that become link
    /// targets are brought into scope first.
    fn drain_with(&mut self, scope: &mut Scope<'_>) -> Result<(), ReasonerError> {
        while let Some(ev) = self.queue.pop() {
            if let Event::Link(_, _, d) = ev {
                scope.activate(self, d);
            }
            self.step(ev)?;
        }
        Ok(())
    }

    fn step(&mut self, ev: Event) -> Result<(), ReasonerError> {
        let mut out = std::mem::take(&mut self.scratch);
        match ev {
            Event::Add(c, a) => {
                if self.has(c, a) {
                    return self.restore(out);
                }
                self.fire()?;
                self.layer.get_mut(c).subsumers.insert(a);
                self.after_add(c, a, &mut out);
            }
            Event::Link(c, r, d) => {
                if self.has_link(c, r, d) {
                    return self.restore(out);
                }
                self.fire()?;
                self.layer.get_mut(c).links.insert((r, d));
                self.layer.get_mut(d).preds.insert((r, c));
                // Match ∃r.A ⊑ B against S(d), walking whichever side is smaller.
                let subsumers = self.subsumer_count(d);
                for idx in self.indexes() {
                    let Some(by_role) = idx.exists_left_by_role.get(&r) else {
                        continue;
                    };
                    if by_role.len() <= subsumers {
                        for (a, b) in by_role {
                            if self.has(d, *a) {
                                out.push(Event::Add(c, *b));
                            }
                        }
                    } else {
                        for a in self.subsumers_of(d) {
                            if let Some(sups) = idx.exists_left.get(&(r, a)) {
                                out.extend(sups.iter().map(|b| Event::Add(c, *b)));
                            }
                        }
                    }
                }
                if self.is_unsat(d) {
                    out.push(Event::Unsat(c));
                }
            }
            Event::Restrict(c, p, iv) => {
                let current = self
                    .interval(c, p)
                    .unwrap_or_else(|| Interval::full(self.kinds[p as usize]));
                let next = current.intersect(&iv);
                if self.interval(c, p) == Some(next) {
                    return self.restore(out);
                }
                self.fire()?;
                self.layer.get_mut(c).intervals.insert(p, next);
                if next.is_empty() {
                    out.push(Event::Unsat(c));
                } else {
                    for idx in self.indexes() {
                        for (q, b) in idx.attr_left.get(&p).into_iter().flatten() {
                            if next.is_subset_of(q) {
                                out.push(Event::Add(c, *b));
                            }
                        }
                    }
                }
            }
            Event::Unsat(c) => {
                if self.is_unsat(c) {
                    return self.restore(out);
                }
                self.fire()?;
                self.layer.get_mut(c).unsat = true;
                out.extend(self.preds_of(c).map(|(_, d)| Event::Unsat(d)));
            }
        }
        self.queue.append(&mut out);
        self.restore(out)
    }

    fn restore(&mut self, mut buf: Vec<Event>) -> Result<(), ReasonerError> {
        buf.clear();
        self.scratch = buf;
        Ok(())
    }

    fn after_add(&self, c: ConceptId, a: ConceptId, out: &mut Vec<Event>) {
        for idx in self.indexes() {
            if let Some(sups) = idx.told.get(&a) {
                out.extend(sups.iter().map(|b| Event::Add(c, *b)));
            }
            for &k in idx.conj_by.get(&a).into_iter().flatten() {
                let (conjuncts, sup) = &idx.conjunctions[k];
                if conjuncts.iter().all(|x| self.has(c, *x)) {
                    out.push(Event::Add(c, *sup));
                }
            }
            if let Some(links) = idx.exists_right.get(&a) {
                out.extend(links.iter().map(|(r, d)| Event::Link(c, *r, *d)));
            }
            if let Some(rs) = idx.attr_right.get(&a) {
                out.extend(rs.iter().map(|(p, iv)| Event::Restrict(c, *p, *iv)));
            }
            if let Some(entries) = idx.exists_left_by_filler.get(&a) {
                for (r, d) in self.preds_of(c) {
                    for (role, b) in entries {
                        if *role == r {
                            out.push(Event::Add(d, *b));
                        }
                    }
                }
            }
        }
    }
}
