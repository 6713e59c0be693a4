//! Brute-force reference reasoner.
//!
//! Works on the original expressions: no normalization, no fresh names, no
//! worklist. Every rule is re-applied to a flat fact set until a full pass
//! adds nothing. Numeric entailment is decided by trying witness values.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use semreg_core::decimal::Decimal;
use semreg_core::ontology::{AttributeRestriction, ConceptExpression as E, TBox, ValueKind};

pub struct OracleResult {
    pub subsumers: BTreeMap<String, BTreeSet<String>>,
    pub unsatisfiable: BTreeSet<String>,
    pub capabilities: BTreeMap<String, BTreeSet<String>>,
}

fn collect(e: &E, out: &mut Vec<E>) {
    if !out.contains(e) {
        out.push(e.clone());
    }
    match e {
        E::Conjunction(parts) => parts.iter().for_each(|p| collect(p, out)),
        E::Existential { filler, .. } => collect(filler, out),
        _ => {}
    }
}

/// Candidate values for `kind`; exhaustive for constants that are integers
/// in [0, 10].
fn witnesses(kind: ValueKind) -> Vec<Decimal> {
    match kind {
        ValueKind::Int => (-1..=11).map(Decimal::from_int).collect(),
        ValueKind::Decimal => (-2..=22)
            .map(|h: i64| {
                let whole = Decimal::from_int(h.div_euclid(2));
                if h.rem_euclid(2) == 0 {
                    whole
                } else {
                    whole.checked_add("0.5".parse().unwrap()).unwrap()
                }
            })
            .collect(),
    }
}

fn satisfies(v: Decimal, r: &AttributeRestriction) -> bool {
    r.op.holds(v, r.value)
}

pub fn run(tbox: &TBox) -> OracleResult {
    let mut universe: Vec<E> = Vec::new();
    for c in tbox.concepts() {
        collect(&E::named(c.clone()), &mut universe);
    }
    for ax in tbox.axioms() {
        collect(&ax.lhs, &mut universe);
        collect(&ax.rhs, &mut universe);
    }
    let mut nodes: Vec<E> = tbox.concepts().iter().map(|c| E::named(c.clone())).collect();
    for e in &universe {
        if let E::Existential { filler, .. } = e {
            if !nodes.contains(filler) {
                nodes.push((**filler).clone());
            }
        }
    }
    let ui = |e: &E| universe.iter().position(|x| x == e).unwrap();
    let node_of: Vec<Option<usize>> = universe
        .iter()
        .map(|e| nodes.iter().position(|n| n == e))
        .collect();

    let mut sub: HashSet<(usize, usize)> = HashSet::new();
    let mut link: HashSet<(usize, String, usize)> = HashSet::new();
    let mut unsat: HashSet<usize> = HashSet::new();
    for (n, e) in nodes.iter().enumerate() {
        sub.insert((n, ui(e)));
    }

    loop {
        let before = (sub.len(), link.len(), unsat.len());
        for n in 0..nodes.len() {
            for ax in tbox.axioms() {
                if sub.contains(&(n, ui(&ax.lhs))) {
                    sub.insert((n, ui(&ax.rhs)));
                }
            }
            for (i, e) in universe.iter().enumerate() {
                match e {
                    E::Conjunction(parts) => {
                        if sub.contains(&(n, i)) {
                            for p in parts {
                                sub.insert((n, ui(p)));
                            }
                        }
                        if parts.iter().all(|p| sub.contains(&(n, ui(p)))) {
                            sub.insert((n, i));
                        }
                    }
                    E::Existential { role, filler } => {
                        let m = nodes.iter().position(|x| x == &**filler).unwrap();
                        if sub.contains(&(n, i)) {
                            link.insert((n, role.clone(), m));
                        }
                        let f = ui(filler);
                        let hit = link
                            .iter()
                            .any(|(a, r, b)| *a == n && r == role && sub.contains(&(*b, f)));
                        if hit {
                            sub.insert((n, i));
                        }
                    }
                    _ => {}
                }
            }
            // transitivity through nodes
            let via: Vec<(usize, usize)> = sub
                .iter()
                .filter(|(a, _)| *a == n)
                .filter_map(|(_, e)| node_of[*e].map(|m| (m, *e)))
                .collect();
            for (m, _) in via {
                let extra: Vec<usize> = sub
                    .iter()
                    .filter(|(a, _)| *a == m)
                    .map(|(_, g)| *g)
                    .collect();
                for g in extra {
                    sub.insert((n, g));
                }
            }
            // numeric restrictions
            for (attr, kind) in tbox.attributes() {
                let known: Vec<&AttributeRestriction> = sub
                    .iter()
                    .filter(|(a, _)| *a == n)
                    .filter_map(|(_, e)| match &universe[*e] {
                        E::Attribute(r) if &r.attribute == attr => Some(r),
                        _ => None,
                    })
                    .collect();
                if known.is_empty() {
                    continue;
                }
                let admitted: Vec<Decimal> = witnesses(*kind)
                    .into_iter()
                    .filter(|v| known.iter().all(|r| satisfies(*v, r)))
                    .collect();
                if admitted.is_empty() {
                    unsat.insert(n);
                }
                for (i, e) in universe.iter().enumerate() {
                    if let E::Attribute(r) = e {
                        if &r.attribute == attr && admitted.iter().all(|v| satisfies(*v, r)) {
                            sub.insert((n, i));
                        }
                    }
                }
            }
        }
        let propagated: Vec<usize> = link
            .iter()
            .filter(|(_, _, m)| unsat.contains(m))
            .map(|(n, _, _)| *n)
            .collect();
        unsat.extend(propagated);
        if (sub.len(), link.len(), unsat.len()) == before {
            break;
        }
    }

    let names: Vec<&String> = tbox.concepts().iter().collect();
    let mut subsumers = BTreeMap::new();
    let mut capabilities = BTreeMap::new();
    let mut unsatisfiable = BTreeSet::new();
    for (n, name) in names.iter().enumerate() {
        let set: BTreeSet<String> = if unsat.contains(&n) {
            unsatisfiable.insert((*name).clone());
            names.iter().map(|s| (*s).clone()).collect()
        } else {
            names
                .iter()
                .filter(|b| sub.contains(&(n, ui(&E::named((**b).clone())))))
                .map(|s| (*s).clone())
                .collect()
        };
        subsumers.insert((*name).clone(), set);
        let caps: BTreeSet<String> = if unsat.contains(&n) {
            tbox.capabilities().iter().cloned().collect()
        } else {
            link.iter()
                .filter(|(a, r, _)| *a == n && r == "hasCapability")
                .flat_map(|(_, _, m)| {
                    tbox.capabilities()
                        .iter()
                        .filter(|k| sub.contains(&(*m, ui(&E::named((*k).clone())))))
                        .cloned()
                        .collect::<Vec<_>>()
                })
                .collect()
        };
        if !caps.is_empty() {
            capabilities.insert((*name).clone(), caps);
        }
    }
    OracleResult {
        subsumers,
        unsatisfiable,
        capabilities,
    }
}

/// Named concepts subsumed by `query`, via a fresh target concept.
pub fn answer(tbox: &TBox, query: &E) -> BTreeSet<String> {
    let target = "OracleQueryTarget";
    let mut t = tbox.clone();
    t.declare_concept(target).unwrap();
    t.add_axiom(semreg_core::ontology::Axiom::new(query.clone(), E::named(target)))
        .unwrap();
    run(&t)
        .subsumers
        .into_iter()
        .filter(|(c, s)| c != target && s.contains(target))
        .map(|(c, _)| c)
        .collect()
}
