//! Seeded random TBoxes over a small signature.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use semreg_core::decimal::Decimal;
use semreg_core::ontology::{Axiom, CompareOp, ConceptExpression as E, TBox, ValueKind};

pub const ROLES: [&str; 3] = ["r", "s", "hasCapability"];
pub const ATTRS: [(&str, ValueKind); 2] = [("P", ValueKind::Int), ("Q", ValueKind::Decimal)];

pub fn concept_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("C{i}")).collect()
}

pub fn expression(rng: &mut ChaCha8Rng, names: &[String], depth: u32) -> E {
    let pick = if depth == 0 { 0 } else { rng.gen_range(0..10) };
    match pick {
        0..=3 => E::named(names[rng.gen_range(0..names.len())].clone()),
        4..=5 => {
            let n = rng.gen_range(2..=3);
            E::and((0..n).map(|_| expression(rng, names, depth - 1)))
        }
        6..=7 => E::some(
            ROLES[rng.gen_range(0..ROLES.len())],
            expression(rng, names, depth - 1),
        ),
        _ => {
            let (a, _) = ATTRS[rng.gen_range(0..ATTRS.len())];
            let op = CompareOp::ALL[rng.gen_range(0..CompareOp::ALL.len())];
            E::attr(a, op, Decimal::from_int(rng.gen_range(0..=10)))
        }
    }
}

/// A TBox with at most 10 concepts, 15 axioms, 3 roles and 2 attributes.
/// Roughly a third of the concepts are capabilities.
pub fn tbox(rng: &mut ChaCha8Rng) -> TBox {
    let n = rng.gen_range(2..=10);
    let names = concept_names(n);
    let mut t = TBox::new();
    for (i, c) in names.iter().enumerate() {
        if i % 3 == 2 {
            t.declare_capability(c.clone()).unwrap();
        } else {
            t.declare_concept(c.clone()).unwrap();
        }
    }
    for r in ROLES {
        t.declare_role(r).unwrap();
    }
    for (a, k) in ATTRS {
        t.declare_attribute(a, k).unwrap();
    }
    let axioms = rng.gen_range(1..=15);
    for _ in 0..axioms {
        let lhs = expression(rng, &names, 2);
        let rhs = expression(rng, &names, 2);
        t.add_axiom(Axiom::new(lhs, rhs)).unwrap();
    }
    t
}
