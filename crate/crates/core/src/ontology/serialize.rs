use std::fmt::Write;

use super::tbox::TBox;

/// Canonical document for `tbox`.
///
/// Declarations come first, grouped as concepts, capabilities, roles,
/// attributes and sorted within each group; axioms follow in insertion
/// order. Every line ends with LF; an empty TBox yields an empty document.
pub fn serialize_ontology(tbox: &TBox) -> String {
    let mut out = String::new();
    for c in tbox.concepts() {
        if !tbox.is_capability(c) {
            writeln!(out, "concept {c}").unwrap();
        }
    }
    for c in tbox.capabilities() {
        writeln!(out, "capability {c}").unwrap();
    }
    for r in tbox.roles() {
        writeln!(out, "role {r}").unwrap();
    }
    for (a, kind) in tbox.attributes() {
        writeln!(out, "attribute {a} : {kind}").unwrap();
    }
    for ax in tbox.axioms() {
        writeln!(out, "axiom {ax}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::parse_ontology;

    #[test]
    fn empty_tbox_is_empty_document() {
        assert_eq!(serialize_ontology(&TBox::new()), "");
    }

    #[test]
    fn canonical_safety_scanner_document() {
        let shuffled = "role hasCapability\n\
            # scanner capability\n\
            axiom SafetyLaserScanner SubClassOf some( hasCapability ,SafeMonitoringOf2DFields )\n\
            capability SafeMonitoringOf2DFields\n\
            concept SafetyLaserScanner\n";
        let t = parse_ontology(shuffled).unwrap();
        assert_eq!(
            serialize_ontology(&t),
            "concept SafetyLaserScanner\n\
             capability SafeMonitoringOf2DFields\n\
             role hasCapability\n\
             axiom SafetyLaserScanner SubClassOf some(hasCapability, SafeMonitoringOf2DFields)\n"
        );
    }

    #[test]
    fn declarations_sorted_axioms_kept_in_order() {
        let t = parse_ontology(
            "concept Z\nconcept A\nattribute Hz : int\naxiom Z SubClassOf A\naxiom A SubClassOf attr(Hz, >, 3)\n",
        )
        .unwrap();
        assert_eq!(
            serialize_ontology(&t),
            "concept A\nconcept Z\nattribute Hz : int\naxiom Z SubClassOf A\naxiom A SubClassOf attr(Hz, >, 3)\n"
        );
    }
}
