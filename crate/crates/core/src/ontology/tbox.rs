use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::error::OntologyError;
use super::expr::ConceptExpression;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Int,
    Decimal,
}

impl ValueKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ValueKind::Int => "int",
            ValueKind::Decimal => "decimal",
        }
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// `lhs ⊑ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Axiom {
    pub lhs: ConceptExpression,
    pub rhs: ConceptExpression,
}

impl Axiom {
    pub fn new(lhs: ConceptExpression, rhs: ConceptExpression) -> Self {
        Axiom { lhs, rhs }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} SubClassOf {}", self.lhs, self.rhs)
    }
}

/// Declarations plus subsumption axioms.
///
/// Concepts (capabilities included), roles and attributes live in separate
/// namespaces: an attribute may share its name with a concept, which is how
/// an attribute class such as `MeasuredReflectance` can appear both in
/// `attr(..)` and as the filler of `some(hasAttribute, ..)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TBox {
    concepts: BTreeSet<String>,
    capabilities: BTreeSet<String>,
    roles: BTreeSet<String>,
    attributes: BTreeMap<String, ValueKind>,
    axioms: Vec<Axiom>,
}

impl TBox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_concept(&mut self, name: impl Into<String>) -> Result<(), OntologyError> {
        let name = name.into();
        if self.concepts.contains(&name) {
            return Err(OntologyError::DuplicateDeclaration { name });
        }
        self.concepts.insert(name);
        Ok(())
    }

    /// Declares a concept and marks it as a capability.
    pub fn declare_capability(&mut self, name: impl Into<String>) -> Result<(), OntologyError> {
        let name = name.into();
        self.declare_concept(name.clone())?;
        self.capabilities.insert(name);
        Ok(())
    }

    pub fn declare_role(&mut self, name: impl Into<String>) -> Result<(), OntologyError> {
        let name = name.into();
        if self.roles.contains(&name) {
            return Err(OntologyError::DuplicateDeclaration { name });
        }
        self.roles.insert(name);
        Ok(())
    }

    pub fn declare_attribute(
        &mut self,
        name: impl Into<String>,
        kind: ValueKind,
    ) -> Result<(), OntologyError> {
        let name = name.into();
        if self.attributes.contains_key(&name) {
            return Err(OntologyError::DuplicateDeclaration { name });
        }
        self.attributes.insert(name, kind);
        Ok(())
    }

    /// Appends an axiom after checking every reference it makes.
    pub fn add_axiom(&mut self, axiom: Axiom) -> Result<(), OntologyError> {
        self.check_expression(&axiom.lhs)?;
        self.check_expression(&axiom.rhs)?;
        self.axioms.push(axiom);
        Ok(())
    }

    pub fn add_subclass(&mut self, sub: &str, sup: &str) -> Result<(), OntologyError> {
        self.add_axiom(Axiom::new(
            ConceptExpression::named(sub),
            ConceptExpression::named(sup),
        ))
    }

    /// Verifies that `expr` references only declared names and that
    /// restriction values fit their attribute's value kind.
    pub fn check_expression(&self, expr: &ConceptExpression) -> Result<(), OntologyError> {
        let mut result = Ok(());
        expr.walk(&mut |e| {
            if result.is_err() {
                return;
            }
            result = match e {
                ConceptExpression::Named(n) if !self.concepts.contains(n) => {
                    Err(OntologyError::undeclared(n))
                }
                ConceptExpression::Existential { role, .. } if !self.roles.contains(role) => {
                    Err(OntologyError::undeclared(role))
                }
                ConceptExpression::Attribute(a) => match self.attributes.get(&a.attribute) {
                    None => Err(OntologyError::undeclared(&a.attribute)),
                    Some(ValueKind::Int) if !a.value.is_integer() => {
                        Err(OntologyError::ValueKindMismatch {
                            attribute: a.attribute.clone(),
                            value: a.value.to_string(),
                            expected: ValueKind::Int,
                        })
                    }
                    Some(_) => Ok(()),
                },
                _ => Ok(()),
            };
        });
        result
    }

    /// Adds every declaration and axiom of `other`, failing on overlaps.
    pub fn merge(&mut self, other: &TBox) -> Result<(), OntologyError> {
        for c in &other.concepts {
            if other.capabilities.contains(c) {
                self.declare_capability(c.clone())?;
            } else {
                self.declare_concept(c.clone())?;
            }
        }
        for r in &other.roles {
            self.declare_role(r.clone())?;
        }
        for (a, k) in &other.attributes {
            self.declare_attribute(a.clone(), *k)?;
        }
        for ax in &other.axioms {
            self.add_axiom(ax.clone())?;
        }
        Ok(())
    }

    pub fn concepts(&self) -> &BTreeSet<String> {
        &self.concepts
    }

    pub fn capabilities(&self) -> &BTreeSet<String> {
        &self.capabilities
    }

    pub fn roles(&self) -> &BTreeSet<String> {
        &self.roles
    }

    pub fn attributes(&self) -> &BTreeMap<String, ValueKind> {
        &self.attributes
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn has_concept(&self, name: &str) -> bool {
        self.concepts.contains(name)
    }

    pub fn is_capability(&self, name: &str) -> bool {
        self.capabilities.contains(name)
    }

    pub fn has_role(&self, name: &str) -> bool {
        self.roles.contains(name)
    }

    pub fn attribute_kind(&self, name: &str) -> Option<ValueKind> {
        self.attributes.get(name).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
            && self.roles.is_empty()
            && self.attributes.is_empty()
            && self.axioms.is_empty()
    }

    /// Declared parents per concept: `A SubClassOf B`, or a named conjunct
    /// `B` of `A SubClassOf and(B, ...)`.
    pub fn named_parents(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut parents: BTreeMap<&str, BTreeSet<&str>> =
            self.concepts.iter().map(|c| (c.as_str(), BTreeSet::new())).collect();
        for axiom in &self.axioms {
            let Some(sub) = axiom.lhs.as_named() else { continue };
            let sups: Vec<&str> = match &axiom.rhs {
                ConceptExpression::Conjunction(parts) => parts.iter().filter_map(|p| p.as_named()).collect(),
                other => other.as_named().into_iter().collect(),
            };
            for sup in sups {
                if sub != sup {
                    parents.entry(sub).or_default().insert(sup);
                }
            }
        }
        parents
    }
}
