use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;

/// Comparison operator of a numeric attribute restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CompareOp {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "==")]
    Eq,
}

impl CompareOp {
    pub const ALL: [CompareOp; 5] = [
        CompareOp::Ge,
        CompareOp::Gt,
        CompareOp::Le,
        CompareOp::Lt,
        CompareOp::Eq,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Ge => ">=",
            CompareOp::Gt => ">",
            CompareOp::Le => "<=",
            CompareOp::Lt => "<",
            CompareOp::Eq => "==",
        }
    }

    /// Does `observed op bound` hold?
    pub fn holds(self, observed: Decimal, bound: Decimal) -> bool {
        match self {
            CompareOp::Ge => observed >= bound,
            CompareOp::Gt => observed > bound,
            CompareOp::Le => observed <= bound,
            CompareOp::Lt => observed < bound,
            CompareOp::Eq => observed == bound,
        }
    }
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for CompareOp {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        CompareOp::ALL.into_iter().find(|op| op.symbol() == s).ok_or(())
    }
}

/// `attr(P, op, v)`: the individual's value of attribute `P` satisfies `op v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributeRestriction {
    pub attribute: String,
    pub op: CompareOp,
    pub value: Decimal,
}

/// Class expressions of the EL fragment with unary numeric restrictions.
///
/// There is no negation, disjunction or universal restriction; the type
/// cannot represent them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConceptExpression {
    Named(String),
    /// Always at least two parts, never directly nested.
    Conjunction(Vec<ConceptExpression>),
    Existential {
        role: String,
        filler: Box<ConceptExpression>,
    },
    Attribute(AttributeRestriction),
}

impl ConceptExpression {
    pub fn named(name: impl Into<String>) -> Self {
        ConceptExpression::Named(name.into())
    }

    /// Builds a conjunction, flattening nested conjunctions.
    ///
    /// A single part is returned unchanged. Panics on an empty part list.
    pub fn and(parts: impl IntoIterator<Item = ConceptExpression>) -> Self {
        let mut flat = Vec::new();
        for part in parts {
            match part {
                ConceptExpression::Conjunction(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => panic!("conjunction needs at least one part"),
            1 => flat.pop().unwrap(),
            _ => ConceptExpression::Conjunction(flat),
        }
    }

    pub fn some(role: impl Into<String>, filler: ConceptExpression) -> Self {
        ConceptExpression::Existential {
            role: role.into(),
            filler: Box::new(filler),
        }
    }

    pub fn attr(attribute: impl Into<String>, op: CompareOp, value: Decimal) -> Self {
        ConceptExpression::Attribute(AttributeRestriction {
            attribute: attribute.into(),
            op,
            value,
        })
    }

    pub fn as_named(&self) -> Option<&str> {
        match self {
            ConceptExpression::Named(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_named(&self) -> bool {
        matches!(self, ConceptExpression::Named(_))
    }

    /// Visits every sub-expression, outermost first.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a ConceptExpression)) {
        visit(self);
        match self {
            ConceptExpression::Conjunction(parts) => parts.iter().for_each(|p| p.walk(visit)),
            ConceptExpression::Existential { filler, .. } => filler.walk(visit),
            ConceptExpression::Named(_) | ConceptExpression::Attribute(_) => {}
        }
    }

    /// Number of non-named sub-expressions, counting repeats.
    pub fn complex_size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |e| {
            if !e.is_named() {
                n += 1;
            }
        });
        n
    }
}

impl fmt::Display for ConceptExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConceptExpression::Named(n) => f.write_str(n),
            ConceptExpression::Conjunction(parts) => {
                f.write_str("and(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
            ConceptExpression::Existential { role, filler } => write!(f, "some({role}, {filler})"),
            ConceptExpression::Attribute(a) => {
                write!(f, "attr({}, {}, {})", a.attribute, a.op, a.value)
            }
        }
    }
}

/// Identifier syntax: `[A-Za-z_][A-Za-z0-9_/-]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(is_identifier_continue)
}

pub(crate) fn is_identifier_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '/' || c == '-'
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> ConceptExpression {
        ConceptExpression::named(s)
    }

    #[test]
    fn nested_conjunctions_flatten() {
        let nested = ConceptExpression::and([n("a"), ConceptExpression::and([n("b"), n("c")])]);
        let flat = ConceptExpression::and([n("a"), n("b"), n("c")]);
        assert_eq!(nested, flat);
        assert_eq!(flat.to_string(), "and(a, b, c)");
    }

    #[test]
    fn singleton_conjunction_collapses() {
        assert_eq!(ConceptExpression::and([n("a")]), n("a"));
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("sensor_msgs/Image"));
        assert!(is_identifier("RGBD-Camera_Wrapper"));
        assert!(is_identifier("_x"));
        assert!(!is_identifier("2D"));
        assert!(!is_identifier("-a"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("a b"));
    }

    #[test]
    fn op_semantics_at_boundary() {
        let thirty = Decimal::from_int(30);
        assert!(CompareOp::Ge.holds(thirty, thirty));
        assert!(!CompareOp::Gt.holds(thirty, thirty));
        assert!(CompareOp::Eq.holds("30.00".parse().unwrap(), thirty));
    }
}
