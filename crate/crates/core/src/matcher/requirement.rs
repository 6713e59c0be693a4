use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::decimal::Decimal;
use crate::ontology::{is_identifier, CompareOp, ConceptExpression, TBox};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RequirementError {
    #[error("malformed requirement `{text}`: {message}")]
    Syntax { text: String, message: String },
    #[error("undeclared identifier `{name}` in requirement")]
    UndeclaredIdentifier { name: String },
}

/// `<Type>.<Attribute> <op> <value>`: a connected component of `Type`
/// must have `Attribute` satisfying the comparison.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RequirementConstraint {
    pub target_type: String,
    pub attribute: String,
    pub op: CompareOp,
    pub value: Decimal,
}

// longest symbols first so `>=` is not read as `>`
const OPS: [(&str, CompareOp); 5] = [
    (">=", CompareOp::Ge),
    ("<=", CompareOp::Le),
    ("==", CompareOp::Eq),
    (">", CompareOp::Gt),
    ("<", CompareOp::Lt),
];

impl RequirementConstraint {
    /// Parses and checks every name against `tbox`.
    pub fn parse_in(text: &str, tbox: &TBox) -> Result<Self, RequirementError> {
        let c: RequirementConstraint = text.parse()?;
        c.check(tbox)?;
        Ok(c)
    }

    pub fn check(&self, tbox: &TBox) -> Result<(), RequirementError> {
        if !tbox.has_concept(&self.target_type) {
            return Err(RequirementError::UndeclaredIdentifier {
                name: self.target_type.clone(),
            });
        }
        if tbox.attribute_kind(&self.attribute).is_none() {
            return Err(RequirementError::UndeclaredIdentifier {
                name: self.attribute.clone(),
            });
        }
        Ok(())
    }

    pub fn holds(&self, observed: Decimal) -> bool {
        self.op.holds(observed, self.value)
    }

    /// The restriction `attr(Attribute, op, value)`.
    pub fn restriction(&self) -> ConceptExpression {
        ConceptExpression::attr(self.attribute.clone(), self.op, self.value)
    }
}

impl FromStr for RequirementConstraint {
    type Err = RequirementError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |message: &str| RequirementError::Syntax {
            text: text.to_string(),
            message: message.to_string(),
        };
        let (at, sym, op) = OPS
            .iter()
            .filter_map(|(sym, op)| text.find(sym).map(|i| (i, *sym, *op)))
            .min_by_key(|(i, sym, _)| (*i, std::cmp::Reverse(sym.len())))
            .ok_or_else(|| err("expected one of >=, >, <=, <, =="))?;
        let lhs = text[..at].trim();
        let rhs = text[at + sym.len()..].trim();
        let (target, attribute) = lhs
            .split_once('.')
            .ok_or_else(|| err("expected `<Type>.<Attribute>` before the operator"))?;
        if !is_identifier(target) {
            return Err(err("invalid type name"));
        }
        if !is_identifier(attribute) {
            return Err(err("invalid attribute name"));
        }
        let value: Decimal = rhs.parse().map_err(|_| err("expected a decimal number"))?;
        Ok(RequirementConstraint {
            target_type: target.to_string(),
            attribute: attribute.to_string(),
            op,
            value,
        })
    }
}

impl fmt::Display for RequirementConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{} {} {}",
            self.target_type,
            self.attribute,
            self.op.symbol(),
            self.value
        )
    }
}

impl Serialize for RequirementConstraint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RequirementConstraint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a requirement formula without consulting any ontology.
pub fn parse_requirement(text: &str) -> Result<RequirementConstraint, RequirementError> {
    text.parse()
}
