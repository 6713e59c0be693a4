//! Interval reasoning for unary numeric restrictions on one attribute.

use serde::Serialize;

use crate::decimal::Decimal;
use crate::ontology::{CompareOp, ValueKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Bound {
    pub value: Decimal,
    pub strict: bool,
}

/// Solution set of a conjunction of restrictions on one attribute.
///
/// For `int` attributes bounds are kept inclusive and integral, so
/// `> 29 ∧ < 31` is the single point 30 while over decimals it is not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    lower: Option<Bound>,
    upper: Option<Bound>,
    kind: ValueKind,
}

impl Interval {
    pub fn full(kind: ValueKind) -> Self {
        Interval {
            lower: None,
            upper: None,
            kind,
        }
    }

    pub fn from_restriction(op: CompareOp, value: Decimal, kind: ValueKind) -> Self {
        let incl = Bound {
            value,
            strict: false,
        };
        let excl = Bound {
            value,
            strict: true,
        };
        let (lower, upper) = match op {
            CompareOp::Ge => (Some(incl), None),
            CompareOp::Gt => (Some(excl), None),
            CompareOp::Le => (None, Some(incl)),
            CompareOp::Lt => (None, Some(excl)),
            CompareOp::Eq => (Some(incl), Some(incl)),
        };
        Interval { lower, upper, kind }.discretized()
    }

    fn discretized(mut self) -> Self {
        if self.kind != ValueKind::Int {
            return self;
        }
        if let Some(b) = self.lower {
            let v = if b.strict {
                b.value.floor().checked_add(Decimal::ONE)
            } else {
                Some(b.value.ceil())
            };
            if let Some(value) = v {
                self.lower = Some(Bound {
                    value,
                    strict: false,
                });
            }
        }
        if let Some(b) = self.upper {
            let v = if b.strict {
                b.value.ceil().checked_sub(Decimal::ONE)
            } else {
                Some(b.value.floor())
            };
            if let Some(value) = v {
                self.upper = Some(Bound {
                    value,
                    strict: false,
                });
            }
        }
        self
    }

    pub fn lower(&self) -> Option<Bound> {
        self.lower
    }

    pub fn upper(&self) -> Option<Bound> {
        self.upper
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    /// The single admissible value, if the interval is a point.
    pub fn equality(&self) -> Option<Decimal> {
        match (self.lower, self.upper) {
            (Some(l), Some(u)) if !l.strict && !u.strict && l.value == u.value => Some(l.value),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        match (self.lower, self.upper) {
            (Some(l), Some(u)) => {
                l.value > u.value || (l.value == u.value && (l.strict || u.strict))
            }
            _ => false,
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let lower = match (self.lower, other.lower) {
            (Some(a), Some(b)) => Some(if a.value > b.value || (a.value == b.value && a.strict) {
                a
            } else {
                b
            }),
            (a, b) => a.or(b),
        };
        let upper = match (self.upper, other.upper) {
            (Some(a), Some(b)) => Some(if a.value < b.value || (a.value == b.value && a.strict) {
                a
            } else {
                b
            }),
            (a, b) => a.or(b),
        };
        Interval {
            lower,
            upper,
            kind: self.kind,
        }
        .discretized()
    }

    /// Every value admitted by `self` is admitted by `other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        if self.is_empty() {
            return true;
        }
        let lower_ok = match (self.lower, other.lower) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a.value > b.value || (a.value == b.value && (a.strict || !b.strict)),
        };
        let upper_ok = match (self.upper, other.upper) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a.value < b.value || (a.value == b.value && (a.strict || !b.strict)),
        };
        lower_ok && upper_ok
    }

    pub fn contains(&self, value: Decimal) -> bool {
        if self.kind == ValueKind::Int && !value.is_integer() {
            return false;
        }
        let above = self.lower.is_none_or(|b| {
            if b.strict {
                value > b.value
            } else {
                value >= b.value
            }
        });
        let below = self.upper.is_none_or(|b| {
            if b.strict {
                value < b.value
            } else {
                value <= b.value
            }
        });
        above && below
    }
}

/// Reportable interval for one attribute of a concept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalConstraint {
    pub attribute: String,
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
    pub equality: Option<Decimal>,
    pub unsatisfiable: bool,
}

impl IntervalConstraint {
    pub fn new(attribute: impl Into<String>, interval: &Interval) -> Self {
        IntervalConstraint {
            attribute: attribute.into(),
            lower: interval.lower(),
            upper: interval.upper(),
            equality: interval.equality(),
            unsatisfiable: interval.is_empty(),
        }
    }
}
