//! Exact decimal values for the numeric constraint domain.
//!
//! Values are kept in their written scale (`30.0` prints as `30.0`) but compare
//! numerically, so `30.0 == 30`.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, thiserror::Error)]
pub enum DecimalError {
    #[error("malformed decimal literal")]
    Malformed,
    #[error("decimal literal out of range")]
    OutOfRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decimal(rust_decimal::Decimal);

impl Decimal {
    pub const ZERO: Decimal = Decimal(rust_decimal::Decimal::ZERO);
    pub const ONE: Decimal = Decimal(rust_decimal::Decimal::ONE);

    pub fn from_int(value: i64) -> Self {
        Decimal(rust_decimal::Decimal::from(value))
    }

    /// True when the value has no fractional part (`30.0` counts).
    pub fn is_integer(&self) -> bool {
        self.0.fract().is_zero()
    }

    pub fn checked_add(self, other: Decimal) -> Option<Decimal> {
        self.0.checked_add(other.0).map(Decimal)
    }

    pub fn checked_sub(self, other: Decimal) -> Option<Decimal> {
        self.0.checked_sub(other.0).map(Decimal)
    }

    pub fn floor(self) -> Decimal {
        Decimal(self.0.floor())
    }

    pub fn ceil(self) -> Decimal {
        Decimal(self.0.ceil())
    }

    /// Midpoint of two values; used only to pick witnesses.
    pub fn midpoint(self, other: Decimal) -> Option<Decimal> {
        let sum = self.0.checked_add(other.0)?;
        sum.checked_div(rust_decimal::Decimal::TWO).map(Decimal)
    }

    /// Canonical form with trailing fractional zeros removed.
    pub fn normalized(self) -> Decimal {
        Decimal(self.0.normalize())
    }
}

/// Literal syntax `-?[0-9]+(\.[0-9]+)?`; no exponents, no leading `+`.
pub fn is_decimal_literal(text: &str) -> bool {
    let digits = text.strip_prefix('-').unwrap_or(text);
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (digits, None),
    };
    let all_digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    all_digits(int) && frac.is_none_or(all_digits)
}

impl FromStr for Decimal {
    type Err = DecimalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if !is_decimal_literal(s) {
            return Err(DecimalError::Malformed);
        }
        rust_decimal::Decimal::from_str_exact(s)
            .map(Decimal)
            .map_err(|_| DecimalError::OutOfRange)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<i64> for Decimal {
    fn from(value: i64) -> Self {
        Decimal::from_int(value)
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct DecimalVisitor;

        impl Visitor<'_> for DecimalVisitor {
            type Value = Decimal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal string or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Decimal, E> {
                v.parse().map_err(|e| E::custom(format!("`{v}`: {e}")))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Decimal, E> {
                Ok(Decimal::from_int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Decimal, E> {
                i64::try_from(v)
                    .map(Decimal::from_int)
                    .map_err(|_| E::custom("integer out of range"))
            }
        }

        deserializer.deserialize_any(DecimalVisitor)
    }
}
