//! The four-valued sign domain `{+, -, 0, ?}` and its operators.

use std::fmt;
use std::ops::{Add, Mul, Neg};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Sign of a qualitative relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "?")]
    Ambig,
}

// The operator traits below delegate to these, so `a.mul(b)` works without
// importing them.
#[allow(clippy::should_implement_trait)]
impl Sign {
    pub const ALL: [Sign; 4] = [Sign::Plus, Sign::Minus, Sign::Zero, Sign::Ambig];

    /// Sign of a product (`⊗`).
    pub fn mul(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Ambig, _) | (_, Ambig) => Ambig,
            (a, b) if a == b => Plus,
            _ => Minus,
        }
    }

    /// Sign of a sum (`⊕`).
    pub fn add(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (Zero, x) | (x, Zero) => x,
            (a, b) if a == b => a,
            _ => Ambig,
        }
    }

    /// Sign of a negation (`⊖`).
    pub fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
            s => s,
        }
    }

    pub fn is_ambiguous(self) -> bool {
        self == Sign::Ambig
    }

    /// Whether `self` is at least as informative as `other`.
    ///
    /// Signs denote sets of admissible non-strict relations: `?` admits
    /// everything, `+` and `-` the monotone ones, and `0` only invariance,
    /// which is both non-strictly increasing and non-strictly decreasing.
    /// A sign refines another when its set is contained in the other's.
    pub fn refines(self, other: Sign) -> bool {
        use Sign::*;
        match (self, other) {
            (a, b) if a == b => true,
            (_, Ambig) => true,
            (Zero, Plus) | (Zero, Minus) => true,
            _ => false,
        }
    }

    /// Whether `self` is strictly more informative than `other`.
    pub fn strictly_refines(self, other: Sign) -> bool {
        self != other && self.refines(other)
    }

    /// Interval semantics: does the real `x` belong to this sign?
    pub fn contains(self, x: f64) -> bool {
        match self {
            Sign::Plus => x > 0.0,
            Sign::Minus => x < 0.0,
            Sign::Zero => x == 0.0,
            Sign::Ambig => true,
        }
    }

    /// The exact sign of a real number.
    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Plus
        } else if x < 0.0 {
            Sign::Minus
        } else if x == 0.0 {
            Sign::Zero
        } else {
            Sign::Ambig
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
            Sign::Zero => "0",
            Sign::Ambig => "?",
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::mul(self, rhs)
    }
}

impl Add for Sign {
    type Output = Sign;
    fn add(self, rhs: Sign) -> Sign {
        Sign::add(self, rhs)
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        Sign::neg(self)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid sign `{0}` (expected one of +, -, 0, ?)")]
pub struct ParseSignError(pub String);

impl FromStr for Sign {
    type Err = ParseSignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" => Ok(Sign::Plus),
            "-" | "\u{2212}" => Ok(Sign::Minus),
            "0" => Ok(Sign::Zero),
            "?" => Ok(Sign::Ambig),
            other => Err(ParseSignError(other.to_string())),
        }
    }
}
