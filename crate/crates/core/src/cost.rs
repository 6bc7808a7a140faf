use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::rational::{format_rational, parse_rational, to_f64};

/// Vertex cost: a nonnegative exact rational, or the infinite sentinel used
/// for vertices that may never be selected.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cost {
    Finite(BigRational),
    Infinite,
}

impl Cost {
    pub fn zero() -> Self {
        Cost::Finite(BigRational::zero())
    }

    pub fn unit() -> Self {
        Cost::Finite(crate::rational::int(1))
    }

    pub fn from_int(v: i64) -> Self {
        assert!(v >= 0, "costs are nonnegative");
        Cost::Finite(crate::rational::int(v))
    }

    /// Returns `None` for negative values.
    pub fn finite(r: BigRational) -> Option<Self> {
        if r.is_negative() {
            None
        } else {
            Some(Cost::Finite(r))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Cost::Infinite)
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            Cost::Finite(r) => Some(r),
            Cost::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Cost::Finite(r) => to_f64(r),
            Cost::Infinite => f64::INFINITY,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") {
            return Some(Cost::Infinite);
        }
        parse_rational(t).and_then(Cost::finite)
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.cmp(b),
            (Cost::Finite(_), Cost::Infinite) => Ordering::Less,
            (Cost::Infinite, Cost::Finite(_)) => Ordering::Greater,
            (Cost::Infinite, Cost::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        &self + &rhs
    }
}

impl Add<&Cost> for &Cost {
    type Output = Cost;
    fn add(self, rhs: &Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl<'a> Sum<&'a Cost> for Cost {
    fn sum<I: Iterator<Item = &'a Cost>>(iter: I) -> Cost {
        iter.fold(Cost::zero(), |acc, c| &acc + c)
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::zero(), |acc, c| acc + c)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(r) => f.write_str(&format_rational(r)),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
