//! Exact scalars and exact linear algebra.
//!
//! Two scalar types implement [`Scalar`]: [`Rational`] and [`Cyclotomic`].
//! Everything above this module is generic over the scalar type.

mod cyclotomic;
mod matrix;
mod poly;
mod rational;

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cyclotomic::{cyclotomic_polynomial, euler_totient, Cyclotomic};
pub use matrix::{bareiss_rank_integer_rows, rref_rows, Matrix};
pub use poly::IntPoly;
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Field descriptor carried by every arrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Field {
    Rational,
    Cyclotomic { order: u32 },
}

impl Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Field::Rational => f.write_str("Q"),
            Field::Cyclotomic { order } => write!(f, "Q(zeta_{order})"),
        }
    }
}

/// Exact field element.
///
/// `rank` defaults to plain Gauss-Jordan elimination; [`Rational`] overrides it
/// with fraction-free elimination on integer-scaled rows.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + Eq
    + Ord
    + Hash
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn from_i64(n: i64) -> Self;

    fn from_rational(q: Rational) -> Self;

    fn inv(&self) -> Option<Self>;

    /// Whether the value is an element of `field`.
    fn in_field(&self, field: Field) -> bool;

    /// Whether `self` and `other` live in a common field.
    fn compatible(&self, other: &Self) -> bool;

    fn parse_in(s: &str, field: Field) -> Result<Self, ExactError>;

    /// The value as a rational, if it is one.
    fn to_rational(&self) -> Option<Rational>;

    fn rank(m: &Matrix<Self>) -> usize {
        rref_rows(m.row_vecs(), m.cols()).1.len()
    }
}

impl Scalar for Rational {
    fn from_i64(n: i64) -> Self {
        Rational::from_int(n)
    }

    fn from_rational(q: Rational) -> Self {
        q
    }

    fn inv(&self) -> Option<Self> {
        self.recip()
    }

    fn in_field(&self, _field: Field) -> bool {
        true
    }

    fn compatible(&self, _other: &Self) -> bool {
        true
    }

    fn parse_in(s: &str, _field: Field) -> Result<Self, ExactError> {
        s.parse()
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn rank(m: &Matrix<Self>) -> usize {
        let rows: Vec<Vec<num_bigint::BigInt>> = (0..m.rows())
            .map(|i| matrix::integer_row(m.row(i)))
            .collect();
        bareiss_rank_integer_rows(rows, m.cols())
    }
}

impl Scalar for Cyclotomic {
    fn from_i64(n: i64) -> Self {
        Cyclotomic::rational(Rational::from_int(n))
    }

    fn from_rational(q: Rational) -> Self {
        Cyclotomic::rational(q)
    }

    fn inv(&self) -> Option<Self> {
        self.inverse()
    }

    fn in_field(&self, field: Field) -> bool {
        match (self.order(), field) {
            (None, _) => true,
            (Some(r), Field::Cyclotomic { order }) => r == order,
            (Some(_), Field::Rational) => false,
        }
    }

    fn compatible(&self, other: &Self) -> bool {
        Cyclotomic::compatible(self, other)
    }

    fn parse_in(s: &str, field: Field) -> Result<Self, ExactError> {
        match field {
            Field::Rational => Ok(Cyclotomic::rational(s.parse()?)),
            Field::Cyclotomic { order } => Cyclotomic::parse(s, order),
        }
    }

    fn to_rational(&self) -> Option<Rational> {
        self.as_rational()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked binary arithmetic: reports field mismatch and division by zero
/// instead of panicking.
pub fn field_arithmetic<S: Scalar>(a: &S, b: &S, op: ArithOp) -> Result<S, ExactError> {
    if !a.compatible(b) {
        return Err(ExactError::FieldMismatch(format!("{a:?} and {b:?}")));
    }
    let (a, b) = (a.clone(), b.clone());
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => {
            if b.is_zero() {
                return Err(ExactError::DivisionByZero);
            }
            a / b
        }
    })
}
