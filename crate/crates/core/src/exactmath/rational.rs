use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ExactError;

/// Arbitrary-precision rational number.
///
/// Values whose numerator and denominator fit in `i64` are kept inline and
/// operated on with `i128` intermediates; anything larger is promoted to a
/// [`BigRational`]. The representation is canonical: a value is `Big` only if
/// it does not fit the small form, so derived equality and hashing are sound.
#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Clone)]
enum Repr {
    /// numerator, denominator > 0, gcd = 1
    Small(i64, i64),
    Big(BigRational),
}

impl Rational {
    pub fn from_int(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    /// `num / den`, reduced. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_big(value: BigRational) -> Self {
        let (n, d) = (value.numer(), value.denom());
        match (n.to_i64(), d.to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(value)),
        }
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(BigRational::new(BigInt::from(n), BigInt::from(d)))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    /// The value as an `i64` if it is an integer in range.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn recip(&self) -> Option<Self> {
        match &self.0 {
            Repr::Small(0, _) => None,
            Repr::Small(n, d) => Some(Self::from_i128(*d as i128, *n as i128)),
            Repr::Big(b) => Some(Self::from_big(b.recip())),
        }
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }
    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_big(BigRational::from_integer(n))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $small:expr, $big:expr) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $trait::$method(&self, &rhs)
            }
        }

        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &rhs.0) {
                    let f: fn(i128, i128, i128, i128) -> Option<(i128, i128)> = $small;
                    if let Some((n, m)) = f(*a as i128, *b as i128, *c as i128, *d as i128) {
                        return Rational::from_i128(n, m);
                    }
                }
                let g: fn(BigRational, BigRational) -> BigRational = $big;
                Rational::from_big(g(self.to_big(), rhs.to_big()))
            }
        }
    };
}

binop!(
    Add,
    add,
    |a, b, c, d| {
        let n = a.checked_mul(d)?.checked_add(c.checked_mul(b)?)?;
        Some((n, b * d))
    },
    |x, y| x + y
);
binop!(
    Sub,
    sub,
    |a, b, c, d| {
        let n = a.checked_mul(d)?.checked_sub(c.checked_mul(b)?)?;
        Some((n, b * d))
    },
    |x, y| x - y
);
binop!(Mul, mul, |a, b, c, d| Some((a * c, b * d)), |x, y| x * y);
binop!(
    Div,
    div,
    |a, b, c, d| {
        assert!(c != 0, "division by zero rational");
        Some((a * d, b * c))
    },
    |x, y| {
        assert!(!y.is_zero(), "division by zero rational");
        x / y
    }
);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self.0 {
            Repr::Small(n, d) if n != i64::MIN => Rational(Repr::Small(-n, d)),
            Repr::Small(n, d) => Rational::from_i128(-(n as i128), d as i128),
            Repr::Big(b) => Rational::from_big(-b),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ExactError;

    /// Accepts `"p"` or `"p/q"` with optional sign and surrounding whitespace.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExactError::Parse(format!("invalid rational {s:?}"));
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = num.parse().map_err(|_| bad())?;
        let d: BigInt = den.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rational::from_big(BigRational::new(n, d)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn half_plus_third() {
        assert_eq!(q(1, 2) + q(1, 3), q(5, 6));
    }

    #[test]
    fn normalises_sign_and_gcd() {
        assert_eq!(q(4, -6), q(-2, 3));
        assert_eq!(q(0, -5), Rational::zero());
        assert_eq!(q(-2, 3).to_string(), "-2/3");
        assert_eq!(q(6, 3).to_string(), "2");
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rational::from_int(i64::MAX) * Rational::from_int(4);
        assert_eq!(big.to_string(), "36893488147419103228");
        let back = big / Rational::from_int(4);
        assert_eq!(back, Rational::from_int(i64::MAX));
        assert_eq!(back.to_i64(), Some(i64::MAX));
        assert_eq!(-Rational::from_int(i64::MIN), Rational::from_int(i64::MAX) + Rational::one());
    }

    #[test]
    fn parse_forms() {
        assert_eq!("3".parse::<Rational>().unwrap(), q(3, 1));
        assert_eq!(" -10/4 ".parse::<Rational>().unwrap(), q(-5, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    fn arb() -> impl Strategy<Value = Rational> {
        (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| Rational::new(n, d))
    }

    proptest! {
        #[test]
        fn add_sub_inverse(a in arb(), b in arb()) {
            prop_assert_eq!(&(&a + &b) - &b, a);
        }

        #[test]
        fn mul_div_inverse(a in arb(), b in arb()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!(&(&a * &b) / &b, a);
        }

        #[test]
        fn order_matches_bigrational(a in arb(), b in arb()) {
            prop_assert_eq!(a.cmp(&b), a.to_big().cmp(&b.to_big()));
        }
    }
}
