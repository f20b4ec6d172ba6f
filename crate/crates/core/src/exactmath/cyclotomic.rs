use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};

use super::poly::IntPoly;
use super::rational::Rational;
use super::ExactError;

/// Euler's totient.
pub fn euler_totient(n: u32) -> u32 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// The `r`-th cyclotomic polynomial in `z`, via
/// `Phi_r = (z^r - 1) / prod_{d | r, d < r} Phi_d`.
pub fn cyclotomic_polynomial(r: u32) -> IntPoly {
    assert!(r >= 1, "cyclotomic order must be at least 1");
    (*cached_phi(r)).clone()
}

fn cached_phi(r: u32) -> Arc<IntPoly> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<IntPoly>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.read().unwrap().get(&r) {
        return p.clone();
    }
    let mut num = IntPoly::monomial(r as usize).sub(&IntPoly::one());
    for d in (1..r).filter(|d| r.is_multiple_of(*d)) {
        num = num
            .exact_div(&cached_phi(d))
            .expect("cyclotomic factors divide z^r - 1");
    }
    let p = Arc::new(num);
    cache.write().unwrap().insert(r, p.clone());
    p
}

/// Element of the cyclotomic field `Q(zeta_r)`, stored as a polynomial in
/// `zeta` of degree `< phi(r)` reduced modulo `Phi_r`.
///
/// Elements that lie in `Q` are stored without an order (`order == 0`), so a
/// rational constant compares and hashes equal whichever field produced it.
/// Combining two elements of different nonzero orders panics; use
/// [`super::field_arithmetic`] for a checked variant.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    pub fn rational(q: Rational) -> Self {
        if q.is_zero() {
            Cyclotomic { order: 0, coeffs: Vec::new() }
        } else {
            Cyclotomic { order: 0, coeffs: vec![q] }
        }
    }

    /// Reduce the polynomial `sum c_i zeta^i` (constant first) in `Q(zeta_r)`.
    pub fn from_poly(order: u32, poly: Vec<Rational>) -> Self {
        assert!(order >= 1, "cyclotomic order must be at least 1");
        let phi = cached_phi(order);
        let m = phi.degree().unwrap();
        let mut p = poly;
        for i in (m..p.len()).rev() {
            let c = std::mem::replace(&mut p[i], Rational::zero());
            if c.is_zero() {
                continue;
            }
            for (j, &b) in phi.coeffs()[..m].iter().enumerate() {
                if b != 0 {
                    p[i - m + j] = &p[i - m + j] - &(&c * &Rational::from_int(b));
                }
            }
        }
        p.resize(m, Rational::zero());
        Self::normalize(order, p)
    }

    fn normalize(order: u32, mut coeffs: Vec<Rational>) -> Self {
        if coeffs.iter().skip(1).all(Zero::is_zero) {
            let c = coeffs.drain(..).next().unwrap_or_else(Rational::zero);
            Self::rational(c)
        } else {
            Cyclotomic { order, coeffs }
        }
    }

    /// `zeta_r^n` for a primitive `r`-th root of unity.
    pub fn zeta_pow(order: u32, n: u32) -> Self {
        let n = (n % order) as usize;
        let mut p = vec![Rational::zero(); n + 1];
        p[n] = Rational::one();
        Self::from_poly(order, p)
    }

    pub fn zeta(order: u32) -> Self {
        Self::zeta_pow(order, 1)
    }

    /// Order of the field this element needs, or `None` for rational values.
    pub fn order(&self) -> Option<u32> {
        (self.order != 0).then_some(self.order)
    }

    /// Coefficients in powers of `zeta`, constant first. Rational values
    /// return at most one coefficient.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn as_rational(&self) -> Option<Rational> {
        (self.order == 0).then(|| self.coeffs.first().cloned().unwrap_or_else(Rational::zero))
    }

    fn join_order(a: u32, b: u32) -> Result<u32, ExactError> {
        match (a, b) {
            (0, o) | (o, 0) => Ok(o),
            (x, y) if x == y => Ok(x),
            (x, y) => Err(ExactError::FieldMismatch(format!("Q(zeta_{x}) vs Q(zeta_{y})"))),
        }
    }

    /// True when `self` and `other` can be combined.
    pub fn compatible(&self, other: &Self) -> bool {
        Self::join_order(self.order, other.order).is_ok()
    }

    fn padded(&self, order: u32) -> Vec<Rational> {
        let m = if order == 0 { 1 } else { euler_totient(order) as usize };
        let mut v = self.coeffs.clone();
        v.resize(m.max(v.len()), Rational::zero());
        v
    }

    fn lin(&self, rhs: &Self, sub: bool) -> Self {
        let order = Self::join_order(self.order, rhs.order).unwrap_or_else(|e| panic!("{e}"));
        let a = self.padded(order);
        let b = rhs.padded(order);
        let c = a
            .iter()
            .zip(&b)
            .map(|(x, y)| if sub { x - y } else { x + y })
            .collect();
        Self::normalize(order, c)
    }

    fn product(&self, rhs: &Self) -> Self {
        let order = Self::join_order(self.order, rhs.order).unwrap_or_else(|e| panic!("{e}"));
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
        if order == 0 {
            Self::normalize(0, out)
        } else {
            Self::from_poly(order, out)
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// `Phi_r`.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.order == 0 {
            return Some(Self::rational(self.coeffs[0].recip()?));
        }
        let phi: Vec<Rational> = cached_phi(self.order)
            .coeffs()
            .iter()
            .map(|&c| Rational::from_int(c))
            .collect();
        let (mut r0, mut r1) = (phi, trim(self.coeffs.clone()));
        let (mut s0, mut s1) = (Vec::new(), vec![Rational::one()]);
        while !r1.is_empty() {
            let (q, r) = qpoly_divrem(&r0, &r1);
            let s2 = qpoly_sub(&s0, &qpoly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // Phi_r is irreducible, so the gcd is a nonzero constant.
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].recip()?;
        let s: Vec<Rational> = s0.iter().map(|x| x * &c).collect();
        Some(Self::from_poly(self.order, s))
    }

    /// Parse a polynomial in `z` (e.g. `"1/2*z^2 - z + 3"`) as an element of
    /// `Q(zeta_order)`.
    pub fn parse(s: &str, order: u32) -> Result<Self, ExactError> {
        if order == 0 {
            return Err(ExactError::Parse("cyclotomic order must be at least 1".into()));
        }
        let poly = parse_z_poly(s)?;
        Ok(Self::from_poly(order, poly))
    }
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn qpoly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let z = Rational::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

fn qpoly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(out)
}

fn qpoly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].recip().expect("nonzero divisor");
    if rem.len() <= db {
        return (Vec::new(), trim(rem));
    }
    let mut quot = vec![Rational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] * &lead;
        if !c.is_zero() {
            for (j, y) in b.iter().enumerate() {
                rem[i + j] = &rem[i + j] - &(&c * y);
            }
        }
        quot[i] = c;
    }
    rem.truncate(db);
    (trim(quot), trim(rem))
}

/// Parse `sum c_i z^i` with rational coefficients; returns coefficients
/// constant first.
fn parse_z_poly(s: &str) -> Result<Vec<Rational>, ExactError> {
    let err = |m: &str| ExactError::Parse(format!("{m} in {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err("empty scalar"));
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = compact.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' && bytes[i - 1] != b'*' {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);
    let mut out: Vec<Rational> = Vec::new();
    for term in terms {
        let (neg, body) = match term.as_bytes().first() {
            Some(b'-') => (true, &term[1..]),
            Some(b'+') => (false, &term[1..]),
            _ => (false, term),
        };
        let (coef, power) = match body.find('z') {
            None => (body.parse::<Rational>()?, 0usize),
            Some(pos) => {
                let c = body[..pos].trim_end_matches('*');
                let coef = if c.is_empty() { Rational::one() } else { c.parse::<Rational>()? };
                let rest = &body[pos + 1..];
                let power = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .and_then(|p| p.parse::<usize>().ok())
                        .ok_or_else(|| err("bad exponent"))?
                };
                (coef, power)
            }
        };
        let coef = if neg { -coef } else { coef };
        if out.len() <= power {
            out.resize(power + 1, Rational::zero());
        }
        out[power] = &out[power] + &coef;
    }
    Ok(out)
}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic { order: 0, coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.order == 0 && self.coeffs.is_empty()
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Self::rational(Rational::one())
    }
}

impl Add for Cyclotomic {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.lin(&rhs, false)
    }
}

impl Sub for Cyclotomic {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.lin(&rhs, true)
    }
}

impl Mul for Cyclotomic {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.product(&rhs)
    }
}

impl Div for Cyclotomic {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.inverse().expect("division by zero cyclotomic element");
        self.product(&inv)
    }
}

impl Neg for Cyclotomic {
    type Output = Self;
    fn neg(self) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl From<Rational> for Cyclotomic {
    fn from(q: Rational) -> Self {
        Self::rational(q)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let a = c.abs();
            if i == 0 {
                write!(f, "{a}")?;
                continue;
            }
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            if i == 1 {
                f.write_str("z")?;
            } else {
                write!(f, "z^{i}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order {
            0 => write!(f, "{self}"),
            r => write!(f, "[{self}]_{r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str, r: u32) -> Cyclotomic {
        Cyclotomic::parse(s, r).unwrap()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), IntPoly::new(vec![-1, 1]));
        assert_eq!(cyclotomic_polynomial(3), IntPoly::new(vec![1, 1, 1]));
        // z^6 - 1 divided by (z - 1)(z + 1)(z^2 + z + 1)
        assert_eq!(cyclotomic_polynomial(6), IntPoly::new(vec![1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(4), IntPoly::new(vec![1, 0, 1]));
    }

    #[test]
    fn degree_is_totient_and_integral() {
        for r in 1..=12 {
            let p = cyclotomic_polynomial(r);
            assert_eq!(p.degree(), Some(euler_totient(r) as usize), "r = {r}");
            assert_eq!(p.leading(), 1);
        }
    }

    #[test]
    fn zeta_squared_order_three() {
        let z = Cyclotomic::zeta(3);
        assert_eq!(z.clone() * z, c("-1 - z", 3));
    }

    #[test]
    fn one_plus_zeta_times_one_plus_zeta_squared() {
        // (1 + z)(1 + z^2) = 1 + z + z^2 + z^3 = 0 + 1 mod (z^2 + z + 1)
        let a = c("1 + z", 3);
        let b = c("1 + z^2", 3);
        assert_eq!(a * b, Cyclotomic::one());
    }

    #[test]
    fn rationals_are_order_free() {
        assert_eq!(Cyclotomic::zeta_pow(3, 3), Cyclotomic::one());
        assert_eq!(Cyclotomic::zeta(2), -Cyclotomic::one());
        assert_eq!(Cyclotomic::zeta(4) * Cyclotomic::zeta(4), -Cyclotomic::one());
        assert_eq!(Cyclotomic::zeta(4).order(), Some(4));
        assert_eq!(Cyclotomic::one().order(), None);
    }

    #[test]
    fn inverse_round_trip() {
        for r in [3u32, 4, 5, 7, 8, 12] {
            for s in ["z", "1 + z", "2 - 1/3*z", "z^2 + 5"] {
                let a = c(s, r);
                if a.is_zero() {
                    continue;
                }
                let inv = a.inverse().unwrap();
                assert_eq!(a * inv, Cyclotomic::one(), "r = {r}, a = {s}");
            }
        }
    }

    #[test]
    fn display_parse_round_trip() {
        let a = c("1/2*z^2 - z + 3", 5);
        assert_eq!(a.to_string(), "1/2*z^2 - z + 3");
        assert_eq!(c(&a.to_string(), 5), a);
        assert_eq!(c("-z - 1", 3).to_string(), "-z - 1");
    }

    #[test]
    #[should_panic(expected = "zeta_3")]
    fn mixing_orders_panics() {
        let _ = Cyclotomic::zeta(3) + Cyclotomic::zeta(4);
    }
}
