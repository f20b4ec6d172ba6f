use std::fmt;

use serde::{Deserialize, Serialize};

/// Polynomial with `i64` coefficients, constant term first, no trailing zeros.
///
/// Used for characteristic polynomials (in `t`) and cyclotomic polynomials
/// (in `z`). Serializes as the bare coefficient array.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly { coeffs: vec![1] }
    }

    /// `t^n`
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![0; n + 1];
        c[n] = 1;
        IntPoly { coeffs: c }
    }

    /// `t - root`
    pub fn linear(root: i64) -> Self {
        IntPoly::new(vec![-root, 1])
    }

    /// `prod (t - r)` over the given roots.
    pub fn from_roots<I: IntoIterator<Item = i64>>(roots: I) -> Self {
        roots
            .into_iter()
            .fold(IntPoly::one(), |acc, r| acc.mul(&IntPoly::linear(r)))
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn leading(&self) -> i64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, t: i64) -> i128 {
        self.coeffs
            .iter()
            .rev()
            .fold(0i128, |acc, &c| acc * t as i128 + c as i128)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new(
            (0..n)
                .map(|i| checked(self.coeff(i).checked_add(other.coeff(i))))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new(
            (0..n)
                .map(|i| checked(self.coeff(i).checked_sub(other.coeff(i))))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = checked(out[i + j].checked_add(checked(a.checked_mul(b))));
            }
        }
        IntPoly::new(out)
    }

    /// Quotient and remainder by a monic divisor; `None` if the divisor is
    /// zero or not monic.
    pub fn div_rem_monic(&self, divisor: &Self) -> Option<(Self, Self)> {
        let dd = divisor.degree()?;
        if divisor.leading() != 1 {
            return None;
        }
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((IntPoly::zero(), self.clone()));
        }
        let mut quot = vec![0i64; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd];
            quot[i] = c;
            if c != 0 {
                for (j, &b) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] = checked(rem[i + j].checked_sub(checked(c.checked_mul(b))));
                }
            }
        }
        rem.truncate(dd);
        Some((IntPoly::new(quot), IntPoly::new(rem)))
    }

    /// Exact quotient when `divisor` is monic and divides `self`.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem_monic(divisor)?;
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, dividend: &Self) -> bool {
        dividend.exact_div(self).is_some()
    }

    /// If the polynomial is monic and splits over the integers into linear
    /// factors with nonnegative roots, return the roots in nondecreasing order.
    ///
    /// Candidate roots are bounded by `|c_{n-1}|`, the sum of the roots when
    /// they are all nonnegative.
    pub fn nonnegative_integer_roots(&self) -> Option<Vec<i64>> {
        let n = self.degree()?;
        if self.leading() != 1 {
            return None;
        }
        let bound = if n == 0 { 0 } else { self.coeff(n - 1).unsigned_abs() as i64 };
        let mut rest = self.clone();
        let mut roots = Vec::with_capacity(n);
        let mut r = 0;
        while rest.degree().unwrap_or(0) > 0 && r <= bound {
            match rest.exact_div(&IntPoly::linear(r)) {
                Some(q) => {
                    roots.push(r);
                    rest = q;
                }
                None => r += 1,
            }
        }
        (rest == IntPoly::one()).then_some(roots)
    }

    fn fmt_in(&self, var: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (i, a) {
                (0, _) => write!(f, "{a}")?,
                (_, 1) => {}
                _ => write!(f, "{a}*")?,
            }
            match i {
                0 => {}
                1 => f.write_str(var)?,
                _ => write!(f, "{var}^{i}")?,
            }
        }
        Ok(())
    }

    /// Display using the given variable name.
    pub fn display<'a>(&'a self, var: &'a str) -> impl fmt::Display + 'a {
        struct D<'a>(&'a IntPoly, &'a str);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_in(self.1, f)
            }
        }
        D(self, var)
    }
}

fn checked(v: Option<i64>) -> i64 {
    v.expect("integer polynomial coefficient overflow")
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_in("t", f)
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_in("t", f)
    }
}
