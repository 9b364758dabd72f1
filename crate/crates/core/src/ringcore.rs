//! Exact arithmetic in `Z[v, v^-1]`, with `q = v^2`.
//!
//! A [`LaurentPoly`] is stored as a strictly increasing list of
//! `(exponent of v, coefficient)` pairs with no zero coefficients, so equal
//! values always have identical representations.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::RingError;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: Vec<(i32, BigInt)>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c * v^k`.
    pub fn monomial(c: impl Into<BigInt>, k: i32) -> Self {
        let c = c.into();
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { terms: vec![(k, c)] }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    /// `q^k = v^(2k)`.
    pub fn q_pow(k: i32) -> Self {
        Self::monomial(1, 2 * k)
    }

    /// The indeterminate `q`.
    pub fn q() -> Self {
        Self::q_pow(1)
    }

    /// `q^k - 1`; the coefficient `(q_s - 1)` of the quadratic relation.
    pub fn q_pow_minus_one(k: i32) -> Self {
        Self::from_terms(vec![(0, BigInt::from(-1)), (2 * k, BigInt::one())])
    }

    /// Builds a polynomial from arbitrary `(v-exponent, coefficient)` pairs,
    /// merging duplicates and dropping zeros.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i32, BigInt)>,
    {
        let mut v: Vec<(i32, BigInt)> = terms.into_iter().collect();
        v.sort_by_key(|t| t.0);
        let mut out: Vec<(i32, BigInt)> = Vec::with_capacity(v.len());
        for (k, c) in v {
            match out.last_mut() {
                Some((lk, lc)) if *lk == k => *lc += c,
                _ => out.push((k, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        LaurentPoly { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn terms(&self) -> &[(i32, BigInt)] {
        &self.terms
    }

    pub fn coeff(&self, k: i32) -> BigInt {
        match self.terms.binary_search_by_key(&k, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.first().map(|t| t.0)
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.last().map(|t| t.0)
    }

    /// `Some((c, k))` when the value is `c * v^k` with `c = ±1`.
    pub fn as_unit(&self) -> Option<(i32, i32)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (k, c) = &self.terms[0];
        if c.is_one() {
            Some((1, *k))
        } else if (-c).is_one() {
            Some((-1, *k))
        } else {
            None
        }
    }

    pub fn is_unit(&self) -> bool {
        self.as_unit().is_some()
    }

    /// True when only even powers of `v` occur, i.e. the value lies in `Z[q, q^-1]`.
    pub fn is_even(&self) -> bool {
        self.terms.iter().all(|(k, _)| k % 2 == 0)
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.terms.iter().all(|(_, c)| !c.is_negative())
    }

    /// Multiplication by `v^k`.
    pub fn shift(&self, k: i32) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Exact division. Fails with [`RingError::NonDivisible`] when `divisor`
    /// does not divide `self` in `Z[v, v^-1]`.
    pub fn exact_div(&self, divisor: &LaurentPoly) -> Result<LaurentPoly, RingError> {
        if divisor.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        if let Some((sign, k)) = divisor.as_unit() {
            let s = self.shift(-k);
            return Ok(if sign < 0 { -s } else { s });
        }
        // Long division on the normalized polynomials in v, from the top.
        let d_lo = divisor.min_exp().unwrap();
        let d_hi = divisor.max_exp().unwrap();
        let (_, lead) = divisor.terms.last().unwrap();
        let mut rem: Vec<BigInt> = dense(self);
        let r_lo = self.min_exp().unwrap();
        let dd: Vec<BigInt> = dense(divisor);
        let deg_d = (d_hi - d_lo) as usize;
        if rem.len() <= deg_d {
            return Err(RingError::NonDivisible);
        }
        let mut quot = vec![BigInt::zero(); rem.len() - deg_d];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + deg_d];
            if top.is_zero() {
                continue;
            }
            let (qc, r) = top.div_rem(lead);
            if !r.is_zero() {
                return Err(RingError::NonDivisible);
            }
            for (j, dc) in dd.iter().enumerate() {
                if !dc.is_zero() {
                    rem[i + j] -= &qc * dc;
                }
            }
            quot[i] = qc;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(RingError::NonDivisible);
        }
        let base = r_lo - d_lo;
        Ok(Self::from_terms(
            quot.into_iter()
                .enumerate()
                .map(|(i, c)| (base + i as i32, c)),
        ))
    }

    /// Substitutes the prime power `q` (so `v = sqrt(q)`); only defined when
    /// every exponent of `v` is even. Negative powers must divide evenly.
    pub fn eval_q(&self, q: u64) -> Result<BigInt, RingError> {
        if q == 0 {
            return Err(RingError::NonPositiveSpecialization);
        }
        if !self.is_even() {
            return Err(RingError::OddHalfPower);
        }
        let qb = BigInt::from(q);
        let lo = self.min_exp().unwrap_or(0).min(0) / 2;
        // Evaluate q^(-lo) * self as an ordinary polynomial, then divide.
        let mut acc = BigInt::zero();
        for (k, c) in &self.terms {
            let e = (k / 2 - lo) as u32;
            acc += c * num_traits::pow(qb.clone(), e as usize);
        }
        let den = num_traits::pow(qb, (-lo) as usize);
        let (quo, r) = acc.div_rem(&den);
        if !r.is_zero() {
            return Err(RingError::NonDivisible);
        }
        Ok(quo)
    }

    /// Evaluation at an arbitrary integer value of `q`, yielding a rational
    /// pair `(numerator, denominator)` exact when negative powers occur.
    pub fn eval_q_rational(&self, q: &BigInt) -> Result<(BigInt, BigInt), RingError> {
        if !self.is_even() {
            return Err(RingError::OddHalfPower);
        }
        let lo = self.min_exp().unwrap_or(0).min(0) / 2;
        let mut acc = BigInt::zero();
        for (k, c) in &self.terms {
            let e = (k / 2 - lo) as usize;
            acc += c * num_traits::pow(q.clone(), e);
        }
        Ok((acc, num_traits::pow(q.clone(), (-lo) as usize)))
    }

    /// Re-expands an element of `Z[q]` in powers of `(q - shift)`:
    /// returns `c_k` with `self = sum c_k (q - shift)^k`.
    pub fn taylor_in_q(&self, shift: i64) -> Option<Vec<BigInt>> {
        if !self.is_even() || self.min_exp().map_or(false, |e| e < 0) {
            return None;
        }
        let deg = self.max_exp().unwrap_or(0) / 2;
        let mut c: Vec<BigInt> = (0..=deg).map(|k| self.coeff(2 * k)).collect();
        // Repeated synthetic division by (q - shift).
        let s = BigInt::from(shift);
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = &c[j + 1] * &s;
                c[j] += t;
            }
        }
        Some(c)
    }

    /// A polynomial in `q` whose expansion in powers of `(q - 1)` has
    /// nonnegative coefficients.
    pub fn nonnegative_in_q_minus_one(&self) -> bool {
        self.taylor_in_q(1).is_some_and(|t| t.iter().all(|c| !c.is_negative()))
    }

    /// Sign-certified positivity at every prime power `q`.
    ///
    /// Returns `true` when `p(q) > 0` for all prime powers; the decision first
    /// tries a nonnegative expansion in powers of `(q - 1)` and falls back to a
    /// root bound plus direct evaluation.
    pub fn positive_at_prime_powers(&self) -> bool {
        if self.is_zero() || !self.is_even() {
            return false;
        }
        if self.min_exp().unwrap() < 0 {
            // q^k p(q) has the same sign for q > 0.
            let k = -self.min_exp().unwrap();
            let k = k + (k & 1);
            return self.shift(k).positive_at_prime_powers();
        }
        if let Some(t) = self.taylor_in_q(1) {
            if t.iter().all(|c| !c.is_negative()) && t.iter().any(|c| c.is_positive()) {
                return true;
            }
        }
        let (_, lead) = self.terms.last().unwrap();
        if !lead.is_positive() {
            return false;
        }
        // Cauchy bound on roots of p as a polynomial in q.
        let lead_abs = lead.abs();
        let bound: BigInt = self
            .terms
            .iter()
            .take(self.terms.len() - 1)
            .map(|(_, c)| {
                let (d, r) = c.abs().div_rem(&lead_abs);
                if r.is_zero() {
                    d
                } else {
                    d + 1
                }
            })
            .max()
            .unwrap_or_else(BigInt::zero)
            + 1;
        // Past this bound the scan is too long to be worth it; report "not certified".
        let bound = match bound.to_u64() {
            Some(b) if b <= 1 << 20 => b,
            _ => return false,
        };
        (2..=bound.max(2))
            .filter(|&n| is_prime_power(n))
            .all(|n| self.eval_q(n).map_or(false, |x| x.is_positive()))
    }

    /// `[[exponent, coefficient], ...]` in the v-convention (`q = v^2`).
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(k, c)| Value::Array(vec![Value::from(*k), bigint_json(c)]))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let arr = v.as_array()?;
        let mut terms = Vec::with_capacity(arr.len());
        for t in arr {
            let pair = t.as_array()?;
            if pair.len() != 2 {
                return None;
            }
            let k = i32::try_from(pair[0].as_i64()?).ok()?;
            let c = match &pair[1] {
                Value::Number(n) => BigInt::from(n.as_i64()?),
                Value::String(s) => s.parse().ok()?,
                _ => return None,
            };
            terms.push((k, c));
        }
        Some(Self::from_terms(terms))
    }
}

fn bigint_json(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(x) => Value::from(x),
        None => Value::String(c.to_string()),
    }
}

fn dense(p: &LaurentPoly) -> Vec<BigInt> {
    let lo = p.min_exp().unwrap();
    let hi = p.max_exp().unwrap();
    let mut v = vec![BigInt::zero(); (hi - lo + 1) as usize];
    for (k, c) in &p.terms {
        v[(k - lo) as usize] = c.clone();
    }
    v
}

pub fn is_prime_power(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            return m == 1;
        }
        p += 1;
    }
    true
}

fn merge(a: &[(i32, BigInt)], b: &[(i32, BigInt)], negate_b: bool) -> Vec<(i32, BigInt)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                let c = if negate_b { -&b[j].1 } else { b[j].1.clone() };
                out.push((b[j].0, c));
                j += 1;
            }
            Ordering::Equal => {
                let c = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly { terms: merge(&self.terms, &rhs.terms, false) }
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly { terms: merge(&self.terms, &rhs.terms, true) }
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        self.terms = merge(&self.terms, &rhs.terms, false);
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        self.terms = merge(&self.terms, &rhs.terms, true);
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect() }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -(self.clone())
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        if self.terms.len() == 1 {
            let (k, c) = &self.terms[0];
            return LaurentPoly {
                terms: rhs.terms.iter().map(|(e, x)| (e + k, x * c)).collect(),
            };
        }
        if rhs.terms.len() == 1 {
            return rhs * self;
        }
        let lo = self.min_exp().unwrap() + rhs.min_exp().unwrap();
        let hi = self.max_exp().unwrap() + rhs.max_exp().unwrap();
        let mut acc = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                acc[(a + b - lo) as usize] += x * y;
            }
        }
        LaurentPoly {
            terms: acc
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (lo + i as i32, c))
                .collect(),
        }
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        LaurentPoly::constant(c)
    }
}

impl fmt::Display for LaurentPoly {
    /// Prints in `q` when all exponents are even, otherwise in `v`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let even = self.is_even();
        let (var, div) = if even { ("q", 2) } else { ("v", 1) };
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            let e = k / div;
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let coeff_shown = !a.is_one() || e == 0;
            if coeff_shown {
                write!(f, "{a}")?;
            }
            if e != 0 {
                if coeff_shown {
                    write!(f, "*")?;
                }
                if e == 1 {
                    write!(f, "{var}")?;
                } else {
                    write!(f, "{var}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(terms: &[(i32, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().map(|&(k, c)| (k, BigInt::from(c))))
    }

    #[test]
    fn cancellation_to_monomial() {
        let a = p(&[(2, 1), (0, -1)]);
        assert_eq!(&a + &LaurentPoly::one(), p(&[(2, 1)]));
    }

    #[test]
    fn monomial_division() {
        let a = p(&[(4, 1), (2, 1)]);
        assert_eq!(a.exact_div(&p(&[(2, 1)])).unwrap(), p(&[(2, 1), (0, 1)]));
    }

    #[test]
    fn non_divisible() {
        let a = p(&[(2, 1), (0, 1)]);
        let b = p(&[(2, 1), (0, -1)]);
        assert!(matches!(a.exact_div(&b), Err(RingError::NonDivisible)));
    }

    #[test]
    fn poincare_division() {
        // (1 + q)^2 / (1 + q)
        let a = p(&[(0, 1), (2, 2), (4, 1)]);
        let b = p(&[(0, 1), (2, 1)]);
        assert_eq!(a.exact_div(&b).unwrap(), b);
    }

    #[test]
    fn eval_rejects_odd() {
        assert!(matches!(p(&[(1, 1)]).eval_q(4), Err(RingError::OddHalfPower)));
        assert_eq!(p(&[(2, 1), (0, -1)]).eval_q(5).unwrap(), BigInt::from(4));
        assert_eq!(p(&[(-2, 4)]).eval_q(2).unwrap(), BigInt::from(2));
    }

    #[test]
    fn display_forms() {
        assert_eq!(p(&[(2, 1), (0, -1)]).to_string(), "q - 1");
        assert_eq!(p(&[(4, 2), (-2, 1)]).to_string(), "2*q^2 + q^-1");
        assert_eq!(p(&[(1, 1)]).to_string(), "v");
    }

    #[test]
    fn prime_power_positivity() {
        assert!(p(&[(2, 1), (0, -1)]).positive_at_prime_powers());
        // q^2 - 3q + 3 = (q-1)^2 - (q-1) + 1 fails the (q-1) certificate but is positive.
        assert!(p(&[(4, 1), (2, -3), (0, 3)]).positive_at_prime_powers());
        // q - 2 vanishes at q = 2.
        assert!(!p(&[(2, 1), (0, -2)]).positive_at_prime_powers());
        assert!(!LaurentPoly::zero().positive_at_prime_powers());
    }

    #[test]
    fn taylor_expansion() {
        // q^2 = (q-1)^2 + 2(q-1) + 1
        let t = p(&[(4, 1)]).taylor_in_q(1).unwrap();
        assert_eq!(t, vec![BigInt::from(1), BigInt::from(2), BigInt::from(1)]);
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-6i32..6, -20i64..20), 0..6).prop_map(|v| {
            LaurentPoly::from_terms(v.into_iter().map(|(k, c)| (k, BigInt::from(c))))
        })
    }

    proptest! {
        #[test]
        fn div_inverts_mul(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let prod = &a * &b;
            prop_assert_eq!(prod.exact_div(&b).unwrap(), a);
        }

        #[test]
        fn monomials_are_units(k in -10i32..10) {
            let one = LaurentPoly::one();
            let m = LaurentPoly::monomial(1, k);
            prop_assert_eq!(one.exact_div(&m).unwrap(), LaurentPoly::monomial(1, -k));
        }

        #[test]
        fn eval_is_multiplicative(a in arb_poly(), b in arb_poly(), q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9])) {
            let ev = |x: &LaurentPoly| x.eval_q_rational(&BigInt::from(q));
            let a2 = LaurentPoly::from_terms(a.terms().iter().map(|(k, c)| (2 * k, c.clone())));
            let b2 = LaurentPoly::from_terms(b.terms().iter().map(|(k, c)| (2 * k, c.clone())));
            let (na, da) = ev(&a2).unwrap();
            let (nb, db) = ev(&b2).unwrap();
            let (np, dp) = ev(&(&a2 * &b2)).unwrap();
            prop_assert_eq!(&np * &da * &db, &na * &nb * &dp);
        }

        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }
    }
}
