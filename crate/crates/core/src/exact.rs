//! Exact arithmetic substrate: arbitrary-precision rationals, the Q-linear
//! span of `{1} ∪ {log p}`, and half-integer prime powers.
//!
//! `log 2, log 3, log 5, …` are linearly independent over Q, so equality of
//! [`LogNumber`]s is decided coefficient-wise and never numerically.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

pub type Rational = num_rational::BigRational;

/// `n/d` as a [`Rational`]. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `n` as a [`Rational`].
pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// `p^e` for a signed exponent, as an exact rational.
pub fn rat_pow(p: u64, e: i64) -> Rational {
    let b = BigInt::from(p);
    if e >= 0 {
        Rational::from(b.pow(e as u32))
    } else {
        Rational::new(BigInt::one(), b.pow((-e) as u32))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("product of two transcendental parts: log terms on both factors")]
    LogLogProduct,
}

/// An enclosing interval with exact rational endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        let x = Rational::from_float(x).expect("finite float");
        self.lo <= x && x <= self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / rat_int(2)).to_f64().unwrap()
    }

    fn add(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    fn scale(&self, c: &Rational) -> Interval {
        if c.is_negative() {
            Interval { lo: c * &self.hi, hi: c * &self.lo }
        } else {
            Interval { lo: c * &self.lo, hi: c * &self.hi }
        }
    }
}

/// Enclosure of `log p` with width below `10^-digits`.
///
/// Splits `p = 2^e · r` with `r ∈ [1,2)` and sums the atanh series at
/// `x = (r-1)/(r+1) ≤ 1/3` in exact rational arithmetic; the tail is bounded
/// by the geometric series it is dominated by.
fn ln_interval(p: u64, digits: u32) -> Interval {
    assert!(p >= 2);
    let e = 63 - p.leading_zeros(); // floor(log2 p)
    debug_assert!((1u64 << e) <= p && p < (1u64 << (e + 1)) || e == 63);

    // atanh((a-b)/(a+b)) enclosure: series in x = (a-b)/(a+b).
    let atanh = |num: u64, den: u64, digits: u32| -> Interval {
        let x = Rational::new(BigInt::from(num), BigInt::from(den));
        if x.is_zero() {
            return Interval::point(Rational::zero());
        }
        // x <= 1/3, so term_k <= 3^-(2k+1); stop when the tail bound is small.
        let tol = rat_pow(10, -(digits as i64 + 2));
        let x2 = &x * &x;
        let mut term = x.clone();
        let mut sum = Rational::zero();
        let mut k: i64 = 0;
        loop {
            sum += &term / rat_int(2 * k + 1);
            term *= &x2;
            k += 1;
            // tail <= term/(2k+1) * 1/(1-x^2)
            let tail = &term / rat_int(2 * k + 1) / (Rational::one() - &x2);
            if tail < tol {
                return Interval { lo: sum.clone(), hi: sum + tail };
            }
        }
    };

    // log p = e*log 2 + 2*atanh((p - 2^e)/(p + 2^e)), log 2 = 2*atanh(1/3).
    let ln2 = atanh(1, 3, digits + 2).scale(&rat_int(2));
    let frac = atanh(p - (1u64 << e), p + (1u64 << e), digits + 2).scale(&rat_int(2));
    ln2.scale(&rat_int(i64::from(e))).add(&frac)
}

/// An exact element of `Q ⊕ ⊕_p Q·log p`.
///
/// Stored as a rational constant plus a finite map `prime -> coefficient of
/// log p` with no zero coefficients. Equality is structural, which by the
/// Q-linear independence of the `log p` is equality of real numbers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LogNumber {
    constant: Rational,
    log_terms: BTreeMap<u64, Rational>,
}

impl LogNumber {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(c: Rational) -> Self {
        LogNumber { constant: c, log_terms: BTreeMap::new() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    /// `coeff · log p`.
    pub fn log_term(p: u64, coeff: Rational) -> Self {
        let mut t = BTreeMap::new();
        if !coeff.is_zero() {
            t.insert(p, coeff);
        }
        LogNumber { constant: Rational::zero(), log_terms: t }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.log_terms.is_empty()
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn log_coeff(&self, p: u64) -> Rational {
        self.log_terms.get(&p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn log_terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.log_terms.iter().map(|(p, c)| (*p, c))
    }

    /// True when the value lies in Q.
    pub fn is_rational(&self) -> bool {
        self.log_terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> LogNumber {
        if c.is_zero() {
            return LogNumber::zero();
        }
        LogNumber {
            constant: &self.constant * c,
            log_terms: self.log_terms.iter().map(|(p, v)| (*p, v * c)).collect(),
        }
    }

    /// Product, defined only when at most one factor has log terms.
    ///
    /// The algebra in this crate never needs `log·log`; asking for it is a
    /// bug in the caller, reported as [`ExactError::LogLogProduct`].
    pub fn checked_mul(&self, other: &LogNumber) -> Result<LogNumber, ExactError> {
        if !self.log_terms.is_empty() && !other.log_terms.is_empty() {
            return Err(ExactError::LogLogProduct);
        }
        if self.log_terms.is_empty() {
            Ok(other.scale(&self.constant))
        } else {
            Ok(self.scale(&other.constant))
        }
    }

    fn insert_term(&mut self, p: u64, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.log_terms.get_mut(&p) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.log_terms.remove(&p);
                }
            }
            None => {
                self.log_terms.insert(p, coeff);
            }
        }
    }

    /// Enclosing interval of width `< 10^-digits`.
    pub fn eval(&self, digits: u32) -> Interval {
        let tol = rat_pow(10, -(digits as i64));
        let mut guard = 4u32;
        loop {
            let mut acc = Interval::point(self.constant.clone());
            for (p, c) in &self.log_terms {
                acc = acc.add(&ln_interval(*p, digits + guard).scale(c));
            }
            if acc.width() < tol {
                return acc;
            }
            guard += 8;
        }
    }

    /// Floating evaluation; exact up to the rounding of `ln` and the sum.
    pub fn eval_f64(&self) -> f64 {
        let mut v = self.constant.to_f64().unwrap();
        for (p, c) in &self.log_terms {
            v += c.to_f64().unwrap() * (*p as f64).ln();
        }
        v
    }
}

impl Add for LogNumber {
    type Output = LogNumber;
    fn add(mut self, rhs: LogNumber) -> LogNumber {
        self.constant += rhs.constant;
        for (p, c) in rhs.log_terms {
            self.insert_term(p, c);
        }
        self
    }
}

impl<'a> Add<&'a LogNumber> for LogNumber {
    type Output = LogNumber;
    fn add(mut self, rhs: &'a LogNumber) -> LogNumber {
        self += rhs;
        self
    }
}

impl AddAssign<&LogNumber> for LogNumber {
    fn add_assign(&mut self, rhs: &LogNumber) {
        self.constant += &rhs.constant;
        for (p, c) in &rhs.log_terms {
            self.insert_term(*p, c.clone());
        }
    }
}

impl Sub for LogNumber {
    type Output = LogNumber;
    #[allow(clippy::suspicious_arithmetic_impl)] // x - y = x + (-y)
    fn sub(self, rhs: LogNumber) -> LogNumber {
        self + rhs.neg()
    }
}

impl SubAssign<&LogNumber> for LogNumber {
    fn sub_assign(&mut self, rhs: &LogNumber) {
        self.constant -= &rhs.constant;
        for (p, c) in &rhs.log_terms {
            self.insert_term(*p, -c.clone());
        }
    }
}

impl Neg for LogNumber {
    type Output = LogNumber;
    fn neg(self) -> LogNumber {
        LogNumber {
            constant: -self.constant,
            log_terms: self.log_terms.into_iter().map(|(p, c)| (p, -c)).collect(),
        }
    }
}

impl Mul<&Rational> for &LogNumber {
    type Output = LogNumber;
    fn mul(self, rhs: &Rational) -> LogNumber {
        self.scale(rhs)
    }
}

impl fmt::Display for LogNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if !self.constant.is_zero() {
            write!(f, "{}", self.constant)?;
            first = false;
        }
        for (p, c) in &self.log_terms {
            if first {
                write!(f, "{c}*log({p})")?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {}*log({})", -c.clone(), p)?;
            } else {
                write!(f, " + {c}*log({p})")?;
            }
        }
        Ok(())
    }
}

impl Serialize for LogNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("const", &self.constant.to_string())?;
        let logs: BTreeMap<String, String> =
            self.log_terms.iter().map(|(p, c)| (p.to_string(), c.to_string())).collect();
        map.serialize_entry("log", &logs)?;
        map.end()
    }
}

/// An exact value `c · ∏ p^{h_p/2}` with rational `c` and half-integer
/// exponents, kept symbolic so that products over places cancel exactly.
///
/// Canonical form: even exponent parts are folded into `c`, leaving one
/// factor `√p` per remaining prime, so structural equality is value equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HalfPowRational {
    coeff: Rational,
    sqrt_primes: BTreeSet<u64>,
}

impl HalfPowRational {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(c: Rational) -> Self {
        HalfPowRational { coeff: c, sqrt_primes: BTreeSet::new() }
    }

    /// `coeff · ∏ p^{h/2}` over the listed `(p, h)` pairs.
    pub fn new(coeff: Rational, half_exps: &[(u64, i64)]) -> Self {
        let mut v = HalfPowRational { coeff, sqrt_primes: BTreeSet::new() };
        for &(p, h) in half_exps {
            v.mul_half_pow(p, h);
        }
        if v.coeff.is_zero() {
            v.sqrt_primes.clear();
        }
        v
    }

    /// Multiply by `p^{h/2}` in place.
    pub fn mul_half_pow(&mut self, p: u64, h: i64) {
        if self.coeff.is_zero() {
            return;
        }
        let int_part = h.div_euclid(2);
        let rem = h.rem_euclid(2);
        if int_part != 0 {
            self.coeff *= rat_pow(p, int_part);
        }
        if rem == 1 {
            if self.sqrt_primes.contains(&p) {
                // sqrt(p)*sqrt(p) = p
                self.sqrt_primes.remove(&p);
                self.coeff *= rat_pow(p, 1);
            } else {
                self.sqrt_primes.insert(p);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    /// The value as a plain rational, when no `√p` factor remains.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.sqrt_primes.is_empty().then_some(&self.coeff)
    }

    /// Doubled exponent of `p` (that is, `h` with the value `p^{h/2}`),
    /// counting both the folded coefficient part and the `√p` factor.
    pub fn half_exp(&self, p: u64) -> i64 {
        let base = BigInt::from(p);
        let mut num = self.coeff.numer().clone();
        let mut e = 0i64;
        while !num.is_zero() && (&num % &base).is_zero() {
            num /= &base;
            e += 1;
        }
        let mut den = self.coeff.denom().clone();
        while !den.is_zero() && (&den % &base).is_zero() {
            den /= &base;
            e -= 1;
        }
        2 * e + i64::from(self.sqrt_primes.contains(&p))
    }

    /// Floating value; relative error at most a few ulp per `√p` factor.
    pub fn eval(&self) -> f64 {
        let mut v = self.coeff.to_f64().unwrap();
        for p in &self.sqrt_primes {
            v *= (*p as f64).sqrt();
        }
        v
    }
}

impl Mul for &HalfPowRational {
    type Output = HalfPowRational;
    fn mul(self, rhs: &HalfPowRational) -> HalfPowRational {
        let mut out = HalfPowRational::from_rational(&self.coeff * &rhs.coeff);
        if out.coeff.is_zero() {
            return HalfPowRational::zero();
        }
        out.sqrt_primes = self.sqrt_primes.clone();
        for p in &rhs.sqrt_primes {
            out.mul_half_pow(*p, 1);
        }
        out
    }
}

impl Mul<&Rational> for &HalfPowRational {
    type Output = HalfPowRational;
    fn mul(self, rhs: &Rational) -> HalfPowRational {
        if rhs.is_zero() {
            return HalfPowRational::zero();
        }
        HalfPowRational { coeff: &self.coeff * rhs, sqrt_primes: self.sqrt_primes.clone() }
    }
}

impl fmt::Display for HalfPowRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sqrt_primes.is_empty() {
            return write!(f, "{}", self.coeff);
        }
        write!(f, "{}", self.coeff)?;
        for p in &self.sqrt_primes {
            write!(f, "*sqrt({p})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lognum_eval_zero() {
        let z = LogNumber::zero();
        let iv = z.eval(10);
        assert!(iv.lo.is_zero() && iv.hi.is_zero());
    }

    #[test]
    fn lognum_eval_against_ln_oracle() {
        // Oracle: f64 ln, accurate to ~1e-16, well inside the 1e-10 interval.
        let x = LogNumber::log_term(2, rat(4, 3));
        let iv = x.eval(10);
        assert!(iv.width() < rat_pow(10, -10));
        assert!((iv.midpoint_f64() - 4.0 / 3.0 * std::f64::consts::LN_2).abs() < 1e-12);
        // 4/3*log 2 = 0.92419624074659374...
        assert!((iv.midpoint_f64() - 0.9241962407465937).abs() < 1e-12);

        let y = LogNumber::log_term(2, rat(1, 2)) + LogNumber::from_rational(rat(1, 3));
        let iv = y.eval(10);
        assert!(iv.width() < rat_pow(10, -10));
        // 1/2*log 2 + 1/3 = 0.67990692361330597...
        assert!((iv.midpoint_f64() - 0.6799069236133060).abs() < 1e-12);
    }

    #[test]
    fn lognum_eval_high_precision() {
        let x = LogNumber::log_term(7, rat(1, 1));
        let iv = x.eval(40);
        assert!(iv.width() < rat_pow(10, -40));
        assert!((iv.midpoint_f64() - (7f64).ln()).abs() < 1e-14);
    }

    #[test]
    fn lognum_structural_equality() {
        let a = LogNumber::log_term(2, rat(1, 2)) + LogNumber::log_term(3, rat(1, 3));
        let b = LogNumber::log_term(3, rat(1, 3)) + LogNumber::log_term(2, rat(1, 2));
        assert_eq!(a, b);
        let diff = a.clone() - b;
        assert!(diff.is_zero());
        // cancellation drops the stored term entirely
        let c = a.clone() - LogNumber::log_term(2, rat(1, 2));
        assert_eq!(c, LogNumber::log_term(3, rat(1, 3)));
    }

    #[test]
    fn lognum_rejects_log_log_products() {
        let a = LogNumber::log_term(2, rat(1, 1));
        let b = LogNumber::log_term(3, rat(1, 1));
        assert_eq!(a.checked_mul(&b), Err(ExactError::LogLogProduct));
        let r = LogNumber::from_rational(rat(5, 7));
        assert_eq!(a.checked_mul(&r).unwrap(), a.scale(&rat(5, 7)));
    }

    #[test]
    fn lognum_serialization_shape() {
        let x = LogNumber::from_rational(rat(1, 3)) + LogNumber::log_term(2, rat(-5, 2));
        let json = serde_json::to_value(&x).unwrap();
        assert_eq!(json["const"], "1/3");
        assert_eq!(json["log"]["2"], "-5/2");
    }

    #[test]
    fn halfpow_canonicalizes() {
        // coeff=3, {2: 2} is the rational 6
        let v = HalfPowRational::new(rat_int(3), &[(2, 2)]);
        assert_eq!(v.as_rational(), Some(&rat_int(6)));
        assert_eq!(v.eval(), 6.0);
        // 5^{-1/2}
        let w = HalfPowRational::new(rat_int(1), &[(5, -1)]);
        assert!((w.eval() - 0.4472135954999579).abs() < 1e-15);
        assert_eq!(w.half_exp(5), -1);
        // sqrt(5)*sqrt(5) = 5
        let sq = &w * &w;
        assert_eq!(sq.as_rational(), Some(&rat(1, 5)));
        // trivial element
        assert_eq!(HalfPowRational::one().eval(), 1.0);
    }

    #[test]
    fn halfpow_zero_has_no_factors() {
        let v = HalfPowRational::new(rat_int(0), &[(3, 5)]);
        assert!(v.is_zero());
        assert_eq!(v, HalfPowRational::zero());
    }

    #[test]
    fn display_forms() {
        let x = LogNumber::from_rational(rat(1, 3)) + LogNumber::log_term(2, rat(-1, 2));
        assert_eq!(x.to_string(), "1/3 - 1/2*log(2)");
        assert_eq!(LogNumber::zero().to_string(), "0");
        let h = HalfPowRational::new(rat(2, 3), &[(5, 1)]);
        assert_eq!(h.to_string(), "2/3*sqrt(5)");
    }
}
