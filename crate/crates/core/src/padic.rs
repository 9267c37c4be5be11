//! p-adic primitives on rational inputs: valuations, the modified norm, the
//! quadratic-class character ω, the square-class invariant k, and
//! S-decompositions.
//!
//! The modified norm rounds the exponent to the nearest even integer from
//! above (`p ≠ 2`) and carries an extra case split at `p = 2` driven by the
//! unit class mod 4. Its exponent is even by construction, which is what
//! makes `k = log_p |T²-4N|'^{-1/2}` an integer.

use crate::exact::{rat_pow, HalfPowRational, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the prime 2 must belong to the place set")]
    MissingTwo,
    #[error("zero argument has no norm or character value")]
    ZeroArgument,
    #[error("non-regular input: T^2 = 4N")]
    NonRegular,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The set `S = {∞, q_1, …, q_r}`; the archimedean place is always included
/// and `2 ∈ S` is enforced at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceSet {
    finite_primes: Vec<u64>,
}

impl PlaceSet {
    pub fn new(mut primes: Vec<u64>) -> Result<Self, PadicError> {
        primes.sort_unstable();
        primes.dedup();
        for &p in &primes {
            if !is_prime(p) {
                return Err(PadicError::NotPrime(p));
            }
        }
        if !primes.contains(&2) {
            return Err(PadicError::MissingTwo);
        }
        Ok(PlaceSet { finite_primes: primes })
    }

    /// `S = {∞, 2}`, the minimal admissible set.
    pub fn minimal() -> Self {
        PlaceSet { finite_primes: vec![2] }
    }

    pub fn finite_primes(&self) -> &[u64] {
        &self.finite_primes
    }

    pub fn contains(&self, p: u64) -> bool {
        self.finite_primes.binary_search(&p).is_ok()
    }

    /// `∏ (1 - q^{-1})` over the finite places of `S`.
    pub fn euler_product(&self) -> Rational {
        self.finite_primes
            .iter()
            .map(|&q| Rational::one() - rat_pow(q, -1))
            .product()
    }

    pub fn euler_product_f64(&self) -> f64 {
        self.finite_primes.iter().map(|&q| 1.0 - 1.0 / q as f64).product()
    }
}

use num_traits::One;

/// A regular split element `diag(a, b)`; `T = a + b`, `N = ab`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitElement {
    pub a: Rational,
    pub b: Rational,
}

impl SplitElement {
    pub fn new(a: Rational, b: Rational) -> Option<Self> {
        (!a.is_zero() && !b.is_zero()).then_some(SplitElement { a, b })
    }

    pub fn is_regular(&self) -> bool {
        self.a != self.b
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.b
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.b
    }
}

fn bigint_vp(mut n: BigInt, p: u64) -> (i64, BigInt) {
    debug_assert!(!n.is_zero());
    let base = BigInt::from(p);
    let mut v = 0i64;
    loop {
        let (q, r) = n.div_rem(&base);
        if r.is_zero() {
            v += 1;
            n = q;
        } else {
            return (v, n);
        }
    }
}

/// `v_p(x)`, or `None` for `x = 0` (valuation +∞).
pub fn vp(x: &Rational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let (vn, _) = bigint_vp(x.numer().clone(), p);
    if vn > 0 {
        return Some(vn);
    }
    let (vd, _) = bigint_vp(x.denom().clone(), p);
    Some(-vd)
}

/// Valuation together with the unit part `x p^{-v_p(x)}`.
pub fn vp_unit(x: &Rational, p: u64) -> Option<(i64, Rational)> {
    if x.is_zero() {
        return None;
    }
    let (vn, un) = bigint_vp(x.numer().clone(), p);
    let (vd, ud) = bigint_vp(x.denom().clone(), p);
    Some((vn - vd, Rational::new(un, ud)))
}

/// Residue of a p-adic unit modulo `p^k` (numerator times inverse
/// denominator mod `p^k`), as a `u64`. Requires `v_p(u) = 0` and `p^k`
/// within `u64` range.
pub fn unit_residue(u: &Rational, p: u64, k: u32) -> u64 {
    let modulus = BigInt::from(p.pow(k));
    let num = u.numer().mod_floor(&modulus);
    let den = u.denom().mod_floor(&modulus);
    // invert den mod p^k by extended gcd
    let e = den.extended_gcd(&modulus);
    debug_assert!(e.gcd.is_one());
    let inv = e.x.mod_floor(&modulus);
    let r = (num * inv).mod_floor(&modulus);
    r.to_u64_digits().1.first().copied().unwrap_or(0)
}

/// Exponent `e` with `|y|'_p = p^e`; always even.
pub fn modified_norm_exp(p: u64, y: &Rational) -> Result<i64, PadicError> {
    let (v, u) = vp_unit(y, p).ok_or(PadicError::ZeroArgument)?;
    if p != 2 {
        // p^{-2*floor(v/2)}
        Ok(-2 * v.div_euclid(2))
    } else if v % 2 != 0 {
        Ok(-v + 3)
    } else if unit_residue(&u, 2, 2) == 1 {
        Ok(-v)
    } else {
        Ok(-v + 2)
    }
}

/// The modified norm `|y|'_p`; exact, with an even exponent of `p`.
pub fn modified_norm(p: u64, y: &Rational) -> Result<HalfPowRational, PadicError> {
    let e = modified_norm_exp(p, y)?;
    Ok(HalfPowRational::from_rational(rat_pow(p, e)))
}

/// `ω_p(y)`: the Kronecker symbol `(y|y|'_p / p)`, valued in `{-1, 0, +1}`.
///
/// For odd `p` this is the Legendre symbol of the unit part when `v_p(y)` is
/// even and `0` otherwise. For `p = 2` it reads the unit class mod 8:
/// `+1` on `1 (8)`, `-1` on `5 (8)`, `0` otherwise, consistent with the
/// `p = 2` table of the modified norm.
pub fn omega(p: u64, y: &Rational) -> Result<i32, PadicError> {
    let (v, u) = vp_unit(y, p).ok_or(PadicError::ZeroArgument)?;
    if v % 2 != 0 {
        return Ok(0);
    }
    if p == 2 {
        return Ok(match unit_residue(&u, 2, 3) {
            1 => 1,
            5 => -1,
            _ => 0,
        });
    }
    let r = unit_residue(&u, p, 1);
    Ok(legendre(r, p))
}

fn legendre(a: u64, p: u64) -> i32 {
    // a^((p-1)/2) mod p by square-and-multiply
    let mut base = a % p;
    if base == 0 {
        return 0;
    }
    let mut e = (p - 1) / 2;
    let mut acc: u128 = 1;
    let mut b: u128 = base as u128;
    let m = p as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    base = acc as u64;
    if base == 1 {
        1
    } else {
        -1
    }
}

/// `ω_∞(x)`: 0 for `x > 0`, 1 for `x < 0`.
pub fn omega_inf(x: &Rational) -> Result<u8, PadicError> {
    if x.is_zero() {
        Err(PadicError::ZeroArgument)
    } else if x.is_positive() {
        Ok(0)
    } else {
        Ok(1)
    }
}

/// The integer `k` with `p^k = |T²-4N|'^{-1/2}`.
pub fn k_of(p: u64, t: &Rational, n: &Rational) -> Result<i64, PadicError> {
    let disc = t * t - Rational::from(BigInt::from(4)) * n;
    if disc.is_zero() {
        return Err(PadicError::NonRegular);
    }
    let e = modified_norm_exp(p, &disc)?;
    debug_assert_eq!(e % 2, 0);
    Ok(-e / 2)
}

/// Splits `x = qPart · awayPart` with `qPart = ∏_{q∈S} q^{v_q(x)} > 0` and
/// `awayPart` a unit at every finite place of `S` (the sign stays on the
/// away part).
pub fn q_decompose(x: &Rational, s: &PlaceSet) -> (Rational, Rational) {
    assert!(!x.is_zero());
    let mut q_part = Rational::one();
    for &q in s.finite_primes() {
        let v = vp(x, q).unwrap();
        q_part *= rat_pow(q, v);
    }
    let away = x / &q_part;
    (q_part, away)
}
