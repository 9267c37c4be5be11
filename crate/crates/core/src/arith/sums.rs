//! Coprime-to-S partial sums and prime sums with their main terms.

use super::lvalue::{neg_zeta_prime_over_zeta_at_2, EULER_GAMMA};
use super::{ArithError, DirichletCharacter, MultTables};
use crate::exact::{LogNumber, Rational};
use crate::padic::PlaceSet;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

/// `γ_S = γ + Σ_i q_i^{-1} log q_i / (1 - q_i^{-1})`.
pub fn gamma_s(s: &PlaceSet) -> f64 {
    EULER_GAMMA
        + s.finite_primes()
            .iter()
            .map(|&q| (q as f64).ln() / (q as f64 - 1.0))
            .sum::<f64>()
}

fn coprime_to_set(n: u64, s: &PlaceSet) -> bool {
    s.finite_primes().iter().all(|&q| n % q != 0)
}

/// Exact `Σ_{n<X, gcd(n,S)=1} 1/n` together with the main term
/// `∏(1-q^{-1})(log X + γ_S)`. The exact sum uses pairwise (tree) reduction.
pub fn sum_inv_coprime(x: u64, s: &PlaceSet) -> (Rational, f64) {
    let terms: Vec<u64> = (1..x).filter(|&n| coprime_to_set(n, s)).collect();
    let sum = tree_sum(&terms);
    let main = s.euler_product_f64() * ((x as f64).ln() + gamma_s(s));
    (sum, main)
}

fn tree_sum(ns: &[u64]) -> Rational {
    match ns.len() {
        0 => Rational::zero(),
        1 => Rational::new(BigInt::from(1), BigInt::from(ns[0])),
        len => {
            let (a, b) = ns.split_at(len / 2);
            tree_sum(a) + tree_sum(b)
        }
    }
}

/// Floating variant of [`sum_inv_coprime`] for large sweeps, pairwise order.
pub fn sum_inv_coprime_f64(x: u64, s: &PlaceSet) -> (f64, f64) {
    fn tree(ns: &[u64]) -> f64 {
        match ns.len() {
            0 => 0.0,
            1 => 1.0 / ns[0] as f64,
            len => {
                let (a, b) = ns.split_at(len / 2);
                tree(a) + tree(b)
            }
        }
    }
    let terms: Vec<u64> = (1..x).filter(|&n| coprime_to_set(n, s)).collect();
    let main = s.euler_product_f64() * ((x as f64).ln() + gamma_s(s));
    (tree(&terms), main)
}

/// Exact value of `Σ_{n<X} d(n) χ(n)`, a Gaussian integer for characters of
/// order dividing 4.
#[derive(Debug, Clone, PartialEq)]
pub enum CharSum {
    Exact { re: BigInt, im: BigInt },
    Numeric(Complex64),
}

impl CharSum {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            CharSum::Exact { re, im } => {
                Complex64::new(re.to_f64().unwrap(), im.to_f64().unwrap())
            }
            CharSum::Numeric(z) => *z,
        }
    }

    pub fn as_integer(&self) -> Option<&BigInt> {
        match self {
            CharSum::Exact { re, im } if im.is_zero() => Some(re),
            _ => None,
        }
    }
}

/// `Σ_{n<X} d(n)χ(n)` exactly, with the hyperbola-method main term
/// `δ(χ) ∏(1-q^{-1})² (X log X + (2γ_S - 1) X)`.
///
/// The character must vanish exactly off `gcd(n, S) = 1`, otherwise the
/// contract is violated and an error is returned.
pub fn sum_divisor_coprime(
    x: u64,
    s: &PlaceSet,
    chi: &DirichletCharacter,
) -> Result<(CharSum, f64), ArithError> {
    if !chi.zero_set_matches(s) {
        return Err(ArithError::CharacterZeroSetMismatch);
    }
    let tables = MultTables::sieve(x.max(2))?;
    let mut exact = true;
    let (mut re, mut im) = (0i128, 0i128);
    let mut numeric = Complex64::new(0.0, 0.0);
    for n in 1..x {
        match chi.eval(n).exact_pair() {
            Some((0, 0)) => {}
            Some((a, b)) => {
                re += i128::from(a) * i128::from(tables.d(n));
                im += i128::from(b) * i128::from(tables.d(n));
            }
            None => {
                exact = false;
                numeric += chi.eval_complex(n) * tables.d(n) as f64;
            }
        }
    }
    let xf = x as f64;
    let e = s.euler_product_f64();
    let main = chi.delta() * e * e * (xf * xf.ln() + (2.0 * gamma_s(s) - 1.0) * xf);
    let sum = if exact {
        CharSum::Exact { re: BigInt::from(re), im: BigInt::from(im) }
    } else {
        CharSum::Numeric(numeric + Complex64::new(re as f64, im as f64))
    };
    Ok((sum, main))
}

/// Exact `Σ_{p<X, p∉S} log p/(p-1)` as a [`LogNumber`].
pub fn prime_log_sum(x: u64, s: &PlaceSet) -> Result<LogNumber, ArithError> {
    let tables = MultTables::sieve(x.max(2))?;
    let mut out = LogNumber::zero();
    for &p in tables.primes() {
        if p < x && !s.contains(p) {
            out += &LogNumber::log_term(p, Rational::new(BigInt::from(1), BigInt::from(p - 1)));
        }
    }
    Ok(out)
}

/// `Σ_{p∉S} log p/(p²-1)` with truncation error below `tol`.
///
/// For loose tolerances this is a direct prime sum cut where the integral
/// tail bound `∫ log t/t² dt = (log P + 1)/P` drops below `tol`; tolerances
/// that would need a cutoff past the sieve budget instead use the identity
/// `Σ_p log p/(p²-1) = Σ_n Λ(n)/n² = -ζ'(2)/ζ(2)` minus the finitely many
/// Euler factors of `S`.
pub fn prime_quadratic_constant(s: &PlaceSet, tol: f64) -> f64 {
    assert!(tol > 0.0);
    // smallest power of two P with (log P + 1)/P < tol
    let mut cutoff = 64u64;
    while ((cutoff as f64).ln() + 1.0) / cutoff as f64 >= tol {
        cutoff *= 2;
        if cutoff > 8_000_000 {
            // analytic route: exact constant minus the S-factors
            let mut c = neg_zeta_prime_over_zeta_at_2();
            for &q in s.finite_primes() {
                let qf = q as f64;
                c -= qf.ln() / (qf * qf - 1.0);
            }
            return c;
        }
    }
    let tables = MultTables::sieve(cutoff).expect("cutoff within budget");
    tables
        .primes()
        .iter()
        .filter(|&&p| !s.contains(p))
        .map(|&p| {
            let pf = p as f64;
            pf.ln() / (pf * pf - 1.0)
        })
        .sum()
}
