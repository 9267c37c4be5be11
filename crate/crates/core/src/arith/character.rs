//! Dirichlet characters with exact values for orders dividing 4.

use super::ArithError;
use crate::padic::PlaceSet;
use num_complex::Complex64;
use num_integer::gcd;

/// A root of unity of order dividing 4, or a numeric value for higher order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CharValue {
    Zero,
    One,
    MinusOne,
    I,
    MinusI,
    Numeric(Complex64),
}

impl CharValue {
    pub fn to_complex(self) -> Complex64 {
        match self {
            CharValue::Zero => Complex64::new(0.0, 0.0),
            CharValue::One => Complex64::new(1.0, 0.0),
            CharValue::MinusOne => Complex64::new(-1.0, 0.0),
            CharValue::I => Complex64::new(0.0, 1.0),
            CharValue::MinusI => Complex64::new(0.0, -1.0),
            CharValue::Numeric(z) => z,
        }
    }

    /// Exact (re, im) integer pair for order <= 4 values.
    pub fn exact_pair(self) -> Option<(i8, i8)> {
        match self {
            CharValue::Zero => Some((0, 0)),
            CharValue::One => Some((1, 0)),
            CharValue::MinusOne => Some((-1, 0)),
            CharValue::I => Some((0, 1)),
            CharValue::MinusI => Some((0, -1)),
            CharValue::Numeric(_) => None,
        }
    }

    fn mul(self, other: CharValue) -> CharValue {
        use CharValue::*;
        match (self.exact_pair(), other.exact_pair()) {
            (Some((a, b)), Some((c, d))) => {
                let re = a * c - b * d;
                let im = a * d + b * c;
                match (re, im) {
                    (0, 0) => Zero,
                    (1, 0) => One,
                    (-1, 0) => MinusOne,
                    (0, 1) => I,
                    (0, -1) => MinusI,
                    _ => unreachable!("products of fourth roots stay fourth roots"),
                }
            }
            _ => Numeric(self.to_complex() * other.to_complex()),
        }
    }

    fn approx_eq(self, other: CharValue) -> bool {
        (self.to_complex() - other.to_complex()).norm() < 1e-9
    }
}

/// A Dirichlet character given by its value table mod `modulus`.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    values: Vec<CharValue>,
    conductor: u64,
}

impl DirichletCharacter {
    /// Builds a character from a full value table (index = residue).
    /// Verifies complete multiplicativity and the coprimality zero set.
    pub fn from_values(modulus: u64, values: Vec<CharValue>) -> Result<Self, ArithError> {
        assert_eq!(values.len() as u64, modulus.max(1));
        let chi = |n: u64| values[(n % modulus) as usize];
        if modulus > 1 && !chi(1).approx_eq(CharValue::One) {
            return Err(ArithError::NotMultiplicative);
        }
        for a in 0..modulus {
            let coprime = gcd(a, modulus) == 1;
            if coprime == matches!(chi(a), CharValue::Zero) {
                return Err(ArithError::NotMultiplicative);
            }
            for b in a..modulus {
                if !chi(a * b).approx_eq(chi(a).mul(chi(b))) {
                    return Err(ArithError::NotMultiplicative);
                }
            }
        }
        let conductor = compute_conductor(modulus, &values);
        Ok(DirichletCharacter { modulus, values, conductor })
    }

    /// The principal character mod `modulus`.
    pub fn principal(modulus: u64) -> Self {
        let values = (0..modulus.max(1))
            .map(|a| if gcd(a, modulus) == 1 { CharValue::One } else { CharValue::Zero })
            .collect();
        DirichletCharacter { modulus: modulus.max(1), values, conductor: 1 }
    }

    /// The principal character vanishing exactly off `gcd(n, S) = 1`.
    pub fn principal_for(s: &PlaceSet) -> Self {
        Self::principal(s.finite_primes().iter().product())
    }

    /// The nontrivial character mod 4 (χ(n) = ±1 for n ≡ ±1 mod 4).
    pub fn quadratic_mod4() -> Self {
        DirichletCharacter {
            modulus: 4,
            values: vec![CharValue::Zero, CharValue::One, CharValue::Zero, CharValue::MinusOne],
            conductor: 4,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn eval(&self, n: u64) -> CharValue {
        self.values[(n % self.modulus) as usize]
    }

    pub fn eval_complex(&self, n: u64) -> Complex64 {
        self.eval(n).to_complex()
    }

    pub fn is_principal(&self) -> bool {
        self.conductor == 1
    }

    /// δ(χ): 1 for the principal character, 0 otherwise.
    pub fn delta(&self) -> f64 {
        if self.is_principal() {
            1.0
        } else {
            0.0
        }
    }

    /// True when χ(n) = 0 exactly for gcd(n, S) ≠ 1, i.e. the primes
    /// dividing the modulus are exactly the finite places of `S`.
    pub fn zero_set_matches(&self, s: &PlaceSet) -> bool {
        let mut m = self.modulus;
        let mut rad: Vec<u64> = Vec::new();
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                rad.push(p);
                while m % p == 0 {
                    m /= p;
                }
            }
            p += 1;
        }
        if m > 1 {
            rad.push(m);
        }
        rad == s.finite_primes()
    }
}

fn compute_conductor(modulus: u64, values: &[CharValue]) -> u64 {
    if modulus <= 1 {
        return 1;
    }
    // smallest f | modulus with chi trivial on {a ≡ 1 mod f, gcd(a, modulus)=1}
    for f in (1..=modulus).filter(|f| modulus % f == 0) {
        let trivial_on_class = (1..modulus)
            .step_by(f as usize)
            .filter(|&a| gcd(a, modulus) == 1)
            .all(|a| values[a as usize].approx_eq(CharValue::One));
        if trivial_on_class {
            return f;
        }
    }
    modulus
}
