//! Multiplicative-function sieves, coprime-to-S partial sums, prime sums,
//! Dirichlet characters, and a numeric L-value oracle.

mod character;
mod convolution;
mod lvalue;
mod sieve;
mod sums;

pub use character::{CharValue, DirichletCharacter};
pub use convolution::{convolution_main_term, convolution_sum, divisor_sum_via_convolution};
pub use lvalue::{hurwitz_zeta, l_value, neg_zeta_prime_over_zeta_at_2, zeta_s, EULER_GAMMA};
pub use sieve::MultTables;
pub use sums::{
    gamma_s, prime_log_sum, prime_quadratic_constant, sum_divisor_coprime, sum_inv_coprime,
    sum_inv_coprime_f64, CharSum,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ArithError {
    #[error("sieve limit {0} exceeds the memory budget (max {1})")]
    SieveTooLarge(u64, u64),
    #[error("sieve limit must be at least 2")]
    SieveTooSmall,
    #[error("character table is not completely multiplicative")]
    NotMultiplicative,
    #[error("character zero set does not match the place set")]
    CharacterZeroSetMismatch,
    #[error("L(s, principal) has a pole at s = 1")]
    PoleAtOne,
    #[error("quadrature/series did not reach the requested tolerance")]
    Accuracy,
}
