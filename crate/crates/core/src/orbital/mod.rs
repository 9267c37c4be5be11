//! Local orbital and weighted orbital integrals on the split torus for
//! Hecke-ball test functions, the normalized profiles θ_p and Θ̂_p, and the
//! archimedean θ-profile with its quadrature-based traces.

pub mod arch;
pub mod profile;
pub mod quad;

pub use arch::{tr_xi0_arch, tr_xi0_arch_direct, x0_log_integral, x1_integral};
pub use profile::{theta_hat_inf, ArchProfile, Smoothness};

use crate::exact::{rat_int, rat_pow, HalfPowRational, LogNumber, Rational};
use crate::padic::{k_of, modified_norm_exp, omega, vp, PlaceSet};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OrbitalError {
    #[error("non-regular element: a = b")]
    NonRegular,
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("quadrature failed to reach the requested tolerance")]
    Accuracy,
}

/// The Hecke-ball datum at one finite place: the characteristic function of
/// `X_p^m`, optionally carrying the `p^{-m/2}` normalization of the global
/// test element (that flag is set only at places outside S).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeckeBall {
    pub m: u32,
    pub scaled: bool,
}

impl HeckeBall {
    pub fn spherical() -> Self {
        HeckeBall { m: 0, scaled: false }
    }

    pub fn unscaled(m: u32) -> Self {
        HeckeBall { m, scaled: false }
    }

    pub fn scaled(m: u32) -> Self {
        HeckeBall { m, scaled: true }
    }
}

/// Per-place test data: Hecke balls at the finite places of S and a
/// θ-profile at infinity.
#[derive(Debug, Clone)]
pub struct TestFunctionSpec {
    pub per_place: BTreeMap<u64, HeckeBall>,
    pub arch: ArchProfile,
}

impl TestFunctionSpec {
    /// Spherical data at every finite place of `S`.
    pub fn spherical(s: &PlaceSet, arch: ArchProfile) -> Self {
        let per_place =
            s.finite_primes().iter().map(|&q| (q, HeckeBall::spherical())).collect();
        TestFunctionSpec { per_place, arch }
    }

    pub fn with_ball(mut self, q: u64, m: u32) -> Self {
        self.per_place.insert(q, HeckeBall::unscaled(m));
        self
    }

    pub fn ball(&self, q: u64) -> HeckeBall {
        self.per_place.get(&q).copied().unwrap_or(HeckeBall::spherical())
    }
}

fn scale_factor(p: u64, ball: HeckeBall) -> HalfPowRational {
    if ball.scaled {
        HalfPowRational::new(Rational::one(), &[(p, -i64::from(ball.m))])
    } else {
        HalfPowRational::one()
    }
}

fn on_split_support(p: u64, m: u32, a: &Rational, b: &Rational) -> Option<i64> {
    let va = vp(a, p)?;
    let vb = vp(b, p)?;
    if va < 0 || vb < 0 || va + vb != i64::from(m) {
        return None;
    }
    let diff = a - b;
    if diff.is_zero() {
        return None;
    }
    vp(&diff, p)
}

/// `orb(1_{X_p^m}; diag(a,b)) = p^{k}` with `k = v_p(a-b)` when `a, b ∈ Z_p`
/// and `v_p(ab) = m`, zero otherwise (times `p^{-m/2}` for scaled balls).
pub fn orb_split(p: u64, ball: HeckeBall, a: &Rational, b: &Rational) -> HalfPowRational {
    assert!(a != b, "orbital integrals need a regular element");
    match on_split_support(p, ball.m, a, b) {
        None => HalfPowRational::zero(),
        Some(k) => &scale_factor(p, ball) * &rat_pow(p, k),
    }
}

/// The weighted orbital integral
/// `worb(1_{X_p^m}; diag(a,b)) = (2/|a-b|_p)(log|a-b|_p + Σ_{j<=k} log p/p^j)`
/// on the support of [`orb_split`], zero otherwise.
///
/// Returned as `(scale, value)` with `scale` the `p^{-m/2}` half-power of a
/// scaled ball and `value` the exact `LogNumber` factor.
pub fn worb(p: u64, ball: HeckeBall, a: &Rational, b: &Rational) -> (HalfPowRational, LogNumber) {
    assert!(a != b, "orbital integrals need a regular element");
    match on_split_support(p, ball.m, a, b) {
        None => (HalfPowRational::one(), LogNumber::zero()),
        Some(k) => {
            // 2 p^k (-k + Σ_{j=1}^k p^{-j}) log p
            let mut inner = rat_int(-k);
            for j in 1..=k {
                inner += rat_pow(p, -j);
            }
            let coeff = rat_int(2) * rat_pow(p, k) * inner;
            (scale_factor(p, ball), LogNumber::log_term(p, coeff))
        }
    }
}

/// The modified (second-kind) weighted orbital integral
/// `(2/|a-b|_p) Σ_{j=1}^{k} log p/p^j = 2 (p^k-1)/(p-1) · log p` on the
/// support, zero otherwise; same `(scale, value)` convention as [`worb`].
pub fn worb_hat(
    p: u64,
    ball: HeckeBall,
    a: &Rational,
    b: &Rational,
) -> (HalfPowRational, LogNumber) {
    assert!(a != b, "orbital integrals need a regular element");
    match on_split_support(p, ball.m, a, b) {
        None => (HalfPowRational::one(), LogNumber::zero()),
        Some(k) => {
            let coeff = rat_int(2) * (rat_pow(p, k) - Rational::one())
                / (rat_int(p as i64) - Rational::one());
            (scale_factor(p, ball), LogNumber::log_term(p, coeff))
        }
    }
}

/// `θ_p(T, N) = |det|_p^{-1/2} (1 - χ(p)/p)^{-1} p^{-k} orb(1_{X_p^m}; γ)`
/// with `χ(p) = ω_p(T²-4N)`.
///
/// For `m = 0` all three χ-classes are supported; for `m > 0` only split
/// input (`χ = +1`) is, anything else is an unsupported-case error.
pub fn theta_p(
    p: u64,
    ball: HeckeBall,
    t: &Rational,
    n: &Rational,
) -> Result<HalfPowRational, OrbitalError> {
    let disc = t * t - rat_int(4) * n;
    if disc.is_zero() {
        return Err(OrbitalError::NonRegular);
    }
    let chi = omega(p, &disc).map_err(|e| OrbitalError::BadArgument(e.to_string()))?;
    let m = i64::from(ball.m);
    if m > 0 {
        if chi != 1 {
            return Err(OrbitalError::UnsupportedCase(format!(
                "theta_p with m = {m} needs split input (chi = +1), got chi = {chi}"
            )));
        }
        // split with a, b ∈ Z_p and v(ab) = m: T integral, v_p(N) = m
        let supported = vp(t, p).map_or(true, |v| v >= 0)
            && vp(n, p) == Some(m)
            && {
                // integrality of the eigenvalues: k is a genuine valuation
                k_of(p, t, n).map_or(false, |k| k >= 0)
            };
        if !supported {
            return Ok(HalfPowRational::zero());
        }
        let inv = Rational::one() / (Rational::one() - rat_pow(p, -1));
        return Ok(HalfPowRational::new(inv, &[(p, m)]));
    }
    // m = 0: T ∈ Z_p and N a unit
    if vp(t, p).map_or(false, |v| v < 0) || vp(n, p) != Some(0) {
        return Ok(HalfPowRational::zero());
    }
    let k = k_of(p, t, n).map_err(|e| OrbitalError::BadArgument(e.to_string()))?;
    let pr = rat_int(p as i64);
    let value = match chi {
        // (1-1/p)^{-1} p^{-k} p^k
        1 => Rational::one() / (Rational::one() - rat_pow(p, -1)),
        // (1+1/p)^{-1} p^{-k} (p^{k+1}+p^k-2)/(p-1)
        -1 => {
            let orb = (rat_pow(p, k + 1) + rat_pow(p, k) - rat_int(2)) / (&pr - Rational::one());
            orb * rat_pow(p, -k) / (Rational::one() + rat_pow(p, -1))
        }
        // p^{-k} (p^{k+1}-1)/(p-1)
        0 => (rat_pow(p, k + 1) - Rational::one()) / (&pr - Rational::one()) * rat_pow(p, -k),
        _ => unreachable!(),
    };
    Ok(HalfPowRational::from_rational(value))
}

/// Coefficient `c_ε` of the spherical `Θ̂_p = 1 - c_ε |y|'^{1/2}|1-y|^{-1/2}`.
fn theta_hat_sqrt_coeff(p: u64, eps: i32) -> Rational {
    let shift = if p == 2 { rat_int(2) } else { rat_int(1) };
    match eps {
        1 => Rational::zero(),
        -1 => rat_int(2) / rat_int(p as i64 + 1) / shift,
        0 => rat_int(1) / rat_int(p as i64) / shift,
        _ => unreachable!(),
    }
}

/// `Θ̂_p(y)` for the spherical Hecke ball: zero unless `v_p(1-y)` is even
/// and at most 2 (`p = 2`) or at most 0 (odd `p`); on the support it equals
/// `1` on `Y₁` and `1 - c_ε |y|'^{1/2}|1-y|^{-1/2}` on `Y_ε`, an exact
/// rational since the support makes both norms even powers of `p`.
pub fn theta_hat_p(p: u64, y: &Rational) -> Result<Rational, OrbitalError> {
    if y.is_zero() || y == &Rational::one() {
        return Err(OrbitalError::BadArgument("y must avoid 0 and 1".into()));
    }
    let one_minus = Rational::one() - y;
    let v1 = vp(&one_minus, p).expect("nonzero");
    let vmax = if p == 2 { 2 } else { 0 };
    if v1 % 2 != 0 || v1 > vmax {
        return Ok(Rational::zero());
    }
    let eps = omega(p, y).map_err(|e| OrbitalError::BadArgument(e.to_string()))?;
    let c = theta_hat_sqrt_coeff(p, eps);
    if c.is_zero() {
        return Ok(Rational::one());
    }
    // |y|'^{1/2} |1-y|^{-1/2} = p^{(ey' + v1)/2}, an integer power here
    let ey = modified_norm_exp(p, y).map_err(|e| OrbitalError::BadArgument(e.to_string()))?;
    debug_assert_eq!((ey + v1) % 2, 0);
    Ok(Rational::one() - c * rat_pow(p, (ey + v1) / 2))
}

/// Reconstructs `Θ̂_p(y)` from `θ_p` by integrating over the single
/// contributing shell `v_p(z) = 1 - v_p(1-y)/2` (or `-v_p(1-y)/2` for odd
/// p) of multiplicative measure `1 - p^{-1}`.
pub fn theta_hat_from_theta(p: u64, y: &Rational) -> Result<Rational, OrbitalError> {
    if y.is_zero() || y == &Rational::one() {
        return Err(OrbitalError::BadArgument("y must avoid 0 and 1".into()));
    }
    let one_minus = Rational::one() - y;
    let v1 = vp(&one_minus, p).expect("nonzero");
    let vmax = if p == 2 { 2 } else { 0 };
    if v1 % 2 != 0 || v1 > vmax {
        return Ok(Rational::zero());
    }
    let z0 = if p == 2 { 1 - v1 / 2 } else { -v1 / 2 };
    let z = rat_pow(p, z0);
    let n = &z * &z * one_minus / rat_int(4);
    let theta = theta_p(p, HeckeBall::spherical(), &z, &n)?;
    let theta = theta.as_rational().expect("m = 0 theta is rational").clone();
    Ok((Rational::one() - rat_pow(p, -1)) * theta)
}

/// `ŵTr(Ind(0,triv)(f_p^{p^m}))`: the closed form
/// `2 Σ_{k=0}^m Σ_{j=1}^{min(k, m-k)} log p / p^j`, plus the even-`m`
/// diagonal correction `2 p^{-m/2+1}/(p²-1) · log p/(p-1)`.
pub fn wtr_hat_hecke(p: u64, m: u32) -> LogNumber {
    let m = i64::from(m);
    let mut coeff = Rational::zero();
    for k in 0..=m {
        let top = k.min(m - k);
        for j in 1..=top {
            coeff += rat_pow(p, -j);
        }
    }
    coeff *= rat_int(2);
    if m % 2 == 0 {
        let pr = rat_int(p as i64);
        let corr = rat_int(2) * rat_pow(p, -m / 2 + 1)
            / (&pr * &pr - Rational::one())
            / (&pr - Rational::one());
        coeff += corr;
    }
    LogNumber::log_term(p, coeff)
}

/// `w̃Tr(Ind(0,triv)(f_p))` for the spherical ball:
/// `2p/((p-1)(p²-1)) · log p` (at `p = 2` this is the familiar `4/3 log 2`).
pub fn wtilde_tr_zero(p: u64) -> LogNumber {
    let pr = rat_int(p as i64);
    let coeff =
        rat_int(2) * &pr / ((&pr - Rational::one()) * (&pr * &pr - Rational::one()));
    LogNumber::log_term(p, coeff)
}

/// The modified local unipotent constant `∫_{Z_p} log|x| dx = -log p/(p-1)`.
pub fn unip_modified_local(p: u64) -> LogNumber {
    LogNumber::log_term(p, -Rational::one() / (rat_int(p as i64) - Rational::one()))
}

/// Report of the series `A(p) = (1-p^{-1})² Σ_m ŵTr(f_p^{p^m}) p^{-m}`
/// against the two candidate closed forms `{1, 2}·log p/(p²-1)`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ASeriesReport {
    pub p: u64,
    pub value: f64,
    pub candidate_1x: f64,
    pub candidate_2x: f64,
    pub matches: &'static str,
    pub rel_err: f64,
}

/// Sums `A(p)` exactly (each partial sum is a `LogNumber`) until the tail
/// bound drops below the requested relative tolerance, then records which
/// candidate multiple of `log p/(p²-1)` it matches.
pub fn a_series(p: u64, rel_tol: f64) -> ASeriesReport {
    let damp = Rational::one() - rat_pow(p, -1);
    let damp2 = &damp * &damp;
    let mut acc = LogNumber::zero();
    let mut m = 0u32;
    loop {
        let term = wtr_hat_hecke(p, m).scale(&(&damp2 * rat_pow(p, -i64::from(m))));
        acc += &term;
        // tail bound: ŵTr_m <= 2(m+1) log p/(p-1), so the remaining mass is
        // below 2 log p/(p-1) Σ_{k>m}(k+1)p^{-k}, itself < 4(m+2) p^{-m}
        let tail = 4.0 * (m as f64 + 2.0) * (p as f64).powi(-(m as i32)) * (p as f64).ln();
        let cur = acc.eval_f64();
        if m > 4 && tail < rel_tol * cur.abs() {
            break;
        }
        m += 1;
        if m > 400 {
            break;
        }
    }
    let value = acc.eval_f64();
    let base = (p as f64).ln() / ((p * p - 1) as f64);
    let (d1, d2) = ((value - base).abs(), (value - 2.0 * base).abs());
    let (matches, rel_err) = if d2 < d1 {
        ("2x", d2 / (2.0 * base))
    } else {
        ("1x", d1 / base)
    };
    ASeriesReport {
        p,
        value,
        candidate_1x: base,
        candidate_2x: 2.0 * base,
        matches,
        rel_err,
    }
}
