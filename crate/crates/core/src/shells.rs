//! Exact integration over Q_p against additive Haar measure (vol(Z_p) = 1)
//! for kernels that are constant on p-adic shells.
//!
//! A region is a disjoint union of cells `p^v (c + p^k Z_p)` (measure
//! `p^{-v-k}`) and tail families whose valuations run along an arithmetic
//! progression; tail contributions are geometric (or j-times-geometric once
//! a log weight is present) and are summed in closed form, so every value
//! this module produces is an exact [`LogNumber`].

use crate::exact::{rat_int, rat_pow, LogNumber, Rational};
use crate::padic::is_prime;
use num_traits::{One, Zero};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShellError {
    #[error("divergent tail: geometric ratio has modulus >= 1")]
    Divergence,
    #[error("kernel is not constant on a declared cell (valuation 0 cell meets 1)")]
    KernelCellMismatch,
    #[error("kernel value carries a residual half power of p on a shell")]
    HalfPowerResidue,
    #[error("tail family crosses valuation 0")]
    TailCrossesZero,
    #[error("cells are not pairwise disjoint")]
    Overlap,
    #[error("p = 2 cells need a unit class mod at least 4 (got mod 2^{0})")]
    UnitClassTooCoarse(u32),
    #[error("unsupported local test function for the shell engine (need m = 0)")]
    UnsupportedTestFunction,
}

/// One cell `p^v (c + p^k Z_p)` with `c` a unit residue mod `p^k`, `k >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellCell {
    pub val: i64,
    pub unit_c: u64,
    pub unit_pow: u32,
}

/// Cells at valuations `val0 + j*step`, `j >= 0`, sharing one residue
/// constraint. `step < 0` walks toward -infinity (measures then grow and
/// only a decaying kernel makes the sum converge).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellTail {
    pub val0: i64,
    pub step: i64,
    pub unit_c: u64,
    pub unit_pow: u32,
}

/// A finite/cofinite union of shells in Q_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellRegion {
    pub p: u64,
    pub cells: Vec<ShellCell>,
    pub tails: Vec<ShellTail>,
}

impl ShellRegion {
    pub fn new(p: u64) -> Self {
        assert!(is_prime(p));
        ShellRegion { p, cells: Vec::new(), tails: Vec::new() }
    }

    pub fn cell(mut self, val: i64, unit_c: u64, unit_pow: u32) -> Self {
        self.cells.push(ShellCell { val, unit_c, unit_pow });
        self
    }

    pub fn tail(mut self, val0: i64, step: i64, unit_c: u64, unit_pow: u32) -> Self {
        self.tails.push(ShellTail { val0, step, unit_c, unit_pow });
        self
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty() && self.tails.is_empty()
    }

    /// Pairwise disjointness of the finite cells; tails are kept disjoint
    /// from the finite part by valuation in every region built here (the
    /// Monte-Carlo measure test exercises that numerically).
    pub fn validate(&self) -> Result<(), ShellError> {
        for c in &self.cells {
            if c.unit_pow == 0 || c.unit_c % self.p == 0 {
                return Err(ShellError::Overlap);
            }
        }
        for (i, a) in self.cells.iter().enumerate() {
            for b in &self.cells[i + 1..] {
                if a.val != b.val {
                    continue;
                }
                let k = a.unit_pow.min(b.unit_pow);
                let m = self.p.pow(k);
                if a.unit_c % m == b.unit_c % m {
                    return Err(ShellError::Overlap);
                }
            }
        }
        for t in &self.tails {
            if t.step == 0 {
                return Err(ShellError::TailCrossesZero);
            }
        }
        Ok(())
    }
}

/// Exact Haar measure of the region; tails sum a geometric series and must
/// have `step >= 1` for the measure itself to be finite.
pub fn region_measure(region: &ShellRegion) -> Result<Rational, ShellError> {
    region.validate()?;
    let p = region.p;
    let mut total = Rational::zero();
    for c in &region.cells {
        total += rat_pow(p, -c.val - i64::from(c.unit_pow));
    }
    for t in &region.tails {
        if t.step < 1 {
            return Err(ShellError::Divergence);
        }
        // sum_j p^{-(val0 + j step) - k} = p^{-val0-k} / (1 - p^{-step})
        let first = rat_pow(p, -t.val0 - i64::from(t.unit_pow));
        total += first / (Rational::one() - rat_pow(p, -t.step));
    }
    Ok(total)
}

/// One multiplicative piece of a kernel: `coeff · (|y|'^{1/2}|1-y|^{-1/2})^s
/// · log(|1-y|/|y|')^l` with `s, l ∈ {0, 1}`.
#[derive(Debug, Clone)]
pub struct KernelTerm {
    pub coeff: Rational,
    pub sqrt_ratio: bool,
    pub log_ratio: bool,
}

/// A shell-wise constant kernel `|y|'^α |1-y|^β Σ_i term_i`, with the
/// exponents stored doubled (`alpha2 = 2α`) so half-integers stay integral.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub alpha2: i64,
    pub beta2: i64,
    pub terms: Vec<KernelTerm>,
}

impl Kernel {
    /// `|1-y|^{-1} |y|'^{-1/2} (1 - c·|y|'^{1/2}|1-y|^{-1/2})`, the
    /// Eisenstein trace integrand with a shell-wise Θ̂ of coefficient `c`.
    pub fn eisenstein(theta_sqrt_coeff: &Rational) -> Kernel {
        let mut terms =
            vec![KernelTerm { coeff: Rational::one(), sqrt_ratio: false, log_ratio: false }];
        if !theta_sqrt_coeff.is_zero() {
            terms.push(KernelTerm {
                coeff: -theta_sqrt_coeff.clone(),
                sqrt_ratio: true,
                log_ratio: false,
            });
        }
        Kernel { alpha2: -1, beta2: -2, terms }
    }

    /// `log(|1-y|/|y|') |1-y|^{-1} |y|'^{-1/2}` times a shell-wise Θ̂.
    pub fn eisenstein_log(theta_sqrt_coeff: &Rational) -> Kernel {
        let mut terms =
            vec![KernelTerm { coeff: Rational::one(), sqrt_ratio: false, log_ratio: true }];
        if !theta_sqrt_coeff.is_zero() {
            terms.push(KernelTerm {
                coeff: -theta_sqrt_coeff.clone(),
                sqrt_ratio: true,
                log_ratio: true,
            });
        }
        Kernel { alpha2: -1, beta2: -2, terms }
    }
}

/// Shell invariants the kernel depends on: the exponent of `|y|'` and
/// `v_p(1-y)`.
#[derive(Debug, Clone, Copy)]
struct ShellData {
    ey_mod: i64,
    v1my: i64,
}

fn cell_data(p: u64, val: i64, unit_c: u64, unit_pow: u32) -> Result<ShellData, ShellError> {
    let ey_mod = if p == 2 {
        if unit_pow < 2 {
            return Err(ShellError::UnitClassTooCoarse(unit_pow));
        }
        if val % 2 != 0 {
            -val + 3
        } else if unit_c % 4 == 1 {
            -val
        } else {
            -val + 2
        }
    } else {
        -2 * val.div_euclid(2)
    };
    let v1my = match val.cmp(&0) {
        std::cmp::Ordering::Greater => 0,
        std::cmp::Ordering::Less => val,
        std::cmp::Ordering::Equal => {
            let modulus = p.pow(unit_pow);
            let t = (modulus + 1 - unit_c % modulus) % modulus;
            if t == 0 {
                return Err(ShellError::KernelCellMismatch);
            }
            let mut v = 0i64;
            let mut tt = t;
            while tt % p == 0 {
                tt /= p;
                v += 1;
            }
            v
        }
    };
    Ok(ShellData { ey_mod, v1my })
}

fn term_value(p: u64, term: &KernelTerm, k: &Kernel, d: ShellData) -> Result<LogNumber, ShellError> {
    // doubled exponent of p in the power part: |y|'^α |1-y|^β (· sqrt ratio)
    let mut doubled = k.alpha2 * d.ey_mod - k.beta2 * d.v1my;
    if term.sqrt_ratio {
        doubled += d.ey_mod + d.v1my;
    }
    if doubled % 2 != 0 {
        return Err(ShellError::HalfPowerResidue);
    }
    let scalar = &term.coeff * rat_pow(p, doubled / 2);
    if term.log_ratio {
        // log(|1-y|/|y|') = (-v1my - ey_mod) log p
        Ok(LogNumber::log_term(p, scalar * rat_int(-d.v1my - d.ey_mod)))
    } else {
        Ok(LogNumber::from_rational(scalar))
    }
}

/// Kernel value on a single cell; exact.
pub fn kernel_on_cell(p: u64, cell: &ShellCell, k: &Kernel) -> Result<LogNumber, ShellError> {
    let d = cell_data(p, cell.val, cell.unit_c, cell.unit_pow)?;
    let mut v = LogNumber::zero();
    for t in &k.terms {
        v += &term_value(p, t, k, d)?;
    }
    Ok(v)
}

/// One row of the audit ledger: a cell or tail, its measure, the kernel
/// value on it, and the exact contribution to the integral.
#[derive(Debug, Clone, Serialize)]
pub struct ShellLedgerRow {
    pub piece: String,
    pub measure: String,
    pub kernel_value: String,
    pub contribution: LogNumber,
}

/// `∫_region kernel(y) dy`, exact. Tail families whose valuation parity
/// alternates are split in two so that `|y|'` stays affine along each.
pub fn integrate(region: &ShellRegion, kernel: &Kernel) -> Result<LogNumber, ShellError> {
    Ok(integrate_audited(region, kernel)?.0)
}

pub fn integrate_audited(
    region: &ShellRegion,
    kernel: &Kernel,
) -> Result<(LogNumber, Vec<ShellLedgerRow>), ShellError> {
    region.validate()?;
    let p = region.p;
    let mut total = LogNumber::zero();
    let mut rows = Vec::new();
    for c in &region.cells {
        let kv = kernel_on_cell(p, c, kernel)?;
        let measure = rat_pow(p, -c.val - i64::from(c.unit_pow));
        let contribution = kv.scale(&measure);
        total += &contribution;
        rows.push(ShellLedgerRow {
            piece: format!("{p}^{} ({} + {p}^{} Zp)", c.val, c.unit_c, c.unit_pow),
            measure: measure.to_string(),
            kernel_value: kv.to_string(),
            contribution,
        });
    }
    for t in &region.tails {
        // keep every valuation in the family on one side of zero
        if t.step == 0 || t.val0 == 0 || (t.val0 > 0) != (t.val0 + t.step > 0) {
            return Err(ShellError::TailCrossesZero);
        }
        let sub_tails: Vec<ShellTail> = if t.step % 2 != 0 {
            vec![
                ShellTail { val0: t.val0, step: 2 * t.step, ..*t },
                ShellTail { val0: t.val0 + t.step, step: 2 * t.step, ..*t },
            ]
        } else {
            vec![t.clone()]
        };
        for st in sub_tails {
            let contribution = sum_tail(p, &st, kernel)?;
            total += &contribution;
            rows.push(ShellLedgerRow {
                piece: format!(
                    "{p}^({}+{}j) ({} + {p}^{} Zp), j >= 0",
                    st.val0, st.step, st.unit_c, st.unit_pow
                ),
                measure: "geometric".to_string(),
                kernel_value: "per-shell".to_string(),
                contribution,
            });
        }
    }
    Ok((total, rows))
}

/// Closed-form sum over one parity-pure tail. Along the family every shell
/// invariant is affine in j, so each kernel term contributes
/// `p^{E0} (A + Bj) ρ^j` with rational data, and `Σ ρ^j`, `Σ j ρ^j` are
/// rational in closed form.
fn sum_tail(p: u64, t: &ShellTail, kernel: &Kernel) -> Result<LogNumber, ShellError> {
    debug_assert!(t.step % 2 == 0);
    let d0 = cell_data(p, t.val0, t.unit_c, t.unit_pow)?;
    let d1 = cell_data(p, t.val0 + t.step, t.unit_c, t.unit_pow)?;
    // affine shell data: ey_mod(j) = ey0 + dey*j, v1my(j) = v0 + dv*j
    let (ey0, dey) = (d0.ey_mod, d1.ey_mod - d0.ey_mod);
    let (v0, dv) = (d0.v1my, d1.v1my - d0.v1my);
    let mut total = LogNumber::zero();
    for term in &kernel.terms {
        // doubled exponent E(j) = e0d + e1d*j of the power part
        let mut e0d = kernel.alpha2 * ey0 - kernel.beta2 * v0;
        let mut e1d = kernel.alpha2 * dey - kernel.beta2 * dv;
        if term.sqrt_ratio {
            e0d += ey0 + v0;
            e1d += dey + dv;
        }
        if e0d % 2 != 0 || e1d % 2 != 0 {
            return Err(ShellError::HalfPowerResidue);
        }
        // measure p^{-(val0 + step j) - k} contributes -val0-k and -step*j
        let exp0 = e0d / 2 - t.val0 - i64::from(t.unit_pow);
        let exp1 = e1d / 2 - t.step;
        if exp1 >= 0 {
            return Err(ShellError::Divergence);
        }
        let lead = &term.coeff * rat_pow(p, exp0);
        let ratio = rat_pow(p, exp1);
        let geo = Rational::one() / (Rational::one() - &ratio); // Σ ρ^j
        let geo_j = &ratio * &geo * &geo; // Σ j ρ^j
        if term.log_ratio {
            // (A + Bj) log p with A = -v0-ey0, B = -dv-dey
            let a = rat_int(-v0 - ey0);
            let b = rat_int(-dv - dey);
            let coeff = &lead * (a * geo + b * geo_j);
            total += &LogNumber::log_term(p, coeff);
        } else {
            total += &LogNumber::from_rational(&lead * geo);
        }
    }
    Ok(total)
}

/// Shell-wise data of `Θ̂_p` for a local test function: on its support
/// (`v_p(1-y)` even and at most 2 for `p = 2`, at most 0 otherwise)
/// `Θ̂_p(y) = 1 - c_ε |y|'^{1/2} |1-y|^{-1/2}` on `Y_ε`.
#[derive(Debug, Clone)]
pub struct ThetaHatProvider {
    pub p: u64,
    pub zero: bool,
    pub coeff_minus_one: Rational,
    pub coeff_zero_class: Rational,
}

impl ThetaHatProvider {
    /// The spherical (m = 0 Hecke ball) provider.
    pub fn spherical(p: u64) -> Self {
        let shift = if p == 2 { rat_int(2) } else { rat_int(1) };
        ThetaHatProvider {
            p,
            zero: false,
            coeff_minus_one: rat_int(2) / rat_int(p as i64 + 1) / shift.clone(),
            coeff_zero_class: rat_int(1) / rat_int(p as i64) / shift,
        }
    }

    /// The zero test function: all integrals vanish.
    pub fn zero_fn(p: u64) -> Self {
        ThetaHatProvider {
            p,
            zero: true,
            coeff_minus_one: Rational::zero(),
            coeff_zero_class: Rational::zero(),
        }
    }

    /// Hecke balls with `m > 0` have no shell-wise Θ̂ here.
    pub fn for_ball(p: u64, m: u32) -> Result<Self, ShellError> {
        if m == 0 {
            Ok(Self::spherical(p))
        } else {
            Err(ShellError::UnsupportedTestFunction)
        }
    }

    fn sqrt_coeff(&self, eps: i32) -> Rational {
        match eps {
            1 => Rational::zero(),
            -1 => self.coeff_minus_one.clone(),
            0 => self.coeff_zero_class.clone(),
            _ => panic!("eps must be in {{-1, 0, 1}}"),
        }
    }
}

fn legendre(a: u64, p: u64) -> i32 {
    let mut acc: u128 = 1;
    let mut b: u128 = u128::from(a % p);
    let mut e = (p - 1) / 2;
    let m = u128::from(p);
    if b == 0 {
        return 0;
    }
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// The decomposition of `Y_ε ∩ {Θ̂_p ≠ 0}` into shells.
///
/// The valuation window comes from the support of `Θ̂_p` (`v_p(1-y)` even
/// and bounded), not from a tolerance: each `v_p(y) > 0` or `< 0` family is
/// an exact geometric tail, and only finitely many `v_p(y) = 0` classes
/// survive the `v_p(1-y)` constraint.
pub fn y_support_region(p: u64, eps: i32) -> ShellRegion {
    let mut r = ShellRegion::new(p);
    if p == 2 {
        match eps {
            1 => {
                // v even, unit 1 mod 8; v = 0 forces v(1-y) >= 3: excluded
                r = r.tail(2, 2, 1, 3).tail(-2, -2, 1, 3);
            }
            -1 => {
                // v even, unit 5 mod 8; at v = 0, v(1-y) = 2 is in range
                r = r.tail(2, 2, 5, 3).cell(0, 5, 3).tail(-2, -2, 5, 3);
            }
            0 => {
                // v even with unit 3 mod 4 (v = 0 has v(1-y) = 1: excluded),
                // plus all odd v > 0
                for c in [3u64, 7] {
                    r = r.tail(2, 2, c, 3).tail(-2, -2, c, 3);
                }
                for c in [1u64, 3, 5, 7] {
                    r = r.tail(1, 2, c, 3);
                }
            }
            _ => panic!("eps must be in {{-1, 0, 1}}"),
        }
        return r;
    }
    match eps {
        1 | -1 => {
            for c in (1..p).filter(|&c| legendre(c, p) == eps) {
                r = r.tail(2, 2, c, 1).tail(-2, -2, c, 1);
                if c != 1 {
                    r = r.cell(0, c, 1);
                }
            }
        }
        0 => {
            // odd valuations; negative ones leave the support
            for c in 1..p {
                r = r.tail(1, 2, c, 1);
            }
        }
        _ => panic!("eps must be in {{-1, 0, 1}}"),
    }
    r
}

/// `Tr(ξ₀(f_p)) = 2 (1-p^{-1})^{-1} ∫_{Y₁} Θ̂_p(y) / (|1-y| |y|'^{1/2}) dy`,
/// exact.
pub fn tr_xi0_nonarch(p: u64, f: &ThetaHatProvider) -> Result<LogNumber, ShellError> {
    if f.zero {
        return Ok(LogNumber::zero());
    }
    let region = y_support_region(p, 1);
    let kernel = Kernel::eisenstein(&f.sqrt_coeff(1));
    let v = integrate(&region, &kernel)?;
    let scale = rat_int(2) / (Rational::one() - rat_pow(p, -1));
    Ok(v.scale(&scale))
}

/// `∫_{Y_ε} |1-y|^{-1} Θ̂_p(y) |y|'^{-1/2} dy` for `ε ∈ {0, -1}`, exact.
pub fn eps_integral(p: u64, f: &ThetaHatProvider, eps: i32) -> Result<LogNumber, ShellError> {
    assert!(eps == 0 || eps == -1, "eps must be 0 or -1");
    if f.zero {
        return Ok(LogNumber::zero());
    }
    let region = y_support_region(p, eps);
    let kernel = Kernel::eisenstein(&f.sqrt_coeff(eps));
    integrate(&region, &kernel)
}

/// `∫_{Y₁} log(|1-y|/|y|') |1-y|^{-1} Θ̂_p(y) |y|'^{-1/2} dy`, exact.
pub fn log_integral_y1(p: u64, f: &ThetaHatProvider) -> Result<LogNumber, ShellError> {
    if f.zero {
        return Ok(LogNumber::zero());
    }
    let region = y_support_region(p, 1);
    let kernel = Kernel::eisenstein_log(&f.sqrt_coeff(1));
    integrate(&region, &kernel)
}

/// A named constant with its shell-by-shell ledger, for the JSON dump.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantAudit {
    pub name: String,
    pub p: u64,
    pub value: LogNumber,
    pub rows: Vec<ShellLedgerRow>,
}

/// Audited variants of the named integrals over the `Y_ε` supports.
pub fn audit_eisenstein_constants(p: u64) -> Result<Vec<ConstantAudit>, ShellError> {
    let f = ThetaHatProvider::spherical(p);
    let mut out = Vec::new();
    for (name, eps, log) in [
        ("tr_xi0_integrand_y1", 1, false),
        ("eps_integral_minus1", -1, false),
        ("eps_integral_zero", 0, false),
        ("log_integral_y1", 1, true),
    ] {
        let region = y_support_region(p, eps);
        let kernel = if log {
            Kernel::eisenstein_log(&f.sqrt_coeff(eps))
        } else {
            Kernel::eisenstein(&f.sqrt_coeff(eps))
        };
        let (value, rows) = integrate_audited(&region, &kernel)?;
        out.push(ConstantAudit { name: name.to_string(), p, value, rows });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use num_traits::ToPrimitive;

    #[test]
    fn measures() {
        // Z_2 as the tail over all valuations v >= 0 with k = 1
        let z2 = ShellRegion::new(2).tail(0, 1, 1, 1);
        assert_eq!(region_measure(&z2).unwrap(), rat_int(1));
        // 5 + 8 Z_2
        let c = ShellRegion::new(2).cell(0, 5, 3);
        assert_eq!(region_measure(&c).unwrap(), rat(1, 8));
        // union over n >= 1 of 2^{2n}(1 + 8 Z_2): geometric 1/24
        let t = ShellRegion::new(2).tail(2, 2, 1, 3);
        assert_eq!(region_measure(&t).unwrap(), rat(1, 24));
        // diverging measure
        let bad = ShellRegion::new(2).tail(-2, -2, 1, 3);
        assert_eq!(region_measure(&bad), Err(ShellError::Divergence));
    }

    #[test]
    fn overlap_detected() {
        let r = ShellRegion::new(3).cell(0, 2, 1).cell(0, 2, 2);
        assert_eq!(region_measure(&r), Err(ShellError::Overlap));
        let ok = ShellRegion::new(3).cell(0, 2, 1).cell(0, 1, 1);
        assert!(region_measure(&ok).is_ok());
    }

    #[test]
    fn empty_region_integrates_to_zero() {
        let r = ShellRegion::new(5);
        let k = Kernel::eisenstein(&Rational::zero());
        assert!(integrate(&r, &k).unwrap().is_zero());
    }

    #[test]
    fn monte_carlo_membership_measure() {
        // measure of the support regions vs membership sampling of rationals
        // with bounded valuation window at p = 2, 3σ tolerance
        use crate::padic::{omega, vp};
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let p = 2u64;
        for eps in [1i32, -1, 0] {
            let region = y_support_region(p, eps);
            // y = u / 2^6 with u uniform in [1, 2^14): valuations in [-6, 8)
            let trials = 200_000u64;
            let mut hits = 0u64;
            for _ in 0..trials {
                let u: u64 = rng.gen_range(1..(1u64 << 14));
                let y = rat(u as i64, 1 << 6);
                let v = vp(&y, p).unwrap();
                let one_minus = Rational::one() - &y;
                let in_support = if one_minus.is_zero() {
                    false
                } else {
                    let v1 = vp(&one_minus, p).unwrap();
                    v1 % 2 == 0 && v1 <= 2
                };
                if in_support && omega(p, &y).unwrap() == eps && (-6..8).contains(&v) {
                    hits += 1;
                }
            }
            // exact measure of the region restricted to the window
            let mut exact = Rational::zero();
            let windowed = |val: i64| (-6..8).contains(&val);
            for c in &region.cells {
                if windowed(c.val) {
                    exact += rat_pow(p, -c.val - i64::from(c.unit_pow));
                }
            }
            for t in &region.tails {
                let mut j = 0i64;
                while windowed(t.val0 + j * t.step) {
                    exact += rat_pow(p, -(t.val0 + j * t.step) - i64::from(t.unit_pow));
                    j += 1;
                }
            }
            // the lattice u/2^6 hits a set of Haar measure μ with
            // probability μ/2^6 (valuations above -6 are resolved exactly)
            let est = 64.0 * hits as f64 / trials as f64;
            let exact_f = exact.to_f64().unwrap();
            let prob = exact_f / 64.0;
            let sigma = 64.0 * (prob * (1.0 - prob) / trials as f64).sqrt();
            assert!(
                (est - exact_f).abs() < 3.0 * sigma + 1e-9,
                "eps={eps} est={est} exact={exact_f} sigma={sigma}"
            );
        }
    }

    #[test]
    fn appendix_constants_p2() {
        let f = ThetaHatProvider::spherical(2);
        // Tr(xi_0(f_2)) = 1
        assert_eq!(tr_xi0_nonarch(2, &f).unwrap(), LogNumber::from_int(1));
        // eps integrals 13/36 and 1/3
        assert_eq!(eps_integral(2, &f, -1).unwrap(), LogNumber::from_rational(rat(13, 36)));
        assert_eq!(eps_integral(2, &f, 0).unwrap(), LogNumber::from_rational(rat(1, 3)));
        // log-weighted Y1 integral = (1/2) log 2
        assert_eq!(log_integral_y1(2, &f).unwrap(), LogNumber::log_term(2, rat(1, 2)));
    }

    #[test]
    fn bare_y1_integral_is_one_quarter_at_p2() {
        // the two contributing case families give 1/8 + 1/8
        let region = y_support_region(2, 1);
        let kernel = Kernel::eisenstein(&Rational::zero());
        let v = integrate(&region, &kernel).unwrap();
        assert_eq!(v, LogNumber::from_rational(rat(1, 4)));
    }

    #[test]
    fn odd_prime_constants_match_closed_forms() {
        // closed forms derived by the same case analysis done by hand:
        //   Tr(xi_0) = 1,
        //   C_{-1} = (p³+p²+p-1) / (2p(p+1)²),
        //   C_0    = 1/(p+1),
        //   D      = log p/(p-1).
        for p in [3u64, 5, 7, 11] {
            let f = ThetaHatProvider::spherical(p);
            assert_eq!(tr_xi0_nonarch(p, &f).unwrap(), LogNumber::from_int(1), "p={p}");
            let pi = p as i64;
            let cm1 = rat(pi * pi * pi + pi * pi + pi - 1, 2 * pi * (pi + 1) * (pi + 1));
            assert_eq!(eps_integral(p, &f, -1).unwrap(), LogNumber::from_rational(cm1), "p={p}");
            assert_eq!(
                eps_integral(p, &f, 0).unwrap(),
                LogNumber::from_rational(rat(1, pi + 1)),
                "p={p}"
            );
            assert_eq!(
                log_integral_y1(p, &f).unwrap(),
                LogNumber::log_term(p, rat(1, pi - 1)),
                "p={p}"
            );
        }
    }

    #[test]
    fn case_split_additivity() {
        // integrating the three valuation families of Y_{-1} at p = 2
        // separately matches the single-region value exactly
        let f = ThetaHatProvider::spherical(2);
        let kernel = Kernel::eisenstein(&f.sqrt_coeff(-1));
        let pos = ShellRegion::new(2).tail(2, 2, 5, 3);
        let unit = ShellRegion::new(2).cell(0, 5, 3);
        let neg = ShellRegion::new(2).tail(-2, -2, 5, 3);
        let total = integrate(&pos, &kernel).unwrap()
            + integrate(&unit, &kernel).unwrap()
            + integrate(&neg, &kernel).unwrap();
        assert_eq!(total, eps_integral(2, &f, -1).unwrap());
        // the individual cases reproduce the hand computation 1/9, 1/6, 1/12
        assert_eq!(integrate(&pos, &kernel).unwrap(), LogNumber::from_rational(rat(1, 9)));
        assert_eq!(integrate(&unit, &kernel).unwrap(), LogNumber::from_rational(rat(1, 6)));
        assert_eq!(integrate(&neg, &kernel).unwrap(), LogNumber::from_rational(rat(1, 12)));
    }

    #[test]
    fn odd_step_tail_splits_on_parity() {
        // |y|' alternates along v = 1, 2, 3, ... so the engine must split
        // the family in two; against |y|'^{-1/2} the total is
        // Σ_{v>=1} 3^{-v-1+floor(v/2)} = 2·(1/9)/(1-1/3) = 1/3
        let r = ShellRegion::new(3).tail(1, 1, 1, 1);
        let k = Kernel::eisenstein(&Rational::zero());
        assert_eq!(integrate(&r, &k).unwrap(), LogNumber::from_rational(rat(1, 3)));
    }

    #[test]
    fn zero_test_function() {
        let f = ThetaHatProvider::zero_fn(3);
        assert!(tr_xi0_nonarch(3, &f).unwrap().is_zero());
        assert!(eps_integral(3, &f, -1).unwrap().is_zero());
        assert!(log_integral_y1(3, &f).unwrap().is_zero());
        assert!(ThetaHatProvider::for_ball(3, 2).is_err());
    }

    #[test]
    fn audit_rows_sum_to_value() {
        for p in [2u64, 3] {
            for audit in audit_eisenstein_constants(p).unwrap() {
                let mut acc = LogNumber::zero();
                for row in &audit.rows {
                    acc += &row.contribution;
                }
                assert_eq!(acc, audit.value, "{} p={p}", audit.name);
            }
        }
    }

    #[test]
    fn ambiguous_unit_cell_rejected() {
        // a valuation-0 cell containing 1 cannot carry a |1-y| kernel
        let r = ShellRegion::new(3).cell(0, 1, 1);
        let k = Kernel::eisenstein(&Rational::zero());
        assert_eq!(integrate(&r, &k), Err(ShellError::KernelCellMismatch));
    }
}
