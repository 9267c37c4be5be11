//! Spectral-side main-term calculators, the coefficient ledger, and the
//! limit-form identity checkers.

use crate::arith::{
    self, convolution_main_term, convolution_sum, gamma_s, prime_quadratic_constant,
    sum_divisor_coprime, sum_inv_coprime_f64, DirichletCharacter, MultTables,
};
use crate::exact::{rat, rat_int, rat_pow, LogNumber, Rational};
use crate::hyperbolic::HypSums;
use crate::orbital::{
    self, tr_xi0_arch, wtilde_tr_zero, x0_log_integral, x1_integral, TestFunctionSpec,
};
use crate::padic::PlaceSet;
use crate::shells::{self, ThetaHatProvider};
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("shell integration failed: {0}")]
    Shell(#[from] shells::ShellError),
    #[error("orbital/quadrature failed: {0}")]
    Orbital(#[from] orbital::OrbitalError),
    #[error("arithmetic backend failed: {0}")]
    Arith(#[from] arith::ArithError),
    #[error("padic backend failed: {0}")]
    Padic(#[from] crate::padic::PadicError),
}

/// `γ - 2 log 2 - log π`, the completed-L finite part at the center.
pub fn arch_completed_constant() -> f64 {
    arith::EULER_GAMMA - 2.0 * std::f64::consts::LN_2 - std::f64::consts::PI.ln()
}

/// `Tr(ξ₀(f_v))` at every place of S: the finite traces are exact, the
/// archimedean one is a quadrature value.
pub struct EisensteinTraces {
    pub finite: BTreeMap<u64, Rational>,
    pub arch: f64,
}

pub fn eisenstein_traces(
    s: &PlaceSet,
    f: &TestFunctionSpec,
    tol: f64,
) -> Result<EisensteinTraces, SpectralError> {
    let mut finite = BTreeMap::new();
    for &q in s.finite_primes() {
        let provider = ThetaHatProvider::for_ball(q, f.ball(q).m)?;
        let v = shells::tr_xi0_nonarch(q, &provider)?;
        finite.insert(q, v.constant().clone());
    }
    let (arch, _) = tr_xi0_arch(&f.arch, tol)?;
    Ok(EisensteinTraces { finite, arch })
}

/// `𝔅 = -(1/2) ∏(1-q^{-1})² ∏_{v∈S} Tr(ξ₀(f_v))`.
pub fn coefficient_b(s: &PlaceSet, f: &TestFunctionSpec, tol: f64) -> Result<f64, SpectralError> {
    let traces = eisenstein_traces(s, f, tol)?;
    let mut prod = traces.arch;
    for v in traces.finite.values() {
        prod *= v.to_f64().unwrap();
    }
    let e = s.euler_product_f64();
    Ok(-0.5 * e * e * prod)
}

/// `(1/4) s(triv) ∏ Tr(ξ₀(f_v)) Σ_{n<X, coprime} d(n)` with `s(triv) = -1`:
/// only the trivial character survives for spherical data.
pub fn residual_partial_sum(
    x: u64,
    s: &PlaceSet,
    f: &TestFunctionSpec,
    tol: f64,
) -> Result<f64, SpectralError> {
    let traces = eisenstein_traces(s, f, tol)?;
    let mut prod = traces.arch;
    for v in traces.finite.values() {
        prod *= v.to_f64().unwrap();
    }
    let chi = DirichletCharacter::principal_for(s);
    let (sum, _) = sum_divisor_coprime(x, s, &chi)?;
    Ok(-0.25 * prod * sum.to_complex().re)
}

/// `(1/2) 𝔅 (X log X + (2γ_S - 1) X)`.
pub fn residual_main(x: f64, b: f64, s: &PlaceSet) -> f64 {
    0.5 * b * (x * x.ln() + (2.0 * gamma_s(s) - 1.0) * x)
}

/// `-𝔅 X`.
pub fn hyp_deg1_main(x: f64, b: f64) -> f64 {
    -b * x
}

/// `Σ_{p∉S} log p/(p²-1) · 𝔅 X`.
pub fn jhat_main(x: f64, b: f64, prime_quad: f64) -> f64 {
    prime_quad * b * x
}

/// `-(1/2) 𝔅 (X log X - X) + Σ_{p∉S} log p/(p²-1) · 𝔅 X`.
pub fn jtilde_main(x: f64, b: f64, prime_quad: f64) -> f64 {
    -0.5 * b * (x * x.ln() - x) + prime_quad * b * x
}

/// The local limit-form combination for a spherical Hecke ball at `p`,
/// assembled exactly; the left-hand side `(1/2)Tr(R⁻¹R'ξ₀)` vanishes for
/// spherical data, so the value is expected to be the zero `LogNumber`:
///
/// `-δ_{p=2}·2log2·Trξ₀ - (1/2)(1+p^{-1})log p/(1-p^{-1})·Trξ₀
///  + Σ_ε 2(1-εp^{-1})log p/((1-ε)(1-p^{-1})²)·∫_{Y_ε}
///  - 2/(1-p^{-1})·∫_{Y₁}log(...) + (1/2)·w̃Tr`.
pub fn limit_form_check(p: u64) -> Result<LogNumber, SpectralError> {
    let f = ThetaHatProvider::spherical(p);
    let tr = shells::tr_xi0_nonarch(p, &f)?;
    let tr = tr.constant().clone();
    let pm1 = Rational::one() - rat_pow(p, -1); // 1 - 1/p
    let mut total = LogNumber::zero();
    if p == 2 {
        total += &LogNumber::log_term(2, rat_int(-2) * &tr);
    }
    // -(1/2)(1+p^{-1}) log p/(1-p^{-1}) Tr
    let c1 = rat(-1, 2) * (Rational::one() + rat_pow(p, -1)) / &pm1 * &tr;
    total += &LogNumber::log_term(p, c1);
    // Σ_ε 2(1-ε/p) log p / ((1-ε)(1-p^{-1})²) ∫_{Y_ε}
    for eps in [0i64, -1] {
        let integral = shells::eps_integral(p, &f, eps as i32)?;
        let coeff = rat_int(2) * (Rational::one() - rat_int(eps) * rat_pow(p, -1))
            / (Rational::one() - rat_int(eps))
            / (&pm1 * &pm1);
        total += &LogNumber::log_term(p, coeff * integral.constant());
    }
    // -2/(1-p^{-1}) ∫_{Y₁} log(...)
    let log_int = shells::log_integral_y1(p, &f)?;
    total += &log_int.scale(&(rat_int(-2) / &pm1));
    // +(1/2) w̃Tr
    total += &wtilde_tr_zero(p).scale(&rat(1, 2));
    Ok(total)
}

/// The named summary coefficients computable for spherical data, each
/// entry recording which operations produced it.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientLedger {
    pub schema: u32,
    pub b: f64,
    pub c_over_b: f64,
    pub d_over_b: f64,
    pub e_finite: f64,
    pub f_coeff: f64,
    pub gamma_s: f64,
    pub arch_completed_const: f64,
    pub prime_quad_const: f64,
    pub tr_xi0_arch: f64,
    pub tr_xi0_finite: BTreeMap<u64, String>,
    /// implied value of `(1/2)Tr(R_∞⁻¹R_∞'ξ₀(f_∞)) - (1/2)w̃Tr_∞`, reported
    /// from the other archimedean terms, never asserted
    pub implied_arch_combination: f64,
    pub provenance: BTreeMap<String, String>,
}

/// One residual-table row for a partial-sum family.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualRow {
    pub x: u64,
    pub partial_sum: f64,
    pub main_term: f64,
    pub residual: f64,
    pub residual_scaled: f64,
    pub scale_exponent: f64,
}

fn rows_from(
    points: &[(u64, f64, f64)],
    alpha: f64,
) -> Vec<ResidualRow> {
    points
        .iter()
        .map(|&(x, partial, main)| {
            let residual = partial - main;
            ResidualRow {
                x,
                partial_sum: partial,
                main_term: main,
                residual,
                residual_scaled: residual / (x as f64).powf(alpha),
                scale_exponent: alpha,
            }
        })
        .collect()
}

/// Least-squares slope of `y` against `x` (with intercept).
pub fn fitted_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// The full report: ledger, one residual table per term family, and the
/// raw hyperbolic cumulative sums the tables were built from.
pub struct LedgerReport {
    pub ledger: CoefficientLedger,
    pub tables: Vec<(String, Vec<ResidualRow>)>,
    pub hyperbolic_rows: Vec<crate::hyperbolic::SweepRow>,
}

pub fn ledger_report(
    s: &PlaceSet,
    f: &TestFunctionSpec,
    grid: &[u64],
    tol: f64,
) -> Result<LedgerReport, SpectralError> {
    let traces = eisenstein_traces(s, f, tol)?;
    let b = {
        let mut prod = traces.arch;
        for v in traces.finite.values() {
            prod *= v.to_f64().unwrap();
        }
        let e = s.euler_product_f64();
        -0.5 * e * e * prod
    };
    let zero_profile = f.arch.is_zero();
    let pqc = prime_quadratic_constant(s, 1e-10);

    // archimedean ratio pieces (X₀-integral is Tr/2)
    let (x1, _) = x1_integral(&f.arch, tol)?;
    let (x0_log, _) = x0_log_integral(&f.arch, tol)?;
    let x0 = traces.arch / 2.0;

    // C/B: archimedean constant + X₁/X₀ ratio + finite-place ε-ratios
    let mut c_over_b = if zero_profile {
        0.0
    } else {
        let mut v = -0.5
            * (2.0 * arith::EULER_GAMMA - 2.0 * (2.0 * std::f64::consts::PI).ln()
                + s.finite_primes()
                    .iter()
                    .map(|&q| {
                        let qf = q as f64;
                        (1.0 + 1.0 / qf) * qf.ln() / (1.0 - 1.0 / qf)
                    })
                    .sum::<f64>());
        v += std::f64::consts::FRAC_PI_2 * x1 / x0;
        v
    };
    let mut d_over_b = if zero_profile { 0.0 } else { -x0_log / x0 };
    let mut e_finite_sum = 0.0;
    for &q in s.finite_primes() {
        let provider = ThetaHatProvider::for_ball(q, f.ball(q).m)?;
        // Y₁-denominator: Tr (1-q^{-1})/2
        let tr_q = traces.finite[&q].to_f64().unwrap();
        let denom = tr_q * (1.0 - 1.0 / q as f64) / 2.0;
        if !zero_profile {
            for eps in [0i32, -1] {
                let c_eps = shells::eps_integral(q, &provider, eps)?.constant().to_f64().unwrap();
                let qf = q as f64;
                let coeff = (1.0 - f64::from(eps) / qf) / (1.0 - f64::from(eps)) * qf.ln()
                    / (1.0 - 1.0 / qf);
                c_over_b += coeff * c_eps / denom;
            }
            let d_q = shells::log_integral_y1(q, &provider)?.eval_f64();
            d_over_b -= d_q / denom;
        }
        // finite-place part of 𝔈
        let wt = wtilde_tr_zero(q).eval_f64();
        let mut others = traces.arch;
        for (&w, val) in &traces.finite {
            if w != q {
                others *= val.to_f64().unwrap();
            }
        }
        e_finite_sum += wt * others;
    }
    let e = s.euler_product_f64();
    let e_finite = -0.25 * e * e * e_finite_sum;
    let implied = if zero_profile {
        0.0
    } else {
        std::f64::consts::LN_2 * traces.arch + std::f64::consts::PI * x1 - 2.0 * x0_log
    };

    let mut provenance = BTreeMap::new();
    provenance.insert("b".into(), "eisenstein_traces via tr_xi0_nonarch / tr_xi0_arch".into());
    provenance.insert("c_over_b".into(), "x1_integral, eps_integral ratios".into());
    provenance.insert("d_over_b".into(), "x0_log_integral, log_integral_y1 ratios".into());
    provenance.insert(
        "e_finite".into(),
        "wtilde_tr_zero at the finite places; the archimedean summand needs data beyond the θ-profile".into(),
    );
    provenance.insert(
        "f_coeff".into(),
        "zero for spherical finite data (normalized intertwining = identity); the archimedean R' term is reported separately".into(),
    );
    provenance.insert("prime_quad_const".into(), "prime_quadratic_constant".into());
    provenance.insert(
        "implied_arch_combination".into(),
        "(1/2)Tr(R⁻¹R'ξ₀(f_∞)) - (1/2)w̃Tr_∞ implied by the archimedean limit form; output only".into(),
    );

    let ledger = CoefficientLedger {
        schema: 1,
        b,
        c_over_b,
        d_over_b,
        e_finite,
        f_coeff: 0.0,
        gamma_s: gamma_s(s),
        arch_completed_const: arch_completed_constant(),
        prime_quad_const: pqc,
        tr_xi0_arch: traces.arch,
        tr_xi0_finite: traces.finite.iter().map(|(q, v)| (*q, v.to_string())).collect(),
        implied_arch_combination: implied,
        provenance,
    };

    // residual tables over the grid
    let mut tables: Vec<(String, Vec<ResidualRow>)> = Vec::new();
    let x_max = grid.iter().copied().max().unwrap_or(2);
    let chi = DirichletCharacter::principal_for(s);
    let sieve = MultTables::sieve(x_max.max(2))?;

    // divisor and harmonic sums share the sieve pass
    let mut divisor_points = Vec::new();
    let mut harmonic_points = Vec::new();
    let mut eis_points = Vec::new();
    let trace_prod = {
        let mut prod = traces.arch;
        for v in traces.finite.values() {
            prod *= v.to_f64().unwrap();
        }
        prod
    };
    let mut acc_d: f64 = 0.0;
    let mut grid_sorted: Vec<u64> = grid.to_vec();
    grid_sorted.sort_unstable();
    let mut gi = 0;
    for n in 1..=x_max {
        while gi < grid_sorted.len() && n == grid_sorted[gi] {
            let x = grid_sorted[gi];
            let xf = x as f64;
            let e2 = e * e;
            divisor_points.push((
                x,
                acc_d,
                e2 * (xf * xf.ln() + (2.0 * gamma_s(s) - 1.0) * xf),
            ));
            let (hsum, hmain) = sum_inv_coprime_f64(x, s);
            harmonic_points.push((x, hsum, hmain));
            eis_points.push((x, -0.25 * trace_prod * acc_d, residual_main(xf, b, s)));
            gi += 1;
        }
        if n < x_max && chi.eval(n).exact_pair() == Some((1, 0)) {
            acc_d += f64::from(sieve.d(n));
        }
    }
    tables.push(("divisor_sum".into(), rows_from(&divisor_points, 0.5)));
    tables.push(("harmonic_sum".into(), rows_from(&harmonic_points, -1.0)));
    tables.push(("eisenstein_residual_part".into(), rows_from(&eis_points, 0.5)));

    // hyperbolic families
    let hyp = HypSums::new(s, f, x_max)?;
    let hyp_rows = hyp.sweep(&grid_sorted);
    let ipoints: Vec<(u64, f64, f64)> = hyp_rows
        .iter()
        .map(|r| (r.x, r.i_hyp_deg1, hyp_deg1_main(r.x as f64, b)))
        .collect();
    let jpoints: Vec<(u64, f64, f64)> = hyp_rows
        .iter()
        .map(|r| (r.x, r.j_hyp_hat_s, jhat_main(r.x as f64, b, pqc)))
        .collect();
    let tpoints: Vec<(u64, f64, f64)> = hyp_rows
        .iter()
        .map(|r| (r.x, r.j_tilde_hyp_s, jtilde_main(r.x as f64, b, pqc)))
        .collect();
    tables.push(("i_hyp_deg1".into(), rows_from(&ipoints, 2.0 / 3.0)));
    tables.push(("j_hyp_hat".into(), rows_from(&jpoints, 2.0 / 3.0)));
    tables.push(("j_tilde_hyp".into(), rows_from(&tpoints, 2.0 / 3.0)));

    // Perron convolution family at s = 0.3i; the residual column is the
    // norm of the complex difference, not a difference of norms
    let sv = Complex64::new(0.0, 0.3);
    let mut perron_rows = Vec::new();
    for &x in &grid_sorted {
        let sum = convolution_sum(x, sv, &chi, &chi)?;
        let main = convolution_main_term(x, sv, &chi, &chi, s)?;
        let residual = (sum - main).norm();
        perron_rows.push(ResidualRow {
            x,
            partial_sum: sum.norm(),
            main_term: main.norm(),
            residual,
            residual_scaled: residual / (x as f64).powf(0.75),
            scale_exponent: 0.75,
        });
    }
    tables.push(("perron_convolution".into(), perron_rows));

    Ok(LedgerReport { ledger, tables, hyperbolic_rows: hyp_rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbital::ArchProfile;

    #[test]
    fn completed_constant_value() {
        // γ - 2 log 2 - log π = -1.95380858206775...
        let v = arch_completed_constant();
        assert!((v - (-1.9538085820677557)).abs() < 1e-12, "{v}");
    }

    #[test]
    fn limit_form_exact_zero() {
        // the release gate covers p <= 7; larger primes exercise the same
        // telescoping through wider residue-class decompositions
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19] {
            let z = limit_form_check(p).unwrap();
            assert!(z.is_zero(), "p={p}: {z}");
        }
    }

    #[test]
    fn limit_form_pieces_at_two() {
        // the telescoping certificate: coefficients of log 2 are
        // -2, -3/2, +13/6, +8/3, -2, +2/3 summing to zero
        let f = ThetaHatProvider::spherical(2);
        let tr = shells::tr_xi0_nonarch(2, &f).unwrap();
        assert_eq!(tr, LogNumber::from_int(1));
        let c_m1 = shells::eps_integral(2, &f, -1).unwrap().constant().clone();
        let c_0 = shells::eps_integral(2, &f, 0).unwrap().constant().clone();
        assert_eq!(rat_int(6) * c_m1, rat(13, 6));
        assert_eq!(rat_int(8) * c_0, rat(8, 3));
        let d = shells::log_integral_y1(2, &f).unwrap();
        assert_eq!(d.scale(&rat_int(-4)), LogNumber::log_term(2, rat_int(-2)));
        let w = wtilde_tr_zero(2).scale(&rat(1, 2));
        assert_eq!(w, LogNumber::log_term(2, rat(2, 3)));
    }

    #[test]
    fn coefficient_b_spherical() {
        let s = PlaceSet::minimal();
        let f = TestFunctionSpec::spherical(&s, ArchProfile::plateau_default());
        let b = coefficient_b(&s, &f, 1e-10).unwrap();
        let (tr, _) = tr_xi0_arch(&f.arch, 1e-10).unwrap();
        // B = -(1/2)(1/2)² tr = -tr/8; opposite sign to the trace product
        assert!((b + tr / 8.0).abs() < 1e-12);
        assert!(b < 0.0 && tr > 0.0);
        // zero profile gives a zero coefficient
        let fz = TestFunctionSpec::spherical(&s, ArchProfile::zero());
        assert_eq!(coefficient_b(&s, &fz, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn residual_part_small_values() {
        let s = PlaceSet::minimal();
        let f = TestFunctionSpec::spherical(&s, ArchProfile::plateau_default());
        let traces = eisenstein_traces(&s, &f, 1e-10).unwrap();
        let prod = traces.arch; // finite traces are 1
        let v2 = residual_partial_sum(2, &s, &f, 1e-10).unwrap();
        assert!((v2 + 0.25 * prod).abs() < 1e-12);
        let v10 = residual_partial_sum(10, &s, &f, 1e-10).unwrap();
        assert!((v10 + 0.25 * prod * 10.0).abs() < 1e-11);
    }

    #[test]
    fn ledger_spherical_shape() {
        let s = PlaceSet::minimal();
        let f = TestFunctionSpec::spherical(&s, ArchProfile::plateau_default());
        let report = ledger_report(&s, &f, &[100, 200], 1e-9).unwrap();
        assert_eq!(report.ledger.schema, 1);
        assert_eq!(report.ledger.f_coeff, 0.0);
        assert_eq!(report.ledger.tr_xi0_finite[&2], "1");
        assert!(report.ledger.b < 0.0);
        assert_eq!(report.tables.len(), 7);
        for (name, rows) in &report.tables {
            assert_eq!(rows.len(), 2, "{name}");
        }
        // zero profile zeroes the ledger coefficients
        let fz = TestFunctionSpec::spherical(&s, ArchProfile::zero());
        let rz = ledger_report(&s, &fz, &[100], 1e-9).unwrap();
        assert_eq!(rz.ledger.b, 0.0);
        assert_eq!(rz.ledger.c_over_b, 0.0);
        assert_eq!(rz.ledger.implied_arch_combination, 0.0);
    }

    #[test]
    fn slope_fit_recovers_linear_data() {
        let pts: Vec<(f64, f64)> = (1..=8).map(|k| (k as f64, 3.5 * k as f64 + 2.0)).collect();
        assert!((fitted_slope(&pts) - 3.5).abs() < 1e-12);
    }

    #[test]
    fn residuals_per_x_eventually_decrease() {
        // qualitative o(X)/O(X^α) form: |residual|/X shrinks along a dyadic
        // grid for each asymptotic family
        let s = PlaceSet::minimal();
        let f = TestFunctionSpec::spherical(&s, ArchProfile::plateau_default());
        let grid: Vec<u64> = (0..6).map(|k| 500u64 << k).collect();
        let report = ledger_report(&s, &f, &grid, 1e-9).unwrap();
        for (family, rows) in &report.tables {
            let per_x: Vec<f64> =
                rows.iter().map(|r| r.residual.abs() / r.x as f64).collect();
            let first_half = per_x[..3].iter().cloned().fold(0.0f64, f64::max);
            let second_half = per_x[3..].iter().cloned().fold(0.0f64, f64::max);
            assert!(
                second_half <= first_half,
                "{family}: {per_x:?} does not settle"
            );
            assert!(
                per_x.last().unwrap() <= per_x.first().unwrap(),
                "{family}: {per_x:?} grew overall"
            );
        }
    }
}
