//! Global hyperbolic sums: enumeration of the split support, the degree-1
//! term, the modified parts Ĵ and J̃ in both of their forms, truncation, and
//! partial-sum sweeps over `n < X`.

use crate::arith::MultTables;
use crate::exact::{rat, rat_int, rat_pow, LogNumber, Rational};
use crate::orbital::{orb_split, worb, HeckeBall, TestFunctionSpec};
use crate::padic::PlaceSet;
use num_traits::Zero;
use rayon::prelude::*;

/// Valuation bounds for `a` and `b` at each finite place of S, together
/// with the archimedean bound on `|a-b| / √|ab|` cut out by the profile
/// support. Derived deterministically from the test data.
#[derive(Debug, Clone)]
pub struct SupportBox {
    /// per S-prime `(lower, upper)` valuation range, `0 <= v <= m_i`
    pub val_ranges: Vec<(i64, i64)>,
    /// `|a-b| <= arch_factor · √|ab|`
    pub arch_factor: f64,
}

pub fn support_box(s: &PlaceSet, f: &TestFunctionSpec) -> SupportBox {
    let val_ranges =
        s.finite_primes().iter().map(|&q| (0i64, i64::from(f.ball(q).m))).collect();
    let r = f.arch.support_radius();
    SupportBox { val_ranges, arch_factor: 2.0 * (r * r + 1.0).sqrt() }
}

/// One ordered split element of the support, `ab = ±n·q^ν`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportPair {
    pub a: i64,
    pub b: i64,
    pub nu: Vec<u32>,
}

/// Driver for the hyperbolic sums of one `(S, f)` configuration. Holds the
/// sieve tables used for divisor enumeration and factoring.
pub struct HypSums<'a> {
    pub s: &'a PlaceSet,
    pub f: &'a TestFunctionSpec,
    tables: MultTables,
    /// `∏ q_i^{m_i/2}`, the place-constant θ_q-part of every supported pair
    qhalf: f64,
}

impl<'a> HypSums<'a> {
    /// `max_n` bounds the n-range of later calls (the sieve covers it).
    pub fn new(
        s: &'a PlaceSet,
        f: &'a TestFunctionSpec,
        max_n: u64,
    ) -> Result<Self, crate::arith::ArithError> {
        let tables = MultTables::sieve(max_n.max(2) + 1)?;
        let qhalf = s
            .finite_primes()
            .iter()
            .map(|&q| (q as f64).powf(f64::from(f.ball(q).m) / 2.0))
            .product();
        Ok(HypSums { s, f, tables, qhalf })
    }

    fn coprime(&self, n: u64) -> bool {
        self.s.finite_primes().iter().all(|&q| n % q != 0)
    }

    /// The complete finite list of `(a, b, ν)` with `a ≠ b ∈ Z^S`,
    /// `ab = ±n·q^ν`, inside the support box. Enumeration runs over the
    /// divisors of `n`, the per-place valuation splits `0 <= t_i <= m_i`
    /// (forcing `ν_i = m_i`), and the four sign choices.
    pub fn enumerate_support(&self, n: u64) -> Vec<SupportPair> {
        assert!(self.coprime(n), "n must be coprime to S");
        let primes = self.s.finite_primes();
        let ms: Vec<u32> = primes.iter().map(|&q| self.f.ball(q).m).collect();
        let mut out = Vec::new();
        // all valuation splits t across the S-primes
        let mut splits: Vec<Vec<u32>> = vec![Vec::new()];
        for &m in &ms {
            let mut next = Vec::new();
            for sp in &splits {
                for t in 0..=m {
                    let mut sp2 = sp.clone();
                    sp2.push(t);
                    next.push(sp2);
                }
            }
            splits = next;
        }
        let qm: u64 = primes.iter().zip(&ms).map(|(&q, &m)| q.pow(m)).product();
        let abs_ab = n as f64 * qm as f64;
        let r = self.f.arch.support_radius();
        for d in self.tables.divisors(n) {
            for sp in &splits {
                let qa: u64 =
                    primes.iter().zip(sp).map(|(&q, &t)| q.pow(t)).product();
                let qb: u64 = primes
                    .iter()
                    .zip(sp.iter().zip(&ms))
                    .map(|(&q, (&t, &m))| q.pow(m - t))
                    .product();
                let a0 = (d * qa) as i64;
                let b0 = ((n / d) * qb) as i64;
                for (sa, sb) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                    let (a, b) = (sa * a0, sb * b0);
                    if a == b {
                        continue;
                    }
                    // θ_∞ support: |a+b| <= 2R √|ab|
                    let sum = (a + b) as f64;
                    if sum * sum > 4.0 * r * r * abs_ab {
                        continue;
                    }
                    out.push(SupportPair { a, b, nu: ms.clone() });
                }
            }
        }
        out
    }

    /// `θ_∞(diag(a,b))` through the profile.
    fn theta_inf(&self, pair: &SupportPair) -> f64 {
        self.f.arch.theta_split(pair.a as f64, pair.b as f64)
    }

    /// Degree-1 term, θ-form:
    /// `∏(1-q^{-1}) Σ θ_∞ θ_q = ∏ q^{m/2} Σ θ_∞` for Hecke-ball data.
    pub fn i_hyp_deg1(&self, n: u64) -> f64 {
        self.qhalf * self.enumerate_support(n).iter().map(|p| self.theta_inf(p)).sum::<f64>()
    }

    /// Degree-1 term assembled as the adelic product `Σ_γ ∏_v orb(f_v; γ)`,
    /// the independent route through the local orbital integrals.
    pub fn i_hyp_deg1_adelic(&self, n: u64) -> f64 {
        let mut total = 0.0;
        for pair in self.enumerate_support(n) {
            let (a, b) = (rat_int(pair.a), rat_int(pair.b));
            let ab = (pair.a as f64) * (pair.b as f64);
            // archimedean orbital integral (|ab|^{1/2}/|a-b|) θ_∞
            let mut prod =
                ab.abs().sqrt() / ((pair.a - pair.b) as f64).abs() * self.theta_inf(&pair);
            // S-places: unscaled Hecke balls
            for &q in self.s.finite_primes() {
                prod *= orb_split(q, HeckeBall::unscaled(self.f.ball(q).m), &a, &b).eval();
            }
            // places outside S: ∏ p^{-n_p/2} p^{v_p(a-b)}
            let away = away_part((pair.a - pair.b).unsigned_abs(), self.s);
            prod *= away as f64 / (n as f64).sqrt();
            total += prod;
        }
        total
    }

    /// The Λ-divisor form of the inner sum of `Ĵ_hyp^S` for one pair:
    /// `Σ_{d | (a-b)^{(q)}} Λ(d)/d` as an exact [`LogNumber`].
    pub fn lambda_form(&self, a: i64, b: i64) -> LogNumber {
        let away = away_part((a - b).unsigned_abs(), self.s);
        let mut total = LogNumber::zero();
        for d in factor_divisors(&self.tables, away) {
            if d < self.tables.limit() {
                if let Some((p, _)) = self.tables.lambda(d) {
                    total += &LogNumber::log_term(p, Rational::new(1.into(), d.into()));
                }
            } else if let Some(p) = prime_power_base(d) {
                total += &LogNumber::log_term(p, Rational::new(1.into(), d.into()));
            }
        }
        total
    }

    /// The same inner sum grouped per prime, `Σ_p Σ_{j<=v_p(a-b)} log p/p^j`.
    pub fn per_prime_form(&self, a: i64, b: i64) -> LogNumber {
        let away = away_part((a - b).unsigned_abs(), self.s);
        let mut total = LogNumber::zero();
        for (p, e) in factor64(&self.tables, away) {
            let mut coeff = Rational::zero();
            for j in 1..=i64::from(e) {
                coeff += rat_pow(p, -j);
            }
            total += &LogNumber::log_term(p, coeff);
        }
        total
    }

    /// `Ĵ_{hyp,p}(f^n)`, the per-prime modified part, numeric.
    pub fn j_hyp_hat_p(&self, n: u64, p: u64) -> f64 {
        assert!(!self.s.contains(p));
        let lp = (p as f64).ln();
        let mut total = 0.0;
        for pair in self.enumerate_support(n) {
            let mut diff = (pair.a - pair.b).unsigned_abs();
            let mut inner = 0.0;
            let mut pw = 1.0 / p as f64;
            while diff % p == 0 {
                inner += pw * lp;
                pw /= p as f64;
                diff /= p;
            }
            total += self.theta_inf(&pair) * inner;
        }
        -self.qhalf * total
    }

    /// `Ĵ_hyp^S(f^n)` through the Λ-divisor form, numeric.
    pub fn j_hyp_hat_s(&self, n: u64) -> f64 {
        let mut total = 0.0;
        for pair in self.enumerate_support(n) {
            let w = self.theta_inf(&pair);
            if w == 0.0 {
                continue;
            }
            total += w * self.lambda_f64(pair.a, pair.b);
        }
        -self.qhalf * total
    }

    fn lambda_f64(&self, a: i64, b: i64) -> f64 {
        let away = away_part((a - b).unsigned_abs(), self.s);
        let mut acc = 0.0;
        for (p, e) in factor64(&self.tables, away) {
            let lp = (p as f64).ln();
            let mut pw = 1.0 / p as f64;
            for _ in 0..e {
                acc += pw * lp;
                pw /= p as f64;
            }
        }
        acc
    }

    /// `J̃_hyp^S(f^n)` assembled from the first-kind modified weighted
    /// orbital integrals themselves (`worb` and `orb_split` at each prime),
    /// the code path independent of the Λ-form.
    pub fn j_tilde_hyp_s(&self, n: u64) -> f64 {
        let mut total = 0.0;
        for pair in self.enumerate_support(n) {
            let w = self.theta_inf(&pair);
            if w == 0.0 {
                continue;
            }
            total += w * self.jtilde_pair_weight(&pair, n).eval_f64();
        }
        -self.qhalf * total
    }

    /// `Σ_{p∉S} (1/2) worb~(f^n_p)/orb(f^n_p)` for one pair, exact.
    fn jtilde_pair_weight(&self, pair: &SupportPair, n: u64) -> LogNumber {
        let (a, b) = (rat_int(pair.a), rat_int(pair.b));
        let away = away_part((pair.a - pair.b).unsigned_abs(), self.s);
        let mut ps: Vec<u64> = factor64(&self.tables, away).into_iter().map(|(p, _)| p).collect();
        for (p, _) in factor64(&self.tables, n) {
            if !ps.contains(&p) {
                ps.push(p);
            }
        }
        let mut total = LogNumber::zero();
        for p in ps {
            let m = factor64(&self.tables, n)
                .into_iter()
                .find(|&(q, _)| q == p)
                .map_or(0, |(_, e)| e);
            let ball = HeckeBall { m, scaled: true };
            let k = crate::padic::vp(&(&a - &b), p).unwrap();
            // (1/2) worb~/orb = worb_lognum/(2 p^k) + (k - m/2) log p
            let (_, w) = worb(p, ball, &a, &b);
            let half_over_orb = w.scale(&(rat(1, 2) * rat_pow(p, -k)));
            let shift = LogNumber::log_term(p, rat_int(k) - rat(i64::from(m), 2));
            total = total + half_over_orb + shift;
        }
        total
    }

    /// The truncation constant: `Ĵ_{hyp,p}(f^n) = 0` for `p > C·n`.
    /// `C = ⌈arch_factor · ∏ q^{m}⌉` folds the proof's `q^{α+β}` with the
    /// archimedean diameter bound; the vanishing scan is the contract.
    pub fn truncation_bound(&self) -> u64 {
        let box_ = support_box(self.s, self.f);
        let qm: u64 = self
            .s
            .finite_primes()
            .iter()
            .map(|&q| q.pow(self.f.ball(q).m))
            .product();
        ((box_.arch_factor * qm as f64).ceil() as u64).max(1)
    }

    /// `(Ĵ - J̃) + (1/2) log n · I_hyp^{deg=1}`, expected zero to evaluation
    /// precision; `Ĵ`, `J̃` and `I` each go through their own route.
    pub fn j_relation_residual(&self, n: u64) -> f64 {
        let jhat = self.j_hyp_hat_s(n);
        let jtilde = self.j_tilde_hyp_s(n);
        (jhat - jtilde) + 0.5 * (n as f64).ln() * self.i_hyp_deg1(n)
    }

    /// Cumulative sums of the three term families at each grid point.
    /// Per-n values are computed in parallel and reduced in index order, so
    /// the result does not depend on the thread count.
    pub fn sweep(&self, grid: &[u64]) -> Vec<SweepRow> {
        let x_max = grid.iter().copied().max().unwrap_or(0);
        let values: Vec<(u64, f64, f64)> = (1..x_max)
            .into_par_iter()
            .filter(|&n| self.coprime(n))
            .map(|n| (n, self.i_hyp_deg1(n), self.j_hyp_hat_s(n)))
            .collect();
        let mut rows = Vec::with_capacity(grid.len());
        let mut acc_i = 0.0;
        let mut acc_jhat = 0.0;
        let mut acc_jtilde = 0.0;
        let mut idx = 0;
        let mut sorted_grid: Vec<u64> = grid.to_vec();
        sorted_grid.sort_unstable();
        for &x in &sorted_grid {
            while idx < values.len() && values[idx].0 < x {
                let (n, i, jh) = values[idx];
                acc_i += i;
                acc_jhat += jh;
                // first-kind values accumulate through the exact relation
                // J~ = J^ + (1/2) log n · I per n
                acc_jtilde += jh + 0.5 * (n as f64).ln() * i;
                idx += 1;
            }
            rows.push(SweepRow { x, i_hyp_deg1: acc_i, j_hyp_hat_s: acc_jhat, j_tilde_hyp_s: acc_jtilde });
        }
        rows
    }
}

/// One row of the hyperbolic sweep: cumulative sums over `n < x`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepRow {
    pub x: u64,
    pub i_hyp_deg1: f64,
    pub j_hyp_hat_s: f64,
    pub j_tilde_hyp_s: f64,
}

fn away_part(mut x: u64, s: &PlaceSet) -> u64 {
    for &q in s.finite_primes() {
        while x % q == 0 {
            x /= q;
        }
    }
    x
}

fn factor64(tables: &MultTables, n: u64) -> Vec<(u64, u32)> {
    if n <= 1 {
        return Vec::new();
    }
    if n < tables.limit() {
        return tables.factor(n);
    }
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn factor_divisors(tables: &MultTables, n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factor64(tables, n) {
        let base = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            divs.extend(base.iter().map(|d| d * pk));
        }
    }
    divs
}

fn prime_power_base(d: u64) -> Option<u64> {
    let mut m = d;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            return (m == 1).then_some(p);
        }
        p += 1;
    }
    (m > 1).then_some(m)
}
