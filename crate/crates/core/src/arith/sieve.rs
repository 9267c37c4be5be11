//! Linear sieve for d, φ, μ, Λ and smallest-prime-factor factorization.

use super::ArithError;

/// Hard cap keeping the table arrays around 500 MB.
const MAX_LIMIT: u64 = 20_000_000;

/// Tables of d(n), φ(n), μ(n), Λ(n) for `1 <= n < limit`.
///
/// Λ(n) is stored symbolically as the pair `(p, k)` with `n = p^k`, so sums
/// over Λ can stay in the `Q·log p` value field.
pub struct MultTables {
    limit: u64,
    d: Vec<u32>,
    phi: Vec<u32>,
    mu: Vec<i8>,
    spf: Vec<u32>,
    lambda: Vec<(u32, u8)>,
    primes: Vec<u64>,
}

impl MultTables {
    pub fn sieve(limit: u64) -> Result<Self, ArithError> {
        if limit < 2 {
            return Err(ArithError::SieveTooSmall);
        }
        if limit > MAX_LIMIT {
            return Err(ArithError::SieveTooLarge(limit, MAX_LIMIT));
        }
        let n = limit as usize;
        let mut d = vec![0u32; n];
        let mut phi = vec![0u32; n];
        let mut mu = vec![0i8; n];
        let mut spf = vec![0u32; n];
        // exponent of spf(i) in i, used by the linear recurrences
        let mut cnt = vec![0u8; n];
        let mut primes: Vec<u64> = Vec::new();

        d[1] = 1;
        phi[1] = 1;
        mu[1] = 1;
        for i in 2..n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
                d[i] = 2;
                phi[i] = (i - 1) as u32;
                mu[i] = -1;
                cnt[i] = 1;
            }
            for &p in &primes {
                let p = p as usize;
                if p > spf[i] as usize || i * p >= n {
                    break;
                }
                let m = i * p;
                spf[m] = p as u32;
                if p == spf[i] as usize {
                    cnt[m] = cnt[i] + 1;
                    d[m] = d[i] / (cnt[i] as u32 + 1) * (cnt[i] as u32 + 2);
                    phi[m] = phi[i] * p as u32;
                    mu[m] = 0;
                    break;
                } else {
                    cnt[m] = 1;
                    d[m] = d[i] * 2;
                    phi[m] = phi[i] * (p as u32 - 1);
                    mu[m] = -mu[i];
                }
            }
        }

        let mut lambda = vec![(0u32, 0u8); n];
        for &p in &primes {
            let mut pk = p;
            let mut k = 1u8;
            while pk < limit {
                lambda[pk as usize] = (p as u32, k);
                pk = match pk.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
                k += 1;
            }
        }

        Ok(MultTables { limit, d, phi, mu, spf, lambda, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn d(&self, n: u64) -> u32 {
        self.d[n as usize]
    }

    pub fn phi(&self, n: u64) -> u64 {
        u64::from(self.phi[n as usize])
    }

    pub fn mu(&self, n: u64) -> i8 {
        self.mu[n as usize]
    }

    /// `Λ(n)` as `(p, k)` with `n = p^k`, or `None` when Λ(n) = 0.
    pub fn lambda(&self, n: u64) -> Option<(u64, u32)> {
        let (p, k) = self.lambda[n as usize];
        (p != 0).then(|| (u64::from(p), u32::from(k)))
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] == n as u32
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Prime factorization via smallest prime factors, `n < limit`.
    pub fn factor(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        while n > 1 {
            let p = u64::from(self.spf[n as usize]);
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    /// All divisors of `n`, unsorted.
    pub fn divisors(&self, n: u64) -> Vec<u64> {
        let mut divs = vec![1u64];
        for (p, e) in self.factor(n) {
            let base = divs.clone();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                divs.extend(base.iter().map(|d| d * pk));
            }
        }
        divs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d_direct(n: u64) -> u32 {
        (1..=n).filter(|k| n % k == 0).count() as u32
    }

    fn phi_direct(n: u64) -> u64 {
        (1..=n).filter(|k| num_integer::gcd(*k, n) == 1).count() as u64
    }

    fn mu_direct(n: u64) -> i8 {
        let mut m = n;
        let mut primes = 0;
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                m /= p;
                if m % p == 0 {
                    return 0;
                }
                primes += 1;
            }
            p += 1;
        }
        if m > 1 {
            primes += 1;
        }
        if primes % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn small_tables() {
        let t = MultTables::sieve(10).unwrap();
        let d: Vec<u32> = (1..10).map(|n| t.d(n)).collect();
        assert_eq!(d, vec![1, 2, 2, 3, 2, 4, 2, 4, 3]);
        assert_eq!(t.mu(6), 1);
        assert_eq!(t.mu(8), 0);
        assert_eq!(t.lambda(9), Some((3, 2)));
        assert_eq!(t.lambda(6), None);
        assert_eq!(t.lambda(1), None);
    }

    #[test]
    fn agrees_with_direct_factorization() {
        let t = MultTables::sieve(20_000).unwrap();
        // deterministic pseudo-random sample
        let mut x = 123456789u64;
        for _ in 0..1000 {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let n = 1 + x % 19_999;
            assert_eq!(t.d(n), d_direct(n), "d({n})");
            assert_eq!(t.phi(n), phi_direct(n), "phi({n})");
            assert_eq!(t.mu(n), mu_direct(n), "mu({n})");
        }
    }

    #[test]
    fn divisor_identities() {
        let t = MultTables::sieve(10_000).unwrap();
        for n in 1..10_000u64 {
            let divs = t.divisors(n);
            let phi_sum: u64 = divs.iter().map(|&dd| t.phi(dd)).sum();
            assert_eq!(phi_sum, n);
            let mu_sum: i64 = divs.iter().map(|&dd| i64::from(t.mu(dd))).sum();
            assert_eq!(mu_sum, i64::from(n == 1));
        }
    }

    #[test]
    fn rejects_out_of_budget() {
        assert!(matches!(MultTables::sieve(1), Err(ArithError::SieveTooSmall)));
        assert!(matches!(
            MultTables::sieve(MAX_LIMIT + 1),
            Err(ArithError::SieveTooLarge(_, _))
        ));
    }
}
