//! Sieve tables and the arithmetic glue shared by every other module.
//!
//! [`FactorTable`] is a smallest-prime-factor linear sieve that also carries
//! the Möbius function and the divisor count. Factorizing any `n` below the
//! limit is `O(log n)` table lookups, which is what convolution, the Bohr lift
//! and the character tables all lean on.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Complex64, Error, PrimeMap, Result};

/// Precomputed factorization data for `1..=limit`.
///
/// Immutable once built; share it freely between threads.
#[derive(Clone)]
pub struct FactorTable {
    limit: usize,
    spf: Vec<u32>,
    mobius: Vec<i8>,
    divisor_count: Vec<u32>,
    primes: Vec<u64>,
}

impl fmt::Debug for FactorTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FactorTable")
            .field("limit", &self.limit)
            .field("primes", &self.primes.len())
            .finish()
    }
}

impl FactorTable {
    /// Linear sieve up to `limit` inclusive.
    pub fn new(limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::invalid("sieve limit must be at least 1"));
        }
        if limit > u32::MAX as usize {
            return Err(Error::invalid(format!(
                "sieve limit {limit} exceeds the supported maximum {}",
                u32::MAX
            )));
        }

        let mut spf = vec![0u32; limit + 1];
        let mut primes: Vec<u64> = Vec::new();
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
            }
            let lpf = spf[i] as u64;
            for &p in &primes {
                let m = p as usize * i;
                if p > lpf || m > limit {
                    break;
                }
                spf[m] = p as u32;
            }
        }
        if limit >= 1 {
            spf[1] = 1;
        }

        // Second pass: exponent of the smallest prime and its cofactor give
        // μ(n) and d(n) from already-finished smaller entries.
        let mut mobius = vec![0i8; limit + 1];
        let mut divisor_count = vec![0u32; limit + 1];
        let mut exp = vec![0u8; limit + 1];
        let mut rest = vec![0u32; limit + 1];
        mobius[1] = 1;
        divisor_count[1] = 1;
        rest[1] = 1;
        for n in 2..=limit {
            let p = spf[n] as usize;
            let m = n / p;
            if m > 1 && spf[m] as usize == p {
                exp[n] = exp[m] + 1;
                rest[n] = rest[m];
                mobius[n] = 0;
            } else {
                exp[n] = 1;
                rest[n] = m as u32;
                mobius[n] = -mobius[m];
            }
            divisor_count[n] = divisor_count[rest[n] as usize] * (exp[n] as u32 + 1);
        }

        Ok(Self {
            limit,
            spf,
            mobius,
            divisor_count,
            primes,
        })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// Ascending primes up to the limit.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && (n as usize) <= self.limit && self.spf[n as usize] as u64 == n
    }

    /// Smallest prime factor (1 for `n = 1`).
    pub fn smallest_prime_factor(&self, n: usize) -> u32 {
        self.spf[n]
    }

    pub fn mobius(&self, n: usize) -> i8 {
        self.mobius[n]
    }

    pub fn divisor_count(&self, n: usize) -> u32 {
        self.divisor_count[n]
    }

    /// 1-based position of `p` in the prime sequence (`2 ↦ 1`, `3 ↦ 2`, …).
    pub fn prime_position(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok().map(|i| i + 1)
    }

    /// `(prime, exponent)` pairs of `n`, ascending by prime.
    pub fn factorize(&self, n: usize) -> Result<Vec<(u64, u32)>> {
        self.check_range(n)?;
        Ok(self.factors(n).collect())
    }

    /// Unchecked factor iterator; `n` must be in `1..=limit`.
    pub(crate) fn factors(&self, mut n: usize) -> impl Iterator<Item = (u64, u32)> + '_ {
        std::iter::from_fn(move || {
            if n <= 1 {
                return None;
            }
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            Some((p as u64, e))
        })
    }

    pub(crate) fn check_range(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.limit {
            return Err(Error::invalid(format!(
                "index {n} outside sieve range 1..={}",
                self.limit
            )));
        }
        Ok(())
    }
}

/// Exponent vector of a positive integer, as `(prime, exponent ≥ 1)` pairs
/// sorted by prime. The empty index corresponds to `n = 1`.
///
/// Sorting by prime is the same as sorting by prime position.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<(u64, u32)>);

impl MultiIndex {
    /// Validates ordering and exponents; primality is the caller's concern.
    pub fn new(mut pairs: Vec<(u64, u32)>) -> Result<Self> {
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::invalid(format!("prime {} repeated in multi-index", w[0].0)));
            }
        }
        if let Some(&(p, e)) = pairs.iter().find(|&&(p, e)| p < 2 || e == 0) {
            return Err(Error::invalid(format!("bad multi-index entry ({p}, {e})")));
        }
        Ok(Self(pairs))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    /// Total degree `Σ ν_p`.
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }
}

/// Factorization of `n` as a multi-index.
pub fn to_multi_index(n: usize, table: &FactorTable) -> Result<MultiIndex> {
    table.check_range(n)?;
    Ok(MultiIndex(table.factors(n).collect()))
}

/// Inverse of [`to_multi_index`]; fails on `u64` overflow.
pub fn from_multi_index(index: &MultiIndex) -> Result<u64> {
    index.0.iter().try_fold(1u64, |acc, &(p, e)| {
        p.checked_pow(e)
            .and_then(|pe| acc.checked_mul(pe))
            .ok_or_else(|| Error::invalid("multi-index value overflows u64"))
    })
}

/// Totally multiplicative sequence `a_1..a_n` from its prime values.
///
/// Primes missing from `values` get `a_p = 0`. Returned vector is 1-based:
/// entry 0 is unused and set to zero.
pub fn extend_multiplicatively(values: &PrimeMap, n: usize, table: &FactorTable) -> Result<Vec<Complex64>> {
    table.check_range(n)?;
    for &p in values.keys() {
        if p as usize > n {
            return Err(Error::invalid(format!("prime {p} exceeds truncation {n}")));
        }
        if !table.is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
    }
    let mut a = vec![Complex64::new(0.0, 0.0); n + 1];
    a[1] = Complex64::new(1.0, 0.0);
    for m in 2..=n {
        let p = table.smallest_prime_factor(m) as usize;
        let ap = if p == m {
            values.get(&(p as u64)).copied().unwrap_or_default()
        } else {
            a[p]
        };
        a[m] = ap * a[m / p];
    }
    Ok(a)
}

/// Trial-division primality, for keys that arrive without a sieve.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// `|a_p| ≈ scale · p^{-exponent}` fitted in log-log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub scale: f64,
    pub exponent: f64,
    /// RMS residual of `ln|a_p|`.
    pub residual: f64,
    /// Largest prime in the fit.
    pub last_prime: u64,
}

/// Fits a power law to prime values when it is safe to extrapolate: at least
/// three primes, the keys are every prime from 2 up to the largest key, none
/// of the values vanish, and the fit is exact to `1e-9`.
pub fn fit_prime_power_law(values: &PrimeMap) -> Option<PowerLawFit> {
    if values.len() < 3 || values.values().any(|a| a.norm() == 0.0) {
        return None;
    }
    let mut expected = 2u64;
    for &p in values.keys() {
        if p != expected {
            return None;
        }
        expected = (p + 1..).find(|&q| is_prime_u64(q)).expect("infinitely many primes");
    }
    let pts: Vec<(f64, f64)> = values.iter().map(|(&p, a)| ((p as f64).ln(), a.norm().ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|q| q.0).sum::<f64>() / m;
    let my = pts.iter().map(|q| q.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|q| (q.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|q| (q.1 - intercept - slope * q.0).powi(2)).sum::<f64>() / m).sqrt();
    (residual < 1e-9).then(|| PowerLawFit {
        scale: intercept.exp(),
        exponent: -slope,
        residual,
        last_prime: *values.keys().next_back().unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Independent oracle: factor by trial division.
    fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            if e > 0 {
                out.push((d, e));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    fn trial_mobius(n: u64) -> i8 {
        let f = trial_factor(n);
        if f.iter().any(|&(_, e)| e > 1) {
            0
        } else if f.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn zero_limit_rejected() {
        assert!(matches!(FactorTable::new(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn limit_one() {
        let t = FactorTable::new(1).unwrap();
        assert!(t.primes().is_empty());
        assert_eq!(t.mobius(1), 1);
        assert_eq!(t.divisor_count(1), 1);
    }

    #[test]
    fn small_values() {
        let t = FactorTable::new(10).unwrap();
        assert_eq!(t.primes(), &[2, 3, 5, 7]);
        assert_eq!(t.mobius(6), 1);
        assert_eq!(t.mobius(4), 0);
        assert_eq!(t.divisor_count(6), 4);
        assert_eq!(t.prime_position(7), Some(4));
        assert_eq!(t.prime_position(8), None);
    }

    #[test]
    fn mobius_matches_trial_division_at_scale() {
        let t = FactorTable::new(1_000_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.random_range(1..=1_000_000u64);
            assert_eq!(t.mobius(n as usize), trial_mobius(n), "n = {n}");
        }
        // Mertens function at 10^6 is 212.
        let mertens: i64 = (1..=1_000_000).map(|n| t.mobius(n) as i64).sum();
        assert_eq!(mertens, 212);
    }

    #[test]
    fn table_invariants_exhaustive() {
        let limit = 5000;
        let t = FactorTable::new(limit).unwrap();
        for n in 1..=limit {
            let f = t.factorize(n).unwrap();
            assert_eq!(f, trial_factor(n as u64));
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n as u64);
            let d = (1..=n).filter(|d| n % d == 0).count() as u32;
            assert_eq!(t.divisor_count(n), d);
            let mu_sum: i64 = (1..=n).filter(|d| n % d == 0).map(|d| t.mobius(d) as i64).sum();
            assert_eq!(mu_sum, i64::from(n == 1));
        }
    }

    #[test]
    fn divisor_count_multiplicative_and_submultiplicative() {
        let limit = 20_000;
        let t = FactorTable::new(limit).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5000 {
            let m = rng.random_range(1..=140usize);
            let n = rng.random_range(1..=140usize);
            let (dm, dn, dmn) = (t.divisor_count(m), t.divisor_count(n), t.divisor_count(m * n));
            assert!(dmn <= dm * dn);
            if gcd(m, n) == 1 {
                assert_eq!(dmn, dm * dn);
            }
        }
    }

    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn multi_index_examples() {
        let t = FactorTable::new(100).unwrap();
        assert!(to_multi_index(1, &t).unwrap().is_empty());
        assert_eq!(to_multi_index(12, &t).unwrap().pairs(), &[(2, 2), (3, 1)]);
        assert!(to_multi_index(0, &t).is_err());
        assert!(to_multi_index(101, &t).is_err());
    }

    #[test]
    fn multi_index_roundtrip_random() {
        let t = FactorTable::new(1_000_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let n = rng.random_range(1..=1_000_000usize);
            assert_eq!(from_multi_index(&to_multi_index(n, &t).unwrap()).unwrap(), n as u64);
        }
    }

    #[test]
    fn multi_index_validation() {
        assert!(MultiIndex::new(vec![(3, 1), (2, 2)]).is_ok());
        assert!(MultiIndex::new(vec![(2, 1), (2, 2)]).is_err());
        assert!(MultiIndex::new(vec![(2, 0)]).is_err());
        assert!(from_multi_index(&MultiIndex::new(vec![(2, 70)]).unwrap()).is_err());
    }

    #[test]
    fn extend_single_prime() {
        let t = FactorTable::new(8).unwrap();
        let values = PrimeMap::from([(2, Complex64::new(0.5, 0.0))]);
        let a = extend_multiplicatively(&values, 8, &t).unwrap();
        let expect = [1.0, 0.5, 0.0, 0.25, 0.0, 0.0, 0.0, 0.125];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(a[n + 1], Complex64::new(*e, 0.0));
        }
    }

    #[test]
    fn extend_empty_is_unit() {
        let t = FactorTable::new(4).unwrap();
        let a = extend_multiplicatively(&PrimeMap::new(), 4, &t).unwrap();
        assert_eq!(&a[1..], &[Complex64::new(1.0, 0.0), 0.0.into(), 0.0.into(), 0.0.into()]);
    }

    #[test]
    fn extend_power_law_gives_power_law() {
        let t = FactorTable::new(20).unwrap();
        let values: PrimeMap = t
            .primes()
            .iter()
            .map(|&p| (p, Complex64::new((p as f64).powf(-2.0), 0.0)))
            .collect();
        let a = extend_multiplicatively(&values, 20, &t).unwrap();
        for n in 1..=20 {
            assert!((a[n].re - (n as f64).powi(-2)).abs() < 1e-15, "n = {n}");
        }
    }

    #[test]
    fn extend_rejects_bad_keys() {
        let t = FactorTable::new(10).unwrap();
        let composite = PrimeMap::from([(4, Complex64::new(0.5, 0.0))]);
        assert!(extend_multiplicatively(&composite, 10, &t).is_err());
        let too_big = PrimeMap::from([(7, Complex64::new(0.5, 0.0))]);
        assert!(extend_multiplicatively(&too_big, 5, &t).is_err());
    }

    #[test]
    fn extend_is_totally_multiplicative_exhaustive() {
        let n = 600;
        let t = FactorTable::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let values: PrimeMap = t
            .primes()
            .iter()
            .take(12)
            .map(|&p| (p, Complex64::new(rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9))))
            .collect();
        let a = extend_multiplicatively(&values, n, &t).unwrap();
        for k in 1..=n {
            for l in 1..=n / k {
                assert!((a[k * l] - a[k] * a[l]).norm() < 1e-14);
            }
        }
    }
    #[test]
    fn power_law_fit_cases() {
        let t = FactorTable::new(200).unwrap();
        let law: PrimeMap = t.primes().iter().map(|&p| (p, Complex64::new((p as f64).powf(-0.8), 0.0))).collect();
        let fit = fit_prime_power_law(&law).unwrap();
        assert!((fit.exponent - 0.8).abs() < 1e-12 && (fit.scale - 1.0).abs() < 1e-12);

        let mut gap = law.clone();
        gap.remove(&7);
        assert!(fit_prime_power_law(&gap).is_none());

        let mut noisy = law.clone();
        noisy.insert(11, Complex64::new(0.3, 0.0));
        assert!(fit_prime_power_law(&noisy).is_none());

        let short: PrimeMap = law.iter().take(2).map(|(&p, &a)| (p, a)).collect();
        assert!(fit_prime_power_law(&short).is_none());
    }

    #[test]
    fn trial_primality_agrees_with_sieve() {
        let t = FactorTable::new(10_000).unwrap();
        for n in 0..=10_000u64 {
            assert_eq!(is_prime_u64(n), t.is_prime(n), "n = {n}");
        }
    }
}
