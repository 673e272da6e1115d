//! Random characters of the positive rationals and the experiments on
//! vertical limit functions `f_χ(s) = Σ a_n χ(n) n^{-s}`.
//!
//! A character is fixed by its values on primes. Each prime angle comes from
//! a counter-based stream: ChaCha8 keyed by the seed, read at word offset
//! `2p`. Angles are therefore independent of query order and thread count,
//! and sampling is exactly the product (Haar) measure on the torus.
//!
//! The Kronecker flow uses `(T_t χ)(n) = n^{-it} χ(n)`. The family
//! `χ(n) = n^{it}` is `T_{-t}` applied to the trivial character.

use std::f64::consts::TAU;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numtheory::{is_prime_u64, FactorTable};
use crate::series::{dyadic_block_maxima, fit_growth_exponent, n_pow_neg, CompensatedSum, DirichletPoly};
use crate::{Complex64, Error, PrimeMap, Result};

/// A character: seeded random prime angles, optionally moved along the flow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Character {
    /// `None` is the trivial character (all angles zero).
    pub seed: Option<u64>,
    /// Accumulated flow time `t`; prime angles are shifted by `-t ln p`.
    pub flow: f64,
}

/// Draws the character with the given seed.
pub fn sample_character(seed: u64) -> Character {
    Character {
        seed: Some(seed),
        flow: 0.0,
    }
}

/// Seed of the `index`-th character of an experiment, from the master seed.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(1);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}

fn seed_angle(seed: u64, p: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(2 * p as u128);
    let bits = rng.next_u64() >> 11;
    bits as f64 * (1.0 / (1u64 << 53) as f64) * TAU
}

impl Character {
    pub fn trivial() -> Self {
        Self { seed: None, flow: 0.0 }
    }

    /// `n ↦ n^{it}`.
    pub fn vertical(t: f64) -> Self {
        kronecker_flow(&Self::trivial(), -t)
    }

    /// Prime angle in `[0, 2π)`.
    pub fn angle(&self, p: u64) -> f64 {
        let base = self.seed.map_or(0.0, |s| seed_angle(s, p));
        if self.flow == 0.0 {
            base
        } else {
            (base - self.flow * (p as f64).ln()).rem_euclid(TAU)
        }
    }

    /// `χ(p)`; `p` must be prime.
    pub fn at_prime(&self, p: u64) -> Complex64 {
        Complex64::from_polar(1.0, self.angle(p))
    }

    /// `χ(1..=n)` as a 1-based vector, built multiplicatively from the sieve.
    pub fn table(&self, n: usize, table: &FactorTable) -> Result<Vec<Complex64>> {
        table.check_range(n)?;
        let mut v = vec![Complex64::new(0.0, 0.0); n + 1];
        v[1] = Complex64::new(1.0, 0.0);
        for m in 2..=n {
            let p = table.smallest_prime_factor(m) as usize;
            v[m] = if p == m { self.at_prime(p as u64) } else { v[p] * v[m / p] };
        }
        Ok(v)
    }
}

/// `χ(n)` from the factorization of `n`.
pub fn char_value(chi: &Character, n: usize, table: &FactorTable) -> Result<Complex64> {
    Ok(table
        .factorize(n)?
        .into_iter()
        .fold(Complex64::new(1.0, 0.0), |acc, (p, e)| acc * chi.at_prime(p).powu(e)))
}

/// `a_n χ(n)`.
pub fn twist(f: &DirichletPoly, chi: &Character, table: &FactorTable) -> Result<DirichletPoly> {
    let values = chi.table(f.len(), table)?;
    f.map(|n, a| a * values[n])
}

/// `(T_t χ)(n) = n^{-it} χ(n)`.
pub fn kronecker_flow(chi: &Character, t: f64) -> Character {
    Character {
        seed: chi.seed,
        flow: chi.flow + t,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    pub master_seed: u64,
    pub num_characters: usize,
    pub n_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub index: usize,
    pub seed: u64,
    /// Fitted growth exponent of `|S_N(χ)|` (same fit as the abscissa estimator).
    pub exponent: f64,
    pub residual: f64,
    /// `max_{N ≤ N_max} |S_N(χ)|`.
    pub sup: f64,
    /// `sup / (√N_max · ln N_max)`.
    pub normalized_sup: f64,
    /// Running sup at each dyadic `N ≤ N_max` (only with the trace flag).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sup_trace: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthExperimentReport {
    pub num_characters: usize,
    pub n_max: usize,
    pub master_seed: u64,
    pub median_exponent: f64,
    pub rows: Vec<GrowthRow>,
}

/// Per-character growth of `S_N(χ) = Σ_{n ≤ N} a_n χ(n)`.
///
/// `sup_trace` records the running sup across doubling `N`, for watching
/// whether partial sums stay bounded; nothing is asserted about it.
pub fn growth_experiment(
    f: &DirichletPoly,
    opts: ExperimentOptions,
    sup_trace: bool,
    table: &FactorTable,
) -> Result<GrowthExperimentReport> {
    let n_max = opts.n_max;
    if n_max == 0 || f.len() < n_max {
        return Err(Error::invalid(format!(
            "series length {} is shorter than N_max = {n_max}",
            f.len()
        )));
    }
    table.check_range(n_max)?;
    let norm_scale = if n_max > 1 {
        (n_max as f64).sqrt() * (n_max as f64).ln()
    } else {
        1.0
    };
    let rows: Vec<Result<GrowthRow>> = (0..opts.num_characters)
        .into_par_iter()
        .map(|index| {
            let seed = derive_seed(opts.master_seed, index as u64);
            let chi = table_for(seed, n_max, table)?;
            let blocks = dyadic_block_maxima((1..=n_max).map(|n| f[n] * chi[n]));
            let fit = fit_growth_exponent(&blocks)?;
            // Blocks stop at the last power of two; the stretch up to N_max
            // still counts toward the sup.
            let mut acc = CompensatedSum::default();
            let mut sup = 0.0f64;
            for n in 1..=n_max {
                acc.add(f[n] * chi[n]);
                sup = sup.max(acc.value().norm());
            }
            let trace: Vec<f64> = blocks
                .iter()
                .scan(0.0f64, |run, b| {
                    *run = run.max(b.max_abs);
                    Some(*run)
                })
                .collect();
            Ok(GrowthRow {
                index,
                seed,
                exponent: fit.estimate,
                residual: fit.residual,
                sup,
                normalized_sup: sup / norm_scale,
                sup_trace: sup_trace.then_some(trace),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(GrowthExperimentReport {
        num_characters: opts.num_characters,
        n_max,
        master_seed: opts.master_seed,
        median_exponent: median(rows.iter().map(|r| r.exponent)),
        rows,
    })
}

fn table_for(seed: u64, n: usize, table: &FactorTable) -> Result<Vec<Complex64>> {
    sample_character(seed).table(n, table)
}

pub(crate) fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KolmogorovCheck {
    #[serde(rename = "M")]
    pub m: f64,
    /// Fraction of characters with `sup_N |S_N| ≥ M`.
    pub empirical: f64,
    /// `M^{-2} Σ |a_p|²`.
    pub bound: f64,
    /// Binomial standard error `√(q(1-q)/n)` at `q = min(bound, 1)`.
    pub standard_error: f64,
    /// `empirical ≤ bound + 3 · standard_error`.
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeRow {
    pub index: usize,
    pub seed: u64,
    pub sup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeExperimentReport {
    pub num_characters: usize,
    pub n_max: usize,
    pub master_seed: u64,
    /// `Σ_{p ≤ N_max} |a_p|²`.
    pub variance: f64,
    pub kolmogorov: Vec<KolmogorovCheck>,
    pub rows: Vec<PrimeRow>,
}

pub const KOLMOGOROV_LEVELS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

/// `sup_N |Σ_{p ≤ N} a_p χ(p)|` per character, against Kolmogorov's maximal
/// inequality `P(sup ≥ M) ≤ M^{-2} Σ |a_p|²`.
pub fn prime_supported_experiment(prime_coeffs: &PrimeMap, opts: ExperimentOptions) -> Result<PrimeExperimentReport> {
    if let Some(&p) = prime_coeffs.keys().find(|&&p| !is_prime_u64(p)) {
        return Err(Error::invalid(format!(
            "coefficients must be supported on primes; {p} is not prime"
        )));
    }
    let terms: Vec<(u64, Complex64)> = prime_coeffs
        .range(..=opts.n_max as u64)
        .map(|(&p, &a)| (p, a))
        .collect();
    let variance: f64 = terms.iter().map(|(_, a)| a.norm_sqr()).sum();
    let rows: Vec<PrimeRow> = (0..opts.num_characters)
        .into_par_iter()
        .map(|index| {
            let seed = derive_seed(opts.master_seed, index as u64);
            let chi = sample_character(seed);
            let mut acc = CompensatedSum::default();
            let mut sup = 0.0f64;
            for &(p, a) in &terms {
                acc.add(a * chi.at_prime(p));
                sup = sup.max(acc.value().norm());
            }
            PrimeRow { index, seed, sup }
        })
        .collect();
    let n = opts.num_characters.max(1) as f64;
    let kolmogorov = KOLMOGOROV_LEVELS
        .iter()
        .map(|&m| {
            let hits = rows.iter().filter(|r| r.sup >= m).count() as f64;
            let empirical = hits / n;
            let bound = variance / (m * m);
            let q = bound.min(1.0);
            let standard_error = (q * (1.0 - q) / n).sqrt();
            KolmogorovCheck {
                m,
                empirical,
                bound,
                standard_error,
                within: empirical <= bound + 3.0 * standard_error,
            }
        })
        .collect();
    Ok(PrimeExperimentReport {
        num_characters: opts.num_characters,
        n_max: opts.n_max,
        master_seed: opts.master_seed,
        variance,
        kolmogorov,
        rows,
    })
}

/// Rectangle of evaluation points `s = σ + it`, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub sigma_steps: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub t_steps: usize,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<Complex64>> {
        if self.sigma_steps == 0 || self.t_steps == 0 {
            return Err(Error::invalid("grid needs at least one step in each direction"));
        }
        if !(self.sigma_min <= self.sigma_max && self.t_min <= self.t_max)
            || ![self.sigma_min, self.sigma_max, self.t_min, self.t_max].iter().all(|x| x.is_finite())
        {
            return Err(Error::invalid("grid bounds must be finite and ordered"));
        }
        let lin = |a: f64, b: f64, k: usize, i: usize| {
            if k == 1 {
                a
            } else {
                a + (b - a) * i as f64 / (k - 1) as f64
            }
        };
        let mut pts = Vec::with_capacity(self.sigma_steps * self.t_steps);
        for i in 0..self.sigma_steps {
            for j in 0..self.t_steps {
                pts.push(Complex64::new(
                    lin(self.sigma_min, self.sigma_max, self.sigma_steps, i),
                    lin(self.t_min, self.t_max, self.t_steps, j),
                ));
            }
        }
        Ok(pts)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizationStep {
    pub p_max: u64,
    /// `max_s |Π_{p ≤ P} − Π_{p ≤ P/2}|` over the grid.
    pub max_change: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaExploreReport {
    /// Always true: nothing here certifies absence of zeros.
    pub exploratory: bool,
    pub p_max: u64,
    /// Minimum over the grid of `|Π_{p ≤ P_max} (1 − χ(p) p^{-s})^{-1}|`.
    pub min_modulus: f64,
    pub argmin: Complex64,
    /// Max over the grid of `|Σ_{n ≤ P_max} μ(n) χ(n) n^{-s}|`.
    pub max_inverse_sum: f64,
    /// Max over the grid of `|product · inverse sum − 1|`.
    pub max_consistency_gap: f64,
    pub partial_product_trace: Vec<StabilizationStep>,
}

/// Partial Euler products of `ζ_χ(s) = Σ χ(n) n^{-s}` and Möbius-inverted
/// partial sums of `1/ζ_χ` on a grid in `Re s > ½`.
pub fn zeta_chi_explore(
    chi: &Character,
    sigma_min: f64,
    grid: &GridSpec,
    p_max: u64,
    table: &FactorTable,
) -> Result<ZetaExploreReport> {
    if !(sigma_min > 0.5) {
        return Err(Error::invalid(format!("sigma_min must exceed 1/2, got {sigma_min}")));
    }
    if grid.sigma_min < sigma_min {
        return Err(Error::invalid(format!(
            "grid reaches Re s = {} below sigma_min = {sigma_min}",
            grid.sigma_min
        )));
    }
    let pts = grid.points()?;
    let n_sum = p_max.max(1) as usize;
    table.check_range(n_sum)?;
    let primes: Vec<u64> = table.primes().iter().copied().take_while(|&p| p <= p_max).collect();
    let chi_p: Vec<Complex64> = primes.iter().map(|&p| chi.at_prime(p)).collect();
    let chi_n = chi.table(n_sum, table)?;

    // Checkpoints P_max, P_max/2, … ≥ 2 in ascending order.
    let mut checkpoints = Vec::new();
    let mut q = p_max;
    while q >= 2 {
        checkpoints.push(q);
        q /= 2;
    }
    checkpoints.reverse();

    struct PointResult {
        product: Complex64,
        inverse: Complex64,
        snapshots: Vec<Complex64>,
    }
    let results: Vec<PointResult> = pts
        .par_iter()
        .map(|&s| {
            let mut prod = Complex64::new(1.0, 0.0);
            let mut snapshots = Vec::with_capacity(checkpoints.len());
            let mut next = 0;
            for (&p, &c) in primes.iter().zip(&chi_p) {
                while next < checkpoints.len() && p > checkpoints[next] {
                    snapshots.push(prod);
                    next += 1;
                }
                prod /= Complex64::new(1.0, 0.0) - c * n_pow_neg(p as usize, s);
            }
            while snapshots.len() < checkpoints.len() {
                snapshots.push(prod);
            }
            let mut inv = CompensatedSum::default();
            for n in 1..=n_sum {
                let mu = table.mobius(n);
                if mu != 0 {
                    inv.add(chi_n[n] * n_pow_neg(n, s) * mu as f64);
                }
            }
            PointResult {
                product: prod,
                inverse: inv.value(),
                snapshots,
            }
        })
        .collect();

    let (mut min_modulus, mut argmin) = (f64::INFINITY, pts[0]);
    let mut max_inverse_sum = 0.0f64;
    let mut max_gap = 0.0f64;
    for (r, &s) in results.iter().zip(&pts) {
        if r.product.norm() < min_modulus {
            min_modulus = r.product.norm();
            argmin = s;
        }
        max_inverse_sum = max_inverse_sum.max(r.inverse.norm());
        max_gap = max_gap.max((r.product * r.inverse - 1.0).norm());
    }
    let trace = (1..checkpoints.len())
        .map(|k| StabilizationStep {
            p_max: checkpoints[k],
            max_change: results
                .iter()
                .map(|r| (r.snapshots[k] - r.snapshots[k - 1]).norm())
                .fold(0.0, f64::max),
        })
        .collect();
    Ok(ZetaExploreReport {
        exploratory: true,
        p_max,
        min_modulus,
        argmin,
        max_inverse_sum,
        max_consistency_gap: max_gap,
        partial_product_trace: trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthDiagnostic {
    /// `max |f_χ(s) − a_1| · σ^{1/2} / (1 + |t|^{1/2})` over the grid.
    pub constant: f64,
    pub argmax: Complex64,
    /// Some grid point has `σ ≤ ½` and used the raw truncation.
    pub heuristic: bool,
    /// Smoothing scale `M` of `e^{-n/M}` used for `σ > ½`.
    pub smoothing_scale: f64,
    /// Relative change of the constant between scales `M/4`, `M/2` and `M`.
    pub stabilization: [f64; 2],
}

/// Empirical constant in `|f_χ(s) − a_1| ≤ C (1 + |t|^{1/2}) σ^{-1/2}`.
///
/// For `σ > ½` the series is Abel-smoothed with `e^{-n/M}`, `M = N/16`; the
/// same constant computed at `M/4` and `M/2` is reported as a stabilization
/// diagnostic. Points with `σ ≤ ½` use the raw truncation and mark the whole
/// result heuristic. No finite-`N` error bound is claimed in either regime.
pub fn growth_bound_diagnostic(
    f: &DirichletPoly,
    chi: &Character,
    grid: &GridSpec,
    table: &FactorTable,
) -> Result<GrowthDiagnostic> {
    let pts = grid.points()?;
    if pts.iter().any(|s| !(s.re > 0.0)) {
        return Err(Error::invalid("growth diagnostic needs Re s > 0 on the whole grid"));
    }
    let twisted = twist(f, chi, table)?;
    let a1 = twisted[1];
    let n = twisted.len();
    let m = (n as f64 / 16.0).max(1.0);
    let scales = [m / 4.0, m / 2.0, m];
    let per_point: Vec<[f64; 3]> = pts
        .par_iter()
        .map(|&s| {
            let weight = s.re.sqrt() / (1.0 + s.im.abs().sqrt());
            if s.re <= 0.5 {
                let raw = crate::series::evaluate(&twisted, s);
                let r = (raw - a1).norm() * weight;
                return [r, r, r];
            }
            // k = 1 is skipped: the quantity is f_χ − a_1.
            let mut acc = [CompensatedSum::default(); 3];
            for k in 2..=n {
                let a = twisted[k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let term = a * n_pow_neg(k, s);
                for (j, &sc) in scales.iter().enumerate() {
                    acc[j].add(term * (-(k as f64) / sc).exp());
                }
            }
            [0, 1, 2].map(|j| acc[j].value().norm() * weight)
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, pts[0]);
    let mut maxes = [0.0f64; 3];
    for (r, &s) in per_point.iter().zip(&pts) {
        for j in 0..3 {
            maxes[j] = maxes[j].max(r[j]);
        }
        if r[2] > best.0 {
            best = (r[2], s);
        }
    }
    let rel = |a: f64, b: f64| if b == 0.0 { (a - b).abs() } else { (a - b).abs() / b };
    Ok(GrowthDiagnostic {
        constant: maxes[2],
        argmax: best.1,
        heuristic: pts.iter().any(|s| s.re <= 0.5),
        smoothing_scale: m,
        stabilization: [rel(maxes[0], maxes[2]), rel(maxes[1], maxes[2])],
    })
}
