//! The Bohr correspondence `n^{-s} ↦ z^{ν(n)}`, `z_j = p_j^{-s}`.
//!
//! A Dirichlet polynomial becomes a polynomial in one variable per prime of
//! its support. Point evaluation on the open polydisk is bounded by the
//! reproducing-kernel constant, and the sup norm over the half-plane equals
//! the sup over the polytorus `|z_j| = 1`, which is what the grid and
//! multi-start searches below explore.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numtheory::{fit_prime_power_law, from_multi_index, is_prime_u64, to_multi_index, FactorTable, MultiIndex};
use crate::series::DirichletPoly;
use crate::{Complex64, Error, PrimeMap, Result};

/// Largest torus dimension the grid search accepts.
pub const MAX_GRID_DIMENSION: usize = 8;
/// Grid points evaluated before the grid search gives up.
pub const GRID_POINT_BUDGET: u64 = 1 << 27;
/// Default per-dimension grid resolution.
pub const DEFAULT_RESOLUTION: usize = 64;

/// Sparse polynomial in the prime variables.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiIndexPoly {
    terms: BTreeMap<MultiIndex, Complex64>,
    prime_support: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exponents: Vec<(u64, u32)>,
    re: f64,
    im: f64,
}

impl Serialize for MultiIndexPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self
            .terms
            .iter()
            .map(|(k, v)| TermRecord {
                exponents: k.pairs().to_vec(),
                re: v.re,
                im: v.im,
            })
            .collect();
        records.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiIndexPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(d)?;
        let mut terms = Vec::with_capacity(records.len());
        for r in records {
            let idx = MultiIndex::new(r.exponents).map_err(serde::de::Error::custom)?;
            terms.push((idx, Complex64::new(r.re, r.im)));
        }
        MultiIndexPoly::from_terms(terms).map_err(serde::de::Error::custom)
    }
}

impl MultiIndexPoly {
    /// Builds from terms; repeated indices are summed, zeros dropped.
    pub fn from_terms(terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Result<Self> {
        let mut map: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (k, v) in terms {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::invalid("non-finite coefficient in multi-index polynomial"));
            }
            if let Some(&(p, _)) = k.pairs().iter().find(|&&(p, _)| !is_prime_u64(p)) {
                return Err(Error::invalid(format!("{p} is not prime")));
            }
            *map.entry(k).or_default() += v;
        }
        map.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        Ok(Self::with_support(map))
    }

    fn with_support(terms: BTreeMap<MultiIndex, Complex64>) -> Self {
        let mut support: Vec<u64> = terms.keys().flat_map(|k| k.pairs().iter().map(|&(p, _)| p)).collect();
        support.sort_unstable();
        support.dedup();
        Self {
            terms,
            prime_support: support,
        }
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Complex64> {
        &self.terms
    }

    /// Primes occurring in some term with nonzero coefficient, ascending.
    pub fn prime_support(&self) -> &[u64] {
        &self.prime_support
    }

    pub fn coefficient(&self, index: &MultiIndex) -> Complex64 {
        self.terms.get(index).copied().unwrap_or_default()
    }

    /// Sum of absolute values of all coefficients.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|v| v.norm()).sum()
    }

    /// Evaluates at arbitrary prime values; absent primes count as 0.
    pub fn eval_at(&self, values: &PrimeMap) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        'terms: for (k, &c) in &self.terms {
            let mut term = c;
            for &(p, e) in k.pairs() {
                match values.get(&p) {
                    Some(z) => term *= z.powu(e),
                    None => continue 'terms,
                }
            }
            acc += term;
        }
        acc
    }

    /// Product, keeping only indices whose integer value is `≤ max_index`.
    pub fn mul_truncated(&self, other: &Self, max_index: u64) -> Result<Self> {
        let mut out: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (ka, &va) in &self.terms {
            let na = from_multi_index(ka)?;
            for (kb, &vb) in &other.terms {
                let nb = from_multi_index(kb)?;
                if na.checked_mul(nb).is_none_or(|n| n > max_index) {
                    continue;
                }
                *out.entry(merge(ka, kb)).or_default() += va * vb;
            }
        }
        out.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        Ok(Self::with_support(out))
    }
}

fn merge(a: &MultiIndex, b: &MultiIndex) -> MultiIndex {
    let mut acc: BTreeMap<u64, u32> = BTreeMap::new();
    for &(p, e) in a.pairs().iter().chain(b.pairs()) {
        *acc.entry(p).or_default() += e;
    }
    MultiIndex::new(acc.into_iter().collect()).expect("merged indices stay valid")
}

/// `a_n ↦ z^{ν(n)}`; zero coefficients are dropped.
pub fn lift(f: &DirichletPoly, table: &FactorTable) -> Result<MultiIndexPoly> {
    if f.len() > table.limit() {
        return Err(Error::invalid(format!(
            "series length {} exceeds sieve limit {}",
            f.len(),
            table.limit()
        )));
    }
    let mut terms = BTreeMap::new();
    for (i, &a) in f.coeffs().iter().enumerate() {
        if a != Complex64::new(0.0, 0.0) {
            terms.insert(to_multi_index(i + 1, table)?, a);
        }
    }
    Ok(MultiIndexPoly::with_support(terms))
}

/// Inverse of [`lift`], truncated at `len`. Every term must have index `≤ len`.
pub fn unlift(p: &MultiIndexPoly, len: usize) -> Result<DirichletPoly> {
    let mut a = vec![Complex64::new(0.0, 0.0); len + 1];
    for (k, &v) in &p.terms {
        let n = from_multi_index(k)?;
        if n as u128 > len as u128 {
            return Err(Error::invalid(format!("term with index {n} does not fit in length {len}")));
        }
        a[n as usize] = v;
    }
    DirichletPoly::from_one_based(a)
}

/// A point `φ` of the polydisk with finitely many nonzero coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiCharacterPoint {
    values: PrimeMap,
}

impl QuasiCharacterPoint {
    /// Requires every key prime and every `|φ(p)| < 1`.
    pub fn new(values: PrimeMap) -> Result<Self> {
        for (&p, z) in &values {
            if !is_prime_u64(p) {
                return Err(Error::invalid(format!("{p} is not prime")));
            }
            if !(z.norm() < 1.0) {
                return Err(Error::Domain(format!("|φ({p})| = {} is not below 1", z.norm())));
            }
        }
        Ok(Self { values })
    }

    /// The zero point: `φ(n) = 0` for every `n > 1`.
    pub fn zero() -> Self {
        Self { values: PrimeMap::new() }
    }

    /// `φ_s(p) = p^{-s}` on the given primes; needs `Re s > 0`.
    pub fn at_s(s: Complex64, primes: &[u64]) -> Result<Self> {
        if !(s.re > 0.0) {
            return Err(Error::Domain(format!("p^(-s) lies in the disk only for Re s > 0, got {s}")));
        }
        Self::new(primes.iter().map(|&p| (p, crate::series::n_pow_neg(p as usize, s))).collect())
    }

    pub fn values(&self) -> &PrimeMap {
        &self.values
    }
}

/// `Σ_ν c_ν Π φ(p)^{ν_p}`.
pub fn eval_quasi(p: &MultiIndexPoly, phi: &QuasiCharacterPoint) -> Complex64 {
    p.eval_at(&phi.values)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointEvalBound {
    /// `Π (1 - |φ(p)|²)^{-1/2}`, or `+∞` off the open polydisk.
    pub bound: f64,
    pub in_domain: bool,
}

/// Norm of point evaluation at `φ`: `|𝔔f(φ)| ≤ bound · ‖f‖`.
pub fn point_eval_bound(values: &PrimeMap) -> PointEvalBound {
    if values.values().any(|z| !(z.norm() < 1.0)) {
        return PointEvalBound {
            bound: f64::INFINITY,
            in_domain: false,
        };
    }
    let log: f64 = values.values().map(|z| -0.5 * (-z.norm_sqr()).ln_1p()).sum();
    PointEvalBound {
        bound: log.exp(),
        in_domain: true,
    }
}

/// `‖1 + Σ a_p p^{-s}‖_∞ = 1 + Σ |a_p|`.
pub fn prime_linear_sup_norm(prime_coeffs: &PrimeMap) -> f64 {
    1.0 + prime_coeffs.values().map(|a| a.norm()).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerMultiplierNorm {
    /// `Π (1 - |a_p|)^{-1}`.
    pub forward: f64,
    /// `Π (1 + |a_p|)`.
    pub reciprocal: f64,
    /// Some `|a_p| ≥ 1`: the forward product has a pole on the torus.
    pub forward_unbounded: bool,
    /// `Σ |a_p|` diverges by power-law extrapolation of the supplied primes.
    pub divergent: bool,
    /// Verdict relies on extrapolating past the supplied primes.
    pub tail_extrapolated: bool,
}

/// Multiplier norms of `Π (1 - a_p p^{-s})^{-1}` and of its reciprocal.
///
/// Primes beyond the map are taken as zero unless the values follow an exact
/// power law over every prime up to the last key, in which case a law with
/// exponent `≤ 1` is extrapolated to a divergent `Σ |a_p|`.
pub fn euler_multiplier_norm(prime_values: &PrimeMap) -> EulerMultiplierNorm {
    let forward_unbounded = prime_values.values().any(|a| !(a.norm() < 1.0));
    let law = fit_prime_power_law(prime_values);
    let divergent = law.is_some_and(|l| l.exponent <= 1.0);
    let forward = if forward_unbounded || divergent {
        f64::INFINITY
    } else {
        (-prime_values.values().map(|a| (-a.norm()).ln_1p()).sum::<f64>()).exp()
    };
    let reciprocal = if divergent {
        f64::INFINITY
    } else {
        prime_values.values().map(|a| a.norm().ln_1p()).sum::<f64>().exp()
    };
    EulerMultiplierNorm {
        forward,
        reciprocal,
        forward_unbounded,
        divergent,
        tail_extrapolated: divergent,
    }
}

/// How the polytorus is searched.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SupNormMode {
    /// Uniform grid of `resolution^d` points, `d ≤ 8`.
    Grid { resolution: usize },
    /// Seeded random starts, each refined by coordinate ascent.
    MultiStart { starts: usize, seed: u64 },
}

impl Default for SupNormMode {
    fn default() -> Self {
        SupNormMode::Grid {
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupNormReport {
    /// Largest modulus actually sampled by the grid or the random starts.
    /// A lower bound for the sup norm; never an upper bound.
    pub lower: f64,
    /// After local refinement from the best sample. Still attained at a
    /// torus point, so also a lower bound, but not certified optimal.
    pub estimate: f64,
    pub dimension: usize,
    pub evaluations: u64,
    /// Angles `θ_p` of the refined maximizer, `z_p = e^{iθ_p}`.
    pub argmax: Vec<(u64, f64)>,
    pub mode: SupNormMode,
}

/// Terms in dense exponent form over the support dimensions.
struct DenseTerms {
    coeffs: Vec<Complex64>,
    // exps[t * dim + j]
    exps: Vec<u32>,
    dim: usize,
}

impl DenseTerms {
    fn new(p: &MultiIndexPoly) -> Self {
        let dim = p.prime_support.len();
        let mut coeffs = Vec::with_capacity(p.terms.len());
        let mut exps = Vec::with_capacity(p.terms.len() * dim);
        for (k, &c) in &p.terms {
            coeffs.push(c);
            let mut row = vec![0u32; dim];
            for &(q, e) in k.pairs() {
                let j = p.prime_support.binary_search(&q).expect("support covers every term");
                row[j] = e;
            }
            exps.extend(row);
        }
        Self { coeffs, exps, dim }
    }

    fn eval(&self, theta: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, &c) in self.coeffs.iter().enumerate() {
            let row = &self.exps[t * self.dim..(t + 1) * self.dim];
            let phase: f64 = row.iter().zip(theta).map(|(&e, &th)| e as f64 * th).sum();
            acc += c * Complex64::from_polar(1.0, phase);
        }
        acc
    }
}

/// Lower bound and local-search estimate of `sup |P|` over the polytorus.
pub fn sup_norm_polytorus(p: &MultiIndexPoly, mode: SupNormMode) -> Result<SupNormReport> {
    let dense = DenseTerms::new(p);
    let dim = dense.dim;
    if dim == 0 {
        let v = p.coefficient(&MultiIndex::empty()).norm();
        return Ok(SupNormReport {
            lower: v,
            estimate: v,
            dimension: 0,
            evaluations: 1,
            argmax: Vec::new(),
            mode,
        });
    }
    let (lower, start, mut evaluations) = match mode {
        SupNormMode::Grid { resolution } => grid_search(&dense, resolution)?,
        SupNormMode::MultiStart { starts, seed } => {
            if starts == 0 {
                return Err(Error::invalid("multi-start search needs at least one start"));
            }
            multi_start(&dense, starts, seed)
        }
    };
    let (theta, refined, evals) = coordinate_ascent(&dense, start, TAU / 64.0);
    evaluations += evals;
    Ok(SupNormReport {
        lower,
        estimate: refined.max(lower),
        dimension: dim,
        evaluations,
        argmax: p.prime_support.iter().copied().zip(theta).collect(),
        mode,
    })
}

fn grid_search(dense: &DenseTerms, resolution: usize) -> Result<(f64, Vec<f64>, u64)> {
    let dim = dense.dim;
    if dim > MAX_GRID_DIMENSION {
        return Err(Error::invalid(format!(
            "grid search supports at most {MAX_GRID_DIMENSION} support primes, got {dim}; use multi-start mode"
        )));
    }
    if resolution < 2 {
        return Err(Error::invalid("grid resolution must be at least 2"));
    }
    let total = (resolution as u64)
        .checked_pow(dim as u32)
        .filter(|&t| t <= GRID_POINT_BUDGET)
        .ok_or_else(|| {
            Error::ResourceCap(format!(
                "{resolution}^{dim} grid points exceed the budget of {GRID_POINT_BUDGET}; lower the resolution or use multi-start mode"
            ))
        })?;

    // Powers of the primitive root, indexed by (k · ν) mod resolution.
    let roots: Vec<Complex64> = (0..resolution)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / resolution as f64))
        .collect();
    let nterms = dense.coeffs.len();

    // Outer dimension split into blocks; each block scans its sub-grid in
    // lexicographic order and keeps the first strict maximum.
    let blocks: Vec<(f64, Vec<usize>)> = (0..resolution)
        .into_par_iter()
        .map(|k0| {
            let mut idx = vec![0usize; dim];
            idx[0] = k0;
            let mut phase = vec![Complex64::new(0.0, 0.0); nterms * dim];
            // phase[j*nterms + t]: product of the first j+1 coordinate factors.
            for t in 0..nterms {
                let e = dense.exps[t * dim] as usize;
                phase[t] = dense.coeffs[t] * roots[(k0 * e) % resolution];
            }
            let mut best = (-1.0f64, idx.clone());
            scan(dense, &roots, resolution, 1, &mut idx, &mut phase, &mut best);
            best
        })
        .collect();
    let mut best = (-1.0f64, Vec::new());
    for b in blocks {
        if b.0 > best.0 {
            best = b;
        }
    }
    let theta = best.1.iter().map(|&k| TAU * k as f64 / resolution as f64).collect();
    Ok((best.0, theta, total))
}

fn scan(
    dense: &DenseTerms,
    roots: &[Complex64],
    r: usize,
    j: usize,
    idx: &mut [usize],
    phase: &mut [Complex64],
    best: &mut (f64, Vec<usize>),
) {
    let dim = dense.dim;
    let nterms = dense.coeffs.len();
    if j == dim {
        let v: Complex64 = phase[(dim - 1) * nterms..dim * nterms].iter().sum();
        let m = v.norm();
        if m > best.0 {
            *best = (m, idx.to_vec());
        }
        return;
    }
    for k in 0..r {
        idx[j] = k;
        for t in 0..nterms {
            let e = dense.exps[t * dim + j] as usize;
            phase[j * nterms + t] = phase[(j - 1) * nterms + t] * roots[(k * e) % r];
        }
        scan(dense, roots, r, j + 1, idx, phase, best);
    }
}

fn multi_start(dense: &DenseTerms, starts: usize, seed: u64) -> (f64, Vec<f64>, u64) {
    let runs: Vec<(f64, Vec<f64>, u64)> = (0..starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let theta: Vec<f64> = (0..dense.dim).map(|_| rng.random::<f64>() * TAU).collect();
            let (theta, v, evals) = coordinate_ascent(dense, theta, TAU / 8.0);
            (v, theta, evals)
        })
        .collect();
    let mut evaluations = 0;
    let mut best = (-1.0, Vec::new());
    for (v, theta, e) in runs {
        evaluations += e;
        if v > best.0 {
            best = (v, theta);
        }
    }
    (best.0, best.1, evaluations)
}

/// Compass search: try `±h` on each coordinate, halve `h` when stuck.
fn coordinate_ascent(dense: &DenseTerms, mut theta: Vec<f64>, mut h: f64) -> (Vec<f64>, f64, u64) {
    let mut best = dense.eval(&theta).norm();
    let mut evals = 1u64;
    while h > 1e-12 && evals < 200_000 {
        let mut improved = false;
        for j in 0..theta.len() {
            for step in [h, -h] {
                let old = theta[j];
                theta[j] = (old + step).rem_euclid(TAU);
                let v = dense.eval(&theta).norm();
                evals += 1;
                if v > best {
                    best = v;
                    improved = true;
                    break;
                }
                theta[j] = old;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (theta, best, evals)
}
