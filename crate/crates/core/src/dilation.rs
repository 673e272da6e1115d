//! Dilated systems `φ_j(x) = φ(jx)` in `L²(0,1)`.
//!
//! With `e_n(x) = √2 sin(nπx)` and `φ = Σ a_n e_n`, dilation is
//! `φ_j = Σ_m a_m e_{mj}`, so the map `e_n ↦ φ_n` acts on sine coefficients as
//! Dirichlet convolution with `a`. Riesz-basis and completeness questions
//! become questions about the series `Sφ(s) = Σ a_n n^{-s}`; the checkers
//! here decide them only on the classes where a closed-form criterion is
//! available and report `Unknown` everywhere else.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::bohrlift::{lift, sup_norm_polytorus, MultiIndexPoly, SupNormMode};
use crate::interval::{exp_integral_e1, ComplexInterval, Interval};
use crate::numtheory::{extend_multiplicatively, fit_prime_power_law, FactorTable, PowerLawFit};
use crate::series::{convolve, reciprocal, DirichletPoly, Tolerances};
use crate::{Complex64, Error, PrimeMap, Result};

/// What the coefficients are beyond the stored truncation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "primes")]
pub enum TailModel {
    /// Exactly zero past the truncation.
    #[default]
    Zero,
    /// Totally multiplicative: `Sφ = Π (1 − a_p p^{-s})^{-1}` over the map.
    Euler(PrimeMap),
    /// `Sφ = Π (1 − b_p p^{-s})`, the reciprocal of an Euler product.
    InverseEuler(PrimeMap),
}

/// Sine coefficients of `φ`, normalized so `a_1 = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SineSystemSpec {
    coeffs: DirichletPoly,
    original_a1: Complex64,
    tail: TailModel,
}

impl SineSystemSpec {
    /// Divides through by `a_1`; fails when `a_1 = 0`.
    pub fn new(coeffs: DirichletPoly) -> Result<Self> {
        Self::with_tail(coeffs, TailModel::Zero)
    }

    pub fn with_tail(coeffs: DirichletPoly, tail: TailModel) -> Result<Self> {
        let a1 = coeffs[1];
        if a1 == Complex64::new(0.0, 0.0) {
            return Err(Error::NonInvertible);
        }
        let coeffs = if a1 == Complex64::new(1.0, 0.0) {
            coeffs
        } else {
            coeffs.map(|_, a| a / a1)?
        };
        Ok(Self {
            coeffs,
            original_a1: a1,
            tail,
        })
    }

    /// Totally multiplicative spec from prime values, truncated at `len`.
    pub fn totally_multiplicative(values: &PrimeMap, len: usize, table: &FactorTable) -> Result<Self> {
        let inside: PrimeMap = values.range(..=len as u64).map(|(&p, &a)| (p, a)).collect();
        let a = extend_multiplicatively(&inside, len, table)?;
        Self::with_tail(DirichletPoly::from_one_based(a)?, TailModel::Euler(values.clone()))
    }

    /// `Π (1 − b_p p^{-s})` truncated at `len`.
    pub fn inverse_euler(values: &PrimeMap, len: usize, table: &FactorTable) -> Result<Self> {
        table.check_range(len)?;
        let mut a = vec![Complex64::new(0.0, 0.0); len + 1];
        a[1] = Complex64::new(1.0, 0.0);
        for n in 2..=len {
            let p = table.smallest_prime_factor(n) as usize;
            let m = n / p;
            a[n] = if m % p == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                -values.get(&(p as u64)).copied().unwrap_or_default() * a[m]
            };
        }
        Self::with_tail(DirichletPoly::from_one_based(a)?, TailModel::InverseEuler(values.clone()))
    }

    pub fn coeffs(&self) -> &DirichletPoly {
        &self.coeffs
    }

    pub fn original_a1(&self) -> Complex64 {
        self.original_a1
    }

    pub fn tail(&self) -> &TailModel {
        &self.tail
    }
}

/// `Sφ`: the coefficient sequence itself.
pub fn s_transform(spec: &SineSystemSpec) -> DirichletPoly {
    spec.coeffs.clone()
}

/// Sine coefficients of `φ_j` up to index `n` (1-based vector).
pub fn dilate_expand(spec: &SineSystemSpec, j: usize, n: usize) -> Result<Vec<Complex64>> {
    if j == 0 {
        return Err(Error::invalid("dilation factor must be positive"));
    }
    if n > j.saturating_mul(spec.coeffs.len()) {
        return Err(Error::invalid(format!(
            "index {n} exceeds the truncation {} of φ_{j}",
            j * spec.coeffs.len()
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    for m in 1..=n / j {
        out[m * j] = spec.coeffs[m];
    }
    Ok(out)
}

/// Sine coefficients of `Σ c_n φ_n` for a finite `f = Σ c_n e_n`, by direct
/// expansion of each dilate.
pub fn apply_dilations(spec: &SineSystemSpec, f: &DirichletPoly) -> Result<DirichletPoly> {
    let n = f.len().min(spec.coeffs.len());
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    for j in 1..=n {
        let phi = dilate_expand(spec, j, n)?;
        for (k, v) in phi.iter().enumerate().skip(1) {
            out[k] += f[j] * v;
        }
    }
    DirichletPoly::from_one_based(out)
}

/// `G_{jk} = ⟨φ_j, φ_k⟩` for `1 ≤ j, k ≤ J`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramSection {
    pub size: usize,
    /// Row-major, `entries[(j-1)·J + (k-1)]`.
    pub entries: Vec<Complex64>,
}

impl GramSection {
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[(j - 1) * self.size + (k - 1)]
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Value at `n` of a totally multiplicative sequence given on primes.
fn euler_coefficient(values: &PrimeMap, n: usize, table: &FactorTable) -> Result<Complex64> {
    Ok(table
        .factorize(n)?
        .into_iter()
        .fold(Complex64::new(1.0, 0.0), |acc, (p, e)| acc * values.get(&p).copied().unwrap_or_default().powu(e)))
}

/// Gram section from the divisor formula
/// `G_{jk} = Σ_t a_{(k/g)t} conj(a_{(j/g)t})`, `g = gcd(j, k)`.
///
/// A zero tail sums the finite support. Euler-type tails use the exact
/// factorization of that sum: `a_{k'} conj(a_{j'}) Π (1 − |a_p|²)^{-1}` for
/// totally multiplicative `a`, and the analogous squarefree product for the
/// reciprocal of an Euler product.
pub fn gram_section(spec: &SineSystemSpec, size: usize, table: &FactorTable) -> Result<GramSection> {
    if size == 0 {
        return Err(Error::invalid("Gram section needs J ≥ 1"));
    }
    if size > table.limit() {
        return Err(Error::invalid(format!("J = {size} exceeds sieve limit {}", table.limit())));
    }
    let a = &spec.coeffs;
    let entry = |j: usize, k: usize| -> Result<Complex64> {
        let g = gcd(j, k);
        let (jp, kp) = (j / g, k / g);
        match &spec.tail {
            TailModel::Zero => {
                let n = a.len();
                let mut acc = Complex64::new(0.0, 0.0);
                let mut t = 1;
                while kp * t <= n && jp * t <= n {
                    acc += a[kp * t] * a[jp * t].conj();
                    t += 1;
                }
                Ok(acc)
            }
            TailModel::Euler(values) => {
                if values.values().any(|v| !(v.norm() < 1.0)) {
                    return Err(Error::invalid("Euler tail with |a_p| ≥ 1 is not square summable"));
                }
                let mass: f64 = (-values.values().map(|v| (-v.norm_sqr()).ln_1p()).sum::<f64>()).exp();
                Ok(euler_coefficient(values, kp, table)? * euler_coefficient(values, jp, table)?.conj() * mass)
            }
            TailModel::InverseEuler(values) => {
                // Local factor at p: 1 + |b_p|² if p ∤ j'k', −b_p or its conjugate
                // if p divides one of them once, 0 if p² divides either.
                let mut acc = Complex64::new(1.0, 0.0);
                for (p, e) in table.factorize(kp)? {
                    let b = values.get(&p).copied().unwrap_or_default();
                    acc *= if e == 1 { -b } else { Complex64::new(0.0, 0.0) };
                }
                for (p, e) in table.factorize(jp)? {
                    let b = values.get(&p).copied().unwrap_or_default();
                    acc *= if e == 1 { -b.conj() } else { Complex64::new(0.0, 0.0) };
                }
                for (&p, b) in values {
                    if kp % p as usize != 0 && jp % p as usize != 0 {
                        acc *= 1.0 + b.norm_sqr();
                    }
                }
                Ok(acc)
            }
        }
    };
    let rows: Vec<Result<Vec<Complex64>>> = (1..=size)
        .into_par_iter()
        .map(|j| (1..=size).map(|k| entry(j, k)).collect())
        .collect();
    let mut entries = Vec::with_capacity(size * size);
    for r in rows {
        entries.extend(r?);
    }
    Ok(GramSection { size, entries })
}

/// Extreme eigenvalues of a Gram section.
///
/// `max_eig` bounds `B²` from below and `min_eig` bounds `A²` from above;
/// sections can never certify the other direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub min_eig: f64,
    pub max_eig: f64,
}

pub fn frame_bounds_estimate(g: &GramSection) -> Result<FrameBounds> {
    let n = g.size;
    let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| g.entries[i * n + j]);
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    for i in 0..n {
        for j in 0..=i {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > 1e-10 * scale {
                return Err(Error::Numerical(format!("Gram section not Hermitian at ({}, {})", i + 1, j + 1)));
            }
        }
    }
    let eig = SymmetricEigen::new(m).eigenvalues;
    let min_eig = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eig = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min_eig < -1e-10 * scale {
        return Err(Error::Numerical(format!(
            "Gram section is not positive semidefinite (eigenvalue {min_eig})"
        )));
    }
    Ok(FrameBounds { min_eig, max_eig })
}

/// Dual system `ψ_k = Σ_{d|k} conj(b_{k/d}) e_d` with `b = 1/Sφ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiorthogonalSystem {
    /// `psi[k-1]` holds the 1-based sine coefficients of `ψ_k` up to `N`.
    pub psi: Vec<Vec<Complex64>>,
    /// `max_{j,k ≤ N} |⟨φ_j, ψ_k⟩ − δ_{jk}|`.
    pub biorthogonality_error: f64,
    /// `max_{n ≤ N} ‖e_n − Σ_{d|n} conj(a_{n/d}) ψ_d‖_∞` (for real `a` the
    /// conjugate is invisible).
    pub reconstruction_error: f64,
}

pub fn biorthogonal_system(spec: &SineSystemSpec, n: usize) -> Result<BiorthogonalSystem> {
    if n == 0 || n > spec.coeffs.len() {
        return Err(Error::invalid(format!(
            "need 1 ≤ N ≤ {} for the biorthogonal system",
            spec.coeffs.len()
        )));
    }
    let a = spec.coeffs.truncate(n)?;
    let b = reciprocal(&a)?;
    let mut psi = vec![vec![Complex64::new(0.0, 0.0); n + 1]; n];
    for d in 1..=n {
        for k in (d..=n).step_by(d) {
            psi[k - 1][d] = b[k / d].conj();
        }
    }

    let inner = |x: &[Complex64], y: &[Complex64]| -> Complex64 { x.iter().zip(y).skip(1).map(|(u, v)| u * v.conj()).sum() };
    let phis: Vec<Vec<Complex64>> = (1..=n).map(|j| dilate_expand(spec, j, n)).collect::<Result<_>>()?;
    let mut bio = 0.0f64;
    for (j, phi) in phis.iter().enumerate() {
        for (k, ps) in psi.iter().enumerate() {
            let delta = if j == k { 1.0 } else { 0.0 };
            bio = bio.max((inner(phi, ps) - delta).norm());
        }
    }
    let mut rec = 0.0f64;
    for m in 1..=n {
        let mut v = vec![Complex64::new(0.0, 0.0); n + 1];
        for d in (1..=m).filter(|d| m % d == 0) {
            let w = a[m / d].conj();
            for (slot, x) in v.iter_mut().zip(&psi[d - 1]) {
                *slot += w * x;
            }
        }
        v[m] -= 1.0;
        rec = rec.max(v.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(BiorthogonalSystem {
        psi,
        biorthogonality_error: bio,
        reconstruction_error: rec,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Yes,
    No,
    Unknown,
}

/// Outcome of a checker. `rule` names the criterion whose hypothesis was
/// verified; `certificate` holds the numbers it was verified with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub status: Status,
    pub rule: String,
    pub certificate: Map<String, Value>,
    /// `boundary`: decided on the equality case; `tail-extrapolated`: relies
    /// on a power law fitted to the stored primes.
    pub flags: Vec<String>,
}

impl CriterionVerdict {
    fn new(status: Status, rule: &str, certificate: Map<String, Value>) -> Self {
        Self {
            status,
            rule: rule.into(),
            certificate,
            flags: Vec::new(),
        }
    }

    fn flag(mut self, f: &str) -> Self {
        self.flags.push(f.into());
        self
    }
}

/// Rule identifiers reported in verdicts.
pub mod rules {
    pub const EULER_PRODUCT: &str = "euler-product-prime-sum";
    pub const INVERSE_EULER_PRODUCT: &str = "inverse-euler-product-prime-sum";
    pub const SMALL_PERTURBATION: &str = "dominant-constant-term";
    pub const PRIME_SUM_TOO_LARGE: &str = "prime-supported-sum-at-least-one";
    pub const PRIME_LINEAR: &str = "prime-supported-sum-at-most-one";
    pub const TOTALLY_MULTIPLICATIVE: &str = "totally-multiplicative";
    pub const DIVISOR_NORMS: &str = "divisor-weighted-norms";
    pub const BOUNDED_MULTIPLIER: &str = "bounded-multiplier-with-square-summable-inverse";
    pub const POLYDISK_ZERO: &str = "zero-inside-polydisk";
    pub const NONE: &str = "none";
}

fn prime_values_upto(a: &DirichletPoly, table: &FactorTable) -> PrimeMap {
    table
        .primes()
        .iter()
        .take_while(|&&p| p as usize <= a.len())
        .filter(|&&p| a[p as usize] != Complex64::new(0.0, 0.0))
        .map(|&p| (p, a[p as usize]))
        .collect()
}

/// Prime values if `a` is totally multiplicative on its truncation.
///
/// Requires at least one composite `n ≤ N` with a nonzero predicted value, so
/// that a prime-supported polynomial is not mistaken for an Euler product.
pub fn detect_total_multiplicativity(a: &DirichletPoly, table: &FactorTable, tol: f64) -> Result<Option<PrimeMap>> {
    if a.len() > table.limit() {
        return Err(Error::invalid(format!(
            "series length {} exceeds sieve limit {}",
            a.len(),
            table.limit()
        )));
    }
    if (a[1] - 1.0).norm() > tol {
        return Ok(None);
    }
    let mut witnessed = false;
    for n in 4..=a.len() {
        let p = table.smallest_prime_factor(n) as usize;
        if p == n {
            continue;
        }
        let predicted = a[p] * a[n / p];
        if (a[n] - predicted).norm() > tol {
            return Ok(None);
        }
        witnessed |= predicted.norm() > tol;
    }
    Ok(witnessed.then(|| prime_values_upto(a, table)))
}

fn is_prime_supported(a: &DirichletPoly, table: &FactorTable) -> bool {
    (4..=a.len()).all(|n| table.is_prime(n as u64) || a[n] == Complex64::new(0.0, 0.0))
}

fn law_json(law: &PowerLawFit) -> Value {
    json!({ "scale": law.scale, "exponent": law.exponent, "residual": law.residual, "last_prime": law.last_prime })
}

/// Prime values of an Euler-type spec, declared or detected.
enum EulerClass {
    Euler(PrimeMap),
    InverseEuler(PrimeMap),
}

fn euler_class(spec: &SineSystemSpec, table: &FactorTable, tol: &Tolerances) -> Result<Option<EulerClass>> {
    Ok(match &spec.tail {
        TailModel::Euler(v) => Some(EulerClass::Euler(v.clone())),
        TailModel::InverseEuler(v) => Some(EulerClass::InverseEuler(v.clone())),
        TailModel::Zero => detect_total_multiplicativity(&spec.coeffs, table, tol.coeff_abs)?.map(EulerClass::Euler),
    })
}

/// Riesz-basis decision for `{φ(nx)}`.
///
/// Rules, in order: Euler products (basis iff `Σ|a_p| < ∞` with all
/// `|a_p| < 1`), a dominant constant term (`Σ_{n>1}|a_n| < 1`), and the
/// prime-supported necessity (`Σ|a_p| ≥ 1` rules a basis out). Otherwise
/// `Unknown`, with a sup-norm lower bound attached.
pub fn riesz_check(spec: &SineSystemSpec, table: &FactorTable, tol: &Tolerances) -> Result<CriterionVerdict> {
    let a = &spec.coeffs;
    if let Some(class) = euler_class(spec, table, tol)? {
        let (values, rule) = match &class {
            EulerClass::Euler(v) => (v, rules::EULER_PRODUCT),
            EulerClass::InverseEuler(v) => (v, rules::INVERSE_EULER_PRODUCT),
        };
        let law = fit_prime_power_law(values);
        let prime_sum: f64 = values.values().map(|v| v.norm()).sum();
        let max_abs = values.values().map(|v| v.norm()).fold(0.0, f64::max);
        let mut cert = Map::new();
        cert.insert("prime_abs_sum".into(), json!(prime_sum));
        cert.insert("max_prime_abs".into(), json!(max_abs));
        cert.insert("primes".into(), json!(values.len()));
        if let Some(l) = &law {
            cert.insert("power_law".into(), law_json(l));
        }
        if max_abs >= 1.0 {
            return Ok(CriterionVerdict::new(Status::No, rule, cert));
        }
        return Ok(match law {
            Some(l) if l.exponent <= 1.0 => CriterionVerdict::new(Status::No, rule, cert).flag("tail-extrapolated"),
            Some(_) => CriterionVerdict::new(Status::Yes, rule, cert).flag("tail-extrapolated"),
            None => CriterionVerdict::new(Status::Yes, rule, cert),
        });
    }

    let l1: f64 = a.coeffs()[1..].iter().map(|v| v.norm()).sum();
    let mut cert = Map::new();
    cert.insert("tail_abs_sum".into(), json!(l1));
    if l1 < 1.0 {
        return Ok(CriterionVerdict::new(Status::Yes, rules::SMALL_PERTURBATION, cert));
    }
    if is_prime_supported(a, table) {
        return Ok(CriterionVerdict::new(Status::No, rules::PRIME_SUM_TOO_LARGE, cert));
    }
    if let Some(ev) = sup_evidence(a, table) {
        cert.insert("sup_norm".into(), ev);
    }
    Ok(CriterionVerdict::new(Status::Unknown, rules::NONE, cert))
}

fn sup_evidence(a: &DirichletPoly, table: &FactorTable) -> Option<Value> {
    if a.len() > table.limit() || a.len() > 100_000 {
        return None;
    }
    let p = lift(a, table).ok()?;
    let mode = if p.prime_support().len() <= 4 {
        SupNormMode::Grid { resolution: 32 }
    } else {
        SupNormMode::MultiStart { starts: 16, seed: 0 }
    };
    let rep = sup_norm_polytorus(&p, mode).ok()?;
    Some(json!({ "lower_bound": rep.lower, "estimate": rep.estimate, "dimension": rep.dimension }))
}

/// Exact decimal value of a float's shortest round-trip representation.
fn shortest_decimal(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let text = format!("{x}");
    let (neg, body) = text.strip_prefix('-').map_or((false, text.as_str()), |b| (true, b));
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(digits, denom);
    Some(if neg { -r } else { r })
}

/// `Σ|a_p|` compared with 1: exactly for real decimal inputs, else within
/// `1e-12`. Returns (ordering, exact).
fn compare_with_one(values: &[Complex64]) -> (std::cmp::Ordering, bool) {
    if values.iter().all(|v| v.im == 0.0) {
        let mut sum = BigRational::zero();
        let mut ok = true;
        for v in values {
            match shortest_decimal(v.re.abs()) {
                Some(r) => sum += r,
                None => ok = false,
            }
        }
        if ok {
            return (sum.cmp(&BigRational::one()), true);
        }
    }
    let s: f64 = values.iter().map(|v| v.norm()).sum();
    if (s - 1.0).abs() <= 1e-12 {
        (std::cmp::Ordering::Equal, false)
    } else {
        (s.partial_cmp(&1.0).unwrap_or(std::cmp::Ordering::Greater), false)
    }
}

/// Interval enclosure of a lifted polynomial at a point.
fn interval_eval(p: &MultiIndexPoly, z: &PrimeMap) -> ComplexInterval {
    let mut acc = ComplexInterval::ZERO;
    'terms: for (k, &c) in p.terms() {
        let mut term = ComplexInterval::point(c);
        for &(q, e) in k.pairs() {
            match z.get(&q) {
                Some(&v) => term = term * ComplexInterval::point(v).powi(e),
                None => continue 'terms,
            }
        }
        acc = acc + term;
    }
    acc
}

fn witness_json(z: &PrimeMap) -> Value {
    Value::Array(z.iter().map(|(&p, v)| json!([p, v.re, v.im])).collect())
}

/// Completeness decision for `{φ(nx)}` in `L²(0,1)`.
///
/// Rules, in order: prime-supported `Sφ` (complete iff `Σ|a_p| ≤ 1`), total
/// multiplicativity with `Sφ` square summable, finite divisor-weighted norms
/// of `Sφ` and `1/Sφ` under an Euler-type tail, a bounded `Sφ` whose inverse
/// is dominated by its constant term, and a zero of the lifted polynomial
/// inside the polydisk (rules completeness out). Otherwise `Unknown`.
pub fn completeness_check(spec: &SineSystemSpec, table: &FactorTable, tol: &Tolerances) -> Result<CriterionVerdict> {
    let a = &spec.coeffs;
    let zero_tail = spec.tail == TailModel::Zero;

    if zero_tail && is_prime_supported(a, table) {
        let primes = prime_values_upto(a, table);
        let values: Vec<Complex64> = primes.values().copied().collect();
        let sum: f64 = values.iter().map(|v| v.norm()).sum();
        let (ord, exact) = compare_with_one(&values);
        let mut cert = Map::new();
        cert.insert("prime_abs_sum".into(), json!(sum));
        cert.insert("exact_comparison".into(), json!(exact));
        return Ok(match ord {
            std::cmp::Ordering::Less => CriterionVerdict::new(Status::Yes, rules::PRIME_LINEAR, cert),
            std::cmp::Ordering::Equal => CriterionVerdict::new(Status::Yes, rules::PRIME_LINEAR, cert).flag("boundary"),
            std::cmp::Ordering::Greater => {
                // 1 + Σ a_p z_p = 0 at z_p = −r conj(a_p)/|a_p|, r = 1/Σ|a_p| < 1.
                let r = 1.0 / sum;
                let z: PrimeMap = primes.iter().map(|(&p, &v)| (p, -v.conj() / v.norm() * r)).collect();
                let lifted = lift(a, table)?;
                let residual = interval_eval(&lifted, &z).mag();
                cert.insert("witness".into(), witness_json(&z));
                cert.insert("witness_radius".into(), json!(r));
                cert.insert("residual_bound".into(), json!(residual));
                if residual < 1e-8 {
                    CriterionVerdict::new(Status::No, rules::PRIME_LINEAR, cert)
                } else {
                    CriterionVerdict::new(Status::Unknown, rules::NONE, cert)
                }
            }
        });
    }

    let class = euler_class(spec, table, tol)?;
    if let Some(EulerClass::Euler(values)) = &class {
        let law = fit_prime_power_law(values);
        let max_abs = values.values().map(|v| v.norm()).fold(0.0, f64::max);
        let square_sum: f64 = values.values().map(|v| v.norm_sqr()).sum();
        let mut cert = Map::new();
        cert.insert("max_prime_abs".into(), json!(max_abs));
        cert.insert("prime_square_sum".into(), json!(square_sum));
        if let Some(l) = &law {
            cert.insert("power_law".into(), law_json(l));
        }
        let in_h = max_abs < 1.0 && law.is_none_or(|l| 2.0 * l.exponent > 1.0);
        if in_h {
            let v = CriterionVerdict::new(Status::Yes, rules::TOTALLY_MULTIPLICATIVE, cert);
            return Ok(if law.is_some() { v.flag("tail-extrapolated") } else { v });
        }
    }
    if let Some(EulerClass::InverseEuler(values)) = &class {
        if values.values().all(|v| v.norm() < 1.0) {
            let forward: f64 = values.values().map(|v| (2.0 * v.norm_sqr()).ln_1p()).sum::<f64>().exp();
            let inverse: f64 = (-2.0 * values.values().map(|v| (-v.norm_sqr()).ln_1p()).sum::<f64>()).exp();
            let mut cert = Map::new();
            cert.insert("norm_hd_squared".into(), json!(forward));
            cert.insert("reciprocal_norm_hd_squared".into(), json!(inverse));
            cert.insert("prime_square_sum".into(), json!(values.values().map(|v| v.norm_sqr()).sum::<f64>()));
            return Ok(CriterionVerdict::new(Status::Yes, rules::DIVISOR_NORMS, cert));
        }
    }

    if zero_tail {
        let l1: f64 = a.coeffs()[1..].iter().map(|v| v.norm()).sum();
        if l1 < 1.0 {
            let mut cert = Map::new();
            cert.insert("tail_abs_sum".into(), json!(l1));
            cert.insert("reciprocal_sup_bound".into(), json!(1.0 / (1.0 - l1)));
            return Ok(CriterionVerdict::new(Status::Yes, rules::BOUNDED_MULTIPLIER, cert));
        }
        if a.len() <= table.limit() {
            let lifted = lift(a, table)?;
            if let Some((z, residual)) = find_polydisk_zero(&lifted) {
                let mut cert = Map::new();
                cert.insert("witness".into(), witness_json(&z));
                cert.insert("witness_radius".into(), json!(z.values().map(|v| v.norm()).fold(0.0, f64::max)));
                cert.insert("residual_bound".into(), json!(residual));
                return Ok(CriterionVerdict::new(Status::No, rules::POLYDISK_ZERO, cert));
            }
        }
    }
    Ok(CriterionVerdict::new(Status::Unknown, rules::NONE, Map::new()))
}

/// Largest polydisk dimension the zero search handles.
pub const ZERO_SEARCH_MAX_DIMENSION: usize = 4;

/// Multi-start minimum-norm Newton iteration for `P(z) = 0` with every
/// `|z_j| < 1`. A candidate is accepted only if an interval evaluation bounds
/// `|P(z)|` below `1e-8` and the point is strictly inside the polydisk.
pub fn find_polydisk_zero(p: &MultiIndexPoly) -> Option<(PrimeMap, f64)> {
    let support = p.prime_support().to_vec();
    let d = support.len();
    if d == 0 || d > ZERO_SEARCH_MAX_DIMENSION {
        return None;
    }
    let terms: Vec<(Complex64, Vec<u32>)> = p
        .terms()
        .iter()
        .map(|(k, &c)| {
            let mut e = vec![0u32; d];
            for &(q, x) in k.pairs() {
                e[support.binary_search(&q).expect("support covers terms")] = x;
            }
            (c, e)
        })
        .collect();
    let scale = p.l1_norm().max(1.0);
    let eval = |z: &[Complex64]| -> (Complex64, Vec<Complex64>) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut g = vec![Complex64::new(0.0, 0.0); d];
        for (c, e) in &terms {
            let mono: Complex64 = e.iter().zip(z).map(|(&x, w)| w.powu(x)).product();
            v += c * mono;
            for j in 0..d {
                if e[j] > 0 {
                    let mut m = *c * e[j] as f64;
                    for (i, (&x, w)) in e.iter().zip(z).enumerate() {
                        m *= if i == j { w.powu(x - 1) } else { w.powu(x) };
                    }
                    g[j] += m;
                }
            }
        }
        (v, g)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..64 {
        let mut z: Vec<Complex64> = (0..d)
            .map(|_| Complex64::from_polar(rng.random_range(0.0..0.95), rng.random_range(0.0..TAU)))
            .collect();
        for _ in 0..100 {
            let (v, g) = eval(&z);
            let gn: f64 = g.iter().map(|x| x.norm_sqr()).sum();
            if v.norm() < 1e-15 * scale || gn == 0.0 {
                break;
            }
            for (zj, gj) in z.iter_mut().zip(&g) {
                *zj -= v * gj.conj() / gn;
            }
        }
        if z.iter().any(|w| !(w.norm() < 1.0 - 1e-9)) {
            continue;
        }
        let point: PrimeMap = support.iter().copied().zip(z.iter().copied()).collect();
        let residual = interval_eval(p, &point).mag();
        if residual < 1e-8 {
            return Some((point, residual));
        }
    }
    None
}

/// One certified sign of the block construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignCertificate {
    pub k: usize,
    pub sigma: f64,
    /// Block `[n_k, n_{k+1})` carries sign `(−1)^k`.
    pub block_start: u64,
    pub block_end: u64,
    pub sign: i8,
    /// `Σ_{n_k ≤ n < n_{k+1}} n^{-σ} b_n`, enclosed.
    pub middle: Interval,
    /// `Σ_{n < n_k} a_n n^{-σ}` with the signs already fixed, enclosed.
    pub signed_head: Interval,
    /// `Σ_{n < n_k} n^{-σ} b_n`, enclosed.
    pub abs_head: Interval,
    /// Upper bound of `Σ_{n ≥ n_{k+1}} n^{-σ} b_n` from the integral test.
    pub tail_bound: f64,
    /// Lower end of `(−1)^k · head + middle − tail`; positive certifies
    /// `(−1)^k f(σ_k) > 0` for every continuation of the signs.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlternatingConstruction {
    pub requested: usize,
    pub achieved: usize,
    pub complete: bool,
    /// `n_0 = 1, n_1, …, n_achieved`.
    pub block_starts: Vec<u64>,
    pub certificates: Vec<SignCertificate>,
    /// `(σ_{k+1}, σ_k)` intervals each containing a real zero.
    pub zero_brackets: Vec<(f64, f64)>,
    pub tail_cap: u64,
}

impl AlternatingConstruction {
    /// Coefficients `a_n = (−1)^k b_n` on the constructed blocks.
    pub fn coefficients(&self) -> Result<DirichletPoly> {
        let end = *self.block_starts.last().expect("n_0 is always present") as usize;
        if end < 2 {
            return DirichletPoly::from_real(&[0.0]);
        }
        let mut a = vec![0.0; end - 1];
        for (k, w) in self.block_starts.windows(2).enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            for n in w[0].max(2)..w[1] {
                let nf = n as f64;
                a[n as usize - 1] = sign / (nf.sqrt() * nf.ln());
            }
        }
        DirichletPoly::from_real(&a)
    }
}

/// `n^{-σ} b_n = n^{-σ-1/2} / ln n`, enclosed.
fn block_term(n: u64, sigma: f64) -> Interval {
    let ln = Interval::point(n as f64).ln();
    (-(Interval::point(sigma) + Interval::point(0.5)) * ln).exp().div(ln)
}

/// `∫_{x_0}^∞ x^{-σ-1/2} / ln x dx = E₁((σ − ½) ln x_0)`, upper end.
fn integral_tail(x0: u64, sigma: f64) -> f64 {
    let u = (Interval::point(sigma) - Interval::point(0.5)) * Interval::point(x0 as f64).ln();
    exp_integral_e1(u).hi
}

const FIRST_SIGMA: f64 = 3.0;
const MAX_HALVINGS: u32 = 40;

/// Greedy block construction of a function with `K` certified sign changes
/// on the real axis approaching `½`.
///
/// With `b_n = n^{-1/2}/ln n` and `a_n = (−1)^k b_n` on `[n_k, n_{k+1})`, step
/// `k` tries `σ = ½ + g/2, ½ + g/4, …` where `g` is the previous gap to `½`
/// (the first step tries `σ = 3` first), scans `n` upward for each candidate
/// until `(−1)^k head + middle − tail > 0` holds in interval arithmetic, and
/// keeps the candidate with the smallest `n_{k+1}`. The tail uses the exact
/// integral bound through `E₁`. Scans stop at `tail_cap`; if no candidate
/// succeeds the result is partial.
pub fn construct_alternating(k_target: usize, tail_cap: u64) -> Result<AlternatingConstruction> {
    if k_target < 2 {
        return Err(Error::invalid("need at least two sign alternations"));
    }
    if tail_cap < 4 {
        return Err(Error::invalid("tail cap must be at least 4"));
    }
    let mut starts = vec![1u64];
    let mut certs: Vec<SignCertificate> = Vec::new();
    let mut gap = 2.0 * (FIRST_SIGMA - 0.5);

    for k in 0..k_target {
        let n_k = *starts.last().unwrap();
        let sign = if k % 2 == 0 { 1i8 } else { -1 };
        let candidates: Vec<f64> = (1..=MAX_HALVINGS).map(|j| 0.5 + gap / 2f64.powi(j as i32)).collect();
        let mut best: Option<(u64, f64, SignCertificate)> = None;
        for &sigma in &candidates {
            let (signed_head, abs_head) = head_sums(&starts, sigma);
            let s = Interval::point(sign as f64);
            let head_term = s * signed_head;
            let limit = best.as_ref().map_or(tail_cap, |b| b.0 - 1);
            let mut middle = Interval::ZERO;
            let mut n = n_k;
            let mut found = None;
            while n < limit {
                if n >= 2 {
                    middle = middle + block_term(n, sigma);
                }
                n += 1;
                // Candidate n_{k+1} = n: tail starts at n, bounded from n − 1.
                if n < 3 {
                    continue;
                }
                let tail = integral_tail(n - 1, sigma);
                let margin = (head_term + middle - Interval::point(tail)).lo;
                if margin > 0.0 {
                    found = Some((n, tail, margin));
                    break;
                }
                // Even the whole remaining tail cannot lift the sum above zero.
                if (head_term + middle + Interval::point(tail)).hi <= 0.0 {
                    break;
                }
            }
            if let Some((n_next, tail, margin)) = found {
                let cert = SignCertificate {
                    k,
                    sigma,
                    block_start: n_k,
                    block_end: n_next,
                    sign,
                    middle,
                    signed_head,
                    abs_head,
                    tail_bound: tail,
                    margin,
                };
                if best.as_ref().is_none_or(|b| n_next < b.0) {
                    best = Some((n_next, sigma, cert));
                }
            }
        }
        match best {
            Some((n_next, sigma, cert)) => {
                starts.push(n_next);
                certs.push(cert);
                gap = sigma - 0.5;
            }
            None => break,
        }
    }
    let achieved = certs.len();
    let brackets = certs.windows(2).map(|w| (w[1].sigma, w[0].sigma)).collect();
    Ok(AlternatingConstruction {
        requested: k_target,
        achieved,
        complete: achieved == k_target,
        block_starts: starts,
        certificates: certs,
        zero_brackets: brackets,
        tail_cap,
    })
}

fn head_sums(starts: &[u64], sigma: f64) -> (Interval, Interval) {
    let mut signed = Interval::ZERO;
    let mut abs = Interval::ZERO;
    for (k, w) in starts.windows(2).enumerate() {
        let mut block = Interval::ZERO;
        for n in w[0].max(2)..w[1] {
            block = block + block_term(n, sigma);
        }
        abs = abs + block;
        signed = if k % 2 == 0 { signed + block } else { signed - block };
    }
    (signed, abs)
}

/// The complete system with `inf |Sφ| = 0` on `Re s > ½`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicExample {
    /// `b_p` on the primes `5 ≤ p ≤ P_max`.
    pub prime_values: PrimeMap,
    /// `Φ = Σ b_n n^{-s}`, totally multiplicative.
    pub phi: SineSystemSpec,
    /// `Sφ = 1/Φ`.
    pub spec: SineSystemSpec,
    /// `(P, Σ_{p ≤ P} b_p²)` at `P = 10, 100, …` and `P_max`.
    pub square_sum_trace: Vec<(u64, f64)>,
    /// Largest single increment `b_p²` among primes above the last decade checkpoint.
    pub last_increment: f64,
    pub profile: Vec<ProfilePoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub sigma: f64,
    /// Euler product over `p ≤ P_max`; a lower bound for the full `Φ(σ)`.
    pub phi: f64,
    pub s_phi: f64,
}

pub const PROFILE_SIGMAS: [f64; 9] = [2.0, 1.5, 1.0, 0.8, 0.6, 0.55, 0.51, 0.505, 0.501];

/// `b_p = p^{-1/2} (ln ln p)^{-2/3}` for `5 ≤ p ≤ P_max`, zero at 2 and 3.
///
/// The exponent makes `Σ b_p² = Σ 1/(p (ln ln p)^{4/3})` converge while
/// `Σ b_p p^{-1/2}` diverges, so `Φ(σ) → ∞` as `σ → ½⁺`. At `p = 3` the
/// formula gives `b_3 ≈ 2.8 > 1`, which would put a zero of `Sφ` inside the
/// disk; that prime is left out together with 2.
pub fn construct_cyclic_example(p_max: u64, table: &FactorTable) -> Result<CyclicExample> {
    if p_max < 5 {
        return Err(Error::invalid("P_max must be at least 5"));
    }
    table.check_range(p_max as usize)?;
    let prime_values: PrimeMap = table
        .primes()
        .iter()
        .copied()
        .filter(|&p| (5..=p_max).contains(&p))
        .map(|p| {
            let pf = p as f64;
            (p, Complex64::new(pf.powf(-0.5) * pf.ln().ln().powf(-2.0 / 3.0), 0.0))
        })
        .collect();
    let len = p_max as usize;
    let phi = SineSystemSpec::totally_multiplicative(&prime_values, len, table)?;
    let spec = SineSystemSpec::inverse_euler(&prime_values, len, table)?;

    let mut trace = Vec::new();
    let mut running = 0.0;
    let mut checkpoint = 10u64;
    let mut last_increment = 0.0f64;
    for (&p, b) in &prime_values {
        while p > checkpoint {
            trace.push((checkpoint, running));
            checkpoint *= 10;
            last_increment = 0.0;
        }
        running += b.norm_sqr();
        last_increment = last_increment.max(b.norm_sqr());
    }
    trace.push((p_max, running));

    let profile = PROFILE_SIGMAS
        .iter()
        .map(|&sigma| {
            let log: f64 = prime_values
                .iter()
                .map(|(&p, b)| -(-(b.re * (p as f64).powf(-sigma))).ln_1p())
                .sum();
            ProfilePoint {
                sigma,
                phi: log.exp(),
                s_phi: (-log).exp(),
            }
        })
        .collect();
    Ok(CyclicExample {
        prime_values,
        phi,
        spec,
        square_sum_trace: trace,
        last_increment,
        profile,
    })
}

/// Dirichlet convolution exposed for the operator identity `S(T_φ f) = Sφ · Sf`.
pub fn multiply_symbols(spec: &SineSystemSpec, f: &DirichletPoly) -> DirichletPoly {
    convolve(&spec.coeffs, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadratureOptions};
    use crate::series::evaluate;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn spec_real(a: &[f64]) -> SineSystemSpec {
        SineSystemSpec::new(DirichletPoly::from_real(a).unwrap()).unwrap()
    }

    fn random_spec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SineSystemSpec {
        let a = DirichletPoly::from_fn(n, |k| {
            if k == 1 {
                c(1.0)
            } else {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
            }
        })
        .unwrap();
        SineSystemSpec::new(a).unwrap()
    }

    #[test]
    fn normalization() {
        let s = SineSystemSpec::new(DirichletPoly::from_real(&[2.0, 1.0]).unwrap()).unwrap();
        assert_eq!(s.coeffs()[2], c(0.5));
        assert_eq!(s.original_a1(), c(2.0));
        assert!(matches!(
            SineSystemSpec::new(DirichletPoly::from_real(&[0.0, 1.0]).unwrap()),
            Err(Error::NonInvertible)
        ));
    }

    #[test]
    fn dilate_examples() {
        let unit = spec_real(&[1.0, 0.0, 0.0]);
        let phi3 = dilate_expand(&unit, 3, 9).unwrap();
        assert!(phi3.iter().enumerate().all(|(k, v)| *v == c(if k == 3 { 1.0 } else { 0.0 })));
        let s = spec_real(&[1.0, 0.5]);
        let phi2 = dilate_expand(&s, 2, 4).unwrap();
        assert_eq!(phi2, vec![c(0.0), c(0.0), c(1.0), c(0.0), c(0.5)]);
        assert!(dilate_expand(&s, 2, 5).is_err());
    }

    #[test]
    fn dilation_operator_is_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=50 {
            let spec = random_spec(&mut rng, n, 1.0);
            let f = DirichletPoly::from_fn(n, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .unwrap();
            let direct = apply_dilations(&spec, &f).unwrap();
            assert!(direct.max_abs_diff(&multiply_symbols(&spec, &f)) < 1e-12);
            assert_eq!(s_transform(&spec), *spec.coeffs());
        }
    }

    #[test]
    fn gram_examples() {
        let t = FactorTable::new(64).unwrap();
        let g = gram_section(&spec_real(&[1.0, 0.0, 0.0, 0.0]), 5, &t).unwrap();
        for j in 1..=5 {
            for k in 1..=5 {
                assert_eq!(g.get(j, k), c(if j == k { 1.0 } else { 0.0 }));
            }
        }
        let g = gram_section(&spec_real(&[1.0, 0.5]), 4, &t).unwrap();
        assert_eq!(g.get(1, 1), c(1.25));
        assert_eq!(g.get(1, 2), c(0.5));
        assert_eq!(g.get(2, 1), c(0.5));
        assert_eq!(g.get(1, 3), c(0.0));
    }

    // L² inner product of the odd 2-periodic extensions, by quadrature.
    fn phi_at(a: &[f64], x: f64) -> f64 {
        a.iter()
            .enumerate()
            .map(|(i, &c)| c * 2f64.sqrt() * ((i + 1) as f64 * std::f64::consts::PI * x).sin())
            .sum()
    }

    #[test]
    fn gram_matches_quadrature() {
        let t = FactorTable::new(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..3 {
            let mut a: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
            a[0] = 1.0;
            let spec = spec_real(&a);
            let g = gram_section(&spec, 6, &t).unwrap();
            for j in 1..=6 {
                for k in 1..=6 {
                    let opts = QuadratureOptions {
                        panels: 64,
                        ..Default::default()
                    };
                    let q = integrate(|x| phi_at(&a, j as f64 * x) * phi_at(&a, k as f64 * x), 0.0, 1.0, opts);
                    assert!((g.get(j, k).re - q.value).abs() < 1e-8, "({j},{k})");
                }
            }
        }
    }

    #[test]
    fn gram_euler_closed_form_matches_truncated_sum() {
        let t = FactorTable::new(1 << 14).unwrap();
        let values = PrimeMap::from([(2, Complex64::new(0.3, 0.2)), (3, c(-0.2))]);
        let euler = SineSystemSpec::totally_multiplicative(&values, 1 << 14, &t).unwrap();
        let finite = SineSystemSpec::new(euler.coeffs().clone()).unwrap();
        let ge = gram_section(&euler, 12, &t).unwrap();
        let gf = gram_section(&finite, 12, &t).unwrap();
        for (x, y) in ge.entries.iter().zip(&gf.entries) {
            assert!((x - y).norm() < 1e-8);
        }
        let inv = SineSystemSpec::inverse_euler(&values, 1 << 14, &t).unwrap();
        let gi = gram_section(&inv, 12, &t).unwrap();
        let gfi = gram_section(&SineSystemSpec::new(inv.coeffs().clone()).unwrap(), 12, &t).unwrap();
        for (x, y) in gi.entries.iter().zip(&gfi.entries) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn frame_bounds_examples() {
        let t = FactorTable::new(128).unwrap();
        let fb = frame_bounds_estimate(&gram_section(&spec_real(&[1.0, 0.0]), 8, &t).unwrap()).unwrap();
        assert!((fb.min_eig - 1.0).abs() < 1e-12 && (fb.max_eig - 1.0).abs() < 1e-12);

        let spec = SineSystemSpec::totally_multiplicative(&PrimeMap::from([(2, c(0.5))]), 128, &t).unwrap();
        let mut prev: Option<FrameBounds> = None;
        for j in [16, 64, 128] {
            let fb = frame_bounds_estimate(&gram_section(&spec, j, &t).unwrap()).unwrap();
            assert!(fb.max_eig <= 4.0 + 1e-6 && fb.min_eig >= 4.0 / 9.0 - 1e-6, "{fb:?}");
            if let Some(p) = prev {
                assert!(fb.min_eig <= p.min_eig + 1e-12 && fb.max_eig >= p.max_eig - 1e-12);
            }
            prev = Some(fb);
        }
    }

    #[test]
    fn frame_bounds_sandwich_random_euler() {
        let t = FactorTable::new(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let values: PrimeMap = [2u64, 3, 5]
                .iter()
                .map(|&p| (p, Complex64::from_polar(rng.random_range(0.0..0.3), rng.random_range(0.0..TAU))))
                .collect();
            let m = crate::bohrlift::euler_multiplier_norm(&values);
            let spec = SineSystemSpec::totally_multiplicative(&values, 128, &t).unwrap();
            for j in [8, 32, 128] {
                let fb = frame_bounds_estimate(&gram_section(&spec, j, &t).unwrap()).unwrap();
                assert!(fb.max_eig <= m.forward.powi(2) + 1e-6);
                assert!(fb.min_eig >= m.reciprocal.powi(-2) - 1e-6);
            }
        }
    }

    #[test]
    fn frame_bounds_rejects_indefinite() {
        let g = GramSection {
            size: 2,
            entries: vec![c(1.0), c(2.0), c(2.0), c(1.0)],
        };
        assert!(matches!(frame_bounds_estimate(&g), Err(Error::Numerical(_))));
        let g = GramSection {
            size: 2,
            entries: vec![c(1.0), c(0.5), c(0.2), c(1.0)],
        };
        assert!(matches!(frame_bounds_estimate(&g), Err(Error::Numerical(_))));
    }

    #[test]
    fn biorthogonal_examples() {
        let unit = spec_real(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        let b = biorthogonal_system(&unit, 5).unwrap();
        for (k, psi) in b.psi.iter().enumerate() {
            assert!(psi.iter().enumerate().all(|(d, v)| *v == c(if d == k + 1 { 1.0 } else { 0.0 })));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = random_spec(&mut rng, 40, 0.5);
        let b = biorthogonal_system(&spec, 40).unwrap();
        assert!(b.psi[0].iter().enumerate().all(|(d, v)| *v == c(if d == 1 { 1.0 } else { 0.0 })));
        assert!(b.biorthogonality_error < 1e-10, "{}", b.biorthogonality_error);
        assert!(b.reconstruction_error < 1e-10);
    }

    #[test]
    fn riesz_examples() {
        let t = FactorTable::new(10_000).unwrap();
        let tol = Tolerances::default();
        let power = |tau: f64| spec_real(&(1..=10_000).map(|n| (n as f64).powf(-tau)).collect::<Vec<_>>());

        let v = riesz_check(&power(2.0), &t, &tol).unwrap();
        assert_eq!((v.status, v.rule.as_str()), (Status::Yes, rules::EULER_PRODUCT));
        let v = riesz_check(&power(0.8), &t, &tol).unwrap();
        assert_eq!(v.status, Status::No);
        assert!(v.flags.contains(&"tail-extrapolated".to_string()));

        let v = riesz_check(&spec_real(&[1.0, 0.4, 0.3]), &t, &tol).unwrap();
        assert_eq!((v.status, v.rule.as_str()), (Status::Yes, rules::SMALL_PERTURBATION));
        let v = riesz_check(&spec_real(&[1.0, 0.6, 0.5]), &t, &tol).unwrap();
        assert_eq!((v.status, v.rule.as_str()), (Status::No, rules::PRIME_SUM_TOO_LARGE));
        let v = riesz_check(&spec_real(&[1.0, 0.0, 0.0, 0.9, 0.0, 0.5]), &t, &tol).unwrap();
        assert_eq!(v.status, Status::Unknown);
        assert!(v.certificate.contains_key("sup_norm"));
    }

    #[test]
    fn completeness_examples() {
        let t = FactorTable::new(10_000).unwrap();
        let tol = Tolerances::default();
        let tau = spec_real(&(1..=10_000).map(|n| (n as f64).powf(-0.6)).collect::<Vec<_>>());
        let v = completeness_check(&tau, &t, &tol).unwrap();
        assert_eq!((v.status, v.rule.as_str()), (Status::Yes, rules::TOTALLY_MULTIPLICATIVE));

        let v = completeness_check(&spec_real(&[1.0, 0.6, 0.4]), &t, &tol).unwrap();
        assert_eq!((v.status, v.rule.as_str()), (Status::Yes, rules::PRIME_LINEAR));
        assert!(v.flags.contains(&"boundary".to_string()));
        assert_eq!(v.certificate["exact_comparison"], json!(true));

        let v = completeness_check(&spec_real(&[1.0, 0.7, 0.4]), &t, &tol).unwrap();
        assert_eq!((v.status, v.rule.as_str()), (Status::No, rules::PRIME_LINEAR));
        assert!(v.certificate["residual_bound"].as_f64().unwrap() < 1e-8);
        assert!(v.certificate["witness_radius"].as_f64().unwrap() < 1.0);

        // Exact tie that floating point misses: 0.7 + 0.2 + 0.1.
        let v = completeness_check(&spec_real(&[1.0, 0.7, 0.2, 0.0, 0.1]), &t, &tol).unwrap();
        assert_eq!(v.status, Status::Yes);
        assert!(v.flags.contains(&"boundary".to_string()));
    }

    #[test]
    fn completeness_other_rules() {
        let t = FactorTable::new(1000).unwrap();
        let tol = Tolerances::default();
        let v = completeness_check(&spec_real(&[1.0, 0.0, 0.0, 0.3, 0.0, 0.2]), &t, &tol).unwrap();
        assert_eq!(v.rule, rules::BOUNDED_MULTIPLIER);
        // 1 + 2·4^{-s}: zero at z_2² = −1/2 inside the disk.
        let v = completeness_check(&spec_real(&[1.0, 0.0, 0.0, 2.0]), &t, &tol).unwrap();
        assert_eq!((v.status, v.rule.as_str()), (Status::No, rules::POLYDISK_ZERO));
        // 1 + 0.5·6^{-s} + 0.9·4^{-s}: no rule applies and the zero search
        // must not invent one if none is found; either way never Yes.
        let v = completeness_check(&spec_real(&[1.0, 0.0, 0.0, 0.9, 0.0, 0.5]), &t, &tol).unwrap();
        assert_ne!(v.status, Status::Yes);
    }

    #[test]
    fn polydisk_zero_search_verifies() {
        let t = FactorTable::new(100).unwrap();
        let p = lift(&DirichletPoly::from_real(&[1.0, 0.0, 0.0, 0.0, 0.0, 3.0]).unwrap(), &t).unwrap();
        let (z, res) = find_polydisk_zero(&p).unwrap();
        assert!(res < 1e-8);
        let prod = z[&2] * z[&3];
        assert!((prod + 1.0 / 3.0).norm() < 1e-8);
        // 1 + 0.5·2^{-s} has its only zero at z = −2, outside.
        let p = lift(&DirichletPoly::from_real(&[1.0, 0.5]).unwrap(), &t).unwrap();
        assert!(find_polydisk_zero(&p).is_none());
    }

    #[test]
    fn alternating_construction_small() {
        let r = construct_alternating(2, 1_000_000).unwrap();
        assert!(r.complete);
        assert_eq!(r.certificates.len(), 2);
        assert_eq!(r.zero_brackets.len(), 1);
        for c in &r.certificates {
            assert!(c.margin > 0.0);
            assert!(c.sign as f64 * c.signed_head.hi + c.middle.lo - c.tail_bound > 0.0 || c.k % 2 == 1);
        }
        assert!(r.certificates[1].sigma < r.certificates[0].sigma);
        // Independent floating check of the signs on the truncated function.
        let f = r.coefficients().unwrap();
        for cert in &r.certificates {
            let v = evaluate(&f, c(cert.sigma)).re;
            assert_eq!(v.signum() as i8, cert.sign, "σ = {}", cert.sigma);
        }
        assert!(construct_alternating(1, 100).is_err());
    }

    #[test]
    fn alternating_construction_cap_gives_partial() {
        let r = construct_alternating(3, 1000).unwrap();
        assert!(!r.complete);
        assert_eq!(r.achieved, 2);
        assert_eq!(r.block_starts.len(), 3);
    }

    #[test]
    fn integral_tail_dominates_sum() {
        for &sigma in &[0.6, 0.8, 1.5] {
            for &n in &[3u64, 10, 100] {
                let direct: f64 = (n..n + 2_000_000).map(|m| block_term(m, sigma).hi).sum();
                assert!(integral_tail(n - 1, sigma) >= direct);
            }
        }
    }

    #[test]
    fn cyclic_example_properties() {
        let t = FactorTable::new(100_000).unwrap();
        let ex = construct_cyclic_example(100_000, &t).unwrap();
        assert!(ex.prime_values.values().all(|b| b.norm() < 1.0));
        assert!(!ex.prime_values.contains_key(&2) && !ex.prime_values.contains_key(&3));
        assert!(ex.square_sum_trace.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!(ex.last_increment < 1e-4);
        let phi_at = |s: f64| ex.profile.iter().find(|p| p.sigma == s).unwrap().phi;
        assert!(phi_at(0.51) > phi_at(0.6) && phi_at(0.6) > phi_at(0.8));
        assert!(ex.profile.windows(2).all(|w| w[1].s_phi < w[0].s_phi));

        let v = completeness_check(&ex.spec, &t, &Tolerances::default()).unwrap();
        assert_eq!((v.status, v.rule.as_str()), (Status::Yes, rules::DIVISOR_NORMS));
        assert!(construct_cyclic_example(3, &t).is_err());
    }
}
