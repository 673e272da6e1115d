//! Outward-rounded interval arithmetic over `f64`.
//!
//! Basic operations are correctly rounded in IEEE 754, so one ulp of outward
//! widening encloses the exact result. `exp` and `ln` come from the platform
//! libm, which is faithful but not correctly rounded; those get a few extra
//! ulps.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

const LIBM_ULPS: usize = 3;

fn down(x: f64) -> f64 {
    x.next_down()
}

fn up(x: f64) -> f64 {
    x.next_up()
}

fn down_n(mut x: f64, n: usize) -> f64 {
    for _ in 0..n {
        x = x.next_down();
    }
    x
}

fn up_n(mut x: f64, n: usize) -> f64 {
    for _ in 0..n {
        x = x.next_up();
    }
    x
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn is_negative(&self) -> bool {
        self.hi < 0.0
    }

    /// Upper bound of `|x|` over the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn exp(self) -> Self {
        Self {
            lo: down_n(self.lo.exp(), LIBM_ULPS).max(0.0),
            hi: up_n(self.hi.exp(), LIBM_ULPS),
        }
    }

    /// Natural log; the interval must be strictly positive.
    pub fn ln(self) -> Self {
        assert!(self.lo > 0.0, "ln of non-positive interval");
        Self {
            lo: down_n(self.lo.ln(), LIBM_ULPS),
            hi: up_n(self.hi.ln(), LIBM_ULPS),
        }
    }

    /// Division; the divisor must not contain zero.
    pub fn div(self, rhs: Self) -> Self {
        assert!(rhs.lo > 0.0 || rhs.hi < 0.0, "division by interval containing zero");
        let c = [self.lo / rhs.lo, self.lo / rhs.hi, self.hi / rhs.lo, self.hi / rhs.hi];
        Self {
            lo: down(c.iter().copied().fold(f64::INFINITY, f64::min)),
            hi: up(c.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        }
    }

    pub fn sqr(self) -> Self {
        let (a, b) = (self.lo * self.lo, self.hi * self.hi);
        if self.lo >= 0.0 {
            Self::new(down(a), up(b))
        } else if self.hi <= 0.0 {
            Self::new(down(b), up(a))
        } else {
            Self::new(0.0, up(a.max(b)))
        }
    }

    pub fn sqrt(self) -> Self {
        // sqrt is correctly rounded.
        Self::new(down(self.lo.max(0.0).sqrt()).max(0.0), up(self.hi.max(0.0).sqrt()))
    }

    /// Hull of two intervals.
    pub fn hull(self, other: Self) -> Self {
        Self::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Self::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Self) -> Self {
        Self {
            lo: down(self.lo + rhs.lo),
            hi: up(self.hi + rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Self) -> Self {
        Self {
            lo: down(self.lo - rhs.hi),
            hi: up(self.hi - rhs.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Self) -> Self {
        let c = [self.lo * rhs.lo, self.lo * rhs.hi, self.hi * rhs.lo, self.hi * rhs.hi];
        Self {
            lo: down(c.iter().copied().fold(f64::INFINITY, f64::min)),
            hi: up(c.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        }
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Self {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

/// Rectangular complex interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn point(z: crate::Complex64) -> Self {
        Self {
            re: Interval::point(z.re),
            im: Interval::point(z.im),
        }
    }

    pub const ZERO: ComplexInterval = ComplexInterval {
        re: Interval::ZERO,
        im: Interval::ZERO,
    };

    /// Upper bound on the modulus over the rectangle.
    pub fn mag(&self) -> f64 {
        (self.re.sqr() + self.im.sqr()).sqrt().hi
    }

    pub fn powi(self, e: u32) -> Self {
        let mut acc = ComplexInterval::point(crate::Complex64::new(1.0, 0.0));
        for _ in 0..e {
            acc = acc * self;
        }
        acc
    }
}

impl Add for ComplexInterval {
    type Output = ComplexInterval;
    fn add(self, rhs: Self) -> Self {
        Self {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Mul for ComplexInterval {
    type Output = ComplexInterval;
    fn mul(self, rhs: Self) -> Self {
        Self {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

/// Euler–Mascheroni constant, enclosed.
const EULER_GAMMA: Interval = Interval {
    lo: 0.577_215_664_901_532_8,
    hi: 0.577_215_664_901_533,
};

/// Enclosure of the exponential integral `E₁(u) = ∫_u^∞ e^{-x}/x dx`, `u > 0`.
///
/// Small arguments use the convergent series
/// `E₁(u) = -γ - ln u + Σ_{k≥1} (-1)^{k+1} u^k / (k·k!)`, summed until the
/// alternating terms are decreasing and below the working precision, with the
/// first omitted term added as the remainder bound. Large arguments use the
/// two-sided bound `½e^{-u} ln(1 + 2/u) < E₁(u) < e^{-u} ln(1 + 1/u)`.
pub fn exp_integral_e1(u: Interval) -> Interval {
    assert!(u.lo > 0.0, "E1 needs a positive argument");
    // E1 is decreasing, so enclose the endpoints separately.
    let at = |x: f64| -> Interval {
        if x <= 8.0 {
            e1_series(x)
        } else {
            let xi = Interval::point(x);
            let e = (-xi).exp();
            let upper = e * (Interval::point(1.0) + Interval::point(1.0).div(xi)).ln();
            let lower = Interval::point(0.5) * e * (Interval::point(1.0) + Interval::point(2.0).div(xi)).ln();
            Interval::new(lower.lo, upper.hi)
        }
    };
    Interval::new(at(u.hi).lo, at(u.lo).hi)
}

fn e1_series(x: f64) -> Interval {
    let xi = Interval::point(x);
    let mut sum = Interval::ZERO;
    // term_k = x^k / (k · k!) tracked via power/factorial ratio p_k = x^k / k!.
    let mut p = Interval::point(1.0);
    let mut k = 1u32;
    loop {
        p = (p * xi).div(Interval::point(k as f64));
        let term = p.div(Interval::point(k as f64));
        if k % 2 == 1 {
            sum = sum + term;
        } else {
            sum = sum - term;
        }
        // Alternating with decreasing magnitude once k > x: the next term bounds
        // the remainder.
        let next = (p * xi).div(Interval::point(((k + 1) as f64) * ((k + 1) as f64)));
        if (k as f64) > x && next.hi < 1e-18 * sum.mag().max(1e-300) {
            sum = sum + Interval::new(-next.hi, next.hi);
            break;
        }
        k += 1;
        assert!(k < 400, "E1 series failed to converge");
    }
    -EULER_GAMMA - xi.ln() + sum
}
