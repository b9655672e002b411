//! Precision-controlled arithmetic: MPFR reals, a small complex type on top of
//! them, validated roots of unity and the quantum integers/factorials they
//! induce.
//!
//! A [`RootSpec`] fixes `q = exp(kπ√−1/r)` together with a working precision.
//! All trigonometric values `sin(mπ/r)`, `cos(mπ/r)`, the quantum integers
//! `[n]`, the factorials `[n]!` and the 6j-weights are tabulated once at
//! construction and shared read-only afterwards.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

pub type PrecReal = Float;

/// Working precision used when nothing else is requested.
pub const DEFAULT_PREC: u32 = 256;

/// Extra bits carried while evaluating transcendental table entries.
const GUARD_BITS: u32 = 32;

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `x mod m` in `0..m` for any sign of `x`.
pub(crate) fn modulo(x: i128, m: i128) -> i128 {
    x.rem_euclid(m)
}

/// Decimal digits carried by `bits` of mantissa.
pub fn decimal_digits(bits: u32) -> u32 {
    (bits as f64 * std::f64::consts::LOG10_2).floor() as u32
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `exp(π√−1 · num/den)` evaluated after exact reduction of the angle.
pub fn unit_pi_frac(num: i128, den: i128, prec: u32) -> PrecComplex {
    assert!(den > 0);
    let num = modulo(num, 2 * den);
    if num == 0 {
        return PrecComplex::from_f64(1.0, 0.0, prec);
    }
    if 2 * num == 2 * den {
        return PrecComplex::from_f64(-1.0, 0.0, prec);
    }
    let wp = prec + GUARD_BITS;
    let theta = pi(wp) * Float::with_val(wp, num) / Float::with_val(wp, den);
    let (s, c) = (theta.clone().sin(), theta.cos());
    PrecComplex::new(Float::with_val(prec, &c), Float::with_val(prec, &s))
}

// ---------------------------------------------------------------------------
// Complex numbers
// ---------------------------------------------------------------------------

/// A complex number with MPFR real and imaginary parts at a common precision.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecComplex {
    pub re: Float,
    pub im: Float,
}

impl PrecComplex {
    pub fn new(re: Float, im: Float) -> Self {
        PrecComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        PrecComplex::new(Float::new(prec), Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        PrecComplex::from_f64(1.0, 0.0, prec)
    }

    /// `√−1`
    pub fn i(prec: u32) -> Self {
        PrecComplex::from_f64(0.0, 1.0, prec)
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        PrecComplex::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        PrecComplex::new(re, Float::new(prec))
    }

    /// `(√−1)^n`, exact.
    pub fn i_pow(n: i64, prec: u32) -> Self {
        match n.rem_euclid(4) {
            0 => PrecComplex::from_f64(1.0, 0.0, prec),
            1 => PrecComplex::from_f64(0.0, 1.0, prec),
            2 => PrecComplex::from_f64(-1.0, 0.0, prec),
            _ => PrecComplex::from_f64(0.0, -1.0, prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        PrecComplex::new(self.re.clone(), -self.im.clone())
    }

    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    pub fn norm_sqr(&self) -> Float {
        let prec = self.prec();
        let a = Float::with_val(prec, self.re.square_ref());
        a + Float::with_val(prec, self.im.square_ref())
    }

    pub fn scale(&self, s: &Float) -> Self {
        PrecComplex::new(Float::with_val(self.re.prec(), &self.re * s), Float::with_val(self.im.prec(), &self.im * s))
    }

    /// Argument in `[0, 2π)`. Undefined (zero) for `0`.
    pub fn arg_positive(&self) -> Float {
        let prec = self.prec();
        let mut a = self.im.clone().atan2(&self.re);
        if a.is_sign_negative() && !a.is_zero() {
            a += pi(prec) * 2u32;
        }
        // atan2(-0, x<0) is -π; keep the branch closed at 0 and open at 2π.
        if a >= pi(prec) * 2u32 {
            a -= pi(prec) * 2u32;
        }
        a
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("complex reciprocal".into()));
        }
        let d = self.norm_sqr();
        Ok(PrecComplex::new(
            Float::with_val(self.re.prec(), &self.re / &d),
            Float::with_val(self.im.prec(), -(self.im.clone() / &d)),
        ))
    }

    pub fn checked_div(&self, rhs: &PrecComplex) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        PrecComplex::new(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }
}

impl fmt::Display for PrecComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64_pair();
        if im < 0.0 {
            write!(f, "{re} - {}i", -im)
        } else {
            write!(f, "{re} + {im}i")
        }
    }
}

impl<'a> Add<&'a PrecComplex> for &'a PrecComplex {
    type Output = PrecComplex;
    fn add(self, rhs: &PrecComplex) -> PrecComplex {
        PrecComplex::new(
            Float::with_val(self.re.prec(), &self.re + &rhs.re),
            Float::with_val(self.im.prec(), &self.im + &rhs.im),
        )
    }
}

impl<'a> Sub<&'a PrecComplex> for &'a PrecComplex {
    type Output = PrecComplex;
    fn sub(self, rhs: &PrecComplex) -> PrecComplex {
        PrecComplex::new(
            Float::with_val(self.re.prec(), &self.re - &rhs.re),
            Float::with_val(self.im.prec(), &self.im - &rhs.im),
        )
    }
}

impl<'a> Mul<&'a PrecComplex> for &'a PrecComplex {
    type Output = PrecComplex;
    fn mul(self, rhs: &PrecComplex) -> PrecComplex {
        let prec = self.prec();
        let ac = Float::with_val(prec, &self.re * &rhs.re);
        let bd = Float::with_val(prec, &self.im * &rhs.im);
        let ad = Float::with_val(prec, &self.re * &rhs.im);
        let bc = Float::with_val(prec, &self.im * &rhs.re);
        PrecComplex::new(ac - bd, ad + bc)
    }
}

impl Neg for PrecComplex {
    type Output = PrecComplex;
    fn neg(self) -> PrecComplex {
        PrecComplex::new(-self.re, -self.im)
    }
}

// ---------------------------------------------------------------------------
// Roots of unity
// ---------------------------------------------------------------------------

struct Tables {
    /// `sin(mπ/r)` for `m` in `0..2r`; exact zeros at `m ∈ {0, r}`.
    sin_pi: Vec<Float>,
    /// `cos(mπ/r)` for `m` in `0..2r`.
    cos_pi: Vec<Float>,
    /// `[n]!` for `n` in `0..=2r`.
    fact: Vec<Float>,
    /// `1/[n]!` for `n` in `0..r` (where `[n]!` is nonzero).
    inv_fact: Vec<Float>,
    /// `w_c = (-1)^{2c}[2c+1]` indexed by the twice-color `2c` in `0..=r-2`.
    weights: Vec<Float>,
}

/// A validated root of unity `q = exp(kπ√−1/r)` with its working precision.
#[derive(Clone)]
pub struct RootSpec {
    r: u32,
    k: u32,
    prec: u32,
    tables: Arc<Tables>,
}

impl fmt::Debug for RootSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RootSpec")
            .field("r", &self.r)
            .field("k", &self.k)
            .field("prec", &self.prec)
            .finish()
    }
}

impl PartialEq for RootSpec {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && self.k == other.k && self.prec == other.prec
    }
}

/// Validates `(r, k)` and tabulates everything derived from `q`.
///
/// Requires `r ≥ 3`, `1 ≤ k < 2r` and `gcd(k, r) = 1`, which is exactly the
/// condition for `q²` to be a primitive `r`-th root of unity.
pub fn make_root(r: i64, k: i64, prec: u32) -> Result<RootSpec> {
    if r < 3 {
        return Err(Error::InvalidRoot { r, k, reason: "r must be at least 3" });
    }
    if k < 1 || k >= 2 * r {
        return Err(Error::InvalidRoot { r, k, reason: "k must satisfy 1 <= k < 2r" });
    }
    if gcd(k as u64, r as u64) != 1 {
        return Err(Error::InvalidRoot { r, k, reason: "gcd(k, r) != 1" });
    }
    if r > 1 << 20 {
        return Err(Error::InvalidRoot { r, k, reason: "r too large" });
    }
    if prec < 16 {
        return Err(Error::InvalidArgument(format!("precision {prec} bits is too small")));
    }
    let (r, k) = (r as u32, k as u32);
    Ok(RootSpec { r, k, prec, tables: Arc::new(Tables::build(r, k, prec)) })
}

impl Tables {
    fn build(r: u32, k: u32, prec: u32) -> Tables {
        let wp = prec + GUARD_BITS;
        let two_r = 2 * r as usize;
        let pi_over_r = pi(wp) / r;

        let mut sin_pi = Vec::with_capacity(two_r);
        let mut cos_pi = Vec::with_capacity(two_r);
        for m in 0..two_r {
            let theta = Float::with_val(wp, &pi_over_r * (m as u32));
            let (s, c) = if m == 0 {
                (Float::new(prec), Float::with_val(prec, 1))
            } else if m == r as usize {
                (Float::new(prec), Float::with_val(prec, -1))
            } else {
                (Float::with_val(prec, theta.clone().sin()), Float::with_val(prec, theta.cos()))
            };
            sin_pi.push(s);
            cos_pi.push(c);
        }

        let sin_k = sin_pi[k as usize % two_r].clone();
        let qint: Vec<Float> = (0..=two_r)
            .map(|n| {
                let m = (n * k as usize) % two_r;
                Float::with_val(prec, &sin_pi[m] / &sin_k)
            })
            .collect();

        let mut fact = Vec::with_capacity(two_r + 1);
        fact.push(Float::with_val(prec, 1));
        for n in 1..=two_r {
            let next = Float::with_val(prec, &fact[n - 1] * &qint[n]);
            fact.push(next);
        }
        let inv_fact = (0..r as usize)
            .map(|n| Float::with_val(prec, 1) / &fact[n])
            .collect();
        let weights = (0..=(r as usize - 2))
            .map(|t| {
                let w = qint[t + 1].clone();
                if t % 2 == 1 {
                    -w
                } else {
                    w
                }
            })
            .collect();

        Tables { sin_pi, cos_pi, fact, inv_fact, weights }
    }
}

impl RootSpec {
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Same root, different working precision.
    pub fn with_prec(&self, prec: u32) -> RootSpec {
        make_root(self.r as i64, self.k as i64, prec).expect("root already validated")
    }

    /// Largest twice-color in `I_r`.
    pub fn max_twice(&self) -> u16 {
        (self.r - 2) as u16
    }

    /// `sin(mπ/r)` for any integer `m`.
    pub fn sin_pi(&self, m: i64) -> &Float {
        let idx = modulo(m as i128, 2 * self.r as i128) as usize;
        &self.tables.sin_pi[idx]
    }

    /// `cos(mπ/r)` for any integer `m`.
    pub fn cos_pi(&self, m: i64) -> &Float {
        let idx = modulo(m as i128, 2 * self.r as i128) as usize;
        &self.tables.cos_pi[idx]
    }

    /// `exp(mπ√−1/r)`.
    pub fn unit(&self, m: i128) -> PrecComplex {
        let idx = modulo(m, 2 * self.r as i128) as usize;
        PrecComplex::new(self.tables.cos_pi[idx].clone(), self.tables.sin_pi[idx].clone())
    }

    /// `q^x = exp(x·kπ√−1/r)` for integer `x`.
    pub fn q_pow(&self, x: i128) -> PrecComplex {
        self.unit(x * self.k as i128)
    }

    pub(crate) fn fact_table(&self) -> &[Float] {
        &self.tables.fact
    }

    pub(crate) fn inv_fact_table(&self) -> &[Float] {
        &self.tables.inv_fact
    }

    pub(crate) fn weight_table(&self) -> &[Float] {
        &self.tables.weights
    }

}

/// `[n] = sin(nkπ/r)/sin(kπ/r)`; exactly zero when `r | nk`.
pub fn quantum_int(n: i64, root: &RootSpec) -> PrecReal {
    let m = modulo(n as i128 * root.k as i128, 2 * root.r as i128) as i64;
    Float::with_val(root.prec, root.sin_pi(m) / root.sin_pi(root.k as i64))
}

/// `[n]! = [n][n-1]…[1]`, `[0]! = 1`, for `0 ≤ n ≤ 2r`.
pub fn quantum_factorial(n: u32, root: &RootSpec) -> Result<PrecReal> {
    root.tables
        .fact
        .get(n as usize)
        .cloned()
        .ok_or_else(|| Error::InvalidArgument(format!("[{n}]! outside the tabulated range 0..={}", 2 * root.r)))
}

/// Square root with the convention `√x = √(−x)·√−1` for negative `x`.
pub fn signed_sqrt(x: &Float) -> PrecComplex {
    let prec = x.prec();
    if x.is_sign_negative() && !x.is_zero() {
        PrecComplex::new(Float::new(prec), Float::with_val(prec, -x.clone()).sqrt())
    } else {
        PrecComplex::new(x.clone().sqrt(), Float::new(prec))
    }
}

/// `log|z| + √−1·arg z` with `arg z ∈ [0, 2π)`.
pub fn principal_log(z: &PrecComplex) -> Result<PrecComplex> {
    if z.is_zero() {
        return Err(Error::LogOfZero);
    }
    Ok(PrecComplex::new(z.abs().ln(), z.arg_positive()))
}

// ---------------------------------------------------------------------------
// Verified values
// ---------------------------------------------------------------------------

/// A computed invariant with the number of decimal digits that agree between
/// two successive precision levels.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantValue {
    pub re: PrecReal,
    pub im: PrecReal,
    pub prec: u32,
    pub verified_digits: u32,
}

impl InvariantValue {
    pub fn as_complex(&self) -> PrecComplex {
        PrecComplex::new(self.re.clone(), self.im.clone())
    }

    pub fn re_f64(&self) -> f64 {
        self.re.to_f64()
    }

    pub fn im_f64(&self) -> f64 {
        self.im.to_f64()
    }
}

/// Number of decimal digits on which `lo` (computed at `lo_prec`) and `hi`
/// agree, measured against `max(|hi|, 1)`: relative for large values,
/// absolute for small ones, so an exact zero is recognised as such.
pub fn agreeing_digits(lo: &PrecComplex, hi: &PrecComplex, lo_prec: u32) -> u32 {
    let cap = decimal_digits(lo_prec);
    let prec = hi.prec().max(lo.prec());
    let diff = (&hi.with_prec(prec) - &lo.with_prec(prec)).abs();
    if diff.is_zero() {
        return cap;
    }
    let scale = hi.abs().max(&Float::with_val(prec, 1));
    let rel = diff / scale;
    let d = -rel.log10().to_f64();
    if !d.is_finite() {
        return if d > 0.0 { cap } else { 0 };
    }
    (d.floor().max(0.0) as u32).min(cap)
}

/// Adaptive precision schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    /// Starting working precision in bits.
    pub initial_bits: u32,
    /// Precision beyond which the schedule gives up.
    pub max_bits: u32,
    /// Requested verified decimal digits.
    pub digits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { initial_bits: DEFAULT_PREC, max_bits: 16384, digits: 12 }
    }
}

impl PrecisionPolicy {
    pub fn with_digits(mut self, digits: u32) -> Self {
        self.digits = digits;
        self
    }

    pub fn with_initial_bits(mut self, bits: u32) -> Self {
        self.initial_bits = bits;
        self
    }
}

/// Result of [`refine`]: the value at the highest precision evaluated.
#[derive(Clone, Debug)]
pub struct Refined<T> {
    pub value: T,
    pub prec: u32,
    pub verified_digits: u32,
}

/// Evaluates `eval` at `p` and `2p`, doubling until the two most recent
/// results agree to `policy.digits` decimal digits.
pub fn refine<T, F, P>(policy: &PrecisionPolicy, mut eval: F, project: P) -> Result<Refined<T>>
where
    F: FnMut(u32) -> Result<T>,
    P: Fn(&T) -> PrecComplex,
{
    let mut prec = policy.initial_bits;
    let mut lo = eval(prec)?;
    loop {
        let hi_prec = prec * 2;
        if hi_prec > policy.max_bits {
            return Err(Error::PrecisionExhausted { cap: policy.max_bits, achieved: 0, wanted: policy.digits });
        }
        let hi = eval(hi_prec)?;
        let d = agreeing_digits(&project(&lo), &project(&hi), prec);
        if d >= policy.digits {
            return Ok(Refined { value: hi, prec: hi_prec, verified_digits: d });
        }
        if hi_prec * 2 > policy.max_bits {
            return Err(Error::PrecisionExhausted { cap: policy.max_bits, achieved: d, wanted: policy.digits });
        }
        lo = hi;
        prec = hi_prec;
    }
}
