//! Colored Jones polynomials of the figure-eight and 5_2 knots at roots of
//! unity, the Reshetikhin-Turaev-Lickorish invariant of integral surgeries
//! along them, and the growth quantity `Q_r`.

use std::fmt;
use std::str::FromStr;

use rug::Float;

use crate::arith::{make_root, pi, principal_log, refine, unit_pi_frac, PrecComplex, PrecisionPolicy, RootSpec};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Knot {
    Fig8,
    K52,
}

impl Knot {
    pub fn name(self) -> &'static str {
        match self {
            Knot::Fig8 => "fig8",
            Knot::K52 => "k52",
        }
    }
}

impl fmt::Display for Knot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Knot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Knot> {
        match s {
            "fig8" | "4_1" | "41" => Ok(Knot::Fig8),
            "k52" | "5_2" | "52" => Ok(Knot::K52),
            _ => Err(Error::InvalidArgument(format!("unknown knot `{s}` (expected fig8 or k52)"))),
        }
    }
}

/// `p`-surgery on `knot`, evaluated at level `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurgerySpec {
    pub knot: Knot,
    pub p: i64,
    pub r: i64,
}

impl SurgerySpec {
    pub fn new(knot: Knot, p: i64, r: i64) -> Result<SurgerySpec> {
        if p == 0 {
            return Err(Error::InvalidArgument("surgery coefficient p must be nonzero".into()));
        }
        if r < 3 || r % 2 == 0 {
            return Err(Error::InvalidArgument(format!("surgery level r must be odd and >= 3, got {r}")));
        }
        Ok(SurgerySpec { knot, p, r })
    }
}

/// `(q^{n−i} − q^{−n+i})(q^{n+i} − q^{−n−i}) = −4 sin((n−i)kπ/r) sin((n+i)kπ/r)`.
fn cyclotomic_factor(n: i64, i: i64, root: &RootSpec) -> Float {
    let k = root.k() as i64;
    let s = Float::with_val(root.prec(), root.sin_pi((n - i) * k) * root.sin_pi((n + i) * k));
    s * -4i32
}

/// `J_n(4_1; q) = Σ_{k<n} Π_{i≤k} (q^{n−i}−q^{−n+i})(q^{n+i}−q^{−n−i})`.
pub fn jones_fig8(n: u32, root: &RootSpec) -> Result<PrecComplex> {
    if n == 0 {
        return Err(Error::InvalidArgument("colored Jones index n must be >= 1".into()));
    }
    let prec = root.prec();
    let n = n as i64;
    let mut prod = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, 1);
    for k in 1..n {
        prod *= cyclotomic_factor(n, k, root);
        sum += &prod;
    }
    Ok(PrecComplex::from_real(sum))
}

/// The coefficients `c_k`, `0 ≤ k ≤ r − 1`, of the 5_2 formula. They do not
/// depend on the color, so one table serves every `J_n` at a root.
#[derive(Clone, Debug)]
pub struct Jones52Coeffs {
    root: RootSpec,
    c: Vec<PrecComplex>,
}

impl Jones52Coeffs {
    pub fn new(root: &RootSpec) -> Jones52Coeffs {
        let prec = root.prec();
        let r = root.r() as i64;
        let fact = root.fact_table();
        let inv = root.inv_fact_table();
        let mut c = Vec::with_capacity(r as usize);
        for k in 0..r {
            let mut s = PrecComplex::zero(prec);
            for i in 0..=k {
                let binom = Float::with_val(prec, &fact[k as usize] * &inv[i as usize]) * &inv[(k - i) as usize];
                let e = i * i - 2 * i - 3 * k * i;
                s = &s + &root.q_pow(e as i128).scale(&binom);
            }
            let mut ck = &root.q_pow(((5 * k * k + 7 * k) / 2) as i128) * &s;
            if k % 2 == 1 {
                ck = -ck;
            }
            c.push(ck);
        }
        Jones52Coeffs { root: root.clone(), c }
    }

    pub fn get(&self, k: usize) -> Option<&PrecComplex> {
        self.c.get(k)
    }

    /// `J_n(5_2; q) = Σ_{k<n} q^{k(k+3)/2} c_k Π_{i≤k}(q^{n−i}−q^{−n+i})(q^{n+i}−q^{−n−i})`.
    pub fn jones(&self, n: u32) -> Result<PrecComplex> {
        let root = &self.root;
        if n == 0 || n > root.r() {
            return Err(Error::InvalidArgument(format!("5_2 colored Jones needs 1 <= n <= r, got n={n}")));
        }
        let prec = root.prec();
        let n = n as i64;
        let mut prod = Float::with_val(prec, 1);
        let mut sum = PrecComplex::zero(prec);
        for k in 0..n {
            if k > 0 {
                prod *= cyclotomic_factor(n, k, root);
            }
            let t = &root.q_pow((k * (k + 3) / 2) as i128) * &self.c[k as usize];
            sum = &sum + &t.scale(&prod);
        }
        Ok(sum)
    }
}

/// `J_n(5_2; q)` for `1 ≤ n ≤ r`. Builds the coefficient table on each call;
/// use [`Jones52Coeffs`] for repeated evaluation.
pub fn jones_52(n: u32, root: &RootSpec) -> Result<PrecComplex> {
    Jones52Coeffs::new(root).jones(n)
}

/// `τ_r(M_p)` at `q = e^{2π√−1/r}` and the given precision.
pub fn rt_surgery_at(spec: &SurgerySpec, prec: u32) -> Result<PrecComplex> {
    let spec = SurgerySpec::new(spec.knot, spec.p, spec.r)?;
    let root = make_root(spec.r, 2, prec)?;
    let r = spec.r as i128;
    let coeffs = match spec.knot {
        Knot::K52 => Some(Jones52Coeffs::new(&root)),
        Knot::Fig8 => None,
    };
    let mut sum = PrecComplex::zero(prec);
    for n in 0..=(r - 2) {
        let j = match &coeffs {
            Some(c) => c.jones(n as u32 + 1)?,
            None => jones_fig8(n as u32 + 1, &root)?,
        };
        let s = root.sin_pi(2 * (n as i64 + 1));
        let s2 = Float::with_val(prec, s * s);
        // (−e^{π√−1/r})^{−x} = e^{π√−1·x(r−1)/r}
        let x = spec.p as i128 * (n * n + 2 * n);
        let phase = root.unit(x * (r - 1));
        sum = &sum + &(&phase * &j).scale(&s2);
    }
    // e^{((3+r²)/r − (3−r)/4)π√−1} = e^{π√−1·(5r²−3r+12)/(4r)}
    let pre = unit_pi_frac(5 * r * r - 3 * r + 12, 4 * r, prec);
    let two_over_r = Float::with_val(prec, 2) / Float::with_val(prec, spec.r);
    Ok((&pre * &sum).scale(&two_over_r))
}

#[derive(Clone, Debug)]
pub struct RtValue {
    pub value: PrecComplex,
    pub prec: u32,
    pub verified_digits: u32,
}

/// Adaptive-precision `τ_r(M_p)`.
pub fn rt_surgery(spec: &SurgerySpec, policy: &PrecisionPolicy) -> Result<RtValue> {
    let out = refine(policy, |prec| rt_surgery_at(spec, prec), |z| z.clone())?;
    Ok(RtValue { value: out.value, prec: out.prec, verified_digits: out.verified_digits })
}

/// Tabulated `(Vol, CS)` of the surgered manifolds, used to pick the branch
/// of the imaginary part of `Q_r`.
pub fn surgery_target(knot: Knot, p: i64) -> Option<(f64, f64)> {
    let t = match (knot, p) {
        (Knot::Fig8, -6) => (1.28449, -1.34092),
        (Knot::Fig8, -5) => (0.98137, -1.52067),
        (Knot::Fig8, 5) => (0.98137, 1.52067),
        (Knot::Fig8, 6) => (1.28449, 1.34092),
        (Knot::Fig8, 7) => (1.46378, 1.19653),
        (Knot::Fig8, 8) => (1.58317, 1.07850),
        (Knot::K52, -3) => (2.10310, -4.45132),
        (Knot::K52, -2) => (1.84359, -4.63884),
        (Knot::K52, -1) => (1.39851, -4.86783),
        (Knot::K52, 5) => (0.98137, -1.52067),
        (Knot::K52, 6) => (1.41406, -1.51206),
        (Knot::K52, 7) => (1.75713, -1.55255),
        _ => return None,
    };
    Some(t)
}

#[derive(Clone, Debug)]
pub struct QrValue {
    /// `2π log(τ_r/τ_{r−2})` with the argument in `[0, 2π)`.
    pub raw: PrecComplex,
    /// Imaginary part moved by a multiple of `π²` next to the target.
    pub reduced: PrecComplex,
    pub prec: u32,
    pub verified_digits: u32,
}

/// Shifts `im` by a multiple of `π²` into `[t − π²/2, t + π²/2)`, or into
/// `[0, π²)` without a target.
pub fn reduce_mod_pi2(im: &Float, target: Option<f64>) -> Float {
    let prec = im.prec();
    let p2 = Float::with_val(prec, pi(prec).square());
    let lo = match target {
        Some(t) => Float::with_val(prec, t) - Float::with_val(prec, &p2 / 2u32),
        None => Float::new(prec),
    };
    let shifted = Float::with_val(prec, im - &lo);
    let m = Float::with_val(prec, &shifted / &p2).floor();
    Float::with_val(prec, im - m * &p2)
}

fn qr_at(knot: Knot, p: i64, r: i64, prec: u32) -> Result<PrecComplex> {
    let hi = rt_surgery_at(&SurgerySpec::new(knot, p, r)?, prec)?;
    let lo = rt_surgery_at(&SurgerySpec::new(knot, p, r - 2)?, prec)?;
    let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
    if lo.abs() <= tiny {
        return Err(Error::DivisionByZero(format!("τ_{}({knot}, p={p}) vanishes", r - 2)));
    }
    let log = principal_log(&hi.checked_div(&lo)?)?;
    Ok(log.scale(&(pi(prec) * 2u32)))
}

/// `Q_r = 2π log(τ_r(M_p)/τ_{r−2}(M_p))`, branch-reduced toward `target_cs`.
pub fn qr_with_target(
    knot: Knot,
    p: i64,
    r: i64,
    target_cs: Option<f64>,
    policy: &PrecisionPolicy,
) -> Result<QrValue> {
    if r < 7 || r % 2 == 0 {
        return Err(Error::InvalidArgument(format!("Q_r needs odd r >= 7, got {r}")));
    }
    SurgerySpec::new(knot, p, r)?;
    let out = refine(policy, |prec| qr_at(knot, p, r, prec), |z| z.clone())?;
    let raw = out.value;
    let reduced = PrecComplex::new(raw.re.clone(), reduce_mod_pi2(&raw.im, target_cs));
    Ok(QrValue { raw, reduced, prec: out.prec, verified_digits: out.verified_digits })
}

/// [`qr_with_target`] using the built-in target for tabulated surgeries.
pub fn qr(knot: Knot, p: i64, r: i64, policy: &PrecisionPolicy) -> Result<QrValue> {
    qr_with_target(knot, p, r, surgery_target(knot, p).map(|t| t.1), policy)
}
