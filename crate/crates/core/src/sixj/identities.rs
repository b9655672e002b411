//! Numerical checkers for the orthogonality and Biedenharn-Elliot identities
//! and for the tetrahedral symmetries of the 6j-symbol.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;

use super::{admissible_twice, sixj, Color, Phased, SixTuple, SixjCache, GENERATORS};
use crate::arith::PrecComplex;
use crate::error::{Error, Result};

fn tw(c: Color) -> u32 {
    c.twice() as u32
}

fn product(parts: &[&Phased], prec: u32) -> Phased {
    let mut mag = Float::with_val(prec, 1);
    let mut quarter = 0u8;
    for p in parts {
        mag *= &p.mag;
        quarter += p.quarter;
    }
    Phased { mag, quarter: quarter % 4 }
}

fn accumulate(acc: &mut PrecComplex, p: &Phased) {
    match p.quarter % 4 {
        0 => acc.re += &p.mag,
        1 => acc.im += &p.mag,
        2 => acc.re -= &p.mag,
        _ => acc.im -= &p.mag,
    }
}

fn sub_phased(acc: &mut PrecComplex, p: &Phased) {
    let neg = Phased { mag: p.mag.clone(), quarter: (p.quarter + 2) % 4 };
    accumulate(acc, &neg);
}

/// `|Σ_s w_s w_m {i j m; k l s}{i j n; k l s} − δ_mn|`.
pub fn check_orthogonality(c: [Color; 6], cache: &SixjCache) -> Result<Float> {
    let [i, j, k, l, m, n] = c;
    let root = cache.root();
    let r = root.r();
    let prec = root.prec();
    let pre = [(i, j, m), (i, j, n), (k, l, m), (k, l, n)];
    if !pre.iter().all(|&(a, b, c)| admissible_twice(tw(a), tw(b), tw(c), r)) {
        return Err(Error::InadmissibleInput(format!("orthogonality at {:?}", c.map(tw))));
    }
    let w = root.weight_table();
    let mut acc = PrecComplex::zero(prec);
    for s in 0..=root.max_twice() {
        let s = Color::from_twice(s);
        let a = SixTuple([i, j, m, k, l, s]);
        let b = SixTuple([i, j, n, k, l, s]);
        if !(a.is_admissible(r) && b.is_admissible(r)) {
            continue;
        }
        let x = cache.get(&a)?;
        let y = cache.get(&b)?;
        let mut p = product(&[&x, &y], prec);
        p.mag *= &w[s.twice() as usize];
        p.mag *= &w[m.twice() as usize];
        accumulate(&mut acc, &p);
    }
    if m == n {
        acc.re -= 1;
    }
    Ok(acc.abs())
}

/// `|Σ_s w_s {i j q; m l s}{j k o; n m s}{k i p; l n s} − {o p q; i j k}{o p q; l m n}|`.
pub fn check_biedenharn_elliot(c: [Color; 9], cache: &SixjCache) -> Result<Float> {
    let [i, j, k, l, m, n, o, p, q] = c;
    let root = cache.root();
    let r = root.r();
    let prec = root.prec();
    let lhs_a = SixTuple([o, p, q, i, j, k]);
    let lhs_b = SixTuple([o, p, q, l, m, n]);
    if !(lhs_a.is_admissible(r) && lhs_b.is_admissible(r)) {
        return Err(Error::InadmissibleInput(format!("Biedenharn-Elliot at {:?}", c.map(tw))));
    }
    let w = root.weight_table();
    let mut acc = PrecComplex::zero(prec);
    for s in 0..=root.max_twice() {
        let s = Color::from_twice(s);
        let a = SixTuple([i, j, q, m, l, s]);
        let b = SixTuple([j, k, o, n, m, s]);
        let d = SixTuple([k, i, p, l, n, s]);
        if !(a.is_admissible(r) && b.is_admissible(r) && d.is_admissible(r)) {
            continue;
        }
        let (x, y, z) = (cache.get(&a)?, cache.get(&b)?, cache.get(&d)?);
        let mut t = product(&[&x, &y, &z], prec);
        t.mag *= &w[s.twice() as usize];
        accumulate(&mut acc, &t);
    }
    let rhs = product(&[&cache.get(&lhs_a)?, &cache.get(&lhs_b)?], prec);
    sub_phased(&mut acc, &rhs);
    Ok(acc.abs())
}

/// How inputs are chosen by the `verify_*` drivers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Exhaustive,
    Random { samples: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub checked: u64,
    pub max_residual: Float,
    /// Twice-colors of the input with the largest residual.
    pub worst: Option<Vec<u16>>,
}

impl IdentityReport {
    fn empty(prec: u32) -> Self {
        IdentityReport { checked: 0, max_residual: Float::new(prec), worst: None }
    }

    fn merge(mut self, other: IdentityReport) -> Self {
        self.checked += other.checked;
        if other.max_residual > self.max_residual || self.worst.is_none() {
            if other.worst.is_some() {
                self.max_residual = other.max_residual;
                self.worst = other.worst;
            }
        }
        self
    }

    fn record(&mut self, residual: Float, input: Vec<u16>) {
        self.checked += 1;
        if self.worst.is_none() || residual > self.max_residual {
            self.max_residual = residual;
            self.worst = Some(input);
        }
    }
}

fn admissible_triples(r: u32) -> Vec<[u32; 3]> {
    let max = r - 2;
    let mut out = Vec::new();
    for a in 0..=max {
        for b in 0..=max {
            for c in 0..=max {
                if admissible_twice(a, b, c, r) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

const MAX_ATTEMPTS_PER_SAMPLE: usize = 1_000_000;

fn draw<const N: usize>(
    rng: &mut ChaCha8Rng,
    r: u32,
    accept: impl Fn(&[Color; N]) -> bool,
) -> Result<[Color; N]> {
    for _ in 0..MAX_ATTEMPTS_PER_SAMPLE {
        let c: [Color; N] = std::array::from_fn(|_| Color::from_twice(rng.gen_range(0..=(r - 2) as u16)));
        if accept(&c) {
            return Ok(c);
        }
    }
    Err(Error::InvalidArgument(format!("no admissible sample found at r={r}")))
}

fn orthogonality_ok(c: &[Color; 6], r: u32) -> bool {
    let [i, j, k, l, m, n] = c.map(tw);
    admissible_twice(i, j, m, r)
        && admissible_twice(i, j, n, r)
        && admissible_twice(k, l, m, r)
        && admissible_twice(k, l, n, r)
}

fn be_ok(c: &[Color; 9], r: u32) -> bool {
    let [i, j, k, l, m, n, o, p, q] = *c;
    SixTuple([o, p, q, i, j, k]).is_admissible(r) && SixTuple([o, p, q, l, m, n]).is_admissible(r)
}

pub fn verify_orthogonality(cache: &SixjCache, sampling: Sampling) -> Result<IdentityReport> {
    let r = cache.root().r();
    let prec = cache.root().prec();
    match sampling {
        Sampling::Exhaustive => {
            let triples = admissible_triples(r);
            triples
                .par_iter()
                .map(|&[i, j, m]| {
                    let mut rep = IdentityReport::empty(prec);
                    for &[k, l, m2] in &triples {
                        if m2 != m {
                            continue;
                        }
                        for n in 0..=r - 2 {
                            let c = [i, j, k, l, m, n].map(|t| Color::from_twice(t as u16));
                            if orthogonality_ok(&c, r) {
                                let res = check_orthogonality(c, cache)?;
                                rep.record(res, c.map(|x| x.twice()).to_vec());
                            }
                        }
                    }
                    Ok(rep)
                })
                .try_reduce(|| IdentityReport::empty(prec), |a, b| Ok(a.merge(b)))
        }
        Sampling::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rep = IdentityReport::empty(prec);
            for _ in 0..samples {
                let c = draw::<6>(&mut rng, r, |c| orthogonality_ok(c, r))?;
                let res = check_orthogonality(c, cache)?;
                rep.record(res, c.map(|x| x.twice()).to_vec());
            }
            Ok(rep)
        }
    }
}

/// Exhaustive mode enumerates admissible `(o,p,q,i,j,k)` grouped by
/// `(o,p,q)` and pairs every two completions of the same prefix.
pub fn verify_biedenharn_elliot(cache: &SixjCache, sampling: Sampling) -> Result<IdentityReport> {
    let r = cache.root().r();
    let prec = cache.root().prec();
    match sampling {
        Sampling::Exhaustive => {
            let max = (r - 2) as u16;
            let prefixes: Vec<[u16; 3]> =
                admissible_triples(r).into_iter().map(|t| t.map(|x| x as u16)).collect();
            prefixes
                .par_iter()
                .map(|&[o, p, q]| {
                    let mut completions = Vec::new();
                    for a in 0..=max {
                        for b in 0..=max {
                            for d in 0..=max {
                                let st = SixTuple::from_twice([o, p, q, a, b, d]);
                                if st.is_admissible(r) {
                                    completions.push([a, b, d]);
                                }
                            }
                        }
                    }
                    let mut rep = IdentityReport::empty(prec);
                    for &[i, j, k] in &completions {
                        for &[l, m, n] in &completions {
                            let c = [i, j, k, l, m, n, o, p, q].map(Color::from_twice);
                            let res = check_biedenharn_elliot(c, cache)?;
                            rep.record(res, c.map(|x| x.twice()).to_vec());
                        }
                    }
                    Ok(rep)
                })
                .try_reduce(|| IdentityReport::empty(prec), |a, b| Ok(a.merge(b)))
        }
        Sampling::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rep = IdentityReport::empty(prec);
            for _ in 0..samples {
                let c = draw::<9>(&mut rng, r, |c| be_ok(c, r))?;
                let res = check_biedenharn_elliot(c, cache)?;
                rep.record(res, c.map(|x| x.twice()).to_vec());
            }
            Ok(rep)
        }
    }
}

/// Compares the uncached symbol at each admissible tuple with its images
/// under the generating symmetries.
pub fn verify_symmetry(cache: &SixjCache, sampling: Sampling) -> Result<IdentityReport> {
    let root = cache.root();
    let r = root.r();
    let prec = root.prec();
    let check = |st: SixTuple| -> Result<Float> {
        let base = sixj(&st, root)?;
        let mut worst = Float::new(prec);
        for g in GENERATORS.iter() {
            let d = (&base - &sixj(&st.permuted(g), root)?).abs();
            if d > worst {
                worst = d;
            }
        }
        Ok(worst)
    };
    match sampling {
        Sampling::Exhaustive => {
            let max = (r - 2) as u16;
            let prefixes: Vec<[u16; 3]> =
                admissible_triples(r).into_iter().map(|t| t.map(|x| x as u16)).collect();
            prefixes
                .par_iter()
                .map(|&[i, j, k]| {
                    let mut rep = IdentityReport::empty(prec);
                    for l in 0..=max {
                        for m in 0..=max {
                            for n in 0..=max {
                                let st = SixTuple::from_twice([i, j, k, l, m, n]);
                                if st.is_admissible(r) {
                                    rep.record(check(st)?, st.twice().to_vec());
                                }
                            }
                        }
                    }
                    Ok(rep)
                })
                .try_reduce(|| IdentityReport::empty(prec), |a, b| Ok(a.merge(b)))
        }
        Sampling::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rep = IdentityReport::empty(prec);
            for _ in 0..samples {
                let c = draw::<6>(&mut rng, r, |c| SixTuple(*c).is_admissible(r))?;
                let st = SixTuple(c);
                rep.record(check(st)?, st.twice().to_vec());
            }
            Ok(rep)
        }
    }
}
