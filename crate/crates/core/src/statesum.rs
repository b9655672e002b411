//! The Turaev-Viro state sum over admissible colorings of an ideal
//! triangulation, a brute-force oracle for it, and the growth rate `QV_r`.

use rayon::prelude::*;
use rug::{Assign, Float};

use crate::arith::{
    make_root, pi, principal_log, quantum_int, refine, InvariantValue, PrecComplex, PrecisionPolicy, RootSpec,
};
use crate::error::{Error, Result};
use crate::sixj::{admissible_twice, sixj, Color, SixTuple, SixjCache};
use crate::tri::ColoredTriangulation;

/// Face triples of a tetrahedron as slot indices into `(e12, …, e14)`.
const FACES: [[usize; 3]; 4] = [[0, 1, 2], [1, 3, 5], [0, 4, 5], [2, 3, 4]];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub policy: PrecisionPolicy,
    /// Worker threads for the partitioned sum. The result does not depend on it.
    pub threads: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { policy: PrecisionPolicy::default(), threads: 1 }
    }
}

/// Compensated (Neumaier) running sum.
struct Neumaier {
    sum: Float,
    comp: Float,
    tmp: Float,
}

impl Neumaier {
    fn new(prec: u32) -> Self {
        Neumaier { sum: Float::new(prec), comp: Float::new(prec), tmp: Float::new(prec) }
    }

    fn add(&mut self, x: &Float, negate: bool) {
        let prec = self.sum.prec();
        let x = if negate { Float::with_val(prec, -x) } else { Float::with_val(prec, x) };
        self.tmp.assign(&self.sum + &x);
        if self.sum.cmp_abs(&x).map_or(true, |o| o.is_ge()) {
            self.comp += Float::with_val(prec, &self.sum - &self.tmp) + &x;
        } else {
            self.comp += Float::with_val(prec, &x - &self.tmp) + &self.sum;
        }
        std::mem::swap(&mut self.sum, &mut self.tmp);
    }

    fn total(&self) -> Float {
        Float::with_val(self.sum.prec(), &self.sum + &self.comp)
    }
}

/// Static enumeration plan: class order and, per depth, the face triples
/// and tetrahedra that become fully colored at that depth.
struct Plan {
    order: Vec<usize>,
    triples: Vec<Vec<[usize; 3]>>,
    tets: Vec<Vec<[usize; 6]>>,
}

impl Plan {
    fn new(ct: &ColoredTriangulation) -> Plan {
        let mult = ct.multiplicities();
        let mut order: Vec<usize> = (0..ct.num_edge_classes).collect();
        order.sort_by(|&a, &b| mult[b].cmp(&mult[a]).then(a.cmp(&b)));
        let mut pos = vec![0; order.len()];
        for (d, &c) in order.iter().enumerate() {
            pos[c] = d;
        }
        let e = order.len();
        let mut triples = vec![Vec::new(); e];
        let mut tets = vec![Vec::new(); e];
        for tet in &ct.tets {
            let cls = tet.map(|c| c as usize);
            for f in FACES {
                let mut t = f.map(|s| cls[s]);
                t.sort_unstable();
                let d = t.iter().map(|&c| pos[c]).max().unwrap();
                if !triples[d].contains(&t) {
                    triples[d].push(t);
                }
            }
            let d = cls.iter().map(|&c| pos[c]).max().unwrap();
            tets[d].push(cls);
        }
        Plan { order, triples, tets }
    }
}

/// Per-partition accumulators: real part (phases 0, 2) and imaginary part
/// (phases 1, 3).
struct Partial {
    re: Neumaier,
    im: Neumaier,
}

fn run_partition(plan: &Plan, cache: &SixjCache, first: u16) -> Result<(Float, Float)> {
    let root = cache.root();
    let r = root.r();
    let prec = root.prec();
    let max = root.max_twice();
    let e = plan.order.len();
    let w = root.weight_table();
    let mut colors = vec![0u16; e];
    let mut mags: Vec<Float> = (0..=e).map(|_| Float::with_val(prec, 1)).collect();
    let mut quarters = vec![0u8; e + 1];
    let mut next = vec![0u16; e];
    let mut acc = Partial { re: Neumaier::new(prec), im: Neumaier::new(prec) };

    // Explicit stack: `next[d]` is the next color to try at depth d.
    let mut d = 0usize;
    next[0] = first;
    loop {
        let limit = if d == 0 { first } else { max };
        if next[d] > limit {
            if d == 0 {
                break;
            }
            d -= 1;
            continue;
        }
        let c = next[d];
        next[d] += 1;
        let class = plan.order[d];
        colors[class] = c;
        let ok = plan.triples[d].iter().all(|t| {
            admissible_twice(colors[t[0]] as u32, colors[t[1]] as u32, colors[t[2]] as u32, r)
        });
        if !ok {
            continue;
        }
        let (lo, hi) = mags.split_at_mut(d + 1);
        let m = &mut hi[0];
        m.assign(&lo[d] * &w[c as usize]);
        let mut q = quarters[d];
        for tet in &plan.tets[d] {
            let st = SixTuple(tet.map(|x| Color::from_twice(colors[x])));
            cache.with(&st, |p| {
                *m *= &p.mag;
                q += p.quarter;
            })?;
        }
        quarters[d + 1] = q % 4;
        if d + 1 == e {
            let m = &mags[e];
            match quarters[e] {
                0 => acc.re.add(m, false),
                1 => acc.im.add(m, false),
                2 => acc.re.add(m, true),
                _ => acc.im.add(m, true),
            }
        } else {
            d += 1;
            next[d] = 0;
        }
    }
    Ok((acc.re.total(), acc.im.total()))
}

/// One evaluation of the state sum at the precision of `root`.
pub fn tv_fixed(ct: &ColoredTriangulation, root: &RootSpec, threads: usize) -> Result<PrecComplex> {
    let cache = SixjCache::new(root.clone());
    tv_fixed_cached(ct, &cache, threads)
}

/// Like [`tv_fixed`] with a caller-supplied 6j cache.
pub fn tv_fixed_cached(ct: &ColoredTriangulation, cache: &SixjCache, threads: usize) -> Result<PrecComplex> {
    if ct.tets.is_empty() {
        return Err(Error::EmptyTriangulation);
    }
    let plan = Plan::new(ct);
    let prec = cache.root().prec();
    let parts: Vec<u16> = (0..=cache.root().max_twice()).collect();
    let partials: Vec<Result<(Float, Float)>> = if threads <= 1 {
        parts.iter().map(|&c| run_partition(&plan, cache, c)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| parts.par_iter().map(|&c| run_partition(&plan, cache, c)).collect())
    };
    let mut re = Neumaier::new(prec);
    let mut im = Neumaier::new(prec);
    for p in partials {
        let (a, b) = p?;
        re.add(&a, false);
        im.add(&b, false);
    }
    Ok(PrecComplex::new(re.total(), im.total()))
}

/// Adaptive-precision state sum at `q = e^{kπi/r}`.
pub fn tv_with(ct: &ColoredTriangulation, r: i64, k: i64, opts: &EvalOptions) -> Result<InvariantValue> {
    let base = make_root(r, k, opts.policy.initial_bits)?;
    let out = refine(&opts.policy, |prec| tv_fixed(ct, &base.with_prec(prec), opts.threads), |z| z.clone())?;
    Ok(InvariantValue { re: out.value.re, im: out.value.im, prec: out.prec, verified_digits: out.verified_digits })
}

/// [`tv_with`] starting from the precision of `root`, single-threaded.
pub fn tv(ct: &ColoredTriangulation, root: &RootSpec) -> Result<InvariantValue> {
    let opts = EvalOptions {
        policy: PrecisionPolicy::default().with_initial_bits(root.prec()),
        threads: 1,
    };
    tv_with(ct, root.r() as i64, root.k() as i64, &opts)
}

pub const BRUTEFORCE_MAX_EDGES: usize = 5;
pub const BRUTEFORCE_MAX_R: u32 = 9;

fn bruteforce_fixed(ct: &ColoredTriangulation, root: &RootSpec) -> Result<PrecComplex> {
    let prec = root.prec();
    let n = root.max_twice() as usize + 1;
    let e = ct.num_edge_classes;
    let mut total = PrecComplex::zero(prec);
    let mut colors = vec![0u16; e];
    for idx in 0..n.pow(e as u32) {
        let mut x = idx;
        for c in colors.iter_mut() {
            *c = (x % n) as u16;
            x /= n;
        }
        let tuples: Vec<SixTuple> = ct
            .tets
            .iter()
            .map(|t| SixTuple(t.map(|x| Color::from_twice(colors[x as usize]))))
            .collect();
        if !tuples.iter().all(|st| st.is_admissible(root.r())) {
            continue;
        }
        let mut term = PrecComplex::one(prec);
        for &c in &colors {
            let mut w = quantum_int(c as i64 + 1, root);
            if c % 2 == 1 {
                w = -w;
            }
            term = term.scale(&w);
        }
        for st in &tuples {
            term = &term * &sixj(st, root)?;
        }
        total = &total + &term;
    }
    Ok(total)
}

/// Full Cartesian enumeration with the uncached complex 6j-symbol. Only for
/// small inputs; used to cross-check [`tv`].
pub fn tv_bruteforce(ct: &ColoredTriangulation, root: &RootSpec) -> Result<InvariantValue> {
    if ct.num_edge_classes > BRUTEFORCE_MAX_EDGES || root.r() > BRUTEFORCE_MAX_R {
        return Err(Error::TooLarge(format!(
            "E={} r={} (limits E<={BRUTEFORCE_MAX_EDGES}, r<={BRUTEFORCE_MAX_R})",
            ct.num_edge_classes,
            root.r()
        )));
    }
    if ct.tets.is_empty() {
        return Err(Error::EmptyTriangulation);
    }
    let policy = PrecisionPolicy::default().with_initial_bits(root.prec());
    let out = refine(&policy, |prec| bruteforce_fixed(ct, &root.with_prec(prec)), |z| z.clone())?;
    Ok(InvariantValue { re: out.value.re, im: out.value.im, prec: out.prec, verified_digits: out.verified_digits })
}

#[derive(Clone, Debug)]
pub struct QvValue {
    pub qv: PrecComplex,
    pub tv: InvariantValue,
}

/// `QV_r = 2π/(r−2) · log TV_r` at `q = e^{2πi/r}`. A negative `TV` gives
/// imaginary part `2π²/(r−2)`.
pub fn qv(ct: &ColoredTriangulation, r: i64, opts: &EvalOptions) -> Result<QvValue> {
    if r < 3 || r % 2 == 0 {
        return Err(Error::InvalidArgument(format!("QV needs odd r >= 3, got {r}")));
    }
    let tv = tv_with(ct, r, 2, opts)?;
    let prec = tv.prec;
    let tol = Float::with_val(prec, Float::i_exp(1, 0)) >> (3.33 * opts.policy.digits as f64) as i32;
    if tv.re.clone().abs() <= tol {
        return Err(Error::LogOfZero);
    }
    let log = principal_log(&PrecComplex::from_real(tv.re.clone()))?;
    let factor = Float::with_val(prec, pi(prec) * 2u32) / (r as u32 - 2);
    Ok(QvValue { qv: log.scale(&factor), tv })
}
