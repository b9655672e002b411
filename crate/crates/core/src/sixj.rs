//! Quantum 6j-symbols at a root of unity.
//!
//! Colors live in `I_r = {0, 1/2, …, (r-2)/2}` and are stored as twice-colors
//! so that every index computation is exact integer arithmetic. A 6-tuple
//! `(i, j, k, l, m, n)` has faces `(i,j,k)`, `(j,l,n)`, `(i,m,n)`, `(k,l,m)`
//! and quadrilaterals `i+j+l+m`, `i+k+l+n`, `j+k+m+n`.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use dashmap::DashMap;
use rug::Float;

use crate::arith::{quantum_factorial, signed_sqrt, PrecComplex, RootSpec};
use crate::error::{Error, Result};

pub mod identities;

pub use identities::{
    check_biedenharn_elliot, check_orthogonality, verify_biedenharn_elliot, verify_orthogonality,
    verify_symmetry, IdentityReport, Sampling,
};

/// An element of `I_r`, stored as twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Color(u16);

impl Color {
    pub const ZERO: Color = Color(0);

    pub const fn from_twice(twice: u16) -> Color {
        Color(twice)
    }

    /// Checked constructor: `0 ≤ twice ≤ r − 2`.
    pub fn new(twice: u32, r: u32) -> Result<Color> {
        if r < 3 || twice > r - 2 {
            return Err(Error::ColorOutOfRange { twice, r });
        }
        Ok(Color(twice as u16))
    }

    pub const fn twice(self) -> u16 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integral(self) -> bool {
        self.0 % 2 == 0
    }
}

/// Triangle inequalities, integral sum and `i + j + k ≤ r − 2`.
pub fn is_admissible_triple(i: Color, j: Color, k: Color, r: u32) -> bool {
    admissible_twice(i.0 as u32, j.0 as u32, k.0 as u32, r)
}

#[inline]
pub(crate) fn admissible_twice(a: u32, b: u32, c: u32, r: u32) -> bool {
    let s = a + b + c;
    a + b >= c && b + c >= a && c + a >= b && s % 2 == 0 && s <= 2 * (r - 2)
}

/// `(i, j, k, l, m, n)` in the positional convention of the 6j-symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SixTuple(pub [Color; 6]);

impl SixTuple {
    pub fn from_twice(t: [u16; 6]) -> SixTuple {
        SixTuple(t.map(Color::from_twice))
    }

    pub fn twice(&self) -> [u16; 6] {
        self.0.map(Color::twice)
    }

    /// The four face triples `(i,j,k)`, `(j,l,n)`, `(i,m,n)`, `(k,l,m)`.
    pub fn faces(&self) -> [[Color; 3]; 4] {
        let [i, j, k, l, m, n] = self.0;
        [[i, j, k], [j, l, n], [i, m, n], [k, l, m]]
    }

    pub fn is_admissible(&self, r: u32) -> bool {
        self.faces().iter().all(|f| is_admissible_triple(f[0], f[1], f[2], r))
    }

    /// `new[t] = old[perm[t]]`.
    pub fn permuted(&self, perm: &[usize; 6]) -> SixTuple {
        SixTuple(perm.map(|p| self.0[p]))
    }

    /// `(T_1..T_4, Q_1..Q_3)` as integers; only meaningful when admissible.
    fn face_and_quad_sums(&self) -> ([u32; 4], [u32; 3]) {
        let [i, j, k, l, m, n] = self.twice().map(u32::from);
        (
            [(i + j + k) / 2, (j + l + n) / 2, (i + m + n) / 2, (k + l + m) / 2],
            [(i + j + l + m) / 2, (i + k + l + n) / 2, (j + k + m + n) / 2],
        )
    }
}

// ---------------------------------------------------------------------------
// Symmetries
// ---------------------------------------------------------------------------

/// The equalities printed alongside the definition, as index permutations.
pub const GENERATORS: [[usize; 6]; 5] = [
    [1, 0, 2, 4, 3, 5], // (j,i,k,m,l,n)
    [0, 2, 1, 3, 5, 4], // (i,k,j,l,n,m)
    [0, 4, 5, 3, 1, 2], // (i,m,n,l,j,k)
    [3, 4, 2, 0, 1, 5], // (l,m,k,i,j,n)
    [3, 1, 5, 0, 4, 2], // (l,j,n,i,m,k)
];

/// Closure of [`GENERATORS`] under composition, identity first.
pub fn symmetry_group() -> &'static [[usize; 6]] {
    static GROUP: OnceLock<Vec<[usize; 6]>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let mut group = vec![[0, 1, 2, 3, 4, 5]];
        let mut frontier = group.clone();
        while let Some(p) = frontier.pop() {
            for g in GENERATORS.iter() {
                let composed = g.map(|t| p[t]);
                if !group.contains(&composed) {
                    group.push(composed);
                    frontier.push(composed);
                }
            }
        }
        group
    })
}

/// Lexicographically least member of the symmetry orbit of `st`.
pub fn canonical_key(st: &SixTuple) -> SixTuple {
    let t = st.twice();
    let mut best = t;
    for p in symmetry_group().iter().skip(1) {
        let cand = p.map(|x| t[x]);
        if cand < best {
            best = cand;
        }
    }
    SixTuple::from_twice(best)
}

// ---------------------------------------------------------------------------
// Δ, weights and the symbol itself
// ---------------------------------------------------------------------------

/// `Δ(i,j,k) = √([i+j−k]![j+k−i]![k+i−j]! / [i+j+k+1]!)` with the signed
/// square root convention; real or purely imaginary.
pub fn delta(i: Color, j: Color, k: Color, root: &RootSpec) -> Result<PrecComplex> {
    if !is_admissible_triple(i, j, k, root.r()) {
        return Err(Error::InadmissibleTriple(i.0, j.0, k.0));
    }
    let (a, b, c) = (i.0 as u32, j.0 as u32, k.0 as u32);
    let num = quantum_factorial((a + b - c) / 2, root)?
        * quantum_factorial((b + c - a) / 2, root)?
        * quantum_factorial((c + a - b) / 2, root)?;
    let den = quantum_factorial((a + b + c) / 2 + 1, root)?;
    Ok(signed_sqrt(&(num / den)))
}

/// `w_i = (−1)^{2i}[2i+1]`.
pub fn weight(i: Color, root: &RootSpec) -> Result<Float> {
    root.weight_table()
        .get(i.0 as usize)
        .cloned()
        .ok_or(Error::ColorOutOfRange { twice: i.0 as u32, r: root.r() })
}

/// A value `mag · (√−1)^quarter`.
#[derive(Clone, Debug, PartialEq)]
pub struct Phased {
    pub mag: Float,
    pub quarter: u8,
}

impl Phased {
    pub fn to_complex(&self) -> PrecComplex {
        let prec = self.mag.prec();
        let z = Float::new(prec);
        match self.quarter % 4 {
            0 => PrecComplex::new(self.mag.clone(), z),
            1 => PrecComplex::new(z, self.mag.clone()),
            2 => PrecComplex::new(-self.mag.clone(), z),
            _ => PrecComplex::new(z, -self.mag.clone()),
        }
    }
}

/// The quantum 6j-symbol, evaluated literally from the defining formula
/// (complex Δ factors, factorial quotients). No caching.
pub fn sixj(st: &SixTuple, root: &RootSpec) -> Result<PrecComplex> {
    let r = root.r();
    if !st.is_admissible(r) {
        return Err(Error::InadmissibleSixTuple(st.twice()));
    }
    let prec = root.prec();
    let [i, j, k, l, m, n] = st.0;
    let total: i64 = st.twice().iter().map(|&t| t as i64).sum();
    let mut pre = PrecComplex::i_pow(-total, prec);
    for [a, b, c] in [[i, j, k], [j, l, n], [i, m, n], [k, l, m]] {
        pre = &pre * &delta(a, b, c, root)?;
    }

    let (t, q) = st.face_and_quad_sums();
    let zmin = *t.iter().max().unwrap();
    let zmax = *q.iter().min().unwrap();
    let fact = root.fact_table();
    let mut sum = Float::new(prec);
    for z in zmin..=zmax {
        let mut den = Float::with_val(prec, 1);
        for &ti in &t {
            den *= &fact[(z - ti) as usize];
        }
        for &qj in &q {
            den *= &fact[(qj - z) as usize];
        }
        let term = Float::with_val(prec, &fact[(z + 1) as usize] / &den);
        if z % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(pre.scale(&sum))
}

/// Same value as [`sixj`] in `mag·(√−1)^quarter` form, using reciprocal
/// factorial tables and one square root. Terms with `z + 1 ≥ r` vanish
/// exactly and are skipped.
pub fn sixj_phased(st: &SixTuple, root: &RootSpec) -> Result<Phased> {
    let r = root.r();
    if !st.is_admissible(r) {
        return Err(Error::InadmissibleSixTuple(st.twice()));
    }
    let prec = root.prec();
    let fact = root.fact_table();
    let inv = root.inv_fact_table();
    let total: u32 = st.twice().iter().map(|&t| t as u32).sum();
    let mut quarter = (4 - total % 4) % 4;

    let mut radicand = Float::with_val(prec, 1);
    for f in st.faces() {
        let [a, b, c] = f.map(|x| x.0 as u32);
        radicand *= &fact[((a + b - c) / 2) as usize];
        radicand *= &fact[((b + c - a) / 2) as usize];
        radicand *= &fact[((c + a - b) / 2) as usize];
        radicand *= &inv[((a + b + c) / 2 + 1) as usize];
        if radicand.is_sign_negative() {
            quarter += 1;
            radicand = -radicand;
        }
    }
    let deltas = radicand.sqrt();

    let (t, q) = st.face_and_quad_sums();
    let zmin = *t.iter().max().unwrap();
    let zmax = (*q.iter().min().unwrap()).min(r - 2);
    let mut sum = Float::new(prec);
    let mut term = Float::new(prec);
    for z in zmin..=zmax {
        term.assign_from(&fact[(z + 1) as usize]);
        for &ti in &t {
            term *= &inv[(z - ti) as usize];
        }
        for &qj in &q {
            term *= &inv[(qj - z) as usize];
        }
        if z % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
    }
    Ok(Phased { mag: sum * deltas, quarter: (quarter % 4) as u8 })
}

trait AssignFrom {
    fn assign_from(&mut self, src: &Float);
}

impl AssignFrom for Float {
    #[inline]
    fn assign_from(&mut self, src: &Float) {
        use rug::Assign;
        self.assign(src);
    }
}

// ---------------------------------------------------------------------------
// Memoization
// ---------------------------------------------------------------------------

/// Per-root memo of 6j-symbols keyed by canonical twice-color tuples.
///
/// Concurrent readers and writers are allowed; a value may be computed more
/// than once under contention, and every writer stores the same bits.
pub struct SixjCache {
    root: RootSpec,
    map: DashMap<[u16; 6], Phased>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl SixjCache {
    pub fn new(root: RootSpec) -> SixjCache {
        SixjCache { root, map: DashMap::new(), hits: AtomicU64::new(0), misses: AtomicU64::new(0) }
    }

    pub fn root(&self) -> &RootSpec {
        &self.root
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    /// Runs `f` on the cached value without cloning it.
    pub fn with<R>(&self, st: &SixTuple, f: impl FnOnce(&Phased) -> R) -> Result<R> {
        let key = canonical_key(st).twice();
        if let Some(v) = self.map.get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(f(&v));
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let v = sixj_phased(&SixTuple::from_twice(key), &self.root)?;
        let out = f(&v);
        self.map.insert(key, v);
        Ok(out)
    }

    pub fn get(&self, st: &SixTuple) -> Result<Phased> {
        self.with(st, Phased::clone)
    }
}
