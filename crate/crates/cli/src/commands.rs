use std::io::{self, Write};
use std::time::Instant;

use qtv_core::asym::fit_logline;
use qtv_core::jones::{qr, surgery_target, Knot};
use qtv_core::sixj::{verify_biedenharn_elliot, verify_orthogonality, verify_symmetry, Sampling, SixjCache};
use qtv_core::statesum::{qv, tv_with, EvalOptions};
use qtv_core::tri::{census, parse, ColoredTriangulation};
use qtv_core::{make_root, Error, PrecisionPolicy};
use rug::Float;

use crate::cache::{self, Cache};
use crate::range::parse_r_list;
use crate::record::{fmt_sig, Cell, Format, Record, Sink};
use crate::{Common, Identity, Source};

const RESIDUAL_DIGITS: u32 = 3;
const FIT_DIGITS: u32 = 10;
const DEFAULT_BITS: u32 = 256;

fn initial_bits() -> Result<u32, String> {
    match std::env::var("QTV_PRECISION_BITS") {
        Ok(v) => match v.trim().parse::<u32>() {
            Ok(b) if b >= 32 => Ok(b),
            _ => Err(format!("QTV_PRECISION_BITS must be an integer >= 32, got `{v}`")),
        },
        Err(_) => Ok(DEFAULT_BITS),
    }
}

fn eval_options(c: &Common) -> Result<EvalOptions, String> {
    if c.digits == 0 {
        return Err("--digits must be positive".into());
    }
    if c.threads == 0 {
        return Err("--threads must be positive".into());
    }
    let bits = initial_bits()?;
    if bits > c.max_prec {
        return Err(format!("initial precision {bits} exceeds --max-prec {}", c.max_prec));
    }
    let policy = PrecisionPolicy { initial_bits: bits, max_bits: c.max_prec, digits: c.digits };
    Ok(EvalOptions { policy, threads: c.threads })
}

fn r_list(s: &str) -> Result<Vec<i64>, String> {
    let rs = parse_r_list(s).map_err(|e| format!("--r: {e}"))?;
    if rs.is_empty() {
        return Err("--r: empty range".into());
    }
    Ok(rs)
}

fn require_odd(rs: &[i64], min: i64, what: &str) -> Result<(), String> {
    match rs.iter().find(|&&r| r < min || r % 2 == 0) {
        Some(r) => Err(format!("{what} needs odd r >= {min}, got {r}")),
        None => Ok(()),
    }
}

fn load(source: &Source) -> Result<(ColoredTriangulation, Option<f64>), String> {
    match (&source.census, &source.file) {
        (Some(name), None) => census(name).map(|(ct, m)| (ct, m.map(|m| m.vol))).map_err(|e| e.to_string()),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse(&text).map(|ct| (ct, None)).map_err(|e| format!("{}: {e}", path.display()))
        }
        _ => Err("exactly one of --census and --file is required".into()),
    }
}

/// Structure only; the manifold's name does not affect its invariants.
fn structure_key(ct: &ColoredTriangulation) -> String {
    let mut s = format!("edges {}", ct.num_edge_classes);
    for t in &ct.tets {
        s.push_str(&format!(";{t:?}"));
    }
    s
}

fn open_cache(c: &Common) -> Result<Option<Cache>, String> {
    c.cache.as_ref().map(|d| Cache::open(d).map_err(|e| format!("cache {}: {e}", d.display()))).transpose()
}

fn report_cache(c: &Option<Cache>) {
    if let Some(c) = c {
        eprintln!("qtv: cache: {} hits, {} misses", c.hits, c.misses);
    }
}

fn io_err(e: io::Error) -> String {
    format!("writing output: {e}")
}

/// Looks `key` up in the cache or computes the record, stamping `elapsed_ms`.
fn cached(cache: &mut Option<Cache>, key: &str, no_timing: bool, compute: impl FnOnce() -> Record) -> Record {
    if let Some(rec) = cache.as_mut().and_then(|c| c.get(key)) {
        let mut rec = rec;
        rec.set("elapsed_ms", if no_timing { Cell::Empty } else { Cell::Int(0) });
        return rec;
    }
    let start = Instant::now();
    let mut rec = compute();
    let ok = matches!(rec.get("error"), Some(Cell::Empty));
    if let (Some(c), true) = (cache.as_ref(), ok) {
        if let Err(e) = c.put(key, &rec) {
            eprintln!("qtv: warning: cache write failed: {e}");
        }
    }
    let ms = start.elapsed().as_millis() as i64;
    rec.set("elapsed_ms", if no_timing { Cell::Empty } else { Cell::Int(ms) });
    rec
}

fn tv_record(ct: &ColoredTriangulation, r: i64, k: i64, opts: &EvalOptions) -> Record {
    let want = opts.policy.digits;
    let mut rec = Record::default();
    rec.push("r", Cell::Int(r)).push("k", Cell::Int(k));
    let outcome = if k == 2 && r % 2 == 1 {
        match qv(ct, r, opts) {
            Ok(v) => Ok((v.tv, Some(v.qv))),
            Err(Error::LogOfZero) => tv_with(ct, r, k, opts).map(|tv| (tv, None)),
            Err(e) => Err(e),
        }
    } else {
        tv_with(ct, r, k, opts).map(|tv| (tv, None))
    };
    match outcome {
        Ok((tv, q)) => {
            let d = tv.verified_digits.min(want);
            rec.push("tv_re", Cell::Num(fmt_sig(&tv.re, d)));
            rec.push("tv_im_residual", Cell::Num(fmt_sig(&tv.im, RESIDUAL_DIGITS)));
            match q {
                Some(q) => {
                    rec.push("qv_re", Cell::Num(fmt_sig(&q.re, d)));
                    rec.push("qv_im", Cell::Num(fmt_sig(&q.im, d)));
                }
                None => {
                    rec.push("qv_re", Cell::Empty).push("qv_im", Cell::Empty);
                }
            }
            rec.push("verified_digits", Cell::Int(tv.verified_digits as i64));
            rec.push("elapsed_ms", Cell::Empty).push("error", Cell::Empty);
        }
        Err(e) => {
            for f in ["tv_re", "tv_im_residual", "qv_re", "qv_im", "verified_digits", "elapsed_ms"] {
                rec.push(f, Cell::Empty);
            }
            rec.push("error", Cell::Text(e.to_string()));
        }
    }
    rec
}

fn tv_key(ct: &ColoredTriangulation, r: i64, k: i64, digits: u32) -> String {
    cache::key(&["tv", &structure_key(ct), &r.to_string(), &k.to_string(), &digits.to_string()])
}

pub fn tv(source: &Source, common: &Common, k: i64, qv_only: bool) -> Result<u8, String> {
    let opts = eval_options(common)?;
    let rs = r_list(&common.r)?;
    if qv_only {
        require_odd(&rs, 3, "qv")?;
    }
    let (ct, _) = load(source)?;
    let mut cache = open_cache(common)?;
    let mut sink = Sink::new(common.format, io::stdout().lock());
    let mut failed = 0;
    for &r in &rs {
        let key = tv_key(&ct, r, k, opts.policy.digits);
        let rec = cached(&mut cache, &key, common.no_timing, || tv_record(&ct, r, k, &opts));
        if !matches!(rec.get("error"), Some(Cell::Empty)) {
            failed += 1;
        }
        sink.emit(&rec).map_err(io_err)?;
    }
    sink.finish().map_err(io_err)?;
    report_cache(&cache);
    Ok(if failed > 0 { 2 } else { 0 })
}

fn rt_record(knot: Knot, p: i64, r: i64, policy: &PrecisionPolicy) -> Record {
    let mut rec = Record::default();
    rec.push("r", Cell::Int(r));
    let res = qr(knot, p, r, policy);
    match &res {
        Ok(v) => {
            let d = v.verified_digits.min(policy.digits);
            rec.push("qr_re", Cell::Num(fmt_sig(&v.reduced.re, d)));
            rec.push("qr_im", Cell::Num(fmt_sig(&v.reduced.im, d)));
            rec.push("qr_im_raw", Cell::Num(fmt_sig(&v.raw.im, d)));
        }
        Err(_) => {
            rec.push("qr_re", Cell::Empty).push("qr_im", Cell::Empty).push("qr_im_raw", Cell::Empty);
        }
    }
    let target = surgery_target(knot, p);
    rec.push("target_vol", target.map_or(Cell::Empty, |t| Cell::Num(t.0.to_string())));
    rec.push("target_cs", target.map_or(Cell::Empty, |t| Cell::Num(t.1.to_string())));
    match res {
        Ok(v) => {
            rec.push("verified_digits", Cell::Int(v.verified_digits as i64));
            rec.push("elapsed_ms", Cell::Empty).push("error", Cell::Empty);
        }
        Err(e) => {
            rec.push("verified_digits", Cell::Empty).push("elapsed_ms", Cell::Empty);
            rec.push("error", Cell::Text(e.to_string()));
        }
    }
    rec
}

pub fn rt(knot: Knot, p: i64, common: &Common) -> Result<u8, String> {
    if p == 0 {
        return Err("--p must be nonzero".into());
    }
    let policy = eval_options(common)?.policy;
    let rs = r_list(&common.r)?;
    require_odd(&rs, 7, "rt")?;
    let mut cache = open_cache(common)?;
    let mut sink = Sink::new(common.format, io::stdout().lock());
    let mut failed = 0;
    for &r in &rs {
        let key = cache::key(&["rt", knot.name(), &p.to_string(), &r.to_string(), &policy.digits.to_string()]);
        let rec = cached(&mut cache, &key, common.no_timing, || rt_record(knot, p, r, &policy));
        if !matches!(rec.get("error"), Some(Cell::Empty)) {
            failed += 1;
        }
        sink.emit(&rec).map_err(io_err)?;
    }
    sink.finish().map_err(io_err)?;
    report_cache(&cache);
    Ok(if failed > 0 { 2 } else { 0 })
}

pub fn verify(
    identity: Identity,
    r_arg: &str,
    k: i64,
    sampling: Sampling,
    threshold: f64,
    format: Format,
    no_timing: bool,
) -> Result<u8, String> {
    let rs = r_list(r_arg)?;
    let bits = initial_bits()?;
    let roots = rs.iter().map(|&r| make_root(r, k, bits)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let thr = Float::with_val(bits, threshold);
    let mut sink = Sink::new(format, io::stdout().lock());
    let mut failed = 0;
    for root in roots {
        let start = Instant::now();
        let cache = SixjCache::new(root.clone());
        let res = match identity {
            Identity::Orthogonality => verify_orthogonality(&cache, sampling),
            Identity::Be => verify_biedenharn_elliot(&cache, sampling),
            Identity::Symmetry => verify_symmetry(&cache, sampling),
        };
        let mut rec = Record::default();
        rec.push("r", Cell::Int(root.r() as i64)).push("k", Cell::Int(root.k() as i64));
        rec.push("identity", Cell::Text(format!("{identity:?}").to_lowercase()));
        let mode = match sampling {
            Sampling::Exhaustive => "exhaustive".to_string(),
            Sampling::Random { samples, seed } => format!("random:{samples}:{seed}"),
        };
        rec.push("sampling", Cell::Text(mode));
        let pass = match &res {
            Ok(rep) => {
                let pass = rep.max_residual < thr;
                let worst = rep.worst.as_ref().map(|w| w.iter().map(u16::to_string).collect::<Vec<_>>().join(" "));
                rec.push("checked", Cell::Int(rep.checked as i64));
                rec.push("max_residual", Cell::Num(fmt_sig(&rep.max_residual, RESIDUAL_DIGITS)));
                rec.push("threshold", Cell::Num(format!("{threshold:e}")));
                rec.push("pass", Cell::Bool(pass));
                rec.push("worst_twice_colors", worst.map_or(Cell::Empty, Cell::Text));
                pass
            }
            Err(_) => {
                for f in ["checked", "max_residual", "threshold", "pass", "worst_twice_colors"] {
                    rec.push(f, Cell::Empty);
                }
                false
            }
        };
        let ms = start.elapsed().as_millis() as i64;
        rec.push("elapsed_ms", if no_timing { Cell::Empty } else { Cell::Int(ms) });
        rec.push("error", res.err().map_or(Cell::Empty, |e| Cell::Text(e.to_string())));
        if !pass {
            failed += 1;
        }
        sink.emit(&rec).map_err(io_err)?;
    }
    sink.finish().map_err(io_err)?;
    Ok(if failed > 0 { 2 } else { 0 })
}

/// `Φ_r` from a `tv` record's printed `tv_re`.
fn phi_from(rec: &Record, r: i64, vol: f64) -> Option<f64> {
    let Some(Cell::Num(s)) = rec.get("tv_re") else { return None };
    let tv = Float::with_val(256, Float::parse(s).ok()?);
    if tv.is_zero() {
        return None;
    }
    let ln = tv.abs().ln().to_f64();
    Some(ln - (r - 2) as f64 * vol / (2.0 * std::f64::consts::PI))
}

pub fn fit(source: &Source, common: &Common, vol: Option<f64>) -> Result<u8, String> {
    let opts = eval_options(common)?;
    let mut rs = r_list(&common.r)?;
    require_odd(&rs, 3, "fit")?;
    rs.sort_unstable();
    rs.dedup();
    let (ct, census_vol) = load(source)?;
    let vol = vol.or(census_vol).ok_or("no volume known for this manifold; pass --vol")?;
    let mut cache = open_cache(common)?;
    let start = Instant::now();
    let mut pts = Vec::new();
    let mut excluded = 0;
    for &r in &rs {
        let key = tv_key(&ct, r, 2, opts.policy.digits);
        let rec = cached(&mut cache, &key, true, || tv_record(&ct, r, 2, &opts));
        match phi_from(&rec, r, vol) {
            Some(phi) => pts.push((r, phi)),
            None => {
                excluded += 1;
                if let Some(Cell::Text(e)) = rec.get("error") {
                    eprintln!("qtv: r={r} excluded: {e}");
                }
            }
        }
    }
    report_cache(&cache);
    let f = fit_logline(&pts).map_err(|e| e.to_string())?;
    let num = |x: f64| Cell::Num(fmt_sig(&Float::with_val(64, x), FIT_DIGITS));
    let mut rec = Record::default();
    let name = if ct.name.is_empty() { source.census.clone().unwrap_or_default() } else { ct.name.clone() };
    rec.push("manifold", Cell::Text(name)).push("vol", Cell::Num(vol.to_string()));
    rec.push("slope", num(f.slope)).push("intercept", num(f.intercept)).push("rms_residual", num(f.rms_residual));
    rec.push("n_points", Cell::Int(f.n_points as i64)).push("excluded", Cell::Int(excluded));
    let ms = start.elapsed().as_millis() as i64;
    rec.push("elapsed_ms", if common.no_timing { Cell::Empty } else { Cell::Int(ms) });
    let mut sink = Sink::new(common.format, io::stdout().lock());
    sink.emit(&rec).map_err(io_err)?;
    sink.finish().map_err(io_err)?;
    io::stdout().flush().map_err(io_err)?;
    Ok(if excluded > 0 { 2 } else { 0 })
}
