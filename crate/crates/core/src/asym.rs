//! Series of invariants over `r`, the correction term `Φ_r`, and
//! least-squares fits of `Φ_r` against `ln(r − 2)`.

use rug::Float;

use crate::arith::{pi, PrecComplex};
use crate::error::{Error, Result};
use crate::statesum::{qv, tv_with, EvalOptions};
use crate::tri::ColoredTriangulation;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SeriesKind {
    /// `QV_r`.
    Qv,
    /// `TV_r` at `q = e^{kπ√−1/r}`.
    Tv { k: i64 },
    /// `Φ_r` for the given volume.
    Phi { vol: f64 },
}

#[derive(Clone, Debug)]
pub struct SeriesPoint {
    pub r: i64,
    pub value: Result<PrecComplex>,
    pub verified_digits: u32,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<SeriesPoint>,
}

impl Series {
    pub fn failed(&self) -> usize {
        self.points.iter().filter(|p| p.value.is_err()).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub n_points: usize,
}

/// `Φ_r = ln|TV_r| − (r−2)/(2π)·vol` at `q = e^{2π√−1/r}`.
pub fn phi(ct: &ColoredTriangulation, r: i64, vol: f64, opts: &EvalOptions) -> Result<(Float, u32)> {
    let v = qv(ct, r, opts)?;
    let prec = v.tv.prec;
    let ln = Float::with_val(prec, v.tv.re.abs_ref()).ln();
    let corr = Float::with_val(prec, r - 2) * Float::with_val(prec, vol) / (pi(prec) * 2u32);
    Ok((ln - corr, v.tv.verified_digits))
}

fn point(ct: &ColoredTriangulation, r: i64, kind: SeriesKind, opts: &EvalOptions) -> SeriesPoint {
    let res = match kind {
        SeriesKind::Qv => qv(ct, r, opts).map(|v| (v.qv, v.tv.verified_digits)),
        SeriesKind::Tv { k } => tv_with(ct, r, k, opts).map(|v| {
            let d = v.verified_digits;
            (v.as_complex(), d)
        }),
        SeriesKind::Phi { vol } => phi(ct, r, vol, opts).map(|(f, d)| (PrecComplex::from_real(f), d)),
    };
    match res {
        Ok((value, d)) => SeriesPoint { r, value: Ok(value), verified_digits: d },
        Err(e) => SeriesPoint { r, value: Err(e), verified_digits: 0 },
    }
}

/// Evaluates `kind` at each `r` in increasing order. A failing point is kept
/// with its error; `on_point` sees every point as soon as it is computed.
pub fn series(
    ct: &ColoredTriangulation,
    r_list: &[i64],
    kind: SeriesKind,
    opts: &EvalOptions,
    mut on_point: impl FnMut(&SeriesPoint),
) -> Series {
    let mut rs = r_list.to_vec();
    rs.sort_unstable();
    rs.dedup();
    let mut points = Vec::with_capacity(rs.len());
    for r in rs {
        let p = point(ct, r, kind, opts);
        on_point(&p);
        points.push(p);
    }
    Series { label: ct.name.clone(), points }
}

/// Ordinary least squares of `y` against `ln(r − 2)`.
pub fn fit_logline(points: &[(i64, f64)]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!("need at least 2 points, got {}", points.len())));
    }
    if let Some(&(r, _)) = points.iter().find(|(r, _)| *r <= 2) {
        return Err(Error::DegenerateFit(format!("ln(r-2) undefined at r={r}")));
    }
    let xs: Vec<f64> = points.iter().map(|&(r, _)| ((r - 2) as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    Ok(FitResult { slope, intercept, rms_residual: (ss / n).sqrt(), n_points: xs.len() })
}

/// Fits the real parts of the successful points; returns the fit and the
/// number of excluded (failed) points.
pub fn fit_series(s: &Series) -> Result<(FitResult, usize)> {
    let pts: Vec<(i64, f64)> =
        s.points.iter().filter_map(|p| p.value.as_ref().ok().map(|v| (p.r, v.re.to_f64()))).collect();
    Ok((fit_logline(&pts)?, s.failed()))
}
