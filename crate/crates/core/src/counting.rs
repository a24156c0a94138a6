//! Counting closed geodesics: `#P(t)`, `#C(t)`, Margulis ratios, growth
//! exponents and the Riemann-sum sandwich.
//!
//! The entropy is fixed at `h = 1` (curvature −1) for the ratio curves;
//! [`entropy_estimate`] measures it independently from orbit growth.

use std::fmt::Write as _;

use crate::enumerate::{Mat, OrbitBall, OrbitTree, Visitor};
use crate::error::{GeoError, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::group::FuchsianRep;
use crate::hyperbolic::{hyp_distance, Isometry, Point};
use crate::quad::{integrate, Estimate};
use crate::spectrum::{fmt17, LengthSpectrum};

pub const H: f64 = 1.0;

/// Which classes to count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CountMode {
    pub primitive_only: bool,
    /// Count `γ` and `γ⁻¹` once.
    pub merge_orientation: bool,
}

fn check_range(spec: &LengthSpectrum, t: f64) -> Result<()> {
    if t > spec.t_max + 1e-12 {
        return Err(GeoError::OutOfRange { t, t_max: spec.t_max });
    }
    Ok(())
}

fn counted(spec: &LengthSpectrum, i: usize, mode: CountMode) -> bool {
    let e = &spec.entries[i];
    if mode.primitive_only && e.d != 1 {
        return false;
    }
    // keep the first of each reversed pair; a class equal to its own reverse counts once
    !mode.merge_orientation || e.reverse >= i
}

/// Classes with `|γ| ≤ t`.
pub fn count_p(spec: &LengthSpectrum, t: f64) -> Result<usize> {
    count_p_with(spec, t, CountMode::default())
}

pub fn count_p_with(spec: &LengthSpectrum, t: f64, mode: CountMode) -> Result<usize> {
    check_range(spec, t)?;
    let n = spec.entries.partition_point(|e| e.length <= t);
    Ok((0..n).filter(|&i| counted(spec, i, mode)).count())
}

/// Classes with `|γ| ∈ (t - eps, t]`.
pub fn count_c(spec: &LengthSpectrum, t: f64, eps: f64) -> Result<usize> {
    count_c_with(spec, t, eps, CountMode::default())
}

pub fn count_c_with(spec: &LengthSpectrum, t: f64, eps: f64, mode: CountMode) -> Result<usize> {
    check_range(spec, t)?;
    let lo = spec.entries.partition_point(|e| e.length <= t - eps);
    let hi = spec.entries.partition_point(|e| e.length <= t);
    Ok((lo..hi).filter(|&i| counted(spec, i, mode)).count())
}

/// `Σ d(γ)` over classes with `d(γ) ≥ 2` and `|γ| ≤ t`.
pub fn nonprimitive_weight(spec: &LengthSpectrum, t: f64) -> Result<usize> {
    check_range(spec, t)?;
    Ok(spec.entries.iter().take_while(|e| e.length <= t).filter(|e| e.d >= 2).map(|e| e.d).sum())
}

/// Trailing moving average over `window` points; the first points average
/// what is available.
pub fn cesaro(values: &[f64], window: usize) -> Vec<f64> {
    let w = window.max(1);
    (0..values.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(w);
            values[lo..=i].iter().sum::<f64>() / (i + 1 - lo) as f64
        })
        .collect()
}

pub const CESARO_WINDOW: usize = 3;

#[derive(Clone, Debug)]
pub struct CountingReport {
    pub grid: Vec<f64>,
    pub eps: f64,
    pub h_used: f64,
    pub p_counts: Vec<usize>,
    pub c_counts: Vec<usize>,
    /// `#P(t)·h·t·e^{-ht}`.
    pub ratio: Vec<f64>,
    /// Cesàro average of `ratio` over the trailing window.
    pub smoothed: Vec<f64>,
    /// Slope of `log #P` against `t` from the first grid point to each row.
    pub running_exponent: Vec<f64>,
    /// `(min, max)` of `ratio` over rows with `#P > 0`.
    pub band: (f64, f64),
    pub primitive_ratio: Vec<f64>,
}

pub fn margulis_ratio_curve(spec: &LengthSpectrum, grid: &[f64], eps: f64) -> Result<CountingReport> {
    margulis_ratio_curve_with(spec, grid, eps, CountMode::default())
}

pub fn margulis_ratio_curve_with(
    spec: &LengthSpectrum,
    grid: &[f64],
    eps: f64,
    mode: CountMode,
) -> Result<CountingReport> {
    let mut p_counts = Vec::with_capacity(grid.len());
    let mut c_counts = Vec::with_capacity(grid.len());
    let mut ratio = Vec::with_capacity(grid.len());
    let mut primitive_ratio = Vec::with_capacity(grid.len());
    let prim = CountMode { primitive_only: true, ..mode };
    for &t in grid {
        let p = count_p_with(spec, t, mode)?;
        p_counts.push(p);
        c_counts.push(count_c_with(spec, t, eps, mode)?);
        ratio.push(p as f64 * H * t * (-H * t).exp());
        primitive_ratio.push(count_p_with(spec, t, prim)? as f64 * H * t * (-H * t).exp());
    }
    let smoothed = cesaro(&ratio, CESARO_WINDOW);
    let mut running_exponent = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let pts: Vec<(f64, f64)> = (0..=k)
            .filter(|&j| p_counts[j] > 0)
            .map(|j| (grid[j], (p_counts[j] as f64).ln()))
            .collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        running_exponent.push(linear_fit(&xs, &ys).map(|f| f.slope).unwrap_or(f64::NAN));
    }
    let band = ratio
        .iter()
        .filter(|r| **r > 0.0)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    Ok(CountingReport {
        grid: grid.to_vec(),
        eps,
        h_used: H,
        p_counts,
        c_counts,
        ratio,
        smoothed,
        running_exponent,
        band,
        primitive_ratio,
    })
}

impl CountingReport {
    /// Telescoping and monotonicity of the counts. Returns the first failure.
    pub fn hard_invariants(&self, spec: &LengthSpectrum) -> std::result::Result<(), String> {
        for w in self.p_counts.windows(2) {
            if w[1] < w[0] {
                return Err("P counts decrease".into());
            }
        }
        for (k, &t) in self.grid.iter().enumerate() {
            let below = if t - self.eps <= 0.0 {
                0
            } else {
                count_p(spec, t - self.eps).map_err(|e| e.to_string())?
            };
            if self.c_counts[k] + below != self.p_counts[k] {
                return Err(format!("C({t}) != P({t}) - P({t} - eps)"));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self, comment: &str) -> String {
        let mut out = String::new();
        for line in comment.lines() {
            let _ = writeln!(out, "# {line}");
        }
        out.push_str("t,P,C,ratio,fitted_exponent\n");
        for k in 0..self.grid.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt17(self.grid[k]),
                self.p_counts[k],
                self.c_counts[k],
                fmt17(self.ratio[k]),
                fmt17(self.running_exponent[k])
            );
        }
        out
    }
}

/// Points `lo, lo + step, …` up to `hi` inclusive (within rounding).
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

/// Slope of `log f(t)` against `t` over the points of `grid` where `f > 0`.
pub fn log_slope(grid: &[f64], f: impl Fn(f64) -> Result<f64>) -> Result<LinearFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &t in grid {
        let v = f(t)?;
        if v > 0.0 {
            xs.push(t);
            ys.push(v.ln());
        }
    }
    linear_fit(&xs, &ys)
}

/// Fitted exponent of `#P(t)` over `grid`.
pub fn growth_exponent(spec: &LengthSpectrum, grid: &[f64]) -> Result<LinearFit> {
    log_slope(grid, |t| count_p(spec, t).map(|n| n as f64))
}

/// Fitted exponent of `Σ_{d ≥ 2} d(γ)` over `|γ| ≤ t`.
pub fn nonprimitive_exponent(spec: &LengthSpectrum, grid: &[f64]) -> Result<LinearFit> {
    log_slope(grid, |t| nonprimitive_weight(spec, t).map(|n| n as f64))
}

/// Orbit counts `N(R) = #{γ : d(q, γq) ≤ R}`.
pub fn orbit_counts(
    rep: &FuchsianRep<f64>,
    base: Point<f64>,
    radii: &[f64],
    workers: usize,
    cap: Option<usize>,
) -> Result<Vec<(f64, u64)>> {
    struct Shifted {
        a: Mat,
        a_inv: Mat,
        // 2 cosh R per radius
        limits: Vec<f64>,
        counts: Vec<u64>,
    }
    impl Visitor for Shifted {
        fn visit(&mut self, _: &[u8], m: &Mat, _: f64) {
            use crate::enumerate::{mat_mul, norm2};
            let q = norm2(&mat_mul(&mat_mul(&self.a_inv, m), &self.a));
            for (c, &l) in self.counts.iter_mut().zip(&self.limits) {
                if q <= l {
                    *c += 1;
                }
            }
        }
    }
    let a = Isometry::affine_to(base);
    let a_inv = a.inverse();
    let shift = hyp_distance(Point::i(), base);
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let limits: Vec<f64> = radii.iter().map(|r| 2.0 * r.cosh() * (1.0 + 1e-12)).collect();
    // d(q, γq) ≤ R implies d(i, γi) ≤ R + 2 d(i, q)
    let parts = OrbitTree::new(rep).walk(r_max + 2.0 * shift + 1e-9, workers, cap, || Shifted {
        a: [a.a, a.b, a.c, a.d],
        a_inv: [a_inv.a, a_inv.b, a_inv.c, a_inv.d],
        limits: limits.clone(),
        counts: vec![0; radii.len()],
    })?;
    let mut totals = vec![0u64; radii.len()];
    for p in parts {
        for (t, c) in totals.iter_mut().zip(p.counts) {
            *t += c;
        }
    }
    Ok(radii.iter().copied().zip(totals).collect())
}

#[derive(Clone, Copy, Debug)]
pub struct EntropyEstimate {
    pub h: f64,
    pub se: f64,
    /// `h ± 2·se`.
    pub band: (f64, f64),
    pub points: usize,
}

/// Slope of `log N(R)` against `R`. Orbit counts stand in for ball volumes,
/// which they match up to a constant factor.
pub fn entropy_estimate(counts: &[(f64, u64)]) -> Result<EntropyEstimate> {
    let pts: Vec<&(f64, u64)> = counts.iter().filter(|(_, n)| *n > 0).collect();
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| (p.1 as f64).ln()).collect();
    let f = linear_fit(&xs, &ys)?;
    Ok(EntropyEstimate { h: f.slope, se: f.slope_se, band: f.band(), points: f.n })
}

pub fn entropy_from_balls(balls: &[OrbitBall]) -> Result<EntropyEstimate> {
    let counts: Vec<(f64, u64)> = balls.iter().map(|b| (b.radius, b.len() as u64)).collect();
    entropy_estimate(&counts)
}

#[derive(Clone, Debug)]
pub struct SandwichReport {
    pub b: f64,
    pub t: f64,
    pub eps: f64,
    /// `t_k = T - kε` for `k = 0..=K`, `K = (T - b)/ε`; `t_K = b`.
    pub nodes: Vec<f64>,
    pub c_counts: Vec<f64>,
    /// `#(P(T) \ P(b)) = Σ_{k<K} #C(t_k)`.
    pub n: f64,
    /// `Σ_{k<K} ε e^{t_k}/t_k`, an upper Riemann sum for `∫_b^T`.
    pub lower_sum: f64,
    /// `Σ_{k≤K} ε e^{t_k}/t_k`, a lower Riemann sum for `∫_b^{T+ε}`.
    pub upper_sum: f64,
    /// Upper bound on `#C(t_k)` from the counts with `k ≤ K`.
    pub upper_count: f64,
    pub integral_lo: Estimate,
    pub integral_hi: Estimate,
    /// `e^T/T - e^b/b`.
    pub parts_bound: f64,
    /// Smallest `Q ≥ 0` with `e^{-2Qε}·max(S_lo, ∫_b^T) ≤ N ≤ e^{2Qε}·min(S_hi, ∫_b^{T+ε})`.
    pub q_fit: f64,
    /// Smallest `Q` with `#C(t_k) ∈ e^{±2Qε}·ε e^{t_k}/t_k` for every `k ≤ K`;
    /// infinite when a bin is empty.
    pub q_bins: f64,
}

impl SandwichReport {
    pub fn envelope(&self) -> f64 {
        (2.0 * self.q_fit * self.eps).exp()
    }

    /// `e^{-2Qε} S_lo ≤ N ≤ e^{2Qε} S_hi`.
    pub fn sums_bracket(&self) -> bool {
        let e = self.envelope() * (1.0 + 1e-12);
        self.lower_sum / e <= self.n && self.n <= e * self.upper_sum
    }

    /// Riemann sums sit on the correct side of the integrals, and therefore
    /// `e^{-2Qε} ∫_b^T ≤ N ≤ e^{2Qε} ∫_b^{T+ε}`.
    pub fn integrals_bracket(&self) -> bool {
        let e = self.envelope() * (1.0 + 1e-12);
        let lo = self.integral_lo.value;
        let hi = self.integral_hi.value;
        self.lower_sum >= lo - self.integral_lo.error
            && self.upper_sum <= hi + self.integral_hi.error
            && lo / e <= self.n
            && self.n <= e * hi
    }

    /// `∫_b^T e^t/t ≥ e^T/T - e^b/b`.
    pub fn parts_bound_holds(&self) -> bool {
        self.integral_lo.value >= self.parts_bound
    }
}

/// The sandwich for an arbitrary count function `c(t_k)`.
pub fn riemann_sandwich(b: f64, t: f64, eps: f64, c: impl Fn(f64) -> Result<f64>) -> Result<SandwichReport> {
    if b < 1.0 / H {
        // e^{ht}/t decreases below 1/h
        return Err(GeoError::DegenerateFit(format!("b = {b} below 1/h")));
    }
    let kf = (t - b) / eps;
    let k = kf.round();
    if k < 1.0 || (kf - k).abs() > 1e-9 {
        return Err(GeoError::GridMisaligned(kf));
    }
    let k = k as usize;
    let nodes: Vec<f64> = (0..=k).map(|j| t - j as f64 * eps).collect();
    let c_counts = nodes.iter().map(|&x| c(x)).collect::<Result<Vec<f64>>>()?;
    let f = |x: f64| (H * x).exp() / x;
    let n = c_counts[..k].iter().sum();
    let upper_count = c_counts.iter().sum();
    let lower_sum = nodes[..k].iter().map(|&x| eps * f(x)).sum();
    let upper_sum = nodes.iter().map(|&x| eps * f(x)).sum();
    let integral_lo = integrate(f, b, t, 0.0, 1e-12)?;
    let integral_hi = integrate(f, b, t + eps, 0.0, 1e-12)?;
    let parts_bound = f(t) / H - f(b) / H;
    let lo_side = f64::max(lower_sum, integral_lo.value);
    let hi_side = f64::min(upper_sum, integral_hi.value);
    let q_fit = [lo_side / n, n / hi_side]
        .iter()
        .map(|r: &f64| r.ln().max(0.0) / (2.0 * eps))
        .fold(0.0, f64::max);
    let q_bins = nodes
        .iter()
        .zip(&c_counts)
        .map(|(&x, &cnt)| {
            if cnt <= 0.0 {
                f64::INFINITY
            } else {
                (cnt / (eps * f(x))).ln().abs() / (2.0 * eps)
            }
        })
        .fold(0.0, f64::max);
    Ok(SandwichReport {
        b,
        t,
        eps,
        nodes,
        c_counts,
        n,
        lower_sum,
        upper_sum,
        upper_count,
        integral_lo,
        integral_hi,
        parts_bound,
        q_fit,
        q_bins,
    })
}

pub fn riemann_sandwich_check(spec: &LengthSpectrum, b: f64, t: f64, eps: f64) -> Result<SandwichReport> {
    let r = riemann_sandwich(b, t, eps, |x| count_c(spec, x, eps).map(|n| n as f64))?;
    let direct = count_p(spec, t)? - count_p(spec, b)?;
    debug_assert_eq!(direct as f64, r.n);
    Ok(r)
}
