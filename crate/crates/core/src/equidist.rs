//! Boundary-level equidistribution of closed geodesics.
//!
//! A closed geodesic of length `ℓ` is cut by the tiling into chords, one per
//! lift whose axis meets `D`, with lengths summing to `ℓ`. Giving the
//! endpoint pair of each such lift the weight `chord/ℓ` turns a class into a
//! probability measure on `∂X × ∂X`; if the geodesics equidistribute to the
//! Liouville measure, the average over classes tends to
//! `chord · μ̄ / 4(g - 1)`.

use std::f64::consts::TAU;

use crate::domain::Polygon;
use crate::error::{GeoError, Result};
use crate::group::FuchsianRep;
use crate::measure::{total_box_normalizer, PairMeasureGrid};
use crate::hyperbolic::Point;
use crate::quad::integrate_2d;
use crate::spectrum::LengthSpectrum;

/// Width of the length window `(t - w, t]` used by the CLI and the acceptance run.
pub const EQUIDIST_WINDOW: f64 = 0.5;

/// `bins × bins` grid on pairs of Cayley angles.
#[derive(Clone, Debug)]
pub struct PairBins {
    pub bins: usize,
    /// Normalized target mass per bin, row-major in `(minus, plus)`.
    pub target: Vec<f64>,
    /// `∫ chord dμ̄` before normalization; `4(g - 1)` in theory.
    pub raw_total: f64,
}

fn bin_of(angle: f64, bins: usize) -> usize {
    ((angle / TAU * bins as f64) as usize).min(bins - 1)
}

impl PairBins {
    pub fn new(rep: &FuchsianRep<f64>, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(GeoError::InvalidPoint("zero bins".into()));
        }
        let polygon = Polygon::new(rep);
        let grid = PairMeasureGrid::new(Point::i());
        let w = TAU / bins as f64;
        let mut target = vec![0.0; bins * bins];
        for i in 0..bins {
            for j in 0..bins {
                let f = |phi: f64, psi: f64| {
                    let c = polygon.chord(phi, psi);
                    if c == 0.0 {
                        0.0
                    } else {
                        c * grid.density(phi, psi)
                    }
                };
                let x = (i as f64 * w, (i + 1) as f64 * w);
                let y = (j as f64 * w, (j + 1) as f64 * w);
                target[i * bins + j] = match integrate_2d(f, x, y, 1e-7, 1e-6) {
                    Ok(e) => e.value,
                    // the chord has square-root edges; accept a stalled refinement
                    Err(GeoError::Quadrature { value, .. }) => value,
                    Err(e) => return Err(e),
                };
            }
        }
        let raw_total: f64 = target.iter().sum();
        let norm = total_box_normalizer(rep.genus);
        for v in &mut target {
            *v /= norm;
        }
        Ok(Self { bins, target, raw_total })
    }

    /// Empirical bin weights of the classes with length in `(t - width, t]`.
    pub fn empirical(&self, spectrum: &LengthSpectrum, t: f64, width: f64) -> (Vec<f64>, usize) {
        let n = self.bins;
        let mut hist = vec![0.0; n * n];
        let selected: Vec<bool> = spectrum.entries.iter().map(|e| e.length > t - width && e.length <= t).collect();
        let count = selected.iter().filter(|s| **s).count();
        for l in &spectrum.lifts {
            if selected[l.class] {
                hist[bin_of(l.minus, n) * n + bin_of(l.plus, n)] += l.chord / spectrum.entries[l.class].length;
            }
        }
        if count > 0 {
            for v in &mut hist {
                *v /= count as f64;
            }
        }
        (hist, count)
    }
}

/// Half the `ℓ¹` distance.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquidistRow {
    pub t: f64,
    pub classes: usize,
    pub tv: f64,
}

pub fn endpoint_equidistribution(
    spectrum: &LengthSpectrum,
    bins: &PairBins,
    t_grid: &[f64],
    width: f64,
) -> Result<Vec<EquidistRow>> {
    t_grid
        .iter()
        .map(|&t| {
            if t > spectrum.t_max + 1e-12 {
                return Err(GeoError::OutOfRange { t, t_max: spectrum.t_max });
            }
            let (hist, classes) = bins.empirical(spectrum, t, width);
            Ok(EquidistRow { t, classes, tv: total_variation(&hist, &bins.target) })
        })
        .collect()
}

/// `hist` with both angles rotated by `shift` bins.
pub fn rotate_bins(hist: &[f64], bins: usize, shift: usize) -> Vec<f64> {
    let mut out = vec![0.0; hist.len()];
    for i in 0..bins {
        for j in 0..bins {
            out[((i + shift) % bins) * bins + (j + shift) % bins] = hist[i * bins + j];
        }
    }
    out
}

pub fn equidist_csv(rows: &[EquidistRow], comment: &str) -> String {
    use crate::spectrum::fmt17;
    let mut out = String::new();
    for line in comment.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("t,classes,tv_distance\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", fmt17(r.t), r.classes, fmt17(r.tv)));
    }
    out
}
