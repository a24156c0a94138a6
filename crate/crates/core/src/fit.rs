//! Ordinary least squares for a line.

use crate::error::{GeoError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; zero for an exact two-point fit.
    pub slope_se: f64,
    pub n: usize,
}

impl LinearFit {
    /// `slope ± 2·se`.
    pub fn band(&self) -> (f64, f64) {
        (self.slope - 2.0 * self.slope_se, self.slope + 2.0 * self.slope_se)
    }
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len();
    if n != ys.len() {
        return Err(GeoError::DegenerateFit(format!("{} x values, {} y values", n, ys.len())));
    }
    if n < 2 {
        return Err(GeoError::DegenerateFit(format!("{n} points")));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(GeoError::DegenerateFit("non-finite data".into()));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(GeoError::DegenerateFit("all x values equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if n > 2 {
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit { slope, intercept, slope_se, n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-14 && (f.intercept + 1.0).abs() < 1e-14);
        assert!(f.slope_se < 1e-14);
    }

    #[test]
    fn standard_error() {
        // residuals ±1 alternating: rss = 4, sxx = 5, se = sqrt(4/2/5)
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, -1.0, 1.0, -1.0];
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope + 0.4).abs() < 1e-14);
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - f.intercept - f.slope * x).powi(2)).sum();
        assert!((f.slope_se - (rss / 2.0 / 5.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn degenerate() {
        assert!(linear_fit(&[1.0], &[2.0]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[2.0, 3.0]).is_err());
    }
}
