//! Visual measures, the boundary pair measure `μ̄` and the flow-invariant
//! box mass.
//!
//! `μ_p` is the visual probability measure seen from `p`; with respect to the
//! Cayley angle it has density [`visual_density_angle`] against `dφ/2π`.
//! `μ̄ = e^{β_p} μ_p × μ_p` does not depend on `p`.

use std::f64::consts::PI;

use crate::error::{GeoError, Result};
use crate::flowbox::BoundaryArc;
use crate::hyperbolic::{busemann, gromov_beta, visual_density_angle, BoundaryPoint, Point};
use crate::quad::{integrate_2d, Estimate};

/// `|lhs/rhs - 1|` for `dμ_q/dμ_p(ξ) = e^{-b_ξ(q,p)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub err: f64,
}

pub fn conformal_derivative_check(p: Point<f64>, q: Point<f64>, xi: BoundaryPoint<f64>) -> ConformalCheck {
    let phi = xi.angle();
    let lhs = visual_density_angle(q, phi) / visual_density_angle(p, phi);
    let rhs = (-busemann(xi, q, p)).exp();
    ConformalCheck { lhs, rhs, err: (lhs / rhs - 1.0).abs() }
}

/// Product quadrature of `μ̄` over arc pairs, with densities taken from the
/// base point `p`.
#[derive(Clone, Copy, Debug)]
pub struct PairMeasureGrid {
    pub p: Point<f64>,
    pub rel_tol: f64,
}

impl PairMeasureGrid {
    pub fn new(p: Point<f64>) -> Self {
        Self { p, rel_tol: 1e-8 }
    }

    /// Density of `μ̄` against `dφ dψ` (Cayley angles).
    pub fn density(&self, phi: f64, psi: f64) -> f64 {
        let xi = BoundaryPoint::from_angle(phi);
        let eta = BoundaryPoint::from_angle(psi);
        match gromov_beta(self.p, xi, eta) {
            Ok(beta) => {
                beta.exp() * visual_density_angle(self.p, phi) * visual_density_angle(self.p, psi)
                    / (4.0 * PI * PI)
            }
            Err(_) => f64::INFINITY,
        }
    }

    pub fn mass(&self, a: &BoundaryArc, b: &BoundaryArc) -> Result<Estimate> {
        barmu_mass(self, a, b)
    }
}

/// `μ̄(A × B)` for disjoint arcs.
pub fn barmu_mass(grid: &PairMeasureGrid, a: &BoundaryArc, b: &BoundaryArc) -> Result<Estimate> {
    if !a.intersect(b).is_empty() {
        return Err(GeoError::OverlappingArcs);
    }
    if a.width == 0.0 || b.width == 0.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    integrate_2d(
        |phi, psi| grid.density(phi, psi),
        (a.start, a.start + a.width),
        (b.start, b.start + b.width),
        1e-300,
        grid.rel_tol,
    )
}

/// Total `μ̄ dt` mass of the unit tangent bundle of a closed genus-`g` surface.
pub fn total_box_normalizer(genus: usize) -> f64 {
    4.0 * (genus as f64 - 1.0)
}

/// Probability measure of maximal entropy of `P × F × [0, α]`.
pub fn box_mass(genus: usize, alpha: f64, barmu_pf: f64) -> f64 {
    alpha * barmu_pf / total_box_normalizer(genus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conformal_ratio_at_infinity() {
        let c = conformal_derivative_check(Point::i(), Point::new(0.0, 2.0).unwrap(), BoundaryPoint::Infinity);
        assert!((c.rhs - 2.0).abs() < 1e-14);
        assert!(c.err < 1e-12);
    }

    #[test]
    fn density_symmetric_and_base_free() {
        let g0 = PairMeasureGrid::new(Point::i());
        let g1 = PairMeasureGrid::new(Point::new(0.7, 0.3).unwrap());
        for (phi, psi) in [(0.3, 2.0), (5.0, 1.0), (0.01, 3.1)] {
            let d0 = g0.density(phi, psi);
            assert!((d0 - g0.density(psi, phi)).abs() < 1e-12 * d0);
            assert!((d0 - g1.density(phi, psi)).abs() < 1e-9 * d0);
        }
    }

    #[test]
    fn overlapping_arcs_rejected() {
        let g = PairMeasureGrid::new(Point::i());
        let a = BoundaryArc::new(0.0, 1.0);
        let b = BoundaryArc::new(0.5, 1.0);
        assert_eq!(barmu_mass(&g, &a, &b), Err(GeoError::OverlappingArcs));
    }
}
