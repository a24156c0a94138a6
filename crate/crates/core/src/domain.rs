//! The fundamental polygon `D`: axis-crossing test and chord lengths.

use crate::group::FuchsianRep;
use crate::hyperbolic::Isometry;

/// Slack for "the axis touches D", in units of `sinh(distance)`.
const TOUCH: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Polygon {
    /// `(x, y, x² + y²)` for each vertex in the half-plane.
    vertices: Vec<(f64, f64, f64)>,
    /// Vertices in the Klein model, counterclockwise.
    klein: Vec<(f64, f64)>,
}

impl Polygon {
    pub fn new(rep: &FuchsianRep<f64>) -> Self {
        let vs = rep.polygon_vertices();
        let vertices = vs.iter().map(|v| (v.x, v.y, v.x * v.x + v.y * v.y)).collect();
        let klein = vs
            .iter()
            .map(|v| {
                let (re, im) = v.to_disk();
                let s = 2.0 / (1.0 + re * re + im * im);
                (re * s, im * s)
            })
            .collect();
        Polygon { vertices, klein }
    }

    /// Signed `sinh` of the distance from each vertex to the axis of `g`
    /// (up to a common sign).
    ///
    /// For the axis of `[[a, b], [c, d]]`, `(c|z|² + (d - a)x - b)/y` equals
    /// `±sqrt(tr² - 4)·sinh(dist(z, axis))`.
    pub fn axis_side(g: &Isometry<f64>, x: f64, y: f64, r2: f64) -> f64 {
        let tr = g.a + g.d;
        let s = (tr * tr - 4.0).sqrt();
        (g.c * r2 + (g.d - g.a) * x - g.b) / (y * s)
    }

    /// Whether the axis of the hyperbolic element `g` meets the closed polygon.
    pub fn axis_meets(&self, g: &Isometry<f64>) -> bool {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y, r2) in &self.vertices {
            let f = Self::axis_side(g, x, y, r2);
            lo = lo.min(f);
            hi = hi.max(f);
        }
        lo <= TOUCH && hi >= -TOUCH
    }

    /// Hyperbolic length of the part of the geodesic with Cayley endpoints
    /// `(phi, psi)` inside the polygon.
    pub fn chord(&self, phi: f64, psi: f64) -> f64 {
        let a = (phi.cos(), phi.sin());
        let b = (psi.cos(), psi.sin());
        let dir = (b.0 - a.0, b.1 - a.1);
        let (mut s0, mut s1) = (0.0f64, 1.0f64);
        let n = self.klein.len();
        for j in 0..n {
            let p = self.klein[j];
            let q = self.klein[(j + 1) % n];
            // inward normal of a counterclockwise edge
            let nx = -(q.1 - p.1);
            let ny = q.0 - p.0;
            let num = nx * (a.0 - p.0) + ny * (a.1 - p.1);
            let den = nx * dir.0 + ny * dir.1;
            if den == 0.0 {
                if num < 0.0 {
                    return 0.0;
                }
                continue;
            }
            let s = -num / den;
            if den > 0.0 {
                s0 = s0.max(s);
            } else {
                s1 = s1.min(s);
            }
            if s0 >= s1 {
                return 0.0;
            }
        }
        let k0 = (a.0 + s0 * dir.0, a.1 + s0 * dir.1);
        let k1 = (a.0 + s1 * dir.0, a.1 + s1 * dir.1);
        let dot = k0.0 * k1.0 + k0.1 * k1.1;
        let n0 = 1.0 - (k0.0 * k0.0 + k0.1 * k0.1);
        let n1 = 1.0 - (k1.0 * k1.0 + k1.1 * k1.1);
        ((1.0 - dot) / (n0 * n1).sqrt()).max(1.0).acosh()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
}
