//! Upper half-plane geometry.
//!
//! Boundary points are ordered by the Cayley angle `φ = 2·atan2(1, -ξ)`, the
//! argument of `(ξ - i)/(ξ + i)` on the unit circle. So `∞ ↦ 0`, `-1 ↦ π/2`,
//! `0 ↦ π`, `1 ↦ 3π/2`, and the angle increases with ξ. Orientation-preserving
//! isometries preserve the counterclockwise order of this parameter.
//!
//! Tangent directions are angles in the half-plane chart, measured
//! counterclockwise from the positive real axis, so `π/2` points up toward ∞.

use std::fmt;

use crate::error::{GeoError, Result};
use crate::scalar::Scalar;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && y > T::zero()) {
            return Err(GeoError::InvalidPoint(format!("({x}, {y})")));
        }
        Ok(Self { x, y })
    }

    /// The base point `i`, center of the fundamental polygon.
    pub fn i() -> Self {
        Self { x: T::zero(), y: T::one() }
    }

    /// Image in the Poincaré disk under `z ↦ (z - i)/(z + i)`.
    pub fn to_disk(self) -> (T, T) {
        let den = self.x * self.x + (self.y + T::one()).powi(2);
        let re = (self.x * self.x + self.y * self.y - T::one()) / den;
        let im = -(T::two() * self.x) / den;
        (re, im)
    }

    pub fn from_disk(re: T, im: T) -> Result<Self> {
        // z = i (1 + w)/(1 - w)
        let den = (T::one() - re).powi(2) + im * im;
        let x = -(T::two() * im) / den;
        let y = (T::one() - re * re - im * im) / den;
        Self::new(x, y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPoint<T> {
    Finite(T),
    Infinity,
}

impl<T: Scalar> BoundaryPoint<T> {
    /// Cayley angle in `[0, 2π)`.
    pub fn angle(self) -> T {
        match self {
            BoundaryPoint::Infinity => T::zero(),
            BoundaryPoint::Finite(xi) => {
                let phi = T::two() * T::one().atan2(-xi);
                if phi >= T::TAU() {
                    T::zero()
                } else {
                    phi
                }
            }
        }
    }

    pub fn from_angle(phi: T) -> Self {
        let phi = wrap_angle(phi);
        let half = phi * T::half();
        let s = half.sin();
        if s == T::zero() {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(-half.cos() / s)
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    /// Unit-circle image `(cos φ, sin φ)`, stable for huge finite ξ.
    pub fn to_circle(self) -> (T, T) {
        match self {
            BoundaryPoint::Infinity => (T::one(), T::zero()),
            BoundaryPoint::Finite(xi) => {
                let den = xi * xi + T::one();
                if !den.is_finite() {
                    return (T::one(), T::zero());
                }
                ((xi * xi - T::one()) / den, -(T::two() * xi) / den)
            }
        }
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_angle<T: Scalar>(phi: T) -> T {
    let tau = T::TAU();
    let r = phi % tau;
    let r = if r < T::zero() { r + tau } else { r };
    if r >= tau {
        T::zero()
    } else {
        r
    }
}

/// An element of PSL(2,ℝ), stored with the sign convention of [`Isometry::normalized`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl<T: Scalar> Isometry<T> {
    /// Checked constructor: `ad - bc = 1` within [`tol::DETERMINANT`] relative to the entry scale.
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let g = Self { a, b, c, d };
        let scale = T::one() + g.norm2();
        if ((g.det() - T::one()) / scale).abs() > T::lit(tol::DETERMINANT) {
            return Err(GeoError::InvalidPoint(format!("det = {}", g.det())));
        }
        Ok(g.normalized())
    }

    pub const fn from_entries(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::from_entries(T::one(), T::zero(), T::zero(), T::one())
    }

    /// `z ↦ z + s`.
    pub fn translation(s: T) -> Self {
        Self::from_entries(T::one(), s, T::zero(), T::one())
    }

    /// `z ↦ λ² z`, the hyperbolic element with axis `(0, ∞)` and length `2 log λ`.
    pub fn dilation(lambda: T) -> Self {
        Self::from_entries(lambda, T::zero(), T::zero(), lambda.recip())
    }

    /// Rotation about `i` turning tangent directions counterclockwise by `psi`.
    pub fn rotation(psi: T) -> Self {
        let (s, c) = (psi * T::half()).sin_cos();
        Self::from_entries(c, s, -s, c)
    }

    /// The affine map `z ↦ x + y z`, sending `i` to `p`.
    pub fn affine_to(p: Point<T>) -> Self {
        let r = p.y.sqrt();
        Self::from_entries(r, p.x / r, T::zero(), r.recip())
    }

    /// First nonzero of `(a, b, c)` made positive.
    pub fn normalized(self) -> Self {
        let lead = if self.a != T::zero() {
            self.a
        } else if self.b != T::zero() {
            self.b
        } else {
            self.c
        };
        if lead < T::zero() {
            self.neg()
        } else {
            self
        }
    }

    pub fn neg(self) -> Self {
        Self::from_entries(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    pub fn norm2(&self) -> T {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn compose(&self, o: &Self) -> Self {
        Self::from_entries(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn inverse(&self) -> Self {
        Self::from_entries(self.d, -self.b, -self.c, self.a)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity();
        for _ in 0..n {
            acc = acc.compose(self);
        }
        acc
    }

    /// `h g h⁻¹`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        h.compose(self).compose(&h.inverse())
    }

    /// Frobenius distance to `±o`, the metric of PSL(2,ℝ) used by residual gates.
    pub fn distance_pm(&self, o: &Self) -> T {
        let plus = (self.a - o.a).powi(2)
            + (self.b - o.b).powi(2)
            + (self.c - o.c).powi(2)
            + (self.d - o.d).powi(2);
        let minus = (self.a + o.a).powi(2)
            + (self.b + o.b).powi(2)
            + (self.c + o.c).powi(2)
            + (self.d + o.d).powi(2);
        plus.min(minus).sqrt()
    }

    pub fn apply(&self, z: Point<T>) -> Point<T> {
        // (az+b)/(cz+d) with z = x + iy
        let nr = self.a * z.x + self.b;
        let ni = self.a * z.y;
        let dr = self.c * z.x + self.d;
        let di = self.c * z.y;
        let den = dr * dr + di * di;
        Point {
            x: (nr * dr + ni * di) / den,
            y: z.y * self.det() / den,
        }
    }

    pub fn apply_boundary(&self, xi: BoundaryPoint<T>) -> BoundaryPoint<T> {
        match xi {
            BoundaryPoint::Infinity => ratio(self.a, self.c),
            BoundaryPoint::Finite(x) => ratio(self.a * x + self.b, self.c * x + self.d),
        }
    }

    /// `|g'(ξ)|` with respect to the Cayley angle, so it is finite at ∞ too.
    pub fn angular_derivative(&self, xi: BoundaryPoint<T>) -> T {
        // In the disk model g acts on e^{iφ}; the derivative of the angle map is
        // (1 + ξ²)/((aξ+b)² + (cξ+d)²) for finite ξ and 1/(a² + c²) at ∞.
        match xi {
            BoundaryPoint::Infinity => (self.a * self.a + self.c * self.c).recip(),
            BoundaryPoint::Finite(x) => {
                let num = T::one() + x * x;
                let p = self.a * x + self.b;
                let q = self.c * x + self.d;
                if !num.is_finite() {
                    return (self.a * self.a + self.c * self.c).recip();
                }
                num / (p * p + q * q)
            }
        }
    }

    /// Counterclockwise rotation that `g` applies to tangent directions at `z`.
    pub fn rotation_at(&self, z: Point<T>) -> T {
        // g'(z) = 1/(cz+d)², so arg g'(z) = -2 arg(cz+d)
        let re = self.c * z.x + self.d;
        let im = self.c * z.y;
        -(T::two() * im.atan2(re))
    }

    pub fn approx_eq(&self, o: &Self, rel: T) -> bool {
        self.distance_pm(o) <= rel * (T::one() + self.norm2().sqrt())
    }
}

fn ratio<T: Scalar>(num: T, den: T) -> BoundaryPoint<T> {
    if den == T::zero() {
        BoundaryPoint::Infinity
    } else {
        let v = num / den;
        if v.is_finite() {
            BoundaryPoint::Finite(v)
        } else {
            BoundaryPoint::Infinity
        }
    }
}

/// Something an isometry can act on.
pub trait Mobius<T> {
    fn moved_by(self, g: &Isometry<T>) -> Self;
}

impl<T: Scalar> Mobius<T> for Point<T> {
    fn moved_by(self, g: &Isometry<T>) -> Self {
        g.apply(self)
    }
}

impl<T: Scalar> Mobius<T> for BoundaryPoint<T> {
    fn moved_by(self, g: &Isometry<T>) -> Self {
        g.apply_boundary(self)
    }
}

pub fn mobius_apply<T: Scalar, Z: Mobius<T>>(g: &Isometry<T>, z: Z) -> Z {
    z.moved_by(g)
}

/// `cosh d(p, q)`.
pub fn cosh_distance<T: Scalar>(p: Point<T>, q: Point<T>) -> T {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    T::one() + (dx * dx + dy * dy) / (T::two() * p.y * q.y)
}

pub fn hyp_distance<T: Scalar>(p: Point<T>, q: Point<T>) -> T {
    // sinh(d/2) = |p - q| / (2 sqrt(Im p Im q)) keeps precision at short range
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let s = (dx * dx + dy * dy).sqrt() / (T::two() * (p.y * q.y).sqrt());
    T::two() * s.asinh()
}

/// `cosh d(i, g i)`, which for the matrix entries is `(a² + b² + c² + d²)/2`.
pub fn cosh_displacement<T: Scalar>(g: &Isometry<T>) -> T {
    g.norm2() * T::half()
}

pub fn classify<T: Scalar>(g: &Isometry<T>) -> Classification {
    let tr = g.trace().abs();
    let two = T::two();
    let band = T::lit(tol::TRACE);
    if (tr - two).abs() <= band {
        if g.approx_eq(&Isometry::identity(), T::lit(tol::ALGEBRAIC)) {
            Classification::Identity
        } else {
            Classification::Parabolic
        }
    } else if tr > two {
        Classification::Hyperbolic
    } else {
        Classification::Elliptic
    }
}

pub fn translation_length<T: Scalar>(g: &Isometry<T>) -> Result<T> {
    if classify(g) != Classification::Hyperbolic {
        return Err(GeoError::NotHyperbolic {
            trace: g.trace().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(T::two() * (g.trace().abs() * T::half()).acosh())
}

/// `(repelling, attracting)` fixed points.
pub fn axis_endpoints<T: Scalar>(g: &Isometry<T>) -> Result<(BoundaryPoint<T>, BoundaryPoint<T>)> {
    if classify(g) != Classification::Hyperbolic {
        return Err(GeoError::NotHyperbolic {
            trace: g.trace().to_f64().unwrap_or(f64::NAN),
        });
    }
    let tr = g.trace();
    let disc = (tr * tr - T::lit(4.0)).sqrt();
    let sigma = if tr >= T::zero() { T::one() } else { -T::one() };
    let u = g.a - g.d;
    let two_c = T::two() * g.c;
    let minus_two_b = -(T::two() * g.b);
    // Roots of c z² + (d - a) z - b; the attracting one has |cz + d| > 1.
    // Each root is taken from whichever closed form avoids cancellation.
    if u * sigma >= T::zero() {
        let n = u + sigma * disc;
        Ok((ratio(minus_two_b, n), ratio(n, two_c)))
    } else {
        let n = u - sigma * disc;
        Ok((ratio(n, two_c), ratio(minus_two_b, n)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicLine<T> {
    pub minus: BoundaryPoint<T>,
    pub plus: BoundaryPoint<T>,
}

impl<T: Scalar> GeodesicLine<T> {
    pub fn new(minus: BoundaryPoint<T>, plus: BoundaryPoint<T>) -> Result<Self> {
        if minus == plus {
            return Err(GeoError::EqualEndpoints);
        }
        Ok(Self { minus, plus })
    }

    /// A point of the line (the top of the semicircle, or height 1 on a vertical line).
    pub fn point(&self) -> Point<T> {
        match (self.minus, self.plus) {
            (BoundaryPoint::Finite(u), BoundaryPoint::Finite(v)) => Point {
                x: (u + v) * T::half(),
                y: (u - v).abs() * T::half(),
            },
            (BoundaryPoint::Finite(u), BoundaryPoint::Infinity)
            | (BoundaryPoint::Infinity, BoundaryPoint::Finite(u)) => Point { x: u, y: T::one() },
            _ => unreachable!("endpoints are distinct"),
        }
    }

    pub fn moved_by(&self, g: &Isometry<T>) -> Self {
        Self { minus: g.apply_boundary(self.minus), plus: g.apply_boundary(self.plus) }
    }
}

/// Busemann function `b_ξ(q, p)`, normalized so `b_ξ(p, p) = 0`.
pub fn busemann<T: Scalar>(xi: BoundaryPoint<T>, q: Point<T>, p: Point<T>) -> T {
    match xi {
        BoundaryPoint::Infinity => (p.y / q.y).ln(),
        BoundaryPoint::Finite(x) => {
            let nq = (q.x - x).powi(2) + q.y * q.y;
            let np = (p.x - x).powi(2) + p.y * p.y;
            (nq / q.y).ln() - (np / p.y).ln()
        }
    }
}

/// `d(q, x) - d(p, x)`.
pub fn busemann_finite<T: Scalar>(x: Point<T>, q: Point<T>, p: Point<T>) -> T {
    hyp_distance(q, x) - hyp_distance(p, x)
}

/// `β_p(ξ, η) = -(b_ξ(q, p) + b_η(q, p))` for any `q` on the geodesic `(ξ, η)`.
pub fn gromov_beta<T: Scalar>(p: Point<T>, xi: BoundaryPoint<T>, eta: BoundaryPoint<T>) -> Result<T> {
    let q = GeodesicLine::new(xi, eta)?.point();
    Ok(-(busemann(xi, q, p) + busemann(eta, q, p)))
}

/// `β_p` from its finite version `d(x,p) + d(y,p) - d(x,y)`.
pub fn gromov_beta_finite<T: Scalar>(p: Point<T>, x: Point<T>, y: Point<T>) -> T {
    hyp_distance(x, p) + hyp_distance(y, p) - hyp_distance(x, y)
}

/// Visual angle of `ξ` seen from `p`: the Cayley angle after moving `p` to `i`.
/// The visual measure `μ_p` is uniform in this angle.
pub fn visual_angle<T: Scalar>(p: Point<T>, xi: BoundaryPoint<T>) -> T {
    match xi {
        BoundaryPoint::Infinity => T::zero(),
        BoundaryPoint::Finite(x) => BoundaryPoint::Finite((x - p.x) / p.y).angle(),
    }
}

pub fn from_visual_angle<T: Scalar>(p: Point<T>, phi: T) -> BoundaryPoint<T> {
    match BoundaryPoint::from_angle(phi) {
        BoundaryPoint::Infinity => BoundaryPoint::Infinity,
        BoundaryPoint::Finite(u) => BoundaryPoint::Finite(p.x + p.y * u),
    }
}

/// Density of the visual probability measure `μ_p` with respect to `dξ`
/// (finite ξ), the Poisson kernel of the half-plane.
pub fn visual_density<T: Scalar>(p: Point<T>, xi: T) -> T {
    p.y / (T::PI() * ((p.x - xi).powi(2) + p.y * p.y))
}

/// Density of `μ_p` with respect to the Cayley angle measure `dφ/2π`.
pub fn visual_density_angle<T: Scalar>(p: Point<T>, phi: T) -> T {
    let (wr, wi) = p.to_disk();
    let (c, s) = (phi.cos(), phi.sin());
    let num = T::one() - wr * wr - wi * wi;
    let den = (c - wr).powi(2) + (s - wi).powi(2);
    num / den
}

/// A unit tangent vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVector<T> {
    pub base: Point<T>,
    pub angle: T,
}

impl<T: Scalar> UnitVector<T> {
    pub fn new(base: Point<T>, angle: T) -> Self {
        Self { base, angle: wrap_angle(angle) }
    }

    /// The isometry carrying the upward vector at `i` to this vector.
    pub fn frame(&self) -> Isometry<T> {
        Isometry::affine_to(self.base).compose(&Isometry::rotation(self.angle - T::FRAC_PI_2()))
    }

    pub fn from_frame(g: &Isometry<T>) -> Self {
        let base = g.apply(Point::i());
        Self::new(base, T::FRAC_PI_2() + g.rotation_at(Point::i()))
    }

    pub fn flow(&self, t: T) -> Self {
        let e = (t * T::half()).exp();
        let d = Isometry::from_entries(e, T::zero(), T::zero(), e.recip());
        Self::from_frame(&self.frame().compose(&d))
    }

    pub fn forward(&self) -> BoundaryPoint<T> {
        self.frame().apply_boundary(BoundaryPoint::Infinity)
    }

    pub fn backward(&self) -> BoundaryPoint<T> {
        self.frame().apply_boundary(BoundaryPoint::Finite(T::zero()))
    }

    pub fn moved_by(&self, g: &Isometry<T>) -> Self {
        Self::from_frame(&g.compose(&self.frame()))
    }

    pub fn geodesic(&self) -> GeodesicLine<T> {
        GeodesicLine { minus: self.backward(), plus: self.forward() }
    }

    /// Unit vector at `p` pointing at the boundary point `xi`.
    pub fn toward(p: Point<T>, xi: BoundaryPoint<T>) -> Self {
        Self::new(p, visual_angle(p, xi) + T::FRAC_PI_2())
    }
}

impl<T: Scalar> fmt::Display for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.x, self.y)
    }
}

impl<T: Scalar> fmt::Display for BoundaryPoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Infinity => write!(f, "∞"),
            BoundaryPoint::Finite(x) => write!(f, "{x}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point<f64>;

    fn pt(x: f64, y: f64) -> P {
        Point::new(x, y).unwrap()
    }

    #[test]
    fn mobius_examples() {
        let t = Isometry::translation(1.0);
        assert_eq!(t.apply(P::i()), pt(1.0, 1.0));
        let z = pt(0.3, 2.0);
        assert_eq!(Isometry::identity().apply(z), z);
        let s = Isometry::dilation(2.0);
        let w = mobius_apply(&s, P::i());
        assert!((w.x).abs() < 1e-15 && (w.y - 4.0).abs() < 1e-15);
        assert_eq!(t.apply_boundary(BoundaryPoint::Infinity), BoundaryPoint::Infinity);
        let r = Isometry::<f64>::from_entries(0.0, -1.0, 1.0, 0.0);
        assert_eq!(r.apply_boundary(BoundaryPoint::Finite(0.0)), BoundaryPoint::Infinity);
        assert_eq!(r.apply_boundary(BoundaryPoint::Infinity), BoundaryPoint::Finite(0.0));
    }

    #[test]
    fn cayley_angles() {
        let cases = [(-1.0, 0.5), (0.0, 1.0), (1.0, 1.5)];
        for (xi, frac) in cases {
            let a = BoundaryPoint::Finite(xi).angle();
            assert!((a - frac * std::f64::consts::PI).abs() < 1e-15, "{xi}: {a}");
        }
        assert_eq!(BoundaryPoint::<f64>::Infinity.angle(), 0.0);
        for k in 1..50 {
            let phi = 0.1257 * k as f64;
            let back = BoundaryPoint::from_angle(phi).angle();
            assert!((back - phi).abs() < 1e-13);
        }
    }

    #[test]
    fn disk_roundtrip() {
        let z = pt(-0.7, 0.35);
        let (re, im) = z.to_disk();
        let w = Point::from_disk(re, im).unwrap();
        assert!((w.x - z.x).abs() < 1e-14 && (w.y - z.y).abs() < 1e-14);
        assert_eq!(P::i().to_disk(), (0.0, 0.0));
    }

    #[test]
    fn distances() {
        assert!((hyp_distance(P::i(), pt(0.0, 4.0)) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(hyp_distance(pt(0.2, 0.3), pt(0.2, 0.3)), 0.0);
        let z = pt(3.0, 0.2);
        assert!((cosh_distance(P::i(), z) - hyp_distance(P::i(), z).cosh()).abs() < 1e-12);
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&Isometry::dilation(2f64.sqrt())), Classification::Hyperbolic);
        assert_eq!(classify(&Isometry::translation(1.0f64)), Classification::Parabolic);
        assert_eq!(classify(&Isometry::<f64>::identity()), Classification::Identity);
        assert_eq!(classify(&Isometry::rotation(0.5f64)), Classification::Elliptic);
        assert!(translation_length(&Isometry::<f64>::identity()).is_err());
        // diag(2, 1/2) is z ↦ 4z
        let l = translation_length(&Isometry::dilation(2.0f64)).unwrap();
        assert!((l - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn dilation_endpoints() {
        let g = Isometry::dilation(2.0f64);
        let (m, p) = axis_endpoints(&g).unwrap();
        assert_eq!(m, BoundaryPoint::Finite(0.0));
        assert_eq!(p, BoundaryPoint::Infinity);
        let (m2, p2) = axis_endpoints(&g.inverse()).unwrap();
        assert_eq!((m2, p2), (p, m));
    }

    #[test]
    fn busemann_examples() {
        let i = P::i();
        assert_eq!(busemann(BoundaryPoint::Finite(0.4), i, i), 0.0);
        assert!((busemann(BoundaryPoint::Infinity, pt(0.0, 2.0), i) + 2f64.ln()).abs() < 1e-15);
        assert!((busemann(BoundaryPoint::Finite(0.0), i, pt(1.0, 1.0)) + 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn busemann_finite_endpoints() {
        let q = pt(0.5, 2.0);
        let p = pt(-1.0, 0.5);
        assert!((busemann_finite(q, q, p) + hyp_distance(p, q)).abs() < 1e-15);
        assert!((busemann_finite(p, q, p) - hyp_distance(q, p)).abs() < 1e-15);
    }

    #[test]
    fn beta_on_geodesic_vanishes() {
        let b = gromov_beta(P::i(), BoundaryPoint::Finite(0.0), BoundaryPoint::Infinity).unwrap();
        assert!(b.abs() < 1e-15);
        assert!(gromov_beta(P::i(), BoundaryPoint::Infinity, BoundaryPoint::Infinity).is_err());
    }

    #[test]
    fn unit_vector_frame() {
        let up = UnitVector::new(P::i(), std::f64::consts::FRAC_PI_2);
        assert_eq!(up.forward(), BoundaryPoint::Infinity);
        assert_eq!(up.backward(), BoundaryPoint::Finite(0.0));
        let v = UnitVector::new(pt(0.3, 0.7), 2.1);
        let back = UnitVector::from_frame(&v.frame());
        assert!((back.angle - v.angle).abs() < 1e-13);
        assert!((back.base.x - v.base.x).abs() < 1e-14);
        let w = v.flow(1.3);
        assert!((hyp_distance(v.base, w.base) - 1.3).abs() < 1e-12);
        assert_eq!(w.forward(), v.forward());
        let right = UnitVector::new(P::i(), 0.0);
        // heading toward +1 along the unit semicircle
        match right.forward() {
            BoundaryPoint::Finite(x) => assert!((x - 1.0).abs() < 1e-15),
            _ => panic!(),
        }
    }

    #[test]
    fn f32_geometry_works() {
        let g = Isometry::<f32>::dilation(2.0);
        let l = translation_length(&g).unwrap();
        assert!((l - 4f32.ln()).abs() < 1e-5);
    }
}
