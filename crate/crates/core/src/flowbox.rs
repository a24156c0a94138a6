//! Flow boxes in Hopf coordinates and the deck-group sets they single out.
//!
//! A box is described by a unit vector `v0` at `p`, an aperture `θ`, a scale
//! `ε` and a depth `α`. Every predicate is evaluated after conjugating by
//! `frame(v0)⁻¹`, which puts the box at `i` pointing up: then
//! `F = [-θ, θ]` and `P = [π-θ, π+θ]` in Cayley angles.
//!
//! For `q = γi` and `w` its disk image, `b_ξ(q, i) = log(|e^{iφ} - w|² / (1 - |w|²))`,
//! which is smallest at `φ = arg w` and largest at `arg w + π` and monotone in
//! between. Ranges of `b_ξ^γ` over an arc are therefore exact from at most
//! four evaluations.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::enumerate::{from_isometry, mat_mul, BallElement, Mat, OrbitBall};
use crate::error::{GeoError, Result};
use crate::group::FuchsianRep;
use crate::hyperbolic::{
    axis_endpoints, busemann, hyp_distance, translation_length, wrap_angle, BoundaryPoint, Isometry, Point,
    UnitVector,
};
use crate::measure::{barmu_mass, PairMeasureGrid};
use crate::spectrum::MatrixIndex;
use crate::tol;

/// Closed counterclockwise arc `[start, start + width]` of Cayley angles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryArc {
    pub start: f64,
    pub width: f64,
}

impl BoundaryArc {
    pub fn new(start: f64, width: f64) -> Self {
        assert!((0.0..TAU).contains(&width), "arc width {width} outside [0, 2π)");
        Self { start: wrap_angle(start), width }
    }

    pub fn around(center: f64, half_width: f64) -> Self {
        Self::new(center - half_width, 2.0 * half_width)
    }

    pub fn end(&self) -> f64 {
        wrap_angle(self.start + self.width)
    }

    pub fn mid(&self) -> f64 {
        wrap_angle(self.start + 0.5 * self.width)
    }

    fn offset(&self, phi: f64) -> f64 {
        wrap_angle(phi - self.start)
    }

    pub fn contains(&self, phi: f64) -> bool {
        let o = self.offset(phi);
        o <= self.width || o >= TAU - tol::TIE
    }

    pub fn contains_point(&self, xi: BoundaryPoint<f64>) -> bool {
        self.contains(xi.angle())
    }

    pub fn contains_arc(&self, o: &BoundaryArc) -> bool {
        let mut s = self.offset(o.start);
        if s >= TAU - tol::TIE {
            s = 0.0;
        }
        s + o.width <= self.width
    }

    /// `self ∩ o`: up to two closed arcs.
    pub fn intersect(&self, o: &BoundaryArc) -> Vec<BoundaryArc> {
        let s = self.offset(o.start);
        let mut out = Vec::new();
        for shift in [0.0, -TAU] {
            let lo = (s + shift).max(0.0);
            let hi = (s + shift + o.width).min(self.width);
            if lo <= hi {
                out.push(BoundaryArc { start: wrap_angle(self.start + lo), width: hi - lo });
            }
        }
        out
    }

    /// Image under a Möbius map, which preserves the circular order.
    pub fn image(&self, g: &Isometry<f64>) -> BoundaryArc {
        let a = g.apply_boundary(BoundaryPoint::from_angle(self.start)).angle();
        if self.width == 0.0 {
            return BoundaryArc { start: a, width: 0.0 };
        }
        let b = g.apply_boundary(BoundaryPoint::from_angle(self.start + self.width)).angle();
        let w = wrap_angle(b - a);
        BoundaryArc { start: a, width: if w >= TAU - tol::TIE { 0.0 } else { w } }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowBoxSpec {
    pub v0: UnitVector<f64>,
    pub theta: f64,
    pub eps: f64,
    pub alpha: f64,
}

impl FlowBoxSpec {
    pub fn new(v0: UnitVector<f64>, theta: f64, eps: f64, alpha: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(GeoError::ApertureTooLarge { theta });
        }
        if !(eps > 0.0 && alpha > 0.0 && alpha <= 1.5 * eps + tol::TIE) {
            return Err(GeoError::InvalidPoint(format!("eps = {eps}, alpha = {alpha}")));
        }
        Ok(Self { v0, theta, eps, alpha })
    }

    pub fn p(&self) -> Point<f64> {
        self.v0.base
    }

    pub fn frame(&self) -> Isometry<f64> {
        self.v0.frame()
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..*self }
    }

    /// `M⁻¹ g M` for `M = frame(v0)`.
    pub fn standardize(&self, g: &Isometry<f64>) -> Isometry<f64> {
        let m = self.frame();
        m.inverse().compose(g).compose(&m)
    }
}

/// `(P, F)` for the box at `i` pointing up.
pub fn standard_arcs(theta: f64) -> (BoundaryArc, BoundaryArc) {
    (BoundaryArc::around(PI, theta), BoundaryArc::around(0.0, theta))
}

/// Backward and forward endpoint arcs of the θ-cone around `v0`.
pub fn arcs(spec: &FlowBoxSpec) -> Result<(BoundaryArc, BoundaryArc)> {
    if spec.theta >= FRAC_PI_2 {
        return Err(GeoError::ApertureTooLarge { theta: spec.theta });
    }
    let (p, f) = standard_arcs(spec.theta);
    let m = spec.frame();
    Ok((p.image(&m), f.image(&m)))
}

/// `s(v) = b_{v⁻}(πv, p)`.
pub fn s_coordinate(spec: &FlowBoxSpec, v: &UnitVector<f64>) -> f64 {
    busemann(v.backward(), v.base, spec.p())
}

/// Range of `ξ ↦ b_ξ(q, i)` over an arc.
fn busemann_range(q: Point<f64>, arc: &BoundaryArc) -> (f64, f64) {
    let (wr, wi) = q.to_disk();
    let near = wi.atan2(wr);
    let b = |phi: f64| busemann(BoundaryPoint::from_angle(phi), q, Point::i());
    let mut lo = b(arc.start).min(b(arc.start + arc.width));
    let mut hi = b(arc.start).max(b(arc.start + arc.width));
    if arc.contains(near) {
        lo = lo.min(b(near));
    }
    if arc.contains(near + PI) {
        hi = hi.max(b(near + PI));
    }
    (lo, hi)
}

/// The data of a standardized element that all the membership tests use.
#[derive(Clone, Debug)]
pub struct Evaluation {
    /// `γF ⊂ F` and `γ⁻¹P ⊂ P`.
    pub star: bool,
    /// `F ∩ γF ≠ ∅`.
    pub meets_f: bool,
    /// Range of `b_ξ^γ` over each component of `P ∩ γP`.
    pub ranges: Vec<(f64, f64)>,
    /// Range of `b_ξ^γ` over all of `P`.
    pub full: (f64, f64),
}

impl Evaluation {
    /// Some `ξ ∈ P ∩ γP` has `b_ξ^γ ∈ [t - α, t + ε²]`.
    pub fn in_gamma(&self, t: f64, alpha: f64, eps: f64) -> bool {
        self.meets_f && self.ranges.iter().any(|&(lo, hi)| lo <= t + eps * eps && hi >= t - alpha)
    }

    pub fn oscillation(&self) -> f64 {
        self.full.1 - self.full.0
    }
}

/// Evaluates `g`, already conjugated so the box sits at `i` pointing up.
pub fn evaluate_standard(theta: f64, g: &Isometry<f64>) -> Evaluation {
    let (p, f) = standard_arcs(theta);
    let gf = f.image(g);
    let gp = p.image(g);
    let ginv_p = p.image(&g.inverse());
    let star = f.contains_arc(&gf) && p.contains_arc(&ginv_p);
    let meets_f = !f.intersect(&gf).is_empty();
    let q = g.apply(Point::i());
    let ranges = p.intersect(&gp).iter().map(|a| busemann_range(q, a)).collect();
    Evaluation { star, meets_f, ranges, full: busemann_range(q, &p) }
}

pub fn gamma_star_member(spec: &FlowBoxSpec, g: &Isometry<f64>) -> bool {
    evaluate_standard(spec.theta, &spec.standardize(g)).star
}

pub fn gamma_t_alpha_member(spec: &FlowBoxSpec, g: &Isometry<f64>, t: f64) -> bool {
    evaluate_standard(spec.theta, &spec.standardize(g)).in_gamma(t, spec.alpha, spec.eps)
}

/// Largest distance from `p` to a footpoint in the box, from a grid over
/// `P × F × {0, α/2, α}`.
pub fn box_radius(theta: f64, alpha: f64) -> f64 {
    box_points(theta, alpha, 17).iter().map(|q| hyp_distance(Point::i(), *q)).fold(0.0, f64::max)
}

/// Footpoints of a grid of vectors in the standard box.
pub fn box_points(theta: f64, alpha: f64, n: usize) -> Vec<Point<f64>> {
    let (p, f) = standard_arcs(theta);
    let frac = |k: usize| k as f64 / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n * 3);
    for i in 0..n {
        let xi = BoundaryPoint::from_angle(p.start + p.width * frac(i));
        for j in 0..n {
            let eta = BoundaryPoint::from_angle(f.start + f.width * frac(j));
            let q0 = crate::hyperbolic::GeodesicLine { minus: xi, plus: eta }.point();
            let s0 = busemann(xi, q0, Point::i());
            let v = UnitVector::toward(q0, eta);
            for s in [0.0, 0.5 * alpha, alpha] {
                out.push(v.flow(s - s0).base);
            }
        }
    }
    out
}

/// Diameter of the footpoint set of the box, by sampling.
pub fn box_diameter(theta: f64, alpha: f64) -> f64 {
    let pts = box_points(theta, alpha, 9);
    let mut d: f64 = 0.0;
    for (k, a) in pts.iter().enumerate() {
        for b in &pts[k + 1..] {
            d = d.max(hyp_distance(*a, *b));
        }
    }
    d
}

/// An orbit ball with a matrix index, so roots can be looked up.
pub struct IndexedBall {
    pub ball: OrbitBall,
    index: MatrixIndex,
    /// Lower bound for the translation length of any nontrivial element.
    min_length: f64,
}

impl IndexedBall {
    pub fn new(rep: &FuchsianRep<f64>, ball: OrbitBall) -> Self {
        let index = MatrixIndex::new(ball.elements.iter().map(|e| from_isometry(&e.g)).collect());
        // the side pairings of the regular polygon realize the systole
        let min_length = rep.generator_length() - 1e-9;
        Self { ball, index, min_length }
    }

    pub fn radius(&self) -> f64 {
        self.ball.radius
    }

    pub fn elements(&self) -> &[BallElement] {
        &self.ball.elements
    }

    /// Largest `k` with `g = β^k` for some `β` in the group.
    ///
    /// A `k`-th root shares the axis and has length `|g|/k`, so it is
    /// `(g + U_{k-2} I)/U_{k-1}` with `U_n = sinh((n+1)x)/sinh x`,
    /// `x = |g|/2k`. It moves `i` no farther than `g` does, so it lies in the
    /// ball whenever `g` does.
    pub fn root_degree(&self, g: &Isometry<f64>) -> usize {
        let Ok(len) = translation_length(g) else { return 1 };
        let g = if g.trace() < 0.0 { g.neg() } else { *g };
        let kmax = (len / self.min_length).floor() as usize;
        for k in (2..=kmax).rev() {
            let x = len / (2.0 * k as f64);
            let u = |n: usize| ((n + 1) as f64 * x).sinh() / x.sinh();
            let (u1, u2) = (u(k - 1), u(k - 2));
            let beta: Mat = [(g.a + u2) / u1, g.b / u1, g.c / u1, (g.d + u2) / u1];
            if let Some(ix) = self.index.find(&beta) {
                let b = from_isometry(&self.ball.elements[ix].g);
                let mut pw = b;
                for _ in 1..k {
                    pw = mat_mul(&pw, &b);
                }
                let gm = from_isometry(&g);
                let scale = 1.0 + crate::enumerate::norm2(&gm).sqrt();
                let diff = (0..4).map(|j| (pw[j] - gm[j]).abs()).fold(0.0, f64::max);
                let sum = (0..4).map(|j| (pw[j] + gm[j]).abs()).fold(0.0, f64::max);
                if diff.min(sum) <= 1e-6 * scale {
                    return k;
                }
            }
        }
        1
    }
}

/// One member of `Γ(t, α)` with the lemma checks attached.
#[derive(Clone, Debug)]
pub struct MemberRecord {
    pub index: usize,
    pub length: f64,
    pub in_star: bool,
    pub in_prime: bool,
    /// `|γ| ∈ [t - α - ε², t + 2ε²]`; only asserted for `Γ*` members.
    pub window_ok: bool,
    /// `ξ⁻ ∈ P` and `ξ⁺ ∈ F`.
    pub endpoints_ok: bool,
    /// The whole range of `b_ξ^γ` over `P` lies in `[t - α - ε², t + 2ε²]`.
    pub full_branch_ok: bool,
    pub oscillation: f64,
    /// `|b_{ξ⁻}^γ - |γ||`.
    pub axis_residual: f64,
}

impl MemberRecord {
    /// The zero-tolerance checks: window and full branch for `Γ*` members,
    /// oscillation below `ε²` for every member.
    pub fn violations(&self, eps: f64) -> usize {
        let mut n = 0;
        if self.in_star && !self.window_ok {
            n += 1;
        }
        if self.in_star && !self.endpoints_ok {
            n += 1;
        }
        if self.in_star && !self.full_branch_ok {
            n += 1;
        }
        if self.oscillation >= eps * eps {
            n += 1;
        }
        n
    }
}

pub(crate) fn record(
    spec: &FlowBoxSpec,
    index: usize,
    g_std: &Isometry<f64>,
    ev: &Evaluation,
    t: f64,
    alpha: f64,
    degree: impl FnOnce() -> usize,
) -> Result<MemberRecord> {
    let eps2 = spec.eps * spec.eps;
    let slack = tol::ALGEBRAIC;
    let length = translation_length(g_std)?;
    let (minus, plus) = axis_endpoints(g_std)?;
    let (p, f) = standard_arcs(spec.theta);
    let lo = t - alpha - eps2 - slack;
    let hi = t + 2.0 * eps2 + slack;
    let axis_b = busemann(minus, g_std.apply(Point::i()), Point::i());
    Ok(MemberRecord {
        index,
        length,
        in_star: ev.star,
        in_prime: ev.star && degree() == 1,
        window_ok: (lo..=hi).contains(&length),
        endpoints_ok: p.contains_point(minus) && f.contains_point(plus),
        full_branch_ok: ev.full.0 >= lo && ev.full.1 <= hi,
        oscillation: ev.oscillation(),
        axis_residual: (axis_b - length).abs(),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GammaCounts {
    pub gamma: usize,
    pub star: usize,
    pub prime: usize,
}

/// Radius about `i` the ball needs so that every member of `Γ(t, α)` for a
/// box at `p` is enumerated.
pub fn required_radius(spec: &FlowBoxSpec, t: f64, alpha: f64) -> f64 {
    t + 2.0 * box_radius(spec.theta, alpha) + 2.0 * hyp_distance(Point::i(), spec.p()) + 1e-6
}

/// Members of `Γ(t, α)` in the ball, with their checks.
pub fn gamma_members(spec: &FlowBoxSpec, ball: &IndexedBall, t: f64, alpha: f64) -> Result<Vec<MemberRecord>> {
    let need = required_radius(spec, t, alpha);
    if ball.radius() < need {
        return Err(GeoError::BallTooSmall { have: ball.radius(), need });
    }
    let m = spec.frame();
    let minv = m.inverse();
    let mut out = Vec::new();
    for (k, e) in ball.elements().iter().enumerate() {
        if k == 0 {
            continue;
        }
        let gs = minv.compose(&e.g).compose(&m);
        let ev = evaluate_standard(spec.theta, &gs);
        if ev.in_gamma(t, alpha, spec.eps) {
            out.push(record(spec, k, &gs, &ev, t, alpha, || ball.root_degree(&e.g))?);
        }
    }
    Ok(out)
}

/// `(|Γ(t,α)|, |Γ*(t,α)|, |Γ'(t,α)|)`.
pub fn count_gamma_sets(spec: &FlowBoxSpec, ball: &IndexedBall, t: f64, alpha: f64) -> Result<GammaCounts> {
    let members = gamma_members(spec, ball, t, alpha)?;
    Ok(GammaCounts {
        gamma: members.len(),
        star: members.iter().filter(|r| r.in_star).count(),
        prime: members.iter().filter(|r| r.in_prime).count(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingReport {
    pub ratio: f64,
    pub band: (f64, f64),
    pub within: bool,
    /// Relative quadrature error of the ratio.
    pub rel_error: f64,
}

/// `μ̄(P × γF) / (e^{-|γ|} μ̄(P × F))` against `[e^{-2ε}, e^{2ε}]`.
pub fn scaling_check(spec: &FlowBoxSpec, grid: &PairMeasureGrid, g: &Isometry<f64>) -> Result<ScalingReport> {
    let (p, f) = arcs(spec)?;
    let len = translation_length(g)?;
    let num = barmu_mass(grid, &p, &f.image(g))?;
    let den = barmu_mass(grid, &p, &f)?;
    let ratio = num.value / ((-len).exp() * den.value);
    let band = ((-2.0 * spec.eps).exp(), (2.0 * spec.eps).exp());
    Ok(ScalingReport {
        ratio,
        band,
        within: ratio >= band.0 && ratio <= band.1,
        rel_error: num.error / num.value + den.error / den.value,
    })
}

/// `μ̄(P_θ × F_θ)` for the standard box.
pub fn box_pair_mass(theta: f64) -> Result<f64> {
    let (p, f) = standard_arcs(theta);
    Ok(barmu_mass(&PairMeasureGrid::new(Point::i()), &p, &f)?.value)
}

/// Relative variation of `μ̄(P_ρ × F_ρ)` over `ρ ∈ [θ - δ, θ + δ]`.
pub fn continuity_gate(theta: f64, delta: f64) -> Result<f64> {
    let lo = box_pair_mass(theta - delta)?;
    let hi = box_pair_mass(theta + delta)?;
    let mid = box_pair_mass(theta)?;
    Ok((hi - lo) / mid)
}

/// Sampled geometry of the standard box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApertureReport {
    pub theta: f64,
    pub eps: f64,
    pub radius: f64,
    pub diameter: f64,
    /// Relative variation of `μ̄(P × F)` under an aperture change of `1e-6`.
    pub continuity: f64,
}

impl ApertureReport {
    pub fn ok(&self) -> bool {
        self.diameter < 2.0 * self.eps && self.continuity < 1e-3
    }
}

pub fn aperture_report(theta: f64, eps: f64) -> Result<ApertureReport> {
    let alpha = 1.5 * eps;
    Ok(ApertureReport {
        theta,
        eps,
        radius: box_radius(theta, alpha),
        diameter: box_diameter(theta, alpha),
        continuity: continuity_gate(theta, 1e-6)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up() -> UnitVector<f64> {
        UnitVector::new(Point::i(), FRAC_PI_2)
    }

    #[test]
    fn arc_set_operations() {
        let a = BoundaryArc::new(6.0, 1.0); // wraps through 0
        assert!(a.contains(0.5) && a.contains(6.1) && !a.contains(1.5));
        assert!(a.contains_arc(&BoundaryArc::new(6.2, 0.5)));
        assert!(!a.contains_arc(&BoundaryArc::new(6.2, 1.0)));
        let b = BoundaryArc::new(0.5, 5.6); // meets a at both ends
        let pieces = a.intersect(&b);
        assert_eq!(pieces.len(), 2);
        let total: f64 = pieces.iter().map(|p| p.width).sum();
        assert!((total - (0.5 + (0.5 + 5.6 - TAU))).abs() < 1e-12);
        assert!(a.intersect(&BoundaryArc::new(2.0, 1.0)).is_empty());
    }

    #[test]
    fn standard_box_arcs() {
        let spec = FlowBoxSpec::new(up(), 0.1, 0.1, 0.1).unwrap();
        let (p, f) = arcs(&spec).unwrap();
        assert!(p.contains_point(BoundaryPoint::Finite(0.0)));
        assert!(f.contains_point(BoundaryPoint::Infinity));
        assert!((p.width - 0.2).abs() < 1e-12 && (f.width - 0.2).abs() < 1e-12);
        assert!(FlowBoxSpec::new(up(), FRAC_PI_2, 0.1, 0.1).is_err());
    }

    #[test]
    fn north_south_dynamics() {
        // F = {|x| > 10}, P = {|x| < 0.1}
        let theta = 2.0 * 0.1f64.atan();
        let spec = FlowBoxSpec::new(up(), theta, 0.1, 0.1).unwrap();
        let g = Isometry::dilation(2.0);
        assert!(gamma_star_member(&spec, &g));
        assert!(!gamma_star_member(&spec, &g.inverse()));
    }

    #[test]
    fn axis_through_box() {
        let spec = FlowBoxSpec::new(up(), 0.05, 0.1, 0.1).unwrap();
        let g = Isometry::dilation(3f64.exp());
        assert!(gamma_t_alpha_member(&spec, &g, 6.0));
        assert!(gamma_t_alpha_member(&spec, &g, 6.05));
        assert!(!gamma_t_alpha_member(&spec, &g, 6.0 - 0.011 - 0.03));
        assert!(!gamma_t_alpha_member(&spec, &g, 6.0 + 0.1 + 0.031));
    }

    #[test]
    fn s_coordinate_flows() {
        let spec = FlowBoxSpec::new(up(), 0.05, 0.1, 0.1).unwrap();
        assert_eq!(s_coordinate(&spec, &up()), 0.0);
        let v = UnitVector::new(Point::new(0.3, 0.8).unwrap(), 1.0);
        let s0 = s_coordinate(&spec, &v);
        assert!((s_coordinate(&spec, &v.flow(2.5)) - s0 - 2.5).abs() < 1e-9);
    }
}
