//! Flow-box sweeps pooled over many boxes: the counting ratios `R*(t)`,
//! `R(t)`, the lemma checks on every member found and the `Π̂(t)` sandwich.
//!
//! A single box of aperture small enough for the oscillation bounds holds only
//! `e^t m(B)` members, a handful at desk-scale `t`. Boxes at several base
//! points and `⌊π/θ⌋` disjoint directions each are scanned and the counts
//! pooled; every box has the same `m(B)`, so pooled ratios estimate the same
//! limit.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use crate::domain::Polygon;
use crate::enumerate::enumerate_ball_with;
use crate::error::{GeoError, Result};
use crate::flowbox::{
    box_pair_mass, box_radius, evaluate_standard, record, scaling_check, standard_arcs, FlowBoxSpec, GammaCounts,
    IndexedBall, MemberRecord, ScalingReport,
};
use crate::group::FuchsianRep;
use crate::hyperbolic::{axis_endpoints, hyp_distance, translation_length, wrap_angle, Isometry, Point, UnitVector};
use crate::measure::{box_mass, PairMeasureGrid};
use crate::spectrum::LengthSpectrum;
use crate::word::Word;

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub theta: f64,
    pub eps: f64,
    pub alphas: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub base_points: Vec<Point<f64>>,
    /// Box directions per base point, evenly spaced.
    pub directions: usize,
    pub workers: usize,
    pub cap: Option<usize>,
}

/// Base points inside the fundamental polygon, given in the disk.
pub const DISK_BASE_POINTS: [(f64, f64); 5] = [(0.0, 0.0), (0.2, 0.1), (-0.15, 0.25), (0.05, -0.3), (-0.3, -0.1)];

impl SweepConfig {
    pub fn standard(theta: f64, eps: f64, t_grid: Vec<f64>, alphas: Vec<f64>) -> Self {
        let base_points = DISK_BASE_POINTS
            .iter()
            .map(|&(re, im)| Point::from_disk(re, im).expect("point inside the disk"))
            .collect();
        Self {
            theta,
            eps,
            alphas,
            t_grid,
            base_points,
            directions: (PI / theta).floor() as usize,
            workers: 1,
            cap: None,
        }
    }

    pub fn box_count(&self) -> usize {
        self.base_points.len() * self.directions
    }

    /// Centre vector of box `box_id`.
    pub fn box_vector(&self, box_id: usize) -> UnitVector<f64> {
        let dir = 2.0 * PI * (box_id % self.directions) as f64 / self.directions as f64;
        UnitVector::new(self.base_points[box_id / self.directions], dir)
    }

    pub fn alpha_max(&self) -> f64 {
        self.alphas.iter().copied().fold(self.eps, f64::max)
    }
}

/// One `Γ(t, α)` member found in box `box_id`.
#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub box_id: usize,
    pub t: f64,
    pub alpha: f64,
    pub word: Word,
    pub member: MemberRecord,
    /// Set for `Γ*` members.
    pub scaling: Option<ScalingReport>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PooledCounts {
    pub t: f64,
    pub alpha: f64,
    pub counts: GammaCounts,
}

/// `#Γ'(t - 2ε², ε - 4ε²) ≤ #Π̂(t) ≤ #Γ(t, ε) + Σ_{Γ₂} d`, pooled over boxes.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PiSandwich {
    pub t: f64,
    pub pi_hat: usize,
    pub lower: usize,
    pub gamma: usize,
    pub gamma2_weight: usize,
    /// Boxes where one of the inclusions fails.
    pub violations: usize,
    /// Classes met more than `d` times inside one box.
    pub theta_violations: usize,
    /// `Π̂` elements whose class was not found in the spectrum.
    pub unidentified: usize,
}

impl PiSandwich {
    pub fn ok(&self) -> bool {
        self.violations == 0 && self.theta_violations == 0 && self.unidentified == 0
    }
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub genus: usize,
    pub box_radius: f64,
    /// `μ̄(P × F)`, the same for every box.
    pub barmu_pf: f64,
    pub counts: Vec<PooledCounts>,
    pub records: Vec<SweepRecord>,
    pub pi: Vec<PiSandwich>,
}

/// Looks up the class of an element by conjugating its axis into `D`.
pub struct ClassLookup<'a> {
    spectrum: &'a LengthSpectrum,
    polygon: Polygon,
    movers: Vec<Isometry<f64>>,
    /// Lifts sorted by repelling angle: `(minus, plus, class)`.
    lifts: Vec<(f64, f64, usize)>,
}

const LIFT_MATCH: f64 = 1e-7;

impl<'a> ClassLookup<'a> {
    /// `reach` bounds how far from `i` the axes to identify pass.
    pub fn new(rep: &FuchsianRep<f64>, spectrum: &'a LengthSpectrum, reach: f64) -> Result<Self> {
        let radius = reach + rep.fundamental_domain_diameter + 0.5;
        let movers = enumerate_ball_with(rep, radius, 1, None)?.elements.into_iter().map(|e| e.g).collect();
        let mut lifts: Vec<(f64, f64, usize)> = spectrum.lifts.iter().map(|l| (l.minus, l.plus, l.class)).collect();
        lifts.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { spectrum, polygon: Polygon::new(rep), movers, lifts })
    }

    fn find_lift(&self, minus: f64, plus: f64) -> Option<usize> {
        let close = |a: f64, b: f64| {
            let d = wrap_angle(a - b);
            d.min(2.0 * PI - d) <= LIFT_MATCH
        };
        let probe = |lo: f64, hi: f64| {
            let a = self.lifts.partition_point(|l| l.0 < lo);
            self.lifts[a..].iter().take_while(|l| l.0 <= hi).find(|l| close(l.1, plus)).map(|l| l.2)
        };
        probe(minus - LIFT_MATCH, minus + LIFT_MATCH)
            .or_else(|| if minus < LIFT_MATCH { probe(2.0 * PI - LIFT_MATCH, 2.0 * PI) } else { None })
            .or_else(|| if minus > 2.0 * PI - LIFT_MATCH { probe(0.0, LIFT_MATCH) } else { None })
    }

    /// Spectrum index of the class of `g`.
    pub fn class_of(&self, g: &Isometry<f64>) -> Option<usize> {
        for tau in &self.movers {
            let h = tau.inverse().compose(g).compose(tau);
            if self.polygon.axis_meets(&h) {
                let (m, p) = axis_endpoints(&h).ok()?;
                if let Some(c) = self.find_lift(m.angle(), p.angle()) {
                    return Some(c);
                }
            }
        }
        None
    }

    pub fn degree(&self, class: usize) -> usize {
        self.spectrum.entries[class].d
    }
}

/// Ball elements seen from a base point, sorted by displacement.
struct Based {
    idx: usize,
    g: Isometry<f64>,
    disp: f64,
    /// Tangent direction at `i` pointing at `g i`.
    dir: f64,
}

fn based_elements(ball: &IndexedBall, p: Point<f64>) -> Vec<Based> {
    let a = Isometry::affine_to(p);
    let ainv = a.inverse();
    let mut out: Vec<Based> = ball
        .elements()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(idx, e)| {
            let g = ainv.compose(&e.g).compose(&a);
            let q = g.apply(Point::i());
            let (wr, wi) = q.to_disk();
            Based { idx, g, disp: hyp_distance(Point::i(), q), dir: wi.atan2(wr) + FRAC_PI_2 }
        })
        .collect();
    out.sort_by(|x, y| x.disp.total_cmp(&y.disp));
    out
}

/// Angular slack for the direction prefilter: members of a box with
/// displacement at least `d` point within `θ + slack` of the box direction.
fn direction_slack(r_b: f64, d: f64) -> f64 {
    let far = d - 2.0 * r_b;
    if far <= 1.0 {
        return PI;
    }
    4.0 * (2.0 * r_b).sinh() / far.sinh() + 1e-3
}

/// Elements sharing an axis are one fibre of Θ; a fibre larger than the
/// root degree is a violation. A class may still cross a box several times
/// through different lifts, which is not counted here.
fn axis_multiplicity_violations(axes: &mut [(f64, f64, usize)]) -> usize {
    const SAME: f64 = 1e-9;
    axes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut bad = 0;
    let mut k = 0;
    while k < axes.len() {
        let mut j = k + 1;
        while j < axes.len() && axes[j].0 - axes[k].0 < SAME && (axes[j].1 - axes[k].1).abs() < SAME {
            j += 1;
        }
        if j - k > axes[k].2 {
            bad += 1;
        }
        k = j;
    }
    bad
}

struct BoxOut {
    counts: Vec<PooledCounts>,
    records: Vec<SweepRecord>,
    pi: Vec<PiSandwich>,
}

#[allow(clippy::too_many_arguments)]
fn scan_box(
    cfg: &SweepConfig,
    ball: &IndexedBall,
    based: &[Based],
    p: Point<f64>,
    dir: f64,
    box_id: usize,
    r_b: f64,
    classes: Option<&ClassLookup>,
) -> Result<BoxOut> {
    let eps = cfg.eps;
    let eps2 = eps * eps;
    let spec = FlowBoxSpec::new(UnitVector::new(p, dir), cfg.theta, eps, cfg.alpha_max())?;
    let rot = Isometry::rotation(dir - FRAC_PI_2);
    let rinv = rot.inverse();
    let (parc, farc) = standard_arcs(cfg.theta);
    let alpha_low = eps - 4.0 * eps2;
    let mut out = BoxOut { counts: Vec::new(), records: Vec::new(), pi: Vec::new() };
    let mut degrees: HashMap<usize, usize> = HashMap::new();
    for &t in &cfg.t_grid {
        let lo = t - cfg.alpha_max().max(eps) - 2.0 * eps2 - 1e-9;
        let hi = t + 2.0 * r_b + 1e-6;
        let slack = direction_slack(r_b, lo);
        let start = based.partition_point(|b| b.disp < lo);
        let end = based.partition_point(|b| b.disp <= hi);
        let mut counts: Vec<GammaCounts> = vec![GammaCounts::default(); cfg.alphas.len()];
        let mut pi = PiSandwich { t, ..Default::default() };
        // axis endpoints and root degree of each Π̂ element
        let mut pi_axes: Vec<(f64, f64, usize)> = Vec::new();
        for b in &based[start..end] {
            let dd = wrap_angle(b.dir - dir);
            if dd.min(2.0 * PI - dd) > cfg.theta + slack {
                continue;
            }
            let gs = rinv.compose(&b.g).compose(&rot);
            let ev = evaluate_standard(cfg.theta, &gs);
            let orig = &ball.elements()[b.idx].g;
            let mut degree = || *degrees.entry(b.idx).or_insert_with(|| ball.root_degree(orig));
            for (k, &alpha) in cfg.alphas.iter().enumerate() {
                if !ev.in_gamma(t, alpha, eps) {
                    continue;
                }
                let rec = record(&spec.with_alpha(alpha), b.idx, &gs, &ev, t, alpha, &mut degree)?;
                counts[k].gamma += 1;
                counts[k].star += rec.in_star as usize;
                counts[k].prime += rec.in_prime as usize;
                out.records.push(SweepRecord {
                    box_id,
                    t,
                    alpha,
                    word: ball.elements()[b.idx].word.clone(),
                    member: rec,
                    scaling: None,
                });
            }
            if ev.in_gamma(t, eps, eps) {
                pi.gamma += 1;
            }
            if ev.star && ev.in_gamma(t - 2.0 * eps2, alpha_low, eps) && degree() == 1 {
                pi.lower += 1;
            }
            let Ok(len) = translation_length(&gs) else { continue };
            if len > t - eps && len <= t {
                let (m, pl) = axis_endpoints(&gs)?;
                if parc.contains_point(m) && farc.contains_point(pl) {
                    pi.pi_hat += 1;
                    let d = degree();
                    if d >= 2 {
                        pi.gamma2_weight += d;
                    }
                    pi_axes.push((m.angle(), pl.angle(), d));
                    if classes.is_some_and(|cl| cl.class_of(orig).is_none()) {
                        pi.unidentified += 1;
                    }
                }
            }
        }
        if pi.lower > pi.pi_hat || pi.pi_hat > pi.gamma + pi.gamma2_weight {
            pi.violations += 1;
        }
        pi.theta_violations = axis_multiplicity_violations(&mut pi_axes);
        out.pi.push(pi);
        for (k, &alpha) in cfg.alphas.iter().enumerate() {
            out.counts.push(PooledCounts { t, alpha, counts: counts[k] });
        }
    }
    Ok(out)
}

/// Scans every box of the configuration. With a spectrum, `Π̂` elements are
/// also assigned classes for the multiplicity check.
pub fn flowbox_sweep(rep: &FuchsianRep<f64>, cfg: &SweepConfig, spectrum: Option<&LengthSpectrum>) -> Result<SweepResult> {
    if cfg.t_grid.is_empty() || cfg.alphas.is_empty() || cfg.directions == 0 {
        return Err(GeoError::InvalidPoint("empty sweep configuration".into()));
    }
    let r_b = box_radius(cfg.theta, cfg.alpha_max());
    let t_max = cfg.t_grid.iter().copied().fold(f64::MIN, f64::max);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers.max(1)).build().expect("thread pool");
    let mut counts: Vec<PooledCounts> = Vec::new();
    let mut pi: Vec<PiSandwich> = cfg.t_grid.iter().map(|&t| PiSandwich { t, ..Default::default() }).collect();
    let mut records = Vec::new();
    let reach = cfg.base_points.iter().map(|p| hyp_distance(Point::i(), *p)).fold(0.0, f64::max) + r_b;
    let lookup = spectrum.map(|s| ClassLookup::new(rep, s, reach)).transpose()?;
    for (pk, &p) in cfg.base_points.iter().enumerate() {
        let radius = t_max + 2.0 * r_b + 2.0 * hyp_distance(Point::i(), p) + 1e-6;
        let ball = IndexedBall::new(rep, enumerate_ball_with(rep, radius, cfg.workers, cfg.cap)?);
        let based = based_elements(&ball, p);
        let outs: Vec<Result<BoxOut>> = pool.install(|| {
            (0..cfg.directions)
                .into_par_iter()
                .map(|k| {
                    let id = pk * cfg.directions + k;
                    scan_box(cfg, &ball, &based, p, cfg.box_vector(id).angle, id, r_b, lookup.as_ref())
                })
                .collect()
        });
        for o in outs {
            let o = o?;
            if counts.is_empty() {
                counts = o.counts.iter().map(|c| PooledCounts { counts: GammaCounts::default(), ..*c }).collect();
            }
            for (acc, c) in counts.iter_mut().zip(&o.counts) {
                acc.counts.gamma += c.counts.gamma;
                acc.counts.star += c.counts.star;
                acc.counts.prime += c.counts.prime;
            }
            for (acc, c) in pi.iter_mut().zip(&o.pi) {
                acc.pi_hat += c.pi_hat;
                acc.lower += c.lower;
                acc.gamma += c.gamma;
                acc.gamma2_weight += c.gamma2_weight;
                acc.violations += c.violations;
                acc.theta_violations += c.theta_violations;
                acc.unidentified += c.unidentified;
            }
            records.extend(o.records);
        }
        // scaling ratios, once per (box, element)
        let mut cache: HashMap<(usize, usize), ScalingReport> = HashMap::new();
        let grid = PairMeasureGrid::new(p);
        for r in records.iter_mut().filter(|r| r.member.in_star && r.box_id / cfg.directions == pk) {
            let key = (r.box_id, r.member.index);
            if let Some(s) = cache.get(&key) {
                r.scaling = Some(*s);
                continue;
            }
            let spec = FlowBoxSpec::new(cfg.box_vector(r.box_id), cfg.theta, cfg.eps, r.alpha)?;
            let s = scaling_check(&spec, &grid, &ball.elements()[r.member.index].g)?;
            cache.insert(key, s);
            r.scaling = Some(s);
        }
    }
    Ok(SweepResult {
        config: cfg.clone(),
        genus: rep.genus,
        box_radius: r_b,
        barmu_pf: box_pair_mass(cfg.theta)?,
        counts,
        records,
        pi,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingRow {
    pub t: f64,
    pub r_star: f64,
    pub r_gamma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixingSeries {
    pub alpha: f64,
    pub box_mass: f64,
    pub rows: Vec<MixingRow>,
    /// `[e^{-4ε}, e^{4ε}(1 + 4ε²/α)]`.
    pub band: (f64, f64),
    /// Every row with `t ≥ tail_from` has `R*` in the band.
    pub star_tail_ok: bool,
    pub gamma_tail_ok: bool,
}

impl SweepResult {
    /// Probability measure of maximal entropy of one box of depth `alpha`.
    pub fn box_mass(&self, alpha: f64) -> f64 {
        box_mass(self.genus, alpha, self.barmu_pf)
    }

    pub fn boxes(&self) -> usize {
        self.config.box_count()
    }

    /// Distinct `Γ*` members over all boxes and grid points.
    pub fn star_members(&self) -> Vec<&SweepRecord> {
        let mut seen = std::collections::HashSet::new();
        self.records
            .iter()
            .filter(|r| r.member.in_star && seen.insert((r.box_id, r.member.index)))
            .collect()
    }

    pub fn to_csv(&self, comment: &str) -> String {
        use crate::spectrum::fmt17;
        let mut out = String::new();
        for line in comment.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("box,t,alpha,gamma_word,length,in_Gamma,in_GammaStar,in_GammaPrime,window_ok,scaling_ratio\n");
        for r in &self.records {
            let scaling = r.scaling.map(|s| fmt17(s.ratio)).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},true,{},{},{},{}\n",
                r.box_id,
                fmt17(r.t),
                fmt17(r.alpha),
                r.word,
                fmt17(r.member.length),
                r.member.in_star,
                r.member.in_prime,
                r.member.window_ok,
                scaling
            ));
        }
        out
    }
}

/// `R*(t) = #Γ*(t,α) e^{-t} / m(B)` and `R(t)` likewise, per box.
pub fn mixing_ratio_curve(sweep: &SweepResult, alpha: f64, tail_from: f64) -> MixingSeries {
    let eps = sweep.config.eps;
    let mass = sweep.box_mass(alpha);
    let n = sweep.boxes() as f64;
    let band = ((-4.0 * eps).exp(), (4.0 * eps).exp() * (1.0 + 4.0 * eps * eps / alpha));
    let rows: Vec<MixingRow> = sweep
        .counts
        .iter()
        .filter(|c| (c.alpha - alpha).abs() < 1e-12)
        .map(|c| {
            let scale = n * c.t.exp() * mass;
            MixingRow { t: c.t, r_star: c.counts.star as f64 / scale, r_gamma: c.counts.gamma as f64 / scale }
        })
        .collect();
    let inside = |r: f64| r >= band.0 && r <= band.1;
    let tail = rows.iter().filter(|r| r.t >= tail_from);
    MixingSeries {
        alpha,
        box_mass: mass,
        star_tail_ok: tail.clone().all(|r| inside(r.r_star)),
        gamma_tail_ok: tail.clone().all(|r| inside(r.r_gamma)),
        rows,
        band,
    }
}

/// Single-box `Π̂(t)` sandwich over the whole ball, without pooling.
pub fn pi_sandwich_check(
    rep: &FuchsianRep<f64>,
    spec: &FlowBoxSpec,
    ball: &IndexedBall,
    spectrum: &LengthSpectrum,
    t: f64,
) -> Result<PiSandwich> {
    let r_b = box_radius(spec.theta, spec.eps);
    let need = t + 2.0 * r_b + 2.0 * hyp_distance(Point::i(), spec.p());
    if ball.radius() < need {
        return Err(GeoError::BallTooSmall { have: ball.radius(), need });
    }
    let cfg = SweepConfig {
        theta: spec.theta,
        eps: spec.eps,
        alphas: vec![spec.eps],
        t_grid: vec![t],
        base_points: vec![spec.p()],
        directions: 1,
        workers: 1,
        cap: None,
    };
    let lookup = ClassLookup::new(rep, spectrum, hyp_distance(Point::i(), spec.p()) + r_b)?;
    // no prefilter: every element is its own candidate
    let based: Vec<Based> = based_elements(ball, spec.p())
        .into_iter()
        .map(|b| Based { dir: spec.v0.angle, ..b })
        .collect();
    let out = scan_box(&cfg, ball, &based, spec.p(), spec.v0.angle, 0, r_b, Some(&lookup))?;
    Ok(out.pi[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shared_axis_fibres() {
        let mut axes = vec![(3.0, 0.1, 1), (3.1, 0.2, 1), (3.0, 0.1, 1)];
        assert_eq!(axis_multiplicity_violations(&mut axes), 1);
        let mut axes = vec![(3.0, 0.1, 2), (3.0, 0.1, 2), (3.0, 0.3, 1)];
        assert_eq!(axis_multiplicity_violations(&mut axes), 0);
    }

    #[test]
    fn slack_opens_up_near_the_box() {
        assert_eq!(direction_slack(0.1, 1.0), PI);
        assert!(direction_slack(0.1, 10.0) < 1e-3 + 1e-3);
    }
}
