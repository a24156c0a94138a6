//! Orbit enumeration by reverse search.
//!
//! The tiles `γD` are the Voronoi cells of the orbit `Γ·i`, so for `γ ≠ 1` the
//! segment from `γi` back to `i` leaves `γD` through a side, and the
//! neighbour `γs` across it satisfies `d(i, γs·i) < d(i, γ·i)`. The side lines
//! of this tiling are unions of edges and never pass through a tile centre,
//! so the decrease is strict. Calling the closest neighbour (ties to the
//! smaller letter code) the parent makes the elements a tree rooted at the
//! identity in which displacement strictly decreases toward the root.
//!
//! A depth-first walk that only descends into children whose parent is the
//! current node therefore visits each element of the ball `d(i, γi) ≤ R`
//! exactly once, using memory proportional to the depth and no dedup table.
//! Paths are freely reduced words. Subtrees below a fixed depth are walked in
//! parallel and returned in a fixed order, so results do not depend on the
//! number of workers.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{GeoError, Result};
use crate::group::FuchsianRep;
use crate::hyperbolic::Isometry;
use crate::tol;
use crate::word::Word;

pub type Mat = [f64; 4];

const NO_LETTER: u8 = u8::MAX;

#[inline(always)]
pub fn mat_mul(x: &Mat, y: &Mat) -> Mat {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

#[inline(always)]
pub fn norm2(m: &Mat) -> f64 {
    m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3]
}

pub fn to_isometry(m: &Mat) -> Isometry<f64> {
    Isometry::from_entries(m[0], m[1], m[2], m[3])
}

pub fn from_isometry(g: &Isometry<f64>) -> Mat {
    [g.a, g.b, g.c, g.d]
}

/// Receives every element of the ball once, with its tree word and `‖γ‖²`
/// (which is `2 cosh d(i, γi)`).
pub trait Visitor: Send {
    fn visit(&mut self, word: &[u8], m: &Mat, norm2: f64);
}

#[derive(Clone, Debug)]
pub struct OrbitTree {
    gens: Vec<Mat>,
    split_depth: usize,
}

struct Frame {
    m: Mat,
    q: f64,
    last: u8,
    next: u8,
}

impl OrbitTree {
    pub fn new(rep: &FuchsianRep<f64>) -> Self {
        let gens = rep.generators.iter().map(from_isometry).collect();
        OrbitTree { gens, split_depth: 3 }
    }

    pub fn letter_count(&self) -> usize {
        self.gens.len()
    }

    /// True when `c`'s closest neighbour is the one across letter `back`.
    #[inline]
    fn is_parent(&self, c: &Mat, back: usize, q_parent: f64) -> bool {
        let lo = q_parent * (1.0 - tol::TIE);
        let hi = q_parent * (1.0 + tol::TIE);
        for (j, g) in self.gens.iter().enumerate() {
            if j == back {
                continue;
            }
            let qj = norm2(&mat_mul(c, g));
            if qj < lo || (j < back && qj <= hi) {
                return false;
            }
        }
        true
    }

    #[inline]
    fn child(&self, m: &Mat, q: f64, last: u8, s: u8, limit: f64) -> Option<(Mat, f64)> {
        if last != NO_LETTER && s == last ^ 1 {
            return None;
        }
        let c = mat_mul(m, &self.gens[s as usize]);
        let qc = norm2(&c);
        if qc > limit || !self.is_parent(&c, (s ^ 1) as usize, q) {
            return None;
        }
        Some((c, qc))
    }

    fn walk_subtree<V: Visitor>(&self, root: &Node, limit: f64, budget: &Budget, v: &mut V) {
        let mut word = root.word.clone();
        v.visit(&word, &root.m, root.q);
        budget.spend(1);
        let mut stack = vec![Frame {
            m: root.m,
            q: root.q,
            last: word.last().copied().unwrap_or(NO_LETTER),
            next: 0,
        }];
        let n = self.gens.len() as u8;
        let mut local = 0usize;
        while let Some(f) = stack.last_mut() {
            if f.next == n {
                stack.pop();
                if !stack.is_empty() {
                    word.pop();
                }
                continue;
            }
            let s = f.next;
            f.next += 1;
            if let Some((c, qc)) = self.child(&f.m, f.q, f.last, s, limit) {
                word.push(s);
                v.visit(&word, &c, qc);
                stack.push(Frame { m: c, q: qc, last: s, next: 0 });
                local += 1;
                if local == 4096 {
                    if budget.spend(local) {
                        return;
                    }
                    local = 0;
                }
            }
        }
        budget.spend(local);
    }

    /// Nodes at depth `split_depth` in walk order; shallower nodes go to `v`.
    fn prefix<V: Visitor>(&self, node: Node, limit: f64, out: &mut Vec<Node>, v: &mut V) {
        if node.word.len() == self.split_depth {
            out.push(node);
            return;
        }
        v.visit(&node.word, &node.m, node.q);
        let last = node.word.last().copied().unwrap_or(NO_LETTER);
        for s in 0..self.gens.len() as u8 {
            if let Some((c, qc)) = self.child(&node.m, node.q, last, s, limit) {
                let mut word = node.word.clone();
                word.push(s);
                self.prefix(Node { m: c, q: qc, word }, limit, out, v);
            }
        }
    }

    /// Walks the ball of radius `radius` about `i`. Returns one visitor for the
    /// shallow part followed by one per subtree, in walk order.
    pub fn walk<V, F>(&self, radius: f64, workers: usize, cap: Option<usize>, make: F) -> Result<Vec<V>>
    where
        V: Visitor,
        F: Fn() -> V + Sync + Send,
    {
        let limit = 2.0 * radius.max(0.0).cosh();
        let root = Node { m: [1.0, 0.0, 0.0, 1.0], q: 2.0, word: Vec::new() };
        let mut head = make();
        let mut roots = Vec::new();
        self.prefix(root, limit, &mut roots, &mut head);
        let budget = Budget::new(cap);
        budget.spend(1);
        let run = |node: &Node| {
            let mut v = make();
            if !budget.exhausted() {
                self.walk_subtree(node, limit, &budget, &mut v);
            }
            v
        };
        let mut out = vec![head];
        if workers <= 1 {
            out.extend(roots.iter().map(run));
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .expect("thread pool");
            let tails: Vec<V> = pool.install(|| roots.par_iter().map(run).collect());
            out.extend(tails);
        }
        if let Some(cap) = cap {
            if budget.exhausted() {
                return Err(GeoError::CapExceeded { cap, radius, partial: budget.used() });
            }
        }
        Ok(out)
    }
}

struct Node {
    m: Mat,
    q: f64,
    word: Vec<u8>,
}

struct Budget {
    cap: usize,
    used: AtomicUsize,
    over: AtomicBool,
}

impl Budget {
    fn new(cap: Option<usize>) -> Self {
        Budget { cap: cap.unwrap_or(usize::MAX), used: AtomicUsize::new(0), over: AtomicBool::new(false) }
    }

    /// Records `n` more elements; true once the cap is passed.
    fn spend(&self, n: usize) -> bool {
        let total = self.used.fetch_add(n, Ordering::Relaxed).saturating_add(n);
        if total > self.cap {
            self.over.store(true, Ordering::Relaxed);
        }
        self.exhausted()
    }

    fn exhausted(&self) -> bool {
        self.over.load(Ordering::Relaxed)
    }

    fn used(&self) -> usize {
        self.used.load(Ordering::Relaxed)
    }
}

#[derive(Clone, Debug)]
pub struct BallElement {
    pub word: Word,
    pub g: Isometry<f64>,
    /// `d(i, γi)`.
    pub displacement: f64,
}

/// All `γ` with `d(i, γi) ≤ radius`, identity first, in walk order.
#[derive(Clone, Debug)]
pub struct OrbitBall {
    pub radius: f64,
    pub elements: Vec<BallElement>,
}

impl OrbitBall {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `N(R)`: elements with displacement at most `r ≤ radius`.
    pub fn count_within(&self, r: f64) -> usize {
        self.elements.iter().filter(|e| e.displacement <= r).count()
    }
}

#[derive(Default)]
struct Collect(Vec<BallElement>);

impl Visitor for Collect {
    fn visit(&mut self, word: &[u8], m: &Mat, q: f64) {
        self.0.push(BallElement {
            word: Word::from_codes(word),
            g: to_isometry(m),
            displacement: (0.5 * q).max(1.0).acosh(),
        });
    }
}

pub fn enumerate_ball(rep: &FuchsianRep<f64>, radius: f64) -> Result<OrbitBall> {
    enumerate_ball_with(rep, radius, 1, None)
}

pub fn enumerate_ball_with(
    rep: &FuchsianRep<f64>,
    radius: f64,
    workers: usize,
    cap: Option<usize>,
) -> Result<OrbitBall> {
    let parts = OrbitTree::new(rep).walk(radius, workers, cap, Collect::default)?;
    let elements = parts.into_iter().flat_map(|c| c.0).collect();
    Ok(OrbitBall { radius, elements })
}

/// Histogram of displacements in bins of width `step`, for counting `N(R)`
/// without storing the ball.
#[derive(Clone, Debug)]
pub struct DisplacementHistogram {
    pub step: f64,
    pub counts: Vec<u64>,
}

impl DisplacementHistogram {
    pub fn new(radius: f64, step: f64) -> Self {
        DisplacementHistogram { step, counts: vec![0; (radius / step).ceil() as usize + 2] }
    }

    pub fn add(&mut self, displacement: f64) {
        let k = ((displacement / self.step) as usize).min(self.counts.len() - 1);
        self.counts[k] += 1;
    }

    pub fn merge(&mut self, o: &Self) {
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            *a += b;
        }
    }

    /// Elements with displacement below the bin edge nearest `r`.
    pub fn count_below(&self, r: f64) -> u64 {
        let k = ((r / self.step).round() as usize).min(self.counts.len());
        self.counts[..k].iter().sum()
    }
}

struct Histo(DisplacementHistogram);

impl Visitor for Histo {
    fn visit(&mut self, _: &[u8], _: &Mat, q: f64) {
        self.0.add((0.5 * q).max(1.0).acosh());
    }
}

/// Displacement histogram of the ball of radius `radius` about `i`.
pub fn orbit_histogram(
    rep: &FuchsianRep<f64>,
    radius: f64,
    step: f64,
    workers: usize,
    cap: Option<usize>,
) -> Result<DisplacementHistogram> {
    let parts = OrbitTree::new(rep).walk(radius, workers, cap, || {
        Histo(DisplacementHistogram::new(radius, step))
    })?;
    let mut total = DisplacementHistogram::new(radius, step);
    for p in &parts {
        total.merge(&p.0);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_fuchsian_rep;
    use crate::hyperbolic::{hyp_distance, Point};
    use std::collections::HashSet;

    #[test]
    fn radius_zero_is_identity() {
        let rep = build_fuchsian_rep::<f64>(2).unwrap();
        let ball = enumerate_ball(&rep, 0.0).unwrap();
        assert_eq!(ball.len(), 1);
        assert!(ball.elements[0].word.is_empty());
    }

    #[test]
    fn first_shell_is_the_generators() {
        let rep = build_fuchsian_rep::<f64>(2).unwrap();
        let ball = enumerate_ball(&rep, 2.0 * rep.inradius + 1e-9).unwrap();
        assert_eq!(ball.len(), 9);
    }

    #[test]
    fn ball_elements_are_distinct_and_inside() {
        let rep = build_fuchsian_rep::<f64>(2).unwrap();
        let ball = enumerate_ball(&rep, 8.0).unwrap();
        let mut seen = HashSet::new();
        for e in &ball.elements {
            let z = e.g.apply(Point::i());
            assert!(hyp_distance(Point::i(), z) <= 8.0 + 1e-9);
            let key = ((z.x * 1e6).round() as i64, (z.y * 1e6).round() as i64);
            assert!(seen.insert(key), "orbit point repeated: {}", e.word);
            assert!((rep.word_to_matrix(&e.word).distance_pm(&e.g)) < 1e-9);
        }
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let rep = build_fuchsian_rep::<f64>(2).unwrap();
        let a = enumerate_ball_with(&rep, 9.0, 1, None).unwrap();
        let b = enumerate_ball_with(&rep, 9.0, 4, None).unwrap();
        let wa: Vec<_> = a.elements.iter().map(|e| e.word.clone()).collect();
        let wb: Vec<_> = b.elements.iter().map(|e| e.word.clone()).collect();
        assert_eq!(wa, wb);
    }

    #[test]
    fn cap_is_reported() {
        let rep = build_fuchsian_rep::<f64>(2).unwrap();
        match enumerate_ball_with(&rep, 10.0, 1, Some(1000)) {
            Err(GeoError::CapExceeded { partial, .. }) => assert!(partial > 1000),
            other => panic!("{other:?}"),
        }
    }
}
