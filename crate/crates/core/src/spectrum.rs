//! Conjugacy classes by translation length.
//!
//! Every class of length `ℓ ≤ t` has a conjugate whose axis meets the closed
//! polygon `D`. If `q` is such a point then `d(i, γi) ≤ d(i, q) + d(q, γq) +
//! d(γq, γi) ≤ ℓ + 2·circumradius`, so the ball of radius `t + diam(D)`
//! contains every such conjugate. Call that finite set `E`.
//!
//! The tiles met by an axis form a side-adjacent chain, and moving along it
//! conjugates by a generator, so the classes are the connected components
//! of `E` under `e ↦ s⁻¹ e s`. Roots come from the geometry: `e = x^k` with
//! `x ∈ E` is detected by looking `x^k` up in `E`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::domain::Polygon;
use crate::enumerate::{from_isometry, mat_mul, norm2, to_isometry, DisplacementHistogram, Mat, OrbitTree, Visitor};
use crate::error::{GeoError, Result};
use crate::group::FuchsianRep;
use crate::hyperbolic::{axis_endpoints, translation_length, BoundaryPoint};
use crate::tol;
use crate::word::{canonical_conj_form, ConjClass, Word};

#[derive(Clone, Debug)]
pub struct SpectrumEntry {
    pub length: f64,
    pub class: ConjClass,
    pub root: ConjClass,
    pub d: usize,
    /// `(repelling, attracting)` fixed points of the class word's matrix.
    pub endpoints: (BoundaryPoint<f64>, BoundaryPoint<f64>),
    /// Index of the class of `γ⁻¹`.
    pub reverse: usize,
    /// Index of the primitive root's class.
    pub root_index: usize,
}

/// A conjugate whose axis meets `D`, with its Cayley endpoint angles and
/// the length of the axis inside `D`.
#[derive(Clone, Copy, Debug)]
pub struct AxisLift {
    pub class: usize,
    pub minus: f64,
    pub plus: f64,
    pub chord: f64,
}

#[derive(Clone, Debug)]
pub struct LengthSpectrum {
    pub genus: usize,
    pub t_max: f64,
    pub entries: Vec<SpectrumEntry>,
    pub lifts: Vec<AxisLift>,
    /// Displacement histogram of the enumerated ball, when requested.
    pub histogram: Option<DisplacementHistogram>,
}

#[derive(Clone, Debug)]
pub struct SpectrumOptions {
    pub workers: usize,
    pub cap: Option<usize>,
    /// Bin width of the displacement histogram, if one is wanted.
    pub histogram_step: Option<f64>,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { workers: 1, cap: None, histogram_step: None }
    }
}

/// Radius of the ball searched for classes of length at most `t_max`.
pub fn spectrum_radius(rep: &FuchsianRep<f64>, t_max: f64) -> f64 {
    t_max + rep.fundamental_domain_diameter + 1e-9
}

struct Candidates<'a> {
    polygon: &'a Polygon,
    trace_max: f64,
    found: Vec<(Mat, Vec<u8>)>,
    hist: Option<DisplacementHistogram>,
}

impl Visitor for Candidates<'_> {
    fn visit(&mut self, word: &[u8], m: &Mat, q: f64) {
        if let Some(h) = &mut self.hist {
            h.add((0.5 * q).max(1.0).acosh());
        }
        let tr = (m[0] + m[3]).abs();
        if tr > self.trace_max || tr <= 2.0 + tol::TRACE {
            return;
        }
        if self.polygon.axis_meets(&to_isometry(m)) {
            self.found.push((*m, word.to_vec()));
        }
    }
}

/// Hash index from matrices (up to sign) to positions.
pub struct MatrixIndex {
    map: HashMap<[i64; 4], Vec<u32>>,
    mats: Vec<Mat>,
}

fn sign_normalized(m: &Mat) -> Mat {
    let scale = 1.0 + norm2(m).sqrt();
    let lead = m[..3].iter().copied().find(|v| v.abs() > 1e-7 * scale).unwrap_or(m[3]);
    if lead < 0.0 {
        [-m[0], -m[1], -m[2], -m[3]]
    } else {
        *m
    }
}

fn quantize(v: f64) -> (i64, Option<i64>) {
    let x = v / tol::MATRIX_KEY_STEP;
    let r = x.round();
    let f = x - r;
    let alt = if f > 0.25 {
        Some(r as i64 + 1)
    } else if f < -0.25 {
        Some(r as i64 - 1)
    } else {
        None
    };
    (r as i64, alt)
}

fn key(m: &Mat) -> [i64; 4] {
    let n = sign_normalized(m);
    [quantize(n[0]).0, quantize(n[1]).0, quantize(n[2]).0, quantize(n[3]).0]
}

fn same(a: &Mat, b: &Mat) -> bool {
    let scale = 1.0 + norm2(a).sqrt();
    let plus = (0..4).map(|k| (a[k] - b[k]).abs()).fold(0.0, f64::max);
    let minus = (0..4).map(|k| (a[k] + b[k]).abs()).fold(0.0, f64::max);
    plus.min(minus) <= tol::MATRIX_MATCH * scale
}

impl MatrixIndex {
    pub fn new(mats: Vec<Mat>) -> Self {
        let mut map: HashMap<[i64; 4], Vec<u32>> = HashMap::with_capacity(mats.len());
        for (i, m) in mats.iter().enumerate() {
            map.entry(key(m)).or_default().push(i as u32);
        }
        MatrixIndex { map, mats }
    }

    pub fn find(&self, m: &Mat) -> Option<usize> {
        for cand in [sign_normalized(m), {
            let n = sign_normalized(m);
            [-n[0], -n[1], -n[2], -n[3]]
        }] {
            let q: Vec<(i64, Option<i64>)> = cand.iter().map(|&v| quantize(v)).collect();
            let opts = |k: usize| -> Vec<i64> {
                let (r, alt) = q[k];
                std::iter::once(r).chain(alt).collect()
            };
            for a in opts(0) {
                for b in opts(1) {
                    for c in opts(2) {
                        for d in opts(3) {
                            if let Some(ids) = self.map.get(&[a, b, c, d]) {
                                for &i in ids {
                                    if same(&self.mats[i as usize], m) {
                                        return Some(i as usize);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        None
    }

    pub fn push(&mut self, m: Mat) -> usize {
        let i = self.mats.len();
        self.map.entry(key(&m)).or_default().push(i as u32);
        self.mats.push(m);
        i
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n as u32).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] as usize != x {
            let up = self.0[self.0[x] as usize];
            self.0[x] = up;
            x = up as usize;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo as u32;
        }
    }
}

fn length_key(l: f64) -> i64 {
    (l * 1e9).round() as i64
}

pub fn conjugacy_spectrum(rep: &FuchsianRep<f64>, t_max: f64) -> Result<LengthSpectrum> {
    conjugacy_spectrum_with(rep, t_max, &SpectrumOptions::default())
}

pub fn conjugacy_spectrum_with(
    rep: &FuchsianRep<f64>,
    t_max: f64,
    opts: &SpectrumOptions,
) -> Result<LengthSpectrum> {
    let polygon = Polygon::new(rep);
    let radius = spectrum_radius(rep, t_max);
    let trace_max = 2.0 * (0.5 * t_max).cosh() * (1.0 + 1e-12);
    let parts = OrbitTree::new(rep).walk(radius, opts.workers, opts.cap, || Candidates {
        polygon: &polygon,
        trace_max,
        found: Vec::new(),
        hist: opts.histogram_step.map(|s| DisplacementHistogram::new(radius, s)),
    })?;
    let mut histogram = None;
    let mut found = Vec::new();
    for p in parts {
        if let Some(h) = p.hist {
            match &mut histogram {
                None => histogram = Some(h),
                Some(acc) => DisplacementHistogram::merge(acc, &h),
            }
        }
        found.extend(p.found);
    }
    let mut s = classes_from_lifts(rep, &polygon, t_max, found)?;
    s.histogram = histogram;
    Ok(s)
}

fn classes_from_lifts(
    rep: &FuchsianRep<f64>,
    polygon: &Polygon,
    t_max: f64,
    found: Vec<(Mat, Vec<u8>)>,
) -> Result<LengthSpectrum> {
    let n = found.len();
    let index = MatrixIndex::new(found.iter().map(|(m, _)| *m).collect());
    let gens: Vec<Mat> = rep.generators.iter().map(from_isometry).collect();

    let mut uf = UnionFind::new(n);
    for (i, (m, _)) in found.iter().enumerate() {
        for l in (0..gens.len()).step_by(2) {
            // s⁻¹ e s
            let c = mat_mul(&mat_mul(&gens[l + 1], m), &gens[l]);
            if let Some(j) = index.find(&c) {
                uf.union(i, j);
            }
        }
    }

    // e = x^k with x ∈ E; keep the largest k, whose x is primitive
    let trace_cap = 2.0 * (0.5 * t_max).cosh() * (1.0 + 1e-9);
    let mut power: Vec<(usize, usize)> = (0..n).map(|i| (1, i)).collect();
    for (i, (m, _)) in found.iter().enumerate() {
        let mut p = *m;
        for k in 2.. {
            p = mat_mul(&p, m);
            if (p[0] + p[3]).abs() > trace_cap {
                break;
            }
            if let Some(j) = index.find(&p) {
                if k > power[j].0 {
                    power[j] = (k, i);
                }
            }
        }
    }

    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        members.entry(uf.find(i)).or_default().push(i);
    }
    let mut reps: Vec<usize> = members.keys().copied().collect();
    reps.sort_unstable();
    let class_id: HashMap<usize, usize> = reps.iter().enumerate().map(|(c, &r)| (r, c)).collect();
    let of = |uf: &mut UnionFind, i: usize| class_id[&uf.find(i)];

    struct Raw {
        d: usize,
        root: usize,
        reverse: usize,
        word: Option<ConjClass>,
    }
    let mut raw: Vec<Raw> = Vec::with_capacity(reps.len());
    for &r in &reps {
        let ms = &members[&r];
        let d = ms.iter().map(|&i| power[i].0).max().unwrap_or(1);
        let carrier = *ms.iter().find(|&&i| power[i].0 == d).expect("member with the class exponent");
        let root = of(&mut uf, power[carrier].1);
        let inv = {
            let m = &found[ms[0]].0;
            [m[3], -m[1], -m[2], m[0]]
        };
        let reverse = match index.find(&inv) {
            Some(j) => of(&mut uf, j),
            None => usize::MAX,
        };
        raw.push(Raw { d, root, reverse, word: None });
    }
    // primitive classes first: shortest rotation-minimal word among the lifts
    for (c, &r) in reps.iter().enumerate() {
        if raw[c].d == 1 {
            let best = members[&r]
                .iter()
                .map(|&i| canonical_conj_form(&Word::from_codes(&found[i].1)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .min()
                .expect("nonempty class");
            raw[c].word = Some(best);
        }
    }
    for c in 0..raw.len() {
        if raw[c].d > 1 {
            let root = raw[raw[c].root].word.clone().ok_or_else(|| {
                GeoError::InvalidPoint("root class is not primitive".into())
            })?;
            raw[c].word = Some(root.pow(raw[c].d));
        }
    }

    let mut entries = Vec::with_capacity(raw.len());
    for r in &raw {
        let class = r.word.clone().expect("class word assigned");
        let g = rep.word_to_matrix(class.word());
        let length = translation_length(&g)?;
        let endpoints = axis_endpoints(&g)?;
        entries.push(SpectrumEntry {
            length,
            class,
            root: raw[r.root].word.clone().expect("root word"),
            d: r.d,
            endpoints,
            reverse: r.reverse,
            root_index: r.root,
        });
    }

    // keep lengths ≤ t_max, sort by (length, word), remap indices
    let mut order: Vec<usize> = (0..entries.len()).filter(|&c| entries[c].length <= t_max).collect();
    order.sort_by(|&x, &y| {
        length_key(entries[x].length)
            .cmp(&length_key(entries[y].length))
            .then_with(|| entries[x].class.cmp(&entries[y].class))
    });
    let mut new_id = vec![usize::MAX; entries.len()];
    for (k, &c) in order.iter().enumerate() {
        new_id[c] = k;
    }
    let remap = |c: usize| if c == usize::MAX { usize::MAX } else { new_id[c] };
    let sorted: Vec<SpectrumEntry> = order
        .iter()
        .map(|&c| {
            let mut e = entries[c].clone();
            e.reverse = remap(e.reverse);
            e.root_index = remap(e.root_index);
            e
        })
        .collect();

    let mut lifts = Vec::with_capacity(n);
    for (i, (m, _)) in found.iter().enumerate() {
        let c = new_id[of(&mut uf, i)];
        if c == usize::MAX {
            continue;
        }
        let (lo, hi) = axis_endpoints(&to_isometry(m))?;
        let (a, b) = (lo.angle(), hi.angle());
        lifts.push(AxisLift { class: c, minus: a, plus: b, chord: polygon.chord(a, b) });
    }

    Ok(LengthSpectrum { genus: rep.genus, t_max, entries: sorted, lifts, histogram: None })
}

impl LengthSpectrum {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn systole(&self) -> Option<f64> {
        self.entries.first().map(|e| e.length)
    }

    /// Half the shortest length found; the injectivity radius of the surface
    /// when the spectrum reaches the systole.
    pub fn injectivity_radius(&self) -> Option<f64> {
        self.systole().map(|s| 0.5 * s)
    }

    /// Serialized spectrum: one row per class, floats with 17 significant digits.
    pub fn to_csv(&self, comment: &str) -> String {
        let mut out = String::new();
        if !comment.is_empty() {
            for line in comment.lines() {
                let _ = writeln!(out, "# {line}");
            }
        }
        out.push_str("length,canonical_word,d,root_word,xi_minus_angle,xi_plus_angle\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt17(e.length),
                e.class,
                e.d,
                e.root,
                fmt17(e.endpoints.0.angle()),
                fmt17(e.endpoints.1.angle())
            );
        }
        out
    }
}

/// A float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Histogram of `d(γ)` over classes with `|γ| ∈ (t - eps, t]`; index `k` holds `d = k`.
pub fn multiplicity_profile(spec: &LengthSpectrum, t: f64, eps: f64) -> Result<Vec<usize>> {
    if t > spec.t_max + 1e-12 {
        return Err(GeoError::OutOfRange { t, t_max: spec.t_max });
    }
    let mut counts = vec![0usize; 2];
    for e in spec.entries.iter().filter(|e| e.length > t - eps && e.length <= t) {
        if e.d >= counts.len() {
            counts.resize(e.d + 1, 0);
        }
        counts[e.d] += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_fuchsian_rep;

    #[test]
    fn below_systole_is_empty() {
        let rep = build_fuchsian_rep::<f64>(2).unwrap();
        let s = conjugacy_spectrum(&rep, 3.0).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn systole_classes() {
        let rep = build_fuchsian_rep::<f64>(2).unwrap();
        let s = conjugacy_spectrum(&rep, 3.1).unwrap();
        let sys = 2.0 * ((2.0 + 2.0 * 2f64.sqrt()) / 2.0f64).acosh();
        assert!(!s.is_empty());
        for e in &s.entries {
            assert!((e.length - sys).abs() < 1e-9);
            assert_eq!(e.d, 1);
            let r = &s.entries[e.reverse];
            assert!(!std::ptr::eq(r, e));
            assert_eq!(s.entries[r.reverse].class, e.class);
            let g = rep.word_to_matrix(e.class.word()).inverse();
            let h = rep.word_to_matrix(r.class.word());
            assert!((g.trace() - h.trace()).abs() < 1e-9);
        }
        // every class is the reverse of exactly one class
        let mut hit = vec![0; s.len()];
        for e in &s.entries {
            hit[e.reverse] += 1;
        }
        assert!(hit.iter().all(|&h| h == 1));
    }

    #[test]
    fn matrix_index_finds_up_to_sign() {
        let mats = vec![[1.0, 2.0, 3.0, 7.0], [2.0, 0.0, 0.0, 0.5]];
        let idx = MatrixIndex::new(mats);
        assert_eq!(idx.find(&[-1.0, -2.0, -3.0, -7.0]), Some(0));
        assert_eq!(idx.find(&[2.0 + 1e-12, 0.0, 1e-13, 0.5]), Some(1));
        assert_eq!(idx.find(&[2.0, 0.1, 0.0, 0.5]), None);
    }

    #[test]
    fn fmt17_roundtrips() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, 3.0571480954, 1e-300] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
    }
}
