//! Slow reference computations used by the self-test and the test suite.
//!
//! Nothing here shares code with the enumeration or spectrum paths beyond
//! the generator matrices.

use std::collections::HashMap;

use crate::enumerate::{from_isometry, mat_mul, Mat};
use crate::group::FuchsianRep;
use crate::spectrum::MatrixIndex;

/// A conjugacy class found by the brute-force search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleClass {
    pub length: f64,
    /// Elements of the class among the words searched.
    pub members: usize,
}

/// Every freely reduced word of length at most `max_len`, as matrices.
pub fn reduced_word_matrices(rep: &FuchsianRep<f64>, max_len: usize) -> Vec<Mat> {
    let gens: Vec<Mat> = rep.generators.iter().map(from_isometry).collect();
    let n = gens.len();
    let inv = |s: usize| if s < n / 2 { s + n / 2 } else { s - n / 2 };
    let mut out = vec![[1.0, 0.0, 0.0, 1.0]];
    let mut layer: Vec<(Mat, usize)> = vec![([1.0, 0.0, 0.0, 1.0], usize::MAX)];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * (n - 1));
        for (m, last) in &layer {
            for (s, g) in gens.iter().enumerate() {
                if *last != usize::MAX && s == inv(*last) {
                    continue;
                }
                next.push((mat_mul(m, g), s));
            }
        }
        out.extend(next.iter().map(|x| x.0));
        layer = next;
    }
    out
}

fn length_of(m: &Mat) -> Option<f64> {
    let tr = (m[0] + m[3]).abs();
    (tr > 2.0 + 1e-9).then(|| 2.0 * (0.5 * tr).acosh())
}

/// Conjugacy classes of hyperbolic elements of length at most `t` among
/// reduced words of length at most `max_len`, joined by conjugation with
/// words of length at most `conj_len`. Lengths ascending.
pub fn brute_force_classes(rep: &FuchsianRep<f64>, max_len: usize, conj_len: usize, t: f64) -> Vec<OracleClass> {
    let all = reduced_word_matrices(rep, max_len);
    let mut elems: Vec<Mat> = Vec::new();
    for m in all {
        if length_of(&m).is_some_and(|l| l <= t + 1e-9) {
            elems.push(m);
        }
    }
    // words repeat group elements; keep one copy of each
    let mut index = MatrixIndex::new(Vec::new());
    let mut unique: Vec<Mat> = Vec::new();
    for m in elems {
        if index.find(&m).is_none() {
            index.push(m);
            unique.push(m);
        }
    }
    let conj = reduced_word_matrices(rep, conj_len);
    let mut parent: Vec<usize> = (0..unique.len()).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, m) in unique.iter().enumerate() {
        for c in &conj {
            let cinv = [c[3], -c[1], -c[2], c[0]];
            let h = mat_mul(&mat_mul(c, m), &cinv);
            if let Some(j) = index.find(&h) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: HashMap<usize, OracleClass> = HashMap::new();
    for (i, m) in unique.iter().enumerate() {
        let r = root(&mut parent, i);
        let e = groups.entry(r).or_insert(OracleClass { length: length_of(m).unwrap_or(0.0), members: 0 });
        e.members += 1;
    }
    let mut out: Vec<OracleClass> = groups.into_values().collect();
    out.sort_by(|a, b| a.length.total_cmp(&b.length));
    out
}

/// `(length, number of classes)` with lengths merged within `tol`.
pub fn length_multiplicities(lengths: impl IntoIterator<Item = f64>, tol: f64) -> Vec<(f64, usize)> {
    let mut ls: Vec<f64> = lengths.into_iter().collect();
    ls.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, usize)> = Vec::new();
    for l in ls {
        match out.last_mut() {
            Some((v, n)) if (l - *v).abs() <= tol => *n += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}
