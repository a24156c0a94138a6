//! Adaptive Gauss–Kronrod quadrature (7/15 points) in one and two dimensions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{GeoError, Result};

const XK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7)
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Nodes and weights on `[a, b]`: `(x, kronrod weight, gauss weight)`.
fn rule(a: f64, b: f64) -> [(f64, f64, f64); 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(0.0, 0.0, 0.0); 15];
    for j in 0..7 {
        let g = if j % 2 == 1 { WG[j / 2] * h } else { 0.0 };
        out[2 * j] = (c - h * XK[j], WK[j] * h, g);
        out[2 * j + 1] = (c + h * XK[j], WK[j] * h, g);
    }
    out[14] = (c, WK[7] * h, WG[3] * h);
    out
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let (mut k, mut g) = (0.0, 0.0);
    for (x, wk, wg) in rule(a, b) {
        let y = f(x);
        k += wk * y;
        g += wg * y;
    }
    (k, (k - g).abs())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

struct Piece<R> {
    err: f64,
    value: f64,
    region: R,
}

impl<R> PartialEq for Piece<R> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<R> Eq for Piece<R> {}
impl<R> PartialOrd for Piece<R> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<R> Ord for Piece<R> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

const MAX_PIECES: usize = 200_000;

fn converged(total: &Estimate, abs_tol: f64, rel_tol: f64) -> bool {
    total.error <= abs_tol.max(rel_tol * total.value.abs())
}

/// `∫_a^b f`, bisecting the worst interval until the summed error estimate
/// meets `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate> {
    let (v, e) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { err: e, value: v, region: (a, b) });
    let mut total = Estimate { value: v, error: e };
    while !converged(&total, abs_tol, rel_tol) {
        if heap.len() > MAX_PIECES {
            return Err(GeoError::Quadrature { value: total.value, error: total.error });
        }
        let p = heap.pop().expect("nonempty heap");
        let (lo, hi) = p.region;
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        total.value += v1 + v2 - p.value;
        total.error += e1 + e2 - p.err;
        heap.push(Piece { err: e1, value: v1, region: (lo, mid) });
        heap.push(Piece { err: e2, value: v2, region: (mid, hi) });
    }
    // re-sum to shed the drift of the running totals
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.err).sum();
    Ok(Estimate { value, error })
}

type Rect = (f64, f64, f64, f64);

fn gk15x15<F: FnMut(f64, f64) -> f64>(f: &mut F, r: Rect) -> (f64, f64) {
    let rx = rule(r.0, r.1);
    let ry = rule(r.2, r.3);
    let (mut k, mut g) = (0.0, 0.0);
    for &(x, wkx, wgx) in &rx {
        for &(y, wky, wgy) in &ry {
            let v = f(x, y);
            k += wkx * wky * v;
            g += wgx * wgy * v;
        }
    }
    (k, (k - g).abs())
}

/// `∫∫ f` over `[x0, x1] × [y0, y1]` with the tensor 15×15 Kronrod rule
/// against the 7×7 Gauss rule, splitting the worst rectangle along its
/// longer side.
pub fn integrate_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    let r0 = (x0, x1, y0, y1);
    let (v, e) = gk15x15(&mut f, r0);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { err: e, value: v, region: r0 });
    let mut total = Estimate { value: v, error: e };
    while !converged(&total, abs_tol, rel_tol) {
        if heap.len() > MAX_PIECES / 20 {
            return Err(GeoError::Quadrature { value: total.value, error: total.error });
        }
        let p = heap.pop().expect("nonempty heap");
        let (a, b, c, d) = p.region;
        let (r1, r2) = if b - a >= d - c {
            let m = 0.5 * (a + b);
            ((a, m, c, d), (m, b, c, d))
        } else {
            let m = 0.5 * (c + d);
            ((a, b, c, m), (a, b, m, d))
        };
        let (v1, e1) = gk15x15(&mut f, r1);
        let (v2, e2) = gk15x15(&mut f, r2);
        total.value += v1 + v2 - p.value;
        total.error += e1 + e2 - p.err;
        heap.push(Piece { err: e1, value: v1, region: r1 });
        heap.push(Piece { err: e2, value: v2, region: r2 });
    }
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.err).sum();
    Ok(Estimate { value, error })
}
