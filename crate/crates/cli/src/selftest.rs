//! Invariant suite behind `geocount selftest`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geocount::enumerate::enumerate_ball_with;
use geocount::flowbox::{BoundaryArc, FlowBoxSpec, gamma_star_member};
use geocount::group::{build_fuchsian_rep, side_pairing};
use geocount::hyperbolic::{busemann, busemann_finite};
use geocount::measure::{barmu_mass, conformal_derivative_check, PairMeasureGrid};
use geocount::oracle::{brute_force_classes, length_multiplicities};
use geocount::spectrum::conjugacy_spectrum;
use geocount::{canonical_conj_form, BoundaryPoint, FuchsianRep, Isometry, Letter, Point, UnitVector, Word};

pub struct Check {
    pub name: &'static str,
    pub result: Result<(), String>,
}

fn point(rng: &mut ChaCha8Rng) -> Point {
    Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.5f64..1.5).exp()).expect("valid point")
}

fn boundary(rng: &mut ChaCha8Rng) -> BoundaryPoint {
    BoundaryPoint::from_angle(rng.gen_range(0.0..TAU))
}

fn mobius(rng: &mut ChaCha8Rng) -> Isometry {
    UnitVector::new(point(rng), rng.gen_range(0.0..TAU)).frame()
}

fn random_word(rng: &mut ChaCha8Rng, genus: usize, len: usize) -> Word {
    Word::new((0..len).map(|_| Letter::new(rng.gen_range(0..2 * genus), rng.gen_bool(0.5))))
}

fn worst(name: &str, limit: f64, values: impl Iterator<Item = f64>) -> Result<(), String> {
    let w = values.fold(0.0, f64::max);
    if w < limit {
        Ok(())
    } else {
        Err(format!("{name}: worst residual {w:.3e} exceeds {limit:.0e}"))
    }
}

/// The generators, or with `corrupt` the first side pairing nudged so the
/// relator misses the identity by about `1e-3`.
pub fn representation(genus: usize, corrupt: bool) -> geocount::Result<FuchsianRep> {
    if !corrupt {
        return build_fuchsian_rep(genus);
    }
    let mut mats: Vec<Isometry> = (0..2 * genus).map(|k| side_pairing(genus, k)).collect();
    let g = mats[0];
    mats[0] = Isometry::from_entries(g.a, g.b + 1e-3, g.c, g.d + 1e-3 * g.c / g.a);
    FuchsianRep::from_side_pairings(genus, mats)
}

pub fn run(genus: usize, seed: u64, corrupt: bool) -> Vec<Check> {
    let mut out = Vec::new();
    let rep = match representation(genus, corrupt) {
        Ok(r) => {
            out.push(Check { name: "relation residual", result: Ok(()) });
            r
        }
        Err(e) => {
            out.push(Check { name: "relation residual", result: Err(e.to_string()) });
            return out;
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2000;

    let mut cocycle = Vec::new();
    let mut anti = Vec::new();
    let mut equi = Vec::new();
    for _ in 0..n {
        let (p, q, r) = (point(&mut rng), point(&mut rng), point(&mut rng));
        let xi = boundary(&mut rng);
        let g = mobius(&mut rng);
        cocycle.push((busemann(xi, q, p) - busemann(xi, q, r) - busemann(xi, r, p)).abs());
        anti.push((busemann(xi, q, p) + busemann(xi, p, q)).abs());
        equi.push((busemann(g.apply_boundary(xi), g.apply(q), g.apply(p)) - busemann(xi, q, p)).abs());
    }
    out.push(Check { name: "busemann cocycle", result: worst("cocycle", 1e-9, cocycle.into_iter()) });
    out.push(Check { name: "busemann antisymmetry", result: worst("antisymmetry", 1e-9, anti.into_iter()) });
    out.push(Check { name: "busemann equivariance", result: worst("equivariance", 1e-9, equi.into_iter()) });

    let approx = (0..200).map(|_| {
        let (p, q) = (point(&mut rng), point(&mut rng));
        let xi = boundary(&mut rng);
        let far = UnitVector::toward(p, xi).flow(20.0).base;
        (busemann_finite(far, q, p) - busemann(xi, q, p)).abs()
    });
    out.push(Check { name: "busemann finite approximant", result: worst("approximant", 1e-6, approx) });

    let conformal = (0..n).map(|_| {
        let (p, q) = (point(&mut rng), point(&mut rng));
        conformal_derivative_check(p, q, boundary(&mut rng)).err
    });
    out.push(Check { name: "conformal density", result: worst("conformal", 1e-8, conformal) });

    let canon = (|| {
        for _ in 0..500 {
            let len = rng.gen_range(1..12);
            let w = random_word(&mut rng, genus, len);
            let Ok(c) = canonical_conj_form(&w) else { continue };
            let len = rng.gen_range(0..5);
            let u = random_word(&mut rng, genus, len);
            let c2 = canonical_conj_form(&w.conjugate_by(&u)).map_err(|e| e.to_string())?;
            if c != c2 {
                return Err(format!("conjugating {w} by {u} changes the canonical form"));
            }
        }
        Ok(())
    })();
    out.push(Check { name: "canonical form conjugation invariance", result: canon });

    let determinism = (|| {
        let a = enumerate_ball_with(&rep, 6.0, 1, None).map_err(|e| e.to_string())?;
        let b = enumerate_ball_with(&rep, 6.0, 4, None).map_err(|e| e.to_string())?;
        let same = a.len() == b.len() && a.elements.iter().zip(&b.elements).all(|(x, y)| x.word == y.word);
        if same {
            Ok(())
        } else {
            Err("ball differs between 1 and 4 workers".into())
        }
    })();
    out.push(Check { name: "enumeration determinism", result: determinism });

    let oracle = (|| {
        let t = 1.5 * rep.generator_length();
        let s = conjugacy_spectrum(&rep, t).map_err(|e| e.to_string())?;
        let fast = length_multiplicities(s.entries.iter().map(|e| e.length), 1e-9);
        let slow = length_multiplicities(brute_force_classes(&rep, 8, 1, t).iter().map(|c| c.length), 1e-9);
        let same = fast.len() == slow.len()
            && fast.iter().zip(&slow).all(|(a, b)| a.1 == b.1 && (a.0 - b.0).abs() < 1e-9);
        if same {
            Ok(())
        } else {
            Err(format!("spectrum {fast:?} vs brute force {slow:?}"))
        }
    })();
    out.push(Check { name: "spectrum oracle equivalence", result: oracle });

    let invariance = (|| {
        let grid = PairMeasureGrid::new(Point::i());
        let ball = enumerate_ball_with(&rep, 4.0, 1, None).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let g = &ball.elements[rng.gen_range(1..ball.len())].g;
            let a0 = rng.gen_range(0.0..TAU);
            let a = BoundaryArc::new(a0, rng.gen_range(0.1..1.0));
            let b = BoundaryArc::new(a0 + 2.0 + rng.gen_range(0.0..1.0), rng.gen_range(0.1..1.0));
            let m0 = barmu_mass(&grid, &a, &b).map_err(|e| e.to_string())?.value;
            let m1 = barmu_mass(&grid, &a.image(g), &b.image(g)).map_err(|e| e.to_string())?.value;
            if ((m1 - m0) / m0).abs() >= 1e-4 {
                return Err(format!("mu-bar moved from {m0} to {m1}"));
            }
        }
        Ok(())
    })();
    out.push(Check { name: "mu-bar invariance", result: invariance });

    let monotone = (|| {
        let ball = enumerate_ball_with(&rep, 7.0, 1, None).map_err(|e| e.to_string())?;
        let v0 = UnitVector::new(Point::i(), rng.gen_range(0.0..TAU));
        let thetas = [0.1, 0.2, 0.4, 0.8];
        for e in ball.elements.iter().skip(1) {
            let mut was = false;
            for &th in &thetas {
                let spec = FlowBoxSpec::new(v0, th, 0.1, 0.1).map_err(|e| e.to_string())?;
                let now = gamma_star_member(&spec, &e.g);
                if was && !now {
                    return Err(format!("{} leaves Gamma* as theta grows to {th}", e.word));
                }
                was = now;
            }
        }
        Ok(())
    })();
    out.push(Check { name: "Gamma* monotone in aperture", result: monotone });
    out
}
