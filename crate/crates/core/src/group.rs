//! The genus-g surface group as a Fuchsian group.
//!
//! The fundamental domain is the regular 4g-gon centered at `i` with interior
//! angles `2π/4g`. Generator `k` (letter `a_{k/2+1}` or `b_{k/2+1}`) is the
//! hyperbolic translation by twice the inradius along the geodesic through `i`
//! heading in disk direction `3π/2 + kπ/2g`. It carries the polygon onto its
//! neighbour across the side centred in that direction, so opposite sides are
//! paired. In closed form
//!
//! ```text
//! g_k = [[c + s sin φ, s cos φ], [s cos φ, c - s sin φ]],  φ = kπ/2g,
//! c = cot(π/4g) = cosh r_in,  s = sqrt(c² - 1).
//! ```
//!
//! The vertex cycle gives the relator `x_1 ⋯ x_{2g} x_1⁻¹ ⋯ x_{2g}⁻¹` with
//! `x_j = g_{j-1}^{(-1)^{j-1}}`; for genus 2 that is `a1 B1 a2 B2 A1 b1 A2 b2`.
//! [`commutator_basis`] rewrites it as a product of commutators.

use crate::error::{GeoError, Result};
use crate::hyperbolic::{
    axis_endpoints, translation_length, BoundaryPoint, Classification, Isometry, Point,
};
use crate::scalar::Scalar;
use crate::tol;
use crate::word::{canonical_conj_form, ConjClass, Letter, Word};

#[derive(Clone, Debug)]
pub struct FuchsianRep<T> {
    pub genus: usize,
    /// Indexed by letter code: `generators[2k]` is `g_k`, `generators[2k+1]` its inverse.
    pub generators: Vec<Isometry<T>>,
    pub relation_residual: T,
    /// Residual of `∏[a_i, b_i]` over the basis of [`commutator_basis`]; reported, not gated.
    pub commutator_residual: T,
    pub inradius: T,
    pub circumradius: T,
    pub fundamental_domain_diameter: T,
}

/// `cot(π/4g)`, the hyperbolic cosine of the inradius.
fn cosh_inradius<T: Scalar>(genus: usize) -> T {
    let a = T::PI() / T::lit((4 * genus) as f64);
    a.cos() / a.sin()
}

pub fn side_pairing<T: Scalar>(genus: usize, k: usize) -> Isometry<T> {
    let c = cosh_inradius::<T>(genus);
    let s = ((c - T::one()) * (c + T::one())).sqrt();
    let phi = T::PI() * T::lit(k as f64) / T::lit((2 * genus) as f64);
    let (sn, cs) = phi.sin_cos();
    Isometry::from_entries(c + s * sn, s * cs, s * cs, c - s * sn)
}

pub fn build_fuchsian_rep<T: Scalar>(genus: usize) -> Result<FuchsianRep<T>> {
    if genus < 2 {
        return Err(GeoError::Genus(genus));
    }
    let mats = (0..2 * genus).map(|k| side_pairing(genus, k)).collect();
    FuchsianRep::from_side_pairings(genus, mats)
}

/// `x_1 ⋯ x_{2g} x_1⁻¹ ⋯ x_{2g}⁻¹`.
pub fn vertex_relator(genus: usize) -> Word {
    let x: Vec<Letter> = (0..2 * genus).map(|k| Letter::new(k, k % 2 == 1)).collect();
    Word::new(x.iter().copied().chain(x.iter().map(|l| l.inv())))
}

/// Words `(a_i, b_i)` in the side pairings with `∏[a_i, b_i]` conjugate to the
/// vertex relator, hence a standard generating set.
///
/// Peeling `[x_1 x_2, x_3 ⋯ x_n x_2]` off the front of
/// `x_1 ⋯ x_n x_1⁻¹ ⋯ x_n⁻¹` leaves the same pattern on `x_3, …, x_n`,
/// ending at `[x_{n-1}, x_n]`; that last pair is listed first.
pub fn commutator_basis(genus: usize) -> Vec<(Word, Word)> {
    let n = 2 * genus;
    let x: Vec<Letter> = (0..n).map(|k| Letter::new(k, k % 2 == 1)).collect();
    let mut pairs = vec![(Word::new([x[n - 2]]), Word::new([x[n - 1]]))];
    for i in 0..genus - 1 {
        let a = Word::new([x[2 * i], x[2 * i + 1]]);
        let b = Word::new(x[2 * i + 2..].iter().copied().chain([x[2 * i + 1]]));
        pairs.push((a, b));
    }
    pairs
}

pub fn commutator(a: &Word, b: &Word) -> Word {
    a.concat(b).concat(&a.inverse()).concat(&b.inverse())
}

impl<T: Scalar> FuchsianRep<T> {
    /// Validates `2g` side pairings against the relators.
    pub fn from_side_pairings(genus: usize, mats: Vec<Isometry<T>>) -> Result<Self> {
        if genus < 2 {
            return Err(GeoError::Genus(genus));
        }
        assert_eq!(mats.len(), 2 * genus, "expected 2g side pairings");
        let mut generators = Vec::with_capacity(4 * genus);
        for g in &mats {
            generators.push(*g);
            generators.push(g.inverse());
        }
        let c = cosh_inradius::<T>(genus);
        let inradius = c.acosh();
        let circumradius = (c * c).acosh();
        let mut rep = FuchsianRep {
            genus,
            generators,
            relation_residual: T::zero(),
            commutator_residual: T::zero(),
            inradius,
            circumradius,
            fundamental_domain_diameter: T::two() * circumradius,
        };
        let id = Isometry::identity();
        rep.relation_residual = rep.word_to_matrix(&vertex_relator(genus)).distance_pm(&id);
        let product = commutator_basis(genus)
            .iter()
            .fold(Word::identity(), |acc, (a, b)| acc.concat(&commutator(a, b)));
        rep.commutator_residual = rep.word_to_matrix(&product).distance_pm(&id);
        // The commutator product is a conjugate of the vertex relator in the
        // free group (checked combinatorially in the tests), so only the short
        // relator is gated; the long product loses digits for large genus.
        if !(rep.relation_residual < T::lit(tol::ALGEBRAIC)) {
            return Err(GeoError::RelationResidual {
                residual: rep.relation_residual.to_f64().unwrap_or(f64::NAN),
                limit: tol::ALGEBRAIC,
            });
        }
        for g in &rep.generators {
            if crate::hyperbolic::classify(g) != Classification::Hyperbolic {
                return Err(GeoError::NotHyperbolic {
                    trace: g.trace().to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(rep)
    }

    pub fn letter_count(&self) -> usize {
        self.generators.len()
    }

    pub fn generator(&self, l: Letter) -> &Isometry<T> {
        &self.generators[l.index()]
    }

    pub fn word_to_matrix(&self, w: &Word) -> Isometry<T> {
        w.letters()
            .iter()
            .fold(Isometry::identity(), |acc, l| acc.compose(self.generator(*l)))
    }

    /// Length and `(repelling, attracting)` endpoints of a class, read off its word.
    pub fn class_geometry(&self, c: &ConjClass) -> Result<(T, (BoundaryPoint<T>, BoundaryPoint<T>))> {
        let g = self.word_to_matrix(c.word());
        Ok((translation_length(&g)?, axis_endpoints(&g)?))
    }

    /// Length of the generator classes; the systole for the regular polygon.
    pub fn generator_length(&self) -> T {
        T::two() * self.inradius
    }

    /// Polygon vertices, counterclockwise, as points of the half-plane.
    pub fn polygon_vertices(&self) -> Vec<Point<T>> {
        let n = 4 * self.genus;
        let r = (self.circumradius * T::half()).tanh();
        (0..n)
            .map(|j| {
                let phi = T::FRAC_PI_2()
                    + T::PI() * (T::lit(j as f64) + T::half()) / T::lit((2 * self.genus) as f64);
                Point::from_disk(r * phi.cos(), r * phi.sin()).expect("vertex inside the disk")
            })
            .collect()
    }
}

/// Canonical class of a word, or `None` for the identity.
pub fn class_of(w: &Word) -> Option<ConjClass> {
    canonical_conj_form(w).ok()
}
