//! Words over the side-pairing alphabet and their conjugacy classes.
//!
//! Letter code `2k` is generator `k` and `2k + 1` its inverse, where generator
//! `2i - 2` prints as `a{i}` and `2i - 1` as `b{i}`. Inverses print in upper
//! case, so `"a1 B1 a2"` is `a₁ b₁⁻¹ a₂`. The identity prints as the empty
//! string. Codes also fix the total order used for canonical rotations:
//! `a1 < A1 < b1 < B1 < a2 < …`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{GeoError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((2 * generator + inverse as usize) as u8)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inv(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.generator();
        let name = match (k % 2, self.is_inverse()) {
            (0, false) => 'a',
            (0, true) => 'A',
            (_, false) => 'b',
            (_, true) => 'B',
        };
        write!(f, "{}{}", name, k / 2 + 1)
    }
}

impl FromStr for Letter {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let head = chars.next().ok_or_else(|| GeoError::WordParse(s.into()))?;
        let idx: usize = chars
            .as_str()
            .parse()
            .map_err(|_| GeoError::WordParse(s.into()))?;
        if idx == 0 {
            return Err(GeoError::WordParse(s.into()));
        }
        let (offset, inverse) = match head {
            'a' => (0, false),
            'A' => (0, true),
            'b' => (1, false),
            'B' => (1, true),
            _ => return Err(GeoError::WordParse(s.into())),
        };
        Ok(Letter::new(2 * (idx - 1) + offset, inverse))
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Freely reduces the given letters.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn from_codes(codes: &[u8]) -> Self {
        Word::new(codes.iter().map(|&c| Letter(c)))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, o: &Word) -> Word {
        Word::new(self.0.iter().chain(o.0.iter()).copied())
    }

    pub fn pow(&self, n: usize) -> Word {
        Word::new(std::iter::repeat(self.0.iter().copied()).take(n).flatten())
    }

    /// `u w u⁻¹`.
    pub fn conjugate_by(&self, u: &Word) -> Word {
        u.concat(self).concat(&u.inverse())
    }

    /// Strips matching first/last letter pairs.
    pub fn cyclically_reduced(&self) -> Word {
        let s = &self.0;
        let (mut i, mut j) = (0, s.len());
        while j >= i + 2 && s[i] == s[j - 1].inv() {
            i += 1;
            j -= 1;
        }
        Word(s[i..j].to_vec())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(f), Some(l)) => self.0.len() < 2 || *f != l.inv(),
            _ => true,
        }
    }

    /// Order by length, then lexicographically by letter code.
    pub fn shortlex_cmp(&self, o: &Word) -> Ordering {
        self.len().cmp(&o.len()).then_with(|| self.0.cmp(&o.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, l) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::identity());
        }
        let letters = s.split_whitespace().map(str::parse).collect::<Result<Vec<Letter>>>()?;
        Ok(Word::new(letters))
    }
}

/// A conjugacy class, stored as its rotation-minimal cyclically reduced word.
/// `γ` and `γ⁻¹` give different classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConjClass {
    word: Word,
}

impl ConjClass {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn inverse(&self) -> ConjClass {
        canonical_conj_form(&self.word.inverse()).expect("inverse of a nontrivial class")
    }

    pub fn pow(&self, k: usize) -> ConjClass {
        canonical_conj_form(&self.word.pow(k)).expect("power of a nontrivial class")
    }
}

impl Ord for ConjClass {
    fn cmp(&self, o: &Self) -> Ordering {
        self.word.shortlex_cmp(&o.word)
    }
}

impl PartialOrd for ConjClass {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.word.fmt(f)
    }
}

/// Start index of the lexicographically least rotation (Booth's algorithm).
fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    let at = |i: usize| s[i % n];
    let mut fail = vec![-1isize; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = fail[j - k - 1];
        while i != -1 && sj != at(k + i as usize + 1) {
            if sj < at(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = fail[i as usize];
        }
        if i == -1 && sj != at(k) {
            if sj < at(k) {
                k = j;
            }
            fail[j - k] = -1;
        } else {
            fail[j - k] = i + 1;
        }
    }
    k % n
}

pub fn canonical_conj_form(w: &Word) -> Result<ConjClass> {
    let c = w.cyclically_reduced();
    if c.is_empty() {
        return Err(GeoError::TrivialClass);
    }
    let k = least_rotation(&c.0);
    let mut rotated = Vec::with_capacity(c.len());
    rotated.extend_from_slice(&c.0[k..]);
    rotated.extend_from_slice(&c.0[..k]);
    Ok(ConjClass { word: Word(rotated) })
}

/// Combinatorial root: the shortest block whose repetition is the cyclic word.
pub fn primitive_root(c: &ConjClass) -> (ConjClass, usize) {
    let s = &c.word.0;
    let n = s.len();
    for p in 1..=n {
        if n % p == 0 && (p..n).all(|i| s[i] == s[i - p]) {
            // a block of a rotation-minimal word is itself rotation-minimal
            let root = ConjClass { word: Word(s[..p].to_vec()) };
            return (root, n / p);
        }
    }
    unreachable!("the word repeats itself with period n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn naive_least_rotation(s: &[Letter]) -> usize {
        (0..s.len())
            .min_by(|&i, &j| {
                let a = s[i..].iter().chain(&s[..i]);
                let b = s[j..].iter().chain(&s[..j]);
                a.cmp(b).then(i.cmp(&j))
            })
            .unwrap()
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["a1 B1 a2", "b2 A2", "a3 b3 A1"] {
            assert_eq!(w(s).to_string(), s);
        }
        assert_eq!(w("a1 A1").len(), 0);
        assert_eq!(w("").to_string(), "");
        assert!("c1".parse::<Word>().is_err());
        assert!("a0".parse::<Word>().is_err());
    }

    #[test]
    fn letter_order() {
        let order: Vec<String> = (0..8).map(|c| Letter(c).to_string()).collect();
        assert_eq!(order, ["a1", "A1", "b1", "B1", "a2", "A2", "b2", "B2"]);
    }

    #[test]
    fn conj_examples() {
        let aba = canonical_conj_form(&w("a1 b1 A1")).unwrap();
        assert_eq!(aba, canonical_conj_form(&w("b1")).unwrap());
        let ab = canonical_conj_form(&w("a1 b1")).unwrap();
        let ba = canonical_conj_form(&w("b1 a1")).unwrap();
        assert_eq!(ab, ba);
        assert_eq!(canonical_conj_form(&Word::identity()), Err(GeoError::TrivialClass));
        assert_eq!(canonical_conj_form(&w("a1 b1 B1 A1")), Err(GeoError::TrivialClass));
    }

    #[test]
    fn root_examples() {
        let c = canonical_conj_form(&w("a1 b1 a1 b1")).unwrap();
        let (r, d) = primitive_root(&c);
        assert_eq!((r.word().to_string(), d), ("a1 b1".into(), 2));
        let (r, d) = primitive_root(&canonical_conj_form(&w("a1 b1")).unwrap());
        assert_eq!((r.word().to_string(), d), ("a1 b1".into(), 1));
        let base = w("a1 b1 a1 B1");
        let c = canonical_conj_form(&base.pow(3)).unwrap();
        let (r, d) = primitive_root(&c);
        assert_eq!(r, canonical_conj_form(&base).unwrap());
        assert_eq!(d, 3);
    }

    #[test]
    fn booth_matches_naive() {
        // all words of length ≤ 6 over a two-letter sub-alphabet with repeats
        for n in 1..=8usize {
            for mask in 0..(1u32 << n) {
                let s: Vec<Letter> = (0..n).map(|i| Letter(((mask >> i) & 1) as u8 * 2)).collect();
                let k = least_rotation(&s);
                let m = naive_least_rotation(&s);
                let rk: Vec<_> = s[k..].iter().chain(&s[..k]).collect();
                let rm: Vec<_> = s[m..].iter().chain(&s[..m]).collect();
                assert_eq!(rk, rm);
            }
        }
    }
}
