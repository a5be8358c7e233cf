//! Free *-algebra on a finite involutive alphabet, with exact rational
//! coefficients.
//!
//! Words compare degree-first, then lexicographically in the declared letter
//! order; this is the monomial order used by the rewriting engine and for
//! canonical display.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::scalar::{int, scalar_to_string, Scalar};
use crate::{Error, Result};

/// Index of a letter in its alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u8);

/// Finite involutive alphabet. The declared order of the letters is the
/// lexicographic order used by the monomial order.
#[derive(Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    star: Vec<u8>,
}

impl Alphabet {
    /// Builds an alphabet from star pairs in declaration order. A
    /// self-adjoint letter is declared as a pair with itself, e.g.
    /// `("f_0", "f_0")`.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Arc<Self> {
        let mut names = Vec::new();
        for &(a, b) in pairs {
            names.push(a.to_string());
            if b != a {
                names.push(b.to_string());
            }
        }
        let mut star = (0..names.len() as u8).collect::<Vec<_>>();
        for &(a, b) in pairs {
            let i = names.iter().position(|n| n == a).unwrap();
            let j = names.iter().position(|n| n == b).unwrap();
            star[i] = j as u8;
            star[j] = i as u8;
        }
        Arc::new(Alphabet { names, star })
    }

    /// Builds an alphabet from an explicit letter order and star pairs,
    /// as loaded from a presentation document.
    pub fn new(order: &[String], star_pairs: &[(String, String)]) -> Result<Arc<Self>> {
        let names: Vec<String> = order.to_vec();
        if names.len() > 64 {
            return Err(Error::InvalidParam("alphabet too large".into()));
        }
        let pos = |n: &str| {
            names
                .iter()
                .position(|m| m == n)
                .ok_or_else(|| Error::InvalidParam(format!("unknown letter {n:?} in star pair")))
        };
        let mut star: Vec<Option<u8>> = vec![None; names.len()];
        for (a, b) in star_pairs {
            let i = pos(a)?;
            let j = pos(b)?;
            star[i] = Some(j as u8);
            star[j] = Some(i as u8);
        }
        if star.iter().any(|s| s.is_none()) {
            return Err(Error::InvalidParam("letter missing from star pairs".into()));
        }
        Ok(Arc::new(Alphabet {
            names,
            star: star.into_iter().map(Option::unwrap).collect(),
        }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len() as u8).map(Letter)
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.names[l.0 as usize]
    }

    pub fn star(&self, l: Letter) -> Letter {
        Letter(self.star[l.0 as usize])
    }

    pub fn lookup(&self, name: &str) -> Option<Letter> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Letter(i as u8))
    }

    fn describe(&self) -> String {
        self.names.join(",")
    }
}

fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A monomial: finite word over the alphabet. The empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub SmallVec<[u8; 12]>);

impl Word {
    pub fn empty() -> Self {
        Word(SmallVec::new())
    }

    pub fn single(l: Letter) -> Self {
        Word(SmallVec::from_slice(&[l.0]))
    }

    pub fn from_letters(ls: &[Letter]) -> Self {
        Word(ls.iter().map(|l| l.0).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.0.iter().map(|&i| Letter(i))
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn star(&self, alph: &Alphabet) -> Word {
        Word(self.0.iter().rev().map(|&i| alph.star[i as usize]).collect())
    }

    /// First position at which `pat` occurs as a consecutive subword.
    pub fn find(&self, pat: &Word) -> Option<usize> {
        if pat.0.is_empty() || pat.0.len() > self.0.len() {
            return None;
        }
        self.0
            .windows(pat.0.len())
            .position(|w| w == pat.0.as_slice())
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(SmallVec::from_slice(&self.0[from..to]))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Element of the free *-algebra: a finite map from words to nonzero
/// rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCPoly {
    alph: Arc<Alphabet>,
    terms: BTreeMap<Word, Scalar>,
}

impl NCPoly {
    pub fn zero(alph: &Arc<Alphabet>) -> Self {
        NCPoly {
            alph: Arc::clone(alph),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(alph: &Arc<Alphabet>) -> Self {
        Self::constant(alph, Scalar::one())
    }

    pub fn constant(alph: &Arc<Alphabet>, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Word::empty(), c);
        }
        NCPoly {
            alph: Arc::clone(alph),
            terms,
        }
    }

    pub fn letter(alph: &Arc<Alphabet>, l: Letter) -> Self {
        Self::from_word(alph, Word::single(l))
    }

    pub fn from_word(alph: &Arc<Alphabet>, w: Word) -> Self {
        Self::from_term(alph, w, Scalar::one())
    }

    pub fn from_term(alph: &Arc<Alphabet>, w: Word, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        NCPoly {
            alph: Arc::clone(alph),
            terms,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alph
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Largest monomial in the degree-lex order, if nonzero.
    pub fn leading(&self) -> Option<(&Word, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Word::degree)
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_alphabet(&self, other: &NCPoly) -> Result<()> {
        if same_alphabet(&self.alph, &other.alph) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(
                self.alph.describe(),
                other.alph.describe(),
            ))
        }
    }

    pub fn checked_add(&self, other: &NCPoly) -> Result<NCPoly> {
        self.check_alphabet(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &NCPoly) -> Result<NCPoly> {
        self.check_alphabet(other)?;
        let mut out = NCPoly::zero(&self.alph);
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                out.add_term(u.concat(v), cu * cv);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> NCPoly {
        self.scale(&int(-1))
    }

    pub fn checked_sub(&self, other: &NCPoly) -> Result<NCPoly> {
        self.checked_add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> NCPoly {
        if c.is_zero() {
            return NCPoly::zero(&self.alph);
        }
        NCPoly {
            alph: Arc::clone(&self.alph),
            terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
        }
    }

    /// The involutive antiautomorphism: reverse words, star letters,
    /// conjugate coefficients (rationals are self-conjugate).
    pub fn star(&self) -> NCPoly {
        let mut out = NCPoly::zero(&self.alph);
        for (w, c) in &self.terms {
            out.add_term(w.star(&self.alph), c.clone());
        }
        out
    }

    pub fn pow(&self, n: usize) -> NCPoly {
        let mut out = NCPoly::one(&self.alph);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Algebra-homomorphic substitution: replaces each letter `l` by
    /// `images[l]` (polynomials over `target`) and extends multiplicatively.
    pub fn substitute(&self, target: &Arc<Alphabet>, images: &[NCPoly]) -> Result<NCPoly> {
        if images.len() != self.alph.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} images for {} letters",
                images.len(),
                self.alph.len()
            )));
        }
        let mut out = NCPoly::zero(target);
        for (w, c) in &self.terms {
            let mut prod = NCPoly::constant(target, c.clone());
            for l in w.letters() {
                prod = prod.checked_mul(&images[l.0 as usize])?;
            }
            out = out.checked_add(&prod)?;
        }
        Ok(out)
    }

    /// The value of a constant polynomial, if it is one.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Word::empty()).cloned(),
            _ => None,
        }
    }

    /// Invariant check used by the test suites: zero coefficients are never
    /// stored.
    pub fn is_canonical(&self) -> bool {
        self.terms.values().all(|c| !c.is_zero())
    }

    /// Canonical text form; see the module parser for the grammar.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (w, c) in &self.terms {
            let mono = word_to_text(w, &self.alph);
            let part = if w.degree() == 0 {
                if c.is_one() {
                    "1".to_string()
                } else {
                    format!("({})", scalar_to_string(c))
                }
            } else if c.is_one() {
                mono
            } else {
                format!("({}) {}", scalar_to_string(c), mono)
            };
            parts.push(part);
        }
        parts.join(" + ")
    }
}

/// Word in text form, with `^k` for runs of a repeated letter.
pub fn word_to_text(w: &Word, alph: &Alphabet) -> String {
    if w.degree() == 0 {
        return "1".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut run: Option<(u8, usize)> = None;
    let flush = |run: &mut Option<(u8, usize)>, parts: &mut Vec<String>| {
        if let Some((l, n)) = run.take() {
            let name = alph.name(Letter(l));
            if n == 1 {
                parts.push(name.to_string());
            } else {
                parts.push(format!("{name}^{n}"));
            }
        }
    };
    for &l in &w.0 {
        match run {
            Some((r, n)) if r == l => run = Some((r, n + 1)),
            _ => {
                flush(&mut run, &mut parts);
                run = Some((l, 1));
            }
        }
    }
    flush(&mut run, &mut parts);
    parts.join(" ")
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

macro_rules! ref_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&NCPoly> for &NCPoly {
            type Output = NCPoly;
            fn $method(self, rhs: &NCPoly) -> NCPoly {
                self.$checked(rhs).expect("alphabet mismatch")
            }
        }
    };
}
ref_binop!(Add, add, checked_add);
ref_binop!(Sub, sub, checked_sub);
ref_binop!(Mul, mul, checked_mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn disc_alph() -> Arc<Alphabet> {
        Alphabet::from_pairs(&[("x", "x*")])
    }

    fn s3_alph() -> Arc<Alphabet> {
        Alphabet::from_pairs(&[("a", "a*"), ("b", "b*")])
    }

    #[test]
    fn additive_identity_and_inverse() {
        let alph = disc_alph();
        let x = NCPoly::letter(&alph, Letter(0));
        let zero = NCPoly::zero(&alph);
        assert_eq!(&x + &zero, x);
        let xsx = {
            let xs = NCPoly::letter(&alph, Letter(1));
            &xs * &x
        };
        assert!((&xsx + &xsx.neg()).is_zero());
    }

    #[test]
    fn disc_relation_rhs_assembles() {
        // q x x* + (1-q) 1 at symbolic level: built by add of the two pieces
        let alph = disc_alph();
        let q = rat(1, 4);
        let x = NCPoly::letter(&alph, Letter(0));
        let xs = NCPoly::letter(&alph, Letter(1));
        let lhs = (&x * &xs).scale(&q);
        let rhs = NCPoly::constant(&alph, Scalar::one() - &q);
        let sum = &lhs + &rhs;
        assert_eq!(sum.num_terms(), 2);
        assert_eq!(sum.coeff(&Word::empty()), rat(3, 4));
    }

    #[test]
    fn free_product_is_unreduced() {
        let alph = s3_alph();
        let a = NCPoly::letter(&alph, Letter(0));
        let b = NCPoly::letter(&alph, Letter(2));
        let one = NCPoly::one(&alph);
        assert_eq!(&one * &a, a);
        let ab = &a * &b;
        assert_eq!(
            ab.leading().unwrap().0,
            &Word::from_letters(&[Letter(0), Letter(2)])
        );
        // (a+b)(a-b) has four distinct words: ab != ba in the free algebra
        let prod = &(&a + &b) * &(&a - &b);
        assert_eq!(prod.num_terms(), 4);
    }

    #[test]
    fn star_is_antiautomorphism() {
        let alph = s3_alph();
        let a = NCPoly::letter(&alph, Letter(0));
        let b = NCPoly::letter(&alph, Letter(2));
        let ab = &a * &b;
        let expect = &b.star() * &a.star();
        assert_eq!(ab.star(), expect);
        assert_eq!(ab.star().star(), ab);
    }

    #[test]
    fn self_adjoint_letter() {
        let alph = Alphabet::from_pairs(&[("f_0", "f_0"), ("f_1", "f_1*")]);
        let f0 = NCPoly::letter(&alph, alph.lookup("f_0").unwrap());
        assert_eq!(f0.star(), f0);
        let f1 = NCPoly::letter(&alph, alph.lookup("f_1").unwrap());
        assert_eq!(f1.star().star(), f1);
    }

    #[test]
    fn alphabet_mismatch_is_an_error() {
        let f = NCPoly::one(&disc_alph());
        let g = NCPoly::one(&s3_alph());
        assert!(f.checked_add(&g).is_err());
        assert!(f.checked_mul(&g).is_err());
    }

    #[test]
    fn deglex_order() {
        let a = Word::single(Letter(0));
        let bstar = Word::single(Letter(3));
        let aa = a.concat(&a);
        assert!(a < bstar);
        assert!(bstar < aa);
        assert!(Word::empty() < a);
    }

    #[test]
    fn word_find() {
        let w = Word(SmallVec::from_slice(&[0, 1, 2, 3]));
        assert_eq!(w.find(&Word(SmallVec::from_slice(&[1, 2]))), Some(1));
        assert_eq!(w.find(&Word(SmallVec::from_slice(&[3, 0]))), None);
    }
}
