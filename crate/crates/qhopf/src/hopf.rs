//! Laurent polynomials on U(1) as a Hopf algebra, the right coaction that
//! the winding grading induces on a total-space algebra, and the exact
//! expression of coinvariant elements through base-algebra generators.
//!
//! The grading is additive on words, so the coaction of an element is just
//! its decomposition into homogeneous parts: f maps to the sum of
//! f_n (x) u^n over winding degrees n.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::linalg::solve_columns;
use crate::ncpoly::{word_to_text, NCPoly, Word};
use crate::rewrite::Presentation;
use crate::scalar::{scalar_to_string, Scalar};
use crate::{Error, Result};

/// Element sum c_n u^n of the Laurent algebra O(U(1)).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Laurent {
    terms: BTreeMap<i64, Scalar>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn one() -> Self {
        Laurent::u(0)
    }

    /// The monomial u^n.
    pub fn u(n: i64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(n, Scalar::one());
        Laurent { terms }
    }

    pub fn from_terms(entries: impl IntoIterator<Item = (i64, Scalar)>) -> Self {
        let mut out = Laurent::zero();
        for (n, c) in entries {
            out.add_term(n, c);
        }
        out
    }

    pub fn add_term(&mut self, n: i64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(n) {
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.terms.iter().map(|(n, c)| (*n, c))
    }

    pub fn coeff(&self, n: i64) -> Scalar {
        self.terms.get(&n).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (n, c) in other.terms() {
            out.add_term(n, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Laurent {
        Laurent {
            terms: self.terms.iter().map(|(n, c)| (*n, -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (m, a) in self.terms() {
            for (n, b) in other.terms() {
                out.add_term(m + n, a * b);
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Laurent {
        if c.is_zero() {
            return Laurent::zero();
        }
        Laurent {
            terms: self.terms.iter().map(|(n, x)| (*n, x * c)).collect(),
        }
    }

    /// The *-structure: (c u^n)* = c u^{-n} over the rationals.
    pub fn star(&self) -> Laurent {
        Laurent {
            terms: self.terms.iter().map(|(n, c)| (-*n, c.clone())).collect(),
        }
    }

    /// Counit: u^n -> 1, extended linearly.
    pub fn counit(&self) -> Scalar {
        self.terms.values().sum()
    }

    /// Antipode: u^n -> u^{-n}.
    pub fn antipode(&self) -> Laurent {
        self.star()
    }

    /// Coproduct: u^n is group-like, so each term c u^n maps to
    /// c u^n (x) u^n.
    pub fn coproduct(&self) -> HTensorH {
        let mut out = HTensorH::zero();
        for (n, c) in self.terms() {
            out.add_term(n, n, c.clone());
        }
        out
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (n, c) in self.terms() {
            let mono = laurent_mono_text(n);
            let part = if n == 0 {
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

fn laurent_mono_text(n: i64) -> String {
    match n {
        0 => "1".to_string(),
        1 => "u".to_string(),
        _ => format!("u^{n}"),
    }
}

/// Element of H (x) H, with H the Laurent algebra.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HTensorH {
    terms: BTreeMap<(i64, i64), Scalar>,
}

impl HTensorH {
    pub fn zero() -> Self {
        HTensorH::default()
    }

    pub fn add_term(&mut self, m: i64, n: i64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((m, n)) {
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

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &Scalar)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Contraction through the multiplication after applying `f` to the
    /// left leg: sum f(u^m)·u^n with coefficients.
    pub fn contract_left(&self, f: impl Fn(i64) -> Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for ((m, n), c) in self.terms() {
            out = out.add(&f(m).mul(&Laurent::u(n)).scale(c));
        }
        out
    }
}

/// Element sum f_n (x) u^n of P (x) H, with the left legs polynomials in a
/// graded presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PTensorH {
    parts: BTreeMap<i64, NCPoly>,
    alph: Arc<crate::ncpoly::Alphabet>,
}

impl PTensorH {
    pub fn zero(alph: &Arc<crate::ncpoly::Alphabet>) -> Self {
        PTensorH {
            parts: BTreeMap::new(),
            alph: Arc::clone(alph),
        }
    }

    /// The simple tensor f (x) u^n.
    pub fn simple(f: &NCPoly, n: i64) -> Self {
        let mut out = PTensorH::zero(f.alphabet());
        out.add_part(n, f.clone());
        out
    }

    /// f (x) h for a general Laurent right leg.
    pub fn tensor(f: &NCPoly, h: &Laurent) -> Self {
        let mut out = PTensorH::zero(f.alphabet());
        for (n, c) in h.terms() {
            out.add_part(n, f.scale(c));
        }
        out
    }

    pub fn add_part(&mut self, n: i64, f: NCPoly) {
        if f.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.parts.entry(n) {
            Entry::Vacant(e) => {
                e.insert(f);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().checked_add(&f).expect("same alphabet");
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn parts(&self) -> impl Iterator<Item = (i64, &NCPoly)> {
        self.parts.iter().map(|(n, f)| (*n, f))
    }

    pub fn part(&self, n: i64) -> NCPoly {
        self.parts
            .get(&n)
            .cloned()
            .unwrap_or_else(|| NCPoly::zero(&self.alph))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn checked_add(&self, other: &PTensorH) -> Result<PTensorH> {
        let mut out = self.clone();
        for (n, f) in other.parts() {
            // Surfaces an alphabet mismatch before mutating.
            NCPoly::zero(&out.alph).checked_add(f)?;
            out.add_part(n, f.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> PTensorH {
        PTensorH {
            parts: self.parts.iter().map(|(n, f)| (*n, f.neg())).collect(),
            alph: Arc::clone(&self.alph),
        }
    }

    pub fn checked_sub(&self, other: &PTensorH) -> Result<PTensorH> {
        self.checked_add(&other.neg())
    }

    /// Componentwise product: (f (x) u^m)(g (x) u^n) = fg (x) u^{m+n}.
    pub fn checked_mul(&self, other: &PTensorH) -> Result<PTensorH> {
        let mut out = PTensorH::zero(&self.alph);
        for (m, f) in self.parts() {
            for (n, g) in other.parts() {
                out.add_part(m + n, f.checked_mul(g)?);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> PTensorH {
        if c.is_zero() {
            return PTensorH::zero(&self.alph);
        }
        PTensorH {
            parts: self.parts.iter().map(|(n, f)| (*n, f.scale(c))).collect(),
            alph: Arc::clone(&self.alph),
        }
    }

    /// The *-structure: (f (x) u^n)* = f* (x) u^{-n}.
    pub fn star(&self) -> PTensorH {
        let mut out = PTensorH::zero(&self.alph);
        for (n, f) in self.parts() {
            out.add_part(-n, f.star());
        }
        out
    }

    /// Reduces every left leg to normal form under `pres`.
    pub fn nf(&self, pres: &Presentation) -> Result<PTensorH> {
        let mut out = PTensorH::zero(&self.alph);
        for (n, f) in self.parts() {
            out.add_part(n, pres.nf(f)?);
        }
        Ok(out)
    }

    /// Filtration degree: max over summands of left degree + |winding|.
    pub fn degree(&self) -> usize {
        self.parts
            .iter()
            .map(|(n, f)| f.degree().unwrap_or(0) + n.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn to_text(&self) -> String {
        if self.parts.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (n, f) in self.parts() {
            let left = if f.num_terms() == 1 {
                f.to_text()
            } else {
                format!("({})", f.to_text())
            };
            parts.push(format!("{left} (x) {}", laurent_mono_text(n)));
        }
        parts.join(" + ")
    }
}

/// The right coaction of O(U(1)) determined by the winding grading:
/// each monomial c·w contributes c·w (x) u^{deg w}.
pub fn coaction(pres: &Presentation, f: &NCPoly) -> Result<PTensorH> {
    let mut out = PTensorH::zero(&pres.alphabet);
    for (w, c) in f.terms() {
        let n = pres.winding(w)?;
        out.add_part(n, NCPoly::from_term(&pres.alphabet, w.clone(), c.clone()));
    }
    Ok(out)
}

/// True iff every monomial of the normal form has winding degree zero.
pub fn is_coinvariant(pres: &Presentation, f: &NCPoly) -> Result<bool> {
    let nf = pres.nf(f)?;
    for (w, _) in nf.terms() {
        if pres.winding(w)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Writes a coinvariant element of the total algebra as a polynomial in the
/// base generators: finds g over `base` with nf(iota(g)) = nf(f), where
/// `iota_images` gives the embedding on each base letter. The solve is an
/// exact linear system over the iota-images of base basis words of degree
/// <= `d`.
pub fn express_in_base(
    total: &Presentation,
    base: &Presentation,
    iota_images: &[NCPoly],
    f: &NCPoly,
    d: usize,
) -> Result<NCPoly> {
    if !is_coinvariant(total, f)? {
        return Err(Error::NotCoinvariant(f.to_text()));
    }
    let image_deg = iota_images
        .iter()
        .filter_map(NCPoly::degree)
        .max()
        .unwrap_or(1);
    total.ensure_complete((image_deg * d).max(f.degree().unwrap_or(0)))?;
    base.ensure_complete(d)?;
    let target = pres_nf(total, f)?;

    let base_words = base.basis_upto(d)?;
    let mut columns = Vec::with_capacity(base_words.len());
    let mut index: BTreeMap<Word, usize> = BTreeMap::new();
    let coords = |g: &NCPoly, index: &mut BTreeMap<Word, usize>| {
        let mut col = BTreeMap::new();
        for (w, c) in g.terms() {
            let next = index.len();
            let i = *index.entry(w.clone()).or_insert(next);
            col.insert(i, c.clone());
        }
        col
    };
    for w in &base_words {
        let img = NCPoly::from_word(&base.alphabet, w.clone())
            .substitute(&total.alphabet, iota_images)?;
        let img = pres_nf(total, &img)?;
        columns.push(coords(&img, &mut index));
    }
    let rhs = coords(&target, &mut index);
    match solve_columns(&columns, &rhs) {
        Some(sol) => {
            let mut g = NCPoly::zero(&base.alphabet);
            for (w, c) in base_words.into_iter().zip(sol) {
                g.add_term(w, c);
            }
            Ok(g)
        }
        None => Err(Error::NoSolution(d)),
    }
}

fn pres_nf(pres: &Presentation, f: &NCPoly) -> Result<NCPoly> {
    pres.nf_extending(f)
}

/// Pretty diagnostic name for a word (used in error paths and reports).
pub fn describe_word(pres: &Presentation, w: &Word) -> String {
    word_to_text(w, &pres.alphabet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::presets;
    use crate::scalar::{rat, AlgebraParams};

    fn s3() -> &'static Presentation {
        static S3: std::sync::OnceLock<Presentation> = std::sync::OnceLock::new();
        S3.get_or_init(|| {
            let p = presets::s3(&AlgebraParams::default()).unwrap();
            p.ensure_complete(8).unwrap();
            p
        })
    }

    fn sphere() -> &'static Presentation {
        static SPHERE: std::sync::OnceLock<Presentation> = std::sync::OnceLock::new();
        SPHERE.get_or_init(|| {
            let p = presets::sphere(&AlgebraParams::default()).unwrap();
            p.ensure_complete(8).unwrap();
            p
        })
    }

    fn iota_images() -> Vec<NCPoly> {
        // f_0 -> b b*, f_1 -> b a, f_1* -> a* b*.
        ["b b*", "b a", "a* b*"]
            .iter()
            .map(|s| s3().parse(s).unwrap())
            .collect()
    }

    #[test]
    fn group_like_structure() {
        let u = Laurent::u(1);
        let mut expect = HTensorH::zero();
        expect.add_term(1, 1, Scalar::one());
        assert_eq!(u.coproduct(), expect);
        assert_eq!(Laurent::u(3).antipode(), Laurent::u(-3));
        let f = Laurent::from_terms([(1, rat(2, 1)), (-1, rat(-1, 1))]);
        assert_eq!(f.counit(), rat(1, 1));
    }

    #[test]
    fn hopf_axioms_on_powers() {
        // m(S (x) id)Δ = 1·ε and m(id (x) S)Δ = 1·ε on u^n, |n| <= 10.
        for n in -10..=10 {
            let h = Laurent::u(n);
            let lhs = h.coproduct().contract_left(|m| Laurent::u(-m));
            assert_eq!(lhs, Laurent::one().scale(&h.counit()));
            // Counit axiom: (ε (x) id)Δ = id.
            let mut via = Laurent::zero();
            for ((m, k), c) in h.coproduct().terms() {
                via = via.add(&Laurent::u(k).scale(c).scale(&Laurent::u(m).counit()));
            }
            assert_eq!(via, h);
        }
    }

    #[test]
    fn laurent_inverses_and_text() {
        assert_eq!(Laurent::u(1).mul(&Laurent::u(-1)), Laurent::one());
        assert_eq!(Laurent::u(2).star(), Laurent::u(-2));
        let f = Laurent::from_terms([(0, rat(1, 2)), (3, rat(1, 1))]);
        assert_eq!(f.to_text(), "(1/2) + u^3");
    }

    #[test]
    fn coaction_matches_grading() {
        let s3 = s3();
        let a = s3.parse("a").unwrap();
        let ca = coaction(s3, &a).unwrap();
        assert_eq!(ca, PTensorH::simple(&a, 1));
        let ba = s3.parse("b a").unwrap();
        assert_eq!(coaction(s3, &ba).unwrap(), PTensorH::simple(&ba, 0));
        let m = s3.parse("a^2 b*").unwrap();
        assert_eq!(coaction(s3, &m).unwrap(), PTensorH::simple(&m, 3));
    }

    #[test]
    fn coaction_is_an_algebra_map() {
        let s3 = s3();
        for (f, g) in [("a + 2 b*", "a* b - 1"), ("a b a*", "b* + a a*")] {
            let f = s3.nf(&s3.parse(f).unwrap()).unwrap();
            let g = s3.nf(&s3.parse(g).unwrap()).unwrap();
            let lhs = coaction(s3, &s3.nf(&f.checked_mul(&g).unwrap()).unwrap()).unwrap();
            let rhs = coaction(s3, &f)
                .unwrap()
                .checked_mul(&coaction(s3, &g).unwrap())
                .unwrap()
                .nf(s3)
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn coinvariance() {
        let s3 = s3();
        for (text, expect) in [("b b*", true), ("a", false), ("a a* b b*", true)] {
            let f = s3.parse(text).unwrap();
            assert_eq!(is_coinvariant(s3, &f).unwrap(), expect, "{text}");
        }
    }

    #[test]
    fn express_known_coinvariants() {
        let s3 = s3();
        let sphere = sphere();
        let images = iota_images();
        for (total_text, base_text) in [
            ("b b*", "f_0"),
            ("b a", "f_1"),
            ("a a*", "1 - f_0 + f_1 f_1*"),
        ] {
            let f = s3.parse(total_text).unwrap();
            let g = express_in_base(s3, sphere, &images, &f, 4).unwrap();
            let expect = sphere.nf(&sphere.parse(base_text).unwrap()).unwrap();
            assert_eq!(g, expect, "{total_text}");
            // Section property: nf(iota(g)) = nf(f).
            let back = g.substitute(&s3.alphabet, &images).unwrap();
            assert_eq!(s3.nf(&back).unwrap(), s3.nf(&f).unwrap());
        }
    }

    #[test]
    fn express_rejects_non_coinvariant() {
        let s3 = s3();
        let sphere = sphere();
        let f = s3.parse("a").unwrap();
        assert!(matches!(
            express_in_base(s3, sphere, &iota_images(), &f, 4),
            Err(Error::NotCoinvariant(_))
        ));
    }

    #[test]
    fn tensor_text_format() {
        let s3 = s3();
        let t = PTensorH::simple(&s3.parse("a*").unwrap(), 1)
            .checked_add(&PTensorH::simple(&s3.parse("1/4 b").unwrap(), -1))
            .unwrap();
        assert_eq!(t.to_text(), "(1/4) b (x) u^-1 + a* (x) u");
    }
}
