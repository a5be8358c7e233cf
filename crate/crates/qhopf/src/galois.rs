//! The Hopf-Galois layer: balanced tensors over the base, the canonical
//! map, the strong connection lifting the translation map, and the
//! projector matrices of the associated line bundles.

use std::collections::BTreeMap;
use std::sync::RwLock;

use num_traits::Zero;
use serde::Serialize;

use crate::hopf::{is_coinvariant, PTensorH};
use crate::linalg::{nullspace, solve_columns, SparseVec};
use crate::ncpoly::{NCPoly, Word};
use crate::report::CheckReport;
use crate::rewrite::Presentation;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Element of P (x)_B P as a list of simple tensors with polynomial legs.
/// The balanced relation (moving coinvariant factors across the tensor
/// sign) is respected by every operation defined here; `sweep_balanced`
/// picks a deterministic representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PTensorP {
    terms: Vec<(NCPoly, NCPoly)>,
}

impl PTensorP {
    pub fn new(terms: Vec<(NCPoly, NCPoly)>) -> Self {
        PTensorP { terms }
    }

    pub fn one(pres: &Presentation) -> Self {
        PTensorP {
            terms: vec![(NCPoly::one(&pres.alphabet), NCPoly::one(&pres.alphabet))],
        }
    }

    pub fn terms(&self) -> &[(NCPoly, NCPoly)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Reduces both legs of every summand and drops vanished summands.
    pub fn nf(&self, pres: &Presentation) -> Result<PTensorP> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (l, r) in &self.terms {
            let l = pres.nf_extending(l)?;
            let r = pres.nf_extending(r)?;
            if !l.is_zero() && !r.is_zero() {
                terms.push((l, r));
            }
        }
        Ok(PTensorP { terms })
    }

    /// Multiplication contraction m(p (x) p') = p p'.
    pub fn contract(&self, pres: &Presentation) -> Result<NCPoly> {
        let mut out = NCPoly::zero(&pres.alphabet);
        for (l, r) in &self.terms {
            out = out.checked_add(&pres.nf_extending(&l.checked_mul(r)?)?)?;
        }
        pres.nf_extending(&out)
    }

    /// The canonical map p (x) p' -> sum p p'_n (x) u^n into P (x) H.
    pub fn canonical_map(&self, pres: &Presentation) -> Result<PTensorH> {
        let mut out = PTensorH::zero(&pres.alphabet);
        for (l, r) in &self.terms {
            let r = pres.nf_extending(r)?;
            for (w, c) in r.terms() {
                let n = pres.winding(w)?;
                let prod = l
                    .checked_mul(&NCPoly::from_term(&pres.alphabet, w.clone(), c.clone()))?;
                out.add_part(n, pres.nf_extending(&prod)?);
            }
        }
        Ok(out)
    }

    /// Sandwich product: sum_i alpha_i . self . beta_i over the summands of
    /// `outer`.
    pub fn sandwich(&self, outer: &PTensorP) -> Result<PTensorP> {
        let mut terms = Vec::with_capacity(self.terms.len() * outer.terms.len());
        for (a, b) in &outer.terms {
            for (l, r) in &self.terms {
                terms.push((a.checked_mul(l)?, r.checked_mul(b)?));
            }
        }
        Ok(PTensorP { terms })
    }

    /// Deterministic balanced representative: coinvariant (winding-zero)
    /// suffixes of left-leg monomials are moved to the right leg, longest
    /// suffix first, until no monomial has a movable suffix. This fixes a
    /// representative but does not decide balanced equality in general;
    /// operations that must be well defined on balanced classes
    /// (`canonical_map`, `contract`) are insensitive to the representative
    /// by construction.
    pub fn sweep_balanced(&self, pres: &Presentation) -> Result<PTensorP> {
        let mut pending: Vec<(Word, Word, Scalar)> = Vec::new();
        for (l, r) in &self.terms {
            let l = pres.nf_extending(l)?;
            let r = pres.nf_extending(r)?;
            for (wl, cl) in l.terms() {
                for (wr, cr) in r.terms() {
                    pending.push((wl.clone(), wr.clone(), cl * cr));
                }
            }
        }
        let mut done: BTreeMap<(Word, Word), Scalar> = BTreeMap::new();
        while let Some((wl, wr, c)) = pending.pop() {
            // Longest nonempty suffix of zero winding.
            let mut cut = None;
            for at in 0..wl.degree() {
                let suffix = wl.slice(at, wl.degree());
                if pres.winding(&suffix)? == 0 {
                    cut = Some(at);
                    break;
                }
            }
            match cut {
                None => {
                    let e = done.entry((wl, wr)).or_insert_with(Scalar::zero);
                    *e += c;
                }
                Some(at) => {
                    let suffix = wl.slice(at, wl.degree());
                    let head = wl.slice(0, at);
                    let moved = pres.nf_extending(&NCPoly::from_word(&pres.alphabet, suffix)
                        .checked_mul(&NCPoly::from_word(&pres.alphabet, wr))?)?;
                    for (w2, c2) in moved.terms() {
                        pending.push((head.clone(), w2.clone(), &c * c2));
                    }
                }
            }
        }
        done.retain(|_, c| !c.is_zero());
        let terms = done
            .into_iter()
            .map(|((wl, wr), c)| {
                (
                    NCPoly::from_term(&pres.alphabet, wl, c),
                    NCPoly::from_word(&pres.alphabet, wr),
                )
            })
            .collect();
        Ok(PTensorP { terms })
    }
}

/// A projector matrix with entries in the total algebra; all entries are
/// coinvariant, so it represents a finitely generated projective module
/// over the base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectorMatrix {
    pub winding: i64,
    pub entries: Vec<Vec<NCPoly>>,
}

#[derive(Serialize)]
struct ProjectorDoc {
    n: i64,
    size: usize,
    entries: Vec<Vec<String>>,
}

impl ProjectorMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Trace as an element of the total algebra.
    pub fn trace(&self, pres: &Presentation) -> Result<NCPoly> {
        let mut out = NCPoly::zero(&pres.alphabet);
        for i in 0..self.size() {
            out = out.checked_add(&self.entries[i][i])?;
        }
        pres.nf_extending(&out)
    }

    /// Exact idempotence check E^2 = E.
    pub fn is_idempotent(&self, pres: &Presentation) -> Result<bool> {
        let k = self.size();
        for i in 0..k {
            for j in 0..k {
                let mut sum = NCPoly::zero(&pres.alphabet);
                for m in 0..k {
                    sum = sum
                        .checked_add(&pres.nf_extending(
                            &self.entries[i][m].checked_mul(&self.entries[m][j])?,
                        )?)?;
                }
                if pres.nf_extending(&sum)? != pres.nf_extending(&self.entries[i][j])? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn all_entries_coinvariant(&self, pres: &Presentation) -> Result<bool> {
        for row in &self.entries {
            for e in row {
                if !is_coinvariant(pres, e)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> String {
        let doc = ProjectorDoc {
            n: self.winding,
            size: self.size(),
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(NCPoly::to_text).collect())
                .collect(),
        };
        serde_json::to_string(&doc).expect("projector serializes")
    }
}

/// The strong connection: a unital bicolinear lift of the translation map,
/// memoized per winding.
pub struct StrongConnection<'a> {
    pres: &'a Presentation,
    memo: RwLock<BTreeMap<i64, PTensorP>>,
}

impl<'a> StrongConnection<'a> {
    /// Derives the generator lifts by exact linear solve and fails if the
    /// minimal ansatz does not determine them uniquely.
    pub fn new(pres: &'a Presentation) -> Result<Self> {
        let conn = StrongConnection {
            pres,
            memo: RwLock::new(BTreeMap::new()),
        };
        let l_plus = conn.solve_generator(&[("a*", "a"), ("b", "b*"), ("b a a*", "b*")])?;
        let l_minus = conn.solve_generator(&[("b*", "b"), ("a", "a*"), ("a b b*", "a*")])?;
        let mut memo = conn.memo.write().unwrap();
        memo.insert(0, PTensorP::one(pres));
        memo.insert(1, l_plus);
        memo.insert(-1, l_minus);
        drop(memo);
        Ok(conn)
    }

    /// Solves sum_i c_i nf(alpha_i beta_i) = 1 over the given simple-tensor
    /// ansatz; the solution must be unique.
    fn solve_generator(&self, ansatz: &[(&str, &str)]) -> Result<PTensorP> {
        let mut index: BTreeMap<Word, usize> = BTreeMap::new();
        let coords = |f: &NCPoly, index: &mut BTreeMap<Word, usize>| -> SparseVec {
            let mut v = SparseVec::new();
            for (w, c) in f.terms() {
                let next = index.len();
                let i = *index.entry(w.clone()).or_insert(next);
                v.insert(i, c.clone());
            }
            v
        };
        let pairs: Vec<(NCPoly, NCPoly)> = ansatz
            .iter()
            .map(|(l, r)| Ok((self.pres.parse(l)?, self.pres.parse(r)?)))
            .collect::<Result<_>>()?;
        let mut columns = Vec::with_capacity(pairs.len());
        for (l, r) in &pairs {
            let prod = self.pres.nf_extending(&l.checked_mul(r)?)?;
            columns.push(coords(&prod, &mut index));
        }
        let rhs = coords(&NCPoly::one(&self.pres.alphabet), &mut index);
        let sol = solve_columns(&columns, &rhs).ok_or(Error::NoSolution(3))?;
        // Uniqueness: the columns must be linearly independent.
        let ncols = columns.len();
        let mut rows = vec![vec![Scalar::zero(); ncols]; index.len()];
        for (j, col) in columns.iter().enumerate() {
            for (i, c) in col {
                rows[*i][j] = c.clone();
            }
        }
        if !nullspace(&rows, ncols).is_empty() {
            return Err(Error::InvalidParam(
                "strong-connection ansatz is degenerate".into(),
            ));
        }
        // Group summands by right leg so each group's left leg is a single
        // polynomial; this gives the minimal matrix size downstream.
        let mut grouped: BTreeMap<Word, NCPoly> = BTreeMap::new();
        for ((l, r), c) in pairs.into_iter().zip(sol) {
            if c.is_zero() {
                continue;
            }
            let (rw, _) = r.leading().expect("monomial right leg");
            let entry = grouped
                .entry(rw.clone())
                .or_insert_with(|| NCPoly::zero(&self.pres.alphabet));
            *entry = entry.checked_add(&l.scale(&c))?;
        }
        let terms = grouped
            .into_iter()
            .map(|(rw, l)| {
                Ok((
                    self.pres.nf_extending(&l)?,
                    NCPoly::from_word(&self.pres.alphabet, rw),
                ))
            })
            .collect::<Result<_>>()?;
        Ok(PTensorP::new(terms))
    }

    /// The lift of u^n, built by the sandwich recursion from the generator
    /// lifts.
    pub fn lift(&self, n: i64) -> Result<PTensorP> {
        if let Some(t) = self.memo.read().unwrap().get(&n) {
            return Ok(t.clone());
        }
        let step = if n > 0 { 1 } else { -1 };
        let inner = self.lift(n - step)?;
        let outer = self.memo.read().unwrap().get(&step).cloned().unwrap();
        let next = inner.sandwich(&outer)?.nf(self.pres)?;
        self.memo.write().unwrap().insert(n, next.clone());
        Ok(next)
    }

    /// can(l(u^n)) must be 1 (x) u^n; checks all |n| <= max_winding.
    pub fn verify_galois(&self, max_winding: i64) -> Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        for n in -max_winding..=max_winding {
            let img = self.lift(n)?.canonical_map(self.pres)?;
            let expect = PTensorH::simple(&NCPoly::one(&self.pres.alphabet), n);
            out.push(if img == expect {
                CheckReport::pass("galois-canonical", &format!("u^{n}"), None)
            } else {
                CheckReport::fail(
                    "galois-canonical",
                    &format!("u^{n}"),
                    None,
                    img.to_text(),
                )
            });
        }
        Ok(out)
    }

    /// m(l(u^n)) must be the unit; checks all |n| <= max_winding.
    pub fn verify_unit_contraction(&self, max_winding: i64) -> Result<Vec<CheckReport>> {
        let one = NCPoly::one(&self.pres.alphabet);
        let mut out = Vec::new();
        for n in -max_winding..=max_winding {
            let m = self.lift(n)?.contract(self.pres)?;
            out.push(if m == one {
                CheckReport::pass("galois-unit", &format!("u^{n}"), None)
            } else {
                CheckReport::fail("galois-unit", &format!("u^{n}"), None, m.to_text())
            });
        }
        Ok(out)
    }

    /// Left legs of l(u^n) are homogeneous of winding -n, right legs of
    /// winding +n.
    pub fn verify_homogeneity(&self, max_winding: i64) -> Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        for n in -max_winding..=max_winding {
            let l = self.lift(n)?;
            let mut ok = true;
            for (left, right) in l.terms() {
                for (w, _) in left.terms() {
                    ok &= self.pres.winding(w)? == -n;
                }
                for (w, _) in right.terms() {
                    ok &= self.pres.winding(w)? == n;
                }
            }
            out.push(if ok {
                CheckReport::pass("galois-homogeneous", &format!("u^{n}"), None)
            } else {
                CheckReport::fail(
                    "galois-homogeneous",
                    &format!("u^{n}"),
                    None,
                    "leg with wrong winding".into(),
                )
            });
        }
        Ok(out)
    }

    /// The projector of the associated line bundle of winding n: writing
    /// l(u^n) = sum_i alpha_i (x) beta_i, the matrix nf(beta_i alpha_j).
    pub fn projector(&self, n: i64) -> Result<ProjectorMatrix> {
        let l = self.lift(n)?;
        let k = l.len();
        let mut entries = vec![vec![NCPoly::zero(&self.pres.alphabet); k]; k];
        for (i, (_, beta_i)) in l.terms().iter().enumerate() {
            for (j, (alpha_j, _)) in l.terms().iter().enumerate() {
                entries[i][j] = self
                    .pres
                    .nf_extending(&beta_i.checked_mul(alpha_j)?)?;
            }
        }
        Ok(ProjectorMatrix {
            winding: n,
            entries,
        })
    }
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

    fn conn() -> StrongConnection<'static> {
        StrongConnection::new(s3()).unwrap()
    }

    #[test]
    fn canonical_map_basics() {
        let s3 = s3();
        let one = PTensorP::one(s3);
        assert_eq!(
            one.canonical_map(s3).unwrap(),
            PTensorH::simple(&NCPoly::one(&s3.alphabet), 0)
        );
        let t = PTensorP::new(vec![(NCPoly::one(&s3.alphabet), s3.parse("a").unwrap())]);
        assert_eq!(
            t.canonical_map(s3).unwrap(),
            PTensorH::simple(&s3.parse("a").unwrap(), 1)
        );
    }

    #[test]
    fn generator_lifts_solved_exactly() {
        let c = conn();
        let s3 = s3();
        let l1 = c.lift(1).unwrap();
        // a* (x) a + q b(1 - a a*) (x) b*.
        let expect = PTensorP::new(vec![
            (s3.parse("a*").unwrap(), s3.parse("a").unwrap()),
            (
                s3.nf(&s3.parse("q (b - b a a*)").unwrap()).unwrap(),
                s3.parse("b*").unwrap(),
            ),
        ]);
        assert_eq!(l1, expect);
        let lm1 = c.lift(-1).unwrap();
        let expect = PTensorP::new(vec![
            (
                s3.nf(&s3.parse("p (a - a b b*)").unwrap()).unwrap(),
                s3.parse("a*").unwrap(),
            ),
            (s3.parse("b*").unwrap(), s3.parse("b").unwrap()),
        ]);
        assert_eq!(lm1, expect);
    }

    #[test]
    fn galois_and_unit_witnesses() {
        let c = conn();
        assert!(crate::report::all_passed(&c.verify_galois(3).unwrap()));
        assert!(crate::report::all_passed(
            &c.verify_unit_contraction(4).unwrap()
        ));
        assert!(crate::report::all_passed(&c.verify_homogeneity(4).unwrap()));
    }

    #[test]
    fn balanced_classes_share_canonical_image() {
        let s3 = s3();
        // can((p b) (x) p') = can(p (x) (b p')) for coinvariant b.
        for (p, b, p2) in [
            ("a*", "b b*", "a"),
            ("b", "a a*", "b*"),
            ("a* b*", "a a* b b*", "b a"),
        ] {
            let p = s3.parse(p).unwrap();
            let b = s3.parse(b).unwrap();
            let p2 = s3.parse(p2).unwrap();
            let lhs = PTensorP::new(vec![(p.checked_mul(&b).unwrap(), p2.clone())]);
            let rhs = PTensorP::new(vec![(p.clone(), b.checked_mul(&p2).unwrap())]);
            assert_eq!(
                lhs.canonical_map(s3).unwrap(),
                rhs.canonical_map(s3).unwrap()
            );
            // The contraction is also insensitive to the representative.
            assert_eq!(lhs.contract(s3).unwrap(), rhs.contract(s3).unwrap());
        }
        // The sweep joins representatives whose coinvariant factor sits at
        // the right end of the left leg in normal form.
        let p = s3.parse("a*").unwrap();
        let b = s3.parse("b b*").unwrap();
        let p2 = s3.parse("a").unwrap();
        let lhs = PTensorP::new(vec![(p.checked_mul(&b).unwrap(), p2.clone())]);
        let rhs = PTensorP::new(vec![(p, b.checked_mul(&p2).unwrap())]);
        assert_eq!(
            lhs.sweep_balanced(s3).unwrap(),
            rhs.sweep_balanced(s3).unwrap()
        );
    }

    #[test]
    fn projector_winding_one_closed_form() {
        let c = conn();
        let s3 = s3();
        let e = c.projector(1).unwrap();
        assert_eq!(e.size(), 2);
        let expect = |t: &str| s3.nf(&s3.parse(t).unwrap()).unwrap();
        assert_eq!(e.entries[0][0], expect("a a*"));
        assert_eq!(e.entries[0][1], expect("q (a b - a b a a*)"));
        assert_eq!(e.entries[1][0], expect("a* b*"));
        assert_eq!(e.entries[1][1], expect("q (1 - a a*)"));
        assert!(e.is_idempotent(s3).unwrap());
        assert!(e.all_entries_coinvariant(s3).unwrap());
    }

    #[test]
    fn projector_degenerate_winding() {
        let c = conn();
        let e = c.projector(0).unwrap();
        assert_eq!(e.size(), 1);
        assert_eq!(e.entries[0][0], NCPoly::one(&s3().alphabet));
    }

    #[test]
    fn projector_idempotence_higher_windings() {
        let c = conn();
        let s3 = s3();
        for n in [-2i64, -1, 2] {
            let e = c.projector(n).unwrap();
            assert_eq!(e.size(), 1 << n.unsigned_abs());
            assert!(e.is_idempotent(s3).unwrap(), "winding {n}");
            assert!(e.all_entries_coinvariant(s3).unwrap(), "winding {n}");
        }
    }

    #[test]
    fn projector_entries_express_in_base() {
        let c = conn();
        let s3 = s3();
        let sphere = presets::sphere(&AlgebraParams::default()).unwrap();
        sphere.ensure_complete(8).unwrap();
        let images: Vec<NCPoly> = ["b b*", "b a", "a* b*"]
            .iter()
            .map(|t| s3.parse(t).unwrap())
            .collect();
        let e = c.projector(1).unwrap();
        let g =
            crate::hopf::express_in_base(s3, &sphere, &images, &e.entries[0][0], 4).unwrap();
        let expect = sphere
            .nf(&sphere.parse("1 - f_0 + f_1 f_1*").unwrap())
            .unwrap();
        assert_eq!(g, expect);
        for row in &e.entries {
            for entry in row {
                crate::hopf::express_in_base(s3, &sphere, &images, entry, 4).unwrap();
            }
        }
    }

    #[test]
    fn projector_json_shape() {
        let c = conn();
        let e = c.projector(1).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(doc["n"], 1);
        assert_eq!(doc["size"], 2);
        assert_eq!(doc["entries"][0][0], "a a*");
    }

    #[test]
    fn trace_of_winding_one() {
        let c = conn();
        let s3 = s3();
        let tr = c.projector(1).unwrap().trace(s3).unwrap();
        // a a* + q (1 - a a*).
        let expect = s3.nf(&s3.parse("a a* + q - q a a*").unwrap()).unwrap();
        assert_eq!(tr, expect);
        assert_eq!(tr.coeff(&Word::empty()), rat(1, 4));
    }
}
