//! The two-chart geometry: quotient maps onto the discs, boundary
//! restriction to the circle, the transition function, trivializations of
//! the total space, and the glued model it embeds into.
//!
//! All checks work on degree filtrations with exact rational rank
//! computations; ideals are never materialized.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::hopf::{coaction, Laurent, PTensorH};
use crate::linalg::{nullspace, Echelon, SparseVec};
use crate::ncpoly::{word_to_text, Alphabet, NCPoly, Word};
use crate::report::CheckReport;
use crate::rewrite::{presets, Presentation};
use crate::scalar::{AlgebraParams, Scalar};
use crate::{Error, Result};

/// Generator-image homomorphism between presented algebras.
#[derive(Debug, Clone)]
pub struct PolyMap {
    pub name: String,
    target: Arc<Alphabet>,
    images: Vec<NCPoly>,
}

impl PolyMap {
    pub fn new(name: &str, source: &Presentation, images: Vec<NCPoly>) -> Result<Self> {
        if images.len() != source.alphabet.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} images for {} letters in map {name}",
                images.len(),
                source.alphabet.len()
            )));
        }
        let target = Arc::clone(images[0].alphabet());
        Ok(PolyMap {
            name: name.to_string(),
            target,
            images,
        })
    }

    pub fn apply(&self, f: &NCPoly) -> Result<NCPoly> {
        f.substitute(&self.target, &self.images)
    }

    pub fn image_of(&self, l: crate::ncpoly::Letter) -> &NCPoly {
        &self.images[l.0 as usize]
    }
}

/// Generator-image homomorphism into a B (x) H algebra.
#[derive(Debug, Clone)]
pub struct TensorMap {
    pub name: String,
    target: Arc<Alphabet>,
    images: Vec<PTensorH>,
}

impl TensorMap {
    pub fn new(name: &str, source: &Presentation, images: Vec<PTensorH>) -> Result<Self> {
        if images.len() != source.alphabet.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} images for {} letters in map {name}",
                images.len(),
                source.alphabet.len()
            )));
        }
        let target = images
            .iter()
            .find_map(|t| t.parts().next().map(|(_, f)| Arc::clone(f.alphabet())))
            .ok_or_else(|| Error::InvalidParam(format!("map {name} has no nonzero image")))?;
        Ok(TensorMap {
            name: name.to_string(),
            target,
            images,
        })
    }

    pub fn apply(&self, f: &NCPoly) -> Result<PTensorH> {
        let mut out = PTensorH::zero(&self.target);
        for (w, c) in f.terms() {
            let mut prod = PTensorH::simple(&NCPoly::one(&self.target), 0);
            for l in w.letters() {
                prod = prod.checked_mul(&self.images[l.0 as usize])?;
            }
            out = out.checked_add(&prod.scale(c))?;
        }
        Ok(out)
    }

    pub fn image_of(&self, l: crate::ncpoly::Letter) -> &PTensorH {
        &self.images[l.0 as usize]
    }
}

/// One element of the glued model: a tensor over each chart, subject to the
/// boundary compatibility below.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluedElement {
    pub p: PTensorH,
    pub q: PTensorH,
}

impl GluedElement {
    pub fn checked_add(&self, other: &GluedElement) -> Result<GluedElement> {
        Ok(GluedElement {
            p: self.p.checked_add(&other.p)?,
            q: self.q.checked_add(&other.q)?,
        })
    }

    pub fn checked_mul(&self, other: &GluedElement) -> Result<GluedElement> {
        Ok(GluedElement {
            p: self.p.checked_mul(&other.p)?,
            q: self.q.checked_mul(&other.q)?,
        })
    }

    pub fn star(&self) -> GluedElement {
        GluedElement {
            p: self.p.star(),
            q: self.q.star(),
        }
    }

    pub fn neg(&self) -> GluedElement {
        GluedElement {
            p: self.p.neg(),
            q: self.q.neg(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// The coaction on the glued model applies the coproduct on the right
    /// legs; for the group-like right legs this leaves the winding indices
    /// in place, so membership is stable under it.
    pub fn coaction_windings(&self) -> Vec<i64> {
        let mut ns: Vec<i64> = self
            .p
            .parts()
            .map(|(n, _)| n)
            .chain(self.q.parts().map(|(n, _)| n))
            .collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }
}

/// Coordinate labels for the exact rank computations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Coord {
    /// (chart, reduced word, H winding). Plain quotient coordinates use
    /// winding 0.
    Chart(usize, Word, i64),
}

#[derive(Debug, Default)]
struct CoordIndex {
    map: BTreeMap<Coord, usize>,
}

impl CoordIndex {
    fn get(&mut self, c: Coord) -> usize {
        let next = self.map.len();
        *self.map.entry(c).or_insert(next)
    }
}

/// The locally trivial U(1)-bundle: total space, base, the two disc charts,
/// the boundary circle, and all structure maps between them.
pub struct HopfFibration {
    pub params: AlgebraParams,
    pub s3: Presentation,
    pub sphere: Presentation,
    pub disc_p: Presentation,
    pub disc_q: Presentation,
    pub circle: Presentation,
    pub iota: PolyMap,
    pub pi_p: PolyMap,
    pub pi_q: PolyMap,
    pub phi_p: PolyMap,
    pub phi_q: PolyMap,
    pub chi_p: TensorMap,
    pub chi_q: TensorMap,
}

impl HopfFibration {
    pub fn new(params: &AlgebraParams) -> Result<Self> {
        let s3 = presets::s3(params)?;
        let sphere = presets::sphere(params)?;
        let disc_p = presets::disc(params.p.clone())?;
        let disc_q = presets::disc_named("y", params.q.clone())?;
        let circle = presets::circle()?;
        circle.raise_degree_cap(64);
        disc_p.raise_degree_cap(32);
        disc_q.raise_degree_cap(32);

        let parse_all = |pres: &Presentation, texts: &[&str]| -> Result<Vec<NCPoly>> {
            texts.iter().map(|t| pres.parse(t)).collect()
        };
        let iota = PolyMap::new("iota", &sphere, parse_all(&s3, &["b b*", "b a", "a* b*"])?)?;
        let pi_p = PolyMap::new("pi_p", &sphere, parse_all(&disc_p, &["x x*", "x", "x*"])?)?;
        let pi_q = PolyMap::new("pi_q", &sphere, parse_all(&disc_q, &["1", "y", "y*"])?)?;
        let phi_p = PolyMap::new("phi_p", &disc_p, parse_all(&circle, &["u", "u*"])?)?;
        let phi_q = PolyMap::new("phi_q", &disc_q, parse_all(&circle, &["u", "u*"])?)?;

        let one_p = NCPoly::one(&disc_p.alphabet);
        let x = disc_p.parse("x")?;
        let x_star = disc_p.parse("x*")?;
        let chi_p = TensorMap::new(
            "chi_p",
            &s3,
            vec![
                PTensorH::simple(&one_p, 1),     // a -> 1 (x) u
                PTensorH::simple(&one_p, -1),    // a* -> 1 (x) u^-1
                PTensorH::simple(&x, -1),        // b -> x (x) u*
                PTensorH::simple(&x_star, 1),    // b* -> x* (x) u
            ],
        )?;
        let one_q = NCPoly::one(&disc_q.alphabet);
        let y = disc_q.parse("y")?;
        let y_star = disc_q.parse("y*")?;
        let chi_q = TensorMap::new(
            "chi_q",
            &s3,
            vec![
                PTensorH::simple(&y, 1),         // a -> y (x) u
                PTensorH::simple(&y_star, -1),   // a* -> y* (x) u^-1
                PTensorH::simple(&one_q, -1),    // b -> 1 (x) u*
                PTensorH::simple(&one_q, 1),     // b* -> 1 (x) u
            ],
        )?;

        Ok(HopfFibration {
            params: params.clone(),
            s3,
            sphere,
            disc_p,
            disc_q,
            circle,
            iota,
            pi_p,
            pi_q,
            phi_p,
            phi_q,
            chi_p,
            chi_q,
        })
    }

    fn chart(&self, side: usize) -> (&Presentation, &PolyMap, &PolyMap, &TensorMap) {
        match side {
            0 => (&self.disc_p, &self.pi_p, &self.phi_p, &self.chi_p),
            _ => (&self.disc_q, &self.pi_q, &self.phi_q, &self.chi_q),
        }
    }

    /// The transition function on u^n: the boundary generator to the n-th
    /// power.
    pub fn tau(&self, n: i64) -> Laurent {
        Laurent::u(n)
    }

    /// tau composed with the antipode — the inverse transition function.
    pub fn tau_21(&self, n: i64) -> Laurent {
        self.tau(-n)
    }

    /// Boundary value of a disc polynomial as a Laurent series in the
    /// circle generator.
    fn boundary_laurent(&self, side: usize, f: &NCPoly) -> Result<Laurent> {
        let (_, _, phi, _) = self.chart(side);
        let img = self.circle.nf_extending(&phi.apply(f)?)?;
        let mut out = Laurent::zero();
        for (w, c) in img.terms() {
            out.add_term(self.circle.winding(w)?, c.clone());
        }
        Ok(out)
    }

    /// Boundary coordinates (circle winding, H winding) of a chart tensor.
    fn boundary_coords(&self, side: usize, t: &PTensorH) -> Result<BTreeMap<(i64, i64), Scalar>> {
        let mut out: BTreeMap<(i64, i64), Scalar> = BTreeMap::new();
        for (n, f) in t.parts() {
            for (m, c) in self.boundary_laurent(side, f)?.terms() {
                // Chart q values are twisted by the transition function
                // before comparison: g (x) u^n restricts to g·u^{-n} (x) u^n.
                let key = if side == 0 { (m, n) } else { (m - n, n) };
                let entry = out.entry(key).or_insert_with(Scalar::zero);
                *entry += c;
                if entry.is_zero() {
                    out.remove(&key);
                }
            }
        }
        Ok(out)
    }

    /// Membership in the glued algebra: the two boundary restrictions agree
    /// after the transition twist.
    pub fn is_compatible(&self, g: &GluedElement) -> Result<bool> {
        Ok(self.boundary_coords(0, &g.p)? == self.boundary_coords(1, &g.q)?)
    }

    /// Embeds a total-space element by applying both trivializations.
    pub fn pair_embedding(&self, f: &NCPoly) -> Result<GluedElement> {
        Ok(GluedElement {
            p: self.chi_p.apply(f)?.nf(&self.disc_p)?,
            q: self.chi_q.apply(f)?.nf(&self.disc_q)?,
        })
    }

    /// The embedding of a base element: (pi_p(b) (x) 1, pi_q(b) (x) 1).
    pub fn base_embedding(&self, b: &NCPoly) -> Result<GluedElement> {
        Ok(GluedElement {
            p: PTensorH::simple(&self.disc_p.nf_extending(&self.pi_p.apply(b)?)?, 0),
            q: PTensorH::simple(&self.disc_q.nf_extending(&self.pi_q.apply(b)?)?, 0),
        })
    }

    fn glued_vec(&self, g: &GluedElement, index: &mut CoordIndex) -> SparseVec {
        let mut v = SparseVec::new();
        for (side, t) in [(0usize, &g.p), (1, &g.q)] {
            for (n, f) in t.parts() {
                for (w, c) in f.terms() {
                    let i = index.get(Coord::Chart(side, w.clone(), n));
                    v.insert(i, c.clone());
                }
            }
        }
        v
    }

    /// Exact rank of the glued image of all total-space basis words of
    /// degree <= d. Equality with the basis count certifies injectivity of
    /// the embedding at that degree.
    pub fn rank_of_image(&self, d: usize) -> Result<(usize, usize)> {
        self.s3.ensure_complete(d.max(self.s3.completed_to()))?;
        let words = self.s3.basis_upto(d)?;
        let mut index = CoordIndex::default();
        let mut ech = Echelon::new();
        for w in &words {
            let g = self.pair_embedding(&NCPoly::from_word(&self.s3.alphabet, w.clone()))?;
            ech.insert(self.glued_vec(&g, &mut index));
        }
        Ok((ech.rank(), words.len()))
    }

    /// Zero-intersection check for a family of quotient maps on a common
    /// base: the joint image of the degree-<=d basis has full rank iff the
    /// kernels intersect trivially on that filtration.
    pub fn check_covering_maps(
        base: &Presentation,
        quotients: &[(&Presentation, &PolyMap)],
        d: usize,
        instance: &str,
    ) -> Result<CheckReport> {
        base.ensure_complete(d.max(base.completed_to()))?;
        let words = base.basis_upto(d)?;
        let mut index = CoordIndex::default();
        let mut vectors = Vec::with_capacity(words.len());
        for w in &words {
            let mut v = SparseVec::new();
            for (side, (pres, map)) in quotients.iter().enumerate() {
                let img = pres.nf_extending(&map.apply(&NCPoly::from_word(&base.alphabet, w.clone()))?)?;
                for (wq, c) in img.terms() {
                    let i = index.get(Coord::Chart(side, wq.clone(), 0));
                    let entry = v.entry(i).or_insert_with(Scalar::zero);
                    *entry += c;
                    if entry.is_zero() {
                        v.remove(&i);
                    }
                }
            }
            vectors.push(v);
        }
        let mut ech = Echelon::new();
        let rank = {
            for v in &vectors {
                ech.insert(v.clone());
            }
            ech.rank()
        };
        if rank == words.len() {
            return Ok(CheckReport::pass("covering", instance, Some(d)));
        }
        // Produce a witness in the kernel intersection: a nonzero nullspace
        // combination of the basis words.
        let ncols = index.map.len();
        let rows: Vec<Vec<Scalar>> = {
            // Transpose: one equation per coordinate.
            let mut m = vec![vec![Scalar::zero(); words.len()]; ncols];
            for (j, v) in vectors.iter().enumerate() {
                for (i, c) in v {
                    m[*i][j] = c.clone();
                }
            }
            m
        };
        let ns = nullspace(&rows, words.len());
        let witness = ns
            .first()
            .map(|coeffs| {
                let mut f = NCPoly::zero(&base.alphabet);
                for (w, c) in words.iter().zip(coeffs) {
                    f.add_term(w.clone(), c.clone());
                }
                f.to_text()
            })
            .unwrap_or_else(|| "rank deficiency".into());
        Ok(CheckReport::fail("covering", instance, Some(d), witness))
    }

    /// Covering check for the base covering {ker pi_p, ker pi_q}.
    pub fn check_covering(&self, d: usize) -> Result<CheckReport> {
        Self::check_covering_maps(
            &self.sphere,
            &[(&self.disc_p, &self.pi_p), (&self.disc_q, &self.pi_q)],
            d,
            "sphere",
        )
    }

    /// Both quotient maps must annihilate every base relation.
    pub fn check_quotient_relations(&self) -> Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        for (pres, map) in [(&self.disc_p, &self.pi_p), (&self.disc_q, &self.pi_q)] {
            for rel in &self.sphere.relations {
                let img = pres.nf_extending(&map.apply(rel)?)?;
                if img.is_zero() {
                    out.push(CheckReport::pass("quotient-relation", &map.name, None));
                } else {
                    out.push(CheckReport::fail(
                        "quotient-relation",
                        &map.name,
                        None,
                        format!("{} -> {}", rel.to_text(), img.to_text()),
                    ));
                }
            }
        }
        Ok(out)
    }

    /// Completeness of the base covering at degree d: every boundary-
    /// compatible pair of chart values of degree <= d is the image of a base
    /// element. The spanning side may need slightly deeper base words; the
    /// degree escalates up to 2d+2 before reporting failure.
    pub fn check_completeness(&self, d: usize) -> Result<CheckReport> {
        self.disc_p.ensure_complete(self.disc_p.completed_to().max(2 * d + 2))?;
        self.disc_q.ensure_complete(self.disc_q.completed_to().max(2 * d + 2))?;
        // Unknowns: coefficients over chart basis words of degree <= d.
        let words_p = self.disc_p.basis_upto(d)?;
        let words_q = self.disc_q.basis_upto(d)?;
        let unknowns: Vec<(usize, Word)> = words_p
            .iter()
            .map(|w| (0usize, w.clone()))
            .chain(words_q.iter().map(|w| (1usize, w.clone())))
            .collect();
        // Constraint rows: boundary coordinates of chart p minus chart q.
        let mut boundary_index: BTreeMap<i64, usize> = BTreeMap::new();
        let mut cols: Vec<BTreeMap<usize, Scalar>> = Vec::new();
        for (side, w) in &unknowns {
            let pres = if *side == 0 { &self.disc_p } else { &self.disc_q };
            let f = NCPoly::from_word(&pres.alphabet, w.clone());
            let mut col = BTreeMap::new();
            for (m, c) in self.boundary_laurent(*side, &f)?.terms() {
                let next = boundary_index.len();
                let i = *boundary_index.entry(m).or_insert(next);
                let signed = if *side == 0 { c.clone() } else { -c };
                col.insert(i, signed);
            }
            cols.push(col);
        }
        let nrows = boundary_index.len();
        let mut rows = vec![vec![Scalar::zero(); unknowns.len()]; nrows];
        for (j, col) in cols.iter().enumerate() {
            for (i, c) in col {
                rows[*i][j] = c.clone();
            }
        }
        let compatible = nullspace(&rows, unknowns.len());

        // Spanning side: images of base basis words, escalating the degree.
        let mut index = CoordIndex::default();
        let unknown_vec = |coeffs: &[Scalar], index: &mut CoordIndex| {
            let mut v = SparseVec::new();
            for ((side, w), c) in unknowns.iter().zip(coeffs) {
                if !c.is_zero() {
                    v.insert(index.get(Coord::Chart(*side, w.clone(), 0)), c.clone());
                }
            }
            v
        };
        let mut ech = Echelon::new();
        let mut spanned_to = 0;
        for dd in d..=2 * d + 2 {
            self.sphere.ensure_complete(dd.max(self.sphere.completed_to()))?;
            for w in self.sphere.basis_upto(dd)? {
                if w.degree() < spanned_to {
                    continue;
                }
                let b = NCPoly::from_word(&self.sphere.alphabet, w);
                let mut v = SparseVec::new();
                for (side, (pres, map)) in
                    [(&self.disc_p, &self.pi_p), (&self.disc_q, &self.pi_q)]
                        .iter()
                        .enumerate()
                {
                    let img = pres.nf_extending(&map.apply(&b)?)?;
                    for (wq, c) in img.terms() {
                        v.insert(index.get(Coord::Chart(side, wq.clone(), 0)), c.clone());
                    }
                }
                ech.insert(v);
            }
            spanned_to = dd + 1;
            let missing = compatible
                .iter()
                .find(|coeffs| !ech.contains(unknown_vec(coeffs, &mut index)));
            if missing.is_none() {
                return Ok(CheckReport::pass("completeness", "sphere", Some(d)));
            }
        }
        let coeffs = compatible
            .iter()
            .find(|coeffs| !ech.contains(unknown_vec(coeffs, &mut index)))
            .expect("a missing tuple exists on failure");
        let mut desc = Vec::new();
        for ((side, w), c) in unknowns.iter().zip(coeffs) {
            if !c.is_zero() {
                let pres = if *side == 0 { &self.disc_p } else { &self.disc_q };
                desc.push(format!(
                    "chart {}: ({}) {}",
                    side,
                    c,
                    word_to_text(w, &pres.alphabet)
                ));
            }
        }
        Ok(CheckReport::fail(
            "completeness",
            "sphere",
            Some(d),
            desc.join(" + "),
        ))
    }

    /// Transition-function sanity: unit on the diagonal, antipode symmetry,
    /// central values, and the (vacuous, two-chart) triple condition.
    pub fn check_cocycle(&self, max_winding: i64) -> Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        for n in -max_winding..=max_winding {
            // tau_ii = unit . counit.
            let diag_ok = Laurent::u(n).counit() == crate::scalar::int(1);
            out.push(if diag_ok {
                CheckReport::pass("cocycle-diagonal", &format!("u^{n}"), None)
            } else {
                CheckReport::fail("cocycle-diagonal", &format!("u^{n}"), None, "counit".into())
            });
            // tau_21 = tau_12 . antipode.
            let sym_ok = self.tau_21(n) == self.tau(-n);
            out.push(if sym_ok {
                CheckReport::pass("cocycle-antipode", &format!("u^{n}"), None)
            } else {
                CheckReport::fail(
                    "cocycle-antipode",
                    &format!("u^{n}"),
                    None,
                    format!("tau_21(u^{n}) != tau(u^-{n})"),
                )
            });
            // Centrality of the image in the boundary algebra.
            let img = laurent_to_circle(&self.circle, &self.tau(n))?;
            let mut central = true;
            for l in self.circle.alphabet.letters() {
                let g = NCPoly::letter(&self.circle.alphabet, l);
                let comm = self
                    .circle
                    .nf_extending(&img.checked_mul(&g)?.checked_sub(&g.checked_mul(&img)?)?)?;
                central &= comm.is_zero();
            }
            out.push(if central {
                CheckReport::pass("cocycle-central", &format!("u^{n}"), None)
            } else {
                CheckReport::fail("cocycle-central", &format!("u^{n}"), None, img.to_text())
            });
        }
        out.push(CheckReport::pass("cocycle-triple", "two charts: vacuous", None));
        Ok(out)
    }

    /// Condition (a): chi_i . iota = pi_i (x) 1 on every base generator.
    pub fn check_trivialization_base(&self) -> Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        for side in 0..2 {
            let (pres, pi, _, chi) = self.chart(side);
            for l in self.sphere.alphabet.letters() {
                let gen = NCPoly::letter(&self.sphere.alphabet, l);
                let via_total = chi.apply(&self.iota.apply(&gen)?)?.nf(pres)?;
                let direct = PTensorH::simple(&pres.nf_extending(&pi.apply(&gen)?)?, 0);
                let name = format!("{} on {}", chi.name, self.sphere.alphabet.name(l));
                out.push(if via_total == direct {
                    CheckReport::pass("trivialization-a", &name, None)
                } else {
                    CheckReport::fail(
                        "trivialization-a",
                        &name,
                        None,
                        format!("{} != {}", via_total.to_text(), direct.to_text()),
                    )
                });
            }
        }
        Ok(out)
    }

    /// Condition (b): right colinearity, (chi (x) id).coaction =
    /// (id (x) coproduct).chi, checked on the given elements by comparing
    /// full (word, winding, winding) coordinate maps.
    pub fn check_trivialization_colinear(&self, elements: &[NCPoly]) -> Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        for side in 0..2 {
            let (pres, _, _, chi) = self.chart(side);
            for f in elements {
                let mut lhs: BTreeMap<(Word, i64, i64), Scalar> = BTreeMap::new();
                for (n, part) in coaction(&self.s3, f)?.parts() {
                    for (w, c) in chi.apply(part)?.nf(pres)?.parts().flat_map(|(m, g)| {
                        g.terms()
                            .map(move |(w, c)| ((w.clone(), m), c.clone()))
                            .collect::<Vec<_>>()
                    }) {
                        add_entry(&mut lhs, (w.0, w.1, n), c);
                    }
                }
                let mut rhs: BTreeMap<(Word, i64, i64), Scalar> = BTreeMap::new();
                for (m, g) in chi.apply(f)?.nf(pres)?.parts() {
                    for (w, c) in g.terms() {
                        add_entry(&mut rhs, (w.clone(), m, m), c.clone());
                    }
                }
                let name = format!("{} on {}", chi.name, f.to_text());
                out.push(if lhs == rhs {
                    CheckReport::pass("trivialization-b", &name, None)
                } else {
                    CheckReport::fail("trivialization-b", &name, None, "legs differ".into())
                });
            }
        }
        Ok(out)
    }

    /// Both trivializations must annihilate every total-space relation.
    pub fn check_trivialization_relations(&self) -> Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        for side in 0..2 {
            let (pres, _, _, chi) = self.chart(side);
            for rel in &self.s3.relations {
                let img = chi.apply(rel)?.nf(pres)?;
                out.push(if img.is_zero() {
                    CheckReport::pass("trivialization-relation", &chi.name, None)
                } else {
                    CheckReport::fail(
                        "trivialization-relation",
                        &chi.name,
                        None,
                        format!("{} -> {}", rel.to_text(), img.to_text()),
                    )
                });
            }
        }
        Ok(out)
    }

    /// Completeness of the covering of the total space by {ker chi_p,
    /// ker chi_q} at degree d: every twist-compatible pair of chart tensors
    /// of filtration degree <= d lies in the span of embedded total-space
    /// words (escalating the word degree up to 2d+2).
    pub fn check_total_completeness(&self, d: usize) -> Result<CheckReport> {
        self.disc_p.ensure_complete(self.disc_p.completed_to().max(2 * d + 2))?;
        self.disc_q.ensure_complete(self.disc_q.completed_to().max(2 * d + 2))?;
        // Unknowns: (side, disc word, H winding) with deg + |winding| <= d.
        let mut unknowns: Vec<(usize, Word, i64)> = Vec::new();
        for (side, pres) in [(0usize, &self.disc_p), (1, &self.disc_q)] {
            for w in pres.basis_upto(d)? {
                let room = (d - w.degree()) as i64;
                for n in -room..=room {
                    unknowns.push((side, w.clone(), n));
                }
            }
        }
        // Constraints: twisted boundary agreement per (m, n).
        let mut bindex: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        let mut cols = Vec::with_capacity(unknowns.len());
        for (side, w, n) in &unknowns {
            let pres = if *side == 0 { &self.disc_p } else { &self.disc_q };
            let t = PTensorH::simple(&NCPoly::from_word(&pres.alphabet, w.clone()), *n);
            let mut col = BTreeMap::new();
            for ((m, nn), c) in self.boundary_coords(*side, &t)? {
                let next = bindex.len();
                let i = *bindex.entry((m, nn)).or_insert(next);
                let signed = if *side == 0 { c } else { -c };
                col.insert(i, signed);
            }
            cols.push(col);
        }
        let mut rows = vec![vec![Scalar::zero(); unknowns.len()]; bindex.len()];
        for (j, col) in cols.iter().enumerate() {
            for (i, c) in col {
                rows[*i][j] = c.clone();
            }
        }
        let compatible = nullspace(&rows, unknowns.len());

        let mut index = CoordIndex::default();
        let unknown_vec = |coeffs: &[Scalar], index: &mut CoordIndex| {
            let mut v = SparseVec::new();
            for ((side, w, n), c) in unknowns.iter().zip(coeffs) {
                if !c.is_zero() {
                    v.insert(index.get(Coord::Chart(*side, w.clone(), *n)), c.clone());
                }
            }
            v
        };
        let mut ech = Echelon::new();
        let mut spanned_to = 0;
        for dd in d..=2 * d + 2 {
            self.s3.ensure_complete(dd.max(self.s3.completed_to()))?;
            for w in self.s3.basis_upto(dd)? {
                if w.degree() < spanned_to {
                    continue;
                }
                let g =
                    self.pair_embedding(&NCPoly::from_word(&self.s3.alphabet, w))?;
                ech.insert(self.glued_vec(&g, &mut index));
            }
            spanned_to = dd + 1;
            if compatible
                .iter()
                .all(|coeffs| ech.contains(unknown_vec(coeffs, &mut index)))
            {
                return Ok(CheckReport::pass("completeness", "total-space", Some(d)));
            }
        }
        Ok(CheckReport::fail(
            "completeness",
            "total-space",
            Some(d),
            "compatible tuple outside the embedded span".into(),
        ))
    }

    /// Runs the whole structural suite at the given degrees.
    pub fn verify_bundle(&self, d: usize) -> Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        out.extend(self.check_quotient_relations()?);
        out.push(self.check_covering(d)?);
        out.push(self.check_completeness(d.min(4))?);
        out.extend(self.check_cocycle(3)?);
        out.extend(self.check_trivialization_base()?);
        let gens: Vec<NCPoly> = self
            .s3
            .alphabet
            .letters()
            .map(|l| NCPoly::letter(&self.s3.alphabet, l))
            .collect();
        out.extend(self.check_trivialization_colinear(&gens)?);
        out.extend(self.check_trivialization_relations()?);
        out.push(self.check_total_completeness(3)?);
        let (rank, count) = self.rank_of_image(d.min(6))?;
        out.push(if rank == count {
            CheckReport::pass("embedding-rank", "s3", Some(d.min(6)))
        } else {
            CheckReport::fail(
                "embedding-rank",
                "s3",
                Some(d.min(6)),
                format!("rank {rank} != dim {count}"),
            )
        });
        Ok(out)
    }
}

fn add_entry<K: Ord>(map: &mut BTreeMap<K, Scalar>, k: K, c: Scalar) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(k) {
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

/// A Laurent element as a polynomial in the circle presentation.
pub fn laurent_to_circle(circle: &Presentation, h: &Laurent) -> Result<NCPoly> {
    let u = circle
        .alphabet
        .lookup("u")
        .ok_or_else(|| Error::InvalidParam("circle generator not named u".into()))?;
    let ustar = circle.alphabet.star(u);
    let mut out = NCPoly::zero(&circle.alphabet);
    for (n, c) in h.terms() {
        let letter = if n >= 0 { u } else { ustar };
        let w = Word(std::iter::repeat(letter.0).take(n.unsigned_abs() as usize).collect());
        out.add_term(w, c.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> &'static HopfFibration {
        static FIB: std::sync::OnceLock<HopfFibration> = std::sync::OnceLock::new();
        FIB.get_or_init(|| {
            let f = HopfFibration::new(&AlgebraParams::default()).unwrap();
            f.s3.ensure_complete(8).unwrap();
            f.sphere.ensure_complete(8).unwrap();
            f
        })
    }

    #[test]
    fn quotients_kill_base_relations() {
        let reports = fib().check_quotient_relations().unwrap();
        assert!(crate::report::all_passed(&reports));
    }

    #[test]
    fn embedding_on_generators() {
        let f = fib();
        let a = f.s3.parse("a").unwrap();
        let g = f.pair_embedding(&a).unwrap();
        assert_eq!(g.p, PTensorH::simple(&NCPoly::one(&f.disc_p.alphabet), 1));
        assert_eq!(g.q, PTensorH::simple(&f.disc_q.parse("y").unwrap(), 1));
        assert!(f.is_compatible(&g).unwrap());
        let b = f.s3.parse("b").unwrap();
        let g = f.pair_embedding(&b).unwrap();
        assert_eq!(g.p, PTensorH::simple(&f.disc_p.parse("x").unwrap(), -1));
        assert_eq!(g.q, PTensorH::simple(&NCPoly::one(&f.disc_q.alphabet), -1));
        assert!(f.is_compatible(&g).unwrap());
    }

    #[test]
    fn relations_embed_to_zero() {
        let f = fib();
        for rel in &f.s3.relations {
            let g = f.pair_embedding(rel).unwrap();
            assert!(g.is_zero(), "{} embeds to {:?}", rel.to_text(), g);
        }
    }

    #[test]
    fn incompatible_tuple_detected() {
        let f = fib();
        let g = GluedElement {
            p: PTensorH::simple(&NCPoly::one(&f.disc_p.alphabet), 1),
            q: PTensorH::zero(&f.disc_q.alphabet),
        };
        assert!(!f.is_compatible(&g).unwrap());
    }

    #[test]
    fn rank_matches_basis_small_degrees() {
        let f = fib();
        let (rank, count) = f.rank_of_image(1).unwrap();
        assert_eq!((rank, count), (5, 5));
        let (rank, count) = f.rank_of_image(3).unwrap();
        assert_eq!(rank, count);
        assert_eq!(count, 35);
    }

    #[test]
    fn covering_passes_and_duplicate_fails() {
        let f = fib();
        assert!(f.check_covering(4).unwrap().passed());
        // The duplicated chart p covering has ker pi_p in the intersection.
        let dup = HopfFibration::check_covering_maps(
            &f.sphere,
            &[(&f.disc_p, &f.pi_p), (&f.disc_p, &f.pi_p)],
            2,
            "duplicate",
        )
        .unwrap();
        assert!(!dup.passed());
        let witness = dup.witness.unwrap();
        let elem = f.sphere.parse(&witness).unwrap();
        let img = f.disc_p.nf_extending(&f.pi_p.apply(&elem).unwrap()).unwrap();
        assert!(img.is_zero(), "witness {witness} not in ker pi_p");
        assert!(!f.sphere.nf(&elem).unwrap().is_zero());
    }

    #[test]
    fn identity_covering_is_trivially_exact() {
        let f = fib();
        let id_images: Vec<NCPoly> = f
            .sphere
            .alphabet
            .letters()
            .map(|l| NCPoly::letter(&f.sphere.alphabet, l))
            .collect();
        let id = PolyMap::new("id", &f.sphere, id_images).unwrap();
        let rep = HopfFibration::check_covering_maps(
            &f.sphere,
            &[(&f.sphere, &id)],
            3,
            "identity",
        )
        .unwrap();
        assert!(rep.passed());
    }

    #[test]
    fn base_completeness() {
        assert!(fib().check_completeness(4).unwrap().passed());
    }

    #[test]
    fn cocycle_checks() {
        let reports = fib().check_cocycle(3).unwrap();
        assert!(crate::report::all_passed(&reports));
    }

    #[test]
    fn trivialization_conditions() {
        let f = fib();
        assert!(crate::report::all_passed(
            &f.check_trivialization_base().unwrap()
        ));
        let gens: Vec<NCPoly> = f
            .s3
            .alphabet
            .letters()
            .map(|l| NCPoly::letter(&f.s3.alphabet, l))
            .collect();
        assert!(crate::report::all_passed(
            &f.check_trivialization_colinear(&gens).unwrap()
        ));
        assert!(crate::report::all_passed(
            &f.check_trivialization_relations().unwrap()
        ));
    }

    #[test]
    fn total_space_completeness_degree_three() {
        assert!(fib().check_total_completeness(3).unwrap().passed());
    }

    #[test]
    fn glued_arithmetic_commutes_with_embedding() {
        let f = fib();
        for (s, t) in [("a b*", "a* + b"), ("a a*", "b b* - 1/2 a")] {
            let x = f.s3.nf(&f.s3.parse(s).unwrap()).unwrap();
            let y = f.s3.nf(&f.s3.parse(t).unwrap()).unwrap();
            let lhs = f
                .pair_embedding(&f.s3.nf(&x.checked_mul(&y).unwrap()).unwrap())
                .unwrap();
            let rhs = f
                .pair_embedding(&x)
                .unwrap()
                .checked_mul(&f.pair_embedding(&y).unwrap())
                .unwrap();
            let rhs = GluedElement {
                p: rhs.p.nf(&f.disc_p).unwrap(),
                q: rhs.q.nf(&f.disc_q).unwrap(),
            };
            assert_eq!(lhs, rhs);
            // Star also commutes.
            assert_eq!(
                f.pair_embedding(&f.s3.nf(&x.star()).unwrap()).unwrap(),
                GluedElement {
                    p: f.pair_embedding(&x).unwrap().star().p.nf(&f.disc_p).unwrap(),
                    q: f.pair_embedding(&x).unwrap().star().q.nf(&f.disc_q).unwrap(),
                }
            );
        }
    }

    #[test]
    fn base_embedding_is_compatible_and_coinvariant() {
        let f = fib();
        let b = f.sphere.parse("f_0 + 2 f_1 f_1*").unwrap();
        let g = f.base_embedding(&b).unwrap();
        assert!(f.is_compatible(&g).unwrap());
        assert_eq!(g.coaction_windings(), vec![0]);
        // Agrees with embedding the iota image.
        let total = f.iota.apply(&b).unwrap();
        assert_eq!(f.pair_embedding(&total).unwrap(), g);
    }
}
