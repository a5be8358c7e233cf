//! Finite truncations of the Hilbert-space representations, the trace
//! functional built from the two inequivalent shift families, and the
//! numeric winding-number pairing.
//!
//! The basic building block is the one-sided weighted shift
//! `S_r e_k = sqrt(1 - r^{k+1}) e_{k+1}` for `0 <= k <= N-2`, truncated to
//! an `N`-dimensional space. The representation families are:
//!
//! * `s3-onedim(alpha, beta)`: `a = e^{i alpha}`, `b = e^{i beta}` (both
//!   scalars);
//! * `s3-shift-b(lambda)`: `a = lambda I`, `b = S_p` with `|lambda| = 1`;
//! * `s3-shift-a(mu)`: `b = mu I`, `a = S_q` with `|mu| = 1`;
//! * `disc-shift`: `x = S_r` with `r` the disc deformation parameter;
//! * `disc-point(theta)`: `x = e^{i theta}`;
//! * `sphere-rep-1` / `sphere-rep-2`: the base algebra represented through
//!   its embedding `f_0 -> b b*`, `f_1 -> b a`, composed with the two
//!   shift families.
//!
//! The trace functional is `tau = Tr(rho_shift-b - rho_shift-a)`, defined
//! on coinvariant (winding-zero) elements, where the diagonal of the
//! difference decays geometrically. With this orientation the pairing of
//! `tau` with the winding-`n` projector equals `+n`.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::galois::ProjectorMatrix;
use crate::ncpoly::{Alphabet, NCPoly};
use crate::rewrite::{presets, Presentation};
use crate::scalar::{AlgebraParams, Scalar};
use crate::{Error, Result};

/// Converts an exact coefficient to `f64` (exact ratios of big integers
/// convert with one rounding).
pub fn scalar_to_f64(c: &Scalar) -> f64 {
    c.to_f64().expect("rational fits in f64 range")
}

/// The truncated one-sided weighted shift `S_r` on `C^dim`:
/// `S_r e_k = sqrt(1 - r^{k+1}) e_{k+1}`.
pub fn weighted_shift(dim: usize, r: f64) -> Array2<Complex64> {
    let mut m = Array2::zeros((dim, dim));
    for k in 0..dim.saturating_sub(1) {
        let w = (1.0 - r.powi(k as i32 + 1)).sqrt();
        m[[k + 1, k]] = Complex64::new(w, 0.0);
    }
    m
}

/// Conjugate transpose.
pub fn adjoint(a: &Array2<Complex64>) -> Array2<Complex64> {
    a.t().mapv(|z| z.conj())
}

/// Upper bound for the operator norm: `sqrt(|A|_1 * |A|_inf)` (maximum
/// absolute column sum times maximum absolute row sum).
pub fn norm_bound(a: &Array2<Complex64>) -> f64 {
    let (rows, cols) = a.dim();
    let mut col_sum = vec![0.0f64; cols];
    let mut row_sum = vec![0.0f64; rows];
    for i in 0..rows {
        for j in 0..cols {
            let v = a[[i, j]].norm();
            row_sum[i] += v;
            col_sum[j] += v;
        }
    }
    let c = col_sum.iter().cloned().fold(0.0, f64::max);
    let r = row_sum.iter().cloned().fold(0.0, f64::max);
    (c * r).sqrt()
}

/// A finite-dimensional *-representation: one matrix per letter, with
/// starred letters carrying the adjoint matrices.
#[derive(Debug, Clone)]
pub struct TruncatedRep {
    pub family: String,
    pub dim: usize,
    alph: Arc<Alphabet>,
    images: Vec<Array2<Complex64>>,
}

impl TruncatedRep {
    /// Builds a representation from images of the unstarred letters; the
    /// starred partners are filled in as adjoints.
    pub fn from_base(
        family: &str,
        alph: &Arc<Alphabet>,
        base: &[(&str, Array2<Complex64>)],
        dim: usize,
    ) -> Result<TruncatedRep> {
        let mut images: Vec<Option<Array2<Complex64>>> = vec![None; alph.len()];
        for (name, m) in base {
            let l = alph
                .lookup(name)
                .ok_or_else(|| Error::UnknownFamily(format!("no letter {name:?}")))?;
            if m.dim() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "image of {name} is {:?}, expected ({dim}, {dim})",
                    m.dim()
                )));
            }
            images[alph.star(l).0 as usize] = Some(adjoint(m));
            images[l.0 as usize] = Some(m.clone());
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                m.ok_or_else(|| {
                    Error::UnknownFamily(format!(
                        "letter {:?} has no assigned image",
                        alph.name(crate::ncpoly::Letter(i as u8))
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TruncatedRep {
            family: family.to_string(),
            dim,
            alph: Arc::clone(alph),
            images,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alph
    }

    pub fn image(&self, l: crate::ncpoly::Letter) -> &Array2<Complex64> {
        &self.images[l.0 as usize]
    }

    /// Evaluates a polynomial: words map to matrix products, coefficients
    /// to complex scalars.
    pub fn evaluate(&self, f: &NCPoly) -> Result<Array2<Complex64>> {
        if !Arc::ptr_eq(f.alphabet(), &self.alph) && f.alphabet().len() != self.alph.len() {
            return Err(Error::AlphabetMismatch(
                self.family.clone(),
                "polynomial over a different alphabet".to_string(),
            ));
        }
        let mut acc: Array2<Complex64> = Array2::zeros((self.dim, self.dim));
        for (w, c) in f.terms() {
            let mut m = Array2::eye(self.dim);
            for l in w.letters() {
                m = m.dot(&self.images[l.0 as usize]);
            }
            let cf = Complex64::new(scalar_to_f64(c), 0.0);
            acc = acc + m.mapv(|z| z * cf);
        }
        Ok(acc)
    }

    /// Norm bounds of all letter images, keyed by letter name.
    pub fn generator_norms(&self) -> Vec<(String, f64)> {
        self.alph
            .letters()
            .map(|l| (self.alph.name(l).to_string(), norm_bound(&self.images[l.0 as usize])))
            .collect()
    }

    /// Largest residual `max_{k < window} |(rho(lhs) - rho(rhs)) e_k|`
    /// over the defining relations of `pres`. The window must stay clear
    /// of the truncation edge: `window + deg <= dim` per relation.
    /// Scalar (1x1) representations are exact homomorphic images with no
    /// truncation, so the clearance requirement does not apply and the
    /// window clamps to 1.
    pub fn relation_residual(&self, pres: &Presentation, window: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for rel in &pres.relations {
            let d = rel.degree().unwrap_or(0);
            if self.dim > 1 && window + d > self.dim {
                return Err(Error::WindowTooLarge(format!(
                    "window {window} + relation degree {d} exceeds dimension {}",
                    self.dim
                )));
            }
            let a = self.evaluate(rel)?;
            for k in 0..window.min(self.dim) {
                let col_norm: f64 = (0..self.dim).map(|i| a[[i, k]].norm_sqr()).sum::<f64>().sqrt();
                worst = worst.max(col_norm);
            }
        }
        Ok(worst)
    }

    /// Transports this representation along an algebra map into its
    /// domain: each letter of `source` is sent to the evaluated image of
    /// its polynomial under `map`.
    pub fn pull_back(
        &self,
        family: &str,
        source: &Presentation,
        map: &crate::bundle::PolyMap,
    ) -> Result<TruncatedRep> {
        let images = source
            .alphabet
            .letters()
            .map(|l| self.evaluate(map.image_of(l)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TruncatedRep {
            family: family.to_string(),
            dim: self.dim,
            alph: Arc::clone(&source.alphabet),
            images,
        })
    }
}

/// One-dimensional representation of the total algebra:
/// `a = e^{i alpha}`, `b = e^{i beta}`.
pub fn s3_onedim(pres: &Presentation, alpha: f64, beta: f64) -> Result<TruncatedRep> {
    let sc = |t: f64| Array2::from_elem((1, 1), Complex64::from_polar(1.0, t));
    TruncatedRep::from_base(
        "s3-onedim",
        &pres.alphabet,
        &[("a", sc(alpha)), ("b", sc(beta))],
        1,
    )
}

/// Shift family with `a = lambda I` (`lambda = e^{i lambda_phase}`) and
/// `b = S_p`.
pub fn s3_shift_b(pres: &Presentation, lambda_phase: f64, dim: usize) -> Result<TruncatedRep> {
    let p = scalar_to_f64(&pres.param("p")?);
    let lambda = Complex64::from_polar(1.0, lambda_phase);
    let a = Array2::eye(dim).mapv(|z: Complex64| z * lambda);
    TruncatedRep::from_base(
        "s3-shift-b",
        &pres.alphabet,
        &[("a", a), ("b", weighted_shift(dim, p))],
        dim,
    )
}

/// Shift family with `b = mu I` (`mu = e^{i mu_phase}`) and `a = S_q`.
pub fn s3_shift_a(pres: &Presentation, mu_phase: f64, dim: usize) -> Result<TruncatedRep> {
    let q = scalar_to_f64(&pres.param("q")?);
    let mu = Complex64::from_polar(1.0, mu_phase);
    let b = Array2::eye(dim).mapv(|z: Complex64| z * mu);
    TruncatedRep::from_base(
        "s3-shift-a",
        &pres.alphabet,
        &[("a", weighted_shift(dim, q)), ("b", b)],
        dim,
    )
}

/// Shift representation of the disc: `x = S_r` with `r` the disc's own
/// deformation parameter.
pub fn disc_shift(pres: &Presentation, dim: usize) -> Result<TruncatedRep> {
    let r = scalar_to_f64(&pres.param("q")?);
    let x = pres.alphabet.name(crate::ncpoly::Letter(0)).to_string();
    TruncatedRep::from_base(
        "disc-shift",
        &pres.alphabet,
        &[(x.as_str(), weighted_shift(dim, r))],
        dim,
    )
}

/// Classical boundary point of the disc: `x = e^{i theta}`.
pub fn disc_point(pres: &Presentation, theta: f64) -> Result<TruncatedRep> {
    let x = pres.alphabet.name(crate::ncpoly::Letter(0)).to_string();
    let m = Array2::from_elem((1, 1), Complex64::from_polar(1.0, theta));
    TruncatedRep::from_base("disc-point", &pres.alphabet, &[(x.as_str(), m)], 1)
}

/// Images of the base generators inside the total algebra
/// (`f_0 -> b b*`, `f_1 -> b a`, `f_1* -> a* b*`), used to push total
/// algebra representations down to the base.
pub fn base_embedding_map(sphere: &Presentation, s3: &Presentation) -> Result<crate::bundle::PolyMap> {
    crate::bundle::PolyMap::new(
        "base-embedding",
        sphere,
        vec![s3.parse("b b*")?, s3.parse("b a")?, s3.parse("a* b*")?],
    )
}

/// A named representation family together with the presentation whose
/// relations it is checked against.
pub struct FamilyRep {
    pub pres: Presentation,
    pub rep: TruncatedRep,
}

/// The family names accepted by [`build_family`].
pub const FAMILY_NAMES: &[&str] = &[
    "s3-onedim",
    "s3-shift-b",
    "s3-shift-a",
    "disc-shift",
    "disc-point",
    "sphere-rep-1",
    "sphere-rep-2",
];

/// Builds a representation by family name. `phases` supplies the family's
/// phase parameters in order (missing entries default to 0).
pub fn build_family(
    name: &str,
    params: &AlgebraParams,
    dim: usize,
    phases: &[f64],
) -> Result<FamilyRep> {
    let ph = |i: usize| phases.get(i).copied().unwrap_or(0.0);
    match name {
        "s3-onedim" => {
            let pres = presets::s3(params)?;
            let rep = s3_onedim(&pres, ph(0), ph(1))?;
            Ok(FamilyRep { pres, rep })
        }
        "s3-shift-b" => {
            let pres = presets::s3(params)?;
            let rep = s3_shift_b(&pres, ph(0), dim)?;
            Ok(FamilyRep { pres, rep })
        }
        "s3-shift-a" => {
            let pres = presets::s3(params)?;
            let rep = s3_shift_a(&pres, ph(0), dim)?;
            Ok(FamilyRep { pres, rep })
        }
        "disc-shift" => {
            let pres = presets::disc(params.q.clone())?;
            let rep = disc_shift(&pres, dim)?;
            Ok(FamilyRep { pres, rep })
        }
        "disc-point" => {
            let pres = presets::disc(params.q.clone())?;
            let rep = disc_point(&pres, ph(0))?;
            Ok(FamilyRep { pres, rep })
        }
        "sphere-rep-1" | "sphere-rep-2" => {
            let s3 = presets::s3(params)?;
            let sphere = presets::sphere(params)?;
            let total_rep = if name == "sphere-rep-1" {
                s3_shift_b(&s3, ph(0), dim)?
            } else {
                s3_shift_a(&s3, ph(0), dim)?
            };
            let map = base_embedding_map(&sphere, &s3)?;
            let rep = total_rep.pull_back(name, &sphere, &map)?;
            Ok(FamilyRep { pres: sphere, rep })
        }
        other => Err(Error::UnknownFamily(other.to_string())),
    }
}

/// The value of the trace functional on one element, with a rigorous
/// bound on the discarded tail of the diagonal sum.
#[derive(Debug, Clone, Copy)]
pub struct TraceValue {
    pub value: Complex64,
    pub tail: f64,
}

/// The trace functional `tau = Tr(rho_shift-b - rho_shift-a)` on
/// coinvariant elements of the total algebra, truncated to `window`
/// diagonal entries of `dim`-dimensional matrices.
pub struct TraceFunctional {
    pub dim: usize,
    pub window: usize,
    s3: Arc<Alphabet>,
    grading: Vec<i64>,
    rep_b: TruncatedRep,
    rep_a: TruncatedRep,
    decay: f64,
}

impl TraceFunctional {
    pub fn new(
        pres: &Presentation,
        dim: usize,
        window: usize,
        lambda_phase: f64,
        mu_phase: f64,
    ) -> Result<TraceFunctional> {
        let grading = pres
            .grading
            .clone()
            .ok_or_else(|| Error::UngradedLetter(format!("{} is ungraded", pres.name)))?;
        let p = scalar_to_f64(&pres.param("p")?);
        let q = scalar_to_f64(&pres.param("q")?);
        Ok(TraceFunctional {
            dim,
            window,
            s3: Arc::clone(&pres.alphabet),
            grading,
            rep_b: s3_shift_b(pres, lambda_phase, dim)?,
            rep_a: s3_shift_a(pres, mu_phase, dim)?,
            decay: p.max(q),
        })
    }

    /// Evaluates `tau(f)`. Every term must have winding 0; otherwise the
    /// diagonal difference does not decay and the functional is
    /// undefined.
    pub fn eval(&self, f: &NCPoly) -> Result<TraceValue> {
        let mut max_deg = 0usize;
        for (w, _) in f.terms() {
            let winding: i64 = w.letters().map(|l| self.grading[l.0 as usize]).sum();
            if winding != 0 {
                return Err(Error::NotCoinvariant(crate::ncpoly::word_to_text(w, &self.s3)));
            }
            max_deg = max_deg.max(w.degree());
        }
        if self.window + max_deg > self.dim {
            return Err(Error::WindowTooLarge(format!(
                "window {} + degree {max_deg} exceeds dimension {}",
                self.window, self.dim
            )));
        }
        let diff = self.rep_b.evaluate(f)? - self.rep_a.evaluate(f)?;
        let mut value = Complex64::new(0.0, 0.0);
        for k in 0..self.window {
            value += diff[[k, k]];
        }
        // Tail bound: for a winding-zero word of degree d, the k-th
        // diagonal entry of the difference is a difference of two
        // products of at most d factors sqrt(1 - r^j) with j >= k-d+1,
        // so it is bounded by 2 d r^{k-d+1}; summing the geometric tail
        // from k = window gives the constant below. Degree-0 terms
        // contribute exactly zero (identity minus identity).
        let r = self.decay;
        let mut tail = 0.0f64;
        for (w, c) in f.terms() {
            let d = w.degree();
            if d == 0 {
                continue;
            }
            let cf = scalar_to_f64(c).abs();
            tail += cf * 2.0 * d as f64 * r.powi(self.window as i32 - d as i32 + 1) / (1.0 - r);
        }
        Ok(TraceValue { value, tail })
    }
}

/// Numeric pairing of the trace functional with a projector matrix.
#[derive(Debug, Clone, Serialize)]
pub struct PairingReport {
    pub winding: i64,
    pub dim: usize,
    pub window: usize,
    pub value_re: f64,
    pub value_im: f64,
    pub tail_bound: f64,
    pub nearest_int: i64,
    pub distance: f64,
}

/// Pairs the trace functional with the matrix trace of a projector. With
/// the fixed orientation the result is the projector's winding number.
pub fn chern_pairing(
    pres: &Presentation,
    e: &ProjectorMatrix,
    dim: usize,
    window: usize,
) -> Result<PairingReport> {
    chern_pairing_with_phases(pres, e, dim, window, 0.0, 0.0)
}

/// Same as [`chern_pairing`], with explicit representation phases (the
/// value is phase-independent; exposing them makes that testable).
pub fn chern_pairing_with_phases(
    pres: &Presentation,
    e: &ProjectorMatrix,
    dim: usize,
    window: usize,
    lambda_phase: f64,
    mu_phase: f64,
) -> Result<PairingReport> {
    let tr = e.trace(pres)?;
    let tau = TraceFunctional::new(pres, dim, window, lambda_phase, mu_phase)?;
    let v = tau.eval(&tr)?;
    let nearest = v.value.re.round();
    Ok(PairingReport {
        winding: e.winding,
        dim,
        window,
        value_re: v.value.re,
        value_im: v.value.im,
        tail_bound: v.tail,
        nearest_int: nearest as i64,
        distance: (v.value.re - nearest).abs(),
    })
}
