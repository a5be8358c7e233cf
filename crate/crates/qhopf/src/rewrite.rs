//! Oriented-relation rewriting with critical-pair completion.
//!
//! Rules rewrite a word (the lhs) to a polynomial in strictly smaller
//! monomials under the degree-lex order, so every reduction terminates.
//! Completion resolves overlap ambiguities up to a degree cap; on a
//! completed system, normal forms are canonical representatives and the
//! irreducible words of each degree enumerate a vector-space basis of the
//! presented algebra.

use std::collections::{BTreeMap, VecDeque};
use std::sync::{Arc, RwLock, RwLockReadGuard};

use num_traits::Zero;
use serde::Deserialize;

use crate::ncpoly::{word_to_text, Alphabet, NCPoly, Word};
use crate::parse::{parse_poly, parse_word};
use crate::scalar::{parse_scalar, Scalar};
use crate::{Error, Result};

/// Oriented rule `lhs -> rhs`; every monomial of `rhs` is strictly smaller
/// than `lhs` in the degree-lex order.
#[derive(Debug, Clone)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: NCPoly,
}

/// Prefix trie over rule left-hand sides, for fast leftmost matching.
#[derive(Debug, Clone, Default)]
struct LhsTrie {
    /// node -> child per letter (0 = none; indices are node+1).
    children: Vec<Vec<u32>>,
    /// node -> rule index + 1 (0 = none).
    rule: Vec<u32>,
}

impl LhsTrie {
    fn build(width: usize, rules: &[RewriteRule]) -> Self {
        let mut t = LhsTrie {
            children: vec![vec![0; width]],
            rule: vec![0],
        };
        for (i, r) in rules.iter().enumerate() {
            let mut node = 0usize;
            for l in r.lhs.letters() {
                let slot = l.0 as usize;
                if t.children[node][slot] == 0 {
                    t.children.push(vec![0; width]);
                    t.rule.push(0);
                    let new = (t.children.len() - 1) as u32;
                    t.children[node][slot] = new + 1;
                    node = new as usize;
                } else {
                    node = (t.children[node][slot] - 1) as usize;
                }
            }
            if t.rule[node] == 0 {
                t.rule[node] = (i + 1) as u32;
            }
        }
        t
    }

    /// Shortest rule lhs starting at `w[at..]`, if any.
    fn match_at(&self, w: &Word, at: usize) -> Option<(usize, usize)> {
        let mut node = 0usize;
        for (len, &l) in w.0[at..].iter().enumerate() {
            let next = self.children[node][l as usize];
            if next == 0 {
                return None;
            }
            node = (next - 1) as usize;
            if self.rule[node] != 0 {
                return Some(((self.rule[node] - 1) as usize, len + 1));
            }
        }
        None
    }
}

/// A resolved or unresolved overlap ambiguity between two rules.
#[derive(Debug, Clone)]
pub struct CriticalPair {
    pub overlap: Word,
    pub rules: (usize, usize),
    /// Normal form of the difference of the two one-step reductions;
    /// zero iff the ambiguity resolves.
    pub difference: NCPoly,
}

/// Statistics returned by completion.
#[derive(Debug, Clone, Default)]
pub struct CompletionStats {
    pub new_rules: usize,
    pub pairs_examined: usize,
}

#[derive(Debug)]
pub struct RewriteSystem {
    alphabet: Arc<Alphabet>,
    rules: Vec<RewriteRule>,
    trie: LhsTrie,
    /// All critical pairs of superposition degree <= this value reduce to 0.
    confluent_up_to: usize,
    /// Inputs above this degree are rejected by `normal_form`.
    degree_cap: usize,
}

pub const DEFAULT_DEGREE_CAP: usize = 8;

impl RewriteSystem {
    pub fn new(alphabet: Arc<Alphabet>) -> Self {
        let width = alphabet.len();
        RewriteSystem {
            alphabet,
            rules: Vec::new(),
            trie: LhsTrie::build(width, &[]),
            confluent_up_to: 0,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn confluent_up_to(&self) -> usize {
        self.confluent_up_to
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn set_degree_cap(&mut self, cap: usize) {
        self.degree_cap = self.degree_cap.max(cap);
    }

    /// Termination certificate: rejects a rule unless every rhs monomial is
    /// strictly smaller than the lhs.
    pub fn add_rule(&mut self, lhs: Word, rhs: NCPoly) -> Result<()> {
        for (w, _) in rhs.terms() {
            if w >= &lhs {
                return Err(Error::NotOriented(format!(
                    "{} -> {}",
                    word_to_text(&lhs, &self.alphabet),
                    rhs
                )));
            }
        }
        self.rules.push(RewriteRule { lhs, rhs });
        self.trie = LhsTrie::build(self.alphabet.len(), &self.rules);
        self.confluent_up_to = 0;
        Ok(())
    }

    /// Leftmost reducible position of `w`, with the matched rule.
    fn find_redex(&self, w: &Word) -> Option<(usize, usize, usize)> {
        (0..w.degree()).find_map(|at| {
            self.trie
                .match_at(w, at)
                .map(|(rule, len)| (at, rule, len))
        })
    }

    pub fn is_irreducible(&self, w: &Word) -> bool {
        self.find_redex(w).is_none()
    }

    /// One leftmost rewrite step applied to a word; `None` if irreducible.
    pub fn step_word(&self, w: &Word) -> Option<NCPoly> {
        let (at, rule, len) = self.find_redex(w)?;
        Some(self.splice(w, at, len, &self.rules[rule].rhs))
    }

    fn splice(&self, w: &Word, at: usize, len: usize, rhs: &NCPoly) -> NCPoly {
        let prefix = w.slice(0, at);
        let suffix = w.slice(at + len, w.degree());
        let mut out = NCPoly::zero(&self.alphabet);
        for (v, c) in rhs.terms() {
            out.add_term(prefix.concat(v).concat(&suffix), c.clone());
        }
        out
    }

    /// Full reduction to an irreducible representative. Terms are merged at
    /// every step, so coefficient cancellation happens as early as possible.
    pub fn normal_form(&self, f: &NCPoly) -> Result<NCPoly> {
        if let Some(d) = f.degree() {
            if d > self.degree_cap {
                return Err(Error::DegreeOverflow(d, self.degree_cap));
            }
        }
        let mut pending: BTreeMap<Word, Scalar> =
            f.terms().map(|(w, c)| (w.clone(), c.clone())).collect();
        let mut done = NCPoly::zero(&self.alphabet);
        // Reduce the largest pending monomial first: rewriting only produces
        // strictly smaller words, so each word is handled once.
        while let Some((w, c)) = pending.pop_last() {
            if c.is_zero() {
                continue;
            }
            match self.step_word(&w) {
                None => done.add_term(w, c),
                Some(replacement) => {
                    for (v, x) in replacement.terms() {
                        let entry = pending.entry(v.clone()).or_insert_with(Scalar::zero);
                        *entry += &c * x;
                        if entry.is_zero() {
                            pending.remove(v);
                        }
                    }
                }
            }
        }
        Ok(done)
    }

    /// All overlap and inclusion ambiguities with superposition degree
    /// <= `cap`, together with the normal form of their reduction
    /// difference.
    pub fn critical_pairs(&self, cap: usize) -> Result<Vec<CriticalPair>> {
        let mut out = Vec::new();
        for i in 0..self.rules.len() {
            for j in 0..self.rules.len() {
                out.extend(self.pair_ambiguities(i, j, cap)?);
            }
        }
        Ok(out)
    }

    fn pair_ambiguities(&self, i: usize, j: usize, cap: usize) -> Result<Vec<CriticalPair>> {
        let mut out = Vec::new();
        let li = &self.rules[i].lhs;
        let lj = &self.rules[j].lhs;
        // Overlap: a proper suffix of lhs_i equals a proper prefix of lhs_j.
        for o in 1..li.degree().min(lj.degree()) {
            if li.0[li.degree() - o..] == lj.0[..o] {
                let sup = li.concat(&lj.slice(o, lj.degree()));
                if sup.degree() > cap {
                    continue;
                }
                let via_i = self.splice(&sup, 0, li.degree(), &self.rules[i].rhs);
                let via_j =
                    self.splice(&sup, li.degree() - o, lj.degree(), &self.rules[j].rhs);
                let difference = self.normal_form(&via_i.checked_sub(&via_j)?)?;
                out.push(CriticalPair {
                    overlap: sup,
                    rules: (i, j),
                    difference,
                });
            }
        }
        // Inclusion: lhs_j occurs properly inside lhs_i.
        if i != j && lj.degree() < li.degree() && li.degree() <= cap {
            for at in 0..=li.degree() - lj.degree() {
                if li.0[at..at + lj.degree()] == lj.0[..] {
                    let via_i = self.splice(li, 0, li.degree(), &self.rules[i].rhs);
                    let via_j = self.splice(li, at, lj.degree(), &self.rules[j].rhs);
                    let difference = self.normal_form(&via_i.checked_sub(&via_j)?)?;
                    out.push(CriticalPair {
                        overlap: li.clone(),
                        rules: (i, j),
                        difference,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Knuth-Bendix style completion up to the given superposition degree.
    /// Completing an already-complete system adds no rules and returns it
    /// unchanged.
    pub fn complete(&mut self, cap: usize) -> Result<CompletionStats> {
        self.degree_cap = self.degree_cap.max(cap);
        let mut stats = CompletionStats::default();
        let mut queue: VecDeque<(usize, usize)> = (0..self.rules.len())
            .flat_map(|i| (0..self.rules.len()).map(move |j| (i, j)))
            .collect();
        while let Some((i, j)) = queue.pop_front() {
            stats.pairs_examined += 1;
            for cp in self.pair_ambiguities(i, j, cap)? {
                if cp.difference.is_zero() {
                    continue;
                }
                let (lead, coeff) = cp
                    .difference
                    .leading()
                    .map(|(w, c)| (w.clone(), c.clone()))
                    .expect("nonzero polynomial has a leading term");
                if lead.degree() == 0 {
                    return Err(Error::NotOriented(format!(
                        "critical pair on {} reduces to a nonzero constant",
                        word_to_text(&cp.overlap, &self.alphabet)
                    )));
                }
                let inv = Scalar::new(coeff.denom().clone(), coeff.numer().clone());
                let rest = cp
                    .difference
                    .checked_sub(&NCPoly::from_term(&self.alphabet, lead.clone(), coeff))?;
                let rhs = rest.neg().scale(&inv);
                self.add_rule(lead, rhs)?;
                stats.new_rules += 1;
                let new = self.rules.len() - 1;
                for k in 0..=new {
                    queue.push_back((k, new));
                    if k != new {
                        queue.push_back((new, k));
                    }
                }
            }
        }
        // Inter-reduce right-hand sides so the completed system is canonical.
        for i in 0..self.rules.len() {
            let rhs = self.normal_form(&self.rules[i].rhs)?;
            self.rules[i].rhs = rhs;
        }
        self.trie = LhsTrie::build(self.alphabet.len(), &self.rules);
        self.confluent_up_to = cap;
        Ok(stats)
    }

    /// Irreducible words of degree exactly `d`, in the monomial order.
    pub fn basis_words(&self, d: usize) -> Result<Vec<Word>> {
        if self.confluent_up_to < d {
            return Err(Error::NotCompleted(d));
        }
        let mut out = Vec::new();
        let mut stack = vec![Word::empty()];
        self.enumerate(&mut stack, d, &mut out);
        Ok(out)
    }

    fn enumerate(&self, stack: &mut Vec<Word>, d: usize, out: &mut Vec<Word>) {
        let w = stack.last().unwrap().clone();
        if w.degree() == d {
            out.push(w);
            return;
        }
        for l in self.alphabet.letters() {
            let mut v = w.clone();
            v.0.push(l.0);
            // Prune whenever a rule lhs ends at the new position.
            let reducible = (0..v.degree()).any(|at| {
                self.trie
                    .match_at(&v, at)
                    .map(|(_, len)| at + len == v.degree())
                    .unwrap_or(false)
            });
            if !reducible {
                stack.push(v);
                self.enumerate(stack, d, out);
                stack.pop();
            }
        }
    }

    /// Irreducible words of degree <= `d`, degree by degree.
    pub fn basis_words_upto(&self, d: usize) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        for k in 0..=d {
            out.extend(self.basis_words(k)?);
        }
        Ok(out)
    }
}

/// JSON document describing a presentation; see the bundled files under
/// `presentations/`.
#[derive(Debug, Deserialize)]
struct PresentationDoc {
    name: String,
    letters: Vec<String>,
    star_pairs: Vec<(String, String)>,
    #[serde(default)]
    order: Vec<String>,
    rules: Vec<RuleDoc>,
    #[serde(default)]
    params: BTreeMap<String, String>,
    #[serde(default)]
    grading: BTreeMap<String, i64>,
}

#[derive(Debug, Deserialize)]
struct RuleDoc {
    lhs: String,
    rhs: String,
}

/// A named algebra: alphabet, defining relations (as oriented rules),
/// parameter values, optional winding grading, and the rewrite system.
#[derive(Debug)]
pub struct Presentation {
    pub name: String,
    pub alphabet: Arc<Alphabet>,
    pub params: BTreeMap<String, Scalar>,
    /// Defining relations `lhs - rhs` of the original (pre-completion)
    /// rules.
    pub relations: Vec<NCPoly>,
    /// Winding degree per letter, when the algebra is graded.
    pub grading: Option<Vec<i64>>,
    system: RwLock<RewriteSystem>,
}

impl Presentation {
    /// Loads a presentation from its JSON document, overriding parameter
    /// values where `param_override` provides them.
    pub fn from_json(doc: &str, param_override: &BTreeMap<String, Scalar>) -> Result<Self> {
        let doc: PresentationDoc =
            serde_json::from_str(doc).map_err(|e| Error::InvalidParam(format!("bad presentation document: {e}")))?;
        let order = if doc.order.is_empty() {
            doc.letters.clone()
        } else {
            doc.order.clone()
        };
        let alphabet = Alphabet::new(&order, &doc.star_pairs)?;
        let mut params = BTreeMap::new();
        for (k, v) in &doc.params {
            params.insert(k.clone(), parse_scalar(v)?);
        }
        for (k, v) in param_override {
            params.insert(k.clone(), v.clone());
        }
        for v in params.values() {
            crate::scalar::check_unit_interval("parameter", v)?;
        }
        let mut system = RewriteSystem::new(Arc::clone(&alphabet));
        let mut relations = Vec::new();
        for rule in &doc.rules {
            let lhs = parse_word(&alphabet, &rule.lhs)?;
            let rhs = parse_poly(&alphabet, &params, &rule.rhs)?;
            relations.push(
                NCPoly::from_word(&alphabet, lhs.clone()).checked_sub(&rhs)?,
            );
            system.add_rule(lhs, rhs)?;
        }
        let grading = if doc.grading.is_empty() {
            None
        } else {
            let mut g = vec![0i64; alphabet.len()];
            for (name, deg) in &doc.grading {
                let l = alphabet
                    .lookup(name)
                    .ok_or_else(|| Error::UngradedLetter(name.clone()))?;
                g[l.0 as usize] = *deg;
                g[alphabet.star(l).0 as usize] = -*deg;
            }
            Some(g)
        };
        Ok(Presentation {
            name: doc.name,
            alphabet,
            params,
            relations,
            grading,
            system: RwLock::new(system),
        })
    }

    /// Same algebra with renamed letters (star structure and order are
    /// index-based and unchanged).
    pub fn with_renamed_letters(&self, names: &[&str]) -> Result<Self> {
        assert_eq!(names.len(), self.alphabet.len());
        let order: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let star_pairs: Vec<(String, String)> = self
            .alphabet
            .letters()
            .map(|l| {
                (
                    names[l.0 as usize].to_string(),
                    names[self.alphabet.star(l).0 as usize].to_string(),
                )
            })
            .collect();
        let alphabet = Alphabet::new(&order, &star_pairs)?;
        let remap = |f: &NCPoly| -> NCPoly {
            let mut out = NCPoly::zero(&alphabet);
            for (w, c) in f.terms() {
                out.add_term(w.clone(), c.clone());
            }
            out
        };
        let old = self.system.read().unwrap();
        let mut system = RewriteSystem::new(Arc::clone(&alphabet));
        system.set_degree_cap(old.degree_cap());
        for r in old.rules() {
            system.add_rule(r.lhs.clone(), remap(&r.rhs))?;
        }
        let relations = self.relations.iter().map(remap).collect();
        Ok(Presentation {
            name: self.name.clone(),
            alphabet,
            params: self.params.clone(),
            relations,
            grading: self.grading.clone(),
            system: RwLock::new(system),
        })
    }

    pub fn system(&self) -> RwLockReadGuard<'_, RewriteSystem> {
        self.system.read().unwrap()
    }

    pub fn nf(&self, f: &NCPoly) -> Result<NCPoly> {
        self.system.read().unwrap().normal_form(f)
    }

    /// Like [`nf`](Self::nf), but first raises the completion degree to
    /// cover the input, so large intermediate products reduce canonically.
    pub fn nf_extending(&self, f: &NCPoly) -> Result<NCPoly> {
        if let Some(d) = f.degree() {
            if d > self.completed_to() {
                self.ensure_complete(d)?;
            }
        }
        self.nf(f)
    }

    /// Raises the completion cap to at least `d` (no-op when already there).
    pub fn ensure_complete(&self, d: usize) -> Result<CompletionStats> {
        {
            let sys = self.system.read().unwrap();
            if sys.confluent_up_to() >= d {
                return Ok(CompletionStats::default());
            }
        }
        let mut sys = self.system.write().unwrap();
        if sys.confluent_up_to() >= d {
            return Ok(CompletionStats::default());
        }
        sys.complete(d)
    }

    /// Raises the degree cap for `nf` without completing.
    pub fn raise_degree_cap(&self, cap: usize) {
        self.system.write().unwrap().set_degree_cap(cap);
    }

    pub fn completed_to(&self) -> usize {
        self.system.read().unwrap().confluent_up_to()
    }

    pub fn basis(&self, d: usize) -> Result<Vec<Word>> {
        self.system.read().unwrap().basis_words(d)
    }

    pub fn basis_upto(&self, d: usize) -> Result<Vec<Word>> {
        self.system.read().unwrap().basis_words_upto(d)
    }

    pub fn parse(&self, input: &str) -> Result<NCPoly> {
        parse_poly(&self.alphabet, &self.params, input)
    }

    /// Winding degree of a word under the grading.
    pub fn winding(&self, w: &Word) -> Result<i64> {
        let g = self
            .grading
            .as_ref()
            .ok_or_else(|| Error::UngradedLetter(format!("{} is ungraded", self.name)))?;
        Ok(w.letters().map(|l| g[l.0 as usize]).sum())
    }

    pub fn param(&self, name: &str) -> Result<Scalar> {
        self.params
            .get(name)
            .cloned()
            .ok_or_else(|| Error::InvalidParam(format!("no parameter {name:?}")))
    }
}

/// The built-in presentations shipped with the crate.
pub mod presets {
    use super::*;
    use crate::scalar::AlgebraParams;

    const DISC: &str = include_str!("../presentations/disc.json");
    const CIRCLE: &str = include_str!("../presentations/circle.json");
    const SPHERE: &str = include_str!("../presentations/sphere.json");
    const S3: &str = include_str!("../presentations/s3.json");
    const HOPF_U1: &str = include_str!("../presentations/hopf_u1.json");

    /// Quantum disc with deformation parameter `r` and generator `x`.
    pub fn disc(r: Scalar) -> Result<Presentation> {
        let mut params = BTreeMap::new();
        params.insert("q".to_string(), r);
        Presentation::from_json(DISC, &params)
    }

    /// Quantum disc with a custom generator name (used for the second
    /// chart, conventionally `y`).
    pub fn disc_named(letter: &str, r: Scalar) -> Result<Presentation> {
        let base = disc(r)?;
        let star = format!("{letter}*");
        base.with_renamed_letters(&[letter, &star])
    }

    /// Laurent polynomials on the classical boundary circle.
    pub fn circle() -> Result<Presentation> {
        Presentation::from_json(CIRCLE, &BTreeMap::new())
    }

    /// The glued two-sphere base algebra on f_0, f_1, f_1*.
    pub fn sphere(params: &AlgebraParams) -> Result<Presentation> {
        let mut map = BTreeMap::new();
        map.insert("p".to_string(), params.p.clone());
        map.insert("q".to_string(), params.q.clone());
        Presentation::from_json(SPHERE, &map)
    }

    /// The glued three-sphere total space algebra on a, b.
    pub fn s3(params: &AlgebraParams) -> Result<Presentation> {
        let mut map = BTreeMap::new();
        map.insert("p".to_string(), params.p.clone());
        map.insert("q".to_string(), params.q.clone());
        Presentation::from_json(S3, &map)
    }

    /// The structure Hopf algebra O(U(1)) as a presented algebra.
    pub fn hopf_u1() -> Result<Presentation> {
        Presentation::from_json(HOPF_U1, &BTreeMap::new())
    }

    /// Lookup by CLI name.
    pub fn by_name(name: &str, params: &AlgebraParams) -> Result<Presentation> {
        match name {
            "disc" | "disc-q" => disc(params.q.clone()),
            "disc-p" => disc(params.p.clone()),
            "circle" => circle(),
            "sphere" => sphere(params),
            "s3" => s3(params),
            "hopf-u1" => hopf_u1(),
            other => Err(Error::InvalidParam(format!("unknown algebra {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, AlgebraParams};
    use proptest::prelude::*;

    fn params() -> AlgebraParams {
        AlgebraParams::default()
    }

    fn completed(name: &str) -> Presentation {
        let p = presets::by_name(name, &params()).unwrap();
        p.ensure_complete(DEFAULT_DEGREE_CAP).unwrap();
        p
    }

    fn shared_s3() -> &'static Presentation {
        static S3: std::sync::OnceLock<Presentation> = std::sync::OnceLock::new();
        S3.get_or_init(|| completed("s3"))
    }

    #[test]
    fn disc_normal_forms() {
        let disc = completed("disc");
        // x*x reduces to (1-q) + q x x*.
        let f = disc.parse("x* x").unwrap();
        let expected = disc.parse("(1-q) + q x x*").unwrap();
        assert_eq!(disc.nf(&f).unwrap(), expected);
        // The unit is irreducible, and nf is idempotent.
        let one = NCPoly::one(&disc.alphabet);
        assert_eq!(disc.nf(&one).unwrap(), one);
        let g = disc.parse("x* x* x x x*").unwrap();
        let n1 = disc.nf(&g).unwrap();
        assert_eq!(disc.nf(&n1).unwrap(), n1);
    }

    #[test]
    fn s3_product_of_relations() {
        let s3 = completed("s3");
        // a*a b*b = (1-p-q) + q a a* + p b b* on the completed system.
        let f = s3.parse("a* a b* b").unwrap();
        let expected = s3.parse("(1-p-q) + q a a* + p b b*").unwrap();
        assert_eq!(s3.nf(&f).unwrap(), expected);
    }

    #[test]
    fn defining_relations_reduce_to_zero() {
        for name in ["disc", "circle", "sphere", "s3", "hopf-u1"] {
            let pres = completed(name);
            for rel in &pres.relations {
                assert!(
                    pres.nf(rel).unwrap().is_zero(),
                    "relation {rel} of {name} does not vanish"
                );
            }
        }
    }

    #[test]
    fn orientation_certificate_rejects_bad_rules() {
        let disc = presets::disc(rat(1, 2)).unwrap();
        let alph = Arc::clone(&disc.alphabet);
        let mut sys = RewriteSystem::new(Arc::clone(&alph));
        // x x* -> x* x is not a reduction (rhs not smaller in deg-lex).
        let lhs = parse_word(&alph, "x x*").unwrap();
        let rhs = parse_poly(&alph, &BTreeMap::new(), "x* x").unwrap();
        assert!(matches!(sys.add_rule(lhs, rhs), Err(Error::NotOriented(_))));
        // Same-degree strictly smaller word is fine.
        let lhs = parse_word(&alph, "x* x").unwrap();
        let rhs = parse_poly(&alph, &BTreeMap::new(), "x x* + 1").unwrap();
        sys.add_rule(lhs, rhs).unwrap();
    }

    #[test]
    fn degree_cap_is_enforced() {
        let disc = completed("disc");
        let f = disc.parse("x^9").unwrap();
        assert!(matches!(
            disc.nf(&f),
            Err(Error::DegreeOverflow(9, DEFAULT_DEGREE_CAP))
        ));
    }

    #[test]
    fn disc_and_hopf_are_already_confluent() {
        for name in ["disc", "circle", "hopf-u1"] {
            let pres = presets::by_name(name, &params()).unwrap();
            let before = pres.system().rules().len();
            let stats = pres.ensure_complete(DEFAULT_DEGREE_CAP).unwrap();
            assert_eq!(stats.new_rules, 0, "{name} gained rules");
            assert_eq!(pres.system().rules().len(), before);
        }
    }

    #[test]
    fn existing_overlaps_resolve() {
        // The disc rule x*x has no ambiguity with itself (suffix x is not a
        // prefix), while u*u and uu* overlap on u*uu* and uu*u; both
        // resolutions go through the unit.
        let disc = completed("disc");
        assert!(disc.system().critical_pairs(DEFAULT_DEGREE_CAP).unwrap().is_empty());
        let hopf = completed("hopf-u1");
        let sys = hopf.system();
        let pairs = sys.critical_pairs(DEFAULT_DEGREE_CAP).unwrap();
        assert!(!pairs.is_empty());
        assert!(pairs.iter().all(|cp| cp.difference.is_zero()));
    }

    #[test]
    fn s3_completion_gains_the_derived_rule() {
        let s3 = presets::s3(&params()).unwrap();
        // Before completion, overlaps between a*a and a a* b b* leave a
        // nonzero difference.
        {
            let sys = s3.system();
            let pairs = sys.critical_pairs(DEFAULT_DEGREE_CAP).unwrap();
            assert!(pairs.iter().any(|cp| !cp.difference.is_zero()));
        }
        let stats = s3.ensure_complete(DEFAULT_DEGREE_CAP).unwrap();
        assert!(stats.new_rules > 0);
        // The degree-5 rule a a*^2 b b* -> a a*^2 + a* b b* - a* appears.
        let lhs = parse_word(&s3.alphabet, "a a*^2 b b*").unwrap();
        let expected = s3.parse("a a*^2 + a* b b* - a*").unwrap();
        let sys = s3.system();
        let rule = sys
            .rules()
            .iter()
            .find(|r| r.lhs == lhs)
            .expect("derived rule missing");
        assert_eq!(rule.rhs, expected);
        // And afterwards every critical pair up to the cap resolves.
        let pairs = sys.critical_pairs(DEFAULT_DEGREE_CAP).unwrap();
        assert!(pairs.iter().all(|cp| cp.difference.is_zero()));
    }

    #[test]
    fn completion_is_idempotent() {
        let s3 = presets::s3(&params()).unwrap();
        s3.ensure_complete(DEFAULT_DEGREE_CAP).unwrap();
        let n = s3.system().rules().len();
        let stats = s3.ensure_complete(DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(stats.new_rules, 0);
        assert_eq!(s3.system().rules().len(), n);
    }

    #[test]
    fn basis_words_small_degrees() {
        let s3 = completed("s3");
        let b0 = s3.basis(0).unwrap();
        assert_eq!(b0, vec![Word::empty()]);
        let b1: Vec<String> = s3
            .basis(1)
            .unwrap()
            .iter()
            .map(|w| word_to_text(w, &s3.alphabet))
            .collect();
        assert_eq!(b1, ["a", "a*", "b", "b*"]);

        let disc = completed("disc");
        let b2: Vec<String> = disc
            .basis(2)
            .unwrap()
            .iter()
            .map(|w| word_to_text(w, &disc.alphabet))
            .collect();
        assert_eq!(b2, ["x^2", "x x*", "x*^2"]);

        let fresh = presets::s3(&params()).unwrap();
        assert!(matches!(fresh.basis(2), Err(Error::NotCompleted(2))));
    }

    #[test]
    fn basis_dimensions_match_closed_forms() {
        let s3 = completed("s3");
        // Words a^i a*^j b^k b*^l with at least one exponent zero.
        let expect = [1usize, 4, 10, 20, 34, 52, 74];
        let mut cum = 0;
        for (d, e) in expect.iter().enumerate() {
            assert_eq!(s3.basis(d).unwrap().len(), *e, "degree {d}");
            cum += e;
        }
        assert_eq!(cum, 195);
        let sphere = completed("sphere");
        let total: usize = (0..=6).map(|d| sphere.basis(d).unwrap().len()).sum();
        assert_eq!(total, 64);
    }

    #[test]
    fn json_param_override() {
        let mut over = BTreeMap::new();
        over.insert("q".to_string(), rat(1, 3));
        let disc = Presentation::from_json(
            include_str!("../presentations/disc.json"),
            &over,
        )
        .unwrap();
        assert_eq!(disc.param("q").unwrap(), rat(1, 3));
        let f = disc.parse("x* x").unwrap();
        let nf = disc.nf(&f).unwrap();
        assert_eq!(nf.coeff(&Word::empty()), rat(2, 3));
    }

    #[test]
    fn renamed_disc_chart() {
        let disc = presets::disc_named("y", rat(1, 4)).unwrap();
        disc.ensure_complete(DEFAULT_DEGREE_CAP).unwrap();
        let f = disc.parse("y* y").unwrap();
        let expected = disc.parse("3/4 + 1/4 y y*").unwrap();
        assert_eq!(disc.nf(&f).unwrap(), expected);
    }

    #[test]
    fn winding_grading() {
        let s3 = completed("s3");
        let w = parse_word(&s3.alphabet, "a^2 b*").unwrap();
        assert_eq!(s3.winding(&w).unwrap(), 3);
        let v = parse_word(&s3.alphabet, "b a").unwrap();
        assert_eq!(s3.winding(&v).unwrap(), 0);
        let sphere = completed("sphere");
        let u = parse_word(&sphere.alphabet, "f_1 f_0").unwrap();
        assert_eq!(sphere.winding(&u).unwrap(), 0);
        let circle = completed("circle");
        assert!(circle.grading.is_some());
    }

    // Random polynomials over the s3 alphabet, degree <= 6.
    fn arb_s3_poly() -> impl Strategy<Value = NCPoly> {
        let nletters = shared_s3().alphabet.len() as u8;
        let word = proptest::collection::vec(0..nletters, 0..=6)
            .prop_map(|ls| Word(ls.into_iter().collect()));
        let term = (word, -9i64..=9);
        proptest::collection::vec(term, 0..=5).prop_map(|terms| {
            let mut f = NCPoly::zero(&shared_s3().alphabet);
            for (w, c) in terms {
                f.add_term(w, rat(c, 1));
            }
            f
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn star_commutes_with_normal_form(f in arb_s3_poly()) {
            let s3 = shared_s3();
            let lhs = s3.nf(&f.star()).unwrap();
            let rhs = s3.nf(&f).unwrap().star();
            prop_assert_eq!(lhs, s3.nf(&rhs).unwrap());
        }

        #[test]
        fn normal_form_is_multiplicative(f in arb_s3_poly(), g in arb_s3_poly()) {
            let s3 = shared_s3();
            let prod = f.checked_mul(&g).unwrap();
            if prod.degree().unwrap_or(0) > DEFAULT_DEGREE_CAP {
                return Ok(());
            }
            let direct = s3.nf(&prod).unwrap();
            let nf_f = s3.nf(&f).unwrap();
            let nf_g = s3.nf(&g).unwrap();
            let via = s3.nf(&nf_f.checked_mul(&nf_g).unwrap()).unwrap();
            prop_assert_eq!(direct, via);
        }

        #[test]
        fn single_steps_join(f in arb_s3_poly()) {
            // Confluence on random words: every one-step reduct of every
            // monomial has the same normal form as the monomial itself.
            let s3 = shared_s3();
            let sys = s3.system();
            for (w, _) in f.terms() {
                let target = sys
                    .normal_form(&NCPoly::from_word(&s3.alphabet, w.clone()))
                    .unwrap();
                for at in 0..w.degree() {
                    for r in 0..sys.rules().len() {
                        let lhs = sys.rules()[r].lhs.clone();
                        if w.degree() >= at + lhs.degree()
                            && w.0[at..at + lhs.degree()] == lhs.0[..]
                        {
                            let rhs = sys.rules()[r].rhs.clone();
                            let stepped = sys.splice(w, at, lhs.degree(), &rhs);
                            prop_assert_eq!(&sys.normal_form(&stepped).unwrap(), &target);
                        }
                    }
                }
            }
        }
    }
}
