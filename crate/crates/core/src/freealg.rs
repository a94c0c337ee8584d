//! Elements of `F = TV ⋊ Γ` (and its σ-twisted crossed-product variant),
//! presentations by oriented rewrite rules, normal forms, critical-pair
//! checking and Hilbert-series accounting.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::abgroup::{cocycle_eval, BilinearCocycle, GrpElt};
use crate::datum::{check_support, theta, xi, xi_sigma, DatumError, ParamMap, YDDatum};
use crate::scalars::{Coeff, Scalar};

pub type Letter = u8;
pub type Word = SmallVec<[Letter; 8]>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PresentationError {
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error("relation has a non-invertible leading coefficient: {0}")]
    NonUnitLead(String),
    #[error("element is not homogeneous in the letters: {0}")]
    Inhomogeneous(String),
    #[error("flavor {0} does not support this operation")]
    WrongFlavor(String),
    #[error("could not parse expression: {0}")]
    Parse(String),
    #[error("completion did not terminate within {0} rounds")]
    Completion(usize),
}

// ---------------------------------------------------------------------------
// Monomials and elements
// ---------------------------------------------------------------------------

/// A word in the letters followed by a group element: `x_w · ḡ`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono {
    pub word: Word,
    pub grp: GrpElt,
}

impl Mono {
    pub fn new(word: &[Letter], grp: GrpElt) -> Self {
        Mono { word: SmallVec::from_slice(word), grp }
    }

    pub fn unit(m: usize) -> Self {
        Mono { word: Word::new(), grp: GrpElt::zero(m) }
    }

    pub fn degree(&self) -> usize {
        self.word.len()
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.word
            .len()
            .cmp(&o.word.len())
            .then_with(|| self.word.cmp(&o.word))
            .then_with(|| self.grp.cmp(&o.grp))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

/// Finite linear combination of monomials, kept merged and sorted.
#[derive(Clone, PartialEq, Debug)]
pub struct Element<C> {
    terms: BTreeMap<Mono, C>,
}

impl<C: Coeff> Default for Element<C> {
    fn default() -> Self {
        Element { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> Element<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(c: C, word: &[Letter], grp: GrpElt) -> Self {
        let mut e = Self::zero();
        e.add_term(Mono::new(word, grp), c);
        e
    }

    pub fn scalar(c: C, m: usize) -> Self {
        Self::term(c, &[], GrpElt::zero(m))
    }

    pub fn one(m: usize) -> Self {
        Self::scalar(C::one(), m)
    }

    pub fn letter(i: usize, m: usize) -> Self {
        Self::term(C::one(), &[i as Letter], GrpElt::zero(m))
    }

    pub fn word(w: &[Letter], m: usize) -> Self {
        Self::term(C::one(), w, GrpElt::zero(m))
    }

    pub fn group(g: GrpElt) -> Self {
        Self::term(C::one(), &[], g)
    }

    pub fn from_mono(m: Mono) -> Self {
        let mut e = Self::zero();
        e.add_term(m, C::one());
        e
    }

    pub fn add_term(&mut self, m: Mono, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                let s = x.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut e = self.clone();
        e.add_assign(o);
        e
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Element { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut e = Self::zero();
        for (m, x) in &self.terms {
            e.add_term(m.clone(), x.mul(c));
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn leading(&self) -> Option<(&Mono, &C)> {
        self.terms.iter().next_back()
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    /// The value `c` if the element equals `c · 1`.
    pub fn as_scalar(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.word.is_empty() && m.grp.is_zero()).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Keep only the terms of the given letter degree.
    pub fn homogeneous_part(&self, deg: usize) -> Self {
        Element { terms: self.terms.iter().filter(|(m, _)| m.degree() == deg).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Element<D> {
        let mut e = Element::zero();
        for (m, c) in &self.terms {
            e.add_term(m.clone(), f(c));
        }
        e
    }

    pub fn fmt_with(&self, d: &YDDatum) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| fmt_term(c, m, d)).collect();
        parts.join(" + ")
    }
}

fn fmt_term<C: fmt::Display>(c: &C, m: &Mono, d: &YDDatum) -> String {
    let mut s = format!("{c}");
    if s.contains(['+', '-', '/']) && !s.starts_with('(') {
        s = format!("({s})");
    }
    if !m.word.is_empty() {
        s.push_str(" * ");
        s.push_str(&fmt_word(&m.word, d));
    }
    s.push_str(&format!(" * {}", m.grp));
    s
}

pub fn fmt_word(w: &[Letter], d: &YDDatum) -> String {
    w.iter().map(|&l| format!("x[{}]", d.labels[l as usize])).collect()
}

/// Finite sum of pure tensors `c · m_1 ⊗ … ⊗ m_k` of fixed arity.
#[derive(Clone, PartialEq, Debug)]
pub struct TensorElement<C> {
    pub arity: usize,
    terms: BTreeMap<Vec<Mono>, C>,
}

impl<C: Coeff> TensorElement<C> {
    pub fn zero(arity: usize) -> Self {
        TensorElement { arity, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, legs: Vec<Mono>, c: C) {
        debug_assert_eq!(legs.len(), self.arity);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&legs) {
            Some(x) => {
                let s = x.add(&c);
                if s.is_zero() {
                    self.terms.remove(&legs);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(legs, c);
            }
        }
    }

    /// Add `c · a_1 ⊗ … ⊗ a_k` for elements `a_r`.
    pub fn add_product(&mut self, c: &C, legs: &[&Element<C>]) {
        fn rec<C: Coeff>(out: &mut TensorElement<C>, c: C, legs: &[&Element<C>], acc: &mut Vec<Mono>) {
            match legs.split_first() {
                None => out.add_term(acc.clone(), c),
                Some((first, rest)) => {
                    for (m, x) in first.iter() {
                        acc.push(m.clone());
                        rec(out, c.mul(x), rest, acc);
                        acc.pop();
                    }
                }
            }
        }
        let mut acc = Vec::new();
        rec(self, c.clone(), legs, &mut acc);
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (k, c) in &o.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut e = self.clone();
        for (k, c) in &o.terms {
            e.add_term(k.clone(), c.neg());
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Mono>, &C)> {
        self.terms.iter()
    }

    pub fn fmt_with(&self, d: &YDDatum) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(legs, c)| {
                let legs: Vec<String> = legs
                    .iter()
                    .map(|m| {
                        let w = if m.word.is_empty() { String::from("1") } else { fmt_word(&m.word, d) };
                        format!("{w}{}", m.grp)
                    })
                    .collect();
                format!("({c}) {}", legs.join(" (x) "))
            })
            .collect();
        parts.join(" + ")
    }
}

// ---------------------------------------------------------------------------
// Presentations
// ---------------------------------------------------------------------------

/// Twisting 2-cocycle for the crossed product `ḡ ḡ′ = σ(g, g′) \overline{g g′}`.
pub type TwistFn<C> = Arc<dyn Fn(&GrpElt, &GrpElt) -> C + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    /// Graded Hopf algebra `H⁰`.
    H0,
    /// Lifted Hopf algebra `H^λ`.
    Hlambda,
    /// Cleft object `A(λ)`.
    Alambda,
    /// Cleft object `A(σ, μ)`.
    Asigmamu,
    /// Cleft object `A^λ(σ, μ)`.
    Alambdasigmamu,
    /// Cleft object `B(λ)`.
    Blambda,
    /// The free bosonization `F = TV ⋊ Γ`.
    F,
}

impl Flavor {
    pub fn is_hopf(self) -> bool {
        matches!(self, Flavor::H0 | Flavor::Hlambda | Flavor::F)
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Flavor::H0 => "H0",
            Flavor::Hlambda => "Hλ",
            Flavor::Alambda => "Aλ",
            Flavor::Asigmamu => "Aσμ",
            Flavor::Alambdasigmamu => "Aλσμ",
            Flavor::Blambda => "Bλ",
            Flavor::F => "F",
        };
        f.write_str(s)
    }
}

/// Oriented rewrite rule `lhs → Σ c · w · ḡ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule<C> {
    pub lhs: Word,
    pub rhs: Vec<(C, Word, GrpElt)>,
}

type NfTerms<C> = Arc<Vec<(C, Word, GrpElt)>>;

/// Algebra presented as `TV ⋊_σ Γ / (relations)`, with the relations
/// oriented by the degree-lexicographic order on words.
pub struct Presentation<C: Coeff> {
    datum: Arc<YDDatum>,
    flavor: Flavor,
    twist: Option<TwistFn<C>>,
    central_group: bool,
    relations: Vec<Element<C>>,
    rules: Vec<Rule<C>>,
    memo: RwLock<HashMap<Word, NfTerms<C>>>,
}

impl<C: Coeff> Clone for Presentation<C> {
    fn clone(&self) -> Self {
        Presentation {
            datum: self.datum.clone(),
            flavor: self.flavor,
            twist: self.twist.clone(),
            central_group: self.central_group,
            relations: self.relations.clone(),
            rules: self.rules.clone(),
            memo: RwLock::new(HashMap::new()),
        }
    }
}

impl<C: Coeff> fmt::Debug for Presentation<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Presentation")
            .field("flavor", &self.flavor)
            .field("letters", &self.datum.labels)
            .field("rules", &self.rules.len())
            .field("twisted", &self.twist.is_some())
            .finish()
    }
}

impl<C: Coeff> Presentation<C> {
    /// Presentation with only the group relations (the free algebra `F`,
    /// or its crossed-product version when `twist` is given).
    pub fn free(datum: Arc<YDDatum>, flavor: Flavor, twist: Option<TwistFn<C>>) -> Self {
        Presentation {
            datum,
            flavor,
            twist,
            central_group: false,
            relations: Vec::new(),
            rules: Vec::new(),
            memo: RwLock::new(HashMap::new()),
        }
    }

    /// Treat group elements as central (no `χ` factors when letters pass
    /// group elements).  Used only to display raw critical-pair data.
    pub fn with_central_group(mut self) -> Self {
        self.central_group = true;
        self.memo = RwLock::new(HashMap::new());
        self
    }

    pub fn datum(&self) -> &Arc<YDDatum> {
        &self.datum
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn rules(&self) -> &[Rule<C>] {
        &self.rules
    }

    pub fn relations(&self) -> &[Element<C>] {
        &self.relations
    }

    pub fn is_twisted(&self) -> bool {
        self.twist.is_some()
    }

    /// Total Γ-degree `g_w + g` of a monomial.
    pub fn total_degree(&self, m: &Mono) -> GrpElt {
        self.datum.word_degree(&m.word).add(&m.grp)
    }

    /// Whether every defining relation is homogeneous for the total Γ-degree.
    pub fn is_graded(&self) -> bool {
        self.relations.iter().all(|r| {
            let mut degs = r.iter().map(|(m, _)| self.total_degree(m));
            match degs.next() {
                None => true,
                Some(first) => degs.all(|d| d == first),
            }
        })
    }

    pub fn twist_at(&self, a: &GrpElt, b: &GrpElt) -> C {
        match &self.twist {
            Some(f) if !a.is_zero() && !b.is_zero() => f(a, b),
            _ => C::one(),
        }
    }

    /// Factor acquired when `ḡ` moves right past the word `w`.
    pub fn chi_move(&self, w: &[Letter], g: &GrpElt) -> C {
        if self.central_group || g.is_zero() || w.is_empty() {
            C::one()
        } else {
            C::from_scalar(&self.datum.chi_word(w, g))
        }
    }

    /// Add a relation; it is first reduced by the existing rules, then
    /// oriented by its largest monomial.  Returns `false` if redundant.
    pub fn add_relation(&mut self, r: Element<C>) -> Result<bool, PresentationError> {
        self.relations.push(r.clone());
        let mut r = self.normal_form(&r);
        let Some((lead, _)) = r.leading() else { return Ok(false) };
        if !lead.grp.is_zero() {
            let g = lead.grp.neg();
            r = self.mul(&r, &Element::group(g));
        }
        let (lead, c) = r.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let inv = c.inv().ok_or_else(|| PresentationError::NonUnitLead(c.to_string()))?;
        let minus_inv = inv.neg();
        let rhs = r
            .iter()
            .filter(|(m, _)| **m != lead)
            .map(|(m, x)| (x.mul(&minus_inv), m.word.clone(), m.grp.clone()))
            .collect();
        self.rules.push(Rule { lhs: lead.word, rhs });
        self.memo.write().unwrap().clear();
        Ok(true)
    }

    fn find_match(&self, w: &[Letter]) -> Option<(usize, usize)> {
        for p in 0..w.len() {
            for (k, r) in self.rules.iter().enumerate() {
                let l = r.lhs.len();
                if p + l <= w.len() && w[p..p + l] == r.lhs[..] {
                    return Some((p, k));
                }
            }
        }
        None
    }

    pub fn is_normal_word(&self, w: &[Letter]) -> bool {
        self.find_match(w).is_none()
    }

    /// One rewrite step at position `pos` with rule `k`, group moved right.
    fn apply_at(&self, w: &[Letter], pos: usize, k: usize) -> Element<C> {
        let rule = &self.rules[k];
        let (u, rest) = w.split_at(pos);
        let v = &rest[rule.lhs.len()..];
        let mut out = Element::zero();
        for (c, w2, h) in &rule.rhs {
            let mut word: Word = SmallVec::from_slice(u);
            word.extend_from_slice(w2);
            word.extend_from_slice(v);
            out.add_term(Mono { word, grp: h.clone() }, c.mul(&self.chi_move(v, h)));
        }
        out
    }

    fn nf_word(&self, w: &[Letter]) -> NfTerms<C> {
        if let Some(x) = self.memo.read().unwrap().get(w) {
            return x.clone();
        }
        let m = self.rank();
        let result: Vec<(C, Word, GrpElt)> = match self.find_match(w) {
            None => vec![(C::one(), SmallVec::from_slice(w), GrpElt::zero(m))],
            Some((pos, k)) => {
                let step = self.apply_at(w, pos, k);
                let mut acc: BTreeMap<Mono, C> = BTreeMap::new();
                for (mono, c) in step.iter() {
                    for (c2, w2, h2) in self.nf_word(&mono.word).iter() {
                        let coef = c.mul(c2).mul(&self.twist_at(h2, &mono.grp));
                        let key = Mono { word: w2.clone(), grp: h2.add(&mono.grp) };
                        let e = acc.entry(key).or_insert_with(C::zero);
                        *e = e.add(&coef);
                    }
                }
                acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (c, k.word, k.grp)).collect()
            }
        };
        let result = Arc::new(result);
        self.memo.write().unwrap().insert(SmallVec::from_slice(w), result.clone());
        result
    }

    /// Normal form of `x_w · ḡ`.
    pub fn nf_mono(&self, w: &[Letter], g: &GrpElt) -> Element<C> {
        let mut out = Element::zero();
        for (c, w2, h) in self.nf_word(w).iter() {
            out.add_term(Mono { word: w2.clone(), grp: h.add(g) }, c.mul(&self.twist_at(h, g)));
        }
        out
    }

    pub fn normal_form(&self, a: &Element<C>) -> Element<C> {
        let mut out = Element::zero();
        for (m, c) in a.iter() {
            for (c2, w2, h) in self.nf_word(&m.word).iter() {
                let coef = c.mul(c2).mul(&self.twist_at(h, &m.grp));
                out.add_term(Mono { word: w2.clone(), grp: h.add(&m.grp) }, coef);
            }
        }
        out
    }

    /// `(x_{w1} ḡ1)(x_{w2} ḡ2)` reduced.
    pub fn mul_mono(&self, a: &Mono, b: &Mono) -> Element<C> {
        let coef = self.chi_move(&b.word, &a.grp).mul(&self.twist_at(&a.grp, &b.grp));
        let mut w = a.word.clone();
        w.extend_from_slice(&b.word);
        self.nf_mono(&w, &a.grp.add(&b.grp)).scale(&coef)
    }

    pub fn mul(&self, a: &Element<C>, b: &Element<C>) -> Element<C> {
        let mut out = Element::zero();
        for (ma, ca) in a.iter() {
            for (mb, cb) in b.iter() {
                let coef = ca.mul(cb).mul(&self.chi_move(&mb.word, &ma.grp)).mul(&self.twist_at(&ma.grp, &mb.grp));
                let mut w = ma.word.clone();
                w.extend_from_slice(&mb.word);
                let g = ma.grp.add(&mb.grp);
                for (c2, w2, h) in self.nf_word(&w).iter() {
                    out.add_term(Mono { word: w2.clone(), grp: h.add(&g) }, coef.mul(c2).mul(&self.twist_at(h, &g)));
                }
            }
        }
        out
    }

    pub fn mul_all(&self, factors: &[Element<C>]) -> Element<C> {
        let mut acc = Element::one(self.rank());
        for f in factors {
            acc = self.mul(&acc, f);
        }
        acc
    }

    /// Irreducible words grouped by length `0..=max_len`.
    pub fn normal_words(&self, max_len: usize) -> Vec<Vec<Word>> {
        let n = self.datum.len();
        let mut out: Vec<Vec<Word>> = vec![vec![Word::new()]];
        for len in 1..=max_len {
            let mut next = Vec::new();
            for w in &out[len - 1] {
                for l in 0..n {
                    let mut w2 = w.clone();
                    w2.push(l as Letter);
                    // Any occurrence of a leading word must end at the new letter.
                    let ok = self.rules.iter().all(|r| {
                        let k = r.lhs.len();
                        k > w2.len() || w2[w2.len() - k..] != r.lhs[..]
                    });
                    if ok {
                        next.push(w2);
                    }
                }
            }
            out.push(next);
        }
        out
    }

    /// Ranks over `kΓ` of the letter-degree components `0..=max_len`.
    pub fn hilbert_ranks(&self, max_len: usize) -> Vec<usize> {
        self.normal_words(max_len).iter().map(Vec::len).collect()
    }

    /// All normal monomials `w · 0` with `|w| ≤ max_len`.
    pub fn basis(&self, max_len: usize) -> Vec<Mono> {
        let m = self.rank();
        self.normal_words(max_len).into_iter().flatten().map(|w| Mono { word: w, grp: GrpElt::zero(m) }).collect()
    }

    /// Resolve all critical pairs whose ambiguity word has length ≤ `bound`.
    pub fn check_overlaps(&self, bound: usize) -> OverlapReport<C> {
        let mut pairs = Vec::new();
        let nr = self.rules.len();
        for a in 0..nr {
            let la = self.rules[a].lhs.len();
            for b in 0..nr {
                let lb = self.rules[b].lhs.len();
                for k in 1..la.min(lb) {
                    if self.rules[a].lhs[la - k..] != self.rules[b].lhs[..k] {
                        continue;
                    }
                    let mut word = self.rules[a].lhs.clone();
                    word.extend_from_slice(&self.rules[b].lhs[k..]);
                    if word.len() > bound {
                        continue;
                    }
                    let r1 = self.normal_form(&self.apply_at(&word, 0, a));
                    let r2 = self.normal_form(&self.apply_at(&word, la - k, b));
                    pairs.push(CriticalPair { kind: PairKind::Overlap, word, group: None, discrepancy: r1.sub(&r2) });
                }
                if a != b && lb <= la && la <= bound {
                    for p in 0..=la - lb {
                        if self.rules[a].lhs[p..p + lb] != self.rules[b].lhs[..] {
                            continue;
                        }
                        let word = self.rules[a].lhs.clone();
                        let r1 = self.normal_form(&self.apply_at(&word, 0, a));
                        let r2 = self.normal_form(&self.apply_at(&word, p, b));
                        pairs.push(CriticalPair { kind: PairKind::Inclusion, word, group: None, discrepancy: r1.sub(&r2) });
                    }
                }
            }
        }
        if !self.central_group {
            let m = self.rank();
            let samples: Vec<GrpElt> =
                (0..m).flat_map(|r| [GrpElt::unit(m, r), GrpElt::unit(m, r).neg()]).collect();
            for rule in &self.rules {
                if rule.lhs.len() > bound {
                    continue;
                }
                let mut rhs = Element::zero();
                for (c, w, h) in &rule.rhs {
                    rhs.add_term(Mono { word: w.clone(), grp: h.clone() }, c.clone());
                }
                for g in &samples {
                    let route1 = self.normal_form(&rhs).scale(&self.chi_move(&rule.lhs, g));
                    let route1 = self.mul(&route1, &Element::group(g.clone()));
                    let route2 = self.mul(&Element::group(g.clone()), &rhs);
                    pairs.push(CriticalPair {
                        kind: PairKind::Group,
                        word: rule.lhs.clone(),
                        group: Some(g.clone()),
                        discrepancy: route1.sub(&route2),
                    });
                }
            }
            if self.twist.is_some() {
                for a in &samples {
                    for b in &samples {
                        for c in &samples {
                            let l = self.twist_at(a, b).mul(&self.twist_at(&a.add(b), c));
                            let r = self.twist_at(b, c).mul(&self.twist_at(a, &b.add(c)));
                            let mut disc = Element::zero();
                            disc.add_term(Mono::new(&[], a.add(b).add(c)), l.sub(&r));
                            pairs.push(CriticalPair {
                                kind: PairKind::GroupAssociativity,
                                word: Word::new(),
                                group: Some(a.add(b).add(c)),
                                discrepancy: disc,
                            });
                        }
                    }
                }
            }
        }
        OverlapReport { pairs }
    }

    /// Add every nonzero critical-pair discrepancy as a new relation until
    /// all pairs up to `bound` resolve.
    pub fn complete(&mut self, bound: usize, max_rounds: usize) -> Result<usize, PresentationError> {
        let mut added = 0;
        for _ in 0..max_rounds {
            let rep = self.check_overlaps(bound);
            let bad: Vec<Element<C>> = rep.failures().map(|p| p.discrepancy.clone()).collect();
            if bad.is_empty() {
                return Ok(added);
            }
            for e in bad {
                if self.add_relation(e)? {
                    added += 1;
                }
            }
        }
        Err(PresentationError::Completion(max_rounds))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairKind {
    Overlap,
    Inclusion,
    Group,
    GroupAssociativity,
}

#[derive(Clone, Debug)]
pub struct CriticalPair<C> {
    pub kind: PairKind,
    pub word: Word,
    pub group: Option<GrpElt>,
    pub discrepancy: Element<C>,
}

#[derive(Clone, Debug)]
pub struct OverlapReport<C> {
    pub pairs: Vec<CriticalPair<C>>,
}

impl<C: Coeff> OverlapReport<C> {
    pub fn failures(&self) -> impl Iterator<Item = &CriticalPair<C>> {
        self.pairs.iter().filter(|p| !p.discrepancy.is_zero())
    }

    pub fn is_confluent(&self) -> bool {
        self.failures().next().is_none()
    }
}

// ---------------------------------------------------------------------------
// Braided commutators
// ---------------------------------------------------------------------------

/// `(ad_c x_i)(a) = x_i a − χ_a(g_i) a x_i` in the free algebra, for `a` a
/// combination of pure words of one common Γ-degree.
pub fn braided_adjoint<C: Coeff>(d: &YDDatum, i: usize, a: &Element<C>) -> Result<Element<C>, PresentationError> {
    let m = d.rank();
    let mut degree: Option<GrpElt> = None;
    for (mono, _) in a.iter() {
        if !mono.grp.is_zero() {
            return Err(PresentationError::Inhomogeneous("group part present".into()));
        }
        let dg = d.word_degree(&mono.word);
        match &degree {
            None => degree = Some(dg),
            Some(x) if *x != dg => return Err(PresentationError::Inhomogeneous(a.fmt_with(d))),
            _ => {}
        }
    }
    let mut out = Element::zero();
    for (mono, c) in a.iter() {
        let mut left: Word = SmallVec::from_slice(&[i as Letter]);
        left.extend_from_slice(&mono.word);
        out.add_term(Mono { word: left, grp: GrpElt::zero(m) }, c.clone());
        let factor: Scalar = mono.word.iter().fold(Scalar::one(), |acc, &l| acc.mul(d.q(i, l as usize)));
        let mut right = mono.word.clone();
        right.push(i as Letter);
        out.add_term(Mono { word: right, grp: GrpElt::zero(m) }, c.mul(&C::from_scalar(&factor)).neg());
    }
    Ok(out)
}

/// `(ad_c x_i)^{1−a_ij}(x_j)`.
pub fn serre_element(d: &YDDatum, i: usize, j: usize, a_ij: i64) -> Result<Element<Scalar>, PresentationError> {
    if i == j {
        return Err(PresentationError::Inhomogeneous("Serre element needs i ≠ j".into()));
    }
    let mut e = Element::letter(j, d.rank());
    for _ in 0..(1 - a_ij) {
        e = braided_adjoint(d, i, &e)?;
    }
    Ok(e)
}

/// Serre elements for every ordered pair of distinct letters in one block,
/// using the datum's GCM.
pub fn serre_relations(d: &YDDatum) -> Result<Vec<Element<Scalar>>, PresentationError> {
    let Some(gcm) = &d.gcm else { return Ok(Vec::new()) };
    let mut out = Vec::new();
    for i in 0..d.len() {
        for j in 0..d.len() {
            if i != j && d.block[i] == d.block[j] {
                out.push(serre_element(d, i, j, gcm.a[i][j])?);
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Assemble a presentation from per-pair Θ tails.  For `(i, j) ∈ Θ` the
/// relation is `x_i x_j − q_ij x_j x_i − Σ c ḡ`, with the listed group tail;
/// block relations are appended afterwards.
pub fn assemble<C: Coeff>(
    d: Arc<YDDatum>,
    flavor: Flavor,
    twist: Option<TwistFn<C>>,
    tails: &BTreeMap<(usize, usize), Vec<(C, GrpElt)>>,
    block_relations: &[Element<C>],
) -> Result<Presentation<C>, PresentationError> {
    let mut p = Presentation::free(d.clone(), flavor, twist);
    if flavor == Flavor::F {
        return Ok(p);
    }
    let m = d.rank();
    for b in block_relations {
        p.add_relation(b.clone())?;
    }
    for (i, j) in theta(&d) {
        let mut r: Element<C> = Element::word(&[i as Letter, j as Letter], m);
        r.add_term(Mono::new(&[j as Letter, i as Letter], GrpElt::zero(m)), C::from_scalar(d.q(i, j)).neg());
        if let Some(t) = tails.get(&(i, j)) {
            for (c, g) in t {
                r.add_term(Mono::new(&[], g.clone()), c.neg());
            }
        }
        p.add_relation(r)?;
    }
    Ok(p)
}

/// Θ tails of each flavor for a coefficient ring `C` and an optional twist.
pub fn flavor_tails<C: Coeff>(
    d: &YDDatum,
    flavor: Flavor,
    twist: Option<&TwistFn<C>>,
    lambda: &ParamMap<C>,
    mu: &ParamMap<C>,
) -> BTreeMap<(usize, usize), Vec<(C, GrpElt)>> {
    let m = d.rank();
    let zero = GrpElt::zero(m);
    let mut out = BTreeMap::new();
    for (i, j) in theta(d) {
        let gij = d.g[i].add(&d.g[j]);
        let lam = lambda.get(&(i, j)).cloned().unwrap_or_else(C::zero);
        let mu_ij = mu.get(&(i, j)).cloned().unwrap_or_else(C::zero);
        let sig = match twist {
            Some(f) => f(&d.g[i], &d.g[j]),
            None => C::one(),
        };
        let t: Vec<(C, GrpElt)> = match flavor {
            Flavor::H0 | Flavor::F => vec![],
            Flavor::Alambda => vec![(lam, gij)],
            Flavor::Hlambda => vec![(lam.clone(), gij), (lam.neg(), zero.clone())],
            Flavor::Asigmamu => vec![(mu_ij.mul(&sig), gij)],
            Flavor::Alambdasigmamu => vec![(lam.neg(), zero.clone()), (mu_ij.mul(&sig), gij)],
            Flavor::Blambda => vec![(lam.neg(), zero.clone())],
        };
        let t: Vec<(C, GrpElt)> = t.into_iter().filter(|(c, _)| !c.is_zero()).collect();
        if !t.is_empty() {
            out.insert((i, j), t);
        }
    }
    out
}

/// Parameters of a scalar presentation.
#[derive(Clone, Debug, Default)]
pub struct Params {
    pub lambda: ParamMap<Scalar>,
    pub sigma: Option<BilinearCocycle>,
    pub mu: ParamMap<Scalar>,
}

pub fn bilinear_twist(sigma: &BilinearCocycle) -> TwistFn<Scalar> {
    let s = sigma.clone();
    Arc::new(move |a: &GrpElt, b: &GrpElt| cocycle_eval(&s, a, b))
}

/// Build a presentation over ℚ(q) of the requested flavor, checking the
/// supports `λ ⊆ Ξ` and `μ ⊆ Ξ(σ)`.
pub fn build_presentation(
    d: Arc<YDDatum>,
    flavor: Flavor,
    params: &Params,
    block_relations: &[Element<Scalar>],
) -> Result<Presentation<Scalar>, PresentationError> {
    check_support(&d, &params.lambda, &xi(&d))?;
    let twist = match (&params.sigma, flavor) {
        (Some(s), Flavor::Asigmamu | Flavor::Alambdasigmamu) if !s.is_trivial() => Some(bilinear_twist(s)),
        _ => None,
    };
    if matches!(flavor, Flavor::Asigmamu | Flavor::Alambdasigmamu) {
        let sigma = params.sigma.clone().unwrap_or_else(|| BilinearCocycle::trivial(d.rank()));
        check_support(&d, &params.mu, &xi_sigma(&d, &sigma))?;
    }
    let tails = flavor_tails(&d, flavor, twist.as_ref(), &params.lambda, &params.mu);
    assemble(d, flavor, twist, &tails, block_relations)
}

// ---------------------------------------------------------------------------
// Expression parsing
// ---------------------------------------------------------------------------

/// Parse expressions such as `x[1]x[-1] - (q^2) * x[-1]x[1] * K(1)` into a
/// normal-form element of `p`.
pub fn parse_element(s: &str, p: &Presentation<Scalar>) -> Result<Element<Scalar>, PresentationError> {
    let d = p.datum();
    let m = d.rank();
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0usize;
    let err = |msg: &str| PresentationError::Parse(msg.to_string());
    let mut total = Element::zero();
    let mut sign = Scalar::one();
    if chars.is_empty() {
        return Err(err("empty expression"));
    }
    loop {
        if pos < chars.len() && (chars[pos] == '+' || chars[pos] == '-') {
            if chars[pos] == '-' {
                sign = sign.neg();
            }
            pos += 1;
        }
        let mut term = Element::scalar(sign.clone(), m);
        let mut any = false;
        while pos < chars.len() && chars[pos] != '+' && chars[pos] != '-' {
            if chars[pos] == '*' {
                pos += 1;
                continue;
            }
            let factor = if chars[pos] == 'x' && chars.get(pos + 1) == Some(&'[') {
                let end = chars[pos..].iter().position(|&c| c == ']').ok_or_else(|| err("unclosed x["))? + pos;
                let label: String = chars[pos + 2..end].iter().collect();
                pos = end + 1;
                Element::letter(d.letter(&label)?, m)
            } else if chars[pos] == 'K' && chars.get(pos + 1) == Some(&'(') {
                let end = chars[pos..].iter().position(|&c| c == ')').ok_or_else(|| err("unclosed K("))? + pos;
                let inner: String = chars[pos + 2..end].iter().collect();
                pos = end + 1;
                let v = inner
                    .split(',')
                    .map(|t| t.parse::<i32>().map_err(|_| err("bad group exponent")))
                    .collect::<Result<Vec<_>, _>>()?;
                if v.len() != m {
                    return Err(err("group element has the wrong rank"));
                }
                Element::group(GrpElt::from_slice(&v))
            } else if chars[pos] == '(' {
                let mut depth = 0;
                let mut end = pos;
                for (k, &c) in chars.iter().enumerate().skip(pos) {
                    if c == '(' {
                        depth += 1;
                    } else if c == ')' {
                        depth -= 1;
                        if depth == 0 {
                            end = k;
                            break;
                        }
                    }
                }
                if depth != 0 {
                    return Err(err("unbalanced parentheses"));
                }
                let inner: String = chars[pos + 1..end].iter().collect();
                pos = end + 1;
                Element::scalar(inner.parse::<Scalar>().map_err(|e| err(&e.to_string()))?, m)
            } else {
                // Bare scalar atom: digits, '/', 'q', '^' with a signed exponent.
                let start = pos;
                while pos < chars.len() {
                    let c = chars[pos];
                    let exp_sign = (c == '-' || c == '+') && pos > start && chars[pos - 1] == '^';
                    if c.is_ascii_digit() || c == '/' || c == 'q' || c == '^' || exp_sign {
                        pos += 1;
                    } else {
                        break;
                    }
                }
                if start == pos {
                    return Err(err(&format!("unexpected character `{}`", chars[pos])));
                }
                let atom: String = chars[start..pos].iter().collect();
                Element::scalar(atom.parse::<Scalar>().map_err(|e| err(&e.to_string()))?, m)
            };
            term = p.mul(&term, &factor);
            any = true;
        }
        if !any {
            return Err(err("empty term"));
        }
        total.add_assign(&term);
        sign = Scalar::one();
        if pos >= chars.len() {
            break;
        }
    }
    Ok(p.normal_form(&total))
}
