//! Cleft objects with their canonical sections: colinearity, convolution
//! invertibility, coinvariants, cocycle extraction, deformed products,
//! normalization of NB elements, equivalence of pairs `(σ, μ)`, and the
//! augmented `k_M` theory.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::abgroup::{
    add_cocycle_eval, add_cohomologous, add_coboundary, cohomologous, skew_invariant, solve_monomial_system, AdditiveCochain,
    AdditiveCocycle, BilinearCocycle, GrpElt, MVec, MonomialSolve, OneCochain, KM,
};
use crate::datum::{theta, xi, xi_sigma, ParamMap, YDDatum};
use crate::freealg::{assemble, flavor_tails, Element, Flavor, Mono, Presentation, PresentationError, TwistFn};
use crate::hopf::{
    check_convolution_identity, coproduct, coproduct2, coproduct_mono, counit_mono, group_samples, sample_basis, CheckReport,
    CoactionSpec, CocycleSide, FilteredMap, HopfError, Side,
};
use crate::hopf::conv_inverse;
use crate::linalg::{nullspace, solve, SparseVec};
use crate::scalars::{Coeff, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CleftError {
    #[error(transparent)]
    Hopf(#[from] HopfError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("section check failed: {0}")]
    Section(String),
    #[error("q_ii = 1 for letter {0}; NB normalization needs q_ii − 1 invertible")]
    TrivialDiagonal(String),
    #[error("normalization constant is not a scalar multiple of g̃_i²: {0}")]
    Normalization(String),
    #[error("pair ({0}, {1}) violates the membership condition")]
    Membership(String, String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
}

// ---------------------------------------------------------------------------
// Cleft objects
// ---------------------------------------------------------------------------

/// A comodule algebra `alg` over the Hopf algebra `hopf` with the
/// identity-on-normal-monomials section and its convolution inverse.
pub struct CleftObject<C: Coeff> {
    pub hopf: Arc<Presentation<C>>,
    pub alg: Arc<Presentation<C>>,
    pub coaction: CoactionSpec<C>,
    pub section: Arc<FilteredMap<C>>,
    pub section_inv: Arc<FilteredMap<C>>,
    /// Rank of the coefficient ring over ℚ(q) (1 for ℚ(q), `1 + dim M` for `k_M`).
    pub coeff_dim: usize,
}

impl<C: Coeff> CleftObject<C> {
    pub fn side(&self) -> Side {
        self.coaction.side
    }

    /// `ρ∘φ = (id ⊗ φ)∘Δ` (left) or `(φ ⊗ id)∘Δ` (right) on the listed monomials.
    pub fn colinearity_check(&self, monos: &[Mono]) -> CheckReport {
        let hspec = CoactionSpec::hopf(self.hopf.clone());
        let mut rep = CheckReport::default();
        let d = self.alg.datum().clone();
        for m in monos {
            let Ok(img) = self.section.eval_mono(m) else {
                rep.record("colinearity", || format!("{m:?}"), Some("section undefined".into()));
                continue;
            };
            let lhs = coproduct(&img, &self.coaction);
            let mut rhs = crate::freealg::TensorElement::zero(2);
            for (legs, c) in coproduct_mono(m, &hspec).iter() {
                let (l, r) = match self.side() {
                    Side::Left => (Element::from_mono(legs[0].clone()), self.alg.nf_mono(&legs[1].word, &legs[1].grp)),
                    _ => (self.alg.nf_mono(&legs[0].word, &legs[0].grp), Element::from_mono(legs[1].clone())),
                };
                rhs.add_product(c, &[&l, &r]);
            }
            let diff = lhs.sub(&rhs);
            rep.record(
                "colinearity",
                || Element::<C>::from_mono(m.clone()).fmt_with(&d),
                (!diff.is_zero()).then(|| diff.fmt_with(&d)),
            );
        }
        rep
    }

    /// `φ * φ⁻¹ = uε = φ⁻¹ * φ` on the listed monomials.
    pub fn invertibility_check(&self, monos: &[Mono]) -> Result<CheckReport, CleftError> {
        let mut rep = check_convolution_identity(&self.section, &self.section_inv, monos, "section*inverse")?;
        rep.merge(check_convolution_identity(&self.section_inv, &self.section, monos, "inverse*section")?);
        Ok(rep)
    }

    /// `ε_A∘φ = ε` and `ε_A` kills every defining relation, where
    /// `ε_A(c x_w ḡ) = body(c) δ_{w,∅}`.
    pub fn augmentation_check(&self, monos: &[Mono]) -> Result<CheckReport, CleftError> {
        let d = self.alg.datum().clone();
        let eps_a = |e: &Element<C>| e.iter().filter(|(m, _)| m.word.is_empty()).fold(Scalar::zero(), |acc, (_, c)| acc.add(&c.body()));
        let mut rep = CheckReport::default();
        for r in self.alg.relations() {
            let v = eps_a(r);
            rep.record("augmentation-relation", || r.fmt_with(&d), (!v.is_zero()).then(|| v.to_string()));
        }
        for m in monos {
            let v = eps_a(&self.section.eval_mono(m)?).sub(&counit_mono::<C>(m).body());
            rep.record("augmented-section", || format!("{m:?}"), (!v.is_zero()).then(|| v.to_string()));
        }
        Ok(rep)
    }
}

/// The identity-on-normal-monomials section `hopf → alg` for a left
/// (`H ⊗ A`) or right (`A ⊗ H`) coaction.
pub fn canonical_section<C: Coeff>(hopf: Arc<Presentation<C>>, alg: Arc<Presentation<C>>, side: Side, coeff_dim: usize) -> CleftObject<C> {
    let coaction = match side {
        Side::Right => CoactionSpec::right_coaction(alg.clone(), hopf.clone()),
        _ => CoactionSpec::left_coaction(hopf.clone(), alg.clone()),
    };
    let section = Arc::new(FilteredMap::transport(hopf.clone(), alg.clone()));
    let section_inv = Arc::new(conv_inverse(&section));
    CleftObject { hopf, alg, coaction, section, section_inv, coeff_dim }
}

/// Canonical section together with its colinearity and invertibility
/// checks on normal monomials of degree ≤ `max_len`.
pub fn verified_section<C: Coeff>(
    hopf: Arc<Presentation<C>>,
    alg: Arc<Presentation<C>>,
    side: Side,
    coeff_dim: usize,
    max_len: usize,
) -> Result<CleftObject<C>, CleftError> {
    let c = canonical_section(hopf, alg, side, coeff_dim);
    let monos = sample_basis(&c.hopf, max_len, &group_samples(c.hopf.rank()));
    let mut rep = c.colinearity_check(&monos);
    rep.merge(c.invertibility_check(&monos)?);
    if !rep.all_pass() {
        return Err(CleftError::Section(rep.failures[0].identity.clone() + ": " + &rep.failures[0].residual));
    }
    Ok(c)
}

// ---------------------------------------------------------------------------
// Coinvariants
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CoinvariantReport {
    pub method: String,
    pub components: usize,
    pub unknowns: usize,
    pub pass: bool,
    pub witness: Option<String>,
}

fn box_elements(m: usize, e: i32) -> Vec<GrpElt> {
    let mut out = vec![GrpElt::zero(m)];
    for r in 0..m {
        let mut next = Vec::new();
        for g in &out {
            for k in -e..=e {
                let mut v = g.as_slice().to_vec();
                v[r] = k;
                next.push(GrpElt::from_slice(&v));
            }
        }
        out = next;
    }
    out
}

/// Decide whether the coinvariants among elements of x-degree ≤ `max_len`
/// are exactly the coefficient ring.  For Γ-graded algebras the equation
/// `ρ(a) = 1 ⊗ a` is solved on every total-degree component `δ` in the box
/// `[-e, e]^m`; otherwise every monomial with group part in that box is
/// projected by `a ↦ Σ φ⁻¹(a₋₁) a₀` (or its right mirror), whose image spans
/// the coinvariants, and each projection must be a scalar.
pub fn coinvariants_check<C: Coeff>(c: &CleftObject<C>, max_len: usize, e: i32) -> Result<CoinvariantReport, CleftError> {
    let a = &c.alg;
    let d = a.datum().clone();
    let m = d.rank();
    let words = a.basis(max_len);
    let cd = c.coeff_dim;
    let unit = Mono::unit(m);
    let trivial_leg = |mono: Mono| match c.side() {
        Side::Left => vec![unit.clone(), mono],
        _ => vec![mono, unit.clone()],
    };
    if a.is_graded() {
        let mut total_unknowns = 0;
        let deltas = box_elements(m, e);
        for delta in &deltas {
            let monos: Vec<Mono> = words
                .iter()
                .map(|w| Mono { word: w.word.clone(), grp: delta.sub(&d.word_degree(&w.word)) })
                .collect();
            let ncols = monos.len() * cd;
            total_unknowns += ncols;
            let mut eqs: HashMap<(Vec<Mono>, usize), SparseVec> = HashMap::new();
            for (ui, mono) in monos.iter().enumerate() {
                for k in 0..cd {
                    let el = Element::term(C::basis(k), &mono.word, mono.grp.clone());
                    let mut img = coproduct(&el, &c.coaction);
                    img.add_term(trivial_leg(mono.clone()), C::basis(k).neg());
                    for (legs, x) in img.iter() {
                        for (r, v) in x.coords(cd).into_iter().enumerate() {
                            if !v.is_zero() {
                                eqs.entry((legs.clone(), r)).or_default().insert(ui * cd + k, v);
                            }
                        }
                    }
                }
            }
            let kernel = nullspace(eqs.into_values(), ncols);
            let unit_cols: Vec<usize> =
                monos.iter().position(|x| *x == unit).map(|ui| (0..cd).map(|k| ui * cd + k).collect()).unwrap_or_default();
            let expected = if delta.is_zero() { cd } else { 0 };
            let bad = kernel.iter().find(|v| v.keys().any(|col| !unit_cols.contains(col)));
            if kernel.len() != expected || bad.is_some() {
                let witness = bad.or(kernel.first()).map(|v| {
                    let mut el = Element::zero();
                    for (col, x) in v {
                        let mono = &monos[col / cd];
                        el.add_term(mono.clone(), C::basis(col % cd).scale(x));
                    }
                    el.fmt_with(&d)
                });
                return Ok(CoinvariantReport {
                    method: "graded kernel".into(),
                    components: deltas.len(),
                    unknowns: total_unknowns,
                    pass: false,
                    witness: witness.or_else(|| Some(format!("kernel dimension {} at degree {delta}", kernel.len()))),
                });
            }
        }
        return Ok(CoinvariantReport { method: "graded kernel".into(), components: deltas.len(), unknowns: total_unknowns, pass: true, witness: None });
    }
    let groups = box_elements(m, e);
    let mut count = 0;
    for w in &words {
        for g in &groups {
            count += 1;
            let mono = Mono { word: w.word.clone(), grp: g.clone() };
            let img = coproduct(&Element::from_mono(mono.clone()), &c.coaction);
            let mut proj = Element::zero();
            for (legs, x) in img.iter() {
                let part = match c.side() {
                    Side::Left => a.mul(&c.section_inv.eval_mono(&legs[0])?, &Element::from_mono(legs[1].clone())),
                    _ => a.mul(&Element::from_mono(legs[0].clone()), &c.section_inv.eval_mono(&legs[1])?),
                };
                proj.add_assign(&part.scale(x));
            }
            if proj.as_scalar().is_none() {
                return Ok(CoinvariantReport {
                    method: "projection".into(),
                    components: 1,
                    unknowns: count,
                    pass: false,
                    witness: Some(format!("{} ↦ {}", Element::<C>::from_mono(mono).fmt_with(&d), proj.fmt_with(&d))),
                });
            }
        }
    }
    Ok(CoinvariantReport { method: "projection".into(), components: 1, unknowns: count, pass: true, witness: None })
}

// ---------------------------------------------------------------------------
// Cocycles from sections
// ---------------------------------------------------------------------------

/// The 2-cocycle of a cleft object and its convolution inverse:
/// right `σ(a,b) = Σ φ(a₁)φ(b₁)φ⁻¹(a₂b₂)`, left `τ(a,b) = Σ φ⁻¹(a₁b₁)φ(a₂)φ(b₂)`.
pub struct SectionCocycle<C: Coeff> {
    pub cleft: Arc<CleftObject<C>>,
    pub side: CocycleSide,
    hspec: CoactionSpec<C>,
    memo: RwLock<HashMap<(Mono, Mono), C>>,
    memo_inv: RwLock<HashMap<(Mono, Mono), C>>,
}

impl<C: Coeff> SectionCocycle<C> {
    pub fn new(cleft: Arc<CleftObject<C>>, side: CocycleSide) -> Self {
        let hspec = CoactionSpec::hopf(cleft.hopf.clone());
        SectionCocycle { cleft, side, hspec, memo: RwLock::new(HashMap::new()), memo_inv: RwLock::new(HashMap::new()) }
    }

    fn scalar(&self, e: Element<C>) -> Result<C, CleftError> {
        e.as_scalar().ok_or_else(|| CleftError::Hopf(HopfError::NotScalar(e.fmt_with(self.cleft.alg.datum()))))
    }

    fn compute(&self, a: &Mono, b: &Mono, inverse: bool) -> Result<C, CleftError> {
        let h = &self.cleft.hopf;
        let alg = &self.cleft.alg;
        let phi = &self.cleft.section;
        let phi_inv = &self.cleft.section_inv;
        let da = coproduct_mono(a, &self.hspec);
        let db = coproduct_mono(b, &self.hspec);
        let mut acc = Element::zero();
        for (la, ca) in da.iter() {
            for (lb, cb) in db.iter() {
                let coef = ca.mul(cb);
                let term = match (self.side, inverse) {
                    (CocycleSide::Right, false) => {
                        let x = alg.mul(&phi.eval_mono(&la[0])?, &phi.eval_mono(&lb[0])?);
                        alg.mul(&x, &phi_inv.eval(&h.mul_mono(&la[1], &lb[1]))?)
                    }
                    (CocycleSide::Right, true) => {
                        let x = alg.mul(&phi.eval(&h.mul_mono(&la[0], &lb[0]))?, &phi_inv.eval_mono(&lb[1])?);
                        alg.mul(&x, &phi_inv.eval_mono(&la[1])?)
                    }
                    (CocycleSide::Left, false) => {
                        let x = alg.mul(&phi_inv.eval(&h.mul_mono(&la[0], &lb[0]))?, &phi.eval_mono(&la[1])?);
                        alg.mul(&x, &phi.eval_mono(&lb[1])?)
                    }
                    (CocycleSide::Left, true) => {
                        let x = alg.mul(&phi_inv.eval_mono(&lb[0])?, &phi_inv.eval_mono(&la[0])?);
                        alg.mul(&x, &phi.eval(&h.mul_mono(&la[1], &lb[1]))?)
                    }
                };
                acc.add_assign(&term.scale(&coef));
            }
        }
        self.scalar(acc)
    }

    pub fn eval(&self, a: &Mono, b: &Mono) -> Result<C, CleftError> {
        let key = (a.clone(), b.clone());
        if let Some(v) = self.memo.read().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = self.compute(a, b, false)?;
        self.memo.write().unwrap().insert(key, v.clone());
        Ok(v)
    }

    pub fn eval_inv(&self, a: &Mono, b: &Mono) -> Result<C, CleftError> {
        let key = (a.clone(), b.clone());
        if let Some(v) = self.memo_inv.read().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = self.compute(a, b, true)?;
        self.memo_inv.write().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// Bilinear extension to elements of the Hopf algebra.
    pub fn eval_elements(&self, a: &Element<C>, b: &Element<C>) -> Result<C, CleftError> {
        let mut acc = C::zero();
        for (ma, ca) in a.iter() {
            for (mb, cb) in b.iter() {
                acc = acc.add(&self.eval(ma, mb)?.mul(ca).mul(cb));
            }
        }
        Ok(acc)
    }

    /// The cocycle as a plain closure, for the generic identity checkers.
    pub fn as_rule(&self) -> impl Fn(&Mono, &Mono) -> Result<C, HopfError> + '_ {
        move |a, b| {
            self.eval(a, b).map_err(|e| match e {
                CleftError::Hopf(h) => h,
                other => HopfError::NotScalar(other.to_string()),
            })
        }
    }
}

/// `σ` evaluated on a pair, whichever side the cleft object uses.
pub fn extract_cocycle<C: Coeff>(c: &Arc<CleftObject<C>>, side: CocycleSide, a: &Element<C>, b: &Element<C>) -> Result<C, CleftError> {
    SectionCocycle::new(c.clone(), side).eval_elements(a, b)
}

/// `a · b = Σ σ(a₁,b₁) a₂b₂ σ⁻¹(a₃,b₃)` in the presentation `h`, with `σ`
/// and `σ⁻¹` supplied as monomial rules.
pub fn deformed_product<C: Coeff>(
    h: &Arc<Presentation<C>>,
    sigma: &dyn Fn(&Mono, &Mono) -> Result<C, CleftError>,
    sigma_inv: &dyn Fn(&Mono, &Mono) -> Result<C, CleftError>,
    a: &Element<C>,
    b: &Element<C>,
) -> Result<Element<C>, CleftError> {
    let spec = CoactionSpec::hopf(h.clone());
    let ta = coproduct2(a, &spec, &spec);
    let tb = coproduct2(b, &spec, &spec);
    let mut acc = Element::zero();
    for (la, ca) in ta.iter() {
        for (lb, cb) in tb.iter() {
            let s = sigma(&la[0], &lb[0])?;
            if s.is_zero() {
                continue;
            }
            let si = sigma_inv(&la[2], &lb[2])?;
            if si.is_zero() {
                continue;
            }
            let coef = ca.mul(cb).mul(&s).mul(&si);
            acc.add_assign(&h.mul_mono(&la[1], &lb[1]).scale(&coef));
        }
    }
    Ok(acc)
}

/// Compare `(H^λ)^σ` with `H⁰` and `(H⁰)^{σ⁻¹}` with `H^λ` on normal-basis
/// pairs of total x-degree ≤ `max_len` (group parts `0` and `e_1`), where
/// `σ` is the right cocycle of `A(λ)` with its section `H^λ → A(λ)`.
pub fn compare_deformation<C: Coeff>(
    h0: &Arc<Presentation<C>>,
    hl: &Arc<Presentation<C>>,
    al: &Arc<Presentation<C>>,
    max_len: usize,
    coeff_dim: usize,
) -> Result<CheckReport, CleftError> {
    let cleft = Arc::new(canonical_section(hl.clone(), al.clone(), Side::Right, coeff_dim));
    let sc = SectionCocycle::new(cleft, CocycleSide::Right);
    let sigma = |a: &Mono, b: &Mono| sc.eval(a, b);
    let sigma_inv = |a: &Mono, b: &Mono| sc.eval_inv(a, b);
    let m = h0.rank();
    let samples: Vec<GrpElt> = group_samples(m).into_iter().take(2).collect();
    let basis = sample_basis(h0, max_len, &samples);
    let d = h0.datum().clone();
    let mut rep = CheckReport::default();
    for a in &basis {
        for b in &basis {
            if a.degree() + b.degree() > max_len {
                continue;
            }
            let ea = Element::from_mono(a.clone());
            let eb = Element::from_mono(b.clone());
            let label = || format!("{} · {}", ea.fmt_with(&d), eb.fmt_with(&d));
            let deformed = deformed_product(hl, &sigma, &sigma_inv, &ea, &eb)?;
            let diff = deformed.sub(&h0.mul_mono(a, b));
            rep.record("Hλ deformed by σ = H0", label, (!diff.is_zero()).then(|| diff.fmt_with(&d)));
            let back = deformed_product(h0, &sigma_inv, &sigma, &ea, &eb)?;
            let diff = back.sub(&hl.mul_mono(a, b));
            rep.record("H0 deformed by σ⁻¹ = Hλ", label, (!diff.is_zero()).then(|| diff.fmt_with(&d)));
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// NB elements
// ---------------------------------------------------------------------------

/// Replace the NB element `x̃_i` by the unique normalized one
/// `x̂_i = x̃_i + (q_ii − 1)⁻¹ c g̃_i`, where `g̃_i x̃_i − q_ii x̃_i g̃_i = c g̃_i²`,
/// and verify `g̃ x̂_i = χ_i(g) x̂_i g̃` for `g = ±e_r`.
pub fn normalize_nb<C: Coeff>(a: &Presentation<C>, i: usize, x_tilde: &Element<C>) -> Result<Element<C>, CleftError> {
    let d = a.datum().clone();
    let qii = d.q(i, i).clone();
    let denom = qii.sub(&Scalar::one());
    if denom.is_zero() {
        return Err(CleftError::TrivialDiagonal(d.labels[i].clone()));
    }
    let gi = Element::group(d.g[i].clone());
    let qc = C::from_scalar(&qii);
    let y = a.mul(&gi, x_tilde).sub(&a.mul(x_tilde, &gi).scale(&qc));
    let gi2 = a.mul(&gi, &gi);
    let gi2_inv = crate::hopf::invert_group_term(a, &gi2)?;
    let cval = a.mul(&y, &gi2_inv);
    let cval = cval.as_scalar().ok_or_else(|| CleftError::Normalization(cval.fmt_with(&d)))?;
    let k = cval.mul(&C::from_scalar(&denom.inv().expect("nonzero")));
    let x_hat = x_tilde.add(&gi.scale(&k));
    for r in 0..d.rank() {
        for g in [GrpElt::unit(d.rank(), r), GrpElt::unit(d.rank(), r).neg()] {
            let ge = Element::group(g.clone());
            let lhs = a.mul(&ge, &x_hat);
            let rhs = a.mul(&x_hat, &ge).scale(&C::from_scalar(&d.chi_at(i, &g)));
            if lhs != rhs {
                return Err(CleftError::Normalization(format!("commutation with {g} fails")));
            }
        }
    }
    Ok(x_hat)
}

// ---------------------------------------------------------------------------
// Pairs (σ, μ) and their equivalence
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct PairSigmaMu {
    pub sigma: BilinearCocycle,
    pub mu: ParamMap<Scalar>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PairEquivalence {
    /// Values `η(e_r)` of a witness cochain on the generators together with
    /// its quadratic part (the cochain itself).
    Equivalent(OneCochain),
    Inequivalent(String),
}

impl PairEquivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, PairEquivalence::Equivalent(_))
    }
}

/// Check `σ′ = σ·∂η` and `μ′_ij = μ_ij η(g_i) η(g_j)` for a given `η`.
pub fn verify_pair_witness(d: &YDDatum, p: &PairSigmaMu, p2: &PairSigmaMu, eta: &OneCochain) -> bool {
    let cob = crate::abgroup::coboundary(eta);
    if p.sigma.mul(&cob) != p2.sigma {
        return false;
    }
    for (i, j) in theta(d) {
        let mu = p.mu.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero);
        let mu2 = p2.mu.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero);
        if mu.mul(&eta.eval(&d.g[i])).mul(&eta.eval(&d.g[j])) != mu2 {
            return false;
        }
    }
    true
}

/// Decide `(σ, μ) ~ (σ′, μ′)`: find `η` with `σ′ = σ(∂η)` and
/// `μ′_ij = μ_ij η(g_i)η(g_j)`, or report why none exists.
pub fn pair_equivalent(d: &YDDatum, p: &PairSigmaMu, p2: &PairSigmaMu) -> PairEquivalence {
    let eta0 = match cohomologous(&p.sigma, &p2.sigma) {
        Ok(e) => e,
        Err((i, j)) => {
            let a = skew_invariant(&p.sigma).0.get(&(i, j)).cloned().unwrap_or_else(Scalar::one);
            let b = skew_invariant(&p2.sigma).0.get(&(i, j)).cloned().unwrap_or_else(Scalar::one);
            return PairEquivalence::Inequivalent(format!("skew invariants differ at ({i}, {j}): {a} vs {b}"));
        }
    };
    let m = d.rank();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (i, j) in theta(d) {
        let mu = p.mu.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero);
        let mu2 = p2.mu.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero);
        match (mu.is_zero(), mu2.is_zero()) {
            (true, true) => continue,
            (true, false) | (false, true) => {
                return PairEquivalence::Inequivalent(format!(
                    "μ vanishes on ({}, {}) for exactly one of the pairs",
                    d.labels[i], d.labels[j]
                ))
            }
            _ => {}
        }
        let base = mu.mul(&eta0.eval(&d.g[i])).mul(&eta0.eval(&d.g[j]));
        let target = mu2.div(&base).expect("nonzero");
        let row: Vec<i64> = d.g[i].add(&d.g[j]).as_slice().iter().map(|&x| x as i64).collect();
        rows.push(row);
        rhs.push(target);
    }
    match solve_monomial_system(&rows, &rhs, m) {
        MonomialSolve::Solved(w) => {
            let mut eta = eta0;
            for (r, wr) in w.into_iter().enumerate() {
                eta.linear[r] = eta.linear[r].mul(&wr);
            }
            debug_assert!(verify_pair_witness(d, p, p2, &eta));
            PairEquivalence::Equivalent(eta)
        }
        MonomialSolve::Unsolvable(why) => PairEquivalence::Inequivalent(why),
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Orbit {
    pub orbit_id: usize,
    /// Skew invariant `σ(e_j,e_i)/σ(e_i,e_j)` keyed by `"i,j"`.
    pub representative_skew: BTreeMap<String, String>,
    pub representative_mu: BTreeMap<String, String>,
    pub members: Vec<usize>,
    /// For each member, the witness values `η(e_r)` relative to the representative.
    pub witnesses: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Default)]
pub struct ClassifyReport {
    pub orbits: Vec<Orbit>,
}

/// Partition `pairs` into equivalence classes.
pub fn classify(d: &YDDatum, pairs: &[PairSigmaMu]) -> ClassifyReport {
    let mut orbits: Vec<Orbit> = Vec::new();
    let mut reps: Vec<usize> = Vec::new();
    for (k, p) in pairs.iter().enumerate() {
        let mut placed = false;
        for (o, &r) in orbits.iter_mut().zip(&reps) {
            if let PairEquivalence::Equivalent(eta) = pair_equivalent(d, &pairs[r], p) {
                o.members.push(k);
                o.witnesses.push(eta.linear.iter().map(|x| x.to_string()).collect());
                placed = true;
                break;
            }
        }
        if !placed {
            let skew = skew_invariant(&p.sigma).0.into_iter().map(|((i, j), v)| (format!("{i},{j}"), v.to_string())).collect();
            let mu = p
                .mu
                .iter()
                .map(|(&(i, j), v)| (format!("{},{}", d.labels[i], d.labels[j]), v.to_string()))
                .collect();
            orbits.push(Orbit {
                orbit_id: orbits.len(),
                representative_skew: skew,
                representative_mu: mu,
                members: vec![k],
                witnesses: vec![vec![Scalar::one().to_string(); d.rank()]],
            });
            reps.push(k);
        }
    }
    ClassifyReport { orbits }
}

// ---------------------------------------------------------------------------
// Augmented theory over k_M
// ---------------------------------------------------------------------------

/// Pair `(s, m)` with `s` an additive 2-cocycle and `m` supported on Ξ.
#[derive(Clone, Debug, PartialEq)]
pub struct AugPairSM {
    pub s: AdditiveCocycle,
    pub m: ParamMap<MVec>,
}

impl AugPairSM {
    pub fn zero(rank: usize, dim: usize) -> Self {
        AugPairSM { s: AdditiveCocycle::zero(rank, dim), m: ParamMap::new() }
    }
}

/// Membership: `m ⊆ Ξ`, and `s(g,g_i)+s(g,g_j) = s(g_i,g)+s(g_j,g)` for all
/// `g` whenever `λ_ij ≠ 0` or `m_ij ≠ 0`.
pub fn check_membership(d: &YDDatum, lambda: &ParamMap<Scalar>, ap: &AugPairSM) -> Result<(), CleftError> {
    let xi_set = xi(d);
    for (&(i, j), v) in &ap.m {
        if !v.is_zero() && !xi_set.contains(&(i, j)) {
            return Err(CleftError::Membership(d.labels[i].clone(), d.labels[j].clone()));
        }
    }
    let m = d.rank();
    for &(i, j) in &xi_set {
        let lam = lambda.get(&(i, j)).is_some_and(|x| !x.is_zero());
        let mm = ap.m.get(&(i, j)).is_some_and(|x| !x.is_zero());
        if !(lam || mm) {
            continue;
        }
        let gij = d.g[i].add(&d.g[j]);
        for r in 0..m {
            let e = GrpElt::unit(m, r);
            if add_cocycle_eval(&ap.s, &e, &gij) != add_cocycle_eval(&ap.s, &gij, &e) {
                return Err(CleftError::Membership(d.labels[i].clone(), d.labels[j].clone()));
            }
        }
    }
    Ok(())
}

pub fn km_twist(s: &AdditiveCocycle) -> TwistFn<KM> {
    let s = s.clone();
    Arc::new(move |a: &GrpElt, b: &GrpElt| KM::new(Scalar::one(), add_cocycle_eval(&s, a, b)))
}

/// `H^λ` over `k_M` (coefficients lifted from ℚ(q)).
pub fn hlambda_over_km(d: &Arc<YDDatum>, lambda: &ParamMap<Scalar>, block_relations: &[Element<Scalar>]) -> Result<Presentation<KM>, CleftError> {
    let lam: ParamMap<KM> = lambda.iter().map(|(k, v)| (*k, KM::from_scalar(v))).collect();
    let tails = flavor_tails(d, Flavor::Hlambda, None, &lam, &ParamMap::new());
    let blocks: Vec<Element<KM>> = block_relations.iter().map(|e| e.map(KM::from_scalar)).collect();
    Ok(assemble(d.clone(), Flavor::Hlambda, None, &tails, &blocks)?)
}

/// `A^λ(1 + s, λ + m)` over `k_M` with its canonical left section.
pub fn aug_pair_to_extension(
    d: &Arc<YDDatum>,
    lambda: &ParamMap<Scalar>,
    ap: &AugPairSM,
    dim_m: usize,
    block_relations: &[Element<Scalar>],
) -> Result<CleftObject<KM>, CleftError> {
    check_membership(d, lambda, ap)?;
    let hopf = Arc::new(hlambda_over_km(d, lambda, block_relations)?);
    let lam: ParamMap<KM> = lambda.iter().map(|(k, v)| (*k, KM::from_scalar(v))).collect();
    let mut mu: ParamMap<KM> = lam.clone();
    for (k, v) in &ap.m {
        let e = mu.entry(*k).or_insert_with(KM::zero);
        *e = e.add(&KM::from_nil(v.clone()));
    }
    let twist = km_twist(&ap.s);
    let tails = flavor_tails(d, Flavor::Alambdasigmamu, Some(&twist), &lam, &mu);
    let blocks: Vec<Element<KM>> = block_relations.iter().map(|e| e.map(KM::from_scalar)).collect();
    let alg = Arc::new(assemble(d.clone(), Flavor::Alambdasigmamu, Some(twist), &tails, &blocks)?);
    Ok(canonical_section(hopf, alg, Side::Left, dim_m + 1))
}

/// Check `s′ = s + ∂t` and `m′_ij = m_ij − λ_ij(t(g_i) + t(g_j))` on Ξ.
pub fn verify_aug_witness(d: &YDDatum, lambda: &ParamMap<Scalar>, ap: &AugPairSM, ap2: &AugPairSM, t: &AdditiveCochain) -> bool {
    if ap.s.add(&add_coboundary(t)) != ap2.s {
        return false;
    }
    for (i, j) in xi(d) {
        let lam = lambda.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero);
        let m = ap.m.get(&(i, j)).cloned().unwrap_or_default();
        let m2 = ap2.m.get(&(i, j)).cloned().unwrap_or_default();
        let shift = t.eval(&d.g[i]).add(&t.eval(&d.g[j])).scale(&lam);
        if m.sub(&shift) != m2 {
            return false;
        }
    }
    true
}

/// Decide `(s, m) ~_ε (s′, m′)`, solving for the linear part of `t` over M.
pub fn aug_equivalent(d: &YDDatum, lambda: &ParamMap<Scalar>, ap: &AugPairSM, ap2: &AugPairSM, dim_m: usize) -> Option<AdditiveCochain> {
    let mut t = add_cohomologous(&ap.s, &ap2.s).ok()?;
    let rank = d.rank();
    let pairs = xi(d);
    for k in 0..dim_m {
        let mut rows = Vec::new();
        for &(i, j) in &pairs {
            let lam = lambda.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero);
            let m = ap.m.get(&(i, j)).cloned().unwrap_or_default().get(k);
            let m2 = ap2.m.get(&(i, j)).cloned().unwrap_or_default().get(k);
            let known = t.eval(&d.g[i]).add(&t.eval(&d.g[j])).get(k);
            // λ (Σ_r (g_i + g_j)_r w_r) = m − m′ − λ·known
            let mut row = SparseVec::new();
            for (r, &e) in d.g[i].add(&d.g[j]).as_slice().iter().enumerate() {
                if e != 0 && !lam.is_zero() {
                    row.insert(r, lam.mul(&Scalar::from_int(e as i64)));
                }
            }
            rows.push((row, m.sub(&m2).sub(&lam.mul(&known))));
        }
        let w = solve(rows, rank)?;
        for (r, x) in w.into_iter().enumerate() {
            let mut v = t.linear[r].0.clone();
            if v.len() <= k {
                v.resize(k + 1, Scalar::zero());
            }
            v[k] = v[k].add(&x);
            t.linear[r] = MVec(v);
        }
    }
    verify_aug_witness(d, lambda, ap, ap2, &t).then_some(t)
}

/// Explicit witness `t` with `(s, m) ~_ε (0, 0)` when every pair of Ξ has
/// the form `(i, −i)` with `g_i = g_{−i} = e_r` and `λ ≠ 0`:
/// `t(e_r) = m/(2λ)` and the quadratic part of `t` equal to the (symmetric) `s`.
pub fn whitehead_reduce(d: &YDDatum, lambda: &ParamMap<Scalar>, ap: &AugPairSM, dim_m: usize) -> Result<AdditiveCochain, CleftError> {
    check_membership(d, lambda, ap)?;
    if !ap.s.is_symmetric() {
        return Err(CleftError::Hypothesis("s is not symmetric".into()));
    }
    let rank = d.rank();
    let mut t = AdditiveCochain::zero(rank, dim_m);
    for i in 0..rank {
        for j in 0..rank {
            t.symmetric[i][j] = ap.s.matrix[i][j].clone();
        }
    }
    let mut assigned = vec![false; rank];
    for (i, j) in xi(d) {
        let lam = lambda.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero);
        if lam.is_zero() {
            return Err(CleftError::Hypothesis(format!("λ vanishes on ({}, {})", d.labels[i], d.labels[j])));
        }
        let g = &d.g[i];
        let r = (0..rank).find(|&r| *g == GrpElt::unit(rank, r));
        let Some(r) = r.filter(|_| d.g[j] == *g) else {
            return Err(CleftError::Hypothesis(format!("pair ({}, {}) is not of the form (i, −i)", d.labels[i], d.labels[j])));
        };
        if assigned[r] {
            return Err(CleftError::Hypothesis(format!("generator {r} carries two pairs")));
        }
        assigned[r] = true;
        let m = ap.m.get(&(i, j)).cloned().unwrap_or_default();
        t.linear[r] = m.scale(&lam.mul(&Scalar::from_int(2)).inv().expect("nonzero"));
    }
    let zero = AugPairSM::zero(rank, dim_m);
    if !verify_aug_witness(d, lambda, ap, &zero, &t) {
        return Err(CleftError::Hypothesis("witness does not verify".into()));
    }
    Ok(t)
}

/// Whether `σ` keeps `μ` inside `Ξ(σ)`.
pub fn mu_supported(d: &YDDatum, sigma: &BilinearCocycle, mu: &ParamMap<Scalar>) -> bool {
    let allowed = xi_sigma(d, sigma);
    mu.iter().all(|(k, v)| v.is_zero() || allowed.contains(k))
}

/// Round trip between augmented central extensions and augmented cocycles:
/// the left cocycle `τ` of `c` satisfies `body(τ) = εε`, `t = τ − εε` is a
/// Hochschild cocycle, `τ` satisfies the left cocycle identity, and
/// `φ(a)φ(b) = φ(Σ a₁b₁ τ(a₂,b₂))`, so the extension rebuilt from `τ` is `c`.
pub fn augmented_round_trip(
    c: &Arc<CleftObject<KM>>,
    max_len: usize,
    pair_samples: &[GrpElt],
    triple_samples: &[GrpElt],
) -> Result<CheckReport, CleftError> {
    let h = c.hopf.clone();
    let d = h.datum().clone();
    let sc = SectionCocycle::new(c.clone(), CocycleSide::Left);
    let hspec = CoactionSpec::hopf(h.clone());
    let pairs = sample_basis(&h, max_len, pair_samples);
    let triples = sample_basis(&h, max_len, triple_samples);
    let mut rep = CheckReport::default();
    for a in &pairs {
        for b in &pairs {
            if a.degree() + b.degree() > max_len {
                continue;
            }
            let label = || format!("({}, {})", Element::<KM>::from_mono(a.clone()).fmt_with(&d), Element::<KM>::from_mono(b.clone()).fmt_with(&d));
            let tau = sc.eval(a, b)?;
            let eps = counit_mono::<KM>(a).mul(&counit_mono::<KM>(b));
            let bad = tau.body() != eps.body();
            rep.record("augmented-cocycle", label, bad.then(|| tau.to_string()));
            let mut rebuilt = Element::zero();
            for (la, ca) in coproduct_mono(a, &hspec).iter() {
                for (lb, cb) in coproduct_mono(b, &hspec).iter() {
                    let t = sc.eval(&la[1], &lb[1])?;
                    if t.is_zero() {
                        continue;
                    }
                    rebuilt.add_assign(&h.mul_mono(&la[0], &lb[0]).scale(&ca.mul(cb).mul(&t)));
                }
            }
            let lhs = c.alg.mul(&c.section.eval_mono(a)?, &c.section.eval_mono(b)?);
            let diff = lhs.sub(&c.section.eval(&rebuilt)?);
            rep.record("extension-from-cocycle", label, (!diff.is_zero()).then(|| diff.fmt_with(&d)));
        }
    }
    let rule = sc.as_rule();
    let t = |a: &Mono, b: &Mono| -> Result<KM, HopfError> { Ok(rule(a, b)?.sub(&counit_mono::<KM>(a).mul(&counit_mono::<KM>(b)))) };
    rep.merge(crate::hopf::hochschild_check(&h, &t, &triples, max_len)?);
    rep.merge(crate::hopf::cocycle_identity_check(&h, &rule, CocycleSide::Left, &triples, max_len)?);
    Ok(rep)
}

/// For `λ = 0` and `m = 0` the left cocycle of `A⁰(1 + s, 0)` is
/// `τ(x_u ḡ, x_v h̄) = δ_{u,∅} δ_{v,∅} (1 + s(g, h))`.
pub fn pullback_cocycle_check(c: &Arc<CleftObject<KM>>, s: &AdditiveCocycle, max_len: usize, samples: &[GrpElt]) -> Result<CheckReport, CleftError> {
    let h = c.hopf.clone();
    let d = h.datum().clone();
    let sc = SectionCocycle::new(c.clone(), CocycleSide::Left);
    let monos = sample_basis(&h, max_len, samples);
    let mut rep = CheckReport::default();
    for a in &monos {
        for b in &monos {
            if a.degree() + b.degree() > max_len {
                continue;
            }
            let expected = if a.word.is_empty() && b.word.is_empty() {
                KM::new(Scalar::one(), add_cocycle_eval(s, &a.grp, &b.grp))
            } else {
                KM::zero()
            };
            let got = sc.eval(a, b)?;
            let diff = got.sub(&expected);
            rep.record(
                "pullback-cocycle",
                || format!("({}, {})", Element::<KM>::from_mono(a.clone()).fmt_with(&d), Element::<KM>::from_mono(b.clone()).fmt_with(&d)),
                (!diff.is_zero()).then(|| got.to_string()),
            );
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::{Character, FreeAbGroup};
    use crate::datum::LetterSpec;
    use crate::freealg::{build_presentation, Params};

    fn sl2_datum() -> Arc<YDDatum> {
        let g = FreeAbGroup::new(1);
        let letters = vec![
            LetterSpec { label: "-1".into(), block: 0, g: GrpElt::unit(1, 0), chi: Character::new(vec![Scalar::q_pow(-2)]) },
            LetterSpec { label: "1".into(), block: 1, g: GrpElt::unit(1, 0), chi: Character::new(vec![Scalar::q_pow(2)]) },
        ];
        Arc::new(YDDatum::new(g, letters, None).unwrap())
    }

    fn lam() -> Params {
        let mut p = Params::default();
        p.lambda.insert((1, 0), Scalar::q().sub(&Scalar::q_pow(-1)).inv().unwrap());
        p
    }

    #[test]
    fn section_of_a_lambda() {
        let d = sl2_datum();
        let h0 = Arc::new(build_presentation(d.clone(), Flavor::H0, &Params::default(), &[]).unwrap());
        let al = Arc::new(build_presentation(d.clone(), Flavor::Alambda, &lam(), &[]).unwrap());
        let c = verified_section(h0, al, Side::Left, 1, 3).unwrap();
        let rep = coinvariants_check(&c, 3, 2).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn deformation_sl2_small() {
        let d = sl2_datum();
        let h0 = Arc::new(build_presentation(d.clone(), Flavor::H0, &Params::default(), &[]).unwrap());
        let hl = Arc::new(build_presentation(d.clone(), Flavor::Hlambda, &lam(), &[]).unwrap());
        let al = Arc::new(build_presentation(d.clone(), Flavor::Alambda, &lam(), &[]).unwrap());
        let rep = compare_deformation(&h0, &hl, &al, 2, 1).unwrap();
        assert!(rep.all_pass(), "{:?}", rep.failures);
    }

    #[test]
    fn nb_normalization_recovers_generator() {
        let d = sl2_datum();
        let al = build_presentation(d.clone(), Flavor::Alambda, &lam(), &[]).unwrap();
        let x = Element::letter(1, 1);
        let perturbed = x.add(&Element::group(d.g[1].clone()));
        assert_eq!(normalize_nb(&al, 1, &perturbed).unwrap(), x);
        assert_eq!(normalize_nb(&al, 1, &x).unwrap(), x);
    }

    #[test]
    fn square_classes_decide_sl2_pairs() {
        let d = sl2_datum();
        let pair = |mu: Scalar| PairSigmaMu { sigma: BilinearCocycle::trivial(1), mu: [((1, 0), mu)].into_iter().collect() };
        assert!(pair_equivalent(&d, &pair(Scalar::one()), &pair(Scalar::q_pow(2))).is_equivalent());
        assert!(!pair_equivalent(&d, &pair(Scalar::one()), &pair(Scalar::q())).is_equivalent());
        let zero = PairSigmaMu { sigma: BilinearCocycle::trivial(1), mu: ParamMap::new() };
        assert!(!pair_equivalent(&d, &zero, &pair(Scalar::one())).is_equivalent());
    }
}
