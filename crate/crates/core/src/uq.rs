//! Quantized enveloping algebras as pointed Hopf algebras: the Borel part
//! `B_q`, `U_q` and its graded version `(U_q)⁰`, the comodule algebras
//! `A_q(u, μ)`, and drivers for the classification results.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{AdditiveCochain, AdditiveCocycle, BilinearCocycle, Character, FreeAbGroup, GrpElt, MVec};
use crate::cleft::{classify, whitehead_reduce, AugPairSM, ClassifyReport, CleftError, PairSigmaMu};
use crate::datum::{cartan_checks, theta, xi, xi_sigma, ConditionReport, DatumError, Gcm, LetterSpec, ParamMap, YDDatum};
use crate::freealg::{assemble, flavor_tails, serre_relations, Element, Flavor, Letter, Mono, Presentation, PresentationError};
use crate::hopf::{coproduct, group_samples, sample_basis, CheckReport, CoactionSpec};
use crate::linalg::{rank, SparseVec};
use crate::scalars::{gauss_binomial, parse_rat, Coeff, Rat, Scalar};

#[derive(Debug, Error)]
pub enum UqError {
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Cleft(#[from] CleftError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("condition {0} fails: {1}")]
    Condition(String, String),
    #[error("Serre rules are not confluent up to length {0} and completion failed")]
    NotConfluent(usize),
}

/// Explicit realization data: `pairing[i][r] = α_i(h_r)` and
/// `coroots[i]` = coordinates of `d_i α_i^∨` in the basis `h_1..h_m`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Lattice {
    pub pairing: Vec<Vec<i64>>,
    pub coroots: Vec<Vec<i64>>,
}

/// JSON input `{cartan_matrix, symmetrizer?, lattice?, q}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct UqInput {
    pub cartan_matrix: Vec<Vec<i64>>,
    #[serde(default)]
    pub symmetrizer: Option<Vec<i64>>,
    #[serde(default)]
    pub lattice: Option<Lattice>,
    #[serde(default = "formal")]
    pub q: String,
}

fn formal() -> String {
    "formal".into()
}

impl UqInput {
    pub fn preset(name: &str) -> Option<UqInput> {
        let g = Gcm::preset(name)?;
        Some(UqInput { cartan_matrix: g.a, symmetrizer: Some(g.d), lattice: None, q: formal() })
    }

    pub fn with_q(mut self, q: &str) -> Self {
        self.q = q.into();
        self
    }
}

/// Validated input.
#[derive(Clone, Debug, PartialEq)]
pub struct UqData {
    pub gcm: Gcm,
    pub pairing: Vec<Vec<i64>>,
    pub coroots: Vec<Vec<i64>>,
    /// Rational specialization of `q` used by the condition checks.
    pub q0: Option<Rat>,
    /// Whether the lattice is `⊕ ℤ d_i α_i^∨` (so `g_i = e_i`).
    pub standard_lattice: bool,
}

impl UqData {
    pub fn n(&self) -> usize {
        self.gcm.n()
    }

    pub fn m(&self) -> usize {
        self.pairing.first().map_or(0, Vec::len)
    }

    /// `q_i = q^{d_i}`.
    pub fn q_i(&self, i: usize) -> Scalar {
        Scalar::q_pow(self.gcm.d[i])
    }

    pub fn g(&self, i: usize) -> GrpElt {
        GrpElt::from_slice(&self.coroots[i].iter().map(|&x| x as i32).collect::<Vec<_>>())
    }

    pub fn chi(&self, i: usize) -> Character {
        Character::new(self.pairing[i].iter().map(|&p| Scalar::q_pow(p)).collect())
    }
}

pub fn resolve(u: &UqInput) -> Result<UqData, UqError> {
    let n = u.cartan_matrix.len();
    let d = match &u.symmetrizer {
        Some(d) => d.clone(),
        None => {
            let a = &u.cartan_matrix;
            let symmetric = (0..n).all(|i| (0..n).all(|j| a.get(i).and_then(|r| r.get(j)) == a.get(j).and_then(|r| r.get(i))));
            if !symmetric {
                return Err(UqError::Input("a symmetrizer is required for a non-symmetric Cartan matrix".into()));
            }
            vec![1; n]
        }
    };
    let gcm = Gcm::new(u.cartan_matrix.clone(), d)?;
    let q0 = match u.q.trim() {
        "formal" | "" => None,
        s => Some(parse_rat(s).map_err(|e| UqError::Input(e.to_string()))?),
    };
    let (pairing, coroots, standard_lattice) = match &u.lattice {
        None => {
            if gcm.det() == 0 {
                return Err(UqError::Input("det A = 0 needs an explicit lattice".into()));
            }
            let pairing = (0..n).map(|i| (0..n).map(|r| gcm.d[r] * gcm.a[r][i]).collect()).collect();
            let coroots = (0..n).map(|i| (0..n).map(|r| i64::from(i == r)).collect()).collect();
            (pairing, coroots, true)
        }
        Some(l) => {
            let m = l.pairing.first().map_or(0, Vec::len);
            if l.pairing.len() != n || l.coroots.len() != n || l.pairing.iter().chain(&l.coroots).any(|r| r.len() != m) {
                return Err(UqError::Input("lattice matrices must be n × m".into()));
            }
            let standard = m == n && (0..n).all(|i| (0..n).all(|r| l.coroots[i][r] == i64::from(i == r)));
            (l.pairing.clone(), l.coroots.clone(), standard)
        }
    };
    for i in 0..n {
        for j in 0..n {
            let v: i64 = (0..pairing[i].len()).map(|r| pairing[i][r] * coroots[j][r]).sum();
            if v != gcm.d[j] * gcm.a[j][i] {
                return Err(UqError::Input(format!("α_{}(d_{} α_{}^∨) = {v}, expected d_j a_ji", i + 1, j + 1, j + 1)));
            }
        }
    }
    Ok(UqData { gcm, pairing, coroots, q0, standard_lattice })
}

/// Result of a builder: datum, presentation, parameters and condition checks.
#[derive(Clone, Debug)]
pub struct UqBuild {
    pub datum: Arc<YDDatum>,
    pub presentation: Arc<Presentation<Scalar>>,
    pub lambda: ParamMap<Scalar>,
    pub serre: Vec<Element<Scalar>>,
    pub conditions: ConditionReport,
}

/// Bound on ambiguity lengths for Serre rule sets of the given GCM.
fn overlap_bound(gcm: &Gcm) -> usize {
    let longest = (0..gcm.n())
        .flat_map(|i| (0..gcm.n()).filter(move |&j| j != i).map(move |j| (2 - gcm.a[i][j]) as usize))
        .max()
        .unwrap_or(2)
        .max(2);
    2 * longest - 1
}

fn ensure_confluent(p: &mut Presentation<Scalar>, bound: usize) -> Result<(), UqError> {
    if p.check_overlaps(bound).is_confluent() {
        return Ok(());
    }
    p.complete(bound, 6).map_err(|_| UqError::NotConfluent(bound))?;
    Ok(())
}

fn require_order(rep: &ConditionReport) -> Result<(), UqError> {
    if let Some(e) = rep.entries.iter().find(|e| e.condition == "order" && !e.pass) {
        return Err(UqError::Condition("order".into(), format!("{}: {}", e.subject, e.witness)));
    }
    Ok(())
}

/// One-block datum of `B_q` (letters `1..n`) with Serre relations installed.
pub fn build_borel(u: &UqData) -> Result<UqBuild, UqError> {
    let n = u.n();
    let letters = (0..n)
        .map(|i| LetterSpec { label: format!("{}", i + 1), block: 0, g: u.g(i), chi: u.chi(i) })
        .collect();
    let d = Arc::new(YDDatum::new(FreeAbGroup::new(u.m()), letters, Some(u.gcm.clone()))?);
    let conditions = cartan_checks(&d, &u.gcm, u.q0.as_ref());
    require_order(&conditions)?;
    let serre = serre_relations(&d)?;
    let mut p = assemble(d.clone(), Flavor::H0, None, &BTreeMap::new(), &serre)?;
    ensure_confluent(&mut p, overlap_bound(&u.gcm))?;
    Ok(UqBuild { datum: d, presentation: Arc::new(p), lambda: ParamMap::new(), serre, conditions })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaMode {
    Standard,
    Zero,
}

/// Index of the letter `x_{-i}` (block 0) and `x_i` (block 1).
pub fn minus(i: usize) -> usize {
    i
}

pub fn plus(n: usize, i: usize) -> usize {
    n + i
}

/// Two-block datum of `U_q`: letters `-1..-n` then `1..n`, with
/// `g_{±i} = g_i` and `χ_{-i} = χ_i⁻¹`.
pub fn uq_datum(u: &UqData) -> Result<Arc<YDDatum>, UqError> {
    let n = u.n();
    let mut letters = Vec::new();
    for i in 0..n {
        letters.push(LetterSpec { label: format!("-{}", i + 1), block: 0, g: u.g(i), chi: u.chi(i).inv() });
    }
    for i in 0..n {
        letters.push(LetterSpec { label: format!("{}", i + 1), block: 1, g: u.g(i), chi: u.chi(i) });
    }
    Ok(Arc::new(YDDatum::new(FreeAbGroup::new(u.m()), letters, Some(u.gcm.doubled()))?))
}

/// `λ_{i,-i} = 1/(q_i − q_i⁻¹)`.
pub fn standard_lambda(u: &UqData) -> ParamMap<Scalar> {
    let n = u.n();
    (0..n)
        .map(|i| ((plus(n, i), minus(i)), u.q_i(i).sub(&u.q_i(i).upow(-1)).inv().expect("q_i ≠ ±1")))
        .collect()
}

/// `U_q` (flavor `H^λ`) or `(U_q)⁰` (flavor `H⁰`).
pub fn build_uq(u: &UqData, mode: LambdaMode) -> Result<UqBuild, UqError> {
    let d = uq_datum(u)?;
    let conditions = cartan_checks(&d, &d.gcm.clone().expect("set"), u.q0.as_ref());
    require_order(&conditions)?;
    let serre = serre_relations(&d)?;
    let (flavor, lambda) = match mode {
        LambdaMode::Standard => (Flavor::Hlambda, standard_lambda(u)),
        LambdaMode::Zero => (Flavor::H0, ParamMap::new()),
    };
    let tails = flavor_tails(&d, flavor, None, &lambda, &ParamMap::new());
    let mut p = assemble(d.clone(), flavor, None, &tails, &serre)?;
    ensure_confluent(&mut p, overlap_bound(&u.gcm))?;
    Ok(UqBuild { datum: d, presentation: Arc::new(p), lambda, serre, conditions })
}

/// Renaming table from letters to the `X^±` notation.
pub fn dictionary_table(u: &UqData) -> Vec<(String, String)> {
    let n = u.n();
    let mut out = Vec::new();
    for i in 0..n {
        out.push((format!("x[{}]", i + 1), format!("X{}+", i + 1)));
        out.push((format!("x[-{}]", i + 1), format!("X{}- K{}", i + 1, i + 1)));
    }
    out
}

/// `Σ_r (−c)^r [N; r]_{q_i} a^{N−r} b a^r` with `N = 1 − a_ij`.
fn serre_combination<C: Coeff>(p: &Presentation<C>, a: &Element<C>, b: &Element<C>, aij: i64, qi: &Scalar, c: &C) -> Element<C> {
    let top = 1 - aij;
    let mut acc = Element::zero();
    for r in 0..=top {
        let mut factors = Vec::new();
        for _ in 0..top - r {
            factors.push(a.clone());
        }
        factors.push(b.clone());
        for _ in 0..r {
            factors.push(a.clone());
        }
        let binom = gauss_binomial_sym(top, r, qi);
        let mut coef = C::from_scalar(&binom);
        for _ in 0..r {
            coef = coef.mul(&c.neg());
        }
        acc.add_assign(&p.mul_all(&factors).scale(&coef));
    }
    acc
}

/// Symmetric q-binomial `[N; r]_t` with `[k]_t = (t^k − t^{-k})/(t − t⁻¹)`.
pub fn gauss_binomial_sym(top: i64, r: i64, t: &Scalar) -> Scalar {
    gauss_binomial(top, r, t).expect("t is not ±1")
}

/// Images of `X_i^+`, `X_i^-` and `K_i` under the generator dictionary.
pub fn dictionary_images<C: Coeff>(u: &UqData, p: &Presentation<C>) -> Vec<(Element<C>, Element<C>, GrpElt)> {
    let n = u.n();
    let m = u.m();
    (0..n)
        .map(|i| {
            let g = u.g(i);
            let xp = Element::letter(plus(n, i), m);
            let xm = p.mul(&Element::letter(minus(i), m), &Element::group(g.neg()));
            (xp, xm, g)
        })
        .collect()
}

/// Check that the defining relations of `U_q` (or, in zero mode, of
/// `(U_q)⁰`) hold for the dictionary images in the presentation.
pub fn dictionary_check(u: &UqData, b: &UqBuild, mode: LambdaMode) -> CheckReport {
    let p = &b.presentation;
    let d = &b.datum;
    let n = u.n();
    let m = u.m();
    let imgs = dictionary_images(u, p);
    let mut rep = CheckReport::default();
    for r in 0..m {
        let e = GrpElt::unit(m, r);
        let k = Element::group(e.clone());
        let kinv = Element::group(e.neg());
        for (j, (xp, xm, _)) in imgs.iter().enumerate() {
            let expo = u.pairing[j][r];
            for (x, sign) in [(xp, 1), (xm, -1)] {
                let lhs = p.mul_all(&[k.clone(), x.clone(), kinv.clone()]);
                let diff = lhs.sub(&x.scale(&Scalar::q_pow(sign * expo)));
                rep.record("K X K^-1", || format!("h{} on X{}{}", r + 1, j + 1, if sign > 0 { "+" } else { "-" }), (!diff.is_zero()).then(|| diff.fmt_with(d)));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let (xp, _, gi) = &imgs[i];
            let (_, xm, _) = &imgs[j];
            let lhs = p.mul(xp, xm).sub(&p.mul(xm, xp));
            let mut rhs = Element::zero();
            if i == j && mode == LambdaMode::Standard {
                let c = u.q_i(i).sub(&u.q_i(i).upow(-1)).inv().expect("q_i ≠ ±1");
                rhs = Element::group(gi.clone()).sub(&Element::group(gi.neg())).scale(&c);
            }
            let diff = lhs.sub(&rhs);
            rep.record("commutator", || format!("[X{}+, X{}-]", i + 1, j + 1), (!diff.is_zero()).then(|| diff.fmt_with(d)));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let aij = u.gcm.a[i][j];
            for sign in [0usize, 1] {
                let a = if sign == 0 { &imgs[i].0 } else { &imgs[i].1 };
                let bb = if sign == 0 { &imgs[j].0 } else { &imgs[j].1 };
                let e = serre_combination(p, a, bb, aij, &u.q_i(i), &Scalar::one());
                rep.record("quantum Serre", || format!("({}, {}){}", i + 1, j + 1, if sign == 0 { "+" } else { "-" }), (!e.is_zero()).then(|| e.fmt_with(d)));
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// A_q(u, μ)
// ---------------------------------------------------------------------------

/// Entries `u_ij` for `i < j` (0-based); missing entries are 1.
pub type UMat = BTreeMap<(usize, usize), Scalar>;

pub fn u_entry(umat: &UMat, i: usize, j: usize) -> Scalar {
    match i.cmp(&j) {
        std::cmp::Ordering::Equal => Scalar::one(),
        std::cmp::Ordering::Less => umat.get(&(i, j)).cloned().unwrap_or_else(Scalar::one),
        std::cmp::Ordering::Greater => umat.get(&(j, i)).cloned().unwrap_or_else(Scalar::one).upow(-1),
    }
}

/// Bilinear cocycle with `σ(e_j, e_i)/σ(e_i, e_j) = u_ij` for `i < j`.
pub fn sigma_of_u(n: usize, umat: &UMat) -> BilinearCocycle {
    let entries: Vec<((usize, usize), Scalar)> = umat.iter().map(|(&(i, j), v)| ((j, i), v.clone())).collect();
    BilinearCocycle::from_lower(n, &entries)
}

/// `Ξ(u) = {(i, j) | q^{d_r(a_ri − a_rj)} = u_ir u_jr for all r}`.
pub fn xi_u(u: &UqData, umat: &UMat) -> Vec<(usize, usize)> {
    let n = u.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let ok = (0..n).all(|r| {
                Scalar::q_pow(u.gcm.d[r] * (u.gcm.a[r][i] - u.gcm.a[r][j])) == u_entry(umat, i, r).mul(&u_entry(umat, j, r))
            });
            if ok {
                out.push((i, j));
            }
        }
    }
    out
}

/// `A_q(u, μ)` realized as `A^λ(σ, μ)` with its left `U_q`-coaction.
pub struct AqBuild {
    pub uq: UqBuild,
    pub sigma: BilinearCocycle,
    pub mu: ParamMap<Scalar>,
    pub alg: Arc<Presentation<Scalar>>,
    pub coaction: CoactionSpec<Scalar>,
    pub xi_u: Vec<(usize, usize)>,
    /// Relations that hold in the realized algebra (all must pass).
    pub relations: CheckReport,
    /// The textbook presentation with untwisted `g̃`-action on `X̃⁻` and
    /// minus-Serre coefficient `(−u_ij)^r`.  These fail whenever `u_ij ≠ 1`
    /// (conjugation) or `u_ij ≠ ±1` (Serre); kept for comparison.
    pub as_stated: CheckReport,
}

/// Build `A_q(u, μ)` for `μ` given on pairs `(i, j)` of `I_+` (0-based).
pub fn build_aq(u: &UqData, umat: &UMat, mu_u: &ParamMap<Scalar>) -> Result<AqBuild, UqError> {
    if !u.standard_lattice {
        return Err(UqError::Input("A_q(u, μ) needs the lattice ⊕ ℤ d_i α_i^∨".into()));
    }
    let n = u.n();
    for &(i, j) in umat.keys() {
        if i >= j || j >= n {
            return Err(UqError::Input(format!("u entries need i < j < n, got ({i}, {j})")));
        }
    }
    let uq = build_uq(u, LambdaMode::Standard)?;
    let d = uq.datum.clone();
    let allowed = xi_u(u, umat);
    for (&(i, j), v) in mu_u {
        if !v.is_zero() && !allowed.contains(&(i, j)) {
            return Err(UqError::Datum(DatumError::Support(format!("{}", i + 1), format!("{}", j + 1))));
        }
    }
    let sigma = sigma_of_u(n, umat);
    let mu: ParamMap<Scalar> = mu_u.iter().filter(|(_, v)| !v.is_zero()).map(|(&(i, j), v)| ((plus(n, i), minus(j)), v.clone())).collect();
    let twist = (!sigma.is_trivial()).then(|| crate::freealg::bilinear_twist(&sigma));
    let tails = flavor_tails(&d, Flavor::Alambdasigmamu, twist.as_ref(), &uq.lambda, &mu);
    let mut alg = assemble(d.clone(), Flavor::Alambdasigmamu, twist, &tails, &uq.serre)?;
    ensure_confluent(&mut alg, overlap_bound(&u.gcm))?;
    let alg = Arc::new(alg);
    let coaction = CoactionSpec::left_coaction(uq.presentation.clone(), alg.clone());
    let mut relations = aq_relation_check(u, umat, mu_u, &alg, AqConvention::Realized);
    let as_stated = aq_relation_check(u, umat, mu_u, &alg, AqConvention::AsStated);
    relations.merge(aq_coaction_check(u, &uq, &alg, &coaction));
    let mut xs = allowed.clone();
    xs.sort();
    let mut via_sigma: Vec<(usize, usize)> = xi_sigma(&d, &sigma).into_iter().map(|(i, j)| (i - n, j)).collect();
    via_sigma.sort();
    relations.record(
        "Ξ(u) = Ξ(σ)",
        || format!("{xs:?}"),
        (xs != via_sigma).then(|| format!("{via_sigma:?}")),
    );
    Ok(AqBuild { uq, sigma, mu: mu_u.clone(), alg, coaction, xi_u: allowed, relations, as_stated })
}

/// Images `X̃_i^+ = x_i`, `X̃_i^- = x_{-i} g̃_i⁻¹` and `g̃_i` in the algebra.
fn aq_images(u: &UqData, alg: &Presentation<Scalar>) -> Vec<(Element<Scalar>, Element<Scalar>, Element<Scalar>, Element<Scalar>)> {
    let n = u.n();
    let m = u.m();
    (0..n)
        .map(|i| {
            let g = Element::group(u.g(i));
            let ginv = crate::hopf::invert_group_term(alg, &g).expect("grouplike");
            let xp = Element::letter(plus(n, i), m);
            let xm = alg.mul(&Element::letter(minus(i), m), &ginv);
            (xp, xm, g, ginv)
        })
        .collect()
}

/// Which form of the `A_q(u, μ)` relations to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AqConvention {
    /// `g̃_i X̃_j^- g̃_i⁻¹ = u_ij q_i^{-a_ij} X̃_j^-` and minus-Serre with `(−u_ij⁻¹)^r`.
    /// Since `X̃_j^- = x_{-j} g̃_j⁻¹` carries a group factor, conjugation picks
    /// up the commutator `u_ij` of the twisted group algebra.
    Realized,
    /// `g̃_i X̃_j^- g̃_i⁻¹ = q_i^{-a_ij} X̃_j^-` and minus-Serre with `(−u_ij)^r`.
    AsStated,
}

/// The defining relations of `A_q(u, μ)` evaluated in the presentation.
pub fn aq_relation_check(u: &UqData, umat: &UMat, mu_u: &ParamMap<Scalar>, alg: &Presentation<Scalar>, conv: AqConvention) -> CheckReport {
    let n = u.n();
    let d = alg.datum().clone();
    let imgs = aq_images(u, alg);
    let mut rep = CheckReport::default();
    for i in 0..n {
        for j in 0..n {
            let qa = u.q_i(i).upow(u.gcm.a[i][j]);
            let (g, ginv) = (&imgs[i].2, &imgs[i].3);
            let plus = alg.mul_all(&[g.clone(), imgs[j].0.clone(), ginv.clone()]).sub(&imgs[j].0.scale(&qa));
            rep.record("g̃ X̃+ g̃⁻¹", || format!("({}, {})", i + 1, j + 1), (!plus.is_zero()).then(|| plus.fmt_with(&d)));
            let mut c = qa.upow(-1);
            if conv == AqConvention::Realized {
                c = c.mul(&u_entry(umat, i, j));
            }
            let minus = alg.mul_all(&[g.clone(), imgs[j].1.clone(), ginv.clone()]).sub(&imgs[j].1.scale(&c));
            rep.record("g̃ X̃- g̃⁻¹", || format!("({}, {})", i + 1, j + 1), (!minus.is_zero()).then(|| minus.fmt_with(&d)));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let lhs = alg.mul(&imgs[j].2, &imgs[i].2);
            let rhs = alg.mul(&imgs[i].2, &imgs[j].2).scale(&u_entry(umat, i, j));
            let diff = lhs.sub(&rhs);
            rep.record("g̃_j g̃_i = u_ij g̃_i g̃_j", || format!("({}, {})", i + 1, j + 1), (!diff.is_zero()).then(|| diff.fmt_with(&d)));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let (xp, _, gi, _) = &imgs[i];
            let (_, xm, _, gj_inv) = &imgs[j];
            let lhs = alg.mul(xp, xm).sub(&alg.mul(xm, xp));
            let mu = mu_u.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero);
            let mut rhs = gi.scale(&mu);
            if i == j {
                let c = u.q_i(i).sub(&u.q_i(i).upow(-1)).inv().expect("q_i ≠ ±1");
                rhs = rhs.sub(&gj_inv.scale(&c));
            }
            let diff = lhs.sub(&rhs);
            rep.record("[X̃+, X̃-]", || format!("({}, {})", i + 1, j + 1), (!diff.is_zero()).then(|| diff.fmt_with(&d)));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let aij = u.gcm.a[i][j];
            let plus_serre = serre_combination(alg, &imgs[i].0, &imgs[j].0, aij, &u.q_i(i), &Scalar::one());
            rep.record("Serre +", || format!("({}, {})", i + 1, j + 1), (!plus_serre.is_zero()).then(|| plus_serre.fmt_with(&d)));
            let c = match conv {
                AqConvention::Realized => u_entry(umat, j, i),
                AqConvention::AsStated => u_entry(umat, i, j),
            };
            let minus_serre = serre_combination(alg, &imgs[i].1, &imgs[j].1, aij, &u.q_i(i), &c);
            rep.record("Serre − twisted", || format!("({}, {})", i + 1, j + 1), (!minus_serre.is_zero()).then(|| minus_serre.fmt_with(&d)));
        }
    }
    rep
}

/// `ρ(g̃_i) = g_i ⊗ g̃_i`, `ρ(X̃_i^+) = X_i^+ ⊗ 1 + g_i ⊗ X̃_i^+`,
/// `ρ(X̃_i^-) = X_i^- ⊗ g̃_i⁻¹ + 1 ⊗ X̃_i^-`.
fn aq_coaction_check(u: &UqData, uq: &UqBuild, alg: &Presentation<Scalar>, spec: &CoactionSpec<Scalar>) -> CheckReport {
    let n = u.n();
    let m = u.m();
    let d = alg.datum().clone();
    let ai = aq_images(u, alg);
    let hi = dictionary_images(u, &uq.presentation);
    let one = Element::one(m);
    let mut rep = CheckReport::default();
    for i in 0..n {
        let gh = Element::group(hi[i].2.clone());
        let expected = [
            (ai[i].2.clone(), vec![(gh.clone(), ai[i].2.clone())]),
            (ai[i].0.clone(), vec![(hi[i].0.clone(), one.clone()), (gh.clone(), ai[i].0.clone())]),
            (ai[i].1.clone(), vec![(hi[i].1.clone(), ai[i].3.clone()), (one.clone(), ai[i].1.clone())]),
        ];
        for (k, (x, terms)) in expected.into_iter().enumerate() {
            let mut rhs = crate::freealg::TensorElement::zero(2);
            for (l, r) in &terms {
                rhs.add_product(&Scalar::one(), &[l, r]);
            }
            let diff = coproduct(&x, spec).sub(&rhs);
            rep.record("coaction", || format!("generator {} of index {}", ["g̃", "X̃+", "X̃-"][k], i + 1), (!diff.is_zero()).then(|| diff.fmt_with(&d)));
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Comparisons and drivers
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GrCompare {
    pub ranks_graded: Vec<usize>,
    pub ranks_filtered: Vec<usize>,
    pub products_checked: usize,
    pub mismatches: Vec<String>,
}

impl GrCompare {
    pub fn pass(&self) -> bool {
        self.ranks_graded == self.ranks_filtered && self.mismatches.is_empty()
    }
}

/// Compare `(U_q)⁰` with the associated graded of `U_q` up to x-degree `max_len`.
pub fn gr_compare(u: &UqData, max_len: usize) -> Result<GrCompare, UqError> {
    let h0 = build_uq(u, LambdaMode::Zero)?.presentation;
    let hl = build_uq(u, LambdaMode::Standard)?.presentation;
    let d = h0.datum().clone();
    let ranks_graded = h0.hilbert_ranks(max_len);
    let ranks_filtered = hl.hilbert_ranks(max_len);
    let samples: Vec<GrpElt> = group_samples(u.m()).into_iter().take(2).collect();
    let basis = sample_basis(&h0, max_len, &samples);
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for a in &basis {
        for b in &basis {
            let top = a.degree() + b.degree();
            if top > max_len {
                continue;
            }
            checked += 1;
            let lhs = hl.mul_mono(a, b).homogeneous_part(top);
            let rhs = h0.mul_mono(a, b);
            if lhs != rhs {
                let show = |x: &Mono| Element::<Scalar>::from_mono(x.clone()).fmt_with(&d);
                mismatches.push(format!("{} · {}: {}", show(a), show(b), lhs.sub(&rhs).fmt_with(&d)));
            }
        }
    }
    Ok(GrCompare { ranks_graded, ranks_filtered, products_checked: checked, mismatches })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BorelCleftReport {
    pub theta_empty: bool,
    pub xi_empty: bool,
    pub conditions_pass: bool,
    pub hilbert: Vec<usize>,
    /// Dimension over ℚ(q) of `H²(Γ, M)` in the bilinear model.
    pub h2_dim: usize,
    pub expected_h2_dim: usize,
}

impl BorelCleftReport {
    pub fn pass(&self) -> bool {
        self.theta_empty && self.xi_empty && self.conditions_pass && self.h2_dim == self.expected_h2_dim
    }
}

/// Dimension of bilinear additive 2-cocycles `ℤ^m × ℤ^m → M` modulo
/// coboundaries, computed as `m² dim M − rank(∂)`.
pub fn additive_h2_dim(m: usize, dim_m: usize) -> usize {
    let idx = |i: usize, j: usize, k: usize| (i * m + j) * dim_m + k;
    let mut rows = Vec::new();
    for i in 0..m {
        for j in i..m {
            for k in 0..dim_m {
                let mut t = AdditiveCochain::zero(m, dim_m);
                let mut v = MVec::zero(dim_m);
                v.0[k] = Scalar::one();
                t.symmetric[i][j] = v.clone();
                t.symmetric[j][i] = v;
                let s = crate::abgroup::add_coboundary(&t);
                let mut row = SparseVec::new();
                for a in 0..m {
                    for b in 0..m {
                        for kk in 0..dim_m {
                            let x = s.matrix[a][b].get(kk);
                            if !x.is_zero() {
                                row.insert(idx(a, b, kk), x);
                            }
                        }
                    }
                }
                rows.push(row);
            }
        }
    }
    m * m * dim_m - rank(rows)
}

pub fn borel_cleft_report(u: &UqData, max_len: usize, dim_m: usize) -> Result<BorelCleftReport, UqError> {
    let b = build_borel(u)?;
    let m = u.m();
    Ok(BorelCleftReport {
        theta_empty: theta(&b.datum).is_empty(),
        xi_empty: xi(&b.datum).is_empty(),
        conditions_pass: b.conditions.all_pass(),
        hilbert: b.presentation.hilbert_ranks(max_len),
        h2_dim: additive_h2_dim(m, dim_m),
        expected_h2_dim: m * (m - 1) / 2 * dim_m,
    })
}

/// A pair `(u, μ)` for the classification driver.
#[derive(Clone, Debug, PartialEq)]
pub struct AqPair {
    pub umat: UMat,
    pub mu: ParamMap<Scalar>,
}

/// Classify `A_q(u, μ)` data up to equivalence.
pub fn classify_aq(u: &UqData, pairs: &[AqPair]) -> Result<ClassifyReport, UqError> {
    let d = uq_datum(u)?;
    let n = u.n();
    let mut converted = Vec::new();
    for p in pairs {
        let allowed = xi_u(u, &p.umat);
        for (&(i, j), v) in &p.mu {
            if !v.is_zero() && !allowed.contains(&(i, j)) {
                return Err(UqError::Datum(DatumError::Support(format!("{}", i + 1), format!("{}", j + 1))));
            }
        }
        let mu = p.mu.iter().filter(|(_, v)| !v.is_zero()).map(|(&(i, j), v)| ((plus(n, i), minus(j)), v.clone())).collect();
        converted.push(PairSigmaMu { sigma: sigma_of_u(n, &p.umat), mu });
    }
    Ok(classify(&d, &converted))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct WhiteheadSample {
    pub index: usize,
    pub verified: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct WhiteheadReport {
    pub samples: Vec<WhiteheadSample>,
}

impl WhiteheadReport {
    pub fn pass(&self) -> bool {
        self.samples.iter().all(|s| s.verified)
    }
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let num = rng.gen_range(-5i64..=5);
    let den = rng.gen_range(1i64..=3);
    Scalar::from_rat(crate::scalars::rat_frac(num, den))
}

fn random_mvec(rng: &mut ChaCha8Rng, dim_m: usize) -> MVec {
    MVec((0..dim_m).map(|_| random_scalar(rng)).collect())
}

/// Random `(s, m)` with `s` symmetric bilinear and `m` supported on Ξ, which
/// is what membership forces when `λ` is nonzero on every pair `(i, −i)`.
pub fn random_aug_pair(d: &YDDatum, dim_m: usize, rng: &mut ChaCha8Rng) -> AugPairSM {
    let rank = d.rank();
    let mut s = AdditiveCocycle::zero(rank, dim_m);
    for i in 0..rank {
        for j in i..rank {
            let v = random_mvec(rng, dim_m);
            s.matrix[i][j] = v.clone();
            s.matrix[j][i] = v;
        }
    }
    let m = xi(d).into_iter().map(|k| (k, random_mvec(rng, dim_m))).collect();
    AugPairSM { s, m }
}

/// Run the Whitehead reduction on `samples` seeded random pairs.
pub fn whitehead_samples(u: &UqData, dim_m: usize, samples: usize, seed: u64) -> Result<WhiteheadReport, UqError> {
    let d = uq_datum(u)?;
    let lambda = standard_lambda(u);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for index in 0..samples {
        let ap = random_aug_pair(&d, dim_m, &mut rng);
        let (verified, detail) = match whitehead_reduce(&d, &lambda, &ap, dim_m) {
            Ok(t) => (true, format!("t(e_r) = [{}]", t.linear.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))),
            Err(e) => (false, e.to_string()),
        };
        out.push(WhiteheadSample { index, verified, detail });
    }
    Ok(WhiteheadReport { samples: out })
}

/// Words of the free algebra on the letters of `p` of one length.
pub fn all_words(letters: usize, len: usize) -> Vec<Vec<Letter>> {
    let mut out: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..letters).map(move |l| {
                    let mut v = w.clone();
                    v.push(l as Letter);
                    v
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(name: &str) -> UqData {
        resolve(&UqInput::preset(name).unwrap()).unwrap()
    }

    #[test]
    fn borel_braiding_is_q_power_of_symmetrized_cartan() {
        let u = data("B2");
        let b = build_borel(&u).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(*b.datum.q(i, j), Scalar::q_pow(u.gcm.d[i] * u.gcm.a[i][j]));
            }
        }
    }

    #[test]
    fn sl2_commutator_tail() {
        let u = data("A1");
        let b = build_uq(&u, LambdaMode::Standard).unwrap();
        assert!(dictionary_check(&u, &b, LambdaMode::Standard).all_pass());
        let z = build_uq(&u, LambdaMode::Zero).unwrap();
        assert!(dictionary_check(&u, &z, LambdaMode::Zero).all_pass());
        assert_eq!(xi(&b.datum), vec![(1, 0)]);
    }

    #[test]
    fn symmetric_binomial() {
        let q = Scalar::q();
        // [2; 1]_q = q + q^{-1}
        assert_eq!(gauss_binomial_sym(2, 1, &q), q.add(&q.upow(-1)));
    }

    #[test]
    fn xi_of_trivial_u_is_diagonal() {
        let u = data("A2");
        assert_eq!(xi_u(&u, &UMat::new()), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn lattice_consistency_is_checked() {
        let mut inp = UqInput::preset("A2").unwrap();
        inp.lattice = Some(Lattice { pairing: vec![vec![2, -1], vec![-1, 2]], coroots: vec![vec![1, 0], vec![0, 2]] });
        assert!(resolve(&inp).is_err());
    }

    #[test]
    fn h2_count() {
        assert_eq!(additive_h2_dim(3, 1), 3);
        assert_eq!(additive_h2_dim(2, 2), 2);
    }
}
