//! Coproducts, coactions, counit and antipode on presented algebras,
//! convolution of filtered maps, and Hopf/Hochschild identity checks on
//! truncations of the normal basis.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::abgroup::GrpElt;
use crate::freealg::{Element, Flavor, Mono, Presentation, TensorElement, Word};
use crate::scalars::Coeff;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HopfError {
    #[error("flavor {0} is not a Hopf algebra")]
    NotHopf(Flavor),
    #[error("value is not invertible: {0}")]
    NotInvertible(String),
    #[error("value is not a scalar: {0}")]
    NotScalar(String),
}

/// Which tensor leg carries the Hopf algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    /// `ρ : A → H ⊗ A`.
    Left,
    /// `ρ′ : A → A ⊗ H`.
    Right,
    /// `Δ : H → H ⊗ H`.
    Both,
}

/// Target pair of a coproduct or coaction together with the source algebra.
/// Generator images are `x_i ↦ x_i ⊗ 1 + g_i ⊗ x_i` and `ḡ ↦ g ⊗ ḡ`.
#[derive(Clone, Debug)]
pub struct CoactionSpec<C: Coeff> {
    pub side: Side,
    pub left: Arc<Presentation<C>>,
    pub right: Arc<Presentation<C>>,
}

impl<C: Coeff> CoactionSpec<C> {
    pub fn hopf(h: Arc<Presentation<C>>) -> Self {
        CoactionSpec { side: Side::Both, left: h.clone(), right: h }
    }

    pub fn left_coaction(h: Arc<Presentation<C>>, a: Arc<Presentation<C>>) -> Self {
        CoactionSpec { side: Side::Left, left: h, right: a }
    }

    pub fn right_coaction(a: Arc<Presentation<C>>, h: Arc<Presentation<C>>) -> Self {
        CoactionSpec { side: Side::Right, left: a, right: h }
    }

    /// The algebra the coaction is defined on.
    pub fn source(&self) -> &Arc<Presentation<C>> {
        match self.side {
            Side::Left => &self.right,
            Side::Right | Side::Both => &self.left,
        }
    }

    /// The Hopf algebra that coacts.
    pub fn hopf_leg(&self) -> &Arc<Presentation<C>> {
        match self.side {
            Side::Left | Side::Both => &self.left,
            Side::Right => &self.right,
        }
    }
}

/// Image of a single monomial `x_w ḡ` (any word, not necessarily normal).
pub fn coproduct_mono<C: Coeff>(m: &Mono, spec: &CoactionSpec<C>) -> TensorElement<C> {
    let left = &spec.left;
    let right = &spec.right;
    let d = left.datum();
    let w = &m.word;
    let n = w.len();
    let mut out = TensorElement::zero(2);
    for mask in 0u32..(1u32 << n) {
        let mut coef = C::one();
        let mut lword = Word::new();
        let mut rword = Word::new();
        let mut gl = GrpElt::zero(d.rank());
        for p in 0..n {
            let l = w[p];
            if mask >> p & 1 == 1 {
                let gp = &d.g[l as usize];
                let later: Word = (p + 1..n).filter(|&r| mask >> r & 1 == 0).map(|r| w[r]).collect();
                coef = coef.mul(&left.twist_at(&gl, gp)).mul(&left.chi_move(&later, gp));
                gl = gl.add(gp);
                rword.push(l);
            } else {
                lword.push(l);
            }
        }
        coef = coef.mul(&left.twist_at(&gl, &m.grp));
        let lel = left.nf_mono(&lword, &gl.add(&m.grp));
        let rel = right.nf_mono(&rword, &m.grp);
        out.add_product(&coef, &[&lel, &rel]);
    }
    out
}

pub fn coproduct<C: Coeff>(a: &Element<C>, spec: &CoactionSpec<C>) -> TensorElement<C> {
    let mut out = TensorElement::zero(2);
    for (m, c) in a.iter() {
        for (legs, x) in coproduct_mono(m, spec).iter() {
            out.add_term(legs.clone(), x.mul(c));
        }
    }
    out
}

/// Replace tensor leg `leg` by its image under `spec`, raising the arity by one.
pub fn apply_leg<C: Coeff>(t: &TensorElement<C>, leg: usize, spec: &CoactionSpec<C>) -> TensorElement<C> {
    let mut out = TensorElement::zero(t.arity + 1);
    let mut cache: HashMap<Mono, TensorElement<C>> = HashMap::new();
    for (legs, c) in t.iter() {
        let img = cache.entry(legs[leg].clone()).or_insert_with(|| coproduct_mono(&legs[leg], spec));
        for (pair, x) in img.iter() {
            let mut new_legs = Vec::with_capacity(t.arity + 1);
            new_legs.extend_from_slice(&legs[..leg]);
            new_legs.extend(pair.iter().cloned());
            new_legs.extend_from_slice(&legs[leg + 1..]);
            out.add_term(new_legs, c.mul(x));
        }
    }
    out
}

/// `(Δ ⊗ id) Δ`, using `hopf_spec` for the outer coproduct of the first leg.
pub fn coproduct2<C: Coeff>(a: &Element<C>, spec: &CoactionSpec<C>, hopf_spec: &CoactionSpec<C>) -> TensorElement<C> {
    apply_leg(&coproduct(a, spec), 0, hopf_spec)
}

/// Leg-wise product of two tensors of equal arity.
pub fn tensor_mul<C: Coeff>(a: &TensorElement<C>, b: &TensorElement<C>, pres: &[&Presentation<C>]) -> TensorElement<C> {
    assert_eq!(a.arity, b.arity);
    assert_eq!(pres.len(), a.arity);
    let mut out = TensorElement::zero(a.arity);
    for (la, ca) in a.iter() {
        for (lb, cb) in b.iter() {
            let prods: Vec<Element<C>> = (0..a.arity).map(|k| pres[k].mul_mono(&la[k], &lb[k])).collect();
            let refs: Vec<&Element<C>> = prods.iter().collect();
            out.add_product(&ca.mul(cb), &refs);
        }
    }
    out
}

pub fn counit_mono<C: Coeff>(m: &Mono) -> C {
    if m.word.is_empty() {
        C::one()
    } else {
        C::zero()
    }
}

/// `ε(x_i) = 0`, `ε(ḡ) = 1`, extended linearly over normal forms.
pub fn counit<C: Coeff>(a: &Element<C>) -> C {
    a.iter().filter(|(m, _)| m.word.is_empty()).fold(C::zero(), |acc, (_, c)| acc.add(c))
}

/// Apply `ε` to tensor leg `leg`.
pub fn counit_leg<C: Coeff>(t: &TensorElement<C>, leg: usize) -> TensorElement<C> {
    let mut out = TensorElement::zero(t.arity - 1);
    for (legs, c) in t.iter() {
        if legs[leg].word.is_empty() {
            let mut rest = legs.clone();
            rest.remove(leg);
            out.add_term(rest, c.clone());
        }
    }
    out
}

pub fn as_tensor<C: Coeff>(a: &Element<C>) -> TensorElement<C> {
    let mut t = TensorElement::zero(1);
    for (m, c) in a.iter() {
        t.add_term(vec![m.clone()], c.clone());
    }
    t
}

fn require_hopf<C: Coeff>(p: &Presentation<C>) -> Result<(), HopfError> {
    if p.flavor().is_hopf() && !p.is_twisted() {
        Ok(())
    } else {
        Err(HopfError::NotHopf(p.flavor()))
    }
}

/// `S(ḡ) = \overline{g^{-1}}`, `S(x_i) = −\overline{g_i^{-1}} x_i`, anti-multiplicative.
pub fn antipode<C: Coeff>(a: &Element<C>, p: &Presentation<C>) -> Result<Element<C>, HopfError> {
    require_hopf(p)?;
    let d = p.datum();
    let mut out = Element::zero();
    for (m, c) in a.iter() {
        let mut acc = Element::group(m.grp.neg());
        for &l in m.word.iter().rev() {
            let mut s = Element::zero();
            s.add_term(Mono::new(&[], d.g[l as usize].neg()), C::one().neg());
            let s = p.mul(&s, &Element::letter(l as usize, d.rank()));
            acc = p.mul(&acc, &s);
        }
        out.add_assign(&acc.scale(c));
    }
    Ok(out)
}

/// Is `Δ(y) = y ⊗ ḡ + h̄ ⊗ y`?
pub fn is_skew_primitive<C: Coeff>(y: &Element<C>, g: &GrpElt, h: &GrpElt, spec: &CoactionSpec<C>) -> bool {
    let mut expect = TensorElement::zero(2);
    let gel = Element::group(g.clone());
    let hel = Element::group(h.clone());
    let y = spec.source().normal_form(y);
    expect.add_product(&C::one(), &[&y, &gel]);
    expect.add_product(&C::one(), &[&hel, &y]);
    coproduct(&y, spec).sub(&expect).is_zero()
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckEntry {
    pub identity: String,
    pub element: String,
    pub residual: String,
    pub pass: bool,
}

/// Outcome of a batch of identity checks: per-identity tallies plus every
/// failing instance with its residual.
#[derive(Clone, Debug, Serialize, Default, PartialEq)]
pub struct CheckReport {
    pub counts: BTreeMap<String, (usize, usize)>,
    pub failures: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn record(&mut self, identity: &str, element: impl FnOnce() -> String, residual: Option<String>) {
        let entry = self.counts.entry(identity.to_string()).or_insert((0, 0));
        match residual {
            None => entry.0 += 1,
            Some(r) => {
                entry.1 += 1;
                self.failures.push(CheckEntry { identity: identity.into(), element: element(), residual: r, pass: false });
            }
        }
    }

    pub fn merge(&mut self, o: CheckReport) {
        for (k, (p, f)) in o.counts {
            let e = self.counts.entry(k).or_insert((0, 0));
            e.0 += p;
            e.1 += f;
        }
        self.failures.extend(o.failures);
    }

    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn checked(&self) -> usize {
        self.counts.values().map(|(p, f)| p + f).sum()
    }

    pub fn summary(&self) -> String {
        let parts: Vec<String> = self.counts.iter().map(|(k, (p, f))| format!("{k}: {p} ok, {f} failed")).collect();
        parts.join("; ")
    }
}

/// `0` together with the positive unit vectors of `ℤ^m`.
pub fn group_samples(m: usize) -> Vec<GrpElt> {
    let mut v = vec![GrpElt::zero(m)];
    v.extend((0..m).map(|r| GrpElt::unit(m, r)));
    v
}

/// Normal monomials `w ḡ` with `|w| ≤ max_len` and `g` among `samples`.
pub fn sample_basis<C: Coeff>(p: &Presentation<C>, max_len: usize, samples: &[GrpElt]) -> Vec<Mono> {
    let mut out = Vec::new();
    for m in p.basis(max_len) {
        for g in samples {
            out.push(Mono { word: m.word.clone(), grp: g.clone() });
        }
    }
    out
}

fn show<C: Coeff>(p: &Presentation<C>, m: &Mono) -> String {
    Element::<C>::from_mono(m.clone()).fmt_with(p.datum())
}

/// Check the Hopf axioms on normal monomials of x-degree ≤ `max_len`.
pub fn verify_hopf<C: Coeff>(p: &Arc<Presentation<C>>, max_len: usize) -> Result<CheckReport, HopfError> {
    require_hopf(p)?;
    let spec = CoactionSpec::hopf(p.clone());
    let d = p.datum().clone();
    let samples = group_samples(d.rank());
    let basis = sample_basis(p, max_len, &samples);
    let mut rep = CheckReport::default();
    let one = Element::one(d.rank());
    for m in &basis {
        let a = Element::from_mono(m.clone());
        let delta = coproduct(&a, &spec);
        let l = apply_leg(&delta, 0, &spec);
        let r = apply_leg(&delta, 1, &spec);
        let diff = l.sub(&r);
        rep.record("coassociativity", || show(p, m), (!diff.is_zero()).then(|| diff.fmt_with(&d)));
        let at = as_tensor(&a);
        for (leg, name) in [(0, "counit-left"), (1, "counit-right")] {
            let diff = counit_leg(&delta, leg).sub(&at);
            rep.record(name, || show(p, m), (!diff.is_zero()).then(|| diff.fmt_with(&d)));
        }
        let eps = one.scale(&counit(&a));
        let mut sl = Element::zero();
        let mut sr = Element::zero();
        for (legs, c) in delta.iter() {
            let x = Element::from_mono(legs[0].clone());
            let y = Element::from_mono(legs[1].clone());
            sl.add_assign(&p.mul(&antipode(&x, p)?, &y).scale(c));
            sr.add_assign(&p.mul(&x, &antipode(&y, p)?).scale(c));
        }
        for (val, name) in [(sl, "antipode-left"), (sr, "antipode-right")] {
            let diff = val.sub(&eps);
            rep.record(name, || show(p, m), (!diff.is_zero()).then(|| diff.fmt_with(&d)));
        }
    }
    // Δ and ε are algebra maps: products of basis pairs with total degree ≤ max_len.
    let pres = [p.as_ref(), p.as_ref()];
    let zero_basis = p.basis(max_len);
    let mut pairs: Vec<(Mono, Mono)> = Vec::new();
    for a in &zero_basis {
        for b in &zero_basis {
            if a.degree() + b.degree() <= max_len {
                pairs.push((a.clone(), b.clone()));
            }
        }
        for g in &samples[1..] {
            let gm = Mono::new(&[], g.clone());
            pairs.push((gm.clone(), a.clone()));
            pairs.push((a.clone(), gm));
        }
    }
    for (a, b) in &pairs {
        let ea = Element::from_mono(a.clone());
        let eb = Element::from_mono(b.clone());
        let ab = p.mul(&ea, &eb);
        let lhs = coproduct(&ab, &spec);
        let rhs = tensor_mul(&coproduct(&ea, &spec), &coproduct(&eb, &spec), &pres);
        let diff = lhs.sub(&rhs);
        let label = || format!("{} · {}", show(p, a), show(p, b));
        rep.record("coproduct-multiplicative", label, (!diff.is_zero()).then(|| diff.fmt_with(&d)));
        let e = counit(&ab).sub(&counit::<C>(&ea).mul(&counit(&eb)));
        rep.record("counit-multiplicative", label, (!e.is_zero()).then(|| e.to_string()));
    }
    rep.merge(relations_respected(&spec));
    Ok(rep)
}

/// The coaction, defined letter by letter on the free algebra, kills every
/// defining relation of the source presentation.
pub fn relations_respected<C: Coeff>(spec: &CoactionSpec<C>) -> CheckReport {
    let src = spec.source();
    let d = src.datum();
    let mut rep = CheckReport::default();
    for r in src.relations() {
        let img = coproduct(r, spec);
        rep.record("relation-image", || r.fmt_with(d), (!img.is_zero()).then(|| img.fmt_with(d)));
    }
    rep
}

// ---------------------------------------------------------------------------
// Filtered maps and convolution
// ---------------------------------------------------------------------------

pub type MonoRule<C> = Arc<dyn Fn(&Mono) -> Element<C> + Send + Sync>;

#[derive(Clone)]
enum MapRule<C: Coeff> {
    Counit,
    Transport,
    Custom(MonoRule<C>),
    Convolution(Arc<FilteredMap<C>>, Arc<FilteredMap<C>>),
    Inverse(Arc<FilteredMap<C>>),
}

/// Linear map from the Hopf algebra `source` to the algebra `target`,
/// evaluated lazily on normal monomials and memoized.
pub struct FilteredMap<C: Coeff> {
    pub source: Arc<Presentation<C>>,
    pub target: Arc<Presentation<C>>,
    spec: CoactionSpec<C>,
    rule: MapRule<C>,
    memo: RwLock<HashMap<Mono, Element<C>>>,
}

impl<C: Coeff> std::fmt::Debug for FilteredMap<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.rule {
            MapRule::Counit => "counit",
            MapRule::Transport => "transport",
            MapRule::Custom(_) => "custom",
            MapRule::Convolution(..) => "convolution",
            MapRule::Inverse(_) => "inverse",
        };
        f.debug_struct("FilteredMap").field("kind", &kind).finish()
    }
}

impl<C: Coeff> FilteredMap<C> {
    fn with_rule(source: Arc<Presentation<C>>, target: Arc<Presentation<C>>, rule: MapRule<C>) -> Self {
        let spec = CoactionSpec::hopf(source.clone());
        FilteredMap { source, target, spec, rule, memo: RwLock::new(HashMap::new()) }
    }

    /// `a ↦ ε(a) 1`, the unit of the convolution algebra.
    pub fn counit(source: Arc<Presentation<C>>, target: Arc<Presentation<C>>) -> Self {
        Self::with_rule(source, target, MapRule::Counit)
    }

    /// `x_w ḡ ↦ x_w ḡ` on normal monomials, reduced in the target.
    pub fn transport(source: Arc<Presentation<C>>, target: Arc<Presentation<C>>) -> Self {
        Self::with_rule(source, target, MapRule::Transport)
    }

    pub fn custom(source: Arc<Presentation<C>>, target: Arc<Presentation<C>>, f: MonoRule<C>) -> Self {
        Self::with_rule(source, target, MapRule::Custom(f))
    }

    pub fn eval_mono(&self, m: &Mono) -> Result<Element<C>, HopfError> {
        if let Some(v) = self.memo.read().unwrap().get(m) {
            return Ok(v.clone());
        }
        let t = &self.target;
        let v = match &self.rule {
            MapRule::Counit => Element::scalar(counit_mono::<C>(m), t.rank()),
            MapRule::Transport => t.nf_mono(&m.word, &m.grp),
            MapRule::Custom(f) => f(m),
            MapRule::Convolution(f, g) => {
                let mut acc = Element::zero();
                for (legs, c) in coproduct_mono(m, &self.spec).iter() {
                    let x = f.eval_mono(&legs[0])?;
                    let y = g.eval_mono(&legs[1])?;
                    acc.add_assign(&t.mul(&x, &y).scale(c));
                }
                acc
            }
            MapRule::Inverse(f) => {
                // Σ f(m₁) f⁻¹(m₂) = ε(m); the term whose right leg is m itself
                // has left leg \overline{g_w g}, and all other right legs are shorter.
                let top_left = Mono::new(&[], self.source.datum().word_degree(&m.word).add(&m.grp));
                let mut rest = Element::scalar(counit_mono::<C>(m), t.rank());
                let mut top_coef = C::zero();
                for (legs, c) in coproduct_mono(m, &self.spec).iter() {
                    if legs[1] == *m && legs[0] == top_left {
                        top_coef = c.clone();
                        continue;
                    }
                    let x = f.eval_mono(&legs[0])?;
                    let y = self.eval_mono(&legs[1])?;
                    rest = rest.sub(&t.mul(&x, &y).scale(c));
                }
                let head = f.eval_mono(&top_left)?.scale(&top_coef);
                let inv = invert_group_term(t, &head)?;
                t.mul(&inv, &rest)
            }
        };
        self.memo.write().unwrap().insert(m.clone(), v.clone());
        Ok(v)
    }

    pub fn eval(&self, a: &Element<C>) -> Result<Element<C>, HopfError> {
        let a = self.source.normal_form(a);
        let mut acc = Element::zero();
        for (m, c) in a.iter() {
            acc.add_assign(&self.eval_mono(m)?.scale(c));
        }
        Ok(acc)
    }
}

/// Inverse of `c · h̄` in a crossed product: `c⁻¹ σ(h, h⁻¹)⁻¹ \overline{h⁻¹}`.
pub fn invert_group_term<C: Coeff>(p: &Presentation<C>, x: &Element<C>) -> Result<Element<C>, HopfError> {
    let bad = || HopfError::NotInvertible(x.fmt_with(p.datum()));
    if x.len() != 1 {
        return Err(bad());
    }
    let (m, c) = x.iter().next().unwrap();
    if !m.word.is_empty() {
        return Err(bad());
    }
    let h = &m.grp;
    let k = c.mul(&p.twist_at(h, &h.neg())).inv().ok_or_else(bad)?;
    Ok(Element::term(k, &[], h.neg()))
}

/// `(f * g)(a) = Σ f(a₁) g(a₂)`.
pub fn convolve<C: Coeff>(f: &Arc<FilteredMap<C>>, g: &Arc<FilteredMap<C>>) -> FilteredMap<C> {
    FilteredMap::with_rule(f.source.clone(), f.target.clone(), MapRule::Convolution(f.clone(), g.clone()))
}

/// Convolution inverse, computed degree by degree; it exists as soon as `f`
/// sends every grouplike to a unit multiple of a grouplike.
pub fn conv_inverse<C: Coeff>(f: &Arc<FilteredMap<C>>) -> FilteredMap<C> {
    FilteredMap::with_rule(f.source.clone(), f.target.clone(), MapRule::Inverse(f.clone()))
}

/// Check `f * g = uε` on the listed monomials.
pub fn check_convolution_identity<C: Coeff>(f: &Arc<FilteredMap<C>>, g: &Arc<FilteredMap<C>>, monos: &[Mono], name: &str) -> Result<CheckReport, HopfError> {
    let fg = convolve(f, g);
    let t = f.target.clone();
    let mut rep = CheckReport::default();
    for m in monos {
        let v = fg.eval_mono(m)?;
        let diff = v.sub(&Element::scalar(counit_mono::<C>(m), t.rank()));
        rep.record(name, || show(&f.source, m), (!diff.is_zero()).then(|| diff.fmt_with(t.datum())));
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Two-cocycles and Hochschild cochains
// ---------------------------------------------------------------------------

/// Scalar-valued bilinear form on normal monomials.
pub type BilinearRule<'a, C> = dyn Fn(&Mono, &Mono) -> Result<C, HopfError> + 'a;

pub fn eval_bilinear<C: Coeff>(f: &BilinearRule<'_, C>, a: &Element<C>, b: &Element<C>) -> Result<C, HopfError> {
    let mut acc = C::zero();
    for (ma, ca) in a.iter() {
        for (mb, cb) in b.iter() {
            let v = f(ma, mb)?;
            if !v.is_zero() {
                acc = acc.add(&v.mul(ca).mul(cb));
            }
        }
    }
    Ok(acc)
}

/// Which of the two cocycle conventions a bilinear form follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CocycleSide {
    /// `Σ σ(a₁,b₁) σ(a₂b₂,c) = Σ σ(b₁,c₁) σ(a,b₂c₂)`.
    Right,
    /// `Σ τ(a₁b₁,c) τ(a₂,b₂) = Σ τ(a,b₁c₁) τ(b₂,c₂)`.
    Left,
}

/// Verify the 2-cocycle identity and the normalization `σ(a,1) = ε(a) = σ(1,a)`
/// for every triple of listed monomials whose degrees sum to at most `max_total`.
pub fn cocycle_identity_check<C: Coeff>(
    h: &Arc<Presentation<C>>,
    sigma: &BilinearRule<'_, C>,
    side: CocycleSide,
    monos: &[Mono],
    max_total: usize,
) -> Result<CheckReport, HopfError> {
    let spec = CoactionSpec::hopf(h.clone());
    let d = h.datum().clone();
    let one = Mono::unit(d.rank());
    let mut rep = CheckReport::default();
    let mut deltas: HashMap<Mono, TensorElement<C>> = HashMap::new();
    for m in monos {
        deltas.insert(m.clone(), coproduct_mono(m, &spec));
    }
    let el = |m: &Mono| Element::<C>::from_mono(m.clone());
    for a in monos {
        let e = counit_mono::<C>(a);
        let l = sigma(a, &one)?;
        let r = sigma(&one, a)?;
        let bad = !(l.sub(&e).is_zero() && r.sub(&e).is_zero());
        rep.record("cocycle-normalized", || show(h, a), bad.then(|| format!("σ(a,1) = {l}, σ(1,a) = {r}")));
    }
    for a in monos {
        for b in monos {
            if a.degree() + b.degree() > max_total {
                continue;
            }
            for c in monos {
                if a.degree() + b.degree() + c.degree() > max_total {
                    continue;
                }
                let (da, db, dc) = (&deltas[a], &deltas[b], &deltas[c]);
                let mut lhs = C::zero();
                let mut rhs = C::zero();
                match side {
                    CocycleSide::Right => {
                        for (la, ca) in da.iter() {
                            for (lb, cb) in db.iter() {
                                let s1 = sigma(&la[0], &lb[0])?;
                                if s1.is_zero() {
                                    continue;
                                }
                                let prod = h.mul_mono(&la[1], &lb[1]);
                                let s2 = eval_bilinear(sigma, &prod, &el(c))?;
                                lhs = lhs.add(&ca.mul(cb).mul(&s1).mul(&s2));
                            }
                        }
                        for (lb, cb) in db.iter() {
                            for (lc, cc) in dc.iter() {
                                let s1 = sigma(&lb[0], &lc[0])?;
                                if s1.is_zero() {
                                    continue;
                                }
                                let prod = h.mul_mono(&lb[1], &lc[1]);
                                let s2 = eval_bilinear(sigma, &el(a), &prod)?;
                                rhs = rhs.add(&cb.mul(cc).mul(&s1).mul(&s2));
                            }
                        }
                    }
                    CocycleSide::Left => {
                        for (la, ca) in da.iter() {
                            for (lb, cb) in db.iter() {
                                let s2 = sigma(&la[1], &lb[1])?;
                                if s2.is_zero() {
                                    continue;
                                }
                                let prod = h.mul_mono(&la[0], &lb[0]);
                                let s1 = eval_bilinear(sigma, &prod, &el(c))?;
                                lhs = lhs.add(&ca.mul(cb).mul(&s1).mul(&s2));
                            }
                        }
                        for (lb, cb) in db.iter() {
                            for (lc, cc) in dc.iter() {
                                let s2 = sigma(&lb[1], &lc[1])?;
                                if s2.is_zero() {
                                    continue;
                                }
                                let prod = h.mul_mono(&lb[0], &lc[0]);
                                let s1 = eval_bilinear(sigma, &el(a), &prod)?;
                                rhs = rhs.add(&cb.mul(cc).mul(&s1).mul(&s2));
                            }
                        }
                    }
                }
                let diff = lhs.sub(&rhs);
                rep.record(
                    "cocycle-identity",
                    || format!("({}, {}, {})", show(h, a), show(h, b), show(h, c)),
                    (!diff.is_zero()).then(|| diff.to_string()),
                );
            }
        }
    }
    Ok(rep)
}

/// Trivial-coefficient Hochschild 2-cocycle identity
/// `ε(a)t(b,c) − t(ab,c) + t(a,bc) − t(a,b)ε(c) = 0`.
pub fn hochschild_check<C: Coeff>(h: &Presentation<C>, t: &BilinearRule<'_, C>, monos: &[Mono], max_total: usize) -> Result<CheckReport, HopfError> {
    let mut rep = CheckReport::default();
    let el = |m: &Mono| Element::<C>::from_mono(m.clone());
    for a in monos {
        for b in monos {
            if a.degree() + b.degree() > max_total {
                continue;
            }
            let ab = h.mul_mono(a, b);
            for c in monos {
                if a.degree() + b.degree() + c.degree() > max_total {
                    continue;
                }
                let bc = h.mul_mono(b, c);
                let v = counit_mono::<C>(a)
                    .mul(&t(b, c)?)
                    .sub(&eval_bilinear(t, &ab, &el(c))?)
                    .add(&eval_bilinear(t, &el(a), &bc)?)
                    .sub(&t(a, b)?.mul(&counit_mono::<C>(c)));
                rep.record(
                    "hochschild",
                    || format!("({}, {}, {})", show(h, a), show(h, b), show(h, c)),
                    (!v.is_zero()).then(|| v.to_string()),
                );
            }
        }
    }
    Ok(rep)
}

/// `τ = εε + t`.
pub fn tau_from_t<'a, C: Coeff>(t: &'a BilinearRule<'a, C>) -> impl Fn(&Mono, &Mono) -> Result<C, HopfError> + 'a {
    move |a: &Mono, b: &Mono| Ok(counit_mono::<C>(a).mul(&counit_mono::<C>(b)).add(&t(a, b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::{Character, FreeAbGroup};
    use crate::datum::{LetterSpec, YDDatum};
    use crate::freealg::{build_presentation, Params};
    use crate::scalars::Scalar;

    fn sl2(lambda: Option<Scalar>) -> Arc<Presentation<Scalar>> {
        let g = FreeAbGroup::new(1);
        let letters = vec![
            LetterSpec { label: "-1".into(), block: 0, g: GrpElt::unit(1, 0), chi: Character::new(vec![Scalar::q_pow(-2)]) },
            LetterSpec { label: "1".into(), block: 1, g: GrpElt::unit(1, 0), chi: Character::new(vec![Scalar::q_pow(2)]) },
        ];
        let d = Arc::new(YDDatum::new(g, letters, None).unwrap());
        let mut params = Params::default();
        let flavor = match lambda {
            Some(l) => {
                params.lambda.insert((1, 0), l);
                Flavor::Hlambda
            }
            None => Flavor::H0,
        };
        Arc::new(build_presentation(d, flavor, &params, &[]).unwrap())
    }

    #[test]
    fn generator_coproduct() {
        let p = sl2(None);
        let spec = CoactionSpec::hopf(p.clone());
        let t = coproduct(&Element::letter(1, 1), &spec);
        let mut expect = TensorElement::zero(2);
        let one = Element::one(1);
        let x = Element::letter(1, 1);
        let g = Element::group(GrpElt::unit(1, 0));
        expect.add_product(&Scalar::one(), &[&x, &one]);
        expect.add_product(&Scalar::one(), &[&g, &x]);
        assert_eq!(t, expect);
    }

    #[test]
    fn antipode_of_generator() {
        let p = sl2(None);
        let s = antipode(&Element::letter(0, 1), &p).unwrap();
        assert_eq!(s, Element::term(Scalar::q_pow(2).neg(), &[0], GrpElt::from_slice(&[-1])));
    }

    #[test]
    fn hopf_axioms_small() {
        let p = sl2(Some(Scalar::one()));
        let rep = verify_hopf(&p, 2).unwrap();
        assert!(rep.all_pass(), "{:?}", rep.failures);
    }

    #[test]
    fn identity_inverse_is_antipode() {
        let p = sl2(Some(Scalar::one()));
        let id = Arc::new(FilteredMap::transport(p.clone(), p.clone()));
        let inv = conv_inverse(&id);
        for m in sample_basis(&p, 3, &group_samples(1)) {
            let a = Element::from_mono(m.clone());
            assert_eq!(inv.eval_mono(&m).unwrap(), antipode(&a, &p).unwrap());
        }
    }
}
