//! Free abelian groups `ℤ^m`, their characters, and 2-cocycles with values
//! in ℚ(q)^× (multiplicative) or in a trivial module `M = ℚ(q)^d` (additive).
//!
//! Cocycles are kept in bilinear form: a matrix `B` with
//! `σ(a, b) = ∏_{i,j} B[i][j]^{a_i b_j}`.  Every class in `H²(ℤ^m, −)` has
//! such a representative and the skew part of `B` is a complete invariant.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::scalars::{Coeff, Scalar};

/// Element of `ℤ^m` written additively as an exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct GrpElt(pub SmallVec<[i32; 4]>);

impl GrpElt {
    pub fn zero(m: usize) -> Self {
        GrpElt(SmallVec::from_elem(0, m))
    }

    pub fn unit(m: usize, r: usize) -> Self {
        let mut g = GrpElt::zero(m);
        g.0[r] = 1;
        g
    }

    pub fn from_slice(v: &[i32]) -> Self {
        GrpElt(SmallVec::from_slice(v))
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &GrpElt) -> GrpElt {
        GrpElt(self.0.iter().zip(o.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &GrpElt) -> GrpElt {
        GrpElt(self.0.iter().zip(o.0.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> GrpElt {
        GrpElt(self.0.iter().map(|a| -a).collect())
    }

    pub fn times(&self, k: i32) -> GrpElt {
        GrpElt(self.0.iter().map(|a| a * k).collect())
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }
}

impl fmt::Display for GrpElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// The ambient group `Γ ≅ ℤ^m` with generator names.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FreeAbGroup {
    pub rank: usize,
    pub labels: Vec<String>,
}

impl FreeAbGroup {
    pub fn new(rank: usize) -> Self {
        assert!(rank >= 1, "group rank must be positive");
        FreeAbGroup { rank, labels: (1..=rank).map(|r| format!("e{r}")).collect() }
    }
}

/// Character `Γ → ℚ(q)^×`, given by its values on the generators.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Character {
    pub values: Vec<Scalar>,
}

impl Character {
    pub fn new(values: Vec<Scalar>) -> Self {
        assert!(values.iter().all(Scalar::is_unit), "character values must be units");
        Character { values }
    }

    pub fn trivial(m: usize) -> Self {
        Character { values: vec![Scalar::one(); m] }
    }

    pub fn eval(&self, a: &GrpElt) -> Scalar {
        char_eval(self, a)
    }

    pub fn mul(&self, o: &Character) -> Character {
        Character { values: self.values.iter().zip(&o.values).map(|(a, b)| a.mul(b)).collect() }
    }

    pub fn inv(&self) -> Character {
        Character { values: self.values.iter().map(|a| a.upow(-1)).collect() }
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(Scalar::is_one)
    }
}

/// `χ(a) = ∏_r χ(e_r)^{a_r}`.
pub fn char_eval(chi: &Character, a: &GrpElt) -> Scalar {
    let mut acc = Scalar::one();
    for (v, &e) in chi.values.iter().zip(a.0.iter()) {
        if e != 0 {
            acc = acc.mul(&v.upow(e as i64));
        }
    }
    acc
}

/// Multiplicative bilinear 2-cocycle `σ(a, b) = ∏ B[i][j]^{a_i b_j}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BilinearCocycle {
    pub matrix: Vec<Vec<Scalar>>,
}

impl BilinearCocycle {
    pub fn trivial(m: usize) -> Self {
        BilinearCocycle { matrix: vec![vec![Scalar::one(); m]; m] }
    }

    /// Normalized lower-triangular representative: `σ(e_j, e_i) = u` for the
    /// given `(j, i)` with `j > i`, every other generator pair evaluates to 1.
    pub fn from_lower(m: usize, entries: &[((usize, usize), Scalar)]) -> Self {
        let mut s = BilinearCocycle::trivial(m);
        for ((j, i), u) in entries {
            assert!(j > i && *j < m, "lower entries need row > column");
            s.matrix[*j][*i] = u.clone();
        }
        s
    }

    pub fn from_matrix(matrix: Vec<Vec<Scalar>>) -> Self {
        let m = matrix.len();
        assert!(matrix.iter().all(|r| r.len() == m && r.iter().all(Scalar::is_unit)));
        BilinearCocycle { matrix }
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.matrix.iter().flatten().all(Scalar::is_one)
    }

    pub fn eval(&self, a: &GrpElt, b: &GrpElt) -> Scalar {
        cocycle_eval(self, a, b)
    }

    /// Pointwise product of cocycles.
    pub fn mul(&self, o: &BilinearCocycle) -> BilinearCocycle {
        let matrix = self
            .matrix
            .iter()
            .zip(&o.matrix)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a.mul(b)).collect())
            .collect();
        BilinearCocycle { matrix }
    }

    pub fn inv(&self) -> BilinearCocycle {
        let matrix = self.matrix.iter().map(|r| r.iter().map(|a| a.upow(-1)).collect()).collect();
        BilinearCocycle { matrix }
    }

    /// The character `s^σ_h(g) = σ(g, h) / σ(h, g)`.
    pub fn skew_character(&self, h: &GrpElt) -> Character {
        let m = self.rank();
        let values = (0..m)
            .map(|r| {
                let e = GrpElt::unit(m, r);
                self.eval(&e, h).mul(&self.eval(h, &e).upow(-1))
            })
            .collect();
        Character { values }
    }
}

pub fn cocycle_eval(sigma: &BilinearCocycle, a: &GrpElt, b: &GrpElt) -> Scalar {
    let mut acc = Scalar::one();
    for (i, &ai) in a.0.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.0.iter().enumerate() {
            if bj == 0 {
                continue;
            }
            let entry = &sigma.matrix[i][j];
            if !entry.is_one() {
                acc = acc.mul(&entry.upow((ai as i64) * (bj as i64)));
            }
        }
    }
    acc
}

/// Skew invariant: the entries `σ(e_j, e_i) / σ(e_i, e_j)` for `i < j`,
/// keyed by `(i, j)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SkewInvariant(pub BTreeMap<(usize, usize), Scalar>);

impl SkewInvariant {
    pub fn first_difference(&self, o: &SkewInvariant) -> Option<(usize, usize)> {
        self.0.iter().find(|(k, v)| o.0.get(k) != Some(v)).map(|(k, _)| *k)
    }

    pub fn is_trivial(&self) -> bool {
        self.0.values().all(Scalar::is_one)
    }
}

impl Serialize for SkewInvariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<(usize, usize, String)> =
            self.0.iter().map(|((i, j), x)| (i + 1, j + 1, x.to_string())).collect();
        v.serialize(s)
    }
}

pub fn skew_invariant(sigma: &BilinearCocycle) -> SkewInvariant {
    let m = sigma.rank();
    let mut out = BTreeMap::new();
    for i in 0..m {
        for j in i + 1..m {
            let v = sigma.matrix[j][i].mul(&sigma.matrix[i][j].upow(-1));
            out.insert((i, j), v);
        }
    }
    SkewInvariant(out)
}

/// 1-cochain `η(a) = ∏ w_i^{a_i} · ∏_{i<j} S_ij^{a_i a_j} · ∏ S_ii^{a_i(a_i−1)/2}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct OneCochain {
    pub linear: Vec<Scalar>,
    pub symmetric: Vec<Vec<Scalar>>,
}

impl OneCochain {
    pub fn trivial(m: usize) -> Self {
        OneCochain { linear: vec![Scalar::one(); m], symmetric: vec![vec![Scalar::one(); m]; m] }
    }

    pub fn rank(&self) -> usize {
        self.linear.len()
    }

    pub fn eval(&self, a: &GrpElt) -> Scalar {
        let m = self.rank();
        let mut acc = Scalar::one();
        for i in 0..m {
            let ai = a.0[i] as i64;
            if ai == 0 {
                continue;
            }
            acc = acc.mul(&self.linear[i].upow(ai));
            acc = acc.mul(&self.symmetric[i][i].upow(ai * (ai - 1) / 2));
            for j in i + 1..m {
                let aj = a.0[j] as i64;
                if aj != 0 {
                    acc = acc.mul(&self.symmetric[i][j].upow(ai * aj));
                }
            }
        }
        acc
    }

    pub fn mul(&self, o: &OneCochain) -> OneCochain {
        OneCochain {
            linear: self.linear.iter().zip(&o.linear).map(|(a, b)| a.mul(b)).collect(),
            symmetric: self
                .symmetric
                .iter()
                .zip(&o.symmetric)
                .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a.mul(b)).collect())
                .collect(),
        }
    }

    pub fn inv(&self) -> OneCochain {
        OneCochain {
            linear: self.linear.iter().map(|a| a.upow(-1)).collect(),
            symmetric: self.symmetric.iter().map(|r| r.iter().map(|a| a.upow(-1)).collect()).collect(),
        }
    }
}

/// `∂η(a, b) = η(a) η(b) / η(a + b)`; the linear part cancels and what is
/// left is the symmetric bilinear form with matrix `S^{-1}`.
pub fn coboundary(eta: &OneCochain) -> BilinearCocycle {
    let m = eta.rank();
    let mut matrix = vec![vec![Scalar::one(); m]; m];
    for i in 0..m {
        matrix[i][i] = eta.symmetric[i][i].upow(-1);
        for j in i + 1..m {
            let v = eta.symmetric[i][j].upow(-1);
            matrix[i][j] = v.clone();
            matrix[j][i] = v;
        }
    }
    BilinearCocycle { matrix }
}

/// Decide whether `σ′ = σ · ∂η` for some 1-cochain; on success return such
/// an `η`, otherwise the first generator pair `(i, j)`, `i < j`, on which
/// the skew invariants differ.
pub fn cohomologous(sigma: &BilinearCocycle, sigma2: &BilinearCocycle) -> Result<OneCochain, (usize, usize)> {
    if let Some(pair) = skew_invariant(sigma).first_difference(&skew_invariant(sigma2)) {
        return Err(pair);
    }
    let ratio = sigma2.mul(&sigma.inv());
    let m = sigma.rank();
    let mut eta = OneCochain::trivial(m);
    for i in 0..m {
        for j in i..m {
            let v = ratio.matrix[i][j].upow(-1);
            eta.symmetric[i][j] = v.clone();
            eta.symmetric[j][i] = v;
        }
    }
    Ok(eta)
}

// ---------------------------------------------------------------------------
// Additive side
// ---------------------------------------------------------------------------

/// Vector in the trivial module `M = ℚ(q)^d`.  Missing trailing entries are
/// read as zero, so vectors of different stored length compare correctly.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct MVec(pub Vec<Scalar>);

impl PartialEq for MVec {
    fn eq(&self, o: &MVec) -> bool {
        let n = self.0.len().max(o.0.len());
        (0..n).all(|k| self.get(k) == o.get(k))
    }
}

impl Eq for MVec {}

impl MVec {
    pub fn zero(d: usize) -> Self {
        MVec(vec![Scalar::zero(); d])
    }

    pub fn get(&self, k: usize) -> Scalar {
        self.0.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, o: &MVec) -> MVec {
        let n = self.0.len().max(o.0.len());
        MVec((0..n).map(|k| self.get(k).add(&o.get(k))).collect())
    }

    pub fn neg(&self) -> MVec {
        MVec(self.0.iter().map(Scalar::neg).collect())
    }

    pub fn sub(&self, o: &MVec) -> MVec {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Scalar) -> MVec {
        MVec(self.0.iter().map(|x| x.mul(c)).collect())
    }

    fn trimmed(mut self) -> MVec {
        while self.0.last().is_some_and(Scalar::is_zero) {
            self.0.pop();
        }
        self
    }
}

impl fmt::Display for MVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// Additive bilinear cocycle `s(a, b) = Σ a_i b_j S[i][j]` with values in `M`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AdditiveCocycle {
    pub matrix: Vec<Vec<MVec>>,
}

impl AdditiveCocycle {
    pub fn zero(m: usize, d: usize) -> Self {
        AdditiveCocycle { matrix: vec![vec![MVec::zero(d); m]; m] }
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn eval(&self, a: &GrpElt, b: &GrpElt) -> MVec {
        add_cocycle_eval(self, a, b)
    }

    pub fn add(&self, o: &AdditiveCocycle) -> AdditiveCocycle {
        let matrix = self
            .matrix
            .iter()
            .zip(&o.matrix)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a.add(b)).collect())
            .collect();
        AdditiveCocycle { matrix }
    }

    pub fn neg(&self) -> AdditiveCocycle {
        AdditiveCocycle { matrix: self.matrix.iter().map(|r| r.iter().map(MVec::neg).collect()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(MVec::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        add_skew_invariant(self).values().all(MVec::is_zero)
    }
}

pub fn add_cocycle_eval(s: &AdditiveCocycle, a: &GrpElt, b: &GrpElt) -> MVec {
    let mut acc = MVec::default();
    for (i, &ai) in a.0.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.0.iter().enumerate() {
            if bj != 0 {
                acc = acc.add(&s.matrix[i][j].scale(&Scalar::from_int((ai as i64) * (bj as i64))));
            }
        }
    }
    acc
}

/// `s(e_j, e_i) − s(e_i, e_j)` for `i < j`, keyed by `(i, j)`.
pub fn add_skew_invariant(s: &AdditiveCocycle) -> BTreeMap<(usize, usize), MVec> {
    let m = s.rank();
    let mut out = BTreeMap::new();
    for i in 0..m {
        for j in i + 1..m {
            out.insert((i, j), s.matrix[j][i].sub(&s.matrix[i][j]));
        }
    }
    out
}

/// Additive 1-cochain `t(a) = Σ a_i w_i + Σ_{i<j} a_i a_j S_ij + Σ a_i(a_i−1)/2 S_ii`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AdditiveCochain {
    pub linear: Vec<MVec>,
    pub symmetric: Vec<Vec<MVec>>,
}

impl AdditiveCochain {
    pub fn zero(m: usize, d: usize) -> Self {
        AdditiveCochain { linear: vec![MVec::zero(d); m], symmetric: vec![vec![MVec::zero(d); m]; m] }
    }

    pub fn rank(&self) -> usize {
        self.linear.len()
    }

    pub fn eval(&self, a: &GrpElt) -> MVec {
        let m = self.rank();
        let mut acc = MVec::default();
        for i in 0..m {
            let ai = a.0[i] as i64;
            if ai == 0 {
                continue;
            }
            acc = acc.add(&self.linear[i].scale(&Scalar::from_int(ai)));
            acc = acc.add(&self.symmetric[i][i].scale(&Scalar::from_int(ai * (ai - 1) / 2)));
            for j in i + 1..m {
                let aj = a.0[j] as i64;
                if aj != 0 {
                    acc = acc.add(&self.symmetric[i][j].scale(&Scalar::from_int(ai * aj)));
                }
            }
        }
        acc
    }

    pub fn add(&self, o: &AdditiveCochain) -> AdditiveCochain {
        AdditiveCochain {
            linear: self.linear.iter().zip(&o.linear).map(|(a, b)| a.add(b)).collect(),
            symmetric: self
                .symmetric
                .iter()
                .zip(&o.symmetric)
                .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a.add(b)).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.linear.iter().all(MVec::is_zero) && self.symmetric.iter().flatten().all(MVec::is_zero)
    }
}

/// `∂t(a, b) = t(a) + t(b) − t(a + b)`.
pub fn add_coboundary(t: &AdditiveCochain) -> AdditiveCocycle {
    let m = t.rank();
    let mut matrix = vec![vec![MVec::default(); m]; m];
    for i in 0..m {
        matrix[i][i] = t.symmetric[i][i].neg();
        for j in i + 1..m {
            let v = t.symmetric[i][j].neg();
            matrix[i][j] = v.clone();
            matrix[j][i] = v;
        }
    }
    AdditiveCocycle { matrix }
}

/// Additive mirror of [`cohomologous`]: find `t` with `s′ = s + ∂t`.
pub fn add_cohomologous(s: &AdditiveCocycle, s2: &AdditiveCocycle) -> Result<AdditiveCochain, (usize, usize)> {
    let diff = s2.add(&s.neg());
    if let Some((k, _)) = add_skew_invariant(&diff).into_iter().find(|(_, v)| !v.is_zero()) {
        return Err(k);
    }
    let m = s.rank();
    let mut t = AdditiveCochain { linear: vec![MVec::default(); m], symmetric: vec![vec![MVec::default(); m]; m] };
    for i in 0..m {
        for j in i..m {
            let v = diff.matrix[i][j].neg();
            t.symmetric[i][j] = v.clone();
            t.symmetric[j][i] = v;
        }
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// k_M
// ---------------------------------------------------------------------------

/// Element `(a, u)` of the square-zero extension `k_M = k ⊕ M`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KM {
    pub body: Scalar,
    pub nil: MVec,
}

impl KM {
    pub fn new(body: Scalar, nil: MVec) -> Self {
        KM { body, nil: nil.trimmed() }
    }

    pub fn from_nil(nil: MVec) -> Self {
        KM::new(Scalar::zero(), nil)
    }

    pub fn try_inv(&self) -> Result<KM, crate::scalars::ScalarError> {
        let a = self.body.inv()?;
        let nil = self.nil.scale(&a.mul(&a).neg());
        Ok(KM::new(a, nil))
    }
}

impl fmt::Display for KM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.nil.is_zero() {
            write!(f, "{}", self.body)
        } else {
            write!(f, "<{}; {}>", self.body, self.nil)
        }
    }
}

impl Coeff for KM {
    fn zero() -> Self {
        KM { body: Scalar::zero(), nil: MVec::default() }
    }
    fn one() -> Self {
        KM { body: Scalar::one(), nil: MVec::default() }
    }
    fn is_zero(&self) -> bool {
        self.body.is_zero() && self.nil.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        KM::new(self.body.add(&o.body), self.nil.add(&o.nil))
    }
    fn neg(&self) -> Self {
        KM { body: self.body.neg(), nil: self.nil.neg() }
    }
    fn mul(&self, o: &Self) -> Self {
        let nil = o.nil.scale(&self.body).add(&self.nil.scale(&o.body));
        KM::new(self.body.mul(&o.body), nil)
    }
    fn from_scalar(s: &Scalar) -> Self {
        KM { body: s.clone(), nil: MVec::default() }
    }
    fn scale(&self, s: &Scalar) -> Self {
        KM::new(self.body.mul(s), self.nil.scale(s))
    }
    fn inv(&self) -> Option<Self> {
        self.try_inv().ok()
    }
    fn body(&self) -> Scalar {
        self.body.clone()
    }
    fn coords(&self, dim: usize) -> Vec<Scalar> {
        let mut v = vec![self.body.clone()];
        v.extend((0..dim.saturating_sub(1)).map(|k| self.nil.get(k)));
        v
    }
    fn basis(k: usize) -> Self {
        if k == 0 {
            KM::one()
        } else {
            let mut v = vec![Scalar::zero(); k];
            v[k - 1] = Scalar::one();
            KM::from_nil(MVec(v))
        }
    }
}

// ---------------------------------------------------------------------------
// Multiplicative linear systems over ℤ
// ---------------------------------------------------------------------------

/// Outcome of solving `∏_r w_r^{A[k][r]} = c_k` for units `w_r`.
#[derive(Clone, Debug, PartialEq)]
pub enum MonomialSolve {
    Solved(Vec<Scalar>),
    /// A consistency condition `∏ c^{…} = 1` failed, or a required root does
    /// not exist in ℚ(q); the message says which.
    Unsolvable(String),
}

/// Diagonalize an integer matrix: returns `(U, D, V)` with `U·A·V = D`
/// diagonal and `U`, `V` unimodular.
fn diagonalize(a: &[Vec<i64>], cols: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let rows = a.len();
    let mut d: Vec<Vec<i64>> = a.to_vec();
    let mut u: Vec<Vec<i64>> = (0..rows).map(|i| (0..rows).map(|j| i64::from(i == j)).collect()).collect();
    let mut v: Vec<Vec<i64>> = (0..cols).map(|i| (0..cols).map(|j| i64::from(i == j)).collect()).collect();
    for t in 0..rows.min(cols) {
        loop {
            // Pivot: smallest nonzero absolute value in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if d[i][j] != 0 && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { return (u, d, v) };
            d.swap(t, pi);
            u.swap(t, pi);
            for row in d.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            let p = d[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let f = d[i][t] / p;
                if f != 0 {
                    for j in 0..cols {
                        d[i][j] -= f * d[t][j];
                    }
                    for j in 0..rows {
                        u[i][j] -= f * u[t][j];
                    }
                }
                clean &= d[i][t] == 0;
            }
            for j in t + 1..cols {
                let f = d[t][j] / p;
                if f != 0 {
                    for i in 0..rows {
                        d[i][j] -= f * d[i][t];
                    }
                    for i in 0..cols {
                        v[i][j] -= f * v[i][t];
                    }
                }
                clean &= d[t][j] == 0;
            }
            if clean {
                break;
            }
        }
    }
    (u, d, v)
}

/// Solve `∏_r w_r^{A[k][r]} = c_k` over ℚ(q)^× exactly.
pub fn solve_monomial_system(a: &[Vec<i64>], c: &[Scalar], unknowns: usize) -> MonomialSolve {
    assert_eq!(a.len(), c.len());
    if c.iter().any(Scalar::is_zero) {
        return MonomialSolve::Unsolvable("right-hand side contains zero".into());
    }
    let (u, d, v) = diagonalize(a, unknowns);
    let rows = a.len();
    let mut z = vec![Scalar::one(); unknowns];
    for k in 0..rows {
        let mut ck = Scalar::one();
        for (l, cl) in c.iter().enumerate() {
            if u[k][l] != 0 {
                ck = ck.mul(&cl.upow(u[k][l]));
            }
        }
        let dk = if k < unknowns { d[k][k] } else { 0 };
        if dk == 0 {
            if !ck.is_one() {
                return MonomialSolve::Unsolvable(format!("consistency condition {k} evaluates to {ck}, not 1"));
            }
            continue;
        }
        let target = if dk < 0 { ck.upow(-1) } else { ck };
        match target.nth_root(dk.unsigned_abs() as u32) {
            Some(r) => z[k] = r,
            None => {
                return MonomialSolve::Unsolvable(format!("{target} has no {}-th root in Q(q)", dk.abs()));
            }
        }
    }
    let w = (0..unknowns)
        .map(|r| {
            let mut acc = Scalar::one();
            for (s, zs) in z.iter().enumerate() {
                if v[r][s] != 0 {
                    acc = acc.mul(&zs.upow(v[r][s]));
                }
            }
            acc
        })
        .collect();
    MonomialSolve::Solved(w)
}
