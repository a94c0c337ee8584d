//! Braided data `V = {x_i, g_i, χ_i}` of diagonal type over `Γ = ℤ^m`,
//! their index-set combinatorics and Cartan-type condition checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{char_eval, BilinearCocycle, Character, FreeAbGroup, GrpElt};
use crate::scalars::{q_integer, Rat, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatumError {
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("letters {0} and {1} lie in different blocks but q_ij q_ji = {2} is not 1")]
    Partition(String, String, Scalar),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown letter label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate letter label `{0}`")]
    DuplicateLabel(String),
    #[error("invalid generalized Cartan matrix: {0}")]
    Gcm(String),
    #[error("parameter on pair ({0}, {1}) lies outside the allowed support")]
    Support(String, String),
    #[error("could not parse value: {0}")]
    Parse(String),
}

/// Sparse parameter family `(i, j) ↦ value`, implicitly zero elsewhere.
pub type ParamMap<C> = BTreeMap<(usize, usize), C>;

/// A generalized Cartan matrix together with a symmetrizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gcm {
    pub a: Vec<Vec<i64>>,
    pub d: Vec<i64>,
}

impl Gcm {
    pub fn new(a: Vec<Vec<i64>>, d: Vec<i64>) -> Result<Self, DatumError> {
        let n = a.len();
        if d.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(DatumError::Gcm("matrix must be square and match the symmetrizer".into()));
        }
        for i in 0..n {
            if a[i][i] != 2 {
                return Err(DatumError::Gcm(format!("a_{i}{i} must be 2")));
            }
            if d[i] <= 0 {
                return Err(DatumError::Gcm("symmetrizer entries must be positive".into()));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if a[i][j] > 0 {
                    return Err(DatumError::Gcm(format!("a_{i}{j} must be non-positive")));
                }
                if (a[i][j] == 0) != (a[j][i] == 0) {
                    return Err(DatumError::Gcm(format!("a_{i}{j} = 0 must match a_{j}{i} = 0")));
                }
                if d[i] * a[i][j] != d[j] * a[j][i] {
                    return Err(DatumError::Gcm(format!("symmetrizer fails on ({i}, {j})")));
                }
            }
        }
        Ok(Gcm { a, d })
    }

    /// Finite-type presets used throughout the crate.
    pub fn preset(name: &str) -> Option<Gcm> {
        let (a, d): (Vec<Vec<i64>>, Vec<i64>) = match name {
            "A1" => (vec![vec![2]], vec![1]),
            "A2" => (vec![vec![2, -1], vec![-1, 2]], vec![1, 1]),
            "B2" => (vec![vec![2, -2], vec![-1, 2]], vec![1, 2]),
            "A3" => (vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]], vec![1, 1, 1]),
            _ => return None,
        };
        Gcm::new(a, d).ok()
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Exact integer determinant (Bareiss elimination).
    pub fn det(&self) -> i64 {
        let n = self.n();
        let mut m: Vec<Vec<i128>> = self.a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if m[k][k] == 0 {
                let Some(p) = (k + 1..n).find(|&r| m[r][k] != 0) else { return 0 };
                m.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
                }
            }
            prev = m[k][k];
        }
        (sign * m[n - 1][n - 1]) as i64
    }

    /// Block-diagonal sum `A ⊕ A`.
    pub fn doubled(&self) -> Gcm {
        let n = self.n();
        let mut a = vec![vec![0; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = self.a[i][j];
                a[n + i][n + j] = self.a[i][j];
            }
        }
        let mut d = self.d.clone();
        d.extend(self.d.iter().copied());
        Gcm { a, d }
    }
}

/// The datum, with letters stored in an order refining the block order.
#[derive(Clone, Debug, PartialEq)]
pub struct YDDatum {
    pub group: FreeAbGroup,
    pub labels: Vec<String>,
    pub block: Vec<usize>,
    pub g: Vec<GrpElt>,
    pub chi: Vec<Character>,
    q: Vec<Vec<Scalar>>,
    /// Optional Cartan data indexed by letters (same order as `labels`).
    pub gcm: Option<Gcm>,
}

/// Raw description of one letter, in any order.
#[derive(Clone, Debug)]
pub struct LetterSpec {
    pub label: String,
    pub block: usize,
    pub g: GrpElt,
    pub chi: Character,
}

impl YDDatum {
    /// Build and validate a datum.  Letters are stably sorted by block; the
    /// GCM, if given, is indexed like `letters` and permuted accordingly.
    pub fn new(group: FreeAbGroup, letters: Vec<LetterSpec>, gcm: Option<Gcm>) -> Result<Self, DatumError> {
        let m = group.rank;
        if letters.is_empty() {
            return Err(DatumError::Dimension("datum needs at least one letter".into()));
        }
        for l in &letters {
            if l.g.rank() != m || l.chi.values.len() != m {
                return Err(DatumError::Dimension(format!("letter {} does not match group rank {m}", l.label)));
            }
            if l.chi.values.iter().any(|v| !v.is_unit()) {
                return Err(DatumError::Dimension(format!("character of {} has a zero value", l.label)));
            }
        }
        let nblocks = letters.iter().map(|l| l.block).max().unwrap() + 1;
        for b in 0..nblocks {
            if !letters.iter().any(|l| l.block == b) {
                return Err(DatumError::EmptyBlock(b));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &letters {
            if !seen.insert(l.label.clone()) {
                return Err(DatumError::DuplicateLabel(l.label.clone()));
            }
        }
        let mut order: Vec<usize> = (0..letters.len()).collect();
        order.sort_by_key(|&k| letters[k].block);
        let gcm = match gcm {
            Some(c) => {
                if c.n() != letters.len() {
                    return Err(DatumError::Dimension("GCM size differs from letter count".into()));
                }
                let a = order.iter().map(|&i| order.iter().map(|&j| c.a[i][j]).collect()).collect();
                let d = order.iter().map(|&i| c.d[i]).collect();
                Some(Gcm { a, d })
            }
            None => None,
        };
        let labels: Vec<String> = order.iter().map(|&k| letters[k].label.clone()).collect();
        let block: Vec<usize> = order.iter().map(|&k| letters[k].block).collect();
        let g: Vec<GrpElt> = order.iter().map(|&k| letters[k].g.clone()).collect();
        let chi: Vec<Character> = order.iter().map(|&k| letters[k].chi.clone()).collect();
        let n = labels.len();
        let q: Vec<Vec<Scalar>> = (0..n).map(|i| (0..n).map(|j| char_eval(&chi[j], &g[i])).collect()).collect();
        for i in 0..n {
            for j in i + 1..n {
                if block[i] != block[j] {
                    let p = q[i][j].mul(&q[j][i]);
                    if !p.is_one() {
                        return Err(DatumError::Partition(labels[i].clone(), labels[j].clone(), p));
                    }
                }
            }
        }
        Ok(YDDatum { group, labels, block, g, chi, q, gcm })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.group.rank
    }

    pub fn num_blocks(&self) -> usize {
        self.block.iter().max().map_or(0, |b| b + 1)
    }

    pub fn letter(&self, label: &str) -> Result<usize, DatumError> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| DatumError::UnknownLabel(label.into()))
    }

    /// `q_ij = χ_j(g_i)`.
    pub fn q(&self, i: usize, j: usize) -> &Scalar {
        &self.q[i][j]
    }

    /// `χ_i` evaluated at `h`.
    pub fn chi_at(&self, i: usize, h: &GrpElt) -> Scalar {
        char_eval(&self.chi[i], h)
    }

    /// Γ-degree of a word.
    pub fn word_degree(&self, w: &[u8]) -> GrpElt {
        let mut acc = GrpElt::zero(self.rank());
        for &l in w {
            acc = acc.add(&self.g[l as usize]);
        }
        acc
    }

    /// `χ_w(h) = ∏_{letters} χ_{w_p}(h)`.
    pub fn chi_word(&self, w: &[u8], h: &GrpElt) -> Scalar {
        if h.is_zero() {
            return Scalar::one();
        }
        let mut acc = Scalar::one();
        for &l in w {
            acc = acc.mul(&self.chi_at(l as usize, h));
        }
        acc
    }
}

pub fn braiding_matrix(d: &YDDatum) -> Vec<Vec<Scalar>> {
    d.q.clone()
}

/// `Θ = {(i, j) | |i| > |j|}`.
pub fn theta(d: &YDDatum) -> Vec<(usize, usize)> {
    let n = d.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if d.block[i] > d.block[j] {
                out.push((i, j));
            }
        }
    }
    out
}

/// `Ξ = {(i, j) ∈ Θ | χ_i χ_j = 1}`.
pub fn xi(d: &YDDatum) -> Vec<(usize, usize)> {
    theta(d).into_iter().filter(|&(i, j)| d.chi[i].mul(&d.chi[j]).is_trivial()).collect()
}

/// `Ξ(σ) = {(i, j) ∈ Θ | χ_i χ_j = s_i^σ s_j^σ}`.
pub fn xi_sigma(d: &YDDatum, sigma: &BilinearCocycle) -> Vec<(usize, usize)> {
    let s: Vec<Character> = d.g.iter().map(|gi| sigma.skew_character(gi)).collect();
    theta(d)
        .into_iter()
        .filter(|&(i, j)| d.chi[i].mul(&d.chi[j]) == s[i].mul(&s[j]))
        .collect()
}

/// Replace every `χ_i` by `χ_i^σ(g) = σ(g, g_i)/σ(g_i, g) · χ_i(g)`.
pub fn deform_datum(d: &YDDatum, sigma: &BilinearCocycle) -> YDDatum {
    let chi: Vec<Character> = d.chi.iter().zip(&d.g).map(|(c, gi)| c.mul(&sigma.skew_character(gi))).collect();
    let n = d.len();
    let q = (0..n).map(|i| (0..n).map(|j| char_eval(&chi[j], &d.g[i])).collect()).collect();
    YDDatum { chi, q, ..d.clone() }
}

/// Check that a sparse parameter family is supported on an allowed set.
pub fn check_support<C>(d: &YDDatum, params: &ParamMap<C>, allowed: &[(usize, usize)]) -> Result<(), DatumError> {
    for &(i, j) in params.keys() {
        if !allowed.contains(&(i, j)) {
            return Err(DatumError::Support(d.labels[i].clone(), d.labels[j].clone()));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Condition reports
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionEntry {
    pub condition: String,
    pub subject: String,
    pub pass: bool,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Default)]
pub struct ConditionReport {
    pub entries: Vec<ConditionEntry>,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn passes(&self, condition: &str) -> bool {
        self.entries.iter().filter(|e| e.condition == condition).all(|e| e.pass)
    }

    fn push(&mut self, condition: &str, subject: String, pass: bool, witness: String) {
        self.entries.push(ConditionEntry { condition: condition.into(), subject, pass, witness });
    }
}

/// Decide `x ≠ 0` formally, or after substituting `q = q0`.
fn nonvanishing(x: &Scalar, q0: Option<&Rat>) -> (bool, String) {
    match q0 {
        None => (!x.is_zero(), x.to_string()),
        Some(v) => match x.specialize(v) {
            Ok(r) => (!num_traits::Zero::is_zero(&r), r.to_string()),
            Err(e) => (false, e.to_string()),
        },
    }
}

fn equal_at(a: &Scalar, b: &Scalar, q0: Option<&Rat>) -> (bool, String) {
    match q0 {
        None => (a == b, format!("{a} vs {b}")),
        Some(v) => match (a.specialize(v), b.specialize(v)) {
            (Ok(x), Ok(y)) => (x == y, format!("{x} vs {y}")),
            _ => (false, "pole at the specialization".into()),
        },
    }
}

/// Evaluate (C1), (C3), (C4), the q-integer condition, the order condition
/// and (C_q) for the datum's GCM, formally (`q0 = None`) or at a rational
/// value of `q`.
pub fn cartan_checks(d: &YDDatum, gcm: &Gcm, q0: Option<&Rat>) -> ConditionReport {
    let n = d.len();
    let mut rep = ConditionReport::default();
    let lab = |i: usize| d.labels[i].clone();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let lhs = d.q(i, j).mul(d.q(j, i));
            let rhs = d.q(i, i).upow(gcm.a[i][j]);
            let (ok, w) = equal_at(&lhs, &rhs, q0);
            rep.push("C1", format!("({}, {})", lab(i), lab(j)), ok, w);
        }
    }
    for i in 0..n {
        let x = d.q(i, i).sub(&Scalar::one());
        let (ok, w) = nonvanishing(&x, q0);
        rep.push("C3", lab(i), ok, w);
    }
    for i in 0..n {
        for j in 0..n {
            if i == j || d.block[i] != d.block[j] || gcm.a[i][j] == 0 {
                continue;
            }
            let x = d.q(i, i).mul(d.q(j, j)).sub(&d.q(i, j).mul(d.q(j, i)));
            let (ok, w) = nonvanishing(&x, q0);
            rep.push("C4", format!("({}, {})", lab(i), lab(j)), ok, w);
            for l in 1..=(-gcm.a[i][j]) {
                let x = q_integer(l as u32, d.q(i, i));
                let (ok, w) = nonvanishing(&x, q0);
                rep.push("q-integer", format!("({})_{{q_{}{}}}", l, lab(i), lab(i)), ok, w);
            }
        }
    }
    // Order: ord(q_i^2) > max{1, -a_ij}; q_i^2 = q^{2 d_i}.
    for i in 0..n {
        let bound = (0..n).filter(|&j| j != i).map(|j| -gcm.a[i][j]).max().unwrap_or(0).max(1);
        let qi2 = Scalar::q_pow(2 * gcm.d[i]);
        let mut ok = true;
        let mut w = String::from("infinite order");
        for k in 1..=bound {
            let x = qi2.upow(k).sub(&Scalar::one());
            let (nz, _) = nonvanishing(&x, q0);
            if !nz {
                ok = false;
                w = format!("q_i^2 has order dividing {k}");
                break;
            }
        }
        rep.push("order", lab(i), ok, w);
    }
    for i in 0..n {
        for j in 0..n {
            if i == j || d.block[i] != d.block[j] {
                continue;
            }
            let e = 2 * (gcm.d[i] + gcm.d[j] - gcm.d[i] * gcm.a[i][j]);
            let x = Scalar::q_pow(e).sub(&Scalar::one());
            let (ok, w) = nonvanishing(&x, q0);
            rep.push("Cq", format!("({}, {})", lab(i), lab(j)), ok, w);
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// JSON documents
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LetterDoc {
    pub label: String,
    pub block: usize,
    pub g: Vec<i32>,
    pub chi: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairValueDoc {
    pub i: String,
    pub j: String,
    pub value: String,
}

/// On-disk description of a datum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatumDoc {
    pub rank: usize,
    #[serde(default)]
    pub generator_labels: Option<Vec<String>>,
    pub letters: Vec<LetterDoc>,
    #[serde(default)]
    pub gcm: Option<Gcm>,
    #[serde(default)]
    pub lambda: Vec<PairValueDoc>,
    #[serde(default)]
    pub mu: Vec<PairValueDoc>,
}

impl DatumDoc {
    pub fn build(&self) -> Result<(YDDatum, ParamMap<Scalar>, ParamMap<Scalar>), DatumError> {
        let mut group = FreeAbGroup::new(self.rank);
        if let Some(l) = &self.generator_labels {
            group.labels = l.clone();
        }
        let mut letters = Vec::new();
        for l in &self.letters {
            let chi = l
                .chi
                .iter()
                .map(|s| s.parse::<Scalar>().map_err(|e| DatumError::Parse(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            letters.push(LetterSpec {
                label: l.label.clone(),
                block: l.block,
                g: GrpElt::from_slice(&l.g),
                chi: Character { values: chi },
            });
        }
        let d = YDDatum::new(group, letters, self.gcm.clone())?;
        let read = |v: &[PairValueDoc]| -> Result<ParamMap<Scalar>, DatumError> {
            let mut out = ParamMap::new();
            for p in v {
                let x: Scalar = p.value.parse().map_err(|e: crate::scalars::ScalarError| DatumError::Parse(e.to_string()))?;
                out.insert((d.letter(&p.i)?, d.letter(&p.j)?), x);
            }
            Ok(out)
        };
        let lambda = read(&self.lambda)?;
        let mu = read(&self.mu)?;
        check_support(&d, &lambda, &xi(&d))?;
        Ok((d, lambda, mu))
    }

    pub fn from_datum(d: &YDDatum, lambda: &ParamMap<Scalar>) -> DatumDoc {
        DatumDoc {
            rank: d.rank(),
            generator_labels: Some(d.group.labels.clone()),
            letters: (0..d.len())
                .map(|i| LetterDoc {
                    label: d.labels[i].clone(),
                    block: d.block[i],
                    g: d.g[i].as_slice().to_vec(),
                    chi: d.chi[i].values.iter().map(|v| v.to_string()).collect(),
                })
                .collect(),
            gcm: d.gcm.clone(),
            lambda: lambda
                .iter()
                .map(|(&(i, j), v)| PairValueDoc { i: d.labels[i].clone(), j: d.labels[j].clone(), value: v.to_string() })
                .collect(),
            mu: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank1(chi: Scalar) -> YDDatum {
        let g = FreeAbGroup::new(1);
        let l = LetterSpec { label: "1".into(), block: 0, g: GrpElt::unit(1, 0), chi: Character::new(vec![chi]) };
        YDDatum::new(g, vec![l], None).unwrap()
    }

    #[test]
    fn rank_one_braiding() {
        let d = rank1(Scalar::q_pow(2));
        assert_eq!(braiding_matrix(&d), vec![vec![Scalar::q_pow(2)]]);
        assert!(theta(&d).is_empty());
    }

    #[test]
    fn partition_is_validated() {
        let g = FreeAbGroup::new(1);
        let a = LetterSpec { label: "a".into(), block: 0, g: GrpElt::unit(1, 0), chi: Character::new(vec![Scalar::q()]) };
        let b = LetterSpec { label: "b".into(), block: 1, g: GrpElt::unit(1, 0), chi: Character::new(vec![Scalar::q()]) };
        assert!(matches!(YDDatum::new(g, vec![a, b], None), Err(DatumError::Partition(..))));
    }

    #[test]
    fn gcm_determinants() {
        assert_eq!(Gcm::preset("A1").unwrap().det(), 2);
        assert_eq!(Gcm::preset("A2").unwrap().det(), 3);
        assert_eq!(Gcm::preset("B2").unwrap().det(), 2);
        assert_eq!(Gcm::preset("A3").unwrap().det(), 4);
        assert!(Gcm::new(vec![vec![2, -1], vec![0, 2]], vec![1, 1]).is_err());
    }

    #[test]
    fn three_blocks_give_three_theta_pairs() {
        let g = FreeAbGroup::new(3);
        let letters = (0..3)
            .map(|r| LetterSpec {
                label: format!("{r}"),
                block: r,
                g: GrpElt::unit(3, r),
                chi: Character::new((0..3).map(|s| if s == r { Scalar::q() } else { Scalar::one() }).collect()),
            })
            .collect();
        let d = YDDatum::new(g, letters, None).unwrap();
        assert_eq!(theta(&d).len(), 3);
    }
}
