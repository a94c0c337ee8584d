//! Sparse exact Gaussian elimination over ℚ(q).

use std::collections::BTreeMap;

use crate::scalars::Scalar;

pub type SparseVec = BTreeMap<usize, Scalar>;

/// Incrementally maintained row-echelon basis.  Every stored row is
/// normalized to have leading coefficient 1 at its pivot column.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the stored rows.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        loop {
            let pivot = v.iter().find(|(c, _)| self.rows.contains_key(c)).map(|(c, x)| (*c, x.clone()));
            let Some((col, coef)) = pivot else { return v };
            let row = &self.rows[&col];
            for (k, x) in row {
                let entry = v.entry(*k).or_default();
                *entry = entry.sub(&coef.mul(x));
                if entry.is_zero() {
                    v.remove(k);
                }
            }
        }
    }

    /// Insert a vector; returns `true` if it was independent of the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let v = self.reduce(v);
        let Some((&col, lead)) = v.iter().next() else { return false };
        let inv = lead.inv().expect("nonzero pivot");
        let v: SparseVec = v.iter().map(|(k, x)| (*k, x.mul(&inv))).collect();
        // Keep the basis fully reduced at the new pivot column.
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(&col).cloned() {
                for (k, x) in &v {
                    let entry = row.entry(*k).or_default();
                    *entry = entry.sub(&c.mul(x));
                    if entry.is_zero() {
                        row.remove(k);
                    }
                }
            }
        }
        self.rows.insert(col, v);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &usize> {
        self.rows.keys()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&usize, &SparseVec)> {
        self.rows.iter()
    }
}

pub fn rank(rows: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Basis of `{x | A x = 0}` for the matrix with the given sparse rows and
/// `ncols` columns.
pub fn nullspace(rows: impl IntoIterator<Item = SparseVec>, ncols: usize) -> Vec<SparseVec> {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    let pivots: std::collections::BTreeSet<usize> = e.pivots().copied().collect();
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = SparseVec::new();
        x.insert(free, Scalar::one());
        for (p, row) in e.rows() {
            if let Some(c) = row.get(&free) {
                x.insert(*p, c.neg());
            }
        }
        out.push(x);
    }
    out
}

/// One solution of `A x = b` (free variables set to zero), or `None` if the
/// system is inconsistent.  Each row is `(coefficients, right-hand side)`.
pub fn solve(rows: impl IntoIterator<Item = (SparseVec, Scalar)>, ncols: usize) -> Option<Vec<Scalar>> {
    let mut e = Echelon::new();
    for (mut r, b) in rows {
        if !b.is_zero() {
            r.insert(ncols, b);
        }
        e.insert(r);
    }
    if e.rows.contains_key(&ncols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); ncols];
    for (p, row) in e.rows() {
        x[*p] = row.get(&ncols).cloned().unwrap_or_default();
    }
    Some(x)
}
