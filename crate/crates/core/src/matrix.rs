//! Sparse matrices over exact scalars, with Gaussian elimination for the
//! field tiers.
//!
//! Matrices use the column-vector convention: a matrix with `rows = m` and
//! `cols = n` represents a map from an n-dimensional source to an
//! m-dimensional target, and `a.mul(&b)` is the composite "apply b, then a".

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::field::FieldElem;
use crate::ring::LaurentPoly;

/// Exact coefficient arithmetic in characteristic 2 (addition is its own
/// inverse, so no negation is needed).
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_unit(&self) -> bool;
    /// Multiplicative inverse; callers must check `is_unit` first.
    fn inv_unit(&self) -> Self;
}

impl Scalar for FieldElem {
    fn is_zero(&self) -> bool {
        FieldElem::is_zero(self)
    }

    fn add(&self, other: &Self) -> Self {
        FieldElem::add(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        FieldElem::mul(self, other)
    }

    fn is_unit(&self) -> bool {
        !FieldElem::is_zero(self)
    }

    fn inv_unit(&self) -> Self {
        FieldElem::inv(self).expect("inv_unit requires a nonzero element")
    }
}

impl Scalar for LaurentPoly {
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }

    fn add(&self, other: &Self) -> Self {
        LaurentPoly::add(self, other).expect("matrix entries share one ring")
    }

    fn mul(&self, other: &Self) -> Self {
        LaurentPoly::mul(self, other).expect("matrix entries share one ring")
    }

    fn is_unit(&self) -> bool {
        LaurentPoly::is_unit(self)
    }

    fn inv_unit(&self) -> Self {
        LaurentPoly::inv_unit(self).expect("inv_unit requires a unit")
    }
}

/// A sparse vector, used for kernel bases and homology representatives.
pub type SparseVec<T> = BTreeMap<usize, T>;

/// Adds `v` into `acc` at `index`, dropping the entry if it cancels.
pub fn vec_add_into<T: Scalar>(acc: &mut SparseVec<T>, index: usize, v: &T) {
    if v.is_zero() {
        return;
    }
    match acc.remove(&index) {
        None => {
            acc.insert(index, v.clone());
        }
        Some(old) => {
            let sum = old.add(v);
            if !sum.is_zero() {
                acc.insert(index, sum);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "MatData<T>", into = "MatData<T>")]
#[serde(bound = "T: Scalar + Serialize + serde::de::DeserializeOwned")]
pub struct SparseMat<T: Scalar> {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), T>,
}

#[derive(Serialize, Deserialize)]
struct MatData<T> {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> From<MatData<T>> for SparseMat<T> {
    fn from(d: MatData<T>) -> Self {
        let mut m = SparseMat::new(d.rows, d.cols);
        for (r, c, v) in d.entries {
            m.add_entry(r, c, &v);
        }
        m
    }
}

impl<T: Scalar> From<SparseMat<T>> for MatData<T> {
    fn from(m: SparseMat<T>) -> Self {
        MatData {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries.into_iter().map(|((r, c), v)| (r, c, v)).collect(),
        }
    }
}

impl<T: Scalar> SparseMat<T> {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize, one: T) -> Self {
        let mut m = SparseMat::new(n, n);
        for i in 0..n {
            m.entries.insert((i, i), one.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&T> {
        self.entries.get(&(row, col))
    }

    /// Sets the entry, removing it if the value is zero.
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        assert!(row < self.rows && col < self.cols, "entry out of range");
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    /// Adds into the entry (characteristic-2 accumulate).
    pub fn add_entry(&mut self, row: usize, col: usize, value: &T) {
        assert!(row < self.rows && col < self.cols, "entry out of range");
        if value.is_zero() {
            return;
        }
        match self.entries.remove(&(row, col)) {
            None => {
                self.entries.insert((row, col), value.clone());
            }
            Some(old) => {
                let sum = old.add(value);
                if !sum.is_zero() {
                    self.entries.insert((row, col), sum);
                }
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &T)> {
        self.entries
            .range((r, 0)..=(r, usize::MAX))
            .map(|(&(_, c), v)| (c, v))
    }

    /// The matrix as columns of sparse vectors.
    pub fn columns(&self) -> Vec<SparseVec<T>> {
        let mut cols: Vec<SparseVec<T>> = vec![BTreeMap::new(); self.cols];
        for (&(r, c), v) in &self.entries {
            cols[c].insert(r, v.clone());
        }
        cols
    }

    pub fn transpose(&self) -> SparseMat<T> {
        let mut t = SparseMat::new(self.cols, self.rows);
        for (&(r, c), v) in &self.entries {
            t.entries.insert((c, r), v.clone());
        }
        t
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn mul(&self, other: &SparseMat<T>) -> SparseMat<T> {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = SparseMat::new(self.rows, other.cols);
        // Group the left factor by column to walk matching inner indices.
        let mut left_by_col: BTreeMap<usize, Vec<(usize, &T)>> = BTreeMap::new();
        for (&(r, c), v) in &self.entries {
            left_by_col.entry(c).or_default().push((r, v));
        }
        for (&(k, c), bv) in &other.entries {
            if let Some(lefts) = left_by_col.get(&k) {
                for &(r, av) in lefts {
                    out.add_entry(r, c, &av.mul(bv));
                }
            }
        }
        out
    }

    /// Applies the matrix to a sparse column vector.
    pub fn apply(&self, v: &SparseVec<T>) -> SparseVec<T> {
        let mut out = BTreeMap::new();
        for (&(r, c), a) in &self.entries {
            if let Some(x) = v.get(&c) {
                vec_add_into(&mut out, r, &a.mul(x));
            }
        }
        out
    }

    /// Copies `m` into this matrix with its top-left corner at (r0, c0),
    /// accumulating over anything already present.
    pub fn insert_block(&mut self, r0: usize, c0: usize, m: &SparseMat<T>) {
        assert!(r0 + m.rows <= self.rows && c0 + m.cols <= self.cols);
        for (&(r, c), v) in &m.entries {
            self.add_entry(r0 + r, c0 + c, v);
        }
    }

    /// Keeps the selected rows and columns, renumbering them densely in the
    /// given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMat<T> {
        let row_pos: BTreeMap<usize, usize> =
            rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let col_pos: BTreeMap<usize, usize> =
            cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut out = SparseMat::new(rows.len(), cols.len());
        for (&(r, c), v) in &self.entries {
            if let (Some(&ri), Some(&ci)) = (row_pos.get(&r), col_pos.get(&c)) {
                out.entries.insert((ri, ci), v.clone());
            }
        }
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SparseMat<U> {
        let mut out = SparseMat::new(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            let w = f(v);
            if !w.is_zero() {
                out.entries.insert((r, c), w);
            }
        }
        out
    }

    /// Fallible entry-wise map, for specialization and base change.
    pub fn try_map<U: Scalar, E>(
        &self,
        mut f: impl FnMut(&T) -> Result<U, E>,
    ) -> Result<SparseMat<U>, E> {
        let mut out = SparseMat::new(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            let w = f(v)?;
            if !w.is_zero() {
                out.entries.insert((r, c), w);
            }
        }
        Ok(out)
    }
}

/// Row echelon form of a matrix over a field, kept as reduced sparse rows
/// for rank queries and membership tests.
#[derive(Debug, Clone)]
pub struct Echelon {
    /// Reduced rows, each led by a pivot with coefficient 1; sorted by
    /// pivot column.
    rows: Vec<SparseVec<FieldElem>>,
    ambient: usize,
}

impl Echelon {
    /// Builds an echelon basis of the row space of `m`.
    pub fn of_rows(m: &SparseMat<FieldElem>) -> Echelon {
        let mut e = Echelon { rows: Vec::new(), ambient: m.cols() };
        let mut current: SparseVec<FieldElem> = BTreeMap::new();
        let mut current_row = usize::MAX;
        for (r, c, v) in m.iter() {
            if r != current_row {
                if !current.is_empty() {
                    e.insert(std::mem::take(&mut current));
                }
                current_row = r;
            }
            current.insert(c, *v);
        }
        if !current.is_empty() {
            e.insert(current);
        }
        e
    }

    /// Builds an echelon basis of the column space of `m`.
    pub fn of_columns(m: &SparseMat<FieldElem>) -> Echelon {
        let mut e = Echelon { rows: Vec::new(), ambient: m.rows() };
        for col in m.columns() {
            if !col.is_empty() {
                e.insert(col);
            }
        }
        e
    }

    pub fn empty(ambient: usize) -> Echelon {
        Echelon { rows: Vec::new(), ambient }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Reduces `v` against the basis in place; afterwards `v` is zero iff
    /// it lay in the span.
    pub fn reduce(&self, v: &mut SparseVec<FieldElem>) {
        // Rows are sorted by pivot; a single pass suffices because every
        // stored row is fully reduced against the others.
        for row in &self.rows {
            let &pivot = row.keys().next().expect("echelon rows are nonzero");
            if let Some(c) = v.get(&pivot).cloned() {
                if c.is_zero() {
                    v.remove(&pivot);
                    continue;
                }
                for (&idx, w) in row {
                    vec_add_into(v, idx, &c.mul(w));
                }
            }
        }
    }

    /// Adds a vector to the span; returns true if it was independent.
    pub fn insert(&mut self, mut v: SparseVec<FieldElem>) -> bool {
        self.reduce(&mut v);
        let Some((&pivot, lead)) = v.iter().next() else {
            return false;
        };
        let inv = lead.inv().expect("leading coefficient is nonzero");
        let scaled: SparseVec<FieldElem> =
            v.iter().map(|(&i, c)| (i, c.mul(&inv))).collect();
        // Back-substitute into existing rows so reduce() stays one-pass.
        for row in &mut self.rows {
            if let Some(c) = row.get(&pivot).cloned() {
                for (&idx, w) in &scaled {
                    vec_add_into(row, idx, &c.mul(w));
                }
            }
        }
        let pos = self
            .rows
            .binary_search_by_key(&pivot, |r| *r.keys().next().expect("nonzero"))
            .expect_err("pivot column is new");
        self.rows.insert(pos, scaled);
        true
    }

    pub fn contains(&self, v: &SparseVec<FieldElem>) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_empty()
    }
}

/// Rank of a matrix over a field.
pub fn rank(m: &SparseMat<FieldElem>) -> usize {
    Echelon::of_rows(m).rank()
}

/// A basis of the kernel of `m` over GF(2^k), as coordinate vectors of the
/// source. The field size must be supplied because a zero matrix carries
/// no entries to infer it from.
pub fn kernel_basis(m: &SparseMat<FieldElem>, k: u8) -> Vec<SparseVec<FieldElem>> {
    // Column-reduce while tracking the combination used: pair each column
    // with a coordinate tail; a column that reduces to zero hands its tail
    // to the kernel, and a column with a fresh pivot joins the basis.
    let mut reduced: Vec<(usize, SparseVec<FieldElem>, SparseVec<FieldElem>)> = Vec::new();
    let mut kernel = Vec::new();
    for (j, mut top) in m.columns().into_iter().enumerate() {
        let mut tail: SparseVec<FieldElem> = BTreeMap::new();
        tail.insert(j, FieldElem::one(k));
        let mut consumed = false;
        while let Some((&lead, c)) = top.iter().next() {
            let c = *c;
            match reduced.binary_search_by_key(&lead, |(l, _, _)| *l) {
                Ok(pos) => {
                    let (_, rt, rtail) = reduced[pos].clone();
                    for (&i, v) in &rt {
                        vec_add_into(&mut top, i, &c.mul(v));
                    }
                    for (&i, v) in &rtail {
                        vec_add_into(&mut tail, i, &c.mul(v));
                    }
                }
                Err(pos) => {
                    let inv = c.inv().expect("nonzero leading entry");
                    let ntop: SparseVec<FieldElem> =
                        top.iter().map(|(&i, v)| (i, v.mul(&inv))).collect();
                    let ntail: SparseVec<FieldElem> =
                        tail.iter().map(|(&i, v)| (i, v.mul(&inv))).collect();
                    reduced.insert(pos, (lead, ntop, ntail));
                    consumed = true;
                    break;
                }
            }
        }
        if !consumed {
            // Tails of earlier columns only touch indices below j, so the
            // e_j coordinate survives and the tail is nonzero.
            kernel.push(tail);
        }
    }
    kernel
}


#[cfg(test)]
mod tests {
    use super::*;

    fn f2(b: u32) -> FieldElem {
        FieldElem::new(1, b).unwrap()
    }

    fn mat(rows: usize, cols: usize, data: &[(usize, usize, u32)]) -> SparseMat<FieldElem> {
        let mut m = SparseMat::new(rows, cols);
        for &(r, c, v) in data {
            m.set(r, c, f2(v));
        }
        m
    }

    #[test]
    fn product_and_transpose() {
        let a = mat(2, 3, &[(0, 0, 1), (0, 2, 1), (1, 1, 1)]);
        let b = mat(3, 2, &[(0, 0, 1), (1, 0, 1), (2, 1, 1)]);
        let ab = a.mul(&b);
        assert_eq!(ab.get(0, 0), Some(&f2(1)));
        assert_eq!(ab.get(0, 1), Some(&f2(1)));
        assert_eq!(ab.get(1, 0), Some(&f2(1)));
        assert_eq!(ab.get(1, 1), None);
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn additive_cancellation_drops_entries() {
        let mut m = SparseMat::new(1, 1);
        m.add_entry(0, 0, &f2(1));
        m.add_entry(0, 0, &f2(1));
        assert!(m.is_zero());
    }

    #[test]
    fn rank_and_kernel_over_f2() {
        // Rows: x+y, y+z, x+z: rank 2, kernel of the column map is (1,1,1).
        let m = mat(3, 3, &[(0, 0, 1), (0, 1, 1), (1, 1, 1), (1, 2, 1), (2, 0, 1), (2, 2, 1)]);
        assert_eq!(rank(&m), 2);
        let k = kernel_basis(&m, 1);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].len(), 3);
        // The kernel vector really is annihilated.
        assert!(m.apply(&k[0]).is_empty());
    }

    #[test]
    fn kernel_of_injective_map_is_empty() {
        let m = mat(3, 2, &[(0, 0, 1), (1, 1, 1), (2, 0, 1), (2, 1, 1)]);
        assert_eq!(rank(&m), 2);
        assert!(kernel_basis(&m, 1).is_empty());
    }

    #[test]
    fn kernel_over_gf4() {
        // One column equals g * the other, over GF(4).
        let g = FieldElem::gen(2);
        let one = FieldElem::one(2);
        let mut m = SparseMat::new(2, 2);
        m.set(0, 0, one);
        m.set(1, 0, g);
        m.set(0, 1, g);
        m.set(1, 1, g.mul(&g));
        assert_eq!(rank(&m), 1);
        let k = kernel_basis(&m, 2);
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_empty());
    }

    #[test]
    fn echelon_membership() {
        let m = mat(2, 3, &[(0, 0, 1), (0, 1, 1), (1, 1, 1), (1, 2, 1)]);
        let e = Echelon::of_rows(&m);
        assert_eq!(e.rank(), 2);
        let mut v: SparseVec<FieldElem> = BTreeMap::new();
        v.insert(0, f2(1));
        v.insert(2, f2(1));
        assert!(e.contains(&v)); // (x+y)+(y+z)
        v.insert(1, f2(1));
        assert!(!e.contains(&v));
    }

    #[test]
    fn insert_block_and_submatrix() {
        let a = mat(2, 2, &[(0, 0, 1), (1, 1, 1)]);
        let mut big = SparseMat::new(3, 3);
        big.insert_block(1, 1, &a);
        assert_eq!(big.get(1, 1), Some(&f2(1)));
        assert_eq!(big.get(2, 2), Some(&f2(1)));
        let sub = big.submatrix(&[1, 2], &[1, 2]);
        assert_eq!(sub, a);
    }

    #[test]
    fn serde_round_trip() {
        let m = mat(2, 3, &[(0, 2, 1), (1, 0, 1)]);
        let text = serde_json::to_string(&m).unwrap();
        let back: SparseMat<FieldElem> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
