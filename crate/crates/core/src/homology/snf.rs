//! Smith normal form over one-variable coefficient rings.
//!
//! Entries live in GF(2^k)[x] or its Laurent localization; elimination
//! uses exact-division row/column clears where the pivot divides, and 2x2
//! unimodular transforms built from the extended Euclidean algorithm where
//! it does not. The transform route is essential: clearing an inexact
//! entry one quotient at a time re-touches the trailing block once per
//! Euclidean step and blows intermediate degrees up exponentially, while
//! the bundled transform touches it once per entry and strictly lowers the
//! pivot degree.
//!
//! Invariant factors come out in a divisibility chain and are canonicalized
//! to monic lowest-degree representatives: unit scalars are folded away,
//! and over a Laurent ring powers of the variable (units there) are
//! stripped, so e.g. [[x + x^-1]] reports the factor x^2 + 1. Row and
//! column certificates (U, V with U A V = D) are kept on request and can
//! be replayed against the input.

use std::collections::{BTreeMap, BTreeSet};

use crate::field::FieldElem;
use crate::matrix::SparseMat;
use crate::ring::{LaurentPoly, Monomial, Ring, RingError};

use super::HomologyError;

/// Passes through the per-pivot clearing loop before the computation is
/// declared runaway. Every pass that is not the last performs an inexact
/// transform, and each of those strictly lowers the pivot degree, so a
/// legitimate run stays far below this.
const MAX_PASSES_PER_PIVOT: usize = 10_000;

/// Smith normal form: the diagonal in a divisibility chain, plus optional
/// unimodular certificates. A matrix with no nonzero entries reports an
/// empty diagonal (there is no ring handle to mint zeros in); rank and
/// torsion read correctly off it either way.
#[derive(Debug, Clone)]
pub struct SmithForm {
    /// Canonical diagonal entries, nonzero first, zeros trailing.
    pub diag: Vec<LaurentPoly>,
    /// Transforms with U A V = diag (as a rows x cols diagonal matrix);
    /// present when certificates were requested and the matrix had entries.
    pub u: Option<SparseMat<LaurentPoly>>,
    pub v: Option<SparseMat<LaurentPoly>>,
}

impl SmithForm {
    /// Number of nonzero diagonal entries: the rank over the fraction field.
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }

    /// Nonzero non-unit factors: the torsion part of the cokernel.
    pub fn torsion_factors(&self) -> Vec<LaurentPoly> {
        self.diag
            .iter()
            .filter(|d| !d.is_zero() && !d.is_unit())
            .cloned()
            .collect()
    }

    /// True when each nonzero factor divides the next and zeros close the
    /// list; the canonical-form contract of [`smith_form`].
    pub fn is_divisibility_chain(&self) -> bool {
        let Some(first) = self.diag.first() else {
            return true;
        };
        let k = first.ring().field_log();
        for pair in self.diag.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.is_zero() {
                if !b.is_zero() {
                    return false;
                }
                continue;
            }
            if b.is_zero() {
                continue;
            }
            let pa = UPoly::from_laurent_stripped(a, k);
            let pb = UPoly::from_laurent_stripped(b, k);
            let Some((_, rem)) = pb.divmod(&pa, k) else {
                return false;
            };
            if !rem.is_zero() {
                return false;
            }
        }
        true
    }

    /// Replays the certificates against the original matrix; false when
    /// they were not retained or do not multiply back to the diagonal.
    pub fn verify(&self, a: &SparseMat<LaurentPoly>) -> bool {
        let (Some(u), Some(v)) = (&self.u, &self.v) else {
            return false;
        };
        let product = u.mul(a).mul(v);
        let mut expected = SparseMat::new(a.rows(), a.cols());
        for (i, d) in self.diag.iter().enumerate() {
            expected.set(i, i, d.clone());
        }
        product == expected
    }
}

/// Computes the Smith normal form of `a` over its one-variable coefficient
/// ring. `certificates` also accumulates the unimodular U and V.
pub fn smith_form(
    a: &SparseMat<LaurentPoly>,
    certificates: bool,
) -> Result<SmithForm, HomologyError> {
    let ring = match a.iter().next() {
        Some((_, _, p)) => p.ring().clone(),
        None => return Ok(SmithForm { diag: Vec::new(), u: None, v: None }),
    };
    if ring.arity() != 1 {
        return Err(HomologyError::UnsupportedRing(ring.to_string()));
    }
    let k = ring.field_log();
    let laurent = ring.vars()[0].laurent;

    // Load the matrix; over a Laurent ring, pre-scale each column by the
    // unit x^{-m} (m the least negative exponent appearing in the column)
    // so every entry becomes an ordinary polynomial. Writing S for the
    // diagonal of those scalings, the elimination below computes
    // U (A S) V' = D, so the reported right certificate is V = S V'.
    let mut m = WorkMat::new(a.rows(), a.cols(), k);
    let mut u = certificates.then(|| WorkMat::identity(a.rows(), k));
    let mut v = certificates.then(|| WorkMat::identity(a.cols(), k));
    let mut col_shift = vec![0i32; a.cols()];
    if laurent {
        for (_, c, p) in a.iter() {
            if let Some(e) = p.terms().iter().map(|(mono, _)| mono.0[0]).min() {
                col_shift[c] = col_shift[c].min(e);
            }
        }
    }
    for (r, c, p) in a.iter() {
        m.set(r, c, UPoly::from_laurent_shifted(p, -col_shift[c], k));
    }

    eliminate(&mut m, u.as_mut(), v.as_mut())?;

    // Canonicalize: make each factor monic, and over a Laurent ring strip
    // its unit x^a part. Both rewrite D as R D for a diagonal unit matrix
    // R, so the left certificate becomes R U: row i of U is scaled by the
    // inverse leading coefficient and by x^{-a}.
    let n = a.rows().min(a.cols());
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        let Some(p) = m.get(i, i).cloned() else {
            diag.push(LaurentPoly::zero(&ring));
            continue;
        };
        let strip = if laurent { p.trailing_degree() } else { 0 };
        let lead_inv = p
            .leading_coeff()
            .inv()
            .expect("stored entries have nonzero leading coefficients");
        let canonical = p.shift_down(strip).scale(&lead_inv);
        if let Some(u) = &mut u {
            u.scale_row(i, &lead_inv);
            if strip > 0 {
                u.shift_row(i, -(strip as i32));
            }
        }
        diag.push(canonical.to_laurent(&ring, 0).map_err(HomologyError::Ring)?);
    }
    if let Some(v) = &mut v {
        // the load scaled column c by x^{-col_shift[c]}, so S (and with it
        // row c of V = S V') carries that same factor
        for (c, &s) in col_shift.iter().enumerate() {
            if s != 0 {
                v.shift_row(c, -s);
            }
        }
    }

    let u = u.map(|w| w.to_sparse(&ring)).transpose().map_err(HomologyError::Ring)?;
    let v = v.map(|w| w.to_sparse(&ring)).transpose().map_err(HomologyError::Ring)?;
    Ok(SmithForm { diag, u, v })
}

/// Brings `m` to diagonal divisibility-chain form in place, mirroring row
/// operations on `u` and column operations on `v`.
fn eliminate(
    m: &mut WorkMat,
    mut u: Option<&mut WorkMat>,
    mut v: Option<&mut WorkMat>,
) -> Result<(), HomologyError> {
    let n = m.rows.min(m.cols);
    for k in 0..n {
        let Some((pr, pc)) = m.min_degree_pivot(k) else { break };
        m.swap_rows(k, pr);
        if let Some(u) = u.as_deref_mut() {
            u.swap_rows(k, pr);
        }
        m.swap_cols(k, pc);
        if let Some(v) = v.as_deref_mut() {
            v.swap_cols(k, pc);
        }
        let mut passes = 0usize;
        loop {
            passes += 1;
            if passes > MAX_PASSES_PER_PIVOT {
                return Err(HomologyError::Resource {
                    what: "smith normal form clearing passes",
                    reached: passes,
                    cap: MAX_PASSES_PER_PIVOT,
                });
            }
            // clear column k
            for r in m.rows_in_col(k) {
                if r == k {
                    continue;
                }
                let pivot = m.get(k, k).expect("pivot present").clone();
                let entry = m.get(r, k).expect("indexed entry").clone();
                let (q, rem) = entry.divmod(&pivot, m.k).expect("pivot is nonzero");
                if rem.is_zero() {
                    m.row_add(r, k, &q);
                    if let Some(u) = u.as_deref_mut() {
                        u.row_add(r, k, &q);
                    }
                } else {
                    let t = gcd_transform(&pivot, &entry, m.k);
                    m.two_row_transform(k, r, &t);
                    if let Some(u) = u.as_deref_mut() {
                        u.two_row_transform(k, r, &t);
                    }
                }
            }
            // clear row k
            for c in m.cols_in_row(k) {
                if c == k {
                    continue;
                }
                let pivot = m.get(k, k).expect("pivot present").clone();
                let entry = m.get(k, c).expect("indexed entry").clone();
                let (q, rem) = entry.divmod(&pivot, m.k).expect("pivot is nonzero");
                if rem.is_zero() {
                    m.col_add(c, k, &q);
                    if let Some(v) = v.as_deref_mut() {
                        v.col_add(c, k, &q);
                    }
                } else {
                    let t = gcd_transform(&pivot, &entry, m.k);
                    m.two_col_transform(k, c, &t);
                    if let Some(v) = v.as_deref_mut() {
                        v.two_col_transform(k, c, &t);
                    }
                }
            }
            // inexact column transforms refill column k from the rows the
            // partner column met; go around again until both stay clear
            if m.rows_in_col(k).into_iter().any(|r| r != k)
                || m.cols_in_row(k).into_iter().any(|c| c != k)
            {
                continue;
            }
            // divisibility: the finished pivot must divide the whole
            // trailing block, or the chain property fails later
            let pivot = m.get(k, k).expect("pivot present").clone();
            match m.find_nondivisible(k, &pivot) {
                None => break,
                Some(r) => {
                    // absorb the offending row into row k; the next pass
                    // hits an inexact entry and strictly lowers the pivot
                    let one = UPoly::one(m.k);
                    m.row_add(k, r, &one);
                    if let Some(u) = u.as_deref_mut() {
                        u.row_add(k, r, &one);
                    }
                }
            }
        }
    }
    Ok(())
}

/// The 2x2 unimodular transform sending the pair (A, B) = (pivot, entry)
/// to (g, 0): rows (k, r) become (s k + t r, (B/g) k + (A/g) r) where
/// s A + t B = g. The determinant is (s A + t B)/g = 1, and in
/// characteristic 2 the cleared slot (B/g) A + (A/g) B vanishes exactly.
struct GcdTransform {
    s: UPoly,
    t: UPoly,
    b_over_g: UPoly,
    a_over_g: UPoly,
}

fn gcd_transform(a: &UPoly, b: &UPoly, k: u8) -> GcdTransform {
    let (g, s, t) = UPoly::xgcd(a, b, k);
    let (b_over_g, _) = b.divmod(&g, k).expect("gcd divides");
    let (a_over_g, _) = a.divmod(&g, k).expect("gcd divides");
    GcdTransform { s, t, b_over_g, a_over_g }
}

/// Sparse working matrix over GF(2^k)[x]: a row-major store plus a
/// per-column index of occupied rows, so row and column operations both
/// stay proportional to the entries they touch. `row_shift` holds pending
/// powers of x per row, applied at conversion time (certificate rows can
/// legitimately carry negative exponents over a Laurent ring).
struct WorkMat {
    rows: usize,
    cols: usize,
    k: u8,
    row_data: Vec<BTreeMap<usize, UPoly>>,
    col_rows: Vec<BTreeSet<usize>>,
    row_shift: Vec<i32>,
}

impl WorkMat {
    fn new(rows: usize, cols: usize, k: u8) -> WorkMat {
        WorkMat {
            rows,
            cols,
            k,
            row_data: vec![BTreeMap::new(); rows],
            col_rows: vec![BTreeSet::new(); cols],
            row_shift: vec![0; rows],
        }
    }

    fn identity(n: usize, k: u8) -> WorkMat {
        let mut m = WorkMat::new(n, n, k);
        for i in 0..n {
            m.set(i, i, UPoly::one(k));
        }
        m
    }

    fn get(&self, r: usize, c: usize) -> Option<&UPoly> {
        self.row_data[r].get(&c)
    }

    fn set(&mut self, r: usize, c: usize, p: UPoly) {
        if p.is_zero() {
            self.row_data[r].remove(&c);
            self.col_rows[c].remove(&r);
        } else {
            self.row_data[r].insert(c, p);
            self.col_rows[c].insert(r);
        }
    }

    fn rows_in_col(&self, c: usize) -> Vec<usize> {
        self.col_rows[c].iter().copied().collect()
    }

    fn cols_in_row(&self, r: usize) -> Vec<usize> {
        self.row_data[r].keys().copied().collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.row_data.swap(a, b);
        self.row_shift.swap(a, b);
        let touched: BTreeSet<usize> = self.row_data[a]
            .keys()
            .chain(self.row_data[b].keys())
            .copied()
            .collect();
        for c in touched {
            if self.row_data[a].contains_key(&c) {
                self.col_rows[c].insert(a);
            } else {
                self.col_rows[c].remove(&a);
            }
            if self.row_data[b].contains_key(&c) {
                self.col_rows[c].insert(b);
            } else {
                self.col_rows[c].remove(&b);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let touched: BTreeSet<usize> =
            self.col_rows[a].union(&self.col_rows[b]).copied().collect();
        for r in touched {
            let pa = self.row_data[r].remove(&a);
            let pb = self.row_data[r].remove(&b);
            self.col_rows[a].remove(&r);
            self.col_rows[b].remove(&r);
            if let Some(p) = pb {
                self.row_data[r].insert(a, p);
                self.col_rows[a].insert(r);
            }
            if let Some(p) = pa {
                self.row_data[r].insert(b, p);
                self.col_rows[b].insert(r);
            }
        }
    }

    /// row dst += q * row src.
    fn row_add(&mut self, dst: usize, src: usize, q: &UPoly) {
        if q.is_zero() {
            return;
        }
        debug_assert_eq!(self.row_shift[dst], self.row_shift[src]);
        let src_entries: Vec<(usize, UPoly)> =
            self.row_data[src].iter().map(|(&c, p)| (c, p.clone())).collect();
        for (c, p) in src_entries {
            let add = q.mul(&p, self.k);
            let cur = self.get(dst, c).cloned().unwrap_or_else(UPoly::zero);
            self.set(dst, c, cur.add(&add, self.k));
        }
    }

    /// col dst += q * col src.
    fn col_add(&mut self, dst: usize, src: usize, q: &UPoly) {
        if q.is_zero() {
            return;
        }
        for r in self.rows_in_col(src) {
            let p = self.get(r, src).expect("indexed entry").clone();
            let add = q.mul(&p, self.k);
            let cur = self.get(r, dst).cloned().unwrap_or_else(UPoly::zero);
            self.set(r, dst, cur.add(&add, self.k));
        }
    }

    /// Rows (k, r) <- (s k + t r, (B/g) k + (A/g) r).
    fn two_row_transform(&mut self, k: usize, r: usize, t: &GcdTransform) {
        debug_assert_eq!(self.row_shift[k], self.row_shift[r]);
        let cols: BTreeSet<usize> = self.row_data[k]
            .keys()
            .chain(self.row_data[r].keys())
            .copied()
            .collect();
        for c in cols {
            let x = self.get(k, c).cloned().unwrap_or_else(UPoly::zero);
            let y = self.get(r, c).cloned().unwrap_or_else(UPoly::zero);
            let nk = t.s.mul(&x, self.k).add(&t.t.mul(&y, self.k), self.k);
            let nr = t.b_over_g.mul(&x, self.k).add(&t.a_over_g.mul(&y, self.k), self.k);
            self.set(k, c, nk);
            self.set(r, c, nr);
        }
    }

    /// Columns (k, c) <- (s k + t c, (B/g) k + (A/g) c).
    fn two_col_transform(&mut self, k: usize, c: usize, t: &GcdTransform) {
        let rows: BTreeSet<usize> =
            self.col_rows[k].union(&self.col_rows[c]).copied().collect();
        for r in rows {
            let x = self.get(r, k).cloned().unwrap_or_else(UPoly::zero);
            let y = self.get(r, c).cloned().unwrap_or_else(UPoly::zero);
            let nk = t.s.mul(&x, self.k).add(&t.t.mul(&y, self.k), self.k);
            let nc = t.b_over_g.mul(&x, self.k).add(&t.a_over_g.mul(&y, self.k), self.k);
            self.set(r, k, nk);
            self.set(r, c, nc);
        }
    }

    fn scale_row(&mut self, r: usize, c: &FieldElem) {
        for col in self.cols_in_row(r) {
            let p = self.get(r, col).expect("indexed entry").scale(c);
            self.set(r, col, p);
        }
    }

    /// Multiplies row r by x^shift, deferred to conversion time.
    fn shift_row(&mut self, r: usize, shift: i32) {
        self.row_shift[r] += shift;
    }

    /// Lowest-degree entry in the trailing block (both indices >= k), ties
    /// broken by position for determinism.
    fn min_degree_pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for r in k..self.rows {
            for (&c, p) in self.row_data[r].range(k..) {
                let d = p.degree().expect("stored entries are nonzero");
                let candidate = (d, r, c);
                if best.is_none_or(|b| candidate < b) {
                    best = Some(candidate);
                }
            }
        }
        best.map(|(_, r, c)| (r, c))
    }

    /// A row beyond k holding an entry the pivot does not divide.
    fn find_nondivisible(&self, k: usize, pivot: &UPoly) -> Option<usize> {
        for r in (k + 1)..self.rows {
            for (_, p) in self.row_data[r].range((k + 1)..) {
                let (_, rem) = p.divmod(pivot, self.k).expect("pivot is nonzero");
                if !rem.is_zero() {
                    return Some(r);
                }
            }
        }
        None
    }

    fn to_sparse(&self, ring: &Ring) -> Result<SparseMat<LaurentPoly>, RingError> {
        let mut out = SparseMat::new(self.rows, self.cols);
        for (r, row) in self.row_data.iter().enumerate() {
            for (&c, p) in row {
                out.set(r, c, p.to_laurent(ring, self.row_shift[r])?);
            }
        }
        Ok(out)
    }
}

/// Dense univariate polynomial over GF(2^k): `coeffs[i]` multiplies x^i,
/// the leading coefficient is nonzero, and zero is the empty vector.
#[derive(Debug, Clone, PartialEq)]
struct UPoly {
    coeffs: Vec<FieldElem>,
}

impl UPoly {
    fn zero() -> UPoly {
        UPoly { coeffs: Vec::new() }
    }

    fn one(k: u8) -> UPoly {
        UPoly { coeffs: vec![FieldElem::one(k)] }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn leading_coeff(&self) -> FieldElem {
        *self.coeffs.last().expect("nonzero polynomial")
    }

    /// Index of the lowest nonzero coefficient; 0 for the zero polynomial.
    fn trailing_degree(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    fn trim(mut coeffs: Vec<FieldElem>) -> UPoly {
        while coeffs.last().is_some_and(FieldElem::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    fn add(&self, other: &UPoly, k: u8) -> UPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![FieldElem::zero(k); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] = out[i].add(c);
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] = out[i].add(c);
        }
        UPoly::trim(out)
    }

    fn mul(&self, other: &UPoly, k: u8) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![FieldElem::zero(k); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UPoly::trim(out)
    }

    fn scale(&self, c: &FieldElem) -> UPoly {
        if c.is_zero() {
            return UPoly::zero();
        }
        UPoly { coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect() }
    }

    /// Divides x^sh out; callers guarantee the low coefficients vanish.
    fn shift_down(&self, sh: usize) -> UPoly {
        debug_assert!(self.coeffs.iter().take(sh).all(FieldElem::is_zero));
        UPoly { coeffs: self.coeffs[sh.min(self.coeffs.len())..].to_vec() }
    }

    /// Quotient and remainder; None when dividing by zero.
    fn divmod(&self, other: &UPoly, k: u8) -> Option<(UPoly, UPoly)> {
        let db = other.degree()?;
        let lead_inv = other.leading_coeff().inv().ok()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= db {
            return Some((UPoly::zero(), UPoly::trim(rem)));
        }
        let mut quot = vec![FieldElem::zero(k); rem.len() - db];
        while rem.len() > db {
            let lead = *rem.last().expect("nonempty");
            let sh = rem.len() - 1 - db;
            if !lead.is_zero() {
                let factor = lead.mul(&lead_inv);
                quot[sh] = factor;
                for (i, c) in other.coeffs.iter().enumerate() {
                    rem[sh + i] = rem[sh + i].add(&factor.mul(c));
                }
            }
            rem.pop();
        }
        Some((UPoly::trim(quot), UPoly::trim(rem)))
    }

    /// Extended Euclid: (g, s, t) with s a + t b = g.
    fn xgcd(a: &UPoly, b: &UPoly, k: u8) -> (UPoly, UPoly, UPoly) {
        let mut r0 = a.clone();
        let mut r1 = b.clone();
        let mut s0 = UPoly::one(k);
        let mut s1 = UPoly::zero();
        let mut t0 = UPoly::zero();
        let mut t1 = UPoly::one(k);
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1, k).expect("nonzero divisor");
            let ns = s0.add(&q.mul(&s1, k), k);
            let nt = t0.add(&q.mul(&t1, k), k);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = ns;
            t0 = t1;
            t1 = nt;
        }
        (r0, s0, t0)
    }

    /// Reads a one-variable Laurent polynomial with every exponent shifted
    /// by `shift`; callers arrange the shift so the results are ordinary
    /// polynomial exponents.
    fn from_laurent_shifted(p: &LaurentPoly, shift: i32, k: u8) -> UPoly {
        let mut coeffs: Vec<FieldElem> = Vec::new();
        for (mono, c) in p.terms() {
            let e = mono.0[0] + shift;
            debug_assert!(e >= 0, "column normalization leaves exponents nonnegative");
            let e = e as usize;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, FieldElem::zero(k));
            }
            coeffs[e] = coeffs[e].add(c);
        }
        UPoly::trim(coeffs)
    }

    /// Reads a Laurent polynomial ignoring its unit monomial part, for
    /// divisibility questions where units are irrelevant.
    fn from_laurent_stripped(p: &LaurentPoly, k: u8) -> UPoly {
        let min_exp = p.terms().iter().map(|(m, _)| m.0[0]).min().unwrap_or(0);
        UPoly::from_laurent_shifted(p, -min_exp.min(0), k)
    }

    /// Writes the polynomial back with every exponent shifted by `shift`.
    fn to_laurent(&self, ring: &Ring, shift: i32) -> Result<LaurentPoly, RingError> {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (Monomial(vec![e as i32 + shift]), *c));
        LaurentPoly::from_terms(ring, terms)
    }
}
