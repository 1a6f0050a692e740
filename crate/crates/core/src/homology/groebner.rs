//! Finite presentations of homology over two-variable polynomial
//! coefficients, via Groebner bases of submodules of free modules.
//!
//! The coefficient ring here is not a PID, so invariant factors do not
//! exist; instead each degree gets a presentation H = R^g / N. The kernel
//! of the outgoing differential is computed as the syzygy module of its
//! columns, boundary columns are expressed in kernel coordinates by normal
//! form against an augmented basis, and the resulting relation set is
//! canonicalized: reduced module Groebner basis, then elimination of
//! generators that some relation exhibits as redundant (unit entries),
//! iterated to a fixpoint. The free rank is the rank of the presented
//! module over the fraction field, computed exactly by fraction-free
//! elimination on the relation matrix.
//!
//! Module term order: position over term, positions ordered by index
//! (lower index greater), graded lexicographic within a position. Making
//! witness positions follow all main positions turns one basis computation
//! into an elimination order, so syzygies and membership certificates fall
//! out of the same object.

use std::collections::{BTreeMap, VecDeque};

use crate::complex::GradedFreeComplex;
use crate::field::FieldElem;
use crate::matrix::SparseMat;
use crate::ring::{LaurentPoly, Monomial, Ring};

use super::{DegreeData, HomologyError, HomologyModule, Presentation, Tier};

/// Resource ceilings for basis computations. Exceeding either is a hard
/// error; partial answers are never returned.
#[derive(Debug, Clone, Copy)]
pub struct GbCaps {
    /// Maximum terms held across a working basis at any moment.
    pub max_terms: usize,
    /// Maximum length of the critical-pair queue.
    pub max_pairs: usize,
}

impl Default for GbCaps {
    fn default() -> Self {
        GbCaps { max_terms: 1_000_000, max_pairs: 250_000 }
    }
}

/// Presentations of homology in every degree, under default resource caps.
pub fn groebner_presentation(c: &GradedFreeComplex) -> Result<HomologyModule, HomologyError> {
    groebner_presentation_with_caps(c, &GbCaps::default())
}

/// Presentations of homology in every degree. The coefficient ring must be
/// a two-variable polynomial ring (no Laurent variables).
pub fn groebner_presentation_with_caps(
    c: &GradedFreeComplex,
    caps: &GbCaps,
) -> Result<HomologyModule, HomologyError> {
    let ring = c.ring();
    if ring.arity() != 2 || ring.vars().iter().any(|v| v.laurent) {
        return Err(HomologyError::UnsupportedRing(ring.to_string()));
    }
    let k = ring.field_log();
    let mut degrees = BTreeMap::new();
    for j in c.degree_list() {
        let n = c.rank(j);
        if n == 0 {
            continue;
        }
        let kernel: Vec<ModVec> = match c.differential(j) {
            Some(d) => {
                let cols: Vec<ModVec> =
                    (0..d.cols()).map(|col| column_vector(d, col, k)).collect();
                Submodule::new(cols, d.rows(), k, caps)?.syzygies()
            }
            None => (0..n).map(|i| ModVec::basis_vector(i, k)).collect(),
        };
        let ksub = Submodule::new(kernel.clone(), n, k, caps)?;
        let mut rows: Vec<ModVec> = ksub.syzygies();
        if let Some(din) = c.differential(j + 1) {
            for col in 0..din.cols() {
                let x = column_vector(din, col, k);
                let w = ksub
                    .coordinates(&x, caps)?
                    .expect("boundary columns lie in the kernel");
                rows.push(w);
            }
        }
        let (gens, rows) = canonical_presentation(kernel.len(), rows, caps)?;
        let free_rank = gens - generic_rank(&rows, gens, ring);
        let relations = rows_to_matrix(&rows, gens, ring);
        let data = DegreeData {
            free_rank,
            presentation: Some(Presentation { generators: gens, relations }),
            ..DegreeData::default()
        };
        if !data.is_trivial() {
            degrees.insert(j, data);
        }
    }
    Ok(HomologyModule {
        system: c.system().id().to_string(),
        tier: Tier::Groebner,
        reduced: c.is_reduced(),
        specialization: None,
        degrees,
    })
}

/// One monomial slot of a free-module element. The ordering implements the
/// term order: lower position dominates; within a position, higher total
/// degree dominates, lexicographic on exponents to break ties.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ModTerm {
    pos: usize,
    mono: Monomial,
}

impl Ord for ModTerm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .pos
            .cmp(&self.pos)
            .then_with(|| {
                let da: i64 = self.mono.0.iter().map(|&e| i64::from(e)).sum();
                let db: i64 = other.mono.0.iter().map(|&e| i64::from(e)).sum();
                da.cmp(&db)
            })
            .then_with(|| self.mono.0.cmp(&other.mono.0))
    }
}

impl PartialOrd for ModTerm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    debug_assert_eq!(a.0.len(), b.0.len());
    Monomial(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
}

fn mono_divides(a: &Monomial, b: &Monomial) -> bool {
    a.0.iter().zip(&b.0).all(|(x, y)| x <= y)
}

/// b / a, assuming divisibility.
fn mono_quot(b: &Monomial, a: &Monomial) -> Monomial {
    Monomial(b.0.iter().zip(&a.0).map(|(x, y)| x - y).collect())
}

fn mono_lcm(a: &Monomial, b: &Monomial) -> Monomial {
    Monomial(a.0.iter().zip(&b.0).map(|(x, y)| *x.max(y)).collect())
}

/// Element of a free module R^n: finitely many (position, monomial) slots
/// with nonzero field coefficients. The map is ordered by the term order,
/// so the greatest key is the leading term.
#[derive(Debug, Clone, PartialEq)]
struct ModVec {
    terms: BTreeMap<ModTerm, FieldElem>,
    k: u8,
}

impl ModVec {
    fn zero(k: u8) -> ModVec {
        ModVec { terms: BTreeMap::new(), k }
    }

    fn basis_vector(pos: usize, k: u8) -> ModVec {
        let mut v = ModVec::zero(k);
        v.add_term(ModTerm { pos, mono: Monomial(vec![0, 0]) }, FieldElem::one(k));
        v
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn lead(&self) -> Option<(&ModTerm, &FieldElem)> {
        self.terms.last_key_value()
    }

    fn add_term(&mut self, t: ModTerm, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(t) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// self += coeff * x^mono * other. Characteristic 2 makes this the
    /// subtraction used by reductions as well.
    fn axpy(&mut self, mono: &Monomial, coeff: &FieldElem, other: &ModVec) {
        if coeff.is_zero() {
            return;
        }
        for (t, c) in &other.terms {
            let nt = ModTerm { pos: t.pos, mono: mono_mul(mono, &t.mono) };
            self.add_term(nt, coeff.mul(c));
        }
    }

    /// self += poly * other, with the polynomial acting diagonally.
    #[cfg(test)]
    fn poly_axpy(&mut self, poly: &LaurentPoly, other: &ModVec) {
        for (mono, c) in poly.terms() {
            self.axpy(mono, c, other);
        }
    }

    /// Scales so the leading coefficient is one.
    fn monic(mut self) -> ModVec {
        let Some((_, &lc)) = self.lead() else { return self };
        if lc.is_one() {
            return self;
        }
        let inv = lc.inv().expect("leading coefficients are nonzero");
        for c in self.terms.values_mut() {
            *c = c.mul(&inv);
        }
        self
    }

    /// The polynomial sitting at one position.
    fn poly_at(&self, pos: usize, ring: &Ring) -> LaurentPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(t, _)| t.pos == pos)
            .map(|(t, c)| (t.mono.clone(), *c));
        LaurentPoly::from_terms(ring, terms).expect("collected exponents are valid")
    }

    /// Positions carrying at least one term, ascending.
    fn positions(&self) -> Vec<usize> {
        let mut ps: Vec<usize> = self.terms.keys().map(|t| t.pos).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// Rebuilds the vector with every position sent through `f`.
    fn remap_positions(&self, f: impl Fn(usize) -> usize) -> ModVec {
        let mut out = ModVec::zero(self.k);
        for (t, c) in &self.terms {
            out.add_term(ModTerm { pos: f(t.pos), mono: t.mono.clone() }, *c);
        }
        out
    }
}

/// Reads column `col` of a differential as a module element, positions
/// indexed by matrix row.
fn column_vector(d: &SparseMat<LaurentPoly>, col: usize, k: u8) -> ModVec {
    let mut v = ModVec::zero(k);
    for (r, c, p) in d.iter() {
        if c != col {
            continue;
        }
        for (mono, coeff) in p.terms() {
            v.add_term(ModTerm { pos: r, mono: mono.clone() }, *coeff);
        }
    }
    v
}

fn rows_to_matrix(rows: &[ModVec], width: usize, ring: &Ring) -> SparseMat<LaurentPoly> {
    let mut m = SparseMat::new(rows.len(), width);
    for (r, v) in rows.iter().enumerate() {
        for pos in v.positions() {
            m.set(r, pos, v.poly_at(pos, ring));
        }
    }
    m
}

/// Tracks the term total across a basis against the configured ceiling.
struct Budget<'a> {
    caps: &'a GbCaps,
    basis_terms: usize,
}

impl<'a> Budget<'a> {
    fn new(caps: &'a GbCaps) -> Budget<'a> {
        Budget { caps, basis_terms: 0 }
    }

    fn charge(&self, extra: usize) -> Result<(), HomologyError> {
        let total = self.basis_terms + extra;
        if total > self.caps.max_terms {
            return Err(HomologyError::Resource {
                what: "basis computation terms",
                reached: total,
                cap: self.caps.max_terms,
            });
        }
        Ok(())
    }

    fn grow(&mut self, terms: usize) -> Result<(), HomologyError> {
        self.basis_terms += terms;
        self.charge(0)
    }
}

/// Full normal form of `v` against `basis` (every element monic): leading
/// terms divisible by some basis lead are cancelled, irreducible leads move
/// to the remainder.
fn normal_form(v: ModVec, basis: &[ModVec], budget: &Budget) -> Result<ModVec, HomologyError> {
    let k = v.k;
    let mut work = v;
    let mut rem = ModVec::zero(k);
    'outer: while let Some((lt, lc)) = work.lead().map(|(t, c)| (t.clone(), *c)) {
        for b in basis {
            let Some((bt, _)) = b.lead() else { continue };
            if bt.pos == lt.pos && mono_divides(&bt.mono, &lt.mono) {
                let q = mono_quot(&lt.mono, &bt.mono);
                work.axpy(&q, &lc, b);
                budget.charge(work.term_count() + rem.term_count())?;
                continue 'outer;
            }
        }
        work.terms.remove(&lt);
        rem.add_term(lt, lc);
    }
    Ok(rem)
}

/// S-vector of two monic elements with the same leading position.
fn s_vector(f: &ModVec, g: &ModVec) -> ModVec {
    let (ft, _) = f.lead().expect("basis elements are nonzero");
    let (gt, _) = g.lead().expect("basis elements are nonzero");
    debug_assert_eq!(ft.pos, gt.pos);
    let l = mono_lcm(&ft.mono, &gt.mono);
    let one = FieldElem::one(f.k);
    let mut s = ModVec::zero(f.k);
    s.axpy(&mono_quot(&l, &ft.mono), &one, f);
    s.axpy(&mono_quot(&l, &gt.mono), &one, g);
    s
}

/// Buchberger completion. Critical pairs form only between elements whose
/// leads share a position. The coprimality shortcut that is valid for ring
/// ideals is unsound for module leads and is not used: two elements can
/// have coprime lead monomials at a shared position while their S-vector
/// is irreducible through the tails.
fn buchberger(gens: Vec<ModVec>, caps: &GbCaps) -> Result<Vec<ModVec>, HomologyError> {
    let mut budget = Budget::new(caps);
    let mut basis: Vec<ModVec> = Vec::new();
    for g in gens {
        let nf = normal_form(g, &basis, &budget)?;
        if !nf.is_zero() {
            budget.grow(nf.term_count())?;
            basis.push(nf.monic());
        }
    }
    let mut pairs: VecDeque<(usize, usize)> = VecDeque::new();
    let push_pair = |pairs: &mut VecDeque<(usize, usize)>,
                         pair: (usize, usize)|
     -> Result<(), HomologyError> {
        pairs.push_back(pair);
        if pairs.len() > caps.max_pairs {
            return Err(HomologyError::Resource {
                what: "basis computation pair queue",
                reached: pairs.len(),
                cap: caps.max_pairs,
            });
        }
        Ok(())
    };
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            if basis[i].lead().unwrap().0.pos == basis[j].lead().unwrap().0.pos {
                push_pair(&mut pairs, (i, j))?;
            }
        }
    }
    while let Some((i, j)) = pairs.pop_front() {
        let s = s_vector(&basis[i], &basis[j]);
        let nf = normal_form(s, &basis, &budget)?;
        if nf.is_zero() {
            continue;
        }
        let nf = nf.monic();
        let idx = basis.len();
        let pos = nf.lead().unwrap().0.pos;
        for (b, other) in basis.iter().enumerate() {
            if other.lead().unwrap().0.pos == pos {
                push_pair(&mut pairs, (b, idx))?;
            }
        }
        budget.grow(nf.term_count())?;
        basis.push(nf);
    }
    Ok(basis)
}

/// Reduced basis: minimal leads, every tail fully reduced, sorted with the
/// greatest lead first. Unique for the submodule and the term order.
fn reduced_basis(basis: Vec<ModVec>, caps: &GbCaps) -> Result<Vec<ModVec>, HomologyError> {
    // keep only elements whose lead no other kept lead divides; ascending
    // order puts potential divisors before their multiples
    let mut by_lead = basis;
    by_lead.sort_by(|a, b| a.lead().expect("nonzero").0.cmp(b.lead().expect("nonzero").0));
    let mut minimal: Vec<ModVec> = Vec::new();
    for v in by_lead {
        let (vt, _) = v.lead().expect("nonzero");
        let redundant = minimal.iter().any(|m| {
            let (mt, _) = m.lead().expect("nonzero");
            mt.pos == vt.pos && mono_divides(&mt.mono, &vt.mono)
        });
        if !redundant {
            minimal.push(v);
        }
    }
    // tail-reduce each against the rest; leads are pairwise irreducible, so
    // the lead survives and one pass suffices
    let budget = Budget::new(caps);
    let mut out: Vec<ModVec> = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let mut others: Vec<ModVec> = Vec::with_capacity(minimal.len() - 1);
        for (j, m) in minimal.iter().enumerate() {
            if j != i {
                others.push(m.clone());
            }
        }
        let nf = normal_form(minimal[i].clone(), &others, &budget)?;
        debug_assert!(!nf.is_zero(), "minimal basis elements cannot vanish");
        out.push(nf.monic());
    }
    out.sort_by(|a, b| b.lead().unwrap().0.cmp(a.lead().unwrap().0));
    Ok(out)
}

/// A submodule of R^{n_main} with machinery for syzygies and membership:
/// generator i is augmented with a witness slot at position n_main + i, and
/// the Groebner basis is taken under the position-over-term order, which
/// eliminates main positions ahead of witness positions.
struct Submodule {
    n_main: usize,
    gb: Vec<ModVec>,
}

impl Submodule {
    fn new(
        gens: Vec<ModVec>,
        n_main: usize,
        k: u8,
        caps: &GbCaps,
    ) -> Result<Submodule, HomologyError> {
        let augmented: Vec<ModVec> = gens
            .into_iter()
            .enumerate()
            .map(|(i, mut v)| {
                v.add_term(
                    ModTerm { pos: n_main + i, mono: Monomial(vec![0, 0]) },
                    FieldElem::one(k),
                );
                v
            })
            .collect();
        let gb = reduced_basis(buchberger(augmented, caps)?, caps)?;
        Ok(Submodule { n_main, gb })
    }

    /// Generators of the syzygy module, as elements of R^{n_gens}: the
    /// basis elements supported entirely on witness positions. A witness
    /// lead forces every term into the witness block, and the elimination
    /// order makes these a basis of all syzygies.
    fn syzygies(&self) -> Vec<ModVec> {
        let n = self.n_main;
        self.gb
            .iter()
            .filter(|v| v.lead().is_some_and(|(t, _)| t.pos >= n))
            .map(|v| v.remap_positions(|p| p - n))
            .collect()
    }

    /// Coordinates of `x` (an element of R^{n_main}) over the generators,
    /// when `x` lies in the submodule: the witness part of the normal form
    /// recombines to `x`. None when a main-position term survives.
    fn coordinates(&self, x: &ModVec, caps: &GbCaps) -> Result<Option<ModVec>, HomologyError> {
        let budget = Budget::new(caps);
        let nf = normal_form(x.clone(), &self.gb, &budget)?;
        if nf.terms.keys().any(|t| t.pos < self.n_main) {
            return Ok(None);
        }
        let n = self.n_main;
        Ok(Some(nf.remap_positions(|p| p - n)))
    }
}

/// Canonical relation set: reduced Groebner basis of the relation rows,
/// with redundant generators (those some relation multiplies by a unit)
/// eliminated, iterated until no unit entries remain. Iteration is needed
/// because basis completion can surface fresh unit entries.
fn canonical_presentation(
    mut gens: usize,
    mut rows: Vec<ModVec>,
    caps: &GbCaps,
) -> Result<(usize, Vec<ModVec>), HomologyError> {
    loop {
        rows = reduced_basis(buchberger(rows, caps)?, caps)?;
        let Some((row_idx, pos, unit)) = find_unit_entry(&rows) else {
            return Ok((gens, rows));
        };
        let pivot_row = rows.remove(row_idx);
        let inv = unit.inv().expect("unit coefficients are invertible");
        let mut next_rows: Vec<ModVec> = Vec::with_capacity(rows.len());
        for row in rows {
            // adding (coeff / u) * pivot_row cancels the pos slot and
            // substitutes the pivot's expression for that generator
            let coeff_terms: Vec<(Monomial, FieldElem)> = row
                .terms
                .iter()
                .filter(|(t, _)| t.pos == pos)
                .map(|(t, c)| (t.mono.clone(), c.mul(&inv)))
                .collect();
            let mut updated = row;
            for (mono, c) in coeff_terms {
                updated.axpy(&mono, &c, &pivot_row);
            }
            debug_assert!(updated.terms.keys().all(|t| t.pos != pos));
            let remapped = updated.remap_positions(|p| if p > pos { p - 1 } else { p });
            if !remapped.is_zero() {
                next_rows.push(remapped);
            }
        }
        rows = next_rows;
        gens -= 1;
    }
}

/// Locates a relation entry that is a unit of the ring: a single constant
/// term alone in its position. Returns (row, position, coefficient).
fn find_unit_entry(rows: &[ModVec]) -> Option<(usize, usize, FieldElem)> {
    for (r, row) in rows.iter().enumerate() {
        for pos in row.positions() {
            let slot: Vec<(&ModTerm, &FieldElem)> =
                row.terms.iter().filter(|(t, _)| t.pos == pos).collect();
            if let [(t, c)] = slot.as_slice() {
                if t.mono.0.iter().all(|&e| e == 0) {
                    return Some((r, pos, **c));
                }
            }
        }
    }
    None
}

/// Rank of the relation rows over the fraction field, by fraction-free
/// (Bareiss) elimination: entries stay minors of the original matrix, so
/// growth is bounded and every division is exact.
fn generic_rank(rows: &[ModVec], width: usize, ring: &Ring) -> usize {
    if rows.is_empty() || width == 0 {
        return 0;
    }
    let mul = |a: &LaurentPoly, b: &LaurentPoly| a.mul(b).expect("entries share the ring");
    let add = |a: &LaurentPoly, b: &LaurentPoly| a.add(b).expect("entries share the ring");
    let mut m: Vec<Vec<LaurentPoly>> = rows
        .iter()
        .map(|v| (0..width).map(|p| v.poly_at(p, ring)).collect())
        .collect();
    let (nr, nc) = (m.len(), width);
    let mut prev: Option<LaurentPoly> = None;
    let mut rank = 0;
    for ck in 0..nc {
        if rank >= nr {
            break;
        }
        let Some(p) = (rank..nr).find(|&r| !m[r][ck].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in (rank + 1)..nr {
            for c in (ck + 1)..nc {
                let num = add(&mul(&m[rank][ck], &m[r][c]), &mul(&m[r][ck], &m[rank][c]));
                m[r][c] = match &prev {
                    None => num,
                    Some(d) => exact_div(&num, d)
                        .expect("fraction-free elimination divides exactly"),
                };
            }
            m[r][ck] = LaurentPoly::zero(ring);
        }
        prev = Some(m[rank][ck].clone());
        rank += 1;
    }
    rank
}

/// Exact multivariate division p / q under the canonical term order; None
/// when q does not divide p. Leading terms multiply monotonically, so the
/// greedy quotient term is forced at every step.
fn exact_div(p: &LaurentPoly, q: &LaurentPoly) -> Option<LaurentPoly> {
    let ring = p.ring();
    let (qm, qc) = q.leading_term()?;
    let qc_inv = qc.inv().ok()?;
    let mut rem = p.clone();
    let mut quot = LaurentPoly::zero(ring);
    while let Some((rm, rc)) = rem.leading_term() {
        if !mono_divides(qm, rm) {
            return None;
        }
        let tm = mono_quot(rm, qm);
        let tc = rc.mul(&qc_inv);
        let t = LaurentPoly::from_terms(ring, [(tm, tc)]).ok()?;
        quot = quot.add(&t).ok()?;
        rem = rem.add(&t.mul(q).ok()?).ok()?;
    }
    Some(quot)
}
