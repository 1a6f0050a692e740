//! Rank-two Frobenius systems in characteristic 2 and their algebra.
//!
//! A system is a coefficient ring S together with the free algebra
//! V = S[X]/(X^2 + alpha*X + beta), basis (x+, x-) = (1, X), the counit
//! eps(x+) = 0, eps(x-) = 1, and the induced comultiplication. An optional
//! root A of X^2 + alpha*X + beta (so A*(A+alpha) = beta) unlocks the reduced
//! theory through the idempotent-like generator m = x- + (A+alpha)*x+.
//!
//! Structure maps in the (x+, x-) basis:
//!   mult:  x+x+ -> x+,  x+x- -> x-,  x-x- -> alpha*x- + beta*x+
//!   comult: x+ -> x+@x- + x-@x+ + alpha*x+@x+,  x- -> x-@x- + beta*x+@x+
//!   pairing matrix [[0,1],[1,alpha]], determinant 1.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::consts;
use crate::hom::RingHom;
use crate::ring::{LaurentPoly, Ring, RingError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrobError {
    #[error("element belongs to {found}, system is over {expected}")]
    SystemMismatch { expected: String, found: String },
    #[error("root validation failed: {0} is not a root of X^2+alpha*X+beta")]
    InvalidRoot(String),
    #[error("the system has no root; reduced theory undefined")]
    NoRoot,
    #[error("tensor word has {0} factors; limit is 32")]
    TooManyFactors(usize),
    #[error("tensor factor index {index} out of range for word of {factors} factors")]
    FactorOutOfRange { index: usize, factors: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// How the quantum degree interacts with the differential of this system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuantumStructure {
    /// alpha, beta homogeneous for deg X = -2: q is a grading.
    Graded,
    /// Field coefficients with inhomogeneous alpha/beta: q only filters.
    Filtered,
    /// No integral weights exist for the ring's variables.
    None,
}

/// Weight of a ring variable in the quantum grading, when one exists.
fn var_weight(name: &str) -> Option<i32> {
    match name {
        "h" => Some(-2),
        "t" => Some(-4),
        _ => None,
    }
}

fn is_homogeneous(p: &LaurentPoly, weight: i32) -> bool {
    p.is_zero() || quantum_weight(p) == Some(weight as i64)
}

/// The common quantum weight of all terms of `p` (h carries -2, t carries
/// -4), or None when terms mix weights or involve unweighted variables.
/// The zero polynomial has every weight; it reports 0.
pub fn quantum_weight(p: &LaurentPoly) -> Option<i64> {
    let ring = p.ring();
    let mut common: Option<i64> = None;
    for (m, _) in p.terms() {
        let mut w = 0i64;
        for (i, &e) in m.0.iter().enumerate() {
            w += var_weight(&ring.vars()[i].name)? as i64 * e as i64;
        }
        match common {
            None => common = Some(w),
            Some(c) if c != w => return None,
            Some(_) => {}
        }
    }
    Some(common.unwrap_or(0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusSystem {
    id: String,
    ring: Ring,
    alpha: LaurentPoly,
    beta: LaurentPoly,
    root: Option<LaurentPoly>,
}

impl FrobeniusSystem {
    pub fn new(
        id: impl Into<String>,
        ring: Ring,
        alpha: LaurentPoly,
        beta: LaurentPoly,
        root: Option<LaurentPoly>,
    ) -> Result<Self, FrobError> {
        let check = |p: &LaurentPoly| -> Result<(), FrobError> {
            if p.ring() != &ring {
                return Err(FrobError::SystemMismatch {
                    expected: ring.to_string(),
                    found: p.ring().to_string(),
                });
            }
            Ok(())
        };
        check(&alpha)?;
        check(&beta)?;
        if let Some(a) = &root {
            check(a)?;
            // A*(A + alpha) = beta.
            let lhs = a.mul(&a.add(&alpha)?)?;
            if lhs != beta {
                return Err(FrobError::InvalidRoot(a.to_string()));
            }
        }
        Ok(FrobeniusSystem { id: id.into(), ring, alpha, beta, root })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn alpha(&self) -> &LaurentPoly {
        &self.alpha
    }

    pub fn beta(&self) -> &LaurentPoly {
        &self.beta
    }

    pub fn root(&self) -> Option<&LaurentPoly> {
        self.root.as_ref()
    }

    /// The conjugate root A' = A + alpha, defined when a root is.
    pub fn root_conjugate(&self) -> Result<LaurentPoly, FrobError> {
        let a = self.root.as_ref().ok_or(FrobError::NoRoot)?;
        Ok(a.add(&self.alpha)?)
    }

    pub fn quantum_structure(&self) -> QuantumStructure {
        let weights_exist = self
            .ring
            .vars()
            .iter()
            .all(|v| var_weight(&v.name).is_some());
        if weights_exist
            && is_homogeneous(&self.alpha, -2)
            && is_homogeneous(&self.beta, -4)
        {
            return QuantumStructure::Graded;
        }
        if self.ring.arity() == 0 {
            return QuantumStructure::Filtered;
        }
        QuantumStructure::None
    }

    fn check_elem(&self, e: &AlgebraElem) -> Result<(), FrobError> {
        if e.c1.ring() != &self.ring {
            return Err(FrobError::SystemMismatch {
                expected: self.ring.to_string(),
                found: e.c1.ring().to_string(),
            });
        }
        Ok(())
    }

    /// The algebra unit x+.
    pub fn unit(&self) -> AlgebraElem {
        AlgebraElem {
            c1: LaurentPoly::one(&self.ring),
            cx: LaurentPoly::zero(&self.ring),
        }
    }

    pub fn x_minus(&self) -> AlgebraElem {
        AlgebraElem {
            c1: LaurentPoly::zero(&self.ring),
            cx: LaurentPoly::one(&self.ring),
        }
    }

    pub fn multiply(&self, a: &AlgebraElem, b: &AlgebraElem) -> Result<AlgebraElem, FrobError> {
        self.check_elem(a)?;
        self.check_elem(b)?;
        // (a1 + aX X)(b1 + bX X) with X^2 = alpha X + beta.
        let xx = a.cx.mul(&b.cx)?;
        let c1 = a.c1.mul(&b.c1)?.add(&xx.mul(&self.beta)?)?;
        let cx = a
            .c1
            .mul(&b.cx)?
            .add(&a.cx.mul(&b.c1)?)?
            .add(&xx.mul(&self.alpha)?)?;
        Ok(AlgebraElem { c1, cx })
    }

    /// Comultiplication into a two-factor tensor word.
    pub fn comultiply(&self, a: &AlgebraElem) -> Result<TensorWord, FrobError> {
        self.check_elem(a)?;
        let mut w = TensorWord::zero(&self.ring, 2);
        // Delta(x+) = x+@x- + x-@x+ + alpha x+@x+.
        w.accumulate(0b10, &a.c1)?;
        w.accumulate(0b01, &a.c1)?;
        w.accumulate(0b00, &a.c1.mul(&self.alpha)?)?;
        // Delta(x-) = x-@x- + beta x+@x+.
        w.accumulate(0b11, &a.cx)?;
        w.accumulate(0b00, &a.cx.mul(&self.beta)?)?;
        Ok(w)
    }

    /// eps(x+) = 0, eps(x-) = 1.
    pub fn counit(&self, a: &AlgebraElem) -> Result<LaurentPoly, FrobError> {
        self.check_elem(a)?;
        Ok(a.cx.clone())
    }

    /// Multiplication by X; matrix [[0, beta], [1, alpha]] in basis (x+, x-).
    pub fn dot_action(&self, a: &AlgebraElem) -> Result<AlgebraElem, FrobError> {
        self.check_elem(a)?;
        Ok(AlgebraElem {
            c1: a.cx.mul(&self.beta)?,
            cx: a.c1.add(&a.cx.mul(&self.alpha)?)?,
        })
    }

    /// Multiplication by X + alpha, the conjugate dot action.
    pub fn conjugate_dot_action(&self, a: &AlgebraElem) -> Result<AlgebraElem, FrobError> {
        let xa = self.dot_action(a)?;
        Ok(AlgebraElem {
            c1: xa.c1.add(&a.c1.mul(&self.alpha)?)?,
            cx: xa.cx.add(&a.cx.mul(&self.alpha)?)?,
        })
    }

    /// The bilinear pairing <a,b> = eps(a*b); matrix [[0,1],[1,alpha]].
    pub fn pairing(&self, a: &AlgebraElem, b: &AlgebraElem) -> Result<LaurentPoly, FrobError> {
        self.counit(&self.multiply(a, b)?)
    }

    /// Dual basis to (x+, x-) under the pairing: (x- + alpha x+, x+).
    pub fn dual_basis(&self) -> (AlgebraElem, AlgebraElem) {
        let first = AlgebraElem {
            c1: self.alpha.clone(),
            cx: LaurentPoly::one(&self.ring),
        };
        (first, self.unit())
    }

    /// The algebra involution fixing x+ and sending x- to x- + alpha x+.
    pub fn orientation_reversal(&self, a: &AlgebraElem) -> Result<AlgebraElem, FrobError> {
        self.check_elem(a)?;
        Ok(AlgebraElem {
            c1: a.c1.add(&a.cx.mul(&self.alpha)?)?,
            cx: a.cx.clone(),
        })
    }

    /// Evaluation of a closed genus-g surface with d dots: alpha^g * eps_d,
    /// where eps_0 = 0, eps_1 = 1, eps_d = alpha*eps_{d-1} + beta*eps_{d-2}.
    pub fn surface_evaluation(&self, genus: u32, dots: u32) -> Result<LaurentPoly, FrobError> {
        let mut e_prev = LaurentPoly::one(&self.ring); // eps_1
        let mut e_prev2 = LaurentPoly::zero(&self.ring); // eps_0
        let eps_d = match dots {
            0 => e_prev2,
            1 => e_prev,
            d => {
                let mut cur = LaurentPoly::zero(&self.ring);
                for _ in 2..=d {
                    cur = self.alpha.mul(&e_prev)?.add(&self.beta.mul(&e_prev2)?)?;
                    e_prev2 = std::mem::replace(&mut e_prev, cur.clone());
                }
                cur
            }
        };
        Ok(self.alpha.pow(genus)?.mul(&eps_d)?)
    }

    /// m = x- + A'x+ with A' = root + alpha. Satisfies m*m = alpha*m,
    /// X*m = root*m, Delta(m) = m@m.
    pub fn reduced_generator(&self) -> Result<AlgebraElem, FrobError> {
        let a_conj = self.root_conjugate()?;
        Ok(AlgebraElem { c1: a_conj, cx: LaurentPoly::one(&self.ring) })
    }

    /// Transports the system along a coefficient map. A root must be
    /// supplied when the source has none but the target quadratic splits.
    pub fn base_change(
        &self,
        id: impl Into<String>,
        phi: &RingHom,
        new_root: Option<LaurentPoly>,
    ) -> Result<FrobeniusSystem, FrobError> {
        if phi.source() != &self.ring {
            return Err(FrobError::SystemMismatch {
                expected: self.ring.to_string(),
                found: phi.source().to_string(),
            });
        }
        let alpha = phi.apply(&self.alpha)?;
        let beta = phi.apply(&self.beta)?;
        let root = match new_root {
            Some(a) => Some(a),
            None => self.root.as_ref().map(|a| phi.apply(a)).transpose()?,
        };
        FrobeniusSystem::new(id, phi.target().clone(), alpha, beta, root)
    }

    /// Exhaustive check of the Frobenius axioms as identities of small
    /// matrices over the ring; returns the first failing law by name.
    pub fn axiom_check(&self) -> Result<(), String> {
        let basis = [self.unit(), self.x_minus()];
        let err = |law: &str| Err(format!("{law} fails for system {}", self.id));
        // Unit law and commutativity on basis pairs.
        for a in &basis {
            let ua = self.multiply(&self.unit(), a).unwrap();
            if &ua != a {
                return err("unit law");
            }
        }
        for a in &basis {
            for b in &basis {
                let ab = self.multiply(a, b).unwrap();
                let ba = self.multiply(b, a).unwrap();
                if ab != ba {
                    return err("commutativity");
                }
            }
        }
        // Associativity on all basis triples.
        for a in &basis {
            for b in &basis {
                for c in &basis {
                    let l = self.multiply(&self.multiply(a, b).unwrap(), c).unwrap();
                    let r = self.multiply(a, &self.multiply(b, c).unwrap()).unwrap();
                    if l != r {
                        return err("associativity");
                    }
                }
            }
        }
        // Counit law: (eps @ id) Delta = id = (id @ eps) Delta.
        for (i, a) in basis.iter().enumerate() {
            let w = self.comultiply(a).unwrap();
            let mut left = AlgebraElem::zero(&self.ring);
            let mut right = AlgebraElem::zero(&self.ring);
            for (mask, c) in w.coeffs() {
                // eps on factor 0 keeps only x- there; result is factor 1.
                if mask & 1 == 1 {
                    left.accumulate_basis(mask >> 1 == 1, c).unwrap();
                }
                if mask >> 1 == 1 {
                    right.accumulate_basis(mask & 1 == 1, c).unwrap();
                }
            }
            let orig = &basis[i];
            if &left != orig || &right != orig {
                return err("counit law");
            }
        }
        // Coassociativity: (Delta @ id) Delta = (id @ Delta) Delta.
        for a in &basis {
            let w = self.comultiply(a).unwrap();
            let l = w.comultiply_factor(self, 0).unwrap();
            let r = w.comultiply_factor(self, 1).unwrap();
            if l != r {
                return err("coassociativity");
            }
        }
        // Frobenius compatibility as 4x4 matrix identities on V@V:
        // Delta . mult = (mult @ id) . (id @ Delta) = (id @ mult) . (Delta @ id).
        for input in 0u32..4 {
            let mut w = TensorWord::zero(&self.ring, 2);
            w.accumulate(input, &LaurentPoly::one(&self.ring)).unwrap();
            let lhs = {
                let prod = w.multiply_factors(self, 0, 1).unwrap();
                prod.comultiply_factor(self, 0).unwrap()
            };
            let mid = {
                let big = w.comultiply_factor(self, 1).unwrap(); // V@V@V
                big.multiply_factors(self, 0, 1).unwrap()
            };
            let rhs = {
                let big = w.comultiply_factor(self, 0).unwrap();
                big.multiply_factors(self, 1, 2).unwrap()
            };
            if lhs != mid || lhs != rhs {
                return err("frobenius compatibility");
            }
        }
        // Pairing matrix [[0,1],[1,alpha]] and its determinant 1.
        let p = |a, b| self.pairing(a, b).unwrap();
        let (pp, pm) = (p(&basis[0], &basis[0]), p(&basis[0], &basis[1]));
        let (mp, mm) = (p(&basis[1], &basis[0]), p(&basis[1], &basis[1]));
        if !pp.is_zero() || !pm.is_one() || !mp.is_one() || mm != self.alpha {
            return err("pairing matrix");
        }
        let det = pp.mul(&mm).unwrap().add(&pm.mul(&mp).unwrap()).unwrap();
        if !det.is_one() {
            return err("pairing determinant");
        }
        Ok(())
    }
}

impl fmt::Display for FrobeniusSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} with alpha={}, beta={}",
            self.id, self.ring, self.alpha, self.beta
        )?;
        if let Some(a) = &self.root {
            write!(f, ", root={a}")?;
        }
        Ok(())
    }
}

/// An element c1*x+ + cx*x- of the rank-2 algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElem {
    pub c1: LaurentPoly,
    pub cx: LaurentPoly,
}

impl AlgebraElem {
    pub fn zero(ring: &Ring) -> Self {
        AlgebraElem { c1: LaurentPoly::zero(ring), cx: LaurentPoly::zero(ring) }
    }

    pub fn new(c1: LaurentPoly, cx: LaurentPoly) -> Result<Self, FrobError> {
        if c1.ring() != cx.ring() {
            return Err(FrobError::SystemMismatch {
                expected: c1.ring().to_string(),
                found: cx.ring().to_string(),
            });
        }
        Ok(AlgebraElem { c1, cx })
    }

    pub fn add(&self, other: &AlgebraElem) -> Result<AlgebraElem, FrobError> {
        Ok(AlgebraElem {
            c1: self.c1.add(&other.c1)?,
            cx: self.cx.add(&other.cx)?,
        })
    }

    pub fn scale(&self, c: &LaurentPoly) -> Result<AlgebraElem, FrobError> {
        Ok(AlgebraElem { c1: self.c1.mul(c)?, cx: self.cx.mul(c)? })
    }

    pub fn is_zero(&self) -> bool {
        self.c1.is_zero() && self.cx.is_zero()
    }

    fn accumulate_basis(&mut self, minus: bool, c: &LaurentPoly) -> Result<(), RingError> {
        if minus {
            self.cx = self.cx.add(c)?;
        } else {
            self.c1 = self.c1.add(c)?;
        }
        Ok(())
    }
}

/// An element of V^{@n} in the basis indexed by bit masks: bit i set means
/// factor i is x-, clear means x+. Kept sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorWord {
    ring: Ring,
    factors: usize,
    coeffs: BTreeMap<u32, LaurentPoly>,
}

impl TensorWord {
    pub fn zero(ring: &Ring, factors: usize) -> Self {
        TensorWord { ring: ring.clone(), factors, coeffs: BTreeMap::new() }
    }

    pub fn basis(ring: &Ring, factors: usize, mask: u32) -> Result<Self, FrobError> {
        if factors > 32 {
            return Err(FrobError::TooManyFactors(factors));
        }
        let mut w = TensorWord::zero(ring, factors);
        w.accumulate(mask, &LaurentPoly::one(ring))?;
        Ok(w)
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (u32, &LaurentPoly)> {
        self.coeffs.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, mask: u32) -> Option<&LaurentPoly> {
        self.coeffs.get(&mask)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn accumulate(&mut self, mask: u32, c: &LaurentPoly) -> Result<(), FrobError> {
        if self.factors > 32 {
            return Err(FrobError::TooManyFactors(self.factors));
        }
        debug_assert!(self.factors == 32 || mask < (1u32 << self.factors));
        if c.is_zero() {
            return Ok(());
        }
        match self.coeffs.entry(mask) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(c)?;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
        Ok(())
    }

    /// Applies multiplication to factors i < j; the product lands at
    /// position i and the remaining factors close ranks over j.
    pub fn multiply_factors(
        &self,
        sys: &FrobeniusSystem,
        i: usize,
        j: usize,
    ) -> Result<TensorWord, FrobError> {
        if i >= self.factors || j >= self.factors || i == j {
            return Err(FrobError::FactorOutOfRange {
                index: i.max(j),
                factors: self.factors,
            });
        }
        let (i, j) = (i.min(j), i.max(j));
        let mut out = TensorWord::zero(&self.ring, self.factors - 1);
        for (mask, c) in &self.coeffs {
            let bi = mask >> i & 1 == 1;
            let bj = mask >> j & 1 == 1;
            // Remove bit j, keep others in place.
            let low = mask & ((1 << j) - 1);
            let high = (mask >> (j + 1)) << j;
            let base = low | high;
            // Images of x_bi * x_bj per the multiplication table.
            let images: Vec<(bool, LaurentPoly)> = match (bi, bj) {
                (false, false) => vec![(false, c.clone())],
                (true, false) | (false, true) => vec![(true, c.clone())],
                (true, true) => vec![
                    (true, c.mul(sys.alpha())?),
                    (false, c.mul(sys.beta())?),
                ],
            };
            for (minus, coef) in images {
                let m = if minus { base | (1 << i) } else { base & !(1 << i) };
                out.accumulate(m, &coef)?;
            }
        }
        Ok(out)
    }

    /// Applies comultiplication to factor i; the two outputs occupy
    /// positions i and i+1 and later factors shift up.
    pub fn comultiply_factor(
        &self,
        sys: &FrobeniusSystem,
        i: usize,
    ) -> Result<TensorWord, FrobError> {
        if i >= self.factors {
            return Err(FrobError::FactorOutOfRange { index: i, factors: self.factors });
        }
        if self.factors + 1 > 32 {
            return Err(FrobError::TooManyFactors(self.factors + 1));
        }
        let mut out = TensorWord::zero(&self.ring, self.factors + 1);
        for (mask, c) in &self.coeffs {
            let bi = mask >> i & 1 == 1;
            let low = mask & ((1 << i) - 1);
            let high = (mask >> (i + 1)) << (i + 2);
            let base = low | high;
            // (first_minus, second_minus, coefficient)
            let images: Vec<(bool, bool, LaurentPoly)> = if bi {
                vec![
                    (true, true, c.clone()),
                    (false, false, c.mul(sys.beta())?),
                ]
            } else {
                vec![
                    (false, true, c.clone()),
                    (true, false, c.clone()),
                    (false, false, c.mul(sys.alpha())?),
                ]
            };
            for (m1, m2, coef) in images {
                let mut m = base;
                if m1 {
                    m |= 1 << i;
                }
                if m2 {
                    m |= 1 << (i + 1);
                }
                out.accumulate(m, &coef)?;
            }
        }
        Ok(out)
    }
}

/// The six predefined systems under their stable ids.
pub fn predefined_ids() -> &'static [&'static str] {
    &["f5", "univ", "bn-graded", "sbn", "t-ring", "filtered-f4"]
}

pub fn predefined(id: &str) -> Option<&'static FrobeniusSystem> {
    static TABLE: OnceLock<BTreeMap<&'static str, FrobeniusSystem>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = BTreeMap::new();
        let f5 = {
            let r = consts::f5_ring();
            FrobeniusSystem::new(
                "f5",
                r.clone(),
                LaurentPoly::var(r, 0).unwrap(),
                LaurentPoly::var(r, 1).unwrap(),
                None,
            )
            .unwrap()
        };
        t.insert("f5", f5);
        let univ = FrobeniusSystem::new(
            "univ",
            consts::universal_ring().clone(),
            consts::p_elem().clone(),
            consts::q_elem().clone(),
            None,
        )
        .unwrap();
        t.insert("univ", univ);
        let bn = {
            let r = consts::bn_ring();
            FrobeniusSystem::new(
                "bn-graded",
                r.clone(),
                LaurentPoly::var(r, 0).unwrap(),
                LaurentPoly::zero(r),
                Some(LaurentPoly::zero(r)),
            )
            .unwrap()
        };
        t.insert("bn-graded", bn);
        let sbn = {
            let s = consts::hom_universal_to_sbn();
            FrobeniusSystem::new(
                "sbn",
                consts::sbn_ring().clone(),
                s.apply(consts::p_elem()).unwrap(),
                s.apply(consts::q_elem()).unwrap(),
                Some(s.apply(consts::a_elem()).unwrap()),
            )
            .unwrap()
        };
        t.insert("sbn", sbn);
        let tr = {
            let r = consts::t_ring();
            let alpha = LaurentPoly::var_pow(r, 0, 2)
                .unwrap()
                .add(&LaurentPoly::var_pow(r, 0, -2).unwrap())
                .unwrap();
            FrobeniusSystem::new(
                "t-ring",
                r.clone(),
                alpha,
                LaurentPoly::zero(r),
                Some(LaurentPoly::zero(r)),
            )
            .unwrap()
        };
        t.insert("t-ring", tr);
        let f4 = {
            let r = consts::f4_ring();
            FrobeniusSystem::new(
                "filtered-f4",
                r.clone(),
                LaurentPoly::one(r),
                LaurentPoly::zero(r),
                Some(LaurentPoly::zero(r)),
            )
            .unwrap()
        };
        t.insert("filtered-f4", f4);
        t
    });
    table.get(id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::{
        a_elem, a_prime_elem, f2_ring, hom_f5_to_universal, hom_universal_to_f4,
        hom_universal_to_sbn, p_elem, q_elem,
    };

    fn all_systems() -> Vec<&'static FrobeniusSystem> {
        predefined_ids().iter().map(|id| predefined(id).unwrap()).collect()
    }

    #[test]
    fn multiplication_table_universal() {
        let sys = predefined("univ").unwrap();
        let xp = sys.unit();
        let xm = sys.x_minus();
        assert_eq!(sys.multiply(&xp, &xp).unwrap(), xp);
        assert_eq!(sys.multiply(&xp, &xm).unwrap(), xm);
        let mm = sys.multiply(&xm, &xm).unwrap();
        assert_eq!(&mm.c1, q_elem());
        assert_eq!(&mm.cx, p_elem());
    }

    #[test]
    fn comultiplication_table() {
        for sys in all_systems() {
            let w = sys.comultiply(&sys.unit()).unwrap();
            assert_eq!(w.coeff(0b01).unwrap(), &LaurentPoly::one(sys.ring()));
            assert_eq!(w.coeff(0b10).unwrap(), &LaurentPoly::one(sys.ring()));
            match w.coeff(0b00) {
                Some(c) => assert_eq!(c, sys.alpha()),
                None => assert!(sys.alpha().is_zero()),
            }
            assert!(w.coeff(0b11).is_none());
            let wm = sys.comultiply(&sys.x_minus()).unwrap();
            assert_eq!(wm.coeff(0b11).unwrap(), &LaurentPoly::one(sys.ring()));
            match wm.coeff(0b00) {
                Some(c) => assert_eq!(c, sys.beta()),
                None => assert!(sys.beta().is_zero()),
            }
        }
    }

    #[test]
    fn axioms_hold_for_all_predefined_systems() {
        for sys in all_systems() {
            sys.axiom_check().unwrap_or_else(|e| panic!("{e}"));
        }
    }

    #[test]
    fn invalid_root_is_rejected() {
        // 0 is not a root of X^2 + 1 over GF(2).
        let r = f2_ring();
        let bad = FrobeniusSystem::new(
            "bad",
            r.clone(),
            LaurentPoly::zero(r),
            LaurentPoly::one(r),
            Some(LaurentPoly::zero(r)),
        );
        assert!(matches!(bad, Err(FrobError::InvalidRoot(_))));
    }

    #[test]
    fn dot_action_matrix_and_quadratic_relation() {
        for sys in all_systems() {
            let xp = sys.unit();
            let xm = sys.x_minus();
            // X*x+ = x-, X*x- = beta x+ + alpha x-.
            assert_eq!(sys.dot_action(&xp).unwrap(), xm);
            let xxm = sys.dot_action(&xm).unwrap();
            assert_eq!(&xxm.c1, sys.beta());
            assert_eq!(&xxm.cx, sys.alpha());
            // D^2 + alpha D + beta = 0 on both basis vectors.
            for v in [&xp, &xm] {
                let d2 = sys.dot_action(&sys.dot_action(v).unwrap()).unwrap();
                let ad = sys.dot_action(v).unwrap().scale(sys.alpha()).unwrap();
                let bv = v.scale(sys.beta()).unwrap();
                assert!(d2.add(&ad).unwrap().add(&bv).unwrap().is_zero());
            }
            // Dot action + conjugate dot action = alpha * id.
            for v in [&xp, &xm] {
                let sum = sys
                    .dot_action(v)
                    .unwrap()
                    .add(&sys.conjugate_dot_action(v).unwrap())
                    .unwrap();
                assert_eq!(sum, v.scale(sys.alpha()).unwrap());
            }
        }
    }

    #[test]
    fn dual_basis_pairs_to_identity() {
        for sys in all_systems() {
            let (d0, d1) = sys.dual_basis();
            let basis = [sys.unit(), sys.x_minus()];
            let duals = [d0, d1];
            for (i, b) in basis.iter().enumerate() {
                for (j, d) in duals.iter().enumerate() {
                    let v = sys.pairing(d, b).unwrap();
                    if i == j {
                        assert!(v.is_one(), "{} <{i},{j}>", sys.id());
                    } else {
                        assert!(v.is_zero(), "{} <{i},{j}>", sys.id());
                    }
                }
            }
        }
    }

    #[test]
    fn orientation_reversal_is_an_algebra_involution() {
        for sys in all_systems() {
            let xp = sys.unit();
            let xm = sys.x_minus();
            for v in [&xp, &xm] {
                let twice = sys
                    .orientation_reversal(&sys.orientation_reversal(v).unwrap())
                    .unwrap();
                assert_eq!(&twice, v);
            }
            // iota(ab) = iota(a) iota(b) on basis pairs.
            for a in [&xp, &xm] {
                for b in [&xp, &xm] {
                    let l = sys.orientation_reversal(&sys.multiply(a, b).unwrap()).unwrap();
                    let r = sys
                        .multiply(
                            &sys.orientation_reversal(a).unwrap(),
                            &sys.orientation_reversal(b).unwrap(),
                        )
                        .unwrap();
                    assert_eq!(l, r, "system {}", sys.id());
                }
            }
        }
    }

    #[test]
    fn surface_evaluation_table() {
        let sys = predefined("univ").unwrap();
        // Sphere: 0 dots -> 0; 1 dot -> 1; 2 dots -> alpha = P.
        assert!(sys.surface_evaluation(0, 0).unwrap().is_zero());
        assert!(sys.surface_evaluation(0, 1).unwrap().is_one());
        assert_eq!(&sys.surface_evaluation(0, 2).unwrap(), p_elem());
        // Torus with one dot: alpha * eps_1 = P.
        assert_eq!(&sys.surface_evaluation(1, 1).unwrap(), p_elem());
        // Recurrence for d <= 64 on every system.
        for sys in all_systems() {
            let mut prev2 = LaurentPoly::zero(sys.ring());
            let mut prev = LaurentPoly::one(sys.ring());
            for d in 2..=64u32 {
                let expect = sys
                    .alpha()
                    .mul(&prev)
                    .unwrap()
                    .add(&sys.beta().mul(&prev2).unwrap())
                    .unwrap();
                let got = sys.surface_evaluation(0, d).unwrap();
                assert_eq!(got, expect, "{} d={d}", sys.id());
                prev2 = std::mem::replace(&mut prev, expect);
            }
        }
    }

    #[test]
    fn reduced_generator_identities() {
        for sys in all_systems() {
            let Ok(m) = sys.reduced_generator() else {
                assert!(sys.root().is_none());
                continue;
            };
            // m*m = alpha*m.
            let mm = sys.multiply(&m, &m).unwrap();
            assert_eq!(mm, m.scale(sys.alpha()).unwrap(), "{}", sys.id());
            // X*m = root*m.
            let xm = sys.dot_action(&m).unwrap();
            assert_eq!(xm, m.scale(sys.root().unwrap()).unwrap(), "{}", sys.id());
            // Delta(m) = m @ m.
            let dm = sys.comultiply(&m).unwrap();
            let mut m_tensor_m = TensorWord::zero(sys.ring(), 2);
            let parts = [(false, &m.c1), (true, &m.cx)];
            for (b1, c1) in parts {
                for (b2, c2) in parts {
                    let mask = (b1 as u32) | ((b2 as u32) << 1);
                    m_tensor_m.accumulate(mask, &c1.mul(c2).unwrap()).unwrap();
                }
            }
            assert_eq!(dm, m_tensor_m, "{}", sys.id());
        }
    }

    #[test]
    fn sbn_reduced_generator_matches_named_constants() {
        let sys = predefined("sbn").unwrap();
        let m = sys.reduced_generator().unwrap();
        let s = hom_universal_to_sbn();
        assert_eq!(m.c1, s.apply(a_prime_elem()).unwrap());
        assert!(m.cx.is_one());
    }

    #[test]
    fn bn_graded_reduced_generator_is_x_minus_plus_h_x_plus() {
        let sys = predefined("bn-graded").unwrap();
        let m = sys.reduced_generator().unwrap();
        assert_eq!(m.c1, sys.alpha().clone(), "A' = 0 + h");
        assert!(m.cx.is_one());
        // Eigenvalue of the dot action on m is the root 0.
        let xm = sys.dot_action(&m).unwrap();
        assert!(xm.is_zero());
    }

    #[test]
    fn base_changes_produce_the_predefined_targets() {
        let f5 = predefined("f5").unwrap();
        let univ = f5
            .base_change("univ", hom_f5_to_universal(), None)
            .unwrap();
        assert_eq!(&univ, predefined("univ").unwrap());
        let sbn = predefined("univ")
            .unwrap()
            .base_change(
                "sbn",
                hom_universal_to_sbn(),
                Some(hom_universal_to_sbn().apply(a_elem()).unwrap()),
            )
            .unwrap();
        assert_eq!(&sbn, predefined("sbn").unwrap());
        let filtered = predefined("univ")
            .unwrap()
            .base_change(
                "filtered-f4",
                hom_universal_to_f4(),
                Some(LaurentPoly::zero(crate::consts::f4_ring())),
            )
            .unwrap();
        assert_eq!(&filtered, predefined("filtered-f4").unwrap());
    }

    #[test]
    fn quantum_structure_classification() {
        use QuantumStructure::*;
        let expect = [
            ("f5", Graded),
            ("univ", None),
            ("bn-graded", Graded),
            ("sbn", None),
            ("t-ring", None),
            ("filtered-f4", Filtered),
        ];
        for (id, want) in expect {
            assert_eq!(predefined(id).unwrap().quantum_structure(), want, "{id}");
        }
        // Plain Khovanov over GF(2): alpha = beta = 0 is graded.
        let r = f2_ring();
        let plain = FrobeniusSystem::new(
            "plain",
            r.clone(),
            LaurentPoly::zero(r),
            LaurentPoly::zero(r),
            Some(LaurentPoly::zero(r)),
        )
        .unwrap();
        assert_eq!(plain.quantum_structure(), Graded);
    }

    #[test]
    fn system_mismatch_is_reported() {
        let f5 = predefined("f5").unwrap();
        let univ = predefined("univ").unwrap();
        let e = f5.multiply(&f5.unit(), &univ.unit()).unwrap_err();
        assert!(matches!(e, FrobError::SystemMismatch { .. }));
    }

    #[test]
    fn tensor_word_round_trip_multiply_comultiply() {
        // On the unknot algebra: mult . comult = handle = alpha * id.
        for sys in all_systems() {
            for mask in 0u32..2 {
                let w = TensorWord::basis(sys.ring(), 1, mask).unwrap();
                let split = w.comultiply_factor(sys, 0).unwrap();
                let back = split.multiply_factors(sys, 0, 1).unwrap();
                let mut expect = TensorWord::zero(sys.ring(), 1);
                expect.accumulate(mask, sys.alpha()).unwrap();
                assert_eq!(back, expect, "{}", sys.id());
            }
        }
    }
}
