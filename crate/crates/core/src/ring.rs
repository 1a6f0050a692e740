//! Multivariate (Laurent) polynomial rings over the binary fields.
//!
//! A ring is described by its coefficient field GF(2^k) and an ordered list
//! of variables, each either polynomial or Laurent (invertible). A ring with
//! no variables is the field itself, which lets every coefficient domain in
//! the crate flow through one element type. Polynomials are kept in a
//! canonical form: terms sorted in descending lexicographic order on the
//! exponent vector, no zero coefficients, and non-Laurent exponents never
//! negative. Exponents live in `i32`; overflow is reported as a resource
//! error rather than wrapping.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::field::{FieldElem, FieldError, MAX_FIELD_LOG, MIN_FIELD_LOG};

/// Hard cap on the number of terms a single arithmetic result may have.
pub const TERM_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("ring mismatch: expected {expected}, found {found}")]
    Mismatch { expected: String, found: String },
    #[error("variable {var} is not Laurent; negative exponent {exp} rejected")]
    NegativeExponent { var: String, exp: i32 },
    #[error("element is not a unit: {0}")]
    NotAUnit(String),
    #[error("specialization point has zero at Laurent variable {var}")]
    ZeroCoordinate { var: String },
    #[error("specialization point has {found} coordinates, ring has arity {arity}")]
    PointArity { arity: usize, found: usize },
    #[error("cannot embed GF(2^{from}) coefficients into GF(2^{to})")]
    FieldEmbedding { from: u8, to: u8 },
    #[error("exponent overflow past +/-2^31 (resource limit)")]
    ExponentOverflow,
    #[error("term count {terms} exceeds cap {cap} (resource limit)")]
    TermCap { terms: usize, cap: usize },
    #[error("invalid ring descriptor: {0}")]
    BadDescriptor(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl RingError {
    /// Resource errors abort a computation without implying bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, RingError::ExponentOverflow | RingError::TermCap { .. })
    }
}

/// One variable of a ring: its print name and whether it is invertible.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarSpec {
    pub name: String,
    pub laurent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingDescriptor {
    /// k of the coefficient field GF(2^k).
    pub field_log: u8,
    pub vars: Vec<VarSpec>,
}

impl RingDescriptor {
    pub fn arity(&self) -> usize {
        self.vars.len()
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})[", self.field_log)?;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v.name)?;
            if v.laurent {
                write!(f, "^pm")?;
            }
        }
        write!(f, "]")
    }
}

/// Shared handle to a ring descriptor. Cloning is cheap; equality is
/// structural so independently built descriptors of the same ring agree.
#[derive(Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ring(Arc<RingDescriptor>);

impl Ring {
    pub fn new(field_log: u8, vars: Vec<VarSpec>) -> Result<Ring, RingError> {
        if !(MIN_FIELD_LOG..=MAX_FIELD_LOG).contains(&field_log) {
            return Err(RingError::Field(FieldError::ExponentOutOfRange(field_log)));
        }
        for (i, v) in vars.iter().enumerate() {
            if v.name.is_empty()
                || !v.name.chars().next().unwrap().is_ascii_alphabetic()
                || !v.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(RingError::BadDescriptor(format!(
                    "variable name {:?} is not an identifier",
                    v.name
                )));
            }
            if v.name == "z" {
                return Err(RingError::BadDescriptor(
                    "variable name z collides with the field generator".into(),
                ));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(RingError::BadDescriptor(format!(
                    "duplicate variable name {}",
                    v.name
                )));
            }
        }
        Ok(Ring(Arc::new(RingDescriptor { field_log, vars })))
    }

    /// The field GF(2^k) viewed as an arity-0 ring.
    pub fn field(field_log: u8) -> Result<Ring, RingError> {
        Ring::new(field_log, vec![])
    }

    pub fn descriptor(&self) -> &RingDescriptor {
        &self.0
    }

    pub fn field_log(&self) -> u8 {
        self.0.field_log
    }

    pub fn arity(&self) -> usize {
        self.0.vars.len()
    }

    pub fn vars(&self) -> &[VarSpec] {
        &self.0.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v.name == name)
    }

    fn check_same(&self, other: &Ring) -> Result<(), RingError> {
        if self != other {
            return Err(RingError::Mismatch {
                expected: self.to_string(),
                found: other.to_string(),
            });
        }
        Ok(())
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Ring {}

impl std::hash::Hash for Ring {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Exponent vector of one monomial; index i belongs to variable i of the
/// ring. Ordering is the derived lexicographic order on the vector, which is
/// the monomial order used for canonical form everywhere in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn unit(arity: usize) -> Monomial {
        Monomial(vec![0; arity])
    }

    pub fn is_unit_monomial(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial, RingError> {
        debug_assert_eq!(self.0.len(), other.0.len());
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_add(*b).ok_or(RingError::ExponentOverflow)?);
        }
        Ok(Monomial(out))
    }

    pub fn inverse(&self) -> Result<Monomial, RingError> {
        let mut out = Vec::with_capacity(self.0.len());
        for &e in &self.0 {
            out.push(e.checked_neg().ok_or(RingError::ExponentOverflow)?);
        }
        Ok(Monomial(out))
    }
}

/// A polynomial in canonical form. The descriptor travels with the value so
/// mismatched arithmetic is detected rather than silently misinterpreted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LaurentPoly {
    ring: Ring,
    /// Terms in descending lex order on the exponent vector, no zeros.
    terms: Vec<(Monomial, FieldElem)>,
}

impl LaurentPoly {
    pub fn zero(ring: &Ring) -> LaurentPoly {
        LaurentPoly { ring: ring.clone(), terms: vec![] }
    }

    pub fn one(ring: &Ring) -> LaurentPoly {
        LaurentPoly {
            ring: ring.clone(),
            terms: vec![(Monomial::unit(ring.arity()), FieldElem::one(ring.field_log()))],
        }
    }

    pub fn constant(ring: &Ring, c: FieldElem) -> Result<LaurentPoly, RingError> {
        if c.k() != ring.field_log() {
            return Err(RingError::FieldEmbedding { from: c.k(), to: ring.field_log() });
        }
        let terms = if c.is_zero() {
            vec![]
        } else {
            vec![(Monomial::unit(ring.arity()), c)]
        };
        Ok(LaurentPoly { ring: ring.clone(), terms })
    }

    /// The single term var^exp.
    pub fn var_pow(ring: &Ring, var: usize, exp: i32) -> Result<LaurentPoly, RingError> {
        let spec = ring.vars().get(var).ok_or_else(|| {
            RingError::BadDescriptor(format!("variable index {var} out of range"))
        })?;
        if exp < 0 && !spec.laurent {
            return Err(RingError::NegativeExponent { var: spec.name.clone(), exp });
        }
        let mut exps = vec![0; ring.arity()];
        exps[var] = exp;
        Ok(LaurentPoly {
            ring: ring.clone(),
            terms: vec![(Monomial(exps), FieldElem::one(ring.field_log()))],
        })
    }

    pub fn var(ring: &Ring, var: usize) -> Result<LaurentPoly, RingError> {
        LaurentPoly::var_pow(ring, var, 1)
    }

    /// Builds canonical form from arbitrary terms: merges duplicates in
    /// characteristic 2, drops zeros, validates signs and coefficient field.
    pub fn from_terms(
        ring: &Ring,
        terms: impl IntoIterator<Item = (Monomial, FieldElem)>,
    ) -> Result<LaurentPoly, RingError> {
        let mut acc: BTreeMap<Monomial, FieldElem> = BTreeMap::new();
        for (m, c) in terms {
            if c.k() != ring.field_log() {
                return Err(RingError::FieldEmbedding { from: c.k(), to: ring.field_log() });
            }
            if m.0.len() != ring.arity() {
                return Err(RingError::BadDescriptor(format!(
                    "monomial arity {} in ring of arity {}",
                    m.0.len(),
                    ring.arity()
                )));
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e < 0 && !ring.vars()[i].laurent {
                    return Err(RingError::NegativeExponent {
                        var: ring.vars()[i].name.clone(),
                        exp: e,
                    });
                }
            }
            if c.is_zero() {
                continue;
            }
            match acc.entry(m) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let s = o.get().add(&c);
                    if s.is_zero() {
                        o.remove();
                    } else {
                        *o.get_mut() = s;
                    }
                }
            }
        }
        if acc.len() > TERM_CAP {
            return Err(RingError::TermCap { terms: acc.len(), cap: TERM_CAP });
        }
        let mut terms: Vec<_> = acc.into_iter().collect();
        terms.reverse(); // descending lex
        Ok(LaurentPoly { ring: ring.clone(), terms })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, FieldElem)] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms[0].0.is_unit_monomial()
            && self.terms[0].1.is_one()
    }

    /// Leading term in the descending lex order.
    pub fn leading_term(&self) -> Option<&(Monomial, FieldElem)> {
        self.terms.first()
    }

    pub fn add(&self, other: &LaurentPoly) -> Result<LaurentPoly, RingError> {
        self.ring.check_same(&other.ring)?;
        // Merge two descending-sorted term lists.
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].0.cmp(&other.terms[j].0) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = self.terms[i].1.add(&other.terms[j].1);
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        if out.len() > TERM_CAP {
            return Err(RingError::TermCap { terms: out.len(), cap: TERM_CAP });
        }
        Ok(LaurentPoly { ring: self.ring.clone(), terms: out })
    }

    pub fn mul(&self, other: &LaurentPoly) -> Result<LaurentPoly, RingError> {
        self.ring.check_same(&other.ring)?;
        let mut acc: BTreeMap<Monomial, FieldElem> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb)?;
                let c = ca.mul(cb);
                match acc.entry(m) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let s = o.get().add(&c);
                        if s.is_zero() {
                            o.remove();
                        } else {
                            *o.get_mut() = s;
                        }
                    }
                }
            }
            if acc.len() > TERM_CAP {
                return Err(RingError::TermCap { terms: acc.len(), cap: TERM_CAP });
            }
        }
        let mut terms: Vec<_> = acc.into_iter().collect();
        terms.reverse();
        Ok(LaurentPoly { ring: self.ring.clone(), terms })
    }

    pub fn scale(&self, c: &FieldElem) -> Result<LaurentPoly, RingError> {
        if c.k() != self.ring.field_log() {
            return Err(RingError::FieldEmbedding { from: c.k(), to: self.ring.field_log() });
        }
        if c.is_zero() {
            return Ok(LaurentPoly::zero(&self.ring));
        }
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), a.mul(c))).collect();
        Ok(LaurentPoly { ring: self.ring.clone(), terms })
    }

    pub fn pow(&self, exp: u32) -> Result<LaurentPoly, RingError> {
        let mut acc = LaurentPoly::one(&self.ring);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Units are single terms with an invertible coefficient whose monomial
    /// uses only Laurent variables.
    pub fn is_unit(&self) -> bool {
        if self.terms.len() != 1 {
            return false;
        }
        let (m, c) = &self.terms[0];
        !c.is_zero()
            && m.0
                .iter()
                .zip(self.ring.vars())
                .all(|(&e, v)| e == 0 || v.laurent)
    }

    pub fn inv_unit(&self) -> Result<LaurentPoly, RingError> {
        if !self.is_unit() {
            return Err(RingError::NotAUnit(self.to_string()));
        }
        let (m, c) = &self.terms[0];
        Ok(LaurentPoly {
            ring: self.ring.clone(),
            terms: vec![(m.inverse()?, c.inv()?)],
        })
    }

    /// Evaluates at a point of the coefficient field's extension `point[i]`
    /// for variable i. Coefficients embed only along GF(2) -> GF(2^k) or
    /// identically; Laurent variables require nonzero coordinates.
    pub fn specialize(&self, point: &[FieldElem]) -> Result<FieldElem, RingError> {
        if point.len() != self.ring.arity() {
            return Err(RingError::PointArity {
                arity: self.ring.arity(),
                found: point.len(),
            });
        }
        let kq = if point.is_empty() {
            self.ring.field_log()
        } else {
            point[0].k()
        };
        for p in point {
            if p.k() != kq {
                return Err(RingError::FieldEmbedding { from: p.k(), to: kq });
            }
        }
        let ks = self.ring.field_log();
        if ks != kq && ks != 1 {
            return Err(RingError::FieldEmbedding { from: ks, to: kq });
        }
        for (i, v) in self.ring.vars().iter().enumerate() {
            if v.laurent && point[i].is_zero() {
                return Err(RingError::ZeroCoordinate { var: v.name.clone() });
            }
        }
        let embed = |c: &FieldElem| -> FieldElem {
            if ks == kq {
                *c
            } else {
                // ks == 1: bits 0 or 1 carry over.
                if c.is_zero() { FieldElem::zero(kq) } else { FieldElem::one(kq) }
            }
        };
        let group_order = (1u64 << kq) - 1;
        let mut total = FieldElem::zero(kq);
        for (m, c) in &self.terms {
            let mut val = embed(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = point[i];
                if base.is_zero() {
                    // Only reachable for non-Laurent vars with e > 0.
                    val = FieldElem::zero(kq);
                    break;
                }
                let e_red = (e as i64).rem_euclid(group_order as i64) as u64;
                val = val.mul(&base.pow(e_red));
            }
            total = total.add(&val);
        }
        Ok(total)
    }

    /// Substitutes `images[i]` for variable i. Images must live in a common
    /// ring; images at Laurent positions must be units there.
    pub fn substitute(&self, images: &[LaurentPoly]) -> Result<LaurentPoly, RingError> {
        if images.len() != self.ring.arity() {
            return Err(RingError::PointArity {
                arity: self.ring.arity(),
                found: images.len(),
            });
        }
        let target = if images.is_empty() {
            self.ring.clone()
        } else {
            images[0].ring.clone()
        };
        for img in images {
            target.check_same(&img.ring)?;
        }
        let ks = self.ring.field_log();
        let kt = target.field_log();
        if ks != kt && ks != 1 {
            return Err(RingError::FieldEmbedding { from: ks, to: kt });
        }
        let embed = |c: &FieldElem| -> FieldElem {
            if ks == kt {
                *c
            } else if c.is_zero() {
                FieldElem::zero(kt)
            } else {
                FieldElem::one(kt)
            }
        };
        for (i, v) in self.ring.vars().iter().enumerate() {
            if v.laurent && !images[i].is_unit() {
                return Err(RingError::NotAUnit(format!(
                    "image of Laurent variable {} must be a unit, got {}",
                    v.name, images[i]
                )));
            }
        }
        let mut total = LaurentPoly::zero(&target);
        for (m, c) in &self.terms {
            let mut val = LaurentPoly::constant(&target, embed(c))?;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let factor = if e > 0 {
                    images[i].pow(e as u32)?
                } else {
                    images[i].inv_unit()?.pow(e.unsigned_abs())?
                };
                val = val.mul(&factor)?;
            }
            total = total.add(&val)?;
        }
        Ok(total)
    }
}

impl fmt::Display for LaurentPoly {
    /// Canonical text form: terms in descending lex order joined by `+`.
    /// Within a term, factors are joined by `*`; exponent 1 is implicit;
    /// a non-trivial field coefficient is printed first, parenthesized when
    /// it has several terms itself.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !c.is_one() || m.is_unit_monomial() {
                let cs = c.to_string();
                if cs.contains('+') {
                    factors.push(format!("({cs})"));
                } else {
                    factors.push(cs);
                }
            }
            for (j, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = &self.ring.vars()[j].name;
                if e == 1 {
                    factors.push(name.clone());
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldElem;
    use proptest::prelude::*;

    fn ring_f2_ht() -> Ring {
        Ring::new(
            1,
            vec![
                VarSpec { name: "h".into(), laurent: false },
                VarSpec { name: "t".into(), laurent: false },
            ],
        )
        .unwrap()
    }

    fn ring_laurent2() -> Ring {
        Ring::new(
            1,
            vec![
                VarSpec { name: "T0".into(), laurent: true },
                VarSpec { name: "T1".into(), laurent: true },
            ],
        )
        .unwrap()
    }

    #[test]
    fn canonical_form_merges_and_drops() {
        let r = ring_f2_ht();
        let one = FieldElem::one(1);
        let m = Monomial(vec![1, 0]);
        // h + h = 0 in characteristic 2.
        let p = LaurentPoly::from_terms(&r, vec![(m.clone(), one), (m, one)]).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.to_string(), "0");
    }

    #[test]
    fn display_ordering_is_descending_lex() {
        let r = ring_laurent2();
        let one = FieldElem::one(1);
        let p = LaurentPoly::from_terms(
            &r,
            vec![
                (Monomial(vec![0, 0]), one),
                (Monomial(vec![2, -2]), one),
                (Monomial(vec![-1, 3]), one),
            ],
        )
        .unwrap();
        assert_eq!(p.to_string(), "T0^2*T1^-2+1+T0^-1*T1^3");
    }

    #[test]
    fn units_and_inverses() {
        let r = ring_laurent2();
        let u = LaurentPoly::var_pow(&r, 0, -3).unwrap();
        assert!(u.is_unit());
        let inv = u.inv_unit().unwrap();
        assert!(u.mul(&inv).unwrap().is_one());

        let rp = ring_f2_ht();
        let h = LaurentPoly::var(&rp, 0).unwrap();
        assert!(!h.is_unit());
        assert!(h.inv_unit().is_err());
        assert!(LaurentPoly::one(&rp).is_unit());
        assert!(!LaurentPoly::zero(&rp).is_unit());
    }

    #[test]
    fn negative_exponent_rejected_for_polynomial_vars() {
        let r = ring_f2_ht();
        let err = LaurentPoly::var_pow(&r, 0, -1).unwrap_err();
        assert!(matches!(err, RingError::NegativeExponent { .. }));
    }

    #[test]
    fn mismatch_is_detected() {
        let a = LaurentPoly::one(&ring_f2_ht());
        let b = LaurentPoly::one(&ring_laurent2());
        assert!(matches!(a.add(&b), Err(RingError::Mismatch { .. })));
    }

    #[test]
    fn exponent_overflow_is_resource_error() {
        let r = ring_laurent2();
        let big = LaurentPoly::var_pow(&r, 0, i32::MAX).unwrap();
        let err = big.mul(&LaurentPoly::var(&r, 0).unwrap()).unwrap_err();
        assert!(err.is_resource());
    }

    #[test]
    fn specialization_basics() {
        let r = ring_f2_ht();
        let h = LaurentPoly::var(&r, 0).unwrap();
        let t = LaurentPoly::var(&r, 1).unwrap();
        let p = h.mul(&h).unwrap().add(&t).unwrap(); // h^2 + t
        let k = 4;
        let a = FieldElem::new(k, 0b0110).unwrap();
        let b = FieldElem::new(k, 0b1011).unwrap();
        let got = p.specialize(&[a, b]).unwrap();
        assert_eq!(got, a.square().add(&b));

        // Laurent variable at zero is rejected.
        let rl = ring_laurent2();
        let q = LaurentPoly::var_pow(&rl, 1, -2).unwrap();
        let err = q
            .specialize(&[FieldElem::one(k), FieldElem::zero(k)])
            .unwrap_err();
        assert!(matches!(err, RingError::ZeroCoordinate { .. }));
    }

    #[test]
    fn specialize_negative_exponents_use_group_inverse() {
        let rl = ring_laurent2();
        let q = LaurentPoly::var_pow(&rl, 0, -1).unwrap();
        let k = 8;
        let a = FieldElem::new(k, 0xab).unwrap();
        let got = q.specialize(&[a, FieldElem::one(k)]).unwrap();
        assert_eq!(got.mul(&a), FieldElem::one(k));
    }

    #[test]
    fn substitution_composes_with_specialization() {
        // (h |-> u^2, t |-> u + 1) then evaluate, vs evaluate directly.
        let src = ring_f2_ht();
        let tgt = Ring::new(1, vec![VarSpec { name: "u".into(), laurent: false }]).unwrap();
        let u = LaurentPoly::var(&tgt, 0).unwrap();
        let images = [u.pow(2).unwrap(), u.add(&LaurentPoly::one(&tgt)).unwrap()];
        let h = LaurentPoly::var(&src, 0).unwrap();
        let t = LaurentPoly::var(&src, 1).unwrap();
        let p = h
            .mul(&t)
            .unwrap()
            .add(&h)
            .unwrap()
            .add(&LaurentPoly::one(&src))
            .unwrap();
        let q = p.substitute(&images).unwrap();
        let k = 8;
        for bits in [3u32, 17, 250] {
            let x = FieldElem::new(k, bits).unwrap();
            let lhs = q.specialize(&[x]).unwrap();
            let hx = images[0].specialize(&[x]).unwrap();
            let tx = images[1].specialize(&[x]).unwrap();
            let rhs = p.specialize(&[hx, tx]).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    fn arb_poly(r: Ring, max_terms: usize) -> impl Strategy<Value = LaurentPoly> {
        let arity = r.arity();
        let lo = if r.vars().iter().all(|v| v.laurent) { -4i32 } else { 0 };
        prop::collection::vec(
            (prop::collection::vec(lo..5i32, arity), 0u32..2),
            0..max_terms,
        )
        .prop_map(move |raw| {
            LaurentPoly::from_terms(
                &r,
                raw.into_iter()
                    .map(|(e, c)| (Monomial(e), FieldElem::new(1, c & 1).unwrap())),
            )
            .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn ring_axioms_polynomial(
            a in arb_poly(ring_f2_ht(), 6),
            b in arb_poly(ring_f2_ht(), 6),
            c in arb_poly(ring_f2_ht(), 6),
        ) {
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            // Characteristic 2.
            prop_assert!(a.add(&a).unwrap().is_zero());
        }

        #[test]
        fn ring_axioms_laurent(
            a in arb_poly(ring_laurent2(), 6),
            b in arb_poly(ring_laurent2(), 6),
            c in arb_poly(ring_laurent2(), 6),
        ) {
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn specialization_is_a_ring_map(
            a in arb_poly(ring_f2_ht(), 6),
            b in arb_poly(ring_f2_ht(), 6),
            x in 0u32..256,
            y in 0u32..256,
        ) {
            let pt = [FieldElem::new(8, x).unwrap(), FieldElem::new(8, y).unwrap()];
            let sum = a.add(&b).unwrap().specialize(&pt).unwrap();
            prop_assert_eq!(sum, a.specialize(&pt).unwrap().add(&b.specialize(&pt).unwrap()));
            let prod = a.mul(&b).unwrap().specialize(&pt).unwrap();
            prop_assert_eq!(prod, a.specialize(&pt).unwrap().mul(&b.specialize(&pt).unwrap()));
        }
    }
}
