//! The standard coefficient rings, distinguished elements, and base-change
//! homomorphisms used by the predefined Frobenius systems.
//!
//! Element inventory, all living in the four-variable Laurent ring:
//!   P  = T1*T2*T3 + T1*T2^-1*T3^-1 + T1^-1*T2*T3^-1 + T1^-1*T2^-1*T3
//!   Q  = sum over j of (Tj^2 + Tj^-2)
//!   A  = T1*(T2*T3 + T2^-1*T3^-1),  A' = T1^-1*(T2^-1*T3 + T2*T3^-1)
//!   V  = P + T0^2 + T0^-2   (the factor a full twist contributes)
//! P = A + A' holds on the nose; A*A' = T2^2 + T2^-2 + T3^2 + T3^-2.

use std::sync::OnceLock;

use crate::field::FieldElem;
use crate::hom::RingHom;
use crate::ring::{LaurentPoly, Monomial, Ring, VarSpec};

fn var(name: &str, laurent: bool) -> VarSpec {
    VarSpec { name: name.to_string(), laurent }
}

/// GF(2)[h,t], the base ring of the universal characteristic-2 system.
pub fn f5_ring() -> &'static Ring {
    static R: OnceLock<Ring> = OnceLock::new();
    R.get_or_init(|| Ring::new(1, vec![var("h", false), var("t", false)]).unwrap())
}

/// GF(2)[T0..T3, all invertible], the four-variable universal target.
pub fn universal_ring() -> &'static Ring {
    static R: OnceLock<Ring> = OnceLock::new();
    R.get_or_init(|| {
        Ring::new(
            1,
            vec![var("T0", true), var("T1", true), var("T2", true), var("T3", true)],
        )
        .unwrap()
    })
}

/// GF(2)[T1..T3, all invertible], the rooted three-variable ring.
pub fn sbn_ring() -> &'static Ring {
    static R: OnceLock<Ring> = OnceLock::new();
    R.get_or_init(|| {
        Ring::new(1, vec![var("T1", true), var("T2", true), var("T3", true)]).unwrap()
    })
}

/// GF(2)[h], base of the graded deformation system.
pub fn bn_ring() -> &'static Ring {
    static R: OnceLock<Ring> = OnceLock::new();
    R.get_or_init(|| Ring::new(1, vec![var("h", false)]).unwrap())
}

/// GF(2)[T, T^-1].
pub fn t_ring() -> &'static Ring {
    static R: OnceLock<Ring> = OnceLock::new();
    R.get_or_init(|| Ring::new(1, vec![var("T", true)]).unwrap())
}

pub fn f4_ring() -> &'static Ring {
    static R: OnceLock<Ring> = OnceLock::new();
    R.get_or_init(|| Ring::field(2).unwrap())
}

pub fn f2_ring() -> &'static Ring {
    static R: OnceLock<Ring> = OnceLock::new();
    R.get_or_init(|| Ring::field(1).unwrap())
}

fn poly4(exps: &[[i32; 4]]) -> LaurentPoly {
    LaurentPoly::from_terms(
        universal_ring(),
        exps.iter().map(|e| (Monomial(e.to_vec()), FieldElem::one(1))),
    )
    .unwrap()
}

/// The four-term element P.
pub fn p_elem() -> &'static LaurentPoly {
    static P: OnceLock<LaurentPoly> = OnceLock::new();
    P.get_or_init(|| {
        poly4(&[[0, 1, 1, 1], [0, 1, -1, -1], [0, -1, 1, -1], [0, -1, -1, 1]])
    })
}

/// The eight-term element Q.
pub fn q_elem() -> &'static LaurentPoly {
    static Q: OnceLock<LaurentPoly> = OnceLock::new();
    Q.get_or_init(|| {
        poly4(&[
            [2, 0, 0, 0],
            [-2, 0, 0, 0],
            [0, 2, 0, 0],
            [0, -2, 0, 0],
            [0, 0, 2, 0],
            [0, 0, -2, 0],
            [0, 0, 0, 2],
            [0, 0, 0, -2],
        ])
    })
}

/// A = T1*(T2*T3 + T2^-1*T3^-1); a square root of the quadratic X^2+PX+Q
/// splitting after the identification T0 = T1.
pub fn a_elem() -> &'static LaurentPoly {
    static A: OnceLock<LaurentPoly> = OnceLock::new();
    A.get_or_init(|| poly4(&[[0, 1, 1, 1], [0, 1, -1, -1]]))
}

/// A' = T1^-1*(T2^-1*T3 + T2*T3^-1), the conjugate of A.
pub fn a_prime_elem() -> &'static LaurentPoly {
    static A: OnceLock<LaurentPoly> = OnceLock::new();
    A.get_or_init(|| poly4(&[[0, -1, -1, 1], [0, -1, 1, -1]]))
}

/// V = P + T0^2 + T0^-2, the multiplier a full twist (or finger move)
/// contributes to a closed-surface evaluation.
pub fn v_factor() -> &'static LaurentPoly {
    static V: OnceLock<LaurentPoly> = OnceLock::new();
    V.get_or_init(|| {
        p_elem()
            .add(&poly4(&[[2, 0, 0, 0], [-2, 0, 0, 0]]))
            .unwrap()
    })
}

/// h |-> P, t |-> Q.
pub fn hom_f5_to_universal() -> &'static RingHom {
    static H: OnceLock<RingHom> = OnceLock::new();
    H.get_or_init(|| {
        RingHom::new(
            f5_ring().clone(),
            universal_ring().clone(),
            vec![p_elem().clone(), q_elem().clone()],
        )
        .unwrap()
    })
}

/// T0 |-> T1, T1,T2,T3 fixed.
pub fn hom_universal_to_sbn() -> &'static RingHom {
    static H: OnceLock<RingHom> = OnceLock::new();
    H.get_or_init(|| {
        let s = sbn_ring();
        let t1 = LaurentPoly::var(s, 0).unwrap();
        let t2 = LaurentPoly::var(s, 1).unwrap();
        let t3 = LaurentPoly::var(s, 2).unwrap();
        RingHom::new(
            universal_ring().clone(),
            s.clone(),
            vec![t1.clone(), t1, t2, t3],
        )
        .unwrap()
    })
}

/// T0,T1 |-> 1, T2,T3 |-> T.
pub fn hom_universal_to_t() -> &'static RingHom {
    static H: OnceLock<RingHom> = OnceLock::new();
    H.get_or_init(|| {
        let s = t_ring();
        let one = LaurentPoly::one(s);
        let t = LaurentPoly::var(s, 0).unwrap();
        RingHom::new(
            universal_ring().clone(),
            s.clone(),
            vec![one.clone(), one, t.clone(), t],
        )
        .unwrap()
    })
}

/// T0,T1 |-> 1, T2,T3 |-> z where z^2+z+1 = 0 in GF(4).
pub fn hom_universal_to_f4() -> &'static RingHom {
    static H: OnceLock<RingHom> = OnceLock::new();
    H.get_or_init(|| {
        let s = f4_ring();
        let one = LaurentPoly::one(s);
        let zeta = LaurentPoly::constant(s, FieldElem::gen(2)).unwrap();
        RingHom::new(
            universal_ring().clone(),
            s.clone(),
            vec![one.clone(), one, zeta.clone(), zeta],
        )
        .unwrap()
    })
}

/// Looks up a ring by its stable id. `gfN` accepts any power of two up to
/// 65536 for the plain fields.
pub fn named_ring(id: &str) -> Option<Ring> {
    match id {
        "ht" => Some(f5_ring().clone()),
        "t4" => Some(universal_ring().clone()),
        "t3" => Some(sbn_ring().clone()),
        "h" => Some(bn_ring().clone()),
        "t1" => Some(t_ring().clone()),
        "f2" | "gf2" => Some(f2_ring().clone()),
        "f4" | "gf4" => Some(f4_ring().clone()),
        _ => {
            let n: u64 = id.strip_prefix("gf")?.parse().ok()?;
            if n.is_power_of_two() && (2..=65536).contains(&n) {
                Ring::field(n.trailing_zeros() as u8).ok()
            } else {
                None
            }
        }
    }
}

pub fn ring_ids() -> &'static [&'static str] {
    &["ht", "t4", "t3", "h", "t1", "f2", "f4", "gf<2^k>"]
}
