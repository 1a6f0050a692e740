//! Arithmetic in the binary fields GF(2^k) for 1 <= k <= 16.
//!
//! Every field size uses one fixed modulus: the lexicographically least
//! irreducible polynomial of degree k over F2, where polynomials are compared
//! as bit patterns (bit i holds the coefficient of x^i). The modulus table is
//! computed once at first use and the choice is deterministic, so serialized
//! elements mean the same thing in every run. Elements are residue classes
//! stored as bit masks; addition is XOR and subtraction equals addition.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// Smallest supported field exponent.
pub const MIN_FIELD_LOG: u8 = 1;
/// Largest supported field exponent.
pub const MAX_FIELD_LOG: u8 = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("field exponent {0} out of range 1..=16")]
    ExponentOutOfRange(u8),
    #[error("bit pattern {bits:#x} is not an element of GF(2^{k})")]
    BitsOutOfRange { k: u8, bits: u32 },
    #[error("division by zero in GF(2^{0})")]
    DivisionByZero(u8),
}

/// Carry-less product of two polynomials over F2 given as bit masks.
fn clmul(a: u32, b: u32) -> u64 {
    let mut acc = 0u64;
    let mut a = a as u64;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        a <<= 1;
        b >>= 1;
    }
    acc
}

/// Remainder of `a` modulo `m` in F2[x], both as bit masks, `m != 0`.
fn polymod(mut a: u64, m: u64) -> u64 {
    let md = 63 - m.leading_zeros() as i32;
    loop {
        let ad = 63 - a.leading_zeros() as i32;
        if a == 0 || ad < md {
            return a;
        }
        a ^= m << (ad - md);
    }
}

/// True when `f` (degree k) has no factor of degree in 1..=k/2.
fn is_irreducible(f: u64, k: u8) -> bool {
    for d in 1..=(k as u32 / 2) {
        for g in (1u64 << d)..(1u64 << (d + 1)) {
            if polymod(f, g) == 0 {
                return false;
            }
        }
    }
    true
}

fn moduli() -> &'static [u32; 17] {
    static TABLE: OnceLock<[u32; 17]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0u32; 17];
        for k in MIN_FIELD_LOG..=MAX_FIELD_LOG {
            let high = 1u64 << k;
            // Constant term must be 1, else x divides f.
            let low = (1u64..high)
                .step_by(2)
                .find(|&low| is_irreducible(high | low, k))
                .expect("an irreducible polynomial of each degree exists");
            table[k as usize] = (high | low) as u32;
        }
        table
    })
}

/// The fixed modulus for GF(2^k), as a bit mask of degree k.
pub fn field_modulus(k: u8) -> Result<u32, FieldError> {
    if !(MIN_FIELD_LOG..=MAX_FIELD_LOG).contains(&k) {
        return Err(FieldError::ExponentOutOfRange(k));
    }
    Ok(moduli()[k as usize])
}

/// An element of GF(2^k). The exponent travels with the value; mixing
/// elements of different fields is a programming error and panics.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElem {
    k: u8,
    bits: u16,
}

impl FieldElem {
    pub fn new(k: u8, bits: u32) -> Result<Self, FieldError> {
        field_modulus(k)?;
        if k < 16 && bits >= (1 << k) {
            return Err(FieldError::BitsOutOfRange { k, bits });
        }
        Ok(FieldElem { k, bits: bits as u16 })
    }

    pub fn zero(k: u8) -> Self {
        FieldElem { k, bits: 0 }
    }

    pub fn one(k: u8) -> Self {
        FieldElem { k, bits: 1 }
    }

    /// The residue class of x, written `z` in the expression syntax.
    /// In GF(4) it satisfies z^2 + z + 1 = 0.
    pub fn gen(k: u8) -> Self {
        debug_assert!(k >= 2);
        FieldElem { k, bits: 2 }
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn bits(&self) -> u16 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn is_one(&self) -> bool {
        self.bits == 1
    }

    fn check_same_field(&self, other: &FieldElem) {
        assert_eq!(
            self.k, other.k,
            "mixed GF(2^{}) and GF(2^{}) operands",
            self.k, other.k
        );
    }

    pub fn add(&self, other: &FieldElem) -> FieldElem {
        self.check_same_field(other);
        FieldElem { k: self.k, bits: self.bits ^ other.bits }
    }

    pub fn mul(&self, other: &FieldElem) -> FieldElem {
        self.check_same_field(other);
        let m = moduli()[self.k as usize] as u64;
        let prod = clmul(self.bits as u32, other.bits as u32);
        FieldElem { k: self.k, bits: polymod(prod, m) as u16 }
    }

    pub fn square(&self) -> FieldElem {
        self.mul(self)
    }

    pub fn pow(&self, mut e: u64) -> FieldElem {
        let mut base = *self;
        let mut acc = FieldElem::one(self.k);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<FieldElem, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero(self.k));
        }
        // The multiplicative group has order 2^k - 1.
        let order = (1u64 << self.k) - 1;
        Ok(self.pow(order - 1))
    }

    pub fn div(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(&other.inv()?))
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}):{}", self.k, self)
    }
}

impl fmt::Display for FieldElem {
    /// Prints the residue as a polynomial in z: `0`, `1`, `z`, `z+1`, `z^2+z`, ...
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits == 0 {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..16).rev() {
            if self.bits >> i & 1 == 1 {
                if !first {
                    write!(f, "+")?;
                }
                first = false;
                match i {
                    0 => write!(f, "1")?,
                    1 => write!(f, "z")?,
                    _ => write!(f, "z^{i}")?,
                }
            }
        }
        Ok(())
    }
}

/// Parses the `Display` form back: sums of `1`, `z`, `z^i`.
pub fn parse_field_elem(k: u8, text: &str) -> Result<FieldElem, FieldError> {
    field_modulus(k)?;
    let mut bits: u32 = 0;
    for term in text.split('+') {
        let term = term.trim();
        let bit = match term {
            "0" => continue,
            "1" => 0,
            "z" => 1,
            _ => {
                let rest = term
                    .strip_prefix("z^")
                    .ok_or(FieldError::BitsOutOfRange { k, bits: u32::MAX })?;
                rest.parse::<u32>()
                    .map_err(|_| FieldError::BitsOutOfRange { k, bits: u32::MAX })?
            }
        };
        if bit >= k as u32 {
            return Err(FieldError::BitsOutOfRange { k, bits: 1 << bit });
        }
        bits ^= 1 << bit;
    }
    FieldElem::new(k, bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent irreducibility check: f of degree k is irreducible iff
    /// x^(2^k) = x mod f and gcd(x^(2^(k/p)) - x, f) = 1 for primes p | k.
    fn rabin_irreducible(f: u64, k: u8) -> bool {
        fn powmod_x(e: u32, f: u64) -> u64 {
            // x^(2^e) mod f by repeated squaring of the residue.
            let mut acc = polymod(2, f);
            for _ in 0..e {
                acc = polymod(clmul(acc as u32, acc as u32), f);
            }
            acc
        }
        fn gcd(mut a: u64, mut b: u64) -> u64 {
            while b != 0 {
                let r = polymod(a, b);
                a = b;
                b = r;
            }
            a
        }
        let k32 = k as u32;
        if powmod_x(k32, f) != polymod(2, f) {
            return false;
        }
        let mut primes = vec![];
        let mut n = k32;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                primes.push(p);
                while n.is_multiple_of(p) {
                    n /= p;
                }
            }
            p += 1;
        }
        if n > 1 {
            primes.push(n);
        }
        primes.iter().all(|&p| {
            let h = powmod_x(k32 / p, f) ^ polymod(2, f);
            gcd(f, h) == 1
        })
    }

    #[test]
    fn moduli_are_irreducible_and_minimal() {
        for k in MIN_FIELD_LOG..=MAX_FIELD_LOG {
            let m = field_modulus(k).unwrap() as u64;
            assert_eq!(m >> k, 1, "degree k with leading coefficient 1");
            assert!(rabin_irreducible(m, k), "modulus for k={k} irreducible");
            for cand in (1u64 << k)..m {
                assert!(
                    !rabin_irreducible(cand, k) || cand <= (1 << k),
                    "modulus for k={k} is not minimal: {cand:#x} < {m:#x}"
                );
            }
        }
    }

    #[test]
    fn small_moduli_match_known_table() {
        // x+1, x^2+x+1, x^3+x+1, x^4+x+1, x^5+x^2+1, x^6+x+1, x^7+x+1,
        // x^8+x^4+x^3+x+1.
        let known: [(u8, u32); 8] = [
            (1, 0b11),
            (2, 0b111),
            (3, 0b1011),
            (4, 0b10011),
            (5, 0b100101),
            (6, 0b1000011),
            (7, 0b10000011),
            (8, 0b100011011),
        ];
        for (k, m) in known {
            assert_eq!(field_modulus(k).unwrap(), m, "k={k}");
        }
    }

    #[test]
    fn gf4_generator_satisfies_its_equation() {
        let z = FieldElem::gen(2);
        let lhs = z.square().add(&z).add(&FieldElem::one(2));
        assert!(lhs.is_zero(), "z^2 + z + 1 = 0 in GF(4)");
        // z^-1 = z^2 = z + 1.
        assert_eq!(z.inv().unwrap(), z.square());
        assert_eq!(z.square().bits(), 0b11);
    }

    #[test]
    fn exhaustive_field_axioms_small_k() {
        for k in 1..=4u8 {
            let n = 1u32 << k;
            let all: Vec<FieldElem> =
                (0..n).map(|b| FieldElem::new(k, b).unwrap()).collect();
            for a in &all {
                assert_eq!(a.add(a), FieldElem::zero(k), "char 2");
                assert_eq!(a.mul(&FieldElem::one(k)), *a);
                if !a.is_zero() {
                    assert_eq!(a.mul(&a.inv().unwrap()), FieldElem::one(k));
                }
                for b in &all {
                    assert_eq!(a.add(b), b.add(a));
                    assert_eq!(a.mul(b), b.mul(a));
                    for c in &all {
                        assert_eq!(a.mul(&b.mul(c)), a.mul(b).mul(c));
                        assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
                    }
                }
            }
        }
    }

    #[test]
    fn randomized_axioms_large_k() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x11ec);
        for &k in &[8u8, 12, 16] {
            let mask = if k == 16 { u16::MAX } else { (1 << k) - 1 };
            for _ in 0..2000 {
                let a = FieldElem::new(k, (rng.gen::<u16>() & mask) as u32).unwrap();
                let b = FieldElem::new(k, (rng.gen::<u16>() & mask) as u32).unwrap();
                let c = FieldElem::new(k, (rng.gen::<u16>() & mask) as u32).unwrap();
                assert_eq!(a.mul(&b.mul(&c)), a.mul(&b).mul(&c));
                assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                // Frobenius is additive.
                assert_eq!(a.add(&b).square(), a.square().add(&b.square()));
                if !a.is_zero() {
                    assert_eq!(a.mul(&a.inv().unwrap()), FieldElem::one(k));
                }
            }
        }
    }

    #[test]
    fn display_round_trip() {
        for k in [2u8, 4, 8] {
            let n = 1u32 << k.min(6);
            for b in 0..n {
                let e = FieldElem::new(k, b).unwrap();
                let back = parse_field_elem(k, &e.to_string()).unwrap();
                assert_eq!(e, back);
            }
        }
    }

    #[test]
    fn errors_surface() {
        assert!(FieldElem::new(0, 0).is_err());
        assert!(FieldElem::new(17, 0).is_err());
        assert!(FieldElem::new(4, 16).is_err());
        assert!(FieldElem::zero(3).inv().is_err());
    }
}
