//! Ring homomorphisms between the coefficient rings, given by images of the
//! source variables. Construction validates that Laurent variables map to
//! units, so applying a homomorphism can only fail on resource limits.

use serde::{Deserialize, Serialize};

use crate::ring::{LaurentPoly, Ring, RingError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingHom {
    source: Ring,
    target: Ring,
    images: Vec<LaurentPoly>,
}

impl RingHom {
    pub fn new(source: Ring, target: Ring, images: Vec<LaurentPoly>) -> Result<Self, RingError> {
        if images.len() != source.arity() {
            return Err(RingError::PointArity {
                arity: source.arity(),
                found: images.len(),
            });
        }
        let ks = source.field_log();
        let kt = target.field_log();
        if ks != kt && ks != 1 {
            return Err(RingError::FieldEmbedding { from: ks, to: kt });
        }
        for (i, img) in images.iter().enumerate() {
            if img.ring() != &target {
                return Err(RingError::Mismatch {
                    expected: target.to_string(),
                    found: img.ring().to_string(),
                });
            }
            if source.vars()[i].laurent && !img.is_unit() {
                return Err(RingError::NotAUnit(format!(
                    "image of Laurent variable {} is {}",
                    source.vars()[i].name,
                    img
                )));
            }
        }
        Ok(RingHom { source, target, images })
    }

    pub fn identity(ring: &Ring) -> Self {
        let images = (0..ring.arity())
            .map(|i| LaurentPoly::var(ring, i).expect("index in range"))
            .collect();
        RingHom { source: ring.clone(), target: ring.clone(), images }
    }

    pub fn source(&self) -> &Ring {
        &self.source
    }

    pub fn target(&self) -> &Ring {
        &self.target
    }

    pub fn images(&self) -> &[LaurentPoly] {
        &self.images
    }

    pub fn apply(&self, p: &LaurentPoly) -> Result<LaurentPoly, RingError> {
        if p.ring() != &self.source {
            return Err(RingError::Mismatch {
                expected: self.source.to_string(),
                found: p.ring().to_string(),
            });
        }
        if self.source.arity() == 0 {
            // Substitution alone cannot re-home a constant; rebuild it in the
            // target ring (the field embedding was validated in `new`).
            let c = p.specialize(&[])?;
            let c = if self.source.field_log() == self.target.field_log() {
                c
            } else if c.is_zero() {
                crate::field::FieldElem::zero(self.target.field_log())
            } else {
                crate::field::FieldElem::one(self.target.field_log())
            };
            return LaurentPoly::constant(&self.target, c);
        }
        p.substitute(&self.images)
    }

    /// `other` after `self`: (other . self)(x) = other(self(x)).
    pub fn then(&self, other: &RingHom) -> Result<RingHom, RingError> {
        if self.target != other.source {
            return Err(RingError::Mismatch {
                expected: self.target.to_string(),
                found: other.source.to_string(),
            });
        }
        let images = self
            .images
            .iter()
            .map(|img| other.apply(img))
            .collect::<Result<Vec<_>, _>>()?;
        RingHom::new(self.source.clone(), other.target.clone(), images)
    }
}
