//! Homology of graded free complexes in three coefficient tiers.
//!
//! - [`field`]: exact Gaussian elimination over GF(2^k), either directly for
//!   field coefficients or after specializing polynomial entries at a point.
//! - [`pid`]: free rank plus invariant-factor torsion over one-variable
//!   coefficient rings, via Smith normal form ([`snf`]).
//! - [`groebner`]: finite presentations over the two-variable polynomial
//!   ring, via module Groebner bases and syzygies.
//!
//! [`uct`] cross-checks the tiers against each other under base change.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{ComplexError, GradedFreeComplex};
use crate::field::{FieldElem, FieldError};
use crate::frob::FrobError;
use crate::matrix::SparseMat;
use crate::ring::{LaurentPoly, Ring, RingError};

pub mod field;
pub mod groebner;
pub mod pid;
pub mod snf;
pub mod uct;

#[derive(Debug, Error)]
pub enum HomologyError {
    #[error("ring {0} is not supported by this tier")]
    UnsupportedRing(String),
    #[error("specialization point has a zero coordinate at position {0}")]
    ZeroCoordinate(usize),
    #[error("specialization point must have {arity} coordinates, found {found}")]
    PointArity { arity: usize, found: usize },
    #[error("a specialization point is required for coefficients in {0}")]
    PointRequired(String),
    #[error("resource budget exceeded: {what} reached {reached}, cap {cap}")]
    Resource {
        what: &'static str,
        reached: usize,
        cap: usize,
    },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Frob(#[from] FrobError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl HomologyError {
    /// True for budget violations, which callers map to a dedicated exit
    /// code rather than a generic failure.
    pub fn is_resource(&self) -> bool {
        matches!(self, HomologyError::Resource { .. })
    }
}

/// Coefficient tier a homology computation runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Field,
    Pid,
    Groebner,
}

impl Tier {
    /// The natural tier for a coefficient ring: fields compute directly,
    /// one-variable rings get exact invariant factors, the two-variable
    /// polynomial ring gets Groebner presentations. Rings with more
    /// variables have no full tier and are handled by specialization.
    pub fn for_ring(ring: &Ring) -> Option<Tier> {
        match ring.arity() {
            0 => Some(Tier::Field),
            1 => Some(Tier::Pid),
            2 if !ring.vars().iter().any(|v| v.laurent) => Some(Tier::Groebner),
            _ => None,
        }
    }
}

impl std::fmt::Display for Tier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Tier::Field => "field",
            Tier::Pid => "pid",
            Tier::Groebner => "groebner",
        };
        write!(f, "{name}")
    }
}

/// Finite presentation of one homology degree: `generators` free generators
/// subject to the rows of `relations` (one relation per row, one column per
/// generator).
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub generators: usize,
    pub relations: SparseMat<LaurentPoly>,
}

impl Presentation {
    /// A minimized presentation has no unit entries left to eliminate.
    pub fn is_minimal(&self) -> bool {
        self.relations.iter().all(|(_, _, p)| !p.is_unit())
    }
}

/// Homology in one homological degree.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DegreeData {
    pub free_rank: usize,
    /// Invariant factors, divisibility-ordered, each a nonzero non-unit;
    /// empty outside the PID tier.
    pub torsion: Vec<LaurentPoly>,
    /// Finite presentation; present on the Groebner tier only.
    pub presentation: Option<Presentation>,
    /// Rank refinement by quantum degree, when the differential preserves
    /// the quantum grading exactly.
    pub q_decomposition: Option<BTreeMap<i64, usize>>,
}

impl DegreeData {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0
            && self.torsion.is_empty()
            && self.presentation.as_ref().is_none_or(|p| p.generators == 0)
    }
}

/// Homology of one complex: per-degree summaries plus enough provenance
/// (system, tier, specialization point) to interpret them.
#[derive(Debug, Clone, PartialEq)]
pub struct HomologyModule {
    pub system: String,
    pub tier: Tier,
    pub reduced: bool,
    /// Point the coefficients were specialized at, for the field tier over
    /// non-field rings.
    pub specialization: Option<Vec<FieldElem>>,
    pub degrees: BTreeMap<i64, DegreeData>,
}

impl HomologyModule {
    pub fn degree(&self, j: i64) -> Option<&DegreeData> {
        self.degrees.get(&j)
    }

    pub fn free_rank(&self, j: i64) -> usize {
        self.degrees.get(&j).map_or(0, |d| d.free_rank)
    }

    pub fn torsion(&self, j: i64) -> &[LaurentPoly] {
        self.degrees.get(&j).map_or(&[], |d| d.torsion.as_slice())
    }

    pub fn total_free_rank(&self) -> usize {
        self.degrees.values().map(|d| d.free_rank).sum()
    }

    pub fn total_torsion_count(&self) -> usize {
        self.degrees.values().map(|d| d.torsion.len()).sum()
    }

    /// Degrees carrying anything nonzero, ascending.
    pub fn support(&self) -> Vec<i64> {
        self.degrees
            .iter()
            .filter(|(_, d)| !d.is_trivial())
            .map(|(&j, _)| j)
            .collect()
    }

    /// Alternating sum of free ranks. Over a field this equals the
    /// alternating sum of chain ranks; torsion never contributes.
    pub fn euler_characteristic(&self) -> i64 {
        self.degrees
            .iter()
            .map(|(&j, d)| {
                let sign = if j.rem_euclid(2) == 0 { 1 } else { -1 };
                sign * d.free_rank as i64
            })
            .sum()
    }

    pub fn to_report(&self) -> HomologyReport {
        HomologyReport {
            system: self.system.clone(),
            tier: self.tier,
            reduced: self.reduced,
            specialization: self
                .specialization
                .as_ref()
                .map(|p| p.iter().map(|c| c.to_string()).collect()),
            degrees: self
                .degrees
                .iter()
                .map(|(&j, d)| {
                    let presentation = d.presentation.as_ref().map(|p| {
                        let mut rows = vec![vec!["0".to_string(); p.generators]; p.relations.rows()];
                        for (r, c, e) in p.relations.iter() {
                            rows[r][c] = e.to_string();
                        }
                        PresentationReport {
                            generators: p.generators,
                            relations: rows,
                        }
                    });
                    let report = DegreeReport {
                        free_rank: d.free_rank,
                        torsion: d.torsion.iter().map(|t| t.to_string()).collect(),
                        presentation,
                        q_decomposition: d.q_decomposition.clone(),
                    };
                    (j, report)
                })
                .collect(),
        }
    }
}

/// Serialization-facing image of a [`HomologyModule`]: ring elements as
/// their text form, so reports are self-contained and diffable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub system: String,
    pub tier: Tier,
    pub reduced: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub specialization: Option<Vec<String>>,
    pub degrees: BTreeMap<i64, DegreeReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub free_rank: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub torsion: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub presentation: Option<PresentationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_decomposition: Option<BTreeMap<i64, usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationReport {
    pub generators: usize,
    pub relations: Vec<Vec<String>>,
}

/// Computes homology in the requested tier. `at` is consumed by the field
/// tier only; the exact tiers reject specialization points.
pub fn compute(
    c: &GradedFreeComplex,
    tier: Tier,
    at: Option<&[FieldElem]>,
) -> Result<HomologyModule, HomologyError> {
    match tier {
        Tier::Field => field::homology_field(c, at),
        Tier::Pid => {
            if let Some(p) = at {
                return Err(HomologyError::PointArity { arity: 0, found: p.len() });
            }
            pid::homology_pid(c)
        }
        Tier::Groebner => {
            if let Some(p) = at {
                return Err(HomologyError::PointArity { arity: 0, found: p.len() });
            }
            groebner::groebner_presentation(c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::diagram::LinkDiagram;
    use crate::frob::predefined;

    #[test]
    fn tier_for_ring_matches_arity() {
        use crate::consts;
        assert_eq!(Tier::for_ring(consts::f2_ring()), Some(Tier::Field));
        assert_eq!(Tier::for_ring(consts::f4_ring()), Some(Tier::Field));
        assert_eq!(Tier::for_ring(consts::bn_ring()), Some(Tier::Pid));
        assert_eq!(Tier::for_ring(consts::t_ring()), Some(Tier::Pid));
        assert_eq!(Tier::for_ring(consts::f5_ring()), Some(Tier::Groebner));
        assert_eq!(Tier::for_ring(consts::universal_ring()), None);
        assert_eq!(Tier::for_ring(consts::sbn_ring()), None);
    }

    #[test]
    fn exact_tiers_reject_points() {
        let d = LinkDiagram::unlink(1);
        let c = build_complex(&d, predefined("bn-graded").unwrap(), false).unwrap();
        let p = [FieldElem::one(8)];
        assert!(matches!(
            compute(&c, Tier::Pid, Some(&p)),
            Err(HomologyError::PointArity { .. })
        ));
    }

    #[test]
    fn report_round_trips_through_json() {
        let d = LinkDiagram::unlink(1);
        let c = build_complex(&d, predefined("filtered-f4").unwrap(), false).unwrap();
        let h = compute(&c, Tier::Field, None).unwrap();
        let report = h.to_report();
        let text = serde_json::to_string_pretty(&report).unwrap();
        let back: HomologyReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}
