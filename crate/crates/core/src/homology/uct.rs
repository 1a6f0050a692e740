//! Base-change consistency: homology presented over the two-variable
//! polynomial ring, pushed through a ring map, must agree with homology
//! recomputed after base-changing the whole complex.
//!
//! Two pipelines share random specialization points of the target ring:
//!
//! - presented: take the finite presentation over the source ring, map every
//!   relation entry through the hom, specialize at the point, and read the
//!   rank as generators minus relation rank;
//! - direct: base-change the complex itself, then run field homology at the
//!   same point.
//!
//! When the target is free over the source, homology commutes with the base
//! change on the nose, and the two ranks agree away from a proper closed
//! locus that random nonzero points miss. For non-flat targets mismatches
//! are expected and the report records them; they are evidence about the
//! map, not a computation failure.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::complex::GradedFreeComplex;
use crate::hom::RingHom;
use crate::matrix::{rank as field_rank, SparseMat};
use crate::ring::{LaurentPoly, RingError};
use crate::rng::DetRng;

use super::groebner::groebner_presentation;
use super::{field, HomologyError};

/// Outcome of one base-change consistency run.
#[derive(Debug, Clone, Serialize)]
pub struct UctReport {
    pub source_system: String,
    pub target_ring: String,
    pub seed: u64,
    pub points_checked: usize,
    pub degrees_compared: usize,
    pub mismatches: Vec<UctMismatch>,
}

impl UctReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// One disagreement: the two pipelines saw different ranks for a degree at
/// a specialization point.
#[derive(Debug, Clone, Serialize)]
pub struct UctMismatch {
    pub degree: i64,
    /// Point coordinates in display form, empty for field targets.
    pub point: Vec<String>,
    pub presented_rank: usize,
    pub direct_rank: usize,
}

/// Compares the pushed presentation against directly recomputed homology at
/// `points` seeded random specializations of the target ring (one exact
/// evaluation when the target is a plain field). The source complex must
/// live on the two-variable polynomial ring; the comparison is meaningful
/// when the target is free over the source through `phi`.
pub fn uct_check(
    c: &GradedFreeComplex,
    phi: &RingHom,
    points: usize,
    seed: u64,
) -> Result<UctReport, HomologyError> {
    let pres = groebner_presentation(c)?;
    let mapped: BTreeMap<i64, (usize, SparseMat<LaurentPoly>)> = pres
        .degrees
        .iter()
        .map(|(&j, d)| {
            let p = d.presentation.as_ref().expect("this tier always presents");
            let rel = p.relations.try_map(|e| phi.apply(e))?;
            Ok((j, (p.generators, rel)))
        })
        .collect::<Result<_, RingError>>()?;
    let target = c.base_change("uct-target", phi, None)?;
    let arity = phi.target().arity();
    let rounds = if arity == 0 { 1 } else { points };
    let mut rng = DetRng::new(seed);
    let mut mismatches = Vec::new();
    let mut degrees_compared = 0usize;
    for _ in 0..rounds {
        let point = rng.point(8, arity);
        let at = if arity == 0 { None } else { Some(point.as_slice()) };
        let direct = field::homology_field(&target, at)?;
        for j in c.degree_list() {
            degrees_compared += 1;
            let presented_rank = match mapped.get(&j) {
                Some((gens, rel)) => {
                    let relx = rel.try_map(|e| e.specialize(&point))?;
                    gens - field_rank(&relx)
                }
                None => 0,
            };
            let direct_rank = direct.free_rank(j);
            if presented_rank != direct_rank {
                mismatches.push(UctMismatch {
                    degree: j,
                    point: point.iter().map(ToString::to_string).collect(),
                    presented_rank,
                    direct_rank,
                });
            }
        }
    }
    Ok(UctReport {
        source_system: c.system().id().to_string(),
        target_ring: phi.target().to_string(),
        seed,
        points_checked: rounds,
        degrees_compared,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::consts;
    use crate::diagram::LinkDiagram;
    use crate::frob::predefined;
    use crate::table::Table;

    fn complex_for(name: &str) -> GradedFreeComplex {
        let d = Table::bundled().lookup(name).unwrap().build().unwrap();
        build_complex(&d, predefined("f5").unwrap(), false).unwrap()
    }

    #[test]
    fn unknot_rank_two_survives_every_base_change() {
        let c = build_complex(&LinkDiagram::unlink(1), predefined("f5").unwrap(), false)
            .unwrap();
        let report = uct_check(&c, consts::hom_f5_to_universal(), 5, 3).unwrap();
        assert!(report.pass());
        assert_eq!(report.points_checked, 5);
        // a field target degenerates to a single exact evaluation; the
        // complex has no differential, so agreement needs no flatness
        let to_f4 = consts::hom_f5_to_universal()
            .then(consts::hom_universal_to_f4())
            .unwrap();
        let report = uct_check(&c, &to_f4, 20, 3).unwrap();
        assert!(report.pass());
        assert_eq!(report.points_checked, 1);
        assert_eq!(report.degrees_compared, 1);
    }

    #[test]
    fn trefoil_agrees_with_the_universal_target_at_twenty_points() {
        let c = complex_for("3_1");
        let report = uct_check(&c, consts::hom_f5_to_universal(), 20, 11).unwrap();
        assert!(
            report.pass(),
            "mismatches: {:?}",
            report.mismatches
        );
        assert_eq!(report.points_checked, 20);
        assert_eq!(report.degrees_compared, 20 * c.degree_list().len());
        assert_eq!(report.target_ring, consts::universal_ring().to_string());
    }

    #[test]
    fn hopf_agrees_with_the_rooted_three_variable_target() {
        let c = complex_for("L2a1");
        let phi = consts::hom_f5_to_universal()
            .then(consts::hom_universal_to_sbn())
            .unwrap();
        let report = uct_check(&c, &phi, 20, 11).unwrap();
        assert!(
            report.pass(),
            "mismatches: {:?}",
            report.mismatches
        );
        assert_eq!(report.points_checked, 20);
    }

    #[test]
    fn report_serializes_for_downstream_tooling() {
        let c = build_complex(&LinkDiagram::unlink(2), predefined("f5").unwrap(), false)
            .unwrap();
        let report = uct_check(&c, consts::hom_f5_to_universal(), 2, 1).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        assert!(text.contains("\"mismatches\":[]"), "{text}");
    }
}
