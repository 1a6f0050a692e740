//! Exact homology over one-variable coefficient rings.
//!
//! Over a principal ideal domain every finitely generated module splits as
//! a free part plus cyclic torsion summands, so homology is fully captured
//! by a free rank and a divisibility-ordered list of invariant factors per
//! degree, both read off Smith normal forms of the differentials.

use std::collections::BTreeMap;

use crate::complex::GradedFreeComplex;

use super::snf::{smith_form, SmithForm};
use super::{DegreeData, HomologyError, HomologyModule, Tier};

/// Homology of `c` over its one-variable coefficient ring.
///
/// The differential lowers the degree by one, so degree j sees an outgoing
/// map d_j and an incoming map d_{j+1}: the free rank is
/// dim C_j - rank d_j - rank d_{j+1}, and the torsion of H_j is the list
/// of non-unit invariant factors of d_{j+1} (the image sits inside the
/// kernel with exactly those elementary divisors, and the kernel is a
/// direct summand of C_j).
pub fn homology_pid(c: &GradedFreeComplex) -> Result<HomologyModule, HomologyError> {
    let ring = c.ring();
    if ring.arity() != 1 {
        return Err(HomologyError::UnsupportedRing(ring.to_string()));
    }
    let mut forms: BTreeMap<i64, SmithForm> = BTreeMap::new();
    for j in c.degree_list() {
        if let Some(d) = c.differential(j) {
            forms.insert(j, smith_form(d, false)?);
        }
    }
    let mut degrees = BTreeMap::new();
    for j in c.degree_list() {
        let dim = c.rank(j);
        let out = forms.get(&j).map_or(0, SmithForm::rank);
        let into = forms.get(&(j + 1)).map_or(0, SmithForm::rank);
        let free_rank = dim - out - into;
        let torsion = forms
            .get(&(j + 1))
            .map_or_else(Vec::new, SmithForm::torsion_factors);
        let data = DegreeData { free_rank, torsion, ..DegreeData::default() };
        if !data.is_trivial() {
            degrees.insert(j, data);
        }
    }
    Ok(HomologyModule {
        system: c.system().id().to_string(),
        tier: Tier::Pid,
        reduced: c.is_reduced(),
        specialization: None,
        degrees,
    })
}
