//! Cube-of-resolutions chain complexes over rank-2 Frobenius systems.
//!
//! A diagram with n crossings spans a {0,1}^n cube of smoothings. Each
//! vertex contributes the tensor power of the Frobenius algebra over its
//! circles; each edge contributes a multiplication (two circles merge) or a
//! comultiplication (one circle splits). The differential is the sum of the
//! edge maps out of each vertex, read from the 1-side to the 0-side, so the
//! homological degree |v| - n₋ drops by one (chain convention, no signs in
//! characteristic 2).
//!
//! Degree bookkeeping: the reported homological degree of a vertex v is
//! j = |v| - n₋. The Reidemeister-invariant index is i = n₊ - |v| = w - j
//! (w the writhe); cross-diagram comparisons align on i while reports stay
//! in j. The quantum degree of a basis tag is
//! q = (#x₊ - #x₋) - |v| + 2n₊ - n₋, with the reduced generator m counting
//! -1; q is exact for graded systems, a filtration level otherwise.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{DiagramError, EdgeShape, LinkDiagram, Smoothing};
use crate::frob::{FrobError, FrobeniusSystem};
use crate::hom::RingHom;
use crate::matrix::SparseMat;
use crate::ring::{LaurentPoly, Ring, RingError};

/// Hard cap on cube dimension; 2^n vertices are materialized.
pub const MAX_CUBE_CROSSINGS: usize = 20;

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("diagram has {crossings} crossings; the cube is capped at {max}")]
    TooLarge { crossings: usize, max: usize },
    #[error("reduced complex requires a system with a root; {system} has none")]
    ReducedWithoutRoot { system: String },
    #[error("reduced complex requires a basepoint (or a free loop) in the diagram")]
    ReducedWithoutBasepoint,
    #[error("d² ≠ 0: composite through degree {degree} has entry at ({row}, {col})")]
    DSquared { degree: i64, row: usize, col: usize },
    #[error("not a chain map: defect in degree {degree} at ({row}, {col})")]
    NotChainMap { degree: i64, row: usize, col: usize },
    #[error("chain map in degree {degree} expects {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    MapShape { degree: i64, expected_rows: usize, expected_cols: usize, rows: usize, cols: usize },
    #[error("complexes live over different systems: {left} vs {right}")]
    SystemMismatch { left: String, right: String },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Frob(#[from] FrobError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Basis tag of one generator: the cube vertex, the circle labeling
/// (bit i set ⇔ circle i carries x₋; the basepoint circle of a reduced
/// complex always reads 0 and carries m), a cone-side marker, and the
/// combinatorial quantum degree when the underlying diagram provides one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenTag {
    pub state: u64,
    pub labels: u64,
    #[serde(default)]
    pub side: u8,
    pub q: Option<i64>,
}

/// Crossing counts of the diagram a complex was built from; absent for
/// assembled complexes such as mapping cones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeInfo {
    pub n_plus: usize,
    pub n_minus: usize,
    pub components: usize,
}

/// A finitely generated free chain complex with tagged bases and sparse
/// differentials d_j : C_j → C_{j-1}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradedFreeComplex {
    system: FrobeniusSystem,
    reduced: bool,
    info: Option<CubeInfo>,
    degrees: BTreeMap<i64, Vec<GenTag>>,
    diffs: BTreeMap<i64, SparseMat<LaurentPoly>>,
}

impl GradedFreeComplex {
    pub fn system(&self) -> &FrobeniusSystem {
        &self.system
    }

    pub fn ring(&self) -> &Ring {
        self.system.ring()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn info(&self) -> Option<&CubeInfo> {
        self.info.as_ref()
    }

    /// Sorted list of homological degrees with at least one generator.
    pub fn degree_list(&self) -> Vec<i64> {
        self.degrees.keys().copied().collect()
    }

    pub fn rank(&self, degree: i64) -> usize {
        self.degrees.get(&degree).map_or(0, Vec::len)
    }

    pub fn total_rank(&self) -> usize {
        self.degrees.values().map(Vec::len).sum()
    }

    pub fn generators(&self, degree: i64) -> &[GenTag] {
        self.degrees.get(&degree).map_or(&[], Vec::as_slice)
    }

    /// The stored differential out of `degree`, if that block is nonempty
    /// on both sides.
    pub fn differential(&self, degree: i64) -> Option<&SparseMat<LaurentPoly>> {
        self.diffs.get(&degree)
    }

    /// The differential out of `degree` with explicit dimensions, a zero
    /// matrix when either side is empty.
    pub fn differential_or_zero(&self, degree: i64) -> SparseMat<LaurentPoly> {
        match self.diffs.get(&degree) {
            Some(m) => m.clone(),
            None => SparseMat::new(self.rank(degree - 1), self.rank(degree)),
        }
    }

    /// Number of generators sitting at one cube vertex (2^{circles} for an
    /// unreduced build).
    pub fn vertex_rank(&self, state: u64) -> usize {
        self.degrees
            .values()
            .map(|gens| gens.iter().filter(|t| t.state == state).count())
            .sum()
    }

    /// Exact check that consecutive differentials compose to zero;
    /// reports the first failing entry.
    pub fn verify_dsquared(&self) -> Result<(), ComplexError> {
        for (&j, dj) in &self.diffs {
            if let Some(dj1) = self.diffs.get(&(j + 1)) {
                let prod = dj.mul(dj1);
                let first = prod.iter().next().map(|(r, c, _)| (r, c));
                if let Some((row, col)) = first {
                    return Err(ComplexError::DSquared { degree: j + 1, row, col });
                }
            }
        }
        Ok(())
    }

    /// Shifts every homological degree by `by` (tags unchanged).
    pub fn shifted(&self, by: i64) -> GradedFreeComplex {
        GradedFreeComplex {
            system: self.system.clone(),
            reduced: self.reduced,
            info: self.info,
            degrees: self.degrees.iter().map(|(&j, g)| (j + by, g.clone())).collect(),
            diffs: self.diffs.iter().map(|(&j, m)| (j + by, m.clone())).collect(),
        }
    }

    /// Transports the complex along a coefficient map. Quantum tags are
    /// combinatorial data of the underlying cube and carry over unchanged.
    pub fn base_change(
        &self,
        id: impl Into<String>,
        phi: &RingHom,
        new_root: Option<LaurentPoly>,
    ) -> Result<GradedFreeComplex, ComplexError> {
        let system = self.system.base_change(id, phi, new_root)?;
        let mut diffs = BTreeMap::new();
        for (&j, m) in &self.diffs {
            diffs.insert(j, m.try_map(|p| phi.apply(p))?);
        }
        let out = GradedFreeComplex {
            system,
            reduced: self.reduced,
            info: self.info,
            degrees: self.degrees.clone(),
            diffs,
        };
        out.verify_dsquared()?;
        Ok(out)
    }
}

impl fmt::Display for GradedFreeComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "complex over {} ({}reduced), total rank {}",
            self.system.id(),
            if self.reduced { "" } else { "un" },
            self.total_rank()
        )?;
        for (j, gens) in &self.degrees {
            writeln!(f, "degree {j}: rank {}", gens.len())?;
            for (i, t) in gens.iter().enumerate() {
                write!(f, "  [{i}] v={:b} labels={:b}", t.state, t.labels)?;
                if t.side != 0 {
                    write!(f, " side={}", t.side)?;
                }
                if let Some(q) = t.q {
                    write!(f, " q={q}")?;
                }
                writeln!(f)?;
            }
        }
        for (j, m) in &self.diffs {
            writeln!(f, "d[{j}] ({}x{}):", m.rows(), m.cols())?;
            for (r, c, v) in m.iter() {
                writeln!(f, "  ({r}, {c}) -> {v}")?;
            }
        }
        Ok(())
    }
}

/// Index of a labeling mask within its vertex block: masks ascend, and a
/// reduced block skips the basepoint bit.
fn mask_index(mask: u64, basepoint: Option<usize>) -> usize {
    match basepoint {
        None => mask as usize,
        Some(b) => {
            let low = mask & ((1u64 << b) - 1);
            let high = mask >> (b + 1);
            (low | (high << b)) as usize
        }
    }
}

/// Per-vertex data cached during construction.
struct Vertex {
    smoothing: Smoothing,
    /// Index of this vertex's first generator within its degree block.
    offset: usize,
    /// Basepoint circle (reduced builds only).
    basepoint: Option<usize>,
}

/// Assembles the cube complex of `diagram` over `sys`.
///
/// Unreduced: vertex v contributes 2^{circles(v)} generators. Reduced
/// (root required): the basepoint circle is pinned to the m-line, leaving
/// 2^{circles(v)-1}; a diagram without an explicit basepoint may still
/// reduce through a free loop.
pub fn build_complex(
    diagram: &LinkDiagram,
    sys: &FrobeniusSystem,
    reduced: bool,
) -> Result<GradedFreeComplex, ComplexError> {
    let n = diagram.crossings();
    if n > MAX_CUBE_CROSSINGS {
        return Err(ComplexError::TooLarge { crossings: n, max: MAX_CUBE_CROSSINGS });
    }
    let root = if reduced {
        Some(
            sys.root()
                .cloned()
                .ok_or_else(|| ComplexError::ReducedWithoutRoot { system: sys.id().into() })?,
        )
    } else {
        None
    };
    let root_conj = root.as_ref().map(|_| sys.root_conjugate()).transpose()?;

    let n_plus = diagram.n_plus() as i64;
    let n_minus = diagram.n_minus() as i64;

    // Vertex pass: smoothings, generator tags, block offsets.
    let mut degrees: BTreeMap<i64, Vec<GenTag>> = BTreeMap::new();
    let mut vertices: Vec<Vertex> = Vec::with_capacity(1 << n);
    for v in 0..(1u64 << n) {
        let smoothing = diagram.smoothing(v)?;
        let total = smoothing.total_circles();
        let basepoint = if reduced {
            Some(smoothing.basepoint_circle.ok_or(ComplexError::ReducedWithoutBasepoint)?)
        } else {
            None
        };
        let j = v.count_ones() as i64 - n_minus;
        let block = degrees.entry(j).or_default();
        let offset = block.len();
        for mask in 0..(1u64 << total) {
            if let Some(b) = basepoint {
                if mask >> b & 1 == 1 {
                    continue;
                }
            }
            let x_minus = mask.count_ones() as i64;
            let algdeg = match basepoint {
                None => total as i64 - 2 * x_minus,
                Some(_) => total as i64 - 2 * x_minus - 2,
            };
            let q = algdeg - v.count_ones() as i64 + 2 * n_plus - n_minus;
            block.push(GenTag { state: v, labels: mask, side: 0, q: Some(q) });
        }
        vertices.push(Vertex { smoothing, offset, basepoint });
    }

    // Edge pass: accumulate merge/comultiplication blocks into the
    // differentials.
    let one = LaurentPoly::one(sys.ring());
    let alpha = sys.alpha().clone();
    let beta = sys.beta().clone();
    let mut diffs: BTreeMap<i64, SparseMat<LaurentPoly>> = BTreeMap::new();
    for (&j, block) in &degrees {
        if let Some(lower) = degrees.get(&(j - 1)) {
            if !block.is_empty() && !lower.is_empty() {
                diffs.insert(j, SparseMat::new(lower.len(), block.len()));
            }
        }
    }
    for v in 0..(1u64 << n) {
        let j = v.count_ones() as i64 - n_minus;
        let src = &vertices[v as usize];
        let src_total = src.smoothing.total_circles();
        for c in 0..n {
            if v >> c & 1 == 0 {
                continue;
            }
            let edge = diagram.edge(v, c)?;
            let u = edge.target_state;
            let dst = &vertices[u as usize];
            let mat = diffs.get_mut(&j).expect("edge target degree exists");
            for mask in 0..(1u64 << src_total) {
                if let Some(b) = src.basepoint {
                    if mask >> b & 1 == 1 {
                        continue;
                    }
                }
                // Transport passive circle labels, then apply the algebra
                // map on the active circles.
                let mut base = 0u64;
                for &(si, ti) in &edge.passive {
                    if mask >> si & 1 == 1 {
                        base |= 1 << ti;
                    }
                }
                let images: Vec<(u64, LaurentPoly)> = match edge.shape {
                    EdgeShape::Merge { from: [f1, f2], to } => {
                        let bp_active = src.basepoint == Some(f1) || src.basepoint == Some(f2);
                        let e1 = mask >> f1 & 1 == 1;
                        let e2 = mask >> f2 & 1 == 1;
                        if bp_active {
                            debug_assert_eq!(dst.basepoint, Some(to));
                            // m·x₊ = m, m·x₋ = A·m.
                            if e1 || e2 {
                                vec![(base, root.clone().expect("reduced merge"))]
                            } else {
                                vec![(base, one.clone())]
                            }
                        } else {
                            match (e1, e2) {
                                (false, false) => vec![(base, one.clone())],
                                (true, true) => vec![
                                    (base | 1 << to, alpha.clone()),
                                    (base, beta.clone()),
                                ],
                                _ => vec![(base | 1 << to, one.clone())],
                            }
                        }
                    }
                    EdgeShape::Split { from, to: [t1, t2] } => {
                        if src.basepoint == Some(from) {
                            // m ↦ m⊗x₋ + A′·(m⊗x₊), the basepoint staying
                            // on its own child circle.
                            let b2 = dst.basepoint.expect("reduced split target");
                            debug_assert!(b2 == t1 || b2 == t2);
                            let other = if b2 == t1 { t2 } else { t1 };
                            vec![
                                (base | 1 << other, one.clone()),
                                (base, root_conj.clone().expect("reduced split")),
                            ]
                        } else if mask >> from & 1 == 1 {
                            // Δx₋ = x₋⊗x₋ + β·x₊⊗x₊.
                            vec![
                                (base | 1 << t1 | 1 << t2, one.clone()),
                                (base, beta.clone()),
                            ]
                        } else {
                            // Δx₊ = x₊⊗x₋ + x₋⊗x₊ + α·x₊⊗x₊.
                            vec![
                                (base | 1 << t2, one.clone()),
                                (base | 1 << t1, one.clone()),
                                (base, alpha.clone()),
                            ]
                        }
                    }
                };
                let col = src.offset + mask_index(mask, src.basepoint);
                for (out_mask, coeff) in images {
                    let row = dst.offset + mask_index(out_mask, dst.basepoint);
                    mat.add_entry(row, col, &coeff);
                }
            }
        }
    }

    let built = GradedFreeComplex {
        system: sys.clone(),
        reduced,
        info: Some(CubeInfo {
            n_plus: diagram.n_plus(),
            n_minus: diagram.n_minus(),
            components: diagram.component_count(),
        }),
        degrees,
        diffs,
    };
    built.verify_dsquared()?;
    Ok(built)
}

/// A degree-0 chain map between complexes over one system, validated on
/// construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainMap {
    source: GradedFreeComplex,
    target: GradedFreeComplex,
    maps: BTreeMap<i64, SparseMat<LaurentPoly>>,
}

impl ChainMap {
    /// Wraps and checks f: source → target. Blocks may be omitted where
    /// either side is empty; supplied blocks must have matching shapes and
    /// must commute with the differentials.
    pub fn new(
        source: GradedFreeComplex,
        target: GradedFreeComplex,
        mut maps: BTreeMap<i64, SparseMat<LaurentPoly>>,
    ) -> Result<ChainMap, ComplexError> {
        if source.system != target.system {
            return Err(ComplexError::SystemMismatch {
                left: source.system.id().into(),
                right: target.system.id().into(),
            });
        }
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for &j in source.degrees.keys().chain(target.degrees.keys()) {
            lo = lo.min(j);
            hi = hi.max(j);
        }
        if lo > hi {
            return Ok(ChainMap { source, target, maps: BTreeMap::new() });
        }
        for j in lo..=hi {
            let rows = target.rank(j);
            let cols = source.rank(j);
            match maps.get(&j) {
                Some(m) => {
                    if m.rows() != rows || m.cols() != cols {
                        return Err(ComplexError::MapShape {
                            degree: j,
                            expected_rows: rows,
                            expected_cols: cols,
                            rows: m.rows(),
                            cols: m.cols(),
                        });
                    }
                }
                None => {
                    maps.insert(j, SparseMat::new(rows, cols));
                }
            }
        }
        // Chain property: d_T ∘ f_j = f_{j-1} ∘ d_S in every degree.
        for j in lo..=hi {
            let f_j = &maps[&j];
            let f_prev = maps
                .get(&(j - 1))
                .cloned()
                .unwrap_or_else(|| SparseMat::new(target.rank(j - 1), source.rank(j - 1)));
            let lhs = target.differential_or_zero(j).mul(f_j);
            let rhs = f_prev.mul(&source.differential_or_zero(j));
            let mut defect = lhs;
            for (r, c, v) in rhs.iter() {
                defect.add_entry(r, c, v);
            }
            let first = defect.iter().next().map(|(r, c, _)| (r, c));
            if let Some((row, col)) = first {
                return Err(ComplexError::NotChainMap { degree: j, row, col });
            }
        }
        Ok(ChainMap { source, target, maps })
    }

    pub fn source(&self) -> &GradedFreeComplex {
        &self.source
    }

    pub fn target(&self) -> &GradedFreeComplex {
        &self.target
    }

    pub fn map(&self, degree: i64) -> SparseMat<LaurentPoly> {
        self.maps
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| SparseMat::new(self.target.rank(degree), self.source.rank(degree)))
    }

    /// Identity chain map on `c`.
    pub fn identity(c: &GradedFreeComplex) -> ChainMap {
        let one = LaurentPoly::one(c.ring());
        let maps = c
            .degrees
            .iter()
            .map(|(&j, g)| (j, SparseMat::identity(g.len(), one.clone())))
            .collect();
        ChainMap { source: c.clone(), target: c.clone(), maps }
    }

    /// Zero chain map between two complexes over one system.
    pub fn zero(source: &GradedFreeComplex, target: &GradedFreeComplex) -> Result<ChainMap, ComplexError> {
        ChainMap::new(source.clone(), target.clone(), BTreeMap::new())
    }
}

/// The mapping cone of f: C → D, with Cone_j = C_{j-1} ⊕ D_j and
/// d(c, x) = (d_C c, f(c) + d_D x); no signs in characteristic 2. D-part
/// generators keep their tags; C-part tags get their side marker bumped.
pub fn mapping_cone(f: &ChainMap) -> GradedFreeComplex {
    let src = &f.source;
    let dst = &f.target;
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for &j in dst.degrees.keys() {
        lo = lo.min(j);
        hi = hi.max(j);
    }
    for &j in src.degrees.keys() {
        lo = lo.min(j + 1);
        hi = hi.max(j + 1);
    }
    let mut degrees: BTreeMap<i64, Vec<GenTag>> = BTreeMap::new();
    let mut diffs: BTreeMap<i64, SparseMat<LaurentPoly>> = BTreeMap::new();
    if lo > hi {
        return GradedFreeComplex {
            system: dst.system.clone(),
            reduced: src.reduced && dst.reduced,
            info: None,
            degrees,
            diffs,
        };
    }
    let cone_rank = |j: i64| dst.rank(j) + src.rank(j - 1);
    for j in lo..=hi {
        if cone_rank(j) == 0 {
            continue;
        }
        let mut gens: Vec<GenTag> = dst.generators(j).to_vec();
        gens.extend(src.generators(j - 1).iter().map(|t| GenTag { side: t.side + 1, ..*t }));
        degrees.insert(j, gens);
    }
    for j in lo..=hi {
        let rows = cone_rank(j - 1);
        let cols = cone_rank(j);
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = SparseMat::new(rows, cols);
        m.insert_block(0, 0, &dst.differential_or_zero(j));
        m.insert_block(0, dst.rank(j), &f.map(j - 1));
        m.insert_block(dst.rank(j - 1), dst.rank(j), &src.differential_or_zero(j - 1));
        if !m.is_zero() {
            diffs.insert(j, m);
        }
    }
    GradedFreeComplex {
        system: dst.system.clone(),
        reduced: src.reduced && dst.reduced,
        info: None,
        degrees,
        diffs,
    }
}

/// The two halves of a cube at one crossing: the bit-0 subcomplex, the
/// bit-1 part shifted down by one, and the connecting chain map whose cone
/// reassembles the full complex.
#[derive(Debug, Clone)]
pub struct SkeinBlocks {
    pub full: GradedFreeComplex,
    pub sub: GradedFreeComplex,
    pub quotient_shifted: GradedFreeComplex,
    pub connecting: ChainMap,
}

/// Splits the cube of `diagram` at `crossing`: states with the bit clear
/// form a subcomplex (the differential only clears bits), states with the
/// bit set form the quotient, and the differential components across the
/// bit give a chain map from the shifted quotient to the subcomplex.
pub fn crossing_blocks(
    diagram: &LinkDiagram,
    sys: &FrobeniusSystem,
    crossing: usize,
) -> Result<SkeinBlocks, ComplexError> {
    let full = build_complex(diagram, sys, false)?;
    if crossing >= diagram.crossings() {
        return Err(ComplexError::Diagram(DiagramError::NoSuchCrossing {
            index: crossing,
            crossings: diagram.crossings(),
        }));
    }
    let bit = 1u64 << crossing;
    let mut sub_degrees: BTreeMap<i64, Vec<GenTag>> = BTreeMap::new();
    let mut quot_degrees: BTreeMap<i64, Vec<GenTag>> = BTreeMap::new();
    let mut sub_index: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut quot_index: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (&j, gens) in &full.degrees {
        for (i, t) in gens.iter().enumerate() {
            if t.state & bit == 0 {
                sub_degrees.entry(j).or_default().push(*t);
                sub_index.entry(j).or_default().push(i);
            } else {
                quot_degrees.entry(j).or_default().push(*t);
                quot_index.entry(j).or_default().push(i);
            }
        }
    }
    let empty: Vec<usize> = Vec::new();
    let pick = |idx: &BTreeMap<i64, Vec<usize>>, j: i64| -> Vec<usize> {
        idx.get(&j).unwrap_or(&empty).clone()
    };
    let mut sub_diffs = BTreeMap::new();
    let mut quot_diffs = BTreeMap::new();
    let mut connecting: BTreeMap<i64, SparseMat<LaurentPoly>> = BTreeMap::new();
    for (&j, d) in &full.diffs {
        let sub_rows = pick(&sub_index, j - 1);
        let sub_cols = pick(&sub_index, j);
        let quot_rows = pick(&quot_index, j - 1);
        let quot_cols = pick(&quot_index, j);
        if !sub_rows.is_empty() && !sub_cols.is_empty() {
            let m = d.submatrix(&sub_rows, &sub_cols);
            if !m.is_zero() {
                sub_diffs.insert(j, m);
            }
        }
        if !quot_rows.is_empty() && !quot_cols.is_empty() {
            let m = d.submatrix(&quot_rows, &quot_cols);
            if !m.is_zero() {
                quot_diffs.insert(j, m);
            }
        }
        // Components from the 1-side into the 0-side: the connecting map.
        if !sub_rows.is_empty() && !quot_cols.is_empty() {
            let g = d.submatrix(&sub_rows, &quot_cols);
            connecting.insert(j - 1, g);
        }
    }
    let sub = GradedFreeComplex {
        system: sys.clone(),
        reduced: false,
        info: None,
        degrees: sub_degrees,
        diffs: sub_diffs,
    };
    let quotient = GradedFreeComplex {
        system: sys.clone(),
        reduced: false,
        info: None,
        degrees: quot_degrees,
        diffs: quot_diffs,
    };
    sub.verify_dsquared()?;
    quotient.verify_dsquared()?;
    // Shift the quotient down one degree so the connecting map has
    // degree 0; its mapping cone is then the full complex regraded.
    let quotient_shifted = quotient.shifted(-1);
    let connecting = ChainMap::new(quotient_shifted.clone(), sub.clone(), connecting)?;
    Ok(SkeinBlocks { full, sub, quotient_shifted, connecting })
}

/// The inclusion of the reduced complex into the unreduced one along
/// m = x₋ + A′·x₊ at the basepoint circle.
pub fn reduced_embedding(
    diagram: &LinkDiagram,
    sys: &FrobeniusSystem,
) -> Result<ChainMap, ComplexError> {
    let reduced = build_complex(diagram, sys, true)?;
    let unreduced = build_complex(diagram, sys, false)?;
    let a_conj = sys.root_conjugate()?;
    let one = LaurentPoly::one(sys.ring());
    let mut maps: BTreeMap<i64, SparseMat<LaurentPoly>> = BTreeMap::new();
    for (&j, red_gens) in &reduced.degrees {
        let unred_gens = unreduced.generators(j);
        let index: BTreeMap<(u64, u64), usize> = unred_gens
            .iter()
            .enumerate()
            .map(|(i, t)| ((t.state, t.labels), i))
            .collect();
        let mut m = SparseMat::new(unred_gens.len(), red_gens.len());
        for (col, t) in red_gens.iter().enumerate() {
            let bp = diagram
                .smoothing(t.state)?
                .basepoint_circle
                .ok_or(ComplexError::ReducedWithoutBasepoint)?;
            let with_minus = index[&(t.state, t.labels | 1 << bp)];
            let with_plus = index[&(t.state, t.labels)];
            m.add_entry(with_minus, col, &one);
            m.add_entry(with_plus, col, &a_conj);
        }
        maps.insert(j, m);
    }
    ChainMap::new(reduced, unreduced, maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frob::predefined;
    use crate::table::Table;

    fn system(id: &str) -> &'static FrobeniusSystem {
        predefined(id).expect("predefined system")
    }

    fn knot(name: &str) -> LinkDiagram {
        Table::bundled().get(name).expect("bundled entry").construction.build().expect("builds")
    }

    #[test]
    fn empty_diagram_has_rank_one() {
        let d = LinkDiagram::unlink(0);
        let c = build_complex(&d, system("univ"), false).unwrap();
        assert_eq!(c.degree_list(), vec![0]);
        assert_eq!(c.rank(0), 1);
        assert_eq!(c.generators(0)[0].q, Some(0));
    }

    #[test]
    fn unlink_ranks_and_quantum_degrees() {
        let d = LinkDiagram::unlink(3);
        for id in ["f5", "univ", "bn-graded", "sbn", "t-ring", "filtered-f4"] {
            let c = build_complex(&d, system(id), false).unwrap();
            assert_eq!(c.degree_list(), vec![0]);
            assert_eq!(c.rank(0), 8, "system {id}");
        }
        let c = build_complex(&d, system("f5"), false).unwrap();
        let qs: Vec<i64> = c.generators(0).iter().map(|t| t.q.unwrap()).collect();
        assert_eq!(qs.iter().filter(|&&q| q == 3).count(), 1);
        assert_eq!(qs.iter().filter(|&&q| q == 1).count(), 3);
        assert_eq!(qs.iter().filter(|&&q| q == -3).count(), 1);
    }

    #[test]
    fn reduced_unlink_halves_the_rank() {
        let d = LinkDiagram::unlink(4);
        for id in ["bn-graded", "sbn", "t-ring", "filtered-f4"] {
            let c = build_complex(&d, system(id), true).unwrap();
            assert_eq!(c.total_rank(), 8, "system {id}");
        }
        let err = build_complex(&d, system("f5"), true).unwrap_err();
        assert!(matches!(err, ComplexError::ReducedWithoutRoot { .. }));
    }

    #[test]
    fn hopf_cube_has_expected_vertex_ranks() {
        let d = knot("L2a1");
        let c = build_complex(&d, system("bn-graded"), false).unwrap();
        let mut ranks: Vec<usize> = (0..4).map(|v| c.vertex_rank(v)).collect();
        ranks.sort_unstable();
        assert_eq!(ranks, vec![2, 2, 4, 4]);
        assert_eq!(c.total_rank(), 12);
    }

    #[test]
    fn dsquared_holds_for_all_predefined_systems() {
        let d = knot("3_1");
        for id in ["f5", "univ", "bn-graded", "sbn", "t-ring", "filtered-f4"] {
            let sys = system(id);
            build_complex(&d, sys, false).unwrap();
            if sys.root().is_some() {
                let with_bp = d.clone().with_basepoint(1).unwrap();
                build_complex(&with_bp, sys, true).unwrap();
            }
        }
    }

    #[test]
    fn corrupted_differential_is_detected() {
        let d = knot("3_1");
        let mut c = build_complex(&d, system("f5"), false).unwrap();
        let j = *c.diffs.keys().next().unwrap();
        let one = LaurentPoly::one(c.ring());
        let m = c.diffs.get_mut(&j).unwrap();
        m.add_entry(0, 0, &one);
        let err = c.verify_dsquared().unwrap_err();
        assert!(matches!(err, ComplexError::DSquared { .. }));
    }

    #[test]
    fn graded_differential_is_quantum_homogeneous() {
        let d = knot("4_1");
        for id in ["f5", "bn-graded"] {
            let c = build_complex(&d, system(id), false).unwrap();
            for (&j, m) in &c.diffs {
                let src = c.generators(j);
                let dst = c.generators(j - 1);
                for (r, col, coeff) in m.iter() {
                    let w = crate::frob::quantum_weight(coeff)
                        .expect("graded coefficients have a single weight");
                    assert_eq!(
                        src[col].q.unwrap(),
                        dst[r].q.unwrap() + w,
                        "system {id} degree {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn filtered_differential_never_lowers_quantum_degree() {
        let d = knot("3_1");
        let c = build_complex(&d, system("filtered-f4"), false).unwrap();
        let mut strict = 0;
        for (&j, m) in &c.diffs {
            let src = c.generators(j);
            let dst = c.generators(j - 1);
            for (r, col, _) in m.iter() {
                let dq = dst[r].q.unwrap() - src[col].q.unwrap();
                assert!(dq >= 0, "degree {j}: q dropped by {}", -dq);
                if dq > 0 {
                    strict += 1;
                }
            }
        }
        assert!(strict > 0, "the filtered system should have off-diagonal terms");
    }

    #[test]
    fn reduced_embedding_is_a_chain_map() {
        let d = knot("3_1").with_basepoint(1).unwrap();
        for id in ["bn-graded", "sbn", "filtered-f4"] {
            let f = reduced_embedding(&d, system(id)).unwrap();
            assert_eq!(f.source().total_rank() * 2, f.target().total_rank(), "system {id}");
        }
    }

    #[test]
    fn cone_of_zero_doubles_ranks() {
        let d = knot("L2a1");
        let c = build_complex(&d, system("bn-graded"), false).unwrap();
        let cone = mapping_cone(&ChainMap::zero(&c, &c).unwrap());
        for j in c.degree_list() {
            assert_eq!(cone.rank(j), c.rank(j) + c.rank(j - 1));
        }
        assert_eq!(cone.total_rank(), 2 * c.total_rank());
        cone.verify_dsquared().unwrap();
    }

    #[test]
    fn cone_of_identity_verifies() {
        let d = knot("3_1");
        let c = build_complex(&d, system("f5"), false).unwrap();
        let cone = mapping_cone(&ChainMap::identity(&c));
        cone.verify_dsquared().unwrap();
        assert_eq!(cone.total_rank(), 2 * c.total_rank());
    }

    #[test]
    fn crossing_blocks_partition_the_cube() {
        let d = knot("3_1");
        let sys = system("f5");
        for crossing in 0..3 {
            let blocks = crossing_blocks(&d, sys, crossing).unwrap();
            for j in blocks.full.degree_list() {
                assert_eq!(
                    blocks.full.rank(j),
                    blocks.sub.rank(j) + blocks.quotient_shifted.rank(j - 1)
                );
            }
            let cone = mapping_cone(&blocks.connecting);
            cone.verify_dsquared().unwrap();
            for j in blocks.full.degree_list() {
                assert_eq!(cone.rank(j), blocks.full.rank(j), "crossing {crossing} degree {j}");
            }
        }
    }

    #[test]
    fn base_change_transports_the_cube() {
        let d = knot("3_1");
        let c = build_complex(&d, system("f5"), false).unwrap();
        let phi = crate::consts::hom_f5_to_universal();
        let moved = c.base_change("univ-from-f5", phi, None).unwrap();
        assert_eq!(moved.total_rank(), c.total_rank());
        assert_eq!(moved.ring(), crate::consts::universal_ring());
    }

    #[test]
    fn serde_round_trip_preserves_complex() {
        let d = knot("L2a1");
        let c = build_complex(&d, system("bn-graded"), false).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: GradedFreeComplex = serde_json::from_str(&text).unwrap();
        assert_eq!(back.total_rank(), c.total_rank());
        for j in c.degree_list() {
            assert_eq!(back.generators(j), c.generators(j));
            assert_eq!(back.differential(j).is_some(), c.differential(j).is_some());
        }
    }
}
