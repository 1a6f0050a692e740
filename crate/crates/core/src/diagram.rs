//! Planar link diagrams given by crossing lists.
//!
//! A crossing is a tuple X(a,b,c,d) of arc labels listed clockwise around
//! the crossing point starting at the incoming under-strand; the under
//! strand runs a -> c. Crossingless unknot components are written `U`.
//! Arc labels are positive integers; every label occurs exactly twice.
//!
//! Smoothing convention: the 0-smoothing of X(a,b,c,d) joins (a,d) and
//! (b,c); the 1-smoothing joins (a,b) and (c,d). A crossing is positive
//! when the over strand enters at the fourth slot, negative when it enters
//! at the second. For a positive crossing the 0-smoothing is therefore the
//! orientation-breaking one, and differentials run from 1-side to 0-side.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Hard bound on crossings; cube sizes grow as 2^n.
pub const MAX_CROSSINGS: usize = 24;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiagramError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("arc label {label} occurs {count} times; every arc must occur exactly twice")]
    ArcOccurrences { label: u32, count: usize },
    #[error("arc labels must be positive")]
    ZeroLabel,
    #[error("diagram has {0} crossings; limit is {MAX_CROSSINGS}")]
    TooManyCrossings(usize),
    #[error("inconsistent strand orientations: {0}")]
    Orientation(String),
    #[error("no arc labeled {0} in the diagram")]
    NoSuchArc(u32),
    #[error("crossing index {index} out of range for {crossings} crossings")]
    NoSuchCrossing { index: usize, crossings: usize },
    #[error("state {state:#x} has bits beyond the {crossings} crossings")]
    BadState { state: u64, crossings: usize },
    #[error("cannot build a connected sum with an empty diagram")]
    EmptySummand,
    #[error("invalid construction parameters: {0}")]
    Construction(String),
}

/// One crossing, clockwise from the incoming under-strand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdTuple(pub [u32; 4]);

impl PdTuple {
    fn rotated(&self, by: usize) -> PdTuple {
        let t = self.0;
        PdTuple(std::array::from_fn(|i| t[(i + by) % 4]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossingSign {
    Positive,
    Negative,
}

/// A complete smoothing of the diagram: circles as sorted arc lists,
/// followed by the crossingless free loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smoothing {
    pub circles: Vec<Vec<u32>>,
    pub free_loops: usize,
    /// Index (into the combined circle list) of the basepoint circle.
    pub basepoint_circle: Option<usize>,
}

impl Smoothing {
    pub fn total_circles(&self) -> usize {
        self.circles.len() + self.free_loops
    }
}

/// How one cube edge acts on circles, read in the differential's direction
/// (from the 1-side state to the 0-side state).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeShape {
    /// Circles `from` of the source merge into circle `to` of the target.
    Merge { from: [usize; 2], to: usize },
    /// Circle `from` of the source splits into circles `to` of the target.
    Split { from: usize, to: [usize; 2] },
}

/// A cube edge together with the matching of untouched circles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeEdge {
    pub source_state: u64,
    pub target_state: u64,
    pub crossing: usize,
    pub shape: EdgeShape,
    /// Pairs (source index, target index) for circles untouched by the
    /// crossing, including free loops.
    pub passive: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkDiagram {
    tuples: Vec<PdTuple>,
    free_loops: usize,
    signs: Vec<CrossingSign>,
    /// Successor arc along the orientation.
    next: BTreeMap<u32, u32>,
    /// Oriented arc cycles, ordered by minimal arc label.
    components: Vec<Vec<u32>>,
    basepoint: Option<u32>,
}

/// Per-arc bookkeeping while resolving orientations.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Flow {
    Unknown,
    In,
    Out,
}

impl LinkDiagram {
    // ------------------------------------------------------------------
    // Construction and validation
    // ------------------------------------------------------------------

    pub fn from_tuples(tuples: Vec<[u32; 4]>, free_loops: usize) -> Result<Self, DiagramError> {
        if tuples.len() > MAX_CROSSINGS {
            return Err(DiagramError::TooManyCrossings(tuples.len()));
        }
        let tuples: Vec<PdTuple> = tuples.into_iter().map(PdTuple).collect();
        let mut occurrences: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        for (k, t) in tuples.iter().enumerate() {
            for (slot, &arc) in t.0.iter().enumerate() {
                if arc == 0 {
                    return Err(DiagramError::ZeroLabel);
                }
                occurrences.entry(arc).or_default().push((k, slot));
            }
        }
        for (&label, occ) in &occurrences {
            if occ.len() != 2 {
                return Err(DiagramError::ArcOccurrences { label, count: occ.len() });
            }
        }
        let (next, signs) = resolve_orientation(&tuples, &occurrences)?;
        let components = trace_components(&next);
        let basepoint = components.first().map(|c| c[0]);
        Ok(LinkDiagram { tuples, free_loops, signs, next, components, basepoint })
    }

    /// Parses a whitespace- or comma-separated list of `X(a,b,c,d)` and `U`
    /// tokens. The empty string is the empty link.
    pub fn parse(text: &str) -> Result<Self, DiagramError> {
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let mut tuples = Vec::new();
        let mut free = 0usize;
        let err = |pos: usize, msg: &str| DiagramError::Parse { pos, msg: msg.to_string() };
        while pos < bytes.len() {
            let b = bytes[pos];
            if b.is_ascii_whitespace() || b == b',' {
                pos += 1;
                continue;
            }
            match b {
                b'U' => {
                    free += 1;
                    pos += 1;
                }
                b'X' => {
                    pos += 1;
                    let open = *bytes.get(pos).ok_or_else(|| err(pos, "expected ( or ["))?;
                    let close = match open {
                        b'(' => b')',
                        b'[' => b']',
                        _ => return Err(err(pos, "expected ( or [ after X")),
                    };
                    pos += 1;
                    let mut arcs = [0u32; 4];
                    for (i, slot) in arcs.iter_mut().enumerate() {
                        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b',') {
                            pos += 1;
                        }
                        let start = pos;
                        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                            pos += 1;
                        }
                        if start == pos {
                            return Err(err(pos, "expected an arc label"));
                        }
                        let label: u32 = text[start..pos]
                            .parse()
                            .map_err(|_| err(start, "arc label out of range"))?;
                        *slot = label;
                        if i == 3 {
                            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                                pos += 1;
                            }
                            if bytes.get(pos) != Some(&close) {
                                return Err(err(pos, "unclosed crossing tuple"));
                            }
                            pos += 1;
                        }
                    }
                    tuples.push(arcs);
                }
                _ => return Err(err(pos, "expected X or U")),
            }
        }
        LinkDiagram::from_tuples(tuples, free)
    }

    /// A split union of `n` crossingless unknots.
    pub fn unlink(n: usize) -> Self {
        LinkDiagram {
            tuples: Vec::new(),
            free_loops: n,
            signs: Vec::new(),
            next: BTreeMap::new(),
            components: Vec::new(),
            basepoint: None,
        }
    }

    // ------------------------------------------------------------------
    // Basic accessors
    // ------------------------------------------------------------------

    pub fn crossings(&self) -> usize {
        self.tuples.len()
    }

    pub fn tuples(&self) -> &[PdTuple] {
        &self.tuples
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn signs(&self) -> &[CrossingSign] {
        &self.signs
    }

    pub fn n_plus(&self) -> usize {
        self.signs.iter().filter(|s| **s == CrossingSign::Positive).count()
    }

    pub fn n_minus(&self) -> usize {
        self.signs.len() - self.n_plus()
    }

    pub fn writhe(&self) -> i64 {
        self.n_plus() as i64 - self.n_minus() as i64
    }

    pub fn arcs(&self) -> impl Iterator<Item = u32> + '_ {
        self.next.keys().copied()
    }

    pub fn successor(&self, arc: u32) -> Option<u32> {
        self.next.get(&arc).copied()
    }

    /// Oriented arc components, excluding free loops.
    pub fn components(&self) -> &[Vec<u32>] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len() + self.free_loops
    }

    pub fn basepoint(&self) -> Option<u32> {
        self.basepoint
    }

    pub fn with_basepoint(mut self, arc: u32) -> Result<Self, DiagramError> {
        if !self.next.contains_key(&arc) {
            return Err(DiagramError::NoSuchArc(arc));
        }
        self.basepoint = Some(arc);
        Ok(self)
    }

    // ------------------------------------------------------------------
    // Smoothings and cube edges
    // ------------------------------------------------------------------

    fn check_state(&self, state: u64) -> Result<(), DiagramError> {
        let n = self.tuples.len();
        if n < 64 && state >> n != 0 {
            return Err(DiagramError::BadState { state, crossings: n });
        }
        Ok(())
    }

    pub fn smoothing(&self, state: u64) -> Result<Smoothing, DiagramError> {
        self.check_state(state)?;
        let mut uf = UnionFind::new();
        for arc in self.next.keys() {
            uf.ensure(*arc);
        }
        for (k, t) in self.tuples.iter().enumerate() {
            let [a, b, c, d] = t.0;
            if state >> k & 1 == 0 {
                uf.union(a, d);
                uf.union(b, c);
            } else {
                uf.union(a, b);
                uf.union(c, d);
            }
        }
        let mut classes: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for arc in self.next.keys() {
            classes.entry(uf.find(*arc)).or_default().push(*arc);
        }
        // BTreeMap keyed by the root; re-key by minimum arc for stability.
        let mut circles: Vec<Vec<u32>> = classes.into_values().collect();
        for c in &mut circles {
            c.sort_unstable();
        }
        circles.sort_by_key(|c| c[0]);
        let basepoint_circle = match self.basepoint {
            Some(arc) => circles.iter().position(|c| c.binary_search(&arc).is_ok()),
            None if self.free_loops > 0 => Some(circles.len()),
            None => None,
        };
        Ok(Smoothing { circles, free_loops: self.free_loops, basepoint_circle })
    }

    /// The cube edge out of `state` (which must have bit `crossing` set),
    /// in the differential's direction.
    pub fn edge(&self, state: u64, crossing: usize) -> Result<CubeEdge, DiagramError> {
        self.check_state(state)?;
        if crossing >= self.tuples.len() {
            return Err(DiagramError::NoSuchCrossing {
                index: crossing,
                crossings: self.tuples.len(),
            });
        }
        assert!(state >> crossing & 1 == 1, "edge requires the crossing bit set");
        let target_state = state ^ (1 << crossing);
        let src = self.smoothing(state)?;
        let dst = self.smoothing(target_state)?;
        let arcs = self.tuples[crossing].0;
        let touches = |c: &Vec<u32>| arcs.iter().any(|a| c.binary_search(a).is_ok());
        let src_active: Vec<usize> =
            (0..src.circles.len()).filter(|&i| touches(&src.circles[i])).collect();
        let dst_active: Vec<usize> =
            (0..dst.circles.len()).filter(|&i| touches(&dst.circles[i])).collect();
        let shape = match (src_active.len(), dst_active.len()) {
            (2, 1) => EdgeShape::Merge { from: [src_active[0], src_active[1]], to: dst_active[0] },
            (1, 2) => EdgeShape::Split { from: src_active[0], to: [dst_active[0], dst_active[1]] },
            (s, d) => unreachable!("crossing changes circle count by one ({s} -> {d})"),
        };
        // Untouched circles have identical arc sets on both sides.
        let mut dst_index: BTreeMap<&[u32], usize> = BTreeMap::new();
        for (i, c) in dst.circles.iter().enumerate() {
            if !dst_active.contains(&i) {
                dst_index.insert(c.as_slice(), i);
            }
        }
        let mut passive = Vec::new();
        for (i, c) in src.circles.iter().enumerate() {
            if !src_active.contains(&i) {
                let j = *dst_index
                    .get(c.as_slice())
                    .expect("untouched circle must persist across the edge");
                passive.push((i, j));
            }
        }
        // Free loops ride along after the arc circles.
        for f in 0..self.free_loops {
            passive.push((src.circles.len() + f, dst.circles.len() + f));
        }
        Ok(CubeEdge { source_state: state, target_state, crossing, shape, passive })
    }

    // ------------------------------------------------------------------
    // Diagram surgery
    // ------------------------------------------------------------------

    /// The mirror image: each crossing keeps its arcs but the strands swap
    /// over/under, which rotates every tuple to start at the old over-in.
    pub fn mirror(&self) -> LinkDiagram {
        let tuples = self
            .tuples
            .iter()
            .zip(&self.signs)
            .map(|(t, s)| match s {
                // Over enters at slot 1 for negative, slot 3 for positive.
                CrossingSign::Negative => t.rotated(1).0,
                CrossingSign::Positive => t.rotated(3).0,
            })
            .collect();
        let mut m = LinkDiagram::from_tuples(tuples, self.free_loops)
            .expect("mirror of a valid diagram is valid");
        m.basepoint = self.basepoint;
        m
    }

    /// Replaces crossing `index` by its `side`-smoothing, producing a
    /// diagram with one crossing fewer (plus possible new free loops).
    pub fn smooth_crossing(&self, index: usize, side: u8) -> Result<LinkDiagram, DiagramError> {
        if index >= self.tuples.len() {
            return Err(DiagramError::NoSuchCrossing { index, crossings: self.tuples.len() });
        }
        let [a, b, c, d] = self.tuples[index].0;
        let pairs: [(u32, u32); 2] = if side == 0 { [(a, d), (b, c)] } else { [(a, b), (c, d)] };
        let mut uf = UnionFind::new();
        let mut new_free = 0usize;
        for &(x, y) in &pairs {
            if x == y {
                // A strand looping straight back closes off immediately.
                new_free += 1;
            } else {
                uf.ensure(x);
                uf.ensure(y);
                uf.union(x, y);
            }
        }
        // Joined arcs collapse to their class minimum.
        let rename = |arc: u32, uf: &mut UnionFind| -> u32 {
            if uf.contains(arc) {
                let root = uf.find(arc);
                uf.class_min(root)
            } else {
                arc
            }
        };
        let mut tuples = Vec::with_capacity(self.tuples.len() - 1);
        let mut used: BTreeSet<u32> = BTreeSet::new();
        for (k, t) in self.tuples.iter().enumerate() {
            if k == index {
                continue;
            }
            let mut arcs = [0u32; 4];
            for (i, &x) in t.0.iter().enumerate() {
                arcs[i] = rename(x, &mut uf);
                used.insert(arcs[i]);
            }
            tuples.push(arcs);
        }
        // A joined class absent from all remaining crossings became a loop.
        let mut roots: BTreeSet<u32> = BTreeSet::new();
        for &(x, y) in &pairs {
            if x != y {
                roots.insert(uf.find(x));
            }
        }
        for root in roots {
            if !used.contains(&uf.class_min(root)) {
                new_free += 1;
            }
        }
        // Joining against the orientation reverses part of the strand, so
        // the inherited under-in commitments can be stale; recommit
        // directions from the unoriented data (cyclic orders are intact).
        let protos = tuples.into_iter().map(|cyc| ProtoCrossing { cyc }).collect();
        commit_directions(protos, self.free_loops + new_free)
    }

    fn max_arc(&self) -> u32 {
        self.next.keys().next_back().copied().unwrap_or(0)
    }

    fn shifted_tuples(&self, offset: u32) -> Vec<[u32; 4]> {
        self.tuples
            .iter()
            .map(|t| std::array::from_fn(|i| t.0[i] + offset))
            .collect()
    }

    pub fn disjoint_union(&self, other: &LinkDiagram) -> LinkDiagram {
        let offset = self.max_arc();
        let mut tuples = self.tuples.iter().map(|t| t.0).collect::<Vec<_>>();
        tuples.extend(other.shifted_tuples(offset));
        let mut u = LinkDiagram::from_tuples(tuples, self.free_loops + other.free_loops)
            .expect("disjoint union of valid diagrams is valid");
        u.basepoint = self.basepoint.or_else(|| other.basepoint.map(|b| b + offset));
        u
    }

    /// Joins the two diagrams along their basepoint arcs, respecting
    /// orientation. A crossingless unknot acts as the neutral summand.
    pub fn connected_sum(&self, other: &LinkDiagram) -> Result<LinkDiagram, DiagramError> {
        // Summing with a crossingless unknot changes nothing but carries
        // its extra free loops along.
        if self.basepoint.is_none() || other.basepoint.is_none() {
            let (with_arcs, unknots) = if self.basepoint.is_some() {
                (self, other)
            } else {
                (other, self)
            };
            if unknots.free_loops == 0 || with_arcs.basepoint.is_none() && with_arcs.free_loops == 0
            {
                return Err(DiagramError::EmptySummand);
            }
            let mut d = with_arcs.clone();
            d.free_loops += unknots.free_loops - 1;
            return Ok(d);
        }
        let x = self.basepoint.unwrap();
        let y0 = other.basepoint.unwrap();
        let offset = self.max_arc();
        let y = y0 + offset;
        // Cut x and y; reconnect so x's outgoing half flows into y's head
        // and y's outgoing half into x's head: substitute the label at each
        // head occurrence by the other arc. The head occurrence of an arc
        // is slot 0 where it passes under, or the incoming over slot.
        let mut tuples = self.tuples.iter().map(|t| t.0).collect::<Vec<_>>();
        tuples.extend(other.shifted_tuples(offset));
        let find_head = |d: &LinkDiagram, arc: u32| -> (usize, usize) {
            let succ = d.next[&arc];
            for (k, t) in d.tuples.iter().enumerate() {
                let [a, b, c, dd] = t.0;
                if a == arc && c == succ {
                    return (k, 0);
                }
                if b == arc && dd == succ && d.signs[k] == CrossingSign::Negative {
                    return (k, 1);
                }
                if dd == arc && b == succ && d.signs[k] == CrossingSign::Positive {
                    return (k, 3);
                }
            }
            unreachable!("oriented arc must end somewhere")
        };
        let (kx, sx) = find_head(self, x);
        let (ky0, sy) = find_head(other, y0);
        let ky = ky0 + self.tuples.len();
        tuples[kx][sx] = y;
        tuples[ky][sy] = x;
        let mut s = LinkDiagram::from_tuples(tuples, self.free_loops + other.free_loops)?;
        s.basepoint = Some(x.min(y));
        Ok(s)
    }

    // ------------------------------------------------------------------
    // Canonical form
    // ------------------------------------------------------------------

    /// Relabels arcs 1..N sequentially along each oriented component,
    /// components ordered by current minimal label, each starting at its
    /// minimal label. Free loops and basepoint are preserved.
    pub fn relabeled(&self) -> LinkDiagram {
        let map = self.sequential_map(&self.components.iter().map(|c| c[0]).collect::<Vec<_>>());
        self.apply_relabel(&map)
    }

    fn sequential_map(&self, starts: &[u32]) -> BTreeMap<u32, u32> {
        let mut map = BTreeMap::new();
        let mut label = 1u32;
        for (ci, comp) in self.components.iter().enumerate() {
            let start_pos = comp.iter().position(|&a| a == starts[ci]).unwrap();
            for i in 0..comp.len() {
                map.insert(comp[(start_pos + i) % comp.len()], label);
                label += 1;
            }
        }
        map
    }

    fn apply_relabel(&self, map: &BTreeMap<u32, u32>) -> LinkDiagram {
        let tuples = self
            .tuples
            .iter()
            .map(|t| std::array::from_fn(|i| map[&t.0[i]]))
            .collect();
        let mut d = LinkDiagram::from_tuples(tuples, self.free_loops)
            .expect("relabeling preserves validity");
        d.basepoint = self.basepoint.map(|b| map[&b]);
        d
    }

    /// A labeling-invariant text form: the lexicographically least tuple
    /// list over all choices of starting arc per component, with sorted
    /// tuples, appended free-loop count and basepoint.
    pub fn canonical_form(&self) -> String {
        let best = self.canonical_diagram();
        let mut sorted: Vec<[u32; 4]> = best.tuples.iter().map(|t| t.0).collect();
        sorted.sort_unstable();
        let mut out = String::new();
        for t in &sorted {
            out.push_str(&format!("X({},{},{},{})", t[0], t[1], t[2], t[3]));
            out.push(' ');
        }
        for _ in 0..self.free_loops {
            out.push_str("U ");
        }
        let bp = best
            .basepoint
            .map(|b| b.to_string())
            .unwrap_or_else(|| "-".to_string());
        out.push_str(&format!("bp={bp}"));
        out
    }

    fn canonical_diagram(&self) -> LinkDiagram {
        if self.components.is_empty() {
            return self.clone();
        }
        // Product over per-component start choices; bounded by the arc
        // count per component and only used on small diagrams.
        let mut best: Option<(Vec<[u32; 4]>, LinkDiagram)> = None;
        let sizes: Vec<usize> = self.components.iter().map(|c| c.len()).collect();
        let combos: usize = sizes.iter().product();
        if combos > 1 << 16 {
            return self.relabeled();
        }
        let mut idx = vec![0usize; sizes.len()];
        loop {
            let starts: Vec<u32> = self
                .components
                .iter()
                .zip(&idx)
                .map(|(c, &i)| c[i])
                .collect();
            let cand = self.apply_relabel(&self.sequential_map(&starts));
            let mut key: Vec<[u32; 4]> = cand.tuples.iter().map(|t| t.0).collect();
            key.sort_unstable();
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, cand));
            }
            // Odometer increment.
            let mut i = 0;
            loop {
                if i == sizes.len() {
                    return best.unwrap().1;
                }
                idx[i] += 1;
                if idx[i] < sizes[i] {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    // ------------------------------------------------------------------
    // Constructors
    // ------------------------------------------------------------------

    /// Closure of a braid word on `strands` strands. Letters are nonzero
    /// integers: j > 0 crosses strand j over strand j+1, j < 0 the reverse.
    /// Unused strands close into free loops.
    pub fn braid_closure(word: &[i32], strands: usize) -> Result<LinkDiagram, DiagramError> {
        if strands == 0 {
            return Err(DiagramError::Construction("braid needs at least one strand".into()));
        }
        for &w in word {
            if w == 0 || w.unsigned_abs() as usize >= strands {
                return Err(DiagramError::Construction(format!(
                    "braid letter {w} out of range for {strands} strands"
                )));
            }
        }
        if word.len() > MAX_CROSSINGS {
            return Err(DiagramError::TooManyCrossings(word.len()));
        }
        let mut fresh = strands as u32;
        let initial: Vec<u32> = (1..=strands as u32).collect();
        let mut cur = initial.clone();
        let mut tuples: Vec<[u32; 4]> = Vec::with_capacity(word.len());
        for &w in word {
            let j = w.unsigned_abs() as usize - 1;
            let (l, r) = (cur[j], cur[j + 1]);
            let nl = fresh + 1;
            let nr = fresh + 2;
            fresh += 2;
            if w > 0 {
                // Over strand l -> nr enters at the fourth slot.
                tuples.push([r, nr, nl, l]);
            } else {
                // Over strand r -> nl enters at the second slot.
                tuples.push([l, r, nr, nl]);
            }
            cur[j] = nl;
            cur[j + 1] = nr;
        }
        // Close the braid: identify each strand's final arc with its
        // initial one. Strands with no crossings become free loops.
        let mut free = 0usize;
        let mut subst: BTreeMap<u32, u32> = BTreeMap::new();
        for (&fin, &init) in cur.iter().zip(&initial) {
            if fin == init {
                free += 1;
            } else {
                subst.insert(fin, init);
            }
        }
        for t in &mut tuples {
            for a in t.iter_mut() {
                if let Some(&s) = subst.get(a) {
                    *a = s;
                }
            }
        }
        Ok(LinkDiagram::from_tuples(tuples, free)?.relabeled())
    }

    /// The two-bridge link of fraction p/q (p > q >= 1), built from the
    /// continued fraction by alternating twist batches.
    pub fn rational(p: i64, q: i64) -> Result<LinkDiagram, DiagramError> {
        if p <= 0 || q <= 0 || q >= p {
            return Err(DiagramError::Construction(format!(
                "rational fraction must satisfy p > q >= 1, got {p}/{q}"
            )));
        }
        // Greedy continued fraction with positive entries.
        let (mut a, mut b) = (p, q);
        let mut cf = Vec::new();
        while b != 0 {
            cf.push(a / b);
            let r = a % b;
            a = b;
            b = r;
        }
        // Normalize to odd length: the greedy expansion of a reduced
        // fraction always ends with a coefficient >= 2, so [..., x] can
        // become [..., x-1, 1].
        if cf.len() % 2 == 0 {
            let last = *cf.last().unwrap();
            debug_assert!(last >= 2);
            *cf.last_mut().unwrap() = last - 1;
            cf.push(1);
        }
        let total: i64 = cf.iter().sum();
        if total as usize > MAX_CROSSINGS {
            return Err(DiagramError::TooManyCrossings(total as usize));
        }
        let mut m = TangleMachine::new();
        // Apply coefficients innermost-first: reversed, batches alternate
        // horizontal, vertical, ..., horizontal.
        for (i, &coef) in cf.iter().rev().enumerate() {
            let twists = coef as i32;
            if i % 2 == 0 {
                m.twist_horizontal(twists);
            } else {
                m.twist_vertical(twists);
            }
        }
        m.numerator_closure()
    }

    /// Pretzel link P(q1, ..., qk): vertical twist stacks side by side.
    pub fn pretzel(twists: &[i64]) -> Result<LinkDiagram, DiagramError> {
        let slots: Vec<(i64, i64)> = twists.iter().map(|&q| (q, 1)).collect();
        LinkDiagram::montesinos(&slots)
    }

    /// Montesinos link from tangle fractions alpha/beta: each slot builds
    /// the rational tangle alpha/beta and rotates it a quarter turn before
    /// summing left to right and closing.
    pub fn montesinos(slots: &[(i64, i64)]) -> Result<LinkDiagram, DiagramError> {
        if slots.is_empty() {
            return Err(DiagramError::Construction("montesinos needs at least one slot".into()));
        }
        let mut total = 0usize;
        let mut machines = Vec::new();
        for &(alpha, beta) in slots {
            if alpha == 0 || beta == 0 {
                return Err(DiagramError::Construction(
                    "montesinos slot fractions must be nonzero".into(),
                ));
            }
            let sign = if alpha * beta < 0 { -1i32 } else { 1 };
            let (p, q) = (alpha.abs(), beta.abs());
            if q > p {
                return Err(DiagramError::Construction(format!(
                    "montesinos slot needs |alpha| >= |beta|, got {alpha}/{beta}"
                )));
            }
            let mut m = TangleMachine::new();
            if q == p {
                // alpha/beta = 1: a single twist.
                m.twist_horizontal(sign);
            } else {
                let (mut a, mut b) = (p, q);
                let mut cf = Vec::new();
                while b != 0 {
                    cf.push(a / b);
                    let r = a % b;
                    a = b;
                    b = r;
                }
                if cf.len() % 2 == 0 {
                    let last = *cf.last().unwrap();
                    debug_assert!(last >= 2);
                    *cf.last_mut().unwrap() = last - 1;
                    cf.push(1);
                }
                for (i, &coef) in cf.iter().rev().enumerate() {
                    let twists = sign * coef as i32;
                    if i % 2 == 0 {
                        m.twist_horizontal(twists);
                    } else {
                        m.twist_vertical(twists);
                    }
                }
            }
            m.rotate_quarter();
            total += m.protos.len();
            machines.push(m);
        }
        if total > MAX_CROSSINGS {
            return Err(DiagramError::TooManyCrossings(total));
        }
        // Sum left to right, then numerator closure.
        let mut sum = machines.remove(0);
        for m in machines {
            sum.add_right(m);
        }
        sum.numerator_closure()
    }
}

/// The link determinant, computed from the state-sum bracket: the graded
/// circle count over all smoothings collapses to a Laurent polynomial,
/// one factor of (q + 1/q) is divided off, and the magnitude at q = i is
/// taken. Exact integer arithmetic throughout; split links give 0.
pub fn determinant(d: &LinkDiagram) -> Result<u64, DiagramError> {
    let n = d.crossings();
    if n > 20 {
        return Err(DiagramError::TooManyCrossings(n));
    }
    // Binomial rows for (q + 1/q)^c.
    let max_c = n + d.component_count() + 2;
    let mut binom: Vec<Vec<i128>> = vec![vec![1]];
    for c in 1..=max_c {
        let prev = &binom[c - 1];
        let mut row = vec![0i128; c + 1];
        for k in 0..=c {
            let a = if k > 0 { prev[k - 1] } else { 0 };
            let b = if k < c { prev[k] } else { 0 };
            row[k] = a + b;
        }
        binom.push(row);
    }
    let (np, nm) = (d.n_plus() as i64, d.n_minus() as i64);
    // Exponents range within |e| <= n + max_c + |np - 2nm|.
    let span = (n as i64 + max_c as i64 + np.abs() + 2 * nm.abs() + 4) as usize;
    let offset = span as i64;
    let mut poly = vec![0i128; 2 * span + 1];
    for v in 0..1u64 << n {
        let circles = d.smoothing(v)?.total_circles();
        let weight = n as i64 - v.count_ones() as i64;
        let sign = if (weight + nm) % 2 == 0 { 1i128 } else { -1 };
        let e0 = weight + np - 2 * nm;
        for (k, &b) in binom[circles].iter().enumerate() {
            let e = e0 + circles as i64 - 2 * k as i64;
            poly[(e + offset) as usize] += sign * b;
        }
    }
    // Divide by (q + 1/q). Multiplying both sides of P = (q + 1/q) V by q
    // turns this into S = (q^2 + 1) V with s_{e} = p_{e-1}, solved in
    // ascending exponent order by v_e = s_e - v_{e-2}. The top two
    // coefficients are the remainder and must vanish.
    let mut v = vec![0i128; poly.len()];
    for j in 0..poly.len() {
        let prev = if j >= 2 { v[j - 2] } else { 0 };
        v[j] = poly[j] - prev;
    }
    let len = v.len();
    if v[len - 1] != 0 || v[len - 2] != 0 {
        // The state sum always carries a (q + 1/q) factor for a valid
        // diagram, so exact division cannot fail.
        unreachable!("state sum is always divisible by q + 1/q");
    }
    // Evaluate at q = i: entry j holds the coefficient of q^(j - offset + 1).
    let mut re = 0i128;
    let mut im = 0i128;
    for (j, &c) in v.iter().enumerate() {
        let e = j as i64 - offset + 1;
        match e.rem_euclid(4) {
            0 => re += c,
            1 => im += c,
            2 => re -= c,
            _ => im -= c,
        }
    }
    if re != 0 && im != 0 {
        unreachable!("determinant evaluation must be real or imaginary");
    }
    let mag = re.unsigned_abs().max(im.unsigned_abs());
    Ok(u64::try_from(mag).expect("determinant fits in u64"))
}

impl fmt::Display for LinkDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for t in &self.tuples {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "X({},{},{},{})", t.0[0], t.0[1], t.0[2], t.0[3])?;
            first = false;
        }
        for _ in 0..self.free_loops {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "U")?;
            first = false;
        }
        Ok(())
    }
}

// ----------------------------------------------------------------------
// Orientation resolution
// ----------------------------------------------------------------------

type Occurrences = BTreeMap<u32, Vec<(usize, usize)>>;

/// Determines each arc's successor and every crossing's sign. Under-strand
/// passages declare their directions; over-strand directions propagate
/// from them. Components that never pass under are oriented by majority
/// vote for ascending labels, ties broken toward the smaller successor of
/// the minimal arc, then the smaller crossing index for its head.
fn resolve_orientation(
    tuples: &[PdTuple],
    occurrences: &Occurrences,
) -> Result<(BTreeMap<u32, u32>, Vec<CrossingSign>), DiagramError> {
    let orient = |msg: String| DiagramError::Orientation(msg);
    // Flow state per occurrence: flows[k][slot].
    let mut flows: Vec<[Flow; 4]> = vec![[Flow::Unknown; 4]; tuples.len()];
    for (k, _) in tuples.iter().enumerate() {
        flows[k][0] = Flow::In;
        flows[k][2] = Flow::Out;
    }
    // An arc's two occurrences carry opposite flows.
    let other_occurrence = |arc: u32, here: (usize, usize)| -> (usize, usize) {
        let occ = &occurrences[&arc];
        if occ[0] == here {
            occ[1]
        } else {
            occ[0]
        }
    };
    let mut queue: Vec<(usize, usize)> = Vec::new();
    for (k, t) in tuples.iter().enumerate() {
        queue.push((k, 0));
        queue.push((k, 2));
        let _ = t;
    }
    while let Some((k, slot)) = queue.pop() {
        let arc = tuples[k].0[slot];
        let flow = flows[k][slot];
        if flow == Flow::Unknown {
            continue;
        }
        // Opposite flow at the arc's other occurrence.
        let (k2, s2) = other_occurrence(arc, (k, slot));
        let opposite = match flow {
            Flow::In => Flow::Out,
            Flow::Out => Flow::In,
            Flow::Unknown => unreachable!(),
        };
        match flows[k2][s2] {
            Flow::Unknown => {
                flows[k2][s2] = opposite;
                queue.push((k2, s2));
            }
            f if f == opposite => {}
            _ => {
                return Err(orient(format!(
                    "arc {arc} flows the same way at both of its occurrences"
                )))
            }
        }
        // Within a crossing, the over pair (slots 1 and 3) is one strand.
        if slot == 1 || slot == 3 {
            let partner = 4 - slot; // 1 <-> 3
            let opp = match flows[k][slot] {
                Flow::In => Flow::Out,
                Flow::Out => Flow::In,
                Flow::Unknown => unreachable!(),
            };
            match flows[k][partner] {
                Flow::Unknown => {
                    flows[k][partner] = opp;
                    queue.push((k, partner));
                }
                f if f == opp => {}
                _ => {
                    return Err(orient(format!(
                        "over strand at crossing {k} has no consistent direction"
                    )))
                }
            }
        }
    }
    // Orient leftover components (those never passing under).
    loop {
        let mut seed = None;
        'outer: for (k, f) in flows.iter().enumerate() {
            for slot in [1usize, 3] {
                if f[slot] == Flow::Unknown {
                    seed = Some((k, slot));
                    break 'outer;
                }
            }
        }
        let Some(_) = seed else { break };
        // Trace the undecided component as an arc cycle: each arc links its
        // two occurrences; within a crossing, slot 1 links slot 3.
        let (k0, s0) = seed.unwrap();
        let mut cycle_arcs: Vec<u32> = Vec::new();
        let mut heads: Vec<(usize, usize)> = Vec::new(); // occurrence if arc i flows in here
        let (mut k, mut s) = (k0, s0);
        loop {
            let arc = tuples[k].0[s];
            cycle_arcs.push(arc);
            // Candidate head for the forward direction: the partner slot's
            // crossing, reached by leaving through the partner.
            let partner = 4 - s;
            heads.push((k, s));
            let next_arc = tuples[k].0[partner];
            let (k2, s2) = other_occurrence(next_arc, (k, partner));
            if (k2, s2) == (k0, s0) {
                break;
            }
            k = k2;
            s = s2;
        }
        // Forward direction: arc i flows in at heads[i], out at partner of
        // heads[i+1]... Actually forward means: cycle_arcs[i] is followed by
        // cycle_arcs[i+1]; the shared crossing is heads[i+1 mod]'s crossing
        // where arcs[i] enters (at slot heads[(i+1)]) --- re-derive both
        // orientations by votes on ascending labels.
        let n = cycle_arcs.len();
        let succ_forward: Vec<(u32, u32)> = (0..n)
            .map(|i| (cycle_arcs[i], cycle_arcs[(i + 1) % n]))
            .collect();
        let votes = |pairs: &[(u32, u32)]| pairs.iter().filter(|(x, y)| *y == *x + 1).count();
        let backward: Vec<(u32, u32)> =
            succ_forward.iter().map(|&(x, y)| (y, x)).collect();
        let vf = votes(&succ_forward);
        let vb = votes(&backward);
        let forward = if vf != vb {
            vf > vb
        } else {
            // Successor of the minimal arc decides; if equal (two-arc
            // components), the minimal arc's head crossing index decides.
            let min_arc = *cycle_arcs.iter().min().unwrap();
            let pos = cycle_arcs.iter().position(|&a| a == min_arc).unwrap();
            let fwd_succ = cycle_arcs[(pos + 1) % n];
            let bwd_succ = cycle_arcs[(pos + n - 1) % n];
            if fwd_succ != bwd_succ {
                fwd_succ < bwd_succ
            } else {
                // Forward: min arc flows in at heads[pos].
                // Backward: it flows in at its other occurrence.
                let (kf, _) = heads[pos];
                let (kb, _) = other_occurrence(min_arc, heads[pos]);
                kf <= kb
            }
        };
        // Commit flows: forward means cycle_arcs[i] flows IN at heads[i].
        for (i, &(hk, hs)) in heads.iter().enumerate() {
            let f = if forward { Flow::In } else { Flow::Out };
            flows[hk][hs] = f;
            let _ = i;
            // Partner gets the opposite automatically via the pass below.
        }
        // Re-run propagation to fill partners and other occurrences.
        let mut q: Vec<(usize, usize)> = heads.clone();
        while let Some((k, slot)) = q.pop() {
            let arc = tuples[k].0[slot];
            let flow = flows[k][slot];
            if flow == Flow::Unknown {
                continue;
            }
            let (k2, s2) = other_occurrence(arc, (k, slot));
            let opposite = match flow {
                Flow::In => Flow::Out,
                Flow::Out => Flow::In,
                Flow::Unknown => unreachable!(),
            };
            match flows[k2][s2] {
                Flow::Unknown => {
                    flows[k2][s2] = opposite;
                    q.push((k2, s2));
                }
                f if f == opposite => {}
                _ => return Err(orient(format!("arc {arc} cannot be oriented consistently"))),
            }
            if slot == 1 || slot == 3 {
                let partner = 4 - slot;
                let opp = opposite;
                match flows[k][partner] {
                    Flow::Unknown => {
                        flows[k][partner] = opp;
                        q.push((k, partner));
                    }
                    f if f == opp => {}
                    _ => {
                        return Err(orient(format!(
                            "over strand at crossing {k} has no consistent direction"
                        )))
                    }
                }
            }
        }
    }
    // Assemble successors and signs.
    let mut next: BTreeMap<u32, u32> = BTreeMap::new();
    let mut set_next = |x: u32, y: u32| -> Result<(), DiagramError> {
        if let Some(&prev) = next.get(&x) {
            if prev != y {
                return Err(DiagramError::Orientation(format!(
                    "arc {x} has two successors ({prev} and {y})"
                )));
            }
        } else {
            next.insert(x, y);
        }
        Ok(())
    };
    let mut signs = Vec::with_capacity(tuples.len());
    for (k, t) in tuples.iter().enumerate() {
        let [a, b, c, d] = t.0;
        set_next(a, c)?;
        match (flows[k][1], flows[k][3]) {
            (Flow::In, Flow::Out) => {
                set_next(b, d)?;
                signs.push(CrossingSign::Negative);
            }
            (Flow::Out, Flow::In) => {
                set_next(d, b)?;
                signs.push(CrossingSign::Positive);
            }
            _ => {
                return Err(DiagramError::Orientation(format!(
                    "over strand at crossing {k} remained undirected"
                )))
            }
        }
    }
    // Every arc needs exactly one predecessor.
    let mut seen_pred: BTreeMap<u32, u32> = BTreeMap::new();
    for (&x, &y) in &next {
        if seen_pred.insert(y, x).is_some() {
            return Err(DiagramError::Orientation(format!("arc {y} has two predecessors")));
        }
    }
    if seen_pred.len() != next.len() {
        return Err(DiagramError::Orientation("successor map is not a bijection".into()));
    }
    Ok((next, signs))
}

fn trace_components(next: &BTreeMap<u32, u32>) -> Vec<Vec<u32>> {
    let mut visited: BTreeSet<u32> = BTreeSet::new();
    let mut components = Vec::new();
    for &start in next.keys() {
        if visited.contains(&start) {
            continue;
        }
        let mut comp = Vec::new();
        let mut arc = start;
        loop {
            comp.push(arc);
            visited.insert(arc);
            arc = next[&arc];
            if arc == start {
                break;
            }
        }
        components.push(comp);
    }
    components
}

// ----------------------------------------------------------------------
// Union-find over arc labels
// ----------------------------------------------------------------------

#[derive(Debug, Default)]
struct UnionFind {
    parent: BTreeMap<u32, u32>,
}

impl UnionFind {
    fn new() -> Self {
        UnionFind::default()
    }

    fn contains(&self, x: u32) -> bool {
        self.parent.contains_key(&x)
    }

    fn ensure(&mut self, x: u32) {
        self.parent.entry(x).or_insert(x);
    }

    fn find(&mut self, x: u32) -> u32 {
        let p = self.parent[&x];
        if p == x {
            return x;
        }
        let root = self.find(p);
        self.parent.insert(x, root);
        root
    }

    fn union(&mut self, x: u32, y: u32) {
        self.ensure(x);
        self.ensure(y);
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            // Smaller label wins so class minima are roots.
            let (lo, hi) = (rx.min(ry), rx.max(ry));
            self.parent.insert(hi, lo);
        }
    }

    fn class_min(&mut self, root: u32) -> u32 {
        // Roots are minima by the union rule.
        self.find(root)
    }
}

// ----------------------------------------------------------------------
// Rational tangle machine
// ----------------------------------------------------------------------

/// A proto-crossing: arcs clockwise with the under strand at slots 0 and 2
/// (direction not yet committed), and a fresh-label supply shared through
/// the machine.
#[derive(Debug, Clone)]
struct ProtoCrossing {
    cyc: [u32; 4],
}

/// Builds rational tangles by twisting; boundary ends are (nw, ne, sw, se).
#[derive(Debug, Clone)]
struct TangleMachine {
    protos: Vec<ProtoCrossing>,
    nw: u32,
    ne: u32,
    sw: u32,
    se: u32,
    fresh: u32,
}

impl TangleMachine {
    /// The 0-tangle: two horizontal strands.
    fn new() -> Self {
        TangleMachine { protos: Vec::new(), nw: 1, ne: 1, sw: 2, se: 2, fresh: 2 }
    }

    fn next_label(&mut self) -> u32 {
        self.fresh += 1;
        self.fresh
    }

    /// `n` twists of the two right endpoints; sign picks the over strand.
    fn twist_horizontal(&mut self, n: i32) {
        for _ in 0..n.unsigned_abs() {
            let new_ne = self.next_label();
            let new_se = self.next_label();
            // Clockwise from the top-left: old ne, new ne, new se, old se.
            // Strands pass old_ne <-> new_se and old_se <-> new_ne.
            let cyc = [self.ne, new_ne, new_se, self.se];
            let proto = if n > 0 {
                // Positive: the rising strand (old se -> new ne) goes over;
                // under occupies slots 0 and 2 already.
                ProtoCrossing { cyc }
            } else {
                // Negative: rotate so the falling strand is over.
                ProtoCrossing { cyc: [cyc[1], cyc[2], cyc[3], cyc[0]] }
            };
            self.protos.push(proto);
            self.ne = new_ne;
            self.se = new_se;
        }
    }

    /// `n` twists of the two bottom endpoints.
    fn twist_vertical(&mut self, n: i32) {
        for _ in 0..n.unsigned_abs() {
            let new_sw = self.next_label();
            let new_se = self.next_label();
            // Clockwise from top-left: old sw, old se, new se, new sw.
            // Strands pass old_sw <-> new_se and old_se <-> new_sw.
            let cyc = [self.sw, self.se, new_se, new_sw];
            let proto = if n > 0 {
                ProtoCrossing { cyc }
            } else {
                ProtoCrossing { cyc: [cyc[1], cyc[2], cyc[3], cyc[0]] }
            };
            self.protos.push(proto);
            self.sw = new_sw;
            self.se = new_se;
        }
    }

    /// Rotates the tangle a quarter turn counterclockwise; cyclic orders
    /// inside crossings are unaffected, only the boundary roles move.
    fn rotate_quarter(&mut self) {
        let (nw, ne, sw, se) = (self.nw, self.ne, self.sw, self.se);
        self.nw = ne;
        self.ne = se;
        self.se = sw;
        self.sw = nw;
    }

    /// Attaches `other` to the right: self.ne joins other.nw and self.se
    /// joins other.sw.
    fn add_right(&mut self, other: TangleMachine) {
        let offset = self.fresh;
        let map = |x: u32| x + offset;
        let mut renamed: Vec<ProtoCrossing> = other
            .protos
            .iter()
            .map(|p| ProtoCrossing { cyc: std::array::from_fn(|i| map(p.cyc[i])) })
            .collect();
        // Identify boundary arcs.
        let mut subst: BTreeMap<u32, u32> = BTreeMap::new();
        subst.insert(map(other.nw), self.ne);
        subst.insert(map(other.sw), self.se);
        let resolve = |x: u32, subst: &BTreeMap<u32, u32>| *subst.get(&x).unwrap_or(&x);
        for p in &mut renamed {
            for a in p.cyc.iter_mut() {
                *a = resolve(*a, &subst);
            }
        }
        self.protos.extend(renamed);
        self.ne = resolve(map(other.ne), &subst);
        self.se = resolve(map(other.se), &subst);
        self.fresh += other.fresh;
    }

    /// Joins nw-ne across the top and sw-se across the bottom, committing
    /// under-strand directions afterwards.
    fn numerator_closure(mut self) -> Result<LinkDiagram, DiagramError> {
        let mut free = 0usize;
        let mut subst: BTreeMap<u32, u32> = BTreeMap::new();
        if self.nw == self.ne {
            // The top strand never got a crossing: a free loop, unless it
            // is also the bottom strand's label after closure.
            free += 1;
        } else {
            subst.insert(self.ne, self.nw);
        }
        let sw = *subst.get(&self.sw).unwrap_or(&self.sw);
        let se = *subst.get(&self.se).unwrap_or(&self.se);
        if sw == se {
            free += 1;
        } else {
            subst.insert(se, sw);
        }
        for p in &mut self.protos {
            for a in p.cyc.iter_mut() {
                while let Some(&s) = subst.get(a) {
                    *a = s;
                }
            }
        }
        if self.protos.is_empty() {
            return Ok(LinkDiagram::unlink(free));
        }
        commit_directions(self.protos, free)
    }
}

/// Orients each component of a proto-diagram, rotates tuples so the under
/// strand enters at slot 0, and builds the final diagram with sequential
/// labels.
fn commit_directions(protos: Vec<ProtoCrossing>, free: usize) -> Result<LinkDiagram, DiagramError> {
    // Unoriented component tracing: slot 0 <-> 2 and 1 <-> 3 pass through.
    let mut occ: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for (k, p) in protos.iter().enumerate() {
        for (slot, &arc) in p.cyc.iter().enumerate() {
            occ.entry(arc).or_default().push((k, slot));
        }
    }
    for (&label, o) in &occ {
        if o.len() != 2 {
            return Err(DiagramError::ArcOccurrences { label, count: o.len() });
        }
    }
    // Choose a direction per component: walk from the minimal unvisited
    // arc toward its lower-indexed occurrence's pass-through partner.
    let mut arc_dir: BTreeMap<u32, (usize, usize)> = BTreeMap::new(); // arc -> head occurrence
    let mut visited: BTreeSet<u32> = BTreeSet::new();
    let arcs_sorted: Vec<u32> = occ.keys().copied().collect();
    for &start in &arcs_sorted {
        if visited.contains(&start) {
            continue;
        }
        // Head of `start`: its first occurrence.
        let mut head = occ[&start][0];
        let mut arc = start;
        loop {
            visited.insert(arc);
            arc_dir.insert(arc, head);
            // Leave through the pass-through partner slot.
            let (k, s) = head;
            let partner = (s + 2) % 4;
            let out_arc = protos[k].cyc[partner];
            // The next arc's head is its other occurrence.
            let occs = &occ[&out_arc];
            let other = if occs[0] == (k, partner) { occs[1] } else { occs[0] };
            if out_arc == start || visited.contains(&out_arc) {
                break;
            }
            arc = out_arc;
            head = other;
        }
    }
    // Rotate tuples: under strand occupies slots 0/2; slot 0 must be the
    // incoming one, i.e. the occurrence recorded as that arc's head.
    let mut tuples = Vec::with_capacity(protos.len());
    for (k, p) in protos.iter().enumerate() {
        let a0 = p.cyc[0];
        let rotate = if arc_dir[&a0] == (k, 0) {
            0
        } else {
            debug_assert_eq!(arc_dir[&p.cyc[2]], (k, 2), "one under end must flow in");
            2
        };
        let t = PdTuple(p.cyc).rotated(rotate);
        tuples.push(t.0);
    }
    Ok(LinkDiagram::from_tuples(tuples, free)?.relabeled())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trefoil() -> LinkDiagram {
        LinkDiagram::parse("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap()
    }

    #[test]
    fn parse_and_validate() {
        let d = trefoil();
        assert_eq!(d.crossings(), 3);
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.writhe(), -3);
        assert_eq!(LinkDiagram::parse("").unwrap().component_count(), 0);
        assert_eq!(LinkDiagram::parse("U U").unwrap().component_count(), 2);
        assert_eq!(LinkDiagram::parse("U,U,U").unwrap().free_loops(), 3);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            LinkDiagram::parse("X(1,2,3)"),
            Err(DiagramError::Parse { .. })
        ));
        assert!(matches!(
            LinkDiagram::parse("Y(1,2,3,4)"),
            Err(DiagramError::Parse { pos: 0, .. })
        ));
        assert!(matches!(
            LinkDiagram::parse("X(1,4,2,5)"),
            Err(DiagramError::ArcOccurrences { .. })
        ));
        assert!(matches!(
            LinkDiagram::parse("X(0,1,0,1)"),
            Err(DiagramError::ZeroLabel)
        ));
    }

    #[test]
    fn trefoil_smoothing_circle_counts() {
        let d = trefoil();
        assert_eq!(d.smoothing(0b000).unwrap().total_circles(), 2);
        assert_eq!(d.smoothing(0b111).unwrap().total_circles(), 3);
        // Single-bit states of a trefoil have one circle fewer than all-1.
        for s in [0b001u64, 0b010, 0b100] {
            assert_eq!(d.smoothing(s).unwrap().total_circles(), 1);
        }
        for s in [0b011u64, 0b101, 0b110] {
            assert_eq!(d.smoothing(s).unwrap().total_circles(), 2);
        }
    }

    #[test]
    fn braid_closure_matches_reference_trefoil() {
        let b = LinkDiagram::braid_closure(&[-1, -1, -1], 2).unwrap();
        let mut got: Vec<[u32; 4]> = b.tuples().iter().map(|t| t.0).collect();
        got.sort_unstable();
        let mut want: Vec<[u32; 4]> = trefoil().tuples().iter().map(|t| t.0).collect();
        want.sort_unstable();
        assert_eq!(got, want);
        assert_eq!(b.writhe(), -3);
    }

    #[test]
    fn braid_signs_match_declared_letters() {
        let b = LinkDiagram::braid_closure(&[1, 1, -2, 1, -2], 3).unwrap();
        assert_eq!(b.n_plus(), 3);
        assert_eq!(b.n_minus(), 2);
        let pos = LinkDiagram::braid_closure(&[1, 1, 1], 2).unwrap();
        assert_eq!(pos.writhe(), 3);
        assert_eq!(pos.smoothing(0b111).unwrap().total_circles(), 2);
        assert_eq!(pos.smoothing(0b000).unwrap().total_circles(), 3);
    }

    #[test]
    fn unused_braid_strand_closes_to_free_loop() {
        let b = LinkDiagram::braid_closure(&[1, 1, 1], 3).unwrap();
        assert_eq!(b.crossings(), 3);
        assert_eq!(b.free_loops(), 1);
        assert_eq!(b.component_count(), 2);
    }

    #[test]
    fn kink_orientation_and_smoothings() {
        // Positive curl: over strand enters at the fourth slot.
        let d = LinkDiagram::parse("X(1,1,2,2)").unwrap();
        assert_eq!(d.signs(), &[CrossingSign::Positive]);
        assert_eq!(d.smoothing(0b0).unwrap().total_circles(), 1);
        assert_eq!(d.smoothing(0b1).unwrap().total_circles(), 2);
        // Its mirror is the negative curl.
        let m = d.mirror();
        assert_eq!(m.signs(), &[CrossingSign::Negative]);
        assert_eq!(m.smoothing(0b0).unwrap().total_circles(), 2);
        assert_eq!(m.smoothing(0b1).unwrap().total_circles(), 1);
    }

    #[test]
    fn mirror_is_an_involution_and_flips_writhe() {
        for d in [trefoil(), LinkDiagram::braid_closure(&[1, -2, 1, -2], 3).unwrap()] {
            let m = d.mirror();
            assert_eq!(m.writhe(), -d.writhe());
            assert_eq!(m.mirror().tuples(), d.tuples());
        }
    }

    #[test]
    fn edges_classify_merge_and_split() {
        let d = trefoil();
        // From the all-1 state every edge goes from 3 circles to 2: merges.
        for i in 0..3 {
            let e = d.edge(0b111, i).unwrap();
            assert!(matches!(e.shape, EdgeShape::Merge { .. }), "crossing {i}");
            assert_eq!(e.passive.len(), 1);
        }
        // From single-bit states to zero: 1 circle -> 2 circles: splits.
        for i in 0..3 {
            let e = d.edge(1 << i, i).unwrap();
            assert!(matches!(e.shape, EdgeShape::Split { .. }), "crossing {i}");
            assert_eq!(e.passive.len(), 0);
        }
    }

    #[test]
    fn passive_circles_track_free_loops() {
        let d = LinkDiagram::braid_closure(&[1, 1, 1], 3).unwrap();
        let e = d.edge(0b111, 0).unwrap();
        // One passive arc circle plus the free loop.
        let src_circles = d.smoothing(0b111).unwrap();
        assert_eq!(src_circles.total_circles(), 3);
        assert!(e.passive.iter().any(|&(s, _)| s == 2), "free loop index present");
    }

    #[test]
    fn smooth_crossing_produces_honest_diagrams() {
        let d = trefoil();
        for side in [0u8, 1] {
            let s = d.smooth_crossing(0, side).unwrap();
            assert_eq!(s.crossings(), 2);
            // Smoothing the remaining two crossings must agree with the
            // original diagram's smoothing circle counts.
            for state in 0..4u64 {
                let orig_state = state << 1 | side as u64;
                assert_eq!(
                    s.smoothing(state).unwrap().total_circles(),
                    d.smoothing(orig_state).unwrap().total_circles(),
                    "side {side} state {state:b}"
                );
            }
        }
    }

    #[test]
    fn smoothing_a_kink_creates_free_loops() {
        let d = LinkDiagram::parse("X(1,1,2,2)").unwrap();
        let once = d.smooth_crossing(0, 1).unwrap();
        assert_eq!(once.crossings(), 0);
        assert_eq!(once.free_loops(), 2);
        let other = d.smooth_crossing(0, 0).unwrap();
        assert_eq!(other.free_loops(), 1);
    }

    #[test]
    fn connected_sum_of_trefoils() {
        let d = trefoil();
        let s = d.connected_sum(&d).unwrap();
        assert_eq!(s.crossings(), 6);
        assert_eq!(s.component_count(), 1);
        assert_eq!(s.writhe(), -6);
        assert_eq!(s.n_minus(), 6);
    }

    #[test]
    fn disjoint_union_relabels() {
        let d = trefoil();
        let u = d.disjoint_union(&d);
        assert_eq!(u.crossings(), 6);
        assert_eq!(u.component_count(), 2);
        assert_eq!(u.writhe(), -6);
        let with_free = u.disjoint_union(&LinkDiagram::unlink(2));
        assert_eq!(with_free.component_count(), 4);
    }

    #[test]
    fn rational_constructions() {
        // 3/1 is the trefoil.
        let t = LinkDiagram::rational(3, 1).unwrap();
        assert_eq!(t.crossings(), 3);
        assert_eq!(t.component_count(), 1);
        assert_eq!(t.writhe().abs(), 3);
        // 5/2 is the figure eight: four crossings, writhe zero.
        let f8 = LinkDiagram::rational(5, 2).unwrap();
        assert_eq!(f8.crossings(), 4);
        assert_eq!(f8.component_count(), 1);
        assert_eq!(f8.writhe(), 0);
        // 2/1 is the Hopf link.
        let hopf = LinkDiagram::rational(2, 1).unwrap();
        assert_eq!(hopf.crossings(), 2);
        assert_eq!(hopf.component_count(), 2);
        // 4/1 is the (2,4) torus link.
        let t24 = LinkDiagram::rational(4, 1).unwrap();
        assert_eq!(t24.crossings(), 4);
        assert_eq!(t24.component_count(), 2);
        // 8/3 is the Whitehead link: writhe 0 in this presentation.
        let wh = LinkDiagram::rational(8, 3).unwrap();
        assert_eq!(wh.crossings(), 5);
        assert_eq!(wh.component_count(), 2);
    }

    #[test]
    fn pretzel_constructions() {
        let p = LinkDiagram::pretzel(&[3, 3, 2]).unwrap();
        assert_eq!(p.crossings(), 8);
        assert_eq!(p.component_count(), 1);
        let torus = LinkDiagram::pretzel(&[3, 3, -2]).unwrap();
        assert_eq!(torus.crossings(), 8);
        assert_eq!(torus.component_count(), 1);
        let rings = LinkDiagram::pretzel(&[2, 2, 2]).unwrap();
        assert_eq!(rings.crossings(), 6);
        assert_eq!(rings.component_count(), 3);
    }

    #[test]
    fn montesinos_constructions() {
        let m = LinkDiagram::montesinos(&[(3, 1), (3, 2), (2, 1)]).unwrap();
        assert_eq!(m.crossings(), 8);
        assert_eq!(m.component_count(), 1);
        let m2 = LinkDiagram::montesinos(&[(3, 2), (3, 2), (2, 1)]).unwrap();
        assert_eq!(m2.crossings(), 8);
        assert_eq!(m2.component_count(), 1);
    }

    #[test]
    fn canonical_form_is_labeling_invariant() {
        let a = trefoil();
        let b = LinkDiagram::braid_closure(&[-1, -1, -1], 2).unwrap();
        assert_eq!(a.canonical_form(), b.canonical_form());
        // A rotated labeling of the same diagram.
        let c = LinkDiagram::parse("X(3,6,4,1) X(5,2,6,3) X(1,4,2,5)").unwrap();
        assert_eq!(a.canonical_form(), c.canonical_form());
        let different = LinkDiagram::rational(5, 2).unwrap();
        assert_ne!(a.canonical_form(), different.canonical_form());
    }

    #[test]
    fn pure_over_component_gets_a_deterministic_orientation() {
        // A small circle (arcs 5,6) lying entirely over a ring (arcs 1,2).
        let d = LinkDiagram::parse("X(1,5,2,6) X(2,6,1,5)").unwrap();
        assert_eq!(d.component_count(), 2);
        // Parsing twice gives identical signs.
        let d2 = LinkDiagram::parse("X(1,5,2,6) X(2,6,1,5)").unwrap();
        assert_eq!(d.signs(), d2.signs());
        assert_eq!(d.canonical_form(), d2.canonical_form());
    }

    #[test]
    fn basepoint_defaults_and_moves() {
        let d = trefoil();
        assert_eq!(d.basepoint(), Some(1));
        let moved = d.clone().with_basepoint(4).unwrap();
        assert_eq!(moved.basepoint(), Some(4));
        assert!(matches!(
            d.with_basepoint(99),
            Err(DiagramError::NoSuchArc(99))
        ));
        let s = trefoil().smoothing(0b000).unwrap();
        assert_eq!(s.basepoint_circle, Some(0));
    }

    #[test]
    fn display_round_trips() {
        let d = trefoil().disjoint_union(&LinkDiagram::unlink(1));
        let text = d.to_string();
        let back = LinkDiagram::parse(&text).unwrap();
        assert_eq!(back.tuples(), d.tuples());
        assert_eq!(back.free_loops(), d.free_loops());
    }

    #[test]
    fn determinants_of_small_links() {
        assert_eq!(determinant(&LinkDiagram::unlink(1)).unwrap(), 1);
        // Split links evaluate to zero.
        assert_eq!(determinant(&LinkDiagram::unlink(2)).unwrap(), 0);
        assert_eq!(determinant(&trefoil()).unwrap(), 3);
        assert_eq!(determinant(&trefoil().mirror()).unwrap(), 3);
        let f8 = LinkDiagram::rational(5, 2).unwrap();
        assert_eq!(determinant(&f8).unwrap(), 5);
        let hopf = LinkDiagram::rational(2, 1).unwrap();
        assert_eq!(determinant(&hopf).unwrap(), 2);
        let split = trefoil().disjoint_union(&trefoil());
        assert_eq!(determinant(&split).unwrap(), 0);
        // Connected sums multiply determinants.
        let granny = trefoil().connected_sum(&trefoil()).unwrap();
        assert_eq!(determinant(&granny).unwrap(), 9);
        // Stabilizing a braid closure does not change the determinant.
        let stabilized = LinkDiagram::braid_closure(&[1, 1, 1, 2], 3).unwrap();
        assert_eq!(determinant(&stabilized).unwrap(), 3);
    }
}
