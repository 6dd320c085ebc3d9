//! The shared-edge structure between the annulus graph and the torus graph.
//!
//! Both graphs carry the same edge list: edge `e` of `g1` is edge `e` of
//! `g2`, and end `i` of `e` in `g1` corresponds to end `i` in `g2`. The label
//! at an end in one graph is the (1-based) index of the vertex the same end
//! sits on in the other graph.
//!
//! Distances around a vertex are read in the vertex's own direction (labels
//! ascending), see [`crate::labels`].

use crate::labels::{edge_sign, is_equidistant_pair, rho, EdgeSign};
use crate::maps::{
    is_trivial_loop, EdgeId, EmbeddedGraph, EndIdx, EndpointRef, FaceSystem, MapError, Sign,
    SurfaceKind, VertexId,
};

/// Two embedded graphs over one edge set, with the filling parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphPair {
    /// Graph on the annulus.
    pub g1: EmbeddedGraph,
    /// Graph on the torus.
    pub g2: EmbeddedGraph,
    /// Minimal geometric intersection number of the two filling slopes.
    pub delta: usize,
    /// Jumping number, `1 <= d <= delta/2`, coprime to `delta`
    /// (`d = 1` when `delta <= 2`).
    pub d: usize,
    /// Global orientation sense relating the two boundary readings.
    pub sense: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub constraint: &'static str,
    pub witness: String,
}

impl Violation {
    pub fn new(constraint: &'static str, witness: impl Into<String>) -> Self {
        Violation { constraint, witness: witness.into() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairReport {
    pub violations: Vec<Violation>,
}

impl PairReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }
    pub fn extend(&mut self, vs: Vec<Violation>) {
        self.violations.extend(vs);
    }
}

impl GraphPair {
    pub fn n1(&self) -> usize {
        self.g1.n_vertices()
    }
    pub fn n2(&self) -> usize {
        self.g2.n_vertices()
    }
    pub fn n_edges(&self) -> usize {
        self.g1.n_edges()
    }

    /// The graph of one side, 1 or 2.
    pub fn graph(&self, alpha: usize) -> &EmbeddedGraph {
        match alpha {
            1 => &self.g1,
            2 => &self.g2,
            _ => panic!("side must be 1 or 2"),
        }
    }

    /// Mirror image of the pair: both graphs reflected, all signs flipped,
    /// the sense reversed.
    pub fn reflected(&self) -> GraphPair {
        GraphPair {
            g1: self.g1.reflected(),
            g2: self.g2.reflected(),
            delta: self.delta,
            d: self.d,
            sense: -self.sense,
        }
    }

    /// Re-index the vertices of both graphs by cyclic shifts, keeping the
    /// label calculus intact (labels are vertex indices of the other side).
    pub fn shifted(&self, s1: usize, s2: usize) -> GraphPair {
        GraphPair {
            g1: shift_graph(&self.g1, s1, s2, self.n2()),
            g2: shift_graph(&self.g2, s2, s1, self.n1()),
            delta: self.delta,
            d: self.d,
            sense: self.sense,
        }
    }
}

fn shift_graph(g: &EmbeddedGraph, own_shift: usize, label_shift: usize, n_lab: usize) -> EmbeddedGraph {
    let n = g.n_vertices();
    let mut out = g.clone();
    if n > 0 && own_shift % n != 0 {
        let s = own_shift % n;
        // vertex v moves to index (v + s) mod n
        let mut vertices = vec![g.vertices[0].clone(); n];
        for v in 0..n {
            vertices[(v + s) % n] = g.vertices[v].clone();
        }
        out.vertices = vertices;
        for e in 0..out.edges.len() {
            for i in 0..2 {
                out.edges[e][i].vertex = (out.edges[e][i].vertex + s) % n;
            }
        }
    }
    if n_lab > 0 && label_shift % n_lab != 0 {
        let s = label_shift % n_lab;
        for lab in &mut out.labels {
            for l in lab.iter_mut() {
                *l = ((*l as usize - 1 + s) % n_lab) as u16 + 1;
            }
        }
    }
    out
}

/// All edge ends attached to vertex `u` in `g1` and vertex `v` in `g2`.
pub fn shared_flags(p: &GraphPair, u: VertexId, v: VertexId) -> Vec<(EdgeId, EndIdx)> {
    let mut out = Vec::new();
    for e in 0..p.n_edges() {
        for i in 0..2 {
            if p.g1.edges[e][i].vertex == u && p.g2.edges[e][i].vertex == v {
                out.push((e, i));
            }
        }
    }
    out
}

/// Positions of a flag on each side.
pub fn flag_slots(p: &GraphPair, f: (EdgeId, EndIdx)) -> (EndpointRef, EndpointRef) {
    (p.g1.edges[f.0][f.1], p.g2.edges[f.0][f.1])
}

fn reading_order(g: &EmbeddedGraph, v: VertexId, mut slots: Vec<(usize, (EdgeId, EndIdx))>) -> Vec<(EdgeId, EndIdx)> {
    slots.sort_by_key(|&(pos, _)| pos);
    match g.vertices[v].sign {
        Sign::Plus => slots.into_iter().map(|(_, f)| f).collect(),
        Sign::Minus => slots.into_iter().rev().map(|(_, f)| f).collect(),
    }
}

/// The flags of `u x v` in reading order around the `g1` vertex `u`.
pub fn flags_around_g1(p: &GraphPair, u: VertexId, v: VertexId) -> Vec<(EdgeId, EndIdx)> {
    let slots = shared_flags(p, u, v)
        .into_iter()
        .map(|f| (p.g1.edges[f.0][f.1].position, f))
        .collect();
    reading_order(&p.g1, u, slots)
}

/// The flags of `u x v` in reading order around the `g2` vertex `v`.
pub fn flags_around_g2(p: &GraphPair, u: VertexId, v: VertexId) -> Vec<(EdgeId, EndIdx)> {
    let slots = shared_flags(p, u, v)
        .into_iter()
        .map(|f| (p.g2.edges[f.0][f.1].position, f))
        .collect();
    reading_order(&p.g2, v, slots)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Structural validation: graph well-formedness, edge counts, label duality
/// and cyclicity, per-pair intersection counts, trivial loops, the parity
/// rule and the jumping order.
pub fn validate_pair(p: &GraphPair) -> PairReport {
    let mut rep = PairReport::default();
    let sys1 = match p.g1.face_system() {
        Ok(s) => s,
        Err(e) => {
            rep.push(Violation::new("STRUCT.G1", format!("{e}")));
            return rep;
        }
    };
    let sys2 = match p.g2.face_system() {
        Ok(s) => s,
        Err(e) => {
            rep.push(Violation::new("STRUCT.G2", format!("{e}")));
            return rep;
        }
    };
    if p.g1.surface != SurfaceKind::AnnulusAsMarkedSphere || p.g2.surface != SurfaceKind::Torus {
        rep.push(Violation::new("STRUCT.SURFACE", "pair must be (annulus, torus)"));
        return rep;
    }
    let (n1, n2) = (p.n1(), p.n2());
    if n1 == 0 || n2 == 0 {
        rep.push(Violation::new("STRUCT.EMPTY", "both graphs need vertices"));
        return rep;
    }
    if p.delta == 0 || p.delta > 5 {
        rep.push(Violation::new("STRUCT.DELTA", format!("delta = {}", p.delta)));
    }
    let d_ok = if p.delta <= 2 {
        p.d == 1
    } else {
        p.d >= 1 && 2 * p.d <= p.delta && gcd(p.d, p.delta) == 1
    };
    if !d_ok {
        rep.push(Violation::new(
            "STRUCT.JUMP",
            format!("d = {} invalid for delta = {}", p.d, p.delta),
        ));
    }
    if p.g1.n_edges() != p.g2.n_edges() {
        rep.push(Violation::new("STRUCT.EDGES", "edge sets differ in size"));
        return rep;
    }
    if 2 * p.n_edges() != p.delta * n1 * n2 {
        rep.push(Violation::new(
            "STRUCT.EDGES",
            format!("E = {} but delta n1 n2 / 2 = {}/2", p.n_edges(), p.delta * n1 * n2),
        ));
    }
    // Label duality: the label at an end names the vertex carrying the same
    // end on the other side.
    for e in 0..p.n_edges() {
        for i in 0..2 {
            let l1 = p.g1.labels.get(e).map(|l| l[i]);
            let l2 = p.g2.labels.get(e).map(|l| l[i]);
            let v2 = p.g2.edges[e][i].vertex;
            let v1 = p.g1.edges[e][i].vertex;
            if l1 != Some(v2 as u16 + 1) || l2 != Some(v1 as u16 + 1) {
                rep.push(Violation::new(
                    "STRUCT.DUALITY",
                    format!("edge {e} end {i} labels disagree with attachments"),
                ));
            }
        }
    }
    if !rep.is_clean() {
        return rep;
    }
    rep.extend(check_label_cyclicity(&p.g1, n2));
    rep.extend(check_label_cyclicity(&p.g2, n1));
    // Per-(i, j) intersection counts.
    for u in 0..n1 {
        for v in 0..n2 {
            let k = shared_flags(p, u, v).len();
            if k != p.delta {
                rep.push(Violation::new(
                    "STRUCT.REGULAR",
                    format!("|u{} x v{}| = {k}, expected {}", u + 1, v + 1, p.delta),
                ));
            }
        }
    }
    // No trivial loops on either side.
    for (name, g, sys) in [("G1", &p.g1, &sys1), ("G2", &p.g2, &sys2)] {
        for e in 0..g.n_edges() {
            if g.is_loop(e) && is_trivial_loop(g, sys, e).unwrap_or(false) {
                rep.push(Violation::new(
                    "STRUCT.NOTRIV",
                    format!("{name}: edge {e} is a trivial loop"),
                ));
            }
        }
    }
    rep.extend(check_parity_rule(p).violations);
    rep.extend(check_jumping_order(p).violations);
    rep
}

/// Labels around each vertex must read `1..=n` repeated, ascending in the
/// vertex's reading direction.
pub fn check_label_cyclicity(g: &EmbeddedGraph, n_opposite: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    for (v, fv) in g.vertices.iter().enumerate() {
        let m = fv.valency();
        if m == 0 {
            out.push(Violation::new("STRUCT.LABELS", format!("vertex {} isolated", v + 1)));
            continue;
        }
        let lab = |pos: usize| -> u16 {
            let (e, i) = fv.rotation[pos % m];
            g.labels[e][i]
        };
        for pos in 0..m {
            let (a, b) = (lab(pos), lab(pos + 1));
            let want = match fv.sign {
                Sign::Plus => (a as usize % n_opposite) as u16 + 1,
                Sign::Minus => ((a as usize + n_opposite - 2) % n_opposite) as u16 + 1,
            };
            if b != want {
                out.push(Violation::new(
                    "STRUCT.LABELS",
                    format!("vertex {}: label {} followed by {}", v + 1, a, b),
                ));
                break;
            }
        }
    }
    out
}

/// The parity rule: every edge is positive on exactly one side.
pub fn check_parity_rule(p: &GraphPair) -> PairReport {
    let mut rep = PairReport::default();
    for e in 0..p.n_edges() {
        let s1 = edge_sign(&p.g1, e);
        let s2 = edge_sign(&p.g2, e);
        if s1 == s2 {
            rep.push(Violation::new(
                "L2.2.1",
                format!(
                    "edge {e} is {} in both graphs",
                    if s1 == EdgeSign::Positive { "positive" } else { "negative" }
                ),
            ));
        }
    }
    rep
}

/// The jumping order: for each vertex pair `(u, v)` the shared flags, read
/// around `u`, must appear around `v` in arithmetic progression with step
/// `sense * d` modulo `delta`.
pub fn check_jumping_order(p: &GraphPair) -> PairReport {
    let mut rep = PairReport::default();
    let step = p.sense as isize * p.d as isize;
    for u in 0..p.n1() {
        for v in 0..p.n2() {
            let su = flags_around_g1(p, u, v);
            let sv = flags_around_g2(p, u, v);
            let m = su.len();
            if m != sv.len() || m == 0 {
                continue; // structural regularity reported elsewhere
            }
            let idx_of = |f: &(EdgeId, EndIdx)| su.iter().position(|x| x == f).unwrap();
            let t: Vec<isize> = sv.iter().map(|f| idx_of(f) as isize).collect();
            let ok = (0..m).all(|k| {
                let a = t[k];
                let b = t[(k + 1) % m];
                (b - a).rem_euclid(m as isize) == step.rem_euclid(m as isize)
            });
            if !ok {
                rep.push(Violation::new(
                    "L2.10",
                    format!(
                        "u{} x v{}: order around v is {:?}, not a step {step} progression",
                        u + 1,
                        v + 1,
                        t
                    ),
                ));
            }
        }
    }
    rep
}

/// Distance transfer: exhaustive scan of the two quadruple cases.
///
/// Case one: points `P, Q` on `(a, x)` and `R, S` on `(b, y)`; equal
/// distances around the annulus-side vertices force equal distances around
/// the torus-side vertices. Case two: `P` on `(a, x)`, `Q` on `(a, y)`,
/// `R` on `(b, x)`, `S` on `(b, y)`; equal distances around `a` and `b`
/// force `rho_x(P, R) = rho_y(Q, S)`.
pub fn check_distance_transfer(p: &GraphPair) -> PairReport {
    let mut rep = PairReport::default();
    let (n1, n2) = (p.n1(), p.n2());
    let flags: Vec<Vec<Vec<(EdgeId, EndIdx)>>> = (0..n1)
        .map(|u| (0..n2).map(|v| shared_flags(p, u, v)).collect())
        .collect();
    let rho1 = |f: (EdgeId, EndIdx), g: (EdgeId, EndIdx), u: VertexId| {
        rho(&p.g1, u, p.g1.edges[f.0][f.1], p.g1.edges[g.0][g.1]).unwrap()
    };
    let rho2 = |f: (EdgeId, EndIdx), g: (EdgeId, EndIdx), v: VertexId| {
        rho(&p.g2, v, p.g2.edges[f.0][f.1], p.g2.edges[g.0][g.1]).unwrap()
    };
    // Case (i)
    for a in 0..n1 {
        for x in 0..n2 {
            for b in 0..n1 {
                for y in 0..n2 {
                    for &pp in &flags[a][x] {
                        for &qq in &flags[a][x] {
                            let t1 = rho1(pp, qq, a);
                            for &rr in &flags[b][y] {
                                for &ss in &flags[b][y] {
                                    if rho1(rr, ss, b) != t1 {
                                        continue;
                                    }
                                    if rho2(pp, qq, x) != rho2(rr, ss, y) {
                                        rep.push(Violation::new(
                                            "L2.6.1",
                                            format!(
                                                "P={pp:?} Q={qq:?} on (u{},v{}), R={rr:?} S={ss:?} on (u{},v{})",
                                                a + 1, x + 1, b + 1, y + 1
                                            ),
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    // Case (ii)
    for a in 0..n1 {
        for b in 0..n1 {
            for x in 0..n2 {
                for y in 0..n2 {
                    if x == y {
                        continue;
                    }
                    for &pp in &flags[a][x] {
                        for &qq in &flags[a][y] {
                            let t1 = rho1(pp, qq, a);
                            for &rr in &flags[b][x] {
                                for &ss in &flags[b][y] {
                                    if rho1(rr, ss, b) != t1 {
                                        continue;
                                    }
                                    if rho2(pp, rr, x) != rho2(qq, ss, y) {
                                        rep.push(Violation::new(
                                            "L2.6.2",
                                            format!(
                                                "P={pp:?} Q={qq:?} at u{}, R={rr:?} S={ss:?} at u{}",
                                                a + 1, b + 1
                                            ),
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    rep
}

/// Equidistance transfer: for every edge pair with equal endpoint-vertex
/// sets in both graphs, the equidistance verdicts agree across the pair.
pub fn check_equidistance_transfer(p: &GraphPair) -> PairReport {
    let mut rep = PairReport::default();
    let e_cnt = p.n_edges();
    for e1 in 0..e_cnt {
        for e2 in (e1 + 1)..e_cnt {
            let same1 = vertex_set(&p.g1, e1) == vertex_set(&p.g1, e2);
            let same2 = vertex_set(&p.g2, e1) == vertex_set(&p.g2, e2);
            if !(same1 && same2) {
                continue;
            }
            let q1 = is_equidistant_pair(&p.g1, e1, e2).unwrap();
            let q2 = is_equidistant_pair(&p.g2, e1, e2).unwrap();
            if q1 != q2 {
                rep.push(Violation::new(
                    "L2.8",
                    format!("edges {e1},{e2}: equidistant {q1} on the annulus, {q2} on the torus"),
                ));
            }
        }
    }
    rep
}

fn vertex_set(g: &EmbeddedGraph, e: EdgeId) -> [VertexId; 2] {
    let (a, b) = g.edge_vertices(e);
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

/// Face systems for both sides.
pub fn pair_systems(p: &GraphPair) -> Result<(FaceSystem, FaceSystem), MapError> {
    Ok((p.g1.face_system()?, p.g2.face_system()?))
}
