//! The constraint registry: every rule a candidate pair must satisfy, as an
//! executable predicate producing violations, tagged by provenance.
//!
//! `Combinatorial` constraints follow from the label and orientation
//! structure alone; `TopologicalAxiom` constraints encode conclusions whose
//! justification lives outside the graph data (cable-space, reducibility and
//! minimality arguments). The census prunes with both under the full
//! profile and with the former only under the combinatorial profile.

use crate::labels::{edge_sign, family_permutation, EdgeSign};
use crate::maps::{
    check_cycle, cycle_sides, induced_subgraph, is_essential_cycle, parallel_classes, reduce,
    side_euler, side_has_mark, EdgeId, EmbeddedGraph, FaceSystem, ParallelClass, VertexId,
};
use crate::pairing::{
    check_distance_transfer, check_equidistance_transfer, validate_pair, GraphPair, Violation,
};
use crate::sep::separability_profile;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Combinatorial,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Combinatorial,
    TopologicalAxiom,
}

#[derive(Debug, Clone, Copy)]
pub struct Constraint {
    pub id: &'static str,
    pub provenance: Provenance,
    pub statement: &'static str,
}

/// Every registered constraint id with its provenance and a one-line
/// statement of the rule it enforces.
pub const REGISTRY: &[Constraint] = &[
    Constraint { id: "STRUCT", provenance: Provenance::Combinatorial, statement: "well-formed rotation systems, label duality and cyclicity, per-pair intersection counts, no trivial loops" },
    Constraint { id: "L2.2.1", provenance: Provenance::Combinatorial, statement: "every edge is positive on exactly one side" },
    Constraint { id: "L2.2.2", provenance: Provenance::TopologicalAxiom, statement: "no two edges are parallel on both sides" },
    Constraint { id: "L2.2.3", provenance: Provenance::TopologicalAxiom, statement: "a family of n parallel negative edges closes into disjoint essential cycles of equal length on the other side" },
    Constraint { id: "L2.2.4", provenance: Provenance::TopologicalAxiom, statement: "a Scharlemann cycle forces the other side to have evenly many vertices with signs alternating by index parity" },
    Constraint { id: "L2.2.5", provenance: Provenance::TopologicalAxiom, statement: "the edges of a Scharlemann cycle span an essential subgraph on the other side" },
    Constraint { id: "L2.2.6", provenance: Provenance::TopologicalAxiom, statement: "no extended Scharlemann cycle when the other side has more than two vertices" },
    Constraint { id: "L2.3.1", provenance: Provenance::TopologicalAxiom, statement: "an annulus family that outgrows the torus vertex count forces all torus vertices parallel and a transitive family permutation" },
    Constraint { id: "L2.3.2", provenance: Provenance::TopologicalAxiom, statement: "disjoint Scharlemann label pairs on the annulus side agree in parity" },
    Constraint { id: "L2.3.3", provenance: Provenance::TopologicalAxiom, statement: "annulus-side positive families are capped at n/2 + 2, with n divisible by 4 at the cap" },
    Constraint { id: "L2.4", provenance: Provenance::TopologicalAxiom, statement: "a repeated label inside a positive family yields a Scharlemann cycle on that label" },
    Constraint { id: "L2.5.1", provenance: Provenance::TopologicalAxiom, statement: "all torus-side Scharlemann cycles share one label pair" },
    Constraint { id: "L2.5.2", provenance: Provenance::TopologicalAxiom, statement: "torus-side positive families are capped at n/2 + 1, with a Scharlemann pair at the cap" },
    Constraint { id: "L2.5.3", provenance: Provenance::TopologicalAxiom, statement: "torus-side families are capped at the annulus vertex count" },
    Constraint { id: "L2.5.4", provenance: Provenance::TopologicalAxiom, statement: "no three same-label edges are parallel on the torus side" },
    Constraint { id: "L2.6.1", provenance: Provenance::Combinatorial, statement: "distances transfer across the pair, same-pair case" },
    Constraint { id: "L2.6.2", provenance: Provenance::Combinatorial, statement: "distances transfer across the pair, crossed case" },
    Constraint { id: "L2.8", provenance: Provenance::Combinatorial, statement: "equidistance verdicts agree across the pair" },
    Constraint { id: "L2.10", provenance: Provenance::Combinatorial, statement: "shared boundary points appear in jumping-number order on both sides" },
    Constraint { id: "L2.11", provenance: Provenance::Combinatorial, statement: "a positive same-label cycle bounding a vertex-free disk contains a Scharlemann cycle" },
    Constraint { id: "L2.12", provenance: Provenance::Combinatorial, statement: "reduced graphs respect the Euler-count edge and valency bounds" },
    Constraint { id: "L3.4", provenance: Provenance::TopologicalAxiom, statement: "a 1-separable annulus graph has exactly one vertex" },
    Constraint { id: "P5.5", provenance: Provenance::TopologicalAxiom, statement: "a 2-separable annulus graph forces two vertices on both sides" },
    Constraint { id: "L6.3", provenance: Provenance::TopologicalAxiom, statement: "with four torus vertices, the annulus graph cannot carry length-2 Scharlemann cycles on four distinct label pairs" },
];

pub fn constraint(id: &str) -> Option<&'static Constraint> {
    REGISTRY.iter().find(|c| c.id == id)
}

fn active(id: &str, profile: Profile) -> bool {
    match profile {
        Profile::Full => true,
        Profile::Combinatorial => {
            constraint(id).map_or(true, |c| c.provenance == Provenance::Combinatorial)
        }
    }
}

/// A cycle of positive edges bounding a vertex-free disk face with one label
/// pair on all its edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScharlemannCycle {
    /// Edges around the bounding face.
    pub edges: Vec<EdgeId>,
    /// Unordered label pair `{i, i+1}` (cyclic), stored with the smaller
    /// base index first.
    pub label_pair: (u16, u16),
    /// Local face index of the bounding disk.
    pub face: usize,
}

impl ScharlemannCycle {
    pub fn pair_set(&self) -> BTreeSet<u16> {
        BTreeSet::from([self.label_pair.0, self.label_pair.1])
    }
}

/// The label pair `{a, b}` when the two labels are cyclically consecutive
/// modulo `n`, normalized to `(i, i+1)` form.
fn consecutive_pair(a: u16, b: u16, n: u16) -> Option<(u16, u16)> {
    if n == 1 {
        return if a == 1 && b == 1 { Some((1, 1)) } else { None };
    }
    if b == a % n + 1 {
        Some((a, b))
    } else if a == b % n + 1 {
        Some((b, a))
    } else {
        None
    }
}

/// All Scharlemann cycles of a graph inside a pair: disk faces whose walk
/// uses each edge once, all edges positive with one constant label pair.
pub fn find_scharlemann_cycles(
    g: &EmbeddedGraph,
    sys: &FaceSystem,
    n_opposite: u16,
) -> Vec<ScharlemannCycle> {
    let mut out = Vec::new();
    for (f, fw) in sys.faces.iter().enumerate() {
        if fw.darts.is_empty() || !sys.is_disk_class(sys.class_of_face[f]) {
            continue;
        }
        let edges: Vec<EdgeId> = fw.edge_ids().collect();
        let set: BTreeSet<EdgeId> = edges.iter().copied().collect();
        if set.len() != edges.len() {
            continue;
        }
        if !edges.iter().all(|&e| edge_sign(g, e) == EdgeSign::Positive) {
            continue;
        }
        let mut pair: Option<(u16, u16)> = None;
        let mut ok = true;
        for &e in &edges {
            let p = consecutive_pair(g.labels[e][0], g.labels[e][1], n_opposite);
            match (p, &pair) {
                (None, _) => {
                    ok = false;
                    break;
                }
                (Some(q), None) => pair = Some(q),
                (Some(q), Some(r)) => {
                    let qs = BTreeSet::from([q.0, q.1]);
                    let rs = BTreeSet::from([r.0, r.1]);
                    if qs != rs {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if ok {
            if let Some(pr) = pair {
                out.push(ScharlemannCycle { edges, label_pair: pr, face: f });
            }
        }
    }
    out
}

/// Length-2 extended Scharlemann cycles: the outer pair of four consecutive
/// fan edges whose middle pair is a Scharlemann cycle.
pub fn find_extended_scharlemann(
    g: &EmbeddedGraph,
    sys: &FaceSystem,
    n_opposite: u16,
) -> Vec<(EdgeId, EdgeId)> {
    let schar = find_scharlemann_cycles(g, sys, n_opposite);
    let is_schar_pair = |a: EdgeId, b: EdgeId| {
        schar
            .iter()
            .any(|s| s.edges.len() == 2 && s.edges.contains(&a) && s.edges.contains(&b))
    };
    let mut out = Vec::new();
    for class in parallel_classes(g, sys) {
        let m = class.edges.len();
        if m < 4 {
            continue;
        }
        let quads: Vec<[EdgeId; 4]> = if class.cyclic {
            (0..m)
                .map(|k| {
                    [
                        class.edges[k],
                        class.edges[(k + 1) % m],
                        class.edges[(k + 2) % m],
                        class.edges[(k + 3) % m],
                    ]
                })
                .collect()
        } else {
            (0..m - 3)
                .map(|k| {
                    [
                        class.edges[k],
                        class.edges[k + 1],
                        class.edges[k + 2],
                        class.edges[k + 3],
                    ]
                })
                .collect()
        };
        for [a, b, c, d] in quads {
            if is_schar_pair(b, c) {
                out.push((a.min(d), a.max(d)));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Is a subgraph (given by its edges, with their end vertices) essential,
/// i.e. not contained in a disk of the surface? A subgraph sits inside a
/// disk exactly when every fundamental cycle of it is inessential.
pub fn subgraph_essential(
    g: &EmbeddedGraph,
    sys: &FaceSystem,
    edges: &[EdgeId],
) -> bool {
    // Spanning forest over the subgraph's edges.
    let mut uf = crate::maps::UnionFind::new(g.n_vertices());
    let mut chords: Vec<EdgeId> = Vec::new();
    let mut tree: Vec<EdgeId> = Vec::new();
    for &e in edges {
        let (a, b) = g.edge_vertices(e);
        if a != b && uf.union(a, b) {
            tree.push(e);
        } else {
            chords.push(e);
        }
    }
    // adjacency over tree edges
    let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); g.n_vertices()];
    for &e in &tree {
        let (a, b) = g.edge_vertices(e);
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    let tree_path = |from: VertexId, to: VertexId| -> Vec<EdgeId> {
        if from == to {
            return Vec::new();
        }
        let mut prev: Vec<Option<(VertexId, EdgeId)>> = vec![None; g.n_vertices()];
        let mut seen = vec![false; g.n_vertices()];
        seen[from] = true;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((v, e));
                    queue.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            let (v, e) = prev[cur].expect("tree connects the endpoints");
            path.push(e);
            cur = v;
        }
        path
    };
    for &c in &chords {
        let (a, b) = g.edge_vertices(c);
        let mut cycle = tree_path(a, b);
        cycle.push(c);
        if is_essential_cycle(g, sys, &cycle).unwrap_or(false) {
            return true;
        }
    }
    false
}

struct Side<'a> {
    alpha: usize,
    g: &'a EmbeddedGraph,
    sys: &'a FaceSystem,
    n_own: usize,
    n_opp: usize,
    classes: Vec<ParallelClass>,
    schar: Vec<ScharlemannCycle>,
}

/// Run the per-item section-2 battery on a structurally valid pair.
pub fn check_section2(
    p: &GraphPair,
    sys1: &FaceSystem,
    sys2: &FaceSystem,
    profile: Profile,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let sides = [
        Side {
            alpha: 1,
            g: &p.g1,
            sys: sys1,
            n_own: p.n1(),
            n_opp: p.n2(),
            classes: parallel_classes(&p.g1, sys1),
            schar: find_scharlemann_cycles(&p.g1, sys1, p.n2() as u16),
        },
        Side {
            alpha: 2,
            g: &p.g2,
            sys: sys2,
            n_own: p.n2(),
            n_opp: p.n1(),
            classes: parallel_classes(&p.g2, sys2),
            schar: find_scharlemann_cycles(&p.g2, sys2, p.n1() as u16),
        },
    ];
    let [s1, s2] = &sides;

    if active("L2.2.2", profile) {
        // No pair of edges parallel on both sides.
        let mut class_of = vec![usize::MAX; p.n_edges()];
        for (k, c) in s2.classes.iter().enumerate() {
            for &e in &c.edges {
                class_of[e] = k;
            }
        }
        for c in &s1.classes {
            for i in 0..c.edges.len() {
                for j in (i + 1)..c.edges.len() {
                    let (a, b) = (c.edges[i], c.edges[j]);
                    if class_of[a] == class_of[b] {
                        out.push(Violation::new(
                            "L2.2.2",
                            format!("edges {a},{b} parallel on both sides"),
                        ));
                    }
                }
            }
        }
    }

    if active("L2.2.3", profile) {
        for s in &sides {
            let other = if s.alpha == 1 { s2 } else { s1 };
            for c in &s.classes {
                if c.edges.len() < s.n_opp || s.n_opp == 0 {
                    continue;
                }
                if c.edges.iter().any(|&e| edge_sign(s.g, e) != EdgeSign::Negative) {
                    continue;
                }
                let windows: Vec<&[EdgeId]> = if c.edges.len() == s.n_opp {
                    vec![&c.edges[..]]
                } else {
                    c.edges.windows(s.n_opp).collect()
                };
                for w in windows {
                    match family_permutation(s.g, w, s.n_opp as u16) {
                        Err(_) => out.push(Violation::new(
                            "L2.2.3",
                            format!("side {}: family {:?} has inconsistent labels", s.alpha, w),
                        )),
                        Ok(phi) => {
                            if !phi.is_total() {
                                out.push(Violation::new(
                                    "L2.2.3",
                                    format!("side {}: family {:?} misses labels", s.alpha, w),
                                ));
                                continue;
                            }
                            let lens = phi.orbit_lengths();
                            if lens.iter().any(|&l| l != lens[0]) {
                                out.push(Violation::new(
                                    "L2.2.3",
                                    format!("side {}: orbit lengths {:?} differ", s.alpha, lens),
                                ));
                                continue;
                            }
                            for orbit in &phi.orbits {
                                let cyc: Vec<EdgeId> = w
                                    .iter()
                                    .copied()
                                    .filter(|&e| {
                                        let l = label_at_vertex(s.g, e, phi.from_vertex);
                                        orbit.contains(&l)
                                    })
                                    .collect();
                                let ok = check_cycle(other.g, &cyc).is_ok()
                                    && is_essential_cycle(other.g, other.sys, &cyc)
                                        .unwrap_or(false);
                                if !ok {
                                    out.push(Violation::new(
                                        "L2.2.3",
                                        format!(
                                            "side {}: family window {:?} closes an inessential cycle {:?}",
                                            s.alpha, w, cyc
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

    if active("L2.2.4", profile) {
        for s in &sides {
            if s.schar.is_empty() {
                continue;
            }
            let other = if s.alpha == 1 { s2 } else { s1 };
            if other.n_own % 2 != 0 {
                out.push(Violation::new(
                    "L2.2.4",
                    format!("side {} has a Scharlemann cycle but the other side has {} vertices", s.alpha, other.n_own),
                ));
                continue;
            }
            let signs = &other.g.vertices;
            let alternating = (0..other.n_own)
                .all(|k| (signs[k].sign == signs[0].sign) == (k % 2 == 0));
            if !alternating {
                out.push(Violation::new(
                    "L2.2.4",
                    format!("side {}: opposite signs do not alternate by index parity", s.alpha),
                ));
            }
        }
    }

    if active("L2.2.5", profile) {
        for s in &sides {
            let other = if s.alpha == 1 { s2 } else { s1 };
            for sc in &s.schar {
                if !subgraph_essential(other.g, other.sys, &sc.edges) {
                    out.push(Violation::new(
                        "L2.2.5",
                        format!(
                            "side {}: Scharlemann cycle {:?} spans an inessential subgraph opposite",
                            s.alpha, sc.edges
                        ),
                    ));
                }
            }
        }
    }

    if active("L2.2.6", profile) {
        for s in &sides {
            if s.n_opp <= 2 {
                continue;
            }
            for (a, b) in find_extended_scharlemann(s.g, s.sys, s.n_opp as u16) {
                out.push(Violation::new(
                    "L2.2.6",
                    format!("side {}: extended Scharlemann cycle ({a},{b})", s.alpha),
                ));
            }
        }
    }

    if active("L2.3.1", profile) {
        if s1.n_opp > 2 {
            for c in &s1.classes {
                if c.edges.len() <= p.n2() {
                    continue;
                }
                if c.edges.iter().any(|&e| edge_sign(&p.g1, e) != EdgeSign::Negative) {
                    continue; // positive oversize families fall to L2.3.3
                }
                let all_parallel = p.g2.vertices.iter().all(|v| v.sign == p.g2.vertices[0].sign);
                let phi_ok = family_permutation(&p.g1, &c.edges[..p.n2()], p.n2() as u16)
                    .map(|phi| phi.is_transitive())
                    .unwrap_or(false);
                if !all_parallel || !phi_ok {
                    out.push(Violation::new(
                        "L2.3.1",
                        format!("family {:?} exceeds n2 without the forced structure", c.edges),
                    ));
                }
            }
        }
    }

    if active("L2.3.2", profile) {
        let pairs: Vec<BTreeSet<u16>> = s1.schar.iter().map(|s| s.pair_set()).collect();
        for i in 0..pairs.len() {
            for j in (i + 1)..pairs.len() {
                if pairs[i].is_disjoint(&pairs[j]) {
                    let bi = s1.schar[i].label_pair.0;
                    let bj = s1.schar[j].label_pair.0;
                    if bi % 2 != bj % 2 {
                        out.push(Violation::new(
                            "L2.3.2",
                            format!("disjoint label pairs {:?} and {:?} of opposite parity", pairs[i], pairs[j]),
                        ));
                    }
                }
            }
        }
    }

    if active("L2.3.3", profile) {
        if s1.n_opp > 2 {
            for c in &s1.classes {
                if c.edges.iter().any(|&e| edge_sign(&p.g1, e) != EdgeSign::Positive) {
                    continue;
                }
                let m = c.edges.len();
                if 2 * m > p.n2() + 4 {
                    out.push(Violation::new(
                        "L2.3.3",
                        format!("positive family of {m} edges exceeds n2/2 + 2"),
                    ));
                } else if 2 * m == p.n2() + 4 && p.n2() % 4 != 0 {
                    out.push(Violation::new(
                        "L2.3.3",
                        format!("positive family at the cap but n2 = {} is not divisible by 4", p.n2()),
                    ));
                }
            }
        }
    }

    if active("L2.4", profile) {
        for s in &sides {
            for c in &s.classes {
                if c.edges.iter().any(|&e| edge_sign(s.g, e) != EdgeSign::Positive) {
                    continue;
                }
                let mut label_count = std::collections::BTreeMap::new();
                for &e in &c.edges {
                    for i in 0..2 {
                        *label_count.entry(s.g.labels[e][i]).or_insert(0usize) += 1;
                    }
                }
                for (&lab, &cnt) in &label_count {
                    if cnt < 2 {
                        continue;
                    }
                    let found = s.schar.iter().any(|sc| {
                        sc.edges.iter().all(|e| c.edges.contains(e))
                            && sc.pair_set().contains(&lab)
                    });
                    if !found {
                        out.push(Violation::new(
                            "L2.4",
                            format!(
                                "side {}: label {lab} repeats in family {:?} without a Scharlemann cycle on it",
                                s.alpha, c.edges
                            ),
                        ));
                    }
                }
            }
        }
    }

    if active("L2.5.1", profile) {
        let sets: Vec<BTreeSet<u16>> = s2.schar.iter().map(|s| s.pair_set()).collect();
        for w in sets.windows(2) {
            if w[0] != w[1] {
                out.push(Violation::new(
                    "L2.5.1",
                    format!("torus-side Scharlemann pairs {:?} and {:?} differ", w[0], w[1]),
                ));
            }
        }
    }

    if active("L2.5.2", profile) {
        for c in &s2.classes {
            if c.edges.iter().any(|&e| edge_sign(&p.g2, e) != EdgeSign::Positive) {
                continue;
            }
            let m = c.edges.len();
            if 2 * m > p.n1() + 2 {
                out.push(Violation::new(
                    "L2.5.2",
                    format!("torus-side positive family of {m} edges exceeds n1/2 + 1"),
                ));
            } else if 2 * m == p.n1() + 2 {
                let found = s2.schar.iter().any(|sc| sc.edges.iter().all(|e| c.edges.contains(e)));
                if !found {
                    out.push(Violation::new(
                        "L2.5.2",
                        format!("torus-side family {:?} at the cap without a Scharlemann pair", c.edges),
                    ));
                }
            }
        }
    }

    if active("L2.5.3", profile) {
        for c in &s2.classes {
            if c.edges.len() > p.n1() {
                out.push(Violation::new(
                    "L2.5.3",
                    format!("torus-side family of {} edges exceeds n1 = {}", c.edges.len(), p.n1()),
                ));
            }
        }
    }

    if active("L2.5.4", profile) {
        for c in &s2.classes {
            let mut count = std::collections::BTreeMap::new();
            for &e in &c.edges {
                let (a, b) = (p.g2.labels[e][0], p.g2.labels[e][1]);
                *count.entry(a).or_insert(0usize) += 1;
                if b != a {
                    *count.entry(b).or_insert(0usize) += 1;
                }
            }
            for (&lab, &cnt) in &count {
                if cnt >= 3 {
                    out.push(Violation::new(
                        "L2.5.4",
                        format!("{cnt} parallel {lab}-edges on the torus side"),
                    ));
                }
            }
        }
    }

    if active("L2.11", profile) {
        for s in &sides {
            out.extend(check_l2_11(s));
        }
    }

    if active("L2.12", profile) {
        for s in &sides {
            if let Ok(r) = reduce(s.g, s.sys) {
                for v in crate::maps::check_reduced_bounds(&r) {
                    out.push(Violation::new(
                        "L2.12",
                        format!("side {}: {} ({})", s.alpha, v.rule, v.detail),
                    ));
                }
            }
        }
    }

    let _ = active("L2.2.1", profile);
    out
}

fn label_at_vertex(g: &EmbeddedGraph, e: EdgeId, v: VertexId) -> u16 {
    if g.edges[e][0].vertex == v {
        g.labels[e][0]
    } else {
        g.labels[e][1]
    }
}

/// Positive same-label cycles bounding vertex-free disks must contain a
/// Scharlemann cycle.
fn check_l2_11(s: &Side) -> Vec<Violation> {
    let mut out = Vec::new();
    for lab in 1..=s.n_opp as u16 {
        let sub: Vec<EdgeId> = (0..s.g.n_edges())
            .filter(|&e| {
                edge_sign(s.g, e) == EdgeSign::Positive
                    && (s.g.labels[e][0] == lab || s.g.labels[e][1] == lab)
            })
            .collect();
        if sub.len() < 2 {
            continue;
        }
        for cyc in simple_cycles(s.g, &sub) {
            let Some((sa, sb)) = cycle_sides(s.g, s.sys, &cyc) else {
                continue;
            };
            for side in [&sa, &sb] {
                if side_has_mark(s.sys, side) {
                    continue;
                }
                if side_euler(s.g, s.sys, &cyc, side) != 1 {
                    continue;
                }
                if interior_vertex_count(s.g, s.sys, &cyc, side) != 0 {
                    continue;
                }
                let contained = s
                    .schar
                    .iter()
                    .any(|sc| side.contains(&s.sys.class_of_face[sc.face]));
                if !contained {
                    out.push(Violation::new(
                        "L2.11",
                        format!(
                            "side {}: positive {lab}-cycle {:?} bounds a vertex-free disk without a Scharlemann cycle",
                            s.alpha, cyc
                        ),
                    ));
                }
            }
        }
    }
    out
}

fn interior_vertex_count(
    g: &EmbeddedGraph,
    sys: &FaceSystem,
    cycle: &[EdgeId],
    side: &BTreeSet<usize>,
) -> usize {
    let cyc_vs: BTreeSet<VertexId> = cycle
        .iter()
        .flat_map(|&e| [g.edges[e][0].vertex, g.edges[e][1].vertex])
        .collect();
    (0..g.n_vertices())
        .filter(|&v| !cyc_vs.contains(&v))
        .filter(|&v| {
            if g.vertices[v].valency() > 0 {
                side.contains(&sys.class_of_dart(g.vertices[v].rotation[0]))
            } else {
                sys.faces
                    .iter()
                    .position(|f| f.isolated == Some(v))
                    .map(|f| side.contains(&sys.class_of_face[f]))
                    .unwrap_or(false)
            }
        })
        .count()
}

/// All embedded cycles using only the given edges (graphs here are tiny).
fn simple_cycles(g: &EmbeddedGraph, edges: &[EdgeId]) -> Vec<Vec<EdgeId>> {
    let mut out: Vec<Vec<EdgeId>> = Vec::new();
    // loops are cycles on their own
    for &e in edges {
        if g.is_loop(e) {
            out.push(vec![e]);
        }
    }
    let non_loop: Vec<EdgeId> = edges.iter().copied().filter(|&e| !g.is_loop(e)).collect();
    // DFS over vertex paths with increasing start vertex
    let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); g.n_vertices()];
    for &e in &non_loop {
        let (a, b) = g.edge_vertices(e);
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    fn dfs(
        g: &EmbeddedGraph,
        adj: &Vec<Vec<(VertexId, EdgeId)>>,
        start: VertexId,
        cur: VertexId,
        path_v: &mut Vec<VertexId>,
        path_e: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
    ) {
        for &(w, e) in &adj[cur] {
            if path_e.contains(&e) {
                continue;
            }
            if w == start && path_e.len() >= 1 {
                let mut cyc = path_e.clone();
                cyc.push(e);
                if cyc.len() >= 2 {
                    let mut key = cyc.clone();
                    key.sort_unstable();
                    if !out.iter().any(|c| {
                        let mut k = c.clone();
                        k.sort_unstable();
                        k == key
                    }) {
                        out.push(cyc);
                    }
                }
                continue;
            }
            if w < start || path_v.contains(&w) {
                continue;
            }
            path_v.push(w);
            path_e.push(e);
            dfs(g, adj, start, w, path_v, path_e, out);
            path_v.pop();
            path_e.pop();
        }
    }
    for start in 0..g.n_vertices() {
        let mut pv = vec![start];
        let mut pe = Vec::new();
        dfs(g, &adj, start, start, &mut pv, &mut pe, &mut out);
    }
    out
}

/// The axioms whose justification is topological: run only under the full
/// profile.
pub fn check_topological_axioms(
    p: &GraphPair,
    sys1: &FaceSystem,
    sys2: &FaceSystem,
    profile: Profile,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if profile != Profile::Full {
        return out;
    }
    let seps = separability_profile(&p.g1, sys1);
    if seps.contains(&1) && p.n1() != 1 {
        out.push(Violation::new(
            "L3.4",
            format!("1-separable with n1 = {}", p.n1()),
        ));
    }
    if seps.contains(&2) && !(p.n1() == 2 && p.n2() == 2) {
        out.push(Violation::new(
            "P5.5",
            format!("2-separable with (n1, n2) = ({}, {})", p.n1(), p.n2()),
        ));
    }
    if p.n2() == 4 && p.n1() >= 3 && p.delta >= 4 {
        let schar = find_scharlemann_cycles(&p.g1, sys1, p.n2() as u16);
        let mut pairs: BTreeSet<(u16, u16)> = BTreeSet::new();
        for sc in &schar {
            if sc.edges.len() == 2 {
                pairs.insert(sc.label_pair);
            }
        }
        if pairs.len() >= 4 {
            out.push(Violation::new(
                "L6.3",
                format!("length-2 Scharlemann cycles on pairs {:?}", pairs),
            ));
        }
    }
    let _ = sys2;
    out
}

/// The status of one evaluated configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafStatus {
    Survivor,
    Eliminated(Violation),
}

/// Evaluate a pair against the whole battery: structural validation, the
/// transfer checks, section 2, and the topological axioms per profile.
/// Collects every violation; the leaf carries the first one under the fixed
/// registry order.
pub fn evaluate(p: &GraphPair, profile: Profile) -> (LeafStatus, Vec<Violation>) {
    let mut all = Vec::new();
    let rep = validate_pair(p);
    let structural_ok = rep.is_clean();
    all.extend(rep.violations);
    if structural_ok {
        let sys1 = p.g1.face_system().expect("validated");
        let sys2 = p.g2.face_system().expect("validated");
        all.extend(check_distance_transfer(p).violations);
        all.extend(check_equidistance_transfer(p).violations);
        all.extend(check_section2(p, &sys1, &sys2, profile));
        all.extend(check_topological_axioms(p, &sys1, &sys2, profile));
    }
    if profile == Profile::Combinatorial {
        all.retain(|v| active(v.constraint, profile));
    }
    match all.first() {
        None => (LeafStatus::Survivor, all),
        Some(v) => (LeafStatus::Eliminated(v.clone()), all),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_unique() {
        let mut ids: Vec<&str> = REGISTRY.iter().map(|c| c.id).collect();
        let n = ids.len();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn consecutive_pairs_wrap() {
        assert_eq!(consecutive_pair(4, 1, 4), Some((4, 1)));
        assert_eq!(consecutive_pair(1, 2, 4), Some((1, 2)));
        assert_eq!(consecutive_pair(1, 3, 4), None);
        assert_eq!(consecutive_pair(1, 1, 1), Some((1, 1)));
    }
}
