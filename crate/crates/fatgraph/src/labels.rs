//! The label calculus on vertex boundaries: distances, edge signs,
//! equidistant pairs, and the permutation attached to a family of negative
//! edges.
//!
//! Distances are measured in the reading direction of the vertex: the global
//! rotation direction at a positive vertex and the reverse at a negative
//! one. This is the direction in which endpoint labels ascend.

use crate::maps::{Dart, EdgeId, EmbeddedGraph, EndpointRef, MapError, Sign, VertexId};

/// Distance from one slot to another around a vertex, in the vertex's
/// reading direction; `rho(P, P) = 0`.
pub fn rho(g: &EmbeddedGraph, u: VertexId, p: EndpointRef, q: EndpointRef) -> Result<usize, MapError> {
    if p.vertex != u || q.vertex != u {
        return Err(MapError::SlotNotOnVertex);
    }
    let m = g.vertices[u].valency();
    if p.position >= m || q.position >= m {
        return Err(MapError::SlotNotOnVertex);
    }
    let diff = match g.vertices[u].sign {
        Sign::Plus => (q.position + m - p.position) % m,
        Sign::Minus => (p.position + m - q.position) % m,
    };
    Ok(diff)
}

/// Distance between two edges with exactly one endpoint each on `u`.
pub fn rho_edges(
    g: &EmbeddedGraph,
    u: VertexId,
    e1: EdgeId,
    e2: EdgeId,
) -> Result<usize, MapError> {
    let p = single_end_on(g, u, e1)?;
    let q = single_end_on(g, u, e2)?;
    rho(g, u, p, q)
}

fn single_end_on(g: &EmbeddedGraph, u: VertexId, e: EdgeId) -> Result<EndpointRef, MapError> {
    let ends = g.edges[e];
    match (ends[0].vertex == u, ends[1].vertex == u) {
        (true, false) => Ok(ends[0]),
        (false, true) => Ok(ends[1]),
        _ => Err(MapError::SlotNotOnVertex),
    }
}

/// The label carried by the edge end occupying a slot.
pub fn label_at(g: &EmbeddedGraph, slot: EndpointRef) -> u16 {
    let (e, i) = g.dart_at(slot);
    g.labels[e][i]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSign {
    Positive,
    Negative,
}

/// An edge is positive when it connects parallel vertices; loops are
/// positive.
pub fn edge_sign(g: &EmbeddedGraph, e: EdgeId) -> EdgeSign {
    let (a, b) = g.edge_vertices(e);
    if g.vertices[a].sign == g.vertices[b].sign {
        EdgeSign::Positive
    } else {
        EdgeSign::Negative
    }
}

/// Equidistance of a pair of edges joining the same pair of vertices.
///
/// For edges between distinct vertices `u, v` the test is
/// `rho_u(e1, e2) == rho_v(e2, e1)`. For a pair of loops at a single vertex
/// the test is `rho(P1, P2) == rho(Q2, Q1)` over the endpoint pairings, and
/// the verdict does not depend on which end of each loop is called `P`;
/// both pairings are computed and must agree.
pub fn is_equidistant_pair(
    g: &EmbeddedGraph,
    e1: EdgeId,
    e2: EdgeId,
) -> Result<bool, MapError> {
    let (a1, b1) = g.edge_vertices(e1);
    let (a2, b2) = g.edge_vertices(e2);
    let vs1 = sorted(a1, b1);
    let vs2 = sorted(a2, b2);
    if vs1 != vs2 {
        return Err(MapError::EndpointsMismatch);
    }
    if a1 == b1 {
        // Loop pair at one vertex.
        let u = a1;
        let (p1, q1) = (g.edges[e1][0], g.edges[e1][1]);
        let (p2, q2) = (g.edges[e2][0], g.edges[e2][1]);
        let check = |p1: EndpointRef, q1: EndpointRef, p2: EndpointRef, q2: EndpointRef| {
            Ok::<bool, MapError>(rho(g, u, p1, p2)? == rho(g, u, q2, q1)?)
        };
        let r1 = check(p1, q1, p2, q2)?;
        let r2 = check(p1, q1, q2, p2)?;
        let r3 = check(q1, p1, p2, q2)?;
        let r4 = check(q1, p1, q2, p2)?;
        // Swapping the endpoint naming of one loop replaces the compared
        // pairings by the other two; the verdict must be stable.
        debug_assert_eq!(r1 || r2, r3 || r4, "loop equidistance is choice-free");
        Ok(r1 || r2)
    } else {
        let (u, v) = (vs1[0], vs1[1]);
        Ok(rho_edges(g, u, e1, e2)? == rho_edges(g, v, e2, e1)?)
    }
}

fn sorted(a: VertexId, b: VertexId) -> [VertexId; 2] {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

/// The permutation attached to a family of parallel negative edges between
/// two vertices: an edge labeled `i` at the chosen first vertex is labeled
/// `phi(i)` at the other. Stored with a fixed end-vertex order (the smaller
/// vertex id first); callers needing the inversion-free notion compare both
/// directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationPhi {
    pub from_vertex: VertexId,
    pub to_vertex: VertexId,
    /// Partial permutation on 1-based labels; `map[i-1] = Some(phi(i))`.
    pub map: Vec<Option<u16>>,
    pub orbits: Vec<Vec<u16>>,
}

impl PermutationPhi {
    /// Orbit lengths, when the permutation is total.
    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o.len()).collect()
    }
    pub fn is_total(&self) -> bool {
        self.map.iter().all(|m| m.is_some())
    }
    pub fn is_transitive(&self) -> bool {
        self.is_total() && self.orbits.len() == 1
    }
    pub fn inverse(&self) -> PermutationPhi {
        let n = self.map.len();
        let mut map = vec![None; n];
        for (i, m) in self.map.iter().enumerate() {
            if let Some(j) = m {
                map[*j as usize - 1] = Some(i as u16 + 1);
            }
        }
        let orbits = orbits_of(&map);
        PermutationPhi {
            from_vertex: self.to_vertex,
            to_vertex: self.from_vertex,
            map,
            orbits,
        }
    }
}

fn orbits_of(map: &[Option<u16>]) -> Vec<Vec<u16>> {
    let n = map.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] || map[start].is_none() {
            continue;
        }
        let mut orbit = Vec::new();
        let mut cur = start;
        loop {
            if seen[cur] {
                break;
            }
            seen[cur] = true;
            orbit.push(cur as u16 + 1);
            match map[cur] {
                Some(nxt) => {
                    cur = nxt as usize - 1;
                    if cur == start {
                        break;
                    }
                }
                None => break,
            }
        }
        out.push(orbit);
    }
    out
}

/// Compute the permutation of a family of negative edges between two
/// distinct vertices, from the end labels. `n_labels` is the label modulus
/// of this graph's ends.
pub fn family_permutation(
    g: &EmbeddedGraph,
    family: &[EdgeId],
    n_labels: u16,
) -> Result<PermutationPhi, MapError> {
    if family.is_empty() {
        return Err(MapError::PositiveFamily);
    }
    let (a, b) = g.edge_vertices(family[0]);
    if a == b {
        return Err(MapError::PositiveFamily);
    }
    let (from, to) = if a < b { (a, b) } else { (b, a) };
    let mut map = vec![None; n_labels as usize];
    for &e in family {
        let ends = g.edges[e];
        let (fi, ti) = if ends[0].vertex == from && ends[1].vertex == to {
            (0, 1)
        } else if ends[1].vertex == from && ends[0].vertex == to {
            (1, 0)
        } else {
            return Err(MapError::EndpointsMismatch);
        };
        let li = g.labels[e][fi];
        let lo = g.labels[e][ti];
        let slot = &mut map[li as usize - 1];
        if slot.is_some() && *slot != Some(lo) {
            return Err(MapError::EndpointsMismatch);
        }
        *slot = Some(lo);
    }
    let orbits = orbits_of(&map);
    Ok(PermutationPhi { from_vertex: from, to_vertex: to, map, orbits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{FatVertex, SurfaceKind};

    /// A bare two-vertex graph with `k` edges straight across, for label
    /// machinery tests. Vertex 0 is positive, vertex 1 negative.
    fn strip(k: usize, labels: Vec<[u16; 2]>) -> EmbeddedGraph {
        let mut g = EmbeddedGraph {
            surface: SurfaceKind::Disk,
            vertices: vec![
                FatVertex { sign: Sign::Plus, rotation: (0..k).map(|e| (e, 0)).collect() },
                FatVertex {
                    sign: Sign::Minus,
                    rotation: (0..k).rev().map(|e| (e, 1)).collect(),
                },
            ],
            edges: vec![[EndpointRef { vertex: 0, position: 0 }; 2]; k],
            labels,
            placements: vec![],
            marks: vec![0],
        };
        for v in 0..2 {
            for p in 0..g.vertices[v].rotation.len() {
                let (e, i) = g.vertices[v].rotation[p];
                g.edges[e][i] = EndpointRef { vertex: v, position: p };
            }
        }
        g
    }

    #[test]
    fn rho_definition_and_antisymmetry() {
        let g = strip(8, vec![[1, 1]; 8]);
        let p = EndpointRef { vertex: 0, position: 2 };
        let q = EndpointRef { vertex: 0, position: 7 };
        assert_eq!(rho(&g, 0, p, q).unwrap(), 5);
        assert_eq!(rho(&g, 0, q, p).unwrap(), 3);
        assert_eq!(rho(&g, 0, p, p).unwrap(), 0);
    }

    #[test]
    fn rho_respects_vertex_direction() {
        let g = strip(8, vec![[1, 1]; 8]);
        // On the negative vertex the reading direction is reversed.
        let p = EndpointRef { vertex: 1, position: 2 };
        let q = EndpointRef { vertex: 1, position: 7 };
        assert_eq!(rho(&g, 1, p, q).unwrap(), 3);
    }

    #[test]
    fn family_permutation_orbits() {
        // Six edges, label i at vertex 0 maps to i + 2 at vertex 1.
        let labels: Vec<[u16; 2]> = (0..6)
            .map(|i| [i as u16 + 1, (i as u16 + 2) % 6 + 1])
            .collect();
        let g = strip(6, labels);
        let phi = family_permutation(&g, &[0, 1, 2, 3, 4, 5], 6).unwrap();
        assert!(phi.is_total());
        let mut lens = phi.orbit_lengths();
        lens.sort_unstable();
        assert_eq!(lens, vec![3, 3]);
        let inv = phi.inverse();
        assert_eq!(inv.inverse().map, phi.map);
    }

    #[test]
    fn transitive_family() {
        let labels: Vec<[u16; 2]> = (0..4)
            .map(|i| [i as u16 + 1, (i as u16 + 1) % 4 + 1])
            .collect();
        let g = strip(4, labels);
        let phi = family_permutation(&g, &[0, 1, 2, 3], 4).unwrap();
        assert!(phi.is_transitive());
        assert_eq!(phi.orbit_lengths(), vec![4]);
    }

    #[test]
    fn loops_are_positive_families() {
        let mut g = strip(2, vec![[1, 1]; 2]);
        // turn edge 0 into a loop at vertex 0 manually
        g.vertices[0].rotation = vec![(0, 0), (0, 1), (1, 0)];
        g.vertices[1].rotation = vec![(1, 1)];
        for v in 0..2 {
            for p in 0..g.vertices[v].rotation.len() {
                let (e, i) = g.vertices[v].rotation[p];
                g.edges[e][i] = EndpointRef { vertex: v, position: p };
            }
        }
        assert_eq!(edge_sign(&g, 0), EdgeSign::Positive);
        assert!(family_permutation(&g, &[0], 2).is_err());
    }
}
