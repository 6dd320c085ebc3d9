//! Embedded fat-vertex graphs as rotation systems.
//!
//! A graph is stored as a list of vertices, each carrying a sign and a cyclic
//! rotation of edge ends, plus the edge list itself. Rotations are always
//! stored in the direction of the fixed global surface orientation
//! (counterclockwise). Faces, genus, parallel families and reduced graphs are
//! all derived from this data.
//!
//! Surfaces are modeled without boundary bookkeeping:
//! - the annulus is a sphere map with two marked faces (the marks may share a
//!   face); a cycle is essential exactly when it separates the marks;
//! - the torus is either cellular (some component has rotation genus 1) or a
//!   genus-0 arrangement together with a handle-face mark, in which case every
//!   cycle is inessential;
//! - the disk is a sphere map with one marked face, the outer face.
//!
//! Disconnected graphs are supported: each component is a rotation system and
//! the arrangement records which faces of different components merge into a
//! single region of the surface.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Which of an edge's two ends.
pub type EndIdx = usize;

/// A directed occurrence of an edge: the edge seen from one of its ends.
pub type Dart = (EdgeId, EndIdx);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// The surface a graph lives on. Marks are stored on the graph itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurfaceKind {
    /// Sphere map with two marked faces standing for the two annulus ends.
    AnnulusAsMarkedSphere,
    /// Torus map: cellular when some component has rotation genus 1,
    /// otherwise a genus-0 arrangement with a handle-face mark.
    Torus,
    /// Sphere map with one marked face, the outer face.
    Disk,
}

/// A slot on a fat vertex: the vertex and the position in its rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndpointRef {
    pub vertex: VertexId,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FatVertex {
    pub sign: Sign,
    /// Cyclic order of edge ends around the vertex, counterclockwise.
    pub rotation: Vec<Dart>,
}

impl FatVertex {
    pub fn valency(&self) -> usize {
        self.rotation.len()
    }
}

/// Opposite-graph vertex labels attached to the two ends of an edge,
/// 1-based. Empty when the graph is used unlabeled (oracles).
pub type EndLabels = [u16; 2];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedGraph {
    pub surface: SurfaceKind,
    pub vertices: Vec<FatVertex>,
    /// Edge ends by slot; `edges[e][i]` is where dart `(e, i)` is attached.
    pub edges: Vec<[EndpointRef; 2]>,
    /// Per-edge end labels; empty for unlabeled graphs.
    pub labels: Vec<EndLabels>,
    /// Arrangement of components on the surface: `(child_face, host_face)`
    /// pairs of local face indices meaning those two faces bound a common
    /// region. One entry per non-root component.
    pub placements: Vec<(usize, usize)>,
    /// Marked local faces: two for the annulus, one for the disk, and one
    /// (the handle face) for a genus-0 torus arrangement.
    pub marks: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("malformed rotation: {0}")]
    MalformedRotation(String),
    #[error("edge {0} is not a loop")]
    NotALoop(EdgeId),
    #[error("edge sequence is not an embedded cycle")]
    NotACycle,
    #[error("slot is not on the requested vertex")]
    SlotNotOnVertex,
    #[error("edges do not connect the same vertices")]
    EndpointsMismatch,
    #[error("family is not a negative non-loop family")]
    PositiveFamily,
    #[error("bad marks for surface: {0}")]
    BadMarks(String),
    #[error("bad placements: {0}")]
    BadPlacements(String),
}

/// One face of the rotation system, as the cyclic sequence of darts met when
/// walking its boundary. A valency-zero vertex contributes a degree-0 face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceWalk {
    pub darts: Vec<Dart>,
    /// Set for the degree-0 face around an isolated vertex.
    pub isolated: Option<VertexId>,
}

impl FaceWalk {
    pub fn degree(&self) -> usize {
        self.darts.len()
    }
    /// Edge ids on the walk, with multiplicity.
    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.darts.iter().map(|&(e, _)| e)
    }
}

/// Faces, components, genera and the merged-region structure of a graph.
#[derive(Debug, Clone)]
pub struct FaceSystem {
    pub faces: Vec<FaceWalk>,
    /// Face index flanked by each dart.
    pub face_of_dart: BTreeMap<Dart, usize>,
    pub comp_of_vertex: Vec<usize>,
    pub comp_of_face: Vec<usize>,
    pub n_components: usize,
    /// Rotation-system genus per component.
    pub genus: Vec<usize>,
    /// Region (merged-face class) id per local face.
    pub class_of_face: Vec<usize>,
    pub n_classes: usize,
    /// Marked classes, in the order of `EmbeddedGraph::marks`.
    pub mark_classes: Vec<usize>,
}

impl EmbeddedGraph {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn dart_at(&self, slot: EndpointRef) -> Dart {
        self.vertices[slot.vertex].rotation[slot.position]
    }

    pub fn end_of(&self, d: Dart) -> EndpointRef {
        self.edges[d.0][d.1]
    }

    pub fn other_end(&self, d: Dart) -> EndpointRef {
        self.edges[d.0][1 - d.1]
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        self.edges[e][0].vertex == self.edges[e][1].vertex
    }

    /// Endpoint vertices of an edge.
    pub fn edge_vertices(&self, e: EdgeId) -> (VertexId, VertexId) {
        (self.edges[e][0].vertex, self.edges[e][1].vertex)
    }

    pub fn label_of_end(&self, e: EdgeId, i: EndIdx) -> u16 {
        self.labels[e][i]
    }

    /// Check that rotations and edge ends cross-reference exactly.
    pub fn validate_structure(&self) -> Result<(), MapError> {
        let mut seen: BTreeSet<Dart> = BTreeSet::new();
        for (v, fv) in self.vertices.iter().enumerate() {
            for (p, &d) in fv.rotation.iter().enumerate() {
                if d.0 >= self.edges.len() || d.1 > 1 {
                    return Err(MapError::MalformedRotation(format!(
                        "vertex {v} slot {p} references missing dart {d:?}"
                    )));
                }
                if self.edges[d.0][d.1] != (EndpointRef { vertex: v, position: p }) {
                    return Err(MapError::MalformedRotation(format!(
                        "vertex {v} slot {p} and edge table disagree on {d:?}"
                    )));
                }
                if !seen.insert(d) {
                    return Err(MapError::MalformedRotation(format!(
                        "dart {d:?} occupies two slots"
                    )));
                }
            }
        }
        if seen.len() != 2 * self.edges.len() {
            return Err(MapError::MalformedRotation(format!(
                "{} dart slots for {} edges",
                seen.len(),
                self.edges.len()
            )));
        }
        if !self.labels.is_empty() && self.labels.len() != self.edges.len() {
            return Err(MapError::MalformedRotation(
                "label table length differs from edge count".into(),
            ));
        }
        Ok(())
    }

    /// Trace all faces of the rotation system and assemble the region
    /// structure from the placements and marks.
    pub fn face_system(&self) -> Result<FaceSystem, MapError> {
        self.validate_structure()?;
        let (faces, face_of_dart) = trace_faces_raw(self);
        let comp_of_vertex = components(self);
        let n_components = comp_of_vertex.iter().copied().max().map_or(0, |m| m + 1);
        let mut comp_of_face = Vec::with_capacity(faces.len());
        for f in &faces {
            let c = match f.isolated {
                Some(v) => comp_of_vertex[v],
                None => comp_of_vertex[self.end_of(f.darts[0]).vertex],
            };
            comp_of_face.push(c);
        }
        // Euler characteristic per component.
        let mut v_cnt = vec![0isize; n_components];
        let mut e_cnt = vec![0isize; n_components];
        let mut f_cnt = vec![0isize; n_components];
        for (v, &c) in comp_of_vertex.iter().enumerate() {
            let _ = v;
            v_cnt[c] += 1;
        }
        for e in 0..self.n_edges() {
            e_cnt[comp_of_vertex[self.edges[e][0].vertex]] += 1;
        }
        for (f, &c) in comp_of_face.iter().enumerate() {
            let _ = f;
            f_cnt[c] += 1;
        }
        let mut genus = Vec::with_capacity(n_components);
        for c in 0..n_components {
            let chi = v_cnt[c] - e_cnt[c] + f_cnt[c];
            if chi > 2 || chi % 2 != 0 {
                return Err(MapError::MalformedRotation(format!(
                    "component {c} has Euler characteristic {chi}"
                )));
            }
            genus.push(((2 - chi) / 2) as usize);
        }

        // Merge faces into regions according to the placements.
        let mut uf = UnionFind::new(faces.len());
        if !self.placements.is_empty() {
            self.validate_placements(&faces, &comp_of_face)?;
            for &(child, host) in &self.placements {
                uf.union(child, host);
            }
        } else if n_components > 1 {
            return Err(MapError::BadPlacements(
                "multiple components but no placements".into(),
            ));
        }
        let (class_of_face, n_classes) = uf.classes();

        let mark_classes: Vec<usize> = self
            .marks
            .iter()
            .map(|&f| {
                if f >= faces.len() {
                    Err(MapError::BadMarks(format!("mark face {f} out of range")))
                } else {
                    Ok(class_of_face[f])
                }
            })
            .collect::<Result<_, _>>()?;

        let sys = FaceSystem {
            faces,
            face_of_dart,
            comp_of_vertex,
            comp_of_face,
            n_components,
            genus,
            class_of_face,
            n_classes,
            mark_classes,
        };
        self.validate_surface(&sys)?;
        Ok(sys)
    }

    fn validate_placements(
        &self,
        faces: &[FaceWalk],
        comp_of_face: &[usize],
    ) -> Result<(), MapError> {
        let n_components = comp_of_face.iter().copied().max().map_or(0, |m| m + 1);
        if self.placements.len() != n_components.saturating_sub(1) {
            return Err(MapError::BadPlacements(format!(
                "{} placements for {} components",
                self.placements.len(),
                n_components
            )));
        }
        // The child components must form a tree rooted at component 0.
        let mut parent = vec![usize::MAX; n_components];
        for &(child, host) in &self.placements {
            if child >= faces.len() || host >= faces.len() {
                return Err(MapError::BadPlacements("face index out of range".into()));
            }
            let cc = comp_of_face[child];
            let hc = comp_of_face[host];
            if cc == hc {
                return Err(MapError::BadPlacements(
                    "placement links a component to itself".into(),
                ));
            }
            if parent[cc] != usize::MAX {
                return Err(MapError::BadPlacements(format!(
                    "component {cc} placed twice"
                )));
            }
            parent[cc] = hc;
        }
        if parent[0] != usize::MAX {
            return Err(MapError::BadPlacements("root component is placed".into()));
        }
        for c in 1..n_components {
            // walk to the root, detecting cycles
            let (mut cur, mut steps) = (c, 0);
            while cur != 0 {
                if parent[cur] == usize::MAX || steps > n_components {
                    return Err(MapError::BadPlacements(format!(
                        "component {c} is not anchored to the root"
                    )));
                }
                cur = parent[cur];
                steps += 1;
            }
        }
        Ok(())
    }

    fn validate_surface(&self, sys: &FaceSystem) -> Result<(), MapError> {
        let total_genus: usize = sys.genus.iter().sum();
        match self.surface {
            SurfaceKind::AnnulusAsMarkedSphere => {
                if total_genus != 0 {
                    return Err(MapError::BadMarks(
                        "annulus graph has a positive-genus component".into(),
                    ));
                }
                if self.marks.len() != 2 {
                    return Err(MapError::BadMarks(format!(
                        "annulus needs exactly 2 marks, found {}",
                        self.marks.len()
                    )));
                }
            }
            SurfaceKind::Disk => {
                if total_genus != 0 {
                    return Err(MapError::BadMarks(
                        "disk graph has a positive-genus component".into(),
                    ));
                }
                if self.marks.len() != 1 {
                    return Err(MapError::BadMarks(format!(
                        "disk needs exactly 1 mark, found {}",
                        self.marks.len()
                    )));
                }
            }
            SurfaceKind::Torus => {
                if total_genus > 1 {
                    return Err(MapError::BadMarks("total genus exceeds 1".into()));
                }
                let want_mark = total_genus == 0;
                if want_mark && self.marks.len() != 1 {
                    return Err(MapError::BadMarks(
                        "genus-0 torus arrangement needs a handle-face mark".into(),
                    ));
                }
                if !want_mark && !self.marks.is_empty() {
                    return Err(MapError::BadMarks(
                        "cellular torus map must not carry marks".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Mirror image: all rotations reversed, all signs flipped, marks and
    /// placements carried over to the corresponding regions.
    pub fn reflected(&self) -> EmbeddedGraph {
        let mut g = self.clone();
        for fv in &mut g.vertices {
            fv.rotation.reverse();
            fv.sign = fv.sign.flip();
        }
        let n = g.vertices.len();
        for v in 0..n {
            let val = g.vertices[v].rotation.len();
            for p in 0..val {
                let d = g.vertices[v].rotation[p];
                g.edges[d.0][d.1] = EndpointRef { vertex: v, position: p };
            }
        }
        // Remap face references. The region flanked by a dart in the mirror
        // is the region flanked by the edge's other dart in the original.
        let (_, old_fod) = trace_faces_raw(self);
        let (new_faces, new_fod) = trace_faces_raw(&g);
        let old_faces = trace_faces_raw(self).0;
        let map_face = |f: usize| -> usize {
            let fw = &old_faces[f];
            match fw.isolated {
                Some(v) => new_faces
                    .iter()
                    .position(|nf| nf.isolated == Some(v))
                    .expect("isolated face survives reflection"),
                None => {
                    let (e, i) = fw.darts[0];
                    new_fod[&(e, 1 - i)]
                }
            }
        };
        let _ = &old_fod;
        g.marks = g.marks.iter().map(|&f| map_face(f)).collect();
        g.placements = g
            .placements
            .iter()
            .map(|&(c, h)| (map_face(c), map_face(h)))
            .collect();
        g
    }
}

/// Trace every face of the rotation system, in deterministic order: walks
/// are started from the smallest unvisited dart, and degree-0 faces of
/// isolated vertices come last in vertex order.
fn trace_faces_raw(g: &EmbeddedGraph) -> (Vec<FaceWalk>, BTreeMap<Dart, usize>) {
    let mut faces = Vec::new();
    let mut face_of_dart: BTreeMap<Dart, usize> = BTreeMap::new();
    for e in 0..g.n_edges() {
        for i in 0..2 {
            let start: Dart = (e, i);
            if face_of_dart.contains_key(&start) {
                continue;
            }
            let idx = faces.len();
            let mut walk = Vec::new();
            let mut d = start;
            loop {
                face_of_dart.insert(d, idx);
                walk.push(d);
                let far = g.other_end(d);
                let val = g.vertices[far.vertex].valency();
                let next_slot = (far.position + 1) % val;
                d = g.vertices[far.vertex].rotation[next_slot];
                if d == start {
                    break;
                }
            }
            faces.push(FaceWalk { darts: walk, isolated: None });
        }
    }
    for (v, fv) in g.vertices.iter().enumerate() {
        if fv.rotation.is_empty() {
            faces.push(FaceWalk { darts: Vec::new(), isolated: Some(v) });
        }
    }
    (faces, face_of_dart)
}

/// Public face tracing per the spec'd operation: all faces, with the sum of
/// degrees equal to twice the edge count.
pub fn trace_faces(g: &EmbeddedGraph) -> Result<Vec<FaceWalk>, MapError> {
    g.validate_structure()?;
    Ok(trace_faces_raw(g).0)
}

fn components(g: &EmbeddedGraph) -> Vec<usize> {
    let n = g.n_vertices();
    let mut uf = UnionFind::new(n);
    for e in 0..g.n_edges() {
        uf.union(g.edges[e][0].vertex, g.edges[e][1].vertex);
    }
    // Renumber so components are ordered by smallest vertex.
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        let r = uf.find(v);
        if comp[r] == usize::MAX {
            comp[r] = next;
            next += 1;
        }
    }
    (0..n).map(|v| comp[uf.find(v)]).collect()
}

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != c {
            let nxt = self.parent[c];
            self.parent[c] = r;
            c = nxt;
        }
        r
    }
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
    /// Class id per element, numbered by smallest member, plus class count.
    pub fn classes(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut id = vec![usize::MAX; n];
        let mut next = 0;
        let mut out = vec![0; n];
        for x in 0..n {
            let r = self.find(x);
            if id[r] == usize::MAX {
                id[r] = next;
                next += 1;
            }
            out[x] = id[r];
        }
        (out, next)
    }
}

impl FaceSystem {
    /// Face classes that are honest disk faces: a single unmarked local face.
    pub fn is_disk_class(&self, class: usize) -> bool {
        let members = self
            .class_of_face
            .iter()
            .filter(|&&c| c == class)
            .count();
        members == 1 && !self.mark_classes.contains(&class)
    }

    pub fn class_of_dart(&self, d: Dart) -> usize {
        self.class_of_face[self.face_of_dart[&d]]
    }

    /// The local faces in each class.
    pub fn class_members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_classes];
        for (f, &c) in self.class_of_face.iter().enumerate() {
            out[c].push(f);
        }
        out
    }
}

/// Sides of an embedded cycle: region classes reachable from each flank
/// without crossing the cycle. Returns `None` when the cycle does not
/// separate the surface.
pub fn cycle_sides(
    g: &EmbeddedGraph,
    sys: &FaceSystem,
    cycle: &[EdgeId],
) -> Option<(BTreeSet<usize>, BTreeSet<usize>)> {
    let in_cycle: BTreeSet<EdgeId> = cycle.iter().copied().collect();
    // Region adjacency across non-cycle edges.
    let mut uf = UnionFind::new(sys.n_classes);
    for e in 0..g.n_edges() {
        if in_cycle.contains(&e) {
            continue;
        }
        let c0 = sys.class_of_dart((e, 0));
        let c1 = sys.class_of_dart((e, 1));
        uf.union(c0, c1);
    }
    let e0 = cycle[0];
    let side_a = uf.find(sys.class_of_dart((e0, 0)));
    let side_b = uf.find(sys.class_of_dart((e0, 1)));
    if side_a == side_b {
        return None;
    }
    let mut sa = BTreeSet::new();
    let mut sb = BTreeSet::new();
    for cls in 0..sys.n_classes {
        let r = uf.find(cls);
        if r == side_a {
            sa.insert(cls);
        } else if r == side_b {
            sb.insert(cls);
        } else {
            // A region not touching the cycle joins whichever side it is
            // merged with; with a single separating cycle every region root
            // is one of the two sides, so this cannot happen.
            unreachable!("region disconnected from cycle sides");
        }
    }
    Some((sa, sb))
}

/// Euler characteristic of the closed region formed by one side of an
/// embedded cycle. The boundary circle itself contributes zero.
pub fn side_euler(
    g: &EmbeddedGraph,
    sys: &FaceSystem,
    cycle: &[EdgeId],
    side: &BTreeSet<usize>,
) -> isize {
    let in_cycle: BTreeSet<EdgeId> = cycle.iter().copied().collect();
    let cycle_vertices: BTreeSet<VertexId> = cycle
        .iter()
        .flat_map(|&e| [g.edges[e][0].vertex, g.edges[e][1].vertex])
        .collect();
    let mut e_int = 0isize;
    for e in 0..g.n_edges() {
        if in_cycle.contains(&e) {
            continue;
        }
        if side.contains(&sys.class_of_dart((e, 0))) {
            e_int += 1;
        }
    }
    let mut v_int = 0isize;
    for v in 0..g.n_vertices() {
        if cycle_vertices.contains(&v) {
            continue;
        }
        let inside = if g.vertices[v].valency() > 0 {
            let d = g.vertices[v].rotation[0];
            side.contains(&sys.class_of_dart(d))
        } else {
            let f = sys
                .faces
                .iter()
                .position(|fw| fw.isolated == Some(v))
                .expect("isolated face");
            side.contains(&sys.class_of_face[f])
        };
        if inside {
            v_int += 1;
        }
    }
    let f_in: isize = (0..sys.faces.len())
        .filter(|&f| side.contains(&sys.class_of_face[f]))
        .count() as isize;
    v_int - e_int + f_in
}

/// Does this side contain any mark (annulus end, disk boundary or torus
/// handle)?
pub fn side_has_mark(sys: &FaceSystem, side: &BTreeSet<usize>) -> bool {
    sys.mark_classes.iter().any(|c| side.contains(c))
}

/// A loop is trivial when one of its sides is a disk region of the surface:
/// the side separates, has Euler characteristic 1, and carries no mark.
pub fn is_trivial_loop(
    g: &EmbeddedGraph,
    sys: &FaceSystem,
    e: EdgeId,
) -> Result<bool, MapError> {
    if !g.is_loop(e) {
        return Err(MapError::NotALoop(e));
    }
    match cycle_sides(g, sys, &[e]) {
        None => Ok(false),
        Some((sa, sb)) => {
            for side in [&sa, &sb] {
                if !side_has_mark(sys, side) && side_euler(g, sys, &[e], side) == 1 {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// Validate that an edge sequence is a closed embedded cycle (distinct
/// vertices; a single loop counts) and return the vertex sequence.
pub fn check_cycle(g: &EmbeddedGraph, cycle: &[EdgeId]) -> Result<Vec<VertexId>, MapError> {
    if cycle.is_empty() {
        return Err(MapError::NotACycle);
    }
    if cycle.len() == 1 {
        if g.is_loop(cycle[0]) {
            return Ok(vec![g.edges[cycle[0]][0].vertex]);
        }
        return Err(MapError::NotACycle);
    }
    let mut distinct: BTreeSet<EdgeId> = BTreeSet::new();
    for &e in cycle {
        if !distinct.insert(e) || g.is_loop(e) {
            return Err(MapError::NotACycle);
        }
    }
    // Chain the edges: consecutive edges share exactly one vertex.
    let (mut vs, first) = {
        let (a, b) = g.edge_vertices(cycle[0]);
        let (c, d) = g.edge_vertices(cycle[1]);
        let shared = if a == c || a == d { a } else { b };
        if !(shared == c || shared == d) {
            return Err(MapError::NotACycle);
        }
        let start = if shared == a { b } else { a };
        (vec![start, shared], start)
    };
    for k in 1..cycle.len() {
        let cur = *vs.last().unwrap();
        let (a, b) = g.edge_vertices(cycle[k]);
        let nxt = if a == cur {
            b
        } else if b == cur {
            a
        } else {
            return Err(MapError::NotACycle);
        };
        if k + 1 == cycle.len() {
            if nxt != first {
                return Err(MapError::NotACycle);
            }
        } else {
            vs.push(nxt);
        }
    }
    let set: BTreeSet<VertexId> = vs.iter().copied().collect();
    if set.len() != cycle.len() {
        return Err(MapError::NotACycle);
    }
    Ok(vs)
}

/// Is an embedded cycle essential on its surface?
///
/// Annulus: essential iff the cycle separates the two marks. Cellular torus:
/// essential iff the mod-2 homology class, computed from a spanning-tree and
/// face-relation presentation of the carrying component, is nonzero (embedded
/// curves on a torus are essential exactly when non-separating, and both
/// tests agree there). Genus-0 torus arrangements and disks: never.
pub fn is_essential_cycle(
    g: &EmbeddedGraph,
    sys: &FaceSystem,
    cycle: &[EdgeId],
) -> Result<bool, MapError> {
    check_cycle(g, cycle)?;
    match g.surface {
        SurfaceKind::Disk => Ok(false),
        SurfaceKind::AnnulusAsMarkedSphere => match cycle_sides(g, sys, cycle) {
            None => Err(MapError::NotACycle),
            Some((sa, _sb)) => {
                let m0 = sys.mark_classes[0];
                let m1 = sys.mark_classes[1];
                Ok(sa.contains(&m0) != sa.contains(&m1))
            }
        },
        SurfaceKind::Torus => {
            let comp = sys.comp_of_vertex[g.edges[cycle[0]][0].vertex];
            if sys.genus[comp] != 1 {
                return Ok(false);
            }
            Ok(!torus_class_trivial(g, sys, comp, cycle))
        }
    }
}

/// Mod-2 homology test on the genus-1 component: express cycles in chord
/// coordinates over a spanning tree and reduce against the face relations.
fn torus_class_trivial(
    g: &EmbeddedGraph,
    sys: &FaceSystem,
    comp: usize,
    cycle: &[EdgeId],
) -> bool {
    // Spanning tree of the component by BFS over edges.
    let mut in_tree = vec![false; g.n_edges()];
    let mut visited = vec![false; g.n_vertices()];
    let root = (0..g.n_vertices())
        .find(|&v| sys.comp_of_vertex[v] == comp)
        .expect("component has a vertex");
    visited[root] = true;
    let mut queue = std::collections::VecDeque::from([root]);
    // adjacency
    let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); g.n_vertices()];
    for e in 0..g.n_edges() {
        let (a, b) = g.edge_vertices(e);
        adj[a].push((b, e));
        if a != b {
            adj[b].push((a, e));
        }
    }
    while let Some(v) = queue.pop_front() {
        for &(w, e) in &adj[v] {
            if !visited[w] {
                visited[w] = true;
                in_tree[e] = true;
                queue.push_back(w);
            }
        }
    }
    let chords: Vec<EdgeId> = (0..g.n_edges())
        .filter(|&e| !in_tree[e] && sys.comp_of_vertex[g.edges[e][0].vertex] == comp)
        .collect();
    assert!(chords.len() <= 64, "chord count exceeds bit width");
    let chord_idx: BTreeMap<EdgeId, usize> =
        chords.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let vec_of = |edges: &mut dyn Iterator<Item = EdgeId>| -> u64 {
        let mut x = 0u64;
        for e in edges {
            if let Some(&i) = chord_idx.get(&e) {
                x ^= 1 << i;
            }
        }
        x
    };
    // Face relations, Gauss-reduced over GF(2).
    let mut basis: Vec<u64> = Vec::new();
    let mut reduce = |mut x: u64, basis: &Vec<u64>| -> u64 {
        for &b in basis {
            let hb = 63 - b.leading_zeros();
            if x >> hb & 1 == 1 {
                x ^= b;
            }
        }
        x
    };
    for (f, fw) in sys.faces.iter().enumerate() {
        if sys.comp_of_face[f] != comp || fw.darts.is_empty() {
            continue;
        }
        let x = reduce(vec_of(&mut fw.edge_ids()), &basis);
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let c = reduce(vec_of(&mut cycle.iter().copied()), &basis);
    c == 0
}

/// A maximal fan of mutually parallel edges: consecutive members cobound
/// unmarked bigon faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelClass {
    /// Edges in fan order.
    pub edges: Vec<EdgeId>,
    /// Fan order is cyclic when every gap is a bigon (only possible when the
    /// component is exactly this fan and nothing is marked inside).
    pub cyclic: bool,
}

impl ParallelClass {
    pub fn multiplicity(&self) -> usize {
        self.edges.len()
    }
}

/// Group edges into maximal parallel fans. A bigon here is a region that is a
/// single unmarked local face of degree 2 with two distinct edges.
pub fn parallel_classes(g: &EmbeddedGraph, sys: &FaceSystem) -> Vec<ParallelClass> {
    let mut adj: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
    for (f, fw) in sys.faces.iter().enumerate() {
        if fw.degree() != 2 {
            continue;
        }
        let cls = sys.class_of_face[f];
        if !sys.is_disk_class(cls) {
            continue;
        }
        let (e1, e2) = (fw.darts[0].0, fw.darts[1].0);
        if e1 == e2 {
            continue;
        }
        adj.entry(e1).or_default().push(e2);
        adj.entry(e2).or_default().push(e1);
    }
    let mut uf = UnionFind::new(g.n_edges());
    for (&e, ns) in &adj {
        for &f in ns {
            uf.union(e, f);
        }
    }
    let (cls_of, n_cls) = uf.classes();
    let mut groups: Vec<Vec<EdgeId>> = vec![Vec::new(); n_cls];
    for e in 0..g.n_edges() {
        groups[cls_of[e]].push(e);
    }
    let mut out = Vec::new();
    for group in groups {
        if group.len() == 1 {
            out.push(ParallelClass { edges: group, cyclic: false });
            continue;
        }
        // Chain the fan from bigon adjacency; it is a path or a cycle.
        let deg = |e: EdgeId| adj.get(&e).map_or(0, |v| v.len());
        let cyclic = group.iter().all(|&e| deg(e) == 2);
        let start = if cyclic {
            *group.iter().min().unwrap()
        } else {
            *group.iter().filter(|&&e| deg(e) == 1).min().unwrap()
        };
        let mut order = vec![start];
        let mut prev = None;
        loop {
            let cur = *order.last().unwrap();
            let nxt = adj[&cur]
                .iter()
                .copied()
                .find(|&x| Some(x) != prev && (order.len() == 1 || x != order[0]) && !order[1..].contains(&x));
            match nxt {
                Some(x) => {
                    prev = Some(cur);
                    order.push(x);
                    if order.len() == group.len() {
                        break;
                    }
                }
                None => break,
            }
        }
        debug_assert_eq!(order.len(), group.len(), "fan chain covers its class");
        out.push(ParallelClass { edges: order, cyclic });
    }
    out.sort_by_key(|c| c.edges[0]);
    out
}

/// A graph together with the parallel-family structure collapsed: one edge
/// per family, remembering multiplicities and members.
#[derive(Debug, Clone)]
pub struct ReducedGraph {
    pub graph: EmbeddedGraph,
    /// Multiplicity of each reduced edge (indexed like `graph.edges`).
    pub multiplicity: Vec<usize>,
    /// Original edge ids per reduced edge, in fan order.
    pub members: Vec<Vec<EdgeId>>,
}

/// Collapse every parallel family to a single edge. The representative of a
/// family is its first edge in fan order; rotations keep the representative
/// slots in place and drop the rest, and marks move to the region that
/// absorbs their old face.
pub fn reduce(g: &EmbeddedGraph, sys: &FaceSystem) -> Result<ReducedGraph, MapError> {
    let classes = parallel_classes(g, sys);
    let mut keep = vec![false; g.n_edges()];
    for c in &classes {
        keep[c.edges[0]] = true;
    }
    let (rg, face_map) = induced_subgraph(g, sys, &keep)?;
    let mut multiplicity = Vec::new();
    let mut members = Vec::new();
    // The induced graph renumbers kept edges in increasing original id; the
    // classes are sorted by their representative, so order them the same way.
    let mut cls_sorted = classes;
    cls_sorted.sort_by_key(|c| c.edges[0]);
    for c in cls_sorted {
        multiplicity.push(c.edges.len());
        members.push(c.edges.clone());
    }
    let _ = face_map;
    Ok(ReducedGraph { graph: rg, multiplicity, members })
}

/// Build the embedded subgraph on the kept edges. All vertices are kept.
/// Returns the new graph and the map from old region classes to new ones.
pub fn induced_subgraph(
    g: &EmbeddedGraph,
    sys: &FaceSystem,
    keep: &[bool],
) -> Result<(EmbeddedGraph, Vec<usize>), MapError> {
    let mut new_id = vec![usize::MAX; g.n_edges()];
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    for e in 0..g.n_edges() {
        if keep[e] {
            new_id[e] = edges.len();
            edges.push(g.edges[e]);
            if !g.labels.is_empty() {
                labels.push(g.labels[e]);
            }
        }
    }
    let mut vertices = Vec::with_capacity(g.n_vertices());
    for fv in &g.vertices {
        let rotation: Vec<Dart> = fv
            .rotation
            .iter()
            .filter(|&&(e, _)| keep[e])
            .map(|&(e, i)| (new_id[e], i))
            .collect();
        vertices.push(FatVertex { sign: fv.sign, rotation });
    }
    // Fix up slot positions.
    for (v, fv) in vertices.iter().enumerate() {
        for (p, &(e, i)) in fv.rotation.iter().enumerate() {
            edges[e][i] = EndpointRef { vertex: v, position: p };
        }
    }
    let mut sub = EmbeddedGraph {
        surface: g.surface,
        vertices,
        edges,
        labels,
        placements: Vec::new(),
        marks: Vec::new(),
    };
    // Regions of the subgraph: old regions merge across removed edges.
    let mut uf = UnionFind::new(sys.n_classes);
    for e in 0..g.n_edges() {
        if !keep[e] {
            uf.union(sys.class_of_dart((e, 0)), sys.class_of_dart((e, 1)));
        }
    }
    let (old_region_group, _) = uf.classes();

    // New local faces, and for each the old region group it belongs to.
    let (new_faces, new_fod) = trace_faces_raw(&sub);
    let group_of_new_face = |f: &FaceWalk| -> usize {
        match f.isolated {
            Some(v) => {
                // Any old face incident to v sits in the right group.
                let old_f = if g.vertices[v].valency() > 0 {
                    sys.face_of_dart[&g.vertices[v].rotation[0]]
                } else {
                    sys.faces
                        .iter()
                        .position(|fw| fw.isolated == Some(v))
                        .expect("isolated face")
                };
                old_region_group[sys.class_of_face[old_f]]
            }
            None => {
                let (e, i) = f.darts[0];
                // Map back to the old edge id.
                let old_e = new_id
                    .iter()
                    .position(|&x| x == e)
                    .expect("kept edge has an old id");
                old_region_group[sys.class_of_dart((old_e, i))]
            }
        }
    };
    let face_groups: Vec<usize> = new_faces.iter().map(group_of_new_face).collect();

    // Same group = same region: synthesize placements if multiple faces (from
    // different components) share a group, and route the marks.
    let comp_of_vertex = components(&sub);
    let n_comp = comp_of_vertex.iter().copied().max().map_or(0, |m| m + 1);
    if n_comp > 1 {
        let comp_of_new_face = |fw: &FaceWalk| -> usize {
            match fw.isolated {
                Some(v) => comp_of_vertex[v],
                None => comp_of_vertex[sub.edges[fw.darts[0].0][fw.darts[0].1].vertex],
            }
        };
        // Link components through shared groups with a BFS from component 0.
        let mut group_faces: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (f, &grp) in face_groups.iter().enumerate() {
            group_faces.entry(grp).or_default().push(f);
        }
        let mut placed = vec![false; n_comp];
        placed[0] = true;
        let mut frontier = vec![0usize];
        while let Some(c) = frontier.pop() {
            for (f, fw) in new_faces.iter().enumerate() {
                if comp_of_new_face(fw) != c {
                    continue;
                }
                for &f2 in &group_faces[&face_groups[f]] {
                    let c2 = comp_of_new_face(&new_faces[f2]);
                    if !placed[c2] {
                        placed[c2] = true;
                        sub.placements.push((f2, f));
                        frontier.push(c2);
                    }
                }
            }
        }
        if placed.iter().any(|&p| !p) {
            return Err(MapError::BadPlacements(
                "subgraph regions do not connect the components".into(),
            ));
        }
    }
    // Marks: place each old mark in the new face of its region group.
    for &old_f in &g.marks {
        let grp = old_region_group[sys.class_of_face[old_f]];
        let f_new = face_groups
            .iter()
            .position(|&x| x == grp)
            .expect("old marked region survives");
        sub.marks.push(f_new);
    }
    let _ = new_fod;
    // Old region class -> new region class map.
    let sub_sys = sub.face_system()?;
    let mut region_map = vec![usize::MAX; sys.n_classes];
    for (old_cls, slot) in region_map.iter_mut().enumerate() {
        let grp = old_region_group[old_cls];
        let f_new = face_groups.iter().position(|&x| x == grp).unwrap();
        *slot = sub_sys.class_of_face[f_new];
    }
    Ok((sub, region_map))
}

/// A report entry from the reduced-graph bound check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundViolation {
    pub rule: &'static str,
    pub detail: String,
}

/// Check the Euler-count bounds on a reduced graph: an annulus graph has at
/// most `3V - 2` edges and a vertex of valency at most 5; a torus graph has
/// at most `3V` edges.
pub fn check_reduced_bounds(r: &ReducedGraph) -> Vec<BoundViolation> {
    let g = &r.graph;
    let v = g.n_vertices();
    let e = g.n_edges();
    let mut out = Vec::new();
    match g.surface {
        SurfaceKind::AnnulusAsMarkedSphere | SurfaceKind::Disk => {
            if v >= 1 && e > 3 * v - 2 {
                out.push(BoundViolation {
                    rule: "annulus-edges",
                    detail: format!("E = {e} exceeds 3V - 2 = {}", 3 * v - 2),
                });
            }
            if v >= 1 && g.vertices.iter().all(|fv| fv.valency() > 5) {
                out.push(BoundViolation {
                    rule: "annulus-valency",
                    detail: "no vertex of valency at most 5".into(),
                });
            }
        }
        SurfaceKind::Torus => {
            if e > 3 * v {
                out.push(BoundViolation {
                    rule: "torus-edges",
                    detail: format!("E = {e} exceeds 3V = {}", 3 * v),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn sphere_single_vertex() -> EmbeddedGraph {
        EmbeddedGraph {
            surface: SurfaceKind::Disk,
            vertices: vec![FatVertex { sign: Sign::Plus, rotation: vec![] }],
            edges: vec![],
            labels: vec![],
            placements: vec![],
            marks: vec![0],
        }
    }

    /// Torus map with 2 vertices and 4 mutually nonparallel edges.
    pub fn torus_two_vertices_four_edges() -> EmbeddedGraph {
        let rot = |v: usize| -> Vec<Dart> { (0..4).map(|e| (e, v)).collect() };
        let mut g = EmbeddedGraph {
            surface: SurfaceKind::Torus,
            vertices: vec![
                FatVertex { sign: Sign::Plus, rotation: rot(0) },
                FatVertex { sign: Sign::Minus, rotation: rot(1) },
            ],
            edges: vec![[EndpointRef { vertex: 0, position: 0 }; 2]; 4],
            labels: vec![],
            placements: vec![],
            marks: vec![],
        };
        for v in 0..2 {
            for p in 0..4 {
                let (e, i) = g.vertices[v].rotation[p];
                g.edges[e][i] = EndpointRef { vertex: v, position: p };
            }
        }
        g
    }

    #[test]
    fn single_vertex_sphere_has_one_degree_zero_face() {
        let g = sphere_single_vertex();
        let faces = trace_faces(&g).unwrap();
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].degree(), 0);
        let sys = g.face_system().unwrap();
        assert_eq!(sys.genus, vec![0]);
    }

    #[test]
    fn torus_v2_e4_has_two_faces_genus_one() {
        let g = torus_two_vertices_four_edges();
        let faces = trace_faces(&g).unwrap();
        assert_eq!(faces.len(), 2);
        assert!(faces.iter().all(|f| f.degree() == 4));
        let sys = g.face_system().unwrap();
        assert_eq!(sys.genus, vec![1]);
        // No bigons, so reduction is the identity.
        let classes = parallel_classes(&g, &sys);
        assert_eq!(classes.len(), 4);
        assert!(classes.iter().all(|c| c.multiplicity() == 1));
    }

    #[test]
    fn face_degrees_sum_to_twice_edges() {
        let g = torus_two_vertices_four_edges();
        let faces = trace_faces(&g).unwrap();
        let total: usize = faces.iter().map(|f| f.degree()).sum();
        assert_eq!(total, 2 * g.n_edges());
    }

    #[test]
    fn malformed_rotation_is_reported() {
        let mut g = torus_two_vertices_four_edges();
        g.vertices[0].rotation[0] = (0, 1); // duplicate dart
        assert!(matches!(
            g.face_system(),
            Err(MapError::MalformedRotation(_))
        ));
    }

    #[test]
    fn essential_cycle_on_torus() {
        let g = torus_two_vertices_four_edges();
        let sys = g.face_system().unwrap();
        // Any two of the four edges form an embedded cycle; all essential.
        for a in 0..4 {
            for b in (a + 1)..4 {
                assert!(is_essential_cycle(&g, &sys, &[a, b]).unwrap());
            }
        }
    }

    #[test]
    fn reflection_preserves_face_count() {
        let g = torus_two_vertices_four_edges();
        let r = g.reflected();
        r.validate_structure().unwrap();
        assert_eq!(
            trace_faces(&g).unwrap().len(),
            trace_faces(&r).unwrap().len()
        );
    }
}
