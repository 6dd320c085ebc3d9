//! Canonical codes for embedded graphs and graph pairs.
//!
//! Two codes are produced:
//!
//! - [`graph_code`] treats vertices as anonymous and quotients by
//!   orientation-preserving map isomorphism (rooted breadth-first codes
//!   minimized over all root darts), plus optional reflection. Used to
//!   deduplicate oracle enumerations.
//! - [`pair_code`] keeps vertex indices, quotienting only by simultaneous
//!   cyclic re-indexing of each side (which rotates the other side's
//!   labels), by representation freedom (rotation starting points, edge ids,
//!   end order), and optionally by reflection. Used to deduplicate census
//!   survivors.
//!
//! Reflection reverses every rotation, flips every vertex sign and negates
//! the pair's sense; this matches reading the same surfaces with the
//! opposite global orientation.

use crate::maps::{Dart, EmbeddedGraph, FaceSystem};
use crate::pairing::GraphPair;
use std::collections::BTreeMap;

type Tok = i64;

const SEP: Tok = -1;

/// Canonical code for a standalone embedded graph, up to map isomorphism
/// (and reflection when allowed). Marks and merged regions are part of the
/// code; labels, when present, are carried along and must match.
pub fn graph_code(g: &EmbeddedGraph, allow_reflection: bool) -> String {
    let mut best = graph_code_tokens(g);
    if allow_reflection {
        let r = graph_code_tokens(&g.reflected());
        if r < best {
            best = r;
        }
    }
    fmt_tokens(&best)
}

fn fmt_tokens(t: &[Tok]) -> String {
    let mut s = String::with_capacity(t.len() * 3);
    for (k, x) in t.iter().enumerate() {
        if k > 0 {
            s.push('.');
        }
        if *x == SEP {
            s.push('/');
        } else {
            s.push_str(&x.to_string());
        }
    }
    s
}

fn graph_code_tokens(g: &EmbeddedGraph) -> Vec<Tok> {
    let sys = g.face_system().expect("canonical code needs a well-formed graph");
    let n_comp = sys.n_components;
    // Candidate root darts per component (an isolated vertex has none).
    let mut comp_darts: Vec<Vec<Dart>> = vec![Vec::new(); n_comp];
    for e in 0..g.n_edges() {
        for i in 0..2 {
            comp_darts[sys.comp_of_vertex[g.edges[e][i].vertex]].push((e, i));
        }
    }
    let mut per_comp: Vec<(Vec<Tok>, Vec<RootedLabels>)> = Vec::new();
    for c in 0..n_comp {
        if comp_darts[c].is_empty() {
            let v = (0..g.n_vertices())
                .find(|&v| sys.comp_of_vertex[v] == c)
                .unwrap();
            let toks = vec![sign_tok(g, v), 0];
            per_comp.push((
                toks,
                vec![RootedLabels { vertex_order: vec![v], face_order: isolated_face_order(&sys, v) }],
            ));
            continue;
        }
        let mut best: Option<Vec<Tok>> = None;
        let mut roots: Vec<RootedLabels> = Vec::new();
        for &d in &comp_darts[c] {
            let (toks, lab) = rooted_component_code(g, &sys, d);
            match &best {
                Some(b) if toks > *b => {}
                Some(b) if toks == *b => roots.push(lab),
                _ => {
                    best = Some(toks);
                    roots = vec![lab];
                }
            }
        }
        per_comp.push((best.unwrap(), roots));
    }
    // Order components by code; break remaining ties by trying all orders
    // and all tied roots against the arrangement tokens.
    let mut order: Vec<usize> = (0..n_comp).collect();
    order.sort_by(|&a, &b| per_comp[a].0.cmp(&per_comp[b].0));
    let groups = tie_groups(&order, |&c| &per_comp[c].0);

    let mut best_full: Option<Vec<Tok>> = None;
    for_each_arrangement(&groups, &mut |perm: &[usize]| {
        let mut root_choice = vec![0usize; n_comp];
        loop {
            let labels: Vec<&RootedLabels> = perm
                .iter()
                .enumerate()
                .map(|(k, &c)| &per_comp[c].1[root_choice[k]])
                .collect();
            let mut toks: Vec<Tok> = Vec::new();
            for &c in perm {
                toks.extend_from_slice(&per_comp[c].0);
                toks.push(SEP);
            }
            toks.extend(arrangement_tokens(g, &sys, perm, &labels));
            match &best_full {
                Some(b) if &toks >= b => {}
                _ => best_full = Some(toks),
            }
            // advance the root choice counter
            let mut k = 0;
            loop {
                if k == perm.len() {
                    return;
                }
                root_choice[k] += 1;
                if root_choice[k] < per_comp[perm[k]].1.len() {
                    break;
                }
                root_choice[k] = 0;
                k += 1;
            }
        }
    });
    best_full.unwrap()
}

fn isolated_face_order(sys: &FaceSystem, v: usize) -> Vec<usize> {
    sys.faces
        .iter()
        .enumerate()
        .filter(|(_, f)| f.isolated == Some(v))
        .map(|(i, _)| i)
        .collect()
}

/// Canonical relabeling data from one rooted traversal.
struct RootedLabels {
    /// Original vertex ids in canonical discovery order.
    vertex_order: Vec<usize>,
    /// Original face indices in canonical first-visit order.
    face_order: Vec<usize>,
}

fn sign_tok(g: &EmbeddedGraph, v: usize) -> Tok {
    match g.vertices[v].sign {
        crate::maps::Sign::Plus => 1,
        crate::maps::Sign::Minus => 2,
    }
}

/// Breadth-first rooted code of the component containing `root`.
fn rooted_component_code(
    g: &EmbeddedGraph,
    sys: &FaceSystem,
    root: Dart,
) -> (Vec<Tok>, RootedLabels) {
    let mut vertex_id: BTreeMap<usize, usize> = BTreeMap::new();
    let mut vertex_order: Vec<usize> = Vec::new();
    let mut entry_slot: Vec<usize> = Vec::new();
    let mut edge_id: BTreeMap<usize, usize> = BTreeMap::new();
    let mut toks: Vec<Tok> = Vec::new();
    let mut face_order: Vec<usize> = Vec::new();
    let mut face_seen: Vec<bool> = vec![false; sys.faces.len()];

    let start = g.end_of(root);
    vertex_id.insert(start.vertex, 0);
    vertex_order.push(start.vertex);
    entry_slot.push(start.position);

    let mut qi = 0;
    while qi < vertex_order.len() {
        let v = vertex_order[qi];
        let ent = entry_slot[qi];
        qi += 1;
        let val = g.vertices[v].valency();
        toks.push(sign_tok(g, v));
        toks.push(val as Tok);
        for k in 0..val {
            let p = (ent + k) % val;
            let (e, i) = g.vertices[v].rotation[p];
            // face bookkeeping in canonical dart order
            let f = sys.face_of_dart[&(e, i)];
            if !face_seen[f] {
                face_seen[f] = true;
                face_order.push(f);
            }
            let next_e = edge_id.len();
            let id = *edge_id.entry(e).or_insert(next_e);
            toks.push(id as Tok);
            let far = g.edges[e][1 - i];
            if !vertex_id.contains_key(&far.vertex) {
                let nv = vertex_order.len();
                vertex_id.insert(far.vertex, nv);
                vertex_order.push(far.vertex);
                entry_slot.push(far.position);
            }
            if !g.labels.is_empty() {
                toks.push(g.labels[e][i] as Tok + 1000);
            }
        }
        toks.push(SEP);
    }
    (toks, RootedLabels { vertex_order, face_order })
}

fn tie_groups<'a, T: Ord, F: Fn(&usize) -> &'a T>(order: &[usize], key: F) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for &c in order {
        match out.last_mut() {
            Some(last) if key(&last[0]) == key(&c) => last.push(c),
            _ => out.push(vec![c]),
        }
    }
    out
}

/// Visit every component order compatible with the tie groups.
fn for_each_arrangement(groups: &[Vec<usize>], f: &mut dyn FnMut(&[usize])) {
    fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<usize>, rest: &[Vec<usize>], f: &mut dyn FnMut(&[usize])) {
        if k == items.len() {
            if rest.is_empty() {
                f(out);
            } else {
                let mut next = rest[0].clone();
                permute(&mut next, 0, out, &rest[1..], f);
            }
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            out.push(items[k]);
            permute(items, k + 1, out, rest, f);
            out.pop();
            items.swap(k, i);
        }
    }
    if groups.is_empty() {
        f(&[]);
        return;
    }
    let mut first = groups[0].clone();
    let mut out = Vec::new();
    permute(&mut first, 0, &mut out, &groups[1..], f);
}

/// Tokens for the region structure and marks under a fixed component order
/// and per-component canonical face numbering.
fn arrangement_tokens(
    g: &EmbeddedGraph,
    sys: &FaceSystem,
    perm: &[usize],
    labels: &[&RootedLabels],
) -> Vec<Tok> {
    // canonical face id = (component position, face position within it)
    let mut canon_face: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (cpos, lab) in labels.iter().enumerate() {
        for (fpos, &f) in lab.face_order.iter().enumerate() {
            canon_face.insert(f, (cpos, fpos));
        }
    }
    let _ = perm;
    // classes as sorted face-id lists, sorted among themselves
    let mut classes: Vec<Vec<(usize, usize)>> = vec![Vec::new(); sys.n_classes];
    for (f, &c) in sys.class_of_face.iter().enumerate() {
        classes[c].push(canon_face[&f]);
    }
    for cl in &mut classes {
        cl.sort_unstable();
    }
    classes.retain(|c| c.len() > 1);
    classes.sort_unstable();
    let mut toks = Vec::new();
    toks.push(SEP);
    for cl in &classes {
        for &(a, b) in cl {
            toks.push(a as Tok);
            toks.push(b as Tok);
        }
        toks.push(SEP);
    }
    // marks: annulus marks are unordered, so sort them
    let mut marks: Vec<(usize, usize)> = g.marks.iter().map(|&f| canon_face[&f]).collect();
    marks.sort_unstable();
    toks.push(SEP);
    for (a, b) in marks {
        toks.push(a as Tok);
        toks.push(b as Tok);
    }
    toks
}

/// Canonical code of a pair, quotienting by cyclic vertex re-indexing on
/// both sides, representation freedom, and (optionally) reflection.
pub fn pair_code(p: &GraphPair, allow_reflection: bool) -> String {
    let mut best: Option<Vec<Tok>> = None;
    let reflections: &[bool] = if allow_reflection { &[false, true] } else { &[false] };
    for &refl in reflections {
        let q = if refl { p.reflected() } else { p.clone() };
        for s1 in 0..q.n1() {
            for s2 in 0..q.n2() {
                let r = q.shifted(s1, s2);
                let toks = pinned_pair_tokens(&r);
                match &best {
                    Some(b) if &toks >= b => {}
                    _ => best = Some(toks),
                }
            }
        }
    }
    fmt_tokens(&best.unwrap())
}

/// Serialize a pair with vertex indices pinned, minimizing over the
/// rotation starting offsets of every vertex (taken in index order, torus
/// side first, with shared edge names assigned on first appearance).
fn pinned_pair_tokens(p: &GraphPair) -> Vec<Tok> {
    #[derive(Clone)]
    struct State {
        toks: Vec<Tok>,
        edge_id: BTreeMap<usize, usize>,
        first_end: BTreeMap<usize, usize>,
        starts2: Vec<usize>,
        starts1: Vec<usize>,
    }
    let mut states = vec![State {
        toks: vec![
            p.n1() as Tok,
            p.n2() as Tok,
            p.delta as Tok,
            p.d as Tok,
            p.sense as Tok,
            SEP,
        ],
        edge_id: BTreeMap::new(),
        first_end: BTreeMap::new(),
        starts2: Vec::new(),
        starts1: Vec::new(),
    }];
    let sides: [(&EmbeddedGraph, bool); 2] = [(&p.g2, true), (&p.g1, false)];
    for (g, is_g2) in sides {
        for v in 0..g.n_vertices() {
            let val = g.vertices[v].valency().max(1);
            let mut next: Vec<State> = Vec::new();
            let mut best_key: Option<Vec<Tok>> = None;
            for st in &states {
                for start in 0..val {
                    let mut s2 = st.clone();
                    let mut vt: Vec<Tok> = vec![sign_tok(g, v), g.vertices[v].valency() as Tok];
                    for k in 0..g.vertices[v].valency() {
                        let pslot = (start + k) % val;
                        let (e, i) = g.vertices[v].rotation[pslot];
                        let nid = s2.edge_id.len();
                        let id = *s2.edge_id.entry(e).or_insert_with(|| {
                            s2.first_end.insert(e, i);
                            nid
                        });
                        vt.push(id as Tok);
                        // which end: 0 when this is the end first seen
                        let endbit = if s2.first_end[&e] == i { 0 } else { 1 };
                        vt.push(endbit);
                    }
                    vt.push(SEP);
                    s2.toks.extend_from_slice(&vt);
                    if is_g2 {
                        s2.starts2.push(start);
                    } else {
                        s2.starts1.push(start);
                    }
                    match &best_key {
                        Some(b) if &s2.toks > b => {}
                        Some(b) if &s2.toks == b => next.push(s2),
                        _ => {
                            best_key = Some(s2.toks.clone());
                            next.retain(|_| false);
                            next.push(s2);
                        }
                    }
                }
            }
            states = next;
        }
    }
    // Append the region structure of each side under each surviving state;
    // faces are numbered by first visit in the serialized slot order.
    let mut best: Option<Vec<Tok>> = None;
    for st in &states {
        let mut toks = st.toks.clone();
        toks.extend(pinned_region_tokens(&p.g2, &st.starts2));
        toks.extend(pinned_region_tokens(&p.g1, &st.starts1));
        match &best {
            Some(b) if &toks >= b => {}
            _ => best = Some(toks),
        }
    }
    best.unwrap()
}

fn pinned_region_tokens(g: &EmbeddedGraph, starts: &[usize]) -> Vec<Tok> {
    let sys = g.face_system().expect("well-formed side");
    let mut face_rank: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..g.n_vertices() {
        let val = g.vertices[v].valency();
        for k in 0..val {
            let pslot = (starts[v] + k) % val;
            let d = g.vertices[v].rotation[pslot];
            let f = sys.face_of_dart[&d];
            let nid = face_rank.len();
            face_rank.entry(f).or_insert(nid);
        }
    }
    for (f, fw) in sys.faces.iter().enumerate() {
        if fw.isolated.is_some() {
            let nid = face_rank.len();
            face_rank.entry(f).or_insert(nid);
        }
    }
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); sys.n_classes];
    for (f, &c) in sys.class_of_face.iter().enumerate() {
        classes[c].push(face_rank[&f]);
    }
    for cl in &mut classes {
        cl.sort_unstable();
    }
    classes.retain(|c| c.len() > 1);
    classes.sort_unstable();
    let mut toks = vec![SEP];
    for cl in &classes {
        toks.extend(cl.iter().map(|&x| x as Tok));
        toks.push(SEP);
    }
    let mut marks: Vec<usize> = g.marks.iter().map(|&f| face_rank[&f]).collect();
    marks.sort_unstable();
    toks.push(SEP);
    toks.extend(marks.iter().map(|&x| x as Tok));
    toks.push(SEP);
    toks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{EndpointRef, FatVertex, Sign, SurfaceKind};

    fn loop_on_sphere(marks: Vec<usize>) -> EmbeddedGraph {
        let mut g = EmbeddedGraph {
            surface: SurfaceKind::Disk,
            vertices: vec![FatVertex { sign: Sign::Plus, rotation: vec![(0, 0), (0, 1)] }],
            edges: vec![[EndpointRef { vertex: 0, position: 0 }; 2]],
            labels: vec![],
            placements: vec![],
            marks,
        };
        g.edges[0][0] = EndpointRef { vertex: 0, position: 0 };
        g.edges[0][1] = EndpointRef { vertex: 0, position: 1 };
        g
    }

    #[test]
    fn codes_are_stable_under_mark_face_choice_symmetry() {
        // A single loop with the outer mark on either side is the same disk
        // graph up to isomorphism.
        let a = loop_on_sphere(vec![0]);
        let b = loop_on_sphere(vec![1]);
        assert_eq!(graph_code(&a, false), graph_code(&b, false));
    }
}
