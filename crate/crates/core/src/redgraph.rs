//! Oriented weighted reduction graphs, their free fundamental group, and the
//! positive-width metric on geodesics of the universal cover.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::group::{FiniteGroup, GroupError};
use crate::padic::{Norm, Prime};
use crate::word::{reduced_words, FreeWord, Letter, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex label {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdge(String),
    #[error("edge {edge:?} refers to unknown vertex {vertex:?}")]
    UnknownVertex { edge: String, vertex: String },
    #[error("base vertex {0:?} is not a vertex")]
    UnknownBase(String),
    #[error("edge {0:?} has width exponent 0; widths must be at least 1")]
    ZeroWidth(String),
    #[error("graph is a tree (first Betti number 0)")]
    NoCycles,
    #[error("edge {0:?} is a loop, so its cycle cannot carry both orientations")]
    CycleTooShort(String),
    #[error("word {0} has d+ = 1 under the orientation")]
    AdmissibilityUnverified(FreeWord),
    #[error("orientation has a directed cycle; no proof constant exists")]
    NotAdmissible,
    #[error("cycle graph needs at least 2 vertices, got {0}")]
    TooShort(usize),
    #[error("expected {expected} voltages (one per generator), got {found}")]
    VoltageCount { expected: usize, found: usize },
    #[error("voltage {0} is not a group element")]
    BadVoltage(usize),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub width_exp: u32,
}

/// A connected finite graph with oriented edges of width `p^-width_exp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionGraph {
    prime: Prime,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    base: usize,
}

/// One edge traversal; `forward` means from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Step {
    pub edge: usize,
    pub forward: bool,
}

impl Step {
    pub fn rev(self) -> Step {
        Step { edge: self.edge, forward: !self.forward }
    }
}

pub type Path = Vec<Step>;

/// Appends `steps` to `path`, cancelling backtracks.
pub fn extend_path(path: &mut Path, steps: &[Step]) {
    for &s in steps {
        if path.last() == Some(&s.rev()) {
            path.pop();
        } else {
            path.push(s);
        }
    }
}

impl ReductionGraph {
    pub fn new(prime: Prime, vertices: Vec<String>, edges: Vec<(String, String, String, u32)>, base: &str) -> Result<ReductionGraph, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let lookup = |edge: &str, v: &str| {
            index.get(v).copied().ok_or_else(|| GraphError::UnknownVertex { edge: edge.to_string(), vertex: v.to_string() })
        };
        let mut seen = std::collections::HashSet::new();
        let mut es = Vec::with_capacity(edges.len());
        for (id, from, to, width_exp) in edges {
            if !seen.insert(id.clone()) {
                return Err(GraphError::DuplicateEdge(id));
            }
            if width_exp == 0 {
                return Err(GraphError::ZeroWidth(id));
            }
            let (from, to) = (lookup(&id, &from)?, lookup(&id, &to)?);
            es.push(Edge { id, from, to, width_exp });
        }
        let base = *index.get(base).ok_or_else(|| GraphError::UnknownBase(base.to_string()))?;
        let g = ReductionGraph { prime, vertices, edges: es, base };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn base_label(&self) -> &str {
        &self.vertices[self.base]
    }

    pub fn betti_number(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn start(&self, s: Step) -> usize {
        let e = &self.edges[s.edge];
        if s.forward {
            e.from
        } else {
            e.to
        }
    }

    pub fn end(&self, s: Step) -> usize {
        let e = &self.edges[s.edge];
        if s.forward {
            e.to
        } else {
            e.from
        }
    }

    /// Edge indices sorted by id.
    fn edge_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by(|&a, &b| self.edges[a].id.cmp(&self.edges[b].id));
        order
    }

    /// Steps leaving each vertex, in edge-id order.
    fn incidence(&self) -> Vec<Vec<Step>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for e in self.edge_order() {
            let edge = &self.edges[e];
            inc[edge.from].push(Step { edge: e, forward: true });
            inc[edge.to].push(Step { edge: e, forward: false });
        }
        inc
    }

    fn is_connected(&self) -> bool {
        let inc = self.incidence();
        let mut seen = vec![false; self.vertices.len()];
        seen[self.base] = true;
        let mut stack = vec![self.base];
        while let Some(v) = stack.pop() {
            for &s in &inc[v] {
                let w = self.end(s);
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// Same graph with the listed edges reversed.
    pub fn with_flipped(&self, flip: &[usize]) -> ReductionGraph {
        let mut g = self.clone();
        for &e in flip {
            let edge = &mut g.edges[e];
            std::mem::swap(&mut edge.from, &mut edge.to);
        }
        g
    }

    /// Same graph with a different base vertex.
    pub fn with_base(&self, base: usize) -> ReductionGraph {
        assert!(base < self.vertices.len());
        ReductionGraph { base, ..self.clone() }
    }

    /// Length of the longest directed path, or `None` if there is a directed cycle.
    pub fn longest_directed_path(&self) -> Option<usize> {
        let n = self.vertices.len();
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            indeg[e.to] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut longest = vec![0usize; n];
        let mut done = 0;
        while let Some(v) = queue.pop_front() {
            done += 1;
            for e in self.edges.iter().filter(|e| e.from == v) {
                longest[e.to] = longest[e.to].max(longest[v] + 1);
                indeg[e.to] -= 1;
                if indeg[e.to] == 0 {
                    queue.push_back(e.to);
                }
            }
        }
        (done == n).then(|| longest.into_iter().max().unwrap_or(0))
    }
}

/// A spanning tree with one based loop per non-tree edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeBasis {
    tree: Vec<usize>,
    chords: Vec<usize>,
    loops: Vec<Path>,
    /// chord edge index to generator index
    chord_gen: BTreeMap<usize, usize>,
}

impl FreeBasis {
    pub fn tree_edges(&self) -> &[usize] {
        &self.tree
    }

    pub fn chords(&self) -> &[usize] {
        &self.chords
    }

    pub fn loops(&self) -> &[Path] {
        &self.loops
    }

    pub fn rank(&self) -> usize {
        self.chords.len()
    }

    /// Closed path of a single letter.
    pub fn letter_path(&self, l: Letter) -> Path {
        let p = &self.loops[l.generator];
        if l.inverse {
            p.iter().rev().map(|s| s.rev()).collect()
        } else {
            p.clone()
        }
    }

    /// Reads off the word of a closed path at the base from its chord traversals.
    pub fn path_to_word(&self, path: &[Step]) -> FreeWord {
        FreeWord::reduce(
            path.iter()
                .filter_map(|s| self.chord_gen.get(&s.edge).map(|&g| Letter::new(g, !s.forward))),
        )
    }

    /// Length of the fundamental cycle of each chord (chord plus tree path
    /// between its endpoints), excluding the stem from the base.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        self.loops
            .iter()
            .map(|l| {
                let mut stem = 0;
                while stem < l.len() / 2 && l[stem] == l[l.len() - 1 - stem].rev() {
                    stem += 1;
                }
                l.len() - 2 * stem
            })
            .collect()
    }
}

/// BFS spanning tree from the base, visiting edges in id order.
pub fn free_basis(g: &ReductionGraph) -> FreeBasis {
    let inc = g.incidence();
    let n = g.vertices.len();
    let mut parent: Vec<Option<Step>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut in_tree = vec![false; g.edges.len()];
    seen[g.base] = true;
    let mut queue = VecDeque::from([g.base]);
    while let Some(v) = queue.pop_front() {
        for &s in &inc[v] {
            let w = g.end(s);
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(s);
                in_tree[s.edge] = true;
                queue.push_back(w);
            }
        }
    }
    let to_vertex = |mut v: usize| {
        let mut path = Vec::new();
        while let Some(s) = parent[v] {
            path.push(s);
            v = g.start(s);
        }
        path.reverse();
        path
    };
    build_basis(g, in_tree, to_vertex)
}

/// Basis from a caller-chosen spanning tree, given by edge indices.
pub fn free_basis_from_tree(g: &ReductionGraph, tree: &[usize]) -> Option<FreeBasis> {
    let n = g.vertices.len();
    if tree.len() + 1 != n {
        return None;
    }
    let mut in_tree = vec![false; g.edges.len()];
    for &e in tree {
        *in_tree.get_mut(e)? = true;
    }
    let mut parent: Vec<Option<Step>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[g.base] = true;
    let mut stack = vec![g.base];
    while let Some(v) = stack.pop() {
        for e in (0..g.edges.len()).filter(|&e| in_tree[e]) {
            for s in [Step { edge: e, forward: true }, Step { edge: e, forward: false }] {
                if g.start(s) == v && !seen[g.end(s)] {
                    seen[g.end(s)] = true;
                    parent[g.end(s)] = Some(s);
                    stack.push(g.end(s));
                }
            }
        }
    }
    if !seen.iter().all(|&x| x) {
        return None;
    }
    let to_vertex = |mut v: usize| {
        let mut path = Vec::new();
        while let Some(s) = parent[v] {
            path.push(s);
            v = g.start(s);
        }
        path.reverse();
        path
    };
    Some(build_basis(g, in_tree, to_vertex))
}

fn build_basis(g: &ReductionGraph, in_tree: Vec<bool>, to_vertex: impl Fn(usize) -> Path) -> FreeBasis {
    let order = g.edge_order();
    let tree: Vec<usize> = order.iter().copied().filter(|&e| in_tree[e]).collect();
    let chords: Vec<usize> = order.iter().copied().filter(|&e| !in_tree[e]).collect();
    let loops = chords
        .iter()
        .map(|&c| {
            let edge = &g.edges[c];
            let mut path = to_vertex(edge.from);
            extend_path(&mut path, &[Step { edge: c, forward: true }]);
            let back: Path = to_vertex(edge.to).iter().rev().map(|s| s.rev()).collect();
            extend_path(&mut path, &back);
            path
        })
        .collect();
    let chord_gen = chords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    FreeBasis { tree, chords, loops, chord_gen }
}

/// The reduced edge path from the base vertex to its translate by `w` in the
/// universal cover, projected to the graph.
pub fn word_to_path(basis: &FreeBasis, w: &FreeWord) -> Path {
    let mut path = Vec::new();
    for &l in w.letters() {
        extend_path(&mut path, &basis.letter_path(l));
    }
    path
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DPlusReport {
    pub l: usize,
    pub l_plus: usize,
    pub d_plus_exp: u64,
}

impl DPlusReport {
    pub fn d_plus(&self) -> Norm {
        Norm::Pow(-(self.d_plus_exp as i64))
    }
}

pub fn path_report(g: &ReductionGraph, path: &[Step]) -> DPlusReport {
    let mut r = DPlusReport { l: path.len(), l_plus: 0, d_plus_exp: 0 };
    for s in path.iter().filter(|s| s.forward) {
        r.l_plus += 1;
        r.d_plus_exp += u64::from(g.edges[s.edge].width_exp);
    }
    r
}

pub fn d_plus(g: &ReductionGraph, basis: &FreeBasis, w: &FreeWord) -> DPlusReport {
    path_report(g, &word_to_path(basis, w))
}

/// Depth-first walk over all nonidentity reduced words of length at most
/// `depth` whose first letter is `first`, passing each word and its path to
/// `visit`. Returning `false` from `visit` prunes extensions of that word.
pub fn walk_words_from(
    basis: &FreeBasis,
    first: Letter,
    depth: usize,
    visit: &mut dyn FnMut(&[Letter], &Path) -> bool,
) {
    fn go(basis: &FreeBasis, letters: &mut Vec<Letter>, path: &Path, depth: usize, visit: &mut dyn FnMut(&[Letter], &Path) -> bool) {
        if !visit(letters, path) || letters.len() == depth {
            return;
        }
        for g in 0..basis.rank() {
            for inverse in [false, true] {
                let l = Letter::new(g, inverse);
                if letters.last() == Some(&l.inv()) {
                    continue;
                }
                let mut next = path.clone();
                extend_path(&mut next, &basis.letter_path(l));
                letters.push(l);
                go(basis, letters, &next, depth, visit);
                letters.pop();
            }
        }
    }
    if depth == 0 {
        return;
    }
    go(basis, &mut vec![first], &basis.letter_path(first), depth, visit);
}

/// All letters of the basis, generators before inverses.
pub fn all_letters(rank: usize) -> Vec<Letter> {
    (0..rank).flat_map(|g| [Letter::new(g, false), Letter::new(g, true)]).collect()
}

/// Reorients the graph so that it has no directed cycle, which makes every
/// nonidentity word traverse edges in both directions. Back edges of a DFS
/// from the base are flipped; then words up to `check_depth` are verified.
pub fn orient_admissible(g: &ReductionGraph, check_depth: usize) -> Result<ReductionGraph, GraphError> {
    if let Some(e) = g.edges.iter().find(|e| e.from == e.to) {
        return Err(GraphError::CycleTooShort(e.id.clone()));
    }
    if g.betti_number() == 0 {
        return Err(GraphError::NoCycles);
    }
    let n = g.vertices.len();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in g.edge_order() {
        out[g.edges[e].from].push(e);
    }
    // 0 unvisited, 1 on stack, 2 finished
    let mut state = vec![0u8; n];
    let mut flip = Vec::new();
    let mut roots = vec![g.base];
    roots.extend((0..n).filter(|&v| v != g.base));
    for root in roots {
        if state[root] != 0 {
            continue;
        }
        state[root] = 1;
        let mut stack = vec![(root, 0usize)];
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if let Some(&e) = out[v].get(*i) {
                *i += 1;
                let w = g.edges[e].to;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => flip.push(e),
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    let h = g.with_flipped(&flip);
    debug_assert!(h.longest_directed_path().is_some());
    check_admissible(&h, check_depth)?;
    Ok(h)
}

/// Verifies `1 <= l_plus(w) <= l(w) - 1` for all nonidentity words up to `depth`.
pub fn check_admissible(g: &ReductionGraph, depth: usize) -> Result<(), GraphError> {
    let basis = free_basis(g);
    for w in reduced_words(basis.rank(), depth).into_iter().skip(1) {
        let r = d_plus(g, &basis, &w);
        if r.l_plus == 0 || r.l_plus == r.l {
            return Err(GraphError::AdmissibilityUnverified(w));
        }
    }
    Ok(())
}

/// Constant `n` with `n * l_plus(w) >= l(w)` for every nonidentity word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProofConstant {
    pub n: usize,
    /// Largest fundamental cycle length, the starting candidate.
    pub cycle_bound: usize,
    /// Longest directed path `P`; `2P + 1` always works.
    pub longest_path: usize,
}

impl ProofConstant {
    /// Geodesic length beyond which `d_plus <= p^-eps_exp` fails to hold,
    /// i.e. words longer than this have `d_plus < p^-eps_exp`.
    pub fn length_bound(&self, eps_exp: u64) -> u64 {
        self.n as u64 * eps_exp
    }
}

/// Least `n >= cycle_bound` passing an exact shortest-path certificate over
/// non-backtracking closed walks at the base, with step weight `n - 1` on
/// forward and `-1` on backward edges.
pub fn proof_constant(g: &ReductionGraph, basis: &FreeBasis) -> Result<ProofConstant, GraphError> {
    if basis.rank() == 0 {
        return Err(GraphError::NoCycles);
    }
    let longest_path = g.longest_directed_path().ok_or(GraphError::NotAdmissible)?;
    let cycle_bound = basis.cycle_lengths().into_iter().max().unwrap_or(1);
    let limit = cycle_bound.max(2 * longest_path + 1);
    (cycle_bound..=limit)
        .find(|&n| walk_certificate(g, n))
        .map(|n| ProofConstant { n, cycle_bound, longest_path })
        .ok_or(GraphError::NotAdmissible)
}

fn walk_certificate(g: &ReductionGraph, n: usize) -> bool {
    let steps: Vec<Step> = (0..g.edges.len())
        .flat_map(|e| [Step { edge: e, forward: true }, Step { edge: e, forward: false }])
        .collect();
    let idx = |s: Step| 2 * s.edge + usize::from(!s.forward);
    let weight = |s: Step| if s.forward { n as i64 - 1 } else { -1 };
    let mut dist: Vec<Option<i64>> = vec![None; steps.len()];
    for &s in &steps {
        if g.start(s) == g.base {
            dist[idx(s)] = Some(weight(s));
        }
    }
    let mut stable = false;
    for _ in 0..=steps.len() {
        let mut changed = false;
        for &s in &steps {
            let Some(d) = dist[idx(s)] else { continue };
            for &t in &steps {
                if g.start(t) != g.end(s) || t == s.rev() {
                    continue;
                }
                let nd = d + weight(t);
                if dist[idx(t)].is_none_or(|x| nd < x) {
                    dist[idx(t)] = Some(nd);
                    changed = true;
                }
            }
        }
        if !changed {
            stable = true;
            break;
        }
    }
    stable && steps.iter().filter(|&&s| g.end(s) == g.base).all(|&s| dist[idx(s)].is_none_or(|d| d >= 0))
}

fn cycle_with(prime: Prime, forward: &[bool], width_exp: u32) -> Result<ReductionGraph, GraphError> {
    let m = forward.len();
    if m < 2 {
        return Err(GraphError::TooShort(m));
    }
    let width = (m - 1).to_string().len();
    let vertices: Vec<String> = (0..m).map(|i| format!("v{i:0width$}")).collect();
    let edges = (0..m)
        .map(|i| {
            let (a, b) = (vertices[i].clone(), vertices[(i + 1) % m].clone());
            let (from, to) = if forward[i] { (a, b) } else { (b, a) };
            (format!("e{i:0width$}"), from, to, width_exp)
        })
        .collect();
    ReductionGraph::new(prime, vertices.clone(), edges, &vertices[0])
}

/// Cycle `v0 - v1 - ... - v(m-1) - v0` where edge `i` joins `v_i` and
/// `v_(i+1)` and points along the cycle iff `forward[i]`; widths 1.
pub fn cycle_graph(prime: Prime, forward: &[bool]) -> Result<ReductionGraph, GraphError> {
    cycle_with(prime, forward, 1)
}

/// The `m`-cycle with all edges along the cycle except the last.
pub fn tate_cycle_graph(m: usize, prime: Prime) -> Result<ReductionGraph, GraphError> {
    let mut forward = vec![true; m];
    if let Some(last) = forward.last_mut() {
        *last = false;
    }
    cycle_with(prime, &forward, 1)
}

/// Two vertices joined by three parallel edges, all pointing from `a` to `b`.
pub fn theta_graph(prime: Prime) -> ReductionGraph {
    let v = |s: &str| s.to_string();
    ReductionGraph::new(
        prime,
        vec![v("a"), v("b")],
        vec![(v("e0"), v("a"), v("b"), 1), (v("e1"), v("a"), v("b"), 1), (v("e2"), v("a"), v("b"), 1)],
        "a",
    )
    .expect("theta graph is valid")
}

/// Covering graph with vertex set `V x G`; generator `i`'s chord carries
/// `voltages[i]`, tree edges carry the identity. Edge `e` from `u` to `w`
/// lifts to `(u, h) -> (w, h * voltage(e))`.
pub fn voltage_cover<G: FiniteGroup>(
    g: &ReductionGraph,
    basis: &FreeBasis,
    voltages: &[usize],
    group: &G,
) -> Result<ReductionGraph, GraphError> {
    if voltages.len() != basis.rank() {
        return Err(GraphError::VoltageCount { expected: basis.rank(), found: voltages.len() });
    }
    if let Some(&v) = voltages.iter().find(|&&v| v >= group.order()) {
        return Err(GraphError::BadVoltage(v));
    }
    let order = group.order();
    let label = |v: usize, h: usize| format!("{}@{}", g.vertices[v], h);
    let vertices: Vec<String> = (0..g.vertices.len()).flat_map(|v| (0..order).map(move |h| (v, h))).map(|(v, h)| label(v, h)).collect();
    let mut volt = vec![group.identity(); g.edges.len()];
    for (i, &c) in basis.chords.iter().enumerate() {
        volt[c] = voltages[i];
    }
    let mut edges = Vec::with_capacity(g.edges.len() * order);
    for (e, edge) in g.edges.iter().enumerate() {
        for h in 0..order {
            edges.push((format!("{}@{}", edge.id, h), label(edge.from, h), label(edge.to, group.mul(h, volt[e])), edge.width_exp));
        }
    }
    ReductionGraph::new(g.prime, vertices, edges, &label(g.base, group.identity()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::CayleyTable;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    #[test]
    fn bases() {
        let c3 = tate_cycle_graph(3, p5()).unwrap();
        let b = free_basis(&c3);
        assert_eq!(b.rank(), 1);
        assert_eq!(b.loops()[0].len(), 3);
        let theta = theta_graph(p5());
        assert_eq!(free_basis(&theta).rank(), 2);
        let tree = ReductionGraph::new(
            p5(),
            vec!["a".into(), "b".into()],
            vec![("e".into(), "a".into(), "b".into(), 1)],
            "a",
        )
        .unwrap();
        assert_eq!(free_basis(&tree).rank(), 0);
        assert_eq!(orient_admissible(&tree, 2), Err(GraphError::NoCycles));
    }

    #[test]
    fn validation() {
        let s = |x: &str| x.to_string();
        let disc = ReductionGraph::new(p5(), vec![s("a"), s("b")], vec![], "a");
        assert_eq!(disc, Err(GraphError::Disconnected));
        let zero = ReductionGraph::new(p5(), vec![s("a"), s("b")], vec![(s("e"), s("a"), s("b"), 0)], "a");
        assert_eq!(zero, Err(GraphError::ZeroWidth(s("e"))));
        let unk = ReductionGraph::new(p5(), vec![s("a")], vec![(s("e"), s("a"), s("c"), 1)], "a");
        assert!(matches!(unk, Err(GraphError::UnknownVertex { .. })));
        assert!(matches!(tate_cycle_graph(1, p5()), Err(GraphError::TooShort(1))));
    }

    #[test]
    fn d_plus_on_three_cycle() {
        let g = tate_cycle_graph(3, p5()).unwrap();
        let b = free_basis(&g);
        let gamma = FreeWord::generator(0);
        // orient the generator along the cycle direction v0 -> v1 -> v2
        let along = if d_plus(&g, &b, &gamma).l_plus == 2 { gamma.clone() } else { gamma.inverse() };
        assert_eq!(d_plus(&g, &b, &along), DPlusReport { l: 3, l_plus: 2, d_plus_exp: 2 });
        assert_eq!(d_plus(&g, &b, &along.inverse()), DPlusReport { l: 3, l_plus: 1, d_plus_exp: 1 });
        assert_eq!(d_plus(&g, &b, &FreeWord::identity()), DPlusReport { l: 0, l_plus: 0, d_plus_exp: 0 });
        assert_eq!(d_plus(&g, &b, &FreeWord::identity()).d_plus(), Norm::ONE);
        assert!(word_to_path(&b, &FreeWord::identity()).is_empty());
    }

    #[test]
    fn orientation() {
        let same = cycle_graph(p5(), &[true, true, true]).unwrap();
        let h = orient_admissible(&same, 6).unwrap();
        let flipped = same.edges().iter().zip(h.edges()).filter(|(a, b)| a.from != b.from).count();
        assert_eq!(flipped, 1);
        let theta_same = ReductionGraph::new(
            p5(),
            vec!["a".into(), "b".into()],
            vec![("e0".into(), "a".into(), "b".into(), 1), ("e1".into(), "b".into(), "a".into(), 1), ("e2".into(), "b".into(), "a".into(), 1)],
            "a",
        )
        .unwrap();
        let h = orient_admissible(&theta_same, 5).unwrap();
        let b = free_basis(&h);
        for l in b.loops() {
            let r = path_report(&h, l);
            assert!(r.l_plus >= 1 && r.l_plus < r.l);
        }
        let looped = ReductionGraph::new(
            p5(),
            vec!["a".into()],
            vec![("x".into(), "a".into(), "a".into(), 1)],
            "a",
        )
        .unwrap();
        assert_eq!(orient_admissible(&looped, 3), Err(GraphError::CycleTooShort("x".into())));
        assert_eq!(check_admissible(&same, 3), Err(GraphError::AdmissibilityUnverified(FreeWord::generator(0))));
    }

    #[test]
    fn proof_constants() {
        let g = tate_cycle_graph(3, p5()).unwrap();
        let pc = proof_constant(&g, &free_basis(&g)).unwrap();
        assert_eq!(pc.n, 3);
        assert_eq!(pc.length_bound(3), 9);
        let theta = theta_graph(p5());
        assert_eq!(proof_constant(&theta, &free_basis(&theta)).unwrap().n, 2);
        let bad = cycle_graph(p5(), &[true, true, true]).unwrap();
        assert_eq!(proof_constant(&bad, &free_basis(&bad)), Err(GraphError::NotAdmissible));
    }

    #[test]
    fn covers() {
        let g = tate_cycle_graph(3, p5()).unwrap();
        let b = free_basis(&g);
        let cover = voltage_cover(&g, &b, &[1], &CayleyTable::cyclic(3)).unwrap();
        assert_eq!((cover.vertices().len(), cover.edges().len(), cover.betti_number()), (9, 9, 1));
        let theta = theta_graph(p5());
        let tb = free_basis(&theta);
        let cover = voltage_cover(&theta, &tb, &[1, 0], &CayleyTable::cyclic(2)).unwrap();
        assert_eq!((cover.vertices().len(), cover.edges().len(), cover.betti_number()), (4, 6, 3));
        let same = voltage_cover(&theta, &tb, &[0, 0], &CayleyTable::trivial()).unwrap();
        assert_eq!(same.betti_number(), theta.betti_number());
        assert_eq!(voltage_cover(&g, &b, &[0], &CayleyTable::cyclic(3)), Err(GraphError::Disconnected));
    }

    #[test]
    fn tree_independence() {
        let theta = theta_graph(p5());
        let b1 = free_basis(&theta);
        let other = theta.edges().len() - 1;
        let b2 = free_basis_from_tree(&theta, &[other]).unwrap();
        assert_ne!(b1.tree_edges(), b2.tree_edges());
        for w in reduced_words(2, 4) {
            let path = word_to_path(&b1, &w);
            let w2 = b2.path_to_word(&path);
            assert_eq!(word_to_path(&b2, &w2), path);
            assert_eq!(d_plus(&theta, &b2, &w2), d_plus(&theta, &b1, &w));
        }
    }
}
