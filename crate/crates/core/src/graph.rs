//! Multigraph with stable edge identities, forest bookkeeping and
//! contraction/uncontraction.
//!
//! Vertices are dense indices `0..vertex_slots()`. Contraction never
//! renumbers anything: the lowest-numbered member of a contracted set becomes
//! the supervertex and the other members are marked dead. Edge ids are
//! assigned in insertion order and stay valid for the lifetime of the graph.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

pub type Vertex = usize;

/// Stable identifier of an edge. Zero-based; the text formats print it 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EdgeId(pub usize);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Undirected multigraph. Parallel edges are allowed, self-loops are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    live: Vec<bool>,
    /// Current endpoints; `None` for dropped self-loops and edges removed by contraction.
    endpoints: Vec<Option<(Vertex, Vertex)>>,
    /// Endpoints as ingested, self-loops included.
    original: Vec<(Vertex, Vertex)>,
    incidence: Vec<Vec<EdgeId>>,
    live_vertices: usize,
    live_edges: usize,
    self_loops: usize,
}

impl MultiGraph {
    pub fn new(n: usize) -> Self {
        MultiGraph {
            live: vec![true; n],
            endpoints: Vec::new(),
            original: Vec::new(),
            incidence: vec![Vec::new(); n],
            live_vertices: n,
            live_edges: 0,
            self_loops: 0,
        }
    }

    /// Builds a graph from an edge list. Self-loops consume an id but are dropped.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut g = MultiGraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Appends an edge and returns its id. A self-loop still consumes an id
    /// but is not stored; see [`MultiGraph::self_loops_dropped`].
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<EdgeId> {
        for x in [u, v] {
            if x >= self.live.len() || !self.live[x] {
                return Err(Error::input(format!("vertex {x} is not a live vertex")));
            }
        }
        let id = EdgeId(self.endpoints.len());
        self.original.push((u, v));
        if u == v {
            self.endpoints.push(None);
            self.self_loops += 1;
        } else {
            self.endpoints.push(Some((u, v)));
            self.incidence[u].push(id);
            self.incidence[v].push(id);
            self.live_edges += 1;
        }
        Ok(id)
    }

    /// Total number of vertex slots, live or not.
    pub fn vertex_slots(&self) -> usize {
        self.live.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.live_vertices
    }

    pub fn is_live(&self, v: Vertex) -> bool {
        v < self.live.len() && self.live[v]
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.live
            .iter()
            .enumerate()
            .filter_map(|(v, &alive)| alive.then_some(v))
    }

    /// Total number of edge ids handed out, including dropped and contracted edges.
    pub fn edge_slots(&self) -> usize {
        self.endpoints.len()
    }

    pub fn edge_count(&self) -> usize {
        self.live_edges
    }

    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        matches!(self.endpoints.get(e.0), Some(Some(_)))
    }

    pub fn endpoints(&self, e: EdgeId) -> Option<(Vertex, Vertex)> {
        self.endpoints.get(e.0).copied().flatten()
    }

    /// Endpoints as they were when the edge was added (before any contraction).
    pub fn original_endpoints(&self, e: EdgeId) -> Option<(Vertex, Vertex)> {
        self.original.get(e.0).copied()
    }

    /// Live edges in ascending id order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, Vertex, Vertex)> + '_ {
        self.endpoints
            .iter()
            .enumerate()
            .filter_map(|(i, ep)| ep.map(|(u, v)| (EdgeId(i), u, v)))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges().map(|(e, _, _)| e)
    }

    pub fn incident(&self, v: Vertex) -> &[EdgeId] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.incidence[v].len()
    }

    pub fn other_endpoint(&self, e: EdgeId, v: Vertex) -> Option<Vertex> {
        let (a, b) = self.endpoints(e)?;
        if a == v {
            Some(b)
        } else if b == v {
            Some(a)
        } else {
            None
        }
    }

    /// Connected components of the live graph, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.live.len()];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for root in self.vertices() {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            queue.push_back(root);
            let mut comp = Vec::new();
            while let Some(x) = queue.pop_front() {
                comp.push(x);
                for &e in &self.incidence[x] {
                    let y = self.other_endpoint(e, x).expect("incidence is consistent");
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Same vertex set, but only the listed edges are kept (ids unchanged).
    pub fn edge_subgraph(&self, keep: &[EdgeId]) -> Result<MultiGraph> {
        let mut endpoints = vec![None; self.endpoints.len()];
        let mut incidence = vec![Vec::new(); self.live.len()];
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &e in &sorted {
            let (u, v) = self
                .endpoints(e)
                .ok_or_else(|| Error::input(format!("edge {e} is not in the graph")))?;
            endpoints[e.0] = Some((u, v));
            incidence[u].push(e);
            incidence[v].push(e);
        }
        Ok(MultiGraph {
            live: self.live.clone(),
            endpoints,
            original: self.original.clone(),
            incidence,
            live_vertices: self.live_vertices,
            live_edges: sorted.len(),
            self_loops: self.self_loops,
        })
    }

    /// Copies the subgraph induced by `vertices` into a fresh graph with dense
    /// local ids, keeping the maps back to this graph's ids.
    pub fn induced_subgraph(&self, vertices: &[Vertex]) -> Result<Subgraph> {
        let mut local = vec![usize::MAX; self.live.len()];
        for (i, &v) in vertices.iter().enumerate() {
            if !self.is_live(v) {
                return Err(Error::input(format!("vertex {v} is not a live vertex")));
            }
            if local[v] != usize::MAX {
                return Err(Error::input(format!("vertex {v} listed twice")));
            }
            local[v] = i;
        }
        let mut graph = MultiGraph::new(vertices.len());
        let mut edge_map = Vec::new();
        for (e, u, v) in self.edges() {
            if local[u] != usize::MAX && local[v] != usize::MAX {
                graph.add_edge(local[u], local[v])?;
                edge_map.push(e);
            }
        }
        Ok(Subgraph {
            graph,
            vertex_map: vertices.to_vec(),
            edge_map,
        })
    }
}

/// A graph copied out of a parent graph, with id maps back to the parent.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: MultiGraph,
    /// local vertex -> parent vertex
    pub vertex_map: Vec<Vertex>,
    /// local edge id -> parent edge id
    pub edge_map: Vec<EdgeId>,
}

/// Assignment of edges to forest indices `0..k`.
///
/// Disjointness is structural: an edge maps to at most one forest.
#[derive(Debug, Clone)]
pub struct ForestFamily {
    k: usize,
    assignment: Vec<Option<u32>>,
    counts: Vec<usize>,
    size: usize,
}

impl PartialEq for ForestFamily {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.assigned().eq(other.assigned())
    }
}

impl Eq for ForestFamily {}

impl ForestFamily {
    pub fn new(k: usize) -> Self {
        ForestFamily {
            k,
            assignment: Vec::new(),
            counts: vec![0; k],
            size: 0,
        }
    }

    /// Builds a family from `(edge, forest)` pairs, rejecting duplicates and bad indices.
    pub fn from_assignments(k: usize, pairs: &[(EdgeId, usize)]) -> Result<Self> {
        let mut fam = ForestFamily::new(k);
        for &(e, i) in pairs {
            fam.assign(e, i)?;
        }
        Ok(fam)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Total number of assigned edges, |F|.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn forest_len(&self, i: usize) -> usize {
        self.counts[i]
    }

    pub fn forest_of(&self, e: EdgeId) -> Option<usize> {
        self.assignment
            .get(e.0)
            .copied()
            .flatten()
            .map(|i| i as usize)
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.forest_of(e).is_some()
    }

    pub fn assign(&mut self, e: EdgeId, forest: usize) -> Result<()> {
        if forest >= self.k {
            return Err(Error::input(format!(
                "forest index {forest} out of range for k = {}",
                self.k
            )));
        }
        if self.contains(e) {
            return Err(Error::input(format!("edge {e} is already assigned")));
        }
        self.set(e, forest);
        Ok(())
    }

    pub fn unassign(&mut self, e: EdgeId) -> Option<usize> {
        let prev = self.forest_of(e)?;
        self.assignment[e.0] = None;
        self.counts[prev] -= 1;
        self.size -= 1;
        Some(prev)
    }

    /// Moves or inserts `e` into `forest` without validation.
    pub(crate) fn set(&mut self, e: EdgeId, forest: usize) {
        if e.0 >= self.assignment.len() {
            self.assignment.resize(e.0 + 1, None);
        }
        match self.assignment[e.0] {
            Some(prev) => self.counts[prev as usize] -= 1,
            None => self.size += 1,
        }
        self.assignment[e.0] = Some(forest as u32);
        self.counts[forest] += 1;
    }

    /// All `(edge, forest)` pairs in ascending edge order.
    pub fn assigned(&self) -> impl Iterator<Item = (EdgeId, usize)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.map(|f| (EdgeId(i), f as usize)))
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.assigned().map(|(e, _)| e)
    }

    pub fn forest(&self, i: usize) -> Vec<EdgeId> {
        self.assigned()
            .filter_map(|(e, f)| (f == i).then_some(e))
            .collect()
    }

    /// Checks that every assigned edge is live in `g` and every forest is acyclic.
    pub fn validate(&self, g: &MultiGraph) -> Result<()> {
        let mut ufs: Vec<UnionFind> = Vec::with_capacity(self.k);
        ufs.resize_with(self.k, || UnionFind::new(g.vertex_slots()));
        for (e, i) in self.assigned() {
            let (u, v) = g
                .endpoints(e)
                .ok_or_else(|| Error::input(format!("assigned edge {e} is not in the graph")))?;
            if !ufs[i].union(u, v) {
                return Err(Error::input(format!(
                    "forest {i} contains a cycle through edge {e}"
                )));
            }
        }
        Ok(())
    }
}

/// Head choice per oriented edge, with an indegree table kept in sync.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    heads: Vec<Option<Vertex>>,
    indegree: Vec<usize>,
    len: usize,
}

impl Orientation {
    pub fn new(vertex_slots: usize) -> Self {
        Orientation {
            heads: Vec::new(),
            indegree: vec![0; vertex_slots],
            len: 0,
        }
    }

    /// Orients `e` towards `head`, replacing any previous choice.
    pub fn set(&mut self, g: &MultiGraph, e: EdgeId, head: Vertex) -> Result<()> {
        let (u, v) = g
            .endpoints(e)
            .ok_or_else(|| Error::input(format!("edge {e} is not in the graph")))?;
        if head != u && head != v {
            return Err(Error::input(format!(
                "vertex {head} is not an endpoint of edge {e}"
            )));
        }
        if head >= self.indegree.len() {
            self.indegree.resize(head + 1, 0);
        }
        if e.0 >= self.heads.len() {
            self.heads.resize(e.0 + 1, None);
        }
        match self.heads[e.0].replace(head) {
            Some(prev) => self.indegree[prev] -= 1,
            None => self.len += 1,
        }
        self.indegree[head] += 1;
        Ok(())
    }

    pub fn head(&self, e: EdgeId) -> Option<Vertex> {
        self.heads.get(e.0).copied().flatten()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.head(e).is_some()
    }

    pub fn indegree(&self, v: Vertex) -> usize {
        self.indegree.get(v).copied().unwrap_or(0)
    }

    pub fn max_indegree(&self) -> usize {
        self.indegree.iter().copied().max().unwrap_or(0)
    }

    /// Number of oriented edges.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `(edge, head)` pairs in ascending edge order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, Vertex)> + '_ {
        self.heads
            .iter()
            .enumerate()
            .filter_map(|(i, h)| h.map(|h| (EdgeId(i), h)))
    }

    /// True when the stored indegree table matches a recount from the head map.
    pub fn recount_matches(&self) -> bool {
        let mut counts = vec![0; self.indegree.len()];
        for (_, h) in self.edges() {
            if h >= counts.len() {
                return false;
            }
            counts[h] += 1;
        }
        counts == self.indegree
    }
}

/// One contraction event, enough to undo it exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionRecord {
    supervertex: Vertex,
    members: Vec<Vertex>,
    trees: Vec<Vec<EdgeId>>,
    discarded: Vec<EdgeId>,
    internal: Vec<(EdgeId, (Vertex, Vertex))>,
    remapped: Vec<(EdgeId, (Vertex, Vertex))>,
    saved_incidence: Vec<(Vertex, Vec<EdgeId>)>,
}

impl ContractionRecord {
    pub fn supervertex(&self) -> Vertex {
        self.supervertex
    }

    pub fn members(&self) -> &[Vertex] {
        &self.members
    }

    /// Spanning tree of the contracted set taken from each forest.
    pub fn trees(&self) -> &[Vec<EdgeId>] {
        &self.trees
    }

    /// Non-forest edges with both endpoints inside the contracted set.
    pub fn discarded(&self) -> &[EdgeId] {
        &self.discarded
    }

    /// Number of forest edges moved out of the family, k(|U| - 1).
    pub fn tree_edge_count(&self) -> usize {
        self.trees.iter().map(Vec::len).sum()
    }
}

/// λ(S): ids of live edges with both endpoints in `s`, optionally intersected
/// with `restrict`. Sorted ascending.
pub fn induced_edge_set(
    g: &MultiGraph,
    s: &[Vertex],
    restrict: Option<&BTreeSet<EdgeId>>,
) -> Result<Vec<EdgeId>> {
    induced_edges_where(g, s, |e| restrict.is_none_or(|r| r.contains(&e)))
}

pub(crate) fn induced_edges_where(
    g: &MultiGraph,
    s: &[Vertex],
    keep: impl Fn(EdgeId) -> bool,
) -> Result<Vec<EdgeId>> {
    let mut members = s.to_vec();
    members.sort_unstable();
    members.dedup();
    for &v in &members {
        if !g.is_live(v) {
            return Err(Error::input(format!("vertex {v} is not a live vertex")));
        }
    }
    let mut out = Vec::new();
    for &x in &members {
        for &e in g.incident(x) {
            let y = g.other_endpoint(e, x).expect("incidence is consistent");
            // count each internal edge once, from its smaller endpoint
            if x < y && members.binary_search(&y).is_ok() && keep(e) {
                out.push(e);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// rk(L): size of a spanning forest of the given edges.
pub fn spanning_rank(g: &MultiGraph, edges: &[EdgeId]) -> Result<usize> {
    let mut uf = UnionFind::new(g.vertex_slots());
    let mut rank = 0;
    for &e in edges {
        let (u, v) = g
            .endpoints(e)
            .ok_or_else(|| Error::input(format!("edge {e} is not in the graph")))?;
        if uf.union(u, v) {
            rank += 1;
        }
    }
    Ok(rank)
}

/// Orients every forest away from the lowest-id vertex of each of its trees,
/// so each forest contributes indegree at most one per vertex.
pub fn orient_forests(g: &MultiGraph, f: &ForestFamily) -> Result<Orientation> {
    let n = g.vertex_slots();
    let mut buckets: Vec<Vec<EdgeId>> = vec![Vec::new(); f.k()];
    for (e, i) in f.assigned() {
        buckets[i].push(e);
    }
    let mut orientation = Orientation::new(n);
    let mut adj: Vec<Vec<(EdgeId, Vertex)>> = vec![Vec::new(); n];
    let mut visited = vec![false; n];
    let mut queue = VecDeque::new();
    for (i, bucket) in buckets.iter().enumerate() {
        let mut touched = Vec::with_capacity(2 * bucket.len());
        for &e in bucket {
            let (u, v) = g
                .endpoints(e)
                .ok_or_else(|| Error::input(format!("assigned edge {e} is not in the graph")))?;
            adj[u].push((e, v));
            adj[v].push((e, u));
            touched.push(u);
            touched.push(v);
        }
        touched.sort_unstable();
        touched.dedup();
        for &root in &touched {
            if visited[root] {
                continue;
            }
            visited[root] = true;
            queue.push_back((root, None));
            while let Some((x, via)) = queue.pop_front() {
                for &(e, y) in &adj[x] {
                    if Some(e) == via {
                        continue;
                    }
                    if visited[y] {
                        return Err(Error::invariant(format!(
                            "forest {i} contains a cycle through edge {e}"
                        )));
                    }
                    visited[y] = true;
                    orientation.set(g, e, y)?;
                    queue.push_back((y, Some(e)));
                }
            }
        }
        for &v in &touched {
            adj[v].clear();
            visited[v] = false;
        }
    }
    Ok(orientation)
}

/// Contracts `u` into its lowest-id member.
///
/// Requires every forest restricted to λ(U) to be a spanning tree of U. Edges
/// inside U leave both the graph and the family; the record keeps the trees
/// and the discarded non-forest edges.
pub fn contract(
    g: &mut MultiGraph,
    f: &mut ForestFamily,
    u: &[Vertex],
) -> Result<ContractionRecord> {
    if u.is_empty() {
        return Err(Error::input("cannot contract an empty vertex set"));
    }
    let mut members = u.to_vec();
    members.sort_unstable();
    let before = members.len();
    members.dedup();
    if members.len() != before {
        return Err(Error::input("contraction set lists a vertex twice"));
    }
    for &v in &members {
        if !g.is_live(v) {
            return Err(Error::input(format!("vertex {v} is not a live vertex")));
        }
    }
    let is_member = |x: Vertex| members.binary_search(&x).is_ok();

    let internal = induced_edges_where(g, &members, |_| true)?;
    let k = f.k();
    let mut trees: Vec<Vec<EdgeId>> = vec![Vec::new(); k];
    let mut discarded = Vec::new();
    let mut ufs: Vec<UnionFind> = Vec::with_capacity(k);
    ufs.resize_with(k, || UnionFind::new(members.len()));
    let local = |x: Vertex| members.binary_search(&x).expect("member");
    for &e in &internal {
        match f.forest_of(e) {
            Some(i) => {
                let (a, b) = g.endpoints(e).expect("live edge");
                if !ufs[i].union(local(a), local(b)) {
                    return Err(Error::Precondition(format!(
                        "forest {i} has a cycle inside the contraction set"
                    )));
                }
                trees[i].push(e);
            }
            None => discarded.push(e),
        }
    }
    for (i, tree) in trees.iter().enumerate() {
        if tree.len() + 1 != members.len() {
            return Err(Error::Precondition(format!(
                "forest {i} restricted to the contraction set has {} edges, a spanning tree needs {}",
                tree.len(),
                members.len() - 1
            )));
        }
    }

    let rep = members[0];
    let saved_incidence: Vec<(Vertex, Vec<EdgeId>)> = members
        .iter()
        .map(|&x| (x, g.incidence[x].clone()))
        .collect();
    let mut internal_saved = Vec::with_capacity(internal.len());
    for &e in &internal {
        let ep = g.endpoints[e.0].take().expect("live edge");
        internal_saved.push((e, ep));
        f.unassign(e);
    }
    g.live_edges -= internal.len();

    let mut remapped = Vec::new();
    let mut rep_incidence = Vec::new();
    for &x in &members {
        for e in std::mem::take(&mut g.incidence[x]) {
            let Some((a, b)) = g.endpoints[e.0] else {
                continue; // internal, already removed
            };
            debug_assert!(is_member(a) != is_member(b));
            if x != rep {
                let new = if a == x { (rep, b) } else { (a, rep) };
                remapped.push((e, (a, b)));
                g.endpoints[e.0] = Some(new);
            }
            rep_incidence.push(e);
        }
    }
    rep_incidence.sort_unstable();
    g.incidence[rep] = rep_incidence;
    for &x in &members[1..] {
        g.live[x] = false;
    }
    g.live_vertices -= members.len() - 1;

    Ok(ContractionRecord {
        supervertex: rep,
        members,
        trees,
        discarded,
        internal: internal_saved,
        remapped,
        saved_incidence,
    })
}

/// Undoes one contraction and adds its trees back into the family.
pub fn uncontract(
    g: &mut MultiGraph,
    f: &mut ForestFamily,
    record: ContractionRecord,
) -> Result<()> {
    let rep = record.supervertex;
    if !g.is_live(rep) {
        return Err(Error::invariant(format!("supervertex {rep} is not live")));
    }
    if record.trees.len() != f.k() {
        return Err(Error::invariant(
            "contraction record has a different forest count",
        ));
    }
    for &x in &record.members[1..] {
        if g.is_live(x) {
            return Err(Error::invariant(format!("contracted vertex {x} is live")));
        }
    }
    for &(e, _) in &record.internal {
        if g.contains_edge(e) || f.contains(e) {
            return Err(Error::invariant(format!("internal edge {e} reappeared")));
        }
    }
    for &(e, _) in &record.remapped {
        match g.endpoints(e) {
            Some((a, b)) if a == rep || b == rep => {}
            _ => {
                return Err(Error::invariant(format!(
                    "edge {e} is not attached to supervertex {rep}"
                )))
            }
        }
    }

    for (e, ep) in record.remapped {
        g.endpoints[e.0] = Some(ep);
    }
    g.live_edges += record.internal.len();
    for (e, ep) in record.internal {
        g.endpoints[e.0] = Some(ep);
    }
    for (x, inc) in record.saved_incidence {
        g.incidence[x] = inc;
    }
    for &x in &record.members[1..] {
        g.live[x] = true;
    }
    g.live_vertices += record.members.len() - 1;
    for (i, tree) in record.trees.into_iter().enumerate() {
        for e in tree {
            f.set(e, i);
        }
    }
    Ok(())
}

/// Replays a stack of contraction records in reverse order.
pub fn uncontract_all(
    g: &mut MultiGraph,
    f: &mut ForestFamily,
    records: Vec<ContractionRecord>,
) -> Result<()> {
    for record in records.into_iter().rev() {
        uncontract(g, f, record)?;
    }
    Ok(())
}
