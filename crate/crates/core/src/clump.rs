//! Top clump of a forest family: the largest edge set `L ⊆ F` with
//! `|L| = k·rk(L)`.
//!
//! Components of the top clump are exactly the inclusion-maximal tight vertex
//! sets, i.e. sets `S` with `|λ_F(S)| = k(|S| − 1)`. Each one is found by a
//! rooted flow computation: in the network
//!
//! ```text
//!   s --1--> e --1--> endpoints of e --k--> t      (root r: capacity 0 to t)
//! ```
//!
//! built over the F-edges of one F-component, the cut with vertex side `A ∋ r`
//! costs `|E_C| − |λ_F(A)| + k(|A| − 1)`, which is minimal exactly when `A` is
//! tight. The maximal minimum cut therefore yields the maximal tight set around `r`.

use crate::error::{Error, Result};
use crate::graph::{induced_edges_where, spanning_rank, EdgeId, ForestFamily, MultiGraph, Vertex};
use crate::maxflow::{ArcId, FlowNetwork};
use crate::unionfind::UnionFind;

/// One connected component of the top clump.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClumpComponent {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeId>,
    /// `trees[i]`: the edges of forest `i` inside the component, a spanning tree of it.
    pub trees: Vec<Vec<EdgeId>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClumpReport {
    /// All clump edges, ascending.
    pub edges: Vec<EdgeId>,
    /// Components ordered by smallest vertex.
    pub components: Vec<ClumpComponent>,
    /// Max-flow computations spent.
    pub flow_calls: usize,
}

impl ClumpReport {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Rooted tight-set network over the F-edges of one vertex set.
struct TightSetNetwork {
    net: FlowNetwork,
    k: usize,
    vertices: Vec<Vertex>,
    edge_count: usize,
    sink_arcs: Vec<ArcId>,
    root: Option<usize>,
}

impl TightSetNetwork {
    fn new(g: &MultiGraph, f: &ForestFamily, vertices: Vec<Vertex>) -> Result<Self> {
        let k = f.k();
        let edges = induced_edges_where(g, &vertices, |e| f.contains(e))?;
        let (mc, nc) = (edges.len(), vertices.len());
        let sink = mc + nc + 1;
        let mut net = FlowNetwork::new(mc + nc + 2, 0, sink)?;
        let vnode = |v: Vertex| 1 + mc + vertices.binary_search(&v).expect("member");
        for i in 0..mc {
            net.add_arc(0, 1 + i, 1)?;
        }
        for (i, &e) in edges.iter().enumerate() {
            let (u, v) = g.endpoints(e).expect("live edge");
            net.add_arc(1 + i, vnode(u), 1)?;
            net.add_arc(1 + i, vnode(v), 1)?;
        }
        let mut sink_arcs = Vec::with_capacity(nc);
        for i in 0..nc {
            sink_arcs.push(net.add_arc(1 + mc + i, sink, k as i64)?);
        }
        Ok(TightSetNetwork {
            net,
            k,
            vertices,
            edge_count: mc,
            sink_arcs,
            root: None,
        })
    }

    /// Maximal tight set containing `vertices[r]`, as local indices.
    fn extract(&mut self, r: usize) -> Result<Vec<usize>> {
        if let Some(old) = self.root.replace(r) {
            self.net.set_capacity(self.sink_arcs[old], self.k as i64)?;
        }
        self.net.set_capacity(self.sink_arcs[r], 0)?;
        let value = self.net.max_flow()?;
        if value != self.edge_count as i64 {
            return Err(Error::Precondition(
                "forest edges of the component are not a union of k forests".into(),
            ));
        }
        let base = 1 + self.edge_count;
        let side = self.net.source_side_reaching(base + r)?;
        Ok(side
            .into_iter()
            .filter(|&x| x >= base && x < base + self.vertices.len())
            .map(|x| x - base)
            .collect())
    }
}

/// Unique maximal `A ∋ r` with `|λ_F(A)| = k(|A| − 1)`, within the F-edges
/// induced by `component`. Returns `{r}` when no larger tight set exists.
pub fn tight_set_from_root(
    g: &MultiGraph,
    f: &ForestFamily,
    component: &[Vertex],
    r: Vertex,
) -> Result<Vec<Vertex>> {
    let mut vertices = component.to_vec();
    vertices.sort_unstable();
    vertices.dedup();
    let root = vertices
        .binary_search(&r)
        .map_err(|_| Error::input(format!("root {r} is not in the component")))?;
    let mut tsn = TightSetNetwork::new(g, f, vertices)?;
    let local = tsn.extract(root)?;
    Ok(local.into_iter().map(|i| tsn.vertices[i]).collect())
}

/// Connected components of the live graph restricted to F-edges (singletons included).
fn forest_components(g: &MultiGraph, f: &ForestFamily) -> Vec<Vec<Vertex>> {
    let mut uf = UnionFind::new(g.vertex_slots());
    for e in f.edges() {
        let (u, v) = g.endpoints(e).expect("validated family");
        uf.union(u, v);
    }
    let mut slot = vec![usize::MAX; g.vertex_slots()];
    let mut out: Vec<Vec<Vertex>> = Vec::new();
    for v in g.vertices() {
        let root = uf.find(v);
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            out.push(Vec::new());
        }
        out[slot[root]].push(v);
    }
    out
}

fn component_report(
    g: &MultiGraph,
    f: &ForestFamily,
    vertices: Vec<Vertex>,
) -> Result<ClumpComponent> {
    let k = f.k();
    let edges = induced_edges_where(g, &vertices, |e| f.contains(e))?;
    if edges.len() != k * (vertices.len() - 1) {
        return Err(Error::invariant(format!(
            "tight set of {} vertices carries {} forest edges",
            vertices.len(),
            edges.len()
        )));
    }
    let mut trees = vec![Vec::new(); k];
    for &e in &edges {
        trees[f.forest_of(e).expect("forest edge")].push(e);
    }
    if trees.iter().any(|t| t.len() + 1 != vertices.len()) {
        return Err(Error::invariant("clump component is not k spanning trees"));
    }
    Ok(ClumpComponent {
        vertices,
        edges,
        trees,
    })
}

/// Computes the top clump of `f`.
///
/// Roots are scanned in ascending vertex order within each F-component;
/// vertices already inside an extracted tight set are not used as roots again.
pub fn top_clump(g: &MultiGraph, f: &ForestFamily) -> Result<ClumpReport> {
    f.validate(g)?;
    let k = f.k();
    let mut report = ClumpReport::default();
    for comp in forest_components(g, f) {
        // a tight set with two or more vertices needs at least k edges
        if comp.len() < 2 {
            continue;
        }
        let mut tsn = TightSetNetwork::new(g, f, comp)?;
        if tsn.edge_count < k {
            continue;
        }
        let mut claimed = vec![false; tsn.vertices.len()];
        for r in 0..tsn.vertices.len() {
            if claimed[r] {
                continue;
            }
            let set = tsn.extract(r)?;
            report.flow_calls += 1;
            for &i in &set {
                claimed[i] = true;
            }
            if set.len() >= 2 {
                let vertices: Vec<Vertex> = set.iter().map(|&i| tsn.vertices[i]).collect();
                report.components.push(component_report(g, f, vertices)?);
            }
        }
    }
    report.components.sort_by_key(|c| c.vertices[0]);
    report.edges = report
        .components
        .iter()
        .flat_map(|c| c.edges.iter().copied())
        .collect();
    report.edges.sort_unstable();
    Ok(report)
}

/// Largest live vertex count accepted by [`brute_force_top_clump`].
pub const BRUTE_FORCE_MAX_VERTICES: usize = 10;

/// Top clump by enumerating every vertex subset and keeping the inclusion-maximal tight ones.
pub fn brute_force_top_clump(g: &MultiGraph, f: &ForestFamily) -> Result<Vec<EdgeId>> {
    let verts: Vec<Vertex> = g.vertices().collect();
    let n = verts.len();
    if n > BRUTE_FORCE_MAX_VERTICES {
        return Err(Error::Capacity(format!(
            "subset enumeration supports at most {BRUTE_FORCE_MAX_VERTICES} vertices, got {n}"
        )));
    }
    let k = f.k();
    let bit = |v: Vertex| 1u32 << verts.binary_search(&v).expect("live vertex");
    let forest_edges: Vec<(EdgeId, u32)> = f
        .edges()
        .map(|e| {
            let (u, v) = g.endpoints(e).expect("forest edge in graph");
            (e, bit(u) | bit(v))
        })
        .collect();
    let tight: Vec<u32> = (0u32..(1 << n))
        .filter(|mask| mask.count_ones() >= 2)
        .filter(|&mask| {
            let inside = forest_edges.iter().filter(|&&(_, m)| m & mask == m).count();
            inside == k * (mask.count_ones() as usize - 1)
        })
        .collect();
    let maximal: Vec<u32> = tight
        .iter()
        .copied()
        .filter(|&a| !tight.iter().any(|&b| b != a && a & b == a))
        .collect();
    let mut out: Vec<EdgeId> = forest_edges
        .iter()
        .filter(|&&(_, m)| maximal.iter().any(|&s| m & s == m))
        .map(|&(e, _)| e)
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// True iff `l ⊆ F` satisfies `|l| = k·rk(l)`.
pub fn is_clump(g: &MultiGraph, f: &ForestFamily, l: &[EdgeId]) -> Result<bool> {
    if let Some(e) = l.iter().find(|&&e| !f.contains(e)) {
        return Err(Error::input(format!("edge {e} is not in the family")));
    }
    Ok(l.len() == f.k() * spanning_rank(g, l)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::solve_kforest;

    fn k4_edges(offset: usize) -> Vec<(Vertex, Vertex)> {
        let o = offset;
        vec![
            (o, o + 1),
            (o, o + 2),
            (o, o + 3),
            (o + 1, o + 2),
            (o + 1, o + 3),
            (o + 2, o + 3),
        ]
    }

    fn k4_two_trees() -> (MultiGraph, ForestFamily) {
        let g = MultiGraph::from_edges(4, &k4_edges(0)).unwrap();
        let f = solve_kforest(&g, 2, None).unwrap();
        assert_eq!(f.len(), 6);
        (g, f)
    }

    #[test]
    fn path_has_only_singleton_tight_sets() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let f = solve_kforest(&g, 2, None).unwrap();
        for r in 0..4 {
            assert_eq!(
                tight_set_from_root(&g, &f, &[0, 1, 2, 3], r).unwrap(),
                vec![r]
            );
        }
        assert!(top_clump(&g, &f).unwrap().is_empty());
        assert!(tight_set_from_root(&g, &f, &[0, 1], 3).is_err());
    }

    #[test]
    fn k4_is_one_tight_set() {
        let (g, f) = k4_two_trees();
        for r in 0..4 {
            assert_eq!(
                tight_set_from_root(&g, &f, &[0, 1, 2, 3], r).unwrap(),
                vec![0, 1, 2, 3]
            );
        }
        let report = top_clump(&g, &f).unwrap();
        assert_eq!(report.edges.len(), 6);
        assert_eq!(report.components.len(), 1);
        assert_eq!(report.components[0].vertices, vec![0, 1, 2, 3]);
        assert_eq!(report.edges, brute_force_top_clump(&g, &f).unwrap());
    }

    #[test]
    fn double_k4_sharing_a_vertex() {
        let mut edges = k4_edges(0);
        edges.extend(k4_edges(3));
        let g = MultiGraph::from_edges(7, &edges).unwrap();
        let f = solve_kforest(&g, 2, None).unwrap();
        assert_eq!(f.len(), 12);
        let all: Vec<Vertex> = (0..7).collect();
        for r in 0..7 {
            assert_eq!(tight_set_from_root(&g, &f, &all, r).unwrap(), all);
        }
        let report = top_clump(&g, &f).unwrap();
        assert_eq!(report.components.len(), 1);
        assert_eq!(report.components[0].vertices, all);
        assert_eq!(report.edges, brute_force_top_clump(&g, &f).unwrap());
    }

    #[test]
    fn k1_clump_is_whole_forest() {
        let g = MultiGraph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (2, 0), (4, 5)]).unwrap();
        let f = solve_kforest(&g, 1, None).unwrap();
        let report = top_clump(&g, &f).unwrap();
        let all: Vec<EdgeId> = f.edges().collect();
        assert_eq!(report.edges, all);
        assert_eq!(report.components.len(), 2);
        assert_eq!(report.components[0].vertices, vec![0, 1, 2]);
        assert_eq!(report.components[1].vertices, vec![3, 4, 5]);
    }

    #[test]
    fn k4_with_pendant() {
        let mut edges = k4_edges(0);
        edges.push((3, 4));
        let g = MultiGraph::from_edges(5, &edges).unwrap();
        let f = solve_kforest(&g, 2, None).unwrap();
        assert_eq!(f.len(), 7);
        let expected: Vec<EdgeId> = (0..6).map(EdgeId).collect();
        assert_eq!(brute_force_top_clump(&g, &f).unwrap(), expected);
        assert_eq!(top_clump(&g, &f).unwrap().edges, expected);
    }

    #[test]
    fn empty_family() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let f = ForestFamily::new(2);
        assert!(brute_force_top_clump(&g, &f).unwrap().is_empty());
        assert!(top_clump(&g, &f).unwrap().is_empty());
        assert!(matches!(
            brute_force_top_clump(&MultiGraph::new(11), &f),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn clump_predicate() {
        let path = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let f1 = solve_kforest(&path, 1, None).unwrap();
        let all: Vec<EdgeId> = f1.edges().collect();
        assert!(is_clump(&path, &f1, &all).unwrap());
        let f2 = solve_kforest(&path, 2, None).unwrap();
        assert!(!is_clump(&path, &f2, &all).unwrap());
        let (g, f) = k4_two_trees();
        let all: Vec<EdgeId> = f.edges().collect();
        assert!(is_clump(&g, &f, &all).unwrap());
        let partial = ForestFamily::from_assignments(2, &[(EdgeId(0), 0)]).unwrap();
        assert!(is_clump(&g, &partial, &[EdgeId(1)]).is_err());
    }
}
