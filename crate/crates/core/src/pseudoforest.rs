//! Maximum subgraph admitting an orientation with indegree at most `k`,
//! extending a given oriented subgraph.
//!
//! Integer s-t flows in the auxiliary network
//!
//! ```text
//!   s --1--> e        for every edge e
//!   e --1--> u, v     for every edge e = (u, v)
//!   v --k--> t        for every vertex v
//! ```
//!
//! correspond one-to-one to oriented subgraphs with indegree at most `k`: an
//! edge is selected when `s -> e` carries flow and points at the endpoint its
//! unit of flow leaves through.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MultiGraph, Orientation, Vertex};
use crate::maxflow::{ArcId, FlowNetwork};

/// The auxiliary flow network together with its index maps.
#[derive(Debug, Clone)]
pub struct GStar {
    pub net: FlowNetwork,
    k: usize,
    edges: Vec<EdgeId>,
    vertices: Vec<Vertex>,
    /// edge id -> position in `edges`
    edge_pos: Vec<Option<usize>>,
    /// vertex -> position in `vertices`
    vertex_pos: Vec<Option<usize>>,
    source_arcs: Vec<ArcId>,
    /// per edge: arcs towards (first endpoint, second endpoint)
    endpoint_arcs: Vec<(ArcId, ArcId)>,
    sink_arcs: Vec<ArcId>,
}

impl GStar {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edge_node(&self, e: EdgeId) -> Option<usize> {
        self.edge_pos.get(e.0).copied().flatten().map(|i| 1 + i)
    }

    pub fn vertex_node(&self, v: Vertex) -> Option<usize> {
        self.vertex_pos
            .get(v)
            .copied()
            .flatten()
            .map(|i| 1 + self.edges.len() + i)
    }

    pub fn source_arc(&self, e: EdgeId) -> Option<ArcId> {
        self.edge_pos
            .get(e.0)
            .copied()
            .flatten()
            .map(|i| self.source_arcs[i])
    }

    pub fn sink_arc(&self, v: Vertex) -> Option<ArcId> {
        self.vertex_pos
            .get(v)
            .copied()
            .flatten()
            .map(|i| self.sink_arcs[i])
    }

    /// Reads the oriented subgraph encoded by the network's current flow.
    pub fn decode(&self, g: &MultiGraph) -> Result<(Vec<EdgeId>, Orientation)> {
        let mut chosen = Vec::new();
        let mut orientation = Orientation::new(g.vertex_slots());
        for (i, &e) in self.edges.iter().enumerate() {
            if self.net.flow(self.source_arcs[i]) == 0 {
                continue;
            }
            let (u, v) = g
                .endpoints(e)
                .ok_or_else(|| Error::invariant(format!("edge {e} vanished from the graph")))?;
            let (to_u, to_v) = self.endpoint_arcs[i];
            let head = match (self.net.flow(to_u), self.net.flow(to_v)) {
                (1, 0) => u,
                (0, 1) => v,
                other => {
                    return Err(Error::invariant(format!(
                        "edge node {e} routes flow {other:?} to its endpoints"
                    )))
                }
            };
            orientation.set(g, e, head)?;
            chosen.push(e);
        }
        Ok((chosen, orientation))
    }
}

/// Builds the network. Node numbering: `s = 0`, then live edges by ascending id,
/// then live vertices by ascending id, then `t`.
pub fn build_gstar(g: &MultiGraph, k: usize) -> Result<GStar> {
    if k < 1 {
        return Err(Error::input("k must be at least 1"));
    }
    let edges: Vec<EdgeId> = g.edge_ids().collect();
    let vertices: Vec<Vertex> = g.vertices().collect();
    let (m, n) = (edges.len(), vertices.len());
    let sink = m + n + 1;
    let mut net = FlowNetwork::new(m + n + 2, 0, sink)?;

    let mut edge_pos = vec![None; g.edge_slots()];
    for (i, &e) in edges.iter().enumerate() {
        edge_pos[e.0] = Some(i);
    }
    let mut vertex_pos = vec![None; g.vertex_slots()];
    for (i, &v) in vertices.iter().enumerate() {
        vertex_pos[v] = Some(i);
    }
    let vnode = |v: Vertex| 1 + m + vertex_pos[v].expect("live vertex");

    let mut source_arcs = Vec::with_capacity(m);
    for i in 0..m {
        source_arcs.push(net.add_arc(0, 1 + i, 1)?);
    }
    let mut endpoint_arcs = Vec::with_capacity(m);
    for (i, &e) in edges.iter().enumerate() {
        let (u, v) = g.endpoints(e).expect("live edge");
        let a = net.add_arc(1 + i, vnode(u), 1)?;
        let b = net.add_arc(1 + i, vnode(v), 1)?;
        endpoint_arcs.push((a, b));
    }
    let mut sink_arcs = Vec::with_capacity(n);
    for i in 0..n {
        sink_arcs.push(net.add_arc(1 + m + i, sink, k as i64)?);
    }

    Ok(GStar {
        net,
        k,
        edges,
        vertices,
        edge_pos,
        vertex_pos,
        source_arcs,
        endpoint_arcs,
        sink_arcs,
    })
}

/// Loads the flow that encodes the oriented subgraph `h`: one unit along
/// `s -> e -> head(e) -> t` per oriented edge.
pub fn flow_from_oriented_subgraph(gs: &mut GStar, g: &MultiGraph, h: &Orientation) -> Result<()> {
    for a in 0..gs.net.arc_count() {
        gs.net.set_flow(a, 0);
    }
    let mut load = vec![0usize; gs.vertices.len()];
    for (e, head) in h.edges() {
        let i = gs
            .edge_pos
            .get(e.0)
            .copied()
            .flatten()
            .ok_or_else(|| Error::input(format!("oriented edge {e} is not in the graph")))?;
        let (u, v) = g.endpoints(e).expect("edge present in network");
        let arc = if head == u {
            gs.endpoint_arcs[i].0
        } else if head == v {
            gs.endpoint_arcs[i].1
        } else {
            return Err(Error::input(format!(
                "head {head} is not an endpoint of {e}"
            )));
        };
        let vi = gs.vertex_pos[head].expect("endpoint is live");
        load[vi] += 1;
        if load[vi] > gs.k {
            return Err(Error::input(format!(
                "vertex {head} has indegree above k = {}",
                gs.k
            )));
        }
        gs.net.set_flow(gs.source_arcs[i], 1);
        gs.net.set_flow(arc, 1);
    }
    for (vi, &l) in load.iter().enumerate() {
        gs.net.set_flow(gs.sink_arcs[vi], l as i64);
    }
    Ok(())
}

/// Result of [`pseudoforests`].
#[derive(Debug, Clone)]
pub struct Pseudoforest {
    /// Selected edges, ascending.
    pub edges: Vec<EdgeId>,
    pub orientation: Orientation,
}

impl Pseudoforest {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Maximum `P ⊇ H` with an orientation of indegree at most `k`.
///
/// `h` is loaded as a warm-start flow and the residual direction `e -> s` of
/// every `e ∈ H` is removed, so `H` stays selected; its edges may be reoriented.
pub fn pseudoforests(g: &MultiGraph, h: &Orientation, k: usize) -> Result<Pseudoforest> {
    if let Some((e, _)) = h.edges().find(|&(e, _)| !g.contains_edge(e)) {
        return Err(Error::input(format!(
            "oriented edge {e} is not in the graph"
        )));
    }
    let mut gs = build_gstar(g, k)?;
    flow_from_oriented_subgraph(&mut gs, g, h)?;
    for (e, _) in h.edges() {
        let arc = gs.source_arc(e).expect("edge in network");
        gs.net.forbid_reverse(arc);
    }
    let value = gs.net.max_flow()?;
    let (edges, orientation) = gs.decode(g)?;
    if edges.len() as i64 != value {
        return Err(Error::invariant(
            "decoded subgraph size differs from flow value",
        ));
    }
    Ok(Pseudoforest { edges, orientation })
}
