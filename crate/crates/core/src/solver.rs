//! Contraction-accelerated k-forest solver.
//!
//! Each round orients the current solution `F`, grows it to a maximum
//! indegree-bounded subgraph `P ⊇ F`, solves k-forest exactly on `P` (warm
//! started from `F`), and contracts every component of the resulting top
//! clump. Rounds stop once the solution size, counting edges already moved
//! into contraction records, stops growing; the records are then unwound.

use num_bigint::BigUint;
use serde::Serialize;

use crate::clump::top_clump;
use crate::error::{Error, Result};
use crate::exact::PARTITION_ORACLE_MAX_VERTICES;
use crate::exact::{bounded_indegree_forests, partition_opt_certificate, solve_kforest};
use crate::graph::{
    contract, orient_forests, uncontract_all, ContractionRecord, EdgeId, ForestFamily, MultiGraph,
};
use crate::pseudoforest::pseudoforests;
use crate::unionfind::UnionFind;

/// What one round did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IterationRecord {
    /// |F| when the round started.
    pub forest_before: usize,
    /// Largest indegree of the forest-root orientation of F.
    pub max_indegree: usize,
    /// |P|.
    pub pseudoforest: usize,
    /// Whether every edge of F survived into P.
    pub forest_kept: bool,
    /// |H|, the optimum on P.
    pub solution: usize,
    pub clump_edges: usize,
    /// Vertex counts of the contracted clump components.
    pub contracted: Vec<usize>,
    /// |F'| after contraction.
    pub forest_after: usize,
    /// |F'| plus every forest edge held in contraction records so far.
    pub cumulative: usize,
    pub live_vertices_after: usize,
    pub flow_calls: usize,
}

/// Trace of the rounds spent on one connected component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentTrace {
    pub vertices: usize,
    pub edges: usize,
    /// ⌈log_{(k+1)/k}(k·n)⌉ for this component.
    pub iteration_bound: usize,
    pub iterations: Vec<IterationRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub k: usize,
    pub vertices: usize,
    pub edges: usize,
    pub self_loops_dropped: usize,
    pub size: usize,
    /// Rounds of the busiest component.
    pub iterations: usize,
    /// ⌈log_{(k+1)/k}(k·n)⌉ for the whole graph.
    pub iteration_bound: usize,
    pub flow_calls: usize,
    pub components: Vec<ComponentTrace>,
}

/// Smallest `j ≥ 0` with `((k+1)/k)^j ≥ k·n`, in exact integer arithmetic.
pub fn iteration_bound(k: usize, n: usize) -> usize {
    let target = BigUint::from(k) * BigUint::from(n);
    let mut num = BigUint::from(1u32); // (k+1)^j
    let mut den = BigUint::from(1u32); // k^j
    let mut j = 0;
    while num < &target * &den {
        num *= k + 1;
        den *= k;
        j += 1;
    }
    j
}

/// Mutable state of one solve on a (connected) graph.
#[derive(Debug, Clone)]
pub struct Solver {
    graph: MultiGraph,
    family: ForestFamily,
    records: Vec<ContractionRecord>,
    contracted_edges: usize,
    iterations: Vec<IterationRecord>,
    bound: usize,
}

impl Solver {
    pub fn new(graph: MultiGraph, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::input("k must be at least 1"));
        }
        let bound = iteration_bound(k, graph.vertex_count());
        Ok(Solver {
            graph,
            family: ForestFamily::new(k),
            records: Vec::new(),
            contracted_edges: 0,
            iterations: Vec::new(),
            bound,
        })
    }

    pub fn k(&self) -> usize {
        self.family.k()
    }

    /// The current, possibly contracted, graph.
    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    /// The current solution on [`Solver::graph`].
    pub fn family(&self) -> &ForestFamily {
        &self.family
    }

    /// Solution size in terms of the original graph.
    pub fn cumulative_size(&self) -> usize {
        self.family.len() + self.contracted_edges
    }

    pub fn iterations(&self) -> &[IterationRecord] {
        &self.iterations
    }

    pub fn iteration_bound(&self) -> usize {
        self.bound
    }

    /// Rounds allowed before the solve is declared broken.
    pub fn iteration_cap(&self) -> usize {
        self.bound + 2
    }

    /// Runs one round: orient, pseudoforests, k-forest on P, top clump, contract.
    pub fn iterate_once(&mut self) -> Result<IterationRecord> {
        let k = self.k();
        let forest_before = self.family.len();

        let orientation = orient_forests(&self.graph, &self.family)?;
        let max_indegree = orientation.max_indegree();
        if max_indegree > k {
            return Err(Error::invariant(format!(
                "forest orientation has indegree {max_indegree} > k"
            )));
        }

        let p = pseudoforests(&self.graph, &orientation, k)?;
        let forest_kept = self.family.edges().all(|e| p.orientation.contains(e));
        if !forest_kept {
            return Err(Error::invariant(
                "pseudoforest dropped an edge of the current solution",
            ));
        }

        let p_graph = self.graph.edge_subgraph(&p.edges)?;
        let h = bounded_indegree_forests(&p_graph, &p.orientation, k, Some(&self.family))?;
        let solution = h.len();
        if solution < forest_before {
            return Err(Error::invariant(
                "optimum on P is smaller than the current solution",
            ));
        }
        self.family = h;

        let clump = top_clump(&self.graph, &self.family)?;
        let mut contracted = Vec::with_capacity(clump.components.len());
        for comp in &clump.components {
            let record =
                contract(&mut self.graph, &mut self.family, &comp.vertices).map_err(|e| {
                    Error::invariant(format!("contracting a clump component failed: {e}"))
                })?;
            self.contracted_edges += record.tree_edge_count();
            contracted.push(comp.vertices.len());
            self.records.push(record);
        }

        let record = IterationRecord {
            forest_before,
            max_indegree,
            pseudoforest: p.len(),
            forest_kept,
            solution,
            clump_edges: clump.edges.len(),
            contracted,
            forest_after: self.family.len(),
            cumulative: self.cumulative_size(),
            live_vertices_after: self.graph.vertex_count(),
            flow_calls: 1 + clump.flow_calls,
        };
        self.iterations.push(record.clone());
        Ok(record)
    }

    /// Iterates until the cumulative size stops growing.
    pub fn run(&mut self) -> Result<()> {
        loop {
            if self.iterations.len() >= self.iteration_cap() {
                return Err(Error::invariant(format!(
                    "no convergence within {} rounds",
                    self.iteration_cap()
                )));
            }
            let before = self.cumulative_size();
            self.iterate_once()?;
            if self.cumulative_size() == before {
                return Ok(());
            }
        }
    }

    /// Unwinds all contractions; returns the restored graph, the solution on
    /// it and the per-round records.
    pub fn finish(mut self) -> Result<(MultiGraph, ForestFamily, Vec<IterationRecord>)> {
        uncontract_all(&mut self.graph, &mut self.family, self.records)?;
        Ok((self.graph, self.family, self.iterations))
    }
}

/// Optimal k-forest family for `g`, solving each connected component separately.
pub fn forests(g: &MultiGraph, k: usize) -> Result<(ForestFamily, SolveStats)> {
    if k < 1 {
        return Err(Error::input("k must be at least 1"));
    }
    let mut family = ForestFamily::new(k);
    let mut stats = SolveStats {
        k,
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        self_loops_dropped: g.self_loops_dropped(),
        iteration_bound: iteration_bound(k, g.vertex_count()),
        ..SolveStats::default()
    };
    for comp in g.components() {
        if comp.len() < 2 {
            continue;
        }
        let sub = g.induced_subgraph(&comp)?;
        let edges = sub.graph.edge_count();
        let mut solver = Solver::new(sub.graph, k)?;
        solver.run()?;
        let bound = solver.iteration_bound();
        let (_, local, iterations) = solver.finish()?;
        for (e, i) in local.assigned() {
            family.set(sub.edge_map[e.index()], i);
        }
        stats.iterations = stats.iterations.max(iterations.len());
        stats.flow_calls += iterations.iter().map(|r| r.flow_calls).sum::<usize>();
        stats.components.push(ComponentTrace {
            vertices: comp.len(),
            edges,
            iteration_bound: bound,
            iterations,
        });
    }
    stats.size = family.len();
    Ok((family, stats))
}

/// Which independent optimum, if any, a verification compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimalityCheck {
    Skip,
    /// Partition enumeration; small graphs only.
    Partition,
    /// Matroid-union augmentation from scratch.
    Augment,
    /// Partition when the graph is small enough, augmentation otherwise.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CheckFailure {
    ForestCountMismatch { expected: usize, found: usize },
    UnknownEdge { edge: EdgeId },
    ForestIndexOutOfRange { edge: EdgeId, forest: usize },
    DuplicateAssignment { edge: EdgeId },
    Cycle { forest: usize, edges: Vec<EdgeId> },
    Suboptimal { size: usize, optimum: usize },
    OracleUnavailable { reason: String },
}

impl std::fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // edge ids are shown 1-based, as in the text formats
        let show = |edges: &[EdgeId]| {
            edges
                .iter()
                .map(|e| (e.index() + 1).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        match self {
            CheckFailure::ForestCountMismatch { expected, found } => {
                write!(
                    f,
                    "forest count: expected k = {expected}, family has {found}"
                )
            }
            CheckFailure::UnknownEdge { edge } => {
                write!(
                    f,
                    "existence: edge {} is not in the graph",
                    edge.index() + 1
                )
            }
            CheckFailure::ForestIndexOutOfRange { edge, forest } => write!(
                f,
                "forest index: edge {} assigned to forest {} out of range",
                edge.index() + 1,
                forest + 1
            ),
            CheckFailure::DuplicateAssignment { edge } => {
                write!(
                    f,
                    "disjointness: edge {} assigned more than once",
                    edge.index() + 1
                )
            }
            CheckFailure::Cycle { forest, edges } => write!(
                f,
                "acyclicity: forest {} contains the cycle {}",
                forest + 1,
                show(edges)
            ),
            CheckFailure::Suboptimal { size, optimum } => {
                write!(
                    f,
                    "optimality: size {size} but the optimum is {optimum} (gap {})",
                    optimum - size
                )
            }
            CheckFailure::OracleUnavailable { reason } => write!(f, "optimality: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub size: usize,
    pub optimum: Option<usize>,
    pub failures: Vec<CheckFailure>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks raw `(edge, forest)` pairs: existence, index range, disjointness,
/// acyclicity and, optionally, optimality.
pub fn verify_assignments(
    g: &MultiGraph,
    k: usize,
    pairs: &[(EdgeId, usize)],
    check: OptimalityCheck,
) -> VerificationReport {
    let mut failures = Vec::new();
    let mut seen = vec![false; g.edge_slots()];
    let mut ufs: Vec<UnionFind> = (0..k).map(|_| UnionFind::new(g.vertex_slots())).collect();
    let mut adjacency: Vec<Vec<Vec<(EdgeId, usize)>>> = vec![vec![Vec::new(); g.vertex_slots()]; k];

    for &(e, i) in pairs {
        let Some((u, v)) = g.endpoints(e) else {
            failures.push(CheckFailure::UnknownEdge { edge: e });
            continue;
        };
        if seen[e.index()] {
            failures.push(CheckFailure::DuplicateAssignment { edge: e });
            continue;
        }
        seen[e.index()] = true;
        if i >= k {
            failures.push(CheckFailure::ForestIndexOutOfRange { edge: e, forest: i });
            continue;
        }
        if ufs[i].union(u, v) {
            adjacency[i][u].push((e, v));
            adjacency[i][v].push((e, u));
        } else {
            let mut edges = tree_path(&adjacency[i], u, v);
            edges.push(e);
            edges.sort_unstable();
            failures.push(CheckFailure::Cycle { forest: i, edges });
        }
    }

    let size = pairs.len();
    let mut optimum = None;
    let method = match check {
        OptimalityCheck::Auto if g.vertex_count() <= PARTITION_ORACLE_MAX_VERTICES => {
            OptimalityCheck::Partition
        }
        OptimalityCheck::Auto => OptimalityCheck::Augment,
        other => other,
    };
    let oracle = match method {
        OptimalityCheck::Partition => Some(partition_opt_certificate(g, k).map(|c| c.value)),
        OptimalityCheck::Augment => Some(solve_kforest(g, k, None).map(|f| f.len())),
        _ => None,
    };
    match oracle {
        Some(Ok(opt)) => {
            optimum = Some(opt);
            if failures.is_empty() && size < opt {
                failures.push(CheckFailure::Suboptimal { size, optimum: opt });
            }
        }
        Some(Err(err)) => failures.push(CheckFailure::OracleUnavailable {
            reason: err.to_string(),
        }),
        None => {}
    }
    VerificationReport {
        size,
        optimum,
        failures,
    }
}

/// [`verify_assignments`] for an in-memory family.
pub fn verify_solution(
    g: &MultiGraph,
    fam: &ForestFamily,
    k: usize,
    check: OptimalityCheck,
) -> VerificationReport {
    let pairs: Vec<(EdgeId, usize)> = fam.assigned().collect();
    let mut report = verify_assignments(g, k, &pairs, check);
    if fam.k() != k {
        report.failures.insert(
            0,
            CheckFailure::ForestCountMismatch {
                expected: k,
                found: fam.k(),
            },
        );
    }
    report
}

/// Edge ids on the unique path from `from` to `to` in a forest adjacency.
fn tree_path(adjacency: &[Vec<(EdgeId, usize)>], from: usize, to: usize) -> Vec<EdgeId> {
    let mut via: Vec<Option<(EdgeId, usize)>> = vec![None; adjacency.len()];
    let mut seen = vec![false; adjacency.len()];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        if x == to {
            break;
        }
        for &(e, y) in &adjacency[x] {
            if !seen[y] {
                seen[y] = true;
                via[y] = Some((e, x));
                stack.push(y);
            }
        }
    }
    let mut path = Vec::new();
    let mut x = to;
    while let Some((e, prev)) = via[x] {
        path.push(e);
        x = prev;
    }
    path
}
