//! Integer maximum flow by blocking flows on level graphs.
//!
//! Arcs keep their flow explicitly, so a network can be preloaded with a
//! feasible flow and then maximized from there. The reverse residual direction
//! of an arc can be forbidden, which pins the arc's current flow from below.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub type ArcId = usize;

const UNREACHED: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    source: usize,
    sink: usize,
    tail: Vec<usize>,
    head: Vec<usize>,
    cap: Vec<i64>,
    flow: Vec<i64>,
    forbidden_reverse: Vec<bool>,
    /// Residual arc ids per node: `2a` is arc `a` forward, `2a + 1` its reverse.
    adj: Vec<Vec<usize>>,
    solved: bool,
    preloaded: bool,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Result<Self> {
        if source >= nodes || sink >= nodes {
            return Err(Error::input("source or sink out of range"));
        }
        if source == sink {
            return Err(Error::input("source and sink must differ"));
        }
        Ok(FlowNetwork {
            source,
            sink,
            tail: Vec::new(),
            head: Vec::new(),
            cap: Vec::new(),
            flow: Vec::new(),
            forbidden_reverse: Vec::new(),
            adj: vec![Vec::new(); nodes],
            solved: false,
            preloaded: false,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn arc_count(&self) -> usize {
        self.tail.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn add_arc(&mut self, tail: usize, head: usize, capacity: i64) -> Result<ArcId> {
        let n = self.node_count();
        if tail >= n || head >= n {
            return Err(Error::input(format!("arc ({tail}, {head}) out of range")));
        }
        if capacity < 0 {
            return Err(Error::input("arc capacity must be non-negative"));
        }
        let a = self.tail.len();
        self.tail.push(tail);
        self.head.push(head);
        self.cap.push(capacity);
        self.flow.push(0);
        self.forbidden_reverse.push(false);
        self.adj[tail].push(2 * a);
        self.adj[head].push(2 * a + 1);
        self.solved = false;
        Ok(a)
    }

    pub fn arc(&self, a: ArcId) -> (usize, usize) {
        (self.tail[a], self.head[a])
    }

    pub fn capacity(&self, a: ArcId) -> i64 {
        self.cap[a]
    }

    pub fn flow(&self, a: ArcId) -> i64 {
        self.flow[a]
    }

    /// Preloads flow on an arc. Feasibility is checked when `max_flow` runs.
    pub fn set_flow(&mut self, a: ArcId, flow: i64) {
        self.flow[a] = flow;
        self.solved = false;
        self.preloaded = true;
    }

    /// Removes the residual direction head -> tail of arc `a`; its flow can then only grow.
    pub fn forbid_reverse(&mut self, a: ArcId) {
        self.forbidden_reverse[a] = true;
        self.solved = false;
    }

    /// Changes an arc's capacity. If the arc carried more flow than the new
    /// capacity, the excess is rerouted through the residual graph, or sent back
    /// towards the source (lowering the flow value) when no reroute exists.
    pub fn set_capacity(&mut self, a: ArcId, capacity: i64) -> Result<()> {
        if capacity < 0 {
            return Err(Error::input("arc capacity must be non-negative"));
        }
        self.cap[a] = capacity;
        self.solved = false;
        let excess = self.flow[a] - capacity;
        if excess <= 0 {
            return Ok(());
        }
        self.flow[a] = capacity;
        let (x, y) = (self.tail[a], self.head[a]);
        // x now has surplus and y a deficit of `excess` units
        let mut rest = excess - self.route(x, y, excess);
        if rest > 0 {
            let back = if x == self.source {
                rest
            } else {
                self.route(x, self.source, rest)
            };
            let pulled = if y == self.sink {
                rest
            } else {
                self.route(self.sink, y, rest)
            };
            if back != rest || pulled != rest {
                return Err(Error::invariant(
                    "could not cancel excess flow after lowering a capacity",
                ));
            }
            rest = 0;
        }
        debug_assert_eq!(rest, 0);
        Ok(())
    }

    /// Net flow leaving the source.
    pub fn value(&self) -> i64 {
        self.adj[self.source]
            .iter()
            .map(|&r| {
                let f = self.flow[r >> 1];
                if r & 1 == 0 {
                    f
                } else {
                    -f
                }
            })
            .sum()
    }

    /// Checks capacity bounds and conservation at every inner node.
    pub fn check_feasible(&self) -> Result<()> {
        let mut balance = vec![0i64; self.node_count()];
        for a in 0..self.arc_count() {
            if self.flow[a] < 0 || self.flow[a] > self.cap[a] {
                return Err(Error::input(format!(
                    "arc {a} carries flow {} outside [0, {}]",
                    self.flow[a], self.cap[a]
                )));
            }
            balance[self.tail[a]] -= self.flow[a];
            balance[self.head[a]] += self.flow[a];
        }
        for (v, &b) in balance.iter().enumerate() {
            if v != self.source && v != self.sink && b != 0 {
                return Err(Error::input(format!(
                    "flow conservation violated at node {v} (imbalance {b})"
                )));
            }
        }
        Ok(())
    }

    /// Maximizes the flow starting from the current (feasible) flow and
    /// returns the total value, preloaded amount included.
    pub fn max_flow(&mut self) -> Result<i64> {
        if self.preloaded {
            self.check_feasible()?;
            self.preloaded = false;
        }
        let n = self.node_count();
        let mut level = vec![UNREACHED; n];
        let mut iter = vec![0usize; n];
        while self.build_levels(&mut level) {
            iter.fill(0);
            self.blocking_flow(&level, &mut iter);
        }
        self.solved = true;
        Ok(self.value())
    }

    /// Source side of the inclusion-maximal minimum cut: every node from which
    /// the sink is unreachable in the residual graph. Sorted ascending.
    pub fn maximal_min_cut_source_side(&self) -> Result<Vec<usize>> {
        if !self.solved {
            return Err(Error::State(
                "maximal_min_cut_source_side called before max_flow".into(),
            ));
        }
        let reaches = self.reaches_sink();
        if reaches[self.source] {
            return Err(Error::invariant(
                "sink reachable from source after max_flow",
            ));
        }
        Ok((0..self.node_count()).filter(|&v| !reaches[v]).collect())
    }

    /// Nodes of the maximal minimum cut's source side that can reach `target`
    /// in the residual graph, `target` included. Empty when `target` itself
    /// reaches the sink. Sorted ascending.
    ///
    /// The search only expands from nodes already known to be on the source
    /// side, so it never scans the whole network when the answer is small.
    pub fn source_side_reaching(&self, target: usize) -> Result<Vec<usize>> {
        if !self.solved {
            return Err(Error::State(
                "source_side_reaching called before max_flow".into(),
            ));
        }
        let mut probe = SinkProbe::new(self.node_count());
        if probe.reaches_sink(self, target) {
            return Ok(Vec::new());
        }
        let mut side = vec![target];
        let mut in_side = vec![false; self.node_count()];
        in_side[target] = true;
        let mut next = 0;
        while next < side.len() {
            let x = side[next];
            next += 1;
            for &r in &self.adj[x] {
                // partner of r is the residual arc res_head(r) -> x
                let p = self.res_head(r);
                if in_side[p] || self.residual(r ^ 1) == 0 {
                    continue;
                }
                if !probe.reaches_sink(self, p) {
                    in_side[p] = true;
                    side.push(p);
                }
            }
        }
        side.sort_unstable();
        Ok(side)
    }

    /// Sum of capacities of arcs leaving the given node set.
    pub fn cut_capacity(&self, side: &[usize]) -> i64 {
        let mut inside = vec![false; self.node_count()];
        for &v in side {
            inside[v] = true;
        }
        (0..self.arc_count())
            .filter(|&a| inside[self.tail[a]] && !inside[self.head[a]])
            .map(|a| self.cap[a])
            .sum()
    }

    #[inline]
    fn residual(&self, r: usize) -> i64 {
        let a = r >> 1;
        if r & 1 == 0 {
            self.cap[a] - self.flow[a]
        } else if self.forbidden_reverse[a] {
            0
        } else {
            self.flow[a]
        }
    }

    #[inline]
    fn res_head(&self, r: usize) -> usize {
        let a = r >> 1;
        if r & 1 == 0 {
            self.head[a]
        } else {
            self.tail[a]
        }
    }

    #[inline]
    fn res_tail(&self, r: usize) -> usize {
        self.res_head(r ^ 1)
    }

    #[inline]
    fn push(&mut self, r: usize, amount: i64) {
        let a = r >> 1;
        if r & 1 == 0 {
            self.flow[a] += amount;
        } else {
            self.flow[a] -= amount;
        }
    }

    fn build_levels(&self, level: &mut [u32]) -> bool {
        level.fill(UNREACHED);
        level[self.source] = 0;
        let mut queue = VecDeque::from([self.source]);
        while let Some(v) = queue.pop_front() {
            for &r in &self.adj[v] {
                let w = self.res_head(r);
                if level[w] == UNREACHED && self.residual(r) > 0 {
                    level[w] = level[v] + 1;
                    if w == self.sink {
                        return true;
                    }
                    queue.push_back(w);
                }
            }
        }
        false
    }

    fn blocking_flow(&mut self, level: &[u32], iter: &mut [usize]) -> i64 {
        let (s, t) = (self.source, self.sink);
        let mut total = 0;
        let mut path: Vec<usize> = Vec::new();
        let mut v = s;
        loop {
            if v == t {
                let bottleneck = path
                    .iter()
                    .map(|&r| self.residual(r))
                    .min()
                    .expect("non-empty path");
                for &r in &path {
                    self.push(r, bottleneck);
                }
                total += bottleneck;
                let j = path
                    .iter()
                    .position(|&r| self.residual(r) == 0)
                    .expect("some arc saturates");
                path.truncate(j);
                v = path.last().map_or(s, |&r| self.res_head(r));
                continue;
            }
            let mut advanced = false;
            while iter[v] < self.adj[v].len() {
                let r = self.adj[v][iter[v]];
                let w = self.res_head(r);
                if level[w] != UNREACHED && level[w] == level[v] + 1 && self.residual(r) > 0 {
                    path.push(r);
                    v = w;
                    advanced = true;
                    break;
                }
                iter[v] += 1;
            }
            if !advanced {
                match path.pop() {
                    None => return total,
                    Some(r) => {
                        v = self.res_tail(r);
                        iter[v] += 1;
                    }
                }
            }
        }
    }

    /// Pushes up to `limit` units from `from` to `to` along shortest residual paths.
    fn route(&mut self, from: usize, to: usize, limit: i64) -> i64 {
        let n = self.node_count();
        let mut sent = 0;
        let mut via = vec![usize::MAX; n];
        while sent < limit {
            via.fill(usize::MAX);
            let mut seen = vec![false; n];
            seen[from] = true;
            let mut queue = VecDeque::from([from]);
            'bfs: while let Some(v) = queue.pop_front() {
                for &r in &self.adj[v] {
                    let w = self.res_head(r);
                    if !seen[w] && self.residual(r) > 0 {
                        seen[w] = true;
                        via[w] = r;
                        if w == to {
                            break 'bfs;
                        }
                        queue.push_back(w);
                    }
                }
            }
            if !seen[to] {
                break;
            }
            let mut path = Vec::new();
            let mut x = to;
            while x != from {
                let r = via[x];
                path.push(r);
                x = self.res_tail(r);
            }
            let amount = path
                .iter()
                .map(|&r| self.residual(r))
                .min()
                .unwrap_or(0)
                .min(limit - sent);
            for &r in &path {
                self.push(r, amount);
            }
            sent += amount;
        }
        sent
    }

    fn reaches_sink(&self) -> Vec<bool> {
        let mut reaches = vec![false; self.node_count()];
        reaches[self.sink] = true;
        let mut queue = VecDeque::from([self.sink]);
        while let Some(w) = queue.pop_front() {
            // residual arcs entering w are the partners of w's own residual arcs
            for &r in &self.adj[w] {
                let p = r ^ 1;
                let v = self.res_head(r);
                if !reaches[v] && self.residual(p) > 0 {
                    reaches[v] = true;
                    queue.push_back(v);
                }
            }
        }
        reaches
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reach {
    Unknown,
    Yes,
    No,
}

/// Memoized "does this node reach the sink" queries over a fixed residual graph.
struct SinkProbe {
    state: Vec<Reach>,
    via: Vec<usize>,
}

impl SinkProbe {
    fn new(n: usize) -> Self {
        SinkProbe {
            state: vec![Reach::Unknown; n],
            via: vec![usize::MAX; n],
        }
    }

    fn reaches_sink(&mut self, net: &FlowNetwork, start: usize) -> bool {
        match self.state[start] {
            Reach::Yes => return true,
            Reach::No => return false,
            Reach::Unknown => {}
        }
        if start == net.sink {
            self.state[start] = Reach::Yes;
            return true;
        }
        let mut visited = vec![start];
        self.via[start] = usize::MAX;
        self.state[start] = Reach::No; // provisional, doubles as the visited mark
        let mut hit = None;
        let mut next = 0;
        'bfs: while next < visited.len() {
            let v = visited[next];
            next += 1;
            for &r in &net.adj[v] {
                if net.residual(r) == 0 {
                    continue;
                }
                let w = net.res_head(r);
                match self.state[w] {
                    Reach::Yes => {
                        hit = Some(v);
                        break 'bfs;
                    }
                    Reach::Unknown if w == net.sink => {
                        self.state[w] = Reach::Yes;
                        hit = Some(v);
                        break 'bfs;
                    }
                    Reach::Unknown => {
                        self.state[w] = Reach::No;
                        self.via[w] = v;
                        visited.push(w);
                    }
                    Reach::No => {}
                }
            }
        }
        match hit {
            None => false, // every visited node is closed off from the sink
            Some(mut v) => {
                // nodes on the tree path to the hit reach the sink; the rest are unknown
                for &x in &visited {
                    self.state[x] = Reach::Unknown;
                }
                loop {
                    self.state[v] = Reach::Yes;
                    if v == start {
                        break;
                    }
                    v = self.via[v];
                }
                true
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// s=0, a=1, b=2, t=3
    fn diamond() -> FlowNetwork {
        let mut net = FlowNetwork::new(4, 0, 3).unwrap();
        net.add_arc(0, 1, 2).unwrap();
        net.add_arc(0, 2, 2).unwrap();
        net.add_arc(1, 3, 1).unwrap();
        net.add_arc(2, 3, 1).unwrap();
        net.add_arc(1, 2, 1).unwrap();
        net
    }

    /// Minimum over all s-t cuts, by enumerating every node subset.
    fn brute_min_cut(net: &FlowNetwork) -> (i64, Vec<Vec<usize>>) {
        let n = net.node_count();
        let mut best = i64::MAX;
        let mut sides = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask & (1 << net.source()) == 0 || mask & (1 << net.sink()) != 0 {
                continue;
            }
            let side: Vec<usize> = (0..n).filter(|v| mask & (1 << v) != 0).collect();
            let c = net.cut_capacity(&side);
            if c < best {
                best = c;
                sides.clear();
            }
            if c == best {
                sides.push(side);
            }
        }
        (best, sides)
    }

    #[test]
    fn single_arc() {
        let mut net = FlowNetwork::new(2, 0, 1).unwrap();
        net.add_arc(0, 1, 5).unwrap();
        assert_eq!(net.max_flow().unwrap(), 5);
    }

    #[test]
    fn diamond_matches_cut_enumeration() {
        let mut net = diamond();
        let (best, sides) = brute_min_cut(&net);
        assert_eq!(best, 2);
        assert_eq!(net.max_flow().unwrap(), 2);
        let side = net.maximal_min_cut_source_side().unwrap();
        let largest = sides.iter().map(Vec::len).max().unwrap();
        assert_eq!(net.cut_capacity(&side), 2);
        assert_eq!(side.len(), largest);
        assert!(sides.contains(&side));
    }

    #[test]
    fn saturated_chain_side() {
        let mut net = FlowNetwork::new(3, 0, 2).unwrap();
        net.add_arc(0, 1, 1).unwrap();
        net.add_arc(1, 2, 1).unwrap();
        assert_eq!(net.max_flow().unwrap(), 1);
        assert_eq!(net.maximal_min_cut_source_side().unwrap(), vec![0, 1]);
    }

    #[test]
    fn zero_capacity_arc_side() {
        let mut net = FlowNetwork::new(4, 0, 1).unwrap();
        net.add_arc(0, 1, 0).unwrap();
        net.add_arc(2, 1, 3).unwrap();
        net.add_arc(0, 3, 1).unwrap();
        assert_eq!(net.max_flow().unwrap(), 0);
        // node 2 reaches t, node 3 does not
        assert_eq!(net.maximal_min_cut_source_side().unwrap(), vec![0, 3]);
    }

    #[test]
    fn side_requires_solve() {
        let net = diamond();
        assert!(matches!(
            net.maximal_min_cut_source_side(),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn warm_start_keeps_value() {
        let mut cold = diamond();
        let expected = cold.max_flow().unwrap();
        let mut warm = diamond();
        // s->a->b->t with one unit
        warm.set_flow(0, 1);
        warm.set_flow(4, 1);
        warm.set_flow(3, 1);
        assert_eq!(warm.max_flow().unwrap(), expected);
    }

    #[test]
    fn infeasible_preload_rejected() {
        let mut net = diamond();
        net.set_flow(0, 1);
        assert!(matches!(net.max_flow(), Err(Error::Input(_))));
        let mut net = diamond();
        net.set_flow(2, 5);
        assert!(net.max_flow().is_err());
    }

    #[test]
    fn forbidden_reverse_pins_flow() {
        // s->a (1), s->b (1), a->t (1), b->a (1). Preload s->a->t; with the
        // reverse of s->a forbidden, the unit on s->a must stay.
        let mut net = FlowNetwork::new(4, 0, 3).unwrap();
        let sa = net.add_arc(0, 1, 1).unwrap();
        net.add_arc(0, 2, 1).unwrap();
        let at = net.add_arc(1, 3, 1).unwrap();
        net.add_arc(2, 1, 1).unwrap();
        net.set_flow(sa, 1);
        net.set_flow(at, 1);
        net.forbid_reverse(sa);
        assert_eq!(net.max_flow().unwrap(), 1);
        assert_eq!(net.flow(sa), 1);
    }

    #[test]
    fn lowering_capacity_reroutes() {
        // s->x (2), x->t (1), x->y (1), y->t (1)
        let mut net = FlowNetwork::new(4, 0, 3).unwrap();
        net.add_arc(0, 1, 2).unwrap();
        let xt = net.add_arc(1, 3, 1).unwrap();
        net.add_arc(1, 2, 1).unwrap();
        let yt = net.add_arc(2, 3, 1).unwrap();
        assert_eq!(net.max_flow().unwrap(), 2);
        net.set_capacity(yt, 0).unwrap();
        net.check_feasible().unwrap();
        assert_eq!(net.value(), 1);
        assert_eq!(net.max_flow().unwrap(), 1);
        net.set_capacity(yt, 1).unwrap();
        net.set_capacity(xt, 0).unwrap();
        assert_eq!(net.max_flow().unwrap(), 1);
        assert_eq!(net.flow(xt), 0);
    }
}
