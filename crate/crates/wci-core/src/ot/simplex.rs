//! Exact transportation solver: primal network simplex on the dense
//! bipartite graph between two atom sets.
//!
//! Design choices, in brief:
//! - the initial basis comes from the northwest-corner rule, which always
//!   yields a spanning tree of real arcs (no artificial arcs, no big-M);
//! - entering arcs are located by block pricing over the dense arc list
//!   (block size ≈ √(number of arcs)), taking the most negative reduced cost
//!   within the first block that contains a candidate;
//! - negativity is judged against a relative threshold scaled by the
//!   magnitudes of the potentials and the arc cost involved, so rounding
//!   noise on f64 costs cannot cause endless pivoting;
//! - the basis tree is stored as parent/predecessor-arc/flow-to-parent
//!   arrays; after each pivot, depths and potentials are refreshed by one
//!   breadth-first pass over the tree. That pass is O(n + m) per pivot —
//!   asymptotically lazier than thread-index updates, and comfortably fast
//!   at the problem sizes this crate solves exactly.

use crate::error::{Error, Result};
use crate::tols::SIMPLEX_ENTERING_EPS;

/// Hard ceiling on the dense arc count; beyond this the cost matrix alone
/// would be unreasonable to materialize.
const MAX_ARCS: usize = 1 << 31;

const NO_NODE: usize = usize::MAX;

/// Optimal transportation solution: total cost, the nonzero plan entries
/// `(source_atom, sink_atom, mass)`, and the pivot count (diagnostic).
pub(crate) struct ExactSolution {
    pub cost: f64,
    pub plan: Vec<(u32, u32, f64)>,
    /// Pivot count; a unit test asserts it stays within the theoretical cap.
    #[cfg_attr(not(test), allow(dead_code))]
    pub pivots: usize,
}

/// Solves `min Σ f_ij c_ij` subject to row sums `a`, column sums `b`,
/// `f ≥ 0`. `cost` is row-major `a.len() × b.len()`.
pub(crate) fn solve_transportation(cost: &[f64], a: &[f64], b: &[f64]) -> Result<ExactSolution> {
    let n = a.len();
    let m = b.len();
    if n == 0 || m == 0 {
        return Err(Error::EmptySample);
    }
    if cost.len() != n * m {
        return Err(Error::DimensionMismatch {
            expected: n * m,
            found: cost.len(),
            context: "cost matrix".into(),
        });
    }
    if n.saturating_mul(m) > MAX_ARCS {
        return Err(Error::InvalidParameter(format!(
            "transportation problem too large: {n}×{m} arcs exceed the exact-solver limit"
        )));
    }

    let mut solver = Simplex::new(cost, a, b);
    solver.build_initial_basis();
    solver.refresh_tree();
    let pivots = solver.run()?;

    let mut plan = Vec::new();
    let mut total = 0.0;
    for w in 0..solver.nn {
        if solver.parent[w] == NO_NODE {
            continue;
        }
        let f = solver.flow[w];
        if f < -1e-9 {
            return Err(Error::Numerical(format!(
                "negative basis flow {f} after optimization"
            )));
        }
        if f > 0.0 {
            let e = solver.pred[w];
            plan.push(((e / m) as u32, (e % m) as u32, f));
            total += f * cost[e];
        }
    }
    plan.sort_unstable_by(|p, q| (p.0, p.1).cmp(&(q.0, q.1)));
    Ok(ExactSolution {
        cost: total.max(0.0),
        plan,
        pivots,
    })
}

struct Simplex<'a> {
    n: usize,
    m: usize,
    nn: usize,
    cost: &'a [f64],
    a: &'a [f64],
    b: &'a [f64],
    /// Parent node in the basis tree (`NO_NODE` for the root, node 0).
    parent: Vec<usize>,
    /// Arc id connecting a node to its parent.
    pred: Vec<usize>,
    /// Flow on the parent arc (in the arc's own source→sink direction).
    flow: Vec<f64>,
    /// Node potentials: tree arcs have zero reduced cost.
    pi: Vec<f64>,
    depth: Vec<usize>,
    // Reusable buffers for the per-pivot tree refresh.
    child_head: Vec<usize>,
    child_next: Vec<usize>,
    queue: Vec<usize>,
    // Block-pricing cursor.
    next_arc: usize,
    block_size: usize,
}

/// Which side of the entering arc's tree path the leaving arc was found on.
#[derive(Clone, Copy, PartialEq)]
enum Side {
    Source,
    Sink,
}

impl<'a> Simplex<'a> {
    fn new(cost: &'a [f64], a: &'a [f64], b: &'a [f64]) -> Self {
        let n = a.len();
        let m = b.len();
        let nn = n + m;
        let arcs = n * m;
        Simplex {
            n,
            m,
            nn,
            cost,
            a,
            b,
            parent: vec![NO_NODE; nn],
            pred: vec![usize::MAX; nn],
            flow: vec![0.0; nn],
            pi: vec![0.0; nn],
            depth: vec![0; nn],
            child_head: vec![NO_NODE; nn],
            child_next: vec![NO_NODE; nn],
            queue: Vec::with_capacity(nn),
            next_arc: 0,
            block_size: ((arcs as f64).sqrt() as usize).max(10).min(arcs.max(1)),
        }
    }

    /// Northwest-corner starting basis: walk the supply/demand staircase,
    /// recording exactly n + m − 1 cells (zero allocations included, so the
    /// cells always form a spanning tree).
    fn build_initial_basis(&mut self) {
        let (n, m) = (self.n, self.m);
        let mut i = 0;
        let mut j = 0;
        let mut ra = self.a[0];
        let mut rb = self.b[0];
        loop {
            let f = ra.min(rb).max(0.0);
            let e = i * m + j;
            // Temporarily hang the deeper endpoint on the shallower one; the
            // real orientation is fixed by the BFS in `refresh_tree`. Record
            // the cell by linking both nodes through the child lists.
            self.attach_cell(i, n + j, e, f);
            ra -= f;
            rb -= f;
            if i == n - 1 && j == m - 1 {
                break;
            }
            if i < n - 1 && (ra <= 0.0 || j == m - 1) {
                i += 1;
                ra = self.a[i];
            } else {
                j += 1;
                rb = self.b[j];
            }
        }
    }

    /// Records a basis cell during construction. The staircase guarantees
    /// each new cell touches exactly one previously seen node, so hanging the
    /// unseen endpoint under the seen one builds the tree directly.
    fn attach_cell(&mut self, u: usize, v: usize, arc: usize, f: f64) {
        let first = u == 0 && v == self.n && self.parent[v] == NO_NODE && self.pred[v] == usize::MAX;
        if first {
            // Very first cell: root 0 adopts sink n.
            self.parent[v] = u;
            self.pred[v] = arc;
            self.flow[v] = f;
            return;
        }
        // One endpoint already has a defined parent chain (or is the root);
        // the other is fresh.
        let u_known = u == 0 || self.parent[u] != NO_NODE;
        let (child, parent) = if u_known { (v, u) } else { (u, v) };
        debug_assert!(self.parent[child] == NO_NODE && child != 0);
        self.parent[child] = parent;
        self.pred[child] = arc;
        self.flow[child] = f;
    }

    /// Rebuilds child lists from the parent array, then refreshes depth and
    /// potentials by BFS from the root. O(n + m).
    fn refresh_tree(&mut self) {
        for h in self.child_head.iter_mut() {
            *h = NO_NODE;
        }
        for w in 0..self.nn {
            let p = self.parent[w];
            if p != NO_NODE {
                self.child_next[w] = self.child_head[p];
                self.child_head[p] = w;
            }
        }
        self.queue.clear();
        self.queue.push(0);
        self.depth[0] = 0;
        self.pi[0] = 0.0;
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            let mut c = self.child_head[u];
            while c != NO_NODE {
                self.depth[c] = self.depth[u] + 1;
                let e = self.pred[c];
                // Tree arcs have zero reduced cost: pi[source] − pi[sink] = cost.
                self.pi[c] = if c >= self.n {
                    // child is the sink of its parent arc
                    self.pi[u] - self.cost[e]
                } else {
                    self.pi[u] + self.cost[e]
                };
                self.queue.push(c);
                c = self.child_next[c];
            }
        }
        debug_assert_eq!(self.queue.len(), self.nn, "basis tree must span all nodes");
    }

    /// Block pricing: scan arcs in blocks starting at the cursor, returning
    /// the most negative candidate of the first block that has one.
    fn find_entering(&mut self) -> Option<usize> {
        let arcs = self.n * self.m;
        let mut best: Option<(usize, f64)> = None;
        let mut scanned = 0;
        for off in 0..arcs {
            let e = {
                let e = self.next_arc + off;
                if e >= arcs {
                    e - arcs
                } else {
                    e
                }
            };
            let u = e / self.m;
            let v = self.n + e % self.m;
            let r = self.cost[e] - self.pi[u] + self.pi[v];
            let scale = 1.0_f64
                .max(self.pi[u].abs())
                .max(self.pi[v].abs())
                .max(self.cost[e].abs());
            if r < -SIMPLEX_ENTERING_EPS * scale && best.map_or(true, |(_, br)| r < br) {
                best = Some((e, r));
            }
            scanned += 1;
            if scanned % self.block_size == 0 {
                if let Some((be, _)) = best {
                    self.next_arc = if e + 1 >= arcs { 0 } else { e + 1 };
                    return Some(be);
                }
            }
        }
        if let Some((be, _)) = best {
            return Some(be);
        }
        None
    }

    /// One full simplex run; returns the pivot count.
    fn run(&mut self) -> Result<usize> {
        // Generous safety valve: legitimate runs stay far below this.
        let max_pivots = 10_000 + 64 * self.nn * ((self.nn as f64).log2().ceil() as usize + 1);
        let mut pivots = 0;
        while let Some(e) = self.find_entering() {
            self.pivot(e);
            pivots += 1;
            if pivots > max_pivots {
                return Err(Error::Numerical(format!(
                    "network simplex exceeded {max_pivots} pivots"
                )));
            }
        }
        Ok(pivots)
    }

    /// Performs the basis exchange for entering arc `e`.
    fn pivot(&mut self, e: usize) {
        let u_star = e / self.m;
        let v_star = self.n + e % self.m;

        // Locate the apex (lowest common ancestor) by equalizing depths.
        let mut x = u_star;
        let mut y = v_star;
        while self.depth[x] > self.depth[y] {
            x = self.parent[x];
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent[y];
        }
        while x != y {
            x = self.parent[x];
            y = self.parent[y];
        }
        let apex = x;

        // Pushing θ along u* →(e)→ v* and back through the tree:
        // on the u-side (walking u* up to the apex) source nodes sit on
        // reverse arcs; on the v-side sink nodes do. θ is limited by the
        // smallest flow on a reverse arc; the first minimizer (u-side scanned
        // first) leaves the basis.
        let mut theta = f64::INFINITY;
        let mut leave = NO_NODE;
        let mut leave_side = Side::Source;
        let mut w = u_star;
        while w != apex {
            if w < self.n {
                // reverse arc on the u-side
                if self.flow[w] < theta {
                    theta = self.flow[w];
                    leave = w;
                    leave_side = Side::Source;
                }
            }
            w = self.parent[w];
        }
        let mut w = v_star;
        while w != apex {
            if w >= self.n {
                // reverse arc on the v-side
                if self.flow[w] < theta {
                    theta = self.flow[w];
                    leave = w;
                    leave_side = Side::Sink;
                }
            }
            w = self.parent[w];
        }
        debug_assert!(leave != NO_NODE, "bipartite cycles always have reverse arcs");
        debug_assert!(theta.is_finite());

        // Apply the flow change along both paths.
        let mut w = u_star;
        while w != apex {
            if w < self.n {
                self.flow[w] -= theta;
            } else {
                self.flow[w] += theta;
            }
            w = self.parent[w];
        }
        let mut w = v_star;
        while w != apex {
            if w >= self.n {
                self.flow[w] -= theta;
            } else {
                self.flow[w] += theta;
            }
            w = self.parent[w];
        }

        // Re-hang the subtree cut off by the leaving arc: the entering arc
        // becomes the new parent arc of the endpoint inside that subtree,
        // and parent pointers reverse along the way up to the leaving node.
        let (anchor, new_parent) = match leave_side {
            Side::Source => (u_star, v_star),
            Side::Sink => (v_star, u_star),
        };
        let mut cur = anchor;
        let mut carry_parent = self.parent[cur];
        let mut carry_arc = self.pred[cur];
        let mut carry_flow = self.flow[cur];
        self.parent[anchor] = new_parent;
        self.pred[anchor] = e;
        self.flow[anchor] = theta;
        while cur != leave {
            let nxt = carry_parent;
            let tmp = (self.parent[nxt], self.pred[nxt], self.flow[nxt]);
            self.parent[nxt] = cur;
            self.pred[nxt] = carry_arc;
            self.flow[nxt] = carry_flow;
            cur = nxt;
            (carry_parent, carry_arc, carry_flow) = tmp;
        }

        self.refresh_tree();
    }
}
