//! Contact networks the epidemic runs on.
//!
//! Two implementations: [`HouseholdNet`], a finite random graph of household
//! cliques joined by external links, and [`rbtree::RbTree`], the infinite
//! two-color tree that idealizes it for closed-form analysis. Both expose the
//! same querying surface through [`ContactNetwork`].

pub mod io;
pub mod rbtree;

use crate::error::{Error, Result};
use crate::NodeId;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeSet;

/// Query surface shared by finite and lazily materialized networks.
/// `neighbors` and `household` may intern new nodes on unbounded graphs,
/// which is why they return owned vectors.
pub trait ContactNetwork {
    /// All contacts of `v`, ascending by id.
    fn neighbors(&self, v: NodeId) -> Vec<NodeId>;

    /// Household of `v` including `v` itself, ascending by id.
    fn household(&self, v: NodeId) -> Vec<NodeId>;

    /// Total node count, `None` when unbounded.
    fn node_count(&self) -> Option<usize>;

    /// Whether `v` names an existing node. On lazily materialized networks
    /// only ids that have already been handed out exist.
    fn contains(&self, v: NodeId) -> bool;
}

/// Parameters of the finite household network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct NetworkParams {
    /// Number of nodes; must be a multiple of the household size `d_h + 1`.
    pub n: usize,
    /// External half-edges per node.
    pub d_c: usize,
    /// Household contacts per node (household size minus one).
    pub d_h: usize,
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        if self.d_c == 0 {
            return Err(Error::invalid("d_c must be at least 1"));
        }
        if !self.n.is_multiple_of(self.d_h + 1) {
            return Err(Error::invalid(format!(
                "household size {} must divide n = {}",
                self.d_h + 1,
                self.n
            )));
        }
        Ok(())
    }
}

/// Finite contact network: disjoint household cliques of size `d_h + 1` plus
/// external links from a single stub shuffle. Self-loops and duplicate edges
/// from the pairing are discarded without re-drawing, so external degrees are
/// at most `d_c`.
#[derive(Debug, Clone)]
pub struct HouseholdNet {
    params: NetworkParams,
    adj: Vec<Vec<NodeId>>,
    households: Vec<Vec<NodeId>>,
    household_of: Vec<usize>,
}

impl HouseholdNet {
    /// Samples a network. All randomness comes from `rng`.
    pub fn generate(params: NetworkParams, rng: &mut impl Rng) -> Result<Self> {
        params.validate()?;
        let NetworkParams { n, d_c, d_h } = params;
        let size = d_h + 1;
        let households: Vec<Vec<NodeId>> = (0..n / size)
            .map(|h| (h * size..(h + 1) * size).collect())
            .collect();
        let mut household_of = vec![0usize; n];
        for (h, members) in households.iter().enumerate() {
            for &v in members {
                household_of[v] = h;
            }
        }

        let mut edges: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
        for members in &households {
            for (i, &u) in members.iter().enumerate() {
                for &v in &members[i + 1..] {
                    edges.insert((u, v));
                }
            }
        }

        let mut stubs: Vec<NodeId> = (0..n).flat_map(|v| std::iter::repeat_n(v, d_c)).collect();
        stubs.shuffle(rng);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v {
                continue;
            }
            edges.insert((u, v));
        }

        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }

        Ok(HouseholdNet {
            params,
            adj,
            households,
            household_of,
        })
    }

    /// Rebuilds a network from explicit parts; used by the loader.
    /// Validates symmetry and that households partition the node set.
    pub fn from_parts(
        params: NetworkParams,
        adj: Vec<Vec<NodeId>>,
        households: Vec<Vec<NodeId>>,
    ) -> Result<Self> {
        params.validate()?;
        let n = params.n;
        if adj.len() != n {
            return Err(Error::invalid(format!(
                "adjacency has {} rows, expected {}",
                adj.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        for members in &households {
            for &v in members {
                if v >= n {
                    return Err(Error::UnknownNode(v));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::invalid(format!("node {v} in two households")));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid("households do not cover all nodes"));
        }
        let mut household_of = vec![0usize; n];
        for (h, members) in households.iter().enumerate() {
            for &v in members {
                household_of[v] = h;
            }
        }
        let mut sorted_adj = adj;
        for (v, list) in sorted_adj.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.iter().any(|&u| u >= n) {
                return Err(Error::invalid(format!("node {v} lists an unknown neighbor")));
            }
            if list.contains(&v) {
                return Err(Error::invalid(format!("node {v} lists itself")));
            }
        }
        for v in 0..n {
            for &u in &sorted_adj[v] {
                if sorted_adj[u].binary_search(&v).is_err() {
                    return Err(Error::invalid(format!("edge {v}-{u} is not symmetric")));
                }
            }
        }
        Ok(HouseholdNet {
            params,
            adj: sorted_adj,
            households,
            household_of,
        })
    }

    pub fn params(&self) -> NetworkParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.params.n
    }

    pub fn is_empty(&self) -> bool {
        self.params.n == 0
    }

    pub fn household_index(&self, v: NodeId) -> usize {
        self.household_of[v]
    }

    pub fn households(&self) -> &[Vec<NodeId>] {
        &self.households
    }

    pub fn adjacency(&self) -> &[Vec<NodeId>] {
        &self.adj
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// BFS hop distances from `from` to every node; `u16::MAX` marks
    /// unreachable nodes (stub discards can disconnect the graph).
    pub fn distances_from(&self, from: NodeId) -> Vec<u16> {
        let mut dist = vec![u16::MAX; self.len()];
        let mut queue = std::collections::VecDeque::new();
        dist[from] = 0;
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            for &u in &self.adj[v] {
                if dist[u] == u16::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }
}

impl ContactNetwork for HouseholdNet {
    fn neighbors(&self, v: NodeId) -> Vec<NodeId> {
        self.adj[v].clone()
    }

    fn household(&self, v: NodeId) -> Vec<NodeId> {
        self.households[self.household_of[v]].clone()
    }

    fn node_count(&self) -> Option<usize> {
        Some(self.params.n)
    }

    fn contains(&self, v: NodeId) -> bool {
        v < self.params.n
    }
}
