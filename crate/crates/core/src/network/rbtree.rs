//! Infinite two-color tree: the household network's local limit.
//!
//! Every node is red or blue. The red root has `d_c` red and `d_h` blue
//! children; other red nodes have `d_c - 1` red and `d_h` blue children
//! (one red slot is taken by the parent link); blue nodes have `d_c` red
//! children and no blue ones. A household is a red node together with its
//! blue children, so red-red and blue-red edges are external contacts and
//! red-blue edges are household contacts, mirroring the finite model.
//!
//! Nodes are materialized on first touch and interned in discovery order;
//! node 0 is the root. Children of one node get consecutive ids, red before
//! blue.

use super::ContactNetwork;
use crate::error::{Error, Result};
use crate::NodeId;
use std::cell::RefCell;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Red,
    Blue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RbParams {
    pub d_c: usize,
    pub d_h: usize,
}

impl RbParams {
    pub fn validate(&self) -> Result<()> {
        if self.d_c == 0 {
            return Err(Error::invalid("d_c must be at least 1"));
        }
        if self.d_c == 1 && self.d_h == 0 {
            return Err(Error::invalid(
                "(d_c, d_h) = (1, 0) degenerates to a ray; growth analysis requires d_c - 1 or d_h positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug)]
struct Node {
    color: Color,
    parent: Option<NodeId>,
    children: Option<Vec<NodeId>>,
}

#[derive(Debug)]
pub struct RbTree {
    params: RbParams,
    nodes: RefCell<Vec<Node>>,
}

impl RbTree {
    pub fn new(params: RbParams) -> Result<Self> {
        params.validate()?;
        Ok(RbTree {
            params,
            nodes: RefCell::new(vec![Node {
                color: Color::Red,
                parent: None,
                children: None,
            }]),
        })
    }

    pub fn params(&self) -> RbParams {
        self.params
    }

    /// Number of nodes interned so far.
    pub fn materialized_len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn color(&self, v: NodeId) -> Color {
        self.nodes.borrow()[v].color
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.nodes.borrow()[v].parent
    }

    /// Hops from the root.
    pub fn depth(&self, v: NodeId) -> usize {
        let nodes = self.nodes.borrow();
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = nodes[cur].parent {
            cur = p;
            d += 1;
        }
        d
    }

    /// Child ids of `v`, red children first; materializes them on first call.
    pub fn children(&self, v: NodeId) -> Vec<NodeId> {
        {
            let nodes = self.nodes.borrow();
            if let Some(c) = &nodes[v].children {
                return c.clone();
            }
        }
        let mut nodes = self.nodes.borrow_mut();
        if let Some(c) = &nodes[v].children {
            return c.clone();
        }
        let (n_red, n_blue) = match (nodes[v].color, nodes[v].parent) {
            (Color::Red, None) => (self.params.d_c, self.params.d_h),
            (Color::Red, Some(_)) => (self.params.d_c - 1, self.params.d_h),
            (Color::Blue, _) => (self.params.d_c, 0),
        };
        let first = nodes.len();
        let mut ids = Vec::with_capacity(n_red + n_blue);
        for i in 0..n_red + n_blue {
            let color = if i < n_red { Color::Red } else { Color::Blue };
            ids.push(first + i);
            nodes.push(Node {
                color,
                parent: Some(v),
                children: None,
            });
        }
        nodes[v].children = Some(ids.clone());
        ids
    }
}

impl ContactNetwork for RbTree {
    fn neighbors(&self, v: NodeId) -> Vec<NodeId> {
        let parent = self.parent(v);
        let children = self.children(v);
        let mut out = Vec::with_capacity(children.len() + 1);
        if let Some(p) = parent {
            out.push(p);
        }
        out.extend(children);
        out
    }

    fn household(&self, v: NodeId) -> Vec<NodeId> {
        let head = match self.color(v) {
            Color::Red => v,
            // Blue nodes are created by red parents, so the parent exists.
            Color::Blue => self.parent(v).expect("blue node has a red parent"),
        };
        let mut members = vec![head];
        members.extend(
            self.children(head)
                .into_iter()
                .filter(|&c| self.color(c) == Color::Blue),
        );
        members
    }

    fn node_count(&self) -> Option<usize> {
        None
    }

    fn contains(&self, v: NodeId) -> bool {
        v < self.materialized_len()
    }
}
