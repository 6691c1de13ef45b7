//! Tree unfolding of a model from a root state.
//!
//! Every computation of the model from the root corresponds to exactly one
//! root-to-node path of the tree. Nondeterminism is kept: a node carries one
//! branch per outgoing transition of its state.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{ActionId, Nplts, StateId};
use crate::{Budget, Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    /// Index of the model transition this branch unfolds.
    pub transition: usize,
    pub label: ActionId,
    /// One child per support state, with its probability.
    pub children: Vec<(NodeId, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub state: StateId,
    pub parent: Option<NodeId>,
    pub depth: u32,
    pub branches: Vec<Branch>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeModel {
    nodes: Vec<TreeNode>,
}

impl TreeModel {
    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, n: NodeId) -> &TreeNode {
        &self.nodes[n.index()]
    }

    /// Model state a node stands for.
    pub fn corr(&self, n: NodeId) -> StateId {
        self.nodes[n.index()].state
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &TreeNode)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i as u32), n))
    }

    /// Height of the tree: the longest root-to-leaf path.
    pub fn height(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }
}

/// Unfolds `m` from `root` in preorder. Shared substructure of the model graph
/// is duplicated once per path.
pub fn unfold_to_tree(m: &Nplts, root: StateId, budget: &Budget) -> Result<TreeModel> {
    let mut nodes = vec![TreeNode { state: root, parent: None, depth: 0, branches: Vec::new() }];
    let mut stack = vec![NodeId::ROOT];
    while let Some(n) = stack.pop() {
        let state = nodes[n.index()].state;
        let depth = nodes[n.index()].depth;
        let mut branches = Vec::with_capacity(m.outgoing(state).len());
        for &ti in m.outgoing(state) {
            let t = m.transition(ti);
            let mut children = Vec::with_capacity(t.target.entries().len());
            for &(s, p) in t.target.entries() {
                if nodes.len() >= budget.max_tree_nodes {
                    return Err(Error::TreeTooLarge { limit: budget.max_tree_nodes });
                }
                let child = NodeId(nodes.len() as u32);
                nodes.push(TreeNode { state: s, parent: Some(n), depth: depth + 1, branches: Vec::new() });
                children.push((child, p));
            }
            branches.push(Branch { transition: ti, label: t.label, children });
        }
        for b in branches.iter().rev() {
            for &(c, _) in b.children.iter().rev() {
                stack.push(c);
            }
        }
        nodes[n.index()].branches = branches;
    }
    Ok(TreeModel { nodes })
}
