//! Nodes, canonical well-founded trees, and trunks.
//!
//! A [`Node`] is a finite sequence of naturals ordered by the prefix
//! relation; the empty node is the root. A [`TreeSchema`] describes the
//! ambient tree intensionally: either the full tree (every node, infinite
//! branches allowed) or the canonical well-founded tree of a prescribed
//! root rank, where a node of successor rank `b+1` has all its children of
//! rank `b` and a node of limit rank `l` has child `n` of rank `l[n]`
//! (strictly increasing). A [`Trunk`] is a finite downward-closed set of
//! nodes containing the root — the finite skeletons every verification
//! runs over.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::ordinal::Ordinal;
use crate::Result;

/// A node of the tree of finite natural sequences; `[]` is the root.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Node(Vec<u32>);

impl Node {
    pub fn root() -> Self {
        Node(Vec::new())
    }

    pub fn new(entries: impl Into<Vec<u32>>) -> Self {
        Node(entries.into())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// The node with the last entry removed.
    pub fn pred(&self) -> Result<Node> {
        match self.0.split_last() {
            Some((_, init)) => Ok(Node(init.to_vec())),
            None => Err(Error::EmptyNode("predecessor")),
        }
    }

    /// The node with the first entry removed.
    pub fn shift(&self) -> Result<Node> {
        match self.0.split_first() {
            Some((_, tail)) => Ok(Node(tail.to_vec())),
            None => Err(Error::EmptyNode("shift")),
        }
    }

    /// The last entry, when there is one.
    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// The child `self ++ [n]`.
    pub fn child(&self, n: u32) -> Node {
        let mut entries = self.0.clone();
        entries.push(n);
        Node(entries)
    }

    /// Concatenation of two nodes.
    pub fn concat(&self, other: &Node) -> Node {
        let mut entries = self.0.clone();
        entries.extend_from_slice(&other.0);
        Node(entries)
    }

    /// True iff `self` is a (non-strict) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Node) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// True iff neither node is a prefix of the other.
    pub fn is_incomparable(&self, other: &Node) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    /// All prefixes, from the root to the node itself.
    pub fn prefixes(&self) -> impl Iterator<Item = Node> + '_ {
        (0..=self.0.len()).map(|k| Node(self.0[..k].to_vec()))
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The ambient tree, described intensionally.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TreeSchema {
    /// The full tree of all finite natural sequences (infinite branches;
    /// no rank).
    Full,
    /// The canonical well-founded tree whose root has the given rank.
    Canonical { rank: Ordinal },
}

impl TreeSchema {
    pub fn canonical(rank: Ordinal) -> Self {
        TreeSchema::Canonical { rank }
    }

    /// The rank of the subtree rooted at child `n` of a node of rank
    /// `rank`, or `None` at leaves.
    fn child_rank(rank: &Ordinal, n: u32) -> Option<Ordinal> {
        if let Some(beta) = rank.pred() {
            Some(beta) // successor rank: every child carries the predecessor
        } else if rank.is_zero() {
            None
        } else {
            rank.fundamental_sequence(n.into()).ok()
        }
    }

    /// Walk `node` from the root, tracking subtree ranks; `None` when the
    /// node leaves the tree. For the full tree every node is present but
    /// carries no rank, so this helper is canonical-only.
    fn walk(&self, node: &Node) -> Option<Option<Ordinal>> {
        match self {
            TreeSchema::Full => Some(None),
            TreeSchema::Canonical { rank } => {
                let mut rank = rank.clone();
                for &n in node.entries() {
                    rank = Self::child_rank(&rank, n)?;
                }
                Some(Some(rank))
            }
        }
    }

    /// True iff the node belongs to the tree.
    pub fn contains(&self, node: &Node) -> bool {
        self.walk(node).is_some()
    }

    /// The rank of a node of a canonical tree.
    pub fn node_rank(&self, node: &Node) -> Result<Ordinal> {
        match self {
            TreeSchema::Full => Err(Error::FullTreeRank),
            TreeSchema::Canonical { .. } => match self.walk(node) {
                Some(Some(rank)) => Ok(rank),
                _ => Err(Error::OutsideTree(node.to_string())),
            },
        }
    }

    /// True iff the node is a leaf (canonical trees only; the full tree has
    /// no leaves).
    pub fn is_leaf(&self, node: &Node) -> Result<bool> {
        match self {
            TreeSchema::Full => {
                if self.contains(node) {
                    Ok(false)
                } else {
                    Err(Error::OutsideTree(node.to_string()))
                }
            }
            TreeSchema::Canonical { .. } => Ok(self.node_rank(node)?.is_zero()),
        }
    }
}

/// A finite downward-closed set of nodes containing the root.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Node>", into = "Vec<Node>")]
pub struct Trunk {
    nodes: BTreeSet<Node>,
}

impl Trunk {
    /// The one-node trunk `{root}`.
    pub fn root_only() -> Self {
        let mut nodes = BTreeSet::new();
        nodes.insert(Node::root());
        Trunk { nodes }
    }

    /// Build from any finite node set by checking (not repairing)
    /// downward closure; schema-free.
    pub fn from_closed_set(nodes: BTreeSet<Node>) -> Result<Self> {
        if !nodes.contains(&Node::root()) {
            return Err(Error::NotTrunk("the root is missing".into()));
        }
        for node in &nodes {
            if !node.is_root() && !nodes.contains(&node.pred()?) {
                return Err(Error::NotTrunk(format!(
                    "node {node} is present but its predecessor is not"
                )));
            }
        }
        Ok(Trunk { nodes })
    }

    pub fn contains(&self, node: &Node) -> bool {
        self.nodes.contains(node)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a trunk always contains the root
    }

    /// Nodes in sorted order (parents always before children).
    pub fn iter(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter()
    }

    /// The child indices `n` with `node ++ [n]` in the trunk.
    pub fn children_of(&self, node: &Node) -> Vec<u32> {
        self.nodes
            .iter()
            .filter(|t| t.len() == node.len() + 1 && node.is_prefix_of(t))
            .map(|t| t.last().expect("child is nonempty"))
            .collect()
    }

    /// Depth of the deepest node.
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(Node::len).max().unwrap_or(0)
    }
}

impl fmt::Debug for Trunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.nodes.iter()).finish()
    }
}

impl TryFrom<Vec<Node>> for Trunk {
    type Error = Error;

    fn try_from(nodes: Vec<Node>) -> Result<Self> {
        Trunk::from_closed_set(nodes.into_iter().collect())
    }
}

impl From<Trunk> for Vec<Node> {
    fn from(t: Trunk) -> Vec<Node> {
        t.nodes.into_iter().collect()
    }
}

/// Validate a finite node set as a trunk of the given tree: it must
/// contain the root, be closed under predecessors, and lie inside the
/// tree. The first violating node (in input order) is reported.
pub fn validate_trunk(schema: &TreeSchema, nodes: &[Node]) -> Result<Trunk> {
    let set: BTreeSet<Node> = nodes.iter().cloned().collect();
    for node in nodes {
        if !schema.contains(node) {
            return Err(Error::NotTrunk(format!("node {node} is outside the tree")));
        }
        if !node.is_root() && !set.contains(&node.pred()?) {
            return Err(Error::NotTrunk(format!(
                "node {node} is present but its predecessor is not"
            )));
        }
    }
    if !set.contains(&Node::root()) {
        return Err(Error::NotTrunk("the root is missing".into()));
    }
    Trunk::from_closed_set(set)
}

/// The smallest trunk containing the given nodes (all of which must lie in
/// the tree).
pub fn downward_closure(
    schema: &TreeSchema,
    nodes: impl IntoIterator<Item = Node>,
) -> Result<Trunk> {
    let mut closed = BTreeSet::new();
    closed.insert(Node::root());
    for node in nodes {
        if !schema.contains(&node) {
            return Err(Error::OutsideTree(node.to_string()));
        }
        for prefix in node.prefixes() {
            closed.insert(prefix);
        }
    }
    Ok(Trunk { nodes: closed })
}

/// Closure helper used pervasively in norm computations, where the nodes
/// are already known to lie in the tree.
pub(crate) fn closure_of<'a>(nodes: impl IntoIterator<Item = &'a Node>) -> BTreeSet<Node> {
    let mut closed = BTreeSet::new();
    closed.insert(Node::root());
    for node in nodes {
        for prefix in node.prefixes() {
            closed.insert(prefix);
        }
    }
    closed
}

/// Check a finite-prefix certificate that the sequence `ts` converges to
/// `s` in the tree topology: some suffix of `ts` must consist of proper
/// extensions of `s` whose child indices at `s` strictly increase. At
/// least two nodes must witness the increase; shorter suffixes certify
/// nothing.
pub fn check_convergence_witness(s: &Node, ts: &[Node]) -> bool {
    'start: for k0 in 0..ts.len() {
        if ts.len() - k0 < 2 {
            break;
        }
        let mut prev: Option<u32> = None;
        for t in &ts[k0..] {
            if !s.is_prefix_of(t) || t.len() == s.len() {
                continue 'start;
            }
            let n = t.entries()[s.len()];
            if prev.is_some_and(|p| n <= p) {
                continue 'start;
            }
            prev = Some(n);
        }
        return true;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(entries: &[u32]) -> Node {
        Node::new(entries.to_vec())
    }

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn node_basics() {
        assert_eq!(node(&[3, 1, 4]).pred().unwrap(), node(&[3, 1]));
        assert_eq!(node(&[3, 1, 4]).shift().unwrap(), node(&[1, 4]));
        assert_eq!(node(&[3]).pred().unwrap(), Node::root());
        assert_eq!(node(&[3]).shift().unwrap(), Node::root());
        assert!(Node::root().pred().is_err());
        assert!(Node::root().shift().is_err());
        assert!(node(&[1]).is_prefix_of(&node(&[1, 0])));
        assert!(!node(&[1, 0]).is_prefix_of(&node(&[1])));
        assert!(node(&[1]).is_incomparable(&node(&[2])));
        assert!(!node(&[1]).is_incomparable(&node(&[1])));
        assert_eq!(node(&[1]).concat(&node(&[2, 3])), node(&[1, 2, 3]));
        assert_eq!(node(&[7]).child(2), node(&[7, 2]));
    }

    #[test]
    fn canonical_membership() {
        let rank0 = TreeSchema::canonical(Ordinal::zero());
        assert!(rank0.contains(&Node::root()));
        assert!(!rank0.contains(&node(&[0])));

        let rank2 = TreeSchema::canonical(ord("2"));
        assert!(rank2.contains(&node(&[5, 7])));
        assert!(!rank2.contains(&node(&[5, 7, 0])));

        assert!(TreeSchema::Full.contains(&node(&[9, 9, 9, 9])));
    }

    #[test]
    fn canonical_ranks() {
        let alpha = ord("w^2+3");
        let tree = TreeSchema::canonical(alpha.clone());
        assert_eq!(tree.node_rank(&Node::root()).unwrap(), alpha);

        let rank2 = TreeSchema::canonical(ord("2"));
        assert_eq!(rank2.node_rank(&node(&[0])).unwrap(), ord("1"));
        assert_eq!(rank2.node_rank(&node(&[3, 3])).unwrap(), ord("0"));
        assert!(rank2.node_rank(&node(&[0, 0, 0])).is_err());

        // limit rank: child n has rank given by the fundamental sequence
        let tree_w = TreeSchema::canonical(ord("w"));
        assert_eq!(tree_w.node_rank(&node(&[3])).unwrap(), ord("4"));
        assert!(TreeSchema::Full.node_rank(&Node::root()).is_err());
    }

    #[test]
    fn child_ranks_constant_or_strictly_increasing() {
        for alpha in ["1", "2", "w", "w+1", "w^2"] {
            let tree = TreeSchema::canonical(ord(alpha));
            let parent = Node::root();
            let ranks: Vec<Ordinal> = (0..6)
                .map(|n| tree.node_rank(&parent.child(n)).unwrap())
                .collect();
            let constant = ranks.windows(2).all(|w| w[0] == w[1]);
            let increasing = ranks.windows(2).all(|w| w[0] < w[1]);
            assert!(constant || increasing, "alpha = {alpha}: {ranks:?}");
            for r in &ranks {
                assert!(r.add(&Ordinal::one()) <= ord(alpha));
            }
        }
    }

    #[test]
    fn trunk_validation() {
        let full = TreeSchema::Full;
        assert!(validate_trunk(&full, &[Node::root()]).is_ok());
        assert!(validate_trunk(&full, &[Node::root(), node(&[0]), node(&[0, 2])]).is_ok());
        let err = validate_trunk(&full, &[Node::root(), node(&[0, 2])]).unwrap_err();
        assert!(err.to_string().contains("[0,2]"), "{err}");
        assert!(validate_trunk(&full, &[node(&[0])]).is_err());

        let rank1 = TreeSchema::canonical(ord("1"));
        assert!(validate_trunk(&rank1, &[Node::root(), node(&[4])]).is_ok());
        assert!(validate_trunk(&rank1, &[Node::root(), node(&[4]), node(&[4, 0])]).is_err());
    }

    #[test]
    fn closures() {
        let full = TreeSchema::Full;
        let t = downward_closure(&full, [node(&[1, 1])]).unwrap();
        assert_eq!(
            t.iter().cloned().collect::<Vec<_>>(),
            vec![Node::root(), node(&[1]), node(&[1, 1])]
        );
        let t = downward_closure(&full, []).unwrap();
        assert_eq!(t.len(), 1);
        let t = downward_closure(&full, [node(&[0]), node(&[2, 0])]).unwrap();
        assert_eq!(
            t.iter().cloned().collect::<Vec<_>>(),
            vec![
                Node::root(),
                node(&[0]),
                node(&[2]),
                node(&[2, 0]),
            ]
        );
        assert!(validate_trunk(&full, &Vec::from(t.clone())).is_ok());

        let rank0 = TreeSchema::canonical(Ordinal::zero());
        assert!(downward_closure(&rank0, [node(&[0])]).is_err());
    }

    #[test]
    fn convergence_witness() {
        let eps = Node::root();
        assert!(check_convergence_witness(
            &eps,
            &[node(&[0]), node(&[1]), node(&[2, 5])]
        ));
        assert!(!check_convergence_witness(&node(&[1]), &[node(&[2]), node(&[2])]));
        assert!(!check_convergence_witness(
            &eps,
            &[node(&[0]), node(&[0]), node(&[0])]
        ));
        // a bad prefix is fine as long as a long-enough suffix works
        assert!(check_convergence_witness(
            &eps,
            &[node(&[5]), node(&[3]), node(&[4, 1]), node(&[9])]
        ));
        // single extension or empty recorded data certify nothing
        assert!(!check_convergence_witness(&eps, &[node(&[3])]));
        assert!(!check_convergence_witness(&eps, &[]));
    }

    #[test]
    fn schema_json() {
        let schema = TreeSchema::canonical(ord("w^2"));
        let json = serde_json::to_string(&schema).unwrap();
        assert_eq!(json, r#"{"kind":"canonical","rank":"w^2"}"#);
        assert_eq!(serde_json::from_str::<TreeSchema>(&json).unwrap(), schema);
        let json = serde_json::to_string(&TreeSchema::Full).unwrap();
        assert_eq!(json, r#"{"kind":"full"}"#);

        let node_json = serde_json::to_string(&node(&[3, 1, 4])).unwrap();
        assert_eq!(node_json, "[3,1,4]");
    }
}
