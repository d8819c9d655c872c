//! The normed vector lattice of finitely supported systems on a tree.
//!
//! An [`Element`] assigns a rational coefficient to finitely many
//! `(copy, node)` pairs, where the copy index ranges over `1..=m` for a
//! fixed order `m`. Everything in this module is driven by *partial sums
//! along chains*: writing `A(t) = Σ_{s ⪯ t} a_s` per copy,
//!
//! * the norm is `max_copies max_t |A(t)|`,
//! * the order is pointwise comparison of `A`,
//! * the supremum of two elements is the element whose partial sums are
//!   `max(A, B)`, recovered coefficient-wise by telescoping,
//! * positive part, negative part and absolute value clamp or fold `A`
//!   the corresponding way.
//!
//! Since coefficients are finitely supported, a partial sum is constant
//! past the deepest support prefix, so every sup over the whole tree is
//! attained on the downward closure of the support; all computations here
//! run on such closures and are exact.

use std::collections::BTreeSet;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rat;
use crate::trees::{closure_of, Node, TreeSchema, Trunk};
use crate::Result;

/// A finitely supported element of the order-`m` lattice over a tree.
///
/// Keys are `(copy, node)` with copies in `1..=order`; zero coefficients
/// are never stored, so equality is structural.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ElementWire", into = "ElementWire")]
pub struct Element {
    schema: TreeSchema,
    order: u32,
    coeffs: BTreeMap<(u32, Node), BigRational>,
}

impl Element {
    /// The zero element of the given space.
    pub fn zero(schema: TreeSchema, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidData("order must be at least 1".into()));
        }
        Ok(Element {
            schema,
            order,
            coeffs: BTreeMap::new(),
        })
    }

    /// Build an element from explicit coefficients. Copies must lie in
    /// `1..=order`, nodes in the tree, and no `(copy, node)` pair may
    /// repeat; zero values are dropped.
    pub fn new(
        schema: TreeSchema,
        order: u32,
        coeffs: impl IntoIterator<Item = ((u32, Node), BigRational)>,
    ) -> Result<Self> {
        let mut elem = Element::zero(schema, order)?;
        for ((copy, node), value) in coeffs {
            if copy == 0 || copy > order {
                return Err(Error::CopyRange { copy, order });
            }
            if !elem.schema.contains(&node) {
                return Err(Error::OutsideTree(node.to_string()));
            }
            if value.is_zero() {
                continue;
            }
            if elem.coeffs.insert((copy, node.clone()), value).is_some() {
                return Err(Error::InvalidData(format!(
                    "duplicate coefficient for copy {copy}, node {node}"
                )));
            }
        }
        Ok(elem)
    }

    /// The unit element with a single coefficient 1 at `(copy, node)`.
    pub fn chi(schema: TreeSchema, order: u32, node: Node, copy: u32) -> Result<Self> {
        Element::new(
            schema,
            order,
            [((copy, node), BigRational::from_integer(1.into()))],
        )
    }

    pub fn schema(&self) -> &TreeSchema {
        &self.schema
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    /// The coefficient at `(copy, node)` (zero when absent).
    pub fn coeff(&self, copy: u32, node: &Node) -> BigRational {
        self.coeffs
            .get(&(copy, node.clone()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// All stored (nonzero) coefficients in `(copy, node)` order.
    pub fn coeffs(&self) -> impl Iterator<Item = (&(u32, Node), &BigRational)> {
        self.coeffs.iter()
    }

    /// The support nodes of one copy.
    fn copy_support(&self, copy: u32) -> impl Iterator<Item = &Node> {
        self.coeffs
            .range((copy, Node::root())..)
            .take_while(move |((c, _), _)| *c == copy)
            .map(|((_, node), _)| node)
    }

    /// Maximum support depth across all copies.
    fn max_depth(&self) -> usize {
        self.coeffs.keys().map(|(_, node)| node.len()).max().unwrap_or(0)
    }

    fn compatible(&self, other: &Element) -> Result<()> {
        if self.schema != other.schema || self.order != other.order {
            return Err(Error::SpaceMismatch(format!(
                "cannot combine an order-{} element with an order-{} element{}",
                self.order,
                other.order,
                if self.schema == other.schema {
                    ""
                } else {
                    " over a different tree"
                }
            )));
        }
        Ok(())
    }

    /// Partial sums `A(t) = Σ_{s ⪯ t} a_{s, copy}` for every `t` in a
    /// downward-closed node set (parents precede children in iteration
    /// order, so one pass suffices).
    fn chain_sums(&self, copy: u32, closed: &BTreeSet<Node>) -> BTreeMap<Node, BigRational> {
        let mut sums: BTreeMap<Node, BigRational> = BTreeMap::new();
        for node in closed {
            let above = if node.is_root() {
                BigRational::zero()
            } else {
                sums[&node.pred().expect("non-root")].clone()
            };
            sums.insert(node.clone(), above + self.coeff(copy, node));
        }
        sums
    }

    /// Pointwise linear combination `self + factor * other`.
    fn combine(&self, other: &Element, factor: &BigRational) -> Result<Element> {
        self.compatible(other)?;
        let mut coeffs = self.coeffs.clone();
        for (key, value) in &other.coeffs {
            let entry = coeffs.entry(key.clone()).or_insert_with(BigRational::zero);
            *entry += value * factor;
            if entry.is_zero() {
                coeffs.remove(key);
            }
        }
        Ok(Element {
            schema: self.schema.clone(),
            order: self.order,
            coeffs,
        })
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.combine(other, &BigRational::from_integer(1.into()))
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.combine(other, &BigRational::from_integer((-1).into()))
    }

    pub fn neg(&self) -> Element {
        self.scale(&BigRational::from_integer((-1).into()))
    }

    pub fn scale(&self, factor: &BigRational) -> Element {
        let coeffs = if factor.is_zero() {
            BTreeMap::new()
        } else {
            self.coeffs
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect()
        };
        Element {
            schema: self.schema.clone(),
            order: self.order,
            coeffs,
        }
    }

    /// The norm: the largest absolute partial sum along any chain, over
    /// all copies.
    pub fn lambda_norm(&self) -> BigRational {
        let mut best = BigRational::zero();
        for copy in 1..=self.order {
            let closed = closure_of(self.copy_support(copy));
            for sum in self.chain_sums(copy, &closed).values() {
                let a = sum.abs();
                if a > best {
                    best = a;
                }
            }
        }
        best
    }

    /// The norm of the positive part, computed directly as the largest
    /// clamped partial sum — no positive-part element is materialized.
    pub fn pos_part_norm(&self) -> BigRational {
        let mut best = BigRational::zero();
        for copy in 1..=self.order {
            let closed = closure_of(self.copy_support(copy));
            for sum in self.chain_sums(copy, &closed).values() {
                if *sum > best {
                    best = sum.clone();
                }
            }
        }
        best
    }

    /// Order comparison: true iff every partial sum of `self` is at most
    /// the matching partial sum of `other`. Checking the joint support
    /// closure decides the whole tree: past the deepest closure prefix
    /// both partial sums are constant (in particular a fresh child
    /// repeats its parent's sums), so no deeper node can flip the answer.
    pub fn leq(&self, other: &Element) -> Result<bool> {
        self.compatible(other)?;
        for copy in 1..=self.order {
            let closed = closure_of(self.copy_support(copy).chain(other.copy_support(copy)));
            let a = self.chain_sums(copy, &closed);
            let b = other.chain_sums(copy, &closed);
            if closed.iter().any(|node| a[node] > b[node]) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Rebuild an element from transformed partial sums: the coefficient
    /// at `t` is `f(t) − f(pred t)` with `f(pred ε) = 0`, per copy over
    /// the given closures.
    fn map_chain_sums(
        &self,
        closures: impl Iterator<Item = (u32, BTreeSet<Node>)>,
        transformed: impl Fn(u32, &Node, &BTreeSet<Node>) -> BigRational,
    ) -> Element {
        let mut coeffs = BTreeMap::new();
        for (copy, closed) in closures {
            for node in &closed {
                let here = transformed(copy, node, &closed);
                let above = if node.is_root() {
                    BigRational::zero()
                } else {
                    transformed(copy, &node.pred().expect("non-root"), &closed)
                };
                let value = here - above;
                if !value.is_zero() {
                    coeffs.insert((copy, node.clone()), value);
                }
            }
        }
        Element {
            schema: self.schema.clone(),
            order: self.order,
            coeffs,
        }
    }

    /// The least upper bound: partial sums of the result are the
    /// pointwise maxima `max(A, B)`, so coefficients telescope as
    /// `max(A⪯t, B⪯t) − max(A≺t, B≺t)`. The support never leaves the
    /// joint closure — past it both maxima repeat their parent value.
    pub fn lattice_sup(&self, other: &Element) -> Result<Element> {
        type SumTable = BTreeMap<Node, BigRational>;
        self.compatible(other)?;
        let mut sums: BTreeMap<u32, (SumTable, SumTable)> = BTreeMap::new();
        let mut closures = Vec::new();
        for copy in 1..=self.order {
            let closed = closure_of(self.copy_support(copy).chain(other.copy_support(copy)));
            sums.insert(
                copy,
                (self.chain_sums(copy, &closed), other.chain_sums(copy, &closed)),
            );
            closures.push((copy, closed));
        }
        Ok(self.map_chain_sums(closures.into_iter(), |copy, node, _| {
            let (a, b) = &sums[&copy];
            rat::max(&a[node], &b[node])
        }))
    }

    /// The positive part `a ∨ 0`: partial sums are clamped at zero.
    pub fn pos_part(&self) -> Element {
        let mut closures = Vec::new();
        let mut sums = BTreeMap::new();
        for copy in 1..=self.order {
            let closed = closure_of(self.copy_support(copy));
            sums.insert(copy, self.chain_sums(copy, &closed));
            closures.push((copy, closed));
        }
        self.map_chain_sums(closures.into_iter(), |copy, node, _| {
            rat::pos(&sums[&copy][node])
        })
    }

    /// The negative part `(−a) ∨ 0`.
    pub fn neg_part(&self) -> Element {
        self.neg().pos_part()
    }

    /// The absolute value `a⁺ ∨ a⁻`: partial sums fold through `|·|`.
    pub fn abs_val(&self) -> Element {
        let mut closures = Vec::new();
        let mut sums = BTreeMap::new();
        for copy in 1..=self.order {
            let closed = closure_of(self.copy_support(copy));
            sums.insert(copy, self.chain_sums(copy, &closed));
            closures.push((copy, closed));
        }
        self.map_chain_sums(closures.into_iter(), |copy, node, _| {
            sums[&copy][node].abs()
        })
    }

    /// Zero out every coefficient whose node falls outside the region or
    /// whose copy does not match the filter (`None` keeps all copies).
    pub fn restrict(&self, region: &Region, copy: Option<u32>) -> Element {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|((c, node), _)| copy.is_none_or(|only| *c == only) && region.contains(node))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Element {
            schema: self.schema.clone(),
            order: self.order,
            coeffs,
        }
    }

    /// Evaluate the coordinate functional: the partial sum
    /// `Σ_{t ⪯ node} a_{t, copy}`.
    pub fn delta_eval(&self, node: &Node, copy: u32) -> Result<BigRational> {
        if !self.schema.contains(node) {
            return Err(Error::OutsideTree(node.to_string()));
        }
        if copy == 0 || copy > self.order {
            return Err(Error::CopyRange {
                copy,
                order: self.order,
            });
        }
        let mut sum = BigRational::zero();
        for prefix in node.prefixes() {
            sum += self.coeff(copy, &prefix);
        }
        Ok(sum)
    }

    /// A finite trunk `F` with `lambda_norm(a − a↾F′) < ε` for *every*
    /// trunk `F′ ⊇ F`.
    ///
    /// Per copy: find the least `n ≥ 1` whose deep tail (levels `> n`)
    /// has norm below `ε/4`, then descend level by level through `n`
    /// keeping exactly the children whose full-subtree restriction has
    /// norm at least `ε/(4n)`; the result is the union over copies, plus
    /// the root. Discarded subtrees are mutually incomparable, so their
    /// norms add up to less than `ε` against any containing trunk.
    pub fn trunk_approx(&self, eps: &BigRational) -> Result<Trunk> {
        if !eps.is_positive() {
            return Err(Error::InvalidData(format!(
                "approximation bound must be positive, got {}",
                rat::format_rational(eps)
            )));
        }
        let quarter = eps / BigRational::from_integer(4.into());
        let mut kept: BTreeSet<Node> = BTreeSet::new();
        kept.insert(Node::root());
        for copy in 1..=self.order {
            let single = self.restrict(&Region::MinLevel { level: 0 }, Some(copy));
            if single.is_zero() {
                continue;
            }
            let max_depth = single.max_depth();
            let mut n: u32 = 1;
            while single
                .restrict(
                    &Region::MinLevel {
                        level: n + 1,
                    },
                    None,
                )
                .lambda_norm()
                >= quarter
            {
                n += 1;
                debug_assert!(n as usize <= max_depth, "tail must empty out");
            }
            let threshold = &quarter / BigRational::from_integer(n.into());
            let mut frontier = vec![Node::root()];
            for level in 1..=n as usize {
                let mut next = Vec::new();
                for parent in &frontier {
                    let children: BTreeSet<u32> = single
                        .coeffs
                        .keys()
                        .filter(|(_, s)| s.len() >= level && parent.is_prefix_of(s))
                        .map(|(_, s)| s.entries()[level - 1])
                        .collect();
                    for m in children {
                        let child = parent.child(m);
                        let kept_norm = single
                            .restrict(&Region::Subtree { node: child.clone() }, None)
                            .lambda_norm();
                        if kept_norm >= threshold {
                            kept.insert(child.clone());
                            next.push(child);
                        }
                    }
                }
                frontier = next;
            }
        }
        Trunk::from_closed_set(kept)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element(order {}; ", self.order)?;
        for (i, ((copy, node), value)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{node}#{copy} -> {}", rat::format_rational(value))?;
        }
        write!(f, ")")
    }
}

/// A set of nodes a restriction keeps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    /// A finite downward-closed trunk.
    Trunk { trunk: Trunk },
    /// All extensions of one node (the node included).
    Subtree { node: Node },
    /// All nodes of length at least `level`.
    MinLevel { level: u32 },
    /// An arbitrary explicit finite node set.
    Nodes { nodes: BTreeSet<Node> },
}

impl Region {
    pub fn contains(&self, node: &Node) -> bool {
        match self {
            Region::Trunk { trunk } => trunk.contains(node),
            Region::Subtree { node: base } => base.is_prefix_of(node),
            Region::MinLevel { level } => node.len() >= *level as usize,
            Region::Nodes { nodes } => nodes.contains(node),
        }
    }

    /// True iff the region is closed under predecessors — the regions for
    /// which restriction commutes with the positive part.
    pub fn is_hereditary(&self) -> bool {
        match self {
            Region::Trunk { .. } => true,
            Region::Subtree { node } => node.is_root(),
            Region::MinLevel { level } => *level == 0,
            Region::Nodes { nodes } => nodes
                .iter()
                .all(|n| n.is_root() || nodes.contains(&n.pred().expect("non-root"))),
        }
    }
}

/// Both sides of the clamped-partial-sum identity
/// `max_{n≥0} (Σ_{0..n} x)⁺ = (x₀ + max_{n≥1} (Σ_{1..n} x)⁺)⁺`
/// (empty inner maximum = 0). The two components are always equal; tests
/// exercise the identity by evaluating the sides independently.
pub fn seq_pos_sup_identity(xs: &[BigRational]) -> Result<(BigRational, BigRational)> {
    let Some((first, rest)) = xs.split_first() else {
        return Err(Error::InvalidData("the sequence must be nonempty".into()));
    };
    let mut lhs = BigRational::zero();
    let mut run = BigRational::zero();
    for x in xs {
        run += x;
        lhs = rat::max(&lhs, &rat::pos(&run));
    }
    let mut inner = BigRational::zero();
    run = BigRational::zero();
    for x in rest {
        run += x;
        inner = rat::max(&inner, &rat::pos(&run));
    }
    let rhs = rat::pos(&(first + inner));
    Ok((lhs, rhs))
}

#[derive(Serialize, Deserialize)]
struct ElementWire {
    tree: TreeSchema,
    order: u32,
    coeffs: Vec<CoeffWire>,
}

#[derive(Serialize, Deserialize)]
struct CoeffWire {
    node: Node,
    copy: u32,
    value: String,
}

impl TryFrom<ElementWire> for Element {
    type Error = Error;

    fn try_from(wire: ElementWire) -> Result<Element> {
        let coeffs = wire
            .coeffs
            .into_iter()
            .map(|c| Ok(((c.copy, c.node), rat::parse_rational(&c.value)?)))
            .collect::<Result<Vec<_>>>()?;
        Element::new(wire.tree, wire.order, coeffs)
    }
}

impl From<Element> for ElementWire {
    fn from(elem: Element) -> ElementWire {
        ElementWire {
            tree: elem.schema,
            order: elem.order,
            coeffs: elem
                .coeffs
                .into_iter()
                .map(|((copy, node), value)| CoeffWire {
                    node,
                    copy,
                    value: rat::format_rational(&value),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::Ordinal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn node(entries: &[u32]) -> Node {
        Node::new(entries.to_vec())
    }

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn elem(coeffs: &[(&[u32], i64)]) -> Element {
        Element::new(
            TreeSchema::Full,
            1,
            coeffs
                .iter()
                .map(|(n, v)| ((1, node(n)), BigRational::from_integer((*v).into()))),
        )
        .unwrap()
    }

    fn chi1(entries: &[u32]) -> Element {
        Element::chi(TreeSchema::Full, 1, node(entries), 1).unwrap()
    }

    /// Seeded random element in the exhaustive-test family shape.
    fn random_elem(rng: &mut ChaCha8Rng, order: u32) -> Element {
        let mut coeffs = Vec::new();
        for copy in 1..=order {
            for n in universe_depth2() {
                if rng.gen_bool(0.4) {
                    let v: i64 = rng.gen_range(-2..=2);
                    coeffs.push(((copy, n.clone()), BigRational::from_integer(v.into())));
                }
            }
        }
        Element::new(TreeSchema::Full, order, coeffs).unwrap()
    }

    fn universe_depth2() -> Vec<Node> {
        vec![
            Node::root(),
            node(&[0]),
            node(&[1]),
            node(&[0, 0]),
            node(&[0, 1]),
            node(&[1, 0]),
            node(&[1, 1]),
        ]
    }

    #[test]
    fn norm_examples() {
        assert_eq!(chi1(&[]).lambda_norm(), q(1, 1));
        assert_eq!(chi1(&[3, 1]).lambda_norm(), q(1, 1));
        // partial sums 1, -1, 2 along the chain
        let a = elem(&[(&[], 1), (&[0], -2), (&[0, 0], 3)]);
        assert_eq!(a.lambda_norm(), q(2, 1));
        let zero = Element::zero(TreeSchema::Full, 3).unwrap();
        assert_eq!(zero.lambda_norm(), q(0, 1));
    }

    #[test]
    fn pos_part_norm_examples() {
        assert_eq!(chi1(&[]).neg().pos_part_norm(), q(0, 1));
        assert_eq!(chi1(&[]).pos_part_norm(), q(1, 1));
        let a = elem(&[(&[], -1), (&[0], 2)]);
        assert_eq!(a.pos_part_norm(), q(1, 1));
    }

    #[test]
    fn norm_splits_into_positive_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a = random_elem(&mut rng, 2);
            assert_eq!(
                a.lambda_norm(),
                rat::max(&a.pos_part_norm(), &a.neg().pos_part_norm())
            );
            assert_eq!(a.pos_part().lambda_norm(), a.pos_part_norm());
        }
    }

    #[test]
    fn leq_examples() {
        let zero = Element::zero(TreeSchema::Full, 1).unwrap();
        assert!(zero.leq(&chi1(&[])).unwrap());
        assert!(chi1(&[0]).leq(&chi1(&[])).unwrap());
        assert!(!chi1(&[]).leq(&chi1(&[0])).unwrap());
        let other_order = Element::zero(TreeSchema::Full, 2).unwrap();
        assert!(zero.leq(&other_order).is_err());
    }

    #[test]
    fn sup_examples() {
        let x = chi1(&[]);
        assert_eq!(x.lattice_sup(&x.neg()).unwrap(), x);
        let a = elem(&[(&[], 1), (&[1], -3)]);
        assert_eq!(a.lattice_sup(&a).unwrap(), a);
        // partial sums: a: 1 everywhere; b: 0 then 2 under <0>
        let b = elem(&[(&[0], 2)]);
        let sup = elem(&[(&[], 1)]).lattice_sup(&b).unwrap();
        assert_eq!(sup, elem(&[(&[], 1), (&[0], 1)]));
    }

    #[test]
    fn sup_is_least_upper_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let a = random_elem(&mut rng, 1);
            let b = random_elem(&mut rng, 1);
            let c = a.lattice_sup(&b).unwrap();
            assert!(a.leq(&c).unwrap());
            assert!(b.leq(&c).unwrap());
            // minimality: the partial sums of c are exactly max(A, B)
            let closed = closure_of(a.copy_support(1).chain(b.copy_support(1)));
            let (sa, sb, sc) = (
                a.chain_sums(1, &closed),
                b.chain_sums(1, &closed),
                c.chain_sums(1, &closed),
            );
            for t in &closed {
                assert_eq!(sc[t], rat::max(&sa[t], &sb[t]));
            }
        }
    }

    #[test]
    fn parts_examples() {
        let x = chi1(&[]);
        assert_eq!(x.pos_part(), x);
        let a = elem(&[(&[], -1), (&[0], 2)]);
        assert_eq!(a.pos_part(), elem(&[(&[0], 1)]));
        let b = chi1(&[1]).scale(&q(-3, 1));
        assert_eq!(b.abs_val(), chi1(&[1]).scale(&q(3, 1)));
    }

    #[test]
    fn parts_decompose_and_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let a = random_elem(&mut rng, 2);
            let (p, n) = (a.pos_part(), a.neg_part());
            assert_eq!(p.sub(&n).unwrap(), a);
            assert_eq!(p.lattice_sup(&n).unwrap(), a.abs_val());
            assert!(Element::zero(TreeSchema::Full, 2).unwrap().leq(&p).unwrap());
            // normed-lattice monotonicity: |a| <= |b| forces norm <= norm
            let b = random_elem(&mut rng, 2);
            if a.abs_val().leq(&b.abs_val()).unwrap() {
                assert!(a.lambda_norm() <= b.lambda_norm());
            }
        }
    }

    #[test]
    fn norm_axioms_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..150 {
            let a = random_elem(&mut rng, 2);
            let b = random_elem(&mut rng, 2);
            let sum = a.add(&b).unwrap();
            assert!(sum.lambda_norm() <= a.lambda_norm() + b.lambda_norm());
            let factor = q(rng.gen_range(-3..=3), rng.gen_range(1..=3));
            assert_eq!(
                a.scale(&factor).lambda_norm(),
                factor.abs() * a.lambda_norm()
            );
            assert_eq!(a.lambda_norm().is_zero(), a.is_zero());
        }
    }

    #[test]
    fn restrict_examples() {
        let a = elem(&[(&[], 1), (&[0], -2), (&[0, 0], 3)]);
        assert!(a
            .restrict(&Region::MinLevel { level: 3 }, None)
            .is_zero());
        let two = chi1(&[]).add(&chi1(&[0])).unwrap();
        assert_eq!(
            two.restrict(&Region::Subtree { node: node(&[0]) }, None),
            chi1(&[0])
        );
        assert_eq!(
            a.restrict(&Region::Trunk { trunk: Trunk::root_only() }, None),
            elem(&[(&[], 1)])
        );
    }

    #[test]
    fn restrict_copy_filter() {
        let a = Element::new(
            TreeSchema::Full,
            2,
            [
                ((1, node(&[0])), q(1, 1)),
                ((2, node(&[0])), q(5, 1)),
            ],
        )
        .unwrap();
        let kept = a.restrict(&Region::MinLevel { level: 0 }, Some(2));
        assert_eq!(kept.coeff(1, &node(&[0])), q(0, 1));
        assert_eq!(kept.coeff(2, &node(&[0])), q(5, 1));
    }

    #[test]
    fn pos_part_commutes_with_hereditary_restriction() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let trunk = Trunk::try_from(vec![Node::root(), node(&[0]), node(&[1]), node(&[0, 1])])
            .unwrap();
        let regions = [
            Region::Trunk { trunk },
            Region::Subtree { node: Node::root() },
            Region::MinLevel { level: 0 },
            Region::Nodes {
                nodes: [Node::root(), node(&[1]), node(&[1, 0])].into(),
            },
        ];
        for region in &regions {
            assert!(region.is_hereditary());
            for _ in 0..100 {
                let a = random_elem(&mut rng, 2);
                assert_eq!(
                    a.pos_part().restrict(region, None),
                    a.restrict(region, None).pos_part()
                );
            }
        }
    }

    #[test]
    fn pos_part_does_not_commute_with_arbitrary_restriction() {
        // keeping only a deep node changes which partial sums get clamped
        let a = elem(&[(&[], -1), (&[0], 2)]);
        let region = Region::Nodes {
            nodes: [node(&[0])].into(),
        };
        assert!(!region.is_hereditary());
        let restricted_then_pos = a.restrict(&region, None).pos_part();
        let pos_then_restricted = a.pos_part().restrict(&region, None);
        assert_eq!(restricted_then_pos, elem(&[(&[0], 2)]));
        assert_eq!(pos_then_restricted, elem(&[(&[0], 1)]));
        assert_ne!(restricted_then_pos, pos_then_restricted);
    }

    #[test]
    fn delta_biorthogonality() {
        let x = Element::chi(TreeSchema::Full, 2, node(&[0]), 1).unwrap();
        assert_eq!(x.delta_eval(&node(&[0, 3]), 1).unwrap(), q(1, 1));
        assert_eq!(x.delta_eval(&node(&[1]), 1).unwrap(), q(0, 1));
        assert_eq!(x.delta_eval(&node(&[0]), 2).unwrap(), q(0, 1));
        assert!(x.delta_eval(&node(&[0]), 3).is_err());
        let leafy = TreeSchema::canonical(Ordinal::zero());
        let y = Element::chi(leafy, 1, Node::root(), 1).unwrap();
        assert!(y.delta_eval(&node(&[0]), 1).is_err());
    }

    #[test]
    fn trunk_approx_examples() {
        let x = chi1(&[]);
        let f = x.trunk_approx(&q(1, 2)).unwrap();
        assert_eq!(f.len(), 1);
        assert!(x
            .sub(&x.restrict(&Region::Trunk { trunk: f }, None))
            .unwrap()
            .is_zero());

        // coefficients 1/2^k at the root's children; threshold eps/4 = 1/16
        let a = Element::new(
            TreeSchema::Full,
            1,
            (0..=5).map(|k| ((1, node(&[k])), q(1, 2i64.pow(k)))),
        )
        .unwrap();
        let f = a.trunk_approx(&q(1, 4)).unwrap();
        let expected: Vec<Node> = std::iter::once(Node::root())
            .chain((0..=4).map(|k| node(&[k])))
            .collect();
        assert_eq!(f.iter().cloned().collect::<Vec<_>>(), expected);

        let zero = Element::zero(TreeSchema::Full, 1).unwrap();
        assert_eq!(zero.trunk_approx(&q(1, 7)).unwrap().len(), 1);
        assert!(zero.trunk_approx(&q(0, 1)).is_err());
        assert!(zero.trunk_approx(&q(-1, 2)).is_err());
    }

    #[test]
    fn trunk_approx_residual_and_supersets() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..60 {
            let a = random_elem(&mut rng, 2);
            let eps = q(rng.gen_range(1..=4), rng.gen_range(1..=8));
            let f = a.trunk_approx(&eps).unwrap();
            let residual = |trunk: Trunk| {
                a.sub(&a.restrict(&Region::Trunk { trunk }, None))
                    .unwrap()
                    .lambda_norm()
            };
            assert!(residual(f.clone()) < eps);
            // supersets keep the bound
            let mut bigger: BTreeSet<Node> = f.iter().cloned().collect();
            for _ in 0..5 {
                let base = f.iter().nth(rng.gen_range(0..f.len())).unwrap().clone();
                bigger.insert(base.child(rng.gen_range(0..4)));
            }
            let bigger = Trunk::from_closed_set(bigger).unwrap();
            assert!(residual(bigger) < eps);
        }
    }

    #[test]
    fn seq_identity() {
        let pair = |xs: &[i64]| {
            let xs: Vec<BigRational> =
                xs.iter().map(|v| BigRational::from_integer((*v).into())).collect();
            seq_pos_sup_identity(&xs).unwrap()
        };
        assert_eq!(pair(&[1]), (q(1, 1), q(1, 1)));
        assert_eq!(pair(&[-2, 3]), (q(1, 1), q(1, 1)));
        assert_eq!(pair(&[0, 0, 0]), (q(0, 1), q(0, 1)));
        assert!(seq_pos_sup_identity(&[]).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..500 {
            let xs: Vec<BigRational> = (0..rng.gen_range(1..=10))
                .map(|_| q(rng.gen_range(-5..=5), rng.gen_range(1..=4)))
                .collect();
            let (lhs, rhs) = seq_pos_sup_identity(&xs).unwrap();
            assert_eq!(lhs, rhs, "{xs:?}");
        }
    }

    #[test]
    fn json_round_trip() {
        let a = Element::new(
            TreeSchema::canonical("w".parse().unwrap()),
            2,
            [
                ((1, node(&[3])), q(1, 2)),
                ((2, Node::root()), q(-7, 3)),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(
            json,
            r#"{"tree":{"kind":"canonical","rank":"w"},"order":2,"coeffs":[{"node":[3],"copy":1,"value":"1/2"},{"node":[],"copy":2,"value":"-7/3"}]}"#
        );
        assert_eq!(serde_json::from_str::<Element>(&json).unwrap(), a);
    }

    #[test]
    fn json_rejects_invalid() {
        let bad = [
            // copy out of range
            r#"{"tree":{"kind":"full"},"order":1,"coeffs":[{"node":[],"copy":2,"value":"1/1"}]}"#,
            r#"{"tree":{"kind":"full"},"order":1,"coeffs":[{"node":[],"copy":0,"value":"1/1"}]}"#,
            // order zero
            r#"{"tree":{"kind":"full"},"order":0,"coeffs":[]}"#,
            // node outside a rank-0 tree
            r#"{"tree":{"kind":"canonical","rank":"0"},"order":1,"coeffs":[{"node":[0],"copy":1,"value":"1/1"}]}"#,
            // duplicate coefficient
            r#"{"tree":{"kind":"full"},"order":1,"coeffs":[{"node":[],"copy":1,"value":"1/1"},{"node":[],"copy":1,"value":"2/1"}]}"#,
            // malformed rational
            r#"{"tree":{"kind":"full"},"order":1,"coeffs":[{"node":[],"copy":1,"value":"1/0"}]}"#,
        ];
        for text in bad {
            assert!(serde_json::from_str::<Element>(text).is_err(), "{text}");
        }
        // zero coefficients are dropped, not rejected
        let a: Element = serde_json::from_str(
            r#"{"tree":{"kind":"full"},"order":1,"coeffs":[{"node":[],"copy":1,"value":"0/5"}]}"#,
        )
        .unwrap();
        assert!(a.is_zero());
    }
}
