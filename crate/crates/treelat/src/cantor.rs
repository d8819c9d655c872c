//! Binary words, eventually constant points of the Cantor space, exact
//! step functions, and the lattice isometry onto them.
//!
//! The encoding `q_encode` writes a tree node `⟨s₁,…,sₙ⟩` as the binary
//! word `1^{s₁} 0 1^{s₂} 0 … 1^{sₙ} 0`; `r_encode` completes it with a
//! constant tail of ones. Under this encoding a finitely supported
//! [`Element`](crate::treespace::Element) over the full tree becomes the
//! step function `Σ a_s · χ_[q(s)]` — a linear bijection that preserves
//! the norm, the order, and all lattice operations exactly, with an
//! explicit inverse `a_s = f(r(s)) − f(r(pred s))`.
//!
//! A [`StepFunction`] is held in a canonical partition form: the binary
//! words of its terms are pairwise incomparable, cover the whole space
//! together with the zero-valued cells that are simply left out, and no
//! two sibling cells carry the same value. Construction canonicalizes,
//! so structural equality coincides with equality of functions. All
//! computations (evaluation, sup-norm, lattice operations) run on the
//! cells of a completed prefix trie — the number of cells is linear in
//! the total length of the input words, never `2^depth`.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rat;
use crate::trees::{Node, TreeSchema};
use crate::treespace::Element;
use crate::Result;

/// A finite 0/1 word naming the cylinder of all extensions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BinWord(Vec<u8>);

impl BinWord {
    pub fn empty() -> Self {
        BinWord(Vec::new())
    }

    pub fn new(bits: impl Into<Vec<u8>>) -> Result<Self> {
        let bits = bits.into();
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Parse {
                what: "binary word",
                detail: "bits must be 0 or 1".into(),
            });
        }
        Ok(BinWord(bits))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&self, bit: u8) -> BinWord {
        let mut bits = self.0.clone();
        bits.push(bit & 1);
        BinWord(bits)
    }

    pub fn is_prefix_of(&self, other: &BinWord) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// True iff the named cylinders are disjoint.
    pub fn is_disjoint_from(&self, other: &BinWord) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }
}

impl std::str::FromStr for BinWord {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::Parse {
                    what: "binary word",
                    detail: format!("unexpected character {other:?}"),
                }),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BinWord)
    }
}

impl fmt::Display for BinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl TryFrom<String> for BinWord {
    type Error = Error;

    fn try_from(text: String) -> Result<Self> {
        text.parse()
    }
}

impl From<BinWord> for String {
    fn from(w: BinWord) -> String {
        w.to_string()
    }
}

/// An eventually constant point of the binary sequence space: a finite
/// prefix followed by a constant tail. Canonical form: the prefix never
/// ends with the tail bit, so equal points are structurally equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "CantorPointWire", into = "CantorPointWire")]
pub struct CantorPoint {
    prefix: BinWord,
    tail: u8,
}

impl CantorPoint {
    pub fn new(prefix: BinWord, tail: u8) -> Self {
        let tail = tail & 1;
        let mut bits = prefix.0;
        while bits.last() == Some(&tail) {
            bits.pop();
        }
        CantorPoint {
            prefix: BinWord(bits),
            tail,
        }
    }

    pub fn bit(&self, index: usize) -> u8 {
        *self.prefix.0.get(index).unwrap_or(&self.tail)
    }

    pub fn prefix(&self) -> &BinWord {
        &self.prefix
    }

    pub fn tail(&self) -> u8 {
        self.tail
    }

    /// True iff the point lies in the cylinder named by the word.
    pub fn in_cylinder(&self, word: &BinWord) -> bool {
        word.0.iter().enumerate().all(|(k, &b)| self.bit(k) == b)
    }
}

impl fmt::Debug for CantorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})^", self.prefix, self.tail)
    }
}

#[derive(Serialize, Deserialize)]
struct CantorPointWire {
    prefix: BinWord,
    tail: u8,
}

impl TryFrom<CantorPointWire> for CantorPoint {
    type Error = Error;

    fn try_from(wire: CantorPointWire) -> Result<Self> {
        if wire.tail > 1 {
            return Err(Error::Parse {
                what: "point",
                detail: "tail bit must be 0 or 1".into(),
            });
        }
        Ok(CantorPoint::new(wire.prefix, wire.tail))
    }
}

impl From<CantorPoint> for CantorPointWire {
    fn from(p: CantorPoint) -> CantorPointWire {
        CantorPointWire {
            prefix: p.prefix,
            tail: p.tail,
        }
    }
}

/// The binary word `1^{s₁} 0 1^{s₂} 0 … 1^{sₙ} 0` of a tree node.
/// Incomparable nonempty nodes name disjoint cylinders.
pub fn q_encode(s: &Node) -> BinWord {
    let mut bits = Vec::new();
    for &entry in s.entries() {
        bits.resize(bits.len() + entry as usize, 1u8);
        bits.push(0);
    }
    BinWord(bits)
}

/// The point `q_encode(s)` followed by constant ones; injective with
/// dense range.
pub fn r_encode(s: &Node) -> CantorPoint {
    CantorPoint::new(q_encode(s), 1)
}

/// The canonical metric: `2^{−k}` at the first index where the points
/// disagree, `0` for equal points.
pub fn cantor_metric(x: &CantorPoint, y: &CantorPoint) -> BigRational {
    let bound = x.prefix.len().max(y.prefix.len());
    for k in 0..=bound {
        if x.bit(k) != y.bit(k) {
            return BigRational::new(BigInt::one(), BigInt::from(2).pow(k as u32));
        }
    }
    // past both prefixes the bits are the tails, which agreed at `bound`
    BigRational::zero()
}

/// A function `Σ coeff · χ_[word]` with finitely many terms, stored in
/// canonical partition form (see the module docs). Equality of values
/// and structural equality coincide.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StepFunctionWire", into = "StepFunctionWire")]
pub struct StepFunction {
    terms: BTreeMap<BinWord, BigRational>,
}

impl StepFunction {
    pub fn zero() -> Self {
        StepFunction {
            terms: BTreeMap::new(),
        }
    }

    /// Build from any χ-combination; overlapping words are welcome and
    /// get resolved into the canonical partition.
    pub fn new(terms: impl IntoIterator<Item = (BinWord, BigRational)>) -> Self {
        let mut summed: BTreeMap<BinWord, BigRational> = BTreeMap::new();
        for (word, coeff) in terms {
            *summed.entry(word).or_insert_with(BigRational::zero) += coeff;
        }
        summed.retain(|_, v| !v.is_zero());
        StepFunction { terms: summed }.canonicalize()
    }

    pub fn constant(value: BigRational) -> Self {
        StepFunction::new([(BinWord::empty(), value)])
    }

    /// Terms of the canonical partition form, in word order.
    pub fn terms(&self) -> impl Iterator<Item = (&BinWord, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Cells of the completed prefix trie over this function's words,
    /// with the function's (chain-summed) value on each; the cells are
    /// pairwise disjoint and cover the whole space.
    fn cells(&self) -> Vec<(BinWord, BigRational)> {
        cells_for(self.terms.keys(), |word| self.raw_value_on(word))
    }

    /// The value on the cylinder of `word` assuming no term word strictly
    /// extends `word`: the sum of coefficients of all prefixes.
    fn raw_value_on(&self, word: &BinWord) -> BigRational {
        self.terms
            .iter()
            .filter(|(w, _)| w.is_prefix_of(word))
            .map(|(_, v)| v)
            .sum()
    }

    /// Rebuild the canonical partition: split into trie cells, merge
    /// equal-valued sibling cells bottom-up, drop zero cells.
    fn canonicalize(self) -> StepFunction {
        let mut cells: BTreeMap<BinWord, BigRational> = self.cells().into_iter().collect();
        // deepest first, so merges can cascade upwards
        let mut by_depth: Vec<BinWord> = cells.keys().cloned().collect();
        by_depth.sort_by_key(|w| std::cmp::Reverse(w.len()));
        let mut queue: std::collections::VecDeque<BinWord> = by_depth.into();
        while let Some(word) = queue.pop_front() {
            if word.is_empty() || !cells.contains_key(&word) {
                continue;
            }
            let mut sibling = word.0.clone();
            let last = sibling.pop().expect("nonempty");
            let parent = BinWord(sibling.clone());
            sibling.push(1 - last);
            let sibling = BinWord(sibling);
            if cells.get(&sibling) == cells.get(&word) {
                let value = cells.remove(&word).expect("present");
                cells.remove(&sibling);
                cells.insert(parent.clone(), value);
                queue.push_back(parent);
            }
        }
        cells.retain(|_, v| !v.is_zero());
        StepFunction { terms: cells }
    }

    /// Evaluate at a point: sum the coefficients of all words the point
    /// extends.
    pub fn eval(&self, x: &CantorPoint) -> BigRational {
        self.terms
            .iter()
            .filter(|(w, _)| x.in_cylinder(w))
            .map(|(_, v)| v)
            .sum()
    }

    /// The exact supremum norm: the largest absolute cell value.
    pub fn sup_norm(&self) -> BigRational {
        self.terms
            .values()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// The pointwise maximum with zero.
    pub fn pos_part(&self) -> StepFunction {
        StepFunction {
            terms: self
                .terms
                .iter()
                .filter(|(_, v)| v.is_positive())
                .map(|(w, v)| (w.clone(), v.clone()))
                .collect(),
        }
        .canonicalize()
    }

    /// The pointwise maximum of two step functions.
    pub fn lattice_sup(&self, other: &StepFunction) -> StepFunction {
        let joint = cells_for(self.terms.keys().chain(other.terms.keys()), |w| {
            rat::max(&self.raw_value_on(w), &other.raw_value_on(w))
        });
        StepFunction {
            terms: joint.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
        .canonicalize()
    }

    pub fn add(&self, other: &StepFunction) -> StepFunction {
        StepFunction::new(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(w, v)| (w.clone(), v.clone())),
        )
    }

    pub fn neg(&self) -> StepFunction {
        self.scale(&BigRational::from_integer((-1).into()))
    }

    pub fn sub(&self, other: &StepFunction) -> StepFunction {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: &BigRational) -> StepFunction {
        if factor.is_zero() {
            return StepFunction::zero();
        }
        // scaling preserves the canonical partition (zeros stay zeros,
        // distinct siblings stay distinct)
        StepFunction {
            terms: self
                .terms
                .iter()
                .map(|(w, v)| (w.clone(), v * factor))
                .collect(),
        }
    }

    /// Depth of the canonical partition: the function is determined by
    /// this many leading bits.
    pub fn depth(&self) -> usize {
        self.terms.keys().map(BinWord::len).max().unwrap_or(0)
    }
}

impl fmt::Debug for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StepFunction(")?;
        for (i, (w, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*[{w}]", rat::format_rational(v))?;
        }
        write!(f, ")")
    }
}

/// Leaves of the completed prefix trie over `words`, valued by `value_on`
/// (which is only consulted on words no input word strictly extends).
fn cells_for<'a>(
    words: impl IntoIterator<Item = &'a BinWord>,
    value_on: impl Fn(&BinWord) -> BigRational,
) -> Vec<(BinWord, BigRational)> {
    let words: BTreeSet<&BinWord> = words.into_iter().collect();
    let mut leaves = Vec::new();
    let mut stack = vec![BinWord::empty()];
    while let Some(cell) = stack.pop() {
        let splits = words
            .iter()
            .any(|w| cell.len() < w.len() && cell.is_prefix_of(w));
        if splits {
            stack.push(cell.push(1));
            stack.push(cell.push(0));
        } else {
            leaves.push((cell.clone(), value_on(&cell)));
        }
    }
    leaves
}

#[derive(Serialize, Deserialize)]
struct StepFunctionWire {
    terms: Vec<TermWire>,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    word: BinWord,
    value: String,
}

impl TryFrom<StepFunctionWire> for StepFunction {
    type Error = Error;

    fn try_from(wire: StepFunctionWire) -> Result<Self> {
        let terms = wire
            .terms
            .into_iter()
            .map(|t| Ok((t.word, rat::parse_rational(&t.value)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(StepFunction::new(terms))
    }
}

impl From<StepFunction> for StepFunctionWire {
    fn from(f: StepFunction) -> StepFunctionWire {
        StepFunctionWire {
            terms: f
                .terms
                .into_iter()
                .map(|(word, value)| TermWire {
                    word,
                    value: rat::format_rational(&value),
                })
                .collect(),
        }
    }
}

/// The isometry: a finitely supported element over the full tree at
/// order 1 becomes `Σ a_s · χ_[q(s)]`. Linear, norm-preserving, and a
/// lattice morphism; see [`inverse_embed`] for the inverse.
pub fn embed(a: &Element) -> Result<StepFunction> {
    if *a.schema() != TreeSchema::Full {
        return Err(Error::SpaceMismatch(
            "only elements over the full tree embed into binary step functions; \
             canonical trees map onto ordinal intervals instead"
                .into(),
        ));
    }
    if a.order() != 1 {
        return Err(Error::SpaceMismatch(format!(
            "the binary embedding needs order 1, got order {}",
            a.order()
        )));
    }
    Ok(StepFunction::new(a.coeffs().map(|((_, node), value)| {
        (q_encode(node), value.clone())
    })))
}

/// The inverse of [`embed`]: coefficients are read off as
/// `a_ε = f(r(ε))` and `a_s = f(r(s)) − f(r(pred s))`.
///
/// Only finitely many coefficients can be nonzero, and the search is
/// bounded: writing `D` for the partition depth of `f`, the points
/// `r(s)` and `r(pred s)` share their first `l(q(pred s)) + last(s)`
/// bits, so `a_s = 0` whenever that count reaches `D`. Likewise the
/// search only descends into a node `s` when some cell word strictly
/// extends `q(s)` — otherwise `f` is constant on the whole cylinder and
/// every deeper coefficient vanishes.
pub fn inverse_embed(f: &StepFunction) -> Result<Element> {
    let depth = f.depth();
    let mut coeffs: Vec<((u32, Node), BigRational)> = Vec::new();
    let root_value = f.eval(&r_encode(&Node::root()));
    if !root_value.is_zero() {
        coeffs.push(((1, Node::root()), root_value));
    }
    let mut stack: Vec<(Node, usize)> = vec![(Node::root(), 0)];
    while let Some((parent, q_len)) = stack.pop() {
        let parent_value = f.eval(&r_encode(&parent));
        for k in 0..depth.saturating_sub(q_len) {
            let child = parent.child(k as u32);
            let value = f.eval(&r_encode(&child)) - &parent_value;
            if !value.is_zero() {
                coeffs.push(((1, child.clone()), value));
            }
            let q_child = q_encode(&child);
            let descend = f
                .terms
                .keys()
                .any(|w| q_child.len() < w.len() && q_child.is_prefix_of(w));
            if descend {
                stack.push((child, q_len + k + 1));
            }
        }
    }
    Element::new(TreeSchema::Full, 1, coeffs)
}

/// Check one instance of the duality between coordinate functionals and
/// point evaluations: `δ̃_s(χ̃_t)` computed in the tree space must agree
/// with evaluating the embedded unit `χ_[q(t)]` at the point `r(s)`.
pub fn duality_check(s: &Node, t: &Node) -> bool {
    let unit = Element::chi(TreeSchema::Full, 1, t.clone(), 1).expect("full tree");
    let lhs = unit.delta_eval(s, 1).expect("full tree");
    let rhs = embed(&unit).expect("full tree, order 1").eval(&r_encode(s));
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn node(entries: &[u32]) -> Node {
        Node::new(entries.to_vec())
    }

    fn word(text: &str) -> BinWord {
        text.parse().unwrap()
    }

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn step(terms: &[(&str, i64)]) -> StepFunction {
        StepFunction::new(
            terms
                .iter()
                .map(|(w, v)| (word(w), BigRational::from_integer((*v).into()))),
        )
    }

    fn random_element(rng: &mut ChaCha8Rng) -> Element {
        let count = rng.gen_range(0..=12);
        let coeffs: Vec<((u32, Node), BigRational)> = (0..count)
            .map(|_| {
                let depth = rng.gen_range(0..=5);
                let entries: Vec<u32> = (0..depth).map(|_| rng.gen_range(0..=6)).collect();
                let value = q(rng.gen_range(-100..=100), rng.gen_range(1..=10));
                ((1, Node::new(entries)), value)
            })
            .collect();
        // duplicate nodes possible: sum them through the step-function
        // constructor path instead
        let mut merged: BTreeMap<(u32, Node), BigRational> = BTreeMap::new();
        for (key, value) in coeffs {
            *merged.entry(key).or_insert_with(BigRational::zero) += value;
        }
        Element::new(TreeSchema::Full, 1, merged).unwrap()
    }

    fn random_step(rng: &mut ChaCha8Rng) -> StepFunction {
        let count = rng.gen_range(0..=10);
        StepFunction::new((0..count).map(|_| {
            let len = rng.gen_range(0..=6);
            let bits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..=1)).collect();
            (
                BinWord::new(bits).unwrap(),
                q(rng.gen_range(-20..=20), rng.gen_range(1..=6)),
            )
        }))
    }

    #[test]
    fn q_encoding() {
        assert_eq!(q_encode(&Node::root()), BinWord::empty());
        assert_eq!(q_encode(&node(&[2, 0])), word("1100"));
        assert_eq!(q_encode(&node(&[0])), word("0"));
        assert_eq!(q_encode(&node(&[3])), word("1110"));
    }

    #[test]
    fn q_disjoint_on_incomparable() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let mk = |rng: &mut ChaCha8Rng| {
                let depth = rng.gen_range(0..=4);
                Node::new((0..depth).map(|_| rng.gen_range(0..=4)).collect::<Vec<u32>>())
            };
            let (s, t) = (mk(&mut rng), mk(&mut rng));
            if s.is_incomparable(&t) && !s.is_root() && !t.is_root() {
                assert!(q_encode(&s).is_disjoint_from(&q_encode(&t)), "{s} {t}");
            }
            // and q respects the tree order on comparable pairs
            if s.is_prefix_of(&t) {
                assert!(q_encode(&s).is_prefix_of(&q_encode(&t)));
            }
        }
    }

    #[test]
    fn r_encoding_and_canonical_points() {
        assert_eq!(r_encode(&Node::root()), CantorPoint::new(BinWord::empty(), 1));
        assert_eq!(r_encode(&node(&[0])), CantorPoint::new(word("0"), 1));
        assert_eq!(r_encode(&node(&[1])), CantorPoint::new(word("10"), 1));
        // canonical form strips a prefix that blends into the tail
        assert_eq!(CantorPoint::new(word("0111"), 1), CantorPoint::new(word("0"), 1));
        assert_eq!(CantorPoint::new(word("100"), 0), CantorPoint::new(word("1"), 0));
        assert_eq!(r_encode(&node(&[0])).bit(0), 0);
        assert_eq!(r_encode(&node(&[0])).bit(7), 1);
    }

    #[test]
    fn r_injective_on_samples() {
        let mut seen = BTreeSet::new();
        for a in 0..5u32 {
            for b in 0..5u32 {
                assert!(seen.insert(r_encode(&node(&[a, b]))));
            }
            assert!(seen.insert(r_encode(&node(&[a]))));
        }
        assert!(seen.insert(r_encode(&Node::root())));
    }

    #[test]
    fn metric_examples() {
        let x = r_encode(&node(&[2, 1]));
        assert_eq!(cantor_metric(&x, &x), q(0, 1));
        assert_eq!(
            cantor_metric(&r_encode(&node(&[0])), &r_encode(&Node::root())),
            q(1, 1)
        );
        assert_eq!(
            cantor_metric(&r_encode(&node(&[1])), &r_encode(&Node::root())),
            q(1, 2)
        );
        // symmetry and the ultrametric inequality on a few triples
        let pts = [
            r_encode(&Node::root()),
            r_encode(&node(&[0])),
            r_encode(&node(&[1, 2])),
            CantorPoint::new(word("01"), 0),
        ];
        for a in &pts {
            for b in &pts {
                assert_eq!(cantor_metric(a, b), cantor_metric(b, a));
                for c in &pts {
                    assert!(
                        cantor_metric(a, c)
                            <= rat::max(&cantor_metric(a, b), &cantor_metric(b, c))
                    );
                }
            }
        }
    }

    #[test]
    fn step_basics() {
        let f = step(&[("", 1), ("0", -2)]);
        assert_eq!(f.eval(&r_encode(&node(&[0]))), q(-1, 1));
        assert_eq!(f.eval(&r_encode(&Node::root())), q(1, 1));
        assert_eq!(f.sup_norm(), q(1, 1));
        assert_eq!(step(&[("", -1)]).pos_part(), StepFunction::zero());
        assert_eq!(step(&[("0", 1)]).eval(&r_encode(&node(&[0]))), q(1, 1));
        assert!(StepFunction::zero().is_zero());
        assert_eq!(StepFunction::zero().sup_norm(), q(0, 1));
    }

    #[test]
    fn canonical_form_merges_and_drops() {
        // two sibling cells with the same value collapse to their parent
        assert_eq!(step(&[("0", 2), ("1", 2)]), step(&[("", 2)]));
        // cancellation empties out completely
        assert_eq!(step(&[("", 1), ("", -1)]), StepFunction::zero());
        // deep merge cascades
        assert_eq!(step(&[("00", 1), ("01", 1), ("1", 1)]), step(&[("", 1)]));
        // canonical terms are pairwise disjoint words
        let f = step(&[("", 3), ("01", 2), ("0", -1)]);
        let words: Vec<&BinWord> = f.terms().map(|(w, _)| w).collect();
        for (i, a) in words.iter().enumerate() {
            for b in &words[i + 1..] {
                assert!(a.is_disjoint_from(b));
            }
        }
    }

    #[test]
    fn lattice_ops_are_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let f = random_step(&mut rng);
            let g = random_step(&mut rng);
            let sup = f.lattice_sup(&g);
            let pos = f.pos_part();
            // probe on a mesh of points covering every cell
            for s in 0..2u32.pow(7) {
                let bits: Vec<u8> = (0..7).map(|k| ((s >> k) & 1) as u8).collect();
                let x = CantorPoint::new(BinWord::new(bits).unwrap(), (s & 1) as u8);
                assert_eq!(sup.eval(&x), rat::max(&f.eval(&x), &g.eval(&x)));
                assert_eq!(pos.eval(&x), rat::pos(&f.eval(&x)));
            }
        }
    }

    #[test]
    fn embed_examples() {
        let chi = |n: &[u32]| Element::chi(TreeSchema::Full, 1, node(n), 1).unwrap();
        assert_eq!(embed(&chi(&[])).unwrap(), step(&[("", 1)]));
        let a = chi(&[]).sub(&chi(&[0]).scale(&q(2, 1))).unwrap();
        let f = embed(&a).unwrap();
        assert_eq!(f, step(&[("0", -1), ("1", 1)]));
        assert_eq!(f.sup_norm(), q(1, 1));
        assert_eq!(a.lambda_norm(), q(1, 1));
        let zero = Element::zero(TreeSchema::Full, 1).unwrap();
        assert!(embed(&zero).unwrap().is_zero());

        let canonical = Element::zero(TreeSchema::canonical("w".parse().unwrap()), 1).unwrap();
        assert!(embed(&canonical).is_err());
        let wide = Element::zero(TreeSchema::Full, 2).unwrap();
        assert!(embed(&wide).is_err());
    }

    #[test]
    fn embed_is_isometric_lattice_morphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..150 {
            let a = random_element(&mut rng);
            let b = random_element(&mut rng);
            let (fa, fb) = (embed(&a).unwrap(), embed(&b).unwrap());
            assert_eq!(fa.sup_norm(), a.lambda_norm());
            assert_eq!(fa.pos_part().sup_norm(), a.pos_part_norm());
            assert_eq!(
                embed(&a.lattice_sup(&b).unwrap()).unwrap(),
                fa.lattice_sup(&fb)
            );
            assert_eq!(embed(&a.add(&b).unwrap()).unwrap(), fa.add(&fb));
            assert_eq!(a.leq(&b).unwrap(), fa.lattice_sup(&fb) == fb);
        }
    }

    #[test]
    fn inverse_examples() {
        assert!(inverse_embed(&StepFunction::zero()).unwrap().is_zero());
        let a = inverse_embed(&step(&[("0", 1)])).unwrap();
        let expected = Element::chi(TreeSchema::Full, 1, node(&[0]), 1).unwrap();
        assert_eq!(a, expected);

        let chi = |n: &[u32]| Element::chi(TreeSchema::Full, 1, node(n), 1).unwrap();
        let b = chi(&[1, 0]).scale(&q(3, 1)).sub(&chi(&[])).unwrap();
        assert_eq!(inverse_embed(&embed(&b).unwrap()).unwrap(), b);
    }

    #[test]
    fn round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..100 {
            let a = random_element(&mut rng);
            assert_eq!(inverse_embed(&embed(&a).unwrap()).unwrap(), a);
            let f = random_step(&mut rng);
            assert_eq!(embed(&inverse_embed(&f).unwrap()).unwrap(), f);
        }
    }

    #[test]
    fn duality_examples() {
        assert!(duality_check(&node(&[2, 1]), &node(&[2])));
        assert!(duality_check(&node(&[2]), &node(&[2, 1])));
        assert!(duality_check(&node(&[0]), &node(&[1])));
        // the common value is 1 exactly on prefixes
        let unit = Element::chi(TreeSchema::Full, 1, node(&[2]), 1).unwrap();
        let f = embed(&unit).unwrap();
        assert_eq!(f.eval(&r_encode(&node(&[2, 1]))), q(1, 1));
        assert_eq!(f.eval(&r_encode(&node(&[3]))), q(0, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..200 {
            let mk = |rng: &mut ChaCha8Rng| {
                let depth = rng.gen_range(0..=3);
                Node::new((0..depth).map(|_| rng.gen_range(0..=3)).collect::<Vec<u32>>())
            };
            let (s, t) = (mk(&mut rng), mk(&mut rng));
            assert!(duality_check(&s, &t), "{s} {t}");
        }
    }

    #[test]
    fn json_formats() {
        let f = step(&[("0110", 3), ("0111", 3)]);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"terms":[{"word":"011","value":"3/1"}]}"#);
        assert_eq!(serde_json::from_str::<StepFunction>(&json).unwrap(), f);

        let p = CantorPoint::new(word("01"), 0);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"prefix":"01","tail":0}"#);
        assert_eq!(serde_json::from_str::<CantorPoint>(&json).unwrap(), p);
        // non-canonical input normalizes rather than erroring
        let p: CantorPoint = serde_json::from_str(r#"{"prefix":"01","tail":1}"#).unwrap();
        assert_eq!(p, CantorPoint::new(word("0"), 1));

        assert!(serde_json::from_str::<CantorPoint>(r#"{"prefix":"01","tail":2}"#).is_err());
        assert!(serde_json::from_str::<StepFunction>(
            r#"{"terms":[{"word":"012","value":"1/1"}]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<StepFunction>(
            r#"{"terms":[{"word":"01","value":"1/0"}]}"#
        )
        .is_err());
    }
}
