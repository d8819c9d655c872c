//! Step functions on ordinal intervals `[1, ω^α·m]` and the recursive
//! isometry from canonical-tree elements onto them.
//!
//! An [`OrdStepFunction`] partitions `(0, top]` into finitely many
//! half-open ordinal intervals `(lo, hi]`, each carrying a rational
//! value. [`embed_ordinal`] maps an element over `Canonical(α)` with `m`
//! copies to such a function on `(0, ω^α·m]`: copy `i` occupies the block
//! `(ω^α·(i−1), ω^α·i]`, the root coefficient contributes a constant on
//! the whole block, and each child subtree recursively fills one
//! sub-block — shifted by `ω^β·n` below a successor rank `β+1`, and
//! packed into `(ω^{β_{n−1}}, ω^{β_n}]` below a limit rank with child
//! ranks `β_n`. The companion point map [`rho_node`] sends a node to the
//! top point of its block, giving the homeomorphism between the node set
//! and the interval under which coordinate functionals become point
//! evaluations.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::ordinal::Ordinal;
use crate::rat;
use crate::trees::{Node, TreeSchema};
use crate::treespace::Element;
use crate::Result;

/// A finitely-valued function on the ordinal interval `(0, top]`, stored
/// as an ordered contiguous list of pieces `(lo, hi] ↦ value`. Adjacent
/// pieces with equal values are merged on construction, so equality is
/// structural.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OrdStepFunctionWire", into = "OrdStepFunctionWire")]
pub struct OrdStepFunction {
    top: Ordinal,
    pieces: Vec<Piece>,
}

#[derive(Clone, PartialEq, Eq)]
struct Piece {
    lo: Ordinal, // exclusive
    hi: Ordinal, // inclusive
    value: BigRational,
}

impl OrdStepFunction {
    /// The constant function on `(0, top]`.
    pub fn constant(top: Ordinal, value: BigRational) -> Result<Self> {
        if top.is_zero() {
            return Err(Error::InvalidData("the domain top must be positive".into()));
        }
        Ok(OrdStepFunction {
            pieces: vec![Piece {
                lo: Ordinal::zero(),
                hi: top.clone(),
                value,
            }],
            top,
        })
    }

    /// Build from raw pieces, validating that they are ordered,
    /// contiguous, and cover `(0, top]` exactly; equal neighbours merge.
    pub fn new(
        top: Ordinal,
        pieces: impl IntoIterator<Item = (Ordinal, Ordinal, BigRational)>,
    ) -> Result<Self> {
        let mut out: Vec<Piece> = Vec::new();
        let mut cursor = Ordinal::zero();
        for (lo, hi, value) in pieces {
            if lo != cursor {
                return Err(Error::InvalidData(format!(
                    "pieces must be contiguous: expected a piece starting at {cursor}, got {lo}"
                )));
            }
            if hi <= lo {
                return Err(Error::InvalidData(format!(
                    "piece ({lo}, {hi}] is empty"
                )));
            }
            cursor = hi.clone();
            match out.last_mut() {
                Some(last) if last.value == value => last.hi = hi,
                _ => out.push(Piece { lo, hi, value }),
            }
        }
        if cursor != top || top.is_zero() {
            return Err(Error::InvalidData(format!(
                "pieces cover (0, {cursor}] but the domain is (0, {top}]"
            )));
        }
        Ok(OrdStepFunction { top, pieces: out })
    }

    pub fn top(&self) -> &Ordinal {
        &self.top
    }

    /// Pieces in domain order as `(lo, hi, value)` triples.
    pub fn pieces(&self) -> impl Iterator<Item = (&Ordinal, &Ordinal, &BigRational)> {
        self.pieces.iter().map(|p| (&p.lo, &p.hi, &p.value))
    }

    /// The value at a point `1 ≤ γ ≤ top`.
    pub fn eval(&self, gamma: &Ordinal) -> Result<BigRational> {
        if gamma.is_zero() || *gamma > self.top {
            return Err(Error::OutsideDomain {
                point: gamma.to_string(),
                top: self.top.to_string(),
            });
        }
        let idx = self
            .pieces
            .partition_point(|p| p.hi < *gamma);
        let piece = &self.pieces[idx];
        debug_assert!(piece.lo < *gamma && *gamma <= piece.hi);
        Ok(piece.value.clone())
    }

    /// The exact supremum norm: the largest absolute piece value.
    pub fn sup_norm(&self) -> BigRational {
        self.pieces
            .iter()
            .map(|p| p.value.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// The pointwise maximum with zero.
    pub fn pos_part(&self) -> OrdStepFunction {
        OrdStepFunction::new(
            self.top.clone(),
            self.pieces
                .iter()
                .map(|p| (p.lo.clone(), p.hi.clone(), rat::pos(&p.value))),
        )
        .expect("clamping keeps the partition intact")
    }

    /// The pointwise maximum of two functions over the same domain.
    pub fn lattice_sup(&self, other: &OrdStepFunction) -> Result<OrdStepFunction> {
        self.zip_with(other, rat::max)
    }

    pub fn add(&self, other: &OrdStepFunction) -> Result<OrdStepFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, factor: &BigRational) -> OrdStepFunction {
        OrdStepFunction::new(
            self.top.clone(),
            self.pieces
                .iter()
                .map(|p| (p.lo.clone(), p.hi.clone(), &p.value * factor)),
        )
        .expect("scaling keeps the partition intact")
    }

    /// Combine two functions piecewise over the joint boundary
    /// refinement.
    fn zip_with(
        &self,
        other: &OrdStepFunction,
        combine: impl Fn(&BigRational, &BigRational) -> BigRational,
    ) -> Result<OrdStepFunction> {
        if self.top != other.top {
            return Err(Error::SpaceMismatch(format!(
                "domains (0, {}] and (0, {}] differ",
                self.top, other.top
            )));
        }
        let mut boundaries: Vec<&Ordinal> = self
            .pieces
            .iter()
            .map(|p| &p.hi)
            .chain(other.pieces.iter().map(|p| &p.hi))
            .collect();
        boundaries.sort();
        boundaries.dedup();
        let mut lo = Ordinal::zero();
        let mut pieces = Vec::new();
        for hi in boundaries {
            let value = combine(&self.eval(hi)?, &other.eval(hi)?);
            pieces.push((lo.clone(), hi.clone(), value));
            lo = hi.clone();
        }
        OrdStepFunction::new(self.top.clone(), pieces)
    }
}

impl fmt::Debug for OrdStepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrdStepFunction(")?;
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {}] -> {}", p.lo, p.hi, rat::format_rational(&p.value))?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct OrdStepFunctionWire {
    top: String,
    pieces: Vec<PieceWire>,
}

#[derive(Serialize, Deserialize)]
struct PieceWire {
    lo: String,
    hi: String,
    value: String,
}

impl TryFrom<OrdStepFunctionWire> for OrdStepFunction {
    type Error = Error;

    fn try_from(wire: OrdStepFunctionWire) -> Result<Self> {
        let top: Ordinal = wire.top.parse()?;
        let pieces = wire
            .pieces
            .into_iter()
            .map(|p| Ok((p.lo.parse()?, p.hi.parse()?, rat::parse_rational(&p.value)?)))
            .collect::<Result<Vec<_>>>()?;
        OrdStepFunction::new(top, pieces)
    }
}

impl From<OrdStepFunction> for OrdStepFunctionWire {
    fn from(f: OrdStepFunction) -> OrdStepFunctionWire {
        OrdStepFunctionWire {
            top: f.top.to_string(),
            pieces: f
                .pieces
                .into_iter()
                .map(|p| PieceWire {
                    lo: p.lo.to_string(),
                    hi: p.hi.to_string(),
                    value: rat::format_rational(&p.value),
                })
                .collect(),
        }
    }
}

/// The rank of child `n` below a node of the given rank, together with
/// the left endpoint offset of its block inside the parent block.
fn child_layout(rank: &Ordinal, n: u32) -> Result<(Ordinal, Ordinal)> {
    if let Some(beta) = rank.pred() {
        // successor rank: equal blocks of length ω^β side by side
        let offset = Ordinal::omega_power(&beta).nat_mul(n);
        Ok((beta, offset))
    } else if rank.is_zero() {
        Err(Error::OutsideTree(format!(
            "a rank-0 node has no child {n}"
        )))
    } else {
        // limit rank: block n reaches ω^{β_n}, starting where block n−1 ended
        let beta_n = rank.fundamental_sequence(n.into())?;
        let offset = if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal::omega_power(&rank.fundamental_sequence((n - 1).into())?)
        };
        Ok((beta_n, offset))
    }
}

/// Recursively fill `(base, base + ω^rank]` for one subtree. `coeffs`
/// holds the subtree's coefficients keyed by node relative to the
/// subtree root; `carry` is the accumulated value of all ancestors.
fn fill_block(
    rank: &Ordinal,
    coeffs: &[(Node, BigRational)],
    base: &Ordinal,
    carry: &BigRational,
    out: &mut Vec<(Ordinal, Ordinal, BigRational)>,
) -> Result<()> {
    let mut level = carry.clone();
    let mut children: Vec<(u32, Vec<(Node, BigRational)>)> = Vec::new();
    for (node, value) in coeffs {
        if node.is_root() {
            level += value;
        } else {
            let n = node.entries()[0];
            let shifted = (node.shift()?, value.clone());
            match children.last_mut() {
                Some((last, bucket)) if *last == n => bucket.push(shifted),
                _ => children.push((n, vec![shifted])),
            }
        }
    }
    let block_top = base.add(&Ordinal::omega_power(rank));
    if rank.is_zero() {
        // a leaf: the one-point block (base, base+1]
        out.push((base.clone(), block_top, level));
        return Ok(());
    }
    let mut cursor = base.clone();
    for (n, bucket) in children {
        let (child_rank, offset) = child_layout(rank, n)?;
        let lo = base.add(&offset);
        let hi = lo.add(&Ordinal::omega_power(&child_rank));
        if cursor < lo {
            out.push((cursor, lo.clone(), level.clone()));
        }
        fill_block(&child_rank, &bucket, &lo, &level, out)?;
        cursor = hi;
    }
    // the remainder up to and including the block's top point
    out.push((cursor, block_top, level));
    Ok(())
}

/// The isometry onto `C([1, ω^α·m])` for elements over `Canonical(α)`
/// with `m` copies: exact, linear, norm- and order-preserving.
pub fn embed_ordinal(a: &Element) -> Result<OrdStepFunction> {
    let TreeSchema::Canonical { rank } = a.schema() else {
        return Err(Error::SpaceMismatch(
            "only elements over a canonical tree map onto an ordinal interval; \
             the full tree maps onto binary step functions instead"
                .into(),
        ));
    };
    let block = Ordinal::omega_power(rank);
    let mut pieces = Vec::new();
    for copy in 1..=a.order() {
        let coeffs: Vec<(Node, BigRational)> = a
            .coeffs()
            .filter(|((c, _), _)| *c == copy)
            .map(|((_, node), value)| (node.clone(), value.clone()))
            .collect();
        let base = block.nat_mul(copy - 1);
        fill_block(rank, &coeffs, &base, &BigRational::zero(), &mut pieces)?;
    }
    OrdStepFunction::new(block.nat_mul(a.order()), pieces)
}

/// The canonical homeomorphism from `(node, copy)` pairs onto
/// `[1, ω^α·m]`: a node maps to the top point of its block, so the root
/// of copy `i` goes to `ω^α·i` and children of a node enumerate a
/// strictly increasing sequence converging to their parent's point.
pub fn rho_node(s: &Node, copy: u32, alpha: &Ordinal, order: u32) -> Result<Ordinal> {
    if copy == 0 || copy > order {
        return Err(Error::CopyRange { copy, order });
    }
    let mut base = Ordinal::omega_power(alpha).nat_mul(copy - 1);
    let mut rank = alpha.clone();
    for &n in s.entries() {
        let (child_rank, offset) = child_layout(&rank, n)
            .map_err(|_| Error::OutsideTree(s.to_string()))?;
        base = base.add(&offset);
        rank = child_rank;
    }
    Ok(base.add(&Ordinal::omega_power(&rank)))
}
