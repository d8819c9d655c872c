//! Projectional-tree data over the binary step-function host space:
//! biorthogonality verification, the operator `S` built from consecutive
//! functional differences, the projection `P = T∘S`, and the canonical
//! cylinder/point-mass example.
//!
//! A [`ProjTreeData`] pins down a finite fragment of a projectional
//! tree: a trunk, one step-function vector `e_{s,i}` and one finitely
//! supported functional `ρ(s,i)` per trunk node and copy.
//! [`ProjTreeData::verify_biorthogonality`] checks that the functionals
//! pair with the vectors exactly as the coordinate functionals pair with
//! the unit elements; once that holds, [`ProjTreeData::project`] is an
//! idempotent bounded projection onto the span of the vectors, and
//! [`ProjTreeData::build_s`] exposes its tree-space factor.
//! [`ProjTreeData::check_rho_regularity`] reports finite-depth evidence
//! for the convergence of `ρ` along child sequences; the full statement
//! quantifies over an infinite tree, so no report certifies it.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::{q_encode, r_encode, CantorPoint, StepFunction};
use crate::error::Error;
use crate::rat;
use crate::trees::{validate_trunk, Node, TreeSchema, Trunk};
use crate::treespace::Element;
use crate::Result;

/// A finitely supported functional on step functions: a finite set of
/// point masses. The pairing with `f` is `Σ mass·f(point)` and the norm
/// is `Σ |mass|`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "HostFunctionalWire", into = "HostFunctionalWire")]
pub struct HostFunctional {
    atoms: BTreeMap<CantorPoint, BigRational>,
}

impl HostFunctional {
    pub fn zero() -> Self {
        HostFunctional {
            atoms: BTreeMap::new(),
        }
    }

    /// Sums masses on repeated points and drops zero masses.
    pub fn new(atoms: impl IntoIterator<Item = (CantorPoint, BigRational)>) -> Self {
        let mut map: BTreeMap<CantorPoint, BigRational> = BTreeMap::new();
        for (point, mass) in atoms {
            *map.entry(point).or_insert_with(BigRational::zero) += mass;
        }
        map.retain(|_, mass| !mass.is_zero());
        HostFunctional { atoms: map }
    }

    /// The unit point mass `δ_x`.
    pub fn point_mass(point: CantorPoint) -> Self {
        HostFunctional::new([(point, BigRational::from_integer(1.into()))])
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&CantorPoint, &BigRational)> {
        self.atoms.iter()
    }

    /// The pairing `⟨μ, f⟩ = Σ mass·f(point)`.
    pub fn pair(&self, f: &StepFunction) -> BigRational {
        self.atoms
            .iter()
            .map(|(point, mass)| mass * f.eval(point))
            .sum()
    }

    /// The dual norm `Σ |mass|`.
    pub fn norm(&self) -> BigRational {
        self.atoms.values().map(|mass| mass.abs()).sum()
    }

    pub fn is_positive(&self) -> bool {
        self.atoms.values().all(|mass| !mass.is_negative())
    }

    pub fn sub(&self, other: &HostFunctional) -> HostFunctional {
        HostFunctional::new(
            self.atoms
                .iter()
                .map(|(p, m)| (p.clone(), m.clone()))
                .chain(other.atoms.iter().map(|(p, m)| (p.clone(), -m))),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct HostFunctionalWire {
    atoms: Vec<AtomWire>,
}

#[derive(Serialize, Deserialize)]
struct AtomWire {
    point: CantorPoint,
    mass: String,
}

impl TryFrom<HostFunctionalWire> for HostFunctional {
    type Error = Error;

    fn try_from(wire: HostFunctionalWire) -> Result<Self> {
        let atoms = wire
            .atoms
            .into_iter()
            .map(|a| Ok((a.point, rat::parse_rational(&a.mass)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(HostFunctional::new(atoms))
    }
}

impl From<HostFunctional> for HostFunctionalWire {
    fn from(f: HostFunctional) -> HostFunctionalWire {
        HostFunctionalWire {
            atoms: f
                .atoms
                .into_iter()
                .map(|(point, mass)| AtomWire {
                    point,
                    mass: rat::format_rational(&mass),
                })
                .collect(),
        }
    }
}

/// A finite fragment of a projectional tree: for every trunk node `s`
/// and copy `i`, a vector `e_{s,i}` in the host space and a functional
/// `ρ(s,i)` on it.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "ProjTreeDataWire", into = "ProjTreeDataWire")]
pub struct ProjTreeData {
    schema: TreeSchema,
    order: u32,
    trunk: Trunk,
    vectors: BTreeMap<(u32, Node), StepFunction>,
    functionals: BTreeMap<(u32, Node), HostFunctional>,
}

impl ProjTreeData {
    /// Validates that the trunk fits the schema and that every trunk
    /// node and copy has exactly one vector and one functional.
    pub fn new(
        schema: TreeSchema,
        order: u32,
        trunk: Trunk,
        vectors: BTreeMap<(u32, Node), StepFunction>,
        functionals: BTreeMap<(u32, Node), HostFunctional>,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidData("order must be at least 1".into()));
        }
        let nodes: Vec<Node> = trunk.iter().cloned().collect();
        validate_trunk(&schema, &nodes)?;
        for copy in 1..=order {
            for node in trunk.iter() {
                let key = (copy, node.clone());
                if !vectors.contains_key(&key) {
                    return Err(Error::InvalidData(format!(
                        "missing vector for node {node}, copy {copy}"
                    )));
                }
                if !functionals.contains_key(&key) {
                    return Err(Error::InvalidData(format!(
                        "missing functional for node {node}, copy {copy}"
                    )));
                }
            }
        }
        for (copy, node) in vectors.keys().chain(functionals.keys()) {
            if *copy == 0 || *copy > order {
                return Err(Error::CopyRange {
                    copy: *copy,
                    order,
                });
            }
            if !trunk.contains(node) {
                return Err(Error::InvalidData(format!(
                    "entry for node {node} outside the trunk"
                )));
            }
        }
        Ok(ProjTreeData {
            schema,
            order,
            trunk,
            vectors,
            functionals,
        })
    }

    pub fn schema(&self) -> &TreeSchema {
        &self.schema
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn trunk(&self) -> &Trunk {
        &self.trunk
    }

    pub fn vector(&self, node: &Node, copy: u32) -> Option<&StepFunction> {
        self.vectors.get(&(copy, node.clone()))
    }

    pub fn functional(&self, node: &Node, copy: u32) -> Option<&HostFunctional> {
        self.functionals.get(&(copy, node.clone()))
    }

    /// The smallest bound on the functionals: the largest dual norm.
    pub fn norm_bound(&self) -> BigRational {
        self.functionals
            .values()
            .map(HostFunctional::norm)
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// Checks `⟨ρ(s,i), e_{t,j}⟩ = δ̃_{s,i}(χ̃_{t,j})` over every pair of
    /// trunk entries, reporting each violation with both values.
    pub fn verify_biorthogonality(&self) -> BiorthReport {
        let mut violations = Vec::new();
        let mut pairs = 0usize;
        for ((i, s), functional) in &self.functionals {
            for ((j, t), vector) in &self.vectors {
                pairs += 1;
                let actual = functional.pair(vector);
                let unit = Element::chi(self.schema.clone(), self.order, t.clone(), *j)
                    .expect("trunk entries lie in the tree");
                let expected = unit
                    .delta_eval(s, *i)
                    .expect("trunk entries lie in the tree");
                if actual != expected {
                    violations.push(BiorthViolation {
                        row: (s.clone(), *i),
                        column: (t.clone(), *j),
                        expected,
                        actual,
                    });
                }
            }
        }
        BiorthReport {
            pairs_checked: pairs,
            violations,
        }
    }

    /// The operator `S` at `g`: the root coefficient is `⟨ρ(ε,i), g⟩`
    /// and each deeper coefficient is the consecutive difference
    /// `⟨ρ(s,i) − ρ(pred s,i), g⟩`, so partial sums along any branch
    /// telescope back to `⟨ρ(t,i), g⟩`.
    pub fn build_s(&self, g: &StepFunction) -> Result<Element> {
        let mut coeffs = Vec::new();
        for ((copy, node), functional) in &self.functionals {
            let value = if node.is_root() {
                functional.pair(g)
            } else {
                let parent = node.pred()?;
                let parent_functional = &self.functionals[&(*copy, parent)];
                functional.pair(g) - parent_functional.pair(g)
            };
            coeffs.push(((*copy, node.clone()), value));
        }
        Element::new(self.schema.clone(), self.order, coeffs)
    }

    /// The projection `P = T∘S`: pairs `g` against the functional
    /// differences and recombines with the vectors. Refuses data that
    /// fails biorthogonality, since `P` is idempotent exactly then.
    pub fn project(&self, g: &StepFunction) -> Result<StepFunction> {
        if !self.verify_biorthogonality().passed() {
            return Err(Error::Biorthogonality);
        }
        let coefficients = self.build_s(g)?;
        let mut out = StepFunction::new([]);
        for ((copy, node), value) in coefficients.coeffs() {
            let vector = &self.vectors[&(*copy, node.clone())];
            out = out.add(&vector.scale(value));
        }
        Ok(out)
    }

    /// Finite-depth evidence for the decay of `⟨ρ(t,i) − ρ(s,i), g⟩` as
    /// the first step from `s` to `t` grows, grouped per probe, copy,
    /// and non-leaf trunk node. Verdicts only speak up to the trunk's
    /// depth: a limit over the infinite tree cannot be certified or
    /// refuted from finitely many nodes.
    pub fn check_rho_regularity(&self, probes: &[StepFunction]) -> RegularityReport {
        let mut findings = Vec::new();
        for (probe_index, probe) in probes.iter().enumerate() {
            for copy in 1..=self.order {
                for s in self.trunk.iter() {
                    let children = self.trunk.children_of(s);
                    if children.is_empty() {
                        continue;
                    }
                    let base = self.functionals[&(copy, s.clone())].pair(probe);
                    let mut samples: Vec<(u32, BigRational)> = Vec::new();
                    for n in children {
                        let child = s.child(n);
                        // the largest deviation over trunk nodes at or
                        // below this child
                        let worst = self
                            .trunk
                            .iter()
                            .filter(|t| child.is_prefix_of(t))
                            .map(|t| {
                                (self.functionals[&(copy, t.clone())].pair(probe) - &base).abs()
                            })
                            .max()
                            .expect("the child itself is in the trunk");
                        samples.push((n, worst));
                    }
                    let verdict = assess_decay(&samples);
                    findings.push(RegularityFinding {
                        probe: probe_index,
                        copy,
                        node: s.clone(),
                        samples,
                        verdict,
                    });
                }
            }
        }
        RegularityReport { findings }
    }
}

/// Trend verdict for one decay sequence; never a certificate.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularityVerdict {
    /// The recorded tail reaches zero or decreases from the first
    /// sample: consistent with decay up to the trunk's depth.
    Consistent,
    /// Two or more samples with a nonzero final value no smaller than
    /// the first: the recorded horizon shows no decay.
    NoDecay,
    /// Fewer than two recorded child indices: no trend to assess.
    Insufficient,
}

fn assess_decay(samples: &[(u32, BigRational)]) -> RegularityVerdict {
    let Some((_, last)) = samples.last() else {
        return RegularityVerdict::Insufficient;
    };
    if last.is_zero() {
        return RegularityVerdict::Consistent;
    }
    if samples.len() < 2 {
        return RegularityVerdict::Insufficient;
    }
    if last < &samples[0].1 {
        RegularityVerdict::Consistent
    } else {
        RegularityVerdict::NoDecay
    }
}

/// Outcome of a full biorthogonality sweep.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BiorthReport {
    pub pairs_checked: usize,
    pub violations: Vec<BiorthViolation>,
}

impl BiorthReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// One failed pairing: row = functional entry, column = vector entry.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BiorthViolation {
    pub row: (Node, u32),
    pub column: (Node, u32),
    pub expected: BigRational,
    pub actual: BigRational,
}

/// Decay evidence for one probe, copy, and non-leaf node: per recorded
/// child index `n`, the largest `|⟨ρ(t) − ρ(s), probe⟩|` over trunk
/// nodes `t` at or below `s⌢n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RegularityFinding {
    pub probe: usize,
    pub copy: u32,
    pub node: Node,
    pub samples: Vec<(u32, BigRational)>,
    pub verdict: RegularityVerdict,
}

/// All decay findings from one sweep; `consistent()` means no finding
/// showed a non-decaying horizon (insufficient data does not flag).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RegularityReport {
    pub findings: Vec<RegularityFinding>,
}

impl RegularityReport {
    pub fn consistent(&self) -> bool {
        self.findings
            .iter()
            .all(|f| f.verdict != RegularityVerdict::NoDecay)
    }
}

/// The canonical data over the full tree with one copy: the vector at
/// `s` is the cylinder indicator `χ_[Q(s)]` and the functional is the
/// unit point mass at `R(s)`. Isometric (`norm_bound` = 1), positive,
/// and biorthogonal by construction.
pub fn canonical_projtree(trunk: Trunk) -> ProjTreeData {
    let mut vectors = BTreeMap::new();
    let mut functionals = BTreeMap::new();
    for node in trunk.iter() {
        vectors.insert(
            (1, node.clone()),
            StepFunction::new([(q_encode(node), BigRational::from_integer(1.into()))]),
        );
        functionals.insert(
            (1, node.clone()),
            HostFunctional::point_mass(r_encode(node)),
        );
    }
    ProjTreeData::new(TreeSchema::Full, 1, trunk, vectors, functionals)
        .expect("every trunk is valid for the full tree")
}

#[derive(Serialize, Deserialize)]
struct ProjTreeDataWire {
    tree: TreeSchema,
    order: u32,
    trunk: Trunk,
    vectors: Vec<VectorWire>,
    functionals: Vec<FunctionalWire>,
}

#[derive(Serialize, Deserialize)]
struct VectorWire {
    node: Node,
    copy: u32,
    function: StepFunction,
}

#[derive(Serialize, Deserialize)]
struct FunctionalWire {
    node: Node,
    copy: u32,
    functional: HostFunctional,
}

impl TryFrom<ProjTreeDataWire> for ProjTreeData {
    type Error = Error;

    fn try_from(wire: ProjTreeDataWire) -> Result<Self> {
        let mut vectors = BTreeMap::new();
        for v in wire.vectors {
            if vectors
                .insert((v.copy, v.node.clone()), v.function)
                .is_some()
            {
                return Err(Error::InvalidData(format!(
                    "duplicate vector for node {}, copy {}",
                    v.node, v.copy
                )));
            }
        }
        let mut functionals = BTreeMap::new();
        for f in wire.functionals {
            if functionals
                .insert((f.copy, f.node.clone()), f.functional)
                .is_some()
            {
                return Err(Error::InvalidData(format!(
                    "duplicate functional for node {}, copy {}",
                    f.node, f.copy
                )));
            }
        }
        ProjTreeData::new(wire.tree, wire.order, wire.trunk, vectors, functionals)
    }
}

impl From<ProjTreeData> for ProjTreeDataWire {
    fn from(data: ProjTreeData) -> ProjTreeDataWire {
        ProjTreeDataWire {
            tree: data.schema,
            order: data.order,
            trunk: data.trunk,
            vectors: data
                .vectors
                .into_iter()
                .map(|((copy, node), function)| VectorWire {
                    node,
                    copy,
                    function,
                })
                .collect(),
            functionals: data
                .functionals
                .into_iter()
                .map(|((copy, node), functional)| FunctionalWire {
                    node,
                    copy,
                    functional,
                })
                .collect(),
        }
    }
}
