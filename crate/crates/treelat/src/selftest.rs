//! Seeded end-to-end suites exercising every module with exact rational
//! checks, each with a wall-clock budget. The CLI exposes them under
//! `selftest`; the crate's acceptance tests run them one by one.
//!
//! Every suite is deterministic for a fixed seed: generators draw from
//! a seeded ChaCha stream and all comparisons are exact, so a suite
//! either passes everywhere or reports the first counterexamples.

use std::collections::BTreeSet;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cantor::{embed, inverse_embed, BinWord, StepFunction};
use crate::holfin;
use crate::ordfun::{embed_ordinal, rho_node};
use crate::ordinal::Ordinal;
use crate::projtree::canonical_projtree;
use crate::rat;
use crate::trees::{downward_closure, Node, TreeSchema, Trunk};
use crate::treespace::{seq_pos_sup_identity, Element, Region};
use crate::Result;

/// Outcome of one suite: pass/fail, a human-readable summary or the
/// first violations, and the measured time against the suite's budget.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub millis: u128,
    pub budget_millis: u128,
}

impl SuiteResult {
    pub fn within_budget(&self) -> bool {
        self.millis <= self.budget_millis
    }
}

type Suite = fn(u64) -> (bool, String);

const SUITES: [(&str, Suite, u128); 9] = [
    ("cantor-isometry", suite_cantor_isometry, 10_000),
    ("cantor-round-trip", suite_cantor_round_trip, 10_000),
    ("lattice-oracle", suite_lattice_oracle, 30_000),
    ("partial-sum-identity", suite_partial_sum_identity, 1_000),
    ("trunk-approximation", suite_trunk_approximation, 5_000),
    ("ordinal-duality", suite_ordinal_duality, 10_000),
    ("projection", suite_projection, 10_000),
    ("isometry-extraction", suite_isometry_extraction, 5_000),
    ("ordinal-rank-oracle", suite_ordinal_rank_oracle, 5_000),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(name, _, _)| *name).collect()
}

/// Runs one suite by name with the given seed.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteResult> {
    let (suite_name, suite, budget) = SUITES
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| {
            crate::error::Error::InvalidData(format!(
                "unknown suite {name:?}; available: {}",
                suite_names().join(", ")
            ))
        })?;
    let start = Instant::now();
    let (passed, details) = suite(seed);
    Ok(SuiteResult {
        name: suite_name,
        passed,
        details,
        millis: start.elapsed().as_millis(),
        budget_millis: *budget,
    })
}

/// Runs every suite in order with the given seed.
pub fn run_all(seed: u64) -> Vec<SuiteResult> {
    suite_names()
        .into_iter()
        .map(|name| run_suite(name, seed).expect("the listed names exist"))
        .collect()
}

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

/// A random node of the full tree with bounded depth and entries.
fn random_full_node(rng: &mut ChaCha8Rng, max_depth: u32, max_entry: u32) -> Node {
    let depth = rng.gen_range(0..=max_depth);
    let entries: Vec<u32> = (0..depth).map(|_| rng.gen_range(0..=max_entry)).collect();
    Node::new(entries)
}

/// A random full-tree element with the corpus bounds of the Cantor
/// suites: support ≤ 12, depth ≤ 5, numerators bounded by 100.
fn random_cantor_element(rng: &mut ChaCha8Rng) -> Element {
    let mut coeffs = Vec::new();
    let mut used = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=12) {
        let node = random_full_node(rng, 5, 6);
        if used.insert(node.clone()) {
            let num = rng.gen_range(-100i64..=100);
            if num != 0 {
                coeffs.push(((1, node), q(num, rng.gen_range(1..=20))));
            }
        }
    }
    Element::new(TreeSchema::Full, 1, coeffs).expect("full-tree nodes are always valid")
}

fn suite_cantor_isometry(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..1000 {
        let a = random_cantor_element(&mut rng);
        let f = match embed(&a) {
            Ok(f) => f,
            Err(e) => return (false, format!("case {case}: embedding failed: {e}")),
        };
        if f.sup_norm() != a.lambda_norm() {
            return (
                false,
                format!(
                    "case {case}: sup norm {} of the image differs from the tree norm {}",
                    rat::format_rational(&f.sup_norm()),
                    rat::format_rational(&a.lambda_norm())
                ),
            );
        }
        if f.pos_part().sup_norm() != a.pos_part_norm() {
            return (
                false,
                format!("case {case}: positive-part norms differ across the embedding"),
            );
        }
    }
    (
        true,
        "1000 random elements: norm and positive-part norm preserved exactly".into(),
    )
}

fn suite_cantor_round_trip(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..1000 {
        let a = random_cantor_element(&mut rng);
        match embed(&a).and_then(|f| inverse_embed(&f)) {
            Ok(back) if back == a => {}
            Ok(_) => return (false, format!("case {case}: element round trip changed a")),
            Err(e) => return (false, format!("case {case}: round trip failed: {e}")),
        }
    }
    for case in 0..300 {
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(0..=10) {
            let len = rng.gen_range(0..=6);
            let bits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2u8)).collect();
            terms.push((
                BinWord::new(bits).expect("bits are binary"),
                q(rng.gen_range(-20i64..=20), rng.gen_range(1..=6)),
            ));
        }
        let f = StepFunction::new(terms);
        match inverse_embed(&f).and_then(|a| embed(&a)) {
            Ok(back) if back == f => {}
            Ok(_) => {
                return (
                    false,
                    format!("case {case}: step-function round trip changed f"),
                )
            }
            Err(e) => return (false, format!("case {case}: round trip failed: {e}")),
        }
    }
    (
        true,
        "1000 element and 300 step-function round trips returned the inputs".into(),
    )
}

/// Every assignment of coefficients from `{-2..2}` to the given nodes.
fn enumerate_family(nodes: &[Node]) -> Vec<Element> {
    let mut out = Vec::new();
    let count = 5usize.pow(nodes.len() as u32);
    for mut code in 0..count {
        let mut coeffs = Vec::new();
        for node in nodes {
            let c = (code % 5) as i64 - 2;
            code /= 5;
            if c != 0 {
                coeffs.push(((1, node.clone()), q(c, 1)));
            }
        }
        out.push(Element::new(TreeSchema::Full, 1, coeffs).expect("fixed valid nodes"));
    }
    out
}

fn suite_lattice_oracle(_seed: u64) -> (bool, String) {
    // two exhaustively enumerable support shapes of depth <= 2 and
    // branching <= 2: a chain and a fork
    let chain = [
        Node::root(),
        Node::new(vec![0]),
        Node::new(vec![0, 0]),
    ];
    let fork = [Node::root(), Node::new(vec![0]), Node::new(vec![1])];
    let probe_nodes: Vec<Node> = {
        let mut all: BTreeSet<Node> = chain.iter().cloned().collect();
        all.extend(fork.iter().cloned());
        all.into_iter().collect()
    };
    let chain_elems = enumerate_family(&chain);
    let fork_elems = enumerate_family(&fork);
    let mut pairs = 0usize;
    for (lhs, rhs) in [
        (&chain_elems, &chain_elems),
        (&fork_elems, &fork_elems),
        (&chain_elems, &fork_elems),
    ] {
        for a in lhs.iter() {
            for b in rhs.iter() {
                pairs += 1;
                let s = a.lattice_sup(b).expect("same space");
                for t in &probe_nodes {
                    let expected = rat::max(
                        &a.delta_eval(t, 1).expect("full tree"),
                        &b.delta_eval(t, 1).expect("full tree"),
                    );
                    if s.delta_eval(t, 1).expect("full tree") != expected {
                        return (
                            false,
                            format!(
                                "sup of two elements has wrong partial sum at {t}: \
                                 expected the pointwise maximum"
                            ),
                        );
                    }
                }
                if !a.leq(&s).expect("same space") || !b.leq(&s).expect("same space") {
                    return (false, "sup is not an upper bound".into());
                }
                if a.abs_val().leq(&b.abs_val()).expect("same space")
                    && a.lambda_norm() > b.lambda_norm()
                {
                    return (
                        false,
                        "norm not monotone: |a| <= |b| but the norm of a exceeds b's".into(),
                    );
                }
            }
        }
    }
    (
        true,
        format!(
            "{pairs} exhaustive pairs: partial-sum maximality and norm monotonicity hold"
        ),
    )
}

fn suite_partial_sum_identity(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..10_000 {
        let len = rng.gen_range(1..=10);
        let xs: Vec<BigRational> = (0..len)
            .map(|_| q(rng.gen_range(-5i64..=5), rng.gen_range(1..=4)))
            .collect();
        let (lhs, rhs) = seq_pos_sup_identity(&xs).expect("nonempty sequences are accepted");
        if lhs != rhs {
            return (
                false,
                format!(
                    "case {case}: {} != {} on the sequence {:?}",
                    rat::format_rational(&lhs),
                    rat::format_rational(&rhs),
                    xs.iter().map(rat::format_rational).collect::<Vec<_>>()
                ),
            );
        }
    }
    (
        true,
        "10000 sequences: the nested positive-supremum identity is exact".into(),
    )
}

fn suite_trunk_approximation(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..200 {
        let order = rng.gen_range(1..=2);
        let mut coeffs = Vec::new();
        let mut used = BTreeSet::new();
        for _ in 0..rng.gen_range(1..=10) {
            let copy = rng.gen_range(1..=order);
            let node = random_full_node(&mut rng, 4, 4);
            if used.insert((copy, node.clone())) {
                let num = rng.gen_range(-8i64..=8);
                if num != 0 {
                    coeffs.push(((copy, node), q(num, rng.gen_range(1..=4))));
                }
            }
        }
        let a = Element::new(TreeSchema::Full, order, coeffs).expect("valid");
        let eps = q(rng.gen_range(1..=8), rng.gen_range(1..=4));
        let trunk = match a.trunk_approx(&eps) {
            Ok(t) => t,
            Err(e) => return (false, format!("case {case}: construction failed: {e}")),
        };
        let mut supersets = vec![trunk.clone()];
        for _ in 0..20 {
            let mut nodes: Vec<Node> = trunk.iter().cloned().collect();
            for _ in 0..rng.gen_range(1..=5) {
                nodes.push(random_full_node(&mut rng, 5, 5));
            }
            supersets
                .push(downward_closure(&TreeSchema::Full, nodes).expect("full-tree closure"));
        }
        for superset in supersets {
            let region = Region::Trunk {
                trunk: superset.clone(),
            };
            let residual = a.sub(&a.restrict(&region, None)).expect("same space");
            if residual.lambda_norm() >= eps {
                return (
                    false,
                    format!(
                        "case {case}: residual norm {} is not below eps {} on a trunk of {} nodes",
                        rat::format_rational(&residual.lambda_norm()),
                        rat::format_rational(&eps),
                        superset.len()
                    ),
                );
            }
        }
    }
    (
        true,
        "200 elements: residual below eps on the built trunk and 20 supersets each".into(),
    )
}

/// A random trunk of at most `max_nodes` nodes inside the given tree.
fn random_trunk(
    rng: &mut ChaCha8Rng,
    schema: &TreeSchema,
    max_nodes: usize,
    max_entry: u32,
) -> Trunk {
    let mut nodes: BTreeSet<Node> = BTreeSet::new();
    nodes.insert(Node::root());
    for _ in 0..(3 * max_nodes) {
        let base = nodes
            .iter()
            .nth(rng.gen_range(0..nodes.len()))
            .expect("nonempty")
            .clone();
        if schema.node_rank(&base).map_or(true, |r| r.is_zero()) {
            continue;
        }
        let child = base.child(rng.gen_range(0..=max_entry));
        let mut candidate = nodes.clone();
        candidate.extend(child.prefixes());
        if candidate.len() <= max_nodes {
            nodes = candidate;
        }
    }
    Trunk::from_closed_set(nodes).expect("prefixes keep the set downward closed")
}

fn suite_ordinal_duality(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphas = ["0", "1", "2", "w", "w+1", "w^2"];
    let mut pairs = 0usize;
    for alpha_text in alphas {
        let alpha: Ordinal = alpha_text.parse().expect("well formed");
        let schema = TreeSchema::canonical(alpha.clone());
        for order in 1..=3u32 {
            let trunk = random_trunk(&mut rng, &schema, 15, 3);
            let entries: Vec<(Node, u32)> = trunk
                .iter()
                .flat_map(|s| (1..=order).map(move |i| (s.clone(), i)))
                .collect();
            // precompute each unit's image and each entry's point
            let images: Vec<_> = entries
                .iter()
                .map(|(t, j)| {
                    let unit = Element::chi(schema.clone(), order, t.clone(), *j)
                        .expect("trunk nodes lie in the tree");
                    embed_ordinal(&unit).expect("canonical schema")
                })
                .collect();
            let points: Vec<_> = entries
                .iter()
                .map(|(s, i)| rho_node(s, *i, &alpha, order).expect("trunk nodes lie in the tree"))
                .collect();
            for (si, (s, i)) in entries.iter().enumerate() {
                for (tj, (t, j)) in entries.iter().enumerate() {
                    pairs += 1;
                    let expected = if i == j && t.is_prefix_of(s) {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    };
                    let actual = images[tj].eval(&points[si]).expect("points lie in range");
                    if actual != expected {
                        return (
                            false,
                            format!(
                                "pairing mismatch at s={s} i={i}, t={t} j={j} over rank {alpha_text}: \
                                 {} != {}",
                                rat::format_rational(&actual),
                                rat::format_rational(&expected)
                            ),
                        );
                    }
                }
            }
            for _ in 0..10 {
                let coeffs: Vec<_> = entries
                    .iter()
                    .filter_map(|(t, j)| {
                        let c = rng.gen_range(-3i64..=3);
                        (c != 0).then(|| ((*j, t.clone()), q(c, rng.gen_range(1..=3))))
                    })
                    .collect();
                let a = Element::new(schema.clone(), order, coeffs).expect("valid");
                let f = embed_ordinal(&a).expect("canonical schema");
                if f.sup_norm() != a.lambda_norm()
                    || f.pos_part().sup_norm() != a.pos_part_norm()
                {
                    return (
                        false,
                        format!("norms differ across the interval embedding at rank {alpha_text}"),
                    );
                }
            }
        }
    }
    (
        true,
        format!("{pairs} pairings and all norms match across 6 ranks and 3 orders"),
    )
}

fn suite_projection(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for round in 0..10 {
        let trunk = random_trunk(&mut rng, &TreeSchema::Full, 20, 4);
        let data = canonical_projtree(trunk.clone());
        let report = data.verify_biorthogonality();
        if !report.passed() || report.pairs_checked != trunk.len() * trunk.len() {
            return (false, format!("round {round}: biorthogonality failed"));
        }
        for t in trunk.iter() {
            let e = data.vector(t, 1).expect("complete data").clone();
            if data.project(&e).expect("biorthogonal") != e {
                return (false, format!("round {round}: basis vector at {t} moved"));
            }
        }
        for case in 0..20 {
            let mut terms = Vec::new();
            for _ in 0..rng.gen_range(0..=8) {
                let len = rng.gen_range(0..=6);
                let bits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2u8)).collect();
                terms.push((
                    BinWord::new(bits).expect("binary"),
                    q(rng.gen_range(-9i64..=9), rng.gen_range(1..=4)),
                ));
            }
            let g = StepFunction::new(terms);
            let p = data.project(&g).expect("biorthogonal");
            if data.project(&p).expect("biorthogonal") != p {
                return (false, format!("round {round} case {case}: not idempotent"));
            }
            if p.sup_norm() > g.sup_norm() {
                return (false, format!("round {round} case {case}: norm expanded"));
            }
            let positive = data.project(&g.pos_part()).expect("biorthogonal");
            if positive.terms().any(|(_, v)| v.is_negative()) {
                return (
                    false,
                    format!("round {round} case {case}: positive input, negative output"),
                );
            }
        }
    }
    (
        true,
        "10 trees x 20 inputs: idempotent, basis-fixing, nonexpanding, positive".into(),
    )
}

fn suite_isometry_extraction(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..100 {
        let k = rng.gen_range(1..=8);
        let l = rng.gen_range(1..=k.min(5));
        let inst_seed = rng.gen();
        let op = match holfin::random_instance(k, l, inst_seed) {
            Ok(op) => op,
            Err(e) => return (false, format!("case {case}: generation failed: {e}")),
        };
        if !holfin::check_hypotheses(&op).passed() {
            return (false, format!("case {case}: generated instance fails hypotheses"));
        }
        let ex = match holfin::extract(&op) {
            Ok(ex) => ex,
            Err(e) => return (false, format!("case {case}: extraction failed: {e}")),
        };
        let report = holfin::verify_conclusions(&op, &ex, 3, inst_seed);
        if !report.passed() {
            let failed: Vec<&str> = report
                .clauses
                .iter()
                .filter(|c| !c.passed())
                .map(|c| c.name.as_str())
                .collect();
            return (
                false,
                format!("case {case}: conclusions failed: {}", failed.join(", ")),
            );
        }
    }
    (
        true,
        "100 instances: hypotheses, extraction, and conclusions all verified".into(),
    )
}

/// Iterated-derivative oracle on `[1, w^2*a + w*b + c]`, working purely
/// by the division rule "limit points of `[1, gamma]` form a copy of
/// `[1, gamma/w]`": returns (height, multiplicity, top-point rank).
fn derivative_oracle(triple: (u32, u32, u32)) -> (u32, u32, u32) {
    let mut cur = triple;
    let mut steps = 0u32;
    let mut multiplicity = 0u32;
    let mut point_rank = None;
    while cur != (0, 0, 0) {
        if point_rank.is_none() && cur.2 != 0 {
            // the top point is now a successor: it dies this step
            point_rank = Some(steps);
        }
        if cur.0 == 0 && cur.1 == 0 {
            // the final finite stage: its size is the multiplicity
            multiplicity = cur.2;
        }
        steps += 1;
        cur = (0, cur.0, cur.1);
    }
    (steps, multiplicity, point_rank.expect("nonzero input"))
}

fn suite_ordinal_rank_oracle(_seed: u64) -> (bool, String) {
    let mut checked = 0usize;
    for a in 0..=5u32 {
        for b in 0..=5u32 {
            for c in 0..=5u32 {
                if (a, b, c) == (0, 0, 0) {
                    continue;
                }
                let gamma = Ordinal::omega_power(&Ordinal::from_nat(2u32))
                    .nat_mul(a)
                    .add(&Ordinal::omega().nat_mul(b))
                    .add(&Ordinal::from_nat(c));
                let (height, multiplicity, point_rank) = derivative_oracle((a, b, c));
                let form = gamma.interval_form().expect("nonzero");
                if form.height != Ordinal::from_nat(height)
                    || form.multiplicity != multiplicity.into()
                    || form.exponent != Ordinal::from_nat(height - 1)
                {
                    return (
                        false,
                        format!("interval form of {gamma} disagrees with the derivative oracle"),
                    );
                }
                if gamma.point_rank().expect("nonzero") != Ordinal::from_nat(point_rank) {
                    return (
                        false,
                        format!("point rank of {gamma} disagrees with the derivative oracle"),
                    );
                }
                checked += 1;
            }
        }
    }
    // interval heights across the infinite ranks used by the duality suite
    for alpha_text in ["0", "1", "2", "w", "w+1", "w^2"] {
        let alpha: Ordinal = alpha_text.parse().expect("well formed");
        for m in 1..=3u32 {
            let top = Ordinal::omega_power(&alpha).nat_mul(m);
            let form = top.interval_form().expect("nonzero");
            if form.height != alpha.add(&Ordinal::one())
                || form.exponent != alpha
                || form.multiplicity != m.into()
            {
                return (
                    false,
                    format!("interval form of {top} does not read back rank {alpha_text}"),
                );
            }
        }
    }
    (
        true,
        format!("{checked} ordinals against the derivative oracle, plus 18 interval heights"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_listing_is_stable() {
        assert_eq!(suite_names().len(), 9);
        assert!(run_suite("no-such-suite", 0).is_err());
    }

    #[test]
    fn oracle_spot_checks() {
        // [1, 5]: one derivative step, five points, top point isolated
        assert_eq!(derivative_oracle((0, 0, 5)), (1, 5, 0));
        // [1, w*2]: two steps, two points at the final stage
        assert_eq!(derivative_oracle((0, 2, 0)), (2, 2, 1));
        // [1, w^2*3 + w]: three steps, three points, top rank 1
        assert_eq!(derivative_oracle((3, 1, 0)), (3, 3, 1));
        assert_eq!(derivative_oracle((1, 0, 0)), (3, 1, 2));
    }

    #[test]
    fn quick_suites_pass() {
        for name in ["partial-sum-identity", "ordinal-rank-oracle"] {
            let result = run_suite(name, 7).unwrap();
            assert!(result.passed, "{name}: {}", result.details);
        }
    }
}
