//! Factoring finite sup-norm isometries through point evaluations: from
//! an isometry matrix `T` and a norm-1 projection matrix `P`, recover
//! the witness set `F`, the surjection `ρ`, the sign map `σ`, and the
//! measures `φ(x)`, then verify the factorization identities exactly.
//!
//! Everything is a finite rational matrix: a space with `K` points has
//! function space `ℚ^K` under the sup norm, an operator is a matrix
//! acting on the left by rows, and measures are rows paired by the dot
//! product. `T: ℚ^L → ℚ^K` is a sup-norm isometry exactly when every
//! row has ℓ1-norm at most 1 and every coordinate of `L` is hit by a
//! `±unit` row — those rows are the witnesses. A bounded projection `P`
//! fixing the range of `T` then forces `P`'s rows over witnesses to be
//! transported unit measures, which is what [`extract`] reads off and
//! [`verify_conclusions`] re-derives from scratch.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rat;
use crate::Result;

type Matrix = Vec<Vec<BigRational>>;

/// An isometry candidate `T` (shape `K×L`) together with a projection
/// candidate `P` (shape `K×K`), both acting by row–vector pairing:
/// `(Tf)(y) = row_y(T)·f`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "FiniteOperatorWire", into = "FiniteOperatorWire")]
pub struct FiniteOperator {
    k_size: usize,
    l_size: usize,
    t: Matrix,
    p: Matrix,
}

impl FiniteOperator {
    pub fn new(t: Matrix, p: Matrix) -> Result<Self> {
        let k_size = t.len();
        if k_size == 0 {
            return Err(Error::InvalidData("T must have at least one row".into()));
        }
        let l_size = t[0].len();
        if l_size == 0 {
            return Err(Error::InvalidData("T must have at least one column".into()));
        }
        if let Some(row) = t.iter().find(|row| row.len() != l_size) {
            return Err(Error::InvalidData(format!(
                "ragged T: expected {l_size} columns, found a row with {}",
                row.len()
            )));
        }
        if p.len() != k_size || p.iter().any(|row| row.len() != k_size) {
            return Err(Error::InvalidData(format!(
                "P must be a {k_size}x{k_size} matrix"
            )));
        }
        Ok(FiniteOperator {
            k_size,
            l_size,
            t,
            p,
        })
    }

    pub fn k_size(&self) -> usize {
        self.k_size
    }

    pub fn l_size(&self) -> usize {
        self.l_size
    }

    pub fn t(&self) -> &Matrix {
        &self.t
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    /// `(Tf)(y)` for `f ∈ ℚ^L`.
    fn apply_t(&self, f: &[BigRational], y: usize) -> BigRational {
        dot(&self.t[y], f)
    }

    /// `(Pg)(y)` for `g ∈ ℚ^K`.
    fn apply_p(&self, g: &[BigRational], y: usize) -> BigRational {
        dot(&self.p[y], g)
    }

    fn t_is_positive(&self) -> bool {
        self.t.iter().flatten().all(|v| !v.is_negative())
    }

    fn p_is_positive(&self) -> bool {
        self.p.iter().flatten().all(|v| !v.is_negative())
    }
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn l1(row: &[BigRational]) -> BigRational {
    row.iter().map(|v| v.abs()).sum()
}

/// `±1` if the row is a signed unit vector at some coordinate, with the
/// coordinate; `None` otherwise.
fn unit_row(row: &[BigRational]) -> Option<(usize, i8)> {
    let mut hit = None;
    for (idx, value) in row.iter().enumerate() {
        if value.is_zero() {
            continue;
        }
        if hit.is_some() {
            return None;
        }
        if *value == BigRational::one() {
            hit = Some((idx, 1));
        } else if *value == -BigRational::one() {
            hit = Some((idx, -1));
        } else {
            return None;
        }
    }
    hit
}

#[derive(Serialize, Deserialize)]
struct FiniteOperatorWire {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "T")]
    t: Vec<Vec<String>>,
    #[serde(rename = "P")]
    p: Vec<Vec<String>>,
}

fn parse_matrix(rows: Vec<Vec<String>>) -> Result<Matrix> {
    rows.into_iter()
        .map(|row| row.iter().map(|v| rat::parse_rational(v)).collect())
        .collect()
}

fn format_matrix(rows: &Matrix) -> Vec<Vec<String>> {
    rows.iter()
        .map(|row| row.iter().map(rat::format_rational).collect())
        .collect()
}

impl TryFrom<FiniteOperatorWire> for FiniteOperator {
    type Error = Error;

    fn try_from(wire: FiniteOperatorWire) -> Result<Self> {
        let op = FiniteOperator::new(parse_matrix(wire.t)?, parse_matrix(wire.p)?)?;
        if op.k_size != wire.k || op.l_size != wire.l {
            return Err(Error::InvalidData(format!(
                "declared sizes K={}, L={} do not match a {}x{} matrix T",
                wire.k, wire.l, op.k_size, op.l_size
            )));
        }
        Ok(op)
    }
}

impl From<FiniteOperator> for FiniteOperatorWire {
    fn from(op: FiniteOperator) -> FiniteOperatorWire {
        FiniteOperatorWire {
            k: op.k_size,
            l: op.l_size,
            t: format_matrix(&op.t),
            p: format_matrix(&op.p),
        }
    }
}

/// One named check with every violation it found; empty means passed.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub violations: Vec<String>,
}

impl Clause {
    fn new(name: &str, violations: Vec<String>) -> Self {
        Clause {
            name: name.into(),
            violations,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A list of named clauses; passes when every clause does.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ClauseReport {
    pub clauses: Vec<Clause>,
}

impl ClauseReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(Clause::passed)
    }
}

/// Checks the two matrix criteria: `T` is a sup-norm isometry (rows
/// bounded by 1 in ℓ1, every column hit by a `±unit` row) and `P` is a
/// norm-1 projection fixing the range of `T` (idempotent, `P·T = T`,
/// rows bounded by 1 with the bound attained).
pub fn check_hypotheses(op: &FiniteOperator) -> ClauseReport {
    let one = BigRational::one();
    let mut clauses = Vec::new();

    clauses.push(Clause::new(
        "t_rows_bounded",
        (0..op.k_size)
            .filter(|&y| l1(&op.t[y]) > one)
            .map(|y| format!("row {y} of T has l1-norm {}", rat::format_rational(&l1(&op.t[y]))))
            .collect(),
    ));

    clauses.push(Clause::new(
        "t_unit_rows",
        (0..op.l_size)
            .filter(|&x| !op.t.iter().any(|row| unit_row(row) == Some((x, 1)) || unit_row(row) == Some((x, -1))))
            .map(|x| format!("no row of T is a signed unit at column {x}"))
            .collect(),
    ));

    let mut idempotent = Vec::new();
    for y in 0..op.k_size {
        for k in 0..op.k_size {
            let entry: BigRational = (0..op.k_size).map(|j| &op.p[y][j] * &op.p[j][k]).sum();
            if entry != op.p[y][k] {
                idempotent.push(format!(
                    "(P*P)[{y}][{k}] = {} but P[{y}][{k}] = {}",
                    rat::format_rational(&entry),
                    rat::format_rational(&op.p[y][k])
                ));
            }
        }
    }
    clauses.push(Clause::new("p_idempotent", idempotent));

    let mut fixes = Vec::new();
    for y in 0..op.k_size {
        for x in 0..op.l_size {
            let entry: BigRational = (0..op.k_size).map(|j| &op.p[y][j] * &op.t[j][x]).sum();
            if entry != op.t[y][x] {
                fixes.push(format!(
                    "(P*T)[{y}][{x}] = {} but T[{y}][{x}] = {}",
                    rat::format_rational(&entry),
                    rat::format_rational(&op.t[y][x])
                ));
            }
        }
    }
    clauses.push(Clause::new("p_fixes_range", fixes));

    clauses.push(Clause::new(
        "p_rows_bounded",
        (0..op.k_size)
            .filter(|&y| l1(&op.p[y]) > one)
            .map(|y| format!("row {y} of P has l1-norm {}", rat::format_rational(&l1(&op.p[y]))))
            .collect(),
    ));

    clauses.push(Clause::new(
        "p_attains_norm",
        if op.p.iter().any(|row| l1(row) == one) {
            Vec::new()
        } else {
            vec!["no row of P has l1-norm exactly 1".into()]
        },
    ));

    ClauseReport { clauses }
}

/// The extracted factorization data: the witness rows `F`, the
/// coordinate `ρ(y)` and sign `σ(y)` each witness reads off, and per
/// coordinate `x` the measure `φ(x)` (a length-`K` row supported on
/// `ρ⁻¹(x)` with ℓ1-norm 1).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "ExtractionWire", into = "ExtractionWire")]
pub struct Extraction {
    k_size: usize,
    l_size: usize,
    f_set: Vec<usize>,
    rho: Vec<usize>,
    sigma: Vec<i8>,
    phi: Matrix,
}

impl Extraction {
    pub fn f_set(&self) -> &[usize] {
        &self.f_set
    }

    /// `ρ(y)`, indexed parallel to `f_set`.
    pub fn rho(&self) -> &[usize] {
        &self.rho
    }

    /// `σ(y)`, indexed parallel to `f_set`.
    pub fn sigma(&self) -> &[i8] {
        &self.sigma
    }

    /// `φ(x)` for each `x < l_size`, as rows over `K`.
    pub fn phi(&self) -> &Matrix {
        &self.phi
    }

    pub fn preimage(&self, x: usize) -> Vec<usize> {
        self.f_set
            .iter()
            .zip(&self.rho)
            .filter(|(_, &r)| r == x)
            .map(|(&y, _)| y)
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ExtractionWire {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "F")]
    f_set: Vec<usize>,
    rho: Vec<usize>,
    sigma: Vec<i8>,
    phi: Vec<Vec<String>>,
}

impl TryFrom<ExtractionWire> for Extraction {
    type Error = Error;

    fn try_from(wire: ExtractionWire) -> Result<Self> {
        if wire.rho.len() != wire.f_set.len() || wire.sigma.len() != wire.f_set.len() {
            return Err(Error::InvalidData(
                "F, rho, and sigma must have equal lengths".into(),
            ));
        }
        let mut seen = vec![false; wire.k];
        for &y in &wire.f_set {
            if y >= wire.k {
                return Err(Error::InvalidData(format!("F point {y} out of range")));
            }
            if std::mem::replace(&mut seen[y], true) {
                return Err(Error::InvalidData(format!("repeated F point {y}")));
            }
        }
        if let Some(&x) = wire.rho.iter().find(|&&x| x >= wire.l) {
            return Err(Error::InvalidData(format!("rho value {x} out of range")));
        }
        if wire.sigma.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidData("sigma values must be 1 or -1".into()));
        }
        let phi = parse_matrix(wire.phi)?;
        if phi.len() != wire.l || phi.iter().any(|row| row.len() != wire.k) {
            return Err(Error::InvalidData(format!(
                "phi must be a {}x{} matrix",
                wire.l, wire.k
            )));
        }
        Ok(Extraction {
            k_size: wire.k,
            l_size: wire.l,
            f_set: wire.f_set,
            rho: wire.rho,
            sigma: wire.sigma,
            phi,
        })
    }
}

impl From<Extraction> for ExtractionWire {
    fn from(ex: Extraction) -> ExtractionWire {
        ExtractionWire {
            k: ex.k_size,
            l: ex.l_size,
            f_set: ex.f_set,
            rho: ex.rho,
            sigma: ex.sigma,
            phi: format_matrix(&ex.phi),
        }
    }
}

/// Reads the factorization off the matrices: `F` collects the rows of
/// `T` that are signed units, `ρ`/`σ` their coordinates and signs, and
/// `φ(x) = σ(y)·row_y(P)` for any witness `y` of `x` — every witness of
/// the same coordinate must give the same row, and each `φ(x)` must
/// come out with ℓ1-norm 1 and support inside the witnesses of `x`;
/// disagreement means the input was not a genuine isometry/projection
/// pair and is reported as an error.
pub fn extract(op: &FiniteOperator) -> Result<Extraction> {
    let mut f_set = Vec::new();
    let mut rho = Vec::new();
    let mut sigma = Vec::new();
    for (y, row) in op.t.iter().enumerate() {
        if let Some((x, sign)) = unit_row(row) {
            f_set.push(y);
            rho.push(x);
            sigma.push(sign);
        }
    }
    let mut phi: Vec<Option<Vec<BigRational>>> = vec![None; op.l_size];
    for ((&y, &x), &sign) in f_set.iter().zip(&rho).zip(&sigma) {
        let row: Vec<BigRational> = op.p[y]
            .iter()
            .map(|v| if sign == 1 { v.clone() } else { -v })
            .collect();
        match &phi[x] {
            None => phi[x] = Some(row),
            Some(existing) if *existing == row => {}
            Some(_) => {
                return Err(Error::Extraction(format!(
                    "witnesses of coordinate {x} disagree on phi({x}); \
                     P does not factor through the range of T"
                )));
            }
        }
    }
    let phi: Matrix = phi
        .into_iter()
        .enumerate()
        .map(|(x, row)| {
            row.ok_or_else(|| {
                Error::Extraction(format!(
                    "no witness row for coordinate {x}; rho is not surjective"
                ))
            })
        })
        .collect::<Result<_>>()?;
    for (x, row) in phi.iter().enumerate() {
        if l1(row) != BigRational::one() {
            return Err(Error::Extraction(format!(
                "phi({x}) has norm {}, expected 1",
                rat::format_rational(&l1(row))
            )));
        }
        for (k, value) in row.iter().enumerate() {
            if !value.is_zero() && !f_set.iter().zip(&rho).any(|(&y, &r)| y == k && r == x) {
                return Err(Error::Extraction(format!(
                    "phi({x}) puts mass on point {k} outside the witnesses of {x}"
                )));
            }
        }
    }
    Ok(Extraction {
        k_size: op.k_size,
        l_size: op.l_size,
        f_set,
        rho,
        sigma,
        phi,
    })
}

/// Re-derives the factorization identities from scratch against the
/// matrices: support containment, `(Tf)(y) = σ(y)f(ρ(y))`, and
/// `(Pg)(y) = σ(y)⟨φ(ρ(y)), g⟩` on all basis vectors plus `trials`
/// random rational functions, with the positivity consequences checked
/// whenever the matrices are entrywise nonnegative.
pub fn verify_conclusions(
    op: &FiniteOperator,
    ex: &Extraction,
    trials: usize,
    seed: u64,
) -> ClauseReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clauses = Vec::new();

    let mut shape = Vec::new();
    if ex.k_size != op.k_size || ex.l_size != op.l_size {
        shape.push(format!(
            "extraction is for K={}, L={} but the operator has K={}, L={}",
            ex.k_size, ex.l_size, op.k_size, op.l_size
        ));
    }
    clauses.push(Clause::new("shapes_match", shape));
    if !clauses[0].passed() {
        return ClauseReport { clauses };
    }

    clauses.push(Clause::new(
        "rho_surjective",
        (0..op.l_size)
            .filter(|&x| !ex.rho.contains(&x))
            .map(|x| format!("coordinate {x} has no witness"))
            .collect(),
    ));

    clauses.push(Clause::new(
        "phi_unit_norm",
        (0..op.l_size)
            .filter(|&x| l1(&ex.phi[x]) != BigRational::one())
            .map(|x| {
                format!(
                    "phi({x}) has norm {}, expected 1",
                    rat::format_rational(&l1(&ex.phi[x]))
                )
            })
            .collect(),
    ));

    let mut support = Vec::new();
    for (x, row) in ex.phi.iter().enumerate() {
        let pre = ex.preimage(x);
        for (k, value) in row.iter().enumerate() {
            if !value.is_zero() && !pre.contains(&k) {
                support.push(format!(
                    "phi({x}) has mass {} at point {k}, outside its witness set {:?}",
                    rat::format_rational(value),
                    pre
                ));
            }
        }
    }
    clauses.push(Clause::new("support_containment", support));

    let rand_fn = |rng: &mut ChaCha8Rng, len: usize| -> Vec<BigRational> {
        (0..len)
            .map(|_| {
                BigRational::new(rng.gen_range(-4i64..=4).into(), rng.gen_range(1i64..=4).into())
            })
            .collect()
    };

    let mut eval_t = Vec::new();
    let mut fs: Vec<Vec<BigRational>> = (0..op.l_size)
        .map(|x| basis(op.l_size, x))
        .collect();
    fs.extend((0..trials).map(|_| rand_fn(&mut rng, op.l_size)));
    for (tag, f) in fs.iter().enumerate() {
        for ((&y, &x), &sign) in ex.f_set.iter().zip(&ex.rho).zip(&ex.sigma) {
            let lhs = op.apply_t(f, y);
            let rhs = &f[x] * BigRational::from_integer(sign.into());
            if lhs != rhs {
                eval_t.push(format!(
                    "function #{tag}: (Tf)({y}) = {} but sigma({y})*f(rho({y})) = {}",
                    rat::format_rational(&lhs),
                    rat::format_rational(&rhs)
                ));
            }
        }
    }
    clauses.push(Clause::new("t_factors_through_rho", eval_t));

    let mut eval_p = Vec::new();
    let mut gs: Vec<Vec<BigRational>> = (0..op.k_size)
        .map(|k| basis(op.k_size, k))
        .collect();
    gs.extend((0..trials).map(|_| rand_fn(&mut rng, op.k_size)));
    for (tag, g) in gs.iter().enumerate() {
        for ((&y, &x), &sign) in ex.f_set.iter().zip(&ex.rho).zip(&ex.sigma) {
            let lhs = op.apply_p(g, y);
            let rhs = dot(&ex.phi[x], g) * BigRational::from_integer(sign.into());
            if lhs != rhs {
                eval_p.push(format!(
                    "function #{tag}: (Pg)({y}) = {} but sigma({y})*<phi(rho({y})), g> = {}",
                    rat::format_rational(&lhs),
                    rat::format_rational(&rhs)
                ));
            }
        }
    }
    clauses.push(Clause::new("p_factors_through_phi", eval_p));

    if op.t_is_positive() {
        clauses.push(Clause::new(
            "positive_t_forces_plus_signs",
            ex.f_set
                .iter()
                .zip(&ex.sigma)
                .filter(|(_, &s)| s != 1)
                .map(|(&y, _)| format!("T is positive but sigma({y}) = -1"))
                .collect(),
        ));
        if op.p_is_positive() {
            let mut prob = Vec::new();
            for (x, row) in ex.phi.iter().enumerate() {
                if row.iter().any(|v| v.is_negative()) {
                    prob.push(format!("phi({x}) has a negative mass"));
                }
                let total: BigRational = row.iter().sum();
                if total != BigRational::one() {
                    prob.push(format!(
                        "phi({x}) has total mass {}, expected 1",
                        rat::format_rational(&total)
                    ));
                }
            }
            clauses.push(Clause::new("positive_p_gives_probabilities", prob));
        }
    }

    ClauseReport { clauses }
}

fn basis(len: usize, at: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); len];
    v[at] = BigRational::one();
    v
}

/// Generates an operator pair that passes [`check_hypotheses`] by
/// construction: a signed injection `ι: L → K` supplies the unit rows
/// of `T`, the remaining rows are random with ℓ1-norm at most 1 (some
/// duplicating a unit row so that coordinates pick up several
/// witnesses), and `P = T·S` where `S` reads each coordinate back off
/// its injected row. Half the seeds produce entrywise nonnegative
/// pairs to exercise the positivity consequences.
pub fn random_instance(k_size: usize, l_size: usize, seed: u64) -> Result<FiniteOperator> {
    if l_size == 0 || k_size < l_size {
        return Err(Error::InvalidData(format!(
            "need K >= L >= 1, got K={k_size}, L={l_size}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positive = rng.gen_bool(0.5);

    let mut targets: Vec<usize> = (0..k_size).collect();
    targets.shuffle(&mut rng);
    let injection: Vec<usize> = targets[..l_size].to_vec();
    let signs: Vec<i8> = (0..l_size)
        .map(|_| if positive || rng.gen_bool(0.7) { 1 } else { -1 })
        .collect();

    let mut t: Matrix = vec![vec![BigRational::zero(); l_size]; k_size];
    for (x, &y) in injection.iter().enumerate() {
        t[y][x] = BigRational::from_integer(signs[x].into());
    }
    for (y, row_y) in t.iter_mut().enumerate() {
        if injection.contains(&y) {
            continue;
        }
        if rng.gen_bool(0.3) {
            // a duplicate witness row for some coordinate
            let x = rng.gen_range(0..l_size);
            let sign = if positive { 1 } else if rng.gen_bool(0.8) { signs[x] } else { -1 };
            row_y[x] = BigRational::from_integer(sign.into());
        } else {
            let lo = if positive { 0 } else { -3 };
            let row: Vec<BigRational> = (0..l_size)
                .map(|_| BigRational::new(rng.gen_range(lo..=3).into(), rng.gen_range(3i64..=5).into()))
                .collect();
            let norm = l1(&row);
            *row_y = if norm > BigRational::one() {
                row.iter().map(|v| v / &norm).collect()
            } else {
                row
            };
            // avoid accidentally minting a unit row with a sign clash
            if let Some((x, sign)) = unit_row(row_y) {
                if positive && sign == -1 {
                    row_y[x] = -row_y[x].clone();
                }
            }
        }
    }

    // P = T·S with S(x, ·) = signs[x]·unit at injection[x]
    let mut p: Matrix = vec![vec![BigRational::zero(); k_size]; k_size];
    for y in 0..k_size {
        for (x, &target) in injection.iter().enumerate() {
            p[y][target] = &t[y][x] * BigRational::from_integer(signs[x].into());
        }
    }
    FiniteOperator::new(t, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn mat(rows: &[&[(i64, i64)]]) -> Matrix {
        rows.iter()
            .map(|row| row.iter().map(|&(p, d)| q(p, d)).collect())
            .collect()
    }

    fn identity(n: usize) -> Matrix {
        (0..n)
            .map(|i| (0..n).map(|j| q((i == j) as i64, 1)).collect())
            .collect()
    }

    #[test]
    fn identity_operator() {
        let op = FiniteOperator::new(identity(2), identity(2)).unwrap();
        assert!(check_hypotheses(&op).passed());
        let ex = extract(&op).unwrap();
        assert_eq!(ex.f_set(), &[0, 1]);
        assert_eq!(ex.rho(), &[0, 1]);
        assert_eq!(ex.sigma(), &[1, 1]);
        assert_eq!(ex.phi(), &identity(2));
        assert!(verify_conclusions(&op, &ex, 5, 7).passed());
    }

    #[test]
    fn hypothesis_violations_are_reported() {
        // a row of l1-norm 2
        let op = FiniteOperator::new(mat(&[&[(1, 1), (1, 1)], &[(0, 1), (1, 1)]]), identity(2))
            .unwrap();
        let report = check_hypotheses(&op);
        assert!(!report.passed());
        let clause = report.clauses.iter().find(|c| c.name == "t_rows_bounded").unwrap();
        assert_eq!(
            clause.violations,
            vec!["row 0 of T has l1-norm 2/1".to_string()]
        );
        // no unit row for column 0
        let op = FiniteOperator::new(mat(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 1)]]), identity(2))
            .unwrap();
        let report = check_hypotheses(&op);
        let clause = report.clauses.iter().find(|c| c.name == "t_unit_rows").unwrap();
        assert_eq!(
            clause.violations,
            vec!["no row of T is a signed unit at column 0".to_string()]
        );
        // P failing idempotence
        let op = FiniteOperator::new(
            identity(2),
            mat(&[&[(0, 1), (1, 1)], &[(0, 1), (0, 1)]]),
        )
        .unwrap();
        let report = check_hypotheses(&op);
        assert!(!report
            .clauses
            .iter()
            .find(|c| c.name == "p_idempotent")
            .unwrap()
            .passed());
    }

    #[test]
    fn averaging_example() {
        let t = mat(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)], &[(1, 2), (1, 2)]]);
        let p = mat(&[
            &[(1, 1), (0, 1), (0, 1)],
            &[(0, 1), (1, 1), (0, 1)],
            &[(1, 2), (1, 2), (0, 1)],
        ]);
        let op = FiniteOperator::new(t, p).unwrap();
        assert!(check_hypotheses(&op).passed());
        let ex = extract(&op).unwrap();
        assert_eq!(ex.f_set(), &[0, 1]);
        assert_eq!(ex.rho(), &[0, 1]);
        assert_eq!(ex.sigma(), &[1, 1]);
        assert_eq!(ex.phi(), &mat(&[
            &[(1, 1), (0, 1), (0, 1)],
            &[(0, 1), (1, 1), (0, 1)],
        ]));
        assert!(verify_conclusions(&op, &ex, 10, 3).passed());
    }

    #[test]
    fn signed_diagonal() {
        let t = mat(&[&[(1, 1), (0, 1)], &[(0, 1), (-1, 1)]]);
        let op = FiniteOperator::new(t, identity(2)).unwrap();
        assert!(check_hypotheses(&op).passed());
        let ex = extract(&op).unwrap();
        assert_eq!(ex.sigma(), &[1, -1]);
        assert_eq!(ex.phi()[1], vec![q(0, 1), q(-1, 1)]);
        assert!(verify_conclusions(&op, &ex, 5, 11).passed());
    }

    #[test]
    fn tampering_is_caught() {
        let op = FiniteOperator::new(identity(2), identity(2)).unwrap();
        let ex = extract(&op).unwrap();

        let mut bad_sigma = ex.clone();
        bad_sigma.sigma[1] = -1;
        let report = verify_conclusions(&op, &bad_sigma, 0, 5);
        assert!(!report
            .clauses
            .iter()
            .find(|c| c.name == "t_factors_through_rho")
            .unwrap()
            .passed());

        let mut bad_phi = ex.clone();
        bad_phi.phi[0][0] = q(-1, 1);
        let report = verify_conclusions(&op, &bad_phi, 0, 5);
        let clause = report
            .clauses
            .iter()
            .find(|c| c.name == "p_factors_through_phi")
            .unwrap();
        assert!(!clause.passed());
        assert!(clause.violations[0].contains("(Pg)(0) = 1"));
    }

    #[test]
    fn ill_formed_projection_fails_cross_check() {
        // both rows of T witness the single coordinate, but P = identity
        // does not factor through the one-dimensional range
        let t = mat(&[&[(1, 1)], &[(1, 1)]]);
        let op = FiniteOperator::new(t, identity(2)).unwrap();
        assert!(check_hypotheses(&op).passed());
        let err = extract(&op).unwrap_err();
        assert!(err.to_string().contains("disagree"));
    }

    #[test]
    fn random_instances_verify() {
        let mut multi_witness = 0usize;
        let mut positives = 0usize;
        for seed in 0..100u64 {
            let k = 1 + (seed as usize * 7) % 8;
            let l = 1 + (seed as usize * 3) % k.min(5);
            let op = random_instance(k, l, seed).unwrap();
            assert!(check_hypotheses(&op).passed(), "seed {seed}");
            let ex = extract(&op).unwrap();
            assert!(verify_conclusions(&op, &ex, 3, seed).passed(), "seed {seed}");
            for x in 0..l {
                assert!(!ex.preimage(x).is_empty());
                assert_eq!(l1(&ex.phi()[x]), q(1, 1));
            }
            if (0..l).any(|x| ex.preimage(x).len() >= 2) {
                multi_witness += 1;
            }
            if op.t_is_positive() && op.p_is_positive() {
                positives += 1;
                assert!(ex.sigma().iter().all(|&s| s == 1));
            }
        }
        assert!(multi_witness >= 10, "only {multi_witness} multi-witness instances");
        assert!(positives >= 20, "only {positives} positive instances");
    }

    #[test]
    fn tiny_instances() {
        let op = random_instance(1, 1, 5).unwrap();
        assert_eq!(op.p(), &identity(1));
        assert!(check_hypotheses(&op).passed());
        assert!(random_instance(1, 2, 0).is_err());
        assert!(random_instance(0, 0, 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let op = FiniteOperator::new(
            mat(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)], &[(1, 2), (1, 2)]]),
            identity(3),
        )
        .unwrap();
        let json = serde_json::to_string(&op).unwrap();
        assert!(json.starts_with(r#"{"K":3,"L":2,"T":[["1/1","0/1"],"#));
        assert_eq!(serde_json::from_str::<FiniteOperator>(&json).unwrap(), op);

        // declared sizes must match the matrices
        assert!(serde_json::from_str::<FiniteOperator>(
            r#"{"K":2,"L":1,"T":[["1/1"],["0/1"]],"P":[["1/1"]]}"#
        )
        .is_err());
        // ragged rows rejected
        assert!(serde_json::from_str::<FiniteOperator>(
            r#"{"K":2,"L":2,"T":[["1/1","0/1"],["0/1"]],"P":[["1/1","0/1"],["0/1","1/1"]]}"#
        )
        .is_err());

        let ex = extract(&FiniteOperator::new(identity(2), identity(2)).unwrap()).unwrap();
        let json = serde_json::to_string(&ex).unwrap();
        assert_eq!(serde_json::from_str::<Extraction>(&json).unwrap(), ex);
        assert!(serde_json::from_str::<Extraction>(
            r#"{"K":2,"L":2,"F":[0,0],"rho":[0,1],"sigma":[1,1],"phi":[["1/1","0/1"],["0/1","1/1"]]}"#
        )
        .is_err());
    }
}
