//! Necessary conditions for tractability of `Z_A(·)` when every entry of `A`
//! is a root of unity, the gadgets behind them, and the resulting classifier
//! for problems `S[q, h]` with `A_{i,j} = ω_q^{h(i,j)}`.
//!
//! Inner products of rows are computed in floating point against a
//! tolerance scaled by `m`; linear dependence and row equality are decided
//! exactly on exponents.

use crate::num::{roots_table, Real};
use crate::ntheory::prime_power;
use crate::polyring::{Hypergraph, Multigraph, PolyError, SparsePoly};
use crate::{ComplexMatrix, RealMatrix};
use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

/// Default tolerance factor: inner products below `DEFAULT_TOL · m` in
/// magnitude count as zero.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DichotomyError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("exponent matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

type Result<T> = std::result::Result<T, DichotomyError>;

/// Symmetric `m×m` matrix `A_{i,j} = ω_M^{e[i][j]}`, stored by exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawExponentMatrix")]
pub struct ExponentMatrix {
    m: usize,
    #[serde(rename = "M")]
    order: u64,
    exponents: Vec<Vec<u64>>,
}

#[derive(Deserialize)]
struct RawExponentMatrix {
    m: Option<usize>,
    #[serde(rename = "M")]
    order: u64,
    exponents: Vec<Vec<u64>>,
}

impl TryFrom<RawExponentMatrix> for ExponentMatrix {
    type Error = DichotomyError;

    fn try_from(raw: RawExponentMatrix) -> Result<Self> {
        if let Some(m) = raw.m {
            if m != raw.exponents.len() {
                return Err(DichotomyError::InvalidInput(format!(
                    "m = {m} but {} rows given",
                    raw.exponents.len()
                )));
            }
        }
        ExponentMatrix::new(raw.order, raw.exponents)
    }
}

impl ExponentMatrix {
    /// Validates shape and symmetry; exponents are reduced modulo `order`.
    pub fn new(order: u64, exponents: Vec<Vec<u64>>) -> Result<Self> {
        if order == 0 {
            return Err(DichotomyError::InvalidInput("root order must be positive".into()));
        }
        let m = exponents.len();
        if m == 0 || exponents.iter().any(|r| r.len() != m) {
            return Err(DichotomyError::InvalidInput("exponent matrix must be square and nonempty".into()));
        }
        let exponents: Vec<Vec<u64>> = exponents.into_iter().map(|r| r.into_iter().map(|e| e % order).collect()).collect();
        for i in 0..m {
            for j in i + 1..m {
                if exponents[i][j] != exponents[j][i] {
                    return Err(DichotomyError::NotSymmetric { i, j });
                }
            }
        }
        Ok(ExponentMatrix { m, order, exponents })
    }

    /// The Fourier matrix `e[i][j] = i·j mod m`.
    pub fn fourier(m: usize) -> Self {
        let exps = (0..m).map(|i| (0..m).map(|j| (i * j % m) as u64).collect()).collect();
        ExponentMatrix::new(m as u64, exps).expect("symmetric by construction")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The root order `M`.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exponent(&self, i: usize, j: usize) -> u64 {
        self.exponents[i][j]
    }

    pub fn exponents(&self) -> &[Vec<u64>] {
        &self.exponents
    }

    /// The complex entries `ω_M^{e[i][j]}`.
    pub fn entries<T: Real>(&self) -> ComplexMatrix<T> {
        let roots = roots_table::<T>(self.order);
        self.exponents.iter().map(|r| r.iter().map(|&e| roots[e as usize]).collect()).collect()
    }

    /// `⟨A_{i,*}, A_{j,*}⟩ = Σ_k A_{i,k}·conj(A_{j,k})`.
    pub fn inner(&self, i: usize, j: usize) -> Complex<f64> {
        let roots = roots_table::<f64>(self.order);
        self.inner_with(&roots, i, j)
    }

    fn inner_with(&self, roots: &[Complex<f64>], i: usize, j: usize) -> Complex<f64> {
        let mm = self.order;
        (0..self.m)
            .map(|k| roots[((self.exponents[i][k] + mm - self.exponents[j][k]) % mm) as usize])
            .sum()
    }

    /// Rows `i` and `j` are scalar multiples of each other, i.e. their
    /// exponent difference is constant modulo `M`.
    pub fn rows_dependent(&self, i: usize, j: usize) -> bool {
        let mm = self.order;
        let d0 = (self.exponents[i][0] + mm - self.exponents[j][0]) % mm;
        (0..self.m).all(|k| (self.exponents[i][k] + mm - self.exponents[j][k]) % mm == d0)
    }

    fn is_normalized(&self) -> Option<usize> {
        (0..self.m).find(|&k| self.exponents[0][k] != 0)
    }
}

/// Description of why a condition failed, or of what made it pass.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Row or column 0 has a non-unit entry at this index.
    NotNormalized { index: usize },
    /// Distinct rows that are not orthogonal.
    NotOrthogonal { i: usize, j: usize, magnitude: f64 },
    /// Rows neither linearly dependent nor orthogonal.
    DependentNorOrthogonal { i: usize, j: usize, magnitude: f64 },
    /// A full-rank 2×2 submatrix with at least three nonzero entries.
    Rank1 { rows: (usize, usize), cols: (usize, usize), det: f64 },
    /// No row equals the Hadamard product of rows `i` and `j`.
    UncoveredProduct { i: usize, j: usize },
    /// Classes of equal rows have different sizes.
    UnequalBlocks { sizes: Vec<usize> },
    /// `A = J ⊗ A′` with `A′` of size `ell` satisfying the Group Condition.
    Decomposition { ell: usize, block_size: usize },
    /// All checked conditions hold but `A` is not normalized, so only the
    /// pairwise test applies.
    OnlyPairwiseChecked { index: usize },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::NotNormalized { index } => write!(f, "row/column 0 has a non-unit entry at index {index}"),
            Witness::NotOrthogonal { i, j, magnitude } => {
                write!(f, "rows {i} and {j} are not orthogonal (|<A_i, A_j>| = {magnitude:.6})")
            }
            Witness::DependentNorOrthogonal { i, j, magnitude } => write!(
                f,
                "rows {i} and {j} are neither linearly dependent nor orthogonal (|<A_i, A_j>| = {magnitude:.6})"
            ),
            Witness::Rank1 { rows, cols, det } => write!(
                f,
                "submatrix rows ({}, {}) columns ({}, {}) has determinant {det:.6} and at least three nonzero entries",
                rows.0, rows.1, cols.0, cols.1
            ),
            Witness::UncoveredProduct { i, j } => {
                write!(f, "Group Condition fails: no row equals the Hadamard product of rows {i} and {j}")
            }
            Witness::UnequalBlocks { sizes } => write!(f, "classes of equal rows have unequal sizes {sizes:?}"),
            Witness::Decomposition { ell, block_size } => write!(
                f,
                "A = J ⊗ A' with J the {block_size}x{block_size} all-ones matrix and A' of size {ell} satisfying the Group Condition"
            ),
            Witness::OnlyPairwiseChecked { index } => write!(
                f,
                "every row pair is dependent or orthogonal; A is not normalized (row 0, index {index}) so no further test applies"
            ),
        }
    }
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Result of a condition test.
#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    Holds,
    Violated(Witness),
}

impl Check {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Check::Holds => None,
            Check::Violated(w) => Some(w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Hard,
    TractableInClassC,
    ConditionsPassed,
}

/// `A = J ⊗ A′` up to a permutation: `A_{i,j} = A′_{block_map[i], block_map[j]}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub ell: usize,
    pub block_map: Vec<usize>,
    #[serde(rename = "A_prime")]
    pub a_prime: ExponentMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardnessVerdict {
    pub outcome: Outcome,
    pub witness: Witness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Decomposition>,
}

impl HardnessVerdict {
    fn hard(witness: Witness) -> Self {
        HardnessVerdict { outcome: Outcome::Hard, witness, decomposition: None }
    }
}

/// Row and column 0 all ones, and distinct rows pairwise orthogonal.
pub fn is_discrete_unitary(a: &ExponentMatrix, tol: f64) -> Check {
    if let Some(index) = a.is_normalized() {
        return Check::Violated(Witness::NotNormalized { index });
    }
    let roots = roots_table::<f64>(a.order);
    let bound = tol * a.m as f64;
    for i in 0..a.m {
        for j in i + 1..a.m {
            let magnitude = a.inner_with(&roots, i, j).norm();
            if magnitude > bound {
                return Check::Violated(Witness::NotOrthogonal { i, j, magnitude });
            }
        }
    }
    Check::Holds
}

/// A 2×2 submatrix of the nonnegative matrix `b` with `|det| > tol` and at
/// least three entries above `tol`; exhaustive scan.
pub fn rank1_violation<T: Real>(b: &[Vec<T>], tol: T) -> Option<Witness> {
    let m = b.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in 0..m {
                for l in k + 1..m {
                    let quad = [b[i][k], b[i][l], b[j][k], b[j][l]];
                    let nonzero = quad.iter().filter(|x| x.abs() > tol).count();
                    let det = b[i][k] * b[j][l] - b[i][l] * b[j][k];
                    if nonzero >= 3 && det.abs() > tol {
                        return Some(Witness::Rank1 {
                            rows: (i, j),
                            cols: (k, l),
                            det: det.to_f64().unwrap_or(f64::NAN),
                        });
                    }
                }
            }
        }
    }
    None
}

/// First row pair (lexicographic) that is neither linearly dependent nor
/// orthogonal.
pub fn orthogonality_violation(a: &ExponentMatrix, tol: f64) -> Option<Witness> {
    let roots = roots_table::<f64>(a.order);
    let bound = tol * a.m as f64;
    for i in 0..a.m {
        for j in i + 1..a.m {
            if a.rows_dependent(i, j) {
                continue;
            }
            let magnitude = a.inner_with(&roots, i, j).norm();
            if magnitude > bound {
                return Some(Witness::DependentNorOrthogonal { i, j, magnitude });
            }
        }
    }
    None
}

/// For all `i, j` some row `k` has `e[k] ≡ e[i] + e[j] (mod M)`.
///
/// Requires `A` to be discrete unitary.
pub fn group_condition(a: &ExponentMatrix, tol: f64) -> Result<Check> {
    if let Check::Violated(w) = is_discrete_unitary(a, tol) {
        return Err(DichotomyError::Precondition(format!("matrix is not discrete unitary: {w}")));
    }
    Ok(hadamard_closure(a))
}

fn hadamard_closure(a: &ExponentMatrix) -> Check {
    let rows: std::collections::HashSet<&Vec<u64>> = a.exponents.iter().collect();
    for i in 0..a.m {
        for j in i..a.m {
            let sum: Vec<u64> = (0..a.m).map(|k| (a.exponents[i][k] + a.exponents[j][k]) % a.order).collect();
            if !rows.contains(&sum) {
                return Check::Violated(Witness::UncoveredProduct { i, j });
            }
        }
    }
    Check::Holds
}

/// Partitions rows into classes of equal rows, checks equal class sizes
/// and Hadamard closure of the distinct rows, and on success returns the
/// decomposition `A = J ⊗ A′`.
///
/// Requires `A` normalized with every row pair equal or orthogonal.
pub fn generalized_group_condition(a: &ExponentMatrix, tol: f64) -> Result<HardnessVerdict> {
    if let Some(index) = a.is_normalized() {
        return Err(DichotomyError::Precondition(format!(
            "matrix is not normalized (row 0, index {index})"
        )));
    }
    let roots = roots_table::<f64>(a.order);
    let bound = tol * a.m as f64;
    for i in 0..a.m {
        for j in i + 1..a.m {
            if a.exponents[i] != a.exponents[j] && a.inner_with(&roots, i, j).norm() > bound {
                return Err(DichotomyError::Precondition(format!(
                    "rows {i} and {j} are neither equal nor orthogonal; use orthogonality_violation"
                )));
            }
        }
    }
    let mut reps: Vec<usize> = Vec::new();
    let mut block_map = Vec::with_capacity(a.m);
    for i in 0..a.m {
        match reps.iter().position(|&r| a.exponents[r] == a.exponents[i]) {
            Some(b) => block_map.push(b),
            None => {
                block_map.push(reps.len());
                reps.push(i);
            }
        }
    }
    let ell = reps.len();
    let sizes: Vec<usize> = (0..ell).map(|b| block_map.iter().filter(|&&x| x == b).count()).collect();
    if sizes.iter().any(|&s| s * ell != a.m) {
        return Ok(HardnessVerdict::hard(Witness::UnequalBlocks { sizes }));
    }
    let a_prime = ExponentMatrix::new(
        a.order,
        reps.iter().map(|&r| reps.iter().map(|&c| a.exponents[r][c]).collect()).collect(),
    )?;
    if let Check::Violated(Witness::UncoveredProduct { i, j }) = hadamard_closure(&a_prime) {
        return Ok(HardnessVerdict::hard(Witness::UncoveredProduct { i: reps[i], j: reps[j] }));
    }
    Ok(HardnessVerdict {
        outcome: Outcome::TractableInClassC,
        witness: Witness::Decomposition { ell, block_size: a.m / ell },
        decomposition: Some(Decomposition { ell, block_map, a_prime }),
    })
}

fn check_two_vars(h: &SparsePoly) -> Result<()> {
    if h.nvars() != 2 {
        return Err(DichotomyError::InvalidInput(format!("h must have 2 variables, got {}", h.nvars())));
    }
    Ok(())
}

fn eval_table(q: u64, h: &SparsePoly) -> Result<Vec<Vec<u64>>> {
    check_two_vars(h)?;
    let qb = BigInt::from(q);
    let h = h.scalar_retarget(&BigInt::from(1), &qb)?;
    let mut table = vec![vec![0u64; q as usize]; q as usize];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let v = h.eval_point(&[BigInt::from(i), BigInt::from(j)])?;
            *cell = v.to_u64().expect("reduced value");
        }
    }
    Ok(table)
}

/// `e[i][j] = h(i, j) mod q`, or `h(i, j) + h(j, i)` when `symmetrize`.
pub fn matrix_from_h(q: u64, h: &SparsePoly, symmetrize: bool) -> Result<ExponentMatrix> {
    if q < 2 {
        return Err(DichotomyError::InvalidInput(format!("q must be at least 2, got {q}")));
    }
    let table = eval_table(q, h)?;
    let n = q as usize;
    let exps = (0..n)
        .map(|i| (0..n).map(|j| if symmetrize { (table[i][j] + table[j][i]) % q } else { table[i][j] }).collect())
        .collect();
    ExponentMatrix::new(q, exps)
}

/// Classifies `S[q, h]` with `A_{i,j} = ω_q^{h(i,j)}`.
///
/// An asymmetric `h` is replaced by `h(x₁,x₂) + h(x₂,x₁)`. When `h` is in
/// class C (`h(0, x) = h(x, 0) = 0`) the outcome is `Hard` or
/// `TractableInClassC`; otherwise a passing outcome is reported as
/// `ConditionsPassed`, since the conditions are only necessary there.
pub fn classify_s(q: u64, h: &SparsePoly, tol: f64) -> Result<HardnessVerdict> {
    if prime_power(q).is_none() {
        return Err(DichotomyError::InvalidInput(format!("{q} is not a prime power")));
    }
    let table = eval_table(q, h)?;
    let n = q as usize;
    let symmetric = (0..n).all(|i| (0..n).all(|j| table[i][j] == table[j][i]));
    let a = matrix_from_h(q, h, !symmetric)?;
    let in_class_c = (0..n).all(|x| table[0][x] == 0 && table[x][0] == 0);
    if let Some(w) = orthogonality_violation(&a, tol) {
        return Ok(HardnessVerdict::hard(w));
    }
    if let Some(index) = a.is_normalized() {
        return Ok(HardnessVerdict {
            outcome: Outcome::ConditionsPassed,
            witness: Witness::OnlyPairwiseChecked { index },
            decomposition: None,
        });
    }
    let mut verdict = generalized_group_condition(&a, tol)?;
    if verdict.outcome == Outcome::TractableInClassC && !in_class_c {
        verdict.outcome = Outcome::ConditionsPassed;
    }
    Ok(verdict)
}

/// A multigraph with two distinguished vertices that replaces an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    pub graph: Multigraph,
    pub u: usize,
    pub v: usize,
}

fn check_order(order: u64) -> Result<()> {
    if order < 2 {
        return Err(DichotomyError::InvalidInput(format!("M must be at least 2, got {order}")));
    }
    Ok(())
}

/// The gadget `H^{[p]}` on `2p + 4` vertices: `u = 0, v = 1, a = 2, b = 3`,
/// `c_i = 4 + i`, `d_i = 4 + p + i`. Single edges `(u,c_i), (c_i,b),
/// (d_i,a), (d_i,v)`; `M − 1` parallel edges `(c_i,v), (c_i,a), (d_i,b),
/// (d_i,u)`.
pub fn gadget_hp(p: usize, order: u64) -> Result<Gadget> {
    if p == 0 {
        return Err(DichotomyError::InvalidInput("p must be positive".into()));
    }
    check_order(order)?;
    let (u, v, a, b) = (0, 1, 2, 3);
    let mut g = Multigraph::new(2 * p + 4);
    for i in 0..p {
        let (c, d) = (4 + i, 4 + p + i);
        for (x, y) in [(u, c), (c, b), (d, a), (d, v)] {
            g.add_edge(x, y, 1)?;
        }
        for (x, y) in [(c, v), (c, a), (d, b), (d, u)] {
            g.add_edge(x, y, order - 1)?;
        }
    }
    Ok(Gadget { graph: g, u, v })
}

/// The 4-vertex gadget `u = 0, v = 1, a = 2, b = 3` with single edges
/// `(u,a), (b,v)` and `M − 1` parallel edges `(a,v), (u,b)`.
pub fn gadget_star(order: u64) -> Result<Gadget> {
    check_order(order)?;
    let (u, v, a, b) = (0, 1, 2, 3);
    let mut g = Multigraph::new(4);
    g.add_edge(u, a, 1)?;
    g.add_edge(b, v, 1)?;
    g.add_edge(a, v, order - 1)?;
    g.add_edge(u, b, order - 1)?;
    Ok(Gadget { graph: g, u, v })
}

/// Replaces every edge occurrence `(x, y)`, `x < y`, of `g` by a fresh copy
/// of the gadget with `u ↦ x`, `v ↦ y`.
pub fn replace_edges(g: &Multigraph, gadget: &Gadget) -> Multigraph {
    let mut out = Multigraph::new(g.nverts());
    for (x, y, mult) in g.edges() {
        for _ in 0..mult {
            let mut map = vec![usize::MAX; gadget.graph.nverts()];
            map[gadget.u] = x;
            map[gadget.v] = y;
            for slot in map.iter_mut().filter(|s| **s == usize::MAX) {
                *slot = out.add_vertex();
            }
            for (s, t, k) in gadget.graph.edges() {
                out.add_edge(map[s], map[t], k).expect("gadget vertices are distinct");
            }
        }
    }
    out
}

fn power_turns<T: Real>(roots: &[Complex<T>], order: u64, k: u64) -> Complex<T> {
    roots[(k % order) as usize]
}

/// `B^{[p]}_{i,j} = Σ_{a,b} |⟨A_{i,*} ∘ conj A_{j,*}, A_{a,*} ∘ conj A_{b,*}⟩|^{2p}`.
pub fn bp_matrix<T: Real>(a: &ExponentMatrix, p: u32) -> RealMatrix<T> {
    let (m, mm) = (a.m, a.order);
    let roots = roots_table::<T>(mm);
    let e = &a.exponents;
    let mut out = vec![vec![T::zero(); m]; m];
    for i in 0..m {
        for j in 0..m {
            let mut total = T::zero();
            for x in 0..m {
                for y in 0..m {
                    let inner: Complex<T> = (0..m)
                        .map(|k| power_turns(&roots, mm, e[i][k] + 3 * mm - e[j][k] - e[x][k] + e[y][k]))
                        .fold(Complex::zero(), |s, z| s + z);
                    total = total + inner.norm_sqr().powi(p as i32);
                }
            }
            out[i][j] = total;
        }
    }
    out
}

/// `A*_{i,j} = |Σ_a A_{i,a}·conj(A_{j,a})|²`.
pub fn a_star_matrix<T: Real>(a: &ExponentMatrix) -> RealMatrix<T> {
    let roots = roots_table::<T>(a.order);
    let mm = a.order;
    (0..a.m)
        .map(|i| {
            (0..a.m)
                .map(|j| {
                    (0..a.m)
                        .map(|k| power_turns(&roots, mm, a.exponents[i][k] + mm - a.exponents[j][k]))
                        .fold(Complex::<T>::zero(), |s, z| s + z)
                        .norm_sqr()
                })
                .collect()
        })
        .collect()
}

/// Real matrix as a complex one, for use with the partition-function oracle.
pub fn to_complex<T: Real>(b: &[Vec<T>]) -> ComplexMatrix<T> {
    b.iter().map(|r| r.iter().map(|&x| Complex::new(x, T::zero())).collect()).collect()
}

/// `A_{i,j} = Σ_k ω_q^{ijk}`: `q` when `q | ij`, else `0`.
pub fn cor51_matrix<T: Real>(q: u64) -> Result<ComplexMatrix<T>> {
    if q < 2 {
        return Err(DichotomyError::InvalidInput(format!("q must be at least 2, got {q}")));
    }
    let qt = T::from_u64(q).expect("q fits the float type");
    Ok((0..q)
        .map(|i| {
            (0..q)
                .map(|j| if (i * j) % q == 0 { Complex::new(qt, T::zero()) } else { Complex::zero() })
                .collect()
        })
        .collect())
}

/// One triple `(u, v, w_e)` per edge occurrence, with a fresh `w_e` each.
/// Vertices of `g` keep their order and become `1..=|V|`.
pub fn cor51_hypergraph(g: &Multigraph) -> Hypergraph {
    let n = g.nverts();
    let total = g.edge_count() as usize;
    let mut h = Hypergraph::new(3, n + total);
    let mut fresh = n;
    for (u, v, mult) in g.edges() {
        for _ in 0..mult {
            fresh += 1;
            h.add_edge(vec![u + 1, v + 1, fresh]).expect("vertices in range");
        }
    }
    h
}

/// Both orientations `(u, v)` and `(v, u)` of every edge occurrence.
pub fn cor52_digraph(g: &Multigraph) -> Hypergraph {
    let mut h = Hypergraph::new(2, g.nverts());
    for (u, v, mult) in g.edges() {
        for _ in 0..mult {
            h.add_edge(vec![u + 1, v + 1]).expect("vertices in range");
            h.add_edge(vec![v + 1, u + 1]).expect("vertices in range");
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_counts, brute_partition, brute_partition_pinned, DEFAULT_BUDGET};
    use crate::polyring::{h_type_expand, parse_poly};
    use num_complex::Complex64;
    use std::collections::BTreeMap;

    fn em(order: u64, rows: &[&[u64]]) -> ExponentMatrix {
        ExponentMatrix::new(order, rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn h(text: &str, q: u64) -> SparsePoly {
        parse_poly(text, &BigInt::from(q), 2).unwrap()
    }

    const H2: &str = "x1^2*x2";
    const H3: &str = "x1*x2 + x1^2*x2^2";

    fn hadamard() -> ExponentMatrix {
        em(2, &[&[0, 0], &[0, 1]])
    }

    #[test]
    fn matrix_validation_and_json() {
        assert!(matches!(
            ExponentMatrix::new(3, vec![vec![0, 1], vec![2, 0]]),
            Err(DichotomyError::NotSymmetric { i: 0, j: 1 })
        ));
        assert!(ExponentMatrix::new(3, vec![vec![0, 1]]).is_err());
        let a: ExponentMatrix = serde_json::from_str(r#"{"m":2,"M":2,"exponents":[[0,0],[0,1]]}"#).unwrap();
        assert_eq!(a, hadamard());
        let back: ExponentMatrix = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<ExponentMatrix>(r#"{"M":2,"exponents":[[0,1],[0,1]]}"#).is_err());
    }

    #[test]
    fn unitary_examples() {
        assert!(is_discrete_unitary(&hadamard(), DEFAULT_TOL).holds());
        assert!(!is_discrete_unitary(&em(3, &[&[0, 0], &[0, 0]]), DEFAULT_TOL).holds());
        assert!(is_discrete_unitary(&em(5, &[&[0]]), DEFAULT_TOL).holds());
        assert!(matches!(
            is_discrete_unitary(&em(2, &[&[1, 0], &[0, 1]]), DEFAULT_TOL),
            Check::Violated(Witness::NotNormalized { index: 0 })
        ));
    }

    #[test]
    fn rank1_examples() {
        let q = 2.0f64;
        assert!(matches!(
            rank1_violation(&[vec![q, q], vec![q, 0.0]], 1e-9),
            Some(Witness::Rank1 { rows: (0, 1), cols: (0, 1), .. })
        ));
        assert!(rank1_violation(&vec![vec![1.0f64; 3]; 3], 1e-9).is_none());
        let id = vec![vec![1.0f32, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!(rank1_violation(&id, 1e-6).is_none());
    }

    #[test]
    fn orthogonality_examples() {
        let at = |q| matrix_from_h(q, &h(H2, q), true).unwrap();
        assert!(matches!(orthogonality_violation(&at(3), DEFAULT_TOL), Some(Witness::DependentNorOrthogonal { i: 0, j: 1, .. })));
        assert!(matches!(orthogonality_violation(&at(8), DEFAULT_TOL), Some(Witness::DependentNorOrthogonal { i: 0, j: 2, .. })));
        assert!(orthogonality_violation(&hadamard(), DEFAULT_TOL).is_none());
        let h3 = matrix_from_h(3, &h(H3, 3), false).unwrap();
        assert!(orthogonality_violation(&h3, DEFAULT_TOL).is_some());
    }

    #[test]
    fn group_condition_examples() {
        assert!(group_condition(&hadamard(), DEFAULT_TOL).unwrap().holds());
        let h3 = matrix_from_h(8, &h(H3, 8), false).unwrap();
        if is_discrete_unitary(&h3, DEFAULT_TOL).holds() {
            assert!(!group_condition(&h3, DEFAULT_TOL).unwrap().holds());
        } else {
            assert!(group_condition(&h3, DEFAULT_TOL).is_err());
        }
        for m in 1..=8 {
            assert!(group_condition(&ExponentMatrix::fourier(m), DEFAULT_TOL).unwrap().holds(), "m = {m}");
        }
        assert!(group_condition(&em(3, &[&[0, 0], &[0, 0]]), DEFAULT_TOL).is_err());
    }

    fn kron_ones(a: &ExponentMatrix, k: usize) -> ExponentMatrix {
        let m = a.m() * k;
        let exps = (0..m).map(|i| (0..m).map(|j| a.exponent(i % a.m(), j % a.m())).collect()).collect();
        ExponentMatrix::new(a.order(), exps).unwrap()
    }

    #[test]
    fn generalized_group_condition_examples() {
        let f3 = ExponentMatrix::fourier(3);
        let big = kron_ones(&f3, 2);
        let v = generalized_group_condition(&big, DEFAULT_TOL).unwrap();
        assert_eq!(v.outcome, Outcome::TractableInClassC);
        let d = v.decomposition.unwrap();
        assert_eq!(d.ell, 3);
        assert_eq!(d.a_prime, f3);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(big.exponent(i, j), d.a_prime.exponent(d.block_map[i], d.block_map[j]));
            }
        }
        // Z_A agrees with (m/ℓ)^|V| Z_{A'} on a small graph.
        let mut g = Multigraph::new(3);
        g.add_edge(0, 1, 1).unwrap();
        g.add_edge(1, 2, 2).unwrap();
        let za: Complex64 = brute_partition(&big.entries(), &g, DEFAULT_BUDGET).unwrap();
        let zp: Complex64 = brute_partition(&f3.entries(), &g, DEFAULT_BUDGET).unwrap();
        assert!((za - zp * 8.0).norm() < 1e-9);

        let v = generalized_group_condition(&ExponentMatrix::fourier(4), DEFAULT_TOL).unwrap();
        assert_eq!(v.outcome, Outcome::TractableInClassC);
        assert_eq!(v.decomposition.unwrap().ell, 4);

        let ones = em(2, &[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]]);
        let v = generalized_group_condition(&ones, DEFAULT_TOL).unwrap();
        assert_eq!(v.outcome, Outcome::TractableInClassC);
        assert_eq!(v.decomposition.unwrap().ell, 1);

        // rows (0,0,0) and (0,0,1) are neither equal nor orthogonal
        let bad = em(2, &[&[0, 0, 0], &[0, 0, 0], &[0, 0, 1]]);
        assert!(matches!(generalized_group_condition(&bad, DEFAULT_TOL), Err(DichotomyError::Precondition(_))));
        assert!(generalized_group_condition(&em(2, &[&[1, 0], &[0, 0]]), DEFAULT_TOL).is_err());
    }

    #[test]
    fn matrix_from_h_examples() {
        assert_eq!(matrix_from_h(2, &h("x1*x2", 2), false).unwrap(), hadamard());
        assert_eq!(matrix_from_h(4, &h("0", 4), false).unwrap(), em(4, &[&[0; 4], &[0; 4], &[0; 4], &[0; 4]]));
        assert!(matches!(matrix_from_h(3, &h(H2, 3), false), Err(DichotomyError::NotSymmetric { .. })));
        let a = matrix_from_h(3, &h(H3, 3), false).unwrap();
        assert!(!a.rows_dependent(0, 1));
        assert!(a.inner(0, 1).norm() > 1e-6);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_s(3, &h(H2, 3), DEFAULT_TOL).unwrap().outcome, Outcome::Hard);
        let v = classify_s(8, &h(H3, 8), DEFAULT_TOL).unwrap();
        assert_eq!(v.outcome, Outcome::Hard);
        let v = classify_s(2, &h("x1*x2", 2), DEFAULT_TOL).unwrap();
        assert_eq!(v.outcome, Outcome::TractableInClassC);
        assert!(classify_s(6, &h("x1*x2", 6), DEFAULT_TOL).is_err());
        let v = classify_s(3, &h("x1*x2 + 1", 3), DEFAULT_TOL).unwrap();
        assert_eq!(v.outcome, Outcome::ConditionsPassed);
        let json = serde_json::to_value(classify_s(2, &h("x1*x2", 2), DEFAULT_TOL).unwrap()).unwrap();
        assert_eq!(json["outcome"], "TractableInClassC");
        assert_eq!(json["decomposition"]["ell"], 2);
    }

    #[test]
    fn gadget_shapes() {
        let g = gadget_hp(1, 3).unwrap();
        assert_eq!(g.graph.nverts(), 6);
        let mults: Vec<u64> = g.graph.edges().map(|(_, _, k)| k).collect();
        assert_eq!(mults.iter().filter(|&&k| k == 1).count(), 4);
        assert_eq!(mults.iter().filter(|&&k| k == 2).count(), 4);
        assert_eq!(gadget_hp(3, 5).unwrap().graph.nverts(), 10);
        assert!(gadget_hp(2, 2).unwrap().graph.edges().all(|(_, _, k)| k == 1));
        assert!(gadget_hp(0, 2).is_err());

        let s = gadget_star(2).unwrap();
        assert_eq!(s.graph.edge_count(), 4);
        assert!((0..4).all(|v| s.graph.edges().filter(|&(x, y, _)| x == v || y == v).count() == 2));
        assert_eq!(gadget_star(5).unwrap().graph.edge_count(), 2 + 2 * 4);
        assert!(gadget_star(1).is_err());
    }

    fn pinned(a: &ExponentMatrix, gadget: &Gadget, i: usize, j: usize) -> Complex64 {
        let pins: BTreeMap<usize, usize> = [(gadget.u, i), (gadget.v, j)].into();
        brute_partition_pinned(&a.entries(), &gadget.graph, &pins, DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn gadgets_realize_their_matrices() {
        for a in [hadamard(), ExponentMatrix::fourier(3), em(3, &[&[0, 1, 2], &[1, 1, 0], &[2, 0, 2]])] {
            let star = gadget_star(a.order()).unwrap();
            let hp = gadget_hp(1, a.order()).unwrap();
            let astar = a_star_matrix::<f64>(&a);
            let b1 = bp_matrix::<f64>(&a, 1);
            for i in 0..a.m() {
                for j in 0..a.m() {
                    let s = pinned(&a, &star, i, j);
                    assert!((s.re - astar[i][j]).abs() < 1e-9 && s.im.abs() < 1e-9);
                    let b = pinned(&a, &hp, i, j);
                    assert!((b.re - b1[i][j]).abs() < 1e-6 * (1.0 + b1[i][j]) && b.im.abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn bp_of_fourier_is_constant() {
        for m in 2..=5 {
            for p in 1..=2u32 {
                let expected = (m as f64).powi(2 * p as i32 + 1);
                for row in bp_matrix::<f64>(&ExponentMatrix::fourier(m), p) {
                    for x in row {
                        assert!((x - expected).abs() <= 1e-9 * expected);
                    }
                }
            }
        }
    }

    #[test]
    fn cor51_examples() {
        let a = cor51_matrix::<f64>(2).unwrap();
        assert_eq!(a[0][0].re, 2.0);
        assert_eq!(a[1][1].re, 0.0);
        let a4 = cor51_matrix::<f64>(4).unwrap();
        assert_eq!(a4[2][2].re, 4.0);
        assert!(a4[0].iter().all(|z| z.re == 4.0));

        let mut g = Multigraph::new(2);
        g.add_edge(0, 1, 2).unwrap();
        let hg = cor51_hypergraph(&g);
        assert_eq!(hg.nverts(), 4);
        assert_eq!(hg.edges(), &[vec![1, 2, 3], vec![1, 2, 4]]);
        assert_eq!(cor52_digraph(&g).edges().len(), 4);
        assert!(cor52_digraph(&Multigraph::new(3)).edges().is_empty());

        let f = h_type_expand(&parse_poly("x1*x2*x3", &BigInt::from(3), 3).unwrap(), &hg, &BigInt::from(3)).unwrap();
        let z: Complex64 = brute_counts(&f, DEFAULT_BUDGET).unwrap().value();
        let za: Complex64 = brute_partition(&cor51_matrix(3).unwrap(), &g, DEFAULT_BUDGET).unwrap();
        assert!((z - za).norm() < 1e-6);
    }

    #[test]
    fn cor52_matches_symmetrized_matrix() {
        let q = 3;
        let h2 = h(H2, q);
        let a = matrix_from_h(q, &h2, true).unwrap();
        let mut g = Multigraph::new(3);
        g.add_edge(0, 1, 1).unwrap();
        g.add_edge(1, 2, 1).unwrap();
        let f = h_type_expand(&h2, &cor52_digraph(&g), &BigInt::from(q)).unwrap();
        let z: Complex64 = brute_counts(&f, DEFAULT_BUDGET).unwrap().value();
        let za: Complex64 = brute_partition(&a.entries(), &g, DEFAULT_BUDGET).unwrap();
        assert!((z - za).norm() < 1e-9);
    }
}
