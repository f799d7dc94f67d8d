//! Polytope instances `{x ∈ ℝⁿ₊ | Ax ≤ b}` and their admissibility checks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{self, Cmp, Constraint, LpOutcome, Rel, Row};
use crate::rat::Rat;

/// Dense row-major matrix.
pub type Matrix = Vec<Vec<Rat>>;

/// Raw instance: `m` nontrivial constraint rows over `n` non-negative
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeInstance {
    a: Matrix,
    b: Vec<Rat>,
}

impl PolytopeInstance {
    pub fn new(a: Matrix, b: Vec<Rat>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidInstance("A has no rows".into()));
        }
        let n = a[0].len();
        if n == 0 {
            return Err(Error::InvalidInstance("A has no columns".into()));
        }
        if let Some(i) = a.iter().position(|r| r.len() != n) {
            return Err(Error::InvalidInstance(format!(
                "row {i} of A has {} entries, expected {n}",
                a[i].len()
            )));
        }
        if b.len() != a.len() {
            return Err(Error::InvalidInstance(format!("A has {} rows but b has {} entries", a.len(), b.len())));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[Rat] {
        &self.b
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn n(&self) -> usize {
        self.a[0].len()
    }

    /// Same constraint matrix, right-hand side multiplied by `t`.
    pub fn scaled_rhs(&self, t: &Rat) -> Self {
        Self { a: self.a.clone(), b: self.b.iter().map(|x| x * t).collect() }
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[Rat]) -> bool {
        x.iter().all(|v| !v.is_negative())
            && self.a.iter().zip(&self.b).all(|(row, bi)| dot(row, x) <= *bi)
    }
}

/// What [`scale_rows`] did to reach the all-ones right-hand side.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cleanup {
    pub dropped_zero_rows: Vec<usize>,
    pub merged_duplicate_rows: Vec<usize>,
    /// For every kept row, its index in the input.
    pub kept_rows: Vec<usize>,
}

/// Divides each row by its right-hand side, drops vacuous zero rows and
/// merges identical rows. The result describes the same set with `b = e_m`.
pub fn scale_rows(inst: &PolytopeInstance) -> Result<(Matrix, Cleanup)> {
    let mut cleanup = Cleanup::default();
    let mut out: Matrix = Vec::new();
    for (i, (row, bi)) in inst.a.iter().zip(&inst.b).enumerate() {
        if !bi.is_positive() {
            return Err(Error::NonpositiveB { row: i, value: bi.clone() });
        }
        if row.iter().all(Zero::is_zero) {
            cleanup.dropped_zero_rows.push(i);
            continue;
        }
        let scaled: Vec<Rat> = row.iter().map(|x| x / bi).collect();
        if out.contains(&scaled) {
            cleanup.merged_duplicate_rows.push(i);
            continue;
        }
        out.push(scaled);
        cleanup.kept_rows.push(i);
    }
    if out.is_empty() {
        return Err(Error::EmptyAfterCleanup);
    }
    Ok((out, cleanup))
}

fn dot(a: &[Rat], x: &[Rat]) -> Rat {
    a.iter().zip(x).map(|(p, q)| p * q).sum()
}

/// `A'u` for an `m×n` matrix and `u ∈ ℚ^m`.
pub fn transpose_apply(a: &Matrix, u: &[Rat]) -> Vec<Rat> {
    let n = a.first().map_or(0, Vec::len);
    (0..n).map(|j| a.iter().zip(u).map(|(row, ui)| &row[j] * ui).sum()).collect()
}

/// A `u ≥ 0` with `A'u ≥ e_n`, if one exists. Such a `u` certifies that
/// `{x ≥ 0, Ax ≤ y}` is bounded, and bounds it: `Σx ≤ u'y`.
pub fn compactness_witness(a: &Matrix) -> Option<Vec<Rat>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let constraints: Vec<Constraint> = (0..n)
        .map(|j| Constraint::new(a.iter().map(|row| row[j].clone()).collect(), Cmp::Ge, Rat::one()))
        .collect();
    let f = lp::lp_feasible(m, &constraints);
    f.feasible.then_some(f.witness)
}

pub fn check_compact(a: &Matrix) -> bool {
    compactness_witness(a).is_some()
}

/// Finds `c > 0` with `A'c > 0` by maximising the margin `t` subject to
/// `c ≥ t`, `A'c ≥ t`, `Σc ≤ 1`. The returned vector is rescaled to
/// coprime integers.
pub fn find_strict_interior(a: &Matrix) -> Result<Vec<Rat>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    // variables: c_1..c_m, t
    let width = m + 1;
    let mut rows = Vec::with_capacity(m + n + 1);
    for i in 0..m {
        let mut r = vec![Rat::zero(); width];
        r[i] = Rat::one();
        r[m] = -Rat::one();
        rows.push(Row { coeffs: r, rel: Rel::Ge, rhs: Rat::zero() });
    }
    for j in 0..n {
        let mut r: Vec<Rat> = a.iter().map(|row| row[j].clone()).collect();
        r.push(-Rat::one());
        rows.push(Row { coeffs: r, rel: Rel::Ge, rhs: Rat::zero() });
    }
    let mut total = vec![Rat::one(); width];
    total[m] = Rat::zero();
    rows.push(Row { coeffs: total, rel: Rel::Le, rhs: Rat::one() });

    let mut objective = vec![Rat::zero(); width];
    objective[m] = Rat::one();
    let c = match lp::maximize(width, &rows, &objective) {
        LpOutcome::Optimal { x, value } if value.is_positive() => integer_direction(&x[..m]),
        LpOutcome::Optimal { .. } => return Err(Error::NotPointed),
        other => return Err(Error::Internal(format!("margin LP ended with {other:?}"))),
    };
    if !is_strict_interior(a, &c) {
        return Err(Error::Internal("strict interior witness failed re-verification".into()));
    }
    Ok(c)
}

/// `c > 0` and `A'c > 0`, checked exactly.
pub fn is_strict_interior(a: &Matrix, c: &[Rat]) -> bool {
    c.len() == a.len()
        && c.iter().all(Signed::is_positive)
        && transpose_apply(a, c).iter().all(Signed::is_positive)
}

/// Positive multiple of `v` with coprime integer entries.
fn integer_direction(v: &[Rat]) -> Vec<Rat> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter()
        .map(|x| Rat::from_integer(if g.is_zero() { x } else { x / &g }))
        .collect()
}

/// An instance scaled to `b = e_m` that passed both admissibility checks.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedInstance {
    a: Matrix,
    cleanup: Cleanup,
    interior: Vec<Rat>,
    compact_witness: Vec<Rat>,
}

impl NormalizedInstance {
    /// Validates a matrix whose implied right-hand side is `e_m`.
    pub fn from_matrix(a: Matrix) -> Result<Self> {
        let ones = vec![Rat::one(); a.len()];
        normalize(&PolytopeInstance::new(a, ones)?)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn n(&self) -> usize {
        self.a[0].len()
    }

    pub fn cleanup(&self) -> &Cleanup {
        &self.cleanup
    }

    /// Strict interior point `c > 0, A'c > 0` from the margin LP.
    pub fn interior(&self) -> &[Rat] {
        &self.interior
    }

    pub fn compact_witness(&self) -> &[Rat] {
        &self.compact_witness
    }

    /// Column `j` of the matrix, i.e. the coefficients of `(A'λ)_j`.
    pub fn column(&self, j: usize) -> Vec<Rat> {
        self.a.iter().map(|row| row[j].clone()).collect()
    }
}

/// Scales `b` to the all-ones vector and checks compactness and
/// pointedness.
pub fn normalize(inst: &PolytopeInstance) -> Result<NormalizedInstance> {
    let (a, cleanup) = scale_rows(inst)?;
    let compact_witness = compactness_witness(&a).ok_or(Error::NotCompact)?;
    let interior = find_strict_interior(&a)?;
    Ok(NormalizedInstance { a, cleanup, interior, compact_witness })
}
