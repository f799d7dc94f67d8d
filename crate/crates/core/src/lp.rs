//! Small exact-rational simplex for the feasibility systems the engine
//! needs (compactness certificate, strict interior point).
//!
//! Dense tableau, two phases, Bland's least-index rule for both the
//! entering and the leaving variable, so runs are deterministic and cannot
//! cycle. All variables are non-negative.

use num_traits::{One, Signed, Zero};

use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    /// Strict `<`, decided through a bounded margin variable.
    Lt,
    /// Strict `>`, decided through a bounded margin variable.
    Gt,
}

/// `coeffs · u  cmp  rhs`
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub cmp: Cmp,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rat>, cmp: Cmp, rhs: Rat) -> Self {
        Self { coeffs, cmp, rhs }
    }

    pub fn holds(&self, u: &[Rat]) -> bool {
        let lhs: Rat = self.coeffs.iter().zip(u).map(|(a, x)| a * x).sum();
        match self.cmp {
            Cmp::Le => lhs <= self.rhs,
            Cmp::Ge => lhs >= self.rhs,
            Cmp::Lt => lhs < self.rhs,
            Cmp::Gt => lhs > self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// A point satisfying every constraint when `feasible`, empty otherwise.
    pub witness: Vec<Rat>,
}

/// Decides `{u ∈ ℚ^k, u ≥ 0, constraints}`.
///
/// Strict rows are handled by maximising a margin `t ≤ 1` subtracted from
/// (or added to) every strict row; the system is strictly feasible iff the
/// optimal margin is positive.
pub fn lp_feasible(num_vars: usize, constraints: &[Constraint]) -> Feasibility {
    assert!(num_vars >= 1, "lp_feasible needs at least one variable");
    let strict = constraints.iter().any(|c| matches!(c.cmp, Cmp::Lt | Cmp::Gt));
    let width = if strict { num_vars + 1 } else { num_vars };

    let mut rows = Vec::with_capacity(constraints.len() + 1);
    for c in constraints {
        assert_eq!(c.coeffs.len(), num_vars, "constraint width mismatch");
        let mut coeffs = c.coeffs.clone();
        let rel = match c.cmp {
            Cmp::Le => Rel::Le,
            Cmp::Ge => Rel::Ge,
            Cmp::Lt => {
                coeffs.push(Rat::one());
                Rel::Le
            }
            Cmp::Gt => {
                coeffs.push(-Rat::one());
                Rel::Ge
            }
        };
        coeffs.resize(width, Rat::zero());
        rows.push(Row { coeffs, rel, rhs: c.rhs.clone() });
    }

    let outcome = if strict {
        let mut cap = vec![Rat::zero(); width];
        cap[num_vars] = Rat::one();
        rows.push(Row { coeffs: cap.clone(), rel: Rel::Le, rhs: Rat::one() });
        maximize(width, &rows, &cap)
    } else {
        maximize(width, &rows, &vec![Rat::zero(); width])
    };

    match outcome {
        LpOutcome::Optimal { x, value } if !strict || value.is_positive() => {
            let witness = x[..num_vars].to_vec();
            debug_assert!(constraints.iter().all(|c| c.holds(&witness)));
            Feasibility { feasible: true, witness }
        }
        _ => Feasibility { feasible: false, witness: Vec::new() },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rel {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub coeffs: Vec<Rat>,
    pub rel: Rel,
    pub rhs: Rat,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<Rat>, value: Rat },
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    /// Objective rows kept in sync through every pivot. Entry `j` is the
    /// reduced cost of column `j`; the last entry is minus the objective.
    objectives: Vec<Vec<Rat>>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rat>| {
            let f = row[c].clone();
            if !f.is_zero() {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        for obj in self.objectives.iter_mut() {
            eliminate(obj);
        }
        self.basis[r] = c;
    }

    /// Minimises objective `k` over columns accepted by `allowed`.
    /// Returns false when unbounded.
    fn run(&mut self, k: usize, allowed: impl Fn(usize) -> bool) -> bool {
        loop {
            let entering = (0..self.width).find(|&j| allowed(j) && self.objectives[k][j].is_negative());
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Maximises `objective · x` over `{x ≥ 0, rows}`.
pub(crate) fn maximize(num_vars: usize, rows: &[Row], objective: &[Rat]) -> LpOutcome {
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.rel != Rel::Eq).count();

    // flip rows so every right-hand side is non-negative
    let rows: Vec<Row> = rows
        .iter()
        .map(|r| {
            if r.rhs.is_negative() {
                Row {
                    coeffs: r.coeffs.iter().map(|a| -a).collect(),
                    rel: match r.rel {
                        Rel::Le => Rel::Ge,
                        Rel::Ge => Rel::Le,
                        Rel::Eq => Rel::Eq,
                    },
                    rhs: -&r.rhs,
                }
            } else {
                r.clone()
            }
        })
        .collect();
    let n_art = rows.iter().filter(|r| r.rel != Rel::Le).count();
    let width = num_vars + n_slack + n_art;
    let art_start = num_vars + n_slack;

    let mut table = vec![vec![Rat::zero(); width + 1]; m];
    let mut basis = vec![0; m];
    let (mut s, mut a) = (num_vars, art_start);
    for (i, r) in rows.iter().enumerate() {
        table[i][..num_vars].clone_from_slice(&r.coeffs);
        table[i][width] = r.rhs.clone();
        match r.rel {
            Rel::Le => {
                table[i][s] = Rat::one();
                basis[i] = s;
                s += 1;
            }
            Rel::Ge => {
                table[i][s] = -Rat::one();
                s += 1;
                table[i][a] = Rat::one();
                basis[i] = a;
                a += 1;
            }
            Rel::Eq => {
                table[i][a] = Rat::one();
                basis[i] = a;
                a += 1;
            }
        }
    }

    // phase 1 cost: sum of artificials; phase 2 cost: -objective
    let mut phase1 = vec![Rat::zero(); width + 1];
    for j in art_start..width {
        phase1[j] = Rat::one();
    }
    let mut phase2 = vec![Rat::zero(); width + 1];
    for (j, c) in objective.iter().enumerate() {
        phase2[j] = -c;
    }
    for (i, &b) in basis.iter().enumerate() {
        if b >= art_start {
            for (x, y) in phase1.iter_mut().zip(&table[i]) {
                *x -= y;
            }
        }
    }

    let mut t = Tableau { rows: table, basis, objectives: vec![phase1, phase2], width };
    t.run(0, |_| true);
    if !t.objectives[0][width].is_zero() {
        return LpOutcome::Infeasible;
    }

    // drive zero-level artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= art_start {
            match (0..art_start).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    if !t.run(1, |j| j < art_start) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rat::zero(); num_vars];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < num_vars {
            x[b] = t.rhs(i).clone();
        }
    }
    let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { x, value }
}
