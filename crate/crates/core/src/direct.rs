//! Direct inversion: integrate `e^{⟨λ, e_m⟩} G(λ)` over λ₁, …, λ_m by
//! residues. Each level multiplies the number of terms by at most `n + 1`,
//! and the last level has a closed form.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linform::{Abscissae, LinForm, VarId};
use crate::polytope::{is_strict_interior, NormalizedInstance};
use crate::rat::Rat;
use crate::residue::{
    eliminate, final_level_value, ContourConfig, Factor, LevelStats, Node, PoleHistory, SideRule, Term,
};

/// Trace of one direct-method run.
#[derive(Debug, Clone)]
pub struct DirectRun {
    /// Abscissae in force at the end, with the perturbation ledger.
    pub config: ContourConfig,
    pub levels: Vec<LevelStats>,
    /// Contribution of each first-level node (pole of λ₁) to the volume.
    pub partials: Vec<Rat>,
    pub leaves: usize,
    pub result: Rat,
}

impl DirectRun {
    /// Level `k` produced at most `(n+1)^k` nodes, for every `k`.
    pub fn node_bound_holds(&self, n: usize) -> bool {
        let base = BigUint::from(n + 1);
        self.levels
            .iter()
            .enumerate()
            .all(|(k, st)| BigUint::from(st.terms_out) <= num_traits::pow(base.clone(), k + 1))
    }
}

/// `e^{λ₁+…+λ_m} / (∏ λᵢ ∏ (A'λ)ⱼ)`.
pub fn initial_term(norm: &NormalizedInstance) -> Result<Term> {
    let m = norm.m();
    let mut denom: Vec<Factor> = (0..m).map(|i| Factor::simple(LinForm::var(VarId::for_row(i)))).collect();
    for j in 0..norm.n() {
        let col = norm.column(j);
        denom.push(Factor::simple(LinForm::from_terms(
            col.into_iter().enumerate().map(|(i, a)| (VarId::for_row(i), a)),
        )));
    }
    if m > 1 {
        check_distinct_factors(&denom)?;
    }
    let exponent = LinForm::from_terms((0..m).map(|i| (VarId::for_row(i), Rat::one())));
    Ok(Term::new(Rat::one(), exponent, denom))
}

pub(crate) fn check_distinct_factors(denom: &[Factor]) -> Result<()> {
    for (i, f) in denom.iter().enumerate() {
        if f.form.is_zero() {
            return Err(Error::Degenerate { detail: format!("factor {i} of the transform is identically zero") });
        }
        if let Some(g) = denom[..i].iter().find(|g| f.form.parallel(&g.form).is_some()) {
            return Err(Error::Degenerate {
                detail: format!(
                    "proportional factors ({}) and ({}) in the Laplace transform (a constraint row parallel to a \
                     coordinate axis or to another row)",
                    g.form, f.form
                ),
            });
        }
    }
    Ok(())
}

fn lambda_abscissae(c: &[Rat]) -> Abscissae {
    c.iter().enumerate().map(|(i, v)| (VarId::for_row(i), v.clone())).collect()
}

/// Volume of `{x ≥ 0, Ãx ≤ e_m}` by the direct method.
pub fn volume_direct(norm: &NormalizedInstance) -> Result<Rat> {
    Ok(run_direct(norm, None)?.result)
}

/// Runs the direct method with explicit abscissae `c` (must satisfy
/// `c > 0`, `A'c > 0`), or with the LP interior point when `None`.
pub fn run_direct(norm: &NormalizedInstance, abscissae: Option<&[Rat]>) -> Result<DirectRun> {
    let c = match abscissae {
        Some(c) => {
            if !is_strict_interior(norm.a(), c) {
                return Err(Error::InvalidAbscissae("need c > 0 and A'c > 0".into()));
            }
            c.to_vec()
        }
        None => norm.interior().to_vec(),
    };
    let m = norm.m();
    let n = norm.n();
    let root = initial_term(norm)?;
    let domain = root.denom.iter().map(|f| f.form.clone()).collect();
    let mut config = ContourConfig::new(lambda_abscissae(&c), domain)?;
    let mut history = PoleHistory::default();
    let mut levels = Vec::new();

    let vars: Vec<VarId> = (0..m - 1).map(VarId::for_row).collect();
    let leaves = eliminate(
        vec![Node { branch: 0, term: root }],
        &vars,
        &mut config,
        SideRule::ByExponentSign,
        &mut history,
        &mut levels,
    )?;

    let last = VarId::for_row(m - 1);
    let branches = if m == 1 { 1 } else { levels[0].terms_out };
    let mut partials = vec![Rat::zero(); branches];
    for leaf in &leaves {
        if leaf.term.total_multiplicity() as usize != n + 1 {
            return Err(Error::Internal(format!(
                "leaf {} has {} denominator factors, expected {}",
                leaf.term,
                leaf.term.total_multiplicity(),
                n + 1
            )));
        }
        partials[leaf.branch] += final_level_value(&leaf.term, last)?;
    }
    let result = partials.iter().sum();
    Ok(DirectRun { config, levels, partials, leaves: leaves.len(), result })
}
