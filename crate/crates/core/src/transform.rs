//! Associated-transform inversion.
//!
//! Substituting `λ₁ = p − Σ_{j≥2} λⱼ` turns the volume into the inverse
//! one-sided transform of `H(p) = (2πi)^{1−m} ∫ Ĝ dλ₂…dλ_m`. Since the
//! volume is homogeneous of degree `n` in the right-hand side, `H(p)` must
//! equal `C/p^{n+1}` and the volume is `C/n!`. The integrand is purely
//! rational, so every level may close on whichever side has fewer poles.

use num_traits::{One, Zero};

use crate::direct::check_distinct_factors;
use crate::error::{Error, Result};
use crate::linform::{Abscissae, LinForm, VarId};
use crate::polytope::{is_strict_interior, NormalizedInstance};
use crate::rat::{factorial_rat, pow, Rat};
use crate::residue::{eliminate, ContourConfig, Factor, LevelStats, Node, PoleHistory, SideRule, Term};

#[derive(Debug, Clone)]
pub struct TransformRun {
    /// Abscissae of λ₂…λ_m and of `p`, with the perturbation ledger.
    pub config: ContourConfig,
    pub levels: Vec<LevelStats>,
    /// The constant `C` in `H(p) = C/p^{n+1}`.
    pub h_coefficient: Rat,
    pub result: Rat,
}

/// The form λ₁ is replaced by: `p − λ₂ − … − λ_m`.
fn lambda1_substitute(m: usize) -> LinForm {
    LinForm::from_terms(
        std::iter::once((VarId::P, Rat::one())).chain((1..m).map(|i| (VarId::for_row(i), -Rat::one()))),
    )
}

/// `Ĝ = G(p − Σ_{j≥2} λⱼ, λ₂, …, λ_m)` as a term with zero exponent.
pub fn substituted_term(norm: &NormalizedInstance) -> Result<Term> {
    let m = norm.m();
    let l1 = VarId::for_row(0);
    let sub = lambda1_substitute(m);
    let mut denom = vec![Factor::simple(sub.clone())];
    denom.extend((1..m).map(|i| Factor::simple(LinForm::var(VarId::for_row(i)))));
    for j in 0..norm.n() {
        let col = LinForm::from_terms(norm.column(j).into_iter().enumerate().map(|(i, a)| (VarId::for_row(i), a)));
        denom.push(Factor::simple(col.substitute(l1, &sub)));
    }
    if m > 1 {
        check_distinct_factors(&denom)?;
    }
    Ok(Term::new(Rat::one(), LinForm::zero(), denom))
}

pub fn volume_transform(norm: &NormalizedInstance) -> Result<Rat> {
    Ok(run_transform(norm, None)?.result)
}

/// Runs the associated-transform method. With explicit `c` (must satisfy
/// `c > 0`, `A'c > 0`) the λ-abscissae are `c₂…c_m` and `Re p = Σ cⱼ`.
pub fn run_transform(norm: &NormalizedInstance, abscissae: Option<&[Rat]>) -> Result<TransformRun> {
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
    let root = substituted_term(norm)?;

    let mut at: Abscissae = (1..m).map(|i| (VarId::for_row(i), c[i].clone())).collect();
    at.insert(VarId::P, c.iter().sum());
    let domain = root.denom.iter().map(|f| f.form.clone()).collect();
    let mut config = ContourConfig::new(at, domain)?;
    let mut history = PoleHistory::default();
    let mut levels = Vec::new();

    let vars: Vec<VarId> = (1..m).map(VarId::for_row).collect();
    let survivors = eliminate(
        vec![Node { branch: 0, term: root }],
        &vars,
        &mut config,
        SideRule::FewerPoles,
        &mut history,
        &mut levels,
    )?;

    let mut h = Rat::zero();
    for node in &survivors {
        h += h_contribution(&node.term, n)?;
    }
    let result = &h / factorial_rat(n);
    Ok(TransformRun { config, levels, h_coefficient: h, result })
}

/// `K` for a surviving term `K/p^{n+1}` (leading coefficients folded in).
fn h_contribution(term: &Term, n: usize) -> Result<Rat> {
    if !term.exponent.is_zero() {
        return Err(Error::MalformedH(format!("term {term} carries an exponential")));
    }
    if term.total_multiplicity() as usize != n + 1 {
        return Err(Error::MalformedH(format!(
            "term {term} has p-multiplicity {}, expected {}",
            term.total_multiplicity(),
            n + 1
        )));
    }
    let mut k = term.coeff.clone();
    for f in &term.denom {
        if !f.form.is_multiple_of(VarId::P) {
            return Err(Error::MalformedH(format!("factor ({}) of {term} is not a multiple of p", f.form)));
        }
        k /= pow(&f.form.coeff(VarId::P), f.mult as usize);
    }
    Ok(k)
}
