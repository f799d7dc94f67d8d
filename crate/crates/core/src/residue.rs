//! Residue calculus on rational-exponential terms.
//!
//! A [`Term`] is `coeff · e^{L} / ∏ fᵢ^{kᵢ}` where `L` and every `fᵢ` are
//! homogeneous linear forms and `z` is fixed to 1. Integrating one variable
//! along its Bromwich line closes the contour on one side and replaces each
//! term by the (signed) residues at the poles on that side. The pole
//! positions are linear forms in the remaining variables; which side a pole
//! lies on is decided by evaluating its root at the current abscissae.

use std::collections::HashSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linform::{Abscissae, LinForm, VarId};
use crate::rat::{factorial_rat, pow, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub form: LinForm,
    pub mult: u32,
}

impl Factor {
    pub fn simple(form: LinForm) -> Self {
        Self { form, mult: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rat,
    pub exponent: LinForm,
    pub denom: Vec<Factor>,
}

impl Term {
    pub fn new(coeff: Rat, exponent: LinForm, denom: Vec<Factor>) -> Self {
        debug_assert!(denom.iter().all(|f| !f.form.is_zero() && f.mult > 0));
        Self { coeff, exponent, denom }
    }

    /// Sum of multiplicities of the factors that mention `var`.
    pub fn degree_in(&self, var: VarId) -> u32 {
        self.denom.iter().filter(|f| f.form.contains(var)).map(|f| f.mult).sum()
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.denom.iter().map(|f| f.mult).sum()
    }

    pub fn mentions(&self, var: VarId) -> bool {
        self.exponent.contains(var) || self.denom.iter().any(|f| f.form.contains(var))
    }

    /// Exact value of the rational part `coeff / ∏ fᵢ^{kᵢ}` at a point;
    /// `None` if a factor vanishes there. The exponential is left out.
    pub fn rational_value_at(&self, point: &Abscissae) -> Result<Option<Rat>> {
        let mut den = Rat::one();
        for f in &self.denom {
            let v = f.form.eval(point)?;
            if v.is_zero() {
                return Ok(None);
            }
            den *= pow(&v, f.mult as usize);
        }
        Ok(Some(&self.coeff / den))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        if !self.exponent.is_zero() {
            write!(f, "·e^({})", self.exponent)?;
        }
        if !self.denom.is_empty() {
            write!(f, " / ")?;
            for d in &self.denom {
                write!(f, "({})", d.form)?;
                if d.mult > 1 {
                    write!(f, "^{}", d.mult)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    OnPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideRule {
    /// Close towards the side where the exponential decays; fall back to
    /// `FewerPoles` when the exponent does not involve the variable.
    ByExponentSign,
    /// Close on the side with fewer poles (ties go left). Only valid for
    /// slices that decay at least like `1/|λ|²`.
    FewerPoles,
}

/// A pole of a term seen as a function of one variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleSite {
    /// Value of the variable at the pole.
    pub root: LinForm,
    /// Coefficient of the variable in the (first) vanishing factor.
    pub leading: Rat,
    pub side: Side,
    /// Sum of multiplicities of the factors vanishing here.
    pub order: u32,
}

/// One on-line shift of an abscissa.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub var: VarId,
    pub epsilon: Rat,
    /// Smallest distance from the new path to a pole of this level.
    pub delta: Rat,
    pub from: Rat,
    pub to: Rat,
}

/// Bromwich abscissae plus the strict domain they must stay in.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourConfig {
    abscissae: Abscissae,
    /// Forms that must stay strictly positive at the abscissae (the
    /// half-space description of the region where the transform converges).
    domain: Vec<LinForm>,
    ledger: Vec<LedgerEntry>,
}

impl ContourConfig {
    pub fn new(abscissae: Abscissae, domain: Vec<LinForm>) -> Result<Self> {
        let config = Self { abscissae, domain, ledger: Vec::new() };
        for f in &config.domain {
            if !f.eval(&config.abscissae)?.is_positive() {
                return Err(Error::InvalidAbscissae(format!("{f} is not positive at the abscissae")));
            }
        }
        Ok(config)
    }

    pub fn abscissae(&self) -> &Abscissae {
        &self.abscissae
    }

    pub fn abscissa(&self, v: VarId) -> Result<&Rat> {
        self.abscissae.get(&v).ok_or(Error::MissingAbscissa(v))
    }

    pub fn domain(&self) -> &[LinForm] {
        &self.domain
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    /// `abscissa(var) − root(abscissae)`: positive means the pole is left
    /// of the path.
    pub fn gap(&self, root: &LinForm, var: VarId) -> Result<Rat> {
        Ok(self.abscissa(var)? - root.eval(&self.abscissae)?)
    }

    pub fn classify(&self, root: &LinForm, var: VarId) -> Result<Side> {
        let g = self.gap(root, var)?;
        Ok(if g.is_positive() {
            Side::Left
        } else if g.is_negative() {
            Side::Right
        } else {
            Side::OnPath
        })
    }

    pub fn in_domain(&self) -> Result<bool> {
        for f in &self.domain {
            if !f.eval(&self.abscissae)?.is_positive() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordedPole {
    pub var: VarId,
    pub root: LinForm,
    pub side: Side,
}

/// Every pole classified so far, all levels, both sides. Perturbations of
/// later abscissae must not move any of them across its path.
#[derive(Debug, Clone, Default)]
pub struct PoleHistory {
    poles: Vec<RecordedPole>,
    seen: HashSet<(VarId, LinForm)>,
}

impl PoleHistory {
    pub fn record(&mut self, var: VarId, root: &LinForm, side: Side) {
        if self.seen.insert((var, root.clone())) {
            self.poles.push(RecordedPole { var, root: root.clone(), side });
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &RecordedPole> {
        self.poles.iter()
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// Re-classifies every recorded pole against `config`.
    pub fn sides_unchanged(&self, config: &ContourConfig) -> Result<bool> {
        for p in &self.poles {
            if config.classify(&p.root, p.var)? != p.side {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Distinct poles of `term` in `var`, in order of first appearance.
pub fn poles_of(term: &Term, var: VarId, config: &ContourConfig) -> Result<Vec<PoleSite>> {
    let mut sites: Vec<PoleSite> = Vec::new();
    for f in term.denom.iter().filter(|f| f.form.contains(var)) {
        let (leading, root) = f.form.solve_for(var)?;
        match sites.iter_mut().find(|s| s.root == root) {
            Some(site) => site.order += f.mult,
            None => {
                let side = config.classify(&root, var)?;
                sites.push(PoleSite { root, leading, side, order: f.mult });
            }
        }
    }
    Ok(sites)
}

fn coincident_factors(term: &Term, var: VarId, root: &LinForm) -> Vec<String> {
    term.denom
        .iter()
        .filter(|f| f.form.solve_for(var).map(|(_, r)| r == *root).unwrap_or(false))
        .map(|f| if f.mult > 1 { format!("({})^{}", f.form, f.mult) } else { format!("({})", f.form) })
        .collect()
}

/// Residue of `term` at a simple pole in `var`.
pub fn residue_simple(term: &Term, var: VarId, pole: &PoleSite) -> Result<Term> {
    if pole.order > 1 {
        return Err(Error::Degenerate {
            detail: format!(
                "pole {var} = {} has order {}; coincident factors {}",
                pole.root,
                pole.order,
                coincident_factors(term, var, &pole.root).join(" ")
            ),
        });
    }
    let mut vanished: Option<Rat> = None;
    let mut denom = Vec::with_capacity(term.denom.len().saturating_sub(1));
    for f in &term.denom {
        if f.form.contains(var) {
            let (lead, root) = f.form.solve_for(var)?;
            if root == pole.root {
                vanished = Some(lead);
                continue;
            }
        }
        let form = f.form.substitute(var, &pole.root);
        if form.is_zero() {
            return Err(Error::Internal(format!("factor {} vanished identically at {var} = {}", f.form, pole.root)));
        }
        denom.push(Factor { form, mult: f.mult });
    }
    let lead = vanished
        .ok_or_else(|| Error::Internal(format!("no factor of {term} vanishes at {var} = {}", pole.root)))?;
    Ok(Term::new(&term.coeff / lead, term.exponent.substitute(var, &pole.root), denom))
}

/// Which side a term closes on, and the resulting terms.
pub(crate) fn integrate_term(
    term: &Term,
    var: VarId,
    poles: &[PoleSite],
    rule: SideRule,
) -> Result<(Side, Vec<Term>)> {
    if poles.iter().any(|p| p.side == Side::OnPath) {
        return Err(Error::Internal(format!("pole on the path of {var} was not repaired")));
    }
    let degree = term.degree_in(var);
    if degree == 0 {
        return Err(Error::Internal(format!("term {term} does not depend on {var}")));
    }
    let alpha = term.exponent.coeff(var);
    let side = match rule {
        SideRule::ByExponentSign if alpha.is_positive() => Side::Left,
        SideRule::ByExponentSign if alpha.is_negative() => Side::Right,
        _ => {
            if !alpha.is_zero() {
                return Err(Error::Internal(format!("term {term} has an exponential in {var}")));
            }
            if degree < 2 {
                return Err(Error::DivergentSlice { var, degree });
            }
            let left = poles.iter().filter(|p| p.side == Side::Left).count();
            let right = poles.len() - left;
            if right < left {
                Side::Right
            } else {
                Side::Left
            }
        }
    };
    let mut out = Vec::new();
    for pole in poles.iter().filter(|p| p.side == side) {
        let mut r = residue_simple(term, var, pole)?;
        if side == Side::Right {
            // clockwise contour
            r.coeff = -r.coeff;
        }
        out.push(r);
    }
    Ok((side, out))
}

/// Integrates `var` out of every term. Poles on the path must have been
/// repaired beforehand (see [`perturb_abscissa`]).
pub fn integrate_var(terms: &[Term], var: VarId, config: &ContourConfig, rule: SideRule) -> Result<Vec<Term>> {
    let mut out = Vec::new();
    for t in terms {
        let poles = poles_of(t, var, config)?;
        out.extend(integrate_term(t, var, &poles, rule)?.1);
    }
    Ok(out)
}

/// Value at `z = 1` of the last one-dimensional inversion, for a term whose
/// factors are all multiples of `var`: `K·e^{αλ}/λ^q` inverts to
/// `K·α^{q−1}/(q−1)!` when `α > 0` and to 0 otherwise (the path lies right
/// of the only pole, `λ = 0`).
pub fn final_level_value(term: &Term, var: VarId) -> Result<Rat> {
    let mut k = term.coeff.clone();
    let mut q = 0u32;
    for f in &term.denom {
        if !f.form.is_multiple_of(var) {
            return Err(Error::Internal(format!("final-level factor {} is not a multiple of {var}", f.form)));
        }
        k /= pow(&f.form.coeff(var), f.mult as usize);
        q += f.mult;
    }
    if term.exponent.vars().any(|v| v != var) {
        return Err(Error::Internal(format!("final-level exponent {} mentions other variables", term.exponent)));
    }
    let alpha = term.exponent.coeff(var);
    if q == 0 {
        return Err(Error::Internal(format!("final-level term {term} has no pole")));
    }
    if q == 1 && alpha.is_zero() {
        return Err(Error::DivergentSlice { var, degree: 1 });
    }
    if !alpha.is_positive() {
        return Ok(Rat::zero());
    }
    let e = (q - 1) as usize;
    Ok(k * pow(&alpha, e) / factorial_rat(e))
}

/// Moves the abscissa of `var` right by some `ε > 0` so that no pole of
/// the current level sits on the path, the abscissae stay in the domain,
/// and no previously classified pole changes side. Returns the config
/// unchanged if nothing is on the path.
pub fn perturb_abscissa(
    config: &ContourConfig,
    var: VarId,
    level_poles: &[PoleSite],
    history: &PoleHistory,
) -> Result<ContourConfig> {
    if !level_poles.iter().any(|p| p.side == Side::OnPath) {
        return Ok(config.clone());
    }
    let at = &config.abscissae;
    // strict upper bounds on ε
    let mut bounds: Vec<Rat> = Vec::new();
    for f in &config.domain {
        let slope = f.coeff(var);
        if slope.is_negative() {
            bounds.push(f.eval(at)? / -slope);
        }
    }
    for p in level_poles {
        if p.root.contains(var) {
            return Err(Error::Internal(format!("pole root {} mentions {var}", p.root)));
        }
        let g = config.gap(&p.root, var)?;
        if g.is_negative() {
            bounds.push(-g);
        }
    }
    for p in history.iter() {
        let beta = p.root.coeff(var);
        if beta.is_zero() {
            continue;
        }
        let g = config.gap(&p.root, p.var)?;
        if g.is_zero() {
            return Err(Error::Internal(format!("recorded pole {} = {} lies on its path", p.var, p.root)));
        }
        // new gap is g − β·ε; it only moves towards zero when β and g agree in sign
        if g.is_positive() == beta.is_positive() {
            bounds.push(g / beta);
        }
    }
    let two = Rat::from_integer(2.into());
    let epsilon = bounds.into_iter().min().map_or_else(Rat::one, |b| b / two);

    let from = config.abscissa(var)?.clone();
    let to = &from + &epsilon;
    let mut next = config.clone();
    next.abscissae.insert(var, to.clone());

    // re-validate every condition by substitution
    if !next.in_domain()? {
        return Err(Error::Internal(format!("perturbation of {var} left the domain")));
    }
    let mut delta: Option<Rat> = None;
    for p in level_poles {
        let g = next.gap(&p.root, var)?.abs();
        if g.is_zero() {
            return Err(Error::Internal(format!("perturbation of {var} left a pole on the path")));
        }
        delta = Some(delta.map_or(g.clone(), |d: Rat| d.min(g)));
    }
    if !history.sides_unchanged(&next)? {
        return Err(Error::Internal(format!("perturbation of {var} moved an earlier pole across its path")));
    }
    next.ledger.push(LedgerEntry { var, epsilon, delta: delta.unwrap_or_else(Rat::zero), from, to });
    Ok(next)
}

/// Per-level diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStats {
    pub var: VarId,
    pub terms_in: usize,
    pub poles_found: usize,
    pub left_poles: usize,
    pub right_poles: usize,
    pub closed_left: usize,
    pub closed_right: usize,
    pub terms_out: usize,
    pub perturbation: Option<LedgerEntry>,
}

/// A term together with the index of the first-level node it descends from.
#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub branch: usize,
    pub term: Term,
}

/// Integrates `vars` out in order, repairing on-path poles level by level.
pub(crate) fn eliminate(
    mut nodes: Vec<Node>,
    vars: &[VarId],
    config: &mut ContourConfig,
    rule: SideRule,
    history: &mut PoleHistory,
    stats: &mut Vec<LevelStats>,
) -> Result<Vec<Node>> {
    for (level, &var) in vars.iter().enumerate() {
        let find_poles = |config: &ContourConfig| -> Result<Vec<Vec<PoleSite>>> {
            nodes.iter().map(|n| poles_of(&n.term, var, config)).collect()
        };
        let mut poles = find_poles(config)?;
        let mut perturbation = None;
        if poles.iter().flatten().any(|p| p.side == Side::OnPath) {
            let flat: Vec<PoleSite> = poles.iter().flatten().cloned().collect();
            *config = perturb_abscissa(config, var, &flat, history)?;
            perturbation = config.ledger.last().cloned();
            poles = find_poles(config)?;
        }
        let mut st = LevelStats {
            var,
            terms_in: nodes.len(),
            poles_found: 0,
            left_poles: 0,
            right_poles: 0,
            closed_left: 0,
            closed_right: 0,
            terms_out: 0,
            perturbation,
        };
        for p in poles.iter().flatten() {
            history.record(var, &p.root, p.side);
            st.poles_found += 1;
            match p.side {
                Side::Left => st.left_poles += 1,
                _ => st.right_poles += 1,
            }
        }
        let mut out = Vec::new();
        for (node, node_poles) in nodes.iter().zip(&poles) {
            let (side, terms) = integrate_term(&node.term, var, node_poles, rule)?;
            match side {
                Side::Left => st.closed_left += 1,
                _ => st.closed_right += 1,
            }
            for term in terms {
                let branch = if level == 0 { out.len() } else { node.branch };
                out.push(Node { branch, term });
            }
        }
        st.terms_out = out.len();
        stats.push(st);
        nodes = out;
    }
    Ok(nodes)
}
