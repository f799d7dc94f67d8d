//! Homogeneous linear forms over the integration variables.
//!
//! Pole roots, exponents and denominator factors are all linear forms
//! without a constant part. Forms are kept in a canonical sparse shape (no
//! zero coefficients stored), so `==` is mathematical equality.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// An integration variable.
///
/// `Lambda(k)` is λ_k with `k >= 1`; `P` is the distinguished variable of
/// the associated transform. The derived order puts every λ before `p`, and
/// λ's in index order, which is the elimination order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarId {
    Lambda(u32),
    P,
}

impl VarId {
    /// λ for constraint row `row` (0-based).
    pub fn for_row(row: usize) -> Self {
        VarId::Lambda(row as u32 + 1)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::Lambda(k) => write!(f, "λ{k}"),
            VarId::P => write!(f, "p"),
        }
    }
}

/// Real abscissae of the Bromwich paths, one per variable.
pub type Abscissae = BTreeMap<VarId, Rat>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LinForm {
    coeffs: BTreeMap<VarId, Rat>,
}

impl LinForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn var(v: VarId) -> Self {
        Self::term(v, Rat::one())
    }

    pub fn term(v: VarId, c: Rat) -> Self {
        let mut f = Self::zero();
        f.add_term(v, c);
        f
    }

    pub fn from_terms<I: IntoIterator<Item = (VarId, Rat)>>(terms: I) -> Self {
        let mut f = Self::zero();
        for (v, c) in terms {
            f.add_term(v, c);
        }
        f
    }

    fn add_term(&mut self, v: VarId, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(v).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, v: VarId) -> Rat {
        self.coeffs.get(&v).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.coeffs.contains_key(&v)
    }

    /// Variables with a nonzero coefficient, in ascending order.
    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &Rat)> + '_ {
        self.coeffs.iter().map(|(v, c)| (*v, c))
    }

    /// True when the form is `c·v` for some nonzero `c` (and nothing else).
    pub fn is_multiple_of(&self, v: VarId) -> bool {
        self.coeffs.len() == 1 && self.contains(v)
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { coeffs: self.coeffs.iter().map(|(v, c)| (*v, c * k)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_term(*v, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_term(*v, -c);
        }
        out
    }

    /// Replaces `var` by `root`: `form − a·var + a·root` with `a` the
    /// coefficient of `var`. `root` must not mention `var`.
    pub fn substitute(&self, var: VarId, root: &LinForm) -> Self {
        assert!(!root.contains(var), "substitution root {root} mentions {var}");
        match self.coeffs.get(&var) {
            None => self.clone(),
            Some(a) => {
                let mut out = self.clone();
                out.coeffs.remove(&var);
                for (v, c) in &root.coeffs {
                    out.add_term(*v, a * c);
                }
                out
            }
        }
    }

    /// Exact value at the given abscissae.
    pub fn eval(&self, at: &Abscissae) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (v, c) in &self.coeffs {
            let x = at.get(v).ok_or(Error::MissingAbscissa(*v))?;
            acc += c * x;
        }
        Ok(acc)
    }

    /// Solves `self = 0` for `var`. Returns the coefficient of `var`
    /// (`leading`) and the root, so that `self = leading·(var − root)`.
    pub fn solve_for(&self, var: VarId) -> Result<(Rat, LinForm)> {
        let leading = self
            .coeffs
            .get(&var)
            .cloned()
            .ok_or_else(|| Error::NotAPoleInVar { var, form: self.to_string() })?;
        let mut rest = self.clone();
        rest.coeffs.remove(&var);
        let root = rest.scale(&(-leading.recip()));
        Ok((leading, root))
    }

    /// `Some(r)` with `self = r·other`, `r ≠ 0`, when the two forms are
    /// proportional. Zero forms are never parallel to anything.
    pub fn parallel(&self, other: &Self) -> Option<Rat> {
        if self.is_zero() || other.is_zero() || self.coeffs.len() != other.coeffs.len() {
            return None;
        }
        let mut ratio: Option<Rat> = None;
        for ((va, ca), (vb, cb)) in self.coeffs.iter().zip(other.coeffs.iter()) {
            if va != vb {
                return None;
            }
            let r = ca / cb;
            match &ratio {
                None => ratio = Some(r),
                Some(prev) if *prev != r => return None,
                Some(_) => {}
            }
        }
        ratio
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (v, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if mag.is_one() {
                write!(f, "{v}")?;
            } else if mag.is_integer() {
                write!(f, "{mag}{v}")?;
            } else {
                write!(f, "({mag}){v}")?;
            }
        }
        Ok(())
    }
}
