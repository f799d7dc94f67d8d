//! Independent ground truth for the residue engine.
//!
//! The two-row closed forms and the algebraic identity they imply, a few
//! instances with known volume, and a seeded hit-or-miss Monte Carlo
//! estimator. None of this shares code with the residue engine beyond the
//! rational type and the LP used to certify boundedness.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::polytope::{compactness_witness, NormalizedInstance, PolytopeInstance};
use crate::rat::{factorial_rat, int, pow, to_f64, Rat};

fn check_generic(a: &[Rat], b: &[Rat]) -> Result<()> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::GenericityViolated("a and b must be non-empty and of equal length".into()));
    }
    for j in 0..a.len() {
        if a[j].is_zero() || b[j].is_zero() {
            return Err(Error::GenericityViolated(format!("a[{j}]·b[{j}] = 0")));
        }
        if a[j] == b[j] {
            return Err(Error::GenericityViolated(format!("a[{j}] = b[{j}]")));
        }
        for k in 0..j {
            if &a[j] * &b[k] == &a[k] * &b[j] {
                return Err(Error::GenericityViolated(format!("a[{j}]/b[{j}] = a[{k}]/b[{k}]")));
            }
        }
    }
    Ok(())
}

/// `(a_j − b_j)^n / (a_j b_j ∏_{k≠j}(b_k a_j − a_k b_j))`
fn pair_term(a: &[Rat], b: &[Rat], j: usize) -> Rat {
    let n = a.len();
    let mut den = &a[j] * &b[j];
    for k in (0..n).filter(|&k| k != j) {
        den *= &b[k] * &a[j] - &a[k] * &b[j];
    }
    pow(&(&a[j] - &b[j]), n) / den
}

/// Volume of `{x ≥ 0, a'x ≤ 1, b'x ≤ 1}` from the two-row closed form,
/// obtained by integrating λ₁ (row `a`) first:
///
/// `(1/n!)·[1/∏b_j − Σ_{a_j > 0, b_j < a_j} (a_j−b_j)^n / (a_j b_j ∏_{k≠j}(b_k a_j − a_k b_j))]`.
///
/// Poles with `a_j < 0` lie right of the first path and never contribute;
/// for positive data the restriction `a_j > 0` is vacuous.
pub fn m2_closed_form(a: &[Rat], b: &[Rat]) -> Result<Rat> {
    check_generic(a, b)?;
    NormalizedInstance::from_matrix(vec![a.to_vec(), b.to_vec()])
        .map_err(|e| Error::GenericityViolated(format!("rows a, b do not give an admissible polytope: {e}")))?;
    let n = a.len();
    let mut bracket = Rat::one() / b.iter().product::<Rat>();
    for j in 0..n {
        if a[j].is_positive() && b[j] < a[j] {
            bracket -= pair_term(a, b, j);
        }
    }
    Ok(bracket / factorial_rat(n))
}

/// The same volume with the rows' roles exchanged (λ₂ integrated first).
pub fn m2_closed_form_swapped(a: &[Rat], b: &[Rat]) -> Result<Rat> {
    m2_closed_form(b, a)
}

/// `Σ_j (a_j−b_j)^n / (a_j b_j ∏_{k≠j}(b_k a_j − a_k b_j)) = 1/∏b_j − 1/∏a_j`,
/// evaluated exactly on both sides.
pub fn identity_check(a: &[Rat], b: &[Rat]) -> Result<bool> {
    check_generic(a, b)?;
    let lhs: Rat = (0..a.len()).map(|j| pair_term(a, b, j)).sum();
    let rhs = Rat::one() / b.iter().product::<Rat>() - Rat::one() / a.iter().product::<Rat>();
    Ok(lhs == rhs)
}

#[derive(Debug, Clone, PartialEq)]
pub enum KnownKind {
    /// `{x ≥ 0, Σx ≤ 1}` in dimension `n`.
    Simplex(usize),
    /// `{0 ≤ x_i ≤ s_i}`.
    Box(Vec<Rat>),
    /// The three-row planar example with area 17/48.
    PaperExample,
}

/// An instance together with its exact volume.
pub fn known_instance(kind: &KnownKind) -> (PolytopeInstance, Rat) {
    match kind {
        KnownKind::Simplex(n) => {
            let inst = PolytopeInstance::new(vec![vec![Rat::one(); *n]], vec![Rat::one()]).expect("n >= 1");
            (inst, Rat::one() / factorial_rat(*n))
        }
        KnownKind::Box(sides) => {
            let n = sides.len();
            let a = (0..n)
                .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
                .collect();
            let inst = PolytopeInstance::new(a, sides.clone()).expect("n >= 1");
            (inst, sides.iter().product())
        }
        KnownKind::PaperExample => {
            let a = vec![vec![int(1), int(1)], vec![int(-2), int(2)], vec![int(2), int(-1)]];
            let inst = PolytopeInstance::new(a, vec![Rat::one(); 3]).expect("valid shape");
            (inst, Rat::new(17.into(), 48.into()))
        }
    }
}

/// Hit-or-miss estimate over the box `[0, box_bound]^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
    pub box_bound: Rat,
}

impl McEstimate {
    /// `(estimate − exact) / stderr`; infinite when the estimate has zero
    /// spread but misses.
    pub fn z_score(&self, exact: &Rat) -> f64 {
        let diff = self.estimate - to_f64(exact);
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// The sampling box and a float copy of the constraints.
struct Sampler {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    side: f64,
    box_bound: Rat,
}

impl Sampler {
    fn new(inst: &PolytopeInstance) -> Result<Self> {
        let u = compactness_witness(inst.a()).ok_or(Error::NotCompact)?;
        let box_bound: Rat = u.iter().zip(inst.b()).map(|(x, y)| x * y).sum();
        Ok(Sampler {
            a: inst.a().iter().map(|r| r.iter().map(to_f64).collect()).collect(),
            b: inst.b().iter().map(to_f64).collect(),
            side: to_f64(&box_bound).max(0.0),
            box_bound,
        })
    }

    /// Fills `x` with the next uniform point of the box; true if it is inside.
    fn draw(&self, rng: &mut ChaCha8Rng, x: &mut [f64]) -> bool {
        for v in x.iter_mut() {
            *v = rng.gen::<f64>() * self.side;
        }
        self.a.iter().zip(&self.b).all(|(row, bi)| row.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() <= *bi)
    }
}

/// Uniform hit-or-miss sampling with ChaCha8 seeded from `seed`.
///
/// The box side is `u'b` for the compactness certificate `u ≥ 0`,
/// `A'u ≥ e_n`: every feasible `x` has `Σx ≤ u'Ax ≤ u'b`.
pub fn mc_volume(inst: &PolytopeInstance, samples: u64, seed: u64) -> Result<McEstimate> {
    let sampler = Sampler::new(inst)?;
    let n = inst.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; n];
    let hits = (0..samples).filter(|_| sampler.draw(&mut rng, &mut x)).count() as u64;
    let box_volume = sampler.side.powi(n as i32);
    let p = if samples == 0 { 0.0 } else { hits as f64 / samples as f64 };
    let stderr = if samples == 0 { 0.0 } else { (p * (1.0 - p) / samples as f64).sqrt() * box_volume };
    Ok(McEstimate { estimate: p * box_volume, stderr, samples, hits, seed, box_bound: sampler.box_bound })
}

/// The first `count` points [`mc_volume`] draws for the same seed, with
/// their hit flags.
pub fn mc_points(inst: &PolytopeInstance, count: usize, seed: u64) -> Result<Vec<(Vec<f64>, bool)>> {
    let sampler = Sampler::new(inst)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let mut x = vec![0.0; inst.n()];
            let hit = sampler.draw(&mut rng, &mut x);
            (x, hit)
        })
        .collect())
}

/// Random instance generators for cross-checks.
pub mod random {
    use super::*;

    /// `num/den` with `num ∈ [lo, hi]`, `den ∈ [1, max_den]`.
    pub fn rat<R: Rng>(rng: &mut R, lo: i64, hi: i64, max_den: i64) -> Rat {
        Rat::new(rng.gen_range(lo..=hi).into(), rng.gen_range(1..=max_den).into())
    }

    pub fn nonzero_rat<R: Rng>(rng: &mut R, lo: i64, hi: i64, max_den: i64) -> Rat {
        loop {
            let r = rat(rng, lo, hi, max_den);
            if !r.is_zero() {
                return r;
            }
        }
    }

    /// Positive `(a, b)` satisfying the two-row genericity conditions.
    pub fn generic_positive_pair<R: Rng>(rng: &mut R, n: usize) -> (Vec<Rat>, Vec<Rat>) {
        loop {
            let a: Vec<Rat> = (0..n).map(|_| rat(rng, 1, 60, 7)).collect();
            let b: Vec<Rat> = (0..n).map(|_| rat(rng, 1, 60, 7)).collect();
            if check_generic(&a, &b).is_ok() {
                return (a, b);
            }
        }
    }

    /// Nonzero `(a, b)` of any sign satisfying the genericity conditions.
    pub fn generic_pair<R: Rng>(rng: &mut R, n: usize) -> (Vec<Rat>, Vec<Rat>) {
        loop {
            let a: Vec<Rat> = (0..n).map(|_| nonzero_rat(rng, -40, 40, 9)).collect();
            let b: Vec<Rat> = (0..n).map(|_| nonzero_rat(rng, -40, 40, 9)).collect();
            if check_generic(&a, &b).is_ok() {
                return (a, b);
            }
        }
    }

    /// An `m×n` matrix with an all-positive first row (so the polytope
    /// `{x ≥ 0, Ax ≤ e}` is bounded) and mixed-sign remaining rows, no
    /// zero entries.
    pub fn bounded_matrix<R: Rng>(rng: &mut R, m: usize, n: usize) -> Vec<Vec<Rat>> {
        (0..m)
            .map(|i| {
                (0..n)
                    .map(|_| if i == 0 { rat(rng, 1, 30, 5) } else { nonzero_rat(rng, -12, 30, 5) })
                    .collect()
            })
            .collect()
    }

    /// Strictly positive right-hand side.
    pub fn positive_rhs<R: Rng>(rng: &mut R, m: usize) -> Vec<Rat> {
        (0..m).map(|_| rat(rng, 1, 20, 4)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::frac;
    use rand::SeedableRng;

    fn ints(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn one_dimensional_interval() {
        // {0 ≤ x, x ≤ 1, 2x ≤ 1} = [0, 1/2]
        assert_eq!(m2_closed_form(&ints(&[1]), &ints(&[2])).unwrap(), frac(1, 2));
        assert_eq!(m2_closed_form_swapped(&ints(&[1]), &ints(&[2])).unwrap(), frac(1, 2));
    }

    #[test]
    fn two_forms_agree_on_fixed_data() {
        let a = ints(&[1, 3, 2]);
        let b = ints(&[2, 1, 5]);
        assert_eq!(m2_closed_form(&a, &b).unwrap(), m2_closed_form_swapped(&a, &b).unwrap());
    }

    #[test]
    fn genericity_violations() {
        assert!(matches!(identity_check(&ints(&[1, 2]), &ints(&[1, 3])), Err(Error::GenericityViolated(_))));
        assert!(matches!(identity_check(&ints(&[0, 2]), &ints(&[1, 3])), Err(Error::GenericityViolated(_))));
        assert!(matches!(identity_check(&ints(&[1, 2]), &ints(&[2, 4])), Err(Error::GenericityViolated(_))));
        assert!(matches!(m2_closed_form(&ints(&[1, -1]), &ints(&[2, -3])), Err(Error::GenericityViolated(_))));
    }

    #[test]
    fn identity_in_one_dimension() {
        for (a, b) in [(3, 5), (-2, 7), (4, -9)] {
            assert!(identity_check(&ints(&[a]), &ints(&[b])).unwrap());
        }
    }

    #[test]
    fn identity_on_random_signed_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            for _ in 0..20 {
                let (a, b) = random::generic_pair(&mut rng, n);
                assert!(identity_check(&a, &b).unwrap());
            }
        }
    }

    #[test]
    fn known_volumes() {
        assert_eq!(known_instance(&KnownKind::Simplex(3)).1, frac(1, 6));
        assert_eq!(known_instance(&KnownKind::PaperExample).1, frac(17, 48));
        assert_eq!(known_instance(&KnownKind::Box(ints(&[1, 1]))).1, int(1));
        assert_eq!(known_instance(&KnownKind::Box(vec![frac(1, 2), int(3)])).1, frac(3, 2));
    }

    #[test]
    fn mc_is_seeded() {
        let (inst, _) = known_instance(&KnownKind::PaperExample);
        let a = mc_volume(&inst, 20_000, 42).unwrap();
        let b = mc_volume(&inst, 20_000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        let c = mc_volume(&inst, 20_000, 43).unwrap();
        assert_ne!(a.hits, c.hits);
    }

    #[test]
    fn mc_simplex_close_to_half() {
        let (inst, exact) = known_instance(&KnownKind::Simplex(2));
        let est = mc_volume(&inst, 200_000, 1).unwrap();
        assert!(est.z_score(&exact).abs() < 4.0, "{est:?}");
    }

    #[test]
    fn points_follow_the_estimator_stream() {
        let (inst, _) = known_instance(&KnownKind::PaperExample);
        let pts = mc_points(&inst, 500, 9).unwrap();
        let est = mc_volume(&inst, 500, 9).unwrap();
        assert_eq!(pts.iter().filter(|p| p.1).count() as u64, est.hits);
        assert!(pts.iter().all(|(x, _)| x.len() == 2));
    }

    #[test]
    fn mc_rejects_unbounded() {
        let inst = PolytopeInstance::new(vec![ints(&[1, -1])], ints(&[1])).unwrap();
        assert!(matches!(mc_volume(&inst, 10, 0), Err(Error::NotCompact)));
    }
}
