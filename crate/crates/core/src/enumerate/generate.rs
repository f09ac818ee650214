use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{Field, FqElem, PolyT};
use crate::bivar::BivarPoly;
use crate::hilbert::{HilbertError, PlaneCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `y^k − g(x)` with `k = min(2, δ)`; lines are `y − c₁x − c₀` over `F_q`.
    Weierstrass,
    /// Every monomial of degree `≤ δ`, with a nonzero `y^δ` coefficient.
    Dense,
}

impl std::str::FromStr for Shape {
    type Err = String;
    fn from_str(s: &str) -> Result<Shape, String> {
        match s {
            "weierstrass" => Ok(Shape::Weierstrass),
            "dense" => Ok(Shape::Dense),
            other => Err(format!("unknown curve shape '{other}'")),
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Shape::Weierstrass => "weierstrass",
            Shape::Dense => "dense",
        })
    }
}

fn elem(rng: &mut ChaCha8Rng, field: &Field) -> FqElem {
    field.elem(rng.gen_range(0..field.q())).expect("index below q")
}

fn nonzero(rng: &mut ChaCha8Rng, field: &Field) -> FqElem {
    field.elem(rng.gen_range(1..field.q())).expect("index below q")
}

/// A random element of `F_q[t]_2`.
fn small_poly(rng: &mut ChaCha8Rng, field: &Field) -> PolyT {
    PolyT::from_coeffs(field, vec![elem(rng, field), elem(rng, field)])
}

/// Deterministic in `(field, δ, shape, seed)`; the irreducibility flag is set.
pub fn random_curve(
    field: &Field,
    delta: u32,
    shape: Shape,
    seed: u64,
) -> Result<PlaneCurve, HilbertError> {
    if delta == 0 {
        return Err(HilbertError::ConstantPolynomial);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((delta as u64) << 32) ^ ((field.q() as u64) << 40));
    let one = PolyT::one(field);
    let mut f = BivarPoly::zero(field);
    match (shape, delta) {
        (Shape::Weierstrass, 1) => {
            f.add_term((0, 1), &one);
            f.add_term((1, 0), &PolyT::constant(field, field.neg(nonzero(&mut rng, field))));
            f.add_term((0, 0), &PolyT::constant(field, elem(&mut rng, field)));
        }
        (Shape::Weierstrass, 2) => {
            f.add_term((0, 2), &one);
            for i in 0..=2 {
                f.add_term((i, 0), &-small_poly(&mut rng, field));
            }
        }
        (Shape::Weierstrass, _) => {
            f.add_term((0, 2), &one);
            f.add_term((delta, 0), &-one.clone());
            for i in 0..delta {
                f.add_term((i, 0), &-small_poly(&mut rng, field));
            }
        }
        (Shape::Dense, _) => {
            for i in 0..=delta {
                for j in 0..=delta - i {
                    f.add_term((i, j), &small_poly(&mut rng, field));
                }
            }
            let lead = f.coeff(0, delta);
            if lead.is_zero() {
                f.add_term((0, delta), &PolyT::constant(field, nonzero(&mut rng, field)));
            }
        }
    }
    debug_assert_eq!(f.total_degree(), Some(delta));
    PlaneCurve::new(f, true)
}

/// The first curve flagged irreducible among seeds `seed, seed + 1, …`.
pub fn random_irreducible_curve(
    field: &Field,
    delta: u32,
    shape: Shape,
    seed: u64,
    attempts: u32,
) -> Option<(PlaneCurve, u64)> {
    (0..attempts as u64).find_map(|k| {
        let s = seed + k;
        random_curve(field, delta, shape, s)
            .ok()
            .filter(|c| c.irreducible() == Some(true))
            .map(|c| (c, s))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_deterministic() {
        let f = Field::new(5, 1).unwrap();
        let a = random_curve(&f, 3, Shape::Weierstrass, 1).unwrap();
        let b = random_curve(&f, 3, Shape::Weierstrass, 1).unwrap();
        assert_eq!(a.poly(), b.poly());
        assert_eq!(a.delta(), 3);
        assert_eq!(a.poly().coeff(0, 2), PolyT::one(&f));
        assert_eq!(a.poly().coeff(3, 0), PolyT::from_ints(&f, &[-1]));
        assert!(a.irreducible().is_some());
    }

    #[test]
    fn lines_are_irreducible() {
        let f = Field::new(5, 1).unwrap();
        for seed in 0..10 {
            for shape in [Shape::Weierstrass, Shape::Dense] {
                let c = random_curve(&f, 1, shape, seed).unwrap();
                assert_eq!(c.delta(), 1);
                assert_eq!(c.irreducible(), Some(true));
            }
        }
    }

    #[test]
    fn dense_conics_carry_a_flag() {
        let f = Field::new(3, 1).unwrap();
        let c = random_curve(&f, 2, Shape::Dense, 7).unwrap();
        assert_eq!(c.delta(), 2);
        assert!(!c.poly().coeff(0, 2).is_zero());
        assert!(c.irreducible().is_some());
        let again = random_curve(&f, 2, Shape::Dense, 7).unwrap();
        assert_eq!(c.poly(), again.poly());
    }

    #[test]
    fn irreducible_search_finds_curves() {
        for p in [5, 7] {
            let f = Field::new(p, 1).unwrap();
            for delta in 1..=3 {
                let (c, _) = random_irreducible_curve(&f, delta, Shape::Weierstrass, 1, 50).unwrap();
                assert_eq!(c.irreducible(), Some(true));
            }
        }
    }
}
