//! Hilbert functions of plane curves and the Salberger monomial order.
//!
//! A single nonzero `F` is a Gröbner basis of `(F)`, so the leading-term
//! ideal is generated by one monomial and every staircase is explicit.

mod irreducible;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::arith::{ArithError, Field, PolyT};
use crate::bivar::BivarPoly;
use crate::combinat::{lambda_enumerate, Exponent};

pub use irreducible::certify_irreducible;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HilbertError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("curve polynomial is zero")]
    ZeroPolynomial,
    #[error("curve polynomial is constant")]
    ConstantPolynomial,
    #[error("exponents of different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("s_max = {s_max} is below the polynomial regime (need at least {need})")]
    SMaxTooSmall { s_max: u32, need: u32 },
    #[error("no admissible s up to the search cap {cap}")]
    SearchCap { cap: u32 },
    #[error("bad curve spec: {0}")]
    Spec(String),
}

/// `α ≤ β` iff `|α| < |β|`, or the degrees agree and `α_i > β_i` at the
/// first index where they differ.
pub fn salberger_compare(a: &Exponent, b: &Exponent) -> Result<Ordering, HilbertError> {
    if a.len() != b.len() {
        return Err(HilbertError::LengthMismatch(a.len(), b.len()));
    }
    Ok(salberger_cmp(a, b))
}

pub(crate) fn salberger_cmp(a: &Exponent, b: &Exponent) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| {
        for (x, y) in a.entries().iter().zip(b.entries()) {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

/// An affine plane curve `f(x, y) = 0` with coefficients in `F_q[t]`.
#[derive(Debug, Clone)]
pub struct PlaneCurve {
    f: BivarPoly,
    delta: u32,
    /// `F(x₀, x₁, x₂) = x₀^δ f(x₁/x₀, x₂/x₀)`, keyed by exponent.
    homog: Vec<(Exponent, PolyT)>,
    lt: Exponent,
    irreducible: Option<bool>,
}

impl PlaneCurve {
    pub fn new(f: BivarPoly, check_irreducible: bool) -> Result<PlaneCurve, HilbertError> {
        let delta = f.total_degree().ok_or(HilbertError::ZeroPolynomial)?;
        if delta == 0 {
            return Err(HilbertError::ConstantPolynomial);
        }
        let mut homog: Vec<(Exponent, PolyT)> = f
            .terms()
            .iter()
            .map(|(&(i, j), c)| (Exponent::new(vec![delta - i - j, i, j]), c.clone()))
            .collect();
        homog.sort_by(|a, b| salberger_cmp(&a.0, &b.0));
        let lt = homog.last().expect("nonzero polynomial").0.clone();
        let irreducible = check_irreducible.then(|| certify_irreducible(&f));
        Ok(PlaneCurve {
            f,
            delta,
            homog,
            lt,
            irreducible,
        })
    }

    /// Parses `p=<prime>;a=<deg>;f=<polynomial>`.
    pub fn parse_spec(spec: &str, check_irreducible: bool) -> Result<PlaneCurve, HilbertError> {
        let mut p = None;
        let mut a = None;
        let mut f = None;
        let mut offset = 0usize;
        for part in spec.split(';') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| HilbertError::Spec(format!("expected key=value at position {offset}")))?;
            let value_offset = offset + key.len() + 1;
            match key.trim() {
                "p" => p = Some(parse_u32(value, value_offset)?),
                "a" => a = Some(parse_u32(value, value_offset)?),
                "f" => f = Some((value, value_offset)),
                other => {
                    return Err(HilbertError::Spec(format!(
                        "unknown key '{other}' at position {offset}"
                    )))
                }
            }
            offset += part.len() + 1;
        }
        let p = p.ok_or_else(|| HilbertError::Spec("missing p".into()))?;
        let field = Field::new(p, a.unwrap_or(1))?;
        let (text, at) = f.ok_or_else(|| HilbertError::Spec("missing f".into()))?;
        let poly = BivarPoly::parse(&field, text).map_err(|e| match e {
            ArithError::Parse { pos, msg } => ArithError::Parse { pos: pos + at, msg },
            other => other,
        })?;
        PlaneCurve::new(poly, check_irreducible)
    }

    pub fn field(&self) -> &Field {
        self.f.field()
    }

    pub fn poly(&self) -> &BivarPoly {
        &self.f
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn homogenized(&self) -> &[(Exponent, PolyT)] {
        &self.homog
    }

    pub fn leading_exponent(&self) -> &Exponent {
        &self.lt
    }

    /// `Some(true)` when certified irreducible over `F_q(t)`, `Some(false)`
    /// when the certificate failed, `None` when not checked.
    pub fn irreducible(&self) -> Option<bool> {
        self.irreducible
    }

    /// The text form `p=..;a=..;f=..`.
    pub fn spec(&self) -> String {
        let fld = self.field();
        format!("p={};a={};f={}", fld.p(), fld.a(), self.f)
    }
}

impl fmt::Display for PlaneCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec())
    }
}

fn parse_u32(s: &str, at: usize) -> Result<u32, HilbertError> {
    s.trim()
        .parse()
        .map_err(|_| HilbertError::Spec(format!("expected an integer at position {at}")))
}

/// Degree-`s` part of the staircase of `(lt)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaircaseSlice {
    pub s: u32,
    /// `M_z(s)`, ascending in the Salberger order.
    pub monomials: Vec<Exponent>,
    pub hf: u64,
    pub sigma: [u64; 3],
}

pub fn staircase(curve: &PlaneCurve, s: u32) -> StaircaseSlice {
    let lt = curve.leading_exponent();
    let monomials: Vec<Exponent> = lambda_enumerate(3, s)
        .into_iter()
        .filter(|a| !a.divisible_by(lt))
        .collect();
    let mut sigma = [0u64; 3];
    for a in &monomials {
        for (i, slot) in sigma.iter_mut().enumerate() {
            *slot += a.get(i) as u64;
        }
    }
    StaircaseSlice {
        s,
        hf: monomials.len() as u64,
        monomials,
        sigma,
    }
}

/// `δs − δ(δ−3)/2`, valid for `s ≥ δ − 1`.
pub fn hf_closed_form(delta: u32, s: u32) -> i64 {
    let (d, s) = (delta as i64, s as i64);
    d * s - d * (d - 3) / 2
}

/// Leading-coefficient ratios `a_i = lim σ_i(s) / (s·HF(s))`.
pub fn hilbert_ratios(curve: &PlaneCurve, s_max: u32) -> Result<[Ratio<i64>; 3], HilbertError> {
    let need = curve.delta() + 3;
    if s_max < need {
        return Err(HilbertError::SMaxTooSmall { s_max, need });
    }
    let slices: Vec<StaircaseSlice> = (s_max - 2..=s_max).map(|s| staircase(curve, s)).collect();
    let hf_slope = slices[2].hf as i64 - slices[1].hf as i64;
    let mut out = [Ratio::from_integer(0); 3];
    for (i, slot) in out.iter_mut().enumerate() {
        let second =
            slices[2].sigma[i] as i64 - 2 * slices[1].sigma[i] as i64 + slices[0].sigma[i] as i64;
        // σ_i ≈ (second/2) s² and s·HF ≈ hf_slope s².
        *slot = Ratio::new(second, 2 * hf_slope);
    }
    Ok(out)
}

/// Result of the exact search for the auxiliary degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SChoice {
    pub s: u32,
    pub beta: u32,
    pub mu: u64,
    pub e: u64,
    pub sigma1: u64,
    pub sigma2: u64,
}

/// Whether `β·μ(μ−1)/2 > (n−1)(σ₁+σ₂)` at degree `s`.
pub fn det_inequality(curve: &PlaneCurve, n: u32, beta: u32, s: u32) -> (bool, StaircaseSlice) {
    let sl = staircase(curve, s);
    let e = sl.hf as u128 * (sl.hf as u128).saturating_sub(1) / 2;
    let lhs = beta as u128 * e;
    let rhs = (n as u128).saturating_sub(1) * (sl.sigma[1] + sl.sigma[2]) as u128;
    (lhs > rhs, sl)
}

/// `β = ⌈n/δ⌉` and the least `s ≥ 1` satisfying the determinant inequality.
pub fn choose_s(curve: &PlaneCurve, n: u32) -> Result<SChoice, HilbertError> {
    let delta = curve.delta();
    let beta = n.max(1).div_ceil(delta);
    let cap = 10 * n.max(1) * delta;
    for s in 1..=cap {
        let (ok, sl) = det_inequality(curve, n, beta, s);
        if ok {
            return Ok(SChoice {
                s,
                beta,
                mu: sl.hf,
                e: sl.hf * (sl.hf - 1) / 2,
                sigma1: sl.sigma[1],
                sigma2: sl.sigma[2],
            });
        }
    }
    Err(HilbertError::SearchCap { cap })
}

/// `Λ₃(s)` keyed for lookup, used when building matrices.
pub fn monomial_index(monomials: &[Exponent]) -> BTreeMap<Vec<u32>, usize> {
    monomials
        .iter()
        .enumerate()
        .map(|(k, a)| (a.entries().to_vec(), k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(v: &[u32]) -> Exponent {
        Exponent::new(v.to_vec())
    }

    fn curve(p: u32, s: &str) -> PlaneCurve {
        let f = Field::new(p, 1).unwrap();
        PlaneCurve::new(BivarPoly::parse(&f, s).unwrap(), false).unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(
            salberger_compare(&e(&[1, 0, 2]), &e(&[0, 3, 0])).unwrap(),
            Ordering::Less
        );
        assert_eq!(
            salberger_compare(&e(&[0, 0, 1]), &e(&[2, 0, 0])).unwrap(),
            Ordering::Less
        );
        assert_eq!(
            salberger_compare(&e(&[1, 1, 1]), &e(&[1, 1, 1])).unwrap(),
            Ordering::Equal
        );
        assert!(salberger_compare(&e(&[1]), &e(&[1, 0])).is_err());
    }

    #[test]
    fn leading_terms() {
        let c = curve(5, "y^2 - x^3 - t*x");
        assert_eq!(c.leading_exponent(), &e(&[0, 3, 0]));
        // Oracle: brute-force maximum of the curve's exponents under the rule.
        let brute = c
            .homogenized()
            .iter()
            .map(|(a, _)| a.clone())
            .max_by(|a, b| salberger_compare(a, b).unwrap())
            .unwrap();
        assert_eq!(&brute, c.leading_exponent());
        let line = curve(5, "x + y");
        let mut lam = lambda_enumerate(3, 1);
        lam.sort_by(salberger_cmp);
        assert_eq!(lam.last().unwrap(), &e(&[0, 0, 1]));
        assert_eq!(line.leading_exponent(), &e(&[0, 0, 1]));
        let f = Field::new(5, 1).unwrap();
        assert_eq!(
            PlaneCurve::new(BivarPoly::parse(&f, "7").unwrap(), false).unwrap_err(),
            HilbertError::ConstantPolynomial
        );
        assert_eq!(
            PlaneCurve::new(BivarPoly::zero(&f), false).unwrap_err(),
            HilbertError::ZeroPolynomial
        );
    }

    #[test]
    fn weierstrass_leading_term_is_y_power() {
        let c = curve(7, "y^3 - x^3 - t*x + 1");
        assert_eq!(c.leading_exponent(), &e(&[0, 0, 3]));
    }

    #[test]
    fn staircase_examples() {
        let c = curve(5, "y^2 - x^3 - t*x");
        let sl = staircase(&c, 3);
        assert_eq!(sl.hf, 9);
        // Σ_{α₁=0}^{2} α₁ (s − α₁ + 1) at s = 3.
        let oracle: u64 = (0..=2u64).map(|a1| a1 * (3 - a1 + 1)).sum();
        assert_eq!(sl.sigma[1], oracle);
        assert_eq!(sl.sigma[1], 7);
        assert_eq!(staircase(&curve(5, "y - x"), 4).hf, 5);
    }

    #[test]
    fn ratio_examples() {
        let c = curve(5, "y^2 - x^3 - t*x");
        let a = hilbert_ratios(&c, 10).unwrap();
        assert_eq!(a[1], Ratio::from_integer(0));
        assert_eq!(a[2], Ratio::new(1, 2));
        let line = hilbert_ratios(&curve(5, "y - x"), 8).unwrap();
        // lt = y, so the mass sits on x.
        assert_eq!(line[1] + line[2], Ratio::new(1, 2));
        assert_eq!(line[2], Ratio::from_integer(0));
        let conic = curve(5, "y^2 - x");
        assert_eq!(staircase(&conic, 6).hf as i64, hf_closed_form(2, 6));
        assert_eq!(hf_closed_form(2, 6), 13);
        let a = hilbert_ratios(&conic, 7).unwrap();
        assert!(a[1] + a[2] <= Ratio::new(1, 2));
        assert!(hilbert_ratios(&conic, 4).is_err());
    }

    #[test]
    fn choose_s_examples() {
        let c = curve(5, "y^2 - x^3 - t*x");
        let ch = choose_s(&c, 3).unwrap();
        assert_eq!((ch.s, ch.beta), (3, 1));
        // Hand inequality 3s² − 9s + 4 > 0 holds first at s = 3.
        let hand = |s: i64| 3 * s * s - 9 * s + 4 > 0;
        assert!(!hand(2) && hand(3));
        let line = curve(5, "y - x");
        let ch = choose_s(&line, 1).unwrap();
        assert_eq!(ch.beta, 1);
        assert!(det_inequality(&line, 1, 1, ch.s).0);
        assert!(ch.s == 1 || !det_inequality(&line, 1, 1, ch.s - 1).0);
        assert_eq!(choose_s(&curve(5, "y^2 - x"), 4).unwrap().beta, 2);
    }

    #[test]
    fn spec_parsing() {
        let c = PlaneCurve::parse_spec("p=5;a=1;f=y^2 - x^3 - t*x", true).unwrap();
        assert_eq!(c.delta(), 3);
        assert_eq!(c.irreducible(), Some(true));
        assert_eq!(c.spec(), "p=5;a=1;f=4*x^3 + y^2 + 4*t*x");
        match PlaneCurve::parse_spec("p=5;a=1;f=y^2 - x^3 - t*", false) {
            Err(HilbertError::Arith(ArithError::Parse { pos, .. })) => assert_eq!(pos, 24),
            other => panic!("unexpected {other:?}"),
        }
        assert!(PlaneCurve::parse_spec("p=4;a=1;f=y", false).is_err());
        assert!(PlaneCurve::parse_spec("p=5;f", false).is_err());
    }

    #[test]
    fn order_is_total_and_monomial() {
        for s in 0..=6 {
            let lam = lambda_enumerate(3, s);
            for a in &lam {
                for b in &lam {
                    let ab = salberger_cmp(a, b);
                    assert_eq!(ab, salberger_cmp(b, a).reverse());
                    assert_eq!(ab == Ordering::Equal, a == b);
                    for c in &lam {
                        if ab != Ordering::Greater && salberger_cmp(b, c) != Ordering::Greater {
                            assert_ne!(salberger_cmp(a, c), Ordering::Greater);
                        }
                    }
                }
            }
            // Enumeration order is ascending.
            assert!(lam.windows(2).all(|w| salberger_cmp(&w[0], &w[1]) == Ordering::Less));
        }
        for s in 0..=4 {
            for g in 0..=2 {
                for a in &lambda_enumerate(3, s) {
                    for b in &lambda_enumerate(3, s) {
                        for c in &lambda_enumerate(3, g) {
                            if salberger_cmp(a, b) != Ordering::Greater {
                                assert_ne!(salberger_cmp(&a.plus(c), &b.plus(c)), Ordering::Greater);
                            }
                        }
                    }
                }
            }
        }
    }

    pub(crate) fn random_poly(rng: &mut ChaCha8Rng, field: &Field, delta: u32) -> BivarPoly {
        let q = field.q();
        let mut terms = Vec::new();
        for i in 0..=delta {
            for j in 0..=delta - i {
                if rng.gen_bool(0.6) {
                    let c = PolyT::from_coeffs(
                        field,
                        (0..2).map(|_| field.elem(rng.gen_range(0..q)).unwrap()).collect(),
                    );
                    terms.push(((i, j), c));
                }
            }
        }
        let top = rng.gen_range(0..=delta);
        let lead = field.elem(rng.gen_range(1..q)).unwrap();
        terms.push(((top, delta - top), PolyT::constant(field, lead)));
        let mut p = BivarPoly::from_terms(field, terms.clone());
        if p.total_degree() != Some(delta) {
            p.add_term((top, delta - top), &PolyT::one(field));
        }
        p
    }

    #[test]
    fn staircase_identities_on_random_curves() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let field = Field::new(7, 1).unwrap();
        for delta in 1..=5 {
            for _ in 0..4 {
                let c = PlaneCurve::new(random_poly(&mut rng, &field, delta), false).unwrap();
                assert_eq!(c.delta(), delta);
                for s in 0..=15 {
                    let sl = staircase(&c, s);
                    assert_eq!(s as u64 * sl.hf, sl.sigma.iter().sum::<u64>());
                    // Brute-force count of Λ₃(s) outside (lt).
                    let brute = (0..=s)
                        .flat_map(|a0| (0..=s - a0).map(move |a1| [a0, a1, s - a0 - a1]))
                        .filter(|a| {
                            let lt = c.leading_exponent();
                            !(0..3).all(|i| a[i] >= lt.get(i))
                        })
                        .count() as u64;
                    assert_eq!(sl.hf, brute);
                    if s >= delta {
                        assert_eq!(sl.hf as i64, hf_closed_form(delta, s));
                    }
                }
                let a = hilbert_ratios(&c, 15).unwrap();
                assert!(a[1] + a[2] <= Ratio::new(1, 2));
                assert_eq!(a[0] + a[1] + a[2], Ratio::from_integer(1));
            }
        }
    }

    proptest! {
        #[test]
        fn choose_s_is_minimal(delta in 1u32..=4, n in 1u32..=5, pick in 0u32..5) {
            let field = Field::new(5, 1).unwrap();
            let top = pick % (delta + 1);
            let f = BivarPoly::from_terms(&field, [
                ((top, delta - top), PolyT::one(&field)),
                ((0, 0), PolyT::t(&field)),
            ]);
            let c = PlaneCurve::new(f, false).unwrap();
            let ch = choose_s(&c, n).unwrap();
            prop_assert_eq!(ch.beta, n.div_ceil(delta));
            prop_assert!(det_inequality(&c, n, ch.beta, ch.s).0);
            prop_assert!(ch.s == 1 || !det_inequality(&c, n, ch.beta, ch.s - 1).0);
        }
    }
}
