//! Power maps `x ↦ t^j ξ x^r`, their preimages, and coefficient bounds of
//! charts precomposed with them.

use std::collections::BTreeMap;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{hensel_lift, Field, FqElem, LaurentApprox, PolyT, Valuation};

use super::{binom_elem, indices_below, Ball, SeriesChart, TrError};

/// Cosets of `(F_q^×)^r`, each represented by its smallest encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetSelector {
    field: Field,
    r: u32,
    ell: u32,
    /// `reps[i]` represents the elements with discrete log `≡ i (mod ℓ)`.
    reps: Vec<FqElem>,
}

impl CosetSelector {
    pub fn new(field: &Field, r: u32) -> CosetSelector {
        let ell = (r.max(1)).gcd(&(field.q() - 1));
        let mut reps: Vec<Option<FqElem>> = vec![None; ell as usize];
        for a in field.nonzero_elements() {
            let i = (field.log(a).expect("nonzero") % ell) as usize;
            reps[i].get_or_insert(a);
        }
        CosetSelector {
            field: field.clone(),
            r,
            ell,
            reps: reps.into_iter().map(|x| x.expect("every coset is hit")).collect(),
        }
    }

    /// `ℓ = gcd(r, q − 1)`, the index of the `r`-th powers.
    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn reps(&self) -> &[FqElem] {
        &self.reps
    }

    pub fn coset(&self, a: FqElem) -> Option<usize> {
        self.field.log(a).map(|k| (k % self.ell) as usize)
    }

    /// `ξ(a)`: the representative of the coset of `a`.
    pub fn xi(&self, a: FqElem) -> Option<FqElem> {
        self.coset(a).map(|i| self.reps[i])
    }
}

/// `Σ_l binom(k,l) d^l (−c)^{k−l} x^{rl}`, the expansion of `(d x^r − c)^k`.
fn power_binomial(
    field: &Field,
    d: &LaurentApprox,
    c: &LaurentApprox,
    r: u32,
    k: u32,
) -> Result<Vec<(u32, LaurentApprox)>, TrError> {
    let minus_c = c.neg();
    (0..=k)
        .map(|l| {
            let coeff = d
                .pow(l)
                .checked_mul(&minus_c.pow(k - l))?
                .scale(binom_elem(field, k, l));
            Ok((r * l, coeff))
        })
        .filter(|res| !matches!(res, Ok((_, c)) if c.is_exact_zero()))
        .collect()
}

/// The chart `x ↦ f(t^{j_1} ξ_1 x_1^r, …, t^{j_m} ξ_m x_m^r)` on `domain`.
///
/// Each domain ball must map into the matching ball of `f`; the test uses
/// the Gauss norm of the image polynomial, so it may reject a ball whose
/// image is contained only thanks to the finite residue field.
pub fn power_precompose(
    chart: &SeriesChart,
    r: u32,
    js: &[i64],
    xis: &[FqElem],
    domain: Vec<Ball>,
) -> Result<SeriesChart, TrError> {
    let m = chart.arity();
    for len in [js.len(), xis.len(), domain.len()] {
        if len != m {
            return Err(TrError::ArityMismatch { expected: m, got: len });
        }
    }
    if r == 0 {
        return Err(TrError::ZeroOrder);
    }
    let field = chart.field().clone();
    let ds: Vec<LaurentApprox> = js
        .iter()
        .zip(xis)
        .map(|(&j, &xi)| LaurentApprox::monomial(&field, xi, j))
        .collect();
    for (var, ((d, ball), target)) in ds.iter().zip(&domain).zip(chart.domain()).enumerate() {
        let constant = d.checked_mul(&ball.center.pow(r))?.checked_sub(&target.center)?;
        if constant.val_lower_bound() < Valuation::Finite(target.radius) {
            return Err(TrError::ImageEscapes { var });
        }
        for l in 1..=r {
            let c = d
                .checked_mul(&ball.center.pow(r - l))?
                .scale(binom_elem(&field, r, l));
            if c.val_lower_bound().plus(l as i64 * ball.radius) < Valuation::Finite(target.radius)
            {
                return Err(TrError::ImageEscapes { var });
            }
        }
    }
    let mut comps = Vec::with_capacity(chart.dim());
    for comp in chart.components() {
        let mut out: BTreeMap<Vec<u32>, LaurentApprox> = BTreeMap::new();
        for (k, a) in comp {
            let mut partial: Vec<(Vec<u32>, LaurentApprox)> = vec![(Vec::new(), a.clone())];
            for (i, &ki) in k.iter().enumerate() {
                let factor = power_binomial(&field, &ds[i], &chart.origin()[i], r, ki)?;
                let mut next = Vec::with_capacity(partial.len() * factor.len());
                for (key, coeff) in &partial {
                    for (e, fc) in &factor {
                        let mut nk = key.clone();
                        nk.push(*e);
                        next.push((nk, coeff.checked_mul(fc)?));
                    }
                }
                partial = next;
            }
            for (key, coeff) in partial {
                let slot = out
                    .entry(key)
                    .or_insert_with(|| LaurentApprox::exact_zero(&field));
                *slot = slot.checked_add(&coeff)?;
            }
        }
        comps.push(out);
    }
    SeriesChart::new(
        &field,
        vec![LaurentApprox::exact_zero(&field); m],
        comps,
        domain,
        r * chart.degree_cap(),
    )
}

/// A solution of `t^j ξ x^r = z` with `0 ≤ j < r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preimage {
    pub j: i64,
    pub xi: FqElem,
    pub x: LaurentApprox,
}

/// Solves `t^j ξ(z) x^r = z` by Hensel lifting an `r`-th root of the
/// residue; `x` is correct to relative precision `prec`.
pub fn power_preimage(
    z: &LaurentApprox,
    selector: &CosetSelector,
    prec: i64,
) -> Result<Preimage, TrError> {
    let field = z.field().clone();
    let r = selector.r();
    if r.is_multiple_of(field.p()) {
        return Err(TrError::Inseparable { r, p: field.p() });
    }
    let (v, a) = z.ord_and_ac()?;
    let Valuation::Finite(v) = v else {
        return Err(TrError::ZeroCenter { var: 0 });
    };
    let j = v.rem_euclid(r as i64);
    let ox = (v - j) / r as i64;
    let xi = selector.xi(a).expect("ac of a nonzero element is nonzero");
    let target = field.mul(a, field.inv(xi).expect("nonzero"));
    let x0 = field
        .nonzero_elements()
        .find(|&e| field.pow(e, r as u64) == target)
        .expect("target lies in the r-th powers");
    let u = z
        .shift(-v)
        .scale(field.inv(xi).expect("nonzero"))
        .truncated(prec);
    let mut coeffs = vec![LaurentApprox::exact_zero(&field); r as usize + 1];
    coeffs[0] = u.neg();
    coeffs[r as usize] = LaurentApprox::one(&field);
    let x = hensel_lift(&coeffs, x0, prec)?.shift(ox);
    Ok(Preimage { j, xi, x })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueCoverage {
    pub r: u32,
    pub digits: u32,
    pub total: u64,
    pub covered: u64,
    /// Residues with no preimage, in text form.
    pub missed: Vec<String>,
}

/// Whether every nonzero residue mod `t^digits` is `t^j ξ x^r` for some
/// `0 ≤ j < r`, coset representative `ξ` and `x ∈ F_q((t))`.
pub fn residue_coverage(field: &Field, r: u32, digits: u32) -> Result<ResidueCoverage, TrError> {
    let selector = CosetSelector::new(field, r);
    let count = (field.q() as u64).pow(digits);
    let mut out = ResidueCoverage {
        r,
        digits,
        total: count - 1,
        covered: 0,
        missed: Vec::new(),
    };
    for idx in 1..count {
        let z = PolyT::from_index(field, idx, digits as usize);
        let zl = LaurentApprox::from_poly(&z);
        let pre = power_preimage(&zl, &selector, digits as i64)?;
        let image = pre
            .x
            .pow(r)
            .scale(pre.xi)
            .shift(pre.j);
        let hit = (0..digits as i64).all(|i| image.coeff(i).ok() == Some(z.coeff(i as usize)));
        if hit {
            out.covered += 1;
        } else {
            out.missed.push(z.to_string());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundFailure {
    pub component: usize,
    pub k: Vec<u32>,
    pub ord: i64,
    pub bound: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffBoundVerdict {
    pub r: u32,
    /// Coefficients of total degree `1..=checked_degree` were examined.
    pub checked_degree: u32,
    pub checked: usize,
    pub undecided: usize,
    pub failures: Vec<BoundFailure>,
    pub holds: bool,
}

/// Checks `ord c_k ≥ r·max_{k_j>0} ord b′_j − Σ k_j ord b′_j` for the
/// coefficients `c_k` of the chart expanded around `b′`, `k ≠ 0`.
///
/// With `multidim = false` the chart must be univariate and the bound is
/// `(r − k)·ord b′`, which is the same inequality for `m = 1`.
pub fn check_coeff_bounds(
    chart: &SeriesChart,
    r: u32,
    b: &[LaurentApprox],
    multidim: bool,
) -> Result<CoeffBoundVerdict, TrError> {
    if !multidim && chart.arity() != 1 {
        return Err(TrError::ArityMismatch {
            expected: 1,
            got: chart.arity(),
        });
    }
    let ords: Vec<i64> = b
        .iter()
        .enumerate()
        .map(|(var, bi)| match bi.ord() {
            Ok(Valuation::Finite(v)) => Ok(v),
            _ => Err(TrError::ZeroCenter { var }),
        })
        .collect::<Result<_, _>>()?;
    let moved = chart.recentered(b.to_vec())?;
    let cap = chart.degree_cap();
    let mut v = CoeffBoundVerdict {
        r,
        checked_degree: cap,
        checked: 0,
        undecided: 0,
        failures: Vec::new(),
        holds: true,
    };
    for (ci, comp) in moved.components().iter().enumerate() {
        for k in indices_below(chart.arity(), cap + 1).into_iter().skip(1) {
            let bound = if multidim {
                let worst = k
                    .iter()
                    .zip(&ords)
                    .filter(|(kj, _)| **kj > 0)
                    .map(|(_, o)| *o)
                    .max()
                    .unwrap_or(0);
                r as i64 * worst - k.iter().zip(&ords).map(|(kj, o)| *kj as i64 * o).sum::<i64>()
            } else {
                (r as i64 - k[0] as i64) * ords[0]
            };
            v.checked += 1;
            let Some(c) = comp.get(&k) else {
                continue;
            };
            match (c.val(), c.prec()) {
                (Valuation::Finite(o), p) if Valuation::Finite(o) < p => {
                    if o < bound {
                        v.failures.push(BoundFailure {
                            component: ci,
                            k,
                            ord: o,
                            bound,
                        });
                    }
                }
                (_, Valuation::Finite(p)) if p < bound => v.undecided += 1,
                _ => {}
            }
        }
    }
    v.holds = v.failures.is_empty() && v.undecided == 0;
    Ok(v)
}

/// A seeded univariate chart with `|a_i| ≤ |b|^{1−i}` around `b = t^j ξ b′^r`,
/// precomposed with `x ↦ t^j ξ x^r` on the ball of radius `ord b′ + 1`.
#[derive(Debug, Clone)]
pub struct AdmissibleCase {
    pub base: SeriesChart,
    pub composed: SeriesChart,
    pub b_prime: LaurentApprox,
    pub r: u32,
    pub j: i64,
    pub xi: FqElem,
}

/// With `inject`, the linear coefficient is replaced by one of valuation
/// `−1 − j`, one below what the bound allows.
pub fn admissible_case(
    field: &Field,
    r: u32,
    seed: u64,
    precision: i64,
    inject: bool,
) -> Result<AdmissibleCase, TrError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = field.q();
    let digits = |rng: &mut ChaCha8Rng, len: i64, unit: bool| -> Vec<FqElem> {
        (0..len.max(1))
            .map(|i| {
                let lo = u32::from(unit && i == 0);
                field.elem(rng.gen_range(lo..q)).expect("index below q")
            })
            .collect()
    };
    let selector = CosetSelector::new(field, r);
    let j = rng.gen_range(0..r as i64);
    let xi = selector.reps()[rng.gen_range(0..selector.reps().len())];
    let vb = rng.gen_range(0..=2i64);
    let b_prime = LaurentApprox::new(field, vb, digits(&mut rng, 4, true), Valuation::Infinity);
    let d = LaurentApprox::monomial(field, xi, j);
    let b = d.checked_mul(&b_prime.pow(r))?;
    let ord_b = j + r as i64 * vb;
    let deg = rng.gen_range(2..=4u32);
    let mut coeffs = BTreeMap::new();
    for i in 0..=deg {
        let start = (1 - i as i64) * ord_b + rng.gen_range(0..2);
        let a = LaurentApprox::new(
            field,
            start,
            digits(&mut rng, precision - start, false),
            Valuation::Finite(precision),
        );
        coeffs.insert(vec![i], a);
    }
    if inject {
        let start = -1 - j;
        let a = LaurentApprox::new(
            field,
            start,
            digits(&mut rng, precision - start, true),
            Valuation::Finite(precision),
        );
        coeffs.insert(vec![1], a);
    }
    let base = SeriesChart::new(
        field,
        vec![b.clone()],
        vec![coeffs],
        vec![Ball {
            center: b,
            radius: ord_b + 1,
        }],
        deg,
    )?;
    let composed = power_precompose(
        &base,
        r,
        &[j],
        &[xi],
        vec![Ball {
            center: b_prime.clone(),
            radius: vb + 1,
        }],
    )?;
    Ok(AdmissibleCase {
        base,
        composed,
        b_prime,
        r,
        j,
        xi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trcheck::{check_tr, Status, TrConfig};

    fn f(p: u32) -> Field {
        Field::new(p, 1).unwrap()
    }

    fn c(fl: &Field, n: i64) -> LaurentApprox {
        LaurentApprox::constant(fl, fl.from_int(n))
    }

    fn identity(fl: &Field, ball: Ball) -> SeriesChart {
        SeriesChart::univariate(fl, vec![(1, c(fl, 1))], ball).unwrap()
    }

    #[test]
    fn coset_representatives() {
        let f5 = f(5);
        let s = CosetSelector::new(&f5, 2);
        assert_eq!(s.ell(), 2);
        // Squares mod 5 are {1, 4}; 2 is the smallest non-square.
        let mut reps: Vec<u32> = s.reps().iter().map(|e| e.index()).collect();
        reps.sort();
        assert_eq!(reps, vec![1, 2]);
        assert_eq!(s.xi(f5.from_int(4)), Some(f5.from_int(1)));
        assert_eq!(s.xi(f5.from_int(3)), Some(f5.from_int(2)));
        assert_eq!(s.xi(f5.zero()), None);
        assert_eq!(CosetSelector::new(&f5, 3).reps(), &[f5.one()]);
        let f7 = f(7);
        assert_eq!(CosetSelector::new(&f7, 3).ell(), 3);
        let f9 = Field::new(3, 2).unwrap();
        let s9 = CosetSelector::new(&f9, 4);
        assert_eq!(s9.ell(), 4);
        for a in f9.nonzero_elements() {
            let xi = s9.xi(a).unwrap();
            let ratio = f9.mul(a, f9.inv(xi).unwrap());
            assert!(f9.nonzero_elements().any(|e| f9.pow(e, 4) == ratio));
        }
    }

    #[test]
    fn identity_composed_with_cube() {
        let fl = f(5);
        let unit_ball = Ball { center: c(&fl, 0), radius: 0 };
        let id = identity(&fl, unit_ball.clone());
        let ch = power_precompose(&id, 3, &[0], &[fl.one()], vec![unit_ball]).unwrap();
        let mut expect = BTreeMap::new();
        expect.insert(vec![3], c(&fl, 1));
        assert_eq!(ch.components()[0], expect);
    }

    #[test]
    fn composed_identity_passes_at_its_order() {
        let fl = f(7);
        let target = Ball { center: c(&fl, 0), radius: 0 };
        let id = identity(&fl, target);
        let sel = CosetSelector::new(&fl, 3);
        for j in 0..3 {
            for &xi in sel.reps() {
                let ch = power_precompose(
                    &id,
                    3,
                    &[j],
                    &[xi],
                    vec![Ball { center: c(&fl, 1), radius: 1 }],
                )
                .unwrap();
                let v = check_tr(&ch, 3, &TrConfig::default()).unwrap();
                assert_eq!(v.status, Status::Pass);
                // Equality exactly when the power map has no t-factor.
                assert_eq!(v.equality == v.samples, j == 0);
            }
        }
    }

    #[test]
    fn image_escape_is_reported() {
        let fl = f(5);
        let id = identity(&fl, Ball { center: c(&fl, 1), radius: 2 });
        let err = power_precompose(
            &id,
            2,
            &[0],
            &[fl.one()],
            vec![Ball { center: c(&fl, 1), radius: 1 }],
        );
        assert_eq!(err, Err(TrError::ImageEscapes { var: 0 }));
        let ok = power_precompose(
            &id,
            2,
            &[0],
            &[fl.one()],
            vec![Ball { center: c(&fl, 1), radius: 2 }],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn square_of_identity_meets_its_bound() {
        let fl = f(5);
        // d·x² around b′ = 3t: c_k = d·C(2,k)·b′^{2−k}.
        let b = LaurentApprox::monomial(&fl, fl.from_int(3), 1);
        let id = identity(&fl, Ball { center: c(&fl, 0), radius: 0 });
        let ch = power_precompose(&id, 2, &[0], &[fl.from_int(2)], vec![Ball { center: b.clone(), radius: 2 }]).unwrap();
        let v = check_coeff_bounds(&ch, 2, std::slice::from_ref(&b), false).unwrap();
        assert!(v.holds, "{v:?}");
        let moved = ch.recentered(vec![b.clone()]).unwrap();
        assert_eq!(moved.components()[0][&vec![1]], b.scale(fl.from_int(4)));
        assert_eq!(moved.components()[0][&vec![2]], c(&fl, 2));
    }

    #[test]
    fn product_of_squares_multidim() {
        let fl = f(5);
        let mut table = BTreeMap::new();
        table.insert(vec![1, 1], c(&fl, 1));
        let unit = Ball { center: c(&fl, 0), radius: 0 };
        let prod = SeriesChart::new(
            &fl,
            vec![c(&fl, 0), c(&fl, 0)],
            vec![table],
            vec![unit.clone(), unit],
            2,
        )
        .unwrap();
        let b1 = LaurentApprox::monomial(&fl, fl.one(), 1);
        let b2 = LaurentApprox::monomial(&fl, fl.from_int(2), 3);
        let ch = power_precompose(
            &prod,
            2,
            &[0, 0],
            &[fl.one(), fl.one()],
            vec![Ball { center: b1.clone(), radius: 2 }, Ball { center: b2.clone(), radius: 4 }],
        )
        .unwrap();
        let v = check_coeff_bounds(&ch, 2, &[b1.clone(), b2.clone()], true).unwrap();
        assert!(v.holds, "{v:?}");
        assert_eq!(v.checked, 14);
        // c_{(1,1)} = 4·b₁·b₂ has ord 4 against the bound 2·3 − 1 − 3 = 2.
        let moved = ch.recentered(vec![b1, b2]).unwrap();
        assert_eq!(moved.components()[0][&vec![1, 1]].val(), Valuation::Finite(4));
        assert!(check_coeff_bounds(&ch, 2, &[c(&fl, 1), c(&fl, 1)], false).is_err());
    }

    #[test]
    fn admissible_charts_hold_and_injections_fail() {
        for p in [5, 7] {
            let fl = f(p);
            for seed in 0..6 {
                for r in [2, 3] {
                    let ok = admissible_case(&fl, r, seed, 24, false).unwrap();
                    let v = check_coeff_bounds(&ok.composed, r, std::slice::from_ref(&ok.b_prime), false).unwrap();
                    assert!(v.holds, "p={p} seed={seed} r={r}: {v:?}");
                    let bad = admissible_case(&fl, r, seed, 24, true).unwrap();
                    let v = check_coeff_bounds(&bad.composed, r, std::slice::from_ref(&bad.b_prime), false).unwrap();
                    assert!(!v.holds);
                    assert!(v.failures.iter().any(|f| f.k == vec![1]));
                }
            }
        }
    }

    #[test]
    fn preimages_cover_residues() {
        let fl = f(5);
        for r in [2, 3] {
            let cov = residue_coverage(&fl, r, 3).unwrap();
            assert_eq!(cov.total, 124);
            assert_eq!(cov.covered, cov.total, "{:?}", cov.missed);
        }
        assert_eq!(
            residue_coverage(&fl, 5, 2),
            Err(TrError::Inseparable { r: 5, p: 5 })
        );
    }

    #[test]
    fn preimage_of_a_unit() {
        let fl = f(7);
        let sel = CosetSelector::new(&fl, 2);
        let z = LaurentApprox::new(&fl, 3, vec![fl.from_int(3), fl.one()], Valuation::Infinity);
        let pre = power_preimage(&z, &sel, 10).unwrap();
        assert_eq!(pre.j, 1);
        assert_eq!(pre.x.val(), Valuation::Finite(1));
        let back = pre.x.pow(2).scale(pre.xi).shift(pre.j);
        for i in 3..12 {
            assert_eq!(back.coeff(i).unwrap(), z.coeff(i).unwrap());
        }
    }
}
