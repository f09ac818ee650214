//! Verifier for `T_r`-approximation of explicit maps on boxes in `F_q((t))^m`.
//!
//! A chart is a polynomial map with finite support and possibly truncated
//! Laurent coefficients, expanded around an origin. The support bound
//! `degree_cap` limits the table, not the Taylor order. Taylor sections use
//! Hasse derivatives, so nothing is ever divided by the characteristic.

mod json;
mod power;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{ArithError, Field, FqElem, LaurentApprox, Valuation};

pub use json::{BallJson, ChartJson, CoeffJson, LaurentJson, BUNDLED_CHARTS};
pub use power::{
    admissible_case, check_coeff_bounds, power_precompose, power_preimage, residue_coverage,
    AdmissibleCase, BoundFailure, CoeffBoundVerdict, CosetSelector, Preimage, ResidueCoverage,
};

/// Default working precision in `t`-digits.
pub const DEFAULT_PRECISION: i64 = 24;
/// Digits below the working precision that no decision may rely on.
pub const GUARD: i64 = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrError {
    #[error("expected {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("coefficient of degree {degree} exceeds the degree cap {cap}")]
    BeyondCap { degree: u32, cap: u32 },
    #[error("order r must be at least 1")]
    ZeroOrder,
    #[error("coordinate {var} lies outside the chart domain")]
    OutsideDomain { var: usize },
    #[error("image of coordinate {var} escapes the chart domain")]
    ImageEscapes { var: usize },
    #[error("r = {r} is divisible by the characteristic {p}; r-th roots do not lift")]
    Inseparable { r: u32, p: u32 },
    #[error("coordinate {var} of the expansion point is zero")]
    ZeroCenter { var: usize },
    #[error("chart file: {0}")]
    Json(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `C(n, k) mod p` by Lucas' theorem.
pub fn binom_mod(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while k > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        let (mut num, mut den) = (1u64, 1u64);
        for i in 0..ki {
            num = num * ((ni - i) % p) % p;
            den = den * ((i + 1) % p) % p;
        }
        acc = acc * num % p * pow_mod(den, p - 2, p) % p;
        n /= p;
        k /= p;
    }
    acc
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn binom_elem(field: &Field, n: u32, k: u32) -> FqElem {
    field.from_int(binom_mod(n as u64, k as u64, field.p() as u64) as i64)
}

/// All multi-indices of length `m` with total degree `< bound`, graded.
pub fn indices_below(m: usize, bound: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for d in 0..bound {
        let mut cur = vec![0u32; m];
        fill(&mut cur, 0, d, &mut out);
    }
    out
}

fn fill(cur: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(cur.clone());
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for a in (0..=left).rev() {
        cur[i] = a;
        fill(cur, i + 1, left - a, out);
    }
}

fn total(k: &[u32]) -> u32 {
    k.iter().sum()
}

/// A ball `center + t^radius · F_q[[t]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub center: LaurentApprox,
    pub radius: i64,
}

impl Ball {
    pub fn contains(&self, x: &LaurentApprox) -> Result<bool, ArithError> {
        let d = x.checked_sub(&self.center)?;
        Ok(d.val_lower_bound() >= Valuation::Finite(self.radius))
    }
}

/// `f(x) = Σ_k a_k (x − origin)^k` on a box, one table per output coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesChart {
    field: Field,
    origin: Vec<LaurentApprox>,
    components: Vec<BTreeMap<Vec<u32>, LaurentApprox>>,
    domain: Vec<Ball>,
    degree_cap: u32,
}

impl SeriesChart {
    pub fn new(
        field: &Field,
        origin: Vec<LaurentApprox>,
        components: Vec<BTreeMap<Vec<u32>, LaurentApprox>>,
        domain: Vec<Ball>,
        degree_cap: u32,
    ) -> Result<SeriesChart, TrError> {
        let m = origin.len();
        if domain.len() != m {
            return Err(TrError::ArityMismatch {
                expected: m,
                got: domain.len(),
            });
        }
        for comp in &components {
            for (k, a) in comp {
                if k.len() != m {
                    return Err(TrError::ArityMismatch {
                        expected: m,
                        got: k.len(),
                    });
                }
                if total(k) > degree_cap {
                    return Err(TrError::BeyondCap {
                        degree: total(k),
                        cap: degree_cap,
                    });
                }
                crate::arith::check_same(field, a.field())?;
            }
        }
        let components = components
            .into_iter()
            .map(|c| c.into_iter().filter(|(_, a)| !a.is_exact_zero()).collect())
            .collect();
        Ok(SeriesChart {
            field: field.clone(),
            origin,
            components,
            domain,
            degree_cap,
        })
    }

    /// `x ↦ Σ a_k x^k` on one ball, origin zero.
    pub fn univariate(
        field: &Field,
        coeffs: Vec<(u32, LaurentApprox)>,
        domain: Ball,
    ) -> Result<SeriesChart, TrError> {
        let cap = coeffs.iter().map(|(k, _)| *k).max().unwrap_or(0);
        let table = coeffs.into_iter().map(|(k, a)| (vec![k], a)).collect();
        SeriesChart::new(
            field,
            vec![LaurentApprox::exact_zero(field)],
            vec![table],
            vec![domain],
            cap,
        )
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn arity(&self) -> usize {
        self.origin.len()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn origin(&self) -> &[LaurentApprox] {
        &self.origin
    }

    pub fn components(&self) -> &[BTreeMap<Vec<u32>, LaurentApprox>] {
        &self.components
    }

    pub fn domain(&self) -> &[Ball] {
        &self.domain
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    fn check_arity(&self, x: &[LaurentApprox]) -> Result<(), TrError> {
        if x.len() != self.arity() {
            return Err(TrError::ArityMismatch {
                expected: self.arity(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn in_domain(&self, x: &[LaurentApprox]) -> Result<(), TrError> {
        self.check_arity(x)?;
        for (var, (b, xi)) in self.domain.iter().zip(x).enumerate() {
            if !b.contains(xi)? {
                return Err(TrError::OutsideDomain { var });
            }
        }
        Ok(())
    }

    /// `(x_i − origin_i)^e` for `e ≤ cap`.
    fn shifted_powers(&self, x: &[LaurentApprox]) -> Result<Vec<Vec<LaurentApprox>>, TrError> {
        self.check_arity(x)?;
        x.iter()
            .zip(&self.origin)
            .map(|(xi, ci)| {
                let h = xi.checked_sub(ci)?;
                let mut v = vec![LaurentApprox::one(&self.field)];
                for e in 1..=self.degree_cap as usize {
                    let next = v[e - 1].checked_mul(&h)?;
                    v.push(next);
                }
                Ok(v)
            })
            .collect()
    }

    pub fn eval(&self, x: &[LaurentApprox]) -> Result<Vec<LaurentApprox>, TrError> {
        let pw = self.shifted_powers(x)?;
        self.components
            .iter()
            .map(|comp| {
                let mut acc = LaurentApprox::exact_zero(&self.field);
                for (k, a) in comp {
                    let mut term = a.clone();
                    for (i, &e) in k.iter().enumerate() {
                        term = term.checked_mul(&pw[i][e as usize])?;
                    }
                    acc = acc.checked_add(&term)?;
                }
                Ok(acc)
            })
            .collect()
    }

    /// Hasse derivative `D^k f(y)`, one value per output coordinate.
    pub fn hasse(&self, y: &[LaurentApprox], k: &[u32]) -> Result<Vec<LaurentApprox>, TrError> {
        if k.len() != self.arity() {
            return Err(TrError::ArityMismatch {
                expected: self.arity(),
                got: k.len(),
            });
        }
        let pw = self.shifted_powers(y)?;
        self.components
            .iter()
            .map(|comp| {
                let mut acc = LaurentApprox::exact_zero(&self.field);
                for (j, a) in comp {
                    if j.iter().zip(k).any(|(ji, ki)| ji < ki) {
                        continue;
                    }
                    let mut term = a.clone();
                    for (i, (&ji, &ki)) in j.iter().zip(k).enumerate() {
                        let b = binom_elem(&self.field, ji, ki);
                        term = term.checked_mul(&pw[i][(ji - ki) as usize])?.scale(b);
                    }
                    acc = acc.checked_add(&term)?;
                }
                Ok(acc)
            })
            .collect()
    }

    /// The same map expanded around a new origin; the domain is kept.
    pub fn recentered(&self, origin: Vec<LaurentApprox>) -> Result<SeriesChart, TrError> {
        self.check_arity(&origin)?;
        let ks = indices_below(self.arity(), self.degree_cap + 1);
        let mut comps = vec![BTreeMap::new(); self.dim()];
        for k in ks {
            for (c, v) in self.hasse(&origin, &k)?.into_iter().enumerate() {
                comps[c].insert(k.clone(), v);
            }
        }
        SeriesChart::new(&self.field, origin, comps, self.domain.clone(), self.degree_cap)
    }
}

/// `T^{<r}_{f,y}(x) = Σ_{|k|<r} D^k f(y) (x − y)^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaylorSection {
    pub r: u32,
    pub center: Vec<LaurentApprox>,
    /// Per output coordinate, `(k, D^k f(y))` in graded order.
    pub terms: Vec<Vec<(Vec<u32>, LaurentApprox)>>,
}

impl TaylorSection {
    pub fn eval(&self, x: &[LaurentApprox]) -> Result<Vec<LaurentApprox>, TrError> {
        if x.len() != self.center.len() {
            return Err(TrError::ArityMismatch {
                expected: self.center.len(),
                got: x.len(),
            });
        }
        let field = x.first().map(|v| v.field().clone());
        let hs: Vec<LaurentApprox> = x
            .iter()
            .zip(&self.center)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<_, _>>()?;
        self.terms
            .iter()
            .map(|terms| {
                let mut acc = match (&field, terms.first()) {
                    (Some(f), _) => LaurentApprox::exact_zero(f),
                    (None, Some((_, a))) => LaurentApprox::exact_zero(a.field()),
                    (None, None) => return Err(TrError::ArityMismatch { expected: 1, got: 0 }),
                };
                for (k, a) in terms {
                    let mut term = a.clone();
                    for (h, &e) in hs.iter().zip(k) {
                        term = term.checked_mul(&h.pow(e))?;
                    }
                    acc = acc.checked_add(&term)?;
                }
                Ok(acc)
            })
            .collect()
    }
}

pub fn taylor_section(
    chart: &SeriesChart,
    y: &[LaurentApprox],
    r: u32,
) -> Result<TaylorSection, TrError> {
    if r == 0 {
        return Err(TrError::ZeroOrder);
    }
    chart.in_domain(y)?;
    let mut terms = vec![Vec::new(); chart.dim()];
    for k in indices_below(chart.arity(), r) {
        for (c, v) in chart.hasse(y, &k)?.into_iter().enumerate() {
            if !v.is_exact_zero() {
                terms[c].push((k.clone(), v));
            }
        }
    }
    Ok(TaylorSection {
        r,
        center: y.to_vec(),
        terms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrConfig {
    pub precision: i64,
    pub guard: i64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for TrConfig {
    fn default() -> TrConfig {
        TrConfig {
            precision: DEFAULT_PRECISION,
            guard: GUARD,
            samples: 200,
            seed: 0,
        }
    }
}

/// A pair `(x, y)` in the domain with `ord(x − y) = dist` in the sup norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub x: Vec<LaurentApprox>,
    pub y: Vec<LaurentApprox>,
    pub dist: i64,
}

/// Sampled distances: from the coarsest domain radius up to the largest `d`
/// with `r·d` clear of the guard band. `None` when that range is empty.
pub fn strata(chart: &SeriesChart, r: u32, cfg: &TrConfig) -> Option<(i64, i64)> {
    let lo = chart.domain().iter().map(|b| b.radius).max().unwrap_or(0);
    let hi = (cfg.precision - cfg.guard).div_euclid(r.max(1) as i64);
    (lo <= hi).then_some((lo, hi))
}

fn random_digits(rng: &mut ChaCha8Rng, field: &Field, len: usize, unit: bool) -> Vec<FqElem> {
    let q = field.q();
    (0..len)
        .map(|i| {
            let lo = if unit && i == 0 { 1 } else { 0 };
            field.elem(rng.gen_range(lo..q)).expect("index below q")
        })
        .collect()
}

/// Stratified pairs, cycling through the strata; deterministic in the seed.
pub fn sample_pairs(chart: &SeriesChart, r: u32, cfg: &TrConfig) -> Vec<Sample> {
    let Some((lo, hi)) = strata(chart, r, cfg) else {
        return Vec::new();
    };
    let field = chart.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((r as u64) << 48));
    let width = (hi - lo + 1) as usize;
    let m = chart.arity();
    (0..cfg.samples)
        .map(|s| {
            let dist = lo + (s % width) as i64;
            let y: Vec<LaurentApprox> = chart
                .domain()
                .iter()
                .map(|b| {
                    let len = (cfg.precision - b.radius).max(1) as usize;
                    let digits = random_digits(&mut rng, &field, len, false);
                    let off = LaurentApprox::new(&field, b.radius, digits, Valuation::Infinity);
                    b.center.known_part().checked_add(&off).expect("same field")
                })
                .collect();
            let exact = rng.gen_range(0..m.max(1));
            let len = (cfg.precision - dist).max(1) as usize;
            let x = y
                .iter()
                .enumerate()
                .map(|(i, yi)| {
                    let digits = random_digits(&mut rng, &field, len, i == exact);
                    let h = LaurentApprox::new(&field, dist, digits, Valuation::Infinity);
                    yi.checked_add(&h).expect("same field")
                })
                .collect();
            Sample { x, y, dist }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub component: usize,
    /// `ord_t(f(x) − T(x))`.
    pub ord: i64,
    /// `r · ord_t(x − y)`.
    pub bound: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrVerdict {
    pub r: u32,
    pub samples: usize,
    pub strata: Option<(i64, i64)>,
    pub passed: usize,
    /// Passing samples where the inequality is an equality.
    pub equality: usize,
    /// Passing samples where `f − T` vanishes exactly.
    pub exact: usize,
    pub inconclusive: usize,
    /// Samples whose value `f(y)` is not integral.
    pub nonintegral: usize,
    pub violations: Vec<Violation>,
    pub status: Status,
}

/// Adds `unit · (x − y)^k` to one coordinate of every Taylor section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perturbation {
    pub component: usize,
    pub k: Vec<u32>,
    pub unit: FqElem,
}

enum Outcome {
    Pass { equal: bool, exact: bool },
    Fail(Violation),
    Inconclusive,
}

fn judge(
    chart: &SeriesChart,
    r: u32,
    s: &Sample,
    cfg: &TrConfig,
    perturb: Option<&Perturbation>,
) -> Result<(Outcome, bool), TrError> {
    let mut sec = taylor_section(chart, &s.y, r)?;
    if let Some(p) = perturb {
        let unit = LaurentApprox::constant(chart.field(), p.unit);
        let terms = &mut sec.terms[p.component];
        match terms.iter_mut().find(|(k, _)| *k == p.k) {
            Some((_, a)) => *a = a.checked_add(&unit)?,
            None => terms.push((p.k.clone(), unit)),
        }
    }
    let fx = chart.eval(&s.x)?;
    let tx = sec.eval(&s.x)?;
    let integral = chart.eval(&s.y)?.iter().all(LaurentApprox::is_integral);
    let need = r as i64 * s.dist;
    let mut equal = false;
    let mut exact = true;
    let mut undecided = false;
    for (c, (a, b)) in fx.iter().zip(&tx).enumerate() {
        let diff = a.checked_sub(b)?;
        let decided_ord = match (diff.val(), diff.prec()) {
            (Valuation::Finite(v), Valuation::Infinity) => Some(v),
            (Valuation::Infinity, Valuation::Infinity) => None,
            (v, Valuation::Finite(p)) => {
                if p - cfg.guard < need {
                    undecided = true;
                    exact = false;
                    continue;
                }
                // Digits below `need` are all known.
                match v {
                    Valuation::Finite(v) if v < need => Some(v),
                    _ => {
                        exact = false;
                        continue;
                    }
                }
            }
        };
        match decided_ord {
            Some(v) if v < need => {
                let fmt = |p: &[LaurentApprox]| p.iter().map(|v| v.to_string()).collect();
                return Ok((
                    Outcome::Fail(Violation {
                        x: fmt(&s.x),
                        y: fmt(&s.y),
                        component: c,
                        ord: v,
                        bound: need,
                    }),
                    integral,
                ));
            }
            Some(v) => {
                exact = false;
                equal |= v == need;
            }
            None => {}
        }
    }
    let outcome = if undecided {
        Outcome::Inconclusive
    } else {
        Outcome::Pass { equal, exact }
    };
    Ok((outcome, integral))
}

/// Checks `ord(f(x) − T^{<r}_{f,y}(x)) ≥ r·ord(x − y)` on given samples.
pub fn check_tr_on(
    chart: &SeriesChart,
    r: u32,
    samples: &[Sample],
    cfg: &TrConfig,
    perturb: Option<&Perturbation>,
) -> Result<TrVerdict, TrError> {
    if r == 0 {
        return Err(TrError::ZeroOrder);
    }
    let outcomes: Vec<(Outcome, bool)> = samples
        .par_iter()
        .map(|s| judge(chart, r, s, cfg, perturb))
        .collect::<Result<_, _>>()?;
    let mut v = TrVerdict {
        r,
        samples: samples.len(),
        strata: strata(chart, r, cfg),
        passed: 0,
        equality: 0,
        exact: 0,
        inconclusive: 0,
        nonintegral: 0,
        violations: Vec::new(),
        status: Status::Pass,
    };
    for (o, integral) in outcomes {
        v.nonintegral += usize::from(!integral);
        match o {
            Outcome::Pass { equal, exact } => {
                v.passed += 1;
                v.equality += usize::from(equal);
                v.exact += usize::from(exact);
            }
            Outcome::Fail(viol) => v.violations.push(viol),
            Outcome::Inconclusive => v.inconclusive += 1,
        }
    }
    v.status = if !v.violations.is_empty() {
        Status::Fail
    } else if v.inconclusive > 0 || v.samples == 0 {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    Ok(v)
}

pub fn check_tr(chart: &SeriesChart, r: u32, cfg: &TrConfig) -> Result<TrVerdict, TrError> {
    if r == 0 {
        return Err(TrError::ZeroOrder);
    }
    let samples = sample_pairs(chart, r, cfg);
    check_tr_on(chart, r, &samples, cfg, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u32) -> Field {
        Field::new(p, 1).unwrap()
    }

    fn c(fl: &Field, n: i64) -> LaurentApprox {
        LaurentApprox::constant(fl, fl.from_int(n))
    }

    fn mono(fl: &Field, n: i64, k: i64) -> LaurentApprox {
        LaurentApprox::monomial(fl, fl.from_int(n), k)
    }

    /// `coeff · t^shift · x^deg` on `1 + tF_q[[t]]`.
    fn power_chart(fl: &Field, deg: u32, shift: i64) -> SeriesChart {
        SeriesChart::univariate(
            fl,
            vec![(deg, mono(fl, 1, shift))],
            Ball {
                center: c(fl, 1),
                radius: 1,
            },
        )
        .unwrap()
    }

    #[test]
    fn lucas_binomials() {
        assert_eq!(binom_mod(5, 2, 7), 3);
        assert_eq!(binom_mod(3, 1, 3), 0);
        assert_eq!(binom_mod(10, 3, 3), 120 % 3);
        assert_eq!(binom_mod(25, 5, 5), 0);
        assert_eq!(binom_mod(4, 7, 5), 0);
        for n in 0..30u64 {
            for k in 0..=n {
                let exact = (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128);
                assert_eq!(binom_mod(n, k, 7) as u128, exact % 7);
            }
        }
    }

    #[test]
    fn multi_indices() {
        assert_eq!(
            indices_below(2, 3),
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
        assert_eq!(indices_below(1, 3).len(), 3);
        assert_eq!(indices_below(3, 4).len(), 20);
    }

    #[test]
    fn quadratic_taylor() {
        let fl = f(5);
        let ch = power_chart(&fl, 2, 0);
        let y = vec![LaurentApprox::new(&fl, 0, vec![fl.from_int(1), fl.from_int(3)], Valuation::Infinity)];
        let sec = taylor_section(&ch, &y, 2).unwrap();
        // y² + 2y(x − y)
        let y2 = y[0].pow(2);
        let two_y = y[0].scale(fl.from_int(2));
        assert_eq!(sec.terms[0], vec![(vec![0], y2), (vec![1], two_y)]);
    }

    #[test]
    fn frobenius_cube() {
        let fl = f(3);
        let ch = power_chart(&fl, 3, 0);
        let one = vec![c(&fl, 1)];
        let sec = taylor_section(&ch, &one, 3).unwrap();
        assert_eq!(sec.terms[0], vec![(vec![0], c(&fl, 1))]);
        let x = vec![LaurentApprox::new(&fl, 0, vec![fl.from_int(1), fl.from_int(2)], Valuation::Infinity)];
        let diff = ch.eval(&x).unwrap()[0].checked_sub(&sec.eval(&x).unwrap()[0]).unwrap();
        assert_eq!(diff, x[0].checked_sub(&one[0]).unwrap().pow(3));
    }

    #[test]
    fn constant_chart_sections() {
        let fl = f(5);
        let ch = power_chart(&fl, 0, 2);
        let y = vec![c(&fl, 1)];
        for r in 1..=6 {
            let sec = taylor_section(&ch, &y, r).unwrap();
            assert_eq!(sec.terms[0], vec![(vec![0], mono(&fl, 1, 2))]);
        }
        assert_eq!(taylor_section(&ch, &[c(&fl, 2)], 1), Err(TrError::OutsideDomain { var: 0 }));
    }

    #[test]
    fn x_squared_passes_with_equality() {
        let fl = f(5);
        let cfg = TrConfig::default();
        let v = check_tr(&power_chart(&fl, 2, 0), 2, &cfg).unwrap();
        assert_eq!(v.status, Status::Pass);
        assert_eq!(v.equality, v.samples);
        assert_eq!(v.strata, Some((1, 10)));
    }

    #[test]
    fn x_cubed_passes_at_two() {
        let fl = f(5);
        let v = check_tr(&power_chart(&fl, 3, 0), 2, &TrConfig::default()).unwrap();
        assert_eq!(v.status, Status::Pass);
        let v3 = check_tr(&power_chart(&fl, 3, 0), 3, &TrConfig::default()).unwrap();
        assert_eq!((v3.status, v3.equality), (Status::Pass, v3.samples));
    }

    #[test]
    fn scaled_square_fails() {
        let fl = f(5);
        let v = check_tr(&power_chart(&fl, 2, -1), 2, &TrConfig::default()).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.violations.len(), v.samples);
        assert!(v.violations.iter().all(|w| w.ord == w.bound - 1));
        assert_eq!(v.nonintegral, v.samples);
    }

    #[test]
    fn oversized_order_is_inconclusive() {
        let fl = f(5);
        let ch = power_chart(&fl, 30, 0);
        let v = check_tr(&ch, 30, &TrConfig::default()).unwrap();
        assert_eq!((v.status, v.samples), (Status::Inconclusive, 0));
    }

    #[test]
    fn polynomial_below_order_is_its_own_section() {
        let fl = f(7);
        let ch = SeriesChart::univariate(
            &fl,
            vec![(0, mono(&fl, 3, -2)), (1, c(&fl, 1)), (2, mono(&fl, 2, 1))],
            Ball {
                center: c(&fl, 0),
                radius: 0,
            },
        )
        .unwrap();
        let v = check_tr(&ch, 3, &TrConfig::default()).unwrap();
        assert_eq!((v.status, v.exact), (Status::Pass, v.samples));
    }

    #[test]
    fn imprecise_coefficients_are_not_passed() {
        let fl = f(5);
        // x² + O(t^6): nothing can be decided past six digits.
        let coeff = LaurentApprox::new(&fl, 0, vec![fl.one()], Valuation::Finite(6));
        let ch = SeriesChart::univariate(&fl, vec![(2, coeff)], Ball { center: c(&fl, 1), radius: 1 }).unwrap();
        let v = check_tr(&ch, 2, &TrConfig::default()).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        assert!(v.passed > 0 && v.inconclusive > 0);
    }

    #[test]
    fn recentering_preserves_values() {
        let fl = f(5);
        let ch = SeriesChart::univariate(
            &fl,
            vec![(1, mono(&fl, 2, 0)), (3, mono(&fl, 1, 1))],
            Ball { center: c(&fl, 0), radius: 0 },
        )
        .unwrap();
        let moved = ch.recentered(vec![c(&fl, 3)]).unwrap();
        for k in 0..6 {
            let x = vec![mono(&fl, k + 1, k)];
            assert_eq!(ch.eval(&x).unwrap(), moved.eval(&x).unwrap());
        }
    }

    #[test]
    fn two_variable_chart() {
        let fl = f(5);
        let mut table = BTreeMap::new();
        table.insert(vec![1, 1], c(&fl, 1));
        let ball = Ball { center: c(&fl, 1), radius: 1 };
        let ch = SeriesChart::new(
            &fl,
            vec![c(&fl, 0), c(&fl, 0)],
            vec![table],
            vec![ball.clone(), ball],
            2,
        )
        .unwrap();
        let v = check_tr(&ch, 2, &TrConfig::default()).unwrap();
        assert_eq!(v.status, Status::Pass);
        // (x₁−y₁)(x₂−y₂) sits exactly at the bound only when both differ at depth d.
        assert!(v.equality > 0 && v.equality < v.samples);
    }

    #[test]
    fn nesting_on_shared_samples() {
        let fl = f(7);
        let cfg = TrConfig { samples: 60, ..TrConfig::default() };
        for (deg, shift) in [(2, 0), (3, 0), (4, 1), (3, -1)] {
            let ch = power_chart(&fl, deg, shift);
            for r in 1..deg {
                let samples = sample_pairs(&ch, r + 1, &cfg);
                let hi = check_tr_on(&ch, r + 1, &samples, &cfg, None).unwrap();
                let lo = check_tr_on(&ch, r, &samples, &cfg, None).unwrap();
                if hi.status == Status::Pass {
                    assert_eq!(lo.status, Status::Pass);
                }
            }
        }
    }

    #[test]
    fn perturbed_sections_fail() {
        let fl = f(5);
        let cfg = TrConfig { samples: 30, ..TrConfig::default() };
        for deg in 2..=4 {
            let ch = power_chart(&fl, deg, 0);
            let samples = sample_pairs(&ch, 2, &cfg);
            for k in 0..2 {
                let p = Perturbation { component: 0, k: vec![k], unit: fl.from_int(3) };
                let v = check_tr_on(&ch, 2, &samples, &cfg, Some(&p)).unwrap();
                assert_eq!(v.status, Status::Fail);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let fl = f(5);
        let ch = power_chart(&fl, 3, 0);
        let cfg = TrConfig { seed: 9, ..TrConfig::default() };
        assert_eq!(sample_pairs(&ch, 2, &cfg), sample_pairs(&ch, 2, &cfg));
        for s in sample_pairs(&ch, 2, &cfg) {
            let d = s.x[0].checked_sub(&s.y[0]).unwrap();
            assert_eq!(d.val(), Valuation::Finite(s.dist));
            ch.in_domain(&s.x).unwrap();
            ch.in_domain(&s.y).unwrap();
        }
    }

    proptest! {
        #[test]
        fn hasse_matches_coefficients_at_origin(coeffs in proptest::collection::vec(0i64..7, 1..6)) {
            let fl = f(7);
            let terms = coeffs.iter().enumerate().map(|(k, &a)| (k as u32, c(&fl, a))).collect();
            let ch = SeriesChart::univariate(&fl, terms, Ball { center: c(&fl, 0), radius: 0 }).unwrap();
            let zero = vec![c(&fl, 0)];
            for (k, &a) in coeffs.iter().enumerate() {
                prop_assert_eq!(ch.hasse(&zero, &[k as u32]).unwrap()[0].clone(), c(&fl, a));
            }
        }
    }
}
