//! Exponent sets `Λ_m(k)`, their counts, and the cover parameters `μ, r, V, e`.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinatError {
    #[error("need 1 <= m < n, got n = {n}, m = {m}")]
    BadDimensions { n: u32, m: u32 },
    #[error("hypersurface degree must be at least 1")]
    BadDegree,
    #[error("value overflows 128-bit arithmetic")]
    Overflow,
}

/// A multi-index `α ∈ N^m` with cached total degree `|α|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponent {
    entries: Vec<u32>,
    degree: u32,
}

impl Exponent {
    pub fn new(entries: Vec<u32>) -> Exponent {
        let degree = entries.iter().sum();
        Exponent { entries, degree }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.entries[i]
    }

    /// Componentwise `self >= other`, i.e. `x^other` divides `x^self`.
    pub fn divisible_by(&self, other: &Exponent) -> bool {
        self.len() == other.len() && self.entries.iter().zip(&other.entries).all(|(a, b)| a >= b)
    }

    pub fn plus(&self, other: &Exponent) -> Exponent {
        Exponent::new(self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

/// All `α ∈ N^m` with `|α| = k`, ascending in the Salberger order.
///
/// Within one degree that order puts larger leading entries first, so the
/// list runs `(k,0,…), (k−1,1,…), …, (…,0,k)`.
pub fn lambda_enumerate(m: usize, k: u32) -> Vec<Exponent> {
    fn rec(m: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if m == 1 {
            prefix.push(k);
            out.push(Exponent::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=k).rev() {
            prefix.push(first);
            rec(m - 1, k - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        if k == 0 {
            out.push(Exponent::new(Vec::new()));
        }
        return out;
    }
    rec(m, k, &mut Vec::with_capacity(m), &mut out);
    out
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `L_m(k) = #Λ_m(k)`.
pub fn l_count(m: u32, k: u32) -> u128 {
    if m == 0 {
        return u128::from(k == 0);
    }
    binomial(k as u64 + m as u64 - 1, m as u64 - 1)
}

/// `D_m(k) = #{α ∈ N^m : |α| ≤ k}`.
pub fn d_count(m: u32, k: u32) -> u128 {
    binomial(k as u64 + m as u64, m as u64)
}

/// `(L_m(k), D_m(k))`.
pub fn counts(m: u32, k: u32) -> (u128, u128) {
    (l_count(m, k), d_count(m, k))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverParams {
    pub n: u32,
    pub m: u32,
    pub d: u32,
    pub mu: u128,
    pub r: u128,
    pub v: u128,
    pub e: u128,
}

fn d_count_wide(m: u32, k: u128) -> Result<u128, CombinatError> {
    let k = u64::try_from(k).map_err(|_| CombinatError::Overflow)?;
    Ok(binomial(k + m as u64, m as u64))
}

pub fn cover_params(n: u32, m: u32, d: u32) -> Result<CoverParams, CombinatError> {
    if m < 1 || m >= n {
        return Err(CombinatError::BadDimensions { n, m });
    }
    if d < 1 {
        return Err(CombinatError::BadDegree);
    }
    let mu = d_count(n, d);
    // Minimal r with D_m(r-1) <= mu < D_m(r); D_m is increasing so this is
    // the least r with D_m(r) > mu.
    let r = if m == 1 {
        mu
    } else {
        let (mut lo, mut hi) = (1u128, 1u128);
        while d_count_wide(m, hi)? <= mu {
            hi *= 2;
        }
        while lo < hi {
            let mid = (lo + hi) / 2;
            if d_count_wide(m, mid)? > mu {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    };
    let v = (0..=d).map(|k| k as u128 * l_count(n, k)).sum();
    let e = if m == 1 {
        // Σ_{k<μ} k = μ(μ−1)/2 and the remainder term vanishes.
        mu * (mu - 1) / 2
    } else {
        let r32 = u32::try_from(r).map_err(|_| CombinatError::Overflow)?;
        (1..r32).map(|k| k as u128 * l_count(m, k)).sum::<u128>() + r * (mu - d_count(m, r32 - 1))
    };
    Ok(CoverParams { n, m, d, mu, r, v, e })
}

impl CoverParams {
    /// Re-derives every field from `(n, m, d)` with direct summation.
    pub fn check(&self) -> bool {
        let mu = d_count(self.n, self.d);
        let r_ok = self.r >= 1
            && d_count_wide(self.m, self.r - 1).is_ok_and(|lo| lo <= mu)
            && d_count_wide(self.m, self.r).is_ok_and(|hi| mu < hi);
        let v = (0..=self.d).map(|k| k as u128 * l_count(self.n, k)).sum::<u128>();
        let e = {
            // Sum of degrees of the μ Salberger-smallest monomials in m
            // variables, counted degree by degree.
            let mut left = mu;
            let mut acc = 0u128;
            let mut k = 0u32;
            while left > 0 {
                let take = l_count(self.m, k).min(left);
                acc += take * k as u128;
                left -= take;
                k += 1;
            }
            acc
        };
        self.mu == mu && r_ok && self.v == v && self.e == e
    }

    /// `mV/e` as an exact fraction.
    pub fn mv_over_e(&self) -> Ratio<u128> {
        Ratio::new(self.m as u128 * self.v, self.e)
    }
}

/// `α = nm/((m−1)(n−m))` for `m > 1`, `n/(n−1)` for `m = 1`.
pub fn covering_exponent_alpha(n: u32, m: u32) -> Result<Ratio<i128>, CombinatError> {
    if m < 1 || m >= n {
        return Err(CombinatError::BadDimensions { n, m });
    }
    let (n, m) = (n as i128, m as i128);
    Ok(if m == 1 {
        Ratio::new(n, n - 1)
    } else {
        Ratio::new(n * m, (m - 1) * (n - m))
    })
}

/// `n² · q^{⌈n/δ⌉}` with the constant left symbolic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MainBound {
    pub n_squared: u128,
    pub q_exponent: u32,
    /// `n² q^{⌈n/δ⌉}`; the bound is `C` times this.
    pub shape_value: u128,
    pub constant: &'static str,
}

/// `q^m · H^{mV/e}` kept as base and rational exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverCount {
    pub q_pow_m: u128,
    pub h: u128,
    pub h_exponent: String,
    /// `log_q` of the count, for reporting only.
    pub log_q_value: f64,
    /// `ln((μ!)^{m/e})`, the extra factor of the characteristic-zero count.
    pub ln_factorial_factor: f64,
    pub params: CoverParams,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRecord {
    pub q: u32,
    pub n: u32,
    pub delta: u32,
    pub d: u32,
    pub m: u32,
    pub trivial_exponent: u64,
    pub naive_degree: u64,
    pub main_bound: MainBound,
    pub cover_count_poschar: Option<CoverCount>,
    pub alpha: Option<String>,
}

pub fn ceil_div(a: u32, b: u32) -> u32 {
    a.div_ceil(b)
}

fn ratio_text<T: fmt::Display + Clone + num_integer::Integer>(r: &Ratio<T>) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Closed-form bounds for the parameters `(q, n, δ, d, m, H)`.
///
/// `n` plays two roles here, exactly as in the bounds themselves: degree
/// bound of the counted points and ambient dimension of the covering count.
pub fn bound_formulas(
    q: u32,
    n: u32,
    delta: u32,
    d: u32,
    m: u32,
    h: u128,
) -> Result<BoundRecord, CombinatError> {
    if delta == 0 {
        return Err(CombinatError::BadDegree);
    }
    let q_exponent = ceil_div(n, delta);
    let n_squared = n as u128 * n as u128;
    let shape_value = (q as u128)
        .checked_pow(q_exponent)
        .and_then(|v| v.checked_mul(n_squared))
        .ok_or(CombinatError::Overflow)?;
    let cover = if m >= 1 && m < n && d >= 1 {
        let params = cover_params(n, m, d)?;
        let expo = params.mv_over_e();
        let expo_f = *expo.numer() as f64 / *expo.denom() as f64;
        let lnq = (q as f64).ln();
        let ln_fact: f64 = (2..=params.mu).map(|k| (k as f64).ln()).sum::<f64>();
        Some(CoverCount {
            q_pow_m: (q as u128).checked_pow(m).ok_or(CombinatError::Overflow)?,
            h,
            h_exponent: ratio_text(&expo),
            log_q_value: m as f64 + expo_f * (h as f64).ln() / lnq,
            ln_factorial_factor: ln_fact * m as f64 / params.e as f64,
            params,
        })
    } else {
        None
    };
    Ok(BoundRecord {
        q,
        n,
        delta,
        d,
        m,
        trivial_exponent: n as u64 * d as u64,
        naive_degree: delta as u64 * m as u64 * (d as u64 + 1),
        main_bound: MainBound {
            n_squared,
            q_exponent,
            shape_value,
            constant: "C",
        },
        cover_count_poschar: cover,
        alpha: covering_exponent_alpha(n, m).ok().map(|a| ratio_text(&a)),
    })
}

/// First `d` in `1..=d_max` with `mV/e < 1/10`.
pub fn first_small_ratio(n: u32, m: u32, d_max: u32) -> Result<Option<u32>, CombinatError> {
    let tenth = Ratio::new(1u128, 10);
    for d in 1..=d_max {
        if cover_params(n, m, d)?.mv_over_e() < tenth {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_lambda(m: usize, k: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let total = (k as usize + 1).pow(m as u32);
        for mut idx in 0..total {
            let mut v = Vec::with_capacity(m);
            for _ in 0..m {
                v.push((idx % (k as usize + 1)) as u32);
                idx /= k as usize + 1;
            }
            if v.iter().sum::<u32>() == k {
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn lambda_examples() {
        let l = lambda_enumerate(2, 3);
        let got: Vec<_> = l.iter().map(|e| e.entries().to_vec()).collect();
        assert_eq!(got, vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]);
        assert_eq!(lambda_enumerate(1, 7).len(), 1);
        assert_eq!(lambda_enumerate(3, 2).len(), brute_lambda(3, 2).len());
        assert_eq!(lambda_enumerate(3, 2).len(), 6);
        assert!(lambda_enumerate(0, 3).is_empty());
    }

    #[test]
    fn count_examples() {
        assert_eq!(counts(2, 2), (3, 6));
        assert_eq!(counts(3, 1), (3, 4));
        let direct_d: usize = (0..=10).map(|k| brute_lambda(2, k).len()).sum();
        assert_eq!(counts(2, 10), (brute_lambda(2, 10).len() as u128, direct_d as u128));
        assert_eq!(counts(2, 10), (11, 66));
    }

    #[test]
    fn cover_param_examples() {
        let p = cover_params(2, 1, 3).unwrap();
        assert_eq!((p.mu, p.r, p.v, p.e), (10, 10, 20, 45));
        // V = Σ_{k≤3} k(k+1)
        assert_eq!(p.v, (0..=3u128).map(|k| k * (k + 1)).sum::<u128>());
        let p = cover_params(2, 1, 1).unwrap();
        assert_eq!((p.mu, p.r, p.v, p.e), (3, 3, 2, 3));
        let p = cover_params(3, 2, 1).unwrap();
        assert_eq!((p.mu, p.r, p.v, p.e), (4, 2, 3, 4));
        assert!(p.check());
        assert_eq!(
            cover_params(2, 2, 1),
            Err(CombinatError::BadDimensions { n: 2, m: 2 })
        );
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(covering_exponent_alpha(2, 1).unwrap(), Ratio::from_integer(2));
        // nm = 6 over (m-1)(n-m) = 1.
        assert_eq!(covering_exponent_alpha(3, 2).unwrap(), Ratio::from_integer(6));
        assert_eq!(covering_exponent_alpha(4, 2).unwrap(), Ratio::from_integer(4));
        assert_eq!(covering_exponent_alpha(4, 1).unwrap(), Ratio::new(4, 3));
        assert!(covering_exponent_alpha(3, 3).is_err());
    }

    #[test]
    fn bound_examples() {
        assert_eq!(bound_formulas(5, 2, 3, 1, 2, 1).unwrap().naive_degree, 12);
        let b = bound_formulas(5, 4, 3, 1, 1, 25).unwrap();
        assert_eq!(b.main_bound.q_exponent, 2);
        assert_eq!(b.main_bound.n_squared, 16);
        assert_eq!(b.main_bound.shape_value, 16 * 25);
        assert_eq!(bound_formulas(5, 3, 1, 1, 1, 1).unwrap().trivial_exponent, 3);
    }

    #[test]
    fn m_one_matches_pair_count() {
        for n in 2..=5 {
            for d in 1..=30 {
                let p = cover_params(n, 1, d).unwrap();
                assert_eq!(p.e, p.mu * (p.mu - 1) / 2);
            }
        }
    }

    #[test]
    fn invariant_chain_recomputes() {
        for n in 2..=5 {
            for m in 1..n {
                for d in 1..=10 {
                    assert!(cover_params(n, m, d).unwrap().check(), "n={n} m={m} d={d}");
                }
            }
        }
    }

    #[test]
    fn ratio_crossing_points() {
        // Reference values from an independent big-integer computation.
        assert_eq!(first_small_ratio(2, 1, 200).unwrap(), Some(24));
        assert_eq!(first_small_ratio(3, 1, 200).unwrap(), Some(7));
        assert_eq!(first_small_ratio(4, 2, 200).unwrap(), Some(79));
        assert_eq!(first_small_ratio(3, 2, 200).unwrap(), None);
        let at200 = cover_params(3, 2, 200).unwrap().mv_over_e();
        assert!(at200 > Ratio::new(27, 100) && at200 < Ratio::new(28, 100));
    }

    #[test]
    fn ratio_eventually_decreases() {
        for (n, m) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
            let rs: Vec<_> = (150..=200)
                .map(|d| cover_params(n, m, d).unwrap().mv_over_e())
                .collect();
            assert!(rs.windows(2).all(|w| w[1] < w[0]), "n={n} m={m}");
        }
    }

    proptest! {
        #[test]
        fn lambda_counts_match(m in 1usize..=4, k in 0u32..=12) {
            let l = lambda_enumerate(m, k);
            prop_assert_eq!(l.len() as u128, l_count(m as u32, k));
            prop_assert!(l.iter().all(|e| e.degree() == k));
            let d: u128 = (0..=k).map(|j| l_count(m as u32, j)).sum();
            prop_assert_eq!(d, d_count(m as u32, k));
        }
    }
}
