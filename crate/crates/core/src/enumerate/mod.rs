//! Ground-truth enumeration of `X(F_q[t])_n` for plane curves.

mod generate;

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{hensel_lift, ArithError, FqElem, LaurentApprox, PolyT};
use crate::hilbert::PlaneCurve;

pub use generate::{random_curve, random_irreducible_curve, Shape};

/// Default cap on candidate evaluations.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

pub type Point = (PolyT, PolyT);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Brute,
    Hensel,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("enumeration needs {needed} evaluations, budget is {budget}; try hensel mode")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("degree bound n must be at least 1")]
    BadDegreeBound,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Lexicographic on `(x, y)` coefficient vectors, low degree first.
pub fn canonical_point_cmp(a: &Point, b: &Point) -> Ordering {
    a.0.canonical_cmp(&b.0).then_with(|| a.1.canonical_cmp(&b.1))
}

fn elements_count(q: u32, n: u32) -> u128 {
    (q as u128).pow(n)
}

fn horner(coeffs: &[PolyT], y: &PolyT) -> PolyT {
    let mut acc = PolyT::zero(y.field());
    for c in coeffs.iter().rev() {
        acc = &(&acc * y) + c;
    }
    acc
}

/// Points of the fibre over `x` by trying every `y ∈ F_q[t]_n`.
fn brute_fibre(coeffs: &[PolyT], x: &PolyT, n: u32, out: &mut Vec<Point>) {
    let field = x.field();
    let total = elements_count(field.q(), n) as u64;
    for iy in 0..total {
        let y = PolyT::from_index(field, iy, n as usize);
        if horner(coeffs, &y).is_zero() {
            out.push((x.clone(), y));
        }
    }
}

/// `y ∈ F_q[t]_n` with `y ≡ y0 (mod t)` on the fibre.
fn brute_residue_class(coeffs: &[PolyT], x: &PolyT, y0: FqElem, n: u32, out: &mut Vec<Point>) {
    let field = x.field();
    let q = field.q() as u64;
    let total = elements_count(field.q(), n - 1) as u64;
    for k in 0..total {
        let y = PolyT::from_index(field, k * q + y0.index() as u64, n as usize);
        if horner(coeffs, &y).is_zero() {
            out.push((x.clone(), y));
        }
    }
}

fn hensel_fibre(coeffs: &[PolyT], x: &PolyT, n: u32, out: &mut Vec<Point>) -> Result<(), ArithError> {
    let field = x.field();
    let Some(v) = coeffs.iter().filter_map(|c| c.ord_t().finite()).min() else {
        // f(x, ·) ≡ 0: every y is a point.
        brute_fibre(&[PolyT::zero(field)], x, n, out);
        return Ok(());
    };
    // Remove the t-content so the reduction mod t is nonzero.
    let shifted: Vec<PolyT> = coeffs
        .iter()
        .map(|c| PolyT::from_coeffs(field, c.coeffs().iter().skip(v as usize).copied().collect()))
        .collect();
    let residue: Vec<FqElem> = shifted.iter().map(|c| c.coeff(0)).collect();
    let eval = |cs: &[FqElem], y: FqElem| {
        cs.iter()
            .rev()
            .fold(FqElem::ZERO, |acc, &c| field.add(field.mul(acc, y), c))
    };
    let deriv: Vec<FqElem> = residue
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| field.mul(c, field.from_int(k as i64)))
        .collect();
    let series: Vec<LaurentApprox> = shifted.iter().map(LaurentApprox::from_poly).collect();
    for y0 in field.elements() {
        if !eval(&residue, y0).is_zero() {
            continue;
        }
        if eval(&deriv, y0).is_zero() {
            brute_residue_class(coeffs, x, y0, n, out);
            continue;
        }
        let lift = hensel_lift(&series, y0, n as i64)?;
        let y = lift.to_poly().expect("lift of an exact polynomial is integral");
        if horner(coeffs, &y).is_zero() {
            out.push((x.clone(), y));
        }
    }
    Ok(())
}

/// `{ (x, y) ∈ F_q[t]_n² : f(x, y) = 0 }`, sorted canonically.
pub fn enumerate_points(
    curve: &PlaneCurve,
    n: u32,
    mode: Mode,
    budget: u64,
) -> Result<Vec<Point>, EnumError> {
    if n == 0 {
        return Err(EnumError::BadDegreeBound);
    }
    let field = curve.field().clone();
    let q = field.q();
    let nx = elements_count(q, n);
    let needed = match mode {
        Mode::Brute => nx * nx,
        Mode::Hensel => nx * q as u128,
    };
    if needed > budget as u128 {
        return Err(EnumError::BudgetExceeded { needed, budget });
    }
    let f = curve.poly();
    let shards: Vec<Result<Vec<Point>, ArithError>> = (0..nx as u64)
        .into_par_iter()
        .map(|ix| {
            let x = PolyT::from_index(&field, ix, n as usize);
            let coeffs = f.coeffs_in_y(&x);
            let mut out = Vec::new();
            match mode {
                Mode::Brute => brute_fibre(&coeffs, &x, n, &mut out),
                Mode::Hensel => hensel_fibre(&coeffs, &x, n, &mut out)?,
            }
            Ok(out)
        })
        .collect();
    let mut points = Vec::new();
    for s in shards {
        points.extend(s?);
    }
    points.sort_by(canonical_point_cmp);
    points.dedup();
    Ok(points)
}

/// Count of points together with the shapes of the two upper bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    pub curve: String,
    pub p: u32,
    pub a: u32,
    pub q: u32,
    pub n: u32,
    pub delta: u32,
    pub irreducible: Option<bool>,
    pub count: u64,
    pub points: Option<Vec<Point>>,
    /// `n² q^{⌈n/δ⌉}`.
    pub bound_value: u128,
    pub fitted_c: Ratio<u128>,
    /// `q^{n·dim}` with `dim = 1`.
    pub trivial_value: u128,
    pub trivial_c: Ratio<u128>,
    pub elapsed: Duration,
}

pub fn count_vs_bounds(
    curve: &PlaneCurve,
    n: u32,
    mode: Mode,
    budget: u64,
    keep_points: bool,
) -> Result<CountReport, EnumError> {
    let start = Instant::now();
    let points = enumerate_points(curve, n, mode, budget)?;
    let elapsed = start.elapsed();
    let field = curve.field();
    let q = field.q();
    let delta = curve.delta();
    let bound_value = (n as u128 * n as u128) * (q as u128).pow(n.div_ceil(delta));
    let trivial_value = (q as u128).pow(n);
    let count = points.len() as u64;
    Ok(CountReport {
        curve: curve.spec(),
        p: field.p(),
        a: field.a(),
        q,
        n,
        delta,
        irreducible: curve.irreducible(),
        count,
        points: keep_points.then_some(points),
        bound_value,
        fitted_c: Ratio::new(count as u128, bound_value),
        trivial_value,
        trivial_c: Ratio::new(count as u128, trivial_value),
        elapsed,
    })
}
