//! Determinant-method covers of `X(F_q[t])_n` by auxiliary curves.
//!
//! Points are grouped by their joint residue mod `t^β`. Each group gets one
//! auxiliary polynomial of degree `≤ s` built from a maximal nonsingular
//! minor of its monomial matrix; every claimed property of the resulting
//! cover is re-verified exactly.

mod json;
mod matrix;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{ArithError, PolyT, Valuation};
use crate::bivar::BivarPoly;
use crate::combinat::Exponent;
use crate::enumerate::{enumerate_points, EnumError, Mode, Point};
use crate::hilbert::{choose_s, staircase, HilbertError, PlaneCurve};

pub use json::{CertificateJson, GroupJson, PointJson};
pub use matrix::{
    det_cofactor, det_exact, det_or_one, monomial_matrix, pivots, submatrix, Matrix, Pivots,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetError {
    #[error("matrix is not square ({rows} x {cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("determinant of an empty matrix needs an explicit field")]
    EmptyField,
    #[error("{points} points but {monomials} monomials")]
    SizeMismatch { points: usize, monomials: usize },
    #[error("point {index} is not on the curve")]
    NotOnCurve { index: usize },
    #[error("points {i} and {j} are not in one ball of radius {beta}")]
    NotInBall { i: usize, j: usize, beta: u32 },
    #[error("ball group is empty")]
    EmptyGroup,
    #[error("monomial matrix has full column rank {rank}; no auxiliary polynomial exists")]
    FullRank { rank: usize },
    #[error("curve is not certified irreducible; refusing to build a cover")]
    Reducible,
    #[error("auxiliary polynomial for group {group} is divisible by the curve")]
    Improper { group: usize },
    #[error("certificate is malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Enum(#[from] EnumError),
}

/// Agreement of the first `beta` coefficients.
fn same_residue(a: &PolyT, b: &PolyT, beta: u32) -> bool {
    (0..beta as usize).all(|i| a.coeff(i) == b.coeff(i))
}

/// Curve points pairwise congruent mod `t^β` in both coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallGroup {
    beta: u32,
    center: (PolyT, PolyT),
    points: Vec<Point>,
}

impl BallGroup {
    pub fn new(curve: &PlaneCurve, beta: u32, points: Vec<Point>) -> Result<BallGroup, DetError> {
        let Some(first) = points.first() else {
            return Err(DetError::EmptyGroup);
        };
        for (k, (x, y)) in points.iter().enumerate() {
            if !curve.poly().eval(x, y).is_zero() {
                return Err(DetError::NotOnCurve { index: k });
            }
            if !same_residue(x, &first.0, beta) || !same_residue(y, &first.1, beta) {
                // Congruence to the first point implies pairwise congruence.
                return Err(DetError::NotInBall { i: 0, j: k, beta });
            }
        }
        let center = (first.0.truncate(beta as usize), first.1.truncate(beta as usize));
        Ok(BallGroup {
            beta,
            center,
            points,
        })
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn center(&self) -> &(PolyT, PolyT) {
        &self.center
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `ord_t(Δ)` against `β·e` for a square monomial matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetLemmaRecord {
    /// `None` when `Δ = 0`.
    pub ord: Option<i64>,
    pub degree: Option<i64>,
    pub threshold: u64,
    pub holds: bool,
}

pub fn check_det_lemma(
    group: &BallGroup,
    monomials: &[Exponent],
    e: u64,
) -> Result<DetLemmaRecord, DetError> {
    if group.len() != monomials.len() {
        return Err(DetError::SizeMismatch {
            points: group.len(),
            monomials: monomials.len(),
        });
    }
    let delta = det_exact(&monomial_matrix(group.points(), monomials))?;
    let threshold = group.beta() as u64 * e;
    let ord = match delta.ord_t() {
        Valuation::Finite(v) => Some(v),
        Valuation::Infinity => None,
    };
    Ok(DetLemmaRecord {
        ord,
        degree: (!delta.is_zero()).then(|| delta.deg_i64()),
        threshold,
        holds: ord.is_none_or(|v| v as u64 >= threshold),
    })
}

/// `x^{α₁} y^{α₂}` for a homogeneous exponent `(α₀, α₁, α₂)`.
fn dehomogenize(a: &Exponent) -> (u32, u32) {
    (a.get(1), a.get(2))
}

/// Auxiliary polynomial with support in `monomials`, vanishing on `points`.
///
/// Expands `det [ rows of a maximal minor | generic row (1, x, y)^α ]` along
/// the generic row over the pivot columns plus `α₀`, the Salberger-largest
/// column outside the minor. The result is made primitive over `F_q[t]`.
pub fn auxiliary_from_points(
    points: &[Point],
    monomials: &[Exponent],
) -> Result<BivarPoly, DetError> {
    let Some(first) = points.first() else {
        return Err(DetError::EmptyGroup);
    };
    let field = first.0.field().clone();
    let m = monomial_matrix(points, monomials);
    let pv = pivots(&m)?;
    let Some(alpha0) = (0..monomials.len()).rev().find(|c| !pv.cols.contains(c)) else {
        return Err(DetError::FullRank { rank: pv.rank() });
    };
    let mut cols = pv.cols.clone();
    cols.push(alpha0);
    cols.sort_unstable();
    let block = submatrix(&m, &pv.rows, &cols);
    let rho = pv.rank();
    let one = PolyT::one(&field);
    let mut aux = BivarPoly::zero(&field);
    for (k, &c) in cols.iter().enumerate() {
        let minor: Matrix = block
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let d = det_or_one(&minor, &one)?;
        // Cofactor sign for entry (ρ, k) of the bordered (ρ+1)-square matrix.
        let cof = if (rho + k) % 2 == 0 { d } else { -d };
        aux.add_term(dehomogenize(&monomials[c]), &cof);
    }
    Ok(aux.primitive_part())
}

pub fn auxiliary_polynomial(
    group: &BallGroup,
    curve: &PlaneCurve,
    s: u32,
) -> Result<BivarPoly, DetError> {
    auxiliary_from_points(group.points(), &staircase(curve, s).monomials)
}

/// Residue class key of a point mod `t^β`.
fn residue_key(p: &Point, beta: u32) -> (Vec<u32>, Vec<u32>) {
    (
        p.0.truncate(beta as usize).padded_key(beta as usize),
        p.1.truncate(beta as usize).padded_key(beta as usize),
    )
}

/// Partition into joint residue classes mod `t^β`, in canonical key order.
pub fn group_by_residue(points: &[Point], beta: u32) -> Vec<Vec<usize>> {
    let mut map: BTreeMap<(Vec<u32>, Vec<u32>), Vec<usize>> = BTreeMap::new();
    for (k, p) in points.iter().enumerate() {
        map.entry(residue_key(p, beta)).or_default().push(k);
    }
    map.into_values().collect()
}

/// Census of the grouping and of the determinant-lemma checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub joint_groups: usize,
    pub final_groups: usize,
    pub refined_groups: usize,
    pub max_radius: u32,
    /// `q^{2β}`, the number of joint residue classes.
    pub group_bound: u128,
    pub group_bound_holds: bool,
    pub det_checks: usize,
    pub det_violations: usize,
    pub degree_violations: usize,
}

/// Verdicts of an independent re-check of a cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    /// Every enumerated point is listed and lies on its hypersurface.
    pub coverage: bool,
    /// No hypersurface is divisible by the curve equation.
    pub properness: bool,
    /// No hypersurface vanishes at more than `sδ` enumerated points.
    pub bezout: bool,
    pub max_points_on_hypersurface: usize,
    pub bezout_bound: u64,
    pub valid: bool,
}

#[derive(Debug, Clone)]
pub struct CoverCertificate {
    pub curve: PlaneCurve,
    pub n: u32,
    pub s: u32,
    pub beta: u32,
    pub mu: u64,
    pub e: u64,
    pub sigma1: u64,
    pub sigma2: u64,
    pub points: Vec<Point>,
    pub groups: Vec<BallGroup>,
    pub hypersurfaces: Vec<BivarPoly>,
    /// `assignment[k]` is the hypersurface index of `points[k]`.
    pub assignment: Vec<usize>,
    pub census: Census,
    pub verification: Verification,
}

/// Radius, point indices and auxiliary polynomial of each final group.
type Parts = Vec<(u32, Vec<usize>, BivarPoly)>;

struct GroupOutcome {
    parts: Parts,
    refined: bool,
    det: Option<DetLemmaRecord>,
}

/// Builds auxiliary polynomials for one joint-residue group, refining the
/// radius until every part has a rank-deficient monomial matrix.
fn cover_group(
    curve: &PlaneCurve,
    group: usize,
    points: &[Point],
    idx: &[usize],
    beta: u32,
    monomials: &[Exponent],
    cap: u32,
) -> Result<Parts, DetError> {
    let pts: Vec<Point> = idx.iter().map(|&k| points[k].clone()).collect();
    match auxiliary_from_points(&pts, monomials) {
        Ok(aux) if aux.divisible_by(curve.poly())? => Err(DetError::Improper { group }),
        Ok(aux) => Ok(vec![(beta, idx.to_vec(), aux)]),
        Err(DetError::FullRank { .. }) if beta < cap => {
            let mut out = Vec::new();
            for sub in group_by_residue(&pts, beta + 1) {
                let sub_idx: Vec<usize> = sub.iter().map(|&k| idx[k]).collect();
                out.extend(cover_group(curve, group, points, &sub_idx, beta + 1, monomials, cap)?);
            }
            Ok(out)
        }
        Err(e) => Err(e),
    }
}

pub fn cover_curve(
    curve: &PlaneCurve,
    n: u32,
    mode: Mode,
    budget: u64,
) -> Result<CoverCertificate, DetError> {
    if curve.irreducible() != Some(true) {
        return Err(DetError::Reducible);
    }
    let choice = choose_s(curve, n)?;
    let slice = staircase(curve, choice.s);
    let monomials = slice.monomials;
    let points = enumerate_points(curve, n, mode, budget)?;
    let beta = choice.beta;
    let joint = group_by_residue(&points, beta);
    let mu = monomials.len();
    let degree_cap = (n as i64 - 1) * (choice.sigma1 + choice.sigma2) as i64;

    let outcomes: Vec<Result<GroupOutcome, DetError>> = joint
        .par_iter()
        .enumerate()
        .map(|(g, idx)| {
            let parts = cover_group(curve, g, &points, idx, beta, &monomials, n.max(beta))?;
            let det = if idx.len() >= mu {
                let pts: Vec<Point> = idx[..mu].iter().map(|&k| points[k].clone()).collect();
                let group = BallGroup::new(curve, beta, pts)?;
                Some(check_det_lemma(&group, &monomials, choice.e)?)
            } else {
                None
            };
            Ok(GroupOutcome {
                refined: parts.len() > 1 || parts.first().is_some_and(|p| p.0 > beta),
                parts,
                det,
            })
        })
        .collect();

    let mut groups = Vec::new();
    let mut hypersurfaces = Vec::new();
    let mut assignment = vec![usize::MAX; points.len()];
    let mut census = Census {
        joint_groups: joint.len(),
        final_groups: 0,
        refined_groups: 0,
        max_radius: beta,
        group_bound: (curve.field().q() as u128).pow(2 * beta),
        group_bound_holds: false,
        det_checks: 0,
        det_violations: 0,
        degree_violations: 0,
    };
    for outcome in outcomes {
        let outcome = outcome?;
        census.refined_groups += usize::from(outcome.refined);
        if let Some(rec) = outcome.det {
            census.det_checks += 1;
            census.det_violations += usize::from(!rec.holds);
            census.degree_violations += usize::from(rec.degree.is_some_and(|d| d > degree_cap));
        }
        for (radius, idx, aux) in outcome.parts {
            let h = hypersurfaces.len();
            for &k in &idx {
                assignment[k] = h;
            }
            let pts = idx.iter().map(|&k| points[k].clone()).collect();
            groups.push(BallGroup::new(curve, radius, pts)?);
            census.max_radius = census.max_radius.max(radius);
            hypersurfaces.push(aux);
        }
    }
    census.final_groups = groups.len();
    census.group_bound_holds = census.joint_groups as u128 <= census.group_bound;

    let verification = verify_cover(curve, choice.s, &points, &points, &hypersurfaces, &assignment)?;
    Ok(CoverCertificate {
        curve: curve.clone(),
        n,
        s: choice.s,
        beta,
        mu: choice.mu,
        e: choice.e,
        sigma1: choice.sigma1,
        sigma2: choice.sigma2,
        points,
        groups,
        hypersurfaces,
        assignment,
        census,
        verification,
    })
}

/// Checks coverage, properness and the Bézout count.
///
/// `enumerated` is the ground-truth point set; `listed` and `assignment`
/// are what the certificate claims.
pub fn verify_cover(
    curve: &PlaneCurve,
    s: u32,
    enumerated: &[Point],
    listed: &[Point],
    hypersurfaces: &[BivarPoly],
    assignment: &[usize],
) -> Result<Verification, DetError> {
    let same_set = {
        let mut a = listed.to_vec();
        a.sort_by(crate::enumerate::canonical_point_cmp);
        a.dedup();
        a.len() == listed.len() && a == enumerated
    };
    let coverage = same_set
        && assignment.len() == listed.len()
        && listed.iter().zip(assignment).all(|((x, y), &h)| {
            hypersurfaces
                .get(h)
                .is_some_and(|aux| aux.eval(x, y).is_zero())
        });
    let mut properness = true;
    for aux in hypersurfaces {
        if aux.is_zero()
            || aux.total_degree().is_some_and(|d| d > s)
            || aux.divisible_by(curve.poly())?
        {
            properness = false;
        }
    }
    let bezout_bound = s as u64 * curve.delta() as u64;
    let max_points_on_hypersurface = hypersurfaces
        .par_iter()
        .map(|aux| {
            enumerated
                .iter()
                .filter(|(x, y)| aux.eval(x, y).is_zero())
                .count()
        })
        .max()
        .unwrap_or(0);
    let bezout = max_points_on_hypersurface as u64 <= bezout_bound;
    Ok(Verification {
        coverage,
        properness,
        bezout,
        max_points_on_hypersurface,
        bezout_bound,
        valid: coverage && properness && bezout,
    })
}
