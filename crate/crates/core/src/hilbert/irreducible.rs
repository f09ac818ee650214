//! Best-effort irreducibility over `F_q(t)` by specialization.
//!
//! If `f(x, y, t0)` keeps total degree `δ` and is irreducible over `F_q` for
//! some `t0 ∈ F_q`, then `f` has no factorization over `F_q(t)` into factors
//! of positive degree: a primitive factorization over `F_q[t]` would
//! specialize to one over `F_q` with both top forms surviving.

use crate::arith::{Field, FqElem};
use crate::bivar::BivarPoly;

/// Largest number of candidate divisors tried per specialization.
const CANDIDATE_BUDGET: u64 = 400_000;

/// Dense `Σ c_{ij} x^i y^j` over `F_q`, indexed by `i * (deg + 1) + j`.
#[derive(Clone)]
struct Dense {
    deg: usize,
    c: Vec<FqElem>,
}

impl Dense {
    fn zero(deg: usize) -> Dense {
        Dense {
            deg,
            c: vec![FqElem::ZERO; (deg + 1) * (deg + 1)],
        }
    }

    fn at(&self, i: usize, j: usize) -> FqElem {
        self.c[i * (self.deg + 1) + j]
    }

    fn set(&mut self, i: usize, j: usize, v: FqElem) {
        self.c[i * (self.deg + 1) + j] = v;
    }

    /// Largest `(i + j, i)` with a nonzero coefficient.
    fn leading(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                if !self.at(i, j).is_zero()
                    && best.is_none_or(|(bi, bj)| (i + j, i) > (bi + bj, bi))
                {
                    best = Some((i, j));
                }
            }
        }
        best
    }
}

/// `g | f` over `F_q`, by division with the graded leading monomial.
fn divides(field: &Field, f: &Dense, g: &Dense, g_terms: &[(usize, usize, FqElem)]) -> bool {
    let Some((li, lj)) = g.leading() else {
        return false;
    };
    let inv = field.inv(g.at(li, lj)).expect("nonzero leading coefficient");
    let mut rem = f.clone();
    // Scan monomials of rem from the top of the graded order down; every
    // reduction only touches strictly smaller monomials.
    for total in (0..=f.deg).rev() {
        for i in (0..=total).rev() {
            let j = total - i;
            let c = rem.at(i, j);
            if c.is_zero() || i < li || j < lj {
                continue;
            }
            let k = field.mul(c, inv);
            let (si, sj) = (i - li, j - lj);
            for &(gi, gj, gc) in g_terms {
                let (ti, tj) = (gi + si, gj + sj);
                let cur = rem.at(ti, tj);
                rem.set(ti, tj, field.sub(cur, field.mul(k, gc)));
            }
        }
    }
    rem.c.iter().all(|c| c.is_zero())
}

/// Whether `f` (over `F_q`, total degree `deg`) has a factor of degree `1..=deg/2`.
/// `None` when the candidate budget runs out.
fn has_small_factor(field: &Field, f: &Dense) -> Option<bool> {
    let deg = f.deg;
    let q = field.q() as u64;
    for k in 1..=deg / 2 {
        // Candidates of total degree exactly k, normalized so the graded
        // leading coefficient is 1.
        let monos: Vec<(usize, usize)> = (0..=k)
            .flat_map(|tot| (0..=tot).map(move |i| (i, tot - i)))
            .collect();
        for &(li, lj) in &monos {
            if li + lj != k {
                continue;
            }
            let lower: Vec<(usize, usize)> = monos
                .iter()
                .copied()
                .filter(|&(i, j)| (i + j, i) < (li + lj, li))
                .collect();
            let count = q.checked_pow(lower.len() as u32)?;
            if count > CANDIDATE_BUDGET {
                return None;
            }
            for mut idx in 0..count {
                let mut g = Dense::zero(deg);
                let mut terms = vec![(li, lj, FqElem::ONE)];
                g.set(li, lj, FqElem::ONE);
                for &(i, j) in &lower {
                    let c = field.elem((idx % q) as u32).expect("index below q");
                    idx /= q;
                    if !c.is_zero() {
                        g.set(i, j, c);
                        terms.push((i, j, c));
                    }
                }
                if divides(field, f, &g, &terms) {
                    return Some(true);
                }
            }
        }
    }
    Some(false)
}

/// `true` only when some specialization `t ↦ t0` certifies irreducibility.
pub fn certify_irreducible(f: &BivarPoly) -> bool {
    let Some(delta) = f.total_degree() else {
        return false;
    };
    if delta == 0 {
        return false;
    }
    if delta == 1 {
        return true;
    }
    let field = f.field();
    for t0 in field.elements() {
        let spec = f.specialize_t(t0);
        if spec.total_degree() != Some(delta) {
            continue;
        }
        let mut dense = Dense::zero(delta as usize);
        for (&(i, j), c) in spec.terms() {
            dense.set(i as usize, j as usize, c.coeff(0));
        }
        match has_small_factor(field, &dense) {
            Some(false) => return true,
            Some(true) => continue,
            None => return false,
        }
    }
    false
}
