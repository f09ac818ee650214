//! Dense matrices over `F_q[t]` with fraction-free elimination.

use crate::arith::{ArithError, PolyT};
use crate::combinat::Exponent;

use super::DetError;

pub type Matrix = Vec<Vec<PolyT>>;

/// Rows are points, columns are `x^{α₁} y^{α₂}` (the `x₀` entry is 1).
pub fn monomial_matrix(points: &[(PolyT, PolyT)], monomials: &[Exponent]) -> Matrix {
    let max_exp = monomials
        .iter()
        .flat_map(|a| [a.get(1), a.get(2)])
        .max()
        .unwrap_or(0) as usize;
    points
        .iter()
        .map(|(x, y)| {
            let powers = |b: &PolyT| {
                let mut v = vec![PolyT::one(b.field())];
                for k in 1..=max_exp {
                    let next = &v[k - 1] * b;
                    v.push(next);
                }
                v
            };
            let xp = powers(x);
            let yp = powers(y);
            monomials
                .iter()
                .map(|a| &xp[a.get(1) as usize] * &yp[a.get(2) as usize])
                .collect()
        })
        .collect()
}

fn one_like(m: &Matrix) -> Option<PolyT> {
    m.iter().flatten().next().map(|p| PolyT::one(p.field()))
}

/// Bareiss elimination; the empty matrix has determinant 1.
pub fn det_exact(m: &Matrix) -> Result<PolyT, DetError> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(DetError::NonSquare {
            rows: n,
            cols: m.first().map_or(0, |r| r.len()),
        });
    }
    let Some(one) = one_like(m) else {
        return Err(DetError::EmptyField);
    };
    let mut a = m.clone();
    let mut prev = one.clone();
    let mut negate = false;
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return Ok(PolyT::zero(one.field()));
            };
            a.swap(k, r);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev)?;
            }
            a[i][k] = PolyT::zero(one.field());
        }
        prev = a[k][k].clone();
    }
    let det = if n == 0 { one } else { a[n - 1][n - 1].clone() };
    Ok(if negate { -det } else { det })
}

/// Determinant of an empty matrix over a given field.
pub fn det_or_one(m: &Matrix, one: &PolyT) -> Result<PolyT, DetError> {
    if m.is_empty() {
        Ok(one.clone())
    } else {
        det_exact(m)
    }
}

/// Pivot rows and columns of a maximal nonsingular minor.
///
/// Columns are scanned left to right and each takes the first remaining row
/// (in input order) with a nonzero reduced entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pivots {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Pivots {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

pub fn pivots(m: &Matrix) -> Result<Pivots, ArithError> {
    let Some(one) = one_like(m) else {
        return Ok(Pivots {
            rows: Vec::new(),
            cols: Vec::new(),
        });
    };
    let nrows = m.len();
    let ncols = m[0].len();
    let mut a = m.clone();
    let mut used = vec![false; nrows];
    let mut prev = one;
    let mut out = Pivots {
        rows: Vec::new(),
        cols: Vec::new(),
    };
    for c in 0..ncols {
        let Some(r) = (0..nrows).find(|&r| !used[r] && !a[r][c].is_zero()) else {
            continue;
        };
        used[r] = true;
        out.rows.push(r);
        out.cols.push(c);
        // Entries of the remaining rows become minors on the pivot set plus
        // one row and one column, so the division is exact.
        for i in 0..nrows {
            if used[i] {
                continue;
            }
            for j in c + 1..ncols {
                let num = &(&a[r][c] * &a[i][j]) - &(&a[i][c] * &a[r][j]);
                a[i][j] = num.div_exact(&prev)?;
            }
            a[i][c] = PolyT::zero(prev.field());
        }
        prev = a[r][c].clone();
    }
    Ok(out)
}

/// Submatrix on the given rows and columns.
pub fn submatrix(m: &Matrix, rows: &[usize], cols: &[usize]) -> Matrix {
    rows.iter()
        .map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect())
        .collect()
}

/// Cofactor expansion, for cross-checking small determinants.
pub fn det_cofactor(m: &Matrix, one: &PolyT) -> PolyT {
    let n = m.len();
    if n == 0 {
        return one.clone();
    }
    let mut acc = PolyT::zero(one.field());
    for j in 0..n {
        let minor: Matrix = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * &det_cofactor(&minor, one);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Field;
    use proptest::prelude::*;

    fn f5() -> Field {
        Field::new(5, 1).unwrap()
    }

    fn p(f: &Field, c: &[i64]) -> PolyT {
        PolyT::from_ints(f, c)
    }

    #[test]
    fn small_vandermonde() {
        let f = f5();
        let pts = vec![(p(&f, &[]), p(&f, &[])), (p(&f, &[1]), p(&f, &[1]))];
        let mons = vec![Exponent::new(vec![1, 0, 0]), Exponent::new(vec![0, 1, 0])];
        let m = monomial_matrix(&pts, &mons);
        assert_eq!(m, vec![vec![p(&f, &[1]), p(&f, &[])], vec![p(&f, &[1]), p(&f, &[1])]]);
        assert_eq!(det_exact(&m).unwrap(), p(&f, &[1]));
    }

    #[test]
    fn three_point_vandermonde() {
        let f = f5();
        let pts: Vec<_> = [&[][..], &[0, 1][..], &[0, 2][..]]
            .iter()
            .map(|x| (p(&f, x), p(&f, &[])))
            .collect();
        let mons: Vec<_> = [[2, 0, 0], [1, 1, 0], [0, 2, 0]]
            .iter()
            .map(|a| Exponent::new(a.to_vec()))
            .collect();
        let d = det_exact(&monomial_matrix(&pts, &mons)).unwrap();
        // (t − 0)(2t − 0)(2t − t) = 2t³
        assert_eq!(d, p(&f, &[0, 0, 0, 2]));
        assert_eq!(d.ord_t().finite(), Some(3));
    }

    #[test]
    fn det_examples() {
        let f = f5();
        let one = p(&f, &[1]);
        let zero = p(&f, &[]);
        let id = vec![
            vec![one.clone(), zero.clone(), zero.clone()],
            vec![zero.clone(), one.clone(), zero.clone()],
            vec![zero.clone(), zero.clone(), one.clone()],
        ];
        assert_eq!(det_exact(&id).unwrap(), one);
        let tri = vec![vec![p(&f, &[0, 1]), one.clone()], vec![zero.clone(), p(&f, &[0, 1])]];
        assert_eq!(det_exact(&tri).unwrap(), p(&f, &[0, 0, 1]));
        assert!(matches!(
            det_exact(&vec![vec![one.clone(), one.clone()]]),
            Err(DetError::NonSquare { .. })
        ));
        assert_eq!(det_or_one(&Vec::new(), &one).unwrap(), one);
        // A zero leading entry forces a row swap.
        let swap = vec![vec![zero.clone(), one.clone()], vec![one.clone(), zero.clone()]];
        assert_eq!(det_exact(&swap).unwrap(), p(&f, &[-1]));
    }

    #[test]
    fn pivots_pick_leftmost_columns() {
        let f = f5();
        let one = p(&f, &[1]);
        let zero = p(&f, &[]);
        let t = p(&f, &[0, 1]);
        let m = vec![
            vec![zero.clone(), one.clone(), t.clone()],
            vec![zero.clone(), t.clone(), p(&f, &[0, 0, 1])],
            vec![zero.clone(), zero.clone(), one.clone()],
        ];
        let pv = pivots(&m).unwrap();
        // Column 0 is zero; row 1 is t times row 0.
        assert_eq!(pv.cols, vec![1, 2]);
        assert_eq!(pv.rows, vec![0, 2]);
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<Vec<i64>>>> {
        proptest::collection::vec(
            proptest::collection::vec(proptest::collection::vec(0i64..5, 0..4), n),
            n,
        )
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(n in 0usize..=4, raw in arb_matrix(4)) {
            let f = f5();
            let m: Matrix = raw.iter().take(n)
                .map(|row| row.iter().take(n).map(|c| p(&f, c)).collect())
                .collect();
            let one = p(&f, &[1]);
            prop_assert_eq!(det_or_one(&m, &one).unwrap(), det_cofactor(&m, &one));
        }

        #[test]
        fn rank_of_pivot_minor(raw in arb_matrix(4), keep in 1usize..4) {
            let f = f5();
            // Make the last row a combination of the first `keep` rows.
            let mut m: Matrix = raw.iter().map(|row| row.iter().map(|c| p(&f, c)).collect()).collect();
            let mut comb = vec![p(&f, &[]); 4];
            for (r, row) in m.iter().enumerate().take(keep) {
                let w = p(&f, &[r as i64 + 1, 1]);
                for (slot, c) in comb.iter_mut().zip(row) {
                    *slot = &*slot + &(c * &w);
                }
            }
            m[3] = comb;
            let pv = pivots(&m).unwrap();
            let one = p(&f, &[1]);
            let minor = submatrix(&m, &pv.rows, &pv.cols);
            prop_assert!(!det_or_one(&minor, &one).unwrap().is_zero());
            prop_assert!(pv.rank() <= 3);
            // Maximality: no bordered minor is nonsingular.
            for r in (0..4).filter(|r| !pv.rows.contains(r)) {
                for c in (0..4).filter(|c| !pv.cols.contains(c)) {
                    let mut rows = pv.rows.clone();
                    rows.push(r);
                    let mut cols = pv.cols.clone();
                    cols.push(c);
                    prop_assert!(det_exact(&submatrix(&m, &rows, &cols)).unwrap().is_zero());
                }
            }
        }
    }
}
