//! Bivariate polynomials in `(x, y)` with coefficients in `F_q[t]`.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::{check_same, ArithError, Field, FqElem, PolyT};

/// `Σ c_{ij}(t) x^i y^j`, keyed by `(i, j)`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct BivarPoly {
    field: Field,
    terms: BTreeMap<(u32, u32), PolyT>,
}

impl fmt::Debug for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BivarPoly[{}]({})", self.field, self)
    }
}

impl BivarPoly {
    pub fn zero(field: &Field) -> BivarPoly {
        BivarPoly {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(field: &Field, terms: I) -> BivarPoly
    where
        I: IntoIterator<Item = ((u32, u32), PolyT)>,
    {
        let mut out = BivarPoly::zero(field);
        for (k, c) in terms {
            out.add_term(k, &c);
        }
        out
    }

    /// `c * x^i * y^j` with `c` constant.
    pub fn monomial(field: &Field, c: FqElem, i: u32, j: u32) -> BivarPoly {
        BivarPoly::from_terms(field, [((i, j), PolyT::constant(field, c))])
    }

    pub fn x(field: &Field) -> BivarPoly {
        BivarPoly::monomial(field, FqElem::ONE, 1, 0)
    }

    pub fn y(field: &Field) -> BivarPoly {
        BivarPoly::monomial(field, FqElem::ONE, 0, 1)
    }

    pub fn constant(c: &PolyT) -> BivarPoly {
        BivarPoly::from_terms(c.field(), [((0, 0), c.clone())])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), PolyT> {
        &self.terms
    }

    pub fn coeff(&self, i: u32, j: u32) -> PolyT {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| PolyT::zero(&self.field))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: (u32, u32), c: &PolyT) {
        if c.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(key)
            .or_insert_with(|| PolyT::zero(c.field()));
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Total degree in `(x, y)`; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    /// Largest `t`-degree among the coefficients.
    pub fn degree_t(&self) -> i64 {
        self.terms.values().map(|c| c.deg_i64()).max().unwrap_or(-1)
    }

    pub fn checked_add(&self, other: &BivarPoly) -> Result<BivarPoly, ArithError> {
        check_same(&self.field, &other.field)?;
        let mut out = self.clone();
        for (&k, c) in &other.terms {
            out.add_term(k, c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> BivarPoly {
        BivarPoly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect(),
        }
    }

    pub fn checked_sub(&self, other: &BivarPoly) -> Result<BivarPoly, ArithError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &BivarPoly) -> Result<BivarPoly, ArithError> {
        check_same(&self.field, &other.field)?;
        let mut out = BivarPoly::zero(&self.field);
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &other.terms {
                out.add_term((i1 + i2, j1 + j2), &(a * b));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &PolyT) -> BivarPoly {
        BivarPoly::from_terms(&self.field, self.terms.iter().map(|(&k, v)| (k, v * c)))
    }

    pub fn pow(&self, e: u32) -> BivarPoly {
        let mut acc = BivarPoly::constant(&PolyT::one(&self.field));
        for _ in 0..e {
            acc = acc.checked_mul(self).expect("same field");
        }
        acc
    }

    /// Exact evaluation at a point of `F_q[t]^2`.
    pub fn eval(&self, x: &PolyT, y: &PolyT) -> PolyT {
        let by_y = self.coeffs_in_y(x);
        let mut acc = PolyT::zero(&self.field);
        for c in by_y.iter().rev() {
            acc = &(&acc * y) + c;
        }
        acc
    }

    /// For fixed `x`, the coefficients of `f(x, y)` as a polynomial in `y`.
    pub fn coeffs_in_y(&self, x: &PolyT) -> Vec<PolyT> {
        let dy = self.degree_y().map_or(0, |d| d as usize + 1);
        let dx = self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0);
        let mut xpow = Vec::with_capacity(dx as usize + 1);
        xpow.push(PolyT::one(&self.field));
        for k in 1..=dx as usize {
            let next = &xpow[k - 1] * x;
            xpow.push(next);
        }
        let mut out = vec![PolyT::zero(&self.field); dy];
        for (&(i, j), c) in &self.terms {
            out[j as usize] = &out[j as usize] + &(c * &xpow[i as usize]);
        }
        out
    }

    /// Substitutes a field element for `t`.
    pub fn specialize_t(&self, t0: FqElem) -> BivarPoly {
        BivarPoly::from_terms(
            &self.field,
            self.terms
                .iter()
                .map(|(&k, c)| (k, PolyT::constant(&self.field, c.eval(t0)))),
        )
    }

    /// Largest monomial under the graded order `(i + j, i)`.
    fn leading_key(&self) -> Option<(u32, u32)> {
        self.terms.keys().copied().max_by_key(|&(i, j)| (i + j, i))
    }

    /// Whether `divisor` divides `self` in `F_q(t)[x, y]`.
    ///
    /// Pseudo-division by the single polynomial `divisor` (which is its own
    /// Gröbner basis), clearing `F_q[t]`-content after every step so the
    /// coefficients stay small. The remainder vanishes iff the division is exact.
    pub fn divisible_by(&self, divisor: &BivarPoly) -> Result<bool, ArithError> {
        check_same(&self.field, divisor.field())?;
        let Some(lm) = divisor.leading_key() else {
            return Err(ArithError::DivisionByZero);
        };
        let lc = divisor.terms[&lm].clone();
        let mut rem = self.clone();
        loop {
            let target = rem
                .terms
                .keys()
                .copied()
                .filter(|&(i, j)| i >= lm.0 && j >= lm.1)
                .max_by_key(|&(i, j)| (i + j, i));
            let Some(m) = target else {
                return Ok(rem.is_zero());
            };
            let c = rem.terms[&m].clone();
            let shifted = BivarPoly::from_terms(
                &self.field,
                divisor
                    .terms
                    .iter()
                    .map(|(&(i, j), d)| ((i + m.0 - lm.0, j + m.1 - lm.1), d * &c)),
            );
            rem = rem.scale(&lc).checked_sub(&shifted)?;
            rem = rem.primitive_part();
        }
    }

    /// Divides out the monic gcd of all coefficients.
    pub fn primitive_part(&self) -> BivarPoly {
        let mut g = PolyT::zero(&self.field);
        for c in self.terms.values() {
            g = g.gcd(c).expect("same field");
            if g.is_one() {
                return self.clone();
            }
        }
        if g.is_zero() {
            return self.clone();
        }
        BivarPoly::from_terms(
            &self.field,
            self.terms
                .iter()
                .map(|(&k, c)| (k, c.div_exact(&g).expect("gcd divides"))),
        )
    }

    /// Parses e.g. `y^2 - x^3 - t*x`.
    pub fn parse(field: &Field, s: &str) -> Result<BivarPoly, ArithError> {
        crate::text::parse_bivar(field, s)
    }
}

fn write_coeff_mono(f: &mut fmt::Formatter<'_>, c: &PolyT, mono: &str) -> fmt::Result {
    let single = c.coeffs().iter().filter(|e| !e.is_zero()).count() == 1;
    match (mono.is_empty(), c.is_one(), single) {
        (true, _, _) => write!(f, "{c}"),
        (false, true, _) => write!(f, "{mono}"),
        (false, false, true) => write!(f, "{c}*{mono}"),
        (false, false, false) => write!(f, "({c})*{mono}"),
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut keys: Vec<(u32, u32)> = self.terms.keys().copied().collect();
        keys.sort_by_key(|&(i, j)| std::cmp::Reverse((i + j, i)));
        for (n, (i, j)) in keys.into_iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let mut mono = String::new();
            let mut push = |var: &str, e: u32| {
                if e == 0 {
                    return;
                }
                if !mono.is_empty() {
                    mono.push('*');
                }
                mono.push_str(var);
                if e > 1 {
                    mono.push_str(&format!("^{e}"));
                }
            };
            push("x", i);
            push("y", j);
            write_coeff_mono(f, &self.terms[&(i, j)], &mono)?;
        }
        Ok(())
    }
}
