use std::fmt;

use super::{check_same, ArithError, Field, FqElem, PolyT, Valuation};

/// A truncated element of `F_q((t))`.
///
/// The value is `t^val * (c0 + c1 t + ...) + O(t^prec)`: every coefficient
/// of `t^i` for `i < prec` is certain, nothing is claimed at or beyond
/// `prec`. `prec = ∞` marks an exact element (a Laurent polynomial).
/// When `val` is finite, `coeffs[0] != 0` and `val < prec`; an element whose
/// known digits are all zero has `val = ∞`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentApprox {
    field: Field,
    val: Valuation,
    coeffs: Vec<FqElem>,
    prec: Valuation,
}

impl fmt::Debug for LaurentApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentApprox[{}]({})", self.field, self)
    }
}

impl LaurentApprox {
    /// Builds `Σ dense[i] t^{start+i} + O(t^prec)` and normalizes.
    pub fn new(field: &Field, start: i64, dense: Vec<FqElem>, prec: Valuation) -> LaurentApprox {
        let mut dense = dense;
        if let Valuation::Finite(p) = prec {
            let keep = (p - start).max(0) as usize;
            dense.truncate(keep);
        }
        let Some(first) = dense.iter().position(|c| !c.is_zero()) else {
            return LaurentApprox {
                field: field.clone(),
                val: Valuation::Infinity,
                coeffs: Vec::new(),
                prec,
            };
        };
        let val = start + first as i64;
        let mut coeffs = dense.split_off(first);
        match prec {
            Valuation::Finite(p) => coeffs.resize((p - val) as usize, FqElem::ZERO),
            Valuation::Infinity => {
                while coeffs.last().is_some_and(|c| c.is_zero()) {
                    coeffs.pop();
                }
            }
        }
        LaurentApprox {
            field: field.clone(),
            val: Valuation::Finite(val),
            coeffs,
            prec,
        }
    }

    pub fn exact_zero(field: &Field) -> LaurentApprox {
        LaurentApprox::new(field, 0, Vec::new(), Valuation::Infinity)
    }

    /// `O(t^prec)`: nothing known except that the value lies in `t^prec O`.
    pub fn zero_mod(field: &Field, prec: i64) -> LaurentApprox {
        LaurentApprox::new(field, prec, Vec::new(), Valuation::Finite(prec))
    }

    pub fn one(field: &Field) -> LaurentApprox {
        LaurentApprox::monomial(field, FqElem::ONE, 0)
    }

    /// Exact `c * t^k`.
    pub fn monomial(field: &Field, c: FqElem, k: i64) -> LaurentApprox {
        LaurentApprox::new(field, k, vec![c], Valuation::Infinity)
    }

    pub fn constant(field: &Field, c: FqElem) -> LaurentApprox {
        LaurentApprox::monomial(field, c, 0)
    }

    pub fn from_poly(p: &PolyT) -> LaurentApprox {
        LaurentApprox::new(p.field(), 0, p.coeffs().to_vec(), Valuation::Infinity)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn val(&self) -> Valuation {
        self.val
    }

    pub fn prec(&self) -> Valuation {
        self.prec
    }

    /// Known coefficients starting at `t^val`.
    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_infinite()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.val.is_infinite() && self.prec.is_infinite()
    }

    /// Lower bound on the true valuation: `val`, or `prec` when no digit is known.
    pub fn val_lower_bound(&self) -> Valuation {
        match self.val {
            Valuation::Finite(_) => self.val,
            Valuation::Infinity => self.prec,
        }
    }

    /// Coefficient of `t^i`; errors when `i` is at or beyond the precision.
    pub fn coeff(&self, i: i64) -> Result<FqElem, ArithError> {
        if let Valuation::Finite(p) = self.prec {
            if i >= p {
                return Err(ArithError::PrecisionExhausted(i));
            }
        }
        Ok(match self.val {
            Valuation::Finite(v) if i >= v => self
                .coeffs
                .get((i - v) as usize)
                .copied()
                .unwrap_or(FqElem::ZERO),
            _ => FqElem::ZERO,
        })
    }

    /// Valuation and angular component. The exact zero gives `(∞, 0)`;
    /// an element with no known nonzero digit is an error.
    pub fn ord_and_ac(&self) -> Result<(Valuation, FqElem), ArithError> {
        match (self.val, self.prec) {
            (Valuation::Finite(v), _) => Ok((Valuation::Finite(v), self.coeffs[0])),
            (Valuation::Infinity, Valuation::Infinity) => Ok((Valuation::Infinity, FqElem::ZERO)),
            (Valuation::Infinity, Valuation::Finite(p)) => Err(ArithError::PrecisionExhausted(p)),
        }
    }

    pub fn ord(&self) -> Result<Valuation, ArithError> {
        self.ord_and_ac().map(|(v, _)| v)
    }

    pub fn ac(&self) -> Result<FqElem, ArithError> {
        self.ord_and_ac().map(|(_, a)| a)
    }

    /// True when the element is certainly in `F_q[[t]]`.
    pub fn is_integral(&self) -> bool {
        self.val_lower_bound() >= Valuation::Finite(0)
    }

    /// Lowers the precision to `min(prec, p)`.
    pub fn truncated(&self, p: i64) -> LaurentApprox {
        let prec = self.prec.min(Valuation::Finite(p));
        self.rebuild(prec)
    }

    /// Forgets the `O(t^prec)` term: the known digits as an exact element.
    pub fn known_part(&self) -> LaurentApprox {
        LaurentApprox::new(
            &self.field,
            self.val.finite().unwrap_or(0),
            self.coeffs.clone(),
            Valuation::Infinity,
        )
    }

    fn rebuild(&self, prec: Valuation) -> LaurentApprox {
        LaurentApprox::new(
            &self.field,
            self.val.finite().unwrap_or(0),
            self.coeffs.clone(),
            prec,
        )
    }

    /// Known digits as a polynomial in `t`; `None` if a negative power is present.
    pub fn to_poly(&self) -> Option<PolyT> {
        match self.val {
            Valuation::Infinity => Some(PolyT::zero(&self.field)),
            Valuation::Finite(v) if v >= 0 => {
                let mut dense = vec![FqElem::ZERO; v as usize];
                dense.extend_from_slice(&self.coeffs);
                Some(PolyT::from_coeffs(&self.field, dense))
            }
            Valuation::Finite(_) => None,
        }
    }

    fn end(&self) -> Valuation {
        match (self.val, self.prec) {
            (_, Valuation::Finite(p)) => Valuation::Finite(p),
            (Valuation::Finite(v), Valuation::Infinity) => {
                Valuation::Finite(v + self.coeffs.len() as i64)
            }
            (Valuation::Infinity, Valuation::Infinity) => Valuation::Finite(i64::MIN),
        }
    }

    pub fn checked_add(&self, other: &LaurentApprox) -> Result<LaurentApprox, ArithError> {
        check_same(&self.field, &other.field)?;
        let prec = self.prec.min(other.prec);
        let start = self.val_lower_bound().min(other.val_lower_bound());
        let Valuation::Finite(start) = start else {
            return Ok(LaurentApprox::exact_zero(&self.field));
        };
        let end = match prec {
            Valuation::Finite(p) => p,
            Valuation::Infinity => {
                let (a, b) = (self.end(), other.end());
                a.max(b).finite().unwrap_or(start)
            }
        };
        let f = &self.field;
        let dense: Vec<FqElem> = (start..end.max(start))
            .map(|i| {
                let a = self.coeff(i).unwrap_or(FqElem::ZERO);
                let b = other.coeff(i).unwrap_or(FqElem::ZERO);
                f.add(a, b)
            })
            .collect();
        Ok(LaurentApprox::new(f, start, dense, prec))
    }

    pub fn neg(&self) -> LaurentApprox {
        let f = &self.field;
        LaurentApprox {
            field: f.clone(),
            val: self.val,
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
            prec: self.prec,
        }
    }

    pub fn checked_sub(&self, other: &LaurentApprox) -> Result<LaurentApprox, ArithError> {
        self.checked_add(&other.neg())
    }

    pub fn scale(&self, c: FqElem) -> LaurentApprox {
        let f = &self.field;
        let dense = self.coeffs.iter().map(|&x| f.mul(x, c)).collect();
        LaurentApprox::new(f, self.val.finite().unwrap_or(0), dense, self.prec)
    }

    /// Multiplication by `t^k` (exact shift, precision shifts too).
    pub fn shift(&self, k: i64) -> LaurentApprox {
        LaurentApprox {
            field: self.field.clone(),
            val: self.val.plus(k),
            coeffs: self.coeffs.clone(),
            prec: self.prec.plus(k),
        }
    }

    /// Product; precision is `min(v1 + p2, v2 + p1)`.
    pub fn checked_mul(&self, other: &LaurentApprox) -> Result<LaurentApprox, ArithError> {
        check_same(&self.field, &other.field)?;
        let f = &self.field;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(LaurentApprox::exact_zero(f));
        }
        let (va, vb) = (self.val_lower_bound(), other.val_lower_bound());
        let prec = va.add(other.prec).min(vb.add(self.prec));
        let (Valuation::Finite(v1), Valuation::Finite(v2)) = (self.val, other.val) else {
            let p = prec.finite().expect("an inexact operand bounds the precision");
            return Ok(LaurentApprox::zero_mod(f, p));
        };
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if let Valuation::Finite(p) = prec {
            len = len.min((p - v1 - v2).max(0) as usize);
        }
        let mut out = vec![FqElem::ZERO; len];
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Ok(LaurentApprox::new(f, v1 + v2, out, prec))
    }

    /// Inverse, with the result precision capped at `cap` when the exact
    /// inverse would be an infinite series.
    pub fn inv(&self, cap: i64) -> Result<LaurentApprox, ArithError> {
        let f = &self.field;
        let v = match (self.val, self.prec) {
            (Valuation::Finite(v), _) => v,
            (Valuation::Infinity, Valuation::Infinity) => return Err(ArithError::DivisionByZero),
            (Valuation::Infinity, Valuation::Finite(p)) => {
                return Err(ArithError::PrecisionExhausted(p))
            }
        };
        let u0_inv = f.inv(self.coeffs[0]).expect("normalized leading coefficient");
        if self.prec.is_infinite() && self.coeffs.len() == 1 {
            return Ok(LaurentApprox::monomial(f, u0_inv, -v));
        }
        let rel = match self.prec {
            Valuation::Finite(p) => (p - v).min(cap + v),
            Valuation::Infinity => cap + v,
        };
        if rel <= 0 {
            return Ok(LaurentApprox::zero_mod(f, -v + rel));
        }
        let rel = rel as usize;
        let mut w = Vec::with_capacity(rel);
        w.push(u0_inv);
        for k in 1..rel {
            let mut acc = FqElem::ZERO;
            for i in 1..=k.min(self.coeffs.len() - 1) {
                acc = f.add(acc, f.mul(self.coeffs[i], w[k - i]));
            }
            w.push(f.neg(f.mul(acc, u0_inv)));
        }
        Ok(LaurentApprox::new(f, -v, w, Valuation::Finite(-v + rel as i64)))
    }

    pub fn div(&self, other: &LaurentApprox, cap: i64) -> Result<LaurentApprox, ArithError> {
        self.checked_mul(&other.inv(cap)?)
    }

    pub fn pow(&self, e: u32) -> LaurentApprox {
        let mut acc = LaurentApprox::one(&self.field);
        for _ in 0..e {
            acc = acc.checked_mul(self).expect("same field");
        }
        acc
    }
}

impl fmt::Display for LaurentApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.val {
            Valuation::Infinity => match self.prec {
                Valuation::Infinity => write!(f, "0"),
                Valuation::Finite(p) => write!(f, "O(t^{p})"),
            },
            Valuation::Finite(v) => {
                write!(f, "t^{v}*(")?;
                let mut first = true;
                for (i, c) in self.coeffs.iter().enumerate() {
                    if c.is_zero() && i > 0 {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    match i {
                        0 => write!(f, "{c}")?,
                        1 => write!(f, "{c}*t")?,
                        _ => write!(f, "{c}*t^{i}")?,
                    }
                }
                write!(f, ")")?;
                if let Valuation::Finite(p) = self.prec {
                    write!(f, " + O(t^{p})")?;
                }
                Ok(())
            }
        }
    }
}
