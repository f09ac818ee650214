use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use super::{check_same, ArithError, Degree, Field, FqElem, Valuation};

/// A polynomial in `t` over `F_q`, coefficients low degree first.
///
/// The coefficient vector never ends in a zero, so the zero polynomial is
/// the empty vector.
#[derive(Clone)]
pub struct PolyT {
    field: Field,
    coeffs: Vec<FqElem>,
}

impl PartialEq for PolyT {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}

impl Eq for PolyT {}

impl Hash for PolyT {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for PolyT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyT[{}]({})", self.field, self)
    }
}

impl PolyT {
    pub fn from_coeffs(field: &Field, mut coeffs: Vec<FqElem>) -> PolyT {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyT {
            field: field.clone(),
            coeffs,
        }
    }

    /// Coefficients given as integers, each mapped through `Z -> F_p`.
    pub fn from_ints(field: &Field, ints: &[i64]) -> PolyT {
        let coeffs = ints.iter().map(|&n| field.from_int(n)).collect();
        PolyT::from_coeffs(field, coeffs)
    }

    pub fn zero(field: &Field) -> PolyT {
        PolyT {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &Field) -> PolyT {
        PolyT::constant(field, FqElem::ONE)
    }

    pub fn constant(field: &Field, c: FqElem) -> PolyT {
        PolyT::from_coeffs(field, vec![c])
    }

    /// `c * t^k`.
    pub fn monomial(field: &Field, c: FqElem, k: usize) -> PolyT {
        let mut coeffs = vec![FqElem::ZERO; k + 1];
        coeffs[k] = c;
        PolyT::from_coeffs(field, coeffs)
    }

    pub fn t(field: &Field) -> PolyT {
        PolyT::monomial(field, FqElem::ONE, 1)
    }

    /// The `idx`-th element of `F_q[t]_n`, reading `idx` in base `q`
    /// with the constant coefficient as the least significant digit.
    pub fn from_index(field: &Field, mut idx: u64, n: usize) -> PolyT {
        let q = field.q() as u64;
        let mut coeffs = Vec::with_capacity(n);
        for _ in 0..n {
            coeffs.push(FqElem((idx % q) as u32));
            idx /= q;
        }
        PolyT::from_coeffs(field, coeffs)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    /// Coefficient of `t^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs.get(i).copied().unwrap_or(FqElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == FqElem::ONE
    }

    pub fn deg(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    /// Degree as a signed integer, `-1` for zero.
    pub fn deg_i64(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    /// `t`-adic valuation; `+∞` for zero.
    pub fn ord_t(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(i) => Valuation::Finite(i as i64),
            None => Valuation::Infinity,
        }
    }

    pub fn leading(&self) -> FqElem {
        self.coeffs.last().copied().unwrap_or(FqElem::ZERO)
    }

    /// Coefficients padded with zeros to length `n` (used for canonical ordering).
    pub fn padded_key(&self, n: usize) -> Vec<u32> {
        (0..n.max(self.coeffs.len()))
            .map(|i| self.coeff(i).index())
            .collect()
    }

    /// Lexicographic comparison on coefficient vectors, low degree first.
    pub fn canonical_cmp(&self, other: &PolyT) -> Ordering {
        let n = self.coeffs.len().max(other.coeffs.len());
        for i in 0..n {
            match self.coeff(i).cmp(&other.coeff(i)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    pub fn scale(&self, c: FqElem) -> PolyT {
        let f = &self.field;
        PolyT::from_coeffs(f, self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: usize) -> PolyT {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![FqElem::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        PolyT {
            field: self.field.clone(),
            coeffs,
        }
    }

    /// Reduction modulo `t^n`.
    pub fn truncate(&self, n: usize) -> PolyT {
        PolyT::from_coeffs(
            &self.field,
            self.coeffs.iter().take(n).copied().collect(),
        )
    }

    pub fn checked_add(&self, other: &PolyT) -> Result<PolyT, ArithError> {
        check_same(&self.field, &other.field)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        Ok(PolyT::from_coeffs(f, coeffs))
    }

    pub fn checked_sub(&self, other: &PolyT) -> Result<PolyT, ArithError> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &PolyT) -> Result<PolyT, ArithError> {
        check_same(&self.field, &other.field)?;
        if self.is_zero() || other.is_zero() {
            return Ok(PolyT::zero(&self.field));
        }
        let f = &self.field;
        let mut out = vec![FqElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Ok(PolyT::from_coeffs(f, out))
    }

    fn neg_ref(&self) -> PolyT {
        let f = &self.field;
        PolyT::from_coeffs(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn pow(&self, e: u32) -> PolyT {
        let mut acc = PolyT::one(&self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &PolyT) -> Result<(PolyT, PolyT), ArithError> {
        check_same(&self.field, &divisor.field)?;
        if divisor.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let f = &self.field;
        let db = divisor.coeffs.len() - 1;
        let inv_lead = f.inv(divisor.leading()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= db {
            return Ok((PolyT::zero(f), self.clone()));
        }
        let mut quot = vec![FqElem::ZERO; rem.len() - db];
        for k in (0..quot.len()).rev() {
            let c = f.mul(rem[k + db], inv_lead);
            if c.is_zero() {
                continue;
            }
            quot[k] = c;
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = f.sub(rem[k + i], f.mul(c, d));
            }
        }
        rem.truncate(db);
        Ok((PolyT::from_coeffs(f, quot), PolyT::from_coeffs(f, rem)))
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &PolyT) -> Result<PolyT, ArithError> {
        let (q, r) = self.divmod(divisor)?;
        if !r.is_zero() {
            return Err(ArithError::BadElement(format!(
                "{self} is not divisible by {divisor}"
            )));
        }
        Ok(q)
    }

    /// Monic greatest common divisor (`gcd(0, 0) = 0`).
    pub fn gcd(&self, other: &PolyT) -> Result<PolyT, ArithError> {
        check_same(&self.field, &other.field)?;
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divmod(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    pub fn monic(&self) -> PolyT {
        match self.field.inv(self.leading()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    /// Evaluation at a field element.
    pub fn eval(&self, x: FqElem) -> FqElem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(FqElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Substitution `t -> arg`.
    pub fn compose(&self, arg: &PolyT) -> Result<PolyT, ArithError> {
        check_same(&self.field, &arg.field)?;
        let mut acc = PolyT::zero(&self.field);
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * arg) + &PolyT::constant(&self.field, c);
        }
        Ok(acc)
    }

    /// Formal derivative in `t`.
    pub fn derivative(&self) -> PolyT {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(f.from_int(i as i64), c))
            .collect();
        PolyT::from_coeffs(f, coeffs)
    }

    /// Parses the text form, e.g. `3*t^2 + t + 4`.
    pub fn parse(field: &Field, s: &str) -> Result<PolyT, ArithError> {
        crate::text::parse_poly_t(field, s)
    }
}

impl fmt::Display for PolyT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let one = *c == FqElem::ONE;
            match (i, one) {
                (0, _) => write!(f, "{c}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{c}*t")?,
                (_, true) => write!(f, "t^{i}")?,
                (_, false) => write!(f, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a PolyT> for &'a PolyT {
            type Output = PolyT;
            /// Panics if the operands live in different fields.
            fn $method(self, rhs: &'a PolyT) -> PolyT {
                self.$checked(rhs).expect("PolyT operands over different fields")
            }
        }
        impl $trait<PolyT> for PolyT {
            type Output = PolyT;
            fn $method(self, rhs: PolyT) -> PolyT {
                (&self).$method(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl Neg for &PolyT {
    type Output = PolyT;
    fn neg(self) -> PolyT {
        self.neg_ref()
    }
}

impl Neg for PolyT {
    type Output = PolyT;
    fn neg(self) -> PolyT {
        self.neg_ref()
    }
}

/// `H(x) = q^{deg_t x}`, with `H(0) = 1`.
pub fn height(x: &PolyT) -> u128 {
    let q = x.field().q() as u128;
    match x.deg() {
        Degree::NegInfinity => 1,
        Degree::Finite(d) => q.checked_pow(d as u32).expect("height overflows u128"),
    }
}

/// Height of a tuple: the maximum over its coordinates.
pub fn height_tuple(xs: &[PolyT]) -> u128 {
    xs.iter().map(height).max().unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f5() -> Field {
        Field::new(5, 1).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let f = f5();
        let a = PolyT::from_ints(&f, &[1, 1]);
        let b = PolyT::from_ints(&f, &[-1, 1]);
        let prod = &a * &b;
        assert_eq!(prod, PolyT::from_ints(&f, &[4, 0, 1]));
        assert_eq!(prod.to_string(), "t^2 + 4");
    }

    #[test]
    fn gcd_finds_common_root() {
        let f = f5();
        let a = PolyT::from_ints(&f, &[4, 0, 1]);
        let b = PolyT::from_ints(&f, &[1, 1]);
        assert_eq!(a.gcd(&b).unwrap(), b);
        assert_eq!(a.eval(f.from_int(4)), FqElem::ZERO);
    }

    #[test]
    fn zero_degree_is_neg_infinity() {
        let f = f5();
        let z = PolyT::zero(&f);
        assert_eq!(z.deg(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Finite(0));
        assert_eq!(z.ord_t(), Valuation::Infinity);
    }

    #[test]
    fn divmod_errors() {
        let f = f5();
        let g = Field::new(7, 1).unwrap();
        let a = PolyT::from_ints(&f, &[1, 2]);
        assert_eq!(a.divmod(&PolyT::zero(&f)), Err(ArithError::DivisionByZero));
        let b = PolyT::from_ints(&g, &[1]);
        assert!(matches!(a.divmod(&b), Err(ArithError::FieldMismatch(..))));
        assert!(matches!(a.checked_add(&b), Err(ArithError::FieldMismatch(..))));
    }

    #[test]
    fn heights() {
        let f5 = f5();
        let f7 = Field::new(7, 1).unwrap();
        let f2 = Field::new(2, 1).unwrap();
        assert_eq!(height(&PolyT::from_ints(&f5, &[1, 0, 1])), 25);
        assert_eq!(height(&PolyT::from_ints(&f7, &[3])), 1);
        assert_eq!(height(&PolyT::zero(&f7)), 1);
        let pair = [PolyT::t(&f2), PolyT::monomial(&f2, FqElem::ONE, 3)];
        assert_eq!(height_tuple(&pair), 8);
    }

    #[test]
    fn compose_and_derivative() {
        let f = f5();
        // (t^2 + 1) at t -> t + 1 is t^2 + 2t + 2.
        let p = PolyT::from_ints(&f, &[1, 0, 1]);
        let arg = PolyT::from_ints(&f, &[1, 1]);
        assert_eq!(p.compose(&arg).unwrap(), PolyT::from_ints(&f, &[2, 2, 1]));
        assert_eq!(p.derivative(), PolyT::from_ints(&f, &[0, 2]));
    }

    #[test]
    fn enumeration_index_covers_bounded_polys() {
        let f = Field::new(3, 1).unwrap();
        let all: std::collections::HashSet<PolyT> =
            (0..27).map(|i| PolyT::from_index(&f, i, 3)).collect();
        assert_eq!(all.len(), 27);
        assert!(all.iter().all(|p| p.deg_i64() < 3));
    }

    fn arb_poly(field: Field) -> impl Strategy<Value = PolyT> {
        proptest::collection::vec(0u32..field.q(), 0..6).prop_map(move |cs| {
            let coeffs = cs.into_iter().map(|c| field.elem(c).unwrap()).collect();
            PolyT::from_coeffs(&field, coeffs)
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(
            a in arb_poly(Field::new(3, 2).unwrap()),
            b in arb_poly(Field::new(3, 2).unwrap()),
            c in arb_poly(Field::new(3, 2).unwrap()),
        ) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn divmod_reconstructs(
            a in arb_poly(Field::new(7, 1).unwrap()),
            b in arb_poly(Field::new(7, 1).unwrap()),
        ) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.divmod(&b).unwrap();
            prop_assert!(r.deg() < b.deg());
            prop_assert_eq!(&(&q * &b) + &r, a);
        }
    }
}
