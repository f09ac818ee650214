//! Finite fields `F_{p^a}` with a canonical defining polynomial.
//!
//! Elements are encoded as integers `Σ c_i p^i` over their coefficient
//! vector (low degree first). Multiplication goes through discrete log
//! tables built once per field; fields are interned so repeated
//! construction is cheap and yields the same tables.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::ArithError;

/// Largest field order accepted by [`Field::new`].
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// An element of a finite field, stored as its base-`p` coefficient encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FqElem(pub(crate) u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    /// Integer encoding in `0..q`.
    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Description of `F_{p^a}`: characteristic, degree, and defining modulus.
#[derive(Debug)]
pub struct FieldDesc {
    p: u32,
    a: u32,
    q: u32,
    /// Monic modulus, `a + 1` coefficients, low degree first.
    modulus: Vec<u32>,
    /// `exp[k] = g^k` for a fixed primitive element `g`, `k < q - 1`.
    exp: Vec<u32>,
    /// `log[x]` for nonzero `x`; `log[0]` unused.
    log: Vec<u32>,
}

/// Shared handle to an interned [`FieldDesc`].
#[derive(Clone)]
pub struct Field(Arc<FieldDesc>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.a == other.0.a)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({}^{})", self.0.p, self.0.a)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.0.p, self.0.a)
    }
}

fn registry() -> &'static Mutex<HashMap<(u32, u32), Field>> {
    static FIELDS: OnceLock<Mutex<HashMap<(u32, u32), Field>>> = OnceLock::new();
    FIELDS.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomial helpers over F_p, used only while building tables.

fn poly_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem(mut a: Vec<u32>, b: &[u32], p: u32) -> Vec<u32> {
    let db = b.len() - 1;
    let inv_lead = modinv(b[db], p);
    poly_trim(&mut a);
    while a.len() > db {
        let shift = a.len() - 1 - db;
        let factor = (a[a.len() - 1] as u64 * inv_lead as u64 % p as u64) as u32;
        for (i, &bc) in b.iter().enumerate() {
            let sub = (factor as u64 * bc as u64 % p as u64) as u32;
            let slot = &mut a[shift + i];
            *slot = (*slot + p - sub) % p;
        }
        poly_trim(&mut a);
    }
    a
}

fn modpow(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

fn modinv(x: u32, p: u32) -> u32 {
    modpow(x as u64, p as u64 - 2, p as u64) as u32
}

/// Monic polynomials of degree `deg` over `F_p`, lexicographic with the
/// constant coefficient most significant.
fn monic_polys(p: u32, deg: u32) -> impl Iterator<Item = Vec<u32>> {
    let count = (p as u64).pow(deg);
    (0..count).map(move |mut idx| {
        let mut c = vec![0u32; deg as usize + 1];
        for i in (0..deg as usize).rev() {
            c[i] = (idx % p as u64) as u32;
            idx /= p as u64;
        }
        c[deg as usize] = 1;
        c
    })
}

/// Trial factorization: no monic factor of degree `1..=deg/2`.
pub(crate) fn is_irreducible_mod_p(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() as u32 - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for cand in monic_polys(p, d) {
            if poly_rem(poly.to_vec(), &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn canonical_modulus(p: u32, a: u32) -> Vec<u32> {
    monic_polys(p, a)
        .find(|m| is_irreducible_mod_p(m, p))
        .expect("an irreducible polynomial of every degree exists")
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn decode(mut x: u32, p: u32, a: u32) -> Vec<u32> {
    (0..a)
        .map(|_| {
            let c = x % p;
            x /= p;
            c
        })
        .collect()
}

fn slow_mul(x: u32, y: u32, p: u32, a: u32, modulus: &[u32]) -> u32 {
    let xs = decode(x, p, a);
    let ys = decode(y, p, a);
    let mut prod = vec![0u32; 2 * a as usize];
    for (i, &xc) in xs.iter().enumerate() {
        for (j, &yc) in ys.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + xc as u64 * yc as u64) % p as u64) as u32;
        }
    }
    let mut r = poly_rem(prod, modulus, p);
    r.resize(a as usize, 0);
    encode(&r, p)
}

impl FieldDesc {
    fn build(p: u32, a: u32) -> FieldDesc {
        let q = p.pow(a);
        let modulus = canonical_modulus(p, a);
        let order = q - 1;
        let mut exp = vec![0u32; order.max(1) as usize];
        let mut log = vec![0u32; q as usize];
        if q == 2 {
            exp[0] = 1;
            log[1] = 0;
        } else {
            // Smallest encoding of a primitive element.
            for g in 2..q {
                let mut x = 1u32;
                let mut ok = true;
                for k in 0..order {
                    if k > 0 && x == 1 {
                        ok = false;
                        break;
                    }
                    exp[k as usize] = x;
                    x = slow_mul(x, g, p, a, &modulus);
                }
                if ok && x == 1 {
                    break;
                }
            }
            for (k, &v) in exp.iter().enumerate() {
                log[v as usize] = k as u32;
            }
        }
        FieldDesc {
            p,
            a,
            q,
            modulus,
            exp,
            log,
        }
    }
}

impl Field {
    /// The canonical field `F_{p^a}`. Repeated calls return the same handle.
    pub fn new(p: u32, a: u32) -> Result<Field, ArithError> {
        if a < 1 {
            return Err(ArithError::BadExtensionDegree(a));
        }
        if !is_prime(p as u64) {
            return Err(ArithError::NotPrime(p as u64));
        }
        let order = (p as u64).checked_pow(a).filter(|&q| q <= MAX_FIELD_ORDER);
        if order.is_none() {
            return Err(ArithError::FieldTooLarge { p, a });
        }
        let mut reg = registry().lock().expect("field registry poisoned");
        Ok(reg
            .entry((p, a))
            .or_insert_with(|| Field(Arc::new(FieldDesc::build(p, a))))
            .clone())
    }

    /// Parses the `p^a` notation (a bare `p` means `a = 1`).
    pub fn parse(s: &str) -> Result<Field, ArithError> {
        let bad = || ArithError::Parse {
            pos: 0,
            msg: format!("expected field as p^a, got {s:?}"),
        };
        let (p, a) = match s.trim().split_once('^') {
            Some((p, a)) => (p.trim(), a.trim()),
            None => (s.trim(), "1"),
        };
        let p: u32 = p.parse().map_err(|_| bad())?;
        let a: u32 = a.parse().map_err(|_| bad())?;
        Field::new(p, a)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn a(&self) -> u32 {
        self.0.a
    }

    /// Field order `q = p^a`.
    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Defining modulus, low degree first, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FqElem {
        FqElem::ZERO
    }

    pub fn one(&self) -> FqElem {
        FqElem::ONE
    }

    /// Element with the given encoding; `None` when `idx >= q`.
    pub fn elem(&self, idx: u32) -> Option<FqElem> {
        (idx < self.q()).then_some(FqElem(idx))
    }

    /// Image of an integer under `Z -> F_p ⊆ F_q`.
    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.p() as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FqElem, ArithError> {
        if coeffs.len() != self.a() as usize || coeffs.iter().any(|&c| c >= self.p()) {
            return Err(ArithError::BadElement(format!("{coeffs:?}")));
        }
        Ok(FqElem(encode(coeffs, self.p())))
    }

    /// Coefficient vector of length `a`, residues mod `p`.
    pub fn coeffs(&self, x: FqElem) -> Vec<u32> {
        decode(x.0, self.p(), self.a())
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q()).map(FqElem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FqElem> {
        (1..self.q()).map(FqElem)
    }

    #[inline]
    pub fn add(&self, x: FqElem, y: FqElem) -> FqElem {
        let p = self.0.p;
        if self.0.a == 1 {
            let s = x.0 + y.0;
            return FqElem(if s >= p { s - p } else { s });
        }
        let (mut xs, mut ys) = (x.0, y.0);
        let (mut out, mut scale) = (0u32, 1u32);
        while xs > 0 || ys > 0 {
            let s = (xs % p + ys % p) % p;
            out += s * scale;
            scale *= p;
            xs /= p;
            ys /= p;
        }
        FqElem(out)
    }

    #[inline]
    pub fn neg(&self, x: FqElem) -> FqElem {
        let p = self.0.p;
        if self.0.a == 1 {
            return FqElem(if x.0 == 0 { 0 } else { p - x.0 });
        }
        let (mut xs, mut out, mut scale) = (x.0, 0u32, 1u32);
        while xs > 0 {
            let c = xs % p;
            out += ((p - c) % p) * scale;
            scale *= p;
            xs /= p;
        }
        FqElem(out)
    }

    #[inline]
    pub fn sub(&self, x: FqElem, y: FqElem) -> FqElem {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: FqElem, y: FqElem) -> FqElem {
        if x.0 == 0 || y.0 == 0 {
            return FqElem::ZERO;
        }
        let d = &*self.0;
        let order = d.q - 1;
        let k = (d.log[x.0 as usize] + d.log[y.0 as usize]) % order;
        FqElem(d.exp[k as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, x: FqElem) -> Option<FqElem> {
        if x.is_zero() {
            return None;
        }
        let d = &*self.0;
        let order = d.q - 1;
        let k = (order - d.log[x.0 as usize]) % order;
        Some(FqElem(d.exp[k as usize]))
    }

    pub fn pow(&self, x: FqElem, e: u64) -> FqElem {
        if e == 0 {
            return FqElem::ONE;
        }
        if x.is_zero() {
            return FqElem::ZERO;
        }
        let d = &*self.0;
        let order = (d.q - 1) as u64;
        let k = (d.log[x.0 as usize] as u64 * (e % order)) % order;
        FqElem(d.exp[k as usize])
    }

    /// Discrete log with respect to the table generator.
    pub fn log(&self, x: FqElem) -> Option<u32> {
        (!x.is_zero()).then(|| self.0.log[x.0 as usize])
    }

    /// The primitive element used for the log tables.
    pub fn generator(&self) -> FqElem {
        if self.q() == 2 {
            FqElem::ONE
        } else {
            FqElem(self.0.exp[1])
        }
    }
}
