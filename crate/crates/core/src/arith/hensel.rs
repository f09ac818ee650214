use super::{ArithError, FqElem, LaurentApprox, Valuation};

fn horner(f: &[LaurentApprox], y: &LaurentApprox) -> Result<LaurentApprox, ArithError> {
    let field = y.field();
    let mut acc = LaurentApprox::exact_zero(field);
    for c in f.iter().rev() {
        acc = acc.checked_mul(y)?.checked_add(c)?;
    }
    Ok(acc)
}

fn derivative(f: &[LaurentApprox]) -> Vec<LaurentApprox> {
    f.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.scale(c.field().from_int(k as i64)))
        .collect()
}

fn residue(c: &LaurentApprox) -> Result<FqElem, ArithError> {
    c.coeff(0)
}

/// Lifts a simple root `y0` of `f mod t` to the unique `y ∈ F_q[[t]]` with
/// `y ≡ y0 (mod t)` and `f(y) ≡ 0 (mod t^prec)`.
///
/// `f` is given by its coefficients in `y`, lowest degree first. All
/// coefficients must be integral and known to at least `O(t^prec)`.
pub fn hensel_lift(
    f: &[LaurentApprox],
    y0: FqElem,
    prec: i64,
) -> Result<LaurentApprox, ArithError> {
    let Some(first) = f.first() else {
        return Err(ArithError::NotARoot);
    };
    let field = first.field().clone();
    for c in f {
        super::check_same(&field, c.field())?;
        if let Valuation::Finite(p) = c.prec() {
            if p < prec {
                return Err(ArithError::InsufficientPrecision {
                    needed: prec,
                    have: p,
                });
            }
        }
        if !c.is_integral() {
            return Err(ArithError::NotIntegral(c.val().finite().unwrap_or(0)));
        }
    }
    let df = derivative(f);

    let eval_res = |coeffs: &[LaurentApprox]| -> Result<FqElem, ArithError> {
        let mut acc = FqElem::ZERO;
        for c in coeffs.iter().rev() {
            acc = field.add(field.mul(acc, y0), residue(c)?);
        }
        Ok(acc)
    };
    if !eval_res(f)?.is_zero() {
        return Err(ArithError::NotARoot);
    }
    if eval_res(&df)?.is_zero() {
        return Err(ArithError::NonSimpleRoot);
    }
    if prec <= 1 {
        return Ok(LaurentApprox::constant(&field, y0).truncated(prec));
    }

    // Newton iteration on an exact iterate; each step at least doubles the
    // number of correct digits.
    let mut y = LaurentApprox::constant(&field, y0);
    for _ in 0..(2 * prec as usize + 4) {
        let fy = horner(f, &y)?;
        if fy.val_lower_bound() >= Valuation::Finite(prec) {
            return Ok(y.truncated(prec));
        }
        let dfy = horner(&df, &y)?;
        let step = fy.div(&dfy, prec)?;
        y = y.checked_sub(&step)?.truncated(prec).known_part();
    }
    unreachable!("Newton iteration on a simple root converges")
}
