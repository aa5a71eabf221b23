//! Bracketing root finder: bisection safeguarded secant steps.


use crate::{Error, Result};

const MAX_ITER: usize = 500;

/// Root of `f` in `[lo, hi]`, returned once the bracket is narrower than
/// `tol` (or `f` vanishes exactly).
///
/// Each iteration tries a secant step through the bracket ends; the step is
/// kept only if it lands strictly inside the bracket, and a plain bisection
/// is forced whenever two consecutive steps fail to halve the bracket.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo <= hi) || !(tol > 0.0) {
        return Err(Error::Domain("find_root needs lo <= hi and tol > 0"));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let mut width_two_steps_ago = f64::INFINITY;
    let mut width_one_step_ago = b - a;
    for _ in 0..MAX_ITER {
        let width = b - a;
        if width <= tol {
            break;
        }
        let force_bisect = width > 0.5 * width_two_steps_ago;
        let mid = 0.5 * (a + b);
        let mut x = mid;
        if !force_bisect {
            let s = b - fb * (b - a) / (fb - fa);
            if s > a && s < b && s.is_finite() {
                x = s;
            }
        }
        if !(x > a && x < b) {
            // Bracket has collapsed to adjacent floats.
            break;
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        width_two_steps_ago = width_one_step_ago;
        width_one_step_ago = width;
    }
    // Return the end with the smaller residual.
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let tol = 1e-14;
        let r = find_root(|x| x * x - 2.0, 1.0, 2.0, tol).unwrap();
        assert!((r - 2f64.sqrt()).abs() <= 2.0 * tol);
    }

    #[test]
    fn identity_root_at_zero() {
        let r = find_root(|x| x, -1.0, 1.0, 1e-12).unwrap();
        assert!(r.abs() <= 1e-12);
    }

    #[test]
    fn no_sign_change() {
        assert_eq!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-8),
            Err(Error::NoSignChange { lo: -1.0, hi: 1.0 })
        );
    }

    #[test]
    fn flat_secant_falls_back_to_bisection() {
        // Very asymmetric function: secant steps crawl, bisection must kick in.
        let r = find_root(|x| if x < 0.3 { -1e-300 } else { 1.0 }, 0.0, 1.0, 1e-12).unwrap();
        assert!((r - 0.3).abs() < 1e-11);
    }
}
