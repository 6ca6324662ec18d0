//! Bracketed scalar root finding: bisection with a guarded Newton polish.

use crate::error::{Error, Result};

const MAX_ITER: usize = 400;

/// Finds a root of `f` in `[lo, hi]` given a sign change, bisecting until the
/// bracket collapses to adjacent floating-point numbers.
pub fn bisect<F>(f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketNotFound(format!(
            "no sign change on [{a}, {b}]: f = {fa:e}, {fb:e}"
        )));
    }
    for _ in 0..MAX_ITER {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let fb = f(b);
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

/// Bisection to a coarse width followed by Newton iterations that are only
/// accepted while they stay inside the current bracket.
pub fn bisect_newton<F, D>(f: F, df: D, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketNotFound(format!(
            "no sign change on [{a}, {b}]: f = {fa:e}, {fb:e}"
        )));
    }
    let coarse = 1e-6 * (b - a);
    let mut x = 0.5 * (a + b);
    for _ in 0..MAX_ITER {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            break;
        }
        let width = b - a;
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        // shrink the bracket around x
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let newton = if width < coarse {
            let d = df(x);
            if d != 0.0 && d.is_finite() {
                Some(x - fx / d)
            } else {
                None
            }
        } else {
            None
        };
        x = match newton {
            Some(xn) if xn > a && xn < b && (xn - x).abs() < 0.5 * width => xn,
            _ => a + 0.5 * (b - a),
        };
        if x <= a || x >= b {
            break;
        }
    }
    let candidates = [a, x, b];
    Ok(candidates
        .into_iter()
        .filter(|c| c.is_finite())
        .min_by(|u, v| f(*u).abs().total_cmp(&f(*v).abs()))
        .unwrap_or(x))
}
