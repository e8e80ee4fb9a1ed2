//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// ∫_a^b f with absolute error target `tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "no convergence on [{a}, {b}], last correction {delta:e}"
        )));
    }
    Ok(step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Splits [a, b] at the given interior points and integrates each piece.
pub fn simpson_pieces<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], tol: f64) -> Result<f64> {
    let span = breaks.last().unwrap_or(&0.0) - breaks.first().unwrap_or(&0.0);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let share = if span > 0.0 { (w[1] - w[0]) / span } else { 1.0 };
            total += simpson(f, w[0], w[1], tol * share)?;
        }
    }
    Ok(total)
}

/// Uniform panels of width at most `width` on [a, b], integrated one at a time.
pub fn simpson_panels<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    width: f64,
    tol: f64,
) -> Result<f64> {
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let lo = a + i as f64 * h;
        total += simpson(f, lo, lo + h, tol / n as f64)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_exponentials() {
        let v = simpson(&|x: f64| x * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        let v = simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn kinks_need_breakpoints() {
        let f = |x: f64| (1.0 - 2.0 * x.abs()).max(0.0);
        let v = simpson_pieces(&f, &[-0.5, 0.0, 0.5], 1e-12).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_panels() {
        let v = simpson_panels(&|x: f64| (x).cos(), 0.0, 100.0, 0.5, 1e-10).unwrap();
        assert!((v - 100f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn nan_is_reported() {
        assert!(simpson(&|_x: f64| f64::NAN, 0.0, 1.0, 1e-6).is_err());
    }
}
