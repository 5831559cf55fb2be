//! One-dimensional minimization and root bracketing.

use crate::error::{Error, Result};
use crate::real::Real;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Result of a bracketed one-dimensional minimization.
#[derive(Debug, Clone, Copy)]
pub struct Minimum<T> {
    pub x: T,
    pub value: T,
    pub iterations: usize,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping once
/// the bracket is narrower than `width_tol`.
///
/// The endpoints are evaluated as well, so a minimum sitting on the boundary
/// of the interval is returned exactly.
pub fn golden_section<T, F>(mut f: F, lo: T, hi: T, width_tol: T, max_iter: usize) -> Result<Minimum<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if !(lo <= hi) {
        return Err(Error::InvalidArgument(format!("golden_section bracket [{lo}, {hi}]")));
    }
    let r = T::lit(INV_PHI);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while b - a > width_tol {
        if iterations >= max_iter {
            return Err(Error::NonConvergence {
                what: "golden-section search",
                iterations,
                residual: (b - a).as_f64(),
            });
        }
        iterations += 1;
        // Ties move left so that equal values resolve to the smaller abscissa.
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    Ok(Minimum { x: best.0, value: best.1, iterations })
}

/// Minimizes `f` on `[lo, hi]` by evaluating it on `grid` equally spaced
/// points, then refining the best cell by golden section.
///
/// The coarse pass guards the refinement against a non-unimodal objective.
pub fn scan_then_golden<T, F>(mut f: F, lo: T, hi: T, grid: usize, width_tol: T, max_iter: usize) -> Result<Minimum<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let grid = grid.max(2);
    let step = (hi - lo) / T::from_count(grid - 1);
    let mut best_i = 0;
    let mut best_v = T::infinity();
    for i in 0..grid {
        let v = f(lo + step * T::from_count(i));
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = lo + step * T::from_count(best_i.saturating_sub(1));
    let b = (lo + step * T::from_count((best_i + 1).min(grid - 1))).min(hi);
    golden_section(f, a, b, width_tol, max_iter)
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Returns the midpoint of the final bracket once its width drops below
/// `x_tol`, `|f| <= f_tol`, or the bracket can no longer be split.
pub fn bisect<T, F>(mut f: F, lo: T, hi: T, x_tol: T, f_tol: T, max_iter: usize) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::BracketFailure(format!("bisection on [{a}, {b}]: f = {fa}, {fb} have the same sign")));
    }
    for _ in 0..max_iter {
        let m = a + (b - a) / T::lit(2.0);
        if m == a || m == b {
            return Ok(m);
        }
        let fm = f(m)?;
        if fm.abs() <= f_tol || (b - a).abs() <= x_tol {
            return Ok(m);
        }
        if (fm > T::zero()) == (fa > T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Err(Error::NonConvergence { what: "bisection", iterations: max_iter, residual: (b - a).abs().as_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let m = golden_section(|x: f64| (x - 1.3).powi(2) + 2.0, 0.0, 5.0, 1e-10, 500).unwrap();
        assert!((m.x - 1.3).abs() < 1e-7);
        assert_eq!(m.value, 2.0 + (m.x - 1.3).powi(2));
    }

    #[test]
    fn golden_returns_boundary_minimum() {
        let m = golden_section(|x: f64| x, 0.0, 1.0, 1e-10, 500).unwrap();
        assert_eq!(m.x, 0.0);
    }

    #[test]
    fn scan_escapes_local_minimum() {
        // local min near 0.5, global near 3.
        let f = |x: f64| (x - 0.5).powi(2) * (x - 3.0).powi(2) - 0.1 * x;
        let m = scan_then_golden(f, 0.0, 4.0, 40, 1e-10, 500).unwrap();
        assert!((m.x - 3.0).abs() < 0.1);
    }

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x: f64| Ok(x * x - 2.0), 0.0, 2.0, 1e-14, 0.0, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_rejects_unbracketed() {
        assert!(matches!(bisect(|x: f64| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 0.0, 100), Err(Error::BracketFailure(_))));
    }
}
