use num_traits::Float;

use super::lit;

/// Outcome of a bisection: the final enclosure and how many interior
/// evaluations were spent.
#[derive(Debug, Clone, Copy)]
pub struct Bisection<T> {
    pub lo: T,
    pub hi: T,
    pub evaluations: usize,
}

impl<T: Float> Bisection<T> {
    pub fn midpoint(&self) -> T {
        self.lo + (self.hi - self.lo) / lit(2.0)
    }
}

/// Bisects `[lo, hi]` until its width is at most `rel_tol · |lo|` (or the
/// interval cannot shrink in floating point). `sign_lo` is the sign of `f`
/// at `lo`; the caller guarantees the opposite sign at `hi`.
pub fn bisect<T: Float, E, F: FnMut(T) -> Result<T, E>>(
    mut f: F,
    mut lo: T,
    mut hi: T,
    sign_lo: T,
    rel_tol: T,
) -> Result<Bisection<T>, E> {
    let mut evaluations = 0;
    while hi - lo > rel_tol * lo.abs().max(hi.abs()) {
        let mid = lo + (hi - lo) / lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid)?;
        evaluations += 1;
        if v == T::zero() {
            return Ok(Bisection { lo: mid, hi: mid, evaluations });
        }
        if v.signum() == sign_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bisection { lo, hi, evaluations })
}
