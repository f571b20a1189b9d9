use num_traits::Float;
use serde::{Deserialize, Serialize};

/// Ordinary least-squares line `y ≈ slope · x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
}

/// Returns `None` when fewer than two points are given or all abscissae coincide.
pub fn fit_line<T: Float>(xs: &[T], ys: &[T]) -> Option<LineFit<T>> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let nf = T::from(n).expect("count");
    let mx = xs.iter().fold(T::zero(), |s, &x| s + x) / nf;
    let my = ys.iter().fold(T::zero(), |s, &y| s + y) / nf;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
        syy = syy + (y - my) * (y - my);
    }
    let scale = xs.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    if sxx <= T::epsilon() * T::epsilon() * scale * scale * nf {
        return None;
    }
    let slope = sxx.recip() * sxy;
    let intercept = my - slope * mx;
    let r_squared = if syy == T::zero() { T::one() } else { sxy * sxy / (sxx * syy) };
    Some(LineFit { slope, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 + 5.0 * x).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.slope - 5.0).abs() < 1e-13);
        assert!((f.intercept - 3.0).abs() < 1e-13);
        assert!((f.r_squared - 1.0).abs() < 1e-13);
    }

    #[test]
    fn degenerate_abscissae() {
        assert!(fit_line(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_none());
    }
}
