use num_traits::Float;

use super::lit;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
// Gauss weights on the odd Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

fn gk15<T: Float, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = (b - a) / lit(2.0);
    let mid = (a + b) / lit(2.0);
    let fc = f(mid);
    let mut k = fc * lit(WGK[7]);
    let mut g = fc * lit(WG[3]);
    for i in 0..7 {
        let dx = half * lit(XGK[i]);
        let s = f(mid - dx) + f(mid + dx);
        k = k + s * lit(WGK[i]);
        if i % 2 == 1 {
            g = g + s * lit(WG[i / 2]);
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of `f` on `[a, b]`.
///
/// Intervals with the largest error estimate are bisected until the summed
/// estimate drops below `rel_tol · |value|` (or `abs_floor`), or until
/// `max_intervals` is reached.
pub fn integrate_adaptive<T: Float, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    rel_tol: T,
    abs_floor: T,
    max_intervals: usize,
) -> Quadrature<T> {
    let mut pieces: Vec<(T, T, T, T)> = Vec::with_capacity(64);
    let (v, e) = gk15(&mut f, a, b);
    pieces.push((a, b, v, e));
    let mut evaluations = 15;
    loop {
        let value = pieces.iter().fold(T::zero(), |s, p| s + p.2);
        let error = pieces.iter().fold(T::zero(), |s, p| s + p.3);
        if error <= (rel_tol * value.abs()).max(abs_floor) || pieces.len() >= max_intervals {
            return Quadrature { value, error, evaluations };
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .fold((0usize, T::neg_infinity()), |best, (i, p)| {
                if p.3 > best.1 {
                    (i, p.3)
                } else {
                    best
                }
            });
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = (lo + hi) / lit(2.0);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        evaluations += 30;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_integrand() {
        let q = integrate_adaptive(|x: f64| x.exp(), 0.0, 1.0, 1e-12, 0.0, 100);
        assert!((q.value - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn bump_with_flat_ends() {
        let bump = |s: f64| {
            if s <= 0.0 || s >= 1.0 {
                0.0
            } else {
                (-1.0 / (s * (1.0 - s))).exp()
            }
        };
        let q = integrate_adaptive(bump, 0.0, 1.0, 1e-12, 0.0, 500);
        // Composite Simpson reference.
        let n = 200_000;
        let h = 1.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * bump(i as f64 * h);
        }
        s *= h / 3.0;
        assert!(((q.value - s) / s).abs() < 1e-10);
    }

    #[test]
    fn single_precision() {
        let q = integrate_adaptive(|x: f32| x * x, 0.0, 3.0, 1e-6, 0.0, 50);
        assert!((q.value - 9.0).abs() < 1e-4);
    }
}
