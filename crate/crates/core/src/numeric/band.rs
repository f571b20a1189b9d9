use num_traits::Float;

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
///
/// Storage reserves `kl` extra super-diagonals so the matrix can be factored
/// in place with partial pivoting.
#[derive(Debug, Clone)]
pub struct BandMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Float> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![T::zero(); n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl < i || j > i + self.kl + self.ku {
            None
        } else {
            Some(i * self.width + (j + self.kl - i))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |s| self.data[s])
    }

    /// Adds `v` to entry `(i, j)`; panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let s = self.slot(i, j).expect("in band");
        self.data[s] = self.data[s] + v;
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let mut s = T::zero();
            for (j, &xj) in x.iter().enumerate().take(hi + 1).skip(lo) {
                s = s + self.get(i, j) * xj;
            }
            *yi = s;
        }
        y
    }

    /// LU factorisation with partial pivoting; `None` when a pivot vanishes.
    pub fn factor(mut self) -> Option<BandLu<T>> {
        let n = self.n;
        let reach = self.kl + self.ku;
        let mut pivots = vec![0usize; n];
        for j in 0..n {
            let last = (j + self.kl).min(n - 1);
            let mut p = j;
            let mut best = self.get(j, j).abs();
            for r in (j + 1)..=last {
                let v = self.get(r, j).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == T::zero() || !best.is_finite() {
                return None;
            }
            pivots[j] = p;
            let cmax = (j + reach).min(n - 1);
            if p != j {
                for c in j..=cmax {
                    let a = self.slot(j, c).expect("pivot row band");
                    let b = self.slot(p, c).expect("candidate row band");
                    self.data.swap(a, b);
                }
            }
            let piv = self.get(j, j);
            for r in (j + 1)..=last {
                let sr = self.slot(r, j).expect("sub-diagonal");
                let l = self.data[sr] / piv;
                self.data[sr] = l;
                if l == T::zero() {
                    continue;
                }
                for c in (j + 1)..=cmax {
                    let src = self.data[self.slot(j, c).expect("row j")];
                    let dst = self.slot(r, c).expect("row r");
                    self.data[dst] = self.data[dst] - l * src;
                }
            }
        }
        Some(BandLu { m: self, pivots })
    }
}

/// Factored band matrix.
#[derive(Debug, Clone)]
pub struct BandLu<T> {
    m: BandMatrix<T>,
    pivots: Vec<usize>,
}

impl<T: Float> BandLu<T> {
    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let n = self.m.n;
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        let kl = self.m.kl;
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                x.swap(j, p);
            }
            let xj = x[j];
            let last = (j + kl).min(n - 1);
            for (r, xr) in x.iter_mut().enumerate().take(last + 1).skip(j + 1) {
                *xr = *xr - self.m.get(r, j) * xj;
            }
        }
        let reach = self.m.kl + self.m.ku;
        for j in (0..n).rev() {
            let cmax = (j + reach).min(n - 1);
            let mut s = x[j];
            for (c, &xc) in x.iter().enumerate().take(cmax + 1).skip(j + 1) {
                s = s - self.m.get(j, c) * xc;
            }
            x[j] = s / self.m.get(j, j);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_indefinite_system_with_zero_diagonal() {
        // Saddle-point-like tridiagonal block with zeros on the diagonal.
        let n = 9;
        let mut a = BandMatrix::<f64>::zeros(n, 2, 2);
        for i in 0..n {
            if i % 3 != 1 {
                a.add(i, i, 2.0 + i as f64 * 0.1);
            }
            if i + 1 < n {
                a.add(i, i + 1, 1.0);
                a.add(i + 1, i, 1.0);
            }
            if i + 2 < n {
                a.add(i, i + 2, -0.5);
                a.add(i + 2, i, 0.25);
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin() + 0.1).collect();
        let b = a.mul_vec(&x_true);
        let lu = a.clone().factor().expect("nonsingular");
        let x = lu.solve(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_detected() {
        let a = BandMatrix::<f64>::zeros(3, 1, 1);
        assert!(a.factor().is_none());
    }
}
