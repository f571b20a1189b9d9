use num_traits::Float;

use super::lit;

/// Gauss–Legendre rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Float> GaussRule<T> {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn legendre(n: usize) -> Self {
        assert!(n >= 1, "Gauss rule needs at least one node");
        let one = T::one();
        let two = lit::<T>(2.0);
        let pi = lit::<T>(std::f64::consts::PI);
        let nf = lit::<T>(n as f64);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let half = n.div_ceil(2);
        for i in 0..half {
            // Tricomi-style initial guess, descending from +1.
            let mut x = (pi * (lit::<T>(i as f64) + lit(0.75)) / (nf + lit(0.5))).cos();
            let mut dp = one;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x = x - dx;
                if dx.abs() <= T::epsilon() * lit(4.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = two / ((one - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Nodes and weights affinely mapped onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> (Vec<T>, Vec<T>) {
        let half = (b - a) / lit(2.0);
        let mid = (a + b) / lit(2.0);
        let x = self.nodes.iter().map(|&t| mid + half * t).collect();
        let w = self.weights.iter().map(|&w| half * w).collect();
        (x, w)
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = (b - a) / lit(2.0);
        let mid = (a + b) / lit(2.0);
        let mut acc = T::zero();
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + w * f(mid + half * t);
        }
        acc * half
    }
}

fn legendre_with_derivative<T: Float>(n: usize, x: T) -> (T, T) {
    let one = T::one();
    let mut p0 = one;
    let mut p1 = x;
    for j in 2..=n {
        let jf = lit::<T>(j as f64);
        let p2 = ((lit::<T>(2.0) * jf - one) * x * p1 - (jf - one) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { one } else { p1 };
    let nf = lit::<T>(n as f64);
    let d = nf * (x * p - p0) / (x * x - one);
    (p, d)
}
