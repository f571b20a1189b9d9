use num_traits::Float;

use super::lit;

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// Column-major eigenvectors: column `i` is `vectors[i * n .. (i + 1) * n]`.
    pub vectors: Option<Vec<T>>,
    pub sweeps: usize,
}

impl<T: Float> SymmetricEigen<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> Option<&[T]> {
        let n = self.values.len();
        self.vectors.as_ref().map(|v| &v[i * n..(i + 1) * n])
    }
}

/// Eigenvalues only.
pub fn symmetric_eigenvalues<T: Float>(a: &[T], n: usize) -> Vec<T> {
    symmetric_eigen(a, n, false).values
}

/// Cyclic two-sided Jacobi on a dense row-major symmetric matrix.
///
/// Rotations are skipped once `|a_pq| <= eps · sqrt(|a_pp a_qq|)`, which gives
/// eigenvalues of positive definite, diagonally graded matrices to high
/// relative accuracy rather than accuracy relative to the norm.
pub fn symmetric_eigen<T: Float>(a: &[T], n: usize, want_vectors: bool) -> SymmetricEigen<T> {
    assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
    let mut m = a.to_vec();
    // Symmetrise from the upper triangle.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (m[i * n + j] + m[j * n + i]) / lit(2.0);
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    let mut v = if want_vectors {
        let mut id = vec![T::zero(); n * n];
        for i in 0..n {
            id[i * n + i] = T::one();
        }
        Some(id)
    } else {
        None
    };
    let eps = T::epsilon();
    let tiny = T::min_positive_value();
    let mut sweeps = 0;
    for _ in 0..100 {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                if apq.abs() <= eps * (app * aqq).abs().sqrt() || apq.abs() <= tiny {
                    m[p * n + q] = T::zero();
                    m[q * n + p] = T::zero();
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (lit::<T>(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = T::zero();
                m[q * n + p] = T::zero();
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = m[r * n + p];
                    let arq = m[r * n + q];
                    let np = c * arp - s * arq;
                    let nq = s * arp + c * arq;
                    m[r * n + p] = np;
                    m[p * n + r] = np;
                    m[r * n + q] = nq;
                    m[q * n + r] = nq;
                }
                if let Some(vv) = v.as_mut() {
                    for r in 0..n {
                        let vrp = vv[p * n + r];
                        let vrq = vv[q * n + r];
                        vv[p * n + r] = c * vrp - s * vrq;
                        vv[q * n + r] = s * vrp + c * vrq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[i * n + i]
            .partial_cmp(&m[j * n + j])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = v.map(|vv| {
        let mut out = Vec::with_capacity(n * n);
        for &i in &order {
            out.extend_from_slice(&vv[i * n..(i + 1) * n]);
        }
        out
    });
    SymmetricEigen { values, vectors, sweeps }
}
