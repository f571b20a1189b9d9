//! Finite-difference oracle for the sector eigenproblem.
//!
//! Works directly on the primitive unknowns `(û₁, p̂, û₂, η̂)` of one Fourier
//! sector on a staggered grid in x₂ (velocity `û₂` on nodes, `û₁` and `p̂` at
//! cell centres, reflection ghosts for the walls, `η̂` tied to the top node).
//! The discrete pencil `A x = λ B x` is symmetric with `B` singular on the
//! pressure rows; eigenvalues come from shift-invert subspace iteration
//! with B-orthogonal deflation, then Richardson extrapolation `N → 2N`.
//! Nothing here touches the stream-function reduction.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::BandMatrix;
use crate::Real;

/// One extrapolated oracle eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEigenvalue {
    pub lambda: Real,
    /// `|extrapolated − fine|`.
    pub error_estimate: Real,
    pub coarse: Real,
    pub fine: Real,
}

const MAX_ITERATIONS: usize = 400;
const RITZ_TOL: Real = 1e-12;

/// `count` smallest eigenvalues of sector `k`, Richardson-extrapolated from
/// grids `n` and `2n`.
pub fn oracle_eigs(k: u32, n: usize, count: usize) -> Result<Vec<OracleEigenvalue>> {
    if n < 50 {
        return Err(invalid(format!("oracle grid needs N >= 50, got {n}")));
    }
    if count == 0 {
        return Err(invalid("oracle count must be at least 1"));
    }
    let coarse = fd_eigenvalues(k, n, count)?;
    let fine = fd_eigenvalues(k, 2 * n, count)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(&c, &f)| {
            let lambda = (4.0 * f - c) / 3.0;
            OracleEigenvalue { lambda, error_estimate: (lambda - f).abs(), coarse: c, fine: f }
        })
        .collect())
}

struct Pencil {
    a: BandMatrix<Real>,
    b: Vec<Real>,
}

/// Index layout per cell `j`: `[û₁_j, p̂_j, û₂_{j+1}]`; `û₂_N ≡ η̂`.
fn assemble(k: u32, n: usize) -> Pencil {
    let h = 1.0 / n as Real;
    let kf = k as Real;
    let size = 3 * n;
    let mut a = BandMatrix::zeros(size, 3, 3);
    let mut b = vec![0.0; size];
    let u = |j: usize| 3 * j;
    let q = |j: usize| 3 * j + 1;
    let v = |i: usize| 3 * (i - 1) + 2; // i in 1..=n
    for j in 0..n {
        // Horizontal momentum at cell centre j.
        let mut diag = h * (2.0 / (h * h) + kf * kf);
        if j == 0 {
            diag += 1.0 / h;
        }
        if j == n - 1 {
            diag += 1.0 / h;
        }
        a.add(u(j), u(j), diag);
        if j > 0 {
            a.add(u(j), u(j - 1), -1.0 / h);
        }
        if j + 1 < n {
            a.add(u(j), u(j + 1), -1.0 / h);
        }
        a.add(u(j), q(j), -h * kf);
        b[u(j)] = h;
        // Divergence at cell centre j (scaled by -h).
        a.add(q(j), u(j), -h * kf);
        a.add(q(j), v(j + 1), -1.0);
        if j >= 1 {
            a.add(q(j), v(j), 1.0);
        }
    }
    for i in 1..n {
        // Vertical momentum at interior node i.
        a.add(v(i), v(i), 2.0 / h + h * kf * kf);
        a.add(v(i), v(i + 1), -1.0 / h);
        if i >= 2 {
            a.add(v(i), v(i - 1), -1.0 / h);
        }
        a.add(v(i), q(i), 1.0);
        a.add(v(i), q(i - 1), -1.0);
        b[v(i)] = h;
    }
    // Boundary heat equation fused with the half-cell momentum balance.
    let e = v(n);
    a.add(e, e, kf * kf * (1.0 + 0.5 * h) + 1.0 / h);
    if n >= 2 {
        a.add(e, v(n - 1), -1.0 / h);
    }
    a.add(e, q(n - 1), -1.0);
    b[e] = 1.0 + 0.5 * h;
    Pencil { a, b }
}

fn b_dot(b: &[Real], x: &[Real], y: &[Real]) -> Real {
    b.iter().zip(x).zip(y).map(|((w, a), c)| w * a * c).sum()
}

fn dot(x: &[Real], y: &[Real]) -> Real {
    x.iter().zip(y).map(|(a, c)| a * c).sum()
}

/// Shift-invert subspace iteration on the grid of size `n`.
pub fn fd_eigenvalues(k: u32, n: usize, count: usize) -> Result<Vec<Real>> {
    let pencil = assemble(k, n);
    let size = pencil.b.len();
    let extra = (count / 2).max(4);
    let mut locked_vecs: Vec<Vec<Real>> = Vec::new();
    let mut found: Vec<Real> = Vec::new();
    let mut sigma = 0.0;
    let mut seed: u64 = 0x9e37_79b9_7f4a_7c15 ^ ((k as u64) << 32) ^ n as u64;
    let mut rand = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        (seed >> 11) as Real / (1u64 << 53) as Real - 0.5
    };

    while found.len() < count {
        let want = count - found.len();
        let p = want + extra;
        let mut shifted = pencil.a.clone();
        for (i, &w) in pencil.b.iter().enumerate() {
            if w != 0.0 {
                shifted.add(i, i, -sigma * w);
            }
        }
        let lu = shifted.factor().ok_or(Error::OracleFailure { k, shift: sigma, iterations: 0 })?;

        let mut x: Vec<Vec<Real>> = (0..p)
            .map(|_| (0..size).map(|i| if pencil.b[i] != 0.0 { rand() } else { 0.0 }).collect())
            .collect();
        let mut prev: Vec<Real> = vec![Real::NAN; p];
        let mut converged = 0;
        let mut iterations = 0;
        let mut ritz: Vec<Real> = Vec::new();
        while iterations < MAX_ITERATIONS {
            iterations += 1;
            let mut y: Vec<Vec<Real>> = x
                .iter()
                .map(|col| {
                    let rhs: Vec<Real> = col.iter().zip(&pencil.b).map(|(c, w)| c * w).collect();
                    lu.solve(&rhs)
                })
                .collect();
            for col in y.iter_mut() {
                for l in &locked_vecs {
                    let c = b_dot(&pencil.b, l, col);
                    col.iter_mut().zip(l).for_each(|(a, b)| *a -= c * b);
                }
                let nrm = b_dot(&pencil.b, col, col).sqrt();
                if nrm > 0.0 {
                    col.iter_mut().for_each(|a| *a /= nrm);
                }
            }
            // Rayleigh–Ritz on span(Y).
            let ay: Vec<Vec<Real>> = y.iter().map(|col| pencil.a.mul_vec(col)).collect();
            let mut s = DMatrix::<Real>::zeros(p, p);
            let mut hm = DMatrix::<Real>::zeros(p, p);
            for i in 0..p {
                for j in i..p {
                    let sij = b_dot(&pencil.b, &y[i], &y[j]);
                    let hij = 0.5 * (dot(&y[i], &ay[j]) + dot(&y[j], &ay[i]));
                    s[(i, j)] = sij;
                    s[(j, i)] = sij;
                    hm[(i, j)] = hij;
                    hm[(j, i)] = hij;
                }
            }
            let chol = s
                .clone()
                .cholesky()
                .ok_or(Error::OracleFailure { k, shift: sigma, iterations })?;
            let l = chol.l();
            let linv = l
                .clone()
                .try_inverse()
                .ok_or(Error::OracleFailure { k, shift: sigma, iterations })?;
            let c = &linv * &hm * linv.transpose();
            let c = 0.5 * (&c + c.transpose());
            let eig = c.symmetric_eigen();
            let mut order: Vec<usize> = (0..p).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
            let coeffs = linv.transpose() * &eig.eigenvectors;
            ritz = order.iter().map(|&i| eig.eigenvalues[i]).collect();
            x = order
                .iter()
                .map(|&col| {
                    let w: DVector<Real> = coeffs.column(col).into_owned();
                    let mut out = vec![0.0; size];
                    for (r, yr) in y.iter().enumerate() {
                        let c = w[r];
                        out.iter_mut().zip(yr).for_each(|(o, v)| *o += c * v);
                    }
                    out
                })
                .collect();
            converged = ritz
                .iter()
                .zip(&prev)
                .take_while(|(r, q)| (*r - *q).abs() <= RITZ_TOL * r.abs())
                .count();
            prev = ritz.clone();
            if converged >= want {
                break;
            }
        }
        if converged == 0 {
            return Err(Error::OracleFailure { k, shift: sigma, iterations });
        }
        let take = converged.min(want);
        for i in 0..take {
            if ritz[i] <= 0.0 {
                return Err(Error::OracleFailure { k, shift: sigma, iterations });
            }
            found.push(ritz[i]);
            locked_vecs.push(x[i].clone());
        }
        if found.len() < count {
            let last = *found.last().expect("at least one locked");
            let next = ritz.get(take).copied().unwrap_or(2.0 * last);
            sigma = 0.5 * (last + next);
        }
    }
    found.sort_by(|a, b| a.total_cmp(b));
    Ok(found)
}
