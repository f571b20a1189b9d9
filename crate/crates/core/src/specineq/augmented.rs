use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hilbert::Rect;
use crate::numeric::GaussRule;
use crate::spectral::{EigenBasis, EigenMode, Field};
use crate::Real;

/// `U(s, x) = Σ a_j cosh(√λ_j s) u^{(j)}(x)` and the companion pressure
/// `P = Σ a_j cosh(√λ_j s) p^{(j)} + c_P(s)`, with `c_P` fixing `∫_ω P = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedField {
    pub modes: Vec<EigenMode>,
    pub coeffs: Vec<Real>,
    pub region: Rect,
    /// `∫_ω p^{(j)} / |ω|` per mode.
    pub pressure_means: Vec<Real>,
    pub s_grid: Vec<Real>,
    /// `c_P` sampled on `s_grid`.
    pub gauge: Vec<Real>,
    /// Extra constant added to `c_P`; zero unless testing gauge freedom.
    pub gauge_shift: Real,
}

/// Builds the augmented field from the modes with `λ ≤ lambda`.
///
/// Coefficients beyond the cutoff must vanish.
pub fn augmented_field(
    basis: &EigenBasis,
    coeffs: &[Real],
    lambda: Real,
    region: &Rect,
    s_grid: &[Real],
) -> Result<AugmentedField> {
    if coeffs.len() != basis.len() {
        return Err(invalid(format!("{} coefficients for a basis of {} modes", coeffs.len(), basis.len())));
    }
    let n = basis.count_below(lambda);
    if let Some(j) = (n..coeffs.len()).find(|&j| coeffs[j] != 0.0) {
        return Err(invalid(format!(
            "coefficient {j} (λ = {}) is nonzero above the cutoff {lambda}",
            basis.modes[j].lambda
        )));
    }
    let modes = basis.modes[..n].to_vec();
    let rule = GaussRule::legendre(basis.metadata.settings.quadrature_nodes);
    let area = region.area();
    let pressure_means = modes
        .iter()
        .map(|m| {
            let tx = m.trig(Field::P).integral(region.x1.0, region.x1.1);
            if tx == 0.0 {
                return 0.0;
            }
            tx * rule.integrate(region.x2.0, region.x2.1, |x| m.profile_value(Field::P, x, 0)) / area
        })
        .collect();
    let mut field = AugmentedField {
        modes,
        coeffs: coeffs[..n].to_vec(),
        region: *region,
        pressure_means,
        s_grid: s_grid.to_vec(),
        gauge: Vec::new(),
        gauge_shift: 0.0,
    };
    field.gauge = s_grid.iter().map(|&s| field.gauge_at(s, 0)).collect();
    Ok(field)
}

fn weight(lambda: Real, s: Real, ds: u32) -> Real {
    let r = lambda.sqrt();
    let f = if ds % 2 == 0 { (r * s).cosh() } else { (r * s).sinh() };
    r.powi(ds as i32) * f
}

impl AugmentedField {
    /// `∂ₛ^{ds} c_P(s)` excluding `gauge_shift`.
    pub fn gauge_at(&self, s: Real, ds: u32) -> Real {
        -self
            .modes
            .iter()
            .zip(&self.coeffs)
            .zip(&self.pressure_means)
            .map(|((m, a), pm)| a * weight(m.lambda, s, ds) * pm)
            .sum::<Real>()
    }

    /// `∂ₛ^{ds} ∂ₓ₁^{d1} ∂ₓ₂^{d2}` of `U₁`, `U₂` or `P` (gauge included).
    pub fn eval(&self, field: Field, ds: u32, d1: u32, d2: u32, s: Real, x1: Real, x2: Real) -> Real {
        let mut v: Real = self
            .modes
            .iter()
            .zip(&self.coeffs)
            .map(|(m, a)| a * weight(m.lambda, s, ds) * m.field_derivative(field, d1, d2, x1, x2))
            .sum();
        if field == Field::P && d1 == 0 && d2 == 0 {
            v += self.gauge_at(s, ds);
            if ds == 0 {
                v += self.gauge_shift;
            }
        }
        v
    }

    /// `m_𝓘(∂ₛ^{ds} P)(s) = (1/2π) ∫_𝓘 ∂ₛ^{ds} P(s, x₁, 1) dx₁`, closed form.
    pub fn boundary_pressure_mean(&self, s: Real, ds: u32) -> Real {
        let modal: Real = self
            .modes
            .iter()
            .zip(&self.coeffs)
            .map(|(m, a)| {
                let tx = m.trig(Field::P).integral(0.0, 2.0 * PI) / (2.0 * PI);
                if tx == 0.0 {
                    0.0
                } else {
                    a * weight(m.lambda, s, ds) * tx * m.profile_value(Field::P, 1.0, 0)
                }
            })
            .sum();
        modal + self.gauge_at(s, ds) + if ds == 0 { self.gauge_shift } else { 0.0 }
    }
}

/// Sup-norm residuals of the augmented elliptic system, each relative to
/// the sup of its own terms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AugmentedResiduals {
    /// `−∂ₛ²U₁ − ΔU₁ + ∂ₓ₁P`.
    pub momentum1: Real,
    /// `−∂ₛ²U₂ − ΔU₂ + ∂ₓ₂P`.
    pub momentum2: Real,
    /// `div U`.
    pub divergence: Real,
    /// `U₁` on both walls, `U₂` on the bottom wall.
    pub walls: Real,
    /// `−∂ₛ²U₂ − ∂ₓ₁²U₂ − (P − m_𝓘(P))` on the top wall.
    pub top_boundary: Real,
    /// `ΔP`.
    pub harmonic_pressure: Real,
}

impl AugmentedResiduals {
    pub fn max(&self) -> Real {
        [
            self.momentum1,
            self.momentum2,
            self.divergence,
            self.walls,
            self.top_boundary,
            self.harmonic_pressure,
        ]
        .into_iter()
        .fold(0.0, Real::max)
    }
}

/// Tensor sample grid: `s` interior to `(0, S₀)`, `x₁ ∈ [0, 2π)`, `x₂ ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub s: Vec<Real>,
    pub x1: Vec<Real>,
    pub x2: Vec<Real>,
}

impl SampleGrid {
    pub fn uniform(s0: Real, ns: usize, n1: usize, n2: usize) -> Self {
        SampleGrid {
            s: (0..ns).map(|i| s0 * (i as Real + 0.5) / ns as Real).collect(),
            x1: (0..n1).map(|i| 2.0 * PI * i as Real / n1 as Real).collect(),
            x2: (0..n2).map(|i| i as Real / (n2 - 1).max(1) as Real).collect(),
        }
    }
}

#[derive(Default)]
struct Acc {
    raw: Real,
    scale: Real,
}

impl Acc {
    fn push(&mut self, residual: Real, terms: &[Real]) {
        self.raw = self.raw.max(residual.abs());
        self.scale = self.scale.max(terms.iter().map(|t| t.abs()).sum());
    }

    fn value(&self) -> Real {
        if self.scale > 0.0 {
            self.raw / self.scale
        } else {
            self.raw
        }
    }
}

/// Evaluates every equation of the augmented system on `grid` using the
/// analytic modal derivatives.
pub fn residual_augmented(field: &AugmentedField, grid: &SampleGrid) -> AugmentedResiduals {
    use Field::{P, U1, U2};
    let mut acc: [Acc; 6] = Default::default();
    for &s in &grid.s {
        let m_p = field.boundary_pressure_mean(s, 0);
        for &x1 in &grid.x1 {
            for &x2 in &grid.x2 {
                let e = |f, ds, d1, d2| field.eval(f, ds, d1, d2, s, x1, x2);
                let t1 = [-e(U1, 2, 0, 0), -e(U1, 0, 2, 0), -e(U1, 0, 0, 2), e(P, 0, 1, 0)];
                acc[0].push(t1.iter().sum(), &t1);
                let t2 = [-e(U2, 2, 0, 0), -e(U2, 0, 2, 0), -e(U2, 0, 0, 2), e(P, 0, 0, 1)];
                acc[1].push(t2.iter().sum(), &t2);
                let td = [e(U1, 0, 1, 0), e(U2, 0, 0, 1)];
                acc[2].push(td.iter().sum(), &td);
                let tp = [e(P, 0, 2, 0), e(P, 0, 0, 2)];
                acc[5].push(tp.iter().sum(), &tp);
            }
            let bottom = [field.eval(U1, 0, 0, 0, s, x1, 0.0), field.eval(U2, 0, 0, 0, s, x1, 0.0)];
            let top1 = field.eval(U1, 0, 0, 0, s, x1, 1.0);
            let u2_top = field.eval(U2, 0, 0, 0, s, x1, 1.0);
            let wall = bottom[0].abs().max(bottom[1].abs()).max(top1.abs());
            acc[3].push(wall, &[u2_top, field.eval(U2, 0, 0, 0, s, x1, 0.5)]);
            let tb = [
                -field.eval(U2, 2, 0, 0, s, x1, 1.0),
                -field.eval(U2, 0, 2, 0, s, x1, 1.0),
                -(field.eval(P, 0, 0, 0, s, x1, 1.0) - m_p),
            ];
            acc[4].push(tb.iter().sum(), &tb);
        }
    }
    AugmentedResiduals {
        momentum1: acc[0].value(),
        momentum2: acc[1].value(),
        divergence: acc[2].value(),
        walls: acc[3].value(),
        top_boundary: acc[4].value(),
        harmonic_pressure: acc[5].value(),
    }
}
