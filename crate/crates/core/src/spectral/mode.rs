use std::f64::consts::PI;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{lit, GaussRule};
use crate::spectral::profile::{boundary_matrix, classify, Branch, StreamProfile};
use crate::spectral::SpectralSettings;
use crate::Real;

/// Real phase of a `k ≥ 1` mode: the pair spanning the `±k` eigenspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Cosine,
    Sine,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Cosine => "cos",
            Phase::Sine => "sin",
        }
    }
}

/// x₂-structure of a mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModeProfile {
    /// `k = 0`: `u = (amplitude · sin(nπx₂), 0)`, `p = 0`, `η = 0`.
    Shear { n: u32, amplitude: Real },
    Stream(StreamProfile),
}

/// One eigenpair `(λ, [u, η])` of the Stokes–heat operator, unit norm in 𝓗.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenMode {
    pub k: u32,
    pub n: u32,
    pub lambda: Real,
    pub phase: Option<Phase>,
    pub profile: ModeProfile,
    /// Amplitude of the boundary unknown: `η = eta_trace · cos/sin(k x₁)`.
    pub eta_trace: Real,
}

/// Pointwise values of a mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeValue {
    pub u1: Real,
    pub u2: Real,
    pub p: Real,
    pub eta: Real,
}

/// Field selector for separable evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    U1,
    U2,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    Cos,
    Sin,
}

/// `sign · cos(freq x)` or `sign · sin(freq x)`; `freq = 0` with `Cos` is a constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trig {
    pub freq: u32,
    pub kind: TrigKind,
    pub sign: Real,
}

impl Trig {
    pub fn cos(freq: u32) -> Self {
        Self { freq, kind: TrigKind::Cos, sign: 1.0 }
    }

    pub fn sin(freq: u32) -> Self {
        Self { freq, kind: TrigKind::Sin, sign: 1.0 }
    }

    pub fn zero() -> Self {
        Self { freq: 0, kind: TrigKind::Cos, sign: 0.0 }
    }

    pub fn scaled(self, s: Real) -> Self {
        Self { sign: self.sign * s, ..self }
    }

    pub fn eval(&self, x: Real) -> Real {
        let t = self.freq as Real * x;
        self.sign
            * match self.kind {
                TrigKind::Cos => t.cos(),
                TrigKind::Sin => t.sin(),
            }
    }

    pub fn derivative(&self) -> Self {
        let w = self.freq as Real;
        match self.kind {
            TrigKind::Cos => Self { freq: self.freq, kind: TrigKind::Sin, sign: -w * self.sign },
            TrigKind::Sin => Self { freq: self.freq, kind: TrigKind::Cos, sign: w * self.sign },
        }
    }

    pub fn derivative_n(&self, n: u32) -> Self {
        (0..n).fold(*self, |t, _| t.derivative())
    }

    /// Closed-form `∫_a^b self(x) · other(x) dx`.
    pub fn product_integral(&self, other: &Trig, a: Real, b: Real) -> Real {
        self.product_integral_in(other, a, b)
    }

    /// [`Trig::product_integral`] evaluated in another scalar type.
    pub fn product_integral_in<T: Float>(&self, other: &Trig, a: T, b: T) -> T {
        let s = lit::<T>(self.sign * other.sign);
        if s.is_zero() {
            return T::zero();
        }
        let m = self.freq as i64;
        let n = other.freq as i64;
        let half = lit::<T>(0.5);
        let ic = |q: i64| {
            if q == 0 {
                b - a
            } else {
                let q = lit::<T>(q as f64);
                ((q * b).sin() - (q * a).sin()) / q
            }
        };
        let is = |q: i64| {
            if q == 0 {
                T::zero()
            } else {
                let q = lit::<T>(q as f64);
                ((q * a).cos() - (q * b).cos()) / q
            }
        };
        let v = match (self.kind, other.kind) {
            (TrigKind::Cos, TrigKind::Cos) => half * (ic(m - n) + ic(m + n)),
            (TrigKind::Sin, TrigKind::Sin) => half * (ic(m - n) - ic(m + n)),
            (TrigKind::Sin, TrigKind::Cos) => half * (is(m + n) + is(m - n)),
            (TrigKind::Cos, TrigKind::Sin) => half * (is(m + n) + is(n - m)),
        };
        s * v
    }

    /// Closed-form `∫_a^b self(x) dx`.
    pub fn integral(&self, a: Real, b: Real) -> Real {
        self.product_integral(&Trig::cos(0), a, b)
    }
}

impl EigenMode {
    /// x₁-factor of a field.
    pub fn trig(&self, field: Field) -> Trig {
        match (&self.profile, self.phase) {
            (ModeProfile::Shear { .. }, _) => match field {
                Field::U1 => Trig::cos(0),
                Field::U2 | Field::P => Trig::zero(),
            },
            (ModeProfile::Stream(_), Some(Phase::Cosine)) | (ModeProfile::Stream(_), None) => {
                match field {
                    Field::U1 => Trig::sin(self.k).scaled(-1.0),
                    Field::U2 | Field::P => Trig::cos(self.k),
                }
            }
            (ModeProfile::Stream(_), Some(Phase::Sine)) => match field {
                Field::U1 => Trig::cos(self.k),
                Field::U2 | Field::P => Trig::sin(self.k),
            },
        }
    }

    /// `order`-th x₂-derivative of the x₂-factor of a field.
    pub fn profile_value(&self, field: Field, x2: Real, order: u32) -> Real {
        match &self.profile {
            ModeProfile::Shear { n, amplitude } => match field {
                Field::U1 => {
                    let w = *n as Real * PI;
                    let (s, c) = (w * x2).sin_cos();
                    let d = match order % 4 {
                        0 => s,
                        1 => c,
                        2 => -s,
                        _ => -c,
                    };
                    amplitude * w.powi(order as i32) * d
                }
                Field::U2 | Field::P => 0.0,
            },
            ModeProfile::Stream(sp) => match field {
                Field::U1 => sp.horizontal(x2, order),
                Field::U2 => sp.phi(x2, order),
                Field::P => sp.pressure(x2, order),
            },
        }
    }

    /// `∂^{d1}_{x₁} ∂^{d2}_{x₂}` of a field at a point (no domain check).
    pub fn field_derivative(&self, field: Field, d1: u32, d2: u32, x1: Real, x2: Real) -> Real {
        self.trig(field).derivative_n(d1).eval(x1) * self.profile_value(field, x2, d2)
    }

    /// x₁-factor of the boundary unknown `η`.
    pub fn eta_trig(&self) -> Trig {
        match self.profile {
            ModeProfile::Shear { .. } => Trig::zero(),
            ModeProfile::Stream(_) => self.trig(Field::U2),
        }
    }

    pub fn eta(&self, x1: Real) -> Real {
        self.eta_trig().eval(x1) * self.eta_trace
    }

    pub fn phase_rank(&self) -> u8 {
        match self.phase {
            None | Some(Phase::Cosine) => 0,
            Some(Phase::Sine) => 1,
        }
    }

    pub fn branch(&self) -> Option<Branch> {
        match &self.profile {
            ModeProfile::Shear { .. } => None,
            ModeProfile::Stream(sp) => Some(sp.branch),
        }
    }
}

/// The decoupled `k = 0` sector: `λ = n²π²`, `u = (sin(nπx₂)/√π, 0)`.
pub fn zero_mode(n: u32) -> Result<EigenMode> {
    if n == 0 {
        return Err(invalid("zero_mode needs n >= 1"));
    }
    let nf = n as Real;
    Ok(EigenMode {
        k: 0,
        n,
        lambda: nf * nf * PI * PI,
        phase: None,
        profile: ModeProfile::Shear { n, amplitude: 1.0 / PI.sqrt() },
        eta_trace: 0.0,
    })
}

/// Builds the unit-norm mode of sector `k ≥ 1` at a refined eigenvalue.
///
/// The stream-function coefficients span the null space of the 4×4
/// boundary matrix (smallest right singular vector). `n` is recorded as
/// given; [`crate::assemble_basis`] assigns per-sector ordinals.
pub fn build_mode(k: u32, lambda: Real, phase: Phase) -> Result<EigenMode> {
    build_mode_with(k, lambda, phase, 0, &SpectralSettings::default())
}

pub fn build_mode_with(
    k: u32,
    lambda: Real,
    phase: Phase,
    n: u32,
    settings: &SpectralSettings,
) -> Result<EigenMode> {
    if k == 0 {
        return Err(invalid("build_mode needs k >= 1; use zero_mode for k = 0"));
    }
    let branch = classify(k, lambda, settings.degeneracy_rel);
    if branch == Branch::Degenerate {
        return Err(Error::DegenerateBranch { k, lambda });
    }
    let m = boundary_matrix(k, lambda, branch);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s_max = svd.singular_values[order[0]];
    let s_second = svd.singular_values[order[2]];
    let s_min = svd.singular_values[order[3]];
    let residual = s_min / s_max;
    if residual > settings.nullspace_gate {
        return Err(Error::NotAnEigenvalue { k, lambda, residual });
    }
    let ratio = s_second / s_max;
    if ratio < settings.nullspace_gate {
        return Err(Error::Multiplicity { k, lambda, ratio });
    }
    let row = order[3];
    let mut c = [v_t[(row, 0)], v_t[(row, 1)], v_t[(row, 2)], v_t[(row, 3)]];
    // Deterministic sign: the largest coefficient is positive.
    let big = (0..4).max_by(|&a, &b| c[a].abs().total_cmp(&c[b].abs())).unwrap_or(0);
    if c[big] < 0.0 {
        c.iter_mut().for_each(|x| *x = -*x);
    }
    let mut profile = StreamProfile { k, lambda, branch, c, norm_factor: 1.0 };
    let norm_sq = sector_norm_squared(&profile, settings.quadrature_nodes);
    profile.norm_factor = 1.0 / norm_sq.sqrt();
    let eta_trace = profile.phi(1.0, 0);
    Ok(EigenMode {
        k,
        n,
        lambda,
        phase: Some(phase),
        profile: ModeProfile::Stream(profile),
        eta_trace,
    })
}

/// `‖[u, η]‖²_𝓗` of the unnormalised profile: `π(∫(φ′²/k² + φ²) + φ(1)²)`.
fn sector_norm_squared(profile: &StreamProfile, nodes: usize) -> Real {
    let k = profile.k as Real;
    let g = GaussRule::legendre(nodes);
    let interior = g.integrate(0.0, 1.0, |x| {
        let d = profile.raw(x, 1) / k;
        let v = profile.raw(x, 0);
        d * d + v * v
    });
    let top = profile.raw(1.0, 0);
    PI * (interior + top * top)
}

/// Pointwise evaluation on `[0, 2π) × [0, 1]`.
pub fn eval_mode(mode: &EigenMode, x1: Real, x2: Real) -> Result<ModeValue> {
    if !(0.0..2.0 * PI).contains(&x1) {
        return Err(invalid(format!("x1 = {x1} outside [0, 2π)")));
    }
    if !(0.0..=1.0).contains(&x2) {
        return Err(invalid(format!("x2 = {x2} outside [0, 1]")));
    }
    Ok(ModeValue {
        u1: mode.field_derivative(Field::U1, 0, 0, x1, x2),
        u2: mode.field_derivative(Field::U2, 0, 0, x1, x2),
        p: mode.field_derivative(Field::P, 0, 0, x1, x2),
        eta: mode.eta(x1),
    })
}

/// Relative residuals of the five interior/boundary equations of a mode on
/// a sample grid: momentum (two components), divergence, wall conditions
/// and the boundary heat equation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ModeResiduals {
    pub momentum1: Real,
    pub momentum2: Real,
    pub divergence: Real,
    pub walls: Real,
    pub boundary_heat: Real,
}

impl ModeResiduals {
    pub fn max(&self) -> Real {
        [self.momentum1, self.momentum2, self.divergence, self.walls, self.boundary_heat]
            .into_iter()
            .fold(0.0, Real::max)
    }
}

/// Evaluates the eigen-equations of `mode` on an `n1 × n2` grid.
pub fn mode_residuals(mode: &EigenMode, n1: usize, n2: usize) -> ModeResiduals {
    let lam = mode.lambda;
    let d = |f: Field, a: u32, b: u32, x1: Real, x2: Real| mode.field_derivative(f, a, b, x1, x2);
    let mut out = ModeResiduals::default();
    let mut scale = [0.0 as Real; 5];
    let mut raw = [0.0 as Real; 5];
    for i in 0..n1 {
        let x1 = 2.0 * PI * i as Real / n1 as Real;
        for j in 0..n2 {
            let x2 = j as Real / (n2 - 1) as Real;
            let u1 = d(Field::U1, 0, 0, x1, x2);
            let u2 = d(Field::U2, 0, 0, x1, x2);
            let lap1 = d(Field::U1, 2, 0, x1, x2) + d(Field::U1, 0, 2, x1, x2);
            let lap2 = d(Field::U2, 2, 0, x1, x2) + d(Field::U2, 0, 2, x1, x2);
            let p1 = d(Field::P, 1, 0, x1, x2);
            let p2 = d(Field::P, 0, 1, x1, x2);
            let t1 = [lam * u1, lap1, p1];
            let t2 = [lam * u2, lap2, p2];
            raw[0] = raw[0].max((-lam * u1 - lap1 + p1).abs());
            scale[0] = scale[0].max(t1.iter().map(|v| v.abs()).sum());
            raw[1] = raw[1].max((-lam * u2 - lap2 + p2).abs());
            scale[1] = scale[1].max(t2.iter().map(|v| v.abs()).sum());
            let a = d(Field::U1, 1, 0, x1, x2);
            let b = d(Field::U2, 0, 1, x1, x2);
            raw[2] = raw[2].max((a + b).abs());
            scale[2] = scale[2].max(a.abs() + b.abs());
        }
        // Walls: u = 0 on x₂ = 0, u₁ = 0 and u₂ = η on x₂ = 1.
        let v0 = eval_point(mode, x1, 0.0);
        let v1 = eval_point(mode, x1, 1.0);
        let eta = mode.eta(x1);
        raw[3] = raw[3].max(v0.0.abs().max(v0.1.abs()).max(v1.0.abs()).max((v1.1 - eta).abs()));
        scale[3] = scale[3].max(eta.abs()).max(mode_scale(mode));
        // -λu₂ - ∂²_{x₁}u₂ = p on x₂ = 1.
        let u2 = d(Field::U2, 0, 0, x1, 1.0);
        let u2xx = d(Field::U2, 2, 0, x1, 1.0);
        let p = d(Field::P, 0, 0, x1, 1.0);
        raw[4] = raw[4].max((-lam * u2 - u2xx - p).abs());
        scale[4] = scale[4].max((lam * u2).abs() + u2xx.abs() + p.abs());
    }
    let rel = |r: Real, s: Real| if s > 0.0 { r / s } else { r };
    out.momentum1 = rel(raw[0], scale[0]);
    out.momentum2 = rel(raw[1], scale[1]);
    out.divergence = rel(raw[2], scale[2]);
    out.walls = rel(raw[3], scale[3]);
    out.boundary_heat = rel(raw[4], scale[4]);
    out
}

fn eval_point(mode: &EigenMode, x1: Real, x2: Real) -> (Real, Real) {
    (
        mode.field_derivative(Field::U1, 0, 0, x1, x2),
        mode.field_derivative(Field::U2, 0, 0, x1, x2),
    )
}

fn mode_scale(mode: &EigenMode) -> Real {
    (0..=20)
        .map(|j| {
            let x2 = j as Real / 20.0;
            mode.profile_value(Field::U1, x2, 0).abs().max(mode.profile_value(Field::U2, x2, 0).abs())
        })
        .fold(0.0, Real::max)
}
