use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::dispersion::{bracket_roots_with, refine_root_with};
use crate::spectral::mode::{build_mode_with, zero_mode, EigenMode, Phase};
use crate::Real;

pub const BASIS_SCHEMA_VERSION: u32 = 1;

/// Tolerances of the eigen-solver; recorded in every basis it builds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSettings {
    /// Scan samples per unit of `√(λ − k²)` (or `√λ` below `k²`).
    pub density: Real,
    /// Guard half-width around `λ = k²`, relative to `max(1, k²)`.
    pub degeneracy_rel: Real,
    /// Relative enclosure width of refined roots.
    pub root_tol: Real,
    /// Singular-value ratio gate for null-space extraction.
    pub nullspace_gate: Real,
    /// Gauss–Legendre nodes in x₂.
    pub quadrature_nodes: usize,
}

impl Default for SpectralSettings {
    fn default() -> Self {
        Self {
            density: 16.0,
            degeneracy_rel: 1e-8,
            root_tol: 4.0 * Real::EPSILON,
            nullspace_gate: 1e-8,
            quadrature_nodes: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisMetadata {
    pub schema_version: u32,
    pub settings: SpectralSettings,
    /// Seconds since the Unix epoch.
    pub built_at: u64,
}

/// Orthonormal eigenbasis of the operator restricted to `λ ≤ cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenBasis {
    pub cutoff: Real,
    pub k_range: u32,
    pub modes: Vec<EigenMode>,
    pub metadata: BasisMetadata,
}

impl EigenBasis {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn lambdas(&self) -> Vec<Real> {
        self.modes.iter().map(|m| m.lambda).collect()
    }

    /// Number of leading modes with `λ ≤ lambda`.
    pub fn count_below(&self, lambda: Real) -> usize {
        self.modes.partition_point(|m| m.lambda <= lambda)
    }

    /// FNV-1a digest of the spectral content; identifies states built on this basis.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        eat(&self.cutoff.to_bits().to_le_bytes());
        for m in &self.modes {
            eat(&m.k.to_le_bytes());
            eat(&m.n.to_le_bytes());
            eat(&[m.phase_rank()]);
            eat(&m.lambda.to_bits().to_le_bytes());
            eat(&m.eta_trace.to_bits().to_le_bytes());
        }
        h
    }

    /// Sub-basis made of the given mode indices (in that order).
    pub fn subset(&self, indices: &[usize]) -> EigenBasis {
        let modes: Vec<EigenMode> = indices.iter().map(|&i| self.modes[i].clone()).collect();
        let cutoff = modes.iter().map(|m| m.lambda).fold(0.0, Real::max);
        EigenBasis { cutoff, k_range: self.k_range, modes, metadata: self.metadata.clone() }
    }
}

/// Total order on modes: `λ`, then `k`, then cosine before sine.
pub(crate) fn mode_order(a: &EigenMode, b: &EigenMode) -> std::cmp::Ordering {
    a.lambda
        .total_cmp(&b.lambda)
        .then(a.k.cmp(&b.k))
        .then(a.phase_rank().cmp(&b.phase_rank()))
        .then(a.n.cmp(&b.n))
}

/// Refined eigenvalues of sector `k` up to `lambda_max` (`n²π²` for `k = 0`).
pub fn sector_eigenvalues(k: u32, lambda_max: Real, settings: &SpectralSettings) -> Result<Vec<Real>> {
    if k == 0 {
        return Ok((1..)
            .map(|n: u32| (n as Real * std::f64::consts::PI).powi(2))
            .take_while(|&l| l <= lambda_max)
            .collect());
    }
    bracket_roots_with(k, lambda_max, settings.density, settings.degeneracy_rel)
        .into_iter()
        .map(|b| refine_root_with(k, b, settings.root_tol, settings.degeneracy_rel))
        .collect()
}

/// Assembles every mode with `λ ≤ lambda_max`, scanning sectors `0..=k_max`.
///
/// Fails with [`Error::IncompleteBasis`] if sector `k_max` still has an
/// eigenvalue below the cutoff.
pub fn assemble_basis(lambda_max: Real, k_max: u32) -> Result<EigenBasis> {
    assemble_basis_with(lambda_max, k_max, &SpectralSettings::default(), now_epoch())
}

pub fn assemble_basis_with(
    lambda_max: Real,
    k_max: u32,
    settings: &SpectralSettings,
    built_at: u64,
) -> Result<EigenBasis> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(invalid(format!("Lambda_max must be positive, got {lambda_max}")));
    }
    if k_max < 1 {
        return Err(invalid("k_max must be at least 1"));
    }
    let sectors: Vec<Result<Vec<EigenMode>>> = (0..=k_max)
        .into_par_iter()
        .map(|k| sector_modes(k, lambda_max, settings))
        .collect();
    let mut modes = Vec::new();
    for (k, s) in sectors.into_iter().enumerate() {
        let s = s?;
        if k as u32 == k_max {
            if let Some(first) = s.first() {
                return Err(Error::IncompleteBasis {
                    k_max,
                    lambda_min: first.lambda,
                    lambda_max,
                });
            }
        }
        modes.extend(s);
    }
    modes.sort_by(mode_order);
    Ok(EigenBasis {
        cutoff: lambda_max,
        k_range: k_max,
        modes,
        metadata: BasisMetadata {
            schema_version: BASIS_SCHEMA_VERSION,
            settings: settings.clone(),
            built_at,
        },
    })
}

/// Smallest `k_max` for which completeness is guaranteed: every sector
/// eigenvalue exceeds `k²`.
pub fn default_k_max(lambda_max: Real) -> u32 {
    (lambda_max.max(0.0).sqrt().floor() as u32) + 1
}

fn sector_modes(k: u32, lambda_max: Real, settings: &SpectralSettings) -> Result<Vec<EigenMode>> {
    if k == 0 {
        let mut out = Vec::new();
        let mut n = 1;
        loop {
            let m = zero_mode(n)?;
            if m.lambda > lambda_max {
                break;
            }
            out.push(m);
            n += 1;
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    for (i, lam) in sector_eigenvalues(k, lambda_max, settings)?.into_iter().enumerate() {
        if lam > lambda_max {
            continue;
        }
        for phase in [Phase::Cosine, Phase::Sine] {
            out.push(build_mode_with(k, lam, phase, i as u32 + 1, settings)?);
        }
    }
    Ok(out)
}

pub(crate) fn now_epoch() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        })
}
