//! Normalized eigenstates and modified probability densities.
//!
//! The density carries the energy weight of the modified scalar product:
//! `ρ(x) = |ψ|²(E - γx²/2)` in coordinate space and
//! `ρ(p) = |ψ|²(E + γp²/(2λ⁴))` in momentum space. Both reduce to the
//! textbook oscillator density at γ = 0. Evaluation goes through orthonormal
//! Hermite functions so no `2ⁿn!` factor is ever materialized.

use crate::quadrature::{self, QuadratureSpec};
use crate::spectrum::EnergyLevel;
use serde::Serialize;
use thiserror::Error;

pub const PI: f64 = std::f64::consts::PI;

/// Which representation a state or curve lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Coordinate,
    Momentum,
}

impl std::str::FromStr for Space {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coordinate" | "x" => Ok(Space::Coordinate),
            "momentum" | "p" => Ok(Space::Momentum),
            other => Err(format!("unknown space '{other}'")),
        }
    }
}

/// Diagnostics fixed at construction time.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ValidityFlags {
    /// The energy weight keeps one sign on the truncation domain. When false,
    /// log-taking operations (Fisher, Shannon) refuse to run.
    pub weight_positive: bool,
    /// Sign of the closed-form normalization denominator.
    pub norm_positive: bool,
}

#[derive(Debug, Error)]
pub enum StateError {
    #[error("closed-form normalization denominator {denominator:.6} <= 0 for n={n}, gamma={gamma}, {space:?}")]
    NonNormalizable {
        n: u32,
        gamma: f64,
        space: Space,
        denominator: f64,
    },
    #[error("density is not positive on the domain (weight changes sign); log-based measure refused for n={n}, gamma={gamma}, {space:?}")]
    InvalidDensity { n: u32, gamma: f64, space: Space },
    #[error("density integrates to {value:.12} rather than 1 for n={n}, gamma={gamma}, {space:?}")]
    NormalizationCheck {
        n: u32,
        gamma: f64,
        space: Space,
        value: f64,
    },
    #[error(transparent)]
    Quadrature(#[from] crate::quadrature::QuadratureError),
}

/// Orthonormal Hermite function `H_n(ξ)e^{-ξ²/2}/√(2ⁿ n! √π)` by the stable
/// three-term recurrence on the weighted functions.
pub fn hermite_weighted(n: u32, xi: f64) -> f64 {
    hermite_weighted_pair(n, xi).0
}

/// `(h_n(ξ), h_n'(ξ))` with `h_n' = √(2n)·h_{n-1} - ξ·h_n`.
pub fn hermite_weighted_pair(n: u32, xi: f64) -> (f64, f64) {
    let h0 = PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    if n == 0 {
        return (h0, -xi * h0);
    }
    let mut prev = h0;
    let mut cur = std::f64::consts::SQRT_2 * xi * h0;
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * xi * cur - ((kf - 1.0) / kf).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    let deriv = (2.0 * n as f64).sqrt() * prev - xi * cur;
    (cur, deriv)
}

/// Normalized Hermite polynomial `H_n(ξ)/√(2ⁿ n! √π)` without the Gaussian,
/// for polynomial-times-Gaussian integrands fed to the Gauss-Hermite rule.
pub fn hermite_normalized_poly(n: u32, xi: f64) -> f64 {
    let mut prev = PI.powf(-0.25);
    if n == 0 {
        return prev;
    }
    let mut cur = std::f64::consts::SQRT_2 * xi * prev;
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * xi * cur - ((kf - 1.0) / kf).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n as u64).map(|k| (k as f64).ln()).sum()
}

/// A normalized eigenstate in one representation.
#[derive(Debug, Clone, Serialize)]
pub struct WaveState {
    pub space: Space,
    pub level: EnergyLevel,
    pub gamma: f64,
    /// The printed closed-form normalization constant (C_n² or C'_n²).
    pub norm_const_sq: f64,
    pub validity: ValidityFlags,
    /// Closed-form denominator: `E - γ(n+½)/(2λ)` or `E + γ(n+½)/(2λ³)`.
    denominator: f64,
    /// Truncation radius; Gaussian tail mass beyond it is below 1e-18.
    radius: f64,
}

/// Closed-form normalization denominator for `(level, gamma, space)`.
///
/// This is the quantity whose sign decides normalizability; it is exposed
/// separately so forensic evaluation can probe non-normalizable rows.
pub fn norm_denominator(level: &EnergyLevel, gamma: f64, space: Space) -> f64 {
    let half = level.n as f64 + 0.5;
    match space {
        Space::Coordinate => level.energy - gamma * half / (2.0 * level.lambda),
        Space::Momentum => level.energy + gamma * half / (2.0 * level.lambda.powi(3)),
    }
}

/// Build a state and verify its normalization by quadrature.
pub fn make_state(level: &EnergyLevel, gamma: f64, space: Space) -> Result<WaveState, StateError> {
    make_state_with(level, gamma, space, &QuadratureSpec::default())
}

pub fn make_state_with(
    level: &EnergyLevel,
    gamma: f64,
    space: Space,
    spec: &QuadratureSpec,
) -> Result<WaveState, StateError> {
    let denominator = norm_denominator(level, gamma, space);
    if denominator <= 0.0 {
        return Err(StateError::NonNormalizable {
            n: level.n,
            gamma,
            space,
            denominator,
        });
    }
    let lambda = level.lambda;
    // Printed closed forms, assembled in log space so 2ⁿn! never overflows:
    //   coordinate: C²  = λ^(1/2) / (2ⁿn!√π) / denom
    //   momentum:   C'² = 1 / (2ⁿn!·λ^(1/2)·√π) / denom
    let ln_base = -(level.n as f64) * std::f64::consts::LN_2 - ln_factorial(level.n) - 0.5 * PI.ln();
    let ln_norm = match space {
        Space::Coordinate => ln_base + 0.5 * lambda.ln() - denominator.ln(),
        Space::Momentum => ln_base - 0.5 * lambda.ln() - denominator.ln(),
    };
    let lambda_eff = match space {
        Space::Coordinate => lambda,
        Space::Momentum => 1.0 / lambda,
    };
    let radius = ((2.0 * level.n as f64 + 1.0) / lambda_eff).sqrt() + 12.0 / lambda_eff.sqrt();
    let mut state = WaveState {
        space,
        level: *level,
        gamma,
        norm_const_sq: ln_norm.exp(),
        validity: ValidityFlags {
            weight_positive: true,
            norm_positive: true,
        },
        denominator,
        radius,
    };
    // The weight is monotone in |a|, so its sign on [0, R] is decided at the
    // endpoints.
    state.validity.weight_positive = state.weight(0.0) > 0.0 && state.weight(radius) > 0.0;
    let norm = quadrature::integrate_even(|a| state.rho(a), radius, spec)?.value;
    if (norm - 1.0).abs() > 1e-8 {
        return Err(StateError::NormalizationCheck {
            n: level.n,
            gamma,
            space,
            value: norm,
        });
    }
    Ok(state)
}

impl WaveState {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn denominator(&self) -> f64 {
        self.denominator
    }

    /// Orthonormal oscillator amplitude `u(a)` with `∫u² = 1` and its derivative.
    pub fn amplitude_pair(&self, a: f64) -> (f64, f64) {
        let lambda = self.level.lambda;
        match self.space {
            Space::Coordinate => {
                let s = lambda.sqrt();
                let (h, dh) = hermite_weighted_pair(self.level.n, s * a);
                (lambda.powf(0.25) * h, lambda.powf(0.75) * dh)
            }
            Space::Momentum => {
                let s = lambda.sqrt();
                let (h, dh) = hermite_weighted_pair(self.level.n, a / s);
                (lambda.powf(-0.25) * h, lambda.powf(-0.75) * dh)
            }
        }
    }

    /// Energy weight `E - ∂V/∂E` of the modified scalar product.
    pub fn weight(&self, a: f64) -> f64 {
        let e = self.level.energy;
        match self.space {
            Space::Coordinate => e - 0.5 * self.gamma * a * a,
            Space::Momentum => e + 0.5 * self.gamma * a * a / self.level.lambda.powi(4),
        }
    }

    fn weight_deriv(&self, a: f64) -> f64 {
        match self.space {
            Space::Coordinate => -self.gamma * a,
            Space::Momentum => self.gamma * a / self.level.lambda.powi(4),
        }
    }

    /// Modified density `ρ(a) = u(a)²·w(a)/D`; even in `a` by construction.
    /// May be negative where the weight changes sign.
    pub fn rho(&self, a: f64) -> f64 {
        let (u, _) = self.amplitude_pair(a);
        u * u * self.weight(a) / self.denominator
    }

    /// Score `d ln ρ/da = 2u'/u + w'/w`. Diverges at density nodes; callers
    /// doing finite-difference checks must stay away from them.
    pub fn score(&self, a: f64) -> f64 {
        let (u, du) = self.amplitude_pair(a);
        2.0 * du / u + self.weight_deriv(a) / self.weight(a)
    }

    /// Fisher density `ρ(dlnρ/da)² = (4u'²w + 4uu'w' + u²w'²/w)/D`.
    ///
    /// The expanded form is finite at density nodes (zeros of u are first
    /// order, so ρ'²/ρ tends to `4u'²w/D` there); no limit handling needed.
    pub fn fisher_density(&self, a: f64) -> Result<f64, StateError> {
        if !self.validity.weight_positive {
            return Err(self.invalid_density());
        }
        Ok(self.fisher_density_unchecked(a))
    }

    pub(crate) fn fisher_density_unchecked(&self, a: f64) -> f64 {
        let (u, du) = self.amplitude_pair(a);
        let w = self.weight(a);
        let dw = self.weight_deriv(a);
        (4.0 * du * du * w + 4.0 * u * du * dw + u * u * dw * dw / w) / self.denominator
    }

    /// Shannon density `ρ ln ρ` with the 0·ln0 = 0 convention in the tails.
    pub fn shannon_density(&self, a: f64) -> Result<f64, StateError> {
        if !self.validity.weight_positive {
            return Err(self.invalid_density());
        }
        Ok(self.shannon_density_unchecked(a))
    }

    pub(crate) fn shannon_density_unchecked(&self, a: f64) -> f64 {
        let rho = self.rho(a);
        if rho < 1e-300 {
            0.0
        } else {
            rho * rho.ln()
        }
    }

    /// Abscissae of the density nodes (zeros of u) inside the domain, ascending.
    pub fn nodes(&self) -> Vec<f64> {
        let lambda = self.level.lambda;
        let scale = match self.space {
            Space::Coordinate => 1.0 / lambda.sqrt(),
            Space::Momentum => lambda.sqrt(),
        };
        quadrature::hermite_zeros(self.level.n as usize)
            .into_iter()
            .map(|t| t * scale)
            .filter(|x| x.abs() < self.radius)
            .collect()
    }

    pub(crate) fn invalid_density(&self) -> StateError {
        StateError::InvalidDensity {
            n: self.level.n,
            gamma: self.gamma,
            space: self.space,
        }
    }
}

/// Curve kind for grid sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Rho,
    FisherDensity,
    ShannonDensity,
}

impl std::str::FromStr for CurveKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rho" => Ok(CurveKind::Rho),
            "fisher" | "fisher_density" => Ok(CurveKind::FisherDensity),
            "shannon" | "shannon_density" => Ok(CurveKind::ShannonDensity),
            other => Err(format!("unknown curve kind '{other}'")),
        }
    }
}

/// Grid samples of ρ, the Fisher density, or the Shannon density.
#[derive(Debug, Clone, Serialize)]
pub struct DensityCurve {
    pub space: Space,
    pub kind: CurveKind,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl DensityCurve {
    pub fn sample(state: &WaveState, kind: CurveKind, grid: Vec<f64>) -> Result<Self, StateError> {
        assert!(grid.windows(2).all(|w| w[1] > w[0]), "grid must be strictly increasing");
        let values: Vec<f64> = match kind {
            CurveKind::Rho => grid.iter().map(|&a| state.rho(a)).collect(),
            CurveKind::FisherDensity => {
                if !state.validity.weight_positive {
                    return Err(state.invalid_density());
                }
                grid.iter().map(|&a| state.fisher_density_unchecked(a)).collect()
            }
            CurveKind::ShannonDensity => {
                if !state.validity.weight_positive {
                    return Err(state.invalid_density());
                }
                grid.iter().map(|&a| state.shannon_density_unchecked(a)).collect()
            }
        };
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Ok(DensityCurve {
            space: state.space,
            kind,
            grid,
            values,
        })
    }

    /// CSV body: `a,value` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,value\n");
        for (a, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{a},{v}\n"));
        }
        out
    }
}

/// Curve of the Fisher density on a grid.
pub fn fisher_density_curve(state: &WaveState, grid: Vec<f64>) -> Result<DensityCurve, StateError> {
    DensityCurve::sample(state, CurveKind::FisherDensity, grid)
}

/// Curve of the Shannon density on a grid.
pub fn shannon_density_curve(state: &WaveState, grid: Vec<f64>) -> Result<DensityCurve, StateError> {
    DensityCurve::sample(state, CurveKind::ShannonDensity, grid)
}
