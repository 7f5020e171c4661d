//! Energy spectrum of the oscillator.
//!
//! Squaring the quantization condition `E² - 1 = 2n√(1+γE)` yields the quartic
//! `E⁴ - 2E² - 4n² - 4n²γE + 1 = 0`, which picks up spurious roots (those with
//! `E² - 1 = -2n√(1+γE)`). The quartic is solved by simultaneous
//! Durand-Kerner iteration with Newton polish, and the unsquared condition is
//! then used as the physical filter.

use nalgebra::Complex;
use serde::Serialize;
use thiserror::Error;

/// Positive- or negative-energy solutions of the quantization condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Particle,
    Antiparticle,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Particle => 1.0,
            Branch::Antiparticle => -1.0,
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "particle" => Ok(Branch::Particle),
            "antiparticle" => Ok(Branch::Antiparticle),
            other => Err(format!("unknown branch '{other}'")),
        }
    }
}

/// One physical scenario: coupling, branch, and the residual bound applied to
/// every selected root.
#[derive(Debug, Clone, Copy)]
pub struct ModelConfig {
    pub gamma: f64,
    pub branch: Branch,
    pub quartic_tol: f64,
}

impl ModelConfig {
    pub fn new(gamma: f64, branch: Branch) -> Result<Self, SpectrumError> {
        if !gamma.is_finite() || gamma.abs() >= 2.0 {
            return Err(SpectrumError::UnsupportedGamma { gamma });
        }
        Ok(Self {
            gamma,
            branch,
            quartic_tol: 1e-12,
        })
    }
}

/// A solved level: quantum number, energy, effective width `λ = √(1+γE)`,
/// and the residuals of both forms of the quantization condition.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyLevel {
    pub n: u32,
    pub energy: f64,
    pub lambda: f64,
    pub quartic_residual: f64,
    pub condition_residual: f64,
}

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("no physical root for gamma={gamma}, n={n}, branch={branch:?}")]
    NoPhysicalRoot { gamma: f64, n: u32, branch: Branch },
    #[error("gamma={gamma} outside the supported range |gamma| < 2")]
    UnsupportedGamma { gamma: f64 },
    #[error("gamma=0 has no saturation asymptote; the spectrum grows without bound")]
    UnboundedSpectrum,
}

/// The quartic `E⁴ - 2E² - 4n²γE + (1 - 4n²)` and its derivative.
fn quartic(gamma: f64, n: u32, e: f64) -> f64 {
    let n2 = (n as f64) * (n as f64);
    e.powi(4) - 2.0 * e * e - 4.0 * n2 * gamma * e + (1.0 - 4.0 * n2)
}

/// Magnitude scale of the quartic at `e`: the sum of |monomials|. Residuals
/// are measured against this so the bound stays meaningful when the 4n²
/// terms dwarf E⁴ (high levels near the asymptote).
fn quartic_scale(gamma: f64, n: u32, e: f64) -> f64 {
    let n2 = (n as f64) * (n as f64);
    (e.powi(4) + 2.0 * e * e + 4.0 * n2 * (gamma * e).abs() + (1.0 - 4.0 * n2).abs()).max(1.0)
}

fn quartic_deriv(gamma: f64, n: u32, e: f64) -> f64 {
    let n2 = (n as f64) * (n as f64);
    4.0 * e.powi(3) - 4.0 * e - 4.0 * n2 * gamma
}

fn polish_quartic(gamma: f64, n: u32, mut e: f64) -> f64 {
    for _ in 0..50 {
        let p = quartic(gamma, n, e);
        let dp = quartic_deriv(gamma, n, e);
        if dp == 0.0 {
            break;
        }
        let step = p / dp;
        e -= step;
        if step.abs() <= 1e-16 * e.abs().max(1.0) {
            break;
        }
    }
    e
}

/// All real roots of the quartic quantization condition, with multiplicity,
/// sorted ascending. Complex roots are discarded.
pub fn quartic_real_roots(gamma: f64, n: u32) -> Vec<f64> {
    assert!(gamma.is_finite());
    if n == 0 {
        // (E² - 1)² = 0 for any γ.
        return vec![-1.0, -1.0, 1.0, 1.0];
    }
    // Durand-Kerner on the monic quartic E⁴ + 0·E³ - 2E² + c1·E + c0:
    // all four roots at once, bounded iteration, no linear algebra involved.
    let n2 = (n as f64) * (n as f64);
    let c1 = -4.0 * n2 * gamma;
    let c0 = 1.0 - 4.0 * n2;
    let p = |z: Complex<f64>| ((z * z - 2.0) * z + c1) * z + c0;
    // Cauchy bound keeps all roots inside |z| < radius.
    let radius = 1.0 + c0.abs().max(c1.abs()).max(2.0);
    let seed = Complex::new(0.4, 0.9);
    let mut z: [Complex<f64>; 4] = [seed, seed * seed, seed * seed * seed, seed * seed * seed * seed];
    for zk in z.iter_mut() {
        *zk *= radius / zk.norm();
    }
    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for k in 0..4 {
            let mut denom = Complex::new(1.0, 0.0);
            for j in 0..4 {
                if j != k {
                    denom *= z[k] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let step = p(z[k]) / denom;
            z[k] -= step;
            max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    let mut roots: Vec<f64> = z
        .iter()
        .filter(|z| z.im.abs() <= 1e-6 * z.re.abs().max(1.0))
        .map(|z| polish_quartic(gamma, n, z.re))
        .filter(|e| quartic(gamma, n, *e).abs() / quartic_scale(gamma, n, *e) < 1e-12)
        .collect();
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// Residual of the unsquared condition `E² - 1 - 2n√(1+γE)`.
pub fn condition_residual(gamma: f64, n: u32, e: f64) -> f64 {
    let w = 1.0 + gamma * e;
    if w < 0.0 {
        return f64::INFINITY;
    }
    e * e - 1.0 - 2.0 * (n as f64) * w.sqrt()
}

/// Sensitivity scale of the unsquared condition at `e`, including the
/// derivative term: near the asymptote λ → 0 the condition is stiff and the
/// attainable residual is set by |dg/dE|·eps·|E|, not by the term sizes.
fn condition_scale(gamma: f64, n: u32, e: f64) -> f64 {
    let nf = n as f64;
    let w = (1.0 + gamma * e).max(f64::MIN_POSITIVE);
    let dg = 2.0 * e.abs() + nf * gamma.abs() / w.sqrt();
    (e * e + 1.0 + 2.0 * nf * w.sqrt() + dg * e.abs()).max(1.0)
}

fn polish_condition(gamma: f64, n: u32, mut e: f64) -> f64 {
    for _ in 0..50 {
        let w = 1.0 + gamma * e;
        if w <= 0.0 {
            break;
        }
        let g = e * e - 1.0 - 2.0 * (n as f64) * w.sqrt();
        let dg = 2.0 * e - (n as f64) * gamma / w.sqrt();
        if dg == 0.0 {
            break;
        }
        let mut step = g / dg;
        // keep λ real: backtrack if a full step would cross 1+γE = 0
        while gamma * (e - step) < -1.0 {
            step *= 0.5;
        }
        e -= step;
        if step.abs() <= 1e-16 * e.abs().max(1.0) {
            break;
        }
    }
    e
}

/// Select the physical root for `(config, n)` from the quartic roots.
///
/// Filters: branch sign, real width (`1+γE ≥ 0`), and the unsquared condition
/// (which rejects the spurious roots introduced by squaring). Among survivors
/// the root of smallest |E| is kept, the one connecting continuously to the
/// γ=0 value √(2n+1).
pub fn select_physical(
    roots: &[f64],
    config: &ModelConfig,
    n: u32,
) -> Result<EnergyLevel, SpectrumError> {
    let gamma = config.gamma;
    let no_root = || SpectrumError::NoPhysicalRoot {
        gamma,
        n,
        branch: config.branch,
    };
    if n == 0 {
        // The condition degenerates to E² = 1: exact, no refinement needed.
        let e = config.branch.sign();
        let w = 1.0 + gamma * e;
        if w < 0.0 {
            return Err(no_root());
        }
        return Ok(EnergyLevel {
            n,
            energy: e,
            lambda: w.sqrt(),
            quartic_residual: 0.0,
            condition_residual: 0.0,
        });
    }
    // Spurious roots fail the unsquared condition by O(1); a loose filter
    // separates them before the final polish tightens the residual.
    let filter_tol = 1e-6;
    let mut best: Option<f64> = None;
    for &root in roots {
        if root * config.branch.sign() <= 0.0 {
            continue;
        }
        if 1.0 + gamma * root < -1e-12 {
            continue;
        }
        let resid = condition_residual(gamma, n, root);
        if resid.abs() > filter_tol * root.powi(2).max(1.0) {
            continue;
        }
        match best {
            Some(b) if root.abs() >= b.abs() => {}
            _ => best = Some(root),
        }
    }
    let e = polish_condition(gamma, n, best.ok_or_else(no_root)?);
    let w = 1.0 + gamma * e;
    if w < 0.0 {
        return Err(no_root());
    }
    let level = EnergyLevel {
        n,
        energy: e,
        lambda: w.sqrt(),
        quartic_residual: quartic(gamma, n, e).abs() / quartic_scale(gamma, n, e),
        condition_residual: condition_residual(gamma, n, e).abs() / condition_scale(gamma, n, e),
    };
    if level.quartic_residual > config.quartic_tol || level.condition_residual > config.quartic_tol {
        return Err(no_root());
    }
    Ok(level)
}

/// Solve one level.
pub fn solve_level(config: &ModelConfig, n: u32) -> Result<EnergyLevel, SpectrumError> {
    let roots = quartic_real_roots(config.gamma, n);
    select_physical(&roots, config, n)
}

/// Levels n = 0..=n_max, deterministically ordered by n.
pub fn spectrum(config: &ModelConfig, n_max: u32) -> Result<Vec<EnergyLevel>, SpectrumError> {
    (0..=n_max).map(|n| solve_level(config, n)).collect()
}

/// Saturation limit 1/|γ| of the level sequence.
pub fn asymptote(gamma: f64) -> Result<f64, SpectrumError> {
    if gamma == 0.0 {
        return Err(SpectrumError::UnboundedSpectrum);
    }
    Ok(1.0 / gamma.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(gamma: f64, branch: Branch) -> ModelConfig {
        ModelConfig::new(gamma, branch).unwrap()
    }

    #[test]
    fn quartic_degenerate_n0() {
        assert_eq!(quartic_real_roots(0.0, 0), vec![-1.0, -1.0, 1.0, 1.0]);
        assert_eq!(quartic_real_roots(-0.5, 0), vec![-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn quartic_gamma0_n1() {
        let roots = quartic_real_roots(0.0, 1);
        assert_eq!(roots.len(), 2);
        assert_relative_eq!(roots[0], -(3.0f64).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(roots[1], (3.0f64).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn quartic_gamma_half_n2_oracle() {
        // Frozen from a bisection sign scan on [-10, 10] cross-checked against
        // companion-matrix eigenvalues at high precision.
        let roots = quartic_real_roots(-0.5, 2);
        assert_eq!(roots.len(), 2);
        assert_relative_eq!(roots[0], -2.666_450_744_048_775_7, max_relative = 1e-12);
        assert_relative_eq!(roots[1], 1.641_321_914_488_118_5, max_relative = 1e-12);
    }

    #[test]
    fn quartic_residual_polish() {
        for &gamma in &[0.0, -0.16, -0.5, -0.8, 0.3, 1.2] {
            for n in 0..=12u32 {
                for &e in &quartic_real_roots(gamma, n) {
                    assert!(
                        quartic(gamma, n, e).abs() / e.powi(4).abs().max(1.0) < 1e-12,
                        "gamma={gamma} n={n} e={e}"
                    );
                }
            }
        }
    }

    #[test]
    fn select_n0_is_exact() {
        let lvl = select_physical(&[-1.0, -1.0, 1.0, 1.0], &cfg(-0.8, Branch::Particle), 0).unwrap();
        assert_eq!(lvl.energy, 1.0);
        assert_relative_eq!(lvl.lambda * lvl.lambda, 0.2, epsilon = 1e-14);
    }

    #[test]
    fn select_gamma0_closed_form() {
        let roots = quartic_real_roots(0.0, 1);
        let lvl = select_physical(&roots, &cfg(0.0, Branch::Particle), 1).unwrap();
        assert_relative_eq!(lvl.energy, (3.0f64).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn select_gamma_half_n2_oracle() {
        // Bisection of the unsquared condition on (1, 1/|γ|).
        let roots = quartic_real_roots(-0.5, 2);
        let lvl = select_physical(&roots, &cfg(-0.5, Branch::Particle), 2).unwrap();
        assert_relative_eq!(lvl.energy, 1.641_321_914_488_118_5, max_relative = 1e-12);
        assert!(lvl.energy > 1.0 && lvl.energy < 2.0);
    }

    #[test]
    fn squaring_filter_not_vacuous() {
        // At gamma=-1.2, n=1 the quartic has a real root near 0.808 with
        // E² - 1 = -2λ: it must fail the unsquared filter, leaving no
        // physical particle root at all.
        let roots = quartic_real_roots(-1.2, 1);
        let spurious = roots
            .iter()
            .find(|e| (**e - 0.808_298_099_571_465_5).abs() < 1e-9)
            .copied()
            .expect("expected real root near 0.8083");
        assert!(condition_residual(-1.2, 1, spurious).abs() > 0.5);
        let err = select_physical(&roots, &cfg(-1.2, Branch::Particle), 1).unwrap_err();
        assert!(matches!(err, SpectrumError::NoPhysicalRoot { .. }));
    }

    #[test]
    fn gamma0_anchor() {
        let levels = spectrum(&cfg(0.0, Branch::Particle), 50).unwrap();
        for lvl in levels {
            let truth = (2.0 * lvl.n as f64 + 1.0).sqrt();
            assert_relative_eq!(lvl.energy, truth, max_relative = 1e-12);
        }
    }

    #[test]
    fn branch_symmetry() {
        for &gamma in &[0.05, 0.16, 0.32, 0.5, 0.8] {
            for n in 0..=8u32 {
                let p = solve_level(&cfg(gamma, Branch::Particle), n).unwrap();
                let a = solve_level(&cfg(-gamma, Branch::Antiparticle), n).unwrap();
                assert_relative_eq!(p.energy, -a.energy, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn monotone_saturation() {
        let levels = spectrum(&cfg(-0.5, Branch::Particle), 500).unwrap();
        for w in levels.windows(2) {
            assert!(w[1].energy > w[0].energy);
        }
        assert!(levels.iter().all(|l| l.energy < 2.0));
    }

    #[test]
    fn asymptote_values() {
        assert_relative_eq!(asymptote(-0.5).unwrap(), 2.0);
        assert_relative_eq!(asymptote(-0.16).unwrap(), 6.25);
        assert!(matches!(asymptote(0.0), Err(SpectrumError::UnboundedSpectrum)));
    }

    #[test]
    fn e200_near_asymptote() {
        // Asymptotic oracle: bisection of the unsquared condition gives
        // E_200 = 1.9998875337364008 for gamma = -0.5.
        let lvl = solve_level(&cfg(-0.5, Branch::Particle), 200).unwrap();
        assert_relative_eq!(lvl.energy, 1.999_887_533_736_400_8, max_relative = 1e-10);
        assert!((lvl.energy - 2.0).abs() < 1.2e-4);
    }

    #[test]
    fn unsupported_gamma_rejected() {
        assert!(ModelConfig::new(2.5, Branch::Particle).is_err());
        assert!(ModelConfig::new(f64::NAN, Branch::Particle).is_err());
    }
}
