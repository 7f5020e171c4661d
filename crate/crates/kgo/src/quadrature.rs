//! Numerical integration engine.
//!
//! Two routes are provided on purpose: an adaptive Gauss-Kronrod integrator for
//! general integrands, and a Gauss-Hermite rule that is exact (to rounding) for
//! polynomial-times-Gaussian integrands. The second serves as an independent
//! oracle for the first on the closed-form Fisher terms.

use nalgebra::DMatrix;
use thiserror::Error;

/// Tolerances and limits governing every adaptive integral.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub panel_order: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        // Two orders below the tightest acceptance tolerance (1e-8) so the
        // quadrature error is negligible against every assertion downstream.
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_depth: 40,
            panel_order: 15,
        }
    }
}

/// A converged integral with its error bound.
#[derive(Debug, Clone, Copy)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels_used: u32,
}

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("adaptive integration did not converge: value {value:.17e}, error estimate {error_estimate:.3e} after {panels_used} panels")]
    NoConvergence {
        value: f64,
        error_estimate: f64,
        panels_used: u32,
    },
}

// Gauss-Kronrod 15-point pair (QUADPACK QK15). The embedded 7-point Gauss
// rule supplies the per-panel error estimate.
#[allow(clippy::excessive_precision)]
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One GK15 panel: Kronrod value plus |K15 - G7| as the error surrogate.
fn panel_gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK15[7];
    let mut gauss = fc * WG7[3];
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let x = half * XGK15[jtw];
        let fsum = f(center - x) + f(center + x);
        gauss += WG7[j] * fsum;
        kron += WGK15[jtw] * fsum;
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let x = half * XGK15[jtwm1];
        kron += WGK15[jtwm1] * (f(center - x) + f(center + x));
    }
    ((kron * half), ((kron - gauss) * half).abs())
}

struct Adaptive<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    tol_per_width: f64,
    abs_floor: f64,
    max_depth: u32,
    value: f64,
    error: f64,
    panels: u32,
}

impl<F: Fn(f64) -> f64> Adaptive<'_, F> {
    fn descend(&mut self, a: f64, b: f64, est: f64, err: f64, depth: u32) -> bool {
        let budget = (self.tol_per_width * (b - a)).max(self.abs_floor);
        if err <= budget || depth >= self.max_depth {
            self.value += est;
            self.error += err;
            self.panels += 1;
            return depth < self.max_depth || err <= budget;
        }
        let mid = 0.5 * (a + b);
        let (el, rl) = panel_gk15(self.f, a, mid);
        let (er, rr) = panel_gk15(self.f, mid, b);
        let ok_l = self.descend(a, mid, el, rl, depth + 1);
        let ok_r = self.descend(mid, b, er, rr, depth + 1);
        ok_l && ok_r
    }
}

/// Adaptive integration of `f` over `[a, b]`.
///
/// Deterministic for fixed inputs; errors with the best estimate when the
/// depth limit is reached before the tolerances are met.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, QuadratureError> {
    assert!(a < b, "integrate requires a < b");
    // Pre-split so a localized feature cannot hide between the nodes of a
    // single panel spanning the whole interval.
    const INITIAL_PANELS: usize = 8;
    let width = (b - a) / INITIAL_PANELS as f64;
    let seeds: Vec<(f64, f64, f64, f64)> = (0..INITIAL_PANELS)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == INITIAL_PANELS { b } else { a + width * (i + 1) as f64 };
            let (est, err) = panel_gk15(&f, lo, hi);
            (lo, hi, est, err)
        })
        .collect();
    let scale: f64 = seeds.iter().map(|s| s.2.abs()).sum::<f64>().max(1e-300);
    let tol = (spec.rel_tol * scale).max(spec.abs_tol);
    let mut state = Adaptive {
        f: &f,
        tol_per_width: tol / (b - a),
        abs_floor: spec.abs_tol * 1e-2,
        max_depth: spec.max_depth,
        value: 0.0,
        error: 0.0,
        panels: 0,
    };
    let mut converged = true;
    for (lo, hi, est, err) in seeds {
        converged &= state.descend(lo, hi, est, err, 0);
    }
    let result = IntegralResult {
        value: state.value,
        error_estimate: state.error,
        panels_used: state.panels,
    };
    let final_tol = (spec.rel_tol * result.value.abs()).max(spec.abs_tol);
    if converged || result.error_estimate <= final_tol {
        Ok(result)
    } else {
        Err(QuadratureError::NoConvergence {
            value: result.value,
            error_estimate: result.error_estimate,
            panels_used: result.panels_used,
        })
    }
}

/// Integration of an even function over `[-R, R]`, done as `2∫₀ᴿ`.
///
/// The caller is responsible for `f` actually being even.
pub fn integrate_even<F: Fn(f64) -> f64>(
    f: F,
    radius: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, QuadratureError> {
    let mut r = integrate(f, 0.0, radius, spec)?;
    r.value *= 2.0;
    r.error_estimate *= 2.0;
    Ok(r)
}

/// Even integrand split at interior breakpoints (density nodes), summed.
pub fn integrate_even_split<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    radius: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, QuadratureError> {
    let mut edges = vec![0.0];
    for &p in breakpoints {
        if p > 1e-12 && p < radius - 1e-12 {
            edges.push(p);
        }
    }
    edges.push(radius);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut total = IntegralResult {
        value: 0.0,
        error_estimate: 0.0,
        panels_used: 0,
    };
    for w in edges.windows(2) {
        let r = integrate(&f, w[0], w[1], spec)?;
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.panels_used += r.panels_used;
    }
    total.value *= 2.0;
    total.error_estimate *= 2.0;
    Ok(total)
}

/// Nodes and weights of the m-point Gauss-Hermite rule for weight `e^{-t²}`,
/// from the symmetric Jacobi (Golub-Welsch) eigenproblem.
pub fn gauss_hermite_rule(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut jacobi = DMatrix::<f64>::zeros(m, m);
    for k in 1..m {
        let off = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = off;
        jacobi[(k, k - 1)] = off;
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Zeros of the physicists' Hermite polynomial `H_n`, ascending.
pub fn hermite_zeros(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    gauss_hermite_rule(n).0
}

/// `∫ f(x) e^{-λx²} dx` over the real line, exact to rounding for
/// polynomials `f` of degree ≤ 2m-1.
pub fn gauss_hermite<F: Fn(f64) -> f64>(f: F, lambda: f64, m: usize) -> f64 {
    assert!(lambda > 0.0, "gauss_hermite requires lambda > 0");
    let (nodes, weights) = gauss_hermite_rule(m);
    let s = lambda.sqrt();
    let mut acc = 0.0;
    for (t, w) in nodes.iter().zip(&weights) {
        acc += w * f(t / s);
    }
    acc / s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn gaussian_integral() {
        let r = integrate(|x: f64| (-x * x).exp(), -10.0, 10.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, SQRT_PI, max_relative = 1e-12);
    }

    #[test]
    fn gaussian_second_moment() {
        let r = integrate(
            |x: f64| x * x * (-x * x).exp(),
            -10.0,
            10.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, SQRT_PI / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn hermite_orthogonality_norm() {
        // ∫ H₂(x)² e^{-x²} dx = 2²·2!·√π
        let h2 = |x: f64| 4.0 * x * x - 2.0;
        let r = integrate(
            |x| h2(x) * h2(x) * (-x * x).exp(),
            -12.0,
            12.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 8.0 * SQRT_PI, max_relative = 1e-12);
    }

    #[test]
    fn even_gaussian() {
        let r = integrate_even(|x: f64| (-x * x).exp(), 10.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, SQRT_PI, max_relative = 1e-12);
    }

    #[test]
    fn gauss_hermite_constant() {
        assert_relative_eq!(gauss_hermite(|_| 1.0, 1.0, 5), SQRT_PI, max_relative = 1e-14);
    }

    #[test]
    fn gauss_hermite_quartic_moment() {
        assert_relative_eq!(
            gauss_hermite(|x| x.powi(4), 1.0, 5),
            0.75 * SQRT_PI,
            max_relative = 1e-13
        );
    }

    #[test]
    fn gauss_hermite_scaled_second_moment() {
        // ∫ x² e^{-λx²} dx = √(π/λ)/(2λ)
        let lambda = 0.2;
        let truth = (std::f64::consts::PI / lambda).sqrt() / (2.0 * lambda);
        assert_relative_eq!(gauss_hermite(|x| x * x, lambda, 8), truth, max_relative = 1e-13);
        let adaptive = integrate(
            |x: f64| x * x * (-lambda * x * x).exp(),
            -40.0,
            40.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_relative_eq!(adaptive.value, truth, max_relative = 1e-11);
    }

    #[test]
    fn exactness_against_adaptive() {
        // Polynomials up to degree 2m-1 for the λ values used by the states.
        for &lambda in &[0.2, 0.84, 1.0] {
            for deg in [0usize, 2, 4, 6] {
                let m = deg / 2 + 2;
                let gh = gauss_hermite(|x| x.powi(deg as i32), lambda, m);
                let bound = 60.0 / lambda.sqrt();
                let ad = integrate(
                    |x: f64| x.powi(deg as i32) * (-lambda * x * x).exp(),
                    -bound,
                    bound,
                    &QuadratureSpec::default(),
                )
                .unwrap();
                assert_relative_eq!(gh, ad.value, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn tolerance_honesty() {
        let cases: Vec<(Box<dyn Fn(f64) -> f64>, f64, f64, f64)> = vec![
            (Box::new(|x: f64| (-x * x).exp()), -10.0, 10.0, SQRT_PI),
            (Box::new(|x: f64| x.sin()), 0.0, std::f64::consts::PI, 2.0),
            (Box::new(|x: f64| 1.0 / (1.0 + x * x)), -1.0, 1.0, std::f64::consts::FRAC_PI_2),
        ];
        for (f, a, b, truth) in cases {
            let r = integrate(f, a, b, &QuadratureSpec::default()).unwrap();
            assert!(
                (r.value - truth).abs() <= 3.0 * r.error_estimate.max(1e-15),
                "value {} truth {} err {}",
                r.value,
                truth,
                r.error_estimate
            );
        }
    }

    #[test]
    fn determinism() {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (x.sin() * x).exp() * (-0.3 * x * x).exp();
        let a = integrate(f, -5.0, 7.0, &spec).unwrap();
        let b = integrate(f, -5.0, 7.0, &spec).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error_estimate.to_bits(), b.error_estimate.to_bits());
    }

    #[test]
    fn no_convergence_carries_estimate() {
        let spec = QuadratureSpec {
            max_depth: 2,
            rel_tol: 1e-15,
            abs_tol: 1e-300,
            ..Default::default()
        };
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 3.0, &spec).unwrap_err();
        match err {
            QuadratureError::NoConvergence { value, error_estimate, .. } => {
                assert!(value.is_finite());
                assert!(error_estimate > 0.0);
            }
        }
    }

    #[test]
    fn hermite_zeros_match_known() {
        // H_2 zeros at ±1/√2, H_3 at 0, ±√(3/2)
        let z2 = hermite_zeros(2);
        assert_relative_eq!(z2[1], (0.5f64).sqrt(), max_relative = 1e-12);
        let z3 = hermite_zeros(3);
        assert!(z3[1].abs() < 1e-12);
        assert_relative_eq!(z3[2], (1.5f64).sqrt(), max_relative = 1e-12);
    }
}
