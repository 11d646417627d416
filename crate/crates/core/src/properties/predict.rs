//! Bernoulli KL divergence and the closed-form windows for the chromatic
//! and quasi-clique numbers. Natural logarithms throughout.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::math::ln;

/// ε used when testing the strict refinement interval of the sparse
/// chromatic window.
pub const DEFAULT_REFINEMENT_EPSILON: f64 = 1e-6;

/// D below this is reported as divergent (γ ≈ p).
const DIVERGENCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PredictError {
    #[error("KL divergence needs p in (0,1) and gamma in [0,1], got gamma={gamma}, p={p}")]
    DomainError { gamma: f64, p: f64 },
    #[error("p_max*(n-1) = {0} must be positive")]
    DegenerateProduct(f64),
    #[error("need p_max < gamma <= 1, got gamma={gamma}, p_max={p_max}")]
    HypothesisViolation { gamma: f64, p_max: f64 },
    #[error("kernel peak must be positive, got {0}")]
    NonPositivePeak(f64),
    #[error("need n >= 3 for log log n, got {0}")]
    TooFewVertices(usize),
}

/// `D(γ, p) = γ log(γ/p) + (1−γ) log((1−γ)/(1−p))`, with `0·log 0 = 0`.
pub fn kl_divergence_bernoulli(gamma: f64, p: f64) -> Result<f64, PredictError> {
    if !(p > 0.0 && p < 1.0) || !(0.0..=1.0).contains(&gamma) {
        return Err(PredictError::DomainError { gamma, p });
    }
    if gamma == 1.0 {
        return Ok(-ln(p));
    }
    if gamma == 0.0 {
        return Ok(-ln(1.0 - p));
    }
    let d = gamma * ln(gamma / p) + (1.0 - gamma) * ln((1.0 - gamma) / (1.0 - p));
    Ok(d.max(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub enum PredictionWindow {
    /// `χ ∈ {ℓ, ℓ+1, ℓ+2}`, refined to `{ℓ, ℓ+1}` inside the strict interval.
    ChromaticSparse {
        ell: usize,
        product: f64,
        members: Vec<usize>,
        refined: Option<Vec<usize>>,
        epsilon: f64,
    },
    /// `χ ∈ {d, d+1}`, refined to `{d}`. The refinement condition is printed
    /// with an unbound variable; `ambiguous_condition` marks that reading.
    ChromaticDense {
        d: usize,
        k_mm: f64,
        members: Vec<usize>,
        refined: Option<Vec<usize>>,
        ambiguous_condition: bool,
    },
    /// Coarse `[(1−ε)ω, (1+ε)ω]` and refined `[B−ε', B+1+ε']`.
    QuasiClique {
        n: usize,
        gamma: f64,
        p_max: f64,
        epsilon: f64,
        refined_epsilon: f64,
        divergence: f64,
        center: f64,
        coarse: (f64, f64),
        refined_center: f64,
        refined: (f64, f64),
        divergent: bool,
        clique_specialization: bool,
    },
}

impl PredictionWindow {
    pub fn kind(&self) -> &'static str {
        match self {
            PredictionWindow::ChromaticSparse { .. } => "chromatic_sparse",
            PredictionWindow::ChromaticDense { .. } => "chromatic_lambda_n",
            PredictionWindow::QuasiClique { .. } => "quasi_clique",
        }
    }

    /// Membership in the main window (the theorem's set or coarse interval).
    pub fn contains(&self, value: usize) -> bool {
        match self {
            PredictionWindow::ChromaticSparse { members, .. }
            | PredictionWindow::ChromaticDense { members, .. } => members.contains(&value),
            PredictionWindow::QuasiClique { coarse, .. } => {
                let v = value as f64;
                coarse.0 <= v && v <= coarse.1
            }
        }
    }

    /// Membership in the refined window, when one applies.
    pub fn refined_contains(&self, value: usize) -> Option<bool> {
        match self {
            PredictionWindow::ChromaticSparse { refined, .. }
            | PredictionWindow::ChromaticDense { refined, .. } => {
                refined.as_ref().map(|r| r.contains(&value))
            }
            PredictionWindow::QuasiClique { refined, .. } => {
                let v = value as f64;
                Some(refined.0 <= v && v <= refined.1)
            }
        }
    }

    /// Whether every value in `[lo, hi]` is inside the main window, or
    /// every value is outside it. `None` when the bracket straddles.
    pub fn bracket_verdict(&self, lo: usize, hi: usize) -> Option<bool> {
        let inside = (lo..=hi).filter(|&v| self.contains(v)).count();
        if inside == hi - lo + 1 {
            Some(true)
        } else if inside == 0 {
            Some(false)
        } else {
            None
        }
    }

    /// `(low, high)` of the main window.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            PredictionWindow::ChromaticSparse { members, .. }
            | PredictionWindow::ChromaticDense { members, .. } => (
                *members.first().unwrap_or(&0) as f64,
                *members.last().unwrap_or(&0) as f64,
            ),
            PredictionWindow::QuasiClique { coarse, .. } => *coarse,
        }
    }
}

/// `ℓ = max{l : 2(l−1) log(l−1) ≤ p_max (n−1)}`; `l = 2` always qualifies.
pub fn predict_chromatic_sparse_ell(
    p_max: f64,
    n: usize,
) -> Result<(usize, PredictionWindow), PredictError> {
    predict_chromatic_sparse_from_product(p_max * (n as f64 - 1.0), DEFAULT_REFINEMENT_EPSILON)
}

pub fn predict_chromatic_sparse_from_product(
    product: f64,
    epsilon: f64,
) -> Result<(usize, PredictionWindow), PredictError> {
    if product.is_nan() || product <= 0.0 || product.is_infinite() {
        return Err(PredictError::DegenerateProduct(product));
    }
    let mut ell = 2usize;
    loop {
        let l = ell as f64;
        if 2.0 * l * ln(l) <= product {
            ell += 1;
        } else {
            break;
        }
    }
    let l = ell as f64;
    let narrowed = product > (2.0 * l - 1.0) * ln(l) + epsilon && product < 2.0 * l * ln(l);
    Ok((
        ell,
        PredictionWindow::ChromaticSparse {
            ell,
            product,
            members: vec![ell, ell + 1, ell + 2],
            refined: narrowed.then(|| vec![ell, ell + 1]),
            epsilon,
        },
    ))
}

/// `d = min{c : k(m,m) < 2c log c}`.
pub fn predict_chromatic_dense_d(k_mm: f64) -> Result<(usize, PredictionWindow), PredictError> {
    if k_mm.is_nan() || k_mm <= 0.0 || k_mm.is_infinite() {
        return Err(PredictError::NonPositivePeak(k_mm));
    }
    let mut d = 1usize;
    while k_mm >= 2.0 * d as f64 * ln(d as f64) {
        d += 1;
    }
    let c = d as f64;
    let narrowed = k_mm > (2.0 * c - 1.0) * ln(c) && k_mm < 2.0 * c * ln(c);
    Ok((
        d,
        PredictionWindow::ChromaticDense {
            d,
            k_mm,
            members: vec![d, d + 1],
            refined: narrowed.then(|| vec![d]),
            ambiguous_condition: true,
        },
    ))
}

/// `ω = 2 log n / D(γ, p_max)` with coarse `[(1±ε)ω]` and the refined
/// window `[B−ε, B+1+ε]`, `B = (2/D)(log n − log log n + log(eD/2))`.
pub fn predict_quasi_clique(
    n: usize,
    gamma: f64,
    p_max: f64,
    epsilon: f64,
) -> Result<PredictionWindow, PredictError> {
    predict_quasi_clique_with(n, gamma, p_max, epsilon, epsilon)
}

pub fn predict_quasi_clique_with(
    n: usize,
    gamma: f64,
    p_max: f64,
    epsilon: f64,
    refined_epsilon: f64,
) -> Result<PredictionWindow, PredictError> {
    if !(gamma > p_max && gamma <= 1.0) {
        return Err(PredictError::HypothesisViolation { gamma, p_max });
    }
    if n < 3 {
        return Err(PredictError::TooFewVertices(n));
    }
    let d = kl_divergence_bernoulli(gamma, p_max)?;
    let ln_n = ln(n as f64);
    let divergent = d < DIVERGENCE_FLOOR;
    let (center, refined_center) = if divergent {
        (f64::INFINITY, f64::INFINITY)
    } else {
        let b = 2.0 / d * (ln_n - ln(ln_n) + ln(core::f64::consts::E * d / 2.0));
        (2.0 * ln_n / d, b)
    };
    Ok(PredictionWindow::QuasiClique {
        n,
        gamma,
        p_max,
        epsilon,
        refined_epsilon,
        divergence: d,
        center,
        coarse: ((1.0 - epsilon) * center, (1.0 + epsilon) * center),
        refined_center,
        refined: (
            refined_center - refined_epsilon,
            refined_center + 1.0 + refined_epsilon,
        ),
        divergent,
        clique_specialization: gamma == 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_divergence_bernoulli(0.3, 0.3).unwrap(), 0.0);
        assert!(close(
            kl_divergence_bernoulli(1.0, 0.5).unwrap(),
            core::f64::consts::LN_2,
            1e-15
        ));
        // 0.9 ln 1.8 + 0.1 ln 0.2 at 30-digit precision: 0.368064207168497069910...
        assert!(close(
            kl_divergence_bernoulli(0.9, 0.5).unwrap(),
            0.368_064_207_168_497_1,
            1e-15
        ));
        assert!(close(
            kl_divergence_bernoulli(0.0, 0.25).unwrap(),
            -(0.75f64).ln(),
            1e-15
        ));
        assert!(kl_divergence_bernoulli(0.5, 0.0).is_err());
        assert!(kl_divergence_bernoulli(0.5, 1.0).is_err());
        assert!(kl_divergence_bernoulli(1.5, 0.5).is_err());
    }

    #[test]
    fn kl_is_increasing_above_p() {
        let p = 0.35;
        let mut prev = 0.0;
        for i in 1..=65 {
            let g = p + i as f64 * 0.01;
            let d = kl_divergence_bernoulli(g.min(1.0), p).unwrap();
            assert!(d > prev);
            prev = d;
        }
        assert!(close(
            kl_divergence_bernoulli(1.0, p).unwrap(),
            -p.ln(),
            1e-15
        ));
    }

    #[test]
    fn sparse_ell_examples() {
        let (ell, w) =
            predict_chromatic_sparse_from_product(10.0, DEFAULT_REFINEMENT_EPSILON).unwrap();
        assert_eq!(ell, 4);
        let PredictionWindow::ChromaticSparse {
            members, refined, ..
        } = &w
        else {
            panic!()
        };
        assert_eq!(members, &[4, 5, 6]);
        // 7 ln 4 ≈ 9.704 < 10 < 8 ln 4 ≈ 11.09
        assert_eq!(refined.as_deref(), Some(&[4, 5][..]));

        assert_eq!(
            predict_chromatic_sparse_from_product(0.5, 1e-6).unwrap().0,
            2
        );
        let edge = 2.0 * 4.0 * 4f64.ln();
        assert_eq!(
            predict_chromatic_sparse_from_product(edge, 1e-6).unwrap().0,
            5
        );
        assert!(matches!(
            predict_chromatic_sparse_ell(0.0, 100),
            Err(PredictError::DegenerateProduct(_))
        ));
    }

    #[test]
    fn sparse_ell_depends_on_product_only() {
        for (p, n) in [(0.01, 1001usize), (0.02, 501), (0.05, 201)] {
            assert_eq!(predict_chromatic_sparse_ell(p, n).unwrap().0, 4);
        }
    }

    #[test]
    fn dense_d_examples() {
        let (d, w) = predict_chromatic_dense_d(3.0).unwrap();
        assert_eq!(d, 3);
        assert!(w.contains(3) && w.contains(4) && !w.contains(5));
        assert_eq!(w.refined_contains(3), None);
        assert_eq!(predict_chromatic_dense_d(1.0).unwrap().0, 2);
        let (d, w) = predict_chromatic_dense_d(20.0).unwrap();
        assert_eq!(d, 6);
        // 11 ln 6 ≈ 19.71 < 20 < 12 ln 6 ≈ 21.50
        assert_eq!(w.refined_contains(6), Some(true));
    }

    #[test]
    fn quasi_clique_examples() {
        let w = predict_quasi_clique(1000, 0.9, 0.5, 0.1).unwrap();
        let PredictionWindow::QuasiClique {
            center,
            refined_center,
            ..
        } = w
        else {
            panic!()
        };
        // High-precision oracle: 37.5355991940820141..., 23.2702088443749302...
        assert!(close(center, 37.53, 1e-2), "{center}");
        assert!(close(center, 37.535_599_194_082_01, 1e-12));
        assert!(
            close(refined_center, 23.270_208_844_374_93, 1e-12),
            "{refined_center}"
        );

        assert!(matches!(
            predict_quasi_clique(100, 0.4, 0.5, 0.1),
            Err(PredictError::HypothesisViolation { .. })
        ));
        let w = predict_quasi_clique(100, 0.5 + 1e-9, 0.5, 0.1).unwrap();
        let PredictionWindow::QuasiClique { divergent, .. } = w else {
            panic!()
        };
        assert!(divergent);
    }

    #[test]
    fn clique_specialization_matches_classic_form() {
        // With D = log(1/p) the refined center is 2 log_b n − 2 log_b log_b n + 2 log_b(e/2).
        let (n, p) = (500usize, 0.5f64);
        let w = predict_quasi_clique_with(n, 1.0, p, 0.35, 1.0).unwrap();
        let PredictionWindow::QuasiClique {
            refined_center,
            refined,
            clique_specialization,
            ..
        } = w
        else {
            panic!()
        };
        let lb = |x: f64| x.ln() / (1.0 / p).ln();
        let classic =
            2.0 * lb(n as f64) - 2.0 * lb(lb(n as f64)) + 2.0 * lb(std::f64::consts::E / 2.0);
        assert!(close(refined_center, classic, 1e-12));
        assert!(clique_specialization);
        assert!(close(refined.1 - refined.0, 3.0, 1e-12));
    }
}
