//! Spiked-model parametrization and plug-in estimators.
//!
//! The population covariance is sigma^2 (I + sum_j lambda_j v_j v_j^T) with
//! r1 positive perturbation weights and r2 negative weights in (-1, 0).
//! Estimators recover the weights, the direction-overlap factors and the
//! noise-to-separation ratio alpha from the pooled sample spectrum.

use ndarray::{Array1, ArrayView1};

use crate::linalg::EigenDecomposition;
use crate::{Error, Result};

/// Relative threshold below which an eigenvalue is treated as a structural
/// zero of a rank-deficient pooled covariance.
const ZERO_RTOL: f64 = 1e-12;

/// Multiplicative margin applied to the bulk edges when counting spikes.
pub const DETECT_MARGIN: f64 = 0.05;

/// Population-side description of the spiked model.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikedModelParams {
    pub sigma2: f64,
    /// Positive weights, non-increasing.
    pub pos_spikes: Vec<f64>,
    /// Negative weights in (-1, 0), non-increasing; the last entry is the
    /// most negative one and pairs with the smallest sample eigenvalue.
    pub neg_spikes: Vec<f64>,
    /// Optional orthonormal spike directions (simulation only).
    pub directions: Option<Vec<Array1<f64>>>,
}

impl SpikedModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.sigma2 <= 0.0 {
            return Err(Error::Config("sigma2 must be positive".into()));
        }
        if self.pos_spikes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Config("positive spikes must be non-increasing".into()));
        }
        if self.pos_spikes.iter().any(|&l| l <= 0.0) {
            return Err(Error::Config("positive spikes must be > 0".into()));
        }
        if self.neg_spikes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Config("negative spikes must be non-increasing".into()));
        }
        if self.neg_spikes.iter().any(|&l| l <= -1.0 || l >= 0.0) {
            return Err(Error::Config("negative spikes must lie in (-1, 0)".into()));
        }
        if let Some(dirs) = &self.directions {
            for (i, a) in dirs.iter().enumerate() {
                for (j, b) in dirs.iter().enumerate() {
                    let dot = a.dot(b);
                    let want = if i == j { 1.0 } else { 0.0 };
                    if (dot - want).abs() > 1e-10 {
                        return Err(Error::Config(format!(
                            "spike directions {i} and {j} are not orthonormal (dot = {dot})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Finite-sample aspect ratios p/n, p/n0, p/n1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AspectRatios {
    pub j: f64,
    pub j0: f64,
    pub j1: f64,
}

impl AspectRatios {
    pub fn new(p: usize, n0: usize, n1: usize) -> Self {
        let p = p as f64;
        Self {
            j: p / (n0 + n1) as f64,
            j0: p / n0 as f64,
            j1: p / n1 as f64,
        }
    }
}

/// Plug-in estimates for the spikes retained by a fit.
#[derive(Debug, Clone, Default)]
pub struct SpikeEstimates {
    /// Corrected spike weights, positive group then negative group.
    pub lambda_hat: Vec<f64>,
    /// Squared-cosine overlap factors a_j in (0, 1].
    pub a: Vec<f64>,
    /// Projection weights b_j clamped into [0, 1].
    pub b_hat: Vec<f64>,
    /// Estimated sigma^2 / |mu|^2.
    pub alpha_hat: f64,
}

/// Limiting squared cosine between a sample spike eigenvector and its
/// population direction: (lambda^2 - J) / (lambda (lambda + J)).
pub fn angle_factor(lambda: f64, j: f64) -> Result<f64> {
    let threshold = j.sqrt();
    if lambda.abs() <= threshold {
        return Err(Error::UndetectableSpike {
            index: 0,
            lambda,
            threshold,
        });
    }
    Ok((lambda * lambda - j) / (lambda * (lambda + j)))
}

/// Empirical companion Stieltjes transform of the sample spectrum evaluated
/// at eigenvalue `j`, with that eigenvalue left out of the sum.
fn companion_stieltjes(eigenvalues: &[f64], j: usize, n: usize, aspect_j: f64) -> Result<f64> {
    let lj = eigenvalues[j];
    let mut sum = 0.0;
    for (i, &li) in eigenvalues.iter().enumerate() {
        if i == j {
            continue;
        }
        if li == lj {
            return Err(Error::DegenerateSpectrum { index: i });
        }
        sum += 1.0 / (li - lj);
    }
    Ok(-(1.0 - aspect_j) / lj + sum / n as f64)
}

/// Estimates the population spike weight feeding sample eigenvalue `j`
/// (0-based index into the non-increasing spectrum). The eigenvalues must be
/// normalized by sigma^2 so that the bulk has unit scale.
pub fn estimate_spike_eigenvalue(
    j: usize,
    eigenvalues: &[f64],
    n: usize,
    aspect_j: f64,
) -> Result<f64> {
    let lj = eigenvalues[j];
    if lj <= 0.0 {
        return Err(Error::DegenerateSpectrum { index: j });
    }
    let m = companion_stieltjes(eigenvalues, j, n, aspect_j)?;
    if m == 0.0 {
        return Err(Error::DegenerateSpectrum { index: j });
    }
    Ok(-1.0 / m - 1.0)
}

/// Estimates alpha = sigma^2 / |mu|^2 from the debiased squared norm of the
/// sample mean difference.
pub fn estimate_alpha(mu_hat_norm2: f64, sigma2: f64, j0: f64, j1: f64) -> Result<f64> {
    let inv = mu_hat_norm2 / sigma2 - j0 - j1;
    if inv <= 0.0 {
        return Err(Error::InfeasibleAlpha { value: inv });
    }
    Ok(1.0 / inv)
}

/// Estimates the projection weight b_j = (mu^T v_j)^2 / |mu|^2 for one spike,
/// clamped into [0, 1].
#[allow(clippy::too_many_arguments)]
pub fn estimate_bj(
    mu_hat: ArrayView1<f64>,
    u_j: ArrayView1<f64>,
    lambda_hat_j: f64,
    sigma2: f64,
    j: f64,
    j0: f64,
    j1: f64,
) -> Result<f64> {
    if lambda_hat_j == j {
        return Err(Error::Inadmissible(format!(
            "lambda_hat = J = {j} is a singular point of the overlap correction"
        )));
    }
    let denom = mu_hat.dot(&mu_hat) - (j0 + j1) * sigma2;
    if denom <= 0.0 {
        return Err(Error::InfeasibleAlpha {
            value: denom / sigma2,
        });
    }
    let proj = mu_hat.dot(&u_j);
    let correction = (1.0 + j / lambda_hat_j) / (1.0 - j / lambda_hat_j);
    let raw = correction * proj * proj / denom;
    Ok(raw.clamp(0.0, 1.0))
}

/// Default noise-variance estimate: the plain mean of the bulk eigenvalues
/// left after removing r1 top and r2 bottom spikes.
pub fn estimate_sigma2(eig: &EigenDecomposition, r1: usize, r2: usize) -> Result<f64> {
    let p = eig.dim();
    if p <= r1 + r2 {
        return Err(Error::Config(format!(
            "no bulk left: p = {p} <= r1 + r2 = {}",
            r1 + r2
        )));
    }
    let bulk = &eig.eigenvalues.as_slice().unwrap()[r1..p - r2];
    Ok(bulk.iter().sum::<f64>() / bulk.len() as f64)
}

/// Heuristic spike-count detection: counts eigenvalues beyond the bulk
/// edges sigma^2 (1 +- sqrt(J))^2 with a multiplicative margin, refining the
/// bulk-mean noise estimate over three passes. Structural zeros of a
/// rank-deficient covariance are ignored, and no negative spike is
/// detectable when J >= 1.
pub fn detect_spike_counts(eig: &EigenDecomposition, aspect_j: f64) -> (usize, usize) {
    let l = eig.eigenvalues.as_slice().unwrap();
    let p = l.len();
    if p == 0 {
        return (0, 0);
    }
    let zero_tol = ZERO_RTOL * l[0].max(0.0);
    let sqrt_j = aspect_j.sqrt();
    let mut sigma2 = l.iter().sum::<f64>() / p as f64;
    let mut counts = (0usize, 0usize);
    if sigma2 <= 0.0 {
        return counts;
    }
    for _ in 0..3 {
        let upper = sigma2 * (1.0 + sqrt_j).powi(2) * (1.0 + DETECT_MARGIN);
        let lower = sigma2 * (1.0 - sqrt_j).powi(2) * (1.0 - DETECT_MARGIN);
        let r1 = l.iter().filter(|&&x| x > upper).count();
        let r2 = if aspect_j >= 1.0 {
            0
        } else {
            l.iter().filter(|&&x| x < lower && x > zero_tol).count()
        };
        let bulk = &l[r1..p - r2];
        if bulk.is_empty() {
            break;
        }
        sigma2 = bulk.iter().sum::<f64>() / bulk.len() as f64;
        counts = (r1, r2);
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn angle_factor_closed_form() {
        // (20^2 - 1.5) / (20 * 21.5) = 398.5 / 430
        let a = angle_factor(20.0, 1.5).unwrap();
        assert!((a - 398.5 / 430.0).abs() < 1e-12);
        assert!((a - 0.926744).abs() < 1e-6);
    }

    #[test]
    fn angle_factor_rejects_threshold() {
        let j = 0.5;
        assert!(angle_factor(j.sqrt(), j).is_err());
        assert!(angle_factor(-(j.sqrt()), j).is_err());
        assert!(angle_factor(0.0, j).is_err());
    }

    #[test]
    fn angle_factor_limits_and_monotonicity() {
        let j = 0.4;
        let mut prev = 0.0;
        for k in 1..200 {
            let lambda = j.sqrt() + 0.5 * k as f64;
            let a = angle_factor(lambda, j).unwrap();
            assert!(a > prev && a < 1.0);
            prev = a;
        }
        assert!(angle_factor(1e9, j).unwrap() > 1.0 - 1e-8);
        // decreasing in J for fixed lambda
        assert!(angle_factor(5.0, 0.2).unwrap() > angle_factor(5.0, 0.8).unwrap());
        // negative detectable spikes land in (0, 1)
        let a = angle_factor(-0.5, 0.1).unwrap();
        assert!(a > 0.0 && a < 1.0);
    }

    #[test]
    fn estimate_alpha_examples() {
        assert!((estimate_alpha(4.0, 1.0, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            estimate_alpha(2.0, 1.0, 1.0, 1.0),
            Err(Error::InfeasibleAlpha { .. })
        ));
        // exact population inputs reproduce alpha exactly
        let alpha = estimate_alpha(9.0 + 2.5, 1.0, 1.5, 1.0).unwrap();
        assert!((alpha - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn estimate_bj_clamps_to_unit_interval() {
        // mu perfectly aligned with u, tiny debiased denominator inflation
        let mu = array![2.0, 0.0];
        let u = array![1.0, 0.0];
        let b = estimate_bj(mu.view(), u.view(), 20.0, 1.0, 0.5, 0.7, 0.7).unwrap();
        assert_eq!(b, 1.0);
        let b0 = estimate_bj(array![0.0, 2.0].view(), u.view(), 20.0, 1.0, 0.5, 0.7, 0.7).unwrap();
        assert_eq!(b0, 0.0);
    }

    #[test]
    fn estimate_sigma2_constant_spectrum() {
        let eig = EigenDecomposition {
            eigenvalues: Array1::from_elem(6, 3.0),
            eigenvectors: Array2::eye(6),
        };
        assert!((estimate_sigma2(&eig, 0, 0).unwrap() - 3.0).abs() < 1e-15);
        assert!(estimate_sigma2(&eig, 3, 3).is_err());
    }

    #[test]
    fn estimate_lambda_requires_distinct_eigenvalues() {
        let l = vec![5.0, 2.0, 2.0, 1.0];
        assert!(matches!(
            estimate_spike_eigenvalue(1, &l, 8, 0.5),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn detect_counts_on_synthetic_spectra() {
        // flat unit spectrum: nothing beyond the edges
        let eig = EigenDecomposition {
            eigenvalues: Array1::from_elem(10, 1.0),
            eigenvectors: Array2::eye(10),
        };
        assert_eq!(detect_spike_counts(&eig, 0.25), (0, 0));

        // one clear outlier above the upper edge
        let mut vals = vec![1.0; 10];
        vals[0] = 12.0;
        let eig = EigenDecomposition {
            eigenvalues: Array1::from_vec(vals),
            eigenvectors: Array2::eye(10),
        };
        assert_eq!(detect_spike_counts(&eig, 0.25).0, 1);

        // J >= 1 forbids negative-spike detection even with tiny eigenvalues
        let mut vals = vec![1.0; 10];
        vals[9] = 1e-3;
        let eig = EigenDecomposition {
            eigenvalues: Array1::from_vec(vals),
            eigenvectors: Array2::eye(10),
        };
        assert_eq!(detect_spike_counts(&eig, 1.5).1, 0);
    }

    #[test]
    fn spiked_params_validation() {
        let ok = SpikedModelParams {
            sigma2: 1.0,
            pos_spikes: vec![20.0, 10.0, 5.0],
            neg_spikes: vec![-0.3, -0.5],
            directions: None,
        };
        assert!(ok.validate().is_ok());
        let bad = SpikedModelParams {
            neg_spikes: vec![-0.5, -0.3],
            ..ok.clone()
        };
        assert!(bad.validate().is_err());
        let bad = SpikedModelParams {
            neg_spikes: vec![-1.5],
            ..ok
        };
        assert!(bad.validate().is_err());
    }
}
