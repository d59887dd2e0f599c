//! Closed-form deterministic misclassification surfaces and the
//! omega-reparametrization used by the grid search.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Standard normal CDF through the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// One spike feeding the surface: weight lambda, overlap factor a and
/// projection weight b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpike {
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
}

/// Regularization weights for the positive- and negative-spike groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPair {
    pub gamma1: f64,
    pub gamma2: f64,
}

/// A point of the open unit square parametrizing the grid search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaPoint {
    pub omega1: f64,
    pub omega2: f64,
}

/// All scalars feeding the deterministic error surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceParams {
    /// Positive spikes, lambda non-increasing.
    pub pos: Vec<SurfaceSpike>,
    /// Negative spikes, lambda non-increasing; the last entry is the
    /// reference spike lambda_{-1}.
    pub neg: Vec<SurfaceSpike>,
    /// sigma^2 / |mu|^2.
    pub alpha: f64,
    pub j0: f64,
    pub j1: f64,
    pub pi0: f64,
}

impl SurfaceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.pi0 > 0.0 && self.pi0 < 1.0) {
            return Err(Error::Config("pi0 must lie in (0, 1)".into()));
        }
        if self.alpha <= 0.0 {
            return Err(Error::Config("alpha must be positive".into()));
        }
        let bsum: f64 = self.pos.iter().chain(&self.neg).map(|s| s.b).sum();
        if self.pos.iter().chain(&self.neg).any(|s| !(0.0..=1.0).contains(&s.b)) {
            return Err(Error::Config("every b_j must lie in [0, 1]".into()));
        }
        if bsum > 1.0 + 1e-9 {
            return Err(Error::Config(format!("sum of b_j = {bsum} exceeds 1")));
        }
        Ok(())
    }

    pub fn pi1(&self) -> f64 {
        1.0 - self.pi0
    }

    /// log(pi1 / pi0), the decision threshold of the plain classifier.
    pub fn threshold_c(&self) -> f64 {
        (self.pi1() / self.pi0).ln()
    }

    /// eta = alpha (J0 - J1 + 2 c); always recomputed from its definition.
    pub fn eta(&self) -> f64 {
        self.alpha * (self.j0 - self.j1 + 2.0 * self.threshold_c())
    }

    /// zeta = alpha (J0 + J1); always recomputed from its definition.
    pub fn zeta(&self) -> f64 {
        self.alpha * (self.j0 + self.j1)
    }

    /// Largest positive spike, if any.
    pub fn lambda1(&self) -> Option<f64> {
        self.pos.first().map(|s| s.lambda)
    }

    /// Most negative spike lambda_{-1}, if any.
    pub fn lambda_m1(&self) -> Option<f64> {
        self.neg.last().map(|s| s.lambda)
    }

    /// Points of (0, 1) excluded from the omega2 axis: images of the poles
    /// 1 + gamma2 lambda_j = 0, at (1 + lambda_j / lambda_{-1})^{-1}.
    pub fn omega2_exclusions(&self) -> Vec<f64> {
        match self.lambda_m1() {
            Some(lm1) => self.neg.iter().map(|s| 1.0 / (1.0 + s.lambda / lm1)).collect(),
            None => Vec::new(),
        }
    }
}

/// Maps an omega point onto the regularization weights:
/// gamma1 = w1 / ((1 - w1) lambda1), gamma2 = -w2 / ((1 - w2) lambda_{-1}).
/// A degenerate axis (no spikes in that group) maps to 0.
pub fn omega_to_gamma(w: OmegaPoint, lambda1: Option<f64>, lambda_m1: Option<f64>) -> Result<GammaPair> {
    for omega in [w.omega1, w.omega2] {
        if !(0.0..1.0).contains(&omega) {
            return Err(Error::Inadmissible(format!("omega = {omega} outside [0, 1)")));
        }
    }
    let gamma1 = match lambda1 {
        Some(l1) if w.omega1 > 0.0 => w.omega1 / ((1.0 - w.omega1) * l1),
        _ => 0.0,
    };
    let gamma2 = match lambda_m1 {
        Some(lm1) if w.omega2 > 0.0 => -w.omega2 / ((1.0 - w.omega2) * lm1),
        _ => 0.0,
    };
    Ok(GammaPair { gamma1, gamma2 })
}

/// Per-spike shrinkage weight gamma_{i,j} = gamma_i lambda_j / (1 + gamma_i lambda_j).
fn shrink_weight(gamma: f64, lambda: f64) -> Result<f64> {
    let denom = 1.0 + gamma * lambda;
    if denom == 0.0 {
        return Err(Error::Inadmissible(format!(
            "pole 1 + gamma lambda = 0 at gamma = {gamma}, lambda = {lambda}"
        )));
    }
    Ok(gamma * lambda / denom)
}

/// Per-spike weights for both groups: gamma1 applies to positive spikes,
/// gamma2 to negative ones.
pub fn gamma_weights(gp: GammaPair, sp: &SurfaceParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let pos = sp
        .pos
        .iter()
        .map(|s| shrink_weight(gp.gamma1, s.lambda))
        .collect::<Result<Vec<_>>>()?;
    let neg = sp
        .neg
        .iter()
        .map(|s| shrink_weight(gp.gamma2, s.lambda))
        .collect::<Result<Vec<_>>>()?;
    Ok((pos, neg))
}

/// Direct omega-form of the positive-group weight,
/// omega1 lambda_j / ((1 - omega1) lambda_1 + omega1 lambda_j).
pub fn omega_weight_pos(omega1: f64, lambda_j: f64, lambda_1: f64) -> f64 {
    omega1 * lambda_j / ((1.0 - omega1) * lambda_1 + omega1 * lambda_j)
}

/// Direct omega-form of the negative-group weight,
/// -omega2 lambda_j / ((1 - omega2) lambda_{-1} - omega2 lambda_j).
pub fn omega_weight_neg(omega2: f64, lambda_j: f64, lambda_m1: f64) -> f64 {
    -omega2 * lambda_j / ((1.0 - omega2) * lambda_m1 - omega2 * lambda_j)
}

/// Mean-separation factor G of the surface: 1 - sum_j a_j b_j w_{i,j}.
pub fn g_bar(gp: GammaPair, sp: &SurfaceParams) -> Result<f64> {
    let (wp, wn) = gamma_weights(gp, sp)?;
    let mut g = 1.0;
    for (s, w) in sp.pos.iter().zip(&wp) {
        g -= s.a * s.b * w;
    }
    for (s, w) in sp.neg.iter().zip(&wn) {
        g -= s.a * s.b * w;
    }
    Ok(g)
}

/// Variance factor D of the surface.
pub fn d_bar(gp: GammaPair, sp: &SurfaceParams) -> Result<f64> {
    let (wp, wn) = gamma_weights(gp, sp)?;
    let mut d = 1.0;
    for s in sp.pos.iter().chain(&sp.neg) {
        d += s.lambda * s.b;
    }
    for (s, w) in sp.pos.iter().zip(&wp).chain(sp.neg.iter().zip(&wn)) {
        d -= 2.0 * (s.lambda + 1.0) * s.a * s.b * w;
        d += s.a * s.b * (s.lambda * s.a + 1.0) * w * w;
    }
    Ok(d)
}

/// Deterministic equivalent of the misclassification rate at fixed gamma:
/// pi0 Phi(-(G - eta)/(2 sqrt(alpha) sqrt(D + zeta)))
///   + pi1 Phi(-(G + eta)/(2 sqrt(alpha) sqrt(D + zeta))).
pub fn deterministic_error(gp: GammaPair, sp: &SurfaceParams) -> Result<f64> {
    let g = g_bar(gp, sp)?;
    let d = d_bar(gp, sp)?;
    let var = d + sp.zeta();
    if var <= 0.0 {
        return Err(Error::InfeasibleSurface(format!(
            "non-positive variance term D + zeta = {var}"
        )));
    }
    let denom = 2.0 * sp.alpha.sqrt() * var.sqrt();
    let eta = sp.eta();
    Ok(sp.pi0 * normal_cdf(-(g - eta) / denom) + sp.pi1() * normal_cdf(-(g + eta) / denom))
}

/// Bias-corrected intercept theta* = (J0 - J1)/2 - ((D + zeta)/G) log(pi1/pi0).
pub fn optimal_theta(gp: GammaPair, sp: &SurfaceParams) -> Result<f64> {
    let g = g_bar(gp, sp)?;
    if g <= 0.0 {
        return Err(Error::InfeasibleSurface(format!(
            "G = {g} is not positive; the separation is degenerate"
        )));
    }
    let d = d_bar(gp, sp)?;
    Ok(0.5 * (sp.j0 - sp.j1) - (d + sp.zeta()) / g * sp.threshold_c())
}

/// Deterministic error of the optimal-intercept classifier at an omega point:
/// pi0 Phi(D1 + D2) + pi1 Phi(D1 - D2) with
/// D1 = -G/(2 sqrt(alpha) sqrt(D + zeta)), D2 = sqrt(alpha) sqrt(D + zeta)/G log(pi1/pi0).
pub fn oi_deterministic_error(w: OmegaPoint, sp: &SurfaceParams) -> Result<f64> {
    let gp = omega_to_gamma(w, sp.lambda1(), sp.lambda_m1())?;
    oi_deterministic_error_gamma(gp, sp)
}

/// Gamma-form of [`oi_deterministic_error`]; shared with the optimizer so
/// both evaluate the exact same code path.
pub fn oi_deterministic_error_gamma(gp: GammaPair, sp: &SurfaceParams) -> Result<f64> {
    let g = g_bar(gp, sp)?;
    let d = d_bar(gp, sp)?;
    let var = d + sp.zeta();
    if var <= 0.0 {
        return Err(Error::InfeasibleSurface(format!(
            "non-positive variance term D + zeta = {var}"
        )));
    }
    if g <= 0.0 {
        return Err(Error::InfeasibleSurface(format!("non-positive G = {g}")));
    }
    let root = sp.alpha.sqrt() * var.sqrt();
    let d1 = -g / (2.0 * root);
    let d2 = root / g * sp.threshold_c();
    Ok(sp.pi0 * normal_cdf(d1 + d2) + sp.pi1() * normal_cdf(d1 - d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single_spike(lambda: f64, a: f64, b: f64, alpha: f64, j0: f64, j1: f64, pi0: f64) -> SurfaceParams {
        SurfaceParams {
            pos: vec![SurfaceSpike { lambda, a, b }],
            neg: vec![],
            alpha,
            j0,
            j1,
            pi0,
        }
    }

    #[test]
    fn normal_cdf_reference_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.0) - 0.841344746068543).abs() < 1e-12);
        assert!((normal_cdf(-3.0) - 1.349898031630095e-3).abs() < 1e-15);
    }

    #[test]
    fn omega_to_gamma_examples() {
        let gp = omega_to_gamma(
            OmegaPoint { omega1: 0.5, omega2: 0.5 },
            Some(20.0),
            Some(-0.5),
        )
        .unwrap();
        assert!((gp.gamma1 - 0.05).abs() < 1e-15);
        assert!((gp.gamma2 - 2.0).abs() < 1e-15);

        let zero = omega_to_gamma(OmegaPoint { omega1: 0.0, omega2: 0.0 }, Some(20.0), Some(-0.5)).unwrap();
        assert_eq!(zero.gamma1, 0.0);
        assert_eq!(zero.gamma2, 0.0);

        assert!(omega_to_gamma(OmegaPoint { omega1: 1.0, omega2: 0.0 }, Some(1.0), None).is_err());
    }

    #[test]
    fn gamma_weight_examples() {
        let sp = single_spike(20.0, 0.9, 0.5, 0.25, 1.0, 1.0, 0.5);
        let (wp, _) = gamma_weights(GammaPair { gamma1: 0.0, gamma2: 0.0 }, &sp).unwrap();
        assert_eq!(wp[0], 0.0);
        let (wp, _) = gamma_weights(GammaPair { gamma1: 0.05, gamma2: 0.0 }, &sp).unwrap();
        assert!((wp[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn g_bar_examples() {
        let sp = single_spike(20.0, 0.8, 1.0, 0.25, 1.0, 1.0, 0.5);
        let at = |g1: f64| g_bar(GammaPair { gamma1: g1, gamma2: 0.0 }, &sp).unwrap();
        assert_eq!(at(0.0), 1.0);
        // gamma_{1,1} = 0.5 at gamma1 = 0.05
        assert!((at(0.05) - 0.6).abs() < 1e-12);

        let flat = single_spike(20.0, 0.8, 0.0, 0.25, 1.0, 1.0, 0.5);
        for g1 in [0.0, 0.05, 1.0, 7.3] {
            assert_eq!(g_bar(GammaPair { gamma1: g1, gamma2: 0.0 }, &flat).unwrap(), 1.0);
        }
    }

    #[test]
    fn d_bar_examples() {
        let sp = single_spike(20.0, 0.9, 1.0, 0.25, 1.0, 1.0, 0.5);
        let d0 = d_bar(GammaPair { gamma1: 0.0, gamma2: 0.0 }, &sp).unwrap();
        assert!((d0 - 21.0).abs() < 1e-12);
        // hand evaluation at gamma_{1,1} = 0.5:
        // 1 + 20 - 2*21*0.9*0.5 + 0.9*(20*0.9+1)*0.25 = 6.375
        let d = d_bar(GammaPair { gamma1: 0.05, gamma2: 0.0 }, &sp).unwrap();
        assert!((d - 6.375).abs() < 1e-12);

        let flat = single_spike(20.0, 0.9, 0.0, 0.25, 1.0, 1.0, 0.5);
        assert_eq!(d_bar(GammaPair { gamma1: 0.3, gamma2: 0.0 }, &flat).unwrap(), 1.0);
    }

    #[test]
    fn deterministic_error_balanced_symmetry() {
        // pi0 = pi1 and J0 = J1 make eta = 0 and both CDF arguments equal.
        let sp = single_spike(20.0, 0.9, 0.4, 0.25, 1.5, 1.5, 0.5);
        let gp = GammaPair { gamma1: 0.05, gamma2: 0.0 };
        let eps = deterministic_error(gp, &sp).unwrap();
        let g = g_bar(gp, &sp).unwrap();
        let d = d_bar(gp, &sp).unwrap();
        let expect = normal_cdf(-g / (2.0 * sp.alpha.sqrt() * (d + sp.zeta()).sqrt()));
        assert!((eps - expect).abs() < 1e-15);
        assert!(eps > 0.0 && eps < 1.0);
    }

    #[test]
    fn deterministic_error_chance_level_when_g_vanishes() {
        // b = 1, a = 1, weight -> 1 at huge gamma drives G to 0 exactly when a b = 1.
        let sp = single_spike(20.0, 1.0, 1.0, 0.25, 1.5, 1.5, 0.5);
        // choose gamma with shrink weight w: G = 1 - w -> 0 as gamma -> inf
        let eps = deterministic_error(GammaPair { gamma1: 1e12, gamma2: 0.0 }, &sp).unwrap();
        assert!((eps - 0.5).abs() < 1e-9);
    }

    #[test]
    fn optimal_theta_examples() {
        let sp = single_spike(20.0, 0.9, 0.4, 0.25, 1.5, 1.5, 0.5);
        let theta = optimal_theta(GammaPair { gamma1: 0.05, gamma2: 0.0 }, &sp).unwrap();
        assert!(theta.abs() < 1e-15);

        let sp = single_spike(20.0, 0.9, 0.4, 0.25, 2.0, 1.0, 0.5);
        let theta = optimal_theta(GammaPair { gamma1: 0.05, gamma2: 0.0 }, &sp).unwrap();
        assert!((theta - 0.5).abs() < 1e-15); // (J0 - J1)/2 = J1/2 = 0.5
    }

    #[test]
    fn oi_equals_plain_in_balanced_case() {
        let sp = SurfaceParams {
            pos: vec![
                SurfaceSpike { lambda: 20.0, a: 0.9, b: 0.3 },
                SurfaceSpike { lambda: 5.0, a: 0.7, b: 0.2 },
            ],
            neg: vec![SurfaceSpike { lambda: -0.5, a: 0.6, b: 0.1 }],
            alpha: 0.25,
            j0: 1.5,
            j1: 1.5,
            pi0: 0.5,
        };
        for (w1, w2) in [(0.3, 0.2), (0.7, 0.6), (0.05, 0.9)] {
            let w = OmegaPoint { omega1: w1, omega2: w2 };
            let gp = omega_to_gamma(w, sp.lambda1(), sp.lambda_m1()).unwrap();
            let plain = deterministic_error(gp, &sp).unwrap();
            let oi = oi_deterministic_error(w, &sp).unwrap();
            assert!((plain - oi).abs() < 1e-14, "{plain} vs {oi}");
        }
    }

    #[test]
    fn omega_form_weights_match_gamma_form() {
        let sp = SurfaceParams {
            pos: vec![
                SurfaceSpike { lambda: 20.0, a: 0.9, b: 0.3 },
                SurfaceSpike { lambda: 10.0, a: 0.8, b: 0.2 },
            ],
            neg: vec![
                SurfaceSpike { lambda: -0.3, a: 0.5, b: 0.05 },
                SurfaceSpike { lambda: -0.5, a: 0.6, b: 0.1 },
            ],
            alpha: 0.25,
            j0: 1.5,
            j1: 1.0,
            pi0: 0.2,
        };
        let w = OmegaPoint { omega1: 0.37, omega2: 0.81 };
        let gp = omega_to_gamma(w, sp.lambda1(), sp.lambda_m1()).unwrap();
        let (wp, wn) = gamma_weights(gp, &sp).unwrap();
        for (k, s) in sp.pos.iter().enumerate() {
            let direct = omega_weight_pos(w.omega1, s.lambda, 20.0);
            assert!((wp[k] - direct).abs() < 1e-12);
        }
        for (k, s) in sp.neg.iter().enumerate() {
            let direct = omega_weight_neg(w.omega2, s.lambda, -0.5);
            assert!((wn[k] - direct).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn error_monotone_in_alpha_balanced(alpha1 in 0.05f64..1.0, bump in 0.01f64..1.0) {
            let alpha2 = alpha1 + bump;
            let make = |alpha: f64| single_spike(8.0, 0.85, 0.4, alpha, 1.2, 1.2, 0.5);
            let gp = GammaPair { gamma1: 0.1, gamma2: 0.0 };
            let e1 = deterministic_error(gp, &make(alpha1)).unwrap();
            let e2 = deterministic_error(gp, &make(alpha2)).unwrap();
            prop_assert!(e2 >= e1 - 1e-12);
        }

        #[test]
        fn error_stays_in_unit_interval(
            w1 in 0.01f64..0.99,
            w2 in 0.01f64..0.99,
            alpha in 0.05f64..2.0,
            pi0 in 0.05f64..0.95,
        ) {
            let sp = SurfaceParams {
                pos: vec![SurfaceSpike { lambda: 12.0, a: 0.9, b: 0.5 }],
                neg: vec![SurfaceSpike { lambda: -0.6, a: 0.7, b: 0.2 }],
                alpha, j0: 1.0, j1: 2.0, pi0,
            };
            // skip points inside the omega2 exclusion neighborhoods
            if sp.omega2_exclusions().iter().any(|e| (w2 - e).abs() < 1e-3) {
                return Ok(());
            }
            let gp = omega_to_gamma(OmegaPoint { omega1: w1, omega2: w2 }, sp.lambda1(), sp.lambda_m1()).unwrap();
            let eps = deterministic_error(gp, &sp).unwrap();
            prop_assert!(eps > 0.0 && eps < 1.0);
        }
    }
}
