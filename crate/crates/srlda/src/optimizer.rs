//! Grid search over the omega square for the deterministic surfaces, and
//! cross-validated selection of the ridge-LDA regularizer.

use ndarray::{Array2, ArrayView2, Axis};
use ndarray_linalg::Solve;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::pooled_covariance;
use crate::surface::{
    deterministic_error, oi_deterministic_error_gamma, omega_to_gamma, GammaPair, OmegaPoint,
    SurfaceParams,
};
use crate::{Error, Result};

/// Which deterministic surface the grid search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Fixed-intercept surface.
    Plain,
    /// Optimal-intercept surface.
    OptimalIntercept,
}

/// Grid-search configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Step size h in (0, 0.2].
    pub step: f64,
    /// Exclusion radius around omega2 pole images.
    pub delta: f64,
    pub objective: Objective,
    /// Optional single-step local refinement at 10x resolution.
    pub refine: bool,
}

impl GridSpec {
    pub fn new(step: f64, objective: Objective) -> Self {
        Self { step, delta: 1e-3, objective, refine: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step <= 0.2) {
            return Err(Error::Config(format!("grid step {} outside (0, 0.2]", self.step)));
        }
        if self.delta <= 0.0 {
            return Err(Error::Config("grid delta must be positive".into()));
        }
        Ok(())
    }
}

/// Winner of a grid search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaOptimum {
    pub omega: OmegaPoint,
    pub gamma: GammaPair,
    pub value: f64,
}

/// Multiples of `step` strictly inside (0, 1), kept at least step/2 away
/// from the right boundary. Halving the step yields a superset, so
/// refinement can never lose the coarse winner.
fn axis_points(step: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    let mut k = 1usize;
    loop {
        let w = k as f64 * step;
        if w > 1.0 - step / 2.0 {
            break;
        }
        pts.push(w);
        k += 1;
    }
    pts
}

fn evaluate(sp: &SurfaceParams, objective: Objective, w: OmegaPoint) -> Option<(f64, GammaPair)> {
    let gp = omega_to_gamma(w, sp.lambda1(), sp.lambda_m1()).ok()?;
    let value = match objective {
        Objective::Plain => deterministic_error(gp, sp).ok()?,
        Objective::OptimalIntercept => match oi_deterministic_error_gamma(gp, sp) {
            Ok(v) => v,
            // A non-positive G makes the optimal-intercept point infeasible;
            // score it at chance level instead of extrapolating.
            Err(Error::InfeasibleSurface(_)) => 0.5,
            Err(_) => return None,
        },
    };
    value.is_finite().then_some((value, gp))
}

fn search(
    sp: &SurfaceParams,
    objective: Objective,
    w1s: &[f64],
    w2s: &[f64],
) -> Option<OmegaOptimum> {
    // Reduction key (value, w1, w2): min is associative and commutative, so
    // the parallel fold is deterministic regardless of work splitting.
    let best = w1s
        .par_iter()
        .map(|&w1| {
            let mut row_best: Option<OmegaOptimum> = None;
            for &w2 in w2s {
                let w = OmegaPoint { omega1: w1, omega2: w2 };
                if let Some((value, gamma)) = evaluate(sp, objective, w) {
                    let cand = OmegaOptimum { omega: w, gamma, value };
                    if smaller(&cand, &row_best) {
                        row_best = Some(cand);
                    }
                }
            }
            row_best
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (Some(x), Some(y)) => Some(if smaller(&x, &Some(y)) { x } else { y }),
                (x, None) => x,
                (None, y) => y,
            },
        );
    best
}

fn smaller(cand: &OmegaOptimum, best: &Option<OmegaOptimum>) -> bool {
    match best {
        None => true,
        Some(b) => {
            let ck = (cand.value, cand.omega.omega1, cand.omega.omega2);
            let bk = (b.value, b.omega.omega1, b.omega.omega2);
            ck < bk
        }
    }
}

/// Minimizes the configured surface over the admissible omega grid and maps
/// the winner back to gamma. Ties break to the smallest omega1, then omega2.
pub fn optimize_omega(sp: &SurfaceParams, grid: &GridSpec) -> Result<OmegaOptimum> {
    grid.validate()?;
    sp.validate()?;

    let has_pos = !sp.pos.is_empty();
    let has_neg = !sp.neg.is_empty();
    let exclusions = sp.omega2_exclusions();
    let admissible2 = |w: f64| exclusions.iter().all(|e| (w - e).abs() >= grid.delta);

    let w1s: Vec<f64> = if has_pos { axis_points(grid.step) } else { vec![0.0] };
    let w2s: Vec<f64> = if has_neg {
        axis_points(grid.step).into_iter().filter(|&w| admissible2(w)).collect()
    } else {
        vec![0.0]
    };
    if w1s.is_empty() || w2s.is_empty() {
        return Err(Error::EmptyGrid);
    }

    let mut best = search(sp, grid.objective, &w1s, &w2s).ok_or(Error::EmptyGrid)?;

    if grid.refine {
        let fine = grid.step / 10.0;
        let window = |center: f64, active: bool| -> Vec<f64> {
            if !active {
                return vec![0.0];
            }
            axis_points(fine)
                .into_iter()
                .filter(|w| (w - center).abs() <= grid.step + 1e-12)
                .collect()
        };
        let f1 = window(best.omega.omega1, has_pos);
        let f2: Vec<f64> = window(best.omega.omega2, has_neg)
            .into_iter()
            .filter(|&w| !has_neg || admissible2(w))
            .collect();
        if let Some(refined) = search(sp, grid.objective, &f1, &f2) {
            if refined.value < best.value {
                best = refined;
            }
        }
    }
    Ok(best)
}

/// The 21-point logarithmic candidate grid 10^{i/10}, i = -10..=10.
pub fn rlda_gamma_grid() -> Vec<f64> {
    (-10..=10).map(|i| 10f64.powf(i as f64 / 10.0)).collect()
}

/// Number of stratified 5-fold cross-validation rounds averaged when
/// selecting the ridge regularizer.
pub const RLDA_CV_REPEATS: usize = 3;

/// Selects the ridge-LDA regularizer from the logarithmic grid by repeated
/// stratified 5-fold cross-validation on the training set, minimizing the
/// plain misclassification count. Ties break to the smallest gamma.
/// Returns (gamma, cv_error).
pub fn optimize_rlda_gamma(
    class0: ArrayView2<f64>,
    class1: ArrayView2<f64>,
    pi0: f64,
    rng: &mut impl Rng,
) -> Result<(f64, f64)> {
    let (n0, n1) = (class0.nrows(), class1.nrows());
    if n0 == 0 || n1 == 0 {
        return Err(Error::InsufficientSamples { n: n0.min(n1), min: 1 });
    }
    let p = class0.ncols();
    let c = ((1.0 - pi0) / pi0).ln();
    let grid = rlda_gamma_grid();
    let mut miss = vec![0usize; grid.len()];
    let mut total = vec![0usize; grid.len()];

    for _ in 0..RLDA_CV_REPEATS {
        let mut idx0: Vec<usize> = (0..n0).collect();
        let mut idx1: Vec<usize> = (0..n1).collect();
        idx0.shuffle(rng);
        idx1.shuffle(rng);
        for fold in 0..5 {
            let held0: Vec<usize> = idx0.iter().copied().skip(fold).step_by(5).collect();
            let held1: Vec<usize> = idx1.iter().copied().skip(fold).step_by(5).collect();
            if held0.len() == n0 || held1.len() == n1 || (held0.is_empty() && held1.is_empty()) {
                continue;
            }
            let train0: Vec<usize> = idx0.iter().copied().filter(|i| !held0.contains(i)).collect();
            let train1: Vec<usize> = idx1.iter().copied().filter(|i| !held1.contains(i)).collect();
            let tr0 = class0.select(Axis(0), &train0);
            let tr1 = class1.select(Axis(0), &train1);
            let cov = pooled_covariance(tr0.view(), tr1.view())?;
            let mu = cov.mean_diff();
            let mid = (&cov.mean0 + &cov.mean1) * 0.5;
            for (gi, &gamma) in grid.iter().enumerate() {
                let mut reg = cov.matrix.clone();
                for d in 0..p {
                    reg[[d, d]] += gamma;
                }
                let dir = reg
                    .solve(&mu)
                    .map_err(|e| Error::EigenFailure(format!("ridge solve failed: {e}")))?;
                for &i in &held0 {
                    let w = (&class0.row(i) - &mid).dot(&dir) - c;
                    if w <= 0.0 {
                        miss[gi] += 1;
                    }
                    total[gi] += 1;
                }
                for &i in &held1 {
                    let w = (&class1.row(i) - &mid).dot(&dir) - c;
                    if w > 0.0 {
                        miss[gi] += 1;
                    }
                    total[gi] += 1;
                }
            }
        }
    }

    let mut best: Option<(f64, f64)> = None;
    for (gi, &gamma) in grid.iter().enumerate() {
        if total[gi] == 0 {
            continue;
        }
        let err = miss[gi] as f64 / total[gi] as f64;
        if best.map_or(true, |(be, _)| err < be) {
            best = Some((err, gamma));
        }
    }
    best.map(|(err, gamma)| (gamma, err))
        .ok_or_else(|| Error::InsufficientSamples { n: n0 + n1, min: 5 })
}
