//! Global-depolarising purity model and least-squares fitting.
//!
//! The model treats the accumulated local noise of a depth-D brickwork
//! circuit as a single end-of-circuit depolarising channel. With effective
//! rates `alpha1`, `alpha2` (per single-/two-qubit gate) and an optional
//! per-qubit readout rate `beta`, the purity reads
//!
//! ```text
//! Tr[rho_D^2] = (1 - 2^-n) * (exp(-2 * ((2 a1 n + a2 (n-1)) D + b n)) - 1) + 1
//! ```
//!
//! Fitting runs a damped Gauss-Newton iteration in log-parameter space so
//! every rate stays nonnegative. The default ties the two rates to the
//! calibration ratio, `alpha_i = theta * p_i`, leaving a single shape
//! parameter `theta`; the other strategies (both rates free, or single-qubit
//! noise pinned to zero) are available as alternate modes.

use crate::error::{Error, Result};

/// Effective global-depolarising rates, all in nats per gate (or per qubit
/// for `beta`), all nonnegative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
}

impl ModelParams {
    pub fn new(alpha1: f64, alpha2: f64, beta: f64) -> Self {
        Self { alpha1, alpha2, beta }
    }

    /// Rates matching local depolarising probabilities exactly:
    /// alpha_i = ln(1 / (1 - p_i)).
    pub fn from_probabilities(p1: f64, p2: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p1) || !(0.0..1.0).contains(&p2) {
            return Err(Error::InvalidArgument {
                name: "p",
                reason: format!("probabilities must lie in [0, 1), got ({p1}, {p2})"),
            });
        }
        Ok(Self {
            alpha1: -(1.0 - p1).ln(),
            alpha2: -(1.0 - p2).ln(),
            beta: 0.0,
        })
    }
}

/// Measured purity against depth for one register width.
#[derive(Clone, Debug, PartialEq)]
pub struct PurityCurve {
    pub n: usize,
    pub points: Vec<PurityPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PurityPoint {
    pub depth: usize,
    pub purity: f64,
    pub stderr: Option<f64>,
}

/// Model purity at width `n` and depth `depth`.
pub fn model_purity(n: usize, depth: usize, params: &ModelParams) -> f64 {
    let n_f = n as f64;
    let d = depth as f64;
    let exponent =
        -2.0 * ((2.0 * params.alpha1 * n_f + params.alpha2 * (n_f - 1.0)) * d + params.beta * n_f);
    (1.0 - 0.5f64.powi(n as i32)) * (exponent.exp() - 1.0) + 1.0
}

/// Global depolarising probability matching the no-error probability of the
/// local model over a depth-`depth` brickwork circuit:
/// P = 1 - (1-p1)^(2nD) * (1-p2)^((n-1)D).
pub fn global_p_from_local(n: usize, depth: usize, p1: f64, p2: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p1) || !(0.0..1.0).contains(&p2) {
        return Err(Error::InvalidArgument {
            name: "p",
            reason: format!("probabilities must lie in [0, 1), got ({p1}, {p2})"),
        });
    }
    let n_f = n as f64;
    let d = depth as f64;
    let log_keep = 2.0 * n_f * d * (1.0 - p1).ln() + (n_f - 1.0) * d * (1.0 - p2).ln();
    Ok(1.0 - log_keep.exp())
}

/// Purity of a state hit by a single global depolarising channel of
/// probability `p`: (1 - 2^-n)((1-p)^2 - 1) + 1.
pub fn purity_from_global_p(n: usize, p: f64) -> f64 {
    (1.0 - 0.5f64.powi(n as i32)) * ((1.0 - p).powi(2) - 1.0) + 1.0
}

/// Entropy density in the wide-register limit: linear growth at rate
/// 2(2 alpha1 + alpha2)/ln 2 per layer (offset by the readout term), capped
/// at the maximally-mixed density of 1.
pub fn asymptotic_entropy_density(depth: usize, params: &ModelParams) -> f64 {
    let raw = 2.0
        * ((2.0 * params.alpha1 + params.alpha2) * depth as f64 + params.beta)
        / std::f64::consts::LN_2;
    raw.min(1.0)
}

/// Depth beyond which the wide-register output is indistinguishable from
/// the maximally mixed state: ln 2 / (2 (2 alpha1 + alpha2)).
pub fn depth_threshold_dstar(params: &ModelParams) -> Result<f64> {
    let rate = 2.0 * params.alpha1 + params.alpha2;
    if rate <= 0.0 {
        return Err(Error::InvalidArgument {
            name: "params",
            reason: "depth threshold requires 2*alpha1 + alpha2 > 0".into(),
        });
    }
    Ok(std::f64::consts::LN_2 / (2.0 * rate))
}

/// Which effective rates the fit may move.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FitMode {
    /// alpha1 = theta * p1, alpha2 = theta * p2 with a single free theta.
    Ratio { p1: f64, p2: f64 },
    /// alpha1 pinned to zero, alpha2 free.
    TwoQubitOnly,
    /// Both rates free.
    Free,
}

#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    pub mode: FitMode,
    pub fit_beta: bool,
    /// Weight residuals by inverse variance where stderr is present.
    pub weighted: bool,
    pub max_iterations: usize,
}

impl FitOptions {
    pub fn ratio(p1: f64, p2: f64, fit_beta: bool) -> Self {
        Self {
            mode: FitMode::Ratio { p1, p2 },
            fit_beta,
            weighted: false,
            max_iterations: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub params: ModelParams,
    /// The shared scale factor in ratio mode.
    pub theta: Option<f64>,
    pub residual_rms: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Data points dropped because their purity was not positive.
    pub excluded_points: usize,
}

/// Ratio-constrained least-squares fit of the purity model to measured
/// curves. Points with non-positive purity are excluded, not clamped.
pub fn fit(curves: &[PurityCurve], p1: f64, p2: f64, fit_beta: bool) -> Result<FitResult> {
    fit_with_options(curves, &FitOptions::ratio(p1, p2, fit_beta))
}

pub fn fit_with_options(curves: &[PurityCurve], opts: &FitOptions) -> Result<FitResult> {
    if let FitMode::Ratio { p2, .. } = opts.mode {
        if p2 <= 0.0 {
            return Err(Error::InvalidArgument {
                name: "p2",
                reason: "ratio-constrained fit needs p2 > 0".into(),
            });
        }
    }

    let mut points = Vec::new();
    let mut excluded = 0usize;
    for curve in curves {
        for pt in &curve.points {
            if pt.purity > 0.0 {
                let weight = if opts.weighted {
                    match pt.stderr {
                        Some(s) if s > 0.0 => 1.0 / (s * s),
                        _ => 1.0,
                    }
                } else {
                    1.0
                };
                points.push((curve.n, pt.depth, pt.purity, weight));
            } else {
                excluded += 1;
            }
        }
    }
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "fit needs at least 3 usable points, got {}",
            points.len()
        )));
    }
    let first = (points[0].0, points[0].1);
    if points.iter().all(|&(n, d, _, _)| (n, d) == first) {
        return Err(Error::DegenerateData(
            "every point shares the same (width, depth) cell".into(),
        ));
    }

    let problem = Problem {
        points,
        mode: opts.mode,
        fit_beta: opts.fit_beta,
    };
    let solution = levenberg(&problem, opts.max_iterations);
    let params = problem.params(&solution.x);
    Ok(FitResult {
        params,
        theta: match opts.mode {
            FitMode::Ratio { .. } => Some(solution.x[0].exp()),
            _ => None,
        },
        residual_rms: solution.rms,
        iterations: solution.iterations,
        converged: solution.converged,
        excluded_points: excluded,
    })
}

struct Problem {
    /// (n, depth, purity, weight)
    points: Vec<(usize, usize, f64, f64)>,
    mode: FitMode,
    fit_beta: bool,
}

impl Problem {
    fn param_count(&self) -> usize {
        let base = match self.mode {
            FitMode::Ratio { .. } | FitMode::TwoQubitOnly => 1,
            FitMode::Free => 2,
        };
        base + usize::from(self.fit_beta)
    }

    fn initial(&self) -> Vec<f64> {
        // Log-space start: theta = 1 for the ratio mode, small physical
        // rates otherwise, beta = 1e-3.
        let mut x = match self.mode {
            FitMode::Ratio { .. } => vec![0.0],
            FitMode::TwoQubitOnly => vec![(0.01f64).ln()],
            FitMode::Free => vec![(0.01f64).ln(), (0.01f64).ln()],
        };
        if self.fit_beta {
            x.push((1e-3f64).ln());
        }
        x
    }

    /// Map log-space coordinates to model rates.
    fn params(&self, x: &[f64]) -> ModelParams {
        let beta = if self.fit_beta {
            x[x.len() - 1].exp()
        } else {
            0.0
        };
        match self.mode {
            FitMode::Ratio { p1, p2 } => {
                let theta = x[0].exp();
                ModelParams::new(theta * p1, theta * p2, beta)
            }
            FitMode::TwoQubitOnly => ModelParams::new(0.0, x[0].exp(), beta),
            FitMode::Free => ModelParams::new(x[0].exp(), x[1].exp(), beta),
        }
    }

    /// Weighted residuals and Jacobian with respect to the log parameters.
    fn residuals_jacobian(&self, x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let params = self.params(x);
        let k = self.param_count();
        let mut r = Vec::with_capacity(self.points.len());
        let mut jac = Vec::with_capacity(self.points.len());
        for &(n, depth, y, w) in &self.points {
            let sw = w.sqrt();
            let n_f = n as f64;
            let d = depth as f64;
            let sigma = (2.0 * params.alpha1 * n_f + params.alpha2 * (n_f - 1.0)) * d
                + params.beta * n_f;
            let scale = 1.0 - 0.5f64.powi(n as i32);
            let model = scale * ((-2.0 * sigma).exp() - 1.0) + 1.0;
            r.push(sw * (model - y));

            // d model / d sigma, then chain through sigma and the log map.
            let dm_dsigma = -2.0 * scale * (-2.0 * sigma).exp();
            let mut row = vec![0.0; k];
            match self.mode {
                FitMode::Ratio { p1, p2 } => {
                    let theta = x[0].exp();
                    let dsigma_dtheta = (2.0 * p1 * n_f + p2 * (n_f - 1.0)) * d;
                    row[0] = sw * dm_dsigma * dsigma_dtheta * theta;
                }
                FitMode::TwoQubitOnly => {
                    row[0] = sw * dm_dsigma * (n_f - 1.0) * d * params.alpha2;
                }
                FitMode::Free => {
                    row[0] = sw * dm_dsigma * 2.0 * n_f * d * params.alpha1;
                    row[1] = sw * dm_dsigma * (n_f - 1.0) * d * params.alpha2;
                }
            }
            if self.fit_beta {
                row[k - 1] = sw * dm_dsigma * n_f * params.beta;
            }
            jac.push(row);
        }
        (r, jac)
    }

    fn cost(&self, x: &[f64]) -> f64 {
        self.residuals_jacobian(x).0.iter().map(|r| r * r).sum()
    }
}

struct Solution {
    x: Vec<f64>,
    rms: f64,
    iterations: usize,
    converged: bool,
}

/// Damped Gauss-Newton (Levenberg) iteration on at most three parameters.
fn levenberg(problem: &Problem, max_iterations: usize) -> Solution {
    let k = problem.param_count();
    let mut x = problem.initial();
    let mut cost = problem.cost(&x);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..max_iterations {
        iterations += 1;
        let (r, jac) = problem.residuals_jacobian(&x);

        // Normal equations: (J^T J + lambda I) step = -J^T r.
        let mut jtj = vec![vec![0.0; k]; k];
        let mut jtr = vec![0.0; k];
        for (ri, row) in r.iter().zip(&jac) {
            for a in 0..k {
                jtr[a] += row[a] * ri;
                for b in 0..k {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        let grad_norm = jtr.iter().map(|g| g.abs()).fold(0.0, f64::max);
        if grad_norm < 1e-12 {
            converged = true;
            break;
        }

        let mut accepted = false;
        for _ in 0..30 {
            let mut lhs = jtj.clone();
            for a in 0..k {
                lhs[a][a] += lambda;
            }
            let rhs: Vec<f64> = jtr.iter().map(|g| -g).collect();
            let Some(step) = solve(lhs, rhs) else {
                lambda *= 10.0;
                continue;
            };
            let candidate: Vec<f64> =
                x.iter().zip(&step).map(|(xi, si)| xi + si).collect();
            let new_cost = problem.cost(&candidate);
            if new_cost.is_finite() && new_cost <= cost {
                // Convergence measured as the step in the natural parameters.
                let before = problem.params(&x);
                let after = problem.params(&candidate);
                let natural_step = (after.alpha1 - before.alpha1).abs()
                    + (after.alpha2 - before.alpha2).abs()
                    + (after.beta - before.beta).abs();
                x = candidate;
                cost = new_cost;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if natural_step < 1e-10 {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted || converged {
            converged = converged || !accepted && grad_norm < 1e-8;
            break;
        }
    }

    let total_weight: f64 = problem.points.iter().map(|p| p.3).sum();
    Solution {
        rms: (cost / total_weight).sqrt(),
        x,
        iterations,
        converged,
    }
}

/// Gaussian elimination with partial pivoting for systems of order <= 3.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..k {
            let f = a[row][col] / a[col][col];
            for c in col..k {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let mut acc = b[row];
        for c in row + 1..k {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P1: f64 = 0.008;
    const P2: f64 = 0.054;

    #[test]
    fn model_reference_values() {
        for n in 1..=6 {
            assert_eq!(model_purity(n, 0, &ModelParams::new(0.1, 0.2, 0.0)), 1.0);
        }
        // Deep-circuit limit approaches 2^-n.
        let p = ModelParams::new(0.0, 0.01, 0.0);
        assert!((model_purity(4, 1_000_000, &p) - 1.0 / 16.0).abs() <= 1e-9);
        // Frozen value for (n=3, D=5, alpha = (0.008, 0.054), beta = 0).
        let p = ModelParams::new(0.008, 0.054, 0.0);
        assert!((model_purity(3, 5, &p) - 0.3088690623006691).abs() <= 1e-12);
    }

    #[test]
    fn global_probability_reference_values() {
        assert_eq!(global_p_from_local(3, 7, 0.0, 0.0).unwrap(), 0.0);
        assert!((global_p_from_local(1, 1, 0.5, 0.0).unwrap() - 0.75).abs() <= 1e-12);
        assert!(global_p_from_local(2, 1, 1.0, 0.0).is_err());
    }

    #[test]
    fn model_matches_global_probability_route() {
        // The exponential-rate form and the global-probability form are the
        // same function when alpha_i = ln(1/(1-p_i)).
        let params = ModelParams::from_probabilities(P1, P2).unwrap();
        for n in 1..=8 {
            for depth in 0..=50 {
                let via_p = purity_from_global_p(
                    n,
                    global_p_from_local(n, depth, P1, P2).unwrap(),
                );
                let direct = model_purity(n, depth, &params);
                assert!(
                    (via_p - direct).abs() <= 1e-12,
                    "n={n} D={depth}: {via_p} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn model_is_strictly_decreasing_in_depth_and_rates() {
        let base = ModelParams::new(3e-3, 9e-3, 2e-3);
        for n in [2usize, 4, 7] {
            for depth in [1usize, 5, 20] {
                let here = model_purity(n, depth, &base);
                assert!(model_purity(n, depth + 1, &base) < here);
                let bump = 1e-4;
                let mut a1 = base;
                a1.alpha1 += bump;
                assert!(model_purity(n, depth, &a1) < here);
                let mut a2 = base;
                a2.alpha2 += bump;
                assert!(model_purity(n, depth, &a2) < here);
                let mut b = base;
                b.beta += bump;
                assert!(model_purity(n, depth, &b) < here);
            }
        }
    }

    #[test]
    fn asymptotic_density_branches() {
        let p = ModelParams::new(3e-4, 1e-3, 0.0);
        assert_eq!(asymptotic_entropy_density(0, &p), 0.0);
        assert!((asymptotic_entropy_density(100, &p) - 0.4616624130844683).abs() <= 1e-12);
        let dstar = depth_threshold_dstar(&p).unwrap();
        assert_eq!(asymptotic_entropy_density(dstar.ceil() as usize, &p), 1.0);
        assert_eq!(asymptotic_entropy_density(10_000, &p), 1.0);
    }

    #[test]
    fn depth_threshold_reference_values() {
        let p = ModelParams::new(3e-4, 1e-3, 0.0);
        let d = depth_threshold_dstar(&p).unwrap();
        assert!((d - 216.6084939249829).abs() <= 1e-9);
        assert_eq!(d.ceil(), 217.0);

        let exact = ModelParams::new(0.0, std::f64::consts::LN_2 / 2.0, 0.0);
        assert!((depth_threshold_dstar(&exact).unwrap() - 1.0).abs() <= 1e-12);

        let halved = ModelParams::new(1.5e-4, 5e-4, 0.0);
        assert!(
            (depth_threshold_dstar(&halved).unwrap() - 2.0 * d).abs() <= 1e-9
        );

        assert!(depth_threshold_dstar(&ModelParams::new(0.0, 0.0, 0.0)).is_err());
    }

    fn synthetic_curves(theta: f64, beta: f64) -> Vec<PurityCurve> {
        let mut curves = Vec::new();
        for n in 2..=5 {
            let params = ModelParams::new(theta * P1, theta * P2, beta);
            let points = (1..=15)
                .map(|depth| PurityPoint {
                    depth,
                    purity: model_purity(n, depth, &params),
                    stderr: None,
                })
                .collect();
            curves.push(PurityCurve { n, points });
        }
        curves
    }

    #[test]
    fn fit_recovers_exact_synthetic_theta() {
        let curves = synthetic_curves(1.0, 0.0);
        let result = fit(&curves, P1, P2, false).unwrap();
        assert!(result.converged);
        let theta = result.theta.unwrap();
        assert!((theta - 1.0).abs() <= 1e-6, "theta {theta}");
        assert!(result.residual_rms <= 1e-9);
        // The ratio constraint holds exactly by construction.
        assert!((result.params.alpha2 / result.params.alpha1 - P2 / P1).abs() <= 1e-9);
    }

    #[test]
    fn fit_recovers_off_unit_theta_and_beta() {
        let curves = synthetic_curves(1.3, 0.02);
        let result = fit(&curves, P1, P2, true).unwrap();
        assert!(result.converged);
        assert!((result.theta.unwrap() - 1.3).abs() <= 1e-5);
        assert!((result.params.beta - 0.02).abs() <= 1e-5);
    }

    #[test]
    fn free_and_pinned_modes_fit_synthetic_data() {
        let curves = synthetic_curves(1.0, 0.0);
        let free = fit_with_options(
            &curves,
            &FitOptions {
                mode: FitMode::Free,
                fit_beta: false,
                weighted: false,
                max_iterations: 400,
            },
        )
        .unwrap();
        assert!(free.residual_rms <= 1e-6, "rms {}", free.residual_rms);
        assert!(free.theta.is_none());

        let pinned = fit_with_options(
            &curves,
            &FitOptions {
                mode: FitMode::TwoQubitOnly,
                fit_beta: false,
                weighted: false,
                max_iterations: 400,
            },
        )
        .unwrap();
        assert_eq!(pinned.params.alpha1, 0.0);
        // Single-rate mode cannot be exact here but must stay close.
        assert!(pinned.residual_rms <= 0.05);
    }

    #[test]
    fn fit_excludes_nonpositive_points() {
        let mut curves = synthetic_curves(1.0, 0.0);
        curves[0].points[0].purity = -0.2;
        curves[1].points[3].purity = 0.0;
        let result = fit(&curves, P1, P2, false).unwrap();
        assert_eq!(result.excluded_points, 2);
        assert!((result.theta.unwrap() - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn fit_input_validation() {
        let curves = vec![PurityCurve {
            n: 3,
            points: vec![
                PurityPoint { depth: 1, purity: 0.9, stderr: None },
                PurityPoint { depth: 2, purity: 0.8, stderr: None },
            ],
        }];
        assert!(matches!(
            fit(&curves, P1, P2, false),
            Err(Error::InsufficientData(_))
        ));

        let degenerate = vec![PurityCurve {
            n: 3,
            points: vec![
                PurityPoint { depth: 1, purity: 0.9, stderr: None };
                4
            ],
        }];
        assert!(matches!(
            fit(&degenerate, P1, P2, false),
            Err(Error::DegenerateData(_))
        ));

        assert!(fit(&synthetic_curves(1.0, 0.0), P1, 0.0, false).is_err());
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let curves = synthetic_curves(0.9, 0.01);
        let problem = Problem {
            points: curves
                .iter()
                .flat_map(|c| {
                    c.points
                        .iter()
                        .map(move |p| (c.n, p.depth, p.purity * 1.02, 1.0))
                })
                .collect(),
            mode: FitMode::Ratio { p1: P1, p2: P2 },
            fit_beta: true,
        };
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let x = vec![next() * 2.0 - 1.0, next() * 4.0 - 6.0];
            let (r, jac) = problem.residuals_jacobian(&x);
            // Objective gradient: 2 J^T r, compared against central
            // differences of the cost.
            for a in 0..2 {
                let analytic: f64 =
                    2.0 * r.iter().zip(&jac).map(|(ri, row)| ri * row[a]).sum::<f64>();
                let h = 1e-6;
                let mut xp = x.clone();
                xp[a] += h;
                let mut xm = x.clone();
                xm[a] -= h;
                let numeric = (problem.cost(&xp) - problem.cost(&xm)) / (2.0 * h);
                let scale = analytic.abs().max(numeric.abs()).max(1e-8);
                assert!(
                    ((analytic - numeric) / scale).abs() <= 1e-6,
                    "param {a}: analytic {analytic} vs numeric {numeric} at {x:?}"
                );
            }
        }
    }
}
