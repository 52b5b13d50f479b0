use std::collections::VecDeque;
use std::time::Instant;

use super::{default_tol, dot, NonlinearSystem, SolveReport, SolverError, SolverKind, Termination};

/// Spectral residual method parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaneParams {
    pub alpha0: f64,
    /// Nonmonotone memory.
    pub memory: usize,
    pub gamma: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub eps: f64,
    pub delta: f64,
    /// Stopping tolerance on `||F||_2`; `None` means `1e-8 sqrt(r)`.
    pub tol: Option<f64>,
    pub max_iters: usize,
    pub lambda_min: f64,
}

impl Default for SaneParams {
    fn default() -> Self {
        Self {
            alpha0: 1.0,
            memory: 10,
            gamma: 1e-4,
            sigma1: 0.1,
            sigma2: 0.5,
            eps: 1e-10,
            delta: 1.0,
            tol: None,
            max_iters: 5000,
            lambda_min: 1e-14,
        }
    }
}

impl SaneParams {
    // Negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: &str| Err(SolverError::InvalidParams(msg.to_string()));
        if !(self.gamma > 0.0) {
            return bad("gamma must be positive");
        }
        if !(0.0 < self.sigma1 && self.sigma1 < self.sigma2 && self.sigma2 < 1.0) {
            return bad("need 0 < sigma1 < sigma2 < 1");
        }
        if !(0.0 < self.eps && self.eps < 1.0) {
            return bad("need 0 < eps < 1");
        }
        if !(self.delta >= self.eps && self.delta <= 1.0 / self.eps) {
            return bad("delta must lie in [eps, 1/eps]");
        }
        if !self.alpha0.is_finite() {
            return bad("alpha0 must be finite");
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0) {
                return bad("tol must be non-negative");
            }
        }
        if !(self.lambda_min > 0.0) {
            return bad("lambda_min must be positive");
        }
        Ok(())
    }
}

/// Line-search log of one accepted iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTrace {
    /// `f(v_k) = F_k^t F_k`.
    pub f_current: f64,
    /// Nonmonotone reference: max of the last `min(k, M) + 1` values of `f`.
    pub f_reference: f64,
    pub lambda: f64,
    /// `f(v_k + lambda d_k)`.
    pub f_accepted: f64,
    /// `F_k^t J_k d_k`.
    pub directional: f64,
    /// `F_k^t J_k F_k`.
    pub curvature: f64,
    pub sgn: f64,
    /// Spectral coefficient after the safeguard.
    pub alpha: f64,
    pub backtracks: usize,
}

impl StepTrace {
    /// The nonmonotone acceptance inequality, evaluated exactly as the solver does.
    pub fn descent_holds(&self, gamma: f64) -> bool {
        accepts(self.f_accepted, self.f_reference, gamma, self.lambda, self.directional)
    }
}

fn accepts(f_trial: f64, f_ref: f64, gamma: f64, lambda: f64, directional: f64) -> bool {
    f_trial <= f_ref + 2.0 * gamma * lambda * directional
}

/// Next step length from the quadratic interpolating `f(0) = f0`,
/// `f'(0) = g0` and `f(lambda) = f_lambda`, with the reduction factor clamped
/// to `[sigma1, sigma2]`.
pub fn backtrack(lambda: f64, f0: f64, g0: f64, f_lambda: f64, sigma1: f64, sigma2: f64) -> f64 {
    let curv = f_lambda - f0 - g0 * lambda;
    let sigma = if curv > 0.0 && f_lambda.is_finite() {
        -g0 * lambda / (2.0 * curv)
    } else if f_lambda.is_finite() {
        sigma2
    } else {
        sigma1
    };
    sigma.clamp(sigma1, sigma2) * lambda
}

/// Solves `F(v) = 0` with the spectral residual method.
///
/// Each iteration takes `d = -sgn(F^t J F) F`, starts the line search at
/// `1 / alpha` and accepts under the nonmonotone condition; the next spectral
/// coefficient comes from the residual change. A line search that shrinks
/// below `lambda_min` ends the run with [`Termination::LineSearchFail`].
pub fn sane_solve<S: NonlinearSystem + ?Sized>(
    sys: &S,
    v0: &[f64],
    params: &SaneParams,
) -> Result<(Vec<f64>, SolveReport), SolverError> {
    params.validate()?;
    let start = Instant::now();
    let r = sys.dim();
    if v0.len() != r {
        return Err(SolverError::InconsistentLength {
            expected: r,
            got: v0.len(),
        });
    }
    let tol = params.tol.unwrap_or_else(|| default_tol(r));

    let mut v = v0.to_vec();
    let mut fv = sys.residual(&v)?;
    let mut evals = 1;
    let mut f = dot(&fv, &fv);
    if !f.is_finite() {
        return Err(SolverError::NonFinite(0));
    }
    let mut memory: VecDeque<f64> = VecDeque::from([f]);
    let mut alpha = params.alpha0;
    let mut history = vec![f.sqrt()];
    let mut backtrack_counts = Vec::new();
    let mut trace = Vec::new();

    let termination = loop {
        let k = trace.len();
        if f.sqrt() <= tol {
            break Termination::ResidualZero;
        }
        if k >= params.max_iters {
            break Termination::MaxIters;
        }
        let jf = sys.jacobian_vec(&v, &fv, &fv)?;
        evals += 1;
        let curvature = dot(&fv, &jf);
        if !curvature.is_finite() {
            return Err(SolverError::NonFinite(k));
        }
        if curvature.abs() / f < params.eps {
            break Termination::SmallCurvature;
        }
        if alpha <= params.eps || alpha >= 1.0 / params.eps || !alpha.is_finite() {
            alpha = params.delta;
        }
        let sgn = curvature.signum();
        let d: Vec<f64> = fv.iter().map(|x| -sgn * x).collect();
        let directional = -sgn * curvature;
        let f_ref = memory.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let mut lambda = 1.0 / alpha;
        let mut backtracks = 0;
        let accepted = loop {
            let trial: Vec<f64> = v.iter().zip(&d).map(|(a, b)| a + lambda * b).collect();
            let ft_vec = sys.residual(&trial)?;
            evals += 1;
            let ft = dot(&ft_vec, &ft_vec);
            if ft.is_finite() && accepts(ft, f_ref, params.gamma, lambda, directional) {
                break Some((trial, ft_vec, ft));
            }
            let next = backtrack(lambda, f, 2.0 * directional, ft, params.sigma1, params.sigma2);
            if next < params.lambda_min {
                break None;
            }
            lambda = next;
            backtracks += 1;
        };
        let Some((v_next, f_next_vec, f_next)) = accepted else {
            backtrack_counts.push(backtracks);
            break Termination::LineSearchFail;
        };

        trace.push(StepTrace {
            f_current: f,
            f_reference: f_ref,
            lambda,
            f_accepted: f_next,
            directional,
            curvature,
            sgn,
            alpha,
            backtracks,
        });
        backtrack_counts.push(backtracks);

        let w: Vec<f64> = f_next_vec.iter().zip(&fv).map(|(a, b)| a - b).collect();
        alpha = sgn * dot(&d, &w) / (lambda * dot(&d, &d));
        v = v_next;
        fv = f_next_vec;
        f = f_next;
        history.push(f.sqrt());
        memory.push_back(f);
        while memory.len() > params.memory + 1 {
            memory.pop_front();
        }
    };

    let report = SolveReport {
        solver: SolverKind::Sane,
        termination,
        iters: trace.len(),
        residual_history: history,
        backtrack_counts,
        inner_iterations: Vec::new(),
        inner_cycles: Vec::new(),
        trace,
        residual_evaluations: evals,
        tol,
        wall_time: start.elapsed(),
    };
    Ok((v, report))
}
