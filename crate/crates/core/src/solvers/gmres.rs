use std::time::Instant;

use super::{default_tol, dot, norm2, NonlinearSystem, SolveReport, SolverError, SolverKind, Termination};

/// Newton-GMRES parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresParams {
    /// Krylov dimension before restart; `None` means `min(r, 50)`.
    pub restart: Option<usize>,
    /// Relative inner tolerance (forcing term).
    pub forcing: f64,
    /// Restart cycles allowed per linear solve.
    pub max_cycles: usize,
    pub max_newton: usize,
    /// Stopping tolerance on `||F||_2`; `None` means `1e-8 sqrt(r)`.
    pub tol: Option<f64>,
    /// Sufficient-decrease constant of the backtracking on `||F||`.
    pub armijo: f64,
    pub lambda_min: f64,
}

impl Default for GmresParams {
    fn default() -> Self {
        Self {
            restart: None,
            forcing: 1e-4,
            max_cycles: 20,
            max_newton: 200,
            tol: None,
            armijo: 1e-4,
            lambda_min: 1e-14,
        }
    }
}

impl GmresParams {
    // Negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: &str| Err(SolverError::InvalidParams(msg.to_string()));
        if self.restart == Some(0) {
            return bad("restart must be at least 1");
        }
        if !(0.0..1.0).contains(&self.forcing) {
            return bad("forcing term must lie in [0, 1)");
        }
        if self.max_cycles == 0 {
            return bad("max_cycles must be at least 1");
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return bad("armijo must lie in (0, 1)");
        }
        if !(self.lambda_min > 0.0) {
            return bad("lambda_min must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub cycles: usize,
    /// Final `||b - A x||`, as estimated by the least-squares recurrence.
    pub residual_norm: f64,
    pub converged: bool,
}

/// Restarted GMRES for `A x = b` from `x = 0`, with modified Gram-Schmidt
/// Arnoldi and Givens rotations. Stops once `||b - A x|| <= rtol ||b||`.
pub fn gmres(
    mut apply: impl FnMut(&[f64]) -> Result<Vec<f64>, SolverError>,
    b: &[f64],
    rtol: f64,
    restart: usize,
    max_cycles: usize,
) -> Result<GmresOutcome, SolverError> {
    let r = b.len();
    let bnorm = norm2(b);
    let mut x = vec![0.0; r];
    let mut out = GmresOutcome {
        x: Vec::new(),
        iterations: 0,
        cycles: 0,
        residual_norm: bnorm,
        converged: bnorm == 0.0,
    };
    if bnorm == 0.0 {
        out.x = x;
        return Ok(out);
    }
    let target = rtol * bnorm;
    // Below this the Krylov space is exhausted in floating point.
    let floor = 1e-14 * bnorm;
    let restart = restart.max(1);

    for _ in 0..max_cycles {
        out.cycles += 1;
        let res: Vec<f64> = if out.iterations == 0 {
            b.to_vec()
        } else {
            let ax = apply(&x)?;
            b.iter().zip(&ax).map(|(p, q)| p - q).collect()
        };
        let beta = norm2(&res);
        if beta <= target.max(floor) {
            out.residual_norm = beta;
            out.converged = true;
            break;
        }
        let mut basis: Vec<Vec<f64>> = vec![res.iter().map(|v| v / beta).collect()];
        let mut h: Vec<Vec<f64>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<f64> = Vec::new();
        let mut g = vec![beta];
        let mut done = false;

        for j in 0..restart {
            out.iterations += 1;
            let mut w = apply(&basis[j])?;
            let mut col = vec![0.0; j + 2];
            for (i, q) in basis.iter().enumerate() {
                col[i] = dot(&w, q);
                for (wk, qk) in w.iter_mut().zip(q) {
                    *wk -= col[i] * qk;
                }
            }
            col[j + 1] = norm2(&w);
            if !col.iter().all(|c| c.is_finite()) {
                return Err(SolverError::GmresBreakdown(out.iterations));
            }
            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let rho = col[j].hypot(col[j + 1]);
            let happy = col[j + 1] <= 1e-14 * rho.max(f64::MIN_POSITIVE);
            if rho == 0.0 {
                return Err(SolverError::GmresBreakdown(out.iterations));
            }
            let (c, s) = (col[j] / rho, col[j + 1] / rho);
            if !happy {
                basis.push(w.iter().map(|v| v / col[j + 1]).collect());
            }
            col[j] = rho;
            col[j + 1] = 0.0;
            cs.push(c);
            sn.push(s);
            g.push(-s * g[j]);
            g[j] *= c;
            h.push(col);
            let est = g[j + 1].abs();
            if est <= target.max(floor) || happy {
                done = true;
                break;
            }
        }

        // Back substitution for the least-squares coefficients.
        let k = h.len();
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for (l, yl) in y.iter().enumerate().skip(i + 1) {
                s -= h[l][i] * yl;
            }
            y[i] = s / h[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            for (xk, qk) in x.iter_mut().zip(&basis[i]) {
                *xk += yi * qk;
            }
        }
        out.residual_norm = g[k].abs();
        if done {
            out.converged = true;
            break;
        }
    }
    out.x = x;
    Ok(out)
}

/// Inexact Newton method with matrix-free GMRES inner solves and
/// backtracking on `||F||`.
pub fn newton_gmres_solve<S: NonlinearSystem + ?Sized>(
    sys: &S,
    v0: &[f64],
    params: &GmresParams,
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
    let restart = params.restart.unwrap_or(r.min(50)).max(1);

    let mut v = v0.to_vec();
    let mut fv = sys.residual(&v)?;
    let mut evals = 1;
    let mut fnorm = norm2(&fv);
    if !fnorm.is_finite() {
        return Err(SolverError::NonFinite(0));
    }
    let mut report = SolveReport {
        solver: SolverKind::NewtonGmres,
        termination: Termination::MaxIters,
        iters: 0,
        residual_history: vec![fnorm],
        backtrack_counts: Vec::new(),
        inner_iterations: Vec::new(),
        inner_cycles: Vec::new(),
        trace: Vec::new(),
        residual_evaluations: 0,
        tol,
        wall_time: Default::default(),
    };

    report.termination = loop {
        if fnorm <= tol {
            break Termination::ResidualZero;
        }
        if report.iters >= params.max_newton {
            break Termination::MaxIters;
        }
        let rhs: Vec<f64> = fv.iter().map(|x| -x).collect();
        let mut inner_evals = 0;
        let lin = gmres(
            |w| {
                inner_evals += 1;
                sys.jacobian_vec(&v, &fv, w)
            },
            &rhs,
            params.forcing,
            restart,
            params.max_cycles,
        )?;
        evals += inner_evals;
        report.inner_iterations.push(lin.iterations);
        report.inner_cycles.push(lin.cycles);

        let mut lambda = 1.0;
        let mut backtracks = 0;
        let accepted = loop {
            let trial: Vec<f64> = v.iter().zip(&lin.x).map(|(a, s)| a + lambda * s).collect();
            let ft = sys.residual(&trial)?;
            evals += 1;
            let nt = norm2(&ft);
            if nt.is_finite() && nt <= (1.0 - params.armijo * lambda) * fnorm {
                break Some((trial, ft, nt));
            }
            lambda *= 0.5;
            backtracks += 1;
            if lambda < params.lambda_min {
                break None;
            }
        };
        report.backtrack_counts.push(backtracks);
        let Some((vn, fn_, nn)) = accepted else {
            break Termination::LineSearchFail;
        };
        v = vn;
        fv = fn_;
        fnorm = nn;
        report.iters += 1;
        report.residual_history.push(fnorm);
    };
    report.residual_evaluations = evals;
    report.wall_time = start.elapsed();
    Ok((v, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::FnSystem;

    fn spd4() -> [[f64; 4]; 4] {
        [
            [4.0, 1.0, 0.0, 0.5],
            [1.0, 3.0, 0.2, 0.0],
            [0.0, 0.2, 2.0, 0.3],
            [0.5, 0.0, 0.3, 5.0],
        ]
    }

    fn mul(a: &[[f64; 4]; 4], x: &[f64]) -> Vec<f64> {
        a.iter().map(|row| dot(row, x)).collect()
    }

    #[test]
    fn gmres_solves_spd_in_four_steps() {
        let a = spd4();
        let b = [1.0, 2.0, 3.0, 4.0];
        let out = gmres(|x| Ok(mul(&a, x)), &b, 1e-13, 10, 1).unwrap();
        assert!(out.converged);
        assert!(out.iterations <= 4);
        let res: Vec<f64> = mul(&a, &out.x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm2(&res) < 1e-12);
    }

    #[test]
    fn restarted_gmres_still_converges() {
        let a = spd4();
        let b = [1.0, -1.0, 0.5, 2.0];
        let out = gmres(|x| Ok(mul(&a, x)), &b, 1e-10, 2, 50).unwrap();
        assert!(out.converged);
        assert!(out.cycles > 1);
    }

    /// `A v - b` with an exact Jacobian product.
    struct Linear {
        a: [[f64; 4]; 4],
        b: [f64; 4],
    }

    impl NonlinearSystem for Linear {
        fn dim(&self) -> usize {
            4
        }

        fn residual(&self, v: &[f64]) -> Result<Vec<f64>, SolverError> {
            Ok(mul(&self.a, v).iter().zip(&self.b).map(|(p, q)| p - q).collect())
        }

        fn jacobian_vec(&self, _: &[f64], _: &[f64], w: &[f64]) -> Result<Vec<f64>, SolverError> {
            Ok(mul(&self.a, w))
        }
    }

    #[test]
    fn linear_system_takes_one_newton_step() {
        let sys = Linear {
            a: spd4(),
            b: [1.0, 2.0, 3.0, 4.0],
        };
        let params = GmresParams {
            forcing: 0.0,
            tol: Some(1e-9),
            ..GmresParams::default()
        };
        let (_, rep) = newton_gmres_solve(&sys, &[0.0; 4], &params).unwrap();
        assert!(rep.converged());
        assert_eq!(rep.iters, 1);
        assert!(rep.inner_iterations[0] <= 4);
        assert_eq!(rep.iterations_label(), "1N / 1 GMRES");
    }

    #[test]
    fn small_nonlinear_root() {
        let sys = FnSystem::new(2, |v: &[f64]| vec![v[0] * v[0] - 1.0, v[1] - 1.0]);
        let params = GmresParams {
            tol: Some(1e-12),
            ..GmresParams::default()
        };
        let (v, rep) = newton_gmres_solve(&sys, &[2.0, 2.0], &params).unwrap();
        assert!(rep.converged());
        assert!((v[0] - 1.0).abs() < 1e-10 && (v[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_restart_is_rejected() {
        let sys = FnSystem::new(1, |v: &[f64]| v.to_vec());
        let params = GmresParams {
            restart: Some(0),
            ..GmresParams::default()
        };
        assert!(matches!(
            newton_gmres_solve(&sys, &[1.0], &params),
            Err(SolverError::InvalidParams(_))
        ));
    }
}
