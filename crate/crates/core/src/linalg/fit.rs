use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
    pub max_abs_residual: f64,
}

/// Ordinary least-squares line through (x, y).
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::invalid("linear fit needs at least two matched points"));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("linear fit: all x values coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    let mut max_abs: f64 = 0.0;
    for (a, b) in x.iter().zip(y) {
        let r = b - (intercept + slope * a);
        ss_res += r * r;
        max_abs = max_abs.max(r.abs());
    }
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        rms_residual: (ss_res / nf).sqrt(),
        max_abs_residual: max_abs,
    })
}

#[derive(Debug, Clone)]
pub struct LmOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Relative finite-difference step for the Jacobian.
    pub fd_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iter: 200,
            tol: 1e-12,
            fd_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmResult {
    pub params: Vec<f64>,
    /// Sum of squared residuals.
    pub cost: f64,
    pub iterations: usize,
}

/// Levenberg-Marquardt minimization of Σ r_i(p)². `residuals` writes into a
/// buffer of length `n_residuals`; `project` may clamp parameters back into
/// their admissible region after every step.
pub fn levenberg_marquardt<R, P>(
    residuals: R,
    project: P,
    p0: &[f64],
    n_residuals: usize,
    opts: &LmOptions,
) -> Result<LmResult>
where
    R: Fn(&[f64], &mut [f64]),
    P: Fn(&mut [f64]),
{
    let np = p0.len();
    let mut p = p0.to_vec();
    project(&mut p);
    let mut r = vec![0.0; n_residuals];
    residuals(&p, &mut r);
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    if !cost.is_finite() {
        return Err(Error::FitRejected("non-finite residual at start".into()));
    }
    let mut lambda = 1e-3;
    let mut r_try = vec![0.0; n_residuals];
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it + 1;
        let mut jac = DMatrix::<f64>::zeros(n_residuals, np);
        for k in 0..np {
            let h = opts.fd_step * p[k].abs().max(1e-3);
            let mut pk = p.clone();
            pk[k] += h;
            residuals(&pk, &mut r_try);
            for i in 0..n_residuals {
                jac[(i, k)] = (r_try[i] - r[i]) / h;
            }
        }
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * rv;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..np {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = a.lu().solve(&(-&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let mut p_new: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            project(&mut p_new);
            residuals(&p_new, &mut r_try);
            let c_new: f64 = r_try.iter().map(|v| v * v).sum();
            if c_new.is_finite() && c_new < cost {
                let rel = (cost - c_new) / cost.max(f64::MIN_POSITIVE);
                p = p_new;
                std::mem::swap(&mut r, &mut r_try);
                cost = c_new;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if rel < opts.tol {
                    return Ok(LmResult { params: p, cost, iterations });
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Ok(LmResult {
        params: p,
        cost,
        iterations,
    })
}
