//! Dormand-Prince 8(5,3) with step control, stepping exactly onto the
//! requested output abscissae instead of using dense output.

use super::dop853_tableau::{A, B, C, E3, E5};

#[derive(Clone, Copy, Debug)]
pub struct OdeConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        OdeConfig {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 200_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OdeFailure {
    pub x: f64,
    pub reason: String,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, k: &[[f64; N]; 13], coef: &[f64], upto: usize) -> [f64; N] {
    let mut out = *y;
    for (j, c) in coef.iter().enumerate().take(upto) {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[j][i];
            }
        }
    }
    out
}

/// Integrates `y' = f(x, y)` from `x0` and returns the state at each output
/// abscissa (ascending, all `>= x0`).
pub fn solve<const N: usize, F>(
    mut f: F,
    x0: f64,
    y0: [f64; N],
    outputs: &[f64],
    cfg: &OdeConfig,
) -> Result<Vec<[f64; N]>, OdeFailure>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut result = Vec::with_capacity(outputs.len());
    let mut x = x0;
    let mut y = y0;
    let mut k = [[0.0; N]; 13];
    k[0] = f(x, &y);
    let span = outputs.last().map_or(0.0, |&e| e - x0);
    let mut h = (0.01 * span).clamp(1e-6, 0.05);
    let mut steps = 0;
    for &target in outputs {
        if target < x - 1e-14 * x.abs().max(1.0) {
            return Err(OdeFailure {
                x,
                reason: format!("output abscissa {target} is behind the integrator"),
            });
        }
        while x < target {
            steps += 1;
            if steps > cfg.max_steps {
                return Err(OdeFailure {
                    x,
                    reason: "step budget exhausted".into(),
                });
            }
            let landing = target - x <= h * 1.000_000_1;
            let step = if landing { target - x } else { h };
            for s in 1..12 {
                let ys = axpy(&y, step, &k, &A[s], s);
                k[s] = f(x + C[s] * step, &ys);
            }
            let y_new = axpy(&y, step, &k, &B, 12);
            k[12] = f(x + step, &y_new);
            let mut e5 = 0.0;
            let mut e3 = 0.0;
            for i in 0..N {
                let scale = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
                let mut d5 = 0.0;
                let mut d3 = 0.0;
                for j in 0..13 {
                    d5 += E5[j] * k[j][i];
                    d3 += E3[j] * k[j][i];
                }
                e5 += (d5 / scale).powi(2);
                e3 += (d3 / scale).powi(2);
            }
            let err = if e5 == 0.0 && e3 == 0.0 {
                0.0
            } else {
                step * e5 / ((e5 + 0.01 * e3) * N as f64).sqrt()
            };
            if !err.is_finite() {
                return Err(OdeFailure {
                    x,
                    reason: "non-finite error estimate".into(),
                });
            }
            if err <= 1.0 {
                x = if landing { target } else { x + step };
                y = y_new;
                k[0] = k[12];
                let grow = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-1.0 / 8.0)).min(10.0) };
                if !landing {
                    h = step * grow;
                }
            } else {
                h = step * (0.9 * err.powf(-1.0 / 8.0)).max(0.2);
                if h < 1e-14 * x.abs().max(1.0) {
                    return Err(OdeFailure {
                        x,
                        reason: "step size underflow".into(),
                    });
                }
            }
        }
        result.push(y);
    }
    Ok(result)
}
