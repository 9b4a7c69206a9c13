//! Adaptive embedded Runge-Kutta (Cash-Karp 4/5) for the scalar ODEs of the
//! phase-plane analysis and the shooting problems.

use crate::error::{Error, Result};

/// Cash-Karp tableau.
const A2: f64 = 1.0 / 5.0;
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0];
const A5: [f64; 4] = [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0];
const A6: [f64; 5] = [
    1631.0 / 55296.0,
    175.0 / 512.0,
    575.0 / 13824.0,
    44275.0 / 110592.0,
    253.0 / 4096.0,
];
const C: [f64; 6] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0];
const B5: [f64; 6] = [
    37.0 / 378.0,
    0.0,
    250.0 / 621.0,
    125.0 / 594.0,
    0.0,
    512.0 / 1771.0,
];
const B4: [f64; 6] = [
    2825.0 / 27648.0,
    0.0,
    18575.0 / 48384.0,
    13525.0 / 55296.0,
    277.0 / 14336.0,
    1.0 / 4.0,
];

pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            initial_step: 1e-6,
            max_steps: 2_000_000,
        }
    }
}

/// Integrates dy/dx = f(x, y) from (x0, y0) to x_end, recording every
/// accepted step. Stops early (landing exactly on the triggering state is
/// not attempted) when `stop` returns true for an accepted step.
pub fn integrate_scalar<F, S>(
    f: F,
    x0: f64,
    y0: f64,
    x_end: f64,
    opts: &OdeOptions,
    mut stop: S,
) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64, f64) -> Result<f64>,
    S: FnMut(f64, f64) -> bool,
{
    let dir = (x_end - x0).signum();
    if dir == 0.0 {
        return Ok(vec![(x0, y0)]);
    }
    let mut x = x0;
    let mut y = y0;
    let mut h = opts.initial_step.abs().min((x_end - x0).abs()) * dir;
    let mut samples = vec![(x, y)];
    let mut k = [0.0_f64; 6];

    for _ in 0..opts.max_steps {
        if (x - x_end) * dir >= 0.0 {
            return Ok(samples);
        }
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }
        k[0] = f(x, y)?;
        k[1] = f(x + C[1] * h, y + h * A2 * k[0])?;
        k[2] = f(x + C[2] * h, y + h * (A3[0] * k[0] + A3[1] * k[1]))?;
        k[3] = f(x + C[3] * h, y + h * (A4[0] * k[0] + A4[1] * k[1] + A4[2] * k[2]))?;
        k[4] = f(
            x + C[4] * h,
            y + h * (A5[0] * k[0] + A5[1] * k[1] + A5[2] * k[2] + A5[3] * k[3]),
        )?;
        k[5] = f(
            x + C[5] * h,
            y + h * (A6[0] * k[0] + A6[1] * k[1] + A6[2] * k[2] + A6[3] * k[3] + A6[4] * k[4]),
        )?;
        let y5: f64 = y + h * (0..6).map(|i| B5[i] * k[i]).sum::<f64>();
        let y4: f64 = y + h * (0..6).map(|i| B4[i] * k[i]).sum::<f64>();
        let err = (y5 - y4).abs();
        let scale = opts.abs_tol + opts.rel_tol * y.abs().max(y5.abs());
        if err <= scale || h.abs() < 1e-14 * (1.0 + x.abs()) {
            x += h;
            y = y5;
            samples.push((x, y));
            if stop(x, y) {
                return Ok(samples);
            }
            let grow = if err > 0.0 {
                0.9 * (scale / err).powf(0.2)
            } else {
                5.0
            };
            h *= grow.clamp(0.2, 5.0);
        } else {
            h *= (0.9 * (scale / err).powf(0.25)).clamp(0.1, 1.0);
        }
        if !y.is_finite() {
            return Err(Error::NonFinite("ode state"));
        }
    }
    Err(Error::NonConverged {
        steps: opts.max_steps,
        residual: (x - x_end).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_matches_closed_form() {
        let samples = integrate_scalar(
            |_, y| Ok(y),
            0.0,
            1.0,
            1.0,
            &OdeOptions::default(),
            |_, _| false,
        )
        .unwrap();
        let (x, y) = *samples.last().unwrap();
        assert!((x - 1.0).abs() < 1e-12);
        assert!((y - std::f64::consts::E).abs() < 1e-8, "{y}");
    }

    #[test]
    fn stops_on_event() {
        let samples = integrate_scalar(
            |_, _| Ok(-1.0),
            0.0,
            1.0,
            10.0,
            &OdeOptions::default(),
            |_, y| y <= 0.5,
        )
        .unwrap();
        let (_, y) = *samples.last().unwrap();
        assert!(y <= 0.5);
    }

    #[test]
    fn integrates_backwards() {
        let samples = integrate_scalar(
            |x, _| Ok(2.0 * x),
            1.0,
            1.0,
            0.0,
            &OdeOptions::default(),
            |_, _| false,
        )
        .unwrap();
        let (x, y) = *samples.last().unwrap();
        assert!(x.abs() < 1e-12);
        assert!(y.abs() < 1e-8, "{y}"); // y = x^2
    }
}
