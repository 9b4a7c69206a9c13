//! The cross-sectional stationary profile Φ solving
//! -(p-2) Δ_p Φ = Φ on D = (0, L) with Φ = 0 on ∂D and Φ > 0,
//!
//! computed by two independent routes: relaxation of the rescaled parabolic
//! flow, and a shooting method on the equivalent first-order system. The two
//! agreeing is the main internal consistency check for the whole
//! cross-sectional layer.

use crate::error::{Error, Result};
use crate::grid::{CrossSection, Params, ProfileField};
use crate::pde::{stable_dt_1d, StepControl};
use crate::plap;

/// Result of a stationary-profile computation.
#[derive(Debug, Clone)]
pub struct StationaryProfile {
    pub profile: ProfileField,
    /// Sup-norm residual of the stationarity equation, measured with the
    /// method's own discretization (discrete operator for the flow route,
    /// fine-grid finite differences for the shooting route).
    pub residual_sup: f64,
    pub iterations: usize,
}

/// Shooting output additionally records the free parameters.
#[derive(Debug, Clone)]
pub struct ShootingProfile {
    pub profile: StationaryProfile,
    /// Peak value Φ(L/2).
    pub amplitude: f64,
    /// Critical initial flux s* = (|Φ'|^{p-2}Φ')(0).
    pub initial_flux: f64,
    /// Boundary slope Φ'(0) = s*^{1/(p-1)}.
    pub initial_slope: f64,
}

/// Amplitude of the separable subsolution a·sin(πz/L): amplitudes below
/// [(p-2)(p-1)(π/L)^p]^{-1/(p-2)} make it a subsolution of the rescaled
/// equation.
pub fn subsolution_amplitude(params: &Params, length: f64) -> Result<f64> {
    let p = params.p;
    params.reaction()?;
    let base = (p - 2.0) * (p - 1.0) * (std::f64::consts::PI / length).powf(p);
    Ok(base.powf(-1.0 / (p - 2.0)))
}

/// Sup-norm residual of the discrete stationarity equation
/// (p-2) Δ_p Φ + Φ = 0 over the interior nodes.
///
/// The unregularized operator is used everywhere except within two cells of
/// the profile maximum, where the gradient degenerates and the regularized
/// operator (`eps_reg`) takes over.
pub fn verify_eigen_residual(profile: &ProfileField, params: &Params, eps_reg: f64) -> Result<f64> {
    params.reaction()?;
    let p = params.p;
    let bare = plap::p_laplacian_apply_1d(profile, params, 0.0)?;
    let reg = plap::p_laplacian_apply_1d(profile, params, eps_reg)?;
    let n = profile.cross_section.n_z;
    let argmax = profile
        .values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut r = 0.0_f64;
    for iz in 1..n - 1 {
        let lap = if iz.abs_diff(argmax) <= 2 {
            reg.values[iz]
        } else {
            bare.values[iz]
        };
        r = r.max(((p - 2.0) * lap + profile.values[iz]).abs());
    }
    Ok(r)
}

/// Relaxes the rescaled cross-sectional flow ∂_τ V = Δ_p V + V/(p-2) to its
/// steady state, stopping when the stationarity residual drops below
/// `residual_tol · sup V`. Any positive initial amplitude converges to the
/// same profile; the default start is 0.2 × the subsolution amplitude.
pub fn phi_via_rescaled_flow(
    cross_section: CrossSection,
    params: &Params,
    control: &StepControl,
    residual_tol: f64,
) -> Result<StationaryProfile> {
    phi_via_rescaled_flow_from(cross_section, params, control, residual_tol, None)
}

/// Same as [`phi_via_rescaled_flow`] but with a caller-chosen initial
/// amplitude for the sine start (used by the amplitude-independence checks).
pub fn phi_via_rescaled_flow_from(
    cross_section: CrossSection,
    params: &Params,
    control: &StepControl,
    residual_tol: f64,
    initial_amplitude: Option<f64>,
) -> Result<StationaryProfile> {
    let reaction = params.reaction()?;
    if !(residual_tol > 0.0) {
        return Err(Error::InvalidParam("residual_tol must be > 0".into()));
    }
    let length = cross_section.length;
    let amp = match initial_amplitude {
        Some(a) if a > 0.0 => a,
        Some(a) => return Err(Error::InvalidParam(format!("initial amplitude must be > 0, got {a}"))),
        None => 0.2 * subsolution_amplitude(params, length)?,
    };
    let mut v = ProfileField::from_fn(cross_section, |z| {
        amp * (std::f64::consts::PI * z / length).sin()
    });
    let n = cross_section.n_z;
    let mut iterations = 0usize;
    let check_interval = 500usize;
    loop {
        for _ in 0..check_interval {
            let dt = stable_dt_1d(&v, params, control)?;
            let lap = plap::p_laplacian_apply_1d(&v, params, control.eps_reg)?;
            for iz in 1..n - 1 {
                v.values[iz] = (v.values[iz] + dt * (lap.values[iz] + reaction * v.values[iz])).max(0.0);
            }
            v.time_tag += dt;
            iterations += 1;
        }
        let sup = v.sup();
        if !(sup > 0.0) {
            return Err(Error::Numerical("flow collapsed to the trivial state".into()));
        }
        let residual = verify_eigen_residual(&v, params, control.eps_reg)?;
        if residual < residual_tol * sup {
            // symmetry about the midpoint should be inherited from the data
            let mid = cross_section.mid_index();
            for iz in 0..=mid {
                let a = v.values[iz];
                let b = v.values[n - 1 - iz];
                if (a - b).abs() > 1e-9 * sup {
                    return Err(Error::Numerical(format!(
                        "flow profile asymmetric at node {iz}: {a} vs {b}"
                    )));
                }
            }
            return Ok(StationaryProfile {
                profile: v,
                residual_sup: residual,
                iterations,
            });
        }
        if iterations >= control.max_steps {
            return Err(Error::NonConverged {
                steps: iterations,
                residual,
            });
        }
    }
}

/// First-order form of the profile ODE with q = |Φ'|^{p-2}Φ':
/// Φ' = |q|^{1/(p-1)} sign q,   q' = -Φ/(p-2).
fn shooting_rhs(p: f64, phi: f64, q: f64) -> [f64; 2] {
    let dphi = q.abs().powf(1.0 / (p - 1.0)) * q.signum();
    [dphi, -phi / (p - 2.0)]
}

/// Fixed-step RK4 march of the shooting system over [0, L/2] on `n_steps`
/// uniform steps, recording (Φ, q) at every node. Stops early (returning the
/// truncated trace) when Φ or q goes nonpositive.
fn shoot(p: f64, s: f64, half_length: f64, n_steps: usize) -> Vec<[f64; 2]> {
    let h = half_length / n_steps as f64;
    let mut state = [0.0_f64, s];
    let mut trace = Vec::with_capacity(n_steps + 1);
    trace.push(state);
    for i in 0..n_steps {
        let k1 = shooting_rhs(p, state[0], state[1]);
        let k2 = shooting_rhs(p, state[0] + 0.5 * h * k1[0], state[1] + 0.5 * h * k1[1]);
        let k3 = shooting_rhs(p, state[0] + 0.5 * h * k2[0], state[1] + 0.5 * h * k2[1]);
        let k4 = shooting_rhs(p, state[0] + h * k3[0], state[1] + h * k3[1]);
        state = [
            state[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            state[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        trace.push(state);
        // the sought trajectory keeps Phi increasing and q positive strictly
        // inside (0, L/2); leaving that cone decides the bisection
        if i + 1 < n_steps && (state[0] <= 0.0 || state[1] <= 0.0) {
            break;
        }
    }
    trace
}

/// True when the shot with flux `s` overshoots: q still positive at L/2
/// (the profile would keep growing past the midpoint, so s is too large).
/// A shot whose Φ or q collapses before the midpoint undershoots.
fn overshoots(trace: &[[f64; 2]], n_steps: usize) -> bool {
    trace.len() == n_steps + 1 && trace[n_steps][1] > 0.0 && trace[n_steps][0] > 0.0
}

/// Computes Φ by bisection on the initial flux: the symmetric profile has
/// Φ(0) = 0, Φ'(L/2) = 0, and the map s ↦ (exit mode) flips exactly at s*.
/// The returned profile is sampled onto `cross_section` and mirrored about
/// the midpoint.
pub fn phi_via_shooting(
    cross_section: CrossSection,
    params: &Params,
    n_fine: usize,
    flux_tol: f64,
) -> Result<ShootingProfile> {
    let p = params.p;
    params.reaction()?;
    if n_fine < 64 {
        return Err(Error::GridTooSmall("shooting needs >= 64 fine steps".into()));
    }
    if !(flux_tol > 0.0) {
        return Err(Error::InvalidParam("flux_tol must be > 0".into()));
    }
    let half = cross_section.length / 2.0;

    // bracket s* within [1e-6, 1e6]: grow until an overshoot appears
    let mut s_lo = 0.0_f64;
    let mut s_hi = 1e-6_f64;
    let mut grow_iters = 0;
    while !overshoots(&shoot(p, s_hi, half, n_fine), n_fine) {
        s_lo = s_hi;
        s_hi *= 4.0;
        grow_iters += 1;
        if s_hi > 1e6 {
            return Err(Error::BracketNotFound("initial flux bracket in [1e-6, 1e6]".into()));
        }
    }
    let mut iterations = grow_iters;
    while s_hi - s_lo > flux_tol * s_hi {
        let s_mid = 0.5 * (s_lo + s_hi);
        if overshoots(&shoot(p, s_mid, half, n_fine), n_fine) {
            s_hi = s_mid;
        } else {
            s_lo = s_mid;
        }
        iterations += 1;
        if iterations > 400 {
            break;
        }
    }
    let s_star = 0.5 * (s_lo + s_hi);
    let trace = shoot(p, s_star, half, n_fine);
    if trace.len() != n_fine + 1 {
        return Err(Error::Numerical("critical shot terminated early".into()));
    }

    // residual on the fine grid: centered difference of q against -Φ/(p-2)
    let h = half / n_fine as f64;
    let mut residual = 0.0_f64;
    for i in 1..n_fine {
        let dq = (trace[i + 1][1] - trace[i - 1][1]) / (2.0 * h);
        residual = residual.max((dq + trace[i][0] / (p - 2.0)).abs());
    }

    // sample onto the coarse cross-section, mirroring about the midpoint
    let n = cross_section.n_z;
    let mut profile = ProfileField::zeros(cross_section);
    for iz in 1..n - 1 {
        let z = cross_section.z(iz).min(cross_section.length - cross_section.z(iz));
        let x = z / h;
        let i = (x.floor() as usize).min(n_fine - 1);
        let frac = x - i as f64;
        profile.values[iz] = trace[i][0] * (1.0 - frac) + trace[i + 1][0] * frac;
    }
    let amplitude = trace[n_fine][0];
    Ok(ShootingProfile {
        profile: StationaryProfile {
            profile,
            residual_sup: residual,
            iterations,
        },
        amplitude,
        initial_flux: s_star,
        initial_slope: s_star.powf(1.0 / (p - 1.0)),
    })
}
