//! Phase-plane analysis of the z-independent (Neumann) wave profiles.
//!
//! With X = φ and Z = -X^{-1/(p-1)} X', the profile ODE becomes the scalar
//! trajectory field dZ/dX = H(X, Z; c). The fast orbit leaves the saddle
//! R_c(0, c^{1/(p-1)}), crosses Z = 0 at the maximum height M_c, and its
//! quadrature in ξ ends at a free boundary obeying the Darcy law.

use crate::error::{Error, Result};
use crate::grid::Params;
use crate::ode::{integrate_scalar, OdeOptions};

/// |Z| below which integration switches from dZ/dX to the dX/dZ
/// parameterization (H is singular at Z = 0).
const Z_SWITCH: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct FastOrbitSummary {
    pub c: f64,
    pub p: f64,
    /// Maximum profile height: X at the Z = 0 crossing.
    pub m_c: f64,
    /// Isocline vertex (X_c, Z_c).
    pub vertex: (f64, f64),
    /// (X, Z) samples ordered from the saddle launch to the Z = 0 crossing.
    pub samples: Vec<(f64, f64)>,
    /// Free-boundary coordinate; NaN until [`reconstruct_profile`] runs.
    pub xi0: f64,
    /// (ξ, φ) samples, ξ = 0 at the maximum; empty until reconstruction.
    pub profile: Vec<(f64, f64)>,
    /// Fitted slope of φ^{(p-2)/(p-1)} against (ξ0 - ξ) near the free
    /// boundary; NaN until reconstruction.
    pub darcy_slope: f64,
}

/// Right-hand side H(X, Z; c) of the trajectory equation
/// dZ/dX = [(p-2)(cZ - |Z|^p) - X^{(p-2)/(p-1)}] / [(p-1)(p-2) X |Z|^{p-2} Z].
pub fn trajectory_rhs(x: f64, z: f64, c: f64, params: &Params) -> Result<f64> {
    let p = params.p;
    params.reaction()?;
    if !(x > 0.0) || z == 0.0 {
        return Err(Error::Singular(format!(
            "trajectory field singular at (X, Z) = ({x}, {z})"
        )));
    }
    let num = (p - 2.0) * (c * z - z.abs().powf(p)) - x.powf((p - 2.0) / (p - 1.0));
    let den = (p - 1.0) * (p - 2.0) * x * z.abs().powf(p - 2.0) * z;
    Ok(num / den)
}

/// Vertex (X_c, Z_c) of the horizontal-parabola isocline:
/// X_c = [(p-1)(p-2)]^{(p-1)/(p-2)} (c/p)^{p/(p-2)},
/// Z_c = (p-1)(c/p)^{p/(p-1)}.
pub fn isocline_vertex(c: f64, params: &Params) -> Result<(f64, f64)> {
    let p = params.p;
    params.reaction()?;
    if !(c > 0.0) {
        return Err(Error::InvalidParam(format!("c must be > 0, got {c}")));
    }
    let x_c = ((p - 1.0) * (p - 2.0)).powf((p - 1.0) / (p - 2.0)) * (c / p).powf(p / (p - 2.0));
    let z_c = (p - 1.0) * (c / p).powf(p / (p - 1.0));
    Ok((x_c, z_c))
}

/// Z-coordinate at which the null isocline attains its maximal X = X_c:
/// the maximizer of cZ - Z^p, namely (c/p)^{1/(p-1)}. The published vertex
/// pair reports (p-1)(c/p)^{p/(p-1)} in the Z slot, which is the *value*
/// cZ - Z^p at this maximizer rather than its location; the numerator of the
/// trajectory field vanishes at (X_c, apex), not at (X_c, Z_c).
pub fn isocline_apex_z(c: f64, params: &Params) -> f64 {
    (c / params.p).powf(1.0 / (params.p - 1.0))
}

/// Saddle height c^{1/(p-1)} of R_c.
pub fn saddle_height(c: f64, params: &Params) -> f64 {
    c.powf(1.0 / (params.p - 1.0))
}

/// Local expansion of the fast orbit near the saddle:
/// Z(X) ≈ c^{1/(p-1)} - X^{(p-2)/(p-1)} / ((2p-3)(p-2)c).
/// The coefficient is fixed by matching dZ/dX with H to leading order; its
/// validity is checked against `trajectory_rhs` in the test suite and by the
/// launch-offset self-consistency check inside [`fast_orbit`].
pub fn saddle_expansion(x: f64, c: f64, params: &Params) -> f64 {
    let p = params.p;
    saddle_height(c, params) - x.powf((p - 2.0) / (p - 1.0)) / ((2.0 * p - 3.0) * (p - 2.0) * c)
}

fn orbit_from_launch(c: f64, params: &Params, delta: f64, tol: f64) -> Result<Vec<(f64, f64)>> {
    let z_saddle = saddle_height(c, params);
    let z0 = saddle_expansion(delta, c, params);
    let opts = OdeOptions {
        rel_tol: tol,
        abs_tol: tol,
        initial_step: delta,
        ..Default::default()
    };
    // phase 1: dZ/dX, X growing, until Z approaches 0
    let x_cap = 1e6;
    let phase1 = integrate_scalar(
        |x, z| trajectory_rhs(x, z, c, params),
        delta,
        z0,
        x_cap,
        &opts,
        |_, z| z < Z_SWITCH,
    )?;
    let (x_switch, z_switch) = *phase1.last().unwrap();
    if z_switch >= z_saddle * (1.0 + 1e-9) {
        return Err(Error::Numerical(format!(
            "orbit left the admissible region: Z = {z_switch} above the saddle height {z_saddle} \
             after {} steps",
            phase1.len()
        )));
    }
    if z_switch >= Z_SWITCH {
        return Err(Error::Numerical("orbit never approached Z = 0".into()));
    }
    // phase 2: dX/dZ down to Z = 0 exactly (regular there: dX/dZ -> 0)
    let phase2 = integrate_scalar(
        |z, x| {
            if z == 0.0 {
                Ok(0.0)
            } else {
                Ok(1.0 / trajectory_rhs(x, z, c, params)?)
            }
        },
        z_switch,
        x_switch,
        0.0,
        &opts,
        |_, _| false,
    )?;
    let mut samples: Vec<(f64, f64)> = phase1;
    samples.extend(phase2.iter().skip(1).map(|&(z, x)| (x, z)));
    Ok(samples)
}

/// Integrates the fast orbit T_c from the saddle to its Z = 0 crossing.
/// The launch offset δ = 1e-6 X_c is validated by repeating the integration
/// at δ/10 and requiring the two M_c values to agree to 1e-6 relative.
pub fn fast_orbit(c: f64, params: &Params, tol: f64) -> Result<FastOrbitSummary> {
    params.reaction()?;
    if !(c > 0.0) {
        return Err(Error::InvalidParam(format!("c must be > 0, got {c}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParam("tol must be > 0".into()));
    }
    let vertex = isocline_vertex(c, params)?;
    let delta = 1e-6 * vertex.0;
    let samples = orbit_from_launch(c, params, delta, tol)?;
    let m_c = samples.last().unwrap().0;
    let check = orbit_from_launch(c, params, delta / 10.0, tol)?;
    let m_check = check.last().unwrap().0;
    if (m_c - m_check).abs() > 1e-6 * m_c {
        return Err(Error::Numerical(format!(
            "launch-offset self-consistency failed: M_c {m_c} vs {m_check}"
        )));
    }
    Ok(FastOrbitSummary {
        c,
        p: params.p,
        m_c,
        vertex,
        samples,
        xi0: f64::NAN,
        profile: Vec::new(),
        darcy_slope: f64::NAN,
    })
}

/// Continues the trajectory past the maximum onto the Z < 0 branch,
/// returning (X, Z) samples until X falls below `x_stop`. Behind the front
/// Z(X) ~ -X^{-1/(p-1)} as X → 0⁺.
pub fn blow_down_branch(orbit: &FastOrbitSummary, params: &Params, x_stop: f64, tol: f64) -> Result<Vec<(f64, f64)>> {
    let c = orbit.c;
    let opts = OdeOptions {
        rel_tol: tol,
        abs_tol: tol,
        initial_step: 1e-6,
        ..Default::default()
    };
    // from (M_c, 0) go to negative Z; parameterize by Z while |Z| is small,
    // then switch back to dZ/dX with X decreasing
    let down = integrate_scalar(
        |z, x| {
            if z == 0.0 {
                Ok(0.0)
            } else {
                Ok(1.0 / trajectory_rhs(x, z, c, params)?)
            }
        },
        0.0,
        orbit.m_c,
        -Z_SWITCH,
        &opts,
        |_, _| false,
    )?;
    let (z1, x1) = *down.last().unwrap();
    let tail = integrate_scalar(
        |x, z| trajectory_rhs(x, z, c, params),
        x1,
        z1,
        0.0,
        &opts,
        |x, _| x <= x_stop,
    )?;
    let mut samples: Vec<(f64, f64)> = down.into_iter().map(|(z, x)| (x, z)).collect();
    samples.extend(tail.into_iter().skip(1));
    Ok(samples)
}

/// Recovers the profile φ(ξ) by the quadrature dξ = -dX/(X^{1/(p-1)} Z),
/// anchored at ξ = 0 on the maximum. Fills `xi0`, `profile` and
/// `darcy_slope`.
pub fn reconstruct_profile(mut orbit: FastOrbitSummary, params: &Params) -> Result<FastOrbitSummary> {
    let p = params.p;
    let c = orbit.c;
    if orbit.samples.len() < 8 {
        return Err(Error::Numerical("orbit too short to reconstruct".into()));
    }
    // walk from the maximum (last sample, Z = 0) back toward the saddle
    // launch (first sample); ξ grows from 0 toward ξ0 as X decreases.
    let mut profile = Vec::with_capacity(orbit.samples.len() + 1);
    let mut xi = 0.0_f64;
    let path: Vec<(f64, f64)> = orbit.samples.iter().rev().cloned().collect();
    profile.push((0.0, path[0].0));
    for w in path.windows(2) {
        let (x_a, z_a) = w[0];
        let (x_b, z_b) = w[1];
        let x_m = 0.5 * (x_a + x_b);
        let z_m = 0.5 * (z_a + z_b);
        if z_m <= 0.0 || x_m <= 0.0 {
            continue;
        }
        // midpoint rule keeps the integrable endpoint singularities finite
        xi += -(x_b - x_a) / (x_m.powf(1.0 / (p - 1.0)) * z_m);
        if !xi.is_finite() {
            return Err(Error::Numerical("profile quadrature diverged".into()));
        }
        profile.push((xi, x_b));
    }
    // analytic remainder of the quadrature from the launch offset down to
    // X = 0, using Z ≈ c^{1/(p-1)} there
    let (x_last, _) = *path.last().unwrap();
    let tail = x_last.powf((p - 2.0) / (p - 1.0)) * (p - 1.0)
        / ((p - 2.0) * saddle_height(c, params));
    let xi0 = xi + tail;
    if !xi0.is_finite() || xi0 > 1e12 {
        return Err(Error::Numerical("free boundary not reached at finite xi".into()));
    }
    profile.push((xi0, 0.0));

    // Darcy fit: slope of φ^{(p-2)/(p-1)} vs (ξ0 - ξ) over the last decade
    // of positive φ values
    let phi_floor = path.last().unwrap().0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(xi_i, phi_i) in profile.iter() {
        if phi_i > 0.0 && phi_i <= 10.0 * phi_floor {
            xs.push(xi0 - xi_i);
            ys.push(phi_i.powf((p - 2.0) / (p - 1.0)));
        }
    }
    if xs.len() < 4 {
        return Err(Error::Numerical("too few samples for the Darcy fit".into()));
    }
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|v| v * v).sum();
    let sxy: f64 = xs.iter().zip(ys.iter()).map(|(a, b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    orbit.xi0 = xi0;
    orbit.profile = profile;
    orbit.darcy_slope = slope;
    Ok(orbit)
}

/// Closed-form Darcy slope ((p-2)/(p-1)) c^{1/(p-1)} for comparison.
pub fn darcy_slope_exact(c: f64, params: &Params) -> f64 {
    let p = params.p;
    (p - 2.0) / (p - 1.0) * saddle_height(c, params)
}

/// Runs [`fast_orbit`] for each speed; the resulting M_c map is monotone
/// nondecreasing in c.
pub fn max_speed_map(c_list: &[f64], params: &Params, tol: f64) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(c_list.len());
    for &c in c_list {
        let orbit = fast_orbit(c, params, tol)?;
        out.push((c, orbit.m_c));
    }
    Ok(out)
}

/// Left-moving wave: ξ → -ξ. Same M_c, mirrored profile, negated ξ0.
pub fn reflect_left_moving(orbit: &FastOrbitSummary) -> FastOrbitSummary {
    let mut out = orbit.clone();
    out.xi0 = -orbit.xi0;
    out.profile = orbit.profile.iter().rev().map(|&(xi, phi)| (-xi, phi)).collect();
    out
}
