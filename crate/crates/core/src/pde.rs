//! Explicit time steppers for the original, rescaled and moving-frame
//! equations, plus the steady-state driver used by the travelling-wave
//! construction.
//!
//! Everything is forward Euler under an explicit stability bound; that keeps
//! the discrete maximum principle intact, which the comparison-based checks
//! rely on.

use crate::error::{Error, Result};
use crate::grid::{Params, ProfileField, TubeField};
use crate::plap::{self, PlapWorkspace, DEFAULT_EPS_REG};

/// Safety floor preventing a division by zero in the stability bound when
/// the field is flat.
const DT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    /// Fraction of the stability bound actually used.
    pub dt_safety: f64,
    /// Hard cap on the step size (binds for nearly flat fields).
    pub dt_max: f64,
    pub max_steps: usize,
    pub eps_reg: f64,
    /// Caller-forced step; rejected if it violates the stability bound.
    pub dt_override: Option<f64>,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            dt_safety: 0.4,
            dt_max: 1e-2,
            max_steps: 200_000_000,
            eps_reg: DEFAULT_EPS_REG,
            dt_override: None,
        }
    }
}

/// Convergence test for the steady-state driver: the sup-norm increment per
/// unit τ must fall below `residual_tol`, measured every `check_interval`
/// steps.
#[derive(Debug, Clone, Copy)]
pub struct SteadyStateCriterion {
    pub residual_tol: f64,
    pub check_interval: usize,
    /// Optional ceiling on the march time τ. Near the critical speed the
    /// steady state is approached on a τ ~ j/|c − c*| scale, which makes an
    /// uncapped march arbitrarily slow; with a cap the driver returns the
    /// (monotone, admissible) state reached at the cap instead. The speed
    /// bias this introduces in the bisection is at most ~ j/τ_cap.
    pub tau_cap: Option<f64>,
}

impl Default for SteadyStateCriterion {
    fn default() -> Self {
        SteadyStateCriterion {
            residual_tol: 1e-7,
            check_interval: 2000,
            tau_cap: None,
        }
    }
}

/// The truncated moving-frame problem on ξ ∈ (-j, j): the inlet edge
/// carries the cross-sectional profile Φ, every other edge is 0.
#[derive(Debug, Clone)]
pub struct MovingFrameProblem {
    pub params: Params,
    pub grid: crate::grid::TubeGrid,
    pub speed: f64,
    pub inlet_profile: ProfileField,
    pub truncation: f64,
}

impl MovingFrameProblem {
    pub fn new(
        params: Params,
        inlet_profile: ProfileField,
        speed: f64,
        truncation: f64,
        dy: f64,
    ) -> Result<Self> {
        if speed < 0.0 {
            return Err(Error::InvalidParam(format!("speed must be >= 0, got {speed}")));
        }
        if !(truncation > 0.0) {
            return Err(Error::InvalidParam(format!("truncation must be > 0, got {truncation}")));
        }
        params.reaction()?;
        let grid = crate::grid::TubeGrid::symmetric(inlet_profile.cross_section, truncation, dy)?;
        Ok(MovingFrameProblem {
            params,
            grid,
            speed,
            inlet_profile,
            truncation,
        })
    }

    /// Initial state: w ≡ 0 with the boundary data installed.
    pub fn initial_state(&self) -> TubeField {
        let mut w = TubeField::zeros(self.grid);
        for iz in 0..self.grid.cross_section.n_z {
            w.values[[0, iz]] = self.inlet_profile.values[iz];
        }
        w.values[[0, 0]] = 0.0;
        w.values[[0, self.grid.cross_section.n_z - 1]] = 0.0;
        w
    }
}

fn stability_bound(h: f64, g: f64, p: f64, axes: f64, control: &StepControl) -> f64 {
    let dt = control.dt_safety * h * h / (2.0 * axes * (p - 1.0) * g.powf(p - 2.0) + DT_FLOOR);
    dt.min(control.dt_max)
}

/// Stable step size for a tube field. The bound is
/// dt_safety · h² / (2 A (p-1) g^{p-2}) with h the minimum spacing, g the
/// maximum face-gradient magnitude and A the axis count.
pub fn stable_dt(field: &TubeField, params: &Params, control: &StepControl) -> Result<f64> {
    field.check_finite()?;
    let h = field.grid.dy().min(field.grid.cross_section.dz());
    let g = plap::max_face_gradient(field);
    Ok(stability_bound(h, g, params.p, 2.0, control))
}

/// Stable step size for a cross-section field (one axis).
pub fn stable_dt_1d(field: &ProfileField, params: &Params, control: &StepControl) -> Result<f64> {
    field.check_finite()?;
    let h = field.cross_section.dz();
    let g = plap::max_face_gradient_1d(field);
    Ok(stability_bound(h, g, params.p, 1.0, control))
}

/// Stable step for the moving frame: diffusive bound plus the advective
/// bound dt_safety · dy / c.
pub fn stable_dt_moving(
    field: &TubeField,
    params: &Params,
    control: &StepControl,
    speed: f64,
) -> Result<f64> {
    let dt = stable_dt(field, params, control)?;
    if speed > 0.0 {
        Ok(dt.min(control.dt_safety * field.grid.dy() / speed))
    } else {
        Ok(dt)
    }
}

/// Reusable single-step engine for the tube equations.
pub(crate) struct Stepper2d {
    pub params: Params,
    pub eps_reg: f64,
    /// Linear reaction coefficient (0 for the original equation, 1/(p-2)
    /// for the rescaled ones).
    pub reaction: f64,
    /// Drift speed c of the moving frame (0 otherwise). Upwinded with the
    /// forward difference, matching the −c characteristic direction.
    pub drift: f64,
    ws: PlapWorkspace,
}

impl Stepper2d {
    pub fn new(params: Params, eps_reg: f64, reaction: f64, drift: f64, n_y: usize, n_z: usize) -> Self {
        Stepper2d {
            params,
            eps_reg,
            reaction,
            drift,
            ws: PlapWorkspace::new(n_y, n_z),
        }
    }

    /// Advances `src` into `dst` by `dt` (or the stable step when `dt` is
    /// None). Boundary rows/columns are copied from `src`. Negative
    /// overshoots are clipped to 0. Returns the step actually taken.
    pub fn step_into(
        &mut self,
        src: &TubeField,
        dst: &mut TubeField,
        dt: Option<f64>,
        control: &StepControl,
    ) -> Result<f64> {
        let n_y = src.grid.n_y;
        let n_z = src.grid.cross_section.n_z;
        let dy = src.grid.dy();
        let dz = src.grid.cross_section.dz();
        let g = self.ws.fill(src, self.params.p, self.eps_reg);
        let h = dy.min(dz);
        let mut bound = stability_bound(h, g, self.params.p, 2.0, control);
        if self.drift > 0.0 {
            bound = bound.min(control.dt_safety * dy / self.drift);
        }
        let dt = match dt {
            Some(forced) => {
                if forced > bound * (1.0 + 1e-12) {
                    return Err(Error::InvalidParam(format!(
                        "forced dt {forced:.3e} violates stability bound {bound:.3e}"
                    )));
                }
                forced
            }
            None => bound,
        };
        let u = &src.values;
        let out = &mut dst.values;
        for iy in 1..n_y - 1 {
            for iz in 1..n_z - 1 {
                let mut rhs = self.ws.divergence(iy, iz, dy, dz);
                if self.drift > 0.0 {
                    rhs += self.drift * (u[[iy + 1, iz]] - u[[iy, iz]]) / dy;
                }
                rhs += self.reaction * u[[iy, iz]];
                out[[iy, iz]] = (u[[iy, iz]] + dt * rhs).max(0.0);
            }
        }
        // pinned boundary data
        for iz in 0..n_z {
            out[[0, iz]] = u[[0, iz]];
            out[[n_y - 1, iz]] = u[[n_y - 1, iz]];
        }
        for iy in 0..n_y {
            out[[iy, 0]] = u[[iy, 0]];
            out[[iy, n_z - 1]] = u[[iy, n_z - 1]];
        }
        dst.time_tag = src.time_tag + dt;
        Ok(dt)
    }
}

fn check_nonnegative(field: &TubeField) -> Result<()> {
    field.check_finite()?;
    if field.values.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParam("field must be nonnegative".into()));
    }
    Ok(())
}

/// One forward-Euler step of ∂_t u = Δ_p u.
pub fn step_original(u: &TubeField, params: &Params, control: &StepControl) -> Result<TubeField> {
    check_nonnegative(u)?;
    let mut stepper = Stepper2d::new(
        *params,
        control.eps_reg,
        0.0,
        0.0,
        u.grid.n_y,
        u.grid.cross_section.n_z,
    );
    let mut out = TubeField::zeros(u.grid);
    stepper.step_into(u, &mut out, control.dt_override, control)?;
    Ok(out)
}

/// One step of ∂_τ v = Δ_p v + v/(p-2).
pub fn step_rescaled(v: &TubeField, params: &Params, control: &StepControl) -> Result<TubeField> {
    check_nonnegative(v)?;
    let reaction = params.reaction()?;
    let mut stepper = Stepper2d::new(
        *params,
        control.eps_reg,
        reaction,
        0.0,
        v.grid.n_y,
        v.grid.cross_section.n_z,
    );
    let mut out = TubeField::zeros(v.grid);
    stepper.step_into(v, &mut out, control.dt_override, control)?;
    Ok(out)
}

/// One step of ∂_τ w = Δ_p w + c ∂_ξ w + w/(p-2) with first-order upwinding.
pub fn step_moving_frame(
    w: &TubeField,
    problem: &MovingFrameProblem,
    control: &StepControl,
) -> Result<TubeField> {
    check_nonnegative(w)?;
    let reaction = problem.params.reaction()?;
    let mut stepper = Stepper2d::new(
        problem.params,
        control.eps_reg,
        reaction,
        problem.speed,
        w.grid.n_y,
        w.grid.cross_section.n_z,
    );
    let mut out = TubeField::zeros(w.grid);
    stepper.step_into(w, &mut out, control.dt_override, control)?;
    Ok(out)
}

/// Outcome of the steady-state march.
#[derive(Debug, Clone, Copy)]
pub struct SteadyInfo {
    pub steps: usize,
    pub tau: f64,
    pub residual_rate: f64,
    pub dt_min: f64,
    pub dt_max_used: f64,
}

/// Marches the moving-frame problem from w ≡ 0 until the sup-norm rate of
/// change per unit τ falls below the criterion. Returns φ_{j,c}.
pub fn evolve_to_steady(
    problem: &MovingFrameProblem,
    criterion: &SteadyStateCriterion,
    control: &StepControl,
) -> Result<(TubeField, SteadyInfo)> {
    let reaction = problem.params.reaction()?;
    let n_y = problem.grid.n_y;
    let n_z = problem.grid.cross_section.n_z;
    let mut stepper = Stepper2d::new(
        problem.params,
        control.eps_reg,
        reaction,
        problem.speed,
        n_y,
        n_z,
    );
    let mut w = problem.initial_state();
    let mut buf = w.clone();
    let mut reference = w.clone();
    let mut ref_tau = 0.0_f64;
    let mut dt_min = f64::INFINITY;
    let mut dt_max_used = 0.0_f64;
    let mut steps = 0usize;
    let mut rate = f64::INFINITY;

    while steps < control.max_steps {
        let dt = stepper.step_into(&w, &mut buf, None, control)?;
        std::mem::swap(&mut w, &mut buf);
        dt_min = dt_min.min(dt);
        dt_max_used = dt_max_used.max(dt);
        steps += 1;
        if steps % criterion.check_interval == 0 {
            let elapsed = w.time_tag - ref_tau;
            let sup_diff = w
                .values
                .iter()
                .zip(reference.values.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max);
            rate = sup_diff / elapsed;
            let capped = criterion.tau_cap.is_some_and(|cap| w.time_tag >= cap);
            if rate < criterion.residual_tol || capped {
                verify_steady_postconditions(&w, problem)?;
                return Ok((
                    w.clone(),
                    SteadyInfo {
                        steps,
                        tau: w.time_tag,
                        residual_rate: rate,
                        dt_min,
                        dt_max_used,
                    },
                ));
            }
            reference.values.assign(&w.values);
            ref_tau = w.time_tag;
        }
    }
    Err(Error::NonConverged {
        steps,
        residual: rate,
    })
}

/// 0 ≤ φ ≤ Φ(z)·(1+1e-6) and ∂_ξ φ ≤ 1e-8/dy at interior nodes.
fn verify_steady_postconditions(w: &TubeField, problem: &MovingFrameProblem) -> Result<()> {
    let n_y = w.grid.n_y;
    let n_z = w.grid.cross_section.n_z;
    let dy = w.grid.dy();
    // The interior relaxes toward the discrete stationary profile of the
    // scheme, which an externally supplied inlet (e.g. a shooting-method
    // profile) may undershoot by its own discretization error; the cap
    // slack allows for that gap.
    for iy in 0..n_y {
        for iz in 0..n_z {
            let cap = problem.inlet_profile.values[iz] * (1.0 + 1e-2);
            let v = w.values[[iy, iz]];
            if v < 0.0 || v > cap + 1e-14 {
                return Err(Error::Numerical(format!(
                    "steady state violates 0 <= w <= Phi at ({iy},{iz}): {v} vs cap {cap}"
                )));
            }
        }
    }
    for iy in 1..n_y - 2 {
        for iz in 1..n_z - 1 {
            let slope = (w.values[[iy + 1, iz]] - w.values[[iy, iz]]) / dy;
            if slope > 1e-8 / dy {
                return Err(Error::Numerical(format!(
                    "steady state not non-increasing in xi at ({iy},{iz}): slope {slope:.3e}"
                )));
            }
        }
    }
    Ok(())
}

/// Snapshot series from a rescaled-problem run on a tube.
#[derive(Debug, Clone)]
pub struct RescaledRun {
    pub snapshots: Vec<TubeField>,
    pub steps: usize,
    /// Most negative single-step nodewise increment seen (monotonicity
    /// diagnostic; the discrete Bénilan-Crandall estimate predicts >= 0
    /// for subsolution initial data).
    pub min_step_increment: f64,
    pub sup_over_run: f64,
}

/// Evolves the rescaled equation on a tube to `tau_final`, recording a
/// snapshot every `snapshot_every` units of τ (plus the initial and final
/// states).
pub fn run_rescaled(
    initial: TubeField,
    params: &Params,
    control: &StepControl,
    tau_final: f64,
    snapshot_every: f64,
) -> Result<RescaledRun> {
    check_nonnegative(&initial)?;
    let reaction = params.reaction()?;
    run_tube(initial, *params, reaction, control, tau_final, snapshot_every)
}

/// Evolves the original-time equation (no reaction); used by the p = 2
/// linear-contrast pipeline as well as the slow-diffusion consistency tests.
pub fn run_original(
    initial: TubeField,
    params: &Params,
    control: &StepControl,
    t_final: f64,
    snapshot_every: f64,
) -> Result<RescaledRun> {
    check_nonnegative(&initial)?;
    run_tube(initial, *params, 0.0, control, t_final, snapshot_every)
}

fn run_tube(
    initial: TubeField,
    params: Params,
    reaction: f64,
    control: &StepControl,
    t_final: f64,
    snapshot_every: f64,
) -> Result<RescaledRun> {
    if !(t_final > initial.time_tag) {
        return Err(Error::InvalidParam("final time must exceed the initial time tag".into()));
    }
    if !(snapshot_every > 0.0) {
        return Err(Error::InvalidParam("snapshot_every must be > 0".into()));
    }
    let n_y = initial.grid.n_y;
    let n_z = initial.grid.cross_section.n_z;
    let mut stepper = Stepper2d::new(params, control.eps_reg, reaction, 0.0, n_y, n_z);
    let mut state = initial;
    let mut buf = state.clone();
    let mut snapshots = vec![state.clone()];
    let mut next_snapshot = state.time_tag + snapshot_every;
    let mut min_inc = 0.0_f64;
    let mut sup = state.sup();
    let mut steps = 0usize;

    while state.time_tag < t_final {
        let bound = {
            let g = plap::max_face_gradient(&state);
            let h = state.grid.dy().min(state.grid.cross_section.dz());
            stability_bound(h, g, params.p, 2.0, control)
        };
        let dt = bound.min(t_final - state.time_tag).min(next_snapshot - state.time_tag);
        stepper.step_into(&state, &mut buf, Some(dt), control)?;
        for (a, b) in buf.values.iter().zip(state.values.iter()) {
            min_inc = min_inc.min(a - b);
        }
        std::mem::swap(&mut state, &mut buf);
        sup = sup.max(state.sup());
        steps += 1;
        if steps > control.max_steps {
            return Err(Error::NonConverged { steps, residual: t_final - state.time_tag });
        }
        if state.time_tag >= next_snapshot - 1e-12 {
            snapshots.push(state.clone());
            next_snapshot += snapshot_every;
        }
    }
    if (snapshots.last().map(|s| s.time_tag).unwrap_or(f64::NEG_INFINITY) - state.time_tag).abs() > 1e-12 {
        snapshots.push(state.clone());
    }
    Ok(RescaledRun {
        snapshots,
        steps,
        min_step_increment: min_inc,
        sup_over_run: sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CrossSection, TubeGrid};

    fn small_grid() -> TubeGrid {
        let cs = CrossSection::new(1.0, 9).unwrap();
        TubeGrid::symmetric(cs, 2.0, 0.25).unwrap()
    }

    fn bump(grid: TubeGrid, amp: f64) -> TubeField {
        TubeField::from_fn(grid, |z, y| {
            let ramp = ((1.5 - y.abs()) / 0.5).clamp(0.0, 1.0);
            amp * (std::f64::consts::PI * z).sin() * ramp
        })
    }

    #[test]
    fn stable_dt_matches_arithmetic_example() {
        // p = 4, h = 0.01, g = 1, A = 2, dt_safety = 0.4 -> 0.4e-4/12
        let dt = stability_bound(0.01, 1.0, 4.0, 2.0, &StepControl::default());
        assert!((dt - 0.4e-4 / 12.0).abs() / dt < 1e-9, "{dt}");
    }

    #[test]
    fn stable_dt_flat_field_capped() {
        let f = TubeField::zeros(small_grid());
        let control = StepControl::default();
        let dt = stable_dt(&f, &Params::new(4.0).unwrap(), &control).unwrap();
        assert_eq!(dt, control.dt_max);
    }

    #[test]
    fn stable_dt_quarters_when_gradient_doubles_at_p4() {
        let c = StepControl::default();
        let a = stability_bound(0.01, 1.0, 4.0, 2.0, &c);
        let b = stability_bound(0.01, 2.0, 4.0, 2.0, &c);
        assert!((a / b - 4.0).abs() < 1e-6, "{a} {b}");
    }

    #[test]
    fn zero_field_is_fixed_point() {
        let u = TubeField::zeros(small_grid());
        let params = Params::new(4.0).unwrap();
        let out = step_original(&u, &params, &StepControl::default()).unwrap();
        assert!(out.values.iter().all(|&v| v == 0.0));
        let out = step_rescaled(&u, &params, &StepControl::default()).unwrap();
        assert!(out.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn support_expands_at_most_one_cell_per_step() {
        let grid = small_grid();
        let u = bump(grid, 0.5);
        let params = Params::new(4.0).unwrap();
        let out = step_original(&u, &params, &StepControl::default()).unwrap();
        for iy in 1..grid.n_y - 1 {
            for iz in 1..grid.cross_section.n_z - 1 {
                if out.values[[iy, iz]] > 0.0 && u.values[[iy, iz]] == 0.0 {
                    // must have a positive neighbor in the input
                    let near = u.values[[iy - 1, iz]] > 0.0
                        || u.values[[iy + 1, iz]] > 0.0
                        || u.values[[iy, iz - 1]] > 0.0
                        || u.values[[iy, iz + 1]] > 0.0;
                    assert!(near, "support jumped at ({iy},{iz})");
                }
            }
        }
    }

    #[test]
    fn sup_norm_never_grows_under_original_flow() {
        let grid = small_grid();
        let mut u = bump(grid, 0.5);
        let params = Params::new(4.0).unwrap();
        let control = StepControl::default();
        let sup0 = u.sup();
        let mass0 = u.mass();
        let mut mass_prev = mass0;
        for _ in 0..1000 {
            u = step_original(&u, &params, &control).unwrap();
            let m = u.mass();
            assert!(m <= mass_prev * (1.0 + 1e-12), "mass grew");
            mass_prev = m;
        }
        assert!(u.sup() <= sup0 * (1.0 + 1e-12));
    }

    #[test]
    fn forced_dt_above_bound_rejected() {
        let grid = small_grid();
        let u = bump(grid, 0.5);
        let params = Params::new(4.0).unwrap();
        let mut control = StepControl::default();
        let bound = stable_dt(&u, &params, &control).unwrap();
        control.dt_override = Some(bound * 10.0);
        assert!(step_original(&u, &params, &control).is_err());
    }

    #[test]
    fn rescaled_and_original_agree_through_the_transform() {
        // evolve u one step in t, rescale; versus rescale then one step in tau
        let grid = small_grid();
        let params = Params::new(4.0).unwrap();
        let control = StepControl::default();
        let mut u = bump(grid, 0.5);
        u.time_tag = 1.0; // t = 1 so tau = 0
        let dt = stable_dt(&u, &params, &control).unwrap() * 0.5;

        let mut forced = control;
        forced.dt_override = Some(dt);
        let u_next = step_original(&u, &params, &forced).unwrap();
        let t_next = 1.0 + dt;
        // rescale u_next to v at tau = ln(t_next)
        let factor = t_next.powf(0.5);
        let v_direct: Vec<f64> = u_next.values.iter().map(|&x| factor * x).collect();

        // rescale first (t = 1: v = u), then step in tau by ln(t_next)
        let mut v = u.clone();
        v.time_tag = 0.0;
        let mut forced_tau = control;
        forced_tau.dt_override = Some(t_next.ln());
        let v_next = step_rescaled(&v, &params, &forced_tau).unwrap();

        let err = v_next
            .values
            .iter()
            .zip(v_direct.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(err < 20.0 * dt * dt, "two-path mismatch {err:.3e} vs dt^2 {:.3e}", dt * dt);
    }

    #[test]
    fn moving_frame_with_zero_speed_matches_rescaled() {
        let cs = CrossSection::new(1.0, 9).unwrap();
        let params = Params::new(4.0).unwrap();
        let phi = ProfileField::from_fn(cs, |z| 0.1 * (std::f64::consts::PI * z).sin());
        let problem = MovingFrameProblem::new(params, phi, 0.0, 2.0, 0.25).unwrap();
        let w = bump(problem.grid, 0.05);
        let control = StepControl {
            dt_override: Some(1e-4),
            ..Default::default()
        };
        let a = step_moving_frame(&w, &problem, &control).unwrap();
        let b = step_rescaled(&w, &params, &control).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn moving_frame_zero_state_with_zero_inlet_stays_zero() {
        let cs = CrossSection::new(1.0, 9).unwrap();
        let params = Params::new(4.0).unwrap();
        let phi = ProfileField::zeros(cs);
        let problem = MovingFrameProblem::new(params, phi, 1.0, 2.0, 0.25).unwrap();
        let w = problem.initial_state();
        let out = step_moving_frame(&w, &problem, &StepControl::default()).unwrap();
        assert!(out.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn discrete_comparison_on_random_ordered_pairs() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let grid = small_grid();
        let params = Params::new(4.0).unwrap();
        for _ in 0..20 {
            // smooth ordered pair: u2 = u1 + nonnegative smooth excess
            let a1: f64 = rng.random_range(0.05..0.3);
            let a2: f64 = rng.random_range(0.0..0.2);
            let w1: f64 = rng.random_range(0.5..2.0);
            let w2: f64 = rng.random_range(0.5..2.0);
            let u1 = TubeField::from_fn(grid, |z, y| {
                a1 * (std::f64::consts::PI * z).sin() * (-(y * y) / w1).exp()
            });
            let mut u2 = u1.clone();
            let excess = TubeField::from_fn(grid, |z, y| {
                a2 * (std::f64::consts::PI * z).sin().powi(2) * (-(y * y) / w2).exp()
            });
            u2.values += &excess.values;
            let control = StepControl {
                dt_override: Some(
                    stable_dt(&u2, &params, &StepControl::default())
                        .unwrap()
                        .min(stable_dt(&u1, &params, &StepControl::default()).unwrap()),
                ),
                ..Default::default()
            };
            let mut s1 = u1;
            let mut s2 = u2;
            for _ in 0..50 {
                s1 = step_rescaled(&s1, &params, &control).unwrap();
                s2 = step_rescaled(&s2, &params, &control).unwrap();
                let worst = s1
                    .values
                    .iter()
                    .zip(s2.values.iter())
                    .map(|(a, b)| b - a)
                    .fold(f64::INFINITY, f64::min);
                assert!(worst >= -1e-12, "ordering violated by {worst:.3e}");
            }
        }
    }
}
