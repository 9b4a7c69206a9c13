//! Renormalization between original time t and logarithmic time τ.
//!
//! Unshifted: v = t^{1/(p-2)} u, τ = ln t.
//! Shifted:   v = (t+1)^{1/(p-2)} u, τ = ln(t+1), so that τ = 0 carries the
//! initial datum unchanged.

use crate::error::{Error, Result};
use crate::grid::Params;

/// Forward transform of a single sample.
pub fn rescale_forward(u_value: f64, t: f64, params: &Params, shifted: bool) -> Result<(f64, f64)> {
    let alpha = params.reaction()?; // 1/(p-2)
    if !u_value.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite("rescale_forward"));
    }
    if shifted {
        if t < 0.0 {
            return Err(Error::InvalidParam(format!("shifted transform needs t >= 0, got {t}")));
        }
        Ok(((t + 1.0).powf(alpha) * u_value, (t + 1.0).ln()))
    } else {
        if t <= 0.0 {
            return Err(Error::InvalidParam(format!("unshifted transform needs t > 0, got {t}")));
        }
        Ok((t.powf(alpha) * u_value, t.ln()))
    }
}

/// Exact inverse of [`rescale_forward`].
pub fn rescale_inverse(v_value: f64, tau: f64, params: &Params, shifted: bool) -> Result<(f64, f64)> {
    let alpha = params.reaction()?;
    if !v_value.is_finite() || !tau.is_finite() {
        return Err(Error::NonFinite("rescale_inverse"));
    }
    if shifted {
        let t = tau.exp() - 1.0;
        Ok(((t + 1.0).powf(-alpha) * v_value, t))
    } else {
        let t = tau.exp();
        Ok((t.powf(-alpha) * v_value, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p4() -> Params {
        Params::new(4.0).unwrap()
    }

    #[test]
    fn exact_cancellation_for_separate_variables_decay() {
        // p = 4, u = t^{-1/2}: v = 1 for any t > 0
        for t in [0.1_f64, 1.0, 7.5, 1e4] {
            let (v, tau) = rescale_forward(t.powf(-0.5), t, &p4(), false).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
            assert!((tau - t.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn shifted_transform_keeps_initial_datum() {
        let (v, tau) = rescale_forward(0.37, 0.0, &p4(), true).unwrap();
        assert_eq!(v, 0.37);
        assert_eq!(tau, 0.0);
    }

    #[test]
    fn arithmetic_example() {
        // p = 4, t = e^2, u = 3 e^{-1} -> v = 3, tau = 2
        let t = std::f64::consts::E.powi(2);
        let u = 3.0 / std::f64::consts::E;
        let (v, tau) = rescale_forward(u, t, &p4(), false).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
        assert!((tau - 2.0).abs() < 1e-12);
        // and the inverse arithmetic: (v, tau) = (3, 2) -> (3 e^{-1}, e^2)
        let (u2, t2) = rescale_inverse(3.0, 2.0, &p4(), false).unwrap();
        assert!((u2 - u).abs() < 1e-12);
        assert!((t2 - t).abs() / t < 1e-12);
    }

    #[test]
    fn tau_zero_is_unit_time() {
        let (u, t) = rescale_inverse(1.0, 0.0, &p4(), false).unwrap();
        assert_eq!((u, t), (1.0, 1.0));
    }

    #[test]
    fn rejects_out_of_range_time() {
        assert!(rescale_forward(1.0, 0.0, &p4(), false).is_err());
        assert!(rescale_forward(1.0, -1.0, &p4(), true).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_identity(u in 1e-6_f64..1e3, t in 1e-3_f64..1e3, p in 2.1_f64..6.0, shifted: bool) {
            let params = Params::new(p).unwrap();
            let (v, tau) = rescale_forward(u, t, &params, shifted).unwrap();
            let (u2, t2) = rescale_inverse(v, tau, &params, shifted).unwrap();
            prop_assert!((u2 - u).abs() <= 1e-12 * u.abs());
            prop_assert!((t2 - t).abs() <= 1e-9 * t.abs().max(1.0));
        }
    }
}
