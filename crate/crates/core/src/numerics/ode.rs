use crate::{Error, Result, C64};

/// One classical fourth-order Runge–Kutta step of `ẏ = rhs(t, y)`.
pub fn rk4_step<F>(state: &[C64], t: f64, dt: f64, rhs: &mut F) -> Result<Vec<C64>>
where
    F: FnMut(f64, &[C64]) -> Vec<C64>,
{
    let checked = |v: Vec<C64>| -> Result<Vec<C64>> {
        if v.len() != state.len() {
            return Err(Error::LengthMismatch { expected: state.len(), got: v.len() });
        }
        if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(v)
        } else {
            Err(Error::NonFiniteDerivative)
        }
    };
    let axpy = |h: f64, k: &[C64]| -> Vec<C64> { state.iter().zip(k).map(|(y, k)| y + k * h).collect() };
    let k1 = checked(rhs(t, state))?;
    let k2 = checked(rhs(t + 0.5 * dt, &axpy(0.5 * dt, &k1)))?;
    let k3 = checked(rhs(t + 0.5 * dt, &axpy(0.5 * dt, &k2)))?;
    let k4 = checked(rhs(t + dt, &axpy(dt, &k3)))?;
    Ok(state.iter().enumerate().map(|(i, y)| y + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0)).collect())
}

/// Number of equal steps covering `[0, tau]` with step at most `dt`, and that step.
pub fn uniform_steps(tau: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("duration must be non-negative, got {tau}")));
    }
    if tau == 0.0 {
        return Ok((0, dt));
    }
    let n = (tau / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((n, tau / n as f64))
}
