use crate::error::Result;
use crate::stiefel::{inverse_retract, retract, StiefelPoint};

/// `t' = (√(4t² + 1) + 1) / 2`, the root of `t'² - t' = t²` above one half.
pub fn fista_t_update(t: f64) -> f64 {
    (libm::sqrt(4.0 * t * t + 1.0) + 1.0) / 2.0
}

/// Relative defect `|t'² - t' - t²| / max(1, t'²)` of one update.
pub fn t_identity_defect(t: f64, t_next: f64) -> f64 {
    (t_next * t_next - t_next - t * t).abs() / (t_next * t_next).max(1.0)
}

/// `y = R_{x_next}(((1 - t_k) / t_next) · R⁻¹_{x_next}(x_prev))`.
///
/// Since `R⁻¹_{x_next}(x_prev)` points back toward the previous iterate, the
/// negative coefficient extrapolates past `x_next`.
pub fn momentum_point(
    x_next: &StiefelPoint,
    x_prev: &StiefelPoint,
    t_k: f64,
    t_next: f64,
) -> Result<StiefelPoint> {
    let coef = (1.0 - t_k) / t_next;
    if coef == 0.0 {
        return Ok(x_next.clone());
    }
    let back = inverse_retract(x_next, x_prev)?;
    retract(x_next, &back.scaled(coef))
}
