//! Special functions and the closed-form constants of the fractional
//! Laplacian: Gamma, Beta, the normalization constant `gamma_ds`, radial
//! moments of the kernel and the dimensional-reduction constant.

use crate::error::{Error, Result};
use crate::scalar::Real;

// Lanczos approximation, g = 7, 9 coefficients (GSL set).
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// A computed constant together with a conservative absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialValue {
    pub value: f64,
    pub abs_error_bound: f64,
}

fn lanczos_core<T: Real>(xm1: T) -> (T, T) {
    // Returns (w, a) with Gamma(x) = sqrt(2 pi) w^{x - 1/2} e^{-w} a, x = xm1 + 1.
    let mut a = T::c(LANCZOS[0]);
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        a = a + T::c(p) / (xm1 + T::c(i as f64));
    }
    let w = xm1 + T::c(7.5);
    (w, a)
}

/// Euler Gamma function for positive arguments.
pub fn gamma_fn<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_fn requires x > 0, got {x:?}")));
    }
    if x < T::c(0.5) {
        // Recurrence keeps us on the accurate branch.
        return Ok(gamma_fn(x + T::one())? / x);
    }
    let (w, a) = lanczos_core(x - T::one());
    let sqrt_two_pi = T::c((2.0 * std::f64::consts::PI).sqrt());
    Ok(sqrt_two_pi * w.powf(x - T::c(0.5)) * (-w).exp() * a)
}

/// Natural log of Gamma for positive arguments; safe for large x.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x:?}")));
    }
    if x < T::c(0.5) {
        return Ok(ln_gamma(x + T::one())? - x.ln());
    }
    let (w, a) = lanczos_core(x - T::one());
    let half_log_two_pi = T::c(0.5 * (2.0 * std::f64::consts::PI).ln());
    Ok(half_log_two_pi + (x - T::c(0.5)) * w.ln() - w + a.ln())
}

/// Gamma with a conservative error bound derived from the recurrence defect.
pub fn gamma_checked(x: f64) -> Result<SpecialValue> {
    let value = gamma_fn(x)?;
    let defect = (gamma_fn(x + 1.0)? - x * value).abs();
    Ok(SpecialValue {
        value,
        abs_error_bound: defect + 4.0 * f64::EPSILON * value.abs(),
    })
}

/// Euler Beta function B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y).
pub fn beta_fn<T: Real>(x: T, y: T) -> Result<T> {
    if !(x > T::zero()) || !(y > T::zero()) {
        return Err(Error::Domain(format!(
            "beta_fn requires positive arguments, got ({x:?}, {y:?})"
        )));
    }
    if x + y < T::c(100.0) {
        Ok(gamma_fn(x)? * gamma_fn(y)? / gamma_fn(x + y)?)
    } else {
        Ok((ln_gamma(x)? + ln_gamma(y)? - ln_gamma(x + y)?).exp())
    }
}

/// Normalization constant of the fractional Laplacian of order 2s in
/// dimension d: `s 4^s pi^{-d/2} Gamma((d+2s)/2) / Gamma(1-s)`.
pub fn gamma_ds<T: Real>(d: u32, s: T) -> Result<T> {
    if d < 1 {
        return Err(Error::Domain("gamma_ds requires d >= 1".into()));
    }
    if !(s > T::zero() && s < T::one()) {
        return Err(Error::Domain(format!(
            "gamma_ds requires s in (0, 1), got {s:?}"
        )));
    }
    let df = T::c(d as f64);
    let two = T::c(2.0);
    let pi = T::c(std::f64::consts::PI);
    let num = gamma_fn((df + two * s) / two)?;
    let den = gamma_fn(T::one() - s)?;
    Ok(s * two.powf(two * s) * pi.powf(-df / two) * num / den)
}

/// The radial moment `2 \int_0^\infty r^a (r^2+1)^{-b/2} dr`
/// in closed form: `Gamma((a+1)/2) Gamma((b-a-1)/2) / Gamma(b/2)`.
pub fn radial_moment<T: Real>(a: T, b: T) -> Result<T> {
    if !(a > T::c(-1.0)) {
        return Err(Error::Domain(format!("radial_moment requires a > -1, got {a:?}")));
    }
    if !(b > a + T::one()) {
        return Err(Error::Domain(format!(
            "radial_moment requires b > a + 1, got ({a:?}, {b:?})"
        )));
    }
    let two = T::c(2.0);
    Ok(gamma_fn((a + T::one()) / two)? * gamma_fn((b - a - T::one()) / two)?
        / gamma_fn(b / two)?)
}

/// Surface measure of the unit sphere S^{k-1} in R^k.
pub fn sphere_area<T: Real>(k: u32) -> Result<T> {
    if k < 1 {
        return Err(Error::Domain("sphere_area requires k >= 1".into()));
    }
    let kf = T::c(k as f64);
    let two = T::c(2.0);
    let pi = T::c(std::f64::consts::PI);
    Ok(two * pi.powf(kf / two) / gamma_fn(kf / two)?)
}

/// The reduction constant
/// `M(d, s, alpha, beta) = \int_{R^{d-1}} |y|^alpha (1+|y|^2)^{-(d+2s+beta)/2} dy`,
/// which collapses the d-dimensional kernel onto the normal line. Satisfies
/// `M(d,s,0,0) = gamma_ds(1,s)/gamma_ds(d,s)` and
/// `M(d,s,2,0) = (d-1) gamma_ds(1,s) / ((2s-1) gamma_ds(d,s))`.
pub fn kernel_reduction_constant<T: Real>(d: u32, s: T, alpha: T, beta: T) -> Result<T> {
    if d < 2 {
        return Err(Error::Domain("kernel_reduction_constant requires d >= 2".into()));
    }
    if !(s > T::zero() && s < T::one()) {
        return Err(Error::Domain(format!("s must lie in (0, 1), got {s:?}")));
    }
    if alpha < T::zero() || beta < T::zero() {
        return Err(Error::Domain("alpha and beta must be nonnegative".into()));
    }
    let two = T::c(2.0);
    if !(two * s + beta + T::one() > alpha) {
        return Err(Error::Domain(format!(
            "integrability requires 2s + beta + 1 > alpha, got s={s:?}, alpha={alpha:?}, beta={beta:?}"
        )));
    }
    let df = T::c(d as f64);
    let a = alpha + df - two;
    let b = df + two * s + beta;
    Ok(sphere_area::<T>(d - 1)? * T::c(0.5) * radial_moment(a, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_adaptive;
    use proptest::prelude::*;

    const PI: f64 = std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn gamma_half_is_sqrt_pi() {
        assert!(rel(gamma_fn(0.5).unwrap(), 1.772453850905516) < 1e-13);
    }

    #[test]
    fn gamma_factorial_identity() {
        assert!(rel(gamma_fn(5.0).unwrap(), 24.0) < 1e-14);
    }

    #[test]
    fn gamma_at_one_and_quarter() {
        // cross-checked against the defining integral below
        assert!(rel(gamma_fn(1.25).unwrap(), 0.906402477055477) < 1e-12);
        let oracle = integrate_adaptive(|t| t.powf(0.25) * (-t).exp(), 1e-300, 60.0, 1e-12, 1e-13)
            .unwrap();
        assert!(rel(gamma_fn(1.25).unwrap(), oracle) < 1e-11);
    }

    #[test]
    fn gamma_recurrence_holds() {
        for &x in &[0.1, 0.5, 1.5, 3.7] {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-10, "recurrence defect at {x}");
        }
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-3.2).is_err());
    }

    #[test]
    fn gamma_f32_instantiation() {
        let g = gamma_fn(0.5f32).unwrap();
        assert!((g - PI.sqrt() as f32).abs() < 1e-5);
    }

    #[test]
    fn gamma_checked_reports_small_bound() {
        let sv = gamma_checked(2.5).unwrap();
        assert!(sv.abs_error_bound >= 0.0);
        assert!(sv.abs_error_bound < 1e-10);
        assert!(sv.value.is_finite());
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.2f64, 1.0, 4.5, 20.0] {
            assert!(rel(ln_gamma(x).unwrap().exp(), gamma_fn(x).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn beta_basics() {
        assert!(rel(beta_fn(1.0, 1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(beta_fn(0.5, 0.5).unwrap(), PI) < 1e-13);
        // direct quadrature of (1-t) t^2 on [0,1]
        let oracle =
            integrate_adaptive(|t| (1.0 - t) * t * t, 0.0, 1.0, 1e-13, 1e-13).unwrap();
        assert!(rel(beta_fn(2.0, 3.0).unwrap(), oracle) < 1e-12);
        assert!(rel(beta_fn(2.0, 3.0).unwrap(), 1.0 / 12.0) < 1e-13);
        assert!(beta_fn(-1.0, 2.0).is_err());
    }

    #[test]
    fn gamma_ds_reference_values() {
        assert!(rel(gamma_ds(1, 0.5).unwrap(), 1.0 / PI) < 1e-13);
        assert!(rel(gamma_ds(1, 0.75).unwrap(), 0.299206710) < 2e-9);
        for &(d, s) in &[(1u32, 0.3), (2, 0.6), (3, 0.75), (5, 0.9)] {
            assert!(gamma_ds(d, s).unwrap() > 0.0);
        }
        assert!(gamma_ds(1, 1.2).is_err());
        assert!(gamma_ds(1, 0.0).is_err());
    }

    #[test]
    fn radial_moment_examples() {
        assert!(rel(radial_moment(0.0, 2.0).unwrap(), PI) < 1e-13);
        assert!(rel(radial_moment(1.0, 4.0).unwrap(), 1.0) < 1e-13);
        let oracle = integrate_adaptive(
            |r| 2.0 * r * r * (r * r + 1.0).powf(-2.5),
            0.0,
            1e6,
            1e-10,
            1e-12,
        )
        .unwrap();
        assert!(rel(radial_moment(2.0, 5.0).unwrap(), 2.0 / 3.0) < 1e-13);
        assert!(rel(radial_moment(2.0, 5.0).unwrap(), oracle) < 1e-6);
        assert!(radial_moment(-1.5, 2.0).is_err());
        assert!(radial_moment(1.0, 1.5).is_err());
    }

    #[test]
    fn radial_moment_matches_quadrature_on_grid() {
        // 20-point (a, b) grid against the defining integral; the origin is
        // handled by the series of (1 + r^2)^{-b/2} and the far tail by a cut
        // chosen from the decay rate r^{a-b}
        for i in 0..4 {
            for j in 0..5 {
                let a = -0.5 + 0.9 * i as f64;
                let b = a + 1.3 + 0.8 * j as f64;
                let closed = radial_moment(a, b).unwrap();
                let d0 = 1e-3f64;
                let head = d0.powf(a + 1.0) / (a + 1.0) - 0.5 * b * d0.powf(a + 3.0) / (a + 3.0)
                    + b * (b + 2.0) / 8.0 * d0.powf(a + 5.0) / (a + 5.0);
                let cut = (1e13_f64).powf(1.0 / (b - a - 1.0)).min(1e12);
                let tail = cut.powf(a + 1.0 - b) / (b - a - 1.0);
                let oracle = 2.0
                    * (head
                        + tail
                        + integrate_adaptive(
                            |r| r.powf(a) * (r * r + 1.0).powf(-b / 2.0),
                            d0,
                            cut,
                            1e-12,
                            1e-11,
                        )
                        .unwrap());
                assert!(
                    rel(closed, oracle) < 1e-8,
                    "radial moment mismatch at a={a}, b={b}: {closed} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn kernel_reduction_matches_closed_forms() {
        for &d in &[2u32, 3, 4] {
            for &s in &[0.6, 0.75, 0.9] {
                let g1 = gamma_ds(1, s).unwrap();
                let gd = gamma_ds(d, s).unwrap();
                let m00 = kernel_reduction_constant(d, s, 0.0, 0.0).unwrap();
                let m20 = kernel_reduction_constant(d, s, 2.0, 0.0).unwrap();
                assert!(rel(m00, g1 / gd) < 1e-10);
                assert!(rel(m20, (d as f64 - 1.0) * g1 / ((2.0 * s - 1.0) * gd)) < 1e-10);
                // per-coordinate symmetry: dividing by d-1 gives the single-axis constant
                assert!(rel(m20 / (d as f64 - 1.0), g1 / ((2.0 * s - 1.0) * gd)) < 1e-12);
            }
        }
    }

    #[test]
    fn kernel_reduction_d2_against_radial_quadrature() {
        let s = 0.75;
        let m = kernel_reduction_constant(2, s, 0.0, 0.0).unwrap();
        // d = 2: the (d-1)-dimensional integral is one-dimensional; finite
        // body by adaptive quadrature, far tail by the binomial series
        let cut = 100.0f64;
        let body = integrate_adaptive(
            |y| 2.0 * (1.0 + y * y).powf(-(2.0 + 2.0 * s) / 2.0),
            0.0,
            cut,
            1e-12,
            1e-12,
        )
        .unwrap();
        let e = 1.0 + s;
        let tail = 2.0
            * (cut.powf(-1.0 - 2.0 * s) / (1.0 + 2.0 * s)
                - e * cut.powf(-3.0 - 2.0 * s) / (3.0 + 2.0 * s));
        let oracle = body + tail;
        assert!(rel(m, oracle) < 1e-8, "{m} vs {oracle}");
    }

    #[test]
    fn kernel_reduction_rejects_bad_parameters() {
        assert!(kernel_reduction_constant(1, 0.75, 0.0, 0.0).is_err());
        assert!(kernel_reduction_constant(2, 0.75, 3.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn gamma_recurrence_random(x in 0.05f64..30.0) {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            prop_assert!(rel(lhs, rhs) < 1e-11);
        }

        #[test]
        fn gamma_ds_positive(d in 1u32..6, s in 0.05f64..0.95) {
            prop_assert!(gamma_ds(d, s).unwrap() > 0.0);
        }
    }
}
