//! The recovery field `u(x) = w(beta(x) / eps)`: the optimal profile composed
//! with the smoothed signed distance of a planar curve.

use crate::error::{Error, Result};
use crate::geometry::{SmoothedDistance, Vec2};
use crate::profile::SampledProfile;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct RecoveryField {
    pub sd: SmoothedDistance,
    pub profile: Arc<SampledProfile>,
    pub epsilon: f64,
}

impl RecoveryField {
    pub fn new(sd: SmoothedDistance, profile: Arc<SampledProfile>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < sd.delta) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, delta) with delta = {}, got {epsilon}",
                sd.delta
            )));
        }
        Ok(RecoveryField { sd, profile, epsilon })
    }

    pub fn s(&self) -> f64 {
        self.profile.s
    }

    /// Field value at a point of the plane.
    pub fn value(&self, p: Vec2) -> f64 {
        self.profile.value(self.sd.value(p) / self.epsilon)
    }

    /// Field value as a function of the signed distance (exact for circles,
    /// where the field is radial).
    pub fn value_of_distance(&self, d: f64) -> f64 {
        self.profile.value(self.sd.of_distance(d) / self.epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PlanarCurve;
    use crate::potential::DoubleWell;
    use crate::profile::{solve_profile_with, SolveOptions};
    use std::sync::LazyLock;

    static P075: LazyLock<Arc<SampledProfile>> = LazyLock::new(|| {
        Arc::new(
            solve_profile_with(
                &DoubleWell::Quartic,
                0.75,
                30.0,
                1536,
                SolveOptions { max_iterations: 30_000, target_residual: 3e-6, refit_every: 100 },
            )
            .unwrap(),
        )
    });

    fn unit_circle_field(eps: f64) -> RecoveryField {
        let curve = PlanarCurve::circle(1.0).unwrap();
        let sd = SmoothedDistance::default_for(curve).unwrap();
        RecoveryField::new(sd, P075.clone(), eps).unwrap()
    }

    #[test]
    fn vanishes_on_the_curve_and_stays_in_range() {
        let f = unit_circle_field(0.05);
        // exactly zero as a function of the distance; curve points carry
        // only the rounding of the distance itself
        assert_eq!(f.value_of_distance(0.0), 0.0);
        for i in 0..16 {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 16.0;
            let p = f.sd.curve.point_at(t);
            assert!(f.value(p).abs() < 1e-13);
        }
        for &r in &[0.0, 0.3, 0.8, 0.99, 1.01, 1.4, 3.0] {
            let v = f.value(Vec2::new(r, 0.0));
            assert!(v > -1.0 && v < 1.0, "r = {r}: {v}");
        }
    }

    #[test]
    fn increasing_along_inward_normals() {
        let f = unit_circle_field(0.05);
        let t = 0.7;
        let curve = f.sd.curve;
        let mut prev = -2.0;
        for i in 0..=40 {
            let z = -0.8 + 1.6 * i as f64 / 40.0;
            let p = curve.point_at(t) + curve.normal_in(t) * z;
            let v = f.value(p);
            assert!(v > prev, "z = {z}");
            prev = v;
        }
    }

    #[test]
    fn far_field_gap_follows_the_tail_law() {
        let eps = 0.05;
        let curve = PlanarCurve::circle(4.0).unwrap();
        let sd = SmoothedDistance::default_for(curve).unwrap();
        let f = RecoveryField::new(sd, P075.clone(), eps).unwrap();
        let delta = f.sd.delta;
        // at dist = 10 delta the ramp has saturated: |u - 1| = |w(1/eps) - 1|
        let p = Vec2::new(4.0 - 10.0 * delta, 0.0);
        let gap = (f.value(p) - 1.0).abs();
        let c = f.profile.fun.tail_coefficients.1.abs();
        assert!(gap <= 1.5 * c * eps.powf(1.5), "gap {gap}");
        assert!(gap > 0.0);
    }

    #[test]
    fn rejects_epsilon_outside_range() {
        let curve = PlanarCurve::circle(1.0).unwrap();
        let sd = SmoothedDistance::default_for(curve).unwrap();
        assert!(RecoveryField::new(sd, P075.clone(), 0.25).is_err());
        assert!(RecoveryField::new(sd, P075.clone(), 0.0).is_err());
    }
}
