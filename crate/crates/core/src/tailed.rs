//! Sampled functions on a uniform symmetric grid with an attached power-law
//! tail model for evaluation beyond the grid.

use crate::error::{Error, Result};

/// A function sampled on the uniform symmetric grid `[-L, L]` together with
/// its limits at infinity and a power-law model of the approach to them:
/// `f(z) ~ right_limit + c_plus * z^{-p}` for `z > L` and
/// `f(z) ~ left_limit + c_minus * |z|^{-p}` for `z < -L`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailedFunction1D {
    values: Vec<f64>,
    half_width: f64,
    step: f64,
    pub left_limit: f64,
    pub right_limit: f64,
    pub tail_exponent: f64,
    /// (c_minus, c_plus)
    pub tail_coefficients: (f64, f64),
}

impl TailedFunction1D {
    /// Wraps `n + 1` samples on the grid `z_i = -L + 2 L i / n`; `n` must be even
    /// so that the origin is a node.
    pub fn from_samples(
        values: Vec<f64>,
        half_width: f64,
        left_limit: f64,
        right_limit: f64,
        tail_exponent: f64,
        tail_coefficients: (f64, f64),
    ) -> Result<Self> {
        if values.len() < 5 || (values.len() - 1) % 2 != 0 {
            return Err(Error::Config(format!(
                "need an odd sample count >= 5 (even interval count), got {}",
                values.len()
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Config("grid half-width must be positive".into()));
        }
        if !(tail_exponent > 0.0) {
            return Err(Error::Config("tail exponent must be positive".into()));
        }
        let step = 2.0 * half_width / (values.len() - 1) as f64;
        Ok(TailedFunction1D {
            values,
            half_width,
            step,
            left_limit,
            right_limit,
            tail_exponent,
            tail_coefficients,
        })
    }

    /// Samples a closure on the grid.
    pub fn from_fn<F: Fn(f64) -> f64>(
        f: F,
        half_width: f64,
        intervals: usize,
        left_limit: f64,
        right_limit: f64,
        tail_exponent: f64,
        tail_coefficients: (f64, f64),
    ) -> Result<Self> {
        if intervals % 2 != 0 || intervals < 4 {
            return Err(Error::Config("interval count must be even and >= 4".into()));
        }
        let step = 2.0 * half_width / intervals as f64;
        let values = (0..=intervals).map(|i| f(-half_width + step * i as f64)).collect();
        Self::from_samples(
            values,
            half_width,
            left_limit,
            right_limit,
            tail_exponent,
            tail_coefficients,
        )
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn grid_point(&self, i: usize) -> f64 {
        -self.half_width + self.step * i as f64
    }

    /// Tail-model value for |z| beyond the grid.
    pub fn tail_value(&self, z: f64) -> f64 {
        let p = self.tail_exponent;
        if z >= 0.0 {
            self.right_limit + self.tail_coefficients.1 * z.abs().powf(-p)
        } else {
            self.left_limit + self.tail_coefficients.0 * z.abs().powf(-p)
        }
    }

    fn node_or_tail(&self, i: isize) -> f64 {
        let n = self.values.len() as isize - 1;
        if i < 0 || i > n {
            self.tail_value(-self.half_width + self.step * i as f64)
        } else {
            self.values[i as usize]
        }
    }

    /// Fourth-order node slope; virtual nodes come from the tail model.
    fn node_slope(&self, i: isize) -> f64 {
        (self.node_or_tail(i - 2) - 8.0 * self.node_or_tail(i - 1)
            + 8.0 * self.node_or_tail(i + 1)
            - self.node_or_tail(i + 2))
            / (12.0 * self.step)
    }

    fn hermite_cell(&self, z: f64) -> (usize, f64, f64, f64, f64, f64) {
        let n = self.values.len() - 1;
        let t = (z + self.half_width) / self.step;
        let i = (t.floor() as isize).clamp(0, n as isize - 1) as usize;
        let u = t - i as f64;
        let v0 = self.values[i];
        let v1 = self.values[i + 1];
        let m0 = self.node_slope(i as isize) * self.step;
        let m1 = self.node_slope(i as isize + 1) * self.step;
        (i, u, v0, v1, m0, m1)
    }

    /// Evaluates the function: C^1 cubic Hermite interpolation on the grid
    /// (fourth-order node slopes), tail model outside.
    pub fn value(&self, z: f64) -> f64 {
        if z.abs() > self.half_width {
            return self.tail_value(z);
        }
        let (_, u, v0, v1, m0, m1) = self.hermite_cell(z);
        let u2 = u * u;
        let u3 = u2 * u;
        v0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + m0 * (u3 - 2.0 * u2 + u)
            + v1 * (-2.0 * u3 + 3.0 * u2)
            + m1 * (u3 - u2)
    }

    /// Exact derivative of the evaluation: the differentiated Hermite
    /// interpolant on the grid, the differentiated tail model outside.
    pub fn derivative(&self, z: f64) -> f64 {
        let p = self.tail_exponent;
        if z.abs() > self.half_width {
            let (cm, cp) = self.tail_coefficients;
            return if z >= 0.0 {
                -p * cp * z.abs().powf(-p - 1.0)
            } else {
                p * cm * z.abs().powf(-p - 1.0)
            };
        }
        let (_, u, v0, v1, m0, m1) = self.hermite_cell(z);
        let u2 = u * u;
        (v0 * (6.0 * u2 - 6.0 * u)
            + m0 * (3.0 * u2 - 4.0 * u + 1.0)
            + v1 * (-6.0 * u2 + 6.0 * u)
            + m1 * (3.0 * u2 - 2.0 * u))
            / self.step
    }

    /// Checks the tail consistency band at the grid ends:
    /// `|value(+-L) - limit| <= 1.5 |c| L^{-p}`.
    pub fn tail_consistent(&self) -> bool {
        let p = self.tail_exponent;
        let scale = self.half_width.powf(-p);
        let right = (self.values[self.values.len() - 1] - self.right_limit).abs()
            <= 1.5 * self.tail_coefficients.1.abs() * scale + 1e-14;
        let left = (self.values[0] - self.left_limit).abs()
            <= 1.5 * self.tail_coefficients.0.abs() * scale + 1e-14;
        left && right
    }
}
