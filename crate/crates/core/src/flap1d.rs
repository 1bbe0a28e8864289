//! One-dimensional fractional Laplacian: pointwise singular-integral
//! evaluation with analytic far-field tails, and the spectral (Fourier
//! multiplier) evaluation on periodic grids.

use crate::error::{Error, Result};
use crate::quad::{g10, g5, geometric_edges, normalize_edges, refine_around};
use crate::special::gamma_ds;
use crate::tailed::TailedFunction1D;
use rayon::prelude::*;
use rustfft::{num_complex::Complex64, FftPlanner};

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("s must lie in (0, 1), got {s}")));
    }
    Ok(())
}

/// Pointwise `(-d_zz)^s f(x)` by singular-integral quadrature.
///
/// The symmetric second difference removes the principal value; the integral
/// is split into an analytic near-origin core, grid-covered quadrature and an
/// analytic power-law tail.
pub fn flap_pointwise(f: &TailedFunction1D, x: f64, s: f64) -> Result<f64> {
    check_s(s)?;
    if x.abs() > 0.5 * f.half_width() {
        return Err(Error::Range(format!(
            "evaluation point {x} outside [-L/2, L/2] with L = {}",
            f.half_width()
        )));
    }
    Ok(flap_quadrature(f, x, s))
}

/// Same quadrature without the centered-window restriction; used internally
/// for evaluation points deep in the tail region.
pub(crate) fn flap_pointwise_any(f: &TailedFunction1D, x: f64, s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(flap_quadrature(f, x, s))
}

fn flap_quadrature(f: &TailedFunction1D, x: f64, s: f64) -> f64 {
    let gamma = gamma_ds(1, s).expect("s checked");
    let h = f.step();
    let l = f.half_width();
    let fx = f.value(x);
    let second_diff = |y: f64| 2.0 * fx - f.value(x + y) - f.value(x - y);

    // Near-origin core [0, 2h]: the second difference is even in y, so fit
    // a y^2 + b y^4 from D(h), D(2h) and integrate against y^{-1-2s} exactly.
    let d1 = second_diff(h);
    let d2 = second_diff(2.0 * h);
    let a = (16.0 * d1 - d2) / (12.0 * h * h);
    let b = (d2 - 4.0 * d1) / (12.0 * h.powi(4));
    let yc = 2.0 * h;
    let core = a * yc.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s)
        + b * yc.powf(4.0 - 2.0 * s) / (4.0 - 2.0 * s);

    // Grid-covered middle region [2h, y_mid] with panel edges refined around
    // the points where x +- y crosses the grid ends and the origin.
    let y_mid = x.abs() + l;
    let mut edges = geometric_edges(yc, y_mid, (4.0 * (y_mid / yc).log2()).ceil().max(16.0) as usize);
    for c in [(l - x).abs(), (l + x).abs(), x.abs()] {
        refine_around(&mut edges, c, &[0.25, 0.5, 1.0, 2.0, 4.0], yc, y_mid);
    }
    normalize_edges(&mut edges);
    let middle = g10().integrate_panels(&edges, |y| second_diff(y) * y.powf(-1.0 - 2.0 * s));

    // Analytic tail: both x + y and x - y are beyond the grid, so the tail
    // model applies; 40-node log-spaced quadrature out to 1e6, then an exact
    // power-law remainder.
    let y_big = 1e6;
    let tail_edges = geometric_edges(y_mid, y_big, 8);
    let tail = g5().integrate_panels(&tail_edges, |y| {
        (2.0 * fx - f.tail_value(x + y) - f.tail_value(x - y)) * y.powf(-1.0 - 2.0 * s)
    });
    let p = f.tail_exponent;
    let (cm, cp) = f.tail_coefficients;
    let remainder = (2.0 * fx - f.right_limit - f.left_limit) * y_big.powf(-2.0 * s) / (2.0 * s)
        - (cp + cm) * y_big.powf(-p - 2.0 * s) / (p + 2.0 * s);

    gamma * (core + middle + tail + remainder)
}

/// `(-d_zz)^s` of a periodic sample vector via the Fourier symbol `|2 pi xi|^{2s}`.
pub fn flap_spectral(samples: &[f64], period: f64, s: f64) -> Result<Vec<f64>> {
    check_s(s)?;
    let n = samples.len();
    if n == 0 || n & (n - 1) != 0 {
        return Err(Error::Config(format!(
            "sample count must be a power of two, got {n}"
        )));
    }
    if !(period > 0.0) {
        return Err(Error::Config("period must be positive".into()));
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let freq = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 } / period;
        let symbol = (2.0 * std::f64::consts::PI * freq).abs().powf(2.0 * s);
        *c *= symbol;
    }
    ifft.process(&mut buf);
    Ok(buf.into_iter().map(|c| c.re / n as f64).collect())
}

/// Sup of `|(-d_zz)^s f|` over a region strictly inside the grid.
pub fn flap_bound_check(f: &TailedFunction1D, region: (f64, f64), s: f64) -> Result<f64> {
    check_s(s)?;
    let (lo, hi) = region;
    if !(lo < hi) || lo <= -f.half_width() || hi >= f.half_width() {
        return Err(Error::Range(format!(
            "region ({lo}, {hi}) must be strictly inside the grid (+-{})",
            f.half_width()
        )));
    }
    let n = 512;
    let vals: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            flap_quadrature(f, x, s).abs()
        })
        .collect();
    Ok(vals.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PI: f64 = std::f64::consts::PI;

    fn arctan_layer(n: usize, l: f64) -> TailedFunction1D {
        let c = 2.0 / PI;
        TailedFunction1D::from_fn(|z| c * z.atan(), l, n, -1.0, 1.0, 1.0, (c, -c)).unwrap()
    }

    fn cosine_sample(l: f64, n: usize) -> TailedFunction1D {
        // periodic test function with a null tail model; the oscillating true
        // tail integrates to nearly zero against the kernel
        TailedFunction1D::from_fn(|z| (2.0 * PI * z).cos(), l, n, 0.0, 0.0, 1.0, (0.0, 0.0))
            .unwrap()
    }

    #[test]
    fn constant_function_maps_to_zero() {
        let f = TailedFunction1D::from_fn(|_| 3.25, 10.0, 256, 3.25, 3.25, 1.0, (0.0, 0.0)).unwrap();
        for &x in &[-4.0, 0.0, 2.5] {
            assert!(flap_pointwise(&f, x, 0.5).unwrap().abs() < 1e-12);
            assert!(flap_pointwise(&f, x, 0.75).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn arctan_layer_identity_at_one() {
        // (-d_zz)^{1/2} of (2/pi) atan solves the layer equation; value at
        // x = 1 is sin(pi w(1))/pi = 1/pi.
        let f = arctan_layer(4096, 40.0);
        let v = flap_pointwise(&f, 1.0, 0.5).unwrap();
        assert!(
            (v - 1.0 / PI).abs() < 2e-5,
            "got {v}, expected {}",
            1.0 / PI
        );
    }

    #[test]
    fn arctan_layer_matches_adaptive_oracle() {
        // independent oracle: adaptive quadrature of the defining integral
        let s = 0.5;
        let x = 0.7;
        let c = 2.0 / PI;
        let w = |z: f64| c * z.atan();
        let oracle = crate::quad::integrate_adaptive(
            |y| (2.0 * w(x) - w(x + y) - w(x - y)) * y.powf(-2.0),
            1e-7,
            1e7,
            1e-10,
            1e-10,
        )
        .unwrap()
            * gamma_ds(1, s).unwrap();
        let f = arctan_layer(4096, 40.0);
        let v = flap_pointwise(&f, x, s).unwrap();
        assert!((v - oracle).abs() < 2e-5, "got {v}, oracle {oracle}");
    }

    #[test]
    fn rejects_out_of_window_points_and_bad_s() {
        let f = arctan_layer(256, 10.0);
        assert!(flap_pointwise(&f, 7.0, 0.5).is_err());
        assert!(flap_pointwise(&f, 0.0, 1.5).is_err());
    }

    #[test]
    fn spectral_cosine_eigenvalue() {
        for &s in &[0.6, 0.75, 0.9] {
            let n = 256;
            let samples: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).cos()).collect();
            let out = flap_spectral(&samples, 1.0, s).unwrap();
            let lam = (2.0 * PI).powf(2.0 * s);
            for (i, (&o, &v)) in out.iter().zip(&samples).enumerate() {
                assert!((o - lam * v).abs() < 1e-9 * lam, "i = {i}");
            }
        }
    }

    #[test]
    fn spectral_constant_annihilated() {
        let out = flap_spectral(&vec![2.0; 64], 1.0, 0.75).unwrap();
        for v in out {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_rejects_non_power_of_two() {
        assert!(flap_spectral(&vec![0.0; 100], 1.0, 0.75).is_err());
    }

    #[test]
    fn pointwise_and_spectral_agree_on_cosine_modes() {
        // three cosine modes, three s values, sup relative error < 1e-3
        let l = 20.0;
        let n = 4096;
        for &s in &[0.6, 0.75, 0.9] {
            for mode in 1..=3 {
                let m = mode as f64;
                let f = TailedFunction1D::from_fn(
                    |z| (2.0 * PI * m * z).cos(),
                    l,
                    n,
                    0.0,
                    0.0,
                    1.0,
                    (0.0, 0.0),
                )
                .unwrap();
                let lam = (2.0 * PI * m).powf(2.0 * s);
                let mut worst = 0.0f64;
                for i in 0..=8 {
                    let x = -1.0 + 0.25 * i as f64;
                    let exact = lam * (2.0 * PI * m * x).cos();
                    let got = flap_pointwise(&f, x, s).unwrap();
                    worst = worst.max((got - exact).abs());
                }
                assert!(
                    worst / lam < 1e-3,
                    "s = {s}, mode = {mode}: sup rel err {}",
                    worst / lam
                );
            }
        }
    }

    #[test]
    fn parity_is_preserved() {
        // even input -> even output, odd input -> odd output
        let even = cosine_sample(20.0, 2048);
        let odd = arctan_layer(2048, 20.0);
        for &x in &[0.3, 1.1, 2.7] {
            let pe = flap_pointwise(&even, x, 0.75).unwrap();
            let me = flap_pointwise(&even, -x, 0.75).unwrap();
            assert!((pe - me).abs() < 1e-8);
            let po = flap_pointwise(&odd, x, 0.75).unwrap();
            let mo = flap_pointwise(&odd, -x, 0.75).unwrap();
            assert!((po + mo).abs() < 1e-8);
        }
    }

    #[test]
    fn grid_refinement_is_converged() {
        let coarse = arctan_layer(2048, 40.0);
        let fine = arctan_layer(4096, 40.0);
        for &x in &[0.0, 0.5, 1.0, 3.0] {
            let vc = flap_pointwise(&coarse, x, 0.5).unwrap();
            let vf = flap_pointwise(&fine, x, 0.5).unwrap();
            assert!((vc - vf).abs() < 1e-4, "x = {x}: {vc} vs {vf}");
        }
    }

    #[test]
    fn bound_check_on_layers() {
        let f = TailedFunction1D::from_fn(|_| 1.0, 10.0, 256, 1.0, 1.0, 1.0, (0.0, 0.0)).unwrap();
        assert!(flap_bound_check(&f, (-4.0, 4.0), 0.6).unwrap() < 1e-12);
        let layer = arctan_layer(4096, 40.0);
        let b = flap_bound_check(&layer, (-5.0, 5.0), 0.5).unwrap();
        assert!(b <= 1.0 / PI + 1e-3, "bound {b}");
        assert!(b > 0.25); // the sup 1/pi is attained at x = 0
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn spectral_linearity(a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let n = 128;
            let s = 0.8;
            let f: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).cos()).collect();
            let g: Vec<f64> = (0..n).map(|i| (4.0 * PI * i as f64 / n as f64).sin()).collect();
            let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
            let lf = flap_spectral(&f, 1.0, s).unwrap();
            let lg = flap_spectral(&g, 1.0, s).unwrap();
            let lc = flap_spectral(&combo, 1.0, s).unwrap();
            for i in 0..n {
                prop_assert!((lc[i] - (a * lf[i] + b * lg[i])).abs() < 1e-8);
            }
        }
    }
}
