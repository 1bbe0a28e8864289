use fracwill_core::constants::{default_log_ladder, mu_log_rate};
use fracwill_core::potential::DoubleWell;
use fracwill_core::profile::{decay_fit, solve_profile, solve_profile_with, SolveOptions, profile_residual};
use std::time::Instant;

fn main() {
    // full-grid decay exponents for the three s values
    for s in [0.6f64, 0.75, 0.9] {
        let t0 = Instant::now();
        let w = solve_profile(&DoubleWell::Quartic, s, 40.0, 4096).unwrap();
        let k0 = decay_fit(&w, 0, (10.0, 20.0)).unwrap();
        let k1 = decay_fit(&w, 1, (10.0, 20.0)).unwrap();
        let k2 = decay_fit(&w, 2, (10.0, 20.0)).unwrap();
        println!(
            "s={s}: residual={:.2e} slopes k0={k0:.3} (want {:.1}) k1={k1:.3} (want {:.1}) k2={k2:.3} (want {:.1})  [{:?}]",
            w.residual_sup, -2.0*s, -1.0-2.0*s, -2.0-2.0*s, t0.elapsed()
        );
    }
    // cosine potential, s = 1/2, vs the arctan layer on the full grid
    let t0 = Instant::now();
    let w = solve_profile(&DoubleWell::Cosine, 0.5, 40.0, 4096).unwrap();
    let mut worst = 0.0f64;
    for i in 0..=400 {
        let z = -10.0 + 20.0 * i as f64 / 400.0;
        worst = worst.max((w.value(z) - 2.0 / std::f64::consts::PI * z.atan()).abs());
    }
    println!("cosine s=1/2: sup|w - arctan layer| = {worst:.2e} [{:?}]", t0.elapsed());
    let res = profile_residual(&w, &DoubleWell::Cosine, (-8.0, 8.0)).unwrap();
    println!("  residual on [-8,8]: {res:.2e}");
    // tall log ladder at s = 3/4
    let t0 = Instant::now();
    let p = solve_profile_with(&DoubleWell::Quartic, 0.75, 40.0, 4096,
        SolveOptions { max_iterations: 50_000, target_residual: 1e-6, refit_every: 100 }).unwrap();
    let seq = mu_log_rate(&p, &default_log_ladder()).unwrap();
    println!("log-rate seq {:?} [{:?}]", seq.iter().map(|q| (q*1e3).round()/1e3).collect::<Vec<_>>(), t0.elapsed());
}
