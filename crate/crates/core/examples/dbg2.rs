fn main() {
    use fracwill_core::quad::{g16, geometric_edges, normalize_edges};
    use fracwill_core::special::gamma_fn;
    let pi = std::f64::consts::PI;
    let s = 0.6f64;
    let i0 = 0.5 * pi.sqrt() * gamma_fn(s + 0.5).unwrap() / gamma_fn(s + 1.0).unwrap();
    for m in [1.0e5f64, 12.0f64.exp() * 0.999, 12.0f64.exp()] {
        let m2 = m * m;
        let panels = 26 + (2.2 * m.ln()) as usize;
        let mut edges = vec![0.0];
        edges.extend(geometric_edges(pi / (2.0 * 1e7 * m), pi / 2.0, panels));
        normalize_edges(&mut edges);
        let delta = g16().integrate_panels(&edges, |psi: f64| {
            let tn = psi.tan();
            let t2 = tn * tn;
            let sec2 = 1.0 + t2;
            let base = (1.0 + t2).powf(-1.0 - s);
            let g = s * (m2 * t2).ln_1p() - (1.0 + s) * (m2 * t2 / (1.0 + t2)).ln_1p();
            base * g.exp_m1() * sec2
        });
        let it = i0 + delta;
        let asym = 0.5 * pi / m;
        println!("m={m:.4e}: I={it:.8e} asym={asym:.8e} rel={:.3e}", (it - asym)/asym);
    }
}
