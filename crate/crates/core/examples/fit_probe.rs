use santalo::stability::{l1_over_ball, ScanFamily};
use santalo::transform::GridField;

fn main() {
    let delta = 0.2f64;
    let phi: GridField = ScanFamily::Bump.build_field(2, delta, 8.0, 769).unwrap();
    println!("convex flag: {:?}", phi.convex_flag());
    let r_eps = 0.1472;
    // manual integrand: |x|^2/2 + c - phi(x/t + z), diagonal T = t*I
    let sweep = |c: f64, t: f64| -> f64 {
        let g = |x: &[f64]| {
            let arg = [x[0] / t, x[1] / t];
            let v = phi.eval(&arg);
            if !v.is_finite() {
                return 1e4;
            }
            (0.5 * (x[0] * x[0] + x[1] * x[1]) + c - v).abs()
        };
        l1_over_ball(2, r_eps, 64, &g)
    };
    // c must absorb the bump height ~delta, T the central curvature
    for (c, t) in [
        (0.0, 1.0),
        (delta, 1.0),
        (delta, (1.0f64 - delta / 0.04).abs().sqrt()),
        (0.19, 0.6),
        (0.195, 0.5),
        (0.2, 0.4),
    ] {
        println!("c={c:8.4} t={t:8.4} -> l1 = {:.6e}", sweep(c, t));
    }
    // fine local sweep around the best
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for ci in 0..40 {
        for ti in 0..40 {
            let c = 0.17 + 0.002 * ci as f64;
            let t = 0.3 + 0.02 * ti as f64;
            let v = sweep(c, t);
            if v < best.0 {
                best = (v, c, t);
            }
        }
    }
    println!("sweep best: l1={:.6e} at c={:.4} t={:.4}", best.0, best.1, best.2);
}
