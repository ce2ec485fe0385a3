use santalo::stability::{stability_scan, ScanFamily};
use santalo::weights::{validate_weight, WeightSpec};

fn main() {
    let w = validate_weight(&WeightSpec::Exp { rate: 1.0 }).unwrap();
    let nodes: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1153);
    let cases = [
        (ScanFamily::TruncatedQuadratic, vec![0.2, 0.13, 0.085, 0.055, 0.036, 0.023]),
        (ScanFamily::Bump, vec![0.048, 0.036, 0.027, 0.020, 0.015, 0.011]),
    ];
    for (family, deltas) in cases {
        let t = std::time::Instant::now();
        let curve = stability_scan(&w, family, 2, &deltas, 8.0, nodes).unwrap();
        println!(
            "== {} (exponent {:.4}, C {:.4e}, eps_mono {}, d_mono {}, degenerate {}) [{:.1}s]",
            curve.family_id, curve.fitted_exponent, curve.fitted_constant,
            curve.eps_monotone, curve.d_monotone, curve.degenerate, t.elapsed().as_secs_f64()
        );
        for p in &curve.points {
            println!(
                "  delta {:9.5}  eps {:12.5e}  R {:8.4}  l1 {:12.5e} (floor {:9.2e}, resolved {:12.5e})  l1d {:12.5e}",
                p.delta, p.eps, p.r_eps, p.l1_primal, p.l1_floor, p.l1_resolved(), p.l1_dual
            );
        }
    }
}
