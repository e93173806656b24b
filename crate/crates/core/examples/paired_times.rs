//! Developer harness: per-seed paired travel times for aHJB vs oHJB with
//! power control, at the candidate conditioning knobs.

use ohjb_core::hjb::{OmegaStep, TimeDerivative};
use ohjb_core::protocol::Algorithm;
use ohjb_core::sim::run_batch;
use ohjb_core::SimConfig;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let kick: f64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let amax: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(12.0);
    let kx: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.005);
    let kv: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.05);

    let seeds: Vec<u64> = (0..20).collect();
    let mut mk = |algo| {
        let mut cfg = SimConfig::default();
        cfg.protocol.algo = algo;
        cfg.learn.omega_step = OmegaStep::Clipped(kick);
        cfg.learn.feature_scale = [kx, kx, kv, kv];
        cfg.dynamics.a_max = amax;
        cfg.learn.dpsi_dt = TimeDerivative::BackwardDifference;
        run_batch(&cfg, &seeds).unwrap().0
    };
    let a = mk(Algorithm::Ahjb);
    let o = mk(Algorithm::Ohjb);

    let mut common_a = Vec::new();
    let mut common_o = Vec::new();
    for (ra, ro) in a.iter().zip(&o) {
        let ta = ra.summary.travel_time_s;
        let to = ro.summary.travel_time_s;
        println!(
            "seed {:2}: aHJB {:>8} oHJB {:>8}",
            ra.summary.seed,
            ta.map(|t| format!("{t:.1}")).unwrap_or("---".into()),
            to.map(|t| format!("{t:.1}")).unwrap_or("---".into()),
        );
        if let (Some(ta), Some(to)) = (ta, to) {
            common_a.push(ta);
            common_o.push(to);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!(
        "common-seed means ({} seeds): aHJB {:.1} oHJB {:.1}",
        common_a.len(),
        mean(&common_a),
        mean(&common_o)
    );
}
