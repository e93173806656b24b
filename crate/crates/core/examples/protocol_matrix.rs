//! Developer harness: run the three protocols over a seed batch, with and
//! without power control, and print the statistics the end-to-end
//! comparisons care about.
//!
//! ```text
//! cargo run --release -p ohjb-core --example protocol_matrix -- [seeds] [kick] [amax] [kx] [kv] [dpsi]
//! ```

use ohjb_core::hjb::{OmegaStep, TimeDerivative};
use ohjb_core::protocol::Algorithm;
use ohjb_core::sim::run_batch;
use ohjb_core::SimConfig;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let nseeds: u64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(20);
    let kick: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let amax: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5.0);
    let kx: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.005);
    let kv: f64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let dpsi = match args.get(5).map(String::as_str) {
        Some("st") => TimeDerivative::Stationary,
        _ => TimeDerivative::BackwardDifference,
    };
    let base: u64 = args.get(6).and_then(|s| s.parse().ok()).unwrap_or(0);

    let seeds: Vec<u64> = (base..base + nseeds).collect();
    println!("seeds={base}..{} kick={kick} amax={amax} kx={kx} kv={kv} dpsi={dpsi:?}", base + nseeds);

    for algo in [Algorithm::Ahjb, Algorithm::Mhjb, Algorithm::Ohjb] {
        for pc in [true, false] {
            let mut cfg = SimConfig::default();
            cfg.protocol.algo = algo;
            cfg.protocol.power_control = pc;
            cfg.learn.omega_step = OmegaStep::Clipped(kick);
            cfg.learn.feature_scale = [kx, kx, kv, kv];
            cfg.learn.dpsi_dt = dpsi;
            cfg.dynamics.a_max = amax;
            let (results, stats) = run_batch(&cfg, &seeds).expect("valid config");
            let switched = results
                .iter()
                .filter(|r| r.summary.switch_time_s.is_some())
                .count();
            let reached_and_switched = results
                .iter()
                .filter(|r| r.summary.reached && r.summary.switch_time_s.is_some())
                .count();
            let reached = results.iter().filter(|r| r.summary.reached).count();
            let failed: Vec<u64> = results
                .iter()
                .filter(|r| !r.summary.reached)
                .map(|r| r.summary.seed)
                .collect();
            println!(
                "{algo} pc={pc}: reach {reached}/{} meanT {:?} medT {:?} meanE {:?} switch {switched} (reached&switched {reached_and_switched}) meanSw {:?} failed {failed:?}",
                seeds.len(),
                stats.mean_travel_time_s.map(|v| (v * 10.0).round() / 10.0),
                stats.median_travel_time_s.map(|v| (v * 10.0).round() / 10.0),
                stats.mean_final_energy.map(|v| (v * 10.0).round() / 10.0),
                stats.mean_switch_time_s.map(|v| (v * 10.0).round() / 10.0),
            );
        }
    }
}
