//! Developer harness: audit the opportunistic-switch conditions round by
//! round for a candidate configuration.

use ohjb_core::hjb::{OmegaStep, TimeDerivative};
use ohjb_core::protocol::{Algorithm, ControllerMode};
use ohjb_core::sim::run_batch;
use ohjb_core::SimConfig;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let base: u64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(0);
    let seeds: Vec<u64> = (base..base + 20).collect();

    let mut cfg = SimConfig::default();
    cfg.protocol.algo = Algorithm::Ohjb;
    cfg.learn.omega_step = OmegaStep::Clipped(0.02);
    cfg.learn.feature_scale = [0.008, 0.008, 0.03, 0.03];
    cfg.learn.dpsi_dt = TimeDerivative::BackwardDifference;
    cfg.dynamics.a_max = 1.5;

    let (results, stats) = run_batch(&cfg, &seeds).unwrap();
    for r in &results {
        let s = &r.summary;
        let switch_round = r.rounds.iter().find(|o| o.mode == ControllerMode::ModelUpload);
        let detail = switch_round
            .map(|o| {
                format!(
                    "t_o {:.1} dn {} window_mean {:?}",
                    o.t_start, o.dn_after, o.window_mean
                )
            })
            .unwrap_or_else(|| "never".into());
        let transitions = r
            .series
            .windows(2)
            .filter(|p| p[0].mode != p[1].mode)
            .count();
        println!(
            "seed {:2}: reached {} T {:?} E {:.1} switch {:?} transitions {} | {}",
            s.seed, s.reached, s.travel_time_s, s.final_energy, s.switch_time_s, transitions, detail
        );
    }
    println!(
        "reach {:.2} meanT {:?} meanSw {:?}",
        stats.reach_rate, stats.mean_travel_time_s, stats.mean_switch_time_s
    );
}
