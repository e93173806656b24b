//! Developer harness: grid-search the conditioning knobs and report which
//! cells satisfy the end-to-end comparison predicates on seeds 0..19.

use ohjb_core::hjb::{OmegaStep, TimeDerivative};
use ohjb_core::protocol::Algorithm;
use ohjb_core::sim::{run_batch, BatchStats, SimResult};
use ohjb_core::SimConfig;

struct Cell {
    results: Vec<SimResult>,
    stats: BatchStats,
}

fn eval(
    algo: Algorithm,
    pc: bool,
    kick: f64,
    amax: f64,
    kx: f64,
    kv: f64,
    dpsi: TimeDerivative,
    seeds: &[u64],
) -> Cell {
    let mut cfg = SimConfig::default();
    cfg.protocol.algo = algo;
    cfg.protocol.power_control = pc;
    cfg.learn.omega_step = OmegaStep::Clipped(kick);
    cfg.learn.feature_scale = [kx, kx, kv, kv];
    cfg.learn.dpsi_dt = dpsi;
    cfg.dynamics.a_max = amax;
    let (results, stats) = run_batch(&cfg, seeds).expect("valid config");
    Cell { results, stats }
}

fn main() {
    let seeds: Vec<u64> = (0..20).collect();
    let kicks = [0.015, 0.02, 0.03, 0.05];
    let amaxes = [1.0, 1.5, 2.0, 3.0, 5.0];
    let kxs = [0.003, 0.005, 0.008];
    let kvs = [0.03, 0.05, 0.1];
    let dpsis = [
        TimeDerivative::BackwardDifference,
        TimeDerivative::Stationary,
    ];

    for dpsi in dpsis {
        for &kick in &kicks {
            for &amax in &amaxes {
                for &kx in &kxs {
                    for &kv in &kvs {
                        let a_pc = eval(Algorithm::Ahjb, true, kick, amax, kx, kv, dpsi, &seeds);
                        let m_pc = eval(Algorithm::Mhjb, true, kick, amax, kx, kv, dpsi, &seeds);
                        let o_pc = eval(Algorithm::Ohjb, true, kick, amax, kx, kv, dpsi, &seeds);
                        let a_np = eval(Algorithm::Ahjb, false, kick, amax, kx, kv, dpsi, &seeds);
                        let m_np = eval(Algorithm::Mhjb, false, kick, amax, kx, kv, dpsi, &seeds);
                        let o_np = eval(Algorithm::Ohjb, false, kick, amax, kx, kv, dpsi, &seeds);

                        let reach = |c: &Cell| c.stats.reach_rate;
                        let mt = |c: &Cell| c.stats.mean_travel_time_s.unwrap_or(f64::INFINITY);
                        let me = |c: &Cell| c.stats.mean_final_energy.unwrap_or(f64::INFINITY);

                        let c7 = reach(&a_pc) >= 0.9
                            && reach(&m_pc) >= 0.9
                            && reach(&o_pc) >= 0.9
                            && mt(&o_pc) < mt(&a_pc)
                            && mt(&o_pc) < mt(&m_pc)
                            && me(&o_pc) <= me(&a_pc);
                        let c8 = reach(&o_np) > reach(&a_np)
                            && reach(&o_np) > reach(&m_np)
                            && mt(&o_np) > mt(&o_pc);
                        let all_switch = o_pc
                            .results
                            .iter()
                            .filter(|r| r.summary.reached)
                            .all(|r| r.summary.switch_time_s.is_some());
                        let c9 = all_switch && reach(&o_pc) > 0.0;

                        let marker = match (c7, c8, c9) {
                            (true, true, true) => " <<< ALL",
                            (true, _, true) => " <<< C7+C9",
                            _ => "",
                        };
                        println!(
                            "dpsi={dpsi:?} kick={kick} amax={amax} kx={kx} kv={kv} | C7={c7} C8={c8} C9={c9} | aT {:.1} mT {:.1} oT {:.1} | aE {:.1} oE {:.1} | reach a/m/o pc {:.2}/{:.2}/{:.2} nopc {:.2}/{:.2}/{:.2} | oT_nopc {:.1}{marker}",
                            mt(&a_pc), mt(&m_pc), mt(&o_pc),
                            me(&a_pc), me(&o_pc),
                            reach(&a_pc), reach(&m_pc), reach(&o_pc),
                            reach(&a_np), reach(&m_np), reach(&o_np),
                            mt(&o_np),
                        );
                    }
                }
            }
        }
    }
}
