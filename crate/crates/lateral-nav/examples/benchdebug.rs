use maze_env::corpus;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xcs_core::{TrialMode, XcsAgent, XcsParams};

use lateral_nav::{HetroAgent, LateralParams};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let trials: u32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10000);
    let seeds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);

    for maze in ["maze7", "littman57", "maze10"] {
        let grid = corpus::load(maze);
        let oracle = grid.optimal_distance_map().mean_over_empty(&grid);
        for kind in ["hetro", "xcs"] {
            let mut all_means = Vec::new();
            let mut all_reach = Vec::new();
            let start = std::time::Instant::now();
            for seed in 0..seeds {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut hetro = HetroAgent::new(XcsParams::default(), LateralParams::default());
                let mut xcs = XcsAgent::new(XcsParams::default());
                let mut tail = Vec::new();
                for i in 0..trials {
                    let mode = if i % 2 == 0 {
                        TrialMode::Explore
                    } else {
                        TrialMode::Exploit
                    };
                    let rec = match kind {
                        "hetro" => hetro.run_trial(&grid, mode, 100, &mut rng),
                        _ => xcs.run_trial(&grid, mode, 100, &mut rng),
                    };
                    if mode == TrialMode::Exploit && i + 200 >= trials {
                        tail.push(rec);
                    }
                }
                let mean =
                    tail.iter().map(|r| f64::from(r.steps)).sum::<f64>() / tail.len() as f64;
                let reach =
                    tail.iter().filter(|r| r.reached_goal).count() as f64 / tail.len() as f64;
                all_means.push(mean);
                all_reach.push(reach);
                if kind == "hetro" {
                    eprintln!(
                        "  {maze} {kind} seed {seed}: mean {mean:.2} reach {reach:.2} policies {} malign {} mism {}",
                        hetro.policies().len(),
                        hetro.policies().iter().filter(|p| p.malign).count(),
                        hetro.policy_mismatches()
                    );
                }
            }
            let mean = all_means.iter().sum::<f64>() / all_means.len() as f64;
            let reach = all_reach.iter().sum::<f64>() / all_reach.len() as f64;
            println!(
                "{maze:<10} {kind:<6} oracle {oracle:.2}  mean {mean:6.2} ({:.2}x)  reach {reach:.3}  [{:.1}s]",
                mean / oracle,
                start.elapsed().as_secs_f64()
            );
        }
    }
}
