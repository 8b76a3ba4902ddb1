use maze_env::corpus;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xcs_core::{TrialMode, XcsParams};

use lateral_nav::{HetroAgent, LateralParams};

fn main() {
    let grid = corpus::load("maze10");
    let dmap = grid.optimal_distance_map();
    let mut agent = HetroAgent::new(XcsParams::default(), LateralParams::default());
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    let mut explore_reach = [0u32; 10];
    let mut explore_count = [0u32; 10];
    for i in 0..10000u32 {
        let mode = if i % 2 == 0 {
            TrialMode::Explore
        } else {
            TrialMode::Exploit
        };
        let rec = agent.run_trial(&grid, mode, 100, &mut rng);
        if mode == TrialMode::Explore {
            let bucket = (i / 1000) as usize;
            explore_count[bucket] += 1;
            if rec.reached_goal {
                explore_reach[bucket] += 1;
            }
        }
    }
    println!("explore reach rate per 1000-trial bucket:");
    for b in 0..10 {
        println!(
            "  bucket {b}: {:.2}",
            f64::from(explore_reach[b]) / f64::from(explore_count[b])
        );
    }

    println!("\npolicy store ({} total):", agent.policies().len());
    let mut by_len: Vec<u32> = agent.policies().iter().map(|p| p.expected_steps()).collect();
    by_len.sort();
    println!("  lengths: {by_len:?}");

    // per-start probe: clone the agent, run exploit from each cell
    println!("\nper-start exploit probe (steps / oracle, * = capped, !=no policy cover):");
    for pos in grid.empty_cells() {
        let s = grid.sense(pos).unwrap();
        let covered = agent.policies().iter().any(|p| {
            !p.malign
                && p.steps
                    .iter()
                    .any(|st| st.root.sensation == s)
        });
        let mut probe = agent.clone();
        let mut prng = ChaCha8Rng::seed_from_u64(99);
        let rec = probe.run_trial_from(&grid, pos, TrialMode::Exploit, 100, &mut prng);
        let d = dmap.distance(pos).unwrap();
        println!(
            "  {pos} d={d:<2} steps={:<3}{}{}  mism+{}",
            rec.steps,
            if rec.reached_goal { " " } else { "*" },
            if covered { " " } else { "!" },
            probe.policy_mismatches() - agent.policy_mismatches(),
        );
    }
}
