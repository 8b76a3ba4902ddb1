//! On a Markov maze (no aliased states) the baseline must learn the
//! optimal policy: exploit-mode steps converge to the shortest-path mean.

use maze_env::corpus;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xcs_core::{TrialMode, XcsAgent, XcsParams};

#[test]
fn baseline_converges_on_the_alias_free_sample_maze() {
    let grid = corpus::load("sample");
    let oracle = grid.optimal_distance_map().mean_over_empty(&grid);

    let mut exploit_steps = Vec::new();
    for seed in 0..5u64 {
        let mut agent = XcsAgent::new(XcsParams::default());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tail = Vec::new();
        for trial in 0..2000 {
            let mode = if trial % 2 == 0 {
                TrialMode::Explore
            } else {
                TrialMode::Exploit
            };
            let rec = agent.run_trial(&grid, mode, 100, &mut rng);
            if mode == TrialMode::Exploit && trial >= 1800 {
                tail.push(f64::from(rec.steps));
                assert!(rec.reached_goal, "late exploit trial failed (seed {seed})");
            }
        }
        exploit_steps.extend(tail);
    }
    let mean = exploit_steps.iter().sum::<f64>() / exploit_steps.len() as f64;
    assert!(
        mean <= oracle * 1.10,
        "exploit mean {mean:.3} vs oracle {oracle:.3}"
    );
}
