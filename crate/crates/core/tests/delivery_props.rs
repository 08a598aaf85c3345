use famsec_core::delivery::{build_mdp, generate_network, sample_admissible, GeneratorKind, GeneratorParams, RandomTaskSampler};
use famsec_core::rollout::{monte_carlo, summarize};
use famsec_core::solver::SolverSpec;
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = GeneratorKind> {
    prop::sample::select(GeneratorKind::RANDOM.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn distances_are_symmetric(kind in kind(), n in 8usize..30, seed: u64) {
        let net = generate_network(kind, n, &GeneratorParams::default(), seed).unwrap();
        prop_assert!(net.is_connected());
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(net.shortest_path_distance(a, b), net.shortest_path_distance(b, a));
            }
        }
    }

    #[test]
    fn compiled_rows_sum_to_one_and_rewards_are_known(n in 8usize..=20, seed: u64) {
        let sampler = RandomTaskSampler { n_range: (n, n), ..RandomTaskSampler::default() };
        let (task, _) = sample_admissible(&sampler, 0, seed, 100).unwrap();
        let mdp = build_mdp(&task).unwrap();
        let r = task.params.rewards;
        let spec = mdp.spec();
        for s in 0..spec.num_states() {
            for row in spec.rows(s) {
                let sum: f64 = row.outcomes.iter().map(|t| t.prob).sum();
                prop_assert!((sum - 1.0).abs() <= 1e-9);
                for t in &row.outcomes {
                    prop_assert!((0.0..=1.0).contains(&t.prob));
                    prop_assert!([r.goal, r.caught, r.loiter, 0.0].contains(&t.reward), "reward {}", t.reward);
                }
            }
        }
    }

    #[test]
    fn rewards_stay_in_bounds_and_summaries_are_exact(seed: u64) {
        let (task, _) = sample_admissible(&RandomTaskSampler::default(), 0, seed, 100).unwrap();
        let mdp = build_mdp(&task).unwrap();
        let policy = SolverSpec::Vi.policy(&mdp, seed).unwrap();
        let samples = monte_carlo(&mdp, &policy, 200, seed).unwrap();
        let p = task.params;
        let lo = f64::from(p.t_max) * p.rewards.loiter + p.rewards.caught;
        prop_assert!(samples.values.iter().all(|v| (lo..=p.rewards.goal).contains(v)));
        let s = summarize(&samples.values, 10).unwrap();
        let mean = samples.values.iter().sum::<f64>() / samples.values.len() as f64;
        prop_assert!((s.mean - mean).abs() <= 1e-9 * mean.abs().max(1.0));
        prop_assert!(s.min <= s.mean && s.mean <= s.max);
        prop_assert_eq!(s.histogram.total(), 200);
    }
}

#[test]
fn monte_carlo_ignores_thread_count() {
    let (task, _) = sample_admissible(&RandomTaskSampler::default(), 3, 11, 100).unwrap();
    let mdp = build_mdp(&task).unwrap();
    let solver = SolverSpec::mcts(3, 50, 1000.0);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| monte_carlo(&mdp, &solver.policy(&mdp, 5).unwrap(), 64, 7).unwrap())
    };
    assert_eq!(run(1), run(3));
}
