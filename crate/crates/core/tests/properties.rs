use girthlab::ball::Ball;
use girthlab::certificate::{CertEntry, Relation, Status};
use girthlab::config::Config;
use girthlab::group::GroupSpec;
use girthlab::kernel;
use girthlab::par::run_trials;
use girthlab::perc::cluster::{ball_partition_bfs, ball_partition_union_find, invasion_bottlenecks, root_cluster_in_ball};
use girthlab::rng::edge_key;
use girthlab::saw::census::enumerate_saw;
use girthlab::stats::wilson_interval;
use num_bigint::BigUint;
use proptest::prelude::*;

const SPECS: [&str; 6] = ["Z*Z", "Z2*Z2*Z2", "Z5*Z5", "Z3*Z3", "Z3*Z", "Z4*Z2"];

fn any_spec() -> impl Strategy<Value = GroupSpec> {
    prop::sample::select(SPECS.to_vec()).prop_map(|s| GroupSpec::parse(s).unwrap())
}

/// Component labels rewritten as first-occurrence indices.
fn canonical(labels: &[u32]) -> Vec<usize> {
    let mut seen = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = seen.len();
            *seen.entry(*l).or_insert(next)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn word_products_invert(spec in any_spec(), gens in prop::collection::vec(0usize..8, 0..12)) {
        let d = spec.degree();
        let mut w = girthlab::group::Word::identity();
        for g in &gens {
            w = spec.mul_generator(&w, g % d);
        }
        prop_assert!(spec.mul(&w, &spec.inverse(&w)).is_identity());
        prop_assert!(spec.word_length(&w) as usize <= gens.len());
        let printed = spec.format_word(&w);
        prop_assert_eq!(spec.parse_word(&printed).unwrap(), w);
    }

    #[test]
    fn ball_distance_is_word_length(spec in any_spec()) {
        let b = Ball::build(&spec, 4).unwrap();
        for v in 0..b.len() as u32 {
            prop_assert_eq!(b.dist(v), spec.word_length(b.word(v)));
        }
    }

    #[test]
    fn edge_keys_are_symmetric(a in any::<u64>(), b in any::<u64>()) {
        prop_assert_eq!(edge_key(a, b), edge_key(b, a));
    }

    #[test]
    fn union_find_matches_bfs(spec in any_spec(), p in 0.0f64..1.0, seed in any::<u64>(), trial in 0u64..100) {
        let b = Ball::build(&spec, 4).unwrap();
        let uf = ball_partition_union_find(&b, p, seed, trial);
        let bfs = ball_partition_bfs(&b, p, seed, trial);
        prop_assert_eq!(canonical(&uf), canonical(&bfs));
    }

    #[test]
    fn clusters_grow_with_p(spec in any_spec(), p1 in 0.0f64..1.0, p2 in 0.0f64..1.0, seed in any::<u64>()) {
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let b = Ball::build(&spec, 4).unwrap();
        let small = root_cluster_in_ball(&b, lo, seed, 0);
        let big = root_cluster_in_ball(&b, hi, seed, 0);
        prop_assert!(small.iter().zip(&big).all(|(&s, &g)| !s || g));
    }

    #[test]
    fn bottlenecks_increase_with_radius(spec in any_spec(), seed in any::<u64>(), trial in 0u64..50) {
        let b = invasion_bottlenecks(&spec, seed, trial, &[1, 2, 4, 6]);
        prop_assert!(b.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn trials_ignore_worker_count(trials in 0u64..200, workers in 1usize..9, seed in any::<u64>()) {
        let f = |t: u64| girthlab::rng::trial_key(seed, t);
        prop_assert_eq!(run_trials(trials, Some(1), f), run_trials(trials, Some(workers), f));
    }

    #[test]
    fn kernel_rows_are_distributions(spec in any_spec(), steps in 0usize..6) {
        let b = Ball::build(&spec, 6).unwrap();
        let t = kernel::srw_kernel(&b, steps);
        let e = kernel::srw_kernel_exact(&b, steps).unwrap();
        for n in 0..=steps {
            prop_assert!((t.mass(n) - 1.0).abs() < 1e-12);
            prop_assert!(t.row(n).iter().all(|&x| (0.0..=1.0).contains(&x)));
            prop_assert_eq!(e.row(n).iter().sum::<u128>(), e.denominator(n));
        }
        if spec.degree() >= 3 {
            let q = kernel::nbw_kernel_exact(&b, steps).unwrap();
            for n in 0..=steps {
                prop_assert_eq!(q.row(n).iter().sum::<u128>(), q.denominator(n));
            }
        }
    }

    #[test]
    fn census_invariants(spec in any_spec(), n in 1usize..7) {
        let b = Ball::build(&spec, n).unwrap();
        let c = enumerate_saw(&b, n).unwrap();
        prop_assert!(c.submultiplicativity_violation().is_none());
        for k in 0..=n {
            let s: u64 = c.endpoint[k].iter().sum();
            prop_assert_eq!(BigUint::from(s), c.count(k).clone());
            prop_assert!(c.count(k) <= &c.nbw_count(k));
            // Every endpoint is within distance k.
            for (v, &m) in c.endpoint[k].iter().enumerate() {
                prop_assert!(m == 0 || c.dist[v] as usize <= k);
            }
        }
    }

    #[test]
    fn wilson_brackets_the_estimate(n in 1u64..10_000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(k, n, 1.96);
        let est = k as f64 / n as f64;
        prop_assert!(lo <= est && est <= hi);
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
    }

    #[test]
    fn entry_status_follows_relation(lhs in -10.0f64..10.0, rhs in -10.0f64..10.0) {
        for rel in [Relation::Less, Relation::LessEq, Relation::GreaterEq, Relation::Greater] {
            let e = CertEntry::compare("x", "g", "a", rel, lhs, rhs);
            let expected = if rel.holds(lhs, rhs) { Status::Pass } else { Status::Fail };
            prop_assert_eq!(e.status, expected);
        }
    }

    #[test]
    fn config_round_trips(
        entries in prop::collection::vec(
            ("(|[a-z]{1,6})", "[a-zA-Z_][a-zA-Z0-9_.*]{0,8}", "[a-zA-Z0-9_.,*:-]{1,10}"),
            0..12,
        )
    ) {
        let mut c = Config::new();
        for (section, key, value) in &entries {
            c.set(section, key, value.as_str());
        }
        let text = c.to_string();
        prop_assert_eq!(Config::parse(&text).unwrap(), c);
    }
}
