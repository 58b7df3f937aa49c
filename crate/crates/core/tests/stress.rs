mod common;
use persuasion_core::dp::{evaluate_strategy, extract_strategy, root_curve};
use persuasion_core::oracle::grid_search;
use persuasion_core::rational::rat;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
#[ignore]
fn deep_tree_stress() {
    let mut rng = StdRng::seed_from_u64(0xdeed);
    for i in 0..50 {
        let tree = common::random_tree(&mut rng, 4, 3);
        let curve = root_curve(&tree);
        curve.check_solver_invariants().unwrap();
        let den = rng.random_range(1..=53);
        let prior = rat(rng.random_range(0..=den), den);
        let strategy = extract_strategy(&tree, &prior).unwrap();
        let eval = evaluate_strategy(&tree, &strategy, &prior).unwrap();
        assert_eq!(eval.sender_utility, curve.eval(&prior), "instance {i}");
        assert!(eval.ic_violations.is_empty());
        if tree.root.designed_count() <= 2 {
            let g = grid_search(&tree, &prior, 8, 3).unwrap();
            assert!(eval.sender_utility >= g.best_value, "instance {i}");
            assert!(eval.sender_utility <= &g.best_value + &g.error_bound, "instance {i}");
        }
    }
    println!("stress: 50 deep trees clean");
}
