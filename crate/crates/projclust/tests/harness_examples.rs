//! Statistical behaviour of the harness on the structured datasets: checks
//! that are about trends over seeds and dimensions rather than exact values.

use projclust::*;

#[test]
fn doubling_estimates_order_the_structured_datasets() {
    // Prefix walks stay low-dimensional; axis Gaussians do not.
    for seed in [42u64, 7, 13, 99, 123] {
        let prefix = instances::gen_prefix_gauss(300, seed).unwrap();
        let axis = instances::gen_axis_gauss(300, seed).unwrap();
        let ep = doubling_constant_estimate(&prefix, 300, seed).unwrap();
        let ea = doubling_constant_estimate(&axis, 300, seed).unwrap();
        assert!(ep.ddim_hat <= 4.0, "prefix ddim {} too high (seed {seed})", ep.ddim_hat);
        assert!(ea.ddim_hat >= 6.0, "axis ddim {} too low (seed {seed})", ea.ddim_hat);
        assert!(ep.lambda_hat < ea.lambda_hat);
    }

    // The walk is line-like; scaled identity vectors are maximally spread.
    let m = 128;
    let walk = instances::gen_walk(m, 1.0).unwrap();
    let ident = instances::gen_scaled_identity(m, 10.0).unwrap();
    let ew = doubling_constant_estimate(&walk, m, 0).unwrap();
    let ei = doubling_constant_estimate(&ident, m, 0).unwrap();
    assert!(ew.ddim_hat <= 4.0, "walk ddim {}", ew.ddim_hat);
    assert_eq!(ei.lambda_hat, m);
    assert!(ew.lambda_hat < ei.lambda_hat);
}

#[test]
fn ratio_curves_decrease_up_to_noise() {
    let d_values: Vec<usize> = (2..=24).step_by(2).collect();
    let trials = 10;
    let rep = run_doubling_comparison(150, &d_values, trials, 42, 0.10).unwrap();

    for (name, r) in [("prefix-gauss", &rep.prefix_gauss), ("axis-gauss", &rep.axis_gauss)] {
        let mut inversions = 0;
        for w in r.aggregates.windows(2) {
            if w[1].ratio_mean > w[0].ratio_mean {
                // Only count a rise as an inversion when it exceeds the
                // combined Monte-Carlo standard error of the two means.
                let se = (w[0].ratio_std.powi(2) + w[1].ratio_std.powi(2)).sqrt()
                    / (trials as f64).sqrt();
                if w[1].ratio_mean - w[0].ratio_mean > se {
                    inversions += 1;
                }
            }
        }
        assert!(inversions <= 1, "{name}: {inversions} inversions beyond noise");
    }

    // The low-doubling dataset reaches the 10% target first.
    let dp = rep.minimal_d_prefix.expect("prefix reaches 10% in range");
    if let Some(da) = rep.minimal_d_axis {
        // None would mean axis never reached it inside the probed range.
        assert!(dp < da);
    }
}

#[test]
fn identity_like_projection_is_the_easy_control() {
    // Projecting to d = m distorts far less than d = 5.
    let ps = instances::gen_prefix_gauss(40, 11).unwrap();
    let m = ps.dim();
    let cfg = ExperimentConfig::new(Task::Mst, vec![5, m], 20, 3);
    let rep = run_ratio_sweep(&ps, &cfg).unwrap();
    let at5 = rep.ratio_mean_at(5).unwrap();
    let at_m = rep.ratio_mean_at(m).unwrap();
    assert!(at_m <= at5, "mean ratio at d=m {at_m} vs d=5 {at5}");
}

#[test]
fn pullback_tightens_with_dimension_on_prefix_gauss() {
    let ps = instances::gen_prefix_gauss(300, 5).unwrap();
    let cfg = ExperimentConfig::new(Task::Mst, vec![5, 20], 20, 17);
    let rep = run_ratio_sweep(&ps, &cfg).unwrap();
    let at5 = rep.ratio_mean_at(5).unwrap();
    let at20 = rep.ratio_mean_at(20).unwrap();
    assert!(at20 - 1.0 < at5 - 1.0, "d=20 mean {at20} not closer to 1 than d=5 mean {at5}");
}
