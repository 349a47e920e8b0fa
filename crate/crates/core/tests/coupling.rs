use std::collections::VecDeque;

use sfw_core::network::{build_rgg, sample_world};
use sfw_core::percolation::{
    estimate_percolation_probability, estimate_protected_fraction, find_critical_firewall_intensity, trial_spanning,
};
use sfw_core::seed::trial_seed;
use sfw_core::spatial::Point;
use sfw_core::{build_isg, CriticalSearch, NetworkConfig};

fn cfg(lambda_r: f64, lambda_f: f64, size: f64, seed: u64) -> NetworkConfig {
    NetworkConfig::new(lambda_r, 2.0, lambda_f, 2.0, size, seed).unwrap()
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn percolation_is_monotone_in_lambda_f_per_trial() {
    let base = cfg(1.0, 0.0, 40.0, 3);
    for t in 0..30 {
        let seed = trial_seed(3, t);
        let mut prev = true;
        for k in 0..=16 {
            let s = trial_spanning(&base.with_lambda_f(k as f64 * 0.01), seed).unwrap();
            assert!(prev || !s.percolates, "trial {t} re-percolated at step {k}");
            prev = s.percolates;
        }
    }
}

#[test]
fn percolation_is_monotone_in_lambda_r_per_trial() {
    let base = cfg(0.0, 0.03, 40.0, 4);
    for t in 0..30 {
        let seed = trial_seed(4, t);
        let mut prev = false;
        for k in 0..=16 {
            let s = trial_spanning(&base.with_lambda_r(0.25 * k as f64), seed).unwrap();
            assert!(!prev || s.percolates, "trial {t} lost percolation at step {k}");
            prev = s.percolates;
        }
    }
}

#[test]
fn protected_sets_grow_with_lambda_f() {
    let base = cfg(1.0, 0.0, 30.0, 5);
    let seed = trial_seed(5, 0);
    let mut prev: Vec<usize> = Vec::new();
    for k in 0..10 {
        let r = build_isg(&base.with_lambda_f(0.02 * k as f64), seed).unwrap();
        let cur = &r.classification.protected_idx;
        assert!(prev.iter().all(|i| cur.contains(i)));
        prev = cur.clone();
    }
}

/// Components of the device RGG after deleting protected devices, by BFS.
fn bfs_after_deletion(devices: &[Point], firewalls: &[Point], r_r: f64, r_f: f64) -> Vec<Vec<usize>> {
    let rgg = build_rgg(devices, r_r).unwrap();
    let alive: Vec<bool> = devices
        .iter()
        .map(|d| firewalls.iter().all(|f| f.dist(d) > r_f))
        .collect();
    let mut seen = vec![false; devices.len()];
    let mut comps = Vec::new();
    for s in 0..devices.len() {
        if !alive[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &rgg.adjacency[u] {
                if alive[v] && !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    q.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps.sort();
    comps
}

#[test]
fn isg_equals_rgg_with_protected_devices_deleted() {
    for seed in 0..20 {
        let c = cfg(1.2, 0.04, 25.0, seed);
        let ts = trial_seed(seed, 0);
        let (devices, firewalls) = sample_world(&c, ts).unwrap();
        let expected = bfs_after_deletion(&devices.points, &firewalls.points, c.r_r, c.r_f);

        let r = build_isg(&c, ts).unwrap();
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (v, &label) in r.isg.component_label.iter().enumerate() {
            groups.entry(label).or_default().push(r.isg.vertices[v]);
        }
        let mut got: Vec<Vec<usize>> = groups.into_values().collect();
        for g in &mut got {
            g.sort_unstable();
        }
        got.sort();
        assert_eq!(got, expected, "seed {seed}");
    }
}

#[test]
fn regimes() {
    let dense = estimate_percolation_probability(&cfg(5.0, 0.0, 100.0, 11), 100).unwrap();
    assert!(dense.theta_hat >= 0.99, "{}", dense.theta_hat);
    let sparse = estimate_percolation_probability(&cfg(0.25, 0.0, 100.0, 12), 100).unwrap();
    assert!(sparse.theta_hat <= 0.05, "{}", sparse.theta_hat);
    let light = estimate_percolation_probability(&cfg(0.8, 0.02, 100.0, 13), 100).unwrap();
    assert!(light.theta_hat > 0.5, "{}", light.theta_hat);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let c = cfg(0.8, 0.05, 60.0, 21);
    let search = CriticalSearch {
        lambda_f_max: 0.12,
        step: 0.01,
        trials: 30,
        epsilon: 0.05,
    };
    let runs: Vec<_> = [1, 4, 8]
        .into_iter()
        .map(|n| {
            in_pool(n, || {
                (
                    estimate_percolation_probability(&c, 40).unwrap(),
                    estimate_protected_fraction(&c, 40).unwrap(),
                    find_critical_firewall_intensity(&c.with_lambda_f(0.0), &search).unwrap(),
                )
            })
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}
