//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use sfw_cli::{run, Command, ExperimentSpec, SweepAxis};
use sfw_core::bounds::{
    critical_intensity_upper_bound, critical_protected_fraction, subcritical_sufficient_intensity, LambdaC1,
};
use sfw_core::lattice::{
    blocking_search, closed_face_frequency, count_dependent_edges_bruteforce, coupling_configs,
    verify_open_edge_coupling,
};
use sfw_core::percolation::{
    estimate_percolation_probability, estimate_protected_fraction, find_critical_firewall_intensity, CriticalSearch,
};
use sfw_core::seed::trial_seed;
use sfw_core::{build_isg, NetworkConfig};

const SEED: u64 = 0;
const TRIALS: usize = 100;

struct Check {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn cfg(lambda_r: f64, lambda_f: f64) -> NetworkConfig {
    NetworkConfig::new(lambda_r, 2.0, lambda_f, 2.0, 100.0, SEED).unwrap()
}

fn critical(lambda_r: f64) -> Result<f64, String> {
    let c = cfg(lambda_r, 0.0);
    let search = CriticalSearch {
        trials: TRIALS,
        ..CriticalSearch::for_config(&c).unwrap()
    };
    find_critical_firewall_intensity(&c, &search)
        .map(|r| r.lambda_f_critical)
        .map_err(|e| e.to_string())
}

fn phase_transition() -> Check {
    let start = Instant::now();
    let points: Vec<(f64, f64, f64)> = (0..=30)
        .map(|k| {
            let lf = (k as f64 * 0.005 * 1e9).round() / 1e9;
            let e = estimate_percolation_probability(&cfg(0.8, lf), TRIALS).unwrap();
            (lf, e.theta_hat, e.std_err)
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let start_ok = points[0].1 > 0.9;
    let monotone = points
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 + 2.0 * (w[0].2.powi(2) + w[1].2.powi(2)).sqrt());
    let reach = points.iter().find(|p| p.1 <= 0.02).map(|p| p.0);
    let reach_ok = reach.is_some_and(|l| l < 0.13);
    Check {
        id: 1,
        name: "phase transition",
        pass: start_ok && monotone && reach_ok && secs < 300.0,
        detail: format!(
            "theta(0)={} non-increasing={monotone} first theta<=0.02 at lambda_f={reach:?} runtime={secs:.1}s",
            points[0].1
        ),
    }
}

fn critical_values(cache: &BTreeMap<u32, Result<f64, String>>) -> Check {
    let get = |lr: u32| cache[&lr].clone();
    let (a, b) = (get(8), get(20));
    let ok = |r: &Result<f64, String>, target: f64| r.as_ref().is_ok_and(|v| (v - target).abs() <= 0.015);
    Check {
        id: 2,
        name: "critical intensity values",
        pass: ok(&a, 0.067) && ok(&b, 0.102),
        detail: format!("lambda_r=0.8: {a:?} (0.067 +- 0.015), lambda_r=2: {b:?} (0.102 +- 0.015)"),
    }
}

fn saturation(cache: &BTreeMap<u32, Result<f64, String>>) -> Check {
    let upper = critical_intensity_upper_bound(2.0, 2.0, LambdaC1::upper()).unwrap();
    let near = |lr: u32| cache[&lr].as_ref().is_ok_and(|v| *v <= 0.12 + 0.01);
    let below: Vec<bool> = cache.values().map(|r| r.as_ref().is_ok_and(|v| *v < upper)).collect();
    let exceptions = below.iter().filter(|b| !**b).count();
    let values: Vec<String> = cache
        .iter()
        .map(|(k, v)| format!("{}:{}", *k as f64 / 10.0, v.as_ref().map_or("err".to_string(), |x| x.to_string())))
        .collect();
    Check {
        id: 3,
        name: "saturation below upper bound",
        pass: near(40) && near(70) && exceptions == 0,
        detail: format!("lambda_f_c by lambda_r [{}], line {upper:.4}, exceptions {exceptions}", values.join(" ")),
    }
}

fn immune_regime() -> Check {
    let low = estimate_percolation_probability(&cfg(0.25, 0.0), TRIALS).unwrap().theta_hat;
    let high = estimate_percolation_probability(&cfg(0.45, 0.0), TRIALS).unwrap().theta_hat;
    Check {
        id: 4,
        name: "immune regime",
        pass: low <= 0.05 && high >= 0.5,
        detail: format!("theta(0.25)={low} theta(0.45)={high}"),
    }
}

fn protected_fraction() -> Check {
    let mut pass = true;
    let mut detail = Vec::new();
    for (lf, rf) in [(0.05, 2.0), (0.1, 2.0), (0.1, 4.0)] {
        let c = NetworkConfig::new(0.8, 2.0, lf, rf, 100.0, SEED).unwrap().with_margin(rf);
        let est = estimate_protected_fraction(&c, 200).unwrap();
        let expected = 1.0 - (-PI * lf * rf * rf).exp();
        let z = (est.mean - expected) / est.std_err;
        pass &= z.abs() <= 3.0;
        if rf == 4.0 {
            pass &= 1.0 - est.mean <= 0.01;
        }
        detail.push(format!("({lf},{rf}) mean={:.5} expected={expected:.5} z={z:.2}", est.mean));
    }
    Check {
        id: 5,
        name: "protected fraction",
        pass,
        detail: detail.join("; "),
    }
}

fn critical_protected() -> Check {
    let lc = LambdaC1::approximation();
    let at_equal = critical_protected_fraction(2.0, 2.0, lc).unwrap();
    let at_limit = critical_protected_fraction(1.0, 100.0, lc).unwrap();
    Check {
        id: 6,
        name: "critical protected percentage",
        pass: (at_equal - 0.779).abs() <= 0.001 && (at_limit - 0.677).abs() <= 0.001,
        detail: format!("r_f=r_r: {at_equal:.5}, r_f/r_r=100: {at_limit:.5}"),
    }
}

fn subcritical_constant() -> Check {
    // (1 - e^-x)^3 = 1/2 with x = lambda sqrt(3)/4 r^2
    let x = -(1.0 - 0.5f64.powf(1.0 / 3.0)).ln();
    let oracle = 4.0 * x / 3f64.sqrt();
    let mut pass = (oracle - 3.645).abs() <= 0.005;
    let mut scaled = Vec::new();
    for r in [1.0, 2.0, 3.5] {
        let v = subcritical_sufficient_intensity(r).unwrap() * r * r;
        pass &= (v - 3.645).abs() <= 0.005 && (v - oracle).abs() < 1e-12;
        scaled.push(format!("{v:.5}"));
    }
    Check {
        id: 7,
        name: "sub-critical constant",
        pass,
        detail: format!("lambda * r_r^2 = {} (oracle {oracle:.5})", scaled.join(", ")),
    }
}

fn edge_count_oracle() -> Check {
    let mut mismatches = 0;
    for a in 2..=8u64 {
        for b in 2..=8u64 {
            let formula = (8 * a * b + 1) as i64 - (2 * a + 6 * b) as i64;
            if count_dependent_edges_bruteforce(a, b).unwrap() as i64 != formula {
                mismatches += 1;
            }
        }
    }
    let sample = count_dependent_edges_bruteforce(4, 3).unwrap();
    Check {
        id: 8,
        name: "dependent edge enumeration",
        pass: mismatches == 0 && sample == 71,
        detail: format!("49 (a,b) pairs, {mismatches} mismatches, (4,3) -> {sample}"),
    }
}

fn closed_face() -> Check {
    let mut pass = true;
    let mut detail = Vec::new();
    for (n, lf) in [0.4, 0.9, 1.8].into_iter().enumerate() {
        let (freq, se) = closed_face_frequency(lf, 2.0, 4000, 500 + n as u64).unwrap();
        let area = 3f64.sqrt() / 4.0 * 4.0;
        let expected = (1.0 - (-lf * area).exp()).powi(3);
        pass &= (freq - expected).abs() <= 3.0 * se;
        detail.push(format!("lambda_f={lf} freq={freq} expected={expected:.4} se={se:.4}"));
    }
    Check {
        id: 9,
        name: "closed-face frequency",
        pass,
        detail: detail.join("; "),
    }
}

fn locality() -> Check {
    let mut violations = 0;
    let mut edges = 0;
    for (c, origin) in coupling_configs(100, 1).unwrap() {
        let r = build_isg(&c, trial_seed(c.master_seed, 0)).unwrap();
        let rep = verify_open_edge_coupling(&r, origin).unwrap();
        violations += rep.violations;
        edges += rep.edges_checked;
    }
    let blocking = blocking_search(2.0, 100_000, 2).unwrap();
    Check {
        id: 10,
        name: "lattice locality",
        pass: violations == 0 && blocking.counterexample.is_none(),
        detail: format!(
            "coupling: 100 realizations, {edges} edges, {violations} violations; blocking: 100000 trials, counterexample={}",
            blocking.counterexample.is_some()
        ),
    }
}

fn determinism() -> Check {
    let mut sweep = ExperimentSpec::new(Command::Sweep);
    sweep.axis = Some(SweepAxis {
        parameter: "lambda_f".into(),
        start: 0.0,
        stop: 0.1,
        step: 0.02,
    });
    sweep.trials = 30;
    let mut crit = ExperimentSpec::new(Command::Critical);
    crit.trials = 30;
    crit.network.window_size = 60.0;
    let mut prot = ExperimentSpec::new(Command::Protected);
    prot.network.lambda_f = 0.05;
    prot.trials = 30;

    let mut pass = true;
    let mut detail = Vec::new();
    for spec in [sweep, crit, prot] {
        let bodies: Vec<Vec<String>> = [1, 4, 8]
            .into_iter()
            .map(|n| {
                let mut s = spec.clone();
                s.threads = Some(n);
                run(&s).unwrap().documents.into_iter().map(|d| d.body).collect()
            })
            .collect();
        let same = bodies[1] == bodies[0] && bodies[2] == bodies[0];
        pass &= same;
        detail.push(format!("{}={same}", spec.command.name()));
    }
    Check {
        id: 11,
        name: "determinism across 1/4/8 threads",
        pass,
        detail: detail.join(" "),
    }
}

fn main() {
    let mut checks = Vec::new();
    let mut report = |c: Check| {
        println!(
            "criterion {:>2} {} [{}]: {}",
            c.id,
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        checks.push(c.pass);
    };
    report(phase_transition());

    // lambda_r in tenths
    let cache: BTreeMap<u32, Result<f64, String>> =
        [4, 8, 10, 20, 30, 40, 50, 60, 70].into_iter().map(|k| (k, critical(k as f64 / 10.0))).collect();
    report(critical_values(&cache));
    report(saturation(&cache));
    report(immune_regime());
    report(protected_fraction());
    report(critical_protected());
    report(subcritical_constant());
    report(edge_count_oracle());
    report(closed_face());
    report(locality());
    report(determinism());

    let failed = checks.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
