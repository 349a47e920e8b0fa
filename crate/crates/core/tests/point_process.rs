use sfw_core::spatial::{poisson_quantile, sample_ppp, Window};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn w100() -> Window {
    Window::square(100.0).unwrap()
}

#[test]
fn counts_have_poisson_mean_and_dispersion() {
    let seeds = 300u64;
    let counts: Vec<f64> = (0..seeds)
        .map(|s| sample_ppp(0.8, w100(), 10_000 + s).unwrap().len() as f64)
        .collect();
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);

    let se = (8000.0 / n).sqrt();
    assert!((mean - 8000.0).abs() < 4.0 * se, "mean {mean}");
    // sd of the sample variance of a Poisson(8000) sample is about 8000 * sqrt(2 / (n - 1))
    assert!((var - 8000.0).abs() < 4.0 * 8000.0 * (2.0 / (n - 1.0)).sqrt(), "var {var}");

    // index of dispersion against chi-square(n - 1)
    let d = counts.iter().map(|c| (c - 8000.0).powi(2)).sum::<f64>() / 8000.0;
    let chi = ChiSquared::new(n).unwrap();
    let p = chi.cdf(d);
    assert!((0.001..0.999).contains(&p), "dispersion {d}, p = {p}");
}

#[test]
fn positions_are_uniform() {
    let ps = sample_ppp(1.0, w100(), 77).unwrap();
    let mut bins = [0f64; 100];
    for p in &ps.points {
        let (i, j) = (((p.x / 10.0) as usize).min(9), ((p.y / 10.0) as usize).min(9));
        bins[j * 10 + i] += 1.0;
    }
    let expected = ps.len() as f64 / 100.0;
    let stat: f64 = bins.iter().map(|b| (b - expected).powi(2) / expected).sum();
    let p = ChiSquared::new(99.0).unwrap().cdf(stat);
    assert!((0.001..0.999).contains(&p), "chi2 {stat}, p = {p}");
}

#[test]
fn higher_intensity_extends_the_same_points() {
    let w = Window::square(30.0).unwrap();
    let low = sample_ppp(0.5, w, 5).unwrap();
    let high = sample_ppp(1.5, w, 5).unwrap();
    assert!(high.len() >= low.len());
    assert_eq!(&high.points[..low.len()], &low.points[..]);
}

#[test]
fn quantile_is_monotone_in_mean() {
    for u in [0.01, 0.3, 0.5, 0.9, 0.999] {
        let mut prev = 0;
        for m in [0.0, 0.5, 3.0, 40.0, 800.0, 8000.0] {
            let q = poisson_quantile(m, u);
            assert!(q >= prev, "u={u} m={m}");
            prev = q;
        }
    }
}

#[test]
fn window_offsets_are_respected() {
    let w = Window::new(-5.0, 10.0, 15.0, 12.0).unwrap();
    let ps = sample_ppp(3.0, w, 9).unwrap();
    assert!(!ps.is_empty());
    assert!(ps.points.iter().all(|p| w.contains(p)));
}
