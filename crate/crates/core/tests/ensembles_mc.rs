mod common;

use eigenbath::ensembles::*;
use eigenbath::spinbath::{inhomogeneous_zeeman, sample_star_couplings};

fn within_sigma(mean: f64, expected: f64, sd: f64, n: usize, k: f64) -> bool {
    (mean - expected).abs() < k * sd / (n as f64).sqrt()
}

#[test]
fn gue_entry_moments() {
    let scale = 0.7;
    let (mut diag, mut off_re, mut off_im) = (vec![], vec![], vec![]);
    for s in 0..60 {
        let h = sample_gue(30, scale, RngSeed(s)).unwrap();
        for j in 0..30 {
            diag.push(h.get(j, j).re);
            for i in j + 1..30 {
                off_re.push(h.get(i, j).re);
                off_im.push(h.get(i, j).im);
            }
        }
    }
    let m = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let sq: fn(&[f64]) -> Vec<f64> = |xs| xs.iter().map(|x| x * x).collect();
    let s2 = scale * scale;
    // mean 0 with sd sigma; second moment sigma^2 with sd sqrt(2) sigma^2
    assert!(within_sigma(m(&diag), 0.0, (2.0 * s2).sqrt(), diag.len(), 5.0));
    assert!(within_sigma(m(&sq(&diag)), 2.0 * s2, 2f64.sqrt() * 2.0 * s2, diag.len(), 5.0));
    for part in [&off_re, &off_im] {
        assert!(within_sigma(m(part), 0.0, scale, part.len(), 5.0));
        assert!(within_sigma(m(&sq(part)), s2, 2f64.sqrt() * s2, part.len(), 5.0));
    }
}

#[test]
fn interaction_block_moments() {
    let scale = 1.3;
    let v = sample_interaction_block(40, 150, scale, RngSeed(9)).unwrap();
    let mut re = vec![];
    let mut im = vec![];
    for j in 0..150 {
        for i in 0..40 {
            re.push(v[(i, j)].re);
            im.push(v[(i, j)].im);
        }
    }
    for part in [&re, &im] {
        let n = part.len();
        let mean = part.iter().sum::<f64>() / n as f64;
        let second = part.iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!(within_sigma(mean, 0.0, scale, n, 5.0));
        assert!(within_sigma(second, scale * scale, 2f64.sqrt() * scale * scale, n, 5.0));
    }
}

#[test]
fn coupling_and_zeeman_are_uniform() {
    let a = 0.4;
    let mut xs = vec![];
    for s in 0..50 {
        for t in sample_star_couplings(20, a, RngSeed(s)).unwrap() {
            xs.extend(t.entries());
        }
    }
    let n = xs.len();
    assert!(xs.iter().all(|x| x.abs() <= a));
    let mean = xs.iter().sum::<f64>() / n as f64;
    let second = xs.iter().map(|x| x * x).sum::<f64>() / n as f64;
    // U(-a, a): variance a^2/3, fourth moment a^4/5
    let var_sd = (a.powi(4) / 5.0 - a.powi(4) / 9.0).sqrt();
    assert!(within_sigma(mean, 0.0, a / 3f64.sqrt(), n, 5.0));
    assert!(within_sigma(second, a * a / 3.0, var_sd, n, 5.0));

    let z = inhomogeneous_zeeman(5000, 1.0, 0.5, RngSeed(4)).unwrap();
    assert!(z.iter().all(|&x| (0.75..=1.25).contains(&x)));
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    assert!(within_sigma(mean, 1.0, 0.5 / 12f64.sqrt(), z.len(), 5.0));
}

#[test]
fn seeds_are_reproducible_and_distinct() {
    let a = sample_gue(12, 1.0, RngSeed(42)).unwrap();
    let b = sample_gue(12, 1.0, RngSeed(42)).unwrap();
    let c = sample_gue(12, 1.0, RngSeed(43)).unwrap();
    assert!(a.as_mat() == b.as_mat());
    assert!(a.as_mat() != c.as_mat());
    assert_ne!(RngSeed(42).derive(0), RngSeed(42).derive(1));
}
