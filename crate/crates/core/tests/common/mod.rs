#![allow(dead_code)]

use eigenbath::c64;
use eigenbath::spinbath::{IntraKind, SpinBathSpec, Topology};
use faer::Mat;

/// Gauss-Legendre nodes and weights on [-1, 1] via Newton on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Composite 20-point Gauss-Legendre rule over `panels` equal subintervals.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (xs, ws) = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + h / 2.0;
        for (x, w) in xs.iter().zip(&ws) {
            total += w * f(mid + x * h / 2.0) * h / 2.0;
        }
    }
    total
}

fn c(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

/// Single-spin operators in the (down, up) ordering.
pub fn pauli(which: usize) -> Mat<c64> {
    // textbook matrices are written in (up, down) order; reverse both axes
    let textbook = match which {
        0 => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        1 => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        _ => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
    };
    Mat::from_fn(2, 2, |i, j| textbook[1 - i][1 - j])
}

pub fn kron(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    let (ra, ca, rb, cb) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

/// Product of single-site operators on `sites` spins; site 0 is the least
/// significant index bit, so it is the rightmost Kronecker factor.
pub fn site_product(sites: usize, ops: &[(usize, &Mat<c64>)]) -> Mat<c64> {
    let id = Mat::<c64>::identity(2, 2);
    let mut acc = Mat::<c64>::identity(1, 1);
    for site in (0..sites).rev() {
        let factor = ops.iter().find(|(s, _)| *s == site).map(|(_, m)| *m).unwrap_or(&id);
        acc = kron(&acc, factor);
    }
    acc
}

/// Independent dense Hamiltonian of the central spin (site 0) and its bath.
pub fn kron_hamiltonian(spec: &SpinBathSpec) -> Mat<c64> {
    let n = spec.zeeman.len();
    let sites = n + 1;
    let dim = 1 << sites;
    let s: Vec<Mat<c64>> = (0..3).map(pauli).collect();
    let mut h = Mat::<c64>::zeros(dim, dim);
    let mut add = |m: Mat<c64>, coeff: f64| {
        for j in 0..dim {
            for i in 0..dim {
                h[(i, j)] += m[(i, j)] * coeff;
            }
        }
    };
    add(site_product(sites, &[(0, &s[2])]), spec.central_splitting / 2.0);
    for (nu, dz) in spec.zeeman.iter().enumerate() {
        add(site_product(sites, &[(nu + 1, &s[2])]), dz / 2.0);
    }
    for (nu, t) in spec.couplings.iter().enumerate() {
        for a in 0..3 {
            for b in 0..3 {
                let coeff = spec.coupling_strength * t.0[a][b];
                if coeff != 0.0 {
                    add(site_product(sites, &[(0, &s[a]), (nu + 1, &s[b])]), coeff);
                }
            }
        }
    }
    if spec.topology == Topology::Ring && n >= 2 {
        let axes: &[usize] = match spec.intra_kind {
            IntraKind::None => &[],
            IntraKind::Xx => &[0],
            IntraKind::XxPlusYy => &[0, 1],
            IntraKind::Heisenberg => &[0, 1, 2],
        };
        let mut bonds: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        if n >= 3 {
            bonds.push((n - 1, 0));
        }
        for (a, b) in bonds {
            for &ax in axes {
                add(
                    site_product(sites, &[(a + 1, &s[ax]), (b + 1, &s[ax])]),
                    spec.intra_strength,
                );
            }
        }
    }
    h
}

pub fn max_abs_diff(a: faer::MatRef<'_, c64>, b: faer::MatRef<'_, c64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
