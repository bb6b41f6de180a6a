//! Eigenvector inversions and their statistics.
//!
//! For an energy eigenvector `|e> = alpha |0, chi> + beta |1, eta>` of a
//! cross-subspace Hamiltonian the inversion is
//! `lambda = |beta|^2 - |alpha|^2`. Summed over a complete eigenbasis the
//! inversions always give `g - g'`, so their mean is the canonical inversion
//! and all the physics sits in the variance.

use faer::{Mat, MatRef, Side};
use num_rational::Ratio;
use rayon::prelude::*;
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::c64;
use crate::ensembles::{hermiticity_residual, scale_env_spectrum, HermitianOperator};
use crate::error::{Error, Result};
use crate::subspace::{canonical_inversion, BandPair, CrossStateBasis};

/// Residual above which [`eigendecompose`] refuses a matrix.
pub const EIGEN_HERMITICITY_TOL: f64 = 1e-10;

/// Default number of histogram bins on `[-1, 1]`.
pub const DEFAULT_BINS: usize = 50;

/// Spectral decomposition on the cross subspace, ascending energies.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    band_pair: BandPair,
    energies: Vec<f64>,
    vectors: Mat<c64>,
    lambdas: Vec<f64>,
}

impl EigenSystem {
    pub fn band_pair(&self) -> &BandPair {
        &self.band_pair
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvectors as columns, in cross-state basis order.
    pub fn vectors(&self) -> MatRef<'_, c64> {
        self.vectors.as_ref()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// `max |<v_i|v_j> - delta_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let v = self.vectors.as_ref();
        let gram = v.adjoint() * v;
        let mut worst: f64 = 0.0;
        for j in 0..gram.ncols() {
            for i in 0..gram.nrows() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - c64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn lambda_sum(&self) -> f64 {
        self.lambdas.iter().sum()
    }

    /// Population variance of this spectrum's inversions.
    pub fn lambda_variance(&self) -> f64 {
        mean_and_variance(&self.lambdas).1
    }
}

/// Inversion `sum_{i >= g'} |v_i|^2 - sum_{i < g'} |v_i|^2` of each column of
/// `vectors`, clamped to `[-1, 1]`.
pub fn inversions(vectors: MatRef<'_, c64>, ground_dim: usize) -> Vec<f64> {
    (0..vectors.ncols())
        .map(|j| {
            let col = vectors.col(j);
            let mut lambda = 0.0;
            for i in 0..col.nrows() {
                let p = col[i].norm_sqr();
                if i < ground_dim {
                    lambda -= p;
                } else {
                    lambda += p;
                }
            }
            lambda.clamp(-1.0, 1.0)
        })
        .collect()
}

pub fn eigendecompose(h: &HermitianOperator, basis: &CrossStateBasis) -> Result<EigenSystem> {
    if h.dim() != basis.dim() {
        return Err(Error::shape(format!("dimension {}", basis.dim()), h.dim()));
    }
    let residual = hermiticity_residual(h.as_mat());
    if residual > EIGEN_HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            residual,
            tolerance: EIGEN_HERMITICITY_TOL,
        });
    }
    let evd = h
        .as_mat()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let energies: Vec<f64> = evd.S().column_vector().iter().map(|z| z.re).collect();
    let vectors = evd.U().to_owned();
    let lambdas = inversions(vectors.as_ref(), basis.ground_dim());
    Ok(EigenSystem {
        band_pair: *basis.band_pair(),
        energies,
        vectors,
        lambdas,
    })
}

/// Equal-width bins on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(samples: &[f64], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::domain("histogram needs at least one bin"));
        }
        let width = 2.0 / bins as f64;
        let edges = (0..=bins).map(|k| -1.0 + k as f64 * width).collect();
        let mut counts = vec![0u64; bins];
        for &x in samples {
            let k = ((x + 1.0) / width).floor();
            let k = if k < 0.0 { 0 } else { (k as usize).min(bins - 1) };
            counts[k] += 1;
        }
        Ok(Histogram { edges, counts })
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    /// Counts normalized to a probability density.
    pub fn density(&self) -> Vec<f64> {
        let total: u64 = self.counts.iter().sum();
        let norm = total as f64 * self.bin_width();
        self.counts.iter().map(|&c| c as f64 / norm).collect()
    }
}

/// Pooled inversions of one or more spectra on the same band pair.
#[derive(Debug, Clone)]
pub struct LambdaDistribution {
    pub band_pair: BandPair,
    pub samples: Vec<f64>,
    pub histogram: Histogram,
    pub mean: f64,
    /// Population variance.
    pub variance: f64,
}

impl LambdaDistribution {
    pub fn from_samples(band_pair: BandPair, samples: Vec<f64>, bins: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("lambda distribution needs at least one sample"));
        }
        let histogram = Histogram::new(&samples, bins)?;
        let (mean, variance) = mean_and_variance(&samples);
        Ok(LambdaDistribution {
            band_pair,
            samples,
            histogram,
            mean,
            variance,
        })
    }

    /// Long-time inversion predicted from this distribution's variance.
    pub fn predicted_inversion(&self) -> f64 {
        predicted_equilibrium_inversion(self.band_pair.g(), self.band_pair.g_prime(), self.variance)
    }
}

pub fn lambda_distribution(systems: &[EigenSystem], bins: usize) -> Result<LambdaDistribution> {
    let first = systems
        .first()
        .ok_or_else(|| Error::domain("lambda distribution needs at least one eigensystem"))?;
    if let Some(bad) = systems.iter().find(|s| !s.band_pair.same_subspace(&first.band_pair)) {
        return Err(Error::domain(format!(
            "mixed band pairs: ({}, {}) and ({}, {})",
            first.band_pair.g(),
            first.band_pair.g_prime(),
            bad.band_pair.g(),
            bad.band_pair.g_prime()
        )));
    }
    let samples = systems.iter().flat_map(|s| s.lambdas.iter().copied()).collect();
    LambdaDistribution::from_samples(first.band_pair, samples, bins)
}

fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// `(g - g')/(g + g') + (g + g')/(2g) * variance`.
pub fn predicted_equilibrium_inversion(g: usize, g_prime: usize, variance: f64) -> f64 {
    let d = (g + g_prime) as f64;
    canonical_inversion(g, g_prime) + d / (2.0 * g as f64) * variance
}

/// Density of eigenvector inversions for GUE matrices,
/// `2^(1-d) Gamma(d)/(Gamma(g) Gamma(g')) (1-lambda)^(g'-1) (1+lambda)^(g-1)`.
///
/// Evaluated in log space. Zero outside `[-1, 1]`.
pub fn gue_lambda_pdf(lambda: f64, g: usize, g_prime: usize) -> f64 {
    if !(-1.0..=1.0).contains(&lambda) || g == 0 || g_prime == 0 {
        return 0.0;
    }
    let d = (g + g_prime) as f64;
    let mut log_p = ln_gamma(d) - ln_gamma(g as f64) - ln_gamma(g_prime as f64)
        - (d - 1.0) * std::f64::consts::LN_2;
    for (base, exponent) in [(1.0 - lambda, g_prime - 1), (1.0 + lambda, g - 1)] {
        if exponent > 0 {
            if base <= 0.0 {
                return 0.0;
            }
            log_p += exponent as f64 * base.ln();
        }
    }
    log_p.exp()
}

/// Cumulative distribution of [`gue_lambda_pdf`]. The ground population
/// `(1 - lambda)/2` is Beta(g', g) distributed.
pub fn gue_lambda_cdf(lambda: f64, g: usize, g_prime: usize) -> f64 {
    if lambda <= -1.0 {
        return 0.0;
    }
    if lambda >= 1.0 {
        return 1.0;
    }
    1.0 - beta_reg(g_prime as f64, g as f64, (1.0 - lambda) / 2.0)
}

/// `4 g g' / (d^2 (d + 1))`.
pub fn gue_variance_closed_form(g: usize, g_prime: usize) -> f64 {
    let (g, gp) = (g as f64, g_prime as f64);
    let d = g + gp;
    4.0 * g * gp / (d * d * (d + 1.0))
}

/// [`gue_variance_closed_form`] as an exact reduced fraction.
pub fn gue_variance_exact(g: usize, g_prime: usize) -> Ratio<u128> {
    let (g, gp) = (g as u128, g_prime as u128);
    let d = g + gp;
    Ratio::new(4 * g * gp, d * d * (d + 1))
}

/// Ensemble-average relative strength of a GUE matrix, `sqrt((g^2 + g'^2)/(2 g g'))`.
pub fn vr_gue(g: usize, g_prime: usize) -> f64 {
    let (g, gp) = (g as f64, g_prime as f64);
    ((g * g + gp * gp) / (2.0 * g * gp)).sqrt()
}

/// Relative strength `V_R = sqrt(Tr(H_diag^2) / Tr(H_off^2))`.
///
/// `H_diag` is the content of the two diagonal blocks with the trace average
/// removed (the environment spectrum); `H_off` is the pair of coupling
/// blocks `V`, `V^dagger`.
pub fn relative_strength(h: &HermitianOperator, band_pair: &BandPair) -> Result<f64> {
    let d = band_pair.dim();
    if h.dim() != d {
        return Err(Error::shape(format!("dimension {d}"), h.dim()));
    }
    let gp = band_pair.g_prime();
    let mean = h.trace() / d as f64;
    let (mut diag_sq, mut off_sq) = (0.0, 0.0);
    for j in 0..d {
        for i in 0..d {
            let mut z = h.get(i, j);
            if (i < gp) == (j < gp) {
                if i == j {
                    z -= mean;
                }
                diag_sq += z.norm_sqr();
            } else {
                off_sq += z.norm_sqr();
            }
        }
    }
    if off_sq == 0.0 {
        return Err(Error::domain(
            "relative strength undefined: coupling blocks are zero",
        ));
    }
    Ok((diag_sq / off_sq).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub scale: f64,
    pub relative_strength: f64,
    pub variance: f64,
}

/// Inversion variance as the environment spectrum of `base` is rescaled by
/// each entry of `scales`. Output is in input order.
pub fn sweep_variance_vs_vr(
    base: &HermitianOperator,
    basis: &CrossStateBasis,
    scales: &[f64],
) -> Result<Vec<SweepPoint>> {
    let band_pair = basis.band_pair();
    scales
        .par_iter()
        .map(|&s| {
            let h = scale_env_spectrum(base, band_pair, s)?;
            let vr = relative_strength(&h, band_pair)?;
            let eig = eigendecompose(&h, basis)?;
            Ok(SweepPoint {
                scale: s,
                relative_strength: vr,
                variance: eig.lambda_variance(),
            })
        })
        .collect()
}

/// Multiplicities of the inversion peaks of a degenerate resonant block
/// Hamiltonian `[[0, V^dagger], [V, 0]]`.
///
/// With `r = rank(V)` the spectrum has `g' - r` eigenvectors confined to the
/// ground block (`lambda = -1`), `g - r` confined to the excited block
/// (`lambda = +1`), and `2r` equal-weight pairs `(w_i, +-u_i)/sqrt(2)` from
/// the singular vectors (`lambda = 0`). These counts do not depend on how a
/// numerical eigensolver rotates inside the degenerate null space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegeneratePeaks {
    pub rank: usize,
    pub minus_one: usize,
    pub zero: usize,
    pub plus_one: usize,
}

impl DegeneratePeaks {
    /// The exact inversion multiset, ascending.
    pub fn lambdas(&self) -> Vec<f64> {
        let mut out = vec![-1.0; self.minus_one];
        out.extend(std::iter::repeat_n(0.0, self.zero));
        out.extend(std::iter::repeat_n(1.0, self.plus_one));
        out
    }
}

/// Peak multiplicities from the singular values of the `g x g'` block `v`.
pub fn degenerate_peaks(v: MatRef<'_, c64>) -> Result<DegeneratePeaks> {
    let (g, gp) = (v.nrows(), v.ncols());
    if g == 0 || gp == 0 {
        return Err(Error::domain("interaction block must be non-empty"));
    }
    let sv = v
        .singular_values()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let largest = sv.iter().copied().fold(0.0, f64::max);
    let tol = (g.max(gp) as f64) * f64::EPSILON * largest;
    let rank = if largest == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > tol).count()
    };
    Ok(DegeneratePeaks {
        rank,
        minus_one: gp - rank,
        zero: 2 * rank,
        plus_one: g - rank,
    })
}

/// Counts of inversions within `tol` of -1, 0 and +1 (in that order).
pub fn classify_peaks(lambdas: &[f64], tol: f64) -> (usize, usize, usize) {
    let near = |c: f64| lambdas.iter().filter(|&&x| (x - c).abs() < tol).count();
    (near(-1.0), near(0.0), near(1.0))
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |acc: f64, (i, &x)| {
        let f = cdf(x);
        let below = f - i as f64 / n;
        let above = (i + 1) as f64 / n - f;
        acc.max(below).max(above)
    })
}
