//! Random and block-structured Hamiltonians on the cross-state subspace.

use faer::{Mat, MatRef};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::c64;
use crate::error::{Error, Result};
use crate::subspace::BandPair;

/// Absolute tolerance on `|H_ij - conj(H_ji)|` accepted by [`HermitianOperator::new`].
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Seed for every random construction. Equal seeds give bit-identical output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent child seed for stream `index` (ensemble member, sub-draw).
    pub fn derive(self, index: u64) -> RngSeed {
        // splitmix64 finalizer over the pair
        let mut z = self
            .0
            .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }
}

/// Dense complex Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    mat: Mat<c64>,
}

impl HermitianOperator {
    pub fn new(mat: Mat<c64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::shape(
                "square matrix",
                format!("{}x{}", mat.nrows(), mat.ncols()),
            ));
        }
        let residual = hermiticity_residual(mat.as_ref());
        if residual > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                residual,
                tolerance: HERMITICITY_TOL,
            });
        }
        Ok(Self { mat })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: Mat::zeros(dim, dim),
        }
    }

    /// Builds the matrix from its lower triangle (`i >= j`); the upper
    /// triangle is filled by conjugation and the diagonal made real.
    pub fn from_lower_fn(dim: usize, mut f: impl FnMut(usize, usize) -> c64) -> Self {
        let mut mat = Mat::<c64>::zeros(dim, dim);
        for j in 0..dim {
            for i in j..dim {
                let z = f(i, j);
                if i == j {
                    mat[(i, i)] = c64::new(z.re, 0.0);
                } else {
                    mat[(i, j)] = z;
                    mat[(j, i)] = z.conj();
                }
            }
        }
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm_l2()
    }

    /// `a * H + b * 1`.
    pub fn affine(&self, a: f64, b: f64) -> HermitianOperator {
        Self::from_lower_fn(self.dim(), |i, j| {
            let z = self.mat[(i, j)] * a;
            if i == j {
                z + b
            } else {
                z
            }
        })
    }
}

/// `max |H_ij - conj(H_ji)|` over all entries.
pub fn hermiticity_residual(mat: MatRef<'_, c64>) -> f64 {
    let n = mat.nrows().min(mat.ncols());
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_scale(scale: f64) -> Result<()> {
    if scale.is_finite() && scale >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "scale must be finite and non-negative, got {scale}"
        )))
    }
}

fn gaussian(rng: &mut ChaCha8Rng, sd: f64) -> f64 {
    let x: f64 = StandardNormal.sample(rng);
    x * sd
}

/// GUE matrix of dimension `d`: diagonal entries real with variance
/// `2 scale^2`, off-diagonal real and imaginary parts independent with
/// variance `scale^2`.
pub fn sample_gue(d: usize, scale: f64, seed: RngSeed) -> Result<HermitianOperator> {
    if d < 2 {
        return Err(Error::domain(format!("GUE dimension must be at least 2, got {d}")));
    }
    check_scale(scale)?;
    let mut rng = seed.rng();
    let diag_sd = std::f64::consts::SQRT_2 * scale;
    Ok(HermitianOperator::from_lower_fn(d, |i, j| {
        if i == j {
            c64::new(gaussian(&mut rng, diag_sd), 0.0)
        } else {
            let re = gaussian(&mut rng, scale);
            let im = gaussian(&mut rng, scale);
            c64::new(re, im)
        }
    }))
}

/// `g x g'` interaction block with independent Gaussian real and imaginary
/// parts of standard deviation `scale`.
pub fn sample_interaction_block(
    g: usize,
    g_prime: usize,
    scale: f64,
    seed: RngSeed,
) -> Result<Mat<c64>> {
    if g == 0 || g_prime == 0 {
        return Err(Error::domain("interaction block dimensions must be positive"));
    }
    check_scale(scale)?;
    let mut rng = seed.rng();
    let mut v = Mat::<c64>::zeros(g, g_prime);
    for i in 0..g {
        for j in 0..g_prime {
            let re = gaussian(&mut rng, scale);
            let im = gaussian(&mut rng, scale);
            v[(i, j)] = c64::new(re, im);
        }
    }
    Ok(v)
}

/// Level structure inside the two environment bands.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvSpectrum {
    /// Strictly degenerate bands (bandwidth 0).
    Degenerate,
    /// `n` equidistant levels per band spanning `[0, bandwidth]`; a
    /// single-level band sits at offset 0.
    Equidistant { bandwidth: f64 },
    /// Explicit level offsets: `upper` for band `k'` (`g'` entries, ground
    /// block), `lower` for band `k` (`g` entries, excited block).
    Explicit { upper: Vec<f64>, lower: Vec<f64> },
}

impl EnvSpectrum {
    pub fn bandwidth(&self) -> f64 {
        match self {
            EnvSpectrum::Degenerate => 0.0,
            EnvSpectrum::Equidistant { bandwidth } => *bandwidth,
            EnvSpectrum::Explicit { upper, lower } => {
                let span = |xs: &[f64]| {
                    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    if xs.is_empty() {
                        0.0
                    } else {
                        hi - lo
                    }
                };
                span(upper).max(span(lower))
            }
        }
    }

    /// Level offsets of the `k'` band (`g'` levels) and the `k` band (`g` levels).
    pub fn offsets(&self, g: usize, g_prime: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            EnvSpectrum::Degenerate => Ok((vec![0.0; g_prime], vec![0.0; g])),
            EnvSpectrum::Equidistant { bandwidth } => {
                if !(bandwidth.is_finite() && *bandwidth >= 0.0) {
                    return Err(Error::domain(format!(
                        "bandwidth must be finite and non-negative, got {bandwidth}"
                    )));
                }
                let ladder = |n: usize| -> Vec<f64> {
                    if n == 1 {
                        vec![0.0]
                    } else {
                        (0..n).map(|j| j as f64 * bandwidth / (n - 1) as f64).collect()
                    }
                };
                Ok((ladder(g_prime), ladder(g)))
            }
            EnvSpectrum::Explicit { upper, lower } => {
                if upper.len() != g_prime || lower.len() != g {
                    return Err(Error::shape(
                        format!("explicit levels ({g_prime}, {g})"),
                        format!("({}, {})", upper.len(), lower.len()),
                    ));
                }
                Ok((upper.clone(), lower.clone()))
            }
        }
    }
}

/// Block Hamiltonian in cross-state order:
///
/// ```text
/// [ -D/2 + eps_k'      V^dagger       ]
/// [       V         +D/2 + eps_k      ]
/// ```
///
/// with `D` the detuning of `band_pair` and `v` the `g x g'` interaction block.
pub fn build_structured(
    band_pair: &BandPair,
    spectrum: &EnvSpectrum,
    v: MatRef<'_, c64>,
) -> Result<HermitianOperator> {
    let (g, gp) = (band_pair.g(), band_pair.g_prime());
    if v.nrows() != g || v.ncols() != gp {
        return Err(Error::shape(
            format!("{g}x{gp} interaction block"),
            format!("{}x{}", v.nrows(), v.ncols()),
        ));
    }
    let (upper, lower) = spectrum.offsets(g, gp)?;
    let half = band_pair.detuning() / 2.0;
    Ok(HermitianOperator::from_lower_fn(g + gp, |i, j| {
        if i == j {
            let e = if i < gp { upper[i] - half } else { lower[i - gp] + half };
            c64::new(e, 0.0)
        } else if i >= gp && j < gp {
            v[(i - gp, j)]
        } else {
            c64::new(0.0, 0.0)
        }
    }))
}

/// Rescales the environmental part of `h` by `s`.
///
/// The environmental part is everything inside the two diagonal blocks
/// (ground `g' x g'`, excited `g x g`) after removing the trace average; the
/// off-diagonal coupling blocks are left untouched. `s = 0` collapses both
/// bands onto the trace average.
pub fn scale_env_spectrum(
    h: &HermitianOperator,
    band_pair: &BandPair,
    s: f64,
) -> Result<HermitianOperator> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::domain(format!(
            "spectrum scale must be finite and non-negative, got {s}"
        )));
    }
    let d = band_pair.dim();
    if h.dim() != d {
        return Err(Error::shape(format!("dimension {d}"), h.dim()));
    }
    let gp = band_pair.g_prime();
    let mean = h.trace() / d as f64;
    Ok(HermitianOperator::from_lower_fn(d, |i, j| {
        let z = h.get(i, j);
        let same_block = (i < gp) == (j < gp);
        if !same_block {
            z
        } else if i == j {
            c64::new(mean + s * (z.re - mean), 0.0)
        } else {
            z * s
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(h: &HermitianOperator) -> f64 {
        hermiticity_residual(h.as_mat())
    }

    #[test]
    fn gue_is_hermitian_and_reproducible() {
        let a = sample_gue(455, 1.0, RngSeed(7)).unwrap();
        assert_eq!(a.dim(), 455);
        assert!(residual(&a) < 1e-12);
        let b = sample_gue(455, 1.0, RngSeed(7)).unwrap();
        assert!(a.as_mat() == b.as_mat());
        let c = sample_gue(455, 1.0, RngSeed(8)).unwrap();
        assert!(a.as_mat() != c.as_mat());
    }

    #[test]
    fn gue_rejects_small_dimension() {
        assert!(sample_gue(1, 1.0, RngSeed(0)).is_err());
        assert!(sample_gue(4, -1.0, RngSeed(0)).is_err());
    }

    #[test]
    fn non_hermitian_matrix_is_rejected() {
        let mut m = Mat::<c64>::zeros(2, 2);
        m[(0, 1)] = c64::new(1.0, 0.0);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn interaction_block_shape_and_zero_scale() {
        let v = sample_interaction_block(91, 364, 1.0, RngSeed(1)).unwrap();
        assert_eq!((v.nrows(), v.ncols()), (91, 364));
        let z = sample_interaction_block(2, 3, 0.0, RngSeed(1)).unwrap();
        assert!(z.norm_l2() == 0.0);
        let tiny = sample_interaction_block(2, 3, 1e-12, RngSeed(1)).unwrap();
        assert!(tiny.norm_l2() < 1e-10);
    }

    #[test]
    fn degenerate_resonant_layout() {
        let pair = BandPair::new(3, 5).unwrap();
        let v = sample_interaction_block(3, 5, 1.0, RngSeed(3)).unwrap();
        let h = build_structured(&pair, &EnvSpectrum::Degenerate, v.as_ref()).unwrap();
        for i in 0..8 {
            assert_eq!(h.get(i, i), c64::new(0.0, 0.0));
        }
        for i in 0..3 {
            for j in 0..5 {
                assert_eq!(h.get(5 + i, j), v[(i, j)]);
                assert_eq!(h.get(j, 5 + i), v[(i, j)].conj());
            }
        }
        // no intra-block couplings
        assert_eq!(h.get(1, 0), c64::new(0.0, 0.0));
        assert_eq!(h.get(6, 5), c64::new(0.0, 0.0));
    }

    #[test]
    fn equidistant_offsets() {
        let pair = BandPair::new(1, 3).unwrap();
        let v = Mat::<c64>::zeros(1, 3);
        let h = build_structured(&pair, &EnvSpectrum::Equidistant { bandwidth: 1.0 }, v.as_ref())
            .unwrap();
        let diag: Vec<f64> = (0..4).map(|i| h.get(i, i).re).collect();
        assert_eq!(diag, [0.0, 0.5, 1.0, 0.0]);
    }

    #[test]
    fn detuning_splits_blocks() {
        let pair = BandPair::new(2, 2).unwrap().with_splittings(1.5, 1.0).unwrap();
        let v = Mat::<c64>::zeros(2, 2);
        let h = build_structured(&pair, &EnvSpectrum::Degenerate, v.as_ref()).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| h.get(i, i).re).collect();
        assert_eq!(diag, [-0.25, -0.25, 0.25, 0.25]);
    }

    #[test]
    fn structured_shape_mismatch() {
        let pair = BandPair::new(2, 3).unwrap();
        let v = Mat::<c64>::zeros(3, 2);
        assert!(matches!(
            build_structured(&pair, &EnvSpectrum::Degenerate, v.as_ref()),
            Err(Error::Shape { .. })
        ));
        let bad = EnvSpectrum::Explicit {
            upper: vec![0.0; 2],
            lower: vec![0.0; 2],
        };
        let v = Mat::<c64>::zeros(2, 3);
        assert!(build_structured(&pair, &bad, v.as_ref()).is_err());
    }

    #[test]
    fn scale_identity_and_collapse() {
        let pair = BandPair::new(3, 4).unwrap();
        let h = sample_gue(7, 1.0, RngSeed(11)).unwrap();
        let same = scale_env_spectrum(&h, &pair, 1.0).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                assert!((same.get(i, j) - h.get(i, j)).norm() < 1e-14);
            }
        }
        let flat = scale_env_spectrum(&h, &pair, 0.0).unwrap();
        let mean = h.trace() / 7.0;
        for i in 0..7 {
            assert!((flat.get(i, i).re - mean).abs() < 1e-14);
            for j in 0..7 {
                let same_block = (i < 4) == (j < 4);
                if i != j && same_block {
                    assert_eq!(flat.get(i, j), c64::new(0.0, 0.0));
                }
                if !same_block {
                    assert_eq!(flat.get(i, j), h.get(i, j));
                }
            }
        }
    }

    #[test]
    fn derived_seeds_are_distinct() {
        let base = RngSeed(42);
        let mut seen: Vec<u64> = (0..1000).map(|k| base.derive(k).0).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 1000);
        assert_eq!(base.derive(3), RngSeed(42).derive(3));
    }
}
