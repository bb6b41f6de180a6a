//! Band pairs, the cross-state basis and the canonical closed forms.
//!
//! Energies are measured in units of the common splitting `delta` (so
//! resonance is `delta_s = delta_c = 1`), times in units of `1/delta`, and
//! `hbar = 1`.

use std::fmt;

use crate::error::{Error, Result};

/// Reduced two-band problem: an environment band `k` of degeneracy `g`, a
/// band `k'` of degeneracy `g'`, and a two-level system bridging them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPair {
    g: usize,
    g_prime: usize,
    delta_s: f64,
    delta_c: f64,
    bandwidth: f64,
}

impl BandPair {
    /// Resonant (`delta_s = delta_c = 1`), zero-bandwidth band pair.
    pub fn new(g: usize, g_prime: usize) -> Result<Self> {
        if g == 0 || g_prime == 0 {
            return Err(Error::domain(format!(
                "band degeneracies must be positive (g = {g}, g' = {g_prime})"
            )));
        }
        Ok(Self {
            g,
            g_prime,
            delta_s: 1.0,
            delta_c: 1.0,
            bandwidth: 0.0,
        })
    }

    pub fn with_splittings(mut self, delta_s: f64, delta_c: f64) -> Result<Self> {
        if !(delta_s.is_finite() && delta_c.is_finite() && delta_s >= 0.0 && delta_c >= 0.0) {
            return Err(Error::domain(format!(
                "splittings must be finite and non-negative (delta_s = {delta_s}, delta_c = {delta_c})"
            )));
        }
        self.delta_s = delta_s;
        self.delta_c = delta_c;
        Ok(self)
    }

    pub fn with_bandwidth(mut self, bandwidth: f64) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth >= 0.0) {
            return Err(Error::domain(format!(
                "bandwidth must be finite and non-negative, got {bandwidth}"
            )));
        }
        self.bandwidth = bandwidth;
        Ok(self)
    }

    /// Degeneracy of the lower environment band `k`.
    pub fn g(&self) -> usize {
        self.g
    }

    /// Degeneracy of the upper environment band `k'`.
    pub fn g_prime(&self) -> usize {
        self.g_prime
    }

    /// Dimension `g + g'` of the cross-state subspace.
    pub fn dim(&self) -> usize {
        self.g + self.g_prime
    }

    pub fn delta_s(&self) -> f64 {
        self.delta_s
    }

    pub fn delta_c(&self) -> f64 {
        self.delta_c
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// `delta_s - delta_c`.
    pub fn detuning(&self) -> f64 {
        self.delta_s - self.delta_c
    }

    /// True when both pairs describe the same `(g, g')` subspace.
    pub fn same_subspace(&self, other: &BandPair) -> bool {
        self.g == other.g && self.g_prime == other.g_prime
    }
}

/// State of the two-level system in a cross-state label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CentralState {
    Ground,
    Excited,
}

/// One cross state: `|0, k':m'>` or `|1, k:m>`. `level` is zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub central: CentralState,
    pub level: usize,
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.central {
            CentralState::Ground => write!(f, "|0,k':{}>", self.level + 1),
            CentralState::Excited => write!(f, "|1,k:{}>", self.level + 1),
        }
    }
}

/// Ordered basis of the cross-state subspace.
///
/// The `g'` ground-type states `|0, k':m'>` come first, followed by the `g`
/// excited-type states `|1, k:m>`. Every matrix in this crate uses this block
/// layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossStateBasis {
    band_pair: BandPair,
    labels: Vec<BasisLabel>,
}

impl CrossStateBasis {
    pub fn band_pair(&self) -> &BandPair {
        &self.band_pair
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Number of leading ground-type states (`g'`).
    pub fn ground_dim(&self) -> usize {
        self.band_pair.g_prime
    }

    pub fn is_excited(&self, index: usize) -> bool {
        index >= self.band_pair.g_prime
    }

    /// Diagonal of `sigma_z (x) 1` in this basis: -1 on ground-type states,
    /// +1 on excited-type states.
    pub fn sigma_z(&self, index: usize) -> f64 {
        if self.is_excited(index) {
            1.0
        } else {
            -1.0
        }
    }
}

pub fn build_cross_basis(band_pair: &BandPair) -> CrossStateBasis {
    let ground = (0..band_pair.g_prime).map(|level| BasisLabel {
        central: CentralState::Ground,
        level,
    });
    let excited = (0..band_pair.g).map(|level| BasisLabel {
        central: CentralState::Excited,
        level,
    });
    CrossStateBasis {
        band_pair: *band_pair,
        labels: ground.chain(excited).collect(),
    }
}

/// Number of `n`-spin basis states with exactly `k` spins up, `C(n, k)`.
pub fn band_degeneracy(n: usize, k: usize) -> Result<u64> {
    if k > n {
        return Err(Error::domain(format!(
            "excitation number {k} exceeds spin count {n}"
        )));
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::domain(format!("C({n}, {k}) overflows u64")));
        }
    }
    Ok(acc as u64)
}

/// Inversion `(g - g')/(g + g')` of the canonical state.
pub fn canonical_inversion(g: usize, g_prime: usize) -> f64 {
    (g as f64 - g_prime as f64) / (g + g_prime) as f64
}

/// Inverse temperature `ln(g'/g) / delta_s` of the canonical state.
pub fn canonical_beta(g: usize, g_prime: usize, delta_s: f64) -> Result<f64> {
    if g == 0 || g_prime == 0 {
        return Err(Error::domain("band degeneracies must be positive"));
    }
    if !(delta_s.is_finite() && delta_s > 0.0) {
        return Err(Error::domain(format!(
            "canonical temperature needs a positive splitting, got {delta_s}"
        )));
    }
    Ok((g_prime as f64 / g as f64).ln() / delta_s)
}

/// Excited-state population of the two-level system after relaxing against
/// `n` spins initially at inverse temperature `beta_c`:
/// `n/(n+1) * 1/(1 + exp(delta*beta_c)) + 1/(n+1)`.
///
/// `n` must be at least 1.
pub fn thermal_excited_population(n: usize, delta: f64, beta_c: f64) -> f64 {
    let n = n as f64;
    let fermi = 1.0 / (1.0 + (delta * beta_c).exp());
    n / (n + 1.0) * fermi + 1.0 / (n + 1.0)
}
