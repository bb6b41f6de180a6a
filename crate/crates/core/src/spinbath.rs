//! Central spin coupled to `N` environment spins.
//!
//! Basis states are bitmasks over `N + 1` spins: bit 0 is the central spin,
//! bits `1..=N` the environment. A set bit is spin up (`sigma_z = +1`,
//! excited). The environment band of a state is the number of environment
//! spins up.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = delta_S/2 sz_S + sum_nu delta_nu/2 sz_nu
//!   + lambda sum_nu sum_ij gamma^nu_ij s_i^S s_j^nu
//!   + J sum_<nu,mu> (intra-bath bond)
//! ```
//!
//! The cross-state projection keeps only matrix elements between
//! `|0, band k+1>` and `|1, band k>` states; anything that leaves that
//! subspace is dropped.

use std::collections::HashMap;

use faer::Mat;
use rand::Rng;

use crate::c64;
use crate::ensembles::{HermitianOperator, RngSeed};
use crate::error::{Error, Result};
use crate::subspace::{band_degeneracy, BandPair};

/// Largest environment for the full `2^(N+1)` matrix (2048 x 2048 at `N = 10`).
pub const MAX_FULL_ENV_SPINS: usize = 10;
/// Largest environment accepted by the cross-state projection.
pub const MAX_PROJECTED_ENV_SPINS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
}

/// Intra-bath bond type between neighbouring environment spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum IntraKind {
    #[default]
    None,
    Xx,
    XxPlusYy,
    Heisenberg,
}

impl IntraKind {
    fn paulis(self) -> &'static [Pauli] {
        match self {
            IntraKind::None => &[],
            IntraKind::Xx => &[Pauli::X],
            IntraKind::XxPlusYy => &[Pauli::X, Pauli::Y],
            IntraKind::Heisenberg => &[Pauli::X, Pauli::Y, Pauli::Z],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Topology {
    /// No bonds between environment spins.
    #[default]
    Star,
    /// Nearest-neighbour bonds on a periodic chain.
    Ring,
}

/// Real `3 x 3` coupling tensor `gamma_ij` between `sigma_i` of the central
/// spin and `sigma_j` of one environment spin (`i, j` in x, y, z order).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CouplingTensor(pub [[f64; 3]; 3]);

impl CouplingTensor {
    /// `sx (x) sx + sy (x) sy`.
    pub fn flip_flop() -> Self {
        CouplingTensor([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
    }

    pub fn entries(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().flatten().copied()
    }
}

/// One computational basis state of the central spin plus environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinBasisState(pub u64);

impl SpinBasisState {
    pub fn new(central_up: bool, env_mask: u64) -> Self {
        SpinBasisState((env_mask << 1) | central_up as u64)
    }

    pub fn central_up(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn env_mask(self) -> u64 {
        self.0 >> 1
    }

    /// Number of environment spins up.
    pub fn band(self) -> u32 {
        self.env_mask().count_ones()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinBathSpec {
    /// Splitting `delta_S` of the central spin.
    pub central_splitting: f64,
    /// Zeeman splitting `delta_nu` of each environment spin.
    pub zeeman: Vec<f64>,
    /// Coupling tensor of each environment spin to the central spin.
    pub couplings: Vec<CouplingTensor>,
    /// Global factor `lambda` multiplying every coupling tensor.
    pub coupling_strength: f64,
    pub intra_kind: IntraKind,
    pub intra_strength: f64,
    pub topology: Topology,
    /// Lower band `k` of the band pair `(k, k+1)`.
    pub band_k: usize,
}

impl SpinBathSpec {
    /// Spin star: homogeneous or not, no intra-bath bonds, unit central
    /// splitting and unit coupling strength.
    pub fn star(zeeman: Vec<f64>, couplings: Vec<CouplingTensor>, band_k: usize) -> Self {
        SpinBathSpec {
            central_splitting: 1.0,
            zeeman,
            couplings,
            coupling_strength: 1.0,
            intra_kind: IntraKind::None,
            intra_strength: 0.0,
            topology: Topology::Star,
            band_k,
        }
    }

    pub fn with_ring(mut self, kind: IntraKind, strength: f64) -> Self {
        self.topology = Topology::Ring;
        self.intra_kind = kind;
        self.intra_strength = strength;
        self
    }

    pub fn with_band(mut self, band_k: usize) -> Self {
        self.band_k = band_k;
        self
    }

    pub fn n_env(&self) -> usize {
        self.zeeman.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_env();
        if n == 0 {
            return Err(Error::domain("spin bath needs at least one environment spin"));
        }
        if self.couplings.len() != n {
            return Err(Error::shape(
                format!("{n} coupling tensors"),
                self.couplings.len(),
            ));
        }
        if self.topology == Topology::Star && self.intra_kind != IntraKind::None {
            return Err(Error::domain("a spin star has no intra-bath coupling"));
        }
        if self.band_k + 1 > n {
            return Err(Error::domain(format!(
                "band pair ({}, {}) does not exist for {n} environment spins",
                self.band_k,
                self.band_k + 1
            )));
        }
        let finite = self.zeeman.iter().all(|x| x.is_finite())
            && self.couplings.iter().all(|t| t.entries().all(f64::is_finite))
            && self.central_splitting.is_finite()
            && self.coupling_strength.is_finite()
            && self.intra_strength.is_finite();
        if !finite {
            return Err(Error::domain("spin bath parameters must be finite"));
        }
        if self.intra_strength < 0.0 {
            return Err(Error::domain("intra-bath strength must be non-negative"));
        }
        Ok(())
    }

    /// Band pair of the cross-state subspace for `band_k`.
    pub fn band_pair(&self) -> Result<BandPair> {
        self.validate()?;
        let n = self.n_env();
        let g = band_degeneracy(n, self.band_k)? as usize;
        let g_prime = band_degeneracy(n, self.band_k + 1)? as usize;
        let mean_zeeman = self.zeeman.iter().sum::<f64>() / n as f64;
        BandPair::new(g, g_prime)?.with_splittings(self.central_splitting.abs(), mean_zeeman.abs())
    }

    /// Environment bonds `(nu, mu)` (zero-based spin indices).
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_env();
        match self.topology {
            Topology::Star => Vec::new(),
            Topology::Ring if n < 2 => Vec::new(),
            Topology::Ring if n == 2 => vec![(0, 1)],
            Topology::Ring => (0..n).map(|nu| (nu, (nu + 1) % n)).collect(),
        }
    }

    fn terms(&self) -> Vec<PauliTerm> {
        let env_bit = |nu: usize| (nu + 1) as u32;
        let mut terms = vec![PauliTerm::single(self.central_splitting / 2.0, Pauli::Z, 0)];
        for (nu, &dz) in self.zeeman.iter().enumerate() {
            terms.push(PauliTerm::single(dz / 2.0, Pauli::Z, env_bit(nu)));
        }
        for (nu, tensor) in self.couplings.iter().enumerate() {
            for (a, &pa) in Pauli::ALL.iter().enumerate() {
                for (b, &pb) in Pauli::ALL.iter().enumerate() {
                    let coeff = self.coupling_strength * tensor.0[a][b];
                    if coeff != 0.0 {
                        terms.push(PauliTerm::pair(coeff, (pa, 0), (pb, env_bit(nu))));
                    }
                }
            }
        }
        if self.intra_strength != 0.0 {
            for (nu, mu) in self.bonds() {
                for &p in self.intra_kind.paulis() {
                    terms.push(PauliTerm::pair(
                        self.intra_strength,
                        (p, env_bit(nu)),
                        (p, env_bit(mu)),
                    ));
                }
            }
        }
        terms
    }
}

/// `coeff * prod sigma` acting on distinct bits.
#[derive(Debug, Clone)]
struct PauliTerm {
    coeff: f64,
    ops: [(Pauli, u32); 2],
    len: usize,
}

impl PauliTerm {
    fn single(coeff: f64, p: Pauli, bit: u32) -> Self {
        PauliTerm {
            coeff,
            ops: [(p, bit), (p, bit)],
            len: 1,
        }
    }

    fn pair(coeff: f64, a: (Pauli, u32), b: (Pauli, u32)) -> Self {
        PauliTerm {
            coeff,
            ops: [a, b],
            len: 2,
        }
    }

    /// Image of `|state>`: returns `(state', amplitude)` with
    /// `term |state> = amplitude |state'>`.
    fn apply(&self, state: u64) -> (u64, c64) {
        let mut s = state;
        let mut amp = c64::new(self.coeff, 0.0);
        for &(p, bit) in &self.ops[..self.len] {
            let up = (s >> bit) & 1 == 1;
            match p {
                Pauli::X => s ^= 1 << bit,
                // sy|up> = i|down>, sy|down> = -i|up>
                Pauli::Y => {
                    amp *= if up { c64::new(0.0, 1.0) } else { c64::new(0.0, -1.0) };
                    s ^= 1 << bit;
                }
                Pauli::Z => {
                    if !up {
                        amp = -amp;
                    }
                }
            }
        }
        (s, amp)
    }
}

/// Environment masks of `n` spins with exactly `k` up, ascending.
pub fn band_masks(n: usize, k: usize) -> Vec<u64> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    // Gosper's hack: next larger integer with the same popcount
    let mut m: u64 = (1 << k) - 1;
    let limit = 1u64 << n;
    while m < limit {
        out.push(m);
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

/// Full-space states spanning the cross subspace of band pair `(k, k+1)`, in
/// cross-state order: central down with environment in band `k+1`, then
/// central up with environment in band `k`. Each group is bitmask-ascending.
pub fn cross_states(n_env: usize, band_k: usize) -> Vec<SpinBasisState> {
    let ground = band_masks(n_env, band_k + 1)
        .into_iter()
        .map(|m| SpinBasisState::new(false, m));
    let excited = band_masks(n_env, band_k)
        .into_iter()
        .map(|m| SpinBasisState::new(true, m));
    ground.chain(excited).collect()
}

/// Dense Hamiltonian on all `2^(N+1)` basis states, indexed by bitmask.
pub fn build_full_hamiltonian(spec: &SpinBathSpec) -> Result<HermitianOperator> {
    spec.validate()?;
    let n = spec.n_env();
    if n > MAX_FULL_ENV_SPINS {
        return Err(Error::Resource {
            what: "full spin-space Hamiltonian",
            n_env: n,
            limit: MAX_FULL_ENV_SPINS,
        });
    }
    let dim = 1usize << (n + 1);
    let terms = spec.terms();
    let mut mat = Mat::<c64>::zeros(dim, dim);
    for col in 0..dim {
        for term in &terms {
            let (row, amp) = term.apply(col as u64);
            mat[(row as usize, col)] += amp;
        }
    }
    HermitianOperator::new(mat)
}

/// `P H P` on the cross subspace of `spec.band_k`, built without forming the
/// full matrix.
pub fn project_to_cross_subspace(spec: &SpinBathSpec) -> Result<HermitianOperator> {
    spec.validate()?;
    let n = spec.n_env();
    if n > MAX_PROJECTED_ENV_SPINS {
        return Err(Error::Resource {
            what: "cross-subspace projection",
            n_env: n,
            limit: MAX_PROJECTED_ENV_SPINS,
        });
    }
    let states = cross_states(n, spec.band_k);
    let index: HashMap<u64, usize> = states.iter().enumerate().map(|(i, s)| (s.0, i)).collect();
    let terms = spec.terms();
    let dim = states.len();
    let mut mat = Mat::<c64>::zeros(dim, dim);
    for (col, state) in states.iter().enumerate() {
        for term in &terms {
            let (image, amp) = term.apply(state.0);
            if let Some(&row) = index.get(&image) {
                mat[(row, col)] += amp;
            }
        }
    }
    HermitianOperator::new(mat)
}

/// `n_env` random coupling tensors with entries uniform on `[-strength, strength]`.
pub fn sample_star_couplings(
    n_env: usize,
    strength: f64,
    seed: RngSeed,
) -> Result<Vec<CouplingTensor>> {
    if !(strength.is_finite() && strength > 0.0) {
        return Err(Error::domain(format!(
            "coupling strength must be positive, got {strength}"
        )));
    }
    let mut rng = seed.rng();
    Ok((0..n_env)
        .map(|_| {
            let mut t = [[0.0; 3]; 3];
            for row in t.iter_mut() {
                for x in row.iter_mut() {
                    *x = rng.random_range(-strength..=strength);
                }
            }
            CouplingTensor(t)
        })
        .collect())
}

/// `n_env` Zeeman splittings uniform on `[center - spread/2, center + spread/2]`.
pub fn inhomogeneous_zeeman(
    n_env: usize,
    center: f64,
    spread: f64,
    seed: RngSeed,
) -> Result<Vec<f64>> {
    if !(spread.is_finite() && spread >= 0.0 && center.is_finite()) {
        return Err(Error::domain(format!(
            "Zeeman spread must be finite and non-negative, got {spread}"
        )));
    }
    if spread == 0.0 {
        return Ok(vec![center; n_env]);
    }
    let mut rng = seed.rng();
    let half = spread / 2.0;
    Ok((0..n_env)
        .map(|_| rng.random_range(center - half..=center + half))
        .collect())
}
