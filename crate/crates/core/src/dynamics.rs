//! Exact time evolution on the cross subspace.
//!
//! Everything is propagated in the eigenbasis, so there is no time-step
//! error: `rho(t)_ab = rho(0)_ab exp(-i (E_a - E_b) t)`.

use faer::{Col, Mat, MatRef, Side};
use rayon::prelude::*;

use crate::analysis::EigenSystem;
use crate::c64;
use crate::ensembles::hermiticity_residual;
use crate::error::{Error, Result};
use crate::subspace::CrossStateBasis;

/// Tolerance for the trace, Hermiticity and positivity checks of a density operator.
pub const DENSITY_TOL: f64 = 1e-10;

/// Relative gap below which two energies are treated as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Default number of samples in [`default_time_grid`].
pub const DEFAULT_TIME_SAMPLES: usize = 2000;

#[derive(Debug, Clone)]
pub struct DensityOperator {
    mat: Mat<c64>,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(mat: Mat<c64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::shape(
                "square matrix",
                format!("{}x{}", mat.nrows(), mat.ncols()),
            ));
        }
        let residual = hermiticity_residual(mat.as_ref());
        if residual > DENSITY_TOL {
            return Err(Error::NotHermitian {
                residual,
                tolerance: DENSITY_TOL,
            });
        }
        let trace = trace(mat.as_ref());
        if (trace - 1.0).abs() > DENSITY_TOL {
            return Err(Error::domain(format!("density operator trace {trace} != 1")));
        }
        let min_eig = mat
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -DENSITY_TOL {
            return Err(Error::domain(format!(
                "density operator has negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { mat })
    }

    /// `|psi><psi|` for a normalized `psi`.
    pub fn pure(psi: &[c64]) -> Result<Self> {
        let n = psi.len();
        Self::new(Mat::from_fn(n, n, |i, j| psi[i] * psi[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }
}

pub fn trace(mat: MatRef<'_, c64>) -> f64 {
    (0..mat.nrows()).map(|i| mat[(i, i)].re).sum()
}

/// `Tr(rho^2)` of a Hermitian matrix.
pub fn purity(rho: MatRef<'_, c64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..rho.ncols() {
        for i in 0..rho.nrows() {
            acc += rho[(i, j)].norm_sqr();
        }
    }
    acc
}

/// `|1><1| (x) 1_k / g`: the two-level system excited, environment completely
/// mixed within band `k`.
pub fn initial_mixed_band_state(basis: &CrossStateBasis) -> DensityOperator {
    let d = basis.dim();
    let w = 1.0 / basis.band_pair().g() as f64;
    let mat = Mat::from_fn(d, d, |i, j| {
        if i == j && basis.is_excited(i) {
            c64::new(w, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    });
    DensityOperator { mat }
}

/// Bloch-z trajectory of the two-level system.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub bloch_z: Vec<f64>,
    /// Running time average of `bloch_z` from the first sample.
    pub running_average: Vec<f64>,
}

fn check_dims(eig: &EigenSystem, rho0: &DensityOperator) -> Result<()> {
    if eig.dim() != rho0.dim() {
        return Err(Error::shape(format!("dimension {}", eig.dim()), rho0.dim()));
    }
    Ok(())
}

/// `sigma_z (x) 1` in the eigenbasis: `Z_ab = sum_i s_i conj(v_ia) v_ib`.
fn sigma_z_eigenbasis(eig: &EigenSystem) -> Mat<c64> {
    let v = eig.vectors();
    let gp = eig.band_pair().g_prime();
    let signed = Mat::from_fn(v.nrows(), v.ncols(), |i, j| {
        if i < gp {
            -v[(i, j)]
        } else {
            v[(i, j)]
        }
    });
    v.adjoint() * &signed
}

fn rho_eigenbasis(eig: &EigenSystem, rho0: &DensityOperator) -> Mat<c64> {
    let v = eig.vectors();
    v.adjoint() * rho0.as_mat() * v
}

/// `<sigma_z>(t)` of the two-level system for each entry of `times`.
pub fn evolve_bloch_z(
    eig: &EigenSystem,
    rho0: &DensityOperator,
    times: &[f64],
) -> Result<Trajectory> {
    check_dims(eig, rho0)?;
    let d = eig.dim();
    let r = rho_eigenbasis(eig, rho0);
    let z = sigma_z_eigenbasis(eig);
    // M_ab = R_ab Z_ba, so <sz>(t) = Re sum_ab M_ab p_a conj(p_b)
    let m = Mat::from_fn(d, d, |a, b| r[(a, b)] * z[(b, a)]);
    let energies = eig.energies();
    let bloch_z: Vec<f64> = times
        .par_iter()
        .map(|&t| {
            let p = Col::from_fn(d, |a| c64::cis(-energies[a] * t));
            let p_conj = Col::from_fn(d, |a| p[a].conj());
            let q = &m * &p_conj;
            let mut acc = c64::new(0.0, 0.0);
            for a in 0..d {
                acc += p[a] * q[a];
            }
            acc.re.clamp(-1.0, 1.0)
        })
        .collect();
    let running_average = running_mean(times, &bloch_z);
    Ok(Trajectory {
        times: times.to_vec(),
        bloch_z,
        running_average,
    })
}

fn running_mean(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut area = 0.0;
    for k in 0..values.len() {
        if k == 0 {
            out.push(values[0]);
            continue;
        }
        area += 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
        let span = times[k] - times[0];
        out.push(if span > 0.0 { area / span } else { values[k] });
    }
    out
}

/// Full state `rho(t)` in the cross-state basis.
pub fn evolve_density(eig: &EigenSystem, rho0: &DensityOperator, t: f64) -> Result<Mat<c64>> {
    check_dims(eig, rho0)?;
    let d = eig.dim();
    let r = rho_eigenbasis(eig, rho0);
    let e = eig.energies();
    let rt = Mat::from_fn(d, d, |a, b| r[(a, b)] * c64::cis(-(e[a] - e[b]) * t));
    let v = eig.vectors();
    Ok(v * &rt * v.adjoint())
}

/// Index ranges of (numerically) degenerate levels in an ascending spectrum.
pub fn degenerate_clusters(energies: &[f64]) -> Vec<std::ops::Range<usize>> {
    let scale = energies.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let tol = DEGENERACY_TOL * scale;
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=energies.len() {
        if k == energies.len() || energies[k] - energies[k - 1] > tol {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Infinite-time average of `<sigma_z>`.
///
/// For a nondegenerate spectrum this is `sum_e rho_ee lambda_e`. Inside a
/// degenerate level the coherences of `rho0` do not dephase, so each
/// degenerate block contributes `Tr(P rho0 P sigma_z)`, which is independent
/// of the basis the eigensolver picked inside that level.
pub fn diagonal_ensemble_inversion(eig: &EigenSystem, rho0: &DensityOperator) -> Result<f64> {
    check_dims(eig, rho0)?;
    let v = eig.vectors();
    let gp = eig.band_pair().g_prime();
    let rho = rho0.as_mat();
    let mut total = 0.0;
    for cluster in degenerate_clusters(eig.energies()) {
        let vc = v.subcols(cluster.start, cluster.len());
        let r = vc.adjoint() * rho * vc;
        if cluster.len() == 1 {
            total += r[(0, 0)].re * eig.lambdas()[cluster.start];
            continue;
        }
        let signed = Mat::from_fn(vc.nrows(), vc.ncols(), |i, j| {
            if i < gp {
                -vc[(i, j)]
            } else {
                vc[(i, j)]
            }
        });
        let z = vc.adjoint() * &signed;
        for a in 0..cluster.len() {
            for b in 0..cluster.len() {
                total += (r[(a, b)] * z[(b, a)]).re;
            }
        }
    }
    Ok(total)
}

/// Mean of the piecewise-linear trajectory over `[t_start, t_end]`.
pub fn finite_window_average(traj: &Trajectory, t_start: f64, t_end: f64) -> Result<f64> {
    let (ts, ys) = (&traj.times, &traj.bloch_z);
    if ts.len() < 2 {
        return Err(Error::domain("trajectory needs at least two samples"));
    }
    let (first, last) = (ts[0], ts[ts.len() - 1]);
    if !(t_start < t_end && t_start >= first && t_end <= last) {
        return Err(Error::domain(format!(
            "window [{t_start}, {t_end}] is empty or outside [{first}, {last}]"
        )));
    }
    let interp = |k: usize, t: f64| {
        let (t0, t1) = (ts[k], ts[k + 1]);
        if t1 == t0 {
            ys[k]
        } else {
            ys[k] + (ys[k + 1] - ys[k]) * (t - t0) / (t1 - t0)
        }
    };
    let mut area = 0.0;
    for k in 0..ts.len() - 1 {
        let lo = ts[k].max(t_start);
        let hi = ts[k + 1].min(t_end);
        if hi > lo {
            area += 0.5 * (interp(k, lo) + interp(k, hi)) * (hi - lo);
        }
    }
    Ok(area / (t_end - t_start))
}

/// `samples` uniform times on `[0, T]` with `T = 50 / (median nearest-level gap)`.
pub fn default_time_grid(eig: &EigenSystem, samples: usize) -> Vec<f64> {
    let levels: Vec<f64> = degenerate_clusters(eig.energies())
        .into_iter()
        .map(|r| eig.energies()[r.start])
        .collect();
    let horizon = if levels.len() < 2 {
        50.0
    } else {
        let mut gaps: Vec<f64> = (0..levels.len())
            .map(|k| {
                let left = if k > 0 { levels[k] - levels[k - 1] } else { f64::INFINITY };
                let right = if k + 1 < levels.len() {
                    levels[k + 1] - levels[k]
                } else {
                    f64::INFINITY
                };
                left.min(right)
            })
            .collect();
        gaps.sort_unstable_by(f64::total_cmp);
        50.0 / gaps[gaps.len() / 2]
    };
    let samples = samples.max(2);
    (0..samples)
        .map(|k| horizon * k as f64 / (samples - 1) as f64)
        .collect()
}
