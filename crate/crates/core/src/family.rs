//! Named Hamiltonian families with seeded construction.
//!
//! Each family produces a cross-subspace Hamiltonian together with its basis.
//! Spin families derive `(g, g')` from `(n_env, band_k)`; abstract families
//! take them directly.

use std::fmt;
use std::str::FromStr;

use faer::Mat;

use crate::c64;
use crate::ensembles::{
    build_structured, sample_gue, sample_interaction_block, EnvSpectrum, HermitianOperator,
    RngSeed,
};
use crate::error::{Error, Result};
use crate::spinbath::{
    inhomogeneous_zeeman, project_to_cross_subspace, sample_star_couplings, IntraKind,
    SpinBathSpec,
};
use crate::subspace::{build_cross_basis, BandPair, CrossStateBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Gue,
    StructuredDegenerate,
    StructuredEquidistant,
    SpinStar,
    SpinRing,
    SpinInhomogeneous,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Gue,
        Family::StructuredDegenerate,
        Family::StructuredEquidistant,
        Family::SpinStar,
        Family::SpinRing,
        Family::SpinInhomogeneous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gue => "gue",
            Family::StructuredDegenerate => "structured_degenerate",
            Family::StructuredEquidistant => "structured_equidistant",
            Family::SpinStar => "spin_star",
            Family::SpinRing => "spin_ring",
            Family::SpinInhomogeneous => "spin_inhomogeneous",
        }
    }

    pub fn is_spin(self) -> bool {
        matches!(
            self,
            Family::SpinStar | Family::SpinRing | Family::SpinInhomogeneous
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown family '{s}'")))
    }
}

impl FromStr for IntraKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(IntraKind::None),
            "xx" => Ok(IntraKind::Xx),
            "xx_plus_yy" => Ok(IntraKind::XxPlusYy),
            "heisenberg" => Ok(IntraKind::Heisenberg),
            other => Err(Error::domain(format!("unknown intra-bath coupling '{other}'"))),
        }
    }
}

/// Parameters shared by all families; each family reads the subset it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyParams {
    pub g: usize,
    pub g_prime: usize,
    pub n_env: usize,
    pub band_k: usize,
    /// Entry scale of GUE matrices and Gaussian interaction blocks.
    pub scale: f64,
    /// Bandwidth of the equidistant structured family.
    pub delta_eps: f64,
    /// `delta_S - delta_C` for the structured families.
    pub detuning: f64,
    /// Half-width of the uniform distribution of star coupling entries.
    pub coupling_strength: f64,
    pub intra_kind: IntraKind,
    pub intra_strength: f64,
    /// Full width of the inhomogeneous Zeeman distribution around 1.
    pub zeeman_spread: f64,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams {
            g: 91,
            g_prime: 364,
            n_env: 14,
            band_k: 2,
            scale: 1.0,
            delta_eps: 20.0,
            detuning: 0.0,
            coupling_strength: 0.02,
            intra_kind: IntraKind::Xx,
            intra_strength: 0.04,
            zeeman_spread: 0.3,
        }
    }
}

/// One sampled Hamiltonian of a family.
#[derive(Debug, Clone)]
pub struct Instance {
    pub family: Family,
    pub basis: CrossStateBasis,
    pub hamiltonian: HermitianOperator,
    /// The `g x g'` coupling block for the structured families.
    pub interaction: Option<Mat<c64>>,
}

impl Instance {
    pub fn band_pair(&self) -> &BandPair {
        self.basis.band_pair()
    }
}

impl FamilyParams {
    /// Band pair the family would be built on.
    pub fn band_pair(&self, family: Family) -> Result<BandPair> {
        if family.is_spin() {
            Ok(self.spin_spec(family, RngSeed(0))?.band_pair()?)
        } else {
            BandPair::new(self.g, self.g_prime)
        }
    }

    /// Spin-bath description of a spin family; random parts drawn from `seed`.
    pub fn spin_spec(&self, family: Family, seed: RngSeed) -> Result<SpinBathSpec> {
        let n = self.n_env;
        if n == 0 {
            return Err(Error::domain("spin families need n_env >= 1"));
        }
        let couplings = sample_star_couplings(n, self.coupling_strength, seed.derive(0))?;
        let spec = match family {
            Family::SpinStar => SpinBathSpec::star(vec![1.0; n], couplings, self.band_k),
            Family::SpinRing => SpinBathSpec::star(vec![1.0; n], couplings, self.band_k)
                .with_ring(self.intra_kind, self.intra_strength),
            Family::SpinInhomogeneous => {
                let zeeman = inhomogeneous_zeeman(n, 1.0, self.zeeman_spread, seed.derive(1))?;
                SpinBathSpec::star(zeeman, couplings, self.band_k)
            }
            other => {
                return Err(Error::domain(format!("{other} is not a spin family")));
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn build_instance(family: Family, params: &FamilyParams, seed: RngSeed) -> Result<Instance> {
    if family.is_spin() {
        let spec = params.spin_spec(family, seed)?;
        let band_pair = spec.band_pair()?;
        let hamiltonian = project_to_cross_subspace(&spec)?;
        return Ok(Instance {
            family,
            basis: build_cross_basis(&band_pair),
            hamiltonian,
            interaction: None,
        });
    }
    let band_pair = BandPair::new(params.g, params.g_prime)?;
    match family {
        Family::Gue => {
            let hamiltonian = sample_gue(band_pair.dim(), params.scale, seed)?;
            Ok(Instance {
                family,
                basis: build_cross_basis(&band_pair),
                hamiltonian,
                interaction: None,
            })
        }
        Family::StructuredDegenerate | Family::StructuredEquidistant => {
            let (spectrum, band_pair) = if family == Family::StructuredDegenerate {
                (EnvSpectrum::Degenerate, band_pair)
            } else {
                (
                    EnvSpectrum::Equidistant {
                        bandwidth: params.delta_eps,
                    },
                    band_pair.with_bandwidth(params.delta_eps)?,
                )
            };
            let band_pair = band_pair.with_splittings(1.0 + params.detuning, 1.0)?;
            let v = sample_interaction_block(band_pair.g(), band_pair.g_prime(), params.scale, seed)?;
            let hamiltonian = build_structured(&band_pair, &spectrum, v.as_ref())?;
            Ok(Instance {
                family,
                basis: build_cross_basis(&band_pair),
                hamiltonian,
                interaction: Some(v),
            })
        }
        _ => unreachable!("spin families handled above"),
    }
}
