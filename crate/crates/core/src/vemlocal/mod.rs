//! Local virtual element spaces, projectors and element matrices.

mod dofs;
mod projection;
mod stiffness;
mod tensor;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub use dofs::{dof_count, min_ell, DofLayout};
pub use projection::{
    build_pi0_grad, build_pi0_val, build_pi_nabla, consistency_gram_direct, recover_moments, PiNabla,
    ProjectionPack, VemElement,
};
pub use stiffness::{
    local_load, local_stiffness, local_stiffness_with, numerical_rank, EnlargementPolicy, LocalStiffness, MAX_EXTRA_ELL,
    RANK_TOL,
};
pub use tensor::{spectral_norm, DiffusionTensor};

/// Discretization method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MethodKind {
    /// Enhanced VEM with the identity (dofi-dofi) stabilization.
    #[serde(rename = "vem")]
    StandardVem,
    /// Stabilization-free enlarged enhanced VEM.
    #[serde(rename = "e2vem")]
    E2vem,
}

impl MethodKind {
    pub const ALL: [MethodKind; 2] = [MethodKind::StandardVem, MethodKind::E2vem];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::StandardVem => "vem",
            Self::E2vem => "e2vem",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodKind {
    type Err = crate::VemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "vem" | "standard" => Ok(Self::StandardVem),
            "e2vem" | "e2" => Ok(Self::E2vem),
            _ => Err(crate::VemError::InvalidInput(format!("unknown method '{s}' (expected vem or e2vem)"))),
        }
    }
}

#[cfg(test)]
mod tests;
