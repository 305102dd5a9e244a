//! Initial-state families and the GHZ target.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, Qubit, SpaceDims, StateVector, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `(cosθ|g⟩ + sinθ|e⟩)|0,0⟩`
    I,
    /// `(cosθ|g,1⟩ + sinθ|e,0⟩)|0⟩`
    Ii,
    /// `N(cosθ|g,β⟩ + sinθ|e,−β⟩)|0⟩`
    Iii,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::I => "i",
            Family::Ii => "ii",
            Family::Iii => "iii",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" => Ok(Family::I),
            "ii" => Ok(Family::Ii),
            "iii" => Ok(Family::Iii),
            _ => Err(Error::InvalidConfig(format!(
                "unknown family '{s}' (expected i, ii or iii)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialSpec {
    pub family: Family,
    pub theta_deg: f64,
    /// Coherent amplitude, used by family (iii) only.
    pub beta: C64,
}

impl InitialSpec {
    pub fn new(family: Family, theta_deg: f64, beta: C64) -> Result<Self> {
        check_theta(theta_deg)?;
        Ok(Self {
            family,
            theta_deg,
            beta,
        })
    }
}

fn check_theta(theta_deg: f64) -> Result<()> {
    if !(0.0..=180.0).contains(&theta_deg) {
        return Err(Error::Precondition(format!(
            "theta = {theta_deg} deg outside [0, 180]"
        )));
    }
    Ok(())
}

/// Builds the family's initial state.
///
/// Family (iii) expands `|±β⟩` over `m < phonon_cutoff − 1`: the top phonon
/// level is kept free so each populated `|i,m,0⟩` still has its block's
/// upper rung `|·,m+1,1⟩` inside the space. The truncation deficit of that
/// expansion is checked against `truncation_tol`, and the superposition is
/// renormalized because `⟨β|−β⟩ = e^{−2|β|²} ≠ 0`.
pub fn make_initial(
    spec: &InitialSpec,
    dims: SpaceDims,
    truncation_tol: f64,
) -> Result<StateVector> {
    check_theta(spec.theta_deg)?;
    let th = spec.theta_deg.to_radians();
    let (c, s) = (C64::from(th.cos()), C64::from(th.sin()));
    let mut amps = DVector::from_element(dims.total(), ZERO);
    match spec.family {
        Family::I => {
            amps[dims.index(Qubit::G, 0, 0)?] = c;
            amps[dims.index(Qubit::E, 0, 0)?] = s;
        }
        Family::Ii => {
            amps[dims.index(Qubit::G, 1, 0)?] = c;
            amps[dims.index(Qubit::E, 0, 0)?] = s;
        }
        Family::Iii => {
            let levels = dims.phonon_cutoff().saturating_sub(1);
            if levels == 0 {
                return Err(Error::OutOfRange {
                    coordinate: "phonon_cutoff",
                    value: dims.phonon_cutoff(),
                    bound: 2,
                });
            }
            let coh = coherent_amplitudes(spec.beta, levels, truncation_tol)?;
            for (m, amp) in coh.amplitudes.iter().enumerate() {
                // ⟨m|−β⟩ = (−1)^m ⟨m|β⟩
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                amps[dims.index(Qubit::G, m, 0)?] = c * amp;
                amps[dims.index(Qubit::E, m, 0)?] = s * amp * sign;
            }
        }
    }
    StateVector::normalized(dims, amps)
}

/// `((−1)^{1+q}/√2)(|g,0,0⟩ − i|e,1,1⟩)`.
pub fn ghz_target(q: u8, dims: SpaceDims) -> Result<StateVector> {
    if q > 1 {
        return Err(Error::Precondition(format!("q must be 0 or 1 (got {q})")));
    }
    let sign = if q == 0 { -1.0 } else { 1.0 };
    let w = sign * std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = DVector::from_element(dims.total(), ZERO);
    amps[dims.index(Qubit::G, 0, 0)?] = C64::new(w, 0.0);
    amps[dims.index(Qubit::E, 1, 1)?] = C64::new(0.0, -w);
    StateVector::new(dims, amps)
}
