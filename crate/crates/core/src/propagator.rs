//! Exact unitary evolution by eigendecomposition, and the closed-form
//! solution on block `B(1,1)`.
//!
//! Scaled time `T = a·t` is passed in degrees everywhere; the physical time
//! is `t = T_rad / a`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fock::{HermitianOperator, SpaceDims, StateVector, C64, ZERO};
use crate::hamiltonian::{assign_blocks, build_block, build_dense, ModelParams, Tier};
use crate::initial::ghz_target;

/// Physical time `t` for scaled time `T` in degrees.
pub fn physical_time(t_deg: f64, a: f64) -> f64 {
    t_deg.to_radians() / a
}

/// Scaled time (degrees) of the instant `μ t_p = pπ`.
pub fn instant_deg(params: &ModelParams, p: u32) -> f64 {
    p as f64 * 180.0 * params.a() / params.mu()
}

/// Time-evolution operator of a time-independent Hamiltonian.
#[derive(Clone, Debug)]
pub struct Propagator {
    hamiltonian: HermitianOperator,
    a: f64,
}

impl Propagator {
    /// Diagonalizes `hamiltonian` unless it already carries an eigensystem.
    pub fn new(hamiltonian: HermitianOperator, params: &ModelParams) -> Result<Self> {
        let hamiltonian = if hamiltonian.eigensystem().is_some() {
            hamiltonian
        } else {
            hamiltonian.with_eigensystem()?
        };
        Ok(Self {
            hamiltonian,
            a: params.a(),
        })
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// Eigenbasis coefficients `V†ψ`.
    pub fn spectral(&self, psi: &DVector<C64>) -> Result<DVector<C64>> {
        let eig = self
            .hamiltonian
            .eigensystem()
            .ok_or(Error::MissingEigensystem)?;
        if psi.len() != self.dim() {
            return Err(Error::Precondition(format!(
                "state length {} does not match propagator dimension {}",
                psi.len(),
                self.dim()
            )));
        }
        Ok(eig.vectors.ad_mul(psi))
    }

    /// `V e^{−iΛt} c` for eigenbasis coefficients `c`.
    pub fn from_spectral(&self, coeffs: &DVector<C64>, t_deg: f64) -> Result<DVector<C64>> {
        let eig = self
            .hamiltonian
            .eigensystem()
            .ok_or(Error::MissingEigensystem)?;
        let t = physical_time(t_deg, self.a);
        let phased = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(eig.values.iter())
                .map(|(c, &lam)| c * C64::from_polar(1.0, -lam * t)),
        );
        Ok(&eig.vectors * phased)
    }

    pub fn evolve_amplitudes(&self, psi: &DVector<C64>, t_deg: f64) -> Result<DVector<C64>> {
        self.from_spectral(&self.spectral(psi)?, t_deg)
    }

    /// `Ψ(T) = V e^{−iΛt} V† Ψ(0)`.
    pub fn evolve(&self, psi0: &StateVector, t_deg: f64) -> Result<StateVector> {
        Ok(StateVector::from_raw(
            psi0.dims(),
            self.evolve_amplitudes(psi0.amplitudes(), t_deg)?,
        ))
    }
}

/// Evolution of the whole truncated space under one tier.
#[derive(Clone, Debug)]
pub struct Evolver {
    tier: Tier,
    dims: SpaceDims,
    params: ModelParams,
    dense: Option<Propagator>,
}

impl Evolver {
    pub fn new(tier: Tier, dims: SpaceDims, params: ModelParams) -> Result<Self> {
        let dense = match build_dense(tier, dims, &params) {
            Some(h) => Some(Propagator::new(h, &params)?),
            None => None,
        };
        Ok(Self {
            tier,
            dims,
            params,
            dense,
        })
    }

    /// A dense evolver around a caller-supplied Hamiltonian.
    pub fn with_hamiltonian(
        tier: Tier,
        dims: SpaceDims,
        params: ModelParams,
        h: HermitianOperator,
    ) -> Result<Self> {
        if tier == Tier::Block || h.dim() != dims.total() {
            return Err(Error::Precondition(
                "custom Hamiltonian must span the full truncated space".into(),
            ));
        }
        Ok(Self {
            tier,
            dims,
            params,
            dense: Some(Propagator::new(h, &params)?),
        })
    }

    pub fn tier(&self) -> Tier {
        self.tier
    }

    pub fn dims(&self) -> SpaceDims {
        self.dims
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Projects `psi0` onto the eigenbasis once so that many time samples
    /// cost one matrix-vector product each.
    pub fn prepare(&self, psi0: &StateVector) -> Result<Trajectory<'_>> {
        if psi0.dims() != self.dims {
            return Err(Error::Precondition(
                "state dims differ from evolver dims".into(),
            ));
        }
        // Leakage support: assigned blocks' states, clipped to the space.
        let support = match assign_blocks(psi0) {
            Ok(blocks) => {
                let mut s = vec![false; self.dims.total()];
                for b in &blocks {
                    for (i, m, n) in b.spec.states() {
                        if self.dims.contains(m, n) {
                            s[self.dims.index_unchecked(i, m, n)] = true;
                        }
                    }
                }
                Some(s)
            }
            Err(e) if self.tier == Tier::Block => return Err(e),
            Err(_) => None,
        };

        let kind = match &self.dense {
            Some(prop) => Kind::Dense {
                prop,
                coeffs: prop.spectral(psi0.amplitudes())?,
            },
            None => {
                let mut parts = Vec::new();
                for b in assign_blocks(psi0)? {
                    let idx = b.spec.indices(self.dims)?;
                    let prop = Propagator::new(build_block(b.spec, &self.params), &self.params)?;
                    let coeffs = prop.spectral(&DVector::from_row_slice(&b.amplitudes))?;
                    parts.push(BlockPart { idx, prop, coeffs });
                }
                Kind::Blocks(parts)
            }
        };
        Ok(Trajectory {
            dims: self.dims,
            kind,
            support,
        })
    }

    pub fn evolve(&self, psi0: &StateVector, t_deg: f64) -> Result<StateVector> {
        self.prepare(psi0)?.at(t_deg)
    }
}

#[derive(Debug)]
struct BlockPart {
    idx: [usize; 4],
    prop: Propagator,
    coeffs: DVector<C64>,
}

#[derive(Debug)]
enum Kind<'a> {
    Dense {
        prop: &'a Propagator,
        coeffs: DVector<C64>,
    },
    Blocks(Vec<BlockPart>),
}

/// One initial state prepared for evaluation at arbitrary scaled times.
#[derive(Debug)]
pub struct Trajectory<'a> {
    dims: SpaceDims,
    kind: Kind<'a>,
    support: Option<Vec<bool>>,
}

impl Trajectory<'_> {
    pub fn at(&self, t_deg: f64) -> Result<StateVector> {
        let amps = match &self.kind {
            Kind::Dense { prop, coeffs } => prop.from_spectral(coeffs, t_deg)?,
            Kind::Blocks(parts) => {
                let mut out = DVector::from_element(self.dims.total(), ZERO);
                for part in parts {
                    let local = part.prop.from_spectral(&part.coeffs, t_deg)?;
                    for (k, &i) in part.idx.iter().enumerate() {
                        out[i] = local[k];
                    }
                }
                out
            }
        };
        Ok(StateVector::from_raw(self.dims, amps))
    }

    /// Population outside the initial state's block supports; `None` when
    /// the initial state has no block decomposition.
    pub fn leakage(&self, psi: &StateVector) -> Option<f64> {
        let support = self.support.as_ref()?;
        Some(
            psi.amplitudes()
                .iter()
                .zip(support)
                .filter(|(_, &inside)| !inside)
                .map(|(a, _)| a.norm_sqr())
                .sum(),
        )
    }
}

/// Closed-form amplitudes on `{|g,0,0⟩, |e,0,0⟩, |g,1,1⟩, |e,1,1⟩}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Block11Amplitudes {
    pub amplitudes: [C64; 4],
    /// True when `T` is not one of the instants `μt = pπ`, where the
    /// closed form is only an extrapolation.
    pub extrapolated: bool,
}

const INSTANT_TOL: f64 = 1e-9;

/// `(−1)^p (cosθ cos(aT), sinθ cos(aT), −i sinθ sin(aT), −i cosθ sin(aT))`
/// for an initial state `(cosθ|g⟩ + sinθ|e⟩)|0,0⟩` evolved to `μt = pπ`.
///
/// With `p_check` the instant is enforced. Without it, the sign `(−1)^p` is
/// continued as `e^{−iμt}` and the result is flagged as extrapolated unless
/// `T` happens to hit an instant.
pub fn analytic_block11(
    params: &ModelParams,
    theta_deg: f64,
    t_deg: f64,
    p_check: Option<u32>,
) -> Result<Block11Amplitudes> {
    let mu_t = params.mu() * physical_time(t_deg, params.a());
    let nearest = (mu_t / std::f64::consts::PI).round();
    let on_instant = (mu_t - nearest * std::f64::consts::PI).abs() <= INSTANT_TOL;

    let phase = match p_check {
        Some(p) => {
            if (mu_t - p as f64 * std::f64::consts::PI).abs() > INSTANT_TOL {
                return Err(Error::Precondition(format!(
                    "T = {t_deg} deg does not satisfy mu t = {p} pi (expected T = {} deg)",
                    instant_deg(params, p)
                )));
            }
            C64::from(if p % 2 == 0 { 1.0 } else { -1.0 })
        }
        None if on_instant => C64::from(if nearest as i64 % 2 == 0 { 1.0 } else { -1.0 }),
        None => C64::from_polar(1.0, -mu_t),
    };

    let th = theta_deg.to_radians();
    let at = t_deg.to_radians();
    let (ct, st) = (th.cos(), th.sin());
    let (ca, sa) = (at.cos(), at.sin());
    let amplitudes = [
        C64::new(ct * ca, 0.0),
        C64::new(st * ca, 0.0),
        C64::new(0.0, -st * sa),
        C64::new(0.0, -ct * sa),
    ]
    .map(|z| phase * z);
    Ok(Block11Amplitudes {
        amplitudes,
        extrapolated: !on_instant,
    })
}

/// `|⟨GHZ_q|ψ⟩|²`.
pub fn ghz_fidelity(psi: &StateVector, q: u8) -> Result<f64> {
    let target = ghz_target(q, psi.dims())?;
    Ok(target.inner(psi).norm_sqr())
}
