//! Interaction Hamiltonians in three tiers.
//!
//! * `full`: `Ω(σ₊Ô₀^L + σ₋Ô₀^L) + gη_c(σ₊ b̂ Ô₁^c â + h.c.)`
//! * `ld`: the Lamb-Dicke limit `Ω(σ₊+σ₋) + gη_c(σ₊ b̂ â + σ₋ b̂† â†)`
//! * `block`: closed 4-level blocks `{|g,M−1,N−1⟩, |e,M−1,N−1⟩, |g,M,N⟩, |e,M,N⟩}`
//!
//! All matrices are `H/ħ` with energies in units of `a = gη_c/2`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    ket_label, ok_diagonal, HermitianOperator, Qubit, SpaceDims, StateVector, C64, ZERO,
};

/// Hamiltonian fidelity tier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Block,
    Ld,
    Full,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Block => "block",
            Tier::Ld => "ld",
            Tier::Full => "full",
        })
    }
}

impl FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "block" => Ok(Tier::Block),
            "ld" => Ok(Tier::Ld),
            "full" => Ok(Tier::Full),
            _ => Err(Error::InvalidConfig(format!(
                "unknown tier '{s}' (expected block, ld or full)"
            ))),
        }
    }
}

/// Physical couplings in scaled units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Laser Rabi coupling Ω.
    pub omega: f64,
    /// Ion–cavity coupling g.
    pub g: f64,
    /// Laser Lamb-Dicke parameter η_L.
    pub eta_l: f64,
    /// Cavity Lamb-Dicke parameter η_c.
    pub eta_c: f64,
}

impl ModelParams {
    pub fn new(omega: f64, g: f64, eta_l: f64, eta_c: f64) -> Result<Self> {
        let p = Self {
            omega,
            g,
            eta_l,
            eta_c,
        };
        if ![omega, g, eta_l, eta_c].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidConfig(
                "model parameters must be finite".into(),
            ));
        }
        if eta_l < 0.0 || eta_c < 0.0 {
            return Err(Error::InvalidConfig(
                "Lamb-Dicke parameters must be non-negative".into(),
            ));
        }
        if p.a().is_nan() || p.a() <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "a = g·η_c/2 must be positive (got {})",
                p.a()
            )));
        }
        Ok(p)
    }

    /// Scale `a = 1`, `g·η_c = 2`, `Ω = √((μ/a)² − 1)`.
    pub fn from_mu_over_a(mu_over_a: f64, eta_l: f64, eta_c: f64) -> Result<Self> {
        if mu_over_a.is_nan() || mu_over_a < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "mu/a must be >= 1 (got {mu_over_a})"
            )));
        }
        if eta_c.is_nan() || eta_c <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "eta_c must be positive (got {eta_c})"
            )));
        }
        let omega = (mu_over_a * mu_over_a - 1.0).sqrt();
        Self::new(omega, 2.0 / eta_c, eta_l, eta_c)
    }

    /// Cavity sideband coupling `g·η_c`.
    pub fn coupling(&self) -> f64 {
        self.g * self.eta_c
    }

    /// `a = g·η_c / 2`.
    pub fn a(&self) -> f64 {
        0.5 * self.coupling()
    }

    /// `μ = √(a² + Ω²)`.
    pub fn mu(&self) -> f64 {
        self.a().hypot(self.omega)
    }
}

/// Closed block `B(M,N)` over `{|g,M−1,N−1⟩, |e,M−1,N−1⟩, |g,M,N⟩, |e,M,N⟩}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockSpec {
    pub m: usize,
    pub n: usize,
}

impl BlockSpec {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidConfig(format!(
                "block indices must be >= 1 (got B({m},{n}))"
            )));
        }
        Ok(Self { m, n })
    }

    /// The four block states in block order.
    pub fn states(&self) -> [(Qubit, usize, usize); 4] {
        let (m, n) = (self.m, self.n);
        [
            (Qubit::G, m - 1, n - 1),
            (Qubit::E, m - 1, n - 1),
            (Qubit::G, m, n),
            (Qubit::E, m, n),
        ]
    }

    pub fn fits(&self, dims: SpaceDims) -> bool {
        dims.contains(self.m, self.n)
    }

    /// Flat indices of the four states, or an error if the upper rung lies
    /// outside the truncated space.
    pub fn indices(&self, dims: SpaceDims) -> Result<[usize; 4]> {
        if !self.fits(dims) {
            return Err(Error::BlockDoesNotFit {
                m: self.m,
                n: self.n,
                cutoff_m: dims.phonon_cutoff(),
                cutoff_n: dims.photon_cutoff(),
            });
        }
        let s = self.states();
        Ok(s.map(|(i, m, n)| dims.index_unchecked(i, m, n)))
    }
}

impl fmt::Display for BlockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({},{})", self.m, self.n)
    }
}

fn set_pair(h: &mut DMatrix<C64>, r: usize, c: usize, v: f64) {
    h[(r, c)] = C64::from(v);
    h[(c, r)] = C64::from(v);
}

fn build_chain(
    dims: SpaceDims,
    carrier: impl Fn(usize) -> f64,
    sideband: impl Fn(usize, usize) -> f64,
) -> DMatrix<C64> {
    let mut h = DMatrix::from_element(dims.total(), dims.total(), ZERO);
    for m in 0..dims.phonon_cutoff() {
        for n in 0..dims.photon_cutoff() {
            let g = dims.index_unchecked(Qubit::G, m, n);
            let e = dims.index_unchecked(Qubit::E, m, n);
            set_pair(&mut h, e, g, carrier(m));
            if m >= 1 && n >= 1 {
                // σ₊ b̂ â |g,m,n⟩ = √m √n |e,m−1,n−1⟩
                let lower = dims.index_unchecked(Qubit::E, m - 1, n - 1);
                set_pair(&mut h, lower, g, sideband(m, n));
            }
        }
    }
    h
}

/// Lamb-Dicke limit Hamiltonian `Ω(σ₊+σ₋) + gη_c(σ₊ b̂ â + σ₋ b̂† â†)`.
pub fn build_ld(dims: SpaceDims, params: &ModelParams) -> HermitianOperator {
    let c = params.coupling();
    let h = build_chain(dims, |_| params.omega, |m, n| c * ((m * n) as f64).sqrt());
    HermitianOperator::new(h).expect("symmetric by construction")
}

/// `build_ld` with the sideband bond from each block's top state `|e,M,N⟩`
/// up to `|g,M+1,N+1⟩` removed. Its dynamics stays inside the blocks, which
/// makes it a harness for comparing against the `block` tier.
pub fn build_ld_severed(
    dims: SpaceDims,
    params: &ModelParams,
    blocks: &[BlockSpec],
) -> HermitianOperator {
    let op = build_ld(dims, params);
    let mut h = op.matrix().clone();
    for b in blocks {
        if dims.contains(b.m + 1, b.n + 1) {
            let top = dims.index_unchecked(Qubit::E, b.m, b.n);
            let above = dims.index_unchecked(Qubit::G, b.m + 1, b.n + 1);
            h[(top, above)] = ZERO;
            h[(above, top)] = ZERO;
        }
    }
    HermitianOperator::new(h).expect("symmetric by construction")
}

/// Full interaction Hamiltonian with `Ô₀` at `η_L` on the laser term and
/// `Ô₁` at `η_c` between `b̂` and `â` on the cavity term.
pub fn build_full(dims: SpaceDims, params: &ModelParams) -> HermitianOperator {
    let c = params.coupling();
    let o0: Vec<f64> = (0..dims.phonon_cutoff())
        .map(|m| ok_diagonal(0, params.eta_l, m))
        .collect();
    let o1: Vec<f64> = (0..dims.phonon_cutoff())
        .map(|m| ok_diagonal(1, params.eta_c, m))
        .collect();
    let h = build_chain(
        dims,
        |m| params.omega * o0[m],
        // â lowers m first, so Ô₁ is evaluated at m−1.
        |m, n| c * ((m * n) as f64).sqrt() * o1[m - 1],
    );
    HermitianOperator::new(h).expect("symmetric by construction")
}

/// Tridiagonal 4×4 block Hamiltonian with bonds `(Ω, gη_c√(MN), Ω)`.
pub fn build_block(spec: BlockSpec, params: &ModelParams) -> HermitianOperator {
    let mut h = DMatrix::from_element(4, 4, ZERO);
    let mid = params.coupling() * ((spec.m * spec.n) as f64).sqrt();
    set_pair(&mut h, 0, 1, params.omega);
    set_pair(&mut h, 1, 2, mid);
    set_pair(&mut h, 2, 3, params.omega);
    HermitianOperator::new(h).expect("symmetric by construction")
}

/// Builds the tier's Hamiltonian on the full truncated space. The `block`
/// tier has no single-space form and returns `None`.
pub fn build_dense(tier: Tier, dims: SpaceDims, params: &ModelParams) -> Option<HermitianOperator> {
    match tier {
        Tier::Block => None,
        Tier::Ld => Some(build_ld(dims, params)),
        Tier::Full => Some(build_full(dims, params)),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockAssignment {
    pub spec: BlockSpec,
    /// Amplitudes in block order.
    pub amplitudes: [C64; 4],
}

/// Splits a state into closed blocks. Every populated component `|i,m,n⟩` is
/// taken as a lower rung and lands in `B(m+1, n+1)`; states that would need a
/// component on some block's upper rung are rejected.
pub fn assign_blocks(initial: &StateVector) -> Result<Vec<BlockAssignment>> {
    let dims = initial.dims();
    let mut blocks: BTreeMap<BlockSpec, [C64; 4]> = BTreeMap::new();
    // rung (m, n) -> the populated state that claimed it
    let mut owner: BTreeMap<(usize, usize), (Qubit, usize, usize)> = BTreeMap::new();

    for (idx, amp) in initial.amplitudes().iter().enumerate() {
        if *amp == ZERO {
            continue;
        }
        let (i, m, n) = dims.unindex(idx);
        let spec = BlockSpec { m: m + 1, n: n + 1 };
        for rung in [(m, n), (m + 1, n + 1)] {
            if let Some(&(oi, om, on)) = owner.get(&rung) {
                if (om, on) != (m, n) {
                    return Err(Error::BlockAmbiguity {
                        state: format!(
                            "{} (overlaps block of {})",
                            ket_label(i, m, n),
                            ket_label(oi, om, on)
                        ),
                    });
                }
            }
        }
        owner.insert((m, n), (i, m, n));
        owner.insert((m + 1, n + 1), (i, m, n));
        blocks.entry(spec).or_insert([ZERO; 4])[i.index()] = *amp;
    }

    Ok(blocks
        .into_iter()
        .map(|(spec, amplitudes)| BlockAssignment { spec, amplitudes })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ladder_matrices, ok_matrix, ONE};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn dims(m: usize, n: usize) -> SpaceDims {
        SpaceDims::new(m, n).unwrap()
    }

    fn default_params() -> ModelParams {
        ModelParams::from_mu_over_a(4.0, 0.1, 0.1).unwrap()
    }

    fn elem(
        op: &HermitianOperator,
        d: SpaceDims,
        bra: (Qubit, usize, usize),
        ket: (Qubit, usize, usize),
    ) -> C64 {
        op.matrix()[(
            d.index(bra.0, bra.1, bra.2).unwrap(),
            d.index(ket.0, ket.1, ket.2).unwrap(),
        )]
    }

    #[test]
    fn params_derived_quantities() {
        let p = default_params();
        assert_abs_diff_eq!(p.a(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.omega, 15f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.mu(), 4.0, epsilon = 1e-14);
        assert!((p.mu().powi(2) - p.a().powi(2) - p.omega.powi(2)).abs() < 1e-12);
        assert!(ModelParams::new(1.0, 0.0, 0.1, 0.1).is_err());
        assert!(ModelParams::from_mu_over_a(0.5, 0.1, 0.1).is_err());
    }

    #[test]
    fn ld_matrix_elements() {
        let d = dims(3, 3);
        let p = default_params();
        let h = build_ld(d, &p);
        let e00 = (Qubit::E, 0, 0);
        assert_abs_diff_eq!(
            elem(&h, d, e00, (Qubit::G, 1, 1)).re,
            2.0 * p.a(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(elem(&h, d, e00, (Qubit::G, 0, 0)).re, p.omega);
        assert_eq!(elem(&h, d, (Qubit::G, 0, 0), (Qubit::G, 0, 0)), ZERO);
    }

    /// Operator-product oracle: Ω(σ₊+σ₋) + gη_c(σ₊ b̂ â + σ₋ b̂† â†).
    fn ld_oracle(d: SpaceDims, p: &ModelParams) -> DMatrix<C64> {
        let ops = ladder_matrices(d);
        let carrier = (&ops.sigma_plus + &ops.sigma_minus) * C64::from(p.omega);
        let side = &ops.sigma_plus * &ops.b * &ops.a;
        let side = &side + side.adjoint();
        carrier + side * C64::from(p.coupling())
    }

    #[test]
    fn ld_matches_operator_products() {
        let d = dims(4, 5);
        let p = default_params();
        let diff = build_ld(d, &p).matrix() - ld_oracle(d, &p);
        assert!(diff.camax() < 1e-14);
    }

    #[test]
    fn full_matches_operator_products() {
        let d = dims(5, 4);
        let p = ModelParams::new(1.3, 4.0, 0.2, 0.3).unwrap();
        let ops = ladder_matrices(d);
        let o0 = ok_matrix(d, 0, p.eta_l);
        let o1 = ok_matrix(d, 1, p.eta_c);
        let carrier = (&ops.sigma_plus * &o0 + &ops.sigma_minus * &o0) * C64::from(p.omega);
        let side = &ops.sigma_plus * &ops.b * &o1 * &ops.a;
        let oracle = carrier + (&side + side.adjoint()) * C64::from(p.coupling());
        let diff = build_full(d, &p).matrix() - oracle;
        assert!(diff.camax() < 1e-14);
    }

    #[test]
    fn full_matrix_elements() {
        let d = dims(3, 3);
        let p = default_params();
        let h = build_full(d, &p);
        let e00 = (Qubit::E, 0, 0);
        let damp = (-0.005f64).exp();
        assert_abs_diff_eq!(
            elem(&h, d, e00, (Qubit::G, 0, 0)).re,
            p.omega * damp,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            elem(&h, d, e00, (Qubit::G, 1, 1)).re,
            p.coupling() * damp,
            epsilon = 1e-14
        );
    }

    #[test]
    fn full_reduces_to_ld_in_lamb_dicke_limit() {
        let d = dims(5, 5);
        // η² underflows to zero while g·η_c = 2 is kept.
        let p = ModelParams::new(15f64.sqrt(), 2.0 / 1e-300, 0.0, 1e-300).unwrap();
        assert_eq!(build_full(d, &p).matrix(), build_ld(d, &p).matrix());

        let mut prev = f64::INFINITY;
        for &eta in &[1e-1, 1e-2, 1e-3, 1e-4] {
            let p = ModelParams::new(15f64.sqrt(), 2.0 / eta, eta, eta).unwrap();
            let diff = (build_full(d, &p).matrix() - build_ld(d, &p).matrix()).camax();
            assert!(diff < prev);
            prev = diff;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn builders_are_exactly_hermitian() {
        let d = dims(4, 4);
        let p = ModelParams::new(1.7, 3.0, 0.25, 0.4).unwrap();
        for op in [build_ld(d, &p), build_full(d, &p)] {
            assert!(crate::fock::hermitian_deviation(op.matrix()) <= 1e-14);
        }
        let b = build_block(BlockSpec::new(2, 3).unwrap(), &p);
        assert!(crate::fock::hermitian_deviation(b.matrix()) <= 1e-14);
    }

    #[test]
    fn ld_conserves_phonon_photon_difference() {
        let d = dims(5, 4);
        let p = default_params();
        let h = build_ld(d, &p);
        for r in 0..d.total() {
            for c in 0..d.total() {
                let (_, mr, nr) = d.unindex(r);
                let (_, mc, nc) = d.unindex(c);
                if mr as isize - nr as isize != mc as isize - nc as isize {
                    assert_eq!(h.matrix()[(r, c)], ZERO);
                }
            }
        }
    }

    #[test]
    fn block11_spectrum() {
        let p = default_params();
        let ev = build_block(BlockSpec::new(1, 1).unwrap(), &p).eigenvalues();
        let (mu, a) = (p.mu(), p.a());
        let expect = [-(mu + a), -(mu - a), mu - a, mu + a];
        for (got, want) in ev.iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }

        let p0 = ModelParams::new(0.0, 2.0 / 0.1, 0.1, 0.1).unwrap();
        let ev = build_block(BlockSpec::new(1, 1).unwrap(), &p0).eigenvalues();
        for (got, want) in ev.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn block_structure() {
        let p = ModelParams::new(1.1, 3.0, 0.0, 0.2).unwrap();
        for (m, n) in [(1, 1), (2, 1), (3, 4)] {
            let b = build_block(BlockSpec::new(m, n).unwrap(), &p);
            let h = b.matrix();
            assert_eq!(b.trace(), ZERO);
            assert_eq!(h[(0, 1)].re, 1.1);
            assert_abs_diff_eq!(h[(1, 2)].re, 0.6 * ((m * n) as f64).sqrt(), epsilon = 1e-15);
            assert_eq!(h[(2, 3)].re, 1.1);
            assert_eq!(h[(0, 2)], ZERO);
            assert_eq!(h[(0, 3)], ZERO);
            assert_eq!(h[(1, 3)], ZERO);
        }
    }

    #[test]
    fn block_matches_ld_submatrix() {
        let d = dims(5, 5);
        let p = default_params();
        let h = build_ld(d, &p);
        for (m, n) in [(1, 1), (2, 1), (3, 2)] {
            let spec = BlockSpec::new(m, n).unwrap();
            let idx = spec.indices(d).unwrap();
            let b = build_block(spec, &p);
            for r in 0..4 {
                for c in 0..4 {
                    assert_abs_diff_eq!(
                        (h.matrix()[(idx[r], idx[c])] - b.matrix()[(r, c)]).norm(),
                        0.0,
                        epsilon = 1e-14
                    );
                }
            }
        }
    }

    #[test]
    fn assign_ground_state() {
        let d = dims(3, 3);
        let psi = StateVector::basis(d, Qubit::G, 0, 0).unwrap();
        let blocks = assign_blocks(&psi).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].spec, BlockSpec::new(1, 1).unwrap());
        assert_eq!(blocks[0].amplitudes, [ONE, ZERO, ZERO, ZERO]);
    }

    #[test]
    fn assign_family_ii() {
        let d = dims(3, 2);
        let th = 0.4f64;
        let mut amps = DVector::from_element(d.total(), ZERO);
        amps[d.index(Qubit::G, 1, 0).unwrap()] = C64::from(th.cos());
        amps[d.index(Qubit::E, 0, 0).unwrap()] = C64::from(th.sin());
        let psi = StateVector::new(d, amps).unwrap();
        let blocks = assign_blocks(&psi).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].spec, BlockSpec { m: 1, n: 1 });
        assert_eq!(
            blocks[0].amplitudes,
            [ZERO, C64::from(th.sin()), ZERO, ZERO]
        );
        assert_eq!(blocks[1].spec, BlockSpec { m: 2, n: 1 });
        assert_eq!(
            blocks[1].amplitudes,
            [C64::from(th.cos()), ZERO, ZERO, ZERO]
        );
    }

    #[test]
    fn assign_rejects_upper_rung_population() {
        let d = dims(3, 3);
        let mut amps = DVector::from_element(d.total(), ZERO);
        amps[d.index(Qubit::G, 0, 0).unwrap()] = C64::from(0.6);
        amps[d.index(Qubit::E, 1, 1).unwrap()] = C64::from(0.8);
        let psi = StateVector::new(d, amps).unwrap();
        let err = assign_blocks(&psi).unwrap_err();
        assert!(matches!(err, Error::BlockAmbiguity { .. }));
        assert!(err.to_string().contains("|e,1,1⟩"), "{err}");
    }

    #[test]
    fn severed_ld_removes_only_block_tops() {
        let d = dims(4, 4);
        let p = default_params();
        let spec = BlockSpec::new(1, 1).unwrap();
        let full = build_ld(d, &p);
        let cut = build_ld_severed(d, &p, &[spec]);
        let diff = full.matrix() - cut.matrix();
        let top = d.index(Qubit::E, 1, 1).unwrap();
        let above = d.index(Qubit::G, 2, 2).unwrap();
        assert!(diff[(top, above)].norm() > 0.0);
        let nonzero = diff.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }
}
