//! Reduced density matrices, partial transpose, negativity and linear entropy
//! for the one-vs-rest cuts A|BC, B|AC and C|AB.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{hermitian_eigenvalues, HermitianOperator, SpaceDims, StateVector, C64};

/// Eigenvalues above `-NEG_EIGEN_TOL` count as numerical zeros.
pub const NEG_EIGEN_TOL: f64 = 1e-12;
/// Population below which a basis state counts as unoccupied.
pub const POPULATION_TOL: f64 = 1e-9;
/// Eigenvalues above this count toward the support rank of a density matrix.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subsystem {
    /// Ion internal state.
    A,
    /// Center-of-mass phonons.
    B,
    /// Cavity photons.
    C,
}

impl Subsystem {
    pub const ALL: [Subsystem; 3] = [Subsystem::A, Subsystem::B, Subsystem::C];

    pub fn axis(self) -> usize {
        match self {
            Subsystem::A => 0,
            Subsystem::B => 1,
            Subsystem::C => 2,
        }
    }

    pub fn dim(self, dims: SpaceDims) -> usize {
        dims.shape()[self.axis()]
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subsystem::A => "A",
            Subsystem::B => "B",
            Subsystem::C => "C",
        })
    }
}

/// Reduced density matrix of one subsystem.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub subsystem: Subsystem,
    pub matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        // ρ is Hermitian, so tr ρ² = Σ |ρ_ij|².
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Diagonal populations in the subsystem's number basis.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn support_rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > RANK_TOL).count()
    }
}

/// `ψ` reshaped so that rows index the kept subsystem and columns the rest.
fn matricize(psi: &StateVector, keep: Subsystem) -> DMatrix<C64> {
    let dims = psi.dims();
    let [_, mc, nc] = dims.shape();
    let amps = psi.amplitudes();
    match keep {
        Subsystem::A => DMatrix::from_fn(2, mc * nc, |i, rest| amps[i * mc * nc + rest]),
        Subsystem::B => DMatrix::from_fn(mc, 2 * nc, |m, rest| {
            let (i, n) = (rest / nc, rest % nc);
            amps[(i * mc + m) * nc + n]
        }),
        Subsystem::C => DMatrix::from_fn(nc, 2 * mc, |n, rest| amps[rest * nc + n]),
    }
}

/// `ρ^X = Tr_rest |ψ⟩⟨ψ|`.
pub fn reduce(psi: &StateVector, keep: Subsystem) -> DensityMatrix {
    let mat = matricize(psi, keep);
    DensityMatrix {
        subsystem: keep,
        matrix: &mat * mat.adjoint(),
    }
}

/// Partial transpose of a density matrix on the full tripartite space:
/// `⟨x|ρ^{T_X}|y⟩ = ⟨x'|ρ|y'⟩` where `x'`, `y'` swap their `X` coordinates.
pub fn partial_transpose_matrix(
    rho: &DMatrix<C64>,
    dims: SpaceDims,
    subsystem: Subsystem,
) -> DMatrix<C64> {
    let d = dims.total();
    assert_eq!(rho.nrows(), d, "density matrix does not match dims");
    let coords: Vec<[usize; 3]> = (0..d)
        .map(|k| {
            let (i, m, n) = dims.unindex(k);
            [i.index(), m, n]
        })
        .collect();
    let [_, mc, nc] = dims.shape();
    let flat = |c: [usize; 3]| (c[0] * mc + c[1]) * nc + c[2];
    let ax = subsystem.axis();
    DMatrix::from_fn(d, d, |r, c| {
        let (mut x, mut y) = (coords[r], coords[c]);
        std::mem::swap(&mut x[ax], &mut y[ax]);
        rho[(flat(x), flat(y))]
    })
}

/// `(|ψ⟩⟨ψ|)^{T_X}`.
pub fn partial_transpose(psi: &StateVector, subsystem: Subsystem) -> HermitianOperator {
    let amps = psi.amplitudes();
    let rho = amps * amps.adjoint();
    let pt = partial_transpose_matrix(&rho, psi.dims(), subsystem);
    HermitianOperator::new(pt).expect("partial transpose of a Hermitian matrix is Hermitian")
}

/// Modulus of the sum of negative eigenvalues of the partial transpose.
pub fn negativity(psi: &StateVector, subsystem: Subsystem) -> f64 {
    partial_transpose(psi, subsystem)
        .eigenvalues()
        .iter()
        .filter(|&&l| l < -NEG_EIGEN_TOL)
        .map(|l| -l)
        .sum()
}

/// `Σ|λ|` over the spectrum of a Hermitian operator.
pub fn trace_norm(op: &HermitianOperator) -> f64 {
    op.eigenvalues().iter().map(|l| l.abs()).sum()
}

/// Schmidt coefficients of `ψ` across `X|rest`, descending; their squares
/// are the eigenvalues of `ρ^X`.
pub fn schmidt_values(psi: &StateVector, subsystem: Subsystem) -> Vec<f64> {
    let mut s: Vec<f64> = matricize(psi, subsystem)
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Negativity of a pure state from its Schmidt coefficients `σ`: the partial
/// transpose has eigenvalues `σ_i²` and `±σ_iσ_j`, so `N = ((Σσ)² − 1)/2`.
pub fn negativity_from_schmidt(values: &[f64]) -> f64 {
    let sum: f64 = values.iter().sum();
    let sq: f64 = values.iter().map(|s| s * s).sum();
    // (Σσ)² − Σσ² keeps the product-state case at exactly zero.
    ((sum * sum - sq) / 2.0).max(0.0)
}

/// Pure-state negativity across `X|rest` via the Schmidt decomposition.
pub fn pure_state_negativity(psi: &StateVector, subsystem: Subsystem) -> f64 {
    negativity_from_schmidt(&schmidt_values(psi, subsystem))
}

/// Per-subsystem quantities of a pure state needed by the sweep.
#[derive(Clone, Debug)]
pub(crate) struct CutSummary {
    pub negativity: f64,
    pub purity: f64,
    pub rank: usize,
    pub populations: Vec<f64>,
}

pub(crate) fn summarize_cut(psi: &StateVector, subsystem: Subsystem) -> CutSummary {
    let mat = matricize(psi, subsystem);
    let populations = mat.row_iter().map(|r| r.norm_squared()).collect();
    let sv = mat.svd(false, false).singular_values;
    let values: Vec<f64> = sv.iter().copied().collect();
    CutSummary {
        negativity: negativity_from_schmidt(&values),
        purity: values.iter().map(|s| s.powi(4)).sum(),
        rank: values.iter().filter(|s| *s * *s > RANK_TOL).count(),
        populations,
    }
}

/// `S_l = d/(d−1)·(1 − tr ρ²)`, with `S_l = 0` when `d = 1`.
pub fn linear_entropy(rho: &DensityMatrix, d: usize) -> Result<f64> {
    linear_entropy_from_purity(rho.purity(), rho.support_rank(), d)
}

pub fn linear_entropy_from_purity(purity: f64, rank: usize, d: usize) -> Result<f64> {
    if d == 0 || d < rank {
        return Err(Error::DimensionMismatch { d, rank });
    }
    if d == 1 {
        return Ok(0.0);
    }
    let d = d as f64;
    // A pure state can round to a purity a few ulps above one.
    Ok((d / (d - 1.0) * (1.0 - purity)).max(0.0))
}

/// Smallest `D ≥ 2` such that every sample keeps at most [`POPULATION_TOL`]
/// of its population on levels `≥ D`.
pub fn effective_mode_count(trajectory: &[DensityMatrix]) -> usize {
    effective_mode_count_from_populations(trajectory.iter().map(|r| r.populations()))
}

pub fn effective_mode_count_from_populations<I, P>(samples: I) -> usize
where
    I: IntoIterator<Item = P>,
    P: AsRef<[f64]>,
{
    let mut d = 1;
    for pops in samples {
        let pops = pops.as_ref();
        let mut tail = 0.0;
        let mut needed = 0;
        for (k, p) in pops.iter().enumerate().rev() {
            tail += p.max(0.0);
            if tail > POPULATION_TOL {
                needed = k + 1;
                break;
            }
        }
        d = d.max(needed);
    }
    d.max(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub negativity: f64,
    pub linear_entropy: f64,
    pub purity: f64,
    pub effective_d: usize,
}

/// Negativity, purity and linear entropy of one subsystem of a pure state.
pub fn measure(psi: &StateVector, subsystem: Subsystem, d: usize) -> Result<MeasureResult> {
    let cut = summarize_cut(psi, subsystem);
    Ok(MeasureResult {
        negativity: cut.negativity,
        linear_entropy: linear_entropy_from_purity(cut.purity, cut.rank, d)?,
        purity: cut.purity,
        effective_d: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{Qubit, ONE, ZERO};
    use crate::hamiltonian::ModelParams;
    use crate::initial::ghz_target;
    use crate::propagator::analytic_block11;
    use approx::assert_abs_diff_eq;

    fn dims(m: usize, n: usize) -> SpaceDims {
        SpaceDims::new(m, n).unwrap()
    }

    fn dm(sub: Subsystem, diag: &[f64]) -> DensityMatrix {
        DensityMatrix {
            subsystem: sub,
            matrix: DMatrix::from_diagonal(&DVector::from_iterator(
                diag.len(),
                diag.iter().map(|&x| C64::from(x)),
            )),
        }
    }

    #[test]
    fn reduce_product_state() {
        let d = dims(2, 2);
        let psi = StateVector::basis(d, Qubit::G, 0, 0).unwrap();
        let rho = reduce(&psi, Subsystem::A);
        assert_eq!(
            rho.matrix,
            DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO])
        );
    }

    #[test]
    fn reduce_ghz_to_phonons() {
        let d = dims(3, 2);
        let rho = reduce(&ghz_target(0, d).unwrap(), Subsystem::B);
        let expect = dm(Subsystem::B, &[0.5, 0.5, 0.0]);
        assert!((rho.matrix - expect.matrix).camax() < 1e-15);
    }

    #[test]
    fn reduce_block11_at_forty_five_degrees_is_pure() {
        let d = dims(2, 2);
        let p = ModelParams::from_mu_over_a(4.0, 0.1, 0.1).unwrap();
        let amps = analytic_block11(&p, 45.0, 45.0, Some(1))
            .unwrap()
            .amplitudes;
        let mut v = DVector::from_element(d.total(), ZERO);
        v[0] = amps[0];
        v[d.index(Qubit::E, 0, 0).unwrap()] = amps[1];
        v[d.index(Qubit::G, 1, 1).unwrap()] = amps[2];
        v[d.index(Qubit::E, 1, 1).unwrap()] = amps[3];
        let psi = StateVector::new(d, v).unwrap();
        let rho = reduce(&psi, Subsystem::A);
        let th = 45f64.to_radians();
        let off = th.sin() * th.cos();
        assert_abs_diff_eq!(rho.matrix[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.matrix[(0, 1)].re, off, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn ghz_partial_transpose_spectrum() {
        let d = dims(2, 2);
        let ev = partial_transpose(&ghz_target(0, d).unwrap(), Subsystem::A).eigenvalues();
        let expect = [-0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.5];
        for (a, b) in ev.iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        for s in Subsystem::ALL {
            assert_abs_diff_eq!(
                negativity(&ghz_target(1, d).unwrap(), s),
                0.5,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn product_state_is_ppt() {
        let d = dims(3, 3);
        let psi = StateVector::basis(d, Qubit::E, 1, 2).unwrap();
        for s in Subsystem::ALL {
            assert!(partial_transpose(&psi, s)
                .eigenvalues()
                .iter()
                .all(|&l| l >= -1e-15));
            assert_eq!(negativity(&psi, s), 0.0);
        }
    }

    #[test]
    fn linear_entropy_examples() {
        let pure = dm(Subsystem::B, &[1.0, 0.0, 0.0]);
        assert_eq!(linear_entropy(&pure, 2).unwrap(), 0.0);
        assert_eq!(linear_entropy(&pure, 5).unwrap(), 0.0);
        assert_abs_diff_eq!(
            linear_entropy(&dm(Subsystem::A, &[0.5, 0.5]), 2).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        let third = 1.0 / 3.0;
        assert_abs_diff_eq!(
            linear_entropy(&dm(Subsystem::B, &[third, third, third]), 3).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_eq!(linear_entropy(&pure, 1).unwrap(), 0.0);
        assert!(matches!(
            linear_entropy(&dm(Subsystem::B, &[third, third, third]), 2),
            Err(Error::DimensionMismatch { d: 2, rank: 3 })
        ));
    }

    #[test]
    fn mode_count() {
        let traj = [
            dm(Subsystem::B, &[1.0, 0.0, 0.0, 0.0]),
            dm(Subsystem::B, &[0.5, 0.5, 0.0, 0.0]),
        ];
        assert_eq!(effective_mode_count(&traj), 2);
        let traj = [dm(Subsystem::B, &[0.5, 0.3, 0.2, 1e-12])];
        assert_eq!(effective_mode_count(&traj), 3);
        let traj = [dm(Subsystem::B, &[1.0, 0.0, 0.0, 2e-9])];
        assert_eq!(effective_mode_count(&traj), 4);
        let traj = [dm(Subsystem::A, &[1.0, 0.0])];
        assert_eq!(effective_mode_count(&traj), 2);
    }
}
