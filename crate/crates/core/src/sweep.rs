//! (θ, T) grid sweeps and cutoff convergence studies.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{SpaceDims, C64, DEFAULT_TRUNCATION_TOL};
use crate::hamiltonian::{ModelParams, Tier};
use crate::initial::{make_initial, Family, InitialSpec};
use crate::measures::{
    effective_mode_count_from_populations, linear_entropy_from_purity, summarize_cut, CutSummary,
    Subsystem,
};
use crate::propagator::Evolver;

/// Inclusive evenly spaced grid in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        let g = Self { start, stop, count };
        g.validate()?;
        Ok(g)
    }

    pub fn point(value: f64) -> Self {
        Self {
            start: value,
            stop: value,
            count: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidConfig("grid count must be >= 1".into()));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.stop < self.start {
            return Err(Error::InvalidConfig(format!(
                "grid stop {} must be >= start {}",
                self.stop, self.start
            )));
        }
        if self.count == 1 && self.stop != self.start {
            return Err(Error::InvalidConfig(
                "single-point grid needs start == stop".into(),
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.stop
                } else {
                    self.start + k as f64 * step
                }
            })
            .collect()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `start:stop:count`, or a single value.
    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || Error::InvalidConfig(format!("invalid grid '{s}' (expected start:stop:count)"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [v] => Ok(Grid::point(v.parse().map_err(|_| bad())?)),
            [a, b, c] => Grid::new(
                a.parse().map_err(|_| bad())?,
                b.parse().map_err(|_| bad())?,
                c.parse().map_err(|_| bad())?,
            ),
            _ => Err(bad()),
        }
    }
}

/// How the linear-entropy dimension `d` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DMode {
    /// One `d` per subsystem from the populations over the whole sweep.
    Auto,
    /// The same `d` for every subsystem.
    Fixed(usize),
}

impl fmt::Display for DMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DMode::Auto => f.write_str("auto"),
            DMode::Fixed(d) => write!(f, "fixed:{d}"),
        }
    }
}

impl FromStr for DMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(DMode::Auto);
        }
        s.strip_prefix("fixed:")
            .and_then(|d| d.parse().ok())
            .filter(|&d| d >= 1)
            .map(DMode::Fixed)
            .ok_or_else(|| {
                Error::InvalidConfig(format!("invalid d-mode '{s}' (expected auto or fixed:<D>)"))
            })
    }
}

impl Serialize for DMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub tier: Tier,
    pub family: Family,
    pub beta: C64,
    pub mu_over_a: f64,
    pub eta_l: f64,
    pub eta_c: f64,
    pub theta_grid: Grid,
    pub t_grid: Grid,
    pub cutoff_m: usize,
    pub cutoff_n: usize,
    pub d_mode: DMode,
    pub truncation_tol: f64,
}

impl Default for SweepConfig {
    /// μ/a = 4, β = 1, θ and T over [0°, 180°] with 37 × 181 points,
    /// η_L = η_c = 0.1, cutoffs 14 (enough for β = 1 at the default
    /// truncation tolerance).
    fn default() -> Self {
        Self {
            tier: Tier::Block,
            family: Family::I,
            beta: C64::new(1.0, 0.0),
            mu_over_a: 4.0,
            eta_l: 0.1,
            eta_c: 0.1,
            theta_grid: Grid {
                start: 0.0,
                stop: 180.0,
                count: 37,
            },
            t_grid: Grid {
                start: 0.0,
                stop: 180.0,
                count: 181,
            },
            cutoff_m: 14,
            cutoff_n: 14,
            d_mode: DMode::Auto,
            truncation_tol: DEFAULT_TRUNCATION_TOL,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.theta_grid.validate()?;
        self.t_grid.validate()?;
        if self.theta_grid.start < 0.0 || self.theta_grid.stop > 180.0 {
            return Err(Error::InvalidConfig(
                "theta grid must lie within [0, 180]".into(),
            ));
        }
        if self.mu_over_a.is_nan() || self.mu_over_a < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "mu/a must be >= 1 (got {})",
                self.mu_over_a
            )));
        }
        if self.truncation_tol.is_nan() || self.truncation_tol <= 0.0 {
            return Err(Error::InvalidConfig(
                "truncation tolerance must be positive".into(),
            ));
        }
        self.dims()?;
        self.params()?;
        Ok(())
    }

    pub fn dims(&self) -> Result<SpaceDims> {
        SpaceDims::new(self.cutoff_m, self.cutoff_n)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::from_mu_over_a(self.mu_over_a, self.eta_l, self.eta_c)
    }

    pub fn with_cutoffs(&self, cutoff_m: usize, cutoff_n: usize) -> Self {
        Self {
            cutoff_m,
            cutoff_n,
            ..self.clone()
        }
    }
}

/// Measures at one (θ, T) grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub theta_deg: f64,
    #[serde(rename = "T_deg")]
    pub t_deg: f64,
    #[serde(rename = "N_A")]
    pub n_a: f64,
    #[serde(rename = "N_B")]
    pub n_b: f64,
    #[serde(rename = "N_C")]
    pub n_c: f64,
    #[serde(rename = "Sl_A")]
    pub sl_a: f64,
    #[serde(rename = "Sl_B")]
    pub sl_b: f64,
    #[serde(rename = "Sl_C")]
    pub sl_c: f64,
    #[serde(rename = "purity_A")]
    pub purity_a: f64,
    #[serde(rename = "purity_B")]
    pub purity_b: f64,
    #[serde(rename = "purity_C")]
    pub purity_c: f64,
    pub norm_error: f64,
    /// Population outside the initial blocks' supports (`NaN` when the
    /// initial state has no block decomposition).
    pub leakage: f64,
}

impl SweepRecord {
    pub const FIELDS: [&'static str; 13] = [
        "theta_deg",
        "T_deg",
        "N_A",
        "N_B",
        "N_C",
        "Sl_A",
        "Sl_B",
        "Sl_C",
        "purity_A",
        "purity_B",
        "purity_C",
        "norm_error",
        "leakage",
    ];

    pub fn values(&self) -> [f64; 13] {
        [
            self.theta_deg,
            self.t_deg,
            self.n_a,
            self.n_b,
            self.n_c,
            self.sl_a,
            self.sl_b,
            self.sl_c,
            self.purity_a,
            self.purity_b,
            self.purity_c,
            self.norm_error,
            self.leakage,
        ]
    }

    pub fn from_values(v: [f64; 13]) -> Self {
        Self {
            theta_deg: v[0],
            t_deg: v[1],
            n_a: v[2],
            n_b: v[3],
            n_c: v[4],
            sl_a: v[5],
            sl_b: v[6],
            sl_c: v[7],
            purity_a: v[8],
            purity_b: v[9],
            purity_c: v[10],
            norm_error: v[11],
            leakage: v[12],
        }
    }

    pub fn field(&self, name: &str) -> Option<f64> {
        Self::FIELDS
            .iter()
            .position(|f| *f == name)
            .map(|k| self.values()[k])
    }

    pub fn negativity(&self, s: Subsystem) -> f64 {
        match s {
            Subsystem::A => self.n_a,
            Subsystem::B => self.n_b,
            Subsystem::C => self.n_c,
        }
    }

    pub fn linear_entropy(&self, s: Subsystem) -> f64 {
        match s {
            Subsystem::A => self.sl_a,
            Subsystem::B => self.sl_b,
            Subsystem::C => self.sl_c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    /// Linear-entropy dimension used for A, B, C.
    pub effective_d: [usize; 3],
    /// Provenance remarks (renormalization, degenerate `d`, ...).
    pub notes: Vec<String>,
}

struct PointData {
    theta_deg: f64,
    t_deg: f64,
    cuts: [CutSummary; 3],
    norm_error: f64,
    leakage: f64,
}

/// Evaluates every (θ, T) point, θ outer and T inner.
///
/// θ rows run in parallel over a shared immutable evolver; rows are gathered
/// in grid order, so the output does not depend on scheduling.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    config.validate()?;
    let dims = config.dims()?;
    let params = config.params()?;
    let evolver = Evolver::new(config.tier, dims, params)?;
    let thetas = config.theta_grid.values();
    let times = config.t_grid.values();

    let rows: Vec<Vec<PointData>> = thetas
        .par_iter()
        .map(|&theta| {
            let at_first = |e: Error| e.at_point(theta, times[0]);
            let spec = InitialSpec::new(config.family, theta, config.beta).map_err(at_first)?;
            let psi0 = make_initial(&spec, dims, config.truncation_tol).map_err(at_first)?;
            let traj = evolver.prepare(&psi0).map_err(at_first)?;
            times
                .iter()
                .map(|&t| {
                    let psi = traj.at(t).map_err(|e| e.at_point(theta, t))?;
                    Ok(PointData {
                        theta_deg: theta,
                        t_deg: t,
                        cuts: Subsystem::ALL.map(|s| summarize_cut(&psi, s)),
                        norm_error: (psi.norm() - 1.0).abs(),
                        leakage: traj.leakage(&psi).unwrap_or(f64::NAN),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let points: Vec<&PointData> = rows.iter().flatten().collect();
    let effective_d = match config.d_mode {
        DMode::Fixed(d) => [d; 3],
        DMode::Auto => [0, 1, 2].map(|k| {
            effective_mode_count_from_populations(points.iter().map(|p| &p.cuts[k].populations))
        }),
    };

    let mut notes = Vec::new();
    if config.family == Family::Iii {
        notes.push(format!(
            "family iii: cat state renormalized; coherent expansion over m < {}",
            dims.phonon_cutoff() - 1
        ));
    }
    if effective_d.contains(&1) {
        notes.push("d = 1: linear entropy set to 0".into());
    }

    let records = points
        .iter()
        .map(|p| {
            let sl = |k: usize| {
                linear_entropy_from_purity(p.cuts[k].purity, p.cuts[k].rank, effective_d[k])
                    .map_err(|e| e.at_point(p.theta_deg, p.t_deg))
            };
            Ok(SweepRecord {
                theta_deg: p.theta_deg,
                t_deg: p.t_deg,
                n_a: p.cuts[0].negativity,
                n_b: p.cuts[1].negativity,
                n_c: p.cuts[2].negativity,
                sl_a: sl(0)?,
                sl_b: sl(1)?,
                sl_c: sl(2)?,
                purity_a: p.cuts[0].purity,
                purity_b: p.cuts[1].purity,
                purity_c: p.cuts[2].purity,
                norm_error: p.norm_error,
                leakage: p.leakage,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepOutput {
        records,
        effective_d,
        notes,
    })
}

/// Difference between the sweeps at two consecutive cutoffs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRung {
    pub from_cutoff: usize,
    pub to_cutoff: usize,
    /// Max over grid points and record fields of the absolute difference.
    pub max_abs_diff: f64,
}

/// Reruns the sweep with both cutoffs set to each ladder value and compares
/// consecutive rungs field by field.
pub fn convergence_study(config: &SweepConfig, ladder: &[usize]) -> Result<Vec<ConvergenceRung>> {
    if ladder.len() < 2 || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "cutoff ladder must be strictly increasing with at least two rungs".into(),
        ));
    }
    let sweeps = ladder
        .iter()
        .map(|&c| run_sweep(&config.with_cutoffs(c, c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ladder
        .windows(2)
        .zip(sweeps.windows(2))
        .map(|(cut, pair)| ConvergenceRung {
            from_cutoff: cut[0],
            to_cutoff: cut[1],
            max_abs_diff: max_record_diff(&pair[0].records, &pair[1].records),
        })
        .collect())
}

/// NaN fields compare equal to NaN and count as infinitely different from
/// any number.
pub fn max_record_diff(a: &[SweepRecord], b: &[SweepRecord]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.values().into_iter().zip(y.values()))
        .map(|(u, v)| match (u.is_nan(), v.is_nan()) {
            (true, true) => 0.0,
            (false, false) => (u - v).abs(),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Settings for a single GHZ-generation check from family (i).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzCheckConfig {
    pub tier: Tier,
    pub mu_over_a: f64,
    pub eta_l: f64,
    pub eta_c: f64,
    pub theta_deg: f64,
    pub q: u8,
    /// Evolve to the instant `μt = pπ`.
    pub p: u32,
    pub cutoff_m: usize,
    pub cutoff_n: usize,
}

impl Default for GhzCheckConfig {
    fn default() -> Self {
        Self {
            tier: Tier::Block,
            mu_over_a: 4.0,
            eta_l: 0.1,
            eta_c: 0.1,
            theta_deg: 0.0,
            q: 0,
            p: 1,
            cutoff_m: 2,
            cutoff_n: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzReport {
    pub t_deg: f64,
    pub fidelity: f64,
    pub negativity: [f64; 3],
    pub linear_entropy: [f64; 3],
    pub effective_d: [usize; 3],
    pub leakage: f64,
    pub norm_error: f64,
}

/// Fidelity of GHZ generation below which the check fails.
pub const GHZ_GATE: f64 = 1.0 - 1e-9;

/// Evolves `(cosθ|g⟩ + sinθ|e⟩)|0,0⟩` to `μt = pπ` and measures the result.
/// `d` for the linear entropies comes from the trajectory sampled every
/// degree up to the target instant.
pub fn ghz_check(cfg: &GhzCheckConfig) -> Result<GhzReport> {
    let dims = SpaceDims::new(cfg.cutoff_m, cfg.cutoff_n)?;
    let params = ModelParams::from_mu_over_a(cfg.mu_over_a, cfg.eta_l, cfg.eta_c)?;
    let t_deg = crate::propagator::instant_deg(&params, cfg.p);
    let spec = InitialSpec::new(Family::I, cfg.theta_deg, C64::new(0.0, 0.0))?;
    let psi0 = make_initial(&spec, dims, DEFAULT_TRUNCATION_TOL)?;
    let evolver = Evolver::new(cfg.tier, dims, params)?;
    let traj = evolver.prepare(&psi0)?;

    let mut samples: Vec<f64> = (0..).map(f64::from).take_while(|&t| t < t_deg).collect();
    samples.push(t_deg);
    let mut populations: [Vec<Vec<f64>>; 3] = Default::default();
    for &t in &samples {
        let psi = traj.at(t)?;
        for (k, s) in Subsystem::ALL.into_iter().enumerate() {
            populations[k].push(summarize_cut(&psi, s).populations);
        }
    }
    let effective_d = [0, 1, 2].map(|k| effective_mode_count_from_populations(&populations[k]));

    let psi = traj.at(t_deg)?;
    let cuts = Subsystem::ALL.map(|s| summarize_cut(&psi, s));
    let mut linear_entropy = [0.0; 3];
    for k in 0..3 {
        linear_entropy[k] =
            linear_entropy_from_purity(cuts[k].purity, cuts[k].rank, effective_d[k])?;
    }
    Ok(GhzReport {
        t_deg,
        fidelity: crate::propagator::ghz_fidelity(&psi, cfg.q)?,
        negativity: [0, 1, 2].map(|k| cuts[k].negativity),
        linear_entropy,
        effective_d,
        leakage: traj.leakage(&psi).unwrap_or(f64::NAN),
        norm_error: (psi.norm() - 1.0).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small(tier: Tier, family: Family) -> SweepConfig {
        SweepConfig {
            tier,
            family,
            theta_grid: Grid::new(0.0, 180.0, 7).unwrap(),
            t_grid: Grid::new(0.0, 180.0, 13).unwrap(),
            cutoff_m: 5,
            cutoff_n: 5,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn grid_values_are_inclusive() {
        assert_eq!(Grid::new(0.0, 180.0, 37).unwrap().values()[36], 180.0);
        assert_eq!(Grid::new(0.0, 180.0, 181).unwrap().values()[45], 45.0);
        assert_eq!(Grid::point(45.0).values(), vec![45.0]);
        assert!(Grid::new(10.0, 0.0, 3).is_err());
        assert!(Grid::new(0.0, 1.0, 0).is_err());
        assert_eq!(
            "0:180:37".parse::<Grid>().unwrap(),
            Grid::new(0.0, 180.0, 37).unwrap()
        );
        assert_eq!("90".parse::<Grid>().unwrap(), Grid::point(90.0));
        assert!("1:2".parse::<Grid>().is_err());
    }

    #[test]
    fn d_mode_parsing() {
        assert_eq!("auto".parse::<DMode>().unwrap(), DMode::Auto);
        assert_eq!("fixed:3".parse::<DMode>().unwrap(), DMode::Fixed(3));
        assert!("fixed:0".parse::<DMode>().is_err());
        assert!("fixed".parse::<DMode>().is_err());
        assert_eq!(DMode::Fixed(4).to_string(), "fixed:4");
    }

    #[test]
    fn ghz_point() {
        let cfg = SweepConfig {
            theta_grid: Grid::point(0.0),
            t_grid: Grid::point(45.0),
            ..SweepConfig::default()
        };
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.effective_d, [2, 2, 2]);
        let r = out.records[0];
        for s in Subsystem::ALL {
            assert_abs_diff_eq!(r.negativity(s), 0.5, epsilon = 1e-9);
            assert_abs_diff_eq!(r.linear_entropy(s), 1.0, epsilon = 1e-9);
        }
        assert_eq!(r.leakage, 0.0);
    }

    #[test]
    fn separable_at_time_zero() {
        for tier in [Tier::Block, Tier::Ld, Tier::Full] {
            let cfg = SweepConfig {
                t_grid: Grid::point(0.0),
                ..small(tier, Family::I)
            };
            for r in run_sweep(&cfg).unwrap().records {
                for s in Subsystem::ALL {
                    assert!(r.negativity(s).abs() < 1e-12);
                    assert!(r.linear_entropy(s).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn family_ii_phonon_qutrit_caps_entropy() {
        let cfg = small(Tier::Block, Family::Ii);
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.effective_d, [2, 3, 2]);
        let at = |th: f64, t: f64| {
            *out.records
                .iter()
                .find(|r| r.theta_deg == th && r.t_deg == t)
                .unwrap()
        };
        let r = at(90.0, 45.0);
        assert_abs_diff_eq!(r.sl_a, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.sl_c, 1.0, epsilon = 1e-9);
        assert!(r.sl_b < 1.0 - 1e-3);
    }

    #[test]
    fn records_are_row_major() {
        let cfg = small(Tier::Block, Family::I);
        let out = run_sweep(&cfg).unwrap();
        let th = cfg.theta_grid.values();
        let ts = cfg.t_grid.values();
        assert_eq!(out.records.len(), th.len() * ts.len());
        for (k, r) in out.records.iter().enumerate() {
            assert_eq!(r.theta_deg, th[k / ts.len()]);
            assert_eq!(r.t_deg, ts[k % ts.len()]);
        }
    }

    #[test]
    fn record_invariants_all_tiers() {
        for tier in [Tier::Block, Tier::Ld, Tier::Full] {
            for family in [Family::I, Family::Ii] {
                let out = run_sweep(&small(tier, family)).unwrap();
                for r in &out.records {
                    for s in Subsystem::ALL {
                        assert!(r.negativity(s) >= 0.0);
                        assert!((0.0..=1.0 + 1e-9).contains(&r.linear_entropy(s)), "{r:?}");
                    }
                    assert!(r.norm_error <= 1e-10);
                    assert!(r.leakage >= 0.0);
                    if tier == Tier::Block {
                        assert_eq!(r.leakage, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn phonon_negativity_closed_form_at_instants() {
        let cfg = small(Tier::Block, Family::I);
        for r in run_sweep(&cfg).unwrap().records {
            // T = 0, 45, 90, 135, 180 are the instants μt = pπ for μ = 4a.
            if r.t_deg % 45.0 == 0.0 {
                let expect = (2.0 * r.t_deg.to_radians()).sin().abs() / 2.0;
                assert_abs_diff_eq!(r.n_b, expect, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn phonon_and_photon_spectra_agree_for_family_i() {
        for tier in [Tier::Block, Tier::Ld] {
            for r in run_sweep(&small(tier, Family::I)).unwrap().records {
                assert_abs_diff_eq!(r.n_b, r.n_c, epsilon = 1e-10);
                assert_abs_diff_eq!(r.purity_b, r.purity_c, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn deterministic() {
        let cfg = small(Tier::Ld, Family::Ii);
        assert_eq!(run_sweep(&cfg).unwrap(), run_sweep(&cfg).unwrap());
    }

    #[test]
    fn fixed_d_below_rank_is_annotated_error() {
        let cfg = SweepConfig {
            d_mode: DMode::Fixed(2),
            ..small(Tier::Block, Family::Ii)
        };
        let err = run_sweep(&cfg).unwrap_err();
        assert!(matches!(err, Error::GridPoint { .. }), "{err}");
    }

    #[test]
    fn truncation_error_names_grid_point() {
        let cfg = SweepConfig {
            family: Family::Iii,
            ..small(Tier::Ld, Family::Iii)
        };
        match run_sweep(&cfg).unwrap_err() {
            Error::GridPoint { source, .. } => {
                assert!(matches!(*source, Error::TruncationInsufficient { .. }))
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn block_tier_convergence_is_exact() {
        for family in [Family::I, Family::Ii] {
            let rungs = convergence_study(&small(Tier::Block, family), &[3, 4, 6]).unwrap();
            assert!(rungs.iter().all(|r| r.max_abs_diff < 1e-14), "{rungs:?}");
        }
    }

    #[test]
    fn ld_convergence_family_i_is_finite_and_non_increasing() {
        let cfg = small(Tier::Ld, Family::I);
        let rungs = convergence_study(&cfg, &[4, 6, 8]).unwrap();
        assert_eq!(rungs.len(), 2);
        assert!(rungs.iter().all(|r| r.max_abs_diff.is_finite()));
        assert!(rungs[1].max_abs_diff <= rungs[0].max_abs_diff, "{rungs:?}");
    }

    #[test]
    fn ghz_check_defaults() {
        let r = ghz_check(&GhzCheckConfig::default()).unwrap();
        assert_abs_diff_eq!(r.t_deg, 45.0, epsilon = 1e-12);
        assert!(r.fidelity >= GHZ_GATE);
        for k in 0..3 {
            assert_abs_diff_eq!(r.negativity[k], 0.5, epsilon = 1e-9);
            assert_abs_diff_eq!(r.linear_entropy[k], 1.0, epsilon = 1e-9);
        }
        assert_eq!(r.effective_d, [2, 2, 2]);
    }

    #[test]
    fn ghz_check_orthogonal_theta() {
        let r = ghz_check(&GhzCheckConfig {
            theta_deg: 90.0,
            ..GhzCheckConfig::default()
        })
        .unwrap();
        assert!(r.fidelity < 1e-20);
    }

    #[test]
    fn ghz_check_ld_tier_leaks() {
        let r = ghz_check(&GhzCheckConfig {
            tier: Tier::Ld,
            cutoff_m: 6,
            cutoff_n: 6,
            ..GhzCheckConfig::default()
        })
        .unwrap();
        assert!(r.fidelity < GHZ_GATE);
        assert!(r.leakage > 0.0);
    }

    #[test]
    fn bad_ladder_rejected() {
        let cfg = small(Tier::Block, Family::I);
        assert!(convergence_study(&cfg, &[4]).is_err());
        assert!(convergence_study(&cfg, &[4, 4]).is_err());
    }
}
