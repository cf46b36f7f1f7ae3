//! Invariant suite behind `stimclone verify`.
//!
//! Each check compares the library against an independent route (brute-force
//! enumeration, exact rationals, direct exponentiation, or a symmetry) and
//! reports the largest deviation it measured next to the tolerance it used.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atoms::{
    build_hamiltonian, initial_ensemble, photon_distribution, simulate_distributions,
    AtomsSimConfig, PhotonCountDistribution,
};
use crate::error::{Error, Result};
use crate::hilbert::{
    enumerate_sector, evolve_unitary, AtomConfig, FockBasisState, HermitianOperator, Level,
    StateVector,
};
use crate::metrics::{f_clones, f_opt, f_rand, optimal_fidelity};
use crate::pdc::{
    anticlone_fidelity_pdc, clone_fidelity_pdc, optimal_unot_fidelity, pdc_evolve_numeric,
    pdc_final_state_analytic, project_fixed_m, PdcParameters,
};
use crate::symmetry::{pdc_rotated_fidelities, universality_check, Su2Rotation};

pub const SECTOR_ORACLE: &str = "sector-oracle";
pub const UNITARITY: &str = "unitarity";
pub const NORMALIZATION: &str = "normalization";
pub const VACUUM_ZERO: &str = "vacuum-zero";
pub const BOUND_ORDERING: &str = "bound-ordering";
pub const SHORT_TIME: &str = "short-time";
pub const ENSEMBLE_REDUCTION: &str = "ensemble-reduction";
pub const PDC_OVERLAP: &str = "pdc-overlap";
pub const PDC_IDENTITY: &str = "pdc-identity";
pub const PDC_FIXED_M: &str = "pdc-fixed-m";
pub const ANTICLONE: &str = "anticlone";
pub const UNIVERSALITY: &str = "universality";
pub const PDC_UNIVERSALITY: &str = "pdc-universality";

/// Every check, in execution order.
pub const CHECK_NAMES: &[&str] = &[
    SECTOR_ORACLE,
    UNITARITY,
    NORMALIZATION,
    VACUUM_ZERO,
    BOUND_ORDERING,
    SHORT_TIME,
    ENSEMBLE_REDUCTION,
    PDC_OVERLAP,
    PDC_IDENTITY,
    PDC_FIXED_M,
    ANTICLONE,
    UNIVERSALITY,
    PDC_UNIVERSALITY,
];

pub mod tol {
    pub const UNITARITY: f64 = 1e-10;
    pub const COMPOSITION: f64 = 1e-9;
    pub const NORMALIZATION: f64 = 1e-10;
    pub const VACUUM: f64 = 1e-12;
    pub const BOUND_SLACK: f64 = 1e-9;
    pub const SHORT_TIME_FIDELITY: f64 = 1e-3;
    pub const SHORT_TIME_RATIO: f64 = 0.01;
    pub const ENSEMBLE: f64 = 1e-10;
    pub const PDC_OVERLAP: f64 = 1e-8;
    pub const PDC_DEFICIT: f64 = 1e-12;
    pub const FIXED_M: f64 = 1e-12;
    pub const UNIVERSALITY: f64 = 1e-9;
    pub const PDC_UNIVERSALITY: f64 = 1e-12;
}

/// Grid used by the atoms checks: `γt ∈ [0, 2]`, 101 points.
pub const GRID_MAX: f64 = 2.0;
pub const GRID_STEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub only: Option<String>,
    pub max_atoms: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            only: None,
            max_atoms: 6,
            seed: crate::symmetry::DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Largest measured deviation (0 for exact checks that hold).
    pub deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, deviation: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name,
            passed: deviation <= tolerance,
            deviation,
            tolerance,
            detail,
        }
    }

    fn exact(name: &'static str, failures: usize, detail: String) -> Self {
        Self {
            name,
            passed: failures == 0,
            deviation: failures as f64,
            tolerance: 0.0,
            detail,
        }
    }
}

struct Context {
    opts: VerifyOptions,
    curves: BTreeMap<usize, Vec<(f64, PhotonCountDistribution)>>,
}

impl Context {
    fn curve(&mut self, n_atoms: usize) -> Result<&[(f64, PhotonCountDistribution)]> {
        match self.curves.entry(n_atoms) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => {
                let config = AtomsSimConfig::new(n_atoms, GRID_MAX, GRID_STEPS)?;
                Ok(e.insert(simulate_distributions(&config)?))
            }
        }
    }

    fn atom_range(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.opts.max_atoms
    }
}

/// Runs the selected checks. Unknown names and an atom limit outside `1..=8`
/// are usage errors.
pub fn run(opts: &VerifyOptions) -> Result<Vec<CheckOutcome>> {
    if !(1..=crate::atoms::MAX_ATOMS).contains(&opts.max_atoms) {
        return Err(Error::Domain(format!(
            "max_atoms must be in 1..={}, got {}",
            crate::atoms::MAX_ATOMS,
            opts.max_atoms
        )));
    }
    let selected: Vec<&'static str> = match &opts.only {
        None => CHECK_NAMES.to_vec(),
        Some(name) => match CHECK_NAMES.iter().find(|&&c| c == name) {
            Some(&c) => vec![c],
            None => {
                return Err(Error::Domain(format!(
                    "unknown check '{name}', expected one of: {}",
                    CHECK_NAMES.join(", ")
                )))
            }
        },
    };
    let mut ctx = Context {
        opts: opts.clone(),
        curves: BTreeMap::new(),
    };
    selected
        .into_iter()
        .map(|name| run_one(&mut ctx, name))
        .collect()
}

fn run_one(ctx: &mut Context, name: &'static str) -> Result<CheckOutcome> {
    match name {
        SECTOR_ORACLE => Ok(sector_oracle(ctx.opts.max_atoms.min(3))),
        UNITARITY => unitarity(ctx.opts.seed),
        NORMALIZATION => normalization(ctx),
        VACUUM_ZERO => vacuum_zero(ctx),
        BOUND_ORDERING => bound_ordering(ctx),
        SHORT_TIME => short_time(ctx),
        ENSEMBLE_REDUCTION => ensemble_reduction(ctx.opts.max_atoms.min(3)),
        PDC_OVERLAP => pdc_overlap(),
        PDC_IDENTITY => Ok(pdc_identity()),
        PDC_FIXED_M => pdc_fixed_m(),
        ANTICLONE => Ok(anticlone()),
        UNIVERSALITY => universality(ctx.opts.max_atoms.min(3), ctx.opts.seed),
        PDC_UNIVERSALITY => pdc_universality(ctx.opts.seed),
        _ => unreachable!("check names are validated"),
    }
}

/// Every sector equals the matching slice of the filtered full product
/// space, for all `N1 + N2 <= n + 1`.
pub fn sector_oracle(max_atoms: usize) -> CheckOutcome {
    let mut failures = 0;
    let mut sectors = 0;
    for n in 0..=max_atoms {
        // full product space, grouped by charges
        let mut oracle: BTreeMap<(usize, usize), Vec<FockBasisState>> = BTreeMap::new();
        for code in 0..3usize.pow(n as u32) {
            let levels: Vec<Level> = (0..n)
                .map(|pos| Level::ALL[(code / 3usize.pow((n - 1 - pos) as u32)) % 3])
                .collect();
            let atoms = AtomConfig::new(levels);
            for k in 0..=n + 1 {
                for l in 0..=n + 1 - k {
                    let s = FockBasisState::new(atoms.clone(), k, l);
                    if s.charge1() + s.charge2() <= n + 1 {
                        oracle
                            .entry((s.charge1(), s.charge2()))
                            .or_default()
                            .push(s);
                    }
                }
            }
        }
        for n1 in 0..=n + 1 {
            for n2 in 0..=n + 1 - n1 {
                sectors += 1;
                let mut expected = oracle.remove(&(n1, n2)).unwrap_or_default();
                expected.sort();
                let sector = enumerate_sector(n, n1, n2);
                let index_ok = sector
                    .basis()
                    .iter()
                    .enumerate()
                    .all(|(i, s)| sector.index_of(s) == Some(i));
                if sector.basis() != expected.as_slice() || !index_ok {
                    failures += 1;
                }
            }
        }
        // anything left over would be a state outside every enumerated sector
        failures += oracle.len();
    }
    CheckOutcome::exact(
        SECTOR_ORACLE,
        failures,
        format!("{sectors} sectors, n_atoms <= {max_atoms}"),
    )
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> HermitianOperator {
    let mut h = HermitianOperator::zeros(dim);
    for i in 0..dim {
        h.add_coupling(i, i, C64::new(rng.random_range(-2.0..2.0), 0.0));
        for j in 0..i {
            h.add_coupling(
                i,
                j,
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            );
        }
    }
    h
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    let v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_vec(v.into_iter().map(|z| z / n).collect())
}

/// Norm preservation for 100 random Hermitian matrices (dim <= 50) plus
/// `U(t1 + t2) = U(t2) U(t1)`.
pub fn unitarity(seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut norm_dev: f64 = 0.0;
    let mut comp_dev: f64 = 0.0;
    for _ in 0..100 {
        let dim = rng.random_range(1..=50);
        let h = random_hermitian(&mut rng, dim);
        let psi = random_state(&mut rng, dim);
        let (t1, t2) = (rng.random_range(0.0..3.0), rng.random_range(0.0..3.0));
        let direct = evolve_unitary(&h, t1 + t2, &psi)?;
        let stepped = evolve_unitary(&h, t2, &evolve_unitary(&h, t1, &psi)?)?;
        norm_dev = norm_dev.max((direct.norm() - psi.norm()).abs());
        let diff = direct.amplitudes() - stepped.amplitudes();
        comp_dev = comp_dev.max(diff.norm());
    }
    let mut outcome = CheckOutcome::new(
        UNITARITY,
        norm_dev,
        tol::UNITARITY,
        format!("100 matrices; composition deviation {comp_dev:.3e}"),
    );
    outcome.passed &= comp_dev <= tol::COMPOSITION;
    Ok(outcome)
}

fn normalization(ctx: &mut Context) -> Result<CheckOutcome> {
    let mut dev: f64 = 0.0;
    for n in ctx.atom_range() {
        for (_, p) in ctx.curve(n)? {
            dev = dev.max((p.total() - 1.0).abs());
        }
    }
    Ok(CheckOutcome::new(
        NORMALIZATION,
        dev,
        tol::NORMALIZATION,
        format!(
            "n_atoms 1..={}, {} points",
            ctx.opts.max_atoms,
            GRID_STEPS + 1
        ),
    ))
}

fn vacuum_zero(ctx: &mut Context) -> Result<CheckOutcome> {
    let mut dev: f64 = 0.0;
    for n in ctx.atom_range() {
        for (_, p) in ctx.curve(n)? {
            dev = dev.max(p.get(0, 0).abs());
        }
    }
    Ok(CheckOutcome::new(
        VACUUM_ZERO,
        dev,
        tol::VACUUM,
        format!("max p(0,0), n_atoms 1..={}", ctx.opts.max_atoms),
    ))
}

fn ordering_excess(t: f64, p: &PhotonCountDistribution) -> Result<f64> {
    match (f_rand(p), f_clones(p), f_opt(p)) {
        (Ok(fr), Ok(fc), Ok(fo)) => Ok((fr - fc).max(fc - fo)),
        _ => Err(Error::Numerical(format!(
            "fidelity undefined at gamma_t = {t}"
        ))),
    }
}

/// Largest violation of `f_rand <= f_clones <= f_opt` over `γt > 0`.
pub fn bound_violation(curve: &[(f64, PhotonCountDistribution)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (t, p) in curve.iter().filter(|(t, _)| *t > 0.0) {
        worst = worst.max(ordering_excess(*t, p)?);
    }
    Ok(worst)
}

/// Earliest `γt > 0` at which the ordering is broken by more than `slack`.
pub fn first_violation(
    curve: &[(f64, PhotonCountDistribution)],
    slack: f64,
) -> Result<Option<f64>> {
    for (t, p) in curve.iter().filter(|(t, _)| *t > 0.0) {
        if ordering_excess(*t, p)? > slack {
            return Ok(Some(*t));
        }
    }
    Ok(None)
}

/// `|f_clones − f_opt|` at `gamma_t`.
pub fn optimality_gap(n_atoms: usize, gamma_t: f64) -> Result<f64> {
    let p = photon_distribution(&initial_ensemble(n_atoms)?, gamma_t)?;
    Ok((f_clones(&p)? - f_opt(&p)?).abs())
}

fn bound_ordering(ctx: &mut Context) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    let mut broken = Vec::new();
    for n in ctx.atom_range() {
        let curve = ctx.curve(n)?;
        worst = worst.max(bound_violation(curve)?);
        if let Some(t) = first_violation(curve, tol::BOUND_SLACK)? {
            broken.push(format!("n={n} from {t}"));
        }
    }
    let n = ctx.opts.max_atoms.min(6);
    let (early, late) = (optimality_gap(n, 0.05)?, optimality_gap(n, 0.5)?);
    let broken = if broken.is_empty() {
        "ordering holds".to_string()
    } else {
        format!("ordering broken at {}", broken.join(", "))
    };
    let mut outcome = CheckOutcome::new(
        BOUND_ORDERING,
        worst,
        tol::BOUND_SLACK,
        format!(
            "{broken}; n_atoms={n}: |f_clones - f_opt| = {early:.3e} at 0.05, {late:.3e} at 0.5"
        ),
    );
    outcome.passed &= early < late;
    Ok(outcome)
}

/// One atom at `γt = 0.01`: `f_clones ≈ 5/6` and `p(2,0)/p(1,1) ≈ 2`.
pub fn short_time_values() -> Result<(f64, f64)> {
    let p = photon_distribution(&initial_ensemble(1)?, 0.01)?;
    Ok((f_clones(&p)?, p.get(2, 0) / p.get(1, 1)))
}

fn short_time(_ctx: &mut Context) -> Result<CheckOutcome> {
    let (f, ratio) = short_time_values()?;
    let f_dev = (f - 5.0 / 6.0).abs();
    let r_dev = (ratio / 2.0 - 1.0).abs();
    let mut outcome = CheckOutcome::new(
        SHORT_TIME,
        f_dev,
        tol::SHORT_TIME_FIDELITY,
        format!("f_clones = {f:.6}, p(2,0)/p(1,1) = {ratio:.6}"),
    );
    outcome.passed &= r_dev <= tol::SHORT_TIME_RATIO;
    Ok(outcome)
}

/// `p(k, l)` from all `2^n` product configurations, each evolved on its own.
pub fn full_configuration_distribution(
    n_atoms: usize,
    gamma_t: f64,
) -> Result<PhotonCountDistribution> {
    let weight = 0.5f64.powi(n_atoms as i32);
    let mut p = PhotonCountDistribution::default();
    for bits in 0..(1usize << n_atoms) {
        let levels: Vec<Level> = (0..n_atoms)
            .map(|i| {
                if bits >> i & 1 == 1 {
                    Level::E1
                } else {
                    Level::E2
                }
            })
            .collect();
        let start = FockBasisState::new(AtomConfig::new(levels), 1, 0);
        let sector = enumerate_sector(n_atoms, start.charge1(), start.charge2());
        let psi = sector
            .basis_vector(&start)
            .expect("start state in its sector");
        let out = evolve_unitary(&build_hamiltonian(&sector), gamma_t, &psi)?;
        p.accumulate(weight, &sector, &out);
    }
    Ok(p)
}

fn ensemble_reduction(max_atoms: usize) -> Result<CheckOutcome> {
    let mut dev: f64 = 0.0;
    for n in 1..=max_atoms {
        let ensemble = initial_ensemble(n)?;
        for &t in &[0.0, 0.1, 0.5, 1.0, 2.0] {
            let reduced = photon_distribution(&ensemble, t)?;
            let full = full_configuration_distribution(n, t)?;
            for ((k, l), _) in reduced.iter().chain(full.iter()) {
                dev = dev.max((reduced.get(k, l) - full.get(k, l)).abs());
            }
        }
    }
    Ok(CheckOutcome::new(
        ENSEMBLE_REDUCTION,
        dev,
        tol::ENSEMBLE,
        format!("n_atoms 1..={max_atoms}"),
    ))
}

pub const PDC_OVERLAP_INPUTS: [usize; 4] = [0, 1, 2, 3];
pub const PDC_OVERLAP_TIMES: [f64; 4] = [0.1, 0.3, 0.6, 1.0];

/// Worst `1 − |<analytic|numeric>|` and worst norm deficit.
pub fn pdc_overlap_deviation() -> Result<(f64, f64)> {
    let mut overlap_dev: f64 = 0.0;
    let mut deficit: f64 = 0.0;
    for &n in &PDC_OVERLAP_INPUTS {
        for &t in &PDC_OVERLAP_TIMES {
            let params = PdcParameters::from_gamma_t(n, t)?;
            let analytic = pdc_final_state_analytic(&params)?;
            let numeric = pdc_evolve_numeric(n, t, params.cutoff)?;
            overlap_dev = overlap_dev.max(1.0 - analytic.overlap(&numeric)?.norm());
            deficit = deficit.max(analytic.norm_deficit().abs());
        }
    }
    Ok((overlap_dev, deficit))
}

fn pdc_overlap() -> Result<CheckOutcome> {
    let (overlap_dev, deficit) = pdc_overlap_deviation()?;
    let mut outcome = CheckOutcome::new(
        PDC_OVERLAP,
        overlap_dev,
        tol::PDC_OVERLAP,
        format!("N in 0..=3, gamma_t in {PDC_OVERLAP_TIMES:?}; norm deficit {deficit:.3e}"),
    );
    outcome.passed &= deficit < tol::PDC_DEFICIT;
    Ok(outcome)
}

/// Exact agreement of the summed and closed-form clone fidelity for
/// `1 <= N <= 10`, `N <= M <= N + 10`.
pub fn pdc_identity() -> CheckOutcome {
    let mut failures = 0;
    let mut cases = 0;
    for n in 1..=10u64 {
        for m in n..=n + 10 {
            cases += 1;
            match (clone_fidelity_pdc(n, m), optimal_fidelity(n, m)) {
                (Ok(a), Ok(b)) if a == b => {}
                _ => failures += 1,
            }
        }
    }
    CheckOutcome::exact(PDC_IDENTITY, failures, format!("{cases} (N, M) pairs"))
}

fn pdc_fixed_m() -> Result<CheckOutcome> {
    let mut dev: f64 = 0.0;
    for n in 1..=4usize {
        let state = pdc_final_state_analytic(&PdcParameters::from_gamma_t(n, 0.8)?)?;
        for m in n..=n + 8 {
            let c = project_fixed_m(&state, m)?;
            let exact = clone_fidelity_pdc(n as u64, m as u64)?
                .to_f64()
                .unwrap_or(f64::NAN);
            dev = dev.max((c.clone_fidelity()? - exact).abs());
        }
    }
    Ok(CheckOutcome::new(
        PDC_FIXED_M,
        dev,
        tol::FIXED_M,
        "numeric fixed-M clone fidelity vs exact, N 1..=4".into(),
    ))
}

/// Anti-clone fidelity equals `(N+1)/(N+2)` for `1 <= N <= 6`, `N < M <= N+8`.
pub fn anticlone() -> CheckOutcome {
    let mut failures = 0;
    let mut cases = 0;
    for n in 1..=6u64 {
        for m in n + 1..=n + 8 {
            cases += 1;
            match anticlone_fidelity_pdc(n, m) {
                Ok(f) if f == optimal_unot_fidelity(n) => {}
                _ => failures += 1,
            }
        }
    }
    CheckOutcome::exact(ANTICLONE, failures, format!("{cases} (N, M) pairs"))
}

/// Worst curve deviation over `count` seeded rotations and `n_atoms <= max_atoms`.
pub fn universality_deviation(max_atoms: usize, seed: u64, count: usize) -> Result<f64> {
    let mut dev: f64 = 0.0;
    for rot in Su2Rotation::seeded(seed, count) {
        for n in 1..=max_atoms {
            let config = AtomsSimConfig::new(n, GRID_MAX, GRID_STEPS / 2)?;
            dev = dev.max(universality_check(&rot, &config)?.max_deviation());
        }
    }
    Ok(dev)
}

fn universality(max_atoms: usize, seed: u64) -> Result<CheckOutcome> {
    let dev = universality_deviation(max_atoms, seed, 5)?;
    Ok(CheckOutcome::new(
        UNIVERSALITY,
        dev,
        tol::UNIVERSALITY,
        format!("5 rotations (seed {seed}), n_atoms 1..={max_atoms}"),
    ))
}

/// Worst deviation of rotated-frame fixed-`M` fidelities from the exact
/// values.
pub fn pdc_universality_deviation(seed: u64, count: usize) -> Result<f64> {
    let mut dev: f64 = 0.0;
    for rot in Su2Rotation::seeded(seed, count) {
        for n in 1..=2usize {
            for m in n..=n + 3 {
                let (clone, anti) = pdc_rotated_fidelities(&rot, n, m, 0.4)?;
                let exact = clone_fidelity_pdc(n as u64, m as u64)?
                    .to_f64()
                    .unwrap_or(f64::NAN);
                dev = dev.max((clone - exact).abs());
                if let Some(anti) = anti {
                    let exact = anticlone_fidelity_pdc(n as u64, m as u64)?
                        .to_f64()
                        .unwrap_or(f64::NAN);
                    dev = dev.max((anti - exact).abs());
                }
            }
        }
    }
    Ok(dev)
}

fn pdc_universality(seed: u64) -> Result<CheckOutcome> {
    let dev = pdc_universality_deviation(seed, 5)?;
    Ok(CheckOutcome::new(
        PDC_UNIVERSALITY,
        dev,
        tol::PDC_UNIVERSALITY,
        format!("5 rotations (seed {seed}), N 1..=2"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_check_is_usage_error() {
        let opts = VerifyOptions {
            only: Some("nope".into()),
            ..Default::default()
        };
        assert!(matches!(run(&opts), Err(Error::Domain(_))));
    }

    #[test]
    fn only_filters() {
        let opts = VerifyOptions {
            only: Some(PDC_IDENTITY.into()),
            ..Default::default()
        };
        let out = run(&opts).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].name, PDC_IDENTITY);
        assert!(out[0].passed);
    }

    #[test]
    fn reduced_run_passes() {
        let opts = VerifyOptions {
            max_atoms: 2,
            ..Default::default()
        };
        for outcome in run(&opts).unwrap() {
            if outcome.name == BOUND_ORDERING {
                // f_clones falls below f_rand for two atoms once γt passes ~1.1
                assert!(!outcome.passed);
                assert!(outcome.detail.contains("n=2 from"), "{}", outcome.detail);
            } else {
                assert!(outcome.passed, "{outcome:?}");
            }
        }
    }

    #[test]
    fn ordering_holds_at_short_times() {
        for n in 1..=4 {
            let config = AtomsSimConfig::new(n, 0.3, 30).unwrap();
            let curve = simulate_distributions(&config).unwrap();
            assert!(
                first_violation(&curve, tol::BOUND_SLACK).unwrap().is_none(),
                "n={n}"
            );
        }
    }
}
