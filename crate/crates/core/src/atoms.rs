//! Cloning by stimulated emission in an ensemble of three-level atoms.
//!
//! Each atom has a ground level `g` and two degenerate upper levels `e1`,
//! `e2`, coupled to field modes 1 and 2 with a common strength `γ`. Since the
//! dynamics only depend on `γt`, time is always dimensionless.
//!
//! Every atom starts in the mixture `½(|e1><e1| + |e2><e2|)` and one photon
//! enters in mode 1. The Hamiltonian and the photon statistics are invariant
//! under atom permutations, so the `2^N` product configurations collapse onto
//! `N + 1` representatives: `m` atoms in `e1`, weight `C(N, m) / 2^N`.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    enumerate_sector, AtomConfig, FockBasisState, HermitianOperator, Level, Propagator, Sector,
    StateVector,
};
use crate::metrics::MetricReport;

/// Probabilities below zero by at most this much are rounding noise.
pub const NEGATIVE_PROB_TOL: f64 = 1e-12;
/// Allowed deviation of the total probability from one.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Upper bound on the atom count accepted by [`AtomsSimConfig`].
pub const MAX_ATOMS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct AtomsSimConfig {
    pub n_atoms: usize,
    pub gamma_t_max: f64,
    pub steps: usize,
}

impl AtomsSimConfig {
    pub fn new(n_atoms: usize, gamma_t_max: f64, steps: usize) -> Result<Self> {
        if !(1..=MAX_ATOMS).contains(&n_atoms) {
            return Err(Error::Domain(format!(
                "n_atoms must be in 1..={MAX_ATOMS}, got {n_atoms}"
            )));
        }
        if !(gamma_t_max.is_finite() && gamma_t_max > 0.0) {
            return Err(Error::Domain(format!(
                "gamma_t_max must be positive, got {gamma_t_max}"
            )));
        }
        if steps < 1 {
            return Err(Error::Domain("steps must be at least 1".into()));
        }
        Ok(Self {
            n_atoms,
            gamma_t_max,
            steps,
        })
    }

    /// `steps + 1` uniformly spaced points from 0 to `gamma_t_max` inclusive.
    pub fn time_grid(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|i| self.gamma_t_max * i as f64 / self.steps as f64)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct WeightedPureState {
    pub weight: f64,
    pub sector: Arc<Sector>,
    pub state: StateVector,
}

/// `H/γ` on one sector: `Σ_K σ+1^K a1 + σ+2^K a2 + h.c.`
pub fn build_hamiltonian(sector: &Sector) -> HermitianOperator {
    let mut h = HermitianOperator::zeros(sector.dim());
    for (i, state) in sector.basis().iter().enumerate() {
        for (atom, &level) in state.atoms.levels().iter().enumerate() {
            if level != Level::G {
                continue;
            }
            // absorption of a mode-1 photon: g -> e1, a1|k> = sqrt(k)|k-1>
            if state.k > 0 {
                let target = FockBasisState::new(
                    state.atoms.with_level(atom, Level::E1),
                    state.k - 1,
                    state.l,
                );
                let j = sector
                    .index_of(&target)
                    .expect("charge-conserving target lies in sector");
                h.add_coupling(j, i, C64::new((state.k as f64).sqrt(), 0.0));
            }
            if state.l > 0 {
                let target = FockBasisState::new(
                    state.atoms.with_level(atom, Level::E2),
                    state.k,
                    state.l - 1,
                );
                let j = sector
                    .index_of(&target)
                    .expect("charge-conserving target lies in sector");
                h.add_coupling(j, i, C64::new((state.l as f64).sqrt(), 0.0));
            }
        }
    }
    h
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Representative-per-`m` decomposition of the initial atom mixture with a
/// single photon in mode 1, ordered by `m = 0..=n_atoms`.
pub fn initial_ensemble(n_atoms: usize) -> Result<Vec<WeightedPureState>> {
    if n_atoms < 1 {
        return Err(Error::Domain("need at least one atom".into()));
    }
    let norm = 2f64.powi(n_atoms as i32);
    Ok((0..=n_atoms)
        .map(|m| {
            let sector = Arc::new(enumerate_sector(n_atoms, m + 1, n_atoms - m));
            let start = FockBasisState::new(AtomConfig::excited(n_atoms, m), 1, 0);
            let state = sector
                .basis_vector(&start)
                .expect("initial state lies in its sector");
            WeightedPureState {
                weight: binomial(n_atoms, m) / norm,
                sector,
                state,
            }
        })
        .collect())
}

/// `p(k, l)`: probability of `k` right (mode 1) and `l` wrong (mode 2)
/// photons.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhotonCountDistribution {
    probs: BTreeMap<(usize, usize), f64>,
}

impl PhotonCountDistribution {
    /// Builds a distribution, clipping tiny negative entries to zero.
    pub fn from_entries(entries: impl IntoIterator<Item = ((usize, usize), f64)>) -> Result<Self> {
        let mut p = Self::default();
        for (kl, w) in entries {
            if w < -NEGATIVE_PROB_TOL || !w.is_finite() {
                return Err(Error::Numerical(format!(
                    "invalid probability {w:e} at {kl:?}"
                )));
            }
            p.add(kl, w.max(0.0));
        }
        Ok(p)
    }

    pub fn add(&mut self, kl: (usize, usize), w: f64) {
        *self.probs.entry(kl).or_insert(0.0) += w;
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.probs.get(&(k, l)).copied().unwrap_or(0.0)
    }

    /// Entries in `(k, l)` order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.probs.iter().map(|(&kl, &w)| (kl, w))
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// `p'(n)` before renormalization: total weight with `k + l = n`.
    pub fn by_total(&self) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for ((k, l), w) in self.iter() {
            *out.entry(k + l).or_insert(0.0) += w;
        }
        out
    }

    /// Same distribution with right and wrong photons exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            probs: self.probs.iter().map(|(&(k, l), &w)| ((l, k), w)).collect(),
        }
    }

    pub fn check_normalized(&self) -> Result<()> {
        let total = self.total();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Numerical(format!(
                "total probability {total} differs from 1"
            )));
        }
        Ok(())
    }

    /// Accumulates `weight |amp|^2` for every basis state of `sector`.
    pub fn accumulate(&mut self, weight: f64, sector: &Sector, state: &StateVector) {
        for (basis, prob) in sector.basis().iter().zip(state.probabilities()) {
            self.add(basis.photons(), weight * prob);
        }
    }
}

/// Per-sector propagators, built once and shared between members.
#[derive(Default)]
pub struct PropagatorCache {
    n_atoms: Option<usize>,
    entries: HashMap<(usize, usize), (Arc<Sector>, Arc<Propagator>)>,
}

impl PropagatorCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(
        &mut self,
        n_atoms: usize,
        charges: (usize, usize),
    ) -> Result<(Arc<Sector>, Arc<Propagator>)> {
        match self.n_atoms {
            Some(n) if n != n_atoms => {
                return Err(Error::Domain(format!(
                    "cache holds {n}-atom sectors, asked for {n_atoms}"
                )))
            }
            _ => self.n_atoms = Some(n_atoms),
        }
        if let Some(hit) = self.entries.get(&charges) {
            return Ok(hit.clone());
        }
        let sector = Arc::new(enumerate_sector(n_atoms, charges.0, charges.1));
        let prop = Arc::new(Propagator::new(&build_hamiltonian(&sector))?);
        self.entries.insert(charges, (sector.clone(), prop.clone()));
        Ok((sector, prop))
    }
}

/// A state with components in several sectors.
#[derive(Clone, Debug)]
pub struct SectorBlocks(pub Vec<(Arc<Sector>, StateVector)>);

impl SectorBlocks {
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|(_, s)| s.norm_sqr()).sum()
    }
}

struct PreparedBlock {
    sector: Arc<Sector>,
    propagator: Arc<Propagator>,
    coeffs: nalgebra::DVector<C64>,
    initial: StateVector,
}

/// Weighted ensemble with every component already expanded in its sector's
/// eigenbasis, so each time point costs one matrix-vector product per block.
pub struct PreparedEnsemble {
    members: Vec<(f64, Vec<PreparedBlock>)>,
}

impl PreparedEnsemble {
    pub fn new(members: &[(f64, SectorBlocks)], cache: &mut PropagatorCache) -> Result<Self> {
        let mut out = Vec::with_capacity(members.len());
        for (weight, blocks) in members {
            let mut prepared = Vec::with_capacity(blocks.0.len());
            for (sector, state) in &blocks.0 {
                let (cached, propagator) = cache.get(sector.n_atoms(), sector.charges())?;
                prepared.push(PreparedBlock {
                    coeffs: propagator.to_eigenbasis(state)?,
                    initial: state.clone(),
                    sector: cached,
                    propagator,
                });
            }
            out.push((*weight, prepared));
        }
        Ok(Self { members: out })
    }

    pub fn from_canonical(
        ensemble: &[WeightedPureState],
        cache: &mut PropagatorCache,
    ) -> Result<Self> {
        let members: Vec<_> = ensemble
            .iter()
            .map(|m| {
                (
                    m.weight,
                    SectorBlocks(vec![(m.sector.clone(), m.state.clone())]),
                )
            })
            .collect();
        Self::new(&members, cache)
    }

    /// Evolved members at `gamma_t`. At `gamma_t == 0` the prepared states
    /// are returned untouched rather than round-tripped through the eigenbasis.
    pub fn states_at(&self, gamma_t: f64) -> Vec<(f64, SectorBlocks)> {
        self.members
            .iter()
            .map(|(w, blocks)| {
                let evolved = blocks
                    .iter()
                    .map(|b| {
                        let state = if gamma_t == 0.0 {
                            b.initial.clone()
                        } else {
                            b.propagator.evolve_eigen(&b.coeffs, gamma_t)
                        };
                        (b.sector.clone(), state)
                    })
                    .collect();
                (*w, SectorBlocks(evolved))
            })
            .collect()
    }

    pub fn distribution_at(&self, gamma_t: f64) -> Result<PhotonCountDistribution> {
        let mut p = PhotonCountDistribution::default();
        for (w, blocks) in self.states_at(gamma_t) {
            for (sector, state) in &blocks.0 {
                p.accumulate(w, sector, state);
            }
        }
        p.check_normalized()?;
        Ok(p)
    }
}

/// `p(k, l)` of the evolved ensemble at `gamma_t`.
pub fn photon_distribution(
    ensemble: &[WeightedPureState],
    gamma_t: f64,
) -> Result<PhotonCountDistribution> {
    let mut cache = PropagatorCache::new();
    PreparedEnsemble::from_canonical(ensemble, &mut cache)?.distribution_at(gamma_t)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelityRow {
    pub gamma_t: f64,
    pub f_clones: Option<f64>,
    pub f_opt: Option<f64>,
    pub f_rand: Option<f64>,
    pub n_all: f64,
    pub n_right: f64,
}

impl FidelityRow {
    pub fn from_report(gamma_t: f64, r: &MetricReport) -> Self {
        Self {
            gamma_t,
            f_clones: r.f_clones,
            f_opt: r.f_opt,
            f_rand: r.f_rand,
            n_all: r.n_all,
            n_right: r.n_right,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FidelityCurve {
    pub rows: Vec<FidelityRow>,
}

impl FidelityCurve {
    /// Builds a curve from distributions already evaluated on a grid.
    pub fn from_distributions<'a>(
        points: impl IntoIterator<Item = (f64, &'a PhotonCountDistribution)>,
    ) -> Self {
        Self {
            rows: points
                .into_iter()
                .map(|(t, p)| FidelityRow::from_report(t, &MetricReport::from_distribution(p)))
                .collect(),
        }
    }
}

/// Evolves the canonical ensemble across the config's time grid.
pub fn simulate_distributions(
    config: &AtomsSimConfig,
) -> Result<Vec<(f64, PhotonCountDistribution)>> {
    let ensemble = initial_ensemble(config.n_atoms)?;
    let mut cache = PropagatorCache::new();
    let prepared = PreparedEnsemble::from_canonical(&ensemble, &mut cache)?;
    config
        .time_grid()
        .into_iter()
        .map(|t| Ok((t, prepared.distribution_at(t)?)))
        .collect()
}

/// Fidelities and photon numbers on the config's time grid.
pub fn simulate_time_series(config: &AtomsSimConfig) -> Result<FidelityCurve> {
    let dists = simulate_distributions(config)?;
    Ok(FidelityCurve::from_distributions(
        dists.iter().map(|(t, p)| (*t, p)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_emission_matrix() {
        let sector = enumerate_sector(1, 1, 0);
        let h = build_hamiltonian(&sector);
        assert_eq!(h.entries()[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(h.entries()[(1, 0)], C64::new(1.0, 0.0));
        assert_eq!(h.entries()[(0, 0)], C64::new(0.0, 0.0));
        assert_eq!(h.entries()[(1, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn stimulated_enhancement() {
        let sector = enumerate_sector(1, 2, 0);
        assert_eq!(sector.dim(), 2);
        let h = build_hamiltonian(&sector);
        assert_abs_diff_eq!(h.entries()[(0, 1)].re, 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        for n_atoms in 1..=3 {
            for n1 in 0..=n_atoms + 1 {
                for n2 in 0..=n_atoms + 1 - n1 {
                    let h = build_hamiltonian(&enumerate_sector(n_atoms, n1, n2));
                    assert_eq!(h.entries(), &h.entries().adjoint());
                }
            }
        }
    }

    #[test]
    fn ensemble_weights() {
        let e1 = initial_ensemble(1).unwrap();
        assert_eq!(e1.len(), 2);
        assert_eq!(e1[0].sector.charges(), (1, 1));
        assert_eq!(e1[1].sector.charges(), (2, 0));
        assert_eq!(
            e1.iter().map(|m| m.weight).collect::<Vec<_>>(),
            vec![0.5, 0.5]
        );

        let e2 = initial_ensemble(2).unwrap();
        assert_eq!(
            e2.iter().map(|m| m.weight).collect::<Vec<_>>(),
            vec![0.25, 0.5, 0.25]
        );

        for n in 1..=8 {
            let total: f64 = initial_ensemble(n).unwrap().iter().map(|m| m.weight).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
        assert!(initial_ensemble(0).is_err());
    }

    #[test]
    fn no_evolution_at_zero() {
        let p = photon_distribution(&initial_ensemble(1).unwrap(), 0.0).unwrap();
        assert_eq!(p.get(1, 0), 1.0);
        assert_abs_diff_eq!(p.total(), 1.0, epsilon = 1e-15);
        assert!(p.iter().all(|(kl, w)| kl == (1, 0) || w == 0.0));
    }

    #[test]
    fn stimulated_to_spontaneous_ratio() {
        let p = photon_distribution(&initial_ensemble(1).unwrap(), 0.01).unwrap();
        let ratio = p.get(2, 0) / p.get(1, 1);
        assert!((ratio - 2.0).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn negative_probabilities() {
        let p = PhotonCountDistribution::from_entries([((1, 0), 1.0), ((2, 0), -5e-13)]).unwrap();
        assert_eq!(p.get(2, 0), 0.0);
        assert!(PhotonCountDistribution::from_entries([((2, 0), -1e-9)]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(AtomsSimConfig::new(0, 1.0, 10).is_err());
        assert!(AtomsSimConfig::new(9, 1.0, 10).is_err());
        assert!(AtomsSimConfig::new(2, 0.0, 10).is_err());
        assert!(AtomsSimConfig::new(2, 1.0, 0).is_err());
        let c = AtomsSimConfig::new(2, 2.0, 4).unwrap();
        assert_eq!(c.time_grid(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn time_series_first_row() {
        let curve = simulate_time_series(&AtomsSimConfig::new(2, 1.0, 5).unwrap()).unwrap();
        assert_eq!(curve.rows.len(), 6);
        let first = &curve.rows[0];
        assert_eq!(
            (first.f_clones, first.f_opt, first.f_rand),
            (None, None, None)
        );
        assert_eq!((first.n_all, first.n_right), (1.0, 1.0));
        for w in curve.rows.windows(2) {
            assert!(w[0].gamma_t < w[1].gamma_t);
        }
        for row in &curve.rows {
            assert!(row.n_right <= row.n_all + 1e-12);
        }
    }

    #[test]
    fn short_time_single_atom() {
        let curve = simulate_time_series(&AtomsSimConfig::new(1, 0.01, 1).unwrap()).unwrap();
        let f = curve.rows[1].f_clones.unwrap();
        assert!((f - 5.0 / 6.0).abs() < 1e-3, "f_clones {f}");
    }
}
