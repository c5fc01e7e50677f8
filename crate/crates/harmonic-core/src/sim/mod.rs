//! Event-driven (Gillespie) simulation of the open harmonic process.
//!
//! Every site carries two removal channels (left, right), each firing at
//! the shifted harmonic rate of its pile; the lattice ends add logarithmic
//! injection channels of total rate `log(1+rho)`. For `N = 1` both
//! reservoirs act on the single site. Replicas run on counter-based
//! ChaCha streams (one stream per replica), so results are independent of
//! scheduling, and statistics merge in fixed replica order.

pub mod sampler;

pub use sampler::{sample_injection_size, RemovalSampler};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::model::rates::injection_total_rate;
use crate::model::{Configuration, ModelParams};

/// Simulation budget: number of events or amount of simulated time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Budget {
    Events(u64),
    Time(f64),
}

/// Simulation run configuration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimConfig {
    pub budget: Budget,
    pub replicas: usize,
    pub seed: u64,
    /// fraction of the budget discarded before recording (default 0.2)
    pub burn_in: f64,
}

impl SimConfig {
    pub fn new(budget: Budget, replicas: usize, seed: u64) -> Self {
        SimConfig {
            budget,
            replicas,
            seed,
            burn_in: 0.2,
        }
    }
}

/// Mutable simulation state: configuration, clock and the replica stream.
#[derive(Debug, Clone)]
pub struct SimState {
    pub config: Configuration,
    pub time: f64,
    rng: ChaCha8Rng,
}

impl SimState {
    /// Fresh state on an empty lattice, stream `replica` of `seed`.
    pub fn new(params: &ModelParams, seed: u64, replica: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(replica);
        SimState {
            config: Configuration::empty(params.n_sites()),
            time: 0.0,
            rng,
        }
    }
}

/// What a single step did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    /// `k` particles moved from `from` to `to` (both 0-based sites)
    Bulk { from: usize, to: usize, k: u64 },
    /// `k` particles left into a reservoir (`bond` 0 = left, N = right)
    Exit { bond: usize, k: u64 },
    /// `k` particles entered from a reservoir
    Entry { bond: usize, k: u64 },
    /// no active channel: the process is frozen
    Frozen,
}

/// One Gillespie step; returns the dwell time spent in the pre-step state
/// and the executed event. The dwell is infinite for a frozen state.
pub fn step(state: &mut SimState, params: &ModelParams, sampler: &mut RemovalSampler) -> (f64, Event) {
    let n_sites = params.n_sites();
    let lambda_l = injection_total_rate(params.rho_left());
    let lambda_r = injection_total_rate(params.rho_right());

    let mut total = lambda_l + lambda_r;
    for site in 0..n_sites {
        total += 2.0 * sampler.exit_rate(state.config.get(site));
    }
    if total <= 0.0 {
        return (f64::INFINITY, Event::Frozen);
    }

    let dwell = -(1.0 - state.rng.random::<f64>()).ln() / total;
    state.time += dwell;

    let mut pick = state.rng.random::<f64>() * total;
    // removal channels, left then right per site
    for site in 0..n_sites {
        let rate = sampler.exit_rate(state.config.get(site));
        for dir in [-1isize, 1] {
            if rate > 0.0 {
                if pick < rate {
                    let n = state.config.get(site);
                    let k = sampler.sample(n, state.rng.random::<f64>());
                    state.config.set(site, n - k);
                    let event = match (site as isize + dir).try_into() {
                        Ok(to) if to < n_sites => {
                            let to: usize = to;
                            state.config.set(to, state.config.get(to) + k);
                            Event::Bulk { from: site, to, k }
                        }
                        _ => Event::Exit {
                            bond: if dir < 0 { 0 } else { n_sites },
                            k,
                        },
                    };
                    return (dwell, event);
                }
                pick -= rate;
            }
        }
    }
    // injection channels
    for (bond, site, rho, lambda) in [
        (0usize, 0usize, params.rho_left(), lambda_l),
        (n_sites, n_sites - 1, params.rho_right(), lambda_r),
    ] {
        if lambda > 0.0 {
            if pick < lambda {
                let k = sample_injection_size(rho, state.rng.random::<f64>());
                state.config.set(site, state.config.get(site) + k);
                return (dwell, Event::Entry { bond, k });
            }
            pick -= lambda;
        }
    }
    // numerically possible only by rounding of `pick`; retry deterministically
    let n = state.config.get(n_sites - 1);
    if n > 0 {
        let k = sampler.sample(n, state.rng.random::<f64>());
        state.config.set(n_sites - 1, n - k);
        return (dwell, Event::Exit { bond: n_sites, k });
    }
    (dwell, Event::Frozen)
}

/// Time-weighted occupation statistics of one replica (or a merge).
#[derive(Debug, Clone, Serialize)]
pub struct ReplicaStats {
    pub n_sites: usize,
    /// events counted after burn-in
    pub events: u64,
    /// recorded (post burn-in) simulated time
    pub time: f64,
    /// time-integrals of eta_i
    pub occ_first: Vec<f64>,
    /// time-integrals of eta_i * eta_j, row-major N x N
    pub occ_second: Vec<f64>,
    /// per-site time-weighted occupation histograms
    pub histograms: Vec<Vec<f64>>,
    /// net signed particle flux across bonds 0..=N (0 = left reservoir)
    pub bond_flux: Vec<f64>,
}

impl ReplicaStats {
    fn empty(n_sites: usize) -> Self {
        ReplicaStats {
            n_sites,
            events: 0,
            time: 0.0,
            occ_first: vec![0.0; n_sites],
            occ_second: vec![0.0; n_sites * n_sites],
            histograms: vec![Vec::new(); n_sites],
            bond_flux: vec![0.0; n_sites + 1],
        }
    }

    fn record_state(&mut self, config: &Configuration, weight: f64) {
        for i in 0..self.n_sites {
            let ni = config.get(i) as f64;
            self.occ_first[i] += weight * ni;
            for j in 0..self.n_sites {
                self.occ_second[i * self.n_sites + j] += weight * ni * config.get(j) as f64;
            }
            let hist = &mut self.histograms[i];
            let bin = config.get(i) as usize;
            if hist.len() <= bin {
                hist.resize(bin + 1, 0.0);
            }
            hist[bin] += weight;
        }
        self.time += weight;
    }

    fn record_event(&mut self, event: &Event) {
        match *event {
            Event::Bulk { from, to, k } => {
                let kf = k as f64;
                if to > from {
                    self.bond_flux[to] += kf;
                } else {
                    self.bond_flux[from] -= kf;
                }
            }
            Event::Exit { bond, k } => {
                if bond == 0 {
                    self.bond_flux[0] -= k as f64;
                } else {
                    self.bond_flux[bond] += k as f64;
                }
            }
            Event::Entry { bond, k } => {
                if bond == 0 {
                    self.bond_flux[0] += k as f64;
                } else {
                    self.bond_flux[bond] -= k as f64;
                }
            }
            Event::Frozen => {}
        }
        self.events += 1;
    }

    fn merge(&mut self, other: &ReplicaStats) {
        assert_eq!(self.n_sites, other.n_sites);
        self.events += other.events;
        self.time += other.time;
        for (a, b) in self.occ_first.iter_mut().zip(&other.occ_first) {
            *a += b;
        }
        for (a, b) in self.occ_second.iter_mut().zip(&other.occ_second) {
            *a += b;
        }
        for (h, o) in self.histograms.iter_mut().zip(&other.histograms) {
            if h.len() < o.len() {
                h.resize(o.len(), 0.0);
            }
            for (a, b) in h.iter_mut().zip(o) {
                *a += b;
            }
        }
        for (a, b) in self.bond_flux.iter_mut().zip(&other.bond_flux) {
            *a += b;
        }
    }

    /// Time-averaged occupation per site.
    pub fn mean_occupation(&self) -> Vec<f64> {
        self.occ_first.iter().map(|&v| v / self.time).collect()
    }

    /// Time-averaged variance per site.
    pub fn variance(&self) -> Vec<f64> {
        (0..self.n_sites)
            .map(|i| {
                let m = self.occ_first[i] / self.time;
                self.occ_second[i * self.n_sites + i] / self.time - m * m
            })
            .collect()
    }

    /// Normalized occupation histogram of one site.
    pub fn normalized_histogram(&self, site: usize) -> Vec<f64> {
        self.histograms[site]
            .iter()
            .map(|&v| v / self.time)
            .collect()
    }

    /// Net flux across a bond per unit recorded time.
    pub fn flux_rate(&self, bond: usize) -> f64 {
        self.bond_flux[bond] / self.time
    }
}

/// Result of a multi-replica run: merged statistics plus the per-replica
/// pieces for scatter estimates.
#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub merged: ReplicaStats,
    pub per_replica: Vec<ReplicaStats>,
}

impl RunResult {
    /// Replica-scatter standard error of the per-site mean occupation.
    pub fn mean_standard_error(&self) -> Vec<f64> {
        let r = self.per_replica.len();
        let n = self.merged.n_sites;
        if r < 2 {
            return vec![f64::NAN; n];
        }
        (0..n)
            .map(|i| {
                let means: Vec<f64> = self
                    .per_replica
                    .iter()
                    .map(|st| st.occ_first[i] / st.time)
                    .collect();
                let avg = means.iter().sum::<f64>() / r as f64;
                let var =
                    means.iter().map(|m| (m - avg) * (m - avg)).sum::<f64>() / (r - 1) as f64;
                (var / r as f64).sqrt()
            })
            .collect()
    }
}

/// Run independent replicas and merge their statistics in replica order.
pub fn run(params: &ModelParams, config: &SimConfig) -> RunResult {
    let per_replica: Vec<ReplicaStats> = (0..config.replicas as u64)
        .into_par_iter()
        .map(|replica| run_single(params, config, replica))
        .collect();
    let mut merged = ReplicaStats::empty(params.n_sites());
    for stats in &per_replica {
        merged.merge(stats);
    }
    RunResult {
        merged,
        per_replica,
    }
}

fn run_single(params: &ModelParams, config: &SimConfig, replica: u64) -> ReplicaStats {
    let mut state = SimState::new(params, config.seed, replica);
    let mut sampler = RemovalSampler::new(params.s());
    let mut stats = ReplicaStats::empty(params.n_sites());

    match config.budget {
        Budget::Events(total) => {
            let warmup = (config.burn_in * total as f64) as u64;
            for event_idx in 0..total {
                let before = state.config.clone();
                let (dwell, event) = step(&mut state, params, &mut sampler);
                if event == Event::Frozen {
                    break;
                }
                if event_idx >= warmup {
                    stats.record_state(&before, dwell);
                    stats.record_event(&event);
                }
            }
        }
        Budget::Time(t_end) => {
            let warmup = config.burn_in * t_end;
            loop {
                let before = state.config.clone();
                let t_before = state.time;
                let (dwell, event) = step(&mut state, params, &mut sampler);
                let t_after = (t_before + dwell).min(t_end);
                // overlap of [t_before, t_after] with the recording window
                let lo = t_before.max(warmup);
                if t_after > lo {
                    stats.record_state(&before, t_after - lo);
                }
                if event == Event::Frozen || state.time >= t_end {
                    break;
                }
                if t_before >= warmup {
                    stats.record_event(&event);
                }
            }
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::negbin::negbin_pmf;
    use crate::model::rates::total_exit_rate;
    use approx::assert_relative_eq;

    fn params(s: f64, n: usize, rl: f64, rr: f64) -> ModelParams {
        ModelParams::new(s, n, rl, rr).unwrap()
    }

    #[test]
    fn closed_system_is_frozen() {
        let p = params(0.5, 3, 0.0, 0.0);
        let mut state = SimState::new(&p, 1, 0);
        let mut sampler = RemovalSampler::new(0.5);
        let (dwell, event) = step(&mut state, &p, &mut sampler);
        assert!(dwell.is_infinite());
        assert_eq!(event, Event::Frozen);
    }

    #[test]
    fn single_site_total_rate() {
        // N=1, eta=(m): rate = 2 H_s(m) + log(1+rho_l) + log(1+rho_r);
        // verified through the mean dwell of repeated steps from that state
        let p = params(0.5, 1, 0.4, 1.1);
        let m = 5u64;
        let want_rate =
            2.0 * total_exit_rate(0.5, m) + 0.4f64.ln_1p() + 1.1f64.ln_1p();
        let mut sampler = RemovalSampler::new(0.5);
        let mut acc = 0.0;
        let reps = 200_000;
        let mut state = SimState::new(&p, 9, 0);
        for _ in 0..reps {
            state.config.set(0, m);
            let (dwell, _) = step(&mut state, &p, &mut sampler);
            acc += dwell;
        }
        let mean = acc / reps as f64;
        assert!(
            (mean - 1.0 / want_rate).abs() < 3.0 * (1.0 / want_rate) / (reps as f64).sqrt() * 3.0,
            "mean dwell {mean} vs {}",
            1.0 / want_rate
        );
    }

    #[test]
    fn bulk_moves_conserve_particles() {
        let p = params(1.0, 4, 0.5, 1.5);
        let mut state = SimState::new(&p, 3, 0);
        let mut sampler = RemovalSampler::new(1.0);
        for _ in 0..20_000 {
            let before = state.config.total();
            let (_, event) = step(&mut state, &p, &mut sampler);
            let after = state.config.total();
            match event {
                Event::Bulk { k, .. } => {
                    assert_eq!(before, after);
                    assert!(k >= 1);
                }
                Event::Exit { k, .. } => assert_eq!(before - k, after),
                Event::Entry { k, .. } => assert_eq!(before + k, after),
                Event::Frozen => panic!("open system cannot freeze"),
            }
        }
    }

    #[test]
    fn seed_determinism() {
        let p = params(0.5, 3, 0.2, 0.8);
        let cfg = SimConfig::new(Budget::Events(20_000), 3, 42);
        let a = run(&p, &cfg);
        let b = run(&p, &cfg);
        assert_eq!(a.merged.events, b.merged.events);
        assert_eq!(a.merged.occ_first, b.merged.occ_first);
        assert_eq!(a.merged.bond_flux, b.merged.bond_flux);
        for (x, y) in a.per_replica.iter().zip(&b.per_replica) {
            assert_eq!(x.occ_first, y.occ_first);
        }
    }

    #[test]
    fn replica_streams_differ() {
        let p = params(0.5, 3, 0.2, 0.8);
        let cfg = SimConfig::new(Budget::Events(5_000), 2, 42);
        let r = run(&p, &cfg);
        assert_ne!(r.per_replica[0].occ_first, r.per_replica[1].occ_first);
    }

    #[test]
    fn equilibrium_histogram_matches_negbin() {
        // N=2, s=1/2, rho=1 both sides: site marginals are geometric(1/2);
        // TV distance of the time-weighted histogram under 0.01
        let p = params(0.5, 2, 1.0, 1.0);
        let cfg = SimConfig::new(Budget::Events(1_000_000), 4, 7);
        let r = run(&p, &cfg);
        for site in 0..2 {
            let hist = r.merged.normalized_histogram(site);
            let mut tv = 0.0;
            for (n, &h) in hist.iter().enumerate() {
                tv += 0.5 * (h - negbin_pmf(0.5, 1.0, n as u64)).abs();
            }
            assert!(tv < 0.01, "site {site}: TV {tv}");
        }
    }

    #[test]
    fn equilibrium_flux_vanishes() {
        // detailed balance: net flux across each bond compatible with zero
        let p = params(0.5, 3, 0.8, 0.8);
        let cfg = SimConfig::new(Budget::Events(400_000), 4, 11);
        let r = run(&p, &cfg);
        for bond in 0..=3usize {
            let per: Vec<f64> = r.per_replica.iter().map(|st| st.flux_rate(bond)).collect();
            let mean = per.iter().sum::<f64>() / per.len() as f64;
            let var = per.iter().map(|f| (f - mean) * (f - mean)).sum::<f64>()
                / (per.len() - 1) as f64;
            let se = (var / per.len() as f64).sqrt();
            assert!(
                mean.abs() < 4.0 * se + 1e-3,
                "bond {bond} flux {mean} +- {se}"
            );
        }
    }

    #[test]
    fn nonequilibrium_flux_is_uniform_across_bonds() {
        // stationarity forces the same mean current through every bond
        let p = params(0.5, 3, 0.2, 0.8);
        let cfg = SimConfig::new(Budget::Events(600_000), 4, 5);
        let r = run(&p, &cfg);
        let f0 = r.merged.flux_rate(0);
        assert!(f0 < 0.0, "density gradient should push left, got {f0}");
        for bond in 1..=3usize {
            let fb = r.merged.flux_rate(bond);
            assert!(
                (fb - f0).abs() < 0.05 * f0.abs().max(0.02),
                "bond {bond}: {fb} vs {f0}"
            );
        }
    }

    #[test]
    fn merged_means_consistent_across_replica_counts() {
        // one replica vs four: merged means agree within the scatter bound
        let p = params(0.5, 3, 0.2, 0.8);
        let single = run(&p, &SimConfig::new(Budget::Events(400_000), 1, 3));
        let multi = run(&p, &SimConfig::new(Budget::Events(400_000), 4, 4));
        let se = multi.mean_standard_error();
        for site in 0..3 {
            let a = single.merged.mean_occupation()[site];
            let b = multi.merged.mean_occupation()[site];
            assert!(
                (a - b).abs() < 6.0 * se[site].max(1e-3),
                "site {site}: {a} vs {b} (se {})",
                se[site]
            );
        }
    }

    #[test]
    fn time_budget_records_requested_window() {
        let p = params(0.5, 2, 0.5, 0.9);
        let cfg = SimConfig {
            budget: Budget::Time(500.0),
            replicas: 2,
            seed: 3,
            burn_in: 0.2,
        };
        let r = run(&p, &cfg);
        for st in &r.per_replica {
            assert_relative_eq!(st.time, 400.0, max_relative = 1e-9);
        }
    }
}
