//! Tipping-point location, stable-point sweeps, consensus-time curves and
//! simulation-versus-ODE comparisons.

use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::integrator::{
    integrate, steady_state, CommittedPair, MeanField, OdeConfig, SymmetricPair, Termination, Trajectory,
    VectorField,
};
use crate::pair::{embed_product6, embed_product9, NodeFractions};
use crate::sim::{ensemble, EnsembleStats, SimConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub k_avg: f64,
    pub p: f64,
    pub p_b_star: f64,
    pub converged: bool,
    pub t_end: f64,
}

/// Fraction of `B` nodes at the state the committed ODE settles into from
/// the all-`B` start.
pub fn stable_pb(k_avg: f64, p: f64, cfg: &OdeConfig<f64>) -> Result<SweepRow> {
    if !(0.0..1.0).contains(&p) {
        return Err(param(format!("committed fraction must lie in [0, 1), got {p}")));
    }
    let l = embed_product9(&NodeFractions::new(p, 1.0 - p, 0.0), &p)?;
    let sys = CommittedPair::new(k_avg, l.l_cc)?;
    let ss = steady_state(&sys, &l.l, cfg)?;
    Ok(SweepRow {
        k_avg,
        p,
        p_b_star: sys.fractions(&ss.state).p_b.clamp(0.0, 1.0),
        converged: ss.converged,
        t_end: ss.t_end,
    })
}

/// `stable_pb` over a grid of committed fractions, in grid order.
pub fn sweep(k_avg: f64, p_grid: &[f64], cfg: &OdeConfig<f64>) -> Result<Vec<SweepRow>> {
    p_grid.par_iter().map(|&p| stable_pb(k_avg, p, cfg)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TippingConfig {
    /// Bisection stops once the bracket is at most this wide.
    pub p_tol: f64,
    /// `p` counts as above tipping when `p_B* <` this.
    pub pb_threshold: f64,
    pub p_max: f64,
    pub ode: OdeConfig<f64>,
}

impl Default for TippingConfig {
    fn default() -> Self {
        TippingConfig {
            p_tol: 1e-4,
            pb_threshold: 0.01,
            p_max: 0.2,
            ode: OdeConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TippingResult {
    pub k_avg: f64,
    pub p_c: f64,
    pub p_low: f64,
    pub p_high: f64,
    pub evaluations: usize,
}

/// Bisection for the smallest committed fraction that drives the all-`B`
/// start to `A` consensus.
pub fn find_tipping(k_avg: f64, cfg: &TippingConfig) -> Result<TippingResult> {
    if !(cfg.p_tol > 0.0) || !(cfg.pb_threshold > 0.0 && cfg.pb_threshold < 1.0) {
        return Err(param("p_tol must be positive and pb_threshold in (0, 1)"));
    }
    if !(cfg.p_max > 0.0 && cfg.p_max < 1.0) {
        return Err(param("p_max must lie in (0, 1)"));
    }
    let mut evaluations = 0;
    let mut above = |p: f64| -> Result<bool> {
        evaluations += 1;
        Ok(stable_pb(k_avg, p, &cfg.ode)?.p_b_star < cfg.pb_threshold)
    };
    let (mut lo, mut hi) = (0.0, cfg.p_max);
    if above(lo)? {
        return Err(Error::NotFound {
            k_avg,
            reason: "already above tipping at p = 0".into(),
        });
    }
    if !above(hi)? {
        return Err(Error::NotFound {
            k_avg,
            reason: format!("still below tipping at p = {hi}"),
        });
    }
    while hi - lo > cfg.p_tol {
        let mid = 0.5 * (lo + hi);
        if above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(TippingResult {
        k_avg,
        p_c: 0.5 * (lo + hi),
        p_low: lo,
        p_high: hi,
        evaluations,
    })
}

/// Tipping point per degree, sorted by degree. Rows fail independently.
pub fn pc_vs_k(k_list: &[f64], cfg: &TippingConfig) -> Vec<(f64, Result<TippingResult>)> {
    let mut ks = k_list.to_vec();
    ks.sort_by(f64::total_cmp);
    ks.par_iter().map(|&k| (k, find_tipping(k, cfg))).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveRow {
    pub p: f64,
    pub t_mc_mean: Option<f64>,
    pub t_mc_rel_std: Option<f64>,
    pub censored_fraction: f64,
    pub t_ode: Option<f64>,
}

/// Consensus time of the committed ODE from the all-`B` start.
pub fn ode_consensus_time_committed(k_avg: f64, p: f64, eta: f64, cfg: &OdeConfig<f64>) -> Result<Option<f64>> {
    let l = embed_product9(&NodeFractions::new(p, 1.0 - p, 0.0), &p)?;
    let sys = CommittedPair::new(k_avg, l.l_cc)?;
    let cfg = OdeConfig {
        eta: Some(eta),
        sample_interval: cfg.t_max,
        ..cfg.clone()
    };
    Ok(integrate(&sys, &l.l, &cfg)?.t_eta)
}

/// Simulated (mean, relative spread, censoring) and ODE consensus times
/// across committed fractions. `sim` supplies `n`, runs, seed, η and cap;
/// its committed fraction is overridden per grid point.
pub fn consensus_time_curve(
    k_avg: f64,
    p_grid: &[f64],
    sim: &SimConfig,
    ode: &OdeConfig<f64>,
) -> Result<Vec<CurveRow>> {
    if let Some(&p) = p_grid.iter().find(|&&p| !(p > 0.0 && p <= 0.2)) {
        return Err(param(format!(
            "committed fractions must lie in (0, 0.2]; got {p} (p = 0 never leaves the all-B state)"
        )));
    }
    p_grid
        .iter()
        .map(|&p| {
            let cfg = SimConfig {
                k_avg,
                committed_fraction: p,
                record_trajectory: false,
                ..sim.clone()
            };
            let stats = ensemble(&cfg)?;
            Ok(CurveRow {
                p,
                t_mc_mean: stats.mean_t_eta,
                t_mc_rel_std: stats.rel_std_t_eta,
                censored_fraction: stats.censored_fraction(),
                t_ode: ode_consensus_time_committed(k_avg, p, sim.eta, ode)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareRow {
    pub t: f64,
    pub mc: [f64; 3],
    pub pair: [f64; 3],
    pub meanfield: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub k_avg: f64,
    pub n: usize,
    pub runs: usize,
    pub initial: NodeFractions<f64>,
    pub rows: Vec<CompareRow>,
    /// End of the pre-consensus window: the earliest η-consensus among runs.
    pub window_end: f64,
    /// Sup-norm gap between the simulation mean and the pair ODE in the window.
    pub pair_discrepancy: f64,
    pub meanfield_discrepancy: f64,
}

fn sup_gap(rows: &[CompareRow], window_end: f64, pick: impl Fn(&CompareRow) -> [f64; 3]) -> f64 {
    rows.iter()
        .filter(|r| r.t <= window_end)
        .flat_map(|r| {
            let o = pick(r);
            (0..3).map(move |i| (r.mc[i] - o[i]).abs())
        })
        .fold(0.0, f64::max)
}

fn arr(p: &NodeFractions<f64>) -> [f64; 3] {
    p.to_array()
}

/// Pair-ODE and mean-field trajectories of the symmetric game from
/// `initial`, sampled every `dt_sample` up to `t_max`.
pub fn symmetric_trajectories(
    k_avg: f64,
    initial: &NodeFractions<f64>,
    t_max: f64,
    dt_sample: f64,
) -> Result<(Trajectory<f64>, Trajectory<f64>)> {
    let cfg = OdeConfig {
        t_max,
        sample_interval: dt_sample,
        steady_tol: 1e-14,
        ..OdeConfig::default()
    };
    let pair = integrate(&SymmetricPair::new(k_avg)?, &embed_product6(initial).l, &cfg)?;
    let mf = integrate(&MeanField::new(0.0)?, &initial.to_array(), &cfg)?;
    Ok((pair, mf))
}

/// Overlays the simulated mean fractions of the symmetric game with the
/// pair ODE and the mean-field ODE, both started from the simulated initial
/// mean.
pub fn trajectory_compare(k_avg: f64, n: usize, runs: usize, seed: u64) -> Result<Comparison> {
    let cfg = SimConfig {
        n,
        k_avg,
        committed_fraction: 0.0,
        eta: 0.95,
        runs,
        seed,
        ..SimConfig::default()
    };
    let stats = ensemble(&cfg)?;
    compare_with_ensemble(k_avg, n, &stats)
}

pub fn compare_with_ensemble(k_avg: f64, n: usize, stats: &EnsembleStats) -> Result<Comparison> {
    let traj = &stats.mean_trajectory;
    let first = traj.first().ok_or_else(|| param("ensemble recorded no trajectory"))?;
    let initial = NodeFractions::new(first.mean[0], first.mean[1], first.mean[2]);
    let t_end = traj.last().map_or(0.0, |s| s.t).max(1.0);
    let step = if traj.len() > 1 { traj[1].t - traj[0].t } else { 1.0 };
    let (pair, mf) = symmetric_trajectories(k_avg, &initial, t_end, step.min(1.0))?;
    let rows: Vec<CompareRow> = traj
        .iter()
        .map(|s| CompareRow {
            t: s.t,
            mc: s.mean,
            pair: arr(&pair.fractions_at(s.t)),
            meanfield: arr(&mf.fractions_at(s.t)),
        })
        .collect();
    let window_end = stats.min_t_eta().unwrap_or(t_end);
    Ok(Comparison {
        k_avg,
        n,
        runs: stats.runs.len(),
        initial,
        pair_discrepancy: sup_gap(&rows, window_end, |r| r.pair),
        meanfield_discrepancy: sup_gap(&rows, window_end, |r| r.meanfield),
        rows,
        window_end,
    })
}

/// Largest `p_AB` along a trajectory.
pub fn peak_pab(traj: &Trajectory<f64>) -> f64 {
    traj.samples.iter().map(|s| s.p.p_ab).fold(0.0, f64::max)
}

/// Initial condition for symmetric-start consensus times at system size
/// `n`: the product state with `p_A` one binomial standard deviation above
/// one half.
pub fn seeded_symmetric_start(n: usize) -> NodeFractions<f64> {
    let d = 0.5 / (n as f64).sqrt();
    NodeFractions::new(0.5 + d, 0.5 - d, 0.0)
}

/// Predicted η-consensus times `(pair ODE, mean field)` of the symmetric game
/// on `n` nodes.
pub fn ode_consensus_time_symmetric(k_avg: f64, n: usize, eta: f64) -> Result<(Option<f64>, Option<f64>)> {
    let start = seeded_symmetric_start(n);
    let cfg = OdeConfig {
        eta: Some(eta),
        t_max: 1e5,
        sample_interval: 1e5,
        ..OdeConfig::default()
    };
    let pair = integrate(&SymmetricPair::new(k_avg)?, &embed_product6(&start).l, &cfg)?;
    let mf = integrate(&MeanField::new(0.0)?, &start.to_array(), &cfg)?;
    let t = |tr: &Trajectory<f64>| (tr.termination == Termination::EtaCrossed).then_some(tr.t_eta).flatten();
    Ok((t(&pair), t(&mf)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeRow {
    pub n: usize,
    pub k_avg: f64,
    pub t_mc_mean: Option<f64>,
    pub t_mc_rel_std: Option<f64>,
    pub reached_fraction: f64,
    pub t_pair: Option<f64>,
    pub t_meanfield: Option<f64>,
}

/// Symmetric-game η-consensus times across system sizes.
pub fn consensus_time_table(k_avg: f64, n_list: &[usize], runs: usize, seed: u64, eta: f64) -> Result<Vec<TimeRow>> {
    n_list
        .iter()
        .map(|&n| {
            let cfg = SimConfig {
                n,
                k_avg,
                eta,
                runs,
                seed,
                record_trajectory: false,
                ..SimConfig::default()
            };
            let stats = ensemble(&cfg)?;
            let (t_pair, t_meanfield) = ode_consensus_time_symmetric(k_avg, n, eta)?;
            Ok(TimeRow {
                n,
                k_avg,
                t_mc_mean: stats.mean_t_eta,
                t_mc_rel_std: stats.rel_std_t_eta,
                reached_fraction: stats.reached_fraction,
                t_pair,
                t_meanfield,
            })
        })
        .collect()
}
