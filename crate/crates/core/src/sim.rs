//! Agent-based Original/Direct binary Naming Game.
//!
//! Time is measured in unit times of `N` interactions. A speaker is drawn
//! uniformly (isolated speakers are redrawn without consuming time), the
//! listener uniformly among the speaker's neighbors.

use rand::{Rng, RngExt, SeedableRng};
use rand_pcg::Pcg64Mcg;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::network::{assign_opinions, generate_er, Network, Opinion, OpinionState, Word};
use crate::pair::{Mode, NodeFractions};

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub k_avg: f64,
    /// Fraction of nodes committed to `A`. Zero selects the symmetric game
    /// with fair-coin initial opinions; positive values start every other
    /// node at `B`.
    pub committed_fraction: f64,
    pub eta: f64,
    pub runs: usize,
    pub seed: u64,
    /// Cap on simulated time, in unit times.
    pub max_time_per_node: f64,
    pub sample_interval: f64,
    pub record_trajectory: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 500,
            k_avg: 5.0,
            committed_fraction: 0.0,
            eta: 0.95,
            runs: 1,
            seed: 0,
            max_time_per_node: 1e4,
            sample_interval: 1.0,
            record_trajectory: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.5 && self.eta <= 1.0) {
            return Err(param(format!("eta must lie in (1/2, 1], got {}", self.eta)));
        }
        if !(self.max_time_per_node > 0.0) {
            return Err(param("max_time_per_node must be positive"));
        }
        if !(self.sample_interval > 0.0) {
            return Err(param("sample_interval must be positive"));
        }
        if self.runs == 0 {
            return Err(param("runs must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.committed_fraction) {
            return Err(param("committed fraction must lie in [0, 1)"));
        }
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        if self.committed_fraction > 0.0 {
            Mode::Committed
        } else {
            Mode::Symmetric
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub p_ab: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub reached: bool,
    /// First η-crossing time, or the cap when not reached.
    pub t_eta: f64,
    pub interactions: u64,
    pub final_fractions: NodeFractions<f64>,
    pub trajectory: Vec<Sample>,
}

/// Mutable simulation state: opinions plus running counts.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    opinions: Vec<Opinion>,
    counts: [usize; 4],
}

impl SimState {
    pub fn new(init: &OpinionState) -> Self {
        SimState {
            opinions: init.opinions.clone(),
            counts: init.counts(),
        }
    }

    pub fn opinions(&self) -> &[Opinion] {
        &self.opinions
    }

    /// Node fractions; committed nodes count as `A`.
    pub fn fractions(&self) -> NodeFractions<f64> {
        let n = self.opinions.len() as f64;
        let [a, b, ab, c] = self.counts;
        NodeFractions::new((a + c) as f64 / n, b as f64 / n, ab as f64 / n)
    }

    /// Count compared against the η threshold: the larger camp in the
    /// symmetric game, the committed opinion's camp otherwise (the all-`B`
    /// start would trivially satisfy a `B` threshold).
    fn consensus_count(&self, mode: Mode) -> usize {
        let a = self.counts[0] + self.counts[3];
        match mode {
            Mode::Symmetric => a.max(self.counts[1]),
            Mode::Committed => a,
        }
    }

    fn set(&mut self, i: usize, o: Opinion) {
        let old = self.opinions[i];
        if old != o {
            self.counts[old as usize] -= 1;
            self.counts[o as usize] += 1;
            self.opinions[i] = o;
        }
    }

    fn sample(&self, t: f64) -> Sample {
        let p = self.fractions();
        Sample {
            t,
            p_a: p.p_a,
            p_b: p.p_b,
            p_ab: p.p_ab,
        }
    }
}

/// One speaker-listener interaction. The network must have an edge.
pub fn step<R: Rng + ?Sized>(net: &Network, state: &mut SimState, rng: &mut R) {
    step_inner(net, state, rng, false);
}

/// `mirror_words` swaps which random bit an `AB` speaker maps to which word;
/// used to check the `A <-> B` symmetry of the dynamics.
fn step_inner<R: Rng + ?Sized>(net: &Network, state: &mut SimState, rng: &mut R, mirror_words: bool) {
    let n = net.n();
    let speaker = loop {
        let s = rng.random_range(0..n);
        if net.degree(s) > 0 {
            break s;
        }
    };
    let nbrs = net.neighbors(speaker);
    let listener = nbrs[rng.random_range(0..nbrs.len())];

    let word = match state.opinions[speaker] {
        Opinion::A | Opinion::Committed => Word::A,
        Opinion::B => Word::B,
        Opinion::AB => {
            if rng.random_bool(0.5) != mirror_words {
                Word::A
            } else {
                Word::B
            }
        }
    };
    let heard = state.opinions[listener];
    if heard.knows(word) {
        let single = match word {
            Word::A => Opinion::A,
            Word::B => Opinion::B,
        };
        if !state.opinions[speaker].is_committed() {
            state.set(speaker, single);
        }
        if !heard.is_committed() {
            state.set(listener, single);
        }
    } else if !heard.is_committed() {
        state.set(listener, Opinion::AB);
    }
}

/// Runs one game from `init` until η-consensus or the time cap.
pub fn run<R: Rng + ?Sized>(
    net: &Network,
    init: &OpinionState,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<SimResult> {
    run_inner(net, init, cfg, rng, false)
}

fn run_inner<R: Rng + ?Sized>(
    net: &Network,
    init: &OpinionState,
    cfg: &SimConfig,
    rng: &mut R,
    mirror_words: bool,
) -> Result<SimResult> {
    cfg.validate()?;
    if net.n() != init.n() {
        return Err(param("network and opinion state sizes differ"));
    }
    if net.m() == 0 {
        return Err(Error::DegenerateNetwork("network has no edges".into()));
    }
    let n = net.n();
    let nf = n as f64;
    let need = (cfg.eta * nf - 1e-9).ceil() as usize;
    let every = ((cfg.sample_interval * nf).round() as u64).max(1);
    let cap = (cfg.max_time_per_node * nf).ceil() as u64;

    let mut state = SimState::new(init);
    let mut trajectory = Vec::new();
    if cfg.record_trajectory {
        trajectory.push(state.sample(0.0));
    }
    let mut interactions = 0u64;
    let mut reached = state.consensus_count(init.mode) >= need;
    while !reached && interactions < cap {
        step_inner(net, &mut state, rng, mirror_words);
        interactions += 1;
        reached = state.consensus_count(init.mode) >= need;
        if cfg.record_trajectory && interactions.is_multiple_of(every) {
            trajectory.push(state.sample(interactions as f64 / nf));
        }
    }
    let t_end = interactions as f64 / nf;
    if cfg.record_trajectory && trajectory.last().is_some_and(|s| s.t < t_end) {
        trajectory.push(state.sample(t_end));
    }
    Ok(SimResult {
        reached,
        t_eta: if reached { t_end } else { cfg.max_time_per_node },
        interactions,
        final_fractions: state.fractions(),
        trajectory,
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of ensemble member `run`.
pub fn run_seed(base: u64, run: u64) -> u64 {
    splitmix64(base ^ splitmix64(run))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub reached: bool,
    pub t_eta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanSample {
    pub t: f64,
    pub mean: [f64; 3],
    pub std: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStats {
    pub runs: Vec<RunRecord>,
    /// Mean η-consensus time over reached runs.
    pub mean_t_eta: Option<f64>,
    /// Sample standard deviation over mean, over reached runs (0 for one run).
    pub rel_std_t_eta: Option<f64>,
    pub reached_fraction: f64,
    /// Pointwise mean over runs; finished runs hold their final state.
    pub mean_trajectory: Vec<MeanSample>,
}

impl EnsembleStats {
    pub fn censored_fraction(&self) -> f64 {
        1.0 - self.reached_fraction
    }

    /// Smallest η-consensus time among reached runs.
    pub fn min_t_eta(&self) -> Option<f64> {
        self.runs
            .iter()
            .filter(|r| r.reached)
            .map(|r| r.t_eta)
            .min_by(f64::total_cmp)
    }

    /// Standard error of the mean consensus time.
    pub fn std_error(&self) -> Option<f64> {
        let (m, r) = (self.mean_t_eta?, self.rel_std_t_eta?);
        let k = self.runs.iter().filter(|r| r.reached).count() as f64;
        Some(m * r / k.sqrt())
    }
}

/// Mean and sample standard deviation (zero for a single value).
pub(crate) fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let std = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    Some((mean, std))
}

/// One ensemble member: fresh ER network, fresh initial opinions, one run.
pub fn run_member(cfg: &SimConfig, index: usize) -> Result<(RunRecord, SimResult)> {
    let seed = run_seed(cfg.seed, index as u64);
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let net = generate_er(cfg.n, cfg.k_avg, rng.next_u64())?;
    let init = assign_opinions(&net, cfg.committed_fraction, cfg.mode(), rng.next_u64())?;
    let res = run(&net, &init, cfg, &mut rng)?;
    let record = RunRecord {
        run: index,
        seed,
        reached: res.reached,
        t_eta: res.t_eta,
    };
    Ok((record, res))
}

/// Runs `cfg.runs` independent games in parallel. Results depend only on
/// the configuration, never on scheduling.
pub fn ensemble(cfg: &SimConfig) -> Result<EnsembleStats> {
    cfg.validate()?;
    let members: Vec<(RunRecord, SimResult)> = (0..cfg.runs)
        .into_par_iter()
        .map(|r| run_member(cfg, r))
        .collect::<Result<_>>()?;

    let times: Vec<f64> = members.iter().filter(|(r, _)| r.reached).map(|(r, _)| r.t_eta).collect();
    let stats = mean_std(&times);
    let mean_trajectory = if cfg.record_trajectory {
        mean_trajectory(members.iter().map(|(_, s)| s.trajectory.as_slice()))
    } else {
        Vec::new()
    };
    Ok(EnsembleStats {
        reached_fraction: times.len() as f64 / cfg.runs as f64,
        mean_t_eta: stats.map(|(m, _)| m),
        rel_std_t_eta: stats.map(|(m, s)| if m > 0.0 { s / m } else { 0.0 }),
        runs: members.into_iter().map(|(r, _)| r).collect(),
        mean_trajectory,
    })
}

/// Pointwise mean over trajectories sampled on a common grid. The final
/// sample of a run that stopped off-grid is dropped; shorter runs are held
/// at their last on-grid value.
fn mean_trajectory<'a>(trajs: impl Iterator<Item = &'a [Sample]>) -> Vec<MeanSample> {
    let trajs: Vec<&[Sample]> = trajs.collect();
    let grid_len = |t: &[Sample]| {
        if t.len() >= 2 {
            let dt = t[1].t - t[0].t;
            let last = t[t.len() - 1].t - t[t.len() - 2].t;
            if (last - dt).abs() > 1e-9 * dt.max(1.0) {
                return t.len() - 1;
            }
        }
        t.len()
    };
    let len = trajs.iter().map(|t| grid_len(t)).max().unwrap_or(0);
    let Some(grid) = trajs.iter().find(|t| grid_len(t) == len) else {
        return Vec::new();
    };
    (0..len)
        .map(|i| {
            let vals: Vec<[f64; 3]> = trajs
                .iter()
                .map(|t| {
                    let s = t[i.min(grid_len(t) - 1)];
                    [s.p_a, s.p_b, s.p_ab]
                })
                .collect();
            let col = |c: usize| -> (f64, f64) {
                let xs: Vec<f64> = vals.iter().map(|v| v[c]).collect();
                mean_std(&xs).unwrap_or((f64::NAN, f64::NAN))
            };
            let (m0, s0) = col(0);
            let (m1, s1) = col(1);
            let (m2, s2) = col(2);
            MeanSample {
                t: grid[i].t,
                mean: [m0, m1, m2],
                std: [s0, s1, s2],
            }
        })
        .collect()
}
