//! Fixed-step classical RK4 with η-crossing and steady-state detection.

use crate::error::{param, Error, Result};
use crate::pair::{
    guard_simplex, node_fractions6, node_fractions9, rhs6_unchecked, rhs9_unchecked, rhs_meanfield,
    LinkState, LinkState6, LinkState9, Mode, NodeFractions, LINK6_LABELS, LINK9_LABELS,
};
use crate::scalar::Real;

/// An autonomous vector field on a simplex-like domain.
pub trait VectorField<T: Real> {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[T], out: &mut [T]);

    /// Conserved sum of the state components.
    fn conserved_mass(&self) -> T;

    fn fractions(&self, x: &[T]) -> NodeFractions<T>;

    /// Column names of the state components.
    fn labels(&self) -> Vec<String>;
}

/// Symmetric six-link pair approximation at fixed `<k>`.
#[derive(Clone, Copy, Debug)]
pub struct SymmetricPair<T> {
    k_avg: T,
}

impl<T: Real> SymmetricPair<T> {
    pub fn new(k_avg: T) -> Result<Self> {
        if !(k_avg >= T::one()) {
            return Err(param(format!("average degree must be >= 1, got {k_avg:?}")));
        }
        Ok(SymmetricPair { k_avg })
    }
}

impl<T: Real> VectorField<T> for SymmetricPair<T> {
    fn dim(&self) -> usize {
        6
    }

    fn eval(&self, x: &[T], out: &mut [T]) {
        let l: &[T; 6] = x.try_into().expect("six components");
        out.copy_from_slice(&rhs6_unchecked(l, &self.k_avg));
    }

    fn conserved_mass(&self) -> T {
        T::one()
    }

    fn fractions(&self, x: &[T]) -> NodeFractions<T> {
        node_fractions6(x.try_into().expect("six components"))
    }

    fn labels(&self) -> Vec<String> {
        LINK6_LABELS.iter().map(|s| format!("l_{s}")).collect()
    }
}

/// Committed nine-link pair approximation at fixed `<k>` and `l_cc`.
#[derive(Clone, Copy, Debug)]
pub struct CommittedPair<T> {
    k_avg: T,
    l_cc: T,
}

impl<T: Real> CommittedPair<T> {
    pub fn new(k_avg: T, l_cc: T) -> Result<Self> {
        if !(k_avg >= T::one()) {
            return Err(param(format!("average degree must be >= 1, got {k_avg:?}")));
        }
        if !(l_cc >= T::zero() && l_cc < T::one()) {
            return Err(param(format!("l_cc must lie in [0, 1), got {l_cc:?}")));
        }
        Ok(CommittedPair { k_avg, l_cc })
    }
}

impl<T: Real> VectorField<T> for CommittedPair<T> {
    fn dim(&self) -> usize {
        9
    }

    fn eval(&self, x: &[T], out: &mut [T]) {
        let l: &[T; 9] = x.try_into().expect("nine components");
        out.copy_from_slice(&rhs9_unchecked(l, &self.k_avg));
    }

    fn conserved_mass(&self) -> T {
        T::one() - self.l_cc
    }

    fn fractions(&self, x: &[T]) -> NodeFractions<T> {
        node_fractions9(x.try_into().expect("nine components"), &self.l_cc)
    }

    fn labels(&self) -> Vec<String> {
        LINK9_LABELS.iter().map(|s| format!("l_{s}")).collect()
    }
}

/// Mean-field dynamics on `(p_A, p_B, p_AB)`; `p_A` includes the committed
/// fraction.
#[derive(Clone, Copy, Debug)]
pub struct MeanField<T> {
    committed: T,
}

impl<T: Real> MeanField<T> {
    pub fn new(committed: T) -> Result<Self> {
        if !(committed >= T::zero() && committed < T::one()) {
            return Err(param(format!("committed fraction must lie in [0, 1), got {committed:?}")));
        }
        Ok(MeanField { committed })
    }
}

impl<T: Real> VectorField<T> for MeanField<T> {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, x: &[T], out: &mut [T]) {
        // Clamp the susceptible A mass at zero; the guard keeps it within
        // rounding of that bound.
        let p_a = if x[0] < self.committed { self.committed } else { x[0] };
        let p = NodeFractions::new(p_a, x[1], x[2]);
        let d = rhs_meanfield(&p, &self.committed).expect("validated committed fraction");
        out.copy_from_slice(&d.to_array());
    }

    fn conserved_mass(&self) -> T {
        T::one()
    }

    fn fractions(&self, x: &[T]) -> NodeFractions<T> {
        NodeFractions::new(x[0], x[1], x[2])
    }

    fn labels(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Pair-approximation system matching a link state's dimension.
pub enum PairSystem<T> {
    Symmetric(SymmetricPair<T>),
    Committed(CommittedPair<T>),
}

impl<T: Real> PairSystem<T> {
    /// System and flattened initial vector for `state`.
    pub fn for_state(state: &LinkState<T>, k_avg: T) -> Result<(Self, Vec<T>)> {
        Ok(match state {
            LinkState::Six(s) => (PairSystem::Symmetric(SymmetricPair::new(k_avg)?), s.l.to_vec()),
            LinkState::Nine(s) => (
                PairSystem::Committed(CommittedPair::new(k_avg, s.l_cc)?),
                s.l.to_vec(),
            ),
        })
    }

    pub fn mode(&self) -> Mode {
        match self {
            PairSystem::Symmetric(_) => Mode::Symmetric,
            PairSystem::Committed(_) => Mode::Committed,
        }
    }

    /// Link state from a flattened vector of this system.
    pub fn state(&self, x: &[T]) -> LinkState<T> {
        match self {
            PairSystem::Symmetric(_) => LinkState::Six(LinkState6::new(x.try_into().expect("six"))),
            PairSystem::Committed(c) => {
                LinkState::Nine(LinkState9::new(x.try_into().expect("nine"), c.l_cc))
            }
        }
    }
}

impl<T: Real> VectorField<T> for PairSystem<T> {
    fn dim(&self) -> usize {
        match self {
            PairSystem::Symmetric(s) => s.dim(),
            PairSystem::Committed(c) => c.dim(),
        }
    }
    fn eval(&self, x: &[T], out: &mut [T]) {
        match self {
            PairSystem::Symmetric(s) => s.eval(x, out),
            PairSystem::Committed(c) => c.eval(x, out),
        }
    }
    fn conserved_mass(&self) -> T {
        match self {
            PairSystem::Symmetric(s) => s.conserved_mass(),
            PairSystem::Committed(c) => c.conserved_mass(),
        }
    }
    fn fractions(&self, x: &[T]) -> NodeFractions<T> {
        match self {
            PairSystem::Symmetric(s) => s.fractions(x),
            PairSystem::Committed(c) => c.fractions(x),
        }
    }
    fn labels(&self) -> Vec<String> {
        match self {
            PairSystem::Symmetric(s) => s.labels(),
            PairSystem::Committed(c) => c.labels(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OdeConfig<T> {
    pub dt: T,
    pub t_max: T,
    /// Steady state when the infinity norm of the right-hand side drops below.
    pub steady_tol: T,
    /// Stop at the first upward crossing of `p_A` or `p_B` through `eta`.
    pub eta: Option<T>,
    pub sample_interval: T,
    /// Largest simplex violation repaired by the domain guard.
    pub guard_tol: T,
}

impl<T: Real> Default for OdeConfig<T> {
    fn default() -> Self {
        let c = |v: f64| T::from(v).expect("representable constant");
        OdeConfig {
            dt: c(0.01),
            t_max: c(1e6),
            steady_tol: c(1e-10),
            eta: None,
            sample_interval: c(1.0),
            guard_tol: c(1e-9),
        }
    }
}

impl<T: Real> OdeConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: T| v > T::zero() && v.is_finite();
        if !pos(self.dt) || !pos(self.t_max) || !pos(self.steady_tol) || !pos(self.sample_interval) {
            return Err(param("dt, t_max, steady_tol and sample_interval must be positive"));
        }
        if let Some(eta) = self.eta {
            if !(eta > T::zero() && eta <= T::one()) {
                return Err(param(format!("eta must lie in (0, 1], got {eta:?}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    EtaCrossed,
    Steady,
    Horizon,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::EtaCrossed => "eta-crossed",
            Termination::Steady => "steady",
            Termination::Horizon => "horizon",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OdeSample<T> {
    pub t: T,
    pub x: Vec<T>,
    pub p: NodeFractions<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    /// Samples at multiples of the sample interval plus the terminal state.
    pub samples: Vec<OdeSample<T>>,
    pub termination: Termination,
    /// η-crossing time from dense per-step checking.
    pub t_eta: Option<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &OdeSample<T> {
        self.samples.last().expect("trajectory has the initial sample")
    }

    /// Node fractions linearly interpolated at `t`, clamped to the ends.
    pub fn fractions_at(&self, t: T) -> NodeFractions<T> {
        let s = &self.samples;
        if t <= s[0].t {
            return s[0].p.clone();
        }
        let i = s.partition_point(|x| x.t < t);
        if i >= s.len() {
            return self.last().p.clone();
        }
        let (a, b) = (&s[i - 1], &s[i]);
        let w = (t - a.t) / (b.t - a.t);
        let lerp = |u: T, v: T| u + w * (v - u);
        NodeFractions::new(lerp(a.p.p_a, b.p.p_a), lerp(a.p.p_b, b.p.p_b), lerp(a.p.p_ab, b.p.p_ab))
    }
}

/// Upward crossing of `eta` between two consecutive states, linearly
/// interpolated; the earlier of `p_A` and `p_B`.
fn crossing<T: Real>(t0: T, p0: &NodeFractions<T>, t1: T, p1: &NodeFractions<T>, eta: T) -> Option<T> {
    let one = |a: T, b: T| {
        (a < eta && b >= eta).then(|| t0 + (t1 - t0) * (eta - a) / (b - a))
    };
    match (one(p0.p_a, p1.p_a), one(p0.p_b, p1.p_b)) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

/// First η-crossing along a densely sampled trajectory.
pub fn detect_eta_crossing<T: Real>(samples: &[OdeSample<T>], eta: T) -> Option<T> {
    samples
        .windows(2)
        .find_map(|w| crossing(w[0].t, &w[0].p, w[1].t, &w[1].p, eta))
}

fn sup_norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

fn to_f64s<T: Real>(x: &[T]) -> Vec<f64> {
    x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
}

/// Integrates `sys` from `x0` with classical fixed-step RK4.
///
/// After every step the domain guard is applied and the stop conditions are
/// checked in order: η-crossing, steady state, horizon.
pub fn integrate<T: Real, S: VectorField<T> + ?Sized>(
    sys: &S,
    x0: &[T],
    cfg: &OdeConfig<T>,
) -> Result<Trajectory<T>> {
    cfg.validate()?;
    let dim = sys.dim();
    if x0.len() != dim {
        return Err(param(format!("initial state has {} components, system needs {dim}", x0.len())));
    }
    let mass = sys.conserved_mass();
    let mut x = x0.to_vec();
    guard_simplex(&mut x, &mass, &cfg.guard_tol).map_err(|dev| Error::Domain {
        t: 0.0,
        deviation: dev.to_f64().unwrap_or(f64::NAN),
        state: to_f64s(x0),
    })?;

    let half = T::from(0.5).unwrap();
    let two = T::from(2.0).unwrap();
    let sixth = T::one() / T::from(6.0).unwrap();
    let dt = cfg.dt;
    let sample_every = (cfg.sample_interval / dt).round().to_u64().unwrap_or(1).max(1);
    let max_steps = (cfg.t_max / dt).ceil().to_u64().unwrap_or(u64::MAX);

    let mut samples = vec![OdeSample {
        t: T::zero(),
        x: x.clone(),
        p: sys.fractions(&x),
    }];
    let mut k1 = vec![T::zero(); dim];
    let mut k2 = vec![T::zero(); dim];
    let mut k3 = vec![T::zero(); dim];
    let mut k4 = vec![T::zero(); dim];
    let mut tmp = vec![T::zero(); dim];
    sys.eval(&x, &mut k1);

    let mut p_prev = sys.fractions(&x);
    let mut step = 0u64;
    let (termination, t_eta) = loop {
        for i in 0..dim {
            tmp[i] = x[i] + half * dt * k1[i];
        }
        sys.eval(&tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = x[i] + half * dt * k2[i];
        }
        sys.eval(&tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = x[i] + dt * k3[i];
        }
        sys.eval(&tmp, &mut k4);
        for i in 0..dim {
            x[i] = x[i] + dt * sixth * (k1[i] + two * (k2[i] + k3[i]) + k4[i]);
        }
        step += 1;
        let t = T::from(step).unwrap() * dt;
        guard_simplex(&mut x, &mass, &cfg.guard_tol).map_err(|dev| Error::Domain {
            t: t.to_f64().unwrap_or(f64::NAN),
            deviation: dev.to_f64().unwrap_or(f64::NAN),
            state: to_f64s(&x),
        })?;
        sys.eval(&x, &mut k1);
        let p = sys.fractions(&x);

        if step.is_multiple_of(sample_every) {
            samples.push(OdeSample { t, x: x.clone(), p: p.clone() });
        }
        let stop = if let Some(te) = cfg.eta.and_then(|eta| crossing(t - dt, &p_prev, t, &p, eta)) {
            Some((Termination::EtaCrossed, Some(te)))
        } else if sup_norm(&k1) < cfg.steady_tol {
            Some((Termination::Steady, None))
        } else if step >= max_steps {
            Some((Termination::Horizon, None))
        } else {
            None
        };
        if let Some(done) = stop {
            if !step.is_multiple_of(sample_every) {
                samples.push(OdeSample { t, x: x.clone(), p });
            }
            break done;
        }
        p_prev = p;
    };
    Ok(Trajectory {
        samples,
        termination,
        t_eta,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyState<T> {
    pub state: Vec<T>,
    pub converged: bool,
    pub t_end: T,
}

/// Integrates until the right-hand side vanishes to `steady_tol` or the
/// horizon is reached. Any η in `cfg` is ignored.
pub fn steady_state<T: Real, S: VectorField<T> + ?Sized>(
    sys: &S,
    x0: &[T],
    cfg: &OdeConfig<T>,
) -> Result<SteadyState<T>> {
    let cfg = OdeConfig {
        eta: None,
        sample_interval: cfg.t_max,
        ..cfg.clone()
    };
    let traj = integrate(sys, x0, &cfg)?;
    let last = traj.last();
    Ok(SteadyState {
        state: last.x.clone(),
        converged: traj.termination == Termination::Steady,
        t_end: last.t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pair::embed_product6;

    #[test]
    fn consensus_is_steady_after_one_step() {
        let sys = SymmetricPair::new(5.0f64).unwrap();
        let x0 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let cfg = OdeConfig {
            eta: Some(0.95),
            ..OdeConfig::default()
        };
        let tr = integrate(&sys, &x0, &cfg).unwrap();
        assert_eq!(tr.termination, Termination::Steady);
        assert_eq!(tr.last().t, 0.01);
        assert_eq!(tr.last().x, x0.to_vec());
        let ss = steady_state(&sys, &x0, &cfg).unwrap();
        assert!(ss.converged);
        assert_eq!(ss.t_end, 0.01);
    }

    #[test]
    fn asymmetric_start_crosses_eta_towards_a() {
        let sys = SymmetricPair::new(5.0f64).unwrap();
        let x0 = embed_product6(&NodeFractions::new(0.6, 0.4, 0.0)).l;
        let cfg = OdeConfig {
            eta: Some(0.95),
            ..OdeConfig::default()
        };
        let tr = integrate(&sys, &x0, &cfg).unwrap();
        assert_eq!(tr.termination, Termination::EtaCrossed);
        let t = tr.t_eta.unwrap();
        let p = tr.fractions_at(t);
        assert!((p.p_a - 0.95).abs() < 1e-3, "{p:?}");
        assert!(p.p_b < 0.05);
    }

    #[test]
    fn interpolated_crossing_midpoint() {
        let mk = |t: f64, a: f64| OdeSample::<f64> {
            t,
            x: vec![],
            p: NodeFractions::new(a, 1.0 - a, 0.0),
        };
        let s = [mk(9.99, 0.948), mk(10.0, 0.949), mk(10.01, 0.951)];
        let t = detect_eta_crossing(&s, 0.95).unwrap();
        assert!((t - 10.005).abs() < 1e-12);
    }

    #[test]
    fn no_crossing_at_symmetric_point_or_eta_one() {
        let sys = SymmetricPair::new(5.0f64).unwrap();
        let x0 = embed_product6(&NodeFractions::new(0.5, 0.5, 0.0)).l;
        let cfg = OdeConfig {
            eta: Some(0.95),
            t_max: 50.0,
            sample_interval: 0.01,
            ..OdeConfig::default()
        };
        let tr = integrate(&sys, &x0, &cfg).unwrap();
        assert_eq!(tr.t_eta, None);
        assert_eq!(detect_eta_crossing(&tr.samples, 0.95), None);

        let x0 = embed_product6(&NodeFractions::new(0.6, 0.4, 0.0)).l;
        let cfg = OdeConfig {
            eta: Some(1.0),
            t_max: 200.0,
            ..OdeConfig::default()
        };
        let tr = integrate(&sys, &x0, &cfg).unwrap();
        assert_eq!(tr.t_eta, None);
        assert_ne!(tr.termination, Termination::EtaCrossed);
    }

    #[test]
    fn large_violation_is_a_domain_error() {
        let sys = SymmetricPair::new(5.0f64).unwrap();
        let r = integrate(&sys, &[0.5, 0.6, 0.0, 0.0, 0.0, 0.0], &OdeConfig::default());
        assert!(matches!(r, Err(Error::Domain { .. })));
    }

    #[test]
    fn integration_is_bitwise_deterministic() {
        let sys = SymmetricPair::new(3.0f64).unwrap();
        let x0 = embed_product6(&NodeFractions::new(0.55, 0.45, 0.0)).l;
        let cfg = OdeConfig {
            t_max: 30.0,
            ..OdeConfig::default()
        };
        assert_eq!(integrate(&sys, &x0, &cfg).unwrap(), integrate(&sys, &x0, &cfg).unwrap());
    }

    #[test]
    fn single_precision_also_integrates() {
        let sys = SymmetricPair::<f32>::new(5.0).unwrap();
        let x0 = embed_product6(&NodeFractions::new(0.6f32, 0.4, 0.0)).l;
        let cfg = OdeConfig::<f32> {
            eta: Some(0.95),
            steady_tol: 1e-6,
            guard_tol: 1e-5,
            ..OdeConfig::default()
        };
        let tr = integrate(&sys, &x0, &cfg).unwrap();
        assert_eq!(tr.termination, Termination::EtaCrossed);
    }

    #[test]
    fn bad_config_rejected() {
        let sys = SymmetricPair::new(5.0f64).unwrap();
        let x0 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let cfg = OdeConfig { dt: 0.0, ..OdeConfig::default() };
        assert!(integrate(&sys, &x0, &cfg).is_err());
        assert!(SymmetricPair::new(0.5).is_err());
        assert!(integrate(&sys, &x0[..3], &OdeConfig::default()).is_err());
    }
}
