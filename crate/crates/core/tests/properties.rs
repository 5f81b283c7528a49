use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use ng_core::integrator::{integrate, OdeConfig, SymmetricPair};
use ng_core::network::{generate_er, Opinion};
use ng_core::oracle::exact_expected_consensus_time;
use ng_core::pair::{direct_matrix, embed_product6, rhs6, rhs9, rhs_meanfield, LinkState6, LinkState9, Mode};
use ng_core::NodeFractions;
use proptest::prelude::*;

fn simplex(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0..1.0f64], dim).prop_filter_map("nonzero", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| w.iter().map(|x| x / s).collect())
    })
}

fn six(v: &[f64]) -> LinkState6<f64> {
    LinkState6::new(v.try_into().unwrap())
}

fn nine(v: &[f64]) -> LinkState9<f64> {
    LinkState9::new(v[..9].try_into().unwrap(), v[9])
}

fn degree() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), 1.0..100.0f64, Just(1e4)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn rhs6_conserves_mass(v in simplex(6), k in degree()) {
        let d = rhs6(&six(&v), &k).unwrap();
        prop_assert!(d.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn rhs9_conserves_tracked_mass(v in simplex(10), k in degree()) {
        let d = rhs9(&nine(&v), &k).unwrap();
        prop_assert!(d.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn rhs6_is_equivariant_under_swapping_words(v in simplex(6), k in degree()) {
        let l = six(&v);
        let lhs = rhs6(&l.swap_ab(), &k).unwrap();
        let rhs = six(&rhs6(&l, &k).unwrap()).swap_ab().l;
        for i in 0..6 {
            prop_assert!((lhs[i] - rhs[i]).abs() < 1e-13, "{i}: {} vs {}", lhs[i], rhs[i]);
        }
    }

    #[test]
    fn unit_degree_is_the_linear_direct_system(v in simplex(6)) {
        let d = rhs6(&six(&v), &1.0).unwrap();
        let m = direct_matrix::<f64>(Mode::Symmetric);
        for i in 0..6 {
            let lin: f64 = (0..6).map(|j| 2.0 * m[i][j] * v[j]).sum();
            prop_assert!((d[i] - lin).abs() < 1e-13);
        }
    }

    #[test]
    fn unit_degree_committed_is_linear(v in simplex(10)) {
        let d = rhs9(&nine(&v), &1.0).unwrap();
        let m = direct_matrix::<f64>(Mode::Committed);
        for i in 0..9 {
            let lin: f64 = (0..9).map(|j| 2.0 * m[i][j] * v[j]).sum();
            prop_assert!((d[i] - lin).abs() < 1e-13);
        }
    }

    #[test]
    fn vanishing_components_do_not_go_negative(v in simplex(6), w in simplex(10), k in degree()) {
        let d = rhs6(&six(&v), &k).unwrap();
        for i in 0..6 {
            if v[i] == 0.0 {
                prop_assert!(d[i] >= -1e-14, "6D component {i}: {}", d[i]);
            }
        }
        let d = rhs9(&nine(&w), &k).unwrap();
        for i in 0..9 {
            if w[i] == 0.0 {
                prop_assert!(d[i] >= -1e-14, "9D component {i}: {}", d[i]);
            }
        }
    }

    #[test]
    fn large_degree_matches_mean_field(p in simplex(3)) {
        let p = NodeFractions::new(p[0], p[1], p[2]);
        let l = embed_product6(&p);
        let pair = six(&rhs6(&l, &1e6).unwrap()).node_fractions().to_array();
        let mf = rhs_meanfield(&p, &0.0).unwrap().to_array();
        let scale = mf.iter().fold(1e-3f64, |a, x| a.max(x.abs()));
        for i in 0..3 {
            prop_assert!((pair[i] - mf[i]).abs() <= 1e-5 * scale, "{i}: {} vs {}", pair[i], mf[i]);
        }
    }
}

fn endpoint(dt: f64) -> Vec<f64> {
    let cfg = OdeConfig {
        dt,
        t_max: 5.0,
        sample_interval: 5.0,
        steady_tol: 1e-300,
        ..OdeConfig::default()
    };
    let l = embed_product6(&NodeFractions::new(0.6, 0.3, 0.1));
    let traj = integrate(&SymmetricPair::new(5.0).unwrap(), &l.l, &cfg).unwrap();
    assert!((traj.last().t - 5.0).abs() < 1e-9);
    traj.last().x.clone()
}

#[test]
fn rk4_converges_at_fourth_order() {
    let reference = endpoint(0.0025);
    let err = |x: Vec<f64>| x.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let (coarse, fine) = (err(endpoint(0.01)), err(endpoint(0.005)));
    // Richardson: against a reference at dt/4, ratio (1 - 4^-4)/(2^-4 - 4^-4) ≈ 17.
    let ratio = coarse / fine;
    assert!((13.0..21.0).contains(&ratio), "ratio {ratio}, errors {coarse:e} {fine:e}");
}

#[test]
fn trajectories_keep_the_simplex() {
    let cfg = OdeConfig { t_max: 200.0, ..OdeConfig::default() };
    let l = embed_product6(&NodeFractions::new(0.55, 0.45, 0.0));
    let traj = integrate(&SymmetricPair::new(3.0).unwrap(), &l.l, &cfg).unwrap();
    for s in &traj.samples {
        assert!((s.x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(s.x.iter().all(|&x| x >= 0.0));
    }
}

// Labeled chain on the complete graph: every node is tracked separately.
type Labeled = Vec<Opinion>;

fn after(speaker: Opinion, listener: Opinion, a: bool) -> (Opinion, Opinion) {
    use Opinion::*;
    let knows = |o: Opinion| match o {
        A | Committed => a,
        B => !a,
        AB => true,
    };
    if knows(listener) {
        let settle = |o: Opinion| if o == Committed { Committed } else if a { A } else { B };
        (settle(speaker), settle(listener))
    } else if listener == Committed {
        (speaker, listener)
    } else {
        (speaker, AB)
    }
}

fn labeled_moves(s: &Labeled) -> Vec<(Labeled, f64)> {
    let n = s.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let pick = 1.0 / (n * (n - 1)) as f64;
            let words: &[(bool, f64)] = match s[i] {
                Opinion::A | Opinion::Committed => &[(true, 1.0)],
                Opinion::B => &[(false, 1.0)],
                Opinion::AB => &[(true, 0.5), (false, 0.5)],
            };
            for &(a, w) in words {
                let (x, y) = after(s[i], s[j], a);
                let mut t = s.clone();
                t[i] = x;
                t[j] = y;
                out.push((t, pick * w));
            }
        }
    }
    out
}

fn labeled_expected_time(start: &Labeled) -> f64 {
    let n = start.len();
    let absorbed = |s: &Labeled| {
        let a = s.iter().filter(|o| matches!(o, Opinion::A | Opinion::Committed)).count();
        let b = s.iter().filter(|o| **o == Opinion::B).count();
        a == n || b == n
    };
    let mut states = vec![start.clone()];
    let mut index = HashMap::from([(start.clone(), 0usize)]);
    let mut i = 0;
    while i < states.len() {
        if !absorbed(&states[i]) {
            for (t, _) in labeled_moves(&states[i].clone()) {
                if !index.contains_key(&t) {
                    index.insert(t.clone(), states.len());
                    states.push(t);
                }
            }
        }
        i += 1;
    }
    let m = states.len();
    let mut a = DMatrix::<f64>::identity(m, m);
    let mut b = DVector::<f64>::zeros(m);
    for (i, s) in states.iter().enumerate() {
        if absorbed(s) {
            continue;
        }
        b[i] = 1.0;
        for (t, p) in labeled_moves(s) {
            a[(i, index[&t])] -= p;
        }
    }
    a.lu().solve(&b).unwrap()[0] / n as f64
}

#[test]
fn lumped_chain_matches_labeled_chain_on_three_nodes() {
    use Opinion::*;
    for start in [vec![A, B, B], vec![A, B, AB], vec![AB, AB, B], vec![Committed, B, B], vec![Committed, AB, B]] {
        let lumped = exact_expected_consensus_time(&start, 1.0).unwrap();
        let labeled = labeled_expected_time(&start);
        assert!((lumped - labeled).abs() < 1e-10, "{start:?}: {lumped} vs {labeled}");
    }
}

#[test]
fn er_mean_degree_matches_target() {
    for (n, seeds, tol) in [(100usize, 200u64, 0.1), (1000, 50, 0.05)] {
        let mean = (0..seeds)
            .map(|s| generate_er(n, 5.0, s).unwrap().mean_degree())
            .sum::<f64>()
            / seeds as f64;
        assert!((mean - 5.0).abs() < tol, "n = {n}: {mean}");
    }
}
