use ng_core::network::Opinion;
use ng_core::oracle;
use ng_core::pair::tables::Correspondence;
use ng_core::pair::{self, LinkState, LinkState6, LinkState9, Mode};
use num_rational::BigRational;
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64Mcg;

type Q = BigRational;

fn random_rational_state(rng: &mut Pcg64Mcg, mode: Mode) -> LinkState<Q> {
    // Random integer weights, some zeroed, normalized exactly.
    let dim = mode.dim() + usize::from(mode == Mode::Committed);
    let w: Vec<i64> = (0..dim)
        .map(|_| if rng.random_bool(0.2) { 0 } else { rng.random_range(1..40) })
        .collect();
    let total: i64 = w.iter().sum::<i64>().max(1);
    let f: Vec<Q> = w.iter().map(|&x| Q::new(x.into(), total.into())).collect();
    match mode {
        Mode::Symmetric => LinkState::Six(LinkState6::new(std::array::from_fn(|i| f[i].clone()))),
        Mode::Committed => LinkState::Nine(LinkState9::new(std::array::from_fn(|i| f[i].clone()), f[9].clone())),
    }
}

fn transcribed_rhs(state: &LinkState<Q>, k: &Q) -> Vec<Q> {
    match state {
        LinkState::Six(s) => pair::rhs6(s, k).unwrap().to_vec(),
        LinkState::Nine(s) => pair::rhs9(s, k).unwrap().to_vec(),
    }
}

#[test]
fn direct_and_correspondence_matrices_match_exactly() {
    for mode in [Mode::Symmetric, Mode::Committed] {
        assert_eq!(oracle::direct_matrix::<Q>(mode), pair::direct_matrix::<Q>(mode), "D {mode:?}");
        assert_eq!(
            oracle::correspondence_matrix::<Q>(mode, Opinion::A),
            pair::correspondence_matrix::<Q>(mode, Correspondence::A),
            "Q_A {mode:?}"
        );
        assert_eq!(
            oracle::correspondence_matrix::<Q>(mode, Opinion::B),
            pair::correspondence_matrix::<Q>(mode, Correspondence::B),
            "Q_B {mode:?}"
        );
    }
}

#[test]
fn related_matrix_and_rhs_match_exactly_at_rational_states() {
    let mut rng = Pcg64Mcg::seed_from_u64(11);
    for mode in [Mode::Symmetric, Mode::Committed] {
        for _ in 0..60 {
            let st = random_rational_state(&mut rng, mode);
            assert_eq!(oracle::related_matrix(&st), pair::related_matrix(&st));
            let k = Q::new(rng.random_range(2..200).into(), 2.into());
            assert_eq!(oracle::enumerate_rhs(&st, &k).unwrap(), transcribed_rhs(&st, &k));
        }
    }
}
