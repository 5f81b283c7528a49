//! Expected link-census change per interaction, summed event by event.
//!
//! Every `(speaker opinion, listener opinion, uttered word)` triple is an
//! event. Its probability is the chance of drawing a directed edge of that
//! type times the chance of the word. Its effect is the relinking of the
//! communicating pair (direct change) plus, for each node that switched
//! opinion, the expected relinking of its `k - 1` other links, whose far
//! ends are distributed according to the conditional neighbor distribution
//! of the node's old opinion (related change).

use crate::error::{param, Result};
use crate::network::{Opinion, Word};
use crate::pair::{LinkState, LinkState6, LinkState9, Mode};
use crate::scalar::Scalar;

use super::rules::{interact, utterances};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpinionChange {
    pub from: Opinion,
    pub to: Opinion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommunicationEvent<T> {
    pub speaker: Opinion,
    pub listener: Opinion,
    pub word: Word,
    pub probability: T,
    /// Change of the link-fraction vector from relinking the pair itself.
    pub direct: Vec<T>,
    pub listener_change: Option<OpinionChange>,
    pub speaker_change: Option<OpinionChange>,
}

fn node_types(mode: Mode) -> &'static [Opinion] {
    use Opinion::*;
    match mode {
        Mode::Symmetric => &[A, B, AB],
        Mode::Committed => &[Committed, A, B, AB],
    }
}

fn rank(o: Opinion) -> usize {
    match o {
        Opinion::A => 0,
        Opinion::B => 1,
        Opinion::AB => 2,
        Opinion::Committed => 3,
    }
}

/// Position of the unordered link `x-y` in the macrostate vector; `None`
/// for committed-committed links, which are not tracked.
fn link_index(mode: Mode, x: Opinion, y: Opinion) -> Option<usize> {
    let (lo, hi) = if rank(x) <= rank(y) { (x, y) } else { (y, x) };
    let among_susceptible = |a: Opinion, b: Opinion| -> usize {
        // Upper triangle of the 3x3 table A, B, AB in row order.
        match (rank(a), rank(b)) {
            (0, 0) => 0,
            (0, 1) => 1,
            (0, 2) => 2,
            (1, 1) => 3,
            (1, 2) => 4,
            (2, 2) => 5,
            _ => unreachable!("susceptible pair expected"),
        }
    };
    match mode {
        Mode::Symmetric => {
            assert!(hi != Opinion::Committed, "no committed nodes in the symmetric system");
            Some(among_susceptible(lo, hi))
        }
        Mode::Committed => match (lo, hi) {
            (Opinion::Committed, Opinion::Committed) => None,
            (other, Opinion::Committed) => Some(rank(other)),
            (a, b) => Some(3 + among_susceptible(a, b)),
        },
    }
}

fn unit<T: Scalar>(dim: usize, idx: Option<usize>, sign: i64) -> Vec<T> {
    let mut v = vec![T::zero(); dim];
    if let Some(i) = idx {
        v[i] = T::int(sign);
    }
    v
}

fn add_scaled<T: Scalar>(acc: &mut [T], v: &[T], s: &T) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a = a.clone() + s.clone() * x.clone();
    }
}

/// View of a link state as a function of unordered opinion pairs.
struct Census<'a, T> {
    state: &'a LinkState<T>,
}

impl<T: Scalar> Census<'_, T> {
    fn mode(&self) -> Mode {
        self.state.mode()
    }

    fn fraction(&self, x: Opinion, y: Opinion) -> T {
        match (self.state, link_index(self.mode(), x, y)) {
            (LinkState::Six(s), Some(i)) => s.l[i].clone(),
            (LinkState::Nine(s), Some(i)) => s.l[i].clone(),
            (LinkState::Nine(s), None) => s.l_cc.clone(),
            (LinkState::Six(_), None) => unreachable!(),
        }
    }

    /// Probability that a uniformly drawn link end at a node of opinion
    /// `given` leads to a node of opinion `neighbor`. A link `x-x` has two
    /// ends at `x` nodes. `None` when no link touches a `given` node.
    fn conditional(&self, given: Opinion, neighbor: Opinion) -> Option<T> {
        let ends = |z: Opinion| {
            let f = self.fraction(given, z);
            if z == given {
                T::int(2) * f
            } else {
                f
            }
        };
        let total = node_types(self.mode())
            .iter()
            .fold(T::zero(), |acc, &z| acc + ends(z));
        if total.is_zero() {
            None
        } else {
            Some(ends(neighbor) / total)
        }
    }
}

/// Change of the link vector when one end of an `from-neighbor` link turns
/// into `to`.
fn relink<T: Scalar>(mode: Mode, from: Opinion, to: Opinion, neighbor: Opinion) -> Vec<T> {
    let dim = mode.dim();
    let mut v = unit::<T>(dim, link_index(mode, from, neighbor), -1);
    add_scaled(&mut v, &unit::<T>(dim, link_index(mode, to, neighbor), 1), &T::one());
    v
}

/// Expected relinking of the other links of a node switching `from -> to`,
/// per other link.
fn related_change<T: Scalar>(census: &Census<'_, T>, change: OpinionChange) -> Vec<T> {
    let mode = census.mode();
    let mut acc = vec![T::zero(); mode.dim()];
    for &z in node_types(mode) {
        if let Some(p) = census.conditional(change.from, z) {
            add_scaled(&mut acc, &relink(mode, change.from, change.to, z), &p);
        }
    }
    acc
}

/// All events with probabilities `pair_weight(speaker, listener) * P(word)`.
fn events_weighted<T: Scalar>(
    mode: Mode,
    pair_weight: impl Fn(Opinion, Opinion) -> T,
) -> Vec<CommunicationEvent<T>> {
    let types = node_types(mode);
    let dim = mode.dim();
    let mut out = Vec::new();
    for &speaker in types {
        for &listener in types {
            let w = pair_weight(speaker, listener);
            for &(word, num, den) in utterances(speaker) {
                let (s2, l2) = interact(speaker, listener, word);
                let mut direct = unit::<T>(dim, link_index(mode, speaker, listener), -1);
                add_scaled(&mut direct, &unit::<T>(dim, link_index(mode, s2, l2), 1), &T::one());
                let change = |from: Opinion, to: Opinion| (from != to).then_some(OpinionChange { from, to });
                out.push(CommunicationEvent {
                    speaker,
                    listener,
                    word,
                    probability: w.clone() * T::ratio(num, den),
                    direct,
                    listener_change: change(listener, l2),
                    speaker_change: change(speaker, s2),
                });
            }
        }
    }
    out
}

/// Probability of drawing a directed speaker->listener edge of the given
/// opinion types: `l_xy / 2` for `x != y` (one of two orientations),
/// `l_xx` otherwise.
fn orientation_weight<T: Scalar>(census: &Census<'_, T>, s: Opinion, l: Opinion) -> T {
    let f = census.fraction(s, l);
    if s == l {
        f
    } else {
        f * T::ratio(1, 2)
    }
}

/// Every communication event at the given link state.
pub fn enumerate_events<T: Scalar>(state: &LinkState<T>) -> Vec<CommunicationEvent<T>> {
    let census = Census { state };
    events_weighted(state.mode(), |s, l| orientation_weight(&census, s, l))
}

/// `dl/dt` assembled event by event.
pub fn enumerate_rhs<T: Scalar>(state: &LinkState<T>, k_avg: &T) -> Result<Vec<T>> {
    if *k_avg < T::one() {
        return Err(param(format!("average degree must be >= 1, got {k_avg:?}")));
    }
    let census = Census { state };
    let others = k_avg.clone() - T::one();
    let mut acc = vec![T::zero(); state.mode().dim()];
    for ev in enumerate_events(state) {
        if ev.probability.is_zero() {
            continue;
        }
        let mut change = ev.direct.clone();
        for c in [ev.listener_change, ev.speaker_change].into_iter().flatten() {
            add_scaled(&mut change, &related_change(&census, c), &others);
        }
        add_scaled(&mut acc, &change, &ev.probability);
    }
    // One unit of time is N interactions and N / M = 2 / k.
    let scale = T::int(2) / k_avg.clone();
    Ok(acc.into_iter().map(|x| x * scale.clone()).collect())
}

fn unit_state<T: Scalar>(mode: Mode, j: usize) -> LinkState<T> {
    match mode {
        Mode::Symmetric => LinkState::Six(LinkState6::new(std::array::from_fn(|i| {
            if i == j {
                T::one()
            } else {
                T::zero()
            }
        }))),
        Mode::Committed => LinkState::Nine(LinkState9::new(
            std::array::from_fn(|i| if i == j { T::one() } else { T::zero() }),
            T::zero(),
        )),
    }
}

fn columns_to_rows<T: Scalar>(cols: Vec<Vec<T>>) -> Vec<Vec<T>> {
    let rows = cols.first().map_or(0, Vec::len);
    (0..rows)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect()
}

/// Direct-change matrix: column `j` is the expected direct change per
/// interaction on a network made entirely of link type `j`.
pub fn direct_matrix<T: Scalar>(mode: Mode) -> Vec<Vec<T>> {
    let cols = (0..mode.dim())
        .map(|j| {
            let mut col = vec![T::zero(); mode.dim()];
            for ev in enumerate_events(&unit_state::<T>(mode, j)) {
                add_scaled(&mut col, &ev.direct, &ev.probability);
            }
            col
        })
        .collect();
    columns_to_rows(cols)
}

/// Correspondence matrix for a node turning from `A` (or `B`) into `AB`:
/// column `z` is the relinking of a link to a neighbor of opinion `z`.
pub fn correspondence_matrix<T: Scalar>(mode: Mode, from: Opinion) -> Vec<Vec<T>> {
    let cols = node_types(mode)
        .iter()
        .map(|&z| relink::<T>(mode, from, Opinion::AB, z))
        .collect();
    columns_to_rows(cols)
}

/// Related-change matrix at `state`: column `j` is the expected related
/// change per unit fraction of link type `j`.
pub fn related_matrix<T: Scalar>(state: &LinkState<T>) -> Vec<Vec<T>> {
    let mode = state.mode();
    let census = Census { state };
    let cols = (0..mode.dim())
        .map(|j| {
            let unit_census = Census {
                state: &unit_state::<T>(mode, j),
            };
            let mut col = vec![T::zero(); mode.dim()];
            let events = events_weighted(mode, |s, l| orientation_weight(&unit_census, s, l));
            for ev in events {
                if ev.probability.is_zero() {
                    continue;
                }
                for c in [ev.listener_change, ev.speaker_change].into_iter().flatten() {
                    add_scaled(&mut col, &related_change(&census, c), &ev.probability);
                }
            }
            col
        })
        .collect();
    columns_to_rows(cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn speaker_b_listener_a_direct_change() {
        let st = LinkState::Six(LinkState6::new([0.25, 0.5, 0.0, 0.25, 0.0, 0.0]));
        let ev = enumerate_events(&st)
            .into_iter()
            .find(|e| e.speaker == Opinion::B && e.listener == Opinion::A)
            .unwrap();
        assert_eq!(ev.direct, vec![0.0, -1.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(ev.probability, 0.25);
        assert_eq!(
            ev.listener_change,
            Some(OpinionChange {
                from: Opinion::A,
                to: Opinion::AB
            })
        );
        assert_eq!(ev.speaker_change, None);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let st = LinkState::Nine(LinkState9::new(
            [1, 2, 3, 4, 5, 6, 7, 8, 9].map(|v| Q::ratio(v, 50)),
            Q::ratio(5, 50),
        ));
        let total = enumerate_events(&st)
            .iter()
            .fold(Q::ratio(0, 1), |a, e| a + e.probability.clone());
        assert_eq!(total, Q::ratio(1, 1));
    }

    #[test]
    fn link_indices_match_label_order() {
        use crate::pair::{LINK6_LABELS, LINK9_LABELS};
        use Opinion::*;
        let name = |o: Opinion| match o {
            A => "A",
            B => "B",
            AB => "AB",
            Committed => "C",
        };
        for &x in node_types(Mode::Symmetric) {
            for &y in node_types(Mode::Symmetric) {
                let i = link_index(Mode::Symmetric, x, y).unwrap();
                let label = LINK6_LABELS[i];
                assert!(label == format!("{}-{}", name(x), name(y)) || label == format!("{}-{}", name(y), name(x)));
            }
        }
        for &x in node_types(Mode::Committed) {
            for &y in node_types(Mode::Committed) {
                match link_index(Mode::Committed, x, y) {
                    Some(i) => {
                        let label = LINK9_LABELS[i];
                        assert!(label == format!("{}-{}", name(x), name(y)) || label == format!("{}-{}", name(y), name(x)));
                    }
                    None => assert!(x == Committed && y == Committed),
                }
            }
        }
    }
}
