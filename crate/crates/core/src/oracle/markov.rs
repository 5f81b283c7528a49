//! Exact expected consensus time of the Naming Game on small complete graphs.
//!
//! On the complete graph nodes are exchangeable, so the chain lumps exactly
//! onto the opinion counts `(n_A, n_B, n_AB)` of the susceptible nodes. One
//! transition is one speaker-listener interaction; the expected number of
//! interactions to reach the consensus set solves `(I - P_TT) h = 1` over the
//! transient states.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{param, Error, Result};
use crate::network::Opinion;

use super::rules::{interact, utterances};

pub const MAX_EXACT_NODES: usize = 8;

type Counts = [usize; 4]; // A, B, AB, committed

fn slot(o: Opinion) -> usize {
    match o {
        Opinion::A => 0,
        Opinion::B => 1,
        Opinion::AB => 2,
        Opinion::Committed => 3,
    }
}

const TYPES: [Opinion; 4] = [Opinion::A, Opinion::B, Opinion::AB, Opinion::Committed];

fn successors(s: Counts) -> Vec<(Counts, f64)> {
    let n: usize = s.iter().sum();
    let mut out = Vec::new();
    for &x in &TYPES {
        let nx = s[slot(x)];
        if nx == 0 {
            continue;
        }
        for &y in &TYPES {
            let ny = s[slot(y)] - usize::from(x == y);
            if ny == 0 {
                continue;
            }
            let pick = nx as f64 / n as f64 * ny as f64 / (n - 1) as f64;
            for &(word, num, den) in utterances(x) {
                let (x2, y2) = interact(x, y, word);
                let mut t = s;
                t[slot(x)] -= 1;
                t[slot(y)] -= 1;
                t[slot(x2)] += 1;
                t[slot(y2)] += 1;
                out.push((t, pick * num as f64 / den as f64));
            }
        }
    }
    out
}

/// Expected time, in units of `N` interactions, until `max(p_A, p_B) >= eta`
/// starting from `initial` on the complete graph. With committed nodes
/// present only `p_A` (committed included) counts.
pub fn exact_expected_consensus_time(initial: &[Opinion], eta: f64) -> Result<f64> {
    let n = initial.len();
    if !(2..=MAX_EXACT_NODES).contains(&n) {
        return Err(param(format!(
            "exact chain supports 2..={MAX_EXACT_NODES} nodes, got {n}"
        )));
    }
    if !(eta > 0.5 && eta <= 1.0) {
        return Err(param(format!("eta must lie in (1/2, 1], got {eta}")));
    }
    let need = (eta * n as f64 - 1e-9).ceil() as usize;
    let mut start = [0usize; 4];
    for &o in initial {
        start[slot(o)] += 1;
    }
    let committed = start[3] > 0;
    let done = |s: &Counts| {
        let a = s[0] + s[3];
        if committed {
            a >= need
        } else {
            a.max(s[1]) >= need
        }
    };
    if done(&start) {
        return Ok(0.0);
    }

    let c = start[3];
    let free = n - c;
    let mut transient: Vec<Counts> = Vec::new();
    for a in 0..=free {
        for b in 0..=free - a {
            let s = [a, b, free - a - b, c];
            if !done(&s) {
                transient.push(s);
            }
        }
    }
    let index: HashMap<Counts, usize> = transient.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let t = transient.len();
    let mut a = DMatrix::<f64>::identity(t, t);
    for (i, s) in transient.iter().enumerate() {
        for (next, p) in successors(*s) {
            if let Some(&j) = index.get(&next) {
                a[(i, j)] -= p;
            }
        }
    }
    let rhs = DVector::<f64>::from_element(t, 1.0);
    let h = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Parameter("consensus is unreachable from some state".into()))?;
    Ok(h[index[&start]] / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Opinion::*;

    #[test]
    fn consensus_start_takes_no_time() {
        assert_eq!(exact_expected_consensus_time(&[A, A], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn successor_probabilities_sum_to_one() {
        for s in [[1, 1, 1, 0], [0, 3, 0, 1], [2, 0, 2, 2]] {
            let total: f64 = successors(s).iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_node_disagreement_by_hand() {
        // (A, B) always moves to a mixed pair (A, AB). From there only an
        // AB speaker uttering B fails, giving (AB, AB), which collapses on
        // the next interaction. h(A,AB) = 1 + 1/4 * 1, h(A,B) = 1 + h(A,AB).
        let t = exact_expected_consensus_time(&[A, B], 1.0).unwrap();
        assert!((t - 9.0 / 8.0).abs() < 1e-12, "{t}");
    }

    #[test]
    fn committed_minority_reaches_consensus() {
        let t = exact_expected_consensus_time(&[Committed, B, B, B], 1.0).unwrap();
        assert!(t.is_finite() && t > 0.0);
    }

    #[test]
    fn size_limits() {
        assert!(exact_expected_consensus_time(&[A; 9], 1.0).is_err());
        assert!(exact_expected_consensus_time(&[A], 1.0).is_err());
    }
}
