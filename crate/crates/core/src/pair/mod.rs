//! Homogeneous pair-approximation dynamics of the binary Naming Game.
//!
//! The macrostate is the vector of link-type fractions `l = L / M`. Two
//! systems are provided:
//!
//! * the symmetric system over six link types (no committed agents), and
//! * the committed system over nine link types, where `C` denotes a node
//!   committed to `A`. Links between two committed nodes are inert and kept
//!   as the separate constant `l_cc`, so the tracked components sum to
//!   `1 - l_cc`.
//!
//! Both right-hand sides have the form `2[(1/k) D + ((k-1)/k) R(l)] l` with
//! a constant direct-change matrix `D` and a state-dependent related-change
//! matrix `R(l)` assembled from the correspondence matrices `Q_A`, `Q_B` and
//! the effective fields `P(.|A)`, `P(.|B)`, `P(.|AB)`.

pub mod tables;

use crate::error::{param, Result};
use crate::scalar::{max_of, Scalar};
use tables::{Correspondence, Field, RelatedTerm};

/// Link order of the symmetric system.
pub const LINK6_LABELS: [&str; 6] = ["A-A", "A-B", "A-AB", "B-B", "B-AB", "AB-AB"];

/// Link order of the committed system (`C` = committed to `A`).
pub const LINK9_LABELS: [&str; 9] = [
    "A-C", "B-C", "AB-C", "A-A", "A-B", "A-AB", "B-B", "B-AB", "AB-AB",
];

/// Neighbor order of the committed-system effective fields.
pub const NEIGHBOR9_LABELS: [&str; 4] = ["C", "A", "B", "AB"];

/// Symmetric (no committed agents, 6 link types) or committed (9 link types).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Symmetric,
    Committed,
}

impl Mode {
    pub fn dim(self) -> usize {
        match self {
            Mode::Symmetric => 6,
            Mode::Committed => 9,
        }
    }

    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Mode::Symmetric => &LINK6_LABELS,
            Mode::Committed => &LINK9_LABELS,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkState6<T> {
    pub l: [T; 6],
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkState9<T> {
    pub l: [T; 9],
    /// Fraction of committed-committed links; constant in time.
    pub l_cc: T,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LinkState<T> {
    Six(LinkState6<T>),
    Nine(LinkState9<T>),
}

/// Node opinion fractions. In the committed system `p_a` includes the
/// committed nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeFractions<T> {
    pub p_a: T,
    pub p_b: T,
    pub p_ab: T,
}

/// Conditional neighbor-opinion distributions `P(.|A)`, `P(.|B)`, `P(.|AB)`.
///
/// `F = 3` in the symmetric system (neighbor in `A, B, AB`), `F = 4` in the
/// committed one (neighbor in `C, A, B, AB`). A field is `None` when no link
/// touches a node of that opinion.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveFields<T, const F: usize> {
    pub cond_a: Option<[T; F]>,
    pub cond_b: Option<[T; F]>,
    pub cond_ab: Option<[T; F]>,
}

pub type Fields6<T> = EffectiveFields<T, 3>;
pub type Fields9<T> = EffectiveFields<T, 4>;

impl<T, const F: usize> EffectiveFields<T, F> {
    pub fn get(&self, field: Field) -> Option<&[T; F]> {
        match field {
            Field::A => self.cond_a.as_ref(),
            Field::B => self.cond_b.as_ref(),
            Field::AB => self.cond_ab.as_ref(),
        }
    }
}

fn zeros<T: Scalar, const N: usize>() -> [T; N] {
    std::array::from_fn(|_| T::zero())
}

fn normalized<T: Scalar, const F: usize>(num: [T; F]) -> Option<[T; F]> {
    let den = num.iter().fold(T::zero(), |acc, x| acc + x.clone());
    if den <= T::zero() {
        return None;
    }
    Some(num.map(|x| x / den.clone()))
}

fn check_degree<T: Scalar>(k_avg: &T) -> Result<()> {
    if *k_avg < T::one() {
        return Err(param(format!("average degree must be >= 1, got {k_avg:?}")));
    }
    Ok(())
}

struct Layout<const L: usize, const F: usize> {
    d: &'static [[i8; L]; L],
    qa: &'static [[i8; F]; L],
    qb: &'static [[i8; F]; L],
    related: &'static [RelatedTerm],
}

const LAYOUT6: Layout<6, 3> = Layout {
    d: &tables::D6_QUARTERS,
    qa: &tables::QA6,
    qb: &tables::QB6,
    related: &tables::R6_TERMS,
};

const LAYOUT9: Layout<9, 4> = Layout {
    d: &tables::D9_QUARTERS,
    qa: &tables::QA9,
    qb: &tables::QB9,
    related: &tables::R9_TERMS,
};

impl<const L: usize, const F: usize> Layout<L, F> {
    /// `D l`.
    fn direct<T: Scalar>(&self, l: &[T; L]) -> [T; L] {
        let quarter = T::ratio(1, 4);
        std::array::from_fn(|i| {
            let mut acc = T::zero();
            for (j, lj) in l.iter().enumerate() {
                let c = self.d[i][j];
                if c != 0 {
                    acc = acc + T::int(c as i64) * lj.clone();
                }
            }
            acc * quarter.clone()
        })
    }

    /// `R(l) l`, computed as `Q_A u_A + Q_B u_B`.
    fn related<T: Scalar>(&self, l: &[T; L], fields: &EffectiveFields<T, F>) -> [T; L] {
        let mut ua: [T; F] = zeros();
        let mut ub: [T; F] = zeros();
        for t in self.related {
            let Some(p) = fields.get(t.field) else {
                continue;
            };
            let w = T::ratio(t.quarters as i64, 4) * l[t.column].clone();
            let u = match t.q {
                Correspondence::A => &mut ua,
                Correspondence::B => &mut ub,
            };
            for (uf, pf) in u.iter_mut().zip(p) {
                *uf = uf.clone() + w.clone() * pf.clone();
            }
        }
        std::array::from_fn(|i| {
            let mut acc = T::zero();
            for f in 0..F {
                if self.qa[i][f] != 0 {
                    acc = acc + T::int(self.qa[i][f] as i64) * ua[f].clone();
                }
                if self.qb[i][f] != 0 {
                    acc = acc + T::int(self.qb[i][f] as i64) * ub[f].clone();
                }
            }
            acc
        })
    }

    /// `2 [w_direct D + w_related R(l)] l`.
    fn combine<T: Scalar>(
        &self,
        l: &[T; L],
        fields: &EffectiveFields<T, F>,
        w_direct: &T,
        w_related: &T,
    ) -> [T; L] {
        let two = T::int(2);
        let dl = if w_direct.is_zero() {
            zeros()
        } else {
            self.direct(l)
        };
        let rl = if w_related.is_zero() {
            zeros()
        } else {
            self.related(l, fields)
        };
        std::array::from_fn(|i| {
            two.clone() * (w_direct.clone() * dl[i].clone() + w_related.clone() * rl[i].clone())
        })
    }

    /// Columns of `R(l)` as a dense row-major matrix.
    fn related_matrix<T: Scalar>(&self, fields: &EffectiveFields<T, F>) -> Vec<Vec<T>> {
        let mut r = vec![vec![T::zero(); L]; L];
        for t in self.related {
            let Some(p) = fields.get(t.field) else {
                continue;
            };
            let q = match t.q {
                Correspondence::A => self.qa,
                Correspondence::B => self.qb,
            };
            let w = T::ratio(t.quarters as i64, 4);
            for (i, row) in r.iter_mut().enumerate() {
                for f in 0..F {
                    if q[i][f] != 0 {
                        row[t.column] = row[t.column].clone()
                            + w.clone() * T::int(q[i][f] as i64) * p[f].clone();
                    }
                }
            }
        }
        r
    }
}

/// Degree weights `(1/k, (k-1)/k)` of the direct and related terms.
fn degree_weights<T: Scalar>(k_avg: &T) -> (T, T) {
    let direct = T::one() / k_avg.clone();
    let related = (k_avg.clone() - T::one()) / k_avg.clone();
    (direct, related)
}

impl<T: Scalar> LinkState6<T> {
    pub fn new(l: [T; 6]) -> Self {
        LinkState6 { l }
    }

    /// All links `A-A`.
    pub fn consensus_a() -> Self {
        let mut l = zeros();
        l[0] = T::one();
        LinkState6 { l }
    }

    pub fn sum(&self) -> T {
        self.l.iter().fold(T::zero(), |a, x| a + x.clone())
    }

    pub fn effective_fields(&self) -> Fields6<T> {
        let [aa, ab, am, bb, bm, mm] = self.l.clone();
        let two = T::int(2);
        EffectiveFields {
            cond_a: normalized([two.clone() * aa, ab.clone(), am.clone()]),
            cond_b: normalized([ab, two.clone() * bb, bm.clone()]),
            cond_ab: normalized([am, bm, two * mm]),
        }
    }

    pub fn node_fractions(&self) -> NodeFractions<T> {
        node_fractions6(&self.l)
    }

    /// Opinion relabeling `A <-> B`.
    pub fn swap_ab(&self) -> Self {
        LinkState6 {
            l: swap_ab6(&self.l),
        }
    }

    /// Checks nonnegativity and unit mass within `tol`.
    pub fn validate(&self, tol: &T) -> Result<()> {
        validate_simplex(&self.l, &T::one(), tol)
    }
}

impl<T: Scalar> LinkState9<T> {
    pub fn new(l: [T; 9], l_cc: T) -> Self {
        LinkState9 { l, l_cc }
    }

    /// Mass carried by the nine tracked components, `1 - l_cc`.
    pub fn tracked_mass(&self) -> T {
        T::one() - self.l_cc.clone()
    }

    pub fn sum(&self) -> T {
        self.l.iter().fold(T::zero(), |a, x| a + x.clone())
    }

    pub fn effective_fields(&self) -> Fields9<T> {
        let [ac, bc, mc, aa, ab, am, bb, bm, mm] = self.l.clone();
        let two = T::int(2);
        EffectiveFields {
            cond_a: normalized([ac, two.clone() * aa, ab.clone(), am.clone()]),
            cond_b: normalized([bc, ab, two.clone() * bb, bm.clone()]),
            cond_ab: normalized([mc, am, bm, two * mm]),
        }
    }

    pub fn node_fractions(&self) -> NodeFractions<T> {
        node_fractions9(&self.l, &self.l_cc)
    }

    /// Committed node fraction implied by the link census.
    pub fn committed_fraction(&self) -> T {
        committed_fraction9(&self.l, &self.l_cc)
    }

    pub fn validate(&self, tol: &T) -> Result<()> {
        if self.l_cc < T::zero() || self.l_cc > T::one() {
            return Err(param(format!("l_cc out of range: {:?}", self.l_cc)));
        }
        validate_simplex(&self.l, &self.tracked_mass(), tol)
    }
}

impl<T: Scalar> LinkState<T> {
    pub fn mode(&self) -> Mode {
        match self {
            LinkState::Six(_) => Mode::Symmetric,
            LinkState::Nine(_) => Mode::Committed,
        }
    }

    pub fn components(&self) -> &[T] {
        match self {
            LinkState::Six(s) => &s.l,
            LinkState::Nine(s) => &s.l,
        }
    }

    pub fn node_fractions(&self) -> NodeFractions<T> {
        match self {
            LinkState::Six(s) => s.node_fractions(),
            LinkState::Nine(s) => s.node_fractions(),
        }
    }

    /// Conserved sum of the tracked components.
    pub fn tracked_mass(&self) -> T {
        match self {
            LinkState::Six(_) => T::one(),
            LinkState::Nine(s) => s.tracked_mass(),
        }
    }
}

impl<T: Scalar> NodeFractions<T> {
    pub fn new(p_a: T, p_b: T, p_ab: T) -> Self {
        NodeFractions { p_a, p_b, p_ab }
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.p_a.clone(), self.p_b.clone(), self.p_ab.clone()]
    }

    pub fn from_array([p_a, p_b, p_ab]: [T; 3]) -> Self {
        NodeFractions { p_a, p_b, p_ab }
    }

    pub fn sum(&self) -> T {
        self.p_a.clone() + self.p_b.clone() + self.p_ab.clone()
    }

    /// `max(p_A, p_B)`, the quantity compared against the consensus threshold.
    pub fn majority(&self) -> T {
        max_of(self.p_a.clone(), self.p_b.clone())
    }
}

pub(crate) fn swap_ab6<T: Clone>(l: &[T; 6]) -> [T; 6] {
    let [aa, ab, am, bb, bm, mm] = l.clone();
    [bb, ab, bm, aa, am, mm]
}

pub(crate) fn node_fractions6<T: Scalar>(l: &[T; 6]) -> NodeFractions<T> {
    let [aa, ab, am, bb, bm, mm] = l.clone();
    let two = T::int(2);
    let half = T::ratio(1, 2);
    NodeFractions {
        p_a: half.clone() * (two.clone() * aa + ab.clone() + am.clone()),
        p_b: half.clone() * (ab + two.clone() * bb + bm.clone()),
        p_ab: half * (am + bm + two * mm),
    }
}

pub(crate) fn committed_fraction9<T: Scalar>(l: &[T; 9], l_cc: &T) -> T {
    T::ratio(1, 2) * (T::int(2) * l_cc.clone() + l[0].clone() + l[1].clone() + l[2].clone())
}

pub(crate) fn node_fractions9<T: Scalar>(l: &[T; 9], l_cc: &T) -> NodeFractions<T> {
    let [ac, bc, mc, aa, ab, am, bb, bm, mm] = l.clone();
    let two = T::int(2);
    let half = T::ratio(1, 2);
    let susceptible_a = half.clone() * (ac + two.clone() * aa + ab.clone() + am.clone());
    NodeFractions {
        p_a: susceptible_a + committed_fraction9(l, l_cc),
        p_b: half.clone() * (bc + ab + two.clone() * bb + bm.clone()),
        p_ab: half * (mc + am + bm + two * mm),
    }
}

fn validate_simplex<T: Scalar>(x: &[T], target: &T, tol: &T) -> Result<()> {
    let dev = simplex_deviation(x, target);
    if dev > *tol {
        return Err(param(format!(
            "link state off the simplex by {:e}",
            dev.as_f64()
        )));
    }
    Ok(())
}

/// Largest of: negative excursion, excursion above 1, and mass error.
pub fn simplex_deviation<T: Scalar>(x: &[T], target: &T) -> T {
    let mut dev = T::zero();
    let mut sum = T::zero();
    for xi in x {
        dev = max_of(dev, -xi.clone());
        dev = max_of(dev, xi.clone() - T::one());
        sum = sum + xi.clone();
    }
    max_of(dev, (sum - target.clone()).abs())
}

/// Domain guard applied after every integration step.
///
/// Violations up to `tol` are repaired by clipping into `[0, 1]` and
/// rescaling to the conserved mass `target`; larger violations return the
/// deviation as the error.
pub fn guard_simplex<T: Scalar>(x: &mut [T], target: &T, tol: &T) -> std::result::Result<(), T> {
    let dev = simplex_deviation(x, target);
    if dev > *tol {
        return Err(dev);
    }
    let mut sum = T::zero();
    for xi in x.iter_mut() {
        if *xi < T::zero() {
            *xi = T::zero();
        } else if *xi > T::one() {
            *xi = T::one();
        }
        sum = sum + xi.clone();
    }
    if sum > T::zero() && sum != *target {
        let scale = target.clone() / sum;
        for xi in x.iter_mut() {
            *xi = xi.clone() * scale.clone();
        }
    }
    Ok(())
}

pub fn effective_fields6<T: Scalar>(l: &LinkState6<T>) -> Fields6<T> {
    l.effective_fields()
}

pub fn effective_fields9<T: Scalar>(l: &LinkState9<T>) -> Fields9<T> {
    l.effective_fields()
}

/// Symmetric right-hand side `dl/dt`.
pub fn rhs6<T: Scalar>(l: &LinkState6<T>, k_avg: &T) -> Result<[T; 6]> {
    check_degree(k_avg)?;
    Ok(rhs6_unchecked(&l.l, k_avg))
}

pub(crate) fn rhs6_unchecked<T: Scalar>(l: &[T; 6], k_avg: &T) -> [T; 6] {
    let state = LinkState6 { l: l.clone() };
    let (wd, wr) = degree_weights(k_avg);
    LAYOUT6.combine(l, &state.effective_fields(), &wd, &wr)
}

/// Committed right-hand side `dl/dt` for the nine tracked components.
pub fn rhs9<T: Scalar>(l: &LinkState9<T>, k_avg: &T) -> Result<[T; 9]> {
    check_degree(k_avg)?;
    Ok(rhs9_unchecked(&l.l, k_avg))
}

pub(crate) fn rhs9_unchecked<T: Scalar>(l: &[T; 9], k_avg: &T) -> [T; 9] {
    // l_cc does not enter the effective fields or the matrices.
    let state = LinkState9 {
        l: l.clone(),
        l_cc: T::zero(),
    };
    let (wd, wr) = degree_weights(k_avg);
    LAYOUT9.combine(l, &state.effective_fields(), &wd, &wr)
}

/// `D` of the given system as a dense row-major matrix.
pub fn direct_matrix<T: Scalar>(mode: Mode) -> Vec<Vec<T>> {
    fn dense<T: Scalar, const L: usize>(d: &[[i8; L]; L]) -> Vec<Vec<T>> {
        d.iter()
            .map(|row| row.iter().map(|&c| T::ratio(c as i64, 4)).collect())
            .collect()
    }
    match mode {
        Mode::Symmetric => dense(LAYOUT6.d),
        Mode::Committed => dense(LAYOUT9.d),
    }
}

/// `Q_A` or `Q_B` of the given system as a dense row-major matrix.
pub fn correspondence_matrix<T: Scalar>(mode: Mode, which: Correspondence) -> Vec<Vec<T>> {
    fn dense<T: Scalar, const L: usize, const F: usize>(q: &[[i8; F]; L]) -> Vec<Vec<T>> {
        q.iter()
            .map(|row| row.iter().map(|&c| T::int(c as i64)).collect())
            .collect()
    }
    match (mode, which) {
        (Mode::Symmetric, Correspondence::A) => dense(LAYOUT6.qa),
        (Mode::Symmetric, Correspondence::B) => dense(LAYOUT6.qb),
        (Mode::Committed, Correspondence::A) => dense(LAYOUT9.qa),
        (Mode::Committed, Correspondence::B) => dense(LAYOUT9.qb),
    }
}

/// `R(l)` as a dense row-major matrix.
pub fn related_matrix<T: Scalar>(state: &LinkState<T>) -> Vec<Vec<T>> {
    match state {
        LinkState::Six(s) => LAYOUT6.related_matrix(&s.effective_fields()),
        LinkState::Nine(s) => LAYOUT9.related_matrix(&s.effective_fields()),
    }
}

/// Product-measure link state of the symmetric system.
pub fn embed_product6<T: Scalar>(p: &NodeFractions<T>) -> LinkState6<T> {
    let [a, b, m] = p.to_array();
    let two = T::int(2);
    LinkState6 {
        l: [
            a.clone() * a.clone(),
            two.clone() * a.clone() * b.clone(),
            two.clone() * a * m.clone(),
            b.clone() * b.clone(),
            two * b * m.clone(),
            m.clone() * m,
        ],
    }
}

/// Product-measure link state of the committed system. `p.p_a` includes the
/// committed fraction, so it must be at least `committed`.
pub fn embed_product9<T: Scalar>(p: &NodeFractions<T>, committed: &T) -> Result<LinkState9<T>> {
    if *committed < T::zero() || *committed >= T::one() {
        return Err(param(format!(
            "committed fraction must lie in [0, 1), got {committed:?}"
        )));
    }
    if p.p_a < *committed {
        return Err(param(format!(
            "p_A = {:?} is below the committed fraction {committed:?}",
            p.p_a
        )));
    }
    let c = committed.clone();
    let a = p.p_a.clone() - c.clone();
    let b = p.p_b.clone();
    let m = p.p_ab.clone();
    let two = T::int(2);
    Ok(LinkState9 {
        l: [
            two.clone() * a.clone() * c.clone(),
            two.clone() * b.clone() * c.clone(),
            two.clone() * m.clone() * c.clone(),
            a.clone() * a.clone(),
            two.clone() * a.clone() * b.clone(),
            two.clone() * a * m.clone(),
            b.clone() * b.clone(),
            two * b * m.clone(),
            m.clone() * m,
        ],
        l_cc: c.clone() * c,
    })
}

/// Product-measure embedding; the committed system is used iff
/// `committed > 0`.
pub fn embed_product<T: Scalar>(p: &NodeFractions<T>, committed: &T) -> Result<LinkState<T>> {
    if committed.is_zero() {
        Ok(LinkState::Six(embed_product6(p)))
    } else {
        embed_product9(p, committed).map(LinkState::Nine)
    }
}

pub fn node_fractions<T: Scalar>(l: &LinkState<T>) -> NodeFractions<T> {
    l.node_fractions()
}

/// Mean-field (`<k> -> infinity`) vector field on node fractions.
///
/// Evaluates `2 R(l) l` at the product-measure embedding of `p` and maps
/// the result back through the linear node-fraction map.
pub fn rhs_meanfield<T: Scalar>(p: &NodeFractions<T>, committed: &T) -> Result<NodeFractions<T>> {
    let (zero, one) = (T::zero(), T::one());
    if committed.is_zero() {
        let l = embed_product6(p);
        let dl = LAYOUT6.combine(&l.l, &l.effective_fields(), &zero, &one);
        Ok(node_fractions6(&dl))
    } else {
        let l = embed_product9(p, committed)?;
        let dl = LAYOUT9.combine(&l.l, &l.effective_fields(), &zero, &one);
        Ok(node_fractions9(&dl, &zero))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    fn q6(v: [(i64, i64); 6]) -> LinkState6<Q> {
        LinkState6::new(v.map(|(n, d)| q(n, d)))
    }

    #[test]
    fn fields_at_product_state() {
        let l = q6([(1, 4), (1, 2), (0, 1), (1, 4), (0, 1), (0, 1)]);
        let f = l.effective_fields();
        assert_eq!(f.cond_a, Some([q(1, 2), q(1, 2), q(0, 1)]));
        assert_eq!(f.cond_b, Some([q(1, 2), q(1, 2), q(0, 1)]));
        assert_eq!(f.cond_ab, None);
    }

    #[test]
    fn fields_at_consensus_are_absent_except_a() {
        let f = LinkState6::<Q>::consensus_a().effective_fields();
        assert_eq!(f.cond_a, Some([q(1, 1), q(0, 1), q(0, 1)]));
        assert!(f.cond_b.is_none());
        assert!(f.cond_ab.is_none());
    }

    #[test]
    fn committed_field_includes_committed_neighbors() {
        let mut l: [Q; 9] = zeros();
        l[0] = q(1, 5); // A-C
        l[3] = q(1, 5); // A-A
        l[4] = q(1, 5); // A-B
        l[6] = q(2, 5); // B-B
        let s = LinkState9::new(l, q(0, 1));
        let f = s.effective_fields();
        // P(C|A) = l_AC / (l_AC + 2 l_AA + l_AB + l_AAB)
        assert_eq!(f.cond_a.unwrap(), [q(1, 4), q(2, 4), q(1, 4), q(0, 1)]);
        assert!(f.cond_ab.is_none());
    }

    #[test]
    fn unit_ab_link_at_k1_is_twice_the_d_column() {
        let l = q6([(0, 1), (1, 1), (0, 1), (0, 1), (0, 1), (0, 1)]);
        let d = rhs6(&l, &q(1, 1)).unwrap();
        assert_eq!(d, [0, -2, 1, 0, 1, 0].map(|v| q(v, 1)));
    }

    #[test]
    fn unit_bc_link_at_k1() {
        let mut l: [Q; 9] = zeros();
        l[1] = q(1, 1);
        let d = rhs9(&LinkState9::new(l, q(0, 1)), &q(1, 1)).unwrap();
        assert_eq!(d, [0, -1, 1, 0, 0, 0, 0, 0, 0].map(|v| q(v, 1)));
    }

    #[test]
    fn consensus_is_fixed_for_any_degree() {
        for k in [q(1, 1), q(5, 2), q(50, 1)] {
            let d = rhs6(&LinkState6::consensus_a(), &k).unwrap();
            assert!(d.iter().all(|x| x.is_zero()));
        }
        let p = q(1, 10);
        let one_m = q(1, 1) - p.clone();
        let mut l: [Q; 9] = zeros();
        l[0] = q(2, 1) * p.clone() * one_m.clone();
        l[3] = one_m.clone() * one_m;
        let s = LinkState9::new(l, p.clone() * p);
        for k in [q(1, 1), q(10, 1), q(10_000, 1)] {
            assert!(rhs9(&s, &k).unwrap().iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn degree_below_one_is_rejected() {
        let l = LinkState6::<f64>::consensus_a();
        assert!(rhs6(&l, &0.5).is_err());
        let s = LinkState9::new([0.0; 9], 1.0);
        assert!(rhs9(&s, &0.99).is_err());
    }

    #[test]
    fn product_embedding_examples() {
        let l = embed_product6(&NodeFractions::new(q(1, 2), q(1, 2), q(0, 1)));
        assert_eq!(l, q6([(1, 4), (1, 2), (0, 1), (1, 4), (0, 1), (0, 1)]));
        let l = embed_product6(&NodeFractions::new(q(1, 1), q(0, 1), q(0, 1)));
        assert_eq!(l, LinkState6::consensus_a());

        let s = embed_product9(&NodeFractions::new(0.1f64, 0.9, 0.0), &0.1).unwrap();
        assert!((s.l[1] - 0.18).abs() < 1e-15);
        assert!((s.l[6] - 0.81).abs() < 1e-15);
        assert!((s.l_cc - 0.01).abs() < 1e-15);
        let p = s.node_fractions();
        assert!((p.p_b - 0.9).abs() < 1e-15 && (p.p_a - 0.1).abs() < 1e-15);
        assert!(embed_product9(&NodeFractions::new(0.05, 0.95, 0.0), &0.1).is_err());
    }

    #[test]
    fn node_fraction_examples() {
        let p = LinkState6::<Q>::consensus_a().node_fractions();
        assert_eq!(p, NodeFractions::new(q(1, 1), q(0, 1), q(0, 1)));
        let p = q6([(1, 4), (1, 2), (0, 1), (1, 4), (0, 1), (0, 1)]).node_fractions();
        assert_eq!(p, NodeFractions::new(q(1, 2), q(1, 2), q(0, 1)));
    }

    #[test]
    fn meanfield_examples() {
        let d = rhs_meanfield(&NodeFractions::new(q(1, 2), q(1, 2), q(0, 1)), &q(0, 1)).unwrap();
        assert_eq!(d.p_a, d.p_b);
        assert!(d.p_ab > q(0, 1));
        let d = rhs_meanfield(&NodeFractions::new(q(1, 1), q(0, 1), q(0, 1)), &q(0, 1)).unwrap();
        assert_eq!(d, NodeFractions::new(q(0, 1), q(0, 1), q(0, 1)));
    }

    #[test]
    fn guard_repairs_small_and_rejects_large() {
        let mut x = [0.5, 0.5 + 5e-10, -5e-10];
        guard_simplex(&mut x, &1.0, &1e-9).unwrap();
        assert!(x.iter().all(|&v| v >= 0.0));
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let mut y = [0.5, 0.6, -0.1];
        assert!(guard_simplex(&mut y, &1.0, &1e-9).is_err());
    }
}
