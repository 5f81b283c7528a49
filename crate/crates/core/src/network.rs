//! Erdős–Rényi networks, opinion assignments and link-type censuses.

use std::io::{BufRead, Write};

use rand::seq::index;
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64Mcg;

use crate::error::{param, Error, Result};
use crate::pair::{LinkState, LinkState6, LinkState9, Mode};

/// Undirected simple graph in compressed adjacency form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Network {
    /// Builds a network from an undirected edge list. Self-loops and
    /// duplicate edges are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(param(format!("edge ({i}, {j}) out of range for n = {n}")));
            }
            if i == j {
                return Err(param(format!("self-loop at node {i}")));
            }
            lists[i].push(j);
            lists[j].push(i);
        }
        for (i, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(param(format!("duplicate edge at node {i}")));
            }
        }
        Ok(Self::from_lists(lists))
    }

    fn from_lists(lists: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut targets = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        offsets.push(0);
        for list in &lists {
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Network {
            n: lists.len(),
            offsets,
            targets,
        }
    }

    pub fn complete(n: usize) -> Self {
        let lists = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).collect())
            .collect();
        Self::from_lists(lists)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edge count.
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.targets.len() as f64 / self.n as f64
        }
    }

    /// Edges `(i, j)` with `i < j`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| j > i)
                .map(move |&j| (i, j))
        })
    }

    /// Writes the edge list, one `i j` pair per line, preceded by a
    /// `# n <count>` comment so trailing isolated nodes survive a reload.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# n {}", self.n)?;
        for (i, j) in self.edges() {
            writeln!(w, "{i} {j}")?;
        }
        Ok(())
    }

    /// Reads an edge list. Without a `# n` header the node count is one more
    /// than the largest index seen.
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self> {
        let mut declared = None;
        let mut edges = Vec::new();
        let mut max_index = None;
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                if it.next() == Some("n") {
                    let v = it
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse(format!("line {}: bad node count", lineno + 1)))?;
                    declared = Some(v);
                }
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(i)), Some(Ok(j)), None) => {
                    max_index = Some(max_index.map_or(i.max(j), |m: usize| m.max(i).max(j)));
                    edges.push((i, j));
                }
                _ => return Err(Error::Parse(format!("line {}: expected `i j`", lineno + 1))),
            }
        }
        let n = declared.unwrap_or_else(|| max_index.map_or(0, |m| m + 1));
        Self::from_edges(n, &edges)
    }
}

/// G(n, p) with `p = k_avg / (n - 1)`, sampled by geometric skipping over
/// the pairs `j < i`.
pub fn generate_er(n: usize, k_avg: f64, seed: u64) -> Result<Network> {
    if n < 2 {
        return Err(param(format!("ER network needs n >= 2, got {n}")));
    }
    if !(k_avg > 0.0 && k_avg <= (n - 1) as f64) {
        return Err(param(format!(
            "average degree must lie in (0, n-1] = (0, {}], got {k_avg}",
            n - 1
        )));
    }
    let p = k_avg / (n - 1) as f64;
    if p >= 1.0 {
        return Ok(Network::complete(n));
    }
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
    let log_q = (1.0 - p).ln();
    let (mut v, mut w): (usize, i64) = (1, -1);
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        // Saturate absurd skips; they only end the loop.
        w += 1 + if skip < (n * n) as f64 { skip as i64 } else { (n * n) as i64 };
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            let u = w as usize;
            lists[v].push(u);
            lists[u].push(v);
        }
    }
    for list in &mut lists {
        list.sort_unstable();
    }
    Ok(Network::from_lists(lists))
}

/// Per-node memory. `Committed` nodes hold `A` forever.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Opinion {
    A = 0,
    B = 1,
    AB = 2,
    Committed = 3,
}

/// A word of the two-word alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Word {
    A,
    B,
}

impl Opinion {
    pub fn knows(self, word: Word) -> bool {
        matches!(
            (self, word),
            (Opinion::A | Opinion::AB | Opinion::Committed, Word::A) | (Opinion::B | Opinion::AB, Word::B)
        )
    }

    pub fn is_committed(self) -> bool {
        self == Opinion::Committed
    }

    /// Same opinion with the words `A` and `B` exchanged. Committed nodes
    /// have no mirror image.
    pub fn mirrored(self) -> Option<Opinion> {
        match self {
            Opinion::A => Some(Opinion::B),
            Opinion::B => Some(Opinion::A),
            Opinion::AB => Some(Opinion::AB),
            Opinion::Committed => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpinionState {
    pub opinions: Vec<Opinion>,
    pub committed_count: usize,
    pub mode: Mode,
}

impl OpinionState {
    pub fn new(opinions: Vec<Opinion>, mode: Mode) -> Result<Self> {
        let committed_count = opinions.iter().filter(|o| o.is_committed()).count();
        if mode == Mode::Symmetric && committed_count > 0 {
            return Err(param("committed nodes present in symmetric mode"));
        }
        Ok(OpinionState {
            opinions,
            committed_count,
            mode,
        })
    }

    pub fn n(&self) -> usize {
        self.opinions.len()
    }

    /// Counts of `[A (susceptible), B, AB, committed]`.
    pub fn counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for &o in &self.opinions {
            c[o as usize] += 1;
        }
        c
    }
}

/// Committed node count for fraction `p`, rounding halves up.
pub fn committed_count(n: usize, p: f64) -> usize {
    (p * n as f64 + 0.5).floor() as usize
}

/// Initial opinions: independent fair coin per node (symmetric), or
/// `round(p n)` uniformly chosen committed nodes with everyone else `B`.
pub fn assign_opinions(
    net: &Network,
    committed_fraction: f64,
    mode: Mode,
    seed: u64,
) -> Result<OpinionState> {
    if !(0.0..1.0).contains(&committed_fraction) {
        return Err(param(format!(
            "committed fraction must lie in [0, 1), got {committed_fraction}"
        )));
    }
    let n = net.n();
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    match mode {
        Mode::Symmetric => {
            if committed_fraction != 0.0 {
                return Err(param("symmetric mode requires committed fraction 0"));
            }
            let opinions = (0..n)
                .map(|_| if rng.random_bool(0.5) { Opinion::A } else { Opinion::B })
                .collect();
            OpinionState::new(opinions, mode)
        }
        Mode::Committed => {
            let count = committed_count(n, committed_fraction);
            let mut opinions = vec![Opinion::B; n];
            for i in index::sample(&mut rng, n, count) {
                opinions[i] = Opinion::Committed;
            }
            OpinionState::new(opinions, mode)
        }
    }
}

/// Link-type counts of an opinion assignment, indexed by unordered pairs of
/// `[A, B, AB, C]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkCensus {
    counts: [[u64; 4]; 4],
    m: u64,
    mode: Mode,
}

impl LinkCensus {
    /// Number of links between opinions `x` and `y` (order irrelevant).
    pub fn count(&self, x: Opinion, y: Opinion) -> u64 {
        let (a, b) = (x as usize, y as usize);
        self.counts[a.min(b)][a.max(b)]
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// Counts in the link order of the census mode, followed (committed
    /// mode only) by the committed-committed count.
    pub fn ordered_counts(&self) -> Vec<u64> {
        use Opinion::*;
        let pairs: &[(Opinion, Opinion)] = match self.mode {
            Mode::Symmetric => &[(A, A), (A, B), (A, AB), (B, B), (B, AB), (AB, AB)],
            Mode::Committed => &[
                (A, Committed),
                (B, Committed),
                (AB, Committed),
                (A, A),
                (A, B),
                (A, AB),
                (B, B),
                (B, AB),
                (AB, AB),
                (Committed, Committed),
            ],
        };
        pairs.iter().map(|&(x, y)| self.count(x, y)).collect()
    }

    /// Link fractions `L / M`.
    pub fn fractions(&self) -> LinkState<f64> {
        let m = self.m as f64;
        let f: Vec<f64> = self.ordered_counts().iter().map(|&c| c as f64 / m).collect();
        match self.mode {
            Mode::Symmetric => LinkState::Six(LinkState6::new(std::array::from_fn(|i| f[i]))),
            Mode::Committed => LinkState::Nine(LinkState9::new(std::array::from_fn(|i| f[i]), f[9])),
        }
    }
}

pub fn link_census(net: &Network, st: &OpinionState) -> Result<LinkCensus> {
    if net.n() != st.n() {
        return Err(param(format!(
            "network has {} nodes but opinion state has {}",
            net.n(),
            st.n()
        )));
    }
    if net.m() == 0 {
        return Err(Error::DegenerateNetwork("network has no edges".into()));
    }
    let mut counts = [[0u64; 4]; 4];
    for (i, j) in net.edges() {
        let (a, b) = (st.opinions[i] as usize, st.opinions[j] as usize);
        counts[a.min(b)][a.max(b)] += 1;
    }
    Ok(LinkCensus {
        counts,
        m: net.m() as u64,
        mode: st.mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Network {
        Network::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn two_nodes_at_full_probability_are_linked() {
        for seed in 0..5 {
            let net = generate_er(2, 1.0, seed).unwrap();
            assert_eq!(net.m(), 1);
            assert_eq!(net.neighbors(0), &[1]);
        }
    }

    #[test]
    fn er_parameter_errors() {
        assert!(generate_er(500, 500.0, 1).is_err());
        assert!(generate_er(1, 0.5, 1).is_err());
        assert!(generate_er(10, 0.0, 1).is_err());
        assert!(generate_er(10, f64::NAN, 1).is_err());
    }

    #[test]
    fn er_is_deterministic_and_simple() {
        let a = generate_er(300, 6.0, 9).unwrap();
        let b = generate_er(300, 6.0, 9).unwrap();
        assert_eq!(a, b);
        for i in 0..a.n() {
            let nb = a.neighbors(i);
            assert!(!nb.contains(&i));
            assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for &j in nb {
                assert!(a.neighbors(j).contains(&i));
            }
        }
        let total: usize = (0..a.n()).map(|i| a.degree(i)).sum();
        assert_eq!(total, 2 * a.m());
    }

    #[test]
    fn er_mean_degree_over_seeds() {
        let mean: f64 = (0..100)
            .map(|s| generate_er(500, 5.0, s).unwrap().mean_degree())
            .sum::<f64>()
            / 100.0;
        assert!((mean - 5.0).abs() < 0.25, "mean degree {mean}");
    }

    #[test]
    fn committed_rounding() {
        let net = generate_er(100, 4.0, 3).unwrap();
        let st = assign_opinions(&net, 0.10, Mode::Committed, 1).unwrap();
        assert_eq!(st.counts(), [0, 90, 0, 10]);
        assert_eq!(st.committed_count, 10);
        let st = assign_opinions(&net, 0.005, Mode::Committed, 1).unwrap();
        assert_eq!(st.committed_count, 1);
        assert_eq!(committed_count(1000, 0.0825), 83);
    }

    #[test]
    fn symmetric_mode_rejects_committed_fraction() {
        let net = triangle();
        assert!(assign_opinions(&net, 0.1, Mode::Symmetric, 0).is_err());
        assert!(assign_opinions(&net, 1.0, Mode::Committed, 0).is_err());
    }

    #[test]
    fn symmetric_assignment_is_balanced() {
        let net = generate_er(2000, 3.0, 1).unwrap();
        let st = assign_opinions(&net, 0.0, Mode::Symmetric, 5).unwrap();
        let frac = st.counts()[0] as f64 / 2000.0;
        assert!((frac - 0.5).abs() < 3.0 / (2.0 * (2000f64).sqrt()), "{frac}");
    }

    #[test]
    fn census_triangle_and_path() {
        use Opinion::*;
        let st = OpinionState::new(vec![A, A, B], Mode::Symmetric).unwrap();
        let LinkState::Six(l) = link_census(&triangle(), &st).unwrap().fractions() else {
            unreachable!()
        };
        assert_eq!(l.l, [1.0 / 3.0, 2.0 / 3.0, 0.0, 0.0, 0.0, 0.0]);

        let path = Network::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let st = OpinionState::new(vec![A, AB, B], Mode::Symmetric).unwrap();
        let LinkState::Six(l) = link_census(&path, &st).unwrap().fractions() else {
            unreachable!()
        };
        assert_eq!(l.l, [0.0, 0.0, 0.5, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn census_of_empty_network_is_degenerate() {
        let net = Network::from_edges(3, &[]).unwrap();
        let st = OpinionState::new(vec![Opinion::A; 3], Mode::Symmetric).unwrap();
        assert!(matches!(link_census(&net, &st), Err(Error::DegenerateNetwork(_))));
    }

    #[test]
    fn committed_census_tracks_cc_separately() {
        use Opinion::*;
        let net = Network::complete(4);
        let st = OpinionState::new(vec![Committed, Committed, B, B], Mode::Committed).unwrap();
        let c = link_census(&net, &st).unwrap();
        assert_eq!(c.ordered_counts(), vec![0, 4, 0, 0, 0, 0, 1, 0, 0, 1]);
        let LinkState::Nine(s) = c.fractions() else { unreachable!() };
        assert!((s.sum() + s.l_cc - 1.0).abs() < 1e-15);
        assert!((s.committed_fraction() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn edge_list_round_trip_keeps_isolated_tail() {
        let net = Network::from_edges(6, &[(0, 3), (1, 2), (0, 1)]).unwrap();
        let mut buf = Vec::new();
        net.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "# n 6\n0 1\n0 3\n1 2\n");
        assert_eq!(Network::read_edge_list(&buf[..]).unwrap(), net);
        assert!(Network::read_edge_list("0 1 2\n".as_bytes()).is_err());
    }

    #[test]
    fn mirrored_opinions() {
        assert_eq!(Opinion::A.mirrored(), Some(Opinion::B));
        assert_eq!(Opinion::AB.mirrored(), Some(Opinion::AB));
        assert_eq!(Opinion::Committed.mirrored(), None);
        assert!(Opinion::Committed.knows(Word::A) && !Opinion::Committed.knows(Word::B));
    }
}
