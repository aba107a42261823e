//! Directed graphs, the experiment topologies and the real Laplacian.
//!
//! Arc `(i, j)` means agent `i` senses agent `j`; node ids are 1-based.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::spectral;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl DiGraph {
    /// Rejects self-loops, duplicate arcs and ids outside `1..=n`.
    pub fn new(n: usize, arcs: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(arcs.len());
        for &(t, h) in &arcs {
            if t == 0 || h == 0 || t > n || h > n {
                return Err(Error::InvalidGraph(format!(
                    "arc ({t}, {h}) outside 1..={n}"
                )));
            }
            if t == h {
                return Err(Error::InvalidGraph(format!("self-loop at {t}")));
            }
            if !seen.insert((t, h)) {
                return Err(Error::InvalidGraph(format!("duplicate arc ({t}, {h})")));
            }
        }
        Ok(Self { n, arcs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn has_arc(&self, tail: usize, head: usize) -> bool {
        self.arcs.contains(&(tail, head))
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n];
        for &(t, _) in &self.arcs {
            d[t - 1] += 1;
        }
        d
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n];
        for &(_, h) in &self.arcs {
            d[h - 1] += 1;
        }
        d
    }

    /// The graph with every reversed arc appended (skipping ones already present).
    pub fn symmetrized(&self) -> Self {
        let mut arcs = self.arcs.clone();
        let present: HashSet<_> = self.arcs.iter().copied().collect();
        for &(t, h) in &self.arcs {
            if !present.contains(&(h, t)) {
                arcs.push((h, t));
            }
        }
        Self { n: self.n, arcs }
    }

    /// "n <count>" header followed by one "tail head" line per arc.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for (t, h) in &self.arcs {
            writeln!(s, "{t} {h}").unwrap();
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let n = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["n", count] => count.parse::<usize>().map_err(|e| Error::Parse {
                line: hl,
                msg: e.to_string(),
            })?,
            _ => {
                return Err(Error::Parse {
                    line: hl,
                    msg: format!("expected \"n <count>\", got {header:?}"),
                })
            }
        };
        let mut arcs = Vec::new();
        for (line, l) in lines {
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line,
                    msg: e.to_string(),
                })
            };
            match l.split_whitespace().collect::<Vec<_>>()[..] {
                [t, h] => arcs.push((parse(t)?, parse(h)?)),
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected \"tail head\", got {l:?}"),
                    })
                }
            }
        }
        Self::new(n, arcs)
    }
}

/// Directed `n`-cycle `(1,2),…,(n-1,n),(n,1)`.
pub fn gen_cycle(n: usize, directed: bool) -> Result<DiGraph> {
    if n < 3 {
        return Err(Error::TooSmall {
            what: "cycle length",
            got: n,
            min: 3,
        });
    }
    let arcs = (1..=n).map(|i| (i, i % n + 1)).collect();
    let g = DiGraph::new(n, arcs)?;
    Ok(if directed { g } else { g.symmetrized() })
}

/// Star on `2 n0` nodes: a directed core cycle on `1..=n0`, and branch node
/// `n0 + i` sensing core nodes `i` and `i + 1` (wrapping to 1).
pub fn gen_star(n0: usize, directed: bool) -> Result<DiGraph> {
    if n0 < 3 {
        return Err(Error::TooSmall {
            what: "star core size",
            got: n0,
            min: 3,
        });
    }
    let mut arcs: Vec<_> = (1..=n0).map(|i| (i, i % n0 + 1)).collect();
    for i in 1..=n0 {
        arcs.push((n0 + i, i));
        arcs.push((n0 + i, i % n0 + 1));
    }
    let g = DiGraph::new(2 * n0, arcs)?;
    Ok(if directed { g } else { g.symmetrized() })
}

/// Row-major `n0 × n0` lattice with arcs to the right neighbour and to the
/// neighbour below. The directed variant is acyclic with its only sink at
/// node `n0²`.
pub fn gen_grid(n0: usize, directed: bool) -> Result<DiGraph> {
    if n0 < 2 {
        return Err(Error::TooSmall {
            what: "grid side",
            got: n0,
            min: 2,
        });
    }
    let mut arcs = Vec::with_capacity(2 * n0 * (n0 - 1));
    for r in 0..n0 {
        for c in 0..n0 {
            let v = r * n0 + c + 1;
            if c + 1 < n0 {
                arcs.push((v, v + 1));
            }
            if r + 1 < n0 {
                arcs.push((v, v + n0));
            }
        }
    }
    let g = DiGraph::new(n0 * n0, arcs)?;
    Ok(if directed { g } else { g.symmetrized() })
}

/// The three experiment topologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    Cycle,
    Star,
    Grid,
}

impl Topology {
    pub const ALL: [Topology; 3] = [Topology::Cycle, Topology::Star, Topology::Grid];

    pub fn name(self) -> &'static str {
        match self {
            Topology::Cycle => "cycle",
            Topology::Star => "star",
            Topology::Grid => "grid",
        }
    }

    /// Builds the topology with `n` total nodes. Stars need an even `n`,
    /// grids a perfect square.
    pub fn generate(self, n: usize, directed: bool) -> Result<DiGraph> {
        match self {
            Topology::Cycle => gen_cycle(n, directed),
            Topology::Star => {
                if !n.is_multiple_of(2) {
                    return Err(Error::InvalidConfig(format!(
                        "star needs an even node count, got {n}"
                    )));
                }
                gen_star(n / 2, directed)
            }
            Topology::Grid => {
                let side = (n as f64).sqrt().round() as usize;
                if side * side != n {
                    return Err(Error::InvalidConfig(format!(
                        "grid needs a square node count, got {n}"
                    )));
                }
                gen_grid(side, directed)
            }
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cycle" => Ok(Topology::Cycle),
            "star" => Ok(Topology::Star),
            "grid" => Ok(Topology::Grid),
            other => Err(Error::InvalidConfig(format!("unknown topology {other:?}"))),
        }
    }
}

/// `L = D - A` with out-degree diagonal.
pub fn underlying_laplacian(g: &DiGraph) -> RealMatrix {
    let n = g.n();
    let mut counts = vec![0i64; n * n];
    for &(t, h) in g.arcs() {
        counts[(t - 1) * n + (h - 1)] -= 1;
        counts[(t - 1) * n + (t - 1)] += 1;
    }
    let mut l = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            l[(i, j)] = counts[i * n + j] as f64;
        }
    }
    l
}

/// Whether some node can be reached from every node along arcs.
pub fn has_reachable_root(g: &DiGraph) -> bool {
    let n = g.n();
    if n == 0 {
        return false;
    }
    // Reverse adjacency: who points at v.
    let mut rev = vec![Vec::new(); n];
    for &(t, h) in g.arcs() {
        rev[h - 1].push(t - 1);
    }
    (0..n).any(|root| {
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &rev[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    })
}

/// True iff the Laplacian has a simple zero eigenvalue and every other
/// eigenvalue lies in the open right half plane, i.e. the graph has a
/// directed spanning tree.
pub fn has_simple_zero(g: &DiGraph) -> bool {
    let algebraic = spectral::has_simple_zero(&underlying_laplacian(g)).unwrap_or(false);
    debug_assert_eq!(
        algebraic,
        has_reachable_root(g),
        "spectral and reachability tests disagree"
    );
    algebraic
}
