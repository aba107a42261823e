//! Unit-dual-quaternion weighted digraphs: desired formations, relative
//! configuration schemes, the dual quaternion Laplacian and the noise model.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dq::{make_pose, norm_2r, DualQuaternion, Quaternion, UnitDualQuaternion};
use crate::error::{Error, Result};
use crate::format_float;
use crate::graph::{DiGraph, Topology};

/// Desired absolute pose of every agent.
#[derive(Debug, Clone, PartialEq)]
pub struct Formation {
    poses: Vec<UnitDualQuaternion>,
}

impl Formation {
    pub fn new(poses: Vec<UnitDualQuaternion>) -> Self {
        Self { poses }
    }

    pub fn poses(&self) -> &[UnitDualQuaternion] {
        &self.poses
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    /// Entrywise conjugate, the null vector of a reasonable Laplacian.
    pub fn conj(&self) -> Vec<UnitDualQuaternion> {
        self.poses.iter().map(|q| q.conj()).collect()
    }

    /// `conj(q_d) c` entrywise.
    pub fn aligned(&self, c: UnitDualQuaternion) -> Vec<UnitDualQuaternion> {
        self.poses.iter().map(|q| q.conj() * c).collect()
    }

    /// One pose per line, eight floats (standard then dual part).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for q in &self.poses {
            let fields: Vec<String> = q.value().to_array().iter().map(|&v| format_float(v)).collect();
            writeln!(s, "{}", fields.join(" ")).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut poses = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals = parse_floats(line, i + 1)?;
            if vals.len() != 8 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected 8 floats, got {}", vals.len()),
                });
            }
            let q = DualQuaternion::from_array(vals.try_into().unwrap());
            poses.push(UnitDualQuaternion::new(q)?);
        }
        Ok(Self { poses })
    }
}

fn parse_floats(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<f64>().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("{t:?}: {e}"),
            })
        })
        .collect()
}

/// Desired formation for `n` agents on the given topology.
///
/// Agent `i` gets attitude `[cos(θ/2), sin(θ/2) v]` with `θ = 2π(i-1)/n` and
/// axis `v = (cos θ, sin θ, 0)`. Positions: cycles on a radius-2 circle;
/// star cores on a radius-1 circle with branches on a radius-2 circle at the
/// bisecting angles; grids on the unit lattice. All in the `z = 0` plane.
pub fn desired_formation(kind: Topology, n: usize) -> Result<Formation> {
    let positions = formation_positions(kind, n)?;
    let poses = positions
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let theta = 2.0 * PI * i as f64 / n as f64;
            let (s, c) = (0.5 * theta).sin_cos();
            let attitude = Quaternion::new(c, s * theta.cos(), s * theta.sin(), 0.0);
            make_pose(attitude, p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Formation { poses })
}

fn formation_positions(kind: Topology, n: usize) -> Result<Vec<[f64; 3]>> {
    let on_circle = |r: f64, angle: f64| [r * angle.cos(), r * angle.sin(), 0.0];
    match kind {
        Topology::Cycle => {
            if n < 3 {
                return Err(Error::SizeMismatch { expected: 3, got: n });
            }
            Ok((0..n)
                .map(|i| on_circle(2.0, 2.0 * PI * i as f64 / n as f64))
                .collect())
        }
        Topology::Star => {
            if n < 6 || !n.is_multiple_of(2) {
                return Err(Error::SizeMismatch {
                    expected: 2 * (n / 2).max(3),
                    got: n,
                });
            }
            let n0 = n / 2;
            let core = (0..n0).map(|i| on_circle(1.0, 2.0 * PI * i as f64 / n0 as f64));
            let branches =
                (0..n0).map(|i| on_circle(2.0, 2.0 * PI * (i as f64 + 0.5) / n0 as f64));
            Ok(core.chain(branches).collect())
        }
        Topology::Grid => {
            let side = (n as f64).sqrt().round() as usize;
            if side < 2 || side * side != n {
                return Err(Error::SizeMismatch {
                    expected: side.max(2).pow(2),
                    got: n,
                });
            }
            Ok((0..n)
                .map(|v| [(v % side) as f64, (v / side) as f64, 0.0])
                .collect())
        }
    }
}

/// A digraph with one unit dual quaternion weight per arc.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    graph: DiGraph,
    weights: Vec<UnitDualQuaternion>,
}

impl Scheme {
    /// `weights[k]` belongs to `graph.arcs()[k]`.
    pub fn new(graph: DiGraph, weights: Vec<UnitDualQuaternion>) -> Result<Self> {
        if weights.len() != graph.arcs().len() {
            return Err(Error::SizeMismatch {
                expected: graph.arcs().len(),
                got: weights.len(),
            });
        }
        Ok(Self { graph, weights })
    }

    pub fn graph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn weights(&self) -> &[UnitDualQuaternion] {
        &self.weights
    }

    pub fn weight(&self, tail: usize, head: usize) -> Option<UnitDualQuaternion> {
        self.graph
            .arcs()
            .iter()
            .position(|&a| a == (tail, head))
            .map(|k| self.weights[k])
    }

    pub fn arcs_with_weights(&self) -> impl Iterator<Item = ((usize, usize), UnitDualQuaternion)> + '_ {
        self.graph.arcs().iter().copied().zip(self.weights.iter().copied())
    }

    /// Header `n <count>`, then `tail head` followed by eight weight floats.
    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.n());
        for ((t, h), w) in self.arcs_with_weights() {
            let fields: Vec<String> = w.value().to_array().iter().map(|&v| format_float(v)).collect();
            writeln!(s, "{t} {h} {}", fields.join(" ")).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let n = header
            .strip_prefix("n ")
            .and_then(|c| c.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse {
                line: hl,
                msg: format!("expected \"n <count>\", got {header:?}"),
            })?;
        let mut arcs = Vec::new();
        let mut weights = Vec::new();
        for (line, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 10 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected 10 fields, got {}", toks.len()),
                });
            }
            let id = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line,
                    msg: e.to_string(),
                })
            };
            arcs.push((id(toks[0])?, id(toks[1])?));
            let vals = parse_floats(&toks[2..].join(" "), line)?;
            weights.push(UnitDualQuaternion::new(DualQuaternion::from_array(
                vals.try_into().unwrap(),
            ))?);
        }
        Self::new(DiGraph::new(n, arcs)?, weights)
    }
}

/// Relative scheme `w(i, j) = q_i* q_j` induced by a formation.
pub fn relative_scheme(f: &Formation, g: &DiGraph) -> Result<Scheme> {
    if f.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            got: f.len(),
        });
    }
    let q = f.poses();
    let weights = g
        .arcs()
        .iter()
        .map(|&(i, j)| q[i - 1].conj() * q[j - 1])
        .collect();
    Scheme::new(g.clone(), weights)
}

/// Dense `n × n` matrix of dual quaternions.
#[derive(Debug, Clone, PartialEq)]
pub struct DqMatrix {
    n: usize,
    data: Vec<DualQuaternion>,
}

impl DqMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![DualQuaternion::ZERO; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> DualQuaternion {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: DualQuaternion) {
        self.data[i * self.n + j] = v;
    }

    /// `y_i = Σ_j M_ij x_j`, entries multiplied on the left.
    pub fn mul_vec(&self, x: &[DualQuaternion]) -> Result<Vec<DualQuaternion>> {
        if x.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| {
                let row = &self.data[i * self.n..(i + 1) * self.n];
                let mut acc = DualQuaternion::ZERO;
                for (m, xj) in row.iter().zip(x) {
                    if *m != DualQuaternion::ZERO {
                        acc += *m * *xj;
                    }
                }
                acc
            })
            .collect())
    }

    pub fn mul_unit_vec(&self, x: &[UnitDualQuaternion]) -> Result<Vec<DualQuaternion>> {
        let v: Vec<DualQuaternion> = x.iter().map(|q| q.value()).collect();
        self.mul_vec(&v)
    }

    pub fn from_real(m: &crate::matrix::RealMatrix) -> Self {
        assert!(m.is_square());
        let n = m.rows();
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, DualQuaternion::from_real(m[(i, j)]));
            }
        }
        out
    }
}

/// `L̂ = D - Â` with out-degree diagonal and the arc weights off the diagonal.
pub fn build_dq_laplacian(s: &Scheme) -> DqMatrix {
    let n = s.n();
    let mut l = DqMatrix::zeros(n);
    for ((i, j), w) in s.arcs_with_weights() {
        let (i, j) = (i - 1, j - 1);
        l.set(i, j, -w.value());
        l.set(i, i, l.get(i, i) + DualQuaternion::ONE);
    }
    l
}

/// Outcome of checking a Laplacian against a formation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reasonableness {
    /// `‖L̂ conj(q_d)‖` in the 2^R norm.
    pub residual: f64,
    /// Largest entrywise deviation of `L̂` from `Q̂* L Q̂`.
    pub factorization_error: f64,
}

impl Reasonableness {
    pub const FACTORIZATION_TOL: f64 = 1e-10;

    pub fn factorization_holds(&self) -> bool {
        self.factorization_error <= Self::FACTORIZATION_TOL
    }
}

/// Residual `‖L̂ conj(f)‖` plus an entrywise check of `L̂ = Q̂* L Q̂` with
/// `Q̂ = diag(f)` and `L` the sparsity pattern of `L̂` read as a real Laplacian.
pub fn verify_reasonable(l: &DqMatrix, f: &Formation) -> Result<Reasonableness> {
    if l.n() != f.len() {
        return Err(Error::SizeMismatch {
            expected: l.n(),
            got: f.len(),
        });
    }
    let residual = norm_2r(&l.mul_unit_vec(&f.conj())?);
    let q = f.poses();
    let mut factorization_error: f64 = 0.0;
    for i in 0..l.n() {
        for j in 0..l.n() {
            let lij = l.get(i, j);
            let real = if i == j {
                lij.std.w
            } else if lij == DualQuaternion::ZERO {
                0.0
            } else {
                -1.0
            };
            let expected = q[i].conj().value() * DualQuaternion::from_real(real) * q[j].value();
            factorization_error = factorization_error.max((lij - expected).norm_2r_sq().sqrt());
        }
    }
    Ok(Reasonableness {
        residual,
        factorization_error,
    })
}

/// Multiplicative measurement noise close to the identity.
///
/// Standard part from three angles uniform on `[0, σπ]`,
/// `cos θ1 + sin θ1 cos θ2 i + sin θ1 sin θ2 cos θ3 j + sin θ1 sin θ2 sin θ3 k`;
/// dual part `½ t p_s` with `t` a Gaussian 3-vector of standard deviation σ.
pub fn sample_noise<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> UnitDualQuaternion {
    let mut theta = [0.0; 3];
    for th in &mut theta {
        *th = sigma * PI * rng.random::<f64>();
    }
    let mut t = [0.0; 3];
    for ti in &mut t {
        *ti = sigma * rng.sample::<f64, _>(StandardNormal);
    }
    let (s1, c1) = theta[0].sin_cos();
    let (s2, c2) = theta[1].sin_cos();
    let (s3, c3) = theta[2].sin_cos();
    let ps = Quaternion::new(c1, s1 * c2, s1 * s2 * c3, s1 * s2 * s3);
    // |ps| = 1 up to rounding; renormalise so make_pose's check never trips.
    let ps = ps.scale(1.0 / ps.norm());
    make_pose(ps, t).expect("unit noise attitude")
}

/// Right-multiplies every weight by independent noise `p̂_ij`.
pub fn perturb_scheme(s: &Scheme, sigma: f64, seed: u64) -> Result<Scheme> {
    if !(sigma >= 0.0) {
        return Err(Error::NegativeSigma(sigma));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = s
        .weights()
        .iter()
        .map(|&w| w * sample_noise(sigma, &mut rng))
        .collect();
    Scheme::new(s.graph().clone(), weights)
}
