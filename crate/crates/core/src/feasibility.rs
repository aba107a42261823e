//! Nearest feasible configuration for a (possibly noisy) relative scheme.
//!
//! Minimises `‖L̂ x̂‖` with the gauge `x̂_1 = 1` by two quaternion linear
//! least-squares solves (standard part, then dual part) and projects the
//! result onto the unit dual quaternions.

use std::fmt::Write as _;

use crate::dq::{norm_2r, project_udq, DualQuaternion, Quaternion, UnitDualQuaternion};
use crate::error::{Error, Result};
use crate::format_float;
use crate::graph::DiGraph;
use crate::udqdg::{relative_scheme, DqMatrix, Formation, Scheme};

/// Relative pivot size below which a column is considered dependent.
pub const RANK_TOL: f64 = 1e-12;

/// Dense `rows × cols` quaternion matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct QuatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QuatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Quaternion) -> Self {
        let data = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| f(i, j))
            .collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        self.data[i * self.cols + j]
    }

    pub fn mul_vec(&self, x: &[Quaternion]) -> Vec<Quaternion> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Quaternion::ZERO, |acc, j| acc + self.get(i, j) * x[j])
            })
            .collect()
    }

    /// Real `4 rows × 4 cols` matrix of left-multiplication blocks, row-major.
    pub fn real_embedding(&self) -> Vec<Vec<f64>> {
        let mut e = vec![vec![0.0; 4 * self.cols]; 4 * self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let block = self.get(i, j).left_matrix();
                for (r, brow) in block.iter().enumerate() {
                    e[4 * i + r][4 * j..4 * j + 4].copy_from_slice(brow);
                }
            }
        }
        e
    }
}

/// `min_x ‖A x + b‖²` over quaternion vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct QuatLsProblem {
    pub a: QuatMatrix,
    pub b: Vec<Quaternion>,
}

/// Solves a quaternion least-squares problem through its real embedding
/// with a Householder QR factorisation.
pub fn quat_lstsq(p: &QuatLsProblem) -> Result<Vec<Quaternion>> {
    if p.b.len() != p.a.rows() {
        return Err(Error::SizeMismatch {
            expected: p.a.rows(),
            got: p.b.len(),
        });
    }
    let mut e = p.a.real_embedding();
    let mut rhs: Vec<f64> = p.b.iter().flat_map(|q| q.to_array()).map(|v| -v).collect();
    let sol = householder_lstsq(&mut e, &mut rhs).map_err(|col| Error::RankDeficient(col / 4))?;
    Ok(sol
        .chunks_exact(4)
        .map(|c| Quaternion::new(c[0], c[1], c[2], c[3]))
        .collect())
}

/// Least squares `min ‖A x - y‖` by Householder QR. Overwrites both inputs.
/// On a (numerically) dependent column returns its index.
fn householder_lstsq(a: &mut [Vec<f64>], y: &mut [f64]) -> std::result::Result<Vec<f64>, usize> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    if m < n {
        return Err(m);
    }
    let col_scale = (0..n)
        .map(|j| (0..m).map(|i| a[i][j] * a[i][j]).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let mut diag = vec![0.0; n];
    for k in 0..n {
        let norm = (k..m).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm <= RANK_TOL * col_scale.max(f64::MIN_POSITIVE) {
            return Err(k);
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored in place.
        a[k][k] -= alpha;
        let vnorm_sq: f64 = (k..m).map(|i| a[i][k] * a[i][k]).sum();
        for j in k + 1..n {
            let s = (k..m).map(|i| a[i][k] * a[i][j]).sum::<f64>() * 2.0 / vnorm_sq;
            for i in k..m {
                a[i][j] -= s * a[i][k];
            }
        }
        let s = (k..m).map(|i| a[i][k] * y[i]).sum::<f64>() * 2.0 / vnorm_sq;
        for i in k..m {
            y[i] -= s * a[i][k];
        }
        diag[k] = alpha;
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (y[k] - s) / diag[k];
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairResult {
    /// The gauge-fixed least-squares vector `x̂`.
    pub unprojected: Vec<DualQuaternion>,
    /// The least-squares vector `x̂` projected entrywise onto the unit manifold.
    pub configuration: Vec<UnitDualQuaternion>,
    /// `‖L̂ x̂‖` before projection.
    pub residual: f64,
    /// `‖L̂ x̂‖` after projection.
    pub residual_after: f64,
}

impl RepairResult {
    /// The formation whose conjugate is the recovered configuration.
    pub fn formation(&self) -> Formation {
        Formation::new(self.configuration.iter().map(|q| q.conj()).collect())
    }

    /// Reasonable scheme on `graph` rebuilt from the repaired formation.
    pub fn repaired_scheme(&self, graph: &DiGraph) -> Result<Scheme> {
        relative_scheme(&self.formation(), graph)
    }

    /// Formation text of the configuration followed by a residual line.
    pub fn to_text(&self) -> String {
        let mut s = Formation::new(self.configuration.clone()).to_text();
        writeln!(
            s,
            "# residual {} residual_after {}",
            format_float(self.residual),
            format_float(self.residual_after)
        )
        .unwrap();
        s
    }
}

/// Gauge-fixed (`x̂_1 = 1`) least-squares null vector of `L̂`, projected.
pub fn nearest_feasible(l: &DqMatrix) -> Result<RepairResult> {
    let n = l.n();
    if n == 0 {
        return Err(Error::TooSmall {
            what: "laplacian size",
            got: 0,
            min: 1,
        });
    }
    let mut xs = vec![Quaternion::ONE];
    let mut xd = vec![Quaternion::ZERO];
    if n > 1 {
        let l2s = QuatMatrix::from_fn(n, n - 1, |i, j| l.get(i, j + 1).std);
        let l1s: Vec<Quaternion> = (0..n).map(|i| l.get(i, 0).std).collect();
        xs.extend(quat_lstsq(&QuatLsProblem {
            a: l2s.clone(),
            b: l1s,
        })?);
        let ld = QuatMatrix::from_fn(n, n, |i, j| l.get(i, j).dual);
        xd.extend(quat_lstsq(&QuatLsProblem {
            a: l2s,
            b: ld.mul_vec(&xs),
        })?);
    }
    let x: Vec<DualQuaternion> = xs
        .into_iter()
        .zip(xd)
        .map(|(s, d)| DualQuaternion::new(s, d))
        .collect();
    let residual = norm_2r(&l.mul_vec(&x)?);
    let configuration: Vec<UnitDualQuaternion> = x.iter().map(|&q| project_udq(q)).collect();
    let residual_after = norm_2r(&l.mul_unit_vec(&configuration)?);
    Ok(RepairResult {
        unprojected: x,
        configuration,
        residual,
        residual_after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dq::{dist_2r, random_udq};
    use crate::graph::{gen_cycle, gen_grid, Topology};
    use crate::udqdg::{build_dq_laplacian, desired_formation};

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn consistent_system_is_solved_exactly() {
        let a = QuatMatrix::from_fn(3, 2, |i, j| q(1.0 + i as f64, j as f64 - 0.5, 0.3 * (i * j) as f64, -0.2));
        let x0 = vec![q(0.5, -1.0, 2.0, 0.1), q(-0.3, 0.2, 0.0, 1.5)];
        let b: Vec<Quaternion> = a.mul_vec(&x0).into_iter().map(|v| -v).collect();
        let x = quat_lstsq(&QuatLsProblem { a, b }).unwrap();
        for (xi, x0i) in x.iter().zip(&x0) {
            assert!((*xi - *x0i).norm() < 1e-10);
        }
    }

    #[test]
    fn rank_deficient_system() {
        let a = QuatMatrix::from_fn(3, 2, |i, _| q(1.0, i as f64, 0.0, 0.0));
        let b = vec![Quaternion::ONE; 3];
        assert!(matches!(quat_lstsq(&QuatLsProblem { a, b }), Err(Error::RankDeficient(1))));
    }

    #[test]
    fn noise_free_recovery_matches_gauge() {
        let f = desired_formation(Topology::Cycle, 5).unwrap();
        let l = build_dq_laplacian(&relative_scheme(&f, &gen_cycle(5, true).unwrap()).unwrap());
        let r = nearest_feasible(&l).unwrap();
        assert!(r.residual <= 1e-10, "{}", r.residual);
        let expected = f.aligned(f.poses()[0]);
        assert!(dist_2r(&r.configuration, &expected) < 1e-9);
    }

    #[test]
    fn single_arc_graph() {
        let g = DiGraph::new(2, vec![(1, 2)]).unwrap();
        let f = Formation::new(vec![random_udq(1), random_udq(2)]);
        let l = build_dq_laplacian(&relative_scheme(&f, &g).unwrap());
        let r = nearest_feasible(&l).unwrap();
        assert!(r.residual < 1e-14);
        assert!(r.residual_after < 1e-14);
    }

    #[test]
    fn disconnected_graph_is_rank_deficient() {
        let g = DiGraph::new(6, vec![(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (6, 4)]).unwrap();
        let f = Formation::new((0..6).map(random_udq).collect());
        let l = build_dq_laplacian(&relative_scheme(&f, &g).unwrap());
        assert!(matches!(nearest_feasible(&l), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn repaired_scheme_reproduces_noise_free_scheme() {
        let g = gen_grid(3, true).unwrap();
        let f = desired_formation(Topology::Grid, 9).unwrap();
        let s = relative_scheme(&f, &g).unwrap();
        let r = nearest_feasible(&build_dq_laplacian(&s)).unwrap();
        let rs = r.repaired_scheme(&g).unwrap();
        for (a, b) in rs.weights().iter().zip(s.weights()) {
            assert!((a.value() - b.value()).norm_2r_sq().sqrt() < 1e-9);
        }
        let text = r.to_text();
        assert_eq!(text.lines().count(), 10);
        assert!(text.lines().last().unwrap().starts_with("# residual "));
    }
}
