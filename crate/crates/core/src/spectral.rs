//! Eigenvalues of dense nonsymmetric real matrices and the convergence-rate
//! quantities derived from them.
//!
//! The solver balances the matrix, reduces it to upper Hessenberg form with
//! Householder reflections and runs the Francis double-shift QR iteration.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;

/// Eigenvalues with magnitude at or below this count as zero.
pub const ZERO_EIG_TOL: f64 = 1e-8;

/// Eigenvalues sorted ascending by real part, ties by imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }
}

/// All eigenvalues of a square real matrix.
pub fn eigenvalues(m: &RealMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    balance(&mut a);
    hessenberg(&mut a);
    let mut eigenvalues = hqr(&mut a)?;
    eigenvalues.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(Spectrum { eigenvalues })
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable.
fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = a.len();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for v in a[i].iter_mut() {
                    *v *= g;
                }
                for row in a.iter_mut() {
                    row[i] *= f;
                }
            }
        }
    }
}

/// Orthogonal reduction to upper Hessenberg form.
fn hessenberg(a: &mut [Vec<f64>]) {
    let n = a.len();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| a[i][m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        for i in (m..=high).rev() {
            ort[i] = a[i][m - 1] / scale;
            h += ort[i] * ort[i];
        }
        let mut g = h.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        h -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let f = (m..=high).rev().map(|i| ort[i] * a[i][j]).sum::<f64>() / h;
            for i in m..=high {
                a[i][j] -= f * ort[i];
            }
        }
        for row in a.iter_mut() {
            let f = (m..=high).rev().map(|j| ort[j] * row[j]).sum::<f64>() / h;
            for j in m..=high {
                row[j] -= f * ort[j];
            }
        }
        a[m][m - 1] = scale * g;
        for row in a.iter_mut().skip(m + 1) {
            row[m - 1] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
fn hqr(h: &mut [Vec<f64>]) -> Result<Vec<Complex64>> {
    let n = h.len();
    let max_sweeps = 100 * n.max(1);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(out);
    }
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h[i][j].abs();
        }
    }
    let mut sweeps = 0usize;
    // Active window is rows/cols 0..=nn; `shift` accumulates exceptional shifts.
    let mut nn = n as isize - 1;
    let mut shift = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // Look for a negligible subdiagonal element.
            let mut l = nu;
            while l >= 1 {
                let mut s = h[l - 1][l - 1].abs() + h[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if h[l][l - 1].abs() <= f64::EPSILON * s {
                    h[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = h[nu][nu];
            if l == nu {
                out[nu] = Complex64::new(x + shift, 0.0);
                nn -= 1;
                break;
            }
            let y = h[nu - 1][nu - 1];
            let mut w = h[nu][nu - 1] * h[nu - 1][nu];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += shift;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    out[nu - 1] = Complex64::new(x + z, 0.0);
                    out[nu] = if z != 0.0 {
                        Complex64::new(x - w / z, 0.0)
                    } else {
                        Complex64::new(x + z, 0.0)
                    };
                } else {
                    out[nu - 1] = Complex64::new(x + p, -z);
                    out[nu] = Complex64::new(x + p, z);
                }
                nn -= 2;
                break;
            }
            sweeps += 1;
            if its >= 60 || sweeps > max_sweeps {
                return Err(Error::NoConvergence(sweeps));
            }
            let mut y = y;
            if its > 0 && its % 10 == 0 {
                // Exceptional shift.
                shift += x;
                for (i, row) in h.iter_mut().enumerate().take(nu + 1) {
                    row[i] -= x;
                }
                let s = h[nu][nu - 1].abs() + h[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            // Find two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = h[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[m + 1][m] + h[m][m + 1];
                q = h[m + 1][m + 1] - z - rr - ss;
                r = h[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (h[m - 1][m - 1].abs() + z.abs() + h[m + 1][m + 1].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nu {
                h[i][i - 2] = 0.0;
                if i != m + 2 {
                    h[i][i - 3] = 0.0;
                }
            }
            // Double QR step on rows l..=nu and columns m..=nu.
            let mut k = m;
            while k < nu {
                let mut xx = 0.0;
                if k != m {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if k != nu - 1 { h[k + 2][k - 1] } else { 0.0 };
                    xx = p.abs() + q.abs() + r.abs();
                    if xx != 0.0 {
                        p /= xx;
                        q /= xx;
                        r /= xx;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            h[k][k - 1] = -h[k][k - 1];
                        }
                    } else {
                        h[k][k - 1] = -s * xx;
                    }
                    p += s;
                    let xk = p / s;
                    let yk = q / s;
                    let zk = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = h[k][j] + q * h[k + 1][j];
                        if k != nu - 1 {
                            pp += r * h[k + 2][j];
                            h[k + 2][j] -= pp * zk;
                        }
                        h[k + 1][j] -= pp * yk;
                        h[k][j] -= pp * xk;
                    }
                    let mmin = nu.min(k + 3);
                    for row in h.iter_mut().take(mmin + 1).skip(l) {
                        let mut pp = xk * row[k] + yk * row[k + 1];
                        if k != nu - 1 {
                            pp += zk * row[k + 2];
                            row[k + 2] -= pp * r;
                        }
                        row[k + 1] -= pp * q;
                        row[k] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(out)
}

/// True iff exactly one eigenvalue is zero (within [`ZERO_EIG_TOL`]) and all
/// others have real part above the tolerance.
pub fn has_simple_zero(m: &RealMatrix) -> Result<bool> {
    let spec = eigenvalues(m)?;
    let zeros = spec
        .eigenvalues()
        .iter()
        .filter(|z| z.norm() <= ZERO_EIG_TOL)
        .count();
    let rest_positive = spec
        .eigenvalues()
        .iter()
        .filter(|z| z.norm() > ZERO_EIG_TOL)
        .all(|z| z.re > ZERO_EIG_TOL);
    Ok(zeros == 1 && rest_positive)
}

/// Real part of the eigenvalue with the second-smallest real part.
pub fn lambda2r(m: &RealMatrix) -> Result<f64> {
    let spec = eigenvalues(m)?;
    let ev = spec.eigenvalues();
    if ev.len() < 2 {
        return Err(Error::NotSimpleZero(format!(
            "need at least two eigenvalues, got {}",
            ev.len()
        )));
    }
    if ev[0].norm() > ZERO_EIG_TOL {
        return Err(Error::NotSimpleZero(format!(
            "smallest eigenvalue {} is not zero",
            ev[0]
        )));
    }
    if ev[1].re <= ZERO_EIG_TOL {
        return Err(Error::NotSimpleZero(format!(
            "second eigenvalue {} is not in the right half plane",
            ev[1]
        )));
    }
    Ok(ev[1].re)
}

/// `K L` for a positive diagonal gain vector `K`.
pub fn gain_scaled(gains: &[f64], laplacian: &RealMatrix) -> RealMatrix {
    laplacian.scale_rows(gains)
}

/// `exp(-λ₂ᵣ t)`.
pub fn theory_rate(lambda2r: f64, t: f64) -> f64 {
    (-lambda2r * t).exp()
}

/// Upper bound `(n0 - 1 + n0 t^(n0-1) / (n0-1)!) exp(-λ_r t)` on the largest
/// singular value of `exp(-J t)` for an `n0`-dimensional Jordan block with
/// eigenvalue real part `λ_r`.
pub fn jordan_exp_bound(lambda_r: f64, n0: usize, t: f64) -> f64 {
    assert!(n0 >= 1, "block size must be positive");
    let k = n0 - 1;
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let poly = k as f64 + n0 as f64 * t.powi(k as i32) / factorial;
    poly * (-lambda_r * t).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn assert_spectrum(m: &RealMatrix, mut expected: Vec<Complex64>, tol: f64) {
        expected.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        let got = eigenvalues(m).unwrap();
        assert_eq!(got.len(), expected.len());
        for (g, e) in got.eigenvalues().iter().zip(&expected) {
            assert!((g - e).norm() <= tol, "got {g}, expected {e}");
        }
    }

    #[test]
    fn small_cases() {
        assert!(eigenvalues(&RealMatrix::zeros(0, 0)).unwrap().is_empty());
        assert_spectrum(
            &RealMatrix::from_rows(&[vec![3.0]]),
            vec![Complex64::new(3.0, 0.0)],
            0.0,
        );
        // Rotation generator: ±i.
        assert_spectrum(
            &RealMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]),
            vec![Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)],
            1e-15,
        );
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(
            eigenvalues(&RealMatrix::zeros(2, 3)),
            Err(Error::NonSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn directed_circulant() {
        let n = 5;
        let mut m = RealMatrix::identity(n);
        for i in 0..n {
            m[(i, (i + 1) % n)] = -1.0;
        }
        let expected = (0..n)
            .map(|k| Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
            .collect();
        assert_spectrum(&m, expected, 1e-12);
    }

    #[test]
    fn triangular_is_its_diagonal() {
        let m = RealMatrix::from_rows(&[
            vec![2.0, -1.0, -1.0, 0.0],
            vec![0.0, 1.0, 0.0, -1.0],
            vec![0.0, 0.0, 1.0, -1.0],
            vec![0.0, 0.0, 0.0, 0.0],
        ]);
        let expected = [0.0, 1.0, 1.0, 2.0].map(|v| Complex64::new(v, 0.0)).to_vec();
        assert_spectrum(&m, expected, 0.0);
    }

    #[test]
    fn lambda2r_errors() {
        let two_blocks = RealMatrix::from_rows(&[
            vec![1.0, -1.0, 0.0, 0.0],
            vec![-1.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, -1.0],
            vec![0.0, 0.0, -1.0, 1.0],
        ]);
        assert!(matches!(lambda2r(&two_blocks), Err(Error::NotSimpleZero(_))));
        assert!(matches!(
            lambda2r(&RealMatrix::identity(3)),
            Err(Error::NotSimpleZero(_))
        ));
    }

    #[test]
    fn rate_and_bound_basics() {
        assert_eq!(theory_rate(0.7, 0.0), 1.0);
        assert!((jordan_exp_bound(0.3, 1, 4.0) - (-1.2f64).exp()).abs() < 1e-15);
        assert_eq!(jordan_exp_bound(0.3, 3, 0.0), 2.0);
    }
}
