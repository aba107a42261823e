//! Quaternion, dual-number and dual-quaternion arithmetic.
//!
//! Quaternions are stored scalar-first `(w, x, y, z)`. A dual quaternion is a
//! pair `(std, dual)` multiplied under `ε² = 0`; unit dual quaternions encode
//! rigid-body poses.

mod dual_number;
mod dual_quaternion;
mod pose;
mod quaternion;

pub use dual_number::DualNumber;
pub use dual_quaternion::{dq_mul, DualQuaternion, UnitDualQuaternion};
pub use pose::{make_pose, pose_parts, Pose};
pub use quaternion::{quat_mul, Quaternion};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Tolerance for unit-manifold membership checks.
pub const TAU_UNIT: f64 = 1e-9;

/// Magnitudes at or below this are treated as zero by [`project_udq`].
pub const PROJECTION_ZERO: f64 = TAU_UNIT * f64::EPSILON;

/// Dual-number 2-norm of a dual quaternion vector.
///
/// `‖x_d‖ ε` when the standard part vanishes, otherwise
/// `‖x_s‖ + (x_s* x_d + x_d* x_s) / ‖x_s‖ ε`. The numerator is a sum of
/// `conj(a) b + conj(b) a` terms and therefore real; its scalar part is used.
pub fn dq_vec_norm(v: &[DualQuaternion]) -> DualNumber {
    let std_sq: f64 = v.iter().map(|x| x.std.norm_sq()).sum();
    if std_sq == 0.0 {
        let dual_sq: f64 = v.iter().map(|x| x.dual.norm_sq()).sum();
        return DualNumber::new(0.0, dual_sq.sqrt());
    }
    let std_norm = std_sq.sqrt();
    let mut numerator = Quaternion::ZERO;
    for x in v {
        numerator += x.std.conj() * x.dual + x.dual.conj() * x.std;
    }
    debug_assert!(
        numerator.vector().iter().all(|c| c.abs() < 1e-10 * (1.0 + numerator.w.abs())),
        "dual numerator has an imaginary part: {numerator}"
    );
    DualNumber::new(std_norm, numerator.w / std_norm)
}

/// `sqrt(‖v_s‖² + ‖v_d‖²)` over the stacked real components.
pub fn norm_2r(v: &[DualQuaternion]) -> f64 {
    v.iter().map(|x| x.norm_2r_sq()).sum::<f64>().sqrt()
}

/// `norm_2r` of the entrywise difference `a - b`.
pub fn dist_2r(a: &[UnitDualQuaternion], b: &[UnitDualQuaternion]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.value() - y.value()).norm_2r_sq())
        .sum::<f64>()
        .sqrt()
}

/// Nearest unit dual quaternion.
///
/// For `x_s ≠ 0` this is `x_s/|x_s| + (x_d/|x_s| - (x_s* x_d + x_d* x_s) x_s / (2|x_s|³)) ε`;
/// a zero standard part maps to `x_d/|x_d| ε` and the zero element maps to `1`.
pub fn project_udq(x: DualQuaternion) -> UnitDualQuaternion {
    let s_norm = x.std.norm();
    if s_norm > PROJECTION_ZERO {
        let inv = 1.0 / s_norm;
        // (x_s* x_d + x_d* x_s) = 2 <x_s, x_d>, a real scalar.
        let coupling = 2.0 * x.std.dot(x.dual);
        let std = x.std.scale(inv);
        let dual = x.dual.scale(inv) - x.std.scale(coupling * 0.5 * inv * inv * inv);
        return UnitDualQuaternion::new_unchecked(DualQuaternion::new(std, dual));
    }
    let d_norm = x.dual.norm();
    if d_norm > PROJECTION_ZERO {
        return UnitDualQuaternion::new_unchecked(DualQuaternion::new(
            Quaternion::ZERO,
            x.dual.scale(1.0 / d_norm),
        ));
    }
    UnitDualQuaternion::IDENTITY
}

/// Random pose: uniform rotation (normalised 4-D Gaussian) and a standard
/// Gaussian translation.
pub fn random_udq_with<R: Rng + ?Sized>(rng: &mut R) -> UnitDualQuaternion {
    let attitude = loop {
        let q = Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = q.norm();
        if n > 1e-12 {
            break q.scale(1.0 / n);
        }
    };
    let position = [
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    ];
    make_pose(attitude, position).expect("normalised attitude")
}

/// Deterministic random pose for a given seed.
pub fn random_udq(seed: u64) -> UnitDualQuaternion {
    random_udq_with(&mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_of_ones() {
        let v = vec![DualQuaternion::ONE; 7];
        let n = dq_vec_norm(&v);
        assert!((n.std - 7f64.sqrt()).abs() < 1e-15);
        assert_eq!(n.dual, 0.0);
    }

    #[test]
    fn norm_with_zero_standard_part() {
        let v = [DualQuaternion::EPSILON, DualQuaternion::ZERO];
        assert_eq!(dq_vec_norm(&v), DualNumber::new(0.0, 1.0));
    }

    #[test]
    fn norm_2r_examples() {
        assert_eq!(norm_2r(&[DualQuaternion::ZERO; 3]), 0.0);
        assert_eq!(norm_2r(&[DualQuaternion::ONE]), 1.0);
        let v = [DualQuaternion::EPSILON, DualQuaternion::EPSILON];
        assert!((norm_2r(&v) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn projection_branches() {
        assert_eq!(
            project_udq(DualQuaternion::from_real(2.0)),
            UnitDualQuaternion::IDENTITY
        );
        assert_eq!(
            project_udq(DualQuaternion::ZERO),
            UnitDualQuaternion::IDENTITY
        );
        let pure_dual = DualQuaternion::new(Quaternion::ZERO, Quaternion::new(0.0, 3.0, 0.0, 4.0));
        let p = project_udq(pure_dual).value();
        assert_eq!(p.std, Quaternion::ZERO);
        assert!((p.dual - Quaternion::new(0.0, 0.6, 0.0, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn projection_fixes_unit_elements() {
        for seed in 0..50 {
            let q = random_udq(seed);
            let p = project_udq(q.value());
            assert!((p.value() - q.value()).norm_2r_sq().sqrt() <= 1e-14 * (1.0 + q.dual().norm()));
        }
    }

    #[test]
    fn random_udq_is_deterministic_and_unit() {
        assert_eq!(random_udq(42), random_udq(42));
        assert_ne!(random_udq(42), random_udq(43));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1000;
        let mut mean_w = 0.0;
        for _ in 0..n {
            let q = random_udq_with(&mut rng);
            assert!(q.value().is_unit(TAU_UNIT));
            mean_w += q.std().w;
        }
        mean_w /= n as f64;
        assert!(mean_w.abs() < 5.0 / (n as f64).sqrt());
    }
}
