use super::{DualQuaternion, Quaternion, UnitDualQuaternion, TAU_UNIT};
use crate::error::{Error, Result};

/// Attitude and world-frame position of a rigid body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub attitude: Quaternion,
    pub position: [f64; 3],
}

/// Encodes a pose as `q_s + ½ p q_s ε` with `p = [0, position]`.
pub fn make_pose(attitude: Quaternion, position: [f64; 3]) -> Result<UnitDualQuaternion> {
    let mag = attitude.norm();
    if !((mag - 1.0).abs() <= TAU_UNIT) {
        return Err(Error::NonUnitAttitude(mag));
    }
    let dual = (Quaternion::pure(position) * attitude).scale(0.5);
    Ok(UnitDualQuaternion::new_unchecked(DualQuaternion::new(
        attitude, dual,
    )))
}

/// Inverse of [`make_pose`]: position is the vector part of `2 q_d q_s*`.
pub fn pose_parts(q: UnitDualQuaternion) -> Result<Pose> {
    let dev = q.value().unit_deviation();
    if !(dev <= TAU_UNIT) {
        return Err(Error::NonUnitInput(dev));
    }
    let p = (q.dual() * q.std().conj()).scale(2.0);
    Ok(Pose {
        attitude: q.std(),
        position: p.vector(),
    })
}

impl Pose {
    pub fn to_udq(self) -> Result<UnitDualQuaternion> {
        make_pose(self.attitude, self.position)
    }
}
