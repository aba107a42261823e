//! The projected iteration control law.
//!
//! Each step moves the pose vector along `-α K L̂ z` and projects every entry
//! back onto the unit dual quaternions. Time is `t = k α`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dq::{dist_2r, project_udq, random_udq_with, UnitDualQuaternion, TAU_UNIT};
use crate::error::{Error, Result};
use crate::graph::has_simple_zero;
use crate::udqdg::{build_dq_laplacian, DqMatrix, Formation, Scheme};

/// Errors below this are reported as zero.
pub const ERROR_FLOOR: f64 = 1e-16;

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub scheme: Scheme,
    /// Positive diagonal of `K`.
    pub gains: Vec<f64>,
    pub alpha: f64,
    /// Stop once `‖z(k+1) - z(k)‖ ≤ tol` (2^R norm), if `stop_on_tol`.
    pub tol: f64,
    pub stop_on_tol: bool,
    pub k_max: usize,
    /// Seed for the random initial state; ignored when `initial` is set.
    pub seed: u64,
    pub initial: Option<Vec<UnitDualQuaternion>>,
    /// Desired formation used to form the limit `conj(q_d) ĉ` and the error curve.
    pub formation: Option<Formation>,
    /// Keep every `record_every`-th state (the first and last are always kept).
    pub record_every: usize,
}

impl SimConfig {
    /// Defaults: `K = I`, `α = 0.2`, `δ = 1e-15 √n`, 350 iterations, seed 1.
    pub fn new(scheme: Scheme) -> Self {
        let n = scheme.n();
        Self {
            scheme,
            gains: vec![1.0; n],
            alpha: 0.2,
            tol: 1e-15 * (n as f64).sqrt(),
            stop_on_tol: true,
            k_max: 350,
            seed: 1,
            initial: None,
            formation: None,
            record_every: 1,
        }
    }

    pub fn with_formation(mut self, f: Formation) -> Self {
        self.formation = Some(f);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.scheme.n();
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidConfig(format!("step size must be positive, got {}", self.alpha)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.gains.len() != n {
            return Err(Error::SizeMismatch { expected: n, got: self.gains.len() });
        }
        if let Some(g) = self.gains.iter().find(|g| !(**g > 0.0)) {
            return Err(Error::InvalidConfig(format!("gains must be positive, got {g}")));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be at least 1".into()));
        }
        if let Some(z) = &self.initial {
            if z.len() != n {
                return Err(Error::SizeMismatch { expected: n, got: z.len() });
            }
        }
        if let Some(f) = &self.formation {
            if f.len() != n {
                return Err(Error::SizeMismatch { expected: n, got: f.len() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopStatus {
    /// The successive-iterate tolerance was met.
    Converged,
    /// `k_max` iterations ran without meeting the tolerance.
    CapReached,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Iteration indices of the recorded states.
    pub steps: Vec<usize>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<UnitDualQuaternion>>,
    pub stopped_at: usize,
    pub status: StopStatus,
    pub limit: Option<Vec<UnitDualQuaternion>>,
    /// `‖z∞ - z(t)‖` per recorded state; empty without a limit.
    pub errors: Vec<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[UnitDualQuaternion] {
        self.states.last().expect("trajectory has at least the initial state")
    }

    pub fn final_error(&self) -> Option<f64> {
        self.errors.last().copied()
    }
}

/// One projected iteration `proj(z - α K L̂ z)`.
pub fn step(
    z: &[UnitDualQuaternion],
    laplacian: &DqMatrix,
    gains: &[f64],
    alpha: f64,
) -> Result<Vec<UnitDualQuaternion>> {
    let n = laplacian.n();
    if z.len() != n || gains.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "laplacian is {n}x{n}, state has {} entries, gains {}",
            z.len(),
            gains.len()
        )));
    }
    let lz = laplacian.mul_unit_vec(z)?;
    Ok(z.iter()
        .zip(&lz)
        .zip(gains)
        .map(|((zi, li), k)| project_udq(zi.value() - li.scale(alpha * k)))
        .collect())
}

/// Runs the projected iteration from a seeded random (or given) unit state.
pub fn simulate(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if !has_simple_zero(cfg.scheme.graph()) {
        return Err(Error::NoSpanningTree);
    }
    let n = cfg.scheme.n();
    let laplacian = build_dq_laplacian(&cfg.scheme);
    let mut z = match &cfg.initial {
        Some(z0) => z0.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..n).map(|_| random_udq_with(&mut rng)).collect()
        }
    };

    let mut steps = vec![0];
    let mut states = vec![z.clone()];
    let mut status = StopStatus::CapReached;
    let mut stopped_at = cfg.k_max;
    for k in 0..cfg.k_max {
        let next = step(&z, &laplacian, &cfg.gains, cfg.alpha)?;
        let moved = dist_2r(&next, &z);
        z = next;
        let done = cfg.stop_on_tol && moved <= cfg.tol;
        if done || (k + 1) % cfg.record_every == 0 || k + 1 == cfg.k_max {
            steps.push(k + 1);
            states.push(z.clone());
        }
        if done {
            status = StopStatus::Converged;
            stopped_at = k + 1;
            break;
        }
    }
    debug_assert!(states
        .iter()
        .flatten()
        .all(|q| q.value().is_unit(TAU_UNIT * (1.0 + q.dual().norm()))));

    let times = steps.iter().map(|&k| k as f64 * cfg.alpha).collect();
    let mut traj = Trajectory {
        steps,
        times,
        states,
        stopped_at,
        status,
        limit: None,
        errors: Vec::new(),
    };
    if let Some(f) = &cfg.formation {
        let c = limit_transform(traj.final_state()[0], f.poses()[0])?;
        let limit = f.aligned(c);
        traj.errors = traj.states.iter().map(|s| dist_2r(&limit, s)).collect();
        traj.limit = Some(limit);
    }
    Ok(traj)
}

/// `ĉ = (q_d1*)⁻¹ z_1 = q_d1 z_1`.
pub fn limit_transform(
    z1: UnitDualQuaternion,
    qd1: UnitDualQuaternion,
) -> Result<UnitDualQuaternion> {
    for q in [z1, qd1] {
        let dev = q.value().unit_deviation();
        if !(dev <= TAU_UNIT) {
            return Err(Error::NonUnitInput(dev));
        }
    }
    Ok(qd1 * z1)
}

/// `(t, err)` per recorded state, with errors below [`ERROR_FLOOR`] set to 0.
pub fn error_curve(traj: &Trajectory) -> Result<Vec<(f64, f64)>> {
    let limit = traj.limit.as_ref().ok_or(Error::MissingLimit)?;
    Ok(traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| {
            let e = dist_2r(limit, s);
            (t, if e < ERROR_FLOOR { 0.0 } else { e })
        })
        .collect())
}

/// Least-squares slope of `ln err` against `t` over points with
/// `lo ≤ err ≤ hi`. `None` with fewer than two such points.
pub fn log_slope(curve: &[(f64, f64)], lo: f64, hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|(_, e)| *e >= lo && *e <= hi)
        .map(|&(t, e)| (t, e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|(t, y)| (t - tm) * (y - ym)).sum();
    let sxx: f64 = pts.iter().map(|(t, _)| (t - tm) * (t - tm)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
