use nalgebra::Vector3;
use serde::Serialize;

/// Sampled trajectory: times with positions and velocities.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub position: Vec<Vector3<f64>>,
    pub velocity: Vec<Vector3<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub(crate) fn push(&mut self, t: f64, x: Vector3<f64>, v: Vector3<f64>) {
        self.times.push(t);
        self.position.push(x);
        self.velocity.push(v);
    }
}

/// Coriolis plus centrifugal acceleration `2ẋ×Ω + Ω×(x×Ω)`.
pub fn classical_acceleration(x: &Vector3<f64>, v: &Vector3<f64>, omega: &Vector3<f64>) -> Vector3<f64> {
    2.0 * v.cross(omega) + omega.cross(&x.cross(omega))
}

/// RK4 integration of the rotating-frame equation of motion, sampled every
/// `dt` for `steps` steps (the initial point included).
pub fn classical_trajectory(
    x0: Vector3<f64>,
    v0: Vector3<f64>,
    omega: Vector3<f64>,
    dt: f64,
    steps: usize,
) -> Trajectory {
    let f = |x: &Vector3<f64>, v: &Vector3<f64>| (*v, classical_acceleration(x, v, &omega));
    let mut out = Trajectory::default();
    let (mut x, mut v) = (x0, v0);
    out.push(0.0, x, v);
    for i in 1..=steps {
        let (k1x, k1v) = f(&x, &v);
        let (k2x, k2v) = f(&(x + k1x * (0.5 * dt)), &(v + k1v * (0.5 * dt)));
        let (k3x, k3v) = f(&(x + k2x * (0.5 * dt)), &(v + k2v * (0.5 * dt)));
        let (k4x, k4v) = f(&(x + k3x * dt), &(v + k3v * dt));
        x += (k1x + 2.0 * k2x + 2.0 * k3x + k4x) * (dt / 6.0);
        v += (k1v + 2.0 * k2v + 2.0 * k3v + k4v) * (dt / 6.0);
        out.push(i as f64 * dt, x, v);
    }
    out
}
