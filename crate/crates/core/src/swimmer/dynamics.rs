use crate::scalar::Scalar;

use super::{ActuationParams, StiffnessProfile, SwimmerConfig, N_DOF, N_SEGMENTS};

/// Pose and velocity of the chain.
///
/// `(x, y)` is the centre of the front segment; `angles` are absolute segment
/// orientations, front first, pointing from tail to head.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SwimmerState<T> {
    pub x: T,
    pub y: T,
    pub angles: [T; N_SEGMENTS],
    /// Time derivatives of `(x, y, angles…)`.
    pub velocities: [T; N_DOF],
}

impl<T: Scalar> SwimmerState<T> {
    /// Straight chain at rest.
    pub fn straight(x: T, y: T, heading: T) -> Self {
        Self { x, y, angles: [heading; N_SEGMENTS], velocities: [T::zero(); N_DOF] }
    }

    /// Same state seen in a frame rotated by `angle` about the origin.
    pub fn rotated(&self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let rot = |x: T, y: T| (c * x - s * y, s * x + c * y);
        let (x, y) = rot(self.x, self.y);
        let (vx, vy) = rot(self.velocities[0], self.velocities[1]);
        let mut velocities = self.velocities;
        velocities[0] = vx;
        velocities[1] = vy;
        Self { x, y, angles: self.angles.map(|a| a + angle), velocities }
    }

    pub fn from_slice(s: &[T]) -> Self {
        let mut angles = [T::zero(); N_SEGMENTS];
        angles.copy_from_slice(&s[2..N_DOF]);
        let mut velocities = [T::zero(); N_DOF];
        velocities.copy_from_slice(&s[N_DOF..2 * N_DOF]);
        Self { x: s[0], y: s[1], angles, velocities }
    }

    pub fn to_vec(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(2 * N_DOF);
        v.push(self.x);
        v.push(self.y);
        v.extend_from_slice(&self.angles);
        v.extend_from_slice(&self.velocities);
        v
    }
}

type V2<T> = [T; 2];

#[inline]
fn dot<T: Scalar>(a: V2<T>, b: V2<T>) -> T {
    a[0] * b[0] + a[1] * b[1]
}

/// Lever weights: centre of segment `i` is `c₀ − Σⱼ w(i, j)·eⱼ`.
#[inline]
fn weight<T: Scalar>(cfg: &SwimmerConfig<T>, i: usize, j: usize) -> T {
    let half = T::lit(0.5);
    if i == 0 || j > i {
        T::zero()
    } else if j == 0 || j == i {
        half * cfg.lengths[j]
    } else {
        cfg.lengths[j]
    }
}

/// Unit vectors along (`e`) and normal to (`n`) each segment.
fn frames<T: Scalar>(angles: &[T]) -> ([V2<T>; N_SEGMENTS], [V2<T>; N_SEGMENTS]) {
    let mut e = [[T::zero(); 2]; N_SEGMENTS];
    let mut n = [[T::zero(); 2]; N_SEGMENTS];
    for i in 0..N_SEGMENTS {
        let (s, c) = angles[i].sin_cos();
        e[i] = [c, s];
        n[i] = [-s, c];
    }
    (e, n)
}

pub(super) fn segment_centres<T: Scalar>(cfg: &SwimmerConfig<T>, y: &[T]) -> [V2<T>; N_SEGMENTS] {
    let (e, _) = frames(&y[2..N_DOF]);
    let mut c = [[y[0], y[1]]; N_SEGMENTS];
    for (i, ci) in c.iter_mut().enumerate() {
        for (j, ej) in e.iter().enumerate().take(i + 1) {
            let w = weight(cfg, i, j);
            ci[0] = ci[0] - w * ej[0];
            ci[1] = ci[1] - w * ej[1];
        }
    }
    c
}

pub(super) fn centre_of_mass<T: Scalar>(cfg: &SwimmerConfig<T>, y: &[T]) -> V2<T> {
    let c = segment_centres(cfg, y);
    let total = cfg.masses.iter().fold(T::zero(), |a, &m| a + m);
    let mut com = [T::zero(); 2];
    for (ci, &m) in c.iter().zip(&cfg.masses) {
        com[0] = com[0] + m * ci[0];
        com[1] = com[1] + m * ci[1];
    }
    [com[0] / total, com[1] / total]
}

/// `head_x, head_y, heading, joint1..joint4`
pub(super) fn trace_row<T: Scalar>(cfg: &SwimmerConfig<T>, y: &[T], row: &mut [T; 7]) {
    let heading = y[2];
    let half = T::lit(0.5) * cfg.lengths[0];
    row[0] = y[0] + half * heading.cos();
    row[1] = y[1] + half * heading.sin();
    row[2] = heading;
    for j in 1..N_SEGMENTS {
        row[2 + j] = y[2 + j] - y[1 + j];
    }
}

/// Velocity Jacobian of every segment centre: `ċᵢ = Σ J[i][col]·q̇[col]`.
fn jacobians<T: Scalar>(cfg: &SwimmerConfig<T>, n: &[V2<T>; N_SEGMENTS]) -> [[V2<T>; N_DOF]; N_SEGMENTS] {
    let mut jac = [[[T::zero(); 2]; N_DOF]; N_SEGMENTS];
    for (i, ji) in jac.iter_mut().enumerate() {
        ji[0] = [T::one(), T::zero()];
        ji[1] = [T::zero(), T::one()];
        for j in 0..=i {
            let w = weight(cfg, i, j);
            ji[2 + j] = [-w * n[j][0], -w * n[j][1]];
        }
    }
    jac
}

/// Torque the joint-1 spring applies to segment 1 (and the motor delivers).
fn drive_torque<T: Scalar>(
    cfg: &SwimmerConfig<T>,
    profile: &StiffnessProfile<T>,
    act: &ActuationParams<T>,
    t: T,
    y: &[T],
) -> T {
    let q = y[3] - y[2];
    let qd = y[N_DOF + 3] - y[N_DOF + 2];
    cfg.spring_torque(profile.k[0], q - act.angle(t)) - cfg.joint_damping * (qd - act.rate(t))
}

pub(super) fn motor_power<T: Scalar>(
    cfg: &SwimmerConfig<T>,
    profile: &StiffnessProfile<T>,
    act: &ActuationParams<T>,
    t: T,
    y: &[T],
) -> T {
    drive_torque(cfg, profile, act, t, y) * act.rate(t)
}

/// Translational and rotational kinetic energy, J.
pub fn kinetic_energy<T: Scalar>(cfg: &SwimmerConfig<T>, y: &[T]) -> T {
    let (_, n) = frames(&y[2..N_DOF]);
    let jac = jacobians(cfg, &n);
    let qd = &y[N_DOF..];
    let half = T::lit(0.5);
    (0..N_SEGMENTS).fold(T::zero(), |acc, i| {
        let mut v = [T::zero(); 2];
        for col in 0..N_DOF {
            v[0] = v[0] + jac[i][col][0] * qd[col];
            v[1] = v[1] + jac[i][col][1] * qd[col];
        }
        acc + half * cfg.masses[i] * dot(v, v) + half * cfg.inertia(i) * qd[2 + i] * qd[2 + i]
    })
}

/// Energy stored in the joint springs, J. Linear law only.
pub fn elastic_energy<T: Scalar>(profile: &StiffnessProfile<T>, act: &ActuationParams<T>, t: T, y: &[T]) -> T {
    let half = T::lit(0.5);
    (1..N_SEGMENTS).fold(T::zero(), |acc, j| {
        let mut q = y[2 + j] - y[1 + j];
        if j == 1 {
            q = q - act.angle(t);
        }
        acc + half * profile.k[j - 1] * q * q
    })
}

/// Equations of motion `M(q)·q̈ = Q(t, q, q̇) − h(q, q̇)` in first-order form.
pub(super) fn derivatives<T: Scalar>(
    cfg: &SwimmerConfig<T>,
    profile: &StiffnessProfile<T>,
    act: &ActuationParams<T>,
    t: T,
    y: &[T],
    dy: &mut [T],
) {
    let qd = &y[N_DOF..];
    let (e, n) = frames(&y[2..N_DOF]);
    let jac = jacobians(cfg, &n);

    let mut mass = [[T::zero(); N_DOF]; N_DOF];
    let mut rhs = [T::zero(); N_DOF];
    let twelfth = T::lit(1.0 / 12.0);

    for i in 0..N_SEGMENTS {
        let m = cfg.masses[i];
        let len = cfg.lengths[i];
        let mut v = [T::zero(); 2];
        for col in 0..N_DOF {
            v[0] = v[0] + jac[i][col][0] * qd[col];
            v[1] = v[1] + jac[i][col][1] * qd[col];
        }
        // centripetal part of the centre acceleration
        let mut acc = [T::zero(); 2];
        for j in 0..=i {
            let w = weight(cfg, i, j) * qd[2 + j] * qd[2 + j];
            acc[0] = acc[0] + w * e[j][0];
            acc[1] = acc[1] + w * e[j][1];
        }
        let vt = dot(v, e[i]);
        let vn = dot(v, n[i]);
        let drag_t = -cfg.drag_tangential * len * vt;
        let drag_n = -cfg.drag_normal * len * vn;
        let force =
            [drag_t * e[i][0] + drag_n * n[i][0] - m * acc[0], drag_t * e[i][1] + drag_n * n[i][1] - m * acc[1]];

        for a in 0..N_DOF {
            let ja = jac[i][a];
            if ja[0] == T::zero() && ja[1] == T::zero() {
                continue;
            }
            rhs[a] = rhs[a] + dot(ja, force);
            for b in a..N_DOF {
                mass[a][b] = mass[a][b] + m * dot(ja, jac[i][b]);
            }
        }
        mass[2 + i][2 + i] = mass[2 + i][2 + i] + cfg.inertia(i);
        // rotational drag about the segment centre
        rhs[2 + i] = rhs[2 + i] - cfg.drag_normal * len * len * len * twelfth * qd[2 + i];
    }

    for j in 1..N_SEGMENTS {
        let tau = if j == 1 {
            drive_torque(cfg, profile, act, t, y)
        } else {
            let q = y[2 + j] - y[1 + j];
            let qdot = qd[2 + j] - qd[1 + j];
            cfg.spring_torque(profile.k[j - 1], q) - cfg.joint_damping * qdot
        };
        rhs[2 + j] = rhs[2 + j] + tau;
        rhs[1 + j] = rhs[1 + j] - tau;
    }

    for a in 0..N_DOF {
        for b in 0..a {
            mass[a][b] = mass[b][a];
        }
    }
    let acc = cholesky_solve(mass, rhs);
    dy[..N_DOF].copy_from_slice(qd);
    dy[N_DOF..].copy_from_slice(&acc);
}

/// Solves `A·x = b` for symmetric positive definite `A`.
/// A non-positive pivot yields NaN, which the integrator reports as divergence.
fn cholesky_solve<T: Scalar, const N: usize>(mut a: [[T; N]; N], mut b: [T; N]) -> [T; N] {
    for j in 0..N {
        let mut d = a[j][j];
        for k in 0..j {
            d = d - a[j][k] * a[j][k];
        }
        let l = d.sqrt();
        a[j][j] = l;
        for i in j + 1..N {
            let mut s = a[i][j];
            for k in 0..j {
                s = s - a[i][k] * a[j][k];
            }
            a[i][j] = s / l;
        }
    }
    for i in 0..N {
        let mut s = b[i];
        for k in 0..i {
            s = s - a[i][k] * b[k];
        }
        b[i] = s / a[i][i];
    }
    for i in (0..N).rev() {
        let mut s = b[i];
        for k in i + 1..N {
            s = s - a[k][i] * b[k];
        }
        b[i] = s / a[i][i];
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_matches_known_solution() {
        let a: [[f64; 3]; 3] = [[4.0, 2.0, 0.6], [2.0, 5.0, 1.0], [0.6, 1.0, 3.0]];
        let x_true = [1.0, -2.0, 0.5];
        let mut b = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i] += a[i][j] * x_true[j];
            }
        }
        let x = cholesky_solve(a, b);
        for i in 0..3 {
            assert!((x[i] - x_true[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn straight_chain_geometry() {
        let cfg = SwimmerConfig::<f64>::default();
        let s = SwimmerState::straight(0.0, 0.0, 0.0).to_vec();
        let c = segment_centres(&cfg, &s);
        let expected = [0.0, -0.125, -0.175, -0.225, -0.275];
        for i in 0..N_SEGMENTS {
            assert!((c[i][0] - expected[i]).abs() < 1e-15 && c[i][1] == 0.0);
        }
        let com = centre_of_mass(&cfg, &s);
        assert!((com[0] - (-0.2 * 0.0 + 0.05 * (-0.125 - 0.175 - 0.225 - 0.275)) / 0.4).abs() < 1e-15);
    }

    #[test]
    fn kinetic_energy_matches_jacobian_free_formula() {
        // finite-difference the segment centres to get velocities independently
        let cfg = SwimmerConfig::<f64>::default();
        let mut st = SwimmerState::straight(0.1, -0.2, 0.3);
        st.angles = [0.3, 0.5, 0.1, -0.2, 0.4];
        st.velocities = [0.02, -0.01, 0.3, -0.5, 0.8, 0.1, -0.4];
        let y = st.to_vec();
        let h = 1e-7;
        let mut yp = y.clone();
        let mut ym = y.clone();
        for k in 0..N_DOF {
            yp[k] += h * y[N_DOF + k];
            ym[k] -= h * y[N_DOF + k];
        }
        let (cp, cm) = (segment_centres(&cfg, &yp), segment_centres(&cfg, &ym));
        let mut ke = 0.0;
        for i in 0..N_SEGMENTS {
            let vx = (cp[i][0] - cm[i][0]) / (2.0 * h);
            let vy = (cp[i][1] - cm[i][1]) / (2.0 * h);
            ke += 0.5 * cfg.masses[i] * (vx * vx + vy * vy) + 0.5 * cfg.inertia(i) * y[N_DOF + 2 + i].powi(2);
        }
        assert!((kinetic_energy(&cfg, &y) - ke).abs() < 1e-7 * ke, "{} vs {ke}", kinetic_energy(&cfg, &y));
    }

    #[test]
    fn rotation_preserves_shape() {
        let mut st = SwimmerState::straight(0.3, 0.1, 0.2);
        st.angles[3] = 0.5;
        st.velocities = [0.1, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0];
        let r = st.rotated(1.0);
        let cfg = SwimmerConfig::<f64>::default();
        let (mut a, mut b) = ([0.0; 7], [0.0; 7]);
        trace_row(&cfg, &st.to_vec(), &mut a);
        trace_row(&cfg, &r.to_vec(), &mut b);
        for j in 3..7 {
            assert!((a[j] - b[j]).abs() < 1e-15);
        }
        assert!((st.velocities[0].hypot(st.velocities[1]) - r.velocities[0].hypot(r.velocities[1])).abs() < 1e-15);
    }
}
