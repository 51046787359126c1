//! Compliant actuators: the tunable rotary joint and the magnetic spring.

pub mod joint;
pub mod magnet;
pub mod pid;

pub use joint::{
    default_step_schedule, joint_torque, joint_torque_series_coeffs, linear_stiffness, simulate_joint_oscillator,
    JointGeometry, JointOscillatorConfig, PretensionSchedule, SeriesCoeffs, SpringConfig,
};
pub use magnet::{magnetic_force, ForceCurve, MagnetMode, MagneticSpringModel};
pub use pid::{pid_tracking_experiment, Pid, PidGains, Sinusoid, SpringPlant, TrackingReport, TrackingSetup};
