//! Classical harmonic oscillator under time reversal: the law is covariant
//! while individual solutions need not be invariant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Energy drift above which a step is rejected.
pub const ENERGY_DRIFT_LIMIT: f64 = 1e-8;

/// RK4 is stable for the oscillator while `ω·dt < 2√2`.
const RK4_STABILITY: f64 = 2.0 * std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub q: f64,
    pub p: f64,
}

impl ClassicalState {
    pub fn new(q: f64, p: f64) -> Result<Self> {
        if !(q.is_finite() && p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "state",
                reason: format!("(q, p) = ({q}, {p}) must be finite"),
            });
        }
        Ok(Self { q, p })
    }

    /// `(q, p) → (q, −p)`.
    pub fn reversed(self) -> Self {
        Self { q: self.q, p: -self.p }
    }
}

/// Unit-mass oscillator `H = ½p² + ½ω²q²`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Oscillator {
    omega: f64,
}

impl Oscillator {
    fn rhs(&self, s: ClassicalState) -> ClassicalState {
        ClassicalState {
            q: s.p,
            p: -self.omega * self.omega * s.q,
        }
    }

    fn energy(&self, s: ClassicalState) -> f64 {
        0.5 * s.p * s.p + 0.5 * self.omega * self.omega * s.q * s.q
    }

    fn rk4(&self, s: ClassicalState, h: f64) -> ClassicalState {
        let add = |a: ClassicalState, b: ClassicalState, k: f64| ClassicalState {
            q: a.q + k * b.q,
            p: a.p + k * b.p,
        };
        let k1 = self.rhs(s);
        let k2 = self.rhs(add(s, k1, h / 2.0));
        let k3 = self.rhs(add(s, k2, h / 2.0));
        let k4 = self.rhs(add(s, k3, h));
        ClassicalState {
            q: s.q + h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
            p: s.p + h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeReversalReport {
    pub omega: f64,
    pub initial: ClassicalState,
    pub t_end: f64,
    pub dt: f64,
    /// Largest Hamilton-equation residual of the reversed trajectory.
    pub reversed_residual: f64,
    /// `sup_t |s(t) − s_R(t)|` in phase space.
    pub sup_distance: f64,
    pub energy_drift: f64,
    pub reversed_energy_drift: f64,
}

/// Integrates the oscillator on `[−T, T]` with fixed-step RK4, builds the
/// reversed trajectory `s_R(t) = (q(−t), −p(−t))` and measures how well it
/// solves Hamilton's equations (fourth-order central differences) and how
/// far it is from the original solution.
pub fn classical_time_reversal_demo(omega: f64, q0: f64, p0: f64, t_end: f64, dt: f64) -> Result<TimeReversalReport> {
    let initial = ClassicalState::new(q0, p0)?;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: format!("must be finite and positive, got {omega}"),
        });
    }
    if !(dt.is_finite() && dt > 0.0 && t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("need positive finite dt and t_end, got {dt} and {t_end}"),
        });
    }
    if omega * dt >= RK4_STABILITY {
        return Err(Error::UnstableStep(format!(
            "ω·dt = {} exceeds the RK4 stability limit {RK4_STABILITY:.4}",
            omega * dt
        )));
    }
    let steps = (t_end / dt).round() as usize;
    if steps < 3 {
        return Err(Error::GridTooShort(steps + 1));
    }
    let osc = Oscillator { omega };

    // Index `steps + k` holds t = k·dt for k in −steps..=steps.
    let mut forward = vec![initial];
    let mut backward = vec![initial];
    for _ in 0..steps {
        forward.push(osc.rk4(*forward.last().expect("nonempty"), dt));
        backward.push(osc.rk4(*backward.last().expect("nonempty"), -dt));
    }
    let mut trajectory: Vec<ClassicalState> = backward.into_iter().rev().collect();
    trajectory.extend_from_slice(&forward[1..]);

    let reversed: Vec<ClassicalState> = trajectory.iter().rev().map(|s| s.reversed()).collect();

    let e0 = osc.energy(initial);
    let drift = |traj: &[ClassicalState]| traj.iter().map(|&s| (osc.energy(s) - e0).abs()).fold(0.0, f64::max);
    let energy_drift = drift(&trajectory);
    let reversed_energy_drift = drift(&reversed);
    if energy_drift > ENERGY_DRIFT_LIMIT {
        return Err(Error::UnstableStep(format!(
            "energy drift {energy_drift:.3e} exceeds {ENERGY_DRIFT_LIMIT:.0e}; reduce dt"
        )));
    }

    let mut reversed_residual: f64 = 0.0;
    for k in 2..reversed.len() - 2 {
        let d = |f: fn(&ClassicalState) -> f64| {
            (-f(&reversed[k + 2]) + 8.0 * f(&reversed[k + 1]) - 8.0 * f(&reversed[k - 1]) + f(&reversed[k - 2]))
                / (12.0 * dt)
        };
        let rhs = osc.rhs(reversed[k]);
        let rq = d(|s| s.q) - rhs.q;
        let rp = d(|s| s.p) - rhs.p;
        reversed_residual = reversed_residual.max(rq.hypot(rp));
    }

    let sup_distance = trajectory
        .iter()
        .zip(&reversed)
        .map(|(a, b)| (a.q - b.q).hypot(a.p - b.p))
        .fold(0.0, f64::max);

    Ok(TimeReversalReport {
        omega,
        initial,
        t_end: steps as f64 * dt,
        dt,
        reversed_residual,
        sup_distance,
        energy_drift,
        reversed_energy_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_solution_is_invariant() {
        let r = classical_time_reversal_demo(1.0, 1.0, 0.0, 10.0, 0.01).unwrap();
        assert!(r.sup_distance <= 1e-8, "{}", r.sup_distance);
        assert!(r.reversed_residual <= 1e-8, "{}", r.reversed_residual);
    }

    #[test]
    fn odd_solution_is_not_invariant_but_law_is_covariant() {
        let r = classical_time_reversal_demo(1.0, 0.0, 1.0, 10.0, 0.01).unwrap();
        assert!(r.reversed_residual <= 1e-8, "{}", r.reversed_residual);
        assert!(r.sup_distance >= 0.5);
        assert!(r.energy_drift <= 1e-8 && r.reversed_energy_drift <= 1e-8);
    }

    #[test]
    fn closed_form_agreement() {
        let r = classical_time_reversal_demo(2.0, 0.0, 1.0, 3.0, 0.001).unwrap();
        // For the sine solution s_R(t) = −s(t), so the distance is
        // 2·sqrt(q² + p²), largest at q = 0 where |p| = 1.
        assert!((r.sup_distance - 2.0).abs() < 1e-6, "{}", r.sup_distance);
    }

    #[test]
    fn unstable_steps_are_rejected() {
        assert!(matches!(
            classical_time_reversal_demo(1.0, 1.0, 0.0, 10.0, 3.0),
            Err(Error::UnstableStep(_))
        ));
        assert!(matches!(
            classical_time_reversal_demo(1.0, 1.0, 0.0, 100.0, 0.5),
            Err(Error::UnstableStep(_))
        ));
    }
}
