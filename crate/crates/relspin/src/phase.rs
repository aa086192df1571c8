//! The canonical coordinate of a relaxed spin.
//!
//! The phase space of one relaxed spin is two circles of circumference 2
//! touching at the boundary points; crossing a boundary flips the discrete
//! component σ. Folding (σ, X) into a single angle θ = σ + X on the
//! circumference-4 circle [−2, 2) makes boundary crossings a plain modular
//! wrap and the rotation symmetry a shift.

use serde::{Deserialize, Serialize};

/// Discrete spin value, +1 or −1.
pub type Spin = i8;

/// One relaxed spin in the canonical coordinate θ ∈ [−2, 2).
///
/// σ(θ) = +1 for θ ∈ [0, 2), −1 otherwise; X(θ) = θ − σ(θ) ∈ [−1, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhasePoint {
    theta: f64,
}

/// Wraps an angle into [−2, 2).
pub fn wrap(theta: f64) -> f64 {
    let w = theta - 4.0 * ((theta + 2.0) / 4.0).floor();
    // Guard against the representable edge: floor may land on 2.0 exactly.
    if w >= 2.0 {
        w - 4.0
    } else if w < -2.0 {
        w + 4.0
    } else {
        w
    }
}

impl PhasePoint {
    pub fn new(theta: f64) -> Self {
        PhasePoint { theta: wrap(theta) }
    }

    /// Builds the point from its (σ, X) decomposition.
    pub fn from_parts(sigma: Spin, x: f64) -> Self {
        debug_assert!(sigma == 1 || sigma == -1);
        PhasePoint::new(f64::from(sigma) + x)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> Spin {
        if self.theta >= 0.0 {
            1
        } else {
            -1
        }
    }

    /// Continuous component X = θ − σ ∈ [−1, 1).
    pub fn continuous(&self) -> f64 {
        self.theta - f64::from(self.sigma())
    }

    pub fn rotated(&self, r: f64) -> Self {
        PhasePoint::new(self.theta + r)
    }

    /// Rotation parameter r ∈ (0, 2] at which this spin next crosses a
    /// σ-boundary under θ → θ + r. Spins sharing a continuous component
    /// share this phase, which is what makes them flip together.
    pub fn crossing_phase(&self) -> f64 {
        let p = (-self.theta).rem_euclid(2.0);
        if p == 0.0 {
            2.0
        } else {
            p
        }
    }
}

/// Circular distance between two boundary-crossing phases, i.e. the
/// distance of the continuous components on the circumference-2 phase
/// circle. Spins at distance 0 flip simultaneously under rotation,
/// regardless of their discrete components.
pub fn phase_distance(a: PhasePoint, b: PhasePoint) -> f64 {
    let d = (a.theta - b.theta).rem_euclid(2.0);
    d.min(2.0 - d)
}

/// Circular distance on the full circumference-4 circle.
pub fn circle_distance(a: PhasePoint, b: PhasePoint) -> f64 {
    let d = (a.theta - b.theta).rem_euclid(4.0);
    d.min(4.0 - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap(2.0), -2.0);
        assert_eq!(wrap(-2.0), -2.0);
        assert_eq!(wrap(5.0), 1.0);
        assert_eq!(wrap(-5.0), -1.0);
        assert_eq!(wrap(0.0), 0.0);
    }

    #[test]
    fn sigma_and_continuous_decomposition() {
        let p = PhasePoint::new(1.25);
        assert_eq!(p.sigma(), 1);
        assert!((p.continuous() - 0.25).abs() < 1e-15);

        let q = PhasePoint::new(-0.5);
        assert_eq!(q.sigma(), -1);
        assert!((q.continuous() - 0.5).abs() < 1e-15);

        // θ = 0 sits at the start of the σ = +1 sector.
        let b = PhasePoint::new(0.0);
        assert_eq!(b.sigma(), 1);
        assert_eq!(b.continuous(), -1.0);
    }

    #[test]
    fn crossing_phase_matches_continuous_component() {
        // Same X, opposite σ: both cross a boundary at the same rotation.
        let up = PhasePoint::from_parts(1, 0.3);
        let down = PhasePoint::from_parts(-1, 0.3);
        assert!((up.crossing_phase() - down.crossing_phase()).abs() < 1e-15);
        assert!((up.crossing_phase() - 0.7).abs() < 1e-15);
        assert_eq!(phase_distance(up, down), 0.0);
    }

    #[test]
    fn phase_distance_chains_across_the_wrap() {
        let a = PhasePoint::new(1.999);
        let b = PhasePoint::new(-1.999);
        assert!(phase_distance(a, b) < 0.0021);
        assert!(circle_distance(a, b) < 0.0021);
    }

    proptest! {
        #[test]
        fn wrap_stays_in_domain(t in -1e6f64..1e6) {
            let w = wrap(t);
            prop_assert!((-2.0..2.0).contains(&w));
        }

        #[test]
        fn decomposition_roundtrips(t in -2.0f64..2.0) {
            let p = PhasePoint::new(t);
            let back = PhasePoint::from_parts(p.sigma(), p.continuous());
            prop_assert!((back.theta() - p.theta()).abs() < 1e-12);
            prop_assert!((-1.0..1.0).contains(&p.continuous()));
        }

        #[test]
        fn rotation_by_two_flips_sigma(t in -2.0f64..2.0) {
            let p = PhasePoint::new(t);
            let q = p.rotated(2.0);
            prop_assert_eq!(q.sigma(), -p.sigma());
            prop_assert!((q.continuous() - p.continuous()).abs() < 1e-12);
        }
    }
}
