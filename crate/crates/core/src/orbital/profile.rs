//! The archimedean θ-profile: two real callables `θ_∞^±` with compact
//! support, the only structural data the archimedean place contributes.

use super::OrbitalError;
use std::fmt;
use std::sync::Arc;

/// Declared regularity of a profile provider.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    Continuous,
}

type Callable = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `θ_∞^±(x) = θ_∞(x, ±1/4)`: the split/elliptic profile of the archimedean
/// test function, vanishing off `|x| <= support_radius`.
#[derive(Clone)]
pub struct ArchProfile {
    theta_plus: Callable,
    theta_minus: Callable,
    support_radius: f64,
    smoothness: Smoothness,
}

impl fmt::Debug for ArchProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArchProfile")
            .field("support_radius", &self.support_radius)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl ArchProfile {
    pub fn new(
        theta_plus: impl Fn(f64) -> f64 + Send + Sync + 'static,
        theta_minus: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support_radius: f64,
        smoothness: Smoothness,
    ) -> Self {
        assert!(support_radius > 0.0);
        ArchProfile {
            theta_plus: Arc::new(theta_plus),
            theta_minus: Arc::new(theta_minus),
            support_radius,
            smoothness,
        }
    }

    /// The default profile: a C^∞ plateau bump, flat on `|x| <= 2` and
    /// decaying to zero at `|x| = 4`, used for both components.
    pub fn plateau_default() -> Self {
        Self::new(|x| plateau(x, 2.0, 4.0), |x| plateau(x, 2.0, 4.0), 4.0, Smoothness::Smooth)
    }

    /// A profile vanishing near 0 as well (support in `1/2 <= |x| <= 4`).
    pub fn annulus() -> Self {
        let f = |x: f64| {
            let a = x.abs();
            if a <= 0.5 || a >= 4.0 {
                0.0
            } else {
                smooth_step((a - 0.5) / 0.5) * smooth_step((4.0 - a) / 1.0)
            }
        };
        Self::new(f, f, 4.0, Smoothness::Smooth)
    }

    /// The zero profile.
    pub fn zero() -> Self {
        Self::new(|_| 0.0, |_| 0.0, 1.0, Smoothness::Smooth)
    }

    /// Named built-ins for configuration files.
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "plateau" | "default" => Some(Self::plateau_default()),
            "annulus" => Some(Self::annulus()),
            "zero" => Some(Self::zero()),
            _ => None,
        }
    }

    pub fn theta_plus(&self, x: f64) -> f64 {
        if x.abs() > self.support_radius {
            0.0
        } else {
            (self.theta_plus)(x)
        }
    }

    pub fn theta_minus(&self, x: f64) -> f64 {
        if x.abs() > self.support_radius {
            0.0
        } else {
            (self.theta_minus)(x)
        }
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn is_zero(&self) -> bool {
        // structural check for the named zero profile; used to short-circuit
        // sweeps, not a general function-is-zero test
        self.support_radius == 1.0
            && (self.theta_plus)(0.0) == 0.0
            && (self.theta_minus)(0.0) == 0.0
            && (self.theta_plus)(0.5) == 0.0
            && (self.theta_minus)(0.5) == 0.0
    }

    /// `θ_∞(diag(a, b))` through the Z₊-scaling normalization: the class of
    /// `(T, N)` mod `(aT, a²N)` is pinned by `N ↦ ±1/4`, giving
    /// `θ^{sgn ab}((a+b) / (2 √|ab|))`.
    pub fn theta_split(&self, a: f64, b: f64) -> f64 {
        let n = a * b;
        debug_assert!(n != 0.0);
        let x = (a + b) / (2.0 * n.abs().sqrt());
        if n > 0.0 {
            self.theta_plus(x)
        } else {
            self.theta_minus(x)
        }
    }
}

/// `Θ̂_∞(x) = Θ_∞^+(x) + Θ_∞^-(x)` via the case split
/// `Θ_∞^±(x) = θ^+(±1/√(1-x))` for `x < 1`, `θ^-(±1/√(x-1))` for `x > 1`.
pub fn theta_hat_inf(profile: &ArchProfile, x: f64) -> Result<f64, OrbitalError> {
    if x == 1.0 {
        return Err(OrbitalError::BadArgument("x = 1".into()));
    }
    if x < 1.0 {
        let t = 1.0 / (1.0 - x).sqrt();
        Ok(profile.theta_plus(t) + profile.theta_plus(-t))
    } else {
        let t = 1.0 / (x - 1.0).sqrt();
        Ok(profile.theta_minus(t) + profile.theta_minus(-t))
    }
}

/// C^∞ plateau: 1 on `|x| <= flat`, 0 off `|x| >= edge`.
fn plateau(x: f64, flat: f64, edge: f64) -> f64 {
    let a = x.abs();
    if a <= flat {
        1.0
    } else if a >= edge {
        0.0
    } else {
        smooth_step((edge - a) / (edge - flat))
    }
}

/// C^∞ monotone step: 0 at t <= 0, 1 at t >= 1.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let h = |u: f64| (-1.0 / u).exp();
    h(t) / (h(t) + h(1.0 - t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_shape() {
        let p = ArchProfile::plateau_default();
        assert_eq!(p.theta_plus(0.0), 1.0);
        assert_eq!(p.theta_plus(1.9), 1.0);
        assert_eq!(p.theta_plus(4.1), 0.0);
        assert!(p.theta_plus(3.0) > 0.0 && p.theta_plus(3.0) < 1.0);
        assert!(!p.is_zero());
        assert!(ArchProfile::zero().is_zero());
    }

    #[test]
    fn theta_hat_case_selection() {
        // x < 1 reads theta_plus only
        let only_minus = ArchProfile::new(|_| 0.0, |_| 1.0, 4.0, Smoothness::Continuous);
        assert_eq!(theta_hat_inf(&only_minus, 0.5).unwrap(), 0.0);
        assert_eq!(theta_hat_inf(&only_minus, 2.0).unwrap(), 2.0);
        assert!(theta_hat_inf(&only_minus, 1.0).is_err());
        // symmetric profile: 2 θ⁺(1/√(1-x)) for x < 1
        let p = ArchProfile::plateau_default();
        let x = 0.3f64;
        let expect = 2.0 * p.theta_plus(1.0 / (1.0 - x).sqrt());
        assert_eq!(theta_hat_inf(&p, x).unwrap(), expect);
    }

    #[test]
    fn support_window_for_annulus_profile() {
        // with support in r <= |t| <= R, Θ̂ vanishes once |x| > 1 + R²
        // (the argument drops below the inner radius)
        let p = ArchProfile::annulus();
        let r2 = p.support_radius() * p.support_radius();
        for x in [1.0 + r2 + 0.5, 1.0 + r2 + 10.0, -(1.0 + r2) - 0.5, -(1.0 + r2) - 10.0] {
            assert_eq!(theta_hat_inf(&p, x).unwrap(), 0.0, "x={x}");
        }
    }

    #[test]
    fn split_normalization() {
        let p = ArchProfile::plateau_default();
        // positive determinant pairs evaluate theta_plus at >= 1 by AM-GM
        assert_eq!(p.theta_split(1.0, 1.00001), 1.0);
        // scaling invariance
        let v1 = p.theta_split(3.0, 2.0);
        let v2 = p.theta_split(6.0, 4.0);
        assert!((v1 - v2).abs() < 1e-15);
    }
}
