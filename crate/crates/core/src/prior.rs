//! Signal distributions: finite discrete priors, the symmetric 3-point
//! mixture, and the most dispersed weak-ℓp law.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::real::Real;

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// ν_{ε,μ} = (1−ε)δ₀ + (ε/2)δ_μ + (ε/2)δ_{−μ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreePointPrior<T> {
    epsilon: T,
    mu: T,
}

impl<T: Real> ThreePointPrior<T> {
    /// `epsilon` must lie in `[0, 1]` and `mu` must be nonnegative.
    ///
    /// `epsilon = 0` is accepted as the degenerate point mass at zero.
    pub fn new(epsilon: T, mu: T) -> Result<Self> {
        if !(epsilon >= T::zero() && epsilon <= T::one()) {
            return invalid(format!("three-point epsilon {epsilon} outside [0, 1]"));
        }
        if !(mu >= T::zero()) || !mu.is_finite() {
            return invalid(format!("three-point mu {mu} must be finite and >= 0"));
        }
        Ok(Self { epsilon, mu })
    }

    /// The prior saturating the ℓp constraint ε·μ^p = ξ^p at mass `epsilon`.
    pub fn saturated(p: T, xi: T, epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero()) {
            return invalid("saturated prior needs epsilon > 0");
        }
        Self::new(epsilon, xi * epsilon.powf(-p.recip()))
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    /// E|X|^p = ε μ^p.
    pub fn pth_moment(&self, p: T) -> T {
        if self.epsilon == T::zero() {
            return T::zero();
        }
        self.epsilon * self.mu.powf(p)
    }

    /// The prior with every atom multiplied by `a`.
    pub fn scaled(&self, a: T) -> Self {
        Self { epsilon: self.epsilon, mu: self.mu * a.abs() }
    }

    pub fn to_discrete(&self) -> DiscretePrior<T> {
        let half = self.epsilon / T::lit(2.0);
        let mut atoms = Vec::with_capacity(3);
        if self.epsilon < T::one() {
            atoms.push((T::zero(), T::one() - self.epsilon));
        }
        if self.epsilon > T::zero() {
            if self.mu == T::zero() {
                match atoms.first_mut() {
                    Some(a) => a.1 = T::one(),
                    None => atoms.push((T::zero(), T::one())),
                }
            } else {
                atoms.push((-self.mu, half));
                atoms.push((self.mu, half));
            }
        }
        DiscretePrior { atoms, symmetric: true }
    }
}

/// A finite probability measure on the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePrior<T> {
    atoms: Vec<(T, T)>,
    symmetric: bool,
}

impl<T: Real> DiscretePrior<T> {
    /// Builds a prior from `(location, weight)` pairs.
    ///
    /// Weights must be positive and sum to one within 1e-12. When
    /// `symmetric` is set the atoms must be closed under negation with equal
    /// weights.
    pub fn new(atoms: Vec<(T, T)>, symmetric: bool) -> Result<Self> {
        if atoms.is_empty() {
            return invalid("discrete prior needs at least one atom");
        }
        for &(x, w) in &atoms {
            if !x.is_finite() {
                return invalid(format!("atom location {x} is not finite"));
            }
            if !(w > T::zero()) {
                return invalid(format!("atom weight {w} must be positive"));
            }
        }
        let total: T = atoms.iter().map(|a| a.1).sum();
        if (total - T::one()).abs() > T::tol(WEIGHT_SUM_TOL) {
            return invalid(format!("atom weights sum to {total}, not 1"));
        }
        if symmetric {
            let tol = T::tol(WEIGHT_SUM_TOL);
            for &(x, w) in &atoms {
                let mirrored: T = atoms.iter().filter(|a| a.0 == -x).map(|a| a.1).sum();
                let here: T = atoms.iter().filter(|a| a.0 == x).map(|a| a.1).sum();
                if (mirrored - here).abs() > tol || mirrored == T::zero() {
                    return invalid(format!("atom {x} (weight {w}) has no matching mirror atom"));
                }
            }
        }
        Ok(Self { atoms, symmetric })
    }

    /// Symmetric prior with equal weights on `±locations` (a zero location
    /// contributes a single atom).
    pub fn symmetric_uniform(magnitudes: &[T]) -> Result<Self> {
        let mut atoms = Vec::new();
        let count: usize = magnitudes.iter().map(|&m| if m == T::zero() { 1 } else { 2 }).sum();
        let w = T::from_count(count).recip();
        for &m in magnitudes {
            if m == T::zero() {
                atoms.push((T::zero(), w));
            } else {
                atoms.push((-m.abs(), w));
                atoms.push((m.abs(), w));
            }
        }
        Self::new(atoms, true)
    }

    /// Point mass at zero.
    pub fn zero() -> Self {
        Self { atoms: vec![(T::zero(), T::one())], symmetric: true }
    }

    pub fn atoms(&self) -> &[(T, T)] {
        &self.atoms
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// E|X|^p for any p > 0.
    pub fn pth_moment(&self, p: T) -> T {
        self.atoms.iter().filter(|a| a.0 != T::zero()).map(|&(x, w)| w * x.abs().powf(p)).sum()
    }

    pub fn second_moment(&self) -> T {
        self.atoms.iter().map(|&(x, w)| w * x * x).sum()
    }

    /// sup_t t^p · P{|X| ≥ t}, the weak-ℓp quasi-norm raised to p.
    pub fn weak_pth_moment(&self, p: T) -> T {
        let mut mags: Vec<(T, T)> = self.atoms.iter().map(|&(x, w)| (x.abs(), w)).collect();
        mags.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite"));
        let mut tail = T::zero();
        let mut best = T::zero();
        for (m, w) in mags {
            tail = tail + w;
            if m > T::zero() {
                best = best.max(m.powf(p) * tail);
            }
        }
        best
    }

    pub fn scaled(&self, a: T) -> Self {
        let mut atoms: Vec<(T, T)> = self.atoms.iter().map(|&(x, w)| (x * a, w)).collect();
        if a < T::zero() {
            atoms.reverse();
        }
        Self { atoms, symmetric: self.symmetric }
    }
}

impl<T: Real> From<ThreePointPrior<T>> for DiscretePrior<T> {
    fn from(p: ThreePointPrior<T>) -> Self {
        p.to_discrete()
    }
}

/// The most dispersed law in the weak-ℓp ball of radius ξ: symmetric, with
/// P{|X| ≥ t} = (ξ/t)^p for t ≥ ξ and no mass inside (−ξ, ξ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakLpPrior<T> {
    p: T,
    xi: T,
}

impl<T: Real> WeakLpPrior<T> {
    pub fn new(p: T, xi: T) -> Result<Self> {
        if !(p > T::zero() && p <= T::one()) {
            return invalid(format!("weak-lp exponent {p} outside (0, 1]"));
        }
        if !(xi > T::zero()) || !xi.is_finite() {
            return invalid(format!("weak-lp radius {xi} must be positive"));
        }
        Ok(Self { p, xi })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn xi(&self) -> T {
        self.xi
    }

    /// F(x) = ½ + ½H(|x|) for x ≥ 0 and ½ − ½H(|x|) for x < 0, so that
    /// F(t) − F(−t) = H(t).
    pub fn cdf(&self, x: T) -> T {
        let h = crate::weak_lp::envelope(self.p, self.xi, x.abs());
        let half = T::lit(0.5);
        if x >= T::zero() {
            half + half * h
        } else {
            half - half * h
        }
    }

    /// P{|X| ≥ t}.
    pub fn tail(&self, t: T) -> T {
        if t <= self.xi {
            T::one()
        } else {
            (self.xi / t).powf(self.p)
        }
    }

    /// Magnitude at uniform quantile `u ∈ (0, 1]`: ξ·u^{−1/p}.
    pub fn magnitude_at(&self, u: T) -> T {
        self.xi * u.powf(-self.p.recip())
    }

    pub fn scaled(&self, a: T) -> Self {
        Self { p: self.p, xi: self.xi * a.abs() }
    }
}

/// Any signal law the state-evolution machinery accepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prior<T> {
    Discrete(DiscretePrior<T>),
    WeakLp(WeakLpPrior<T>),
}

impl<T: Real> Prior<T> {
    pub fn scaled(&self, a: T) -> Self {
        match self {
            Prior::Discrete(d) => Prior::Discrete(d.scaled(a)),
            Prior::WeakLp(w) => Prior::WeakLp(w.scaled(a)),
        }
    }

    /// A scale for the signal used to seed upper brackets. The weak law has
    /// infinite second moment for p ≤ 1, so its radius stands in.
    pub fn scale_hint(&self) -> T {
        match self {
            Prior::Discrete(d) => d.second_moment(),
            Prior::WeakLp(w) => w.xi() * w.xi(),
        }
    }
}

impl<T: Real> From<DiscretePrior<T>> for Prior<T> {
    fn from(d: DiscretePrior<T>) -> Self {
        Prior::Discrete(d)
    }
}

impl<T: Real> From<ThreePointPrior<T>> for Prior<T> {
    fn from(t: ThreePointPrior<T>) -> Self {
        Prior::Discrete(t.to_discrete())
    }
}

impl<T: Real> From<WeakLpPrior<T>> for Prior<T> {
    fn from(w: WeakLpPrior<T>) -> Self {
        Prior::WeakLp(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_mass_is_exact() {
        let t = ThreePointPrior::new(0.3_f64, 2.0).unwrap();
        let d = t.to_discrete();
        let s: f64 = d.atoms().iter().map(|a| a.1).sum();
        assert_eq!(s, 1.0);
        assert!(d.is_symmetric());
    }

    #[test]
    fn saturated_hits_constraint() {
        let t = ThreePointPrior::saturated(0.5_f64, 0.2, 0.01).unwrap();
        assert!((t.pth_moment(0.5) - 0.2_f64.powf(0.5)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_priors() {
        assert!(ThreePointPrior::new(1.5_f64, 1.0).is_err());
        assert!(ThreePointPrior::new(0.5_f64, -1.0).is_err());
        assert!(DiscretePrior::new(vec![(1.0_f64, 0.5)], false).is_err());
        assert!(DiscretePrior::new(vec![(1.0_f64, 0.5), (-2.0, 0.5)], true).is_err());
        assert!(DiscretePrior::new(vec![(1.0_f64, 1.5), (-1.0, -0.5)], false).is_err());
        assert!(WeakLpPrior::new(1.5_f64, 1.0).is_err());
    }

    #[test]
    fn weak_moment_of_discrete() {
        let d = DiscretePrior::new(vec![(0.0_f64, 0.5), (1.0, 0.25), (-4.0, 0.25)], false).unwrap();
        // t=4: 4 * 0.25 = 1; t=1: 1 * 0.5 = 0.5.
        assert_eq!(d.weak_pth_moment(1.0), 1.0);
    }

    #[test]
    fn weak_cdf_shape() {
        let w = WeakLpPrior::new(1.0_f64, 1.0).unwrap();
        assert_eq!(w.cdf(0.5), 0.5);
        assert_eq!(w.cdf(-0.5), 0.5);
        assert_eq!(w.cdf(2.0), 0.75);
        assert_eq!(w.cdf(-2.0), 0.25);
        assert_eq!(w.cdf(2.0) - w.cdf(-2.0), 0.5);
        assert_eq!(w.tail(4.0), 0.25);
    }
}
