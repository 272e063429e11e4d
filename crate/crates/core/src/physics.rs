//! Perfect gas closure, transport coefficients, gravity and the two penalty
//! source terms.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{SolidMask, TorusGrid, ORIGIN_CUTOFF};
use crate::real::Real;

/// Perfect gas with `p = rho theta`, `e = c_v theta`, `c_v = 1 / (gamma - 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasModel<T> {
    gamma: T,
    cv: T,
}

impl<T: Real> GasModel<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if !(gamma > T::one()) || !gamma.is_finite() {
            return Err(Error::invalid(format!("adiabatic exponent must exceed 1, got {gamma}")));
        }
        Ok(Self {
            gamma,
            cv: T::one() / (gamma - T::one()),
        })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn cv(&self) -> T {
        self.cv
    }

    pub fn pressure(&self, rho: T, theta: T) -> Result<T> {
        positive("rho", rho)?;
        positive("theta", theta)?;
        Ok(rho * theta)
    }

    pub fn internal_energy(&self, theta: T) -> Result<T> {
        positive("theta", theta)?;
        Ok(self.cv * theta)
    }

    /// `s = c_v log(theta) - log(rho)`.
    pub fn entropy(&self, rho: T, theta: T) -> Result<T> {
        positive("rho", rho)?;
        positive("theta", theta)?;
        Ok(self.entropy_unchecked(rho, theta))
    }

    #[inline]
    pub fn entropy_unchecked(&self, rho: T, theta: T) -> T {
        self.cv * theta.ln() - rho.ln()
    }

    /// Temperature from density and internal energy density `rho e`.
    #[inline]
    pub fn theta_from_conserved(&self, rho: T, rho_e: T) -> T {
        rho_e / (self.cv * rho)
    }

    /// `theta_0 = exp[(gamma - 1)(S_0 / rho_0 + log rho_0)]` for total entropy `S_0 = rho_0 s_0`.
    pub fn theta_from_entropy_data(&self, rho0: T, total_entropy: T) -> Result<T> {
        positive("rho0", rho0)?;
        Ok(((self.gamma - T::one()) * (total_entropy / rho0 + rho0.ln())).exp())
    }

    /// Squared sound speed `gamma theta`.
    pub fn sound_speed_sq(&self, theta: T) -> T {
        self.gamma * theta
    }
}

fn positive<T: Real>(quantity: &'static str, value: T) -> Result<()> {
    if value > T::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            quantity,
            value: value.as_f64(),
        })
    }
}

/// Constant viscosities and heat conductivity. `lambda` is stored as given;
/// it relates to the bulk viscosity through `lambda = eta - 2 mu / d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportCoeffs<T> {
    pub mu: T,
    pub lambda: T,
    pub kappa: T,
}

impl<T: Real> TransportCoeffs<T> {
    pub fn new(mu: T, lambda: T, kappa: T) -> Result<Self> {
        if !(mu > T::zero()) || !(kappa > T::zero()) || !lambda.is_finite() {
            return Err(Error::invalid("transport coefficients need mu > 0, kappa > 0, finite lambda"));
        }
        Ok(Self { mu, lambda, kappa })
    }
}

/// Penalty parameter, relaxation exponent, solid mask and the extended
/// boundary temperature.
#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyConfig<T> {
    pub epsilon: T,
    pub k: u32,
    pub mask: SolidMask,
    pub theta_b: ScalarField<T>,
}

impl<T: Real> PenaltyConfig<T> {
    pub fn new(epsilon: T, k: u32, mask: SolidMask, theta_b: ScalarField<T>) -> Result<Self> {
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::invalid(format!("penalty parameter must be positive, got {epsilon}")));
        }
        if k < 1 {
            return Err(Error::invalid("penalty exponent k must be at least 1"));
        }
        if mask.len() != theta_b.len() {
            return Err(Error::invalid("mask and boundary temperature sizes differ"));
        }
        if let Some(idx) = (0..mask.len()).find(|&i| mask.is_solid(i) && !(theta_b[i] > T::zero())) {
            return Err(Error::invalid(format!("boundary temperature not positive at solid cell {idx}")));
        }
        Ok(Self {
            epsilon,
            k,
            mask,
            theta_b,
        })
    }

    /// `-(1/eps) |theta - theta_B|^k (theta - theta_B)` for one cell, ignoring the mask.
    #[inline]
    pub fn heat_relaxation(&self, theta: T, theta_b: T) -> T {
        let d = theta - theta_b;
        -(d.abs().powi(self.k as i32) * d) / self.epsilon
    }
}

/// Momentum source `-(1/eps) 1_solid u`; exactly zero on fluid cells.
pub fn friction_penalty<T: Real>(u: &VectorField<T>, cfg: &PenaltyConfig<T>) -> VectorField<T> {
    let eps = cfg.epsilon;
    u.map_comp(|c| {
        ScalarField::from_fn(c.len(), |k| {
            if cfg.mask.is_solid(k) {
                -c[k] / eps
            } else {
                T::zero()
            }
        })
    })
}

/// Internal energy source `-(1/eps) 1_solid |theta - theta_B|^k (theta - theta_B)`.
pub fn heat_penalty<T: Real>(theta: &ScalarField<T>, cfg: &PenaltyConfig<T>) -> ScalarField<T> {
    ScalarField::from_fn(theta.len(), |k| {
        if cfg.mask.is_solid(k) {
            cfg.heat_relaxation(theta[k], cfg.theta_b[k])
        } else {
            T::zero()
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GravitySpec<T> {
    None,
    /// `g(x) = -magnitude x / |x|`.
    CentralPull(T),
}

impl<T: Real> GravitySpec<T> {
    pub fn at(&self, x: [T; 2]) -> [T; 2] {
        match *self {
            GravitySpec::None => [T::zero(), T::zero()],
            GravitySpec::CentralPull(g) => {
                let r = x[0].hypot(x[1]);
                if r < T::lit(ORIGIN_CUTOFF) {
                    [T::zero(), T::zero()]
                } else {
                    [-g * x[0] / r, -g * x[1] / r]
                }
            }
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, GravitySpec::None)
    }
}

/// Gravity sampled at cell centers.
pub fn gravity_field<T: Real>(grid: &TorusGrid<T>, spec: &GravitySpec<T>) -> VectorField<T> {
    VectorField::from_fn(grid.len(), |k| spec.at(grid.center_of(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> GasModel<f64> {
        GasModel::new(1.4).unwrap()
    }

    fn one_cell(solid: bool, eps: f64, theta_b: f64) -> PenaltyConfig<f64> {
        PenaltyConfig::new(
            eps,
            6,
            SolidMask::from_flags(vec![solid]),
            ScalarField::constant(1, theta_b),
        )
        .unwrap()
    }

    #[test]
    fn perfect_gas_values() {
        let g = gas();
        assert!((g.cv() - 2.5).abs() < 1e-15);
        assert_eq!(g.pressure(1.0, 1.0).unwrap(), 1.0);
        assert!((g.internal_energy(1.0).unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(g.entropy(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(g.pressure(2.0, 3.0).unwrap(), 6.0);
        assert!((g.internal_energy(3.0).unwrap() - 7.5).abs() < 1e-14);
        let s = g.entropy(2.0, 3.0).unwrap();
        assert!((s - (2.5 * 3f64.ln() - 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn nonpositive_states_are_domain_errors() {
        let g = gas();
        assert!(matches!(g.pressure(0.0, 1.0), Err(Error::Domain { quantity: "rho", .. })));
        assert!(g.entropy(1.0, -1.0).is_err());
        assert!(g.internal_energy(f64::NAN).is_err());
        assert!(g.theta_from_entropy_data(0.0, 1.0).is_err());
        assert!(GasModel::new(1.0).is_err());
    }

    #[test]
    fn temperature_from_entropy_data() {
        let g = gas();
        assert!((g.theta_from_entropy_data(1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let t = g.theta_from_entropy_data(1.0, g.cv() * 2f64.ln()).unwrap();
        assert!((t - 2.0).abs() < 1e-14);
    }

    #[test]
    fn thermodynamic_consistency() {
        let g = gas();
        for (rho, theta) in [(0.01, 30.0), (1.0, 1.0), (2.5, 0.2)] {
            let rho_e = rho * g.internal_energy(theta).unwrap();
            let p = g.pressure(rho, theta).unwrap();
            assert!((p - (g.gamma() - 1.0) * rho_e).abs() <= 1e-14 * p);
            let back = g.theta_from_conserved(rho, rho_e);
            assert!((back - theta).abs() <= 4.0 * f64::EPSILON * theta);
        }
    }

    #[test]
    fn friction_examples() {
        let u = VectorField::constant(1, [1.0, 0.0]);
        let f = friction_penalty(&u, &one_cell(true, 0.1, 1.0));
        assert_eq!(f.at(0), [-10.0, -0.0]);
        let f = friction_penalty(&u, &one_cell(false, 0.1, 1.0));
        assert_eq!(f.at(0), [0.0, 0.0]);
        let u3 = u.scale(3.0);
        let f3 = friction_penalty(&u3, &one_cell(true, 0.1, 1.0));
        assert_eq!(f3.at(0)[0], 3.0 * -10.0);
    }

    #[test]
    fn heat_penalty_examples() {
        let cfg = one_cell(true, 0.1, 1.0);
        assert_eq!(heat_penalty(&ScalarField::constant(1, 2.0), &cfg)[0], -10.0);
        assert_eq!(heat_penalty(&ScalarField::constant(1, 1.0), &cfg)[0], 0.0);
        assert!(heat_penalty(&ScalarField::constant(1, 0.5), &cfg)[0] > 0.0);
        let fluid = one_cell(false, 0.1, 1.0);
        assert_eq!(heat_penalty(&ScalarField::constant(1, 7.0), &fluid)[0].to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn heat_relaxation_does_not_overshoot() {
        let g = gas();
        let cfg = one_cell(true, 1e-2, 1.0);
        for &(theta, rho) in &[(3.0, 1.0), (0.2, 0.01), (1.5, 0.5), (1.0 - 0.9, 2.0)] {
            let d: f64 = theta - 1.0;
            let bound = cfg.epsilon * g.cv() * rho / d.abs().powi(6);
            let dt = 0.9 * bound;
            let next = theta + dt / (g.cv() * rho) * cfg.heat_relaxation(theta, 1.0);
            assert!((next - 1.0).abs() < d.abs());
            assert!((next - 1.0) * d >= 0.0, "overshoot at theta={theta}");
        }
    }

    #[test]
    fn gravity_examples() {
        let g = GravitySpec::CentralPull(100.0f64);
        let v = g.at([0.3, 0.4]);
        assert!((v[0] + 60.0).abs() < 1e-12 && (v[1] + 80.0).abs() < 1e-12);
        assert_eq!(g.at([0.0, 0.0]), [0.0, 0.0]);
        assert_eq!(GravitySpec::None.at([0.3, 0.4]), [0.0, 0.0]);
        let grid = TorusGrid::<f64>::new(9).unwrap();
        let f = gravity_field(&grid, &g);
        for k in 0..grid.len() {
            let m = f.at(k);
            let c = grid.center_of(k);
            if c[0].hypot(c[1]) > ORIGIN_CUTOFF {
                assert!((m[0].hypot(m[1]) - 100.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn penalty_config_validation() {
        let mask = SolidMask::from_flags(vec![true]);
        assert!(PenaltyConfig::new(0.0, 6, mask.clone(), ScalarField::constant(1, 1.0)).is_err());
        assert!(PenaltyConfig::new(0.1, 0, mask.clone(), ScalarField::constant(1, 1.0)).is_err());
        assert!(PenaltyConfig::new(0.1, 6, mask, ScalarField::constant(1, 0.0)).is_err());
    }
}
