//! The four ring/star experiments plus a uniform equilibrium configuration.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{build_mask, DomainSpec, SolidMask, TorusGrid, ORIGIN_CUTOFF};
use crate::physics::{GasModel, GravitySpec, PenaltyConfig, TransportCoeffs};
use crate::real::Real;
use crate::solver::{RunOutput, RunParams, Solver, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioKind {
    Exp1,
    Exp2,
    Exp3,
    Exp4,
    /// Uniform `rho = 1, u = 0, theta = 1` on the ring mask.
    Equilibrium,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::Exp1,
        ScenarioKind::Exp2,
        ScenarioKind::Exp3,
        ScenarioKind::Exp4,
        ScenarioKind::Equilibrium,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Exp1 => "exp1",
            ScenarioKind::Exp2 => "exp2",
            ScenarioKind::Exp3 => "exp3",
            ScenarioKind::Exp4 => "exp4",
            ScenarioKind::Equilibrium => "equilibrium",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown experiment `{s}`")))
    }
}

/// Density used outside the fluid domain in the initial data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OutsideDensity {
    Constant,
    Small,
}

impl OutsideDensity {
    pub fn value<T: Real>(self) -> T {
        match self {
            OutsideDensity::Constant => T::one(),
            OutsideDensity::Small => T::lit(0.01),
        }
    }
}

/// Primitive variables at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Primitive<T> {
    pub rho: T,
    pub u: [T; 2],
    pub theta: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario<T> {
    pub kind: ScenarioKind,
    pub domain: DomainSpec<T>,
    pub gravity: GravitySpec<T>,
    pub t_final: T,
    pub outside_density: OutsideDensity,
}

fn ring<T: Real>() -> DomainSpec<T> {
    DomainSpec::Annulus {
        inner: T::lit(0.2),
        outer: T::lit(0.7),
    }
}

/// `amplitude sin(4 pi (|x| - 0.2)) (x2, -x1) / |x|`.
fn swirl<T: Real>(x: [T; 2], amplitude: T) -> [T; 2] {
    let r = x[0].hypot(x[1]);
    if r < T::lit(ORIGIN_CUTOFF) {
        return [T::zero(), T::zero()];
    }
    let s = amplitude * (T::lit(4.0) * T::PI() * (r - T::lit(0.2))).sin();
    [s * x[1] / r, -s * x[0] / r]
}

fn at_rest<T: Real>(rho: f64, theta: f64) -> Primitive<T> {
    Primitive {
        rho: T::lit(rho),
        u: [T::zero(), T::zero()],
        theta: T::lit(theta),
    }
}

impl<T: Real> Scenario<T> {
    pub fn new(kind: ScenarioKind) -> Self {
        match kind {
            ScenarioKind::Exp1 => experiment1(),
            ScenarioKind::Exp2 => experiment2(),
            ScenarioKind::Exp3 => experiment3(),
            ScenarioKind::Exp4 => experiment4(),
            ScenarioKind::Equilibrium => equilibrium(),
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Exact initial data at point `x`.
    pub fn initial(&self, x: [T; 2]) -> Primitive<T> {
        let r = x[0].hypot(x[1]);
        let (r_in, r_out) = (T::lit(0.2), T::lit(0.7));
        let in_ring = r >= r_in && r < r_out;
        let swirl_state = |amp: f64, theta: T| Primitive {
            rho: T::one(),
            u: swirl(x, T::lit(amp)),
            theta,
        };
        let ring_theta = T::lit(0.2) + T::lit(4.0) * r;
        match self.kind {
            ScenarioKind::Exp1 | ScenarioKind::Exp2 => {
                let outside = self.outside_density.value::<T>().as_f64();
                if r < r_in {
                    at_rest(outside, 1.0)
                } else if in_ring {
                    swirl_state(1.0, ring_theta)
                } else {
                    at_rest(outside, 3.0)
                }
            }
            ScenarioKind::Exp3 => {
                if r < r_in {
                    at_rest(0.01, 1.0)
                } else if in_ring {
                    swirl_state(1.0, ring_theta)
                } else if !self.domain.is_solid(x) {
                    at_rest(1.0, 3.0)
                } else {
                    at_rest(0.01, 3.0)
                }
            }
            ScenarioKind::Exp4 => {
                if r < r_in {
                    at_rest(0.01, 30.0)
                } else if in_ring {
                    swirl_state(5.0, T::lit(41.6) - T::lit(58.0) * r)
                } else {
                    at_rest(0.01, 1.0)
                }
            }
            ScenarioKind::Equilibrium => at_rest(1.0, 1.0),
        }
    }

    pub fn mask(&self, grid: &TorusGrid<T>) -> SolidMask {
        build_mask(grid, &self.domain)
    }

    /// Extended boundary temperature: the initial temperature at every cell
    /// center. Only solid cells are ever read.
    pub fn theta_b(&self, grid: &TorusGrid<T>) -> ScalarField<T> {
        ScalarField::from_fn(grid.len(), |k| self.initial(grid.center_of(k)).theta)
    }

    /// Point-value projection of the initial data onto cell centers.
    pub fn project_initial(&self, grid: &TorusGrid<T>, gas: &GasModel<T>) -> Result<State<T>> {
        let n = grid.len();
        let samples: Vec<Primitive<T>> = (0..n).map(|k| self.initial(grid.center_of(k))).collect();
        if let Some(k) = samples
            .iter()
            .position(|p| !(p.rho > T::zero() && p.theta > T::zero()))
        {
            return Err(Error::InvalidScenario(format!(
                "{}: nonpositive initial data at cell {k}",
                self.name()
            )));
        }
        let rho = ScalarField::from_fn(n, |k| samples[k].rho);
        let u = VectorField::from_fn(n, |k| samples[k].u);
        let theta = ScalarField::from_fn(n, |k| samples[k].theta);
        Ok(State::from_primitive(gas, rho, &u, &theta))
    }

    /// Full solver parameters for this scenario on `grid`.
    pub fn run_params(&self, grid: &TorusGrid<T>, settings: &RunSettings<T>) -> Result<RunParams<T>> {
        self.domain.validate()?;
        let penalty = PenaltyConfig::new(settings.epsilon, settings.k, self.mask(grid), self.theta_b(grid))?;
        Ok(RunParams {
            dt: settings.dt,
            t_final: settings.t_final.unwrap_or(self.t_final),
            alpha: settings.alpha,
            gas: settings.gas,
            transport: settings.transport,
            penalty,
            gravity: self.gravity,
            diag_every: settings.diag_every,
            workers: settings.workers,
        })
    }
}

/// Scenario-independent run settings.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSettings<T> {
    pub epsilon: T,
    pub k: u32,
    pub dt: T,
    /// Overrides the scenario's final time when set.
    pub t_final: Option<T>,
    pub alpha: T,
    pub gas: GasModel<T>,
    pub transport: TransportCoeffs<T>,
    pub diag_every: usize,
    pub workers: usize,
}

impl<T: Real> RunSettings<T> {
    /// Default coefficients: `mu = lambda = kappa = 0.001`, `gamma = 1.4`,
    /// `k = 6`, `alpha = 0.6`.
    pub fn standard(epsilon: T, dt: T, t_final: Option<T>) -> Self {
        let c = T::lit(0.001);
        Self {
            epsilon,
            k: 6,
            dt,
            t_final,
            alpha: T::lit(0.6),
            gas: GasModel::new(T::lit(1.4)).expect("valid gamma"),
            transport: TransportCoeffs::new(c, c, c).expect("valid coefficients"),
            diag_every: 10,
            workers: 1,
        }
    }
}

/// Projects the initial data and runs the scenario to its final time.
pub fn run<T: Real>(scenario: &Scenario<T>, grid: &TorusGrid<T>, settings: &RunSettings<T>) -> Result<RunOutput<T>> {
    let params = scenario.run_params(grid, settings)?;
    let initial = scenario.project_initial(grid, &params.gas)?;
    Solver::new(grid.clone(), params)?.run(initial)
}

/// Ring domain, unit density everywhere, no gravity, `T = 0.1`.
pub fn experiment1<T: Real>() -> Scenario<T> {
    Scenario {
        kind: ScenarioKind::Exp1,
        domain: ring(),
        gravity: GravitySpec::None,
        t_final: T::lit(0.1),
        outside_density: OutsideDensity::Constant,
    }
}

/// As experiment 1 with density 0.01 in both solid regions.
pub fn experiment2<T: Real>() -> Scenario<T> {
    Scenario {
        kind: ScenarioKind::Exp2,
        outside_density: OutsideDensity::Small,
        ..experiment1()
    }
}

/// Star-shaped outer boundary with eight lobes of amplitude 0.05.
pub fn experiment3<T: Real>() -> Scenario<T> {
    Scenario {
        kind: ScenarioKind::Exp3,
        domain: DomainSpec::StarAnnulus {
            inner: T::lit(0.2),
            base: T::lit(0.7),
            delta: T::lit(0.05),
            lobes: 8,
        },
        gravity: GravitySpec::None,
        t_final: T::lit(0.1),
        outside_density: OutsideDensity::Small,
    }
}

/// Hot inner disc, stronger swirl and a central pull of magnitude 100, `T = 0.2`.
pub fn experiment4<T: Real>() -> Scenario<T> {
    Scenario {
        kind: ScenarioKind::Exp4,
        domain: ring(),
        gravity: GravitySpec::CentralPull(T::lit(100.0)),
        t_final: T::lit(0.2),
        outside_density: OutsideDensity::Small,
    }
}

pub fn equilibrium<T: Real>() -> Scenario<T> {
    Scenario {
        kind: ScenarioKind::Equilibrium,
        domain: ring(),
        gravity: GravitySpec::None,
        t_final: T::lit(0.1),
        outside_density: OutsideDensity::Constant,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn experiment1_branches() {
        let s = experiment1::<f64>();
        assert_eq!(s.initial([0.0, 0.0]), at_rest(1.0, 1.0));
        let mid = s.initial([0.45, 0.0]);
        assert!(close(mid.theta, 2.0));
        assert!(mid.u[0].abs() < 1e-15 && mid.u[1].abs() < 1e-15);
        assert_eq!(s.initial([0.9, 0.0]), at_rest(1.0, 3.0));
        assert_eq!(s.t_final, 0.1);
    }

    #[test]
    fn experiment2_branches() {
        let s = experiment2::<f64>();
        assert_eq!(s.initial([0.0, 0.0]), at_rest(0.01, 1.0));
        assert_eq!(s.initial([0.45, 0.0]), experiment1::<f64>().initial([0.45, 0.0]));
        assert_eq!(s.initial([0.9, 0.0]), at_rest(0.01, 3.0));
    }

    #[test]
    fn experiment3_branches() {
        let s = experiment3::<f64>();
        assert_eq!(s.initial([0.73, 0.0]), at_rest(1.0, 3.0));
        assert_eq!(s.initial([0.45, 0.0]), experiment1::<f64>().initial([0.45, 0.0]));
        assert_eq!(s.initial([0.95, 0.0]), at_rest(0.01, 3.0));
        assert_eq!(s.initial([0.1, 0.0]), at_rest(0.01, 1.0));
        assert!(!s.domain.is_solid([0.73, 0.0]));
    }

    #[test]
    fn experiment4_branches() {
        let s = experiment4::<f64>();
        assert!(close(s.initial([0.2, 0.0]).theta, 30.0));
        assert!(close(41.6 - 58.0 * 0.7, 1.0));
        assert!((s.initial([0.0, 0.699_999_999_999]).theta - 1.0).abs() < 1e-9);
        assert_eq!(s.initial([0.1, 0.0]), at_rest(0.01, 30.0));
        assert_eq!(s.initial([0.8, 0.0]), at_rest(0.01, 1.0));
        let mid = s.initial([0.45, 0.0]);
        assert!(mid.u[1].abs() < 1e-14);
        // amplitude 5 at the swirl maximum |x| = 0.325
        let peak = s.initial([0.325, 0.0]);
        assert!(close(peak.u[1], -5.0));
        assert_eq!(s.t_final, 0.2);
        assert_eq!(s.gravity, GravitySpec::CentralPull(100.0));
    }

    #[test]
    fn swirl_vanishes_on_nodal_radii() {
        let s = experiment1::<f64>();
        for r in [0.2, 0.45, 0.7 - 1e-15] {
            for phi in [0.3f64, 1.7, 4.0] {
                let p = s.initial([r * phi.cos(), r * phi.sin()]);
                assert!(p.u[0].hypot(p.u[1]) < 1e-13, "r={r}");
            }
        }
    }

    #[test]
    fn theta_b_follows_initial_data() {
        let g = TorusGrid::<f64>::new(20).unwrap();
        let tb = experiment1::<f64>().theta_b(&g);
        // cell (10,10) has center (0.05, 0.05), inside the inner disc
        assert_eq!(tb[g.index(10, 10)], 1.0);
        let tb4 = experiment4::<f64>().theta_b(&g);
        assert_eq!(tb4[g.index(19, 10)], 1.0);
    }

    #[test]
    fn projections_are_positive() {
        let gas = GasModel::new(1.4).unwrap();
        for kind in ScenarioKind::ALL {
            let g = TorusGrid::<f64>::new(24).unwrap();
            let st = Scenario::new(kind).project_initial(&g, &gas).unwrap();
            assert!(st.rho.values.iter().all(|&r| r > 0.0));
            assert!(st.temperature(&gas).values.iter().all(|&t| t > 0.0));
        }
    }

    #[test]
    fn projected_masses() {
        let gas = GasModel::new(1.4).unwrap();
        let g = TorusGrid::<f64>::new(160).unwrap();
        let s1 = experiment1::<f64>().project_initial(&g, &gas).unwrap();
        assert!((s1.rho.integrate(g.cell_volume()) - 4.0).abs() < 1e-12);

        let e2 = experiment2::<f64>();
        let s2 = e2.project_initial(&g, &gas).unwrap();
        let mask = e2.mask(&g);
        let fluid = crate::grid::fluid_volume(&mask, &g);
        let expected = 0.01 * (4.0 - fluid) + fluid;
        assert!((s2.rho.integrate(g.cell_volume()) - expected).abs() < 1e-11);
    }

    #[test]
    fn annulus_scenarios_have_rotation_symmetry() {
        let g = TorusGrid::<f64>::new(16).unwrap();
        let gas = GasModel::new(1.4).unwrap();
        for kind in [ScenarioKind::Exp1, ScenarioKind::Exp4] {
            let st = Scenario::new(kind).project_initial(&g, &gas).unwrap();
            let theta = st.temperature(&gas);
            let n = g.n();
            for j in 0..n {
                for i in 0..n {
                    // rotation by 90 degrees: (x, y) -> (-y, x)
                    let a = g.index(i, j);
                    let b = g.index(n - 1 - j, i);
                    assert!((st.rho[a] - st.rho[b]).abs() < 1e-14);
                    assert!((theta[a] - theta[b]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for kind in ScenarioKind::ALL {
            assert_eq!(kind.name().parse::<ScenarioKind>().unwrap(), kind);
        }
        assert!("exp5".parse::<ScenarioKind>().is_err());
    }
}
