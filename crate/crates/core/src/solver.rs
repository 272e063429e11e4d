//! Semi-discrete penalized Navier-Stokes-Fourier right-hand side, forward
//! Euler stepping and run-time diagnostics.

use log::warn;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::TorusGrid;
use crate::operators::{
    div, div_tensor, grad, sym_grad, upwind_div_with_faces, upwind_viscosity, FaceVelocity,
};
use crate::physics::{friction_penalty, gravity_field, heat_penalty, GasModel, GravitySpec, PenaltyConfig, TransportCoeffs};
use crate::real::{pairwise_sum, Real};

/// Threshold above which a stability advisory is reported.
pub const ADVISORY_LIMIT: f64 = 0.5;

/// Conserved unknowns; velocity, temperature and pressure are derived on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct State<T> {
    pub rho: ScalarField<T>,
    pub mom: VectorField<T>,
    pub rho_e: ScalarField<T>,
}

impl<T: Real> State<T> {
    pub fn from_primitive(
        gas: &GasModel<T>,
        rho: ScalarField<T>,
        u: &VectorField<T>,
        theta: &ScalarField<T>,
    ) -> Self {
        let mom = u.map_comp(|c| c.zip_map(&rho, |a, r| r * a));
        let cv = gas.cv();
        let rho_e = rho.zip_map(theta, |r, t| cv * r * t);
        Self { rho, mom, rho_e }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn velocity(&self) -> VectorField<T> {
        self.mom.map_comp(|c| c.zip_map(&self.rho, |m, r| m / r))
    }

    pub fn temperature(&self, gas: &GasModel<T>) -> ScalarField<T> {
        self.rho_e.zip_map(&self.rho, |re, r| gas.theta_from_conserved(r, re))
    }

    pub fn pressure(&self, gas: &GasModel<T>) -> ScalarField<T> {
        let theta = self.temperature(gas);
        self.rho.zip_map(&theta, |r, t| r * t)
    }
}

/// Time derivatives of the conserved fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Tendency<T> {
    pub d_rho: ScalarField<T>,
    pub d_mom: VectorField<T>,
    pub d_rho_e: ScalarField<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunParams<T> {
    pub dt: T,
    pub t_final: T,
    /// Exponent of the artificial viscosity `h^alpha` in the upwind flux.
    pub alpha: T,
    pub gas: GasModel<T>,
    pub transport: TransportCoeffs<T>,
    pub penalty: PenaltyConfig<T>,
    pub gravity: GravitySpec<T>,
    /// Diagnostics are recorded every `diag_every` steps and at the final step.
    pub diag_every: usize,
    /// Rayon worker count for the cell loops; results do not depend on it.
    pub workers: usize,
}

impl<T: Real> RunParams<T> {
    pub fn validate(&self, grid: &TorusGrid<T>) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::invalid("time step must be positive"));
        }
        if !(self.t_final >= T::zero()) || !self.t_final.is_finite() {
            return Err(Error::invalid("final time must be nonnegative"));
        }
        if !(self.alpha > T::zero() && self.alpha < T::one()) {
            return Err(Error::invalid("flux exponent alpha must lie in (0, 1)"));
        }
        if self.penalty.mask.len() != grid.len() || self.penalty.theta_b.len() != grid.len() {
            return Err(Error::invalid("penalty fields do not match the grid"));
        }
        if self.diag_every == 0 {
            return Err(Error::invalid("diag_every must be at least 1"));
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_final`, the last one possibly shorter.
    pub fn step_count(&self) -> usize {
        step_count(self.t_final, self.dt)
    }
}

pub fn step_count<T: Real>(t_final: T, dt: T) -> usize {
    if !(t_final > T::zero()) {
        return 0;
    }
    let q = (t_final / dt).as_f64();
    let nearest = q.round();
    if nearest >= 1.0 && (q - nearest).abs() <= 1e-9 * q {
        nearest as usize
    } else {
        q.ceil() as usize
    }
}

/// Global monitors of one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics<T> {
    pub total_mass: T,
    pub total_momentum: [T; 2],
    /// `sum |K| (rho |u|^2 / 2 + rho e)`.
    pub total_energy: T,
    /// `sum |K| (rho |u|^2 / 2 + rho e - theta_B rho s)`.
    pub ballistic_energy: T,
    /// `sum_solid |K| |u|^2`.
    pub solid_kinetic: T,
    /// `sum_solid |K| |theta - theta_B|^(k+2) / theta`.
    pub solid_theta_mismatch: T,
}

/// Explicit-Euler stability numbers, maximized over cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Advisory<T> {
    /// `(|u| + sqrt(gamma theta)) dt / h`.
    pub advective: T,
    /// `max(2 mu, kappa / c_v) dt / (rho h^2)`.
    pub diffusive: T,
    /// `dt max(1 / rho, |theta - theta_B|^k / (c_v rho)) / eps` over solid cells.
    pub penalty: T,
}

impl<T: Real> Advisory<T> {
    pub fn exceeded(&self) -> Vec<(&'static str, T)> {
        let lim = T::lit(ADVISORY_LIMIT);
        [
            ("advective", self.advective),
            ("diffusive", self.diffusive),
            ("penalty", self.penalty),
        ]
        .into_iter()
        .filter(|&(_, v)| !(v <= lim))
        .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRow<T> {
    pub step: usize,
    pub time: T,
    pub diagnostics: Diagnostics<T>,
    pub advisory: Advisory<T>,
}

#[derive(Clone, Debug)]
pub struct RunOutput<T> {
    pub final_state: State<T>,
    pub series: Vec<DiagnosticsRow<T>>,
    pub steps: usize,
    pub time: T,
    /// Right-endpoint time integral of `solid_kinetic` over the run.
    pub solid_kinetic_integral: T,
    pub warnings: Vec<String>,
}

/// Everything a step needs besides the state itself.
#[derive(Clone, Debug)]
pub struct Solver<T> {
    grid: TorusGrid<T>,
    params: RunParams<T>,
    gravity: Option<VectorField<T>>,
    viscosity: T,
}

impl<T: Real> Solver<T> {
    pub fn new(grid: TorusGrid<T>, params: RunParams<T>) -> Result<Self> {
        params.validate(&grid)?;
        let gravity = if params.gravity.is_none() {
            None
        } else {
            Some(gravity_field(&grid, &params.gravity))
        };
        let viscosity = upwind_viscosity(&grid, params.alpha);
        Ok(Self {
            grid,
            params,
            gravity,
            viscosity,
        })
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn params(&self) -> &RunParams<T> {
        &self.params
    }

    fn failure(&self, step: usize, time: T, idx: usize, quantity: &'static str, value: T, rho: T, theta: T) -> Error {
        let (i, j) = self.grid.coords(idx);
        Error::SchemeFailure {
            step,
            time: time.as_f64(),
            i,
            j,
            quantity,
            value: value.as_f64(),
            rho: rho.as_f64(),
            theta: theta.as_f64(),
        }
    }

    /// Rejects states with a nonpositive or non-finite density or temperature.
    pub fn check_positive(&self, state: &State<T>, step: usize, time: T) -> Result<()> {
        let gas = &self.params.gas;
        for k in 0..state.len() {
            let rho = state.rho[k];
            let theta = gas.theta_from_conserved(rho, state.rho_e[k]);
            let m = state.mom.at(k);
            if !(rho > T::zero()) || !rho.is_finite() {
                return Err(self.failure(step, time, k, "rho", rho, rho, theta));
            }
            if !(state.rho_e[k] > T::zero()) || !theta.is_finite() {
                return Err(self.failure(step, time, k, "rho_e", state.rho_e[k], rho, theta));
            }
            if !m[0].is_finite() || !m[1].is_finite() {
                return Err(self.failure(step, time, k, "momentum", m[0] + m[1], rho, theta));
            }
        }
        Ok(())
    }

    /// The three tendencies of the penalized scheme.
    pub fn compute_rhs(&self, state: &State<T>, step: usize, time: T) -> Result<Tendency<T>> {
        self.check_positive(state, step, time)?;
        let grid = &self.grid;
        let p = &self.params;
        let two = T::lit(2.0);
        let (mu, lambda, kappa) = (p.transport.mu, p.transport.lambda, p.transport.kappa);

        let u = state.velocity();
        let theta = state.temperature(&p.gas);
        let pressure = state.rho.zip_map(&theta, |r, t| r * t);
        let faces = FaceVelocity::new(grid, &u);

        // continuity
        let d_rho = upwind_div_with_faces(grid, &state.rho, &faces, self.viscosity).map(|x| -x);

        // momentum
        let div_u = div(grid, &u);
        let strain = sym_grad(grid, &u);
        let shear = div_tensor(grid, &strain.scale(mu));
        let bulk = grad(grid, &div_u.scale(lambda));
        let grad_p = grad(grid, &pressure);
        let friction = friction_penalty(&u, &p.penalty);
        let mut d_mom = VectorField::zeros(grid.len());
        for a in 0..2 {
            let conv = upwind_div_with_faces(grid, &state.mom.comp[a], &faces, self.viscosity);
            let out = &mut d_mom.comp[a].values;
            for k in 0..grid.len() {
                let body = match &self.gravity {
                    Some(g) => state.rho[k] * g.comp[a][k],
                    None => T::zero(),
                };
                out[k] = -conv[k] - grad_p.comp[a][k]
                    + two * shear.comp[a][k]
                    + bulk.comp[a][k]
                    + body
                    + friction.comp[a][k];
            }
        }

        // internal energy
        let conv_e = upwind_div_with_faces(grid, &state.rho_e, &faces, self.viscosity);
        let conduction = div(grid, &grad(grid, &theta).scale(kappa));
        let strain_sq = strain.frobenius_sq();
        let heat = heat_penalty(&theta, &p.penalty);
        let d_rho_e = ScalarField::from_fn(grid.len(), |k| {
            -conv_e[k] - pressure[k] * div_u[k]
                + conduction[k]
                + two * mu * strain_sq[k]
                + lambda * div_u[k] * div_u[k]
                + heat[k]
        });

        Ok(Tendency { d_rho, d_mom, d_rho_e })
    }

    /// One forward Euler step of length `dt` starting at `time`; `step` is the
    /// index of the step being taken (for error reports).
    pub fn euler_step(&self, state: &State<T>, dt: T, step: usize, time: T) -> Result<State<T>> {
        let tend = self.compute_rhs(state, step, time)?;
        let next = advance(state, &tend, dt);
        self.check_positive(&next, step, time + dt)?;
        Ok(next)
    }

    /// `sum |K| (rho g - friction)`, the only non-conservative momentum sources.
    pub fn momentum_sources(&self, state: &State<T>) -> [T; 2] {
        let vol = self.grid.cell_volume();
        let u = state.velocity();
        let friction = friction_penalty(&u, &self.params.penalty);
        let mut out = [T::zero(); 2];
        for (a, slot) in out.iter_mut().enumerate() {
            let terms: Vec<T> = (0..state.len())
                .map(|k| {
                    let body = match &self.gravity {
                        Some(g) => state.rho[k] * g.comp[a][k],
                        None => T::zero(),
                    };
                    vol * (body + friction.comp[a][k])
                })
                .collect();
            *slot = pairwise_sum(&terms);
        }
        out
    }

    pub fn solid_kinetic(&self, state: &State<T>) -> T {
        let vol = self.grid.cell_volume();
        let mask = &self.params.penalty.mask;
        let terms: Vec<T> = (0..state.len())
            .filter(|&k| mask.is_solid(k))
            .map(|k| {
                let r = state.rho[k];
                let (ux, uy) = (state.mom.comp[0][k] / r, state.mom.comp[1][k] / r);
                vol * (ux * ux + uy * uy)
            })
            .collect();
        pairwise_sum(&terms)
    }

    pub fn diagnostics(&self, state: &State<T>) -> Diagnostics<T> {
        let vol = self.grid.cell_volume();
        let gas = &self.params.gas;
        let pen = &self.params.penalty;
        let half = T::lit(0.5);
        let n = state.len();
        let u = state.velocity();
        let theta = state.temperature(gas);

        let kinetic: Vec<T> = (0..n)
            .map(|k| {
                let v = u.at(k);
                half * state.rho[k] * (v[0] * v[0] + v[1] * v[1])
            })
            .collect();
        let energy: Vec<T> = (0..n).map(|k| vol * (kinetic[k] + state.rho_e[k])).collect();
        let ballistic: Vec<T> = (0..n)
            .map(|k| {
                let s = gas.entropy_unchecked(state.rho[k], theta[k]);
                vol * (kinetic[k] + state.rho_e[k] - pen.theta_b[k] * state.rho[k] * s)
            })
            .collect();
        let mismatch: Vec<T> = (0..n)
            .filter(|&k| pen.mask.is_solid(k))
            .map(|k| vol * (theta[k] - pen.theta_b[k]).abs().powi(pen.k as i32 + 2) / theta[k])
            .collect();

        Diagnostics {
            total_mass: state.rho.integrate(vol),
            total_momentum: state.mom.integrate(vol),
            total_energy: pairwise_sum(&energy),
            ballistic_energy: pairwise_sum(&ballistic),
            solid_kinetic: self.solid_kinetic(state),
            solid_theta_mismatch: pairwise_sum(&mismatch),
        }
    }

    pub fn advisory(&self, state: &State<T>) -> Advisory<T> {
        let p = &self.params;
        let gas = &p.gas;
        let h = self.grid.h();
        let cv = gas.cv();
        let diff_coeff = (T::lit(2.0) * p.transport.mu).max(p.transport.kappa / cv);
        let mut adv = T::zero();
        let mut diff = T::zero();
        let mut pen = T::zero();
        for k in 0..state.len() {
            let rho = state.rho[k];
            let theta = gas.theta_from_conserved(rho, state.rho_e[k]);
            let m = state.mom.at(k);
            let speed = (m[0] / rho).hypot(m[1] / rho) + gas.sound_speed_sq(theta).sqrt();
            adv = adv.max(speed * p.dt / h);
            diff = diff.max(diff_coeff * p.dt / (rho * h * h));
            if p.penalty.mask.is_solid(k) {
                let d = (theta - p.penalty.theta_b[k]).abs().powi(p.penalty.k as i32);
                let stiff = (T::one() / rho).max(d / (cv * rho));
                pen = pen.max(p.dt * stiff / p.penalty.epsilon);
            }
        }
        Advisory {
            advective: adv,
            diffusive: diff,
            penalty: pen,
        }
    }

    /// Advances `initial` to `t_final`. The observer sees every accepted step
    /// as `(step, time, state)`, starting with step 0.
    pub fn run_observed<F>(&self, initial: State<T>, mut observer: F) -> Result<RunOutput<T>>
    where
        F: FnMut(usize, T, &State<T>) -> Result<()> + Send,
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.params.workers.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        pool.install(|| self.run_inner(initial, &mut observer))
    }

    pub fn run(&self, initial: State<T>) -> Result<RunOutput<T>> {
        self.run_observed(initial, |_, _, _| Ok(()))
    }

    fn run_inner<F>(&self, initial: State<T>, observer: &mut F) -> Result<RunOutput<T>>
    where
        F: FnMut(usize, T, &State<T>) -> Result<()>,
    {
        let p = &self.params;
        let n_steps = p.step_count();
        let mut warnings = Vec::new();
        let mut warned = [false; 3];
        let mut note = |adv: &Advisory<T>, step: usize, warnings: &mut Vec<String>| {
            for (name, value) in adv.exceeded() {
                let slot = match name {
                    "advective" => 0,
                    "diffusive" => 1,
                    _ => 2,
                };
                if !warned[slot] {
                    warned[slot] = true;
                    let msg = format!(
                        "stability advisory: {name} number {value:.3e} exceeds {ADVISORY_LIMIT} at step {step}"
                    );
                    warn!("{msg}");
                    warnings.push(msg);
                }
            }
        };

        self.check_positive(&initial, 0, T::zero())?;
        let advisory = self.advisory(&initial);
        note(&advisory, 0, &mut warnings);
        let mut series = vec![DiagnosticsRow {
            step: 0,
            time: T::zero(),
            diagnostics: self.diagnostics(&initial),
            advisory,
        }];
        observer(0, T::zero(), &initial)?;

        let mut state = initial;
        let mut integral = T::zero();
        let mut time = T::zero();
        for step in 1..=n_steps {
            let start = p.dt * T::from_usize(step - 1).unwrap();
            let (dt, end) = if step == n_steps {
                (p.t_final - start, p.t_final)
            } else {
                (p.dt, p.dt * T::from_usize(step).unwrap())
            };
            state = self.euler_step(&state, dt, step, start)?;
            time = end;
            integral = integral + dt * self.solid_kinetic(&state);
            if step % p.diag_every == 0 || step == n_steps {
                let advisory = self.advisory(&state);
                note(&advisory, step, &mut warnings);
                series.push(DiagnosticsRow {
                    step,
                    time,
                    diagnostics: self.diagnostics(&state),
                    advisory,
                });
            }
            observer(step, time, &state)?;
        }

        Ok(RunOutput {
            final_state: state,
            series,
            steps: n_steps,
            time,
            solid_kinetic_integral: integral,
            warnings,
        })
    }
}

/// `state + dt * tendency`, cell by cell.
pub fn advance<T: Real>(state: &State<T>, tend: &Tendency<T>, dt: T) -> State<T> {
    let step = |a: &ScalarField<T>, d: &ScalarField<T>| a.zip_map(d, |x, dx| x + dt * dx);
    State {
        rho: step(&state.rho, &tend.d_rho),
        mom: VectorField::new(
            step(&state.mom.comp[0], &tend.d_mom.comp[0]),
            step(&state.mom.comp[1], &tend.d_mom.comp[1]),
        ),
        rho_e: step(&state.rho_e, &tend.d_rho_e),
    }
}
