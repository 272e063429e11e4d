//! L1 error metrics against mesh and penalty references, and experimental
//! orders of convergence.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::TorusGrid;
use crate::physics::GasModel;
use crate::real::{pairwise_sum, Real};
use crate::solver::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldId {
    Rho,
    U,
    Theta,
}

impl FieldId {
    pub const ALL: [FieldId; 3] = [FieldId::Rho, FieldId::U, FieldId::Theta];

    pub fn name(self) -> &'static str {
        match self {
            FieldId::Rho => "rho",
            FieldId::U => "u",
            FieldId::Theta => "theta",
        }
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Piecewise constant injection from an `n x n` grid onto a nested
/// `n_ref x n_ref` grid.
pub fn inject_to_fine<T: Real>(field: &ScalarField<T>, n: usize, n_ref: usize) -> Result<ScalarField<T>> {
    if n == 0 || n_ref % n != 0 {
        return Err(Error::invalid(format!("reference size {n_ref} is not a multiple of {n}")));
    }
    if field.len() != n * n {
        return Err(Error::invalid("field size does not match the coarse grid"));
    }
    let ratio = n_ref / n;
    Ok(ScalarField::from_fn(n_ref * n_ref, |k| {
        let (i, j) = (k % n_ref, k / n_ref);
        field[i / ratio + n * (j / ratio)]
    }))
}

pub fn inject_vector_to_fine<T: Real>(field: &VectorField<T>, n: usize, n_ref: usize) -> Result<VectorField<T>> {
    Ok(VectorField::new(
        inject_to_fine(&field.comp[0], n, n_ref)?,
        inject_to_fine(&field.comp[1], n, n_ref)?,
    ))
}

/// `sum_K |K| |a_K - b_K|`.
pub fn l1_error<T: Real>(grid: &TorusGrid<T>, a: &ScalarField<T>, b: &ScalarField<T>) -> Result<T> {
    if a.len() != grid.len() || b.len() != grid.len() {
        return Err(Error::invalid("l1 error of fields on different grids"));
    }
    let vol = grid.cell_volume();
    let terms: Vec<T> = (0..a.len()).map(|k| vol * (a[k] - b[k]).abs()).collect();
    Ok(pairwise_sum(&terms))
}

/// `sum_K |K| ||a_K - b_K||_2`.
pub fn l1_error_vector<T: Real>(grid: &TorusGrid<T>, a: &VectorField<T>, b: &VectorField<T>) -> Result<T> {
    if a.len() != grid.len() || b.len() != grid.len() {
        return Err(Error::invalid("l1 error of fields on different grids"));
    }
    let vol = grid.cell_volume();
    let terms: Vec<T> = (0..a.len())
        .map(|k| {
            let (x, y) = (a.at(k), b.at(k));
            vol * (x[0] - y[0]).hypot(x[1] - y[1])
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Final-time primitive fields of one run, tagged with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution<T> {
    pub experiment: String,
    pub n: usize,
    pub epsilon: T,
    pub time: T,
    pub rho: ScalarField<T>,
    pub u: VectorField<T>,
    pub theta: ScalarField<T>,
}

impl<T: Real> Solution<T> {
    pub fn from_state(experiment: &str, n: usize, epsilon: T, time: T, state: &State<T>, gas: &GasModel<T>) -> Self {
        Self {
            experiment: experiment.to_string(),
            n,
            epsilon,
            time,
            rho: state.rho.clone(),
            u: state.velocity(),
            theta: state.temperature(gas),
        }
    }

    fn injected(&self, n_ref: usize) -> Result<Self> {
        Ok(Self {
            experiment: self.experiment.clone(),
            n: n_ref,
            epsilon: self.epsilon,
            time: self.time,
            rho: inject_to_fine(&self.rho, self.n, n_ref)?,
            u: inject_vector_to_fine(&self.u, self.n, n_ref)?,
            theta: inject_to_fine(&self.theta, self.n, n_ref)?,
        })
    }

    fn same_time(&self, other: &Self) -> bool {
        (self.time - other.time).abs() <= T::lit(1e-12) * (T::one() + self.time.abs())
    }
}

/// L1 distances of `rho`, `u`, `theta` between two solutions on one grid.
fn field_errors<T: Real>(a: &Solution<T>, b: &Solution<T>) -> Result<[(FieldId, T); 3]> {
    let grid = TorusGrid::new(a.n)?;
    Ok([
        (FieldId::Rho, l1_error(&grid, &a.rho, &b.rho)?),
        (FieldId::U, l1_error_vector(&grid, &a.u, &b.u)?),
        (FieldId::Theta, l1_error(&grid, &a.theta, &b.theta)?),
    ])
}

/// Mesh error `E`: the run injected onto the reference mesh at equal `epsilon`.
pub fn compute_e<T: Real>(run: &Solution<T>, reference: &Solution<T>) -> Result<[(FieldId, T); 3]> {
    if run.experiment != reference.experiment || run.epsilon != reference.epsilon || !run.same_time(reference) {
        return Err(Error::invalid("mesh error needs equal experiment, epsilon and final time"));
    }
    field_errors(&run.injected(reference.n)?, reference)
}

/// Penalty error `P`: the run against the reference-epsilon run on the same mesh.
pub fn compute_p<T: Real>(run: &Solution<T>, reference: &Solution<T>) -> Result<[(FieldId, T); 3]> {
    if run.experiment != reference.experiment || run.n != reference.n || !run.same_time(reference) {
        return Err(Error::invalid("penalty error needs equal experiment, mesh and final time"));
    }
    field_errors(run, reference)
}

/// One row of the error table.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRecord<T> {
    pub experiment: String,
    pub field: FieldId,
    pub n: usize,
    pub h: T,
    pub epsilon: T,
    /// `None` when the run or its mesh reference failed.
    pub error_e: Option<T>,
    pub error_p: Option<T>,
    pub time: T,
}

/// Successive-pair rates `log(e_i / e_{i+1}) / log(p_i / p_{i+1})`;
/// `None` marks a pair with a nonpositive error.
pub fn eoc<T: Real>(points: &[(T, T)]) -> Result<Vec<Option<T>>> {
    if points.len() < 2 {
        return Err(Error::invalid("rates need at least two points"));
    }
    if points.iter().any(|&(p, _)| !(p > T::zero())) {
        return Err(Error::invalid("parameters must be positive"));
    }
    let increasing = points.windows(2).all(|w| w[0].0 < w[1].0);
    let decreasing = points.windows(2).all(|w| w[0].0 > w[1].0);
    if !(increasing || decreasing) {
        return Err(Error::invalid("parameters must be strictly monotone"));
    }
    Ok(points
        .windows(2)
        .map(|w| {
            let ((p0, e0), (p1, e1)) = (w[0], w[1]);
            if e0 > T::zero() && e1 > T::zero() {
                Some((e0 / e1).ln() / (p0 / p1).ln())
            } else {
                None
            }
        })
        .collect())
}
