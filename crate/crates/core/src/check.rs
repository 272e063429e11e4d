//! Quick invariant self-test behind the `check` verb.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{ScalarField, TensorField, VectorField};
use crate::grid::{build_mask, Axis, TorusGrid};
use crate::operators::{div, div_tensor, grad, sym_grad, upwind_div_scalar};
use crate::real::pairwise_sum;
use crate::scenarios::{equilibrium, experiment1, RunSettings};
use crate::solver::Solver;

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_scalar(rng: &mut ChaCha8Rng, len: usize) -> ScalarField<f64> {
    ScalarField::from_fn(len, |_| rng.gen_range(-1.0..1.0))
}

fn random_vector(rng: &mut ChaCha8Rng, len: usize) -> VectorField<f64> {
    VectorField::new(random_scalar(rng, len), random_scalar(rng, len))
}

fn dot(a: &[f64], b: &[f64], w: f64) -> (f64, f64) {
    let terms: Vec<f64> = a.iter().zip(b).map(|(x, y)| w * x * y).collect();
    let mag: Vec<f64> = terms.iter().map(|t| t.abs()).collect();
    (pairwise_sum(&terms), pairwise_sum(&mag))
}

fn adjointness() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for n in [8usize, 16, 32] {
        let g = TorusGrid::<f64>::new(n).unwrap();
        let w = g.cell_volume();
        for _ in 0..10 {
            let r = random_scalar(&mut rng, g.len());
            let v = random_vector(&mut rng, g.len());
            let (a, ma) = dot(&r.values, &div(&g, &v).values, w);
            let gr = grad(&g, &r);
            let (b0, m0) = dot(&v.comp[0].values, &gr.comp[0].values, w);
            let (b1, m1) = dot(&v.comp[1].values, &gr.comp[1].values, w);
            worst = worst.max((a + b0 + b1).abs() / (ma + m0 + m1));

            let mut t = TensorField::zeros(g.len());
            let off = random_scalar(&mut rng, g.len());
            t.comp[0][0] = random_scalar(&mut rng, g.len());
            t.comp[1][1] = random_scalar(&mut rng, g.len());
            t.comp[0][1] = off.clone();
            t.comp[1][0] = off;
            let d = sym_grad(&g, &v);
            let dt = div_tensor(&g, &t);
            let mut lhs = 0.0;
            let mut mag = 0.0;
            for a_ in 0..2 {
                for b_ in 0..2 {
                    let (x, m) = dot(&t.comp[a_][b_].values, &d.comp[a_][b_].values, w);
                    lhs += x;
                    mag += m;
                }
                let (x, m) = dot(&v.comp[a_].values, &dt.comp[a_].values, w);
                lhs += x;
                mag += m;
            }
            worst = worst.max(lhs.abs() / mag);
        }
    }
    (worst <= 1e-12, format!("max relative residual {worst:.2e}"))
}

fn conservativity() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = TorusGrid::<f64>::new(24).unwrap();
    let r = random_scalar(&mut rng, g.len()).map(|x| x + 2.0);
    let v = random_vector(&mut rng, g.len());
    let d = upwind_div_scalar(&g, &r, &v, 0.6);
    let total = d.integrate(g.cell_volume());
    let scale = d.map(f64::abs).integrate(g.cell_volume());
    let rel = total.abs() / scale;
    (rel <= 1e-13, format!("relative flux imbalance {rel:.2e}"))
}

fn periodicity() -> (bool, String) {
    let g = TorusGrid::<f64>::new(9).unwrap();
    let ok = (0..g.len()).all(|k| Axis::ALL.iter().all(|&a| g.lower(g.upper(k, a), a) == k));
    (ok, "neighbor maps inverse".into())
}

fn equilibrium_fixed_point() -> (bool, String) {
    let g = TorusGrid::<f64>::new(16).unwrap();
    let sc = equilibrium::<f64>();
    let settings = RunSettings::standard(1e-2, 1e-5, Some(1e-3));
    let params = sc.run_params(&g, &settings).unwrap();
    let init = sc.project_initial(&g, &params.gas).unwrap();
    let out = Solver::new(g, params).unwrap().run(init.clone()).unwrap();
    (out.final_state == init, format!("{} steps", out.steps))
}

fn mass_conservation() -> (bool, String) {
    let g = TorusGrid::<f64>::new(16).unwrap();
    let sc = experiment1::<f64>();
    let settings = RunSettings::standard(1e-2, 1e-5, Some(2e-3));
    let params = sc.run_params(&g, &settings).unwrap();
    let init = sc.project_initial(&g, &params.gas).unwrap();
    let m0 = init.rho.integrate(g.cell_volume());
    match Solver::new(g.clone(), params).unwrap().run(init) {
        Ok(out) => {
            let m1 = out.final_state.rho.integrate(g.cell_volume());
            let drift = ((m1 - m0) / m0).abs();
            (drift <= 1e-12, format!("relative drift {drift:.2e} after {} steps", out.steps))
        }
        Err(e) => (false, e.to_string()),
    }
}

fn mask_determinism() -> (bool, String) {
    let g = TorusGrid::<f64>::new(40).unwrap();
    let d = experiment1::<f64>().domain;
    (build_mask(&g, &d) == build_mask(&g, &d), "identical masks".into())
}

pub fn run_checks() -> Vec<CheckResult> {
    let checks: [(&'static str, fn() -> (bool, String)); 6] = [
        ("grid periodicity", periodicity),
        ("mask determinism", mask_determinism),
        ("operator adjointness", adjointness),
        ("upwind conservativity", conservativity),
        ("equilibrium fixed point", equilibrium_fixed_point),
        ("mass conservation", mass_conservation),
    ];
    checks
        .iter()
        .map(|&(name, f)| {
            let (passed, detail) = f();
            CheckResult { name, passed, detail }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run_checks() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
