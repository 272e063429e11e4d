use proptest::prelude::*;

use nsf_pen::field::{ScalarField, VectorField};
use nsf_pen::grid::{Axis, TorusGrid};
use nsf_pen::operators::{div, grad, upwind_div_scalar};

fn fields(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    let len = n * n;
    (
        prop::collection::vec(-2.0f64..2.0, len),
        prop::collection::vec(-2.0f64..2.0, len),
        prop::collection::vec(-2.0f64..2.0, len),
    )
}

fn sized() -> impl Strategy<Value = (usize, (Vec<f64>, Vec<f64>, Vec<f64>))> {
    (3usize..12).prop_flat_map(|n| (Just(n), fields(n)))
}

/// Per-cell loop over the four faces with the outward normal of that cell.
fn outward_oracle(g: &TorusGrid<f64>, r: &[f64], v: &VectorField<f64>, alpha: f64) -> Vec<f64> {
    let h = g.h();
    let visc = h.powf(alpha);
    (0..g.len())
        .map(|k| {
            let mut sum = 0.0;
            for (axis, comp) in [(Axis::X, 0usize), (Axis::Y, 1)] {
                for (nb, sign) in [(g.upper(k, axis), 1.0), (g.lower(k, axis), -1.0)] {
                    let vn = sign * 0.5 * (v.comp[comp][k] + v.comp[comp][nb]);
                    let jump = r[nb] - r[k];
                    sum += 0.5 * (r[k] + r[nb]) * vn - 0.5 * vn.abs() * jump - visc * jump;
                }
            }
            sum * h / (h * h)
        })
        .collect()
}

proptest! {
    #[test]
    fn grad_and_div_are_adjoint((n, (r, vx, vy)) in sized()) {
        let g = TorusGrid::<f64>::new(n).unwrap();
        let r = ScalarField::new(r);
        let v = VectorField::new(ScalarField::new(vx), ScalarField::new(vy));
        let w = g.cell_volume();
        let d = div(&g, &v);
        let gr = grad(&g, &r);
        let mut lhs = 0.0;
        let mut scale = 0.0;
        for k in 0..g.len() {
            let a = r[k] * d[k];
            let b = v.comp[0][k] * gr.comp[0][k] + v.comp[1][k] * gr.comp[1][k];
            lhs += w * (a + b);
            scale += w * (a.abs() + b.abs());
        }
        prop_assert!(lhs.abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn upwind_flux_is_conservative((n, (r, vx, vy)) in sized(), alpha in 0.05f64..0.95) {
        let g = TorusGrid::<f64>::new(n).unwrap();
        let r = ScalarField::new(r.into_iter().map(|x| x + 3.0).collect());
        let v = VectorField::new(ScalarField::new(vx), ScalarField::new(vy));
        let d = upwind_div_scalar(&g, &r, &v, alpha);
        let total: f64 = d.values.iter().map(|x| x * g.cell_volume()).sum();
        let scale: f64 = d.values.iter().map(|x| x.abs() * g.cell_volume()).sum();
        prop_assert!(total.abs() <= 1e-13 * scale.max(1.0));
    }

    #[test]
    fn face_orientation_does_not_matter((n, (r, vx, vy)) in sized(), alpha in 0.05f64..0.95) {
        let g = TorusGrid::<f64>::new(n).unwrap();
        let v = VectorField::new(ScalarField::new(vx), ScalarField::new(vy));
        let ours = upwind_div_scalar(&g, &ScalarField::new(r.clone()), &v, alpha);
        let oracle = outward_oracle(&g, &r, &v, alpha);
        for k in 0..g.len() {
            prop_assert!((ours[k] - oracle[k]).abs() <= 1e-12 * (1.0 + oracle[k].abs()));
        }
    }
}

#[test]
fn upwind_divergence_is_consistent() {
    let pi = std::f64::consts::PI;
    let alpha = 0.6;
    let mut errs = Vec::new();
    for n in [32usize, 64, 128] {
        let g = TorusGrid::<f64>::new(n).unwrap();
        let r = ScalarField::from_fn(g.len(), |k| {
            let [x, y] = g.center_of(k);
            2.0 + (pi * x).sin() * (pi * y).cos()
        });
        let v = VectorField::from_fn(g.len(), |k| {
            let [x, y] = g.center_of(k);
            [(pi * y).cos(), 0.5 * (pi * x).sin()]
        });
        // div(r v) with v divergence free
        let exact = ScalarField::from_fn(g.len(), |k| {
            let [x, y] = g.center_of(k);
            let rx = pi * (pi * x).cos() * (pi * y).cos();
            let ry = -pi * (pi * x).sin() * (pi * y).sin();
            rx * (pi * y).cos() + ry * 0.5 * (pi * x).sin()
        });
        let d = upwind_div_scalar(&g, &r, &v, alpha);
        let e: f64 = (0..g.len()).map(|k| g.cell_volume() * (d[k] - exact[k]).abs()).sum();
        errs.push((g.h(), e));
    }
    for w in errs.windows(2) {
        let rate = (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln();
        assert!(rate >= alpha - 0.05, "rate {rate} below {alpha}: {errs:?}");
    }
}
