//! Periodic Cartesian grid on the flat torus and the solid/fluid mask.
//!
//! Cells are stored row-major with the x index running fastest:
//! `index(i, j) = i + n * j`, and cell `(i, j)` has its center at
//! `(-1 + (i + 1/2) h, -1 + (j + 1/2) h)` on the standard `[-1, 1]^2` box.

use crate::error::{Error, Result};
use crate::real::Real;

/// Spatial dimension of every grid in this crate.
pub const DIM: usize = 2;

/// Below this distance from the origin radial unit vectors are taken as zero.
pub const ORIGIN_CUTOFF: f64 = 1e-12;

/// Polar angle convention used for star-shaped boundaries: `atan2(x2, x1)`,
/// measured counter-clockwise from the positive x1 axis.
pub fn polar_angle<T: Real>(x: [T; 2]) -> T {
    x[1].atan2(x[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X = 0,
    Y = 1,
}

impl Axis {
    pub const ALL: [Axis; DIM] = [Axis::X, Axis::Y];
}

/// Uniform periodic grid of `n x n` square cells.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusGrid<T> {
    n: usize,
    length: T,
    h: T,
}

impl<T: Real> TorusGrid<T> {
    /// Grid on the standard box `[-1, 1]^2` with `h = 2 / n`.
    pub fn new(n: usize) -> Result<Self> {
        Self::periodic_box(n, T::lit(2.0))
    }

    /// Grid on `[-length/2, length/2]^2`. Only used to reproduce unit-spacing
    /// stencil computations; solver runs always use [`TorusGrid::new`].
    pub fn periodic_box(n: usize, length: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("grid needs at least 2 cells per axis, got {n}")));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::invalid("box length must be positive and finite"));
        }
        let h = length / T::from_usize(n).unwrap();
        Ok(Self { n, length, h })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self) -> T {
        self.h
    }

    #[inline]
    pub fn length(&self) -> T {
        self.length
    }

    /// Total number of cells.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `|K| = h^2`.
    #[inline]
    pub fn cell_volume(&self) -> T {
        self.h * self.h
    }

    /// `|sigma| = h`.
    #[inline]
    pub fn face_area(&self) -> T {
        self.h
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        i + self.n * j
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.n, idx / self.n)
    }

    pub fn center(&self, i: usize, j: usize) -> [T; 2] {
        let half = T::lit(0.5);
        let lo = -self.length * half;
        [
            lo + (T::from_usize(i).unwrap() + half) * self.h,
            lo + (T::from_usize(j).unwrap() + half) * self.h,
        ]
    }

    pub fn center_of(&self, idx: usize) -> [T; 2] {
        let (i, j) = self.coords(idx);
        self.center(i, j)
    }

    /// Neighbor across the face on the positive side of `axis`.
    #[inline]
    pub fn upper(&self, idx: usize, axis: Axis) -> usize {
        let n = self.n;
        match axis {
            Axis::X => {
                if idx % n + 1 == n {
                    idx + 1 - n
                } else {
                    idx + 1
                }
            }
            Axis::Y => {
                let next = idx + n;
                if next >= n * n {
                    next - n * n
                } else {
                    next
                }
            }
        }
    }

    /// Neighbor across the face on the negative side of `axis`.
    #[inline]
    pub fn lower(&self, idx: usize, axis: Axis) -> usize {
        let n = self.n;
        match axis {
            Axis::X => {
                if idx % n == 0 {
                    idx + n - 1
                } else {
                    idx - 1
                }
            }
            Axis::Y => {
                if idx < n {
                    idx + n * n - n
                } else {
                    idx - n
                }
            }
        }
    }

    /// The `2 * DIM` faces of a cell as `(neighbor, axis, outward sign)`.
    pub fn faces_of(&self, idx: usize) -> [(usize, Axis, i8); 2 * DIM] {
        [
            (self.upper(idx, Axis::X), Axis::X, 1),
            (self.lower(idx, Axis::X), Axis::X, -1),
            (self.upper(idx, Axis::Y), Axis::Y, 1),
            (self.lower(idx, Axis::Y), Axis::Y, -1),
        ]
    }
}

/// Analytic description of the physical fluid domain inside the torus.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec<T> {
    /// `r_inner <= |x| <= r_outer`.
    Annulus { inner: T, outer: T },
    /// `r_inner <= |x| <= (base + delta) + delta cos(lobes * phi)`.
    StarAnnulus {
        inner: T,
        base: T,
        delta: T,
        lobes: u32,
    },
}

impl<T: Real> DomainSpec<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DomainSpec::Annulus { inner, outer } => {
                if !(inner > T::zero() && inner < outer && outer < T::one()) {
                    return Err(Error::invalid(format!(
                        "annulus radii must satisfy 0 < {inner} < {outer} < 1"
                    )));
                }
            }
            DomainSpec::StarAnnulus {
                inner,
                base,
                delta,
                lobes,
            } => {
                let two = T::lit(2.0);
                if !(inner > T::zero() && delta >= T::zero() && base - delta > inner) {
                    return Err(Error::invalid("star annulus needs 0 < inner < base - delta"));
                }
                if !(base + two * delta < T::one()) {
                    return Err(Error::invalid("star boundary leaves the unit disc"));
                }
                if lobes == 0 {
                    return Err(Error::invalid("star annulus needs at least one lobe"));
                }
            }
        }
        Ok(())
    }

    /// Radius of the outer boundary curve in direction `phi`.
    pub fn outer_radius(&self, phi: T) -> T {
        match *self {
            DomainSpec::Annulus { outer, .. } => outer,
            DomainSpec::StarAnnulus {
                base, delta, lobes, ..
            } => (base + delta) + delta * (T::from_u32(lobes).unwrap() * phi).cos(),
        }
    }

    pub fn inner_radius(&self) -> T {
        match *self {
            DomainSpec::Annulus { inner, .. } | DomainSpec::StarAnnulus { inner, .. } => inner,
        }
    }

    /// Point membership in the solid region. Points on a boundary curve are fluid.
    pub fn is_solid(&self, x: [T; 2]) -> bool {
        let r = x[0].hypot(x[1]);
        r < self.inner_radius() || r > self.outer_radius(polar_angle(x))
    }
}

/// Per-cell solid flag, decided by the cell center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolidMask {
    solid: Vec<bool>,
}

impl SolidMask {
    pub fn from_flags(solid: Vec<bool>) -> Self {
        Self { solid }
    }

    pub fn all_fluid(len: usize) -> Self {
        Self {
            solid: vec![false; len],
        }
    }

    pub fn all_solid(len: usize) -> Self {
        Self {
            solid: vec![true; len],
        }
    }

    #[inline]
    pub fn is_solid(&self, idx: usize) -> bool {
        self.solid[idx]
    }

    pub fn len(&self) -> usize {
        self.solid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solid.is_empty()
    }

    pub fn flags(&self) -> &[bool] {
        &self.solid
    }

    pub fn solid_count(&self) -> usize {
        self.solid.iter().filter(|&&s| s).count()
    }

    pub fn fluid_count(&self) -> usize {
        self.solid.len() - self.solid_count()
    }
}

pub fn build_mask<T: Real>(grid: &TorusGrid<T>, domain: &DomainSpec<T>) -> SolidMask {
    let solid = (0..grid.len())
        .map(|idx| domain.is_solid(grid.center_of(idx)))
        .collect();
    SolidMask { solid }
}

/// Area covered by fluid cells, `h^2 * #fluid`.
pub fn fluid_volume<T: Real>(mask: &SolidMask, grid: &TorusGrid<T>) -> T {
    grid.cell_volume() * T::from_usize(mask.fluid_count()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_spacing() {
        let g = TorusGrid::<f64>::new(160).unwrap();
        assert_eq!(g.h(), 2.0 / 160.0);
        assert_eq!(g.h() * 160.0, 2.0);
        assert_eq!(g.cell_volume(), g.h() * g.h());
    }

    #[test]
    fn rejects_degenerate_grid() {
        assert!(TorusGrid::<f64>::new(1).is_err());
        assert!(TorusGrid::<f64>::new(0).is_err());
    }

    #[test]
    fn two_cell_grid_wraps_onto_itself() {
        let g = TorusGrid::<f64>::new(2).unwrap();
        let centers: Vec<_> = (0..4).map(|k| g.center_of(k)).collect();
        assert_eq!(centers, vec![[-0.5, -0.5], [0.5, -0.5], [-0.5, 0.5], [0.5, 0.5]]);
        for k in 0..4 {
            for axis in Axis::ALL {
                assert_eq!(g.upper(k, axis), g.lower(k, axis));
                assert_ne!(g.upper(k, axis), k);
            }
        }
    }

    #[test]
    fn corner_cell_wraps() {
        let g = TorusGrid::<f64>::new(4).unwrap();
        assert_eq!(g.center(0, 0), [-0.75, -0.75]);
        assert_eq!(g.lower(g.index(0, 0), Axis::X), g.index(3, 0));
        assert_eq!(g.lower(g.index(0, 0), Axis::Y), g.index(0, 3));
        assert_eq!(g.upper(g.index(3, 2), Axis::X), g.index(0, 2));
    }

    #[test]
    fn faces_close_geometrically() {
        let g = TorusGrid::<f64>::new(5).unwrap();
        for k in 0..g.len() {
            let faces = g.faces_of(k);
            assert_eq!(faces.len(), 4);
            let mut sum = [0.0f64; 2];
            for &(_, axis, sign) in &faces {
                sum[axis as usize] += g.face_area() * f64::from(sign);
            }
            assert_eq!(sum, [0.0, 0.0]);
        }
    }

    #[test]
    fn annulus_mask_examples() {
        let ring = DomainSpec::Annulus { inner: 0.2, outer: 0.7 };
        assert!(ring.is_solid([0.0, 0.0]));
        assert!(!ring.is_solid([0.45, 0.0]));
        assert!(ring.is_solid([0.9, 0.0]));
        // boundary ties are fluid
        assert!(!ring.is_solid([0.2, 0.0]));
        assert!(!ring.is_solid([0.0, 0.7]));
    }

    #[test]
    fn star_mask_example() {
        let star = DomainSpec::<f64>::StarAnnulus {
            inner: 0.2,
            base: 0.7,
            delta: 0.05,
            lobes: 8,
        };
        star.validate().unwrap();
        assert!((star.outer_radius(0.0) - 0.80).abs() < 1e-15);
        assert!(!star.is_solid([0.76, 0.0]));
        assert!(star.is_solid([0.81, 0.0]));
        // trough between lobes: radius(pi/8) = 0.70
        let phi = std::f64::consts::PI / 8.0;
        assert!(star.is_solid([0.72 * phi.cos(), 0.72 * phi.sin()]));
    }

    #[test]
    fn invalid_domains_rejected() {
        assert!(DomainSpec::Annulus { inner: 0.7, outer: 0.2 }.validate().is_err());
        assert!(DomainSpec::Annulus { inner: 0.2, outer: 1.2 }.validate().is_err());
        let star = DomainSpec::StarAnnulus {
            inner: 0.2,
            base: 0.9,
            delta: 0.1,
            lobes: 8,
        };
        assert!(star.validate().is_err());
    }

    #[test]
    fn fluid_volume_extremes() {
        let g = TorusGrid::<f64>::new(10).unwrap();
        assert!((fluid_volume(&SolidMask::all_fluid(g.len()), &g) - 4.0).abs() < 1e-14);
        assert_eq!(fluid_volume(&SolidMask::all_solid(g.len()), &g), 0.0);
    }

    #[test]
    fn annulus_area_on_reference_grid() {
        let g = TorusGrid::<f64>::new(160).unwrap();
        let ring = DomainSpec::Annulus { inner: 0.2, outer: 0.7 };
        let area = fluid_volume(&build_mask(&g, &ring), &g);
        let exact = std::f64::consts::PI * (0.49 - 0.04);
        assert!((area - exact).abs() <= 2.0 * std::f64::consts::PI * 0.9 * g.h());
    }

    #[test]
    fn mask_is_deterministic_and_converges() {
        let ring = DomainSpec::Annulus { inner: 0.2, outer: 0.7 };
        let mut prev = f64::INFINITY;
        for n in [20usize, 40, 80, 160] {
            let g = TorusGrid::<f64>::new(n).unwrap();
            let a = build_mask(&g, &ring);
            assert_eq!(a, build_mask(&g, &ring));
            // symmetric difference against a 16x16 sub-sampled indicator per cell
            let sub = 16;
            let mut sym_diff = 0.0;
            for k in 0..g.len() {
                let c = g.center_of(k);
                let mut inside = 0usize;
                for a_ in 0..sub {
                    for b_ in 0..sub {
                        let x = c[0] + g.h() * ((a_ as f64 + 0.5) / sub as f64 - 0.5);
                        let y = c[1] + g.h() * ((b_ as f64 + 0.5) / sub as f64 - 0.5);
                        if !ring.is_solid([x, y]) {
                            inside += 1;
                        }
                    }
                }
                let frac = inside as f64 / (sub * sub) as f64;
                let cell_fluid = if a.is_solid(k) { 0.0 } else { 1.0 };
                sym_diff += g.cell_volume() * (cell_fluid - frac).abs();
            }
            assert!(sym_diff <= 2.0 * std::f64::consts::PI * 0.9 * g.h());
            assert!(sym_diff < prev);
            prev = sym_diff;
        }
    }

    proptest! {
        #[test]
        fn neighbor_maps_are_inverse(n in 2usize..40, seed in 0usize..10_000) {
            let g = TorusGrid::<f64>::new(n).unwrap();
            let k = seed % g.len();
            for axis in Axis::ALL {
                prop_assert_eq!(g.lower(g.upper(k, axis), axis), k);
                prop_assert_eq!(g.upper(g.lower(k, axis), axis), k);
            }
        }
    }
}
