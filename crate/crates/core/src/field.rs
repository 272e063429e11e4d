//! Cell-centered piecewise constant fields (structure-of-arrays layout).

use crate::real::{pairwise_sum, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<T> {
    pub values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn constant(len: usize, value: T) -> Self {
        Self {
            values: vec![value; len],
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self::constant(len, T::zero())
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> T) -> Self {
        Self {
            values: (0..len).map(f).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.len(), other.len());
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| s * v)
    }

    /// `sum_K weight * v_K`, pairwise in index order.
    pub fn integrate(&self, weight: T) -> T {
        let terms: Vec<T> = self.values.iter().map(|&v| weight * v).collect();
        pairwise_sum(&terms)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl<T> std::ops::Index<usize> for ScalarField<T> {
    type Output = T;
    #[inline]
    fn index(&self, k: usize) -> &T {
        &self.values[k]
    }
}

impl<T> std::ops::IndexMut<usize> for ScalarField<T> {
    #[inline]
    fn index_mut(&mut self, k: usize) -> &mut T {
        &mut self.values[k]
    }
}

/// Two components per cell, stored as one scalar field per component.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<T> {
    pub comp: [ScalarField<T>; 2],
}

impl<T: Real> VectorField<T> {
    pub fn new(x: ScalarField<T>, y: ScalarField<T>) -> Self {
        assert_eq!(x.len(), y.len());
        Self { comp: [x, y] }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(ScalarField::zeros(len), ScalarField::zeros(len))
    }

    pub fn constant(len: usize, v: [T; 2]) -> Self {
        Self::new(ScalarField::constant(len, v[0]), ScalarField::constant(len, v[1]))
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> [T; 2]) -> Self {
        let mut x = Vec::with_capacity(len);
        let mut y = Vec::with_capacity(len);
        for k in 0..len {
            let v = f(k);
            x.push(v[0]);
            y.push(v[1]);
        }
        Self::new(ScalarField::new(x), ScalarField::new(y))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.comp[0].len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn at(&self, k: usize) -> [T; 2] {
        [self.comp[0][k], self.comp[1][k]]
    }

    pub fn map_comp(&self, f: impl Fn(&ScalarField<T>) -> ScalarField<T>) -> Self {
        Self::new(f(&self.comp[0]), f(&self.comp[1]))
    }

    pub fn scale(&self, s: T) -> Self {
        self.map_comp(|c| c.scale(s))
    }

    /// Per-cell Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField<T> {
        self.comp[0].zip_map(&self.comp[1], |a, b| a.hypot(b))
    }

    /// Componentwise `sum_K weight * v_K`.
    pub fn integrate(&self, weight: T) -> [T; 2] {
        [self.comp[0].integrate(weight), self.comp[1].integrate(weight)]
    }

    pub fn all_finite(&self) -> bool {
        self.comp.iter().all(|c| c.all_finite())
    }
}

/// Two-by-two cell tensor; `comp[a][b]` is row `a`, column `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField<T> {
    pub comp: [[ScalarField<T>; 2]; 2],
}

impl<T: Real> TensorField<T> {
    pub fn zeros(len: usize) -> Self {
        Self {
            comp: [
                [ScalarField::zeros(len), ScalarField::zeros(len)],
                [ScalarField::zeros(len), ScalarField::zeros(len)],
            ],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.comp[0][0].len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn at(&self, k: usize) -> [[T; 2]; 2] {
        [
            [self.comp[0][0][k], self.comp[0][1][k]],
            [self.comp[1][0][k], self.comp[1][1][k]],
        ]
    }

    pub fn row(&self, a: usize) -> VectorField<T> {
        VectorField::new(self.comp[a][0].clone(), self.comp[a][1].clone())
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            comp: [
                [self.comp[0][0].scale(s), self.comp[0][1].scale(s)],
                [self.comp[1][0].scale(s), self.comp[1][1].scale(s)],
            ],
        }
    }

    /// Per-cell Frobenius square `sum_ab T_ab^2`.
    pub fn frobenius_sq(&self) -> ScalarField<T> {
        ScalarField::from_fn(self.len(), |k| {
            let t = self.at(k);
            t[0][0] * t[0][0] + t[0][1] * t[0][1] + t[1][0] * t[1][0] + t[1][1] * t[1][1]
        })
    }
}
