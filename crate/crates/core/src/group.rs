//! The simply connected nilpotent group in exponential coordinates of the
//! first kind.
//!
//! A [`GroupPoint`] stores `log` of a group element, so `exp` and `log` are the
//! identity on coordinates and the product is the Campbell–Hausdorff
//! polynomial, which terminates at the nilpotency step.

use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::{AlgebraVector, LieAlgebra};
use crate::bch::BCH_TABLE;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct GroupPoint<S> {
    coords: Vec<S>,
}

impl<S: Scalar> GroupPoint<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Self { coords }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(vec![S::zero(); dim])
    }

    pub fn exp(v: AlgebraVector<S>) -> Self {
        Self::new(v.into_coords())
    }

    pub fn log(&self) -> AlgebraVector<S> {
        AlgebraVector::new(self.coords.clone())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> GroupPoint<f64> {
        GroupPoint::new(self.coords.iter().map(Scalar::to_f64).collect())
    }

    /// Exact image of a float point; `None` if a coordinate is not finite.
    pub fn from_f64(p: &GroupPoint<f64>) -> Option<Self> {
        p.coords.iter().map(|&x| S::from_f64(x)).collect::<Option<Vec<_>>>().map(Self::new)
    }
}

/// A nilpotent group, shared cheaply between norms, similarities and models.
#[derive(Clone, Debug)]
pub struct Group {
    algebra: Arc<LieAlgebra>,
}

impl Group {
    pub fn new(algebra: LieAlgebra) -> Self {
        Self {
            algebra: Arc::new(algebra),
        }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn identity<S: Scalar>(&self) -> GroupPoint<S> {
        GroupPoint::identity(self.dim())
    }

    pub fn check_point<S: Scalar>(&self, x: &GroupPoint<S>) -> Result<()> {
        self.algebra.check_dim(x.dim())
    }

    /// Campbell–Hausdorff product `x . y`.
    pub fn bch_product<S: Scalar>(&self, x: &GroupPoint<S>, y: &GroupPoint<S>) -> Result<GroupPoint<S>> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(GroupPoint::new(BCH_TABLE.evaluate(&self.algebra, x.coords(), y.coords())))
    }

    pub fn inverse<S: Scalar>(&self, x: &GroupPoint<S>) -> GroupPoint<S> {
        GroupPoint::new(x.coords.iter().map(|c| -c.clone()).collect())
    }

    /// `(-x) . y`, the left-invariant difference used by the distance.
    pub fn difference<S: Scalar>(&self, x: &GroupPoint<S>, y: &GroupPoint<S>) -> Result<GroupPoint<S>> {
        self.bch_product(&self.inverse(x), y)
    }

    /// `delta_t(x) = (t^{d_1} x_1, ..., t^{d_n} x_n)`.
    pub fn dilate<S: Scalar>(&self, t: &S, x: &GroupPoint<S>) -> Result<GroupPoint<S>> {
        self.check_point(x)?;
        Ok(GroupPoint::new(self.dilate_coords(t, x.coords())?))
    }

    pub fn dilate_vector<S: Scalar>(&self, t: &S, v: &AlgebraVector<S>) -> Result<AlgebraVector<S>> {
        self.algebra.check_dim(v.dim())?;
        Ok(AlgebraVector::new(self.dilate_coords(t, v.coords())?))
    }

    fn dilate_coords<S: Scalar>(&self, t: &S, coords: &[S]) -> Result<Vec<S>> {
        if !(*t > S::zero()) {
            return Err(Error::NonPositiveScale(t.to_f64()));
        }
        coords
            .iter()
            .zip(self.algebra.weights())
            .map(|(x, w)| Ok(t.pow_weight(w)? * x.clone()))
            .collect()
    }
}
