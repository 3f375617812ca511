//! Similarities `f(x) = c . delta_lambda(P x)`.
//!
//! The translation acts by left multiplication, which is what makes the
//! left-invariant distance scale by exactly `lambda` under `f`. The rotation
//! `P` must be orthogonal, preserve every weight space (so it commutes with
//! all dilatations) and be a Lie algebra automorphism.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Group, GroupPoint};
use crate::linalg::Matrix;
use crate::metric::HomogeneousNorm;
use crate::sampling;
use crate::scalar::Scalar;

/// Tolerance for orthogonality and automorphism checks in float mode.
pub const ROTATION_TOL: f64 = 1e-12;

pub const FIXED_POINT_MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Debug)]
pub struct Similarity<S> {
    group: Group,
    lambda: S,
    rotation: Matrix<S>,
    translation: GroupPoint<S>,
}

impl<S: Scalar> Similarity<S> {
    pub fn new(group: &Group, lambda: S, rotation: Matrix<S>, translation: GroupPoint<S>) -> Result<Self> {
        if !(lambda > S::zero()) {
            return Err(Error::NonPositiveScale(lambda.to_f64()));
        }
        group.check_point(&translation)?;
        validate_rotation(group, &rotation)?;
        Ok(Self {
            group: group.clone(),
            lambda,
            rotation,
            translation,
        })
    }

    pub fn identity(group: &Group) -> Self {
        Self {
            group: group.clone(),
            lambda: S::one(),
            rotation: Matrix::identity(group.dim()),
            translation: group.identity(),
        }
    }

    pub fn dilatation(group: &Group, lambda: S) -> Result<Self> {
        Self::new(group, lambda, Matrix::identity(group.dim()), group.identity())
    }

    pub fn translation_by(group: &Group, c: GroupPoint<S>) -> Result<Self> {
        Self::new(group, S::one(), Matrix::identity(group.dim()), c)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn lambda(&self) -> &S {
        &self.lambda
    }

    pub fn rotation(&self) -> &Matrix<S> {
        &self.rotation
    }

    pub fn translation(&self) -> &GroupPoint<S> {
        &self.translation
    }

    /// The linear part `delta_lambda . P`, applied without translation.
    pub fn linear_part(&self, x: &GroupPoint<S>) -> Result<GroupPoint<S>> {
        self.group.check_point(x)?;
        let rotated = GroupPoint::new(self.rotation.mul_vec(x.coords()));
        self.group.dilate(&self.lambda, &rotated)
    }

    pub fn apply(&self, x: &GroupPoint<S>) -> Result<GroupPoint<S>> {
        self.group.bch_product(&self.translation, &self.linear_part(x)?)
    }

    /// `self . other`, i.e. `x -> self(other(x))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.group.algebra().check_dim(other.group.dim())?;
        Ok(Self {
            group: self.group.clone(),
            lambda: self.lambda.clone() * other.lambda.clone(),
            rotation: self.rotation.mul(&other.rotation),
            translation: self.apply(&other.translation)?,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        let lambda = S::one() / self.lambda.clone();
        let rotation = self.rotation.transpose();
        let shifted = self.group.dilate(&lambda, &self.group.inverse(&self.translation))?;
        let translation = GroupPoint::new(rotation.mul_vec(shifted.coords()));
        Ok(Self {
            group: self.group.clone(),
            lambda,
            rotation,
            translation,
        })
    }

    /// `self` composed with itself `n` times (`n = 0` gives the identity).
    pub fn power(&self, n: u32) -> Result<Self> {
        let mut acc = Self::identity(&self.group);
        for _ in 0..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// `self^k` for any integer `k`.
    pub fn integer_power(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            self.power(k as u32)
        } else {
            self.inverse()?.power(k.unsigned_abs() as u32)
        }
    }

    pub fn fixes_identity(&self) -> bool {
        self.translation.is_identity()
    }

    pub fn to_f64(&self) -> Similarity<f64> {
        Similarity {
            group: self.group.clone(),
            lambda: self.lambda.to_f64(),
            rotation: self.rotation.to_f64(),
            translation: self.translation.to_f64(),
        }
    }

    /// Serializable `(lambda, rotation, translation)` in `f64`.
    pub fn literal(&self) -> SimilarityLiteral {
        SimilarityLiteral {
            lambda: self.lambda.to_f64(),
            rotation: self.rotation.to_f64().to_rows(),
            translation: self.translation.coords().iter().map(Scalar::to_f64).collect(),
        }
    }
}

/// JSON form of a similarity; every field defaults to the identity.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimilarityLiteral {
    #[serde(default = "one_f64")]
    pub lambda: f64,
    #[serde(default)]
    pub rotation: Vec<Vec<f64>>,
    #[serde(default)]
    pub translation: Vec<f64>,
}

fn one_f64() -> f64 {
    1.0
}

/// Checks orthogonality, weight-space preservation and the automorphism
/// property of a rotation matrix.
pub fn validate_rotation<S: Scalar>(group: &Group, p: &Matrix<S>) -> Result<()> {
    let n = group.dim();
    if p.rows() != n || p.cols() != n {
        return Err(Error::InvalidRotation(format!(
            "expected {n}x{n} matrix, found {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    let close = |a: &S, b: &S| -> bool {
        if S::EXACT {
            a == b
        } else {
            (a.clone() - b.clone()).to_f64().abs() <= ROTATION_TOL
        }
    };

    let gram = p.transpose().mul(p);
    let id = Matrix::<S>::identity(n);
    for i in 0..n {
        for j in 0..n {
            if !close(&gram[(i, j)], &id[(i, j)]) {
                return Err(Error::InvalidRotation(format!(
                    "not orthogonal: (P^T P)[{}][{}] = {}",
                    i + 1,
                    j + 1,
                    gram[(i, j)].to_f64()
                )));
            }
        }
    }

    let weights = group.algebra().weights();
    for i in 0..n {
        for j in 0..n {
            if weights[i] != weights[j] && !close(&p[(i, j)], &S::zero()) {
                return Err(Error::InvalidRotation(format!(
                    "mixes weight spaces: P[{}][{}] != 0 but d_{} != d_{}",
                    i + 1,
                    j + 1,
                    i + 1,
                    j + 1
                )));
            }
        }
    }

    let alg = group.algebra();
    let columns: Vec<Vec<S>> = (0..n).map(|j| (0..n).map(|i| p[(i, j)].clone()).collect()).collect();
    for a in 0..n {
        for b in (a + 1)..n {
            let mut ea = vec![S::zero(); n];
            ea[a] = S::one();
            let mut eb = vec![S::zero(); n];
            eb[b] = S::one();
            let lhs = p.mul_vec(&alg.bracket_coords(&ea, &eb));
            let rhs = alg.bracket_coords(&columns[a], &columns[b]);
            if lhs.iter().zip(&rhs).any(|(l, r)| !close(l, r)) {
                return Err(Error::InvalidRotation(format!(
                    "not an automorphism: P[e{}, e{}] != [P e{}, P e{}]",
                    a + 1,
                    b + 1,
                    a + 1,
                    b + 1
                )));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct FixedPoint<S> {
    pub point: GroupPoint<S>,
    pub iterations: usize,
    /// Gauge distance between the last two iterates.
    pub last_step: f64,
}

/// Fixed point of a contracting (or expanding) similarity by iterating `f`
/// (or `f^{-1}`) from the identity until the gauge step drops below the norm
/// tolerance, then correcting the iterate layer by layer.
///
/// Float iterations also stop once the coordinates stop moving at the level
/// of rounding, since the gauge of a difference is then dominated by
/// cancellation in the highest-weight coordinates. In exact arithmetic the
/// iteration runs on the `f64` image of `f` (rational iterates grow quickly)
/// and the layered correction, started from the identity, returns the exact
/// fixed point.
pub fn fixed_point<S: Scalar>(norm: &HomogeneousNorm, f: &Similarity<S>) -> Result<FixedPoint<S>> {
    if f.lambda == S::one() {
        return Err(Error::NoContraction);
    }
    let (approx, iterations, last_step) = iterate_to_fixed_point(norm, &f.to_f64())?;
    let start = if S::EXACT {
        f.group.identity()
    } else {
        GroupPoint::<S>::from_f64(&approx).ok_or(Error::NotConverged {
            iterations,
            last_step,
        })?
    };
    Ok(FixedPoint {
        point: correct_by_layers(f, start)?,
        iterations,
        last_step,
    })
}

fn iterate_to_fixed_point(norm: &HomogeneousNorm, f: &Similarity<f64>) -> Result<(GroupPoint<f64>, usize, f64)> {
    let map = if f.lambda < 1.0 { f.clone() } else { f.inverse()? };
    let mut x = f.group.identity::<f64>();
    let mut last_step = f64::INFINITY;
    for iteration in 1..=FIXED_POINT_MAX_ITERATIONS {
        let next = map.apply(&x)?;
        last_step = norm.distance(&x, &next)?;
        let settled = coordinates_settled(&x, &next);
        x = next;
        if last_step < norm.tol() || settled {
            return Ok((x, iteration, last_step));
        }
    }
    Err(Error::NotConverged {
        iterations: FIXED_POINT_MAX_ITERATIONS,
        last_step,
    })
}

/// Removes the remaining error of an approximate fixed point one weight
/// layer at a time. Given the lower layers, the weight-`w` block of `f(x)` is
/// `lambda^w P_w x_w` plus terms in lower layers, so each block is a single
/// linear solve with `I - lambda^w P_w`. In exact arithmetic the result is the
/// fixed point itself.
fn correct_by_layers<S: Scalar>(f: &Similarity<S>, mut x: GroupPoint<S>) -> Result<GroupPoint<S>> {
    let weights = f.group.algebra().weights();
    let mut layers: Vec<&crate::scalar::Constant> = Vec::new();
    for w in weights {
        if !layers.contains(&w) {
            layers.push(w);
        }
    }
    layers.sort_by(|a, b| a.exact().cmp(b.exact()));
    for w in layers {
        let idx: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] == *w).collect();
        let image = f.apply(&x)?;
        let residual: Vec<S> = idx.iter().map(|&i| image.coords()[i].clone() - x.coords()[i].clone()).collect();
        if residual.iter().all(|r| r.is_zero()) {
            continue;
        }
        let scale = f.lambda.pow_weight(w)?;
        let mut m = Matrix::<S>::identity(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = m[(a, b)].clone() - scale.clone() * f.rotation[(i, j)].clone();
            }
        }
        let Some(delta) = m.solve(&residual) else {
            continue;
        };
        let mut coords = x.into_coords();
        for (&i, d) in idx.iter().zip(delta) {
            coords[i] = coords[i].clone() + d;
        }
        x = GroupPoint::new(coords);
    }
    Ok(x)
}

fn coordinates_settled(x: &GroupPoint<f64>, y: &GroupPoint<f64>) -> bool {
    let scale = x.coords().iter().chain(y.coords()).fold(1.0f64, |m, c| m.max(c.abs()));
    x.coords().iter().zip(y.coords()).all(|(a, b)| (a - b).abs() <= 1e-13 * scale)
}

/// `max_x d(f(x), beta . delta_lambda P((-beta) . x))` over `samples` points
/// drawn in `[-2, 2]^n`. Zero exactly when `beta` is a fixed point.
pub fn centered_residual<S: Scalar>(
    norm: &HomogeneousNorm,
    f: &Similarity<S>,
    beta: &GroupPoint<S>,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let group = f.group();
    let mut rng = sampling::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let coords: Vec<f64> = (0..group.dim())
            .map(|_| rand::Rng::random_range(&mut rng, -2.0..=2.0))
            .collect();
        let x = GroupPoint::<S>::from_f64(&GroupPoint::new(coords)).expect("finite sample");
        let direct = f.apply(&x)?;
        let centered = group.bch_product(beta, &f.linear_part(&group.difference(beta, &x)?)?)?;
        worst = worst.max(norm.distance(&direct, &centered)?);
    }
    Ok(worst)
}

/// `f` rebuilt from its decomposition `(lambda, P, c)`.
pub fn rebuild<S: Scalar>(f: &Similarity<S>) -> Result<Similarity<S>> {
    Similarity::new(f.group(), f.lambda().clone(), f.rotation().clone(), f.translation().clone())
}

impl<S: Scalar> PartialEq for Similarity<S> {
    fn eq(&self, other: &Self) -> bool {
        self.lambda == other.lambda && self.rotation == other.rotation && self.translation == other.translation
    }
}

/// True when `f` is the identity map (exactly, or to [`ROTATION_TOL`]).
pub fn is_identity<S: Scalar>(f: &Similarity<S>) -> bool {
    let id = Similarity::<S>::identity(f.group());
    if S::EXACT {
        *f == id
    } else {
        (f.lambda.to_f64() - 1.0).abs() <= ROTATION_TOL
            && f.rotation.max_abs_diff(&id.rotation) <= ROTATION_TOL
            && f.translation.coords().iter().all(|c| c.to_f64().abs() <= ROTATION_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{LieAlgebra, LieAlgebraSpec};
    use crate::scalar::{rational, Rational};

    fn heisenberg3() -> Group {
        let spec = LieAlgebraSpec::new(vec![rational(1, 1), rational(1, 1), rational(2, 1)])
            .with_bracket(0, 1, 2, rational(1, 1));
        Group::new(LieAlgebra::new(spec).unwrap())
    }

    fn abelian(n: usize) -> Group {
        Group::new(LieAlgebra::new(LieAlgebraSpec::new(vec![rational(1, 1); n])).unwrap())
    }

    fn q(v: &[(i64, i64)]) -> GroupPoint<Rational> {
        GroupPoint::new(v.iter().map(|&(a, b)| rational(a, b)).collect())
    }

    /// Rotation by the Pythagorean angle (3/5, 4/5) in the (x, y) plane.
    fn planar(group: &Group) -> Matrix<Rational> {
        let mut m = Matrix::identity(group.dim());
        m[(0, 0)] = rational(3, 5);
        m[(0, 1)] = rational(-4, 5);
        m[(1, 0)] = rational(4, 5);
        m[(1, 1)] = rational(3, 5);
        m
    }

    #[test]
    fn apply_examples() {
        let g = abelian(1);
        let f = Similarity::dilatation(&g, rational(1, 2)).unwrap();
        assert_eq!(f.apply(&q(&[(4, 1)])).unwrap(), q(&[(2, 1)]));

        let g = heisenberg3();
        let x = q(&[(1, 1), (1, 1), (1, 1)]);
        assert_eq!(Similarity::identity(&g).apply(&x).unwrap(), x);
        let f = Similarity::dilatation(&g, rational(1, 2)).unwrap();
        assert_eq!(f.apply(&x).unwrap(), q(&[(1, 2), (1, 2), (1, 4)]));
    }

    #[test]
    fn compose_examples() {
        let g = heisenberg3();
        let f = Similarity::dilatation(&g, rational(2, 1)).unwrap();
        let h = Similarity::dilatation(&g, rational(3, 1)).unwrap();
        assert_eq!(*f.compose(&h).unwrap().lambda(), rational(6, 1));

        let u = q(&[(1, 1), (0, 1), (0, 1)]);
        let v = q(&[(0, 1), (1, 1), (0, 1)]);
        let tu = Similarity::translation_by(&g, u.clone()).unwrap();
        let tv = Similarity::translation_by(&g, v.clone()).unwrap();
        let composed = tu.compose(&tv).unwrap();
        assert_eq!(*composed.translation(), g.bch_product(&u, &v).unwrap());
        assert_eq!(*composed.lambda(), rational(1, 1));

        let rot = Similarity::new(&g, rational(1, 3), planar(&g), q(&[(1, 2), (-1, 1), (2, 3)])).unwrap();
        let other = Similarity::new(&g, rational(5, 2), planar(&g).transpose(), q(&[(0, 1), (3, 1), (1, 7)])).unwrap();
        let x = q(&[(2, 1), (1, 3), (-5, 4)]);
        assert_eq!(
            rot.compose(&other).unwrap().apply(&x).unwrap(),
            rot.apply(&other.apply(&x).unwrap()).unwrap()
        );
    }

    #[test]
    fn rank_two_generators_commute_on_the_plane() {
        // (x, y) -> (x + 1, y) against the rotation-free half scaling: on the
        // abelian plane the translation parts add, so both orders agree on
        // samples.
        let g = abelian(2);
        let gamma1 = Similarity::translation_by(&g, q(&[(1, 1), (0, 1)])).unwrap();
        let gamma2 = Similarity::translation_by(&g, q(&[(0, 1), (3, 1)])).unwrap();
        for x in [q(&[(0, 1), (0, 1)]), q(&[(5, 2), (-1, 3)])] {
            assert_eq!(
                gamma1.compose(&gamma2).unwrap().apply(&x).unwrap(),
                gamma2.compose(&gamma1).unwrap().apply(&x).unwrap()
            );
        }
    }

    #[test]
    fn inverse_examples() {
        let g = heisenberg3();
        let d = Similarity::dilatation(&g, rational(4, 1)).unwrap();
        assert_eq!(*d.inverse().unwrap().lambda(), rational(1, 4));
        let c = q(&[(1, 1), (2, 1), (3, 1)]);
        let t = Similarity::translation_by(&g, c.clone()).unwrap();
        assert_eq!(*t.inverse().unwrap().translation(), g.inverse(&c));

        let f = Similarity::new(&g, rational(2, 3), planar(&g), q(&[(1, 2), (-1, 1), (2, 3)])).unwrap();
        assert!(is_identity(&f.compose(&f.inverse().unwrap()).unwrap()));
        assert!(is_identity(&f.inverse().unwrap().compose(&f).unwrap()));

        let ff = f.to_f64();
        let x = GroupPoint::new(vec![0.3, -1.2, 2.5]);
        let back = ff.inverse().unwrap().apply(&ff.apply(&x).unwrap()).unwrap();
        for (a, b) in back.coords().iter().zip(x.coords()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_validation() {
        let g = heisenberg3();
        assert!(validate_rotation(&g, &planar(&g)).is_ok());
        // Reflection x -> -x only: orthogonal, but reverses the bracket.
        let mut refl = Matrix::<Rational>::identity(3);
        refl[(0, 0)] = rational(-1, 1);
        assert!(matches!(validate_rotation(&g, &refl), Err(Error::InvalidRotation(m)) if m.contains("automorphism")));
        // Swap x and z: mixes weight spaces.
        let mut swap = Matrix::<Rational>::zeros(3, 3);
        swap[(0, 2)] = rational(1, 1);
        swap[(2, 0)] = rational(1, 1);
        swap[(1, 1)] = rational(1, 1);
        assert!(matches!(validate_rotation(&g, &swap), Err(Error::InvalidRotation(m)) if m.contains("weight")));
        let mut scale = Matrix::<Rational>::identity(3);
        scale[(1, 1)] = rational(2, 1);
        assert!(matches!(validate_rotation(&g, &scale), Err(Error::InvalidRotation(m)) if m.contains("orthogonal")));
        assert!(validate_rotation(&g, &Matrix::<f64>::identity(2)).is_err());
    }

    #[test]
    fn fixed_point_examples() {
        let g = abelian(1);
        let norm = HomogeneousNorm::new(g.clone(), 1.0).unwrap();
        let half = Similarity::dilatation(&g, rational(1, 2)).unwrap();
        assert!(fixed_point(&norm, &half).unwrap().point.is_identity());

        let f = Similarity::new(&g, 0.5, Matrix::identity(1), GroupPoint::new(vec![1.0])).unwrap();
        let beta = fixed_point(&norm, &f).unwrap();
        assert!((beta.point.coords()[0] - 2.0).abs() < 1e-11);

        let g2 = abelian(2);
        let norm2 = HomogeneousNorm::new(g2.clone(), 1.0).unwrap();
        let gamma1 = Similarity::translation_by(&g2, q(&[(1, 1), (0, 1)])).unwrap();
        assert!(matches!(fixed_point(&norm2, &gamma1), Err(Error::NoContraction)));
    }

    #[test]
    fn expanding_maps_use_the_inverse() {
        let g = heisenberg3();
        let norm = HomogeneousNorm::new(g.clone(), 1.0).unwrap();
        let f = Similarity::new(&g, rational(3, 1), planar(&g), q(&[(1, 1), (-1, 2), (1, 3)])).unwrap();
        let beta = fixed_point(&norm, &f).unwrap().point;
        assert!(norm.distance(&f.apply(&beta).unwrap(), &beta).unwrap() < 1e-9);
    }

    #[test]
    fn centered_form_residuals() {
        let g = heisenberg3();
        let norm = HomogeneousNorm::new(g.clone(), 1.0).unwrap();
        let f = Similarity::new(&g, rational(1, 2), planar(&g), q(&[(1, 1), (2, 1), (-1, 1)])).unwrap();
        let beta = fixed_point(&norm, &f).unwrap().point;
        assert!(centered_residual(&norm, &f, &beta, 100, 11).unwrap() < 1e-9);

        let pure = Similarity::new(&g, rational(1, 2), planar(&g), g.identity()).unwrap();
        assert_eq!(centered_residual(&norm, &pure, &g.identity(), 20, 1).unwrap(), 0.0);

        let shifted = g.bch_product(&beta, &q(&[(1, 1), (0, 1), (0, 1)])).unwrap();
        assert!(centered_residual(&norm, &f, &shifted, 20, 1).unwrap() > 1e-3);
    }

    #[test]
    fn decomposition_round_trip() {
        let g = heisenberg3();
        let f = Similarity::new(&g, 0.75, planar(&g).to_f64(), GroupPoint::new(vec![0.2, -0.1, 0.4])).unwrap();
        let rebuilt = rebuild(&f).unwrap();
        let mut rng = sampling::rng(5);
        for _ in 0..100 {
            let x = sampling::dilated_box_point(&mut rng, &g);
            assert_eq!(f.apply(&x).unwrap(), rebuilt.apply(&x).unwrap());
        }
    }
}
