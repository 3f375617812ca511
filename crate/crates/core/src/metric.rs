//! Homogeneous gauge norm and the left-invariant distance.
//!
//! The gauge of `x` is the unique `t > 0` with `sum_i (x_i / t^{d_i})^2 = r^2`,
//! so the unit ball is the Euclidean ball of radius `r`. The left side is
//! strictly decreasing in `t`, which makes the root unique; it is bracketed by
//! doubling or halving, bisected, and polished with one Newton step.
//! Calibration shrinks `r` until sampled subadditivity holds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Group, GroupPoint};
use crate::sampling::{self, SeededRng};
use crate::scalar::Scalar;
use crate::similarity::Similarity;

pub const DEFAULT_TOL: f64 = 1e-12;

/// Relative slack below which a subadditivity excess counts as solver noise.
pub const SUBADDITIVITY_SLACK: f64 = 1e-9;

/// Shrink steps allowed before calibration gives up.
pub const MAX_SHRINK_STEPS: usize = 60;

#[derive(Clone, Debug)]
pub struct HomogeneousNorm {
    group: Group,
    gauge_radius: f64,
    tol: f64,
    weights: Vec<f64>,
}

impl HomogeneousNorm {
    pub fn new(group: Group, gauge_radius: f64) -> Result<Self> {
        if !(gauge_radius > 0.0 && gauge_radius.is_finite()) {
            return Err(Error::out_of_range("gauge_radius", format!("{gauge_radius} is not positive")));
        }
        let weights = group.algebra().weights().iter().map(|w| w.approx()).collect();
        Ok(Self {
            group,
            gauge_radius,
            tol: DEFAULT_TOL,
            weights,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::out_of_range("tol", format!("{tol} not in (0, 1)")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn gauge_radius(&self) -> f64 {
        self.gauge_radius
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn gauge_norm<S: Scalar>(&self, x: &GroupPoint<S>) -> f64 {
        let coords: Vec<f64> = x.coords().iter().map(Scalar::to_f64).collect();
        self.gauge_coords(&coords)
    }

    /// Gauge of raw `f64` coordinates.
    pub fn gauge_coords(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.weights.len());
        if x.iter().all(|&c| c == 0.0) {
            return 0.0;
        }
        let r2 = self.gauge_radius * self.gauge_radius;
        let excess = |t: f64| -> f64 {
            x.iter()
                .zip(&self.weights)
                .map(|(&c, &d)| {
                    let s = c / t.powf(d);
                    s * s
                })
                .sum::<f64>()
                - r2
        };

        let euclid = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let t0 = euclid / self.gauge_radius;
        let (mut lo, mut hi) = (t0, t0);
        if excess(t0) > 0.0 {
            while excess(hi) > 0.0 {
                lo = hi;
                hi *= 2.0;
            }
        } else {
            while excess(lo) < 0.0 {
                hi = lo;
                lo *= 0.5;
            }
        }
        while hi - lo > self.tol * hi {
            let mid = 0.5 * (lo + hi);
            if excess(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        let t = 0.5 * (lo + hi);
        let slope: f64 = x
            .iter()
            .zip(&self.weights)
            .map(|(&c, &d)| {
                let s = c / t.powf(d);
                -2.0 * d * s * s / t
            })
            .sum();
        if slope < 0.0 {
            let polished = t - excess(t) / slope;
            if polished >= lo && polished <= hi {
                return polished;
            }
        }
        t
    }

    /// `d(x, y) = ||(-x) . y||`.
    pub fn distance<S: Scalar>(&self, x: &GroupPoint<S>, y: &GroupPoint<S>) -> Result<f64> {
        Ok(self.gauge_norm(&self.group.difference(x, y)?))
    }

    pub fn ball_contains<S: Scalar>(&self, b: &Ball<S>, x: &GroupPoint<S>) -> Result<bool> {
        Ok(self.distance(&b.center, x)? < b.radius)
    }

    /// Points `center . delta_s(w)`, `w` uniform in the Euclidean ball of
    /// radius `r` and `s` uniform in `(0, radius)`.
    pub fn sample_ball(&self, b: &Ball<f64>, count: usize, seed: u64) -> Result<Vec<GroupPoint<f64>>> {
        let mut rng = sampling::rng(seed);
        self.sample_ball_with(b, count, &mut rng)
    }

    pub fn sample_ball_with(&self, b: &Ball<f64>, count: usize, rng: &mut SeededRng) -> Result<Vec<GroupPoint<f64>>> {
        self.group.check_point(&b.center)?;
        let dim = self.group.dim();
        (0..count)
            .map(|_| {
                let w = GroupPoint::new(sampling::euclidean_ball(rng, dim, self.gauge_radius));
                let s = loop {
                    let s = rand::Rng::random::<f64>(rng) * b.radius;
                    if s > 0.0 {
                        break s;
                    }
                };
                self.group.bch_product(&b.center, &self.group.dilate(&s, &w)?)
            })
            .collect()
    }

    /// Point at gauge exactly `radius` from `center` in a uniformly random
    /// Euclidean direction.
    pub fn sample_sphere_with(&self, b: &Ball<f64>, rng: &mut SeededRng) -> Result<GroupPoint<f64>> {
        let w: Vec<f64> = sampling::unit_sphere(rng, self.group.dim())
            .into_iter()
            .map(|c| c * self.gauge_radius)
            .collect();
        let w = self.group.dilate(&b.radius, &GroupPoint::new(w))?;
        self.group.bch_product(&b.center, &w)
    }

    /// Image of a ball under a similarity: `B(f(center), lambda(f) * radius)`.
    pub fn similarity_ball_image<S: Scalar>(&self, f: &Similarity<S>, b: &Ball<S>) -> Result<Ball<S>> {
        Ball::new(f.apply(&b.center)?, f.lambda().to_f64() * b.radius)
    }

    /// Sampled pairs `(x, y)` with `||x . y|| > (||x|| + ||y||)(1 + slack)`.
    pub fn subadditivity_check(&self, pairs: usize, seed: u64) -> Result<SubadditivityCheck> {
        let mut rng = sampling::rng(seed);
        let mut violations = 0;
        let mut worst_ratio: f64 = 0.0;
        let mut witness = None;
        for _ in 0..pairs {
            let x = sampling::dilated_box_point(&mut rng, &self.group);
            let y = sampling::dilated_box_point(&mut rng, &self.group);
            let lhs = self.gauge_norm(&self.group.bch_product(&x, &y)?);
            let rhs = self.gauge_norm(&x) + self.gauge_norm(&y);
            if rhs == 0.0 {
                continue;
            }
            let ratio = lhs / rhs;
            if ratio > worst_ratio {
                worst_ratio = ratio;
            }
            if ratio > 1.0 + SUBADDITIVITY_SLACK {
                violations += 1;
                if witness.is_none() {
                    witness = Some((x.into_coords(), y.into_coords()));
                }
            }
        }
        Ok(SubadditivityCheck {
            pairs,
            violations,
            worst_ratio,
            witness,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubadditivityCheck {
    pub pairs: usize,
    pub violations: usize,
    /// Largest `||x . y|| / (||x|| + ||y||)` seen.
    pub worst_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub gauge_radius: f64,
    pub shrink_steps: usize,
    pub samples: usize,
    pub shrink: f64,
    pub seed: u64,
    /// Violations found at each tried radius, in order.
    pub violations_per_round: Vec<usize>,
    pub worst_ratio: f64,
}

/// Starting from `r = 1`, shrinks `r` by `shrink` until `samples` sampled
/// pairs show no subadditivity violation.
pub fn calibrate_gauge_radius(group: &Group, samples: usize, shrink: f64, seed: u64) -> Result<Calibration> {
    if samples == 0 {
        return Err(Error::out_of_range("samples", "must be at least 1"));
    }
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::out_of_range("shrink", format!("{shrink} not in (0, 1)")));
    }
    let mut r = 1.0;
    let mut violations_per_round = Vec::new();
    for step in 0..=MAX_SHRINK_STEPS {
        let norm = HomogeneousNorm::new(group.clone(), r)?;
        let check = norm.subadditivity_check(samples, seed)?;
        violations_per_round.push(check.violations);
        if check.violations == 0 {
            return Ok(Calibration {
                gauge_radius: r,
                shrink_steps: step,
                samples,
                shrink,
                seed,
                violations_per_round,
                worst_ratio: check.worst_ratio,
            });
        }
        r *= shrink;
    }
    Err(Error::CalibrationFailed {
        steps: MAX_SHRINK_STEPS,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ball<S> {
    pub center: GroupPoint<S>,
    pub radius: f64,
}

impl<S: Scalar> Ball<S> {
    pub fn new(center: GroupPoint<S>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::out_of_range("radius", format!("{radius} is not positive")));
        }
        Ok(Self { center, radius })
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

    #[test]
    fn gauge_of_zero_and_abelian_is_euclidean() {
        let norm = HomogeneousNorm::new(abelian(3), 1.0).unwrap();
        assert_eq!(norm.gauge_norm(&GroupPoint::<f64>::identity(3)), 0.0);
        let x = GroupPoint::new(vec![3.0, 4.0, 12.0]);
        assert!((norm.gauge_norm(&x) - 13.0).abs() < 1e-12);
    }

    #[test]
    fn heisenberg_center_gauge() {
        // (4 / t^2)^2 = 1  =>  t = 2
        let norm = HomogeneousNorm::new(heisenberg3(), 1.0).unwrap();
        let x = GroupPoint::new(vec![0.0, 0.0, 4.0]);
        assert!((norm.gauge_norm(&x) - 2.0).abs() < 1e-12);
        assert!((norm.gauge_norm(&GroupPoint::new(vec![0.0, 0.0, -4.0])) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gauge_handles_extreme_scales() {
        let norm = HomogeneousNorm::new(heisenberg3(), 0.5).unwrap();
        for s in [1e-8, 1e-3, 1.0, 1e3, 1e8] {
            let x = GroupPoint::new(vec![0.3, -0.2, 0.1]);
            let base = norm.gauge_norm(&x);
            let scaled = norm.gauge_norm(&norm.group().dilate(&s, &x).unwrap());
            assert!((scaled - s * base).abs() <= 1e-10 * s * base, "s = {s}");
        }
    }

    #[test]
    fn distances() {
        let norm = HomogeneousNorm::new(abelian(1), 1.0).unwrap();
        let p = |v: f64| GroupPoint::new(vec![v]);
        assert!((norm.distance(&p(3.0), &p(7.0)).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(norm.distance(&p(3.0), &p(3.0)).unwrap(), 0.0);

        let norm = HomogeneousNorm::new(heisenberg3(), 1.0).unwrap();
        let x = GroupPoint::new(vec![rational(1, 1), rational(0, 1), rational(0, 1)]);
        let y = GroupPoint::new(vec![rational(1, 1), rational(1, 1), rational(0, 1)]);
        let d = norm.distance(&x, &y).unwrap();
        let expected = norm.gauge_norm(&GroupPoint::new(vec![0.0, 1.0, 0.5]));
        assert_eq!(d, expected);
    }

    #[test]
    fn ball_membership() {
        let norm = HomogeneousNorm::new(abelian(1), 1.0).unwrap();
        let b = Ball::new(GroupPoint::new(vec![0.0]), 1.0).unwrap();
        assert!(norm.ball_contains(&b, &GroupPoint::new(vec![0.0])).unwrap());
        assert!(!norm.ball_contains(&b, &GroupPoint::new(vec![2.0])).unwrap());

        let norm = HomogeneousNorm::new(heisenberg3(), 1.0).unwrap();
        let b = Ball::new(GroupPoint::<Rational>::identity(3), 2.0).unwrap();
        let boundary = GroupPoint::new(vec![rational(0, 1), rational(0, 1), rational(4, 1)]);
        assert!(!norm.ball_contains(&b, &boundary).unwrap());
        assert!(Ball::new(GroupPoint::<f64>::identity(1), 0.0).is_err());
    }

    #[test]
    fn sampled_points_lie_in_ball() {
        let norm = HomogeneousNorm::new(heisenberg3(), 0.7).unwrap();
        let b = Ball::new(GroupPoint::new(vec![1.0, -2.0, 0.5]), 3.0).unwrap();
        let pts = norm.sample_ball(&b, 500, 7).unwrap();
        assert_eq!(pts.len(), 500);
        assert!(pts.iter().all(|p| norm.ball_contains(&b, p).unwrap()));
        assert!(norm.sample_ball(&b, 0, 7).unwrap().is_empty());
        assert_eq!(pts, norm.sample_ball(&b, 500, 7).unwrap());
    }

    #[test]
    fn sampled_gauges_span_the_radius() {
        let norm = HomogeneousNorm::new(abelian(2), 1.0).unwrap();
        let b = Ball::new(GroupPoint::identity(2), 2.0).unwrap();
        let pts = norm.sample_ball(&b, 10_000, 3).unwrap();
        let mut bins = [0usize; 10];
        for p in &pts {
            let g = norm.gauge_norm(p);
            assert!(g < 2.0);
            bins[((g / 0.2) as usize).min(9)] += 1;
        }
        assert!(bins.iter().all(|&c| c > 0), "{bins:?}");
    }

    #[test]
    fn abelian_calibration_is_immediate() {
        let cal = calibrate_gauge_radius(&abelian(3), 200, 0.5, 1).unwrap();
        assert_eq!(cal.gauge_radius, 1.0);
        assert_eq!(cal.shrink_steps, 0);
        assert!(calibrate_gauge_radius(&abelian(3), 0, 0.5, 1).is_err());
        assert!(calibrate_gauge_radius(&abelian(3), 10, 1.0, 1).is_err());
    }
}
