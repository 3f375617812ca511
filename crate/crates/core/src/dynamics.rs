//! Contraction dynamics on radiant models `N - {0}` with holonomy fixing 0:
//! orbits, common fixed points, the radius function, the pseudo-distance,
//! the Hopf-model recurrence experiment and the G-map.

use serde::Serialize;

use crate::algebra::AlgebraVector;
use crate::error::{Error, Result};
use crate::geodesy::{geodesic_point, segment_between};
use crate::group::GroupPoint;
use crate::metric::{Ball, HomogeneousNorm};
use crate::sampling;
use crate::scalar::Scalar;
use crate::similarity::{fixed_point, Similarity};

/// Residual below which a point counts as fixed.
pub const FIXED_TOL: f64 = 1e-9;

/// Relative tolerance for scaling identities (radius, pseudo-distance).
pub const SCALING_TOL: f64 = 1e-9;

pub const DEFAULT_EPSILON: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct RadiantModel<S> {
    norm: HomogeneousNorm,
    generators: Vec<Similarity<S>>,
}

impl<S: Scalar> RadiantModel<S> {
    /// Every generator must fix the deleted point `0`.
    pub fn new(norm: HomogeneousNorm, generators: Vec<Similarity<S>>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            norm.group().algebra().check_dim(g.group().dim())?;
            let image = g.apply(&norm.group().identity())?;
            if norm.gauge_norm(&image) > 1e-12 {
                return Err(Error::out_of_range(
                    "generators",
                    format!("generator {} moves the deleted point to {:?}", i + 1, image.to_f64().coords()),
                ));
            }
        }
        Ok(Self { norm, generators })
    }

    pub fn norm(&self) -> &HomogeneousNorm {
        &self.norm
    }

    pub fn generators(&self) -> &[Similarity<S>] {
        &self.generators
    }

    /// First generator with `lambda != 1`, oriented to contract.
    pub fn contraction(&self) -> Result<Similarity<S>> {
        let g = self
            .generators
            .iter()
            .find(|g| *g.lambda() != S::one())
            .ok_or(Error::NoContraction)?;
        if *g.lambda() < S::one() {
            Ok(g.clone())
        } else {
            g.inverse()
        }
    }
}

/// `[x, f(x), ..., f^n(x)]`.
pub fn orbit<S: Scalar>(f: &Similarity<S>, x: &GroupPoint<S>, n: usize) -> Result<Vec<GroupPoint<S>>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(x.clone());
    for _ in 0..n {
        let next = f.apply(out.last().expect("nonempty"))?;
        out.push(next);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FixedPointVerdict {
    #[serde(rename = "SHARED")]
    Shared,
    #[serde(rename = "NOT-SHARED")]
    NotShared,
    #[serde(rename = "NOT-APPLICABLE")]
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommonFixedPoint {
    pub verdict: FixedPointVerdict,
    pub rank: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    /// `d(g(a), a)` per generator.
    pub residuals: Vec<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// Fixed point `a` of a contracting generator, checked against every
/// generator. Dilatation rank above one is rejected as not applicable, with
/// the failure of the first generator to have a fixed point as witness.
pub fn common_fixed_point<S: Scalar>(
    norm: &HomogeneousNorm,
    generators: &[Similarity<S>],
    rank: u8,
) -> Result<CommonFixedPoint> {
    if rank != 1 {
        let witness = match generators.first() {
            None => "no generators".to_string(),
            Some(g) => {
                let moved = norm.distance(&norm.group().identity(), &g.apply(&norm.group().identity())?)?;
                match fixed_point(norm, g) {
                    Err(e) => format!("generator 1: {e}; lambda = 1 and it moves 0 by {moved}"),
                    Ok(fp) => format!("generator 1 fixes {:?}", fp.point.to_f64().coords()),
                }
            }
        };
        return Ok(CommonFixedPoint {
            verdict: FixedPointVerdict::NotApplicable,
            rank,
            point: None,
            residuals: Vec::new(),
            tolerance: FIXED_TOL,
            witness: Some(format!("dilatation rank {rank}; {witness}")),
        });
    }
    let g = generators
        .iter()
        .find(|g| *g.lambda() != S::one())
        .ok_or(Error::NoContraction)?;
    let a = fixed_point(norm, g)?.point;
    let residuals = generators
        .iter()
        .map(|g| norm.distance(&g.apply(&a)?, &a))
        .collect::<Result<Vec<_>>>()?;
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    let shared = worst < FIXED_TOL;
    Ok(CommonFixedPoint {
        verdict: if shared {
            FixedPointVerdict::Shared
        } else {
            FixedPointVerdict::NotShared
        },
        rank,
        point: Some(a.to_f64().into_coords()),
        witness: (!shared).then(|| format!("worst residual {worst}")),
        residuals,
        tolerance: FIXED_TOL,
    })
}

/// `r(p) = d(p, 0)`, the radius of the largest ball about `p` missing 0.
pub fn radius_function<S: Scalar>(model: &RadiantModel<S>, p: &GroupPoint<S>) -> Result<f64> {
    model.norm.group().check_point(p)?;
    if p.is_identity() {
        return Err(Error::DeletedPoint);
    }
    Ok(model.norm.gauge_norm(p))
}

/// `d(p, q) / (r(p) + r(q))`.
pub fn pseudo_distance<S: Scalar>(model: &RadiantModel<S>, p: &GroupPoint<S>, q: &GroupPoint<S>) -> Result<f64> {
    let denom = radius_function(model, p)? + radius_function(model, q)?;
    Ok(model.norm.distance(p, q)? / denom)
}

/// `log((-p) . g(p . exp v))`.
pub fn g_map<S: Scalar>(
    model: &RadiantModel<S>,
    p: &GroupPoint<S>,
    g: &Similarity<S>,
    v: &AlgebraVector<S>,
) -> Result<AlgebraVector<S>> {
    let group = model.norm.group();
    group.check_point(p)?;
    group.algebra().check_dim(v.dim())?;
    if p.is_identity() {
        return Err(Error::DeletedPoint);
    }
    let moved = g.apply(&group.bch_product(p, &GroupPoint::exp(v.clone()))?)?;
    Ok(group.difference(p, &moved)?.log())
}

/// `G(0)` as predicted: the direction of the segment from `p` to `g(p)`.
pub fn g_map_origin<S: Scalar>(model: &RadiantModel<S>, p: &GroupPoint<S>, g: &Similarity<S>) -> Result<AlgebraVector<S>> {
    Ok(segment_between(model.norm.group(), p, &g.apply(p)?)?.direction)
}

#[derive(Clone, Debug, Serialize)]
pub struct Recurrence {
    pub n: usize,
    pub t: f64,
    pub k: i64,
    /// `pseudo(f^{-k} gamma(t), gamma(0))`.
    pub pseudo: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    pub lambda: f64,
    /// `r(gamma(t_j)) / r(gamma(t_i))`.
    pub radius_ratio: f64,
    /// `(1 + eps) / (1 - 3 eps) * radius_ratio`.
    pub bound: f64,
    pub margin: f64,
    /// `|r(g p) - lambda r(p)| / (lambda r(p))` at `p = gamma(t_i)`.
    pub radius_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentCheck {
    pub name: &'static str,
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FriedExperimentReport {
    pub epsilon: f64,
    pub horizon: usize,
    pub start: Vec<f64>,
    pub contraction: f64,
    pub recurrences: Vec<Recurrence>,
    pub pairs: Vec<PairRecord>,
    pub checks: Vec<ExperimentCheck>,
}

impl FriedExperimentReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&ExperimentCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `lambda(g_{0n})` for each recurrence after the first.
    pub fn lambda_0n(&self) -> Vec<(usize, f64)> {
        self.pairs.iter().filter(|p| p.i == 0).map(|p| (p.j, p.lambda)).collect()
    }

    /// CSV `n,t_n,k_n,lambda,margin` with `lambda = lambda(g_{0n})`.
    pub fn csv(&self) -> String {
        let mut out = String::from("n,t_n,k_n,lambda,margin\n");
        for r in &self.recurrences {
            let (lambda, margin) = if r.n == 0 {
                (1.0, 0.0)
            } else {
                self.pairs
                    .iter()
                    .find(|p| p.i == 0 && p.j == r.n)
                    .map_or((f64::NAN, f64::NAN), |p| (p.lambda, p.margin))
            };
            out.push_str(&format!("{},{},{},{},{}\n", r.n, r.t, r.k, lambda, margin));
        }
        out
    }
}

pub const CHECK_LAMBDA_DECAY: &str = "lambda-decay";
pub const CHECK_RADIUS_EQUIVARIANCE: &str = "radius-equivariance";
pub const CHECK_APPROXIMATION_BOUND: &str = "approximation-bound";
pub const CHECK_PSEUDO_UNIFORMITY: &str = "pseudo-uniformity";
pub const CHECK_PSEUDO_INVARIANCE: &str = "pseudo-invariance";

/// Points sampled in each maximal ball for the uniformity check.
const UNIFORMITY_SAMPLES: usize = 64;

/// Follows the incomplete geodesic `gamma(t) = start . exp(-t start)`, which
/// reaches the deleted point at `t = 1`, and records the times `t_n` at which
/// `f^{-k_n} gamma(t_n)` returns within pseudo-distance `epsilon` of
/// `gamma(0)`. With `lambda < 1` the natural parameter is `s` with
/// `1 - t = lambda^s`; the `n`-th return is searched for in `s in [n - 1, n + 1]`
/// with `k = n`, then `k_n` is taken as the best of `n - 1, n, n + 1`.
pub fn fried_experiment<S: Scalar>(
    model: &RadiantModel<S>,
    start: &GroupPoint<S>,
    epsilon: f64,
    horizon: usize,
    seed: u64,
) -> Result<FriedExperimentReport> {
    if !(epsilon > 0.0 && epsilon < 0.2) {
        return Err(Error::out_of_range("epsilon", format!("{epsilon} not in (0, 1/5)")));
    }
    if horizon == 0 {
        return Err(Error::out_of_range("horizon", "must be at least 1"));
    }
    let group = model.norm.group();
    group.check_point(start)?;
    if start.is_identity() {
        return Err(Error::DeletedPoint);
    }
    let f = model.contraction()?;
    let lambda = f.lambda().to_f64();
    let seg = segment_between(group, start, &group.identity())?;
    let seg64 = crate::geodesy::GeodesicSegment::new(seg.base.to_f64(), seg.direction.to_f64());
    let base64 = seg64.base.clone();
    let model64 = RadiantModel {
        norm: model.norm.clone(),
        generators: Vec::new(),
    };

    let t_of = |s: f64| 1.0 - lambda.powf(s);
    let inverse64 = f.inverse()?.to_f64();
    let mut recurrences = vec![Recurrence {
        n: 0,
        t: 0.0,
        k: 0,
        pseudo: 0.0,
    }];
    let mut found: Vec<(usize, S, Similarity<S>)> = vec![(0, S::zero(), Similarity::identity(group))];
    let mut pull64 = Similarity::<f64>::identity(group);
    for n in 1..=horizon {
        pull64 = inverse64.compose(&pull64)?;
        let phi = |s: f64| -> Result<f64> {
            let p = geodesic_point(group, &seg64, &t_of(s))?;
            pseudo_distance(&model64, &pull64.apply(&p)?, &base64)
        };
        let s = minimize(&phi, n as f64 - 1.0, n as f64 + 1.0)?;
        let t = S::from_f64(t_of(s)).ok_or_else(|| Error::out_of_range("t", "not finite"))?;
        if t >= S::one() {
            break;
        }
        let point = geodesic_point(group, &seg, &t)?;
        let mut best: Option<(i64, f64, Similarity<S>)> = None;
        for k in [n as i64 - 1, n as i64, n as i64 + 1] {
            let pull = f.integer_power(-k)?;
            let d = pseudo_distance(model, &pull.apply(&point)?, start)?;
            if best.as_ref().is_none_or(|b| d < b.1) {
                best = Some((k, d, pull));
            }
        }
        let (k, pseudo, _) = best.expect("three candidates");
        if pseudo < epsilon && k > recurrences.last().expect("nonempty").k {
            recurrences.push(Recurrence {
                n: recurrences.len(),
                t: t.to_f64(),
                k,
                pseudo,
            });
            found.push((recurrences.len() - 1, t, f.integer_power(k)?));
        }
    }
    if recurrences.len() < 2 {
        return Err(Error::NoRecurrence { horizon });
    }

    let points: Vec<GroupPoint<S>> = found
        .iter()
        .map(|(_, t, _)| geodesic_point(group, &seg, t))
        .collect::<Result<_>>()?;
    let radii: Vec<f64> = points.iter().map(|p| radius_function(model, p)).collect::<Result<_>>()?;
    let factor = (1.0 + epsilon) / (1.0 - 3.0 * epsilon);
    let mut pairs = Vec::new();
    for i in 0..found.len() {
        for j in (i + 1)..found.len() {
            let g = f.integer_power(recurrences[j].k - recurrences[i].k)?;
            let lam = g.lambda().to_f64();
            let radius_ratio = radii[j] / radii[i];
            let bound = factor * radius_ratio;
            let moved = radius_function(model, &g.apply(&points[i])?)?;
            pairs.push(PairRecord {
                i,
                j,
                lambda: lam,
                radius_ratio,
                bound,
                margin: bound - lam,
                radius_error: (moved - lam * radii[i]).abs() / (lam * radii[i]),
            });
        }
    }

    let decay_ok = pairs
        .iter()
        .filter(|p| p.i == 0)
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| w[1].lambda < w[0].lambda);
    let mut checks = vec![ExperimentCheck {
        name: CHECK_LAMBDA_DECAY,
        passed: decay_ok && pairs.iter().all(|p| p.lambda > 0.0 && p.lambda < 1.0),
        worst: pairs.iter().filter(|p| p.i == 0).map(|p| p.lambda).fold(f64::INFINITY, f64::min),
        tolerance: 0.0,
        samples: pairs.len(),
    }];
    let worst_radius = pairs.iter().map(|p| p.radius_error).fold(0.0, f64::max);
    checks.push(ExperimentCheck {
        name: CHECK_RADIUS_EQUIVARIANCE,
        passed: worst_radius <= SCALING_TOL,
        worst: worst_radius,
        tolerance: SCALING_TOL,
        samples: pairs.len(),
    });
    let worst_margin = pairs.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min);
    checks.push(ExperimentCheck {
        name: CHECK_APPROXIMATION_BOUND,
        passed: worst_margin >= 0.0,
        worst: worst_margin,
        tolerance: 0.0,
        samples: pairs.len(),
    });

    // Uniformity and invariance, sampled in the maximal balls about gamma(t_n).
    let mut rng = sampling::rng(seed);
    let uniform_bound = 2.0 * epsilon / (1.0 - epsilon);
    let mut worst_uniform: f64 = 0.0;
    let mut uniform_hits = 0;
    let mut worst_invariance: f64 = 0.0;
    let mut invariance_samples = 0;
    for (idx, p) in points.iter().enumerate() {
        let p64 = p.to_f64();
        let ball = Ball::new(p64.clone(), radii[idx])?;
        for x in model.norm.sample_ball_with(&ball, UNIFORMITY_SAMPLES, &mut rng)? {
            if x.is_identity() {
                continue;
            }
            let Some(x) = GroupPoint::<S>::from_f64(&x) else {
                continue;
            };
            let pd = pseudo_distance(model, p, &x)?;
            if pd < epsilon {
                uniform_hits += 1;
                worst_uniform = worst_uniform.max(model.norm.distance(p, &x)? / radii[idx]);
            }
            let last = found.last().map(|(_, _, g)| g);
            for g in model.generators.iter().chain(last) {
                let moved = pseudo_distance(model, &g.apply(p)?, &g.apply(&x)?)?;
                if pd > 0.0 {
                    worst_invariance = worst_invariance.max((moved - pd).abs() / pd);
                    invariance_samples += 1;
                }
            }
        }
    }
    checks.push(ExperimentCheck {
        name: CHECK_PSEUDO_UNIFORMITY,
        passed: worst_uniform < uniform_bound,
        worst: worst_uniform,
        tolerance: uniform_bound,
        samples: uniform_hits,
    });
    checks.push(ExperimentCheck {
        name: CHECK_PSEUDO_INVARIANCE,
        passed: worst_invariance <= SCALING_TOL,
        worst: worst_invariance,
        tolerance: SCALING_TOL,
        samples: invariance_samples,
    });

    Ok(FriedExperimentReport {
        epsilon,
        horizon,
        start: start.to_f64().into_coords(),
        contraction: lambda,
        recurrences,
        pairs,
        checks,
    })
}

/// Grid search then golden-section refinement of `phi` on `[a, b]`.
fn minimize(phi: &impl Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
    const GRID: usize = 64;
    let h = (b - a) / GRID as f64;
    let mut best = (f64::INFINITY, a);
    for k in 0..=GRID {
        let s = a + k as f64 * h;
        let v = phi(s)?;
        if v < best.0 {
            best = (v, s);
        }
    }
    let (mut lo, mut hi) = ((best.1 - h).max(a), (best.1 + h).min(b));
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (phi(c)?, phi(d)?);
    while hi - lo > 1e-13 * (1.0 + hi.abs()) {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = phi(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = phi(d)?;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok(if phi(mid)? <= best.0 { mid } else { best.1 })
}
