//! Left-invariant geodesics `gamma(t) = x . exp(t v)` and sampled convexity
//! checks.

use serde::Serialize;

use crate::algebra::AlgebraVector;
use crate::error::{Error, Result};
use crate::group::{Group, GroupPoint};
use crate::metric::{Ball, HomogeneousNorm};
use crate::sampling;
use crate::scalar::Scalar;

/// Threshold on the distance to the deleted point below which a geodesic is
/// considered blocked.
pub const BLOCKED_THRESHOLD: f64 = 1e-8;

/// Relative slack (times the radius) allowed on convexity margins.
pub const CONVEXITY_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicSegment<S> {
    pub base: GroupPoint<S>,
    pub direction: AlgebraVector<S>,
}

impl<S: Scalar> GeodesicSegment<S> {
    pub fn new(base: GroupPoint<S>, direction: AlgebraVector<S>) -> Self {
        Self { base, direction }
    }

    /// The segment from `gamma(s)` that traces the rest of `self`.
    pub fn tail(&self, group: &Group, s: &S) -> Result<Self> {
        let start = geodesic_point(group, self, s)?;
        Ok(Self::new(start, self.direction.scale(&(S::one() - s.clone()))))
    }
}

fn check_unit_interval<S: Scalar>(t: &S) -> Result<()> {
    if *t < S::zero() || *t > S::one() {
        return Err(Error::out_of_range("t", format!("{} not in [0, 1]", t.to_f64())));
    }
    Ok(())
}

pub fn geodesic_point<S: Scalar>(group: &Group, seg: &GeodesicSegment<S>, t: &S) -> Result<GroupPoint<S>> {
    check_unit_interval(t)?;
    group.bch_product(&seg.base, &GroupPoint::exp(seg.direction.scale(t)))
}

/// The unique segment from `x` to `y`: direction `log((-x) . y)`.
pub fn segment_between<S: Scalar>(group: &Group, x: &GroupPoint<S>, y: &GroupPoint<S>) -> Result<GeodesicSegment<S>> {
    Ok(GeodesicSegment::new(x.clone(), group.difference(x, y)?.log()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: f64,
    pub point: Vec<f64>,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub radius: f64,
    pub pairs: usize,
    pub interior_samples: usize,
    /// Smallest signed margin seen at an interior point (negative = outside).
    pub worst_margin: f64,
    /// Margins down to `-tolerance` still pass.
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ConvexityWitness>,
}

/// Samples `pairs` pairs in `B(center, radius)` and checks that
/// `interior_samples` evenly spaced interior points of each connecting
/// segment stay inside.
pub fn check_ball_convexity(
    norm: &HomogeneousNorm,
    ball: &Ball<f64>,
    pairs: usize,
    interior_samples: usize,
    seed: u64,
) -> Result<ConvexityReport> {
    let center = ball.center.clone();
    let radius = ball.radius;
    check_set_convexity(norm, ball, pairs, interior_samples, seed, |p| {
        Ok(radius - norm.distance(&center, p)?)
    })
}

/// The convexity harness for an arbitrary set inside `ball`, described by a
/// signed margin (positive inside). Pairs are drawn from the ball and kept
/// when both endpoints lie in the set.
pub fn check_set_convexity(
    norm: &HomogeneousNorm,
    ball: &Ball<f64>,
    pairs: usize,
    interior_samples: usize,
    seed: u64,
    margin: impl Fn(&GroupPoint<f64>) -> Result<f64>,
) -> Result<ConvexityReport> {
    if pairs == 0 || interior_samples == 0 {
        return Err(Error::out_of_range("pairs", "pair and interior counts must be at least 1"));
    }
    let group = norm.group();
    let mut rng = sampling::rng(seed);
    let tolerance = CONVEXITY_SLACK * ball.radius;
    let mut worst_margin = f64::INFINITY;
    let mut witness = None;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < pairs {
        attempts += 1;
        if attempts > 1000 * pairs {
            return Err(Error::out_of_range("pairs", "could not sample enough pairs inside the set"));
        }
        let mut ends = norm.sample_ball_with(ball, 2, &mut rng)?;
        let y = ends.pop().expect("two samples");
        let x = ends.pop().expect("two samples");
        if margin(&x)? <= 0.0 || margin(&y)? <= 0.0 {
            continue;
        }
        accepted += 1;
        let seg = segment_between(group, &x, &y)?;
        for k in 1..=interior_samples {
            let t = k as f64 / (interior_samples + 1) as f64;
            let p = geodesic_point(group, &seg, &t)?;
            let m = margin(&p)?;
            if m < worst_margin {
                worst_margin = m;
                if m < -tolerance {
                    witness = Some(ConvexityWitness {
                        x: x.coords().to_vec(),
                        y: y.coords().to_vec(),
                        t,
                        point: p.coords().to_vec(),
                        margin: m,
                    });
                }
            }
        }
    }
    Ok(ConvexityReport {
        radius: ball.radius,
        pairs,
        interior_samples,
        worst_margin,
        tolerance,
        passed: worst_margin >= -tolerance,
        witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub sequences: usize,
    /// `n` values at which the deviation is recorded.
    pub steps: Vec<u32>,
    /// Max over sequences of the Euclidean deviation between the direction
    /// towards `q_n` and the direction towards the limit `q`.
    pub deviations: Vec<f64>,
    /// Largest `n * deviation(n)`; bounded when the rate is `O(1/n)`.
    pub rate_constant: f64,
    /// Smallest interior margin along segments ending on the boundary.
    pub boundary_margin: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Directions to `q_n = q . delta_{1/n}(w)` must converge to the direction to
/// `q`; limits on the boundary sphere must keep segment interiors in the ball.
pub fn check_convexity_stability(
    norm: &HomogeneousNorm,
    ball: &Ball<f64>,
    sequences: usize,
    seed: u64,
) -> Result<StabilityReport> {
    let group = norm.group();
    let mut rng = sampling::rng(seed);
    let steps: Vec<u32> = (0..=10).map(|k| 1u32 << k).collect();
    let mut deviations = vec![0.0f64; steps.len()];
    let mut boundary_margin = f64::INFINITY;
    let tolerance = CONVEXITY_SLACK * ball.radius;
    for _ in 0..sequences {
        let p = norm.sample_ball_with(ball, 1, &mut rng)?.pop().expect("one sample");
        let q = norm.sample_sphere_with(ball, &mut rng)?;
        let limit = segment_between(group, &p, &q)?.direction;
        let w = GroupPoint::new(sampling::euclidean_ball(&mut rng, group.dim(), ball.radius));
        for (slot, &n) in deviations.iter_mut().zip(&steps) {
            let qn = group.bch_product(&q, &group.dilate(&(1.0 / n as f64), &w)?)?;
            let dir = segment_between(group, &p, &qn)?.direction;
            *slot = slot.max(dir.sub(&limit).euclidean_norm());
        }
        let seg = segment_between(group, &p, &q)?;
        for k in 1..20 {
            let t = k as f64 / 20.0;
            let point = geodesic_point(group, &seg, &t)?;
            boundary_margin = boundary_margin.min(ball.radius - norm.distance(&ball.center, &point)?);
        }
    }
    let rate_constant = steps
        .iter()
        .zip(&deviations)
        .map(|(&n, d)| n as f64 * d)
        .fold(0.0, f64::max);
    let last = *deviations.last().expect("nonempty");
    let passed = sequences == 0
        || (last <= 2.0 * rate_constant / *steps.last().expect("nonempty") as f64 + 1e-12
            && boundary_margin >= -tolerance);
    Ok(StabilityReport {
        sequences,
        steps,
        deviations,
        rate_constant,
        boundary_margin: if sequences == 0 { 0.0 } else { boundary_margin },
        tolerance,
        passed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Visibility {
    #[serde(rename = "BLOCKED")]
    Blocked,
    #[serde(rename = "VISIBLE-ON-[0,1]")]
    Visible,
}

#[derive(Clone, Debug, Serialize)]
pub struct VisibilityResult {
    pub verdict: Visibility,
    pub min_distance: f64,
    pub t_min: f64,
    pub threshold: f64,
}

/// Closest approach of `t -> p . exp(t v)` to `deleted` on `[0, 1]`: a grid
/// search followed by golden-section refinement around the best grid point.
pub fn visibility_probe(
    norm: &HomogeneousNorm,
    p: &GroupPoint<f64>,
    v: &AlgebraVector<f64>,
    deleted: &GroupPoint<f64>,
    steps: usize,
) -> Result<VisibilityResult> {
    let group = norm.group();
    if norm.distance(p, deleted)? == 0.0 {
        return Err(Error::DeletedPoint);
    }
    let seg = GeodesicSegment::new(p.clone(), v.clone());
    let dist = |t: f64| -> Result<f64> { norm.distance(deleted, &geodesic_point(group, &seg, &t)?) };
    let steps = steps.max(2);
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let d = dist(t)?;
        if d < best.0 {
            best = (d, t);
        }
    }
    let h = 1.0 / steps as f64;
    let (mut a, mut b) = ((best.1 - h).max(0.0), (best.1 + h).min(1.0));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (dist(c)?, dist(d)?);
    for _ in 0..100 {
        if b - a < 1e-14 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = dist(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = dist(d)?;
        }
    }
    for (f, t) in [(fc, c), (fd, d)] {
        if f < best.0 {
            best = (f, t);
        }
    }
    Ok(VisibilityResult {
        verdict: if best.0 < BLOCKED_THRESHOLD {
            Visibility::Blocked
        } else {
            Visibility::Visible
        },
        min_distance: best.0,
        t_min: best.1,
        threshold: BLOCKED_THRESHOLD,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub coords: Vec<f64>,
    pub gauge: f64,
}

/// `samples + 1` evenly spaced points of the segment with their gauge norms.
pub fn trace<S: Scalar>(norm: &HomogeneousNorm, seg: &GeodesicSegment<S>, samples: usize) -> Result<Vec<TraceRow>> {
    let samples = samples.max(1);
    (0..=samples)
        .map(|k| {
            let t = S::from_i64(k as i64) / S::from_i64(samples as i64);
            let p = geodesic_point(norm.group(), seg, &t)?;
            Ok(TraceRow {
                t: t.to_f64(),
                coords: p.coords().iter().map(Scalar::to_f64).collect(),
                gauge: norm.gauge_norm(&p),
            })
        })
        .collect()
}

/// CSV with header `t,x1,...,xn,gauge`.
pub fn trace_csv(rows: &[TraceRow]) -> String {
    let dim = rows.first().map_or(0, |r| r.coords.len());
    let mut out = String::from("t");
    for i in 1..=dim {
        out.push_str(&format!(",x{i}"));
    }
    out.push_str(",gauge\n");
    for r in rows {
        out.push_str(&format!("{}", r.t));
        for c in &r.coords {
            out.push_str(&format!(",{c}"));
        }
        out.push_str(&format!(",{}\n", r.gauge));
    }
    out
}
