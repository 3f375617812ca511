mod common;

use common::group;
use nilgeo::algebra::AlgebraVector;
use nilgeo::catalog;
use nilgeo::dynamics::{g_map, pseudo_distance, radius_function, RadiantModel};
use nilgeo::geodesy::{geodesic_point, segment_between};
use nilgeo::scalar::rational;
use nilgeo::{Ball, Group, GroupPoint, HomogeneousNorm, Rational, Similarity};
use num_traits::Zero;
use proptest::prelude::*;

const NAMES: &[&str] = &[
    "abelian3",
    "heisenberg3",
    "heisenberg5",
    "engel4",
    "free-nilpotent-2-3",
    "quaternionic-heisenberg7",
    "damek-ricci6",
];

fn q() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| rational(n, d))
}

fn coords(dim: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(q(), dim)
}

fn positive() -> impl Strategy<Value = Rational> {
    (1i64..=12, 1i64..=6).prop_map(|(n, d)| rational(n, d))
}

/// A catalog group with `k` random points.
fn group_and_points(k: usize) -> impl Strategy<Value = (&'static str, Vec<GroupPoint<Rational>>)> {
    prop::sample::select(NAMES).prop_flat_map(move |name| {
        let dim = group(name).dim();
        (Just(name), prop::collection::vec(coords(dim).prop_map(GroupPoint::new), k))
    })
}

fn norm(g: &Group) -> HomogeneousNorm {
    HomogeneousNorm::new(g.clone(), 1.0).unwrap()
}

/// A similarity with a sample rotation chosen by index.
fn similarity(name: &str, lambda: Rational, rot: usize, c: GroupPoint<Rational>) -> Similarity<Rational> {
    let e = catalog::get(name).unwrap();
    let r = e.rotations[rot % e.rotations.len()].clone();
    Similarity::new(&e.group, lambda, r, c).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobi_identity((name, pts) in group_and_points(3)) {
        let alg = group(name).algebra().clone();
        let [a, b, c] = [0, 1, 2].map(|i| pts[i].log());
        let br = |x: &AlgebraVector<Rational>, y: &AlgebraVector<Rational>| alg.bracket(x, y).unwrap();
        let sum = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).add(&br(&c, &br(&a, &b)));
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn associativity_and_inverses((name, pts) in group_and_points(3)) {
        let g = group(name);
        let (x, y, z) = (&pts[0], &pts[1], &pts[2]);
        let left = g.bch_product(&g.bch_product(x, y).unwrap(), z).unwrap();
        let right = g.bch_product(x, &g.bch_product(y, z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert!(g.bch_product(x, &g.inverse(x)).unwrap().is_identity());
        prop_assert_eq!(g.bch_product(&g.identity(), x).unwrap(), x.clone());
    }

    #[test]
    fn dilatations_are_automorphisms((name, pts) in group_and_points(2), t in positive(), s in positive()) {
        let g = group(name);
        let (x, y) = (&pts[0], &pts[1]);
        let lhs = g.dilate(&t, &g.bch_product(x, y).unwrap()).unwrap();
        let rhs = g.bch_product(&g.dilate(&t, x).unwrap(), &g.dilate(&t, y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let composed = g.dilate(&s, &g.dilate(&t, x).unwrap()).unwrap();
        prop_assert_eq!(composed, g.dilate(&(s * t), x).unwrap());
    }

    #[test]
    fn rotations_are_automorphisms((name, pts) in group_and_points(2), rot in 0usize..4) {
        let e = catalog::get(name).unwrap();
        let p = &e.rotations[rot % e.rotations.len()];
        let g = &e.group;
        let apply = |v: &GroupPoint<Rational>| GroupPoint::new(p.mul_vec(v.coords()));
        let lhs = apply(&g.bch_product(&pts[0], &pts[1]).unwrap());
        let rhs = g.bch_product(&apply(&pts[0]), &apply(&pts[1])).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gauge_norm_axioms((name, pts) in group_and_points(1), t in positive()) {
        let g = group(name);
        let n = norm(&g);
        let x = &pts[0];
        let gx = n.gauge_norm(x);
        prop_assert_eq!(gx == 0.0, x.is_identity());
        prop_assert!(close(n.gauge_norm(&g.inverse(x)), gx, 1e-12));
        let scaled = n.gauge_norm(&g.dilate(&t, x).unwrap());
        prop_assert!(close(scaled, t.to_f64_lossy() * gx, 1e-9));
    }

    #[test]
    fn distance_is_left_invariant_and_symmetric((name, pts) in group_and_points(3)) {
        let g = group(name);
        let n = norm(&g);
        let (x, y, z) = (&pts[0], &pts[1], &pts[2]);
        let d = n.distance(x, y).unwrap();
        let moved = n.distance(&g.bch_product(z, x).unwrap(), &g.bch_product(z, y).unwrap()).unwrap();
        prop_assert!(close(d, moved, 1e-9));
        prop_assert!(close(d, n.distance(y, x).unwrap(), 1e-12));
    }

    #[test]
    fn similarities_scale_distances(
        (name, pts) in group_and_points(3),
        lambda in positive(),
        rot in 0usize..4,
    ) {
        let g = group(name);
        let n = norm(&g);
        let f = similarity(name, lambda.clone(), rot, pts[2].clone());
        let (x, y) = (&pts[0], &pts[1]);
        let d = n.distance(x, y).unwrap();
        let image = n.distance(&f.apply(x).unwrap(), &f.apply(y).unwrap()).unwrap();
        prop_assert!(close(image, lambda.to_f64_lossy() * d, 1e-9));
        let back = f.inverse().unwrap().apply(&f.apply(x).unwrap()).unwrap();
        prop_assert_eq!(&back, x);
    }

    #[test]
    fn composition_matches_sequential_application(
        (name, pts) in group_and_points(3),
        l1 in positive(),
        l2 in positive(),
        r1 in 0usize..4,
        r2 in 0usize..4,
    ) {
        let f = similarity(name, l1, r1, pts[0].clone());
        let h = similarity(name, l2, r2, pts[1].clone());
        let x = &pts[2];
        prop_assert_eq!(f.compose(&h).unwrap().apply(x).unwrap(), f.apply(&h.apply(x).unwrap()).unwrap());
    }

    #[test]
    fn ball_images((name, pts) in group_and_points(2), lambda in positive(), seed in 0u64..1000) {
        let g = group(name);
        let n = norm(&g);
        let f = similarity(name, lambda, 0, pts[0].clone()).to_f64();
        let ball = Ball::new(pts[1].to_f64(), 1.5).unwrap();
        let image = n.similarity_ball_image(&f, &ball).unwrap();
        for x in n.sample_ball(&ball, 10, seed).unwrap() {
            prop_assert!(n.ball_contains(&ball, &x).unwrap());
            let fx = f.apply(&x).unwrap();
            prop_assert!(n.distance(&image.center, &fx).unwrap() < image.radius * (1.0 + 1e-9));
        }
    }

    #[test]
    fn segments_round_trip_and_reparametrize((name, pts) in group_and_points(2), s in (0i64..=6).prop_map(|k| rational(k, 6)), t in (0i64..=5).prop_map(|k| rational(k, 5))) {
        let g = group(name);
        let (x, y) = (&pts[0], &pts[1]);
        let seg = segment_between(&g, x, y).unwrap();
        prop_assert_eq!(&geodesic_point(&g, &seg, &rational(1, 1)).unwrap(), y);
        prop_assert_eq!(&geodesic_point(&g, &seg, &rational(0, 1)).unwrap(), x);
        let tail = seg.tail(&g, &s).unwrap();
        let direct = geodesic_point(&g, &seg, &(s.clone() + t.clone() * (rational(1, 1) - s))).unwrap();
        prop_assert_eq!(geodesic_point(&g, &tail, &t).unwrap(), direct);
    }

    #[test]
    fn dilatations_map_segments_to_segments((name, pts) in group_and_points(2), t in positive(), u in (0i64..=4).prop_map(|k| rational(k, 4))) {
        let g = group(name);
        let (x, y) = (&pts[0], &pts[1]);
        let seg = segment_between(&g, x, y).unwrap();
        let image = segment_between(&g, &g.dilate(&t, x).unwrap(), &g.dilate(&t, y).unwrap()).unwrap();
        let lhs = g.dilate(&t, &geodesic_point(&g, &seg, &u).unwrap()).unwrap();
        prop_assert_eq!(geodesic_point(&g, &image, &u).unwrap(), lhs);
    }

    #[test]
    fn pseudo_distance_properties((name, pts) in group_and_points(2), lambda in positive(), rot in 0usize..4) {
        prop_assume!(!pts[0].is_identity() && !pts[1].is_identity());
        let g = group(name);
        let f = similarity(name, lambda.clone(), rot, g.identity());
        let model = RadiantModel::new(norm(&g), vec![f.clone()]).unwrap();
        let (p, x) = (&pts[0], &pts[1]);
        let d = pseudo_distance(&model, p, x).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!(close(d, pseudo_distance(&model, x, p).unwrap(), 1e-12));
        prop_assert_eq!(pseudo_distance(&model, p, p).unwrap(), 0.0);
        let moved = pseudo_distance(&model, &f.apply(p).unwrap(), &f.apply(x).unwrap()).unwrap();
        prop_assert!(close(moved, d, 1e-9));
        let r = radius_function(&model, p).unwrap();
        prop_assert!(close(radius_function(&model, &f.apply(p).unwrap()).unwrap(), lambda.to_f64_lossy() * r, 1e-9));
    }

    #[test]
    fn g_map_equivariance((name, pts) in group_and_points(2), lambda in positive(), rot in 0usize..4) {
        prop_assume!(!pts[0].is_identity());
        let g = group(name);
        let f = similarity(name, lambda, rot, g.identity());
        let model = RadiantModel::new(norm(&g), vec![f.clone()]).unwrap();
        let (p, v) = (&pts[0], pts[1].log());
        let gv = g_map(&model, p, &f, &v).unwrap();
        let lhs = g.bch_product(p, &GroupPoint::exp(gv)).unwrap();
        let rhs = f.apply(&g.bch_product(p, &GroupPoint::exp(v)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let at_zero = g_map(&model, p, &f, &AlgebraVector::zeros(g.dim())).unwrap();
        prop_assert_eq!(at_zero, segment_between(&g, p, &f.apply(p).unwrap()).unwrap().direction);
    }

    #[test]
    fn fixed_points_are_fixed((name, pts) in group_and_points(1), num in 1i64..=7, rot in 0usize..4, expand in any::<bool>()) {
        let g = group(name);
        let n = norm(&g);
        let lambda = if expand { rational(8, num) } else { rational(num, 8) };
        let f = similarity(name, lambda, rot, pts[0].clone());
        let beta = nilgeo::similarity::fixed_point(&n, &f).unwrap().point;
        prop_assert_eq!(f.apply(&beta).unwrap(), beta.clone());
        prop_assert!(nilgeo::similarity::centered_residual(&n, &f, &beta, 5, 1).unwrap() < 1e-9);
    }
}

trait Lossy {
    fn to_f64_lossy(&self) -> f64;
}

impl Lossy for Rational {
    fn to_f64_lossy(&self) -> f64 {
        nilgeo::Scalar::to_f64(self)
    }
}

#[test]
fn zero_is_the_only_point_of_zero_gauge() {
    let g = group("engel4");
    let n = norm(&g);
    assert_eq!(n.gauge_norm(&g.identity::<Rational>()), 0.0);
    let tiny = GroupPoint::new(vec![Rational::zero(), Rational::zero(), Rational::zero(), rational(1, 1_000_000)]);
    assert!(n.gauge_norm(&tiny) > 0.0);
}
