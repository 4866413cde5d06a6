mod common;

use common::{eight_vertex_polygon, random_points, random_polygon, rng};
use multicenter::centers::{circumcenter, incenter_set};
use multicenter::harness::{format_number, parse_scenario, scenario::Init, Scenario};
use multicenter::flows::{FlowKind, FlowSpec};
use multicenter::nonsmooth::{grad_hdc, lambda, least_norm, mu, GradientSet, Provenance};
use multicenter::objective::{evaluate_hdc, evaluate_hsp};
use multicenter::voronoi::compute_partition;
use multicenter::{Configuration, HalfPlane, Point2, Tolerances};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point2> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cells_tile_the_environment(seed in any::<u64>(), n in 1usize..10) {
        let mut r = rng(seed);
        let q = random_polygon(&mut r, 9);
        let pts = random_points(&mut r, &q, n, 1e-3);
        let part = compute_partition(&q, &Configuration::new(pts.clone(), &q).unwrap()).unwrap();
        let tol = Tolerances::for_polygon(&q);
        prop_assert!((part.total_area() - q.area()).abs() <= 1e-9 * q.area());
        for (i, p) in pts.iter().enumerate() {
            prop_assert!(part.polygon(i).contains(*p, tol.geo));
            for v in part.polygon(i).vertices() {
                prop_assert!(q.contains(*v, tol.geo));
                // every cell vertex is at least as close to its own generator
                for other in &pts {
                    prop_assert!(v.distance(*p) <= v.distance(*other) + tol.geo);
                }
            }
        }
    }

    #[test]
    fn relabeling_generators_permutes_cells(seed in any::<u64>(), n in 2usize..8, shift in 1usize..7) {
        let mut r = rng(seed);
        let q = random_polygon(&mut r, 8);
        let pts = random_points(&mut r, &q, n, 1e-3);
        let perm: Vec<usize> = (0..n).map(|k| (k + shift) % n).collect();
        let moved: Vec<Point2> = perm.iter().map(|&k| pts[k]).collect();
        let a = Configuration::new(pts, &q).unwrap();
        let b = Configuration::new(moved, &q).unwrap();
        let (pa, pb) = (compute_partition(&q, &a).unwrap(), compute_partition(&q, &b).unwrap());
        for (slot, &k) in perm.iter().enumerate() {
            prop_assert!((pa.polygon(k).area() - pb.polygon(slot).area()).abs() < 1e-12);
        }
        let (ha, hb) = (evaluate_hdc(&q, &a).unwrap().value, evaluate_hdc(&q, &b).unwrap().value);
        prop_assert!((ha - hb).abs() < 1e-12);
        let (sa, sb) = (evaluate_hsp(&q, &a).unwrap().value, evaluate_hsp(&q, &b).unwrap().value);
        prop_assert!((sa - sb).abs() < 1e-12);
    }

    #[test]
    fn lambda_pairs_sum_to_one(a in point(), b in point(), pi in point(), pj in point()) {
        let e = HalfPlane::left_of(a, b);
        prop_assume!(e.is_ok());
        let e = e.unwrap();
        if let (Ok(x), Ok(y)) = (lambda(&e, pi, pj), lambda(&e, pj, pi)) {
            prop_assert!((x + y - 1.0).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn mu_is_symmetric_and_sums_to_one(pi in point(), pj in point(), pk in point()) {
        let (u, w) = (pj - pi, pk - pi);
        prop_assume!(u.cross(w).abs() > 0.05 * u.norm() * w.norm());
        let m = mu(pi, pj, pk).unwrap();
        prop_assert!((m - mu(pi, pk, pj).unwrap()).abs() < 1e-9);
        let total = m + mu(pj, pk, pi).unwrap() + mu(pk, pi, pj).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn objectives_are_one_lipschitz(seed in any::<u64>(), scale in -6.0..0.0f64) {
        let q = eight_vertex_polygon();
        let mut r = rng(seed);
        let a = random_points(&mut r, &q, 5, 1e-3);
        let b: Vec<Point2> = a
            .iter()
            .zip(random_points(&mut r, &q, 5, 1e-3))
            .map(|(p, o)| q.project(*p + 10f64.powf(scale) * (o - *p)))
            .collect();
        let (a, b) = (Configuration::from_points_unchecked(a), Configuration::from_points_unchecked(b));
        let d = a.distance(&b);
        let dh = evaluate_hdc(&q, &a).unwrap().value - evaluate_hdc(&q, &b).unwrap().value;
        let ds = evaluate_hsp(&q, &a).unwrap().value - evaluate_hsp(&q, &b).unwrap().value;
        prop_assert!(dh.abs() <= d + 1e-12);
        prop_assert!(ds.abs() <= d + 1e-12);
    }

    #[test]
    fn least_norm_point_is_optimal(
        cands in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 4), 1..8),
        weights in prop::collection::vec(0.0..1.0f64, 8),
    ) {
        let mut g = GradientSet::new(4);
        for (k, c) in cands.iter().enumerate() {
            g.push(c.clone(), Provenance::PolygonVertex(k));
        }
        let x = least_norm(&g).least_norm_vector;
        let xx: f64 = x.iter().map(|v| v * v).sum();
        // optimality: every candidate lies on the far side of the supporting plane
        for c in &cands {
            let cx: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
            prop_assert!(cx >= xx - 1e-9);
        }
        // and no convex combination is shorter
        let w = &weights[..cands.len()];
        let total: f64 = w.iter().sum();
        prop_assume!(total > 0.0);
        let y: Vec<f64> = (0..4).map(|t| cands.iter().zip(w).map(|(c, a)| a * c[t]).sum::<f64>() / total).collect();
        prop_assert!(y.iter().map(|v| v * v).sum::<f64>() >= xx - 1e-12);
    }

    #[test]
    fn centers_are_inside(seed in any::<u64>()) {
        let q = random_polygon(&mut rng(seed), 12);
        let tol = Tolerances::for_polygon(&q);
        let cc = circumcenter(&q);
        prop_assert!(q.contains(cc.center, tol.geo));
        prop_assert!(q.vertices().iter().all(|v| v.distance(cc.center) <= cc.radius + tol.geo));
        let ic = incenter_set(&q);
        for p in [ic.segment.a, ic.segment.b] {
            prop_assert!((q.clearance(p) - ic.inradius).abs() <= tol.geo);
        }
    }

    #[test]
    fn scenario_text_round_trips(
        seed in any::<u64>(),
        n in 1usize..20,
        explicit in any::<bool>(),
        kind in 0usize..6,
        dt in 1e-4..0.1f64,
        svg_every in 0u32..50,
    ) {
        let q = eight_vertex_polygon();
        let init = if explicit {
            Init {
                points: Some(random_points(&mut rng(seed), &q, n, 1e-3).into_iter().map(Into::into).collect()),
                random_seed: None,
            }
        } else {
            Init { points: None, random_seed: Some(seed) }
        };
        let s = Scenario {
            polygon: q.vertices().iter().map(|&v| v.into()).collect(),
            n,
            init,
            flow: FlowSpec { dt, ..FlowSpec::new(FlowKind::ALL[kind]) },
            outputs: multicenter::harness::scenario::Outputs { csv: explicit, svg_every_k_steps: svg_every },
        };
        let back = parse_scenario(&s.to_toml()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn formatted_numbers_keep_twelve_digits(x in prop::num::f64::NORMAL) {
        let y: f64 = format_number(x).parse().unwrap();
        prop_assert!((x - y).abs() <= 1e-11 * x.abs());
    }
}

#[test]
fn gradient_of_symmetric_configuration_is_symmetric() {
    let q = common::unit_square();
    let c = Configuration::new(vec![Point2::new(0.3, 0.5), Point2::new(0.7, 0.5)], &q).unwrap();
    let ln = least_norm(&grad_hdc(&q, &c).unwrap());
    let (a, b) = (ln.block(0), ln.block(1));
    assert!((a.x + b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12, "{a} {b}");
}
