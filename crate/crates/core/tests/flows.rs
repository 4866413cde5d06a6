mod common;

use common::{enclosing_by_enumeration, eight_vertex_polygon, random_points, random_polygon, rng, unit_square};
use multicenter::flows::{diagnostics, integrate, velocity, FlowKind, FlowSpec, Termination};
use multicenter::harness::{bundled, simulate};
use multicenter::objective::{evaluate_hdc, evaluate_hsp};
use multicenter::{Configuration, Point2};

#[test]
fn mirror_symmetry_is_preserved() {
    let q = unit_square();
    let pts = vec![
        Point2::new(0.2, 0.3),
        Point2::new(0.8, 0.3),
        Point2::new(0.35, 0.75),
        Point2::new(0.65, 0.75),
    ];
    let config = Configuration::new(pts, &q).unwrap();
    for kind in FlowKind::ALL {
        let spec = FlowSpec {
            t_max: 2.0,
            ..FlowSpec::new(kind)
        };
        let traj = integrate(&spec, &q, &config).unwrap();
        for s in &traj.samples {
            for (a, b) in [(0, 1), (2, 3)] {
                let (pa, pb) = (s.points[a], s.points[b]);
                assert!(
                    (pa.x + pb.x - 1.0).abs() < 1e-9 && (pa.y - pb.y).abs() < 1e-9,
                    "{kind} at t = {}: {pa} vs {pb}",
                    s.t
                );
            }
        }
    }
}

#[test]
fn centralized_flows_move_only_active_generators() {
    let q = eight_vertex_polygon();
    let mut r = rng(11);
    for _ in 0..20 {
        let config = Configuration::new(random_points(&mut r, &q, 6, 0.05), &q).unwrap();
        let active_dc = evaluate_hdc(&q, &config).unwrap().active.active_generators;
        let active_sp = evaluate_hsp(&q, &config).unwrap().active.active_generators;
        for (kind, active) in [(FlowKind::GradDC, &active_dc), (FlowKind::GradSP, &active_sp)] {
            let v = velocity(kind, &q, &config).unwrap();
            for (i, vi) in v.iter().enumerate() {
                if !active.contains(&i) {
                    assert_eq!(*vi, Point2::ZERO, "{kind}: inactive generator {i} moves");
                }
            }
        }
    }
}

#[test]
fn gradient_flows_improve_their_objective() {
    let mut r = rng(12);
    for _ in 0..3 {
        let q = random_polygon(&mut r, 7);
        let config = Configuration::new(random_points(&mut r, &q, 4, 0.05), &q).unwrap();
        for kind in [FlowKind::GradDC, FlowKind::GradSP, FlowKind::DistGradDC, FlowKind::DistGradSP] {
            let spec = FlowSpec {
                t_max: 3.0,
                ..FlowSpec::new(kind)
            };
            let traj = integrate(&spec, &q, &config).unwrap();
            let diag = diagnostics(&traj, &q, kind.problem()).unwrap();
            assert!(diag.violation_fraction <= 1e-3, "{kind}: {:?}", diag.monotonicity_violations);
            let (first, last) = (&traj.samples[0], traj.last());
            match kind.problem() {
                multicenter::objective::Problem::DiskCovering => assert!(last.h_dc <= first.h_dc),
                multicenter::objective::Problem::SpherePacking => assert!(last.h_sp >= first.h_sp),
            }
        }
    }
}

#[test]
fn projection_never_needed_inside_convex_environments() {
    let q = eight_vertex_polygon();
    let config = Configuration::new(random_points(&mut rng(13), &q, 8, 0.05), &q).unwrap();
    for kind in FlowKind::ALL {
        let spec = FlowSpec {
            t_max: 1.0,
            ..FlowSpec::new(kind)
        };
        let traj = integrate(&spec, &q, &config).unwrap();
        assert!(traj.max_projection < 1e-12, "{kind}: {}", traj.max_projection);
        assert!(!matches!(traj.terminated_by, Termination::Error(_)));
    }
}

#[test]
fn single_generator_reaches_the_circumcenter() {
    let scenario = bundled("paper_polygon_1_distgraddc").unwrap();
    let (q, traj) = simulate(&scenario).unwrap();
    let (center, _) = enclosing_by_enumeration(q.vertices());
    let d = traj.last().points[0].distance(center);
    assert!(d < 1e-3, "ended {d} from the circumcenter");
}
