use efron_dual::geometry::ConvexBody;
use efron_dual::montecarlo::{
    check_identity, estimate_factorial_moment, estimate_vertex_prob_direct, estimate_volume_moment, with_workers,
    IdentityKind, Mode, MomentEstimate,
};
use efron_dual::oracle::planar_reference;
use proptest::prelude::*;

fn body(name: &str) -> ConvexBody {
    name.parse().unwrap()
}

fn within(e: &MomentEstimate, target: f64, sigmas: f64) {
    let z = (e.mean - target).abs() / e.stderr;
    assert!(z <= sigmas, "{}: {} vs {target}, z = {z}", e.estimand, e.mean);
}

fn agree(a: &MomentEstimate, b: &MomentEstimate, sigmas: f64) -> f64 {
    let d = (a.mean - b.mean).abs();
    let s = a.stderr.hypot(b.stderr);
    let z = if s == 0.0 { if d <= 1e-12 { 0.0 } else { f64::INFINITY } } else { d / s };
    assert!(z <= sigmas, "{} vs {}: {} vs {}, z = {z}", a.estimand, b.estimand, a.mean, b.mean);
    z
}

#[test]
fn interval_volume_moments() {
    let i = ConvexBody::unit_interval();
    within(&estimate_volume_moment(&i, 2, 1, 1_000_000, 5).unwrap(), 1.0 / 3.0, 4.0);
    within(&estimate_volume_moment(&i, 3, 2, 1_000_000, 6).unwrap(), 0.3, 4.0);
}

#[test]
fn single_point_has_zero_volume() {
    for name in ["interval", "triangle", "disk", "cube3", "ball3"] {
        let e = estimate_volume_moment(&body(name), 1, 1, 1000, 1).unwrap();
        assert_eq!((e.mean, e.stderr), (0.0, 0.0), "{name}");
    }
}

#[test]
fn factorial_moment_examples() {
    let i = ConvexBody::unit_interval();
    let e = estimate_factorial_moment(&i, 3, 1, 1_000_000, 8).unwrap();
    assert!((e.mean - 2.0 / 3.0).abs() < 1e-15 && e.stderr < 1e-15);
    for name in ["interval", "square", "ball3"] {
        let e = estimate_factorial_moment(&body(name), 5, 0, 1000, 2).unwrap();
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));
    }
    let ev3 = planar_reference("triangle", "EV3/vol").unwrap().value.as_f64();
    let e = estimate_factorial_moment(&ConvexBody::triangle(), 4, 1, 1_000_000, 9).unwrap();
    within(&e, 1.0 - ev3, 4.0);
    assert!((1.0 - ev3 - 11.0 / 12.0).abs() < 5e-5);
}

#[test]
fn vertex_probability_examples() {
    within(&estimate_vertex_prob_direct(&ConvexBody::unit_interval(), 2, 1, 1_000_000, 10).unwrap(), 2.0 / 3.0, 4.0);
    for (name, d) in [("interval", 1), ("square", 2), ("cube3", 3)] {
        for j in 1..=d + 1 {
            let e = estimate_vertex_prob_direct(&body(name), 0, j, 1000, 3).unwrap();
            assert_eq!(e.mean, 1.0, "{name} j={j}");
        }
        assert!(estimate_vertex_prob_direct(&body(name), 0, d + 2, 1000, 3).is_err());
    }
    let ev3 = planar_reference("triangle", "EV3/vol").unwrap().value.as_f64();
    within(&estimate_vertex_prob_direct(&ConvexBody::triangle(), 3, 1, 1_000_000, 11).unwrap(), 1.0 - ev3, 4.0);
}

#[test]
fn out_of_contract_parameters() {
    let sq = ConvexBody::square();
    assert!(estimate_volume_moment(&sq, 0, 1, 10, 0).is_err());
    assert!(estimate_volume_moment(&sq, 3, 1, 0, 0).is_err());
    assert!(estimate_factorial_moment(&sq, 3, 4, 10, 0).is_err());
    assert!(estimate_vertex_prob_direct(&sq, 3, 0, 10, 0).is_err());
    assert!(check_identity(&sq, IdentityKind::EfronEq1, 3, 2, 10, 0, Mode::Coupled, 4.0).is_err());
    assert!(check_identity(&sq, IdentityKind::DualEq4, 0, 2, 10, 0, Mode::Coupled, 4.0).is_err());
    assert!(check_identity(&sq, IdentityKind::DualEq4, 2, 2, 10, 0, Mode::Coupled, 0.0).is_err());
}

#[test]
fn worker_count_does_not_change_results() {
    let sq = ConvexBody::square();
    let cube = ConvexBody::cube3();
    let run = || {
        (
            estimate_volume_moment(&cube, 6, 2, 20_000, 77).unwrap(),
            check_identity(&sq, IdentityKind::DualEq4, 2, 3, 20_000, 77, Mode::Independent, 4.0).unwrap(),
            check_identity(&cube, IdentityKind::FactorialEq3, 4, 2, 20_000, 77, Mode::Coupled, 4.0).unwrap(),
        )
    };
    let one = with_workers(1, run);
    for w in [2, 3, 8] {
        let other = with_workers(w, run);
        assert_eq!(one.0, other.0);
        assert_eq!(serde_json::to_string(&one.1).unwrap(), serde_json::to_string(&other.1).unwrap());
        assert_eq!(serde_json::to_string(&one.2).unwrap(), serde_json::to_string(&other.2).unwrap());
    }
}

#[test]
fn theorem_two_equivalence() {
    let bodies = ["triangle", "square", "disk", "cube3", "tetrahedron"];
    for (b, name) in bodies.iter().enumerate() {
        let body = body(name);
        for m in 1..=6u64 {
            for j in 1..=3u64 {
                let seed = 1000 + 100 * b as u64 + 10 * m + j;
                let direct = estimate_vertex_prob_direct(&body, m, j, 100_000, seed).unwrap();
                let ratio = estimate_factorial_moment(&body, m + j, j, 100_000, seed + 1).unwrap();
                agree(&direct, &ratio, 5.0);
            }
        }
    }
}

#[test]
fn coupled_and_independent_modes_agree() {
    let cases = [
        (IdentityKind::EfronEq1, "triangle", 3, 1),
        (IdentityKind::EfronEq1, "ball3", 5, 1),
        (IdentityKind::ProductEq2, "square", 3, 2),
        (IdentityKind::ProductEq2, "cube3", 5, 2),
        (IdentityKind::FactorialEq3, "disk", 3, 3),
        (IdentityKind::FactorialEq3, "tetrahedron", 5, 2),
        (IdentityKind::DualEq4, "square", 2, 2),
        (IdentityKind::DualEq4, "triangle", 3, 3),
        (IdentityKind::DualEq4, "cube3", 4, 2),
        (IdentityKind::Thm2DirectVsRatio, "square", 4, 2),
        (IdentityKind::Thm2DirectVsRatio, "cube3", 4, 1),
    ];
    for (i, (kind, name, n, k)) in cases.into_iter().enumerate() {
        let body = body(name);
        let seed = 500 + i as u64;
        let c = check_identity(&body, kind, n, k, 100_000, seed, Mode::Coupled, 5.0).unwrap();
        let ind = check_identity(&body, kind, n, k, 100_000, seed, Mode::Independent, 5.0).unwrap();
        assert!(c.pass && ind.pass, "{kind} {name}: {} / {}", c.z_score, ind.z_score);
        agree(&c.lhs, &ind.lhs, 5.0);
        agree(&c.rhs, &ind.rhs, 5.0);
    }
}

#[test]
fn degenerate_chain() {
    for (name, d) in [("interval", 1u64), ("triangle", 2), ("disk", 2), ("cube3", 3), ("ball3", 3), ("tetrahedron", 3)] {
        let body = body(name);
        for n in 1..=d {
            for k in 1..=3 {
                let e = estimate_volume_moment(&body, n, k, 2000, 4).unwrap();
                assert_eq!((e.mean, e.stderr), (0.0, 0.0), "{name} n={n} k={k}");
                for mode in [Mode::Coupled, Mode::Independent] {
                    let r = check_identity(&body, IdentityKind::FactorialEq3, n, k, 20_000, 4, mode, 4.0).unwrap();
                    assert!(r.pass, "{name} n={n} k={k} {mode}: z = {}", r.z_score);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimands_stay_in_range(
        name in prop::sample::select(vec!["interval", "triangle", "square", "disk", "cube3", "ball3"]),
        n in 1u64..8,
        k in 1u64..4,
        seed in any::<u64>(),
    ) {
        let body = body(name);
        let v = estimate_volume_moment(&body, n, k, 300, seed).unwrap();
        prop_assert!((0.0..=1.0).contains(&v.mean) && v.stderr.is_finite());
        let f = estimate_factorial_moment(&body, n + k, k, 300, seed).unwrap();
        prop_assert!((0.0..=1.0).contains(&f.mean));
        let p = estimate_vertex_prob_direct(&body, n, k, 300, seed).unwrap();
        prop_assert!((0.0..=1.0).contains(&p.mean));
    }

    #[test]
    fn same_seed_same_estimate(seed in any::<u64>(), n in 2u64..7) {
        let body = ConvexBody::ball(2, 1.0).unwrap();
        prop_assert_eq!(
            estimate_volume_moment(&body, n, 2, 200, seed).unwrap(),
            estimate_volume_moment(&body, n, 2, 200, seed).unwrap()
        );
    }
}
