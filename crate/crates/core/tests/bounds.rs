use proptest::prelude::*;
use scs_core::bounds::{
    combined_inequality, family_bounds_report, improved_bounds, interset_bound, liu_bound,
    tsai_check, tsai_solve, TsaiLimit, TsaiQuery, Verdict, ZczVerdict,
};
use scs_core::cfr::Cfr;
use scs_core::constructions::{construction1, construction2, construction3, construction4};
use scs_core::tol::Tolerances;

fn fixture(name: &str) -> Cfr {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    Cfr::from_text(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn time_domain_family_report() {
    let family = construction1(&fixture("flo15.txt")).unwrap();
    let r = family_bounds_report(&family, &Tolerances::default()).unwrap();
    let v = r.verdicts.as_ref().unwrap();
    assert!((r.eta.unwrap() - 1.142261749671197).abs() < 1e-9);
    assert_eq!(v.liu, Verdict::AsymptoticallyOptimalCandidate);
    let inter = v.interset.unwrap();
    assert_eq!(inter.verdict, Verdict::Optimal);
    assert!((inter.measured - 16.0).abs() < 1e-9);
    assert!(r.tsai_satisfied && r.tsai_lhs > r.tsai_rhs);
    assert!(r.combined.satisfied && r.combined.slack > 0.0);
    assert!(v.theta_a.satisfied);
}

#[test]
fn zcz_family_report() {
    let family = construction4(&fixture("flo15.txt"), None, &[4], None).unwrap();
    let r = family_bounds_report(&family, &Tolerances::default()).unwrap();
    let v = r.verdicts.as_ref().unwrap();
    assert_eq!(r.measured.unwrap().zcz_width, 15);
    assert_eq!((r.zcz_capacity, r.zcz_demand), (225, 225));
    assert_eq!(v.zcz, ZczVerdict::Optimal);
    assert_eq!(v.tsai, Verdict::Optimal);
    assert_eq!(v.interset.unwrap().verdict, Verdict::Optimal);
}

#[test]
fn measured_cross_correlation_never_beats_the_floor() {
    let flo15 = fixture("flo15.txt");
    let flo5 = fixture("flo5.txt");
    let families = [
        (construction1(&flo15).unwrap(), true),
        (construction2(&flo15, 7).unwrap(), true),
        (construction3(&flo5, &[0, 2, 6, 7, 8, 10]).unwrap(), true),
        (construction3(&flo5, &[1, 4]).unwrap(), false),
        (construction4(&flo5, None, &[2], None).unwrap(), true),
    ];
    for (family, tight) in families {
        let r = family_bounds_report(&family, &Tolerances::default()).unwrap();
        let inter = r.verdicts.unwrap().interset.unwrap();
        let floor = interset_bound(family.length(), family.constraint().n()).unwrap();
        assert!(inter.measured >= floor - 1e-6);
        if tight {
            assert!((inter.measured - floor).abs() < 1e-6);
        }
    }
}

proptest! {
    #[test]
    fn uniform_power_floors_sit_on_the_combined_boundary(l in 2usize..2000, frac in 0.0f64..0.95, m in 1usize..40) {
        let n = ((l as f64) * frac) as usize;
        let (a, c) = improved_bounds(l, n).unwrap();
        let r = combined_inequality(a, c, l, n, m, 1e-9).unwrap();
        prop_assert!(r.slack.abs() <= 1e-9 * r.rhs);
    }

    #[test]
    fn liu_is_the_equal_value_solution(l in 2usize..2000, frac in 0.0f64..0.95, m in 1usize..40) {
        let n = ((l as f64) * frac) as usize;
        prop_assume!(m * l > 1);
        let t = liu_bound(m, l, n).unwrap();
        let r = combined_inequality(t, t, l, n, m, 1e-9).unwrap();
        prop_assert!(r.slack.abs() <= 1e-9 * r.rhs.max(1.0));
    }

    #[test]
    fn solved_cross_floor_meets_tsai_with_equality(
        l in 16usize..600, frac in 0.0f64..0.9, m in 2usize..20, window in 2usize..16, theta_a in 0.0f64..10.0
    ) {
        let n = ((l as f64) * frac) as usize;
        let window = window.min(l);
        match tsai_solve(l, n, TsaiQuery::MinThetaC { theta_a, m, window }).unwrap() {
            TsaiLimit::AtLeast(c) => {
                let r = tsai_check(theta_a, c, l, n, m, window, 1e-9).unwrap();
                prop_assert!(r.satisfied);
                if c > 0.0 {
                    prop_assert!((r.lhs - r.rhs).abs() <= 1e-9 * r.rhs);
                }
            }
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }
}
