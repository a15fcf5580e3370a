use branchpoint::config::{DoublePointConfig, KnotConfig, SamplerConfig};
use branchpoint::deformation::{build_family_member, sample_generic};
use branchpoint::intersect::find_double_points;
use branchpoint::knot::{
    braid_from_knot, knot_invariants, trace_slice, verify_double_point_formula,
};
use branchpoint::{Order, Orientation, WeierstrassData, WeierstrassData64};

fn cusp<T: branchpoint::Real>() -> WeierstrassData<T> {
    WeierstrassData::from_real([&[0.0, 2.0], &[], &[0.0, 0.0, 3.0], &[]], 1e-12).unwrap()
}

#[test]
fn sampled_cusp_members_satisfy_the_identity() {
    let w: WeierstrassData64 = cusp();
    for seed in [1, 2, 3] {
        let p = sample_generic(
            &w,
            Orientation::Plus,
            0.005,
            seed,
            &SamplerConfig::default(),
        )
        .unwrap();
        let r = verify_double_point_formula(
            &w,
            &p,
            0.05,
            &KnotConfig::default(),
            &DoublePointConfig::default(),
        )
        .unwrap();
        assert_eq!(r.base.e, 3);
        assert_eq!(r.d, 1, "seed {seed}");
        assert_eq!(r.outside_ball, 0);
        assert!(r.all_transverse);
    }
}

#[test]
fn deformed_slice_has_the_same_braid() {
    let w: WeierstrassData64 = cusp();
    let p = sample_generic(&w, Orientation::Plus, 0.005, 4, &SamplerConfig::default()).unwrap();
    let fm = build_family_member(&w, &p).unwrap();
    let base = knot_invariants(&w, 0.05, &KnotConfig::default()).unwrap();
    let moved = knot_invariants(fm.deformed(), 0.05, &KnotConfig::default()).unwrap();
    assert_eq!(base.report.e, moved.report.e);
    assert_eq!(base.report.strands, moved.report.strands);
    assert_eq!(base.braid.strand_count(), 2);
}

#[test]
fn double_points_sit_near_the_branch_point() {
    let w: WeierstrassData64 = cusp();
    let p = sample_generic(&w, Orientation::Plus, 0.01, 9, &SamplerConfig::default()).unwrap();
    let fm = build_family_member(&w, &p).unwrap();
    let found = find_double_points(fm.deformed(), &DoublePointConfig::default()).unwrap();
    assert_eq!(found.points.len(), 1);
    let dp = &found.points[0];
    assert!(dp.z1.norm() < 0.1 && dp.z2.norm() < 0.1);
}

#[test]
fn single_precision_smoke() {
    let w: WeierstrassData<f32> = cusp();
    assert_eq!(
        w.orders(),
        [
            Order::Finite(1),
            Order::Infinite,
            Order::Finite(2),
            Order::Infinite
        ]
    );
    assert_eq!(w.branching_multiplicity(), 2);
    let k = trace_slice(&w, 0.05f32, &Default::default()).unwrap();
    assert_eq!(k.winding(), 2);
    let r = knot_invariants(&w, 0.05f32, &KnotConfig::default()).unwrap();
    assert_eq!(r.report.e, 3);
    assert!(braid_from_knot(&k).is_err(), "raw traces are not resampled");
}
