use branchpoint::knot::{
    algebraic_crossing_number, braid_from_knot, linking_number_gauss, KnotCurve, KnotLoop,
};
use branchpoint::C;
use proptest::prelude::*;
use std::f64::consts::TAU;

/// Two-strand closed braid `u(θ) = r·e^{i(pθ/2 + φ)}` on the unit sphere,
/// sampled `m` times per turn of `θ`.
fn two_strand(p: i64, r: f64, phase: f64, m: usize) -> KnotCurve<f64> {
    let rho = (1.0 - r * r).sqrt();
    let mut l = KnotLoop {
        points: Vec::new(),
        preimages: Vec::new(),
        theta: Vec::new(),
    };
    for k in 0..2 * m {
        let th = TAU * k as f64 / m as f64;
        let phi = p as f64 * th / 2.0 + phase;
        l.points
            .push([rho * th.cos(), rho * th.sin(), r * phi.cos(), r * phi.sin()]);
        l.preimages.push(C::new(0.0, 0.0));
        l.theta.push(th);
    }
    KnotCurve {
        eta: 1.0,
        loops: vec![l],
        samples_per_turn: Some(m),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn torus_braids_count_their_twists(
        half in -6i64..6,
        r in 0.02f64..0.3,
        phase in 0.01f64..3.1,
        m in 96usize..256,
    ) {
        let p = 2 * half + 1;
        let k = two_strand(p, r, phase, m);
        let b = braid_from_knot(&k).unwrap();
        prop_assert_eq!(b.strand_count(), 2);
        prop_assert_eq!(algebraic_crossing_number(&b), p);
        prop_assert_eq!(b.crossings.len() as i64, p.abs());
        let delta = 0.2 * b.min_strand_separation().unwrap();
        let lk = linking_number_gauss(&k, delta, 0.7).unwrap();
        prop_assert!((lk - p as f64).abs() < 0.1, "gauss {} vs {}", lk, p);
    }

    #[test]
    fn rotating_the_braid_axis_phase_keeps_e(phase in 0.0f64..TAU, m in 64usize..200) {
        let k = two_strand(3, 0.3, phase, m);
        prop_assume!(braid_from_knot(&k).is_ok());
        prop_assert_eq!(algebraic_crossing_number(&braid_from_knot(&k).unwrap()), 3);
    }
}
