use proptest::prelude::*;
use qaccess_core::cones::{classify_subspace, is_completely_positive, is_positive, split_condition};
use qaccess_core::dynamics::{evolve_schedule, ControlSchedule, Segment};
use qaccess_core::generator::{dissipation_from_kossakowski, kossakowski_from_dissipation};
use qaccess_core::{CoherenceVector, DissipationMatrix, HamiltonianVector, KossakowskiMatrix, Mat3, ParamSubspace, SymMat3};

fn sym() -> impl Strategy<Value = SymMat3> {
    prop::array::uniform6(-3.0f64..3.0).prop_map(SymMat3::from_six)
}

fn psd() -> impl Strategy<Value = SymMat3> {
    prop::array::uniform9(-1.0f64..1.0).prop_map(|a| {
        let m = Mat3::from_row_slice(&a);
        SymMat3::from_matrix(&(m * m.transpose()))
    })
}

fn rotation(angles: [f64; 3]) -> Mat3 {
    let [a, b, c] = angles;
    let rz = |t: f64| Mat3::new(t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0);
    let ry = |t: f64| Mat3::new(t.cos(), 0.0, t.sin(), 0.0, 1.0, 0.0, -t.sin(), 0.0, t.cos());
    rz(a) * ry(b) * rz(c)
}

proptest! {
    #[test]
    fn kossakowski_round_trip(c in sym()) {
        let back = kossakowski_from_dissipation(&dissipation_from_kossakowski(&KossakowskiMatrix(c)));
        prop_assert!(back.0.max_abs_diff(&c) < 1e-14);
    }

    #[test]
    fn complete_positivity_implies_positivity(c in sym()) {
        let k = KossakowskiMatrix(c);
        prop_assert!(!is_completely_positive(&k, 1e-12) || is_positive(&k, 1e-12));
    }

    #[test]
    fn dissipation_commutes_with_rotation(c in sym(), angles in prop::array::uniform3(-3.2f64..3.2)) {
        let o = rotation(angles);
        let lhs = dissipation_from_kossakowski(&KossakowskiMatrix(c.conjugate(&o))).0;
        let rhs = dissipation_from_kossakowski(&KossakowskiMatrix(c)).0.conjugate(&o);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn purity_never_increases(
        c in psd(),
        h in prop::array::uniform3(-2.0f64..2.0),
        segs in prop::collection::vec((0.05f64..1.5, 0u8..2), 1..6),
        dir in prop::array::uniform3(-1.0f64..1.0),
    ) {
        // A PSD dissipation matrix, not a PSD Kossakowski matrix.
        let d = DissipationMatrix(c);
        let h = HamiltonianVector::new(h[0], h[1], h[2]);
        let sched = ControlSchedule::new(segs.iter().map(|&(duration, u)| Segment { duration, u: u as f64 }).collect()).unwrap();
        let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt().max(1e-3);
        let v0 = CoherenceVector::new(dir[0] / n * 0.5, dir[1] / n * 0.5, dir[2] / n * 0.5);
        let traj = evolve_schedule(&h, &d, &sched, &v0, 0.05).unwrap();
        for w in traj.purities.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10);
        }
        prop_assert!(!traj.exits_ball());
    }
}

#[test]
fn non_positive_generator_leaves_the_ball() {
    // C = diag(-1, 0, 0) gives 𝒟 = diag(0, -2, -2).
    let d = dissipation_from_kossakowski(&KossakowskiMatrix(SymMat3::diag(-1.0, 0.0, 0.0)));
    assert!(!d.is_psd(1e-12));
    let traj = evolve_schedule(
        &HamiltonianVector::default(),
        &d,
        &ControlSchedule::constant(1.0, 0.0).unwrap(),
        &CoherenceVector::new(0.0, 0.5, 0.0),
        0.01,
    )
    .unwrap();
    assert!(traj.exits_ball());
    assert!(traj.max_norm > 0.5 + 1e-6);
}

#[test]
fn classification_is_rotation_invariant() {
    let spaces = [
        ParamSubspace::free_entries(&[(0, 0), (2, 2), (0, 1), (0, 2), (1, 2)]).unwrap(),
        ParamSubspace::free_entries(&[(0, 0), (1, 2)]).unwrap(),
        ParamSubspace::free_entries(&[(0, 0), (1, 1), (0, 1)]).unwrap(),
    ];
    for (k, v) in spaces.iter().enumerate() {
        let o = rotation([0.3 + k as f64, -1.1, 2.0]);
        let a = classify_subspace(v).unwrap();
        let b = classify_subspace(&v.conjugated(&o)).unwrap();
        assert_eq!((a.case_label, a.n_p, a.n_cp), (b.case_label, b.n_p, b.n_cp));
        assert_eq!(split_condition(v).verdict, split_condition(&v.conjugated(&o)).verdict);
    }
}
