use std::ffi::CStr;
use std::ptr;

use elashift_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(elashift_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn lhs(s: usize, d: usize, seed: u64) -> Vec<f64> {
    let mut out = vec![0.0; s * d];
    assert_eq!(
        unsafe { elashift_lhs(s, d, seed, out.as_mut_ptr(), out.len()) },
        ElashiftStatus::Ok
    );
    out
}

#[test]
fn feature_names_match_schema() {
    assert_eq!(elashift_feature_count(), 61);
    let first = unsafe { CStr::from_ptr(elashift_feature_name(0)) };
    assert_eq!(first.to_str().unwrap(), "ela_distr.skewness");
    assert!(elashift_feature_name(61).is_null());
}

#[test]
fn instance_round_trip_and_optimum() {
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { elashift_instance_new(1, 0, 3, &mut inst) }, ElashiftStatus::Ok);
    let (mut v, mut fopt) = (0.0, 0.0);
    let x = [0.5, -1.0, 2.0];
    unsafe {
        assert_eq!(
            elashift_instance_evaluate(inst, x.as_ptr(), 3, &mut v),
            ElashiftStatus::Ok
        );
        assert_eq!(elashift_instance_f_opt(inst, &mut fopt), ElashiftStatus::Ok);
        assert!(v >= fopt);
        assert_eq!(
            elashift_instance_evaluate(inst, x.as_ptr(), 2, &mut v),
            ElashiftStatus::Domain
        );
        elashift_instance_free(inst);
    }
    assert!(!last_error().is_empty());
}

#[test]
fn bad_ids_and_null_pointers_report_errors() {
    let mut inst = ptr::null_mut();
    assert_eq!(
        unsafe { elashift_instance_new(25, 0, 3, &mut inst) },
        ElashiftStatus::Domain
    );
    assert!(inst.is_null());
    assert!(last_error().contains("25"));
    assert_eq!(
        unsafe { elashift_instance_new(1, 0, 3, ptr::null_mut()) },
        ElashiftStatus::NullPointer
    );
    assert!(last_error().contains("out"));
    let mut buf = vec![0.0; 5];
    assert_eq!(
        unsafe { elashift_lhs(10, 2, 1, buf.as_mut_ptr(), buf.len()) },
        ElashiftStatus::BufferSize
    );
    unsafe {
        elashift_instance_free(ptr::null_mut());
        elashift_embedding_free(ptr::null_mut());
        elashift_features_free(ptr::null_mut());
    }
}

#[test]
fn lhs_matches_core() {
    let x = lhs(20, 3, 9);
    let core = elashift::doe::lhs(20, 3, 9).unwrap();
    for i in 0..20 {
        for j in 0..3 {
            assert_eq!(x[i * 3 + j], core.points[(i, j)]);
        }
    }
}

#[test]
fn features_and_shift_through_the_abi() {
    let (s, d_amb, d) = (40, 6, 3);
    let x = lhs(s, d_amb, 2);
    let mut inst = ptr::null_mut();
    let mut emb = ptr::null_mut();
    let (mut f_ref, mut f_prj) = (ptr::null_mut(), ptr::null_mut());
    let mut y = vec![0.0; s];
    let mut z = vec![0.0; s * d];
    let mut delta = vec![0.0; 61];
    unsafe {
        assert_eq!(elashift_instance_new(2, 1, d_amb, &mut inst), ElashiftStatus::Ok);
        for i in 0..s {
            elashift_instance_evaluate(inst, x[i * d_amb..].as_ptr(), d_amb, &mut y[i]);
        }
        assert_eq!(elashift_embedding_new(d, d_amb, 5, &mut emb), ElashiftStatus::Ok);
        assert_eq!(
            elashift_embedding_project(emb, x.as_ptr(), s, d_amb, z.as_mut_ptr(), z.len()),
            ElashiftStatus::Ok
        );
        assert_eq!(
            elashift_features_compute(x.as_ptr(), s, d_amb, y.as_ptr(), 7, &mut f_ref),
            ElashiftStatus::Ok
        );
        assert_eq!(
            elashift_features_compute(z.as_ptr(), s, d, y.as_ptr(), 7, &mut f_prj),
            ElashiftStatus::Ok
        );
        assert_eq!(
            elashift_feature_shift(f_prj, f_ref, delta.as_mut_ptr(), 61),
            ElashiftStatus::Ok
        );

        // y-only features do not move under projection
        assert_eq!(delta[0], 0.0);
        let (mut v, mut st) = (0.0, ElashiftFeatureStatus::Degenerate);
        assert_eq!(elashift_features_get(f_ref, 0, &mut v, &mut st), ElashiftStatus::Ok);
        assert_eq!(st, ElashiftFeatureStatus::Ok);
        assert_eq!(
            elashift_features_get(f_ref, 61, &mut v, &mut st),
            ElashiftStatus::Domain
        );

        elashift_features_free(f_ref);
        elashift_features_free(f_prj);
        elashift_embedding_free(emb);
        elashift_instance_free(inst);
    }
    assert_eq!(elashift_relative_shift(1e-9, 0.0), 1.0);
}

#[test]
fn too_few_points_is_a_domain_error() {
    let x = lhs(4, 3, 1);
    let y = [1.0, 2.0, 3.0, 4.0];
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { elashift_features_compute(x.as_ptr(), 4, 3, y.as_ptr(), 0, &mut f) },
        ElashiftStatus::Domain
    );
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/elashift.h")).unwrap();
    for sym in [
        "elashift_last_error",
        "elashift_feature_count",
        "elashift_feature_name",
        "elashift_instance_new",
        "elashift_instance_evaluate",
        "elashift_instance_f_opt",
        "elashift_instance_free",
        "elashift_lhs",
        "elashift_embedding_new",
        "elashift_embedding_project",
        "elashift_embedding_free",
        "elashift_features_compute",
        "elashift_features_get",
        "elashift_features_free",
        "elashift_relative_shift",
        "elashift_feature_shift",
        "elashift_version",
        "ELASHIFT_STATUS_OK",
        "typedef struct ElashiftInstance",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}
