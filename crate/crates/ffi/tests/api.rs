use std::ffi::{CStr, CString};
use std::ptr;

use alarm_patrol_ffi::*;

const HOURGLASS: &str = r#"
vertices = 5
edges = [[0, 1, 1], [0, 2, 1], [0, 3, 1], [0, 4, 1], [1, 2, 1], [3, 4, 1]]
targets = [
  { vertex = 1, value = 0.5, deadline = 4 },
  { vertex = 2, value = 0.5, deadline = 4 },
  { vertex = 3, value = 0.5, deadline = 4 },
  { vertex = 4, value = 0.5, deadline = 4 },
]
[[signals]]
id = "s1"
coverage = [
  { target = 1, prob = 1.0 }, { target = 2, prob = 1.0 },
  { target = 3, prob = 1.0 }, { target = 4, prob = 1.0 },
]
"#;

fn parse(doc: &str) -> (ApStatus, *mut ApInstance) {
    let doc = CString::new(doc).unwrap();
    let mut inst = ptr::null_mut();
    let status = unsafe { ap_instance_from_str(doc.as_ptr(), &mut inst) };
    (status, inst)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ap_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn solve_round_trip() {
    let (status, inst) = parse(HOURGLASS);
    assert_eq!(status, ApStatus::Ok);
    unsafe {
        assert_eq!(ap_instance_num_vertices(inst), 5);
        assert_eq!(ap_instance_num_targets(inst), 4);
        assert_eq!(ap_instance_num_signals(inst), 1);

        let mut sol = ptr::null_mut();
        assert_eq!(ap_solve(inst, 0, ptr::null(), &mut sol), ApStatus::Ok);
        assert!((ap_solution_value(sol) - 0.125).abs() < 1e-9);
        let mut json = ptr::null_mut();
        assert_eq!(ap_solution_to_json(sol, &mut json), ApStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        ap_string_free(json);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["vertex"], 0);
        ap_solution_free(sol);

        let mut opts = ap_solve_options_default();
        opts.algorithm = ApAlgorithm::ApproxBnb;
        opts.rho = 1.0;
        let mut sol = ptr::null_mut();
        assert_eq!(ap_solve(inst, 0, &opts, &mut sol), ApStatus::Ok);
        assert!(ap_solution_value(sol) >= 0.125 - 1e-9);
        ap_solution_free(sol);

        let mut text = ptr::null_mut();
        assert_eq!(ap_instance_to_string(inst, &mut text), ApStatus::Ok);
        let (status, again) = parse(CStr::from_ptr(text).to_str().unwrap());
        assert_eq!(status, ApStatus::Ok);
        ap_string_free(text);
        ap_instance_free(again);
        ap_instance_free(inst);
    }
}

#[test]
fn placement_handle() {
    let (_, inst) = parse(HOURGLASS);
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(ap_placement(inst, ptr::null(), &mut p), ApStatus::Ok);
        assert_eq!(ap_placement_best(p), 1);
        let mut g = -1.0;
        assert_eq!(ap_placement_value(p, 0, &mut g), ApStatus::Ok);
        assert!((g - 0.125).abs() < 1e-9);
        assert_eq!(ap_placement_value(p, 9, &mut g), ApStatus::InvalidArgument);
        let mut a = -1.0;
        assert_eq!(ap_placement_alpha_bound(p, &mut a), ApStatus::Ok);
        assert!((0.0..=1.0).contains(&a));
        ap_placement_free(p);
        ap_instance_free(inst);
    }
}

#[test]
fn error_codes() {
    let (status, inst) = parse("vertices = 0\n");
    assert_eq!(status, ApStatus::Malformed);
    assert!(inst.is_null());
    assert!(!last_error().is_empty());

    let broken = HOURGLASS.replace("{ target = 1, prob = 1.0 }, ", "{ target = 1, prob = 0.5 }, ");
    assert_eq!(parse(&broken).0, ApStatus::Malformed);
    assert!(last_error().contains("vertex 1"));

    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(ap_instance_from_str(ptr::null(), &mut out), ApStatus::NullPointer);
        let bad = [0xffu8, 0xfe, 0];
        assert_eq!(ap_instance_from_str(bad.as_ptr().cast(), &mut out), ApStatus::InvalidUtf8);
        let missing = CString::new("/nonexistent/instance.toml").unwrap();
        assert_eq!(ap_instance_from_file(missing.as_ptr(), &mut out), ApStatus::Io);
        let mut sol = ptr::null_mut();
        assert_eq!(ap_solve(ptr::null(), 0, ptr::null(), &mut sol), ApStatus::NullPointer);
        assert!(ap_solution_value(ptr::null()).is_nan());
        assert_eq!(ap_gen_worstcase(5, 2.0, 0, &mut out), ApStatus::InvalidArgument);
        assert_eq!(ap_gen_worstcase(5, 0.5, 0, &mut out), ApStatus::Ok);
        assert_eq!(ap_instance_num_targets(out), 5);
        ap_instance_free(out);
        ap_instance_free(ptr::null_mut());
        ap_string_free(ptr::null_mut());
    }
}
