use std::ffi::{CStr, CString};
use std::ptr;

use ebfvm_ffi::*;

const SMALL_CASE: &str = "[geometry]
radius = 0.03
width = 0.08
clearance = 20e-6
feed_hole_radius = 0

[operating]
speed_rpm = 3000
load_y = -500
moment_y = 0
y0 = -5e-6

[lubricant]
rho0 = 810
eta0 = 0.1

[mesh]
nx = 8
ny = 4
n_layers = 4
";

fn last_error() -> String {
    unsafe { CStr::from_ptr(ebfvm_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn parse(text: &str) -> (EbfvmStatus, *mut EbfvmCase) {
    let c = CString::new(text).unwrap();
    let mut case = ptr::null_mut();
    let s = unsafe { ebfvm_case_parse(c.as_ptr(), &mut case) };
    (s, case)
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(ebfvm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn bad_case_reports_the_line() {
    let (s, case) = parse(&SMALL_CASE.replace("20e-6", "-1"));
    assert_eq!(s, EbfvmStatus::Config);
    assert!(case.is_null());
    let msg = last_error();
    assert!(msg.contains("line 4") && msg.contains("clearance"), "{msg}");
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        let mut case = ptr::null_mut();
        assert_eq!(ebfvm_case_parse(ptr::null(), &mut case), EbfvmStatus::NullPointer);
        assert_eq!(ebfvm_case_reference(ptr::null_mut()), EbfvmStatus::NullPointer);
        let mut out = ptr::null_mut();
        assert_eq!(ebfvm_run(ptr::null(), &mut out), EbfvmStatus::NullPointer);
        assert!(out.is_null());
        assert_eq!(ebfvm_results_node_count(ptr::null()), 0);
        assert!(!ebfvm_results_converged(ptr::null()));
        ebfvm_case_free(ptr::null_mut());
        ebfvm_results_free(ptr::null_mut());
    }
    assert!(!last_error().is_empty());
}

#[test]
fn missing_file_is_a_config_error() {
    let path = CString::new("/nonexistent/case.txt").unwrap();
    let mut case = ptr::null_mut();
    assert_eq!(
        unsafe { ebfvm_case_load(path.as_ptr(), &mut case) },
        EbfvmStatus::Config
    );
    assert!(last_error().contains("cannot read"));
}

#[test]
fn run_and_read_back() {
    let (s, case) = parse(SMALL_CASE);
    assert_eq!(s, EbfvmStatus::Ok);
    unsafe {
        assert_eq!(ebfvm_case_set_coupling(case, true, false), EbfvmStatus::Ok);
        let mut results = ptr::null_mut();
        assert_eq!(ebfvm_run(case, &mut results), EbfvmStatus::Ok, "{}", last_error());
        assert!(ebfvm_results_converged(results));
        let n = ebfvm_results_node_count(results);
        assert_eq!(n, 9 * 5);

        let mut small = vec![0.0; n - 1];
        assert_eq!(
            ebfvm_results_field(results, EbfvmField::Pressure, small.as_mut_ptr(), small.len()),
            EbfvmStatus::BufferTooSmall
        );
        let mut p = vec![0.0; n];
        let mut theta = vec![0.0; n];
        let mut t = vec![0.0; n];
        assert_eq!(
            ebfvm_results_field(results, EbfvmField::Pressure, p.as_mut_ptr(), n),
            EbfvmStatus::Ok
        );
        assert_eq!(
            ebfvm_results_field(results, EbfvmField::FillFraction, theta.as_mut_ptr(), n),
            EbfvmStatus::Ok
        );
        assert_eq!(
            ebfvm_results_field(results, EbfvmField::MidplaneTemperature, t.as_mut_ptr(), n),
            EbfvmStatus::Ok
        );
        assert!(p.iter().any(|&x| x > 1e5));
        assert!(theta.iter().all(|&x| (0.0..=1.0).contains(&x)));
        // isothermal: the ambient temperature everywhere
        assert!(t.iter().all(|&x| x == 353.15));

        let mut loads = [0.0; 4];
        let mut q = [1.0; 4];
        assert_eq!(
            ebfvm_results_equilibrium(results, loads.as_mut_ptr(), q.as_mut_ptr()),
            EbfvmStatus::Ok
        );
        assert_eq!(q, [0.0, -5e-6, 0.0, 0.0]);
        // a journal pushed to Y < 0 carries a downward load
        assert!(loads[1] < 0.0);

        let dir = tempfile::TempDir::new().unwrap();
        let d = CString::new(dir.path().to_str().unwrap()).unwrap();
        assert_eq!(ebfvm_results_write(results, case, d.as_ptr()), EbfvmStatus::Ok);
        assert!(dir.path().join("surface.csv").exists());

        ebfvm_results_free(results);
        ebfvm_case_free(case);
    }
}

#[test]
fn contact_and_non_convergence() {
    unsafe {
        let (_, case) = parse(&SMALL_CASE.replace("y0 = -5e-6", "y0 = -3e-5"));
        ebfvm_case_set_coupling(case, true, false);
        let mut results = ptr::null_mut();
        assert_eq!(ebfvm_run(case, &mut results), EbfvmStatus::Contact);
        assert!(results.is_null());
        ebfvm_case_free(case);

        let (_, case) = parse(&format!("{SMALL_CASE}\n[coupling]\nmax_outer = 1\n"));
        assert_eq!(ebfvm_run(case, &mut results), EbfvmStatus::NotConverged);
        assert!(!results.is_null());
        assert!(!ebfvm_results_converged(results));
        ebfvm_results_free(results);
        ebfvm_case_free(case);
    }
}

#[test]
fn mesh_override_is_checked() {
    unsafe {
        let mut case = ptr::null_mut();
        assert_eq!(ebfvm_case_reference(&mut case), EbfvmStatus::Ok);
        assert_eq!(ebfvm_case_set_mesh(case, 1, 4, 4), EbfvmStatus::Config);
        assert_eq!(ebfvm_case_set_mesh(case, 6, 4, 3), EbfvmStatus::Ok);
        ebfvm_case_free(case);
    }
}
