use std::ffi::{CStr, CString};
use std::ptr;

use tricap_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(tricap_last_error()) }.to_string_lossy().into_owned()
}

fn config(text: &str) -> *mut TricapConfig {
    let text = CString::new(text).unwrap();
    let mut cfg = ptr::null_mut();
    let status = unsafe { tricap_config_parse(text.as_ptr(), &mut cfg) };
    assert_eq!(status, TricapStatus::Ok, "{}", last_error());
    assert!(!cfg.is_null());
    cfg
}

#[test]
fn parse_errors_carry_status_and_message() {
    let text = CString::new("scenario = spinodal\n[material]\nviscosity = 1\n").unwrap();
    let mut cfg = ptr::null_mut();
    let status = unsafe { tricap_config_parse(text.as_ptr(), &mut cfg) };
    assert_eq!(status, TricapStatus::UnknownKey);
    assert!(cfg.is_null());
    assert!(last_error().contains("material.viscosity"), "{}", last_error());

    let text = CString::new("scenario = lens\n[material]\ngamma12 = 1\ngamma13 = 3\ngamma23 = 1\n").unwrap();
    let status = unsafe { tricap_config_parse(text.as_ptr(), &mut cfg) };
    assert_eq!(status, TricapStatus::TotalSpreading);
    let name = unsafe { CStr::from_ptr(tricap_status_name(status)) };
    assert_eq!(name.to_str().unwrap(), "TotalSpreading");
}

#[test]
fn null_arguments_are_reported() {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { tricap_config_parse(ptr::null(), &mut cfg) }, TricapStatus::NullPointer);
    assert_eq!(unsafe { tricap_fluid_step(ptr::null_mut(), 0.0) }, TricapStatus::NullPointer);
    unsafe {
        tricap_config_free(ptr::null_mut());
        tricap_fluid_free(ptr::null_mut());
        tricap_solid_free(ptr::null_mut());
    }
}

#[test]
fn fluid_steps_dissipate_energy() {
    let cfg = config("scenario = spinodal\n[grid]\nnx = 16\nny = 16\n[time]\ndt = 1e-4\n");
    let mut sim = ptr::null_mut();
    unsafe {
        assert_eq!(tricap_fluid_new(cfg, &mut sim), TricapStatus::Ok);
        let mut e0 = TricapEnergy::default();
        assert_eq!(tricap_fluid_energy(sim, &mut e0), TricapStatus::Ok);
        for _ in 0..5 {
            assert_eq!(tricap_fluid_step(sim, 0.0), TricapStatus::Ok, "{}", last_error());
        }
        let mut e1 = TricapEnergy::default();
        tricap_fluid_energy(sim, &mut e1);
        assert!(e1.total <= e0.total);
        let (mut nx, mut ny, mut t, mut steps) = (0usize, 0usize, 0.0, 0u64);
        assert_eq!(tricap_fluid_info(sim, &mut nx, &mut ny, &mut t, &mut steps), TricapStatus::Ok);
        assert_eq!((nx, ny, steps), (16, 16, 5));
        assert!((t - 5e-4).abs() < 1e-15);

        let mut buf = vec![0.0; nx * ny];
        let mut total = vec![0.0; nx * ny];
        for p in 0..3 {
            assert_eq!(tricap_fluid_phase(sim, p, buf.as_mut_ptr(), buf.len()), TricapStatus::Ok);
            total.iter_mut().zip(&buf).for_each(|(a, b)| *a += b);
        }
        assert!(total.iter().all(|s| (s - 1.0).abs() < 1e-10));
        assert_eq!(tricap_fluid_phase(sim, 3, buf.as_mut_ptr(), buf.len()), TricapStatus::InvalidParameter);
        assert_eq!(tricap_fluid_phase(sim, 0, buf.as_mut_ptr(), 3), TricapStatus::BufferTooSmall);

        assert_eq!(tricap_fluid_step(sim, 1e3), TricapStatus::CflViolation);
        tricap_fluid_free(sim);
        tricap_config_free(cfg);
    }
}

#[test]
fn solid_handles_and_scenario_mismatch() {
    let name = CString::new("solid_traction").unwrap();
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(tricap_config_defaults(name.as_ptr(), &mut cfg), TricapStatus::Ok);
        let mut fluid = ptr::null_mut();
        assert_eq!(tricap_fluid_new(cfg, &mut fluid), TricapStatus::WrongScenario);
        assert!(fluid.is_null());

        let mut sim = ptr::null_mut();
        assert_eq!(tricap_solid_new(cfg, &mut sim), TricapStatus::Ok);
        let mut work_total = 0.0;
        for _ in 0..50 {
            let mut w = 0.0;
            assert_eq!(tricap_solid_step(sim, 0.0, &mut w), TricapStatus::Ok, "{}", last_error());
            work_total += w;
        }
        let mut e = TricapEnergy::default();
        tricap_solid_energy(sim, &mut e);
        assert!(work_total > 0.0);
        assert!((e.ke_solid + e.strain_solid - work_total).abs() < 1e-3 * work_total);
        let mut tip = [0.0; 2];
        assert_eq!(tricap_solid_tip(sim, tip.as_mut_ptr()), TricapStatus::Ok);
        assert!(tip[0] > 0.0);
        tricap_solid_free(sim);
        tricap_config_free(cfg);
    }
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("scenario = spinodal\n[grid]\nnx = 8\nny = 8\n");
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(tricap_run(cfg, out.as_ptr(), 3), TricapStatus::Ok, "{}", last_error());
        tricap_config_free(cfg);
    }
    let csv = std::fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(dir.path().join("fields_0.vtk").exists());
    assert!(dir.path().join("fields_3.vtk").exists());
    assert!(dir.path().join("run_manifest.txt").exists());
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/tricap.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{header}\"\nint main(void) {{ TricapConfig *c = 0; TricapStatus s = tricap_config_parse(\"\", &c); tricap_config_free(c); return s == TRICAP_STATUS_OK; }}\n"
        ),
    )
    .unwrap();
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(&src)
        .status()
        .expect("a C compiler named `cc` on PATH");
    assert!(status.success());
}
