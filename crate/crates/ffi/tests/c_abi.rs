//! The exported functions, called the way a C client would.

use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use ccloop_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn load(src: &str) -> *mut CclLoop {
    let mut q = ptr::null_mut();
    let src = cstr(src);
    assert_eq!(unsafe { ccl_loop_from_tbl(src.as_ptr(), &mut q) }, CclStatus::Ok);
    q
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let mut len = 0;
    unsafe { ccl_last_error(buf.as_mut_ptr(), buf.len(), &mut len) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn t16_through_the_abi() {
    let q = load(ccloop::fixtures::T16_TBL);
    unsafe {
        assert_eq!(ccl_loop_order(q), 16);
        let mut r = 0;
        assert_eq!(ccl_loop_op(q, CclOp::Mul, 4, 8, &mut r), CclStatus::Ok);
        assert_eq!(r, 12);
        assert_eq!(ccl_loop_op(q, CclOp::RightDiv, 12, 4, &mut r), CclStatus::Ok);
        assert_eq!(r, 9);

        let mut nuc = [0u32; 16];
        let mut len = 0;
        assert_eq!(ccl_loop_nucleus(q, nuc.as_mut_ptr(), nuc.len(), &mut len), CclStatus::Ok);
        assert_eq!(&nuc[..len], &[0, 1, 2, 3]);
        assert_eq!(ccl_loop_center(q, nuc.as_mut_ptr(), 2, &mut len), CclStatus::BufferTooSmall);
        assert_eq!((len, &nuc[..2]), (4, &[0, 1][..]));

        let mut holds = false;
        for (name, want) in [("cc", true), ("pa", true), ("wip", true), ("diassociative", false)] {
            let name = cstr(name);
            assert_eq!(ccl_loop_has_property(q, name.as_ptr(), &mut holds), CclStatus::Ok);
            assert_eq!(holds, want);
        }
        let bogus = cstr("bogus");
        assert_eq!(ccl_loop_has_property(q, bogus.as_ptr(), &mut holds), CclStatus::Syntax);

        let flex = cstr("x*(y*x) = (x*y)*x");
        let mut w = [0u32; 2];
        assert_eq!(ccl_loop_check_identity(q, flex.as_ptr(), &mut holds, w.as_mut_ptr(), 2, &mut len), CclStatus::Ok);
        assert!(!holds && len == 2);
        let broken = cstr("x*(y");
        assert_eq!(ccl_loop_check_identity(q, broken.as_ptr(), &mut holds, w.as_mut_ptr(), 2, &mut len), CclStatus::Syntax);
        assert!(last_error().contains("syntax error"));

        let mut quot = ptr::null_mut();
        assert_eq!(ccl_loop_quotient(q, [0u32, 1, 2, 3].as_ptr(), 4, &mut quot), CclStatus::Ok);
        assert_eq!(ccl_loop_order(quot), 4);
        ccl_loop_free(quot);
        assert_eq!(ccl_loop_quotient(q, [0u32, 4].as_ptr(), 2, &mut quot), CclStatus::NotNormal);
        ccl_loop_free(q);
    }
}

#[test]
fn errors_and_null_handling() {
    unsafe {
        let mut q = ptr::null_mut();
        assert_eq!(ccl_loop_from_tbl(ptr::null(), &mut q), CclStatus::NullPointer);
        let bad = cstr("2\n0 1\n1 1\n");
        assert_eq!(ccl_loop_from_tbl(bad.as_ptr(), &mut q), CclStatus::InvalidTable);
        assert!(q.is_null());
        assert!(last_error().contains("Latin"));
        assert_eq!(ccl_loop_order(ptr::null()), 0);
        ccl_loop_free(ptr::null_mut());
        let mut r = 0;
        assert_eq!(ccl_loop_op(ptr::null(), CclOp::Mul, 0, 0, &mut r), CclStatus::NullPointer);
        assert_eq!(ccl_loop_from_table([0u32, 1, 1, 0].as_ptr(), 2, &mut q), CclStatus::Ok);
        assert_eq!(ccl_loop_order(q), 2);
        ccl_loop_free(q);
        let name = CStr::from_ptr(ccl_status_name(CclStatus::NotNormal));
        assert_eq!(name.to_str().unwrap(), "not normal");
    }
}

#[test]
fn search_through_the_abi() {
    unsafe {
        let mut q = ptr::null_mut();
        let req = cstr("cc, nonassociative");
        assert_eq!(ccl_search_first(4, req.as_ptr(), 0, 0, &mut q), CclStatus::Unsatisfiable);
        assert_eq!(ccl_search_first(6, req.as_ptr(), 0, 0, &mut q), CclStatus::Ok);
        assert_eq!(ccl_loop_order(q), 6);
        let mut buf = vec![0 as c_char; 4];
        let mut len = 0;
        assert_eq!(ccl_loop_to_tbl(q, buf.as_mut_ptr(), buf.len(), &mut len), CclStatus::BufferTooSmall);
        buf.resize(len, 0);
        assert_eq!(ccl_loop_to_tbl(q, buf.as_mut_ptr(), buf.len(), &mut len), CclStatus::Ok);
        let text = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        let table = ccloop::LoopTable::parse_tbl(text).unwrap();
        assert!(ccloop::identities::is_cc(&table) && !ccloop::identities::is_group(&table));
        ccl_loop_free(q);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ccloop.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 12);
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from the header");
    }
    assert!(header.contains("typedef struct CclLoop CclLoop;"));
    assert!(header.contains("CCL_STATUS_BUFFER_TOO_SMALL = 11"));
}

/// Compiles `tests/smoke.c` against the static library and runs it.
#[test]
fn c_client_links_and_runs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<this test> -> target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libccloop_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let out = std::env::temp_dir().join(format!("ccloop-smoke-{}", std::process::id()));
    let status = Command::new("cc")
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
