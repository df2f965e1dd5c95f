use std::ffi::{CStr, CString};
use std::ptr;

use xlab_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = xlab_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn named(name: &str) -> *mut XlabGraph {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { xlab_graph_named(c(name).as_ptr(), &mut g) }, XlabStatus::Ok);
    g
}

fn complete_space(n: usize) -> *mut XlabSpace {
    let eta: Vec<f64> = (0..n * n).map(|i| if i / n == i % n { 0.0 } else { 1.0 }).collect();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { xlab_space_from_matrix(eta.as_ptr(), n, 1, &mut s) }, XlabStatus::Ok);
    s
}

#[test]
fn triangle_density_in_complete_graph() {
    let g = named("K_3");
    let s = complete_space(5);
    let mut t = 0.0;
    assert_eq!(unsafe { xlab_density(g, s, 1, &mut t) }, XlabStatus::Ok);
    // t(K_3, K_n) normalized: hom(K_3, K_5) * 5^3 / (5^3 * (5*4)^3 / 5^3) = 60 * 125 / 8000
    assert!((t - 60.0 * 125.0 / 8000.0).abs() < 1e-12, "{t}");
    assert!(xlab_last_error().is_null());
    unsafe {
        xlab_graph_free(g);
        xlab_space_free(s);
    }
}

#[test]
fn parsed_graph_and_sizes() {
    let mut g = ptr::null_mut();
    let text = c("n=4\n0 1\n1 2\n2 3\n3 0\n");
    assert_eq!(unsafe { xlab_graph_parse(text.as_ptr(), &mut g) }, XlabStatus::Ok);
    let (mut v, mut e) = (0, 0);
    assert_eq!(unsafe { xlab_graph_size(g, &mut v, &mut e) }, XlabStatus::Ok);
    assert_eq!((v, e), (4, 4));
    unsafe { xlab_graph_free(g) };
}

#[test]
fn exact_density_in_rational_space() {
    let json = c(r#"{"n": 2, "mode": "rational", "eta": [["1/8", "3/8"], ["3/8", "1/8"]]}"#);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { xlab_space_from_json(json.as_ptr(), &mut s) }, XlabStatus::Ok);
    let (mut atoms, mut rational) = (0, 0);
    assert_eq!(unsafe { xlab_space_info(s, &mut atoms, &mut rational) }, XlabStatus::Ok);
    assert_eq!((atoms, rational), (2, 1));

    let g = named("K_3");
    let mut len = 0;
    // Too small on purpose: len still reports the size.
    let mut small = [0 as std::ffi::c_char; 2];
    assert_eq!(
        unsafe { xlab_density_exact(g, s, 1, small.as_mut_ptr(), small.len(), &mut len) },
        XlabStatus::BufferTooSmall
    );
    let mut buf = vec![0 as std::ffi::c_char; len + 1];
    assert_eq!(unsafe { xlab_density_exact(g, s, 1, buf.as_mut_ptr(), buf.len(), &mut len) }, XlabStatus::Ok);
    // pi = (1/2, 1/2), so t(K_3) = 8 tr(eta^3) with eigenvalues 1/2 and -1/4.
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap(), "7/8");
    unsafe {
        xlab_graph_free(g);
        xlab_space_free(s);
    }
}

#[test]
fn spectrum_of_complete_space() {
    let s = complete_space(4);
    let mut len = 0;
    assert_eq!(unsafe { xlab_spectrum(s, ptr::null_mut(), 0, &mut len) }, XlabStatus::BufferTooSmall);
    assert_eq!(len, 4);
    let mut vals = vec![0.0; len];
    assert_eq!(unsafe { xlab_spectrum(s, vals.as_mut_ptr(), vals.len(), &mut len) }, XlabStatus::Ok);
    // S = (J - I)/3 has eigenvalues 1 and -1/3 (three times).
    assert!((vals[0] - 1.0).abs() < 1e-12);
    for v in &vals[1..] {
        assert!((v + 1.0 / 3.0).abs() < 1e-12);
    }
    unsafe { xlab_space_free(s) };
}

#[test]
fn errors_map_to_codes() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { xlab_graph_parse(c("0 1\nx y\n").as_ptr(), &mut g) }, XlabStatus::Parse);
    assert!(g.is_null());
    assert!(last_error().contains("line 2"));

    assert_eq!(unsafe { xlab_graph_named(c("Z_9").as_ptr(), &mut g) }, XlabStatus::Validation);
    assert_eq!(unsafe { xlab_graph_parse(ptr::null(), &mut g) }, XlabStatus::NullPointer);
    assert_eq!(unsafe { xlab_graph_named(c("K_2").as_ptr(), ptr::null_mut()) }, XlabStatus::NullPointer);

    let mut s = ptr::null_mut();
    let asym = [0.0, 0.5, 0.25, 0.25];
    assert_eq!(unsafe { xlab_space_from_matrix(asym.as_ptr(), 2, 0, &mut s) }, XlabStatus::Validation);

    let isolated = [1.0, 0.0, 0.0, 0.0];
    let status = unsafe { xlab_space_from_matrix(isolated.as_ptr(), 2, 0, &mut s) };
    assert_eq!(status, XlabStatus::Degenerate, "{}", last_error());

    let f = complete_space(3);
    let g = named("K_2");
    let mut len = 0;
    let mut buf = [0 as std::ffi::c_char; 16];
    assert_eq!(unsafe { xlab_density_exact(g, f, 1, buf.as_mut_ptr(), buf.len(), &mut len) }, XlabStatus::Precondition);
    unsafe {
        xlab_graph_free(g);
        xlab_space_free(f);
        xlab_graph_free(ptr::null_mut());
        xlab_space_free(ptr::null_mut());
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(xlab_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
