use std::ffi::{CStr, CString};
use std::ptr;

use qifkit_ffi::*;

fn prior(p: &[f64]) -> *mut QifPrior {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { qif_prior_new(p.as_ptr(), p.len(), &mut out) }, QifStatus::Ok);
    out
}

fn channel(rows: usize, cols: usize, data: &[f64]) -> *mut QifChannel {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { qif_channel_new(data.as_ptr(), rows, cols, &mut out) },
        QifStatus::Ok
    );
    out
}

fn last_error() -> Option<String> {
    let p = qif_last_error_message();
    if p.is_null() {
        return None;
    }
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { qif_string_free(p) };
    Some(s)
}

const BSC: [f64; 4] = [0.9, 0.1, 0.1, 0.9];

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(qif_version()) };
    assert_eq!(v.to_str().unwrap(), qifkit::VERSION);
}

#[test]
fn capacities_through_handles() {
    let c = channel(2, 2, &BSC);
    unsafe {
        assert_eq!(qif_channel_n_inputs(c), 2);
        assert_eq!(qif_channel_n_outputs(c), 2);
        let mut v = 0.0;
        assert_eq!(qif_bayes_capacity(c, &mut v), QifStatus::Ok);
        assert!((v - 1.8f64.ln()).abs() < 1e-12);
        assert_eq!(qif_ldp_leakage(c, &mut v), QifStatus::Ok);
        assert!((v - 9f64.ln()).abs() < 1e-12);
        assert_eq!(qif_renyi_ldp(c, f64::INFINITY, &mut v), QifStatus::Ok);
        assert!((v - 9f64.ln()).abs() < 1e-12);
        let f = CString::new("alpha:inf").unwrap();
        assert_eq!(qif_multiplicative_f_capacity(c, f.as_ptr(), &mut v), QifStatus::Ok);
        assert!((v - 1.8f64.ln()).abs() < 1e-12);
        qif_channel_free(c);
    }
}

#[test]
fn alpha_measures_through_handles() {
    let pi = prior(&[0.5, 0.5]);
    let c = channel(2, 2, &BSC);
    unsafe {
        let mut v = 0.0;
        assert_eq!(qif_renyi_entropy(pi, 2.0, &mut v), QifStatus::Ok);
        assert!((v - 2f64.ln()).abs() < 1e-12);
        assert_eq!(qif_arimoto_mi(pi, c, f64::INFINITY, &mut v), QifStatus::Ok);
        assert!((v - 1.8f64.ln()).abs() < 1e-12);
        let mut s = 0.0;
        assert_eq!(qif_sibson_mi(pi, c, 1.0, &mut s), QifStatus::Ok);
        assert_eq!(qif_arimoto_mi(pi, c, 1.0, &mut v), QifStatus::Ok);
        assert!((v - s).abs() < 1e-12);
        assert_eq!(qif_alpha_beta_leakage(pi, c, 2.0, 1.0, &mut s), QifStatus::Ok);
        assert_eq!(qif_arimoto_mi(pi, c, 2.0, &mut v), QifStatus::Ok);
        assert!((v - s).abs() < 1e-10);

        let mut guess = [0.0; 2];
        assert_eq!(
            qif_min_expected_alpha_loss(pi, 1.0, &mut v, guess.as_mut_ptr(), 2),
            QifStatus::Ok
        );
        assert!((v - 2f64.ln()).abs() < 1e-12);
        assert_eq!(guess, [0.5, 0.5]);
        assert_eq!(
            qif_min_expected_alpha_loss(pi, 1.0, &mut v, guess.as_mut_ptr(), 1),
            QifStatus::BufferTooSmall
        );

        let mu = prior(&[1.0, 0.0]);
        assert_eq!(qif_renyi_divergence(mu, pi, 1.0, &mut v), QifStatus::Ok);
        assert!((v - 2f64.ln()).abs() < 1e-12);
        qif_prior_free(mu);
        qif_prior_free(pi);
        qif_channel_free(c);
    }
}

#[test]
fn generalized_leakage_through_handles() {
    let mut pi = ptr::null_mut();
    let c = channel(2, 2, &BSC);
    let mut g = ptr::null_mut();
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(qif_prior_uniform(2, &mut pi), QifStatus::Ok);
        assert_eq!(qif_prior_len(pi), 2);
        assert_eq!(qif_gain_identity(&mut g), QifStatus::Ok);
        let id = CString::new("affine").unwrap();
        let mut v = 0.0;
        assert_eq!(qif_gen_prior_vulnerability(pi, g, id.as_ptr(), &mut v), QifStatus::Ok);
        assert!((v - 0.5).abs() < 1e-15);
        assert_eq!(
            qif_gen_leakage(pi, c, g, id.as_ptr(), id.as_ptr(), true, &mut v),
            QifStatus::Ok
        );
        assert!((v - 1.8f64.ln()).abs() < 1e-12);
        assert_eq!(
            qif_gen_leakage(pi, c, g, id.as_ptr(), id.as_ptr(), false, &mut v),
            QifStatus::Ok
        );
        assert!((v - 0.4).abs() < 1e-12);

        let rows = [1.0, 0.0, 0.0, 1.0];
        assert_eq!(qif_gain_matrix(rows.as_ptr(), 2, 2, &mut m), QifStatus::Ok);
        let mut w = 0.0;
        assert_eq!(qif_gen_prior_vulnerability(pi, m, id.as_ptr(), &mut w), QifStatus::Ok);
        assert_eq!(w, 0.5);

        let mut s = ptr::null_mut();
        assert_eq!(qif_gain_simplex(&mut s), QifStatus::Ok);
        let f2 = CString::new("alpha:2").unwrap();
        assert_eq!(
            qif_gen_leakage(pi, c, s, f2.as_ptr(), f2.as_ptr(), true, &mut v),
            QifStatus::Ok
        );
        let mut a = 0.0;
        assert_eq!(qif_arimoto_mi(pi, c, 2.0, &mut a), QifStatus::Ok);
        assert!((v - a).abs() < 1e-10);

        qif_gain_free(s);
        qif_gain_free(m);
        qif_gain_free(g);
        qif_prior_free(pi);
        qif_channel_free(c);
    }
}

#[test]
fn maximal_alpha_leakage_reports_witness() {
    let c = channel(2, 2, &BSC);
    let mut v = 0.0;
    let mut w = [0.0; 2];
    unsafe {
        assert_eq!(
            qif_maximal_alpha_leakage(c, f64::INFINITY, 0, &mut v, w.as_mut_ptr(), 2),
            QifStatus::Ok
        );
        qif_channel_free(c);
    }
    assert!((v - 1.8f64.ln()).abs() < 1e-9);
    assert!((w[0] + w[1] - 1.0).abs() < 1e-12);
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut p = ptr::null_mut();
        let bad = [0.7, 0.7];
        assert_eq!(qif_prior_new(bad.as_ptr(), 2, &mut p), QifStatus::InvalidDistribution);
        assert!(p.is_null());
        assert!(last_error().unwrap().contains("distribution"));

        let mut c = ptr::null_mut();
        let rows = [0.5, 0.6];
        assert_eq!(qif_channel_new(rows.as_ptr(), 1, 2, &mut c), QifStatus::InvalidDistribution);

        let mut v = 0.0;
        assert_eq!(qif_bayes_capacity(ptr::null(), &mut v), QifStatus::NullPointer);

        let ch = channel(2, 2, &BSC);
        assert_eq!(qif_renyi_ldp(ch, -1.0, &mut v), QifStatus::OutOfRange);
        let bogus = CString::new("no-such-mean").unwrap();
        assert_eq!(qif_multiplicative_f_capacity(ch, bogus.as_ptr(), &mut v), QifStatus::Parse);

        let pi = prior(&[0.5, 0.5, 0.0]);
        assert_eq!(qif_arimoto_mi(pi, ch, 2.0, &mut v), QifStatus::DimensionMismatch);

        let mut g = ptr::null_mut();
        assert_eq!(qif_gain_simplex(&mut g), QifStatus::Ok);
        let pow = CString::new("pow:2").unwrap();
        assert_eq!(
            qif_gen_prior_vulnerability(pi, g, pow.as_ptr(), &mut v),
            QifStatus::InvalidMean
        );

        // Success clears the error.
        assert_eq!(qif_bayes_capacity(ch, &mut v), QifStatus::Ok);
        assert!(last_error().is_none());

        qif_gain_free(g);
        qif_prior_free(pi);
        qif_channel_free(ch);
        qif_prior_free(ptr::null_mut());
        qif_string_free(ptr::null_mut());
    }
}
