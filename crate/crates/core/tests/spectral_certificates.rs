use collapse_lab::exact::{rat, RationalPoly};
use collapse_lab::linalg::Mat3;
use collapse_lab::map_core::{branch_matrix, iterate, word_string, Branch, ProjectiveDirection, Restitution};
use collapse_lab::spectral::*;
use num_complex::Complex64;
use num_rational::BigRational;

fn rr(r: f64) -> Restitution {
    Restitution::new(r).unwrap()
}

fn word(s: &str) -> PatternWord {
    PatternWord::parse(s).unwrap()
}

/// Printed coefficient polynomials, ascending powers of r.
fn poly(c: &[i64], den: i64) -> RationalPoly {
    RationalPoly::from_i64(c).scale(&rat(1, den))
}

fn reduced_132_reference() -> [RationalPoly; 3] {
    // λ² : (7r⁶ − 24r⁵ − 29r⁴ + 21r² − 8r + 1)/32
    // λ  : (r¹¹ − 8r¹⁰ + 21r⁹ − 29r⁷ − 24r⁶ + 7r⁵)/32
    // 1  : r¹¹
    [
        poly(&[1, -8, 21, 0, -29, -24, 7], 32),
        poly(&[0, 0, 0, 0, 0, 7, -24, -29, 0, 21, -8, 1], 32),
        poly(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1], 1),
    ]
}

fn reduced_1322_reference() -> [RationalPoly; 3] {
    // λ² : (−7r⁸ + 42r⁷ − 18r⁶ − 58r⁵ + 24r⁴ + 38r³ − 30r² + 10r − 1)/64
    // λ  : (−r¹⁴ + 10r¹³ − 30r¹² + 38r¹¹ + 24r¹⁰ − 58r⁹ − 18r⁸ + 42r⁷ − 7r⁶)/64
    // 1  : r¹⁴
    let mut c0 = vec![0; 15];
    c0[14] = 1;
    [
        poly(&[-1, 10, -30, 38, 24, -58, -18, 42, -7], 64),
        poly(&[0, 0, 0, 0, 0, 0, -7, 42, -18, -58, 24, 38, -30, 10, -1], 64),
        poly(&c0, 1),
    ]
}

#[test]
fn reduced_char_polys_match_printed_forms_exactly() {
    for (half, reference) in [("132", reduced_132_reference()), ("1322", reduced_1322_reference())] {
        let h = word(half).letters().to_vec();
        for (n, d) in [(1, 7), (1, 5), (1, 3), (1, 2), (2, 3)] {
            let r = rat(n, d);
            let got = exact_char_poly(&exact_reduced_matrix(&h, &r));
            for k in 0..3 {
                assert_eq!(got[k], reference[k].eval(&r), "half {half}, r = {n}/{d}, coefficient {k}");
            }
        }
    }
}

#[test]
fn determinant_of_reduced_1322() {
    let h = word("1322").letters().to_vec();
    let r = rat(1, 2);
    let c = exact_char_poly(&exact_reduced_matrix(&h, &r));
    // c0 = −det, det = −r¹⁴
    assert_eq!(c[2], BigRational::new(1.into(), (1i64 << 14).into()));
}

#[test]
fn char_poly_of_p1_factors() {
    let r = rr(0.1);
    let (x, a) = (0.1f64, 0.55f64);
    let c = char_poly(&branch_matrix(Branch::One, r));
    // (λ − r²)(λ² + (2r − α²)λ + r²)
    let b = 2.0 * x - a * a;
    let expected = Cubic {
        c2: b - x * x,
        c1: x * x - x * x * b,
        c0: -x.powi(4),
    };
    assert!((c.c2 - expected.c2).abs() < 1e-15);
    assert!((c.c1 - expected.c1).abs() < 1e-15);
    assert!((c.c0 - expected.c0).abs() < 1e-15);
}

fn match_distance(a: &[Complex64; 3], b: &[Complex64; 3]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::MAX, f64::min))
        .fold(0.0, f64::max)
}

#[test]
fn closed_forms_agree_with_numeric_roots() {
    for i in 1..100 {
        let r = rr(i as f64 / 100.0);
        for (es, b) in [(eigen_p1(r), Branch::One), (eigen_p2(r), Branch::Two), (eigen_p3(r), Branch::Three)] {
            let m = branch_matrix(b, r);
            let num = eigen_numeric(&m);
            assert!(match_distance(&es.eigenvalues, &num.eigenvalues) < 1e-11, "r={}", r.r());
            assert!(es.max_residual(&m) < 1e-10);
            assert!(num.max_residual(&m) < 1e-10);
        }
    }
}

#[test]
fn closed_form_spot_values() {
    let e = eigen_p1(rr(0.05));
    assert!((e.eigenvalues[0].re - 0.0025).abs() < 1e-16);
    // Double root r at 7 − 4√3, from r² = 14r − 1 in (r² − 6r + 1)/8.
    let c = 7.0 - 4.0 * 3f64.sqrt();
    let e = eigen_p1(rr(c));
    assert!((e.eigenvalues[1] - c).norm() < 1e-7 && (e.eigenvalues[2] - c).norm() < 1e-7);
    let e = eigen_p2(rr(0.5));
    for l in e.eigenvalues {
        assert!((l.norm() - 0.5).abs() < 1e-14);
    }
}

#[test]
fn regime_switches_at_exact_points() {
    let s1 = regime_switches(&discriminant_p1(), 80);
    let s2 = regime_switches(&discriminant_p2(), 80);
    assert_eq!(s1.len(), 1);
    assert_eq!(s2.len(), 1);
    // (7 − 4√3) solves r² − 14r + 1; check the bracket by exact signs.
    let f1 = |q: &BigRational| q * q - BigRational::from_integer(14.into()) * q + BigRational::from_integer(1.into());
    let f2 = |q: &BigRational| q * q - BigRational::from_integer(6.into()) * q + BigRational::from_integer(1.into());
    let (lo, hi) = &s1[0];
    assert!(f1(lo) >= BigRational::from_integer(0.into()) && f1(hi) <= BigRational::from_integer(0.into()));
    let (lo, hi) = &s2[0];
    assert!(f2(lo) >= BigRational::from_integer(0.into()) && f2(hi) <= BigRational::from_integer(0.into()));
    let mid = collapse_lab::exact::rational_to_f64(&s2[0].0);
    assert!((mid - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
}

#[test]
fn word_matrix_square_identity() {
    let r = rr(0.3);
    let full = word_matrix(word("132312").letters(), r);
    let red = reduced_matrix(word("132").letters(), r);
    assert!((red * red).max_abs_diff(&full) < 1e-13);
    assert!(word_matrix(word("2").letters(), r).max_abs_diff(&branch_matrix(Branch::Two, r)) == 0.0);
    let _ = Mat3::identity();
}

#[test]
fn pattern_132312_stability_range() {
    let w = word("132312");
    for r in [0.23, 0.3, 0.5] {
        let c = certify_pattern(&w, rr(r));
        assert!(c.exists && c.stable, "r = {r}");
        assert!(c.multiplier.unwrap().norm() < 1.0);
        // The certified direction is periodic for the map with this word.
        let u = c.direction.unwrap();
        let orbit = iterate(&u, rr(r), 6).unwrap();
        let letters: Vec<Branch> = orbit.iter().map(|s| s.branch).collect();
        assert_eq!(word_string(&letters), "132312");
        let back = orbit[5].next;
        assert!((back.x - u.x).abs() + (back.y - u.y).abs() + (back.z - u.z).abs() < 1e-10);
    }
    for r in [0.20, 0.21] {
        let c = certify_pattern(&w, rr(r));
        assert!(!c.stable, "r = {r}");
        assert_eq!(c.failed_inequality, Some((1, "alpha*y - x > 0")));
    }
}

#[test]
fn critical_value_of_132312() {
    let r = critical_r_132(1e-14).unwrap();
    assert_eq!(format!("{r:.12}"), "0.220069786146");
    assert!(g_132(0.3) > 0.0);
    assert!(g_132(0.21) < 0.0);
}

#[test]
fn half_word_shortcut_matches_full_check() {
    let w = word("132312");
    let h = w.palindromic_half().unwrap().to_vec();
    for r in [0.25, 0.3, 0.5] {
        let es = eigen_numeric(&reduced_matrix(&h, rr(r)));
        let d = es.dominant_index.unwrap();
        assert!(es.eigenvalues[d].re < 0.0);
        let u = es.real_vector(d);
        assert_eq!(feasibility_check_half(&w, &u, rr(r)), Some(feasibility_check(&w, &u, rr(r))));
        assert_eq!(feasibility_check(&w, &u, rr(r)), Feasibility::Pass);
    }
}

#[test]
fn pattern_13223122_never_stable() {
    let w = word("13223122");
    for i in 11..990 {
        let r = i as f64 / 1000.0;
        assert!(!certify_pattern(&w, rr(r)).stable, "r = {r}");
    }
    let (a, b) = boundary_roots_1322(1e-14).unwrap();
    let c = 3.0 - 2.0 * 2f64.sqrt();
    assert!((a - c).abs() < 1e-10 && (b - c).abs() < 1e-10);
}

#[test]
fn window_word_1133_is_stable_inside_its_window() {
    let c = certify_pattern(&word("1133"), rr(0.15));
    assert!(c.exists && c.stable);
}

#[test]
fn mirror_words_share_certificates() {
    for s in ["132312", "1133", "13222", "1322231222"] {
        for r in [0.15, 0.2, 0.3, 0.45] {
            let a = certify_pattern(&word(s), rr(r));
            let b = certify_pattern(&word(s).mirror(), rr(r));
            assert_eq!((a.exists, a.stable), (b.exists, b.stable), "{s} at {r}");
            if let (Some(u), Some(v)) = (a.direction, b.direction) {
                let m: ProjectiveDirection = u.mirror();
                assert!((m.x - v.x).abs() + (m.y - v.y).abs() + (m.z - v.z).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn family_words() {
    assert_eq!(family_word(2, 1).unwrap().to_string(), "132312");
    assert_eq!(family_word(1, 3).unwrap().to_string(), "13222");
    assert_eq!(family_word(3, 3).unwrap().to_string(), "1313122231313222");
    assert!(family_word(4, 1).is_err());
    assert_eq!(word("132312").symbol_length(), 14);
}
