//! Welch t-test against reference values computed at 50 digits with mpmath.

use ein_core::analysis::welch_t_test;

fn fixtures() -> Vec<(Vec<f64>, Vec<f64>, [f64; 3])> {
    let parse =
        |s: &str| -> Vec<f64> { s.split_whitespace().map(|x| x.parse().unwrap()).collect() };
    include_str!("data/welch_oracle.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(';').collect();
            let n = |i: usize| f[i].parse::<f64>().unwrap();
            (parse(f[0]), parse(f[1]), [n(2), n(3), n(4)])
        })
        .collect()
}

#[test]
fn matches_high_precision_oracle() {
    let fixtures = fixtures();
    assert_eq!(fixtures.len(), 10);
    for (a, b, [t, df, p]) in fixtures {
        let r = welch_t_test(&a, &b).unwrap();
        assert!((r.t - t).abs() < 1e-6, "{a:?} {b:?}: t {} vs {t}", r.t);
        assert!((r.df - df).abs() < 1e-6, "{a:?} {b:?}: df {} vs {df}", r.df);
        assert!((r.p - p).abs() < 1e-6, "{a:?} {b:?}: p {} vs {p}", r.p);
    }
}

#[test]
fn swapping_samples_negates_t_only() {
    for (a, b, _) in fixtures() {
        let ab = welch_t_test(&a, &b).unwrap();
        let ba = welch_t_test(&b, &a).unwrap();
        assert_eq!(ab.t, -ba.t);
        assert_eq!(ab.df, ba.df);
        assert_eq!(ab.p, ba.p);
    }
}
