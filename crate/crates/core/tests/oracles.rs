//! Library results against independently computed reference values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};
use xmarket_core::descriptive_stats::{correlation_matrix, excess_kurtosis, fit_line_with_ci, pearson, skewness};
use xmarket_core::features::rolling_stats;
use xmarket_core::linalg::Matrix;
use xmarket_core::market_data::{align_by_date, align_by_week, embedded_corpus, Corpus};
use xmarket_core::regressors::fit_ols;
use xmarket_core::special::{student_t_cdf, student_t_quantile};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

// numpy.corrcoef over USA then AUS open/high/low/close on the shared dates
const DAILY_OHLC_CORR: [[f64; 8]; 8] = [
    [1.0, 0.9854377162680443, 0.9913682956732079, 0.9739766945216851, 0.9330915217430027, 0.9357022298209371, 0.9363424192829358, 0.934387885994133],
    [0.9854377162680444, 1.0, 0.985470658096981, 0.9919561456053912, 0.9327273790053539, 0.9296447609122832, 0.9268491899607652, 0.9246058299208146],
    [0.9913682956732079, 0.985470658096981, 1.0, 0.9875201932806997, 0.9402071837476164, 0.9379133294771428, 0.9446944650826468, 0.9396017351836656],
    [0.9739766945216851, 0.9919561456053914, 0.9875201932806996, 1.0, 0.9303579772496702, 0.9261642213448066, 0.9280436081211403, 0.9237215437143351],
    [0.9330915217430026, 0.9327273790053539, 0.9402071837476164, 0.9303579772496703, 1.0, 0.990999187125957, 0.9880658263921117, 0.9835372062694724],
    [0.9357022298209371, 0.9296447609122832, 0.937913329477143, 0.9261642213448066, 0.990999187125957, 1.0, 0.9906732723355285, 0.9939884531474508],
    [0.9363424192829358, 0.9268491899607652, 0.9446944650826469, 0.9280436081211403, 0.9880658263921117, 0.9906732723355285, 1.0, 0.994999037896706],
    [0.9343878859941329, 0.9246058299208146, 0.9396017351836657, 0.9237215437143351, 0.9835372062694725, 0.9939884531474509, 0.994999037896706, 1.0],
];

#[test]
fn daily_ohlc_correlations_match_numpy() {
    let pair = align_by_date(&embedded_corpus(Corpus::UsaDaily), &embedded_corpus(Corpus::AusDaily)).unwrap();
    assert_eq!(pair.len(), 125);
    let m = correlation_matrix(&pair.ohlc_columns::<f64>()).unwrap();
    assert_eq!(m.labels[0], "USA_Open");
    assert_eq!(m.labels[7], "AUS_Close");
    for i in 0..8 {
        for j in 0..8 {
            assert!(close(m.r[i][j], DAILY_OHLC_CORR[i][j], 1e-12), "({i},{j}) {} vs {}", m.r[i][j], DAILY_OHLC_CORR[i][j]);
            assert_eq!(m.r[i][j], m.r[j][i]);
        }
    }
    let r = pearson(&pair.series_a::<f64>(), &pair.series_b::<f64>()).unwrap();
    assert!(close(r, 0.9237215437143351, 1e-12));
}

#[test]
fn weekly_line_matches_scipy_linregress() {
    let pair = align_by_week(&embedded_corpus(Corpus::UsaWeekly), &embedded_corpus(Corpus::AusWeekly)).unwrap();
    let fit = fit_line_with_ci(&pair.series_a::<f64>(), &pair.series_b::<f64>(), 0.95).unwrap();
    assert_eq!(fit.n, 27);
    assert!(close(fit.slope, 0.9117455977695218, 1e-10));
    assert!(close(fit.intercept, 2934.571060487585, 1e-10));
    assert!(close(fit.r.unwrap(), 0.9317238899221675, 1e-10));
    assert!(close(fit.residual_std, 117.40406687708699, 1e-10));
    assert!(close(fit.t_quantile, 2.059538552753294, 1e-9));
    assert!(close(fit.predict(6000.0), 8405.044647104714, 1e-10));
    assert!(close(fit.half_width(6000.0), 50.223171242267256, 1e-8));
}

#[test]
fn t_distribution_matches_statrs() {
    for df in [1.0, 2.0, 3.0, 5.0, 10.0, 25.0, 120.0] {
        let d = StudentsT::new(0.0, 1.0, df).unwrap();
        for p in [0.005, 0.025, 0.1, 0.5, 0.8, 0.975, 0.995] {
            let q = student_t_quantile(p, df);
            assert!(close(q, d.inverse_cdf(p), 1e-8), "df {df} p {p}: {q} vs {}", d.inverse_cdf(p));
        }
        for t in [-4.0, -1.0, 0.0, 0.3, 2.5] {
            assert!((student_t_cdf(t, df) - d.cdf(t)).abs() < 1e-12);
        }
    }
    assert!(close(student_t_quantile(0.975, 1.0), 12.706204736432095, 1e-9));
}

#[test]
fn hand_evaluated_shape_statistics() {
    assert!((skewness(&[0.0, 0.0, 0.0, 1.0]).unwrap() - 2.0f64).abs() < 1e-12);
    assert!((excess_kurtosis(&[-1.0, -1.0, 1.0, 1.0]).unwrap() + 6.0f64).abs() < 1e-12);
    let (_, std) = rolling_stats(&[1.0, 2.0, 4.0], 3).unwrap();
    assert!((std[2].unwrap() - 1.5275252316519465f64).abs() < 1e-15);
}

/// Normal equations solved by Gauss-Jordan, independent of the library's QR.
fn normal_equations(x: &Matrix<f64>, y: &[f64]) -> Vec<f64> {
    let p = x.n_cols() + 1;
    let aug = |r: &[f64], j: usize| if j == 0 { 1.0 } else { r[j - 1] };
    let mut a = vec![vec![0.0; p + 1]; p];
    for (r, &yi) in x.rows().zip(y) {
        for i in 0..p {
            for j in 0..p {
                a[i][j] += aug(r, i) * aug(r, j);
            }
            a[i][p] += aug(r, i) * yi;
        }
    }
    for c in 0..p {
        let piv = (c..p).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, piv);
        let d = a[c][c];
        for v in a[c].iter_mut() {
            *v /= d;
        }
        for r in 0..p {
            if r != c {
                let f = a[r][c];
                let row_c = a[c].clone();
                for (v, w) in a[r].iter_mut().zip(row_c) {
                    *v -= f * w;
                }
            }
        }
    }
    a.iter().map(|row| row[p]).collect()
}

#[test]
fn ols_matches_normal_equations_on_noisy_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let p = rng.random_range(1..5);
        let n = rng.random_range(p + 3..30);
        let x = Matrix::from_vec(n, p, (0..n * p).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let m = fit_ols(&x, &y).unwrap();
        let want = normal_equations(&x, &y);
        assert!(close(m.intercept, want[0], 1e-9));
        for (g, w) in m.coefficients.iter().zip(&want[1..]) {
            assert!(close(*g, *w, 1e-9), "{g} vs {w}");
        }
    }
}
