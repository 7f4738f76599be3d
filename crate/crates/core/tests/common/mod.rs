//! Shared helpers for the integration suites: an eigensolver oracle that is
//! independent of the library's linear-algebra backend, a least-squares fit,
//! and the acceptance-line printer.

#![allow(dead_code)]
// classical sweep algorithms read clearest with index loops
#![allow(clippy::needless_range_loop)]

/// Cyclic-sweep Jacobi eigensolver for small dense symmetric matrices.
///
/// Deliberately hand-rolled so frozen expected values do not depend on the
/// backend used by the implementation under test. Returns eigenvalues sorted
/// ascending.
pub fn jacobi_eigenvalues(matrix: &[Vec<f64>]) -> Vec<f64> {
    let n = matrix.len();
    let mut m: Vec<Vec<f64>> = matrix.to_vec();
    for _ in 0..300 {
        let mut off = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[i][j] * m[i][j];
                }
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eigenvalues: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eigenvalues.sort_by(f64::total_cmp);
    eigenvalues
}

/// Dense symmetric matrix of a dot-chain spec, assembled independently of
/// the library (plain nested vectors, direct transcription).
pub fn dense_hamiltonian(gamma: f64, gamma_c: f64, epsilons: &[f64]) -> Vec<Vec<f64>> {
    let n = epsilons.len();
    let d = n + 1;
    let mut m = vec![vec![0.0; d]; d];
    m[0][1] = -gamma;
    m[1][0] = -gamma;
    for (l, &e) in epsilons.iter().enumerate() {
        m[l + 1][l + 1] = e;
    }
    for l in 1..n {
        m[l][l + 1] = -gamma_c;
        m[l + 1][l] = -gamma_c;
    }
    m
}

pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Fit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let e = y - (slope * x + intercept);
        ss_res += e * e;
    }
    Fit {
        slope,
        intercept,
        r_squared: 1.0 - ss_res / syy,
    }
}

/// Run one acceptance criterion, print its pass/fail line, and propagate any
/// failure to the harness.
pub fn criterion<F>(number: u32, name: &str, body: F)
where
    F: FnOnce() + std::panic::UnwindSafe,
{
    let outcome = std::panic::catch_unwind(body);
    match outcome {
        Ok(()) => println!("acceptance criterion {number:2} ({name}): PASS"),
        Err(payload) => {
            println!("acceptance criterion {number:2} ({name}): FAIL");
            std::panic::resume_unwind(payload);
        }
    }
}
