//! Dense linear algebra for the small systems this crate works with (n <= 8):
//! Gaussian elimination with partial pivoting, matrix inversion, and all
//! complex eigenvalues of a real matrix.
//!
//! Eigenvalues for n <= 3 come from closed-form roots of the characteristic
//! polynomial; larger matrices go through a shifted complex QR iteration on
//! the Hessenberg form.

// row/column index pairs mirror the textbook formulations throughout
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

/// Solves `a · x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when the matrix is numerically singular (a pivot falls at
/// or below `eps · n · max|a_ij|`).
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    assert!(
        a.iter().all(|row| row.len() == n) && b.len() == n,
        "solve requires a square matrix and a matching right-hand side"
    );
    if n == 0 {
        return Some(Vec::new());
    }

    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(*rhs);
            r
        })
        .collect();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let tol = f64::EPSILON * n as f64 * scale;

    for k in 0..n {
        let pivot_row = (k..n)
            .max_by(|&r, &s| m[r][k].abs().total_cmp(&m[s][k].abs()))
            .expect("nonempty pivot range");
        if m[pivot_row][k].abs() <= tol {
            return None;
        }
        m.swap(k, pivot_row);
        for r in (k + 1)..n {
            let factor = m[r][k] / m[k][k];
            if factor == 0.0 {
                continue;
            }
            for c in k..=n {
                let v = m[k][c];
                m[r][c] -= factor * v;
            }
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = m[i][n];
        for j in (i + 1)..n {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    Some(x)
}

/// Inverse of a square matrix, column by column. `None` when singular.
pub fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut inv = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solve(a, &e)?;
        for i in 0..n {
            inv[i][j] = col[i];
        }
    }
    Some(inv)
}

/// All eigenvalues of a real square matrix, sorted by real part then
/// imaginary part.
pub fn eigenvalues(a: &[Vec<f64>]) -> Vec<Complex64> {
    let n = a.len();
    assert!(
        a.iter().all(|row| row.len() == n),
        "eigenvalues requires a square matrix"
    );
    let mut eigs = match n {
        0 => Vec::new(),
        1 => vec![Complex64::new(a[0][0], 0.0)],
        2 => {
            let tr = a[0][0] + a[1][1];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            quadratic_roots(tr, det)
        }
        3 => cubic_eigenvalues(a),
        _ => qr_eigenvalues(a),
    };
    eigs.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    eigs
}

/// Roots of `λ² − tr·λ + det`, complex pair when the discriminant is negative.
fn quadratic_roots(tr: f64, det: f64) -> Vec<Complex64> {
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = if tr >= 0.0 { tr + sq } else { tr - sq };
        if q == 0.0 {
            return vec![Complex64::new(0.0, 0.0); 2];
        }
        let r1 = 0.5 * q;
        let r2 = det / r1;
        vec![Complex64::new(r1, 0.0), Complex64::new(r2, 0.0)]
    } else {
        let re = 0.5 * tr;
        let im = 0.5 * (-disc).sqrt();
        vec![Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn cubic_eigenvalues(m: &[Vec<f64>]) -> Vec<Complex64> {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = (m[0][0] * m[1][1] - m[0][1] * m[1][0])
        + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
        + (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    // characteristic polynomial: λ³ − tr·λ² + minors·λ − det
    cubic_roots(-tr, minors, -det)
        .into_iter()
        .map(|z| polish_root(z, -tr, minors, -det))
        .collect()
}

/// Roots of `t³ + a·t² + b·t + c` with real coefficients.
fn cubic_roots(a: f64, b: f64, c: f64) -> Vec<Complex64> {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;

    let mut roots: Vec<Complex64> = if p == 0.0 && q == 0.0 {
        vec![Complex64::new(0.0, 0.0); 3]
    } else if disc <= 0.0 {
        // three real roots (p < 0 here)
        let rho = (-third_p).sqrt();
        let arg = (half_q / (rho * rho * rho)).clamp(-1.0, 1.0);
        let theta = (-arg).acos();
        (0..3)
            .map(|k| {
                let angle = (theta - 2.0 * std::f64::consts::PI * k as f64) / 3.0;
                Complex64::new(2.0 * rho * angle.cos(), 0.0)
            })
            .collect()
    } else {
        // one real root via Cardano, complex pair from the deflated quadratic
        let sq = disc.sqrt();
        let real = (-half_q + sq).cbrt() + (-half_q - sq).cbrt();
        let mut v = vec![Complex64::new(real, 0.0)];
        v.extend(quadratic_roots(-real, p + real * real));
        v
    };

    for z in &mut roots {
        z.re -= shift;
    }
    roots
}

/// One or two Newton steps on `λ³ + a·λ² + b·λ + c`; conjugate symmetry is
/// preserved because the coefficients are real.
fn polish_root(mut z: Complex64, a: f64, b: f64, c: f64) -> Complex64 {
    for _ in 0..2 {
        let p = ((z + a) * z + b) * z + c;
        let dp = (z * 3.0 + 2.0 * a) * z + b;
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.re.is_finite() || !step.im.is_finite() || step.norm() > 1.0 + z.norm() {
            break;
        }
        z -= step;
    }
    z
}

const QR_MAX_SWEEPS: usize = 40;

/// Shifted complex QR iteration on the Hessenberg form. Working in complex
/// arithmetic lets every deflation be 1x1, conjugate pairs included.
fn qr_eigenvalues(a: &[Vec<f64>]) -> Vec<Complex64> {
    let n = a.len();
    let mut h: Vec<Vec<Complex64>> = a
        .iter()
        .map(|row| row.iter().map(|&v| Complex64::new(v, 0.0)).collect())
        .collect();
    hessenberg(&mut h);
    let hnorm = h
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if hnorm == 0.0 {
        return vec![Complex64::new(0.0, 0.0); n];
    }

    let mut eigs = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    loop {
        while hi > 0 && negligible(&h, hi, hnorm) {
            h[hi][hi - 1] = Complex64::new(0.0, 0.0);
            eigs.push(h[hi][hi]);
            sweeps = 0;
            hi -= 1;
        }
        if hi == 0 {
            eigs.push(h[0][0]);
            break;
        }

        let mut lo = hi;
        while lo > 0 && !negligible(&h, lo, hnorm) {
            lo -= 1;
        }
        if lo > 0 {
            h[lo][lo - 1] = Complex64::new(0.0, 0.0);
        }

        sweeps += 1;
        if sweeps > QR_MAX_SWEEPS {
            // not reachable for the well-scaled Jacobians this crate builds;
            // prefer a degraded answer over an infinite loop
            for i in (0..=hi).rev() {
                eigs.push(h[i][i]);
            }
            break;
        }
        let shift = if sweeps.is_multiple_of(12) {
            h[hi][hi] + Complex64::new(1.5 * h[hi][hi - 1].norm(), 0.0)
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    eigs
}

fn negligible(h: &[Vec<Complex64>], k: usize, hnorm: f64) -> bool {
    let local = h[k - 1][k - 1].norm() + h[k][k].norm();
    let threshold = f64::EPSILON * if local > 0.0 { local } else { hnorm };
    h[k][k - 1].norm() <= threshold
}

/// Eigenvalue of the trailing 2x2 block closest to its bottom-right entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let mean = (a + d) * 0.5;
    let rad = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    let m1 = mean + rad;
    let m2 = mean - rad;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// Unitary 2x2 rotation `G = [[c̄, s̄], [−s, c]]` with `G·[f, g]ᵀ = [r, 0]ᵀ`.
fn givens(f: Complex64, g: Complex64) -> (Complex64, Complex64) {
    let denom = (f.norm_sqr() + g.norm_sqr()).sqrt();
    if denom == 0.0 {
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        (f / denom, g / denom)
    }
}

/// Similarity reduction to upper Hessenberg form with Givens rotations.
fn hessenberg(h: &mut [Vec<Complex64>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    for col in 0..n - 2 {
        for row in col + 2..n {
            if h[row][col].norm() == 0.0 {
                continue;
            }
            let (c, s) = givens(h[col + 1][col], h[row][col]);
            for k in 0..n {
                let x = h[col + 1][k];
                let y = h[row][k];
                h[col + 1][k] = c.conj() * x + s.conj() * y;
                h[row][k] = -s * x + c * y;
            }
            for r in 0..n {
                let x = h[r][col + 1];
                let y = h[r][row];
                h[r][col + 1] = x * c + y * s;
                h[r][row] = -x * s.conj() + y * c.conj();
            }
            h[row][col] = Complex64::new(0.0, 0.0);
        }
    }
}

/// One explicit shifted QR step `H − μI = QR`, `H ← RQ + μI`, confined to the
/// decoupled diagonal block `lo..=hi`.
fn qr_sweep(h: &mut [Vec<Complex64>], lo: usize, hi: usize, shift: Complex64) {
    for i in lo..=hi {
        h[i][i] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let (c, s) = givens(h[i][i], h[i + 1][i]);
        for k in i..=hi {
            let x = h[i][k];
            let y = h[i + 1][k];
            h[i][k] = c.conj() * x + s.conj() * y;
            h[i + 1][k] = -s * x + c * y;
        }
        h[i + 1][i] = Complex64::new(0.0, 0.0);
        rotations.push((c, s));
    }
    for (offset, (c, s)) in rotations.iter().enumerate() {
        let i = lo + offset;
        let last = (i + 1).min(hi);
        for r in lo..=last {
            let x = h[r][i];
            let y = h[r][i + 1];
            h[r][i] = x * *c + y * *s;
            h[r][i + 1] = -x * s.conj() + y * c.conj();
        }
    }
    for i in lo..=hi {
        h[i][i] += shift;
    }
}
