//! Dense eigenvalues: Householder reduction to upper Hessenberg form
//! followed by shifted QR iteration. Real input uses Francis double
//! shifts so complex eigenvalues come out as exact conjugate pairs;
//! complex input uses single Wilkinson shifts with Givens sweeps.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Copy + Default> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::default(); n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Orthogonal similarity to upper Hessenberg form.
pub fn hessenberg_real(a: &mut Matrix<f64>) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let norm = (k + 1..n).map(|i| a.get(i, k).powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = -sign(norm, a.get(k + 1, k));
        for i in 0..n {
            v[i] = if i > k { a.get(i, k) } else { 0.0 };
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = v[k + 1..].iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        for j in 0..n {
            let s: f64 = (k + 1..n).map(|i| v[i] * a.get(i, j)).sum::<f64>() * beta;
            for i in k + 1..n {
                a.data[i * n + j] -= s * v[i];
            }
        }
        for i in 0..n {
            let s: f64 = (k + 1..n).map(|j| a.get(i, j) * v[j]).sum::<f64>() * beta;
            for j in k + 1..n {
                a.data[i * n + j] -= s * v[j];
            }
        }
        for i in k + 2..n {
            a.set(i, k, 0.0);
        }
    }
}

/// Eigenvalues of a real upper Hessenberg matrix by the Francis
/// double-shift QR algorithm.
#[allow(unused_assignments)]
pub fn hqr(h: &Matrix<f64>) -> Result<Vec<Complex64>> {
    let n = h.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    // 1-based working copy
    let mut a = vec![vec![0.0f64; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = h.get(i, j);
        }
    }
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
    let (mut x, mut y, mut z, mut w);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                y = a[nn - 1][nn - 1];
                w = a[nn][nn - 1] * a[nn - 1][nn];
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn = nn.saturating_sub(2);
                } else {
                    if its == 60 {
                        return Err(Error::Eigen("QR iteration did not converge".into()));
                    }
                    if its % 10 == 0 && its > 0 {
                        t += x;
                        for i in 1..=nn {
                            a[i][i] -= x;
                        }
                        let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    loop {
                        z = a[m][m];
                        r = x - z;
                        let s0 = y - z;
                        p = (r * s0 - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s0;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nn {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k + 1 <= nn {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if k != nn - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nn - 1 {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if k != nn - 1 {
                                    p += z * a[i][k + 2];
                                    a[i][k + 2] -= p * r;
                                }
                                a[i][k + 1] -= p * q;
                                a[i][k] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

/// Eigenvalues of a general real matrix.
pub fn eigenvalues_real(a: &Matrix<f64>) -> Result<Vec<Complex64>> {
    let mut h = a.clone();
    hessenberg_real(&mut h);
    hqr(&h)
}

/// Unitary similarity to upper Hessenberg form.
pub fn hessenberg_complex(a: &mut Matrix<Complex64>) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![zero; n];
    for k in 0..n - 2 {
        let norm = (k + 1..n).map(|i| a.get(i, k).norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a.get(k + 1, k);
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        for i in 0..n {
            v[i] = if i > k { a.get(i, k) } else { zero };
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = v[k + 1..].iter().map(|x| x.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // A ← (I − β v vᴴ) A
        for j in 0..n {
            let s: Complex64 = (k + 1..n).map(|i| v[i].conj() * a.get(i, j)).sum::<Complex64>() * beta;
            for i in k + 1..n {
                a.data[i * n + j] -= s * v[i];
            }
        }
        // A ← A (I − β v vᴴ)
        for i in 0..n {
            let s: Complex64 = (k + 1..n).map(|j| a.get(i, j) * v[j]).sum::<Complex64>() * beta;
            for j in k + 1..n {
                a.data[i * n + j] -= s * v[j].conj();
            }
        }
        for i in k + 2..n {
            a.set(i, k, zero);
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let l1 = tr * 0.5 + disc;
    let l2 = tr * 0.5 - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues of a complex upper Hessenberg matrix by single-shift QR.
pub fn complex_hqr(h: &mut Matrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = h.n;
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; n];
    if n == 0 {
        return Ok(out);
    }
    let mut hi = n - 1;
    let mut its = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            out[0] = h.get(0, 0);
            break;
        }
        let mut l = hi;
        while l > 0 {
            let s = h.get(l - 1, l - 1).norm() + h.get(l, l).norm();
            if h.get(l, l - 1).norm() <= f64::EPSILON * s {
                h.set(l, l - 1, zero);
                break;
            }
            l -= 1;
        }
        if l == hi {
            out[hi] = h.get(hi, hi);
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > 60 * n {
            return Err(Error::Eigen("complex QR iteration did not converge".into()));
        }
        let mu = if its % 11 == 10 {
            h.get(hi, hi) + Complex64::new(h.get(hi, hi - 1).re.abs(), 0.0)
        } else {
            wilkinson_shift(
                h.get(hi - 1, hi - 1),
                h.get(hi - 1, hi),
                h.get(hi, hi - 1),
                h.get(hi, hi),
            )
        };
        let mut x = h.get(l, l) - mu;
        let mut y = h.get(l + 1, l);
        for k in l..hi {
            if k > l {
                x = h.get(k, k - 1);
                y = h.get(k + 1, k - 1);
            }
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            if r == 0.0 {
                continue;
            }
            let (c, s) = if x.norm() == 0.0 {
                (0.0, y.conj() / y.norm())
            } else {
                let ax = x.norm();
                (ax / r, (x / ax) * y.conj() / r)
            };
            let c = Complex64::new(c, 0.0);
            let start = if k > l { k - 1 } else { l };
            for j in start..=hi {
                let u = h.get(k, j);
                let v = h.get(k + 1, j);
                h.set(k, j, c * u + s * v);
                h.set(k + 1, j, -s.conj() * u + c * v);
            }
            let stop = (k + 2).min(hi);
            for i in l..=stop {
                let u = h.get(i, k);
                let v = h.get(i, k + 1);
                h.set(i, k, c * u + s.conj() * v);
                h.set(i, k + 1, -s * u + c * v);
            }
        }
    }
    Ok(out)
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues_complex(a: &Matrix<Complex64>) -> Result<Vec<Complex64>> {
    let mut h = a.clone();
    hessenberg_complex(&mut h);
    complex_hqr(&mut h)
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
pub fn solve(a: &Matrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.n;
    let mut m = a.data.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().partial_cmp(&m[j * n + col].abs()).unwrap())
            .unwrap();
        if m[piv * n + col] == 0.0 {
            return Err(Error::Eigen("singular system".into()));
        }
        if piv != col {
            for j in 0..n {
                m.swap(piv * n + j, col * n + j);
            }
            x.swap(piv, col);
        }
        for i in col + 1..n {
            let f = m[i * n + col] / m[col * n + col];
            if f != 0.0 {
                for j in col..n {
                    m[i * n + j] -= f * m[col * n + j];
                }
                x[i] -= f * x[col];
            }
        }
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i * n + j] * x[j]).sum();
        x[i] = (x[i] - s) / m[i * n + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn triangular_matrix() {
        let a = Matrix::from_fn(4, |i, j| if j >= i { (i + 1) as f64 + j as f64 * 0.5 } else { 0.0 });
        let ev = sorted(eigenvalues_real(&a).unwrap());
        for (k, e) in ev.iter().enumerate() {
            assert!((e.re - (1.0 + 1.5 * k as f64)).abs() < 1e-12);
            assert!(e.im.abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_has_conjugate_pair() {
        let th: f64 = 0.7;
        let a = Matrix {
            n: 3,
            data: vec![th.cos(), -th.sin(), 0.0, th.sin(), th.cos(), 0.0, 0.0, 0.0, 1.0],
        };
        let ev = eigenvalues_real(&a).unwrap();
        let mut ims: Vec<f64> = ev.iter().map(|e| e.im).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(ims[0], -ims[2]);
        assert!((ims[2] - th.sin()).abs() < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^4 - 10x^3 + 35x^2 - 50x + 24 = (x-1)(x-2)(x-3)(x-4)
        let c = [24.0, -50.0, 35.0, -10.0];
        let a = Matrix::from_fn(4, |i, j| {
            if j == 3 {
                -c[i]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        let ev = sorted(eigenvalues_real(&a).unwrap());
        for (k, e) in ev.iter().enumerate() {
            assert!((e.re - (k + 1) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn complex_diagonalizable() {
        let d = [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.1), Complex64::new(0.0, -1.0)];
        let s = Matrix::from_fn(3, |i, j| Complex64::new((i * 3 + j) as f64 * 0.1 + if i == j { 1.0 } else { 0.0 }, (i as f64 - j as f64) * 0.2));
        let sinv = {
            // invert by solving column by column in real 6×6 form
            let mut inv = Matrix::<Complex64>::zeros(3);
            for col in 0..3 {
                let big = Matrix::from_fn(6, |i, j| {
                    let z = s.get(i % 3, j % 3);
                    match (i / 3, j / 3) {
                        (0, 0) | (1, 1) => z.re,
                        (0, 1) => -z.im,
                        _ => z.im,
                    }
                });
                let mut rhs = vec![0.0; 6];
                rhs[col] = 1.0;
                let x = solve(&big, &rhs).unwrap();
                for i in 0..3 {
                    inv.set(i, col, Complex64::new(x[i], x[i + 3]));
                }
            }
            inv
        };
        let a = Matrix::from_fn(3, |i, j| (0..3).map(|k| s.get(i, k) * d[k] * sinv.get(k, j)).sum());
        let ev = sorted(eigenvalues_complex(&a).unwrap());
        let want = sorted(d.to_vec());
        for (e, w) in ev.iter().zip(&want) {
            assert!((e - w).norm() < 1e-12, "{e} vs {w}");
        }
    }

    proptest! {
        #[test]
        fn trace_and_determinant_preserved(vals in proptest::collection::vec(-3.0f64..3.0, 25)) {
            let a = Matrix { n: 5, data: vals };
            let ev = eigenvalues_real(&a).unwrap();
            let tr: f64 = (0..5).map(|i| a.get(i, i)).sum();
            let sum: Complex64 = ev.iter().sum();
            prop_assert!((sum.re - tr).abs() < 1e-9 * (1.0 + tr.abs()));
            prop_assert!(sum.im.abs() < 1e-9);
            let ac = Matrix { n: 5, data: a.data.iter().map(|&x| Complex64::new(x, 0.0)).collect() };
            let evc = eigenvalues_complex(&ac).unwrap();
            let sumc: Complex64 = evc.iter().sum();
            prop_assert!((sumc.re - tr).abs() < 1e-9 * (1.0 + tr.abs()));
        }
    }
}
