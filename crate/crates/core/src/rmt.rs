//! n-level densities of the classical compact groups: closed-form kernels,
//! Fourier-side predictions, and Haar Monte Carlo estimates.

use crate::eigen::{eigenvalues_complex, eigenvalues_real, Matrix};
use crate::error::{Error, Result};
use crate::testfns::{plancherel_product_at_0, weighted_abs_integral, TestFunctionPair};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymmetryGroup {
    U,
    USp,
    O,
    SOeven,
    SOodd,
}

impl SymmetryGroup {
    pub const ALL: [SymmetryGroup; 5] = [
        SymmetryGroup::U,
        SymmetryGroup::USp,
        SymmetryGroup::O,
        SymmetryGroup::SOeven,
        SymmetryGroup::SOodd,
    ];
    pub const ORTHOGONAL: [SymmetryGroup; 3] =
        [SymmetryGroup::SOeven, SymmetryGroup::O, SymmetryGroup::SOodd];

    pub fn name(self) -> &'static str {
        match self {
            SymmetryGroup::U => "U",
            SymmetryGroup::USp => "USp",
            SymmetryGroup::O => "O",
            SymmetryGroup::SOeven => "SOeven",
            SymmetryGroup::SOodd => "SOodd",
        }
    }

    pub fn is_orthogonal(self) -> bool {
        matches!(self, SymmetryGroup::O | SymmetryGroup::SOeven | SymmetryGroup::SOodd)
    }

    /// Matrix size for size parameter N.
    pub fn dimension(self, n: usize) -> usize {
        match self {
            SymmetryGroup::U => n,
            SymmetryGroup::SOodd => 2 * n + 1,
            _ => 2 * n,
        }
    }

    /// Scale L used to unfold eigenangles, x = θL/2π.
    pub fn unfolding_scale(self, n: usize) -> f64 {
        let d = self.dimension(n) as f64;
        match self {
            SymmetryGroup::U => d,
            SymmetryGroup::USp => d + 1.0,
            SymmetryGroup::SOeven | SymmetryGroup::O | SymmetryGroup::SOodd => d - 1.0,
        }
    }

    /// c(G) in the orthogonal 2-level formula.
    fn two_level_constant(self) -> Option<f64> {
        match self {
            SymmetryGroup::SOeven => Some(0.0),
            SymmetryGroup::O => Some(0.5),
            SymmetryGroup::SOodd => Some(1.0),
            _ => None,
        }
    }
}

impl fmt::Display for SymmetryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SymmetryGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let low = s.to_ascii_lowercase();
        SymmetryGroup::ALL
            .into_iter()
            .find(|g| g.name().to_ascii_lowercase() == low)
            .ok_or_else(|| Error::Domain(format!("unknown group {s:?}")))
    }
}

fn sine_kernel(y: f64) -> f64 {
    if y.abs() < 1e-8 {
        1.0
    } else {
        (PI * y).sin() / (PI * y)
    }
}

fn k_eps(eps: f64, x: f64, y: f64) -> f64 {
    sine_kernel(x - y) + eps * sine_kernel(x + y)
}

/// A density split into an absolutely continuous value and the weight of δ(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub density: f64,
    pub atom: f64,
}

/// Pair density; `atom_x1` is the weight multiplying δ(x₁), and so on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel2Value {
    pub density: f64,
    pub atom_x1: f64,
    pub atom_x2: f64,
}

pub fn kernel_w1(group: SymmetryGroup, x: f64) -> KernelValue {
    let (density, atom) = match group {
        SymmetryGroup::U => (1.0, 0.0),
        SymmetryGroup::USp => (k_eps(-1.0, x, x), 0.0),
        SymmetryGroup::SOeven => (k_eps(1.0, x, x), 0.0),
        SymmetryGroup::SOodd => (k_eps(-1.0, x, x), 1.0),
        SymmetryGroup::O => (0.5 * (k_eps(1.0, x, x) + k_eps(-1.0, x, x)), 0.5),
    };
    KernelValue { density, atom }
}

fn det2(eps: f64, x1: f64, x2: f64) -> f64 {
    k_eps(eps, x1, x1) * k_eps(eps, x2, x2) - k_eps(eps, x1, x2) * k_eps(eps, x2, x1)
}

pub fn kernel_w2(group: SymmetryGroup, x1: f64, x2: f64) -> Kernel2Value {
    let odd = |w: f64| Kernel2Value {
        density: w * det2(-1.0, x1, x2),
        atom_x1: w * k_eps(-1.0, x2, x2),
        atom_x2: w * k_eps(-1.0, x1, x1),
    };
    match group {
        SymmetryGroup::U => Kernel2Value {
            density: det2(0.0, x1, x2),
            atom_x1: 0.0,
            atom_x2: 0.0,
        },
        SymmetryGroup::USp => Kernel2Value {
            density: det2(-1.0, x1, x2),
            atom_x1: 0.0,
            atom_x2: 0.0,
        },
        SymmetryGroup::SOeven => Kernel2Value {
            density: det2(1.0, x1, x2),
            atom_x1: 0.0,
            atom_x2: 0.0,
        },
        SymmetryGroup::SOodd => odd(1.0),
        SymmetryGroup::O => {
            let h = odd(0.5);
            Kernel2Value {
                density: h.density + 0.5 * det2(1.0, x1, x2),
                ..h
            }
        }
    }
}

fn check_support(total: f64) -> Result<()> {
    if total >= 1.0 {
        return Err(Error::Domain(format!(
            "support {total} is not inside (-1, 1)"
        )));
    }
    Ok(())
}

/// ∫ ĝ(u) Ŵ₁(u) du for supp ĝ ⊂ (−1, 1).
pub fn predicted_1level(group: SymmetryGroup, f: &TestFunctionPair) -> Result<f64> {
    check_support(f.support())?;
    let half = 0.5 * f.g0();
    Ok(f.ghat0()
        + match group {
            SymmetryGroup::U => 0.0,
            SymmetryGroup::USp => -half,
            _ => half,
        })
}

/// Orthogonal 2-level density for σ₁ + σ₂ < 1.
pub fn predicted_2level(
    group: SymmetryGroup,
    f1: &TestFunctionPair,
    f2: &TestFunctionPair,
) -> Result<f64> {
    let c = group
        .two_level_constant()
        .ok_or_else(|| Error::Domain(format!("no 2-level formula for {group}")))?;
    check_support(f1.support() + f2.support())?;
    if f1.is_zero() || f2.is_zero() {
        return Ok(0.0);
    }
    let g1 = f1.g0();
    let g2 = f2.g0();
    Ok((f1.ghat0() + 0.5 * g1) * (f2.ghat0() + 0.5 * g2)
        + 2.0 * weighted_abs_integral(f1, f2)?
        - 2.0 * plancherel_product_at_0(f1, f2)?
        - g1 * g2
        + c * g1 * g2)
}

/// Eigenangles of one Haar-random matrix. The first `self_paired` angles are
/// 0 or π; the rest come as (θ, −θ) pairs, except for U where they are
/// unconstrained.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenangleSample {
    pub group: SymmetryGroup,
    pub n: usize,
    pub angles: Vec<f64>,
    pub self_paired: usize,
    pub normalized: Vec<f64>,
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Two passes of modified Gram–Schmidt on the columns; None if a column
/// collapses.
fn orthonormalize<T: Copy>(
    cols: &mut [Vec<T>],
    inner: impl Fn(&[T], &[T]) -> T,
    axpy: impl Fn(&mut [T], &[T], T),
    scale: impl Fn(&mut [T], f64),
    norm: impl Fn(&[T]) -> f64,
) -> Option<()> {
    for j in 0..cols.len() {
        let (done, rest) = cols.split_at_mut(j);
        let v = &mut rest[0];
        let before = norm(v);
        for _ in 0..2 {
            for u in done.iter() {
                let c = inner(u, v);
                axpy(v, u, c);
            }
        }
        let nv = norm(v);
        if !(nv > 1e-6 * before) {
            return None;
        }
        scale(v, 1.0 / nv);
    }
    Some(())
}

fn haar_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix<f64> {
    loop {
        let mut cols: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| normal(rng)).collect()).collect();
        let ok = orthonormalize(
            &mut cols,
            |u, v| u.iter().zip(v).map(|(a, b)| a * b).sum(),
            |v, u, c| v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b),
            |v, s| v.iter_mut().for_each(|a| *a *= s),
            |v| v.iter().map(|a| a * a).sum::<f64>().sqrt(),
        );
        if ok.is_some() {
            return Matrix::from_fn(d, |i, j| cols[j][i]);
        }
    }
}

fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix<Complex64> {
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..d)
            .map(|_| (0..d).map(|_| Complex64::new(normal(rng), normal(rng))).collect())
            .collect();
        let ok = orthonormalize(
            &mut cols,
            |u, v| u.iter().zip(v).map(|(a, b)| a.conj() * b).sum(),
            |v, u, c| v.iter_mut().zip(u).for_each(|(a, b)| *a -= b * c),
            |v, s| v.iter_mut().for_each(|a| *a *= s),
            |v| v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt(),
        );
        if ok.is_some() {
            return Matrix::from_fn(d, |i, j| cols[j][i]);
        }
    }
}

/// Quaternion a + bj with a, b complex.
#[derive(Debug, Clone, Copy, Default)]
struct Quat {
    a: Complex64,
    b: Complex64,
}

impl Quat {
    fn mul(self, o: Quat) -> Quat {
        Quat {
            a: self.a * o.a - self.b * o.b.conj(),
            b: self.a * o.b + self.b * o.a.conj(),
        }
    }
    fn conj(self) -> Quat {
        Quat {
            a: self.a.conj(),
            b: -self.b,
        }
    }
    fn norm_sqr(self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }
}

/// Haar USp(2N) as the image of the compact symplectic group Sp(N) under
/// a + bj ↦ [[a, b], [−b̄, ā]].
fn haar_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<Complex64> {
    loop {
        let mut cols: Vec<Vec<Quat>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| Quat {
                        a: Complex64::new(normal(rng), normal(rng)),
                        b: Complex64::new(normal(rng), normal(rng)),
                    })
                    .collect()
            })
            .collect();
        let ok = orthonormalize(
            &mut cols,
            |u, v| {
                u.iter().zip(v).fold(Quat::default(), |acc, (x, y)| {
                    let p = x.conj().mul(*y);
                    Quat { a: acc.a + p.a, b: acc.b + p.b }
                })
            },
            |v, u, c| {
                v.iter_mut().zip(u).for_each(|(x, y)| {
                    let p = y.mul(c);
                    x.a -= p.a;
                    x.b -= p.b;
                })
            },
            |v, s| {
                v.iter_mut().for_each(|x| {
                    x.a *= s;
                    x.b *= s;
                })
            },
            |v| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt(),
        );
        if ok.is_some() {
            return Matrix::from_fn(2 * n, |i, j| {
                let q = cols[j / 2][i / 2];
                match (i % 2, j % 2) {
                    (0, 0) => q.a,
                    (0, 1) => q.b,
                    (1, 0) => -q.b.conj(),
                    _ => q.a.conj(),
                }
            });
        }
    }
}

fn det_sign(m: &Matrix<f64>) -> f64 {
    let n = m.n;
    let mut a = m.data.clone();
    let mut sign = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i * n + c].abs().partial_cmp(&a[j * n + c].abs()).unwrap())
            .unwrap();
        if a[p * n + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for k in 0..n {
                a.swap(p * n + k, c * n + k);
            }
            sign = -sign;
        }
        if a[c * n + c] < 0.0 {
            sign = -sign;
        }
        for r in c + 1..n {
            let f = a[r * n + c] / a[c * n + c];
            for k in c..n {
                a[r * n + k] -= f * a[c * n + k];
            }
        }
    }
    sign
}

const UNIT_TOL: f64 = 1e-8;

fn check_unit(eigs: &[Complex64]) -> Result<()> {
    for z in eigs {
        if (z.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Eigen(format!("eigenvalue {z} off the unit circle")));
        }
    }
    Ok(())
}

/// Pulls out the eigenvalues pinned at +1 or −1 and lays the rest out as
/// exact ± pairs using the members with positive imaginary part.
fn pair_up(mut eigs: Vec<Complex64>, pinned: &[f64]) -> (Vec<f64>, usize) {
    let mut angles = Vec::with_capacity(eigs.len());
    for &target in pinned {
        let idx = (0..eigs.len())
            .min_by(|&i, &j| {
                (eigs[i] - target).norm().partial_cmp(&(eigs[j] - target).norm()).unwrap()
            })
            .unwrap();
        eigs.swap_remove(idx);
        angles.push(if target > 0.0 { 0.0 } else { PI });
    }
    eigs.sort_by(|x, y| y.im.partial_cmp(&x.im).unwrap());
    let half = eigs.len() / 2;
    for z in &eigs[..half] {
        let t = z.arg().abs();
        angles.push(t);
        angles.push(-t);
    }
    (angles, pinned.len())
}

fn try_sample<R: Rng + ?Sized>(group: SymmetryGroup, n: usize, rng: &mut R) -> Result<EigenangleSample> {
    let d = group.dimension(n);
    let (angles, self_paired) = match group {
        SymmetryGroup::U => {
            let eigs = eigenvalues_complex(&haar_unitary(d, rng))?;
            check_unit(&eigs)?;
            (eigs.iter().map(|z| z.arg()).collect(), 0)
        }
        SymmetryGroup::USp => {
            let eigs = eigenvalues_complex(&haar_symplectic(n, rng))?;
            check_unit(&eigs)?;
            pair_up(eigs, &[])
        }
        _ => {
            let mut q = haar_orthogonal(d, rng);
            if group != SymmetryGroup::O && det_sign(&q) < 0.0 {
                for i in 0..d {
                    q.set(i, 0, -q.get(i, 0));
                }
            }
            let det = if group == SymmetryGroup::O { det_sign(&q) } else { 1.0 };
            let eigs = eigenvalues_real(&q)?;
            check_unit(&eigs)?;
            let pinned: &[f64] = match (group, det > 0.0) {
                (SymmetryGroup::SOodd, _) => &[1.0],
                (SymmetryGroup::O, false) => &[1.0, -1.0],
                _ => &[],
            };
            pair_up(eigs, pinned)
        }
    };
    let scale = group.unfolding_scale(n) / (2.0 * PI);
    let normalized = angles.iter().map(|t| t * scale).collect();
    Ok(EigenangleSample {
        group,
        n,
        angles,
        self_paired,
        normalized,
    })
}

/// Eigenangles of a Haar-random element; resamples on eigensolver failure.
pub fn sample_haar<R: Rng + ?Sized>(group: SymmetryGroup, n: usize, rng: &mut R) -> Result<EigenangleSample> {
    if n == 0 || n > 100 {
        return Err(Error::Domain(format!("size parameter {n} outside 1..=100")));
    }
    let mut last = None;
    for _ in 0..5 {
        match try_sample(group, n, rng) {
            Ok(s) => return Ok(s),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

/// Periodization of x ↦ g(Lθ/2π): (1/L) Σₙ ĝ(n/L) e^{inθ}.
fn periodized(f: &TestFunctionPair, scale: f64, theta: f64) -> f64 {
    let top = (f.support() * scale).floor() as usize;
    let mut s = f.ghat0();
    for m in 1..=top {
        s += 2.0 * f.ghat(m as f64 / scale) * (m as f64 * theta).cos();
    }
    s / scale
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statistic {
    OneLevel(TestFunctionPair),
    TwoLevel(TestFunctionPair, TestFunctionPair),
}

impl Statistic {
    pub fn name(&self) -> &'static str {
        match self {
            Statistic::OneLevel(_) => "one-level",
            Statistic::TwoLevel(..) => "two-level",
        }
    }

    /// Σ_j G(θ_j), or the pair sum over j₁ ≠ ±j₂, with G the periodized
    /// test function.
    pub fn evaluate(&self, s: &EigenangleSample) -> f64 {
        let scale = s.group.unfolding_scale(s.n);
        match self {
            Statistic::OneLevel(f) => s.angles.iter().map(|&t| periodized(f, scale, t)).sum(),
            Statistic::TwoLevel(f1, f2) => {
                let mut s1 = 0.0;
                let mut s2 = 0.0;
                let mut diag = 0.0;
                let mut fixed = 0.0;
                for (j, &t) in s.angles.iter().enumerate() {
                    let a = periodized(f1, scale, t);
                    let b = periodized(f2, scale, t);
                    s1 += a;
                    s2 += b;
                    diag += a * b;
                    if j < s.self_paired {
                        fixed += a * b;
                    }
                }
                if s.group == SymmetryGroup::U {
                    s1 * s2 - diag
                } else {
                    s1 * s2 - 2.0 * diag + fixed
                }
            }
        }
    }
}

/// Monte Carlo mean with its standard error and the per-sample values.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub values: Vec<f64>,
}

impl Estimate {
    pub fn from_values(values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
        } else {
            f64::INFINITY
        };
        Estimate {
            mean,
            stderr: (var / n).sqrt(),
            values,
        }
    }

    /// |mean − target| in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr
    }
}

/// Evaluates every statistic on the same `samples` Haar draws.
pub fn empirical_batch<R: Rng + ?Sized>(
    group: SymmetryGroup,
    n: usize,
    samples: usize,
    stats: &[Statistic],
    rng: &mut R,
) -> Result<Vec<Estimate>> {
    if samples == 0 {
        return Err(Error::EmptyDomain("no samples requested".into()));
    }
    for st in stats {
        match st {
            Statistic::OneLevel(f) => check_support(f.support())?,
            Statistic::TwoLevel(a, b) => check_support(a.support() + b.support())?,
        }
    }
    let mut values = vec![Vec::with_capacity(samples); stats.len()];
    for _ in 0..samples {
        let s = sample_haar(group, n, rng)?;
        for (st, out) in stats.iter().zip(values.iter_mut()) {
            out.push(st.evaluate(&s));
        }
    }
    Ok(values.into_iter().map(Estimate::from_values).collect())
}

pub fn empirical_nlevel<R: Rng + ?Sized>(
    group: SymmetryGroup,
    n: usize,
    samples: usize,
    stat: &Statistic,
    rng: &mut R,
) -> Result<Estimate> {
    Ok(empirical_batch(group, n, samples, std::slice::from_ref(stat), rng)?.remove(0))
}

/// Kolmogorov–Smirnov distance of `data` from Uniform(lo, hi) and its
/// asymptotic p-value.
pub fn ks_uniform(data: &[f64], lo: f64, hi: f64) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::EmptyDomain("no data".into()));
    }
    let mut xs: Vec<f64> = data.iter().map(|x| (x - lo) / (hi - lo)).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max);
    let sn = n.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = 2.0 * (-2.0 * kf * kf * lambda * lambda).exp();
        p += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    Ok((d, p.clamp(0.0, 1.0)))
}
