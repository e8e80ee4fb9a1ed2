//! Level-1 holomorphic cusp forms: the Miller echelon basis built from
//! E4, E6 and Δ, exact Hecke matrices, and normalized Hecke eigenforms
//! with symmetric-square L-values and harmonic weights.

use crate::eigen::{eigenvalues_real, solve, Matrix};
use crate::error::{Error, Result};
use crate::modular::{moduli, moduli_for_bits, mul_trunc, Crt, Modulus};
use crate::primes::{is_prime, sieve_primes};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::collections::HashMap;
use std::io::{BufRead, Write};

pub const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

const SEPARATION: f64 = 1e-8;
const RESIDUAL: f64 = 1e-10;

/// Dimension of the space of level-1 cusp forms of weight k.
pub fn dim_sk(k: u32) -> Result<usize> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::Domain(format!("weight {k} must be even and at least 4")));
    }
    let base = (k / 12) as usize;
    Ok(if k % 12 == 2 { base - 1 } else { base })
}

/// Cusp forms of weight `weight`, known to precision q^n_max.
#[derive(Debug, Clone)]
pub struct CuspSpace {
    pub weight: u32,
    pub n_max: usize,
    /// `basis[i]` is q^{i+1} + O(q^{d+1}), coefficients indexed by n = 0..=n_max.
    pub basis: Vec<Vec<BigInt>>,
}

impl CuspSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Matrix of T_p in the echelon basis: column i holds the first d
    /// coefficients of T_p b_i.
    pub fn hecke_matrix(&self, p: u64) -> Result<Vec<Vec<BigInt>>> {
        if !is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        let d = self.dimension();
        if (p as usize) * d > self.n_max {
            return Err(Error::Precision(format!(
                "T_{p} needs coefficients to {} but the space stops at {}",
                p as usize * d,
                self.n_max
            )));
        }
        let pk = BigInt::from(p).pow(self.weight - 1);
        let p = p as usize;
        let mut m = vec![vec![BigInt::zero(); d]; d];
        for (i, b) in self.basis.iter().enumerate() {
            for j in 1..=d {
                let mut v = b[j * p].clone();
                if j % p == 0 {
                    v += &pk * &b[j / p];
                }
                m[j - 1][i] = v;
            }
        }
        Ok(m)
    }
}

fn divisor_power_sums(n: usize, e: u32) -> Vec<u128> {
    let mut s = vec![0u128; n + 1];
    for d in 1..=n {
        let dp = (d as u128).pow(e);
        let mut m = d;
        while m <= n {
            s[m] += dp;
            m += d;
        }
    }
    s
}

/// Exponents (j, a, e) with Δ^j E4^a E6^e spanning weight k, j = 1..=d.
fn miller_exponents(k: u32) -> Result<Vec<(u32, u32, u32)>> {
    let d = dim_sk(k)?;
    (1..=d as u32)
        .map(|j| {
            let w = k - 12 * j;
            match w % 4 {
                0 => Ok((j, w / 4, 0)),
                2 if w >= 6 => Ok((j, (w - 6) / 4, 1)),
                _ => Err(Error::Domain(format!("no monomial of weight {w}"))),
            }
        })
        .collect()
}

fn coefficient_bits(j: u32, a: u32, e: u32, n: usize) -> f64 {
    let l = (n as f64 + 1.0).log2();
    let ln = (n.max(2) as f64).log2();
    let factors = j + a + e;
    factors.saturating_sub(1) as f64 * l
        + j as f64 * (1.0 + 6.0 * ln)
        + a as f64 * ((240.0f64 * 1.2021).log2() + 3.0 * ln)
        + e as f64 * ((504.0f64 * 1.0370).log2() + 5.0 * ln)
}

struct ModCache<'a> {
    m: &'a Modulus,
    n: usize,
    delta: Vec<Vec<u64>>,
    e4: Vec<Vec<u64>>,
    e6: Vec<u64>,
}

impl<'a> ModCache<'a> {
    fn new(m: &'a Modulus, n: usize, s3: &[u128], s5: &[u128]) -> Self {
        let p = m.p as u128;
        let len = n + 1;
        let mut e4 = vec![0u64; len];
        let mut e6 = vec![0u64; len];
        e4[0] = 1;
        e6[0] = 1;
        for i in 1..len {
            e4[i] = ((240 % p) * (s3[i] % p) % p) as u64;
            e6[i] = m.neg(((504 % p) * (s5[i] % p) % p) as u64);
        }
        // Δ = q · (Σ (−1)^m (2m+1) q^{m(m+1)/2})^8
        let mut jac = vec![0u64; len];
        let mut t = 0usize;
        let mut r = 0u64;
        while t < len {
            let c = (2 * r + 1) % m.p;
            jac[t] = if r % 2 == 0 { c } else { m.neg(c) };
            r += 1;
            t = (r * (r + 1) / 2) as usize;
        }
        let j2 = mul_trunc(&jac, &jac, len, m);
        let j4 = mul_trunc(&j2, &j2, len, m);
        let j8 = mul_trunc(&j4, &j4, len, m);
        let mut delta = vec![0u64; len];
        delta[1..].copy_from_slice(&j8[..len - 1]);
        let one = {
            let mut v = vec![0u64; len];
            v[0] = 1;
            v
        };
        Self {
            m,
            n,
            delta: vec![one.clone(), delta],
            e4: vec![one, e4],
            e6,
        }
    }

    fn delta_pow(&mut self, j: usize) -> &[u64] {
        while self.delta.len() <= j {
            let next = mul_trunc(self.delta.last().unwrap(), &self.delta[1], self.n + 1, self.m);
            self.delta.push(next);
        }
        &self.delta[j]
    }

    fn e4_pow(&mut self, a: usize) -> &[u64] {
        while self.e4.len() <= a {
            let next = mul_trunc(self.e4.last().unwrap(), &self.e4[1], self.n + 1, self.m);
            self.e4.push(next);
        }
        &self.e4[a]
    }

    fn monomial(&mut self, j: u32, a: u32, e: u32) -> Vec<u64> {
        let len = self.n + 1;
        let dj = self.delta_pow(j as usize).to_vec();
        let mut out = if a > 0 {
            let ea = self.e4_pow(a as usize).to_vec();
            mul_trunc(&dj, &ea, len, self.m)
        } else {
            dj
        };
        if e > 0 {
            out = mul_trunc(&out, &self.e6, len, self.m);
        }
        out
    }
}

fn echelonize(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let d = rows.len();
    for i in (0..d).rev() {
        for j in i + 1..d {
            let c = rows[i][j + 1].clone();
            if c.is_zero() {
                continue;
            }
            let (lo, hi) = rows.split_at_mut(j);
            for (x, y) in lo[i].iter_mut().zip(&hi[0]) {
                if !y.is_zero() {
                    *x -= &c * y;
                }
            }
        }
    }
    rows
}

/// Builds several weights at once, sharing the Eisenstein and Δ powers.
pub fn build_spaces(weights: &[u32], n_max: usize) -> Result<Vec<CuspSpace>> {
    if n_max < 2 {
        return Err(Error::Domain("need at least two coefficients".into()));
    }
    let exps: Vec<Vec<(u32, u32, u32)>> = weights
        .iter()
        .map(|&k| {
            if k < 12 && dim_sk(k)? == 0 {
                return Ok(Vec::new());
            }
            miller_exponents(k)
        })
        .collect::<Result<_>>()?;
    let counts: Vec<usize> = exps
        .iter()
        .map(|es| {
            es.iter()
                .map(|&(j, a, e)| moduli_for_bits(coefficient_bits(j, a, e, n_max)))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let needed = counts.iter().copied().max().unwrap_or(0);
    let s3 = divisor_power_sums(n_max, 3);
    let s5 = divisor_power_sums(n_max, 5);
    // residues[w][b][n][modulus]
    let mut residues: Vec<Vec<Vec<Vec<u64>>>> = exps
        .iter()
        .map(|es| vec![vec![Vec::new(); n_max + 1]; es.len()])
        .collect();
    for (mi, m) in moduli()[..needed].iter().enumerate() {
        let mut cache = ModCache::new(m, n_max, &s3, &s5);
        for (w, es) in exps.iter().enumerate() {
            if mi >= counts[w] {
                continue;
            }
            for (b, &(j, a, e)) in es.iter().enumerate() {
                let series = cache.monomial(j, a, e);
                for (n, r) in series.into_iter().enumerate() {
                    residues[w][b][n].push(r);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(weights.len());
    for (w, &k) in weights.iter().enumerate() {
        let crt = Crt::new(counts[w].max(1));
        let rows: Vec<Vec<BigInt>> = residues[w]
            .iter()
            .map(|series| series.iter().map(|r| crt.reconstruct(r)).collect())
            .collect();
        out.push(CuspSpace {
            weight: k,
            n_max,
            basis: echelonize(rows),
        });
    }
    Ok(out)
}

pub fn build_space(k: u32, n_max: usize) -> Result<CuspSpace> {
    Ok(build_spaces(&[k], n_max)?.remove(0))
}

/// x · 2^(−log2_den) without overflowing f64 on the way.
fn scaled(x: &BigInt, log2_den: f64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let top = (x >> shift).to_f64().unwrap();
    top * (shift as f64 - log2_den).exp2()
}

/// Symmetric-square L-value at 1 from a truncated Euler product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymSquareL {
    pub value: f64,
    pub cutoff: u64,
    /// |log L(P) − log L(P/10)|
    pub drift: f64,
}

#[derive(Debug, Clone)]
pub struct HeckeEigenform {
    pub weight: u32,
    /// λ_f(n) for n = 0..=n_max, with λ_f(0) unused and set to 0.
    pub lambda: Vec<f64>,
    pub l1_sym2: SymSquareL,
    pub harmonic_weight: f64,
}

impl HeckeEigenform {
    pub fn n_max(&self) -> usize {
        self.lambda.len() - 1
    }

    pub fn lambda_at(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("λ(0) is undefined".into()));
        }
        self.lambda
            .get(n as usize)
            .copied()
            .ok_or_else(|| Error::Precision(format!("λ({n}) beyond stored range {}", self.n_max())))
    }
}

/// Normalized eigenforms, λ tables truncated at `n_max`.
pub fn eigenforms(space: &CuspSpace, n_max: usize) -> Result<Vec<HeckeEigenform>> {
    let d = space.dimension();
    let n_max = n_max.min(space.n_max);
    let k = space.weight;
    let half = (k as f64 - 1.0) / 2.0;
    let log2n: Vec<f64> = (0..=n_max).map(|n| half * (n.max(1) as f64).log2()).collect();
    if d == 0 {
        return Ok(Vec::new());
    }
    let vectors: Vec<Vec<f64>> = if d == 1 {
        vec![vec![1.0]]
    } else {
        let t2 = space.hecke_matrix(2)?;
        let m = Matrix::from_fn(d, |j, i| scaled(&t2[j][i], log2n[j + 1] - log2n[i + 1] + half));
        let mut ev: Vec<f64> = Vec::with_capacity(d);
        for z in eigenvalues_real(&m)? {
            if z.im.abs() > 1e-9 {
                return Err(Error::Eigen(format!("T_2 eigenvalue {z} is not real")));
            }
            ev.push(z.re);
        }
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in ev.windows(2) {
            if w[1] - w[0] < SEPARATION {
                return Err(Error::Eigen(format!("T_2 eigenvalues {} and {} are not separated", w[0], w[1])));
            }
        }
        ev.iter()
            .map(|&mu| {
                let sub = Matrix::from_fn(d - 1, |r, c| m.get(r + 1, c + 1) - if r == c { mu } else { 0.0 });
                let rhs: Vec<f64> = (1..d).map(|r| -m.get(r, 0)).collect();
                let tail = solve(&sub, &rhs)?;
                let mut y = vec![1.0];
                y.extend(tail);
                let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                let res = (0..d)
                    .map(|r| {
                        let mv: f64 = (0..d).map(|c| m.get(r, c) * y[c]).sum();
                        (mv - mu * y[r]).powi(2)
                    })
                    .sum::<f64>()
                    .sqrt();
                if res > RESIDUAL * norm {
                    return Err(Error::Precision(format!("eigenvector residual {res:e} at eigenvalue {mu}")));
                }
                Ok(y)
            })
            .collect::<Result<_>>()?
    };
    let mut out = Vec::with_capacity(d);
    for y in vectors {
        let mut lambda = vec![0.0; n_max + 1];
        for (n, slot) in lambda.iter_mut().enumerate().skip(1) {
            *slot = (0..d)
                .map(|i| y[i] * scaled(&space.basis[i][n], log2n[n] - log2n[i + 1]))
                .sum();
        }
        let mut f = HeckeEigenform {
            weight: k,
            lambda,
            l1_sym2: SymSquareL {
                value: f64::NAN,
                cutoff: 0,
                drift: f64::NAN,
            },
            harmonic_weight: f64::NAN,
        };
        let l = sym2_l_at_1(&f, n_max as u64)?;
        f.l1_sym2 = l;
        f.harmonic_weight = ZETA2 / l.value;
        out.push(f);
    }
    Ok(out)
}

/// Exact λ_f(n) = a_f(n)/n^{(k−1)/2} for a one-dimensional space, as the
/// pair (a_f(n), n) so callers can form the ratio at any precision.
pub fn exact_coefficient(space: &CuspSpace, n: usize) -> Result<BigInt> {
    if space.dimension() != 1 {
        return Err(Error::Domain("exact coefficients need a one-dimensional space".into()));
    }
    space.basis[0]
        .get(n)
        .cloned()
        .ok_or_else(|| Error::Precision(format!("a({n}) beyond stored range")))
}

fn sym2_log_product(f: &HeckeEigenform, ps: &[u64]) -> Result<f64> {
    let mut s = 0.0;
    for &p in ps {
        let l = f.lambda_at(p)?;
        let x = 1.0 / p as f64;
        s -= (1.0 - x).ln() + (1.0 - (l * l - 2.0) * x + x * x).ln();
    }
    Ok(s)
}

/// ∏_{p≤P} [(1−α²/p)(1−1/p)(1−α⁻²/p)]⁻¹.
pub fn sym2_l_at_1(f: &HeckeEigenform, p_max: u64) -> Result<SymSquareL> {
    if p_max < 100 {
        return Err(Error::Domain(format!("Euler cutoff {p_max} below 100")));
    }
    let table = sieve_primes(p_max)?;
    let all = table.up_to(p_max);
    let head = table.up_to(p_max / 10);
    let full = sym2_log_product(f, all)?;
    let part = sym2_log_product(f, head)?;
    Ok(SymSquareL {
        value: full.exp(),
        cutoff: p_max,
        drift: (full - part).abs(),
    })
}

/// ζ(2) Σ_{n≤N} λ_f(n²)/n, which converges (slowly) to L(1, sym²f).
pub fn sym2_dirichlet_partial(f: &HeckeEigenform, n: u64) -> Result<f64> {
    let mut s = 0.0;
    for m in 1..=n {
        s += f.lambda_at(m * m)? / m as f64;
    }
    Ok(ZETA2 * s)
}

fn divisors_of_gcd(m: u64, n: u64) -> impl Iterator<Item = u64> {
    let g = m.gcd(&n);
    (1..=g).filter(move |d| g % d == 0)
}

/// Largest violation of λ(m)λ(n) = Σ_{d|(m,n)} λ(mn/d²) over m, n ≤ M, mn ≤ N_max.
pub fn multiplicativity_residual(f: &HeckeEigenform, m_max: u64) -> Result<f64> {
    if m_max as usize > f.n_max() {
        return Err(Error::Precision(format!("λ needed up to {m_max}, stored to {}", f.n_max())));
    }
    let mut worst = 0.0f64;
    for m in 1..=m_max {
        for n in m..=m_max {
            if (m * n) as usize > f.n_max() {
                break;
            }
            let lhs = f.lambda_at(m)? * f.lambda_at(n)?;
            let mut rhs = 0.0;
            for d in divisors_of_gcd(m, n) {
                rhs += f.lambda_at(m * n / (d * d))?;
            }
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

pub fn check_multiplicativity(f: &HeckeEigenform, m_max: u64) -> Result<bool> {
    Ok(multiplicativity_residual(f, m_max)? <= RESIDUAL)
}

/// (ζ(2)/|H_k|) Σ_f λ_f(m)λ_f(n)/L(1, sym²f).
pub fn petersson_delta(forms: &[HeckeEigenform], m: u64, n: u64) -> Result<f64> {
    if forms.is_empty() {
        return Err(Error::EmptyDomain("no eigenforms".into()));
    }
    let mut s = 0.0;
    for f in forms {
        s += f.lambda_at(m)? * f.lambda_at(n)? * f.harmonic_weight;
    }
    Ok(s / forms.len() as f64)
}

/// Writes λ_f(p) for primes p ≤ `p_max`, one block per form.
pub fn write_cache<W: Write>(forms: &[HeckeEigenform], p_max: u64, out: &mut W) -> Result<()> {
    for (i, f) in forms.iter().enumerate() {
        writeln!(out, "weight {} dimension {} form-index {}", f.weight, forms.len(), i)?;
        for p in sieve_primes(p_max.max(2))?.iter() {
            writeln!(out, "{} {} {:.15e}", f.weight, p, f.lambda_at(p)?)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CachedForm {
    pub weight: u32,
    pub dimension: usize,
    pub index: usize,
    pub lambda_p: Vec<(u64, f64)>,
}

pub fn read_cache<R: BufRead>(input: R) -> Result<Vec<CachedForm>> {
    let mut out: Vec<CachedForm> = Vec::new();
    for (no, line) in input.lines().enumerate() {
        let line = line?;
        let bad = |msg: &str| Error::Parse {
            line: no + 1,
            msg: msg.to_string(),
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["weight", k, "dimension", d, "form-index", i] => out.push(CachedForm {
                weight: k.parse().map_err(|_| bad("weight"))?,
                dimension: d.parse().map_err(|_| bad("dimension"))?,
                index: i.parse().map_err(|_| bad("form index"))?,
                lambda_p: Vec::new(),
            }),
            [k, p, l] => {
                let cur = out.last_mut().ok_or_else(|| bad("data before header"))?;
                let k: u32 = k.parse().map_err(|_| bad("weight"))?;
                if k != cur.weight {
                    return Err(bad("weight does not match header"));
                }
                cur.lambda_p.push((
                    p.parse().map_err(|_| bad("prime"))?,
                    l.parse().map_err(|_| bad("eigenvalue"))?,
                ));
            }
            _ => return Err(bad("unrecognized line")),
        }
    }
    Ok(out)
}

/// Exact product of two square BigInt matrices.
pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigInt::zero(), |acc, l| acc + &a[i][l] * &b[l][j]))
                .collect()
        })
        .collect()
}

/// Trace of an exact matrix.
pub fn trace(a: &[Vec<BigInt>]) -> BigInt {
    (0..a.len()).fold(BigInt::zero(), |acc, i| acc + &a[i][i])
}

/// Every weight in [lo, hi] with a nonzero cusp space, built together.
pub fn spaces_in_range(lo: u32, hi: u32, n_max: usize) -> Result<HashMap<u32, CuspSpace>> {
    let ks: Vec<u32> = (lo..=hi)
        .filter(|k| k % 2 == 0 && *k >= 12 && dim_sk(*k).map(|d| d > 0).unwrap_or(false))
        .collect();
    Ok(ks.iter().copied().zip(build_spaces(&ks, n_max)?).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tau_oracle(n_max: usize) -> Vec<i128> {
        // q ∏ (1 − q^n)^24 by repeated multiplication
        let mut s = vec![0i128; n_max + 1];
        s[0] = 1;
        for n in 1..=n_max {
            for _ in 0..24 {
                for i in (n..=n_max).rev() {
                    s[i] -= s[i - n];
                }
            }
        }
        let mut tau = vec![0i128; n_max + 1];
        tau[1..].copy_from_slice(&s[..n_max]);
        tau
    }

    #[test]
    fn dimensions() {
        assert_eq!(dim_sk(12).unwrap(), 1);
        assert_eq!(dim_sk(26).unwrap(), 1);
        assert_eq!(dim_sk(24).unwrap(), 2);
        assert_eq!(dim_sk(14).unwrap(), 0);
        assert_eq!(dim_sk(60).unwrap(), 5);
        assert!(dim_sk(13).is_err());
        assert!(dim_sk(2).is_err());
    }

    #[test]
    fn dimension_matches_generating_function() {
        // Σ dim M_k x^k = 1/((1−x^4)(1−x^6)), dim S_k = dim M_k − 1
        for k in (4..=120u32).step_by(2) {
            let mut count = 0;
            for a in 0..=k / 4 {
                if (k - 4 * a) % 6 == 0 {
                    count += 1;
                }
            }
            assert_eq!(dim_sk(k).unwrap(), count - 1, "k = {k}");
        }
    }

    #[test]
    fn discriminant_expansion() {
        let s = build_space(12, 200).unwrap();
        let tau = tau_oracle(200);
        for n in 0..=200 {
            assert_eq!(s.basis[0][n], BigInt::from(tau[n]), "n = {n}");
        }
        assert_eq!(s.hecke_matrix(2).unwrap(), vec![vec![BigInt::from(-24)]]);
    }

    #[test]
    fn weight_24_trace() {
        let s = build_space(24, 100).unwrap();
        assert_eq!(trace(&s.hecke_matrix(2).unwrap()), BigInt::from(1080));
        let forms = eigenforms(&s, 100).unwrap();
        let sum: f64 = forms.iter().map(|f| f.lambda[2]).sum::<f64>() * 2f64.powf(11.5);
        assert!((sum - 1080.0).abs() < 1e-6);
    }

    #[test]
    fn hecke_matrices_commute() {
        for k in [24u32, 36, 48, 60] {
            let s = build_space(k, 250).unwrap();
            let ps = [2u64, 3, 5, 7, 11, 13, 47];
            let ms: Vec<_> = ps.iter().map(|&p| s.hecke_matrix(p).unwrap()).collect();
            for a in &ms {
                for b in &ms {
                    assert_eq!(mat_mul(a, b), mat_mul(b, a));
                }
            }
        }
    }

    #[test]
    fn ramanujan_tau_normalized() {
        let s = build_space(12, 500).unwrap();
        let f = &eigenforms(&s, 500).unwrap()[0];
        assert!((f.lambda[2] + 24.0 / 2f64.powf(5.5)).abs() < 1e-15);
        assert!((f.lambda[2] + 0.530330).abs() < 1e-6);
        let tau = tau_oracle(500);
        for n in 1..=500 {
            let want = tau[n] as f64 / (n as f64).powf(5.5);
            assert!((f.lambda[n] - want).abs() < 1e-12, "n = {n}");
        }
        assert!(check_multiplicativity(f, 22).unwrap());
    }

    #[test]
    fn precision_error_when_short() {
        let s = build_space(36, 40).unwrap();
        assert!(matches!(s.hecke_matrix(37), Err(Error::Precision(_))));
    }

    #[test]
    fn eigenform_invariants() {
        let spaces = spaces_in_range(24, 40, 600).unwrap();
        for s in spaces.values() {
            for f in eigenforms(s, 600).unwrap() {
                assert_eq!(f.lambda[1], 1.0);
                assert!((f.lambda[2].powi(2) - f.lambda[4] - 1.0).abs() < 1e-10);
                for p in sieve_primes(600).unwrap().iter() {
                    assert!(f.lambda[p as usize].abs() <= 2.0 + 1e-9);
                }
                assert!(f.l1_sym2.value > 0.0);
                assert!(multiplicativity_residual(&f, 24).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn corrupted_table_fails() {
        let s = build_space(12, 200).unwrap();
        let mut f = eigenforms(&s, 200).unwrap().remove(0);
        assert!(check_multiplicativity(&f, 14).unwrap());
        f.lambda[6] += 1e-3;
        assert!(!check_multiplicativity(&f, 14).unwrap());
    }

    #[test]
    fn euler_product_and_dirichlet_series_agree() {
        let s = build_space(12, 40000).unwrap();
        let f = eigenforms(&s, 40000).unwrap().remove(0);
        let l = f.l1_sym2;
        let partial = sym2_dirichlet_partial(&f, 200).unwrap();
        assert!((l.value - partial).abs() < 0.05, "{} vs {partial}", l.value);
        assert!(l.drift < 0.02);
        assert!(sym2_l_at_1(&f, 50).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let s = build_space(24, 200).unwrap();
        let forms = eigenforms(&s, 200).unwrap();
        let mut buf = Vec::new();
        write_cache(&forms, 50, &mut buf).unwrap();
        let back = read_cache(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        for (c, f) in back.iter().zip(&forms) {
            assert_eq!(c.weight, 24);
            assert_eq!(c.lambda_p.len(), 15);
            for &(p, l) in &c.lambda_p {
                assert!((l - f.lambda[p as usize]).abs() < 1e-14);
            }
        }
        assert!(read_cache("24 2 0.5\n".as_bytes()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn coprime_products(m in 1u64..60, n in 1u64..60) {
            let s = build_space(12, 3600).unwrap();
            let f = &eigenforms(&s, 3600).unwrap()[0];
            if m.gcd(&n) == 1 {
                let lhs = f.lambda[m as usize] * f.lambda[n as usize];
                prop_assert!((lhs - f.lambda[(m * n) as usize]).abs() < 1e-11);
            }
        }
    }
}
