//! Prime tables, the von Mangoldt function and the two prime sums that
//! produce the ½g(0) and 2∫|u|ĝ terms of the explicit formula.

use crate::error::{Error, Result};
use crate::testfns::TestFunctionPair;

#[derive(Debug, Clone, PartialEq)]
pub struct PrimeTable {
    pub limit: u64,
    pub primes: Vec<u64>,
}

impl PrimeTable {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    pub fn up_to(&self, x: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= x);
        &self.primes[..end]
    }
}

/// Sieve of Eratosthenes over odd numbers, one bit per odd integer.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::EmptyDomain(format!("no primes below {limit}")));
    }
    // bit i stands for 2i+1
    let n_odd = (limit as usize).div_ceil(2);
    let mut composite = vec![0u64; n_odd.div_ceil(64)];
    let mut i = 1usize;
    loop {
        let p = 2 * i + 1;
        if p * p > limit as usize {
            break;
        }
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            let mut j = (p * p) / 2;
            while j < n_odd {
                composite[j / 64] |= 1 << (j % 64);
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(estimate_pi(limit));
    primes.push(2);
    for (w, &word) in composite.iter().enumerate() {
        let mut free = !word;
        while free != 0 {
            let b = free.trailing_zeros() as usize;
            free &= free - 1;
            let idx = w * 64 + b;
            if idx == 0 || idx >= n_odd {
                continue;
            }
            primes.push(2 * idx as u64 + 1);
        }
    }
    Ok(PrimeTable { limit, primes })
}

fn estimate_pi(x: u64) -> usize {
    let xf = x as f64;
    if xf < 10.0 {
        4
    } else {
        (1.3 * xf / xf.ln()) as usize
    }
}

/// Smallest prime factor by trial division.
pub fn smallest_factor(m: u64) -> u64 {
    if m % 2 == 0 {
        return 2;
    }
    let mut d = 3;
    while d * d <= m {
        if m % d == 0 {
            return d;
        }
        d += 2;
    }
    m
}

/// Λ(m): log p when m is a power of the prime p, zero otherwise.
pub fn von_mangoldt(m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("von Mangoldt of 0".into()));
    }
    if m == 1 {
        return Ok(0.0);
    }
    let p = smallest_factor(m);
    let mut r = m;
    while r % p == 0 {
        r /= p;
    }
    Ok(if r == 1 { (p as f64).ln() } else { 0.0 })
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A prime sum together with the cutoff that was used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimeSum {
    pub value: f64,
    pub limit: u64,
    /// Smallest cutoff past which every term vanishes.
    pub required_limit: u64,
    pub truncated: bool,
}

/// Smallest integer x with ĝ(a log p / log R) = 0 for all p > x.
pub fn support_limit(support: f64, a: u32, log_r: f64) -> u64 {
    (support * log_r / a as f64).exp().ceil() as u64
}

fn check_args(a: u32, r: f64) -> Result<f64> {
    if a == 0 {
        return Err(Error::Domain("prime power index must be positive".into()));
    }
    if !(r > 1.0) {
        return Err(Error::Domain(format!("R must exceed 1, got {r}")));
    }
    Ok(r.ln())
}

fn prime_sum_with<W: Fn(f64) -> f64>(
    f: &TestFunctionPair,
    a: u32,
    r: f64,
    limit: Option<u64>,
    weight: W,
) -> Result<PrimeSum> {
    let log_r = check_args(a, r)?;
    let required = support_limit(f.support(), a, log_r);
    let limit = limit.unwrap_or(required).max(2);
    let table = sieve_primes(limit.min(required).max(2))?;
    let mut value = 0.0;
    for p in table.iter() {
        let lp = (p as f64).ln();
        let h = f.ghat(a as f64 * lp / log_r);
        if h != 0.0 {
            value += h * weight(lp / log_r) / p as f64;
        }
    }
    Ok(PrimeSum {
        value,
        limit,
        required_limit: required,
        truncated: limit < required,
    })
}

/// Σ_p ĝ(a log p / log R) (log p / log R) / p, which tends to g(0)/(2a).
pub fn prime_sum_linear(
    f: &TestFunctionPair,
    a: u32,
    r: f64,
    limit: Option<u64>,
) -> Result<PrimeSum> {
    prime_sum_with(f, a, r, limit, |x| x)
}

/// Σ_p ĝ(log p / log R) (4 log²p / log²R) / p, which tends to 2∫|u|ĝ(u)du.
pub fn prime_sum_quadratic(f: &TestFunctionPair, r: f64, limit: Option<u64>) -> Result<PrimeSum> {
    prime_sum_with(f, 1, r, limit, |x| 4.0 * x * x)
}

/// Limit of [`prime_sum_linear`] as R grows.
pub fn linear_target(f: &TestFunctionPair, a: u32) -> f64 {
    f.g0() / (2.0 * a as f64)
}

/// Limit of [`prime_sum_quadratic`] as R grows.
pub fn quadratic_target(f: &TestFunctionPair) -> Result<f64> {
    Ok(2.0 * crate::testfns::abs_moment(f)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRow {
    pub r: f64,
    pub linear: f64,
    pub linear_residual: f64,
    pub quadratic: f64,
    pub quadratic_residual: f64,
}

/// Both prime sums and their distance to the limiting values at each R.
pub fn residual_sweep(f: &TestFunctionPair, rs: &[f64]) -> Result<Vec<ResidualRow>> {
    let lt = linear_target(f, 1);
    let qt = quadratic_target(f)?;
    rs.iter()
        .map(|&r| {
            let lin = prime_sum_linear(f, 1, r, None)?.value;
            let quad = prime_sum_quadratic(f, r, None)?.value;
            Ok(ResidualRow {
                r,
                linear: lin,
                linear_residual: (lin - lt).abs(),
                quadratic: quad,
                quadratic_residual: (quad - qt).abs(),
            })
        })
        .collect()
}
