//! Word-sized prime moduli, number-theoretic transforms and Chinese
//! remaindering, used to multiply integer power series exactly.

use crate::primes::is_prime;
use num_bigint::{BigInt, BigUint, Sign};
use std::sync::OnceLock;

/// Transform lengths up to 2^LOG_MAX are supported.
pub const LOG_MAX: u32 = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modulus {
    pub p: u64,
    root: u64,
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Modulus {
    fn new(p: u64) -> Self {
        let fs = prime_factors(p - 1);
        let g = (2..p)
            .find(|&g| fs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
            .expect("prime has a primitive root");
        Self { p, root: g }
    }

    pub fn reduce_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.p as i128) as u64
    }

    pub fn neg(&self, x: u64) -> u64 {
        if x == 0 {
            0
        } else {
            self.p - x
        }
    }

    pub fn inv(&self, x: u64) -> u64 {
        inv_mod(x, self.p)
    }
}

/// Primes p < 2^31 with 2^LOG_MAX | p − 1, largest first.
pub fn moduli() -> &'static [Modulus] {
    static CELL: OnceLock<Vec<Modulus>> = OnceLock::new();
    CELL.get_or_init(|| {
        let step = 1u64 << LOG_MAX;
        let mut c = ((1u64 << 31) - 1) / step;
        let mut out = Vec::new();
        while c > 0 {
            let p = c * step + 1;
            if is_prime(p) {
                out.push(Modulus::new(p));
            }
            c -= 1;
        }
        out
    })
}

/// How many moduli are needed to recover integers of absolute value below 2^bits.
pub fn moduli_for_bits(bits: f64) -> usize {
    let mut acc = 0.0;
    for (i, m) in moduli().iter().enumerate() {
        acc += (m.p as f64).log2();
        if acc > bits + 2.0 {
            return i + 1;
        }
    }
    panic!("coefficient bound of {bits} bits exceeds the modulus table")
}

fn ntt(a: &mut [u64], invert: bool, m: &Modulus) {
    let n = a.len();
    let p = m.p;
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(m.root, (p - 1) / len as u64, p);
        if invert {
            w = inv_mod(w, p);
        }
        let half = len / 2;
        let mut tw = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            tw.push(cur);
            cur = cur * w % p;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let u = lo[k];
                let v = hi[k] * tw[k] % p;
                lo[k] = if u + v >= p { u + v - p } else { u + v };
                hi[k] = if u >= v { u - v } else { u + p - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let ninv = inv_mod(n as u64, p);
        for x in a.iter_mut() {
            *x = *x * ninv % p;
        }
    }
}

/// First `n` coefficients of the product of two series modulo m.
pub fn mul_trunc(a: &[u64], b: &[u64], n: usize, m: &Modulus) -> Vec<u64> {
    let a = &a[..a.len().min(n)];
    let b = &b[..b.len().min(n)];
    if a.is_empty() || b.is_empty() {
        return vec![0; n];
    }
    if a.len().min(b.len()) <= 32 {
        let mut out = vec![0u64; n];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate().take(n - i) {
                out[i + j] = (out[i + j] + x * y) % m.p;
            }
        }
        return out;
    }
    let size = (a.len() + b.len() - 1).next_power_of_two();
    assert!(size <= 1 << LOG_MAX, "transform length {size} too large");
    let mut fa = a.to_vec();
    fa.resize(size, 0);
    let mut fb = b.to_vec();
    fb.resize(size, 0);
    ntt(&mut fa, false, m);
    ntt(&mut fb, false, m);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % m.p;
    }
    ntt(&mut fa, true, m);
    fa.truncate(n);
    fa.resize(n, 0);
    fa
}

/// Garner-style reconstruction of integers from residues, symmetric range.
#[derive(Debug, Clone)]
pub struct Crt {
    ms: Vec<u64>,
    inv: Vec<Vec<u64>>,
    product: BigUint,
    half: BigUint,
}

impl Crt {
    pub fn new(count: usize) -> Self {
        let ms: Vec<u64> = moduli()[..count].iter().map(|m| m.p).collect();
        let inv = (0..count)
            .map(|i| (0..i).map(|j| inv_mod(ms[j] % ms[i], ms[i])).collect())
            .collect();
        let product = ms.iter().fold(BigUint::from(1u32), |acc, &m| acc * m);
        let half = &product >> 1;
        Self {
            ms,
            inv,
            product,
            half,
        }
    }

    pub fn len(&self) -> usize {
        self.ms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ms.is_empty()
    }

    pub fn reconstruct(&self, residues: &[u64]) -> BigInt {
        let r = self.ms.len();
        let mut digits = vec![0u64; r];
        for i in 0..r {
            let p = self.ms[i];
            let mut t = residues[i] % p;
            for j in 0..i {
                let d = digits[j] % p;
                t = (t + p - d) % p * self.inv[i][j] % p;
            }
            digits[i] = t;
        }
        let mut x = BigUint::from(digits[r - 1]);
        for j in (0..r - 1).rev() {
            x = x * self.ms[j] + digits[j];
        }
        if x > self.half {
            BigInt::from_biguint(Sign::Minus, &self.product - x)
        } else {
            BigInt::from_biguint(Sign::Plus, x)
        }
    }
}
