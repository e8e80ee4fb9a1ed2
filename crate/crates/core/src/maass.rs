//! The fixed even Hecke–Maass form φ: data loading, Hecke relations at
//! prime powers, synthetic stand-ins and the Ramanujan-on-average check.

use crate::error::{Error, Result};
use crate::primes::{sieve_primes, smallest_factor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

/// Environment variable naming the default data directory.
pub const DATA_DIR_VAR: &str = "LOWLYING_DATA";

/// File name of the bundled form inside the data directory.
pub const BUNDLED_FILE: &str = "even13.txt";

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    File(PathBuf),
    Text,
    Synthetic { seed: u64 },
    Constant { value: f64 },
}

impl Provenance {
    pub fn is_synthetic(&self) -> bool {
        matches!(self, Provenance::Synthetic { .. } | Provenance::Constant { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaassForm {
    pub t_phi: f64,
    /// λ_φ(p) for every prime p ≤ `limit`.
    pub lambda: BTreeMap<u64, f64>,
    pub limit: u64,
    pub provenance: Provenance,
    /// Primes where |λ_φ(p)| exceeds 2p^{7/64}.
    pub warnings: Vec<String>,
}

impl MaassForm {
    pub fn lambda_p(&self, p: u64) -> Result<f64> {
        self.lambda
            .get(&p)
            .copied()
            .ok_or_else(|| Error::MissingData(format!("λ_φ({p}) not in table (limit {})", self.limit)))
    }

    /// λ_φ(n) through multiplicativity and the prime-power recursion.
    pub fn lambda_n(&self, mut n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("λ_φ(0) is undefined".into()));
        }
        let mut v = 1.0;
        while n > 1 {
            let p = smallest_factor(n);
            let mut nu = 0;
            while n % p == 0 {
                n /= p;
                nu += 1;
            }
            v *= lambda_phi_power(self, p, nu)?;
        }
        Ok(v)
    }

    fn check_bounds(&mut self) {
        self.warnings = self
            .lambda
            .iter()
            .filter(|(&p, l)| l.abs() > 2.0 * (p as f64).powf(7.0 / 64.0) + 1e-9)
            .map(|(p, l)| format!("|λ_φ({p})| = {} exceeds 2p^(7/64)", l.abs()))
            .collect();
    }
}

/// λ(p^{ν+1}) = λ(p)λ(p^ν) − λ(p^{ν−1}).
pub fn prime_power_table(lp: f64, nu_max: u32) -> Vec<f64> {
    let mut t = vec![1.0, lp];
    for j in 2..=nu_max as usize {
        t.push(lp * t[j - 1] - t[j - 2]);
    }
    t.truncate(nu_max as usize + 1);
    t
}

pub fn lambda_phi_power(phi: &MaassForm, p: u64, nu: u32) -> Result<f64> {
    if nu == 0 {
        return Ok(1.0);
    }
    let lp = phi.lambda_p(p)?;
    Ok(prime_power_table(lp, nu)[nu as usize])
}

fn parse_header(line: &str, no: usize) -> Result<f64> {
    let bad = |msg: String| Error::Parse { line: no, msg };
    let mut toks = line.split_whitespace();
    if toks.next() != Some("maass") {
        return Err(bad("expected header `maass t=<t> parity=even`".into()));
    }
    let mut t = None;
    let mut parity = None;
    for tok in toks {
        match tok.split_once('=') {
            Some(("t", v)) => t = Some(v.parse::<f64>().map_err(|_| bad(format!("bad t value `{v}`")))?),
            Some(("parity", v)) => parity = Some(v.to_string()),
            _ => return Err(bad(format!("unknown header field `{tok}`"))),
        }
    }
    match parity.as_deref() {
        Some("even") => {}
        Some(other) => return Err(bad(format!("parity `{other}` rejected, φ must be even"))),
        None => return Err(bad("header lacks parity".into())),
    }
    let t = t.ok_or_else(|| bad("header lacks t".into()))?;
    if !(t.is_finite() && t > 0.0) {
        return Err(bad(format!("spectral parameter {t} must be positive")));
    }
    Ok(t)
}

/// Parses the text format: `maass t=<t> parity=even`, then `p <λ(p)>` lines.
pub fn parse_maass(text: &str, provenance: Provenance) -> Result<MaassForm> {
    let mut t_phi = None;
    let mut lambda = BTreeMap::new();
    let mut last = 0u64;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        last_line = no;
        if t_phi.is_none() {
            t_phi = Some(parse_header(line, no)?);
            continue;
        }
        let bad = |msg: String| Error::Parse { line: no, msg };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(bad(format!("expected `p λ`, got `{line}`")));
        }
        let p: u64 = toks[0].parse().map_err(|_| bad(format!("bad prime `{}`", toks[0])))?;
        let l: f64 = toks[1].parse().map_err(|_| bad(format!("bad value `{}`", toks[1])))?;
        if !l.is_finite() {
            return Err(bad(format!("non-finite value at p = {p}")));
        }
        if p <= last {
            return Err(bad(format!("primes must ascend, {p} after {last}")));
        }
        lambda.insert(p, l);
        last = p;
    }
    let t_phi = t_phi.ok_or(Error::Parse {
        line: last_line.max(1),
        msg: "missing header".into(),
    })?;
    if lambda.is_empty() {
        return Err(Error::Parse {
            line: last_line.max(1),
            msg: "no prime data".into(),
        });
    }
    let expected = sieve_primes(last.max(2))?;
    if expected.primes != lambda.keys().copied().collect::<Vec<_>>() {
        let missing: Vec<u64> = expected.iter().filter(|p| !lambda.contains_key(p)).take(5).collect();
        let extra: Vec<u64> = lambda.keys().copied().filter(|&p| expected.primes.binary_search(&p).is_err()).take(5).collect();
        return Err(Error::Parse {
            line: last_line,
            msg: format!("prime list incomplete or invalid: missing {missing:?}, non-prime {extra:?}"),
        });
    }
    let mut form = MaassForm {
        t_phi,
        lambda,
        limit: last,
        provenance,
        warnings: Vec::new(),
    };
    form.check_bounds();
    Ok(form)
}

pub fn load_maass(path: impl AsRef<Path>) -> Result<MaassForm> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_maass(&text, Provenance::File(path.to_path_buf()))
}

/// Data directory: `$LOWLYING_DATA` if set, else the copy shipped with the crate.
pub fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("data"))
}

pub fn load_bundled() -> Result<MaassForm> {
    load_maass(data_dir().join(BUNDLED_FILE))
}

/// λ_φ(p) = 2cos θ_p with θ_p uniform on [0, π]. Not automorphic.
pub fn synthetic_maass(seed: u64, p_max: u64, t: f64) -> Result<MaassForm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = sieve_primes(p_max)?;
    let lambda = table
        .iter()
        .map(|p| (p, 2.0 * (rng.random::<f64>() * PI).cos()))
        .collect();
    Ok(MaassForm {
        t_phi: t,
        lambda,
        limit: p_max,
        provenance: Provenance::Synthetic { seed },
        warnings: Vec::new(),
    })
}

/// λ_φ(p) = `value` at every prime; a sensitivity control.
pub fn constant_maass(value: f64, p_max: u64, t: f64) -> Result<MaassForm> {
    let table = sieve_primes(p_max)?;
    let mut form = MaassForm {
        t_phi: t,
        lambda: table.iter().map(|p| (p, value)).collect(),
        limit: p_max,
        provenance: Provenance::Constant { value },
        warnings: Vec::new(),
    };
    form.check_bounds();
    Ok(form)
}

/// (1/X) Σ_{n≤X} λ_φ(n)².
pub fn ramanujan_average_check(phi: &MaassForm, x: u64) -> Result<f64> {
    if x == 0 {
        return Err(Error::Domain("X must be positive".into()));
    }
    if x > phi.limit {
        return Err(Error::MissingData(format!("X = {x} exceeds prime table limit {}", phi.limit)));
    }
    let mut s = 0.0;
    for n in 1..=x {
        s += phi.lambda_n(n)?.powi(2);
    }
    Ok(s / x as f64)
}
