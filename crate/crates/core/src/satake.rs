//! Satake parameters of f, sym²f, φ×f and φ×sym²f at a prime, their
//! power-sum Dirichlet coefficients, and the closed forms in terms of
//! Hecke eigenvalues.

use crate::error::{Error, Result};
use crate::hecke::HeckeEigenform;
use crate::maass::{prime_power_table, MaassForm};
use crate::primes::smallest_factor;
use num_complex::Complex64;
use num_integer::Integer;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyTag {
    F,
    Sym2F,
    PhiXF,
    PhiXSym2F,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 4] = [FamilyTag::F, FamilyTag::Sym2F, FamilyTag::PhiXF, FamilyTag::PhiXSym2F];

    pub fn degree(self) -> usize {
        match self {
            FamilyTag::F => 2,
            FamilyTag::Sym2F => 3,
            FamilyTag::PhiXF => 4,
            FamilyTag::PhiXSym2F => 6,
        }
    }

    pub fn involves_phi(self) -> bool {
        matches!(self, FamilyTag::PhiXF | FamilyTag::PhiXSym2F)
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::F => "f",
            FamilyTag::Sym2F => "sym2f",
            FamilyTag::PhiXF => "phi-f",
            FamilyTag::PhiXSym2F => "phi-sym2f",
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "f" => Ok(FamilyTag::F),
            "sym2f" | "sym2-f" => Ok(FamilyTag::Sym2F),
            "phi-f" | "phi-x-f" => Ok(FamilyTag::PhiXF),
            "phi-sym2f" | "phi-x-sym2f" => Ok(FamilyTag::PhiXSym2F),
            other => Err(Error::Domain(format!("unknown family `{other}`"))),
        }
    }
}

/// α on the unit circle with α + ᾱ = λ_f(p), Im α ≥ 0.
pub fn alpha_from_lambda(lf_p: f64) -> Result<Complex64> {
    if !(lf_p.abs() <= 2.0 + 1e-9) {
        return Err(Error::Domain(format!("|λ_f(p)| = {} exceeds 2", lf_p.abs())));
    }
    let theta = (lf_p / 2.0).clamp(-1.0, 1.0).acos();
    Ok(Complex64::from_polar(1.0, theta))
}

/// β with β + β⁻¹ = λ_φ(p): unit circle when |λ| ≤ 2, otherwise real with |β| > 1.
pub fn beta_from_lambda(lphi_p: f64) -> Complex64 {
    if lphi_p.abs() <= 2.0 {
        Complex64::from_polar(1.0, (lphi_p / 2.0).acos())
    } else {
        let r = (lphi_p * lphi_p - 4.0).sqrt();
        Complex64::new((lphi_p + lphi_p.signum() * r) / 2.0, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalParameters {
    pub family: FamilyTag,
    pub prime: u64,
    pub params: Vec<Complex64>,
}

pub fn local_params(family: FamilyTag, alpha: Complex64, beta: Complex64, p: u64) -> Result<LocalParameters> {
    if (alpha.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("α = {alpha} is not on the unit circle")));
    }
    if family.involves_phi() && beta.norm() == 0.0 {
        return Err(Error::Domain("β must be nonzero".into()));
    }
    let a = alpha;
    let ai = alpha.inv();
    let one = Complex64::new(1.0, 0.0);
    let params = match family {
        FamilyTag::F => vec![a, ai],
        FamilyTag::Sym2F => vec![a * a, one, ai * ai],
        FamilyTag::PhiXF => {
            let bi = beta.inv();
            vec![a * beta, a * bi, ai * beta, ai * bi]
        }
        FamilyTag::PhiXSym2F => {
            let bi = beta.inv();
            vec![a * a * beta, a * a * bi, beta, bi, ai * ai * beta, ai * ai * bi]
        }
    };
    Ok(LocalParameters {
        family,
        prime: p,
        params,
    })
}

/// Σ_j δ_j^ν.
pub fn a_coeff_powersum(lp: &LocalParameters, nu: u32) -> Result<f64> {
    let mut s = Complex64::new(0.0, 0.0);
    let mut scale = 1.0f64;
    for d in &lp.params {
        let v = d.powu(nu);
        scale = scale.max(v.norm());
        s += v;
    }
    if s.im.abs() > 1e-10 * scale {
        return Err(Error::Precision(format!("power sum has imaginary part {}", s.im)));
    }
    Ok(s.re)
}

/// λ(p^j) from a table, continued by λ(p^{−1}) = 0, λ(p^{−2}) = −1.
fn entry(t: &[f64], j: i64, what: &str) -> Result<f64> {
    match j {
        -2 => Ok(-1.0),
        -1 => Ok(0.0),
        _ => t
            .get(j as usize)
            .copied()
            .ok_or_else(|| Error::MissingData(format!("{what}(p^{j}) not supplied"))),
    }
}

/// α^m + α^{−m} = λ(p^m) − λ(p^{m−2}).
fn trace_power(t: &[f64], m: i64, what: &str) -> Result<f64> {
    Ok(entry(t, m, what)? - entry(t, m - 2, what)?)
}

/// The coefficient a(p^ν) from Hecke eigenvalues: `f[j]` = λ_f(p^j),
/// `phi[j]` = λ_φ(p^j).
pub fn a_coeff_closed(family: FamilyTag, f: &[f64], phi: &[f64], nu: u32) -> Result<f64> {
    if nu == 0 {
        return Err(Error::Domain("ν must be at least 1".into()));
    }
    let n = nu as i64;
    Ok(match family {
        FamilyTag::F => trace_power(f, n, "λ_f")?,
        FamilyTag::Sym2F => trace_power(f, 2 * n, "λ_f")? + 1.0,
        FamilyTag::PhiXF => trace_power(f, n, "λ_f")? * trace_power(phi, n, "λ_φ")?,
        FamilyTag::PhiXSym2F => (trace_power(f, 2 * n, "λ_f")? + 1.0) * trace_power(phi, n, "λ_φ")?,
    })
}

/// b(p) = a(p), b(p²) = a(p²) + 1, b(p^ν) = a(p^ν) otherwise.
pub fn b_coeff(family: FamilyTag, f: &[f64], phi: &[f64], nu: u32) -> Result<f64> {
    let a = a_coeff_closed(family, f, phi, nu)?;
    Ok(if nu == 2 { a + 1.0 } else { a })
}

fn mobius(mut n: u64) -> i32 {
    let mut sign = 1;
    while n > 1 {
        let p = smallest_factor(n);
        n /= p;
        if n % p == 0 {
            return 0;
        }
        sign = -sign;
    }
    sign
}

fn divisors(n: u64) -> Vec<u64> {
    let mut d: Vec<u64> = (1..).take_while(|i| i * i <= n).filter(|i| n % i == 0).collect();
    let big: Vec<u64> = d.iter().rev().map(|i| n / i).filter(|&j| j * j != n).collect();
    d.extend(big);
    d
}

/// λ_{sym²f}(r, 1) = Σ_{s²t=r} λ_f(t²).
fn sym2_coeff(r: u64, lf: &dyn Fn(u64) -> Result<f64>) -> Result<f64> {
    let mut s = 0.0;
    let mut q = 1u64;
    while q * q <= r {
        if r % (q * q) == 0 {
            let t = r / (q * q);
            s += lf(t * t)?;
        }
        q += 1;
    }
    Ok(s)
}

/// a_F(m1, m2) = Σ_{d|(m1,m2)} μ(d) λ_{sym²f}(m1/d, 1) λ_{sym²f}(m2/d, 1).
fn gl3_coeff(m1: u64, m2: u64, lf: &dyn Fn(u64) -> Result<f64>) -> Result<f64> {
    let mut s = 0.0;
    for d in divisors(m1.gcd(&m2)) {
        let mu = mobius(d);
        if mu != 0 {
            s += mu as f64 * sym2_coeff(m1 / d, lf)? * sym2_coeff(m2 / d, lf)?;
        }
    }
    Ok(s)
}

/// Dirichlet coefficient of L(s, φ×sym²f) at m from arbitrary λ_f, λ_φ oracles:
/// Σ_{m1 m2² = m} λ_φ(m1) a_F(m1, m2).
pub fn dirichlet_coeff_phi_sym2_with(
    m: u64,
    lf: &dyn Fn(u64) -> Result<f64>,
    lphi: &dyn Fn(u64) -> Result<f64>,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let mut s = 0.0;
    let mut m2 = 1u64;
    while m2 * m2 <= m {
        if m % (m2 * m2) == 0 {
            let m1 = m / (m2 * m2);
            s += lphi(m1)? * gl3_coeff(m1, m2, lf)?;
        }
        m2 += 1;
    }
    Ok(s)
}

pub fn dirichlet_coeff_phi_sym2(m: u64, f: &HeckeEigenform, phi: &MaassForm) -> Result<f64> {
    dirichlet_coeff_phi_sym2_with(m, &|n| f.lambda_at(n), &|n| phi.lambda_n(n))
}

/// Coefficients h_0..=h_n of ∏_j (1 − δ_j x)⁻¹, by Newton's identities.
pub fn euler_factor_series(lp: &LocalParameters, n: usize) -> Result<Vec<f64>> {
    let p: Vec<f64> = (1..=n as u32).map(|nu| a_coeff_powersum(lp, nu)).collect::<Result<_>>()?;
    let mut h = vec![1.0];
    for m in 1..=n {
        let s: f64 = (1..=m).map(|i| p[i - 1] * h[m - i]).sum();
        h.push(s / m as f64);
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoment {
    /// Diagonal main term of the family-averaged a(p²), averaged over p.
    pub main_term: f64,
    /// Weighted family average of a(p²) minus the main term, averaged over p.
    pub fluctuation: f64,
    pub primes: usize,
}

/// Family average of a(p²) with the harmonic weights, split into the
/// Petersson-diagonal main term and what the λ-fluctuations add.
///
/// The main term sets the family average of λ_f(p^j), j ≥ 1, to zero (the
/// diagonal of the Petersson formula) and drops λ_φ(p²), whose average over
/// p vanishes. The sign of the main term is the symmetry constant: + for
/// symplectic, − for orthogonal.
pub fn second_moment_diagnostic(
    family: FamilyTag,
    forms: &[HeckeEigenform],
    phi: Option<&MaassForm>,
    p_max: u64,
) -> Result<SecondMoment> {
    if p_max < 2 || forms.is_empty() {
        return Err(Error::Domain("need at least one prime and one eigenform".into()));
    }
    let ps = crate::primes::sieve_primes(p_max)?;
    let wsum: f64 = forms.iter().map(|f| f.harmonic_weight).sum();
    let mut main = 0.0;
    let mut avg = 0.0;
    for p in ps.iter() {
        let phi_tab = if family.involves_phi() {
            let phi = phi.ok_or_else(|| Error::MissingData(format!("{family} needs a Maass form")))?;
            prime_power_table(phi.lambda_p(p)?, 2)
        } else {
            vec![1.0, 0.0, 1.0]
        };
        let diag_f = [1.0, 0.0, 0.0, 0.0, 0.0];
        let diag_phi = [1.0, phi_tab[1], 0.0];
        main += a_coeff_closed(family, &diag_f, &diag_phi, 2)?;
        let mut s = 0.0;
        for f in forms {
            let tab = prime_power_table(f.lambda_at(p)?, 4);
            s += f.harmonic_weight * a_coeff_closed(family, &tab, &phi_tab, 2)?;
        }
        avg += s / wsum;
    }
    let n = ps.len() as f64;
    Ok(SecondMoment {
        main_term: main / n,
        fluctuation: (avg - main) / n,
        primes: ps.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn alpha_examples() {
        assert!((alpha_from_lambda(2.0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((alpha_from_lambda(0.0).unwrap() - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let a = alpha_from_lambda(-0.530330).unwrap();
        assert!((a.arg() - (-0.265165f64).acos()).abs() < 1e-12);
        assert!(alpha_from_lambda(2.1).is_err());
        assert!(alpha_from_lambda(f64::NAN).is_err());
    }

    #[test]
    fn beta_examples() {
        assert!((beta_from_lambda(0.0) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((beta_from_lambda(2.5) - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        assert!((beta_from_lambda(-2.5) - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn parameter_sets() {
        let i = Complex64::new(0.0, 1.0);
        let lp = local_params(FamilyTag::Sym2F, i, i, 2).unwrap();
        let want = [-1.0, 1.0, -1.0];
        for (z, w) in lp.params.iter().zip(want) {
            assert!((z - w).norm() < 1e-15);
        }
        for fam in FamilyTag::ALL {
            let lp = local_params(fam, Complex64::from_polar(1.0, 0.3), Complex64::new(2.0, 0.0), 3).unwrap();
            assert_eq!(lp.params.len(), fam.degree());
            for z in &lp.params {
                assert!(lp.params.iter().any(|w| (w * z - 1.0).norm() < 1e-12));
            }
            let ones = local_params(fam, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), 5).unwrap();
            assert_eq!(a_coeff_powersum(&ones, 3).unwrap(), fam.degree() as f64);
        }
        assert!(local_params(FamilyTag::F, Complex64::new(1.5, 0.0), i, 2).is_err());
    }

    #[test]
    fn tags_round_trip() {
        for fam in FamilyTag::ALL {
            assert_eq!(fam.name().parse::<FamilyTag>().unwrap(), fam);
        }
        assert!("gl7".parse::<FamilyTag>().is_err());
    }

    #[test]
    fn closed_form_special_values() {
        let f = [1.0, 0.3, -0.91, 0.2, 0.4];
        assert_eq!(a_coeff_closed(FamilyTag::PhiXSym2F, &f, &[1.0, 0.0], 1).unwrap(), 0.0);
        assert_eq!(a_coeff_closed(FamilyTag::PhiXSym2F, &f, &[1.0, 0.5, 1.0], 2).unwrap(), 0.0);
        assert!((a_coeff_closed(FamilyTag::PhiXSym2F, &f, &[1.0, 0.5], 1).unwrap() + 0.5 * 0.91).abs() < 1e-15);
        assert!(matches!(a_coeff_closed(FamilyTag::F, &f[..2], &[], 2), Err(Error::MissingData(_))));
        assert!(a_coeff_closed(FamilyTag::F, &f, &[], 0).is_err());
        for nu in 1..=3 {
            let a = a_coeff_closed(FamilyTag::PhiXF, &f, &[1.0, 0.7, -0.51, 0.2], nu).unwrap();
            let b = b_coeff(FamilyTag::PhiXF, &f, &[1.0, 0.7, -0.51, 0.2], nu).unwrap();
            assert_eq!(b - a, if nu == 2 { 1.0 } else { 0.0 });
        }
        let a = [1.0, 1.0, 0.0];
        assert_eq!(b_coeff(FamilyTag::F, &a, &[], 2).unwrap(), 0.0);
    }

    fn two_routes(fam: FamilyTag, theta: f64, lphi: f64, nu: u32) -> (f64, f64) {
        let lf = 2.0 * theta.cos();
        let alpha = alpha_from_lambda(lf).unwrap();
        let beta = beta_from_lambda(lphi);
        let lp = local_params(fam, alpha, beta, 7).unwrap();
        let f = prime_power_table(lf, 2 * nu);
        let phi = prime_power_table(lphi, nu);
        (a_coeff_powersum(&lp, nu).unwrap(), a_coeff_closed(fam, &f, &phi, nu).unwrap())
    }

    #[test]
    fn two_route_identity_on_grid() {
        for fam in FamilyTag::ALL {
            for i in 0..20 {
                for j in 0..20 {
                    let theta = PI * i as f64 / 19.0;
                    let lphi = 2.0 * (PI * j as f64 / 19.0).cos();
                    for nu in 1..=3 {
                        let (a, b) = two_routes(fam, theta, lphi, nu);
                        assert!((a - b).abs() <= 1e-10, "{fam} θ={theta} λφ={lphi} ν={nu}: {a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn non_tempered_beta() {
        for fam in [FamilyTag::PhiXF, FamilyTag::PhiXSym2F] {
            for nu in 1..=3 {
                let (a, b) = two_routes(fam, 1.1, 2.3, nu);
                assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn euler_factor_matches_dirichlet_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let lf = 2.0 * (rng.random::<f64>() * PI).cos();
            let lphi = 2.0 * (rng.random::<f64>() * PI).cos();
            let p = 5u64;
            let lp = local_params(FamilyTag::PhiXSym2F, alpha_from_lambda(lf).unwrap(), beta_from_lambda(lphi), p).unwrap();
            let h = euler_factor_series(&lp, 4).unwrap();
            let ft = prime_power_table(lf, 8);
            let pt = prime_power_table(lphi, 4);
            let lfn = |n: u64| -> Result<f64> {
                let mut e = 0;
                let mut m = n;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                assert_eq!(m, 1);
                Ok(ft[e])
            };
            let lphin = |n: u64| -> Result<f64> {
                let mut e = 0;
                let mut m = n;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                Ok(pt[e])
            };
            for (e, &he) in h.iter().enumerate() {
                let d = dirichlet_coeff_phi_sym2_with(p.pow(e as u32), &lfn, &lphin).unwrap();
                assert!((d - he).abs() < 1e-10, "p^{e}: {d} vs {he}");
            }
            // −L'/L: coefficient at p^ν divided by log p is a(p^ν)
            let mut c = vec![0.0; 5];
            for n in 1..=4 {
                let mut s = n as f64 * h[n];
                for j in 1..n {
                    s -= c[j] * h[n - j];
                }
                c[n] = s;
            }
            for nu in 1..=2 {
                let a = a_coeff_closed(FamilyTag::PhiXSym2F, &ft, &pt, nu as u32).unwrap();
                assert!((c[nu] - a).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dirichlet_coefficient_basics() {
        let one = |_n: u64| -> Result<f64> { Ok(1.0) };
        assert_eq!(dirichlet_coeff_phi_sym2_with(1, &one, &one).unwrap(), 1.0);
        let lf = |n: u64| -> Result<f64> { Ok(match n { 1 => 1.0, 49 => 0.37, _ => 0.0 }) };
        let lphi = |n: u64| -> Result<f64> { Ok(match n { 1 => 1.0, 7 => -1.2, _ => 0.0 }) };
        assert!((dirichlet_coeff_phi_sym2_with(7, &lf, &lphi).unwrap() + 1.2 * 0.37).abs() < 1e-15);
        assert!(dirichlet_coeff_phi_sym2_with(0, &one, &one).is_err());
    }

    #[test]
    fn second_moment_signs() {
        let space = crate::hecke::build_space(12, 200).unwrap();
        let forms = crate::hecke::eigenforms(&space, 200).unwrap();
        let phi = crate::maass::load_bundled().unwrap();
        let sign = |fam| second_moment_diagnostic(fam, &forms, Some(&phi), 100).unwrap().main_term;
        assert_eq!(sign(FamilyTag::Sym2F), 1.0);
        assert_eq!(sign(FamilyTag::F), -1.0);
        assert_eq!(sign(FamilyTag::PhiXSym2F), -1.0);
        assert_eq!(sign(FamilyTag::PhiXF), 1.0);
        assert!(second_moment_diagnostic(FamilyTag::PhiXF, &forms, None, 100).is_err());
        assert!(second_moment_diagnostic(FamilyTag::F, &forms, None, 1).is_err());
    }

    proptest! {
        #[test]
        fn random_draws_agree(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for fam in FamilyTag::ALL {
                let theta = rng.random::<f64>() * PI;
                let lphi = 2.0 * (rng.random::<f64>() * PI).cos();
                for nu in 1..=3 {
                    let (a, b) = two_routes(fam, theta, lphi, nu);
                    prop_assert!((a - b).abs() <= 1e-10);
                }
            }
        }

        #[test]
        fn coprime_multiplicativity(a in 1u64..40, b in 1u64..25, seed in any::<u64>()) {
            if a.gcd(&b) == 1 {
                // synthetic multiplicative λ from per-prime angles
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let angles: Vec<(f64, f64)> = (0..50).map(|_| (rng.random::<f64>() * PI, rng.random::<f64>() * PI)).collect();
                let mult = move |n: u64, which: usize| -> f64 {
                    let mut v = 1.0;
                    let mut m = n;
                    while m > 1 {
                        let p = smallest_factor(m);
                        let mut e = 0;
                        while m % p == 0 { m /= p; e += 1; }
                        let th = if which == 0 { angles[p as usize % 50].0 } else { angles[p as usize % 50].1 };
                        v *= prime_power_table(2.0 * th.cos(), e)[e as usize];
                    }
                    v
                };
                let lf = |n: u64| -> Result<f64> { Ok(mult(n, 0)) };
                let lphi = |n: u64| -> Result<f64> { Ok(mult(n, 1)) };
                let ab = dirichlet_coeff_phi_sym2_with(a * b, &lf, &lphi).unwrap();
                let pa = dirichlet_coeff_phi_sym2_with(a, &lf, &lphi).unwrap();
                let pb = dirichlet_coeff_phi_sym2_with(b, &lf, &lphi).unwrap();
                prop_assert!((ab - pa * pb).abs() < 1e-9 * (1.0 + ab.abs()));
            }
        }
    }
}
