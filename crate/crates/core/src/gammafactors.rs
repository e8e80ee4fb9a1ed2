//! Archimedean data for φ×f and φ×sym²f: Γ_R shifts, the gamma-factor
//! term of the explicit formula, analytic conductors, and root numbers
//! computed from Weil-group representations.

use crate::error::{Error, Result};
use crate::quad::{simpson, simpson_panels};
use crate::satake::FamilyTag;
use crate::testfns::TestFunctionPair;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Γ_R(s + μ_j) for each μ_j in `shifts`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchimedeanParams {
    pub family: FamilyTag,
    pub k: u32,
    pub t_phi: f64,
    pub shifts: Vec<Complex64>,
}

impl ArchimedeanParams {
    /// ½ + μ_j, the points where the Γ_R factors are probed at the centre.
    pub fn central_values(&self) -> Vec<Complex64> {
        self.shifts.iter().map(|m| m + 0.5).collect()
    }

    /// How many shifts grow with k.
    pub fn k_dependent(&self) -> usize {
        self.shifts.iter().filter(|m| m.re >= (self.k as f64 - 1.0) / 2.0).count()
    }
}

fn check_weight(k: u32) -> Result<()> {
    if k % 2 == 1 || k < 2 {
        return Err(Error::Domain(format!("weight {k} must be even")));
    }
    Ok(())
}

pub fn mu_params(family: FamilyTag, k: u32, t_phi: f64) -> Result<ArchimedeanParams> {
    check_weight(k)?;
    let kf = k as f64;
    let reals: Vec<f64> = match family {
        FamilyTag::PhiXSym2F => vec![kf - 1.0, kf, 1.0],
        FamilyTag::PhiXF => vec![(kf - 1.0) / 2.0, (kf + 1.0) / 2.0],
        other => return Err(Error::Domain(format!("no archimedean parameters for family {other}"))),
    };
    let shifts = reals
        .into_iter()
        .flat_map(|r| [Complex64::new(r, t_phi), Complex64::new(r, -t_phi)])
        .collect();
    Ok(ArchimedeanParams {
        family,
        k,
        t_phi,
        shifts,
    })
}

const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// ψ(z) = Γ'/Γ(z).
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("digamma of {z}")));
    }
    if z.re <= 0.0 && z.im == 0.0 && z.re == z.re.round() {
        return Err(Error::Domain(format!("digamma pole at {}", z.re)));
    }
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.re < 10.0 {
        acc -= z.inv();
        z += 1.0;
    }
    let zi2 = (z * z).inv();
    let mut pow = zi2;
    let mut series = Complex64::new(0.0, 0.0);
    for (n, b) in BERNOULLI.iter().enumerate() {
        series += pow * (b / (2.0 * (n + 1) as f64));
        pow *= zi2;
    }
    Ok(acc + z.ln() - z.inv() * 0.5 - series)
}

/// Γ_R'/Γ_R(s) = −½ log π + ½ψ(s/2).
pub fn gamma_r_log_derivative(s: Complex64) -> Result<Complex64> {
    Ok(-0.5 * PI.ln() + 0.5 * digamma(s * 0.5)?)
}

/// Σ_j Re[Γ_R'/Γ_R(μ_j + ½ + iy) + Γ_R'/Γ_R(μ̄_j + ½ + iy)].
fn kernel(params: &ArchimedeanParams, y: f64) -> Result<f64> {
    let mut s = 0.0;
    for m in &params.shifts {
        let iy = Complex64::new(0.5, y);
        s += gamma_r_log_derivative(m + iy)?.re + gamma_r_log_derivative(m.conj() + iy)?.re;
    }
    Ok(s)
}

/// A / log R, where A = ∫ Σ_j [Γ_R'/Γ_R(μ_j+½+2πix/log R) + (μ̄_j)] g(x) dx.
///
/// The integral is split as H(0)ĝ(0) + 2∫₀^∞ (H − H(0)) g. For Fejér g the
/// range [0, X], X = 2000/σ, is integrated in panels a quarter period wide;
/// beyond X the mean part (2π²σx²)⁻¹ of g is integrated after x = Xeᵛ and the
/// oscillating part, of size O(σ⁻²X⁻²), is dropped.
pub fn gamma_term_a(params: &ArchimedeanParams, f: &TestFunctionPair, r: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::Domain(format!("R = {r} must exceed 1")));
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    let log_r = r.ln();
    let y = |x: f64| 2.0 * PI * x / log_r;
    let h0 = kernel(params, 0.0)?;
    let err = std::cell::Cell::new(None);
    let centred = |x: f64| match kernel(params, y(x)) {
        Ok(v) => v - h0,
        Err(e) => {
            err.set(Some(e));
            f64::NAN
        }
    };
    let sigma = f.support();
    let x_max = 2000.0 / sigma;
    let body = simpson_panels(&|x| centred(x) * f.g(x), 0.0, x_max, 0.25 / sigma, 1e-11);
    if let Some(e) = err.take() {
        return Err(e);
    }
    let mut total = h0 * f.ghat0() + 2.0 * body?;
    let mean_tail = f.mean_tail_coefficient();
    if mean_tail != 0.0 {
        let tail = simpson(&|v: f64| centred(x_max * v.exp()) * (-v).exp() / x_max, 0.0, 50.0, 1e-12)?;
        total += 2.0 * mean_tail * tail;
    }
    Ok(total / log_r)
}

/// log R with R = k⁴ for both GL(4) and GL(6) families.
pub fn conductor_log(family: FamilyTag, k: u32) -> Result<f64> {
    if !family.involves_phi() {
        return Err(Error::Domain(format!("no conductor convention for family {family}")));
    }
    if k < 12 {
        return Err(Error::Domain(format!("weight {k} below 12")));
    }
    Ok(4.0 * (k as f64).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeilKind {
    Plus,
    Minus,
    Discrete(u32),
}

/// Irreducible summand ρ_(kind, it) of a representation of W_R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeilSummand {
    pub kind: WeilKind,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeilRep {
    pub summands: Vec<WeilSummand>,
}

impl WeilRep {
    /// Closed under t ↦ −t.
    pub fn is_self_dual(&self) -> bool {
        let mut used = vec![false; self.summands.len()];
        for (i, s) in self.summands.iter().enumerate() {
            if used[i] {
                continue;
            }
            let partner = (0..self.summands.len()).find(|&j| {
                !used[j] && j != i && self.summands[j].kind == s.kind && self.summands[j].t == -s.t
            });
            match partner {
                Some(j) => {
                    used[i] = true;
                    used[j] = true;
                }
                None if s.t == 0.0 => used[i] = true,
                None => return false,
            }
        }
        true
    }
}

/// Archimedean parameter of φ×sym²f or φ×f: φ_∞ ↔ ρ_(+,it) ⊕ ρ_(+,−it),
/// f_∞ ↔ ρ_(k−1,0), sym²ρ_(k−1,0) ≅ ρ_(−,0) ⊕ ρ_(2k−2,0) for even k.
pub fn weil_rep(family: FamilyTag, k: u32, t_phi: f64) -> Result<WeilRep> {
    check_weight(k)?;
    let kinds = match family {
        FamilyTag::PhiXSym2F => vec![WeilKind::Minus, WeilKind::Discrete(2 * k - 2)],
        FamilyTag::PhiXF => vec![WeilKind::Discrete(k - 1)],
        other => return Err(Error::Domain(format!("no Weil representation for family {other}"))),
    };
    let summands = kinds
        .into_iter()
        .flat_map(|kind| [WeilSummand { kind, t: t_phi }, WeilSummand { kind, t: -t_phi }])
        .collect();
    Ok(WeilRep { summands })
}

/// Γ_R(s + shift + it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRFactor {
    pub shift: f64,
    pub t: f64,
}

pub fn gamma_factor_list(rep: &WeilRep) -> Vec<GammaRFactor> {
    let mut out = Vec::new();
    for s in &rep.summands {
        match s.kind {
            WeilKind::Plus => out.push(GammaRFactor { shift: 0.0, t: s.t }),
            WeilKind::Minus => out.push(GammaRFactor { shift: 1.0, t: s.t }),
            WeilKind::Discrete(l) => {
                let h = l as f64 / 2.0;
                out.push(GammaRFactor { shift: h, t: s.t });
                out.push(GammaRFactor { shift: h + 1.0, t: s.t });
            }
        }
    }
    out
}

/// d/ds log ∏ Γ_R(s + shift + it).
pub fn gamma_factor_log_derivative(factors: &[GammaRFactor], s: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for g in factors {
        acc += gamma_r_log_derivative(s + Complex64::new(g.shift, g.t))?;
    }
    Ok(acc)
}

/// Exponent e with ε = iᵉ for one summand.
fn local_epsilon_exponent(kind: WeilKind) -> u32 {
    match kind {
        WeilKind::Plus => 0,
        WeilKind::Minus => 1,
        WeilKind::Discrete(l) => (l + 1) % 4,
    }
}

/// Sign of the functional equation: the archimedean product of local root
/// numbers (all finite places are unramified at level 1).
pub fn root_number(family: FamilyTag, k: u32) -> Result<i32> {
    let rep = weil_rep(family, k, 1.0)?;
    let e: u32 = rep.summands.iter().map(|s| local_epsilon_exponent(s.kind)).sum::<u32>() % 4;
    match e {
        0 => Ok(1),
        2 => Ok(-1),
        _ => Err(Error::Domain(format!("root number i^{e} is not real"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn digamma_classical_values() {
        assert!((digamma(c(1.0, 0.0)).unwrap() + EULER_GAMMA).norm() < 1e-14);
        let half = -EULER_GAMMA - 2.0 * 2f64.ln();
        assert!((digamma(c(0.5, 0.0)).unwrap() - half).norm() < 1e-14);
        // ψ(1/4) = −γ − π/2 − 3 log 2
        let quarter = -EULER_GAMMA - PI / 2.0 - 3.0 * 2f64.ln();
        assert!((digamma(c(0.25, 0.0)).unwrap() - quarter).norm() < 1e-13);
        // Im ψ(1 + iy) = −1/(2y) + (π/2) coth(πy)
        for y in [0.3, 2.0, 13.78] {
            let want = -0.5 / y + PI / 2.0 / (PI * y).tanh();
            assert!((digamma(c(1.0, y)).unwrap().im - want).abs() < 1e-13);
        }
        assert!(digamma(c(0.0, 0.0)).is_err());
        assert!(digamma(c(-3.0, 0.0)).is_err());
    }

    #[test]
    fn digamma_recurrence() {
        for z in [c(0.3, 0.0), c(2.5, 7.0), c(0.7, -13.7), c(40.0, 1.0), c(-2.5, 0.5)] {
            let lhs = digamma(z + 1.0).unwrap();
            let rhs = digamma(z).unwrap() + z.inv();
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0), "{z}");
        }
    }

    #[test]
    fn digamma_near_log() {
        for k in (12..=400).step_by(2) {
            for a in [0.0, 0.5] {
                let v = digamma(c(k as f64 / 2.0 + a, 0.0)).unwrap().re - (k as f64).ln();
                assert!(v.abs() < 1.0);
            }
        }
    }

    #[test]
    fn parameter_lists() {
        let p = mu_params(FamilyTag::PhiXF, 12, 0.0).unwrap();
        let mut re: Vec<f64> = p.shifts.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(re, vec![5.5, 5.5, 6.5, 6.5]);
        let p = mu_params(FamilyTag::PhiXSym2F, 12, 0.0).unwrap();
        let mut re: Vec<f64> = p.central_values().iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(re, vec![1.5, 1.5, 11.5, 11.5, 12.5, 12.5]);
        assert_eq!(p.k_dependent(), 4);
        let p = mu_params(FamilyTag::PhiXSym2F, 20, 13.7).unwrap();
        for z in &p.shifts {
            assert!(p.shifts.iter().any(|w| (w - z.conj()).norm() == 0.0));
        }
        assert!(mu_params(FamilyTag::F, 12, 0.0).is_err());
        assert!(mu_params(FamilyTag::PhiXF, 13, 0.0).is_err());
    }

    #[test]
    fn weil_representations() {
        let r = weil_rep(FamilyTag::PhiXF, 12, 2.0).unwrap();
        assert_eq!(
            r.summands,
            vec![
                WeilSummand { kind: WeilKind::Discrete(11), t: 2.0 },
                WeilSummand { kind: WeilKind::Discrete(11), t: -2.0 }
            ]
        );
        let r = weil_rep(FamilyTag::PhiXSym2F, 12, 2.0).unwrap();
        assert_eq!(r.summands.len(), 4);
        assert!(r.is_self_dual());
        let broken = WeilRep { summands: vec![WeilSummand { kind: WeilKind::Minus, t: 1.0 }] };
        assert!(!broken.is_self_dual());
    }

    #[test]
    fn gamma_factors_match_parameters() {
        for fam in [FamilyTag::PhiXF, FamilyTag::PhiXSym2F] {
            for k in [12u32, 20, 38] {
                let t = 13.7797513519;
                let factors = gamma_factor_list(&weil_rep(fam, k, t).unwrap());
                let params = mu_params(fam, k, t).unwrap();
                assert_eq!(factors.len(), fam.degree());
                for y in [0.0, 0.7, -3.1] {
                    let s = c(0.5, y);
                    let lhs = gamma_factor_log_derivative(&factors, s).unwrap();
                    let mut rhs = Complex64::new(0.0, 0.0);
                    for m in &params.shifts {
                        rhs += gamma_r_log_derivative(m + s).unwrap();
                    }
                    assert!((lhs - rhs).norm() < 1e-10);
                }
            }
        }
        let sym = gamma_factor_list(&weil_rep(FamilyTag::PhiXSym2F, 12, 1.0).unwrap());
        assert!(sym.contains(&GammaRFactor { shift: 1.0, t: 1.0 }));
        assert!(sym.contains(&GammaRFactor { shift: 1.0, t: -1.0 }));
        let gl4 = gamma_factor_list(&weil_rep(FamilyTag::PhiXF, 12, 1.0).unwrap());
        let mut shifts: Vec<f64> = gl4.iter().map(|g| g.shift).collect();
        shifts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(shifts, vec![5.5, 5.5, 6.5, 6.5]);
    }

    #[test]
    fn root_numbers_are_even() {
        for k in (12..=400).step_by(2) {
            assert_eq!(root_number(FamilyTag::PhiXSym2F, k).unwrap(), 1);
            assert_eq!(root_number(FamilyTag::PhiXF, k).unwrap(), 1);
        }
        assert!(root_number(FamilyTag::PhiXF, 13).is_err());
        assert!(root_number(FamilyTag::F, 12).is_err());
    }

    #[test]
    fn conductors() {
        let a = conductor_log(FamilyTag::PhiXSym2F, 12).unwrap();
        assert!((a - 4.0 * 12f64.ln()).abs() < 1e-15);
        assert_eq!(a, conductor_log(FamilyTag::PhiXF, 12).unwrap());
        let r = conductor_log(FamilyTag::PhiXF, 144).unwrap() / a;
        assert!((r - 2.0).abs() < 1e-14);
        assert!(conductor_log(FamilyTag::PhiXF, 10).is_err());
    }

    #[test]
    fn constant_kernel_integrates_to_ghat0() {
        // at t = 0 and R → ∞ the kernel is flat, so A/log R → H(0)ĝ(0)/log R
        let f = TestFunctionPair::fejer(0.5).unwrap();
        let p = mu_params(FamilyTag::PhiXSym2F, 12, 13.78).unwrap();
        let r = 1e300f64;
        let got = gamma_term_a(&p, &f, r).unwrap();
        let want = kernel(&p, 0.0).unwrap() * f.ghat0() / r.ln();
        assert!((got - want).abs() < 1e-3 * want.abs());
        assert_eq!(gamma_term_a(&p, &TestFunctionPair::zero(0.5), 1e4).unwrap(), 0.0);
    }

    #[test]
    fn gamma_term_approaches_ghat0() {
        let f = TestFunctionPair::fejer(0.5).unwrap();
        let t = 13.7797513519;
        let mut prev = f64::INFINITY;
        for k in [12u32, 50, 200, 800] {
            let p = mu_params(FamilyTag::PhiXSym2F, k, t).unwrap();
            let r = (k as f64).powi(4);
            let ratio = gamma_term_a(&p, &f, r).unwrap() / f.ghat0();
            let err = (ratio - 1.0).abs();
            assert!(err < prev, "k = {k}: {ratio}");
            assert!(err <= 1.5 / (k as f64).ln(), "k = {k}: {ratio}");
            prev = err;
        }
    }
}
