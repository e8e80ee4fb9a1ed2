//! Harmonically weighted 1- and 2-level densities of the families
//! {φ×f : f ∈ H_k} and {φ×sym²f : f ∈ H_k} from the explicit formula.
//!
//! For one L-function the explicit formula reads
//! Σ_γ g(γ log R / 2π) = G − 2 Σ_p Σ_ν a(p^ν) log p / (p^{ν/2} log R) ĝ(ν log p / log R),
//! with G the gamma-factor term. Family averages weight f by
//! c_f = ζ(2) / (|H_k| L(1, sym²f)); W = Σ c_f is close to 1 only for large k.

use crate::error::{Error, Result};
use crate::gammafactors::{conductor_log, gamma_term_a, mu_params};
use crate::hecke::HeckeEigenform;
use crate::maass::{prime_power_table, MaassForm};
use crate::primes::{sieve_primes, support_limit};
use crate::rmt::{predicted_1level, predicted_2level, SymmetryGroup};
use crate::satake::{a_coeff_closed, FamilyTag};
use crate::testfns::{weighted_abs_integral, TestFunctionPair};
use std::collections::BTreeMap;
use std::fmt;

/// Kim–Sarnak exponent.
const THETA: f64 = 7.0 / 64.0;

/// PHI_X_SYM2F supports at or above this are flagged.
pub const SYM2_SUPPORT_THRESHOLD: f64 = 5.0 / 24.0;

/// Σ_p a(p^ν) log p / (p^{ν/2} log R) ĝ(ν log p / log R) split by ν.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct PrimeParts {
    nu1: f64,
    nu2: f64,
    higher: f64,
}

impl PrimeParts {
    fn total(&self) -> f64 {
        self.nu1 + self.nu2 + self.higher
    }
}

struct Setup<'a> {
    family: FamilyTag,
    k: u32,
    log_r: f64,
    primes: Vec<u64>,
    forms: &'a [HeckeEigenform],
    phi: &'a MaassForm,
    weights: Vec<f64>,
}

impl<'a> Setup<'a> {
    fn new(
        family: FamilyTag,
        forms: &'a [HeckeEigenform],
        phi: &'a MaassForm,
        support: f64,
    ) -> Result<Self> {
        if !family.involves_phi() {
            return Err(Error::Domain(format!("family {family} has no density report")));
        }
        let first = forms.first().ok_or_else(|| Error::EmptyDomain("no eigenforms".into()))?;
        let k = first.weight;
        if forms.iter().any(|f| f.weight != k) {
            return Err(Error::Domain("eigenforms of mixed weight".into()));
        }
        let log_r = conductor_log(family, k)?;
        let limit = support_limit(support, 1, log_r);
        let primes: Vec<u64> = sieve_primes(limit.max(2))?
            .iter()
            .filter(|&p| ((p as f64).ln()) < support * log_r)
            .collect();
        if let Some(&top) = primes.last() {
            if top > phi.limit {
                return Err(Error::MissingData(format!(
                    "λ_φ({top}) required, data stops at {}",
                    phi.limit
                )));
            }
            if let Some(f) = forms.iter().find(|f| (f.n_max() as u64) < top) {
                return Err(Error::MissingData(format!(
                    "λ_f({top}) required, weight {} form stored to {}",
                    k,
                    f.n_max()
                )));
            }
        }
        let h = forms.len() as f64;
        let weights = forms.iter().map(|f| f.harmonic_weight / h).collect();
        Ok(Setup {
            family,
            k,
            log_r,
            primes,
            forms,
            phi,
            weights,
        })
    }

    fn weight_total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// a_f(p^ν) for every ν with p^ν inside the support.
    fn coefficients(&self, f: &HeckeEigenform, p: u64, nu_max: u32) -> Result<Vec<f64>> {
        let lf = prime_power_table(f.lambda_at(p)?, 2 * nu_max);
        let lphi = prime_power_table(self.phi.lambda_p(p)?, nu_max);
        (1..=nu_max)
            .map(|nu| a_coeff_closed(self.family, &lf, &lphi, nu))
            .collect()
    }

    fn nu_max(&self, support: f64, p: u64) -> u32 {
        let lp = (p as f64).ln();
        ((support * self.log_r / lp).ceil() as u32).max(1)
    }

    fn parts(&self, f: &HeckeEigenform, g: &TestFunctionPair) -> Result<PrimeParts> {
        let mut out = PrimeParts::default();
        if g.is_zero() {
            return Ok(out);
        }
        for &p in &self.primes {
            let nu_max = self.nu_max(g.support(), p);
            let a = self.coefficients(f, p, nu_max)?;
            let lp = (p as f64).ln();
            for nu in 1..=nu_max {
                let h = g.ghat(nu as f64 * lp / self.log_r);
                if h == 0.0 {
                    continue;
                }
                let term = a[nu as usize - 1] * lp / ((p as f64).powf(nu as f64 / 2.0) * self.log_r) * h;
                match nu {
                    1 => out.nu1 += term,
                    2 => out.nu2 += term,
                    _ => out.higher += term,
                }
            }
        }
        Ok(out)
    }

    fn gamma(&self, g: &TestFunctionPair) -> Result<f64> {
        let params = mu_params(self.family, self.k, self.phi.t_phi)?;
        gamma_term_a(&params, g, self.log_r.exp())
    }

    /// Σ_p log p / (p log R) ĝ(2 log p / log R).
    fn square_prime_sum(&self, g: &TestFunctionPair, weight: impl Fn(u64) -> Result<f64>) -> Result<f64> {
        let mut s = 0.0;
        for &p in &self.primes {
            let lp = (p as f64).ln();
            let h = g.ghat(2.0 * lp / self.log_r);
            if h != 0.0 {
                s += weight(p)? * lp / (p as f64 * self.log_r) * h;
            }
        }
        Ok(s)
    }

    /// 2W Σ_p Σ_{ν≥3} d p^{ν(θ−½)} log p |ĝ(ν log p/log R)| / log R, from |a(p^ν)| ≤ d p^{νθ}.
    fn higher_bound(&self, g: &TestFunctionPair) -> f64 {
        let d = self.family.degree() as f64;
        let mut s = 0.0;
        for &p in &self.primes {
            let lp = (p as f64).ln();
            for nu in 3..=self.nu_max(g.support(), p) {
                let h = g.ghat(nu as f64 * lp / self.log_r).abs();
                s += d * (p as f64).powf(nu as f64 * (THETA - 0.5)) * lp * h;
            }
        }
        2.0 * self.weight_total() * s / self.log_r
    }
}

/// Mixed prime-sum products 4 Σ_f c_f P₁^(a) P₂^(b) in the 2-level density.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelTerms {
    pub total_d2: f64,
    /// W G₁G₂
    pub gamma_product: f64,
    /// −2G₁Σc_f P₂(f) − 2G₂Σc_f P₁(f)
    pub cross: f64,
    pub pair_11: f64,
    pub pair_12: f64,
    pub pair_21: f64,
    pub pair_22: f64,
    /// Products involving ν ≥ 3.
    pub pair_higher: f64,
    /// −2 D₁(g₁g₂)
    pub product_d1: f64,
    /// p₁ = p₂ part of the (1,1) term.
    pub diagonal_11: f64,
    /// 4 Σ_p log²p/(p log²R) ĝ₁ĝ₂(log p/log R), the "1" of 1 + λ_φ(p²).
    pub diagonal_11_unit: f64,
    /// 2 ∫ |u| ĝ₁ĝ₂.
    pub diagonal_11_target: f64,
    /// D₂ with each gamma term replaced by its limit and prime sums divided by W.
    pub calibrated: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    /// |G/W − ĝ(0)|
    pub gamma: f64,
    /// |2Σ_p log p/(p log R) ĝ(2 log p/log R) − g(0)/2|
    pub nu2_diagonal: f64,
    pub pair_diagonal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyDensityReport {
    pub family: FamilyTag,
    pub k: u32,
    pub r: f64,
    pub level: u8,
    pub sigmas: Vec<f64>,
    pub forms: usize,
    pub weight_total: f64,
    /// Weighted gamma term W·G (for level 2, of g₁).
    pub gamma_term: f64,
    pub nu1_term: f64,
    pub nu2_term: f64,
    /// Contribution −2·(constant part of a(p²)) to the total, ±W·Σ.
    pub nu2_diagonal: f64,
    pub nu2_offdiagonal: f64,
    pub lambda_phi_p2: f64,
    pub remainder: f64,
    pub nu_ge3_bound: f64,
    pub total_d1: f64,
    /// ĝ(0) + (D₁ − gamma_term)/W
    pub calibrated_d1: f64,
    pub two_level: Option<TwoLevelTerms>,
    pub predictions: BTreeMap<SymmetryGroup, f64>,
    pub residuals: Residuals,
    /// Support at or above the proven range.
    pub support_flag: bool,
}

impl FamilyDensityReport {
    /// The value compared against the predictions.
    pub fn statistic(&self) -> f64 {
        match &self.two_level {
            Some(t) => t.calibrated,
            None => self.calibrated_d1,
        }
    }
}

/// Σ_p λ_φ(p²) log p / (p log R) ĝ(2 log p / log R).
pub fn lambda_phi_p2_sum(phi: &MaassForm, f: &TestFunctionPair, r: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::Domain(format!("R = {r} must exceed 1")));
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    let log_r = r.ln();
    let limit = support_limit(f.support(), 2, log_r);
    let mut s = 0.0;
    for p in sieve_primes(limit.max(2))?.up_to(limit) {
        let lp = (*p as f64).ln();
        let h = f.ghat(2.0 * lp / log_r);
        if h != 0.0 {
            let l = phi.lambda_p(*p)?;
            s += (l * l - 1.0) * lp / (*p as f64 * log_r) * h;
        }
    }
    Ok(s)
}

struct OneLevel {
    gamma: f64,
    nu1: f64,
    nu2: f64,
    higher: f64,
    per_form: Vec<PrimeParts>,
}

fn one_level(s: &Setup, g: &TestFunctionPair) -> Result<OneLevel> {
    let w = s.weight_total();
    let gamma = if g.is_zero() { 0.0 } else { w * s.gamma(g)? };
    let per_form: Vec<PrimeParts> = s.forms.iter().map(|f| s.parts(f, g)).collect::<Result<_>>()?;
    let sum = |sel: fn(&PrimeParts) -> f64| -> f64 {
        per_form.iter().zip(&s.weights).map(|(p, c)| c * sel(p)).sum()
    };
    Ok(OneLevel {
        gamma,
        nu1: sum(|p| p.nu1),
        nu2: sum(|p| p.nu2),
        higher: sum(|p| p.higher),
        per_form,
    })
}

fn base_report(s: &Setup, g: &TestFunctionPair, level: u8, sigmas: Vec<f64>) -> Result<(FamilyDensityReport, OneLevel)> {
    let w = s.weight_total();
    let one = one_level(s, g)?;
    let p = 2.0 * s.square_prime_sum(g, |_| Ok(1.0))?;
    let sign = if s.family == FamilyTag::PhiXSym2F { 1.0 } else { -1.0 };
    let nu2_diagonal = sign * w * p;
    let remainder = -2.0 * one.higher;
    let total = one.gamma - 2.0 * (one.nu1 + one.nu2) + remainder;
    let calibrated = if g.is_zero() { 0.0 } else { g.ghat0() + (total - one.gamma) / w };
    let gamma_res = if g.is_zero() { 0.0 } else { (one.gamma / w - g.ghat0()).abs() };
    let mut predictions = BTreeMap::new();
    if level == 1 {
        for grp in SymmetryGroup::ALL {
            predictions.insert(grp, predicted_1level(grp, g)?);
        }
    }
    let support_flag = s.family == FamilyTag::PhiXSym2F
        && sigmas.iter().any(|&x| x >= SYM2_SUPPORT_THRESHOLD);
    let report = FamilyDensityReport {
        family: s.family,
        k: s.k,
        r: s.log_r.exp(),
        level,
        sigmas,
        forms: s.forms.len(),
        weight_total: w,
        gamma_term: one.gamma,
        nu1_term: one.nu1,
        nu2_term: one.nu2,
        nu2_diagonal,
        nu2_offdiagonal: -2.0 * one.nu2 - nu2_diagonal,
        lambda_phi_p2: s.square_prime_sum(g, |q| {
            let l = s.phi.lambda_p(q)?;
            Ok(l * l - 1.0)
        })?,
        remainder,
        nu_ge3_bound: s.higher_bound(g),
        total_d1: total,
        calibrated_d1: calibrated,
        two_level: None,
        predictions,
        residuals: Residuals {
            gamma: gamma_res,
            nu2_diagonal: if g.is_zero() { 0.0 } else { (p - 0.5 * g.g0()).abs() },
            pair_diagonal: None,
        },
        support_flag,
    };
    Ok((report, one))
}

/// Weighted 1-level density of the family with weight-k forms `forms`.
pub fn d1_family(
    family: FamilyTag,
    forms: &[HeckeEigenform],
    g: &TestFunctionPair,
    phi: &MaassForm,
) -> Result<FamilyDensityReport> {
    let s = Setup::new(family, forms, phi, g.support())?;
    Ok(base_report(&s, g, 1, vec![g.support()])?.0)
}

/// Weighted 2-level density D₂ = Σ_f c_f [S₁(f)S₂(f) − 2 S₁₂(f)], where
/// S(f) = G − 2P(f) is the explicit formula and S₁₂ uses g₁g₂.
pub fn d2_family(
    family: FamilyTag,
    forms: &[HeckeEigenform],
    g1: &TestFunctionPair,
    g2: &TestFunctionPair,
    phi: &MaassForm,
) -> Result<FamilyDensityReport> {
    if family != FamilyTag::PhiXSym2F {
        return Err(Error::Domain(format!("2-level density is only set up for phi-sym2f, not {family}")));
    }
    if g1.support() + g2.support() >= 1.0 {
        return Err(Error::Domain("σ₁ + σ₂ must be below 1".into()));
    }
    let g12 = g1.product(g2)?;
    let s = Setup::new(family, forms, phi, g12.support())?;
    let (mut report, one1) = base_report(&s, g1, 2, vec![g1.support(), g2.support()])?;
    let one2 = if g1 == g2 { None } else { Some(one_level(&s, g2)?) };
    let one2 = one2.as_ref().unwrap_or(&one1);
    let one12 = one_level(&s, &g12)?;
    let w = s.weight_total();
    let (gm1, gm2) = (one1.gamma / w, one2.gamma / w);
    let d1_12 = one12.gamma - 2.0 * one12.per_form.iter().zip(&s.weights).map(|(p, c)| c * p.total()).sum::<f64>();

    let mut pairs = [[0.0; 2]; 2];
    let mut higher = 0.0;
    let mut cross = 0.0;
    let mut total = 0.0;
    let mut cal_pairs = 0.0;
    let mut cal_cross = 0.0;
    for (i, c) in s.weights.iter().enumerate() {
        let a = &one1.per_form[i];
        let b = &one2.per_form[i];
        let av = [a.nu1, a.nu2];
        let bv = [b.nu1, b.nu2];
        let mut low = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                pairs[x][y] += 4.0 * c * av[x] * bv[y];
                low += av[x] * bv[y];
            }
        }
        higher += 4.0 * c * (a.total() * b.total() - low);
        cross += c * (-2.0 * gm1 * b.total() - 2.0 * gm2 * a.total());
        let s1 = gm1 - 2.0 * a.total();
        let s2 = gm2 - 2.0 * b.total();
        let s12 = one12.gamma / w - 2.0 * one12.per_form[i].total();
        total += c * (s1 * s2 - 2.0 * s12);
        cal_pairs += c * 4.0 * a.total() * b.total();
        cal_cross += c * (-2.0 * g1.ghat0() * b.total() - 2.0 * g2.ghat0() * a.total());
    }
    let cal_d1_12 = g12.ghat0() - 2.0 * one12.per_form.iter().zip(&s.weights).map(|(p, c)| c * p.total()).sum::<f64>() / w;
    let calibrated = g1.ghat0() * g2.ghat0() + (cal_cross + cal_pairs) / w - 2.0 * cal_d1_12;

    let mut diagonal = 0.0;
    let mut unit = 0.0;
    for &p in &s.primes {
        let lp = (p as f64).ln();
        let u = lp / s.log_r;
        let h = g1.ghat(u) * g2.ghat(u);
        if h == 0.0 {
            continue;
        }
        let base = 4.0 * lp * lp / (p as f64 * s.log_r * s.log_r) * h;
        unit += base;
        for (f, c) in s.forms.iter().zip(&s.weights) {
            let a = s.coefficients(f, p, 1)?[0];
            diagonal += c * a * a * base;
        }
    }
    let target = 2.0 * weighted_abs_integral(g1, g2)?;

    let mut predictions = BTreeMap::new();
    for grp in SymmetryGroup::ORTHOGONAL {
        predictions.insert(grp, predicted_2level(grp, g1, g2)?);
    }
    report.predictions = predictions;
    report.residuals.pair_diagonal = Some((unit - target).abs());
    report.two_level = Some(TwoLevelTerms {
        total_d2: total,
        gamma_product: w * gm1 * gm2,
        cross,
        pair_11: pairs[0][0],
        pair_12: pairs[0][1],
        pair_21: pairs[1][0],
        pair_22: pairs[1][1],
        pair_higher: higher,
        product_d1: -2.0 * d1_12,
        diagonal_11: diagonal,
        diagonal_11_unit: unit,
        diagonal_11_target: target,
        calibrated,
    });
    Ok(report)
}

/// Groups whose prediction is nearest the report's statistic. Several
/// groups are returned when their predictions coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub groups: Vec<SymmetryGroup>,
    /// Distance to the nearest prediction outside `groups` minus the best distance.
    pub margin: f64,
    pub distances: Vec<(SymmetryGroup, f64)>,
}

impl Verdict {
    pub fn is_orthogonal_tie(&self) -> bool {
        self.groups.len() == 3 && self.groups.iter().all(|g| g.is_orthogonal())
    }

    /// Groups ranked by distance.
    pub fn ranking(&self) -> Vec<SymmetryGroup> {
        let mut d = self.distances.clone();
        d.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        d.into_iter().map(|x| x.0).collect()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_orthogonal_tie() {
            f.write_str("orthogonal-tie")
        } else {
            let names: Vec<&str> = self.groups.iter().map(|g| g.name()).collect();
            f.write_str(&names.join("|"))
        }
    }
}

const TIE: f64 = 1e-12;

pub fn classify_symmetry(report: &FamilyDensityReport) -> Result<Verdict> {
    if report.predictions.is_empty() {
        return Err(Error::EmptyDomain("report has no predictions".into()));
    }
    let x = report.statistic();
    let distances: Vec<(SymmetryGroup, f64)> =
        report.predictions.iter().map(|(g, v)| (*g, (x - v).abs())).collect();
    let (best, best_d) = distances
        .iter()
        .copied()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    let best_pred = report.predictions[&best];
    let groups: Vec<SymmetryGroup> = report
        .predictions
        .iter()
        .filter(|(_, v)| (**v - best_pred).abs() <= TIE)
        .map(|(g, _)| *g)
        .collect();
    let margin = distances
        .iter()
        .filter(|(g, _)| !groups.contains(g))
        .map(|(_, d)| d - best_d)
        .fold(f64::INFINITY, f64::min);
    Ok(Verdict {
        groups,
        margin,
        distances,
    })
}

/// Literal Σ_{j₁ ≠ ±j₂} g₁(x_{j₁}) g₂(x_{j₂}) over zeros given as the
/// nonnegative members of ± pairs; `central` zeros at 0 pair with themselves.
pub fn pair_sum_literal(
    pairs: &[f64],
    central: usize,
    g1: &dyn Fn(f64) -> f64,
    g2: &dyn Fn(f64) -> f64,
) -> f64 {
    let mut pts: Vec<(f64, usize)> = Vec::new();
    for _ in 0..central {
        let id = pts.len();
        pts.push((0.0, id));
    }
    for &x in pairs {
        let id = pts.len();
        pts.push((x, id));
        pts.push((-x, id));
    }
    let mut s = 0.0;
    for (i, &(x, a)) in pts.iter().enumerate() {
        for (j, &(y, b)) in pts.iter().enumerate() {
            if i != j && a != b {
                s += g1(x) * g2(y);
            }
        }
    }
    s
}

/// The same pair sum as S₁S₂ − 2Σ g₁g₂ + (central zeros) g₁g₂(0).
pub fn pair_sum_rearranged(
    pairs: &[f64],
    central: usize,
    g1: &dyn Fn(f64) -> f64,
    g2: &dyn Fn(f64) -> f64,
) -> f64 {
    let c = central as f64;
    let s1: f64 = c * g1(0.0) + pairs.iter().map(|&x| g1(x) + g1(-x)).sum::<f64>();
    let s2: f64 = c * g2(0.0) + pairs.iter().map(|&x| g2(x) + g2(-x)).sum::<f64>();
    let s12: f64 = c * g1(0.0) * g2(0.0) + pairs.iter().map(|&x| g1(x) * g2(x) + g1(-x) * g2(-x)).sum::<f64>();
    s1 * s2 - 2.0 * s12 + c * g1(0.0) * g2(0.0)
}
