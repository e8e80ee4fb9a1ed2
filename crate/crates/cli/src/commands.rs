use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, Table};
use lowlying::density::{classify_symmetry, d1_family, d2_family, FamilyDensityReport};
use lowlying::gammafactors::{gamma_term_a, mu_params, root_number, weil_rep};
use lowlying::hecke::{
    build_space, build_spaces, eigenforms, exact_coefficient, multiplicativity_residual, petersson_delta,
    read_cache, HeckeEigenform,
};
use lowlying::maass::{data_dir, load_bundled, load_maass, prime_power_table, synthetic_maass, MaassForm};
use lowlying::primes::residual_sweep;
use lowlying::rmt::{empirical_batch, predicted_1level, predicted_2level, sample_haar, Statistic};
use lowlying::satake::{a_coeff_closed, a_coeff_powersum, local_params, FamilyTag};
use lowlying::testfns::TestFunctionPair;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

/// Spectral parameter of the bundled form, used for synthetic coefficients.
const SYNTHETIC_T: f64 = 13.7797513519;
const SYNTHETIC_P_MAX: u64 = 10_000;
const PHI_FAMILIES: [FamilyTag; 2] = [FamilyTag::PhiXSym2F, FamilyTag::PhiXF];

pub fn dispatch(cfg: &mut RunConfig) -> Result<(), CliError> {
    let table = match cfg.command.as_str() {
        "rmt" => cmd_rmt(cfg)?,
        "family" => cmd_family(cfg)?,
        "checks" => {
            let (table, failed) = cmd_checks(cfg)?;
            table.emit(cfg)?;
            return if failed == 0 { Ok(()) } else { Err(CliError::Checks(failed)) };
        }
        "prime-sums" => cmd_prime_sums(cfg)?,
        "gamma" => cmd_gamma(cfg)?,
        "root-number" => cmd_root_number(cfg)?,
        other => return Err(CliError::Usage(format!("unknown command `{other}`"))),
    };
    table.emit(cfg)
}

fn fejer(sigma: f64) -> Result<TestFunctionPair, CliError> {
    Ok(TestFunctionPair::fejer(sigma)?)
}

fn families(cfg: &RunConfig) -> Vec<FamilyTag> {
    match cfg.family {
        Some(f) => vec![f],
        None => PHI_FAMILIES.to_vec(),
    }
}

fn weights_or(cfg: &mut RunConfig, default: &[u32]) -> Vec<u32> {
    if cfg.weights.is_empty() {
        cfg.weights = default.to_vec();
    }
    cfg.weights.clone()
}

/// A relative path that does not exist is looked up in the data directory,
/// first as given and then by file name.
pub fn resolve_data_path(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    let dir = data_dir();
    let joined = dir.join(path);
    if joined.exists() {
        return joined;
    }
    match path.file_name() {
        Some(name) if dir.join(name).exists() => dir.join(name),
        _ => path.to_path_buf(),
    }
}

fn maass_form(cfg: &RunConfig) -> Result<MaassForm, CliError> {
    let phi = match (&cfg.maass, cfg.synthetic_seed) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("give either --maass or --synthetic-seed, not both".into()))
        }
        (Some(p), None) => load_maass(resolve_data_path(p))?,
        (None, Some(seed)) => {
            eprintln!("note: synthetic λ_φ(p) from seed {seed}; not an automorphic form");
            synthetic_maass(seed, SYNTHETIC_P_MAX, SYNTHETIC_T)?
        }
        (None, None) => load_bundled()?,
    };
    for w in &phi.warnings {
        eprintln!("warning: {w}");
    }
    Ok(phi)
}

fn forms_by_weight(weights: &[u32], euler: u64) -> Result<BTreeMap<u32, Vec<HeckeEigenform>>, CliError> {
    let spaces = build_spaces(weights, euler as usize)?;
    let mut out = BTreeMap::new();
    for s in &spaces {
        out.insert(s.weight, eigenforms(s, euler as usize)?);
    }
    Ok(out)
}

pub fn cmd_rmt(cfg: &mut RunConfig) -> Result<Table, CliError> {
    if cfg.groups.is_empty() {
        return Err(CliError::Usage("rmt needs --group".into()));
    }
    let n = *cfg.n.get_or_insert(40);
    let samples = *cfg.samples.get_or_insert(1000);
    let sigma = *cfg.sigma.get_or_insert(0.5);
    let sigma2 = *cfg.sigma2.get_or_insert(0.25);
    let seed = *cfg.seed.get_or_insert(1);
    let one = fejer(sigma)?;
    let two = fejer(sigma2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = if cfg.per_sample {
        Table::new(&["group", "N", "sample_index", "statistic", "value"])
    } else {
        Table::new(&["group", "N", "samples", "statistic", "empirical", "predicted", "stderr"])
    };
    for &g in &cfg.groups {
        let mut stats = vec![Statistic::OneLevel(one.clone())];
        let mut preds = vec![predicted_1level(g, &one)?];
        if g.is_orthogonal() {
            stats.push(Statistic::TwoLevel(two.clone(), two.clone()));
            preds.push(predicted_2level(g, &two, &two)?);
        }
        if cfg.per_sample {
            for i in 0..samples {
                let s = sample_haar(g, n, &mut rng)?;
                for st in &stats {
                    table.push(vec![g.to_string(), n.to_string(), i.to_string(), st.name().into(), num(st.evaluate(&s))]);
                }
            }
            continue;
        }
        let est = empirical_batch(g, n, samples, &stats, &mut rng)?;
        for ((st, e), p) in stats.iter().zip(&est).zip(&preds) {
            table.push(vec![
                g.to_string(),
                n.to_string(),
                samples.to_string(),
                st.name().into(),
                num(e.mean),
                num(*p),
                num(e.stderr),
            ]);
        }
    }
    Ok(table)
}

fn report_rows(rep: &FamilyDensityReport, sigma: f64, verdict: &str, table: &mut Table) {
    let fam = rep.family.to_string();
    let k = rep.k.to_string();
    let level = rep.level.to_string();
    let mut row = |term: &str, value: f64, bound: Option<f64>| {
        table.push(vec![
            fam.clone(),
            k.clone(),
            num(sigma),
            level.clone(),
            term.to_string(),
            num(value),
            bound.map(num).unwrap_or_default(),
            verdict.to_string(),
        ]);
    };
    row("forms", rep.forms as f64, None);
    row("log_R", rep.r.ln(), None);
    row("weight_total", rep.weight_total, None);
    row("gamma_term", rep.gamma_term, Some(rep.residuals.gamma));
    row("nu1_term", rep.nu1_term, None);
    row("nu2_term", rep.nu2_term, None);
    row("nu2_diagonal", rep.nu2_diagonal, Some(rep.residuals.nu2_diagonal));
    row("nu2_offdiagonal", rep.nu2_offdiagonal, None);
    row("lambda_phi_p2", rep.lambda_phi_p2, None);
    row("remainder", rep.remainder, Some(rep.nu_ge3_bound));
    row("total_d1", rep.total_d1, None);
    row("calibrated_d1", rep.calibrated_d1, None);
    if let Some(t) = &rep.two_level {
        row("gamma_product", t.gamma_product, None);
        row("cross", t.cross, None);
        row("pair_11", t.pair_11, None);
        row("pair_12", t.pair_12, None);
        row("pair_21", t.pair_21, None);
        row("pair_22", t.pair_22, None);
        row("pair_higher", t.pair_higher, None);
        row("product_d1", t.product_d1, None);
        row("diagonal_11", t.diagonal_11, rep.residuals.pair_diagonal);
        row("total_d2", t.total_d2, None);
        row("calibrated_d2", t.calibrated, None);
    }
    row("support_flag", if rep.support_flag { 1.0 } else { 0.0 }, None);
    for (g, v) in &rep.predictions {
        row(&format!("predicted_{g}"), *v, Some((rep.statistic() - v).abs()));
    }
}

pub fn cmd_family(cfg: &mut RunConfig) -> Result<Table, CliError> {
    let family = cfg.family.ok_or_else(|| CliError::Usage("family needs --tag".into()))?;
    let weights = weights_or(cfg, &[12]);
    let sigma = *cfg.sigma.get_or_insert(0.125);
    let euler = *cfg.euler.get_or_insert(2500);
    let g1 = fejer(sigma)?;
    let g2 = if cfg.two_level {
        Some(fejer(*cfg.sigma2.get_or_insert(sigma))?)
    } else {
        None
    };
    let phi = maass_form(cfg)?;
    let forms = forms_by_weight(&weights, euler)?;
    let mut table = Table::new(&["family", "k", "sigma", "level", "term", "value", "residual_bound", "verdict"]);
    for k in &weights {
        let fs = &forms[k];
        let rep = match &g2 {
            Some(g2) => d2_family(family, fs, &g1, g2, &phi)?,
            None => d1_family(family, fs, &g1, &phi)?,
        };
        if rep.support_flag {
            eprintln!("warning: k = {k}: support σ = {sigma} is outside the proven range");
        }
        let verdict = classify_symmetry(&rep)?.to_string();
        report_rows(&rep, sigma, &verdict, &mut table);
    }
    Ok(table)
}

struct CheckTable {
    table: Table,
    failed: usize,
}

impl CheckTable {
    fn add(&mut self, check: &str, status: Status, value: f64, tolerance: f64, detail: String) {
        if status == Status::Fail {
            self.failed += 1;
        }
        self.table.push(vec![check.into(), status.as_str().into(), num(value), num(tolerance), detail]);
    }

    fn bound(&mut self, check: &str, value: f64, tolerance: f64, detail: String) {
        let s = if value <= tolerance { Status::Pass } else { Status::Fail };
        self.add(check, s, value, tolerance, detail);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Pass,
    Fail,
    /// Reported for reference; known not to hold at these weights.
    Info,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

fn satake_two_routes(seed: u64) -> Result<f64, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes = [2u64, 3, 5, 7, 11, 13, 97];
    let mut worst = 0.0f64;
    for draw in 0..200 {
        let p = primes[draw % primes.len()];
        let alpha = Complex64::from_polar(1.0, rng.random_range(0.0..PI));
        let beta = if draw % 2 == 0 {
            Complex64::from_polar(1.0, rng.random_range(0.0..PI))
        } else {
            let top = (p as f64).powf(7.0 / 64.0);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            Complex64::new(sign * rng.random_range(1.0..top), 0.0)
        };
        let lf = prime_power_table(2.0 * alpha.re, 6);
        let lphi = prime_power_table((beta + beta.inv()).re, 3);
        for fam in FamilyTag::ALL {
            let lp = local_params(fam, alpha, beta, p)?;
            for nu in 1..=3 {
                worst = worst.max((a_coeff_powersum(&lp, nu)? - a_coeff_closed(fam, &lf, &lphi, nu)?).abs());
            }
        }
    }
    Ok(worst)
}

/// Σ_f c_f |λ_f(4)| · drift_f: the error in Δ(1, 4) from truncating L(1, sym²f).
fn petersson_floor(forms: &[HeckeEigenform]) -> Result<f64, CliError> {
    let mut s = 0.0;
    for f in forms {
        s += f.harmonic_weight * f.lambda_at(4)?.abs() * f.l1_sym2.drift;
    }
    Ok(s / forms.len() as f64)
}

fn hecke_cache_check(path: &Path, forms: &BTreeMap<u32, Vec<HeckeEigenform>>, euler: u64, out: &mut CheckTable) -> Result<(), CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let cached = read_cache(std::io::BufReader::new(file))?;
    let mut extra = BTreeMap::new();
    let missing: Vec<u32> = cached.iter().map(|c| c.weight).filter(|k| !forms.contains_key(k)).collect();
    if !missing.is_empty() {
        extra = forms_by_weight(&missing, euler)?;
    }
    let mut worst = 0.0f64;
    let mut mismatched = Vec::new();
    for c in &cached {
        let fs = forms.get(&c.weight).or_else(|| extra.get(&c.weight)).map(Vec::as_slice).unwrap_or(&[]);
        if fs.len() != c.dimension {
            mismatched.push(format!("k={} dimension {} vs {}", c.weight, c.dimension, fs.len()));
            continue;
        }
        // eigenforms are matched by λ(2), which separates them at level 1
        let Some(&(_, l2)) = c.lambda_p.iter().find(|(p, _)| *p == 2) else {
            mismatched.push(format!("k={} form {} has no λ(2)", c.weight, c.index));
            continue;
        };
        let f = fs
            .iter()
            .min_by(|a, b| {
                let da = (a.lambda[2] - l2).abs();
                let db = (b.lambda[2] - l2).abs();
                da.partial_cmp(&db).unwrap()
            })
            .expect("nonempty");
        for &(p, l) in &c.lambda_p {
            let fresh = f.lambda_at(p).map_err(|_| {
                CliError::Data(format!("cache has p = {p} beyond the computed range; raise --euler"))
            })?;
            worst = worst.max((fresh - l).abs());
        }
    }
    let detail = if mismatched.is_empty() {
        format!("{} cached forms", cached.len())
    } else {
        format!("mismatched: {}", mismatched.join("; "))
    };
    let value = if mismatched.is_empty() { worst } else { f64::INFINITY };
    out.bound("hecke-cache", value, 1e-9, detail);
    Ok(())
}

pub fn cmd_checks(cfg: &mut RunConfig) -> Result<(Table, usize), CliError> {
    let weights = weights_or(cfg, &default_check_weights());
    let euler = *cfg.euler.get_or_insert(2500);
    let seed = *cfg.seed.get_or_insert(20);
    let mut out = CheckTable {
        table: Table::new(&["check", "status", "value", "tolerance", "detail"]),
        failed: 0,
    };

    out.bound("satake-two-routes", satake_two_routes(seed)?, 1e-10, "200 draws, 4 families, ν ≤ 3".into());

    let tau2 = exact_coefficient(&build_space(12, 10)?, 2)?;
    let s = if tau2 == (-24).into() { Status::Pass } else { Status::Fail };
    out.add("tau-2", s, tau2.to_string().parse().unwrap_or(f64::NAN), 0.0, "τ(2) = −24".into());

    let forms = forms_by_weight(&weights, euler)?;
    for (k, fs) in forms.iter().filter(|(_, fs)| !fs.is_empty()) {
        let mut worst = 0.0f64;
        for f in fs {
            worst = worst.max(multiplicativity_residual(f, 50)?);
            for p in [2u64, 3, 5, 7] {
                let l = f.lambda_at(p)?;
                worst = worst.max((l * l - f.lambda_at(p * p)? - 1.0).abs());
            }
        }
        out.bound("hecke-multiplicativity", worst, 1e-10, format!("k={k}, {} forms, m,n ≤ 50", fs.len()));
    }

    for (k, fs) in &forms {
        let Some(gs) = forms.get(&(k + 16)) else { continue };
        if *k < 16 || fs.is_empty() || gs.is_empty() {
            continue;
        }
        let da = petersson_delta(fs, 1, 4)?.abs();
        let db = petersson_delta(gs, 1, 4)?.abs();
        let floor = petersson_floor(fs)?;
        let detail = format!("|Δ_{k}(1,4)| = {da:.3e} → |Δ_{}(1,4)| = {db:.3e}, noise floor {floor:.1e}", k + 16);
        if da <= floor {
            out.add("petersson-decay-p2", Status::Info, da / db, 4.0, format!("{detail}; below floor"));
        } else {
            let s = if da >= 4.0 * db { Status::Pass } else { Status::Fail };
            out.add("petersson-decay-p2", s, da / db, 4.0, detail);
        }
    }

    let phi = maass_form(cfg)?;
    let g = fejer(0.5)?;
    for fam in PHI_FAMILIES {
        for k in [12u32, 50, 200, 800] {
            let ratio = gamma_term_a(&mu_params(fam, k, phi.t_phi)?, &g, (k as f64).powi(4))? / g.ghat0();
            let tol = 1.5 / (k as f64).ln();
            let dev = (ratio - 1.0).abs();
            let detail = format!("{fam} k={k}: gamma term / ĝ(0) = {ratio:.4}");
            if fam == FamilyTag::PhiXSym2F {
                out.bound("gamma-asymptotic", dev, tol, detail);
            } else {
                // the half-integral shifts (k±1)/2 converge too slowly for this bound
                out.add("gamma-asymptotic", Status::Info, dev, tol, detail);
            }
        }
    }

    let mut bad = Vec::new();
    for fam in PHI_FAMILIES {
        for k in (12..=400).step_by(2) {
            if root_number(fam, k)? != 1 || !weil_rep(fam, k, phi.t_phi)?.is_self_dual() {
                bad.push(format!("{fam} k={k}"));
            }
        }
    }
    let (s, exceptions) = if bad.is_empty() { (Status::Pass, "none".to_string()) } else { (Status::Fail, bad.join(" ")) };
    out.add("root-number", s, bad.len() as f64, 0.0, format!("ε = +1 and self-dual for k ∈ [12, 400]; exceptions: {exceptions}"));

    out.bound(
        "maass-bounds",
        phi.warnings.len() as f64,
        0.0,
        format!("|λ_φ(p)| ≤ 2p^(7/64) for p ≤ {}", phi.limit),
    );

    if let Some(path) = cfg.hecke_cache.clone() {
        hecke_cache_check(&resolve_data_path(&path), &forms, euler, &mut out)?;
    }
    let failed = out.failed;
    Ok((out.table, failed))
}

fn default_check_weights() -> Vec<u32> {
    (12..=48).step_by(2).collect()
}

pub fn cmd_prime_sums(cfg: &mut RunConfig) -> Result<Table, CliError> {
    let sigma = *cfg.sigma.get_or_insert(0.5);
    if cfg.r_values.is_empty() {
        cfg.r_values = vec![1e3, 1e4, 1e5, 1e6];
    }
    let g = fejer(sigma)?;
    let mut table = Table::new(&[
        "sigma", "R", "linear", "linear_residual", "quadratic", "quadratic_residual", "bound",
    ]);
    for row in residual_sweep(&g, &cfg.r_values)? {
        table.push(vec![
            num(sigma),
            num(row.r),
            num(row.linear),
            num(row.linear_residual),
            num(row.quadratic),
            num(row.quadratic_residual),
            num(2.0 / row.r.ln()),
        ]);
    }
    Ok(table)
}

pub fn cmd_gamma(cfg: &mut RunConfig) -> Result<Table, CliError> {
    let weights = weights_or(cfg, &[12, 50, 200, 800]);
    let sigma = *cfg.sigma.get_or_insert(0.5);
    let g = fejer(sigma)?;
    let phi = maass_form(cfg)?;
    let mut table = Table::new(&["family", "k", "sigma", "log_R", "gamma_term", "ghat0", "ratio", "bound", "within"]);
    for fam in families(cfg) {
        for &k in &weights {
            let r = (k as f64).powi(4);
            let a = gamma_term_a(&mu_params(fam, k, phi.t_phi)?, &g, r)?;
            let ratio = a / g.ghat0();
            let bound = 1.5 / (k as f64).ln();
            table.push(vec![
                fam.to_string(),
                k.to_string(),
                num(sigma),
                num(r.ln()),
                num(a),
                num(g.ghat0()),
                num(ratio),
                num(bound),
                ((ratio - 1.0).abs() <= bound).to_string(),
            ]);
        }
    }
    Ok(table)
}

pub fn cmd_root_number(cfg: &mut RunConfig) -> Result<Table, CliError> {
    let weights = weights_or(cfg, &default_check_weights());
    let mut table = Table::new(&["family", "k", "root_number", "self_dual"]);
    for fam in families(cfg) {
        for &k in &weights {
            let rep = weil_rep(fam, k, SYNTHETIC_T)?;
            table.push(vec![
                fam.to_string(),
                k.to_string(),
                root_number(fam, k)?.to_string(),
                rep.is_self_dual().to_string(),
            ]);
        }
    }
    Ok(table)
}
