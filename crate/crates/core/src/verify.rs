//! The acceptance checks, each reporting measured values against pinned
//! tolerances.
//!
//! Rows with `passed: None` are informational: they document a value without
//! asserting anything about it.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{
    ch_delta_bounds, ch_parity_formalism, ch_qubit, chi_joint_ecs, chi_joint_tmss, chsh_gisin_peres,
    chsh_pseudospin, k_of_gamma, printed, pseudospin_correlation_ecs, truncate_to, BellFunctional, BellSettings,
    DisplacementDomain, Formalism, FunctionalOptions, StateModel, CH_LOWER_BOUND, CH_UPPER_BOUND,
    CIRELSON_BOUND,
};
use crate::error::Result;
use crate::fock::{make_ecs, make_tmss, CMatrix, DisplacementBasis, FockCutoff, FockOperator, TwoModeState};
use crate::observables::{
    bw_ch_projector, bw_parity, ch_projector, chi_projector, gisin_peres, parity, parity_expectation_series,
    parity_rotation_fidelity, pseudospin, DisplacementSetting, GammaZ, LaguerreSeries, NumberStateParity,
    ProjectorSetting, PseudospinSetting,
};
use crate::optimize::{optimize_point, Direction, OptimizeSpec, Optimum};
use crate::phase_space::{q_ecs, q_tmss, q_two_mode, wigner_ecs, wigner_tmss, PhasePoint, WignerOracle};

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_RESTARTS: usize = 32;

/// Pinned tolerances.
pub mod tol {
    pub const GBW_LIMIT: f64 = 1e-3;
    pub const QUOTED_LOCATION: f64 = 1e-4;
    pub const ECS_CLOSED_FORM: f64 = 1e-5;
    pub const FIDELITY: f64 = 1e-8;
    pub const CH_BOUND: f64 = 1e-9;
    pub const CH_QUOTED: f64 = 1e-9;
    pub const PARITY_QUOTED: f64 = 0.01;
    pub const WIGNER_ORACLE: f64 = 1e-6;
    pub const Q_ORACLE: f64 = 1e-8;
    pub const CORRELATION_ORACLE: f64 = 1e-8;
    pub const OPERATOR: f64 = 1e-10;
    pub const CIRELSON: f64 = 1e-9;
    pub const NOT_FLIPPABLE: f64 = 1e-3;
    pub const GP_LIMIT: f64 = 1e-12;
}

/// Acceptance check identifiers, in report order.
pub const CHECK_IDS: [u8; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub restarts: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: DEFAULT_SEED,
            restarts: DEFAULT_RESTARTS,
        }
    }
}

/// One measured quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub label: String,
    pub measured: f64,
    pub expected: String,
    pub passed: Option<bool>,
}

impl Item {
    fn at_least(label: impl Into<String>, measured: f64, lo: f64) -> Self {
        Item {
            label: label.into(),
            measured,
            expected: format!(">= {}", num(lo)),
            passed: Some(measured >= lo),
        }
    }

    fn at_most(label: impl Into<String>, measured: f64, hi: f64) -> Self {
        Item {
            label: label.into(),
            measured,
            expected: format!("<= {}", num(hi)),
            passed: Some(measured <= hi),
        }
    }

    fn in_range(label: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        Item {
            label: label.into(),
            measured,
            expected: format!("in [{}, {}]", num(lo), num(hi)),
            passed: Some(measured >= lo && measured <= hi),
        }
    }

    fn within(label: impl Into<String>, measured: f64, target: f64, tol: f64) -> Self {
        Item {
            label: label.into(),
            measured,
            expected: format!("{} +- {}", num(target), num(tol)),
            passed: Some((measured - target).abs() <= tol),
        }
    }

    fn info(label: impl Into<String>, measured: f64, note: impl Into<String>) -> Self {
        Item {
            label: label.into(),
            measured,
            expected: note.into(),
            passed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: u8,
    pub title: String,
    pub items: Vec<Item>,
}

impl Check {
    fn new(id: u8, title: &str, items: Vec<Item>) -> Self {
        Check {
            id,
            title: title.to_string(),
            items,
        }
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed != Some(false))
    }

    /// Asserted items that failed.
    pub fn failures(&self) -> impl Iterator<Item = &Item> {
        self.items.iter().filter(|i| i.passed == Some(false))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub options: VerifyOptions,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// Plain-text table: one status line per check followed by its items.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "{} {:>2}  {}", status(Some(c.passed())), c.id, c.title);
            for i in &c.items {
                let _ = writeln!(
                    out,
                    "        {}  {:<46} {:>22}  {}",
                    status(i.passed),
                    i.label,
                    num(i.measured),
                    i.expected
                );
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        out
    }
}

fn status(p: Option<bool>) -> &'static str {
    match p {
        Some(true) => "PASS",
        Some(false) => "FAIL",
        None => "INFO",
    }
}

fn num(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e6) {
        format!("{x:.3e}")
    } else {
        format!("{x:.10}")
    }
}

/// Runs every check.
pub fn run(opts: &VerifyOptions) -> Result<Report> {
    let checks = CHECK_IDS
        .iter()
        .map(|&id| check(id, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        options: *opts,
        checks,
    })
}

/// Runs one check by its number.
pub fn check(id: u8, opts: &VerifyOptions) -> Result<Check> {
    match id {
        1 => gbw_tmss_limit(opts),
        2 => gbw_tmss_quoted_location(opts),
        3 => pseudospin_tmss(opts),
        4 => pseudospin_ecs(opts),
        5 => fidelity_identity(),
        6 => gbw_ecs(opts),
        7 => ch_universal_bounds(opts),
        8 => ch_q_ecs(opts),
        9 => ch_parity_quoted(),
        10 => oracle_equivalence(opts),
        11 => property_suite(opts),
        12 => determinism(opts),
        _ => Err(crate::error::invalid("check", id as f64, "checks are numbered 1 to 12")),
    }
}

fn best(model: StateModel, formalism: Formalism, options: FunctionalOptions, opts: &VerifyOptions) -> Result<Optimum> {
    let f = BellFunctional::new(model, formalism, options)?;
    let spec = OptimizeSpec::new(Direction::default_for(formalism, Some(model)))
        .with_restarts(opts.restarts)
        .with_seed(opts.seed);
    optimize_point(&f, &spec)
}

fn best_value(model: StateModel, formalism: Formalism, opts: &VerifyOptions) -> Result<f64> {
    Ok(best(model, formalism, FunctionalOptions::default(), opts)?.result.value)
}

fn smallest_step(v: &[f64]) -> f64 {
    v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

pub fn gbw_limit() -> f64 {
    8.0 / 3f64.powf(9.0 / 8.0)
}

fn gbw_tmss_limit(opts: &VerifyOptions) -> Result<Check> {
    let rs = [1.0, 2.0, 5.0];
    let v = rs
        .iter()
        .map(|&r| best_value(StateModel::Tmss { r }, Formalism::Gbw, opts))
        .collect::<Result<Vec<_>>>()?;
    let limit = gbw_limit();
    let mut items: Vec<Item> = rs
        .iter()
        .zip(&v)
        .map(|(r, b)| Item::info(format!("|B_gbw| at r={r}"), *b, "optimized"))
        .collect();
    items.push(Item::in_range("|B_gbw| at r=5", v[2], 2.31, 2.3204));
    items.push(Item::within("|B_gbw| at r=5 vs 8/3^(9/8)", v[2], limit, tol::GBW_LIMIT));
    items.push(Item::at_least("smallest increase over r=1,2,5", smallest_step(&v), 0.0));
    items.push(Item::at_most(
        "largest |B_gbw| minus 8/3^(9/8)",
        v.iter().cloned().fold(f64::MIN, f64::max) - limit,
        0.0,
    ));
    Ok(Check::new(1, "generalized BW optimum, squeezed state", items))
}

/// `alpha = -alpha' = beta'/2 = sqrt(ln 3 / (16 cosh 2r))`, `beta = 0`.
pub fn gbw_tmss_quoted_settings(r: f64) -> BellSettings {
    let a = (3f64.ln() / (16.0 * (2.0 * r).cosh())).sqrt();
    let c = |x: f64| Complex64::new(x, 0.0);
    BellSettings::displacements(c(a), c(-a), c(0.0), c(2.0 * a))
}

fn gbw_tmss_quoted_location(opts: &VerifyOptions) -> Result<Check> {
    let r = 5.0;
    let model = StateModel::Tmss { r };
    let o = best(model, Formalism::Gbw, FunctionalOptions::default(), opts)?;
    let f = BellFunctional::new(model, Formalism::Gbw, FunctionalOptions::default())?;
    let quoted = f.eval_settings(&gbw_tmss_quoted_settings(r)).abs();
    Ok(Check::new(
        2,
        "quoted generalized BW optimum location, r=5",
        vec![
            Item::info("|B_gbw| at quoted settings", quoted, "closed form"),
            Item::info("|B_gbw| optimized", o.result.value, "optimizer best"),
            Item::at_most("|quoted - optimized|", (quoted - o.result.value).abs(), tol::QUOTED_LOCATION),
        ],
    ))
}

fn pseudospin_tmss(opts: &VerifyOptions) -> Result<Check> {
    let rs = [1.0, 2.0, 3.0];
    let v = rs
        .iter()
        .map(|&r| best_value(StateModel::Tmss { r }, Formalism::Pseudospin, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut items: Vec<Item> = rs
        .iter()
        .zip(&v)
        .map(|(&r, b)| Item::info(format!("|B_ps| at r={r}"), *b, format!("2 sqrt(1 + tanh^2 2r) = {}", num(2.0 * (1.0 + (2.0 * r).tanh().powi(2)).sqrt()))))
        .collect();
    items.push(Item::in_range("|B_ps| at r=3", v[2], 2.79, CIRELSON_BOUND));
    items.push(Item::at_least("smallest increase over r=1,2,3", smallest_step(&v), 0.0));
    Ok(Check::new(3, "pseudospin optimum, squeezed state", items))
}

fn pseudospin_ecs(opts: &VerifyOptions) -> Result<Check> {
    let mut items = Vec::new();
    for g in [0.05, 0.5, 1.0, 2.0, 6.0] {
        let b = best_value(StateModel::Ecs { gamma: g }, Formalism::Pseudospin, opts)?;
        let k = k_of_gamma(g)?;
        items.push(Item::within(
            format!("|B_ps| at gamma={g} vs 2 sqrt(1+K^2)"),
            b,
            2.0 * (1.0 + k * k).sqrt(),
            tol::ECS_CLOSED_FORM,
        ));
        if g == 0.05 || g == 6.0 {
            items.push(Item::at_least(format!("|B_ps| at gamma={g}"), b, 2.82));
        }
    }
    Ok(Check::new(4, "pseudospin optimum, entangled coherent state", items))
}

fn fidelity_identity() -> Result<Check> {
    let mut items = Vec::new();
    for g in [0.3, 1.0, 2.0] {
        let f = parity_rotation_fidelity(g, FockCutoff::for_ecs(g))?;
        items.push(Item::within(format!("|<d|U(pi/2)|e>|^2 at gamma={g}"), f, k_of_gamma(g)?, tol::FIDELITY));
    }
    Ok(Check::new(5, "parity-rotation fidelity equals K", items))
}

fn gbw_ecs(opts: &VerifyOptions) -> Result<Check> {
    let options = FunctionalOptions {
        domain: DisplacementDomain::Imaginary,
        ..FunctionalOptions::default()
    };
    let v = best(StateModel::Ecs { gamma: 5.0 }, Formalism::Gbw, options, opts)?.result.value;
    Ok(Check::new(
        6,
        "generalized BW optimum, entangled coherent state",
        vec![
            Item::at_least("|B_gbw| at gamma=5, imaginary displacements", v, 2.77),
            Item::at_most("|B_gbw| at gamma=5, imaginary displacements", v, CIRELSON_BOUND),
        ],
    ))
}

fn random_qubit_pair(rng: &mut ChaCha8Rng) -> Result<TwoModeState> {
    let mut c = CMatrix::zeros(2, 2);
    for z in c.iter_mut() {
        *z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    TwoModeState::from_coefficients(c, 0.0)
}

fn random_angles(rng: &mut ChaCha8Rng) -> BellSettings {
    let mut a = || rng.random_range(-PI..PI);
    BellSettings::angles(a(), a(), a(), a())
}

/// `(theta_1, theta_1', theta_2, theta_2')` reaching the upper CH bound on a
/// singlet-like state.
pub fn ch_upper_angles() -> BellSettings {
    BellSettings::angles(0.0, FRAC_PI_4, -3.0 * FRAC_PI_8, -5.0 * FRAC_PI_8)
}

/// Angles reaching the lower CH bound on a singlet-like state.
pub fn ch_lower_angles() -> BellSettings {
    BellSettings::angles(0.0, FRAC_PI_4, FRAC_PI_8, -FRAC_PI_8)
}

fn ch_universal_bounds(opts: &VerifyOptions) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (mut lo, mut hi, mut excess) = (f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for _ in 0..10_000 {
        let st = random_qubit_pair(&mut rng)?;
        let s = random_angles(&mut rng);
        let v = ch_qubit(&st, &s)?;
        let (l, h) = ch_delta_bounds(&s)?;
        lo = lo.min(v);
        hi = hi.max(v);
        excess = excess.max(l - v).max(v - h);
    }
    let single = TwoModeState::single_photon(FockCutoff::new(1)?);
    Ok(Check::new(
        7,
        "CH bounds on two-qubit states",
        vec![
            Item::at_least("smallest B_CH over 10^4 random states", lo, CH_LOWER_BOUND - tol::CH_BOUND),
            Item::at_most("largest B_CH over 10^4 random states", hi, CH_UPPER_BOUND + tol::CH_BOUND),
            Item::at_most("largest excess over setting-dependent range", excess, tol::CH_BOUND),
            Item::within("single photon, upper angle set", ch_qubit(&single, &ch_upper_angles())?, CH_UPPER_BOUND, tol::CH_QUOTED),
            Item::within("single photon, lower angle set", ch_qubit(&single, &ch_lower_angles())?, CH_LOWER_BOUND, tol::CH_QUOTED),
        ],
    ))
}

fn ch_q_ecs(opts: &VerifyOptions) -> Result<Check> {
    let model = StateModel::Ecs { gamma: 0.05 };
    let general = best_value(model, Formalism::ChQ, opts)?;
    let restricted = best_value(model, Formalism::ChQBw, opts)?;
    Ok(Check::new(
        8,
        "CH with Q functions, entangled coherent state at gamma=0.05",
        vec![
            Item::at_most("min B_CH, all displacements free", general, -1.16),
            Item::in_range("min B_CH, alpha = beta = 0", restricted, -1.12, -1.10),
        ],
    ))
}

fn ch_parity_quoted() -> Result<Check> {
    let mut items = Vec::new();
    let tmss = StateModel::Tmss { r: 4.0 };
    // the squeezed state correlates like |00> + |11>, so the angle sets trade roles
    items.push(Item::within(
        "squeezed r=4, lower angle set",
        ch_parity_formalism(tmss, &ch_lower_angles())?,
        CH_UPPER_BOUND,
        tol::PARITY_QUOTED,
    ));
    items.push(Item::within(
        "squeezed r=4, upper angle set",
        ch_parity_formalism(tmss, &ch_upper_angles())?,
        CH_LOWER_BOUND,
        tol::PARITY_QUOTED,
    ));
    for g in [0.05, 6.0] {
        let ecs = StateModel::Ecs { gamma: g };
        items.push(Item::within(
            format!("coherent gamma={g}, upper angle set"),
            ch_parity_formalism(ecs, &ch_upper_angles())?,
            CH_UPPER_BOUND,
            tol::PARITY_QUOTED,
        ));
        items.push(Item::within(
            format!("coherent gamma={g}, lower angle set"),
            ch_parity_formalism(ecs, &ch_lower_angles())?,
            CH_LOWER_BOUND,
            tol::PARITY_QUOTED,
        ));
    }
    Ok(Check::new(9, "CH with rotated parity projectors at quoted angles", items))
}

fn random_point(rng: &mut ChaCha8Rng, half: f64) -> PhasePoint {
    let mut c = || Complex64::new(rng.random_range(-half..half), rng.random_range(-half..half));
    PhasePoint::new(c(), c())
}

fn random_pseudospin(rng: &mut ChaCha8Rng) -> PseudospinSetting {
    PseudospinSetting {
        theta: rng.random_range(0.0..PI),
        phi: rng.random_range(-PI..PI),
    }
}

fn max_residual<F: FnMut(&mut ChaCha8Rng) -> Result<f64>>(rng: &mut ChaCha8Rng, n: usize, mut f: F) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..n {
        worst = worst.max(f(rng)?);
    }
    Ok(worst)
}

fn oracle_equivalence(opts: &VerifyOptions) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(10));
    let (r, g) = (1.5, 3.0);
    let half = 1.5;
    let tmss = make_tmss(r, FockCutoff::for_tmss(r))?;
    let ecs = make_ecs(g, FockCutoff::for_ecs(g))?;
    let shift = half * std::f64::consts::SQRT_2;
    let wt = WignerOracle::new(&tmss, shift);
    let we = WignerOracle::new(&ecs, shift);

    let w_tmss = max_residual(&mut rng, 100, |rng| {
        let p = random_point(rng, half);
        Ok((wigner_tmss(p, r)? - wt.wigner(p)).abs())
    })?;
    let w_ecs = max_residual(&mut rng, 100, |rng| {
        let p = random_point(rng, half);
        Ok((wigner_ecs(p, g)? - we.wigner(p)).abs())
    })?;
    let q_t = max_residual(&mut rng, 100, |rng| {
        let p = random_point(rng, half);
        Ok((q_tmss(p, r)? - q_two_mode(p, &tmss)).abs())
    })?;
    let q_e = max_residual(&mut rng, 100, |rng| {
        let p = random_point(rng, half);
        Ok((q_ecs(p, g)? - q_two_mode(p, &ecs)).abs())
    })?;
    let k = k_of_gamma(g)?;
    let corr = max_residual(&mut rng, 100, |rng| {
        let s = BellSettings::pseudospin(random_pseudospin(rng), random_pseudospin(rng), random_pseudospin(rng), random_pseudospin(rng));
        let [a, ap, b, bp] = s.as_pseudospin()?;
        let e = |x, y| pseudospin_correlation_ecs(k, x, y);
        let closed = e(a, b) + e(a, bp) + e(ap, b) - e(ap, bp);
        Ok((closed - chsh_pseudospin(&ecs, &s)?).abs())
    })?;

    let printed_laguerre = (parity_expectation_series(1, 1.0, LaguerreSeries::AsPrinted)?
        - parity_expectation_series(1, 1.0, LaguerreSeries::Corrected)?)
        .abs();
    let (t1, t2) = (0.4, 1.1);
    let chi_t = (chi_joint_tmss(0.8, t1, t2) - printed::chi_joint_tmss(0.8, t1, t2)).abs();
    let kk = k_of_gamma(1.0)?;
    let chi_e = (chi_joint_ecs(kk, t1, t2) - printed::chi_joint_ecs(kk, t1, t2)).abs();

    Ok(Check::new(
        10,
        "closed forms against truncated-matrix oracles",
        vec![
            Item::at_most(format!("Wigner, squeezed r={r}, 100 points"), w_tmss, tol::WIGNER_ORACLE),
            Item::at_most(format!("Wigner, coherent gamma={g}, 100 points"), w_ecs, tol::WIGNER_ORACLE),
            Item::at_most(format!("Q, squeezed r={r}, 100 points"), q_t, tol::Q_ORACLE),
            Item::at_most(format!("Q, coherent gamma={g}, 100 points"), q_e, tol::Q_ORACLE),
            Item::at_most(format!("pseudospin B, coherent gamma={g}, 100 settings"), corr, tol::CORRELATION_ORACLE),
            Item::info("printed Laguerre series at n=1, |a|=1, deviation", printed_laguerre, "odd terms need L_{2k+1}; printed terms grow with k"),
            Item::info("printed squeezed chi correlation, deviation", chi_t, "printed form drops diagonal terms"),
            Item::info("printed coherent chi correlation, deviation", chi_e, "printed form repeats a term"),
        ],
    ))
}

fn square_defect(op: &FockOperator, target: &CMatrix) -> f64 {
    let m = op.matrix();
    (m * m - target).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn involution_defect(op: &FockOperator) -> f64 {
    let d = op.matrix().nrows();
    square_defect(op, &CMatrix::identity(d, d))
}

fn idempotence_defect(op: &FockOperator) -> f64 {
    square_defect(op, op.matrix())
}

fn property_suite(opts: &VerifyOptions) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(11));
    let cutoff = FockCutoff::new(23)?;
    let basis = DisplacementBasis::new(cutoff);

    let mut inv = involution_defect(&parity(cutoff));
    let mut idem = 0.0f64;
    for _ in 0..20 {
        let theta = rng.random_range(-PI..PI);
        let alpha = Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        inv = inv
            .max(involution_defect(&pseudospin(random_pseudospin(&mut rng), cutoff)))
            .max(involution_defect(&gisin_peres(8, theta, GammaZ::Pauli)?))
            .max(involution_defect(&gisin_peres(9, theta, GammaZ::Pauli)?))
            .max(involution_defect(&bw_parity(DisplacementSetting { alpha }, &basis)));
        idem = idem
            .max(idempotence_defect(&ch_projector(ProjectorSetting { theta }, cutoff)))
            .max(idempotence_defect(&chi_projector(theta, cutoff)))
            .max(idempotence_defect(&chi_projector(theta, FockCutoff::new(22)?)))
            .max(idempotence_defect(&bw_ch_projector(DisplacementSetting { alpha }, &basis)));
    }

    let mut cirelson = 0.0f64;
    for (model, formalism) in [
        (StateModel::Tmss { r: 0.5 }, Formalism::Pseudospin),
        (StateModel::Tmss { r: 2.0 }, Formalism::Pseudospin),
        (StateModel::Ecs { gamma: 0.5 }, Formalism::Pseudospin),
        (StateModel::Ecs { gamma: 2.0 }, Formalism::Pseudospin),
        (StateModel::Tmss { r: 1.0 }, Formalism::Gbw),
        (StateModel::Ecs { gamma: 1.0 }, Formalism::Gbw),
    ] {
        let f = BellFunctional::new(model, formalism, FunctionalOptions::default())?;
        for _ in 0..500 {
            let x: Vec<f64> = f.bounds().iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect();
            cirelson = cirelson.max(f.eval(&x).abs());
        }
    }

    // (-1)^n P(n, |alpha|) starts at 1 and must never reach -1
    let scan = NumberStateParity::new(5, 5.0);
    let mut flip = f64::INFINITY;
    for n in 1..=5usize {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..=500 {
            flip = flip.min(sign * scan.eval(n, 0.01 * i as f64)?);
        }
    }

    let gp_cut = FockCutoff::new(63)?;
    let mut entry = 0.0f64;
    for theta in [0.0, 0.3, FRAC_PI_2, 2.2, -1.1] {
        let a = gisin_peres(64, theta, GammaZ::Pseudospin)?;
        let s = pseudospin(PseudospinSetting { theta, phi: 0.0 }, gp_cut);
        entry = entry.max((a.matrix() - s.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let st = make_tmss(2.0, FockCutoff::for_tmss(2.0))?;
    let t = truncate_to(&st, 64)?;
    let mut value = 0.0f64;
    for _ in 0..20 {
        let angles: [f64; 4] = std::array::from_fn(|_| rng.random_range(-PI..PI));
        let gp = chsh_gisin_peres(&st, 64, angles, GammaZ::Pseudospin)?;
        let ps = |theta| PseudospinSetting { theta, phi: 0.0 };
        let s = BellSettings::pseudospin(ps(angles[0]), ps(angles[1]), ps(angles[2]), ps(angles[3]));
        value = value.max((gp - chsh_pseudospin(&t, &s)?).abs());
    }

    Ok(Check::new(
        11,
        "operator and functional invariants",
        vec![
            Item::at_most("involutions: max |A^2 - 1|", inv, tol::OPERATOR),
            Item::at_most("projectors: max |P^2 - P|", idem, tol::OPERATOR),
            Item::at_most("max |B| over 3000 random settings", cirelson, CIRELSON_BOUND + tol::CIRELSON),
            Item::at_least("min (-1)^n P(n,|a|), n=1..5, |a|<=5", flip, -(1.0 - tol::NOT_FLIPPABLE)),
            Item::at_most("Gisin-Peres N=64 vs pseudospin, entries", entry, tol::GP_LIMIT),
            Item::at_most("Gisin-Peres N=64 vs pseudospin, B", value, tol::GP_LIMIT),
        ],
    ))
}

fn determinism(opts: &VerifyOptions) -> Result<Check> {
    let runs = || -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for (model, formalism) in [
            (StateModel::Tmss { r: 2.0 }, Formalism::Gbw),
            (StateModel::Ecs { gamma: 1.0 }, Formalism::ChQ),
            (StateModel::Ecs { gamma: 0.5 }, Formalism::Pseudospin),
        ] {
            let o = best(model, formalism, FunctionalOptions::default(), opts)?;
            out.push(o.result.value);
            out.extend(o.x);
        }
        Ok(out)
    };
    let a = runs()?;
    let b = runs()?;
    let differing = a.iter().zip(&b).filter(|(x, y)| x.to_bits() != y.to_bits()).count();
    Ok(Check::new(
        12,
        "identical seeds give identical optima",
        vec![Item::at_most("differing numbers between two runs", differing as f64, 0.0)],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyOptions {
        VerifyOptions { seed: 3, restarts: 8 }
    }

    #[test]
    fn informational_items_never_fail() {
        let c = Check::new(0, "t", vec![Item::info("x", 1.0, "note"), Item::at_least("y", 1.0, 0.0)]);
        assert!(c.passed());
        let c = Check::new(0, "t", vec![Item::at_most("y", 1.0, 0.0)]);
        assert!(!c.passed());
        assert_eq!(c.failures().count(), 1);
    }

    #[test]
    fn number_format_is_stable() {
        assert_eq!(num(0.0), "0.0000000000");
        assert_eq!(num(2.5), "2.5000000000");
        assert_eq!(num(1.5e-9), "1.500e-9");
    }

    #[test]
    fn unknown_check_is_an_error() {
        assert!(check(13, &quick()).is_err());
        assert!(check(0, &quick()).is_err());
    }

    #[test]
    fn fast_checks_pass() {
        for id in [5, 7, 9] {
            let c = check(id, &quick()).unwrap();
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn quoted_settings_shape() {
        let s = gbw_tmss_quoted_settings(1.0);
        let [a, ap, b, bp] = s.as_displacements().unwrap();
        assert_eq!(a, -ap);
        assert_eq!(b, Complex64::new(0.0, 0.0));
        assert!((bp - 2.0 * a).norm() < 1e-15);
    }

    #[test]
    fn table_has_one_status_line_per_check() {
        let r = Report {
            options: quick(),
            checks: vec![check(5, &quick()).unwrap()],
        };
        let t = r.table();
        assert!(t.starts_with("PASS  5"));
        assert!(t.ends_with("1/1 checks passed\n"));
    }
}
