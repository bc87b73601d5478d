use num_complex::Complex64;

use super::correlations::{gisin_peres_coefficients, truncate_to, FamilyCorrelations};
use super::{chsh_combination, BellSettings, StateModel};
use crate::error::{invalid, Error, Result};
use crate::fock::{expectation, TwoModeState};
use crate::observables::{pseudospin, GammaZ, PseudospinSetting};
use crate::phase_space::{check_amplitude, ecs_parity_correlation, PhasePoint, WignerOracle};

/// CHSH combination of pseudospin correlations, each computed as a
/// truncated-matrix expectation value.
pub fn chsh_pseudospin(state: &TwoModeState, s: &BellSettings) -> Result<f64> {
    let settings = s.as_pseudospin()?;
    let cutoff = state.cutoff();
    let ops: Vec<_> = settings.iter().map(|&p| pseudospin(p, cutoff)).collect();
    let e = |i: usize, j: usize| expectation(state, &ops[i], &ops[j]);
    Ok(e(0, 2)? + e(0, 3)? + e(1, 2)? - e(1, 3)?)
}

/// `<(a.s_1)(b.s_2)>` for the two-mode squeezed state:
/// `cos t1 cos t2 + tanh(2r) sin t1 sin t2 cos(p1 + p2)`.
pub fn pseudospin_correlation_tmss(r: f64, a: PseudospinSetting, b: PseudospinSetting) -> f64 {
    a.theta.cos() * b.theta.cos()
        + (2.0 * r).tanh() * a.theta.sin() * b.theta.sin() * (a.phi + b.phi).cos()
}

/// `<(a.s_1)(b.s_2)>` for the entangled coherent state with `K = K(gamma)`:
/// `-cos t1 cos t2 - K cos(p1 - p2) sin t1 sin t2`.
pub fn pseudospin_correlation_ecs(k: f64, a: PseudospinSetting, b: PseudospinSetting) -> f64 {
    -a.theta.cos() * b.theta.cos() - k * (a.phi - b.phi).cos() * a.theta.sin() * b.theta.sin()
}

/// `<Pi_1(alpha) Pi_2(beta)> = (pi^2/4) W(alpha, beta)` in closed form.
pub(crate) fn parity_correlation(model: StateModel, p: PhasePoint) -> Result<f64> {
    match model {
        StateModel::Tmss { r } => {
            Ok(crate::phase_space::wigner_tmss(p, r)? * std::f64::consts::PI.powi(2) / 4.0)
        }
        StateModel::Ecs { gamma } => {
            check_amplitude(gamma)?;
            Ok(ecs_parity_correlation(p, gamma))
        }
        StateModel::SinglePhoton => Err(Error::Unsupported(
            "displaced-parity CHSH is only available for tmss and ecs".into(),
        )),
    }
}

/// Signed CHSH combination of displaced-parity correlations from the closed
/// form Wigner function. The restricted case is the same call with
/// `alpha = beta = 0`.
pub fn chsh_gbw(model: StateModel, s: &BellSettings) -> Result<f64> {
    let [a, ap, b, bp] = s.as_displacements()?;
    let w = |x: Complex64, y: Complex64| parity_correlation(model, PhasePoint::new(x, y));
    Ok(w(a, b)? + w(a, bp)? + w(ap, b)? - w(ap, bp)?)
}

/// Displaced-parity CHSH combination from a truncated state.
pub fn chsh_bw_matrix(oracle: &WignerOracle, s: &BellSettings) -> Result<f64> {
    let d = s.as_displacements()?;
    Ok(chsh_combination(d, |x, y| oracle.parity_correlation(PhasePoint::new(x, y))))
}

/// CHSH combination with Gisin-Peres observables `A(theta)` in dimension `n`;
/// `angles` are `(theta_1, theta_1', theta_2, theta_2')`. The state is
/// truncated (and renormalized) or zero-padded to dimension `n`.
pub fn chsh_gisin_peres(state: &TwoModeState, n: usize, angles: [f64; 4], convention: GammaZ) -> Result<f64> {
    let t = truncate_to(state, n)?;
    let f = FamilyCorrelations::gisin_peres(&t, convention)?;
    Ok(chsh_combination(angles, |x, y| {
        f.joint(&gisin_peres_coefficients(x), &gisin_peres_coefficients(y))
    }))
}

/// `K(gamma) = S^2 / (cosh(gamma^2) sinh(gamma^2))` with
/// `S = sum_n gamma^{4n+1} / sqrt((2n)! (2n+1)!)`, the squared overlap between
/// the odd cat and the parity-rotated even cat.
///
/// `S e^{-gamma^2}` is summed in log space and the denominator is scaled by
/// `e^{-2 gamma^2}`, so large amplitudes neither overflow nor underflow.
pub fn k_of_gamma(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid("gamma", gamma, "K(gamma) needs gamma > 0"));
    }
    let g2 = gamma * gamma;
    let ln_g4 = 4.0 * gamma.ln();
    // log-terms ln(gamma^{4n+1} e^{-gamma^2} / sqrt((2n)!(2n+1)!))
    let mut l = gamma.ln() - g2;
    let mut logs = vec![l];
    let mut peak = l;
    let mut carry = 0.0;
    let mut n = 0usize;
    loop {
        let k = (2 * n) as f64;
        // Kahan summation of the log-steps
        let y = ln_g4 - 0.5 * ((k + 1.0) * (k + 2.0) * (k + 2.0) * (k + 3.0)).ln() - carry;
        let t = l + y;
        carry = (t - l) - y;
        l = t;
        logs.push(l);
        peak = peak.max(l);
        n += 1;
        if (n as f64) > g2 / 2.0 && l < peak - 40.0 {
            break;
        }
    }
    let ln_sum = peak + logs.iter().map(|x| (x - peak).exp()).sum::<f64>().ln();
    let denom = -(-4.0 * g2).exp_m1() / 4.0;
    Ok((2.0 * ln_sum - denom.ln()).exp().min(1.0))
}
