//! Two-mode Wigner and Husimi Q functions.
//!
//! Closed forms are provided for the two-mode squeezed state and the entangled
//! coherent state (real amplitude). Wigner functions are normalized so that
//! `(pi^2/4) W(alpha, beta) = <Pi_1(alpha) Pi_2(beta)>`; Q functions so that
//! they integrate to one. [`WignerOracle`] and [`q_two_mode`] evaluate the same
//! quantities from a truncated state.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fock::{coherent_amplitudes, CMatrix, DisplacementBasis, FockCutoff, TwoModeState};

/// A point `(alpha, beta)` of two-mode phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl PhasePoint {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        PhasePoint { alpha, beta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    First,
    Second,
}

fn check_squeezing(r: f64) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(invalid("r", r, "squeezing must be finite and non-negative"));
    }
    Ok(())
}

pub(crate) fn check_amplitude(gamma: f64) -> Result<()> {
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(invalid("gamma", gamma, "coherent amplitude must be finite and nonzero"));
    }
    Ok(())
}

/// `N^2` for `N (|g>|-g> - |-g>|g>)`.
pub fn ecs_norm_sq(gamma: f64) -> f64 {
    1.0 / (2.0 * -(-4.0 * gamma * gamma).exp_m1())
}

/// `(4/pi^2) exp[-2 cosh(2r)(|a|^2+|b|^2) + 2 sinh(2r)(a b + a^* b^*)]`.
pub fn wigner_tmss(p: PhasePoint, r: f64) -> Result<f64> {
    check_squeezing(r)?;
    let (a, b) = (p.alpha, p.beta);
    let x = -2.0 * (2.0 * r).cosh() * (a.norm_sqr() + b.norm_sqr())
        + 4.0 * (2.0 * r).sinh() * (a * b).re;
    Ok(4.0 / (PI * PI) * x.exp())
}

/// Four-term Wigner function of the entangled coherent state with real `gamma`,
/// carrying the `4 N^2 / pi^2` prefactor.
pub fn wigner_ecs(p: PhasePoint, gamma: f64) -> Result<f64> {
    check_amplitude(gamma)?;
    Ok(4.0 / (PI * PI) * ecs_parity_correlation(p, gamma))
}

/// `<Pi_1(alpha) Pi_2(beta)>` for the entangled coherent state.
pub(crate) fn ecs_parity_correlation(p: PhasePoint, gamma: f64) -> f64 {
    let g = Complex64::new(gamma, 0.0);
    let (a, b) = (p.alpha, p.beta);
    let direct = (-2.0 * (a - g).norm_sqr() - 2.0 * (b + g).norm_sqr()).exp()
        + (-2.0 * (a + g).norm_sqr() - 2.0 * (b - g).norm_sqr()).exp();
    let cross = (-2.0 * (a - g) * (a.conj() + g) - 2.0 * (b + g) * (b.conj() - g)
        - 4.0 * gamma * gamma)
        .exp();
    let cross_conj = (-2.0 * (a.conj() - g) * (a + g) - 2.0 * (b.conj() + g) * (b - g)
        - 4.0 * gamma * gamma)
        .exp();
    ecs_norm_sq(gamma) * (direct - (cross + cross_conj).re)
}

/// `<e|Pi(alpha)|e>` for the even cat state `|e> ~ |g> + |-g>`.
pub fn even_cat_displaced_parity(gamma: f64, alpha: Complex64) -> Result<f64> {
    check_amplitude(gamma)?;
    let g = Complex64::new(gamma, 0.0);
    let norm = 1.0 / (2.0 * (1.0 + (-2.0 * gamma * gamma).exp()));
    let direct = (-2.0 * (alpha - g).norm_sqr()).exp() + (-2.0 * (alpha + g).norm_sqr()).exp();
    let cross = 2.0 * (-2.0 * alpha.norm_sqr()).exp() * (4.0 * gamma * alpha.im).cos();
    Ok(norm * (direct + cross))
}

/// Wigner function of a truncated state through displaced parity,
/// `W = (4/pi^2) <Pi_1(alpha) Pi_2(beta)>`.
///
/// The state is embedded in a larger space so that displacing it by up to
/// `max_shift` stays clear of the truncation edge; only the first `k` columns
/// of each displacement are formed, `k` being the state's own dimension.
#[derive(Debug, Clone)]
pub struct WignerOracle {
    basis: DisplacementBasis,
    coeffs: CMatrix,
}

impl WignerOracle {
    pub fn new(state: &TwoModeState, max_shift: f64) -> Self {
        let cutoff = state.cutoff().with_displacement_margin(max_shift);
        WignerOracle {
            basis: DisplacementBasis::new(cutoff),
            coeffs: state.coeffs().clone(),
        }
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.basis.cutoff()
    }

    /// `<Pi_1(alpha) Pi_2(beta)>`.
    pub fn parity_correlation(&self, p: PhasePoint) -> f64 {
        let k = self.coeffs.nrows();
        let da = self.basis.columns(-p.alpha, k);
        let db = self.basis.columns(-p.beta, k);
        let shifted = da * &self.coeffs * db.transpose();
        let mut total = 0.0;
        for n in 0..shifted.ncols() {
            for m in 0..shifted.nrows() {
                let s = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
                total += s * shifted[(m, n)].norm_sqr();
            }
        }
        total
    }

    pub fn wigner(&self, p: PhasePoint) -> f64 {
        4.0 / (PI * PI) * self.parity_correlation(p)
    }
}

/// `|<alpha|<beta|psi>|^2 / pi^2` from a truncated state.
pub fn q_two_mode(p: PhasePoint, state: &TwoModeState) -> f64 {
    let cutoff = state.cutoff();
    let u = coherent_amplitudes(p.alpha, cutoff);
    let v = coherent_amplitudes(p.beta, cutoff);
    state.project(&u, &v).norm_sqr() / (PI * PI)
}

/// `exp[-|a|^2 - |b|^2 + tanh(r)(a b + a^* b^*)] / (pi^2 cosh^2 r)`.
pub fn q_tmss(p: PhasePoint, r: f64) -> Result<f64> {
    check_squeezing(r)?;
    let (a, b) = (p.alpha, p.beta);
    let x = -a.norm_sqr() - b.norm_sqr() + 2.0 * r.tanh() * (a * b).re;
    Ok(x.exp() / (PI * PI * r.cosh().powi(2)))
}

/// Four-term Q function of the entangled coherent state with real `gamma`,
/// carrying the `N^2 / pi^2` prefactor.
pub fn q_ecs(p: PhasePoint, gamma: f64) -> Result<f64> {
    check_amplitude(gamma)?;
    let g = Complex64::new(gamma, 0.0);
    let (a, b) = (p.alpha, p.beta);
    let direct = (-(a - g).norm_sqr() - (b + g).norm_sqr()).exp()
        + (-(a + g).norm_sqr() - (b - g).norm_sqr()).exp();
    let cross = (-(a - g) * (a.conj() + g) - (b + g) * (b.conj() - g) - 4.0 * gamma * gamma).exp();
    let cross_conj =
        (-(a.conj() - g) * (a + g) - (b.conj() + g) * (b - g) - 4.0 * gamma * gamma).exp();
    let v = ecs_norm_sq(gamma) * (direct - (cross + cross_conj).re) / (PI * PI);
    Ok(v.max(0.0))
}

/// Q function of `(|0>|1> - |1>|0>)/sqrt(2)`: `e^{-|a|^2-|b|^2} |a - b|^2 / (2 pi^2)`.
pub fn q_single_photon(p: PhasePoint) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    (-a.norm_sqr() - b.norm_sqr()).exp() * (a - b).norm_sqr() / (2.0 * PI * PI)
}

/// Marginal Q function `<psi| zeta(alpha) (x) 1 |psi> / pi` (or the second
/// mode) of a truncated state.
pub fn q_marginal(state: &TwoModeState, mode: Mode, alpha: Complex64) -> f64 {
    let a = coherent_amplitudes(alpha, state.cutoff()).map(|z| z.conj());
    let w = match mode {
        Mode::First => state.coeffs().transpose() * a,
        Mode::Second => state.coeffs() * a,
    };
    w.norm_squared() / PI
}

/// Thermal marginal of the two-mode squeezed state, identical for both modes.
pub fn q_marginal_tmss(alpha: Complex64, r: f64) -> Result<f64> {
    check_squeezing(r)?;
    let c2 = r.cosh().powi(2);
    Ok((-alpha.norm_sqr() / c2).exp() / (PI * c2))
}

/// Marginal of the entangled coherent state, identical for both modes:
/// `N^2/pi [e^{-|a-g|^2} + e^{-|a+g|^2} - 2 e^{-|a|^2 - 3 g^2} cos(2 g Im a)]`.
pub fn q_marginal_ecs(alpha: Complex64, gamma: f64) -> Result<f64> {
    check_amplitude(gamma)?;
    let g = Complex64::new(gamma, 0.0);
    let v = (-(alpha - g).norm_sqr()).exp() + (-(alpha + g).norm_sqr()).exp()
        - 2.0 * (-alpha.norm_sqr() - 3.0 * gamma * gamma).exp() * (2.0 * gamma * alpha.im).cos();
    Ok((ecs_norm_sq(gamma) * v / PI).max(0.0))
}

/// Marginal of the single-photon entangled state: `e^{-|a|^2}(1 + |a|^2)/(2 pi)`.
pub fn q_marginal_single_photon(alpha: Complex64) -> f64 {
    (-alpha.norm_sqr()).exp() * (1.0 + alpha.norm_sqr()) / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{expectation, make_cat, make_ecs, make_tmss, FockOperator, Parity};
    use crate::observables::{
        bw_ch_projector, bw_parity, displaced_parity_expectation, DisplacementSetting,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_point(rng: &mut ChaCha8Rng, re: f64, im: f64) -> PhasePoint {
        PhasePoint::new(
            c(rng.random_range(-re..re), rng.random_range(-im..im)),
            c(rng.random_range(-re..re), rng.random_range(-im..im)),
        )
    }

    #[test]
    fn tmss_wigner_special_points() {
        let w0 = 4.0 / (PI * PI);
        for r in [0.0, 0.5, 2.0] {
            let v = wigner_tmss(PhasePoint::new(c(0.0, 0.0), c(0.0, 0.0)), r).unwrap();
            assert!((v - w0).abs() < 1e-15);
        }
        let v = wigner_tmss(PhasePoint::new(c(1.0, 0.0), c(0.0, 0.0)), 0.0).unwrap();
        assert!((v - w0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!(wigner_tmss(PhasePoint::new(c(0.0, 0.0), c(0.0, 0.0)), -1.0).is_err());
    }

    #[test]
    fn tmss_wigner_matches_operator_path() {
        let r = 0.5;
        let state = make_tmss(r, FockCutoff::for_tmss(r)).unwrap();
        let p = PhasePoint::new(c(0.3, 0.0), c(0.3, 0.0));
        let closed = wigner_tmss(p, r).unwrap();

        let cutoff = state.cutoff().with_displacement_margin(0.5);
        let basis = DisplacementBasis::new(cutoff);
        let big = state.embed(cutoff).unwrap();
        let pa = bw_parity(DisplacementSetting { alpha: p.alpha }, &basis);
        let pb = bw_parity(DisplacementSetting { alpha: p.beta }, &basis);
        let via_ops = 4.0 / (PI * PI) * expectation(&big, &pa, &pb).unwrap();
        assert!((closed - via_ops).abs() < 1e-6, "{closed} vs {via_ops}");

        let oracle = WignerOracle::new(&state, 0.5);
        assert!((oracle.wigner(p) - via_ops).abs() < 1e-10);
    }

    #[test]
    fn ecs_wigner_symmetries_and_oracle() {
        let gamma = 1.0;
        let origin = PhasePoint::new(c(0.0, 0.0), c(0.0, 0.0));
        let state = make_ecs(gamma, FockCutoff::for_ecs(gamma)).unwrap();
        let oracle = WignerOracle::new(&state, 3.0);
        let closed = wigner_ecs(origin, gamma).unwrap();
        assert!((closed - oracle.wigner(origin)).abs() < 1e-6);
        assert!(wigner_ecs(origin, 0.0).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = random_point(&mut rng, 2.0, 1.0);
            let w = wigner_ecs(p, gamma).unwrap();
            let flipped = wigner_ecs(PhasePoint::new(-p.alpha, -p.beta), gamma).unwrap();
            assert!((w - flipped).abs() < 1e-14);
            // swapping the modes is the same as flipping the amplitude sign
            let swapped = wigner_ecs(PhasePoint::new(p.beta, p.alpha), gamma).unwrap();
            let negated = wigner_ecs(p, -gamma).unwrap();
            assert!((swapped - negated).abs() < 1e-14);
            assert!(w.abs() <= 4.0 / (PI * PI) + 1e-12);
        }
    }

    #[test]
    fn even_cat_parity_closed_form_matches_matrix() {
        for gamma in [0.5, 2.0] {
            let cutoff = FockCutoff::for_ecs(gamma).with_displacement_margin(1.5);
            let basis = DisplacementBasis::new(cutoff);
            let e = make_cat(gamma, Parity::Even, cutoff).unwrap();
            for alpha in [c(0.0, 0.0), c(0.0, 0.3), c(0.2, -0.7), c(1.1, 0.4)] {
                let m = displaced_parity_expectation(&e, alpha, &basis).unwrap();
                let closed = even_cat_displaced_parity(gamma, alpha).unwrap();
                assert!((m - closed).abs() < 1e-9, "gamma={gamma} alpha={alpha}");
            }
        }
    }

    #[test]
    fn q_vacuum_and_tmss_closed_form() {
        let vac = make_tmss(0.0, FockCutoff::new(8).unwrap()).unwrap();
        let origin = PhasePoint::new(c(0.0, 0.0), c(0.0, 0.0));
        assert!((q_two_mode(origin, &vac) - 1.0 / (PI * PI)).abs() < 1e-15);

        let r: f64 = 1.0;
        let at0 = q_tmss(origin, r).unwrap();
        assert!((at0 - 1.0 / (PI * PI * r.cosh().powi(2))).abs() < 1e-15);
        let p = PhasePoint::new(c(0.5, -0.2), c(0.1, 0.7));
        let vacq = (-p.alpha.norm_sqr() - p.beta.norm_sqr()).exp() / (PI * PI);
        assert!((q_tmss(p, 0.0).unwrap() - vacq).abs() < 1e-15);

        let state = make_tmss(r, FockCutoff::for_tmss(r)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = random_point(&mut rng, 2.0, 2.0);
            assert!((q_tmss(p, r).unwrap() - q_two_mode(p, &state)).abs() < 1e-8);
        }
    }

    #[test]
    fn q_ecs_closed_form_and_bounds() {
        let gamma = 1.0;
        let state = make_ecs(gamma, FockCutoff::for_ecs(gamma)).unwrap();
        let peak = PhasePoint::new(c(gamma, 0.0), c(-gamma, 0.0));
        let v = q_ecs(peak, gamma).unwrap();
        assert!((v - q_two_mode(peak, &state)).abs() < 1e-8);
        // the first term dominates at its own centre
        assert!((v - ecs_norm_sq(gamma) / (PI * PI)).abs() < 0.05 * v);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let p = random_point(&mut rng, 4.0, 4.0);
            let q = q_ecs(p, gamma).unwrap();
            assert!((0.0..=1.0 / (PI * PI)).contains(&q));
        }
    }

    #[test]
    fn marginals() {
        let cutoff = FockCutoff::new(8).unwrap();
        let vac = make_tmss(0.0, cutoff).unwrap();
        assert!((q_marginal(&vac, Mode::First, c(0.0, 0.0)) - 1.0 / PI).abs() < 1e-15);

        let r = 0.8;
        let state = make_tmss(r, FockCutoff::for_tmss(r)).unwrap();
        for a in [c(0.0, 0.0), c(0.5, 0.5), c(-1.2, 0.3)] {
            let closed = q_marginal_tmss(a, r).unwrap();
            assert!((q_marginal(&state, Mode::First, a) - closed).abs() < 1e-8);
            assert!((q_marginal(&state, Mode::Second, a) - closed).abs() < 1e-8);
        }

        let gamma = 1.0;
        let state = make_ecs(gamma, FockCutoff::for_ecs(gamma)).unwrap();
        for a in [c(0.0, 0.0), c(1.0, 0.2), c(-0.4, -0.9)] {
            let closed = q_marginal_ecs(a, gamma).unwrap();
            assert!((q_marginal(&state, Mode::First, a) - closed).abs() < 1e-8);
            assert!((q_marginal(&state, Mode::Second, a) - closed).abs() < 1e-8);
        }
    }

    #[test]
    fn marginal_is_zeta_expectation() {
        let gamma = 0.9;
        let state = make_ecs(gamma, FockCutoff::for_ecs(gamma)).unwrap();
        let cutoff = state.cutoff().with_displacement_margin(1.0);
        let big = state.embed(cutoff).unwrap();
        let basis = DisplacementBasis::new(cutoff);
        let a = c(0.6, -0.3);
        let z = bw_ch_projector(DisplacementSetting { alpha: a }, &basis);
        let id = FockOperator::identity(cutoff);
        let via_op = expectation(&big, &z, &id).unwrap() / PI;
        assert!((via_op - q_marginal(&state, Mode::First, a)).abs() < 1e-10);
    }

    #[test]
    fn ecs_marginal_matches_grid_quadrature() {
        // |Re|, |Im| <= gamma + 5 at step 0.05
        let gamma: f64 = 1.0;
        let h = 0.05;
        let half = ((gamma + 5.0) / h).round() as i32;
        let alpha = c(0.4, 0.3);
        let mut total = 0.0;
        for i in -half..=half {
            for j in -half..=half {
                let beta = c(i as f64 * h, j as f64 * h);
                total += q_ecs(PhasePoint::new(alpha, beta), gamma).unwrap();
            }
        }
        let integral = total * h * h;
        let closed = q_marginal_ecs(alpha, gamma).unwrap();
        assert!((integral - closed).abs() < 1e-3, "{integral} vs {closed}");
    }

    #[test]
    fn single_photon_closed_forms() {
        let cutoff = FockCutoff::new(4).unwrap();
        let sp = TwoModeState::single_photon(cutoff);
        let p = PhasePoint::new(c(0.3, 0.1), c(-0.5, 0.4));
        assert!((q_single_photon(p) - q_two_mode(p, &sp)).abs() < 1e-14);
        let a = c(0.7, -0.2);
        assert!((q_marginal_single_photon(a) - q_marginal(&sp, Mode::First, a)).abs() < 1e-14);
    }
}
