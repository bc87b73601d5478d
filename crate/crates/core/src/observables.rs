//! Local dichotomic observables and projectors.
//!
//! * pseudospin `a.s = s_z cos(theta) + sin(theta) (e^{i phi} s_- + e^{-i phi} s_+)`
//! * Gisin-Peres block observables `A(theta)` at finite dimension
//! * displaced parity `Pi(alpha) = D(alpha) (sum |2n><2n| - |2n+1><2n+1|) D^dag(alpha)`
//! * qubit projectors `xi(theta) = |theta><theta|` on `span{|0>, |1>}`
//! * displaced vacuum projectors `zeta(alpha) = D(alpha)|0><0|D^dag(alpha)`
//! * the pair rotation `U(theta)` and rotated even-parity projector
//!   `chi(theta) = U(theta) P_even U^dag(theta)`

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fock::{
    make_cat, CMatrix, CVector, DisplacementBasis, FockCutoff, FockOperator, Parity,
    SingleModeState,
};
use crate::laguerre;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudospinSetting {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSetting {
    pub alpha: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorSetting {
    pub theta: f64,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `s_z = sum_n |2n+1><2n+1| - |2n><2n|`.
pub fn pseudospin_z(cutoff: FockCutoff) -> FockOperator {
    FockOperator::diagonal(
        (0..cutoff.dim()).map(|n| if n % 2 == 0 { -1.0 } else { 1.0 }),
        cutoff,
    )
}

/// `s_- = sum_n |2n><2n+1|`; `s_+` is its adjoint.
pub fn pseudospin_lowering(cutoff: FockCutoff) -> FockOperator {
    let d = cutoff.dim();
    let mut m = CMatrix::zeros(d, d);
    for k in (0..d.saturating_sub(1)).step_by(2) {
        m[(k, k + 1)] = real(1.0);
    }
    FockOperator::new_unchecked(m, false)
}

/// Photon-number parity `sum_n (-1)^n |n><n|`, equal to `-s_z`.
pub fn parity(cutoff: FockCutoff) -> FockOperator {
    FockOperator::diagonal(
        (0..cutoff.dim()).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }),
        cutoff,
    )
}

/// `a.s` for the unit vector `(sin(theta) cos(phi), sin(theta) sin(phi), cos(theta))`.
///
/// At an odd dimension the top level `|n_max>` has no partner, so it only
/// carries the `s_z` component; the square is the identity only for even
/// dimensions.
pub fn pseudospin(setting: PseudospinSetting, cutoff: FockCutoff) -> FockOperator {
    let d = cutoff.dim();
    let (st, ct) = setting.theta.sin_cos();
    let mut m = CMatrix::zeros(d, d);
    for n in 0..d {
        m[(n, n)] = real(if n % 2 == 0 { -ct } else { ct });
    }
    let lower = Complex64::from_polar(st, setting.phi);
    for k in (0..d.saturating_sub(1)).step_by(2) {
        m[(k, k + 1)] = lower;
        m[(k + 1, k)] = lower.conj();
    }
    FockOperator::new_unchecked(m, true)
}

/// Orientation of the `Gamma_z` blocks in the Gisin-Peres observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GammaZ {
    /// Ordinary Pauli blocks `diag(+1, -1)`.
    #[default]
    Pauli,
    /// Blocks `diag(-1, +1)`, matching the sign of `s_z`; with this choice an
    /// even-dimensional `A(theta)` coincides entrywise with `a.s` at `phi = 0`.
    Pseudospin,
}

/// `A(theta) = Gamma_x sin(theta) + Gamma_z cos(theta) + E` in dimension `n`,
/// where `E` is `|n-1><n-1|` for odd `n` and zero otherwise.
pub fn gisin_peres(n: usize, theta: f64, convention: GammaZ) -> Result<FockOperator> {
    if n < 2 {
        return Err(invalid("N", n as f64, "Gisin-Peres observable needs N >= 2"));
    }
    let (st, ct) = theta.sin_cos();
    let sign = match convention {
        GammaZ::Pauli => 1.0,
        GammaZ::Pseudospin => -1.0,
    };
    let mut m = CMatrix::zeros(n, n);
    for k in (0..n - 1).step_by(2) {
        m[(k, k)] = real(sign * ct);
        m[(k + 1, k + 1)] = real(-sign * ct);
        m[(k, k + 1)] = real(st);
        m[(k + 1, k)] = real(st);
    }
    if n % 2 == 1 {
        m[(n - 1, n - 1)] = real(1.0);
    }
    Ok(FockOperator::new_unchecked(m, true))
}

/// `Pi(alpha)` at the cutoff of `basis`.
pub fn bw_parity(setting: DisplacementSetting, basis: &DisplacementBasis) -> FockOperator {
    let d = basis.displacement(setting.alpha);
    let p = parity(basis.cutoff());
    let m = d.matrix() * p.matrix() * d.matrix().adjoint();
    FockOperator::new_unchecked(m, true)
}

/// `zeta(alpha) = D(alpha)|0><0|D^dag(alpha)` at the cutoff of `basis`.
pub fn bw_ch_projector(setting: DisplacementSetting, basis: &DisplacementBasis) -> FockOperator {
    let v = basis.columns(setting.alpha, 1);
    FockOperator::new_unchecked(&v * v.adjoint(), true)
}

/// `xi(theta) = |theta><theta|` with `|theta> = cos(theta)|0> + sin(theta)|1>`.
pub fn ch_projector(setting: ProjectorSetting, cutoff: FockCutoff) -> FockOperator {
    let (s, c) = setting.theta.sin_cos();
    let mut m = CMatrix::zeros(cutoff.dim(), cutoff.dim());
    m[(0, 0)] = real(c * c);
    m[(1, 1)] = real(s * s);
    m[(0, 1)] = real(c * s);
    m[(1, 0)] = real(c * s);
    FockOperator::new_unchecked(m, true)
}

/// `U(theta)|2n> = cos|2n> - sin|2n+1>`, `U(theta)|2n+1> = cos|2n+1> + sin|2n>`.
/// An unpaired top level is left fixed so that the truncation stays unitary.
pub fn parity_rotation(theta: f64, cutoff: FockCutoff) -> FockOperator {
    let d = cutoff.dim();
    let (s, c) = theta.sin_cos();
    let mut m = CMatrix::zeros(d, d);
    for k in (0..d).step_by(2) {
        if k + 1 < d {
            m[(k, k)] = real(c);
            m[(k + 1, k)] = real(-s);
            m[(k + 1, k + 1)] = real(c);
            m[(k, k + 1)] = real(s);
        } else {
            m[(k, k)] = real(1.0);
        }
    }
    FockOperator::new_unchecked(m, false)
}

/// `chi(theta) = sum_n U(theta)|2n><2n|U^dag(theta)`.
pub fn chi_projector(theta: f64, cutoff: FockCutoff) -> FockOperator {
    let d = cutoff.dim();
    let (s, c) = theta.sin_cos();
    let mut m = CMatrix::zeros(d, d);
    for k in (0..d).step_by(2) {
        if k + 1 < d {
            m[(k, k)] = real(c * c);
            m[(k + 1, k + 1)] = real(s * s);
            m[(k, k + 1)] = real(-c * s);
            m[(k + 1, k)] = real(-c * s);
        } else {
            m[(k, k)] = real(1.0);
        }
    }
    FockOperator::new_unchecked(m, true)
}

/// Which form of the Laguerre series for `P(n, |alpha|)` to sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaguerreSeries {
    /// Odd terms use `L_{2k+1}^{(n-2k-1)}`, i.e. `|<m|D|n>|^2` for every `m`.
    Corrected,
    /// Odd terms use `L_{2k+2}^{(n-2k-1)}` as the formula is commonly quoted.
    AsPrinted,
}

/// Matrix evaluator of `P(n, |alpha|) = <n|Pi(alpha)|n>` sharing one
/// displacement eigenbasis across a scan.
#[derive(Debug, Clone)]
pub struct NumberStateParity {
    basis: DisplacementBasis,
    max_n: usize,
    max_abs_alpha: f64,
}

impl NumberStateParity {
    /// Covers number states up to `max_n` and displacements up to `max_abs_alpha`.
    pub fn new(max_n: usize, max_abs_alpha: f64) -> Self {
        let reach = (max_n as f64).sqrt() + max_abs_alpha.abs();
        let cutoff = FockCutoff::for_mean_photons(reach * reach);
        let cutoff = FockCutoff::new(cutoff.n_max().max(max_n + 32)).expect("positive");
        NumberStateParity {
            basis: DisplacementBasis::new(cutoff),
            max_n,
            max_abs_alpha: max_abs_alpha.abs(),
        }
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.basis.cutoff()
    }

    pub fn eval(&self, n: usize, abs_alpha: f64) -> Result<f64> {
        check_abs_alpha(abs_alpha)?;
        if n > self.max_n || abs_alpha > self.max_abs_alpha + 1e-12 {
            return Err(Error::Unsupported(format!(
                "P({n}, {abs_alpha}) outside the evaluator range ({}, {})",
                self.max_n, self.max_abs_alpha
            )));
        }
        let mut e = CVector::zeros(self.cutoff().dim());
        e[n] = real(1.0);
        // <n|D P D^dag|n> = sum_m (-1)^m |<m|D(-alpha)|n>|^2
        let v = self.basis.displace(real(-abs_alpha), &e);
        Ok(v.iter()
            .enumerate()
            .map(|(m, z)| if m % 2 == 0 { z.norm_sqr() } else { -z.norm_sqr() })
            .sum())
    }
}

fn check_abs_alpha(abs_alpha: f64) -> Result<()> {
    if !(abs_alpha >= 0.0) || !abs_alpha.is_finite() {
        return Err(invalid("|alpha|", abs_alpha, "must be finite and non-negative"));
    }
    Ok(())
}

/// `P(n, |alpha|) = <n|Pi(alpha)|n>` from truncated matrices.
pub fn parity_expectation_number_state(n: usize, abs_alpha: f64) -> Result<f64> {
    check_abs_alpha(abs_alpha)?;
    NumberStateParity::new(n, abs_alpha).eval(n, abs_alpha)
}

/// `P(n, |alpha|)` from the Laguerre expansion
/// `e^{-x} x^n/n! sum_k { (2k)!/x^{2k} [L_{2k}^{(n-2k)}(x)]^2 - (2k+1)!/x^{2k+1} [L^{(n-2k-1)}(x)]^2 }`
/// with `x = |alpha|^2`. See [`LaguerreSeries`] for the odd-term degree.
pub fn parity_expectation_series(n: usize, abs_alpha: f64, series: LaguerreSeries) -> Result<f64> {
    check_abs_alpha(abs_alpha)?;
    let x = abs_alpha * abs_alpha;
    if x == 0.0 {
        return Ok(if n % 2 == 0 { 1.0 } else { -1.0 });
    }
    let reach = (n as f64).sqrt() + abs_alpha + 8.0;
    let m_max = (reach * reach).ceil() as usize + n;
    match series {
        LaguerreSeries::Corrected => Ok((0..=m_max)
            .map(|m| {
                let p = laguerre::displaced_number_probability(m, n, x);
                if m % 2 == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum()),
        LaguerreSeries::AsPrinted => {
            let mut total = 0.0;
            for m in 0..=m_max {
                // e^{-x} x^n/n! * m!/x^m, accumulated as a product
                let mut w = (-x).exp();
                if m <= n {
                    for j in m + 1..=n {
                        w *= x / j as f64;
                    }
                } else {
                    for j in n + 1..=m {
                        w *= j as f64 / x;
                    }
                }
                let order = n as f64 - m as f64;
                let (degree, sign) = if m % 2 == 0 { (m, 1.0) } else { (m + 1, -1.0) };
                let l = laguerre::associated(degree, order, x);
                let term = sign * w * l * l;
                if !term.is_finite() {
                    return Ok(f64::NAN);
                }
                total += term;
            }
            Ok(total)
        }
    }
}

/// `|<e| D^dag(i alpha_i) R_x(2 gamma alpha_i) |e>|^2`, where `R_x` is the ideal
/// rotation `|e> -> cos|e> + i sin|d>`, `|d> -> i sin|e> + cos|d>` on the cat
/// qubit and the identity on its complement.
pub fn cat_rotation_fidelity(gamma: f64, alpha_i: f64, cutoff: FockCutoff) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid("gamma", gamma, "must be positive"));
    }
    let e = make_cat(gamma, Parity::Even, cutoff)?;
    let d = make_cat(gamma, Parity::Odd, cutoff)?;
    let theta = 2.0 * gamma * alpha_i;
    let rotated = e.coeffs() * real(theta.cos()) + d.coeffs() * Complex64::new(0.0, theta.sin());
    let basis = DisplacementBasis::new(cutoff);
    let displaced = basis.displace(Complex64::new(0.0, alpha_i), e.coeffs());
    Ok(displaced.dotc(&rotated).norm_sqr())
}

/// `|<d|U(pi/2)|e>|^2` for the cat states of amplitude `gamma`, formed from
/// the truncated matrices.
pub fn parity_rotation_fidelity(gamma: f64, cutoff: FockCutoff) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid("gamma", gamma, "must be positive"));
    }
    let e = make_cat(gamma, Parity::Even, cutoff)?;
    let d = make_cat(gamma, Parity::Odd, cutoff)?;
    let u = parity_rotation(std::f64::consts::FRAC_PI_2, cutoff);
    let ue = u.matrix() * e.coeffs();
    Ok(d.coeffs().dotc(&ue).norm_sqr())
}

/// `<psi|Pi(alpha)|psi>` for a single-mode state.
pub fn displaced_parity_expectation(
    state: &SingleModeState,
    alpha: Complex64,
    basis: &DisplacementBasis,
) -> Result<f64> {
    crate::fock::check_cutoff(state.cutoff(), basis.cutoff())?;
    let v = basis.displace(-alpha, state.coeffs());
    Ok(v.iter()
        .enumerate()
        .map(|(m, z)| if m % 2 == 0 { z.norm_sqr() } else { -z.norm_sqr() })
        .sum())
}

/// Real symmetric matrix with ones on the pair couplings `|2n><2n+1| + h.c.`
/// (the `Gamma_x` / `s_x` pattern).
pub(crate) fn pair_flip(cutoff: FockCutoff) -> FockOperator {
    let d = cutoff.dim();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for k in (0..d.saturating_sub(1)).step_by(2) {
        m[(k, k + 1)] = real(1.0);
        m[(k + 1, k)] = real(1.0);
    }
    FockOperator::new_unchecked(m, true)
}
