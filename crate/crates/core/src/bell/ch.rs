use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::PI;

use super::correlations::{chi_coefficients, FamilyCorrelations};
use super::{ch_combination, BellSettings, StateModel};
use crate::error::Result;
use crate::fock::{expectation, FockOperator, TwoModeState};
use crate::observables::{ch_projector, ProjectorSetting};
use crate::phase_space::{
    q_ecs, q_marginal, q_marginal_ecs, q_marginal_single_photon, q_marginal_tmss, q_single_photon,
    q_tmss, q_two_mode, Mode, PhasePoint,
};

/// Qubit CH combination with projectors `|theta><theta|`,
/// `|theta> = cos(theta)|0> + sin(theta)|1>`, evaluated as matrix expectations.
///
/// The projectors act on `span{|0>, |1>}` only; weight of the state outside
/// that span is reported by [`qubit_leakage`].
pub fn ch_qubit(state: &TwoModeState, s: &BellSettings) -> Result<f64> {
    let angles = s.as_angles()?;
    let cutoff = state.cutoff();
    let ops: Vec<FockOperator> = angles
        .iter()
        .map(|&theta| ch_projector(ProjectorSetting { theta }, cutoff))
        .collect();
    let id = FockOperator::identity(cutoff);
    let e = |i: usize, j: usize| expectation(state, &ops[i], &ops[j]);
    Ok(e(0, 2)? + e(0, 3)? + e(1, 2)? - e(1, 3)? - expectation(state, &ops[0], &id)?
        - expectation(state, &id, &ops[2])?)
}

/// Norm of the state outside `span{|0>,|1>} (x) span{|0>,|1>}`.
pub fn qubit_leakage(state: &TwoModeState) -> f64 {
    let c = state.coeffs();
    let d = c.nrows().min(2);
    let inside: f64 = (0..d)
        .flat_map(|m| (0..d).map(move |n| (m, n)))
        .map(|(m, n)| c[(m, n)].norm_sqr())
        .sum();
    (1.0 - inside).max(0.0)
}

fn delta_factor(t: f64, tp: f64) -> Matrix2<f64> {
    let v = nalgebra::Vector2::new(t.cos(), t.sin());
    let w = nalgebra::Vector2::new(tp.cos(), tp.sin());
    (v * w.transpose() - w * v.transpose()) * v.dot(&w)
}

pub(crate) fn delta_operator(angles: [f64; 4]) -> Matrix4<f64> {
    let [t1, t1p, t2, t2p] = angles;
    delta_factor(t1, t1p).kronecker(&delta_factor(t2, t2p))
}

/// Smallest and largest eigenvalue of the two-qubit operator `Delta` for
/// these settings, from a direct diagonalization.
pub fn delta_expectation_extremes(s: &BellSettings) -> Result<(f64, f64)> {
    let eig = SymmetricEigen::new(delta_operator(s.as_angles()?));
    let lo = eig.eigenvalues.min();
    let hi = eig.eigenvalues.max();
    Ok((lo, hi))
}

/// Setting-dependent CH range `((-1 - sqrt(1 - 4 delta))/2, (-1 + sqrt(1 - 4 delta))/2)`
/// with `delta = -|sin 2(t1 - t1') sin 2(t2 - t2')| / 4`.
pub fn ch_delta_bounds(s: &BellSettings) -> Result<(f64, f64)> {
    let [t1, t1p, t2, t2p] = s.as_angles()?;
    let delta = -((2.0 * (t1 - t1p)).sin() * (2.0 * (t2 - t2p)).sin()).abs() / 4.0;
    let root = (1.0 - 4.0 * delta).sqrt();
    Ok(((-1.0 - root) / 2.0, (-1.0 + root) / 2.0))
}

fn q_joint_closed(model: StateModel, p: PhasePoint) -> Result<f64> {
    match model {
        StateModel::Tmss { r } => q_tmss(p, r),
        StateModel::Ecs { gamma } => q_ecs(p, gamma),
        StateModel::SinglePhoton => Ok(q_single_photon(p)),
    }
}

fn q_marginal_closed(model: StateModel, alpha: Complex64) -> Result<f64> {
    match model {
        StateModel::Tmss { r } => q_marginal_tmss(alpha, r),
        StateModel::Ecs { gamma } => q_marginal_ecs(alpha, gamma),
        StateModel::SinglePhoton => Ok(q_marginal_single_photon(alpha)),
    }
}

/// CH combination with displaced vacuum projectors from closed-form Q
/// functions: `pi^2 [Q(a,b) + Q(a,b') + Q(a',b) - Q(a',b')] - pi [Q_1(a) + Q_2(b)]`.
/// Both marginals of all three states coincide.
pub fn ch_q_formalism(model: StateModel, s: &BellSettings) -> Result<f64> {
    model.validate()?;
    let d = s.as_displacements()?;
    let [a, ap, b, bp] = d;
    let q = |x, y| q_joint_closed(model, PhasePoint::new(x, y));
    let joint = q(a, b)? + q(a, bp)? + q(ap, b)? - q(ap, bp)?;
    Ok(PI * PI * joint - PI * (q_marginal_closed(model, a)? + q_marginal_closed(model, b)?))
}

/// [`ch_q_formalism`] for an arbitrary truncated state.
pub fn ch_q_matrix(state: &TwoModeState, s: &BellSettings) -> Result<f64> {
    let d = s.as_displacements()?;
    Ok(ch_combination(
        d,
        |x, y| PI * PI * q_two_mode(PhasePoint::new(x, y), state),
        |x| PI * q_marginal(state, Mode::First, x),
        |y| PI * q_marginal(state, Mode::Second, y),
    ))
}

/// `<chi_1(t1) chi_2(t2)>` for the two-mode squeezed state:
/// `(c1^2 c2^2 cosh^2 r + s1^2 s2^2 sinh^2 r)/cosh 2r + c1 s1 c2 s2 tanh 2r`.
pub fn chi_joint_tmss(r: f64, t1: f64, t2: f64) -> f64 {
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    let (ch, sh) = (r.cosh(), r.sinh());
    (c1 * c1 * c2 * c2 * ch * ch + s1 * s1 * s2 * s2 * sh * sh) / (2.0 * r).cosh()
        + c1 * s1 * c2 * s2 * (2.0 * r).tanh()
}

/// `<chi(t) (x) 1>` for the two-mode squeezed state.
pub fn chi_marginal_tmss(r: f64, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    (c * c * r.cosh().powi(2) + s * s * r.sinh().powi(2)) / (2.0 * r).cosh()
}

/// `<chi_1(t1) chi_2(t2)>` for the entangled coherent state with `K = K(gamma)`:
/// `(s1^2 c2^2 + c1^2 s2^2)/2 - K s1 c1 s2 c2`. The marginals are 1/2.
pub fn chi_joint_ecs(k: f64, t1: f64, t2: f64) -> f64 {
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    0.5 * (s1 * s1 * c2 * c2 + c1 * c1 * s2 * s2) - k * s1 * c1 * s2 * c2
}

/// Parity-projector correlations in the form they are often quoted, kept for
/// comparison against the complete expressions.
pub mod printed {
    /// Only the interference term `s1 c1 s2 c2 tanh 2r`.
    pub fn chi_joint_tmss(r: f64, t1: f64, t2: f64) -> f64 {
        t1.sin() * t1.cos() * t2.sin() * t2.cos() * (2.0 * r).tanh()
    }

    /// `(s1^2 c2^2 + s1^2 c2^2)/2 - K s1 c1 s2 c2`, with the first term doubled.
    pub fn chi_joint_ecs(k: f64, t1: f64, t2: f64) -> f64 {
        let (s1, c1) = t1.sin_cos();
        let (s2, c2) = t2.sin_cos();
        0.5 * (s1 * s1 * c2 * c2 + s1 * s1 * c2 * c2) - k * s1 * c1 * s2 * c2
    }
}

/// CH combination with rotated even-parity projectors `chi(theta)` from the
/// closed-form correlations. The single-photon state behaves as the
/// entangled coherent state with `K = 1`.
pub fn ch_parity_formalism(model: StateModel, s: &BellSettings) -> Result<f64> {
    model.validate()?;
    let angles = s.as_angles()?;
    Ok(match model {
        StateModel::Tmss { r } => ch_combination(
            angles,
            |x, y| chi_joint_tmss(r, x, y),
            |x| chi_marginal_tmss(r, x),
            |y| chi_marginal_tmss(r, y),
        ),
        StateModel::Ecs { gamma } => {
            let k = super::k_of_gamma(gamma)?;
            ch_combination(angles, |x, y| chi_joint_ecs(k, x, y), |_| 0.5, |_| 0.5)
        }
        StateModel::SinglePhoton => {
            ch_combination(angles, |x, y| chi_joint_ecs(1.0, x, y), |_| 0.5, |_| 0.5)
        }
    })
}

/// [`ch_parity_formalism`] for an arbitrary truncated state.
pub fn ch_parity_matrix(state: &TwoModeState, s: &BellSettings) -> Result<f64> {
    let angles = s.as_angles()?;
    let f = FamilyCorrelations::chi(state)?;
    Ok(ch_combination(
        angles,
        |x, y| f.joint(&chi_coefficients(x), &chi_coefficients(y)),
        |x| f.first(&chi_coefficients(x)),
        |y| f.second(&chi_coefficients(y)),
    ))
}
