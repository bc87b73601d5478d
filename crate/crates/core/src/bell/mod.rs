//! Bell-CHSH and Bell-CH functionals.
//!
//! CHSH combinations `E(a,b) + E(a,b') + E(a',b) - E(a',b')` are bounded by 2
//! for local theories and by `2 sqrt 2` in quantum mechanics. CH combinations
//! `P(a,b) + P(a,b') + P(a',b) - P(a',b') - P(a) - P(b)` lie in `[-1, 0]`
//! locally and in `[-(1+sqrt 2)/2, (sqrt 2 - 1)/2]` quantum mechanically.

mod ch;
mod chsh;
mod correlations;
mod functional;

pub use ch::{
    ch_delta_bounds, ch_parity_formalism, ch_parity_matrix, ch_q_formalism, ch_q_matrix,
    ch_qubit, chi_joint_ecs, chi_joint_tmss, chi_marginal_tmss, delta_expectation_extremes,
    printed, qubit_leakage,
};
pub use chsh::{
    chsh_bw_matrix, chsh_gbw, chsh_gisin_peres, chsh_pseudospin, k_of_gamma,
    pseudospin_correlation_ecs, pseudospin_correlation_tmss,
};
pub use correlations::FamilyCorrelations;
pub(crate) use correlations::truncate_to;
pub use functional::{BellFunctional, DisplacementDomain, EvalPath, FunctionalOptions, StateSpec};

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{make_ecs, make_tmss, FockCutoff, TwoModeState};
use crate::observables::{DisplacementSetting, ProjectorSetting, PseudospinSetting};
use crate::phase_space::check_amplitude;

/// Quantum maximum of the CHSH combination.
pub const CIRELSON_BOUND: f64 = 2.0 * SQRT_2;
/// Quantum maximum of the CH combination, `(sqrt 2 - 1)/2`.
pub const CH_UPPER_BOUND: f64 = (SQRT_2 - 1.0) / 2.0;
/// Quantum minimum of the CH combination, `-(1 + sqrt 2)/2`.
pub const CH_LOWER_BOUND: f64 = -(1.0 + SQRT_2) / 2.0;

/// One local measurement setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurementSetting {
    Pseudospin(PseudospinSetting),
    Displacement(DisplacementSetting),
    Projector(ProjectorSetting),
}

impl MeasurementSetting {
    fn kind(&self) -> &'static str {
        match self {
            MeasurementSetting::Pseudospin(_) => "pseudospin",
            MeasurementSetting::Displacement(_) => "displacement",
            MeasurementSetting::Projector(_) => "projector",
        }
    }

    /// Angles wrapped into `(-pi, pi]`; displacements unchanged.
    pub fn reduced(self) -> Self {
        match self {
            MeasurementSetting::Pseudospin(s) => MeasurementSetting::Pseudospin(PseudospinSetting {
                theta: wrap_angle(s.theta),
                phi: wrap_angle(s.phi),
            }),
            MeasurementSetting::Projector(s) => MeasurementSetting::Projector(ProjectorSetting {
                theta: wrap_angle(s.theta),
            }),
            d => d,
        }
    }
}

pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// The four settings `(a, a', b, b')`; `a`, `a'` belong to mode 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellSettings {
    pub a: MeasurementSetting,
    pub a_prime: MeasurementSetting,
    pub b: MeasurementSetting,
    pub b_prime: MeasurementSetting,
}

impl BellSettings {
    pub fn pseudospin(a: PseudospinSetting, a_prime: PseudospinSetting, b: PseudospinSetting, b_prime: PseudospinSetting) -> Self {
        use MeasurementSetting::Pseudospin as P;
        BellSettings {
            a: P(a),
            a_prime: P(a_prime),
            b: P(b),
            b_prime: P(b_prime),
        }
    }

    /// Settings `(alpha, alpha', beta, beta')`.
    pub fn displacements(
        alpha: num_complex::Complex64,
        alpha_prime: num_complex::Complex64,
        beta: num_complex::Complex64,
        beta_prime: num_complex::Complex64,
    ) -> Self {
        let d = |alpha| MeasurementSetting::Displacement(DisplacementSetting { alpha });
        BellSettings {
            a: d(alpha),
            a_prime: d(alpha_prime),
            b: d(beta),
            b_prime: d(beta_prime),
        }
    }

    /// Angle settings `(theta_1, theta_1', theta_2, theta_2')`.
    pub fn angles(theta1: f64, theta1_prime: f64, theta2: f64, theta2_prime: f64) -> Self {
        let p = |theta| MeasurementSetting::Projector(ProjectorSetting { theta });
        BellSettings {
            a: p(theta1),
            a_prime: p(theta1_prime),
            b: p(theta2),
            b_prime: p(theta2_prime),
        }
    }

    pub fn reduced(self) -> Self {
        BellSettings {
            a: self.a.reduced(),
            a_prime: self.a_prime.reduced(),
            b: self.b.reduced(),
            b_prime: self.b_prime.reduced(),
        }
    }

    fn all(&self) -> [MeasurementSetting; 4] {
        [self.a, self.a_prime, self.b, self.b_prime]
    }

    pub fn as_pseudospin(&self) -> Result<[PseudospinSetting; 4]> {
        let mut out = [PseudospinSetting { theta: 0.0, phi: 0.0 }; 4];
        for (o, s) in out.iter_mut().zip(self.all()) {
            match s {
                MeasurementSetting::Pseudospin(p) => *o = p,
                _ => return Err(Error::SettingKind { expected: "pseudospin" }),
            }
        }
        Ok(out)
    }

    pub fn as_displacements(&self) -> Result<[num_complex::Complex64; 4]> {
        let mut out = [num_complex::Complex64::new(0.0, 0.0); 4];
        for (o, s) in out.iter_mut().zip(self.all()) {
            match s {
                MeasurementSetting::Displacement(d) => *o = d.alpha,
                _ => return Err(Error::SettingKind { expected: "displacement" }),
            }
        }
        Ok(out)
    }

    pub fn as_angles(&self) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for (o, s) in out.iter_mut().zip(self.all()) {
            match s {
                MeasurementSetting::Projector(p) => *o = p.theta,
                _ => return Err(Error::SettingKind { expected: "projector angle" }),
            }
        }
        Ok(out)
    }

    /// True when all four settings are of one kind.
    pub fn is_homogeneous(&self) -> bool {
        let k = self.a.kind();
        self.all().iter().all(|s| s.kind() == k)
    }
}

/// Which observables a Bell functional uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formalism {
    /// CHSH with pseudospin operators.
    Pseudospin,
    /// CHSH with displaced parity, `alpha = beta = 0` held fixed.
    Bw,
    /// CHSH with displaced parity, all four displacements free.
    Gbw,
    /// CHSH with finite-dimensional Gisin-Peres observables.
    GisinPeres,
    /// CH with qubit projectors `|theta><theta|`.
    ChQubit,
    /// CH with displaced vacuum projectors, all four displacements free.
    ChQ,
    /// CH with displaced vacuum projectors, `alpha = beta = 0` held fixed.
    ChQBw,
    /// CH with rotated even-parity projectors.
    ChParity,
}

impl Formalism {
    pub const ALL: [Formalism; 8] = [
        Formalism::Pseudospin,
        Formalism::Bw,
        Formalism::Gbw,
        Formalism::GisinPeres,
        Formalism::ChQubit,
        Formalism::ChQ,
        Formalism::ChQBw,
        Formalism::ChParity,
    ];

    pub fn is_ch(self) -> bool {
        matches!(
            self,
            Formalism::ChQubit | Formalism::ChQ | Formalism::ChQBw | Formalism::ChParity
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Formalism::Pseudospin => "pseudospin",
            Formalism::Bw => "bw",
            Formalism::Gbw => "gbw",
            Formalism::GisinPeres => "gisin_peres",
            Formalism::ChQubit => "ch_qubit",
            Formalism::ChQ => "ch_q",
            Formalism::ChQBw => "ch_q_bw",
            Formalism::ChParity => "ch_parity",
        }
    }

    /// Checks a value against the quantum bound of its family.
    pub fn within_quantum_bounds(self, value: f64, tol: f64) -> bool {
        if self.is_ch() {
            value >= CH_LOWER_BOUND - tol && value <= CH_UPPER_BOUND + tol
        } else {
            value.abs() <= CIRELSON_BOUND + tol
        }
    }
}

impl std::str::FromStr for Formalism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Formalism::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown formalism '{s}'")))
    }
}

/// Parameterized states with closed-form phase-space functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum StateModel {
    Tmss { r: f64 },
    Ecs { gamma: f64 },
    SinglePhoton,
}

impl StateModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StateModel::Tmss { r } => {
                if !(r >= 0.0) || !r.is_finite() {
                    return Err(crate::error::invalid("r", r, "squeezing must be finite and non-negative"));
                }
                Ok(())
            }
            StateModel::Ecs { gamma } => check_amplitude(gamma),
            StateModel::SinglePhoton => Ok(()),
        }
    }

    pub fn default_cutoff(&self) -> FockCutoff {
        match *self {
            StateModel::Tmss { r } => FockCutoff::for_tmss(r),
            StateModel::Ecs { gamma } => FockCutoff::for_ecs(gamma),
            StateModel::SinglePhoton => FockCutoff::for_mean_photons(0.0),
        }
    }

    pub fn build(&self, cutoff: FockCutoff) -> Result<TwoModeState> {
        self.validate()?;
        match *self {
            StateModel::Tmss { r } => make_tmss(r, cutoff),
            StateModel::Ecs { gamma } => make_ecs(gamma, cutoff),
            StateModel::SinglePhoton => Ok(TwoModeState::single_photon(cutoff)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StateModel::Tmss { .. } => "tmss",
            StateModel::Ecs { .. } => "ecs",
            StateModel::SinglePhoton => "single_photon",
        }
    }

    pub fn param(&self) -> Option<f64> {
        match *self {
            StateModel::Tmss { r } => Some(r),
            StateModel::Ecs { gamma } => Some(gamma),
            StateModel::SinglePhoton => None,
        }
    }
}

/// Optimizer bookkeeping attached to a result.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub evaluations: usize,
    pub restarts: usize,
    pub converged: bool,
}

/// An optimized Bell value. For `max_abs` optimizations `value` is `|B|`;
/// otherwise it is the signed functional value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellResult {
    pub value: f64,
    pub settings: BellSettings,
    pub formalism: Formalism,
    pub diagnostics: Diagnostics,
}

impl BellResult {
    /// Checks the family bound (`|B| <= 2 sqrt 2` or the CH range).
    pub fn within_quantum_bounds(&self, tol: f64) -> bool {
        self.formalism.within_quantum_bounds(self.value, tol)
    }
}

/// `E(a,b) + E(a,b') + E(a',b) - E(a',b')`.
pub(crate) fn chsh_combination<S: Copy>(s: [S; 4], mut e: impl FnMut(S, S) -> f64) -> f64 {
    let [a, ap, b, bp] = s;
    e(a, b) + e(a, bp) + e(ap, b) - e(ap, bp)
}

/// `P(a,b) + P(a,b') + P(a',b) - P(a',b') - P_1(a) - P_2(b)`.
pub(crate) fn ch_combination<S: Copy>(
    s: [S; 4],
    mut joint: impl FnMut(S, S) -> f64,
    mut first: impl FnMut(S) -> f64,
    mut second: impl FnMut(S) -> f64,
) -> f64 {
    let [a, _, b, _] = s;
    chsh_combination(s, &mut joint) - first(a) - second(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_angle_range() {
        for x in [-10.0, -PI, -1.0, 0.0, 3.0, PI, 7.5, 100.0] {
            let y = wrap_angle(x);
            assert!(y > -PI - 1e-15 && y <= PI + 1e-15);
            assert!(((x - y) / (2.0 * PI)).fract().abs() < 1e-9 || ((x - y) / (2.0 * PI)).fract().abs() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn formalism_names_round_trip() {
        for f in Formalism::ALL {
            assert_eq!(f.name().parse::<Formalism>().unwrap(), f);
        }
        assert!("bogus".parse::<Formalism>().is_err());
    }

    #[test]
    fn settings_kind_checks() {
        let s = BellSettings::angles(0.0, 1.0, 2.0, 3.0);
        assert!(s.is_homogeneous());
        assert!(s.as_angles().is_ok());
        assert!(matches!(s.as_pseudospin(), Err(Error::SettingKind { .. })));
        let mut mixed = s;
        mixed.b = MeasurementSetting::Pseudospin(PseudospinSetting { theta: 0.0, phi: 0.0 });
        assert!(!mixed.is_homogeneous());
    }
}
