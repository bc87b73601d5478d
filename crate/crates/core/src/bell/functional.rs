use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ch::{ch_parity_formalism, ch_q_formalism, ch_q_matrix};
use super::chsh::{chsh_gbw, pseudospin_correlation_ecs, pseudospin_correlation_tmss};
use super::correlations::{
    chi_coefficients, gisin_peres_coefficients, pseudospin_coefficients, qubit_projector_coefficients,
    truncate_to, FamilyCorrelations,
};
use super::{ch_combination, chsh_combination, k_of_gamma, BellSettings, Formalism, StateModel};
use crate::error::{Error, Result};
use crate::fock::{FockCutoff, TwoModeState};
use crate::observables::{GammaZ, PseudospinSetting};
use crate::phase_space::{PhasePoint, WignerOracle};

/// The state a functional is evaluated on.
#[derive(Debug, Clone)]
pub enum StateSpec {
    Model(StateModel),
    Custom(Arc<TwoModeState>),
}

impl From<StateModel> for StateSpec {
    fn from(m: StateModel) -> Self {
        StateSpec::Model(m)
    }
}

impl From<TwoModeState> for StateSpec {
    fn from(s: TwoModeState) -> Self {
        StateSpec::Custom(Arc::new(s))
    }
}

/// Closed-form correlations or truncated-matrix evaluation. Custom states
/// always use the matrix path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalPath {
    #[default]
    Analytic,
    Matrix,
}

/// Whether displacement settings range over the complex plane or the
/// imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisplacementDomain {
    #[default]
    Complex,
    Imaginary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalOptions {
    pub path: EvalPath,
    pub domain: DisplacementDomain,
    /// Fock cutoff for states built from a model; the model default otherwise.
    pub cutoff: Option<FockCutoff>,
    /// Dimension `N` of the Gisin-Peres observables.
    pub gp_dimension: usize,
    pub gp_convention: GammaZ,
    /// Half-width of the parameter box for displacements, in units of
    /// [`BellFunctional::displacement_scale`].
    pub displacement_box: Option<f64>,
}

impl Default for FunctionalOptions {
    fn default() -> Self {
        FunctionalOptions {
            path: EvalPath::Analytic,
            domain: DisplacementDomain::Complex,
            cutoff: None,
            gp_dimension: 64,
            gp_convention: GammaZ::Pauli,
            displacement_box: None,
        }
    }
}

impl Serialize for FockCutoff {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.n_max() as u64)
    }
}

impl<'de> Deserialize<'de> for FockCutoff {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let n = usize::deserialize(d)?;
        FockCutoff::new(n).map_err(serde::de::Error::custom)
    }
}

type Decoder = Arc<dyn Fn(&[f64]) -> BellSettings + Send + Sync>;
type Evaluator = Arc<dyn Fn(&BellSettings) -> f64 + Send + Sync>;

/// A Bell functional over a flat vector of real setting parameters.
#[derive(Clone)]
pub struct BellFunctional {
    formalism: Formalism,
    bounds: Vec<(f64, f64)>,
    scale: f64,
    periodic: bool,
    decode: Decoder,
    value: Evaluator,
}

impl fmt::Debug for BellFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BellFunctional")
            .field("formalism", &self.formalism)
            .field("dim", &self.dim())
            .field("scale", &self.scale)
            .finish()
    }
}

enum Layout {
    Pseudospin,
    Angles,
    Displacements { restricted: bool, domain: DisplacementDomain, scale: f64 },
}

impl Layout {
    fn dim(&self) -> usize {
        match self {
            Layout::Pseudospin => 8,
            Layout::Angles => 4,
            Layout::Displacements { restricted, domain, .. } => {
                let per = if *domain == DisplacementDomain::Complex { 2 } else { 1 };
                let free = if *restricted { 2 } else { 4 };
                per * free
            }
        }
    }

    fn decoder(self) -> Decoder {
        match self {
            Layout::Pseudospin => Arc::new(|x: &[f64]| {
                let p = |i: usize| PseudospinSetting { theta: x[2 * i], phi: x[2 * i + 1] };
                BellSettings::pseudospin(p(0), p(1), p(2), p(3))
            }),
            Layout::Angles => Arc::new(|x: &[f64]| BellSettings::angles(x[0], x[1], x[2], x[3])),
            Layout::Displacements { restricted, domain, scale } => Arc::new(move |x: &[f64]| {
                let c = |i: usize| match domain {
                    DisplacementDomain::Complex => Complex64::new(x[2 * i], x[2 * i + 1]) * scale,
                    DisplacementDomain::Imaginary => Complex64::new(0.0, x[i] * scale),
                };
                if restricted {
                    let z = Complex64::new(0.0, 0.0);
                    BellSettings::displacements(z, c(0), z, c(1))
                } else {
                    BellSettings::displacements(c(0), c(1), c(2), c(3))
                }
            }),
        }
    }
}

fn nan_on_err(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

impl BellFunctional {
    pub fn new(state: impl Into<StateSpec>, formalism: Formalism, options: FunctionalOptions) -> Result<Self> {
        let state = state.into();
        let model = match &state {
            StateSpec::Model(m) => {
                m.validate()?;
                Some(*m)
            }
            StateSpec::Custom(_) => None,
        };
        let analytic = options.path == EvalPath::Analytic && model.is_some();
        let built = || -> Result<Arc<TwoModeState>> {
            match &state {
                StateSpec::Model(m) => Ok(Arc::new(m.build(options.cutoff.unwrap_or_else(|| m.default_cutoff()))?)),
                StateSpec::Custom(s) => Ok(Arc::clone(s)),
            }
        };
        let angle_bounds = |n: usize| vec![(-std::f64::consts::PI, std::f64::consts::PI); n];

        let (layout, value): (Layout, Evaluator) = match formalism {
            Formalism::Pseudospin => {
                let value: Evaluator = match model {
                    Some(StateModel::Tmss { r }) if analytic => Arc::new(move |s: &BellSettings| {
                        nan_on_err(s.as_pseudospin().map(|p| chsh_combination(p, |a, b| pseudospin_correlation_tmss(r, a, b))))
                    }),
                    Some(StateModel::Ecs { gamma }) if analytic => {
                        let k = k_of_gamma(gamma)?;
                        Arc::new(move |s: &BellSettings| {
                            nan_on_err(s.as_pseudospin().map(|p| chsh_combination(p, |a, b| pseudospin_correlation_ecs(k, a, b))))
                        })
                    }
                    _ => {
                        let f = FamilyCorrelations::pseudospin(&*built()?)?;
                        Arc::new(move |s: &BellSettings| {
                            nan_on_err(s.as_pseudospin().map(|p| {
                                chsh_combination(p, |a, b| {
                                    f.joint(&pseudospin_coefficients(a.theta, a.phi), &pseudospin_coefficients(b.theta, b.phi))
                                })
                            }))
                        })
                    }
                };
                (Layout::Pseudospin, value)
            }
            Formalism::GisinPeres => {
                let t = truncate_to(&*built()?, options.gp_dimension)?;
                let f = FamilyCorrelations::gisin_peres(&t, options.gp_convention)?;
                let value: Evaluator = Arc::new(move |s: &BellSettings| {
                    nan_on_err(s.as_angles().map(|a| {
                        chsh_combination(a, |x, y| f.joint(&gisin_peres_coefficients(x), &gisin_peres_coefficients(y)))
                    }))
                });
                (Layout::Angles, value)
            }
            Formalism::ChQubit => {
                let f = FamilyCorrelations::qubit_projector(&*built()?)?;
                let value: Evaluator = Arc::new(move |s: &BellSettings| {
                    nan_on_err(s.as_angles().map(|a| {
                        ch_combination(
                            a,
                            |x, y| f.joint(&qubit_projector_coefficients(x), &qubit_projector_coefficients(y)),
                            |x| f.first(&qubit_projector_coefficients(x)),
                            |y| f.second(&qubit_projector_coefficients(y)),
                        )
                    }))
                });
                (Layout::Angles, value)
            }
            Formalism::ChParity => {
                let value: Evaluator = match model {
                    Some(m) if analytic => Arc::new(move |s: &BellSettings| nan_on_err(ch_parity_formalism(m, s))),
                    _ => {
                        let f = FamilyCorrelations::chi(&*built()?)?;
                        Arc::new(move |s: &BellSettings| {
                            nan_on_err(s.as_angles().map(|a| {
                                ch_combination(
                                    a,
                                    |x, y| f.joint(&chi_coefficients(x), &chi_coefficients(y)),
                                    |x| f.first(&chi_coefficients(x)),
                                    |y| f.second(&chi_coefficients(y)),
                                )
                            }))
                        })
                    }
                };
                (Layout::Angles, value)
            }
            Formalism::Bw | Formalism::Gbw => {
                if model == Some(StateModel::SinglePhoton) {
                    return Err(Error::Unsupported(format!(
                        "formalism {} needs a tmss or ecs state",
                        formalism.name()
                    )));
                }
                let scale = Self::default_scale(model, formalism);
                let half = options.displacement_box.unwrap_or_else(|| Self::default_box(model, formalism));
                let value: Evaluator = match model {
                    Some(m) if analytic => Arc::new(move |s: &BellSettings| nan_on_err(chsh_gbw(m, s))),
                    _ => {
                        let oracle = WignerOracle::new(&*built()?, half * scale * std::f64::consts::SQRT_2);
                        Arc::new(move |s: &BellSettings| {
                            nan_on_err(s.as_displacements().map(|d| {
                                chsh_combination(d, |x, y| oracle.parity_correlation(PhasePoint::new(x, y)))
                            }))
                        })
                    }
                };
                let layout = Layout::Displacements {
                    restricted: formalism == Formalism::Bw,
                    domain: options.domain,
                    scale,
                };
                return Ok(Self::assemble(formalism, layout, half, scale, value));
            }
            Formalism::ChQ | Formalism::ChQBw => {
                let scale = Self::default_scale(model, formalism);
                let half = options.displacement_box.unwrap_or_else(|| Self::default_box(model, formalism));
                let value: Evaluator = match model {
                    Some(m) if analytic => Arc::new(move |s: &BellSettings| nan_on_err(ch_q_formalism(m, s))),
                    _ => {
                        let st = built()?;
                        Arc::new(move |s: &BellSettings| nan_on_err(ch_q_matrix(&st, s)))
                    }
                };
                let layout = Layout::Displacements {
                    restricted: formalism == Formalism::ChQBw,
                    domain: options.domain,
                    scale,
                };
                return Ok(Self::assemble(formalism, layout, half, scale, value));
            }
        };
        let n = layout.dim();
        Ok(BellFunctional {
            formalism,
            bounds: angle_bounds(n),
            scale: 1.0,
            periodic: true,
            decode: layout.decoder(),
            value,
        })
    }

    fn assemble(formalism: Formalism, layout: Layout, half: f64, scale: f64, value: Evaluator) -> Self {
        let n = layout.dim();
        BellFunctional {
            formalism,
            bounds: vec![(-half, half); n],
            scale,
            periodic: false,
            decode: layout.decoder(),
            value,
        }
    }

    /// Factor between box coordinates and displacement amplitudes. Optimal
    /// displacements shrink like `1/sqrt(cosh 2r)` for the squeezed state and
    /// like `1/gamma` for the entangled coherent state.
    pub fn default_scale(model: Option<StateModel>, formalism: Formalism) -> f64 {
        match (formalism, model) {
            (Formalism::Bw | Formalism::Gbw, Some(StateModel::Tmss { r })) => 1.0 / (2.0 * r).cosh().sqrt(),
            (Formalism::Bw | Formalism::Gbw, Some(StateModel::Ecs { gamma })) => 1.0 / gamma.abs().max(1.0),
            _ => 1.0,
        }
    }

    /// Half-width of the displacement box. Vacuum-projector functionals flatten
    /// out far from the origin, so their boxes stay close to the region where
    /// the state has weight.
    pub fn default_box(model: Option<StateModel>, formalism: Formalism) -> f64 {
        match (formalism, model) {
            (Formalism::Bw | Formalism::Gbw, Some(StateModel::Tmss { .. })) => 3.0,
            (Formalism::Bw | Formalism::Gbw, Some(StateModel::Ecs { .. })) => 1.0,
            (Formalism::ChQ | Formalism::ChQBw, Some(StateModel::Ecs { gamma })) => gamma.abs() + 1.5,
            (Formalism::ChQ | Formalism::ChQBw, Some(_)) => 1.5,
            _ => 2.0,
        }
    }

    pub fn formalism(&self) -> Formalism {
        self.formalism
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// True when every parameter is an angle; such parameters are left
    /// unbounded during optimization.
    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn displacement_scale(&self) -> f64 {
        self.scale
    }

    /// Replaces the parameter box.
    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.len() != self.dim() {
            return Err(crate::error::invalid("bounds", bounds.len() as f64, "length must match the functional dimension"));
        }
        self.bounds = bounds;
        Ok(self)
    }

    pub fn settings(&self, x: &[f64]) -> BellSettings {
        (self.decode)(x)
    }

    /// Signed functional value at a parameter vector; NaN if the evaluation
    /// failed.
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.value)(&self.settings(x))
    }

    /// Value at explicit settings of the right kind.
    pub fn eval_settings(&self, s: &BellSettings) -> f64 {
        (self.value)(s)
    }
}
