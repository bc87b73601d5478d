//! Data behind the standard plots: optimized Bell values against the state
//! parameter, and displaced-parity expectations against the displacement.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bell::{BellFunctional, Formalism, FunctionalOptions, StateModel};
use crate::error::{Error, Result};
use crate::observables::NumberStateParity;
use crate::optimize::{linspace, sweep, Direction, OptimizeSpec};
use crate::phase_space::even_cat_displaced_parity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FigureId {
    #[serde(rename = "1a")]
    F1a,
    #[serde(rename = "1b")]
    F1b,
    #[serde(rename = "2a")]
    F2a,
    #[serde(rename = "2b")]
    F2b,
    #[serde(rename = "3a")]
    F3a,
    #[serde(rename = "3b")]
    F3b,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::F1a,
        FigureId::F1b,
        FigureId::F2a,
        FigureId::F2b,
        FigureId::F3a,
        FigureId::F3b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::F1a => "1a",
            FigureId::F1b => "1b",
            FigureId::F2a => "2a",
            FigureId::F2b => "2b",
            FigureId::F3a => "3a",
            FigureId::F3b => "3b",
        }
    }

    /// Column names of the dataset, in order.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            FigureId::F1a => &["r", "B_bw", "B_gbw", "B_pseudospin"],
            FigureId::F1b => &["abs_alpha", "P_n1", "P_n2", "P_n3"],
            FigureId::F2a => &["gamma", "B_bw", "B_gbw", "B_pseudospin"],
            FigureId::F2b => &["alpha_im", "P_gamma2", "P_gamma5"],
            FigureId::F3a => &["r", "B_ch_bw", "B_ch_gbw", "B_ch_parity"],
            FigureId::F3b => &["gamma", "B_ch_bw", "B_ch_gbw", "B_ch_parity"],
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown figure '{s}' (expected one of 1a 1b 2a 2b 3a 3b)")))
    }
}

/// A named table of numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub id: FigureId,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    /// Number of grid points along the horizontal axis.
    pub points: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            points: 61,
            restarts: 16,
            seed: 0,
        }
    }
}

/// Squeezing grid `[0, 3]`.
pub fn r_grid(points: usize) -> Vec<f64> {
    linspace(0.0, 3.0, points)
}

/// Amplitude grid on `(0, 3]`: the `[0, 3]` grid with its first point
/// dropped, since the entangled coherent state needs `gamma != 0`.
pub fn gamma_grid(points: usize) -> Vec<f64> {
    linspace(0.0, 3.0, points).into_iter().skip(1).collect()
}

fn curve(
    grid: &[f64],
    model: impl Fn(f64) -> StateModel,
    formalism: Formalism,
    direction: Direction,
    opts: &FigureOptions,
) -> Result<Vec<f64>> {
    let spec = OptimizeSpec::new(direction)
        .with_restarts(opts.restarts)
        .with_seed(opts.seed);
    let res = sweep(
        |p| BellFunctional::new(model(p), formalism, FunctionalOptions::default()),
        grid,
        &spec,
    )?;
    Ok(res.into_iter().map(|r| r.value).collect())
}

fn assemble(id: FigureId, x: Vec<f64>, ys: Vec<Vec<f64>>) -> Dataset {
    let rows = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| std::iter::once(xi).chain(ys.iter().map(|y| y[i])).collect())
        .collect();
    Dataset {
        id,
        columns: id.columns().iter().map(|s| s.to_string()).collect(),
        rows,
    }
}

/// Computes one figure dataset.
pub fn figure(id: FigureId, opts: &FigureOptions) -> Result<Dataset> {
    if opts.points == 0 {
        return Err(Error::EmptyGrid("figure grid needs at least one point"));
    }
    let tmss = |r| StateModel::Tmss { r };
    let ecs = |gamma| StateModel::Ecs { gamma };
    match id {
        FigureId::F1a | FigureId::F2a => {
            let (x, ys) = if id == FigureId::F1a {
                let x = r_grid(opts.points);
                let ys = [Formalism::Bw, Formalism::Gbw, Formalism::Pseudospin]
                    .into_iter()
                    .map(|f| curve(&x, tmss, f, Direction::MaxAbs, opts))
                    .collect::<Result<Vec<_>>>()?;
                (x, ys)
            } else {
                let x = gamma_grid(opts.points);
                let ys = [Formalism::Bw, Formalism::Gbw, Formalism::Pseudospin]
                    .into_iter()
                    .map(|f| curve(&x, ecs, f, Direction::MaxAbs, opts))
                    .collect::<Result<Vec<_>>>()?;
                (x, ys)
            };
            Ok(assemble(id, x, ys))
        }
        FigureId::F3a => {
            let x = r_grid(opts.points);
            let ys = [Formalism::ChQBw, Formalism::ChQ, Formalism::ChParity]
                .into_iter()
                .map(|f| curve(&x, tmss, f, Direction::Max, opts))
                .collect::<Result<Vec<_>>>()?;
            Ok(assemble(id, x, ys))
        }
        FigureId::F3b => {
            let x = gamma_grid(opts.points);
            let ys = [Formalism::ChQBw, Formalism::ChQ, Formalism::ChParity]
                .into_iter()
                .map(|f| curve(&x, ecs, f, Direction::Min, opts))
                .collect::<Result<Vec<_>>>()?;
            Ok(assemble(id, x, ys))
        }
        FigureId::F1b => {
            let x = linspace(0.0, 3.0, opts.points);
            let oracle = NumberStateParity::new(3, 3.0);
            let ys = (1..=3)
                .map(|n| x.iter().map(|&a| oracle.eval(n, a)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(assemble(id, x, ys))
        }
        FigureId::F2b => {
            let x = linspace(0.0, 3.0, opts.points);
            let ys = [2.0, 5.0]
                .into_iter()
                .map(|g| {
                    x.iter()
                        .map(|&a| even_cat_displaced_parity(g, Complex64::new(0.0, a)))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(assemble(id, x, ys))
        }
    }
}
