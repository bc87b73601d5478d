//! Multi-start Nelder-Mead search over Bell settings.
//!
//! Start points are a shifted Halton sequence in the functional's box. Restarts
//! run in parallel and are merged by index, so results do not depend on thread
//! scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{BellFunctional, BellResult, Diagnostics, Formalism, StateModel};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Max,
    Min,
    MaxAbs,
}

impl Direction {
    /// CHSH functionals are maximized in absolute value. CH functionals are
    /// minimized, except for the squeezed state whose violation is positive.
    pub fn default_for(formalism: Formalism, model: Option<StateModel>) -> Self {
        if !formalism.is_ch() {
            Direction::MaxAbs
        } else if matches!(model, Some(StateModel::Tmss { .. })) {
            Direction::Max
        } else {
            Direction::Min
        }
    }

    fn cost(self, v: f64) -> f64 {
        match self {
            Direction::Max => -v,
            Direction::Min => v,
            Direction::MaxAbs => -v.abs(),
        }
    }

    fn report(self, v: f64) -> f64 {
        match self {
            Direction::MaxAbs => v.abs(),
            _ => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSpec {
    pub direction: Direction,
    pub restarts: usize,
    /// Convergence tolerance on the spread of simplex values.
    pub tol: f64,
    pub seed: u64,
    /// Iteration cap per local search.
    pub max_iter: usize,
    /// Extra start points tried before the Halton points.
    #[serde(default)]
    pub initial: Vec<Vec<f64>>,
}

impl Default for OptimizeSpec {
    fn default() -> Self {
        OptimizeSpec {
            direction: Direction::MaxAbs,
            restarts: 32,
            tol: 1e-12,
            seed: 0,
            max_iter: 4000,
            initial: Vec::new(),
        }
    }
}

impl OptimizeSpec {
    pub fn new(direction: Direction) -> Self {
        OptimizeSpec {
            direction,
            ..Default::default()
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(invalid("tol", self.tol, "must be positive"));
        }
        if self.restarts == 0 && self.initial.is_empty() {
            return Err(invalid("restarts", 0.0, "need at least one start point"));
        }
        if let Some(p) = self.initial.iter().find(|p| p.len() != dim) {
            return Err(invalid("initial", p.len() as f64, "start point length must match the functional dimension"));
        }
        Ok(())
    }
}

/// Best point of an optimization together with its parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub result: BellResult,
    pub x: Vec<f64>,
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut k: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut x = 0.0;
    while k > 0 {
        x += (k % b) as f64 * inv;
        k /= b;
        inv /= base as f64;
    }
    x
}

/// `count` Halton points in `bounds`, shifted modulo 1 by a seeded random
/// offset.
pub fn halton_points(bounds: &[(f64, f64)], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = bounds.iter().map(|_| rng.random_range(0.0..1.0)).collect();
    (1..=count as u64)
        .map(|k| {
            bounds
                .iter()
                .enumerate()
                .map(|(i, &(lo, hi))| {
                    let u = (radical_inverse(k, PRIMES[i % PRIMES.len()]) + shift[i]).fract();
                    lo + u * (hi - lo)
                })
                .collect()
        })
        .collect()
}

struct Local {
    x: Vec<f64>,
    cost: f64,
    iterations: usize,
    evaluations: usize,
    converged: bool,
}

struct Problem<'a> {
    f: &'a BellFunctional,
    direction: Direction,
    clamp: bool,
}

impl Problem<'_> {
    fn project(&self, x: &mut [f64]) {
        if self.clamp {
            for (v, &(lo, hi)) in x.iter_mut().zip(self.f.bounds()) {
                *v = v.clamp(lo, hi);
            }
        }
    }

    fn cost(&self, x: &[f64], evals: &mut usize) -> Result<f64> {
        *evals += 1;
        let v = self.f.eval(x);
        if !v.is_finite() {
            return Err(Error::NonFinite { value: v, point: x.to_vec() });
        }
        Ok(self.direction.cost(v))
    }

    fn nelder_mead(&self, start: &[f64], tol: f64, max_iter: usize) -> Result<Local> {
        let n = start.len();
        let mut evals = 0;
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let mut x0 = start.to_vec();
        self.project(&mut x0);
        let c0 = self.cost(&x0, &mut evals)?;
        simplex.push((x0.clone(), c0));
        for (i, &(lo, hi)) in self.f.bounds().iter().enumerate() {
            let mut x = x0.clone();
            let step = 0.1 * (hi - lo);
            x[i] += if self.clamp && x[i] + step > hi { -step } else { step };
            self.project(&mut x);
            let c = self.cost(&x, &mut evals)?;
            simplex.push((x, c));
        }

        let mut iterations = 0;
        let mut converged = false;
        while iterations < max_iter {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[n].1 - simplex[0].1;
            let size = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread <= tol && size <= 1e-9 {
                converged = true;
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / n as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                let mut p: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect();
                self.project(&mut p);
                p
            };

            let xr = along(1.0);
            let cr = self.cost(&xr, &mut evals)?;
            if cr < simplex[0].1 {
                let xe = along(2.0);
                let ce = self.cost(&xe, &mut evals)?;
                simplex[n] = if ce < cr { (xe, ce) } else { (xr, cr) };
                continue;
            }
            if cr < simplex[n - 1].1 {
                simplex[n] = (xr, cr);
                continue;
            }
            let (xc, cc) = if cr < simplex[n].1 {
                let x = along(0.5);
                let c = self.cost(&x, &mut evals)?;
                (x, c)
            } else {
                let x = along(-0.5);
                let c = self.cost(&x, &mut evals)?;
                (x, c)
            };
            if cc < simplex[n].1.min(cr) {
                simplex[n] = (xc, cc);
                continue;
            }
            let best = simplex[0].0.clone();
            for (x, c) in simplex.iter_mut().skip(1) {
                for (v, b) in x.iter_mut().zip(&best) {
                    *v = b + 0.5 * (*v - b);
                }
                *c = self.cost(x, &mut evals)?;
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, cost) = simplex.swap_remove(0);
        Ok(Local {
            x,
            cost,
            iterations,
            evaluations: evals,
            converged,
        })
    }

    /// Local search followed by fresh-simplex restarts from the best point
    /// until they stop improving.
    fn polish(&self, start: &[f64], tol: f64, max_iter: usize) -> Result<Local> {
        let mut best = self.nelder_mead(start, tol, max_iter)?;
        for _ in 0..3 {
            let next = self.nelder_mead(&best.x, tol, max_iter)?;
            let improved = next.cost < best.cost - tol;
            let iterations = best.iterations + next.iterations;
            let evaluations = best.evaluations + next.evaluations;
            best = if next.cost <= best.cost {
                Local { iterations, evaluations, ..next }
            } else {
                Local { iterations, evaluations, converged: next.converged, ..best }
            };
            if !improved {
                break;
            }
        }
        Ok(best)
    }
}

/// Optimizes `f` and returns the best point together with its parameters.
pub fn optimize_point(f: &BellFunctional, spec: &OptimizeSpec) -> Result<Optimum> {
    spec.validate(f.dim())?;
    let problem = Problem {
        f,
        direction: spec.direction,
        clamp: !f.is_periodic(),
    };
    let mut starts = spec.initial.clone();
    starts.extend(halton_points(f.bounds(), spec.restarts, spec.seed));

    let runs: Vec<Result<Local>> = starts
        .par_iter()
        .map(|x| problem.polish(x, spec.tol, spec.max_iter))
        .collect();

    let mut best: Option<Local> = None;
    let mut evaluations = 0;
    for run in runs {
        let run = run?;
        evaluations += run.evaluations;
        if best.as_ref().is_none_or(|b| run.cost < b.cost) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start point");
    let value = f.eval(&best.x);
    Ok(Optimum {
        result: BellResult {
            value: spec.direction.report(value),
            settings: f.settings(&best.x).reduced(),
            formalism: f.formalism(),
            diagnostics: Diagnostics {
                iterations: best.iterations,
                evaluations,
                restarts: starts.len(),
                converged: best.converged,
            },
        },
        x: best.x,
    })
}

/// Optimizes `f` over its settings.
pub fn optimize(f: &BellFunctional, spec: &OptimizeSpec) -> Result<BellResult> {
    optimize_point(f, spec).map(|o| o.result)
}

/// One optimization per grid value. Each point is also started from the
/// previous point's optimum.
pub fn sweep<F>(build: F, grid: &[f64], spec: &OptimizeSpec) -> Result<Vec<BellResult>>
where
    F: Fn(f64) -> Result<BellFunctional>,
{
    if grid.is_empty() {
        return Err(Error::EmptyGrid("sweep grid is empty"));
    }
    let mut out = Vec::with_capacity(grid.len());
    let mut warm: Option<Vec<f64>> = None;
    for &p in grid {
        let f = build(p)?;
        let mut s = spec.clone();
        if let Some(x) = warm.take().filter(|x| x.len() == f.dim()) {
            s.initial.push(x);
        }
        let o = optimize_point(&f, &s)?;
        warm = Some(o.x);
        out.push(o.result);
    }
    Ok(out)
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}
