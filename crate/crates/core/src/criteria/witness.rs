//! Witnesses for the measure-theoretic characterization of ℝ-supercyclicity:
//! for `ε > 0` and a finite union `B` of sub-cells, find `B' ⊆ B`, `k ≥ 1`
//! and `λ > 0` with
//!
//! ```text
//! μ(B \ B') < ε,   μ(f^k(B')) < λ^p ε,   μ(f^{-k}(B')) < λ^{-p} ε.
//! ```
//!
//! The two `λ` inequalities hold for some `λ` iff
//! `μ(f^k(B'))·μ(f^{-k}(B')) < ε²`; taking
//! `log λ^p = ½(log μ(f^k(B')) − log μ(f^{-k}(B')))` makes both scaled sides
//! equal to the geometric mean.
//!
//! The search is greedy. `NotFound` only means the scanned `k` range was too
//! short or the greedy order missed a witness; it is never a disproof.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{log_add_exp, log_sum_exp};
use crate::operator::{apply_composition, lp_norm_step, Cell, StepFunction};
use crate::system::{CellMasses, SystemModel};

/// A finite set of sub-cells `f^k(W_j)` at a common refinement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSet {
    refinement: u32,
    cells: BTreeSet<Cell>,
}

impl CellSet {
    pub fn new<I: IntoIterator<Item = Cell>>(refinement: u32, cells: I) -> Result<Self> {
        if refinement > 20 {
            return Err(Error::invalid(format!("refinement {refinement} exceeds 20")));
        }
        let parts = 1u32 << refinement;
        let cells: BTreeSet<Cell> = cells.into_iter().collect();
        if let Some(&(k, j)) = cells.iter().find(|c| c.1 >= parts) {
            return Err(Error::invalid(format!("cell ({k}, {j}) out of 0..{parts}")));
        }
        Ok(Self { refinement, cells })
    }

    /// `⋃_{k ∈ range} f^k(W)`, every sub-cell included.
    pub fn whole_cells(range: RangeInclusive<i64>, refinement: u32) -> Result<Self> {
        let parts = 1u32 << refinement.min(20);
        Self::new(refinement, range.flat_map(|k| (0..parts).map(move |j| (k, j))))
    }

    pub fn refinement(&self) -> u32 {
        self.refinement
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Log-values of the three quantities that must fall below `log ε`.
/// `None` stands for a zero measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AchievedBounds {
    /// `log μ(B \ B')`.
    pub log_removed_mass: Option<f64>,
    /// `log μ(f^k(B')) − p log λ`.
    pub log_forward_scaled: Option<f64>,
    /// `log μ(f^{-k}(B')) + p log λ`.
    pub log_backward_scaled: Option<f64>,
}

impl AchievedBounds {
    fn all_below(&self, log_eps: f64) -> bool {
        [self.log_removed_mass, self.log_forward_scaled, self.log_backward_scaled]
            .iter()
            .all(|v| v.is_none_or(|x| x < log_eps))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessTriple {
    pub refinement: u32,
    /// Sub-cells excised from `B`; `B' = B` minus these.
    pub removed_cells: Vec<Cell>,
    pub kept_cells: usize,
    pub k_star: u32,
    pub log_lambda: f64,
    pub p: f64,
    pub log_epsilon: f64,
    pub achieved: AchievedBounds,
    /// `B'` has measure zero, so the inequalities hold vacuously.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub allow_degenerate: bool,
}

fn check_epsilon(epsilon: f64) -> Result<f64> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(epsilon.ln())
    } else {
        Err(Error::invalid(format!("epsilon {epsilon} must be positive and finite")))
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("p = {p} must be finite and >= 1")))
    }
}

struct CellLogs {
    cell: Cell,
    own: f64,
    forward: f64,
    backward: f64,
}

fn cell_logs(masses: &CellMasses<'_>, b: &CellSet, k: i64) -> Result<Vec<CellLogs>> {
    b.cells
        .iter()
        .map(|&(c, j)| {
            Ok(CellLogs {
                cell: (c, j),
                own: masses.log_subcell_mass(c, j)?,
                forward: masses.log_subcell_mass(c + k, j)?,
                backward: masses.log_subcell_mass(c - k, j)?,
            })
        })
        .collect()
}

/// Greedy search over `k = 1..=k_max`; returns the first feasible `(B', k, λ)`.
///
/// Per `k`, cells are removed in descending order of `μ(f^k(c))·μ(f^{-k}(c))`
/// (ties by ascending `(k, j)`) while the removed measure stays below `ε`;
/// feasibility is tested before each removal.
pub fn general_condition_search(
    system: &SystemModel,
    b: &CellSet,
    epsilon: f64,
    k_max: u32,
    p: f64,
    options: SearchOptions,
) -> Result<WitnessTriple> {
    let log_eps = check_epsilon(epsilon)?;
    check_p(p)?;
    if b.is_empty() {
        return Err(Error::invalid("B must contain at least one sub-cell"));
    }
    let masses = system.cell_masses(b.refinement)?;
    for k in 1..=k_max {
        let logs = cell_logs(&masses, b, k as i64)?;
        let mut order: Vec<usize> = (0..logs.len()).collect();
        order.sort_by(|&x, &y| {
            let (a, c) = (&logs[x], &logs[y]);
            (c.forward + c.backward).total_cmp(&(a.forward + a.backward)).then(a.cell.cmp(&c.cell))
        });
        let mut kept = vec![true; logs.len()];
        let mut log_removed = f64::NEG_INFINITY;
        let mut next = 0;
        loop {
            let fwd: Vec<f64> = logs.iter().zip(&kept).filter(|(_, &k)| k).map(|(l, _)| l.forward).collect();
            let removed_cells = || -> Vec<Cell> {
                let mut r: Vec<Cell> = logs.iter().zip(&kept).filter(|(_, &k)| !k).map(|(l, _)| l.cell).collect();
                r.sort();
                r
            };
            let removed_bound = (log_removed > f64::NEG_INFINITY).then_some(log_removed);
            if fwd.is_empty() {
                if options.allow_degenerate {
                    return Ok(WitnessTriple {
                        refinement: b.refinement,
                        removed_cells: removed_cells(),
                        kept_cells: 0,
                        k_star: k,
                        log_lambda: 0.0,
                        p,
                        log_epsilon: log_eps,
                        achieved: AchievedBounds {
                            log_removed_mass: removed_bound,
                            log_forward_scaled: None,
                            log_backward_scaled: None,
                        },
                        degenerate: true,
                    });
                }
                break;
            }
            let bwd: Vec<f64> = logs.iter().zip(&kept).filter(|(_, &k)| k).map(|(l, _)| l.backward).collect();
            let (log_f, log_g) = (log_sum_exp(&fwd), log_sum_exp(&bwd));
            if log_f + log_g < 2.0 * log_eps {
                let log_lambda_p = 0.5 * (log_f - log_g);
                let achieved = AchievedBounds {
                    log_removed_mass: removed_bound,
                    log_forward_scaled: Some(log_f - log_lambda_p),
                    log_backward_scaled: Some(log_g + log_lambda_p),
                };
                if achieved.all_below(log_eps) {
                    return Ok(WitnessTriple {
                        refinement: b.refinement,
                        removed_cells: removed_cells(),
                        kept_cells: fwd.len(),
                        k_star: k,
                        log_lambda: log_lambda_p / p,
                        p,
                        log_epsilon: log_eps,
                        achieved,
                        degenerate: false,
                    });
                }
            }
            let Some(&idx) = order.get(next) else { break };
            let grown = log_add_exp(log_removed, logs[idx].own);
            if grown >= log_eps {
                break;
            }
            kept[idx] = false;
            log_removed = grown;
            next += 1;
        }
    }
    Err(Error::NotFound { k_max })
}

/// Independent re-check of a witness from raw per-cell masses, summed in the
/// linear domain. The `λ`-scaled sums are formed cell by cell so they stay
/// finite even when `μ(f^k(B'))` itself would overflow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    /// `μ(B \ B')`.
    pub removed_mass: f64,
    /// `μ(f^k(B')) / λ^p`.
    pub forward_scaled_mass: f64,
    /// `λ^p μ(f^{-k}(B'))`.
    pub backward_scaled_mass: f64,
    pub epsilon: f64,
    pub removed_ok: bool,
    pub forward_ok: bool,
    pub backward_ok: bool,
}

impl WitnessCheck {
    pub fn holds(&self) -> bool {
        self.removed_ok && self.forward_ok && self.backward_ok
    }
}

pub fn verify_witness(system: &SystemModel, b: &CellSet, witness: &WitnessTriple) -> Result<WitnessCheck> {
    if witness.refinement != b.refinement {
        return Err(Error::invalid("witness refinement differs from B"));
    }
    let removed: BTreeSet<Cell> = witness.removed_cells.iter().copied().collect();
    if !removed.is_subset(&b.cells) {
        return Err(Error::invalid("witness removes cells outside B"));
    }
    let masses = system.cell_masses(b.refinement)?;
    let k = witness.k_star as i64;
    let log_lambda_p = witness.p * witness.log_lambda;
    let mut removed_mass = 0.0;
    let mut forward_scaled_mass = 0.0;
    let mut backward_scaled_mass = 0.0;
    for &(c, j) in &b.cells {
        if removed.contains(&(c, j)) {
            removed_mass += masses.log_subcell_mass(c, j)?.exp();
        } else {
            forward_scaled_mass += (masses.log_subcell_mass(c + k, j)? - log_lambda_p).exp();
            backward_scaled_mass += (masses.log_subcell_mass(c - k, j)? + log_lambda_p).exp();
        }
    }
    let epsilon = witness.log_epsilon.exp();
    Ok(WitnessCheck {
        removed_mass,
        forward_scaled_mass,
        backward_scaled_mass,
        epsilon,
        removed_ok: removed_mass < epsilon,
        forward_ok: forward_scaled_mass < epsilon,
        backward_ok: backward_scaled_mass < epsilon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SufficientWitness {
    pub k: u32,
    pub n: u32,
    pub log_lambda: f64,
    pub p: f64,
    pub log_epsilon: f64,
    /// `log μ(f^k(U_N))`, `U_N = ⋃_{|j| ≤ N} f^j(W)`.
    pub log_forward_mass: f64,
    /// `log μ(f^{-k}(U_N))`.
    pub log_backward_mass: f64,
}

/// Smallest `k ≤ k_max` with `μ(f^k(U_N))·μ(f^{-k}(U_N)) < ε²`, and its `λ`.
pub fn sufficient_condition_check(system: &SystemModel, epsilon: f64, n: u32, k_max: u32, p: f64) -> Result<SufficientWitness> {
    let log_eps = check_epsilon(epsilon)?;
    check_p(p)?;
    let span = n as i64;
    for k in 1..=k_max as i64 {
        let fwd = (-span..=span).map(|j| system.log_cell_mass(j + k)).collect::<Result<Vec<_>>>()?;
        let bwd = (-span..=span).map(|j| system.log_cell_mass(j - k)).collect::<Result<Vec<_>>>()?;
        let (log_f, log_g) = (log_sum_exp(&fwd), log_sum_exp(&bwd));
        if log_f + log_g >= 2.0 * log_eps {
            continue;
        }
        let log_lambda_p = 0.5 * (log_f - log_g);
        if log_f - log_lambda_p < log_eps && log_g + log_lambda_p < log_eps {
            return Ok(SufficientWitness {
                k: k as u32,
                n,
                log_lambda: log_lambda_p / p,
                p,
                log_epsilon: log_eps,
                log_forward_mass: log_f,
                log_backward_mass: log_g,
            });
        }
    }
    Err(Error::NotFound { k_max })
}

/// `v = g·χ_{B'} + λ^{-1}(h ∘ f^{-k})·χ_{f^k(B')}` with its two residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitivityWitness {
    pub v: StepFunction,
    pub k_n: u32,
    pub log_lambda_n: f64,
    /// `‖v − g‖_p`.
    pub residual_to_g: f64,
    /// `‖λ T_f^k v − h‖_p`.
    pub residual_after_map: f64,
    /// `2^p (‖g‖_∞^p + ‖h‖_∞^p) ε`, which bounds both residuals raised to the `p`.
    pub residual_bound_pow_p: f64,
    pub triple: Option<WitnessTriple>,
}

/// Builds a vector close to `g` whose scaled image under `T_f^k` is close to `h`.
pub fn build_transitivity_witness(
    g: &StepFunction,
    h: &StepFunction,
    system: &SystemModel,
    epsilon_n: f64,
    k_max: u32,
) -> Result<TransitivityWitness> {
    let p = g.p();
    if h.p() != p || h.refinement() != g.refinement() {
        return Err(Error::invalid("g and h must share p and refinement"));
    }
    check_epsilon(epsilon_n)?;
    let bound = 0.5f64.powf(p);
    if epsilon_n >= bound {
        return Err(Error::EpsilonTooLarge { epsilon: epsilon_n, bound });
    }
    let residual_bound_pow_p = 2f64.powf(p) * (g.sup_norm().powf(p) + h.sup_norm().powf(p)) * epsilon_n;
    let b = CellSet::new(g.refinement(), g.support().chain(h.support()))?;
    if b.is_empty() {
        return Ok(TransitivityWitness {
            v: StepFunction::zero(p, g.refinement())?,
            k_n: 1,
            log_lambda_n: 0.0,
            residual_to_g: 0.0,
            residual_after_map: 0.0,
            residual_bound_pow_p,
            triple: None,
        });
    }
    let triple = general_condition_search(system, &b, epsilon_n, k_max, p, SearchOptions::default())?;
    let k = triple.k_star as i64;
    let lambda = triple.log_lambda.exp();
    let removed: BTreeSet<Cell> = triple.removed_cells.iter().copied().collect();
    let mut entries: Vec<(Cell, Complex64)> = Vec::new();
    for &(c, j) in b.cells().difference(&removed) {
        entries.push(((c, j), g.get((c, j))));
        entries.push(((c + k, j), h.get((c, j)) / lambda));
    }
    let v = StepFunction::from_cells(p, g.refinement(), entries)?;
    let minus_one = Complex64::new(-1.0, 0.0);
    let residual_to_g = lp_norm_step(&v.axpy(minus_one, g)?, system)?;
    let mapped = apply_composition(&v, k).scale(Complex64::new(lambda, 0.0));
    let residual_after_map = lp_norm_step(&mapped.axpy(minus_one, h)?, system)?;
    Ok(TransitivityWitness {
        v,
        k_n: triple.k_star,
        log_lambda_n: triple.log_lambda,
        residual_to_g,
        residual_after_map,
        residual_bound_pow_p,
        triple: Some(triple),
    })
}
