//! Recovering retention parameters that explain an observed allocation.

use crate::error::{Error, Result};
use crate::network::{AgentId, RiverNetwork};
use crate::problem::{validate_allocation, Allocation, Problem};
use crate::quantity::Quantity;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaFlag {
    /// `α_i = z_i / d_i` with `d_i > 0`.
    Exact,
    /// `d_i = z_i = 0`: any retention reproduces the observation; reported as 0.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalizationResult {
    pub alpha: Vec<Quantity>,
    pub flags: Vec<AlphaFlag>,
    /// Disposable inflow `d_i` reaching each agent along the recursion.
    pub disposable: Vec<Quantity>,
}

impl RationalizationResult {
    pub fn is_exact(&self) -> bool {
        self.flags.iter().all(|f| *f == AlphaFlag::Exact)
    }
}

/// Sequential recovery of the multi-parameter geometric vector that
/// reproduces `observed` exactly.
///
/// Walks the network in topological order; each agent's disposable inflow is
/// its own inflow plus what its immediate upstream neighbours passed on, and
/// its retention is what it was observed to keep divided by that.
pub fn rationalize_alpha(
    problem: &Problem,
    observed: &Allocation,
) -> Result<RationalizationResult> {
    validate_allocation(problem, observed)
        .map_err(|e| Error::InfeasibleObservation(Box::new(e)))?;
    let network = problem.network();
    let n = network.n();
    let mut disposable = problem.inflows().to_vec();
    let mut alpha = vec![Quantity::zero(); n];
    let mut flags = vec![AlphaFlag::Exact; n];
    for &agent in network.topological_order() {
        let i = agent.index();
        let (d, z) = (&disposable[i], &observed[agent]);
        let Some(next) = network.successor(agent) else {
            if d != z {
                return Err(Error::NotRationalizable {
                    agent,
                    reason: format!("the sink receives {d} but was observed with {z}"),
                });
            }
            alpha[i] = Quantity::one();
            continue;
        };
        let passed = d.checked_sub(z).ok_or_else(|| Error::NotRationalizable {
            agent,
            reason: format!("observed {z} exceeds disposable inflow {d}"),
        })?;
        match z.checked_div(d) {
            Some(share) => alpha[i] = share,
            None => flags[i] = AlphaFlag::Indeterminate,
        }
        disposable[next.index()] += passed;
    }
    Ok(RationalizationResult {
        alpha,
        flags,
        disposable,
    })
}

/// Rescales `raw` proportionally so that it sums to `target_total`.
pub fn scale_withdrawals(raw: &[Quantity], target_total: &Quantity) -> Result<Vec<Quantity>> {
    let total: Quantity = raw.iter().sum();
    let factor = target_total.checked_div(&total).ok_or(Error::ZeroTotal)?;
    Ok(raw.iter().map(|x| x * &factor).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub gamma: f64,
    /// Sum of squared deviations between `R^gamma` and the observation.
    pub loss: f64,
    /// Golden-section steps taken after the grid stage.
    pub iterations: usize,
}

const GRID_POINTS: usize = 65;
const TOLERANCE: f64 = 1e-9;

/// Single-parameter geometric rule in floating point, for fitting only.
pub fn geometric_f64(network: &RiverNetwork, inflows: &[f64], gamma: f64) -> Vec<f64> {
    let mut disposable = inflows.to_vec();
    let mut amounts = vec![0.0; inflows.len()];
    for &agent in network.topological_order() {
        let i = agent.index();
        match network.successor(agent) {
            Some(next) => {
                amounts[i] = gamma * disposable[i];
                disposable[next.index()] += disposable[i] - amounts[i];
            }
            None => amounts[i] = disposable[i],
        }
    }
    amounts
}

/// Squared-error objective of [`fit_gamma`].
pub fn gamma_loss(network: &RiverNetwork, inflows: &[f64], observed: &[f64], gamma: f64) -> f64 {
    geometric_f64(network, inflows, gamma)
        .iter()
        .zip(observed)
        .map(|(x, z)| (x - z) * (x - z))
        .sum()
}

/// Golden-section minimization of a unimodal `f` on `[lo, hi]`.
pub(crate) fn golden_section(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tolerance: f64,
) -> (f64, usize) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut iterations = 0;
    while hi - lo > tolerance {
        iterations += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = if f1 <= f2 { x1 } else { x2 };
    (x, iterations)
}

/// Best single retention share for an observed allocation: a 65-point grid
/// on `[0, 1]` followed by golden-section refinement of the bracket around
/// the best grid point.
pub fn fit_gamma(problem: &Problem, observed: &Allocation) -> Result<FitResult> {
    validate_allocation(problem, observed)
        .map_err(|e| Error::InfeasibleObservation(Box::new(e)))?;
    let network = problem.network();
    let inflows: Vec<f64> = problem.inflows().iter().map(Quantity::to_f64).collect();
    let targets: Vec<f64> = observed.amounts().iter().map(Quantity::to_f64).collect();
    let loss = |gamma: f64| gamma_loss(network, &inflows, &targets, gamma);

    let step = 1.0 / (GRID_POINTS - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..GRID_POINTS)
        .map(|j| {
            let gamma = j as f64 * step;
            (gamma, loss(gamma))
        })
        .collect();
    let (best, &(grid_gamma, grid_loss)) = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("grid is non-empty");
    let lo = if best == 0 { 0.0 } else { grid[best - 1].0 };
    let hi = if best + 1 == GRID_POINTS {
        1.0
    } else {
        grid[best + 1].0
    };
    let (refined, iterations) = golden_section(loss, lo, hi, TOLERANCE);
    let refined_loss = loss(refined);
    let (gamma, loss) = if refined_loss <= grid_loss {
        (refined, refined_loss)
    } else {
        (grid_gamma, grid_loss)
    };
    Ok(FitResult {
        gamma,
        loss,
        iterations,
    })
}

/// Rounds each entry of a recovered vector for side-by-side display.
pub fn rounded_alpha(result: &RationalizationResult, decimals: u32) -> Vec<String> {
    result
        .alpha
        .iter()
        .map(|a| a.round_half_up(decimals))
        .collect()
}

/// Agents flagged indeterminate.
pub fn indeterminate_agents(result: &RationalizationResult) -> Vec<AgentId> {
    result
        .flags
        .iter()
        .enumerate()
        .filter(|(_, f)| **f == AlphaFlag::Indeterminate)
        .map(|(i, _)| AgentId::from_index(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantity::q;
    use crate::rules::{evaluate, RuleSpec};

    fn qs(v: &[&str]) -> Vec<Quantity> {
        v.iter().map(|s| q(s)).collect()
    }

    fn line(v: &[&str]) -> Problem {
        Problem::linear(qs(v)).unwrap()
    }

    #[test]
    fn no_transfer_rationalizes_to_ones() {
        let p = line(&["3", "1", "4", "1"]);
        let r = rationalize_alpha(&p, &Allocation::new(p.inflows().to_vec())).unwrap();
        assert_eq!(r.alpha, qs(&["1", "1", "1", "1"]));
        assert!(r.is_exact());
    }

    #[test]
    fn full_transfer_rationalizes_to_zeros() {
        let p = line(&["3", "1", "4", "1"]);
        let z = evaluate(&RuleSpec::FullTransfer, &p).unwrap();
        let r = rationalize_alpha(&p, &z).unwrap();
        assert_eq!(r.alpha, qs(&["0", "0", "0", "1"]));
        assert!(r.is_exact());
        assert_eq!(r.disposable, qs(&["3", "4", "8", "9"]));
    }

    #[test]
    fn zero_upstream_water_is_indeterminate() {
        let p = line(&["0", "0", "5", "1"]);
        let z = Allocation::new(qs(&["0", "0", "2", "4"]));
        let r = rationalize_alpha(&p, &z).unwrap();
        assert_eq!(r.alpha, qs(&["0", "0", "2/5", "1"]));
        assert_eq!(
            r.flags,
            vec![
                AlphaFlag::Indeterminate,
                AlphaFlag::Indeterminate,
                AlphaFlag::Exact,
                AlphaFlag::Exact
            ]
        );
        assert_eq!(
            indeterminate_agents(&r),
            vec![AgentId::new(1), AgentId::new(2)]
        );
        assert_eq!(evaluate(&RuleSpec::MultiGeometric(r.alpha), &p).unwrap(), z);
    }

    #[test]
    fn infeasible_observation_is_rejected() {
        let p = line(&["0", "36", "0", "0"]);
        let z = Allocation::new(qs(&["1", "35", "0", "0"]));
        assert!(matches!(
            rationalize_alpha(&p, &z),
            Err(Error::InfeasibleObservation(_))
        ));
        assert!(matches!(
            fit_gamma(&p, &z),
            Err(Error::InfeasibleObservation(_))
        ));
    }

    #[test]
    fn scaling() {
        assert_eq!(
            scale_withdrawals(&qs(&["1", "1"]), &q("1")).unwrap(),
            qs(&["1/2", "1/2"])
        );
        let raw = qs(&["2", "3", "5"]);
        assert_eq!(scale_withdrawals(&raw, &q("10")).unwrap(), raw);
        assert_eq!(
            scale_withdrawals(&qs(&["0", "0"]), &q("1")),
            Err(Error::ZeroTotal)
        );
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, iterations) = golden_section(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(iterations > 30);
    }

    #[test]
    fn fit_recovers_no_transfer() {
        let p = line(&["3", "1", "4", "1"]);
        let fit = fit_gamma(&p, &Allocation::new(p.inflows().to_vec())).unwrap();
        assert!((fit.gamma - 1.0).abs() < 1e-6, "{fit:?}");
        assert!(fit.loss < 1e-12);
    }

    #[test]
    fn fit_beats_every_grid_point() {
        let p = line(&["12", "4", "0", "10"]);
        let z = Allocation::new(qs(&["1", "9", "6", "10"]));
        let fit = fit_gamma(&p, &z).unwrap();
        let inflows: Vec<f64> = p.inflows().iter().map(Quantity::to_f64).collect();
        let targets: Vec<f64> = z.amounts().iter().map(Quantity::to_f64).collect();
        for j in 0..GRID_POINTS {
            let g = j as f64 / 64.0;
            assert!(fit.loss <= gamma_loss(p.network(), &inflows, &targets, g));
        }
        assert!((0.0..=1.0).contains(&fit.gamma));
    }
}
