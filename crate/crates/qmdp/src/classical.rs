//! Classical MDP oracle and the deterministic-reduction linear programs.
//!
//! A finite discounted MDP `(X, A, p, c, β)` is solved three ways — value
//! iteration, the occupancy-measure LP `min ⟨c,ν⟩ s.t. ν(·×A) − βP(ν) =
//! (1−β)μ0, ν ≥ 0`, and its dual — and embedded into q-MDP form by turning
//! the kernel into a quantum channel and the cost table into a diagonal
//! cost operator. Everything here doubles as the ground truth the quantum
//! solvers are validated against.
//!
//! The LPs are solved by the conic module with a diagonal encoding: one
//! solver backend for the whole crate, and the SDP code gets exercised on
//! problems with independently known answers.

use crate::channel::classical_channel_embed;
use crate::conic::{self, SdpProblem, SolveOptions};
use crate::herm::{DensityOperator, HermitianOperator};
use crate::qsolve::QmdpInstance;
use crate::{Error, Result};

/// Finite discounted MDP. Transitions are stored as `p[y][x][a] = p(y|x,a)`
/// flattened to `p[(y·nx + x)·na + a]`; costs as `c[x·na + a]`.
#[derive(Clone, Debug)]
pub struct ClassicalMdp {
    nx: usize,
    na: usize,
    p: Vec<f64>,
    c: Vec<f64>,
    beta: f64,
}

impl ClassicalMdp {
    pub fn new(nx: usize, na: usize, p: Vec<f64>, c: Vec<f64>, beta: f64) -> Result<Self> {
        if nx == 0 || na == 0 || p.len() != nx * nx * na || c.len() != nx * na {
            return Err(Error::DimensionMismatch("transition/cost table shape".into()));
        }
        if !(0.0..1.0).contains(&beta) || beta <= 0.0 {
            return Err(Error::InvalidInstance(format!("beta {beta} outside (0,1)")));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("non-finite cost".into()));
        }
        let mdp = Self { nx, na, p, c, beta };
        for x in 0..nx {
            for a in 0..na {
                let mut s = 0.0;
                for y in 0..nx {
                    let v = mdp.p(y, x, a);
                    if v < 0.0 {
                        return Err(Error::NotStochastic(format!("p({y}|{x},{a}) = {v}")));
                    }
                    s += v;
                }
                if (s - 1.0).abs() > 1e-12 {
                    return Err(Error::NotStochastic(format!(
                        "p(·|{x},{a}) sums to {s}"
                    )));
                }
            }
        }
        Ok(mdp)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn na(&self) -> usize {
        self.na
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    pub fn p(&self, y: usize, x: usize, a: usize) -> f64 {
        self.p[(y * self.nx + x) * self.na + a]
    }

    #[inline]
    pub fn cost(&self, x: usize, a: usize) -> f64 {
        self.c[x * self.na + a]
    }

    pub fn cost_table(&self) -> &[f64] {
        &self.c
    }

    /// Deterministic-reduction step `P(ν)(y) = Σ_{x,a} p(y|x,a)·ν(x,a)`.
    pub fn dmdp_step(&self, nu: &[f64]) -> Vec<f64> {
        assert_eq!(nu.len(), self.nx * self.na);
        (0..self.nx)
            .map(|y| {
                let mut s = 0.0;
                for x in 0..self.nx {
                    for a in 0..self.na {
                        s += self.p(y, x, a) * nu[x * self.na + a];
                    }
                }
                s
            })
            .collect()
    }

    fn bellman(&self, v: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let mut out = vec![0.0; self.nx];
        let mut arg = vec![0usize; self.nx];
        for x in 0..self.nx {
            let mut best = f64::INFINITY;
            let mut best_a = 0;
            for a in 0..self.na {
                let q = self.cost(x, a)
                    + self.beta
                        * (0..self.nx).map(|y| self.p(y, x, a) * v[y]).sum::<f64>();
                if q < best {
                    best = q;
                    best_a = a;
                }
            }
            out[x] = best;
            arg[x] = best_a;
        }
        (out, arg)
    }
}

/// Value iteration to sup-norm residual `tol·(1−β)/max(2β, 1)`, which
/// guarantees `‖v − v*‖_∞ ≤ tol`. Greedy tie-breaking by lowest action
/// index. Always converges by β-contraction.
pub fn value_iteration(mdp: &ClassicalMdp, tol: f64) -> (Vec<f64>, Vec<usize>) {
    let threshold = tol * (1.0 - mdp.beta) / (2.0 * mdp.beta).max(1.0);
    let mut v = vec![0.0; mdp.nx];
    loop {
        let (w, arg) = mdp.bellman(&v);
        let resid = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        v = w;
        if resid <= threshold {
            return (v, arg);
        }
    }
}

/// Discounted value of a stationary kernel by direct linear solve of
/// `(I − βP_π)·v = c_π`.
pub fn policy_value(mdp: &ClassicalMdp, kernel: &StationaryKernel) -> Result<Vec<f64>> {
    let n = mdp.nx;
    let mut a = vec![0.0f64; n * n];
    let mut b = vec![0.0f64; n];
    for x in 0..n {
        a[x * n + x] = 1.0;
        for act in 0..mdp.na {
            let pi = kernel.prob(x, act);
            b[x] += pi * mdp.cost(x, act);
            for y in 0..n {
                a[x * n + y] -= mdp.beta * pi * mdp.p(y, x, act);
            }
        }
    }
    crate::linalg::solve_dense(n, &a, &b)
}

/// Discounted state-action occupation measure, `ν ≥ 0` summing to one.
#[derive(Clone, Debug)]
pub struct OccupancyMeasure {
    nx: usize,
    na: usize,
    nu: Vec<f64>,
}

impl OccupancyMeasure {
    pub fn new(nx: usize, na: usize, nu: Vec<f64>) -> Result<Self> {
        if nu.len() != nx * na {
            return Err(Error::DimensionMismatch("occupancy table shape".into()));
        }
        if nu.iter().any(|&v| v < -1e-9) {
            return Err(Error::NotStochastic("negative occupancy entry".into()));
        }
        let s: f64 = nu.iter().sum();
        if (s - 1.0).abs() > 1e-8 {
            return Err(Error::NotStochastic(format!("occupancy sums to {s}")));
        }
        Ok(Self { nx, na, nu })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn na(&self) -> usize {
        self.na
    }

    #[inline]
    pub fn get(&self, x: usize, a: usize) -> f64 {
        self.nu[x * self.na + a]
    }

    pub fn table(&self) -> &[f64] {
        &self.nu
    }
}

/// Stationary stochastic kernel `π(a|x)`, stored row-major `pi[x·na + a]`.
#[derive(Clone, Debug)]
pub struct StationaryKernel {
    nx: usize,
    na: usize,
    pi: Vec<f64>,
}

impl StationaryKernel {
    pub fn new(nx: usize, na: usize, pi: Vec<f64>) -> Result<Self> {
        if pi.len() != nx * na {
            return Err(Error::DimensionMismatch("kernel shape".into()));
        }
        for x in 0..nx {
            let row = &pi[x * na..(x + 1) * na];
            if row.iter().any(|&v| v < 0.0) {
                return Err(Error::NotStochastic(format!("negative entry in row {x}")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::NotStochastic(format!("row {x} sums to {s}")));
            }
        }
        Ok(Self { nx, na, pi })
    }

    pub fn uniform(nx: usize, na: usize) -> Self {
        Self { nx, na, pi: vec![1.0 / na as f64; nx * na] }
    }

    /// Deterministic kernel from an action map.
    pub fn deterministic(nx: usize, na: usize, action: &[usize]) -> Self {
        let mut pi = vec![0.0; nx * na];
        for (x, &a) in action.iter().enumerate() {
            pi[x * na + a] = 1.0;
        }
        Self { nx, na, pi }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn na(&self) -> usize {
        self.na
    }

    #[inline]
    pub fn prob(&self, x: usize, a: usize) -> f64 {
        self.pi[x * self.na + a]
    }
}

fn occupancy_problem(mdp: &ClassicalMdp, mu0: &[f64]) -> Result<SdpProblem> {
    if mu0.len() != mdp.nx {
        return Err(Error::DimensionMismatch("mu0 length".into()));
    }
    let dim = mdp.nx * mdp.na;
    let objective = HermitianOperator::from_diag(mdp.cost_table());
    let mut constraints = Vec::with_capacity(mdp.nx);
    for y in 0..mdp.nx {
        let mut d = vec![0.0; dim];
        for x in 0..mdp.nx {
            for a in 0..mdp.na {
                let mut v = -mdp.beta * mdp.p(y, x, a);
                if x == y {
                    v += 1.0;
                }
                d[x * mdp.na + a] = v;
            }
        }
        constraints.push((HermitianOperator::from_diag(&d), (1.0 - mdp.beta) * mu0[y]));
    }
    SdpProblem::new(dim, objective, constraints)
}

/// Occupancy-measure LP: minimizes `⟨c, ν⟩` over the discounted flow
/// polytope from `μ0`. Returns the optimal measure and the optimal value
/// `(1−β)·V*(μ0)`.
pub fn occupancy_lp(mdp: &ClassicalMdp, mu0: &[f64]) -> Result<(OccupancyMeasure, f64)> {
    let problem = occupancy_problem(mdp, mu0)?;
    let sol = conic::solve(&problem, &SolveOptions::default())?;
    if sol.status != conic::SdpStatus::Optimal && sol.gap > 1e-6 {
        return Err(Error::Solver(format!(
            "occupancy LP ended with status {:?}, gap {:.3e}",
            sol.status, sol.gap
        )));
    }
    // Constraints and objective touch only the diagonal, so the diagonal of
    // any optimal PSD solution is an optimal occupancy measure.
    let mut nu: Vec<f64> = (0..mdp.nx * mdp.na).map(|i| sol.x.get(i, i).re.max(0.0)).collect();
    let s: f64 = nu.iter().sum();
    nu.iter_mut().for_each(|v| *v /= s);
    Ok((OccupancyMeasure::new(mdp.nx, mdp.na, nu)?, sol.primal_obj))
}

/// Dual of the occupancy LP: maximizes `⟨ξ, (1−β)μ0⟩` subject to
/// `c(x,a) + βΣ_y ξ(y)p(y|x,a) ≥ ξ(x)`. The returned `ξ` is shifted onto
/// the feasible side, so the inequalities hold exactly.
pub fn lp_dual(mdp: &ClassicalMdp, mu0: &[f64]) -> Result<(Vec<f64>, f64)> {
    let problem = occupancy_problem(mdp, mu0)?;
    let sol = conic::solve(&problem, &SolveOptions::default())?;
    if sol.status != conic::SdpStatus::Optimal && sol.gap > 1e-6 {
        return Err(Error::Solver(format!(
            "occupancy LP dual ended with status {:?}, gap {:.3e}",
            sol.status, sol.gap
        )));
    }
    let mut xi = sol.y.clone();
    let violation = dual_violation(mdp, &xi);
    if violation > 0.0 {
        let shift = violation / (1.0 - mdp.beta);
        xi.iter_mut().for_each(|v| *v -= shift);
    }
    let value: f64 = xi
        .iter()
        .zip(mu0)
        .map(|(x, m)| x * (1.0 - mdp.beta) * m)
        .sum();
    Ok((xi, value))
}

/// Worst violation of `c(x,a) + βΣ_y ξ(y)p(y|x,a) − ξ(x) ≥ 0`.
fn dual_violation(mdp: &ClassicalMdp, xi: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for x in 0..mdp.nx {
        for a in 0..mdp.na {
            let slack = mdp.cost(x, a)
                + mdp.beta * (0..mdp.nx).map(|y| xi[y] * mdp.p(y, x, a)).sum::<f64>()
                - xi[x];
            worst = worst.max(-slack);
        }
    }
    worst
}

/// Disintegrate an occupancy measure into a stationary kernel
/// `π(a|x) = ν(x,a)/ν(x)`; states with negligible marginal get the uniform
/// row.
pub fn disintegrate(nu: &OccupancyMeasure) -> StationaryKernel {
    let (nx, na) = (nu.nx, nu.na);
    let mut pi = vec![0.0; nx * na];
    for x in 0..nx {
        let marginal: f64 = (0..na).map(|a| nu.get(x, a).max(0.0)).sum();
        if marginal > 1e-12 {
            for a in 0..na {
                pi[x * na + a] = nu.get(x, a).max(0.0) / marginal;
            }
        } else {
            for a in 0..na {
                pi[x * na + a] = 1.0 / na as f64;
            }
        }
    }
    StationaryKernel { nx, na, pi }
}

/// Embed a classical MDP as a q-MDP: the kernel `(x,a) ↦ p(·|x,a)` becomes
/// a quantum channel `H_X ⊗ H_A → H_X`, the cost table the diagonal cost
/// operator, and `ρ0 = diag(μ0)`.
pub fn embed_to_qmdp(mdp: &ClassicalMdp, mu0: &[f64]) -> Result<QmdpInstance> {
    if mu0.len() != mdp.nx {
        return Err(Error::DimensionMismatch("mu0 length".into()));
    }
    let w: Vec<Vec<f64>> = (0..mdp.nx)
        .map(|y| {
            (0..mdp.nx * mdp.na)
                .map(|xa| mdp.p(y, xa / mdp.na, xa % mdp.na))
                .collect()
        })
        .collect();
    let channel = classical_channel_embed(&w)?;
    let cost = HermitianOperator::from_diag(mdp.cost_table());
    let rho0 = DensityOperator::from_distribution(mu0)?;
    QmdpInstance::new(mdp.nx, mdp.na, channel, cost, mdp.beta, rho0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm::hs_distance;
    use crate::sample;

    fn two_state_deterministic() -> ClassicalMdp {
        // Action 0 stays, action 1 swaps; costs favor reaching state 1.
        let nx = 2;
        let na = 2;
        let mut p = vec![0.0; nx * nx * na];
        let mut set = |y: usize, x: usize, a: usize, v: f64| {
            p[(y * nx + x) * na + a] = v;
        };
        set(0, 0, 0, 1.0);
        set(1, 0, 1, 1.0);
        set(1, 1, 0, 1.0);
        set(0, 1, 1, 1.0);
        let c = vec![1.0, 0.8, 0.1, 0.9];
        ClassicalMdp::new(nx, na, p, c, 0.9).unwrap()
    }

    #[test]
    fn geometric_series_value() {
        let mdp = ClassicalMdp::new(1, 1, vec![1.0], vec![1.0], 0.9).unwrap();
        let (v, _) = value_iteration(&mdp, 1e-9);
        assert!((v[0] - 10.0).abs() < 1e-8);
    }

    #[test]
    fn zero_cost_gives_zero_value() {
        let mut rng = sample::rng(51);
        let mut mdp = sample::random_classical_mdp(&mut rng, 3, 2, 0.7);
        mdp = ClassicalMdp::new(3, 2, mdp_p(&mdp), vec![0.0; 6], 0.7).unwrap();
        let (v, _) = value_iteration(&mdp, 1e-10);
        assert!(v.iter().all(|&x| x.abs() < 1e-12));
    }

    fn mdp_p(mdp: &ClassicalMdp) -> Vec<f64> {
        let (nx, na) = (mdp.nx(), mdp.na());
        let mut p = vec![0.0; nx * nx * na];
        for y in 0..nx {
            for x in 0..nx {
                for a in 0..na {
                    p[(y * nx + x) * na + a] = mdp.p(y, x, a);
                }
            }
        }
        p
    }

    #[test]
    fn value_iteration_matches_policy_enumeration() {
        // Oracle: evaluate all four deterministic stationary policies by
        // linear solve and take the pointwise minimum.
        let mdp = two_state_deterministic();
        let (v, _) = value_iteration(&mdp, 1e-9);
        let mut best = vec![f64::INFINITY; 2];
        for a0 in 0..2 {
            for a1 in 0..2 {
                let k = StationaryKernel::deterministic(2, 2, &[a0, a1]);
                let pv = policy_value(&mdp, &k).unwrap();
                for x in 0..2 {
                    best[x] = best[x].min(pv[x]);
                }
            }
        }
        for x in 0..2 {
            assert!((v[x] - best[x]).abs() < 1e-8, "state {x}: {} vs {}", v[x], best[x]);
        }
    }

    #[test]
    fn value_iteration_residuals_contract() {
        let mut rng = sample::rng(52);
        let mdp = sample::random_classical_mdp(&mut rng, 3, 3, 0.8);
        let mut v = vec![0.0; 3];
        let mut prev_resid = f64::INFINITY;
        for _ in 0..50 {
            let (w, _) = mdp.bellman_public(&v);
            let resid = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
            if prev_resid.is_finite() && prev_resid > 1e-14 {
                assert!(resid <= 0.8 * prev_resid + 1e-9);
            }
            prev_resid = resid;
            v = w;
        }
    }

    impl ClassicalMdp {
        fn bellman_public(&self, v: &[f64]) -> (Vec<f64>, Vec<usize>) {
            self.bellman(v)
        }
    }

    #[test]
    fn dmdp_step_examples() {
        let mut rng = sample::rng(53);
        let mdp = sample::random_classical_mdp(&mut rng, 3, 2, 0.5);
        // Point mass at (x0, a0) propagates to p(·|x0,a0).
        let mut nu = vec![0.0; 6];
        nu[1 * 2 + 1] = 1.0;
        let out = mdp.dmdp_step(&nu);
        for y in 0..3 {
            assert!((out[y] - mdp.p(y, 1, 1)).abs() < 1e-15);
        }
        // Identity transitions marginalize over actions.
        let mut p = vec![0.0; 3 * 3 * 2];
        for x in 0..3 {
            for a in 0..2 {
                p[(x * 3 + x) * 2 + a] = 1.0;
            }
        }
        let idmdp = ClassicalMdp::new(3, 2, p, vec![0.0; 6], 0.5).unwrap();
        let nu: Vec<f64> = sample::random_distribution(&mut rng, 6);
        let out = idmdp.dmdp_step(&nu);
        for x in 0..3 {
            let marg: f64 = (0..2).map(|a| nu[x * 2 + a]).sum();
            assert!((out[x] - marg).abs() < 1e-14);
        }
        // Random table against direct summation.
        let nu: Vec<f64> = sample::random_distribution(&mut rng, 6);
        let out = mdp.dmdp_step(&nu);
        for y in 0..3 {
            let mut s = 0.0;
            for x in 0..3 {
                for a in 0..2 {
                    s += mdp.p(y, x, a) * nu[x * 2 + a];
                }
            }
            assert!((out[y] - s).abs() < 1e-15);
        }
    }

    #[test]
    fn single_action_occupancy_matches_truncated_rollout() {
        let mut rng = sample::rng(54);
        let mdp = sample::random_classical_mdp(&mut rng, 3, 1, 0.6);
        let mu0 = sample::random_distribution(&mut rng, 3);
        let (nu, value) = occupancy_lp(&mdp, &mu0).unwrap();
        // Rollout oracle: ν = (1−β) Σ β^t μ_t ⊗ δ_a for the unique policy.
        let max_c = mdp.cost_table().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let mut t_max = 0;
        while 0.6f64.powi(t_max + 1) * max_c / 0.4 >= 1e-10 {
            t_max += 1;
        }
        let mut mu = mu0.clone();
        let mut direct = vec![0.0f64; 3];
        let mut cost = 0.0;
        for t in 0..=t_max {
            let w = 0.4 * 0.6f64.powi(t);
            for x in 0..3 {
                direct[x] += w * mu[x];
                cost += w * mu[x] * mdp.cost(x, 0);
            }
            mu = mdp.dmdp_step(&mu);
        }
        for x in 0..3 {
            assert!((nu.get(x, 0) - direct[x]).abs() < 1e-6);
        }
        assert!((value - cost).abs() < 1e-7);
    }

    #[test]
    fn lp_value_matches_value_iteration() {
        let mut rng = sample::rng(55);
        for _ in 0..4 {
            let mdp = sample::random_classical_mdp(&mut rng, 3, 2, 0.85);
            let mu0 = sample::random_distribution(&mut rng, 3);
            let (_, value) = occupancy_lp(&mdp, &mu0).unwrap();
            let (v, _) = value_iteration(&mdp, 1e-9);
            let expect: f64 = v.iter().zip(&mu0).map(|(a, b)| a * b).sum();
            assert!((value / (1.0 - 0.85) - expect).abs() < 1e-6);
        }
    }

    #[test]
    fn constant_cost_lp_value_is_one() {
        let mut rng = sample::rng(56);
        let base = sample::random_classical_mdp(&mut rng, 2, 2, 0.9);
        let mdp = ClassicalMdp::new(2, 2, mdp_p(&base), vec![1.0; 4], 0.9).unwrap();
        let mu0 = vec![0.3, 0.7];
        let (_, value) = occupancy_lp(&mdp, &mu0).unwrap();
        assert!((value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn dual_lp_certificates() {
        let mut rng = sample::rng(57);
        let mdp = sample::random_classical_mdp(&mut rng, 3, 2, 0.75);
        let mu0 = sample::random_distribution(&mut rng, 3);
        let (xi, dval) = lp_dual(&mdp, &mu0).unwrap();
        let (v, _) = value_iteration(&mdp, 1e-10);
        // Feasibility holds exactly after the shift; every feasible ξ is
        // pointwise below v*, and at the optimum the values agree.
        assert!(dual_violation(&mdp, &xi) <= 0.0);
        for x in 0..3 {
            assert!(xi[x] <= v[x] + 1e-6);
        }
        let expect: f64 = v.iter().zip(&mu0).map(|(a, b)| a * b * (1.0 - 0.75)).sum();
        assert!((dval - expect).abs() < 1e-6);
        // v* itself is feasible, and weak duality holds for shifted copies.
        assert!(dual_violation(&mdp, &v) <= 1e-9);
        let (_, primal) = occupancy_lp(&mdp, &mu0).unwrap();
        for shift in [0.0, 0.1, 1.0] {
            let test: Vec<f64> = v.iter().map(|a| a - shift).collect();
            let val: f64 = test.iter().zip(&mu0).map(|(a, b)| a * b * 0.25).sum();
            assert!(val <= primal + 1e-6);
        }
    }

    #[test]
    fn zero_cost_dual_is_zero() {
        let mut rng = sample::rng(58);
        let base = sample::random_classical_mdp(&mut rng, 2, 2, 0.5);
        let mdp = ClassicalMdp::new(2, 2, mdp_p(&base), vec![0.0; 4], 0.5).unwrap();
        let (xi, dval) = lp_dual(&mdp, &[0.5, 0.5]).unwrap();
        assert!(dval.abs() < 1e-7);
        assert!(xi.iter().all(|v| v.abs() < 1e-5));
    }

    #[test]
    fn strong_duality_on_random_instances() {
        let mut rng = sample::rng(59);
        for _ in 0..4 {
            let mdp = sample::random_classical_mdp(&mut rng, 3, 3, 0.9);
            let mu0 = sample::random_distribution(&mut rng, 3);
            let (nu, primal) = occupancy_lp(&mdp, &mu0).unwrap();
            let (_, dual) = lp_dual(&mdp, &mu0).unwrap();
            assert!((primal - dual).abs() < 1e-6);
            // Flow constraint residual.
            let step = mdp.dmdp_step(nu.table());
            for y in 0..3 {
                let marg: f64 = (0..3).map(|a| nu.get(y, a)).sum();
                let resid = marg - 0.9 * step[y] - 0.1 * mu0[y];
                assert!(resid.abs() < 1e-7);
            }
        }
    }

    #[test]
    fn disintegration_round_trips() {
        let mut rng = sample::rng(60);
        // ν = μ ⊗ π recovers π wherever μ(x) > 0.
        let mu = sample::random_distribution(&mut rng, 3);
        let rows = sample::random_kernel_rows(&mut rng, 3, 2);
        let mut nu = vec![0.0; 6];
        for x in 0..3 {
            for a in 0..2 {
                nu[x * 2 + a] = mu[x] * rows[x][a];
            }
        }
        let kernel = disintegrate(&OccupancyMeasure::new(3, 2, nu).unwrap());
        for x in 0..3 {
            for a in 0..2 {
                assert!((kernel.prob(x, a) - rows[x][a]).abs() < 1e-12);
            }
        }
        // Zero-marginal state gets the uniform row.
        let nu = OccupancyMeasure::new(2, 2, vec![0.6, 0.4, 0.0, 0.0]).unwrap();
        let kernel = disintegrate(&nu);
        assert!((kernel.prob(1, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lp_policy_round_trip() {
        let mut rng = sample::rng(61);
        let mdp = sample::random_classical_mdp(&mut rng, 3, 2, 0.8);
        let mu0 = sample::random_distribution(&mut rng, 3);
        let (nu, value) = occupancy_lp(&mdp, &mu0).unwrap();
        let kernel = disintegrate(&nu);
        let pv = policy_value(&mdp, &kernel).unwrap();
        let rollout: f64 = pv.iter().zip(&mu0).map(|(a, b)| a * b).sum();
        assert!((rollout - value / (1.0 - 0.8)).abs() < 1e-6);
    }

    #[test]
    fn embedding_commutes_with_dmdp_step() {
        let mut rng = sample::rng(62);
        let mdp = sample::random_classical_mdp(&mut rng, 3, 2, 0.7);
        let mu0 = sample::random_distribution(&mut rng, 3);
        let q = embed_to_qmdp(&mdp, &mu0).unwrap();
        for _ in 0..3 {
            let nu = sample::random_distribution(&mut rng, 6);
            let quantum = q.channel().apply(&HermitianOperator::from_diag(&nu)).unwrap();
            let classical = HermitianOperator::from_diag(&mdp.dmdp_step(&nu));
            assert!(hs_distance(&quantum, &classical) < 1e-10);
        }
        // Diagonal cost inner product reproduces the classical cost.
        let nu = sample::random_distribution(&mut rng, 6);
        let joint = HermitianOperator::from_diag(&nu);
        let got = crate::herm::hs_inner(q.cost(), &joint).unwrap();
        let expect: f64 = (0..6).map(|i| mdp.cost(i / 2, i % 2) * nu[i]).sum();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn identity_transitions_fix_classical_marginals() {
        let mut p = vec![0.0; 2 * 2 * 2];
        for x in 0..2 {
            for a in 0..2 {
                p[(x * 2 + x) * 2 + a] = 1.0;
            }
        }
        let mdp = ClassicalMdp::new(2, 2, p, vec![0.0; 4], 0.5).unwrap();
        let q = embed_to_qmdp(&mdp, &[0.25, 0.75]).unwrap();
        let nu = [0.1, 0.2, 0.3, 0.4];
        let out = q.channel().apply(&HermitianOperator::from_diag(&nu)).unwrap();
        assert!((out.get(0, 0).re - 0.3).abs() < 1e-12);
        assert!((out.get(1, 1).re - 0.7).abs() < 1e-12);
    }
}
