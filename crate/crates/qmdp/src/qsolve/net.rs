//! Value-function algorithms.
//!
//! Open loop: build a finite covering net of the state space, solve the
//! dual occupation SDP at every net point, and evaluate the value function
//! by nearest-point lookup `V_n(ρ) = ⟨ξ_{Q(ρ)}, ρ⟩`. The accuracy guarantee
//! scales with the covering radius, which is estimated empirically against
//! a 10× denser probe sample and reported, never assumed.
//!
//! Closed loop: the optimal value function is linear with a diagonal
//! operator, recovered exactly by one dual solve per classical basis state.

use super::sdp::{QSdpOptions, csp_face_minimize, face_objective, solve_sdp_closed, solve_sdp_open};
use super::{QmdpInstance, bottom_eigenprojector, contract_x, golden_min};
use crate::herm::{DensityOperator, HermitianOperator, hs_distance, hs_inner};
use crate::sample;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

/// One net point: the state, the exact dual-feasible certificate solved at
/// it, and the dual objective value there.
#[derive(Clone, Debug)]
pub struct ValueNetPoint {
    pub state: DensityOperator,
    pub xi: HermitianOperator,
    pub dual_value: f64,
}

#[derive(Clone, Debug)]
pub struct ValueNetOptions {
    /// Hard cap on the net size.
    pub cap: usize,
    pub sdp: QSdpOptions,
}

impl Default for ValueNetOptions {
    fn default() -> Self {
        Self { cap: 20_000, sdp: QSdpOptions::default() }
    }
}

/// Covering-net approximation of the open-loop optimal value function.
#[derive(Clone, Debug)]
pub struct ValueNet {
    pub resolution: usize,
    points: Vec<ValueNetPoint>,
    /// Empirical covering radius: max distance-to-net over a 10× denser
    /// probe sample of the state space.
    pub covering_radius_estimate: f64,
    /// Net points whose dual solve failed and were dropped.
    pub dropped: usize,
}

impl ValueNet {
    pub fn points(&self) -> impl Iterator<Item = &DensityOperator> {
        self.points.iter().map(|p| &p.state)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dual_at(&self, idx: usize) -> (&HermitianOperator, f64) {
        (&self.points[idx].xi, self.points[idx].dual_value)
    }

    /// Index of the nearest net point in Hilbert-Schmidt norm; strict
    /// comparison keeps the lowest index on ties.
    pub fn nearest_index(&self, rho: &DensityOperator) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = hs_distance(p.state.op(), rho.op());
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// `V_n(ρ) = ⟨ξ_{Q(ρ)}, ρ⟩`.
    pub fn evaluate(&self, rho: &DensityOperator) -> f64 {
        let i = self.nearest_index(rho);
        hs_inner(&self.points[i].xi, rho.op()).expect("matching dims")
    }
}

/// Bloch-ball lattice for qubit states: cubic lattice of spacing `1.6/n`
/// clipped to the (slightly shrunk) unit ball, projection included.
fn bloch_net(n: usize) -> Vec<DensityOperator> {
    let h = 1.6 / n as f64;
    let kmax = (1.0 / h).ceil() as i64 + 1;
    let shrink = 1.0 - 1e-6;
    let mut raw: Vec<[f64; 3]> = Vec::new();
    for i in -kmax..=kmax {
        for j in -kmax..=kmax {
            for k in -kmax..=kmax {
                let mut r = [i as f64 * h, j as f64 * h, k as f64 * h];
                let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
                if norm > 1.0 + h * 0.87 {
                    continue;
                }
                if norm > shrink {
                    let s = shrink / norm;
                    r = [r[0] * s, r[1] * s, r[2] * s];
                }
                raw.push(r);
            }
        }
    }
    // Projection can collide lattice points; quantize and deduplicate.
    raw.sort_by(|a, b| a.partial_cmp(b).unwrap());
    raw.dedup_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .all(|(x, y)| (x - y).abs() < 1e-12)
    });
    raw.into_iter().map(|r| bloch_state(r[0], r[1], r[2])).collect()
}

pub(crate) fn bloch_state(x: f64, y: f64, z: f64) -> DensityOperator {
    let m = crate::herm::ComplexMatrix::from_rows(&[
        vec![
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
        ],
        vec![
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        ],
    ])
    .unwrap();
    DensityOperator::new_unchecked(HermitianOperator::herm_part(&m))
}

/// Qutrit net: eigenvalue-simplex grid conjugated by a fixed seeded family
/// of unitaries.
fn qutrit_net(n: usize) -> Vec<DensityOperator> {
    let mut rng = sample::rng(0x51A5_0003);
    let unitaries: Vec<crate::herm::ComplexMatrix> =
        (0..8 * n).map(|_| sample::random_unitary(&mut rng, 3)).collect();
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=(n - i) {
            let lam = [
                i as f64 / n as f64,
                j as f64 / n as f64,
                (n - i - j) as f64 / n as f64,
            ];
            // Sorted spectra are equivalent up to the unitary family; skip
            // permuted duplicates.
            if lam[0] < lam[1] || lam[1] < lam[2] {
                continue;
            }
            let diag = HermitianOperator::from_diag(&lam);
            if lam[0] - lam[2] < 1e-12 {
                out.push(DensityOperator::new_unchecked(diag));
                continue;
            }
            for u in &unitaries {
                let m = u.matmul(diag.matrix()).matmul(&u.adjoint());
                out.push(DensityOperator::new_unchecked(HermitianOperator::herm_part(&m)));
            }
        }
    }
    out
}

fn probe_states(dim: usize, count: usize) -> Vec<DensityOperator> {
    let mut rng = sample::rng(0x9e3779b97f4a7c15);
    (0..count)
        .map(|_| {
            // Mix ranks: mostly generic full-rank states, some pure ones,
            // so boundary coverage enters the radius estimate.
            let coin: f64 = rng.random();
            if coin < 0.25 {
                sample::random_pure(&mut rng, dim)
            } else {
                sample::random_density(&mut rng, dim)
            }
        })
        .collect()
}

/// Covering-net value-function construction for the open-loop class:
/// solve the dual occupation SDP at every net point and store the exact
/// dual-feasible certificate.
pub fn value_net_open(q: &QmdpInstance, resolution: usize, opts: &ValueNetOptions) -> Result<ValueNet> {
    if resolution == 0 {
        return Err(Error::InvalidInstance("net resolution must be >= 1".into()));
    }
    let states = match q.dim_x() {
        2 => bloch_net(resolution),
        3 => qutrit_net(resolution),
        d => {
            return Err(Error::InvalidInstance(format!(
                "net construction covers state dims 2 and 3, got {d}"
            )));
        }
    };
    if states.len() > opts.cap {
        return Err(Error::NetTooLarge(states.len(), opts.cap));
    }

    let solved: Vec<Result<ValueNetPoint>> = states
        .into_par_iter()
        .map(|state| {
            let inst = q.with_rho0(state.clone())?;
            let rep = solve_sdp_open(&inst, &opts.sdp)?;
            Ok(ValueNetPoint { state, xi: rep.xi, dual_value: rep.dual_value })
        })
        .collect();
    let mut points = Vec::with_capacity(solved.len());
    let mut dropped = 0usize;
    for r in solved {
        match r {
            Ok(p) => points.push(p),
            Err(e) => {
                dropped += 1;
                eprintln!("value net: dropping point after solver failure: {e}");
            }
        }
    }
    if points.is_empty() {
        return Err(Error::Solver("every net point failed to solve".into()));
    }

    let probes = probe_states(q.dim_x(), 10 * points.len());
    let covering_radius_estimate = probes
        .par_iter()
        .map(|p| {
            points
                .iter()
                .map(|q| hs_distance(p.op(), q.state.op()))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max);

    Ok(ValueNet { resolution, points, covering_radius_estimate, dropped })
}

/// Exact closed-loop value function: one dual solve per classical basis
/// state; the value function is `ρ ↦ Σ_x v(x)·ρ[x,x]`.
#[derive(Clone, Debug)]
pub struct ClosedValue {
    diag: Vec<f64>,
}

impl ClosedValue {
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn operator(&self) -> HermitianOperator {
        HermitianOperator::from_diag(&self.diag)
    }

    /// Linear evaluation `V_w(ρ) = Σ_x v(x)·ρ[x,x]`.
    pub fn evaluate(&self, rho: &DensityOperator) -> f64 {
        self.diag
            .iter()
            .enumerate()
            .map(|(x, v)| v * rho.op().get(x, x).re)
            .sum()
    }
}

pub fn value_closed(q: &QmdpInstance, opts: &QSdpOptions) -> Result<ClosedValue> {
    let mut diag = Vec::with_capacity(q.dim_x());
    for x in 0..q.dim_x() {
        let inst = q.with_rho0(DensityOperator::pure_basis(q.dim_x(), x))?;
        let rep = solve_sdp_closed(&inst, opts).map_err(|e| {
            Error::Solver(format!("closed dual solve failed at basis state {x}: {e}"))
        })?;
        diag.push(rep.xi.get(x, x).re);
    }
    Ok(ClosedValue { diag })
}

/// One application of the open-loop dynamic-programming operator to the
/// net value function: `min_π [⟨c, ρ⊗π⟩ + β·V_n(N(ρ⊗π))]`, evaluated by
/// Frank-Wolfe over the appended state with the piecewise-linear net
/// evaluator. Used for fixed-point diagnostics.
pub fn bellman_step_open(q: &QmdpInstance, net: &ValueNet, rho: &DensityOperator) -> Result<f64> {
    let da = q.dim_a();
    let objective = |pi: &DensityOperator| -> f64 {
        let sigma = crate::herm::tensor(rho.op(), pi.op());
        let cost = hs_inner(q.cost(), &sigma).expect("dims");
        let next = DensityOperator::new_unchecked(q.channel().apply(&sigma).expect("dims"));
        cost + q.beta() * net.evaluate(&next)
    };
    let mut pi = DensityOperator::maximally_mixed(da);
    let mut value = objective(&pi);
    for _ in 0..60 {
        // Gradient within the current net cell.
        let sigma = crate::herm::tensor(rho.op(), pi.op());
        let next = DensityOperator::new_unchecked(q.channel().apply(&sigma)?);
        let cell = net.nearest_index(&next);
        let (xi, _) = net.dual_at(cell);
        let w = q.cost().add(&q.channel().adjoint_apply(xi)?.scale(q.beta()));
        let g = contract_x(&w, rho.op(), q.dim_x(), da);
        let (_, s) = bottom_eigenprojector(&g, 1e-9)?;
        let fw_gap = hs_inner(&g, pi.op())? - hs_inner(&g, s.op())?;
        if fw_gap <= 1e-12 {
            break;
        }
        let seg = |alpha: f64| -> f64 {
            let mixed = pi.op().scale(1.0 - alpha).add(&s.op().scale(alpha));
            objective(&DensityOperator::new_unchecked(mixed))
        };
        let (alpha, seg_val) = golden_min(&seg, 0.0, 1.0, 48);
        if seg_val >= value - 1e-13 {
            break;
        }
        pi = DensityOperator::new_unchecked(pi.op().scale(1.0 - alpha).add(&s.op().scale(alpha)));
        value = seg_val;
    }
    Ok(value)
}

/// One application of the closed-loop dynamic-programming operator to a
/// linear value function: a single SDP over the classical-state-preserving
/// Choi face.
pub fn bellman_step_closed(
    q: &QmdpInstance,
    value: &ClosedValue,
    rho: &DensityOperator,
) -> Result<f64> {
    let m = q
        .cost()
        .add(&q.channel().adjoint_apply(&value.operator())?.scale(q.beta()));
    let g = face_objective(&m, rho.op(), q.dim_x(), q.dim_a());
    let (val, _) = csp_face_minimize(&g, q.dim_x(), q.dim_a(), &QSdpOptions::default())?;
    Ok(val)
}
