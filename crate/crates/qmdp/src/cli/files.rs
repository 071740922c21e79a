//! Problem and report file formats.
//!
//! Everything is JSON. Complex scalars are two-element arrays `[re, im]`
//! of IEEE-754 doubles; complex matrices are row-major nested arrays of
//! those pairs. Serialization uses shortest-round-trip printing, so values
//! survive a write/read cycle bit-exactly.

use crate::channel::{ChoiMatrix, CspPolicyChannel, KrausChannel};
use crate::classical::ClassicalMdp;
use crate::herm::{ComplexMatrix, DensityOperator, HermitianOperator};
use crate::qsolve::QmdpInstance;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let z = m.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(m: &MatrixJson) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<Complex64>> = m
        .iter()
        .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows)
}

/// On-disk problem description; the `kind` tag selects the variant.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ProblemFile {
    #[serde(rename = "qmdp")]
    Qmdp(QmdpFile),
    #[serde(rename = "classical-mdp")]
    Classical(ClassicalFile),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QmdpFile {
    pub dim_x: usize,
    pub dim_a: usize,
    pub beta: f64,
    pub rho0: MatrixJson,
    pub cost: MatrixJson,
    pub channel: ChannelJson,
}

/// Channel payload: exactly one of the two representations.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub choi: Option<MatrixJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalFile {
    pub nx: usize,
    pub na: usize,
    pub beta: f64,
    /// `p[y][x][a]`.
    pub p: Vec<Vec<Vec<f64>>>,
    /// `c[x][a]`.
    pub c: Vec<Vec<f64>>,
    pub mu0: Vec<f64>,
}

impl QmdpFile {
    pub fn to_instance(&self) -> Result<QmdpInstance> {
        let joint = self.dim_x * self.dim_a;
        let rho_mat = matrix_from_json(&self.rho0)?;
        if rho_mat.rows() != self.dim_x || rho_mat.cols() != self.dim_x {
            return Err(Error::DimensionMismatch(format!(
                "rho0 is {}x{}, declared dim_x {}",
                rho_mat.rows(),
                rho_mat.cols(),
                self.dim_x
            )));
        }
        let rho0 = DensityOperator::new(HermitianOperator::new(rho_mat)?)?;
        let cost_mat = matrix_from_json(&self.cost)?;
        if cost_mat.rows() != joint || cost_mat.cols() != joint {
            return Err(Error::DimensionMismatch(format!(
                "cost is {}x{}, declared joint dim {joint}",
                cost_mat.rows(),
                cost_mat.cols()
            )));
        }
        let cost = HermitianOperator::new(cost_mat)?;
        let channel = match (&self.channel.kraus, &self.channel.choi) {
            (Some(kraus), None) => {
                let ops: Result<Vec<ComplexMatrix>> =
                    kraus.iter().map(matrix_from_json).collect();
                KrausChannel::new(joint, self.dim_x, ops?)?
            }
            (None, Some(choi)) => {
                let mat = HermitianOperator::new(matrix_from_json(choi)?)?;
                ChoiMatrix::new(joint, self.dim_x, mat)?.to_kraus()?
            }
            _ => {
                return Err(Error::InvalidInstance(
                    "channel must carry exactly one of \"kraus\" or \"choi\"".into(),
                ));
            }
        };
        QmdpInstance::new(self.dim_x, self.dim_a, channel, cost, self.beta, rho0)
    }

    pub fn from_instance(q: &QmdpInstance) -> Self {
        Self {
            dim_x: q.dim_x(),
            dim_a: q.dim_a(),
            beta: q.beta(),
            rho0: matrix_to_json(q.rho0().op().matrix()),
            cost: matrix_to_json(q.cost().matrix()),
            channel: ChannelJson {
                kraus: Some(
                    q.channel().kraus_operators().iter().map(matrix_to_json).collect(),
                ),
                choi: None,
            },
        }
    }
}

impl ClassicalFile {
    pub fn to_mdp(&self) -> Result<ClassicalMdp> {
        if self.p.len() != self.nx
            || self.p.iter().any(|px| {
                px.len() != self.nx || px.iter().any(|pa| pa.len() != self.na)
            })
        {
            return Err(Error::DimensionMismatch(
                "p must be nested [y][x][a] with declared dims".into(),
            ));
        }
        if self.c.len() != self.nx || self.c.iter().any(|row| row.len() != self.na) {
            return Err(Error::DimensionMismatch(
                "c must be nested [x][a] with declared dims".into(),
            ));
        }
        let mut p = vec![0.0; self.nx * self.nx * self.na];
        for y in 0..self.nx {
            for x in 0..self.nx {
                for a in 0..self.na {
                    p[(y * self.nx + x) * self.na + a] = self.p[y][x][a];
                }
            }
        }
        let c: Vec<f64> = self.c.iter().flatten().copied().collect();
        ClassicalMdp::new(self.nx, self.na, p, c, self.beta)
    }

    pub fn mu0(&self) -> Result<Vec<f64>> {
        if self.mu0.len() != self.nx {
            return Err(Error::DimensionMismatch(format!(
                "mu0 has {} entries, declared nx {}",
                self.mu0.len(),
                self.nx
            )));
        }
        let s: f64 = self.mu0.iter().sum();
        if self.mu0.iter().any(|&v| v < 0.0) || (s - 1.0).abs() > 1e-9 {
            return Err(Error::NotStochastic(format!("mu0 sums to {s}")));
        }
        Ok(self.mu0.clone())
    }
}

/// Policy payload emitted in reports: a density matrix for stationary
/// open-loop policies, a Choi matrix for classical-state-preserving ones.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub choi: Option<MatrixJson>,
}

impl PolicyJson {
    pub fn open_loop(pi: &DensityOperator) -> Self {
        Self { pi: Some(matrix_to_json(pi.op().matrix())), choi: None }
    }

    pub fn csp(gamma: &CspPolicyChannel) -> Self {
        Self { pi: None, choi: Some(matrix_to_json(gamma.choi().matrix().matrix())) }
    }

    /// Re-validate the payload as a policy for the given dims.
    pub fn validate(&self, dim_x: usize, dim_a: usize) -> Result<()> {
        match (&self.pi, &self.choi) {
            (Some(pi), None) => {
                let op = HermitianOperator::new(matrix_from_json(pi)?)?;
                if op.dim() != dim_a {
                    return Err(Error::DimensionMismatch("policy dim".into()));
                }
                DensityOperator::new(op)?;
                Ok(())
            }
            (None, Some(choi)) => {
                let mat = HermitianOperator::new(matrix_from_json(choi)?)?;
                let choi = ChoiMatrix::new(dim_x, dim_x * dim_a, mat)?;
                CspPolicyChannel::new(choi)?;
                Ok(())
            }
            _ => Err(Error::InvalidInstance(
                "policy must carry exactly one of \"pi\" or \"choi\"".into(),
            )),
        }
    }
}

/// Solve/validate result record. Field order is fixed; timings are omitted
/// under `--no-timings` so identical runs produce identical bytes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub instance_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver_status: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primal_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_within_tol: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assumption_open: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assumption_closed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub net_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub net_dropped: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covering_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_certificate: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rollout_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rollout_tail_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub occupation_flow_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<std::collections::BTreeMap<String, f64>>,
}

impl ReportFile {
    pub fn new(command: &str, digest: String) -> Self {
        Self {
            command: command.to_string(),
            mode: None,
            instance_digest: digest,
            solver_status: None,
            primal_value: None,
            dual_value: None,
            gap: None,
            lower_bound: None,
            certificate_gap: None,
            optimal_within_tol: None,
            assumption_open: None,
            assumption_closed: None,
            values: None,
            net_points: None,
            net_dropped: None,
            covering_radius: None,
            policy: None,
            dual_certificate: None,
            rollout_value: None,
            rollout_tail_bound: None,
            occupation_flow_residual: None,
            timings_ms: None,
        }
    }

    /// Every numeric field must be finite before the record is written.
    pub fn check_finite(&self) -> Result<()> {
        let fields = [
            self.primal_value,
            self.dual_value,
            self.gap,
            self.lower_bound,
            self.certificate_gap,
            self.values.as_ref().and_then(|v| v.iter().copied().find(|x| !x.is_finite())),
            self.covering_radius,
            self.rollout_value,
            self.rollout_tail_bound,
            self.occupation_flow_residual,
        ];
        for f in fields.iter().flatten() {
            if !f.is_finite() {
                return Err(Error::Solver(format!("non-finite report field {f}")));
            }
        }
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(2 + digest.len() * 2);
    s.push_str("sha256:");
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}
