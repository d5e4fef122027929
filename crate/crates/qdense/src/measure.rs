//! Parameterized single-party von Neumann measurements.
//!
//! Measuring one party yields every outcome branch at once (no sampling):
//! residual states over the remaining parties, kept unnormalized so their
//! squared norms are the outcome probabilities. A seeded sampler sits on top
//! for Monte Carlo runs. No angle restriction is imposed here; each
//! concentration matrix enforces its own validity domain downstream.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qcore::{PureState, TOL_NORM};

/// Qubit basis |+> = cos(t)|0> + sin(t)|1>, |-> = sin(t)|0> - cos(t)|1>.
#[derive(Debug, Clone, Copy)]
pub struct QubitBasis {
    pub theta: f64,
}

/// Qutrit basis |up> = sin(t)|0> + cos(t)|2>, |slant> = |1>,
/// |down> = cos(t)|0> - sin(t)|2>.
#[derive(Debug, Clone, Copy)]
pub struct QutritBasis {
    pub theta: f64,
}

#[derive(Debug, Clone, Copy)]
pub enum Basis {
    Qubit(QubitBasis),
    Qutrit(QutritBasis),
    /// Plain computational readout, used for ancilla measurements.
    Computational { dim: usize },
}

impl Basis {
    pub fn qubit(theta: f64) -> Basis {
        Basis::Qubit(QubitBasis { theta })
    }

    pub fn qutrit(theta: f64) -> Basis {
        Basis::Qutrit(QutritBasis { theta })
    }

    pub fn computational(dim: usize) -> Basis {
        Basis::Computational { dim }
    }

    pub fn dim(&self) -> usize {
        match self {
            Basis::Qubit(_) => 2,
            Basis::Qutrit(_) => 3,
            Basis::Computational { dim } => *dim,
        }
    }

    pub fn outcome_labels(&self) -> Vec<&'static str> {
        match self {
            Basis::Qubit(_) => vec!["+", "-"],
            Basis::Qutrit(_) => vec!["up", "slant", "down"],
            Basis::Computational { dim: 2 } => vec!["0", "1"],
            Basis::Computational { .. } => vec!["0", "1", "2"],
        }
    }

    /// Basis vectors as amplitude columns over the computational basis.
    pub fn vectors(&self) -> Vec<Vec<Complex64>> {
        let c = |x: f64| Complex64::new(x, 0.0);
        match self {
            Basis::Qubit(QubitBasis { theta }) => {
                let (s, co) = theta.sin_cos();
                vec![vec![c(co), c(s)], vec![c(s), c(-co)]]
            }
            Basis::Qutrit(QutritBasis { theta }) => {
                let (s, co) = theta.sin_cos();
                vec![
                    vec![c(s), c(0.0), c(co)],
                    vec![c(0.0), c(1.0), c(0.0)],
                    vec![c(co), c(0.0), c(-s)],
                ]
            }
            Basis::Computational { dim } => (0..*dim)
                .map(|k| {
                    (0..*dim)
                        .map(|d| if d == k { Complex64::ONE } else { Complex64::ZERO })
                        .collect()
                })
                .collect(),
        }
    }

    /// Max deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let vs = self.vectors();
        let mut dev = 0.0f64;
        for (i, vi) in vs.iter().enumerate() {
            for (j, vj) in vs.iter().enumerate() {
                let g: Complex64 = vi.iter().zip(vj).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                dev = dev.max((g - target).norm());
            }
        }
        dev
    }
}

/// One measurement outcome: label, residual state (unnormalized), probability.
#[derive(Debug, Clone)]
pub struct Branch {
    pub outcome: String,
    pub state: PureState,
    pub probability: f64,
}

/// All outcome branches of measuring one party.
///
/// Probabilities are the squared norms of the residual states; for a
/// normalized input they sum to 1.
#[derive(Debug, Clone)]
pub struct BranchDecomposition {
    pub party: String,
    party_position: usize,
    basis_vectors: Vec<Vec<Complex64>>,
    pub branches: Vec<Branch>,
}

impl BranchDecomposition {
    pub fn probabilities(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.probability).collect()
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn branch(&self, outcome: &str) -> Option<&Branch> {
        self.branches.iter().find(|b| b.outcome == outcome)
    }

    /// Rebuild the pre-measurement state: sum of outcome-ket (x) branch.
    pub fn reconstruct(&self) -> Result<PureState> {
        let first = &self.branches[0].state;
        let branch_reg = first.register();
        // original register: branch register with the measured party re-inserted
        let mut parties: Vec<(&str, usize)> = branch_reg
            .labels()
            .iter()
            .zip(branch_reg.dims())
            .map(|(l, d)| (*l, d))
            .collect();
        let party_dim = self.basis_vectors[0].len();
        parties.insert(self.party_position, (self.party.as_str(), party_dim));
        let reg = crate::qcore::Register::new(&parties)?;

        let mut amps = vec![Complex64::ZERO; reg.dim()];
        for (k, branch) in self.branches.iter().enumerate() {
            let v = &self.basis_vectors[k];
            for (j, amp) in branch.state.amps().iter().enumerate() {
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                let mut digits = branch.state.register().digits_of(j);
                for (d, vd) in v.iter().enumerate() {
                    digits.insert(self.party_position, d);
                    let idx = reg.index_of(&digits);
                    amps[idx] += vd * amp;
                    digits.remove(self.party_position);
                }
            }
        }
        PureState::new(reg, amps, false)
    }
}

/// Deterministically decompose `s` by a von Neumann measurement of `party`.
pub fn measure_party(s: &PureState, party: &str, basis: &Basis) -> Result<BranchDecomposition> {
    let reg = s.register();
    let pos = reg.position_of(party)?;
    let pdim = reg.dim_of(party)?;
    if pdim != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: pdim,
            found: basis.dim(),
        });
    }
    let rest = reg.without(party)?;
    let vectors = basis.vectors();
    let labels = basis.outcome_labels();

    let mut branches = Vec::with_capacity(pdim);
    for (k, v) in vectors.iter().enumerate() {
        let mut amps = vec![Complex64::ZERO; rest.dim()];
        for (j, slot) in amps.iter_mut().enumerate() {
            let mut digits = rest.digits_of(j);
            let mut sum = Complex64::ZERO;
            for (d, vd) in v.iter().enumerate() {
                digits.insert(pos, d);
                sum += vd.conj() * s.amp(&digits);
                digits.remove(pos);
            }
            *slot = sum;
        }
        let state = PureState::new(rest.clone(), amps, false)?;
        let probability = state.norm_sqr();
        branches.push(Branch {
            outcome: labels[k].to_string(),
            state,
            probability,
        });
    }
    Ok(BranchDecomposition {
        party: party.to_string(),
        party_position: pos,
        basis_vectors: vectors,
        branches,
    })
}

/// Draw one outcome with its probability; returns the branch index and the
/// normalized residual state.
pub fn sample_outcome<R: Rng>(
    d: &BranchDecomposition,
    rng: &mut R,
) -> Result<(usize, PureState)> {
    let total = d.total_probability();
    let mut u: f64 = rng.gen::<f64>() * total;
    let mut pick = d.branches.len() - 1;
    for (k, b) in d.branches.iter().enumerate() {
        if u < b.probability {
            pick = k;
            break;
        }
        u -= b.probability;
    }
    // skip zero-probability branches the walk may land on at the boundary
    if d.branches[pick].probability <= 0.0 {
        pick = d
            .branches
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.probability.total_cmp(&b.1.probability))
            .map(|(k, _)| k)
            .unwrap_or(0);
    }
    Ok((pick, d.branches[pick].state.normalize()?))
}

/// Probability completeness and reconstruction check for one decomposition.
pub fn decomposition_consistent(s: &PureState, d: &BranchDecomposition) -> Result<bool> {
    let sum_ok = (d.total_probability() - s.norm_sqr()).abs() <= TOL_NORM;
    let rec = d.reconstruct()?;
    let rec_ok = rec.max_amp_deviation(s)? <= TOL_NORM * 10.0;
    Ok(sum_ok && rec_ok)
}
