//! Dense complex linear algebra over multipartite registers.
//!
//! Registers mix qubit (dim 2) and qutrit (dim 3) parties. States are flat
//! amplitude vectors indexed mixed-radix with the first listed party most
//! significant. Gate matrices carry their own basis ordering, so matrices
//! transcribed from different sources keep their printed layout and `apply`
//! permutes indices as needed.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Unitarity tolerance for `check_unitary`.
pub const TOL_UNITARY: f64 = 1e-10;
/// Normalization / probability-sum tolerance.
pub const TOL_NORM: f64 = 1e-12;
/// Protocol-level equality tolerance.
pub const TOL_PROTOCOL: f64 = 1e-9;

/// Square root that continues into the imaginary axis for negative input.
///
/// Matrices transcribed verbatim contain entries like sqrt(1 - tan^2 t) that
/// leave the reals; the diagnostic path needs their complex value.
pub fn sqrt_c(x: f64) -> Complex64 {
    if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-x).sqrt())
    }
}

/// An ordered list of labeled subsystems with dimensions 2 or 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    parties: Vec<(String, usize)>,
}

impl Register {
    pub fn new(parties: &[(&str, usize)]) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::EmptyRegister);
        }
        let mut seen: Vec<&str> = Vec::new();
        for (label, dim) in parties {
            if !matches!(dim, 2 | 3) {
                return Err(Error::UnsupportedDim(*dim));
            }
            if seen.contains(label) {
                return Err(Error::DuplicateLabel((*label).to_string()));
            }
            seen.push(label);
        }
        Ok(Register {
            parties: parties
                .iter()
                .map(|(l, d)| ((*l).to_string(), *d))
                .collect(),
        })
    }

    /// Register of qubits, one per label.
    pub fn qubits(labels: &[&str]) -> Result<Self> {
        let parties: Vec<(&str, usize)> = labels.iter().map(|l| (*l, 2)).collect();
        Register::new(&parties)
    }

    /// Register of qutrits, one per label.
    pub fn qutrits(labels: &[&str]) -> Result<Self> {
        let parties: Vec<(&str, usize)> = labels.iter().map(|l| (*l, 3)).collect();
        Register::new(&parties)
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.parties.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parties.iter().map(|(_, d)| *d).collect()
    }

    /// Total Hilbert-space dimension (product of party dims).
    pub fn dim(&self) -> usize {
        self.parties.iter().map(|(_, d)| d).product()
    }

    pub fn position_of(&self, label: &str) -> Result<usize> {
        self.parties
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        let pos = self.position_of(label)?;
        Ok(self.parties[pos].1)
    }

    /// Stride of each party in the flat index (first party most significant).
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.parties.len()];
        for i in (0..self.parties.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.parties[i + 1].1;
        }
        strides
    }

    /// Decompose a flat index into per-party digits.
    pub fn digits_of(&self, mut index: usize) -> Vec<usize> {
        let strides = self.strides();
        let mut digits = Vec::with_capacity(self.parties.len());
        for s in strides {
            digits.push(index / s);
            index %= s;
        }
        digits
    }

    /// Flat index of a digit string.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        self.strides()
            .iter()
            .zip(digits)
            .map(|(s, d)| s * d)
            .sum()
    }

    /// Concatenation with another register; labels must stay unique.
    pub fn concat(&self, other: &Register) -> Result<Register> {
        let mut parties: Vec<(&str, usize)> = self
            .parties
            .iter()
            .map(|(l, d)| (l.as_str(), *d))
            .collect();
        for (l, d) in &other.parties {
            parties.push((l.as_str(), *d));
        }
        Register::new(&parties)
    }

    /// Register with one party removed.
    pub fn without(&self, label: &str) -> Result<Register> {
        let pos = self.position_of(label)?;
        if self.parties.len() == 1 {
            return Err(Error::EmptyRegister);
        }
        let parties: Vec<(&str, usize)> = self
            .parties
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pos)
            .map(|(_, (l, d))| (l.as_str(), *d))
            .collect();
        Register::new(&parties)
    }
}

/// A pure state over a register: a flat complex amplitude vector.
///
/// `normalized` records whether the squared norm is meant to be 1; residual
/// branch states produced by measurement keep their raw sub-normalized
/// amplitudes and carry `normalized: false`.
#[derive(Debug, Clone)]
pub struct PureState {
    register: Register,
    amps: Vec<Complex64>,
    normalized: bool,
}

impl PureState {
    pub fn new(register: Register, amps: Vec<Complex64>, normalized: bool) -> Result<Self> {
        if amps.len() != register.dim() {
            return Err(Error::BadAmplitudeCount {
                expected: register.dim(),
                found: amps.len(),
            });
        }
        for (i, a) in amps.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::NonFiniteAmplitude(i));
            }
        }
        Ok(PureState {
            register,
            amps,
            normalized,
        })
    }

    /// State with real amplitudes listed in flat-index order, normalized check
    /// left to the caller via the flag.
    pub fn from_real(register: Register, amps: &[f64], normalized: bool) -> Result<Self> {
        let camps = amps.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        PureState::new(register, camps, normalized)
    }

    /// Computational basis state |d1 d2 ...>.
    pub fn computational(register: Register, digits: &[usize]) -> Result<Self> {
        if digits.len() != register.num_parties() {
            return Err(Error::DimensionMismatch {
                expected: register.num_parties(),
                found: digits.len(),
            });
        }
        for (d, dim) in digits.iter().zip(register.dims()) {
            if *d >= dim {
                return Err(Error::InvalidParameter(format!(
                    "digit {d} out of range for dimension {dim}"
                )));
            }
        }
        let mut amps = vec![Complex64::ZERO; register.dim()];
        let idx = register.index_of(digits);
        amps[idx] = Complex64::ONE;
        PureState::new(register, amps, true)
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn is_normalized_flag(&self) -> bool {
        self.normalized
    }

    /// Amplitude of the basis ket with the given digits.
    pub fn amp(&self, digits: &[usize]) -> Complex64 {
        self.amps[self.register.index_of(digits)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&self) -> Result<PureState> {
        let n = self.norm_sqr().sqrt();
        if n < 1e-300 {
            return Err(Error::ZeroNorm);
        }
        let amps = self.amps.iter().map(|a| a / n).collect();
        PureState::new(self.register.clone(), amps, true)
    }

    /// Inner product <self|other>, conjugate-linear in `self`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |<self|other>|^2 on normalized copies of both states.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        let a = self.normalize()?;
        let b = other.normalize()?;
        Ok(a.inner(&b)?.norm_sqr())
    }

    /// Globally rescaled copy, flagged unnormalized.
    pub fn scaled(&self, factor: f64) -> PureState {
        let amps = self.amps.iter().map(|a| a * factor).collect();
        PureState {
            register: self.register.clone(),
            amps,
            normalized: false,
        }
    }

    /// Tensor product; party label sets must be disjoint.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let register = self.register.concat(&other.register)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        PureState::new(register, amps, self.normalized && other.normalized)
    }

    /// Amplitude-wise comparison, exact registers required.
    pub fn max_amp_deviation(&self, other: &PureState) -> Result<f64> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Reduced density matrix over `keep` (input normalized first).
    pub fn density_and_partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let s = self.normalize()?;
        let reg = &s.register;
        let keep_pos: Vec<usize> = keep
            .iter()
            .map(|l| reg.position_of(l))
            .collect::<Result<_>>()?;
        let all_dims = reg.dims();
        let keep_dims: Vec<usize> = keep_pos.iter().map(|&p| all_dims[p]).collect();
        let env_pos: Vec<usize> = (0..reg.num_parties())
            .filter(|p| !keep_pos.contains(p))
            .collect();
        let strides = reg.strides();

        let kdim: usize = keep_dims.iter().product();
        let edim: usize = env_pos.iter().map(|&p| all_dims[p]).product();
        let mut rho = vec![Complex64::ZERO; kdim * kdim];

        // flat index from a keep-index and an env-index
        let index_for = |k: usize, e: usize| -> usize {
            let mut idx = 0usize;
            let mut kk = k;
            for (j, &p) in keep_pos.iter().enumerate().rev() {
                let d = keep_dims[j];
                idx += (kk % d) * strides[p];
                kk /= d;
            }
            let mut ee = e;
            for &p in env_pos.iter().rev() {
                let d = all_dims[p];
                idx += (ee % d) * strides[p];
                ee /= d;
            }
            idx
        };

        for i in 0..kdim {
            for j in 0..kdim {
                let mut sum = Complex64::ZERO;
                for e in 0..edim {
                    sum += s.amps[index_for(i, e)] * s.amps[index_for(j, e)].conj();
                }
                rho[i * kdim + j] = sum;
            }
        }
        DensityMatrix::new(keep_dims, rho)
    }
}

/// Density matrix over a list of subsystem dimensions, row-major storage.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if data.len() != d * d {
            return Err(Error::BadAmplitudeCount {
                expected: d * d,
                found: data.len(),
            });
        }
        Ok(DensityMatrix { dims, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim() + j]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    pub fn max_deviation(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// A dense square matrix acting on an ordered tuple of subsystems.
///
/// `ordering` lists the basis digit-tuples row by row, in whatever layout the
/// matrix was originally written; `apply` translates between that layout and
/// the register's mixed-radix convention.
#[derive(Debug, Clone)]
pub struct GateMatrix {
    name: String,
    dim: usize,
    target_dims: Vec<usize>,
    ordering: Vec<Vec<usize>>,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    pub fn new(
        name: &str,
        target_dims: Vec<usize>,
        ordering: Vec<Vec<usize>>,
        entries: Vec<Complex64>,
    ) -> Result<Self> {
        let dim: usize = target_dims.iter().product();
        if ordering.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: ordering.len(),
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::BadAmplitudeCount {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        // ordering must enumerate every digit tuple exactly once
        let mut seen = vec![false; dim];
        for digits in &ordering {
            if digits.len() != target_dims.len() {
                return Err(Error::DimensionMismatch {
                    expected: target_dims.len(),
                    found: digits.len(),
                });
            }
            let mut idx = 0usize;
            for (d, dim_d) in digits.iter().zip(&target_dims) {
                if d >= dim_d {
                    return Err(Error::InvalidParameter(format!(
                        "ordering digit {d} out of range"
                    )));
                }
                idx = idx * dim_d + d;
            }
            if seen[idx] {
                return Err(Error::InvalidParameter(
                    "ordering repeats a basis label".into(),
                ));
            }
            seen[idx] = true;
        }
        Ok(GateMatrix {
            name: name.to_string(),
            dim,
            target_dims,
            ordering,
            entries,
        })
    }

    /// Row-major ordering |0..0>, |0..1>, ... for the given dims.
    pub fn row_major_ordering(target_dims: &[usize]) -> Vec<Vec<usize>> {
        let dim: usize = target_dims.iter().product();
        (0..dim)
            .map(|mut i| {
                let mut digits = vec![0usize; target_dims.len()];
                for (j, d) in target_dims.iter().enumerate().rev() {
                    digits[j] = i % d;
                    i /= d;
                }
                digits
            })
            .collect()
    }

    pub fn from_real(
        name: &str,
        target_dims: Vec<usize>,
        ordering: Vec<Vec<usize>>,
        entries: &[f64],
    ) -> Result<Self> {
        let centries = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        GateMatrix::new(name, target_dims, ordering, centries)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn target_dims(&self) -> &[usize] {
        &self.target_dims
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Basis labels in the matrix's own ordering, e.g. `|00>, |10>, ...`.
    pub fn ordering_labels(&self) -> Vec<String> {
        self.ordering
            .iter()
            .map(|digits| {
                let s: String = digits.iter().map(|d| d.to_string()).collect();
                format!("|{s}>")
            })
            .collect()
    }

    /// Apply to `targets` of `state`, identity on the rest.
    pub fn apply(&self, state: &PureState, targets: &[&str]) -> Result<PureState> {
        let reg = state.register();
        let positions: Vec<usize> = targets
            .iter()
            .map(|l| reg.position_of(l))
            .collect::<Result<_>>()?;
        let dims = reg.dims();
        for (k, &p) in positions.iter().enumerate() {
            if dims[p] != self.target_dims[k] {
                return Err(Error::DimensionMismatch {
                    expected: self.target_dims[k],
                    found: dims[p],
                });
            }
        }
        let product: usize = positions.iter().map(|&p| dims[p]).product();
        if product != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: product,
            });
        }

        let strides = reg.strides();
        // offset of each matrix basis position within a context
        let offsets: Vec<usize> = self
            .ordering
            .iter()
            .map(|digits| {
                digits
                    .iter()
                    .zip(&positions)
                    .map(|(d, &p)| d * strides[p])
                    .sum()
            })
            .collect();

        let env_pos: Vec<usize> = (0..reg.num_parties())
            .filter(|p| !positions.contains(p))
            .collect();
        let env_count: usize = env_pos.iter().map(|&p| dims[p]).product();

        let mut out = state.amps().to_vec();
        let mut scratch_in = vec![Complex64::ZERO; self.dim];
        for e in 0..env_count {
            let mut base = 0usize;
            let mut ee = e;
            for &p in env_pos.iter().rev() {
                base += (ee % dims[p]) * strides[p];
                ee /= dims[p];
            }
            for (p, &off) in offsets.iter().enumerate() {
                scratch_in[p] = state.amps()[base + off];
            }
            for (r, &off) in offsets.iter().enumerate() {
                let mut sum = Complex64::ZERO;
                for c in 0..self.dim {
                    sum += self.entry(r, c) * scratch_in[c];
                }
                out[base + off] = sum;
            }
        }
        PureState::new(reg.clone(), out, state.is_normalized_flag())
    }

    pub fn identity(dim: usize) -> GateMatrix {
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::ONE;
        }
        GateMatrix::new(
            "identity",
            vec![dim],
            (0..dim).map(|i| vec![i]).collect(),
            entries,
        )
        .expect("identity construction")
    }

    pub fn pauli_x() -> GateMatrix {
        GateMatrix::from_real(
            "sigma-x",
            vec![2],
            vec![vec![0], vec![1]],
            &[0.0, 1.0, 1.0, 0.0],
        )
        .expect("pauli construction")
    }

    /// i * sigma-y, the real representative used for message encoding.
    pub fn i_pauli_y() -> GateMatrix {
        GateMatrix::from_real(
            "i-sigma-y",
            vec![2],
            vec![vec![0], vec![1]],
            &[0.0, 1.0, -1.0, 0.0],
        )
        .expect("pauli construction")
    }

    pub fn pauli_y() -> GateMatrix {
        GateMatrix::new(
            "sigma-y",
            vec![2],
            vec![vec![0], vec![1]],
            vec![
                Complex64::ZERO,
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::ZERO,
            ],
        )
        .expect("pauli construction")
    }

    pub fn pauli_z() -> GateMatrix {
        GateMatrix::from_real(
            "sigma-z",
            vec![2],
            vec![vec![0], vec![1]],
            &[1.0, 0.0, 0.0, -1.0],
        )
        .expect("pauli construction")
    }

    pub fn hadamard() -> GateMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        GateMatrix::from_real("hadamard", vec![2], vec![vec![0], vec![1]], &[h, h, h, -h])
            .expect("hadamard construction")
    }

    /// CNOT with the first target as control, row-major ordering.
    pub fn cnot() -> GateMatrix {
        GateMatrix::from_real(
            "cnot",
            vec![2, 2],
            GateMatrix::row_major_ordering(&[2, 2]),
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        )
        .expect("cnot construction")
    }
}

/// Unitarity and realness diagnostics for one matrix.
#[derive(Debug, Clone)]
pub struct UnitarityReport {
    pub name: String,
    /// max |M M^dagger - I| over all entries
    pub max_deviation: f64,
    /// entries with a non-negligible imaginary part: (row, col, value)
    pub complex_entries: Vec<(usize, usize, Complex64)>,
    /// M M^dagger = I within `TOL_UNITARY`
    pub passes: bool,
}

impl UnitarityReport {
    /// No entry left the reals. The transcribed catalog matrices are written
    /// as real expressions, so a catalog matrix is healthy only when it is
    /// both unitary and real.
    pub fn all_real(&self) -> bool {
        self.complex_entries.is_empty()
    }

    pub fn passes_as_real_unitary(&self) -> bool {
        self.passes && self.all_real()
    }
}

/// Check M M^dagger = I to `TOL_UNITARY` and report complex-valued entries.
pub fn check_unitary(m: &GateMatrix) -> UnitarityReport {
    let d = m.dim();
    let mut max_dev = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let mut sum = Complex64::ZERO;
            for k in 0..d {
                sum += m.entry(i, k) * m.entry(j, k).conj();
            }
            let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
            max_dev = max_dev.max((sum - target).norm());
        }
    }
    let mut complex_entries = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let e = m.entry(i, j);
            if e.im.abs() > TOL_NORM {
                complex_entries.push((i, j, e));
            }
        }
    }
    let passes = max_dev <= TOL_UNITARY;
    UnitarityReport {
        name: m.name().to_string(),
        max_deviation: max_dev,
        complex_entries,
        passes,
    }
}
