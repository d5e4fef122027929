//! Constructors for the catalog of named tripartite/quadripartite states.
//!
//! Party conventions: three-party states use labels A, B, C with Charlie (C)
//! as the controller; four-party states use P, A, B, C with Paul (P) as the
//! second controller. The qutrit catalog state lives on three qutrits.

use crate::error::{Error, Result};
use crate::qcore::{GateMatrix, PureState, Register};

/// One entry of the state catalog, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// Variant 0 is (|001>+|110>)/sqrt(2); 1..=7 are its sign/permutation
    /// relatives obtained by local relabelings.
    GhzVariant(u8),
    /// L (|000> + l |111>) with L = 1/sqrt(1+l^2), l > 0.
    GhzType { l: f64 },
    /// (|000> + cos(delta) |110> + sin(delta) |111>)/sqrt(2).
    MaximalSlice { delta: f64 },
    /// (|0000> + |1111>)/sqrt(2) on P,A,B,C.
    Ghz4,
    /// (|100> + |010> + |001>)/sqrt(3).
    W3,
    /// (|1000> + |0100> + |0010> + |0001>)/2 on P,A,B,C.
    W4,
    /// (|phi>|0> + |00>|1>)/sqrt(2) with |phi> = (|10> + sqrt(n)|01>)/sqrt(n+1).
    Wn { n: u32 },
    /// (|000> + |111> + |222>)/sqrt(3) on three qutrits.
    QutritGhz,
}

impl StateSpec {
    pub fn cli_name(&self) -> String {
        match self {
            StateSpec::GhzVariant(0) => "ghz".into(),
            StateSpec::GhzVariant(k) => format!("g{k}"),
            StateSpec::GhzType { .. } => "ghz-type".into(),
            StateSpec::MaximalSlice { .. } => "ms".into(),
            StateSpec::Ghz4 => "ghz4".into(),
            StateSpec::W3 => "w3".into(),
            StateSpec::W4 => "w4".into(),
            StateSpec::Wn { .. } => "wn".into(),
            StateSpec::QutritGhz => "qutrit-ghz".into(),
        }
    }
}

/// The 8 catalog families with their parameter signatures, for `list-states`.
pub fn families() -> Vec<(&'static str, &'static str)> {
    vec![
        ("ghz, g1..g7", "no parameters; 8 sign/permutation variants"),
        ("ghz-type", "--l L (L > 0)"),
        ("ms", "--delta D (radians)"),
        ("ghz4", "no parameters"),
        ("w3", "no parameters"),
        ("w4", "no parameters"),
        ("wn", "--n N (N >= 1)"),
        ("qutrit-ghz", "no parameters"),
    ]
}

const SQRT1_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn ghz_variant_terms(k: u8) -> Result<[(usize, usize, usize, f64); 2]> {
    // (a-digit, b-digit, c-digit, sign) pairs, amplitude 1/sqrt(2) each
    let terms = match k {
        0 | 4 => [(0, 0, 1, 1.0), (1, 1, 0, 1.0)],
        1 => [(0, 1, 0, 1.0), (1, 0, 1, 1.0)],
        2 => [(0, 1, 0, 1.0), (1, 0, 1, -1.0)],
        3 => [(0, 0, 1, 1.0), (1, 1, 0, -1.0)],
        5 => [(1, 0, 0, 1.0), (0, 1, 1, -1.0)],
        6 => [(1, 0, 0, 1.0), (0, 1, 1, 1.0)],
        7 => [(0, 0, 0, 1.0), (1, 1, 1, -1.0)],
        _ => {
            return Err(Error::InvalidParameter(format!(
                "ghz variant {k} out of range 0..=7"
            )))
        }
    };
    Ok(terms)
}

/// Build the catalog state described by `spec`, normalized.
pub fn make(spec: &StateSpec) -> Result<PureState> {
    match spec {
        StateSpec::GhzVariant(k) => {
            let reg = Register::qubits(&["A", "B", "C"])?;
            let mut amps = vec![0.0; 8];
            for (a, b, c, sign) in ghz_variant_terms(*k)? {
                amps[reg.index_of(&[a, b, c])] = sign * SQRT1_2;
            }
            PureState::from_real(reg, &amps, true)
        }
        StateSpec::GhzType { l } => {
            if !(*l > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "ghz-type requires l > 0, got {l}"
                )));
            }
            let big_l = 1.0 / (1.0 + l * l).sqrt();
            let reg = Register::qubits(&["A", "B", "C"])?;
            let mut amps = vec![0.0; 8];
            amps[reg.index_of(&[0, 0, 0])] = big_l;
            amps[reg.index_of(&[1, 1, 1])] = big_l * l;
            PureState::from_real(reg, &amps, true)
        }
        StateSpec::MaximalSlice { delta } => {
            let reg = Register::qubits(&["A", "B", "C"])?;
            let mut amps = vec![0.0; 8];
            amps[reg.index_of(&[0, 0, 0])] = SQRT1_2;
            amps[reg.index_of(&[1, 1, 0])] = SQRT1_2 * delta.cos();
            amps[reg.index_of(&[1, 1, 1])] = SQRT1_2 * delta.sin();
            PureState::from_real(reg, &amps, true)
        }
        StateSpec::Ghz4 => {
            let reg = Register::qubits(&["P", "A", "B", "C"])?;
            let mut amps = vec![0.0; 16];
            amps[0] = SQRT1_2;
            amps[15] = SQRT1_2;
            PureState::from_real(reg, &amps, true)
        }
        StateSpec::W3 => {
            let reg = Register::qubits(&["A", "B", "C"])?;
            let w = 1.0 / 3f64.sqrt();
            let mut amps = vec![0.0; 8];
            amps[reg.index_of(&[1, 0, 0])] = w;
            amps[reg.index_of(&[0, 1, 0])] = w;
            amps[reg.index_of(&[0, 0, 1])] = w;
            PureState::from_real(reg, &amps, true)
        }
        StateSpec::W4 => {
            let reg = Register::qubits(&["P", "A", "B", "C"])?;
            let mut amps = vec![0.0; 16];
            for digits in [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]] {
                amps[reg.index_of(&digits)] = 0.5;
            }
            PureState::from_real(reg, &amps, true)
        }
        StateSpec::Wn { n } => {
            if *n < 1 {
                return Err(Error::InvalidParameter("wn requires n >= 1".into()));
            }
            let nf = *n as f64;
            let reg = Register::qubits(&["A", "B", "C"])?;
            let mut amps = vec![0.0; 8];
            let root = (nf + 1.0).sqrt();
            amps[reg.index_of(&[1, 0, 0])] = SQRT1_2 / root;
            amps[reg.index_of(&[0, 1, 0])] = SQRT1_2 * nf.sqrt() / root;
            amps[reg.index_of(&[0, 0, 1])] = SQRT1_2;
            PureState::from_real(reg, &amps, true)
        }
        StateSpec::QutritGhz => {
            let reg = Register::qutrits(&["A", "B", "C"])?;
            let w = 1.0 / 3f64.sqrt();
            let mut amps = vec![0.0; 27];
            for d in 0..3 {
                amps[reg.index_of(&[d, d, d])] = w;
            }
            PureState::from_real(reg, &amps, true)
        }
    }
}

/// The two-qubit conversion unitary taking |00> -> |phi>, |01> -> |11>,
/// |10> -> |phi-perp>, |11> -> |00>, with
/// |phi-perp> = (sqrt(n)|10> - |01>)/sqrt(n+1). Phases are fixed to keep every
/// entry real. Row-major ordering |00>,|01>,|10>,|11> on (A, B).
pub fn u_ab(n: u32) -> Result<GateMatrix> {
    if n < 1 {
        return Err(Error::InvalidParameter("u_ab requires n >= 1".into()));
    }
    let nf = n as f64;
    let root = (nf + 1.0).sqrt();
    let (p10, p01) = (1.0 / root, nf.sqrt() / root); // |phi> components
    let (q10, q01) = (nf.sqrt() / root, -1.0 / root); // |phi-perp> components
    // columns are the images of |00>, |01>, |10>, |11>
    let entries = [
        0.0, 0.0, 0.0, 1.0, //
        p01, 0.0, q01, 0.0, //
        p10, 0.0, q10, 0.0, //
        0.0, 1.0, 0.0, 0.0,
    ];
    GateMatrix::from_real(
        "u-ab",
        vec![2, 2],
        GateMatrix::row_major_ordering(&[2, 2]),
        &entries,
    )
}

/// Produce |W_n> by conjugating (|000>+|111>)/sqrt(2) with the conversion
/// unitary on (A, B).
pub fn wn_from_ghz(n: u32) -> Result<PureState> {
    let reg = Register::qubits(&["A", "B", "C"])?;
    let mut amps = vec![0.0; 8];
    amps[reg.index_of(&[0, 0, 0])] = SQRT1_2;
    amps[reg.index_of(&[1, 1, 1])] = SQRT1_2;
    let ghz = PureState::from_real(reg, &amps, true)?;
    u_ab(n)?.apply(&ghz, &["A", "B"])
}

/// |phi> and |phi-perp> as single-pair states, for orthogonality checks.
pub fn wn_pair_states(n: u32) -> Result<(PureState, PureState)> {
    let nf = n as f64;
    let root = (nf + 1.0).sqrt();
    let reg = Register::qubits(&["A", "B"])?;
    let phi = PureState::from_real(
        reg.clone(),
        &[0.0, nf.sqrt() / root, 1.0 / root, 0.0],
        true,
    )?;
    let perp = PureState::from_real(reg, &[0.0, -1.0 / root, nf.sqrt() / root, 0.0], true)?;
    Ok((phi, perp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{check_unitary, TOL_NORM, TOL_PROTOCOL};

    #[test]
    fn ghz_variant_zero_matches_amplitude_placement() {
        let s = make(&StateSpec::GhzVariant(0)).unwrap();
        assert!((s.amp(&[0, 0, 1]).re - SQRT1_2).abs() < TOL_NORM);
        assert!((s.amp(&[1, 1, 0]).re - SQRT1_2).abs() < TOL_NORM);
        assert!(s.amp(&[0, 0, 0]).norm() < TOL_NORM);
    }

    #[test]
    fn ghz_type_at_l_one_is_balanced() {
        let s = make(&StateSpec::GhzType { l: 1.0 }).unwrap();
        assert!((s.amp(&[0, 0, 0]).re - SQRT1_2).abs() < TOL_NORM);
        assert!((s.amp(&[1, 1, 1]).re - SQRT1_2).abs() < TOL_NORM);
    }

    #[test]
    fn ghz_type_rejects_nonpositive_l() {
        assert!(make(&StateSpec::GhzType { l: 0.0 }).is_err());
        assert!(make(&StateSpec::GhzType { l: -0.3 }).is_err());
    }

    #[test]
    fn w3_places_equal_single_excitation_amplitudes() {
        let s = make(&StateSpec::W3).unwrap();
        let w = 1.0 / 3f64.sqrt();
        for digits in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            assert!((s.amp(&digits).re - w).abs() < TOL_NORM);
        }
    }

    #[test]
    fn wn_rejects_n_zero() {
        assert!(make(&StateSpec::Wn { n: 0 }).is_err());
    }

    #[test]
    fn catalog_states_are_normalized() {
        let specs = vec![
            StateSpec::GhzVariant(0),
            StateSpec::GhzVariant(3),
            StateSpec::GhzVariant(7),
            StateSpec::GhzType { l: 0.5 },
            StateSpec::MaximalSlice {
                delta: std::f64::consts::FRAC_PI_3,
            },
            StateSpec::Ghz4,
            StateSpec::W3,
            StateSpec::W4,
            StateSpec::Wn { n: 3 },
            StateSpec::QutritGhz,
        ];
        for spec in specs {
            let s = make(&spec).unwrap();
            assert!(
                (s.norm_sqr() - 1.0).abs() < TOL_NORM,
                "{spec:?} not normalized"
            );
        }
    }

    #[test]
    fn every_variant_is_a_pauli_relabeling_of_variant_zero() {
        let base = make(&StateSpec::GhzVariant(0)).unwrap();
        let paulis = [
            GateMatrix::identity(2),
            GateMatrix::pauli_x(),
            GateMatrix::pauli_y(),
            GateMatrix::pauli_z(),
        ];
        for k in 1..=7u8 {
            let target = make(&StateSpec::GhzVariant(k)).unwrap();
            let mut found = false;
            'search: for pa in &paulis {
                for pb in &paulis {
                    for pc in &paulis {
                        let img = pc
                            .apply(
                                &pb.apply(&pa.apply(&base, &["A"]).unwrap(), &["B"]).unwrap(),
                                &["C"],
                            )
                            .unwrap();
                        if target.fidelity(&img).unwrap() > 1.0 - TOL_PROTOCOL {
                            found = true;
                            break 'search;
                        }
                    }
                }
            }
            assert!(found, "G{k} not reachable by a Pauli triple");
        }
    }

    #[test]
    fn qutrit_ghz_reduced_states_are_maximally_mixed() {
        let s = make(&StateSpec::QutritGhz).unwrap();
        for party in ["A", "B", "C"] {
            let rho = s.density_and_partial_trace(&[party]).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if i == j { 1.0 / 3.0 } else { 0.0 };
                    assert!((rho.entry(i, j).re - expect).abs() < TOL_NORM);
                    assert!(rho.entry(i, j).im.abs() < TOL_NORM);
                }
            }
        }
    }

    #[test]
    fn u_ab_is_unitary_and_pair_is_orthogonal() {
        for n in [1, 2, 5] {
            assert!(check_unitary(&u_ab(n).unwrap()).passes);
            let (phi, perp) = wn_pair_states(n).unwrap();
            assert!(phi.inner(&perp).unwrap().norm() < TOL_NORM);
        }
    }

    #[test]
    fn wn_conversion_reproduces_catalog_state() {
        for n in [1, 2, 4] {
            let converted = wn_from_ghz(n).unwrap();
            let direct = make(&StateSpec::Wn { n }).unwrap();
            assert!(converted.fidelity(&direct).unwrap() > 1.0 - 1e-10);
        }
    }
}
