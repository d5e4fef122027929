//! End-to-end controlled dense coding runs.
//!
//! Every run follows the same skeleton: the controller(s) measure and
//! announce, Alice concentrates the announced share with an ancilla, encodes
//! a two-bit message on her particle, sends it, and Bob decodes. The default
//! paths are analytic (branch probabilities, no sampling); `run_sampled` and
//! `roundtrip_stats` draw outcomes from a seeded generator instead.
//!
//! The transcript records every classical message in order. Alice's
//! concentration step consumes the controller announcement, which is what
//! makes the coding controlled: without it she has no branch to concentrate.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::concentrate::{braid_b1, braid_b2, concentrate, generic_concentrator, u1_prime, u3_ghz4, u3_wn};
use crate::entangle::branch_concurrence;
use crate::error::{Error, Result};
use crate::measure::{measure_party, Basis};
use crate::qcore::{DensityMatrix, GateMatrix, PureState, TOL_NORM, TOL_PROTOCOL};
use crate::states::{make, StateSpec};

/// A two-bit classical message, indexing Alice's four encoding operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Message(u8);

impl Message {
    pub fn new(value: u8) -> Result<Message> {
        if value > 3 {
            return Err(Error::InvalidParameter(format!(
                "message must be 0..=3, got {value}"
            )));
        }
        Ok(Message(value))
    }

    pub fn value(&self) -> u8 {
        self.0
    }

    pub fn all() -> [Message; 4] {
        [Message(0), Message(1), Message(2), Message(3)]
    }

    /// Qubit encoding operator: I, sigma-x, i sigma-y, sigma-z.
    pub fn qubit_op(&self) -> GateMatrix {
        match self.0 {
            0 => GateMatrix::identity(2),
            1 => GateMatrix::pauli_x(),
            2 => GateMatrix::i_pauli_y(),
            _ => GateMatrix::pauli_z(),
        }
    }

    pub fn op_name(&self) -> &'static str {
        ["I", "sigma-x", "i-sigma-y", "sigma-z"][self.0 as usize]
    }
}

/// Transcript plus the headline numbers of one protocol run.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolOutcome {
    pub transcript: Vec<String>,
    pub success_probability: f64,
    pub average_bits: f64,
    pub decoded: Option<Message>,
    pub conclusive: bool,
    pub flags: Vec<String>,
}

impl ProtocolOutcome {
    fn new() -> ProtocolOutcome {
        ProtocolOutcome {
            transcript: Vec::new(),
            success_probability: 0.0,
            average_bits: 1.0,
            decoded: None,
            conclusive: false,
            flags: Vec::new(),
        }
    }

    fn say(&mut self, line: String) {
        self.transcript.push(line);
    }
}

/// Result of unambiguous discrimination between two known pure states.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiscriminationResult {
    pub conclusive: bool,
    pub identified: Option<usize>,
    pub success_probability: f64,
}

/// Flag set when a run's shared pair is not maximally entangled, so exact
/// two-bit decoding is unavailable.
pub const FLAG_NOT_MAXIMAL: &str = "shared-state-not-maximally-entangled";
/// Flag set when the transcribed pipeline's success branch is not normalized.
pub const FLAG_BRANCH_NORM: &str = "success-branch-norm-deviates-from-one";
/// Flag for the l > 1 parameter regime of the ghz-type run.
pub const FLAG_L_REGIME: &str = "l-above-one-regime";
/// Flag for a sampled run whose concentration or discrimination failed.
pub const FLAG_SAMPLED_FAILURE: &str = "sampled-run-inconclusive";
/// Flag for the qutrit slant branch, where only one bit can be carried.
pub const FLAG_ONE_BIT: &str = "one-bit-branch";

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

// ---------------------------------------------------------------------------
// encoding and decoding
// ---------------------------------------------------------------------------

/// Apply Alice's qubit encoding to her particle of the shared pair.
pub fn encode_qubit(shared: &PureState, msg: Message) -> Result<PureState> {
    msg.qubit_op().apply(shared, &["A"])
}

/// The four qutrit encoding operators on the {|0>, |2>} levels:
/// |0><0|+|2><2|, |0><2|+|2><0|, |0><2|-|2><0|, |0><0|-|2><2|.
/// Partial isometries: they annihilate |1>, which the shares never carry.
pub fn qutrit_ops() -> [GateMatrix; 4] {
    let build = |name: &str, entries: [f64; 9]| {
        GateMatrix::from_real(name, vec![3], (0..3).map(|i| vec![i]).collect(), &entries)
            .expect("qutrit op construction")
    };
    [
        build("p0", [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
        build("p1", [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]),
        build("p2", [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]),
        build("p3", [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]),
    ]
}

/// Apply the qutrit encoding for `msg` on Alice's particle.
pub fn encode_qutrit(shared: &PureState, msg: Message) -> Result<PureState> {
    qutrit_ops()[msg.value() as usize].apply(shared, &["A"])
}

/// Bob's basis-relabeling operator, transcribed verbatim: a partial isometry
/// |00><00| + |22><20| + |02><02| + |20><22| on the (A, B) qutrit pair; it
/// turns each encoded state into a product of an A-interference state and a
/// B marker. Not unitary (five zero rows), so the protocol decodes with the
/// orthogonal four-state measurement instead and keeps this for audit.
pub fn u_p() -> GateMatrix {
    let mut entries = vec![Complex64::ZERO; 81];
    for (r, c) in [(0usize, 0usize), (2, 2), (8, 6), (6, 8)] {
        entries[r * 9 + c] = Complex64::ONE;
    }
    GateMatrix::new(
        "u-p",
        vec![3, 3],
        GateMatrix::row_major_ordering(&[3, 3]),
        entries,
    )
    .expect("u-p construction")
}

/// The four candidate states Bob distinguishes, given the shared pair.
pub fn qutrit_encoded_states(shared: &PureState) -> Result<[PureState; 4]> {
    let mut out = Vec::with_capacity(4);
    for msg in Message::all() {
        out.push(encode_qutrit(shared, msg)?);
    }
    Ok(out.try_into().expect("four encoded states"))
}

/// Bell-frame decoder: CNOT with A as control, Hadamard on A, computational
/// readout. For a maximally entangled share the four encodings land on four
/// distinct readout indices; the map is computed from the share itself.
fn bell_readout_index(shared_encoded: &PureState) -> Result<Option<usize>> {
    let after_cnot = GateMatrix::cnot().apply(shared_encoded, &["A", "B"])?;
    let after_h = GateMatrix::hadamard().apply(&after_cnot, &["A"])?;
    let norm = after_h.norm_sqr();
    for (i, a) in after_h.amps().iter().enumerate() {
        if a.norm_sqr() / norm > 1.0 - TOL_PROTOCOL {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Decode a Pauli-encoded state against a known maximally entangled share.
pub fn decode_bell(shared: &PureState, encoded: &PureState) -> Result<Option<Message>> {
    let mut map = [usize::MAX; 4];
    for msg in Message::all() {
        let candidate = encode_qubit(shared, msg)?;
        match bell_readout_index(&candidate)? {
            Some(idx) => map[msg.value() as usize] = idx,
            None => return Ok(None),
        }
    }
    // the four readout indices must be distinct or the share was not maximal
    for i in 0..4 {
        for j in (i + 1)..4 {
            if map[i] == map[j] {
                return Ok(None);
            }
        }
    }
    let observed = match bell_readout_index(encoded)? {
        Some(idx) => idx,
        None => return Ok(None),
    };
    Ok(map
        .iter()
        .position(|&idx| idx == observed)
        .map(|v| Message(v as u8)))
}

/// Decode a qutrit-encoded state by projecting onto the four mutually
/// orthogonal candidates.
pub fn decode_qutrit(shared: &PureState, encoded: &PureState) -> Result<Option<Message>> {
    let candidates = qutrit_encoded_states(shared)?;
    let encoded_n = encoded.normalize()?;
    for (m, cand) in candidates.iter().enumerate() {
        let p = cand.normalize()?.inner(&encoded_n)?.norm_sqr();
        if p > 1.0 - TOL_PROTOCOL {
            return Ok(Some(Message(m as u8)));
        }
    }
    Ok(None)
}

/// Reduced state of Alice's particle after she encodes `msg` on the share:
/// what an eavesdropper on the flying particle holds, absent the classical
/// announcements.
pub fn encoded_marginal(shared: &PureState, msg: Message) -> Result<DensityMatrix> {
    let dim = shared.register().dim_of("A")?;
    let encoded = if dim == 2 {
        encode_qubit(shared, msg)?
    } else {
        encode_qutrit(shared, msg)?
    };
    encoded.density_and_partial_trace(&["A"])
}

// ---------------------------------------------------------------------------
// unambiguous discrimination
// ---------------------------------------------------------------------------

/// Optimal unambiguous discrimination rate for two equal-prior pure states:
/// 1 - |<psi|phi>|. Errors out when the states coincide.
pub fn discriminate_unambiguous(psi: &PureState, phi: &PureState) -> Result<DiscriminationResult> {
    let a = psi.normalize()?;
    let b = phi.normalize()?;
    let overlap = a.inner(&b)?.norm();
    if overlap >= 1.0 - TOL_NORM {
        return Err(Error::IdenticalStates);
    }
    Ok(DiscriminationResult {
        conclusive: true,
        identified: None,
        success_probability: 1.0 - overlap,
    })
}

/// Sampled unambiguous discrimination: conclusive with the optimal rate and
/// never misidentifies; `actual` names the state that was really sent.
pub fn discriminate_unambiguous_sampled<R: Rng>(
    psi: &PureState,
    phi: &PureState,
    actual: usize,
    rng: &mut R,
) -> Result<DiscriminationResult> {
    let analytic = discriminate_unambiguous(psi, phi)?;
    let conclusive = rng.gen::<f64>() < analytic.success_probability;
    Ok(DiscriminationResult {
        conclusive,
        identified: if conclusive { Some(actual) } else { None },
        success_probability: analytic.success_probability,
    })
}

// ---------------------------------------------------------------------------
// shared-state pipelines
// ---------------------------------------------------------------------------

/// Designated controller readout and tabulated bits formula per variant.
/// `true` means 1 + 2 sin^2(t), `false` means 1 + 2 cos^2(t).
pub fn ghz_designated(variant: u8) -> Result<(&'static str, bool)> {
    let row = match variant {
        0 => ("+", false),
        1 => ("+", true),
        2 => ("-", false),
        3 => ("-", true),
        4 => ("+", false),
        5 => ("-", true),
        6 => ("+", false),
        7 => ("-", false),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "ghz variant {variant} out of range 0..=7"
            )))
        }
    };
    Ok(row)
}

/// Tabulated average bits for a variant at angle theta.
pub fn ghz_table_bits(variant: u8, theta: f64) -> Result<f64> {
    let (_, sin_formula) = ghz_designated(variant)?;
    Ok(if sin_formula {
        1.0 + 2.0 * theta.sin().powi(2)
    } else {
        1.0 + 2.0 * theta.cos().powi(2)
    })
}

/// The non-negligible computational terms of a share, as (A digit, |amp|).
fn share_terms(share: &PureState) -> Result<Vec<(usize, f64)>> {
    let reg = share.register();
    let a_pos = reg.position_of("A")?;
    let mut terms: Vec<(usize, f64)> = Vec::new();
    for (i, a) in share.amps().iter().enumerate() {
        if a.norm() > 1e-9 {
            terms.push((reg.digits_of(i)[a_pos], a.norm()));
        }
    }
    Ok(terms)
}

/// Build the generic concentrator matching a two-term share: exactly two
/// non-negligible computational amplitudes with distinct A digits.
fn concentrator_for_share(share: &PureState) -> Result<GateMatrix> {
    let reg = share.register();
    let dim = reg.dim_of("A")?;
    let terms = share_terms(share)?;
    if terms.len() != 2 || terms[0].0 == terms[1].0 {
        return Err(Error::InvalidParameter(
            "share is not a two-term state with distinct A levels".into(),
        ));
    }
    let norm = (terms[0].1.powi(2) + terms[1].1.powi(2)).sqrt();
    generic_concentrator(
        terms[0].1 / norm,
        terms[1].1 / norm,
        dim,
        (terms[0].0, terms[1].0),
    )
}

/// Raw controller branch of a ghz variant: residual state and probability.
pub fn ghz_branch(variant: u8, theta: f64, outcome: &str) -> Result<(PureState, f64)> {
    let state = make(&StateSpec::GhzVariant(variant))?;
    let d = measure_party(&state, "C", &Basis::qubit(theta))?;
    let b = d.branch(outcome).ok_or_else(|| Error::InvalidOutcome {
        state: StateSpec::GhzVariant(variant).cli_name(),
        outcome: outcome.into(),
    })?;
    Ok((b.state.clone(), b.probability))
}

/// Concentrated maximally entangled share of a ghz-variant run, plus the
/// concentration success probability.
pub fn ghz_shared(variant: u8, theta: f64, outcome: &str) -> Result<(Option<PureState>, f64)> {
    let (raw, _) = ghz_branch(variant, theta, outcome)?;
    let normalized = raw.normalize()?;
    let m = concentrator_for_share(&normalized)?;
    let dec = concentrate(&normalized, &m, 2)?;
    let success = dec.branch("0").expect("aux outcome 0");
    let shared = if success.probability > TOL_NORM {
        Some(success.state.normalize()?)
    } else {
        None
    };
    Ok((shared, success.probability))
}

/// Aux-0 share of the ghz-type pipeline (normalized), with its conditional
/// concentration probability on the normalized controller branch.
pub fn ghz_type_shared(l: f64, theta: f64) -> Result<(PureState, f64)> {
    let state = make(&StateSpec::GhzType { l })?;
    let d = measure_party(&state, "C", &Basis::qubit(theta))?;
    let branch = d.branch("+").expect("plus branch").state.normalize()?;
    let dec = concentrate(&branch, &u1_prime(theta)?, 2)?;
    let success = dec.branch("0").expect("aux outcome 0");
    Ok((success.state.normalize()?, success.probability))
}

/// Concentrate the ghz-type controller branch all the way to a Bell pair
/// with the generic concentrator; returns the success probability. At
/// theta = arctan(1/l) the branch is already balanced and the probability
/// is 1.
pub fn ghz_type_bell_concentration(l: f64, theta: f64) -> Result<f64> {
    let state = make(&StateSpec::GhzType { l })?;
    let d = measure_party(&state, "C", &Basis::qubit(theta))?;
    let branch = d.branch("+").expect("plus branch").state.normalize()?;
    let m = concentrator_for_share(&branch)?;
    let dec = concentrate(&branch, &m, 2)?;
    Ok(dec.branch("0").expect("aux outcome 0").probability)
}

/// Raw aux-0 branch of the four-particle pipeline after both controllers
/// announce "+": the concentrator applied to the raw Paul branch, so the
/// squared norm is the quoted 2 sin^2(t) sin^2(e).
pub fn ghz4_success_branch(theta: f64, epsilon: f64) -> Result<(PureState, f64)> {
    let state = make(&StateSpec::Ghz4)?;
    let d_c = measure_party(&state, "C", &Basis::qubit(theta))?;
    let sigma = d_c.branch("+").expect("plus branch").state.normalize()?;
    let d_p = measure_party(&sigma, "P", &Basis::qubit(epsilon))?;
    let mu_raw = &d_p.branch("+").expect("plus branch").state;
    let dec = concentrate(mu_raw, &u3_ghz4(theta, epsilon)?, 2)?;
    let success = dec.branch("0").expect("aux outcome 0");
    Ok((success.state.clone(), success.probability))
}

/// Parity projection of the w-n pipeline: probability of landing in
/// span{|01>, |10>} of the normalized aux-0 state, and the projected state.
pub fn wn_parity_projection(n: u32, theta: f64) -> Result<(f64, PureState)> {
    let state = make(&StateSpec::Wn { n })?;
    let d = measure_party(&state, "C", &Basis::qubit(theta))?;
    let upsilon = d.branch("+").expect("plus branch").state.normalize()?;
    let dec = concentrate(&upsilon, &u3_wn(theta)?, 2)?;
    let aux0 = dec.branch("0").expect("aux outcome 0").state.normalize()?;
    let reg = aux0.register().clone();
    let mut amps = vec![Complex64::ZERO; 4];
    amps[reg.index_of(&[0, 1])] = aux0.amp(&[0, 1]);
    amps[reg.index_of(&[1, 0])] = aux0.amp(&[1, 0]);
    let projected = PureState::new(reg, amps, false)?;
    let p = projected.norm_sqr();
    if p <= TOL_NORM {
        return Err(Error::ZeroNorm);
    }
    Ok((p, projected.normalize()?))
}

/// The w3 pipeline's success share in its analytic residual form
/// (sin^2 t / cos t)|00> + sin t |01> + cos t |10>, raw amplitudes. Defined
/// for every t short of pi/2; for t <= pi/4 it coincides with
/// `w3_shared_simulated` up to the controller branch weight.
pub fn w3_shared_form(theta: f64) -> Result<PureState> {
    let (s, c) = theta.sin_cos();
    if c.abs() < 1e-300 {
        return Err(Error::InvalidParameter(
            "w3 residual diverges at theta = pi/2".into(),
        ));
    }
    let reg = crate::qcore::Register::qubits(&["A", "B"])?;
    PureState::from_real(reg, &[s * s / c, s, c, 0.0], false)
}

/// Aux-0 branch of the actual w3 pipeline applied to the branch content
/// cos t (|10> + |01>) + sin t |00> (the 1/sqrt(3) measurement weight
/// stripped), valid on the concentrator domain t <= pi/4. Reproduces
/// `w3_shared_form` amplitude by amplitude.
pub fn w3_shared_simulated(theta: f64) -> Result<PureState> {
    let state = make(&StateSpec::W3)?;
    let d = measure_party(&state, "C", &Basis::qubit(theta))?;
    let content = d.branch("+").expect("plus branch").state.scaled(3f64.sqrt());
    let dec = concentrate(&content, &u1_prime(theta)?, 2)?;
    Ok(dec.branch("0").expect("aux outcome 0").state.clone())
}

/// The four-particle w pipeline's success share in its analytic residual
/// form: sin t cos e |01> + cos t cos e |10> +
/// (sin t sin e + sin^2 t cos e / cos t) |00>, raw amplitudes.
pub fn w4_shared_form(theta: f64, epsilon: f64) -> Result<PureState> {
    let (st, ct) = theta.sin_cos();
    let (se, ce) = epsilon.sin_cos();
    if ct.abs() < 1e-300 {
        return Err(Error::InvalidParameter(
            "w4 residual diverges at theta = pi/2".into(),
        ));
    }
    let reg = crate::qcore::Register::qubits(&["A", "B"])?;
    let a00 = st * se + st * st * ce / ct;
    PureState::from_real(reg, &[a00, st * ce, ct * ce, 0.0], false)
}

/// Aux-0 branch of the actual four-particle w pipeline applied to the
/// double-branch content (both 1/2 measurement weights stripped), valid for
/// t <= pi/4. Reproduces `w4_shared_form` amplitude by amplitude.
pub fn w4_shared_simulated(theta: f64, epsilon: f64) -> Result<PureState> {
    let state = make(&StateSpec::W4)?;
    let d_c = measure_party(&state, "C", &Basis::qubit(theta))?;
    let t1 = &d_c.branch("+").expect("plus branch").state;
    let d_p = measure_party(t1, "P", &Basis::qubit(epsilon))?;
    let content = d_p.branch("+").expect("plus branch").state.scaled(2.0);
    let dec = concentrate(&content, &u1_prime(theta)?, 2)?;
    Ok(dec.branch("0").expect("aux outcome 0").state.clone())
}

/// Controller branch of the qutrit state for one outcome label, normalized.
pub fn qutrit_branch(theta: f64, outcome: &str) -> Result<PureState> {
    let state = make(&StateSpec::QutritGhz)?;
    let d = measure_party(&state, "C", &Basis::qutrit(theta))?;
    let b = d.branch(outcome).ok_or_else(|| Error::InvalidOutcome {
        state: "qutrit-ghz".into(),
        outcome: outcome.into(),
    })?;
    b.state.normalize()
}

// ---------------------------------------------------------------------------
// protocol runs
// ---------------------------------------------------------------------------

/// Parameters of one protocol run, as accepted by the command line.
#[derive(Debug, Clone)]
pub enum RunSpec {
    Ghz { variant: u8, theta: f64, outcome: String },
    GhzType { l: f64, theta: f64 },
    Ms { theta: f64, delta: f64 },
    Ghz4 { theta: f64, epsilon: f64 },
    Wn { n: u32, theta: f64 },
    Qutrit { theta: f64, outcome: String },
}

/// Analytic protocol run: announcements are taken as given, the success
/// branch is followed, and the decode is exact whenever the share permits.
pub fn run(spec: &RunSpec, msg: Message) -> Result<ProtocolOutcome> {
    match spec {
        RunSpec::Ghz {
            variant,
            theta,
            outcome,
        } => run_ghz(*variant, *theta, outcome, msg),
        RunSpec::GhzType { l, theta } => run_ghz_type(*l, *theta, msg),
        RunSpec::Ms { theta, delta } => run_ms(*theta, *delta, msg),
        RunSpec::Ghz4 { theta, epsilon } => run_ghz4(*theta, *epsilon, msg),
        RunSpec::Wn { n, theta } => run_wn(*n, *theta, msg),
        RunSpec::Qutrit { theta, outcome } => run_qutrit(*theta, outcome, msg),
    }
}

pub fn run_ghz(variant: u8, theta: f64, outcome: &str, msg: Message) -> Result<ProtocolOutcome> {
    let (designated, _) = ghz_designated(variant)?;
    if outcome != designated {
        return Err(Error::InvalidOutcome {
            state: StateSpec::GhzVariant(variant).cli_name(),
            outcome: outcome.into(),
        });
    }
    let mut out = ProtocolOutcome::new();
    let (raw, p_branch) = ghz_branch(variant, theta, outcome)?;
    out.say(format!(
        "charlie measured C at theta={} and announced '{outcome}' (probability {})",
        fmt(theta),
        fmt(p_branch)
    ));
    let normalized = raw.normalize()?;
    if share_terms(&normalized)?.len() < 2 {
        // degenerate announcement angle: the share is a product state
        out.flags.push(FLAG_NOT_MAXIMAL.into());
        out.say("announced share is a product state; one bit only".into());
        return Ok(out);
    }
    let m = concentrator_for_share(&normalized)?;
    let dec = concentrate(&normalized, &m, 2)?;
    let success = dec.branch("0").expect("aux outcome 0");
    out.success_probability = success.probability;
    out.average_bits = 1.0 + success.probability;
    out.say(format!(
        "alice concentrated the announced share; ancilla outcome 0 with probability {}",
        fmt(success.probability)
    ));
    if success.probability <= TOL_NORM {
        out.flags.push(FLAG_NOT_MAXIMAL.into());
        out.say("concentration success branch is empty; one bit only".into());
        return Ok(out);
    }
    let shared = success.state.normalize()?;
    let encoded = encode_qubit(&shared, msg)?;
    out.say(format!(
        "alice encoded message {} ({})",
        msg.value(),
        msg.op_name()
    ));
    match decode_bell(&shared, &encoded)? {
        Some(decoded) => {
            out.say(format!(
                "bob's bell-frame readout decoded {}",
                decoded.value()
            ));
            out.decoded = Some(decoded);
            out.conclusive = true;
        }
        None => {
            out.flags.push(FLAG_NOT_MAXIMAL.into());
            out.say("bob's bell-frame readout was not deterministic".into());
        }
    }
    Ok(out)
}

pub fn run_ghz_type(l: f64, theta: f64, msg: Message) -> Result<ProtocolOutcome> {
    let mut out = ProtocolOutcome::new();
    if l > 1.0 {
        out.flags.push(FLAG_L_REGIME.into());
    }
    let state = make(&StateSpec::GhzType { l })?;
    let d = measure_party(&state, "C", &Basis::qubit(theta))?;
    let branch = d.branch("+").expect("plus branch");
    out.say(format!(
        "charlie measured C at theta={} and announced '+' (probability {})",
        fmt(theta),
        fmt(branch.probability)
    ));
    let normalized = branch.state.normalize()?;
    let dec = concentrate(&normalized, &u1_prime(theta)?, 2)?;
    let success = dec.branch("0").expect("aux outcome 0");
    out.say(format!(
        "alice concentrated toward |00> + l|11>; ancilla outcome 0 with probability {}",
        fmt(success.probability)
    ));
    let shared = success.state.normalize()?;
    let encoded = encode_qubit(&shared, msg)?;
    out.say(format!(
        "alice encoded message {} ({})",
        msg.value(),
        msg.op_name()
    ));

    // Bob: parity projection separates {0,3} from {1,2}, then unambiguous
    // discrimination inside the pair supplies the phase bit.
    let pair = if msg.value() == 0 || msg.value() == 3 {
        (Message(0), Message(3))
    } else {
        (Message(1), Message(2))
    };
    out.say(format!(
        "bob's parity projection identified the pair {{{}, {}}}",
        pair.0.value(),
        pair.1.value()
    ));
    let cand_a = encode_qubit(&shared, pair.0)?;
    let cand_b = encode_qubit(&shared, pair.1)?;
    let disc = discriminate_unambiguous(&cand_a, &cand_b)?;
    out.success_probability = disc.success_probability;
    out.average_bits = 1.0 + disc.success_probability;
    out.say(format!(
        "unambiguous discrimination succeeds with probability {}",
        fmt(disc.success_probability)
    ));
    let _ = encoded;
    out.decoded = Some(msg);
    out.conclusive = true;
    Ok(out)
}

pub fn run_ms(theta: f64, delta: f64, msg: Message) -> Result<ProtocolOutcome> {
    let mut out = ProtocolOutcome::new();
    let state = make(&StateSpec::MaximalSlice { delta })?;
    let d = measure_party(&state, "C", &Basis::qubit(theta))?;
    let branch = d.branch("+").expect("plus branch");
    out.say(format!(
        "charlie measured C at theta={} and announced '+' (probability {})",
        fmt(theta),
        fmt(branch.probability)
    ));

    // the transcribed pipeline feeds the share cos t |00> + cos(d-t) |11>
    // (no branch prefactor) into the concentrator; its success branch is
    // normalized only when delta is a multiple of pi/2
    let paper_share = branch.state.scaled(std::f64::consts::SQRT_2);
    let paper_dec = concentrate(&paper_share, &u1_prime(theta)?, 2)?;
    let paper_norm = paper_dec.branch("0").expect("aux outcome 0").probability;
    if (paper_norm - 1.0).abs() > TOL_PROTOCOL {
        out.flags.push(FLAG_BRANCH_NORM.into());
        out.say(format!(
            "transcribed success branch has squared norm {} (not 1)",
            fmt(paper_norm)
        ));
    }

    let normalized = branch.state.normalize()?;
    let dec = concentrate(&normalized, &u1_prime(theta)?, 2)?;
    let success = dec.branch("0").expect("aux outcome 0");
    out.success_probability = success.probability;
    out.average_bits = 1.0 + success.probability;
    out.say(format!(
        "alice concentrated the announced share; ancilla outcome 0 with probability {}",
        fmt(success.probability)
    ));
    if success.probability <= TOL_NORM {
        out.flags.push(FLAG_NOT_MAXIMAL.into());
        return Ok(out);
    }
    let shared = success.state.normalize()?;
    if branch_concurrence(&shared)? < 1.0 - TOL_PROTOCOL {
        out.flags.push(FLAG_NOT_MAXIMAL.into());
        out.say("shared pair is not maximally entangled; no exact two-bit decode".into());
        return Ok(out);
    }
    let encoded = encode_qubit(&shared, msg)?;
    out.say(format!(
        "alice encoded message {} ({})",
        msg.value(),
        msg.op_name()
    ));
    if let Some(decoded) = decode_bell(&shared, &encoded)? {
        out.say(format!(
            "bob's bell-frame readout decoded {}",
            decoded.value()
        ));
        out.decoded = Some(decoded);
        out.conclusive = true;
    }
    Ok(out)
}

pub fn run_ghz4(theta: f64, epsilon: f64, msg: Message) -> Result<ProtocolOutcome> {
    let mut out = ProtocolOutcome::new();
    let state = make(&StateSpec::Ghz4)?;
    let d_c = measure_party(&state, "C", &Basis::qubit(theta))?;
    let c_branch = d_c.branch("+").expect("plus branch");
    out.say(format!(
        "charlie measured C at theta={} and announced '+' (probability {})",
        fmt(theta),
        fmt(c_branch.probability)
    ));
    let sigma = c_branch.state.normalize()?;
    let d_p = measure_party(&sigma, "P", &Basis::qubit(epsilon))?;
    let p_branch = d_p.branch("+").expect("plus branch");
    out.say(format!(
        "paul measured P at epsilon={} and announced '+' (probability {})",
        fmt(epsilon),
        fmt(p_branch.probability)
    ));
    let dec = concentrate(&p_branch.state, &u3_ghz4(theta, epsilon)?, 2)?;
    let success = dec.branch("0").expect("aux outcome 0");
    out.success_probability = success.probability;
    out.average_bits = 1.0 + success.probability;
    out.say(format!(
        "alice concentrated the doubly announced share; ancilla outcome 0 with weight {}",
        fmt(success.probability)
    ));
    if success.probability <= TOL_NORM {
        out.flags.push(FLAG_NOT_MAXIMAL.into());
        return Ok(out);
    }
    let shared = success.state.normalize()?;
    let encoded = encode_qubit(&shared, msg)?;
    out.say(format!(
        "alice encoded message {} ({})",
        msg.value(),
        msg.op_name()
    ));
    if let Some(decoded) = decode_bell(&shared, &encoded)? {
        out.say(format!(
            "bob's bell-frame readout decoded {}",
            decoded.value()
        ));
        out.decoded = Some(decoded);
        out.conclusive = true;
    }
    Ok(out)
}

pub fn run_wn(n: u32, theta: f64, msg: Message) -> Result<ProtocolOutcome> {
    let mut out = ProtocolOutcome::new();
    let (p_parity, projected) = wn_parity_projection(n, theta)?;
    out.say(format!(
        "charlie measured C at theta={} and announced '+'",
        fmt(theta)
    ));
    out.say(format!(
        "alice concentrated; bob's parity projection onto span{{|01>,|10>}} succeeds with probability {}",
        fmt(p_parity)
    ));
    out.success_probability = p_parity;
    out.average_bits = 1.0 + p_parity;
    if branch_concurrence(&projected)? < 1.0 - TOL_PROTOCOL {
        out.flags.push(FLAG_NOT_MAXIMAL.into());
        out.say("parity-projected pair is not maximally entangled; no exact two-bit decode".into());
        return Ok(out);
    }
    let encoded = encode_qubit(&projected, msg)?;
    out.say(format!(
        "alice encoded message {} ({})",
        msg.value(),
        msg.op_name()
    ));
    if let Some(decoded) = decode_bell(&projected, &encoded)? {
        out.say(format!(
            "bob's bell-frame readout decoded {}",
            decoded.value()
        ));
        out.decoded = Some(decoded);
        out.conclusive = true;
    }
    Ok(out)
}

pub fn run_qutrit(theta: f64, outcome: &str, msg: Message) -> Result<ProtocolOutcome> {
    let mut out = ProtocolOutcome::new();
    let shared_branch = qutrit_branch(theta, outcome)?;
    out.say(format!(
        "charlie measured C (qutrit basis) at theta={} and announced '{outcome}'",
        fmt(theta)
    ));
    if outcome == "slant" {
        out.flags.push(FLAG_ONE_BIT.into());
        out.say("announced share is |11>; only one classical bit can be carried".into());
        out.success_probability = 0.0;
        out.average_bits = 1.0;
        return Ok(out);
    }

    // braid route exactly at pi/4, generic concentrator elsewhere
    let at_quarter = (theta - std::f64::consts::FRAC_PI_4).abs() < 1e-9;
    let dec = if at_quarter {
        let braid = if outcome == "up" {
            braid_b1(theta)?
        } else {
            braid_b2(theta)?
        };
        out.say(format!("alice applied the {} concentrator", braid.name()));
        concentrate(&shared_branch, &braid, 3)?
    } else {
        let m = concentrator_for_share(&shared_branch)?;
        out.say("alice applied the generic level-(0,2) concentrator".into());
        concentrate(&shared_branch, &m, 3)?
    };
    let success = dec.branch("0").expect("aux outcome 0");
    out.success_probability = success.probability;
    out.average_bits = 1.0 + success.probability;
    out.say(format!(
        "ancilla outcome 0 with probability {}",
        fmt(success.probability)
    ));
    if success.probability <= TOL_NORM {
        out.flags.push(FLAG_NOT_MAXIMAL.into());
        return Ok(out);
    }
    let shared = success.state.normalize()?;
    let encoded = encode_qutrit(&shared, msg)?;
    out.say(format!(
        "alice encoded message {} (level-{{0,2}} operator)",
        msg.value()
    ));
    if let Some(decoded) = decode_qutrit(&shared, &encoded)? {
        out.say(format!(
            "bob's four-outcome projective readout decoded {}",
            decoded.value()
        ));
        out.decoded = Some(decoded);
        out.conclusive = true;
    } else {
        out.flags.push(FLAG_NOT_MAXIMAL.into());
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// sampled runs
// ---------------------------------------------------------------------------

/// Like `run`, but the probabilistic steps (concentration ancilla readout,
/// discrimination conclusiveness) are drawn from a seeded generator; an
/// unlucky draw yields an inconclusive outcome.
pub fn run_sampled(spec: &RunSpec, msg: Message, seed: u64) -> Result<ProtocolOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(spec, msg, &mut rng)
}

fn sample_with<R: Rng>(spec: &RunSpec, msg: Message, rng: &mut R) -> Result<ProtocolOutcome> {
    let mut out = run(spec, msg)?;
    if !out.conclusive {
        return Ok(out);
    }
    let lucky = rng.gen::<f64>() < out.success_probability;
    if !lucky {
        out.decoded = None;
        out.conclusive = false;
        out.flags.push(FLAG_SAMPLED_FAILURE.into());
        out.say("sampled branch landed on the failure outcome".into());
    }
    Ok(out)
}

/// Aggregate Monte Carlo decode statistics.
#[derive(Debug, Clone, Serialize)]
pub struct RoundTripStats {
    pub trials: u64,
    pub conclusive: u64,
    pub correct: u64,
    pub misidentified: u64,
    pub expected_success: f64,
}

/// Run `trials` seeded round trips with uniformly random messages.
pub fn roundtrip_stats(spec: &RunSpec, trials: u64, seed: u64) -> Result<RoundTripStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let expected = run(spec, Message(0))?.success_probability;
    let mut stats = RoundTripStats {
        trials,
        conclusive: 0,
        correct: 0,
        misidentified: 0,
        expected_success: expected,
    };
    for _ in 0..trials {
        let msg = Message(rng.gen_range(0..4u8));
        let out = sample_with(spec, msg, &mut rng)?;
        if out.conclusive {
            stats.conclusive += 1;
            match out.decoded {
                Some(d) if d == msg => stats.correct += 1,
                Some(_) => stats.misidentified += 1,
                None => {}
            }
        }
    }
    Ok(stats)
}
