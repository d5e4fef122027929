//! Ancilla-assisted entanglement concentration.
//!
//! This is the matrix catalog: the transcribed concentration operators with
//! their per-matrix validity domains, plus a generic two-level concentrator
//! that is unitary for every input and replaces the transcribed matrices
//! where their entries leave the reals.
//!
//! Domain conventions. Each transcribed matrix mixes a ratio entry (cot or
//! tan) with a square root of its complement, so it is real and unitary only
//! on one side of pi/4:
//!
//! * `u1_ghz`, `u2_ghz`: |cos t| <= |sin t|, i.e. t in [pi/4, pi/2]
//! * `u1_prime`, `u3_wn`: |sin t| <= |cos t|, i.e. t in [0, pi/4]
//! * `u3_ghz4`: sin t sin e <= cos t cos e
//! * `braid_b1`, `braid_b2`: mix both cot and tan blocks, real only at pi/4;
//!   they are built verbatim (complex entries and all) for diagnostics and
//!   are not domain-gated.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{measure_party, Basis, BranchDecomposition};
use crate::qcore::{sqrt_c, GateMatrix, PureState, Register};

const DOMAIN_SLACK: f64 = 1e-12;

fn domain_err(matrix: &str, entry: &str, detail: String) -> Error {
    Error::DomainViolation {
        matrix: matrix.into(),
        entry: entry.into(),
        detail,
    }
}

/// sqrt(x) with |x| below roundoff treated as an exact zero, so the matrices
/// become exact sign patterns at theta = pi/4 instead of keeping 1e-8 dust
/// from the squared trig ratios.
fn snapped_root(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        0.0
    } else {
        x.max(0.0).sqrt()
    }
}

fn snapped_root_c(x: f64) -> Complex64 {
    if x.abs() < 1e-12 {
        Complex64::ZERO
    } else {
        sqrt_c(x)
    }
}

/// Ordering |00>, |10>, |01>, |11> used by the (A, aux) matrices below.
fn swapped_ordering() -> Vec<Vec<usize>> {
    vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]
}

/// Concentrator for sin(t)|00> + cos(t)|11> shares; attenuates the |0> level
/// of the first target by cot(t).
pub fn u1_ghz(theta: f64) -> Result<GateMatrix> {
    let (s, c) = theta.sin_cos();
    if c.abs() > s.abs() + DOMAIN_SLACK {
        return Err(domain_err(
            "u1-ghz",
            "sqrt(1 - cot^2(theta))",
            format!(
                "becomes imaginary: |cos({theta:.6})| = {:.6} > |sin({theta:.6})| = {:.6}",
                c.abs(),
                s.abs()
            ),
        ));
    }
    let cot = c / s;
    let root = snapped_root(1.0 - cot * cot);
    GateMatrix::from_real(
        "u1-ghz",
        vec![2, 2],
        swapped_ordering(),
        &[
            cot, 0.0, root, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, -1.0, //
            root, 0.0, -cot, 0.0,
        ],
    )
}

/// Alternative concentrator for the same shares, used with the ancilla
/// prepared in |1>; the success branch then appears on ancilla outcome 1.
pub fn u2_ghz(theta: f64) -> Result<GateMatrix> {
    let (s, c) = theta.sin_cos();
    if c.abs() > s.abs() + DOMAIN_SLACK {
        return Err(domain_err(
            "u2-ghz",
            "sqrt(1 - cot^2(theta))",
            format!(
                "becomes imaginary: |cos({theta:.6})| = {:.6} > |sin({theta:.6})| = {:.6}",
                c.abs(),
                s.abs()
            ),
        ));
    }
    let cot = c / s;
    let root = snapped_root(1.0 - cot * cot);
    GateMatrix::from_real(
        "u2-ghz",
        vec![2, 2],
        swapped_ordering(),
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, cot, root, 0.0, //
            0.0, -root, cot, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
}

/// Concentrator for cos(t)|00> + l sin(t)|11> shares; attenuates the |0>
/// level by tan(t), leaving the aux-0 branch proportional to |00> + l|11>.
pub fn u1_prime(theta: f64) -> Result<GateMatrix> {
    let (s, c) = theta.sin_cos();
    if s.abs() > c.abs() + DOMAIN_SLACK {
        return Err(domain_err(
            "u1-prime",
            "sqrt(1 - tan^2(theta))",
            format!(
                "becomes imaginary: |sin({theta:.6})| = {:.6} > |cos({theta:.6})| = {:.6}",
                s.abs(),
                c.abs()
            ),
        ));
    }
    let tan = s / c;
    let root = snapped_root(1.0 - tan * tan);
    GateMatrix::from_real(
        "u1-prime",
        vec![2, 2],
        swapped_ordering(),
        &[
            tan, 0.0, root, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, -1.0, //
            root, 0.0, -tan, 0.0,
        ],
    )
}

/// Two-controller concentrator for cos(t)cos(e)|00> + sin(t)sin(e)|11>
/// shares, with the stray unit entry in row 3 corrected to 0 so the matrix
/// is actually unitary.
pub fn u3_ghz4(theta: f64, epsilon: f64) -> Result<GateMatrix> {
    let num = theta.sin() * epsilon.sin();
    let den = theta.cos() * epsilon.cos();
    if num.abs() > den.abs() + DOMAIN_SLACK || den.abs() < 1e-15 {
        return Err(domain_err(
            "u3-ghz4",
            "sqrt(1 - tan^2(theta) tan^2(epsilon))",
            format!(
                "becomes imaginary: |sin sin| = {:.6} > |cos cos| = {:.6}",
                num.abs(),
                den.abs()
            ),
        ));
    }
    let r = num / den;
    let root = snapped_root(1.0 - r * r);
    GateMatrix::from_real(
        "u3-ghz4",
        vec![2, 2],
        swapped_ordering(),
        &[
            r, 0.0, root, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            -root, 0.0, r, 0.0, //
            0.0, 0.0, 0.0, -1.0,
        ],
    )
}

/// The same matrix with its printed row 3 kept verbatim, second entry 1.
/// Not unitary; exists so the defect can be demonstrated.
pub fn u3_ghz4_as_printed(theta: f64, epsilon: f64) -> Result<GateMatrix> {
    let num = theta.sin() * epsilon.sin();
    let den = theta.cos() * epsilon.cos();
    if den.abs() < 1e-15 {
        return Err(Error::InvalidParameter(
            "u3-ghz4 ratio entry diverges: cos(theta) cos(epsilon) = 0".into(),
        ));
    }
    let r = Complex64::new(num / den, 0.0);
    let root = snapped_root_c(1.0 - (num / den).powi(2));
    let z = Complex64::ZERO;
    let one = Complex64::ONE;
    GateMatrix::new(
        "u3-ghz4 (as printed)",
        vec![2, 2],
        swapped_ordering(),
        vec![
            r, z, root, z, //
            z, one, z, z, //
            -root, one, r, z, //
            z, z, z, -one,
        ],
    )
}

/// Concentrator for the W_n share; row-major ordering |00>,|01>,|10>,|11>.
pub fn u3_wn(theta: f64) -> Result<GateMatrix> {
    let (s, c) = theta.sin_cos();
    if s.abs() > c.abs() + DOMAIN_SLACK {
        return Err(domain_err(
            "u3-wn",
            "sqrt(1 - tan^2(theta))",
            format!(
                "becomes imaginary: |sin({theta:.6})| = {:.6} > |cos({theta:.6})| = {:.6}",
                s.abs(),
                c.abs()
            ),
        ));
    }
    let tan = s / c;
    let root = snapped_root(1.0 - tan * tan);
    GateMatrix::from_real(
        "u3-wn",
        vec![2, 2],
        GateMatrix::row_major_ordering(&[2, 2]),
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, tan, root, 0.0, //
            0.0, -root, tan, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
}

fn braid(name: &str, ratio_a: f64, ratio_b: f64) -> Result<GateMatrix> {
    // ratio_a sits in the corner block (|00>,|22>), ratio_b in the middle
    // block (|02>,|20>); both square-root complements are taken complex.
    let z = Complex64::ZERO;
    let one = Complex64::ONE;
    let ra = Complex64::new(ratio_a, 0.0);
    let rb = Complex64::new(ratio_b, 0.0);
    let root_a = snapped_root_c(1.0 - ratio_a * ratio_a);
    let root_b = snapped_root_c(1.0 - ratio_b * ratio_b);
    let mut entries = vec![z; 81];
    let mut set = |r: usize, c: usize, v: Complex64| entries[r * 9 + c] = v;
    set(0, 0, ra);
    set(0, 8, root_a);
    set(1, 1, one);
    set(2, 2, rb);
    set(2, 6, root_b);
    set(3, 3, one);
    set(4, 4, one);
    set(5, 5, one);
    set(6, 2, root_b);
    set(6, 6, -rb);
    set(7, 7, one);
    set(8, 0, root_a);
    set(8, 8, -ra);
    GateMatrix::new(
        name,
        vec![3, 3],
        GateMatrix::row_major_ordering(&[3, 3]),
        entries,
    )
}

/// 9x9 braid matrix for sin(t)|00> + cos(t)|22> qutrit shares, built exactly
/// as written: cot block in the corners, tan block in the middle. Real and
/// unitary only at t = pi/4.
pub fn braid_b1(theta: f64) -> Result<GateMatrix> {
    let (s, c) = theta.sin_cos();
    if s.abs() < 1e-15 || c.abs() < 1e-15 {
        return Err(Error::InvalidParameter(
            "braid ratio entries diverge at theta = 0 or pi/2".into(),
        ));
    }
    braid("braid-b1", c / s, s / c)
}

/// Mirror braid for cos(t)|00> - sin(t)|22> shares (tan and cot exchanged).
pub fn braid_b2(theta: f64) -> Result<GateMatrix> {
    let (s, c) = theta.sin_cos();
    if s.abs() < 1e-15 || c.abs() < 1e-15 {
        return Err(Error::InvalidParameter(
            "braid ratio entries diverge at theta = 0 or pi/2".into(),
        ));
    }
    braid("braid-b2", s / c, c / s)
}

/// Unitary-for-all-inputs concentration rotation on (party, ancilla).
///
/// For a share a|ii> + b|jj> with a^2 + b^2 = 1 the returned matrix rotates
/// the ancilla conditioned on the party level carrying the larger amplitude,
/// so the ancilla-0 branch comes out as min(a,b) (|ii> + |jj>) with success
/// probability 2 min(a,b)^2.
pub fn generic_concentrator(
    a: f64,
    b: f64,
    dim: usize,
    levels: (usize, usize),
) -> Result<GateMatrix> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::InvalidParameter(
            "generic concentrator needs non-negative amplitudes".into(),
        ));
    }
    if (a * a + b * b - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "generic concentrator needs a^2 + b^2 = 1, got {}",
            a * a + b * b
        )));
    }
    if !matches!(dim, 2 | 3) {
        return Err(Error::UnsupportedDim(dim));
    }
    let (i, j) = levels;
    if i == j || i >= dim || j >= dim {
        return Err(Error::InvalidParameter(format!(
            "levels ({i},{j}) invalid for dimension {dim}"
        )));
    }
    // attenuate the level with the larger amplitude
    let (attenuated, ratio) = if a >= b { (i, b / a.max(1e-300)) } else { (j, a / b) };
    let ratio = ratio.min(1.0);
    let spill = snapped_root(1.0 - ratio * ratio);

    let d2 = dim * dim;
    let mut entries = vec![Complex64::ZERO; d2 * d2];
    for k in 0..d2 {
        entries[k * d2 + k] = Complex64::ONE;
    }
    let pos = |party: usize, aux: usize| party * dim + aux;
    let p0 = pos(attenuated, 0);
    let p1 = pos(attenuated, 1);
    entries[p0 * d2 + p0] = Complex64::new(ratio, 0.0);
    entries[p1 * d2 + p0] = Complex64::new(spill, 0.0);
    entries[p0 * d2 + p1] = Complex64::new(-spill, 0.0);
    entries[p1 * d2 + p1] = Complex64::new(ratio, 0.0);
    GateMatrix::new(
        "generic-concentrator",
        vec![dim, dim],
        GateMatrix::row_major_ordering(&[dim, dim]),
        entries,
    )
}

/// Attach an ancilla in |init>, apply `m` on (A, aux) and read the ancilla
/// out in the computational basis. Branch probabilities are squared norms,
/// so they sum to the squared norm of `shared`.
pub fn concentrate_from(
    shared: &PureState,
    m: &GateMatrix,
    aux_dim: usize,
    init: usize,
) -> Result<BranchDecomposition> {
    let aux_reg = Register::new(&[("aux", aux_dim)])?;
    let aux = PureState::computational(aux_reg, &[init])?;
    let joint = shared.tensor(&aux)?;
    let evolved = m.apply(&joint, &["A", "aux"])?;
    measure_party(&evolved, "aux", &Basis::computational(aux_dim))
}

/// `concentrate_from` with the ancilla prepared in |0>.
pub fn concentrate(shared: &PureState, m: &GateMatrix, aux_dim: usize) -> Result<BranchDecomposition> {
    concentrate_from(shared, m, aux_dim, 0)
}
