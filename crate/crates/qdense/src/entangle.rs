//! Two-qubit concurrence in the three conventions the analysis mixes.
//!
//! * `concurrence` — the spin-flip eigenvalue construction on a normalized
//!   density matrix, the textbook monotone in [0, 1].
//! * `branch_concurrence` — 2 |a00 a11 - a01 a10| on raw, possibly
//!   sub-normalized branch amplitudes. The closed forms C1..C3 quoted for
//!   post-measurement branches follow this convention.
//! * `paper_closed_form` — the quoted curves themselves, for figure
//!   reproduction.
//!
//! All three are exposed side by side so every figure can be regenerated
//! under the convention that produced it.

use nalgebra::{DMatrix, Matrix4, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, GateMatrix, PureState};

/// Concurrence conventions evaluated for one shared state.
#[derive(Debug, Clone, Copy)]
pub struct ConcurrenceReport {
    /// Spin-flip value on the normalized state.
    pub wootters: f64,
    /// Raw-amplitude value, no normalization.
    pub branch: f64,
    /// Closed-form curve value, when one is quoted for this state.
    pub paper_closed_form: Option<f64>,
}

fn to_matrix4(rho: &DensityMatrix) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| rho.entry(i, j))
}

fn validate_two_qubit_density(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::NonPhysicalDensity(format!(
            "expected a two-qubit density matrix, dimension {}",
            rho.dim()
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(Error::NonPhysicalDensity(format!("trace is {tr}")));
    }
    for i in 0..4 {
        for j in 0..4 {
            if (rho.entry(i, j) - rho.entry(j, i).conj()).norm() > 1e-9 {
                return Err(Error::NonPhysicalDensity("not Hermitian".into()));
            }
        }
    }
    let eig = SymmetricEigen::new(to_matrix4(rho));
    if eig.eigenvalues.iter().any(|&l| l < -1e-9) {
        return Err(Error::NonPhysicalDensity(
            "negative eigenvalue beyond tolerance".into(),
        ));
    }
    Ok(())
}

/// sigma-y (x) sigma-y, the real anti-diagonal sign matrix of the spin flip.
fn spin_flip_kernel() -> Matrix4<Complex64> {
    let mut y2 = Matrix4::zeros();
    y2[(0, 3)] = Complex64::new(-1.0, 0.0);
    y2[(1, 2)] = Complex64::ONE;
    y2[(2, 1)] = Complex64::ONE;
    y2[(3, 0)] = Complex64::new(-1.0, 0.0);
    y2
}

fn hermitian_sqrt(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let eig = SymmetricEigen::new(*m);
    let mut d = Matrix4::zeros();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        // eigenvalues at roundoff level are exact zeros of the spectrum;
        // keeping them would inject sqrt-amplified noise into the root
        let clamped = if l < 1e-13 { 0.0 } else { l };
        d[(k, k)] = Complex64::new(clamped.sqrt(), 0.0);
    }
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Wootters concurrence max{0, l1 - l2 - l3 - l4} of a two-qubit density
/// matrix, the l's being the decreasing square-rooted eigenvalues of
/// rho rho-tilde with rho-tilde = (sy (x) sy) rho* (sy (x) sy).
///
/// Those square roots equal the singular values of the complex-symmetric
/// matrix sqrt(rho) (sy (x) sy) sqrt(rho)^T, which is how they are computed
/// here: the singular-value route keeps the near-zero l's at machine
/// precision instead of sqrt-amplifying eigenvalue roundoff.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    validate_two_qubit_density(rho)?;
    let m = to_matrix4(rho);
    let root = hermitian_sqrt(&m);
    let b = &root * spin_flip_kernel() * root.transpose();
    let svd = SVD::new(b, false, false);
    let mut lambdas: Vec<f64> = svd.singular_values.iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// 2 |a00 a11 - a01 a10| on the raw amplitudes of a two-qubit state.
pub fn branch_concurrence(s: &PureState) -> Result<f64> {
    let reg = s.register();
    if reg.dims() != vec![2, 2] {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: reg.dim(),
        });
    }
    let a00 = s.amp(&[0, 0]);
    let a01 = s.amp(&[0, 1]);
    let a10 = s.amp(&[1, 0]);
    let a11 = s.amp(&[1, 1]);
    Ok(2.0 * (a00 * a11 - a01 * a10).norm())
}

/// The quoted closed-form concurrence curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaperCurve {
    /// |sin 2t| for the ghz-type share under l = 1/tan(t).
    C,
    /// 2 sin^2(t) sin^2(e) for the four-particle ghz branch.
    C1,
    /// sqrt(2) |cos t sin t| quoted for the w3 branch.
    C2,
    /// |sin 2t| for the parity-projected w-n share.
    C4,
}

pub fn paper_closed_form(which: PaperCurve, theta: f64, epsilon: f64) -> f64 {
    match which {
        PaperCurve::C | PaperCurve::C4 => (2.0 * theta).sin().abs(),
        PaperCurve::C1 => 2.0 * theta.sin().powi(2) * epsilon.sin().powi(2),
        PaperCurve::C2 => 2f64.sqrt() * (theta.cos() * theta.sin()).abs(),
    }
}

/// Evaluate all conventions on one raw two-qubit branch state.
pub fn report_for_branch(s: &PureState, closed: Option<f64>) -> Result<ConcurrenceReport> {
    let normalized = s.normalize()?;
    let rho = normalized.density_and_partial_trace(&normalized.register().labels())?;
    Ok(ConcurrenceReport {
        wootters: concurrence(&rho)?,
        branch: branch_concurrence(s)?,
        paper_closed_form: closed,
    })
}

/// Trace distance (1/2) ||a - b||_1 between two density matrices.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let n = a.dim();
    let diff = DMatrix::from_fn(n, n, |i, j| a.entry(i, j) - b.entry(i, j));
    let sym = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

/// Haar-flavored random single-qubit unitary from three sampled angles,
/// for invariance property checks.
pub fn random_single_qubit_unitary<R: Rng>(rng: &mut R) -> GateMatrix {
    let beta: f64 = rng.gen::<f64>() * std::f64::consts::FRAC_PI_2;
    let phi1: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    let phi2: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    let (sb, cb) = beta.sin_cos();
    let e = |p: f64| Complex64::new(p.cos(), p.sin());
    let entries = vec![
        e(phi1) * cb,
        e(phi2) * sb,
        -e(-phi2) * sb,
        e(-phi1) * cb,
    ];
    GateMatrix::new("random-u2", vec![2], vec![vec![0], vec![1]], entries)
        .expect("parameterized unitary construction")
}
