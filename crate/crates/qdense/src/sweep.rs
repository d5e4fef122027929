//! CSV regeneration of every figure and table.
//!
//! Each figure id maps to a fixed default grid over its plotted range;
//! values come from the simulated pipelines wherever the concentrator
//! domains allow and from the analytic residual forms elsewhere. Output is
//! deterministic: fixed grid order, 12-significant-digit formatting, `\n`
//! line endings.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::entangle::{branch_concurrence, concurrence, paper_closed_form, PaperCurve};
use crate::error::{Error, Result};
use crate::protocol::{
    ghz4_success_branch, ghz_designated, ghz_table_bits, ghz_type_shared, run_ghz,
    w3_shared_form, w4_shared_form, wn_parity_projection, Message,
};
use crate::qcore::{PureState, Register};

/// Uniform grid over a closed interval.
#[derive(Debug, Clone, Copy)]
pub struct SweepGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl SweepGrid {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<SweepGrid> {
        if points < 2 {
            return Err(Error::InvalidParameter(
                "grid needs at least 2 points".into(),
            ));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter("grid bounds must be finite".into()));
        }
        Ok(SweepGrid { lo, hi, points })
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.points - 1) as f64)
            .collect()
    }
}

/// One CSV cell: numeric, text, or empty (outside a curve's plotted range).
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

/// Column-labeled rows ready for CSV serialization.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// 12 significant digits, scientific, stable across runs.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => fmt_sig12(*x),
                    Cell::Text(t) => t.clone(),
                    Cell::Empty => String::new(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Figure and table identifiers accepted by the sweep command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    T21,
    T22,
}

impl FigureId {
    pub fn parse(s: &str) -> Result<FigureId> {
        Ok(match s {
            "fig1" => FigureId::Fig1,
            "fig2" => FigureId::Fig2,
            "fig3" => FigureId::Fig3,
            "fig4" => FigureId::Fig4,
            "fig5" => FigureId::Fig5,
            "fig6" => FigureId::Fig6,
            "fig7" => FigureId::Fig7,
            "t21" => FigureId::T21,
            "t22" => FigureId::T22,
            other => return Err(Error::UnknownFigure(other.into())),
        })
    }

    pub fn all() -> [FigureId; 9] {
        [
            FigureId::Fig1,
            FigureId::Fig2,
            FigureId::Fig3,
            FigureId::Fig4,
            FigureId::Fig5,
            FigureId::Fig6,
            FigureId::Fig7,
            FigureId::T21,
            FigureId::T22,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::T21 => "t21",
            FigureId::T22 => "t22",
        }
    }
}

pub const DEFAULT_POINTS: usize = 101;

/// Generate one figure/table on its default range with `points` per axis.
pub fn generate(id: FigureId, points: usize) -> Result<Table> {
    match id {
        FigureId::Fig1 => fig1(points),
        FigureId::Fig2 => fig2(points),
        FigureId::Fig3 => fig3(points),
        FigureId::Fig4 => fig4(points),
        FigureId::Fig5 => fig5(points),
        FigureId::Fig6 => fig6(points),
        FigureId::Fig7 => fig7(points),
        FigureId::T21 => t21(),
        FigureId::T22 => t22(),
    }
}

/// Average transmitted bits vs theta, simulated. The sin-branch column runs
/// a sin-designated variant (valid up to pi/4), the cos-branch column a
/// cos-designated variant (valid from pi/4); outside its half each column
/// is empty, mirroring the two plotted line segments.
fn fig1(points: usize) -> Result<Table> {
    let grid = SweepGrid::new(0.0, FRAC_PI_2, points)?;
    let mut rows = Vec::new();
    for theta in grid.values() {
        let sin_cell = if theta <= FRAC_PI_4 + 1e-12 {
            let out = run_ghz(1, theta, "+", Message::new(0)?)?;
            Cell::Num(out.average_bits)
        } else {
            Cell::Empty
        };
        let cos_cell = if theta >= FRAC_PI_4 - 1e-12 {
            let out = run_ghz(0, theta, "+", Message::new(0)?)?;
            Cell::Num(out.average_bits)
        } else {
            Cell::Empty
        };
        rows.push(vec![Cell::Num(theta), sin_cell, cos_cell]);
    }
    Ok(Table {
        columns: vec![
            "theta".into(),
            "bits_sin_branch".into(),
            "bits_cos_branch".into(),
        ],
        rows,
    })
}

/// The l = 1/tan(theta) relation over [pi/4, pi/2].
fn fig2(points: usize) -> Result<Table> {
    let grid = SweepGrid::new(FRAC_PI_4, FRAC_PI_2, points)?;
    let rows = grid
        .values()
        .iter()
        .map(|&theta| vec![Cell::Num(theta), Cell::Num(theta.cos() / theta.sin())])
        .collect();
    Ok(Table {
        columns: vec!["theta".into(), "l".into()],
        rows,
    })
}

/// Wootters concurrence of the pipeline share under l = 1/tan(theta).
/// The concentration itself runs at a fixed in-domain angle; the share it
/// produces depends only on l.
fn fig3(points: usize) -> Result<Table> {
    let grid = SweepGrid::new(FRAC_PI_4, FRAC_PI_2, points)?;
    let conc_angle = std::f64::consts::PI / 5.0;
    let mut rows = Vec::new();
    for theta in grid.values() {
        let l = (theta.cos() / theta.sin()).max(1e-12);
        let (shared, _) = ghz_type_shared(l, conc_angle)?;
        let rho = shared.density_and_partial_trace(&["A", "B"])?;
        rows.push(vec![Cell::Num(theta), Cell::Num(concurrence(&rho)?)]);
    }
    Ok(Table {
        columns: vec!["theta".into(), "wootters_concurrence".into()],
        rows,
    })
}

/// Raw-branch concurrence of the four-particle success branch over the
/// plotted rectangle. Simulated wherever the concentrator domain
/// sin t sin e <= cos t cos e holds; the analytic branch
/// sin t sin e (|00> + |11>) covers the rest of the rectangle.
fn fig4(points: usize) -> Result<Table> {
    let tgrid = SweepGrid::new(0.0, FRAC_PI_4, points)?;
    let egrid = SweepGrid::new(0.0, FRAC_PI_2, points)?;
    let reg = Register::qubits(&["A", "B"])?;
    let mut rows = Vec::new();
    for theta in tgrid.values() {
        for eps in egrid.values() {
            let num = theta.sin() * eps.sin();
            let den = theta.cos() * eps.cos();
            let in_domain = num <= den + 1e-12 && den > 1e-9;
            let c1 = if in_domain {
                let (branch, _) = ghz4_success_branch(theta, eps)?;
                branch_concurrence(&branch)?
            } else {
                let w = theta.sin() * eps.sin();
                let branch = PureState::from_real(reg.clone(), &[w, 0.0, 0.0, w], false)?;
                branch_concurrence(&branch)?
            };
            rows.push(vec![Cell::Num(theta), Cell::Num(eps), Cell::Num(c1)]);
        }
    }
    Ok(Table {
        columns: vec!["theta".into(), "epsilon".into(), "c1_branch".into()],
        rows,
    })
}

/// The w3 share over [pi/4, pi/2] in all three conventions side by side.
fn fig5(points: usize) -> Result<Table> {
    let grid = SweepGrid::new(FRAC_PI_4, FRAC_PI_2, points)?;
    let mut rows = Vec::new();
    for theta in grid.values() {
        let theta = theta.min(FRAC_PI_2 - 1e-9);
        let share = w3_shared_form(theta)?;
        let wootters = concurrence(
            &share
                .normalize()?
                .density_and_partial_trace(&["A", "B"])?,
        )?;
        let branch = branch_concurrence(&share)?;
        let quoted = paper_closed_form(PaperCurve::C2, theta, 0.0);
        rows.push(vec![
            Cell::Num(theta),
            Cell::Num(wootters),
            Cell::Num(branch),
            Cell::Num(quoted),
        ]);
    }
    Ok(Table {
        columns: vec![
            "theta".into(),
            "wootters_concurrence".into(),
            "branch_concurrence".into(),
            "quoted_sqrt2_sincos".into(),
        ],
        rows,
    })
}

/// Raw-branch concurrence of the four-particle w share over the plotted
/// square, including the epsilon = pi/4 slice as its grid line.
fn fig6(points: usize) -> Result<Table> {
    let tgrid = SweepGrid::new(FRAC_PI_4, FRAC_PI_2, points)?;
    let egrid = SweepGrid::new(FRAC_PI_4, FRAC_PI_2, points)?;
    let mut rows = Vec::new();
    for theta in tgrid.values() {
        // guard the open upper edge where the residual diverges
        let theta = theta.min(FRAC_PI_2 - 1e-9);
        for eps in egrid.values() {
            let share = w4_shared_form(theta, eps)?;
            rows.push(vec![
                Cell::Num(theta),
                Cell::Num(eps),
                Cell::Num(branch_concurrence(&share)?),
            ]);
        }
    }
    Ok(Table {
        columns: vec!["theta".into(), "epsilon".into(), "c3_branch".into()],
        rows,
    })
}

/// Concurrence of the parity-projected w-n share (n = 1) over [0, pi/2]:
/// simulated up to pi/4, analytic residual beyond.
fn fig7(points: usize) -> Result<Table> {
    let grid = SweepGrid::new(0.0, FRAC_PI_2, points)?;
    let reg = Register::qubits(&["A", "B"])?;
    let mut rows = Vec::new();
    for theta in grid.values() {
        let c4 = if theta < 1e-12 {
            0.0
        } else if theta <= FRAC_PI_4 + 1e-12 {
            let (_, projected) = wn_parity_projection(1, theta)?;
            concurrence(&projected.density_and_partial_trace(&["A", "B"])?)?
        } else {
            let share =
                PureState::from_real(reg.clone(), &[0.0, theta.cos(), theta.sin(), 0.0], true)?;
            concurrence(&share.density_and_partial_trace(&["A", "B"])?)?
        };
        rows.push(vec![Cell::Num(theta), Cell::Num(c4)]);
    }
    Ok(Table {
        columns: vec!["theta".into(), "c4".into()],
        rows,
    })
}

/// Per-variant designated readout: simulated vs tabulated bits on a 9-point
/// grid inside each formula's half-range.
fn t21() -> Result<Table> {
    let mut rows = Vec::new();
    for variant in 1..=7u8 {
        let (outcome, sin_formula) = ghz_designated(variant)?;
        for k in 1..=9usize {
            let theta = if sin_formula {
                FRAC_PI_4 * k as f64 / 10.0
            } else {
                FRAC_PI_4 + FRAC_PI_4 * k as f64 / 10.0
            };
            let out = run_ghz(variant, theta, outcome, Message::new(0)?)?;
            rows.push(vec![
                Cell::Text(format!("g{variant}")),
                Cell::Text(outcome.into()),
                Cell::Num(theta),
                Cell::Num(out.average_bits),
                Cell::Num(ghz_table_bits(variant, theta)?),
            ]);
        }
    }
    Ok(Table {
        columns: vec![
            "variant".into(),
            "outcome".into(),
            "theta".into(),
            "bits_simulated".into(),
            "bits_formula".into(),
        ],
        rows,
    })
}

/// The l rows: matching angle, share description and success probability,
/// including the l = 0 limit and the balanced l = 1 row.
fn t22() -> Result<Table> {
    let mut rows = Vec::new();
    for k in 0..=10usize {
        let l = k as f64 / 10.0;
        let theta = if l == 0.0 { FRAC_PI_2 } else { (1.0 / l).atan() };
        let description = if k == 0 {
            "|00>".to_string()
        } else if k == 10 {
            "(|00> + |11>)/sqrt(2)".to_string()
        } else {
            let big_l = 1.0 / (1.0 + l * l).sqrt();
            format!("{} (|00> + {} |11>)", fmt_sig12(big_l), fmt_sig12(l))
        };
        let success = 2.0 * l * l / (1.0 + l * l);
        rows.push(vec![
            Cell::Num(l),
            Cell::Num(theta),
            Cell::Text(description),
            Cell::Num(success),
        ]);
    }
    Ok(Table {
        columns: vec![
            "l".into(),
            "theta".into(),
            "shared_state".into(),
            "success_probability".into(),
        ],
        rows,
    })
}
