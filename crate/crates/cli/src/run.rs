//! Scan-point evaluation.

use rayon::prelude::*;

use spinpecd::currents::{current_set, shell_grid_band, CurrentSet};
use spinpecd::fields::{default_l_report, field_samples, moments, FieldSelector, MultipoleSet};
use spinpecd::oracle::{a_coefficients, compare_with_oracle, AGrids, ATable};
use spinpecd::sphharm::SphereGrid;

use crate::scenario::{Plan, ScanPoint};

#[derive(Debug, Clone)]
pub struct PointResult<'a> {
    pub index: usize,
    pub point: &'a ScanPoint,
    /// One entry per spin axis, in scenario order.
    pub rows: Vec<CurrentSet>,
    /// Moments of `B_+` and `B_-`.
    pub multipoles: Option<[MultipoleSet; 2]>,
    pub a_table: Option<ATable>,
}

fn multipole_pair(point: &ScanPoint, l_report: Option<usize>) -> spinpecd::Result<[MultipoleSet; 2]> {
    let lmax = point.dipole.lmax();
    let l_report = l_report.unwrap_or_else(|| default_l_report(lmax));
    let grid = SphereGrid::new((2 * lmax + l_report).div_ceil(2));
    let f = field_samples(&point.dipole, &grid);
    Ok([moments(&f, FieldSelector::Plus, l_report)?, moments(&f, FieldSelector::Minus, l_report)?])
}

fn evaluate<'a>(plan: &Plan, index: usize, point: &'a ScanPoint) -> spinpecd::Result<PointResult<'a>> {
    let d = &point.dipole;
    let grid = SphereGrid::new(shell_grid_band(d.lmax()));
    let rows = plan
        .axes
        .iter()
        .map(|s| current_set(d, &plan.photon, s, &grid))
        .collect::<spinpecd::Result<Vec<_>>>()?;
    let multipoles = plan.output.multipoles.map(|l| multipole_pair(point, l)).transpose()?;
    let a_table = plan
        .output
        .a_table
        .map(|(lk, ls)| a_coefficients(d, &plan.photon, &AGrids::for_lmax(d.lmax(), lk, ls), lk, ls))
        .transpose()?;
    Ok(PointResult {
        index,
        point,
        rows,
        multipoles,
        a_table,
    })
}

/// Evaluates every scan point; results are in scan order.
pub fn run(plan: &Plan) -> spinpecd::Result<Vec<PointResult<'_>>> {
    plan.points
        .par_iter()
        .enumerate()
        .map(|(i, p)| evaluate(plan, i, p))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub comparisons: usize,
    pub max_deviation: f64,
}

/// Compares every closed-form output with the oracle.
pub fn check_oracle(plan: &Plan) -> spinpecd::Result<OracleReport> {
    let pairs: Vec<_> = plan
        .points
        .iter()
        .flat_map(|p| plan.axes.iter().map(move |s| (p, s)))
        .collect();
    let devs = pairs
        .par_iter()
        .map(|(p, s)| compare_with_oracle(&p.dipole, &plan.photon, s).map(|c| c.max_deviation()))
        .collect::<spinpecd::Result<Vec<f64>>>()?;
    Ok(OracleReport {
        comparisons: devs.len() * 5,
        max_deviation: devs.into_iter().fold(0.0, f64::max),
    })
}
