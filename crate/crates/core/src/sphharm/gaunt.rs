use std::collections::HashMap;

use super::{HarmonicTable, SphereGrid};
use crate::{Error, Result};

fn selection_allowed(l3: usize, m3: i32, l1: usize, m1: i32, l2: usize, m2: i32) -> bool {
    m3 == m1 + m2 && l3 <= l1 + l2 && l3 + l1.min(l2) >= l1.max(l2) && (l1 + l2 + l3) % 2 == 0
}

fn check(l: usize, m: i32) -> Result<()> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::InvalidLm { l, m });
    }
    Ok(())
}

fn gaunt_by_quadrature(l3: usize, m3: i32, l1: usize, m1: i32, l2: usize, m2: i32) -> f64 {
    let lsum = l1 + l2 + l3;
    // integrand has degree l1 + l2 + l3 (even here), grid exact up to 2 band + 1
    let grid = SphereGrid::new(lsum / 2);
    let lmax = l1.max(l2).max(l3);
    grid.integrate(|d| {
        let t = HarmonicTable::new(lmax, d);
        (t.get(l3, m3).conj() * t.get(l1, m1) * t.get(l2, m2)).re
    })
}

/// Gaunt coefficient `int conj(Y_{l3,m3}) Y_{l1,m1} Y_{l2,m2} dOmega`.
///
/// Evaluated by a band-exact sphere quadrature; selection rules are applied
/// first so forbidden combinations return an exact zero.
pub fn gaunt(l3: usize, m3: i32, l1: usize, m1: i32, l2: usize, m2: i32) -> Result<f64> {
    check(l3, m3)?;
    check(l1, m1)?;
    check(l2, m2)?;
    if !selection_allowed(l3, m3, l1, m1, l2, m2) {
        return Ok(0.0);
    }
    Ok(gaunt_by_quadrature(l3, m3, l1, m1, l2, m2))
}

type GauntKey = (usize, i32, usize, i32, usize, i32);

/// Memoized [`gaunt`] for repeated lookups while assembling channel dipoles.
#[derive(Debug, Default, Clone)]
pub struct GauntCache {
    values: HashMap<GauntKey, f64>,
}

impl GauntCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, l3: usize, m3: i32, l1: usize, m1: i32, l2: usize, m2: i32) -> Result<f64> {
        let key = (l3, m3, l1, m1, l2, m2);
        if let Some(&v) = self.values.get(&key) {
            return Ok(v);
        }
        let v = gaunt(l3, m3, l1, m1, l2, m2)?;
        self.values.insert(key, v);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
