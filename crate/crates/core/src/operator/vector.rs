//! Finitely supported vectors of `ℓ^p(ℤ)` and step functions of `L^p(X)`.
//!
//! JSON forms:
//! `{"p": 2, "entries": {"-1": [re, im]}}` and
//! `{"p": 2, "refinement": 3, "entries": {"4:7": [re, im]}}` (cell `k:j`).

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Cell = (i64, u32);

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("exponent p = {p} must be finite and >= 1")))
    }
}

fn check_coeff(c: Complex64) -> Result<()> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("coefficient {c} is not finite")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeqVectorRepr", into = "SeqVectorRepr")]
pub struct SeqVector {
    p: f64,
    entries: BTreeMap<i64, Complex64>,
}

impl SeqVector {
    pub fn zero(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self { p, entries: BTreeMap::new() })
    }

    pub fn from_entries<I: IntoIterator<Item = (i64, Complex64)>>(p: f64, entries: I) -> Result<Self> {
        let mut v = Self::zero(p)?;
        for (i, c) in entries {
            check_coeff(c)?;
            *v.entries.entry(i).or_default() += c;
        }
        Ok(v)
    }

    pub fn from_real<I: IntoIterator<Item = (i64, f64)>>(p: f64, entries: I) -> Result<Self> {
        Self::from_entries(p, entries.into_iter().map(|(i, x)| (i, Complex64::new(x, 0.0))))
    }

    /// Standard basis vector `e_i`.
    pub fn basis(p: f64, i: i64) -> Result<Self> {
        Self::from_real(p, [(i, 1.0)])
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn entries(&self) -> &BTreeMap<i64, Complex64> {
        &self.entries
    }

    pub fn get(&self, i: i64) -> Complex64 {
        self.entries.get(&i).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|c| *c == Complex64::default())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { p: self.p, entries: self.entries.iter().map(|(&i, &c)| (i, c * s)).collect() }
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: Complex64, other: &Self) -> Self {
        let mut out = self.clone();
        for (&i, &c) in &other.entries {
            *out.entries.entry(i).or_default() += s * c;
        }
        out
    }

    pub(crate) fn from_raw(p: f64, entries: BTreeMap<i64, Complex64>) -> Self {
        Self { p, entries }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFunctionRepr", into = "StepFunctionRepr")]
pub struct StepFunction {
    p: f64,
    refinement: u32,
    cells: BTreeMap<Cell, Complex64>,
}

impl StepFunction {
    pub fn zero(p: f64, refinement: u32) -> Result<Self> {
        check_p(p)?;
        if refinement > 20 {
            return Err(Error::invalid(format!("refinement {refinement} exceeds 20")));
        }
        Ok(Self { p, refinement, cells: BTreeMap::new() })
    }

    pub fn from_cells<I: IntoIterator<Item = (Cell, Complex64)>>(p: f64, refinement: u32, cells: I) -> Result<Self> {
        let mut f = Self::zero(p, refinement)?;
        let parts = 1u32 << refinement;
        for ((k, j), c) in cells {
            if j >= parts {
                return Err(Error::invalid(format!("sub-cell index {j} out of 0..{parts}")));
            }
            check_coeff(c)?;
            *f.cells.entry((k, j)).or_default() += c;
        }
        Ok(f)
    }

    /// `χ_{f^k(W)}`: coefficient 1 on every sub-cell of cell `k`.
    pub fn indicator_of_cell(p: f64, refinement: u32, k: i64) -> Result<Self> {
        let parts = 1u32 << refinement.min(20);
        Self::from_cells(p, refinement, (0..parts).map(|j| ((k, j), Complex64::new(1.0, 0.0))))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn refinement(&self) -> u32 {
        self.refinement
    }

    pub fn parts(&self) -> u32 {
        1 << self.refinement
    }

    pub fn cells(&self) -> &BTreeMap<Cell, Complex64> {
        &self.cells
    }

    pub fn get(&self, cell: Cell) -> Complex64 {
        self.cells.get(&cell).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.cells.values().all(|c| *c == Complex64::default())
    }

    /// Cells with a non-zero coefficient.
    pub fn support(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().filter(|(_, c)| **c != Complex64::default()).map(|(&cell, _)| cell)
    }

    /// `max |c|` over the support (the essential sup norm, every sub-cell has positive measure).
    pub fn sup_norm(&self) -> f64 {
        self.cells.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            p: self.p,
            refinement: self.refinement,
            cells: self.cells.iter().map(|(&k, &c)| (k, c * s)).collect(),
        }
    }

    /// `self + s·other`; refinements must agree.
    pub fn axpy(&self, s: Complex64, other: &Self) -> Result<Self> {
        if self.refinement != other.refinement {
            return Err(Error::invalid(format!(
                "refinement mismatch: {} vs {}",
                self.refinement, other.refinement
            )));
        }
        let mut out = self.clone();
        for (&cell, &c) in &other.cells {
            *out.cells.entry(cell).or_default() += s * c;
        }
        Ok(out)
    }

    pub(crate) fn from_raw(p: f64, refinement: u32, cells: BTreeMap<Cell, Complex64>) -> Self {
        Self { p, refinement, cells }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeqVectorRepr {
    p: f64,
    entries: BTreeMap<String, [f64; 2]>,
}

impl TryFrom<SeqVectorRepr> for SeqVector {
    type Error = Error;

    fn try_from(r: SeqVectorRepr) -> Result<Self> {
        let entries = r
            .entries
            .into_iter()
            .map(|(k, [re, im])| {
                let i = k.parse::<i64>().map_err(|_| Error::invalid(format!("bad index `{k}`")))?;
                Ok((i, Complex64::new(re, im)))
            })
            .collect::<Result<Vec<_>>>()?;
        SeqVector::from_entries(r.p, entries)
    }
}

impl From<SeqVector> for SeqVectorRepr {
    fn from(v: SeqVector) -> Self {
        Self {
            p: v.p,
            entries: v.entries.into_iter().map(|(i, c)| (i.to_string(), [c.re, c.im])).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepFunctionRepr {
    p: f64,
    refinement: u32,
    entries: BTreeMap<String, [f64; 2]>,
}

impl TryFrom<StepFunctionRepr> for StepFunction {
    type Error = Error;

    fn try_from(r: StepFunctionRepr) -> Result<Self> {
        let cells = r
            .entries
            .into_iter()
            .map(|(key, [re, im])| {
                let bad = || Error::invalid(format!("bad cell key `{key}`, expected `k:j`"));
                let (k, j) = key.split_once(':').ok_or_else(bad)?;
                let k = k.parse::<i64>().map_err(|_| bad())?;
                let j = j.parse::<u32>().map_err(|_| bad())?;
                Ok(((k, j), Complex64::new(re, im)))
            })
            .collect::<Result<Vec<_>>>()?;
        StepFunction::from_cells(r.p, r.refinement, cells)
    }
}

impl From<StepFunction> for StepFunctionRepr {
    fn from(f: StepFunction) -> Self {
        Self {
            p: f.p,
            refinement: f.refinement,
            entries: f.cells.into_iter().map(|((k, j), c)| (format!("{k}:{j}"), [c.re, c.im])).collect(),
        }
    }
}
