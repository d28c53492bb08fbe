use std::io::Write;

use serde::Serialize;

use crate::bounds::{rate_table, RateCell};
use crate::kernelmodel::RegularityClass;

use super::ExperimentError;

/// Rate exponents h over a (class, β) grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateTable {
    pub classes: Vec<RegularityClass>,
    pub betas: Vec<f64>,
    pub cells: Vec<Vec<RateCell>>,
    pub notes: Vec<String>,
}

impl RateTable {
    /// One row per class: delta, s, then h for each β.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let betas: Vec<String> = self.betas.iter().map(|b| b.to_string()).collect();
        writeln!(out, "delta,s,{}", betas.join(","))?;
        for (c, row) in self.classes.iter().zip(&self.cells) {
            let hs: Vec<String> = row.iter().map(|cell| cell.h.to_string()).collect();
            writeln!(out, "{},{},{}", c.delta, c.s, hs.join(","))?;
        }
        Ok(())
    }
}

pub fn emit_rate_table(classes: &[RegularityClass], betas: &[f64]) -> Result<RateTable, ExperimentError> {
    let cells = rate_table(classes, betas)?;
    let mut notes = Vec::new();
    if classes.iter().any(|c| c.s >= 1) {
        notes.push(
            "cells with s >= 1 are h = beta * (exponent of i in the active B(i,n) row) - 1/2, \
             with the row chosen by the breakpoints of beta"
                .to_string(),
        );
    }
    Ok(RateTable {
        classes: classes.to_vec(),
        betas: betas.to_vec(),
        cells,
        notes,
    })
}
