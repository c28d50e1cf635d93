//! CSV persistence of run traces and aggregates.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading a
//! file back yields bit-identical values.

use std::io::{Read, Write};

use super::experiment::AggregateRecord;
use super::HarnessError;
use crate::control::RunRecord;

pub const RUN_COLUMNS: [&str; 7] = ["layer", "beta", "a_val", "b_val", "e_p", "r_a", "p_succ"];
pub const AGGREGATE_COLUMNS: [&str; 5] = ["layer", "mean_r_a", "sd_r_a", "mean_p", "sd_p"];

fn write_rows<W: Write>(
    w: W,
    header: &[&str],
    rows: usize,
    cols: &[&[f64]],
) -> Result<(), HarnessError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for k in 0..rows {
        let mut row = vec![(k + 1).to_string()];
        row.extend(cols.iter().map(|c| c[k].to_string()));
        out.write_record(&row)?;
    }
    out.flush().map_err(|e| HarnessError::Csv(e.into()))?;
    Ok(())
}

fn read_rows<R: Read>(r: R, header: &[&str]) -> Result<Vec<Vec<f64>>, HarnessError> {
    let mut input = csv::Reader::from_reader(r);
    let got: Vec<String> = input.headers()?.iter().map(str::to_owned).collect();
    if got != header {
        return Err(HarnessError::Format(format!(
            "expected columns {header:?}, found {got:?}"
        )));
    }
    let mut cols = vec![Vec::new(); header.len() - 1];
    for (k, rec) in input.records().enumerate() {
        let rec = rec?;
        let layer: usize = rec[0]
            .parse()
            .map_err(|_| HarnessError::Format(format!("bad layer {:?}", &rec[0])))?;
        if layer != k + 1 {
            return Err(HarnessError::Format(format!(
                "expected layer {}, found {layer}",
                k + 1
            )));
        }
        for (c, field) in cols.iter_mut().zip(rec.iter().skip(1)) {
            c.push(
                field
                    .parse()
                    .map_err(|_| HarnessError::Format(format!("bad number {field:?}")))?,
            );
        }
    }
    Ok(cols)
}

pub fn write_run_csv<W: Write>(w: W, rec: &RunRecord) -> Result<(), HarnessError> {
    let cols: [&[f64]; 6] = [
        &rec.beta,
        &rec.a_val,
        &rec.b_val,
        &rec.e_p,
        &rec.r_a,
        &rec.p_succ,
    ];
    write_rows(w, &RUN_COLUMNS, rec.layers(), &cols)
}

/// Reads a trace written by [`write_run_csv`]. The evaluation counter is not
/// part of the file and comes back as zero.
pub fn read_run_csv<R: Read>(r: R) -> Result<RunRecord, HarnessError> {
    let mut cols = read_rows(r, &RUN_COLUMNS)?.into_iter();
    let mut next = || cols.next().unwrap_or_default();
    Ok(RunRecord {
        beta: next(),
        a_val: next(),
        b_val: next(),
        e_p: next(),
        r_a: next(),
        p_succ: next(),
        expectation_evals: 0,
    })
}

pub fn write_aggregate_csv<W: Write>(w: W, agg: &AggregateRecord) -> Result<(), HarnessError> {
    let cols: [&[f64]; 4] = [&agg.mean_r_a, &agg.sd_r_a, &agg.mean_p, &agg.sd_p];
    write_rows(w, &AGGREGATE_COLUMNS, agg.layers(), &cols)
}

pub fn read_aggregate_csv<R: Read>(r: R) -> Result<AggregateRecord, HarnessError> {
    let mut cols = read_rows(r, &AGGREGATE_COLUMNS)?.into_iter();
    let mut next = || cols.next().unwrap_or_default();
    Ok(AggregateRecord {
        mean_r_a: next(),
        sd_r_a: next(),
        mean_p: next(),
        sd_p: next(),
    })
}
