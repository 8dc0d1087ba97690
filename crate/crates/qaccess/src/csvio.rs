//! Trajectory CSV: columns `t, rho1, rho2, rho3, purity, u`.
//!
//! Values are printed with 17 significant digits, so reading a file back
//! recovers every stored `f64` exactly.

use std::io::{Read, Write};

use qaccess_core::dynamics::Trajectory;

use crate::error::CliError;

pub const HEADER: [&str; 6] = ["t", "rho1", "rho2", "rho3", "purity", "u"];

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory<W: Write>(out: W, traj: &Trajectory) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::input(format!("cannot write CSV: {e}"));
    w.write_record(HEADER).map_err(io)?;
    for k in 0..traj.len() {
        let v = traj.states[k].to_array();
        let row = [traj.times[k], v[0], v[1], v[2], traj.purities[k], traj.controls[k]];
        w.write_record(row.iter().map(|x| fmt17(*x))).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::input(format!("cannot write CSV: {e}")))
}

/// Rows of a trajectory file, each `[t, rho1, rho2, rho3, purity, u]`.
pub fn read_trajectory<R: Read>(input: R) -> Result<Vec<[f64; 6]>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(|e| CliError::input(format!("bad CSV header: {e}")))?;
    if headers.iter().ne(HEADER) {
        return Err(CliError::input(format!("unexpected CSV header {headers:?}")));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::input(format!("bad CSV row {}: {e}", line + 1)))?;
        let mut row = [0.0; 6];
        for (i, field) in rec.iter().enumerate().take(6) {
            row[i] = field
                .parse()
                .map_err(|_| CliError::input(format!("bad number `{field}` in row {}", line + 1)))?;
        }
        rows.push(row);
    }
    Ok(rows)
}
