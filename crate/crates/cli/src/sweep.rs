//! Ladder table over a range of dimensions. Rows are computed in parallel
//! and written in input order as soon as every earlier row is done, so an
//! interrupted sweep leaves a valid prefix of the table behind.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::mpsc;

use biharmonic::ladder::{compute_ladder_unchecked, ladder_length_formula, parity_boundary_check};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Format, SweepArgs};
use crate::report::sink;
use crate::{config, Ctx, InputError};

pub const COLUMNS: [&str; 8] = ["n", "p_c", "N", "N_formula", "rungs", "parity_value", "parity_positive", "status"];

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub n: u32,
    pub p_c: f64,
    #[serde(rename = "N")]
    pub len: usize,
    #[serde(rename = "N_formula")]
    pub formula: usize,
    /// `p_2 … p_N`; `p_c` is its own column.
    pub rungs: Vec<f64>,
    pub parity_value: f64,
    pub parity_positive: bool,
    pub status: String,
}

impl Row {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            format!("{:.16e}", self.p_c),
            self.len.to_string(),
            self.formula.to_string(),
            self.rungs.iter().map(|p| format!("{p:.16e}")).collect::<Vec<_>>().join(";"),
            format!("{:.16e}", self.parity_value),
            self.parity_positive.to_string(),
            self.status.clone(),
        ]
    }
}

pub fn row(n: u32) -> Row {
    let formula = ladder_length_formula(n).unwrap_or(0);
    let (parity_value, parity_positive, parity_ok) = match parity_boundary_check(n) {
        Ok(r) => (r.factored, r.positive, r.passed()),
        Err(_) => (f64::NAN, false, false),
    };
    let (p_c, len, rungs, mut status) = match compute_ladder_unchecked(n) {
        Ok(l) if l.len() == formula => (l.p_c, l.len(), l.rungs[1..].to_vec(), "ok".to_owned()),
        Ok(l) => (l.p_c, l.len(), l.rungs[1..].to_vec(), "rung count differs from formula".to_owned()),
        Err(e) => (f64::NAN, 0, Vec::new(), e.to_string()),
    };
    if status == "ok" && !parity_ok {
        status = "parity boundary check failed".to_owned();
    }
    Row { n, p_c, len, formula, rungs, parity_value, parity_positive, status }
}

enum Table {
    Csv(csv::Writer<Box<dyn Write>>),
    /// JSON lines
    Lines(Box<dyn Write>),
}

pub fn sweep(a: &SweepArgs, ctx: &Ctx) -> anyhow::Result<bool> {
    let (n_min, n_max) = config::n_range((a.n_min, a.n_max), &ctx.file, (13, 60), (13, 200))?;
    let jobs = a.jobs.or(ctx.file.jobs).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| InputError(format!("--jobs {jobs}: {e}")))?;
    let out = sink(ctx.out())?;
    let mut table = match ctx.format(Format::Csv) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(COLUMNS)?;
            w.flush()?;
            Table::Csv(w)
        }
        Format::Json => Table::Lines(out),
    };

    let (tx, rx) = mpsc::channel::<Row>();
    let mut all_ok = true;
    std::thread::scope(|s| -> anyhow::Result<()> {
        s.spawn(move || {
            pool.install(|| {
                (n_min..=n_max).into_par_iter().for_each_with(tx, |tx, n| {
                    // the receiver only disappears if writing failed
                    let _ = tx.send(row(n));
                })
            })
        });
        let mut pending = BTreeMap::new();
        let mut next = n_min;
        for r in rx {
            pending.insert(r.n, r);
            while let Some(r) = pending.remove(&next) {
                all_ok &= r.ok();
                match &mut table {
                    Table::Csv(w) => {
                        w.write_record(r.record())?;
                        w.flush()?;
                    }
                    Table::Lines(out) => {
                        let mut line = serde_json::to_vec(&r)?;
                        line.push(b'\n');
                        out.write_all(&line)?;
                        out.flush()?;
                    }
                }
                next += 1;
            }
        }
        Ok(())
    })?;
    Ok(all_ok)
}
