//! Grid sweeps over `r`, `s` and `λ`, emitted in row-major order (`r` outermost,
//! `λ` innermost) regardless of how many threads evaluate the cells.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::{
    chsh_n_lambda, distillation_gap, limit_distilled_hardy, mixture_distillation,
    peak_chsh_lambda, DistillError,
};

/// One axis of a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    Point(f64),
    /// `count` cell midpoints `min + (i + ½)(max − min)/count`, which keeps the
    /// boundary singularities of the closed forms out of the grid.
    Range { min: f64, max: f64, count: usize },
}

impl Axis {
    pub fn validate(&self) -> Result<(), DistillError> {
        match *self {
            Axis::Point(v) if v.is_finite() => Ok(()),
            Axis::Point(v) => Err(DistillError::Grid(format!("point {v} is not finite"))),
            Axis::Range { min, max, count } => {
                if !(min.is_finite() && max.is_finite()) {
                    Err(DistillError::Grid("axis bounds must be finite".into()))
                } else if min >= max {
                    Err(DistillError::Grid(format!("axis min {min} must be below max {max}")))
                } else if count == 0 {
                    Err(DistillError::Grid("axis needs at least one point".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn points(&self) -> Vec<f64> {
        match *self {
            Axis::Point(v) => vec![v],
            Axis::Range { min, max, count } => {
                let step = (max - min) / count as f64;
                (0..count).map(|i| min + (i as f64 + 0.5) * step).collect()
            }
        }
    }

    /// Width of one grid cell (zero for a single point).
    pub fn step(&self) -> f64 {
        match *self {
            Axis::Point(_) => 0.0,
            Axis::Range { min, max, count } => (max - min) / count as f64,
        }
    }
}

impl FromStr for Axis {
    type Err = DistillError;

    /// `min:max:count` or a single value.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |what: &str| DistillError::Grid(format!("bad axis {s:?}: {what}"));
        let parts: Vec<&str> = s.split(':').collect();
        let axis = match parts.as_slice() {
            [v] => Axis::Point(v.trim().parse().map_err(|_| bad("not a number"))?),
            [min, max, count] => Axis::Range {
                min: min.trim().parse().map_err(|_| bad("min is not a number"))?,
                max: max.trim().parse().map_err(|_| bad("max is not a number"))?,
                count: count.trim().parse().map_err(|_| bad("count is not an integer"))?,
            },
            _ => return Err(bad("expected min:max:count")),
        };
        axis.validate()?;
        Ok(axis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Optimal distillation gap of the quantum Hardy family over `(r, s)`.
    Gap,
    /// `λ → 0` limit of the distilled Hardy success over `(r, s)`.
    Limit,
    /// Optimal distillation of `λ·H(r,s) + (1−λ)P_L1` over `(r, s, λ)`.
    Mixture,
    /// Peak CHSH value of the Tsirelson-box mixture over `λ`.
    ChshPeak,
}

impl Quantity {
    fn axes(&self) -> [bool; 3] {
        match self {
            Quantity::Gap | Quantity::Limit => [true, true, false],
            Quantity::Mixture => [true, true, true],
            Quantity::ChshPeak => [false, false, true],
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Gap => "gap",
            Quantity::Limit => "limit",
            Quantity::Mixture => "mixture",
            Quantity::ChshPeak => "chsh-n",
        })
    }
}

impl FromStr for Quantity {
    type Err = DistillError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gap" => Ok(Quantity::Gap),
            "limit" => Ok(Quantity::Limit),
            "mixture" => Ok(Quantity::Mixture),
            "chsh-n" | "chsh-peak" => Ok(Quantity::ChshPeak),
            other => Err(DistillError::Grid(format!("unknown quantity {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Grid {
    pub r: Option<Axis>,
    pub s: Option<Axis>,
    pub lambda: Option<Axis>,
}

/// One evaluated grid cell. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub lambda: Option<f64>,
    pub n_opt: Option<u64>,
    pub parent_value: f64,
    pub distilled_value: f64,
    /// `distilled_value − parent_value`.
    pub gap: f64,
}

fn axis_points(axis: Option<Axis>) -> Vec<Option<f64>> {
    match axis {
        Some(a) => a.points().into_iter().map(Some).collect(),
        None => vec![None],
    }
}

fn evaluate(q: Quantity, r: Option<f64>, s: Option<f64>, lambda: Option<f64>) -> Result<SweepRecord, DistillError> {
    let need = |v: Option<f64>| v.expect("axis presence checked before evaluation");
    let mut rec = SweepRecord {
        r,
        s,
        lambda,
        n_opt: None,
        parent_value: 0.0,
        distilled_value: 0.0,
        gap: 0.0,
    };
    match q {
        Quantity::Gap | Quantity::Mixture => {
            let res = if q == Quantity::Gap {
                distillation_gap(need(r), need(s))?
            } else {
                mixture_distillation(need(r), need(s), need(lambda))?
            };
            rec.n_opt = Some(res.n_opt);
            rec.parent_value = res.parent;
            rec.distilled_value = res.distilled;
            rec.gap = res.gap;
        }
        Quantity::Limit => {
            let v = limit_distilled_hardy(need(r), need(s))?;
            rec.distilled_value = v;
            rec.gap = v;
        }
        Quantity::ChshPeak => {
            let l = need(lambda);
            let peak = peak_chsh_lambda(l)?;
            let parent = chsh_n_lambda(l, 1)?;
            rec.n_opt = Some(peak.n_opt);
            rec.parent_value = parent;
            rec.distilled_value = peak.value;
            rec.gap = peak.value - parent;
        }
    }
    Ok(rec)
}

pub fn sweep(grid: &Grid, quantity: Quantity) -> Result<Vec<SweepRecord>, DistillError> {
    let present = [grid.r.is_some(), grid.s.is_some(), grid.lambda.is_some()];
    for ((name, has), needs) in ["r", "s", "lambda"].iter().zip(present).zip(quantity.axes()) {
        if has != needs {
            return Err(DistillError::Grid(format!(
                "quantity {quantity} {} the {name} axis",
                if needs { "requires" } else { "does not take" }
            )));
        }
    }
    for axis in [grid.r, grid.s, grid.lambda].into_iter().flatten() {
        axis.validate()?;
    }
    let rs = axis_points(grid.r);
    let ss = axis_points(grid.s);
    let ls = axis_points(grid.lambda);
    let cells = rs.len() * ss.len() * ls.len();
    (0..cells)
        .into_par_iter()
        .map(|idx| {
            let l = idx % ls.len();
            let s = idx / ls.len() % ss.len();
            let r = idx / (ls.len() * ss.len());
            evaluate(quantity, rs[r], ss[s], ls[l])
        })
        .collect()
}

/// CHSH value of the `n`-copy child of the Tsirelson-box mixture for each `n`,
/// as records with `n_opt` holding `n`.
pub fn chsh_curve(lambda: f64, ns: &[u64]) -> Result<Vec<SweepRecord>, DistillError> {
    let parent = chsh_n_lambda(lambda, 1)?;
    ns.par_iter()
        .map(|&n| {
            let v = chsh_n_lambda(lambda, n)?;
            Ok(SweepRecord {
                r: None,
                s: None,
                lambda: Some(lambda),
                n_opt: Some(n),
                parent_value: parent,
                distilled_value: v,
                gap: v - parent,
            })
        })
        .collect()
}

/// Record with the largest distilled value (first one on ties).
pub fn argmax(records: &[SweepRecord]) -> Option<&SweepRecord> {
    records.iter().fold(None, |best: Option<&SweepRecord>, rec| match best {
        Some(b) if b.distilled_value >= rec.distilled_value => Some(b),
        _ => Some(rec),
    })
}

/// Record with the largest gap (first one on ties).
pub fn argmax_gap(records: &[SweepRecord]) -> Option<&SweepRecord> {
    records.iter().fold(None, |best: Option<&SweepRecord>, rec| match best {
        Some(b) if b.gap >= rec.gap => Some(b),
        _ => Some(rec),
    })
}

pub const CSV_HEADER: &str = "r,s,lambda,n_opt,parent_value,distilled_value,gap";

/// Writes records as CSV with header [`CSV_HEADER`]; absent axes are empty fields
/// and numbers use the shortest representation that round-trips.
pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<(), DistillError> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for rec in records {
        w.serialize(rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
