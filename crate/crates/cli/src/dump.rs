use std::fmt::Write as _;

use serde::Serialize;
use weil_core::{CycNumber, Fp, Matrix, Oriented, SpElement, SympSpace};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};
use crate::report::csv_field;
use crate::suites::{correspondence_table, Context, ScalarRecord};

#[derive(Debug, Serialize)]
pub struct LagrangianRecord {
    pub index: usize,
    pub rows: Vec<Vec<u32>>,
    pub scale: u32,
}

impl LagrangianRecord {
    fn new<const P: u32>(index: usize, o: &Oriented<P>) -> Self {
        Self { index, rows: o.subspace.to_u32_rows(), scale: o.scale.value() }
    }
}

fn rows_field(rows: &[Vec<u32>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Debug, Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    p: u64,
    n: usize,
    #[serde(flatten)]
    body: &'a T,
}

fn envelope<T: Serialize>(schema: &'static str, config: &RunConfig, body: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { schema, p: config.p, n: config.n, body })?;
    s.push('\n');
    Ok(s)
}

pub fn lagrangians<const P: u32>(ctx: &Context<P>) -> Result<String> {
    let records: Vec<LagrangianRecord> =
        ctx.lags().iter().enumerate().map(|(i, o)| LagrangianRecord::new(i, o)).collect();
    match ctx.config.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                count: usize,
                lagrangians: &'a [LagrangianRecord],
            }
            envelope("weil-lagrangians/1", &ctx.config, &Body { count: records.len(), lagrangians: &records })
        }
        Format::Csv => {
            let mut out = String::from("index,rows,scale\n");
            for r in &records {
                let _ = writeln!(out, "{},{},{}", r.index, csv_field(&rows_field(&r.rows)), r.scale);
            }
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct KernelRecord<const P: u32> {
    left: usize,
    right: usize,
    values: Vec<CycNumber<P>>,
}

/// Every canonical kernel, values in Heisenberg index order
/// `index(v)·p + z`.
pub fn kernels<const P: u32>(ctx: &Context<P>) -> Result<String> {
    let lags = ctx.lags();
    let sys = ctx.system();
    let mut records = Vec::with_capacity(lags.len() * lags.len());
    for (i, m) in lags.iter().enumerate() {
        for (j, l) in lags.iter().enumerate() {
            records.push(KernelRecord { left: i, right: j, values: sys.canonical_kernel(m, l)?.values().to_vec() });
        }
    }
    match ctx.config.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a, const P: u32> {
                lagrangians: Vec<LagrangianRecord>,
                points: usize,
                count: usize,
                kernels: &'a [KernelRecord<P>],
            }
            let body = Body {
                lagrangians: lags.iter().enumerate().map(|(i, o)| LagrangianRecord::new(i, o)).collect(),
                points: ctx.space().h_order(),
                count: records.len(),
                kernels: &records,
            };
            envelope("weil-kernels/1", &ctx.config, &body)
        }
        Format::Csv => {
            let mut out = String::from("left,right,point,value\n");
            for r in &records {
                for (k, v) in r.values.iter().enumerate() {
                    let _ = writeln!(out, "{},{},{},{}", r.left, r.right, k, csv_field(&v.to_string()));
                }
            }
            Ok(out)
        }
    }
}

pub fn correspondences<const P: u32>(ctx: &Context<P>) -> Result<String> {
    let (scope, elements) = ctx.elements(usize::MAX, 100, 18);
    let table: Vec<ScalarRecord<P>> = correspondence_table(ctx, &elements)?;
    match ctx.config.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a, const P: u32> {
                scope: String,
                count: usize,
                records: &'a [ScalarRecord<P>],
            }
            envelope("weil-correspondences/1", &ctx.config, &Body { scope: scope.to_string(), count: table.len(), records: &table })
        }
        Format::Csv => {
            let mut out = String::from("g,scalar\n");
            for r in &table {
                let _ = writeln!(out, "{},{}", csv_field(&rows_field(&r.g)), csv_field(&r.exact));
            }
            Ok(out)
        }
    }
}

/// Parses `"a b; c d"` or `"a,b;c,d"` into a symplectic element.
pub fn parse_matrix<const P: u32>(space: &SympSpace<P>, text: &str) -> Result<SpElement<P>> {
    let rows: Vec<Vec<i64>> = text
        .split(';')
        .filter(|r| !r.trim().is_empty())
        .map(|r| {
            r.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<i64>().map_err(|_| CliError::Matrix(format!("not an integer: {x:?}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let d = space.dim();
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(CliError::Matrix(format!("expected a {d}x{d} matrix")));
    }
    let m = Matrix::from_fn(d, d, |r, c| Fp::new(rows[r][c]));
    Ok(SpElement::new(space, m)?)
}

#[derive(Serialize)]
struct Entry<const P: u32> {
    exact: CycNumber<P>,
    re: f64,
    im: f64,
}

pub fn weil_matrix<const P: u32>(ctx: &Context<P>, text: &str) -> Result<String> {
    let g = parse_matrix(ctx.space(), text)?;
    let rho = ctx.canonical.rho(&g)?;
    let entries: Vec<Vec<Entry<P>>> = rho
        .to_rows()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| {
                    let c = x.embed().value();
                    Entry { exact: x, re: c.re, im: c.im }
                })
                .collect()
        })
        .collect();
    let rows: Vec<Vec<u32>> = g.matrix().to_rows().iter().map(|r| r.iter().map(|x| x.value()).collect()).collect();
    match ctx.config.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a, const P: u32> {
                g: Vec<Vec<u32>>,
                base: LagrangianRecord,
                dim: usize,
                entries: &'a [Vec<Entry<P>>],
            }
            let body = Body { g: rows, base: LagrangianRecord::new(0, ctx.canonical.base()), dim: rho.rows(), entries: &entries };
            envelope("weil-matrix/1", &ctx.config, &body)
        }
        Format::Csv => {
            let mut out = String::from("row,col,exact,re,im\n");
            for (r, row) in entries.iter().enumerate() {
                for (c, e) in row.iter().enumerate() {
                    let _ = writeln!(out, "{r},{c},{},{:.15},{:.15}", csv_field(&e.exact.to_string()), e.re, e.im);
                }
            }
            Ok(out)
        }
    }
}
