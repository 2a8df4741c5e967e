//! LP and MPS writers for packing models.
//!
//! Variables are named `x_` followed by the printed word (symbols joined by
//! `_` when an alphabet exceeds ten letters), in ascending rank order. Pinned
//! words are left out by default and their count is written as a comment;
//! with [`EmitOptions::include_fixed`] they are emitted as equality rows.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::PackingModel;
use crate::space::{Codeword, MixedSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// CPLEX LP format subset (objective, constraints, binaries).
    Lp,
    /// Free-format MPS.
    Mps,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lp" => Ok(Format::Lp),
            "mps" => Ok(Format::Mps),
            other => Err(Error::InvalidArgument(format!("unknown model format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EmitOptions {
    /// Emit pinned words as variables with equality rows instead of folding
    /// them into the objective constant.
    pub include_fixed: bool,
}

pub fn var_name(word: &Codeword) -> String {
    if word.space().is_digit_printable() {
        format!("x_{word}")
    } else {
        let parts: Vec<String> = word.symbols().iter().map(|s| s.to_string()).collect();
        format!("x_{}", parts.join("_"))
    }
}

/// Inverse of [`var_name`] without the `x_` prefix.
pub(crate) fn word_from_var_body(space: &MixedSpace, body: &str) -> Result<Codeword> {
    if space.is_digit_printable() {
        space.parse_word(body)
    } else {
        let symbols = body
            .split('_')
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::InvalidArgument(format!("bad symbol `{t}` in x_{body}")))
            })
            .collect::<Result<Vec<_>>>()?;
        space.word(&symbols)
    }
}

struct Columns {
    free: Vec<String>,
    ones: Vec<String>,
    zeros: Vec<String>,
}

fn columns(model: &PackingModel) -> Columns {
    let name = |r: &u64| var_name(&model.space().unrank(*r).expect("rank in range"));
    Columns {
        free: model.free().iter().map(name).collect(),
        ones: model.fixed_one().iter().map(name).collect(),
        zeros: model.fixed_zero().iter().map(name).collect(),
    }
}

fn header(model: &PackingModel, marker: &str, opts: EmitOptions) -> String {
    let mut h = String::new();
    let _ = writeln!(h, "{marker} mixed Hamming packing model");
    let _ = writeln!(
        h,
        "{marker} space {}  d {}  model {}",
        model.space(),
        model.d(),
        model.kind()
    );
    if let Some(p) = model.forbidden_profile() {
        let _ = writeln!(h, "{marker} forbidden contact profile (largest alphabet first): {p}");
    }
    if opts.include_fixed {
        let _ = writeln!(h, "{marker} pinned words emitted as equality rows");
    } else {
        let _ = writeln!(
            h,
            "{marker} objective constant: {} (pinned-to-one words, omitted)",
            model.objective_offset()
        );
        if !model.fixed_zero().is_empty() {
            let _ = writeln!(
                h,
                "{marker} {} pinned-to-zero words omitted",
                model.fixed_zero().len()
            );
        }
    }
    h
}

fn write_lp(model: &PackingModel, opts: EmitOptions) -> String {
    let cols = columns(model);
    let mut out = header(model, "\\", opts);

    let mut objective: Vec<&str> = cols.free.iter().map(String::as_str).collect();
    if opts.include_fixed {
        objective.extend(cols.ones.iter().map(String::as_str));
        objective.extend(cols.zeros.iter().map(String::as_str));
    }
    out.push_str("Maximize\n obj:");
    if objective.is_empty() {
        out.push_str(" 0");
    }
    for (k, name) in objective.iter().enumerate() {
        if k > 0 && k % 8 == 0 {
            out.push_str("\n     ");
        }
        if k > 0 {
            out.push_str(" +");
        }
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');

    out.push_str("Subject To\n");
    for (row, (i, j)) in model.conflict_pairs().enumerate() {
        let _ = writeln!(out, " c{}: {} + {} <= 1", row + 1, cols.free[i], cols.free[j]);
    }
    if opts.include_fixed {
        for (k, name) in cols.ones.iter().enumerate() {
            let _ = writeln!(out, " one{}: {name} = 1", k + 1);
        }
        for (k, name) in cols.zeros.iter().enumerate() {
            let _ = writeln!(out, " zero{}: {name} = 0", k + 1);
        }
    }

    out.push_str("Binary\n");
    for name in &cols.free {
        let _ = writeln!(out, " {name}");
    }
    if opts.include_fixed {
        for name in cols.ones.iter().chain(&cols.zeros) {
            let _ = writeln!(out, " {name}");
        }
    }
    out.push_str("End\n");
    out
}

fn write_mps(model: &PackingModel, opts: EmitOptions) -> String {
    let cols = columns(model);
    let mut out = header(model, "*", opts);
    out.push_str("* maximisation written as minimisation of the negated count\n");
    out.push_str("NAME          PACKING\nROWS\n N  OBJ\n");

    let pairs: Vec<(usize, usize)> = model.conflict_pairs().collect();
    for row in 0..pairs.len() {
        let _ = writeln!(out, " L  C{}", row + 1);
    }
    if opts.include_fixed {
        for k in 0..cols.ones.len() {
            let _ = writeln!(out, " E  ONE{}", k + 1);
        }
        for k in 0..cols.zeros.len() {
            let _ = writeln!(out, " E  ZERO{}", k + 1);
        }
    }

    let mut rows_of: Vec<Vec<usize>> = vec![Vec::new(); cols.free.len()];
    for (row, &(i, j)) in pairs.iter().enumerate() {
        rows_of[i].push(row + 1);
        rows_of[j].push(row + 1);
    }

    out.push_str("COLUMNS\n    MARKER        'MARKER'      'INTORG'\n");
    for (name, rows) in cols.free.iter().zip(&rows_of) {
        let _ = writeln!(out, "    {name:<12}  OBJ           -1");
        for r in rows {
            let _ = writeln!(out, "    {name:<12}  C{r:<11}  1");
        }
    }
    if opts.include_fixed {
        for (k, name) in cols.ones.iter().enumerate() {
            let _ = writeln!(out, "    {name:<12}  OBJ           -1");
            let _ = writeln!(out, "    {name:<12}  ONE{:<9}  1", k + 1);
        }
        for (k, name) in cols.zeros.iter().enumerate() {
            let _ = writeln!(out, "    {name:<12}  OBJ           -1");
            let _ = writeln!(out, "    {name:<12}  ZERO{:<8}  1", k + 1);
        }
    }
    out.push_str("    MARKER        'MARKER'      'INTEND'\n");

    out.push_str("RHS\n");
    for row in 0..pairs.len() {
        let _ = writeln!(out, "    RHS           C{:<11}  1", row + 1);
    }
    if opts.include_fixed {
        for k in 0..cols.ones.len() {
            let _ = writeln!(out, "    RHS           ONE{:<9}  1", k + 1);
        }
    }

    out.push_str("BOUNDS\n");
    let all = cols
        .free
        .iter()
        .chain(if opts.include_fixed { cols.ones.iter() } else { [].iter() })
        .chain(if opts.include_fixed { cols.zeros.iter() } else { [].iter() });
    for name in all {
        let _ = writeln!(out, " BV BND           {name}");
    }
    out.push_str("ENDATA\n");
    out
}

/// Renders the model as text.
pub fn render(model: &PackingModel, format: Format, opts: EmitOptions) -> String {
    match format {
        Format::Lp => write_lp(model, opts),
        Format::Mps => write_mps(model, opts),
    }
}

/// Writes the model to `sink`, returning the number of bytes written.
pub fn emit<W: Write>(
    model: &PackingModel,
    format: Format,
    sink: &mut W,
    opts: EmitOptions,
) -> Result<usize> {
    let text = render(model, format, opts);
    sink.write_all(text.as_bytes())?;
    sink.flush()?;
    Ok(text.len())
}
