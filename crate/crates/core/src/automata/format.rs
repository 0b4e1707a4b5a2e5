//! Line-oriented text format.
//!
//! ```text
//! dfao v1 base=2 states=2 initial=0
//! state 0 out=r:1/1
//! state 1 out=r:-1/1@1/3
//! t 0 0 0
//! t 0 1 1
//! ...
//! ```
//!
//! `r:<num>/<den>` is a rational, optionally times `e(a/b)` via `@<a>/<b>`;
//! `c:<re>,<im>` is a floating complex value. Blank lines and `#` comments are skipped.

use std::fmt::Write;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use super::Dfao;
use crate::error::{Error, Result};
use crate::exact::{Phase, Scalar};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_ratio(s: &str, line: usize) -> Result<(BigInt, BigInt)> {
    let (a, b) = s.split_once('/').unwrap_or((s, "1"));
    let a: BigInt = a.trim().parse().map_err(|_| perr(line, format!("bad integer {a:?}")))?;
    let b: BigInt = b.trim().parse().map_err(|_| perr(line, format!("bad integer {b:?}")))?;
    if b.is_zero() {
        return Err(perr(line, "zero denominator"));
    }
    Ok((a, b))
}

fn parse_value(s: &str, line: usize) -> Result<Scalar> {
    if let Some(rest) = s.strip_prefix("r:") {
        let (coeff, phase) = rest.split_once('@').map_or((rest, None), |(c, p)| (c, Some(p)));
        let (a, b) = parse_ratio(coeff, line)?;
        let phase = match phase {
            None => Phase::ZERO,
            Some(p) => {
                let (pa, pb) = parse_ratio(p, line)?;
                let pb: u64 = (&pb)
                    .try_into()
                    .ok()
                    .filter(|&d: &u64| d > 0)
                    .ok_or_else(|| perr(line, "phase denominator must be a positive 64-bit integer"))?;
                let pa = pa % BigInt::from(pb);
                let pa: i128 = (&pa).try_into().expect("reduced below a u64");
                Phase::new(pa, pb)
            }
        };
        let coeff = BigRational::new(a, b);
        let phase = if coeff.is_zero() { Phase::ZERO } else { phase };
        Ok(Scalar::Exact { coeff, phase })
    } else if let Some(rest) = s.strip_prefix("c:") {
        let (re, im) = rest.split_once(',').ok_or_else(|| perr(line, "complex value needs re,im"))?;
        let re: f64 = re.trim().parse().map_err(|_| perr(line, format!("bad float {re:?}")))?;
        let im: f64 = im.trim().parse().map_err(|_| perr(line, format!("bad float {im:?}")))?;
        Ok(Scalar::Float(Complex64::new(re, im)))
    } else {
        Err(perr(line, format!("unknown value {s:?}")))
    }
}

fn format_value(v: &Scalar) -> String {
    match v {
        Scalar::Exact { coeff, phase } => {
            let mut s = format!("r:{}/{}", coeff.numer(), coeff.denom());
            if !phase.is_zero() {
                write!(s, "@{}/{}", phase.num(), phase.den()).unwrap();
            }
            s
        }
        Scalar::Float(z) => format!("c:{:?},{:?}", z.re, z.im),
    }
}

fn key<'a>(tok: &'a str, name: &str, line: usize) -> Result<&'a str> {
    tok.strip_prefix(name)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| perr(line, format!("expected {name}=...")))
}

fn num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| perr(line, format!("bad number {s:?}")))
}

pub fn parse_dfao(text: &str) -> Result<Dfao> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 5 || toks[0] != "dfao" {
        return Err(perr(hl, "expected header `dfao v1 base=<k> states=<S> initial=<q0>`"));
    }
    if toks[1] != "v1" {
        return Err(perr(hl, format!("unsupported version {}", toks[1])));
    }
    let base: u32 = num(key(toks[2], "base", hl)?, hl)?;
    let states: usize = num(key(toks[3], "states", hl)?, hl)?;
    let initial: usize = num(key(toks[4], "initial", hl)?, hl)?;
    if base < 2 || states == 0 {
        return Err(perr(hl, "base must be at least 2 and states positive"));
    }
    let mut outputs: Vec<Option<Scalar>> = vec![None; states];
    let mut table: Vec<Vec<Option<usize>>> = vec![vec![None; base as usize]; states];
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.first().copied() {
            Some("state") => {
                if toks.len() != 3 {
                    return Err(perr(ln, "expected `state <i> out=<value>`"));
                }
                let i: usize = num(toks[1], ln)?;
                if i >= states {
                    return Err(perr(ln, format!("state {i} out of range")));
                }
                if outputs[i].is_some() {
                    return Err(perr(ln, format!("duplicate output for state {i}")));
                }
                outputs[i] = Some(parse_value(key(toks[2], "out", ln)?, ln)?);
            }
            Some("t") => {
                if toks.len() != 4 {
                    return Err(perr(ln, "expected `t <from> <digit> <to>`"));
                }
                let (from, d, to): (usize, usize, usize) = (num(toks[1], ln)?, num(toks[2], ln)?, num(toks[3], ln)?);
                if from >= states || to >= states || d >= base as usize {
                    return Err(perr(ln, "transition out of range"));
                }
                if table[from][d].is_some() {
                    return Err(perr(ln, format!("duplicate transition ({from}, {d})")));
                }
                table[from][d] = Some(to);
            }
            _ => return Err(perr(ln, format!("unrecognized line {l:?}"))),
        }
    }
    let outputs = outputs
        .into_iter()
        .enumerate()
        .map(|(i, o)| o.ok_or_else(|| perr(0, format!("missing output for state {i}"))))
        .collect::<Result<Vec<_>>>()?;
    let transitions = table
        .into_iter()
        .enumerate()
        .map(|(q, row)| {
            row.into_iter()
                .enumerate()
                .map(|(d, t)| t.ok_or_else(|| perr(0, format!("missing transition ({q}, {d})"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Dfao::new(base, transitions, initial, outputs)
}

pub fn serialize_dfao(d: &Dfao) -> String {
    let mut s = format!("dfao v1 base={} states={} initial={}\n", d.base(), d.num_states(), d.initial());
    for (i, o) in d.outputs().iter().enumerate() {
        writeln!(s, "state {i} out={}", format_value(o)).unwrap();
    }
    for q in 0..d.num_states() {
        for digit in 0..d.base() {
            writeln!(s, "t {q} {digit} {}", d.next(q, digit)).unwrap();
        }
    }
    s
}
