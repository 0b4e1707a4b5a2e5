use autoexp::experiments::*;
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::commands::{CliError, CliResult, Context, Output};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PresetName {
    ExactInverse,
    WeilGrid,
    CrtRandom,
    VdcFuzz,
    GcdLemma,
    QuadraticGrid,
    PvThueMorse,
    CongruenceEvil,
    CarryDecay,
    SyncDecay,
    WeylGrid,
    ConvolutionAlgebra,
}

#[derive(Args, Debug)]
pub struct PresetArgs {
    #[arg(value_enum)]
    pub name: PresetName,
    /// Print the configuration instead of running it.
    #[arg(long)]
    pub show: bool,
}

fn config_output<T: Serialize>(cfg: &T) -> CliResult<Output> {
    let text = serde_json::to_string_pretty(cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    Output::new(cfg, text)
}

fn summary<T: Serialize>(value: &T) -> CliResult<Output> {
    let json = serde_json::to_value(value).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = json
        .as_object()
        .map(|o| o.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join("\n"))
        .unwrap_or_default();
    Ok(Output { json, text })
}

macro_rules! preset {
    ($show:expr, $cfg:expr, |$c:ident| $body:expr) => {{
        let $c = $cfg;
        if $show {
            config_output(&$c)
        } else {
            $body
        }
    }};
}

pub fn run(a: &PresetArgs, ctx: &Context) -> CliResult<Output> {
    let seed = ctx.seed;
    match a.name {
        PresetName::ExactInverse => preset!(a.show, ExactInverseConfig::default(), |c| Output::table(&exact_inverse(&c)?)),
        PresetName::WeilGrid => preset!(a.show, WeilGridConfig::default(), |c| Output::table(&weil_grid(&c)?)),
        PresetName::CrtRandom => {
            preset!(a.show, CrtConfig { seed, ..Default::default() }, |c| Output::table(&crt_consistency(&c)?))
        }
        PresetName::VdcFuzz => preset!(a.show, VdcFuzzConfig { seed, ..Default::default() }, |c| summary(&vdc_fuzz(&c)?)),
        PresetName::GcdLemma => preset!(a.show, GcdGridConfig::default(), |c| {
            let reps = gcd_grid(&c)?;
            let rows: Vec<GcdRow> = reps
                .iter()
                .map(|r| GcdRow {
                    f: r.f.clone(),
                    r: r.r,
                    l: r.l,
                    checked: r.checked.len(),
                    exempt: r.exempt.len(),
                    small_primes: r.small_primes.len(),
                    violations: r.violations.len(),
                })
                .collect();
            Ok(Output { json: serde_json::to_value(&reps).map_err(|e| CliError::Usage(e.to_string()))?, ..Output::table(&rows)? })
        }),
        PresetName::QuadraticGrid => preset!(a.show, QuadraticGridConfig::default(), |c| Output::table(&quadratic_grid(&c)?)),
        PresetName::PvThueMorse => preset!(a.show, PvConfig::default(), |c| {
            let reports = pv_scan(&c)?;
            let rows: Vec<_> = reports.iter().flat_map(|r| r.rows.iter().cloned()).collect();
            Ok(Output { json: serde_json::to_value(&reports).map_err(|e| CliError::Usage(e.to_string()))?, ..Output::table(&rows)? })
        }),
        PresetName::CongruenceEvil => preset!(a.show, CongruenceConfig::default(), |c| {
            let rows = congruence_scan(&c, ctx.budget)?;
            let flat: Vec<CongruenceLine> = rows
                .iter()
                .map(|r| CongruenceLine {
                    q: r.report.q,
                    m: r.report.m,
                    count: r.report.count,
                    brute: r.brute,
                    main_term: r.report.main_term_f64,
                    relative_error: r.report.relative_error,
                })
                .collect();
            Ok(Output { json: serde_json::to_value(&rows).map_err(|e| CliError::Usage(e.to_string()))?, ..Output::table(&flat)? })
        }),
        PresetName::CarryDecay => preset!(a.show, CarryConfig::default(), |c| Output::table(&carry_decay(&c, ctx.budget)?)),
        PresetName::SyncDecay => preset!(a.show, SyncConfig::default(), |c| Output::table(&sync_decay(&c)?)),
        PresetName::WeylGrid => preset!(a.show, WeylGridConfig::default(), |c| Output::table(&weyl_grid(&c)?)),
        PresetName::ConvolutionAlgebra => {
            preset!(a.show, AlgebraConfig { seed, ..Default::default() }, |c| summary(&convolution_algebra(&c)?))
        }
    }
}

#[derive(Serialize)]
struct GcdRow {
    f: String,
    r: i64,
    l: i64,
    checked: usize,
    exempt: usize,
    small_primes: usize,
    violations: usize,
}

#[derive(Serialize)]
struct CongruenceLine {
    q: u64,
    m: u64,
    count: u128,
    brute: Option<u128>,
    main_term: f64,
    relative_error: f64,
}
