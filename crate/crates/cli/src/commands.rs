use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use htts_core::oracle::{enumerate_strict_core, find_blocking_coalition};
use htts_core::scaling::{self, Family};
use htts_core::{
    htts_solve, parse_allocation, parse_market, random_market, solve_with_tiebreak,
    write_allocation, write_market, GenParams, Market, Verdict,
};

use crate::{Command, FamilyArg};

const EMPTY: u8 = 2;

pub fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Solve {
            market,
            trace,
            tiebreak_seed,
            stats,
        } => solve(&market, trace, tiebreak_seed, stats),
        Command::Verify { market, allocation } => verify(&market, &allocation),
        Command::Oracle { market } => oracle(&market),
        Command::Gen {
            agents,
            houses,
            seed,
        } => gen(agents, houses, seed),
        Command::Bench {
            sizes,
            ratio,
            seed,
            repeats,
            family,
            prefix_len,
        } => {
            let family = match family {
                FamilyArg::Random => Family::Random,
                FamilyArg::Prefix => Family::RandomPrefix(prefix_len),
                FamilyArg::Staircase => Family::Staircase,
            };
            bench(&sizes, ratio, seed, repeats, family)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_market(path: &Path) -> Result<Market> {
    parse_market(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn solve(path: &Path, trace: bool, seed: Option<u64>, stats: bool) -> Result<ExitCode> {
    let market = load_market(path)?;
    let outcome = match seed {
        Some(s) => solve_with_tiebreak(&market, s),
        None => htts_solve(&market),
    };

    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    let code = match &outcome.verdict {
        Verdict::CoreFound(allocation) => {
            out.write_all(write_allocation(&market, allocation).as_bytes())?;
            ExitCode::SUCCESS
        }
        Verdict::EmptyCore { failed_step } => {
            writeln!(err, "EMPTY CORE at step {failed_step}")?;
            ExitCode::from(EMPTY)
        }
    };
    if trace {
        for segment in &outcome.trace {
            writeln!(err, "{}", segment.display(&market))?;
        }
    }
    if stats {
        let ops = outcome.ops;
        writeln!(
            err,
            "arcs={} scc={} feas={}",
            ops.arcs_built, ops.scc_work, ops.feasibility_comparisons
        )?;
    }
    Ok(code)
}

fn verify(market_path: &Path, allocation_path: &Path) -> Result<ExitCode> {
    let market = load_market(market_path)?;
    let allocation = parse_allocation(&read(allocation_path)?, &market)
        .with_context(|| format!("{}", allocation_path.display()))?;
    match find_blocking_coalition(&market, &allocation)? {
        None => {
            println!("IN STRICT CORE");
            Ok(ExitCode::SUCCESS)
        }
        Some(cert) => {
            println!("BLOCKED by {}", cert.display(&market));
            Ok(ExitCode::from(EMPTY))
        }
    }
}

fn oracle(path: &Path) -> Result<ExitCode> {
    let market = load_market(path)?;
    let core = enumerate_strict_core(&market)?;
    match core.as_slice() {
        [] => {
            eprintln!("EMPTY CORE");
            Ok(ExitCode::from(EMPTY))
        }
        [allocation] => {
            print!("{}", write_allocation(&market, allocation));
            Ok(ExitCode::SUCCESS)
        }
        _ => bail!(
            "found {} strict-core allocations; expected at most one",
            core.len()
        ),
    }
}

fn gen(agents: usize, houses: usize, seed: u64) -> Result<ExitCode> {
    let market = random_market(GenParams::new(agents, houses, seed))?;
    print!("{}", write_market(&market));
    Ok(ExitCode::SUCCESS)
}

fn bench(
    sizes: &[usize],
    ratio: f64,
    seed: u64,
    repeats: usize,
    family: Family,
) -> Result<ExitCode> {
    if sizes.is_empty() || sizes.contains(&0) {
        bail!("sizes must be a non-empty list of positive house counts");
    }
    if !(ratio.is_finite() && ratio >= 1.0) {
        bail!("ratio must be at least 1 (every house type needs an owner)");
    }
    if repeats == 0 {
        bail!("repeats must be positive");
    }
    let rows = scaling::measure(family, sizes, ratio, seed, repeats)?;

    let mut out = io::stdout().lock();
    writeln!(out, "H I wall_ns arcs scc feas")?;
    for r in &rows {
        writeln!(
            out,
            "{} {} {} {} {} {}",
            r.houses,
            r.agents,
            r.wall_ns,
            r.ops.arcs_built,
            r.ops.scc_work,
            r.ops.feasibility_comparisons
        )?;
    }
    match scaling::ops_slope(&rows) {
        Some(s) => writeln!(out, "slope={s:.3}")?,
        None => writeln!(out, "slope=n/a")?,
    }
    Ok(ExitCode::SUCCESS)
}
