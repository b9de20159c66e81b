//! Acceptance gate. Runs every criterion in sequence, prints one
//! `PASS`/`FAIL` line each, and exits non-zero if any criterion failed.
//!
//! Timed criteria use the test profile, which is optimized.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{fixture, injective_market, invariant_violations, small_random_market};
use htts_core::scaling::{measure, ops_slope, Family, ScalingRow};
use htts_core::{
    enumerate_strict_core, htts_solve, parse_market, random_market, random_prefix_market,
    solve_with_tiebreak, ttc_solve, write_allocation, GenParams, Market, SolveOutcome, SplitMix64,
    Verdict,
};

const ORACLE_INSTANCES: u64 = 600;
const TTC_INSTANCES: u64 = 600;
const TIEBREAK_MARKETS: u64 = 120;
const TIEBREAK_SEEDS: u64 = 8;
/// Total operations never exceed this multiple of `H^2 + H*I`.
const OPS_CONSTANT: f64 = 1.0;

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn record(&mut self, id: u32, ok: bool, detail: String) {
        let line = format!(
            "criterion {id}: {} {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        self.lines.push((ok, line));
    }
}

fn ms(d: Duration) -> String {
    format!("{:.3}ms", d.as_secs_f64() * 1e3)
}

fn golden_example(report: &mut Report) {
    let market = parse_market(&fixture("example1.market")).unwrap();
    let t = Instant::now();
    let out = htts_solve(&market);
    let elapsed = t.elapsed();

    let mut problems = Vec::new();
    match &out.verdict {
        Verdict::CoreFound(mu) => {
            let got = write_allocation(&market, mu);
            if got != fixture("example1.alloc") {
                problems.push(format!("allocation {got:?}"));
            }
        }
        v => problems.push(format!("verdict {v:?}")),
    }
    let segments: Vec<BTreeSet<&str>> = out
        .trace
        .iter()
        .map(|s| s.houses.iter().map(|&h| market.house_name(h)).collect())
        .collect();
    let expected = vec![BTreeSet::from(["h3", "h4"]), BTreeSet::from(["h1", "h2"])];
    if segments != expected {
        problems.push(format!("segments {segments:?}"));
    }
    if elapsed >= Duration::from_millis(1) {
        problems.push("too slow".into());
    }
    let ok = problems.is_empty();
    report.record(
        1,
        ok,
        format!(
            "golden allocation and segments, solve {} {problems:?}",
            ms(elapsed)
        ),
    );
}

/// Criteria 2 and 3 also feed every solve into the invariant suite.
struct InvariantTally {
    instances: usize,
    violations: Vec<String>,
}

impl InvariantTally {
    fn check(&mut self, market: &Market, out: &SolveOutcome) {
        self.instances += 1;
        self.violations.extend(invariant_violations(market, out));
    }
}

fn oracle_equivalence(report: &mut Report, tally: &mut InvariantTally) {
    let t = Instant::now();
    let (mut found, mut empty, mut mismatches, mut multi) = (0, 0, Vec::new(), 0);
    for seed in 0..ORACLE_INSTANCES {
        let market = small_random_market(seed, 6);
        let out = htts_solve(&market);
        tally.check(&market, &out);
        let core = enumerate_strict_core(&market).unwrap();
        if core.len() > 1 {
            multi += 1;
        }
        match (&out.verdict, core.as_slice()) {
            (Verdict::CoreFound(mu), [only]) if mu == only => found += 1,
            (Verdict::EmptyCore { .. }, []) => empty += 1,
            _ => mismatches.push(seed),
        }
    }
    let elapsed = t.elapsed();
    let ok = mismatches.is_empty() && multi == 0 && elapsed < Duration::from_secs(60);
    report.record(
        2,
        ok,
        format!(
            "{ORACLE_INSTANCES} markets, {found} core found, {empty} empty, \
             mismatching seeds {mismatches:?}, {multi} with |core|>1, {}",
            ms(elapsed)
        ),
    );
}

fn ttc_special_case(report: &mut Report, tally: &mut InvariantTally) {
    let t = Instant::now();
    let mut mismatches = Vec::new();
    for seed in 0..TTC_INSTANCES {
        let market = injective_market(seed, 2, 8);
        assert!(market.is_injective());
        let out = htts_solve(&market);
        tally.check(&market, &out);
        if out.allocation() != Some(&ttc_solve(&market).unwrap()) {
            mismatches.push(seed);
        }
    }
    let elapsed = t.elapsed();
    let ok = mismatches.is_empty() && elapsed < Duration::from_secs(30);
    report.record(
        3,
        ok,
        format!(
            "{TTC_INSTANCES} injective markets, mismatching seeds {mismatches:?}, {}",
            ms(elapsed)
        ),
    );
}

fn ops_ratio(rows: &[ScalingRow]) -> f64 {
    rows.iter()
        .map(|r| {
            let h = r.houses as f64;
            r.ops.total() as f64 / (h * h + h * r.agents as f64)
        })
        .fold(0.0, f64::max)
}

fn complexity(report: &mut Report) {
    let sizes = [1000, 2000, 4000, 8000];
    let random = measure(Family::Random, &sizes, 2.0, 1, 1).unwrap();
    let staircase = measure(Family::Staircase, &sizes, 2.0, 1, 1).unwrap();
    let slope_random = ops_slope(&random).unwrap();
    let slope_staircase = ops_slope(&staircase).unwrap();
    let ratio = ops_ratio(&random).max(ops_ratio(&staircase));

    let market = random_prefix_market(GenParams::new(100_000, 50_000, 1), 16).unwrap();
    let t = Instant::now();
    let big = htts_solve(&market);
    let big_time = t.elapsed();

    let ok = slope_random <= 2.3
        && slope_staircase <= 2.3
        && ratio <= OPS_CONSTANT
        && big_time < Duration::from_secs(10);
    report.record(
        4,
        ok,
        format!(
            "slope random={slope_random:.3} staircase={slope_staircase:.3} (<= 2.3), \
             max ops/(H^2+HI)={ratio:.3} (<= {OPS_CONSTANT}), \
             H=50000 I=100000 solve {} ({} steps, core found={})",
            ms(big_time),
            big.trace.len(),
            big.is_core_found()
        ),
    );
}

/// Mixes sizes and house/agent ratios so that both verdicts and multi-segment
/// solves occur.
fn tiebreak_market(seed: u64) -> Market {
    let mut rng = SplitMix64::new(seed ^ 0x7E7E);
    let agents = 2 + rng.below(60);
    let houses = match seed % 3 {
        0 => agents,
        1 => 1 + rng.below(agents),
        _ => (agents - rng.below(agents.min(4))).max(1),
    };
    random_market(GenParams::new(agents, houses, seed)).unwrap()
}

fn tiebreak_invariance(report: &mut Report) {
    let (mut differing, mut found, mut multi_sink) = (Vec::new(), 0, 0);
    for seed in 0..TIEBREAK_MARKETS {
        let market = tiebreak_market(seed);
        let base = htts_solve(&market);
        let mut first_segments = BTreeSet::new();
        for t in 0..TIEBREAK_SEEDS {
            let out = solve_with_tiebreak(&market, t);
            first_segments.insert(out.trace[0].houses.clone());
            let same = match (&base.verdict, &out.verdict) {
                (Verdict::CoreFound(a), Verdict::CoreFound(b)) => a == b,
                (Verdict::EmptyCore { .. }, Verdict::EmptyCore { .. }) => true,
                _ => false,
            };
            if !same {
                differing.push((seed, t));
            }
        }
        found += usize::from(base.is_core_found());
        multi_sink += usize::from(first_segments.len() > 1);
    }
    report.record(
        5,
        differing.is_empty(),
        format!(
            "{TIEBREAK_MARKETS} markets x {TIEBREAK_SEEDS} seeds, {found} core found, \
             {multi_sink} with seed-dependent first segment, differing {differing:?}"
        ),
    );
}

fn main() {
    let mut report = Report { lines: Vec::new() };
    let mut tally = InvariantTally {
        instances: 0,
        violations: Vec::new(),
    };

    golden_example(&mut report);
    oracle_equivalence(&mut report, &mut tally);
    ttc_special_case(&mut report, &mut tally);
    complexity(&mut report);
    tiebreak_invariance(&mut report);
    let shown: Vec<_> = tally.violations.iter().take(5).collect();
    report.record(
        6,
        tally.violations.is_empty(),
        format!(
            "{} instances, {} violations {shown:?}",
            tally.instances,
            tally.violations.len()
        ),
    );

    let failed: Vec<_> = report
        .lines
        .iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, l)| l)
        .collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", report.lines.len());
    } else {
        println!(
            "acceptance: {} of {} criteria failed",
            failed.len(),
            report.lines.len()
        );
        std::process::exit(1);
    }
}
