//! Benchmarks for `htts-core`. The criterion harness lives in `benches/`.

use htts_core::scaling::{agents_for, Family};
use htts_core::{GenParams, Market};

/// Fixed-seed market used by the benchmarks, `ratio` agents per house type.
pub fn bench_market(family: Family, houses: usize, ratio: f64) -> Market {
    let params = GenParams::new(agents_for(houses, ratio), houses, 0x5EED);
    family.generate(params).expect("valid bench parameters")
}
