//! Fixtures shared by the benchmarks.

use thue_core::families::{bh_build, shanks_build, BernsteinHasseParams, ShanksParams};
use thue_core::TwistedFamily;

pub fn shanks(n: i64) -> TwistedFamily {
    shanks_build(&ShanksParams::standard(n)).expect("simplest cubic")
}

pub fn bh(d: u64, n: u32, c: i64) -> TwistedFamily {
    bh_build(&BernsteinHasseParams::new(d, n, c).expect("valid cell")).expect("field")
}
