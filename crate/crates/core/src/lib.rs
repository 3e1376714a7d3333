//! Broadcast CONGEST simulation of exact and approximate single-source
//! shortest paths via recursive weight scaling.

pub mod approx;
pub mod auxiliary;
pub mod engine;
pub mod experiment;
pub mod error;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod primitives;
pub mod report;
pub mod scaling;
pub mod tree;

pub use error::{Error, Result};

/// Derives an independent seed for a sub-task (splitmix64 finaliser).
pub fn mix_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(0x632b_e59b_d9b4_e019);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
