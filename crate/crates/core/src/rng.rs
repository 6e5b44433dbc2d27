//! Deterministic random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream addressed by
//! `(seed, role, replication, lane)`. The key is derived from the first three
//! coordinates and the lane selects the ChaCha stream id, so particle `i` of
//! replication `r` sees the same numbers no matter how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Distinct roles never share a key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamRole {
    Interacting,
    Iid,
    Cloud,
    Calibration,
    Limit,
}

impl StreamRole {
    fn tag(self) -> u64 {
        match self {
            StreamRole::Interacting => 0x9e6c_63d0_676a_9a99,
            StreamRole::Iid => 0x2f0e_1ba4_5bd6_c0f3,
            StreamRole::Cloud => 0xd1b5_4a32_d192_ed03,
            StreamRole::Calibration => 0x8cb9_2ba7_2f3d_8dd7,
            StreamRole::Limit => 0x5851_f42d_4c95_7f2d,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 256-bit ChaCha key for one (seed, role, replication) triple.
pub fn stream_key(seed: u64, role: StreamRole, replication: u64) -> [u8; 32] {
    let mut state = seed ^ role.tag();
    let mixed = splitmix64(&mut state) ^ replication.wrapping_mul(0xff51_afd7_ed55_8ccd);
    let mut state = mixed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// The stream for one lane (usually a particle or path index).
pub fn stream_rng(seed: u64, role: StreamRole, replication: u64, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(stream_key(seed, role, replication));
    rng.set_stream(lane);
    rng
}

/// One stream per lane `0..count`.
pub fn lane_streams(seed: u64, role: StreamRole, replication: u64, count: usize) -> Vec<ChaCha8Rng> {
    let base = ChaCha8Rng::from_seed(stream_key(seed, role, replication));
    (0..count as u64)
        .map(|lane| {
            let mut rng = base.clone();
            rng.set_stream(lane);
            rng
        })
        .collect()
}
