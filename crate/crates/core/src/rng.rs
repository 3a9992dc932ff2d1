//! Counter-based random stream split.
//!
//! A run has one master seed. Every consumer (the environment, the schedule,
//! each player) gets its own ChaCha stream keyed by a fixed stream id, so the
//! draws of one consumer never depend on how many draws another one made.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const ENV_STREAM: u64 = 0;
const SCHEDULE_STREAM: u64 = 1;
const PLAYER_STREAM_BASE: u64 = 2;

/// Named stream of a single run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Environment,
    Schedule,
    Player(u32),
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Environment => ENV_STREAM,
            Stream::Schedule => SCHEDULE_STREAM,
            Stream::Player(id) => PLAYER_STREAM_BASE + u64::from(id),
        }
    }
}

pub fn stream(master_seed: u64, which: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(which.id());
    rng
}
