use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Address of one random stream: `(master_seed, stream_index)`.
///
/// Backed by ChaCha8, whose 64-bit stream id selects an independent
/// keystream for the same key, so the mapping is a pure function and no
/// stream depends on how many others were drawn before it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStreamSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

/// Bits of `stream_index` reserved for the replication number; the high
/// bits name the estimator lane.
pub(crate) const REPLICATION_BITS: u32 = 40;

impl RngStreamSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngStreamSpec {
            master_seed,
            stream_index,
        }
    }

    /// Stream for replication `rep` of estimator lane `lane`.
    pub fn replication(master_seed: u64, lane: u64, rep: u64) -> Self {
        debug_assert!(rep < 1 << REPLICATION_BITS);
        Self::new(master_seed, (lane << REPLICATION_BITS) | rep)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}
