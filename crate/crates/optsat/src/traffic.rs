//! Chunk arrival generation: Poisson arrivals with the rate calibrated per
//! chunk size so the offered load in Erlangs is comparable across sizes,
//! with uniformly random source/destination OGS pairs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TrafficError {
    #[error("target load must be positive, got {0}")]
    NonPositiveLoad(f64),
    #[error("need at least two ground stations, got {0}")]
    TooFewStations(usize),
    #[error("invalid traffic parameter: {0}")]
    Invalid(String),
}

/// One aggregated traffic unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chunk {
    pub chunk_id: u64,
    pub src: u32,
    pub dst: u32,
    pub size_bytes: u64,
    pub arrival_time_ns: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficConfig {
    pub chunk_size_bytes: u64,
    /// Offered load per wavelength, Erlang.
    pub target_load: f64,
    pub seed: u64,
    pub duration_s: f64,
    /// Stop generating after this many chunks (0 = no limit).
    pub chunk_limit: u64,
}

/// Arrival rate keeping the offered load constant across chunk sizes:
/// rate = load * n_wavelengths * C_bottleneck / (8 * size).
pub fn arrival_rate_per_s(
    chunk_size_bytes: u64,
    bottleneck_capacity_bps: f64,
    target_load: f64,
    n_wavelengths: u32,
) -> Result<f64, TrafficError> {
    if !(target_load > 0.0) {
        return Err(TrafficError::NonPositiveLoad(target_load));
    }
    if !(bottleneck_capacity_bps > 0.0) {
        return Err(TrafficError::Invalid("capacity must be positive".into()));
    }
    if chunk_size_bytes == 0 {
        return Err(TrafficError::Invalid("chunk size must be positive".into()));
    }
    Ok(target_load * f64::from(n_wavelengths) * bottleneck_capacity_bps
        / (8.0 * chunk_size_bytes as f64))
}

/// Deterministic, seeded chunk stream.
pub struct ChunkStream {
    rng: ChaCha8Rng,
    exp: Exp<f64>,
    n_stations: u32,
    cfg: TrafficConfig,
    next_time_s: f64,
    emitted: u64,
}

impl ChunkStream {
    pub fn new(cfg: TrafficConfig, n_stations: usize, rate_per_s: f64) -> Result<Self, TrafficError> {
        if n_stations < 2 {
            return Err(TrafficError::TooFewStations(n_stations));
        }
        if !(rate_per_s > 0.0) {
            return Err(TrafficError::Invalid("rate must be positive".into()));
        }
        let exp = Exp::new(rate_per_s)
            .map_err(|e| TrafficError::Invalid(format!("exponential rate: {e}")))?;
        Ok(ChunkStream {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            exp,
            n_stations: n_stations as u32,
            cfg,
            next_time_s: 0.0,
            emitted: 0,
        })
    }
}

impl Iterator for ChunkStream {
    type Item = Chunk;

    fn next(&mut self) -> Option<Chunk> {
        if self.cfg.chunk_limit > 0 && self.emitted >= self.cfg.chunk_limit {
            return None;
        }
        self.next_time_s += self.exp.sample(&mut self.rng);
        if self.next_time_s >= self.cfg.duration_s {
            return None;
        }
        let src = self.rng.gen_range(0..self.n_stations);
        let mut dst = self.rng.gen_range(0..self.n_stations - 1);
        if dst >= src {
            dst += 1;
        }
        let chunk = Chunk {
            chunk_id: self.emitted,
            src,
            dst,
            size_bytes: self.cfg.chunk_size_bytes,
            arrival_time_ns: (self.next_time_s * 1e9).round() as u64,
        };
        self.emitted += 1;
        Some(chunk)
    }
}

/// CSV header for chunk stream export.
pub const CHUNK_CSV_HEADER: &str = "chunk_id,src,dst,size_bytes,arrival_time_ns";

pub fn chunk_csv_line(c: &Chunk) -> String {
    format!(
        "{},{},{},{},{}",
        c.chunk_id, c.src, c.dst, c.size_bytes, c.arrival_time_ns
    )
}
