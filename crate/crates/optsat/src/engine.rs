//! Deterministic discrete-event core: advances simulation time through
//! chunk arrivals, snapshot changes, and transmission completions, and
//! accounts the four-term latency of every delivered chunk.
//!
//! Time is integer nanoseconds throughout so event ordering is exact.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use crate::channel::{ChannelError, LinkBudgetParams, LinkDirection};
use crate::orbit::{
    generate_walker_delta, GroundStation, OrbitError, WalkerDeltaSpec,
};
use crate::routing::{
    k_shortest_paths, BlockReason, PathCandidate, Reservation, ReservationLedger, RoutingMetric,
    ScheduleRequest,
};
use crate::switch::SwitchFabric;
use crate::topology::{
    build_grid_plus, make_snapshot, snapshot_schedule, FeederPolicy, TopologyError,
};
use crate::traffic::{arrival_rate_per_s, Chunk, ChunkStream, TrafficConfig, TrafficError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Traffic(#[from] TrafficError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// Fully resolved inputs of one simulation run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub constellation: WalkerDeltaSpec,
    pub ground_stations: Vec<GroundStation>,
    pub fabric: SwitchFabric,
    pub params: LinkBudgetParams,
    pub chunk_size_bytes: u64,
    /// Offered load per wavelength, Erlang.
    pub target_load: f64,
    pub seed: u64,
    pub duration_s: f64,
    pub n_snapshots: u32,
    /// Stop generating after this many chunks (0 = no limit).
    pub chunk_limit: u64,
    pub k_paths: usize,
    pub max_wait_s: f64,
    pub tau_proc_s: f64,
    pub min_elevation_deg: f64,
    pub feeder_policy: FeederPolicy,
    pub routing_metric: RoutingMetric,
    /// Charge the fabric insertion loss to the per-edge link budgets.
    pub include_insertion_loss: bool,
    /// Add the scheduling wait to the reported total latency.
    pub include_wait_in_latency: bool,
    /// Retain per-chunk records for CSV export.
    pub keep_records: bool,
}

/// Four-term delay decomposition of a delivered chunk, integer ns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatencyBreakdown {
    pub tau_tr_ns: u64,
    pub tau_prop_ns: u64,
    pub tau_proc_ns: u64,
    pub tau_switch_ns: u64,
    pub total_ns: u64,
}

/// Latency decomposition of an accepted reservation. The scheduling wait is
/// tracked separately and excluded from the total unless requested.
pub fn latency_of(res: &Reservation, include_wait: bool, wait_ns: u64) -> LatencyBreakdown {
    let base = res.tau_tr_ns + res.tau_prop_ns + res.tau_proc_ns + res.tau_switch_ns;
    LatencyBreakdown {
        tau_tr_ns: res.tau_tr_ns,
        tau_prop_ns: res.tau_prop_ns,
        tau_proc_ns: res.tau_proc_ns,
        tau_switch_ns: res.tau_switch_ns,
        total_ns: if include_wait { base + wait_ns } else { base },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Delivered,
    DroppedNoPath,
    DroppedNoResource,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Delivered => "delivered",
            Verdict::DroppedNoPath => "dropped_no_path",
            Verdict::DroppedNoResource => "dropped_no_resource",
        }
    }
}

/// Per-chunk outcome record for CSV export.
#[derive(Debug, Clone, PartialEq)]
pub struct ChunkRecord {
    pub chunk_id: u64,
    pub src: u32,
    pub dst: u32,
    pub size_bytes: u64,
    pub arrival_ns: u64,
    pub start_ns: u64,
    pub verdict: Verdict,
    pub wavelength: i32,
    pub n_sats: u32,
    pub tau_tr_ns: u64,
    pub tau_prop_ns: u64,
    pub tau_proc_ns: u64,
    pub tau_switch_ns: u64,
    pub wait_ns: u64,
    pub total_latency_ns: u64,
}

pub const RECORD_CSV_HEADER: &str = "chunk_id,src,dst,size_bytes,arrival_ns,start_ns,verdict,\
wavelength,n_sats,tau_tr_ns,tau_prop_ns,tau_proc_ns,tau_switch_ns,wait_ns,total_latency_ns";

pub fn record_csv_line(r: &ChunkRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.chunk_id,
        r.src,
        r.dst,
        r.size_bytes,
        r.arrival_ns,
        r.start_ns,
        r.verdict.label(),
        r.wavelength,
        r.n_sats,
        r.tau_tr_ns,
        r.tau_prop_ns,
        r.tau_proc_ns,
        r.tau_switch_ns,
        r.wait_ns,
        r.total_latency_ns
    )
}

/// Aggregated outputs of one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub n_generated: u64,
    pub n_delivered: u64,
    pub n_dropped_no_path: u64,
    pub n_dropped_no_resource: u64,
    pub bits_received: f64,
    /// Total latency of every delivered chunk, ns.
    pub latencies_ns: Vec<u64>,
    pub sum_tau_tr_ns: u128,
    pub sum_tau_prop_ns: u128,
    pub sum_tau_proc_ns: u128,
    pub sum_tau_switch_ns: u128,
    pub sum_wait_ns: u128,
    pub sum_path_sats: u64,
    /// Satellite counts over every candidate path offered to a chunk.
    pub sum_candidate_sats: u64,
    pub n_candidate_paths: u64,
    /// Reference bottleneck capacity used for load calibration, bits/s.
    pub reference_capacity_bps: f64,
    pub records: Option<Vec<ChunkRecord>>,
}

impl RunOutput {
    pub fn n_dropped(&self) -> u64 {
        self.n_dropped_no_path + self.n_dropped_no_resource
    }

    pub fn mean_latency_s(&self) -> Option<f64> {
        if self.latencies_ns.is_empty() {
            return None;
        }
        let sum: u128 = self.latencies_ns.iter().map(|&v| u128::from(v)).sum();
        Some(sum as f64 / self.latencies_ns.len() as f64 / 1e9)
    }

    pub fn mean_path_sats(&self) -> Option<f64> {
        if self.n_delivered == 0 {
            return None;
        }
        Some(self.sum_path_sats as f64 / self.n_delivered as f64)
    }

    /// Mean satellite count over all candidate paths computed for chunks.
    pub fn mean_candidate_sats(&self) -> Option<f64> {
        if self.n_candidate_paths == 0 {
            return None;
        }
        Some(self.sum_candidate_sats as f64 / self.n_candidate_paths as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum EventKind {
    SnapshotChange(usize),
    Arrival(Chunk),
    Complete(u64),
}

/// Reference capacity for load calibration: the zenith downlink at the
/// constellation altitude.
pub fn reference_capacity_bps(params: &LinkBudgetParams, altitude_km: f64) -> Result<f64, SimError> {
    let bd = params.received_power_updown(altitude_km, 90.0, LinkDirection::Down)?;
    Ok(params.capacity_of(&bd))
}

/// Execute one scenario to completion.
pub fn run(scenario: &Scenario) -> Result<RunOutput, SimError> {
    scenario.constellation.validate()?;
    scenario.params.validate()?;
    if scenario.ground_stations.len() < 2 {
        return Err(SimError::Invalid(
            "need at least two ground stations".into(),
        ));
    }
    for gs in &scenario.ground_stations {
        gs.validate()?;
    }
    if !(scenario.duration_s > 0.0) {
        return Err(SimError::Invalid("duration must be positive".into()));
    }
    if scenario.k_paths == 0 {
        return Err(SimError::Invalid("k_paths must be >= 1".into()));
    }

    let elements = generate_walker_delta(&scenario.constellation)?;
    let lisl_pairs = build_grid_plus(&scenario.constellation)?;
    let snapshot_times = snapshot_schedule(scenario.duration_s, scenario.n_snapshots)?;
    let duration_ns = (scenario.duration_s * 1e9).round() as u64;
    let insertion_db = if scenario.include_insertion_loss {
        scenario.fabric.insertion_loss_db
    } else {
        0.0
    };

    let reference_capacity =
        reference_capacity_bps(&scenario.params, scenario.constellation.altitude_km)?;
    let rate = arrival_rate_per_s(
        scenario.chunk_size_bytes,
        reference_capacity,
        scenario.target_load,
        scenario.params.n_ch,
    )?;
    let mut stream = ChunkStream::new(
        TrafficConfig {
            chunk_size_bytes: scenario.chunk_size_bytes,
            target_load: scenario.target_load,
            seed: scenario.seed,
            duration_s: scenario.duration_s,
            chunk_limit: scenario.chunk_limit,
        },
        scenario.ground_stations.len(),
        rate,
    )?;

    let tau_proc_ns = (scenario.tau_proc_s * 1e9).round() as u64;
    let max_wait_ns = (scenario.max_wait_s * 1e9).round() as u64;
    let n_wavelengths = scenario.params.n_ch.min(255) as u8;

    let mut heap: BinaryHeap<Reverse<(u64, u64, usize)>> = BinaryHeap::new();
    let mut payloads: Vec<EventKind> = Vec::new();
    let mut seq = 0u64;
    let push = |heap: &mut BinaryHeap<Reverse<(u64, u64, usize)>>,
                    payloads: &mut Vec<EventKind>,
                    seq: &mut u64,
                    t: u64,
                    kind: EventKind| {
        payloads.push(kind);
        heap.push(Reverse((t, *seq, payloads.len() - 1)));
        *seq += 1;
    };

    // Snapshot boundaries first so topology applies before same-time arrivals.
    for (i, t) in snapshot_times.iter().enumerate() {
        push(
            &mut heap,
            &mut payloads,
            &mut seq,
            (t * 1e9).round() as u64,
            EventKind::SnapshotChange(i),
        );
    }
    if let Some(c) = stream.next() {
        push(
            &mut heap,
            &mut payloads,
            &mut seq,
            c.arrival_time_ns,
            EventKind::Arrival(c),
        );
    }

    let mut snapshot = None;
    let mut next_boundary_ns = duration_ns;
    let mut ksp_cache: HashMap<(u32, u32), Vec<PathCandidate>> = HashMap::new();
    let mut ledger = ReservationLedger::new();
    let mut pending: HashMap<u64, (Chunk, u64)> = HashMap::new(); // chunk_id -> (chunk, wait)

    let mut out = RunOutput {
        n_generated: 0,
        n_delivered: 0,
        n_dropped_no_path: 0,
        n_dropped_no_resource: 0,
        bits_received: 0.0,
        latencies_ns: Vec::new(),
        sum_tau_tr_ns: 0,
        sum_tau_prop_ns: 0,
        sum_tau_proc_ns: 0,
        sum_tau_switch_ns: 0,
        sum_wait_ns: 0,
        sum_path_sats: 0,
        sum_candidate_sats: 0,
        n_candidate_paths: 0,
        reference_capacity_bps: reference_capacity,
        records: if scenario.keep_records {
            Some(Vec::new())
        } else {
            None
        },
    };

    let mut last_time = 0u64;
    while let Some(Reverse((time, _, idx))) = heap.pop() {
        debug_assert!(time >= last_time, "event time went backwards");
        last_time = time;
        match payloads[idx].clone() {
            EventKind::SnapshotChange(i) => {
                let dangling = ledger.reset_at_boundary();
                debug_assert_eq!(dangling, 0, "chunks in flight across a boundary");
                ksp_cache.clear();
                snapshot = Some(make_snapshot(
                    &scenario.constellation,
                    &elements,
                    &lisl_pairs,
                    &scenario.ground_stations,
                    snapshot_times[i],
                    scenario.min_elevation_deg,
                    &scenario.params,
                    insertion_db,
                    scenario.feeder_policy,
                )?);
                next_boundary_ns = snapshot_times
                    .get(i + 1)
                    .map(|t| (t * 1e9).round() as u64)
                    .unwrap_or(duration_ns);
            }
            EventKind::Arrival(chunk) => {
                out.n_generated += 1;
                // Schedule the next arrival.
                if let Some(c) = stream.next() {
                    push(
                        &mut heap,
                        &mut payloads,
                        &mut seq,
                        c.arrival_time_ns,
                        EventKind::Arrival(c),
                    );
                }
                let snap = snapshot.as_ref().expect("snapshot exists before arrivals");
                let candidates = ksp_cache.entry((chunk.src, chunk.dst)).or_insert_with(|| {
                    k_shortest_paths(
                        snap,
                        chunk.src,
                        chunk.dst,
                        scenario.k_paths,
                        scenario.routing_metric,
                    )
                });
                for c in candidates.iter() {
                    out.sum_candidate_sats += u64::from(c.n_satellites);
                    out.n_candidate_paths += 1;
                }
                let req = ScheduleRequest {
                    now_ns: time,
                    max_wait_ns,
                    n_wavelengths,
                    boundary_ns: next_boundary_ns,
                    tau_proc_ns_per_sat: tau_proc_ns,
                    switch_time_s: scenario.fabric.switch_time_s,
                };
                match ledger.first_fit_schedule(candidates, &chunk, snap, &req) {
                    Ok(res) => {
                        let wait = res.start_ns - chunk.arrival_time_ns;
                        pending.insert(chunk.chunk_id, (chunk, wait));
                        push(
                            &mut heap,
                            &mut payloads,
                            &mut seq,
                            res.completion_ns,
                            EventKind::Complete(chunk.chunk_id),
                        );
                    }
                    Err(reason) => {
                        let verdict = match reason {
                            BlockReason::NoPath => {
                                out.n_dropped_no_path += 1;
                                Verdict::DroppedNoPath
                            }
                            BlockReason::NoResource => {
                                out.n_dropped_no_resource += 1;
                                Verdict::DroppedNoResource
                            }
                        };
                        if let Some(records) = out.records.as_mut() {
                            records.push(ChunkRecord {
                                chunk_id: chunk.chunk_id,
                                src: chunk.src,
                                dst: chunk.dst,
                                size_bytes: chunk.size_bytes,
                                arrival_ns: chunk.arrival_time_ns,
                                start_ns: 0,
                                verdict,
                                wavelength: -1,
                                n_sats: 0,
                                tau_tr_ns: 0,
                                tau_prop_ns: 0,
                                tau_proc_ns: 0,
                                tau_switch_ns: 0,
                                wait_ns: 0,
                                total_latency_ns: 0,
                            });
                        }
                    }
                }
            }
            EventKind::Complete(chunk_id) => {
                let res = ledger.release(chunk_id).expect("active reservation");
                let (chunk, wait) = pending.remove(&chunk_id).expect("pending chunk");
                let breakdown = latency_of(&res, scenario.include_wait_in_latency, wait);
                out.n_delivered += 1;
                out.bits_received += 8.0 * chunk.size_bytes as f64;
                out.latencies_ns.push(breakdown.total_ns);
                out.sum_tau_tr_ns += u128::from(breakdown.tau_tr_ns);
                out.sum_tau_prop_ns += u128::from(breakdown.tau_prop_ns);
                out.sum_tau_proc_ns += u128::from(breakdown.tau_proc_ns);
                out.sum_tau_switch_ns += u128::from(breakdown.tau_switch_ns);
                out.sum_wait_ns += u128::from(wait);
                out.sum_path_sats += u64::from(res.n_satellites);
                if let Some(records) = out.records.as_mut() {
                    records.push(ChunkRecord {
                        chunk_id,
                        src: chunk.src,
                        dst: chunk.dst,
                        size_bytes: chunk.size_bytes,
                        arrival_ns: chunk.arrival_time_ns,
                        start_ns: res.start_ns,
                        verdict: Verdict::Delivered,
                        wavelength: i32::from(res.wavelength_idx),
                        n_sats: res.n_satellites,
                        tau_tr_ns: breakdown.tau_tr_ns,
                        tau_prop_ns: breakdown.tau_prop_ns,
                        tau_proc_ns: breakdown.tau_proc_ns,
                        tau_switch_ns: breakdown.tau_switch_ns,
                        wait_ns: wait,
                        total_latency_ns: breakdown.total_ns,
                    });
                }
            }
        }
    }

    debug_assert!(pending.is_empty());
    debug_assert_eq!(
        out.n_generated,
        out.n_delivered + out.n_dropped(),
        "chunk conservation"
    );
    if let Some(records) = out.records.as_mut() {
        records.sort_by_key(|r| r.chunk_id);
    }
    Ok(out)
}
