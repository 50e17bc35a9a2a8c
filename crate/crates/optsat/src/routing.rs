//! Path control: K-shortest candidate paths (Yen), first-fit wavelength
//! assignment with end-to-end continuity, and per-link reservation
//! timelines.

use std::collections::{BinaryHeap, HashMap, HashSet};

use thiserror::Error;

use crate::orbit::SPEED_OF_LIGHT_KM_S;
use crate::topology::{EdgeKey, LinkKind, SnapshotGraph};
use crate::traffic::Chunk;

/// Cost offset per edge in fewest-hops mode; larger than any realistic path
/// delay so the ordering is lexicographic (hops, then delay).
const HOP_PENALTY_NS: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoutingMetric {
    /// Minimize total propagation delay.
    MinDelay,
    /// Minimize hop count, tie-broken by propagation delay.
    MinHop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathCandidate {
    /// Node sequence: src OGS, satellites..., dst OGS.
    pub nodes: Vec<usize>,
    /// Edge indices into the snapshot edge list, one per hop.
    pub edge_indices: Vec<usize>,
    pub total_prop_delay_ns: u64,
    pub bottleneck_capacity_bps: f64,
    pub n_satellites: u32,
    pub cost: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockReason {
    /// No candidate path exists (line-of-sight loss).
    NoPath,
    /// No (path, wavelength) admits the chunk in time.
    NoResource,
}

#[derive(Debug, Error, PartialEq)]
pub enum ReservationError {
    #[error("reservation for chunk {0} not found")]
    UnknownReservation(u64),
    #[error("chunk {0} already has an active reservation")]
    DuplicateReservation(u64),
}

/// Propagation delay of one edge in integer nanoseconds.
pub fn edge_prop_delay_ns(length_km: f64) -> u64 {
    (length_km / SPEED_OF_LIGHT_KM_S * 1e9).round() as u64
}

/// Transmission delay of a chunk at the path bottleneck, integer ns.
pub fn transmission_delay_ns(size_bytes: u64, bottleneck_capacity_bps: f64) -> Option<u64> {
    if !(bottleneck_capacity_bps > 0.0) {
        return None;
    }
    Some((8.0 * size_bytes as f64 / bottleneck_capacity_bps * 1e9).round() as u64)
}

struct Dijkstra<'a> {
    adjacency: &'a [Vec<(usize, usize)>],
    edge_cost: &'a [u64],
}

impl<'a> Dijkstra<'a> {
    /// Shortest path avoiding banned nodes/edges; `allowed(from, to, edge)`
    /// filters traversal direction.
    fn run(
        &self,
        allowed: &dyn Fn(usize, usize, usize) -> bool,
        banned_nodes: &[bool],
        banned_edges: &HashSet<usize>,
        src: usize,
        dst: usize,
    ) -> Option<(u64, Vec<usize>, Vec<usize>)> {
        let n = self.adjacency.len();
        let mut dist = vec![u64::MAX; n];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[src] = 0;
        heap.push(std::cmp::Reverse((0u64, src)));
        while let Some(std::cmp::Reverse((d, node))) = heap.pop() {
            if d > dist[node] {
                continue;
            }
            if node == dst {
                break;
            }
            for &(nbr, eidx) in &self.adjacency[node] {
                if banned_nodes[nbr] || banned_edges.contains(&eidx) {
                    continue;
                }
                if !allowed(node, nbr, eidx) {
                    continue;
                }
                let nd = d.saturating_add(self.edge_cost[eidx]);
                if nd < dist[nbr] {
                    dist[nbr] = nd;
                    prev[nbr] = Some((node, eidx));
                    heap.push(std::cmp::Reverse((nd, nbr)));
                }
            }
        }
        if dist[dst] == u64::MAX {
            return None;
        }
        let mut nodes = vec![dst];
        let mut edges = Vec::new();
        let mut cur = dst;
        while let Some((p, e)) = prev[cur] {
            nodes.push(p);
            edges.push(e);
            cur = p;
        }
        nodes.reverse();
        edges.reverse();
        Some((dist[dst], nodes, edges))
    }
}

/// Yen's algorithm over an explicit adjacency structure. Returns up to `k`
/// loop-free paths ordered by cost, each as (cost, nodes, edge indices).
pub fn k_shortest_paths_adj(
    adjacency: &[Vec<(usize, usize)>],
    edge_cost: &[u64],
    allowed: &dyn Fn(usize, usize, usize) -> bool,
    src: usize,
    dst: usize,
    k: usize,
) -> Vec<(u64, Vec<usize>, Vec<usize>)> {
    if k == 0 || src == dst {
        return Vec::new();
    }
    let dij = Dijkstra {
        adjacency,
        edge_cost,
    };
    let no_bans = vec![false; adjacency.len()];
    let mut accepted: Vec<(u64, Vec<usize>, Vec<usize>)> = Vec::new();
    match dij.run(allowed, &no_bans, &HashSet::new(), src, dst) {
        Some(p) => accepted.push(p),
        None => return Vec::new(),
    }
    let mut candidates: Vec<(u64, Vec<usize>, Vec<usize>)> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = accepted.iter().map(|p| p.1.clone()).collect();

    while accepted.len() < k {
        let (_, last_nodes, last_edges) = accepted.last().unwrap().clone();
        for i in 0..last_nodes.len() - 1 {
            let spur = last_nodes[i];
            let root_nodes = &last_nodes[..=i];
            let root_edges = &last_edges[..i];
            let root_cost: u64 = root_edges.iter().map(|&e| edge_cost[e]).sum();

            let mut banned_edges = HashSet::new();
            for (_, nodes, edges) in accepted.iter().chain(candidates.iter()) {
                if nodes.len() > i && nodes[..=i] == *root_nodes {
                    if let Some(&e) = edges.get(i) {
                        banned_edges.insert(e);
                    }
                }
            }
            let mut banned_nodes = vec![false; adjacency.len()];
            for &n in &root_nodes[..i] {
                banned_nodes[n] = true;
            }

            if let Some((cost, nodes, edges)) =
                dij.run(allowed, &banned_nodes, &banned_edges, spur, dst)
            {
                let mut full_nodes = root_nodes[..i].to_vec();
                full_nodes.extend(nodes);
                let mut full_edges = root_edges.to_vec();
                full_edges.extend(edges);
                if seen.insert(full_nodes.clone()) {
                    candidates.push((root_cost + cost, full_nodes, full_edges));
                }
            }
        }
        if candidates.is_empty() {
            break;
        }
        let best = candidates
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (a.0, &a.1).cmp(&(b.0, &b.1)))
            .map(|(i, _)| i)
            .unwrap();
        accepted.push(candidates.swap_remove(best));
    }
    accepted
}

/// K-shortest OGS-to-OGS candidate paths on a snapshot. Interior nodes are
/// satellites; the source is left via its uplink and the destination is
/// entered via its downlink.
pub fn k_shortest_paths(
    snapshot: &SnapshotGraph,
    src_gs: u32,
    dst_gs: u32,
    k: usize,
    metric: RoutingMetric,
) -> Vec<PathCandidate> {
    let src = snapshot.gs_node(src_gs);
    let dst = snapshot.gs_node(dst_gs);
    let n_sats = snapshot.n_sats;
    let edge_cost: Vec<u64> = snapshot
        .edges
        .iter()
        .map(|e| {
            let delay = edge_prop_delay_ns(e.length_km);
            match metric {
                RoutingMetric::MinDelay => delay,
                RoutingMetric::MinHop => delay + HOP_PENALTY_NS,
            }
        })
        .collect();
    let edges = &snapshot.edges;
    let allowed = move |from: usize, to: usize, eidx: usize| -> bool {
        let e = &edges[eidx];
        match e.kind {
            LinkKind::Lisl => from < n_sats && to < n_sats,
            LinkKind::Uplink => from == src && e.a == from && e.b == to,
            LinkKind::Downlink => to == dst && e.a == from && e.b == to,
        }
    };
    k_shortest_paths_adj(&snapshot.adjacency, &edge_cost, &allowed, src, dst, k)
        .into_iter()
        .map(|(cost, nodes, edge_indices)| {
            let total_prop_delay_ns = edge_indices
                .iter()
                .map(|&e| edge_prop_delay_ns(snapshot.edges[e].length_km))
                .sum();
            let bottleneck_capacity_bps = edge_indices
                .iter()
                .map(|&e| snapshot.edges[e].capacity_bps)
                .fold(f64::INFINITY, f64::min);
            PathCandidate {
                n_satellites: (nodes.len() - 2) as u32,
                nodes,
                edge_indices,
                total_prop_delay_ns,
                bottleneck_capacity_bps,
                cost,
            }
        })
        .collect()
}

/// An accepted end-to-end resource claim with its latency decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Reservation {
    pub chunk_id: u64,
    pub edge_keys: Vec<EdgeKey>,
    pub wavelength_idx: u8,
    pub start_ns: u64,
    /// End of the wavelength occupancy interval (start + tau_sw + tau_tr).
    pub hold_end_ns: u64,
    /// Instant the last bit reaches the destination.
    pub completion_ns: u64,
    pub n_satellites: u32,
    pub tau_tr_ns: u64,
    pub tau_prop_ns: u64,
    pub tau_proc_ns: u64,
    pub tau_switch_ns: u64,
}

/// Scheduling context for one admission decision.
#[derive(Debug, Clone, Copy)]
pub struct ScheduleRequest {
    pub now_ns: u64,
    pub max_wait_ns: u64,
    pub n_wavelengths: u8,
    /// Absolute time of the next topology change; the chunk must complete
    /// before it.
    pub boundary_ns: u64,
    pub tau_proc_ns_per_sat: u64,
    pub switch_time_s: f64,
}

/// Per-(edge, wavelength) occupancy timelines plus active reservations.
#[derive(Debug, Default)]
pub struct ReservationLedger {
    timelines: HashMap<(EdgeKey, u8), Vec<(u64, u64)>>,
    active: HashMap<u64, Reservation>,
}

impl ReservationLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    /// Earliest start >= `from` at which [start, start+dur) is free on every
    /// listed edge for the given wavelength.
    fn earliest_start(&self, edge_keys: &[EdgeKey], wl: u8, from: u64, dur_ns: u64) -> u64 {
        let mut busy: Vec<(u64, u64)> = Vec::new();
        for key in edge_keys {
            if let Some(intervals) = self.timelines.get(&(*key, wl)) {
                busy.extend(intervals.iter().filter(|&&(_, e)| e > from));
            }
        }
        busy.sort_unstable();
        let mut start = from;
        for (s, e) in busy {
            if start + dur_ns <= s {
                break;
            }
            start = start.max(e);
        }
        start
    }

    fn insert(&mut self, res: &Reservation) {
        for key in &res.edge_keys {
            let tl = self.timelines.entry((*key, res.wavelength_idx)).or_default();
            let pos = tl.partition_point(|&(s, _)| s < res.start_ns);
            tl.insert(pos, (res.start_ns, res.hold_end_ns));
        }
    }

    /// First-fit admission: scan candidates in order, wavelengths in order;
    /// accept the first (path, wavelength) whose earliest feasible start is
    /// within the wait bound and whose completion precedes the boundary.
    pub fn first_fit_schedule(
        &mut self,
        candidates: &[PathCandidate],
        chunk: &Chunk,
        snapshot: &SnapshotGraph,
        req: &ScheduleRequest,
    ) -> Result<Reservation, BlockReason> {
        if self.active.contains_key(&chunk.chunk_id) {
            return Err(BlockReason::NoResource);
        }
        if candidates.is_empty() {
            return Err(BlockReason::NoPath);
        }
        let mut any_capacity = false;
        for cand in candidates {
            let tau_tr_ns = match transmission_delay_ns(chunk.size_bytes, cand.bottleneck_capacity_bps)
            {
                Some(v) => v,
                None => continue,
            };
            any_capacity = true;
            let tau_proc_ns = u64::from(cand.n_satellites) * req.tau_proc_ns_per_sat;
            let tau_switch_ns =
                (f64::from(cand.n_satellites) * req.switch_time_s * 1e9).round() as u64;
            let latency_after_start = tau_tr_ns + cand.total_prop_delay_ns + tau_proc_ns + tau_switch_ns;
            // The wavelength is unusable while the switches reconfigure.
            // Fabrics along the path reconfigure in parallel, so the
            // occupancy is one reconfiguration plus the transmission, even
            // though the control-plane latency accrues per hop.
            let hold_ns = (req.switch_time_s * 1e9).round() as u64 + tau_tr_ns;
            let edge_keys: Vec<EdgeKey> = cand
                .edge_indices
                .iter()
                .map(|&e| snapshot.edges[e].key())
                .collect();
            // First fit: lowest wavelength index whose earliest feasible
            // start stays within the wait bound.
            let mut pick: Option<(u64, u8)> = None;
            for wl in 0..req.n_wavelengths {
                let start = self.earliest_start(&edge_keys, wl, req.now_ns, hold_ns);
                if start <= req.now_ns + req.max_wait_ns {
                    pick = Some((start, wl));
                    break;
                }
            }
            if let Some((start, wl)) = pick {
                let completion = start + latency_after_start;
                if completion >= req.boundary_ns {
                    continue;
                }
                let res = Reservation {
                    chunk_id: chunk.chunk_id,
                    edge_keys,
                    wavelength_idx: wl,
                    start_ns: start,
                    hold_end_ns: start + hold_ns,
                    completion_ns: completion,
                    n_satellites: cand.n_satellites,
                    tau_tr_ns,
                    tau_prop_ns: cand.total_prop_delay_ns,
                    tau_proc_ns,
                    tau_switch_ns,
                };
                self.insert(&res);
                self.active.insert(chunk.chunk_id, res.clone());
                return Ok(res);
            }
        }

        Err(if any_capacity {
            BlockReason::NoResource
        } else {
            BlockReason::NoPath
        })
    }

    /// Remove a reservation's intervals from all timelines.
    pub fn release(&mut self, chunk_id: u64) -> Result<Reservation, ReservationError> {
        let res = self
            .active
            .remove(&chunk_id)
            .ok_or(ReservationError::UnknownReservation(chunk_id))?;
        for key in &res.edge_keys {
            if let Some(tl) = self.timelines.get_mut(&(*key, res.wavelength_idx)) {
                if let Some(pos) = tl
                    .iter()
                    .position(|&iv| iv == (res.start_ns, res.hold_end_ns))
                {
                    tl.remove(pos);
                }
                if tl.is_empty() {
                    self.timelines.remove(&(*key, res.wavelength_idx));
                }
            }
        }
        Ok(res)
    }

    /// Drop all state at a snapshot boundary; admitted chunks always finish
    /// before the boundary, so nothing active may remain.
    pub fn reset_at_boundary(&mut self) -> usize {
        let dangling = self.active.len();
        self.timelines.clear();
        self.active.clear();
        dangling
    }

    /// Verify that no two intervals overlap on any timeline (test support).
    pub fn check_no_overlap(&self) -> bool {
        self.timelines.values().all(|tl| {
            tl.windows(2).all(|w| w[0].1 <= w[1].0)
        })
    }

    pub fn is_empty(&self) -> bool {
        self.timelines.is_empty() && self.active.is_empty()
    }
}
