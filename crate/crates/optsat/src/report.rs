//! Aggregation of run outputs into blocking ratio, latency percentiles,
//! energy efficiency, sweep matrices, and feasibility frontiers.

use crate::engine::RunOutput;
use crate::switch::SwitchFabric;

/// Summary statistics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub n_generated: u64,
    pub n_delivered: u64,
    pub n_dropped_no_path: u64,
    pub n_dropped_no_resource: u64,
    /// Percent of generated chunks dropped. Zero for an empty run.
    pub blocking_ratio_pct: f64,
    /// No chunk was generated; blocking ratio is not meaningful.
    pub empty_run: bool,
    pub mean_latency_s: Option<f64>,
    pub p50_latency_s: Option<f64>,
    pub p95_latency_s: Option<f64>,
    pub p99_latency_s: Option<f64>,
    pub mean_tau_tr_s: Option<f64>,
    pub mean_tau_prop_s: Option<f64>,
    pub mean_tau_proc_s: Option<f64>,
    pub mean_tau_switch_s: Option<f64>,
    pub mean_wait_s: Option<f64>,
    pub mean_path_sats: Option<f64>,
    pub mean_candidate_sats: Option<f64>,
    pub bits_received: f64,
    /// Delivered bits per watt of fleet switching power, bits/W.
    pub energy_efficiency_bits_per_w: f64,
}

/// Blocking ratio in percent; 0 with the empty flag when nothing arrived.
pub fn blocking_ratio_pct(n_generated: u64, n_dropped: u64) -> (f64, bool) {
    if n_generated == 0 {
        return (0.0, true);
    }
    (100.0 * n_dropped as f64 / n_generated as f64, false)
}

/// Aggregate energy efficiency: delivered bits over the constellation's
/// total switching power, derated by the blocking ratio.
pub fn energy_efficiency_bits_per_w(
    bits_received: f64,
    n_sats: u32,
    fabric: &SwitchFabric,
    blocking_ratio_pct: f64,
) -> f64 {
    let fleet_power_w = f64::from(n_sats) * fabric.power_w;
    if fleet_power_w <= 0.0 {
        return 0.0;
    }
    bits_received / fleet_power_w * (1.0 - blocking_ratio_pct / 100.0)
}

/// Nearest-rank percentile over a sorted slice; `q` in [0, 1].
fn percentile_sorted(sorted_ns: &[u64], q: f64) -> Option<f64> {
    if sorted_ns.is_empty() {
        return None;
    }
    let rank = ((q * sorted_ns.len() as f64).ceil() as usize).clamp(1, sorted_ns.len());
    Some(sorted_ns[rank - 1] as f64 / 1e9)
}

fn mean_of(sum_ns: u128, n: u64) -> Option<f64> {
    if n == 0 {
        None
    } else {
        Some(sum_ns as f64 / n as f64 / 1e9)
    }
}

/// Summarize one run output against the fabric that produced it.
pub fn summarize(out: &RunOutput, n_sats: u32, fabric: &SwitchFabric) -> SimReport {
    let (br, empty) = blocking_ratio_pct(out.n_generated, out.n_dropped());
    let mut sorted = out.latencies_ns.clone();
    sorted.sort_unstable();
    SimReport {
        n_generated: out.n_generated,
        n_delivered: out.n_delivered,
        n_dropped_no_path: out.n_dropped_no_path,
        n_dropped_no_resource: out.n_dropped_no_resource,
        blocking_ratio_pct: br,
        empty_run: empty,
        mean_latency_s: out.mean_latency_s(),
        p50_latency_s: percentile_sorted(&sorted, 0.50),
        p95_latency_s: percentile_sorted(&sorted, 0.95),
        p99_latency_s: percentile_sorted(&sorted, 0.99),
        mean_tau_tr_s: mean_of(out.sum_tau_tr_ns, out.n_delivered),
        mean_tau_prop_s: mean_of(out.sum_tau_prop_ns, out.n_delivered),
        mean_tau_proc_s: mean_of(out.sum_tau_proc_ns, out.n_delivered),
        mean_tau_switch_s: mean_of(out.sum_tau_switch_ns, out.n_delivered),
        mean_wait_s: mean_of(out.sum_wait_ns, out.n_delivered),
        mean_path_sats: out.mean_path_sats(),
        mean_candidate_sats: out.mean_candidate_sats(),
        bits_received: out.bits_received,
        energy_efficiency_bits_per_w: energy_efficiency_bits_per_w(
            out.bits_received,
            n_sats,
            fabric,
            br,
        ),
    }
}

/// Human-readable key: value block.
pub fn summary_text(report: &SimReport) -> String {
    fn opt_s(v: Option<f64>) -> String {
        v.map(|x| format!("{:.6e}", x)).unwrap_or_else(|| "n/a".into())
    }
    let mut s = String::new();
    s.push_str(&format!("generated: {}\n", report.n_generated));
    s.push_str(&format!("delivered: {}\n", report.n_delivered));
    s.push_str(&format!("dropped_no_path: {}\n", report.n_dropped_no_path));
    s.push_str(&format!(
        "dropped_no_resource: {}\n",
        report.n_dropped_no_resource
    ));
    s.push_str(&format!(
        "blocking_ratio_pct: {:.4}{}\n",
        report.blocking_ratio_pct,
        if report.empty_run { " (empty run)" } else { "" }
    ));
    s.push_str(&format!("mean_latency_s: {}\n", opt_s(report.mean_latency_s)));
    s.push_str(&format!("p50_latency_s: {}\n", opt_s(report.p50_latency_s)));
    s.push_str(&format!("p95_latency_s: {}\n", opt_s(report.p95_latency_s)));
    s.push_str(&format!("p99_latency_s: {}\n", opt_s(report.p99_latency_s)));
    s.push_str(&format!("mean_tau_tr_s: {}\n", opt_s(report.mean_tau_tr_s)));
    s.push_str(&format!("mean_tau_prop_s: {}\n", opt_s(report.mean_tau_prop_s)));
    s.push_str(&format!("mean_tau_proc_s: {}\n", opt_s(report.mean_tau_proc_s)));
    s.push_str(&format!(
        "mean_tau_switch_s: {}\n",
        opt_s(report.mean_tau_switch_s)
    ));
    s.push_str(&format!("mean_wait_s: {}\n", opt_s(report.mean_wait_s)));
    s.push_str(&format!("mean_path_sats: {}\n", opt_s(report.mean_path_sats)));
    s.push_str(&format!(
        "mean_candidate_sats: {}\n",
        opt_s(report.mean_candidate_sats)
    ));
    s.push_str(&format!("bits_received: {:.6e}\n", report.bits_received));
    s.push_str(&format!(
        "energy_efficiency_bits_per_w: {:.6e}\n",
        report.energy_efficiency_bits_per_w
    ));
    s
}

/// One cell of a sweep matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub constellation: String,
    pub fabric: String,
    pub chunk_size_bytes: u64,
    pub seed: u64,
    pub report: SimReport,
}

pub const SWEEP_CSV_HEADER: &str = "constellation,fabric,chunk_size_bytes,seed,n_generated,\
n_delivered,blocking_ratio_pct,mean_latency_s,p95_latency_s,mean_path_sats,\
mean_candidate_sats,energy_efficiency_bits_per_w";

pub fn sweep_csv_line(cell: &SweepCell) -> String {
    fn opt_s(v: Option<f64>) -> String {
        v.map(|x| format!("{:.9e}", x)).unwrap_or_default()
    }
    format!(
        "{},{},{},{},{},{},{:.6},{},{},{},{},{:.9e}",
        cell.constellation,
        cell.fabric,
        cell.chunk_size_bytes,
        cell.seed,
        cell.report.n_generated,
        cell.report.n_delivered,
        cell.report.blocking_ratio_pct,
        opt_s(cell.report.mean_latency_s),
        opt_s(cell.report.p95_latency_s),
        opt_s(cell.report.mean_path_sats),
        opt_s(cell.report.mean_candidate_sats),
        cell.report.energy_efficiency_bits_per_w
    )
}

/// Largest chunk size whose latency percentile stays below the bound, given
/// cells of one (constellation, fabric) pair. Returns None if even the
/// smallest size violates the bound or no cell has a latency sample.
pub fn feasibility_frontier_bytes(
    cells: &[(u64, Option<f64>)],
    latency_bound_s: f64,
) -> Option<u64> {
    let mut best: Option<u64> = None;
    for &(size, lat) in cells {
        if let Some(l) = lat {
            if l <= latency_bound_s && best.map_or(true, |b| size > b) {
                best = Some(size);
            }
        }
    }
    best
}
