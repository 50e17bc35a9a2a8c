use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use optsat::channel::{LinkBudgetParams, LinkDirection};
use optsat::config::{parse_feeder_policy, ScenarioConfig};
use optsat::topology::FeederPolicy;
use optsat::engine::{record_csv_line, RECORD_CSV_HEADER};
use optsat::orbit::{
    default_ground_stations, generate_walker_delta, preset, preset_elevation_mask_deg,
    PRESET_NAMES,
};
use optsat::report::{summary_text, sweep_csv_line, SweepCell, SWEEP_CSV_HEADER};
use optsat::routing::RoutingMetric;
use optsat::topology::{build_grid_plus, make_snapshot};
use optsat::{builtin_fabrics, lookup, summarize};

#[derive(Parser)]
#[command(name = "optsat", about = "All-optical LEO constellation simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a TOML config file.
    Run {
        /// Scenario config path.
        config: PathBuf,
        /// Write per-chunk records to this CSV file.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Sweep chunk sizes and fabrics over one or more constellations.
    Sweep(SweepArgs),
    /// Print the link budget stages for a single link.
    Linkbudget {
        /// Slant range, km.
        #[arg(long, default_value_t = 1000.0)]
        range_km: f64,
        /// Elevation angle, degrees (ignored for LISLs).
        #[arg(long, default_value_t = 90.0)]
        elevation_deg: f64,
        /// Link kind: up, down, or lisl.
        #[arg(long, default_value = "down")]
        kind: String,
    },
    /// Export the LISL and feeder edges of one topology snapshot as CSV.
    Topology {
        /// Constellation preset name.
        constellation: String,
        /// Snapshot epoch, s.
        #[arg(long, default_value_t = 0.0)]
        time_s: f64,
        /// Minimum feeder-link elevation, degrees.
        #[arg(long, default_value_t = 10.0)]
        min_elevation_deg: f64,
    },
    /// List builtin constellations and switch fabrics.
    Presets,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated constellation presets.
    #[arg(long, default_value = "telesat,amazon-leo-1,starlink-p1")]
    constellations: String,
    /// Comma-separated fabric names.
    #[arg(long, default_value = "POLATIS,GLSUN,AGILTRON,InP-SOA")]
    fabrics: String,
    /// Comma-separated chunk sizes in MB.
    #[arg(long, default_value = "1,50,100,200,300,400,500,600,700,1000")]
    sizes_mb: String,
    #[arg(long, default_value_t = 0.1)]
    target_load: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 120.0)]
    duration_s: f64,
    #[arg(long, default_value_t = 10)]
    n_snapshots: u32,
    /// Stop each cell after this many chunks (0 = run the full duration).
    #[arg(long, default_value_t = 0)]
    chunk_limit: u64,
    #[arg(long, default_value_t = 5)]
    k_paths: usize,
    /// Routing metric: min-hop or min-delay.
    #[arg(long, default_value = "min-delay")]
    metric: String,
    /// Feeder elevation mask; defaults to each constellation's own mask.
    #[arg(long)]
    min_elevation_deg: Option<f64>,
    /// Feeder policy: all-visible, best-visible, ascending-visible, or
    /// best-ascending.
    #[arg(long, default_value = "ascending-visible")]
    feeder_policy: String,
    /// Override the reference SNR of the link budget, dB.
    #[arg(long)]
    snr_ref_db: Option<f64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(|x| x.trim().to_string())
        .filter(|x| !x.is_empty())
        .collect()
}

fn cmd_run(config: PathBuf, records: Option<PathBuf>) -> Result<(), String> {
    let text = fs::read_to_string(&config)
        .map_err(|e| format!("cannot read {}: {e}", config.display()))?;
    let cfg = ScenarioConfig::from_toml(&text).map_err(|e| e.to_string())?;
    let mut scenario = cfg.resolve().map_err(|e| e.to_string())?;
    if records.is_some() {
        scenario.keep_records = true;
    }
    let out = optsat::run(&scenario).map_err(|e| e.to_string())?;
    let report = summarize(&out, scenario.constellation.total_sats, &scenario.fabric);
    print!("{}", summary_text(&report));
    if let Some(path) = records {
        let mut csv = String::from(RECORD_CSV_HEADER);
        csv.push('\n');
        for r in out.records.as_ref().unwrap() {
            csv.push_str(&record_csv_line(r));
            csv.push('\n');
        }
        fs::write(&path, csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        eprintln!("records written to {}", path.display());
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), String> {
    let metric = match args.metric.as_str() {
        "min-hop" => RoutingMetric::MinHop,
        "min-delay" => RoutingMetric::MinDelay,
        other => return Err(format!("unknown metric '{other}'")),
    };
    let feeder_policy = parse_feeder_policy(&args.feeder_policy)?;
    let mut cells = Vec::new();
    for constellation in parse_list(&args.constellations) {
        for fabric in parse_list(&args.fabrics) {
            for size in parse_list(&args.sizes_mb) {
                let mb: f64 = size
                    .parse()
                    .map_err(|_| format!("bad chunk size '{size}'"))?;
                cells.push((constellation.clone(), fabric.clone(), (mb * 1e6) as u64));
            }
        }
    }
    let rows: Result<Vec<SweepCell>, String> = cells
        .par_iter()
        .map(|(constellation, fabric_name, size)| {
            let spec = preset(constellation)
                .ok_or_else(|| format!("unknown constellation '{constellation}'"))?;
            let fabric = lookup(fabric_name).map_err(|e| e.to_string())?;
            let scenario = optsat::Scenario {
                constellation: spec.clone(),
                ground_stations: default_ground_stations(),
                fabric: fabric.clone(),
                params: {
                    let mut p = LinkBudgetParams::default();
                    if let Some(v) = args.snr_ref_db {
                        p.snr_ref_db = v;
                    }
                    p
                },
                chunk_size_bytes: *size,
                target_load: args.target_load,
                seed: args.seed,
                duration_s: args.duration_s,
                n_snapshots: args.n_snapshots,
                chunk_limit: args.chunk_limit,
                k_paths: args.k_paths,
                max_wait_s: 0.010,
                tau_proc_s: 0.001,
                min_elevation_deg: args
                    .min_elevation_deg
                    .unwrap_or_else(|| preset_elevation_mask_deg(constellation)),
                feeder_policy,
                routing_metric: metric,
                include_insertion_loss: true,
                include_wait_in_latency: false,
                keep_records: false,
            };
            let out = optsat::run(&scenario).map_err(|e| e.to_string())?;
            Ok(SweepCell {
                constellation: constellation.clone(),
                fabric: fabric.name.clone(),
                chunk_size_bytes: *size,
                seed: args.seed,
                report: summarize(&out, spec.total_sats, &fabric),
            })
        })
        .collect();
    let rows = rows?;
    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&sweep_csv_line(row));
        csv.push('\n');
    }
    match args.out {
        Some(path) => {
            fs::write(&path, csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            eprintln!("sweep written to {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_linkbudget(range_km: f64, elevation_deg: f64, kind: &str) -> Result<(), String> {
    let params = LinkBudgetParams::default();
    let bd = match kind {
        "up" => params.received_power_updown(range_km, elevation_deg, LinkDirection::Up),
        "down" => params.received_power_updown(range_km, elevation_deg, LinkDirection::Down),
        "lisl" => params.received_power_lisl(range_km),
        other => return Err(format!("unknown link kind '{other}'")),
    }
    .map_err(|e| e.to_string())?;
    let db = |x: f64| 10.0 * x.log10();
    println!("kind: {kind}");
    println!("range_km: {range_km}");
    println!("fso_path_loss_db: {:.2}", db(bd.l_fso));
    println!("atmospheric_loss_db: {:.2}", db(bd.l_atm));
    println!("pointing_loss_db: {:.2}", db(bd.l_p));
    println!("coupling_loss_db: {:.2}", db(bd.l_fc));
    println!("received_power_dbw: {:.2}", db(bd.p_r_w));
    let n0 = params.noise_power_w();
    println!("noise_power_dbw: {:.2}", db(n0));
    println!("snr_db: {:.2}", db(bd.p_r_w / n0));
    println!("capacity_gbps: {:.3}", params.capacity_of(&bd) / 1e9);
    Ok(())
}

fn cmd_topology(constellation: &str, time_s: f64, min_el: f64) -> Result<(), String> {
    let spec =
        preset(constellation).ok_or_else(|| format!("unknown constellation '{constellation}'"))?;
    let elements = generate_walker_delta(&spec).map_err(|e| e.to_string())?;
    let lisl_pairs = build_grid_plus(&spec).map_err(|e| e.to_string())?;
    let params = LinkBudgetParams::default();
    let snap = make_snapshot(
        &spec,
        &elements,
        &lisl_pairs,
        &default_ground_stations(),
        time_s,
        min_el,
        &params,
        0.0,
        FeederPolicy::AllVisible,
    )
    .map_err(|e| e.to_string())?;
    print!("{}", snap.export_edge_list());
    Ok(())
}

fn cmd_presets() {
    println!("constellations:");
    for name in PRESET_NAMES {
        let spec = preset(name).unwrap();
        println!(
            "  {name}: {} sats, {} planes, {:.2} deg, {:.0} km",
            spec.total_sats, spec.planes, spec.inclination_deg, spec.altitude_km
        );
    }
    println!("fabrics:");
    for f in builtin_fabrics() {
        println!(
            "  {}: {:.3e} s, {} W, {} dB, TRL {}",
            f.name, f.switch_time_s, f.power_w, f.insertion_loss_db, f.trl
        );
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, records } => cmd_run(config, records),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Linkbudget {
            range_km,
            elevation_deg,
            kind,
        } => cmd_linkbudget(range_km, elevation_deg, &kind),
        Command::Topology {
            constellation,
            time_s,
            min_elevation_deg,
        } => cmd_topology(&constellation, time_s, min_elevation_deg),
        Command::Presets => {
            cmd_presets();
            Ok(())
        }
    };
    if let Err(msg) = result {
        eprintln!("error: {msg}");
        std::process::exit(1);
    }
}
