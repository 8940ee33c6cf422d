//! Batch experiment driver: runs (policy x load x seed) sweeps in parallel
//! and writes plot-ready CSV tables plus a text summary.

use std::fs;
use std::path::PathBuf;

use clap::Parser;
use rayon::prelude::*;

use crate::engine::{self, OeOrder, PolicyConfig, SimConfig, SimulationReport};
use crate::net::{load_topology, MultiLayerNet, SpectrumMask};
use crate::traffic::{self, WorkloadConfig};

/// Degraded-provisioning experiment sweeps over an elastic optical network.
#[derive(Parser, Debug, Clone)]
#[command(name = "eonsim", version, about)]
pub struct Args {
    /// Topology file (`nodes N slots B` header plus `link u v km` lines);
    /// defaults to the bundled 24-node USNet.
    #[arg(long)]
    pub topology: Option<PathBuf>,

    /// Override the topology's spectrum slot count per fiber.
    #[arg(long)]
    pub slots: Option<usize>,

    /// Offered loads in Erlang per node: `start:end:step` or a comma list.
    #[arg(long, default_value = "30")]
    pub loads: String,

    /// Comma list of policies to run.
    #[arg(long, default_value = "baseline,OE-MinPDR,OE-MinRH,O-MinPDR,O-MinRH,E-MinPDR,E-MinRH")]
    pub policies: String,

    /// Seeds: `a..b` (inclusive) or a comma list.
    #[arg(long, default_value = "1")]
    pub seeds: String,

    /// Arrival rate per node in 1/hours; an alternative to --loads for a
    /// single load (load = lambda/mu). Rejected when --loads is also set.
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Holding-time rate in 1/hours (mean holding = 1/mu).
    #[arg(long, default_value_t = 10.0)]
    pub mu: f64,

    /// Lightpath establishment threshold for grooming, Gbps.
    #[arg(long, default_value_t = 150.0)]
    pub threshold: f64,

    /// Metrics window, hours.
    #[arg(long, default_value_t = 0.05)]
    pub window: f64,

    /// Arrivals are generated for this many hours per run.
    #[arg(long, default_value_t = 2.0)]
    pub duration: f64,

    /// Output directory for bbp.csv, series.csv and summary.txt.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Stage order for both-layer degradation.
    #[arg(long, default_value = "E-first", value_parser = ["E-first", "O-first"])]
    pub oe_order: String,

    /// Export the generated workload as CSV (single load and seed only).
    #[arg(long)]
    pub trace_out: Option<PathBuf>,

    /// Replay a workload trace instead of generating one (single load and
    /// seed only).
    #[arg(long)]
    pub trace_in: Option<PathBuf>,

    /// Snap bandwidths to this grid instead of continuous uniform.
    #[arg(long)]
    pub bw_step: Option<f64>,
}

fn parse_loads(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("bad load range {spec:?}; want start:end:step"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.parse().map_err(|_| format!("bad number {p:?}")))
            .collect::<Result<_, _>>()?;
        let (start, end, step) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 || end < start {
            return Err(format!("bad load range {spec:?}"));
        }
        let mut out = Vec::new();
        let mut v = start;
        while v <= end + 1e-9 {
            out.push(v);
            v += step;
        }
        Ok(out)
    } else {
        spec.split(',')
            .map(|p| p.trim().parse().map_err(|_| format!("bad load {p:?}")))
            .collect()
    }
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>, String> {
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once("..") {
        let a: u64 = a.parse().map_err(|_| format!("bad seed {a:?}"))?;
        let b: u64 = b.parse().map_err(|_| format!("bad seed {b:?}"))?;
        if b < a {
            return Err(format!("bad seed range {spec:?}"));
        }
        Ok((a..=b).collect())
    } else {
        spec.split(',')
            .map(|p| p.trim().parse().map_err(|_| format!("bad seed {p:?}")))
            .collect()
    }
}

fn base_network(args: &Args) -> Result<MultiLayerNet, String> {
    let text = match &args.topology {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?,
        None => crate::net::usnet_text().to_string(),
    };
    let mut net = load_topology(&text).map_err(|e| e.to_string())?;
    if let Some(slots) = args.slots {
        if slots == 0 {
            return Err("--slots must be positive".into());
        }
        net.slots_per_fiber = slots;
        for f in &mut net.fibers {
            f.spectrum = SpectrumMask::new(slots);
        }
    }
    Ok(net)
}

/// One (load, seed, policy) sweep cell.
struct Cell {
    load: f64,
    seed: u64,
    policy: PolicyConfig,
}

/// Runs a full sweep and writes the result tables. Returns the reports in
/// deterministic (load, policy, seed) order.
pub fn execute(args: &Args) -> Result<Vec<SimulationReport>, String> {
    let net = base_network(args)?;
    let loads = if let Some(lambda) = args.lambda {
        if args.loads != "30" {
            return Err("use either --lambda or --loads, not both".into());
        }
        vec![lambda / args.mu]
    } else {
        parse_loads(&args.loads)?
    };
    if loads.is_empty() {
        return Err("no loads given".into());
    }
    let seeds = parse_seeds(&args.seeds)?;
    if seeds.is_empty() {
        return Err("no seeds given".into());
    }
    let policies: Vec<PolicyConfig> = args
        .policies
        .split(',')
        .map(|p| PolicyConfig::parse(p.trim()))
        .collect::<Result<_, _>>()?;
    let oe_order = match args.oe_order.as_str() {
        "E-first" => OeOrder::ElectricFirst,
        "O-first" => OeOrder::OpticalFirst,
        other => return Err(format!("bad --oe-order {other:?}")),
    };
    let sim_cfg = SimConfig {
        threshold_gbps: args.threshold,
        window_h: args.window,
        oe_order,
        record_trace: false,
        verify_every: 0,
    };

    let replay: Option<Vec<crate::electric::ServiceRequest>> = match &args.trace_in {
        Some(path) => {
            if loads.len() != 1 || seeds.len() != 1 {
                return Err("--trace-in needs exactly one load and one seed".into());
            }
            let text = fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
            Some(traffic::trace_from_csv(&text)?)
        }
        None => None,
    };
    if args.trace_out.is_some() && (loads.len() != 1 || seeds.len() != 1) {
        return Err("--trace-out needs exactly one load and one seed".into());
    }

    let workload_for = |load: f64, seed: u64| -> Vec<crate::electric::ServiceRequest> {
        match &replay {
            Some(reqs) => reqs.clone(),
            None => {
                let mut cfg = WorkloadConfig::new(load * args.mu, args.mu, args.duration, seed);
                cfg.bw_step = args.bw_step;
                traffic::generate(&cfg, net.node_count)
            }
        }
    };

    if let Some(path) = &args.trace_out {
        let reqs = workload_for(loads[0], seeds[0]);
        fs::write(path, traffic::trace_to_csv(&reqs)).map_err(|e| format!("writing {}: {e}", path.display()))?;
    }

    let mut cells = Vec::new();
    for &load in &loads {
        for &policy in &policies {
            for &seed in &seeds {
                cells.push(Cell { load, seed, policy });
            }
        }
    }
    let mut reports: Vec<SimulationReport> = cells
        .par_iter()
        .map(|cell| {
            let arrivals = workload_for(cell.load, cell.seed);
            engine::run(net.clone(), arrivals, cell.policy, &sim_cfg, cell.load, cell.seed)
        })
        .collect();
    reports.sort_by(|a, b| {
        a.load_erlang
            .total_cmp(&b.load_erlang)
            .then_with(|| a.policy.cmp(&b.policy))
            .then(a.seed.cmp(&b.seed))
    });

    fs::create_dir_all(&args.out).map_err(|e| format!("creating {}: {e}", args.out.display()))?;
    write_outputs(args, &net, &loads, &seeds, &reports)?;
    Ok(reports)
}

fn write_outputs(
    args: &Args,
    net: &MultiLayerNet,
    loads: &[f64],
    seeds: &[u64],
    reports: &[SimulationReport],
) -> Result<(), String> {
    let write = |name: &str, content: String| -> Result<(), String> {
        let path = args.out.join(name);
        fs::write(&path, content).map_err(|e| format!("writing {}: {e}", path.display()))
    };

    let mut bbp = String::from("load_erlang,policy,seed,priority,bbp\n");
    for r in reports {
        for p in 1..=5usize {
            bbp.push_str(&format!(
                "{},{},{},{},{}\n",
                r.load_erlang,
                r.policy,
                r.seed,
                p,
                r.bbp_by_priority[p - 1]
            ));
        }
        bbp.push_str(&format!("{},{},{},all,{}\n", r.load_erlang, r.policy, r.seed, r.bbp_all));
    }
    write("bbp.csv", bbp)?;

    let mut series = String::from("time_h,policy,throughput_gbps,bbp_window\n");
    for r in reports {
        for p in &r.series {
            series.push_str(&format!("{},{},{},{}\n", p.t_start, r.policy, p.throughput_gbps, p.bbp));
        }
    }
    write("series.csv", series)?;

    let mut summary = String::new();
    summary.push_str("eonsim sweep summary\n");
    summary.push_str(&format!(
        "topology: {} ({} nodes, {} fibers), slots: {}\n",
        args.topology.as_ref().map_or("bundled usnet".into(), |p| p.display().to_string()),
        net.node_count,
        net.fibers.len(),
        net.slots_per_fiber,
    ));
    summary.push_str(&format!(
        "mu: {}, duration_h: {}, threshold_gbps: {}, window_h: {}, oe_order: {}\n",
        args.mu, args.duration, args.threshold, args.window, args.oe_order,
    ));
    summary.push_str(&format!(
        "rng: {}, bw_step: {}, seeds: {:?}\n\n",
        traffic::GENERATOR,
        args.bw_step.map_or("continuous".into(), |s| s.to_string()),
        seeds,
    ));
    for &load in loads {
        let mut policies: Vec<&str> = reports
            .iter()
            .filter(|r| r.load_erlang == load)
            .map(|r| r.policy.as_str())
            .collect();
        policies.dedup();
        for policy in policies {
            let cell: Vec<&SimulationReport> = reports
                .iter()
                .filter(|r| r.load_erlang == load && r.policy == policy)
                .collect();
            let n = cell.len() as f64;
            let mean = cell.iter().map(|r| r.bbp_all).sum::<f64>() / n;
            let var = cell.iter().map(|r| (r.bbp_all - mean).powi(2)).sum::<f64>() / n.max(1.0);
            let stderr = (var / n).sqrt();
            let blocked: u64 = cell.iter().map(|r| r.blocked).sum();
            let arrivals: u64 = cell.iter().map(|r| r.arrivals).sum();
            summary.push_str(&format!(
                "load={load} policy={policy} bbp_mean={mean:.6e} bbp_stderr={stderr:.6e} blocked={blocked} arrivals={arrivals}\n"
            ));
        }
    }
    write("summary.txt", summary)
}

/// Entry point for the `eonsim` binary. Flag errors exit with the usage
/// status (2, via clap); runtime failures return 1.
pub fn main_from_env() -> i32 {
    let args = Args::parse();
    match execute(&args) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_and_seed_parsing() {
        assert_eq!(parse_loads("26:44:2").unwrap().len(), 10);
        assert_eq!(parse_loads("26:30:2").unwrap(), vec![26.0, 28.0, 30.0]);
        assert_eq!(parse_loads("5,7.5").unwrap(), vec![5.0, 7.5]);
        assert!(parse_loads("5:1:1").is_err());
        assert_eq!(parse_seeds("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_seeds("3,9").unwrap(), vec![3, 9]);
        assert!(parse_seeds("9..3").is_err());
    }
}
