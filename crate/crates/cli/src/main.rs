//! Command-line surface: exact/series/numeric bit error probability of
//! Viterbi decoding, metric-graph dumps, quantizer design, and the Monte
//! Carlo simulator. Emits JSON or CSV; output is byte-stable given
//! identical flags and seed.

use clap::{Args, Parser, Subcommand};
use exactber::{
    awgn_dmc, check_minimal_usable, closure, design_quantizer, graph_json, integer_metrics,
    parse_generator, pb_series, realize, simulate, solve, trellis, Bsc, ClosureCaps, DmcChannel,
    EncoderFsm, F64Ring, Form, GraphError, MetricGraph, MinimalityCheck, NoisyChannel,
    QuantMethod, RatFnRing, SimConfig, SolveError, StepChannel, TieRule, Trellis,
};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "exactber", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct EncoderArgs {
    /// Generator: octal shorthand ("5,7") or bracketed matrix
    /// ("[[1,0,1+D],[0,1,1+D]]"; entries may be rational like
    /// "(1+D^2)/(1+D+D^2)").
    #[arg(long = "gen")]
    gen: String,
    /// Realization form.
    #[arg(long, default_value = "controller")]
    form: Form,
    /// Expected number of encoder states (minimality check).
    #[arg(long = "expect-states")]
    expect_states: Option<usize>,
    /// Proceed even when the realization has more states than expected.
    #[arg(long = "allow-nonminimal")]
    allow_nonminimal: bool,
    /// Maximum number of metric states explored by the closure.
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Args)]
struct QuantArgs {
    /// Number of quantization levels (2..=16).
    #[arg(long)]
    levels: usize,
    /// Threshold design method.
    #[arg(long, default_value = "uniform")]
    method: QuantMethod,
    /// Scale for the integer branch-metric tables.
    #[arg(long = "metric-scale", default_value_t = 4.0)]
    metric_scale: f64,
}

#[derive(Args)]
struct OutArg {
    /// Write to this file instead of stdout (parent directories created).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form rational bit error probability in p (BSC).
    Exact {
        #[command(flatten)]
        encoder: EncoderArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Truncated power series of the bit error probability in p (BSC).
    Series {
        #[command(flatten)]
        encoder: EncoderArgs,
        /// Highest power of p to report.
        #[arg(long, default_value_t = 10)]
        order: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// CSV of (p, pb) over a crossover-probability grid (numeric backend).
    Curve {
        #[command(flatten)]
        encoder: EncoderArgs,
        /// Single crossover probability.
        #[arg(long, conflicts_with = "p_grid")]
        p: Option<f64>,
        /// Grid "lo:hi:log|lin:N".
        #[arg(long = "p-grid")]
        p_grid: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// JSON dump of the metric-state graph (BSC).
    GraphDump {
        #[command(flatten)]
        encoder: EncoderArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Monte Carlo Viterbi simulation (CSV row).
    Simulate {
        #[command(flatten)]
        encoder: EncoderArgs,
        /// BSC crossover probability (exclusive with --snr-db).
        #[arg(long, conflicts_with = "snr_db")]
        p: Option<f64>,
        /// Quantized-AWGN per-bit SNR in dB (requires --levels).
        #[arg(long = "snr-db")]
        snr_db: Option<f64>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value = "uniform")]
        method: QuantMethod,
        #[arg(long = "metric-scale", default_value_t = 4.0)]
        metric_scale: f64,
        /// Number of information bits to simulate.
        #[arg(long, default_value_t = 1_000_000)]
        bits: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Survivor traceback depth (0 = default 10·(m+1)).
        #[arg(long = "traceback-depth", default_value_t = 0)]
        traceback_depth: usize,
        #[arg(long = "tie-rule", default_value = "fair-random")]
        tie_rule: TieRule,
        /// Send the all-zero information sequence instead of random data.
        #[arg(long = "zero-data")]
        zero_data: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Design a quantizer and print it as JSON.
    Quantize {
        #[command(flatten)]
        quant: QuantArgs,
        /// Per-bit SNR in dB.
        #[arg(long = "snr-db")]
        snr_db: f64,
        /// Code rate used in the SNR conversion.
        #[arg(long, default_value_t = 0.5)]
        rate: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// CSV of (snr_db, pb) for a quantized AWGN channel (numeric backend).
    AwgnCurve {
        #[command(flatten)]
        encoder: EncoderArgs,
        #[command(flatten)]
        quant: QuantArgs,
        /// Grid "lo:hi:log|lin:N" in dB (lin recommended).
        #[arg(long = "snr-grid")]
        snr_grid: String,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Cap(String),
    Solver(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Solver(_) => 4,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Cap(m) | CliError::Solver(m) => m,
        }
    }
}

fn validation(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn from_graph_error(e: GraphError) -> CliError {
    match e {
        GraphError::CapExceeded { .. } | GraphError::MetricOverflow { .. } => {
            CliError::Cap(e.to_string())
        }
        other => CliError::Solver(other.to_string()),
    }
}

fn from_solve_error(e: SolveError) -> CliError {
    match e {
        SolveError::Graph(g) => from_graph_error(g),
        other => CliError::Solver(other.to_string()),
    }
}

fn main() {
    if let Ok(n) = std::env::var("EXACTBER_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}

fn emit(out: &OutArg, text: &str) -> Result<(), CliError> {
    match &out.out {
        None => {
            print!("{text}");
            std::io::stdout().flush().map_err(validation)
        }
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir).map_err(validation)?;
                }
            }
            std::fs::write(path, text).map_err(validation)
        }
    }
}

fn build_fsm(args: &EncoderArgs) -> Result<EncoderFsm, CliError> {
    let g = parse_generator(&args.gen).map_err(validation)?;
    let fsm = realize(&g, args.form).map_err(validation)?;
    if let MinimalityCheck::Warning { actual, expected } =
        check_minimal_usable(&fsm, args.expect_states)
    {
        let msg = format!(
            "realization has {actual} states, expected {expected}; \
             pass --allow-nonminimal to proceed"
        );
        if !args.allow_nonminimal {
            return Err(CliError::Validation(msg));
        }
        eprintln!("warning: {msg}");
    }
    Ok(fsm)
}

fn build_graph(
    args: &EncoderArgs,
    fsm: &EncoderFsm,
    channel: &impl StepChannel,
) -> Result<(Trellis, MetricGraph), CliError> {
    let tr = trellis(fsm);
    let mut caps = ClosureCaps::default_for(tr.c, channel.metric_range());
    if let Some(cap) = args.cap {
        caps = caps.with_max_states(cap);
    }
    let graph = closure(&tr, channel, caps).map_err(from_graph_error)?;
    Ok((tr, graph))
}

/// Full stationary vector for small chains, a size summary otherwise.
fn pinf_json<T: serde::Serialize>(stationary: &[T], m: usize) -> serde_json::Value {
    if m <= 64 {
        serde_json::json!(stationary)
    } else {
        serde_json::json!({ "length": m })
    }
}

fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 4 {
        return Err(CliError::Validation(format!(
            "grid '{text}' is not of the form lo:hi:log|lin:N"
        )));
    }
    let lo: f64 = parts[0].parse().map_err(validation)?;
    let hi: f64 = parts[1].parse().map_err(validation)?;
    let n: usize = parts[3].parse().map_err(validation)?;
    if n < 2 || !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(CliError::Validation(format!("bad grid '{text}'")));
    }
    match parts[2] {
        "lin" => Ok((0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()),
        "log" => {
            if lo <= 0.0 {
                return Err(CliError::Validation("log grid requires lo > 0".into()));
            }
            let (llo, lhi) = (lo.ln(), hi.ln());
            Ok((0..n)
                .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
                .collect())
        }
        other => Err(CliError::Validation(format!(
            "unknown grid spacing '{other}' (log|lin)"
        ))),
    }
}

fn check_dim(m: usize, sigma: usize, limit: usize, backend: &str) -> Result<(), CliError> {
    if m * sigma > limit {
        return Err(CliError::Validation(format!(
            "{backend} backend limited to matrix dimension {limit}, got {} ({m} metric states \
             x {sigma} encoder states); use a lighter backend",
            m * sigma
        )));
    }
    Ok(())
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Exact { encoder, out } => {
            let fsm = build_fsm(&encoder)?;
            let tr = trellis(&fsm);
            let ch = Bsc::new(tr.c);
            let (tr, graph) = build_graph(&encoder, &fsm, &ch)?;
            check_dim(graph.m(), fsm.num_states, 256, "exact")?;
            let sol = solve(&RatFnRing, &graph, &ch, tr.b).map_err(from_solve_error)?;
            let doc = serde_json::json!({
                "M": graph.m(),
                "sigma": fsm.num_states,
                "backend": "exact",
                "pb": sol.pb,
                "p_inf": pinf_json(&sol.stationary, graph.m()),
            });
            emit(&out, &format!("{doc}\n"))
        }
        Cmd::Series { encoder, order, out } => {
            let fsm = build_fsm(&encoder)?;
            let tr = trellis(&fsm);
            let ch = Bsc::new(tr.c);
            let (tr, graph) = build_graph(&encoder, &fsm, &ch)?;
            check_dim(graph.m(), fsm.num_states, 8192, "series")?;
            let s = pb_series(&graph, &ch, tr.b, order).map_err(from_solve_error)?;
            let doc = serde_json::json!({
                "M": graph.m(),
                "sigma": fsm.num_states,
                "backend": "series",
                "pb": s,
            });
            emit(&out, &format!("{doc}\n"))
        }
        Cmd::Curve {
            encoder,
            p,
            p_grid,
            out,
        } => {
            let grid = match (p, p_grid) {
                (Some(p), None) => vec![p],
                (None, Some(g)) => parse_grid(&g)?,
                _ => {
                    return Err(CliError::Validation(
                        "provide exactly one of --p or --p-grid".into(),
                    ))
                }
            };
            if grid.iter().any(|&p| !(0.0..=0.5).contains(&p)) {
                return Err(CliError::Validation(
                    "crossover probabilities must lie in [0, 0.5]".into(),
                ));
            }
            let fsm = build_fsm(&encoder)?;
            let tr = trellis(&fsm);
            let ch = Bsc::new(tr.c);
            let (tr, graph) = build_graph(&encoder, &fsm, &ch)?;
            let mut csv = String::from("p,pb\n");
            for &p in &grid {
                let sol = solve(&F64Ring::new(p), &graph, &ch, tr.b).map_err(from_solve_error)?;
                csv.push_str(&format!("{p},{}\n", sol.pb));
            }
            emit(&out, &csv)
        }
        Cmd::GraphDump { encoder, out } => {
            let fsm = build_fsm(&encoder)?;
            let tr = trellis(&fsm);
            let ch = Bsc::new(tr.c);
            let (_, graph) = build_graph(&encoder, &fsm, &ch)?;
            let doc = graph_json(&graph, &RatFnRing, &ch);
            emit(&out, &format!("{doc}\n"))
        }
        Cmd::Simulate {
            encoder,
            p,
            snr_db,
            levels,
            method,
            metric_scale,
            bits,
            seed,
            traceback_depth,
            tie_rule,
            zero_data,
            out,
        } => {
            let fsm = build_fsm(&encoder)?;
            let rate = fsm.b as f64 / fsm.c as f64;
            let (channel, channel_name, point) = match (p, snr_db) {
                (Some(p), None) => {
                    if !(0.0..=0.5).contains(&p) {
                        return Err(CliError::Validation(
                            "crossover probability must lie in [0, 0.5]".into(),
                        ));
                    }
                    (NoisyChannel::Bsc { p, c: fsm.c }, "bsc".to_string(), p)
                }
                (None, Some(snr)) => {
                    let levels = levels.ok_or_else(|| {
                        CliError::Validation("--snr-db requires --levels".into())
                    })?;
                    let q = design_quantizer(levels, snr, rate, method).map_err(validation)?;
                    let dmc =
                        integer_metrics(&awgn_dmc(&q), metric_scale).map_err(validation)?;
                    let name = format!("awgn-{:?}-{levels}", method).to_lowercase();
                    (NoisyChannel::Dmc(DmcChannel::new(dmc, fsm.c)), name, snr)
                }
                _ => {
                    return Err(CliError::Validation(
                        "provide exactly one of --p or --snr-db".into(),
                    ))
                }
            };
            let mut cfg = SimConfig::new(bits, seed);
            cfg.traceback_depth = traceback_depth;
            cfg.tie_rule = tie_rule;
            cfg.force_zero_data = zero_data;
            let res = simulate(&fsm, &channel, &cfg).map_err(validation)?;
            let csv = format!(
                "encoder,channel,p_or_snr,bits,errors,ber,ci_lo,ci_hi,seed\n\
                 \"{}\",{channel_name},{point},{},{},{},{},{},{seed}\n",
                encoder.gen, res.bits, res.errors, res.ber, res.ci95.0, res.ci95.1
            );
            emit(&out, &csv)
        }
        Cmd::Quantize {
            quant,
            snr_db,
            rate,
            out,
        } => {
            let q = design_quantizer(quant.levels, snr_db, rate, quant.method)
                .map_err(validation)?;
            let doc = serde_json::to_string(&q).map_err(validation)?;
            emit(&out, &format!("{doc}\n"))
        }
        Cmd::AwgnCurve {
            encoder,
            quant,
            snr_grid,
            out,
        } => {
            let grid = parse_grid(&snr_grid)?;
            let fsm = build_fsm(&encoder)?;
            let rate = fsm.b as f64 / fsm.c as f64;
            let mut csv = String::from("snr_db,pb\n");
            for &snr in &grid {
                let q = design_quantizer(quant.levels, snr, rate, quant.method)
                    .map_err(validation)?;
                let dmc =
                    integer_metrics(&awgn_dmc(&q), quant.metric_scale).map_err(validation)?;
                let ch = DmcChannel::new(dmc, fsm.c);
                // Metric tables depend on the SNR, so the closure is rebuilt
                // per grid point.
                let (tr, graph) = build_graph(&encoder, &fsm, &ch)?;
                let sol =
                    solve(&F64Ring::new(0.0), &graph, &ch, tr.b).map_err(from_solve_error)?;
                csv.push_str(&format!("{snr},{}\n", sol.pb));
            }
            emit(&out, &csv)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The solver-failure exit code is documented as 4. No supported input
    /// is known to drive the solver into failure end to end (the numeric
    /// path is damped and the symbolic paths verify their eigenvectors), so
    /// the mapping itself is pinned here.
    #[test]
    fn solver_failure_maps_to_exit_4() {
        let e = from_solve_error(SolveError::DegenerateNormalization);
        assert_eq!(e.exit_code(), 4);
        let e = from_solve_error(SolveError::GuardExhausted(64));
        assert_eq!(e.exit_code(), 4);
    }

    #[test]
    fn cap_error_maps_to_exit_3() {
        let e = from_graph_error(GraphError::CapExceeded {
            cap: 10,
            frontier: 5,
        });
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn grid_parsing() {
        let lin = parse_grid("0:1:lin:5").unwrap();
        assert_eq!(lin, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let log = parse_grid("0.0001:0.1:log:4").unwrap();
        assert_eq!(log.len(), 4);
        assert!((log[0] - 1e-4).abs() < 1e-12 && (log[3] - 0.1).abs() < 1e-12);
        assert!((log[1] / log[0] - log[2] / log[1]).abs() < 1e-9);
        assert!(parse_grid("1:0:lin:5").is_err());
        assert!(parse_grid("0:1:geo:5").is_err());
        assert!(parse_grid("0:1:lin").is_err());
    }
}
