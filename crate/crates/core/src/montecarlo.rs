//! Monte Carlo Viterbi simulator: an independent oracle for the analytic
//! bit error probability.
//!
//! A streaming add-compare-select decoder with finite traceback runs over
//! pseudo-random data sent through a sampled channel (BSC bit flips or a
//! quantized-AWGN discrete channel). Metric ties are resolved uniformly at
//! random among the tied survivors (or deterministically, to demonstrate
//! that the analysis is tied to the fair-coin rule).
//!
//! Determinism: every random stream is keyed by (seed, segment index), and
//! segments are merged in index order, so results are identical across
//! thread counts. Channel noise, tie coins, and data bits use separate
//! streams so changing the tie rule never perturbs the noise realization.

use crate::channel::DmcChannel;
use crate::encoder::EncoderFsm;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("info_bits must be at least 10^4, got {0}")]
    TooFewBits(u64),
    #[error("traceback depth {got} below minimum {min} (5 per memory stage plus 5)")]
    TracebackTooShallow { got: usize, min: usize },
}

/// How equal-metric survivors are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    /// Uniformly random among the tied branches.
    FairRandom,
    /// Always the tied branch from the lowest-numbered predecessor state.
    FixedLowestState,
}

impl std::str::FromStr for TieRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fair-random" => Ok(TieRule::FairRandom),
            "fixed-lowest-state" => Ok(TieRule::FixedLowestState),
            other => Err(format!(
                "unknown tie rule '{other}' (fair-random|fixed-lowest-state)"
            )),
        }
    }
}

/// Channel seen by the simulator: samples a received tuple given the sent
/// tuple and scores candidate tuples with the same integer metric tables
/// the analysis uses.
#[derive(Clone, Debug)]
pub enum NoisyChannel {
    /// Binary symmetric channel on `c`-bit tuples with crossover `p`.
    Bsc { p: f64, c: usize },
    /// Quantized AWGN as a discrete memoryless channel per output bit.
    Dmc(DmcChannel),
}

impl NoisyChannel {
    fn sample(&self, v: u32, rng: &mut ChaCha8Rng) -> usize {
        match self {
            NoisyChannel::Bsc { p, c } => {
                let mut r = v;
                for k in 0..*c {
                    if rng.gen::<f64>() < *p {
                        r ^= 1 << k;
                    }
                }
                r as usize
            }
            NoisyChannel::Dmc(ch) => {
                let l = ch.dmc.levels;
                let mut r = 0usize;
                let mut base = 1usize;
                for k in 0..ch.c {
                    let probs = if (v >> k) & 1 == 0 {
                        &ch.dmc.cond_prob_0
                    } else {
                        &ch.dmc.cond_prob_1
                    };
                    let u = rng.gen::<f64>();
                    let mut acc = 0.0;
                    let mut sym = l - 1;
                    for (j, q) in probs.iter().enumerate() {
                        acc += q;
                        if u < acc {
                            sym = j;
                            break;
                        }
                    }
                    r += sym * base;
                    base *= l;
                }
                r
            }
        }
    }

    fn metric(&self, v: u32, r: usize) -> i64 {
        match self {
            NoisyChannel::Bsc { c, .. } => crate::channel::hamming_metric(v, r as u32, *c),
            NoisyChannel::Dmc(ch) => {
                use crate::channel::StepChannel;
                ch.metric(v, r)
            }
        }
    }
}

/// Simulation parameters. `traceback_depth = 0` and `segments = 0` select
/// the defaults (10·(m+1) steps and 64 segments).
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub info_bits: u64,
    pub seed: u64,
    pub traceback_depth: usize,
    pub tie_rule: TieRule,
    pub segments: usize,
    /// Send the all-zero information sequence instead of random data.
    pub force_zero_data: bool,
}

impl SimConfig {
    pub fn new(info_bits: u64, seed: u64) -> Self {
        SimConfig {
            info_bits,
            seed,
            traceback_depth: 0,
            tie_rule: TieRule::FairRandom,
            segments: 0,
            force_zero_data: false,
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SimResult {
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    /// Conservative 95% interval: the wider of the binomial (Wilson)
    /// interval and a segment-means interval. Decoding errors arrive in
    /// multi-bit events, so the binomial interval alone is too narrow.
    pub ci95: (f64, f64),
    /// Information bits decoded per second of wall time.
    pub throughput: f64,
}

const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(errors: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let phat = errors as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (phat + z2 / (2.0 * nf)) / denom;
    let half = Z95 / denom * (phat * (1.0 - phat) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

struct Segment {
    errors: u64,
    bits: u64,
}

/// Runs the streaming Viterbi decoder and estimates the bit error rate.
pub fn simulate(
    fsm: &EncoderFsm,
    channel: &NoisyChannel,
    cfg: &SimConfig,
) -> Result<SimResult, SimError> {
    if cfg.info_bits < 10_000 {
        return Err(SimError::TooFewBits(cfg.info_bits));
    }
    let min_depth = 5 * (fsm.memory + 1);
    let depth = if cfg.traceback_depth == 0 {
        10 * (fsm.memory + 1)
    } else {
        cfg.traceback_depth
    };
    if depth < min_depth {
        return Err(SimError::TracebackTooShallow {
            got: depth,
            min: min_depth,
        });
    }
    let segments = if cfg.segments == 0 { 64 } else { cfg.segments };
    let total_steps = (cfg.info_bits as usize).div_ceil(fsm.b);
    let base = total_steps / segments;
    let extra = total_steps % segments;

    let start = std::time::Instant::now();
    let stats: Vec<Segment> = (0..segments)
        .into_par_iter()
        .map(|i| {
            let steps = base + usize::from(i < extra);
            run_segment(fsm, channel, cfg, depth, i as u64, steps)
        })
        .collect();
    let elapsed = start.elapsed().as_secs_f64();

    let errors: u64 = stats.iter().map(|s| s.errors).sum();
    let bits: u64 = stats.iter().map(|s| s.bits).sum();
    let ber = errors as f64 / bits as f64;

    let wilson = wilson_interval(errors, bits);
    // Segment-means interval (normal approximation over per-segment BERs).
    let rates: Vec<f64> = stats
        .iter()
        .filter(|s| s.bits > 0)
        .map(|s| s.errors as f64 / s.bits as f64)
        .collect();
    let k = rates.len() as f64;
    let ci95 = if rates.len() >= 2 {
        let mean: f64 = rates.iter().sum::<f64>() / k;
        let var: f64 = rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (k - 1.0);
        let half = Z95 * (var / k).sqrt();
        (
            wilson.0.min((ber - half).max(0.0)),
            wilson.1.max(ber + half),
        )
    } else {
        wilson
    };

    Ok(SimResult {
        bits,
        errors,
        ber,
        ci95,
        throughput: bits as f64 / elapsed.max(1e-12),
    })
}

fn run_segment(
    fsm: &EncoderFsm,
    channel: &NoisyChannel,
    cfg: &SimConfig,
    depth: usize,
    segment: u64,
    steps: usize,
) -> Segment {
    // Three independent streams per segment: noise, tie coins, data.
    let stream = |k: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(segment * 3 + k);
        rng
    };
    let mut noise_rng = stream(0);
    let mut coin_rng = stream(1);
    let mut data_rng = stream(2);

    let num_states = fsm.num_states;
    let b = fsm.b;
    let input_mask = (1u32 << b) - 1;
    let window = 2 * depth;

    let mut metrics = vec![0i64; num_states];
    let mut next_metrics = vec![0i64; num_states];
    // decisions[t][state] = (predecessor, input) chosen at window slot t.
    let mut decisions: std::collections::VecDeque<Vec<(u32, u32)>> =
        std::collections::VecDeque::with_capacity(window);
    let mut sent: std::collections::VecDeque<u32> = std::collections::VecDeque::with_capacity(window);

    let mut enc_state = 0u32;
    let mut errors = 0u64;

    // Traceback from the current best state through the whole window,
    // comparing the oldest `emit` decoded inputs against the sent inputs,
    // then dropping those slots.
    let mut flush = |decisions: &mut std::collections::VecDeque<Vec<(u32, u32)>>,
                     sent: &mut std::collections::VecDeque<u32>,
                     metrics: &[i64],
                     emit: usize| {
        let mut state = metrics
            .iter()
            .enumerate()
            .max_by_key(|(_, &m)| m)
            .map(|(s, _)| s as u32)
            .unwrap();
        let n = decisions.len();
        let mut decoded = vec![0u32; n];
        for t in (0..n).rev() {
            let (prev, input) = decisions[t][state as usize];
            decoded[t] = input;
            state = prev;
        }
        for t in 0..emit {
            errors += u64::from((decoded[t] ^ sent[t]).count_ones());
        }
        for _ in 0..emit {
            decisions.pop_front();
            sent.pop_front();
        }
    };

    for _ in 0..steps {
        let input = if cfg.force_zero_data {
            0
        } else {
            data_rng.gen::<u32>() & input_mask
        };
        let (next_state, output) = fsm.step(enc_state, input);
        enc_state = next_state;
        let r = channel.sample(output, &mut noise_rng);

        let mut slot = vec![(0u32, 0u32); num_states];
        for to in 0..num_states {
            let mut best = i64::MIN;
            let mut choice = (0u32, 0u32);
            let mut ties = 0u32;
            for from in 0..num_states as u32 {
                for u in 0..=input_mask {
                    let (t, v) = fsm.step(from, u);
                    if t as usize != to {
                        continue;
                    }
                    let cand = metrics[from as usize] + channel.metric(v, r);
                    if cand > best {
                        best = cand;
                        choice = (from, u);
                        ties = 1;
                    } else if cand == best {
                        ties += 1;
                        if cfg.tie_rule == TieRule::FairRandom
                            && coin_rng.gen_range(0..ties) == 0
                        {
                            choice = (from, u);
                        }
                    }
                }
            }
            next_metrics[to] = best;
            slot[to] = choice;
        }
        let shift = *next_metrics.iter().max().unwrap();
        for (m, nm) in metrics.iter_mut().zip(&next_metrics) {
            *m = nm - shift;
        }
        decisions.push_back(slot);
        sent.push_back(input);

        if decisions.len() == window {
            flush(&mut decisions, &mut sent, &metrics, depth);
        }
    }
    let remaining = decisions.len();
    flush(&mut decisions, &mut sent, &metrics, remaining);

    Segment {
        errors,
        bits: (steps * b) as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{awgn_dmc, design_quantizer, integer_metrics, Bsc, QuantMethod, StepChannel};
    use crate::encoder::{parse_generator, realize, trellis, Form};
    use crate::metricgraph::{closure, ClosureCaps};
    use crate::scalar::F64Ring;
    use crate::solver::solve;

    fn fsm_for(gen: &str, form: Form) -> EncoderFsm {
        realize(&parse_generator(gen).unwrap(), form).unwrap()
    }

    fn exact_pb(gen: &str, form: Form, p: f64) -> f64 {
        let fsm = fsm_for(gen, form);
        let tr = trellis(&fsm);
        let ch = Bsc::new(tr.c);
        let caps = ClosureCaps::default_for(tr.c, ch.metric_range());
        let graph = closure(&tr, &ch, caps).unwrap();
        solve(&F64Ring::new(p), &graph, &ch, tr.b).unwrap().pb
    }

    /// Half-width of the reported interval converted to one standard error.
    fn sigma_of(res: &SimResult) -> f64 {
        (res.ci95.1 - res.ci95.0) / (2.0 * Z95)
    }

    #[test]
    fn noiseless_channel_decodes_perfectly() {
        let fsm = fsm_for("5,7", Form::Controller);
        let ch = NoisyChannel::Bsc { p: 0.0, c: fsm.c };
        let res = simulate(&fsm, &ch, &SimConfig::new(20_000, 1)).unwrap();
        assert_eq!(res.errors, 0);
        assert_eq!(res.ber, 0.0);
    }

    #[test]
    fn config_validation() {
        let fsm = fsm_for("5,7", Form::Controller);
        let ch = NoisyChannel::Bsc { p: 0.01, c: fsm.c };
        assert!(matches!(
            simulate(&fsm, &ch, &SimConfig::new(100, 1)),
            Err(SimError::TooFewBits(100))
        ));
        let mut cfg = SimConfig::new(20_000, 1);
        cfg.traceback_depth = 3;
        assert!(matches!(
            simulate(&fsm, &ch, &cfg),
            Err(SimError::TracebackTooShallow { .. })
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let fsm = fsm_for("1,3", Form::Controller);
        let ch = NoisyChannel::Bsc { p: 0.05, c: fsm.c };
        let a = simulate(&fsm, &ch, &SimConfig::new(50_000, 42)).unwrap();
        let b = simulate(&fsm, &ch, &SimConfig::new(50_000, 42)).unwrap();
        assert_eq!(a.errors, b.errors);
        assert_eq!(a.ber, b.ber);
        let c = simulate(&fsm, &ch, &SimConfig::new(50_000, 43)).unwrap();
        assert_ne!(a.errors, c.errors);
    }

    #[test]
    fn memory1_estimate_matches_closed_form() {
        let fsm = fsm_for("1,3", Form::Controller);
        let p = 0.04;
        let ch = NoisyChannel::Bsc { p, c: fsm.c };
        let res = simulate(&fsm, &ch, &SimConfig::new(1_000_000, 7)).unwrap();
        let want = exact_pb("1,3", Form::Controller, p);
        assert!(
            (res.ber - want).abs() <= 3.0 * sigma_of(&res),
            "sim {} vs exact {want} (sigma {})",
            res.ber,
            sigma_of(&res)
        );
    }

    #[test]
    fn memory2_estimate_matches_analysis() {
        let fsm = fsm_for("5,7", Form::Controller);
        let p = 0.03;
        let ch = NoisyChannel::Bsc { p, c: fsm.c };
        let res = simulate(&fsm, &ch, &SimConfig::new(2_000_000, 11)).unwrap();
        let want = exact_pb("5,7", Form::Controller, p);
        assert!(
            (res.ber - want).abs() <= 3.0 * sigma_of(&res),
            "sim {} vs exact {want} (sigma {})",
            res.ber,
            sigma_of(&res)
        );
    }

    #[test]
    fn rate23_estimate_matches_analysis() {
        let fsm = fsm_for("[[1,0,1+D],[0,1,1+D]]", Form::Observer);
        let p = 0.05;
        let ch = NoisyChannel::Bsc { p, c: fsm.c };
        let res = simulate(&fsm, &ch, &SimConfig::new(2_000_000, 3)).unwrap();
        let want = exact_pb("[[1,0,1+D],[0,1,1+D]]", Form::Observer, p);
        assert!(
            (res.ber - want).abs() <= 3.0 * sigma_of(&res),
            "sim {} vs exact {want} (sigma {})",
            res.ber,
            sigma_of(&res)
        );
    }

    #[test]
    fn random_data_matches_zero_data() {
        let fsm = fsm_for("5,7", Form::Controller);
        let ch = NoisyChannel::Bsc { p: 0.04, c: fsm.c };
        let mut cfg = SimConfig::new(1_000_000, 5);
        let random = simulate(&fsm, &ch, &cfg).unwrap();
        cfg.force_zero_data = true;
        let zero = simulate(&fsm, &ch, &cfg).unwrap();
        let sigma = (sigma_of(&random).powi(2) + sigma_of(&zero).powi(2)).sqrt();
        assert!(
            (random.ber - zero.ber).abs() <= 3.0 * sigma,
            "random {} vs zero {} (sigma {sigma})",
            random.ber,
            zero.ber
        );
    }

    /// The analysis assumes fair-coin tie resolution; a deterministic rule
    /// gives a different (typically lower) BER. Reported, not asserted as
    /// a strict inequality, since the gap depends on the operating point.
    #[test]
    fn tie_rule_changes_the_estimate() {
        let fsm = fsm_for("1,3", Form::Controller);
        let ch = NoisyChannel::Bsc { p: 0.1, c: fsm.c };
        let mut cfg = SimConfig::new(1_000_000, 9);
        let fair = simulate(&fsm, &ch, &cfg).unwrap();
        cfg.tie_rule = TieRule::FixedLowestState;
        let fixed = simulate(&fsm, &ch, &cfg).unwrap();
        println!(
            "fair-random ber {} vs fixed-lowest-state ber {}",
            fair.ber, fixed.ber
        );
        assert!(fair.ber > 0.0 && fixed.ber > 0.0);
        // The noise stream is shared, so the gap is purely the tie rule.
        assert_ne!(fair.errors, fixed.errors);
    }

    #[test]
    fn quantized_awgn_estimate_matches_analysis() {
        let q = design_quantizer(7, 2.0, 0.5, QuantMethod::Uniform).unwrap();
        let dmc = integer_metrics(&awgn_dmc(&q), 4.0).unwrap();
        let fsm = fsm_for("5,7", Form::Controller);
        let dch = DmcChannel::new(dmc, fsm.c);
        let caps = ClosureCaps::default_for(fsm.c, dch.metric_range());
        let tr = trellis(&fsm);
        let graph = closure(&tr, &dch, caps).unwrap();
        let want = solve(&F64Ring::new(0.0), &graph, &dch, tr.b).unwrap().pb;
        let res = simulate(
            &fsm,
            &NoisyChannel::Dmc(dch),
            &SimConfig::new(2_000_000, 21),
        )
        .unwrap();
        assert!(
            (res.ber - want).abs() <= 4.0 * sigma_of(&res),
            "sim {} vs analysis {want} (sigma {})",
            res.ber,
            sigma_of(&res)
        );
    }

    #[test]
    fn wilson_interval_basics() {
        let (lo, hi) = wilson_interval(0, 1000);
        assert!(lo >= 0.0 && lo < 1e-12);
        assert!(hi > 0.0 && hi < 0.01);
        let (lo, hi) = wilson_interval(500, 1000);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!(hi - lo < 0.07);
        let (lo, hi) = wilson_interval(1000, 1000);
        assert!(lo > 0.99);
        assert!(hi > 1.0 - 1e-12 && hi <= 1.0);
    }
}
