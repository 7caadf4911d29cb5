use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::brute::tour_time;
use crate::encoding::{build_encoding, build_routing_chart, operator_count, BlochEncoding, EncodingConfig, OpId};
use crate::error::{Error, Result};
use crate::noise::{mix_seed, NoiseConfig, NoiseMode, NoiseStream};
use crate::qubit::PhaseConvention;
use crate::superposition::{
    measure_state, run_protocol, DecodeReport, DecodeResult, Decoder, ParamMode, ProtocolParams, ProtocolRun,
    TomographyConfig,
};
use crate::tsp::{approximation_ratio, exact_solve, CostMatrix, OracleMethod, Tour};

use super::selection::{select_varied_operators, SelectionStrategy};
use super::spsa::{spsa_minimize, Best, Evaluation, SpsaConfig};

/// Perturbation size used by the solver; the decoded cost is piecewise
/// constant, so probes must be wide enough to cross region boundaries.
pub const DEFAULT_PERTURBATION: f64 = 0.7;

/// Starting point of restarts after the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// Every restart starts from nominal weights.
    Nominal,
    /// Restart 0 is nominal; later restarts draw uniformly inside the bounds.
    #[default]
    Random,
}

/// Hyper-parameters of a solve, as read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyper {
    pub iterations: usize,
    pub a: f64,
    pub c: f64,
    pub alpha_exp: f64,
    pub gamma_exp: f64,
    pub stability: Option<f64>,
    pub restarts: usize,
    pub seed: u64,
    /// `None` varies `n` operators.
    pub varied_count: Option<usize>,
    pub strategy: SelectionStrategy,
    pub mode: ParamMode,
    /// 1-based.
    pub start_city: usize,
    /// Restart `r` starts from city `start_city + r` (cyclically).
    pub rotate_start: bool,
    pub init: InitMode,
    pub noise_mode: NoiseMode,
    pub noise_level: f64,
    pub noise_seed: u64,
    /// `None` uses exact expectation values.
    pub tomography_epsilon: Option<f64>,
    pub headroom: f64,
    pub start_azimuth: f64,
    pub convention: PhaseConvention,
    pub oracle: OracleMethod,
}

impl Default for Hyper {
    fn default() -> Self {
        let spsa = SpsaConfig::default();
        let enc = EncodingConfig::default();
        Self {
            iterations: spsa.iterations,
            a: spsa.a,
            c: DEFAULT_PERTURBATION,
            alpha_exp: spsa.alpha_exp,
            gamma_exp: spsa.gamma_exp,
            stability: spsa.stability,
            restarts: 3,
            seed: 0,
            varied_count: None,
            strategy: SelectionStrategy::Spread,
            mode: ParamMode::Alpha,
            start_city: 1,
            rotate_start: true,
            init: InitMode::default(),
            noise_mode: NoiseMode::Off,
            noise_level: 0.0,
            noise_seed: 0,
            tomography_epsilon: None,
            headroom: enc.headroom,
            start_azimuth: enc.start_azimuth,
            convention: enc.convention,
            oracle: OracleMethod::HeldKarp,
        }
    }
}

impl Hyper {
    pub fn from_json(text: &str) -> Result<Self> {
        let h: Hyper = serde_json::from_str(text)?;
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        self.spsa(0).validate()?;
        self.noise().validate()?;
        self.tomography()?;
        if self.restarts == 0 {
            return Err(Error::InvalidParams("at least one restart is required".into()));
        }
        if self.start_city == 0 {
            return Err(Error::InvalidParams("start city labels start at 1".into()));
        }
        Ok(())
    }

    pub fn spsa(&self, restart: usize) -> SpsaConfig {
        SpsaConfig {
            iterations: self.iterations,
            a: self.a,
            c: self.c,
            alpha_exp: self.alpha_exp,
            gamma_exp: self.gamma_exp,
            stability: self.stability,
            seed: mix_seed(self.seed, restart as u64),
        }
    }

    pub fn noise(&self) -> NoiseConfig {
        NoiseConfig {
            max_relative_error: self.noise_level,
            mode: self.noise_mode,
            seed: self.noise_seed,
        }
    }

    pub fn tomography(&self) -> Result<TomographyConfig> {
        match self.tomography_epsilon {
            None => Ok(TomographyConfig::exact()),
            Some(e) => TomographyConfig::with_epsilon(e),
        }
    }

    /// 0-based start city of restart `r` on an `n`-city instance.
    pub fn start_for(&self, restart: usize, n: usize) -> usize {
        let base = (self.start_city - 1) % n;
        if self.rotate_start {
            (base + restart) % n
        } else {
            base
        }
    }

    pub fn encoding(&self, start_city: usize) -> EncodingConfig {
        EncodingConfig {
            start_city,
            start_azimuth: self.start_azimuth,
            headroom: self.headroom,
            convention: self.convention,
        }
    }
}

/// Result of one decoded evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalInfo {
    pub d: f64,
    pub tour: Tour,
    /// Key of the random streams that produced this result.
    pub evaluation: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub restart: usize,
    pub iteration: usize,
    pub d: f64,
    /// `None` when the evaluation failed.
    pub t: Option<f64>,
    pub r: f64,
    pub best_d: f64,
    pub params_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestRecord {
    pub restart: usize,
    pub start_city: usize,
    pub evaluation: u64,
    pub params: Vec<f64>,
    pub varied: Vec<String>,
    pub d: f64,
    pub cycle: Tour,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationTrace {
    pub records: Vec<TraceRecord>,
    pub best: BestRecord,
}

impl OptimizationTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("restart,iteration,D,T,R,best_D,params_hash\n");
        for r in &self.records {
            let t = r.t.map_or(String::new(), |t| t.to_string());
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.restart, r.iteration, r.d, t, r.r, r.best_d, r.params_hash
            );
        }
        out
    }
}

/// First 16 hex digits of the SHA-256 of the little-endian parameter bytes.
pub fn params_hash(x: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in x {
        h.update(v.to_le_bytes());
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Everything needed to evaluate the objective for one restart.
pub struct Evaluator<'a> {
    pub m: &'a CostMatrix,
    pub enc: BlochEncoding,
    pub chart: crate::encoding::RoutingChart,
    pub decoder: Decoder,
    pub params: ProtocolParams,
    pub noise: NoiseConfig,
    pub tomography: TomographyConfig,
    pub run: u64,
    pub seed: u64,
    pub penalty: f64,
}

impl<'a> Evaluator<'a> {
    pub fn new(m: &'a CostMatrix, hyper: &Hyper, restart: usize) -> Result<Self> {
        let n = m.n();
        let start = hyper.start_for(restart, n);
        let enc = build_encoding(m, &hyper.encoding(start))?;
        let chart = build_routing_chart(&enc);
        let count = hyper.varied_count.unwrap_or(n);
        let varied = select_varied_operators(
            &chart,
            count,
            hyper.strategy,
            mix_seed(hyper.seed ^ 0x5E1E_C7ED, restart as u64),
        )?;
        let params = ProtocolParams::nominal(&chart, &varied, hyper.mode)?;
        let decoder = Decoder::new(&enc)?;
        Ok(Self {
            m,
            enc,
            chart,
            decoder,
            params,
            noise: hyper.noise(),
            tomography: hyper.tomography()?,
            run: restart as u64,
            seed: hyper.seed,
            penalty: 10.0 * m.max_tour_cost(),
        })
    }

    /// Protocol run, decode and objective at `x`; `evaluation` keys the
    /// per-evaluation random streams.
    pub fn evaluate_full(&self, x: &[f64], evaluation: u64) -> Result<(ProtocolRun, DecodeResult)> {
        let p = self.params.with_vector(x)?;
        let mut stream = NoiseStream::new(&self.noise, operator_count(self.m.n()), self.run, evaluation);
        let run = run_protocol(&self.enc, &self.chart, &p, &mut stream)?;
        let tomo_seed = mix_seed(mix_seed(self.seed ^ 0x7040_6EA9, self.run), evaluation);
        let g = measure_state(&run.penultimate().state, &self.tomography, tomo_seed);
        let decode = self.decoder.decode(&g, self.m)?;
        Ok((run, decode))
    }

    pub fn evaluate(&self, x: &[f64], evaluation: u64) -> Evaluation<EvalInfo> {
        match self.evaluate_full(x, evaluation) {
            Ok((_, d)) => Evaluation {
                value: d.d_value,
                info: Some(EvalInfo {
                    d: d.d_value,
                    tour: d.ranked_cycle,
                    evaluation,
                }),
            },
            Err(_) => Evaluation {
                value: self.penalty,
                info: None,
            },
        }
    }

    pub fn initial_point(&self, hyper: &Hyper, restart: usize) -> Vec<f64> {
        let x0 = self.params.to_vector();
        if restart == 0 || hyper.init == InitMode::Nominal {
            return x0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(hyper.seed ^ 0x1A17, restart as u64));
        self.params
            .bounds()
            .iter()
            .map(|b| b.clip(rng.random_range(b.lo..b.hi)))
            .collect()
    }
}

#[derive(Debug, Clone)]
struct RestartOutcome {
    restart: usize,
    start_city: usize,
    varied: Vec<OpId>,
    best: Option<Best<EvalInfo>>,
    records: Vec<TraceRecord>,
    scale: f64,
}

fn run_restart(m: &CostMatrix, hyper: &Hyper, restart: usize, d_min: f64) -> Result<RestartOutcome> {
    let ev = Evaluator::new(m, hyper, restart)?;
    let x0 = ev.initial_point(hyper, restart);
    let bounds = ev.params.bounds();
    let mut counter = 0u64;
    let result = spsa_minimize(
        |x| {
            counter += 1;
            ev.evaluate(x, counter)
        },
        &x0,
        &bounds,
        &hyper.spsa(restart),
    )?;
    let ratio = |d: f64| approximation_ratio(d_min, d).unwrap_or(0.0);
    let records = result
        .steps
        .iter()
        .map(|s| TraceRecord {
            restart,
            iteration: s.iteration,
            d: s.eval.value,
            t: s.eval.info.as_ref().map(|i| tour_time(&ev.enc, &i.tour)),
            r: if s.eval.info.is_some() { ratio(s.eval.value) } else { 0.0 },
            best_d: s.best_value,
            params_hash: params_hash(&s.x),
        })
        .collect();
    Ok(RestartOutcome {
        restart,
        start_city: ev.enc.start_city(),
        varied: ev.params.varied().to_vec(),
        best: result.best,
        records,
        scale: ev.enc.scale(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutcome {
    pub best_tour: Tour,
    pub d_ob: f64,
    pub d_min: f64,
    pub r: f64,
    /// `(scale / 2) * d_ob` for the winning restart's encoding.
    pub t_ob: f64,
    pub trace: OptimizationTrace,
    /// Best objective of each restart, in restart order.
    pub restart_best: Vec<f64>,
    pub evaluations_per_restart: usize,
}

/// Optimizes the protocol for `m` over all restarts and keeps the lowest cost.
pub fn solve_instance(m: &CostMatrix, hyper: &Hyper) -> Result<SolveOutcome> {
    hyper.validate()?;
    let d_min = exact_solve(m, hyper.oracle)?.d_min;
    let outcomes: Vec<RestartOutcome> = (0..hyper.restarts)
        .into_par_iter()
        .map(|r| run_restart(m, hyper, r, d_min))
        .collect::<Result<_>>()?;

    let winner = outcomes
        .iter()
        .filter(|o| o.best.is_some())
        .min_by(|a, b| {
            let (x, y) = (a.best.as_ref().unwrap(), b.best.as_ref().unwrap());
            x.value.total_cmp(&y.value).then(a.restart.cmp(&b.restart))
        })
        .ok_or(Error::DegenerateOutput { norm: 0.0 })?;
    let best = winner.best.as_ref().unwrap();
    let restart_best = outcomes
        .iter()
        .map(|o| o.best.as_ref().map_or(f64::INFINITY, |b| b.value))
        .collect();
    let records = outcomes.iter().flat_map(|o| o.records.iter().cloned()).collect();
    Ok(SolveOutcome {
        best_tour: best.info.tour.clone(),
        d_ob: best.value,
        d_min,
        r: approximation_ratio(d_min, best.value)?,
        t_ob: winner.scale / 2.0 * best.value,
        trace: OptimizationTrace {
            records,
            best: BestRecord {
                restart: winner.restart,
                start_city: winner.start_city + 1,
                evaluation: best.info.evaluation,
                params: best.x.clone(),
                varied: winner.varied.iter().map(|id| id.to_string()).collect(),
                d: best.value,
                cycle: best.info.tour.clone(),
            },
        },
        restart_best,
        evaluations_per_restart: 1 + 3 * hyper.iterations,
    })
}

/// Re-runs the winning evaluation of `out` for reporting.
pub fn decode_report(m: &CostMatrix, hyper: &Hyper, out: &SolveOutcome) -> Result<DecodeReport> {
    let best = &out.trace.best;
    let ev = Evaluator::new(m, hyper, best.restart)?;
    let (run, decode) = ev.evaluate_full(&best.params, best.evaluation)?;
    DecodeReport::new(&decode, &run, out.d_min)
}
