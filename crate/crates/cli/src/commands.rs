//! Single-instance commands.

use serde::Serialize;

use bloch_tsp_core::brute::brute_solve;
use bloch_tsp_core::encoding::{
    build_encoding, build_routing_chart, EncodingConfig, EncodingDump,
    LabelKind,
};
use bloch_tsp_core::fixtures;
use bloch_tsp_core::optimizer::{decode_report, solve_instance, Hyper};
use bloch_tsp_core::superposition::{DecodeMethod, DecodeReport};
use bloch_tsp_core::tsp::{exact_solve, CostMatrix};

use crate::error::Result;
use crate::io::{to_csv, to_json, Artifacts};
use crate::timing::Timing;

/// Files and stdout summaries produced by a command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub artifacts: Artifacts,
    pub summary_json: String,
    pub summary_csv: String,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub n: usize,
    pub symmetric: bool,
    pub tour: String,
    pub d_ob: f64,
    pub d_min: f64,
    pub r: f64,
    pub t_ob: f64,
    pub restart: usize,
    pub start_city: usize,
    pub evaluation: u64,
    pub restart_best: Vec<f64>,
    pub evaluations_per_restart: usize,
    pub decode: DecodeReport,
    pub hyper: Hyper,
}

/// Flat decoded weight for CSV output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightRow {
    pub rank: usize,
    pub city: usize,
    pub weight: f64,
    pub beta_re: f64,
    pub beta_im: f64,
}

/// Weights in ranked-cycle order, start city excluded.
pub fn weight_rows(report: &DecodeReport) -> Vec<WeightRow> {
    report
        .ranked_cycle
        .iter()
        .skip(1)
        .filter_map(|c| report.weights.iter().find(|w| w.city == *c))
        .enumerate()
        .map(|(k, w)| WeightRow {
            rank: k + 1,
            city: w.city,
            weight: w.weight,
            beta_re: w.beta[0],
            beta_im: w.beta[1],
        })
        .collect()
}

pub fn solve_report(m: &CostMatrix, hyper: &Hyper) -> Result<(SolveReport, String)> {
    let out = solve_instance(m, hyper)?;
    let decode = decode_report(m, hyper, &out)?;
    let best = &out.trace.best;
    let report = SolveReport {
        n: m.n(),
        symmetric: m.is_symmetric(),
        tour: out.best_tour.to_string(),
        d_ob: out.d_ob,
        d_min: out.d_min,
        r: out.r,
        t_ob: out.t_ob,
        restart: best.restart,
        start_city: best.start_city,
        evaluation: best.evaluation,
        restart_best: out.restart_best.clone(),
        evaluations_per_restart: out.evaluations_per_restart,
        decode,
        hyper: hyper.clone(),
    };
    Ok((report, out.trace.to_csv()))
}

pub fn cmd_solve(m: &CostMatrix, hyper: &Hyper) -> Result<Outcome> {
    let mut timing = Timing::start("solve");
    let (report, trace) = solve_report(m, hyper)?;
    timing.finish();
    let mut artifacts = Artifacts::default();
    let json = to_json(&report);
    artifacts.add("solve.json", json.clone());
    artifacts.add("trace.csv", trace);
    Ok(Outcome {
        artifacts,
        summary_json: json,
        summary_csv: to_csv(&weight_rows(&report.decode))?,
        timing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteSummary {
    pub n: usize,
    pub rows: usize,
    pub scale: f64,
    pub d_min: f64,
    pub best_tour: String,
    pub degenerate_optima: usize,
    pub spearman: f64,
    pub matches_oracle: bool,
}

pub fn cmd_brute(m: &CostMatrix) -> Result<Outcome> {
    let mut timing = Timing::start("brute");
    let enc = build_encoding(m, &EncodingConfig::default())?;
    let table = brute_solve(&enc, m)?;
    timing.finish();
    let summary = BruteSummary {
        n: m.n(),
        rows: table.rows.len(),
        scale: enc.scale(),
        d_min: table.d_min,
        best_tour: table.rows[0].tour.to_string(),
        degenerate_optima: table.degenerate_optima,
        spearman: table.spearman,
        matches_oracle: table.matches_oracle,
    };
    let csv = table.to_csv();
    let mut artifacts = Artifacts::default();
    artifacts.add("brute.csv", csv.clone());
    artifacts.add("brute.json", to_json(&summary));
    Ok(Outcome {
        artifacts,
        summary_json: to_json(&summary),
        summary_csv: csv,
        timing,
    })
}

#[derive(Debug, Clone, Serialize)]
struct StateRow {
    label: String,
    kind: LabelKind,
    xi: f64,
    phi: f64,
}

fn state_rows(dump: &EncodingDump) -> Vec<StateRow> {
    dump.states
        .iter()
        .map(|s| StateRow {
            label: s.label.to_string(),
            kind: s.kind,
            xi: s.xi,
            phi: s.phi,
        })
        .collect()
}

/// `start_city` is 1-based.
pub fn cmd_encode(m: &CostMatrix, start_city: usize) -> Result<Outcome> {
    let mut timing = Timing::start("encode");
    if start_city == 0 || start_city > m.n() {
        return Err(bloch_tsp_core::Error::Precondition(format!(
            "start city {start_city} outside 1..={}",
            m.n()
        ))
        .into());
    }
    let enc = build_encoding(m, &EncodingConfig::default().with_start(start_city - 1))?;
    let chart = build_routing_chart(&enc);
    let dump = EncodingDump::new(&enc, &chart);
    timing.finish();
    let json = to_json(&dump);
    let mut artifacts = Artifacts::default();
    artifacts.add("encoding.json", json.clone());
    Ok(Outcome {
        artifacts,
        summary_json: json,
        summary_csv: to_csv(&state_rows(&dump))?,
        timing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkedExample {
    pub weights: Vec<WeightRow>,
    /// 1-based city the ranked cycle starts from.
    pub start_city: usize,
    pub ranked_cycle: String,
    pub oracle_tour: String,
    pub d_ob: f64,
    pub d_min: f64,
    pub r: f64,
    pub matches_oracle: bool,
    pub method: DecodeMethod,
}

pub fn worked_example(hyper: &Hyper) -> Result<WorkedExample> {
    let m = fixtures::cm4();
    let (report, _) = solve_report(&m, hyper)?;
    let oracle = exact_solve(&m, hyper.oracle)?;
    let cycle = bloch_tsp_core::tsp::Tour::from_labels(&report.decode.ranked_cycle, m.n())?;
    Ok(WorkedExample {
        weights: weight_rows(&report.decode),
        start_city: report.start_city,
        ranked_cycle: cycle.to_string(),
        oracle_tour: oracle.best_tour.to_string(),
        d_ob: report.decode.d,
        d_min: oracle.d_min,
        r: report.decode.r,
        matches_oracle: cycle.same_cycle_undirected(&oracle.best_tour),
        method: report.decode.method,
    })
}

pub fn cmd_worked_example(hyper: &Hyper) -> Result<Outcome> {
    let mut timing = Timing::start("worked-example");
    let ex = worked_example(hyper)?;
    timing.finish();
    let json = to_json(&ex);
    let mut artifacts = Artifacts::default();
    artifacts.add("worked_example.json", json.clone());
    Ok(Outcome {
        artifacts,
        summary_json: json,
        summary_csv: to_csv(&ex.weights)?,
        timing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Hyper {
        Hyper {
            iterations: 150,
            ..Default::default()
        }
    }

    #[test]
    fn cm4_solve_is_optimal() {
        let (rep, trace) = solve_report(&fixtures::cm4(), &quick()).unwrap();
        assert_eq!(rep.r, 1.0);
        assert_eq!(rep.decode.d, rep.d_ob);
        assert!(trace.starts_with("restart,iteration,D,T,R,best_D,params_hash\n"));
        assert_eq!(weight_rows(&rep.decode).len(), 3);
    }

    #[test]
    fn brute_cm1_table() {
        let out = cmd_brute(&fixtures::cm1()).unwrap();
        let csv = out.artifacts.get("brute.csv").unwrap();
        assert_eq!(csv.lines().count(), 1 + 24);
        let s: serde_json::Value = serde_json::from_str(&out.summary_json).unwrap();
        assert_eq!(s["spearman"], 1.0);
        assert_eq!(s["matches_oracle"], true);
    }

    #[test]
    fn encode_cm4_counts() {
        let out = cmd_encode(&fixtures::cm4(), 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.summary_json).unwrap();
        let states = v["states"].as_array().unwrap();
        let count = |k: &str| states.iter().filter(|s| s["kind"] == k).count();
        assert_eq!((count("equator"), count("geodesic"), count("pole")), (4, 12, 1));
        assert!(cmd_encode(&fixtures::cm4(), 5).is_err());
    }

    #[test]
    fn worked_example_matches_oracle() {
        let ex = worked_example(&quick()).unwrap();
        assert!(ex.matches_oracle);
        assert!(["1-2-3-4", "1-4-3-2"].contains(&ex.oracle_tour.as_str()));
        let w: Vec<f64> = ex.weights.iter().map(|w| w.weight).collect();
        assert!(w.windows(2).all(|p| p[0] >= p[1]));
    }
}
