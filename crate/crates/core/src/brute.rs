//! Exhaustive traversal of every Hamiltonian cycle on the sphere.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::encoding::{classical_path_labels, BlochEncoding, StateLabel};
use crate::error::{Error, Result};
use crate::qubit::{apply, rotation_between, Direction, QubitState};
use crate::tsp::{enumerate_tours, exact_solve, tour_cost, CostMatrix, OracleMethod, Tour, BRUTE_LIMIT};

/// Angular frequency of the rotations.
pub const OMEGA: f64 = 1.0;

/// Minimum fidelity between a traversed state and its placed label.
pub const TRAVERSAL_FIDELITY: f64 = 1.0 - 1e-9;

/// Absolute tolerance under which two times or costs count as tied.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathTiming {
    pub tour: Tour,
    /// One time per up leg, in visiting order.
    pub taus: Vec<f64>,
    pub total_t: f64,
    pub omega: f64,
}

/// Time to rotate `from` onto `to` about their shared meridian.
pub fn optimal_time(from: &QubitState, to: &QubitState, omega: f64) -> f64 {
    let re = to.overlap(from).re.clamp(-1.0, 1.0);
    (re.acos() / omega.abs()).clamp(0.0, FRAC_PI_2)
}

/// Sum of up-leg times of `t` without simulating the rotations.
pub fn tour_time(enc: &BlochEncoding, t: &Tour) -> f64 {
    t.legs()
        .map(|(a, b)| {
            optimal_time(
                enc.state(StateLabel::city(a, a)),
                enc.state(StateLabel::city(a, b)),
                OMEGA,
            )
        })
        .sum()
}

/// Applies the `2n` rotations of `t` in sequence, checking each landing.
pub fn traverse_tour(enc: &BlochEncoding, t: &Tour) -> Result<PathTiming> {
    if t.len() != enc.n() {
        return Err(Error::InvalidTour(format!(
            "tour visits {} cities, encoding has {}",
            t.len(),
            enc.n()
        )));
    }
    let labels = classical_path_labels(t);
    let mut current = *enc.state(labels[0]);
    let mut taus = Vec::with_capacity(t.len());
    for (step, w) in labels.windows(2).enumerate() {
        let (from, to) = (enc.state(w[0]), enc.state(w[1]));
        let direction = if step % 2 == 0 { Direction::Up } else { Direction::Down };
        let op = rotation_between(from, to, direction);
        current = apply(&op, &current);
        let fidelity = current.fidelity(to);
        if !(fidelity > TRAVERSAL_FIDELITY) {
            return Err(Error::TraversalDrift {
                step: step + 1,
                fidelity,
            });
        }
        if direction == Direction::Up {
            taus.push(optimal_time(from, to, OMEGA));
        }
    }
    Ok(PathTiming {
        tour: t.clone(),
        total_t: taus.iter().sum(),
        taus,
        omega: OMEGA,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteRow {
    pub tour: Tour,
    pub d: f64,
    pub t: f64,
    /// 1-based competition ranks with tolerance-grouped ties.
    pub rank_d: usize,
    pub rank_t: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteTable {
    /// Sorted by `t` ascending; tied rows keep enumeration order.
    pub rows: Vec<BruteRow>,
    /// Rows sharing the minimal `t`.
    pub degenerate_optima: usize,
    /// Rank correlation between the `d` and `t` columns.
    pub spearman: f64,
    /// Whether the minimal `t` row attains the oracle's minimal cost.
    pub matches_oracle: bool,
    pub d_min: f64,
}

impl BruteTable {
    pub fn optimal(&self) -> &BruteRow {
        &self.rows[0]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("tour,D,T,rank_D,rank_T\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{}", r.tour, r.d, r.t, r.rank_d, r.rank_t);
        }
        out
    }
}

pub fn brute_solve(enc: &BlochEncoding, m: &CostMatrix) -> Result<BruteTable> {
    let n = m.n();
    if n > BRUTE_LIMIT {
        return Err(Error::SizeLimit {
            operation: "brute_solve",
            n,
            limit: BRUTE_LIMIT,
        });
    }
    if enc.n() != n {
        return Err(Error::Precondition(format!(
            "encoding has {} cities, matrix has {n}",
            enc.n()
        )));
    }
    let tours = enumerate_tours(n, enc.start_city())?;
    let timed: Vec<(Tour, f64, f64)> = tours
        .into_par_iter()
        .map(|t| {
            let timing = traverse_tour(enc, &t)?;
            let d = tour_cost(m, &t)?;
            Ok((t, d, timing.total_t))
        })
        .collect::<Result<_>>()?;

    let ds: Vec<f64> = timed.iter().map(|r| r.1).collect();
    let ts: Vec<f64> = timed.iter().map(|r| r.2).collect();
    let rank_d = competition_ranks(&ds, RANK_TOL);
    let rank_t = competition_ranks(&ts, RANK_TOL);
    let spearman = rank_correlation(&ds, &ts, RANK_TOL);

    let mut order: Vec<usize> = (0..timed.len()).collect();
    order.sort_by_key(|&k| (rank_t[k], k));
    let rows: Vec<BruteRow> = order
        .iter()
        .map(|&k| BruteRow {
            tour: timed[k].0.clone(),
            d: ds[k],
            t: ts[k],
            rank_d: rank_d[k],
            rank_t: rank_t[k],
        })
        .collect();
    let degenerate_optima = rows.iter().filter(|r| r.rank_t == 1).count();
    let oracle = exact_solve(m, OracleMethod::Brute)?;
    let matches_oracle = (rows[0].d - oracle.d_min).abs() <= RANK_TOL;
    Ok(BruteTable {
        rows,
        degenerate_optima,
        spearman,
        matches_oracle,
        d_min: oracle.d_min,
    })
}

/// Groups of indices whose sorted values differ by at most `tol` from the
/// previous member.
fn tie_groups(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in idx {
        match groups.last_mut() {
            Some(g) if values[k] - values[*g.last().unwrap()] <= tol => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
}

/// 1-based ranks where tied values share the lowest rank of their group.
pub fn competition_ranks(values: &[f64], tol: f64) -> Vec<usize> {
    let mut ranks = vec![0; values.len()];
    let mut next = 1;
    for g in tie_groups(values, tol) {
        for &k in &g {
            ranks[k] = next;
        }
        next += g.len();
    }
    ranks
}

/// 1-based ranks where tied values share the mean rank of their group.
pub fn average_ranks(values: &[f64], tol: f64) -> Vec<f64> {
    let mut ranks = vec![0.0; values.len()];
    let mut next = 1usize;
    for g in tie_groups(values, tol) {
        let mean = next as f64 + (g.len() as f64 - 1.0) / 2.0;
        for &k in &g {
            ranks[k] = mean;
        }
        next += g.len();
    }
    ranks
}

/// Spearman correlation on tie-averaged ranks. Identical rank vectors give
/// exactly 1; a constant column gives 0 unless both are constant.
pub fn rank_correlation(a: &[f64], b: &[f64], tol: f64) -> f64 {
    assert_eq!(a.len(), b.len());
    let ra = average_ranks(a, tol);
    let rb = average_ranks(b, tol);
    if ra == rb {
        return 1.0;
    }
    let len = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / len;
    let mb = rb.iter().sum::<f64>() / len;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{build_encoding, EncodingConfig};
    use crate::fixtures;
    use crate::tsp::random_instance;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn enc(m: &CostMatrix) -> BlochEncoding {
        build_encoding(m, &EncodingConfig::default()).unwrap()
    }

    #[test]
    fn coincident_and_orthogonal_times() {
        let z = QubitState::zero();
        assert_eq!(optimal_time(&z, &z, OMEGA), 0.0);
        assert_abs_diff_eq!(optimal_time(&z, &QubitState::one(), OMEGA), FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn cm4_identity_tour_time() {
        let m = fixtures::cm4();
        let e = enc(&m);
        let t = Tour::from_labels(&[1, 2, 3, 4], 4).unwrap();
        let timing = traverse_tour(&e, &t).unwrap();
        assert_eq!(timing.taus.len(), 4);
        assert_abs_diff_eq!(timing.total_t, e.scale() / 2.0 * 1.83, epsilon = 1e-10);
    }

    #[test]
    fn traversal_closes_on_start() {
        let m = random_instance(7, false, 11).unwrap();
        let e = enc(&m);
        let t = Tour::new(vec![0, 3, 6, 1, 5, 2, 4], 7).unwrap();
        traverse_tour(&e, &t).unwrap();
    }

    #[test]
    fn cm4_table() {
        let m = fixtures::cm4();
        let table = brute_solve(&enc(&m), &m).unwrap();
        assert_eq!(table.rows.len(), 6);
        let best = &table.optimal().tour;
        assert!(best.same_cycle_undirected(&Tour::from_labels(&[1, 2, 3, 4], 4).unwrap()));
        assert!(table.matches_oracle);
        assert_eq!(table.degenerate_optima, 2);
        assert_eq!(table.spearman, 1.0);
    }

    #[test]
    fn cm1_table_rank_correlation() {
        let m = fixtures::cm1();
        let table = brute_solve(&enc(&m), &m).unwrap();
        assert_eq!(table.rows.len(), 24);
        assert_eq!(table.spearman, 1.0);
        for r in &table.rows {
            assert_eq!(r.rank_d, r.rank_t);
        }
        assert!(table.rows.windows(2).all(|w| w[0].t <= w[1].t + RANK_TOL));
    }

    #[test]
    fn asymmetric_tables_match_oracle() {
        for seed in 0..10 {
            let m = random_instance(6, false, seed).unwrap();
            let table = brute_solve(&enc(&m), &m).unwrap();
            assert!(table.matches_oracle, "seed {seed}");
            assert_eq!(table.spearman, 1.0);
        }
    }

    #[test]
    fn three_cities_tie() {
        let m = random_instance(3, true, 4).unwrap();
        let table = brute_solve(&enc(&m), &m).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.degenerate_optima, 2);
    }

    #[test]
    fn size_limit() {
        let m = random_instance(11, true, 0).unwrap();
        assert!(matches!(
            brute_solve(&enc(&m), &m),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn csv_header_and_rows() {
        let m = fixtures::cm4();
        let csv = brute_solve(&enc(&m), &m).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "tour,D,T,rank_D,rank_T");
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn rank_correlation_against_closed_form() {
        // No ties: 1 - 6 sum d^2 / (n (n^2 - 1)).
        let a = [0.3, 1.2, 0.7, 2.5, 1.9, 0.1];
        let b = [1.0, 0.2, 3.0, 2.0, 5.0, 4.0];
        let ra = [2.0, 4.0, 3.0, 6.0, 5.0, 1.0];
        let rb = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0];
        let d2: f64 = ra.iter().zip(&rb).map(|(x, y): (&f64, &f64)| (x - y).powi(2)).sum();
        let expected = 1.0 - 6.0 * d2 / (6.0 * 35.0);
        assert_abs_diff_eq!(rank_correlation(&a, &b, 0.0), expected, epsilon = 1e-14);
        assert_eq!(average_ranks(&[1.0, 2.0, 1.0, 3.0], 0.0), vec![1.5, 3.0, 1.5, 4.0]);
        assert_eq!(competition_ranks(&[1.0, 2.0, 1.0, 3.0], 0.0), vec![1, 3, 1, 4]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn time_proportional_to_cost(seed in 0u64..10_000, n in 3usize..8, sym in any::<bool>()) {
            let m = random_instance(n, sym, seed).unwrap();
            let e = enc(&m);
            let mut order: Vec<usize> = (0..n).collect();
            order.rotate_left((seed as usize) % n);
            order[1..].reverse();
            let t = Tour::new(order, n).unwrap();
            let timing = traverse_tour(&e, &t).unwrap();
            let d = tour_cost(&m, &t).unwrap();
            prop_assert!((timing.total_t * OMEGA - e.scale() / 2.0 * d).abs() < 1e-10);
            prop_assert!(timing.taus.iter().all(|&x| (0.0..=FRAC_PI_2).contains(&x)));
        }

        #[test]
        fn sort_by_time_equals_sort_by_cost(seed in 0u64..10_000, sym in any::<bool>()) {
            let m = random_instance(5, sym, seed).unwrap();
            let table = brute_solve(&enc(&m), &m).unwrap();
            for r in &table.rows {
                prop_assert_eq!(r.rank_d, r.rank_t);
            }
        }
    }
}
