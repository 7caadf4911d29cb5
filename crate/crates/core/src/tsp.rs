//! TSP instances, tours, exact oracles and the discrete brachistochrone profile.

use std::fmt;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest instance the exhaustive enumerators accept.
pub const BRUTE_LIMIT: usize = 10;
/// Largest instance the dynamic-programming oracle accepts.
pub const HELD_KARP_LIMIT: usize = 16;
/// Tolerance for counting tied optima.
pub const TIE_TOL: f64 = 1e-12;

/// Range of off-diagonal entries produced by [`random_instance`].
pub const RANDOM_ENTRY_RANGE: (f64, f64) = (0.05, 1.0);

/// Square matrix of travel costs `s_ij` with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    /// Builds a matrix from row-major entries, validating the invariants.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidMatrix(format!("need at least 3 cities, got {n}")));
        }
        if entries.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let v = entries[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({}, {}) = {v} must be finite and nonnegative",
                        i + 1,
                        j + 1
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "diagonal entry ({0}, {0}) = {v} must be zero",
                        i + 1
                    )));
                }
                if i != j && v == 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "off-diagonal entry ({}, {}) must be positive",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("rows must form a square matrix".into()));
        }
        Self::new(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cost from city `i` to city `j` (0-based).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= 1e-12))
    }

    fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n)
            .flat_map(move |i| (0..self.n).filter(move |&j| j != i).map(move |j| self.get(i, j)))
    }

    pub fn min_off_diagonal(&self) -> f64 {
        self.off_diagonal().fold(f64::INFINITY, f64::min)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        self.off_diagonal().fold(0.0, f64::max)
    }

    /// Upper bound on the cost of any tour.
    pub fn max_tour_cost(&self) -> f64 {
        self.n as f64 * self.max_off_diagonal()
    }
}

/// A Hamiltonian cycle given by its visiting order; the closing edge back to
/// `order[0]` is implied.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tour {
    order: Vec<usize>,
}

impl Tour {
    /// Validates that `order` is a permutation of `0..n`.
    pub fn new(order: Vec<usize>, n: usize) -> Result<Self> {
        if order.len() != n {
            return Err(Error::InvalidTour(format!(
                "tour visits {} cities, instance has {n}",
                order.len()
            )));
        }
        let mut seen = vec![false; n];
        for &c in &order {
            if c >= n || std::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidTour(format!("{order:?} is not a permutation of 0..{n}")));
            }
        }
        Ok(Self { order })
    }

    /// Parses 1-based city labels.
    pub fn from_labels(labels: &[usize], n: usize) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::InvalidTour("city labels start at 1".into()));
        }
        Self::new(labels.iter().map(|c| c - 1).collect(), n)
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn start(&self) -> usize {
        self.order[0]
    }

    /// 1-based city labels in visiting order.
    pub fn labels(&self) -> Vec<usize> {
        self.order.iter().map(|c| c + 1).collect()
    }

    /// Directed edges including the closing one.
    pub fn legs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.order.len();
        (0..n).map(move |k| (self.order[k], self.order[(k + 1) % n]))
    }

    /// Same cycle traversed backwards from the same start.
    pub fn reversed(&self) -> Self {
        let mut order = vec![self.order[0]];
        order.extend(self.order[1..].iter().rev());
        Self { order }
    }

    /// Same cycle beginning at `city`.
    pub fn rotated_to(&self, city: usize) -> Self {
        let pos = self
            .order
            .iter()
            .position(|&c| c == city)
            .expect("city belongs to tour");
        let mut order = self.order[pos..].to_vec();
        order.extend_from_slice(&self.order[..pos]);
        Self { order }
    }

    /// True when both describe the same undirected cycle.
    pub fn same_cycle_undirected(&self, other: &Tour) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let o = other.rotated_to(self.start());
        o == *self || o.reversed() == *self
    }
}

/// Serializes as 1-based labels.
impl Serialize for Tour {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.order.iter().map(|c| c + 1))
    }
}

impl fmt::Display for Tour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.labels().iter().join("-"))
    }
}

/// Sum of `s_ij` over consecutive cities including the closing edge.
pub fn tour_cost(m: &CostMatrix, t: &Tour) -> Result<f64> {
    if t.len() != m.n() {
        return Err(Error::InvalidTour(format!(
            "tour over {} cities used with a {}-city matrix",
            t.len(),
            m.n()
        )));
    }
    Ok(t.legs().map(|(i, j)| m.get(i, j)).sum())
}

/// All `(n-1)!` tours starting at `start`, in lexicographic order.
pub fn enumerate_tours(n: usize, start: usize) -> Result<Vec<Tour>> {
    if n > BRUTE_LIMIT {
        return Err(Error::SizeLimit {
            operation: "tour enumeration",
            n,
            limit: BRUTE_LIMIT,
        });
    }
    if n < 3 {
        return Err(Error::Precondition(format!("need at least 3 cities, got {n}")));
    }
    if start >= n {
        return Err(Error::Precondition(format!("start city {} out of range", start + 1)));
    }
    let rest: Vec<usize> = (0..n).filter(|&c| c != start).collect();
    Ok(rest
        .iter()
        .copied()
        .permutations(n - 1)
        .map(|p| {
            let mut order = Vec::with_capacity(n);
            order.push(start);
            order.extend(p);
            Tour { order }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Brute,
    #[default]
    HeldKarp,
}

impl OracleMethod {
    pub fn limit(self) -> usize {
        match self {
            OracleMethod::Brute => BRUTE_LIMIT,
            OracleMethod::HeldKarp => HELD_KARP_LIMIT,
        }
    }
}

/// Exact optimum of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_tour: Tour,
    pub d_min: f64,
    /// Number of tours from city 1 attaining `d_min` within [`TIE_TOL`].
    pub degenerate_optima: u64,
}

pub fn exact_solve(m: &CostMatrix, method: OracleMethod) -> Result<OracleResult> {
    let n = m.n();
    if n > method.limit() {
        return Err(Error::SizeLimit {
            operation: match method {
                OracleMethod::Brute => "brute-force oracle",
                OracleMethod::HeldKarp => "Held-Karp oracle",
            },
            n,
            limit: method.limit(),
        });
    }
    match method {
        OracleMethod::Brute => brute_oracle(m),
        OracleMethod::HeldKarp => Ok(held_karp(m)),
    }
}

fn brute_oracle(m: &CostMatrix) -> Result<OracleResult> {
    let tours = enumerate_tours(m.n(), 0)?;
    let costs: Vec<f64> = tours.iter().map(|t| tour_cost(m, t)).collect::<Result<_>>()?;
    // first tour in enumeration order wins ties
    let (best, d_min) = costs
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bc), (i, &c)| if c < bc { (i, c) } else { (bi, bc) });
    let degenerate_optima = costs.iter().filter(|&&c| c <= d_min + TIE_TOL).count() as u64;
    Ok(OracleResult {
        best_tour: tours[best].clone(),
        d_min,
        degenerate_optima,
    })
}

/// Bitmask dynamic program over subsets of the non-start cities.
fn held_karp(m: &CostMatrix) -> OracleResult {
    let n = m.n();
    let k = n - 1; // cities 1..n mapped to bits 0..k
    let full = (1usize << k) - 1;
    let mut cost = vec![f64::INFINITY; (1 << k) * k];
    let mut count = vec![0u64; (1 << k) * k];
    let mut parent = vec![usize::MAX; (1 << k) * k];
    let idx = |mask: usize, last: usize| mask * k + last;

    for last in 0..k {
        cost[idx(1 << last, last)] = m.get(0, last + 1);
        count[idx(1 << last, last)] = 1;
    }
    for mask in 1..=full {
        for last in 0..k {
            let here = idx(mask, last);
            if mask & (1 << last) == 0 || !cost[here].is_finite() {
                continue;
            }
            for next in 0..k {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let there = idx(mask | (1 << next), next);
                let cand = cost[here] + m.get(last + 1, next + 1);
                if cand < cost[there] - TIE_TOL {
                    cost[there] = cand;
                    count[there] = count[here];
                    parent[there] = last;
                } else if (cand - cost[there]).abs() <= TIE_TOL {
                    count[there] += count[here];
                    if cand < cost[there] {
                        cost[there] = cand;
                        parent[there] = last;
                    }
                }
            }
        }
    }

    let mut d_min = f64::INFINITY;
    let mut last_best = 0;
    for last in 0..k {
        let c = cost[idx(full, last)] + m.get(last + 1, 0);
        if c < d_min {
            d_min = c;
            last_best = last;
        }
    }
    let degenerate_optima = (0..k)
        .filter(|&last| cost[idx(full, last)] + m.get(last + 1, 0) <= d_min + TIE_TOL)
        .map(|last| count[idx(full, last)])
        .sum();

    let mut rev = Vec::with_capacity(n);
    let (mut mask, mut last) = (full, last_best);
    while last != usize::MAX {
        rev.push(last + 1);
        let prev = parent[idx(mask, last)];
        mask &= !(1 << last);
        last = prev;
    }
    rev.push(0);
    rev.reverse();
    OracleResult {
        best_tour: Tour { order: rev },
        d_min,
        degenerate_optima,
    }
}

/// `R = d_min / d_ob`.
pub fn approximation_ratio(d_min: f64, d_ob: f64) -> Result<f64> {
    if !(d_min > 0.0) || !d_ob.is_finite() {
        return Err(Error::Domain(format!("invalid costs d_min = {d_min}, d_ob = {d_ob}")));
    }
    if d_ob < d_min * (1.0 - 1e-12) - TIE_TOL {
        return Err(Error::Domain(format!(
            "obtained cost {d_ob} is below the oracle optimum {d_min}"
        )));
    }
    Ok((d_min / d_ob).min(1.0))
}

/// Seeded instance with off-diagonal entries uniform in [`RANDOM_ENTRY_RANGE`].
/// The triangle inequality is not enforced.
pub fn random_instance(n: usize, symmetric: bool, seed: u64) -> Result<CostMatrix> {
    if n < 3 {
        return Err(Error::Precondition(format!("need at least 3 cities, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = RANDOM_ENTRY_RANGE;
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j || (symmetric && j < i) {
                continue;
            }
            entries[i * n + j] = rng.random_range(lo..=hi);
        }
    }
    if symmetric {
        for i in 0..n {
            for j in 0..i {
                entries[i * n + j] = entries[j * n + i];
            }
        }
    }
    CostMatrix::new(n, entries)
}

/// Piecewise-linear brachistochrone representation of one tour.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrachistochroneProfile {
    pub dx: f64,
    pub v: f64,
    /// Angle of each leg with the x axis, legs placed at `x = 0, dx, ..., (n-1) dx`.
    pub thetas: Vec<f64>,
    /// Total travel time over the tour legs; the final piece to the common end
    /// point is excluded.
    pub q: f64,
}

/// Default sub-interval length: 90% of the shortest edge.
pub fn default_dx(m: &CostMatrix) -> f64 {
    0.9 * m.min_off_diagonal()
}

pub fn brachistochrone_time(
    m: &CostMatrix,
    t: &Tour,
    dx: f64,
    v: f64,
) -> Result<BrachistochroneProfile> {
    let s_min = m.min_off_diagonal();
    if !(dx > 0.0 && dx < s_min) {
        return Err(Error::Precondition(format!(
            "dx = {dx} must lie in (0, {s_min})"
        )));
    }
    if !(v > 0.0) {
        return Err(Error::Precondition(format!("speed v = {v} must be positive")));
    }
    tour_cost(m, t)?;
    let thetas: Vec<f64> = t.legs().map(|(i, j)| (dx / m.get(i, j)).acos()).collect();
    let q = dx / v * thetas.iter().map(|th| 1.0 / th.cos()).sum::<f64>();
    Ok(BrachistochroneProfile { dx, v, thetas, q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    fn brute_min_by_enumeration(m: &CostMatrix) -> f64 {
        // independent of enumerate_tours: Heap's algorithm over 1..n
        fn heap(k: usize, a: &mut Vec<usize>, m: &CostMatrix, best: &mut f64) {
            if k == 1 {
                let mut c = m.get(0, a[0]) + m.get(*a.last().unwrap(), 0);
                for w in a.windows(2) {
                    c += m.get(w[0], w[1]);
                }
                *best = best.min(c);
                return;
            }
            for i in 0..k {
                heap(k - 1, a, m, best);
                if k % 2 == 0 {
                    a.swap(i, k - 1);
                } else {
                    a.swap(0, k - 1);
                }
            }
        }
        let mut a: Vec<usize> = (1..m.n()).collect();
        let mut best = f64::INFINITY;
        let k = a.len();
        heap(k, &mut a, m, &mut best);
        best
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(CostMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0]).is_err());
        assert!(CostMatrix::new(3, vec![0.0; 8]).is_err());
        let mut e = vec![0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0];
        e[0] = 0.1;
        assert!(CostMatrix::new(3, e.clone()).is_err());
        e[0] = 0.0;
        e[1] = -1.0;
        assert!(CostMatrix::new(3, e.clone()).is_err());
        e[1] = f64::NAN;
        assert!(CostMatrix::new(3, e.clone()).is_err());
        e[1] = 0.0;
        assert!(CostMatrix::new(3, e).is_err());
    }

    #[test]
    fn cm4_tour_costs() {
        let m = fixtures::cm4();
        let t = Tour::from_labels(&[1, 2, 3, 4], 4).unwrap();
        assert_abs_diff_eq!(tour_cost(&m, &t).unwrap(), 0.57 + 0.41 + 0.30 + 0.55, epsilon = 1e-12);
        assert_abs_diff_eq!(tour_cost(&m, &t).unwrap(), 1.83, epsilon = 1e-12);
        let t = Tour::from_labels(&[1, 3, 2, 4], 4).unwrap();
        assert_abs_diff_eq!(tour_cost(&m, &t).unwrap(), 2.64, epsilon = 1e-12);
    }

    #[test]
    fn three_city_symmetric_tours_cost_the_same() {
        let m = random_instance(3, true, 11).unwrap();
        let tours = enumerate_tours(3, 0).unwrap();
        assert_eq!(tours.len(), 2);
        let c0 = tour_cost(&m, &tours[0]).unwrap();
        let c1 = tour_cost(&m, &tours[1]).unwrap();
        assert_abs_diff_eq!(c0, c1, epsilon = 1e-12);
        assert_abs_diff_eq!(c0, m.get(0, 1) + m.get(1, 2) + m.get(2, 0), epsilon = 1e-12);
    }

    #[test]
    fn invalid_tours_rejected() {
        assert!(Tour::new(vec![0, 1, 1, 3], 4).is_err());
        assert!(Tour::new(vec![0, 1, 2], 4).is_err());
        assert!(Tour::new(vec![0, 1, 2, 4], 4).is_err());
        let m = fixtures::cm4();
        let t = Tour::new(vec![0, 1, 2], 3).unwrap();
        assert!(matches!(tour_cost(&m, &t), Err(Error::InvalidTour(_))));
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_tours(3, 0).unwrap().len(), 2);
        assert_eq!(enumerate_tours(4, 0).unwrap().len(), 6);
        assert_eq!(enumerate_tours(5, 0).unwrap().len(), 24);
        let tours = enumerate_tours(4, 2).unwrap();
        assert!(tours.iter().all(|t| t.start() == 2));
        assert!(tours.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(
            enumerate_tours(11, 0),
            Err(Error::SizeLimit { limit: 10, .. })
        ));
    }

    #[test]
    fn cm4_oracle() {
        let m = fixtures::cm4();
        let r = exact_solve(&m, OracleMethod::Brute).unwrap();
        assert_abs_diff_eq!(r.d_min, 1.83, epsilon = 1e-12);
        assert_eq!(r.best_tour.labels(), vec![1, 2, 3, 4]);
        assert_eq!(r.degenerate_optima, 2);
        let h = exact_solve(&m, OracleMethod::HeldKarp).unwrap();
        assert_abs_diff_eq!(h.d_min, 1.83, epsilon = 1e-12);
        assert_eq!(h.degenerate_optima, 2);
        assert!(h.best_tour.same_cycle_undirected(&r.best_tour));
    }

    #[test]
    fn cm2_oracles_agree() {
        let m = fixtures::cm2();
        let b = exact_solve(&m, OracleMethod::Brute).unwrap();
        let h = exact_solve(&m, OracleMethod::HeldKarp).unwrap();
        assert_eq!(b.d_min, h.d_min);
        assert_abs_diff_eq!(tour_cost(&m, &h.best_tour).unwrap(), h.d_min, epsilon = 1e-12);
        assert_abs_diff_eq!(b.d_min, brute_min_by_enumeration(&m), epsilon = 1e-12);
    }

    #[test]
    fn oracle_size_limits() {
        let m = random_instance(11, true, 1).unwrap();
        assert!(matches!(
            exact_solve(&m, OracleMethod::Brute),
            Err(Error::SizeLimit { .. })
        ));
        let m = random_instance(17, true, 1).unwrap();
        assert!(matches!(
            exact_solve(&m, OracleMethod::HeldKarp),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn oracles_agree_on_random_instances() {
        for seed in 0..60u64 {
            let n = 4 + (seed % 6) as usize;
            let m = random_instance(n, seed % 2 == 0, seed).unwrap();
            let b = exact_solve(&m, OracleMethod::Brute).unwrap();
            let h = exact_solve(&m, OracleMethod::HeldKarp).unwrap();
            assert_abs_diff_eq!(b.d_min, h.d_min, epsilon = 1e-12);
            assert_eq!(b.degenerate_optima, h.degenerate_optima, "seed {seed}");
            assert_abs_diff_eq!(b.d_min, brute_min_by_enumeration(&m), epsilon = 1e-12);
            assert_abs_diff_eq!(tour_cost(&m, &b.best_tour).unwrap(), b.d_min, epsilon = 1e-12);
            if m.is_symmetric() {
                assert!(b.degenerate_optima >= 2);
            }
        }
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(approximation_ratio(1.83, 1.83).unwrap(), 1.0);
        assert_abs_diff_eq!(approximation_ratio(1.83, 2.55).unwrap(), 1.83 / 2.55, epsilon = 1e-15);
        assert_abs_diff_eq!(approximation_ratio(1.0, 1.0 / 0.9).unwrap(), 0.9, epsilon = 1e-12);
        assert!(matches!(approximation_ratio(2.0, 1.0), Err(Error::Domain(_))));
        assert!(approximation_ratio(0.0, 1.0).is_err());
    }

    #[test]
    fn random_instances() {
        let a = random_instance(6, false, 42).unwrap();
        assert_eq!(a, random_instance(6, false, 42).unwrap());
        assert_ne!(a, random_instance(6, false, 43).unwrap());
        let s = random_instance(7, true, 5).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(s.get(i, j), s.get(j, i));
            }
        }
        assert!(s.is_symmetric());
    }

    #[test]
    fn random_entry_statistics() {
        let mut sum = 0.0;
        let mut count = 0usize;
        for seed in 0..1000 {
            let m = random_instance(4, false, seed).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    if i != j {
                        let v = m.get(i, j);
                        assert!((0.05..=1.0).contains(&v));
                        sum += v;
                        count += 1;
                    }
                }
            }
        }
        assert!((sum / count as f64 - 0.525).abs() < 0.03);
    }

    #[test]
    fn brachistochrone_identity() {
        let m = fixtures::cm4();
        let dx = default_dx(&m);
        for t in enumerate_tours(4, 0).unwrap() {
            let p = brachistochrone_time(&m, &t, dx, 2.0).unwrap();
            assert_eq!(p.thetas.len(), 4);
            assert_abs_diff_eq!(p.q * p.v, tour_cost(&m, &t).unwrap(), epsilon = 1e-12);
            assert!(p.thetas.iter().all(|&th| (0.0..std::f64::consts::FRAC_PI_2).contains(&th)));
        }
    }

    #[test]
    fn brachistochrone_ranking_matches_cost() {
        let m = fixtures::cm4();
        let dx = default_dx(&m);
        let tours = enumerate_tours(4, 0).unwrap();
        let by_q = tours
            .iter()
            .map(|t| brachistochrone_time(&m, t, dx, 1.0).unwrap().q)
            .collect::<Vec<_>>();
        let by_d = tours.iter().map(|t| tour_cost(&m, t).unwrap()).collect::<Vec<_>>();
        for i in 0..tours.len() {
            for j in 0..tours.len() {
                if by_d[i] < by_d[j] - 1e-9 {
                    assert!(by_q[i] < by_q[j]);
                }
            }
        }
    }

    #[test]
    fn brachistochrone_limits() {
        let m = fixtures::cm4();
        let t = Tour::from_labels(&[1, 2, 3, 4], 4).unwrap();
        let s_min = m.min_off_diagonal();
        let p = brachistochrone_time(&m, &t, s_min * (1.0 - 1e-9), 1.0).unwrap();
        // leg 3 -> 4 is the shortest edge (0.30)
        assert!(p.thetas[2] < 1e-3);
        assert!(brachistochrone_time(&m, &t, s_min, 1.0).is_err());
        assert!(brachistochrone_time(&m, &t, 0.0, 1.0).is_err());
        assert!(brachistochrone_time(&m, &t, 0.1, 0.0).is_err());
    }

    #[test]
    fn tour_symmetries() {
        let m = random_instance(6, true, 9).unwrap();
        let t = Tour::new(vec![0, 3, 1, 5, 2, 4], 6).unwrap();
        let c = tour_cost(&m, &t).unwrap();
        assert_abs_diff_eq!(tour_cost(&m, &t.reversed()).unwrap(), c, epsilon = 1e-12);
        assert_abs_diff_eq!(tour_cost(&m, &t.rotated_to(5)).unwrap(), c, epsilon = 1e-12);
        assert!(t.same_cycle_undirected(&t.reversed().rotated_to(2)));
        assert_eq!(t.to_string(), "1-4-2-6-3-5");
    }
}
