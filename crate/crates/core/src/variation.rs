//! Partition variation sums and the monotone refinement estimator.
//!
//! For a pairing satisfying the triangle inequality in its first slot,
//! inserting a point into a partition never decreases the variation sum, so
//! every sum computed here is a lower bound on the supremum over partitions.
//! The estimator only ever reports such lower bounds. Its `converged` and
//! `diverging` verdicts are heuristics drawn from the growth of those sums:
//! no finite set of samples can certify finiteness or unboundedness of the
//! supremum.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{FunctionSpec, Interval};
use crate::spaces::TwoNorm;
use crate::vector::ComplexVector;

/// Below this many evaluations a batch runs on the calling thread.
const PARALLEL_THRESHOLD: usize = 2048;

/// Strictly increasing grid over an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    points: Vec<f64>,
}

impl Partition {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain(
                "a partition needs at least two points".into(),
            ));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("partition points must be finite".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!(
                "partition is not strictly increasing at {} >= {}",
                w[0], w[1]
            )));
        }
        Ok(Self { points })
    }

    /// `{lo, hi}`.
    pub fn trivial(interval: Interval) -> Self {
        Self {
            points: vec![interval.lo(), interval.hi()],
        }
    }

    /// `n` equal subintervals.
    pub fn uniform(interval: Interval, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a uniform partition needs n >= 1".into()));
        }
        let (lo, len) = (interval.lo(), interval.length());
        let mut points: Vec<f64> = (0..n).map(|j| lo + len * (j as f64 / n as f64)).collect();
        points.push(interval.hi());
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Sorted union of the two point sets.
    pub fn merge(&self, other: &Partition) -> Partition {
        let mut points: Vec<f64> = self.points.iter().chain(&other.points).copied().collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        Partition { points }
    }

    /// Whether every point of `other` is a point of `self`.
    pub fn refines(&self, other: &Partition) -> bool {
        other
            .points
            .iter()
            .all(|t| self.points.binary_search_by(|p| p.total_cmp(t)).is_ok())
    }

    fn check_over(&self, domain: &Interval) -> Result<()> {
        if self.lo() != domain.lo() || self.hi() != domain.hi() {
            return Err(Error::Domain(format!(
                "partition spans [{}, {}] but the function is defined on {}",
                self.lo(),
                self.hi(),
                domain
            )));
        }
        Ok(())
    }
}

/// How a refinement step chooses the subintervals to bisect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Bisect every subinterval.
    Dyadic,
    /// Bisect the half of the subintervals with the largest midpoint gain.
    Greedy,
    /// Bisect every subinterval whose gain on a finer probe grid exceeds its
    /// share of the tolerance.
    Adaptive,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Dyadic => "dyadic",
            Strategy::Greedy => "greedy",
            Strategy::Adaptive => "adaptive",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dyadic" => Ok(Strategy::Dyadic),
            "greedy" => Ok(Strategy::Greedy),
            "adaptive" => Ok(Strategy::Adaptive),
            _ => Err(Error::Unknown {
                kind: "strategy",
                name: s.to_string(),
            }),
        }
    }
}

/// Stopping rules and strategy for [`estimate_variation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineConfig {
    /// Relative per-level gain below which a level counts as quiet; two quiet
    /// levels in a row stop with `converged`.
    pub gain_tol: f64,
    /// Largest partition the estimator may build.
    pub max_points: usize,
    /// A sum above this stops with `diverging`.
    pub divergence_cap: f64,
    /// Window of levels inspected by the sustained-growth rule.
    pub divergence_levels: usize,
    pub strategy: Strategy,
    /// The adaptive strategy probes each subinterval on a grid of
    /// `2^probe_depth` pieces.
    pub probe_depth: u32,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            gain_tol: 1e-6,
            max_points: 1 << 20,
            divergence_cap: 1e9,
            divergence_levels: 8,
            strategy: Strategy::Adaptive,
            probe_depth: 4,
        }
    }
}

impl RefineConfig {
    pub fn with_strategy(strategy: Strategy) -> Self {
        Self {
            strategy,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain_tol > 0.0 && self.gain_tol.is_finite()) {
            return Err(Error::Config(format!(
                "gain_tol must be positive and finite, got {}",
                self.gain_tol
            )));
        }
        if self.max_points < 2 {
            return Err(Error::Config(format!(
                "max_points must be at least 2, got {}",
                self.max_points
            )));
        }
        if self.divergence_cap.is_nan() || self.divergence_cap <= 0.0 {
            return Err(Error::Config(format!(
                "divergence_cap must be positive, got {}",
                self.divergence_cap
            )));
        }
        if self.divergence_levels < 2 {
            return Err(Error::Config(format!(
                "divergence_levels must be at least 2, got {}",
                self.divergence_levels
            )));
        }
        if !(1..=12).contains(&self.probe_depth) {
            return Err(Error::Config(format!(
                "probe_depth must be in 1..=12, got {}",
                self.probe_depth
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    Diverging,
    BudgetExhausted,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::Diverging => "diverging",
            Status::BudgetExhausted => "budget_exhausted",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub level: usize,
    pub points: usize,
    /// Best lower bound seen up to this level.
    pub sum: f64,
}

/// Result of [`estimate_variation`]. `value` is a lower bound on the
/// variation, never an upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationEstimate {
    pub value: f64,
    pub status: Status,
    pub trace: Vec<TraceEntry>,
    pub final_partition: Partition,
}

impl VariationEstimate {
    /// Relative gain of the last level, or `None` before any refinement.
    pub fn last_relative_gain(&self) -> Option<f64> {
        let n = self.trace.len();
        (n >= 2).then(|| relative_gain(self.trace[n - 2].sum, self.trace[n - 1].sum))
    }
}

fn relative_gain(prev: f64, next: f64) -> f64 {
    if next > 0.0 {
        (next - prev) / next
    } else {
        0.0
    }
}

/// Evaluation context shared by the sums and the refiner.
#[derive(Clone, Copy)]
struct Probe<'a> {
    g: &'a FunctionSpec,
    p: &'a dyn TwoNorm,
    k: &'a ComplexVector,
}

impl<'a> Probe<'a> {
    fn new(g: &'a FunctionSpec, p: &'a dyn TwoNorm, k: &'a ComplexVector) -> Result<Self> {
        if g.codomain_dim() != p.dim_a() {
            return Err(Error::Dimension {
                expected: p.dim_a(),
                got: g.codomain_dim(),
            });
        }
        if k.dim() != p.dim_b() {
            return Err(Error::Dimension {
                expected: p.dim_b(),
                got: k.dim(),
            });
        }
        Ok(Self { g, p, k })
    }

    fn eval_many(&self, ts: &[f64]) -> Result<Vec<ComplexVector>> {
        if ts.len() < PARALLEL_THRESHOLD {
            ts.iter().map(|&t| self.g.eval(t)).collect()
        } else {
            ts.par_iter().map(|&t| self.g.eval(t)).collect()
        }
    }

    /// `||b - a, k||`.
    fn dist(&self, a: &ComplexVector, b: &ComplexVector) -> Result<f64> {
        self.p.evaluate(&b.checked_sub(a)?, self.k)
    }

    fn terms(&self, values: &[ComplexVector]) -> Result<Vec<f64>> {
        values.windows(2).map(|w| self.dist(&w[0], &w[1])).collect()
    }
}

fn ordered_sum(terms: &[f64]) -> f64 {
    terms.iter().fold(0.0, |acc, x| acc + x)
}

/// `sum_i ||g(t_i) - g(t_{i-1}), k||` over `partition`, added left to right.
pub fn variation_sum(
    g: &FunctionSpec,
    p: &dyn TwoNorm,
    k: &ComplexVector,
    partition: &Partition,
) -> Result<f64> {
    partition.check_over(&g.domain())?;
    let probe = Probe::new(g, p, k)?;
    let values = probe.eval_many(partition.points())?;
    Ok(ordered_sum(&probe.terms(&values)?))
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * 0.5
}

fn bisectable(lo: f64, hi: f64) -> bool {
    let m = midpoint(lo, hi);
    lo < m && m < hi
}

/// Gain estimate of one subinterval, with the midpoint value it sampled.
#[derive(Debug, Clone)]
struct Cell {
    gain: f64,
    mid: ComplexVector,
}

/// Partition with cached samples, increment norms, and per-subinterval gains.
struct Refiner<'a> {
    probe: Probe<'a>,
    cfg: RefineConfig,
    span: f64,
    points: Vec<f64>,
    values: Vec<ComplexVector>,
    terms: Vec<f64>,
    cells: Vec<Option<Cell>>,
}

impl<'a> Refiner<'a> {
    fn new(probe: Probe<'a>, partition: &Partition, cfg: RefineConfig) -> Result<Self> {
        partition.check_over(&probe.g.domain())?;
        let points = partition.points().to_vec();
        let values = probe.eval_many(&points)?;
        let terms = probe.terms(&values)?;
        let cells = vec![None; terms.len()];
        Ok(Self {
            probe,
            cfg,
            span: partition.hi() - partition.lo(),
            points,
            values,
            terms,
            cells,
        })
    }

    fn sum(&self) -> f64 {
        ordered_sum(&self.terms)
    }

    fn partition(&self) -> Partition {
        Partition {
            points: self.points.clone(),
        }
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    /// Gain of subinterval `i` on a uniform probe grid of `2^depth` pieces:
    /// the finer sum minus the current increment. Nonnegative by the
    /// triangle inequality; rounding noise is clamped to zero.
    fn probe_cell(&self, i: usize, depth: u32) -> Result<Cell> {
        let (lo, hi) = (self.points[i], self.points[i + 1]);
        let pieces = 1usize << depth;
        let len = hi - lo;
        let ts: Vec<f64> = (1..pieces)
            .map(|j| lo + len * (j as f64 / pieces as f64))
            .collect();
        let inner = ts
            .iter()
            .map(|&t| self.probe.g.eval(t))
            .collect::<Result<Vec<_>>>()?;
        let mut fine = 0.0;
        let mut prev = &self.values[i];
        for v in inner.iter().chain(std::iter::once(&self.values[i + 1])) {
            fine += self.probe.dist(prev, v)?;
            prev = v;
        }
        let raw = fine - self.terms[i];
        let gain = if raw <= 1e-12 * fine { 0.0 } else { raw };
        Ok(Cell {
            gain,
            mid: inner[pieces / 2 - 1].clone(),
        })
    }

    fn fill_cells(&mut self, depth: u32) -> Result<()> {
        let missing: Vec<usize> = (0..self.cells.len())
            .filter(|&i| self.cells[i].is_none())
            .collect();
        let fresh: Vec<Cell> = if missing.len() * ((1usize << depth) - 1) < PARALLEL_THRESHOLD {
            missing
                .iter()
                .map(|&i| self.probe_cell(i, depth))
                .collect::<Result<_>>()?
        } else {
            missing
                .par_iter()
                .map(|&i| self.probe_cell(i, depth))
                .collect::<Result<_>>()?
        };
        for (i, cell) in missing.into_iter().zip(fresh) {
            self.cells[i] = Some(cell);
        }
        Ok(())
    }

    fn gain(&self, i: usize) -> f64 {
        self.cells[i].as_ref().map_or(0.0, |c| c.gain)
    }

    fn length(&self, i: usize) -> f64 {
        self.points[i + 1] - self.points[i]
    }

    /// Orders subintervals by gain, then width, then position.
    fn ranked(&self, candidates: &[usize]) -> Vec<usize> {
        let mut order = candidates.to_vec();
        order.sort_by(|&a, &b| {
            self.gain(b)
                .total_cmp(&self.gain(a))
                .then_with(|| self.length(b).total_cmp(&self.length(a)))
                .then_with(|| a.cmp(&b))
        });
        order
    }

    /// Subintervals to bisect at the next level, in increasing order.
    fn plan(&mut self) -> Result<Vec<usize>> {
        let candidates: Vec<usize> = (0..self.terms.len())
            .filter(|&i| bisectable(self.points[i], self.points[i + 1]))
            .collect();
        let mut chosen = match self.cfg.strategy {
            Strategy::Dyadic => candidates,
            Strategy::Greedy => {
                self.fill_cells(1)?;
                let take = self.terms.len().div_ceil(2).min(candidates.len());
                self.ranked(&candidates)[..take].to_vec()
            }
            Strategy::Adaptive => {
                self.fill_cells(self.cfg.probe_depth)?;
                let budget = self.cfg.gain_tol * self.sum() / self.span;
                let picked: Vec<usize> = candidates
                    .iter()
                    .copied()
                    .filter(|&i| self.gain(i) > budget * self.length(i))
                    .collect();
                if picked.is_empty() {
                    self.ranked(&candidates).into_iter().take(1).collect()
                } else {
                    picked
                }
            }
        };
        chosen.sort_unstable();
        Ok(chosen)
    }

    /// Bisects the listed subintervals (increasing order).
    fn apply(&mut self, chosen: &[usize]) -> Result<()> {
        let mids: Vec<f64> = chosen
            .iter()
            .map(|&i| midpoint(self.points[i], self.points[i + 1]))
            .collect();
        let missing: Vec<f64> = chosen
            .iter()
            .zip(&mids)
            .filter(|(i, _)| self.cells[**i].is_none())
            .map(|(_, &m)| m)
            .collect();
        let mut fresh = self.probe.eval_many(&missing)?.into_iter();

        let n = self.points.len() + chosen.len();
        let mut points = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        let mut terms = Vec::with_capacity(n - 1);
        let mut cells = Vec::with_capacity(n - 1);
        let mut next = chosen.iter().zip(&mids).peekable();
        let old_cells = std::mem::take(&mut self.cells);
        for (i, cell) in old_cells.into_iter().enumerate() {
            points.push(self.points[i]);
            values.push(self.values[i].clone());
            match next.peek() {
                Some((&j, &m)) if j == i => {
                    next.next();
                    let mid = match cell {
                        Some(c) => c.mid,
                        None => fresh.next().expect("one fresh value per uncached midpoint"),
                    };
                    terms.push(self.probe.dist(&self.values[i], &mid)?);
                    terms.push(self.probe.dist(&mid, &self.values[i + 1])?);
                    points.push(m);
                    values.push(mid);
                    cells.push(None);
                    cells.push(None);
                }
                _ => {
                    terms.push(self.terms[i]);
                    cells.push(cell);
                }
            }
        }
        points.push(*self.points.last().expect("nonempty"));
        values.push(self.values.last().expect("nonempty").clone());
        self.points = points;
        self.values = values;
        self.terms = terms;
        self.cells = cells;
        Ok(())
    }
}

/// One refinement step of `partition` under `cfg.strategy`. The result
/// strictly contains `partition` unless no subinterval can be split in
/// floating point.
pub fn refine(
    partition: &Partition,
    g: &FunctionSpec,
    p: &dyn TwoNorm,
    k: &ComplexVector,
    cfg: &RefineConfig,
) -> Result<Partition> {
    cfg.validate()?;
    let mut refiner = Refiner::new(Probe::new(g, p, k)?, partition, *cfg)?;
    let chosen = refiner.plan()?;
    refiner.apply(&chosen)?;
    Ok(refiner.partition())
}

/// Lower-bound estimate of the variation of `g`, refining from `{a, b}`.
pub fn estimate_variation(
    g: &FunctionSpec,
    p: &dyn TwoNorm,
    k: &ComplexVector,
    cfg: &RefineConfig,
) -> Result<VariationEstimate> {
    estimate_variation_from(g, p, k, &Partition::trivial(g.domain()), cfg)
}

/// As [`estimate_variation`], refining from `initial`.
pub fn estimate_variation_from(
    g: &FunctionSpec,
    p: &dyn TwoNorm,
    k: &ComplexVector,
    initial: &Partition,
    cfg: &RefineConfig,
) -> Result<VariationEstimate> {
    cfg.validate()?;
    let mut refiner = Refiner::new(Probe::new(g, p, k)?, initial, *cfg)?;
    let mut trace = vec![TraceEntry {
        level: 0,
        points: refiner.len(),
        sum: refiner.sum(),
    }];
    let mut gains: Vec<f64> = Vec::new();
    let mut quiet = 0;

    let status = loop {
        let chosen = refiner.plan()?;
        if chosen.is_empty() || refiner.len() + chosen.len() > cfg.max_points {
            break Status::BudgetExhausted;
        }
        refiner.apply(&chosen)?;

        let prev = trace.last().expect("nonempty").sum;
        let sum = refiner.sum().max(prev);
        trace.push(TraceEntry {
            level: trace.len(),
            points: refiner.len(),
            sum,
        });

        if sum > cfg.divergence_cap {
            break Status::Diverging;
        }
        let rel = relative_gain(prev, sum);
        quiet = if rel < cfg.gain_tol { quiet + 1 } else { 0 };
        if quiet >= 2 {
            break Status::Converged;
        }
        gains.push(sum - prev);
        if sustained_growth(&trace, &gains, cfg) {
            break Status::Diverging;
        }
    };

    let value = trace.last().expect("nonempty").sum;
    Ok(VariationEstimate {
        value,
        status,
        trace,
        final_partition: refiner.partition(),
    })
}

/// Whether the last `divergence_levels` levels all grew the sum by more than
/// the tolerance and the mean gain of the later half of that window did not
/// fall below the mean of the earlier half.
fn sustained_growth(trace: &[TraceEntry], gains: &[f64], cfg: &RefineConfig) -> bool {
    let w = cfg.divergence_levels;
    if gains.len() < w {
        return false;
    }
    let window = &gains[gains.len() - w..];
    let sums = &trace[trace.len() - w..];
    let grows = window
        .iter()
        .zip(sums)
        .all(|(g, e)| *g > cfg.gain_tol * e.sum);
    if !grows {
        return false;
    }
    let half = w / 2;
    let early: f64 = window[..half].iter().sum::<f64>() / half as f64;
    let late: f64 = window[w - half..].iter().sum::<f64>() / half as f64;
    late >= early
}

/// Estimates on both sides of a split point and on the whole interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitCheck {
    pub lower: VariationEstimate,
    pub upper: VariationEstimate,
    /// Whole-interval lower bound on a grid containing the split point and
    /// both side grids.
    pub full: f64,
    pub full_partition: Partition,
}

impl SplitCheck {
    pub fn values(&self) -> (f64, f64, f64) {
        (self.lower.value, self.upper.value, self.full)
    }
}

/// `(V over [a, split], V over [split, b], V over [a, b])`. The whole-interval
/// grid always contains `split` and both side grids, so the first two add up
/// to at most the third.
pub fn split_check(
    g: &FunctionSpec,
    p: &dyn TwoNorm,
    k: &ComplexVector,
    split: f64,
    cfg: &RefineConfig,
) -> Result<SplitCheck> {
    let domain = g.domain();
    if !(domain.lo() < split && split < domain.hi()) {
        return Err(Error::Domain(format!(
            "split point {split} must lie strictly inside {domain}"
        )));
    }
    let lower = estimate_variation(
        &g.restricted(Interval::new(domain.lo(), split)?)?,
        p,
        k,
        cfg,
    )?;
    let upper = estimate_variation(
        &g.restricted(Interval::new(split, domain.hi())?)?,
        p,
        k,
        cfg,
    )?;
    let seed = Partition::new(vec![domain.lo(), split, domain.hi()])?;
    let whole = estimate_variation_from(g, p, k, &seed, cfg)?;
    let merged = whole
        .final_partition
        .merge(&lower.final_partition)
        .merge(&upper.final_partition);
    let full = whole.value.max(variation_sum(g, p, k, &merged)?);
    Ok(SplitCheck {
        lower,
        upper,
        full,
        full_partition: merged,
    })
}

/// Largest pairwise distance on a grid against the variation sum over it.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseBound {
    pub holds: bool,
    /// Maximizing pair `(s, m)` with `s < m`.
    pub witness: (f64, f64),
    /// `||g(s) - g(m), k||` at the witness.
    pub value: f64,
    /// Variation sum over the grid.
    pub bound: f64,
}

/// Checks `||g(s) - g(m), k|| <= sum over partition` for every pair of grid
/// points. Quadratic in the partition size.
pub fn pointwise_bound_check(
    g: &FunctionSpec,
    p: &dyn TwoNorm,
    k: &ComplexVector,
    partition: &Partition,
) -> Result<PointwiseBound> {
    partition.check_over(&g.domain())?;
    let probe = Probe::new(g, p, k)?;
    let values = probe.eval_many(partition.points())?;
    pointwise_bound_on_samples(partition.points(), &values, p, k)
}

/// [`pointwise_bound_check`] over explicit samples `values[i] = g(points[i])`.
pub fn pointwise_bound_on_samples(
    points: &[f64],
    values: &[ComplexVector],
    p: &dyn TwoNorm,
    k: &ComplexVector,
) -> Result<PointwiseBound> {
    if points.len() != values.len() || points.len() < 2 {
        return Err(Error::Domain(
            "need matching points and values, at least two".into(),
        ));
    }
    let mut bound = 0.0;
    for w in values.windows(2) {
        bound += p.evaluate(&w[1].checked_sub(&w[0])?, k)?;
    }
    let mut best = (0, 1, f64::NEG_INFINITY);
    for s in 0..values.len() {
        for m in s + 1..values.len() {
            let d = p.evaluate(&values[s].checked_sub(&values[m])?, k)?;
            if d.total_cmp(&best.2) == Ordering::Greater {
                best = (s, m, d);
            }
        }
    }
    let value = best.2;
    let holds =
        value <= bound + crate::numeric::scaled_slack(bound.max(value)) * values.len() as f64;
    Ok(PointwiseBound {
        holds,
        witness: (points[best.0], points[best.1]),
        value,
        bound,
    })
}
