//! Randomized checks of the pairing axioms, the variation inequalities and
//! the axioms of the bounded-variation two-norm.
//!
//! Every trial draws from its own ChaCha stream `(seed, trial)`, so trials
//! run in parallel and the merged report depends only on the seed and the
//! inputs. Trial 0 of each suite is a fixed set of edge cases.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bv::{bv_linear_combine, bv_two_norm_2g, BvFunction};
use crate::error::{Error, Result};
use crate::function::{CatalogId, FunctionSpec};
use crate::numeric::{eq_tol, le_tol, scaled_slack, slack};
use crate::spaces::{reverse_triangle_gap, TwoNorm};
use crate::variation::{
    pointwise_bound_check, refine, split_check, variation_sum, Partition, RefineConfig,
};
use crate::vector::ComplexVector;

/// Half-width of the box random components are drawn from.
const BOX: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub inputs: Value,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Failing comparison with the largest excess; `None` when the check
    /// passed.
    pub worst_witness: Option<Witness>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub checks: Vec<Check>,
    pub seed: u64,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Appends the checks of `other`, keeping this report's seed.
    pub fn extend(&mut self, other: AxiomReport) {
        self.checks.extend(other.checks);
    }
}

/// One comparison made inside a trial.
struct Outcome {
    check: &'static str,
    excess: f64,
    failed: bool,
    witness: Witness,
}

/// Comparisons collected by one trial, in the order they were made.
#[derive(Default)]
struct Trial {
    outcomes: Vec<Outcome>,
}

impl Trial {
    /// `lhs <= rhs` up to the comparison slack.
    fn le(&mut self, check: &'static str, lhs: f64, rhs: f64, inputs: impl FnOnce() -> Value) {
        self.push(check, lhs - rhs, !le_tol(lhs, rhs), lhs, rhs, inputs);
    }

    /// `lhs <= rhs + allowance`.
    fn le_within(
        &mut self,
        check: &'static str,
        lhs: f64,
        rhs: f64,
        allowance: f64,
        inputs: impl FnOnce() -> Value,
    ) {
        self.push(check, lhs - rhs, lhs > rhs + allowance, lhs, rhs, inputs);
    }

    fn eq(&mut self, check: &'static str, lhs: f64, rhs: f64, inputs: impl FnOnce() -> Value) {
        self.push(
            check,
            (lhs - rhs).abs(),
            !eq_tol(lhs, rhs),
            lhs,
            rhs,
            inputs,
        );
    }

    fn exact(&mut self, check: &'static str, lhs: f64, rhs: f64, inputs: impl FnOnce() -> Value) {
        self.push(check, (lhs - rhs).abs(), lhs != rhs, lhs, rhs, inputs);
    }

    fn push(
        &mut self,
        check: &'static str,
        excess: f64,
        failed: bool,
        lhs: f64,
        rhs: f64,
        inputs: impl FnOnce() -> Value,
    ) {
        let inputs = if failed { inputs() } else { Value::Null };
        self.outcomes.push(Outcome {
            check,
            excess,
            failed,
            witness: Witness { inputs, lhs, rhs },
        });
    }
}

/// Merges trials in index order. `names` fixes the order of checks in the
/// report; every listed check appears even if no trial reached it.
fn merge(names: &[&'static str], trials: Vec<Trial>, seed: u64) -> AxiomReport {
    let mut checks: Vec<Check> = names
        .iter()
        .map(|n| Check {
            name: n.to_string(),
            trials: 0,
            failures: 0,
            worst_witness: None,
        })
        .collect();
    let mut worst: Vec<f64> = vec![f64::NEG_INFINITY; names.len()];
    for trial in trials {
        let mut seen = vec![false; names.len()];
        let mut failed = vec![false; names.len()];
        for o in trial.outcomes {
            let i = names
                .iter()
                .position(|n| *n == o.check)
                .expect("check names are registered");
            seen[i] = true;
            if o.failed {
                failed[i] = true;
                if o.excess > worst[i] || o.excess.is_nan() && checks[i].worst_witness.is_none() {
                    worst[i] = o.excess;
                    checks[i].worst_witness = Some(o.witness);
                }
            }
        }
        for i in 0..names.len() {
            checks[i].trials += seen[i] as usize;
            checks[i].failures += failed[i] as usize;
        }
    }
    AxiomReport { checks, seed }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-BOX..=BOX), rng.random_range(-BOX..=BOX))
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> ComplexVector {
    ComplexVector::new((0..dim).map(|_| random_scalar(rng)).collect()).expect("positive dimension")
}

fn cv(v: &ComplexVector) -> Value {
    serde_json::to_value(v).expect("vectors serialize")
}

fn cz(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn run_trials<F>(trials: usize, f: F) -> Vec<Trial>
where
    F: Fn(usize) -> Trial + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

fn require_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    Ok(())
}

const PAIRING_CHECKS: &[&str] = &[
    "nonnegativity",
    "G1a",
    "G1b",
    "G2",
    "G3",
    "slice-subspace",
    "S1",
    "S2",
    "S3",
];

/// Checks homogeneity and both triangle inequalities of `p`, closure of its
/// slices under linear combinations, and the symmetric axioms when
/// `symmetric` is set. Pairs outside the admissible set are skipped.
pub fn check_pairing_axioms(
    p: &dyn TwoNorm,
    symmetric: bool,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    require_trials(trials)?;
    let (na, nb) = (p.dim_a(), p.dim_b());
    let names: &[&'static str] = if symmetric {
        PAIRING_CHECKS
    } else {
        &PAIRING_CHECKS[..6]
    };

    let one = |t: &mut Trial,
               a: &ComplexVector,
               b: &ComplexVector,
               c: &ComplexVector,
               d: &ComplexVector,
               alpha: Complex64| {
        let inputs = || json!({"a": cv(a), "b": cv(b), "c": cv(c), "d": cv(d), "alpha": cz(alpha)});
        if p.admits(a, b) {
            let ab = p.norm(a, b);
            t.push(
                "nonnegativity",
                -ab,
                ab.is_nan() || ab < 0.0,
                0.0,
                ab,
                inputs,
            );
            t.eq("G1a", p.norm(&a.scale(alpha), b), alpha.norm() * ab, inputs);
            t.eq("G1b", p.norm(a, &b.scale(alpha)), alpha.norm() * ab, inputs);
            if p.admits(a, d) {
                let bd = b + d;
                if p.admits(a, &bd) {
                    t.le("G2", p.norm(a, &bd), ab + p.norm(a, d), inputs);
                }
            }
            if p.admits(c, b) {
                let ac = a + c;
                t.le("G3", p.norm(&ac, b), ab + p.norm(c, b), inputs);
                let combo = &a.scale(alpha) + c;
                let admitted = p.admits(&combo, b);
                t.push(
                    "slice-subspace",
                    0.0,
                    !admitted,
                    admitted as u8 as f64,
                    1.0,
                    inputs,
                );
            }
        }
        if symmetric {
            if na != nb {
                t.push(
                    "S1",
                    f64::INFINITY,
                    true,
                    na as f64,
                    nb as f64,
                    || json!({"reason": "dim_a != dim_b"}),
                );
                return;
            }
            let (x, y, z) = (a, b, c);
            if p.admits(x, y) && p.admits(y, x) {
                t.eq("S1", p.norm(x, y), p.norm(y, x), inputs);
                t.eq(
                    "S2",
                    p.norm(&x.scale(alpha), y),
                    alpha.norm() * p.norm(x, y),
                    inputs,
                );
                if p.admits(z, y) {
                    t.le(
                        "S3",
                        p.norm(&(x + z), y),
                        p.norm(x, y) + p.norm(z, y),
                        inputs,
                    );
                }
            }
        }
    };

    let results = run_trials(trials, |trial| {
        let mut t = Trial::default();
        if trial == 0 {
            let (ea, eb) = (ComplexVector::basis(na, 0), ComplexVector::basis(nb, 0));
            let (za, zb) = (ComplexVector::zeros(na), ComplexVector::zeros(nb));
            let ones_a = ComplexVector::real(&vec![1.0; na]);
            let ones_b = ComplexVector::real(&vec![1.0; nb]);
            let i = Complex64::new(0.0, 1.0);
            one(&mut t, &ea, &eb, &ea, &eb, Complex64::new(-1.0, 0.0));
            one(&mut t, &za, &eb, &ea, &zb, Complex64::new(0.0, 0.0));
            one(&mut t, &ea, &zb, &za, &eb, Complex64::new(1.0, 0.0));
            one(&mut t, &ones_a, &ones_b, &ones_a, &ones_b, i);
        } else {
            let mut rng = trial_rng(seed, trial);
            let (a, b) = (random_vector(&mut rng, na), random_vector(&mut rng, nb));
            let (c, d) = (random_vector(&mut rng, na), random_vector(&mut rng, nb));
            let alpha = random_scalar(&mut rng);
            one(&mut t, &a, &b, &c, &d, alpha);
        }
        t
    });
    Ok(merge(names, results, seed))
}

const THEOREM_CHECKS: &[&str] = &[
    "homogeneity",
    "subadditivity",
    "split",
    "pointwise-bound",
    "reverse-triangle",
    "refinement-monotonicity",
];

/// Resolves catalog names and zero-pads scalar curves into `dim` components.
fn catalog_functions(names: &[&str], dim: usize) -> Result<Vec<(CatalogId, FunctionSpec)>> {
    names
        .iter()
        .map(|name| {
            let id = CatalogId::from_name(name).ok_or_else(|| Error::Unknown {
                kind: "catalog function",
                name: name.to_string(),
            })?;
            let spec = FunctionSpec::catalog(id, id.default_domain());
            let spec = if id.dim() == dim {
                spec
            } else {
                spec.embedded(dim)?
            };
            Ok((id, spec))
        })
        .collect()
}

/// Random partition of the domain of `g` with up to `max_inner` interior
/// points, plus `extra` points.
fn random_partition(
    rng: &mut ChaCha8Rng,
    g: &FunctionSpec,
    max_inner: usize,
    extra: &[f64],
) -> Partition {
    let d = g.domain();
    let n = rng.random_range(0..=max_inner);
    let mut points: Vec<f64> = (0..n).map(|_| rng.random_range(d.lo()..d.hi())).collect();
    points.extend_from_slice(extra);
    points.push(d.lo());
    points.push(d.hi());
    points.sort_by(f64::total_cmp);
    points.dedup();
    Partition::new(points).expect("sorted, deduplicated, inside the domain")
}

/// Per-partition homogeneity and subadditivity, the split inequality,
/// the pointwise bound, the reverse triangle inequality at sampled values,
/// and monotonicity under refinement, for each named catalog function.
/// Scalar curves are embedded into the first component of the pairing's
/// first slot.
pub fn check_variation_theorems(
    catalog: &[&str],
    p: &dyn TwoNorm,
    k: &ComplexVector,
    cfg: &RefineConfig,
    seed: u64,
    trials: usize,
) -> Result<AxiomReport> {
    require_trials(trials)?;
    cfg.validate()?;
    if k.dim() != p.dim_b() {
        return Err(Error::Dimension {
            expected: p.dim_b(),
            got: k.dim(),
        });
    }
    let funcs = catalog_functions(catalog, p.dim_a())?;
    if funcs.is_empty() {
        return Err(Error::Config("no catalog functions to check".into()));
    }

    let results: Vec<Result<Trial>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut t = Trial::default();
            let mut rng = trial_rng(seed, trial);
            for (i, (id, g)) in funcs.iter().enumerate() {
                let (_, h) = &funcs[(i + 1) % funcs.len()];
                let d = g.domain();
                let (alpha, split, s, m) = if trial == 0 {
                    (
                        Complex64::new(-1.0, 0.0),
                        d.lo() + d.length() / 2.0,
                        d.lo(),
                        d.hi(),
                    )
                } else {
                    let alpha = random_scalar(&mut rng);
                    let split = rng.random_range(d.lo()..d.hi());
                    let split = if split > d.lo() {
                        split
                    } else {
                        d.lo() + d.length() / 2.0
                    };
                    (
                        alpha,
                        split,
                        rng.random_range(d.lo()..=d.hi()),
                        rng.random_range(d.lo()..=d.hi()),
                    )
                };
                let part = random_partition(&mut rng, g, 16, &[s, m]);
                theorem_trial(
                    &mut t,
                    id.name(),
                    g,
                    h,
                    p,
                    k,
                    cfg,
                    alpha,
                    split,
                    s,
                    m,
                    &part,
                )?;
                if trial == 0 {
                    let zero = Complex64::new(0.0, 0.0);
                    let base = variation_sum(g, p, k, &part)?;
                    let scaled = variation_sum(&g.scaled(zero), p, k, &part)?;
                    t.eq(
                        "homogeneity",
                        scaled,
                        0.0 * base,
                        || json!({"function": id.name(), "alpha": cz(zero)}),
                    );
                }
            }
            Ok(t)
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(merge(THEOREM_CHECKS, results, seed))
}

#[allow(clippy::too_many_arguments)]
fn theorem_trial(
    t: &mut Trial,
    name: &str,
    g: &FunctionSpec,
    h: &FunctionSpec,
    p: &dyn TwoNorm,
    k: &ComplexVector,
    cfg: &RefineConfig,
    alpha: Complex64,
    split: f64,
    s: f64,
    m: f64,
    part: &Partition,
) -> Result<()> {
    let pts = || json!(part.points());
    let base = variation_sum(g, p, k, part)?;

    let scaled = variation_sum(&g.scaled(alpha), p, k, part)?;
    t.eq(
        "homogeneity",
        scaled,
        alpha.norm() * base,
        || json!({"function": name, "alpha": cz(alpha), "partition": pts()}),
    );

    let with_h = variation_sum(h, p, k, part)?;
    let sum = variation_sum(&g.sum(h)?, p, k, part)?;
    t.le(
        "subadditivity",
        sum,
        base + with_h,
        || json!({"function": name, "partner": h.describe(), "partition": pts()}),
    );

    let sc = split_check(g, p, k, split, cfg)?;
    let (lo, hi, full) = sc.values();
    t.le(
        "split",
        lo + hi,
        full,
        || json!({"function": name, "split": split, "lower": lo, "upper": hi}),
    );

    let pb = pointwise_bound_check(g, p, k, part)?;
    let pb_slack = scaled_slack(pb.bound) * part.len() as f64;
    t.le_within(
        "pointwise-bound",
        pb.value,
        pb.bound,
        slack(pb.value, pb.bound).max(pb_slack),
        || json!({"function": name, "witness": [pb.witness.0, pb.witness.1], "partition": pts()}),
    );

    let (gs, gm) = (g.eval(s)?, g.eval(m)?);
    let (gap, dist) = reverse_triangle_gap(p, &gs, &gm, k)?;
    t.le(
        "reverse-triangle",
        gap,
        dist,
        || json!({"function": name, "s": s, "m": m}),
    );

    let finer = refine(part, g, p, k, cfg)?;
    let after = variation_sum(g, p, k, &finer)?;
    t.le_within(
        "refinement-monotonicity",
        base,
        after,
        scaled_slack(after.max(base)),
        || json!({"function": name, "partition": pts(), "refined": finer.points()}),
    );
    Ok(())
}

const TWO_G_CHECKS: &[&str] = &["S1", "S2", "S3"];

/// Symmetry (exact), homogeneity, and the triangle inequality of
/// `||f, h||_2G` over random picks from `fs`. Sums are formed with
/// [`bv_linear_combine`] and reused across trials.
pub fn check_2g_axioms(fs: &[BvFunction], trials: usize, seed: u64) -> Result<AxiomReport> {
    require_trials(trials)?;
    let Some(first) = fs.first() else {
        return Err(Error::Config("no functions to check".into()));
    };
    for f in &fs[1..] {
        first.check_compatible(f)?;
    }
    let n = fs.len();

    let picks: Vec<(usize, usize, usize, Complex64)> = (0..trials)
        .map(|trial| {
            if trial == 0 {
                (0, 0, 0, Complex64::new(-1.0, 0.0))
            } else {
                let mut rng = trial_rng(seed, trial);
                (
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    random_scalar(&mut rng),
                )
            }
        })
        .collect();

    let mut pairs: Vec<(usize, usize)> = picks
        .iter()
        .map(|&(i, _, l, _)| (i.min(l), i.max(l)))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let sums: HashMap<(usize, usize), BvFunction> = pairs
        .par_iter()
        .map(|&(i, l)| {
            Ok((
                (i, l),
                bv_linear_combine(
                    Complex64::new(1.0, 0.0),
                    &fs[i],
                    Complex64::new(1.0, 0.0),
                    &fs[l],
                )?,
            ))
        })
        .collect::<Result<_>>()?;

    let results: Vec<Result<Trial>> = picks
        .par_iter()
        .enumerate()
        .map(|(trial, &(i, j, l, alpha))| {
            let mut t = Trial::default();
            let alphas: Vec<Complex64> =
                if trial == 0 { vec![alpha, Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)] } else { vec![alpha] };
            let (f, h, g) = (&fs[i], &fs[j], &fs[l]);
            let inputs = || json!({"f": f.spec().describe(), "h": h.spec().describe(), "g": g.spec().describe()});
            let fh = bv_two_norm_2g(f, h)?;
            t.exact("S1", fh, bv_two_norm_2g(h, f)?, inputs);
            for a in alphas {
                let scaled = bv_two_norm_2g(&f.scaled_formula(a), h)?;
                t.eq("S2", scaled, a.norm() * fh, || json!({"f": f.spec().describe(), "h": h.spec().describe(), "alpha": cz(a)}));
                let swapped = bv_two_norm_2g(f, &h.scaled_formula(a))?;
                t.eq("S2", swapped, a.norm() * fh, || json!({"f": f.spec().describe(), "h": h.spec().describe(), "alpha": cz(a)}));
            }
            let fg = &sums[&(i.min(l), i.max(l))];
            t.le("S3", bv_two_norm_2g(fg, h)?, fh + bv_two_norm_2g(g, h)?, inputs);
            Ok(t)
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(merge(TWO_G_CHECKS, results, seed))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::function::Interval;
    use crate::spaces::{
        make_euclidean_modulus, make_modulus_product, BrokenG3, EuclideanNorm, SeminormProduct,
        ZeroPairing,
    };

    #[test]
    fn good_pairings_pass() {
        let report = check_pairing_axioms(&*make_euclidean_modulus(), false, 1000, 1).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.check("G3").unwrap().trials, 1000);
        assert!(
            check_pairing_axioms(&ZeroPairing { dim_a: 2, dim_b: 1 }, false, 200, 3)
                .unwrap()
                .passed()
        );
        assert!(check_pairing_axioms(&*make_modulus_product(), true, 500, 4)
            .unwrap()
            .passed());
        let e: Arc<dyn crate::spaces::Seminorm> = Arc::new(EuclideanNorm { dim: 3 });
        let sym = SeminormProduct::new(e.clone(), e);
        let report = check_pairing_axioms(&sym, true, 500, 5).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checks.len(), PAIRING_CHECKS.len());
    }

    #[test]
    fn broken_pairing_reports_g3_witness() {
        let report = check_pairing_axioms(&BrokenG3, false, 1000, 7).unwrap();
        let g3 = report.check("G3").unwrap();
        assert!(g3.failures >= 1);
        let w = g3.worst_witness.as_ref().unwrap();
        assert!(w.lhs > w.rhs);
        assert!(!report.passed());
        let edge = check_pairing_axioms(&BrokenG3, false, 1, 7).unwrap();
        let w = edge.check("G3").unwrap().worst_witness.clone().unwrap();
        assert_eq!((w.lhs, w.rhs), (4.0, 2.0));
    }

    #[test]
    fn symmetric_checks_need_equal_dimensions() {
        let report = check_pairing_axioms(&*make_euclidean_modulus(), true, 10, 1).unwrap();
        assert_eq!(report.check("S1").unwrap().failures, 10);
    }

    #[test]
    fn reports_are_reproducible() {
        let a = serde_json::to_string(&check_pairing_axioms(&BrokenG3, false, 300, 11).unwrap())
            .unwrap();
        let b = serde_json::to_string(&check_pairing_axioms(&BrokenG3, false, 300, 11).unwrap())
            .unwrap();
        assert_eq!(a, b);
        assert!(check_pairing_axioms(&BrokenG3, false, 0, 11).is_err());
    }

    #[test]
    fn theorem_suite_small() {
        let p = make_euclidean_modulus();
        let k = ComplexVector::real(&[2f64.sqrt()]);
        let cfg = RefineConfig {
            max_points: 1024,
            ..RefineConfig::default()
        };
        let report = check_variation_theorems(
            &["linear_ii", "monotone_id", "const_c"],
            &*p,
            &k,
            &cfg,
            5,
            20,
        )
        .unwrap();
        assert!(report.passed(), "{report:#?}");
        assert_eq!(report.check("split").unwrap().trials, 20);
        assert!(matches!(
            check_variation_theorems(&["nope"], &*p, &k, &cfg, 5, 20),
            Err(Error::Unknown { .. })
        ));
    }

    #[test]
    fn two_g_suite() {
        let dom = Interval::new(1.0, 2.0).unwrap();
        let f = BvFunction::new(
            FunctionSpec::catalog(CatalogId::LinearIi, dom),
            make_euclidean_modulus(),
            ComplexVector::real(&[2f64.sqrt()]),
            RefineConfig::default(),
        )
        .unwrap();
        let two_f = f.scaled_formula(Complex64::new(2.0, 0.0));
        let report = check_2g_axioms(&[f.clone(), two_f], 100, 9).unwrap();
        assert!(report.passed(), "{report:#?}");
        let zero = crate::bv::bv_linear_combine(
            Complex64::new(1.0, 0.0),
            &f,
            Complex64::new(-1.0, 0.0),
            &f,
        )
        .unwrap();
        assert!(check_2g_axioms(&[f, zero], 50, 9).unwrap().passed());
    }
}
