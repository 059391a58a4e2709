//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the report reads top to bottom; exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use bivar::bv::{bv_two_norm_2g, is_2k_bounded, variation_via_seminorm, BvFunction};
use bivar::function::{adversary_partition_sum, TaggedAdversary};
use bivar::harness::{check_pairing_axioms, check_variation_theorems};
use bivar::spaces::{
    make_euclidean_modulus, make_modulus_product, BrokenG3, Modulus, Seminorm, TwoNorm,
};
use bivar::variation::{refine, variation_sum};
use bivar::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn unit() -> Interval {
    Interval::new(0.0, 1.0).unwrap()
}

fn sqrt2() -> ComplexVector {
    ComplexVector::real(&[2f64.sqrt()])
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1_linear_golden() -> Outcome {
    let p = make_euclidean_modulus();
    let start = Instant::now();
    let est = estimate_variation(
        &FunctionSpec::catalog(CatalogId::LinearIi, unit()),
        &*p,
        &sqrt2(),
        &RefineConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if est.status != Status::Converged
        || (est.value - 2.0).abs() > 1e-9
        || elapsed >= Duration::from_secs(1)
    {
        return Err(format!(
            "[0,1]: value {} status {} in {elapsed:?}",
            est.value, est.status
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let a: f64 = rng.random_range(-5.0..5.0);
        let b = a + rng.random_range(0.1..5.0);
        let g = FunctionSpec::catalog(CatalogId::LinearIi, Interval::new(a, b).unwrap());
        let est = estimate_variation(&g, &*p, &sqrt2(), &RefineConfig::default())
            .map_err(|e| e.to_string())?;
        let r = rel(est.value, 2.0 * (b - a));
        worst = worst.max(r);
        if est.status != Status::Converged || r > 1e-9 {
            return Err(format!(
                "[{a}, {b}]: value {} vs {}",
                est.value,
                2.0 * (b - a)
            ));
        }
    }
    Ok(format!(
        "V = {} in {elapsed:?}; worst relative error on random intervals {worst:.1e}",
        est.value
    ))
}

fn c2_two_norm_golden() -> Outcome {
    let mut parts = Vec::new();
    for (a, b, want) in [(1.0, 2.0, 8.0), (2.0, 5.0, 48.0)] {
        let g = FunctionSpec::catalog(CatalogId::LinearIi, Interval::new(a, b).unwrap());
        let f = BvFunction::new(
            g,
            make_euclidean_modulus(),
            sqrt2(),
            RefineConfig::default(),
        )
        .map_err(|e| e.to_string())?;
        let v = bv_two_norm_2g(&f, &f).map_err(|e| e.to_string())?;
        if (v - want).abs() > 1e-9 {
            return Err(format!("[{a},{b}]: {v} vs {want}"));
        }
        parts.push(format!("[{a},{b}] -> {v}"));
    }
    Ok(parts.join(", "))
}

fn c3_adversary() -> Outcome {
    let hi = ComplexVector::new(vec![Complex64::new(0.0, 2.0), Complex64::new(0.0, -1.0)]).unwrap();
    let adv = TaggedAdversary::new(hi, ComplexVector::zeros(2), unit()).unwrap();
    let p = make_euclidean_modulus();
    let k = ComplexVector::scalar(Complex64::new(0.0, -0.5));
    let unit_term = 5f64.sqrt() / 2.0;
    for n in [1usize, 10, 1000] {
        let s = adversary_partition_sum(&adv, &*p, &k, n).map_err(|e| e.to_string())?;
        if rel(s, n as f64 * unit_term) > 1e-12 {
            return Err(format!("n = {n}: {s} vs {}", n as f64 * unit_term));
        }
    }
    let sup = adv.sup_norm(&*p, &k).map_err(|e| e.to_string())?;
    ensure(
        rel(sup, unit_term) <= 1e-12,
        format!("sums n*{unit_term:.12} for n in {{1,10,1000}}; sup ||g(x),k|| = {sup:.12}"),
    )
}

fn c4_refinement_monotone() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let euclid = make_euclidean_modulus();
    let product = make_modulus_product();
    let one = ComplexVector::real(&[1.0]);
    let strategies = [Strategy::Dyadic, Strategy::Greedy, Strategy::Adaptive];
    for trial in 0..50 {
        let id = CatalogId::ALL[rng.random_range(0..CatalogId::ALL.len())];
        let (p, k): (&dyn TwoNorm, &ComplexVector) = if id.dim() == 2 {
            (&*euclid, &sqrt2())
        } else {
            (&*product, &one)
        };
        let k = k.clone();
        let g = FunctionSpec::catalog(id, unit());
        let n = rng.random_range(0..40);
        let mut pts: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        pts.extend([0.0, 1.0]);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let part = Partition::new(pts).unwrap();
        let cfg = RefineConfig::with_strategy(strategies[rng.random_range(0..3)]);
        let before = variation_sum(&g, p, &k, &part).map_err(|e| e.to_string())?;
        let finer = refine(&part, &g, p, &k, &cfg).map_err(|e| e.to_string())?;
        let after = variation_sum(&g, p, &k, &finer).map_err(|e| e.to_string())?;
        if after < before - 1e-12 * before.max(1.0) || !finer.refines(&part) {
            return Err(format!(
                "trial {trial}: {id} {}: {after} < {before}",
                cfg.strategy
            ));
        }
    }
    Ok("50 random function/partition pairs".into())
}

fn c5_theorem_suite() -> Outcome {
    let names: Vec<&str> = CatalogId::ALL.iter().map(|c| c.name()).collect();
    let cfg = RefineConfig {
        max_points: 4096,
        ..RefineConfig::default()
    };
    let start = Instant::now();
    let report =
        check_variation_theorems(&names, &*make_euclidean_modulus(), &sqrt2(), &cfg, 45, 200)
            .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let summary: Vec<String> = report
        .checks
        .iter()
        .map(|c| format!("{} {}/{}", c.name, c.failures, c.trials))
        .collect();
    ensure(
        report.passed() && elapsed < Duration::from_secs(30),
        format!("{} in {elapsed:.1?}", summary.join(", ")),
    )
}

fn c6_axiom_suite() -> Outcome {
    let euclid = check_pairing_axioms(&*make_euclidean_modulus(), false, 10_000, 46)
        .map_err(|e| e.to_string())?;
    let product = check_pairing_axioms(&*make_modulus_product(), true, 10_000, 46)
        .map_err(|e| e.to_string())?;
    let broken = check_pairing_axioms(&BrokenG3, false, 1000, 46).map_err(|e| e.to_string())?;
    let g3 = broken.check("G3").expect("G3 is checked");
    let witness = g3
        .worst_witness
        .as_ref()
        .map(|w| format!("{} > {}", w.lhs, w.rhs));
    ensure(
        euclid.passed() && product.passed() && g3.failures > 0 && witness.is_some(),
        format!(
            "euclidean-modulus {} failures, modulus-product {} failures; broken-g3 G3 failures {}/{} (worst {})",
            euclid.failures(),
            product.failures(),
            g3.failures,
            g3.trials,
            witness.unwrap_or_default()
        ),
    )
}

fn c7_seminorm_reduction() -> Outcome {
    let m: Arc<dyn Seminorm> = Arc::new(Modulus);
    let k = ComplexVector::real(&[3.0]);
    let cfg = RefineConfig::default();
    let mut parts = Vec::new();
    for id in [CatalogId::MonotoneId, CatalogId::X2sinInvX] {
        let g = FunctionSpec::catalog(id, unit());
        let direct = estimate_variation(&g, &*make_modulus_product(), &k, &cfg)
            .map_err(|e| e.to_string())?;
        let reduced = variation_via_seminorm(&g, m.clone(), &k, m.clone(), &cfg)
            .map_err(|e| e.to_string())?;
        let r = rel(reduced, direct.value);
        if r > 1e-6 {
            return Err(format!("{id}: {reduced} vs {}", direct.value));
        }
        parts.push(format!("{id} {reduced:.9} (rel {r:.1e})"));
    }
    Ok(parts.join(", "))
}

/// `2 sin u - u cos u`; its zeros `u_j`, one in each `(j pi, (j + 1/2) pi)`,
/// are the reciprocals of the turning points of `t^2 sin(1/t)`.
fn turning(u: f64) -> f64 {
    2.0 * u.sin() - u * u.cos()
}

fn turning_root(j: usize) -> f64 {
    let (mut lo, mut hi) = (j as f64 * PI, (j as f64 + 0.5) * PI);
    let f_lo = turning(lo);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (turning(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Variation of `t^2 sin(1/t)` over `[0, 1]`: the sum over its monotone
/// pieces, exact up to `j = n`, plus the tail `|g(t_n)| + 2 sum_{j>n} 1/u_j^2`.
fn x2sin_variation_oracle(n: usize) -> f64 {
    let g = |t: f64| t * t * (1.0 / t).sin();
    let mut prev = g(1.0);
    let mut total = 0.0;
    for j in 1..=n {
        let v = g(1.0 / turning_root(j));
        total += (v - prev).abs();
        prev = v;
    }
    total + prev.abs() + 2.0 / (PI * PI * (n as f64 + 1.0))
}

/// Uniform `2^levels`-piece sum of `|t^2 sin(1/t)|` increments.
fn x2sin_uniform_sum(levels: u32) -> f64 {
    let n = 1usize << levels;
    let g = |t: f64| {
        if t == 0.0 {
            0.0
        } else {
            t * t * (1.0 / t).sin()
        }
    };
    let mut prev = 0.0;
    let mut total = 0.0;
    for j in 1..=n {
        let v = g(j as f64 / n as f64);
        total += (v - prev).abs();
        prev = v;
    }
    total
}

fn c8_oracle() -> Outcome {
    let exact = x2sin_variation_oracle(200_000);
    let coarser = x2sin_variation_oracle(100_000);
    if rel(exact, coarser) > 1e-9 {
        return Err(format!("oracle unstable: {exact} vs {coarser}"));
    }
    let p = make_modulus_product();
    let one = ComplexVector::real(&[1.0]);
    let cfg = RefineConfig::default();
    let est = estimate_variation(
        &FunctionSpec::catalog(CatalogId::X2sinInvX, unit()),
        &*p,
        &one,
        &cfg,
    )
    .map_err(|e| e.to_string())?;
    let r = rel(est.value, exact);
    let osc = estimate_variation(
        &FunctionSpec::catalog(CatalogId::XsinInvX, unit()),
        &*p,
        &one,
        &cfg,
    )
    .map_err(|e| e.to_string())?;

    let dense = x2sin_uniform_sum(22);
    let doubled = x2sin_uniform_sum(23);
    let dense_note = format!(
        "uniform 2^22 sum {dense:.7} (rel {:.1e} below oracle, doubling change {:.1e})",
        rel(dense, exact),
        rel(doubled, dense)
    );
    ensure(
        est.status == Status::Converged
            && r <= 1e-4
            && est.value <= exact
            && osc.status == Status::Diverging
            && osc.final_partition.len() < cfg.max_points,
        format!(
            "x2sin_inv_x {:.7} vs oracle {exact:.7} (rel {r:.1e}, {} points, {}); xsin_inv_x {} at {} points; {dense_note}",
            est.value,
            est.final_partition.len(),
            est.status,
            osc.status,
            osc.final_partition.len()
        ),
    )
}

fn c9_bounded() -> Outcome {
    let euclid = make_euclidean_modulus();
    let product = make_modulus_product();
    let one = ComplexVector::real(&[1.0]);
    let mut checked = Vec::new();
    for id in CatalogId::ALL {
        let (p, k) = if id.dim() == 2 {
            (euclid.clone(), sqrt2())
        } else {
            (product.clone(), one.clone())
        };
        let g = FunctionSpec::catalog(id, unit());
        let est =
            estimate_variation(&g, &*p, &k, &RefineConfig::default()).map_err(|e| e.to_string())?;
        if est.status != Status::Converged {
            continue;
        }
        let r = is_2k_bounded(&g, &*p, &k, est.value, 10_000).map_err(|e| e.to_string())?;
        if !r.holds {
            return Err(format!("{id}: sup {} > bound {}", r.sup_sample, r.bound));
        }
        checked.push(id.name());
    }
    Ok(format!("holds for {}", checked.join(", ")))
}

const DOCUMENTED: &[&[&str]] = &[
    &[
        "variation",
        "--fn",
        "linear_ii",
        "--interval",
        "0,1",
        "--k",
        "sqrt(2)",
        "--pairing",
        "euclidean-modulus",
    ],
    &[
        "variation",
        "--fn",
        "xsin_inv_x",
        "--interval",
        "0,1",
        "--k",
        "1",
        "--pairing",
        "modulus-product",
    ],
    &["variation", "--fn", "("],
    &[
        "bvnorm",
        "--f",
        "linear_ii",
        "--h",
        "linear_ii",
        "--interval",
        "1,2",
        "--k",
        "sqrt(2)",
        "--pairing",
        "euclidean-modulus",
    ],
    &["bvnorm", "--f", "const_c", "--h", "const_c"],
    &["bvnorm", "--f", "linear_ii", "--h", "2*linear"],
    &[
        "check", "--suite", "axioms", "--trials", "1000", "--seed", "7",
    ],
    &[
        "check",
        "--suite",
        "axioms",
        "--pairing",
        "broken-g3",
        "--trials",
        "1000",
    ],
    &["check", "--suite", "all", "--trials", "0"],
];

fn c10_cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_bivar");
    for args in DOCUMENTED {
        let runs: Vec<_> = (0..2)
            .map(|_| Command::new(bin).args(*args).output().expect("binary runs"))
            .collect();
        if runs[0].stdout != runs[1].stdout || runs[0].status.code() != runs[1].status.code() {
            return Err(format!("`bivar {}` differs between runs", args.join(" ")));
        }
    }
    Ok(format!(
        "{} documented commands byte-identical across two runs",
        DOCUMENTED.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("linear golden value", c1_linear_golden),
        ("two-norm golden value", c2_two_norm_golden),
        ("adversary growth", c3_adversary),
        ("refinement monotonicity", c4_refinement_monotone),
        ("theorem suite", c5_theorem_suite),
        ("axiom suite", c6_axiom_suite),
        ("seminorm reduction", c7_seminorm_reduction),
        ("oracle equivalence", c8_oracle),
        ("(2,k)-bounded implication", c9_bounded),
        ("CLI determinism", c10_cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (verdict, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {verdict} {name} [{:.2?}]: {detail}",
            i + 1,
            start.elapsed()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
