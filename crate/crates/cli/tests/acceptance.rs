//! Acceptance suite: one PASS/FAIL line per criterion. Reference values are
//! recomputed here from closed forms rather than taken from the library.

use std::f64::consts::TAU;
use std::process::Command;
use std::time::{Duration, Instant};

use entgap::bernoulli::{log_rn, separation_test, BernoulliShift, Verdict};
use entgap::cocycle::{
    build_skew, cocycle_identity_check, mean_cocycle_size, odometer_add, odometer_skew_entropy_exact,
    skew_entropy, CarryCocycle, Odometer,
};
use entgap::engine::mc_entropy;
use entgap::{BernoulliParam, FinSet, FinSetGroup, Integers, LazyPoint, Measure};
use entgap_cli::output::{Cell, Table};
use entgap_cli::{run, CommandKind, ExperimentConfig};
use num_complex::Complex64;

// tolerances
const Z_MAX: f64 = 4.0;
const RN_TOL: f64 = 1e-10;
const CARRY_BAND: (f64, f64) = (1.96, 2.04);
const SWEEP_FINAL: f64 = 1e-4;
const BOUND_TOL: f64 = 1e-10;
const HAND_TOL: f64 = 1e-9;
const FOURIER_TOL: f64 = 1e-8;
const CLOSED_FORM_TOL: f64 = 1e-12;

type Check = std::result::Result<String, String>;

fn phi(p: f64) -> f64 {
    (2.0 * p - 1.0) * (p / (1.0 - p)).ln()
}

fn bp(p: f64) -> BernoulliParam {
    BernoulliParam::new(p).unwrap()
}

fn set(xs: &[u32]) -> FinSet {
    FinSet::new(xs.iter().copied()).unwrap()
}

fn floats(t: &Table, col: &str) -> Vec<f64> {
    t.column(col)
        .unwrap_or_else(|| panic!("missing column {col}"))
        .into_iter()
        .map(|c| match c {
            Cell::Float(v) => *v,
            other => panic!("{col}: {other:?}"),
        })
        .collect()
}

fn bools(t: &Table, col: &str) -> Vec<bool> {
    t.column(col)
        .unwrap()
        .into_iter()
        .map(|c| matches!(c, Cell::Bool(true)))
        .collect()
}

fn within(limit: Duration, elapsed: Duration) -> std::result::Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("took {:.1?}, limit {:?}", elapsed, limit))
    }
}

fn c1_closed_form_vs_mc() -> Check {
    let measures: Vec<(&str, Measure<FinSetGroup>, f64)> = vec![
        ("δ{1}", Measure::dirac(FinSetGroup, set(&[1])).unwrap(), 1.0),
        (
            "½δ{1}+½δ{1,2}",
            Measure::new(FinSetGroup, vec![(set(&[1]), 0.5), (set(&[1, 2]), 0.5)]).unwrap(),
            1.5,
        ),
        (
            "uniform {1},{2},{3}",
            Measure::uniform(FinSetGroup, vec![set(&[1]), set(&[2]), set(&[3])]).unwrap(),
            1.0,
        ),
    ];
    let mut worst_z: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for (name, mu, mean_size) in &measures {
        for p in [0.6, 0.75, 0.9] {
            let start = Instant::now();
            let est = mc_entropy(&BernoulliShift::new(bp(p)), mu, 100_000, 42).map_err(|e| e.to_string())?;
            let took = start.elapsed();
            within(Duration::from_secs(10), took)?;
            slowest = slowest.max(took);
            let oracle = phi(p) * mean_size;
            let z = (est.mean - oracle).abs() / est.stderr;
            worst_z = worst_z.max(z);
            if z > Z_MAX {
                return Err(format!("{name}, p={p}: mc {} vs {oracle}, z={z:.2}", est.mean));
            }
        }
    }
    Ok(format!("9 cells, max |z| = {worst_z:.2}, slowest cell {slowest:.2?}"))
}

fn c2_rn_normalization() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let all = FinSet::interval(12).subsets();
    for p in [0.6, 0.75] {
        let base = LazyPoint::sample(7, bp(p));
        for t in &all {
            let coords = t.to_vec();
            let mut integral = 0.0;
            for pattern in 0u32..(1 << coords.len()) {
                let bit = |i: usize| pattern >> i & 1 == 1;
                let weight: f64 = (0..coords.len()).map(|i| if bit(i) { p } else { 1.0 - p }).product();
                let mismatched: Vec<u32> = coords
                    .iter()
                    .enumerate()
                    .filter(|&(i, &n)| base.coordinate(n) != bit(i))
                    .map(|(_, &n)| n)
                    .collect();
                let x = base.act(&FinSet::new(mismatched).unwrap());
                let rn = log_rn(t, &x, bp(p)).exp();
                // ω_p(Tx)/ω_p(x): every coordinate of T flips
                let flipped: f64 = (0..coords.len()).map(|i| if bit(i) { 1.0 - p } else { p }).product();
                let ratio_err = (rn - flipped / weight).abs() / (flipped / weight);
                if ratio_err > RN_TOL {
                    return Err(format!("T={t}, p={p}: derivative {rn} vs {}", flipped / weight));
                }
                integral += weight * rn;
            }
            worst = worst.max((integral - 1.0).abs());
        }
    }
    within(Duration::from_secs(5), start.elapsed())?;
    if worst > RN_TOL {
        return Err(format!("max |∫ - 1| = {worst:e}"));
    }
    Ok(format!("{} sets × 2 values of p, max |∫ - 1| = {worst:.1e}, {:.2?}", all.len(), start.elapsed()))
}

fn c3_odometer_skew() -> Check {
    let start = Instant::now();
    let mu = Measure::dirac(Integers, 1).unwrap();
    let mut worst_z: f64 = 0.0;
    for p in [0.6, 0.75, 0.9] {
        let exact = odometer_skew_entropy_exact(&mu, bp(p));
        // E|c(1,·)| = Σ_j j 2^{-j} = 2
        if (exact - 2.0 * phi(p)).abs() > CLOSED_FORM_TOL {
            return Err(format!("p={p}: exact {exact} vs 2φ = {}", 2.0 * phi(p)));
        }
        let system = build_skew(Odometer, CarryCocycle, bp(p)).map_err(|e| e.to_string())?;
        let direct = mc_entropy(&system, &mu, 100_000, 42).map_err(|e| e.to_string())?;
        let via_base = skew_entropy(&mu, &CarryCocycle, &Odometer, bp(p), 100_000, 43).map_err(|e| e.to_string())?;
        let z_exact = (direct.mean - exact).abs() / direct.stderr;
        let combined = (direct.stderr.powi(2) + via_base.stderr.powi(2)).sqrt();
        let z_pair = (direct.mean - via_base.mean).abs() / combined;
        worst_z = worst_z.max(z_exact).max(z_pair);
        if z_exact > Z_MAX || z_pair > Z_MAX {
            return Err(format!(
                "p={p}: direct {} ± {}, base estimate {} ± {}, exact {exact}",
                direct.mean, direct.stderr, via_base.mean, via_base.stderr
            ));
        }
    }
    within(Duration::from_secs(60), start.elapsed())?;
    Ok(format!("max |z| = {worst_z:.2}, {:.2?}", start.elapsed()))
}

/// `x + k` on the first 64 digits as machine integers, when nothing carries past them.
fn add_low_digits(x: &LazyPoint, k: i64) -> Option<u64> {
    let v = (1..=64).fold(0u64, |acc, n| acc | (u64::from(x.coordinate(n)) << (n - 1)));
    if k >= 0 {
        v.checked_add(k as u64)
    } else {
        v.checked_sub(k.unsigned_abs())
    }
}

fn c4_carry_moments() -> Check {
    let start = Instant::now();
    let one = Measure::dirac(Integers, 1).unwrap();
    let (mean, stderr) =
        mean_cocycle_size(&one, &CarryCocycle, &Odometer, 1_000_000, 42).map_err(|e| e.to_string())?;
    if !(CARRY_BAND.0..=CARRY_BAND.1).contains(&mean) {
        return Err(format!("E|c(1,·)| = {mean} outside {CARRY_BAND:?}"));
    }
    let elements: Vec<i64> = (-8..=8).collect();
    let report = cocycle_identity_check(&CarryCocycle, &Odometer, &elements, 10_000, 42).map_err(|e| e.to_string())?;
    if let Some(w) = report.witness {
        return Err(format!("identity fails at g={} h={} seed={}", w.g, w.h, w.state_seed));
    }
    // the addition itself, against machine arithmetic
    for s in 0..2000u64 {
        let x = LazyPoint::sample(s, BernoulliParam::half());
        let k = (s as i64 % 17) - 8;
        if let Some(sum) = add_low_digits(&x, k) {
            let y = odometer_add(k, &x).map_err(|e| e.to_string())?;
            if (1..=64).any(|n| y.coordinate(n) != (sum >> (n - 1) & 1 == 1)) {
                return Err(format!("odometer_add({k}) disagrees with integer addition, seed {s}"));
            }
        }
    }
    within(Duration::from_secs(60), start.elapsed())?;
    Ok(format!(
        "E|c(1,·)| = {mean:.4} ± {stderr:.4}, identity on {} triples, {:.2?}",
        report.trials,
        start.elapsed()
    ))
}

fn c5_sweep() -> Check {
    let start = Instant::now();
    let mut c = ExperimentConfig::new(CommandKind::Sweep);
    let grid: Vec<f64> = (2..=12).map(|k| 0.5 + 0.5f64.powi(k)).collect();
    c.p_grid = Some(grid.clone());
    let out = run(&c).map_err(|e| e.to_string())?;
    let finset = floats(&out.table, "exact_finset_entropy");
    let skew = floats(&out.table, "odometer_skew_entropy");
    for (name, col, scale) in [("finset", &finset, 1.0), ("skew", &skew, 2.0)] {
        if col.windows(2).any(|w| w[1] >= w[0]) {
            return Err(format!("{name} column not strictly decreasing: {col:?}"));
        }
        let last = *col.last().unwrap();
        if last >= SWEEP_FINAL {
            return Err(format!("{name} final value {last:e} ≥ {SWEEP_FINAL:e}"));
        }
        let oracle = scale * phi(*grid.last().unwrap());
        if name == "finset" && (last - oracle).abs() > CLOSED_FORM_TOL {
            return Err(format!("final finset entropy {last} vs φ = {oracle}"));
        }
    }
    within(Duration::from_secs(120), start.elapsed())?;
    Ok(format!(
        "11 rows, finals {:.2e} (finset) and {:.2e} (skew), {:.2?}",
        finset.last().unwrap(),
        skew.last().unwrap(),
        start.elapsed()
    ))
}

fn exact_run(cmd: CommandKind, system: &str, trunc: usize) -> std::result::Result<Table, String> {
    let mut c = ExperimentConfig::new(cmd);
    c.system = Some(system.into());
    c.trunc = trunc;
    let out = run(&c).map_err(|e| e.to_string())?;
    match out.violation {
        Some(v) => Err(v),
        None => Ok(out.table),
    }
}

fn c6_jensen() -> Check {
    let start = Instant::now();
    let swap = exact_run(CommandKind::Jensen, "swap", 40)?;
    let random = exact_run(CommandKind::Jensen, "random", 40)?;
    let mut worst = f64::NEG_INFINITY;
    for t in [&swap, &random] {
        for (l, r) in floats(t, "lhs").iter().zip(floats(t, "rhs")) {
            if *l > r + BOUND_TOL {
                return Err(format!("lhs {l} > rhs {r}"));
            }
            worst = worst.max(l - r);
        }
    }
    if swap.rows.len() != 10 {
        return Err(format!("expected 10 swap rows, got {}", swap.rows.len()));
    }
    // q = 3/4 is the sixth grid value: lhs = -2 log(2√(q(1-q))) = log(4/3), rhs = φ(3/4)
    let (l, r) = (floats(&swap, "lhs")[5], floats(&swap, "rhs")[5]);
    if (l - (4.0f64 / 3.0).ln()).abs() > CLOSED_FORM_TOL || (r - phi(0.75)).abs() > CLOSED_FORM_TOL {
        return Err(format!("q=3/4: lhs {l}, rhs {r}"));
    }
    within(Duration::from_secs(10), start.elapsed())?;
    Ok(format!(
        "{} swap + {} random rows, max lhs - rhs = {worst:.3e}, {:.2?}",
        swap.rows.len(),
        random.rows.len(),
        start.elapsed()
    ))
}

fn c7_appendix() -> Check {
    let start = Instant::now();
    const N: usize = 20;
    let random = exact_run(CommandKind::Spectral, "random", N)?;
    if random.rows.len() != 50 || !bools(&random, "holds").iter().all(|h| *h) {
        return Err("appendix chain fails on a random system".into());
    }
    let swap = exact_run(CommandKind::Spectral, "swap", N)?;
    let tail = 0.5f64.powi(N as i32 + 1);
    // μ̄_N(1) = Σ_{n odd ≤ N} 2^{-n-1} / (1 - 2^{-N-1})
    let odd: f64 = (1..=N).filter(|n| n % 2 == 1).map(|n| 0.5f64.powi(n as i32 + 1)).sum::<f64>() / (1.0 - tail);
    let mut worst: f64 = 0.0;
    for (i, h) in floats(&swap, "rhs").into_iter().enumerate() {
        let q = 0.5 + 0.05 * i as f64;
        let hand = odd * phi(q);
        worst = worst.max((h - hand).abs());
        if (h - hand).abs() > HAND_TOL || (h - phi(q) / 3.0).abs() > tail + HAND_TOL {
            return Err(format!("q={q}: h_μ̄ = {h}, hand value {hand}, φ/3 = {}", phi(q) / 3.0));
        }
    }
    within(Duration::from_secs(30), start.elapsed())?;
    Ok(format!("50 random systems hold, swap hand value within {worst:.1e}, {:.2?}", start.elapsed()))
}

fn c8_quotient_curve() -> Check {
    let start = Instant::now();
    let c = ExperimentConfig::new(CommandKind::QuotientCurve);
    let out = run(&c).map_err(|e| e.to_string())?;
    let ns: Vec<u64> = out
        .table
        .column("n")
        .unwrap()
        .into_iter()
        .map(|c| match c {
            Cell::Uint(v) => *v,
            other => panic!("{other:?}"),
        })
        .collect();
    let norms = floats(&out.table, "norm");
    let gaps = floats(&out.table, "gap");
    let trunc = c.trunc as i32;
    let mut worst: f64 = 0.0;
    for (&n, &norm) in ns.iter().zip(&norms) {
        // characters e^{2πijx/n}: μ̂(j) = cos(2πj/n), μ̄̂ = Σ_m 2^{-m-1} μ̂^m / (1 - 2^{-N-1})
        let oracle = (1..n)
            .map(|j| {
                let z = Complex64::from_polar(0.5, TAU * j as f64 / n as f64)
                    + Complex64::from_polar(0.5, -TAU * j as f64 / n as f64);
                let s: Complex64 = (0..=trunc).map(|m| z.powi(m) * 0.5f64.powi(m + 1)).sum();
                (s / (1.0 - 0.5f64.powi(trunc + 1))).norm()
            })
            .fold(0.0, f64::max);
        worst = worst.max((norm - oracle).abs());
        if (norm - oracle).abs() > FOURIER_TOL {
            return Err(format!("n={n}: norm {norm} vs Fourier {oracle}"));
        }
    }
    if ns != [2, 4, 8, 16, 32, 64, 128, 256] {
        return Err(format!("sizes {ns:?}"));
    }
    if gaps.windows(2).any(|w| w[1] >= w[0]) || *gaps.last().unwrap() > 1e-3 {
        return Err(format!("gap not decreasing toward 0: {gaps:?}"));
    }
    within(Duration::from_secs(10), start.elapsed())?;
    Ok(format!(
        "max |norm - Fourier| = {worst:.1e}, gap {:.3} → {:.2e}, {:.2?}",
        gaps[0],
        gaps.last().unwrap(),
        start.elapsed()
    ))
}

fn c9_separation() -> Check {
    let start = Instant::now();
    let indices: Vec<u32> = (1..=20).collect();
    let count = |nu: f64, want: Verdict| -> std::result::Result<usize, String> {
        let mut hits = 0;
        for rep in 0..100u64 {
            let r = separation_test(|s| LazyPoint::sample(s, bp(nu)), &indices, bp(0.75), 10_000, 0.01, rep)
                .map_err(|e| e.to_string())?;
            hits += usize::from(r.verdict == want);
        }
        Ok(hits)
    };
    let singular = count(0.3, Verdict::EvidenceOfSingularity)?;
    let same = count(0.75, Verdict::Inconclusive)?;
    within(Duration::from_secs(60), start.elapsed())?;
    if singular < 99 || same < 95 {
        return Err(format!("ν=0.3 singular {singular}/100, ν=p inconclusive {same}/100"));
    }
    Ok(format!(
        "ν=0.3 singular in {singular}/100, ν=p inconclusive in {same}/100, {:.2?}",
        start.elapsed()
    ))
}

fn c10_determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: &[&[&str]] = &[
        &["entropy-exact", "--p-grid", "0.51,0.6,0.75"],
        &["sweep", "--p-grid", "0.75,0.6,0.51", "--samples", "20000"],
        &["cocycle-check", "--trials", "2000", "--samples", "20000"],
        &["mc-entropy", "--system", "bernoulli", "--p", "0.75", "--samples", "20000"],
        &["mc-entropy", "--system", "odometer-skew", "--p-grid", "0.6,0.9", "--samples", "20000"],
        &["mc-entropy", "--system", "swap", "--p", "0.7", "--bar", "--samples", "20000", "--format", "json"],
        &["spectral", "--system", "swap"],
        &["spectral", "--system", "random", "--count", "10", "--trunc", "20"],
        &["spectral", "--system", "rotation", "--n-list", "2,3,16"],
        &["jensen", "--system", "random"],
        &["quotient-curve", "--n-list", "2,4,8,64"],
        &["separation", "--p", "0.75", "--samples", "20000"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for (j, threads) in ["1", "1", "4"].iter().enumerate() {
            let path = dir.path().join(format!("{i}-{j}.out"));
            let status = Command::new(env!("CARGO_BIN_EXE_entgap"))
                .args(*args)
                .args(["--seed", "2024", "--threads", threads, "--out"])
                .arg(&path)
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{args:?} exited with {status}"));
            }
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] || outputs[0] != outputs[2] {
            return Err(format!("{args:?}: outputs differ between reruns"));
        }
    }
    Ok(format!("{} commands byte-identical across reruns and thread counts", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("closed-form entropy vs Monte Carlo", c1_closed_form_vs_mc),
        ("Radon-Nikodym normalization", c2_rn_normalization),
        ("odometer skew entropy", c3_odometer_skew),
        ("carry cocycle moments and identity", c4_carry_moments),
        ("entropy sweep toward p = 1/2", c5_sweep),
        ("per-element Jensen bound", c6_jensen),
        ("appendix norm chain", c7_appendix),
        ("quotient gap curve", c8_quotient_curve),
        ("separation test", c9_separation),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: panicked", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
