//! One function per subcommand. Each returns a [`Table`] plus, when a checked
//! property fails, a violation message naming the witness.

use entgap::bernoulli::{exact_entropy_finset_action, separation_test, BernoulliShift};
use entgap::cocycle::{
    build_skew, cocycle_identity_check, mean_cocycle_size,
    odometer_expected_flips, odometer_skew_entropy_exact, CarryCocycle, Cocycle, Odometer,
    ResidueMap, TrivialCocycle,
};
use entgap::engine::{entropy_of_bar, mc_entropy};
use entgap::finite::{
    exact_entropy_finite, exact_entropy_of_bar_finite, random_integer_system, two_point_swap,
    IntegerSystem,
};
use entgap::measure::expected_size_and_max;
use entgap::sampling::{all_seeds, sample_moments};
use entgap::spectral::{appendix_bound_check, cyclic_gap_curve, jensen_bound_check};
use entgap::{
    geometric_bar, phi, BernoulliParam, Cyclic, FinSet, FinSetGroup, Integers, LazyPoint, Measure,
    NonsingularSystem,
};

use crate::config::{CommandKind, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::measure_file::{load_measure, LoadedMeasure};
use crate::output::{Meta, Table};

/// Random finite systems: at most this many states and atoms.
pub const RANDOM_MAX_STATES: usize = 8;
pub const RANDOM_MAX_SUPPORT: usize = 4;
/// `g, h` range of `cocycle-check`.
pub const COCYCLE_RANGE: i64 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub violation: Option<String>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Outcome { table, violation: None }
    }
}

/// Runs the configured command, inside a dedicated thread pool when
/// `--threads` is set.
pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    let mut outcome = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(|| dispatch(config))?,
        None => dispatch(config)?,
    };
    if outcome.violation.is_none() {
        if let Some((row, col)) = outcome.table.non_finite() {
            outcome.violation = Some(format!("non-finite value in row {row}, column {col}"));
        }
    }
    Ok(outcome)
}

fn dispatch(c: &ExperimentConfig) -> Result<Outcome> {
    match c.command {
        CommandKind::EntropyExact => entropy_exact(c),
        CommandKind::Sweep => sweep(c),
        CommandKind::CocycleCheck => cocycle_check(c),
        CommandKind::McEntropy => mc(c),
        CommandKind::Spectral => spectral(c),
        CommandKind::Jensen => jensen(c),
        CommandKind::QuotientCurve => quotient_curve(c),
        CommandKind::Separation => separation(c),
    }
}

fn param(p: f64) -> Result<BernoulliParam> {
    Ok(BernoulliParam::new(p)?)
}

fn wrong_group(want: &str, got: &LoadedMeasure) -> CliError {
    CliError::Config(format!("expected a {want} measure, got {}", got.group_name()))
}

fn finset_measure(path: Option<&std::path::Path>) -> Result<Measure<FinSetGroup>> {
    match path {
        None => Ok(Measure::dirac(FinSetGroup, FinSet::singleton(1)?)?),
        Some(p) => match load_measure(p)? {
            LoadedMeasure::FinSet(m) => Ok(m),
            other => Err(wrong_group("finset", &other)),
        },
    }
}

fn integer_measure(path: Option<&std::path::Path>, default: Measure<Integers>) -> Result<Measure<Integers>> {
    match path {
        None => Ok(default),
        Some(p) => match load_measure(p)? {
            LoadedMeasure::Integer(m) => Ok(m),
            other => Err(wrong_group("integer", &other)),
        },
    }
}

fn swap_measure(path: Option<&std::path::Path>) -> Result<Measure<Cyclic>> {
    let z2 = Cyclic::new(2)?;
    match path {
        None => Ok(Measure::dirac(z2, 1)?),
        Some(p) => match load_measure(p)? {
            LoadedMeasure::Cyclic(m) if *m.group() == z2 => Ok(m),
            other => Err(CliError::Config(format!(
                "the swap system needs a cyclic measure with n = 2, got {}",
                other.group_name()
            ))),
        },
    }
}

fn symmetric_step() -> Result<Measure<Integers>> {
    Ok(Measure::uniform(Integers, vec![-1, 1])?)
}

fn system_name<'a>(c: &'a ExperimentConfig, default: &'a str) -> &'a str {
    c.system.as_deref().unwrap_or(default)
}

fn unknown_system(command: &str, name: &str, known: &[&str]) -> CliError {
    CliError::Config(format!("{command}: unknown system {name:?} (expected one of {})", known.join(", ")))
}

/// `q ∈ {0.5, 0.55, …, 0.95}` unless `--p`/`--p-grid` is given.
fn swap_grid(c: &ExperimentConfig) -> Result<Vec<f64>> {
    if c.p.is_some() || c.p_grid.is_some() {
        c.p_values()
    } else {
        Ok((0..10).map(|i| 0.5 + 0.05 * i as f64).collect())
    }
}

fn random_systems(c: &ExperimentConfig) -> Result<Vec<(u64, IntegerSystem, Measure<Integers>)>> {
    all_seeds(c.count, c.seed)
        .into_iter()
        .map(|s| {
            let (sys, mu) = random_integer_system(s, RANDOM_MAX_STATES, RANDOM_MAX_SUPPORT)?;
            Ok((s, sys, mu))
        })
        .collect()
}

fn exact_meta(c: &ExperimentConfig, tail: f64) -> Meta {
    Meta { seed: c.seed, samples: 0, truncation_tail: tail }
}

fn mc_meta(c: &ExperimentConfig, tail: f64) -> Meta {
    Meta { seed: c.seed, samples: c.samples, truncation_tail: tail }
}

fn entropy_exact(c: &ExperimentConfig) -> Result<Outcome> {
    let mu = finset_measure(c.mu.as_deref())?;
    let (size, max) = expected_size_and_max(&mu);
    let mut t = Table::new(&["p", "entropy", "expected_size", "expected_max"]);
    for p in c.p_values()? {
        let h = exact_entropy_finset_action(&mu, param(p)?);
        t.push(vec![p.into(), h.into(), size.into(), max.into()], exact_meta(c, 0.0));
    }
    Ok(Outcome::ok(t))
}

fn sweep(c: &ExperimentConfig) -> Result<Outcome> {
    let grid = c.p_grid.clone().or(c.p.map(|p| vec![p])).unwrap_or_default();
    if grid.is_empty() {
        return Err(CliError::Config("sweep needs a nonempty --p-grid".into()));
    }
    if let Some(p) = grid.iter().find(|p| !(**p > 0.5 && **p < 1.0)) {
        return Err(CliError::Config(format!("sweep grid value {p} outside (1/2, 1)")));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Config("sweep grid must be strictly descending".into()));
    }
    let mu = finset_measure(c.mu.as_deref())?;
    let skew_mu = integer_measure(c.skew_mu.as_deref(), Measure::dirac(Integers, 1)?)?;
    // one base sample shared by every p, so the skew column is φ(p)·(fixed mean)
    let (size, size_err) = mean_cocycle_size(&skew_mu, &CarryCocycle, &Odometer, c.samples, c.seed)?;
    let mut t = Table::new(&[
        "p",
        "exact_finset_entropy",
        "odometer_skew_entropy",
        "stderr",
        "odometer_skew_exact",
    ]);
    for p in grid {
        let bp = param(p)?;
        let f = phi(bp);
        t.push(
            vec![
                p.into(),
                exact_entropy_finset_action(&mu, bp).into(),
                (f * size).into(),
                (f * size_err).into(),
                odometer_skew_entropy_exact(&skew_mu, bp).into(),
            ],
            mc_meta(c, 0.0),
        );
    }
    Ok(Outcome::ok(t))
}

fn cocycle_check(c: &ExperimentConfig) -> Result<Outcome> {
    let name = c.cocycle.as_deref().unwrap_or("carry");
    match name {
        "carry" => cocycle_rows(c, name, &CarryCocycle, odometer_expected_flips(1)),
        "trivial" => cocycle_rows(c, name, &TrivialCocycle, 0.0),
        "residue" => cocycle_rows(c, name, &ResidueMap, 1.0),
        other => Err(CliError::Config(format!(
            "cocycle-check: unknown cocycle {other:?} (expected carry, trivial, residue)"
        ))),
    }
}

fn cocycle_rows<C: Cocycle<Integers, LazyPoint>>(
    c: &ExperimentConfig,
    name: &str,
    cocycle: &C,
    exact_size: f64,
) -> Result<Outcome> {
    let elements: Vec<i64> = (-COCYCLE_RANGE..=COCYCLE_RANGE).collect();
    let report = cocycle_identity_check(cocycle, &Odometer, &elements, c.trials, c.seed)?;
    let one = Measure::dirac(Integers, 1)?;
    let (mean, stderr) = mean_cocycle_size(&one, cocycle, &Odometer, c.samples, c.seed)?;
    let max = sample_moments(c.samples, c.seed, |s| {
        Ok(cocycle.evaluate(&1, &Odometer.sample_state(s))?.max_elem() as f64)
    })?;
    let witness = report.witness.as_ref().map(|w| {
        format!(
            "g={} h={} state_seed={} c(gh,x)={} c(g,hx)^c(h,x)={}",
            w.g, w.h, w.state_seed, w.lhs, w.rhs
        )
    });
    let mut t = Table::new(&[
        "cocycle",
        "trials",
        "passed",
        "witness",
        "mean_size_1",
        "stderr_size_1",
        "exact_size_1",
        "mean_max_1",
    ]);
    t.push(
        vec![
            name.into(),
            report.trials.into(),
            report.passed().into(),
            witness.clone().unwrap_or_default().into(),
            mean.into(),
            stderr.into(),
            exact_size.into(),
            max.mean.into(),
        ],
        mc_meta(c, 0.0),
    );
    Ok(Outcome {
        table: t,
        violation: witness.map(|w| format!("cocycle identity fails ({name}): {w}")),
    })
}

const MC_COLUMNS: [&str; 7] = ["system", "p", "bar", "mean", "stderr", "exact", "exact_unbarred"];

fn mc(c: &ExperimentConfig) -> Result<Outcome> {
    let mut t = Table::new(&MC_COLUMNS);
    let name = system_name(c, "bernoulli");
    for p in c.p_values()? {
        match name {
            "bernoulli" => {
                let mu = finset_measure(c.mu.as_deref())?;
                let bp = param(p)?;
                let system = BernoulliShift::new(bp);
                let exact = |m: &Measure<FinSetGroup>| exact_entropy_finset_action(m, bp);
                mc_row(c, &mut t, name, p, &system, &mu, exact)?;
            }
            "odometer-skew" => {
                let mu = integer_measure(c.mu.as_deref(), Measure::dirac(Integers, 1)?)?;
                let bp = param(p)?;
                let system = build_skew(Odometer, CarryCocycle, bp)?;
                let exact = |m: &Measure<Integers>| odometer_skew_entropy_exact(m, bp);
                mc_row(c, &mut t, name, p, &system, &mu, exact)?;
            }
            "swap" => {
                let mu = swap_measure(c.mu.as_deref())?;
                let system = two_point_swap(p)?;
                let exact = |m: &Measure<Cyclic>| exact_entropy_finite(&system, m).unwrap_or(f64::NAN);
                mc_row(c, &mut t, name, p, &system, &mu, exact)?;
            }
            other => return Err(unknown_system("mc-entropy", other, &["bernoulli", "odometer-skew", "swap"])),
        }
    }
    Ok(Outcome::ok(t))
}

fn mc_row<S, F>(
    c: &ExperimentConfig,
    t: &mut Table,
    name: &str,
    p: f64,
    system: &S,
    mu: &Measure<S::Group>,
    exact: F,
) -> Result<()>
where
    S: NonsingularSystem,
    F: Fn(&Measure<S::Group>) -> f64,
{
    let unbarred = exact(mu);
    let (est, exact_used) = if c.bar {
        let bar = geometric_bar(mu, c.trunc);
        (entropy_of_bar(system, mu, c.trunc, c.samples, c.seed)?, exact(&bar.measure))
    } else {
        (mc_entropy(system, mu, c.samples, c.seed)?, unbarred)
    };
    t.push(
        vec![
            name.into(),
            p.into(),
            c.bar.into(),
            est.mean.into(),
            est.stderr.into(),
            exact_used.into(),
            unbarred.into(),
        ],
        mc_meta(c, est.truncation_tail),
    );
    Ok(())
}

const SPECTRAL_COLUMNS: [&str; 9] =
    ["system", "instance", "norm", "lhs", "middle", "rhs", "tail", "slack", "holds"];

fn spectral(c: &ExperimentConfig) -> Result<Outcome> {
    let mut t = Table::new(&SPECTRAL_COLUMNS);
    let mut violation = None;
    let name = system_name(c, "swap");
    let mut add = |instance: String, r: entgap::spectral::AppendixReport| {
        if !r.holds && violation.is_none() {
            violation = Some(format!(
                "appendix chain fails for {name} {instance}: lhs={} middle={} rhs={} slack={}",
                r.lhs, r.middle, r.rhs, r.slack
            ));
        }
        t.push(
            vec![
                name.into(),
                instance.into(),
                r.norm.into(),
                r.lhs.into(),
                r.middle.into(),
                r.rhs.into(),
                r.tail.into(),
                r.slack.into(),
                r.holds.into(),
            ],
            exact_meta(c, r.tail),
        );
    };
    match name {
        "swap" => {
            let mu = swap_measure(c.mu.as_deref())?;
            for q in swap_grid(c)? {
                add(format!("q={q}"), appendix_bound_check(&two_point_swap(q)?, &mu, c.trunc)?);
            }
        }
        "random" => {
            for (s, sys, mu) in random_systems(c)? {
                add(format!("seed={s}"), appendix_bound_check(&sys, &mu, c.trunc)?);
            }
        }
        "rotation" => {
            let mu = integer_measure(c.mu.as_deref(), symmetric_step()?)?;
            for &n in c.n_list.as_deref().unwrap_or(&default_sizes()) {
                let sys = entgap::finite::rotation(n)?;
                add(format!("n={n}"), appendix_bound_check(&sys, &mu, c.trunc)?);
            }
        }
        other => return Err(unknown_system("spectral", other, &["swap", "random", "rotation"])),
    }
    Ok(Outcome { table: t, violation })
}

fn jensen(c: &ExperimentConfig) -> Result<Outcome> {
    let mut t = Table::new(&["system", "instance", "g", "lhs", "rhs", "holds"]);
    let mut violation = None;
    let name = system_name(c, "swap");
    let mut add = |instance: String, g: i64, r: entgap::spectral::JensenReport| {
        if !r.holds && violation.is_none() {
            violation = Some(format!(
                "Jensen bound fails for {name} {instance} g={g}: lhs={} rhs={}",
                r.lhs, r.rhs
            ));
        }
        t.push(
            vec![name.into(), instance.into(), g.into(), r.lhs.into(), r.rhs.into(), r.holds.into()],
            exact_meta(c, 0.0),
        );
    };
    match name {
        "swap" => {
            for q in swap_grid(c)? {
                add(format!("q={q}"), 1, jensen_bound_check(&two_point_swap(q)?, &1));
            }
        }
        "random" => {
            for (s, sys, mu) in random_systems(c)? {
                for g in mu.support() {
                    add(format!("seed={s}"), g, jensen_bound_check(&sys, &g));
                }
            }
        }
        other => return Err(unknown_system("jensen", other, &["swap", "random"])),
    }
    Ok(Outcome { table: t, violation })
}

/// `n ∈ {2, 4, …, 256}`.
pub fn default_sizes() -> Vec<usize> {
    (1..=8).map(|k| 1usize << k).collect()
}

fn quotient_curve(c: &ExperimentConfig) -> Result<Outcome> {
    let mu = integer_measure(c.mu.as_deref(), symmetric_step()?)?;
    let sizes = c.n_list.clone().unwrap_or_else(default_sizes);
    let mut t = Table::new(&["n", "norm", "gap"]);
    for row in cyclic_gap_curve(&sizes, &mu, c.trunc)? {
        t.push(vec![row.n.into(), row.norm.into(), row.gap.into()], exact_meta(c, row.tail));
    }
    Ok(Outcome::ok(t))
}

fn separation(c: &ExperimentConfig) -> Result<Outcome> {
    let nu = param(c.nu)?;
    let indices: Vec<u32> = c.indices.clone().unwrap_or_else(|| (1..=20).collect());
    let mut t = Table::new(&["nu", "p", "indices", "mean", "stderr", "upper_bound", "alpha", "verdict"]);
    for p in c.p_values()? {
        let r = separation_test(|s| LazyPoint::sample(s, nu), &indices, param(p)?, c.samples, c.alpha, c.seed)?;
        t.push(
            vec![
                c.nu.into(),
                r.p.into(),
                indices.len().into(),
                r.mean.into(),
                r.stderr.into(),
                r.upper_bound.into(),
                r.alpha.into(),
                r.verdict.as_str().into(),
            ],
            mc_meta(c, 0.0),
        );
    }
    Ok(Outcome::ok(t))
}

/// Exact `h_{μ̄_N}` of the two-point swap, for reference in tests.
pub fn swap_bar_entropy(q: f64, mu: &Measure<Cyclic>, truncation: usize) -> Result<(f64, f64)> {
    Ok(exact_entropy_of_bar_finite(&two_point_swap(q)?, mu, truncation)?)
}
