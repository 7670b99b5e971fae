use std::path::Path;

use pairlab_core::decomposition::{
    entropy_scan, fermionized_decomposition, fermionized_degeneracy, noninteracting_decomposition, parallel_map,
    schmidt_decompose, slater_decompose, SCAN_TOP,
};
use pairlab_core::oracle::{build_rdm_with, compare_occupations, GridSpec, ReductionMode};
use pairlab_core::spectrum::energy_of_gamma;
use pairlab_core::states::{ExactState, GroundStateCoefficients, TruncationPolicy};
use pairlab_core::verify::{derivative_jump, relative_ode_residual};
use serde_json::Value;

use crate::args::{
    Cli, Command, DecomposeArgs, FermionizedArgs, NoninteractingArgs, OracleArgs, OracleMode, ScanArgs, SpectrumArgs,
    VerifyArgs,
};
use crate::table::{Cell, Table};
use crate::CliError;

pub struct Report {
    pub table: Table,
    /// Points that failed without stopping the command, keyed by coupling.
    pub failures: Vec<(f64, pairlab_core::Error)>,
}

impl From<Table> for Report {
    fn from(table: Table) -> Self {
        Self {
            table,
            failures: Vec::new(),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

pub fn run(cli: &Cli) -> Result<Report> {
    let threads = resolve_threads(cli.global.threads)?;
    log::info!("{} on {threads} thread(s)", cli.command.name());
    match &cli.command {
        Command::Spectrum(a) => spectrum(a, threads).map(Report::from),
        Command::Decompose(a) => decompose(a).map(Report::from),
        Command::Scan(a) => scan(a, threads),
        Command::Noninteracting(a) => noninteracting(a).map(Report::from),
        Command::Fermionized(a) => fermionized(a).map(Report::from),
        Command::Oracle(a) => oracle(a, threads).map(Report::from),
        Command::Verify(a) => verify(a, threads).map(Report::from),
    }
}

fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var("PAIRLAB_THREADS") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("PAIRLAB_THREADS={s:?} is not a thread count")))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if n == 0 {
        return usage("thread count must be at least 1");
    }
    Ok(n)
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        usage(format!("--{name} must be finite"))
    }
}

fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                max
            } else {
                min + (max - min) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

fn range(lo_name: &str, lo: f64, hi_name: &str, hi: f64, steps: usize) -> Result<Vec<f64>> {
    finite(lo_name, lo)?;
    finite(hi_name, hi)?;
    if lo >= hi {
        return usage(format!("--{lo_name} must be below --{hi_name}"));
    }
    if steps < 2 {
        return usage("--steps must be at least 2");
    }
    Ok(linspace(lo, hi, steps))
}

fn policy(n_max: Option<usize>) -> Result<TruncationPolicy> {
    match n_max {
        Some(n) if n < 2 => usage("--n-max must be at least 2"),
        Some(n) => Ok(TruncationPolicy::fixed(n)),
        None => Ok(TruncationPolicy::default()),
    }
}

fn numbered(prefix: &str, count: usize) -> impl Iterator<Item = String> + '_ {
    (1..=count).map(move |i| format!("{prefix}_{i}"))
}

fn columns(fixed: &[&str]) -> Vec<String> {
    fixed.iter().map(|s| s.to_string()).collect()
}

fn spectrum(a: &SpectrumArgs, threads: usize) -> Result<Table> {
    let gammas = range("gamma-min", a.gamma_min, "gamma-max", a.gamma_max, a.steps)?;
    if a.branches == 0 {
        return usage("--branches must be at least 1");
    }
    let jobs: Vec<(usize, f64)> = (0..a.branches).flat_map(|b| gammas.iter().map(move |&g| (b, g))).collect();
    let points = parallel_map(&jobs, threads, |&(b, g)| energy_of_gamma(g, b));
    let mut t = Table::new("spectrum", columns(&["branch", "gamma", "eps_r"]));
    for p in points {
        let p = p?;
        t.push(vec![p.branch.into(), p.gamma_t.into(), p.eps_r.into()]);
    }
    Ok(t)
}

fn decompose(a: &DecomposeArgs) -> Result<Table> {
    if a.top == 0 {
        return usage("--top must be at least 1");
    }
    let policy = policy(a.n_max)?;
    let lambda_t = match (a.lambda, a.gamma) {
        (Some(l), _) => finite("lambda", l)?,
        (None, Some(g)) => energy_of_gamma(finite("gamma", g)?, a.branch)?.lambda_t,
        (None, None) => return usage("one of --lambda or --gamma is required"),
    };
    let gs = GroundStateCoefficients::with_policy(lambda_t, policy)?;
    let mut cols = columns(&[
        "lambda_t",
        "kind",
        "n_max",
        "converged",
        "norm_defect",
        "rank",
        "k_number",
        "s_vn",
        "s_lin",
        "s_lin_strict",
    ]);
    cols.extend(numbered("ev", a.top));
    let mut t = Table::new("decompose", cols);
    for (name, d) in [("schmidt", schmidt_decompose(&gs)?), ("slater", slater_decompose(&gs)?)] {
        let mut row: Vec<Cell> = vec![
            lambda_t.into(),
            name.into(),
            d.n_max.into(),
            gs.converged.into(),
            d.norm_defect.into(),
            d.rank.into(),
            d.k_number.into(),
            d.s_vn.into(),
            d.s_lin.into(),
            d.s_lin_strict.into(),
        ];
        row.extend((0..a.top).map(|i| Cell::Float(d.eigenvalues.get(i).copied().unwrap_or(0.0))));
        t.push(row);
    }
    Ok(t)
}

fn scan(a: &ScanArgs, threads: usize) -> Result<Report> {
    let grid = range("lambda-min", a.lambda_min, "lambda-max", a.lambda_max, a.steps)?;
    if a.lambda_max > 1.0 {
        return usage("--lambda-max must not exceed 1 on the ground branch");
    }
    let policy = policy(a.n_max)?;
    let mut cols = columns(&[
        "lambda_t",
        "status",
        "n_max",
        "converged",
        "k_bosonic",
        "k_fermionic",
        "s_lin_bosonic",
        "s_lin_fermionic",
        "s_lin_strict",
        "s_vn_bosonic",
        "s_vn_fermionic",
        "pair_size",
    ]);
    cols.extend(numbered("schmidt", SCAN_TOP));
    cols.extend(numbered("slater", SCAN_TOP));
    let width = cols.len();
    let mut t = Table::new("scan", cols);
    let mut failures = Vec::new();
    for (l, r) in entropy_scan(&grid, policy, threads) {
        match r {
            Ok(s) => {
                let mut row: Vec<Cell> = vec![
                    l.into(),
                    "ok".into(),
                    s.n_max.into(),
                    s.converged.into(),
                    s.k_bosonic.into(),
                    s.k_fermionic.into(),
                    s.s_lin_bosonic.into(),
                    s.s_lin_fermionic.into(),
                    s.s_lin_strict.into(),
                    s.s_vn_bosonic.into(),
                    s.s_vn_fermionic.into(),
                    s.pair_size.into(),
                ];
                row.extend(s.top_bosonic.iter().chain(&s.top_fermionic).map(|&v| Cell::Float(v)));
                t.push(row);
            }
            Err(e) => {
                let mut row = vec![l.into(), e.to_string().into()];
                row.resize(width, Cell::Missing);
                t.push(row);
                failures.push((l, e));
            }
        }
    }
    Ok(Report { table: t, failures })
}

fn noninteracting(a: &NoninteractingArgs) -> Result<Table> {
    let mut t = Table::new(
        "noninteracting",
        columns(&["n", "eps", "s_lin", "bound", "orbitals", "top_occupation"]),
    );
    for n in 0..=a.max_n {
        let d = noninteracting_decomposition(n);
        t.push(vec![
            n.into(),
            (n + 1).into(),
            d.s_lin.into(),
            d.bound.into(),
            d.orbitals.len().into(),
            d.orbitals[0].occupation.into(),
        ]);
    }
    Ok(t)
}

fn fermionized(a: &FermionizedArgs) -> Result<Table> {
    if a.max_energy < 2 {
        return usage("--max-energy must be at least 2");
    }
    let mut t = Table::new(
        "fermionized",
        columns(&["eps", "l_t", "n", "s_lin", "bound", "terms", "degeneracy"]),
    );
    for eps in 2..=a.max_energy {
        let level = fermionized_degeneracy(eps)?;
        for l_t in (1..eps).step_by(2) {
            let n = eps - 1 - l_t;
            let d = fermionized_decomposition(l_t, n)?;
            t.push(vec![
                eps.into(),
                l_t.into(),
                n.into(),
                d.s_lin.into(),
                d.bound.into(),
                d.terms.len().into(),
                level.degeneracy.into(),
            ]);
        }
    }
    Ok(t)
}

/// Analytic eigenvalues of both representations at one coupling.
struct Analytic {
    lambda_t: f64,
    schmidt: Vec<f64>,
    /// One `z_j` per degenerate pair.
    slater: Vec<f64>,
}

fn load_analytic(path: &Path) -> Result<Analytic> {
    let bad = |m: &str| CliError::Usage(format!("{}: {m}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
    if doc["schema_version"] != 1 || doc["command"] != "decompose" {
        return Err(bad("expected schema_version 1 output of decompose"));
    }
    let rows = doc["rows"].as_array().ok_or_else(|| bad("missing rows"))?;
    let mut out = Analytic {
        lambda_t: f64::NAN,
        schmidt: Vec::new(),
        slater: Vec::new(),
    };
    for row in rows {
        let obj = row.as_object().ok_or_else(|| bad("row is not an object"))?;
        let l = obj.get("lambda_t").and_then(Value::as_f64).ok_or_else(|| bad("row without lambda_t"))?;
        if !out.lambda_t.is_nan() && l != out.lambda_t {
            return Err(bad("rows disagree on lambda_t"));
        }
        out.lambda_t = l;
        let mut evs = Vec::new();
        while let Some(v) = obj.get(&format!("ev_{}", evs.len() + 1)) {
            evs.push(v.as_f64().ok_or_else(|| bad("non-numeric eigenvalue"))?);
        }
        match obj.get("kind").and_then(Value::as_str) {
            Some("schmidt") => out.schmidt = evs,
            Some("slater") => out.slater = evs,
            _ => return Err(bad("row kind must be schmidt or slater")),
        }
    }
    if out.schmidt.is_empty() || out.slater.is_empty() {
        return Err(bad("needs one schmidt and one slater row"));
    }
    Ok(out)
}

fn oracle(a: &OracleArgs, threads: usize) -> Result<Table> {
    let grid = GridSpec::new(finite("extent", a.extent)?, a.points).map_err(|e| CliError::Usage(e.to_string()))?;
    if a.top_k == 0 {
        return usage("--top-k must be at least 1");
    }
    let policy = policy(a.n_max)?;
    let analytic = match &a.analytic_json {
        Some(path) => {
            let an = load_analytic(path)?;
            if let Some(l) = a.lambda {
                if l != an.lambda_t {
                    return usage(format!("--lambda {l} disagrees with {} in {}", an.lambda_t, path.display()));
                }
            }
            an
        }
        None => {
            let lambda_t = finite("lambda", a.lambda.expect("clap requires lambda"))?;
            let gs = GroundStateCoefficients::with_policy(lambda_t, policy)?;
            Analytic {
                lambda_t,
                schmidt: schmidt_decompose(&gs)?.eigenvalues,
                slater: slater_decompose(&gs)?.eigenvalues,
            }
        }
    };
    let state = ExactState::new(analytic.lambda_t, 0)?;
    let modes: &[(ReductionMode, &str, &str)] = match a.mode {
        OracleMode::Standard => &[(ReductionMode::Standard, "standard", "schmidt")],
        OracleMode::Strict1d => &[(ReductionMode::Strict1d, "strict_1d", "slater")],
        OracleMode::Both => &[
            (ReductionMode::Standard, "standard", "schmidt"),
            (ReductionMode::Strict1d, "strict_1d", "slater"),
        ],
    };
    let mut t = Table::new(
        "oracle",
        columns(&[
            "mode",
            "kind",
            "lambda_t",
            "points",
            "extent",
            "captured_norm",
            "index",
            "analytic",
            "grid",
            "deviation",
            "max_deviation",
        ]),
    );
    for &(mode, mode_name, kind) in modes {
        let occupations: Vec<f64> = match mode {
            ReductionMode::Standard => analytic.schmidt.clone(),
            ReductionMode::Strict1d => analytic.slater.iter().flat_map(|&z| [z, z]).collect(),
        };
        let kernel = build_rdm_with(&state, grid, mode, threads)?;
        let spec = kernel.spectrum()?;
        let report = compare_occupations(&occupations, &spec.eigenvalues, a.top_k)?;
        for r in &report.rows {
            t.push(vec![
                mode_name.into(),
                kind.into(),
                analytic.lambda_t.into(),
                grid.points.into(),
                grid.extent.into(),
                kernel.captured_norm.into(),
                (r.index + 1).into(),
                r.analytic.into(),
                r.grid.into(),
                r.deviation.into(),
                report.max_deviation.into(),
            ]);
        }
    }
    Ok(t)
}

fn verify(a: &VerifyArgs, threads: usize) -> Result<Table> {
    if a.lambda.is_empty() {
        return usage("--lambda needs at least one value");
    }
    for &l in &a.lambda {
        finite("lambda", l)?;
    }
    let extent = finite("extent", a.extent)?;
    let h = finite("spacing", a.spacing)?;
    if !(extent > 0.0 && h > 0.0 && h < extent) {
        return usage("need 0 < --spacing < --extent");
    }
    finite("jump-step", a.jump_step)?;
    // a multiple of four keeps both grids odd
    let mut intervals = (2.0 * extent / h * (1.0 - 1e-12)).ceil() as usize;
    intervals = intervals.div_ceil(4) * 4;
    let fine = GridSpec::new(extent, intervals + 1)?;
    let coarse = GridSpec::new(extent, intervals / 2 + 1)?;
    let rows = parallel_map(&a.lambda, threads, |&l| -> pairlab_core::Result<_> {
        Ok((
            relative_ode_residual(l, fine)?,
            relative_ode_residual(l, coarse)?,
            derivative_jump(l, a.jump_step)?,
        ))
    });
    let mut t = Table::new(
        "verify",
        columns(&[
            "lambda_t",
            "spacing",
            "extent",
            "excluded_band",
            "nodes_checked",
            "max_residual",
            "at",
            "max_residual_coarse",
            "order",
            "jump_step",
            "gamma_t",
            "jump_measured",
            "jump_expected",
            "jump_error",
        ]),
    );
    for r in rows {
        let (f, c, j) = r?;
        t.push(vec![
            f.lambda_t.into(),
            f.spacing.into(),
            f.extent.into(),
            f.excluded_band.into(),
            f.nodes_checked.into(),
            f.max_residual.into(),
            f.at.into(),
            c.max_residual.into(),
            (c.max_residual / f.max_residual).log2().into(),
            a.jump_step.into(),
            j.gamma_t.into(),
            j.measured.into(),
            j.expected.into(),
            j.error.into(),
        ]);
    }
    Ok(t)
}
