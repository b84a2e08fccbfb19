//! Command-line front end. Each subcommand takes `key=value` parameters, writes one CSV
//! table plus `manifest.json` into the output directory, and exits with 0 (pass),
//! 1 (a check failed) or 2 (usage or configuration error).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::{rngs::StdRng, Rng, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimates::{lemma_sweep, thm1_ratio, thm2_ratio, LemmaId};
use crate::fundsol::{helmholtz_kernel, phi_direct_2d, phi_series_2d, LameParams, Mat2C};
use crate::solver::{residual_check, solve, Bump, GridField, ModeSource, OutgoingField, PolarGrid};
use crate::specfun::selftest;
use crate::weights::{counterexample_ladder, RadialWeight};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "lame-mt", version, about = "Navier-Lame resolvent estimate checks")]
struct Cli {
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "lame-mt-out")]
    out: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for generated configurations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Default for the subcommand's `tol` key.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug, Clone)]
enum Cmd {
    /// Addition-formula series against the closed form on seeded configurations.
    VerifyAddition(Kv),
    /// Solve for one forcing and report residual and radiation diagnostics.
    Solve(Kv),
    /// MT norm of a weight.
    Mt(Kv),
    /// Step-train ladder for the maximal-function counterexample.
    Counterexample(Kv),
    /// Lemma sweep table.
    Lemmas(Kv),
    /// Theorem ratio sweep.
    Estimates(Kv),
    /// Special-function identity checks.
    SpecfunSelftest(Kv),
}

#[derive(clap::Args, Debug, Clone)]
struct Kv {
    /// key=value parameters.
    params: Vec<String>,
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::VerifyAddition(_) => "verify-addition",
            Cmd::Solve(_) => "solve",
            Cmd::Mt(_) => "mt",
            Cmd::Counterexample(_) => "counterexample",
            Cmd::Lemmas(_) => "lemmas",
            Cmd::Estimates(_) => "estimates",
            Cmd::SpecfunSelftest(_) => "specfun-selftest",
        }
    }

    fn raw(&self) -> &[String] {
        match self {
            Cmd::VerifyAddition(k)
            | Cmd::Solve(k)
            | Cmd::Mt(k)
            | Cmd::Counterexample(k)
            | Cmd::Lemmas(k)
            | Cmd::Estimates(k)
            | Cmd::SpecfunSelftest(k) => &k.params,
        }
    }

    /// Accepted keys and their defaults.
    fn keys(&self) -> &'static [(&'static str, &'static str)] {
        match self {
            Cmd::VerifyAddition(_) => &[
                ("lam", "1"),
                ("mu", "1"),
                ("omega", "1"),
                ("tol", "1e-8"),
                ("n_cases", "20"),
                ("series_tol", "1e-12"),
            ],
            Cmd::Solve(_) => &[
                ("forcing", "bump:n=0,r0=1,w=0.25"),
                ("lam", "1"),
                ("mu", "1"),
                ("omega", "1"),
                ("h", "0.01"),
                ("n_theta", "16"),
                ("tol", "1e-3"),
                ("r1", "40"),
                ("r2", "80"),
            ],
            Cmd::Mt(_) => &[("weight", "gauss:sigma=1"), ("tol", "1e-6")],
            Cmd::Counterexample(_) => &[("eta", "0.015625"), ("ladder", "4")],
            Cmd::Lemmas(_) => &[
                ("id", "L4_5"),
                ("mu", "20,40,80"),
                ("a", "1.4142135623730951"),
                ("weight", "gauss:sigma=1"),
            ],
            Cmd::Estimates(_) => &[
                ("theorem", "both"),
                ("lam", "1"),
                ("mu", "1"),
                ("omega", "0.5,1,2,4,8"),
                ("modes", "0,1,2"),
                ("r0", "1"),
                ("w", "0.25"),
                ("weights", "gauss:sigma=1;indicator:R=3;gauss:sigma=2"),
            ],
            Cmd::SpecfunSelftest(_) => &[],
        }
    }
}

/// Resolved parameters: every accepted key with its default or supplied value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    fn resolve(raw: &[String], keys: &[(&str, &str)], tol: Option<f64>, cmd: &str) -> Result<Self> {
        let mut map: BTreeMap<String, String> = keys.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        if let Some(t) = tol {
            match map.get_mut("tol") {
                Some(slot) => *slot = format!("{t:e}"),
                None => return Err(Error::InvalidParams(format!("{cmd} takes no tolerance"))),
            }
        }
        let mut seen = Vec::new();
        for kv in raw {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{kv}'")))?;
            if !map.contains_key(k) {
                let known: Vec<&str> = keys.iter().map(|p| p.0).collect();
                return Err(Error::InvalidParams(format!(
                    "unknown key '{k}' for {cmd} (accepted: {})",
                    known.join(", ")
                )));
            }
            if seen.contains(&k) {
                return Err(Error::InvalidParams(format!("key '{k}' given twice")));
            }
            seen.push(k);
            map.insert(k.to_string(), v.to_string());
        }
        Ok(Params(map))
    }

    fn str(&self, k: &str) -> &str {
        self.0.get(k).map(String::as_str).expect("key declared for this subcommand")
    }

    fn f64(&self, k: &str) -> Result<f64> {
        let v = self.str(k);
        v.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{k}: '{v}' is not a number")))
    }

    fn usize(&self, k: &str) -> Result<usize> {
        let v = self.str(k);
        v.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{k}: '{v}' is not a nonnegative integer")))
    }

    fn f64_list(&self, k: &str) -> Result<Vec<f64>> {
        self.str(k)
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("{k}: '{s}' is not a number")))
            })
            .collect()
    }

    fn i32_list(&self, k: &str) -> Result<Vec<i32>> {
        self.str(k)
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("{k}: '{s}' is not an integer")))
            })
            .collect()
    }

    fn lame(&self) -> Result<LameParams> {
        LameParams::new(self.f64("lam")?, self.f64("mu")?, self.f64("omega")?)
    }
}

/// Fixed 17-significant-digit scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table held in memory until the run succeeds.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// What a subcommand produced: its table, lines for stdout and whether its checks passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub summary: Vec<String>,
    pub pass: bool,
}

#[derive(Serialize)]
struct Manifest<'a> {
    artifact: &'static str,
    version: &'static str,
    subcommand: &'a str,
    params: &'a Params,
    seed: u64,
    threads: usize,
    outputs: Vec<String>,
    pass: bool,
    exit_code: u8,
}

fn bool_str(b: bool) -> String {
    b.to_string()
}

fn verify_addition(p: &Params, seed: u64) -> Result<Outcome> {
    let lp = p.lame()?;
    let tol = p.f64("tol")?;
    let series_tol = p.f64("series_tol")?;
    let n = p.usize("n_cases")?;
    let collapse = (lp.lam + lp.mu_shear).abs() <= 1e-12 * lp.mu_shear;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut t = Table::new(&[
        "case",
        "x1",
        "x2",
        "y1",
        "y2",
        "n_max",
        "tail_bound",
        "rel_err",
        "symmetry_err",
        "collapse_err",
        "pass",
    ]);
    let mut fails = 0;
    for case in 0..n {
        let r = rng.gen_range(0.5..3.0);
        let s = r * rng.gen_range(0.05..0.8);
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let b: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let x = [r * a.cos(), r * a.sin()];
        let y = [s * b.cos(), s * b.sin()];
        let direct = phi_direct_2d(x, y, &lp)?;
        let (series, plan) = phi_series_2d(x, y, &lp, series_tol)?;
        let rel = series.max_diff(&direct) / direct.max_abs();
        let swapped = phi_direct_2d(y, x, &lp)?;
        let sym = swapped.max_diff(&direct) / direct.max_abs();
        let col = if collapse {
            let h = helmholtz_kernel(x, y, &lp)?;
            Some(series.max_diff(&(Mat2C::IDENTITY * h)) / h.norm())
        } else {
            None
        };
        let ok = rel <= tol && sym <= 1e-12 && col.is_none_or(|c| c <= 1e-10);
        fails += usize::from(!ok);
        t.push(vec![
            case.to_string(),
            fmt_num(x[0]),
            fmt_num(x[1]),
            fmt_num(y[0]),
            fmt_num(y[1]),
            plan.n_max.to_string(),
            fmt_num(plan.tail_bound),
            fmt_num(rel),
            fmt_num(sym),
            col.map(fmt_num).unwrap_or_default(),
            bool_str(ok),
        ]);
    }
    Ok(Outcome {
        table: t,
        summary: vec![format!("{} of {n} cases within tol = {tol:e}", n - fails)],
        pass: fails == 0,
    })
}

fn solve_cmd(p: &Params) -> Result<Outcome> {
    let b: Bump = p.str("forcing").parse()?;
    let lp = p.lame()?;
    let h = p.f64("h")?;
    let n_theta = p.usize("n_theta")?;
    let tol = p.f64("tol")?;
    let (r1, r2) = (p.f64("r1")?, p.f64("r2")?);
    let (lo, hi) = b.support();
    let grid = PolarGrid::uniform((lo - 0.25).max(h), hi + 0.25, h, n_theta)?;
    let u = solve(&b, &lp, &grid.radii)?.field(&grid)?;
    let f = GridField::from_fn(&grid, |x| b.value(x));
    let residual = residual_check(&u, &f, &lp)?;
    let out = OutgoingField::from_source(&b, &lp)?;
    let rp = out.p_part(&lp).radiation(lp.k_p, r1, r2)?;
    let rs = out.s_part(&lp).radiation(lp.k_s, r1, r2)?;
    let mut t = Table::new(&["r", "theta", "u1_re", "u1_im", "u2_re", "u2_im"]);
    for (i, &r) in grid.radii.iter().enumerate() {
        for j in 0..grid.n_theta {
            let v = u.values[i][j];
            t.push(vec![
                fmt_num(r),
                fmt_num(grid.theta(j)),
                fmt_num(v[0].re),
                fmt_num(v[0].im),
                fmt_num(v[1].re),
                fmt_num(v[1].im),
            ]);
        }
    }
    let pass = residual <= tol && rp.pass && rs.pass;
    Ok(Outcome {
        table: t,
        summary: vec![
            format!("residual = {}", fmt_num(residual)),
            format!("radiation_p ratio = {} threshold = {}", fmt_num(rp.ratio), fmt_num(rp.threshold)),
            format!("radiation_s ratio = {} threshold = {}", fmt_num(rs.ratio), fmt_num(rs.threshold)),
        ],
        pass,
    })
}

fn mt_cmd(p: &Params) -> Result<Outcome> {
    let w = RadialWeight::parse(p.str("weight"))?;
    let tol = p.f64("tol")?;
    let rep = w.mt_norm()?;
    let rel = rep.quadrature_error / rep.mt_norm;
    let mut t = Table::new(&["weight", "mt_norm", "argmax_mu", "xray_norm", "quadrature_error"]);
    t.push(vec![
        w.to_string(),
        fmt_num(rep.mt_norm),
        fmt_num(rep.argmax_mu),
        fmt_num(rep.xray_norm),
        fmt_num(rep.quadrature_error),
    ]);
    Ok(Outcome {
        table: t,
        summary: vec![format!("mt_norm = {}", fmt_num(rep.mt_norm))],
        pass: rel <= tol,
    })
}

fn counterexample_cmd(p: &Params) -> Result<Outcome> {
    let lad = counterexample_ladder(p.f64("eta")?, p.usize("ladder")?)?;
    let mut t = Table::new(&["eta", "delta", "norm_f", "lower_Mf", "ratio", "ln_eta_over_delta"]);
    for r in &lad.reports {
        t.push(vec![
            fmt_num(r.eta),
            fmt_num(r.delta),
            fmt_num(r.norm_f),
            fmt_num(r.lower_mf),
            fmt_num(r.ratio),
            fmt_num(r.log_eta_over_delta),
        ]);
    }
    Ok(Outcome {
        table: t,
        summary: vec![format!(
            "slope = {} strictly_increasing = {}",
            fmt_num(lad.slope),
            lad.strictly_increasing
        )],
        pass: lad.strictly_increasing,
    })
}

fn lemmas_cmd(p: &Params) -> Result<Outcome> {
    let id: LemmaId = p.str("id").parse()?;
    let mus = p.f64_list("mu")?;
    let a = p.f64("a")?;
    let w = RadialWeight::parse(p.str("weight"))?;
    let rows = lemma_sweep(id, &mus, a, &w)?;
    let mut t = Table::new(&["mu", "a", "region", "value", "mt_norm_sq", "ratio", "quad_err"]);
    let mut pass = true;
    for r in &rows {
        pass &= r.ratio.is_finite() && r.ratio >= 0.0;
        t.push(vec![
            fmt_num(r.mu),
            fmt_num(r.a),
            r.region.clone(),
            fmt_num(r.value),
            fmt_num(r.mt_norm_sq),
            fmt_num(r.ratio),
            fmt_num(r.quad_err),
        ]);
    }
    let top = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(Outcome {
        table: t,
        summary: vec![format!("{id}: {} rows, max ratio = {}", rows.len(), fmt_num(top))],
        pass,
    })
}

fn estimates_cmd(p: &Params) -> Result<Outcome> {
    let which = p.str("theorem");
    let (t1, t2) = match which {
        "thm1" => (true, false),
        "thm2" => (false, true),
        "both" => (true, true),
        _ => return Err(Error::InvalidParams(format!("theorem must be thm1, thm2 or both, got '{which}'"))),
    };
    let omegas = p.f64_list("omega")?;
    let modes = p.i32_list("modes")?;
    let (r0, width) = (p.f64("r0")?, p.f64("w")?);
    let weights = p
        .str("weights")
        .split(';')
        .map(RadialWeight::parse)
        .collect::<Result<Vec<_>>>()?;
    let base = LameParams::new(p.f64("lam")?, p.f64("mu")?, 1.0)?;
    let mut t = Table::new(&[
        "theorem",
        "weight",
        "n",
        "omega",
        "numerator",
        "denominator",
        "ratio",
        "flagged",
        "params_hash",
    ]);
    let mut pass = true;
    let mut worst = 0.0f64;
    for w in &weights {
        for &n in &modes {
            let b = Bump::new(n, r0, width)?;
            for &om in &omegas {
                let lp = base.with_omega(om)?;
                let mut run = |name: &str, rep: crate::estimates::RatioReport| {
                    pass &= rep.flagged || (rep.ratio.is_finite() && rep.ratio > 0.0);
                    worst = worst.max(rep.ratio);
                    t.push(vec![
                        name.to_string(),
                        w.to_string(),
                        n.to_string(),
                        fmt_num(om),
                        fmt_num(rep.numerator),
                        fmt_num(rep.denominator),
                        fmt_num(rep.ratio),
                        bool_str(rep.flagged),
                        rep.params_hash,
                    ]);
                };
                if t1 {
                    run("thm1", thm1_ratio(&b, &lp, w)?);
                }
                if t2 {
                    run("thm2", thm2_ratio(&b, &lp, w)?);
                }
            }
        }
    }
    Ok(Outcome {
        summary: vec![format!("{} rows, max ratio = {}", t.rows.len(), fmt_num(worst))],
        table: t,
        pass,
    })
}

fn selftest_cmd() -> Result<Outcome> {
    let checks = selftest::run_all()?;
    let mut t = Table::new(&["check", "worst", "tol", "points", "pass"]);
    let mut summary = Vec::new();
    for c in &checks {
        t.push(vec![
            c.name.clone(),
            fmt_num(c.worst),
            fmt_num(c.tol),
            c.points.to_string(),
            bool_str(c.pass),
        ]);
        summary.push(format!("{} {} worst = {}", if c.pass { "PASS" } else { "FAIL" }, c.name, fmt_num(c.worst)));
    }
    Ok(Outcome {
        table: t,
        summary,
        pass: checks.iter().all(|c| c.pass),
    })
}

fn dispatch(cmd: &Cmd, p: &Params, seed: u64) -> Result<Outcome> {
    match cmd {
        Cmd::VerifyAddition(_) => verify_addition(p, seed),
        Cmd::Solve(_) => solve_cmd(p),
        Cmd::Mt(_) => mt_cmd(p),
        Cmd::Counterexample(_) => counterexample_cmd(p),
        Cmd::Lemmas(_) => lemmas_cmd(p),
        Cmd::Estimates(_) => estimates_cmd(p),
        Cmd::SpecfunSelftest(_) => selftest_cmd(),
    }
}

/// Usage and parameter problems map to 2, numerical failures to 1.
pub fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidParams(_) | Error::Parse(_) | Error::Domain(_) | Error::Index(_) | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_FAIL,
    }
}

fn write_outputs(dir: &Path, name: &str, table: &Table, manifest: &Manifest) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{name}.csv")), table.to_csv()?)?;
    let mut json = serde_json::to_string_pretty(manifest).map_err(|e| Error::Io(e.to_string()))?;
    json.push('\n');
    fs::write(dir.join("manifest.json"), json)?;
    Ok(())
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let name = cli.cmd.name();
    let params = match Params::resolve(cli.cmd.raw(), cli.cmd.keys(), cli.tol, name) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("lame-mt {name}: {e}");
            return EXIT_CONFIG;
        }
    };
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        eprintln!("lame-mt: --threads must be positive");
        return EXIT_CONFIG;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("lame-mt: cannot start thread pool: {e}");
            return EXIT_CONFIG;
        }
    };
    let outcome = match pool.install(|| dispatch(&cli.cmd, &params, cli.seed)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("lame-mt {name}: {e}");
            return exit_code_for(&e);
        }
    };
    let code = if outcome.pass { EXIT_PASS } else { EXIT_FAIL };
    let manifest = Manifest {
        artifact: "lame-mt",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: name,
        params: &params,
        seed: cli.seed,
        threads,
        outputs: vec![format!("{name}.csv"), "manifest.json".to_string()],
        pass: outcome.pass,
        exit_code: code,
    };
    if let Err(e) = write_outputs(&cli.out, name, &outcome.table, &manifest) {
        eprintln!("lame-mt {name}: {e}");
        return EXIT_CONFIG;
    }
    let mut text = String::new();
    for line in &outcome.summary {
        let _ = writeln!(text, "{line}");
    }
    let _ = writeln!(text, "{} -> {}", if outcome.pass { "pass" } else { "fail" }, cli.out.join(format!("{name}.csv")).display());
    print!("{text}");
    code
}
