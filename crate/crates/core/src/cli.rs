//! Configuration parsing, experiment orchestration and CSV emission for the
//! `rzkbo` binary.
//!
//! The config is sectioned `key = value` text (TOML syntax) with four
//! sections, `[grid]`, `[solver]`, `[norms]` and `[run]`. Missing keys take
//! their defaults; unknown keys are rejected.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{config, Error, Result};
use crate::experiments::{
    b_base_grid, decay_base_grid, default_data, gaussian_family, run_b_boundedness, run_b_contrast,
    run_decay_breakdown, run_inequality_suite, run_linear_growth_suite, run_solver_checks,
    run_uc_jump, uc_initial_data, ExperimentReport,
};
use crate::grid::GridSpec;
use crate::norms::NormIndices;
use crate::oracles::JumpConfig;
use crate::solver::SolverParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    LinearGrowth,
    DecayBreakdown,
    UcJump,
    BBounded,
    Inequalities,
    All,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Simulate,
        Command::LinearGrowth,
        Command::DecayBreakdown,
        Command::UcJump,
        Command::BBounded,
        Command::Inequalities,
        Command::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::LinearGrowth => "linear-growth",
            Command::DecayBreakdown => "decay-breakdown",
            Command::UcJump => "uc-jump",
            Command::BBounded => "b-bounded",
            Command::Inequalities => "inequalities",
            Command::All => "all",
        }
    }

    pub fn parse(s: &str) -> Result<Command> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command '{s}' in section [run]")))
    }
}

/// Experiment knobs read from `[run]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RunKnobs {
    pub t2: f64,
    pub uc_amplitude: f64,
    pub eta_max: f64,
    pub jump_degree: usize,
    pub jump_points: usize,
    pub family_size: usize,
    pub boxes: usize,
    pub pairs: usize,
}

impl Default for RunKnobs {
    fn default() -> Self {
        RunKnobs {
            t2: 0.5,
            uc_amplitude: 0.1,
            eta_max: 2.5,
            jump_degree: 3,
            jump_points: 8,
            family_size: 20,
            boxes: 4,
            pairs: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub grid: GridSpec,
    pub solver: SolverParams,
    pub norms: NormIndices,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub knobs: RunKnobs,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Simulate,
            grid: GridSpec::default(),
            solver: SolverParams::default(),
            norms: NormIndices::default(),
            seed: 0,
            out_dir: PathBuf::from("out"),
            knobs: RunKnobs::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.solver.validate()?;
        self.norms.validate()?;
        if self.solver.grid != self.grid {
            return config("solver grid differs from [grid]");
        }
        if matches!(self.command, Command::BBounded | Command::All) && self.norms.r1 >= 2.5 {
            return config(format!(
                "r1 must be < 2.5 for b-bounded pass regime (got {})",
                self.norms.r1
            ));
        }
        let k = &self.knobs;
        if !(k.t2.is_finite() && k.t2 > 0.0) {
            return config(format!("t2 must be > 0 (got {})", k.t2));
        }
        if !(k.eta_max.is_finite() && k.eta_max > 0.0) {
            return config(format!("eta_max must be > 0 (got {})", k.eta_max));
        }
        if !k.uc_amplitude.is_finite() {
            return config("uc_amplitude must be finite");
        }
        if k.jump_points < (k.jump_degree + 1).max(4) {
            return config("jump_points must be >= max(4, jump_degree + 1)");
        }
        if k.family_size < 2 || k.pairs < 2 || k.boxes < 2 {
            return config("family_size, pairs and boxes must be >= 2");
        }
        Ok(())
    }

    fn jump(&self) -> JumpConfig {
        JumpConfig {
            degree: self.knobs.jump_degree,
            points: self.knobs.jump_points,
            ..JumpConfig::default()
        }
    }
}

type Table = toml::Table;

fn get_f64(t: &Table, sec: &str, key: &str) -> Result<Option<f64>> {
    match t.get(key) {
        None => Ok(None),
        Some(toml::Value::Float(v)) => Ok(Some(*v)),
        Some(toml::Value::Integer(v)) => Ok(Some(*v as f64)),
        Some(_) => config(format!("key '{key}' in section [{sec}] must be a number")),
    }
}

fn get_uint(t: &Table, sec: &str, key: &str) -> Result<Option<u64>> {
    match t.get(key) {
        None => Ok(None),
        Some(toml::Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
        Some(_) => config(format!(
            "key '{key}' in section [{sec}] must be a nonnegative integer"
        )),
    }
}

fn get_bool(t: &Table, sec: &str, key: &str) -> Result<Option<bool>> {
    match t.get(key) {
        None => Ok(None),
        Some(toml::Value::Boolean(v)) => Ok(Some(*v)),
        Some(_) => config(format!(
            "key '{key}' in section [{sec}] must be true or false"
        )),
    }
}

fn get_str<'a>(t: &'a Table, sec: &str, key: &str) -> Result<Option<&'a str>> {
    match t.get(key) {
        None => Ok(None),
        Some(toml::Value::String(v)) => Ok(Some(v)),
        Some(_) => config(format!("key '{key}' in section [{sec}] must be a string")),
    }
}

fn check_keys(t: &Table, sec: &str, allowed: &[&str]) -> Result<()> {
    match t.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => config(format!("unknown key '{k}' in section [{sec}]")),
        None => Ok(()),
    }
}

const GRID_KEYS: [&str; 4] = ["nx", "ny", "lx", "ly"];
const SOLVER_KEYS: [&str; 10] = [
    "a",
    "b",
    "n",
    "dt",
    "t_end",
    "picard_tol",
    "picard_max",
    "dealias",
    "nonlinear_includes_dyy",
    "record_every",
];
const NORM_KEYS: [&str; 4] = ["s1", "s2", "r1", "r2"];
const RUN_KEYS: [&str; 11] = [
    "command",
    "seed",
    "out_dir",
    "t2",
    "uc_amplitude",
    "eta_max",
    "jump_degree",
    "jump_points",
    "family_size",
    "boxes",
    "pairs",
];

/// Parses and validates a config; missing keys take their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| {
        Error::Config(format!("malformed config: {}", e.message()))
    })?;
    let empty = Table::new();
    for (k, v) in &doc {
        if !["grid", "solver", "norms", "run"].contains(&k.as_str()) {
            return config(format!("unknown section [{k}]"));
        }
        if !v.is_table() {
            return config(format!("'{k}' must be a section"));
        }
    }
    let section = |name: &str| doc.get(name).and_then(|v| v.as_table()).unwrap_or(&empty);
    let mut cfg = RunConfig::default();

    let g = section("grid");
    check_keys(g, "grid", &GRID_KEYS)?;
    let size = |key: &str, dflt: usize| -> Result<usize> {
        Ok(get_uint(g, "grid", key)?.map_or(dflt, |v| v as usize))
    };
    let nx = size("nx", cfg.grid.nx)?;
    let ny = size("ny", cfg.grid.ny)?;
    if nx < 8 || nx % 2 == 1 {
        return config(format!("nx must be even ≥ 8 (got {nx})"));
    }
    if ny < 8 || ny % 2 == 1 {
        return config(format!("ny must be even ≥ 8 (got {ny})"));
    }
    cfg.grid = GridSpec::new(
        nx,
        ny,
        get_f64(g, "grid", "lx")?.unwrap_or(cfg.grid.lx),
        get_f64(g, "grid", "ly")?.unwrap_or(cfg.grid.ly),
    )?;

    let s = section("solver");
    check_keys(s, "solver", &SOLVER_KEYS)?;
    let p = &mut cfg.solver;
    p.grid = cfg.grid;
    p.a_coef = get_f64(s, "solver", "a")?.unwrap_or(p.a_coef);
    p.b_coef = get_f64(s, "solver", "b")?.unwrap_or(p.b_coef);
    if let Some(n) = get_uint(s, "solver", "n")? {
        p.n_power =
            u32::try_from(n).map_err(|_| Error::Config(format!("n out of range (got {n})")))?;
    }
    p.dt = get_f64(s, "solver", "dt")?.unwrap_or(p.dt);
    p.t_end = get_f64(s, "solver", "t_end")?.unwrap_or(p.t_end);
    p.picard_tol = get_f64(s, "solver", "picard_tol")?.unwrap_or(p.picard_tol);
    p.picard_max = get_uint(s, "solver", "picard_max")?.map_or(p.picard_max, |v| v as usize);
    p.dealias = get_bool(s, "solver", "dealias")?.unwrap_or(p.dealias);
    p.nonlinear_includes_dyy =
        get_bool(s, "solver", "nonlinear_includes_dyy")?.unwrap_or(p.nonlinear_includes_dyy);
    p.record_every = get_uint(s, "solver", "record_every")?.map_or(p.record_every, |v| v as usize);

    let n = section("norms");
    check_keys(n, "norms", &NORM_KEYS)?;
    let d = cfg.norms;
    cfg.norms = NormIndices {
        s1: get_f64(n, "norms", "s1")?.unwrap_or(d.s1),
        s2: get_f64(n, "norms", "s2")?.unwrap_or(d.s2),
        r1: get_f64(n, "norms", "r1")?.unwrap_or(d.r1),
        r2: get_f64(n, "norms", "r2")?.unwrap_or(d.r2),
    };

    let r = section("run");
    check_keys(r, "run", &RUN_KEYS)?;
    if let Some(c) = get_str(r, "run", "command")? {
        cfg.command = Command::parse(c)?;
    }
    cfg.seed = match r.get("seed") {
        // TOML integers are signed; larger seeds are written as strings
        Some(toml::Value::String(v)) => v.parse().map_err(|_| {
            Error::Config(format!(
                "key 'seed' in section [run] must be a u64 (got '{v}')"
            ))
        })?,
        _ => get_uint(r, "run", "seed")?.unwrap_or(cfg.seed),
    };
    if let Some(o) = get_str(r, "run", "out_dir")? {
        cfg.out_dir = PathBuf::from(o);
    }
    let k = &mut cfg.knobs;
    k.t2 = get_f64(r, "run", "t2")?.unwrap_or(k.t2);
    k.uc_amplitude = get_f64(r, "run", "uc_amplitude")?.unwrap_or(k.uc_amplitude);
    k.eta_max = get_f64(r, "run", "eta_max")?.unwrap_or(k.eta_max);
    let count = |key: &str, dflt: usize| -> Result<usize> {
        Ok(get_uint(r, "run", key)?.map_or(dflt, |v| v as usize))
    };
    k.jump_degree = count("jump_degree", k.jump_degree)?;
    k.jump_points = count("jump_points", k.jump_points)?;
    k.family_size = count("family_size", k.family_size)?;
    k.boxes = count("boxes", k.boxes)?;
    k.pairs = count("pairs", k.pairs)?;

    cfg.validate()?;
    Ok(cfg)
}

/// Renders a config in the format read by [`parse_config`].
pub fn serialize_config(cfg: &RunConfig) -> String {
    use toml::Value as V;
    let f = V::Float;
    let u = |v: usize| V::Integer(v as i64);
    let table = |pairs: Vec<(&str, V)>| -> V {
        V::Table(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    };
    let (g, p, n, k) = (cfg.grid, cfg.solver, cfg.norms, cfg.knobs);
    let mut doc = Table::new();
    doc.insert(
        "grid".into(),
        table(vec![
            ("nx", u(g.nx)),
            ("ny", u(g.ny)),
            ("lx", f(g.lx)),
            ("ly", f(g.ly)),
        ]),
    );
    doc.insert(
        "solver".into(),
        table(vec![
            ("a", f(p.a_coef)),
            ("b", f(p.b_coef)),
            ("n", V::Integer(p.n_power as i64)),
            ("dt", f(p.dt)),
            ("t_end", f(p.t_end)),
            ("picard_tol", f(p.picard_tol)),
            ("picard_max", u(p.picard_max)),
            ("dealias", V::Boolean(p.dealias)),
            (
                "nonlinear_includes_dyy",
                V::Boolean(p.nonlinear_includes_dyy),
            ),
            ("record_every", u(p.record_every)),
        ]),
    );
    doc.insert(
        "norms".into(),
        table(vec![
            ("s1", f(n.s1)),
            ("s2", f(n.s2)),
            ("r1", f(n.r1)),
            ("r2", f(n.r2)),
        ]),
    );
    doc.insert(
        "run".into(),
        table(vec![
            ("command", V::String(cfg.command.name().into())),
            (
                "seed",
                i64::try_from(cfg.seed)
                    .map_or_else(|_| V::String(cfg.seed.to_string()), V::Integer),
            ),
            (
                "out_dir",
                V::String(cfg.out_dir.to_string_lossy().into_owned()),
            ),
            ("t2", f(k.t2)),
            ("uc_amplitude", f(k.uc_amplitude)),
            ("eta_max", f(k.eta_max)),
            ("jump_degree", u(k.jump_degree)),
            ("jump_points", u(k.jump_points)),
            ("family_size", u(k.family_size)),
            ("boxes", u(k.boxes)),
            ("pairs", u(k.pairs)),
        ]),
    );
    toml::to_string(&doc).expect("plain tables always serialize")
}

/// Runs one command and returns its reports.
pub fn execute(cfg: &RunConfig, command: Command) -> Result<Vec<ExperimentReport>> {
    let g = cfg.grid;
    let p = cfg.solver;
    Ok(match command {
        Command::Simulate => vec![run_solver_checks(&default_data(g)?, &p, cfg.norms)?],
        Command::LinearGrowth => vec![run_linear_growth_suite(g, p.b_coef)?],
        Command::DecayBreakdown => vec![run_decay_breakdown(decay_base_grid(g)?, p.b_coef)?],
        Command::UcJump => {
            let phi = uc_initial_data(g, cfg.knobs.uc_amplitude)?;
            let lin = SolverParams { a_coef: 0.0, ..p };
            let q = SolverParams { n_power: 2, ..p };
            let (t2, eta) = (cfg.knobs.t2, cfg.knobs.eta_max);
            vec![
                run_uc_jump(&phi, &lin, t2, &cfg.jump(), eta)?,
                run_uc_jump(&phi, &q, t2, &cfg.jump(), eta)?,
            ]
        }
        Command::BBounded => {
            let fam = gaussian_family(b_base_grid(g)?, cfg.knobs.family_size, cfg.seed)?;
            let n = cfg.norms;
            vec![
                run_b_boundedness(&fam, n, cfg.knobs.boxes)?,
                run_b_contrast(&fam, n.s1, n.s2, n.r2, cfg.knobs.boxes)?,
            ]
        }
        Command::Inequalities => vec![run_inequality_suite(cfg.knobs.pairs / 2, cfg.seed)?],
        Command::All => {
            let mut out = Vec::new();
            for c in &Command::ALL[..6] {
                out.extend(execute(cfg, *c)?);
            }
            out
        }
    })
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes one CSV per series, `verdicts.csv` and `config.json`.
pub fn write_outputs(dir: &Path, cfg: &RunConfig, reports: &[ExperimentReport]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for rep in reports {
        let params = serde_json::to_string(&rep.params).map_err(std::io::Error::from)?;
        for s in &rep.series {
            let mut text = format!("# {},{}\nt,value\n", rep.name, params);
            for (t, v) in s.t.iter().zip(&s.values) {
                writeln!(text, "{t:?},{v:?}").expect("write to string");
            }
            let file = format!("{}__{}.csv", sanitize(&rep.name), sanitize(&s.label));
            fs::write(dir.join(file), text)?;
        }
    }
    let mut text = String::from("criterion,measured,threshold,pass\n");
    for v in reports.iter().flat_map(|r| &r.verdicts) {
        writeln!(
            text,
            "{},{:?},{:?},{}",
            v.criterion.replace(',', ";"),
            v.measured,
            v.threshold,
            v.pass
        )
        .expect("write to string");
    }
    fs::write(dir.join("verdicts.csv"), text)?;
    let json = serde_json::to_string_pretty(cfg).map_err(std::io::Error::from)?;
    fs::write(dir.join("config.json"), json + "\n")?;
    Ok(())
}

/// Exit code of a run: 0 when every verdict passes, 2 on any failure, 1 on
/// error (with a one-line diagnostic on standard error).
pub fn run(cfg: &RunConfig) -> i32 {
    let result = cfg
        .validate()
        .and_then(|_| execute(cfg, cfg.command))
        .and_then(|reps| write_outputs(&cfg.out_dir, cfg, &reps).map(|_| reps));
    match result {
        Ok(reps) if reps.iter().all(|r| r.passed()) => 0,
        Ok(_) => 2,
        Err(e) => {
            eprintln!("rzkbo: {}", e.to_string().replace('\n', " "));
            1
        }
    }
}

/// Pseudo-spectral experiments for the regularized ZK-BO equation.
#[derive(clap::Parser)]
#[command(name = "rzkbo", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Sectioned key = value config ([grid], [solver], [norms], [run]).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random families; overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
}

/// `rzkbo <command> --config <path> [--out <dir>] [--seed <u64>]`; returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!(
                "rzkbo: {}",
                msg.lines().next().unwrap_or("invalid arguments")
            );
            return 1;
        }
    };
    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("rzkbo: cannot read {}: {e}", args.config.display());
            return 1;
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("rzkbo: {e}");
            return 1;
        }
    };
    cfg.command = args.command;
    if let Some(o) = args.out {
        cfg.out_dir = o;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    run(&cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!((c.grid.nx, c.grid.ny), (512, 512));
        assert_eq!(c.grid.lx, 40.0 * std::f64::consts::PI);
        assert_eq!(
            (c.solver.a_coef, c.solver.b_coef, c.solver.n_power, c.seed),
            (1.0, 1.0, 2, 0)
        );
    }

    #[test]
    fn validation_messages() {
        let e = parse_config("[grid]\nnx = 7").unwrap_err().to_string();
        assert!(e.contains("nx must be even ≥ 8"), "{e}");
        let e = parse_config("[solver]\nbogus = 1").unwrap_err().to_string();
        assert!(e.contains("'bogus'") && e.contains("[solver]"), "{e}");
        let e = parse_config("[norms]\nr1 = 2.6\n[run]\ncommand = \"b-bounded\"")
            .unwrap_err()
            .to_string();
        assert!(
            e.contains("r1 must be < 2.5 for b-bounded pass regime"),
            "{e}"
        );
        assert!(parse_config("[norms]\nr1 = 2.6").is_ok());
        assert!(parse_config("[extra]\nx = 1").is_err());
        assert!(parse_config("[run]\ncommand = \"fly\"").is_err());
        assert!(parse_config("[grid]\nlx = \"wide\"").is_err());
    }

    #[test]
    fn b_grid_keeps_spacing() {
        let g = GridSpec::default();
        let b = b_base_grid(g).unwrap();
        assert!((b.dx() - g.dx()).abs() < 1e-12);
        assert!(b.lx > 14.0 && b.lx < 18.0);
    }

    #[test]
    fn unwritable_out_dir_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let cfg = RunConfig {
            out_dir: blocker.join("sub"),
            ..RunConfig::default()
        };
        assert!(write_outputs(&cfg.out_dir, &cfg, &[]).is_err());
    }

    fn arb_config() -> impl Strategy<Value = RunConfig> {
        (
            (4usize..40, 4usize..40, 1.0f64..200.0, 1.0f64..200.0),
            (
                -3.0f64..3.0,
                0.1f64..3.0,
                2u32..5,
                1e-4f64..0.1,
                1usize..100,
            ),
            (0.0f64..4.0, 0.0f64..4.0, 0.0f64..2.49, 0.0f64..4.0),
            (any::<u64>(), 0usize..7, any::<bool>()),
        )
            .prop_map(
                |((nx, ny, lx, ly), (a, b, n, dt, rec), (s1, s2, r1, r2), (seed, c, dl))| {
                    let grid = GridSpec::new(2 * nx, 2 * ny, lx, ly).unwrap();
                    RunConfig {
                        command: Command::ALL[c],
                        grid,
                        solver: SolverParams {
                            a_coef: a,
                            b_coef: b,
                            n_power: n,
                            grid,
                            dt,
                            t_end: 1.0,
                            record_every: rec,
                            dealias: dl,
                            ..SolverParams::default()
                        },
                        norms: NormIndices { s1, s2, r1, r2 },
                        seed,
                        out_dir: PathBuf::from(format!("runs/{seed}")),
                        knobs: RunKnobs::default(),
                    }
                },
            )
    }

    proptest! {
        #[test]
        fn serialize_round_trip(cfg in arb_config()) {
            let text = serialize_config(&cfg);
            let back = parse_config(&text).unwrap();
            prop_assert_eq!(&back, &cfg);
            prop_assert_eq!(parse_config(&serialize_config(&back)).unwrap(), back);
        }
    }

    fn rzkbo(args: &[&str]) -> i32 {
        main_with_args(std::iter::once("rzkbo").chain(args.iter().copied()))
    }

    fn write_config(dir: &Path, text: &str) -> String {
        let p = dir.join("run.toml");
        fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    const SMALL: &str = "[grid]\nnx = 128\nny = 128\nlx = 40.0\nly = 40.0\n";

    #[test]
    fn linear_growth_passes_and_is_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), SMALL);
        let a = dir.path().join("a");
        let run = || {
            let code = rzkbo(&[
                "linear-growth",
                "--config",
                &cfg,
                "--out",
                a.to_str().unwrap(),
            ]);
            assert_eq!(code, 0);
            let mut files: Vec<_> = fs::read_dir(&a)
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (e.file_name(), fs::read(e.path()).unwrap())
                })
                .collect();
            files.sort();
            files
        };
        let first = run();
        assert_eq!(first, run());
        assert!(first.iter().any(|(n, _)| n == "config.json"));
        let verdicts = fs::read_to_string(a.join("verdicts.csv")).unwrap();
        assert!(verdicts.starts_with("criterion,measured,threshold,pass\n"));
        assert!(verdicts.lines().skip(1).all(|l| l.ends_with(",true")));
        let series = a.join("linear-growth__norm_r1_1_r2_0.csv");
        let text = fs::read_to_string(&series).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# linear-growth,{"));
        assert_eq!(lines.next().unwrap(), "t,value");
        assert_eq!(lines.count(), 8);
    }

    #[test]
    fn simulate_linear_matches_the_group() {
        let dir = tempfile::tempdir().unwrap();
        let text = format!("{SMALL}[solver]\na = 0.0\ndt = 0.05\nt_end = 0.5\n");
        let cfg = write_config(dir.path(), &text);
        let out = dir.path().join("o");
        let code = rzkbo(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0);
        let verdicts = fs::read_to_string(out.join("verdicts.csv")).unwrap();
        assert!(verdicts.contains("solver linear consistency,"));
    }

    #[test]
    fn failing_verdicts_exit_two() {
        // the Gaussian box-growth verdict is red at every box size
        let dir = tempfile::tempdir().unwrap();
        let text = "[grid]\nnx = 128\nny = 32\nlx = 16.0\nly = 8.0\n";
        let cfg = write_config(dir.path(), text);
        let out = dir.path().join("o");
        let code = rzkbo(&[
            "decay-breakdown",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 2);
        let verdicts = fs::read_to_string(out.join("verdicts.csv")).unwrap();
        assert!(verdicts.contains("decay gaussian box growth,"));
    }

    #[test]
    fn errors_exit_one() {
        let dir = tempfile::tempdir().unwrap();
        let bad = write_config(dir.path(), "[grid]\nnx = 7\n");
        assert_eq!(rzkbo(&["simulate", "--config", &bad]), 1);

        let cfg = write_config(dir.path(), SMALL);
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let target = blocker.join("out");
        let code = rzkbo(&[
            "linear-growth",
            "--config",
            &cfg,
            "--out",
            target.to_str().unwrap(),
        ]);
        assert_eq!(code, 1);
        assert_eq!(rzkbo(&["simulate", "--config", "/nonexistent/run.toml"]), 1);
        assert_eq!(rzkbo(&["no-such-command", "--config", &cfg]), 1);
    }
}
