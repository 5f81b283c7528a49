use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use ng_core::analysis::{
    consensus_time_curve, consensus_time_table, find_tipping, pc_vs_k, sweep as sweep_rows, symmetric_trajectories,
    trajectory_compare, TippingConfig,
};
use ng_core::integrator::{integrate, CommittedPair, MeanField, OdeConfig, SymmetricPair, VectorField};
use ng_core::output::{self, SCHEMAS};
use ng_core::pair::{embed_product6, embed_product9, LinkState6, LinkState9};
use ng_core::{ensemble, NodeFractions, SimConfig};

use crate::manifest::{manifest_path, Manifest};
use crate::{execute, Failure};

#[derive(Parser, Debug)]
#[command(
    name = "ng",
    version,
    about = "Binary Naming Game on random networks: simulation, pair-approximation ODEs, tipping points",
    after_help = concat!(
        "Settings may come from a key=value file given with --config; flags on the command line win.\n",
        "Every CSV is written next to a .manifest that `ng replay` reruns.\n",
        "NG_THREADS caps the worker count. Exit status: 0 ok, 2 usage error, 3 numeric failure.",
    ),
    after_long_help = SCHEMAS
)]
pub struct Cli {
    /// key=value file of default flag values
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Monte Carlo ensemble on Erdős–Rényi networks
    Sim(SimArgs),
    /// Integrate the pair-approximation or mean-field ODE
    Ode(OdeArgs),
    /// Tipping committed fraction for each average degree
    Tip(TipArgs),
    /// Stable B fraction over a grid of committed fractions
    Sweep(SweepArgs),
    /// Simulation-versus-theory tables (presets 1, 2, 3, 5)
    Compare(CompareArgs),
    /// Rerun the command recorded in a manifest
    Replay(ReplayArgs),
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be positive, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn list<T: std::str::FromStr>(flag: &str, s: &str) -> Result<Vec<T>, Failure>
where
    T::Err: std::fmt::Display,
{
    let xs = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|e| Failure::Usage(format!("--{flag}: bad value {x:?}: {e}"))))
        .collect::<Result<Vec<T>, _>>()?;
    if xs.is_empty() {
        return Err(Failure::Usage(format!("--{flag} must list at least one value")));
    }
    Ok(xs)
}

#[derive(Args, Debug)]
#[command(args_override_self = true, after_help = "Writes <out>_runs.csv (run,seed,reached,t_eta) and <out>_trajectory.csv (t,p_A,p_B,p_AB,std_A,std_B,std_AB).")]
pub struct SimArgs {
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    /// Average degree
    #[arg(long, default_value_t = 5.0)]
    pub k: f64,
    /// Fraction of nodes committed to A; zero plays the symmetric game
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.95)]
    pub eta: f64,
    #[arg(long, default_value_t = 1, value_parser = count)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Censoring cap on T/N
    #[arg(long = "t-cap", default_value_t = 1e4, value_parser = positive)]
    pub t_cap: f64,
    /// Trajectory sampling interval in unit times
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub sample: f64,
    /// Output path prefix
    #[arg(long, default_value = "sim")]
    pub out: String,
}

#[derive(Args, Debug)]
#[command(args_override_self = true, after_help = "Writes <out>.csv with columns t,<link columns>,p_A,p_B,p_AB (mean field: t,p_A,p_B,p_AB).")]
pub struct OdeArgs {
    #[arg(long, default_value_t = 5.0)]
    pub k: f64,
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.01, value_parser = positive)]
    pub dt: f64,
    #[arg(long = "t-max", default_value_t = 1e6, value_parser = positive)]
    pub t_max: f64,
    /// Stop at the first crossing of p_A or p_B through this level
    #[arg(long)]
    pub eta: Option<f64>,
    /// `product`, or a file of initial values: 6 link fractions, 9 link
    /// fractions then l_CC, or 3 node fractions with --meanfield
    #[arg(long, default_value = "product")]
    pub init: String,
    /// Initial p_A of the symmetric product state
    #[arg(long, default_value_t = 0.5)]
    pub pa0: f64,
    /// Integrate the mean-field equations instead
    #[arg(long)]
    pub meanfield: bool,
    /// Pair system dimension; 9 when --p is positive, else 6
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["6", "9"]))]
    pub dim: Option<String>,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub sample: f64,
    #[arg(long = "steady-tol", default_value_t = 1e-10, value_parser = positive)]
    pub steady_tol: f64,
    #[arg(long, default_value = "ode")]
    pub out: String,
}

#[derive(Args, Debug)]
#[command(args_override_self = true, after_help = "Writes <out>.csv with columns k,p_c,p_low,p_high,evaluations,status.")]
pub struct TipArgs {
    /// Comma-separated average degrees
    #[arg(long = "k-list")]
    pub k_list: String,
    #[arg(long, default_value_t = 1e-4, value_parser = positive)]
    pub ptol: f64,
    /// p counts as above tipping when the stable p_B is below this
    #[arg(long = "pB-threshold", default_value_t = 0.01, value_parser = positive)]
    pub pb_threshold: f64,
    #[arg(long = "p-max", default_value_t = 0.2, value_parser = positive)]
    pub p_max: f64,
    #[arg(long, default_value = "tip")]
    pub out: String,
}

#[derive(Args, Debug)]
#[command(args_override_self = true, after_help = "Writes <out>.csv with columns k,p,p_B_star,converged,t_end.")]
pub struct SweepArgs {
    #[arg(long, default_value_t = 10.0)]
    pub k: f64,
    /// Comma-separated committed fractions; overrides the regular grid
    #[arg(long = "p-list")]
    pub p_list: Option<String>,
    #[arg(long = "p-max", default_value_t = 0.2, value_parser = positive)]
    pub p_max: f64,
    #[arg(long = "p-step", default_value_t = 0.005, value_parser = positive)]
    pub p_step: f64,
    #[arg(long, default_value = "sweep")]
    pub out: String,
}

#[derive(Args, Debug)]
#[command(
    args_override_self = true,
    after_help = "Figure 1: <out>.csv overlay (t,mc_*,pair_*,mf_*), n=500 k=5 runs=50.\n\
Figure 2: <out>.csv phase trajectories (k,t,p_A,p_B,p_AB) over --k-list.\n\
Figure 3: <out>.csv consensus times (n,ln_n,k,T_mc_mean,...) over --n-list, k=5 runs=50.\n\
Figure 5: <out>.csv consensus-time curve (p,T_mc_mean,...,T_ode), k=10 n=1000 runs=100."
)]
pub struct CompareArgs {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["1", "2", "3", "5"]))]
    pub fig: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, value_parser = count)]
    pub runs: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.95)]
    pub eta: f64,
    #[arg(long = "n-list", default_value = "200,500,1000,2000")]
    pub n_list: String,
    #[arg(long = "k-list", default_value = "2,5,50,1000000")]
    pub k_list: String,
    /// Committed fractions for figure 5; default brackets the ODE tipping point
    #[arg(long = "p-list")]
    pub p_list: Option<String>,
    #[arg(long = "t-cap", default_value_t = 1e4, value_parser = positive)]
    pub t_cap: f64,
    /// Initial p_A of the figure 2 trajectories
    #[arg(long, default_value_t = 0.6)]
    pub pa0: f64,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

fn show(v: Option<f64>) -> String {
    v.map_or("n/a".to_string(), |x| format!("{x:.4}"))
}

fn csv_path(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{suffix}.csv"))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_manifests(args: &[String], params: Vec<(String, String)>, outputs: &[PathBuf]) -> Result<(), Failure> {
    let m = Manifest {
        command: args[0].clone(),
        args: args.to_vec(),
        params,
        outputs: outputs.to_vec(),
    };
    let text = m.render();
    for o in outputs {
        let mut w = create(&manifest_path(o))?;
        w.write_all(text.as_bytes())?;
        w.flush()?;
    }
    Ok(())
}

macro_rules! params {
    ($($k:literal => $v:expr),* $(,)?) => {
        vec![$(($k.to_string(), format!("{:?}", $v))),*]
    };
}

pub fn sim(a: SimArgs, args: &[String]) -> Result<(), Failure> {
    let cfg = SimConfig {
        n: a.n,
        k_avg: a.k,
        committed_fraction: a.p,
        eta: a.eta,
        runs: a.runs,
        seed: a.seed,
        max_time_per_node: a.t_cap,
        sample_interval: a.sample,
        record_trajectory: true,
    };
    let stats = ensemble(&cfg)?;
    let runs_path = csv_path(&a.out, "_runs");
    let traj_path = csv_path(&a.out, "_trajectory");
    output::write_runs(create(&runs_path)?, &stats.runs)?;
    output::write_mean_trajectory(create(&traj_path)?, &stats.mean_trajectory)?;
    write_manifests(
        args,
        params!("n" => a.n, "k" => a.k, "p" => a.p, "eta" => a.eta, "runs" => a.runs, "seed" => a.seed,
            "t_cap" => a.t_cap, "sample" => a.sample),
        &[runs_path, traj_path],
    )?;
    println!(
        "runs {}  reached {:.3}  mean T/N {}  rel std {}",
        stats.runs.len(),
        stats.reached_fraction,
        show(stats.mean_t_eta),
        show(stats.rel_std_t_eta)
    );
    Ok(())
}

fn read_numbers(path: &str) -> Result<Vec<f64>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("--init {path}: {e}")))?;
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| Failure::Usage(format!("--init {path}: {t:?}: {e}"))))
        .collect()
}

pub fn ode(a: OdeArgs, args: &[String]) -> Result<(), Failure> {
    let dim = match a.dim.as_deref() {
        Some("6") => 6,
        Some(_) => 9,
        None if a.p > 0.0 => 9,
        None => 6,
    };
    if !a.meanfield && dim == 6 && a.p > 0.0 {
        return Err(Failure::Usage("--p > 0 needs the 9-dimensional system (--dim 9)".into()));
    }
    if !(0.0..1.0).contains(&a.p) {
        return Err(Failure::Usage(format!("--p must lie in [0, 1), got {}", a.p)));
    }
    let cfg = OdeConfig {
        dt: a.dt,
        t_max: a.t_max,
        steady_tol: a.steady_tol,
        eta: a.eta,
        sample_interval: a.sample,
        ..OdeConfig::default()
    };
    let start = if a.p > 0.0 {
        NodeFractions::new(a.p, 1.0 - a.p, 0.0)
    } else {
        if !(0.0..=1.0).contains(&a.pa0) {
            return Err(Failure::Usage("--pa0 must lie in [0, 1]".into()));
        }
        NodeFractions::new(a.pa0, 1.0 - a.pa0, 0.0)
    };
    let file = (a.init != "product").then(|| read_numbers(&a.init)).transpose()?;
    let wrong = |want: &str, got: usize| Failure::Usage(format!("--init file must hold {want} values, found {got}"));
    let path = csv_path(&a.out, "");
    let (traj, sys): (_, Box<dyn VectorField<f64>>) = if a.meanfield {
        let x0 = match &file {
            Some(v) if v.len() == 3 => v.clone(),
            Some(v) => return Err(wrong("3", v.len())),
            None => start.to_array().to_vec(),
        };
        let sys = MeanField::new(a.p)?;
        (integrate(&sys, &x0, &cfg)?, Box::new(sys))
    } else if dim == 6 {
        let l = match &file {
            Some(v) if v.len() == 6 => LinkState6::new(v.as_slice().try_into().expect("six")),
            Some(v) => return Err(wrong("6", v.len())),
            None => embed_product6(&start),
        };
        l.validate(&1e-9)?;
        let sys = SymmetricPair::new(a.k)?;
        (integrate(&sys, &l.l, &cfg)?, Box::new(sys))
    } else {
        let l = match &file {
            Some(v) if v.len() == 10 => LinkState9::new(v[..9].try_into().expect("nine"), v[9]),
            Some(v) => return Err(wrong("10", v.len())),
            None => embed_product9(&start, &a.p)?,
        };
        l.validate(&1e-9)?;
        let sys = CommittedPair::new(a.k, l.l_cc)?;
        (integrate(&sys, &l.l, &cfg)?, Box::new(sys))
    };
    output::write_ode_trajectory(create(&path)?, sys.as_ref(), &traj)?;
    write_manifests(
        args,
        params!("k" => a.k, "p" => a.p, "dt" => a.dt, "t_max" => a.t_max, "eta" => a.eta, "init" => a.init,
            "pa0" => a.pa0, "meanfield" => a.meanfield, "dim" => dim, "sample" => a.sample,
            "steady_tol" => a.steady_tol),
        &[path],
    )?;
    let end = traj.last();
    println!(
        "{} at t = {:.4}  p_A {:.6}  p_B {:.6}  p_AB {:.6}{}",
        traj.termination.as_str(),
        end.t,
        end.p.p_a,
        end.p.p_b,
        end.p.p_ab,
        traj.t_eta.map_or(String::new(), |t| format!("  T_eta {t:.4}"))
    );
    Ok(())
}

pub fn tip(a: TipArgs, args: &[String]) -> Result<(), Failure> {
    let ks: Vec<f64> = list("k-list", &a.k_list)?;
    if a.pb_threshold >= 1.0 || a.p_max >= 1.0 {
        return Err(Failure::Usage("--pB-threshold and --p-max must be below 1".into()));
    }
    let cfg = TippingConfig {
        p_tol: a.ptol,
        pb_threshold: a.pb_threshold,
        p_max: a.p_max,
        ..TippingConfig::default()
    };
    let rows = pc_vs_k(&ks, &cfg);
    let path = csv_path(&a.out, "");
    output::write_tipping(create(&path)?, &rows)?;
    write_manifests(
        args,
        params!("k_list" => ks, "ptol" => a.ptol, "pB_threshold" => a.pb_threshold, "p_max" => a.p_max),
        &[path],
    )?;
    let mut failed = Vec::new();
    for (k, r) in &rows {
        match r {
            Ok(t) => println!("k {k}  p_c {:.5}  [{:.5}, {:.5}]", t.p_c, t.p_low, t.p_high),
            Err(e) => {
                println!("k {k}  {e}");
                failed.push(k.to_string());
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numeric(format!("no tipping point found for k = {}", failed.join(", "))))
    }
}

pub fn sweep(a: SweepArgs, args: &[String]) -> Result<(), Failure> {
    let grid: Vec<f64> = match &a.p_list {
        Some(s) => list("p-list", s)?,
        None => {
            let steps = (a.p_max / a.p_step + 1e-9).floor() as usize;
            (0..=steps).map(|i| i as f64 * a.p_step).collect()
        }
    };
    let rows = sweep_rows(a.k, &grid, &OdeConfig::default())?;
    let path = csv_path(&a.out, "");
    output::write_sweep(create(&path)?, &rows)?;
    write_manifests(args, params!("k" => a.k, "p_grid" => grid), &[path])?;
    println!("{} rows", rows.len());
    Ok(())
}

pub fn compare(a: CompareArgs, args: &[String]) -> Result<(), Failure> {
    let out = a.out.clone().unwrap_or_else(|| format!("fig{}", a.fig));
    let path = csv_path(&out, "");
    let mut params = params!("fig" => a.fig, "seed" => a.seed, "eta" => a.eta);
    match a.fig.as_str() {
        "1" => {
            let (n, k, runs) = (a.n.unwrap_or(500), a.k.unwrap_or(5.0), a.runs.unwrap_or(50));
            let cmp = trajectory_compare(k, n, runs, a.seed)?;
            output::write_compare(create(&path)?, &cmp)?;
            params.extend(params!("n" => n, "k" => k, "runs" => runs));
            println!(
                "window [0, {:.2}]  pair gap {:.4}  mean-field gap {:.4}",
                cmp.window_end, cmp.pair_discrepancy, cmp.meanfield_discrepancy
            );
        }
        "2" => {
            let ks: Vec<f64> = list("k-list", &a.k_list)?;
            if !(0.0..=1.0).contains(&a.pa0) {
                return Err(Failure::Usage("--pa0 must lie in [0, 1]".into()));
            }
            let start = NodeFractions::new(a.pa0, 1.0 - a.pa0, 0.0);
            let trajs = ks
                .iter()
                .map(|&k| Ok((k, symmetric_trajectories(k, &start, 100.0, 0.1)?.0)))
                .collect::<Result<Vec<_>, Failure>>()?;
            output::write_phase(create(&path)?, &trajs)?;
            params.extend(params!("k_list" => ks, "pa0" => a.pa0));
            for (k, t) in &trajs {
                println!("k {k}  peak p_AB {:.4}", ng_core::analysis::peak_pab(t));
            }
        }
        "3" => {
            let ns: Vec<usize> = list("n-list", &a.n_list)?;
            let (k, runs) = (a.k.unwrap_or(5.0), a.runs.unwrap_or(50));
            let rows = consensus_time_table(k, &ns, runs, a.seed, a.eta)?;
            output::write_times(create(&path)?, &rows)?;
            params.extend(params!("n_list" => ns, "k" => k, "runs" => runs));
            for r in &rows {
                println!(
                    "n {}  T_mc {}  rel std {}  T_pair {}  T_mf {}",
                    r.n,
                    show(r.t_mc_mean),
                    show(r.t_mc_rel_std),
                    show(r.t_pair),
                    show(r.t_meanfield)
                );
            }
        }
        _ => {
            let (n, k, runs) = (a.n.unwrap_or(1000), a.k.unwrap_or(10.0), a.runs.unwrap_or(100));
            let grid: Vec<f64> = match &a.p_list {
                Some(s) => list("p-list", s)?,
                None => {
                    let pc = find_tipping(k, &TippingConfig::default())?.p_c;
                    println!("ODE tipping point {pc:.5}");
                    [-0.04, -0.02, -0.01, -0.005, 0.005, 0.01, 0.02, 0.04]
                        .iter()
                        .map(|d| pc + d)
                        .filter(|&p| p > 0.0 && p <= 0.2)
                        .collect()
                }
            };
            let sim = SimConfig {
                n,
                k_avg: k,
                eta: a.eta,
                runs,
                seed: a.seed,
                max_time_per_node: a.t_cap,
                ..SimConfig::default()
            };
            let rows = consensus_time_curve(k, &grid, &sim, &OdeConfig::default())?;
            output::write_curve(create(&path)?, &rows)?;
            params.extend(params!("n" => n, "k" => k, "runs" => runs, "p_grid" => grid, "t_cap" => a.t_cap));
            for r in &rows {
                println!(
                    "p {:.4}  T_mc {}  censored {:.2}  T_ode {}",
                    r.p,
                    show(r.t_mc_mean),
                    r.censored_fraction,
                    show(r.t_ode)
                );
            }
        }
    }
    write_manifests(args, params, &[path])
}

pub fn replay(a: ReplayArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&a.manifest)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", a.manifest.display())))?;
    let m = Manifest::parse(&text)?;
    if m.command == "replay" {
        return Err(Failure::Usage("a manifest cannot replay another replay".into()));
    }
    execute(m.args)
}
