//! CSV writers. Every table has a header row; missing values are empty
//! fields and floats use the shortest round-trip representation.

use std::io::Write;

use csv::Writer;

use crate::analysis::{Comparison, CurveRow, SweepRow, TimeRow, TippingResult};
use crate::error::Result;
use crate::integrator::{Trajectory, VectorField};
use crate::sim::{MeanSample, RunRecord};

/// Column layout of every table, as shown in the command-line help.
pub const SCHEMAS: &str = "\
runs:        run,seed,reached,t_eta
trajectory:  t,p_A,p_B,p_AB,std_A,std_B,std_AB
ode:         t,<link columns>,p_A,p_B,p_AB   (mean field: t,p_A,p_B,p_AB)
sweep:       k,p,p_B_star,converged,t_end
tipping:     k,p_c,p_low,p_high,evaluations,status
curve:       p,T_mc_mean,T_mc_relstd,censored_fraction,T_ode
phase:       k,t,p_A,p_B,p_AB
compare:     t,mc_A,mc_B,mc_AB,pair_A,pair_B,pair_AB,mf_A,mf_B,mf_AB
times:       n,ln_n,k,T_mc_mean,T_mc_relstd,reached_fraction,T_pair,T_meanfield";

fn f(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(f).unwrap_or_default()
}

fn writer<W: Write>(w: W, header: &[&str]) -> Result<Writer<W>> {
    let mut out = Writer::from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

pub fn write_runs<W: Write>(w: W, runs: &[RunRecord]) -> Result<()> {
    let mut out = writer(w, &["run", "seed", "reached", "t_eta"])?;
    for r in runs {
        out.write_record([r.run.to_string(), r.seed.to_string(), r.reached.to_string(), f(r.t_eta)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_mean_trajectory<W: Write>(w: W, samples: &[MeanSample]) -> Result<()> {
    let mut out = writer(w, &["t", "p_A", "p_B", "p_AB", "std_A", "std_B", "std_AB"])?;
    for s in samples {
        let row = std::iter::once(s.t).chain(s.mean).chain(s.std).map(f);
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_ode_trajectory<W: Write, S: VectorField<f64> + ?Sized>(
    w: W,
    sys: &S,
    traj: &Trajectory<f64>,
) -> Result<()> {
    let labels = sys.labels();
    let mut header = vec!["t"];
    header.extend(labels.iter().map(String::as_str));
    header.extend(["p_A", "p_B", "p_AB"]);
    let mut out = writer(w, &header)?;
    for s in &traj.samples {
        let row = std::iter::once(s.t)
            .chain(s.x.iter().take(labels.len()).copied())
            .chain(s.p.to_array())
            .map(f);
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

/// Node-fraction trajectories for several degrees in one long table.
pub fn write_phase<W: Write>(w: W, trajs: &[(f64, Trajectory<f64>)]) -> Result<()> {
    let mut out = writer(w, &["k", "t", "p_A", "p_B", "p_AB"])?;
    for (k, traj) in trajs {
        for s in &traj.samples {
            out.write_record([*k, s.t].into_iter().chain(s.p.to_array()).map(f))?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_sweep<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut out = writer(w, &["k", "p", "p_B_star", "converged", "t_end"])?;
    for r in rows {
        out.write_record([f(r.k_avg), f(r.p), f(r.p_b_star), r.converged.to_string(), f(r.t_end)])?;
    }
    out.flush()?;
    Ok(())
}

/// Rows that failed keep their degree and carry the error in `status`.
pub fn write_tipping<W: Write>(w: W, rows: &[(f64, Result<TippingResult>)]) -> Result<()> {
    let mut out = writer(w, &["k", "p_c", "p_low", "p_high", "evaluations", "status"])?;
    for (k, r) in rows {
        match r {
            Ok(t) => out.write_record([
                f(*k),
                f(t.p_c),
                f(t.p_low),
                f(t.p_high),
                t.evaluations.to_string(),
                "ok".into(),
            ])?,
            Err(e) => out.write_record([f(*k), "".into(), "".into(), "".into(), "".into(), e.to_string()])?,
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_curve<W: Write>(w: W, rows: &[CurveRow]) -> Result<()> {
    let mut out = writer(w, &["p", "T_mc_mean", "T_mc_relstd", "censored_fraction", "T_ode"])?;
    for r in rows {
        out.write_record([
            f(r.p),
            opt(r.t_mc_mean),
            opt(r.t_mc_rel_std),
            f(r.censored_fraction),
            opt(r.t_ode),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_compare<W: Write>(w: W, cmp: &Comparison) -> Result<()> {
    let mut out = writer(
        w,
        &["t", "mc_A", "mc_B", "mc_AB", "pair_A", "pair_B", "pair_AB", "mf_A", "mf_B", "mf_AB"],
    )?;
    for r in &cmp.rows {
        let row = std::iter::once(r.t).chain(r.mc).chain(r.pair).chain(r.meanfield).map(f);
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_times<W: Write>(w: W, rows: &[TimeRow]) -> Result<()> {
    let mut out = writer(
        w,
        &["n", "ln_n", "k", "T_mc_mean", "T_mc_relstd", "reached_fraction", "T_pair", "T_meanfield"],
    )?;
    for r in rows {
        out.write_record([
            r.n.to_string(),
            f((r.n as f64).ln()),
            f(r.k_avg),
            opt(r.t_mc_mean),
            opt(r.t_mc_rel_std),
            f(r.reached_fraction),
            opt(r.t_pair),
            opt(r.t_meanfield),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_table() {
        let mut buf = Vec::new();
        let runs = [
            RunRecord { run: 0, seed: 7, reached: true, t_eta: 12.5 },
            RunRecord { run: 1, seed: 9, reached: false, t_eta: 1e4 },
        ];
        write_runs(&mut buf, &runs).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "run,seed,reached,t_eta\n0,7,true,12.5\n1,9,false,10000\n");
    }

    #[test]
    fn missing_values_are_empty() {
        let mut buf = Vec::new();
        let rows = [CurveRow { p: 0.05, t_mc_mean: None, t_mc_rel_std: None, censored_fraction: 1.0, t_ode: None }];
        write_curve(&mut buf, &rows).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("0.05,,,1,\n"));
    }
}
