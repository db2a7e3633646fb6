use clap::Parser;
use gravre_core::dynamics::{integrate, KeplerReduced};
use gravre_core::kepler::KeplerParams;

use super::{validate, Ctx};
use crate::out::{num, out_path, write_csv, write_json, SvgPlot};

#[derive(Parser, Debug)]
pub struct Args {
    /// Scalar angular momentum (must be positive).
    #[arg(long)]
    pub l: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Also integrate a phase-portrait trajectory from --r0.
    #[arg(long)]
    pub phase: bool,
    /// Initial radius of the phase trajectory.
    #[arg(long, default_value_t = 1.05)]
    pub r0: f64,
    /// Trajectory length in time units.
    #[arg(long, default_value_t = 40.0)]
    pub t_end: f64,
    /// Number of recorded samples along the trajectory.
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    /// Integrator relative tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

pub fn run(ctx: &Ctx, args: Args) -> anyhow::Result<()> {
    validate(args.l > 0.0, "L must be positive")?;
    validate(args.m1 > 0.0 && args.m2 > 0.0, "masses must be positive")?;
    validate(args.g > 0.0, "G must be positive")?;
    let params: KeplerParams = KeplerParams::new(args.m1, args.m2, args.g, args.l)?;
    let (r, phi_dot) = params.relative_equilibrium();
    let (v, d2) = params.amended_potential(r)?;

    if ctx.formats.json {
        let mut meta = ctx.meta();
        meta["params"] = serde_json::json!({
            "M1": args.m1, "M2": args.m2, "G": args.g, "L": args.l,
        });
        meta["r"] = serde_json::json!(r);
        meta["phidot"] = serde_json::json!(phi_dot);
        meta["orbital_speed"] = serde_json::json!(params.orbital_speed_at_re());
        meta["v"] = serde_json::json!(v);
        meta["d2v_dr2"] = serde_json::json!(d2);
        meta["stable"] = serde_json::json!(d2 > 0.0);
        write_json(&out_path(&ctx.out_dir, "kepler.json"), &meta)?;
    }

    if args.phase {
        validate(args.r0 > 0.0, "r0 must be positive")?;
        let sys = KeplerReduced { params };
        let times: Vec<f64> = (1..=args.samples)
            .map(|i| args.t_end * i as f64 / args.samples as f64)
            .collect();
        let traj = integrate(&sys, &[args.r0, 0.0, 0.0], args.t_end, args.tol, &times)?;
        if ctx.formats.csv {
            write_csv(
                &out_path(&ctx.out_dir, "kepler_phase.csv"),
                &["t", "r", "rdot", "phi", "energy"],
                traj.t
                    .iter()
                    .zip(&traj.states)
                    .zip(&traj.energy)
                    .map(|((t, s), e)| vec![num(*t), num(s[0]), num(s[1]), num(s[2]), num(*e)]),
            )?;
        }
        if ctx.formats.svg {
            let rs: Vec<f64> = traj.states.iter().map(|s| s[0]).collect();
            let vs: Vec<f64> = traj.states.iter().map(|s| s[1]).collect();
            let rmin = rs.iter().cloned().fold(f64::INFINITY, f64::min).min(r);
            let rmax = rs.iter().cloned().fold(0.0, f64::max).max(r);
            let vmax = vs
                .iter()
                .cloned()
                .fold(0.0f64, |a, b| a.max(b.abs()))
                .max(1e-6);
            let pad_r = 0.1 * (rmax - rmin).max(1e-6);
            let mut plot = SvgPlot::new(
                "Reduced phase portrait",
                (rmin - pad_r, rmax + pad_r),
                (-1.2 * vmax, 1.2 * vmax),
            );
            let pts: Vec<(f64, f64)> = rs.iter().zip(vs.iter()).map(|(&a, &b)| (a, b)).collect();
            plot.polyline(&pts, "#1f77b4", 1.5, false);
            plot.point(r, 0.0, "#d62728", 4.0);
            plot.save(&out_path(&ctx.out_dir, "kepler_phase.svg"), "r", "dr/dt")?;
        }
    }
    println!(
        "kepler: r = {r:.12}, phidot = {phi_dot:.12}, d2V/dr2 = {d2:.6} ({})",
        if d2 > 0.0 {
            "strict minimum"
        } else {
            "not a minimum"
        }
    );
    Ok(())
}
