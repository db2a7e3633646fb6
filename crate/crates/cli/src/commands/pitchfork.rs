use clap::{Parser, ValueEnum};
use gravre_core::finder::{polish_seed, trace_re_curve_both, TraceConfig};
use gravre_core::model::{Angles, Db2Params};
use gravre_core::pitchfork::{find_branch_point, normal_form, SymmetricFamily};

use super::{validate, Ctx};
use crate::out::{num, out_path, write_csv, write_json, SvgPlot};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    /// theta = (0, 0)
    Colinear,
    /// theta = (pi/2, 0)
    Perp1,
    /// theta = (0, pi/2)
    Perp2,
    /// theta = (pi/2, pi/2)
    Trapezoid,
}

impl Family {
    fn symmetric(self) -> SymmetricFamily {
        match self {
            Family::Colinear => SymmetricFamily::Colinear,
            Family::Perp1 => SymmetricFamily::PerpP1,
            Family::Perp2 => SymmetricFamily::PerpP2,
            Family::Trapezoid => SymmetricFamily::Trapezoid,
        }
    }
}

#[derive(Parser, Debug)]
pub struct Args {
    #[arg(long)]
    pub m1: f64,
    #[arg(long)]
    pub ell1: f64,
    #[arg(long, value_enum)]
    pub family: Family,
    /// Radial search interval for the branch point.
    #[arg(long)]
    pub r_lo: f64,
    #[arg(long)]
    pub r_hi: f64,
    /// Also trace the bifurcated branch numerically for the overlay.
    #[arg(long, default_value_t = true)]
    pub trace: bool,
}

pub fn run(ctx: &Ctx, args: Args) -> anyhow::Result<()> {
    validate(
        args.r_lo > 0.0 && args.r_hi > args.r_lo,
        "need 0 < r-lo < r-hi",
    )?;
    let p: Db2Params = Db2Params::equal_mass(args.m1, args.ell1)?;
    let family = args.family.symmetric();
    let r_star = find_branch_point(&p, family, args.r_lo, args.r_hi)?;
    let nf = normal_form(&p, family, r_star)?;

    if ctx.formats.json {
        let mut meta = ctx.meta();
        meta["normal_form"] = serde_json::to_value(nf)?;
        meta["slope"] = serde_json::json!(nf.slope());
        meta["quad"] = serde_json::json!(nf.quad());
        write_json(&out_path(&ctx.out_dir, "pitchfork.json"), &meta)?;
    }

    // Quadratic branch model sampled around the branch point.
    let du = 0.25;
    let n = 200usize;
    let model: Vec<[f64; 3]> = (0..=n)
        .map(|i| {
            let u1 = -du + 2.0 * du * i as f64 / n as f64;
            nf.curve(nf.theta_star.0 + u1 * nf.p11)
        })
        .collect();

    // Numeric branch for the overlay.
    let mut numeric: Vec<[f64; 3]> = Vec::new();
    if args.trace {
        if let Some(seed) = asymmetric_seed(&p, &nf) {
            if let Ok((branch, _, _)) = trace_re_curve_both(&p, seed, &TraceConfig::default()) {
                numeric = branch
                    .points
                    .iter()
                    .map(|pt| {
                        let Angles::Two(a, b) = pt.angles else {
                            unreachable!()
                        };
                        [a, b, pt.r]
                    })
                    .collect();
            }
        }
    }

    if ctx.formats.csv {
        write_csv(
            &out_path(&ctx.out_dir, "pitchfork_model.csv"),
            &["theta1", "theta2", "r"],
            model.iter().map(|g| vec![num(g[0]), num(g[1]), num(g[2])]),
        )?;
        if !numeric.is_empty() {
            write_csv(
                &out_path(&ctx.out_dir, "pitchfork_numeric.csv"),
                &["theta1", "theta2", "r"],
                numeric
                    .iter()
                    .map(|g| vec![num(g[0]), num(g[1]), num(g[2])]),
            )?;
        }
    }
    if ctx.formats.svg {
        // r against theta1, model and numeric overlaid.
        let th_lo = nf.theta_star.0 - du * nf.p11.abs().max(0.2);
        let th_hi = nf.theta_star.0 + du * nf.p11.abs().max(0.2);
        let r_span = (nf.quad().abs() * (du * nf.p11).powi(2)).max(1e-3);
        let mut plot = SvgPlot::new(
            &format!("pitchfork at r* = {r_star:.5}"),
            (th_lo, th_hi),
            (r_star - 1.5 * r_span, r_star + 1.5 * r_span),
        );
        let model_pts: Vec<(f64, f64)> = model.iter().map(|g| (g[0], g[2])).collect();
        plot.polyline(&model_pts, "#9ecae1", 2.0, false);
        if !numeric.is_empty() {
            let numeric_pts: Vec<(f64, f64)> = numeric.iter().map(|g| (g[0], g[2])).collect();
            plot.polyline(&numeric_pts, "#08519c", 1.5, false);
        }
        plot.point(nf.theta_star.0, r_star, "#d62728", 4.0);
        plot.save(&out_path(&ctx.out_dir, "pitchfork.svg"), "theta1", "r")?;
    }
    println!(
        "pitchfork: r* = {r_star:.6}, mu = {:.6}, k = {:.6}, l = {:.6}, slope = {:.6}, quad = {:.6}",
        nf.mu,
        nf.k,
        nf.l,
        nf.slope(),
        nf.quad()
    );
    Ok(())
}

/// A polished asymmetric seed near the branch point, stepping outward until
/// the polish stops falling back onto the symmetric family.
fn asymmetric_seed(
    p: &Db2Params,
    nf: &gravre_core::pitchfork::PitchforkNormalForm,
) -> Option<(f64, f64, f64)> {
    let pi = std::f64::consts::PI;
    let half_pi = std::f64::consts::FRAC_PI_2;
    for u in [0.05f64, 0.1, 0.15, 0.2] {
        for sign in [1.0, -1.0] {
            let g = nf.curve(nf.theta_star.0 + sign * u * nf.p11);
            let Ok((t1, t2)) = polish_seed(p, g[2], g[0], g[1]) else {
                continue;
            };
            let fold = |t: f64| t.rem_euclid(pi);
            let asym = [0.0, half_pi].iter().all(|&a| {
                [0.0, half_pi].iter().all(|&b| {
                    let d1 = (fold(t1) - a).abs().min(pi - (fold(t1) - a).abs());
                    let d2 = (fold(t2) - b).abs().min(pi - (fold(t2) - b).abs());
                    (d1 * d1 + d2 * d2).sqrt() > 1e-3
                })
            });
            if asym {
                return Some((g[2], t1, t2));
            }
        }
    }
    None
}
