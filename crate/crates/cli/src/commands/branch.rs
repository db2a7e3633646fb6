use clap::{Parser, ValueEnum};
use gravre_core::finder::{rhombus_radius, ReBranch};
use gravre_core::model::{Angles, Db1Params, Db2Params};

use super::{validate, Ctx};
use crate::out::{num, out_path, write_csv, write_json, SvgPlot};

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq)]
pub enum Family {
    /// Dumbbell/point mass, colinear, outside the overlap.
    Db1Colinear,
    /// Dumbbell/point mass, colinear, overlapped radii.
    Db1ColinearOverlap,
    /// Dumbbell/point mass, isosceles.
    Db1Isosceles,
    /// Two dumbbells, colinear, outside the overlap.
    Db2Colinear,
    /// Two dumbbells, perpendicular isosceles (x11 = 1/2).
    Db2PerpIsosceles,
    /// Equal-mass trapezoid.
    Db2Trapezoid,
    /// Rhombus configuration (a single RE, not a curve).
    Db2Rhombus,
}

#[derive(Parser, Debug)]
pub struct Args {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Db1 dumbbell mass ratio.
    #[arg(long)]
    pub x1: Option<f64>,
    /// Body mass M1.
    #[arg(long)]
    pub m1: Option<f64>,
    /// Db2 first-dumbbell mass ratio.
    #[arg(long)]
    pub x11: Option<f64>,
    /// Db2 second-dumbbell mass ratio.
    #[arg(long)]
    pub x21: Option<f64>,
    /// Db2 first rod length.
    #[arg(long)]
    pub ell1: Option<f64>,
    /// Sample count along the branch.
    #[arg(long, default_value_t = 4000)]
    pub samples: usize,
    /// Plot the horizontal axis as z with R = z/(2-z).
    #[arg(long)]
    pub compactify: bool,
}

fn need(v: Option<f64>, name: &str) -> anyhow::Result<f64> {
    v.ok_or_else(|| super::ValidationError(format!("missing required --{name}")).into())
}

pub fn run(ctx: &Ctx, args: Args) -> anyhow::Result<()> {
    let branch = match args.family {
        Family::Db1Colinear | Family::Db1ColinearOverlap | Family::Db1Isosceles => {
            let p: Db1Params = Db1Params::new(need(args.x1, "x1")?, need(args.m1, "m1")?)?;
            match args.family {
                Family::Db1Colinear => ReBranch::db1_colinear_non_overlap(&p, args.samples)?,
                Family::Db1ColinearOverlap => ReBranch::db1_colinear_overlap(&p, args.samples)?,
                _ => ReBranch::db1_isosceles(&p, args.samples)?,
            }
        }
        Family::Db2Colinear | Family::Db2PerpIsosceles => {
            let p: Db2Params = Db2Params::new(
                need(args.x11, "x11")?,
                need(args.x21, "x21")?,
                need(args.m1, "m1")?,
                need(args.ell1, "ell1")?,
            )?;
            match args.family {
                Family::Db2Colinear => ReBranch::db2_colinear(&p, args.samples)?,
                _ => ReBranch::db2_perp_isosceles(&p, args.samples)?,
            }
        }
        Family::Db2Trapezoid => {
            let p: Db2Params =
                Db2Params::equal_mass(need(args.m1, "m1")?, need(args.ell1, "ell1")?)?;
            ReBranch::db2_trapezoid(&p, args.samples)?
        }
        Family::Db2Rhombus => {
            return run_rhombus(ctx, &args);
        }
    };

    let extrema = branch.l2_extrema();
    if ctx.formats.json {
        let mut meta = ctx.meta();
        meta["family"] = serde_json::to_value(branch.family)?;
        meta["parameterization"] = serde_json::to_value(branch.parameterization)?;
        meta["extrema"] = serde_json::json!(extrema
            .iter()
            .map(|(param, r, l2)| serde_json::json!({
                "param": param, "r": r, "l2": l2, "l": l2.max(0.0).sqrt(),
            }))
            .collect::<Vec<_>>());
        meta["segments"] = serde_json::to_value(&branch.segments)?;
        write_json(&out_path(&ctx.out_dir, "branch.json"), &meta)?;
    }
    if ctx.formats.csv {
        write_csv(
            &out_path(&ctx.out_dir, "branch.csv"),
            &["param", "z", "r", "theta1", "theta2", "l2"],
            branch.points.iter().map(|pt| {
                let (t1, t2) = match pt.angles {
                    Angles::One(t) => (t, f64::NAN),
                    Angles::Two(a, b) => (a, b),
                    Angles::None => (f64::NAN, f64::NAN),
                };
                let z = 2.0 * pt.param / (1.0 + pt.param);
                vec![
                    num(pt.param),
                    num(z),
                    num(pt.r),
                    num(t1),
                    num(t2),
                    num(pt.l2),
                ]
            }),
        )?;
    }
    if ctx.formats.svg {
        let xs: Vec<f64> = branch
            .points
            .iter()
            .map(|pt| {
                if args.compactify {
                    2.0 * pt.param / (1.0 + pt.param)
                } else {
                    pt.r
                }
            })
            .collect();
        let finite_l2: Vec<f64> = branch
            .points
            .iter()
            .map(|pt| pt.l2)
            .filter(|v| v.is_finite())
            .collect();
        let l2_lo = finite_l2.iter().cloned().fold(f64::INFINITY, f64::min);
        let l2_hi = finite_l2
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
            .min(l2_lo.abs().max(1.0) * 50.0); // keep the collision blowup off-scale
        let x_lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let x_hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut plot = SvgPlot::new(
            &format!("{:?} L^2 profile", branch.family),
            (x_lo, x_hi),
            (l2_lo.min(0.0), l2_hi),
        );
        let pts: Vec<(f64, f64)> = xs
            .iter()
            .zip(branch.points.iter())
            .map(|(&x, pt)| (x, pt.l2.clamp(l2_lo.min(0.0), l2_hi)))
            .collect();
        plot.polyline(&pts, "#1f77b4", 1.5, false);
        // Collision / overlap guide lines (only meaningful on the r axis).
        if !args.compactify {
            for guide in guide_radii(&args, &branch) {
                if guide > x_lo && guide < x_hi {
                    plot.vline(guide, "#888888", true);
                }
            }
        }
        // Zero line separates physical from nonphysical angular momenta.
        plot.polyline(&[(x_lo, 0.0), (x_hi, 0.0)], "#999999", 0.8, true);
        for (param, r, l2) in &extrema {
            let x = if args.compactify {
                2.0 * param / (1.0 + param)
            } else {
                *r
            };
            plot.point(x, *l2, "#d62728", 4.0);
        }
        plot.save(
            &out_path(&ctx.out_dir, "branch.svg"),
            if args.compactify {
                "z (R = z/(2-z))"
            } else {
                "r"
            },
            "L^2",
        )?;
    }
    println!(
        "branch: {:?}, {} samples, {} extrema",
        branch.family,
        branch.points.len(),
        extrema.len()
    );
    Ok(())
}

/// Radii of collisions and overlap boundaries for the plotted family.
fn guide_radii(args: &Args, branch: &ReBranch) -> Vec<f64> {
    match args.family {
        Family::Db1Colinear | Family::Db1ColinearOverlap => {
            vec![1.0 - args.x1.unwrap_or(0.5)] // r = x2 collision
        }
        Family::Db1Isosceles => {
            let x1 = args.x1.unwrap_or(0.5);
            vec![(1.0 - 2.0 * x1).abs() / 2.0] // minimum radius
        }
        Family::Db2Colinear => {
            // All four collision radii.
            if let Ok(p) = Db2Params::new(
                args.x11.unwrap_or(0.5),
                args.x21.unwrap_or(0.5),
                args.m1.unwrap_or(0.5),
                args.ell1.unwrap_or(0.5),
            ) {
                p.colinear_singular_radii().to_vec()
            } else {
                vec![]
            }
        }
        Family::Db2PerpIsosceles => {
            // Overlap boundary r = ell2 x22.
            let ell2 = 1.0 - args.ell1.unwrap_or(0.5);
            let x22 = 1.0 - args.x21.unwrap_or(0.5);
            vec![ell2 * x22]
        }
        _ => {
            let _ = branch;
            vec![]
        }
    }
}

fn run_rhombus(ctx: &Ctx, args: &Args) -> anyhow::Result<()> {
    let p: Db2Params = Db2Params::new(
        0.5,
        need(args.x21, "x21")?,
        need(args.m1, "m1")?,
        need(args.ell1, "ell1")?,
    )?;
    validate(
        args.x11.is_none() || args.x11 == Some(0.5),
        "the rhombus family requires x11 = 1/2",
    )?;
    let radius = rhombus_radius(&p)?;
    let mut meta = ctx.meta();
    meta["family"] = serde_json::json!("Db2Rhombus");
    match radius {
        Some(r) => {
            let l2 = p.g_l2(r, std::f64::consts::FRAC_PI_2, 0.0)?;
            let d = p.distances(r, std::f64::consts::FRAC_PI_2, 0.0)?;
            meta["r"] = serde_json::json!(r);
            meta["l2"] = serde_json::json!(l2);
            meta["distances"] = serde_json::json!(d);
            println!("rhombus: r = {r:.12}, L^2 = {l2:.12}");
        }
        None => {
            meta["r"] = serde_json::Value::Null;
            meta["nonphysical"] = serde_json::json!(true);
            println!("rhombus: nonphysical for these masses (x21 >= 1/2)");
        }
    }
    if ctx.formats.json {
        write_json(&out_path(&ctx.out_dir, "branch.json"), &meta)?;
    }
    Ok(())
}
