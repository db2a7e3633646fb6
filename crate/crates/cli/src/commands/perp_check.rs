use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;
use gravre_core::perp_bisector::{cone_check, DiscretizedBody, Dumbbell, PointMass};

use super::{validate, Ctx};
use crate::out::{out_path, write_json};

#[derive(Parser, Debug)]
pub struct Args {
    /// JSON file with the surrounding point masses: [{"x":..,"y":..,"m":..}, ...].
    #[arg(long)]
    pub bodies: PathBuf,
    /// Dumbbell mass positions.
    #[arg(long, value_parser = parse_point, value_name = "X,Y", allow_hyphen_values = true)]
    pub r1: (f64, f64),
    #[arg(long, value_parser = parse_point, value_name = "X,Y", allow_hyphen_values = true)]
    pub r2: (f64, f64),
    /// Dumbbell mass ratio of the first mass (second is 1 - x1).
    #[arg(long, default_value_t = 0.5)]
    pub x1: f64,
    /// Dumbbell body mass.
    #[arg(long, default_value_t = 0.5)]
    pub m1: f64,
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected X,Y".into());
    }
    let x = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let y = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((x, y))
}

pub fn run(ctx: &Ctx, args: Args) -> anyhow::Result<()> {
    validate(args.x1 > 0.0 && args.x1 < 1.0, "x1 must lie in (0, 1)")?;
    validate(args.m1 > 0.0, "m1 must be positive")?;
    let text = std::fs::read_to_string(&args.bodies)
        .with_context(|| format!("reading {}", args.bodies.display()))?;
    let points: Vec<PointMass> = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.bodies.display()))?;
    let body = DiscretizedBody::new("bodies", points)?;
    let dumbbell = Dumbbell {
        r1: [args.r1.0, args.r1.1],
        r2: [args.r2.0, args.r2.1],
        x1: args.x1,
        x2: 1.0 - args.x1,
        m1: args.m1,
    };
    let report = cone_check(&dumbbell, &[body])?;

    let mut meta = ctx.meta();
    meta["dumbbell"] = serde_json::to_value(dumbbell)?;
    meta["report"] = serde_json::to_value(report)?;
    if ctx.formats.json {
        write_json(&out_path(&ctx.out_dir, "perp_check.json"), &meta)?;
    }
    println!(
        "perp-check: {:?} (theta_ddot = {:+.6e}, cones: 13 {}, 24 {})",
        report.verdict,
        report.theta_ddot,
        if report.cone13_occupied {
            "occupied"
        } else {
            "empty"
        },
        if report.cone24_occupied {
            "occupied"
        } else {
            "empty"
        },
    );
    Ok(())
}
