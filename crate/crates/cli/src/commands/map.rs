use clap::{Parser, ValueEnum};
use gravre_core::stability::{
    stability_map, CellClass, EnergeticVerdict, LinearVerdict, MapFamily, MapSpec,
};

use super::{validate, Ctx};
use crate::out::{num, out_path, write_csv, write_json, SvgPlot};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    Db1Colinear,
    Db1ColinearOverlap,
    Db1Isosceles,
    Db2PerpIsosceles,
    Db2Trapezoid,
}

#[derive(Parser, Debug)]
pub struct Args {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Fixed M1 for the Db1 families.
    #[arg(long)]
    pub m1: Option<f64>,
    /// Fixed ell1 for the Db2 families.
    #[arg(long)]
    pub ell1: Option<f64>,
    /// Fixed x21 for the perpendicular isosceles family.
    #[arg(long)]
    pub x21: Option<f64>,
    /// Horizontal axis range (x1 for Db1 families, M1 for Db2 families).
    #[arg(long, default_value_t = 0.05)]
    pub x_min: f64,
    #[arg(long, default_value_t = 0.95)]
    pub x_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub r_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 60)]
    pub nx: usize,
    #[arg(long, default_value_t = 60)]
    pub ny: usize,
}

pub fn run(ctx: &Ctx, args: Args) -> anyhow::Result<()> {
    validate(args.x_min < args.x_max, "x range must be increasing")?;
    validate(
        args.r_min < args.r_max && args.r_min > 0.0,
        "r range must be positive and increasing",
    )?;
    let need = |v: Option<f64>, name: &str| -> anyhow::Result<f64> {
        v.ok_or_else(|| super::ValidationError(format!("missing required --{name}")).into())
    };
    let family = match args.family {
        Family::Db1Colinear => MapFamily::Db1ColinearNonOverlap {
            m1: need(args.m1, "m1")?,
        },
        Family::Db1ColinearOverlap => MapFamily::Db1ColinearOverlap {
            m1: need(args.m1, "m1")?,
        },
        Family::Db1Isosceles => MapFamily::Db1Isosceles {
            m1: need(args.m1, "m1")?,
        },
        Family::Db2PerpIsosceles => MapFamily::Db2PerpIsosceles {
            ell1: need(args.ell1, "ell1")?,
            x21: need(args.x21, "x21")?,
        },
        Family::Db2Trapezoid => MapFamily::Db2Trapezoid {
            ell1: need(args.ell1, "ell1")?,
        },
    };
    let spec: MapSpec = MapSpec {
        family,
        x_range: (args.x_min, args.x_max),
        r_range: (args.r_min, args.r_max),
        nx: args.nx,
        ny: args.ny,
    };
    let map = stability_map(&spec);

    let class_name = |c: &CellClass| match c {
        CellClass::Nonphysical => ("nonphysical", "none"),
        CellClass::OutOfDomain => ("out-of-domain", "none"),
        CellClass::Classified { energetic, linear } => {
            let e = match energetic {
                EnergeticVerdict::StrictMinimum => "strict-minimum",
                EnergeticVerdict::Saddle => "saddle",
                EnergeticVerdict::Maximum => "maximum",
                EnergeticVerdict::Degenerate => "degenerate",
            };
            let l = match linear {
                LinearVerdict::Stable => "stable",
                LinearVerdict::Unstable => "unstable",
                LinearVerdict::Marginal => "marginal",
            };
            (e, l)
        }
    };

    if ctx.formats.csv {
        write_csv(
            &out_path(&ctx.out_dir, "map.csv"),
            &["x", "r", "l2", "energetic", "linear"],
            map.cells.iter().map(|cell| {
                let (e, l) = class_name(&cell.class);
                vec![
                    num(cell.x),
                    num(cell.r),
                    num(cell.l2),
                    e.to_string(),
                    l.to_string(),
                ]
            }),
        )?;
    }
    if ctx.formats.json {
        let mut meta = ctx.meta();
        meta["spec"] = serde_json::to_value(map.spec)?;
        meta["overlays"] = serde_json::to_value(&map.overlays)?;
        let stable = map
            .cells
            .iter()
            .filter(|c| {
                matches!(
                    c.class,
                    CellClass::Classified {
                        linear: LinearVerdict::Stable,
                        ..
                    }
                )
            })
            .count();
        meta["stable_cells"] = serde_json::json!(stable);
        meta["total_cells"] = serde_json::json!(map.cells.len());
        write_json(&out_path(&ctx.out_dir, "map.json"), &meta)?;
    }
    if ctx.formats.svg {
        let mut plot = SvgPlot::new(
            &format!("{:?} stability map", args.family),
            (args.x_min, args.x_max),
            (args.r_min, args.r_max),
        );
        let dx = (args.x_max - args.x_min) / args.nx as f64;
        let dy = (args.r_max - args.r_min) / args.ny as f64;
        for cell in &map.cells {
            let color = match &cell.class {
                CellClass::Nonphysical => "#f2e8e8",
                CellClass::OutOfDomain => "#ffffff",
                CellClass::Classified { energetic, linear } => match (energetic, linear) {
                    (EnergeticVerdict::StrictMinimum, LinearVerdict::Stable) => "#2f7d31",
                    (_, LinearVerdict::Stable) => "#8bc34a",
                    (_, LinearVerdict::Marginal) => "#ffe082",
                    _ => "#cfd8dc",
                },
            };
            if color != "#ffffff" {
                plot.cell(cell.x, cell.r, dx, dy, color);
            }
        }
        for overlay in &map.overlays {
            let dashed = overlay.name.starts_with("dL2");
            plot.polyline(&overlay.points, "#111111", 1.2, dashed);
        }
        let x_label = match args.family {
            Family::Db2PerpIsosceles | Family::Db2Trapezoid => "M1",
            _ => "x1",
        };
        plot.save(&out_path(&ctx.out_dir, "map.svg"), x_label, "r")?;
    }
    println!(
        "map: {} x {} cells over x in [{}, {}], r in [{}, {}]",
        args.nx, args.ny, args.x_min, args.x_max, args.r_min, args.r_max
    );
    Ok(())
}
