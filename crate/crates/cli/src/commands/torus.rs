use clap::Parser;
use gravre_core::finder::{find_re_torus, TorusSearch};
use gravre_core::linalg::sym_eigen2;
use gravre_core::model::Db2Params;

use super::{validate, Ctx};
use crate::out::{num, out_path, write_csv, write_json, SvgPlot};

#[derive(Parser, Debug)]
pub struct Args {
    #[arg(long)]
    pub m1: f64,
    #[arg(long)]
    pub ell1: f64,
    /// Separation of the centers of mass.
    #[arg(long)]
    pub r: f64,
    /// Scan grid nodes per torus direction.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Resolution of the plotted residual zero-sets and hatching.
    #[arg(long, default_value_t = 160)]
    pub plot_grid: usize,
}

pub fn run(ctx: &Ctx, args: Args) -> anyhow::Result<()> {
    validate(args.r > 0.0, "r must be positive")?;
    let p: Db2Params = Db2Params::equal_mass(args.m1, args.ell1)?;
    let search = TorusSearch {
        grid: args.grid,
        ..Default::default()
    };
    let roots = find_re_torus(&p, args.r, &search)?;

    // 2D angular classification at each root: trace/determinant of the
    // angular sub-Hessian (positive determinant and trace = 2D minimum).
    let mut solutions = Vec::new();
    for &(t1, t2) in &roots {
        let l2 = p.g_l2(args.r, t1, t2)?;
        let h = p.angular_hessian_closed(args.r, t1, t2)?;
        let trace = h[0][0] + h[1][1];
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let (vals, _) = sym_eigen2(&[[h[0][0], h[0][1]], [h[1][0], h[1][1]]]);
        solutions.push(serde_json::json!({
            "theta1": t1,
            "theta2": t2,
            "l2": l2,
            "angular_trace": trace,
            "angular_det": det,
            "angular_eigenvalues": vals,
            "is_2d_minimum": det > 0.0 && trace > 0.0,
        }));
    }

    if ctx.formats.json {
        let mut meta = ctx.meta();
        meta["params"] = serde_json::json!({ "M1": args.m1, "ell1": args.ell1, "r": args.r });
        meta["grid"] = serde_json::json!(args.grid);
        meta["solutions"] = serde_json::Value::Array(solutions);
        write_json(&out_path(&ctx.out_dir, "torus.json"), &meta)?;
    }

    // Residual and sub-Hessian fields at plotting resolution: the sidecar
    // data for the figure.
    let n = args.plot_grid.max(16);
    let tau = std::f64::consts::TAU;
    let mut field = vec![[f64::NAN; 4]; n * n]; // f, g, trace, det
    for i in 0..n {
        for j in 0..n {
            let t1 = tau * i as f64 / n as f64;
            let t2 = tau * j as f64 / n as f64;
            if let Ok([f, g]) = p.angular_residuals_reduced(args.r, t1, t2) {
                let h = p.angular_hessian_closed(args.r, t1, t2).unwrap();
                field[i * n + j] = [
                    f,
                    g,
                    h[0][0] + h[1][1],
                    h[0][0] * h[1][1] - h[0][1] * h[1][0],
                ];
            }
        }
    }
    if ctx.formats.csv {
        write_csv(
            &out_path(&ctx.out_dir, "torus_grid.csv"),
            &[
                "theta1",
                "theta2",
                "res1",
                "res2",
                "angular_trace",
                "angular_det",
            ],
            (0..n * n).map(|idx| {
                let i = idx / n;
                let j = idx % n;
                let v = field[idx];
                vec![
                    num(tau * i as f64 / n as f64),
                    num(tau * j as f64 / n as f64),
                    num(v[0]),
                    num(v[1]),
                    num(v[2]),
                    num(v[3]),
                ]
            }),
        )?;
    }
    if ctx.formats.svg {
        let mut plot = SvgPlot::new(
            &format!("torus RE at r = {}", args.r),
            (0.0, tau),
            (0.0, tau),
        );
        // Hatching: rising ticks where the angular trace is positive,
        // falling ticks where the determinant is positive; crosshatched
        // cells mark 2D minima.
        let step = (n / 40).max(1);
        for i in (0..n).step_by(step) {
            for j in (0..n).step_by(step) {
                let v = field[i * n + j];
                if v[2].is_nan() {
                    continue;
                }
                let t1 = tau * i as f64 / n as f64;
                let t2 = tau * j as f64 / n as f64;
                if v[2] > 0.0 {
                    plot.hatch_tick(t1, t2, true, "#7fb3d5");
                }
                if v[3] > 0.0 {
                    plot.hatch_tick(t1, t2, false, "#f0b27a");
                }
            }
        }
        // Zero-set contours by marching squares on both residual surfaces.
        for (k, color) in [(0usize, "#1f77b4"), (1usize, "#d62728")] {
            let segments = marching_squares(&field, n, tau, k);
            for seg in segments {
                plot.polyline(&[seg.0, seg.1], color, 1.0, false);
            }
        }
        for sol in &roots {
            plot.point(sol.0, sol.1, "#111111", 4.0);
        }
        plot.save(&out_path(&ctx.out_dir, "torus.svg"), "theta1", "theta2")?;
    }
    println!("torus: {} RE at r = {}", roots.len(), args.r);
    Ok(())
}

type Segment = ((f64, f64), (f64, f64));

/// Zero-level segments of component `k` of the field on the n x n torus
/// grid (no wrap on the plotted boundary; the figure spans one period).
fn marching_squares(field: &[[f64; 4]], n: usize, tau: f64, k: usize) -> Vec<Segment> {
    let mut out = Vec::new();
    let coord = |i: usize| tau * i as f64 / n as f64;
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let v = [
                field[i * n + j][k],
                field[(i + 1) * n + j][k],
                field[(i + 1) * n + j + 1][k],
                field[i * n + j + 1][k],
            ];
            if v.iter().any(|x| x.is_nan()) {
                continue;
            }
            let corners = [
                (coord(i), coord(j)),
                (coord(i + 1), coord(j)),
                (coord(i + 1), coord(j + 1)),
                (coord(i), coord(j + 1)),
            ];
            let mut crossings = Vec::new();
            for e in 0..4 {
                let (a, b) = (v[e], v[(e + 1) % 4]);
                if (a > 0.0) != (b > 0.0) {
                    let t = a / (a - b);
                    let (pa, pb) = (corners[e], corners[(e + 1) % 4]);
                    crossings.push((pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1)));
                }
            }
            if crossings.len() == 2 {
                out.push((crossings[0], crossings[1]));
            } else if crossings.len() == 4 {
                out.push((crossings[0], crossings[1]));
                out.push((crossings[2], crossings[3]));
            }
        }
    }
    out
}
