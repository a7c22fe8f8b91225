use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use hencky::constitutive::{pk1_stress, Barrier};
use hencky::convexity::{run_suite, ScalarCurve, ScanReport, Suite};
use hencky::elastostatics::{
    build_rect_mesh, minimize, write_mesh_text, BoundaryData, SolveOptions, SolveResult,
    SolveStatus,
};
use hencky::{energy, EnergyValue, Mat2, MaterialParams};
use serde_json::json;

use crate::EXIT_USAGE;

const EXIT_VIOLATION: u8 = 1;
const EXIT_NO_DESCENT: u8 = 3;
const EXIT_MAX_ITER: u8 = 4;

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn eval(params: &MaterialParams, entries: &[f64]) -> Result<u8> {
    let [a, b, c, d] = entries[..] else {
        bail!("expected 4 matrix entries, got {}", entries.len());
    };
    if !entries.iter().all(|x| x.is_finite()) {
        bail!("matrix entries must be finite");
    }
    let f = Mat2::new(a, b, c, d);
    println!("det {}", f.det());
    match energy(params, &f) {
        EnergyValue::Finite { iso_part, vol_part } => {
            println!("value {}", iso_part + vol_part);
            println!("iso_part {iso_part}");
            println!("vol_part {vol_part}");
            let s = pk1_stress(params, &f)?;
            println!("S1 {} {} {} {}", s.0[0], s.0[1], s.0[2], s.0[3]);
        }
        EnergyValue::Infinite(barrier) => {
            println!("value +inf");
            println!(
                "reason {}",
                match barrier {
                    Barrier::NonPositiveDet => "det F <= 0",
                    Barrier::Overflow => "exponent overflow",
                }
            );
        }
    }
    Ok(0)
}

pub fn curve_y(ks: &[f64], theta_max: f64, points: usize, out: &Path) -> Result<u8> {
    let mut summary = Vec::new();
    for &k in ks {
        let curve = ScalarCurve::log_spaced(k, theta_max, points)?;
        let file = format!("y_k{k}.csv");
        write_artifact(out, &file, &curve.to_csv())?;
        let intervals = curve.nonconvex_intervals();
        match intervals.as_slice() {
            [] => println!("k={k} convex on grid ({file})"),
            _ => {
                let spans: Vec<String> = intervals
                    .iter()
                    .map(|(a, b)| format!("[{a:.4}, {b:.4}]"))
                    .collect();
                println!(
                    "k={k} negative second difference on θ ∈ {} ({file})",
                    spans.join(", ")
                );
            }
        }
        summary.push(json!({ "k": k, "file": file, "nonconvex_intervals": intervals }));
    }
    write_artifact(
        out,
        "curve_y_summary.json",
        &serde_json::to_string_pretty(&summary)?,
    )?;
    Ok(0)
}

pub fn certify(
    params: &MaterialParams,
    suite: Suite,
    samples: usize,
    seed: u64,
    out: &Path,
) -> Result<u8> {
    if samples == 0 {
        bail!("--samples must be at least 1");
    }
    let reports: Vec<ScanReport> = suite
        .expand()
        .into_iter()
        .flat_map(|s| run_suite(s, params, samples, seed))
        .collect();
    for r in &reports {
        println!("{}", r.summary_line());
    }
    let file = format!("certify-{suite}.json");
    write_artifact(out, &file, &serde_json::to_string_pretty(&reports)?)?;
    println!("reports written to {}", out.join(file).display());
    Ok(if reports.iter().all(ScanReport::passed) {
        0
    } else {
        EXIT_VIOLATION
    })
}

pub struct SolveArgs {
    pub cells: (usize, usize),
    pub size: (f64, f64),
    pub affine: Option<Vec<f64>>,
    pub shear: Option<f64>,
    pub perturb: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

pub fn solve(params: &MaterialParams, args: &SolveArgs, out: &Path) -> Result<u8> {
    let data = match (&args.affine, args.shear) {
        (Some(a), None) => match a[..] {
            [a11, a12, a21, a22] => BoundaryData::Affine(Mat2::new(a11, a12, a21, a22)),
            _ => bail!("--affine takes 4 entries"),
        },
        (None, Some(g)) => BoundaryData::Shear(g),
        _ => bail!("give exactly one of --affine or --shear"),
    };
    let f0 = data.gradient();
    if !f0.is_finite() || !(f0.det() > 0.0) {
        eprintln!(
            "error: boundary data are inadmissible (det F0 = {})",
            f0.det()
        );
        return Ok(EXIT_USAGE);
    }
    if !(args.tol >= 0.0) || !(args.perturb >= 0.0) {
        bail!("--tol and --perturb must be nonnegative");
    }
    let mut mesh = build_rect_mesh(args.cells.0, args.cells.1, args.size.0, args.size.1)?;
    mesh.apply_dirichlet(|x| data.map(x));
    let init = mesh.affine_extension();
    if args.perturb > 0.0 && mesh.perturb_interior(args.perturb, args.seed).is_err() {
        eprintln!("error: perturbation of {} inverts an element", args.perturb);
        return Ok(EXIT_USAGE);
    }
    let opts = SolveOptions {
        tol: args.tol,
        max_iter: args.max_iter,
        ..SolveOptions::default()
    };
    let result: SolveResult = minimize(params, &mut mesh, &opts)?;
    let summary = json!({
        "mesh": format!("{}x{}", args.cells.0, args.cells.1),
        "boundary_gradient": f0,
        "init": init,
        "status": result.status,
        "initial_energy": result.initial_energy,
        "final_energy": result.final_energy,
        "iterations": result.iterations,
        "gradient_norm": result.gradient_norm,
        "min_element_det": result.min_element_det,
    });
    let text = serde_json::to_string_pretty(&summary)?;
    println!("{text}");
    write_artifact(out, "solve.json", &text)?;
    write_artifact(out, "mesh.txt", &write_mesh_text(&mesh))?;
    Ok(match result.status {
        SolveStatus::Converged => 0,
        SolveStatus::NoDescent => EXIT_NO_DESCENT,
        SolveStatus::MaxIterations => EXIT_MAX_ITER,
    })
}
