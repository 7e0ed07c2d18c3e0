//! Subcommand implementations.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use srgeo::cost::{build_cost, ImageCoordinates, ScalarImage, VesselnessParams};
use srgeo::eikonal::{
    read_cost_grid, read_distance_grid, sidecar_path, solvers, write_cost_grid, write_distance_grid, CostField, Grid3D, MetricSpec, Preset, Problem,
};
use srgeo::geodesics::{
    cusp_time_smax, geodesic_solvers, reparametrize, sr_time_at_s, wavefront_sample, ChiParam, ClosedFormS, Momentum, Parametrization,
    WavefrontConfig,
};
use srgeo::optics::EyeModel;
use srgeo::tracking::{backtrack, backtrack_cuspless, flags};
use srgeo::{Error, Result};

use crate::cli::*;
use crate::pipelines::{compare_se2_so3, parallel_tubes_scene, riemann_compare, CompareConfig, RiemannConfig, Scene};
use crate::verify;

pub fn eye_model(e: &EyeArgs) -> Result<EyeModel> {
    let m = EyeModel { a: e.eye[0], c_eye: e.eye[1], eta: e.eye[2], psi_max: e.psi, ..EyeModel::default() };
    m.validate()?;
    Ok(m)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Add the effective configuration to the sidecar of `out`, creating it if needed.
fn echo_config(out: &Path, command: &str, args: &impl Serialize, result: Value) -> Result<()> {
    let side = sidecar_path(out);
    let mut doc = match std::fs::read_to_string(&side) {
        Ok(text) => serde_json::from_str::<Value>(&text)?,
        Err(_) => json!({}),
    };
    doc["command"] = json!(command);
    doc["config"] = serde_json::to_value(args)?;
    doc["result"] = result;
    write(&side, &serde_json::to_string_pretty(&doc)?)
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Optics(a) => optics(&a),
        Command::Geodesic(a) => geodesic(&a),
        Command::Cusp(a) => cusp(&a),
        Command::Wavefront(a) => wavefront(&a),
        Command::Fastmarch(a) => fastmarch(&a),
        Command::Track(a) => track(&a),
        Command::Cost(a) => cost(&a),
        Command::Compare(a) => compare(&a),
        Command::RiemannCompare(a) => riemann(&a),
        Command::Verify(a) => verify_cmd(&a),
    }
}

fn optics(a: &OpticsArgs) -> Result<()> {
    let eye = eye_model(&a.eye)?;
    let r = eye.report();
    let mut v = json!({
        "y_max": r.y_max,
        "J_center": eye.local_jacobian(0.0, 0.0),
        "J_corner": eye.local_jacobian(r.y_max, r.y_max),
        "J_min": r.j_min,
        "J_max": r.j_max,
        "GD_max": r.gd_max,
        "X_max": eye.x_max(),
    });
    if let Some([x, y]) = a.project {
        let (px, py) = eye.project_to_plane(x, y)?;
        v["project"] = json!({"x": x, "y": y, "X": px, "Y": py, "in_view": eye.in_view(px, py)});
    }
    if let Some([px, py]) = a.unproject {
        let (x, y) = eye.unproject_to_sphere(px, py)?;
        v["unproject"] = json!({"X": px, "Y": py, "x": x, "y": y});
    }
    print(&v);
    if let Some(out) = &a.out {
        write(out, &serde_json::to_string_pretty(&v)?)?;
        echo_config(out, "optics", a, Value::Null)?;
    }
    Ok(())
}

fn geodesic(a: &GeodesicArgs) -> Result<()> {
    if a.h2.abs() > 1.0 {
        return Err(Error::Config(format!("|h2| must not exceed 1, got {}", a.h2)));
    }
    if !(a.end >= 0.0) || a.samples == 0 {
        return Err(Error::Config("--end must be nonnegative and --samples positive".into()));
    }
    let h0 = Momentum::from_h2_h3(a.h2, a.h3, a.xi);
    let solver = geodesic_solvers().create(&a.method)?;
    let path = match a.param.as_str() {
        "t" => solver.path(h0, a.xi, a.end, a.samples)?,
        "s" if a.method == "closed-form" => ClosedFormS::new(a.h2, a.h3, a.xi)?.path(a.end, a.samples)?,
        "s" => {
            let t_end = sr_time_at_s(a.h2, a.h3, a.xi, a.end)?;
            reparametrize(&solver.path(h0, a.xi, t_end, a.samples)?, Parametrization::SphericalArclength, &|_| 1.0)?
        }
        other => return Err(Error::Config(format!("unknown parameter '{other}' (expected t or s)"))),
    };
    write(&a.out, &path.to_csv())?;
    let end = path.endpoint().map(|p| p.chart.as_array());
    echo_config(&a.out, "geodesic", a, json!({"samples": path.samples.len(), "endpoint": end}))?;
    print(&json!({"samples": path.samples.len(), "endpoint": end}));
    Ok(())
}

fn cusp(a: &CuspArgs) -> Result<()> {
    if !(a.xi > 0.0) || a.h2.abs() > 1.0 {
        return Err(Error::Config("cusp needs ξ > 0 and |h2| ≤ 1".into()));
    }
    let s_max = cusp_time_smax(a.h2, a.h3, a.xi);
    let t_max = if s_max.is_finite() { sr_time_at_s(a.h2, a.h3, a.xi, s_max).ok() } else { None };
    let kappa = a.h3 * a.h3 + (1.0 - a.h2 * a.h2) * (a.xi * a.xi - 1.0);
    let class = if ChiParam::new(a.xi).is_linear() {
        "linear"
    } else if a.xi < 1.0 {
        "elliptic"
    } else {
        "hyperbolic"
    };
    print(&json!({
        "s_max": if s_max.is_finite() { json!(s_max) } else { json!("inf") },
        "t_max": t_max,
        "kappa": kappa,
        "class": class,
    }));
    Ok(())
}

fn wavefront(a: &WavefrontArgs) -> Result<()> {
    if a.n == 0 || !(a.t >= 0.0) || !(a.xi > 0.0) {
        return Err(Error::Config("wavefront needs n > 0, T ≥ 0 and ξ > 0".into()));
    }
    let cfg = WavefrontConfig { n_beta: a.n, n_c: a.n, c_max: a.c_max };
    let pts = wavefront_sample(a.xi, a.t, &cfg);
    let mut csv = format!("# xi={} T={}\nh1,h2,h3,x,y,theta,n1,n2,n3\n", a.xi, a.t);
    for (h, p) in &pts {
        let n = p.spherical_projection();
        let c = p.chart;
        csv.push_str(&format!(
            "{:.10},{:.10},{:.10},{:.10},{:.10},{:.10},{:.10},{:.10},{:.10}\n",
            h.h1, h.h2, h.h3, c.x, c.y, c.theta, n[0], n[1], n[2]
        ));
    }
    write(&a.out, &csv)?;
    echo_config(&a.out, "wavefront", a, json!({"points": pts.len()}))?;
    print(&json!({"points": pts.len()}));
    Ok(())
}

fn fastmarch(a: &FastmarchArgs) -> Result<()> {
    let preset = Preset::parse(&a.preset)?;
    let [nx, ny, nt] = a.grid;
    let grid = match (a.window, preset) {
        (Some([hx, hy]), _) => Grid3D::window(nx, ny, nt, hx, hy)?,
        (None, Preset::So3) => Grid3D::so3_full(nx, ny, nt)?,
        (None, Preset::Se2) => return Err(Error::Config("the se2 preset needs --window".into())),
    };
    let mut spec = MetricSpec::new(preset, a.xi, a.eps);
    if a.cuspless {
        spec = spec.cuspless();
    }
    let mut problem = Problem::new(grid, spec, a.seed);
    let mut cost_name = None;
    if let Some(path) = &a.cost {
        let (p, c) = read_cost_grid(path)?;
        if p != preset {
            return Err(Error::Config(format!("cost map is for {}, not {}", p.name(), preset.name())));
        }
        problem = problem.with_cost(CostField::Grid(Arc::new(c)));
        cost_name = Some(std::fs::canonicalize(path)?.to_string_lossy().into_owned());
    }
    if let Some(r) = a.stop_radius {
        problem = problem.with_stop_radius(r);
    }
    let start = Instant::now();
    let d = solvers().create(&a.solver)?.solve(&problem)?;
    let seconds = start.elapsed().as_secs_f64();
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_distance_grid(&a.out, &d, cost_name.as_deref())?;
    let result = json!({"accepted": d.accepted(), "nodes": grid.len()});
    echo_config(&a.out, "fastmarch", a, result.clone())?;
    // Timing stays out of the sidecar so reruns write identical files.
    print(&json!({"accepted": d.accepted(), "nodes": grid.len(), "seconds": seconds}));
    Ok(())
}

fn track(a: &TrackArgs) -> Result<()> {
    let d = read_distance_grid(&a.dist)?;
    let eye = eye_model(&a.eye)?;
    let eye = (d.spec.preset == Preset::So3).then_some(&eye);
    let t = if a.cuspless { backtrack_cuspless(&d, a.end, eye)? } else { backtrack(&d, a.end, eye)? };
    write(&a.out, &t.to_csv())?;
    let cusps = t.samples.iter().filter(|s| s.flags & flags::CUSP != 0).count();
    let result = json!({"W": t.length, "samples": t.samples.len(), "rule": t.rule, "cusp_samples": cusps});
    echo_config(&a.out, "track", a, result.clone())?;
    print(&result);
    Ok(())
}

fn cost(a: &CostArgs) -> Result<()> {
    let eye = eye_model(&a.eye)?;
    let image = ScalarImage::load(&a.image)?;
    let image = match a.coords.as_str() {
        "planar" => image.fit_to_view(&eye),
        "spherical" => {
            let p = a.pixel_size.ok_or_else(|| Error::Config("--coords spherical needs --pixel-size".into()))?;
            image.with_pixel_size(p, ImageCoordinates::Spherical)
        }
        other => return Err(Error::Config(format!("unknown coordinates '{other}' (expected planar or spherical)"))),
    };
    let params = VesselnessParams { scales: a.scales.0.clone(), beta: a.beta, c: a.c };
    let map = build_cost(&image, &params, a.lambda, eye)?;
    let grid = Grid3D::window(a.grid[0], a.grid[1], 3, a.window[0], a.window[1])?;
    let c = map.to_grid(&grid)?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_cost_grid(&a.out, Preset::So3, &c, 0.0)?;
    let result = json!({"vf_max": map.vf.max(), "floor": map.floor(), "min": c.min()});
    echo_config(&a.out, "cost", a, result.clone())?;
    print(&result);
    Ok(())
}

fn compare(a: &CompareArgs) -> Result<()> {
    let cfg = CompareConfig { v0: a.v0, v1: a.v1, xi: a.xi, eps: a.eps, eye: eye_model(&a.eye)?, grid: a.grid };
    let out = compare_se2_so3(&cfg)?;
    std::fs::create_dir_all(&a.out_dir)?;
    if let (Some(se2), Some(so3)) = (&out.se2, &out.so3) {
        write(&a.out_dir.join("se2.csv"), &se2.to_csv())?;
        write(&a.out_dir.join("so3.csv"), &so3.to_csv())?;
    }
    let report = a.out_dir.join("report.json");
    let v = serde_json::to_value(&out.report)?;
    write(&report, &serde_json::to_string_pretty(&v)?)?;
    echo_config(&report, "compare", a, Value::Null)?;
    print(&v);
    Ok(())
}

fn riemann(a: &RiemannCompareArgs) -> Result<()> {
    let eye = EyeModel { a: a.eye[0], c_eye: a.eye[1], eta: a.eye[2], ..EyeModel::default() };
    eye.validate()?;
    let mut scene = match &a.image {
        Some(path) => {
            let image = ScalarImage::load(path)?.fit_to_view(&eye);
            let (v0, v1) = match (a.v0, a.v1) {
                (Some(v0), Some(v1)) => (v0, v1),
                _ => return Err(Error::Config("--image needs --v0 and --v1".into())),
            };
            Scene { image, reference: None, v0, v1 }
        }
        None => parallel_tubes_scene(&eye),
    };
    if let Some(v) = a.v0 {
        scene.v0 = v;
    }
    if let Some(v) = a.v1 {
        scene.v1 = v;
    }
    let cfg = RiemannConfig { xi: a.xi, lambda: a.lambda, eps: a.eps, eye, grid: a.grid, window: a.window };
    let out = riemann_compare(&scene, &cfg)?;
    std::fs::create_dir_all(&a.out_dir)?;
    write(&a.out_dir.join("sr.csv"), &out.sr.to_csv())?;
    write(&a.out_dir.join("riemannian.csv"), &out.riemannian.to_csv())?;
    if a.image.is_none() {
        scene.image.save_png(&a.out_dir.join("scene.png"))?;
    }
    let report = a.out_dir.join("report.json");
    let v = serde_json::to_value(&out.report)?;
    write(&report, &serde_json::to_string_pretty(&v)?)?;
    echo_config(&report, "riemann-compare", a, Value::Null)?;
    print(&v);
    Ok(())
}

fn verify_cmd(a: &VerifyArgs) -> Result<()> {
    let opts = verify::VerifyOptions {
        only: a.only.as_ref().map(|l| l.0.clone()),
        ytilde_factor: a.ytilde_factor,
        eps: a.eps,
        full: a.full,
    };
    let report = verify::run_all(&opts, |r| eprintln!("{}", r.line()));
    let v = serde_json::to_value(&report)?;
    print(&v);
    if let Some(out) = &a.out {
        write(out, &serde_json::to_string_pretty(&v)?)?;
    }
    if report.passed {
        Ok(())
    } else {
        Err(Error::Numeric(format!("{} of {} criteria failed", report.failed(), report.results.len())))
    }
}
