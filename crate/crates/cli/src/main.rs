mod error;
mod output;
mod scene;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use helicoid_core::analysis::{
    boundedness_probe, classify_h, classify_k, nondegenerate_by_area_density, profile_at_singularity, Curvature,
    ProbeReport, Verdict,
};
use helicoid_core::deform::{
    delta_c, focal_space_profile, gamma_lambda_c, parallel_space_profile, space_to_plane, track_focal_singularity,
    track_parallel_singularity, FocalBranch, PlaneProfile, SpaceProfile,
};
use helicoid_core::framed::BasicInvariants;
use helicoid_core::helicoid::{HelicoidalSurface, SurfaceKind};
use helicoid_core::legendre::Vertices;
use helicoid_core::numerics::{linspace, Branch, ContinuationStatus, RootConfig};
use serde_json::{json, Value};

use crate::error::{Class, CliError};
use crate::output::{num, nums, write_json, write_obj, Csv};
use crate::scene::Scene;

#[derive(Parser)]
#[command(name = "helicoid", version, about = "Helicoidal surfaces of plane frontals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Scene file (JSON).
    scene: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Grid {
    /// Seed parameter on the profile.
    #[arg(long, allow_negative_numbers = true)]
    t0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    c_max: f64,
    #[arg(long)]
    c_step: f64,
    /// Write the hypothesis report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    /// Defined at every point; shifted by cπ where x1 x2 < 0.
    Piecewise,
    /// `(sgn(x1)ρ, x3 − c atan(x2/x1))`; fails where x1 vanishes.
    Radial,
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Plus,
    Minus,
    Auto,
    Complement,
}

impl From<BranchArg> for FocalBranch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Plus => FocalBranch::Plus,
            BranchArg::Minus => FocalBranch::Minus,
            BranchArg::Auto => FocalBranch::Auto,
            BranchArg::Complement => FocalBranch::Complement,
        }
    }
}

#[derive(Subcommand)]
enum SurfaceCommand {
    /// Triangle mesh of the surface as Wavefront OBJ.
    Mesh(Io),
}

#[derive(Subcommand)]
enum Command {
    /// Curvature pair, singular points and vertices of the profile (JSON).
    CurveInfo(Io),
    #[command(subcommand)]
    Surface(SurfaceCommand),
    /// Basic invariants, framed curvature and concomitant along t (CSV).
    Invariants(Io),
    /// Profile of the parallel surface at distance λ (CSV).
    Parallel {
        #[command(flatten)]
        io: Io,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        /// Reduce to a plane profile.
        #[arg(long)]
        plane: bool,
        #[arg(long, value_enum, default_value = "piecewise")]
        form: Form,
    },
    /// Profile of a focal surface with its λ(t) (CSV).
    Focal {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "auto")]
        branch: BranchArg,
        #[arg(long)]
        plane: bool,
        #[arg(long, value_enum, default_value = "piecewise")]
        form: Form,
    },
    /// Follow a singular point of the parallel deformation in c (CSV + JSON report).
    TrackParallel {
        #[command(flatten)]
        io: Io,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[command(flatten)]
        grid: Grid,
    },
    /// Follow a singular point of the focal deformation in c (CSV + JSON report).
    TrackFocal {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        grid: Grid,
    },
    /// Table verdicts and numeric evidence for K and H at a singular point (JSON).
    Boundedness {
        #[command(flatten)]
        io: Io,
        #[arg(long, allow_negative_numbers = true)]
        t0: f64,
    },
    /// Frontal and front classification of the surface (JSON).
    Classify(Io),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            return CliError::new(Class::Usage, "usage", e.to_string().trim_end()).report();
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::CurveInfo(io) => curve_info(&io),
        Command::Surface(SurfaceCommand::Mesh(io)) => {
            let s = Scene::load(&io.scene)?;
            let mesh = s.surface()?.mesh(s.samples, s.theta.2)?;
            write_obj(io.output.as_deref(), &mesh)
        }
        Command::Invariants(io) => invariants(&io),
        Command::Parallel {
            io,
            lambda,
            plane,
            form,
        } => {
            let s = Scene::load(&io.scene)?;
            let h = s.surface()?;
            let sp = parallel_space_profile(&h, lambda);
            let pp = match (plane, form) {
                (false, _) => None,
                (true, Form::Piecewise) => Some(space_to_plane(sp.clone())),
                (true, Form::Radial) => Some(gamma_lambda_c(&h, lambda, h.slant())?),
            };
            write_profile(io.output.as_deref(), &s, &sp, pp.as_ref(), false)
        }
        Command::Focal {
            io,
            branch,
            plane,
            form,
        } => {
            let s = Scene::load(&io.scene)?;
            let h = s.surface()?;
            let branch = FocalBranch::from(branch);
            let sp = focal_space_profile(&h, branch)?;
            let pp = match (plane, form) {
                (false, _) => None,
                (true, Form::Piecewise) => Some(space_to_plane(sp.clone())),
                (true, Form::Radial) => Some(delta_c(&h, branch, h.slant())?),
            };
            write_profile(io.output.as_deref(), &s, &sp, pp.as_ref(), true)
        }
        Command::TrackParallel { io, lambda, grid } => {
            let s = Scene::load(&io.scene)?;
            let h = s.surface()?;
            let cs = c_grid(&grid, &io)?;
            let track = track_parallel_singularity(&h, lambda, grid.t0, &cs, &RootConfig::default())?;
            write_branch(io.output.as_deref(), &track.branch, &track.residuals, "Phi_residual")?;
            let hy = &track.hypotheses;
            let report = json!({
                "lambda": num(lambda),
                "t0": num(grid.t0),
                "hypotheses": {
                    "regular": hy.regular,
                    "no_vertex": hy.no_vertex,
                    "off_axis": hy.off_axis,
                    "not_umbilic": hy.not_umbilic,
                    "beta": num(hy.beta),
                    "vertex_function": num(hy.vertex_function),
                    "x": num(hy.x),
                    "x1": num(hy.x1),
                    "all_hold": hy.all_hold(),
                    "violations": hy.violations(),
                },
                "branch": branch_summary(&track.branch),
            });
            write_json(grid.report.as_deref(), &report)
        }
        Command::TrackFocal { io, grid } => {
            let s = Scene::load(&io.scene)?;
            let h = s.surface()?;
            let cs = c_grid(&grid, &io)?;
            let track = track_focal_singularity(&h, grid.t0, &cs, &RootConfig::default())?;
            write_branch(io.output.as_deref(), &track.branch, &track.residuals, "dlambda_dt")?;
            let hy = &track.hypotheses;
            let report = json!({
                "t0": num(hy.t0),
                "hypotheses": {
                    "ordinary_vertex": hy.ordinary_vertex,
                    "x": num(hy.x),
                    "xbar": num(hy.xbar),
                    "sigma": num(hy.sigma),
                    "K_F": num(hy.k_f),
                    "delta1": num(hy.delta1),
                    "delta2": num(hy.delta2),
                    "deltas_separate": hy.deltas_separate(),
                },
                "branch": branch_summary(&track.branch),
            });
            write_json(grid.report.as_deref(), &report)
        }
        Command::Boundedness { io, t0 } => boundedness(&io, t0),
        Command::Classify(io) => {
            let s = Scene::load(&io.scene)?;
            let r = s.surface()?.classify_frontal_front()?;
            let report = json!({
                "kind": match r.kind {
                    SurfaceKind::Revolution => "revolution",
                    SurfaceKind::Helicoidal => "helicoidal",
                },
                "frontal": r.is_frontal,
                "front": r.is_front,
                "witnesses": nums(&r.witnesses),
            });
            write_json(io.output.as_deref(), &report)
        }
    }
}

fn t_samples(s: &Scene) -> Vec<f64> {
    linspace(s.domain.0, s.domain.1, s.samples)
}

fn curve_info(io: &Io) -> Result<(), CliError> {
    let s = Scene::load(&io.scene)?;
    let g = s.curve()?;
    let mut samples = Vec::with_capacity(s.samples);
    for t in t_samples(&s) {
        let p = g.point(t)?;
        samples.push(json!({
            "t": num(t),
            "x": num(p.x),
            "z": num(p.z),
            "ell": num(p.ell),
            "beta": num(p.beta),
        }));
    }
    let singular = g.singular_points();
    let mut non_front = Vec::new();
    for &t in &singular {
        if !g.is_front_at(t)? {
            non_front.push(t);
        }
    }
    let vertices = match g.vertices()? {
        Vertices::DegenerateEverywhere => json!({ "degenerate_everywhere": true, "points": [] }),
        Vertices::Isolated(vs) => json!({
            "degenerate_everywhere": false,
            "points": vs.iter().map(|v| json!({ "t": num(v.t), "ordinary": v.ordinary })).collect::<Vec<_>>(),
        }),
    };
    let report = json!({
        "domain": nums(&[s.domain.0, s.domain.1]),
        "samples": samples,
        "singular_points": nums(&singular),
        "vertices": vertices,
        "frontal": true,
        "front": non_front.is_empty(),
        "non_front_points": nums(&non_front),
    });
    write_json(io.output.as_deref(), &report)
}

fn invariants(io: &Io) -> Result<(), CliError> {
    let s = Scene::load(&io.scene)?;
    let h = s.surface()?;
    let mut header = vec!["t"];
    header.extend(BasicInvariants::NAMES);
    header.extend(["JF", "KF", "HF", "I4", "I5", "I6", "I7", "I8"]);
    let mut csv = Csv::new(io.output.as_deref(), &header)?;
    for t in t_samples(&s) {
        let mut row = vec![t];
        row.extend(h.invariants_closed_form(t)?.as_array());
        row.extend(h.concomitant_closed_form(t)?);
        csv.row(&row)?;
    }
    csv.finish()
}

fn write_profile(
    out: Option<&Path>,
    s: &Scene,
    sp: &SpaceProfile,
    pp: Option<&PlaneProfile>,
    with_lambda: bool,
) -> Result<(), CliError> {
    let mut header = vec!["t"];
    if with_lambda {
        header.push("lambda");
    }
    match pp {
        None => header.extend(["x1", "x2", "x3"]),
        Some(_) => header.extend(["X", "Z", "case"]),
    }
    let mut csv = Csv::new(out, &header)?;
    for t in t_samples(s) {
        let mut row = vec![t];
        if with_lambda {
            row.push(sp.lambda(t)?);
        }
        match pp {
            None => {
                row.extend(sp.point(t)?);
                csv.row(&row)?;
            }
            Some(pp) => {
                let p = pp.point(t)?;
                row.extend([p.x, p.z]);
                csv.row_with(&row, &[p.case.name()])?;
            }
        }
    }
    csv.finish()
}

/// The slant grid; also checks that the branch and the report do not both
/// go to stdout.
fn c_grid(g: &Grid, io: &Io) -> Result<Vec<f64>, CliError> {
    let bad = |m: String| Err(CliError::new(Class::Usage, "usage", m));
    if io.output.is_none() && g.report.is_none() {
        return bad("give -o for the branch CSV or --report for the report".into());
    }
    if !(g.c_step.is_finite() && g.c_step > 0.0) {
        return bad(format!("--c-step must be positive, got {}", g.c_step));
    }
    if !(g.c_min.is_finite() && g.c_max.is_finite()) {
        return bad("--c-min and --c-max must be finite".into());
    }
    let span = g.c_max - g.c_min;
    let steps = (span.abs() / g.c_step + 1e-9).floor() as usize;
    let dir = if span < 0.0 { -1.0 } else { 1.0 };
    Ok((0..=steps).map(|k| g.c_min + dir * k as f64 * g.c_step).collect())
}

fn write_branch(out: Option<&Path>, b: &Branch, residuals: &[f64], name: &str) -> Result<(), CliError> {
    let mut csv = Csv::new(out, &["c", "t", name])?;
    for (&(c, t), &r) in b.points.iter().zip(residuals) {
        csv.row(&[c, t, r])?;
    }
    csv.finish()
}

fn branch_summary(b: &Branch) -> Value {
    let status = match b.status {
        ContinuationStatus::Complete => json!({ "complete": true }),
        ContinuationStatus::FoldDetected { c, last } => json!({
            "complete": false,
            "fold_at_c": num(c),
            "last": nums(&[last.0, last.1]),
        }),
    };
    json!({
        "points": b.points.len(),
        "seed_slope": num(b.seed_slope),
        "status": status,
    })
}

fn verdict_json(v: &Verdict, probe: &ProbeReport) -> Value {
    json!({
        "table": { "bounded": v.bounded, "row": v.row, "rule": v.rule },
        "probe": {
            "verdict": probe.verdict.name(),
            "slope": num(probe.slope),
            "samples": probe.samples.iter().map(|s| json!({
                "offset": num(s.offset),
                "left": num(s.left),
                "right": num(s.right),
            })).collect::<Vec<_>>(),
        },
        "agree": match probe.verdict.name() {
            "bounded" => Value::Bool(v.bounded),
            "unbounded" => Value::Bool(!v.bounded),
            _ => Value::Null,
        },
    })
}

fn boundedness(io: &Io, t0: f64) -> Result<(), CliError> {
    let s = Scene::load(&io.scene)?;
    let h: HelicoidalSurface = s.surface()?;
    let p = profile_at_singularity(&h, t0)?;
    let k = classify_k(&p)?;
    let hv = classify_h(&p)?;
    let report = json!({
        "t0": num(p.t0),
        "profile": {
            "m": p.m,
            "front": p.is_front,
            "x0": num(p.x0),
            "cos_phi0": num(p.cos_phi0),
            "phi_order": p.phi_order.map(|o| o.to_string()),
            "degenerate": p.degenerate,
        },
        "nondegenerate_by_area_density": nondegenerate_by_area_density(&h, t0)?,
        "K": verdict_json(&k, &boundedness_probe(&h, t0, Curvature::K)),
        "H": verdict_json(&hv, &boundedness_probe(&h, t0, Curvature::H)),
    });
    write_json(io.output.as_deref(), &report)
}
