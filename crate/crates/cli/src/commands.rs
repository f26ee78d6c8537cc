use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;
use std::process::ExitCode;

use serde::Serialize;
use spinwright_core::bonnet::{
    analyze_umbilics, congruence_check, gauss_map_halfspace_test, holomorphicity_residual, isometry_defect,
    shape_distortion, Congruence, HalfSpace, ShapeDistortionSummary, UmbilicAnalysis,
};
use spinwright_core::dirac::{assemble_dirac, kernel_dimension, KernelReport};
use spinwright_core::integrate::{spin_transform, TransformReport};
use spinwright_core::mesh::{
    curvature::angle_defects, curvature_report, generate_test_mesh, hopf_differential, load_obj, save_obj,
    vertex_normals, CurvatureReport, MeshKind,
};
use spinwright_core::{Mesh, Options};

use crate::report::{emit, write_file, RunConfig};
use crate::{Command, Shape, SolverArgs};

pub enum Status {
    Ok,
    BadInput,
    NotImmersive,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(match s {
            Status::Ok => 0,
            Status::BadInput => 2,
            Status::NotImmersive => 3,
        })
    }
}

type Res<T> = Result<T, String>;

fn load(path: &Path) -> Res<Mesh> {
    let f = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    load_obj(BufReader::new(f)).map_err(|e| format!("{}: {e}", path.display()))
}

fn obj_bytes(m: &Mesh) -> Res<Vec<u8>> {
    let mut buf = Vec::new();
    save_obj(m, &mut buf).map_err(|e| e.to_string())?;
    Ok(buf)
}

fn solver_options(cfg: &mut RunConfig, s: &SolverArgs) -> Res<Options> {
    cfg.tolerance("tol", s.tol)?;
    if s.max_iter == 0 {
        return Err("--max-iter must be positive".into());
    }
    cfg.max_iter = Some(s.max_iter);
    cfg.seed = s.seed;
    Ok(Options {
        tol: s.tol,
        max_iter: s.max_iter,
        seed: s.seed,
    })
}

pub fn run(cmd: Command, args: Vec<String>) -> Res<Status> {
    let args: Vec<String> = args.into_iter().skip(1).collect();
    match cmd {
        Command::Generate { shape } => generate(shape, args),
        Command::Transform {
            input,
            rho,
            output,
            report,
            solver,
        } => {
            let mut cfg = RunConfig::new("transform", args);
            cfg.inputs = vec![input.clone()];
            cfg.output = output.clone();
            cfg.report = report;
            cfg.rho = Some(rho.source.clone());
            let opts = solver_options(&mut cfg, &solver)?;
            transform(&cfg, &input, &rho, output.as_deref(), &opts)
        }
        Command::Diagnose {
            input,
            report,
            umbilic_tol,
        } => {
            let mut cfg = RunConfig::new("diagnose", args);
            cfg.inputs = vec![input.clone()];
            cfg.report = report;
            cfg.tolerance("umbilic_tol", umbilic_tol)?;
            diagnose(&cfg, &input, umbilic_tol)
        }
        Command::Compare {
            first,
            second,
            report,
            iso_tol,
            allow_reflection,
        } => {
            let mut cfg = RunConfig::new("compare", args);
            cfg.inputs = vec![first.clone(), second.clone()];
            cfg.report = report;
            cfg.tolerance("iso_tol", iso_tol)?;
            compare(&cfg, &first, &second, iso_tol, allow_reflection)
        }
        Command::Kernel {
            input,
            rho,
            zero_tol,
            report,
            solver,
        } => {
            let mut cfg = RunConfig::new("kernel", args);
            cfg.inputs = vec![input.clone()];
            cfg.report = report;
            cfg.rho = Some(rho.source.clone());
            cfg.tolerance("zero_tol", zero_tol)?;
            let opts = solver_options(&mut cfg, &solver)?;
            kernel(&cfg, &input, &rho, zero_tol, &opts)
        }
    }
}

#[derive(Serialize)]
struct MeshSummary {
    vertices: usize,
    faces: usize,
    euler_characteristic: i64,
}

impl MeshSummary {
    fn of(m: &Mesh) -> Self {
        Self {
            vertices: m.num_vertices(),
            faces: m.num_faces(),
            euler_characteristic: m.euler_characteristic(),
        }
    }
}

#[derive(Serialize)]
struct GenerateResult {
    shape: MeshKind,
    mesh: MeshSummary,
}

fn generate(shape: Shape, args: Vec<String>) -> Res<Status> {
    let (kind, output) = match shape {
        Shape::Icosphere { level, output } => (MeshKind::Icosphere { level }, output),
        Shape::Ellipsoid { a, b, c, level, output } => (MeshKind::Ellipsoid { a, b, c, level }, output),
        Shape::Torus {
            major,
            minor,
            nu,
            nv,
            output,
        } => (MeshKind::Torus { major, minor, nu, nv }, output),
    };
    let m: Mesh = generate_test_mesh(kind).map_err(|e| e.to_string())?;
    let bytes = obj_bytes(&m)?;
    match &output {
        Some(p) => {
            write_file(p, &bytes)?;
            let mut cfg = RunConfig::new("generate", args);
            cfg.output = Some(p.clone());
            emit(
                &cfg,
                &GenerateResult {
                    shape: kind,
                    mesh: MeshSummary::of(&m),
                },
            )?;
        }
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| format!("stdout: {e}"))?,
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct TransformResult<'a> {
    input: MeshSummary,
    rho_l2: f64,
    report: &'a TransformReport<f64>,
    output_written: bool,
}

fn transform(
    cfg: &RunConfig,
    input: &Path,
    rho: &crate::rho::RhoSpec,
    output: Option<&Path>,
    opts: &Options,
) -> Res<Status> {
    let m = load(input)?;
    let field = rho.build(&m)?;
    let t = spin_transform(&m, &field, opts).map_err(|e| e.to_string())?;
    if let Some(p) = output {
        write_file(p, &obj_bytes(&t.mesh)?)?;
    }
    emit(
        cfg,
        &TransformResult {
            input: MeshSummary::of(&m),
            rho_l2: field.l2_norm(),
            report: &t.report,
            output_written: output.is_some(),
        },
    )?;
    if t.report.immersive {
        Ok(Status::Ok)
    } else {
        eprintln!("spinwright: warning: the spinor vanishes at some vertex; the output may not be immersed");
        Ok(Status::NotImmersive)
    }
}

#[derive(Serialize)]
struct CurvatureSummary {
    mean_h: f64,
    min_h: f64,
    max_h: f64,
    /// `Σ K A`, equal to `2πχ` by Gauss–Bonnet.
    total_gauss: f64,
    gauss_bonnet_defect: f64,
    mean_residual_rms: f64,
    gauss_residual_rms: f64,
}

#[derive(Serialize)]
struct HopfSummary {
    max_norm: f64,
    mean_norm: f64,
    holomorphicity_residual: f64,
    /// `|q|` per face.
    magnitudes: Vec<f64>,
}

#[derive(Serialize)]
struct DiagnoseResult {
    mesh: MeshSummary,
    genus: i64,
    curvature: CurvatureSummary,
    per_vertex: CurvatureReport<f64>,
    hopf: HopfSummary,
    umbilics: UmbilicAnalysis<f64>,
}

fn diagnose(cfg: &RunConfig, input: &Path, umbilic_tol: f64) -> Res<Status> {
    let m = load(input)?;
    let err = |e: spinwright_core::Error| e.to_string();
    let r = curvature_report(&m).map_err(err)?;
    let q = hopf_differential(&m).map_err(err)?;
    let umbilics = analyze_umbilics(&m, &r, &q, umbilic_tol).map_err(err)?;
    let n = r.len() as f64;
    let total_gauss: f64 = angle_defects(&m).iter().sum();
    let chi = m.euler_characteristic() as f64;
    let mags = q.magnitudes();
    let result = DiagnoseResult {
        mesh: MeshSummary::of(&m),
        genus: m.genus(),
        curvature: CurvatureSummary {
            mean_h: r.mean.iter().sum::<f64>() / n,
            min_h: r.mean.iter().copied().fold(f64::INFINITY, f64::min),
            max_h: r.mean.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            total_gauss,
            gauss_bonnet_defect: (total_gauss - 2.0 * std::f64::consts::PI * chi).abs(),
            mean_residual_rms: r.mean_residual_rms(),
            gauss_residual_rms: r.gauss_residual_rms(),
        },
        hopf: HopfSummary {
            max_norm: q.max_norm(),
            mean_norm: mags.iter().sum::<f64>() / mags.len() as f64,
            holomorphicity_residual: holomorphicity_residual(&m, &q).map_err(err)?,
            magnitudes: mags,
        },
        per_vertex: r,
        umbilics,
    };
    emit(cfg, &result)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct IsometrySummary {
    relative_defect: f64,
    worst_edge: [usize; 2],
    tolerance: f64,
    isometric: bool,
}

#[derive(Serialize)]
struct DistortionResult {
    #[serde(flatten)]
    summary: ShapeDistortionSummary<f64>,
    /// Holomorphicity residual of `D^{2,0}`; `null` when it vanishes.
    holomorphicity_residual: Option<f64>,
    /// `|D^{2,0}|` per face.
    magnitudes: Vec<f64>,
}

#[derive(Serialize)]
struct CompareResult {
    first: MeshSummary,
    second: MeshSummary,
    isometry: IsometrySummary,
    shape_distortion: Option<DistortionResult>,
    congruence: Congruence<f64>,
    halfspace: HalfSpace<f64>,
}

fn compare(cfg: &RunConfig, first: &Path, second: &Path, iso_tol: f64, allow_reflection: bool) -> Res<Status> {
    let (m1, m2) = (load(first)?, load(second)?);
    let err = |e: spinwright_core::Error| e.to_string();
    let (defect, a, b) = isometry_defect(&m1, &m2).map_err(err)?;
    let isometric = defect <= iso_tol;
    let distortion = if isometric {
        let d = shape_distortion(&m1, &m2, iso_tol).map_err(err)?;
        let residual = if d.max_norm > 0.0 {
            holomorphicity_residual(&m1, &d.field).ok().filter(|r| r.is_finite())
        } else {
            None
        };
        Some(DistortionResult {
            summary: d.summary(),
            holomorphicity_residual: residual,
            magnitudes: d.field.magnitudes(),
        })
    } else {
        None
    };
    let result = CompareResult {
        first: MeshSummary::of(&m1),
        second: MeshSummary::of(&m2),
        isometry: IsometrySummary {
            relative_defect: defect,
            worst_edge: [a, b],
            tolerance: iso_tol,
            isometric,
        },
        shape_distortion: distortion,
        congruence: congruence_check(&m1, &m2, allow_reflection).map_err(err)?,
        halfspace: gauss_map_halfspace_test(&vertex_normals(&m1), &vertex_normals(&m2)).map_err(err)?,
    };
    emit(cfg, &result)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct KernelResult {
    mesh: MeshSummary,
    kernel_count: usize,
    kernel: KernelReport<f64>,
}

fn kernel(cfg: &RunConfig, input: &Path, rho: &crate::rho::RhoSpec, zero_tol: f64, opts: &Options) -> Res<Status> {
    let m = load(input)?;
    let u = rho.build(&m)?;
    let asm = assemble_dirac(&m, &u).map_err(|e| e.to_string())?;
    let k = kernel_dimension(&asm, zero_tol, opts).map_err(|e| e.to_string())?;
    emit(
        cfg,
        &KernelResult {
            mesh: MeshSummary::of(&m),
            kernel_count: k.count,
            kernel: k,
        },
    )?;
    Ok(Status::Ok)
}
