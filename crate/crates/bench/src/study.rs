//! Study orchestration: one job per (method, degree, mesh[, slenderness]),
//! run on the rayon pool and merged in deterministic order.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use bezier_bbar::beam::{beam_errors, elements_for_total_dofs, solve_beam, BeamDiscretization, BeamProblem};
use bezier_bbar::elasticity2d::{
    corner_displacement, infsup_constant, nodal_sigma_xx_error, plate_errors, solve_elasticity, ElasticDiscretization,
    ElasticProblem, InfSupPair, Material, COOK_POISSON, COOK_YOUNG, PLATE, PLATE_POISSON, PLATE_YOUNG,
};
use bezier_bbar::geometry::Interval;
use bezier_bbar::numerics::linalg::PATTERN_REL_TOL;
use bezier_bbar::projection::{bezier_project, demo_curve, eval_field, global_l2_project, l2_error};
use bezier_bbar::rates::{fit_rate, fit_slope, RATE_POINTS};
use bezier_bbar::splines::SplineSpace;
use bezier_bbar::Formulation;
use rayon::prelude::*;

use crate::config::{BeamSection, ElasticityProblemKind, ProjectionTarget, StudyConfig, StudyKind};
use crate::BenchError;

/// How a value column is turned into a rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateKind {
    None,
    /// Finest three meshes.
    Asymptotic,
    /// All meshes.
    Slope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: &'static str,
    pub rate: RateKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub method: String,
    pub degree: usize,
    pub mesh: usize,
    pub slenderness: Option<f64>,
    pub dofs: usize,
    /// Aligned with [`StudyResult::columns`]; empty when the job failed.
    pub values: Vec<f64>,
    /// Filled on the finest row of each group with at least three meshes.
    pub rates: Vec<Option<f64>>,
    /// Coupling width of basis functions, and of the interleaved dofs.
    pub bandwidth: Option<usize>,
    pub bandwidth_dofs: Option<usize>,
    pub nnz: Option<usize>,
    /// `ok` or the error message.
    pub status: String,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub kind: StudyKind,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
}

impl StudyResult {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status != "ok").count()
    }

    fn has_slenderness(&self) -> bool {
        self.rows.iter().any(|r| r.slenderness.is_some())
    }

    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = vec!["method".into(), "p".into(), "n_elem".into()];
        if self.has_slenderness() {
            h.push("slenderness".into());
        }
        h.push("dofs".into());
        h.extend(self.columns.iter().map(|c| c.name.to_string()));
        h.extend(
            self.columns
                .iter()
                .filter(|c| c.rate != RateKind::None)
                .map(|c| format!("rate_{}", c.name)),
        );
        h.extend(["bandwidth_sym_measure", "bandwidth_dofs", "nnz", "status", "wall_time_s"].map(String::from));
        h
    }

    pub fn records(&self) -> Vec<Vec<String>> {
        let f = |v: f64| format!("{v:.16e}");
        let opt = |v: Option<String>| v.unwrap_or_default();
        self.rows
            .iter()
            .map(|r| {
                let mut rec = vec![r.method.clone(), r.degree.to_string(), r.mesh.to_string()];
                if self.has_slenderness() {
                    rec.push(opt(r.slenderness.map(f)));
                }
                rec.push(r.dofs.to_string());
                for k in 0..self.columns.len() {
                    rec.push(opt(r.values.get(k).copied().map(f)));
                }
                for (k, c) in self.columns.iter().enumerate() {
                    if c.rate != RateKind::None {
                        rec.push(opt(r.rates.get(k).copied().flatten().map(f)));
                    }
                }
                rec.push(opt(r.bandwidth.map(|b| b.to_string())));
                rec.push(opt(r.bandwidth_dofs.map(|b| b.to_string())));
                rec.push(opt(r.nnz.map(|b| b.to_string())));
                rec.push(r.status.clone());
                rec.push(format!("{:.6}", r.wall_time));
                rec
            })
            .collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        let io = |e: csv::Error| BenchError::Io(e.to_string());
        w.write_record(self.header()).map_err(io)?;
        for rec in self.records() {
            w.write_record(rec).map_err(io)?;
        }
        w.flush().map_err(|e| BenchError::Io(e.to_string()))
    }
}

#[derive(Debug, Clone)]
struct Job {
    method: String,
    degree: usize,
    mesh: usize,
    slenderness: Option<f64>,
}

#[derive(Default)]
struct Output {
    dofs: usize,
    values: Vec<f64>,
    bandwidth: Option<usize>,
    bandwidth_dofs: Option<usize>,
    nnz: Option<usize>,
}

fn columns(cfg: &StudyConfig) -> Vec<Column> {
    let c = |name, rate| Column { name, rate };
    match cfg.study {
        StudyKind::Project => match cfg.projection.clone().unwrap_or_default().target {
            ProjectionTarget::DemoCurve => vec![c("err_x", RateKind::Asymptotic), c("err_y", RateKind::Asymptotic)],
            ProjectionTarget::Sine => vec![c("err", RateKind::Asymptotic)],
        },
        StudyKind::BeamStudy => ["err_w", "err_phi", "err_M", "err_Q"]
            .into_iter()
            .map(|n| c(n, RateKind::Asymptotic))
            .collect(),
        StudyKind::ElasticityStudy => match cfg.elasticity.as_ref().map(|e| e.problem) {
            Some(ElasticityProblemKind::Cook) => vec![c("tip_uy", RateKind::None)],
            _ => vec![
                c("err_u", RateKind::Asymptotic),
                c("err_stress", RateKind::Asymptotic),
                c("err_energy", RateKind::Asymptotic),
                c("nodal_sigma_xx_rel", RateKind::None),
            ],
        },
        StudyKind::Infsup => vec![c("beta", RateKind::Slope)],
        StudyKind::Spy => vec![],
    }
}

fn jobs(cfg: &StudyConfig) -> Result<Vec<Job>, BenchError> {
    let beam = cfg.beam.clone().unwrap_or_default();
    let slender: Vec<Option<f64>> = match cfg.study {
        StudyKind::BeamStudy => beam.slenderness.iter().map(|s| Some(*s)).collect(),
        _ => vec![None],
    };
    let mut out = Vec::new();
    for method in cfg.method_labels() {
        for &degree in &cfg.degrees {
            // A dof budget is read both as a total over (w, φ) and per field.
            let meshes = match beam.total_dofs {
                Some(total) if cfg.study == StudyKind::BeamStudy => [total, 2 * total]
                    .into_iter()
                    .map(|d| {
                        elements_for_total_dofs(degree, d)
                            .ok_or_else(|| BenchError::Config(format!("{d} dofs cannot be split at degree {degree}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                _ => cfg.meshes.clone(),
            };
            for s in &slender {
                for &mesh in &meshes {
                    out.push(Job {
                        method: method.clone(),
                        degree,
                        mesh,
                        slenderness: *s,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn formulation(label: &str) -> Formulation {
    Formulation::from_label(label).expect("validated label")
}

fn run_job(cfg: &StudyConfig, job: &Job, out_dir: &Path) -> Result<Output, String> {
    let s = |e: bezier_bbar::Error| e.to_string();
    let (p, n) = (job.degree, job.mesh);
    match cfg.study {
        StudyKind::Project => {
            let target = cfg.projection.clone().unwrap_or_default().target;
            let space = SplineSpace::uniform(p, n).map_err(|e| e.to_string())?;
            let (geo, fs): (Interval, Vec<Box<dyn Fn(f64) -> f64>>) = match target {
                ProjectionTarget::DemoCurve => (
                    Interval::new(0.0, 3.0).map_err(|e| e.to_string())?,
                    vec![Box::new(|t| demo_curve(t)[0]), Box::new(|t| demo_curve(t)[1])],
                ),
                ProjectionTarget::Sine => (Interval::unit(), vec![Box::new(|x: f64| (PI * x).sin())]),
            };
            let (mut values, mut coeffs) = (Vec::new(), Vec::new());
            for f in &fs {
                let c = match job.method.as_str() {
                    "bezier" => bezier_project(f, &space, &geo),
                    _ => global_l2_project(f, &space, &geo),
                }
                .map_err(s)?;
                values.push(l2_error(f, &space, &geo, &c).map_err(s)?);
                coeffs.push(c);
            }
            if target == ProjectionTarget::DemoCurve {
                write_curve_samples(&out_dir.join(format!("samples_{}_p{p}_n{n}.csv", job.method)), &space, &geo, &coeffs)?;
            }
            Ok(Output {
                dofs: space.n_basis(),
                values,
                ..Default::default()
            })
        }
        StudyKind::BeamStudy | StudyKind::Spy => {
            let problem = BeamProblem::with_slenderness(job.slenderness.unwrap_or(BeamSection::default().slenderness[0]));
            let disc = BeamDiscretization::uniform(p, n, problem.length).map_err(s)?;
            let sol = solve_beam(&problem, &disc, formulation(&job.method)).map_err(s)?;
            let bw = sol.bandwidth_functions();
            let values = if cfg.study == StudyKind::BeamStudy {
                let e = beam_errors(&problem, &disc, &sol).map_err(s)?;
                vec![e.w, e.phi, e.moment, e.shear]
            } else {
                let name = format!("spy_{}_p{p}_n{n}.txt", job.method);
                let lines = sol.stiffness.pattern_lines(PATTERN_REL_TOL);
                std::fs::write(out_dir.join(name), lines.join("\n") + "\n").map_err(|e| e.to_string())?;
                vec![]
            };
            Ok(Output {
                dofs: disc.n_dofs(),
                values,
                bandwidth: Some(bw.bandwidth),
                bandwidth_dofs: Some(sol.bandwidth_dofs().bandwidth),
                nnz: Some(bw.nnz),
            })
        }
        StudyKind::ElasticityStudy => {
            let sec = cfg.elasticity.as_ref().expect("validated section");
            let (young, nu) = match sec.problem {
                ElasticityProblemKind::Cook => (COOK_YOUNG, COOK_POISSON),
                ElasticityProblemKind::Plate => (PLATE_YOUNG, PLATE_POISSON),
            };
            let mat = Material::new(sec.young.unwrap_or(young), sec.poisson.unwrap_or(nu)).map_err(s)?;
            let problem = match sec.problem {
                ElasticityProblemKind::Cook => ElasticProblem::cook(p, n, mat),
                ElasticityProblemKind::Plate => ElasticProblem::plate_with_hole(p, n, mat, PLATE),
            }
            .map_err(s)?;
            let disc = ElasticDiscretization::new(&problem.geometry, sec.pressure.into()).map_err(s)?;
            let sol = solve_elasticity(&problem, &disc, formulation(&job.method)).map_err(s)?;
            let values = match sec.problem {
                ElasticityProblemKind::Cook => vec![corner_displacement(&disc, &sol)],
                ElasticityProblemKind::Plate => {
                    let e = plate_errors(&problem, &PLATE, &disc, &sol).map_err(s)?;
                    let (nodal, peak) = nodal_sigma_xx_error(&problem, &PLATE, &disc, &sol).map_err(s)?;
                    vec![e.displacement, e.stress, e.energy, nodal / peak]
                }
            };
            Ok(Output {
                dofs: disc.n_dofs(),
                values,
                ..Default::default()
            })
        }
        StudyKind::Infsup => {
            let pair = InfSupPair::ALL
                .into_iter()
                .find(|q| q.label() == job.method)
                .expect("validated label");
            let beta = infsup_constant(p, n, pair).map_err(s)?;
            Ok(Output {
                dofs: 2 * (n + p) * (n + p),
                values: vec![beta],
                ..Default::default()
            })
        }
    }
}

/// Run every job of the study and attach fitted rates.
pub fn run_study(cfg: &StudyConfig, out_dir: &Path) -> Result<StudyResult, BenchError> {
    let columns = columns(cfg);
    let rows: Vec<Row> = jobs(cfg)?
        .par_iter()
        .map(|job| {
            let t0 = Instant::now();
            let res = run_job(cfg, job, out_dir);
            let wall_time = t0.elapsed().as_secs_f64();
            let (o, status) = match res {
                Ok(o) => (o, "ok".to_string()),
                Err(e) => (Output::default(), e),
            };
            Row {
                method: job.method.clone(),
                degree: job.degree,
                mesh: job.mesh,
                slenderness: job.slenderness,
                dofs: o.dofs,
                values: o.values,
                rates: vec![],
                bandwidth: o.bandwidth,
                bandwidth_dofs: o.bandwidth_dofs,
                nnz: o.nnz,
                status,
                wall_time,
            }
        })
        .collect();
    let mut result = StudyResult {
        kind: cfg.study,
        columns,
        rows,
    };
    attach_rates(&mut result);
    Ok(result)
}

fn attach_rates(result: &mut StudyResult) {
    let n_cols = result.columns.len();
    for r in result.rows.iter_mut() {
        r.rates = vec![None; n_cols];
    }
    let mut start = 0;
    while start < result.rows.len() {
        let key = |r: &Row| (r.method.clone(), r.degree, r.slenderness.map(f64::to_bits));
        let k0 = key(&result.rows[start]);
        let mut end = start;
        while end < result.rows.len() && key(&result.rows[end]) == k0 {
            end += 1;
        }
        let group = &result.rows[start..end];
        let ok: Vec<&Row> = group.iter().filter(|r| r.status == "ok").collect();
        if ok.len() >= RATE_POINTS {
            let finest = start
                + group
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| r.status == "ok")
                    .max_by_key(|(_, r)| r.mesh)
                    .map(|(i, _)| i)
                    .unwrap_or(0);
            let h: Vec<f64> = ok.iter().map(|r| 1.0 / r.mesh as f64).collect();
            let rates: Vec<Option<f64>> = result
                .columns
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let v: Vec<f64> = ok.iter().map(|r| r.values[k]).collect();
                    match c.rate {
                        RateKind::None => None,
                        RateKind::Asymptotic => fit_rate(&h, &v).ok(),
                        RateKind::Slope => fit_slope(&h, &v).ok(),
                    }
                })
                .collect();
            result.rows[finest].rates = rates;
        }
        start = end;
    }
}

/// Target and projected demo curve at uniformly spaced parameters.
fn write_curve_samples(path: &Path, space: &SplineSpace, geo: &Interval, coeffs: &[Vec<f64>]) -> Result<(), String> {
    const SAMPLES: usize = 201;
    let mut w = csv::Writer::from_path(path).map_err(|e| e.to_string())?;
    w.write_record(["t", "x", "y", "x_h", "y_h"]).map_err(|e| e.to_string())?;
    for k in 0..SAMPLES {
        let xi = k as f64 / (SAMPLES - 1) as f64;
        let t = geo.map(xi);
        let [x, y] = demo_curve(t);
        let xh = eval_field(space, &coeffs[0], xi).map_err(|e| e.to_string())?;
        let yh = eval_field(space, &coeffs[1], xi).map_err(|e| e.to_string())?;
        w.write_record([t, x, y, xh, yh].map(|v| format!("{v:.16e}"))).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}
