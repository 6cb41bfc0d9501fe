//! Subcommand bodies. Each renders its whole output into a buffer so nothing
//! is written unless the run succeeds.

use crate::config::{usage, JobConfig, Source};
use anyhow::{anyhow, Context, Result};
use elastica::check::{self, CheckConfig, Status};
use elastica::closing::{self, CaseTag, ClosingSolution};
use elastica::curvegen::CurveFamily;
use elastica::elastica::{self as el, ElasticParams};
use elastica::geometry::{self, TorusKind, TorusReport};
use elastica::weierstrass::LatticeData;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// What a run produced.
pub struct Output {
    pub body: Vec<u8>,
    /// Exit code on success (`check` reports failures through it).
    pub code: i32,
}

impl Output {
    fn ok(body: impl Into<Vec<u8>>) -> Self {
        Output {
            body: body.into(),
            code: 0,
        }
    }
}

/// The resolved inputs echoed into every output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub g2: f64,
    pub g3: f64,
    pub mu: f64,
    pub lambda: f64,
    pub nu: f64,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "E", skip_serializing_if = "Option::is_none", default)]
    pub e: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho: Option<[f64; 2]>,
    pub m: i64,
    pub n: i64,
    pub case: String,
    pub seed: u64,
}

impl Provenance {
    fn new(cmd: &str, cfg: &JobConfig, l: &LatticeData, p: &ElasticParams) -> Self {
        Provenance {
            command: cmd.to_string(),
            g2: l.inv.g2,
            g3: l.inv.g3,
            mu: p.mu,
            lambda: p.lambda,
            nu: p.nu,
            g: p.g,
            e: None,
            rho: None,
            m: cfg.m,
            n: cfg.n,
            case: cfg.case.name().to_string(),
            seed: cfg.seed,
        }
    }

    fn with_solution(mut self, sol: &ClosingSolution) -> Self {
        self.e = Some(sol.e);
        self.rho = Some([sol.rho.re, sol.rho.im]);
        self.m = sol.m;
        self.n = sol.n;
        self.case = sol.case.name().to_string();
        self
    }

    /// `# key = value` lines for formats without native metadata.
    fn comment_block(&self) -> Result<String> {
        let text = toml::to_string(self)?;
        Ok(text.lines().map(|l| format!("# {l}\n")).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct SolveRecord {
    provenance: Provenance,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    solution: Option<ClosingSolution>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    closure_defect: Option<f64>,
}

fn lattice(g2: f64, g3: f64) -> Result<LatticeData> {
    Ok(LatticeData::from_invariants(g2, g3)?)
}

fn params_of(source: Source) -> Option<ElasticParams> {
    match source {
        Source::Params {
            mu,
            lambda,
            nu: Some(nu),
            g,
        } => Some(ElasticParams::new(mu, lambda, nu, g)),
        _ => None,
    }
}

fn warn_gcd(cfg: &JobConfig) -> Result<()> {
    let (m, n, cover) = closing::normalize_mn(cfg.m, cfg.n)?;
    if cover > 1 {
        eprintln!(
            "warning: (m, n) = ({}, {}) has common factor {cover}; solving ({m}, {n})",
            cfg.m, cfg.n
        );
    }
    Ok(())
}

/// Closed-curve data, freshly solved or read back from a prior `solve`.
struct Solved {
    lattice: LatticeData,
    /// Parameters of the curve actually drawn.
    params: ElasticParams,
    solution: Option<ClosingSolution>,
}

fn solve_inputs(cfg: &JobConfig) -> Result<Solved> {
    if let Some(path) = &cfg.from {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let rec: SolveRecord = toml::from_str(&text)
            .map_err(|e| usage(format!("{} is not a solve record: {e}", path.display())))?;
        let p = &rec.provenance;
        return Ok(Solved {
            lattice: lattice(p.g2, p.g3)?,
            params: ElasticParams::new(p.mu, p.lambda, p.nu, p.g),
            solution: rec.solution,
        });
    }
    if cfg.case != CaseTag::HyperbolicWavelike {
        warn_gcd(cfg)?;
    }
    match cfg.source {
        Source::Params { mu, nu: None, g, .. } => {
            let f = closing::solve_closing_in_family(mu, g, cfg.m, cfg.n)?;
            let inv = el::invariants_from_params(&f.params);
            Ok(Solved {
                lattice: lattice(inv.g2, inv.g3)?,
                params: f.params,
                solution: Some(f.solution),
            })
        }
        source => {
            let l = match params_of(source) {
                Some(p) => {
                    let inv = el::invariants_from_params(&p);
                    lattice(inv.g2, inv.g3)?
                }
                None => match source {
                    Source::Invariants { g2, g3 } => lattice(g2, g3)?,
                    _ => unreachable!(),
                },
            };
            let solution = closing::solve(&l, cfg.case, cfg.m, cfg.n)?;
            let params = match &solution {
                Some(sol) => closing::family_of(sol, &l)?.params,
                None => params_of(source).map_or_else(|| el::elastic_representative(&l), Ok)?,
            };
            Ok(Solved {
                lattice: l,
                params,
                solution,
            })
        }
    }
}

/// The solved curve, or an error if the solve was empty.
fn closed_curve(cfg: &JobConfig) -> Result<(Solved, ClosingSolution, CurveFamily)> {
    let s = solve_inputs(cfg)?;
    let sol = s
        .solution
        .ok_or_else(|| anyhow!("no closed curve for this input (empty solve result)"))?;
    let fam = closing::family_of(&sol, &s.lattice)?;
    Ok((s, sol, fam))
}

fn default_kind(sol: &ClosingSolution) -> TorusKind {
    match sol.case {
        CaseTag::Sphere => TorusKind::Hopf,
        _ => TorusKind::Revolution,
    }
}

pub fn classify(cfg: &JobConfig) -> Result<Output> {
    let p = match cfg.source {
        Source::Invariants { g2, g3 } => el::elastic_representative(&lattice(g2, g3)?)?,
        Source::Params { nu: None, .. } => solve_inputs(cfg)?.params,
        source => params_of(source).expect("ν present"),
    };
    // Invariants come from the parameters, so a degenerate lattice is
    // still classifiable.
    let inv = el::invariants_from_params(&p);
    let roots: Vec<f64> = el::quartic_real_roots(&p).iter().map(|r| r.value).collect();
    let report = el::real_solution_exists(&p);
    let kappa0 = cfg.kappa0.or_else(|| roots.last().copied());
    let class = match kappa0 {
        Some(k) => el::classify(&p, k)?.name().to_string(),
        None => "None".to_string(),
    };
    let provenance = Provenance {
        command: "classify".into(),
        g2: inv.g2,
        g3: inv.g3,
        mu: p.mu,
        lambda: p.lambda,
        nu: p.nu,
        g: p.g,
        e: None,
        rho: None,
        m: cfg.m,
        n: cfg.n,
        case: cfg.case.name().into(),
        seed: cfg.seed,
    };
    let rec = ClassifyRecord {
        provenance,
        classification: Classification {
            discriminant: inv.disc,
            real_roots: roots,
            kappa0,
            class,
            exists: report.exists,
            criterion_holds: report.criterion_holds,
            on_boundary: report.on_boundary,
            verdict: report.reason,
        },
    };
    Ok(Output::ok(toml::to_string(&rec)?))
}

#[derive(Serialize)]
struct ClassifyRecord {
    provenance: Provenance,
    classification: Classification,
}

#[derive(Serialize)]
struct Classification {
    discriminant: f64,
    real_roots: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa0: Option<f64>,
    class: String,
    exists: bool,
    criterion_holds: bool,
    on_boundary: bool,
    verdict: String,
}

pub fn solve(cfg: &JobConfig) -> Result<Output> {
    let s = solve_inputs(cfg)?;
    let base = Provenance::new("solve", cfg, &s.lattice, &s.params);
    let rec = match s.solution {
        Some(sol) => {
            let fam = closing::family_of(&sol, &s.lattice)?;
            SolveRecord {
                provenance: base.with_solution(&sol),
                status: "solved".into(),
                reason: None,
                closure_defect: Some(closing::projective_closure_defect(&fam, sol.n)?),
                solution: Some(sol),
            }
        }
        None => SolveRecord {
            provenance: base,
            status: "empty".into(),
            reason: Some("no closed curves: the wavelike closing criterion fails".into()),
            solution: None,
            closure_defect: None,
        },
    };
    Ok(Output::ok(toml::to_string(&rec)?))
}

pub fn curve(cfg: &JobConfig) -> Result<Output> {
    let (s, sol, fam) = closed_curve(cfg)?;
    let c = geometry::normalize_to_spaceform(&fam, &sol, cfg.samples)?;
    let mut buf = Provenance::new("curve", cfg, &s.lattice, &fam.params)
        .with_solution(&sol)
        .comment_block()?
        .into_bytes();
    geometry::write_curve_csv(&c, &mut buf)?;
    Ok(Output::ok(buf))
}

pub fn torus(cfg: &JobConfig) -> Result<Output> {
    let (s, sol, fam) = closed_curve(cfg)?;
    let kind = cfg.kind.unwrap_or_else(|| default_kind(&sol));
    let c = geometry::normalize_to_spaceform(&fam, &sol, cfg.samples)?;
    let (rows, cols) = cfg.res;
    let mesh = match kind {
        TorusKind::Hopf => geometry::hopf_torus_mesh(&c, rows, cols)?.stereographic(),
        TorusKind::Revolution => geometry::torus_of_revolution_mesh(&c, rows, cols)?,
    };
    let mut head = Provenance::new("torus", cfg, &s.lattice, &fam.params)
        .with_solution(&sol)
        .comment_block()?;
    writeln!(head, "# kind = \"{}\"", kind.name())?;
    writeln!(head, "# resolution = [{}, {}]", mesh.rows, mesh.cols)?;
    let mut buf = head.into_bytes();
    mesh.write_obj(&mut buf)?;
    Ok(Output::ok(buf))
}

#[derive(Serialize)]
struct ReportRecord {
    provenance: Provenance,
    report: TorusReport,
    cmc: Option<String>,
}

pub fn report(cfg: &JobConfig) -> Result<Output> {
    let (s, sol, fam) = closed_curve(cfg)?;
    let kind = cfg.kind.unwrap_or_else(|| default_kind(&sol));
    let report = geometry::torus_report(&sol, &fam, kind, cfg.samples)?;
    let rec = ReportRecord {
        provenance: Provenance::new("report", cfg, &s.lattice, &fam.params).with_solution(&sol),
        cmc: report.cmc.map(|c| c.name().to_string()),
        report,
    };
    Ok(Output::ok(toml::to_string(&rec)?))
}

pub fn check(cfg: &JobConfig) -> Result<Output> {
    let (g2, g3) = match cfg.source {
        Source::Invariants { g2, g3 } => (g2, g3),
        Source::Params { .. } => {
            let s = match params_of(cfg.source) {
                Some(p) => el::invariants_from_params(&p),
                None => {
                    let s = solve_inputs(cfg)?;
                    s.lattice.inv
                }
            };
            (s.g2, s.g3)
        }
    };
    let cc = CheckConfig {
        g2,
        g3,
        m: cfg.m.max(1),
        n: cfg.n,
        seed: cfg.seed,
        tolerances: cfg.tol.clone(),
    };
    let results = check::run_checks(&cc);
    let mut out = String::new();
    writeln!(out, "# g2 = {g2}, g3 = {g3}, m = {}, n = {}, seed = {}", cc.m, cc.n, cc.seed)?;
    for r in &results {
        let status = match &r.status {
            Status::Pass => "PASS".to_string(),
            Status::Fail => "FAIL".to_string(),
            Status::Skipped(why) => format!("SKIP({why})"),
        };
        writeln!(out, "{status:<18} {:<36} residual={:e} tol={:e}", r.name, r.residual, r.tol)?;
    }
    let passed = check::all_passed(&results);
    let failed = results.iter().filter(|r| !r.passed()).count();
    writeln!(out, "{} checks, {failed} failed", results.len())?;
    Ok(Output {
        body: out.into_bytes(),
        code: if passed { 0 } else { 1 },
    })
}
