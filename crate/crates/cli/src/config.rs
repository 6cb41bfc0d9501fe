//! Job configuration: a flat TOML file merged with command-line flags.

use anyhow::{Context, Result};
use clap::Args;
use elastica::closing::CaseTag;
use elastica::geometry::TorusKind;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

/// A problem with the request itself (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Flags shared by every subcommand. Anything left unset falls back to the
/// config file, then to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct JobArgs {
    /// Lattice invariant g₂.
    #[arg(long, allow_hyphen_values = true)]
    pub g2: Option<f64>,
    /// Lattice invariant g₃.
    #[arg(long, allow_hyphen_values = true)]
    pub g3: Option<f64>,
    /// Length multiplier μ.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Area multiplier λ.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Integration constant ν; omit it (with λ = 0) to solve for ν.
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    /// Curvature G of the space form.
    #[arg(long = "G", allow_hyphen_values = true)]
    pub g: Option<f64>,
    /// Winding number.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i64>,
    /// Lobe number.
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<i64>,
    /// Closing case: sphere, hyp-orbit or hyp-wave.
    #[arg(long)]
    pub case: Option<String>,
    /// Torus kind: hopf or revolution (default from the case).
    #[arg(long)]
    pub kind: Option<String>,
    /// Initial curvature for `classify` (default: largest root of P₄).
    #[arg(long, allow_hyphen_values = true)]
    pub kappa0: Option<f64>,
    /// Samples per period of the curvature.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Mesh resolution as PROFILExFIBRE, e.g. 256x64.
    #[arg(long)]
    pub res: Option<String>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Tolerance override NAME=VALUE (repeatable).
    #[arg(long = "tol")]
    pub tol: Vec<String>,
    /// Seed for randomized checks.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Flat TOML config file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Prior `solve` output to build on instead of solving again.
    #[arg(long)]
    pub from: Option<PathBuf>,
}

/// Keys accepted in a config file (same names as the flags).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    g2: Option<f64>,
    g3: Option<f64>,
    mu: Option<f64>,
    lambda: Option<f64>,
    nu: Option<f64>,
    #[serde(rename = "G")]
    g: Option<f64>,
    m: Option<i64>,
    n: Option<i64>,
    case: Option<String>,
    kind: Option<String>,
    kappa0: Option<f64>,
    samples: Option<usize>,
    res: Option<String>,
    out: Option<PathBuf>,
    #[serde(default)]
    tol: Vec<String>,
    seed: Option<u64>,
    from: Option<PathBuf>,
}

/// Where the lattice comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    Invariants { g2: f64, g3: f64 },
    /// `nu = None` asks for ν to be solved from the closing condition.
    Params {
        mu: f64,
        lambda: f64,
        nu: Option<f64>,
        g: f64,
    },
}

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub source: Source,
    pub m: i64,
    pub n: i64,
    pub case: CaseTag,
    pub kind: Option<TorusKind>,
    pub kappa0: Option<f64>,
    pub samples: usize,
    pub res: (usize, usize),
    pub out: Option<PathBuf>,
    pub tol: BTreeMap<String, f64>,
    pub seed: u64,
    pub from: Option<PathBuf>,
}

fn parse_res(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    match parts.as_slice() {
        [p, q] => {
            let p: usize = p.trim().parse().map_err(|_| usage(format!("bad --res {s:?}")))?;
            let q: usize = q.trim().parse().map_err(|_| usage(format!("bad --res {s:?}")))?;
            if p < 3 || q < 3 {
                return Err(usage(format!("--res {s:?}: both sizes must be at least 3")));
            }
            Ok((p, q))
        }
        _ => Err(usage(format!("--res expects PxQ, got {s:?}"))),
    }
}

fn parse_tol(entries: &[String], into: &mut BTreeMap<String, f64>) -> Result<()> {
    for e in entries {
        let (name, value) = e
            .split_once('=')
            .ok_or_else(|| usage(format!("--tol expects NAME=VALUE, got {e:?}")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| usage(format!("--tol {e:?}: value is not a number")))?;
        if !(v >= 0.0) {
            return Err(usage(format!("--tol {e:?}: tolerance must be non-negative")));
        }
        into.insert(name.trim().to_string(), v);
    }
    Ok(())
}

fn read_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))
        .map_err(|e| usage(format!("{e:#}")))?;
    toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
}

pub fn parse_case(s: &str) -> Result<CaseTag> {
    CaseTag::parse(s).ok_or_else(|| usage(format!("unknown case {s:?} (sphere, hyp-orbit, hyp-wave)")))
}

pub fn parse_kind(s: &str) -> Result<TorusKind> {
    match s {
        "hopf" => Ok(TorusKind::Hopf),
        "revolution" => Ok(TorusKind::Revolution),
        _ => Err(usage(format!("unknown torus kind {s:?} (hopf, revolution)"))),
    }
}

impl JobConfig {
    /// Merge flags over the config file over defaults, and validate.
    pub fn resolve(args: &JobArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => read_file_config(p)?,
            None => FileConfig::default(),
        };
        let g2 = args.g2.or(file.g2);
        let g3 = args.g3.or(file.g3);
        let mu = args.mu.or(file.mu);
        let lambda = args.lambda.or(file.lambda);
        let nu = args.nu.or(file.nu);
        let g = args.g.or(file.g);
        let any_inv = g2.is_some() || g3.is_some();
        let any_par = mu.is_some() || lambda.is_some() || nu.is_some() || g.is_some();
        let source = match (any_inv, any_par) {
            (true, true) => {
                return Err(usage(
                    "give either --g2/--g3 or --mu/--lambda/--nu/--G, not both",
                ))
            }
            (true, false) => Source::Invariants {
                g2: g2.ok_or_else(|| usage("--g3 needs --g2"))?,
                g3: g3.ok_or_else(|| usage("--g2 needs --g3"))?,
            },
            (false, true) => Source::Params {
                mu: mu.ok_or_else(|| usage("missing --mu"))?,
                lambda: lambda.ok_or_else(|| usage("missing --lambda"))?,
                nu,
                g: g.ok_or_else(|| usage("missing --G"))?,
            },
            // The lemniscatic instance.
            (false, false) => Source::Invariants { g2: 4.0, g3: 0.0 },
        };
        let case = parse_case(args.case.as_deref().or(file.case.as_deref()).unwrap_or("sphere"))?;
        if let Source::Params { lambda, nu: None, .. } = source {
            if lambda != 0.0 || case != CaseTag::Sphere {
                return Err(usage(
                    "--nu may only be omitted for λ = 0 on the sphere (ν is then solved for)",
                ));
            }
        }
        let kind = args
            .kind
            .as_deref()
            .or(file.kind.as_deref())
            .map(parse_kind)
            .transpose()?;
        let (m, n) = match case {
            CaseTag::HyperbolicWavelike => (0, 1),
            _ => (args.m.or(file.m).unwrap_or(1), args.n.or(file.n).unwrap_or(2)),
        };
        if n <= 0 {
            return Err(usage(format!("--n must be positive, got {n}")));
        }
        let samples = args.samples.or(file.samples).unwrap_or(256);
        if samples < 4 {
            return Err(usage("--samples must be at least 4"));
        }
        let res = parse_res(args.res.as_deref().or(file.res.as_deref()).unwrap_or("256x64"))?;
        let mut tol = BTreeMap::new();
        parse_tol(&file.tol, &mut tol)?;
        parse_tol(&args.tol, &mut tol)?;
        Ok(JobConfig {
            source,
            m,
            n,
            case,
            kind,
            kappa0: args.kappa0.or(file.kappa0),
            samples,
            res,
            out: args.out.clone().or(file.out),
            tol,
            seed: args.seed.or(file.seed).unwrap_or(0),
            from: args.from.clone().or(file.from),
        })
    }
}
