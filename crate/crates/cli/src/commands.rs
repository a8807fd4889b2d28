use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use pentatile_core::cases::{sort_pattern_with, with_hypotheses, PatternReport, REFERENCE_PATTERN_COUNT};
use pentatile_core::certificate::StageFailure;
use pentatile_core::*;
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{CliError, ExitCode};

pub const TILE_DEPTH: u32 = 2;
pub const CERTIFY_DEPTH: u32 = 3;
pub const CERTIFY_MAX_DEPTH: u32 = 5;
pub const SEARCH_BUDGET: u64 = 1_000_000;
pub const SORT_BUDGET: u64 = 20_000;

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub started_unix: u64,
    pub elapsed_ms: u128,
}

#[derive(Debug, Serialize)]
pub struct Report<'a, T> {
    pub command: &'a str,
    pub version: &'a str,
    pub config: &'a RunConfig,
    pub result: T,
    /// Timing only; excluded from reproducibility comparisons.
    pub metadata: Metadata,
}

pub struct Ctx {
    pub config: RunConfig,
    started: Instant,
    started_unix: u64,
}

impl Ctx {
    pub fn new(config: RunConfig) -> Ctx {
        Ctx {
            config,
            started: Instant::now(),
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }

    fn emit<T: Serialize>(&self, command: &str, result: T) -> Result<(), CliError> {
        let report = Report {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config: &self.config,
            result,
            metadata: Metadata {
                started_unix: self.started_unix,
                elapsed_ms: self.started.elapsed().as_millis(),
            },
        };
        let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
        text.push('\n');
        write_output(self.config.output.as_deref(), &text)
    }

    fn table(&self) -> Result<TypeTable, CliError> {
        match &self.config.table {
            Some(p) => load_type_table(p).map_err(|e| match e {
                TableError::Io { .. } => CliError::new(ExitCode::Io, e.to_string()),
                _ => CliError::new(ExitCode::Parse, format!("{}: {e}", p.display())),
            }),
            None => Ok(TypeTable::shipped()),
        }
    }

    fn limits(&self, depth: u32, budget: u64) -> Limits {
        Limits {
            target_depth: self.config.depth.unwrap_or(depth),
            max_placements: self.config.budget.unwrap_or(budget),
            reflections: self.config.reflections,
            corollary1_prune: self.config.corollary1_prune,
        }
    }

    fn rules(&self) -> ReductionRules {
        ReductionRules {
            dedup: self.config.dedup,
            dihedral: self.config.dihedral,
        }
    }

    fn sort_config(&self) -> SortConfig {
        SortConfig {
            samples_per_dim: self.config.samples,
            seed: self.config.seed,
            limits: self.limits(TILE_DEPTH, SORT_BUDGET),
            tol: self.config.tol,
        }
    }
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::new(ExitCode::Io, format!("stdout: {e}"))),
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| CliError::new(ExitCode::Parse, format!("{}: {e}", path.display())))?;
    Ok(match v.get("result") {
        Some(inner) if v.get("command").is_some() => inner.clone(),
        _ => v,
    })
}

fn load(path: &Path) -> Result<Vec<PentagonSpec>, CliError> {
    load_specs(path).map_err(|e| match e {
        SpecError::Io { .. } => CliError::new(ExitCode::Io, e.to_string()),
        SpecError::Parse { .. } => CliError::new(ExitCode::Parse, format!("{}: {e}", path.display())),
    })
}

fn pick(path: &Path, name: Option<&str>) -> Result<PentagonSpec, CliError> {
    let specs = load(path)?;
    match name {
        Some(n) => specs
            .into_iter()
            .find(|s| s.name == n)
            .ok_or_else(|| CliError::new(ExitCode::Usage, format!("no pentagon named `{n}` in {}", path.display()))),
        None if specs.len() == 1 => Ok(specs.into_iter().next().expect("one spec")),
        None => Err(CliError::new(
            ExitCode::Usage,
            format!(
                "{} holds {} pentagons; choose one with --name",
                path.display(),
                specs.len()
            ),
        )),
    }
}

#[derive(Debug, Serialize)]
pub struct EnumerateResult {
    pub raw_multisets: usize,
    pub anchored_conditions: usize,
    pub reduced_conditions: usize,
    pub rules: ReductionRules,
    pub canonical: bool,
    pub count: usize,
    pub patterns: Vec<CandidatePattern>,
}

pub fn enumerate(ctx: &Ctx) -> Result<ExitCode, CliError> {
    let rules = ctx.rules();
    let patterns = enumerate_candidate_patterns(&rules);
    eprintln!("{} candidate patterns", patterns.len());
    ctx.emit(
        "enumerate",
        EnumerateResult {
            raw_multisets: Triple::all().len(),
            anchored_conditions: enumerate_angle_conditions().len(),
            reduced_conditions: pentatile_core::cases::reduced_triples().len(),
            rules,
            canonical: rules == ReductionRules::default() && patterns.len() == REFERENCE_PATTERN_COUNT,
            count: patterns.len(),
            patterns,
        },
    )?;
    Ok(ExitCode::Ok)
}

pub fn sort(ctx: &Ctx) -> Result<ExitCode, CliError> {
    let patterns = enumerate_candidate_patterns(&ctx.rules());
    let report = first_stage_sort(&patterns, &ctx.table()?, &ctx.sort_config());
    for (bucket, n) in &report.counts {
        eprintln!("{bucket}: {n}");
    }
    if let Some(d) = &report.discrepancy {
        eprintln!(
            "uncertain {} (reference {}), refined {} (reference {})",
            d.uncertain, d.expected_uncertain, d.refined, d.expected_refined
        );
    }
    ctx.emit("sort", report)?;
    Ok(ExitCode::Ok)
}

#[derive(Debug, Serialize)]
pub struct RefineResult {
    pub pattern: CandidatePattern,
    pub hypotheses: Option<String>,
    pub cases: Vec<PatternReport>,
}

pub fn refine_cmd(ctx: &Ctx, id: usize, edge_condition: Option<&str>) -> Result<ExitCode, CliError> {
    let patterns = enumerate_candidate_patterns(&ctx.rules());
    let pattern = patterns.get(id).cloned().ok_or_else(|| {
        CliError::new(ExitCode::Usage, format!("pattern id {id} out of range 0..{}", patterns.len()))
    })?;
    let (base, extra) = match edge_condition {
        Some(h) => {
            let cs = parse_hypotheses(h).map_err(|e| CliError::new(ExitCode::Parse, format!("`{h}`: {e}")))?;
            let rest = ConstraintSet {
                edge_classes: Vec::new(),
                ..cs.clone()
            };
            (with_hypotheses(&pattern, &cs), rest)
        }
        None => (pattern.clone(), ConstraintSet::default()),
    };
    let table = ctx.table()?;
    let cfg = ctx.sort_config();
    let cases: Vec<PatternReport> = refine(&base)
        .iter()
        .map(|p| sort_pattern_with(p, &extra, &table, &cfg))
        .collect();
    for c in &cases {
        eprintln!("{}: {} ({})", c.pattern, c.pattern.status.bucket(), c.reason);
    }
    ctx.emit(
        "refine",
        RefineResult {
            pattern,
            hypotheses: edge_condition.map(str::to_string),
            cases,
        },
    )?;
    Ok(ExitCode::Ok)
}

#[derive(Debug, Serialize)]
pub struct ClassifyEntry {
    pub name: String,
    pub line: usize,
    pub angles: AngleVector,
    pub edges: EdgeVector,
    pub classification: ClassificationResult,
    pub expect: Option<Vec<String>>,
    pub expect_ok: Option<bool>,
}

pub fn expectation_met(expect: &[String], got: &ClassificationResult) -> bool {
    if expect.is_empty() {
        got.types.is_empty()
    } else {
        expect.iter().all(|t| got.contains(t))
    }
}

pub fn classify_cmd(ctx: &Ctx, spec: &Path) -> Result<ExitCode, CliError> {
    let table = ctx.table()?;
    let entries: Vec<ClassifyEntry> = load(spec)?
        .into_iter()
        .map(|s| {
            let c = classify(&s.angles, &s.edges, &table, &ctx.config.tol);
            let ok = s.expect.as_ref().map(|e| expectation_met(e, &c));
            eprintln!("{}: {:?}", s.name, c.types);
            ClassifyEntry {
                name: s.name,
                line: s.line,
                angles: s.angles,
                edges: s.edges,
                classification: c,
                expect: s.expect,
                expect_ok: ok,
            }
        })
        .collect();
    ctx.emit("classify", entries)?;
    Ok(ExitCode::Ok)
}

fn write_svg(path: &Path, fig: &Figure, markers: bool) -> Result<(), CliError> {
    std::fs::write(path, render_svg(fig, markers)).map_err(|e| CliError::io(path, e))
}

pub fn tile(ctx: &Ctx, spec: &Path, name: Option<&str>) -> Result<ExitCode, CliError> {
    let s = pick(spec, name)?;
    let proto = Prototile::new(&s.angles, &s.edges, &ctx.config.tol)
        .map_err(|e| CliError::new(ExitCode::Parse, format!("{}: {e}", s.name)))?;
    let seed = seed_patch(Arc::new(proto), &SeedSpec::default(), ctx.config.tol).expect("empty seed spec");
    let r = grow(seed, ctx.limits(TILE_DEPTH, SEARCH_BUDGET));
    let dump = PatchDump::from_result(&r);
    eprintln!(
        "{}: {:?} with {} tiles, completed depth {}",
        s.name,
        r.outcome,
        dump.tiles.len(),
        dump.completed_depth
    );
    if let Some(svg) = &ctx.config.svg {
        write_svg(svg, &Figure::from(&dump), ctx.config.markers)?;
    }
    ctx.emit("tile", &dump)?;
    Ok(match r.outcome {
        Outcome::ReachedTargetDepth => ExitCode::Ok,
        Outcome::Exhausted => ExitCode::Exhausted,
        Outcome::BudgetExceeded => ExitCode::BudgetExceeded,
    })
}

#[derive(Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CertifyResult {
    Certified {
        name: String,
        certificate: Box<Certificate>,
        verification: VerifyReport,
    },
    Failed {
        name: String,
        failure: StageFailure,
    },
    Falsification {
        name: String,
        check: String,
        dump: Box<Certificate>,
    },
}

pub fn certify_cmd(ctx: &Ctx, spec: &Path, name: Option<&str>) -> Result<ExitCode, CliError> {
    let s = pick(spec, name)?;
    let depth = ctx.config.depth.unwrap_or(CERTIFY_DEPTH);
    let opts = CertifyOptions {
        depth,
        max_depth: CERTIFY_MAX_DEPTH.max(depth),
        limits: ctx.limits(depth, SEARCH_BUDGET),
        tol: ctx.config.tol,
        ..CertifyOptions::default()
    };
    let (result, code) = match certify(&s.angles, &s.edges, &opts) {
        Ok(cert) => match verify_certificate(&cert) {
            Ok(verification) => {
                eprintln!(
                    "{}: certified, {} tiles per cell, densities {:?}",
                    s.name, cert.tiles_per_cell, cert.density.densities
                );
                if let Some(svg) = &ctx.config.svg {
                    write_svg(svg, &Figure::from(&cert), ctx.config.markers)?;
                }
                (
                    CertifyResult::Certified {
                        name: s.name,
                        certificate: Box::new(cert),
                        verification,
                    },
                    ExitCode::Ok,
                )
            }
            Err(e) => {
                eprintln!("{}: certificate rejected by the verifier: {e}", s.name);
                (
                    CertifyResult::Failed {
                        name: s.name,
                        failure: StageFailure {
                            stage: Stage::Torus,
                            message: format!("verifier: {e}"),
                            grow_outcome: None,
                            stats: None,
                        },
                    },
                    ExitCode::CertifyStage,
                )
            }
        },
        Err(CertifyError::Stage(failure)) => {
            eprintln!("{}: stopped at stage {}: {}", s.name, failure.stage, failure.message);
            (CertifyResult::Failed { name: s.name, failure }, ExitCode::CertifyStage)
        }
        Err(CertifyError::Falsification { check, dump }) => {
            eprintln!("FALSIFICATION on {}: {check} failed on a validated torus", s.name);
            (
                CertifyResult::Falsification {
                    name: s.name,
                    check,
                    dump,
                },
                ExitCode::Falsification,
            )
        }
    };
    ctx.emit("certify", result)?;
    Ok(code)
}

fn certificate_in(v: &Value) -> Option<Certificate> {
    serde_json::from_value(v.clone())
        .ok()
        .or_else(|| v.get("certificate").and_then(|c| serde_json::from_value(c.clone()).ok()))
        .or_else(|| v.get("dump").and_then(|c| serde_json::from_value(c.clone()).ok()))
}

pub fn render(ctx: &Ctx, input: &Path) -> Result<ExitCode, CliError> {
    let v = read_json(input)?;
    let fig = if let Some(cert) = certificate_in(&v) {
        Figure::from(&cert)
    } else if let Ok(dump) = serde_json::from_value::<PatchDump>(v) {
        Figure::from(&dump)
    } else {
        return Err(CliError::new(
            ExitCode::Parse,
            format!("{} holds neither a patch dump nor a certificate", input.display()),
        ));
    };
    let text = render_svg(&fig, ctx.config.markers);
    write_output(ctx.config.svg.as_deref().or(ctx.config.output.as_deref()), &text)?;
    Ok(ExitCode::Ok)
}

pub fn verify_cmd(ctx: &Ctx, input: &Path) -> Result<ExitCode, CliError> {
    let v = read_json(input)?;
    let cert = certificate_in(&v)
        .ok_or_else(|| CliError::new(ExitCode::Parse, format!("{} holds no certificate", input.display())))?;
    match verify_certificate(&cert) {
        Ok(report) => {
            eprintln!("certificate valid: {} tiles, {} node classes", report.tiles, report.nodes);
            ctx.emit("verify-certificate", report)?;
            Ok(ExitCode::Ok)
        }
        Err(e) => {
            eprintln!("certificate invalid: {e}");
            ctx.emit("verify-certificate", serde_json::json!({ "valid": false, "error": e.to_string() }))?;
            Ok(ExitCode::VerifyFailed)
        }
    }
}
