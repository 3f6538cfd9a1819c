//! `flatforge` — command-line surface for the GF(p) matroid engine.
//!
//! Matroid arguments accept either a path to a matrix text file or a
//! catalog spec string (`pg:2,2`, `ag:3,2`, `reid:3`, `free:4,2`,
//! `sum:<spec>+<spec>`, `random:r,n,p,seed`). Every subcommand writes a
//! deterministic summary to stdout and, with `--out`, a certificate JSON
//! bound to the input's content digest.
//!
//! Exit codes: 0 verdict computed, 1 sought object not found / verdict
//! negative, 2 usage error, 3 scale refusal.

use clap::{Args, Parser, Subcommand};
use flatforge_core::cert::{validate_file, Certificate, CertificateFile, FlatReport};
use flatforge_core::flats::{classify_flat, enumerate_flats};
use flatforge_core::lemmas::{
    kelly2_trichotomy, lift_affine_with, restriction_trichotomy, unavoidable_search,
    verify_reid1, verify_reid2, verify_reid_characteristic, LiftError, LiftOutcome, Reid1Verdict,
    ReidOutcome, RestrictionOutcome, SearchParams, SearchStrategy, TrichotomyError,
    TrichotomyOutcome,
};
use flatforge_core::matroid::Matroid;
use flatforge_core::ramsey::{
    max_flatfree_set, small_hj_report, small_ramsey_report, theorem_census,
    theorem_census_sampled, RamseyError,
};
use flatforge_core::subset::Subset;
use flatforge_core::textio::{emit_matroid, parse_matroid};
use flatforge_core::CatalogSpec;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "flatforge", version, about = "Exact matroid computations over prime fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Seed for sampled modes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; results never depend on this. Defaults to
    /// FLATFORGE_THREADS or all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the certificate/report JSON here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate and classify every rank-k flat.
    Classify {
        matroid: String,
        #[arg(long)]
        k: usize,
    },
    /// Search for an independent / affine / projective rank-k flat.
    FindUnavoidable {
        matroid: String,
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = parse_strategy, default_value = "direct")]
        strategy: SearchStrategy,
    },
    /// Small-case Ramsey (projective) or Hales-Jewett (affine) rank sweep.
    Ramsey {
        #[arg(long)]
        q: u8,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long)]
        max_rank: usize,
        /// Sweep affine geometries instead of projective ones.
        #[arg(long)]
        affine: bool,
    },
    /// Maximum flat-free subset (cap search).
    Cap {
        matroid: String,
        #[arg(long)]
        k: usize,
    },
    /// Run a lemma checker and emit its certificate.
    VerifyLemma {
        #[command(subcommand)]
        lemma: Lemma,
    },
    /// Exhaustive census of simple binary matroids at rank r.
    EnumerateCheck {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
        /// Sample size for r = 5 (exhaustion is refused there).
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Emit the matrix text of a catalog matroid.
    Catalog { spec: String },
    /// Re-verify a certificate against a matroid.
    Validate {
        certificate: PathBuf,
        matroid: String,
    },
}

#[derive(Subcommand)]
enum Lemma {
    /// Divisibility certificate for three copunctual lines.
    Kelly {
        matroid: String,
        #[arg(long)]
        apex: usize,
        /// Three lines as comma-separated element lists.
        #[arg(long = "line", num_args = 1, action = clap::ArgAction::Append)]
        lines: Vec<String>,
    },
    /// Exact line lengths (p + 1) for three copunctual lines.
    Reid1 {
        matroid: String,
        #[arg(long)]
        apex: usize,
        #[arg(long = "line", num_args = 1, action = clap::ArgAction::Append)]
        lines: Vec<String>,
    },
    /// Line lengths through one element, hypothesis by hypothesis.
    Reid2 {
        matroid: String,
        #[arg(long)]
        element: usize,
    },
    /// The three-way outcome over the (k, t, n) parameters.
    Kelly2 {
        matroid: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
    },
    /// Coextension lift: block form, coloring, monochromatic flat.
    Affine {
        matroid: String,
        /// The independent set J, comma-separated.
        #[arg(long)]
        j: String,
        #[arg(long)]
        k: usize,
        /// Optional explicit affine part of the contraction.
        #[arg(long)]
        affine_part: Option<String>,
    },
    /// Affine restriction or a small/disconnected flat.
    Restriction {
        matroid: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
    },
}

fn parse_strategy(s: &str) -> Result<SearchStrategy, String> {
    match s {
        "direct" => Ok(SearchStrategy::Direct),
        "proof" | "proof_guided" => Ok(SearchStrategy::ProofGuided),
        other => Err(format!("unknown strategy {other:?} (use direct|proof)")),
    }
}

enum CliError {
    Usage(String),
    NotFound(String),
    Scale(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NotFound(_) => 1,
            CliError::Scale(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::NotFound(m) | CliError::Scale(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn from_ramsey(e: RamseyError) -> CliError {
    match e {
        RamseyError::ScaleRefusal { .. } => CliError::Scale(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

/// A matroid argument: an existing file path, else a catalog spec.
fn load_matroid(arg: &str) -> Result<Matroid, CliError> {
    let path = std::path::Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {arg}: {e}")))?;
        return parse_matroid(&text).map_err(usage);
    }
    let spec: CatalogSpec = arg
        .parse()
        .map_err(|e| usage(format!("{arg:?} is neither a file nor a catalog spec: {e}")))?;
    flatforge_core::catalog::build_catalog(&spec).map_err(usage)
}

fn parse_indices(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| usage(format!("bad index {t:?}: {e}"))))
        .collect()
}

fn subset_arg(m: &Matroid, s: &str) -> Result<Subset, CliError> {
    let idx = parse_indices(s)?;
    for &i in &idx {
        if i >= m.size() {
            return Err(usage(format!("element {i} outside ground set of size {}", m.size())));
        }
    }
    Ok(Subset::from_indices(m.size(), &idx))
}

fn write_out(
    out: &Option<PathBuf>,
    m: &Matroid,
    certificate: Certificate,
) -> Result<(), CliError> {
    if let Some(path) = out {
        let file = CertificateFile::new(m, certificate);
        std::fs::write(path, file.to_json())
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn tags_of(c: &flatforge_core::flats::Classification) -> String {
    if c.tags.is_empty() {
        "none".into()
    } else {
        c.tags.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("+")
    }
}

fn indices_str(idx: &[usize]) -> String {
    let parts: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Classify { matroid, k } => {
            let m = load_matroid(&matroid)?;
            let mut reports = Vec::new();
            for f in enumerate_flats(&m, k) {
                let c = classify_flat(&m, &f).map_err(usage)?;
                println!("flat {} rank {} tags={}", f.elements, f.rank, tags_of(&c));
                reports.push(FlatReport {
                    elements: f.elements.indices(),
                    rank: f.rank,
                    classification: c,
                });
            }
            println!("total rank-{k} flats: {}", reports.len());
            write_out(&cli.common.out, &m, Certificate::FlatClassification { k, flats: reports })
        }
        Command::FindUnavoidable { matroid, k, strategy } => {
            let m = load_matroid(&matroid)?;
            let outcome = unavoidable_search(&m, k, strategy).map_err(usage)?;
            let found = outcome.found().cloned();
            write_out(&cli.common.out, &m, Certificate::Unavoidable(outcome))?;
            match found {
                Some(f) => {
                    println!(
                        "found rank-{k} flat {} tags={} (strategy={strategy})",
                        f.flat.elements,
                        tags_of(&f.classification)
                    );
                    Ok(())
                }
                None => {
                    println!("no qualifying rank-{k} flat (strategy={strategy})");
                    Err(CliError::NotFound(format!("no qualifying rank-{k} flat")))
                }
            }
        }
        Command::Ramsey { q, t, colors, max_rank, affine } => {
            let bounds = if affine {
                small_hj_report(q, t, colors, max_rank).map_err(from_ramsey)?
            } else {
                small_ramsey_report(q, t, max_rank).map_err(from_ramsey)?
            };
            if affine && colors != bounds.colors {
                return Err(usage("affine sweep used a different palette"));
            }
            if !affine && colors != 2 {
                return Err(usage("projective sweeps are defined for 2 colors"));
            }
            for v in &bounds.verdicts {
                let verdict = if v.holds { "holds" } else { "fails" };
                let modes = v.modes.join(",");
                match &v.witness {
                    Some(w) => {
                        let cs: Vec<String> =
                            w.colors().iter().map(|c| c.to_string()).collect();
                        println!(
                            "rank {}: {verdict} [{modes}] witness={}",
                            v.rank,
                            cs.join("")
                        );
                    }
                    None => println!("rank {}: {verdict} [{modes}]", v.rank),
                }
            }
            println!(
                "fails-at: {}  holds-at: {}",
                bounds.fails_at.map_or("none".into(), |r| r.to_string()),
                bounds.holds_at.map_or("none".into(), |r| r.to_string())
            );
            // bind to the largest geometry in the sweep
            let spec = if affine {
                CatalogSpec::Ag { n: max_rank - 1, p: q }
            } else {
                CatalogSpec::Pg { n: max_rank - 1, p: q }
            };
            let base = flatforge_core::catalog::build_catalog(&spec).map_err(usage)?;
            write_out(&cli.common.out, &base, Certificate::RamseyReport(bounds))
        }
        Command::Cap { matroid, k } => {
            let m = load_matroid(&matroid)?;
            let (size, witness) = max_flatfree_set(&m, k).map_err(from_ramsey)?;
            println!("max flat-free size {size}: {witness}");
            write_out(
                &cli.common.out,
                &m,
                Certificate::CapWitness(flatforge_core::cert::CapWitnessCert {
                    k,
                    size,
                    elements: witness.indices(),
                }),
            )
        }
        Command::VerifyLemma { lemma } => run_lemma(lemma, &cli.common),
        Command::EnumerateCheck { r, k, sample } => {
            let report = match sample {
                Some(count) => theorem_census_sampled(r, k, count, cli.common.seed)
                    .map_err(from_ramsey)?,
                None => theorem_census(r, k).map_err(from_ramsey)?,
            };
            println!(
                "census r={} k={} ({}): {} matroids",
                report.r, report.k, report.coverage, report.total
            );
            for (key, count) in &report.class_counts {
                println!("  {key}: {count}");
            }
            println!("  counterexamples: {}", report.counterexample_count);
            for cx in &report.counterexamples {
                println!("  counterexample mask={:#x} canonical={:?}", cx.mask, cx.canonical);
            }
            let base = flatforge_core::catalog::build_catalog(&CatalogSpec::Pg {
                n: r - 1,
                p: 2,
            })
            .map_err(usage)?;
            write_out(&cli.common.out, &base, Certificate::Census(report))
        }
        Command::Catalog { spec } => {
            let parsed: CatalogSpec = spec.parse().map_err(usage)?;
            let m = flatforge_core::catalog::build_catalog(&parsed).map_err(usage)?;
            let text = emit_matroid(&m);
            print!("{text}");
            if let Some(path) = &cli.common.out {
                std::fs::write(path, &text)
                    .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(())
        }
        Command::Validate { certificate, matroid } => {
            let m = load_matroid(&matroid)?;
            let text = std::fs::read_to_string(&certificate)
                .map_err(|e| usage(format!("cannot read {}: {e}", certificate.display())))?;
            let file = CertificateFile::from_json(&text).map_err(usage)?;
            match validate_file(&m, &file) {
                Ok(()) => {
                    println!("certificate accepted (kind={})", file.certificate.kind_name());
                    Ok(())
                }
                Err(e) => {
                    println!("certificate rejected: {e}");
                    Err(CliError::NotFound(format!("certificate rejected: {e}")))
                }
            }
        }
    }
}

fn three_lines(m: &Matroid, lines: &[String]) -> Result<[Subset; 3], CliError> {
    if lines.len() != 3 {
        return Err(usage(format!("exactly three --line options required, got {}", lines.len())));
    }
    Ok([
        subset_arg(m, &lines[0])?,
        subset_arg(m, &lines[1])?,
        subset_arg(m, &lines[2])?,
    ])
}

fn run_lemma(lemma: Lemma, common: &Common) -> Result<(), CliError> {
    match lemma {
        Lemma::Kelly { matroid, apex, lines } => {
            let m = load_matroid(&matroid)?;
            let [l1, l2, l3] = three_lines(&m, &lines)?;
            let outcome =
                verify_reid_characteristic(&m, apex, &l1, &l2, &l3).map_err(usage)?;
            match &outcome {
                ReidOutcome::TwoPointLine(f) => {
                    println!("two-point line {} short-circuits the configuration", f.elements)
                }
                ReidOutcome::Certificate(c) => {
                    println!(
                        "no two-point line; line size {} with pair ({},{})",
                        c.line_size, c.pair.0, c.pair.1
                    );
                    for (cycle, half) in c.cycles.iter().zip(&c.half_sizes) {
                        println!("  cycle {} half-size {half}", indices_str(cycle));
                    }
                    println!(
                        "  p={} divides every half size and |L1|-1: {}",
                        m.p(),
                        c.divisible
                    );
                }
            }
            write_out(
                &common.out,
                &m,
                Certificate::ReidCharacteristic {
                    apex,
                    lines: [l1.indices(), l2.indices(), l3.indices()],
                    outcome,
                },
            )
        }
        Lemma::Reid1 { matroid, apex, lines } => {
            let m = load_matroid(&matroid)?;
            let [l1, l2, l3] = three_lines(&m, &lines)?;
            let verdict = verify_reid1(&m, apex, &l1, &l2, &l3).map_err(usage)?;
            match &verdict {
                Reid1Verdict::TwoPointLine(f) => {
                    println!("two-point line {} found", f.elements)
                }
                Reid1Verdict::Sizes { sizes, expected, confirmed } => println!(
                    "no two-point line; sizes {:?}, expected {expected}: confirmed={confirmed}",
                    sizes
                ),
            }
            write_out(
                &common.out,
                &m,
                Certificate::Reid1 {
                    apex,
                    lines: [l1.indices(), l2.indices(), l3.indices()],
                    verdict,
                },
            )
        }
        Lemma::Reid2 { matroid, element } => {
            let m = load_matroid(&matroid)?;
            let report = verify_reid2(&m, element).map_err(usage)?;
            println!(
                "hypotheses hold: {} (simple={}, m={}, connected={}, coloop-free={}, small-hyperplane={})",
                report.hypotheses_hold,
                report.simple,
                report.contraction_points,
                report.contraction_connected,
                report.not_coloop,
                report
                    .small_hyperplane
                    .as_ref()
                    .map_or("none".into(), |h| indices_str(h)),
            );
            if let (Some(lines), Some(ok)) = (&report.lines, report.conclusion_holds) {
                for (line, len) in lines {
                    println!("  line {} length {len}", indices_str(line));
                }
                println!("all lines through {element} have length p+1: {ok}");
            }
            write_out(&common.out, &m, Certificate::Reid2(report))
        }
        Lemma::Kelly2 { matroid, k, t, n } => {
            let m = load_matroid(&matroid)?;
            let params = SearchParams::new(m.p(), k, t, n);
            match kelly2_trichotomy(&m, &params) {
                Ok(outcome) => {
                    match &outcome {
                        TrichotomyOutcome::AgRestriction(w) => {
                            let sizes: Vec<usize> = w.chain.iter().map(|s| s.len()).collect();
                            println!(
                                "affine restriction {} via chain sizes {:?}",
                                indices_str(w.restriction()),
                                sizes
                            );
                        }
                        TrichotomyOutcome::LiftedFlat(w) => println!(
                            "flat {} lifts: every rank-{t} flat of the contraction has >= {} points",
                            indices_str(&w.flat),
                            w.min_points
                        ),
                        TrichotomyOutcome::Disconnected(w) => println!(
                            "disconnected rank-{t} flat {} ({} components)",
                            indices_str(&w.flat),
                            w.components.len()
                        ),
                    }
                    write_out(&common.out, &m, Certificate::Trichotomy(outcome))
                }
                Err(TrichotomyError::Precondition { flat, points, needed, .. }) => {
                    println!(
                        "precondition fails: flat {} has {points} < {needed} points",
                        indices_str(&flat)
                    );
                    Err(CliError::NotFound("precondition failed".into()))
                }
                Err(TrichotomyError::Exhausted { contracts_tried }) => {
                    println!("no outcome after {contracts_tried} contraction flats");
                    Err(CliError::NotFound("trichotomy exhausted".into()))
                }
                Err(e) => Err(usage(e)),
            }
        }
        Lemma::Affine { matroid, j, k, affine_part } => {
            let m = load_matroid(&matroid)?;
            let j_set = subset_arg(&m, &j)?;
            let part = match &affine_part {
                Some(s) => Some(subset_arg(&m, s)?),
                None => None,
            };
            match lift_affine_with(&m, &j_set, k, part.as_ref()) {
                Ok(outcome) => {
                    let failed = matches!(outcome, LiftOutcome::NoMonochromaticFlat(_));
                    match &outcome {
                        LiftOutcome::Lifted(c) => println!(
                            "lifted affine restriction {} ({} colors in play)",
                            indices_str(&c.result),
                            c.color_map
                                .iter()
                                .map(|(_, col)| col.clone())
                                .collect::<std::collections::BTreeSet<_>>()
                                .len()
                        ),
                        LiftOutcome::NoMonochromaticFlat(f) => println!(
                            "no monochromatic rank-{k} flat under the {}-color map",
                            f.color_count
                        ),
                    }
                    write_out(&common.out, &m, Certificate::AffineLift(outcome))?;
                    if failed {
                        Err(CliError::NotFound("no monochromatic flat".into()))
                    } else {
                        Ok(())
                    }
                }
                Err(e @ LiftError::Matroid(_)) => Err(usage(e)),
                Err(e) => Err(usage(e)),
            }
        }
        Lemma::Restriction { matroid, k, t, n } => {
            let m = load_matroid(&matroid)?;
            let params = SearchParams::new(m.p(), k, t, n);
            let outcome = restriction_trichotomy(&m, &params).map_err(usage)?;
            let exhausted = matches!(outcome, RestrictionOutcome::Exhausted { .. });
            match &outcome {
                RestrictionOutcome::AgRestriction { elements, .. } => {
                    println!("affine restriction {}", indices_str(elements))
                }
                RestrictionOutcome::FlatWitness {
                    flat, point_count, small, disconnected, ..
                } => println!(
                    "rank-{t} flat {} with {point_count} points (small={small}, disconnected={disconnected})",
                    indices_str(flat)
                ),
                RestrictionOutcome::Exhausted { flats_scanned, ag_candidates, .. } => println!(
                    "exhausted: {flats_scanned} flats and {ag_candidates} affine candidates scanned"
                ),
            }
            write_out(&common.out, &m, Certificate::RestrictionTrichotomy(outcome))?;
            if exhausted {
                Err(CliError::NotFound("search exhausted".into()))
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .common
        .threads
        .or_else(|| {
            std::env::var("FLATFORGE_THREADS").ok().and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot build thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
