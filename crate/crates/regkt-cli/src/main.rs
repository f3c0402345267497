//! `regkt` — command-line front end for the exact multiplier engine.
//!
//! Subcommands parse versioned group files, dispatch the library
//! computations, and emit either line-oriented text or a structured JSON
//! document.  Exit codes: `0` on success, `1` when a verification suite
//! returns a `Fail` verdict, `2` when an input cannot be parsed or a
//! computation cannot be set up.  Identical inputs and seed produce
//! byte-identical structured output.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use regkt::{
    all_clear, excision_extended, excision_product, kj2, kj2_extended, load_group_file,
    parse_normal_spec, render_run_text, run_corpus, splitcheck_product, universal_extension,
    verify_lemma1_lemma3, verify_lemma2, verify_lemma4, verify_lemma7, CorpusConfig, FiniteGroup,
    Report, Subgroup, Verdict, DEFAULT_PAIR_CAP, FORMAT_LINE,
};
use serde::Serialize;

/// Order bound above which `extension --universal` requires the
/// `--long-running` flag (the closure of the extension group is the one
/// computation in the tool with a multi-minute budget).
const LONG_RUNNING_ORDER: usize = 30;

#[derive(Parser)]
#[command(
    name = "regkt",
    version,
    about = "Exact relative Schur multipliers, central extensions, and their verification suites",
    max_term_width = 100
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for all randomized sampling (echoed into every report).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest base-group order the engines accept.
    #[arg(long, global = true, default_value_t = DEFAULT_PAIR_CAP)]
    cap: usize,
    /// Emit the structured JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Allow computations with long wall-time budgets.
    #[arg(long, global = true)]
    long_running: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect group files.
    Group {
        #[command(subcommand)]
        action: GroupAction,
    },
    /// Print the relative multiplier structure of a pair (N, F).
    ///
    /// Without `--normal` the full pair N = F is used; `--normal -` selects
    /// the trivial subgroup; otherwise `--normal` takes `;`- or `,`-separated
    /// element indices in the group file's numbering and uses their normal
    /// closure.
    Kj2 {
        /// Group file for F.
        file: PathBuf,
        /// Normal-subgroup spec (default: all of F).
        #[arg(long)]
        normal: Option<String>,
        /// Compute the extended multiplier (smaller denominator).
        #[arg(long)]
        extended: bool,
    },
    /// Realize the universal central extension of a full pair of a perfect
    /// group as a concrete finite group.
    Extension {
        /// Group file for F.
        file: PathBuf,
        /// Normal-subgroup spec (default: all of F).
        #[arg(long)]
        normal: Option<String>,
        /// Build the universal extension (the only supported mode).
        #[arg(long)]
        universal: bool,
    },
    /// Run one verification suite against a group or pair.
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
    /// Run an excision check on induced multiplier maps.
    Excise {
        #[command(subcommand)]
        mode: ExciseMode,
    },
    /// Check strict splitting of the product-pair section candidate built
    /// from two factor groups.
    Splitcheck {
        /// Group file for the first factor D.
        d_file: PathBuf,
        /// Group file for the second factor E.
        e_file: PathBuf,
        /// Recursion depth bound for the factorization process.
        #[arg(long, default_value_t = 5)]
        depth: usize,
    },
    /// Corpus operations.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum GroupAction {
    /// Parse a group file, validate the group axioms, and print a summary.
    Check {
        /// Group file to check.
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum VerifySuite {
    /// Certify the explicit free basis of the relation kernel of a group.
    Lemma2 {
        /// Group file for F.
        file: PathBuf,
    },
    /// Certify the relative kernel's generating family, membership
    /// decisions, and the abelianized round-trip on random members.
    Lemma134 {
        /// Group file for F.
        file: PathBuf,
        /// Normal-subgroup spec (default: all of F).
        #[arg(long)]
        normal: Option<String>,
        /// Number of random members to round-trip.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Conjugation depth for the independence subfamily.
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Check that the alternative commutator family spans the same
    /// coordinate lattice as the core family.
    Lemma4 {
        /// Group file for F.
        file: PathBuf,
        /// Normal-subgroup spec (default: all of F).
        #[arg(long)]
        normal: Option<String>,
    },
    /// Check the lift that inverts relative kernel members at the
    /// coordinate level.
    Lemma7 {
        /// Group file for F.
        file: PathBuf,
        /// Normal-subgroup spec (default: all of F).
        #[arg(long)]
        normal: Option<String>,
        /// Number of random members to check.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum ExciseMode {
    /// Injectivity of the induced map from the full pair of N into the
    /// full pair of the direct product N × M0.
    Product {
        /// Group file for N.
        n_file: PathBuf,
        /// Group file for the complementary factor M0.
        m0_file: PathBuf,
    },
    /// Kernel containment for an inclusion (N, F) ⊆ (N, G) given inside
    /// one ambient group file.
    Extended {
        /// Group file for the ambient group G.
        g_file: PathBuf,
        /// Spec for the intermediate subgroup F (element indices in G).
        #[arg(long)]
        sub: String,
        /// Spec for the normal subgroup N (element indices in G).
        #[arg(long)]
        normal: String,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Run every suite over a corpus directory and print the merged
    /// reports.
    Run {
        /// Corpus directory (groups/, presentations/, pair tables,
        /// fixtures/).
        dir: PathBuf,
    },
}

/// A non-`Fail` problem: the input could not be parsed or the computation
/// could not be set up.  Always maps to exit code 2.
struct SetupError(String);

impl<E: std::fmt::Display> From<E> for SetupError {
    fn from(e: E) -> Self {
        SetupError(e.to_string())
    }
}

type Setup<T> = Result<T, SetupError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(SetupError(msg)) => {
            eprintln!("regkt: error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Setup<ExitCode> {
    let g = &cli.global;
    match &cli.command {
        Command::Group {
            action: GroupAction::Check { file },
        } => group_check(file, g),
        Command::Kj2 {
            file,
            normal,
            extended,
        } => kj2_cmd(file, normal.as_deref(), *extended, g),
        Command::Extension {
            file,
            normal,
            universal,
        } => extension_cmd(file, normal.as_deref(), *universal, g),
        Command::Verify { suite } => verify_cmd(suite, g),
        Command::Excise { mode } => excise_cmd(mode, g),
        Command::Splitcheck {
            d_file,
            e_file,
            depth,
        } => {
            let d = load_group_file(d_file, g.cap)?;
            let e = load_group_file(e_file, g.cap)?;
            let report = splitcheck_product(&d, &e, *depth, g.cap)?;
            emit_reports(vec![report], g)
        }
        Command::Corpus {
            action: CorpusAction::Run { dir },
        } => corpus_cmd(dir, g),
    }
}

/// Loads the group and resolves the optional normal-subgroup spec: absent
/// means the full subgroup, otherwise `parse_normal_spec` rules apply.
fn load_pair(file: &Path, normal: Option<&str>, cap: usize) -> Setup<(FiniteGroup, Subgroup)> {
    let group = load_group_file(file, cap)?;
    let sub = match normal {
        None => group.full_subgroup(),
        Some(spec) => parse_normal_spec(&group, spec)?,
    };
    Ok((group, sub))
}

#[derive(Serialize)]
struct GroupSummary<'a> {
    format: &'a str,
    name: &'a str,
    order: usize,
    abelian: bool,
    perfect: bool,
}

fn group_check(file: &Path, g: &Global) -> Setup<ExitCode> {
    let group = load_group_file(file, g.cap)?;
    let summary = GroupSummary {
        format: FORMAT_LINE,
        name: group.name(),
        order: group.order(),
        abelian: group.is_abelian(),
        perfect: group.is_perfect(),
    };
    if g.json {
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        println!(
            "group {}: order {}, abelian {}, perfect {}",
            summary.name, summary.order, summary.abelian, summary.perfect
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Kj2Summary<'a> {
    format: &'a str,
    group: &'a str,
    normal_order: usize,
    extended: bool,
    structure: String,
    free_rank: usize,
    torsion: Vec<String>,
    certificates_generate: bool,
}

fn kj2_cmd(file: &Path, normal: Option<&str>, extended: bool, g: &Global) -> Setup<ExitCode> {
    let (group, sub) = load_pair(file, normal, g.cap)?;
    let result = if extended {
        kj2_extended(&group, &sub, g.cap)?
    } else {
        kj2(&group, &sub, g.cap)?
    };
    if g.json {
        let summary = Kj2Summary {
            format: FORMAT_LINE,
            group: group.name(),
            normal_order: sub.members().len(),
            extended,
            structure: result.structure.to_string(),
            free_rank: result.structure.free_rank,
            torsion: result.structure.torsion.iter().map(ToString::to_string).collect(),
            certificates_generate: result.certificates_generate,
        };
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        println!("{}", result.structure);
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ExtensionSummary<'a> {
    format: &'a str,
    base_group: &'a str,
    base_order: usize,
    extension_order: usize,
    kernel_structure: String,
    kernel_central: bool,
    kernel_in_derived: bool,
}

fn extension_cmd(
    file: &Path,
    normal: Option<&str>,
    universal: bool,
    g: &Global,
) -> Setup<ExitCode> {
    if !universal {
        return Err(SetupError(
            "only universal extensions are supported; pass --universal".into(),
        ));
    }
    let (group, sub) = load_pair(file, normal, g.cap)?;
    if group.order() > LONG_RUNNING_ORDER && !g.long_running {
        return Err(SetupError(format!(
            "building the universal extension of a group of order {} has a long wall-time \
             budget; pass --long-running to proceed",
            group.order()
        )));
    }
    let ext = universal_extension(&group, &sub, g.cap)?;
    let summary = ExtensionSummary {
        format: FORMAT_LINE,
        base_group: group.name(),
        base_order: sub.members().len(),
        extension_order: ext.group.order(),
        kernel_structure: ext.kernel_structure.to_string(),
        kernel_central: ext.kernel_central,
        kernel_in_derived: ext.kernel_in_derived,
    };
    if g.json {
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        println!("{FORMAT_LINE}");
        println!(
            "universal extension of {} (order {})",
            summary.base_group, summary.base_order
        );
        println!("extension order: {}", summary.extension_order);
        println!("kernel: {}", summary.kernel_structure);
        println!("kernel central: {}", summary.kernel_central);
        println!("kernel inside derived subgroup: {}", summary.kernel_in_derived);
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_cmd(suite: &VerifySuite, g: &Global) -> Setup<ExitCode> {
    let report = match suite {
        VerifySuite::Lemma2 { file } => {
            let group = load_group_file(file, g.cap)?;
            verify_lemma2(&group)
        }
        VerifySuite::Lemma134 {
            file,
            normal,
            samples,
            depth,
        } => {
            let (group, sub) = load_pair(file, normal.as_deref(), g.cap)?;
            verify_lemma1_lemma3(&group, &sub, *samples, *depth, g.seed)
        }
        VerifySuite::Lemma4 { file, normal } => {
            let (group, sub) = load_pair(file, normal.as_deref(), g.cap)?;
            verify_lemma4(&group, &sub)
        }
        VerifySuite::Lemma7 {
            file,
            normal,
            samples,
        } => {
            let (group, sub) = load_pair(file, normal.as_deref(), g.cap)?;
            verify_lemma7(&group, &sub, *samples, g.seed)
        }
    };
    emit_reports(vec![report], g)
}

fn excise_cmd(mode: &ExciseMode, g: &Global) -> Setup<ExitCode> {
    let report = match mode {
        ExciseMode::Product { n_file, m0_file } => {
            let n = load_group_file(n_file, g.cap)?;
            let m0 = load_group_file(m0_file, g.cap)?;
            excision_product(&n, &m0, g.cap)?
        }
        ExciseMode::Extended {
            g_file,
            sub,
            normal,
        } => {
            let ambient = load_group_file(g_file, g.cap)?;
            let f_sub = parse_normal_spec(&ambient, sub)?;
            let n_sub = parse_normal_spec(&ambient, normal)?;
            excision_extended(&ambient, &f_sub, &n_sub, g.cap)?
        }
    };
    emit_reports(vec![report], g)
}

fn corpus_cmd(dir: &Path, g: &Global) -> Setup<ExitCode> {
    let config = CorpusConfig {
        seed: g.seed,
        cap: g.cap,
        long_running: g.long_running,
        ..CorpusConfig::default()
    };
    let reports = run_corpus(dir, &config)?;
    emit_reports(reports, g)
}

#[derive(Serialize)]
struct RunDocument<'a> {
    format: &'a str,
    reports: &'a [Report],
    pass: usize,
    fail: usize,
    skipped: usize,
}

/// Prints reports in the selected mode and converts verdicts to the exit
/// code: `1` when any report failed, `0` otherwise.
fn emit_reports(reports: Vec<Report>, g: &Global) -> Setup<ExitCode> {
    if g.json {
        let count = |v: fn(&Verdict) -> bool| reports.iter().filter(|r| v(&r.verdict)).count();
        let doc = RunDocument {
            format: FORMAT_LINE,
            reports: &reports,
            pass: count(|v| matches!(v, Verdict::Pass)),
            fail: count(|v| matches!(v, Verdict::Fail)),
            skipped: count(|v| matches!(v, Verdict::Skipped { .. })),
        };
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        print!("{}", render_run_text(&reports));
    }
    Ok(if all_clear(&reports) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
