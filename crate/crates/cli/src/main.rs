//! Command-line front end for the loop-subgroup stabilizer toolkit.
//!
//! Subcommands:
//!   verify     run the closure/filter verification for a loop subgroup
//!   graph      export the coset graph as deterministic DOT
//!   decompose  write an even permutation as a word in the two loop cycles
//!   preimage   construct and certify a single stabilizing automorphism
//!
//! Exit codes: 0 — all checks passed; 1 — a verification ran and failed (the
//! report is still written); 2 — invalid usage or an unmet precondition.
//! JSON output carries a top-level "schema": 1 field; reports go to the path
//! given with --out, everything else to stdout.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use loopstab::excluded::{ExcludedCase, ExcludedReport};
use loopstab::loopgroup::LoopSubgroup;
use loopstab::permutation::{decompose_even, Permutation};
use loopstab::report::CheckResult;
use loopstab::stabilizer::{
    preimage_double, preimage_elementary, preimage_elementary_squared, preimage_via_commutator,
    tau_stabilizer, verify_sharpbound, CertifiedStabilizer, SharpboundReport,
};

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Number of random congruence products checked on the looplet-heavy route.
const CONGRUENCE_TRIALS: usize = 100;

#[derive(Parser)]
#[command(name = "loopstab", version, about = "loop subgroup stabilizers in free groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Kind {
    Odd,
    Squared,
    Double,
    Tau,
    Commutator,
}

#[derive(Subcommand)]
enum Command {
    /// Verify that the matrix image of the stabilizer is what the loop
    /// lengths predict, and write a JSON report.
    Verify {
        /// Loop lengths, comma separated (e.g. 3,3,1)
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        loops: Vec<usize>,
        /// Abort closure enumerations beyond this many elements
        #[arg(long, default_value_t = 10_000_000)]
        cap: usize,
        /// Shadow modulus for the looplet-heavy route (must be a multiple of
        /// the long loop's length; defaults to that length)
        #[arg(long)]
        modulus: Option<u64>,
        /// Write the JSON report to this path
        #[arg(long)]
        out: Option<PathBuf>,
        /// What to print on stdout
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print the coset graph in DOT form.
    Graph {
        /// Loop lengths, comma separated
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        loops: Vec<usize>,
        /// Also write the DOT text to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose an even permutation into a word in the two loop cycles
    /// sigma = (1 .. m) and omega = (1, m+1 .. n).
    Decompose {
        /// Number of points
        #[arg(long)]
        n: usize,
        /// Split point: sigma moves 1..m, omega moves 1 and m+1..n
        #[arg(long)]
        m: usize,
        /// The permutation in cycle notation, e.g. "(1,2,4)" or "(1,2)(3,4)"
        #[arg(long)]
        cycles: String,
    },
    /// Construct one stabilizing automorphism and print its certificate.
    Preimage {
        /// Loop lengths, comma separated
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        loops: Vec<usize>,
        /// Which construction to run
        #[arg(long, value_enum)]
        kind: Kind,
        /// Prefix generator index (the i of X_ij); the flipped index for tau
        #[arg(long)]
        i: Option<usize>,
        /// Modified generator index (the j of X_ij)
        #[arg(long)]
        j: Option<usize>,
        /// Third index for the double construction
        #[arg(long)]
        k: Option<usize>,
        /// Write the JSON certificate to this path
        #[arg(long)]
        out: Option<PathBuf>,
        /// What to print on stdout
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Verify {
            loops,
            cap,
            modulus,
            out,
            format,
        } => cmd_verify(loops, cap, modulus, out, format),
        Command::Graph { loops, out } => cmd_graph(loops, out),
        Command::Decompose { n, m, cycles } => cmd_decompose(n, m, &cycles),
        Command::Preimage {
            loops,
            kind,
            i,
            j,
            k,
            out,
            format,
        } => cmd_preimage(loops, kind, i, j, k, out, format),
    }
}

fn usage(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {}", message);
    EXIT_USAGE
}

/// Writes the report when --out was given, prints per the format, and turns
/// the verdict into an exit code.
fn emit_report(
    json: &str,
    summary: &str,
    passed: bool,
    out: Option<PathBuf>,
    format: Format,
) -> u8 {
    if let Some(path) = &out {
        if let Err(e) = fs::write(path, json) {
            return usage(format_args!("cannot write {}: {}", path.display(), e));
        }
    }
    match (format, &out) {
        (Format::Json, None) => println!("{}", json),
        (Format::Json, Some(path)) => println!(
            "report written to {} ({})",
            path.display(),
            if passed { "pass" } else { "FAIL" }
        ),
        (Format::Text, _) => print!("{}", summary),
    }
    if passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn check_lines(out: &mut String, checks: &[CheckResult]) {
    for c in checks {
        if c.pass {
            let _ = writeln!(out, "  {}: ok", c.name);
        } else {
            let _ = writeln!(out, "  {}: FAIL — {}", c.name, c.details);
        }
    }
}

fn sharpbound_summary(report: &SharpboundReport) -> String {
    let loops: Vec<String> = report.loops.iter().map(|s| s.to_string()).collect();
    let parity: Vec<String> = report.parity_vector.iter().map(|b| b.to_string()).collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "loops {}  parity ({})  generators {}",
        loops.join("/"),
        parity.join(","),
        report.generator_count
    );
    let _ = writeln!(
        out,
        "image order {} (expected {})",
        report.image_order, report.expected_order
    );
    check_lines(&mut out, &report.checks);
    let _ = writeln!(
        out,
        "verdict: {}",
        if report.passed() { "pass" } else { "FAIL" }
    );
    out
}

fn excluded_summary(report: &ExcludedReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "looplet-heavy configuration: rank {}, long loop {}, shadow modulus {}",
        report.r, report.s1, report.modulus
    );
    let _ = writeln!(
        out,
        "closure order {} / filtered order {} ({} candidates, {} congruence trials)",
        report.closure_order, report.filtered_order, report.candidate_count, report.gamma_s1_trials
    );
    check_lines(&mut out, &report.checks);
    let _ = writeln!(
        out,
        "verdict: {}",
        if report.passed() { "pass" } else { "FAIL" }
    );
    out
}

fn cmd_verify(
    loops: Vec<usize>,
    cap: usize,
    modulus: Option<u64>,
    out: Option<PathBuf>,
    format: Format,
) -> u8 {
    let u = match LoopSubgroup::new(loops) {
        Ok(u) => u,
        Err(e) => return usage(e),
    };
    let r = u.rank();
    if u.looplet_count() == r {
        return usage(
            "every loop is a looplet: the subgroup is all of the free group \
             and its stabilizer image is the whole matrix group; nothing to verify",
        );
    }
    if u.looplet_count() == r - 1 {
        // one long loop, all other generators trivial: the congruence-level route
        let s1 = (1..=r).map(|i| u.loop_len(i)).max().expect("nonempty");
        let case = match ExcludedCase::new(r, s1) {
            Ok(c) => c,
            Err(e) => return usage(e),
        };
        let report = match case.verify_excluded(modulus, cap, CONGRUENCE_TRIALS) {
            Ok(rep) => rep,
            Err(e) => return usage(e),
        };
        return emit_report(
            &report.to_json(),
            &excluded_summary(&report),
            report.passed(),
            out,
            format,
        );
    }
    if let Some(m) = modulus {
        return usage(format_args!(
            "--modulus {} applies only to the looplet-heavy configuration \
             (exactly one loop longer than 1)",
            m
        ));
    }
    let report = match verify_sharpbound(&u, cap) {
        Ok(rep) => rep,
        Err(e) => return usage(e),
    };
    emit_report(
        &report.to_json(),
        &sharpbound_summary(&report),
        report.passed(),
        out,
        format,
    )
}

fn cmd_graph(loops: Vec<usize>, out: Option<PathBuf>) -> u8 {
    let u = match LoopSubgroup::new(loops) {
        Ok(u) => u,
        Err(e) => return usage(e),
    };
    let dot = u.coset_graph_dot();
    if let Some(path) = &out {
        if let Err(e) = fs::write(path, &dot) {
            return usage(format_args!("cannot write {}: {}", path.display(), e));
        }
    }
    print!("{}", dot);
    EXIT_PASS
}

/// Parses "(1,2,4)(5,6)" into a list of cycles; whitespace is ignored and an
/// empty string denotes the identity.
fn parse_cycles(text: &str) -> Result<Vec<Vec<usize>>, String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut cycles = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let Some(after) = rest.strip_prefix('(') else {
            return Err(format!("expected '(' at \"{}\"", rest));
        };
        let Some(end) = after.find(')') else {
            return Err("unclosed '(' in cycle notation".to_string());
        };
        let body = &after[..end];
        if !body.is_empty() {
            let cycle = body
                .split(',')
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| format!("bad point \"{}\" in cycle notation", t))
                })
                .collect::<Result<Vec<usize>, String>>()?;
            cycles.push(cycle);
        }
        rest = &after[end + 1..];
    }
    Ok(cycles)
}

fn cmd_decompose(n: usize, m: usize, cycles: &str) -> u8 {
    let cycles = match parse_cycles(cycles) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let p = match Permutation::from_cycles(n, &cycles) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let word = match decompose_even(&p, m) {
        Ok(w) => w,
        Err(e) => return usage(e),
    };
    let full: Vec<usize> = (1..=n).collect();
    let sigma = Permutation::cycle(n, &full[..m]).expect("split was validated");
    let mut omega_points = vec![1];
    omega_points.extend(m + 1..=n);
    let omega = Permutation::cycle(n, &omega_points).expect("split was validated");
    let ok = word.evaluate(&sigma, &omega) == p;
    println!("{}", word);
    println!(
        "check: evaluation over sigma = {}, omega = {} {} the input {}",
        sigma,
        omega,
        if ok { "reproduces" } else { "DOES NOT reproduce" },
        p
    );
    if ok {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn cmd_preimage(
    loops: Vec<usize>,
    kind: Kind,
    i: Option<usize>,
    j: Option<usize>,
    k: Option<usize>,
    out: Option<PathBuf>,
    format: Format,
) -> u8 {
    let u = match LoopSubgroup::new(loops.clone()) {
        Ok(u) => u,
        Err(e) => return usage(e),
    };
    let need = |name: &str, v: Option<usize>| v.ok_or(format!("this kind needs --{}", name));
    let built: Result<CertifiedStabilizer, String> = (|| {
        let stab = match kind {
            Kind::Odd => {
                preimage_elementary(&u, need("i", i)?, need("j", j)?).map_err(|e| e.to_string())
            }
            Kind::Squared => preimage_elementary_squared(&u, need("i", i)?, need("j", j)?)
                .map_err(|e| e.to_string()),
            Kind::Double => preimage_double(&u, need("i", i)?, need("j", j)?, need("k", k)?)
                .map_err(|e| e.to_string()),
            Kind::Tau => tau_stabilizer(&u, need("i", i)?).map_err(|e| e.to_string()),
            Kind::Commutator => {
                preimage_via_commutator(&u, need("i", i)?, need("j", j)?).map_err(|e| e.to_string())
            }
        }?;
        Ok(stab)
    })();
    let stab = match built {
        Ok(s) => s,
        Err(e) => return usage(e),
    };

    let r = u.rank();
    let images: Vec<String> = stab.gamma().images().iter().map(|w| w.to_string()).collect();
    let rows: Vec<Vec<i64>> = (1..=r)
        .map(|row| (1..=r).map(|col| stab.target().get(row, col)).collect())
        .collect();
    let json_value = serde_json::json!({
        "schema": 1,
        "loops": loops,
        "kind": stab.kind(),
        "indices": { "i": i, "j": j, "k": k },
        "images": images,
        "witness": stab.witness().to_string(),
        "b_matrix": rows,
        "certified": true,
    });
    let json = serde_json::to_string_pretty(&json_value).expect("certificate serializes");

    let mut summary = String::new();
    let _ = writeln!(summary, "kind: {}", stab.kind());
    for (n, image) in images.iter().enumerate() {
        let _ = writeln!(summary, "g{} -> {}", n + 1, image);
    }
    let _ = writeln!(summary, "witness: {}", stab.witness());
    for row in &rows {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(summary, "b-image row: [{}]", cells.join(" "));
    }
    let _ = writeln!(summary, "certified: true");

    emit_report(&json, &summary, true, out, format)
}
