//! `ebs`: command-line access to the extended bicyclic semigroup toolkit.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 classification or
//! enumeration failure, 4 numeric verification failure.

use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ebs_core::closure::{is_window_semiheap, padded_closure};
use ebs_core::enumerate::{count_window_semiheaps, cross_validate, golden_count};
use ebs_core::tro::{verify_contraction, verify_partial_isometry};
use ebs_core::window::parse_elements;
use ebs_core::{classify, product, triple, Charset, ClassificationReport, Element, ElementSet, Family, Window};
use serde_json::json;

const USAGE: u8 = 2;
const CLASSIFICATION: u8 = 3;
const NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(name = "ebs", version, about = "Extended bicyclic semigroup toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Product of two elements.
    Product { a: Element, b: Element },
    /// The triple product a b* c and the formula branch that produced it.
    Triple { a: Element, b: Element, c: Element },
    /// Closure of ';'-separated generators inside a padded window.
    Closure {
        generators: String,
        #[arg(long)]
        inner: Window,
        #[arg(long, default_value_t = 3)]
        pad: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Classifies a ';'-separated set as given, without closing it.
    Classify {
        elements: String,
        #[arg(long)]
        window: Window,
        #[command(flatten)]
        out: Output,
    },
    /// Counts the window-semiheaps of a window.
    Enumerate {
        #[arg(long)]
        window: Window,
        /// Close and classify every window-semiheap found.
        #[arg(long)]
        cross_validate: bool,
        #[arg(long, default_value_t = 4)]
        pad: usize,
        /// Worker threads for the sweep.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
    },
    /// Checks on the truncated left regular representation.
    Tro {
        #[command(subcommand)]
        command: TroCommand,
    },
    /// Renders a family over a window.
    Diagram {
        /// Family as JSON, e.g. '{"tag":"Lattice","anchor":[0,0],"period":3}'.
        #[arg(long)]
        family: String,
        #[arg(long)]
        window: Window,
        #[arg(long, value_enum, default_value_t = Glyphs::Unicode)]
        charset: Glyphs,
    },
}

#[derive(Subcommand)]
enum TroCommand {
    /// Random trials of the coefficient-dropping projection onto a subset.
    Verify {
        /// Corner ideal "i,j".
        #[arg(long, conflicts_with = "family", required_unless_present = "family")]
        corner: Option<String>,
        /// Family as JSON.
        #[arg(long)]
        family: Option<String>,
        #[arg(long, default_value_t = 40)]
        n: i64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
    },
    /// Checks V V* V = V for a single represented element.
    Isometry {
        #[arg(long)]
        element: Element,
        #[arg(long, default_value_t = 16)]
        n: i64,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
    },
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Ascii)]
    format: Format,
    #[arg(long, value_enum, default_value_t = Glyphs::Unicode)]
    charset: Glyphs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Glyphs {
    Unicode,
    Ascii,
}

impl From<Glyphs> for Charset {
    fn from(g: Glyphs) -> Self {
        match g {
            Glyphs::Unicode => Charset::Unicode,
            Glyphs::Ascii => Charset::Ascii,
        }
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn parse_family(s: &str) -> Result<Family> {
    let f: Family = serde_json::from_str(s).map_err(|e| ebs_core::Error::Parse(format!("family: {e}")))?;
    f.validate()?;
    Ok(f)
}

fn parse_corner(s: &str) -> Result<Element> {
    let t = s.trim();
    let text = if t.starts_with('(') { t.to_string() } else { format!("({t})") };
    Ok(text.parse()?)
}

/// Prints a set and its classification; returns the exit code.
fn show_classified(s: &ElementSet, report: &ClassificationReport, out: &Output) -> Result<u8> {
    let failed = report.case.is_nonoccurring();
    match out.format {
        Format::Json => print_json(&json!({ "set": s, "report": report }))?,
        Format::Ascii => {
            print!("{}", s.render(out.charset.into()));
            match &report.family {
                Some(f) => println!("case {}, {f}", report.case),
                None => println!("case {}", report.case),
            }
            if let Some(w) = &report.witness {
                let cells: Vec<String> = w.iter().map(Element::to_string).collect();
                println!("witness: {}", cells.join(";"));
            }
        }
    }
    Ok(if failed { CLASSIFICATION } else { 0 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Product { a, b } => {
            println!("{}", product(a, b)?);
            Ok(0)
        }
        Command::Triple { a, b, c } => {
            let (r, case) = triple(a, b, c)?;
            println!("{r} [case {case}]");
            Ok(0)
        }
        Command::Closure { generators, inner, pad, out } => {
            let gens = parse_elements(&generators)?;
            let s = padded_closure(&gens, inner, pad)?;
            show_classified(&s, &classify(&s), &out)
        }
        Command::Classify { elements, window, out } => {
            let s = ElementSet::from_elements(window, parse_elements(&elements)?)?;
            if let Some(v) = is_window_semiheap(&s) {
                eprintln!("not closed: {} {}* {} = {} is missing", v.x, v.y, v.z, v.result);
                return Ok(CLASSIFICATION);
            }
            show_classified(&s, &classify(&s), &out)
        }
        Command::Enumerate { window, cross_validate: cv, pad, jobs, format } => {
            let golden = golden_count(window).unwrap_or_else(|e| {
                eprintln!("warning: {e}");
                None
            });
            let (count, report) = if cv {
                let r = cross_validate(window, pad, jobs)?;
                (r.count, Some(r))
            } else {
                (count_window_semiheaps(window, jobs)?, None)
            };
            let golden_ok = golden.is_none_or(|g| g == count);
            let failures = report.as_ref().map_or(0, |r| r.failures.len());
            match format {
                Format::Json => print_json(&json!({
                    "window": window,
                    "count": count,
                    "golden": golden,
                    "cross_validation": report,
                }))?,
                Format::Ascii => {
                    println!("count: {count}");
                    match golden {
                        Some(g) if g == count => println!("golden: {g} (match)"),
                        Some(g) => println!("golden: {g} (MISMATCH)"),
                        None => println!("golden: none recorded"),
                    }
                    if let Some(r) = &report {
                        println!("exact: {}", r.exact_matches);
                        println!("extensions: {}", r.proper_extensions);
                        println!("nonoccurring: {}", r.nonoccurring);
                        println!("failures: {failures}");
                        for (label, n) in &r.labels {
                            println!("  {label}: {n}");
                        }
                        for f in r.failures.iter().take(5) {
                            let gens: Vec<String> = f.set.iter().map(Element::to_string).collect();
                            println!("  failure {}: {}", gens.join(";"), f.reason);
                        }
                    }
                }
            }
            Ok(if failures == 0 && golden_ok { 0 } else { CLASSIFICATION })
        }
        Command::Tro { command } => match command {
            TroCommand::Verify { corner, family, n, trials, seed, format } => {
                let k = match (corner, family) {
                    (Some(c), _) => {
                        let e = parse_corner(&c)?;
                        Family::CornerIdeal { i: e.i, j: e.j }
                    }
                    (None, Some(f)) => parse_family(&f)?,
                    (None, None) => return Err(anyhow!("one of --corner or --family is required")),
                };
                let r = verify_contraction(|x| k.contains(x), trials, n, seed)?;
                match format {
                    Format::Json => print_json(&r)?,
                    Format::Ascii => {
                        println!("projection onto {k}");
                        println!("passes: {}/{}", r.passes, r.trials);
                        println!("max ratio: {:.9}", r.max_ratio);
                        println!("sum identity mismatches: {}", r.sum_identity_mismatches);
                        if r.unconverged > 0 {
                            println!("unconverged norm estimates: {}", r.unconverged);
                        }
                        for f in &r.failures {
                            println!("  failure a={:.9} b={:.9} {}", f.a, f.b, serde_json::to_string(&f.combo)?);
                        }
                    }
                }
                Ok(if r.all_passed() { 0 } else { NUMERIC })
            }
            TroCommand::Isometry { element, n, format } => {
                let r = verify_partial_isometry(element, n)?;
                if let Some(w) = &r.warning {
                    eprintln!("warning: {w}");
                }
                match format {
                    Format::Json => print_json(&r)?,
                    Format::Ascii => println!("safe columns: {}, exact: {}", r.safe_columns, r.exact()),
                }
                Ok(if r.exact() { 0 } else { NUMERIC })
            }
        },
        Command::Diagram { family, window, charset } => {
            let f = parse_family(&family)?;
            print!("{}", f.materialize(window).render(charset.into()));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e);
            let code = if e.root_cause().downcast_ref::<ebs_core::Error>().is_some()
                || e.root_cause().downcast_ref::<serde_json::Error>().is_some()
            {
                USAGE
            } else {
                1
            };
            ExitCode::from(code)
        }
    }
}
