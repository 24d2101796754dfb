//! `thue`: batch front end over `thue-core`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use thue_core::families::Descriptor;
use thue_core::siegel::{classify, lemma_fuzz, siegel_identity_check};
use thue_core::solver::{brute_force_search, kappa_report, pruned_search, recheck, SearchBox, SearchResult};
use thue_core::verify::{run_suite, Suite};
use thue_core::{form_at, Error, TwistedFamily};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "thue", version, about = "Twisted Thue forms: construction, verification, search")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Working precision in bits for numerical enclosures.
    #[arg(long, default_value_t = 128, global = true,
          value_parser = clap::value_parser!(u64).range(32..=65536))]
    precision: u64,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Engine {
    Oracle,
    Pruned,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print F_a for one twist or a range `lo..hi`.
    Form {
        descriptor: String,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
        a: (i64, i64),
    },
    /// Print U_0(a), ..., U_d(a).
    Coeffs {
        descriptor: String,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
        a: (i64, i64),
    },
    /// Run a verification suite.
    Verify {
        descriptor: String,
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range, default_value = "-4..4")]
        a: (i64, i64),
    },
    /// Enumerate |F_a(x, y)| <= m with xy != 0 and |x|, |y| <= bound.
    Search {
        descriptor: String,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range, default_value = "0")]
        a: (i64, i64),
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, value_enum, default_value_t = Engine::Pruned)]
        engine: Engine,
    },
    /// Embedding profile and the six-term identity for one (a, x, y).
    Siegel {
        descriptor: String,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        x: i64,
        #[arg(long, allow_hyphen_values = true)]
        y: i64,
        #[arg(long, value_parser = parse_triple, default_value = "0,1,2")]
        triple: [usize; 3],
        /// Band exponent p/q in (0, 1), q <= 64.
        #[arg(long, value_parser = parse_rational, default_value = "1/2")]
        nu: BigRational,
    },
    /// Randomized check of the elementary inequality for t summands.
    Lemma {
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let parse = |v: &str| v.trim().parse::<i64>().map_err(|_| format!("not an integer: {v:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (parse(lo)?, parse(hi.strip_prefix('=').unwrap_or(hi))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_triple(s: &str) -> Result<[usize; 3], String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| format!("not an index: {p:?}")))
        .collect::<Result<_, _>>()?;
    let [i, j, k] = v[..] else {
        return Err("expected three indices i,j,k".into());
    };
    if i == j || j == k || i == k {
        return Err(format!("indices must be distinct, got {i},{j},{k}"));
    }
    Ok([i, j, k])
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    s.parse().map_err(|_| format!("not a rational p/q: {s:?}"))
}

/// Failure of a command, carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PrecisionExhausted { .. } => EXIT_FAIL,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_FAIL,
            message: format!("i/o: {e}"),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure {
            code: EXIT_FAIL,
            message: format!("csv: {e}"),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let mut file;
    let sink: &mut dyn Write = match &cli.out {
        Some(path) => match File::create(path) {
            Ok(f) => {
                file = BufWriter::new(f);
                &mut file
            }
            Err(e) => {
                let _ = writeln!(err, "error: cannot create {}: {e}", path.display());
                return EXIT_USAGE;
            }
        },
        None => out,
    };
    let mut ctx = Ctx {
        format: cli.format,
        precision: cli.precision,
        out: sink,
        err,
    };
    let result = ctx.dispatch(cli.cmd).and_then(|code| {
        ctx.out.flush()?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(ctx.err, "error: {}", f.message);
            f.code
        }
    }
}

struct Ctx<'a> {
    format: Format,
    precision: u64,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

fn family(descriptor: &str) -> Result<(Descriptor, TwistedFamily), Failure> {
    let d: Descriptor = descriptor.parse()?;
    let f = d.build()?;
    Ok((d, f))
}

impl Ctx<'_> {
    fn json<T: Serialize>(&mut self, v: &T) -> Result<(), Failure> {
        let line = serde_json::to_string(v).expect("serializable");
        writeln!(self.out, "{line}")?;
        Ok(())
    }

    fn csv(&mut self, rows: &[Vec<String>]) -> Result<(), Failure> {
        let mut w = csv::Writer::from_writer(&mut *self.out);
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    fn notice(&mut self, msg: &str) {
        let _ = writeln!(self.err, "notice: {msg}");
    }

    fn dispatch(&mut self, cmd: Command) -> CmdResult {
        match cmd {
            Command::Form { descriptor, a } => self.form(&descriptor, a, false),
            Command::Coeffs { descriptor, a } => self.form(&descriptor, a, true),
            Command::Verify { descriptor, suite, a } => self.verify(&descriptor, suite, a),
            Command::Search {
                descriptor,
                a,
                bound,
                m,
                engine,
            } => self.search(&descriptor, a, bound, m, engine),
            Command::Siegel {
                descriptor,
                a,
                x,
                y,
                triple,
                nu,
            } => self.siegel(&descriptor, a, x, y, triple, &nu),
            Command::Lemma { t, trials, seed } => self.lemma(t, trials, seed),
        }
    }

    /// `form` prints coefficients c_h; `coeffs` prints U_h = (-1)^h c_h.
    fn form(&mut self, descriptor: &str, (lo, hi): (i64, i64), symmetric: bool) -> CmdResult {
        let (_, fam) = family(descriptor)?;
        let d = fam.degree();
        let prefix = if symmetric { "U" } else { "c" };
        let mut rows = vec![std::iter::once("a".to_string())
            .chain((0..=d).map(|h| format!("{prefix}{h}")))
            .collect::<Vec<_>>()];
        for a in lo..=hi {
            let f = match form_at(&fam, a) {
                Ok(f) => f,
                Err(Error::DegenerateDegree { degree, .. }) => {
                    self.notice(&format!("a = {a}: alpha eps^a has degree {degree} < {d}, skipped"));
                    if self.format == Format::Json {
                        self.json(&json!({ "a": a, "degenerate": true, "degree": degree }))?;
                    }
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let values: Vec<String> = (0..=d)
                .map(|h| if symmetric { f.u(h) } else { f.coeffs[h].clone() }.to_string())
                .collect();
            match self.format {
                Format::Json if symmetric => self.json(&json!({ "a": a, "U": values }))?,
                Format::Json => self.json(&f)?,
                Format::Csv => rows.push(std::iter::once(a.to_string()).chain(values).collect()),
            }
        }
        if self.format == Format::Csv {
            self.csv(&rows)?;
        }
        Ok(EXIT_OK)
    }

    fn verify(&mut self, descriptor: &str, suite: Suite, (lo, hi): (i64, i64)) -> CmdResult {
        let desc: Descriptor = descriptor.parse()?;
        let report = run_suite(&desc, suite, lo, hi, self.precision)?;
        match self.format {
            Format::Json => self.json(&report)?,
            Format::Csv => self.csv(&[
                ["suite", "family", "a_min", "a_max", "passed", "checks", "failures"]
                    .map(String::from)
                    .to_vec(),
                vec![
                    suite.to_string(),
                    report.family.clone(),
                    lo.to_string(),
                    hi.to_string(),
                    report.passed.to_string(),
                    report.checks.to_string(),
                    report.failures.len().to_string(),
                ],
            ])?,
        }
        if report.passed {
            Ok(EXIT_OK)
        } else {
            let _ = writeln!(self.err, "verification failed: {} of {} checks", report.failures.len(), report.checks);
            Ok(EXIT_FAIL)
        }
    }

    fn search(&mut self, descriptor: &str, (lo, hi): (i64, i64), bound: u64, m: u64, engine: Engine) -> CmdResult {
        let b = SearchBox::new(lo, hi, bound, m)?;
        let (_, fam) = family(descriptor)?;
        let oracle = matches!(engine, Engine::Oracle | Engine::Both)
            .then(|| brute_force_search(&fam, &b))
            .transpose()?;
        let pruned = matches!(engine, Engine::Pruned | Engine::Both)
            .then(|| pruned_search(&fam, &b))
            .transpose()?;
        let agree = match (&oracle, &pruned) {
            (Some(o), Some(p)) => Some(o.solutions == p.solutions),
            _ => None,
        };
        let main: &SearchResult = pruned.as_ref().or(oracle.as_ref()).expect("one engine ran");
        let sound = recheck(&fam, &b, &main.solutions)?;
        let kappa = kappa_report(&main.solutions, m);
        if !kappa.defined {
            self.notice("kappa ratio undefined for m = 1 (log m = 0)");
        }
        for e in &main.degenerate {
            self.notice(&format!("a = {}: alpha eps^a has degree {}, skipped", e.a, e.degree));
        }
        let summary = json!({
            "family": descriptor,
            "box": b,
            "engine": format!("{engine:?}").to_lowercase(),
            "solutions": main.solutions.len(),
            "evaluations": {
                "oracle": oracle.as_ref().map(SearchResult::evaluations),
                "pruned": pruned.as_ref().map(SearchResult::evaluations),
            },
            "engines_agree": agree,
            "degenerate": main.degenerate,
            "kappa": kappa,
        });
        match self.format {
            Format::Json => {
                for s in &main.solutions {
                    self.json(s)?;
                }
                self.json(&json!({ "summary": summary }))?;
            }
            Format::Csv => {
                let mut rows = vec![["a", "x", "y", "value", "kappa"].map(String::from).to_vec()];
                for s in &main.solutions {
                    rows.push(vec![
                        s.a.to_string(),
                        s.x.to_string(),
                        s.y.to_string(),
                        s.value.to_string(),
                        s.kappa_ratio.map(|k| k.to_string()).unwrap_or_default(),
                    ]);
                }
                self.csv(&rows)?;
                let _ = writeln!(self.err, "{summary}");
            }
        }
        if agree == Some(false) {
            let _ = writeln!(self.err, "verification failed: oracle and pruned engines disagree");
            return Ok(EXIT_FAIL);
        }
        if !sound {
            let _ = writeln!(self.err, "verification failed: a reported solution does not recheck");
            return Ok(EXIT_FAIL);
        }
        Ok(EXIT_OK)
    }

    fn siegel(&mut self, descriptor: &str, a: i64, x: i64, y: i64, triple: [usize; 3], nu: &BigRational) -> CmdResult {
        let (_, fam) = family(descriptor)?;
        if let Some(&i) = triple.iter().find(|&&i| i >= fam.degree()) {
            return Err(Failure {
                code: EXIT_USAGE,
                message: format!("embedding index {i} out of range (degree {})", fam.degree()),
            });
        }
        let profile = classify(&fam, a, x, y, nu, self.precision)?;
        let residual = siegel_identity_check(&profile, triple)?;
        match self.format {
            Format::Json => self.json(&json!({ "profile": profile, "residual": residual }))?,
            Format::Csv => self.csv(&[
                ["a", "x", "y", "i1", "i2", "i3", "contains_zero", "width_log2"]
                    .map(String::from)
                    .to_vec(),
                vec![
                    a.to_string(),
                    x.to_string(),
                    y.to_string(),
                    triple[0].to_string(),
                    triple[1].to_string(),
                    triple[2].to_string(),
                    residual.contains_zero.to_string(),
                    residual.width_log2.to_string(),
                ],
            ])?,
        }
        if !profile.ambiguous.is_empty() {
            self.notice(&format!("undecided at this precision: {}", profile.ambiguous.join(", ")));
        }
        if residual.contains_zero {
            Ok(EXIT_OK)
        } else {
            let _ = writeln!(self.err, "verification failed: residual enclosure excludes 0");
            Ok(EXIT_FAIL)
        }
    }

    fn lemma(&mut self, t: usize, trials: u64, seed: u64) -> CmdResult {
        let report = lemma_fuzz(t, trials, seed)?;
        match self.format {
            Format::Json => self.json(&report)?,
            Format::Csv => self.csv(&[
                ["t", "delta", "mu", "trials", "failures", "rejected", "seed"]
                    .map(String::from)
                    .to_vec(),
                vec![
                    t.to_string(),
                    report.delta.to_string(),
                    report.mu.to_string(),
                    trials.to_string(),
                    report.failures.to_string(),
                    report.rejected.to_string(),
                    seed.to_string(),
                ],
            ])?,
        }
        if report.failures == 0 {
            Ok(EXIT_OK)
        } else {
            let _ = writeln!(self.err, "verification failed: {} conclusion failures", report.failures);
            Ok(EXIT_FAIL)
        }
    }
}
