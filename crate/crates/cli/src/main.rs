use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fibercover::certify::{
    certify, scan, status_summary, verify_certificate, Certificate, CertifyConfig, CERTIFICATE_VERSION,
};
use fibercover::homology::smith_normal_form;
use fibercover::homology::IntMatrix;
use fibercover::quotient::cases::cover_cases;
use fibercover::quotient::strategy::{select_strategies, solve_shape, strategy_names, QuotientBudget};
use fibercover::quotient::witness::QuotientShape;
use fibercover::slope::Slope;
use fibercover::word::TwistWord;

#[derive(Parser)]
#[command(
    name = "fibercover",
    version,
    about = "Finite covers of Dehn fillings of punctured-torus bundles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify one filling.
    Certify {
        #[arg(long)]
        word: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: i64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: i64,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Certify every coprime slope with |μ|, |λ| ≤ window.
    Scan {
        #[arg(long)]
        word: String,
        #[arg(long)]
        window: i64,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Re-check a certificate (or every certificate of a scan) offline.
    Verify {
        /// Certificate file; standard input when omitted.
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find a finite quotient with exact generator and product orders.
    Quotient {
        /// Orders `p,q,r` of a, b and ab.
        #[arg(long, value_delimiter = ',', required = true)]
        orders: Vec<u64>,
        #[arg(long, default_value_t = 64)]
        degree_cap: usize,
        #[arg(long, value_delimiter = ',')]
        quotient_strategies: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smith normal form of an integer matrix given as JSON rows.
    Snf {
        /// Inline matrix such as `[[2,4],[6,8]]`.
        #[arg(long, conflicts_with = "input")]
        matrix: Option<String>,
        /// File holding the matrix; standard input when neither is given.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 64)]
    degree_cap: usize,
    /// Index cap for the low-index fallback on the filled group; 0 disables it.
    #[arg(long, default_value_t = 0)]
    index_cap: usize,
    /// Case tags to try, e.g. `1,3b`.
    #[arg(long, value_delimiter = ',')]
    cases: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    quotient_strategies: Vec<String>,
    /// Skip the built-in framing transforms.
    #[arg(long)]
    no_framing: bool,
}

impl SearchArgs {
    fn config(&self) -> Result<CertifyConfig, Malformed> {
        let known: Vec<&str> = cover_cases().iter().map(|c| c.tag().as_str()).collect();
        if let Some(bad) = self.cases.iter().find(|c| !known.contains(&c.as_str())) {
            return Err(Malformed(format!("unknown case {bad:?}; expected one of {known:?}")));
        }
        let strategies = strategy_names();
        if let Some(bad) = self
            .quotient_strategies
            .iter()
            .find(|s| !strategies.contains(&s.as_str()))
        {
            return Err(Malformed(format!(
                "unknown quotient strategy {bad:?}; expected one of {strategies:?}"
            )));
        }
        Ok(CertifyConfig {
            degree_cap: self.degree_cap,
            index_cap: self.index_cap,
            cases: self.cases.clone(),
            quotient_strategies: self.quotient_strategies.clone(),
            framing: !self.no_framing,
            ..CertifyConfig::default()
        })
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Bad user input; reported with exit code 2.
#[derive(Debug)]
struct Malformed(String);

impl std::fmt::Display for Malformed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Malformed {}

fn malformed(e: impl std::fmt::Display) -> anyhow::Error {
    Malformed(e.to_string()).into()
}

#[derive(Serialize)]
struct ScanReport<'a> {
    version: &'static str,
    word: String,
    window: i64,
    summary: Vec<(String, usize)>,
    certificates: &'a [Certificate],
}

#[derive(Serialize)]
struct Verdict {
    version: &'static str,
    word: String,
    mu: i64,
    lambda: i64,
    valid: bool,
}

/// Writes to a sibling temporary file and renames it into place.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".tmp");
            let tmp = PathBuf::from(tmp);
            fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
            fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
        }
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn json(value: &impl Serialize) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

fn csv_bytes(certs: &[Certificate]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(Certificate::CSV_HEADER)?;
    for c in certs {
        w.write_record(c.csv_record())?;
    }
    Ok(w.into_inner()?)
}

fn parse_word(text: &str) -> Result<TwistWord> {
    TwistWord::parse(text).map_err(|e| malformed(format!("word {text:?}: {e}")))
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| malformed(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Certify {
            word,
            mu,
            lambda,
            search,
            output,
        } => {
            let w = parse_word(&word)?;
            let s = Slope::new(mu, lambda).map_err(malformed)?;
            let config = search.config()?;
            let cert = certify(&w, s, &config);
            let bytes = match output.format {
                Format::Json => json(&cert)?,
                Format::Csv => csv_bytes(std::slice::from_ref(&cert))?,
            };
            emit(output.out.as_deref(), &bytes)
        }
        Command::Scan {
            word,
            window,
            search,
            output,
        } => {
            let w = parse_word(&word)?;
            let config = search.config()?;
            let certs = scan(&w, window, &config).map_err(malformed)?;
            let bytes = match output.format {
                Format::Json => json(&ScanReport {
                    version: CERTIFICATE_VERSION,
                    word: w.to_string(),
                    window,
                    summary: status_summary(&certs)
                        .into_iter()
                        .map(|(st, n)| (st.to_string(), n))
                        .collect(),
                    certificates: &certs,
                })?,
                Format::Csv => csv_bytes(&certs)?,
            };
            for (st, n) in status_summary(&certs) {
                eprintln!("{st:>17}: {n}");
            }
            emit(output.out.as_deref(), &bytes)
        }
        Command::Verify { input, out } => {
            let text = read_input(input.as_deref())?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(malformed)?;
            // A scan report carries its certificates in an array.
            let single = value.get("certificates").is_none();
            let certs: Vec<Certificate> = match value.get("certificates") {
                Some(list) => serde_json::from_value(list.clone()).map_err(malformed)?,
                None => vec![serde_json::from_value(value).map_err(malformed)?],
            };
            let mut verdicts = Vec::with_capacity(certs.len());
            for c in &certs {
                verdicts.push(Verdict {
                    version: CERTIFICATE_VERSION,
                    word: c.word.clone(),
                    mu: c.slope.mu(),
                    lambda: c.slope.lambda(),
                    valid: verify_certificate(c).map_err(malformed)?,
                });
            }
            let bytes = if single { json(&verdicts[0])? } else { json(&verdicts)? };
            emit(out.as_deref(), &bytes)
        }
        Command::Quotient {
            orders,
            degree_cap,
            quotient_strategies,
            out,
        } => {
            let &[p, q, r] = orders.as_slice() else {
                return Err(malformed(format!("--orders takes three values, got {}", orders.len())));
            };
            let shape = QuotientShape::triangle(p, q, r).map_err(malformed)?;
            let strategies = if quotient_strategies.is_empty() {
                fibercover::quotient::strategy::quotient_strategies()
            } else {
                select_strategies(&quotient_strategies).map_err(malformed)?
            };
            let budget = QuotientBudget {
                degree_cap,
                ..QuotientBudget::default()
            };
            let result = match solve_shape(&shape, &budget, &strategies) {
                Ok(w) => serde_json::json!({ "version": CERTIFICATE_VERSION, "found": true, "witness": w }),
                Err(e) => {
                    serde_json::json!({ "version": CERTIFICATE_VERSION, "found": false, "reason": e.to_string() })
                }
            };
            emit(out.as_deref(), &json(&result)?)
        }
        Command::Snf { matrix, input, out } => {
            let text = match matrix {
                Some(m) => m,
                None => read_input(input.as_deref())?,
            };
            let rows: Vec<Vec<i64>> = serde_json::from_str(&text).map_err(malformed)?;
            let m = IntMatrix::from_rows(&rows).map_err(malformed)?;
            let snf = smith_normal_form(&m);
            let result = serde_json::json!({
                "version": CERTIFICATE_VERSION,
                "invariant_factors": snf.invariant_factors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                "rank": snf.rank,
                "free_rank": m.cols() - snf.rank,
                "torsion": snf.torsion().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            });
            emit(out.as_deref(), &json(&result)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Malformed>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
