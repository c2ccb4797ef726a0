//! Command-line front end.
//!
//! Set and inequality arguments are file paths, or `catalog:<name>` for a
//! built-in entry. Exit status 0 means success, 1 a usage or input error,
//! 2 a failed verification.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::bellgen::{build_inequality, optimal_strategy, BellInequality};
use crate::catalog;
use crate::extend::{lift_method1, method2, Companion, Position};
use crate::formats::{fraction, read_bell, read_pvs, write_bell, write_pvs, FormatError};
use crate::gyni::{gyni_inequality, gyni_vectors, tightness_certificate, CongruenceEngine, StrategyString};
use crate::nspoly::{is_tight_with_seed, ns_maximum, NsError, RankMethod, DEFAULT_SEED};
use crate::pvset::{search_upbs, ProductVectorSet, DEFAULT_NODE_BUDGET};
use crate::quantum::{
    bell_operator_spectrum, entanglement_check, epsilon_global, epsilon_prime, upb_state, witness_box,
    witness_expectation, BasisRealization, DEFAULT_RESTARTS,
};
use crate::rational::{parse_rational, to_f64, Rational};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn status(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 1,
            CliError::Verification(_) => 2,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::BoundMismatch { .. } => CliError::Verification(e.to_string()),
            _ => input(e),
        }
    }
}

impl From<NsError> for CliError {
    fn from(e: NsError) -> Self {
        match e {
            NsError::VerificationFailed(_) => CliError::Verification(e.to_string()),
            _ => input(e),
        }
    }
}

/// Exit status with the text destined for stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Parser, Debug)]
#[command(name = "upbell", version, about = "Bell inequalities from orthogonal product-vector sets")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Seed for randomized steps.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Lift,
    M2,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Front,
    Back,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a set as full basis, completable, UPB or only UPB-extendible.
    Classify {
        pvs: String,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        /// Exit with status 2 unless the class matches.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Build the Bell inequality of a set.
    Build {
        pvs: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Comma-separated weights in (0, 1], one per vector.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<String>>,
    },
    /// Classical bound and an optimal deterministic strategy.
    Cbound {
        bell: String,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Largest eigenvalue of the Bell operator in a real qubit realization.
    Qbound {
        bell: String,
        /// Basis angles shared by all parties, e.g. `0,pi/4,3pi/8`.
        #[arg(long, value_delimiter = ',')]
        angles: Option<Vec<String>>,
        /// Draw a random admissible realization from the seed.
        #[arg(long)]
        random: bool,
    },
    /// Exact maximum over the no-signalling polytope.
    Nsmax {
        bell: String,
        #[arg(long)]
        expect: Option<String>,
        /// Also print the nonzero entries of an optimal box.
        #[arg(long = "box")]
        show_box: bool,
    },
    /// Decide whether the inequality defines a facet of the local polytope.
    Tight {
        bell: String,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Guess-your-neighbour's-input vectors, inequality or certificate.
    Gyni {
        n: usize,
        #[arg(long, group = "what")]
        vectors: bool,
        #[arg(long, group = "what")]
        bell: bool,
        #[arg(long, group = "what")]
        certify: bool,
        /// With --certify, print the certificate of one strategy string.
        #[arg(long, requires = "certify")]
        strategy: Option<String>,
    },
    /// Extend a set to one more party.
    Extend {
        pvs: String,
        #[arg(long, value_enum)]
        method: Method,
        /// Party whose bases index the new party (m2), counted from 1.
        #[arg(long)]
        party: Option<usize>,
        /// Companion set for lift: a .pvs path, catalog:<name> or `fullbasis`.
        #[arg(long, default_value = "fullbasis")]
        companion: String,
        /// Where m2 places the new party.
        #[arg(long, value_enum, default_value_t = Side::Front)]
        position: Side,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the inequality of the result.
        #[arg(long)]
        bell: Option<PathBuf>,
    },
    /// Witness-induced no-signalling box and its Bell value.
    Witness {
        pvs: String,
        /// Defaults to the minimum over products of the set's local vectors.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, value_delimiter = ',')]
        angles: Option<Vec<String>>,
    },
    /// The bound entangled state of a UPB and its partial transposes.
    State {
        pvs: String,
        #[arg(long, value_delimiter = ',')]
        angles: Option<Vec<String>>,
    },
    /// Built-in sets and inequalities.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Enumerate UPBs of a given size up to symmetry.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        mmax: usize,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        /// Stop after this many classes.
        #[arg(long)]
        limit: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    List,
    Get {
        name: String,
        #[arg(long, group = "as")]
        pvs: bool,
        #[arg(long, group = "as")]
        bell: bool,
    },
}

/// Parses arguments (program name first) and runs the command.
pub fn run<I, T>(args: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let status = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if status == 0 {
                CommandResult { status, stdout: text, stderr: String::new() }
            } else {
                CommandResult { status, stdout: String::new(), stderr: text }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> CommandResult {
    let mut out = Report::new(cli.format);
    match dispatch(cli, &mut out) {
        Ok(()) => CommandResult {
            status: 0,
            stdout: out.finish(),
            stderr: String::new(),
        },
        Err(e) => CommandResult {
            status: e.status(),
            stdout: out.finish(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Text lines, or `key=value` lines in machine mode.
struct Report {
    format: Format,
    buf: String,
}

impl Report {
    fn new(format: Format) -> Self {
        Self {
            format,
            buf: String::new(),
        }
    }

    fn machine(&self) -> bool {
        self.format == Format::Machine
    }

    fn text(&mut self, line: impl AsRef<str>) {
        if !self.machine() {
            self.buf.push_str(line.as_ref());
            self.buf.push('\n');
        }
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        if self.machine() {
            let _ = writeln!(self.buf, "{key}={value}");
        }
    }

    fn raw(&mut self, block: &str) {
        self.buf.push_str(block);
    }

    fn finish(self) -> String {
        self.buf
    }
}

fn load_pvs(arg: &str) -> Result<ProductVectorSet, CliError> {
    if let Some(name) = arg.strip_prefix("catalog:") {
        return Ok(catalog::get(name).map_err(input)?.set);
    }
    let text = std::fs::read_to_string(arg).map_err(|e| input(format!("{arg}: {e}")))?;
    Ok(read_pvs(&text)?)
}

fn load_bell(arg: &str) -> Result<BellInequality, CliError> {
    if let Some(name) = arg.strip_prefix("catalog:") {
        return Ok(catalog::get(name).map_err(input)?.inequality);
    }
    let text = std::fs::read_to_string(arg).map_err(|e| input(format!("{arg}: {e}")))?;
    Ok(read_bell(&text)?)
}

fn save(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn rational_arg(s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| CliError::Usage(e.to_string()))
}

/// Radians as a number, or multiples of pi such as `pi/4` and `3pi/8`.
pub fn parse_angle(s: &str) -> Result<f64, CliError> {
    let bad = || CliError::Usage(format!("bad angle {s:?}"));
    let t = s.trim().to_ascii_lowercase();
    if let Some(pos) = t.find("pi") {
        let coef = match &t[..pos] {
            "" => 1.0,
            "-" => -1.0,
            c => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        };
        let rest = &t[pos + 2..];
        let den = if rest.is_empty() {
            1.0
        } else {
            rest.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?
        };
        Ok(coef * std::f64::consts::PI / den)
    } else {
        t.parse::<f64>().map_err(|_| bad())
    }
}

fn realization(angles: &Option<Vec<String>>, bases: &[usize]) -> Result<BasisRealization, CliError> {
    match angles {
        None => Ok(BasisRealization::default_for(bases)),
        Some(list) => {
            let a = list.iter().map(|s| parse_angle(s)).collect::<Result<Vec<_>, _>>()?;
            BasisRealization::uniform(bases.len(), &a).map_err(input)
        }
    }
}

fn expect_eq(what: &str, found: &str, expected: &Option<String>) -> Result<(), CliError> {
    match expected {
        Some(e) if !e.eq_ignore_ascii_case(found) => Err(CliError::Verification(format!(
            "{what} is {found}, expected {e}"
        ))),
        _ => Ok(()),
    }
}

fn dispatch(cli: &Cli, out: &mut Report) -> Result<(), CliError> {
    match &cli.command {
        Command::Classify { pvs, budget, expect } => {
            let set = load_pvs(pvs)?;
            let c = set.classify_with_budget(*budget).map_err(input)?;
            out.text(c.kind.as_str());
            out.kv("kind", c.kind);
            out.kv("vectors", set.len());
            out.kv("dimension", set.dimension());
            if let Some(w) = &c.witness_extension {
                out.text(format!("orthogonal product vector: {}", w.to_symbols()));
                out.kv("extension", w.to_symbols());
            }
            if let Some(extra) = &c.completion {
                let words: Vec<String> = extra.iter().map(|v| v.to_symbols()).collect();
                out.text(format!("completion: {}", words.join(" ")));
                out.kv("completion", words.join(","));
            }
            expect_eq("class", c.kind.as_str(), expect)
        }
        Command::Build { pvs, output, weights } => {
            let set = load_pvs(pvs)?;
            let w = weights
                .as_ref()
                .map(|ws| ws.iter().map(|s| rational_arg(s)).collect::<Result<Vec<_>, _>>())
                .transpose()?;
            let b = build_inequality(&set, w.as_deref()).map_err(input)?;
            if let Some(path) = output {
                save(path, &write_bell(&b))?;
            }
            out.text(b.to_string());
            if out.machine() {
                out.raw(&write_bell(&b));
            }
            Ok(())
        }
        Command::Cbound { bell, expect } => {
            let b = load_bell(bell)?;
            let s = optimal_strategy(&b);
            let tables: Vec<String> = s
                .tables
                .iter()
                .map(|t| t.iter().map(|o| o.to_string()).collect())
                .collect();
            out.text(crate::rational::format_rational(&b.classical_bound));
            out.text(format!("optimal strategy (outcome per setting): {}", tables.join(" ")));
            out.kv("bound", fraction(&b.classical_bound));
            out.kv("strategy", tables.join(","));
            if let Some(e) = expect {
                if rational_arg(e)? != b.classical_bound {
                    return Err(CliError::Verification(format!(
                        "classical bound is {}, expected {e}",
                        fraction(&b.classical_bound)
                    )));
                }
            }
            Ok(())
        }
        Command::Qbound { bell, angles, random } => {
            let b = load_bell(bell)?;
            let real = if *random {
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
                BasisRealization::random(b.scenario.settings(), &mut rng)
            } else {
                realization(angles, b.scenario.settings())?
            };
            let ev = bell_operator_spectrum(&b, &real).map_err(input)?;
            let max = ev.first().copied().unwrap_or(0.0);
            out.text(format!("{max:.12}"));
            out.text(format!(
                "classical bound {}",
                crate::rational::format_rational(&b.classical_bound)
            ));
            out.kv("max_eigenvalue", format!("{max:.15e}"));
            out.kv("classical_bound", fraction(&b.classical_bound));
            let spec: Vec<String> = ev.iter().map(|v| format!("{v:.12}")).collect();
            out.kv("spectrum", spec.join(","));
            Ok(())
        }
        Command::Nsmax { bell, expect, show_box } => {
            let b = load_bell(bell)?;
            let opt = ns_maximum(&b)?;
            out.text(crate::rational::format_rational(&opt.value));
            out.text(format!(
                "classical bound {}",
                crate::rational::format_rational(&b.classical_bound)
            ));
            out.kv("value", fraction(&opt.value));
            out.kv("classical_bound", fraction(&b.classical_bound));
            out.kv("pivots", opt.pivots);
            if *show_box {
                let sc = &b.scenario;
                let per = sc.outcome_combinations();
                for (k, v) in opt.optimal_box.values.iter().enumerate() {
                    if num_traits::Zero::is_zero(v) {
                        continue;
                    }
                    let a: String = sc.outcome_list(k % per).iter().map(|d| d.to_string()).collect();
                    let x: String = sc.setting_list(k / per).iter().map(|d| d.to_string()).collect();
                    out.text(format!("p({a}|{x}) = {}", crate::rational::format_rational(v)));
                    out.kv(&format!("p({a}|{x})"), fraction(v));
                }
            }
            if let Some(e) = expect {
                if rational_arg(e)? != opt.value {
                    return Err(CliError::Verification(format!(
                        "no-signalling maximum is {}, expected {e}",
                        fraction(&opt.value)
                    )));
                }
            }
            Ok(())
        }
        Command::Tight { bell, expect } => {
            let b = load_bell(bell)?;
            let c = is_tight_with_seed(&b, cli.seed)?;
            let method = match c.method {
                RankMethod::Modular { prime } => format!("modular rank mod {prime}"),
                RankMethod::Exact => "exact rank".to_string(),
            };
            out.text(c.verdict.to_string());
            out.text(format!(
                "affine dimension {} of {}; {} of {} strategies saturate; {method}",
                c.affine_dimension,
                c.polytope_dimension,
                c.saturating.len(),
                c.strategy_count
            ));
            out.kv("verdict", c.verdict);
            out.kv("affine_dimension", c.affine_dimension);
            out.kv("polytope_dimension", c.polytope_dimension);
            out.kv("saturating", c.saturating.len());
            out.kv("strategies", c.strategy_count);
            out.kv("method", method);
            expect_eq("verdict", &c.verdict.to_string(), expect)
        }
        Command::Gyni {
            n,
            vectors,
            bell: _,
            certify,
            strategy,
        } => {
            if *certify {
                if let Some(s) = strategy {
                    let s = StrategyString::parse(s).map_err(|e| CliError::Usage(e.to_string()))?;
                    if s.len() != *n {
                        return Err(CliError::Usage(format!("strategy {s} has {} symbols, n = {n}", s.len())));
                    }
                    let engine = CongruenceEngine::new(*n).map_err(input)?;
                    let cert = engine.certify(&s).map_err(input)?;
                    if !cert.verify() {
                        return Err(CliError::Verification(format!("certificate for {s} does not verify")));
                    }
                    out.text(format!("{s} ≡ {}·{} modulo saturating strategies", crate::rational::format_rational(&cert.residual), StrategyString::ones(*n)));
                    out.raw(&cert.dump());
                    return Ok(());
                }
                let t = tightness_certificate(*n).map_err(|e| match e {
                    crate::gyni::GyniError::CertificateFailure(_) => CliError::Verification(e.to_string()),
                    _ => input(e),
                })?;
                out.text(format!(
                    "Tight: {} non-saturating strategies certified, {} saturating of {}",
                    t.certified, t.saturating, t.strategies
                ));
                out.text(format!("affine dimension {} of {}", t.affine_dimension, t.polytope_dimension));
                out.kv("verdict", "Tight");
                out.kv("certified", t.certified);
                out.kv("saturating", t.saturating);
                out.kv("strategies", t.strategies);
                out.kv("affine_dimension", t.affine_dimension);
                out.kv("polytope_dimension", t.polytope_dimension);
                return Ok(());
            }
            if *vectors {
                let s = gyni_vectors(*n).map_err(input)?;
                out.text(s.to_symbols().join(" "));
                if out.machine() {
                    out.raw(&write_pvs(&s));
                }
            } else {
                let b = gyni_inequality(*n).map_err(input)?;
                out.text(b.to_string());
                if out.machine() {
                    out.raw(&write_bell(&b));
                }
            }
            Ok(())
        }
        Command::Extend {
            pvs,
            method,
            party,
            companion,
            position,
            output,
            bell,
        } => {
            let set = load_pvs(pvs)?;
            let result = match method {
                Method::Lift => {
                    let c = if companion == "fullbasis" {
                        Companion::FullBasis
                    } else {
                        Companion::Set(load_pvs(companion)?)
                    };
                    lift_method1(&set, &c).map_err(input)?
                }
                Method::M2 => {
                    let p = party.ok_or_else(|| CliError::Usage("--party is required for m2".into()))?;
                    if p == 0 {
                        return Err(CliError::Usage("parties are counted from 1".into()));
                    }
                    let pos = match position {
                        Side::Front => Position::Front,
                        Side::Back => Position::Back,
                    };
                    method2(&set, p - 1, pos).map_err(input)?
                }
            };
            if let Some(path) = output {
                save(path, &write_pvs(&result))?;
            }
            if let Some(path) = bell {
                let b = build_inequality(&result, None).map_err(input)?;
                save(path, &write_bell(&b))?;
            }
            out.text(result.to_symbols().join(" "));
            if out.machine() {
                out.raw(&write_pvs(&result));
            }
            Ok(())
        }
        Command::Witness { pvs, eps, angles } => {
            let set = load_pvs(pvs)?;
            let real = realization(angles, set.bases_per_party())?;
            let eps_prime = epsilon_prime(&set, &real).map_err(input)?;
            let eps_value = match eps {
                Some(e) => to_f64(&rational_arg(e)?),
                None => eps_prime,
            };
            let global = epsilon_global(&set, &real, DEFAULT_RESTARTS, cli.seed).map_err(input)?;
            let (_, rep) = witness_box(&set, eps_value, &real).map_err(input)?;
            let entangled = entanglement_check(&set, eps_value, &real).map_err(input)?;
            let trace = witness_expectation(&set, eps_value, &real).map_err(input)?;
            out.text(format!("epsilon {eps_value:.12} (local minimum {eps_prime:.12}, global estimate {:.12})", global.best));
            out.text(format!("Bell value {:.12} (closed form {:.12})", rep.value, rep.closed_form));
            out.text(format!(
                "box nonnegative {} normalized {} no-signalling {}",
                rep.nonnegative, rep.normalized, rep.no_signalling
            ));
            out.text(format!("Tr(W rho) = {trace:.3e}, entanglement detected {entangled}"));
            out.kv("epsilon", format!("{eps_value:.15e}"));
            out.kv("epsilon_prime", format!("{eps_prime:.15e}"));
            out.kv("epsilon_global", format!("{:.15e}", global.best));
            out.kv("epsilon_global_worst", format!("{:.15e}", global.worst));
            out.kv("value", format!("{:.15e}", rep.value));
            out.kv("closed_form", format!("{:.15e}", rep.closed_form));
            out.kv("valid", rep.nonnegative && rep.normalized && rep.no_signalling);
            out.kv("witness_trace", format!("{trace:.15e}"));
            out.kv("entangled", entangled);
            if !(rep.nonnegative && rep.normalized && rep.no_signalling) {
                return Err(CliError::Verification("witness box is not a valid no-signalling box".into()));
            }
            Ok(())
        }
        Command::State { pvs, angles } => {
            let set = load_pvs(pvs)?;
            let real = realization(angles, set.bases_per_party())?;
            let st = upb_state(&set, &real).map_err(input)?;
            out.text(format!(
                "trace {:.12}, rank {}, min eigenvalue {:.3e}",
                st.trace, st.rank, st.min_eigenvalue
            ));
            out.kv("trace", format!("{:.15e}", st.trace));
            out.kv("rank", st.rank);
            out.kv("min_eigenvalue", format!("{:.15e}", st.min_eigenvalue));
            for e in &st.ppt {
                let parties: Vec<String> = e.transposed.iter().map(|p| (p + 1).to_string()).collect();
                out.text(format!(
                    "partial transpose on {{{}}}: min eigenvalue {:.3e}",
                    parties.join(","),
                    e.min_eigenvalue
                ));
                out.kv(&format!("ppt[{}]", parties.join(",")), format!("{:.15e}", e.min_eigenvalue));
            }
            out.text(format!("PPT {}", st.is_ppt()));
            out.kv("ppt", st.is_ppt());
            if !st.is_ppt() {
                return Err(CliError::Verification("state has a negative partial transpose".into()));
            }
            Ok(())
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                for name in catalog::list() {
                    let e = catalog::get(name).map_err(input)?;
                    out.text(format!("{name:<14}{}", e.note));
                    out.kv("name", name);
                }
                Ok(())
            }
            CatalogAction::Get { name, pvs, bell } => {
                let e = catalog::get(name).map_err(input)?;
                if *pvs {
                    out.raw(&write_pvs(&e.set));
                } else if *bell {
                    out.raw(&write_bell(&e.inequality));
                } else {
                    out.text(format!("{} — {}", e.name, e.note));
                    out.text(format!("vectors: {}", e.set.to_symbols().join(" ")));
                    out.text(format!("class: {}", e.kind));
                    out.text(format!("inequality: {}", e.inequality));
                    out.kv("name", e.name);
                    out.kv("kind", e.kind);
                    out.kv("vectors", e.set.to_symbols().join(","));
                    out.kv("bound", fraction(&e.inequality.classical_bound));
                    if let Some(ns) = &e.ns_maximum {
                        out.text(format!("no-signalling maximum: {}", crate::rational::format_rational(ns)));
                        out.kv("ns_maximum", fraction(ns));
                    }
                    if let Some(v) = e.verdict {
                        out.text(format!("verdict: {v}"));
                        out.kv("verdict", v);
                    }
                }
                Ok(())
            }
        },
        Command::Search {
            n,
            size,
            mmax,
            budget,
            limit,
        } => {
            let search = search_upbs(*n, *mmax, *size, *budget).map_err(input)?;
            let mut count = 0;
            for found in search.take(limit.unwrap_or(usize::MAX)) {
                let set = found.map_err(input)?;
                count += 1;
                out.text(set.to_symbols().join(" "));
                out.kv("upb", set.to_symbols().join(","));
            }
            out.text(format!("{count} classes"));
            out.kv("count", count);
            Ok(())
        }
    }
}
