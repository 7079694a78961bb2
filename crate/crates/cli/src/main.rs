use std::fmt::{self, Display, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;

use rigidity_core::bounds::{
    escape_bound_with, TowerArith, TowerInt, VarietyProfile, DEFAULT_DIGIT_BUDGET,
};
use rigidity_core::groups::{AmbientGroup, BallLimits, RepresentationSpec};
use rigidity_core::rigidity::{
    compare_spectra, recover_for, rigidity_verdict, ComparisonReport, ConjugacyCertificate, Mode,
    RadiusChoice, RigidityError, Verdict, DEFAULT_CAP,
};
use rigidity_core::spectra::{spectrum_table, Invariant, GAP_TOL};
use rigidity_core::variety::{
    escape_tower, escape_witness, within_escape_bound, Variety, VarietyError,
};

const DEFAULT_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "rigidity", version, about = "Escape bounds, spectra and finite-step rigidity tests")]
struct Cli {
    /// Print the report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Abort ball enumeration beyond this many elements.
    #[arg(long, global = true, default_value_t = BallLimits::default().max_entries)]
    max_entries: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the escape bound of a variety profile.
    Bound {
        #[arg(long)]
        irr: u64,
        #[arg(long)]
        mdeg: u64,
        #[arg(long)]
        dim: u64,
        /// Largest decimal length materialized before switching to tower form.
        #[arg(long, default_value_t = DEFAULT_DIGIT_BUDGET)]
        digits_budget: u64,
    },
    /// Search for a short word escaping a subvariety and build the descent tower.
    Escape {
        /// Ambient group tag such as `sl2` or `sl3`.
        #[arg(long)]
        ambient: String,
        /// Ideal file: one polynomial per line in the variables `x_i_j`.
        #[arg(long)]
        variety: PathBuf,
        /// Representation file for the generating set.
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        horizon: usize,
    },
    /// Tabulate an invariant over a word ball.
    Spectrum {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        invariant: Invariant,
        #[arg(long)]
        radius: usize,
        /// Smallest Jordan gap accepted as loxodromic.
        #[arg(long, default_value_t = GAP_TOL)]
        tol: f64,
    },
    /// Compare an invariant of two representations over a shared word ball.
    Compare {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        invariant: Invariant,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Look for an element conjugating one representation to the other.
    Conjugate {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value = "exact")]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Compare, then recover a conjugator, and state a verdict.
    #[command(group(ArgGroup::new("extent").required(true).args(["profile", "radius"])))]
    Verdict {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        invariant: Invariant,
        /// Variety profile `I,D,N`; the radius becomes min(bound, cap).
        #[arg(long)]
        profile: Option<ProfileArg>,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

#[derive(Args)]
struct Pair {
    #[arg(long)]
    rep1: PathBuf,
    #[arg(long)]
    rep2: PathBuf,
}

#[derive(Clone, Copy, Debug)]
struct ProfileArg(VarietyProfile);

impl FromStr for ProfileArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<u64> = s
            .split(',')
            .map(|p| p.trim().parse::<u64>().map_err(|e| format!("'{p}': {e}")))
            .collect::<Result<_, _>>()?;
        let [irr, mdeg, d] = parts[..] else {
            return Err(format!("expected I,D,N, got '{s}'"));
        };
        VarietyProfile::exact(irr, mdeg, d).map(ProfileArg).map_err(|e| e.to_string())
    }
}

/// Failure caused by the invocation or its input files.
#[derive(Debug)]
struct InputError(String);

impl Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

enum Status {
    Completed,
    Inconclusive,
}

struct Outcome {
    text: String,
    json: serde_json::Value,
    status: Status,
}

/// Ordered `key: value` lines.
#[derive(Default)]
struct Report(String);

impl Report {
    fn field(&mut self, key: &str, value: impl Display) -> &mut Self {
        let _ = writeln!(self.0, "{key}: {value}");
        self
    }

    fn line(&mut self, text: impl Display) -> &mut Self {
        let _ = writeln!(self.0, "{text}");
        self
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))
}

fn read_rep(path: &Path) -> Result<RepresentationSpec> {
    let text = read_text(path)?;
    RepresentationSpec::from_json(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn rigidity_err(e: RigidityError) -> anyhow::Error {
    match e {
        RigidityError::Domain(msg) => input_err(msg),
        other => other.into(),
    }
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.12}")).collect();
    format!("[{}]", parts.join(", "))
}

fn bound(irr: u64, mdeg: u64, dim: u64, budget: u64) -> Result<Outcome> {
    let profile = VarietyProfile::exact(irr, mdeg, dim).map_err(|e| input_err(e.to_string()))?;
    let ar = TowerArith::new(budget);
    let m = escape_bound_with(&ar, &profile);
    let exact = m.as_biguint().map(ToString::to_string);
    let mut r = Report::default();
    r.field("profile", profile);
    r.field("mode", if exact.is_some() { "exact" } else { "symbolic" });
    match &exact {
        Some(v) => r.field("bound", v),
        None => r.field("bound", format!("{m:#}")),
    };
    r.field("log10_estimate", m.log10_estimate());
    let json = serde_json::json!({
        "profile": profile,
        "mode": if exact.is_some() { "exact" } else { "symbolic" },
        "bound": exact.clone().unwrap_or_else(|| m.to_string()),
        "log10_estimate": m.log10_estimate(),
    });
    Ok(Outcome { text: r.0, json, status: Status::Completed })
}

#[derive(Serialize)]
struct EscapeJson<'a> {
    ambient: String,
    variety: Vec<String>,
    profile: &'a rigidity_core::variety::ProfileReport,
    escape_bound: Option<String>,
    horizon: usize,
    witness: Option<&'a rigidity_core::variety::EscapeWitness>,
    within_bound: Option<bool>,
    tower: Option<&'a rigidity_core::variety::TowerReport>,
    tower_error: Option<String>,
}

fn escape(ambient: &str, variety: &Path, group: &Path, horizon: usize, limits: BallLimits) -> Result<Outcome> {
    let ambient = Arc::new(AmbientGroup::from_str(ambient).map_err(input_err)?);
    let text = read_text(variety)?;
    let v = Variety::parse(ambient.clone(), &text)
        .map_err(|e| input_err(format!("{}: {e}", variety.display())))?;
    let rep = read_rep(group)?;
    if *rep.ambient != *ambient {
        return Err(input_err(format!(
            "group lives in {} but the variety in {}",
            rep.ambient, ambient
        )));
    }
    let alphabet = rep.alphabet()?;
    let profile = v.profile_of()?;
    let start = profile.summary.profile().copied();
    let bound: Option<TowerInt> = start.as_ref().map(rigidity_core::bounds::escape_bound);
    let witness = escape_witness(&v, &alphabet, horizon, limits)?;
    let within_bound = match (&witness, &start) {
        (Some(w), Some(p)) => Some(within_escape_bound(w.length, p)?),
        _ => None,
    };
    let (tower, tower_error) = match escape_tower(&v, &alphabet) {
        Ok(t) => (Some(t), None),
        Err(e @ (VarietyError::EscapeStalled { .. } | VarietyError::Domain(_))) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };

    let mut r = Report::default();
    r.field("ambient", &ambient);
    let gens: Vec<String> = v.ideal().generators().iter().map(ToString::to_string).collect();
    r.field("variety", format!("[{}]", gens.join(", ")));
    match &start {
        Some(p) => r.field("profile", p),
        None => r.field("profile", "EMPTY"),
    };
    if let Some(c) = &profile.components {
        r.field("components", c.len());
    }
    if let Some(b) = &bound {
        r.field("escape_bound", b);
    }
    r.field("horizon", horizon);
    match &witness {
        Some(w) => {
            r.field("witness", if w.word.is_empty() { "e" } else { &w.word });
            r.field("witness_length", w.length);
            r.field("witness_matrix", &w.matrix);
        }
        None => {
            r.field("witness", "NOT_FOUND");
        }
    }
    if let Some(b) = within_bound {
        r.field("within_bound", b);
    }
    match (&tower, &tower_error) {
        (Some(t), _) => {
            r.field("tower_steps", t.length());
            for (i, s) in t.steps.iter().enumerate() {
                let p = match s.profile.summary.profile() {
                    Some(p) => p.to_string(),
                    None => "EMPTY".into(),
                };
                r.line(format_args!(
                    "step {}: generator={} reason={} profile={p}",
                    i + 1,
                    s.generator,
                    serde_json::to_value(s.reason).expect("reason").as_str().unwrap_or("?"),
                ));
            }
            r.field("tower_final", &t.final_ideal);
            r.field("tower_within_irr_bound", t.within_irr_bound);
            r.field("tower_inequalities_hold", t.inequalities_hold);
            match t.bound_decrement {
                Some(b) => r.field("tower_bound_decrement", b),
                None => r.field("tower_bound_decrement", "n/a"),
            };
        }
        (None, Some(e)) => {
            r.field("tower", e);
        }
        (None, None) => {}
    }
    let json = to_json(&EscapeJson {
        ambient: ambient.to_string(),
        variety: gens,
        profile: &profile,
        escape_bound: bound.as_ref().map(ToString::to_string),
        horizon,
        witness: witness.as_ref(),
        within_bound,
        tower: tower.as_ref(),
        tower_error,
    });
    let status = if witness.is_some() { Status::Completed } else { Status::Inconclusive };
    Ok(Outcome { text: r.0, json, status })
}

fn spectrum(rep: &Path, inv: Invariant, radius: usize, tol: f64, limits: BallLimits) -> Result<Outcome> {
    let spec = read_rep(rep)?;
    if inv.needs_affine() && !spec.is_affine() {
        return Err(input_err(format!("{inv} needs an affine representation")));
    }
    let table = spectrum_table(&spec, inv, radius, limits)?;
    let mut r = Report::default();
    r.field("invariant", inv);
    r.field("radius", radius);
    r.field("rows", table.rows.len());
    if inv == Invariant::Jordan {
        match table.min_gap() {
            Some(g) => {
                r.field("min_gap", format!("{g:.12}"));
                r.field("uniform_gap_above_tol", g > tol);
            }
            None => {
                r.field("min_gap", "n/a");
            }
        }
    }
    for row in &table.rows {
        let word = if row.word.is_empty() { "e" } else { &row.word };
        match (&row.values, &row.note) {
            (Some(v), _) => r.line(format_args!("{word}\t{}\t{}", row.length, fmt_vec(v))),
            (None, Some(n)) => r.line(format_args!("{word}\t{}\t({n})", row.length)),
            (None, None) => r.line(format_args!("{word}\t{}\t-", row.length)),
        };
    }
    Ok(Outcome { text: r.0, json: to_json(&table), status: Status::Completed })
}

fn write_comparison(r: &mut Report, c: &ComparisonReport) {
    r.field("invariant", c.invariant);
    r.field("radius", c.radius);
    r.field("spectra", serde_json::to_value(c.verdict).expect("verdict").as_str().unwrap_or("?"));
    r.field("words_compared", c.words_compared);
    r.field("max_discrepancy", format!("{:.3e}", c.max_discrepancy));
    r.field("tolerance", format!("{:.3e}", c.tolerance));
    r.field("all_loxodromic", c.all_loxodromic);
    match &c.separating_word {
        Some(w) => {
            r.field("separating_word", &w.word);
            r.field("separating_length", w.length);
            r.field("value_rep1", fmt_vec(&w.first));
            r.field("value_rep2", fmt_vec(&w.second));
            r.field("difference", format!("{:.3e}", w.difference));
        }
        None => {
            r.field("separating_word", "NONE");
        }
    }
}

fn write_certificate(r: &mut Report, c: Option<&ConjugacyCertificate>) {
    let Some(c) = c else {
        r.field("certificate", "NONE");
        return;
    };
    let kind = serde_json::to_value(c.kind).expect("kind");
    let aut = serde_json::to_value(c.automorphism).expect("automorphism");
    r.field("certificate", kind.as_str().unwrap_or("?"));
    r.field("automorphism", aut.as_str().unwrap_or("?"));
    r.field("mode", c.mode);
    if let Some(m) = &c.exact {
        r.field("witness", m);
    }
    if let Some(m) = &c.numeric {
        let rows: Vec<String> = m.iter().map(|row| fmt_vec(row)).collect();
        r.field("witness", format!("[{}]", rows.join(", ")));
    }
    if let Some(t) = &c.translation {
        r.field("translation", format!("[{}]", t.join(", ")));
    }
    r.field("residual", format!("{:.3e}", c.residual));
}

fn compare(pair: &Pair, inv: Invariant, radius: usize, tol: f64, limits: BallLimits) -> Result<Outcome> {
    let (a, b) = (read_rep(&pair.rep1)?, read_rep(&pair.rep2)?);
    let c = compare_spectra(&a, &b, inv, radius, tol, limits).map_err(rigidity_err)?;
    let mut r = Report::default();
    write_comparison(&mut r, &c);
    Ok(Outcome { text: r.0, json: to_json(&c), status: Status::Completed })
}

fn conjugate(pair: &Pair, mode: Mode, tol: f64) -> Result<Outcome> {
    let (a, b) = (read_rep(&pair.rep1)?, read_rep(&pair.rep2)?);
    let cert = recover_for(&a, &b, mode, tol).map_err(rigidity_err)?;
    let mut r = Report::default();
    r.field("result", if cert.is_some() { "FOUND" } else { "NONE" });
    write_certificate(&mut r, cert.as_ref());
    let json = serde_json::json!({ "result": if cert.is_some() { "FOUND" } else { "NONE" }, "certificate": cert });
    Ok(Outcome { text: r.0, json, status: Status::Completed })
}

fn verdict(
    pair: &Pair,
    inv: Invariant,
    choice: RadiusChoice,
    cap: usize,
    tol: f64,
    limits: BallLimits,
) -> Result<Outcome> {
    let (a, b) = (read_rep(&pair.rep1)?, read_rep(&pair.rep2)?);
    let v = rigidity_verdict(&a, &b, inv, choice, cap, tol, limits).map_err(rigidity_err)?;
    let mut r = Report::default();
    r.field("verdict", v.verdict.name());
    r.field("radius_checked", v.radius_checked);
    if let Some(bound) = &v.radius_bound {
        r.field("radius_bound", bound);
    }
    r.field("capped", v.capped);
    r.field("zariski_dense_asserted", v.hypotheses.zariski_dense_asserted);
    r.field("all_words_loxodromic", v.hypotheses.all_words_loxodromic);
    if let Some(t) = v.hypotheses.translation_norms_vanish {
        r.field("translation_norms_vanish", t);
    }
    write_comparison(&mut r, &v.comparison);
    write_certificate(&mut r, v.recovery.as_ref());
    let status = if v.verdict == Verdict::InconclusiveAtCap { Status::Inconclusive } else { Status::Completed };
    Ok(Outcome { text: r.0, json: to_json(&v), status })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let limits = BallLimits { max_entries: cli.max_entries, ..BallLimits::default() };
    match &cli.command {
        Command::Bound { irr, mdeg, dim, digits_budget } => bound(*irr, *mdeg, *dim, *digits_budget),
        Command::Escape { ambient, variety, group, horizon } => {
            escape(ambient, variety, group, *horizon, limits).context("escape")
        }
        Command::Spectrum { rep, invariant, radius, tol } => spectrum(rep, *invariant, *radius, *tol, limits),
        Command::Compare { pair, invariant, radius, tol } => compare(pair, *invariant, *radius, *tol, limits),
        Command::Conjugate { pair, mode, tol } => conjugate(pair, *mode, *tol),
        Command::Verdict { pair, invariant, profile, radius, cap, tol } => {
            let choice = match (profile, radius) {
                (Some(p), _) => RadiusChoice::Profile(p.0),
                (None, Some(r)) => RadiusChoice::Explicit(*r),
                (None, None) => unreachable!("clap requires one of the two"),
            };
            verdict(pair, *invariant, choice, *cap, *tol, limits)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
            } else {
                print!("{}", out.text);
            }
            match out.status {
                Status::Completed => ExitCode::SUCCESS,
                Status::Inconclusive => ExitCode::from(2),
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<InputError>()) {
                ExitCode::from(3)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
