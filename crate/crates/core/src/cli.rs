//! Command-line front end: configuration loading, dispatch and reports.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{export_structure, AlgebraKind};
use crate::cohomology::{build_extension, closed_form_cocycle, defect_sweep, recursion_checks, solve_cocycles};
use crate::error::{Error, Result};
use crate::lattice::{LatticeVector, NormalFormSpec, QMatrixSpec, QuantumTorus, RootOfUnity};
use crate::scalar::{Formal, GammaScalar, Scalar};
use crate::symmetry::{solve_derivation_space, verify_automorphism, CanonicalAutomorphism, Character};
use crate::verify::{verify_embedding, verify_extension_virasoro_line, verify_extension_virasoro_shape, verify_jacobi, verify_virasoro, with_threads, SweepReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalFormConfig {
    pub d: usize,
    pub z: usize,
    pub orders: Vec<u32>,
}

/// Raw configuration file. Either `d`, `n` and `exps` describe Q directly,
/// or `normal_form` gives it in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exps: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal_form: Option<NormalFormConfig>,
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub radius: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub raw: ConfigFile,
    pub torus: QuantumTorus,
    pub radius: i64,
    pub out: Option<PathBuf>,
    pub threads: usize,
}

impl Config {
    pub fn from_file(raw: ConfigFile) -> Result<Self> {
        let torus = match (&raw.normal_form, &raw.exps) {
            (Some(_), Some(_)) => return Err(Error::config("normal_form", "give exactly one of `exps` and `normal_form`")),
            (None, None) => return Err(Error::config("exps", "give exactly one of `exps` and `normal_form`")),
            (Some(nf), None) => {
                if raw.d.is_some() || raw.n.is_some() {
                    return Err(Error::config("d", "`d` and `n` belong inside `normal_form`"));
                }
                QuantumTorus::from_normal_form(NormalFormSpec::new(nf.d, nf.z, nf.orders.clone())?)
            }
            (None, Some(exps)) => {
                let d = raw.d.ok_or_else(|| Error::config("d", "missing"))?;
                let n = raw.n.ok_or_else(|| Error::config("n", "missing"))?;
                QuantumTorus::new(QMatrixSpec::new(d, n, exps.clone())?)
            }
        };
        let radius = raw.radius.unwrap_or(2);
        if radius < 1 {
            return Err(Error::config("box", "must be at least 1"));
        }
        let threads = raw.threads.unwrap_or(1).max(1);
        Ok(Config {
            torus,
            radius,
            out: raw.out.clone(),
            threads,
            raw,
        })
    }

    /// SHA-256 of the canonical JSON form of the configuration.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.raw).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)?;
    let raw: ConfigFile = serde_json::from_str(&text).map_err(|e| Error::config("config", e.to_string()))?;
    Config::from_file(raw)
}

#[derive(Debug, Parser)]
#[command(name = "qtl", version, about = "Exact checks for Lie algebras attached to rational quantum tori")]
pub struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report (or exported table) here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct BoxArg {
    /// Box radius B; overrides the configuration.
    #[arg(long = "box")]
    pub radius: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgebraArg {
    G,
    Der,
    Ext,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Jacobi identity on all basis triples in the box.
    VerifyJacobi {
        #[command(flatten)]
        b: BoxArg,
        #[arg(long, value_enum, default_value = "all")]
        algebra: AlgebraArg,
    },
    /// g → Der(C_Q) is a bracket-preserving embedding.
    VerifyEmbedding {
        #[command(flatten)]
        b: BoxArg,
    },
    /// Checks θ(λ, χ), its inverse and its square.
    Automorphism {
        #[command(flatten)]
        b: BoxArg,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        lambda: i64,
        /// Exponents c_i with χ(e_i) = ζ_N^{c_i}, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        chi: Vec<i64>,
    },
    /// Truncated solve for the graded derivations of one degree.
    Derivations {
        #[command(flatten)]
        b: BoxArg,
        /// Degree n, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        degree: Vec<i64>,
    },
    /// Truncated solve for 2-cocycles modulo coboundaries.
    CocycleSolve {
        #[command(flatten)]
        b: BoxArg,
    },
    /// Jacobi and bracket-table checks of the central extension.
    ExtensionCheck {
        #[command(flatten)]
        b: BoxArg,
    },
    /// Structure constants of g as JSON.
    ExportStructure {
        #[command(flatten)]
        b: BoxArg,
    },
    /// The Virasoro-type subalgebra and the extension restricted to it.
    VerifyVirasoro {
        #[command(flatten)]
        b: BoxArg,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyJacobi { .. } => "verify-jacobi",
            Command::VerifyEmbedding { .. } => "verify-embedding",
            Command::Automorphism { .. } => "automorphism",
            Command::Derivations { .. } => "derivations",
            Command::CocycleSolve { .. } => "cocycle-solve",
            Command::ExtensionCheck { .. } => "extension-check",
            Command::ExportStructure { .. } => "export-structure",
            Command::VerifyVirasoro { .. } => "verify-virasoro",
        }
    }

    fn radius(&self) -> Option<i64> {
        match self {
            Command::VerifyJacobi { b, .. }
            | Command::VerifyEmbedding { b }
            | Command::Automorphism { b, .. }
            | Command::Derivations { b, .. }
            | Command::CocycleSolve { b }
            | Command::ExtensionCheck { b }
            | Command::ExportStructure { b }
            | Command::VerifyVirasoro { b } => b.radius,
        }
    }
}

/// Outcome of one command. `body` is written verbatim to the output.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub body: String,
}

fn sweep_json(r: &SweepReport) -> Value {
    json!({
        "checked": r.checked,
        "passed": r.passed(),
        "violation_count": r.violation_count,
        "violations": r.violations,
    })
}

fn report(cmd: &str, args: Value, config: &Config, passed: bool, details: Value, witnesses: Vec<String>) -> Outcome {
    let v = json!({
        "command": cmd,
        "args": args,
        "config_hash": config.hash(),
        "passed": passed,
        "counterexamples": witnesses,
        "details": details,
    });
    Outcome {
        passed,
        body: serde_json::to_string_pretty(&v).expect("report serializes") + "\n",
    }
}

fn witnesses<'a>(reports: impl IntoIterator<Item = &'a SweepReport>) -> Vec<String> {
    reports.into_iter().flat_map(|r| r.violations.iter().cloned()).collect()
}

fn lattice_arg(torus: &QuantumTorus, name: &str, coords: &[i64]) -> Result<LatticeVector> {
    if coords.len() != torus.d() {
        return Err(Error::config(name, format!("expected {} comma-separated integers", torus.d())));
    }
    Ok(LatticeVector::new(coords.iter().copied()))
}

/// Runs a command against a loaded configuration.
pub fn execute(command: &Command, config: &Config) -> Result<Outcome> {
    let radius = command.radius().unwrap_or(config.radius);
    if radius < 0 {
        return Err(Error::config("box", "must be non-negative"));
    }
    let parallel = config.threads > 1;
    let torus = &config.torus;
    let name = command.name();
    with_threads(config.threads, || match command {
        Command::VerifyJacobi { algebra, .. } => {
            let kinds: &[AlgebraKind] = match algebra {
                AlgebraArg::G => &[AlgebraKind::G],
                AlgebraArg::Der => &[AlgebraKind::DerQT],
                AlgebraArg::Ext => &[AlgebraKind::Ext],
                AlgebraArg::All => &[AlgebraKind::G, AlgebraKind::DerQT, AlgebraKind::Ext],
            };
            let mut details = serde_json::Map::new();
            let mut reports = Vec::new();
            let mut skipped = Vec::new();
            for &k in kinds {
                if k == AlgebraKind::Ext && torus.normal_form().is_none() {
                    skipped.push(format!("{k}: configuration is not in normal form"));
                    continue;
                }
                let r = verify_jacobi(torus, k, radius, parallel)?;
                details.insert(k.to_string(), sweep_json(&r));
                reports.push(r);
            }
            details.insert("skipped".into(), json!(skipped));
            let passed = reports.iter().all(SweepReport::passed);
            Ok(report(name, json!({"box": radius}), config, passed, Value::Object(details), witnesses(&reports)))
        }
        Command::VerifyEmbedding { .. } => {
            let r = verify_embedding(torus, radius, parallel)?;
            Ok(report(name, json!({"box": radius}), config, r.passed(), sweep_json(&r), witnesses([&r])))
        }
        Command::Automorphism { lambda, chi, .. } => {
            let exps = if chi.is_empty() { vec![0; torus.d()] } else { chi.clone() };
            lattice_arg(torus, "chi", &exps)?;
            let roots: Vec<RootOfUnity> = exps.iter().map(|&c| RootOfUnity::new(torus.n(), c)).collect();
            let theta = CanonicalAutomorphism::new(*lambda, Character::from_roots(&roots))?;
            let inverse = theta.inverse()?;
            let square = theta.then(&theta)?;
            let r = verify_automorphism(torus, &theta, radius)?;
            let ri = verify_automorphism(torus, &inverse, radius)?;
            let rs = verify_automorphism(torus, &square, radius)?;
            let identity = theta.then(&inverse)? == CanonicalAutomorphism::identity(torus.d());
            let passed = r.passed() && ri.passed() && rs.passed() && identity;
            let details = json!({
                "theta": sweep_json(&r),
                "inverse": sweep_json(&ri),
                "square": sweep_json(&rs),
                "inverse_composes_to_identity": identity,
            });
            Ok(report(
                name,
                json!({"box": radius, "lambda": lambda, "chi": exps}),
                config,
                passed,
                details,
                witnesses([&r, &ri, &rs]),
            ))
        }
        Command::Derivations { degree, .. } => {
            let coords = if degree.is_empty() { vec![0; torus.d()] } else { degree.clone() };
            let n = lattice_arg(torus, "degree", &coords)?;
            let space = solve_derivation_space(torus, &n, radius)?;
            let passed = space.matched.is_some() && space.certified;
            let mut w = Vec::new();
            if space.matched.is_none() {
                w.push(format!("inner-box solution space of dimension {} matches no known family", space.dimension));
            }
            Ok(report(
                name,
                json!({"box": radius, "degree": coords}),
                config,
                passed,
                space.to_json(torus),
                w,
            ))
        }
        Command::CocycleSolve { .. } => {
            let nf = torus.require_normal_form()?;
            let sol = solve_cocycles(torus, radius, parallel)?;
            let mut forms = vec![(1, 0)];
            if nf.z > 0 {
                forms.push((0, 1));
            }
            let mut defects = Vec::new();
            for (w1, w2) in forms {
                let c = closed_form_cocycle(torus, GammaScalar::from_integer(w1), GammaScalar::from_integer(w2))?;
                defects.push(defect_sweep(&Formal, torus, &c, radius)?);
            }
            let expected = if nf.z > 0 { 2 } else { 1 };
            let mut w = witnesses(&defects);
            for b in sol.basis.iter().filter(|b| b.matches.is_none()) {
                w.push(format!("class in block {} matches no closed form", b.block));
            }
            if sol.h2_dimension_inner != expected {
                w.push(format!("inner-box H^2 has dimension {}, expected {expected}", sol.h2_dimension_inner));
            }
            let passed = defects.iter().all(SweepReport::passed)
                && sol.known_cocycles_consistent
                && sol.closed_forms_independent
                && sol.basis.iter().all(|b| b.matches.is_some())
                && sol.h2_dimension_inner == expected;
            let details = json!({
                "solution": sol.to_json(),
                "closed_form_defects": defects.iter().map(sweep_json).collect::<Vec<_>>(),
            });
            w.truncate(16);
            Ok(report(name, json!({"box": radius}), config, passed, details, w))
        }
        Command::ExtensionCheck { .. } => {
            let e = build_extension(torus, radius, parallel)?;
            let rec = recursion_checks(torus, radius, 4)?;
            let details = json!({
                "center_dimension": e.center_dimension,
                "jacobi": sweep_json(&e.jacobi),
                "cocycle_consistency": sweep_json(&e.cocycle_consistency),
                "virasoro_shape": sweep_json(&e.virasoro_shape),
                "recursion": {
                    "heights": sweep_json(&rec.heights),
                    "radical_step": sweep_json(&rec.radical_step),
                    "push_forward": sweep_json(&rec.push_forward),
                    "shift": sweep_json(&rec.shift),
                    "small_multiples": sweep_json(&rec.small_multiples),
                },
            });
            let passed = e.passed() && rec.passed();
            let w = witnesses([
                &e.jacobi,
                &e.cocycle_consistency,
                &e.virasoro_shape,
                &rec.heights,
                &rec.radical_step,
                &rec.push_forward,
                &rec.shift,
                &rec.small_multiples,
            ]);
            Ok(report(name, json!({"box": radius}), config, passed, details, w))
        }
        Command::ExportStructure { .. } => {
            let table = export_structure(torus, radius);
            let body = serde_json::to_string_pretty(&table)? + "\n";
            Ok(Outcome { passed: true, body })
        }
        Command::VerifyVirasoro { .. } => {
            let r = verify_virasoro(torus, radius)?;
            let mut reports = vec![r];
            let mut skipped = Vec::new();
            if torus.normal_form().is_some() {
                reports.push(verify_extension_virasoro_shape(torus, radius)?);
                reports.push(verify_extension_virasoro_line(torus, 4)?);
            } else {
                skipped.push("extension restriction: configuration is not in normal form");
            }
            let passed = reports.iter().all(SweepReport::passed);
            let details = json!({
                "embedding": sweep_json(&reports[0]),
                "extension_restriction": reports.get(1).map(sweep_json),
                "extension_heights_up_to_4": reports.get(2).map(sweep_json),
                "skipped": skipped,
            });
            Ok(report(name, json!({"box": radius}), config, passed, details, witnesses(&reports)))
        }
    })
}

/// Entry point shared by the binary: returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let Some(path) = cli.config.as_deref() else {
        eprintln!("error: --config is required");
        return 2;
    };
    let mut config = match load_config(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Ok(t) = std::env::var("QTL_THREADS") {
        match t.parse::<usize>() {
            Ok(n) => config.threads = n.max(1),
            Err(_) => {
                eprintln!("error: QTL_THREADS must be a positive integer");
                return 2;
            }
        }
    }
    let start = std::time::Instant::now();
    let outcome = match execute(&cli.command, &config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    eprintln!("{} finished in {:.3}s", cli.command.name(), start.elapsed().as_secs_f64());
    let out = cli.out.or(config.out.clone());
    match out {
        Some(p) => {
            if let Err(e) = std::fs::write(&p, &outcome.body) {
                eprintln!("error: {}: {e}", p.display());
                return 2;
            }
        }
        None => print!("{}", outcome.body),
    }
    if outcome.passed {
        0
    } else {
        1
    }
}
