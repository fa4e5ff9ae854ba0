use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde_json::{json, Map, Value};

use moment_cara::combinatorics::basis_size;
use moment_cara::error::Error;
use moment_cara::flat::{flat_check, worst_case_table};
use moment_cara::hilbert::{
    asymptotic_ratio, curve_bounds, grid_cara_closed_form, ratio_limit, variety_bounds, BoundReport,
    Domain, HilbertProfile, Parity,
};
use moment_cara::io::{
    bigint_value, format_rational, measure_to_json, parse_rational, rational_to_f64,
    read_measure, read_moments, write_measure, write_moments,
};
use moment_cara::moments::{atomic_moments, hankel, hankel_rank_analysis};
use moment_cara::recover::{recover_atoms_1d, RecoveryConfig};
use moment_cara::sparse::{
    conductor_defect, descartes_number, nonneg_zero_bounds, semigroup_invariants, sparse_cara_bounds,
};
use moment_cara::witness::{
    boundary_cara, build_grid_witness, certificate, certificate_pairing, grid_cap_from_env,
    interpolation_points, lattice_candidates, prune,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "moment-cara", version, about = "Carathéodory numbers of truncated moment problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Rn,
    Cube,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Rn => Domain::Rn,
            DomainArg::Cube => Domain::Cube,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Sphere,
    Projective,
    Poly,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    d: u64,
    #[arg(long, value_enum, default_value = "even")]
    parity: ParityArg,
}

#[derive(Args)]
struct FormatArg {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Grid lower bound on ℝⁿ.
    BoundsRn {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Grid lower bound on the cube.
    BoundsCube {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Bounds from a Hilbert polynomial of a k-dimensional variety.
    BoundsVariety {
        #[arg(long, value_enum)]
        profile: ProfileArg,
        /// Ambient dimension for sphere and projective profiles.
        #[arg(long)]
        n: Option<u64>,
        /// Polynomial coefficients, constant term first, e.g. "-20,8".
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        d: u64,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Bounds for a curve of the given degree.
    BoundsCurve {
        #[arg(long)]
        degree: u64,
        #[arg(long)]
        d: u64,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Carathéodory bounds for a sparse univariate ring.
    BoundsSparse {
        #[arg(long)]
        gens: String,
        #[arg(long)]
        k: u64,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Descartes number D_k of a sparse ring.
    Descartes {
        #[arg(long)]
        gens: String,
        #[arg(long)]
        k: u64,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Conductor and gaps of a numerical semigroup.
    Semigroup {
        #[arg(long)]
        gens: String,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Build a grid witness and certify its Carathéodory number by exact rank.
    Witness {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value = "rn")]
        domain: DomainArg,
        /// Exit 1 when the exact rank differs from the closed form.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        max_grid: Option<u64>,
        /// Write the grid measure as JSON.
        #[arg(long)]
        atoms: Option<PathBuf>,
        /// Write the witness moments as JSON.
        #[arg(long)]
        moments: Option<PathBuf>,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Vanishing sum-of-squares certificate for a grid.
    Certificate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value = "rn")]
        domain: DomainArg,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Reduce a positive atomic measure to at most rank-many atoms.
    Prune {
        #[arg(long)]
        atoms: PathBuf,
        #[arg(long)]
        degree: u32,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Points whose evaluations span all functionals of a given degree.
    InterpPoints {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: u32,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Hankel matrix of a moment file, or Hankel rank of a measure.
    Hankel {
        #[arg(long, conflicts_with = "atoms", required_unless_present = "atoms")]
        moments: Option<PathBuf>,
        #[arg(long)]
        atoms: Option<PathBuf>,
        /// Sub-degree d' of the Hankel matrix.
        #[arg(long)]
        d: u32,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Compare ranks of ℋ_D and ℋ_{D+1}.
    FlatCheck {
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        d: u32,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Required flat-extension degrees for a range of n (and d).
    FlatTable {
        #[arg(long)]
        d: u64,
        /// Scan d..=d-max instead of a single d.
        #[arg(long)]
        d_max: Option<u64>,
        #[arg(long, default_value_t = 1)]
        n_min: u64,
        #[arg(long)]
        n_max: u64,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Recover atoms of a 1-D sequence numerically.
    Recover {
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        k: usize,
        /// Relative root accuracy.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        fmt: FormatArg,
    },
    /// Closed form over full basis dimension, with its limit in d.
    Ratio {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value = "rn")]
        domain: DomainArg,
        #[command(flatten)]
        fmt: FormatArg,
    },
}

enum Failure {
    Usage(String),
    Domain(Error),
    /// Completed, but the result refutes a checked claim.
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

enum Output {
    Json(Value),
    Text(String),
}

type Outcome = Result<(Output, Option<Failure>), Failure>;

fn envelope(command: &str, inputs: Value, body: Value) -> Value {
    let mut map = Map::new();
    map.insert("command".into(), json!(command));
    map.insert("inputs".into(), inputs);
    map.insert("version".into(), json!(VERSION));
    if let Value::Object(body) = body {
        map.extend(body);
    }
    Value::Object(map)
}

fn json_only(fmt: &FormatArg, command: &str) -> Result<(), Failure> {
    match fmt.format {
        Format::Json => Ok(()),
        Format::Csv => Err(Failure::Usage(format!("{command} has no CSV output"))),
    }
}

fn parse_gens(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("--gens expects a comma-separated list of nonnegative integers, got {s:?}")))
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Domain(Error::Io(format!("{}: {e}", path.display()))))
}

fn create(path: &Path) -> Result<File, Failure> {
    File::create(path).map_err(|e| Failure::Domain(Error::Io(format!("{}: {e}", path.display()))))
}

fn report_value(r: &BoundReport) -> Value {
    json!({
        "lower": bigint_value(&r.lower),
        "upper": bigint_value(&r.upper),
        "consistent": r.consistent,
        "regime_note": r.regime_note,
    })
}

fn ratio_value(n: u64, d: u64, parity: Parity, domain: Domain) -> Value {
    let r = asymptotic_ratio(n, d, parity, domain);
    let limit = ratio_limit(n);
    json!({
        "ratio": format_rational(&r),
        "ratio_float": rational_to_f64(&r),
        "limit": format_rational(&limit),
        "limit_float": rational_to_f64(&limit),
    })
}

fn grid_bounds(command: &str, g: &GridArgs, fmt: &FormatArg, domain: Domain) -> Outcome {
    json_only(fmt, command)?;
    if g.n == 0 || g.d == 0 {
        return Err(Error::InvalidArgument("n and d must be at least 1".into()).into());
    }
    let parity = Parity::from(g.parity);
    let lower = grid_cara_closed_form(g.n, g.d, parity, domain);
    let degree = 2 * g.d + parity.offset();
    let dim = moment_cara::combinatorics::binom(g.n + degree, g.n as i64);
    let mut body = json!({
        "lower": bigint_value(&lower),
        "basis_size": bigint_value(&dim.into()),
        "truncation_degree": degree,
    });
    if let (Value::Object(b), Value::Object(r)) = (&mut body, ratio_value(g.n, g.d, parity, domain)) {
        b.extend(r);
    }
    let inputs = json!({"n": g.n, "d": g.d, "parity": parity, "domain": domain});
    Ok((Output::Json(envelope(command, inputs, body)), None))
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::BoundsRn { grid, fmt } => grid_bounds("bounds-rn", &grid, &fmt, Domain::Rn),
        Command::BoundsCube { grid, fmt } => grid_bounds("bounds-cube", &grid, &fmt, Domain::Cube),
        Command::BoundsVariety { profile, n, coeffs, k, d, fmt } => {
            json_only(&fmt, "bounds-variety")?;
            let need_n = || n.ok_or_else(|| Failure::Usage("--n is required for this profile".into()));
            let (p, desc) = match profile {
                ProfileArg::Sphere => {
                    let n = need_n()?;
                    if n < 2 {
                        return Err(Error::InvalidArgument("sphere needs n ≥ 2".into()).into());
                    }
                    (HilbertProfile::Sphere(n), json!({"profile": "sphere", "n": n}))
                }
                ProfileArg::Projective => {
                    let n = need_n()?;
                    (HilbertProfile::ProjectiveSpace(n), json!({"profile": "projective", "n": n}))
                }
                ProfileArg::Poly => {
                    let c = coeffs.ok_or_else(|| Failure::Usage("--coeffs is required for poly".into()))?;
                    let parsed = c
                        .split(',')
                        .map(parse_rational)
                        .collect::<Result<Vec<_>, _>>()?;
                    (HilbertProfile::polynomial(parsed)?, json!({"profile": "poly", "coeffs": c}))
                }
            };
            let r = variety_bounds(&p, k, d)?;
            let mut inputs = desc;
            inputs["k"] = json!(k);
            inputs["d"] = json!(d);
            Ok((Output::Json(envelope("bounds-variety", inputs, report_value(&r))), None))
        }
        Command::BoundsCurve { degree, d, fmt } => {
            json_only(&fmt, "bounds-curve")?;
            let r = curve_bounds(degree, d)?;
            let inputs = json!({"degree": degree, "d": d});
            Ok((Output::Json(envelope("bounds-curve", inputs, report_value(&r))), None))
        }
        Command::BoundsSparse { gens, k, fmt } => {
            json_only(&fmt, "bounds-sparse")?;
            let ring = semigroup_invariants(&parse_gens(&gens)?)?;
            let (lower, upper) = sparse_cara_bounds(&ring, k)?;
            let (zl, zu) = nonneg_zero_bounds(&ring, k)?;
            let body = json!({
                "conductor": ring.conductor(),
                "gaps": ring.gaps(),
                "conductor_defect": conductor_defect(&ring)?,
                "lower": lower,
                "upper": upper,
                "nonneg_zeros": {"lower": zl, "upper": zu},
            });
            let inputs = json!({"gens": ring.generators(), "k": k});
            Ok((Output::Json(envelope("bounds-sparse", inputs, body)), None))
        }
        Command::Descartes { gens, k, fmt } => {
            json_only(&fmt, "descartes")?;
            let ring = semigroup_invariants(&parse_gens(&gens)?)?;
            let r = descartes_number(&ring, k)?;
            let body = json!({"D": r.value, "witness_signs": r.witness_signs});
            let inputs = json!({"gens": ring.generators(), "k": k});
            Ok((Output::Json(envelope("descartes", inputs, body)), None))
        }
        Command::Semigroup { gens, fmt } => {
            json_only(&fmt, "semigroup")?;
            let ring = semigroup_invariants(&parse_gens(&gens)?)?;
            let body = json!({
                "conductor": ring.conductor(),
                "gaps": ring.gaps(),
                "gap_list": ring.gap_list(),
            });
            let inputs = json!({"gens": ring.generators()});
            Ok((Output::Json(envelope("semigroup", inputs, body)), None))
        }
        Command::Witness { grid, domain, verify, max_grid, atoms, moments, fmt } => {
            json_only(&fmt, "witness")?;
            let domain = Domain::from(domain);
            let parity = Parity::from(grid.parity);
            let cap = max_grid.unwrap_or_else(grid_cap_from_env);
            let n = usize::try_from(grid.n).map_err(|_| Error::InvalidArgument("n too large".into()))?;
            let d = u32::try_from(grid.d).map_err(|_| Error::InvalidArgument("d too large".into()))?;
            let w = build_grid_witness(n, d, parity, domain, cap)?;
            let cert = certificate(n, d, domain)?;
            let pairing = certificate_pairing(&w, &cert);
            if let Some(path) = atoms {
                write_measure(create(&path)?, &w.measure)?;
            }
            if let Some(path) = moments {
                write_moments(create(&path)?, &w.sequence)?;
            }
            let body = json!({
                "atoms": w.atoms(),
                "degree": w.degree(),
                "certified_cara": w.certified_cara,
                "closed_form": bigint_value(&w.closed_form),
                "match": w.matches(),
                "certificate_pairing": format_rational(&pairing),
            });
            let inputs = json!({
                "n": n, "d": d, "parity": parity, "domain": domain,
                "verify": verify, "max_grid": cap,
            });
            let failure = (verify && !w.matches()).then(|| {
                Failure::Verification(format!(
                    "exact rank {} differs from closed form {}",
                    w.certified_cara, w.closed_form
                ))
            });
            Ok((Output::Json(envelope("witness", inputs, body)), failure))
        }
        Command::Certificate { n, d, domain, fmt } => {
            json_only(&fmt, "certificate")?;
            let domain = Domain::from(domain);
            let c = certificate(n, d, domain)?;
            let origin = c.eval(&vec![Zero::zero(); n]);
            let body = json!({
                "factor": c.factor_string(),
                "factor_coefficients": c.factor.iter().map(format_rational).collect::<Vec<_>>(),
                "degree": c.degree(),
                "value_at_origin": format_rational(&origin),
            });
            let inputs = json!({"n": n, "d": d, "domain": domain});
            Ok((Output::Json(envelope("certificate", inputs, body)), None))
        }
        Command::Prune { atoms, degree, fmt } => {
            json_only(&fmt, "prune")?;
            let m = read_measure(open(&atoms)?)?;
            let rank = boundary_cara(&m, degree);
            let p = prune(&m, degree)?;
            let preserved = atomic_moments(&p, degree) == atomic_moments(&m, degree);
            let body = json!({
                "input_atoms": m.len(),
                "rank": rank,
                "output_atoms": p.len(),
                "moments_preserved": preserved,
                "measure": measure_to_json(&p),
            });
            let inputs = json!({"atoms": atoms.display().to_string(), "degree": degree});
            Ok((Output::Json(envelope("prune", inputs, body)), None))
        }
        Command::InterpPoints { n, degree, fmt } => {
            json_only(&fmt, "interp-points")?;
            if n == 0 {
                return Err(Error::InvalidArgument("n must be at least 1".into()).into());
            }
            let pts = interpolation_points(n, degree, lattice_candidates(n))?;
            let body = json!({
                "count": pts.len(),
                "basis_size": basis_size(n, degree),
                "points": pts
                    .iter()
                    .map(|p| p.iter().map(format_rational).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            });
            let inputs = json!({"n": n, "degree": degree});
            Ok((Output::Json(envelope("interp-points", inputs, body)), None))
        }
        Command::Hankel { moments, atoms, d, fmt } => {
            json_only(&fmt, "hankel")?;
            if let Some(path) = atoms {
                let m = read_measure(open(&path)?)?;
                let r = hankel_rank_analysis(&m, d);
                let body = json!({
                    "rank": r.rank,
                    "atoms": r.atoms,
                    "independent": r.independent,
                    "boundary_cara": {"value": boundary_cara(&m, 2 * d), "degree": 2 * d, "lower_bound": true},
                });
                let inputs = json!({"atoms": path.display().to_string(), "d": d});
                return Ok((Output::Json(envelope("hankel", inputs, body)), None));
            }
            let path = moments.expect("clap enforces one of --moments/--atoms");
            let s = read_moments(open(&path)?)?;
            let h = hankel(&s, d)?;
            let matrix: Vec<Vec<String>> = h
                .matrix
                .to_rows()
                .iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect();
            let body = json!({"size": matrix.len(), "rank": h.rank(), "matrix": matrix});
            let inputs = json!({"moments": path.display().to_string(), "d": d});
            Ok((Output::Json(envelope("hankel", inputs, body)), None))
        }
        Command::FlatCheck { moments, d, fmt } => {
            json_only(&fmt, "flat-check")?;
            let s = read_moments(open(&moments)?)?;
            let c = flat_check(&s, d)?;
            let body = json!({"rank_lower": c.rank_lower, "rank_upper": c.rank_upper, "flat": c.flat});
            let inputs = json!({"moments": moments.display().to_string(), "d": d});
            Ok((Output::Json(envelope("flat-check", inputs, body)), None))
        }
        Command::FlatTable { d, d_max, n_min, n_max, fmt } => {
            let d_max = d_max.unwrap_or(d);
            if n_min == 0 || d == 0 || n_min > n_max || d > d_max {
                return Err(Failure::Usage("need 1 ≤ n-min ≤ n-max and 1 ≤ d ≤ d-max".into()));
            }
            let t = worst_case_table(n_min..=n_max, d..=d_max)?;
            match fmt.format {
                Format::Csv => Ok((Output::Text(t.to_csv()), None)),
                Format::Json => {
                    let inputs = json!({"d": d, "d_max": d_max, "n_min": n_min, "n_max": n_max});
                    Ok((Output::Json(envelope("flat-table", inputs, t.to_json())), None))
                }
            }
        }
        Command::Recover { moments, k, tol, fmt } => {
            json_only(&fmt, "recover")?;
            let s = read_moments(open(&moments)?)?;
            if s.n() != 1 {
                return Err(Error::DimensionMismatch(format!(
                    "recover needs a 1-D sequence, got n={}",
                    s.n()
                ))
                .into());
            }
            let values: Vec<f64> = s.values().iter().map(rational_to_f64).collect();
            let mut cfg = RecoveryConfig::default();
            if let Some(t) = tol {
                cfg.root_tolerance = t;
            }
            let r = recover_atoms_1d(&values, k, &cfg)?;
            let body = json!({
                "atoms": r.atoms.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
                "weights": r.weights.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
                "residual": r.residual,
                "condition_estimate": r.condition_estimate,
            });
            let inputs = json!({"moments": moments.display().to_string(), "k": k, "tol": cfg.root_tolerance});
            Ok((Output::Json(envelope("recover", inputs, body)), None))
        }
        Command::Ratio { grid, domain, fmt } => {
            json_only(&fmt, "ratio")?;
            if grid.n == 0 || grid.d == 0 {
                return Err(Error::InvalidArgument("n and d must be at least 1".into()).into());
            }
            let domain = Domain::from(domain);
            let parity = Parity::from(grid.parity);
            let body = ratio_value(grid.n, grid.d, parity, domain);
            let inputs = json!({"n": grid.n, "d": grid.d, "parity": parity, "domain": domain});
            Ok((Output::Json(envelope("ratio", inputs, body)), None))
        }
    }
}

fn emit(out: Output) {
    let mut stdout = std::io::stdout().lock();
    let text = match out {
        Output::Json(v) => serde_json::to_string_pretty(&v).expect("serializable") + "\n",
        Output::Text(t) => t,
    };
    let _ = stdout.write_all(text.as_bytes());
}

fn fail(f: Failure) -> ExitCode {
    let (code, message, exit) = match f {
        Failure::Usage(m) => ("usage", m, 2),
        Failure::Domain(e) => (e.code(), e.to_string(), 1),
        Failure::Verification(m) => ("verification_failed", m, 1),
    };
    eprintln!("{}", json!({"error": {"code": code, "message": message}}));
    ExitCode::from(exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok((out, None)) => {
            emit(out);
            ExitCode::SUCCESS
        }
        Ok((out, Some(f))) => {
            emit(out);
            fail(f)
        }
        Err(f) => fail(f),
    }
}
