//! The `pareto-ph` command line: input parsing, the complex-spec text
//! format and report printing. `run` returns the process exit code.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad usage, 3 bad input,
//! 4 the computation could not be carried out.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bench::{size_sweep, uniform_cloud, SizeReport};
use crate::complex::{random_complex, vietoris_rips, BoundaryEntry, Cell, ComplexError, DistanceMatrix, FilteredComplex};
use crate::field::PrimeField;
use crate::persist::{
    persistence, rips_persistence, standard_reduction_oracle, validate_representative, Barcode, Chain, Interval,
    PersistError, PersistOptions, Representative,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_COMPUTE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read input: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {0}: wrong number of entries")]
    RaggedInput(usize),
    #[error("line {0}: negative distance")]
    NegativeDistance(usize),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Persist(#[from] PersistError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) | CliError::Parse { .. } | CliError::RaggedInput(_) | CliError::NegativeDistance(_) => {
                EXIT_INPUT
            }
            CliError::Complex(ComplexError::TooLarge(_)) => EXIT_COMPUTE,
            CliError::Complex(_) => EXIT_INPUT,
            CliError::Persist(PersistError::Complex(ComplexError::TooLarge(_))) => EXIT_COMPUTE,
            CliError::Persist(PersistError::Complex(_)) => EXIT_INPUT,
            CliError::Persist(_) => EXIT_COMPUTE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pareto-ph", version, about = "Persistent homology over prime fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the barcode, one interval per line.
    Barcode(RunArgs),
    /// Print the barcode with a representative cycle for every interval.
    Generators(RunArgs),
    /// Check the input and every representative; optionally dump the complex.
    Validate {
        #[command(flatten)]
        run: RunArgs,
        /// Print the complex in complex-spec form.
        #[arg(long)]
        dump: bool,
    },
    /// Compare against the standard reduction on the input, or on random
    /// instances when no input is given.
    OracleCheck {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        random: RandomArgs,
    },
    /// Cell counts and compression ratios of random Rips complexes.
    Bench {
        /// Comma-separated point counts.
        #[arg(long, value_delimiter = ',', default_values_t = [20usize, 30, 40])]
        points: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        ambient_dim: usize,
        #[arg(long, default_value_t = 4)]
        dim_max: usize,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    LowerDistance,
    PointCloud,
    ComplexSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Input file, or `-` for standard input.
    pub input: Option<String>,
    #[arg(long, value_enum, default_value_t = InputFormat::LowerDistance)]
    pub input_format: InputFormat,
    /// Highest homology dimension reported; Rips inputs are built one
    /// dimension higher. Defaults to 1 for Rips and to all for complexes.
    #[arg(long)]
    pub dim_max: Option<usize>,
    /// Largest edge length of the Rips filtration, or `inf`.
    #[arg(long, value_parser = parse_threshold, default_value = "inf")]
    pub threshold: f64,
    /// Prime field order; complex-spec inputs default to their own `field` line.
    #[arg(long, value_parser = parse_prime)]
    pub field: Option<u32>,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub morse: Switch,
    #[arg(long)]
    pub generators: bool,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct RandomArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[arg(long, default_value_t = 12)]
    pub points: usize,
    #[arg(long, default_value_t = 3)]
    pub ambient_dim: usize,
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(f64::INFINITY);
    }
    match s.parse::<f64>() {
        Ok(t) if t >= 0.0 => Ok(t),
        _ => Err(format!("threshold must be a nonnegative number or inf, got {s}")),
    }
}

fn parse_prime(s: &str) -> Result<u32, String> {
    let p: u32 = s.parse().map_err(|_| format!("not an integer: {s}"))?;
    PrimeField::new(p as u64).map(|_| p).map_err(|e| e.to_string())
}

fn parse_reals(line: &str, lineno: usize) -> Result<Vec<f64>, CliError> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>().map_err(|_| CliError::Parse {
                line: lineno,
                msg: format!("not a number: {t}"),
            })
        })
        .collect()
}

/// Strict lower triangle, row `i` holding `i` comma-separated distances.
/// No rows at all is a single point.
pub fn parse_lower_distance(text: &str) -> Result<DistanceMatrix, CliError> {
    let mut lower: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_reals(line, i + 1)?;
        if row.len() != lower.len() + 1 {
            return Err(CliError::RaggedInput(i + 1));
        }
        if row.iter().any(|&v| v < 0.0) {
            return Err(CliError::NegativeDistance(i + 1));
        }
        lower.push(row);
    }
    Ok(DistanceMatrix::from_lower(&lower)?)
}

/// One point per line, coordinates separated by commas or spaces.
pub fn parse_point_cloud(text: &str) -> Result<DistanceMatrix, CliError> {
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let p = parse_reals(line, i + 1)?;
        if pts.first().is_some_and(|q| q.len() != p.len()) {
            return Err(CliError::RaggedInput(i + 1));
        }
        pts.push(p);
    }
    Ok(DistanceMatrix::from_points(&pts)?)
}

/// A complex-spec file and the field it names, if any.
pub struct ParsedComplex {
    pub complex: FilteredComplex,
    pub field: Option<u32>,
}

/// Lines `field p`, `levels v0 v1 …`, `cell id dim grade`,
/// `entry n row col coeff` and `vertices id v0 v1 …`; `#` starts a comment.
pub fn parse_complex_spec(text: &str, field_override: Option<u32>) -> Result<ParsedComplex, CliError> {
    let mut field = None;
    let mut levels = None;
    let mut cells = Vec::new();
    let mut entries = Vec::new();
    let mut vertices = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().expect("nonempty line");
        let rest: Vec<&str> = words.collect();
        let bad = |msg: String| CliError::Parse { line: lineno, msg };
        let ints = |n: usize| -> Result<Vec<i64>, CliError> {
            if rest.len() != n {
                return Err(CliError::RaggedInput(lineno));
            }
            rest.iter()
                .map(|w| w.parse::<i64>().map_err(|_| bad(format!("not an integer: {w}"))))
                .collect()
        };
        let nonneg = |v: i64| -> Result<usize, CliError> {
            usize::try_from(v).map_err(|_| bad(format!("expected a nonnegative integer, got {v}")))
        };
        match head {
            "field" => {
                let p = ints(1)?[0];
                parse_prime(&p.to_string()).map_err(bad)?;
                field = Some(p as u32);
            }
            "levels" => levels = Some(parse_reals(&rest.join(" "), lineno)?),
            "cell" => {
                let v = ints(3)?;
                cells.push(Cell {
                    id: nonneg(v[0])?,
                    dim: nonneg(v[1])?,
                    grade: v[2],
                });
            }
            "entry" => {
                let v = ints(4)?;
                entries.push(BoundaryEntry {
                    dim: nonneg(v[0])?,
                    row: nonneg(v[1])?,
                    col: nonneg(v[2])?,
                    coeff: v[3],
                });
            }
            "vertices" => {
                if rest.is_empty() {
                    return Err(CliError::RaggedInput(lineno));
                }
                let v = rest
                    .iter()
                    .map(|w| w.parse::<usize>().map_err(|_| bad(format!("not a vertex: {w}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                vertices.insert(v[0], v[1..].to_vec());
            }
            other => return Err(bad(format!("unknown record {other}"))),
        }
    }
    let p = field_override.or(field).unwrap_or(2);
    let f = PrimeField::new(p as u64).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut complex = FilteredComplex::from_cells(f, &cells, &entries)?;
    if let Some(l) = levels {
        let need = complex.max_grade() as usize + 1;
        if !complex.is_empty() && l.len() < need {
            return Err(CliError::Parse {
                line: 0,
                msg: format!("levels lists {} values but grades reach {}", l.len(), need - 1),
            });
        }
        complex = complex.with_levels(l);
    }
    if !vertices.is_empty() {
        complex = complex.with_vertices(vertices);
    }
    Ok(ParsedComplex { complex, field })
}

/// The complex in complex-spec form; parsing it back gives the same complex.
pub fn dump_complex_spec(k: &FilteredComplex) -> String {
    let mut s = String::new();
    writeln!(s, "field {}", k.field().modulus()).unwrap();
    if let Some(l) = k.levels() {
        let vals: Vec<String> = l.iter().map(|v| v.to_string()).collect();
        writeln!(s, "levels {}", vals.join(" ")).unwrap();
    }
    for c in k.all_cells() {
        writeln!(s, "cell {} {} {}", c.id, c.dim, c.grade).unwrap();
        if let Some(v) = k.vertices(c.id) {
            let vs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            writeln!(s, "vertices {} {}", c.id, vs.join(" ")).unwrap();
        }
    }
    for e in k.all_entries() {
        let c = k.field().to_signed(e.coeff as u32);
        writeln!(s, "entry {} {} {} {}", e.dim, e.row, e.col, c).unwrap();
    }
    s
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

/// A loaded input ready to run: either a complex taken as given, or a
/// distance matrix for the Rips construction.
enum Loaded {
    Complex(FilteredComplex),
    Rips(DistanceMatrix, PrimeField),
}

fn load(args: &RunArgs) -> Result<Loaded, CliError> {
    let path = args
        .input
        .as_deref()
        .ok_or_else(|| CliError::Usage("an input file is required".into()))?;
    let text = read_input(path)?;
    let field = || PrimeField::new(args.field.unwrap_or(2) as u64).map_err(|e| CliError::Usage(e.to_string()));
    Ok(match args.input_format {
        InputFormat::LowerDistance => Loaded::Rips(parse_lower_distance(&text)?, field()?),
        InputFormat::PointCloud => Loaded::Rips(parse_point_cloud(&text)?, field()?),
        InputFormat::ComplexSpec => Loaded::Complex(parse_complex_spec(&text, args.field)?.complex),
    })
}

struct Computed {
    complex: FilteredComplex,
    barcode: Barcode,
    reps: Option<Vec<Representative>>,
}

fn compute(loaded: &Loaded, args: &RunArgs, generators: bool, verify: bool) -> Result<Computed, CliError> {
    let opts = PersistOptions {
        morse: args.morse == Switch::On,
        generators,
        verify,
    };
    match loaded {
        Loaded::Complex(k) => {
            let p = persistence(k, opts)?;
            let keep = |i: &Interval| args.dim_max.is_none_or(|d| i.dim <= d);
            let barcode = Barcode::new(p.barcode.raw().iter().copied().filter(keep).collect());
            let reps = p.representatives.map(|r| r.into_iter().filter(|r| keep(&r.interval)).collect());
            Ok(Computed {
                complex: k.clone(),
                barcode,
                reps,
            })
        }
        Loaded::Rips(d, field) => {
            let r = rips_persistence(*field, d, args.dim_max.unwrap_or(1), args.threshold, opts)?;
            Ok(Computed {
                complex: r.complex,
                barcode: r.persistence.barcode,
                reps: r.persistence.representatives,
            })
        }
    }
}

fn oracle_barcode(loaded: &Loaded, args: &RunArgs) -> Result<Vec<(usize, i64, Option<i64>)>, CliError> {
    match loaded {
        Loaded::Complex(k) => {
            let b = standard_reduction_oracle(k)?;
            Ok(match args.dim_max {
                Some(d) => b.multiset_upto(d),
                None => b.multiset(),
            })
        }
        Loaded::Rips(d, field) => {
            let dim_max = args.dim_max.unwrap_or(1);
            let k = vietoris_rips(*field, d, dim_max + 1, args.threshold)?;
            Ok(standard_reduction_oracle(&k)?.multiset_upto(dim_max))
        }
    }
}

fn value(k: &FilteredComplex, grade: i64) -> f64 {
    k.level_value(grade)
}

fn death_text(k: &FilteredComplex, i: &Interval) -> String {
    i.death.map_or_else(|| "inf".to_string(), |d| value(k, d).to_string())
}

fn chain_text(k: &FilteredComplex, c: &Chain) -> String {
    let parts: Vec<String> = c.iter().map(|(id, v)| format!("{}:{}", id, k.field().to_signed(*v))).collect();
    parts.join(",")
}

#[derive(Serialize)]
struct JsonTerm {
    cell: usize,
    coeff: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct JsonInterval {
    dim: usize,
    birth: f64,
    death: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cycle: Option<Vec<JsonTerm>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<JsonTerm>>,
}

#[derive(Serialize)]
struct JsonBarcode {
    field: u32,
    intervals: Vec<JsonInterval>,
}

fn json_chain(k: &FilteredComplex, c: &Chain) -> Vec<JsonTerm> {
    c.iter()
        .map(|(&cell, &v)| JsonTerm {
            cell,
            coeff: k.field().to_signed(v),
            vertices: k.vertices(cell).map(|v| v.to_vec()),
        })
        .collect()
}

fn print_barcode(out: &mut dyn Write, c: &Computed, format: Format) -> std::io::Result<()> {
    let k = &c.complex;
    let reps: HashMap<Interval, &Representative> = c
        .reps
        .iter()
        .flatten()
        .map(|r| (r.interval, r))
        .collect();
    let shown = c.barcode.reported();
    match format {
        Format::Tsv => {
            for i in &shown {
                write!(out, "{}\t{}\t{}", i.dim, value(k, i.birth), death_text(k, i))?;
                if let Some(r) = reps.get(i) {
                    write!(out, "\t{}", chain_text(k, &r.cycle))?;
                    if let Some(w) = &r.witness {
                        write!(out, "\t{}", chain_text(k, w))?;
                    }
                }
                writeln!(out)?;
            }
        }
        Format::Json => {
            let doc = JsonBarcode {
                field: k.field().modulus(),
                intervals: shown
                    .iter()
                    .map(|i| {
                        let r = reps.get(i);
                        JsonInterval {
                            dim: i.dim,
                            birth: value(k, i.birth),
                            death: i.death.map(|d| value(k, d)),
                            cycle: r.map(|r| json_chain(k, &r.cycle)),
                            witness: r.and_then(|r| r.witness.as_ref()).map(|w| json_chain(k, w)),
                        }
                    })
                    .collect(),
            };
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn print_bench(out: &mut dyn Write, reports: &[SizeReport], format: Format) -> std::io::Result<()> {
    match format {
        Format::Tsv => {
            writeln!(out, "points\tdim\tE\tX\tM\trank\tCR")?;
            for r in reports {
                for n in 0..r.e.len() {
                    writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        r.n_points, n, r.e[n], r.x[n], r.m[n], r.rank[n], r.compression_ratio
                    )?;
                }
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, reports)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn random_oracle_check(args: &RunArgs, random: &RandomArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let field = PrimeField::new(args.field.unwrap_or(2) as u64).map_err(|e| CliError::Usage(e.to_string()))?;
    let dim_max = args.dim_max.unwrap_or(2);
    let mut ok = true;
    for seed in random.seed..random.seed + random.seeds {
        let d = uniform_cloud(seed, random.points, random.ambient_dim);
        let loaded = Loaded::Rips(d, field);
        let rips_args = RunArgs {
            dim_max: Some(dim_max),
            ..args.clone()
        };
        let got = compute(&loaded, &rips_args, false, false)?.barcode.multiset();
        let want = oracle_barcode(&loaded, &rips_args)?;
        let rips_ok = got == want;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nv = rng.gen_range(1..=random.points.clamp(1, 10));
        let k = random_complex(&mut rng, field, nv, dim_max + 1, 6);
        let loaded = Loaded::Complex(k);
        let all = RunArgs {
            dim_max: None,
            ..args.clone()
        };
        let got = compute(&loaded, &all, false, false)?.barcode.multiset();
        let complex_ok = got == oracle_barcode(&loaded, &all)?;

        let verdict = |b: bool| if b { "ok" } else { "MISMATCH" };
        writeln!(out, "{seed}\trips\t{}\tcomplex\t{}", verdict(rips_ok), verdict(complex_ok))?;
        ok &= rips_ok && complex_ok;
    }
    Ok(ok)
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Barcode(args) => {
            let loaded = load(&args)?;
            let c = compute(&loaded, &args, args.generators, false)?;
            print_barcode(out, &c, args.format)?;
        }
        Command::Generators(args) => {
            let loaded = load(&args)?;
            let c = compute(&loaded, &args, true, false)?;
            print_barcode(out, &c, args.format)?;
        }
        Command::Validate { run, dump } => {
            let loaded = load(&run)?;
            let c = compute(&loaded, &run, true, true)?;
            let reps = c.reps.as_deref().unwrap_or(&[]);
            for r in reps {
                if let Err(e) = validate_representative(&c.complex, r) {
                    writeln!(out, "invalid\t{e}")?;
                    return Ok(EXIT_CHECK_FAILED);
                }
            }
            if dump {
                write!(out, "{}", dump_complex_spec(&c.complex))?;
            } else {
                writeln!(
                    out,
                    "valid\tcells {}\tintervals {}\trepresentatives {}",
                    c.complex.num_cells(),
                    c.barcode.reported().len(),
                    reps.len()
                )?;
            }
        }
        Command::OracleCheck { run, random } => {
            let ok = if run.input.is_some() {
                let loaded = load(&run)?;
                let got = compute(&loaded, &run, false, false)?.barcode.multiset();
                let ok = got == oracle_barcode(&loaded, &run)?;
                writeln!(out, "{}", if ok { "ok" } else { "MISMATCH" })?;
                ok
            } else {
                random_oracle_check(&run, &random, out)?
            };
            if !ok {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::Bench {
            points,
            ambient_dim,
            dim_max,
            seeds,
            format,
        } => {
            let reports = size_sweep(&points, ambient_dim, dim_max, seeds)?;
            print_bench(out, &reports, format)?;
        }
    }
    Ok(EXIT_OK)
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_distance_examples() {
        assert_eq!(parse_lower_distance("").unwrap().len(), 1);
        let d = parse_lower_distance("1.0\n2.0,3.0\n").unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!((d.get(0, 1), d.get(0, 2), d.get(1, 2)), (1.0, 2.0, 3.0));
        assert!(matches!(parse_lower_distance("1.0,2.0\n"), Err(CliError::RaggedInput(1))));
        assert!(matches!(parse_lower_distance("-1\n"), Err(CliError::NegativeDistance(1))));
        assert!(matches!(parse_lower_distance("x\n"), Err(CliError::Parse { line: 1, .. })));
    }

    #[test]
    fn point_cloud_rows_must_agree() {
        assert_eq!(parse_point_cloud("0 0\n1,0\n").unwrap().get(0, 1), 1.0);
        assert!(matches!(parse_point_cloud("0 0\n1\n"), Err(CliError::RaggedInput(2))));
    }

    #[test]
    fn threshold_and_prime_values() {
        assert_eq!(parse_threshold("inf"), Ok(f64::INFINITY));
        assert_eq!(parse_threshold("0.5"), Ok(0.5));
        assert!(parse_threshold("-1").is_err());
        assert_eq!(parse_prime("3"), Ok(3));
        assert!(parse_prime("4").is_err());
    }
}
