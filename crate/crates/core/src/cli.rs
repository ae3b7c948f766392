//! Command-line front end.
//!
//! Exit codes: 0 when the property holds or the construction succeeded, 1
//! when the property fails (a witness is printed), 2 for invalid input or
//! usage. Every report is built once as a JSON object; text mode prints the
//! summary line followed by the same fields flattened to `key = value`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::constructions::{
    hadamard_to_2design, hadamard_to_3design, pg_complement, pg_hyperplanes, sdp_biplane,
    sylvester_hadamard,
};
use crate::design::Design;
use crate::enumerate::{enumerate_delta_closed_with_progress, EnumerationOptions};
use crate::format::{parse_design, write_design};
use crate::group::{
    delta_closure_check, good_block_classes, hamada_bound_check, kimberley_group, lemma2_predicate,
    sdp_check,
};
use crate::iso::are_isomorphic;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "blockgroup", version, about = "Block designs whose blocks form a group under symmetric difference")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructKind {
    /// Points and hyperplanes of PG(n-1, 2).
    Pg,
    /// Complement of PG(n-1, 2).
    PgComplement,
    /// 2-design of the Sylvester matrix of order 2^n.
    #[value(name = "sylvester-2design")]
    Sylvester2design,
    /// 3-design of the Sylvester matrix of order 2^n.
    #[value(name = "hadamard-3design")]
    Hadamard3design,
    /// The (16, 6, 2) biplane; `--n`, if given, must be 2.
    SdpBiplane,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a design and write it in the canonical text format.
    Construct {
        #[arg(value_enum)]
        kind: ConstructKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Check the BIBD conditions and print the parameters.
    Verify { file: PathBuf },
    /// Test closure under symmetric difference.
    GroupCheck { file: PathBuf },
    /// 2-rank of the incidence matrix, with the lower bound when it applies.
    Rank { file: PathBuf },
    /// Decide isomorphism of two designs.
    Iso {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long)]
        emit_certificate: bool,
    },
    /// Test the symmetric difference property.
    SdpCheck { file: PathBuf },
    /// Good blocks of a complement-closed 3-design and their class group.
    GoodBlocks { file: PathBuf },
    /// Classify all Δ-closed block sets on v = 2^n - 1 points.
    Enumerate {
        #[arg(long)]
        v: usize,
        #[arg(long)]
        allow_long: bool,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    code: i32,
    command: &'static str,
    summary: String,
    fields: Map<String, Value>,
}

struct Failure {
    message: String,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Self {
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        message: message.into(),
    }
}

/// Parses arguments and runs one subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Outcome {
    let mut stderr = String::new();
    let result = match &cli.command {
        Command::Construct { kind, n, output } => match construct(*kind, *n, output.as_deref()) {
            Ok((_, None, text)) => {
                return Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr,
                }
            }
            Ok((report, Some(_), _)) => Ok(report),
            Err(e) => Err(e),
        },
        Command::Verify { file } => load(file).map(|d| verify(&d)),
        Command::GroupCheck { file } => load(file).map(|d| group_check(&d)),
        Command::Rank { file } => load(file).and_then(|d| rank(&d)),
        Command::Iso {
            file1,
            file2,
            emit_certificate,
        } => load(file1).and_then(|a| load(file2).and_then(|b| iso(&a, &b, *emit_certificate))),
        Command::SdpCheck { file } => load(file).and_then(|d| sdp(&d)),
        Command::GoodBlocks { file } => load(file).and_then(|d| good_blocks(&d)),
        Command::Enumerate {
            v,
            allow_long,
            out_dir,
        } => enumerate(*v, *allow_long, out_dir.as_deref(), &mut stderr),
    };
    match result {
        Ok(report) => Outcome {
            code: report.code,
            stdout: render(&report, cli.format),
            stderr,
        },
        Err(f) => {
            stderr.push_str(&format!("error: {}\n", f.message));
            Outcome {
                code: EXIT_INVALID,
                stdout: String::new(),
                stderr,
            }
        }
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("command".into(), json!(report.command));
            obj.insert("summary".into(), json!(report.summary));
            obj.insert("exit_code".into(), json!(report.code));
            obj.extend(report.fields.clone());
            let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = format!("{}\n", report.summary);
            let mut lines = Vec::new();
            flatten("", &Value::Object(report.fields.clone()), &mut lines);
            for (k, v) in lines {
                out.push_str(&format!("{k} = {v}\n"));
            }
            out
        }
    }
}

/// Flattens nested objects into dotted keys. Arrays and scalars are printed as
/// compact JSON values.
pub fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn load(path: &Path) -> Result<Design, Failure> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    parse_design(&text).map_err(|e| {
        invalid(format!(
            "{}:{}:{}: {}",
            path.display(),
            e.line,
            e.column,
            e.kind
        ))
    })
}

fn to_map(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

fn construct(
    kind: ConstructKind,
    n: Option<usize>,
    output: Option<&Path>,
) -> Result<(Report, Option<PathBuf>, String), Failure> {
    let need_n = || n.ok_or_else(|| invalid("--n is required for this construction"));
    let (name, design) = match kind {
        ConstructKind::Pg => ("pg", pg_hyperplanes(need_n()?)?),
        ConstructKind::PgComplement => ("pg-complement", pg_complement(need_n()?)?),
        ConstructKind::Sylvester2design => {
            ("sylvester-2design", hadamard_to_2design(&sylvester_hadamard(need_n()?)?)?)
        }
        ConstructKind::Hadamard3design => {
            ("hadamard-3design", hadamard_to_3design(&sylvester_hadamard(need_n()?)?)?)
        }
        ConstructKind::SdpBiplane => {
            if n.is_some_and(|m| m != 2) {
                return Err(invalid("sdp-biplane is only available for --n 2"));
            }
            ("sdp-biplane", sdp_biplane())
        }
    };
    let text = write_design(&design);
    if let Some(path) = output {
        fs::write(path, &text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    }
    let report = Report {
        code: EXIT_OK,
        command: "construct",
        summary: format!("constructed {name}: v={} b={}", design.v(), design.b()),
        fields: to_map(json!({
            "kind": name,
            "n": n,
            "v": design.v(),
            "b": design.b(),
            "output": output.map(|p| p.display().to_string()),
        })),
    };
    Ok((report, output.map(Path::to_path_buf), text))
}

fn verify(d: &Design) -> Report {
    match d.verify_bibd() {
        Ok(params) => {
            let sym = d.symmetry().expect("verified above");
            let mut fields = to_map(json!({ "bibd": true, "params": params }));
            fields.insert("symmetric".into(), json!(sym.symmetric));
            fields.insert("intersection_size".into(), json!(sym.intersection_size));
            Report {
                code: EXIT_OK,
                command: "verify",
                summary: format!("BIBD {params}"),
                fields,
            }
        }
        Err(rejection) => Report {
            code: EXIT_FAILS,
            command: "verify",
            summary: format!("not a BIBD: {rejection}"),
            fields: to_map(json!({ "bibd": false, "rejection": rejection })),
        },
    }
}

fn group_check(d: &Design) -> Report {
    let report = delta_closure_check(d);
    let mut fields = to_map(serde_json::to_value(&report).expect("serializable"));
    let summary = match (report.witness, report.group_order, report.dimension_n) {
        (Some((i, j)), _, _) => {
            let sum = (d.block(i) ^ d.block(j)).to_indices();
            fields.insert(
                "witness_blocks".into(),
                json!([d.block_points(i), d.block_points(j)]),
            );
            fields.insert("witness_difference".into(), json!(sum));
            format!("not closed: blocks {i} and {j} have symmetric difference {sum:?}, not a block")
        }
        (None, Some(order), Some(n)) => format!("closed, order {order}, n={n}"),
        _ => unreachable!("closed reports carry order and dimension"),
    };
    match lemma2_predicate(d) {
        Ok(p) => {
            fields.insert("rank_criterion".into(), serde_json::to_value(p).expect("serializable"));
        }
        Err(e) => {
            fields.insert("rank_criterion".into(), Value::Null);
            fields.insert("rank_criterion_skipped".into(), json!(e.to_string()));
        }
    }
    Report {
        code: if report.closed { EXIT_OK } else { EXIT_FAILS },
        command: "group-check",
        summary,
        fields,
    }
}

fn rank(d: &Design) -> Result<Report, Failure> {
    let rank = d.incidence_matrix().rank();
    let mut fields = to_map(json!({ "rank": rank }));
    let shaped = d.verify_bibd().ok().and_then(|p| p.group_shape_exponent());
    let (code, summary) = match shaped {
        Some(_) => {
            let bound = hamada_bound_check(d)?;
            fields.insert("bound".into(), serde_json::to_value(bound).expect("serializable"));
            let verdict = if bound.equality {
                "equality"
            } else if bound.bound_holds {
                "strict"
            } else {
                "VIOLATED"
            };
            (
                if bound.bound_holds { EXIT_OK } else { EXIT_FAILS },
                format!("2-rank {rank}; bound rank >= {} {verdict}", bound.n),
            )
        }
        None => {
            fields.insert("bound".into(), Value::Null);
            (EXIT_OK, format!("2-rank {rank}"))
        }
    };
    Ok(Report {
        code,
        command: "rank",
        summary,
        fields,
    })
}

fn iso(a: &Design, b: &Design, emit: bool) -> Result<Report, Failure> {
    let cert = are_isomorphic(a, b)?;
    let mut fields = to_map(json!({ "isomorphic": cert.is_some() }));
    if emit {
        fields.insert("certificate".into(), json!(cert.as_ref().map(|p| p.to_string())));
    }
    Ok(Report {
        code: if cert.is_some() { EXIT_OK } else { EXIT_FAILS },
        command: "iso",
        summary: if cert.is_some() { "isomorphic".into() } else { "not isomorphic".into() },
        fields,
    })
}

fn sdp(d: &Design) -> Result<Report, Failure> {
    match d.symmetry() {
        Ok(s) if s.symmetric => {}
        _ => return Err(invalid("sdp-check needs a symmetric design")),
    }
    let report = sdp_check(d);
    let summary = match report.witness {
        None => "symmetric difference property holds".to_string(),
        Some([i, j, k]) => format!(
            "fails on blocks {i}, {j}, {k}: B Δ C Δ D = {:?} is neither a block nor a complement",
            report.witness_set.as_deref().unwrap_or_default()
        ),
    };
    Ok(Report {
        code: if report.is_sdp { EXIT_OK } else { EXIT_FAILS },
        command: "sdp-check",
        summary,
        fields: to_map(serde_json::to_value(report).expect("serializable")),
    })
}

fn good_blocks(d: &Design) -> Result<Report, Failure> {
    let report = good_block_classes(d)?;
    let mut fields = to_map(serde_json::to_value(&report).expect("serializable"));
    let group_order = kimberley_group(&report).ok().filter(|g| g.valid).map(|g| g.order);
    fields.insert("group_order".into(), json!(group_order));
    let good = report.good_count();
    let summary = match group_order {
        Some(order) => format!(
            "{good} of {} blocks good, {} classes, class group of order {order}",
            d.b(),
            report.classes.len()
        ),
        None => format!("{good} of {} blocks good; no valid class group", d.b()),
    };
    Ok(Report {
        code: if report.group_table_ok { EXIT_OK } else { EXIT_FAILS },
        command: "good-blocks",
        summary,
        fields,
    })
}

fn enumerate(
    v: usize,
    allow_long: bool,
    out_dir: Option<&Path>,
    stderr: &mut String,
) -> Result<Report, Failure> {
    let heartbeat = Mutex::new(Instant::now());
    let started = Instant::now();
    let progress = |p: crate::enumerate::Progress| {
        if !allow_long {
            return;
        }
        let mut last = heartbeat.lock().expect("heartbeat lock");
        if last.elapsed() >= Duration::from_secs(10) {
            *last = Instant::now();
            eprintln!(
                "[{:>6.0}s] {}/{} first rows, {} subspaces so far",
                started.elapsed().as_secs_f64(),
                p.subtrees_done,
                p.subtrees_total,
                p.labeled_so_far
            );
        }
    };
    let result = enumerate_delta_closed_with_progress(v, EnumerationOptions { allow_long }, &progress)?;
    let reference = pg_complement(result.n)?;
    let iso_flags = result
        .class_representatives
        .iter()
        .map(|rep| are_isomorphic(rep, &reference).map(|c| c.is_some()))
        .collect::<Result<Vec<_>, _>>()?;

    let mut fields = to_map(serde_json::to_value(&result).expect("serializable"));
    fields.insert("class_count".into(), json!(result.class_count()));
    fields.insert("isomorphic_to_pg_complement".into(), json!(iso_flags));
    fields.insert(
        "first_basis".into(),
        json!(result
            .first_basis
            .as_ref()
            .map(|b| b.iter().map(|r| r.to_indices()).collect::<Vec<_>>())),
    );

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| invalid(format!("{}: {e}", dir.display())))?;
        let mut table = String::from("v n labeled_count class_count\n");
        table.push_str(&format!(
            "{} {} {} {}\n",
            result.v,
            result.n,
            result.labeled_count,
            result.class_count()
        ));
        fs::write(dir.join("summary.txt"), table).map_err(|e| invalid(e.to_string()))?;
        for (i, rep) in result.class_representatives.iter().enumerate() {
            fs::write(dir.join(format!("class_{i}.txt")), write_design(rep))
                .map_err(|e| invalid(e.to_string()))?;
        }
        stderr.push_str(&format!("wrote {} class file(s) to {}\n", result.class_count(), dir.display()));
    }

    let all_pg = iso_flags.iter().all(|&f| f);
    let classes = result.class_count();
    let summary = format!(
        "{classes} isomorphism class{}; {}",
        if classes == 1 { "" } else { "es" },
        if all_pg && classes == 1 {
            format!("isomorphic to PG-complement({})", result.n)
        } else {
            format!("{} of them isomorphic to PG-complement({})", iso_flags.iter().filter(|&&f| f).count(), result.n)
        }
    );
    let holds = classes == 1 && all_pg && result.all_bibd && result.all_closed;
    Ok(Report {
        code: if holds { EXIT_OK } else { EXIT_FAILS },
        command: "enumerate",
        summary,
        fields,
    })
}
