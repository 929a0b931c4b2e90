//! The `ttt` command line.
//!
//! Exit codes: 0 on success, 1 when the input is rejected or a claim fails,
//! 2 on usage and I/O errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::check::{pretty, ErrorKind, Session};
use crate::corpus::run_corpus;
use crate::eval::normalize;
use crate::lattice::{self, LatError, LatTerm, Lattice, Presentation};
use crate::modality::Modality;
use crate::shapes::{self, parse_sequents, Options};
use crate::syntax::{Context, DeclKind, Term};

pub const OK: i32 = 0;
pub const FAILURE: i32 = 1;
pub const USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "ttt",
    version,
    about = "Checker and interval tools for triangulated type theory"
)]
pub struct Cli {
    /// Print one JSON object per result instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Generator bound for `lat`; variable bound for both semantics of `shape`.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub bound: Option<u64>,
    /// Number of points in the chain used by SIMPLICIAL `shape` decisions.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(2..))]
    pub chain: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Type-check surface files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the normal form of a declaration.
    Norm {
        file: PathBuf,
        #[arg(long)]
        term: String,
    },
    /// Compare modalities (`"glo <= op"`) or normalize one (`"op∘op"`).
    Mode { query: String },
    /// Queries on a finitely presented lattice.
    ///
    /// INPUT is a presentation file or one of `free:K`, `simplex:N`.
    Lat {
        input: Option<String>,
        /// Print the normal form of a term.
        #[arg(long)]
        normal: Vec<String>,
        /// Decide `s = t`.
        #[arg(long)]
        eq: Vec<String>,
        /// Decide `s <= t`.
        #[arg(long)]
        leq: Vec<String>,
        /// Only run the duality check.
        #[arg(long)]
        duality: bool,
        /// Print the case table for maps 𝕀² → 𝕀.
        #[arg(long)]
        glue: bool,
    },
    /// Decide the sequents in one or more files under both semantics.
    Shape {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Run the corpus manifest.
    Corpus {
        #[arg(default_value = "corpus")]
        dir: PathBuf,
    },
}

#[derive(Serialize)]
struct Record<'a> {
    subcommand: &'a str,
    input: String,
    verdict: String,
    details: Json,
}

struct Out<'a> {
    json: bool,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Out<'_> {
    fn emit(&mut self, subcommand: &str, input: &str, verdict: &str, details: Json, text: &str) {
        if self.json {
            let rec = Record {
                subcommand,
                input: input.to_string(),
                verdict: verdict.to_string(),
                details,
            };
            let line = serde_json::to_string(&rec).expect("records serialize");
            let _ = writeln!(self.out, "{line}");
        } else {
            let _ = write!(self.out, "{text}");
            if !text.ends_with('\n') {
                let _ = writeln!(self.out);
            }
        }
    }

    fn usage(&mut self, subcommand: &str, input: &str, message: &str) -> i32 {
        if self.json {
            self.emit(
                subcommand,
                input,
                "error",
                json!({ "kind": "IO", "message": message }),
                "",
            );
        }
        let _ = writeln!(self.err, "ttt {subcommand}: {message}");
        USAGE
    }
}

/// Run the command line; returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let rendered = e.render().to_string();
            if code == OK {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let mut o = Out {
        json: cli.json,
        out,
        err,
    };
    match &cli.command {
        Command::Check { files } => {
            let mut code = OK;
            for f in files {
                code = code.max(check(&mut o, f));
            }
            code
        }
        Command::Norm { file, term } => norm(&mut o, file, term),
        Command::Mode { query } => mode(&mut o, query),
        Command::Lat {
            input,
            normal,
            eq,
            leq,
            duality,
            glue,
        } => {
            let bound = cli.bound.map_or(lattice::DEFAULT_BOUND, |b| b as usize);
            lat(&mut o, input.as_deref(), normal, eq, leq, *duality, *glue, bound)
        }
        Command::Shape { files } => {
            let mut opts = Options::default();
            if let Some(b) = cli.bound {
                opts.simplicial_bound = b as usize;
                opts.cubical_bound = b as usize;
            }
            opts.chain = cli.chain.map(|c| c as usize);
            let mut code = OK;
            for f in files {
                code = code.max(shape(&mut o, f, &opts));
            }
            code
        }
        Command::Corpus { dir } => corpus(&mut o, dir),
    }
}

fn check(o: &mut Out, file: &Path) -> i32 {
    let input = file.display().to_string();
    let mut session = Session::new();
    match session.check_file(file) {
        Ok(report) => {
            let names: Vec<&str> = report.declarations.iter().map(|d| &*d.name).collect();
            let n = names.len();
            o.emit(
                "check",
                &input,
                "accept",
                json!({ "declarations": n, "names": names, "imports": report.imports }),
                &format!("OK ({n} declarations)"),
            );
            OK
        }
        Err(e) if e.kind == ErrorKind::Io && e.span.is_none() => o.usage("check", &input, &e.to_string()),
        Err(e) => {
            o.emit("check", &input, "reject", check_error_json(&e), &e.to_string());
            FAILURE
        }
    }
}

fn check_error_json(e: &crate::check::CheckError) -> Json {
    json!({
        "kind": e.kind,
        "rule": e.rule,
        "message": e.message,
        "declaration": e.decl,
        "line": e.position.map(|p| p.0),
        "column": e.position.map(|p| p.1),
    })
}

fn norm(o: &mut Out, file: &Path, name: &str) -> i32 {
    let input = file.display().to_string();
    let mut session = Session::new();
    if let Err(e) = session.check_file(file) {
        if e.kind == ErrorKind::Io && e.span.is_none() {
            return o.usage("norm", &input, &e.to_string());
        }
        o.emit("norm", &input, "reject", check_error_json(&e), &e.to_string());
        return FAILURE;
    }
    let Some(decl) = session.sig.get(name).cloned() else {
        let msg = format!("no declaration named `{name}`");
        o.emit(
            "norm",
            &input,
            "error",
            json!({ "kind": "UNBOUND_NAME", "message": msg }),
            &msg,
        );
        return FAILURE;
    };
    let ctx = Context::new();
    let ty = crate::eval::normalize_type(&session.sig, &ctx, &decl.ty).expect("checked types are closed");
    let body = match &decl.kind {
        DeclKind::Definition(b) => normalize(&session.sig, &ctx, &decl.ty, b).expect("checked terms are closed"),
        DeclKind::Postulate => Term::constant(name),
    };
    let ty_s = pretty::term(&[], &ty);
    let body_s = pretty::term(&[], &body);
    o.emit(
        "norm",
        &input,
        "ok",
        json!({ "name": name, "type": ty_s, "normal_form": body_s, "postulate": decl.is_postulate() }),
        &format!("{name} : {ty_s}\n{name} = {body_s}"),
    );
    OK
}

fn mode(o: &mut Out, query: &str) -> i32 {
    let parse = |s: &str| s.trim().parse::<Modality>();
    let split = ["<=", "≤", "="]
        .iter()
        .find_map(|op| query.split_once(op).map(|(a, b)| (*op, a, b)));
    let result = match split {
        Some((op, a, b)) => parse(a).and_then(|x| parse(b).map(|y| (op, x, y))).map(|(op, x, y)| {
            let holds = if op == "=" { x == y } else { x.leq(y) };
            (
                holds.to_string(),
                json!({ "lhs": x.to_string(), "rhs": y.to_string(), "relation": if op == "=" { "=" } else { "<=" } }),
            )
        }),
        None => parse(query).map(|m| (m.to_string(), json!({ "normal_form": m.to_string() }))),
    };
    match result {
        Ok((verdict, details)) => {
            o.emit("mode", query, &verdict, details, &verdict);
            OK
        }
        Err(e) => {
            let msg = e.to_string();
            o.emit(
                "mode",
                query,
                "error",
                json!({ "kind": "PARSE", "message": msg }),
                &format!("error: {msg}"),
            );
            FAILURE
        }
    }
}

fn load_presentation(input: &str) -> Result<Presentation, Result<LatError, String>> {
    let builtin = |prefix: &str| input.strip_prefix(prefix).map(|n| n.parse::<usize>());
    if let Some(k) = builtin("free:") {
        return k.map(Presentation::free_k).map_err(|e| Err(e.to_string()));
    }
    if let Some(n) = builtin("simplex:") {
        return n.map(Presentation::simplex).map_err(|e| Err(e.to_string()));
    }
    let src = fs::read_to_string(input).map_err(|e| Err(format!("cannot read {input}: {e}")))?;
    Presentation::parse(&src).map_err(Ok)
}

fn lat_error(o: &mut Out, input: &str, e: &LatError) -> i32 {
    let msg = e.to_string();
    o.emit(
        "lat",
        input,
        "error",
        json!({ "kind": e.kind(), "message": msg }),
        &format!("{}: {msg}", e.kind()),
    );
    FAILURE
}

fn split_relation<'s>(s: &'s str, ops: &[&str]) -> Option<(&'s str, &'s str)> {
    ops.iter().find_map(|op| s.split_once(op))
}

#[allow(clippy::too_many_arguments)]
fn lat(
    o: &mut Out,
    input: Option<&str>,
    normal: &[String],
    eq: &[String],
    leq: &[String],
    duality_only: bool,
    glue: bool,
    bound: usize,
) -> i32 {
    let mut code = OK;
    if glue {
        let r = lattice::glue_case_table();
        let mut text = String::from("α(0,−)  α(1,−)  members\n");
        for c in &r.cells {
            text.push_str(&format!(
                "{:<7} {:<7} {}\n",
                c.at_zero.name(),
                c.at_one.name(),
                if c.members.is_empty() {
                    "-".to_string()
                } else {
                    c.members.join(", ")
                }
            ));
        }
        let ok = r.matches_case_tree && r.excluded_cell_empty && r.one_leaf_is_constant;
        text.push_str(&format!("case tree reproduced: {ok}"));
        let details = serde_json::to_value(&r).expect("report serializes");
        o.emit("lat", "glue", &ok.to_string(), details, &text);
        if !ok {
            code = FAILURE;
        }
    }
    let Some(input) = input else {
        if glue {
            return code;
        }
        return o.usage(
            "lat",
            "",
            "expected a presentation (file, free:K or simplex:N) or --glue",
        );
    };
    let pres = match load_presentation(input) {
        Ok(p) => p,
        Err(Ok(e)) => return lat_error(o, input, &e),
        Err(Err(msg)) => return o.usage("lat", input, &msg),
    };
    let lat = match Lattice::new(pres, bound) {
        Ok(l) => l,
        Err(e) => return lat_error(o, input, &e),
    };
    let queries = !(normal.is_empty() && eq.is_empty() && leq.is_empty());
    for t in normal {
        match LatTerm::parse(t).and_then(|term| lat.normal_form(&term)) {
            Ok(f) => {
                let nf = lat.to_term(&f).to_string();
                o.emit(
                    "lat",
                    input,
                    &nf,
                    json!({ "query": "normal", "term": t, "normal_form": nf, "table": f.table }),
                    &format!("{t}  ~>  {nf}"),
                );
            }
            Err(e) => code = code.max(lat_error(o, input, &e)),
        }
    }
    for (queries, ops, kind) in [(eq, &["="][..], "eq"), (leq, &["<=", "≤"][..], "leq")] {
        for q in queries {
            let Some((a, b)) = split_relation(q, ops) else {
                return o.usage("lat", input, &format!("expected a relation `{}` in `{q}`", ops[0]));
            };
            let r = LatTerm::parse(a).and_then(|a| {
                let b = LatTerm::parse(b)?;
                if kind == "eq" {
                    lat.decide_eq(&a, &b)
                } else {
                    lat.decide_leq(&a, &b)
                }
            });
            match r {
                Ok(v) => o.emit(
                    "lat",
                    input,
                    &v.to_string(),
                    json!({ "query": kind, "relation": q }),
                    &format!("{q}: {v}"),
                ),
                Err(e) => code = code.max(lat_error(o, input, &e)),
            }
        }
    }
    if !queries {
        let d = lat.duality_check();
        let mut details = json!({
            "presentation": lat.presentation.to_string(),
            "duality": d,
        });
        let mut text = format!(
            "presentation: {}\npoints: {}\nelements: {}\nmonotone maps on the spectrum: {}\nduality bijection: {}",
            lat.presentation, d.spectrum_points, d.elements, d.monotone_maps, d.bijection
        );
        if !duality_only {
            let elements: Vec<String> = lat
                .enumerate_elements()
                .iter()
                .map(|e| lat.to_term(e).to_string())
                .collect();
            text.push_str("\nelement list:");
            for e in &elements {
                text.push_str(&format!("\n  {e}"));
            }
            details["elements"] = json!(elements);
        }
        o.emit("lat", input, &d.bijection.to_string(), details, &text);
        if !d.bijection {
            code = FAILURE;
        }
    }
    code
}

fn shape(o: &mut Out, file: &Path, opts: &Options) -> i32 {
    let input = file.display().to_string();
    let src = match fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => return o.usage("shape", &input, &format!("cannot read: {e}")),
    };
    let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("sequent");
    let batch = match parse_sequents(&src, stem) {
        Ok(b) => b,
        Err(e) => {
            let msg = e.to_string();
            o.emit(
                "shape",
                &input,
                "error",
                json!({ "kind": e.kind(), "message": msg }),
                &format!("{input}: {}: {msg}", e.kind()),
            );
            return FAILURE;
        }
    };
    let report = shapes::report(&batch, opts);
    let ok = report.all_expectations_met();
    let details = serde_json::to_value(&report).expect("report serializes");
    let verdict = if ok { "ok" } else { "unexpected" };
    o.emit("shape", &input, verdict, details, &report.to_string());
    if ok {
        OK
    } else {
        FAILURE
    }
}

fn corpus(o: &mut Out, dir: &Path) -> i32 {
    let input = dir.display().to_string();
    match run_corpus(dir) {
        Ok(report) => {
            let ok = report.ok();
            let verdict = if ok {
                "pass".to_string()
            } else if !report.manifest_problems.is_empty() {
                ErrorKind::ManifestMismatch.as_str().to_string()
            } else {
                "fail".to_string()
            };
            let details = serde_json::to_value(&report).expect("report serializes");
            o.emit("corpus", &input, &verdict, details, &report.to_string());
            if ok {
                OK
            } else {
                FAILURE
            }
        }
        Err(e @ crate::corpus::CorpusError::Io { .. }) => o.usage("corpus", &input, &e.to_string()),
        Err(e) => {
            let msg = e.to_string();
            o.emit(
                "corpus",
                &input,
                "error",
                json!({ "kind": e.kind(), "message": msg }),
                &msg,
            );
            FAILURE
        }
    }
}
