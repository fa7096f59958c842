//! Command-line driver: batch computations, JSON persistence and table
//! regeneration. All output is deterministic (sorted structures,
//! canonical term order).

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::covering::{covering_rows, find_natural_e_lines, verify_covering_row};
use crate::duality::{dual_almost, family_shift, natural_ass_test, AlmostSaitoData, GenSaitoData};
use crate::error::{Error, Result};
use crate::exactalg::cyc::{parse_rat, CycNum, Rat};
use crate::groups::{build_group, rank2_duality_names};
use crate::saito::{check_ss_data, flat_coordinates, natural_saito, SaitoData};

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Parser)]
#[command(
    name = "saito-forge",
    about = "Exact Saito structures on reflection-group orbit spaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Catalog data for one group
    Group {
        #[command(subcommand)]
        sub: GroupCmd,
    },
    /// The induced flat connection as Delta-denominated matrices
    Connection {
        group: String,
        #[arg(long)]
        json: bool,
    },
    /// The polynomial Saito structure (optionally in flat coordinates)
    Saito {
        group: String,
        #[arg(long)]
        flat: bool,
        #[arg(long)]
        json: bool,
    },
    /// Flat coordinates and the frame change
    Flat {
        group: String,
        #[arg(long)]
        json: bool,
    },
    /// Re-run the axiom checks on a stored structure
    Verify { file: PathBuf },
    /// The dual almost Saito structure (with optional twist and shift)
    Dual {
        group: String,
        #[arg(long, default_value = "0")]
        lambda: String,
        #[arg(long, default_value = "")]
        r: String,
        #[arg(long, default_value = "0")]
        nu: String,
        #[arg(long)]
        json: bool,
    },
    /// Test a candidate unit field e for naturality
    TestE {
        group: String,
        #[arg(long)]
        e: String,
    },
    /// Enumerate the admissible unit lines
    SearchE { group: String },
    /// Verify covering-table rows for a group
    Cover {
        group: String,
        #[arg(long)]
        row: Option<usize>,
    },
    /// Regenerate the natural-structure tables for the catalog
    Tables {
        #[arg(long, default_value = "./tables")]
        out: PathBuf,
        /// Restrict to the named groups (repeatable); default is the
        /// whole rank-2 duality catalog
        #[arg(long)]
        only: Vec<String>,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Print degrees, invariants and the discriminant
    Info {
        name: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Serialize)]
pub struct Report {
    pub status: String,
    pub checks: Vec<ReportLine>,
    pub timing_ms: u128,
    pub reference: String,
}

#[derive(Serialize)]
pub struct ReportLine {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Report {
    fn new(reference: impl Into<String>) -> Self {
        Report {
            status: "pass".into(),
            checks: Vec::new(),
            timing_ms: 0,
            reference: reference.into(),
        }
    }

    fn add(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        if !ok {
            self.status = "fail".into();
        }
        self.checks.push(ReportLine {
            name: name.into(),
            ok,
            detail: detail.into(),
        });
    }

    fn passed(&self) -> bool {
        self.status == "pass"
    }
}

// ---- JSON persistence ----

#[derive(Serialize, Deserialize)]
pub struct Envelope {
    pub schema: String,
    pub kind: String,
    pub payload: serde_json::Value,
}

pub fn store<T: Serialize>(path: &Path, kind: &str, payload: &T) -> Result<()> {
    let env = Envelope {
        schema: SCHEMA_VERSION.into(),
        kind: kind.into(),
        payload: serde_json::to_value(payload)
            .map_err(|e| Error::ParseError(e.to_string()))?,
    };
    let text = serde_json::to_string_pretty(&env).map_err(|e| Error::ParseError(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Envelope> {
    let text = std::fs::read_to_string(path)?;
    let env: Envelope =
        serde_json::from_str(&text).map_err(|e| Error::ParseError(e.to_string()))?;
    if env.schema != SCHEMA_VERSION {
        return Err(Error::SchemaMismatch(format!(
            "expected {}, found {}",
            SCHEMA_VERSION, env.schema
        )));
    }
    Ok(env)
}

/// Parses one unit-field coefficient: a rational, optionally times one of
/// the named radicals (i, sqrt2, sqrt3, sqrt5, isqrt3, isqrt5, tau).
pub fn parse_cyc(s: &str) -> Result<CycNum> {
    let s = s.trim();
    let (num_part, rad_part) = match s.split_once('*') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (s, None),
    };
    // allow a bare radical name
    let radical = |name: &str| -> Option<CycNum> {
        match name {
            "i" | "I" => Some(CycNum::i()),
            "sqrt2" => Some(CycNum::sqrt2()),
            "sqrt3" => Some(CycNum::sqrt3()),
            "sqrt5" => Some(CycNum::sqrt5()),
            "isqrt3" => Some(CycNum::i_sqrt3()),
            "isqrt5" => Some(CycNum::i() * CycNum::sqrt5()),
            "tau" => Some(CycNum::tau()),
            _ => None,
        }
    };
    if let Some(r) = radical(num_part) {
        if rad_part.is_none() {
            return Ok(r);
        }
    }
    let base = parse_rat(num_part)
        .map(CycNum::from_rat)
        .ok_or_else(|| Error::Usage(format!("cannot parse coefficient '{}'", s)))?;
    match rad_part {
        None => Ok(base),
        Some(rp) => {
            let r =
                radical(rp).ok_or_else(|| Error::Usage(format!("unknown radical '{}'", rp)))?;
            Ok(base * r)
        }
    }
}

fn parse_rat_arg(s: &str, what: &str) -> Result<CycNum> {
    parse_rat(s)
        .map(CycNum::from_rat)
        .ok_or_else(|| Error::Usage(format!("cannot parse {} '{}'", what, s)))
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serialize"));
}

// ---- command bodies ----

fn cmd_group_info(name: &str, json: bool) -> Result<Report> {
    let g = build_group(name)?;
    let mut rep = Report::new(format!("catalog:{}", g.name));
    rep.add("build", true, g.name.clone());
    if json {
        let payload = json!({
            "name": g.name,
            "rank": g.rank,
            "degrees": g.degrees,
            "duality": g.is_duality,
            "max_deg_multiplicity": g.max_deg_multiplicity,
            "invariants": g.invariants,
            "discriminant_x": g.discriminant_x,
            "discriminant_u": g.discriminant_u,
        });
        print_json(&payload);
    } else {
        println!("group        {}", g.name);
        println!("degrees      {:?}", g.degrees);
        println!("duality      {}", g.is_duality);
        for (i, f) in g.invariants.iter().enumerate() {
            println!("x^{}          {}", i + 1, f);
        }
        println!("Delta(x)     {}", g.discriminant_x);
        println!("delta(u)     {}", g.discriminant_u);
    }
    Ok(rep)
}

fn cmd_connection(name: &str, json: bool) -> Result<Report> {
    let g = build_group(name)?;
    let fam = crate::connection::natural_connection(&g)?;
    crate::connection::check_ap(&fam)?;
    let mut rep = Report::new(format!("connection:{}", g.name));
    rep.add("flatness+pole-properties", true, "verified");
    if json {
        let payload = json!({
            "group": g.name,
            "Delta": g.discriminant_x,
            "P_alpha": fam.p_mats,
        });
        print_json(&payload);
    } else {
        println!("group {}", g.name);
        println!("Delta = {}", g.discriminant_x);
        for (a, m) in fam.p_mats.iter().enumerate() {
            println!("Delta * Omega_{} =\n{}", a + 1, m);
        }
    }
    Ok(rep)
}

#[derive(Serialize)]
struct SaitoJson<'a> {
    #[serde(rename = "Gamma")]
    gamma: &'a Vec<crate::exactalg::mat::Mat<crate::exactalg::mpoly::MPoly>>,
    #[serde(rename = "C")]
    c: &'a Vec<crate::exactalg::mat::Mat<crate::exactalg::mpoly::MPoly>>,
    degrees: &'a Vec<i64>,
    unit: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    flat_change: Option<crate::exactalg::mat::Mat<crate::exactalg::mpoly::MPoly>>,
}

fn cmd_saito(name: &str, flat: bool, json: bool) -> Result<Report> {
    let st = natural_saito(name)?;
    let mut rep = Report::new(format!("saito:{}", st.group.name));
    let ss = check_ss_data(&st.saito);
    rep.add("axioms", ss.all_ok(), "SS residuals identically zero");
    let flat_data = if flat {
        Some(flat_coordinates(&st)?)
    } else {
        None
    };
    if json {
        let payload = SaitoJson {
            gamma: &st.saito.gamma,
            c: &st.saito.c_mats,
            degrees: &st.saito.degrees,
            unit: st.saito.unit_index,
            flat_change: flat_data.as_ref().map(|f| f.x_mat.clone()),
        };
        print_json(&payload);
    } else {
        println!("group {}", st.group.name);
        for (a, m) in st.saito.gamma.iter().enumerate() {
            println!("Gamma_{} =\n{}", a + 1, m);
        }
        for (a, m) in st.saito.c_mats.iter().enumerate() {
            println!("C_{} =\n{}", a + 1, m);
        }
        if let Some(f) = &flat_data {
            for (i, t) in f.t_in_u.iter().enumerate() {
                println!("t^{} = {}", i + 1, t);
            }
        }
    }
    Ok(rep)
}

fn cmd_flat(name: &str, json: bool) -> Result<Report> {
    let st = natural_saito(name)?;
    let flat = flat_coordinates(&st)?;
    let mut rep = Report::new(format!("flat:{}", st.group.name));
    let chk = crate::saito::check_flat_frame(&flat);
    rep.add("flat-frame-axioms", chk.all_ok(), "residuals zero");
    if json {
        print_json(&flat);
    } else {
        println!("group {}", flat.group_name);
        for (i, t) in flat.t_in_u.iter().enumerate() {
            println!("t^{} = {}", i + 1, t);
        }
        println!("X =\n{}", flat.x_mat);
        for (a, m) in flat.c_t.iter().enumerate() {
            println!("C^t_{} =\n{}", a + 1, m);
        }
    }
    Ok(rep)
}

fn cmd_verify(file: &Path) -> Result<Report> {
    let env = load(file)?;
    let mut rep = Report::new(format!("verify:{}", env.kind));
    match env.kind.as_str() {
        "SaitoData" => {
            let data: SaitoData = serde_json::from_value(env.payload)
                .map_err(|e| Error::ParseError(e.to_string()))?;
            let chk = check_ss_data(&data);
            for item in &chk.items {
                rep.add(&item.name, item.ok, "");
            }
        }
        "AlmostSaitoData" => {
            let data: AlmostSaitoData = serde_json::from_value(env.payload)
                .map_err(|e| Error::ParseError(e.to_string()))?;
            let chk = data.check();
            for item in &chk.items {
                rep.add(&item.name, item.ok, "");
            }
        }
        other => {
            return Err(Error::SchemaMismatch(format!(
                "cannot verify payload kind '{}'",
                other
            )))
        }
    }
    Ok(rep)
}

fn cmd_dual(name: &str, lambda: &str, r: &str, nu: &str, json: bool) -> Result<Report> {
    let st = natural_saito(name)?;
    let lambda = parse_rat_arg(lambda, "lambda")?;
    let r = if r.is_empty() {
        CycNum::from_rat(Rat::new(1.into(), st.group.d1().into()))
    } else {
        parse_rat_arg(r, "r")?
    };
    let nu = parse_rat_arg(nu, "nu")?;
    let gen = GenSaitoData::from_polynomial(&st.saito);
    let mut dual = dual_almost(&gen, &lambda, &r)?;
    if !nu.is_zero() {
        dual = family_shift(&dual, &CycNum::zero(), &nu)?;
    }
    let chk = dual.check();
    let mut rep = Report::new(format!("dual:{}", st.group.name));
    for item in &chk.items {
        rep.add(&item.name, item.ok, "");
    }
    if json {
        print_json(&dual);
    } else {
        println!(
            "dual almost Saito structure of {} (lambda = {}, r = {}, nu shift = {})",
            st.group.name, lambda, r, nu
        );
        println!(
            "axioms: {}",
            if chk.all_ok() { "pass" } else { "FAIL" }
        );
    }
    Ok(rep)
}

fn cmd_test_e(name: &str, e_arg: &str) -> Result<Report> {
    let g = build_group(name)?;
    let fam = crate::connection::natural_connection(&g)?;
    let comps: Vec<CycNum> = e_arg
        .split(',')
        .map(parse_cyc)
        .collect::<Result<Vec<_>>>()?;
    if comps.len() != g.rank {
        return Err(Error::Usage(format!(
            "e needs {} components, got {}",
            g.rank,
            comps.len()
        )));
    }
    let (verdict, witness) = natural_ass_test(&g, &fam, &comps)?;
    let mut rep = Report::new(format!("test-e:{}", g.name));
    let ok = verdict == crate::duality::NaturalVerdict::Natural;
    rep.add(
        "naturality",
        ok,
        format!("{:?}", verdict),
    );
    println!("verdict: {:?}", verdict);
    if let Some(w) = witness {
        println!("residual witness: {}", w);
    }
    Ok(rep)
}

fn cmd_search_e(name: &str) -> Result<Report> {
    let lines = find_natural_e_lines(name)?;
    let mut rep = Report::new(format!("search-e:{}", name));
    rep.add("line-count", true, format!("{}", lines.len()));
    println!("{} admissible line(s):", lines.len());
    for l in &lines {
        let parts: Vec<String> = l.iter().map(|c| c.to_string()).collect();
        println!("  [{}]", parts.join(" : "));
    }
    Ok(rep)
}

fn cmd_cover(name: &str, row: Option<usize>) -> Result<Report> {
    let rows = covering_rows(name)?;
    let mut rep = Report::new(format!("cover:{}", name));
    for (i, r) in rows.iter().enumerate() {
        if let Some(want) = row {
            if i + 1 != want {
                continue;
            }
        }
        let v = verify_covering_row(r)?;
        rep.add(
            format!("row {} ({} -> {}, {})", i + 1, v.source, v.target, v.map_desc),
            v.ok(),
            format!("{} logarithmic entr(ies)", v.log_entry_count),
        );
        println!(
            "row {}: {} -> {} via {}: {}",
            i + 1,
            v.source,
            v.target,
            v.map_desc,
            if v.ok() { "verified" } else { "FAILED" }
        );
    }
    Ok(rep)
}

fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var("SAITO_FORGE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or_else(num_threads_default);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

fn num_threads_default() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

#[derive(Serialize)]
struct TableRow {
    group: String,
    t1_in_u: String,
    t2_in_u: String,
    mult_t2_t2: Vec<String>,
}

fn cmd_tables(out: &Path, only: &[String]) -> Result<Report> {
    std::fs::create_dir_all(out)?;
    let names: Vec<String> = if only.is_empty() {
        rank2_duality_names()
    } else {
        only.to_vec()
    };
    let pool = thread_pool();
    let mut results: Vec<(usize, Result<TableRow>)> = pool.install(|| {
        use rayon::prelude::*;
        names
            .par_iter()
            .enumerate()
            .map(|(i, name)| {
                let row = (|| -> Result<TableRow> {
                    let st = natural_saito(name)?;
                    let flat = flat_coordinates(&st)?;
                    let n = st.group.rank;
                    let mult: Vec<String> = (0..n)
                        .map(|gam| format!("{}", flat.c_t[n - 1].at(gam, n - 1)))
                        .collect();
                    Ok(TableRow {
                        group: name.clone(),
                        t1_in_u: format!("{}", flat.t_in_u[0]),
                        t2_in_u: format!("{}", flat.t_in_u[1]),
                        mult_t2_t2: mult,
                    })
                })();
                (i, row)
            })
            .collect()
    });
    results.sort_by_key(|(i, _)| *i);

    let mut rep = Report::new("tables:natural-structures");
    let mut rows = Vec::new();
    for (_, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                rep.add("table-row", false, e.to_string());
            }
        }
    }
    let json_path = out.join("natural_structures.json");
    store(&json_path, "NaturalStructureTable", &rows)?;
    let mut text = String::new();
    for row in &rows {
        text.push_str(&format!("{}\n", row.group));
        text.push_str(&format!("  t^1 = {}\n", row.t1_in_u));
        text.push_str(&format!("  t^2 = {}\n", row.t2_in_u));
        text.push_str(&format!(
            "  dt2 * dt2 = ({}) d_t1 + ({}) d_t2\n",
            row.mult_t2_t2[0], row.mult_t2_t2[1]
        ));
    }
    let mut f = std::fs::File::create(out.join("natural_structures.txt"))?;
    f.write_all(text.as_bytes())?;
    rep.add("rows", true, format!("{}", rows.len()));

    // covering tables (skipped when a group filter is active)
    if only.is_empty() {
        let targets = [
            "G(6,3,2)",
            "G(8,4,2)",
            "G(4,2,2)",
            "G(6,2,2)",
            "G7",
            "G11",
            "G15",
            "G19",
        ];
        let mut cov_rows = Vec::new();
        let mut cov_text = String::new();
        for target in targets {
            for (i, row) in covering_rows(target)?.iter().enumerate() {
                let v = verify_covering_row(row)?;
                cov_text.push_str(&format!(
                    "{} row {}: e from {}, map {}: {}\n",
                    target,
                    i + 1,
                    v.source,
                    v.map_desc,
                    if v.ok() { "verified" } else { "FAILED" }
                ));
                rep.add(
                    format!("cover {} row {}", target, i + 1),
                    v.ok(),
                    v.map_desc.clone(),
                );
                cov_rows.push(v);
            }
        }
        store(&out.join("coverings.json"), "CoveringTable", &cov_rows)?;
        let mut f = std::fs::File::create(out.join("coverings.txt"))?;
        f.write_all(cov_text.as_bytes())?;
    }

    println!("wrote {} rows under {}", rows.len(), out.display());
    Ok(rep)
}

/// Entry point used by the binary; returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    let mut argv: Vec<String> = vec!["saito-forge".into()];
    argv.extend(args.iter().cloned());
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let t0 = Instant::now();
    let outcome = match &cli.command {
        Command::Group { sub } => match sub {
            GroupCmd::Info { name, json } => cmd_group_info(name, *json),
        },
        Command::Connection { group, json } => cmd_connection(group, *json),
        Command::Saito { group, flat, json } => cmd_saito(group, *flat, *json),
        Command::Flat { group, json } => cmd_flat(group, *json),
        Command::Verify { file } => cmd_verify(file),
        Command::Dual {
            group,
            lambda,
            r,
            nu,
            json,
        } => cmd_dual(group, lambda, r, nu, *json),
        Command::TestE { group, e } => cmd_test_e(group, e),
        Command::SearchE { group } => cmd_search_e(group),
        Command::Cover { group, row } => cmd_cover(group, *row),
        Command::Tables { out, only } => cmd_tables(out, only),
    };
    match outcome {
        Ok(mut rep) => {
            rep.timing_ms = t0.elapsed().as_millis();
            eprintln!(
                "[{}] {} in {} ms",
                rep.status, rep.reference, rep.timing_ms
            );
            if rep.passed() {
                0
            } else {
                1
            }
        }
        Err(Error::Usage(msg)) => {
            eprintln!("usage error: {}", msg);
            2
        }
        Err(e) => {
            eprintln!("error: {}", e);
            1
        }
    }
}
