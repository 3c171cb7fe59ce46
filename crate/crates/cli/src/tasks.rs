use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use hermlat::enumeration::{enumerate_unimodular, ClassList, EnumConfig};
use hermlat::moduli::{enumerate_moduli_q, has_field_of_moduli_q, table_row, ActionSet, ModuliReport, TableRow};
use hermlat::{is_isometric, HermitianLattice, IdealClassGroup, Order};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::{Cli, Format, Outcome, Task, EXIT_INCOMPLETE, EXIT_NEGATIVE, EXIT_OK};

pub enum Failure {
    /// Bad flags: reported through clap, exit 2.
    Usage(String),
    /// Unreadable input file: exit 2.
    Parse(String),
}

pub fn run(task: Task, cli: &Cli) -> Result<Outcome, Failure> {
    match task {
        Task::Isometry => isometry(cli),
        Task::Moduli if !cli.files.is_empty() => moduli_file(cli),
        _ => {
            if !cli.files.is_empty() {
                return Err(Failure::Usage(format!("{task:?} takes no lattice files").to_lowercase()));
            }
            let discs = discriminants(cli)?;
            match task {
                Task::Classgroup => Ok(classgroup(cli, &discs)),
                Task::Enumerate => enumerate(cli, &discs),
                Task::Moduli => moduli(cli, &discs),
                Task::Table => table(cli, &discs),
                Task::Isometry => unreachable!("handled above"),
            }
        }
    }
}

/// Requested orders, sorted by class number and then by `|disc|`.
fn discriminants(cli: &Cli) -> Result<Vec<Order>, Failure> {
    let mut out = Vec::new();
    for d in &cli.disc {
        out.push(Order::new(*d).map_err(|e| Failure::Usage(e.to_string()))?);
    }
    if let Some(r) = &cli.disc_range {
        let (a, b) = r
            .split_once("..")
            .and_then(|(a, b)| Some((a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?)))
            .ok_or_else(|| Failure::Usage(format!("--disc-range expects A..B, got {r:?}")))?;
        let (lo, hi) = (a.min(b), a.max(b));
        out.extend((lo..=hi).filter_map(|d| Order::new(d).ok()));
    }
    if out.is_empty() {
        return Err(Failure::Usage("give --disc or --disc-range".into()));
    }
    let mut keyed: Vec<(usize, i64, Order)> = out
        .into_par_iter()
        .map(|o| (IdealClassGroup::new(o).class_number(), -o.disc(), o))
        .collect();
    keyed.sort_by_key(|(h, d, _)| (*h, *d));
    keyed.dedup_by_key(|(_, d, _)| *d);
    Ok(keyed.into_iter().map(|(_, _, o)| o).collect())
}

fn rank(cli: &Cli, allowed: &[usize]) -> Result<usize, Failure> {
    match cli.g {
        Some(g) if allowed.contains(&g) => Ok(g),
        Some(g) => Err(Failure::Usage(format!("--g {g} is not supported here (allowed: {allowed:?})"))),
        None => Err(Failure::Usage("--g is required".into())),
    }
}

fn config(cli: &Cli) -> EnumConfig {
    EnumConfig {
        free_only: cli.free_only,
        indecomposable_only: cli.indecomposable_only,
        max_candidates: if cli.force { None } else { cli.max_candidates },
        max_seconds: if cli.force { None } else { Some(cli.max_seconds) },
        seed: cli.seed,
    }
}

fn action_set(cli: &Cli) -> ActionSet {
    if cli.all_classes {
        ActionSet::AllClasses
    } else {
        ActionSet::Generators
    }
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes") + "\n"
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// Left-aligned columns separated by two spaces.
fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let n = header.len();
    let width: Vec<usize> = (0..n)
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (c, cell) in cells.iter().enumerate() {
            if c + 1 == n {
                s.push_str(cell);
            } else {
                let pad = width[c] - cell.chars().count();
                write!(s, "{cell}{}  ", " ".repeat(pad)).unwrap();
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

#[derive(Serialize)]
struct ClassGroupRow {
    disc: i64,
    class_number: usize,
    exponent: u64,
    generators: Vec<String>,
    representatives: Vec<String>,
}

fn classgroup(cli: &Cli, discs: &[Order]) -> Outcome {
    let rows: Vec<ClassGroupRow> = discs
        .par_iter()
        .map(|o| {
            let cg = IdealClassGroup::new(*o);
            ClassGroupRow {
                disc: o.disc(),
                class_number: cg.class_number(),
                exponent: cg.exponent(),
                generators: cg.generators().iter().map(|a| a.text()).collect(),
                representatives: cg.representatives().iter().map(|a| a.text()).collect(),
            }
        })
        .collect();
    let cells = |r: &ClassGroupRow| {
        vec![
            r.class_number.to_string(),
            r.disc.to_string(),
            r.exponent.to_string(),
            r.generators.join(" "),
        ]
    };
    let text = match cli.format {
        Format::Json => to_json(&rows),
        Format::Csv => csv_text(&["h_R", "disc", "exponent", "generators"], rows.iter().map(cells)),
        Format::Text => aligned(&["h_R", "Δ", "exponent", "generators"], &rows.iter().map(cells).collect::<Vec<_>>()),
    };
    Outcome { text, code: EXIT_OK }
}

fn enumerate(cli: &Cli, discs: &[Order]) -> Result<Outcome, Failure> {
    let g = rank(cli, &[1, 2, 3])?;
    let cfg = config(cli);
    let lists: Vec<Result<ClassList, String>> = discs
        .par_iter()
        .map(|o| enumerate_unimodular(*o, g, &cfg).map_err(|e| e.to_string()))
        .collect();
    let lists: Vec<ClassList> = lists.into_iter().collect::<Result<_, _>>().map_err(Failure::Usage)?;
    let complete = lists.iter().all(|l| l.complete);
    let count = |l: &ClassList| if l.complete { l.reps.len().to_string() } else { "?".into() };
    let text = match cli.format {
        Format::Json => to_json(&lists),
        Format::Csv => csv_text(
            &["disc", "g", "free_only", "indecomposable_only", "classes"],
            lists.iter().map(|l| {
                vec![
                    l.disc.to_string(),
                    l.rank.to_string(),
                    l.free_only.to_string(),
                    l.indecomposable_only.to_string(),
                    count(l),
                ]
            }),
        ),
        Format::Text => {
            let mut s = String::new();
            for l in &lists {
                writeln!(s, "Δ = {}, g = {}: {} classes", l.disc, l.rank, count(l)).unwrap();
                for r in &l.reps {
                    writeln!(s, "  {}", r.text()).unwrap();
                }
            }
            s
        }
    };
    Ok(Outcome { text, code: if complete { EXIT_OK } else { EXIT_INCOMPLETE } })
}

fn read_lattice(p: &Path) -> Result<HermitianLattice, Failure> {
    let s = std::fs::read_to_string(p).map_err(|e| Failure::Parse(format!("{}: {e}", p.display())))?;
    HermitianLattice::parse(&s).map_err(|e| Failure::Parse(format!("{}: {e}", p.display())))
}

fn isometry(cli: &Cli) -> Result<Outcome, Failure> {
    let [a, b] = cli.files.as_slice() else {
        return Err(Failure::Usage("isometry takes exactly two lattice files".into()));
    };
    let (l1, l2) = (read_lattice(a)?, read_lattice(b)?);
    let (value, line, code) = match is_isometric(&l1, &l2) {
        Ok(w) => (
            json!({"isometric": true, "witness": w.to_json()}),
            "isometric".to_string(),
            EXIT_OK,
        ),
        Err(s) => (
            json!({"isometric": false, "separation": s}),
            format!("not isometric: {s}"),
            EXIT_NEGATIVE,
        ),
    };
    let text = match cli.format {
        Format::Json => to_json(&value),
        Format::Csv => csv_text(
            &["isometric", "separation"],
            [vec![
                value["isometric"].to_string(),
                value.get("separation").map(|s| s.as_str().unwrap_or_default().to_string()).unwrap_or_default(),
            ]],
        ),
        Format::Text => line + "\n",
    };
    Ok(Outcome { text, code })
}

fn report_line(r: &ModuliReport) -> String {
    let checks: Vec<String> = r
        .checks
        .iter()
        .map(|c| format!("{}={}", c.action, if c.isometric { "yes" } else { "no" }))
        .collect();
    let why = r.prechecks.reason().map(|s| format!(" ({s})")).unwrap_or_default();
    format!("{} {}{} {}", r.verdict, r.lattice.text(), why, checks.join(" "))
}

fn moduli_file(cli: &Cli) -> Result<Outcome, Failure> {
    let [p] = cli.files.as_slice() else {
        return Err(Failure::Usage("moduli takes at most one lattice file".into()));
    };
    let l = read_lattice(p)?;
    if !l.is_unimodular() {
        return Err(Failure::Usage(format!("{}: lattice is not unimodular", p.display())));
    }
    let cg = IdealClassGroup::new(l.order());
    let r = has_field_of_moduli_q(&cg, &l, action_set(cli));
    let text = match cli.format {
        Format::Json => to_json(&r),
        Format::Csv => csv_text(&["verdict", "lattice"], [vec![r.verdict.to_string(), r.lattice.text()]]),
        Format::Text => report_line(&r) + "\n",
    };
    Ok(Outcome { text, code: EXIT_OK })
}

#[derive(Serialize)]
struct ModuliOut {
    disc: i64,
    g: usize,
    complete: bool,
    reports: Vec<ModuliReport>,
}

fn moduli(cli: &Cli, discs: &[Order]) -> Result<Outcome, Failure> {
    let g = rank(cli, &[1, 2, 3])?;
    let (cfg, set) = (config(cli), action_set(cli));
    let runs: Vec<Result<ModuliOut, String>> = discs
        .par_iter()
        .map(|o| {
            let run = enumerate_moduli_q(*o, g, &cfg, set).map_err(|e| e.to_string())?;
            Ok(ModuliOut { disc: o.disc(), g, complete: run.complete(), reports: run.reports })
        })
        .collect();
    let runs: Vec<ModuliOut> = runs.into_iter().collect::<Result<_, _>>().map_err(Failure::Usage)?;
    let complete = runs.iter().all(|r| r.complete);
    let text = match cli.format {
        Format::Json => to_json(&runs),
        Format::Csv => csv_text(
            &["disc", "g", "verdict", "free", "lattice"],
            runs.iter().flat_map(|m| {
                m.reports.iter().map(move |r| {
                    vec![
                        m.disc.to_string(),
                        m.g.to_string(),
                        r.verdict.to_string(),
                        r.lattice.is_free().to_string(),
                        r.lattice.text(),
                    ]
                })
            }),
        ),
        Format::Text => {
            let mut s = String::new();
            for m in &runs {
                let q = m.reports.iter().filter(|r| r.verdict).count();
                let shown = if m.complete { q.to_string() } else { "?".into() };
                writeln!(s, "Δ = {}, g = {}: {shown} of {} classes", m.disc, m.g, m.reports.len()).unwrap();
                for r in &m.reports {
                    writeln!(s, "  {}", report_line(r)).unwrap();
                }
            }
            s
        }
    };
    Ok(Outcome { text, code: if complete { EXIT_OK } else { EXIT_INCOMPLETE } })
}

fn table(cli: &Cli, discs: &[Order]) -> Result<Outcome, Failure> {
    let g = rank(cli, &[2, 3])?;
    let (cfg, set) = (config(cli), action_set(cli));
    let rows: Vec<(Order, Result<TableRow, String>, f64)> = discs
        .par_iter()
        .map(|o| {
            let t = Instant::now();
            let r = table_row(*o, g, &cfg, set).map_err(|e| e.to_string());
            (*o, r, t.elapsed().as_secs_f64())
        })
        .collect();
    let complete = rows.iter().all(|(_, r, _)| matches!(r, Ok(t) if t.complete));
    let code = if complete { EXIT_OK } else { EXIT_INCOMPLETE };
    if cli.format == Format::Json {
        let v: Vec<serde_json::Value> = rows
            .iter()
            .map(|(o, r, secs)| match r {
                Ok(t) => json!({"row": t, "seconds": secs}),
                Err(e) => json!({"disc": o.disc(), "g": g, "error": e}),
            })
            .collect();
        return Ok(Outcome { text: to_json(&v), code });
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|(o, r, _)| match r {
            Ok(t) => {
                let shown = |x: usize| if t.complete { x.to_string() } else { "?".into() };
                let mut c = vec![t.class_number.to_string(), t.disc.to_string()];
                if let Some(p) = t.p {
                    c.push(shown(p));
                }
                c.push(shown(t.count_q));
                c.push(shown(t.count));
                c
            }
            Err(e) => {
                let mut c = vec!["?".into(), o.disc().to_string()];
                c.extend(std::iter::repeat("?".to_string()).take(if g == 2 { 3 } else { 2 }));
                let last = c.len() - 1;
                c[last] = format!("? error: {e}");
                c
            }
        })
        .collect();
    let text = match (cli.format, g) {
        (Format::Csv, 2) => csv_text(&["h_R", "disc", "P", "A_RQ", "A_R"], cells),
        (Format::Csv, _) => csv_text(&["h_R", "disc", "A_RQ", "A_R_free"], cells),
        (_, 2) => aligned(&["h_R", "Δ", "𝒫", "#A_{R,ℚ}", "#A_R"], &cells),
        _ => aligned(&["h_R", "Δ", "#A_{R,ℚ}", "#A_R^free"], &cells),
    };
    Ok(Outcome { text, code })
}
