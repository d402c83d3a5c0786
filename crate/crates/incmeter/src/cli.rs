//! Command-line surface: manifest-driven measurement, threshold
//! decisions, explanation dumps, KB export, postulate checking, and
//! oracle spot checks.
//!
//! Exit codes: 0 success (and a true decision), 1 a false decision or a
//! failed check, 2 and above errors (I/O, parsing, validation).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value as Json};

use crate::constraint::ConstraintSet;
use crate::error::Error;
use crate::gen::InstanceGen;
use crate::kb::{transform, PropKb};
use crate::measure::{measure_all, Evaluator, Family, MeasureId, MeasureKind, ALL_KINDS};
use crate::model::{Database, TupleSet};
use crate::oracle::{
    oracle_db_measure, oracle_mi, oracle_prop_measure, OracleBounds,
};
use crate::postulate::{check_family, table_report, HarnessConfig};
use crate::rational::MeasureValue;
use crate::schema_io::Manifest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "incmeter", about = "Inconsistency measures for relational data under denial constraints", version)]
pub struct Cli {
    /// Worker threads for grounding and postulate trials (0 = default).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct ManifestOpt {
    /// Manifest file naming the schema, constraints, and data files.
    #[arg(long)]
    pub manifest: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute inconsistency measures and print a JSON report.
    Measure {
        #[command(flatten)]
        manifest: ManifestOpt,
        /// Comma-separated measure names like db:IM,prop:Isharp, or
        /// "all".
        #[arg(long, default_value = "all")]
        measures: String,
        /// Include the computed intermediates (MI edges, MCS, ...) in
        /// the report.
        #[arg(long)]
        evidence: bool,
        /// Include the probability distribution witnessing the eta
        /// measure.
        #[arg(long)]
        witness: bool,
        /// Write the JSON here instead of stdout ("-" for stdout).
        #[arg(long, default_value = "-")]
        json: String,
    },
    /// Decide a threshold question about one measure.
    Decide {
        #[command(flatten)]
        manifest: ManifestOpt,
        /// Measure name, e.g. db:IH.
        #[arg(long)]
        measure: String,
        /// lv: measure >= v; uv: measure <= v; ev: measure = v.
        #[arg(long)]
        op: String,
        /// Exact threshold: integer, p/q, decimal, or inf.
        #[arg(long)]
        value: String,
    },
    /// Dump minimal inconsistent sets, maximal consistent subsets, and
    /// the tuple classification as JSON.
    Explain {
        #[command(flatten)]
        manifest: ManifestOpt,
        /// Also enumerate maximal consistent subsets.
        #[arg(long, default_value_t = true)]
        mcs: bool,
        #[arg(long, default_value = "-")]
        json: String,
    },
    /// Export the propositional knowledge base.
    Transform {
        #[command(flatten)]
        manifest: ManifestOpt,
        /// Output path ("-" for stdout).
        #[arg(long, default_value = "-")]
        out: String,
        /// Emit the clause-per-line text format instead of JSON.
        #[arg(long)]
        dimacs_like: bool,
    },
    /// Machine-check the postulate tables.
    CheckPostulates {
        /// db, prop, or both.
        #[arg(long, default_value = "both")]
        family: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the rendered table here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Counterexample store directory.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Compare every optimized measure against the brute-force oracles
    /// on random instances.
    OracleCheck {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest generated instance (above the default the oracles get
        /// slow fast).
        #[arg(long, default_value_t = 6)]
        max_tuples: usize,
        /// Where to dump a reproduction bundle on mismatch.
        #[arg(long, default_value = "oracle-mismatch")]
        dump_dir: PathBuf,
    },
}

pub fn run(cli: Cli) -> i32 {
    if cli.threads > 0 {
        // Ignore failure: the global pool can only be set once.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, Error> {
    match cmd {
        Command::Measure {
            manifest,
            measures,
            evidence,
            witness,
            json,
        } => cmd_measure(&manifest.manifest, &measures, evidence, witness, &json),
        Command::Decide {
            manifest,
            measure,
            op,
            value,
        } => cmd_decide(&manifest.manifest, &measure, &op, &value),
        Command::Explain { manifest, mcs, json } => cmd_explain(&manifest.manifest, mcs, &json),
        Command::Transform {
            manifest,
            out,
            dimacs_like,
        } => cmd_transform(&manifest.manifest, &out, dimacs_like),
        Command::CheckPostulates {
            family,
            trials,
            seed,
            report,
            store,
        } => cmd_check_postulates(&family, trials, seed, report.as_deref(), store),
        Command::OracleCheck {
            trials,
            seed,
            max_tuples,
            dump_dir,
        } => cmd_oracle_check(trials, seed, max_tuples, &dump_dir),
    }
}

fn load(manifest: &Path) -> Result<(Database, ConstraintSet), Error> {
    Manifest::read(manifest)?.load()
}

fn parse_measures(spec: &str) -> Result<Vec<MeasureId>, Error> {
    if spec.trim() == "all" {
        return Ok(MeasureId::all());
    }
    spec.split(',')
        .map(|s| {
            MeasureId::parse(s.trim())
                .ok_or_else(|| Error::Cli(format!("unknown measure `{}`", s.trim())))
        })
        .collect()
}

fn write_output(target: &str, content: &str) -> Result<(), Error> {
    if target == "-" {
        println!("{content}");
        Ok(())
    } else {
        std::fs::write(target, content).map_err(|e| Error::io(target.to_string(), e))
    }
}

fn tuple_set_json(db: &Database, s: &TupleSet) -> Json {
    Json::Array(
        s.iter()
            .map(|id| {
                json!({
                    "id": id.to_string(),
                    "tuple": db.tuple(*id).render(),
                })
            })
            .collect(),
    )
}

/// The measure report as canonical JSON: exact rationals, sorted keys.
pub fn measure_report_json(
    db: &Database,
    cs: &ConstraintSet,
    which: &[MeasureId],
    evidence: bool,
    witness: bool,
) -> Result<Json, Error> {
    let report = measure_all(db, cs, which)?;
    let mut values = Map::new();
    for (id, v) in &report.values {
        values.insert(id.to_string(), v.to_json());
    }
    let mut root = Map::new();
    root.insert("measures".into(), Json::Object(values));
    if evidence {
        let mut ev = Map::new();
        if let Some(edges) = &report.evidence.mi_edges {
            ev.insert(
                "mi".into(),
                Json::Array(
                    edges
                        .iter()
                        .map(|(e, names)| {
                            json!({
                                "tuples": tuple_set_json(db, e),
                                "constraints": names.iter().cloned().collect::<Vec<_>>(),
                            })
                        })
                        .collect(),
                ),
            );
        }
        if let Some(mcs) = &report.evidence.mcs {
            ev.insert(
                "mcs".into(),
                Json::Array(mcs.iter().map(|s| tuple_set_json(db, s)).collect()),
            );
        }
        if let Some(cls) = &report.evidence.classification {
            ev.insert(
                "classification".into(),
                json!({
                    "problematic": tuple_set_json(db, &cls.problematic),
                    "free": tuple_set_json(db, &cls.free),
                    "contradictory": tuple_set_json(db, &cls.contradictory),
                }),
            );
        }
        if let Some(hs) = &report.evidence.hitting_set {
            ev.insert("hitting_set".into(), tuple_set_json(db, hs));
        }
        root.insert("evidence".into(), Json::Object(ev));
    }
    if witness {
        if let Some(w) = &report.evidence.lp_witness {
            root.insert(
                "eta_witness".into(),
                Json::Array(
                    w.iter()
                        .map(|(s, p)| {
                            json!({
                                "mcs": tuple_set_json(db, s),
                                "probability": {"num": p.numer().to_string(), "den": p.denom().to_string()},
                            })
                        })
                        .collect(),
                ),
            );
        }
    }
    Ok(Json::Object(root))
}

fn cmd_measure(
    manifest: &Path,
    measures: &str,
    evidence: bool,
    witness: bool,
    json_target: &str,
) -> Result<i32, Error> {
    let (db, cs) = load(manifest)?;
    let which = parse_measures(measures)?;
    let report = measure_report_json(&db, &cs, &which, evidence, witness)?;
    write_output(json_target, &serde_json::to_string_pretty(&report).unwrap())?;
    Ok(EXIT_OK)
}

fn cmd_decide(manifest: &Path, measure: &str, op: &str, value: &str) -> Result<i32, Error> {
    let id = MeasureId::parse(measure)
        .ok_or_else(|| Error::Cli(format!("unknown measure `{measure}`")))?;
    let threshold = MeasureValue::parse(value).map_err(Error::Cli)?;
    if !matches!(op, "lv" | "uv" | "ev") {
        return Err(Error::Cli(format!("unknown decision op `{op}`")));
    }
    if op == "lv" && threshold <= MeasureValue::zero() {
        return Err(Error::Cli("lv requires a threshold greater than zero".into()));
    }
    let (db, cs) = load(manifest)?;
    let ev = Evaluator::new(&db, &cs);
    let actual = ev.measure(id)?;
    let verdict = match op {
        "lv" => actual >= threshold,
        "uv" => actual <= threshold,
        _ => actual == threshold,
    };
    println!("{verdict}");
    Ok(if verdict { EXIT_OK } else { EXIT_FALSE })
}

fn cmd_explain(manifest: &Path, mcs: bool, json_target: &str) -> Result<i32, Error> {
    let (db, cs) = load(manifest)?;
    let ev = Evaluator::new(&db, &cs);
    let h = ev.hypergraph();
    let cls = ev.classification();
    let mut root = Map::new();
    root.insert(
        "mi".into(),
        Json::Array(
            h.edges
                .iter()
                .zip(h.witnesses.iter())
                .map(|(e, names)| {
                    json!({
                        "tuples": tuple_set_json(&db, e),
                        "constraints": names.iter().cloned().collect::<Vec<_>>(),
                    })
                })
                .collect(),
        ),
    );
    root.insert(
        "classification".into(),
        json!({
            "problematic": tuple_set_json(&db, &cls.problematic),
            "free": tuple_set_json(&db, &cls.free),
            "contradictory": tuple_set_json(&db, &cls.contradictory),
        }),
    );
    if mcs {
        root.insert(
            "mcs".into(),
            Json::Array(ev.mcs().iter().map(|s| tuple_set_json(&db, s)).collect()),
        );
    }
    write_output(
        json_target,
        &serde_json::to_string_pretty(&Json::Object(root)).unwrap(),
    )?;
    Ok(EXIT_OK)
}

/// JSON form of the transformed KB: the atom table plus formulas as
/// arrays of clauses (atom ids).
pub fn kb_json(db: &Database, kb: &PropKb) -> Json {
    let atoms: Vec<Json> = kb
        .atom_tuples
        .iter()
        .enumerate()
        .map(|(i, t)| {
            json!({
                "id": i,
                "relation": t.relation,
                "values": t.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "tuple": t.render(),
            })
        })
        .collect();
    let formulas: Vec<Json> = kb
        .formulas
        .iter()
        .map(|f| {
            json!({
                "sources": f.sources.iter().cloned().collect::<Vec<_>>(),
                "clauses": f
                    .clauses
                    .iter()
                    .map(|c| c.iter().copied().collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    let _ = db;
    json!({"atoms": atoms, "formulas": formulas})
}

/// Clause-per-line text export: `a <id> <tuple>` lines declare atoms,
/// `f <names>` opens a formula, and each `c` line lists one clause as
/// negated 1-based atom ids.
pub fn kb_dimacs_like(kb: &PropKb) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "p incmeter-kb {} {}\n",
        kb.atom_count(),
        kb.formula_count()
    ));
    for (i, t) in kb.atom_tuples.iter().enumerate() {
        out.push_str(&format!("a {} {}\n", i + 1, t.render()));
    }
    for f in &kb.formulas {
        out.push_str(&format!(
            "f {}\n",
            f.sources.iter().cloned().collect::<Vec<_>>().join(",")
        ));
        for clause in &f.clauses {
            let lits: Vec<String> = clause.iter().map(|a| format!("-{}", a + 1)).collect();
            out.push_str(&format!("c {}\n", lits.join(" ")));
        }
    }
    out
}

/// Rebuilds the structural content of an exported KB for round-trip
/// checks.
pub fn kb_from_json(text: &str) -> Result<(Vec<String>, Vec<Vec<Vec<usize>>>), Error> {
    let v: Json = serde_json::from_str(text)
        .map_err(|e| Error::Validation(format!("bad KB JSON: {e}")))?;
    let atoms = v["atoms"]
        .as_array()
        .ok_or_else(|| Error::Validation("missing atoms".into()))?
        .iter()
        .map(|a| a["tuple"].as_str().unwrap_or_default().to_string())
        .collect();
    let formulas = v["formulas"]
        .as_array()
        .ok_or_else(|| Error::Validation("missing formulas".into()))?
        .iter()
        .map(|f| {
            f["clauses"]
                .as_array()
                .unwrap_or(&Vec::new())
                .iter()
                .map(|c| {
                    c.as_array()
                        .unwrap_or(&Vec::new())
                        .iter()
                        .map(|x| x.as_u64().unwrap_or(0) as usize)
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok((atoms, formulas))
}

fn cmd_transform(manifest: &Path, out: &str, dimacs_like: bool) -> Result<i32, Error> {
    let (db, cs) = load(manifest)?;
    let kb = transform(&db, &cs);
    let content = if dimacs_like {
        kb_dimacs_like(&kb)
    } else {
        serde_json::to_string_pretty(&kb_json(&db, &kb)).unwrap()
    };
    write_output(out, &content)?;
    Ok(EXIT_OK)
}

fn cmd_check_postulates(
    family: &str,
    trials: usize,
    seed: u64,
    report_path: Option<&Path>,
    store: Option<PathBuf>,
) -> Result<i32, Error> {
    let mut cfg = HarnessConfig::new(trials, seed);
    if let Some(dir) = store {
        cfg.store_dir = dir;
    }
    let families: Vec<Family> = match family {
        "db" => vec![Family::Db],
        "prop" => vec![Family::Prop],
        "both" => vec![Family::Prop, Family::Db],
        other => return Err(Error::Cli(format!("unknown family `{other}`"))),
    };
    let mut results = Vec::new();
    for f in families {
        results.extend(check_family(f, &cfg)?);
    }
    let report = table_report(&results);
    println!("{report}");
    if let Some(p) = report_path {
        std::fs::write(p, &report).map_err(|e| Error::io(p.display().to_string(), e))?;
    }
    let mismatches = results.iter().filter(|r| !r.reproduces_paper()).count();
    Ok(if mismatches == 0 { EXIT_OK } else { EXIT_FALSE })
}

/// One oracle comparison: every measure, optimized versus brute force.
pub fn oracle_compare(
    db: &Database,
    cs: &ConstraintSet,
    bounds: &OracleBounds,
) -> Result<Vec<(String, String, String)>, Error> {
    let mut mismatches = Vec::new();
    let ev = Evaluator::new(db, cs);
    let fast_mi = ev.hypergraph().edge_set();
    let slow_mi = oracle_mi(db, cs, bounds)?;
    if fast_mi != slow_mi {
        mismatches.push((
            "MI".to_string(),
            format!("{fast_mi:?}"),
            format!("{slow_mi:?}"),
        ));
    }
    let kb = ev.kb();
    for kind in ALL_KINDS {
        let fast = ev.db_measure(kind)?;
        let slow = oracle_db_measure(kind, db, cs, bounds)?;
        if fast != slow {
            mismatches.push((format!("db:{}", kind.name()), fast.to_string(), slow.to_string()));
        }
        let fast = ev.prop_measure(kind)?;
        let slow = oracle_prop_measure(kind, kb, bounds)?;
        if fast != slow {
            mismatches.push((
                format!("prop:{}", kind.name()),
                fast.to_string(),
                slow.to_string(),
            ));
        }
    }
    Ok(mismatches)
}

fn dump_instance(dir: &Path, db: &Database, cs: &ConstraintSet) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let mut schema_text = String::new();
    for r in db.schema().relations() {
        let attrs: Vec<String> = r
            .attributes
            .iter()
            .map(|(n, k)| format!("{n}: {}", k.name()))
            .collect();
        schema_text.push_str(&format!("relation {}({})\n", r.name, attrs.join(", ")));
    }
    std::fs::write(dir.join("schema.txt"), schema_text)
        .map_err(|e| Error::io("schema.txt".into(), e))?;
    std::fs::write(
        dir.join("constraints.txt"),
        crate::constraint::pretty_print(cs),
    )
    .map_err(|e| Error::io("constraints.txt".into(), e))?;
    let mut manifest = String::from("schema = schema.txt\nconstraints = constraints.txt\n");
    for r in db.schema().relations() {
        let mut csv_text = r
            .attributes
            .iter()
            .map(|(n, _)| n.clone())
            .collect::<Vec<_>>()
            .join(",");
        csv_text.push('\n');
        for id in db.relation_tuples(&r.name) {
            let row: Vec<String> = db.tuple(*id).values.iter().map(|v| v.to_string()).collect();
            csv_text.push_str(&row.join(","));
            csv_text.push('\n');
        }
        let file = format!("{}.csv", r.name.to_lowercase());
        std::fs::write(dir.join(&file), csv_text).map_err(|e| Error::io(file.clone(), e))?;
        manifest.push_str(&format!("data.{} = {file}\n", r.name));
    }
    std::fs::write(dir.join("manifest.txt"), manifest)
        .map_err(|e| Error::io("manifest.txt".into(), e))?;
    Ok(())
}

fn cmd_oracle_check(trials: usize, seed: u64, max_tuples: usize, dump_dir: &Path) -> Result<i32, Error> {
    let gen = InstanceGen {
        seed,
        max_tuples,
        ..InstanceGen::default()
    };
    let bounds = OracleBounds::default();
    for trial in 0..trials as u64 {
        let (db, cs) = gen.instance(trial);
        let mismatches = oracle_compare(&db, &cs, &bounds)?;
        if !mismatches.is_empty() {
            let dir = dump_dir.join(format!("trial-{trial}"));
            dump_instance(&dir, &db, &cs)?;
            eprintln!("oracle mismatch on trial {trial}; instance dumped to {}", dir.display());
            for (what, fast, slow) in mismatches {
                eprintln!("  {what}: optimized {fast}, oracle {slow}");
            }
            return Ok(EXIT_FALSE);
        }
    }
    println!("oracle check passed: {trials} instances, every measure exact");
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_spec_parsing() {
        assert_eq!(parse_measures("all").unwrap().len(), 20);
        let two = parse_measures("db:IM, prop:Isharp").unwrap();
        assert_eq!(two.len(), 2);
        assert!(parse_measures("db:IX").is_err());
    }

    #[test]
    fn oracle_check_small_run() {
        let gen = InstanceGen {
            seed: 99,
            max_tuples: 5,
            ..InstanceGen::default()
        };
        let bounds = OracleBounds::default();
        for trial in 0..12 {
            let (db, cs) = gen.instance(trial);
            let mismatches = oracle_compare(&db, &cs, &bounds).unwrap();
            assert!(mismatches.is_empty(), "trial {trial}: {mismatches:?}");
        }
    }

    #[test]
    fn decide_ops_reject_bad_thresholds() {
        let id = MeasureId::parse("db:IH").unwrap();
        let _ = id;
        // lv with a non-positive threshold must error before loading.
        let e = cmd_decide(Path::new("/nonexistent"), "db:IH", "lv", "0");
        assert!(e.is_err());
        let e = cmd_decide(Path::new("/nonexistent"), "db:IH", "zz", "1");
        assert!(e.is_err());
    }

    #[test]
    fn kind_and_family_exports() {
        assert_eq!(MeasureKind::Sharp.name(), "Isharp");
        assert_eq!(Family::Db.prefix(), "db");
    }
}
