use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use hdgraph::codebook::{import_concept_vectors, Codebook, CodebookSpec};
use hdgraph::decoder::{
    capacity_sweep, reconstruct_graph, reconstruct_hypergraph, CapacityConfig, ReconstructOptions,
    Threshold,
};
use hdgraph::encoder::{
    encode_attributed, encode_graph, encode_hypergraph, encode_hypergraph_product,
    encode_node_neighborhood_with, Embedding, Mode, NeighborhoodLabels,
};
use hdgraph::graph::{
    parse_edge_list, parse_graph_json, parse_hypergraph_json, write_edge_list,
    write_hypergraph_json, Graph,
};
use hdgraph::probe::{
    build_dataset, dimension_sweep, evaluate, sweep_csv, DatasetConfig, GraphFamily, MlpConfig,
    ProbeModel, Task, DEFAULT_LAMBDA_GRID, METRICS_HEADER,
};
use hdgraph::spectral::SpectralBundle;
use serde_json::{json, Value};

use crate::{
    CapacityArgs, Cli, CodebookCmd, Command, DimSweepArgs, DiracArgs, EncodeArgs, EncodeCmd,
    Failure, FamilyArg, ModelArg, ProbeArgs, ProbeSetup, ReconstructArgs,
};

type Outcome<T = ()> = Result<T, Failure>;

const DIRAC_SQUARE_TOL: f64 = 1e-8;
const DIRAC_SUM_TOL: f64 = 1e-12;

/// Stderr run log: the resolved config up front, then the fingerprint of
/// every codebook the command touches.
struct RunLog {
    config: Value,
    fingerprints: Vec<String>,
}

impl RunLog {
    fn codebook(&mut self, cb: &Codebook) {
        let fp = cb.summary().fingerprint;
        eprintln!("codebook fingerprint={fp} d={}", cb.dimension());
        self.fingerprints.push(fp);
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let config = serde_json::to_value(cli).map_err(|e| Failure::Validation(e.to_string()))?;
    eprintln!("config {config}");
    let mut log = RunLog {
        config,
        fingerprints: Vec::new(),
    };
    let result = dispatch(&cli.command, &mut log);
    if let Some(path) = &cli.log_file {
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let entry = json!({
            "timestamp_unix": stamp,
            "config": log.config,
            "codebook_fingerprints": log.fingerprints,
            "status": if result.is_ok() { "ok" } else { "error" },
        });
        let appended = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .and_then(|mut f| writeln!(f, "{entry}"));
        if let Err(e) = appended {
            return Err(io_failure(path, e));
        }
    }
    result
}

fn dispatch(cmd: &Command, log: &mut RunLog) -> Outcome {
    match cmd {
        Command::Codebook(c) => codebook(c, log),
        Command::Encode(c) => encode(c, log),
        Command::Reconstruct(a) => reconstruct(a, log),
        Command::Capacity(a) => capacity(a),
        Command::Probe(a) => probe(a, log),
        Command::DiracCheck(a) => dirac_check(a),
        Command::DimSweep(a) => dim_sweep(a),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

/// Writes to `path`, or stdout when there is none.
fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => write_file(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn print_json(value: &Value) -> Outcome {
    emit(
        None,
        &format!(
            "{}\n",
            serde_json::to_string_pretty(value).expect("json value")
        ),
    )
}

fn load_codebook(path: &Path, log: &mut RunLog) -> Outcome<Codebook> {
    let cb = Codebook::load(path)?;
    log.codebook(&cb);
    Ok(cb)
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Edge list, or graph JSON by extension (attributes ignored).
fn read_graph(path: &Path) -> Outcome<Graph> {
    Ok(if is_json(path) {
        parse_graph_json(path)?.graph
    } else {
        parse_edge_list(path)?
    })
}

fn codebook(cmd: &CodebookCmd, log: &mut RunLog) -> Outcome {
    let cb = match cmd {
        CodebookCmd::Gen(a) => {
            let cb = CodebookSpec::new(a.d, a.seed)
                .nodes(a.nodes)
                .edge_ids(a.edge_ids)
                .unitary(!a.gaussian)
                .build()?
                .with_generated_attributes(&a.attrs)?;
            cb.save(&a.out)?;
            cb
        }
        CodebookCmd::Import(a) => {
            let concepts = import_concept_vectors(&a.vectors, &a.key_column)?;
            let cb = match &a.into {
                Some(base) => load_codebook(base, log)?.with_concepts(concepts)?,
                None => {
                    let spec = CodebookSpec::new(concepts.dimension, a.seed)
                        .nodes(a.nodes)
                        .edge_ids(a.edge_ids)
                        .unitary(!a.gaussian);
                    Codebook::from_concepts(concepts, spec)?
                }
            };
            cb.save(&a.out)?;
            cb
        }
        CodebookCmd::Inspect { path } => Codebook::load(path)?,
    };
    log.codebook(&cb);
    let mut summary = serde_json::to_value(cb.summary()).expect("summary serializes");
    summary["attribute_keys"] = json!(cb.attribute_keys().collect::<Vec<_>>());
    print_json(&summary)
}

fn encode(cmd: &EncodeCmd, log: &mut RunLog) -> Outcome {
    let (io, emb) = match cmd {
        EncodeCmd::Graph(io) => {
            let cb = load_codebook(&io.cb, log)?;
            (io, encode_graph(&read_graph(&io.input)?, &cb)?)
        }
        EncodeCmd::Attributed(io) => {
            let cb = load_codebook(&io.cb, log)?;
            let file = parse_graph_json(&io.input)?;
            if file.attrs.is_none() {
                return Err(Failure::Validation(format!(
                    "{} has no \"attrs\" list",
                    io.input.display()
                )));
            }
            (io, encode_attributed(&file.into_attributed()?, &cb)?)
        }
        EncodeCmd::Hypergraph { io, product } => {
            let cb = load_codebook(&io.cb, log)?;
            let h = parse_hypergraph_json(&io.input)?;
            let emb = if *product {
                encode_hypergraph_product(&h, &cb)?
            } else {
                encode_hypergraph(&h, &cb)?
            };
            (io, emb)
        }
        EncodeCmd::Neighborhood {
            io,
            vertex,
            relabel,
        } => {
            let cb = load_codebook(&io.cb, log)?;
            let labels = if *relabel {
                NeighborhoodLabels::Relabeled
            } else {
                NeighborhoodLabels::Global
            };
            (
                io,
                encode_node_neighborhood_with(&read_graph(&io.input)?, *vertex, &cb, labels)?,
            )
        }
    };
    save_embedding(io, &emb)
}

fn save_embedding(io: &EncodeArgs, emb: &Embedding) -> Outcome {
    emb.save(&io.out)?;
    print_json(&json!({
        "mode": emb.mode.name(),
        "d": emb.dim(),
        "n_declared": emb.n_declared,
        "codebook_fingerprint": format!("{:016x}", emb.codebook_fingerprint),
        "out": io.out,
    }))
}

fn parse_threshold(raw: &str) -> Outcome<Threshold> {
    if raw.eq_ignore_ascii_case("auto") {
        return Ok(Threshold::Auto);
    }
    match raw.parse::<f64>() {
        Ok(t) if t.is_finite() => Ok(Threshold::Fixed(t)),
        _ => Err(Failure::Usage(format!(
            "--threshold expects a number or \"auto\", got {raw:?}"
        ))),
    }
}

fn reconstruct(a: &ReconstructArgs, log: &mut RunLog) -> Outcome {
    let threshold = parse_threshold(&a.threshold)?;
    let emb = Embedding::load(&a.input)?;
    let cb = load_codebook(&a.cb, log)?;
    if emb.mode == Mode::HyperKeyed {
        if a.scores.is_some() {
            return Err(Failure::Usage(
                "--scores applies to graph embeddings only".into(),
            ));
        }
        let fixed = match threshold {
            Threshold::Fixed(t) => t,
            Threshold::Auto => 0.5,
        };
        let h = reconstruct_hypergraph(&emb, &cb, fixed)?;
        eprintln!("recovered n={} hyperedges={}", h.n(), h.edge_count());
        return emit(None, &format!("{}\n", write_hypergraph_json(&h)));
    }
    let opts = ReconstructOptions {
        threshold,
        safeguard: !a.no_safeguard,
    };
    let report = reconstruct_graph(&emb, &cb, opts)?;
    eprintln!(
        "recovered n={} edges={} threshold={} size_score={:.4} runner_up={:.4} low_confidence={}",
        report.recovered_n,
        report.accepted_edges.len(),
        report.threshold_used,
        report.size.score,
        report.size.runner_up,
        report.size.low_confidence
    );
    if let Some(path) = &a.scores {
        write_file(path, &report.scores_csv())?;
    }
    if a.json {
        print_json(&serde_json::to_value(&report).expect("report serializes"))
    } else {
        emit(None, &write_edge_list(&report.to_graph()?))
    }
}

fn capacity(a: &CapacityArgs) -> Outcome {
    let mut cfg = CapacityConfig::new(a.d, a.n_values.clone(), a.trials, a.seed);
    cfg.unitary = !a.gaussian;
    let result = capacity_sweep(&cfg)?;
    for r in &result.records {
        eprintln!(
            "n={} min_correct={:.4} mean_correct={:.4} max_wrong={:.4} separation={}",
            r.n, r.min_correct_cosine, r.mean_correct_cosine, r.max_wrong_cosine, r.separation
        );
    }
    emit(a.out.as_deref(), &result.to_csv())
}

fn task(s: &ProbeSetup) -> Task {
    let name = serde_json::to_value(s.task).expect("enum serializes");
    name.as_str()
        .and_then(|n| n.parse().ok())
        .expect("every task flag names a task")
}

fn dataset_config(s: &ProbeSetup) -> DatasetConfig {
    let task = task(s);
    let mut cfg = DatasetConfig::new(task, s.graphs, s.seed);
    cfg.family = match (s.family, task.default_family()) {
        (FamilyArg::Er, GraphFamily::ErdosRenyi { p, .. }) => GraphFamily::ErdosRenyi {
            n_min: s.n_min,
            n_max: s.n_max,
            p,
        },
        _ => GraphFamily::Mixed {
            n_min: s.n_min,
            n_max: s.n_max,
        },
    };
    cfg
}

fn model(s: &ProbeSetup) -> ProbeModel {
    match s.model {
        ModelArg::Ridge => ProbeModel::Ridge {
            lambdas: s
                .lambda
                .map_or_else(|| DEFAULT_LAMBDA_GRID.to_vec(), |l| vec![l]),
        },
        ModelArg::Mlp => ProbeModel::Mlp(MlpConfig {
            hidden: s.hidden,
            epochs: s.epochs,
            learning_rate: s.lr,
            batch_size: s.batch,
            seed: s.seed,
        }),
    }
}

fn probe(a: &ProbeArgs, log: &mut RunLog) -> Outcome {
    let cfg = dataset_config(&a.setup);
    let cb = match &a.cb {
        Some(path) => load_codebook(path, log)?,
        None => {
            let cb = CodebookSpec::new(a.d, a.setup.seed)
                .nodes(cfg.family.max_vertices().max(1))
                .edge_ids(0)
                .build()?;
            log.codebook(&cb);
            cb
        }
    };
    let ds = build_dataset(&cfg, &cb)?;
    let metric = evaluate(&ds, &model(&a.setup), a.setup.seed)?;
    emit(
        a.setup.out.as_deref(),
        &format!("{METRICS_HEADER}\n{}\n", metric.csv_row()),
    )
}

fn dim_sweep(a: &DimSweepArgs) -> Outcome {
    if a.dims.is_empty() {
        return Err(Failure::Usage("--dims needs at least one dimension".into()));
    }
    let rows = dimension_sweep(&dataset_config(&a.setup), &a.dims, &model(&a.setup))?;
    emit(a.setup.out.as_deref(), &sweep_csv(&rows))
}

fn dirac_check(a: &DiracArgs) -> Outcome {
    let g = read_graph(&a.input)?;
    let bundle = SpectralBundle::new(&g)?;
    let check = bundle.check();
    let ok = check.square_relative_error < DIRAC_SQUARE_TOL
        && check.coefficient_sum_error < DIRAC_SUM_TOL;
    let mut out = serde_json::to_value(check).expect("check serializes");
    out["ok"] = json!(ok);
    if a.eigenvalues {
        out["eigenvalues"] = json!(bundle.eigenvalues.as_slice());
    }
    print_json(&out)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "Dirac check failed: square error {:e}, coefficient sum error {:e}",
            check.square_relative_error, check.coefficient_sum_error
        )))
    }
}
