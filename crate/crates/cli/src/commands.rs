use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use grm_core::analysis::{
    average_reduced, diagonal_sensitivity_matrix, friendship_graph, leader_closure_graph, local_subset_ranking,
    pagerank_of_reduced, sensitivity, theta_score, SensitivityConfig,
};
use grm_core::export::{
    self, friendship_to_dot, friendship_to_gexf, read_bundle, read_rank_table, write_bundle, write_json,
    write_labeled_matrix, write_rank_csv, write_sensitivity_csv, write_theta_csv, BundleMeta, BUNDLE_COMPONENTS,
};
use grm_core::{
    dense_oracle_reduce, load_edge_list, load_labels, pagerank, rank_nodes, read_subset_file, reduce, resolve_subset,
    Component, DirectedGraph, Error, GoogleOperator, RankedNode, ReducedMatrixSet, Result,
};
use serde_json::json;

use crate::config::{Common, RunConfig};
use crate::Command;

/// Largest elementwise oracle deviation `reduce --verify` accepts.
const VERIFY_TOL: f64 = 1e-8;

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Pagerank {
            edges,
            labels,
            subset,
            keep_self_loops,
            out,
            common,
        } => {
            setup(&common)?;
            cmd_pagerank(&edges, labels.as_deref(), subset.as_deref(), keep_self_loops, &out, &common)
        }
        Command::Reduce {
            edges,
            labels,
            subset,
            keep_self_loops,
            edition,
            verify,
            out,
            common,
        } => {
            setup(&common)?;
            cmd_reduce(
                &edges,
                labels.as_deref(),
                &subset,
                keep_self_loops,
                edition,
                verify,
                &out,
                &common,
            )
        }
        Command::Theta {
            tables,
            editions,
            cutoff,
            out,
        } => cmd_theta(&tables, &editions, cutoff, &out),
        Command::Friends {
            bundle,
            top_k,
            component,
            leaders,
            out,
            common,
        } => {
            setup(&common)?;
            cmd_friends(&bundle, top_k, component, leaders.as_deref(), &out, &common)
        }
        Command::Average { bundles, out, common } => {
            setup(&common)?;
            cmd_average(&bundles, &out, &common)
        }
        Command::Sensitivity {
            bundle,
            delta,
            from,
            to,
            ps,
            cs,
            out,
            common,
        } => {
            setup(&common)?;
            let target = match (from, to, ps, cs) {
                (Some(f), Some(t), None, None) => Target::Link(f, t),
                (None, None, Some(p), Some(c)) => Target::Grid(p, c),
                _ => {
                    return Err(Error::InvalidArgument(
                        "give either --from/--to or --ps/--cs".into(),
                    ))
                }
            };
            cmd_sensitivity(&bundle, delta, target, &out, &common)
        }
    }
}

fn setup(common: &Common) -> Result<()> {
    common.validate()?;
    if let Some(n) = common.threads.filter(|&n| n > 0) {
        // Only the first call per process can size the global pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}{suffix}"))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("edition")
        .to_string()
}

fn load_graph(
    edges: &Path,
    labels: Option<&Path>,
    keep_self_loops: bool,
    run: &mut RunConfig,
) -> Result<(DirectedGraph, String)> {
    let checksum = run.input(edges)?;
    let graph = load_edge_list(edges, keep_self_loops)?;
    let graph = match labels {
        Some(path) => {
            run.input(path)?;
            let (g, report) = load_labels(path, graph)?;
            if !report.unknown_ids.is_empty() {
                log::warn!("{} labels refer to ids absent from the graph", report.unknown_ids.len());
            }
            g
        }
        None => graph,
    };
    log::info!("loaded {} nodes, {} edges", graph.n_nodes(), graph.n_edges());
    Ok((graph, checksum))
}

fn write_flushed(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w)?;
    w.flush().map_err(|e| io_err(path, e))
}

fn cmd_pagerank(
    edges: &Path,
    labels: Option<&Path>,
    subset: Option<&Path>,
    keep_self_loops: bool,
    out: &Path,
    common: &Common,
) -> Result<()> {
    let mut run = RunConfig::new("pagerank", common, out);
    let (graph, checksum) = load_graph(edges, labels, keep_self_loops, &mut run)?;
    let op = GoogleOperator::new(&graph, common.alpha)?.with_execution(common.execution());
    let pr = pagerank(&op, &common.pagerank())?;
    write_flushed(out, |w| write_rank_csv(w, &rank_nodes(&pr, &graph)))?;

    let mut outputs = vec![out.to_path_buf()];
    if let Some(subset_path) = subset {
        run.input(subset_path)?;
        let subset = resolve_subset(&read_subset_file(subset_path)?, &graph)?;
        let table = local_subset_ranking(&pr, &subset, &stem(edges));
        let local: Vec<RankedNode> = table
            .ordered()
            .into_iter()
            .map(|(name, k)| {
                let node = subset.indices()[subset.position(name).expect("name from subset")];
                RankedNode {
                    k: k as usize,
                    node,
                    original_id: graph.external_id(node),
                    label: Some(name.to_string()),
                    probability: pr.probabilities[node as usize],
                }
            })
            .collect();
        let local_path = sibling(out, ".subset.csv");
        write_flushed(&local_path, |w| write_rank_csv(w, &local))?;
        outputs.push(local_path);
    }

    write_json(
        sibling(out, ".meta.json"),
        &json!({
            "run": run.to_json(),
            "dataset_checksum": checksum,
            "n_nodes": graph.n_nodes(),
            "n_edges": graph.n_edges(),
            "iterations": pr.iterations,
            "residual": pr.residual,
            "outputs": outputs,
        }),
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_reduce(
    edges: &Path,
    labels: Option<&Path>,
    subset_path: &Path,
    keep_self_loops: bool,
    edition: Option<String>,
    verify: bool,
    out: &Path,
    common: &Common,
) -> Result<()> {
    let mut run = RunConfig::new("reduce", common, out);
    let (graph, checksum) = load_graph(edges, labels, keep_self_loops, &mut run)?;
    run.input(subset_path)?;
    let subset = resolve_subset(&read_subset_file(subset_path)?, &graph)?;
    let op = GoogleOperator::new(&graph, common.alpha)?.with_execution(common.execution());
    let mut rset = reduce(&op, &subset, &common.reduce())?;
    rset.edition_tag = edition.unwrap_or_else(|| stem(edges));

    let mut provenance = json!({ "run": run.to_json() });
    let mut deviation = None;
    if verify {
        let oracle = dense_oracle_reduce(&graph, &subset, common.alpha)?;
        let dev = max_deviation(&rset, &oracle);
        println!("max elementwise deviation from dense oracle: {dev:e}");
        provenance["verify"] = json!({ "max_abs_deviation": dev, "tolerance": VERIFY_TOL });
        deviation = Some(dev);
    }
    let violations = rset.check_invariants();
    for v in &violations {
        log::warn!("invariant: {v}");
    }
    let flags = rset.flags();
    for f in &flags {
        log::warn!("{f}");
    }
    provenance["invariant_violations"] = json!(violations);
    provenance["flags"] = json!(flags);
    write_bundle(out, &rset, &BundleMeta::for_set(&rset, Some(checksum), provenance))?;

    match deviation {
        Some(dev) if dev.is_nan() || dev > VERIFY_TOL => Err(Error::NonConvergence {
            what: "oracle agreement",
            iterations: 0,
            residual: dev,
        }),
        _ => Ok(()),
    }
}

fn max_deviation(a: &ReducedMatrixSet, b: &ReducedMatrixSet) -> f64 {
    [
        (&a.gr, &b.gr),
        (&a.grr, &b.grr),
        (&a.gpr, &b.gpr),
        (&a.gqrd, &b.gqrd),
        (&a.gqrnd, &b.gqrnd),
    ]
    .into_iter()
    .map(|(x, y)| (x - y).amax())
    .fold(0.0, f64::max)
}

fn cmd_theta(tables: &[PathBuf], editions: &[String], cutoff: u32, out: &Path) -> Result<()> {
    if !editions.is_empty() && editions.len() != tables.len() {
        return Err(Error::InvalidArgument(format!(
            "{} edition tags for {} tables",
            editions.len(),
            tables.len()
        )));
    }
    let tags: Vec<String> = if editions.is_empty() {
        tables.iter().map(|p| stem(p)).collect()
    } else {
        editions.to_vec()
    };
    let parsed = tables
        .iter()
        .zip(&tags)
        .map(|(p, t)| read_rank_table(p, t))
        .collect::<Result<Vec<_>>>()?;
    let scores = theta_score(&parsed, cutoff);
    write_flushed(out, |w| write_theta_csv(w, &tags, &scores))?;

    let inputs = tables
        .iter()
        .map(|p| Ok(json!({ "path": p, "sha256": export::sha256_file(p)? })))
        .collect::<Result<Vec<_>>>()?;
    write_json(
        sibling(out, ".meta.json"),
        &json!({ "command": "theta", "cutoff": cutoff, "editions": tags, "inputs": inputs, "out": out }),
    )
}

fn record_bundle(run: &mut RunConfig, dir: &Path) -> Result<()> {
    run.input(&dir.join("meta.json"))?;
    for c in BUNDLE_COMPONENTS {
        run.input(&dir.join(format!("{c}.csv")))?;
    }
    Ok(())
}

fn cmd_friends(
    bundle: &Path,
    top_k: usize,
    component: Option<Component>,
    leaders: Option<&Path>,
    out: &Path,
    common: &Common,
) -> Result<()> {
    let mut run = RunConfig::new("friends", common, out);
    run.top_k = Some(top_k);
    record_bundle(&mut run, bundle)?;
    let (rset, _) = read_bundle(bundle)?;
    let (graph, component) = match leaders {
        Some(path) => {
            run.input(path)?;
            let names = read_subset_file(path)?;
            let component = component.unwrap_or(Component::Gqrnd);
            (leader_closure_graph(&rset, &names, top_k, component)?, component)
        }
        None => {
            let component = component.unwrap_or(Component::GrrPlusGqrnd);
            (friendship_graph(&rset, top_k, component)?, component)
        }
    };
    create_dir(out)?;
    export::write_text(out.join("friends.gexf"), &friendship_to_gexf(&graph))?;
    export::write_text(out.join("friends.dot"), &friendship_to_dot(&graph))?;
    write_json(
        out.join("meta.json"),
        &json!({
            "run": run.to_json(),
            "component": component.to_string(),
            "edition_tag": rset.edition_tag,
            "edges": graph.edges.len(),
        }),
    )
}

fn cmd_average(bundles: &[PathBuf], out: &Path, common: &Common) -> Result<()> {
    let mut run = RunConfig::new("average", common, out);
    let mut sets = Vec::with_capacity(bundles.len());
    for b in bundles {
        record_bundle(&mut run, b)?;
        sets.push(read_bundle(b)?.0);
    }
    let avg = average_reduced(&sets)?;
    let pr = pagerank_of_reduced(&avg, &common.pagerank())?;
    let provenance = json!({
        "run": run.to_json(),
        "editions": sets.iter().map(|s| s.edition_tag.clone()).collect::<Vec<_>>(),
    });
    write_bundle(out, &avg, &BundleMeta::for_set(&avg, None, provenance))?;
    let ranked: Vec<RankedNode> = pr
        .k_index
        .iter()
        .enumerate()
        .map(|(pos, &i)| RankedNode {
            k: pos + 1,
            node: i,
            original_id: avg.original_ids.as_ref().map_or(i as u64, |ids| ids[i as usize]),
            label: Some(avg.names[i as usize].clone()),
            probability: pr.probabilities[i as usize],
        })
        .collect();
    write_flushed(&out.join("pagerank.csv"), |w| write_rank_csv(w, &ranked))
}

enum Target {
    Link(String, String),
    Grid(PathBuf, PathBuf),
}

fn cmd_sensitivity(bundle: &Path, delta: f64, target: Target, out: &Path, common: &Common) -> Result<()> {
    let mut run = RunConfig::new("sensitivity", common, out);
    run.delta = Some(delta);
    record_bundle(&mut run, bundle)?;
    let (rset, _) = read_bundle(bundle)?;
    let cfg = SensitivityConfig {
        delta,
        pagerank: grm_core::PageRankConfig {
            tol: common.tol.min(1e-14),
            max_iter: common.max_iter.max(100_000),
        },
        ..SensitivityConfig::default()
    };
    create_dir(out)?;
    let mut meta = json!({ "run": run.to_json(), "estimator": cfg.estimator, "edition_tag": rset.edition_tag });
    match target {
        Target::Link(from, to) => {
            let result = sensitivity(&rset, &from, &to, &cfg)?;
            write_flushed(&out.join("sensitivity.csv"), |w| write_sensitivity_csv(w, &result))?;
            meta["link"] = json!([from, to]);
            meta["degenerate"] = json!(result.degenerate);
        }
        Target::Grid(ps_path, cs_path) => {
            run.input(&ps_path)?;
            run.input(&cs_path)?;
            meta["run"] = run.to_json();
            let ps = read_subset_file(&ps_path)?;
            let cs = read_subset_file(&cs_path)?;
            let m = diagonal_sensitivity_matrix(&rset, &ps, &cs, &cfg)?;
            write_flushed(&out.join("diagonal.csv"), |w| write_labeled_matrix(w, &cs, &ps, &m))?;
        }
    }
    write_json(out.join("meta.json"), &meta)
}
