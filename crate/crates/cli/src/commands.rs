use hoi_core::nullmodel::{randomize, RandomizeMode};
use hoi_core::persistence::global_persistence;
use hoi_core::prediction::{
    build_dataset, compare_models, feature_selection_sweep, gini_importance,
    observation_period_sweep, split, ForestModel, LabeledDataset, ModelKind, Problem,
};
use hoi_core::stats::{
    fit_power_law, normalized_mi, pearson_cc, relative_by_size, PersistenceHistogram, PowerLawFit,
};
use hoi_core::{enumerate_hois, load_prefix, Error, LoadSummary, TemporalHypergraph};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{cell_seed, Config};
use crate::error::CliError;
use crate::output::{cell, opt, OutputDir};

type Result<T> = std::result::Result<T, CliError>;

pub fn load(cfg: &Config) -> Result<(TemporalHypergraph, LoadSummary)> {
    Ok(load_prefix(
        &cfg.prefix(),
        cfg.dataset.unit_width,
        cfg.dataset.max_size,
    )?)
}

fn problems(cfg: &Config) -> Vec<Problem> {
    cfg.problems.iter().map(|&p| p.into()).collect()
}

/// Every (problem, k) cell of the grid, in output order.
fn cells(cfg: &Config) -> Vec<(Problem, usize)> {
    problems(cfg)
        .into_iter()
        .flat_map(|p| cfg.k.iter().map(move |&k| (p, k)))
        .collect()
}

type CellResults<T> = Vec<((Problem, usize), Option<T>)>;

/// Runs `f` on each cell in parallel. Cells without enough rows come back
/// as `None`; if every cell is empty the whole command fails.
fn run_cells<T, F>(cfg: &Config, h: &TemporalHypergraph, f: F) -> Result<CellResults<T>>
where
    T: Send,
    F: Fn(Problem, usize, LabeledDataset) -> hoi_core::Result<T> + Sync,
{
    let grid = cells(cfg);
    let opts = cfg.dataset_options(h.num_edges());
    let results: Vec<hoi_core::Result<Option<T>>> = grid
        .par_iter()
        .map(|&(problem, k)| {
            let attempt = build_dataset(h, problem, k, &opts).and_then(|ds| f(problem, k, ds));
            match attempt {
                Ok(v) => Ok(Some(v)),
                Err(Error::EmptyDataset(msg)) => {
                    eprintln!("note: {} k={k}: {msg}", problem.as_str());
                    Ok(None)
                }
                Err(e) => Err(e),
            }
        })
        .collect();
    let results: Vec<Option<T>> = results.into_iter().collect::<hoi_core::Result<_>>()?;
    if results.iter().all(Option::is_none) {
        return Err(Error::EmptyDataset("no (problem, k) cell has enough rows".into()).into());
    }
    Ok(grid.into_iter().zip(results).collect())
}

pub fn ingest(cfg: &Config, out: &OutputDir) -> Result<()> {
    let (h, summary) = load(cfg)?;
    out.write("canonical.tsv", |w| h.write_canonical(w))?;
    out.write("node_map.csv", |w| {
        writeln!(w, "node,original_id")?;
        for (i, label) in h.labels().iter().enumerate() {
            writeln!(w, "{i},{label}")?;
        }
        Ok(())
    })?;
    let rows = vec![
        ("raw_edges", summary.raw_edges as i64),
        ("raw_nodes", summary.raw_nodes as i64),
        ("dropped_oversize", summary.dropped_oversize as i64),
        ("dropped_degenerate", summary.dropped_degenerate as i64),
        ("edges", summary.edges as i64),
        ("nodes", summary.nodes as i64),
        ("units", summary.units as i64),
        ("unit_width", h.unit_width()),
        ("t_min", h.t_min()),
    ];
    let table: Vec<Vec<String>> = rows.iter().map(|(k, v)| vec![cell(k), cell(v)]).collect();
    out.write_csv("summary.csv", &["statistic", "value"], &table)?;
    out.say(format_args!(
        "{}: {} nodes, {} hyperedges, {} units (raw: {} nodes, {} hyperedges)",
        cfg.dataset.name,
        summary.nodes,
        summary.edges,
        summary.units,
        summary.raw_nodes,
        summary.raw_edges
    ));
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
struct SizeDistribution {
    k: usize,
    n_hois: usize,
    histogram: PersistenceHistogram,
    fit: Option<PowerLawFit>,
}

fn size_distribution(
    cfg: &Config,
    h: &TemporalHypergraph,
    k: usize,
) -> hoi_core::Result<SizeDistribution> {
    let hois = enumerate_hois(h, k, cfg.effective_cap(h.num_edges()), cfg.seed)?;
    let measured = global_persistence(h, &hois, cfg.window);
    let histogram = PersistenceHistogram::from_values(measured.iter().map(|(_, p)| *p));
    let fit = match fit_power_law(&histogram) {
        Ok(f) => Some(f),
        Err(Error::Fit(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(SizeDistribution {
        k,
        n_hois: hois.len(),
        histogram,
        fit,
    })
}

pub fn persist_dist(cfg: &Config, out: &OutputDir) -> Result<()> {
    let (h, _) = load(cfg)?;
    let dists: Vec<SizeDistribution> = cfg
        .k
        .par_iter()
        .map(|&k| size_distribution(cfg, &h, k))
        .collect::<hoi_core::Result<_>>()?;

    let mut hist_rows = Vec::new();
    for d in &dists {
        hist_rows.push(vec![cell(d.k), cell(0), cell(d.histogram.zero_count)]);
        for (p, c) in &d.histogram.counts {
            hist_rows.push(vec![cell(d.k), cell(p), cell(c)]);
        }
    }
    out.write_csv(
        "persistence_hist.csv",
        &["k", "persistence", "count"],
        &hist_rows,
    )?;

    let by_size: Vec<Option<f64>> = (2..=4)
        .map(|k| {
            dists
                .iter()
                .find(|d| d.k == k)
                .and_then(|d| d.histogram.mean())
        })
        .collect();
    let relative = relative_by_size(&by_size).unwrap_or_else(|_| vec![None; 3]);
    let rows: Vec<Vec<String>> = dists
        .iter()
        .map(|d| {
            vec![
                cell(d.k),
                cell(d.n_hois),
                cell(d.histogram.total),
                cell(d.histogram.zero_count),
                opt(d.histogram.mean()),
                opt(relative[d.k - 2]),
                opt(d.fit.map(|f| f.exponent)),
                opt(d.fit.map(|f| f.prefactor)),
                opt(d.fit.map(|f| f.r_squared)),
                opt(d.fit.map(|f| f.points)),
                opt(d.fit.map(|f| f.degenerate)),
            ]
        })
        .collect();
    out.write_csv(
        "persistence_fit.csv",
        &[
            "k",
            "n_hois",
            "n_measured",
            "zero_count",
            "avg_persistence",
            "relative_avg_persistence",
            "exponent",
            "prefactor",
            "r2",
            "fit_points",
            "degenerate",
        ],
        &rows,
    )?;
    for d in &dists {
        out.say(format_args!(
            "k={}: {} HOIs, {} measured, avg persistence {}, r2 {}",
            d.k,
            d.n_hois,
            d.histogram.total,
            opt(d.histogram.mean()),
            opt(d.fit.map(|f| f.r_squared))
        ));
    }
    Ok(())
}

pub fn correlate(cfg: &Config, out: &OutputDir) -> Result<()> {
    let (h, _) = load(cfg)?;
    let bins = cfg.correlate.nmi_bins;
    let norm = cfg.correlate.nmi_norm.into();
    let results = run_cells(cfg, &h, |_, _, ds| {
        (0..ds.n_features())
            .map(|c| {
                let x = ds.column(c);
                let cc = pearson_cc(&x, &ds.targets).ok();
                let nmi = normalized_mi(&x, &ds.targets, bins, norm)?;
                Ok((ds.feature_names[c].clone(), ds.len(), cc, nmi))
            })
            .collect::<hoi_core::Result<Vec<_>>>()
    })?;
    let mut rows = Vec::new();
    for ((problem, k), res) in &results {
        for (name, n, cc, nmi) in res.iter().flatten() {
            rows.push(vec![
                cell(problem.as_str()),
                cell(k),
                cell(name),
                cell(n),
                opt(*cc),
                cell(nmi),
            ]);
        }
    }
    out.write_csv(
        "correlation.csv",
        &["problem", "k", "feature", "n_rows", "cc", "nmi"],
        &rows,
    )?;
    Ok(())
}

#[derive(Serialize)]
struct ModelDump<'a> {
    problem: Problem,
    k: usize,
    seed: u64,
    feature_names: &'a [String],
    model: &'a ForestModel,
}

pub fn predict(cfg: &Config, out: &OutputDir, dump_model: bool) -> Result<()> {
    let (h, _) = load(cfg)?;
    let results = run_cells(cfg, &h, |problem, k, ds| {
        let seed = cell_seed(cfg.seed, problem, k);
        let params = cfg.forest_params(seed);
        let cmp = compare_models(&ds, cfg.train_fraction(problem), seed, &params)?;
        let model = if dump_model {
            let (train, _) = split(&ds, cfg.train_fraction(problem), seed)?;
            Some(ForestModel::fit(&train.rows, &train.targets, &params)?)
        } else {
            None
        };
        Ok((ds.len(), cmp, model, ds.feature_names))
    })?;
    let mut rows = Vec::new();
    for ((problem, k), res) in &results {
        let Some((n, cmp, model, names)) = res else {
            rows.push(vec![
                cell(problem.as_str()),
                cell(k),
                String::new(),
                cell(0),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]);
            continue;
        };
        let base = cmp.report(ModelKind::Mean).map(|r| r.rmse);
        for (kind, report) in &cmp.results {
            let improvement = base
                .filter(|b| *b > 0.0)
                .map(|b| 100.0 * (b - report.rmse) / b);
            rows.push(vec![
                cell(problem.as_str()),
                cell(k),
                cell(kind.as_str()),
                cell(n),
                cell(cmp.n_train),
                cell(report.n_test),
                cell(report.rmse),
                opt(report.r_squared),
                opt(improvement),
            ]);
        }
        if let Some(model) = model {
            let dump = ModelDump {
                problem: *problem,
                k: *k,
                seed: cell_seed(cfg.seed, *problem, *k),
                feature_names: names,
                model,
            };
            let name = format!("forest_{}_k{}.json", problem.as_str(), k);
            out.write(&name, |w| {
                serde_json::to_writer(&mut *w, &dump).map_err(std::io::Error::other)?;
                writeln!(w)
            })?;
        }
    }
    out.write_csv(
        "predict.csv",
        &[
            "problem",
            "k",
            "model",
            "n_rows",
            "n_train",
            "n_test",
            "rmse",
            "r2",
            "improvement_over_mean_pct",
        ],
        &rows,
    )?;
    for row in rows
        .iter()
        .filter(|r| r[2] == ModelKind::RandomForest.as_str())
    {
        out.say(format_args!(
            "{} k={}: forest rmse {} r2 {} ({}% over mean)",
            row[0], row[1], row[6], row[7], row[8]
        ));
    }
    Ok(())
}

pub fn importance(cfg: &Config, out: &OutputDir) -> Result<()> {
    let (h, _) = load(cfg)?;
    let results = run_cells(cfg, &h, |problem, k, ds| {
        let seed = cell_seed(cfg.seed, problem, k);
        let (train, _) = split(&ds, cfg.train_fraction(problem), seed)?;
        let model = ForestModel::fit(&train.rows, &train.targets, &cfg.forest_params(seed))?;
        Ok(gini_importance(&model, &train.feature_names))
    })?;
    let mut rows = Vec::new();
    for ((problem, k), res) in &results {
        if let Some(imp) = res {
            for (rank, &f) in imp.ranking.iter().enumerate() {
                rows.push(vec![
                    cell(problem.as_str()),
                    cell(k),
                    cell(rank + 1),
                    cell(&imp.names[f]),
                    cell(imp.raw[f]),
                    cell(imp.normalized[f]),
                ]);
            }
        }
    }
    out.write_csv(
        "importance.csv",
        &["problem", "k", "rank", "feature", "raw", "normalized"],
        &rows,
    )?;
    Ok(())
}

pub fn select(cfg: &Config, out: &OutputDir) -> Result<()> {
    let (h, _) = load(cfg)?;
    let results = run_cells(cfg, &h, |problem, k, ds| {
        let seed = cell_seed(cfg.seed, problem, k);
        feature_selection_sweep(
            &ds,
            cfg.train_fraction(problem),
            seed,
            &cfg.forest_params(seed),
        )
    })?;
    let mut rows = Vec::new();
    for ((problem, k), res) in &results {
        for (i, step) in res.iter().flatten().enumerate() {
            rows.push(vec![
                cell(problem.as_str()),
                cell(k),
                cell(i + 1),
                cell(step.features.len()),
                cell(step.rmse),
                opt(step.r_squared),
                opt(step.dropped.as_deref()),
            ]);
        }
    }
    out.write_csv(
        "selection.csv",
        &[
            "problem",
            "k",
            "step",
            "n_features",
            "rmse",
            "r2",
            "dropped",
        ],
        &rows,
    )?;
    Ok(())
}

pub fn periods(cfg: &Config, out: &OutputDir) -> Result<()> {
    let (h, _) = load(cfg)?;
    let opts = cfg.dataset_options(h.num_edges());
    let grid = cells(cfg);
    let results: Vec<_> = grid
        .par_iter()
        .map(|&(problem, k)| {
            let seed = cell_seed(cfg.seed, problem, k);
            observation_period_sweep(
                &h,
                problem,
                k,
                &opts,
                &cfg.periods.observe,
                &cfg.periods.include_past,
                cfg.train_fraction(problem),
                seed,
                &cfg.forest_params(seed),
            )
        })
        .collect::<hoi_core::Result<_>>()?;
    let mut rows = Vec::new();
    for ((problem, k), sweep) in grid.iter().zip(&results) {
        for c in sweep {
            rows.push(vec![
                cell(problem.as_str()),
                cell(k),
                cell(c.observe),
                cell(c.include_past),
                cell(cfg.horizon),
                cell(c.n_rows),
                opt(c.rmse_mean),
                opt(c.rmse_forest),
                opt(c.improvement),
            ]);
        }
    }
    if rows.iter().all(|r| r[5] == "0") {
        return Err(
            Error::EmptyDataset("no observation-period cell has enough rows".into()).into(),
        );
    }
    out.write_csv(
        "periods.csv",
        &[
            "problem",
            "k",
            "observe",
            "include_past",
            "horizon",
            "n_rows",
            "rmse_mean",
            "rmse_forest",
            "improvement_pct",
        ],
        &rows,
    )?;
    Ok(())
}

pub fn nullcmp(cfg: &Config, out: &OutputDir) -> Result<()> {
    let (h, _) = load(cfg)?;
    let modes: Vec<RandomizeMode> = cfg
        .nullmodel
        .modes
        .iter()
        .map(|m| m.parse())
        .collect::<hoi_core::Result<_>>()?;
    let seeds: Vec<u64> = (0..cfg.nullmodel.seeds)
        .map(|i| cfg.seed.wrapping_add(i))
        .collect();

    let mut sources: Vec<(String, Vec<TemporalHypergraph>)> =
        vec![("real".into(), vec![h.clone()])];
    for &mode in &modes {
        let graphs: Vec<TemporalHypergraph> =
            seeds.par_iter().map(|&s| randomize(&h, mode, s)).collect();
        if cfg.nullmodel.dump {
            for (s, g) in seeds.iter().zip(&graphs) {
                out.write(&format!("null_{mode}_seed{s}.tsv"), |w| {
                    g.write_canonical(w)
                })?;
            }
        }
        sources.push((mode.to_string(), graphs));
    }

    let jobs: Vec<(usize, usize)> = (0..sources.len())
        .flat_map(|s| cfg.k.iter().map(move |&k| (s, k)))
        .collect();
    let hists: Vec<PersistenceHistogram> = jobs
        .par_iter()
        .map(|&(s, k)| {
            let mut total = PersistenceHistogram::default();
            for g in &sources[s].1 {
                let hois = enumerate_hois(g, k, cfg.effective_cap(g.num_edges()), cfg.seed)?;
                for (_, p) in global_persistence(g, &hois, cfg.window) {
                    total.add(p, 1);
                }
            }
            Ok(total)
        })
        .collect::<hoi_core::Result<_>>()?;

    let mut hist_rows = Vec::new();
    let mut summary_rows = Vec::new();
    for (&(s, k), hist) in jobs.iter().zip(&hists) {
        let name = &sources[s].0;
        hist_rows.push(vec![cell(k), cell(name), cell(0), cell(hist.zero_count)]);
        for (p, c) in &hist.counts {
            hist_rows.push(vec![cell(k), cell(name), cell(p), cell(c)]);
        }
        let fit = fit_power_law(hist).ok();
        summary_rows.push(vec![
            cell(k),
            cell(name),
            cell(sources[s].1.len()),
            cell(hist.total),
            opt(hist.mean()),
            opt(fit.map(|f| f.exponent)),
            opt(fit.map(|f| f.r_squared)),
        ]);
    }
    out.write_csv(
        "nullcmp_hist.csv",
        &["k", "source", "persistence", "count"],
        &hist_rows,
    )?;
    out.write_csv(
        "nullcmp_summary.csv",
        &[
            "k",
            "source",
            "replicates",
            "n_measured",
            "avg_persistence",
            "exponent",
            "r2",
        ],
        &summary_rows,
    )?;
    Ok(())
}

/// Feature matrices with targets, one file per (problem, k) cell.
pub fn export(cfg: &Config, out: &OutputDir) -> Result<()> {
    let (h, _) = load(cfg)?;
    let results = run_cells(cfg, &h, |_, _, ds| Ok(ds))?;
    for ((problem, k), ds) in &results {
        let Some(ds) = ds else { continue };
        let mut columns = vec!["key"];
        columns.extend(ds.feature_names.iter().map(String::as_str));
        columns.push("persistence");
        let rows: Vec<Vec<String>> = ds
            .rows
            .iter()
            .zip(&ds.targets)
            .zip(&ds.keys)
            .map(|((row, y), key)| {
                let mut r = vec![key.clone()];
                r.extend(row.iter().map(cell));
                r.push(cell(y));
                r
            })
            .collect();
        out.write_csv(
            &format!("features_{}_k{k}.csv", problem.as_str()),
            &columns,
            &rows,
        )?;
    }
    Ok(())
}
