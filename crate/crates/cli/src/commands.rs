//! Subcommand bodies. Each one validates its flags, makes the library call and
//! lays the result out as a table.

use wishart_stc::lmax::{
    best_translation, d1, empirical_mode, fit_r_squared, fit_translation_plane, g_mode, NormalEquations,
    TranslationFitRow, TABLE_I, TABLE_II, TABLE_III,
};
use wishart_stc::pep::{
    compare_closed_to_quadrature, pep_avg_closed_detailed, pep_avg_quadrature, ChannelParams, PepInputs,
};
use wishart_stc::rmt::empirical_lmax_density;
use wishart_stc::sim::{compare_to_analytic, simulate_pairwise, simulate_word_error, DecoderNorm, SimConfig, SimResult};
use wishart_stc::stc::{
    example_codebook, lmax_criterion_report, rank_det_report, search_codebook, trace_report, CriterionReport,
    ExampleCode, SearchStrategy,
};
use wishart_stc::{Codebook, Complex64, WishartSpec};

use crate::args::*;
use crate::codebook_io::{load_codebook, save_codebook};
use crate::document::{Cell, ResultDocument, Table};
use crate::CliError;

type Outcome = Result<Table, CliError>;

pub(crate) fn dispatch(cli: &Cli) -> Result<ResultDocument, CliError> {
    let seed = cli.seed;
    let payload = match &cli.command {
        Command::Density(a) => density(a, seed)?,
        Command::Tables(a) => tables(a, seed)?,
        Command::FitD1(a) => fit_d1(a, seed)?,
        Command::Pep(p) => match p {
            PepCommand::Closed(a) => pep_closed(a)?,
            PepCommand::Quad(a) => pep_quad(a)?,
            PepCommand::Mc(a) => pep_mc(a, seed)?,
            PepCommand::Compare(a) => pep_compare(a)?,
        },
        Command::Criteria(c) => criteria(c)?,
        Command::Examples(a) => examples(a)?,
        Command::Search(a) => search(a, seed)?,
        Command::Simulate(a) => simulate(a, seed)?,
    };
    let mut parameters = serde_json::to_value(&cli.command).map_err(|e| CliError::Io(e.to_string()))?;
    // Drop the enum wrapper: {"density": {...}} becomes {...} plus the seed.
    if let serde_json::Value::Object(map) = &mut parameters {
        if map.len() == 1 {
            let inner = map.values().next().cloned().unwrap_or_default();
            parameters = inner;
        }
    }
    if let serde_json::Value::Object(map) = &mut parameters {
        map.insert("seed".into(), seed.into());
    }
    Ok(ResultDocument::new(cli.command.name(), parameters, payload))
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn density(a: &DensityArgs, seed: u64) -> Outcome {
    let spec = WishartSpec::new(a.m, a.n, a.sigma2)?;
    let hi = match a.hi {
        Some(h) => h,
        // Comfortably past the right edge of the largest-eigenvalue bulk.
        None => {
            let edge = 2.0 * a.sigma2 * ((a.m as f64).sqrt() + (a.n as f64).sqrt()).powi(2);
            1.5 * edge + 20.0 * a.sigma2
        }
    };
    let hist = empirical_lmax_density(&spec, a.trials, a.bins, hi, seed)?;
    let mut t = Table::new(&["bin_center", "density"]);
    for (x, d) in hist.centers().into_iter().zip(hist.densities()) {
        t.push(vec![x.into(), d.into()]);
    }
    Ok(t)
}

fn ensemble(m: usize, n: usize) -> String {
    format!("W({m},{n})")
}

fn tables(a: &TablesArgs, seed: u64) -> Outcome {
    match (a.which, a.source) {
        (1, Source::Published) => {
            let mut t = Table::new(&["ensemble", "m", "n", "translation", "mode"]);
            for (m, n, tr, mode) in TABLE_I {
                t.push(vec![ensemble(m, n).into(), m.into(), n.into(), tr.into(), mode.into()]);
            }
            Ok(t)
        }
        (1, Source::Computed) => {
            let mut t = Table::new(&["ensemble", "m", "n", "translation", "mode"]);
            for (m, n, _, _) in TABLE_I {
                let r = best_translation(&WishartSpec::new(m, n, 1.0)?, a.trials, seed)?;
                t.push(vec![ensemble(m, n).into(), m.into(), n.into(), r.translation.into(), r.mode.into()]);
            }
            Ok(t)
        }
        (2, source) => {
            let mut t = Table::new(&["ensemble", "m", "n", "exact_mode", "g_mode", "difference"]);
            for (m, n, exact, g, diff) in TABLE_II {
                let row = match source {
                    Source::Published => (exact, g, diff),
                    Source::Computed => {
                        let exact = empirical_mode(&WishartSpec::new(m, n, 1.0)?, a.trials, seed)?;
                        let g = g_mode(m, n, 1.0)?;
                        (exact, g, exact - g)
                    }
                };
                t.push(vec![ensemble(m, n).into(), m.into(), n.into(), row.0.into(), row.1.into(), row.2.into()]);
            }
            Ok(t)
        }
        (3, source) => {
            let mut t = Table::new(&["m", "n", "d1"]);
            for (m, n, published) in TABLE_III {
                let v = match source {
                    Source::Published => published,
                    Source::Computed => d1(m, n),
                };
                t.push(vec![m.into(), n.into(), v.into()]);
            }
            Ok(t)
        }
        (w, _) => Err(usage(format!("--which must be 1, 2 or 3, got {w}"))),
    }
}

fn fit_d1(a: &FitArgs, seed: u64) -> Outcome {
    let rows: Vec<TranslationFitRow> = match a.source {
        Source::Published => wishart_stc::lmax::table_ii_rows(),
        Source::Computed => TABLE_II
            .iter()
            .map(|&(m, n, _, _, _)| {
                let exact = empirical_mode(&WishartSpec::new(m, n, 1.0)?, a.trials, seed)?;
                Ok(TranslationFitRow {
                    m,
                    n,
                    mu: exact - g_mode(m, n, 1.0)?,
                })
            })
            .collect::<Result<_, wishart_stc::Error>>()?,
    };
    let coeffs = fit_translation_plane(&rows)?;
    let eqs = NormalEquations::assemble(&rows);
    let diag = fit_r_squared(&rows, &coeffs)?;
    let mut t = Table::new(&["quantity", "value"]);
    let mut put = |k: String, v: f64| t.push(vec![k.into(), v.into()]);
    put("a".into(), coeffs.a);
    put("b".into(), coeffs.b);
    put("c".into(), coeffs.c);
    for (i, row) in eqs.matrix.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            put(format!("normal_matrix_{i}{j}"), *v);
        }
    }
    for (i, v) in eqs.rhs.iter().enumerate() {
        put(format!("normal_rhs_{i}"), *v);
    }
    put("normal_residual".into(), eqs.residual(&coeffs));
    put("mean_difference".into(), diag.mean_mu);
    put("total_variation".into(), diag.total_variation);
    put("explained_variation".into(), diag.explained_variation);
    put("residual_variation".into(), diag.residual_variation);
    put("r_squared".into(), diag.r_squared);
    Ok(t)
}

fn link(a: &LinkArgs) -> Result<(ChannelParams, PepInputs), CliError> {
    let params = ChannelParams::new(a.ntx, a.nrx, a.frame, a.n0)?;
    let inputs = PepInputs::new(a.c, &params)?;
    Ok((params, inputs))
}

fn check_rel_tol(tol: f64) -> Result<(), CliError> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(usage(format!("--rel-tol must lie in (0, 1), got {tol}")))
    }
}

fn pep_closed(a: &LinkArgs) -> Outcome {
    let (params, inputs) = link(a)?;
    let ev = pep_avg_closed_detailed(&inputs, &params)?;
    let mut t = Table::new(&[
        "value",
        "term_count",
        "cancellation",
        "within_stable_order",
        "branch_inactive",
        "d1",
        "d2",
    ]);
    t.push(vec![
        ev.value.into(),
        ev.term_count.into(),
        ev.cancellation.into(),
        ev.within_stable_order.into(),
        inputs.branch_inactive().into(),
        inputs.d1.into(),
        inputs.d2.into(),
    ]);
    Ok(t)
}

fn pep_quad(a: &QuadArgs) -> Outcome {
    check_rel_tol(a.rel_tol)?;
    let (params, inputs) = link(&a.link)?;
    let v = pep_avg_quadrature(&inputs, &params, a.rel_tol)?;
    let mut t = Table::new(&["value", "branch_inactive", "d1", "d2"]);
    t.push(vec![v.into(), inputs.branch_inactive().into(), inputs.d1.into(), inputs.d2.into()]);
    Ok(t)
}

fn pep_compare(a: &QuadArgs) -> Outcome {
    check_rel_tol(a.rel_tol)?;
    let (params, inputs) = link(&a.link)?;
    let r = compare_closed_to_quadrature(&inputs, &params, a.rel_tol)?;
    let mut t = Table::new(&["closed", "quadrature", "quadrature_unbranched", "branch_inactive", "relative_gap"]);
    t.push(vec![
        r.closed.into(),
        r.quadrature.into(),
        r.quadrature_unbranched.into(),
        r.branch_inactive.into(),
        r.relative_gap.into(),
    ]);
    Ok(t)
}

/// Parses `x:re:im;x:re:im;...`.
fn parse_traceless(spec: &str) -> Result<Vec<(f64, Complex64)>, CliError> {
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let parts: Vec<&str> = item.split(':').map(str::trim).collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| usage(format!("bad number '{s}' in --params")));
            match parts.as_slice() {
                [x, re, im] => Ok((num(x)?, Complex64::new(num(re)?, num(im)?))),
                _ => Err(usage(format!("--params item '{item}' must be x:re:im"))),
            }
        })
        .collect()
}

fn example(id: ExampleId, params: Option<&str>) -> Result<Codebook, CliError> {
    let code = match id {
        ExampleId::BinarySingular => ExampleCode::BinarySingular,
        ExampleId::Quaternion => ExampleCode::Quaternion,
        ExampleId::QuaternionModified => ExampleCode::QuaternionModified,
        ExampleId::Traceless => {
            let p = params.ok_or_else(|| usage("the traceless family needs --params x:re:im;..."))?;
            ExampleCode::Traceless(parse_traceless(p)?)
        }
    };
    Ok(example_codebook(&code)?)
}

fn resolve(src: &BookSource) -> Result<Codebook, CliError> {
    match (&src.example, &src.book) {
        (Some(id), None) => example(*id, src.params.as_deref()),
        (None, Some(path)) => load_codebook(path),
        _ => Err(usage("give exactly one of --example or --book")),
    }
}

fn parse_pair(s: &str, book: &Codebook) -> Result<(usize, usize), CliError> {
    let bad = || usage(format!("--pair must be two distinct word indices below {}, got '{s}'", book.len()));
    let (i, j) = s.split_once(',').ok_or_else(bad)?;
    let i: usize = i.trim().parse().map_err(|_| bad())?;
    let j: usize = j.trim().parse().map_err(|_| bad())?;
    if i == j || i >= book.len() || j >= book.len() {
        return Err(bad());
    }
    Ok((i, j))
}

fn sim_config(book: &Codebook, nrx: usize, n0: f64, norm: DecoderNorm, trials: u64, seed: u64) -> Result<SimConfig, CliError> {
    let params = ChannelParams::new(book.n_t(), nrx, book.l(), n0)?;
    Ok(SimConfig::new(params, norm, trials, seed)?)
}

fn sim_columns() -> Vec<&'static str> {
    vec!["error_count", "trials", "rate", "ci95_halfwidth", "low_count"]
}

fn sim_cells(r: &SimResult) -> Vec<Cell> {
    vec![r.error_count.into(), r.trials.into(), r.rate.into(), r.ci95_halfwidth.into(), r.low_count.into()]
}

fn pep_mc(a: &McArgs, seed: u64) -> Outcome {
    let book = resolve(&a.source)?;
    let (i, j) = parse_pair(&a.pair, &book)?;
    let cfg = sim_config(&book, a.nrx, a.n0, DecoderNorm::Spectral, a.trials, seed)?;
    let (c, e) = (&book.words()[i], &book.words()[j]);
    let r = compare_to_analytic(c, e, &cfg)?;
    let mut cols = sim_columns();
    cols.extend(["thm51_mean", "thm56_value"]);
    let mut t = Table::new(&cols);
    let mut row = sim_cells(&r.empirical);
    row.extend([r.thm51_mean.into(), r.thm56_value.into()]);
    t.push(row);
    Ok(t)
}

fn simulate(a: &SimulateArgs, seed: u64) -> Outcome {
    let book = resolve(&a.source)?;
    let norm = match a.norm {
        NormArg::Spectral => DecoderNorm::Spectral,
        NormArg::Frobenius => DecoderNorm::Frobenius,
    };
    let cfg = sim_config(&book, a.nrx, a.n0, norm, a.trials, seed)?;
    let r = match a.mode {
        SimMode::Pairwise => {
            let (i, j) = parse_pair(&a.pair, &book)?;
            simulate_pairwise(&book.words()[i], &book.words()[j], &cfg)?
        }
        SimMode::Word => simulate_word_error(&book, &cfg)?,
    };
    let mut t = Table::new(&sim_columns());
    t.push(sim_cells(&r));
    Ok(t)
}

fn report_table(r: &CriterionReport) -> Table {
    let mut t = Table::new(&[
        "criterion",
        "min_rank",
        "min_det_product",
        "min_trace",
        "min_sq_spectral_dist",
        "worst_i",
        "worst_j",
        "satisfied",
        "max_abs_codeword_trace",
        "threshold",
    ]);
    let criterion = serde_json::to_value(r.criterion)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    let satisfied = match r.satisfied {
        Some(b) => b.to_string(),
        None => "not_applicable".to_string(),
    };
    t.push(vec![
        criterion.into(),
        r.min_rank.into(),
        r.min_det_product.into(),
        r.min_trace.into(),
        r.min_sq_spectral_dist.into(),
        r.worst_pair.0.into(),
        r.worst_pair.1.into(),
        satisfied.into(),
        r.max_abs_codeword_trace.into(),
        r.threshold.clone().into(),
    ]);
    t
}

fn criteria(c: &CriteriaCommand) -> Outcome {
    let r = match c {
        CriteriaCommand::RankDet(a) => {
            if !(a.tol_rank > 0.0) {
                return Err(usage("--tol-rank must be positive"));
            }
            rank_det_report(&resolve(&a.source)?, a.tol_rank)?
        }
        CriteriaCommand::Trace(a) => trace_report(&resolve(&a.source)?)?,
        CriteriaCommand::Lmax(a) => lmax_criterion_report(&resolve(&a.source)?)?,
    };
    Ok(report_table(&r))
}

fn words_table(book: &Codebook) -> Table {
    let mut t = Table::new(&["word", "row", "col", "re", "im"]);
    for (k, w) in book.words().iter().enumerate() {
        for r in 0..w.rows() {
            for (col, z) in w.row(r).iter().enumerate() {
                t.push(vec![k.into(), r.into(), col.into(), z.re.into(), z.im.into()]);
            }
        }
    }
    t
}

fn examples(a: &ExamplesArgs) -> Outcome {
    let book = example(a.id, a.params.as_deref())?;
    if let Some(path) = &a.save {
        save_codebook(&book, path)?;
    }
    Ok(words_table(&book))
}

/// Parses `1,-1,i,0.5:0.5` into complex symbols.
fn parse_alphabet(s: &str) -> Result<Vec<Complex64>, CliError> {
    s.split(',')
        .map(str::trim)
        .map(|tok| {
            let num = |x: &str| x.parse::<f64>().map_err(|_| usage(format!("bad alphabet symbol '{tok}'")));
            match tok {
                "i" | "+i" => Ok(Complex64::new(0.0, 1.0)),
                "-i" => Ok(Complex64::new(0.0, -1.0)),
                _ => match tok.split_once(':') {
                    Some((re, im)) => Ok(Complex64::new(num(re)?, num(im)?)),
                    None => Ok(Complex64::new(num(tok)?, 0.0)),
                },
            }
        })
        .collect()
}

fn search(a: &SearchArgs, seed: u64) -> Outcome {
    let alphabet = parse_alphabet(&a.alphabet)?;
    let (strategy, budget) = match a.strategy {
        Strategy::Exhaustive => (SearchStrategy::Exhaustive, a.budget.unwrap_or(1_000_000)),
        Strategy::Greedy => (SearchStrategy::RandomRestartGreedy, a.budget.unwrap_or(32)),
    };
    let (book, report) = search_codebook(&alphabet, a.ntx, a.frame, a.size, strategy, budget, seed)?;
    if let Some(path) = &a.save {
        save_codebook(&book, path)?;
    }
    Ok(report_table(&report))
}
