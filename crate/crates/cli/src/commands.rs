use std::path::Path;

use crackecon::{
    attacker::{
        compare_modes, competition_lower_bound, optimal_threshold, AttackMode, AttackerParams,
        CrackCurve,
    },
    bounds::{
        default_head_rank, l_for_upper_bound, lower_bound_cracked, upper_bound_cracked,
        DEFAULT_EPS, DEFAULT_HEAD_MASS,
    },
    cost::{
        crack_curve_vs_tau, extrapolate_value, CostKind, ValueSpec, DEFAULT_C_HASH, DEFAULT_C_MEM,
        TAU_ONE_SECOND,
    },
    distributions::sample_corpus,
    dp_perturb::{fit_impact_study, perturb, FitKind, PerturbParams},
    zipf_fit::{
        fit_cdf_zipf_gss, fit_cdf_zipf_lls, fit_pdf_zipf_lls, FitRecord, DEFAULT_GSS_TOL,
        DEFAULT_PDF_CUTOFF, DEFAULT_R_RANGE,
    },
    zipf_threshold::{cdf_zipf_threshold, pdf_zipf_crack_bounds, pdf_zipf_threshold},
    CorpusFormat, DistSpec, FrequencyCorpus, PasswordDistribution,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{
    cli::*,
    config::ConfigFile,
    output::{emit, num, render, Artifact, Meta, Table},
    CliError,
};

const DEFAULT_SEED: u64 = 0;

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Fit(a) => fit(a),
        Command::Threshold(a) => threshold(a),
        Command::PdfThreshold(a) => pdf_threshold(a),
        Command::Attack(a) => attack(a),
        Command::Bounds(a) => bounds(a),
        Command::Cost(a) => cost(a),
        Command::Perturb(a) => perturb_cmd(a),
        Command::DpStudy(a) => dp_study(a),
        Command::Stability(a) => stability(a),
        Command::Sample(a) => sample(a),
    }
}

fn finish(common: &Common, meta: Meta, artifact: Artifact, format: Format) -> Result<(), CliError> {
    let text = render(&meta, artifact, format == Format::Csv)?;
    emit(&text, common.out.as_deref())
}

fn corpus_format(f: InputFormat) -> CorpusFormat {
    match f {
        InputFormat::RawCounts => CorpusFormat::RawCounts,
        InputFormat::RunlengthPairs => CorpusFormat::RunlengthPairs,
    }
}

fn format_name(f: InputFormat) -> &'static str {
    match f {
        InputFormat::RawCounts => "raw-counts",
        InputFormat::RunlengthPairs => "runlength-pairs",
    }
}

fn load_corpus(path: &Path, format: InputFormat) -> Result<FrequencyCorpus, CliError> {
    FrequencyCorpus::load_path(path, corpus_format(format))
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn parse_floats(text: &str, want: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            CliError::Usage(format!(
                "{what}: expected comma-separated numbers, got {text:?}"
            ))
        })?;
    if vals.len() != want && vals.len() != want + 1 {
        return Err(CliError::Usage(format!(
            "{what}: expected {want} or {} values, got {}",
            want + 1,
            vals.len()
        )));
    }
    Ok(vals)
}

/// Parse `cdf_zipf:y,r[,n_max]`, `pdf_zipf:z,s[,n_max]` or `empirical:<path>`.
fn parse_dist(
    text: &str,
    input_format: InputFormat,
) -> Result<(PasswordDistribution, Value), CliError> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("--dist {text:?}: expected <kind>:<params>")))?;
    let n_max = |v: &[f64]| v.get(2).map(|&x| x as u64);
    let spec = match kind {
        "cdf_zipf" => {
            let v = parse_floats(rest, 2, "cdf_zipf")?;
            DistSpec::CdfZipf {
                y: v[0],
                r: v[1],
                n_max: n_max(&v),
            }
        }
        "pdf_zipf" => {
            let v = parse_floats(rest, 2, "pdf_zipf")?;
            DistSpec::PdfZipf {
                z: v[0],
                s: v[1],
                n_max: n_max(&v),
            }
        }
        "empirical" => {
            let corpus = load_corpus(Path::new(rest), input_format)?;
            let dist = PasswordDistribution::empirical(&corpus)?;
            return Ok((
                dist,
                json!({ "kind": "empirical", "path": rest, "input_format": format_name(input_format) }),
            ));
        }
        other => return Err(CliError::Usage(format!("--dist: unknown kind {other:?}"))),
    };
    let dist = PasswordDistribution::new(&spec)?;
    let echo = serde_json::to_value(&spec).map_err(|e| CliError::Data(e.to_string()))?;
    Ok((dist, echo))
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing required --{flag}")))
}

fn fit(args: FitArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let format = cfg.format(args.common.format, Format::Json)?;
    let input_format = cfg.input_format(args.input.input_format)?;
    let method = args.method.unwrap_or(FitMethod::CdfLls);
    let cutoff = args.cutoff.or(cfg.cutoff).unwrap_or(DEFAULT_PDF_CUTOFF);
    let tol = args.tol.or(cfg.tol).unwrap_or(DEFAULT_GSS_TOL);
    let corpus = load_corpus(&args.input.corpus, input_format)?;

    let mut records = Vec::new();
    if matches!(method, FitMethod::CdfLls | FitMethod::All) {
        records.push(FitRecord::from(&fit_cdf_zipf_lls(&corpus)?));
    }
    if matches!(method, FitMethod::CdfGss | FitMethod::All) {
        records.push(FitRecord::from(&fit_cdf_zipf_gss(
            &corpus,
            DEFAULT_R_RANGE,
            tol,
        )?));
    }
    if matches!(method, FitMethod::PdfLls | FitMethod::All) {
        records.push(FitRecord::from(&fit_pdf_zipf_lls(&corpus, cutoff)?));
    }
    let method_name = match method {
        FitMethod::CdfLls => "cdf-lls",
        FitMethod::CdfGss => "cdf-gss",
        FitMethod::PdfLls => "pdf-lls",
        FitMethod::All => "all",
    };
    let meta = Meta::new(
        "fit",
        None,
        json!({
            "corpus": args.input.corpus.display().to_string(),
            "input_format": format_name(input_format),
            "method": method_name,
            "cutoff": cutoff,
            "tol": tol,
            "r_range": [DEFAULT_R_RANGE.0, DEFAULT_R_RANGE.1],
            "n_users": corpus.n_users(),
            "n_distinct": corpus.n_distinct(),
        }),
    );
    let artifact = if format == Format::Csv {
        let mut t = Table::new(vec![
            "method",
            "y",
            "r",
            "s",
            "C",
            "z",
            "r_squared",
            "ks",
            "cutoff",
        ]);
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        for r in &records {
            t.push(vec![
                r.method.clone(),
                opt(r.y),
                opt(r.r),
                opt(r.s),
                opt(r.c),
                opt(r.z),
                num(r.r_squared),
                opt(r.ks),
                r.cutoff.map(|c| c.to_string()).unwrap_or_default(),
            ]);
        }
        Artifact::Table(t)
    } else if records.len() == 1 {
        Artifact::Json(serde_json::to_value(&records[0]).expect("serialisable"))
    } else {
        Artifact::Json(serde_json::to_value(&records).expect("serialisable"))
    };
    finish(&args.common, meta, artifact, format)
}

/// Rows of `dataset,y,r`. A header line and `#` comments are skipped.
fn read_threshold_table(path: &Path) -> Result<Vec<(String, f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 3 {
            return Err(CliError::Data(format!(
                "{}:{}: expected dataset,y,r",
                path.display(),
                i + 1
            )));
        }
        match (cells[1].parse::<f64>(), cells[2].parse::<f64>()) {
            (Ok(y), Ok(r)) => rows.push((cells[0].to_string(), y, r)),
            _ if rows.is_empty() && i == 0 => continue,
            _ => {
                return Err(CliError::Data(format!(
                    "{}:{}: y and r must be numbers",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(rows)
}

fn threshold(args: ThresholdArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    if let Some(path) = &args.table {
        let format = cfg.format(args.common.format, Format::Csv)?;
        let rows = read_threshold_table(path)?;
        let results: Vec<(f64, f64)> = rows
            .par_iter()
            .map(|(_, y, r)| {
                Ok((
                    cdf_zipf_threshold(*y, *r, 1.0)?.t_crit,
                    cdf_zipf_threshold(*y, *r, 0.8)?.t_crit,
                ))
            })
            .collect::<Result<_, crackecon::Error>>()?;
        let mut t = Table::new(vec!["dataset", "y", "r", "T_a1", "T_a08"]);
        for ((name, y, r), (t1, t08)) in rows.iter().zip(results) {
            t.push(vec![
                name.clone(),
                num(*y),
                num(*r),
                format!("{t1:.6e}"),
                format!("{t08:.6e}"),
            ]);
        }
        let meta = Meta::new(
            "threshold",
            None,
            json!({ "table": path.display().to_string(), "a": [1.0, 0.8] }),
        );
        return finish(&args.common, meta, Artifact::Table(t), format);
    }
    let format = cfg.format(args.common.format, Format::Json)?;
    let y = require(args.y, "y")?;
    let r = require(args.r, "r")?;
    let a = args.a.or(cfg.a).unwrap_or(1.0);
    let res = cdf_zipf_threshold(y, r, a)?;
    let meta = Meta::new("threshold", None, json!({ "y": y, "r": r, "a": a }));
    let result =
        json!({ "y": y, "r": r, "a": a, "T": res.t_crit, "Z": res.z_cutoff, "t_peak": res.t_peak });
    finish(&args.common, meta, Artifact::Json(result), format)
}

fn pdf_threshold(args: PdfThresholdArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let (z, s) = (args.z, args.s);
    let k = args.k.or(cfg.k).unwrap_or(1.0);
    if let Some(grid) = &args.log10_vk {
        let format = cfg.format(args.common.format, Format::Csv)?;
        let mut t = Table::new(vec![
            "log10_vk",
            "vk",
            "t_lo",
            "t_hi",
            "fraction_lower",
            "fraction_upper",
        ]);
        for &lv in grid {
            let vk = 10f64.powf(lv);
            let res = pdf_zipf_crack_bounds(vk, 1.0, z, s)?;
            let (tl, th) = res.bracket.expect("bracket is set");
            let (fl, fh) = res.fraction_bounds.expect("fractions are set");
            t.push(vec![num(lv), num(vk), num(tl), num(th), num(fl), num(fh)]);
        }
        let meta = Meta::new(
            "pdf-threshold",
            None,
            json!({ "z": z, "s": s, "log10_vk": grid }),
        );
        return finish(&args.common, meta, Artifact::Table(t), format);
    }
    let format = cfg.format(args.common.format, Format::Json)?;
    let v = args.v.or(cfg.v);
    let res = match v {
        Some(v) => pdf_zipf_crack_bounds(v, k, z, s)?,
        None => pdf_zipf_threshold(z, s)?,
    };
    let meta = Meta::new(
        "pdf-threshold",
        None,
        json!({ "z": z, "s": s, "v": v, "k": v.map(|_| k) }),
    );
    let result = json!({
        "T_all": res.t_all,
        "t_peak": res.t_peak,
        "t_lo": res.bracket.map(|b| b.0),
        "t_hi": res.bracket.map(|b| b.1),
        "fraction_lower": res.fraction_bounds.map(|b| b.0),
        "fraction_upper": res.fraction_bounds.map(|b| b.1),
    });
    finish(&args.common, meta, Artifact::Json(result), format)
}

fn mode_name(m: AttackMode) -> &'static str {
    match m {
        AttackMode::BruteForce => "BRUTE_FORCE",
        AttackMode::MarginalScan => "MARGINAL_SCAN",
    }
}

fn attack(args: AttackArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let input_format = cfg.input_format(args.input_format)?;
    let (dist, dist_echo) = parse_dist(&args.dist, input_format)?;
    let k = args.k.or(cfg.k).unwrap_or(1.0);
    let a = args.a.or(cfg.a).unwrap_or(1.0);
    let mode = args.mode.unwrap_or(ModeArg::BruteForce);
    let mode_label = match mode {
        ModeArg::BruteForce => "brute-force",
        ModeArg::MarginalScan => "marginal-scan",
        ModeArg::Both => "both",
    };

    if let Some(grid) = args.v_grid.clone().or(cfg.v_grid.clone()) {
        let format = cfg.format(args.common.format, Format::Csv)?;
        let single = match mode {
            ModeArg::MarginalScan => AttackMode::MarginalScan,
            _ => AttackMode::BruteForce,
        };
        let outcomes = grid
            .par_iter()
            .map(|&v| optimal_threshold(&dist, AttackerParams::new(v, k, a)?, single))
            .collect::<Result<Vec<_>, _>>()?;
        let mut t = Table::new(vec![
            "v",
            "k",
            "a",
            "mode",
            "t_star",
            "fraction_cracked",
            "utility",
        ]);
        for (v, o) in grid.iter().zip(outcomes) {
            t.push(vec![
                num(*v),
                num(k),
                num(a),
                mode_name(o.mode).into(),
                o.t_star.to_string(),
                num(o.fraction_cracked),
                num(o.utility),
            ]);
        }
        let meta = Meta::new(
            "attack",
            None,
            json!({ "dist": dist_echo, "k": k, "a": a, "mode": mode_name(single), "v_grid": grid }),
        );
        return finish(&args.common, meta, Artifact::Table(t), format);
    }

    let format = cfg.format(args.common.format, Format::Json)?;
    let v = require(args.v.or(cfg.v), "v")?;
    let params = AttackerParams::new(v, k, a)?;
    let mut result = match mode {
        ModeArg::Both => serde_json::to_value(compare_modes(&dist, params)?).expect("serialisable"),
        ModeArg::BruteForce => {
            serde_json::to_value(optimal_threshold(&dist, params, AttackMode::BruteForce)?)
                .expect("serialisable")
        }
        ModeArg::MarginalScan => {
            serde_json::to_value(optimal_threshold(&dist, params, AttackMode::MarginalScan)?)
                .expect("serialisable")
        }
    };
    if let Some(grid) = args.competition_grid {
        if grid < 2 {
            return Err(CliError::Usage(
                "--competition-grid needs at least 2 points".into(),
            ));
        }
        let mut curve = CrackCurve::new(&dist, k, a);
        let mut failure = None;
        let bound = competition_lower_bound(
            |x| {
                curve.fraction(x).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    0.0
                })
            },
            v,
            grid,
        );
        if let Some(e) = failure {
            return Err(e.into());
        }
        result["competition_lower_bound"] = json!(bound);
    }
    let meta = Meta::new(
        "attack",
        None,
        json!({ "dist": dist_echo, "v": v, "k": k, "a": a, "mode": mode_label, "competition_grid": args.competition_grid }),
    );
    finish(&args.common, meta, Artifact::Json(result), format)
}

fn bounds(args: BoundsArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let format = cfg.format(args.common.format, Format::Csv)?;
    let input_format = cfg.input_format(args.input.input_format)?;
    let corpus = load_corpus(&args.input.corpus, input_format)?;
    let dataset = args.dataset.clone().unwrap_or_else(|| {
        args.input
            .corpus
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let js = args.j.clone().or(cfg.j.clone()).unwrap_or_else(|| vec![2]);
    let eps = args.eps.or(cfg.eps).unwrap_or(DEFAULT_EPS);
    let t = args
        .t
        .or(cfg.t)
        .unwrap_or_else(|| default_head_rank(&corpus, DEFAULT_HEAD_MASS));
    let vks = args.vk.clone().or(cfg.vk.clone());
    let n = corpus.n_users() as f64;

    // Each row: (j, L for the upper bound, L for the lower bound, V/k column).
    let jobs: Vec<(u64, f64, f64, f64)> = match &vks {
        Some(vks) => {
            let mut jobs = Vec::new();
            for &vk in vks {
                let l_ub = l_for_upper_bound(&corpus, vk, eps, t)?;
                for &j in &js {
                    jobs.push((j, l_ub, vk / n, vk));
                }
            }
            jobs
        }
        None => {
            let ls = args
                .l
                .clone()
                .or(cfg.l.clone())
                .unwrap_or_else(|| vec![10.0]);
            let mut jobs = Vec::new();
            for &j in &js {
                for &l in &ls {
                    jobs.push((j, l, l, n * l));
                }
            }
            jobs
        }
    };
    let rows = jobs
        .par_iter()
        .map(|&(j, l_ub, l_lb, vk)| {
            let lower = if j >= 1 {
                Some(lower_bound_cracked(&corpus, j, l_lb)?)
            } else {
                None
            };
            let upper = upper_bound_cracked(&corpus, j, l_ub, eps, t)?;
            Ok::<_, crackecon::Error>((j, l_ub, vk, lower, upper))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(vec![
        "dataset",
        "N",
        "M",
        "j",
        "L",
        "V_over_k",
        "lower_pct",
        "upper_pct",
        "mu",
        "failure_prob",
    ]);
    for (j, l, vk, lower, upper) in rows {
        table.push(vec![
            dataset.clone(),
            corpus.n_users().to_string(),
            corpus.n_distinct().to_string(),
            j.to_string(),
            num(l),
            num(vk),
            lower
                .map(|b| num(100.0 * b.bound_fraction))
                .unwrap_or_default(),
            num(100.0 * upper.bound_fraction),
            num(upper.mu.unwrap_or(0.0)),
            num(upper.failure_prob.unwrap_or(1.0)),
        ]);
    }
    let meta = Meta::new(
        "bounds",
        None,
        json!({
            "corpus": args.input.corpus.display().to_string(),
            "input_format": format_name(input_format),
            "dataset": dataset,
            "j": js,
            "L": args.l.clone().or(cfg.l.clone()),
            "vk": vks,
            "eps": eps,
            "t": t,
            "failure_prob": "empirical head mass",
            "lower_pct": "clamped to [0, 100]",
        }),
    );
    finish(&args.common, meta, Artifact::Table(table), format)
}

fn cost(args: CostArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let format = cfg.format(args.common.format, Format::Csv)?;
    let c_hash = args.c_hash.or(cfg.c_hash).unwrap_or(DEFAULT_C_HASH);
    let c_mem = args.c_mem.or(cfg.c_mem).unwrap_or(DEFAULT_C_MEM);

    if let Some(prices) = &args.price {
        let q = require(args.q, "q")?;
        let a_values = args.a_values.clone().unwrap_or_else(|| vec![0.8, 0.9, 1.0]);
        let mut t = Table::new(vec!["price", "q", "a", "v_dollars", "v_units"]);
        for &price in prices {
            for &a in &a_values {
                let v = extrapolate_value(&ValueSpec {
                    price_observed: price,
                    q_observed: q,
                    a,
                })?;
                t.push(vec![
                    num(price),
                    num(q),
                    num(a),
                    format!("{v:.2}"),
                    num(v / c_hash),
                ]);
            }
        }
        let meta = Meta::new(
            "cost",
            None,
            json!({ "price": prices, "q": q, "a_values": a_values, "c_hash": c_hash }),
        );
        return finish(&args.common, meta, Artifact::Table(t), format);
    }

    let kind = match args.kind.unwrap_or(KindArg::Iterated) {
        KindArg::Iterated => CostKind::Iterated,
        KindArg::Mhf => CostKind::Mhf,
    };
    let tau = args
        .tau
        .clone()
        .or(cfg.tau.clone())
        .unwrap_or_else(|| (0..=30).map(|e| 2f64.powi(e)).collect());
    let a = args.a.or(cfg.a).unwrap_or(1.0);
    let input_format = cfg.input_format(args.input_format)?;
    let dist_text = require(args.dist.as_deref(), "dist")?;
    let v_dollars = require(args.v_dollars.or(cfg.v_dollars), "v-dollars")?;
    let (dist, dist_echo) = parse_dist(dist_text, input_format)?;
    let curve = crack_curve_vs_tau(&dist, v_dollars, kind, c_hash, c_mem, &tau, a)?;
    let mut t = Table::new(vec![
        "tau",
        "log2_tau",
        "k_units",
        "k_dollars",
        "pct_cracked",
    ]);
    for p in curve {
        t.push(vec![
            num(p.tau),
            num(p.log2_tau),
            num(p.k_units),
            num(p.k_dollars),
            num(p.pct_cracked),
        ]);
    }
    let meta = Meta::new(
        "cost",
        None,
        json!({
            "kind": kind,
            "dist": dist_echo,
            "v_dollars": v_dollars,
            "v_units": v_dollars / c_hash,
            "a": a,
            "c_hash": c_hash,
            "c_mem": c_mem,
            "tau": tau,
            "tau_one_second": TAU_ONE_SECOND,
        }),
    );
    finish(&args.common, meta, Artifact::Table(t), format)
}

fn perturb_cmd(args: PerturbArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let input_format = cfg.input_format(args.input.input_format)?;
    let corpus = load_corpus(&args.input.corpus, input_format)?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let epsilon_dp = require(args.epsilon_dp.or(cfg.epsilon_dp), "epsilon-dp")?;
    let out = perturb(
        &corpus,
        &PerturbParams {
            epsilon_dp,
            n_trials: 1,
            seed,
        },
    )?;
    let meta = Meta::new(
        "perturb",
        Some(seed),
        json!({
            "corpus": args.input.corpus.display().to_string(),
            "input_format": format_name(input_format),
            "epsilon_dp": epsilon_dp,
            "mechanism": crackecon::dp_perturb::MECHANISM,
            "output_format": "runlength-pairs",
        }),
    );
    finish(
        &args.common,
        meta,
        Artifact::Text(out.to_runlength_string()),
        Format::Json,
    )
}

fn study_kind(f: Option<StudyFit>) -> FitKind {
    match f.unwrap_or(StudyFit::CdfLls) {
        StudyFit::CdfLls => FitKind::CdfLls,
        StudyFit::PdfLls => FitKind::PdfLls,
    }
}

fn dp_study(args: DpStudyArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let format = cfg.format(args.common.format, Format::Json)?;
    let input_format = cfg.input_format(args.input.input_format)?;
    let corpus = load_corpus(&args.input.corpus, input_format)?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let params = PerturbParams {
        epsilon_dp: args.epsilon_dp.or(cfg.epsilon_dp).unwrap_or(0.25),
        n_trials: args.trials.or(cfg.trials).unwrap_or(30),
        seed,
    };
    let fit = study_kind(args.fit);
    let study = fit_impact_study(&corpus, &params, fit)?;
    let meta = Meta::new(
        "dp-study",
        Some(seed),
        json!({
            "corpus": args.input.corpus.display().to_string(),
            "input_format": format_name(input_format),
            "epsilon_dp": params.epsilon_dp,
            "n_trials": params.n_trials,
            "fit": fit,
        }),
    );
    let artifact = if format == Format::Csv {
        let mut t = Table::new(vec!["param", "mean", "std"]);
        for (name, s) in &study.params {
            t.push(vec![name.clone(), num(s.mean), num(s.std)]);
        }
        Artifact::Table(t)
    } else {
        Artifact::Json(serde_json::to_value(&study).expect("serialisable"))
    };
    finish(&args.common, meta, artifact, format)
}

fn stability(args: StabilityArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let format = cfg.format(args.common.format, Format::Csv)?;
    let input_format = cfg.input_format(args.input.input_format)?;
    let corpus = load_corpus(&args.input.corpus, input_format)?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let trials = args.trials.or(cfg.trials).unwrap_or(1);
    let n = corpus.n_users();
    let sizes = args.sizes.clone().or(cfg.sizes.clone()).unwrap_or_else(|| {
        let mut v: Vec<u64> = (0..)
            .map(|e| 10u64.pow(e))
            .take_while(|&m| m < n)
            .filter(|&m| m >= 100)
            .collect();
        v.push(n);
        v
    });
    let fit = study_kind(args.fit);
    let jobs: Vec<(usize, u64, usize)> = sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &m)| (0..trials).map(move |k| (i, m, k)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(i, m, k)| {
            let sub_seed = seed.wrapping_add((i * trials + k) as u64);
            let sub = corpus.subsample(m, sub_seed)?;
            let (p1, p2, r2, ks) = match fit {
                FitKind::CdfLls => {
                    let f = fit_cdf_zipf_lls(&sub)?;
                    (f.y, f.r, f.r_squared, Some(f.ks))
                }
                FitKind::PdfLls => {
                    let f = fit_pdf_zipf_lls(&sub, DEFAULT_PDF_CUTOFF)?;
                    (f.z, f.s, f.r_squared, None)
                }
            };
            Ok::<_, crackecon::Error>(vec![
                m.to_string(),
                k.to_string(),
                sub_seed.to_string(),
                num(p1),
                num(p2),
                num(r2),
                ks.map(num).unwrap_or_default(),
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let header = match fit {
        FitKind::CdfLls => vec!["m", "trial", "seed", "y", "r", "r_squared", "ks"],
        FitKind::PdfLls => vec!["m", "trial", "seed", "z", "s", "r_squared", "ks"],
    };
    let mut t = Table::new(header);
    for row in rows {
        t.push(row);
    }
    let meta = Meta::new(
        "stability",
        Some(seed),
        json!({
            "corpus": args.input.corpus.display().to_string(),
            "input_format": format_name(input_format),
            "sizes": sizes,
            "trials": trials,
            "fit": fit,
        }),
    );
    finish(&args.common, meta, Artifact::Table(t), format)
}

fn sample(args: SampleArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let input_format = cfg.input_format(args.input_format)?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let (dist, dist_echo) = parse_dist(&args.dist, input_format)?;
    let corpus = sample_corpus(&dist, args.n, seed)?;
    let meta = Meta::new(
        "sample",
        Some(seed),
        json!({
            "dist": dist_echo,
            "n": args.n,
            "tail": dist.tail_convention(),
            "output_format": "runlength-pairs",
        }),
    );
    finish(
        &args.common,
        meta,
        Artifact::Text(corpus.to_runlength_string()),
        Format::Json,
    )
}
