use std::sync::Arc;

use anyhow::Result;
use helix_core::corpus::{ingest_corpus, yearly_sizes};
use helix_core::counts::{
    branch_stats, corpus_triples, distribution_of_counts, Branch, CountMapKind, CountingRule,
    YearlyTriples,
};
use helix_core::dynamics::{
    branch_share_series, cohort_impact, detect_entries, rank_trajectories, top_pairs,
};
use helix_core::info::{efficiency_series, yearly_mi_with, MiOptions};
use helix_core::mesh::load_mesh;
use helix_core::null_model::{null_ensemble, ShuffleConfig};
use helix_core::scaling::{heaps_fit, heaps_points, rank_table, zipf_fit, RankScope};
use helix_core::synth::{synth_corpus, SynthConfig};
use helix_core::wilcoxon::wilcoxon_signed_rank;
use helix_core::{Corpus, IngestReport, YearRange};
use serde_json::json;

use crate::args::{
    DynamicsArgs, IngestArgs, InputArgs, MiArgs, NullArgs, PairOptions, PairsArgs, ScalingArgs,
    StatsArgs, SynthArgs,
};
use crate::output::{num, opt_num, sha256_hex, Run};

struct Loaded {
    corpus: Corpus,
    report: IngestReport,
    label: String,
    rule: CountingRule,
}

fn load(input: &InputArgs, run: &mut Run) -> Result<Loaded> {
    run.input("corpus", &input.corpus)?;
    run.input("mesh", &input.mesh)?;
    let (vocabulary, _) = load_mesh(&input.mesh)?;
    let mut tsv = Vec::new();
    vocabulary.write_tsv(&mut tsv)?;
    let range = input.years.unwrap_or_default();
    let (corpus, report) = ingest_corpus(&input.corpus, Arc::new(vocabulary), range)?;
    let mut canonical = Vec::new();
    corpus.write_canonical_jsonl(&mut canonical)?;
    run.hashes(sha256_hex(&tsv), Some(sha256_hex(&canonical)));
    let label = input
        .query
        .clone()
        .unwrap_or_else(|| corpus.query_label().to_string());
    Ok(Loaded {
        corpus,
        report,
        label,
        rule: input.counting.into(),
    })
}

fn input_config(input: &InputArgs) -> serde_json::Value {
    json!({
        "years": input.years.unwrap_or_default(),
        "counting": CountingRule::from(input.counting),
    })
}

pub fn ingest(args: &IngestArgs) -> Result<()> {
    let mut run = Run::new("ingest", &args.out.out)?;
    let data = load(&args.input, &mut run)?;
    run.config(input_config(&args.input))?;
    let mut canonical = Vec::new();
    data.corpus.write_canonical_jsonl(&mut canonical)?;
    run.bytes("corpus.jsonl", &canonical)?;
    let mut tsv = Vec::new();
    data.corpus.vocabulary().write_tsv(&mut tsv)?;
    run.bytes("mesh.tsv", &tsv)?;
    run.json(
        "ingest_report.json",
        &json!({
            "publications": data.corpus.len(),
            "report": data.report,
        }),
    )?;
    run.finish()?;
    Ok(())
}

pub fn stats(args: &StatsArgs) -> Result<()> {
    let mut run = Run::new("stats", &args.out.out)?;
    let data = load(&args.input, &mut run)?;
    run.config(input_config(&args.input))?;
    let corpus = &data.corpus;
    let triples = corpus_triples(corpus, data.rule)?;
    let s = branch_stats(&triples)?;
    let assignments: usize = corpus.publications().iter().map(|p| p.mesh_count()).sum();

    let mut row = vec![
        data.label.clone(),
        corpus.len().to_string(),
        corpus.vocabulary_size().to_string(),
        num(assignments as f64 / corpus.len() as f64),
    ];
    for b in Branch::ALL {
        row.extend([num(s.mean_of(b)), num(s.sd_of(b)), num(s.median_of(b))]);
    }
    run.csv(
        "table1.csv",
        &[
            "query",
            "A_q",
            "V_q",
            "mean_mesh",
            "mean_C",
            "sd_C",
            "median_C",
            "mean_D",
            "sd_D",
            "median_D",
            "mean_E",
            "sd_E",
            "median_E",
        ],
        [row],
    )?;

    run.csv(
        "yearly_sizes.csv",
        &[
            "year",
            "publications",
            "assignments",
            "distinct",
            "mean_mesh_per_pub",
        ],
        yearly_sizes(corpus).into_iter().map(|y| {
            vec![
                y.year.to_string(),
                y.publications.to_string(),
                y.assignments.to_string(),
                y.distinct.to_string(),
                num(y.mean_mesh_per_pub),
            ]
        }),
    )?;

    let mut dist = Vec::new();
    for b in Branch::ALL {
        for (count, fraction) in distribution_of_counts(&triples, b) {
            dist.push(vec![b.to_string(), count.to_string(), num(fraction)]);
        }
    }
    run.csv(
        "count_distribution.csv",
        &["branch", "count", "fraction"],
        dist,
    )?;

    let column = |b: Branch| -> Vec<i64> { triples.iter().map(|t| i64::from(t.get(b))).collect() };
    let mut tests = Vec::new();
    for (a, b) in [
        (Branch::C, Branch::D),
        (Branch::C, Branch::E),
        (Branch::D, Branch::E),
    ] {
        let t = wilcoxon_signed_rank(&column(a), &column(b))?;
        tests.push(vec![
            format!("{a}-{b}"),
            num(t.statistic),
            num(t.w_plus),
            num(t.w_minus),
            num(t.p_value),
            t.n_effective.to_string(),
            t.exact.to_string(),
        ]);
    }
    run.csv(
        "wilcoxon.csv",
        &[
            "pair",
            "statistic",
            "w_plus",
            "w_minus",
            "p_value",
            "n_effective",
            "exact",
        ],
        tests,
    )?;

    let mut eff = Vec::new();
    for r in efficiency_series(corpus) {
        for b in Branch::ALL {
            let i = b.index();
            eff.push(vec![
                r.year.to_string(),
                b.to_string(),
                opt_num(r.efficiency[i]),
                r.vocabulary[i].to_string(),
                r.uses[i].to_string(),
            ]);
        }
    }
    run.csv(
        "efficiency.csv",
        &["year", "branch", "efficiency", "vocabulary", "uses"],
        eff,
    )?;
    run.finish()?;
    Ok(())
}

pub fn mi(args: &MiArgs) -> Result<()> {
    let mut run = Run::new("mi", &args.out.out)?;
    let data = load(&args.input, &mut run)?;
    let map: CountMapKind = args.map.into();
    let mut config = input_config(&args.input);
    config["map_kind"] = json!(map);
    config["include_zero_vectors"] = json!(!args.exclude_zero);
    run.config(config)?;
    let series = yearly_mi_with(
        &data.corpus,
        map,
        MiOptions {
            rule: data.rule,
            include_zero_vectors: !args.exclude_zero,
        },
    )?;
    run.csv(
        "mi.csv",
        &[
            "year",
            "map",
            "H_C",
            "H_D",
            "H_E",
            "H_CD",
            "H_CE",
            "H_DE",
            "H_CDE",
            "T_CD",
            "T_CE",
            "T_DE",
            "T_CDE",
            "n_obs",
            "low_support",
        ],
        series.records.iter().map(|r| {
            let mut row = vec![r.year.to_string(), map.to_string()];
            row.extend(
                [
                    r.h_c, r.h_d, r.h_e, r.h_cd, r.h_ce, r.h_de, r.h_cde, r.t_cd, r.t_ce, r.t_de,
                    r.t_cde,
                ]
                .map(num),
            );
            row.extend([r.n_obs.to_string(), r.low_support.to_string()]);
            row
        }),
    )?;
    run.finish()?;
    Ok(())
}

pub fn null(args: &NullArgs) -> Result<()> {
    let mut run = Run::new("null", &args.out.out)?;
    let data = load(&args.input, &mut run)?;
    let config = ShuffleConfig {
        replicates: args.replicates,
        ci_level: args.ci,
        seed: args.seed,
        map_kind: args.map.into(),
        include_zero_vectors: !args.exclude_zero,
    };
    config.validate()?;
    let mut manifest_config = input_config(&args.input);
    manifest_config["shuffle"] = json!(config);
    manifest_config["targets"] = json!(args.target.0);
    run.config(manifest_config)?;

    let triples = YearlyTriples::from_corpus(&data.corpus, data.rule)?;
    let ensemble = null_ensemble(&triples, &config)?;
    let mut rows = Vec::new();
    for &target in &args.target.0 {
        let band = ensemble.band(target)?;
        for r in band.rows {
            rows.push(vec![
                r.year.to_string(),
                target.to_string(),
                config.map_kind.to_string(),
                num(r.observed),
                num(r.mean_rand),
                num(r.lo),
                num(r.hi),
                r.flag.name().to_string(),
            ]);
        }
    }
    run.csv(
        "null.csv",
        &[
            "year",
            "target",
            "map",
            "observed",
            "mean_rand",
            "lo",
            "hi",
            "flag",
        ],
        rows,
    )?;
    run.finish()?;
    Ok(())
}

pub fn scaling(args: &ScalingArgs) -> Result<()> {
    let mut run = Run::new("scaling", &args.out.out)?;
    let data = load(&args.input, &mut run)?;
    let mut config = input_config(&args.input);
    config["min_count"] = json!(args.min_count);
    run.config(config)?;
    let table = rank_table(&data.corpus, RankScope::AllYears);
    let points = heaps_points(&data.corpus);
    let zipf = zipf_fit(&table, args.min_count)?;
    let heaps = heaps_fit(&points)?;
    run.json("scaling.json", &json!({ "zipf": zipf, "heaps": heaps }))?;
    run.csv(
        "zipf_points.csv",
        &["rank", "descriptor", "count"],
        table
            .rows
            .iter()
            .map(|r| vec![r.rank.to_string(), r.id.clone(), r.count.to_string()]),
    )?;
    run.csv(
        "heaps_points.csv",
        &["year", "M", "V"],
        yearly_sizes(&data.corpus).iter().map(|y| {
            vec![
                y.year.to_string(),
                y.assignments.to_string(),
                y.distinct.to_string(),
            ]
        }),
    )?;
    run.finish()?;
    Ok(())
}

fn pair_window(corpus: &Corpus, window: Option<YearRange>) -> (i32, i32) {
    let first = corpus.years().next().unwrap_or(0);
    let last = corpus.years().last().unwrap_or(0);
    let w = window.unwrap_or_default();
    (w.min.unwrap_or(first), w.max.unwrap_or(last))
}

fn write_pairs(run: &mut Run, corpus: &Corpus, opts: &PairOptions, name: &str) -> Result<()> {
    let (first, second) = opts.branches;
    let pairs = top_pairs(
        corpus,
        first,
        second,
        pair_window(corpus, opts.window),
        opts.limit,
    )?;
    run.csv(
        name,
        &[
            "rank",
            "branch_a",
            "descriptor_a",
            "name_a",
            "branch_b",
            "descriptor_b",
            "name_b",
            "publications",
            "window_start",
            "window_end",
        ],
        pairs.iter().enumerate().map(|(i, p)| {
            vec![
                (i + 1).to_string(),
                p.branch_a.to_string(),
                p.descriptor_a.clone(),
                p.name_a.clone(),
                p.branch_b.to_string(),
                p.descriptor_b.clone(),
                p.name_b.clone(),
                p.co_count.to_string(),
                p.window[0].to_string(),
                p.window[1].to_string(),
            ]
        }),
    )
}

fn pair_config(corpus: &Corpus, opts: &PairOptions) -> serde_json::Value {
    json!({
        "branches": [opts.branches.0, opts.branches.1],
        "window": pair_window(corpus, opts.window),
        "limit": opts.limit,
    })
}

pub fn dynamics(args: &DynamicsArgs) -> Result<()> {
    let mut run = Run::new("dynamics", &args.out.out)?;
    let data = load(&args.input, &mut run)?;
    let corpus = &data.corpus;
    let mut config = input_config(&args.input);
    config["top_k"] = json!(args.topk);
    config["pairs"] = pair_config(corpus, &args.pairs);
    config["cohort"] = json!(args.cohort);
    run.config(config)?;

    let matrix = rank_trajectories(corpus, args.topk)?;
    let mut header = vec!["descriptor", "name", "primary_branch", "overall_rank"];
    let year_names: Vec<String> = matrix.years.iter().map(i32::to_string).collect();
    header.extend(year_names.iter().map(String::as_str));
    run.csv(
        "trajectories.csv",
        &header,
        matrix.rows.iter().map(|r| {
            let mut row = vec![
                r.id.clone(),
                r.name.clone(),
                r.primary_branch.to_string(),
                r.overall_rank.to_string(),
            ];
            row.extend(r.cells.iter().map(|c| c.code().to_string()));
            row
        }),
    )?;

    let entries = detect_entries(corpus, args.topk)?;
    run.csv(
        "entries.csv",
        &[
            "descriptor",
            "name",
            "primary_branch",
            "birth_year",
            "appearances",
            "impact",
        ],
        entries.iter().map(|e| {
            vec![
                e.id.clone(),
                e.name.clone(),
                e.primary_branch.to_string(),
                e.birth_year.to_string(),
                e.appearances.to_string(),
                num(e.impact),
            ]
        }),
    )?;

    write_pairs(&mut run, corpus, &args.pairs, "pairs.csv")?;

    run.csv(
        "shares.csv",
        &["year", "n_C", "n_D", "n_E", "share_C", "share_D", "share_E"],
        branch_share_series(corpus, data.rule)?.iter().map(|r| {
            let mut row = vec![r.year.to_string()];
            row.extend(r.counts.map(|c| c.to_string()));
            row.extend((0..3).map(|i| opt_num(r.shares.map(|s| s[i]))));
            row
        }),
    )?;

    if let Some(window) = args.cohort {
        let first = corpus.years().next().unwrap_or(0);
        let last = corpus.years().last().unwrap_or(0);
        let impact = cohort_impact(
            corpus,
            args.topk,
            window.min.unwrap_or(first),
            window.max.unwrap_or(last),
        )?;
        run.json("cohort.json", &impact)?;
    }
    run.finish()?;
    Ok(())
}

pub fn pairs(args: &PairsArgs) -> Result<()> {
    let mut run = Run::new("pairs", &args.out.out)?;
    let data = load(&args.input, &mut run)?;
    let mut config = input_config(&args.input);
    config["pairs"] = pair_config(&data.corpus, &args.pairs);
    run.config(config)?;
    write_pairs(&mut run, &data.corpus, &args.pairs, "pairs.csv")?;
    run.finish()?;
    Ok(())
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let mut run = Run::new("synth", &args.out.out)?;
    let defaults = SynthConfig::default();
    let config = SynthConfig {
        mode: args.mode.into(),
        pubs_per_year: args.pubs,
        years: args.years,
        start_year: args.start_year,
        rho: args.rho,
        seed: args.seed,
        rates: args.rates.unwrap_or(defaults.rates),
        vocab_per_branch: args.vocab,
        ..defaults
    };
    run.config(&config)?;
    let corpus = synth_corpus(&config)?;
    let mut tsv = Vec::new();
    corpus.vocabulary().write_tsv(&mut tsv)?;
    let mut jsonl = Vec::new();
    corpus.write_canonical_jsonl(&mut jsonl)?;
    run.hashes(sha256_hex(&tsv), Some(sha256_hex(&jsonl)));
    run.bytes("mesh.tsv", &tsv)?;
    run.bytes("corpus.jsonl", &jsonl)?;
    run.finish()?;
    Ok(())
}
