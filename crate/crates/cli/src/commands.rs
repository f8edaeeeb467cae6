use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use segproj_core::ibm::{ibm_train, IbmModel};
use segproj_core::noise::{
    estimate_distribution, inject_noise, replay, seed_for_ratio, EditDistribution, NoiseSpec,
    RNG_ALGORITHM,
};
use segproj_core::reference::{select_reference, Selection, SentenceVectors, UndecidedReason};
use segproj_core::residual::SimilarityConfig;
use segproj_core::segment::DictionarySegmenter;
use segproj_core::tune::{
    compare_scores, evaluate_config, fold_assignment, plan, ConfigScore, Grid, PreparedPair,
};
use segproj_core::{Sentence, SentencePair};

use crate::cli::*;
use crate::formats::{self, *};
use crate::pipeline::{
    align_corpus, fill_tokenizations, project_corpus, InvariantViolation, Mode, ScoringInputs,
};
use crate::report::{
    build_report, render_table, EvalReport, SystemInput, ViewerBundle, SCHEMA_VERSION,
};

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Align(a) => align(a),
        Command::Project(a) => project(a),
        Command::Segment(a) => segment(a),
        Command::GenNoise(a) => gen_noise(a),
        Command::Evaluate(a) => evaluate(a),
        Command::SelectReference(a) => select(a),
        Command::ExportReport(a) => export(a),
        Command::TrainIbm(a) => train_ibm(a),
        Command::Tune(a) => tune(a),
        Command::EstimateDistribution(a) => estimate(a),
    }
}

fn segmenter(path: Option<&Path>) -> Result<Option<DictionarySegmenter>> {
    path.map(|p| Ok(DictionarySegmenter::new(formats::read_dictionary(p)?)))
        .transpose()
}

fn scoring_inputs(args: &ScoringArgs, corpus: &[SentencePair]) -> Result<ScoringInputs> {
    let mut inputs = ScoringInputs::default();
    if let Some(p) = &args.glyph_table {
        inputs.tables.glyph = read_glyph_table(p)?;
    }
    if let Some(p) = &args.pinyin_table {
        inputs.tables.pinyin = read_pinyin_table(p)?;
    }
    if let Some(p) = &args.embeddings {
        inputs.embeddings = read_embeddings(p, corpus)?;
    }
    inputs.config = match &args.config {
        Some(p) => read_config(p)?,
        None => SimilarityConfig::SUBMITTED,
    };
    Ok(inputs)
}

fn align(args: AlignArgs) -> Result<()> {
    let mut corpus = read_corpus(&args.corpus)?;
    let inputs = scoring_inputs(&args.scoring, &corpus)?;
    let model = if args.mode == Mode::Ibm {
        let seg = segmenter(args.dictionary.as_deref())?;
        fill_tokenizations(&mut corpus, seg.as_ref(), false, true)?;
        Some(match &args.ibm_model {
            Some(p) => read_json::<IbmModelFile>(p)?
                .into_model()
                .with_context(|| format!("{}: invalid model", p.display()))?,
            None => ibm_train(&corpus, args.iterations)?,
        })
    } else {
        None
    };
    let alignments = align_corpus(&corpus, args.mode, &inputs, model.as_ref())?;
    for (pair, a) in corpus.iter().zip(&alignments) {
        a.validate(&pair.source, &pair.target)
            .map_err(|e| InvariantViolation(format!("pair {:?}: {e}", pair.id)))?;
    }
    write_jsonl(
        &args.out,
        corpus
            .iter()
            .zip(&alignments)
            .map(|(p, a)| AlignmentRecord::new(&p.id, a)),
    )
}

fn project(args: ProjectArgs) -> Result<()> {
    let mut corpus = read_corpus(&args.corpus)?;
    let seg = segmenter(args.dictionary.as_deref())?;
    fill_tokenizations(&mut corpus, seg.as_ref(), true, true)?;
    let alignments = read_alignments(&args.alignments, &corpus)?;
    let out = project_corpus(&corpus, &alignments)?;
    write_predictions(&args.out, &corpus, &out)
}

fn segment(args: SegmentArgs) -> Result<()> {
    let mut corpus = read_corpus(&args.corpus)?;
    let seg = segmenter(args.dictionary.as_deref())?;
    fill_tokenizations(&mut corpus, seg.as_ref(), true, false)?;
    let tokens: Vec<_> = corpus
        .iter()
        .map(|p| p.initial_source_tokens().cloned())
        .collect::<segproj_core::Result<_>>()?;
    write_predictions(&args.out, &corpus, &tokens)
}

/// Ratios from the flags, 1%..10% when none are given.
fn ratios(args: &GenNoiseArgs) -> Result<Vec<f64>> {
    let raw: Vec<String> = match (&args.ratio, &args.ratios) {
        (Some(r), _) => vec![r.clone()],
        (None, Some(rs)) => rs.clone(),
        (None, None) => return Ok((1..=10).map(|k| f64::from(k) / 100.0).collect()),
    };
    raw.iter()
        .map(|r| parse_ratio(r).map_err(|e| anyhow!(e)))
        .collect()
}

fn gen_noise(args: GenNoiseArgs) -> Result<()> {
    let clean = read_segmented(&args.corpus)?;
    let distribution = match &args.distribution {
        Some(d) => EditDistribution {
            substitution: d[0],
            deletion: d[1],
            insertion: d[2],
        },
        None => EditDistribution::LEARNER,
    };
    let ratios = ratios(&args)?;
    // validate every ratio before writing anything
    let runs = ratios
        .par_iter()
        .map(|&ratio| {
            let seed = seed_for_ratio(args.seed, ratio);
            let spec = NoiseSpec {
                distribution,
                ..NoiseSpec::new(ratio, seed)
            };
            let out = inject_noise(&clean, &spec).map_err(|e| anyhow!("ratio {ratio}: {e}"))?;
            let replayed = replay(&clean, &out.log)?;
            if replayed.iter().ne(out.pairs.iter().map(|p| &p.source)) {
                return Err(InvariantViolation(format!(
                    "ratio {ratio}: perturbation log does not replay"
                ))
                .into());
            }
            Ok((ratio, seed, out))
        })
        .collect::<Result<Vec<_>>>()?;
    for (ratio, seed, out) in runs {
        let dir = args.out.join(format!("ratio_{ratio}"));
        write_corpus(&dir.join("pairs.jsonl"), &out.pairs)?;
        write_jsonl(
            &dir.join("perturbations.jsonl"),
            out.log.entries.iter().map(PerturbationRecord::from),
        )?;
        let manifest = NoiseManifest {
            ratio,
            seed,
            base_seed: args.seed,
            rng: RNG_ALGORITHM.to_string(),
            distribution: distribution.into(),
            pool_size: out.pool_size,
            total_chars: out.total_chars,
            operations: out.counts.total(),
            op_counts: OpCounts {
                substitution: out.counts.substitution,
                deletion: out.counts.deletion,
                insertion: out.counts.insertion,
            },
        };
        write_json(&dir.join("manifest.json"), &manifest)?;
        eprintln!(
            "ratio {ratio}: {} edits over {} characters -> {}",
            manifest.operations,
            out.total_chars,
            dir.display()
        );
    }
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let corpus = read_corpus(&args.corpus)?;
    let missing_gold: Vec<&str> = corpus
        .iter()
        .filter(|p| p.gold_source_tokens.is_none())
        .map(|p| p.id.as_str())
        .collect();
    if !missing_gold.is_empty() {
        bail!(
            "{}: no gold_source_tokens for ids {}",
            args.corpus.display(),
            missing_gold.join(", ")
        );
    }
    let alignments: BTreeMap<&str, &Path> = args
        .alignments
        .iter()
        .map(|(n, p)| (n.as_str(), p.as_path()))
        .collect();
    if let Some(unknown) = alignments
        .keys()
        .find(|n| !args.predictions.iter().any(|(p, _)| p == *n))
    {
        bail!("alignments given for unknown system {unknown:?}");
    }
    let systems = args
        .predictions
        .iter()
        .map(|(name, path)| {
            Ok(SystemInput {
                name: name.clone(),
                predictions: read_predictions(path, &corpus)?,
                alignments: alignments
                    .get(name.as_str())
                    .map(|p| read_alignments(p, &corpus))
                    .transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = build_report(
        &corpus,
        &systems,
        args.compare.then_some((args.resamples, args.seed)),
    )?;
    print!("{}", render_table(&report));
    if let Some(out) = &args.out {
        write_json(out, &report)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct UndecidedRecord<'a> {
    id: &'a str,
    source: &'a str,
    targets: &'a [String],
    reason: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    levenshtein_choice: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cosine_choice: Option<usize>,
}

fn select(args: SelectReferenceArgs) -> Result<()> {
    let entries: Vec<(usize, MultiReferenceRecord)> = read_jsonl(&args.corpus)?;
    let vectors: BTreeMap<String, CandidateEmbeddingRecord> = match &args.embeddings {
        Some(p) => read_jsonl::<CandidateEmbeddingRecord>(p)?
            .into_iter()
            .map(|(_, r)| (r.id.clone(), r))
            .collect(),
        None => BTreeMap::new(),
    };
    let mut selected = Vec::new();
    let mut undecided = Vec::new();
    for (n, e) in &entries {
        if e.targets.is_empty() {
            bail!(
                "{}:{n}: entry {:?} has no candidate targets",
                args.corpus.display(),
                e.id
            );
        }
        let source = Sentence::new(&e.source);
        let candidates: Vec<Sentence> = e.targets.iter().map(|t| Sentence::new(t)).collect();
        let v = vectors.get(&e.id).map(|r| SentenceVectors {
            source: &r.source_vectors,
            candidates: &r.candidate_vectors,
        });
        if let Some(v) = &v {
            if v.candidates.len() != candidates.len() {
                bail!(
                    "embeddings for {:?} cover {} of {} candidates",
                    e.id,
                    v.candidates.len(),
                    candidates.len()
                );
            }
        }
        match select_reference(&source, &candidates, v.as_ref()) {
            Selection::Selected(k) => selected.push(PairRecord {
                id: e.id.clone(),
                source: e.source.clone(),
                target: e.targets[k].clone(),
                source_tokens: e.source_tokens.clone(),
                target_tokens: None,
                gold_source_tokens: e.gold_source_tokens.clone(),
            }),
            Selection::Undecided(reason) => {
                let (reason, lev, cos) = match reason {
                    UndecidedReason::Disagreement {
                        levenshtein,
                        cosine,
                    } => ("disagreement", Some(levenshtein), Some(cosine)),
                    UndecidedReason::NoEmbeddings => ("no_embeddings", None, None),
                    UndecidedReason::NoCandidates => ("no_candidates", None, None),
                };
                undecided.push(UndecidedRecord {
                    id: &e.id,
                    source: &e.source,
                    targets: &e.targets,
                    reason,
                    levenshtein_choice: lev,
                    cosine_choice: cos,
                });
            }
        }
    }
    eprintln!("{} selected, {} undecided", selected.len(), undecided.len());
    write_jsonl(&args.out.join("selected.jsonl"), &selected)?;
    write_jsonl(&args.out.join("undecided.jsonl"), &undecided)
}

fn export(args: ExportReportArgs) -> Result<()> {
    let report: EvalReport = read_json(&args.report)?;
    let bundle = ViewerBundle::new(report);
    write_json(&args.out, &bundle)?;
    eprintln!(
        "bundle schema {SCHEMA_VERSION} with {} records -> {}",
        bundle.record_count,
        args.out.display()
    );
    Ok(())
}

fn train_ibm(args: TrainIbmArgs) -> Result<()> {
    let mut corpus = read_corpus(&args.corpus)?;
    let seg = segmenter(args.dictionary.as_deref())?;
    fill_tokenizations(&mut corpus, seg.as_ref(), false, true)?;
    let model: IbmModel = ibm_train(&corpus, args.iterations)?;
    for w in model.log_likelihood_trace().windows(2) {
        if w[1] < w[0] - 1e-9 {
            return Err(InvariantViolation(format!(
                "log-likelihood fell from {} to {}",
                w[0], w[1]
            ))
            .into());
        }
    }
    write_json(&args.out, &IbmModelFile::from_model(&model))
}

fn tune(args: TuneArgs) -> Result<()> {
    let mut corpus = read_corpus(&args.corpus)?;
    let seg = segmenter(args.dictionary.as_deref())?;
    fill_tokenizations(&mut corpus, seg.as_ref(), true, true)?;
    let inputs = scoring_inputs(&args.scoring, &corpus)?;
    let grid = match args.grid {
        GridChoice::Full => Grid::default_search(),
        GridChoice::Submitted => Grid::Explicit(vec![SimilarityConfig::SUBMITTED]),
    };
    let (configs, pruned) = plan(corpus.len(), &grid, args.folds, !args.no_prune)?;
    if !pruned.is_empty() {
        eprintln!(
            "skipped {} configurations whose weights cannot exceed the threshold",
            pruned.len()
        );
    }
    let prepared = corpus
        .par_iter()
        .map(|p| PreparedPair::new(p, &inputs.tables, inputs.embeddings.get(&p.id)))
        .collect::<segproj_core::Result<Vec<_>>>()?;
    let fold = fold_assignment(corpus.len(), args.folds, args.seed);
    let mut ranked: Vec<ConfigScore> = configs
        .par_iter()
        .map(|c| evaluate_config(c, &prepared, &fold, args.folds))
        .collect();
    ranked.sort_by(compare_scores);
    write_tune_csv(&args.out, &ranked, args.folds)?;
    if let Some(best) = ranked.first() {
        let c = best.config;
        eprintln!(
            "best: emb {} glyph {} pinyin {} pos {} tau {} (mean F1 {:.4})",
            c.lambda_emb, c.lambda_glyph, c.lambda_pinyin, c.lambda_pos, c.tau, best.mean_f1
        );
    }
    Ok(())
}

pub fn write_tune_csv(path: &Path, ranked: &[ConfigScore], folds: usize) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let mut header: Vec<String> = [
        "rank",
        "lambda_emb",
        "lambda_glyph",
        "lambda_pinyin",
        "lambda_pos",
        "tau",
    ]
    .iter()
    .map(ToString::to_string)
    .collect();
    header.extend(
        [
            "norm_emb",
            "norm_glyph",
            "norm_pinyin",
            "norm_pos",
            "mean_f1",
            "max_f1",
        ]
        .map(String::from),
    );
    header.extend((1..=folds).map(|k| format!("fold_{k}_f1")));
    w.write_record(&header)?;
    for (rank, s) in ranked.iter().enumerate() {
        let c = s.config;
        let weights = [c.lambda_emb, c.lambda_glyph, c.lambda_pinyin, c.lambda_pos];
        let sum: f64 = weights.iter().sum();
        let mut row = vec![(rank + 1).to_string()];
        row.extend(weights.iter().chain([c.tau].iter()).map(f64::to_string));
        row.extend(weights.iter().map(|x| {
            if sum > 0.0 {
                format!("{:.6}", x / sum)
            } else {
                "0".into()
            }
        }));
        row.push(format!("{:.6}", s.mean_f1));
        row.push(format!("{:.6}", s.max_f1));
        row.extend(s.fold_f1.iter().map(|f| format!("{f:.6}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let corpus = read_corpus(&args.corpus)?;
    let d = estimate_distribution(&corpus)?;
    let record = DistributionRecord::from(d);
    println!("{}", serde_json::to_string(&record)?);
    if let Some(out) = &args.out {
        write_json(out, &record)?;
    }
    Ok(())
}
