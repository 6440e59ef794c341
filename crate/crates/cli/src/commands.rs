use crate::{data_err, Failure};
use shelftalk_core::catalog::Catalog;
use shelftalk_core::intent::{
    evaluate, load_model, read_labeled_queries, save_model, train_forest, train_test_split, write_labeled_queries,
    ForestConfig,
};
use shelftalk_core::qa::{evaluate_topk, load_qa_cases, LexicalRanker, SynonymLexicon};
use shelftalk_core::synth::generate_intent_corpus;
use shelftalk_server::ServerConfig;
use std::path::Path;

pub fn train_intent(data: &Path, trees: usize, seed: u64, out: &Path) -> Result<(), Failure> {
    if trees == 0 {
        return Err(Failure::Usage("--trees must be at least 1".into()));
    }
    let queries = read_labeled_queries(data).map_err(data_err)?;
    let (train, test) = train_test_split(&queries, seed);
    let config = ForestConfig {
        n_trees: trees,
        seed,
        features_per_split: None,
    };
    let model = train_forest(&train, config).map_err(data_err)?;
    println!(
        "trained {} trees on {} queries ({} features, {} per split)",
        model.n_trees,
        train.len(),
        model.vocabulary.len(),
        model.features_per_split
    );
    match evaluate(&model, &test) {
        Ok(eval) => print!("held-out {eval}"),
        Err(e) => println!("no held-out evaluation: {e}"),
    }
    save_model(&model, out).map_err(data_err)?;
    println!("model written to {}", out.display());
    Ok(())
}

pub fn eval_intent(model: &Path, data: &Path, seed: u64, all: bool, json: bool) -> Result<(), Failure> {
    let model = load_model(model).map_err(data_err)?;
    let queries = read_labeled_queries(data).map_err(data_err)?;
    let test = if all {
        queries
    } else {
        train_test_split(&queries, seed).1
    };
    let eval = evaluate(&model, &test).map_err(data_err)?;
    if json {
        println!("{}", serde_json::to_string(&eval).expect("evaluation serializes"));
    } else {
        print!("{eval}");
    }
    Ok(())
}

pub fn eval_qa(catalog: &Path, questions: &Path, lexicon: &Path, json: bool) -> Result<(), Failure> {
    let catalog = Catalog::load(catalog).map_err(data_err)?;
    let lexicon = SynonymLexicon::load(lexicon).map_err(data_err)?;
    let cases = load_qa_cases(questions).map_err(data_err)?;
    let ranker = LexicalRanker::for_catalog(&catalog, lexicon);
    let acc = evaluate_topk(&ranker, &catalog, &cases).map_err(data_err)?;
    if json {
        println!("{}", serde_json::to_string(&acc).expect("accuracy serializes"));
    } else {
        println!("questions: {}", acc.total);
        for k in 1..=3 {
            println!("top-{k}: {:.4}", acc.at(k));
        }
    }
    Ok(())
}

pub fn gen_data(out: &Path, per_intent: usize, seed: u64) -> Result<(), Failure> {
    let data = generate_intent_corpus(per_intent, seed).map_err(|e| Failure::Usage(e.to_string()))?;
    std::fs::write(out, write_labeled_queries(&data)).map_err(|e| data_err(format!("{}: {e}", out.display())))?;
    println!("wrote {} queries to {}", data.len(), out.display());
    Ok(())
}

pub fn serve(config: ServerConfig) -> Result<(), Failure> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info,tower_http=info".into()),
        )
        .init();
    let runtime = tokio::runtime::Runtime::new().map_err(data_err)?;
    runtime
        .block_on(shelftalk_server::serve(
            config,
            |addr| println!("listening on http://{addr}"),
            shelftalk_server::shutdown_signal(),
        ))
        .map_err(data_err)
}
