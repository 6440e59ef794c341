//! Checks against the files shipped in `data/`.

use shelftalk_core::catalog::Catalog;
use shelftalk_core::chitchat::ChitchatCorpus;
use shelftalk_core::intent::{evaluate, train_forest, train_test_split, ForestConfig, IntentClassifier};
use shelftalk_core::purchase::DiscountRules;
use shelftalk_core::qa::{
    evaluate_topk, load_qa_cases, LexicalRanker, Question, SpecRanker, SynonymLexicon, TemplateSet,
};
use shelftalk_core::synth::generate_intent_corpus;
use shelftalk_core::IntentLabel;
use std::path::PathBuf;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

#[test]
fn all_bundled_files_load() {
    let catalog = Catalog::load(data("catalog.jsonl")).unwrap();
    assert!(catalog.len() >= 10);
    assert!(!SynonymLexicon::load(data("lexicon.tsv")).unwrap().is_empty());
    TemplateSet::load(data("templates.tsv")).unwrap();
    DiscountRules::load(data("discounts.json")).unwrap();
    let corpus = ChitchatCorpus::load(data("chitchat.tsv")).unwrap();
    assert!(corpus.len() >= 100);
    let mut queries: Vec<_> = corpus.pairs().iter().map(|(q, _)| q.to_lowercase()).collect();
    queries.sort();
    queries.dedup();
    assert_eq!(queries.len(), corpus.len(), "duplicate chit-chat queries");
}

#[test]
fn qa_questions_rank_the_gold_spec_first() {
    let catalog = Catalog::load(data("catalog.jsonl")).unwrap();
    let ranker = LexicalRanker::for_catalog(&catalog, SynonymLexicon::load(data("lexicon.tsv")).unwrap());
    let cases = load_qa_cases(data("qa_eval.tsv")).unwrap();
    assert!(cases.len() >= 100);
    for case in &cases {
        let product = catalog.get(&case.product_id).unwrap();
        let ranked = ranker.rank(&Question::new(&case.question), product).unwrap();
        let top = ranked.top().unwrap();
        if ranked.position_of(&case.gold_spec) != Some(0) {
            println!(
                "miss: {:?} -> {} ({:.3}), wanted {}",
                case.question, top.spec.name, top.score, case.gold_spec
            );
        }
    }
    let acc = evaluate_topk(&ranker, &catalog, &cases).unwrap();
    println!("top1 {:.3} top2 {:.3} top3 {:.3}", acc.at(1), acc.at(2), acc.at(3));
    assert!(acc.at(1) >= 0.80);
    assert!(acc.at(1) <= acc.at(2) && acc.at(2) <= acc.at(3));
}

#[test]
fn synthetic_intent_pipeline_generalizes() {
    let corpus = generate_intent_corpus(125, 42).unwrap();
    let (train, test) = train_test_split(&corpus, 42);
    assert_eq!((train.len(), test.len()), (334, 166));
    let model = train_forest(&train, ForestConfig::with_seed(42)).unwrap();
    let eval = evaluate(&model, &test).unwrap();
    println!("{eval}");
    assert!(eval.accuracy >= 0.95, "accuracy {}", eval.accuracy);
    for (q, want) in [
        ("How heavy is this chair?", IntentLabel::ProductSpecQA),
        ("Show me some other items", IntentLabel::Recommendation),
        ("I want to buy this.", IntentLabel::Purchase),
        ("How are you doing?", IntentLabel::ChitChat),
    ] {
        assert_eq!(model.classify(q), want, "{q}");
    }
}
