//! Synthetic intent corpus.
//!
//! Queries are produced by filling paraphrase templates for each intent.
//! Slot values may themselves contain slots (`{thing}` can become
//! `this {item}`), and a shared pool of openers and closers adds
//! intent-neutral noise words.

use crate::intent::{IntentLabel, LabeledQuery};
use crate::textproc::tokenize;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use thiserror::Error;

const SPEC_QA: &[&str] = &[
    "How {adj} is {thing}?",
    "What is the {attr} of {thing}?",
    "What's the {attr} on {thing}?",
    "What {attr} is {thing}?",
    "Tell me the {attr} of {thing}.",
    "How much does {thing} weigh?",
    "What are the {attrs} of {thing}?",
    "Does {thing} come in {color}?",
    "Is {thing} made of {material}?",
    "Does {thing} have a warranty?",
    "How long is the warranty on {thing}?",
    "Can I return {thing}?",
    "What is the return policy for {thing}?",
    "Is {thing} {feature}?",
    "How much power does {thing} use?",
    "What {attr} does {thing} have?",
    "How much does {thing} cost?",
    "What is the price of {thing}?",
    "Do you know the {attr}?",
    "I need to know the {attr} of {thing}.",
    "How many {unit} does {thing} hold?",
];

const RECOMMENDATION: &[&str] = &[
    "Show me some other {items}.",
    "Show me similar {items}.",
    "Are there any other similar {items}?",
    "Are there any other {items} like {thing}?",
    "Do you have anything similar to {thing}?",
    "Can you recommend another {item}?",
    "Recommend something similar.",
    "What else do you have like {thing}?",
    "What other {items} do you have?",
    "Any alternatives to {thing}?",
    "Show me more {items} like this.",
    "I want to see other options.",
    "Suggest a different {item}.",
    "Can you suggest some {comparative} {items}?",
    "What would you recommend instead of {thing}?",
    "Is there a {comparative} {item}?",
    "Show me some alternatives.",
    "Compare {thing} with other {items}.",
    "What are some other {items} you sell?",
    "I'd like to look at other {items}.",
    "Give me a few more choices.",
];

const PURCHASE: &[&str] = &[
    "I want to buy {thing}.",
    "I would like to purchase {thing}.",
    "I'd like to buy {thing}.",
    "Let me buy {thing}.",
    "Can I buy {thing}?",
    "How do I buy {thing}?",
    "I'll take {thing}.",
    "I want to order {thing}.",
    "Purchase {thing} for me.",
    "Buy {thing}.",
    "Add {thing} to my cart.",
    "I'm ready to check out.",
    "I'm ready to pay for {thing}.",
    "Can I pay for {thing} now?",
    "Ring {thing} up.",
    "Go ahead and buy {thing}.",
    "I want to get {thing}.",
    "Place an order for {thing}.",
    "I'd like to pay with my card.",
    "Checkout {thing}.",
    "Sell me {thing}.",
];

const CHITCHAT: &[&str] = &[
    "How are you doing?",
    "How are you?",
    "How's it going?",
    "Hello.",
    "Hi there.",
    "Good morning.",
    "Good evening.",
    "What is your name?",
    "Who are you?",
    "Are you a robot?",
    "Is the sky blue?",
    "Tell me a joke.",
    "What's the weather like today?",
    "Do you like music?",
    "Thank you.",
    "Thanks a lot.",
    "Goodbye.",
    "See you later.",
    "Nice to meet you.",
    "Where are you from?",
    "What time is it?",
    "What do you do for fun?",
    "Do you have any pets?",
    "Are you happy?",
    "What's up?",
    "How old are you?",
    "Can you sing?",
    "What is the meaning of life?",
    "Do you dream?",
    "Is it going to rain?",
    "Who made you?",
    "What's your favorite color?",
    "You are funny.",
    "I am bored.",
    "I'm tired.",
    "Have a nice day.",
    "Do you like {food}?",
    "What is your favorite {food}?",
    "Are you smarter than me?",
    "Can we be friends?",
];

const OPENERS: &[&str] = &["hey", "hi", "excuse me", "um", "okay", "so", "well"];
const CLOSERS: &[&str] = &["please", "thanks", "right now", "by the way"];

fn slot(name: &str) -> &'static [&'static str] {
    match name {
        "thing" => &["this", "it", "this one", "this {item}", "the {item}", "that {item}"],
        "item" => &[
            "chair",
            "office chair",
            "desk",
            "lamp",
            "washer",
            "dryer",
            "drill",
            "grill",
            "fridge",
            "refrigerator",
            "sofa",
            "table",
            "bookcase",
            "vacuum",
            "microwave",
            "fan",
            "heater",
            "mattress",
            "tv",
            "blender",
        ],
        "items" => &[
            "chairs", "desks", "lamps", "washers", "dryers", "drills", "grills", "sofas", "tables", "products",
            "items", "models", "options", "brands",
        ],
        "adj" => &["heavy", "tall", "wide", "long", "big", "deep", "loud", "high", "large"],
        "attr" => &[
            "weight",
            "height",
            "width",
            "depth",
            "color",
            "material",
            "warranty",
            "return policy",
            "price",
            "capacity",
            "wattage",
            "voltage",
            "size",
            "brand",
            "model number",
        ],
        "attrs" => &["dimensions", "specs", "specifications", "features", "measurements"],
        "color" => &["black", "white", "red", "blue", "gray", "silver"],
        "material" => &["wood", "metal", "leather", "plastic", "steel", "mesh", "fabric"],
        "feature" => &[
            "waterproof",
            "adjustable",
            "foldable",
            "cordless",
            "energy efficient",
            "easy to assemble",
        ],
        "unit" => &["gallons", "pounds", "cubic feet", "liters"],
        "comparative" => &["cheaper", "better", "lighter", "bigger", "smaller", "similar", "other"],
        "food" => &["pizza", "coffee", "ice cream", "pasta"],
        other => panic!("unknown template slot {other:?}"),
    }
}

fn templates(label: IntentLabel) -> &'static [&'static str] {
    match label {
        IntentLabel::ProductSpecQA => SPEC_QA,
        IntentLabel::Recommendation => RECOMMENDATION,
        IntentLabel::Purchase => PURCHASE,
        IntentLabel::ChitChat => CHITCHAT,
    }
}

fn fill<R: Rng>(template: &str, rng: &mut R) -> String {
    let mut out = String::with_capacity(template.len() + 16);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = open + rest[open..].find('}').expect("unterminated slot");
        let value = slot(&rest[open + 1..close]).choose(rng).expect("slot has values");
        out.push_str(&fill(value, rng));
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    out
}

fn decorate<R: Rng>(query: String, rng: &mut R) -> String {
    let mut q = query;
    if rng.gen_bool(0.25) {
        let opener = OPENERS.choose(rng).unwrap();
        let mut chars = q.chars();
        let first = chars
            .next()
            .map(|c| c.to_lowercase().collect::<String>())
            .unwrap_or_default();
        q = format!(
            "{}{}, {first}{}",
            opener[..1].to_uppercase(),
            &opener[1..],
            chars.as_str()
        );
    }
    if rng.gen_bool(0.2) {
        let closer = CLOSERS.choose(rng).unwrap();
        let (body, punct) = match q.char_indices().last() {
            Some((i, c)) if c == '?' || c == '.' => (&q[..i], c.to_string()),
            _ => (q.as_str(), String::new()),
        };
        q = format!("{body}, {closer}{punct}");
    }
    q
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("queries per intent must be at least 1")]
    ZeroPerIntent,
    #[error("could only produce {produced} distinct {label} queries")]
    Exhausted { label: IntentLabel, produced: usize },
}

/// `per_intent` distinct queries for each of the four intents, shuffled.
/// Distinctness is judged on tokens, so queries differing only in
/// punctuation or case count as duplicates.
pub fn generate_intent_corpus(per_intent: usize, seed: u64) -> Result<Vec<LabeledQuery>, SynthError> {
    if per_intent == 0 {
        return Err(SynthError::ZeroPerIntent);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<Vec<String>> = HashSet::new();
    let mut out = Vec::with_capacity(per_intent * IntentLabel::ALL.len());
    for label in IntentLabel::ALL {
        let mut produced = 0;
        let mut attempts = 0;
        while produced < per_intent {
            attempts += 1;
            if attempts > per_intent * 200 {
                return Err(SynthError::Exhausted { label, produced });
            }
            let template = templates(label).choose(&mut rng).unwrap();
            let query = decorate(fill(template, &mut rng), &mut rng);
            if seen.insert(tokenize(&query)) {
                out.push(LabeledQuery::new(query, label));
                produced += 1;
            }
        }
    }
    out.shuffle(&mut rng);
    Ok(out)
}
