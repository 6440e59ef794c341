//! Engines behind the shelftalk shopping assistant.
//!
//! A shopper identifies a product (usually by scanning its barcode) and then
//! talks to the assistant about it. Every utterance goes through the intent
//! forest and is dispatched to one of four engines: specification QA,
//! recommendation, purchase guidance or chit-chat.

pub mod catalog;
pub mod chitchat;
pub mod intent;
pub mod orchestrator;
pub mod purchase;
pub mod qa;
pub mod recommend;
pub mod synth;
pub mod textproc;

pub use catalog::{Catalog, Money, Product, Specification};
pub use intent::{IntentLabel, RandomForestModel};
pub use orchestrator::{Assistant, AssistantReply, Payload};
