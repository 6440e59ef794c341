use super::{IntentClassifier, IntentLabel, LabeledQuery, N_LABELS};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("evaluation needs at least one test query")]
pub struct EvalError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    /// `confusion[actual][predicted]`, indexed by [`IntentLabel::index`].
    pub confusion: [[u32; N_LABELS]; N_LABELS],
}

pub fn evaluate<C: IntentClassifier + ?Sized>(model: &C, test: &[LabeledQuery]) -> Result<Evaluation, EvalError> {
    if test.is_empty() {
        return Err(EvalError);
    }
    let mut confusion = [[0u32; N_LABELS]; N_LABELS];
    for q in test {
        confusion[q.label.index()][model.classify(&q.text).index()] += 1;
    }
    let correct: usize = (0..N_LABELS).map(|i| confusion[i][i] as usize).sum();
    Ok(Evaluation {
        accuracy: correct as f64 / test.len() as f64,
        correct,
        total: test.len(),
        confusion,
    })
}

impl fmt::Display for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "accuracy: {:.4} ({}/{})", self.accuracy, self.correct, self.total)?;
        write!(f, "{:>16}", "actual\\predicted")?;
        for label in IntentLabel::ALL {
            write!(f, " {:>14}", label.as_str())?;
        }
        writeln!(f)?;
        for actual in IntentLabel::ALL {
            write!(f, "{:>16}", actual.as_str())?;
            for n in self.confusion[actual.index()] {
                write!(f, " {n:>14}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
