use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub value: f64,
}

/// A lower bound together with the quantities it was assembled from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub value: f64,
    pub terms: Vec<Term>,
    /// True when the bound is the trivial value 0.
    pub vacuous: bool,
    /// Vanishing remainder terms (`o(1)`, `o(n)`) were evaluated as 0.
    pub asymptotic_terms_dropped: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BoundReport {
    pub(crate) fn new(value: f64) -> Self {
        Self {
            value,
            terms: Vec::new(),
            vacuous: value <= 0.0,
            asymptotic_terms_dropped: true,
            notes: Vec::new(),
        }
    }

    pub(crate) fn term(mut self, name: &str, value: f64) -> Self {
        self.terms.push(Term {
            name: name.into(),
            value,
        });
        self
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }
}
