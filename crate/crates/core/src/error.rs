use thiserror::Error;

/// Errors from reading or checking a scenario.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("line {line}, column {column}: expected {expected}")]
    Syntax { line: usize, column: usize, expected: String },
    #[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Semantic { line: Option<usize>, message: String },
}

impl ScenarioError {
    pub fn syntax(line: usize, column: usize, expected: impl Into<String>) -> Self {
        ScenarioError::Syntax { line, column, expected: expected.into() }
    }

    pub fn semantic(line: Option<usize>, message: impl Into<String>) -> Self {
        ScenarioError::Semantic { line, message: message.into() }
    }
}
