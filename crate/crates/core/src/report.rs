use serde::Serialize;

/// One failed condition of a verifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub condition: String,
    pub detail: String,
}

/// A list of named condition failures; empty means everything held.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Report {
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fail(&mut self, condition: &str, detail: impl Into<String>) {
        self.failures.push(Failure {
            condition: condition.to_string(),
            detail: detail.into(),
        });
    }

    pub fn check(&mut self, ok: bool, condition: &str, detail: impl FnOnce() -> String) {
        if !ok {
            self.fail(condition, detail());
        }
    }

    pub fn extend(&mut self, other: Report) {
        self.failures.extend(other.failures);
    }

    pub fn is_empty(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn has(&self, condition: &str) -> bool {
        self.failures.iter().any(|f| f.condition == condition)
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.failures.is_empty() {
            return f.write_str("no failures");
        }
        for (i, x) in self.failures.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", x.condition, x.detail)?;
        }
        Ok(())
    }
}
