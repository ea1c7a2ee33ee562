use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

/// Ordered `key=value` entries plus named checks.
#[derive(Clone, Debug, Default)]
pub struct Report {
    entries: Vec<(String, Value)>,
    checks: Vec<Check>,
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl Into<Value>) -> &mut Self {
        self.entries.push((key.into(), value.into()));
        self
    }

    pub fn check(
        &mut self,
        name: impl Into<String>,
        expected: impl ToString,
        actual: impl ToString,
        pass: bool,
    ) -> bool {
        self.checks.push(Check {
            name: name.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            pass,
        });
        pass
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn has_checks(&self) -> bool {
        !self.checks.is_empty()
    }

    fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (k, v) in &self.entries {
            map.insert(k.clone(), v.clone());
        }
        if self.has_checks() {
            let checks: Vec<Value> = self
                .checks
                .iter()
                .map(|c| json!({"name": c.name, "expected": c.expected, "actual": c.actual, "pass": c.pass}))
                .collect();
            map.insert("checks".into(), Value::Array(checks));
            map.insert("passed".into(), json!(self.checks.len() - self.failures()));
            map.insert("failed".into(), json!(self.failures()));
        }
        Value::Object(map)
    }

    /// Entries on one line, space separated.
    pub fn line(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={}", plain(v)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// One entry per line, then one line per check and a JSON summary.
    pub fn lines(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            s.push_str(&format!("{k}={}\n", plain(v)));
        }
        if self.has_checks() {
            for c in &self.checks {
                let status = if c.pass { "pass" } else { "fail" };
                s.push_str(&format!(
                    "check={} expected={} actual={} status={status}\n",
                    c.name, c.expected, c.actual
                ));
            }
            let summary = json!({
                "checks": self.checks.len(),
                "passed": self.checks.len() - self.failures(),
                "failed": self.failures(),
            });
            s.push_str(&serde_json::to_string_pretty(&summary).expect("serializable"));
            s.push('\n');
        }
        s
    }

    pub fn render(&self, format: Format, one_line: bool) -> String {
        match format {
            Format::Json => format!("{}\n", self.to_json()),
            Format::Text if one_line => format!("{}\n", self.line()),
            Format::Text => self.lines(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json() {
        let mut r = Report::new();
        r.put("recipe", "demo").put("n", 3);
        assert_eq!(r.line(), "recipe=demo n=3");
        assert!(r.check("two", 2, 2, true));
        assert!(!r.check("three", 3, 4, false));
        assert!(!r.passed());
        let text = r.lines();
        assert!(text.contains("check=three expected=3 actual=4 status=fail\n"));
        let v = r.to_json();
        assert_eq!(v["failed"], 1);
        assert_eq!(v["n"], 3);
    }
}
