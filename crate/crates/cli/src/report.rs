//! The result of one command, rendered as text or JSON. Both renderings are
//! produced from the same verdict list.

use std::fmt::Write;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// A generator where two computed values disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub generator: String,
    pub check: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Section {
    pub title: String,
    pub lines: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub verdicts: Vec<Verdict>,
    pub witnesses: Vec<Witness>,
    pub sections: Vec<Section>,
    /// A document printed by `--emit`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emitted: Option<String>,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    #[serde(flatten)]
    report: &'a RunReport,
    ok: bool,
    exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> RunReport {
        RunReport { command: command.into(), ..Default::default() }
    }

    pub fn verdict(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { name: name.into(), pass, detail: detail.into() });
    }

    pub fn witness(&mut self, generator: &str, check: &str, left: String, right: String) {
        self.witnesses.push(Witness { generator: generator.into(), check: check.into(), left, right });
    }

    pub fn section(&mut self, title: impl Into<String>, lines: Vec<String>) {
        self.sections.push(Section { title: title.into(), lines });
    }

    pub fn ok(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// 0 when every verdict passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.ok() {
            0
        } else {
            1
        }
    }

    pub fn render_text(&self, timing: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for s in &self.sections {
            let _ = writeln!(out, "[{}]", s.title);
            for l in &s.lines {
                let _ = writeln!(out, "  {l}");
            }
        }
        for v in &self.verdicts {
            let tag = if v.pass { "PASS" } else { "FAIL" };
            if v.detail.is_empty() {
                let _ = writeln!(out, "{tag}  {}", v.name);
            } else {
                let _ = writeln!(out, "{tag}  {}: {}", v.name, v.detail);
            }
        }
        for w in &self.witnesses {
            let _ = writeln!(out, "witness {}: {} gives {} vs {}", w.generator, w.check, w.left, w.right);
        }
        if let Some(doc) = &self.emitted {
            out.push_str("[document]\n");
            out.push_str(doc);
        }
        if timing {
            let _ = writeln!(out, "elapsed: {} ms", self.elapsed_ms);
        }
        let _ = writeln!(out, "result: {} (exit {})", if self.ok() { "PASS" } else { "FAIL" }, self.exit_code());
        out
    }

    pub fn render_json(&self, timing: bool) -> String {
        let j = JsonReport {
            report: self,
            ok: self.ok(),
            exit_code: self.exit_code(),
            elapsed_ms: timing.then_some(self.elapsed_ms),
        };
        serde_json::to_string_pretty(&j).expect("reports serialize")
    }
}
