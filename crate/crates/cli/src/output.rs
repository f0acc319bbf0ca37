//! Result rendering in the text and key-value formats.

use std::fmt::Write as _;

use clap::ValueEnum;
use rcst::io::{format_ratio, write_tree};
use rcst::isolation::Witness;
use rcst::SpanningTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `tree`/`edge` block followed by labelled lines.
    Text,
    /// One `key value` pair per line.
    Kv,
}

/// A labelled value with its spelling in each format.
struct Field {
    text: String,
    kv: String,
    value: String,
}

#[derive(Default)]
pub struct Output {
    status: &'static str,
    tree: Option<SpanningTree>,
    fields: Vec<Field>,
    /// Replaces the text rendering when set.
    text: Option<String>,
    /// Replaces both renderings when set.
    raw: Option<String>,
}

impl Output {
    pub fn new(status: &'static str) -> Self {
        Output {
            status,
            ..Output::default()
        }
    }

    /// Preformatted output, identical in both formats.
    pub fn raw(body: String) -> Self {
        Output {
            raw: Some(body),
            ..Output::default()
        }
    }

    /// Uniqueness verdict: `unique: ..`/`witness: ..` lines in text mode,
    /// ordinary fields in key-value mode.
    pub fn unique(self, unique: bool, w: Option<Witness>) -> Self {
        let mut text = format!("unique: {unique}\n");
        if let Some(w) = w {
            writeln!(text, "witness: s={} k={} x={}", w.source, w.hops, w.vertex).unwrap();
        }
        let mut out = self.field("unique", unique).witness(w);
        out.text = Some(text);
        out
    }

    pub fn tree(mut self, t: &SpanningTree) -> Self {
        self.tree = Some(t.clone());
        self
    }

    /// `text` is the label in text mode; the key-value key replaces spaces
    /// with dashes.
    pub fn field(mut self, text: &str, value: impl ToString) -> Self {
        self.fields.push(Field {
            text: text.to_string(),
            kv: text.replace(' ', "-"),
            value: value.to_string(),
        });
        self
    }

    pub fn ratio(self, text: &str, r: &num_rational::Ratio<i128>) -> Self {
        self.field(text, format_ratio(r))
    }

    pub fn witness(self, w: Option<Witness>) -> Self {
        match w {
            Some(w) => self
                .field("witness source", w.source)
                .field("witness hops", w.hops)
                .field("witness vertex", w.vertex),
            None => self,
        }
    }

    pub fn render(&self, format: Format) -> String {
        if let Some(raw) = &self.raw {
            return raw.clone();
        }
        let mut out = String::new();
        match format {
            Format::Text if self.text.is_some() => out.push_str(self.text.as_deref().unwrap()),
            Format::Text => {
                match (&self.tree, self.status) {
                    (Some(t), _) => out.push_str(&write_tree(t)),
                    // The bare outcome token stands in for the tree.
                    (None, s) => writeln!(out, "{s}").unwrap(),
                }
                for f in &self.fields {
                    writeln!(out, "{} {}", f.text, f.value).unwrap();
                }
            }
            Format::Kv => {
                writeln!(out, "status {}", self.status).unwrap();
                if let Some(t) = &self.tree {
                    writeln!(out, "n {}", t.n()).unwrap();
                    let edges: Vec<String> = t
                        .edge_pairs()
                        .into_iter()
                        .map(|(u, v, _)| format!("{u}-{v}"))
                        .collect();
                    writeln!(out, "tree-edges {}", edges.join(",")).unwrap();
                }
                // Multi-part values are comma-joined so each line splits
                // into exactly one key and one value.
                for f in &self.fields {
                    writeln!(out, "{} {}", f.kv, f.value.replace(' ', ",")).unwrap();
                }
            }
        }
        out
    }
}
