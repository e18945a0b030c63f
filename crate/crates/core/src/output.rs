//! Machine-readable output for the CLI. All writers are deterministic: ids
//! are sorted and fields are emitted in a fixed order.

use std::io::Write;

use serde::Serialize;

use crate::claims::{VerificationReport, SCHEMA};
use crate::config::OutputFormat;
use crate::error::Result;
use crate::family::{ElementSet, FamilyTag};
use crate::green::{Relation, RelationClasses};

#[derive(Debug, Serialize)]
pub struct Enumeration<'a> {
    pub schema: &'static str,
    pub family: FamilyTag,
    pub n: u8,
    pub count: usize,
    pub ids: &'a [u64],
}

pub fn write_enumeration(mut w: impl Write, set: &ElementSet, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let doc = Enumeration {
                schema: SCHEMA,
                family: set.family(),
                n: set.n(),
                count: set.len(),
                ids: set.ids(),
            };
            serde_json::to_writer(&mut w, &doc)?;
            writeln!(w)?;
        }
        OutputFormat::Csv => {
            writeln!(w, "id")?;
            for id in set.ids() {
                writeln!(w, "{id}")?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassEntry {
    pub ids: Vec<u64>,
    pub size: usize,
    /// Common height of the members, or `None` if they differ.
    pub height: Option<usize>,
    pub has_idempotent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassesDoc {
    pub schema: &'static str,
    pub family: FamilyTag,
    pub n: u8,
    pub relation: Relation,
    pub method: String,
    /// Present when both methods ran; whether their partitions matched.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
    pub count: usize,
    pub classes: Vec<ClassEntry>,
}

impl ClassesDoc {
    pub fn new(
        set: &ElementSet,
        classes: &RelationClasses,
        method: &str,
        agree: Option<bool>,
    ) -> Self {
        let entries: Vec<ClassEntry> = classes
            .classes
            .iter()
            .map(|c| {
                let mut ids: Vec<u64> = c.iter().map(|&p| set.ids()[p]).collect();
                ids.sort_unstable();
                let h = set.get(c[0]).height();
                ClassEntry {
                    size: ids.len(),
                    ids,
                    height: c.iter().all(|&p| set.get(p).height() == h).then_some(h),
                    has_idempotent: c.iter().any(|&p| set.get(p).is_idempotent()),
                }
            })
            .collect();
        Self {
            schema: SCHEMA,
            family: set.family(),
            n: set.n(),
            relation: classes.relation,
            method: method.to_string(),
            agree,
            count: entries.len(),
            classes: entries,
        }
    }

    pub fn write(&self, mut w: impl Write, format: OutputFormat) -> Result<()> {
        match format {
            OutputFormat::Json => {
                serde_json::to_writer(&mut w, self)?;
                writeln!(w)?;
            }
            OutputFormat::Csv => {
                writeln!(w, "class,id,height,has_idempotent")?;
                for (i, c) in self.classes.iter().enumerate() {
                    let h = c.height.map(|h| h.to_string()).unwrap_or_default();
                    for id in &c.ids {
                        writeln!(w, "{i},{id},{h},{}", c.has_idempotent)?;
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn write_report(mut w: impl Write, report: &VerificationReport) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    Ok(())
}
