//! The six named ensembles under every comparison quantifier, computed
//! where possible and tabulated otherwise, next to the two-decimal table.

use gramq::coherence::OptimizerConfig;
use gramq::ensemble::Canonical;
use gramq::quantifiers::{q_commutator, q_commutator_weighted, q_hol, q_l1, reference_constants, Quantifier};
use serde::Serialize;

use crate::output::aligned;
use crate::CliResult;

pub const COLUMNS: [Quantifier; 6] = [
    Quantifier::Ql1,
    Quantifier::QFsRef,
    Quantifier::QclonRef,
    Quantifier::QHol,
    Quantifier::Qcomm,
    Quantifier::Qbig,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Computed,
    Reference,
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub quantifier: Quantifier,
    pub value: f64,
    pub source: Source,
    pub table: f64,
    /// `|value - table|`; zero for reference cells.
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub ensemble: String,
    pub cells: Vec<Cell>,
}

impl Row {
    pub fn cell(&self, q: Quantifier) -> Option<&Cell> {
        self.cells.iter().find(|c| c.quantifier == q)
    }
}

pub fn table1(cfg: &OptimizerConfig) -> CliResult<Vec<Row>> {
    Canonical::all()
        .into_iter()
        .map(|c| {
            let e = c.ensemble()?;
            let reference = reference_constants(c)?;
            let cells = COLUMNS
                .into_iter()
                .map(|q| {
                    let table = reference.get(q).expect("every column is tabulated");
                    let computed = match q {
                        Quantifier::Ql1 => Some(q_l1(&e)),
                        Quantifier::Qcomm => Some(q_commutator(&e)),
                        Quantifier::Qbig => Some(q_commutator_weighted(&e)),
                        Quantifier::QHol => Some(q_hol(&e, cfg)?),
                        _ => None,
                    };
                    Ok(match computed {
                        Some(value) => Cell {
                            quantifier: q,
                            value,
                            source: Source::Computed,
                            table,
                            deviation: (value - table).abs(),
                        },
                        None => Cell {
                            quantifier: q,
                            value: table,
                            source: Source::Reference,
                            table,
                            deviation: 0.0,
                        },
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            Ok(Row {
                ensemble: c.name().to_string(),
                cells,
            })
        })
        .collect()
}

pub fn to_text(rows: &[Row]) -> String {
    let mut header = vec!["ensemble".to_string()];
    for q in COLUMNS {
        header.push(q.to_string());
        header.push("|dev|".to_string());
    }
    let header: [String; 13] = header.try_into().expect("13 columns");
    let body: Vec<[String; 13]> = rows
        .iter()
        .map(|r| {
            let mut cells = vec![r.ensemble.clone()];
            for c in &r.cells {
                match c.source {
                    Source::Computed => {
                        cells.push(format!("{:.4}", c.value));
                        cells.push(format!("{:.4}", c.deviation));
                    }
                    Source::Reference => {
                        cells.push(format!("{:.2} (ref)", c.value));
                        cells.push("-".into());
                    }
                }
            }
            cells.try_into().expect("13 columns")
        })
        .collect();
    let mut s = aligned(&header, &body);
    s.push_str("qhol in bits; (ref) marks tabulated values that are not computed\n");
    s
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut s = String::from("ensemble,quantifier,value,source,table,deviation\n");
    for r in rows {
        for c in &r.cells {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.ensemble,
                c.quantifier,
                gramq::ensemble::format_f64(c.value),
                if c.source == Source::Computed { "computed" } else { "reference" },
                c.table,
                gramq::ensemble::format_f64(c.deviation)
            ));
        }
    }
    s
}
