//! Success-rate tables: rows are difficulties plus a total, columns are
//! categories plus a total, each cell the mean and sample standard
//! deviation of the per-repeat success rate in percent.

use super::runner::RunRecord;
use crate::tasks::{Category, Difficulty};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

/// Mean and sample standard deviation. A single value has std 0.
pub fn mean_std(xs: &[f64]) -> Stat {
    if xs.is_empty() {
        return Stat { mean: 0.0, std: 0.0 };
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() < 2 {
        0.0
    } else {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Stat { mean, std }
}

/// `None` in a key position means the total over that axis.
pub type CellKey = (Option<Difficulty>, Option<Category>);

#[derive(Clone, Debug, PartialEq)]
pub struct AgentTable {
    pub agent: String,
    pub repeats: u32,
    /// Present in the records, canonical order.
    pub categories: Vec<Category>,
    pub difficulties: Vec<Difficulty>,
    /// Cells with no tasks are absent.
    pub cells: BTreeMap<CellKey, Stat>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultsTable {
    /// One block per agent, in order of first appearance.
    pub agents: Vec<AgentTable>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },
}

fn cell(records: &[&RunRecord], seeds: &[u64]) -> Option<Stat> {
    if records.is_empty() {
        return None;
    }
    let rates: Vec<f64> = seeds
        .iter()
        .filter_map(|&s| {
            let runs: Vec<_> = records.iter().filter(|r| r.seed == s).collect();
            (!runs.is_empty()).then(|| 100.0 * runs.iter().filter(|r| r.completed).count() as f64 / runs.len() as f64)
        })
        .collect();
    Some(mean_std(&rates))
}

impl AgentTable {
    pub fn from_records(agent: &str, records: &[&RunRecord]) -> AgentTable {
        let mut seeds: Vec<u64> = records.iter().map(|r| r.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        let categories: Vec<Category> = Category::ALL
            .into_iter()
            .filter(|c| records.iter().any(|r| r.category == *c))
            .collect();
        let difficulties: Vec<Difficulty> = Difficulty::ALL
            .into_iter()
            .filter(|d| records.iter().any(|r| r.difficulty == *d))
            .collect();
        let mut cells = BTreeMap::new();
        let rows = difficulties.iter().map(|d| Some(*d)).chain([None]);
        for d in rows {
            let cols = categories.iter().map(|c| Some(*c)).chain([None]);
            for c in cols {
                let sel: Vec<&RunRecord> = records
                    .iter()
                    .copied()
                    .filter(|r| d.is_none_or(|d| r.difficulty == d) && c.is_none_or(|c| r.category == c))
                    .collect();
                if let Some(s) = cell(&sel, &seeds) {
                    cells.insert((d, c), s);
                }
            }
        }
        AgentTable {
            agent: agent.to_string(),
            repeats: seeds.len() as u32,
            categories,
            difficulties,
            cells,
        }
    }
}

impl ResultsTable {
    pub fn from_records(records: &[RunRecord]) -> ResultsTable {
        let mut order: Vec<&str> = Vec::new();
        for r in records {
            if !order.contains(&r.agent.as_str()) {
                order.push(&r.agent);
            }
        }
        let agents = order
            .into_iter()
            .map(|a| {
                let mine: Vec<&RunRecord> = records.iter().filter(|r| r.agent == a).collect();
                AgentTable::from_records(a, &mine)
            })
            .collect();
        ResultsTable { agents }
    }

    fn columns(&self) -> Vec<Category> {
        Category::ALL
            .into_iter()
            .filter(|c| self.agents.iter().any(|a| a.categories.contains(c)))
            .collect()
    }

    pub fn to_markdown(&self) -> String {
        let cols = self.columns();
        let mut s = String::from("| Agent | Task |");
        for c in &cols {
            let _ = write!(s, " {} |", c.name());
        }
        s.push_str(" Total |\n|---|---|");
        for _ in 0..=cols.len() {
            s.push_str("---|");
        }
        s.push('\n');
        for a in &self.agents {
            let rows = a.difficulties.iter().map(|d| Some(*d)).chain([None]);
            for (i, d) in rows.enumerate() {
                let name = if i == 0 { a.agent.as_str() } else { "" };
                let _ = write!(s, "| {name} | {} |", d.map_or("Total", |d| d.name()));
                for c in cols.iter().map(|c| Some(*c)).chain([None]) {
                    match a.cells.get(&(d, c)) {
                        Some(st) => {
                            let _ = write!(s, " {:.1} ± {:.1} |", st.mean, st.std);
                        }
                        None => s.push_str(" - |"),
                    }
                }
                s.push('\n');
            }
        }
        s
    }

    /// Long form, one row per cell, full float precision.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["agent", "repeats", "difficulty", "category", "mean", "std"])
            .expect("in-memory write");
        for a in &self.agents {
            for ((d, c), st) in &a.cells {
                w.write_record([
                    a.agent.clone(),
                    a.repeats.to_string(),
                    d.map_or("Total", |d| d.name()).to_string(),
                    c.map_or("Total", |c| c.name()).to_string(),
                    st.mean.to_string(),
                    st.std.to_string(),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn from_csv(text: &str) -> Result<ResultsTable, ReportError> {
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let mut t = ResultsTable::default();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            let row = i + 2;
            let bad = |msg: &str| ReportError::Row { row, msg: msg.to_string() };
            if rec.len() != 6 {
                return Err(bad("expected 6 fields"));
            }
            let repeats: u32 = rec[1].parse().map_err(|_| bad("bad repeats"))?;
            let d = match &rec[2] {
                "Total" => None,
                x => Some(Difficulty::parse(x).ok_or_else(|| bad("unknown difficulty"))?),
            };
            let c = match &rec[3] {
                "Total" => None,
                x => Some(Category::parse(x).ok_or_else(|| bad("unknown category"))?),
            };
            let mean: f64 = rec[4].parse().map_err(|_| bad("bad mean"))?;
            let std: f64 = rec[5].parse().map_err(|_| bad("bad std"))?;
            if !t.agents.last().is_some_and(|a| a.agent == rec[0]) {
                t.agents.push(AgentTable {
                    agent: rec[0].to_string(),
                    repeats,
                    categories: vec![],
                    difficulties: vec![],
                    cells: BTreeMap::new(),
                });
            }
            let a = t.agents.last_mut().unwrap();
            if let Some(d) = d.filter(|d| !a.difficulties.contains(d)) {
                a.difficulties.push(d);
            }
            if let Some(c) = c.filter(|c| !a.categories.contains(c)) {
                a.categories.push(c);
            }
            a.cells.insert((d, c), Stat { mean, std });
        }
        for a in &mut t.agents {
            a.difficulties.sort();
            a.categories.sort();
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(agent: &str, cat: Category, diff: Difficulty, task: &str, seed: u64, ok: bool) -> RunRecord {
        RunRecord {
            task: task.into(),
            category: cat,
            difficulty: diff,
            agent: agent.into(),
            seed,
            steps_used: 1,
            max_steps: diff.max_steps(),
            completed: ok,
            current_quantity: ok as u32,
            wall_time_ms: 0,
            trajectory: None,
            error: None,
        }
    }

    #[test]
    fn two_of_three_runs() {
        let rs: Vec<_> = [true, false, true]
            .iter()
            .enumerate()
            .map(|(i, &ok)| rec("a", Category::Farming, Difficulty::Easy, "t", i as u64, ok))
            .collect();
        let t = ResultsTable::from_records(&rs);
        let st = t.agents[0].cells[&(None, None)];
        assert!((st.mean - 200.0 / 3.0).abs() < 1e-9);
        // sqrt(((1/3)^2 * 2 + (2/3)^2) / 2) * 100
        assert!((st.std - 57.735_026_918_962_58).abs() < 1e-9);
        assert!(t.to_markdown().contains("66.7 ± 57.7"));
    }

    #[test]
    fn empty_table_is_header_only() {
        let md = ResultsTable::from_records(&[]).to_markdown();
        assert_eq!(md, "| Agent | Task | Total |\n|---|---|---|\n");
    }

    #[test]
    fn single_cell_gives_two_by_two() {
        let rs = vec![rec("a", Category::Combat, Difficulty::Hard, "t", 1, false)];
        let md = ResultsTable::from_records(&rs).to_markdown();
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines[0], "| Agent | Task | Combat | Total |");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("| a | Hard |"));
        assert!(lines[3].starts_with("|  | Total |"));
    }

    #[test]
    fn csv_round_trip() {
        let mut rs = Vec::new();
        for (i, cat) in Category::ALL.into_iter().enumerate() {
            for (j, d) in Difficulty::ALL.into_iter().enumerate() {
                for s in 0..3 {
                    rs.push(rec("x, \"quoted\"", cat, d, "t", s, (i + j + s as usize).is_multiple_of(3)));
                    rs.push(rec("r", cat, d, "u", s, (i * j + s as usize).is_multiple_of(2)));
                }
            }
        }
        let t = ResultsTable::from_records(&rs);
        assert_eq!(ResultsTable::from_csv(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn empty_cells_are_dashes() {
        let rs = vec![
            rec("a", Category::Combat, Difficulty::Easy, "t", 1, true),
            rec("a", Category::Social, Difficulty::Hard, "u", 1, false),
        ];
        let md = ResultsTable::from_records(&rs).to_markdown();
        assert!(md.contains("| a | Easy | 100.0 ± 0.0 | - | 100.0 ± 0.0 |"));
    }
}
