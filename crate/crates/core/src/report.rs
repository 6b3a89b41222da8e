//! Result files, stats files and the run manifest embedded in their headers.
//!
//! Result line format: `LABEL.Region[,LABEL.Region...] #FU: value`, members in
//! the miner's processing order. Header lines start with `#` in column one.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{FuimError, Result};
use crate::fuzzy::FuzzyDatabase;
use crate::result::{utilities_match, MiningResult};

/// Everything needed to re-run a command, recorded verbatim in output headers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    pub fields: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>) -> Self {
        RunManifest {
            command: command.into(),
            fields: Vec::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.fields.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.fields.push((key.into(), value.to_string()));
    }

    pub fn header(&self) -> String {
        let mut out = format!("# fuim {}\n", self.command);
        for (k, v) in &self.fields {
            writeln!(out, "# {k}={v}").unwrap();
        }
        out
    }
}

pub fn render_result(result: &MiningResult, fdb: &FuzzyDatabase<'_>, manifest: &RunManifest) -> String {
    let mut out = manifest.header();
    for h in &result.hfuis {
        writeln!(out, "{} #FU: {}", h.itemset.render(fdb), h.utility).unwrap();
    }
    out
}

pub fn render_stats(result: &MiningResult, manifest: &RunManifest, started_at_unix: u64) -> String {
    let s = &result.stats;
    let mut out = manifest.header();
    writeln!(out, "started_at {started_at_unix}").unwrap();
    writeln!(out, "hfuis {}", result.hfuis.len()).unwrap();
    writeln!(out, "visited_nodes {}", s.visited_nodes).unwrap();
    writeln!(out, "constructed_lists {}", s.constructed_lists).unwrap();
    writeln!(out, "pruned_by_remaining {}", s.pruned_by_remaining).unwrap();
    writeln!(out, "pruned_by_expended {}", s.pruned_by_expended).unwrap();
    writeln!(out, "wall_time_ms {:.3}", s.wall_time.as_secs_f64() * 1e3).unwrap();
    writeln!(out, "peak_memory_estimate {}", s.peak_memory_estimate).unwrap();
    out
}

/// One parsed result line: sorted member labels and utility.
pub type ResultEntry = (Vec<String>, f64);

pub fn parse_result(text: &str, source_name: &str) -> Result<Vec<ResultEntry>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (items, value) = line
            .split_once("#FU:")
            .ok_or_else(|| FuimError::parse(source_name, line_no, "expected `items #FU: value`"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| FuimError::parse(source_name, line_no, format!("bad utility {:?}", value.trim())))?;
        let mut members: Vec<String> = items.trim().split(',').map(|m| m.trim().to_string()).collect();
        if members.iter().any(|m| m.is_empty() || !m.contains('.')) {
            return Err(FuimError::parse(
                source_name,
                line_no,
                "members must look like LABEL.Region",
            ));
        }
        members.sort();
        out.push((members, value));
    }
    Ok(out)
}

/// `Ok` iff both files list the same itemsets with utilities within `rel_tol`,
/// ignoring line and member order; otherwise the first difference.
pub fn diff_results(left: &[ResultEntry], right: &[ResultEntry], rel_tol: f64) -> std::result::Result<(), String> {
    let collect = |entries: &[ResultEntry], side: &str| -> std::result::Result<BTreeMap<Vec<String>, f64>, String> {
        let mut map = BTreeMap::new();
        for (k, v) in entries {
            if map.insert(k.clone(), *v).is_some() {
                return Err(format!("{side} lists {} twice", k.join(",")));
            }
        }
        Ok(map)
    };
    let l = collect(left, "left")?;
    let r = collect(right, "right")?;
    for (k, v) in &l {
        match r.get(k) {
            None => return Err(format!("only in left: {} #FU: {v}", k.join(","))),
            Some(w) if !utilities_match(*v, *w, rel_tol) => {
                return Err(format!("utility differs for {}: {v} vs {w}", k.join(",")))
            }
            Some(_) => {}
        }
    }
    if let Some((k, v)) = r.iter().find(|(k, _)| !l.contains_key(*k)) {
        return Err(format!("only in right: {} #FU: {v}", k.join(",")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::result::UTILITY_REL_TOL;

    #[test]
    fn parse_and_diff() {
        let a = "# fuim mine\n# gamma=60\nB.Middle,A.Low #FU: 78\nD.Middle #FU: 80\n";
        let b = "D.Middle #FU: 80\nA.Low,B.Middle #FU: 78\n";
        let pa = parse_result(a, "a").unwrap();
        let pb = parse_result(b, "b").unwrap();
        assert_eq!(pa[0].0, vec!["A.Low", "B.Middle"]);
        assert!(diff_results(&pa, &pa, UTILITY_REL_TOL).is_ok());
        assert!(diff_results(&pa, &pb, UTILITY_REL_TOL).is_ok());
        let c = parse_result("D.Middle #FU: 80.08\nA.Low,B.Middle #FU: 78\n", "c").unwrap();
        assert!(diff_results(&pa, &c, UTILITY_REL_TOL).unwrap_err().contains("D.Middle"));
        let d = parse_result("D.Middle #FU: 80\n", "d").unwrap();
        assert!(diff_results(&pa, &d, UTILITY_REL_TOL)
            .unwrap_err()
            .starts_with("only in left"));
        assert!(diff_results(&d, &pa, UTILITY_REL_TOL)
            .unwrap_err()
            .starts_with("only in right"));
    }

    #[test]
    fn malformed_result_lines() {
        assert!(matches!(
            parse_result("A.Low 78\n", "x"),
            Err(FuimError::Parse { line: 1, .. })
        ));
        assert!(parse_result("A #FU: 3\n", "x").is_err());
        assert!(parse_result("A.Low #FU: x\n", "x").is_err());
    }

    #[test]
    fn manifest_header_lines() {
        let m = RunManifest::new("mine").with("db", "sample.qdb").with("gamma", 60);
        assert_eq!(m.header(), "# fuim mine\n# db=sample.qdb\n# gamma=60\n");
    }
}
