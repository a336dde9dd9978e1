//! Collection-level deduplication: summarize every graph, then keep one
//! record per distinct configuration.

use std::fmt::Write as _;
use std::time::Instant;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::ibdgraph::{unique_elements, GraphSummary, IbdGraph, UniqueGraphRecord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DedupRecord {
    pub hash: String,
    pub graph_id: String,
    pub graph_index: usize,
    pub marker: String,
}

impl DedupRecord {
    fn new(r: &UniqueGraphRecord, summaries: &[GraphSummary]) -> Self {
        DedupRecord {
            hash: r.hash.to_hex(),
            graph_id: summaries[r.graph_index].graph_id.clone(),
            graph_index: r.graph_index,
            marker: r.marker.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DedupReport {
    pub graphs: usize,
    pub total_configurations: u64,
    pub unique_graphs: u64,
    #[serde(serialize_with = "ratio_string")]
    pub speedup: Ratio<u64>,
    pub elapsed_seconds: f64,
    pub records: Vec<DedupRecord>,
}

fn ratio_string<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl DedupReport {
    pub fn speedup_f64(&self) -> f64 {
        *self.speedup.numer() as f64 / *self.speedup.denom() as f64
    }

    /// `#`-prefixed header lines, then one `hash<TAB>graph-id<TAB>marker`
    /// line per record.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# graphs\t{}", self.graphs);
        let _ = writeln!(out, "# total_configurations\t{}", self.total_configurations);
        let _ = writeln!(out, "# unique_graphs\t{}", self.unique_graphs);
        let _ = writeln!(
            out,
            "# speedup\t{} ({:.3})",
            self.speedup,
            self.speedup_f64()
        );
        let _ = writeln!(out, "# elapsed_seconds\t{:.6}", self.elapsed_seconds);
        for r in &self.records {
            let _ = writeln!(out, "{}\t{}\t{}", r.hash, r.graph_id, r.marker);
        }
        out
    }
}

/// Summarizes every graph on a pool of `threads` workers (0 picks the
/// default), in input order.
pub fn summarize_all(graphs: &[IbdGraph], threads: usize) -> Vec<GraphSummary> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| graphs.par_iter().map(IbdGraph::summarize).collect())
}

pub fn dedup(graphs: &[IbdGraph], threads: usize) -> DedupReport {
    let start = Instant::now();
    let summaries = summarize_all(graphs, threads);
    let total: u64 = summaries.iter().map(|s| s.configurations() as u64).sum();
    let records = unique_elements(&summaries);
    let unique = records.len() as u64;
    let speedup = if unique == 0 {
        Ratio::from_integer(1)
    } else {
        Ratio::new(total, unique)
    };
    let records = records
        .iter()
        .map(|r| DedupRecord::new(r, &summaries))
        .collect();
    DedupReport {
        graphs: graphs.len(),
        total_configurations: total,
        unique_graphs: unique,
        speedup,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphfile;

    fn two_graphs() -> Vec<IbdGraph> {
        graphfile::parse(
            "graph a\nnode 1\nedge X -inf inf\nedge Y 0 10\n\
             graph b\nnode 1\nedge X -inf inf\n",
        )
        .unwrap()
        .graphs
    }

    #[test]
    fn report_arithmetic() {
        let r = dedup(&two_graphs(), 2);
        // a: {X} on (-inf,0), {X,Y} on [0,10), {X} on [10,inf); b: {X}
        assert_eq!(r.total_configurations, 4);
        assert_eq!(r.unique_graphs, 2);
        assert_eq!(r.speedup, Ratio::new(2, 1));
        assert_eq!(
            r.speedup * Ratio::from_integer(r.unique_graphs),
            Ratio::from_integer(r.total_configurations)
        );
        assert_eq!(r.records[0].graph_id, "a");
        assert_eq!(r.records[0].marker, "-inf");
        assert_eq!(r.records[1].marker, "0");
    }

    #[test]
    fn empty_collection() {
        let r = dedup(&[], 1);
        assert_eq!((r.total_configurations, r.unique_graphs), (0, 0));
        assert_eq!(r.speedup, Ratio::from_integer(1));
    }

    #[test]
    fn tsv_layout() {
        let r = dedup(&two_graphs(), 1);
        let tsv = r.to_tsv();
        let body: Vec<&str> = tsv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body.len(), 2);
        let fields: Vec<&str> = body[1].split('\t').collect();
        assert_eq!(fields.len(), 3);
        assert_eq!(fields[0].len(), 32);
        assert_eq!(fields[1..], ["a", "0"]);
        assert!(tsv.contains("# speedup\t2 (2.000)"));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let gs = two_graphs();
        let (a, b) = (dedup(&gs, 1), dedup(&gs, 4));
        assert_eq!(a.records, b.records);
    }
}
