//! Built-in consistency checks. Output is deterministic: every random input
//! comes from a fixed seed and no timings are printed.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hashreduce::ibdgraph::unique_elements;
use hashreduce::oracle::{self, SetOp};
use hashreduce::simulate::{simulate, SimParams};
use hashreduce::{hash_object, rehash, HashValue, MSet, MarkedKey, Marker, ValiditySet};

pub const HASH_VECTORS: &str = include_str!("../../core/testdata/hash_vectors.tsv");
pub const REHASH_VECTORS: &str = include_str!("../../core/testdata/rehash_vectors.tsv");

const SEED: u64 = 0x5e1f_7e57;

/// Parses `input<TAB>hash` lines, skipping blanks and `#` comments. Yields
/// the line number with each pair.
fn vector_lines(text: &str) -> impl Iterator<Item = (usize, Result<(&str, HashValue), String>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            let parsed = match l.split_once('\t') {
                None => Err("missing tab".to_string()),
                Some((a, b)) => b
                    .trim()
                    .parse::<HashValue>()
                    .map(|h| (a.trim(), h))
                    .map_err(|e| format!("bad hash: {e}")),
            };
            (i + 1, parsed)
        })
}

struct Report<'a, W: Write> {
    out: &'a mut W,
    failures: usize,
}

impl<W: Write> Report<'_, W> {
    fn check(&mut self, name: &str, problems: Vec<String>) -> io::Result<()> {
        if problems.is_empty() {
            writeln!(self.out, "ok\t{name}")
        } else {
            self.failures += 1;
            for p in &problems {
                writeln!(self.out, "FAIL\t{name}: {p}")?;
            }
            Ok(())
        }
    }
}

fn hash_vectors(text: &str) -> Vec<String> {
    let mut problems = Vec::new();
    let mut count = 0;
    for (line, parsed) in vector_lines(text) {
        count += 1;
        let checked = parsed.and_then(|(input, expected)| {
            let bytes = hex::decode(input).map_err(|e| format!("bad input: {e}"))?;
            Ok((input, hash_object(&bytes), expected))
        });
        match checked {
            Err(e) => problems.push(format!("line {line}: {e}")),
            Ok((input, got, expected)) => {
                if got != expected {
                    problems.push(format!(
                        "line {line}: input `{input}` hashes to {got}, expected {expected}"
                    ));
                }
            }
        }
    }
    if count == 0 {
        problems.push("no vectors".into());
    }
    problems
}

fn rehash_vectors(text: &str) -> Vec<String> {
    let mut problems = Vec::new();
    let mut count = 0;
    for (line, parsed) in vector_lines(text) {
        count += 1;
        let checked = parsed.and_then(|(input, expected)| {
            let h = input
                .parse::<HashValue>()
                .map_err(|e| format!("bad input: {e}"))?;
            Ok((h, expected))
        });
        match checked {
            Err(e) => problems.push(format!("line {line}: {e}")),
            Ok((h, expected)) => {
                let got = rehash(h);
                if got != expected {
                    problems.push(format!(
                        "line {line}: rehash({h}) = {got}, expected {expected}"
                    ));
                }
            }
        }
    }
    if count == 0 {
        problems.push("no vectors".into());
    }
    problems
}

fn random_hash(rng: &mut ChaCha8Rng) -> HashValue {
    HashValue::new(rng.random())
}

fn field_laws(rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut problems = Vec::new();
    for i in 0..1000 {
        let (a, b, c) = (random_hash(rng), random_hash(rng), random_hash(rng));
        let ok = (a + b) + c == a + (b + c)
            && a + b == b + a
            && a + HashValue::NULL == a
            && a + (-a) == HashValue::NULL
            && a + b + c == oracle::naive_sum([a, b, c])
            && -a == oracle::naive_negate(a);
        if !ok {
            problems.push(format!("triple {i}: ({a}, {b}, {c})"));
        }
    }
    problems
}

fn random_vset(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> ValiditySet {
    let n = rng.random_range(0..6) * 2;
    let mut points: Vec<i64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    points.sort_unstable();
    points.dedup();
    let pairs: Vec<(i64, i64)> = points.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    ValiditySet::from_intervals(pairs).expect("pairs are increasing")
}

fn interval_algebra(rng: &mut ChaCha8Rng) -> Vec<String> {
    let (lo, hi) = (0, 64);
    let mut problems = Vec::new();
    for i in 0..200 {
        let (a, b) = (random_vset(rng, lo, hi), random_vset(rng, lo, hi));
        let da = oracle::naive_membership(a.intervals(), lo, hi).unwrap();
        let db = oracle::naive_membership(b.intervals(), lo, hi).unwrap();
        for (op, got) in [
            (SetOp::Union, a.union(&b)),
            (SetOp::Intersection, a.intersection(&b)),
            (SetOp::Difference, a.difference(&b)),
        ] {
            let want = oracle::naive_set_op(&da, &db, op).unwrap();
            let have = oracle::naive_membership(got.intervals(), lo, hi).unwrap();
            if want != have {
                problems.push(format!("pair {i}: {op:?} of {a} and {b} gave {got}"));
            }
        }
    }
    problems
}

fn mset_reduction(rng: &mut ChaCha8Rng) -> Vec<String> {
    let (lo, hi) = (-8, 72);
    let mut problems = Vec::new();
    for i in 0..20 {
        let keys: Vec<MarkedKey> = (0..rng.random_range(1..30))
            .map(|_| MarkedKey::new(random_hash(rng), random_vset(rng, 0, 64)))
            .filter(|k| !k.vset.is_empty())
            .collect();
        let t: MSet = keys.iter().cloned().collect();
        if let Err(e) = t.audit() {
            problems.push(format!("m-set {i}: audit: {e}"));
        }
        let want = oracle::naive_reduce_window(&keys, lo, hi).unwrap();
        for m in want.markers() {
            let got = t.hash_at_marker(m);
            if got != *want.get(m) {
                problems.push(format!("m-set {i}: marker {m}: {got} vs {}", want.get(m)));
                break;
            }
        }
    }
    problems
}

fn graph_dedup() -> Vec<String> {
    let graphs = simulate(&SimParams {
        pop: 3,
        generations: 3,
        realizations: 30,
        recomb_rate: 1e-3,
        chrom_len: 1000,
        seed: SEED,
    })
    .expect("valid parameters");
    let summaries: Vec<_> = graphs.iter().map(|g| g.summarize()).collect();
    let got = unique_elements(&summaries).len();
    let want = oracle::naive_unique_graphs(&graphs, Marker::NEG_INF, Marker::POS_INF);
    if got == want {
        Vec::new()
    } else {
        vec![format!("{got} unique records, oracle counts {want}")]
    }
}

/// Runs every check, writing one line per check (and one per problem), and
/// returns the number of failed checks.
pub fn run<W: Write>(hash_text: &str, rehash_text: &str, out: &mut W) -> io::Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut r = Report { out, failures: 0 };
    r.check("hash vectors", hash_vectors(hash_text))?;
    r.check("rehash vectors", rehash_vectors(rehash_text))?;
    r.check("field laws", field_laws(&mut rng))?;
    r.check("interval algebra", interval_algebra(&mut rng))?;
    r.check("m-set reduction", mset_reduction(&mut rng))?;
    r.check("graph dedup", graph_dedup())?;
    let failures = r.failures;
    writeln!(
        r.out,
        "{}",
        if failures == 0 {
            "all checks passed".to_string()
        } else {
            format!("{failures} check(s) failed")
        }
    )?;
    Ok(failures)
}
