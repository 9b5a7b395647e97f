// Fuzzy dictionary matching and medical-pair extraction.
//
// `cargo run --example corpus_filter`

use std::path::Path;

use autosimp::corpus::{
    filter_medical, read_pairs, string_similarity, tokenize, Dictionary, DEFAULT_MIN_MATCHES,
    DEFAULT_THRESHOLD,
};

pub fn run_example() -> anyhow::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");

    for (a, b) in [
        ("diabetess", "diabetes"),
        ("glucoses", "glucose"),
        ("insulin", "oncology"),
    ] {
        println!("sim({a}, {b}) = {:.3}", string_similarity(a, b));
    }

    let dict = Dictionary::from_reader(std::io::BufReader::new(std::fs::File::open(
        data.join("filter_terms.txt"),
    )?))?;
    let sentence = tokenize("In diabetess the pancreas makes less insulin so glucose stays high");
    let matches = dict.find_matches(&sentence, DEFAULT_THRESHOLD);
    for (start, len) in &matches {
        println!("match: {}", sentence[*start..start + len].join(" "));
    }

    let pairs = read_pairs(&data.join("filter_cases.tsv"))?;
    let kept = filter_medical(&pairs, &dict, DEFAULT_THRESHOLD, DEFAULT_MIN_MATCHES);
    println!("kept {} of {}:", kept.len(), pairs.len());
    for p in &kept {
        println!("  {}", p.id);
    }
    anyhow::ensure!(kept.len() == 3, "expected three conforming pairs");
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
