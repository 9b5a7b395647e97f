// Expands a sentence pair into next-word prediction tasks.
//
// `cargo run --example task_expansion`

use autosimp::corpus::SentencePair;
use autosimp::evaluation::generate_tasks;

pub fn run_example() -> anyhow::Result<()> {
    let pair = SentencePair::new(
        "insulin",
        "Insulin",
        "Lowered glucose levels result both in the reduced release of insulin from the beta cells \
         and in the reverse conversion of glycogen to glucose when glucose levels fall.",
        "This insulin tells the cells to take up glucose from the blood.",
    )
    .map_err(anyhow::Error::msg)?;

    let tasks = generate_tasks(&pair);
    for t in &tasks {
        println!(
            "{:>2}  {:<60} -> {}",
            t.position,
            t.prefix.join(" "),
            t.gold
        );
    }
    anyhow::ensure!(tasks.len() == pair.simple.len() - 1);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
