use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{CorpusError, SentencePair};

/// Parses the tab-separated corpus format: `id \t title \t difficult \t simple`.
/// Blank lines and lines starting with `#` are ignored.
pub fn read_pairs_from<R: BufRead>(reader: R) -> Result<Vec<SentencePair>, CorpusError> {
    let mut pairs = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(CorpusError::Malformed {
                line: n + 1,
                reason: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let pair =
            SentencePair::new(fields[0], fields[1], fields[2], fields[3]).map_err(|reason| {
                CorpusError::Malformed {
                    line: n + 1,
                    reason,
                }
            })?;
        pairs.push(pair);
    }
    Ok(pairs)
}

pub fn read_pairs(path: &Path) -> Result<Vec<SentencePair>, CorpusError> {
    read_pairs_from(BufReader::new(File::open(path)?))
}

pub fn write_pairs_to<W: Write>(mut out: W, pairs: &[SentencePair]) -> std::io::Result<()> {
    for p in pairs {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            p.id, p.raw.title, p.raw.difficult, p.raw.simple
        )?;
    }
    out.flush()
}

pub fn write_pairs(path: &Path, pairs: &[SentencePair]) -> std::io::Result<()> {
    write_pairs_to(BufWriter::new(File::create(path)?), pairs)
}

/// One pair id per line.
pub fn read_exclusions(path: &Path) -> Result<HashSet<String>, CorpusError> {
    let mut ids = HashSet::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        let id = line.trim();
        if !id.is_empty() && !id.starts_with('#') {
            ids.insert(id.to_string());
        }
    }
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_skips_comments() {
        let text = "# header\n\np1\tInsulin\tHard one.\tEasy one.\n";
        let pairs = read_pairs_from(text.as_bytes()).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].simple, vec!["easy", "one", "."]);
        let mut buf = Vec::new();
        write_pairs_to(&mut buf, &pairs).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "p1\tInsulin\tHard one.\tEasy one.\n"
        );
    }

    #[test]
    fn reports_bad_lines() {
        let err = read_pairs_from("a\tb\tc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CorpusError::Malformed { line: 1, .. }));
        let err = read_pairs_from("#\na\tb\t\td\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CorpusError::Malformed { line: 2, .. }));
    }
}
