//! Canonical tokenizer shared by every component.
//!
//! Text is lowercased, the marks `. , ; : ! ? ( ) " '` become tokens of
//! their own, and everything else is split on whitespace.

const PUNCTUATION: [char; 10] = ['.', ',', ';', ':', '!', '?', '(', ')', '"', '\''];

pub fn is_punctuation(c: char) -> bool {
    PUNCTUATION.contains(&c)
}

pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_whitespace() {
            flush(&mut current, &mut tokens);
        } else if is_punctuation(c) {
            flush(&mut current, &mut tokens);
            tokens.push(c.to_string());
        } else {
            current.extend(c.to_lowercase());
        }
    }
    flush(&mut current, &mut tokens);
    tokens
}

fn flush(current: &mut String, tokens: &mut Vec<String>) {
    if !current.is_empty() {
        tokens.push(std::mem::take(current));
    }
}
