/// Reads a yes/no answer from the first word of a response, ignoring case,
/// punctuation and quoting. `None` when the first word is neither.
pub fn parse_verdict(response: &str) -> Option<bool> {
    let first = response
        .split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .find(|w| !w.is_empty())?;
    match first.to_ascii_lowercase().as_str() {
        "yes" => Some(true),
        "no" => Some(false),
        _ => None,
    }
}
