use sha2::{Digest, Sha256};

use crate::ambiguity::{Ambiguity, AmbiguityKind};
use crate::notebook::CodeCell;

/// Bumped whenever the wording below changes; part of every prompt hash so
/// cached answers to older wordings are never reused.
pub const TEMPLATE_VERSION: &str = "crabs-binary-v1";

pub const SYSTEM_MESSAGE: &str = "You analyze single cells of Python notebooks. \
Earlier cells have already run in order; later cells are unknown. \
Reply with exactly one word: yes or no.";

/// Zero-shot binary question about one cell. Only the cell named by the
/// ambiguity is included, never later cells.
pub fn build_prompt(cell: &CodeCell, ambiguity: &Ambiguity) -> String {
    let name = &ambiguity.name;
    let mut out = String::new();
    out.push_str("Here is a code cell from a Python notebook:\n\n```python\n");
    out.push_str(&cell.screened_text());
    out.push_str("\n```\n\n");
    if let Some(statements) = &ambiguity.alias_context {
        out.push_str(&format!(
            "Earlier cells ran these statements, so `{name}` may share objects with other variables:\n\n```python\n"
        ));
        for s in statements {
            out.push_str(s);
            out.push('\n');
        }
        out.push_str("```\n\n");
    }
    match ambiguity.kind {
        AmbiguityKind::Input => out.push_str(&format!(
            "Is `{name}` used as an input by this cell, that is, does the cell read a value of \
             `{name}` that was set before the cell started running?\n"
        )),
        AmbiguityKind::OutputCandidate => out.push_str(&format!(
            "Could this cell define or modify `{name}`, making it available to later cells? \
             Count in-place changes made through method calls, function arguments or other \
             variables that refer to the same object.\n"
        )),
    }
    out.push_str("Answer exactly `yes` or `no`.");
    out
}

/// Hex SHA-256 of the template version and the prompt text.
pub fn prompt_hash(prompt: &str) -> String {
    let mut h = Sha256::new();
    h.update(TEMPLATE_VERSION.as_bytes());
    h.update(b"\n");
    h.update(prompt.as_bytes());
    hex::encode(h.finalize())
}
