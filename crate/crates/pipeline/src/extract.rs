//! Pulling the RSL program out of a chatty model reply.

use rsl_core::Command;

fn starts_with_keyword(line: &str) -> bool {
    let word: String = line
        .trim_start()
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
        .collect();
    Command::from_keyword(&word).is_some()
}

fn fenced_blocks(text: &str) -> Option<Vec<String>> {
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in text.lines() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix("```") {
            // One-line block: ```forward 1;```
            if let Some(inner) = rest.strip_suffix("```").filter(|_| current.is_none() && rest.len() >= 3) {
                blocks.push(inner.trim().to_owned());
                continue;
            }
            match current.take() {
                Some(lines) => blocks.push(lines.join("\n")),
                None => current = Some(Vec::new()),
            }
        } else if let Some(lines) = current.as_mut() {
            lines.push(line);
        }
    }
    if let Some(lines) = current {
        blocks.push(lines.join("\n"));
    }
    (!blocks.is_empty()).then_some(blocks)
}

/// Fenced code blocks if there are any, else the lines that start with a
/// keyword, else the whole text.
pub fn extract_rsl(assistant_text: &str) -> String {
    if let Some(blocks) = fenced_blocks(assistant_text) {
        return blocks.join("\n");
    }
    let lines: Vec<&str> = assistant_text.lines().filter(|l| starts_with_keyword(l)).collect();
    if lines.is_empty() {
        assistant_text.to_owned()
    } else {
        lines.join("\n")
    }
}
