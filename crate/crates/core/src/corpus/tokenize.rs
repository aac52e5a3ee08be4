/// Splits raw text into lowercase word tokens.
///
/// Tokens are maximal runs of alphanumeric characters; an apostrophe is kept
/// only when it sits between two alphanumerics (`don't`). Whitespace-delimited
/// chunks that look like URLs are dropped entirely, as is all punctuation.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        if is_url(chunk) {
            continue;
        }
        let chars: Vec<char> = chunk
            .chars()
            .map(|c| if c == '\u{2019}' { '\'' } else { c })
            .collect();
        let mut current = String::new();
        for (i, &c) in chars.iter().enumerate() {
            if c.is_alphanumeric() {
                current.extend(c.to_lowercase().filter(|l| l.is_alphanumeric()));
            } else if c == '\''
                && !current.is_empty()
                && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
            {
                current.push('\'');
            } else if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        }
        if !current.is_empty() {
            tokens.push(current);
        }
    }
    tokens
}

fn is_url(chunk: &str) -> bool {
    let lower = chunk
        .trim_start_matches(|c: char| !c.is_alphanumeric())
        .to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}
