//! Test-name filters: `POS[-NEG]`, each side a `:`-separated list of globs
//! over the `Suite.Test` display name. Globs know `*` (any run, possibly
//! empty) and `?` (one character); everything else is literal.

use crate::xunit::TestId;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FilterSpec {
    /// Empty means every test is selected.
    pub positive: Vec<String>,
    pub negative: Vec<String>,
}

impl FilterSpec {
    pub fn match_all() -> Self {
        Self::default()
    }

    /// Every string parses; empty segments are dropped.
    pub fn parse(text: &str) -> Self {
        let (pos, neg) = match text.split_once('-') {
            Some((pos, neg)) => (pos, neg),
            None => (text, ""),
        };
        let patterns = |side: &str| {
            side.split(':')
                .filter(|p| !p.is_empty())
                .map(str::to_owned)
                .collect::<Vec<_>>()
        };
        FilterSpec {
            positive: patterns(pos),
            negative: patterns(neg),
        }
    }

    pub fn matches(&self, id: &TestId) -> bool {
        self.matches_name(&id.display_name())
    }

    pub fn matches_name(&self, name: &str) -> bool {
        let selected =
            self.positive.is_empty() || self.positive.iter().any(|p| glob_match(p, name));
        selected && !self.negative.iter().any(|p| glob_match(p, name))
    }
}

pub fn parse_filter(text: Option<&str>) -> FilterSpec {
    text.map(FilterSpec::parse).unwrap_or_default()
}

pub fn filter_matches(spec: &FilterSpec, id: &TestId) -> bool {
    spec.matches(id)
}

/// Full-string glob match.
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let pat: Vec<char> = pattern.chars().collect();
    let txt: Vec<char> = text.chars().collect();
    let (mut p, mut t) = (0, 0);
    // position of the last `*` and the text index it is currently absorbing up to
    let mut star: Option<(usize, usize)> = None;
    while t < txt.len() {
        match pat.get(p) {
            Some('*') => {
                star = Some((p, t));
                p += 1;
            }
            Some(&c) if c == '?' || c == txt[t] => {
                p += 1;
                t += 1;
            }
            _ => match star {
                Some((sp, st)) => {
                    p = sp + 1;
                    t = st + 1;
                    star = Some((sp, st + 1));
                }
                None => return false,
            },
        }
    }
    pat[p..].iter().all(|&c| c == '*')
}
