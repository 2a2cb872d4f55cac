use super::diagnostic::{codes, ParseDiagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Word(String),
    Str(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

impl Token {
    pub fn word(&self) -> Option<&str> {
        match &self.kind {
            TokenKind::Word(w) => Some(w),
            TokenKind::Str(_) => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            TokenKind::Word(w) => format!("`{w}`"),
            TokenKind::Str(_) => "a quoted string".to_string(),
        }
    }
}

/// One non-blank, non-comment source line.
#[derive(Debug, Clone)]
pub struct Line {
    pub number: usize,
    pub tokens: Vec<Token>,
}

impl Line {
    pub fn span(&self) -> SourceSpan {
        let first = self.tokens.first().expect("lines are non-empty").span;
        let last = self.tokens.last().expect("lines are non-empty").span;
        first.to(last)
    }
}

/// Splits source into token lines. Words are runs of non-space characters;
/// strings are double-quoted with `\"` and `\\` escapes; `#` at the start of
/// a token comments out the rest of the line.
pub fn lex(source: &str) -> (Vec<Line>, Vec<ParseDiagnostic>) {
    let mut lines = Vec::new();
    let mut diagnostics = Vec::new();
    for (idx, raw) in source.split('\n').enumerate() {
        let number = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let chars: Vec<char> = raw.chars().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        'line: while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '#' {
                break;
            }
            let start = i;
            if c == '"' {
                let mut value = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => {
                            diagnostics.push(ParseDiagnostic::error(
                                SourceSpan::new(number, start + 1, chars.len() - start),
                                codes::UNTERMINATED_STRING,
                                "string is not terminated on this line",
                            ));
                            break 'line;
                        }
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => match chars.get(i + 1) {
                            Some(e @ ('"' | '\\')) => {
                                value.push(*e);
                                i += 2;
                            }
                            _ => {
                                diagnostics.push(ParseDiagnostic::error(
                                    SourceSpan::new(number, i + 1, if i + 1 < chars.len() { 2 } else { 1 }),
                                    codes::BAD_ESCAPE,
                                    "only \\\" and \\\\ escapes are allowed",
                                ));
                                break 'line;
                            }
                        },
                        Some(ch) => {
                            value.push(*ch);
                            i += 1;
                        }
                    }
                }
                tokens.push(Token { kind: TokenKind::Str(value), span: SourceSpan::new(number, start + 1, i - start) });
            } else {
                while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '"' {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                tokens.push(Token { kind: TokenKind::Word(word), span: SourceSpan::new(number, start + 1, i - start) });
            }
        }
        if !tokens.is_empty() {
            lines.push(Line { number, tokens });
        }
    }
    (lines, diagnostics)
}

/// Quotes `s` for the case language.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_columns() {
        let (lines, diags) = lex("# header comment\n  link L1 supports A -> B  # trailing\n\nwarrant W \"a \\\"q\\\" b\"\n");
        assert!(diags.is_empty());
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].number, 2);
        assert_eq!(lines[0].tokens[0].span, SourceSpan::new(2, 3, 4));
        assert_eq!(lines[0].tokens.len(), 6);
        assert_eq!(lines[1].tokens[2].kind, TokenKind::Str("a \"q\" b".into()));
        assert_eq!(lines[1].tokens[2].span.column, 11);
    }

    #[test]
    fn string_errors() {
        let (_, d) = lex("warrant W \"open");
        assert_eq!(d[0].code, codes::UNTERMINATED_STRING);
        assert_eq!(d[0].span, SourceSpan::new(1, 11, 5));
        let (_, d) = lex("warrant W \"bad \\n\"");
        assert_eq!(d[0].code, codes::BAD_ESCAPE);
        assert_eq!(d[0].span.column, 16);
    }

    #[test]
    fn quote_escapes() {
        assert_eq!(quote(r#"a"b\c"#), r#""a\"b\\c""#);
    }
}
