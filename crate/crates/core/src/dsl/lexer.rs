use super::{ParseDiagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Word(String),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Slash,
    /// `<-`
    From,
    /// `->`
    To,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(_) => "string".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Slash => "`/`".into(),
            Tok::From => "`<-`".into(),
            Tok::To => "`->`".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-')
}

/// Splits normalized source into tokens. Columns count characters.
pub(crate) fn lex(src: &str) -> (Vec<Token>, Vec<ParseDiagnostic>) {
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    for (line_idx, line) in src.split('\n').enumerate() {
        let line_no = line_idx as u32 + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        let span = |start: usize, end: usize| SourceSpan::new(line_no, start as u32 + 1, (end - start).max(1) as u32);
        while i < chars.len() {
            let c = chars[i];
            let start = i;
            let single = match c {
                '{' => Some(Tok::LBrace),
                '}' => Some(Tok::RBrace),
                '[' => Some(Tok::LBracket),
                ']' => Some(Tok::RBracket),
                ',' => Some(Tok::Comma),
                '/' => Some(Tok::Slash),
                _ => None,
            };
            if let Some(tok) = single {
                tokens.push(Token {
                    tok,
                    span: span(i, i + 1),
                });
                i += 1;
                continue;
            }
            match c {
                c if c.is_whitespace() => i += 1,
                '#' => break,
                '<' if chars.get(i + 1) == Some(&'-') => {
                    tokens.push(Token {
                        tok: Tok::From,
                        span: span(i, i + 2),
                    });
                    i += 2;
                }
                '-' if chars.get(i + 1) == Some(&'>') => {
                    tokens.push(Token {
                        tok: Tok::To,
                        span: span(i, i + 2),
                    });
                    i += 2;
                }
                '"' => {
                    i += 1;
                    let mut value = String::new();
                    let mut closed = false;
                    while i < chars.len() {
                        match chars[i] {
                            '"' => {
                                closed = true;
                                i += 1;
                                break;
                            }
                            '\\' => {
                                let escaped = match chars.get(i + 1) {
                                    Some('\\') => Some('\\'),
                                    Some('"') => Some('"'),
                                    Some('n') => Some('\n'),
                                    Some('t') => Some('\t'),
                                    Some('r') => Some('\r'),
                                    _ => None,
                                };
                                match escaped {
                                    Some(e) => value.push(e),
                                    None => diags.push(ParseDiagnostic::error(
                                        "syntax",
                                        span(i, (i + 2).min(chars.len())),
                                        "unknown escape sequence",
                                    )),
                                }
                                i += 2;
                            }
                            ch => {
                                value.push(ch);
                                i += 1;
                            }
                        }
                    }
                    let end = i.min(chars.len());
                    if !closed {
                        diags.push(ParseDiagnostic::error(
                            "syntax",
                            span(start, end),
                            "unterminated string",
                        ));
                    }
                    tokens.push(Token {
                        tok: Tok::Str(value),
                        span: span(start, end),
                    });
                }
                c if is_word_char(c) => {
                    while i < chars.len()
                        && is_word_char(chars[i])
                        && !(chars[i] == '-' && chars.get(i + 1) == Some(&'>'))
                    {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    tokens.push(Token {
                        tok: Tok::Word(word),
                        span: span(start, i),
                    });
                }
                other => {
                    diags.push(ParseDiagnostic::error(
                        "syntax",
                        span(i, i + 1),
                        format!("unexpected character `{other}`"),
                    ));
                    i += 1;
                }
            }
        }
    }
    (tokens, diags)
}
