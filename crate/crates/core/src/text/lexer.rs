use super::{Span, TextError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// Optionally signed decimal integer, kept as written.
    Int(String),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Slash,
    Le,
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(s) => format!("number {s}"),
            Tok::Str(_) => "string literal".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

/// Splits input into tokens. Line breaks inside brackets are ordinary
/// whitespace, so an axiom may span lines while its parentheses are open.
pub(crate) fn lex(src: &str) -> Result<Vec<(Tok, Span)>, TextError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);
    let mut depth: i64 = 0;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        match c {
            '\n' => {
                bump!();
                if depth <= 0 {
                    out.push((Tok::Newline, span));
                }
            }
            c if c.is_whitespace() => {
                bump!();
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump!();
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), span));
            }
            c if c.is_ascii_digit() || c == '-' => {
                let mut s = String::new();
                if c == '-' {
                    s.push('-');
                    bump!();
                }
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                if s == "-" {
                    return Err(TextError::new(span, "`-` must be followed by digits"));
                }
                out.push((Tok::Int(s), span));
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    let here = Span { line, col };
                    match bump!() {
                        None => return Err(TextError::new(span, "unterminated string literal")),
                        Some('"') => break,
                        Some('\\') => match bump!() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some('u') => {
                                if bump!() != Some('{') {
                                    return Err(TextError::new(here, "expected `{` after `\\u`"));
                                }
                                let mut hex = String::new();
                                loop {
                                    match bump!() {
                                        Some('}') => break,
                                        Some(h) if h.is_ascii_hexdigit() && hex.len() < 6 => {
                                            hex.push(h)
                                        }
                                        _ => {
                                            return Err(TextError::new(
                                                here,
                                                "malformed `\\u{…}` escape",
                                            ))
                                        }
                                    }
                                }
                                let ch = u32::from_str_radix(&hex, 16)
                                    .ok()
                                    .and_then(char::from_u32)
                                    .ok_or_else(|| {
                                        TextError::new(here, "escape is not a Unicode scalar value")
                                    })?;
                                s.push(ch);
                            }
                            _ => return Err(TextError::new(here, "unknown escape sequence")),
                        },
                        Some(ch) => s.push(ch),
                    }
                }
                out.push((Tok::Str(s), span));
            }
            '<' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    out.push((Tok::Le, span));
                } else {
                    return Err(TextError::new(span, "expected `<=`"));
                }
            }
            _ => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '/' => Tok::Slash,
                    other => {
                        return Err(TextError::new(
                            span,
                            format!("unexpected character {other:?}"),
                        ))
                    }
                };
                match tok {
                    Tok::LParen | Tok::LBrace | Tok::LBracket => depth += 1,
                    Tok::RParen | Tok::RBrace | Tok::RBracket => depth -= 1,
                    _ => {}
                }
                bump!();
                out.push((tok, span));
            }
        }
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}
