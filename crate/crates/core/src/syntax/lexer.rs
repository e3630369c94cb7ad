//! Event tokenizer.
//!
//! Keywords come in a symbolic and an English spelling (`&` / `and`,
//! `>=` / `is greater or equal to`). Multi-word keywords match across any
//! run of whitespace and win over an identifier that spells their first word.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::ast::Span;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    True,
    False,
    Or,
    And,
    Not,
    Implies,
    Plus,
    Minus,
    Times,
    Div,
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
    LPar,
    RPar,
    Of,
    Comma,
    /// `bit` (textual bit extraction)
    Bit,
    /// `extractBit`
    ExtractBit,
    AbsFn,
    AbsText,
    MinFn,
    MinText,
    MaxFn,
    MaxText,
    /// `last`, unary or binary depending on the argument list
    Last,
    /// `the previous value of`
    PreviousValueOf,
    /// `the value of`
    ValueOf,
    /// `steps ago`
    StepsAgo,
    Ident(String),
    Int(i64),
    Float(f64),
}

impl Tok {
    pub fn describe(&self) -> &'static str {
        match self {
            Tok::True => "'TRUE'",
            Tok::False => "'FALSE'",
            Tok::Or => "'or'",
            Tok::And => "'and'",
            Tok::Not => "'not'",
            Tok::Implies => "'implies'",
            Tok::Plus => "'plus'",
            Tok::Minus => "'minus'",
            Tok::Times => "'multiplied with'",
            Tok::Div => "'divided by'",
            Tok::Gt => "'is greater than'",
            Tok::Ge => "'is greater or equal to'",
            Tok::Lt => "'is less than'",
            Tok::Le => "'is less or equal to'",
            Tok::Eq => "'is equal to'",
            Tok::LPar => "'('",
            Tok::RPar => "')'",
            Tok::Of => "'of'",
            Tok::Comma => "','",
            Tok::Bit => "'bit'",
            Tok::ExtractBit => "'extractBit'",
            Tok::AbsFn => "'abs'",
            Tok::AbsText => "'the absolute value of'",
            Tok::MinFn => "'min'",
            Tok::MinText => "'the minimum of'",
            Tok::MaxFn => "'max'",
            Tok::MaxText => "'the maximum of'",
            Tok::Last => "'last'",
            Tok::PreviousValueOf => "'the previous value of'",
            Tok::ValueOf => "'the value of'",
            Tok::StepsAgo => "'steps ago'",
            Tok::Ident(_) => "identifier",
            Tok::Int(_) => "integer",
            Tok::Float(_) => "number",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub span: Span,
    pub message: String,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

const PHRASES: &[(&[&str], Tok)] = &[
    (&["TRUE"], Tok::True),
    (&["True"], Tok::True),
    (&["true"], Tok::True),
    (&["FALSE"], Tok::False),
    (&["False"], Tok::False),
    (&["false"], Tok::False),
    (&["or"], Tok::Or),
    (&["and"], Tok::And),
    (&["not"], Tok::Not),
    (&["implies"], Tok::Implies),
    (&["plus"], Tok::Plus),
    (&["minus"], Tok::Minus),
    (&["multiplied", "with"], Tok::Times),
    (&["divided", "by"], Tok::Div),
    (&["is", "greater", "than"], Tok::Gt),
    (&["is", "greater", "or", "equal", "to"], Tok::Ge),
    (&["is", "less", "than"], Tok::Lt),
    (&["is", "less", "or", "equal", "to"], Tok::Le),
    (&["is", "equal", "to"], Tok::Eq),
    (&["left", "parenthesis"], Tok::LPar),
    (&["right", "parenthesis"], Tok::RPar),
    (&["of"], Tok::Of),
    (&["bit"], Tok::Bit),
    (&["extractBit"], Tok::ExtractBit),
    (&["abs"], Tok::AbsFn),
    (&["the", "absolute", "value", "of"], Tok::AbsText),
    (&["min"], Tok::MinFn),
    (&["the", "minimum", "of"], Tok::MinText),
    (&["max"], Tok::MaxFn),
    (&["the", "maximum", "of"], Tok::MaxText),
    (&["last"], Tok::Last),
    (&["the", "previous", "value", "of"], Tok::PreviousValueOf),
    (&["the", "value", "of"], Tok::ValueOf),
    (&["steps", "ago"], Tok::StepsAgo),
];

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic()
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

fn is_ws(c: u8) -> bool {
    matches!(c, b' ' | b'\t' | b'\r' | b'\n')
}

/// True iff `name` lexes as a single identifier token (lexical rule plus not
/// a reserved single-word keyword).
pub fn is_identifier(name: &str) -> bool {
    let b = name.as_bytes();
    if b.is_empty() || !is_ident_start(b[0]) || !b.iter().all(|&c| is_ident_char(c)) {
        return false;
    }
    !PHRASES.iter().any(|(words, _)| words.len() == 1 && words[0] == name)
}

fn word_at(src: &[u8], pos: usize) -> usize {
    let mut end = pos;
    while end < src.len() && is_ident_char(src[end]) {
        end += 1;
    }
    end
}

/// Longest keyword phrase starting at `pos`, returning its end offset.
fn match_phrase(src: &[u8], pos: usize) -> Option<(Tok, usize)> {
    let first_end = word_at(src, pos);
    let first = &src[pos..first_end];
    let mut best: Option<(usize, Tok, usize)> = None;
    'phrases: for (words, tok) in PHRASES {
        if words[0].as_bytes() != first {
            continue;
        }
        let mut end = first_end;
        for w in &words[1..] {
            let mut p = end;
            while p < src.len() && is_ws(src[p]) {
                p += 1;
            }
            if p == end || p >= src.len() || !is_ident_start(src[p]) {
                continue 'phrases;
            }
            let wend = word_at(src, p);
            if &src[p..wend] != w.as_bytes() {
                continue 'phrases;
            }
            end = wend;
        }
        if best.as_ref().is_none_or(|(n, _, _)| words.len() > *n) {
            best = Some((words.len(), tok.clone(), end));
        }
    }
    best.map(|(_, t, e)| (t, e))
}

/// Tokenizes `src`; spans are shifted by `base`.
pub fn tokenize(src: &str, base: usize) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if is_ws(c) {
            i += 1;
            continue;
        }
        let start = i;
        let tok = if is_ident_start(c) {
            match match_phrase(bytes, i) {
                Some((t, end)) => {
                    i = end;
                    t
                }
                None => {
                    i = word_at(bytes, i);
                    Tok::Ident(String::from(&src[start..i]))
                }
            }
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let is_float = i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit();
            if is_float {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                match src[start..i].parse::<f64>() {
                    Ok(x) if x.is_finite() => Tok::Float(x),
                    _ => {
                        return Err(LexError {
                            span: Span::new(base + start, base + i),
                            message: alloc::format!("floating-point literal '{}' out of range", &src[start..i]),
                        })
                    }
                }
            } else {
                match src[start..i].parse::<i64>() {
                    Ok(v) => Tok::Int(v),
                    Err(_) => {
                        return Err(LexError {
                            span: Span::new(base + start, base + i),
                            message: alloc::format!("integer literal '{}' out of range", &src[start..i]),
                        })
                    }
                }
            }
        } else {
            let two = bytes.get(i + 1).copied();
            let (t, len) = match (c, two) {
                (b'=', Some(b'>')) => (Tok::Implies, 2),
                (b'>', Some(b'=')) => (Tok::Ge, 2),
                (b'<', Some(b'=')) => (Tok::Le, 2),
                (b'>', _) => (Tok::Gt, 1),
                (b'<', _) => (Tok::Lt, 1),
                (b'=', _) => (Tok::Eq, 1),
                (b'&', _) => (Tok::And, 1),
                (b'|', _) => (Tok::Or, 1),
                (b'!', _) => (Tok::Not, 1),
                (b'+', _) => (Tok::Plus, 1),
                (b'-', _) => (Tok::Minus, 1),
                (b'*', _) => (Tok::Times, 1),
                (b'/', _) => (Tok::Div, 1),
                (b'(', _) => (Tok::LPar, 1),
                (b')', _) => (Tok::RPar, 1),
                (b',', _) => (Tok::Comma, 1),
                _ => {
                    let ch = src[i..].chars().next().unwrap_or('?');
                    return Err(LexError {
                        span: Span::new(base + i, base + i + ch.len_utf8()),
                        message: alloc::format!("unexpected character '{}'", ch.escape_debug()),
                    });
                }
            };
            i += len;
            t
        };
        out.push(Token { tok, span: Span::new(base + start, base + i) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, 0).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn phrases_and_symbols() {
        assert_eq!(
            toks("a is greater or equal to 3.5 => not b"),
            vec![Tok::Ident("a".into()), Tok::Ge, Tok::Float(3.5), Tok::Implies, Tok::Not, Tok::Ident("b".into())]
        );
        assert_eq!(
            toks("the value of x 4 steps ago"),
            vec![Tok::ValueOf, Tok::Ident("x".into()), Tok::Int(4), Tok::StepsAgo]
        );
        assert_eq!(toks("is  equal\nto"), vec![Tok::Eq]);
    }

    #[test]
    fn identifiers_shadow_partial_phrases() {
        assert_eq!(toks("the"), vec![Tok::Ident("the".into())]);
        assert_eq!(toks("andy"), vec![Tok::Ident("andy".into())]);
        assert_eq!(toks("bit_count"), vec![Tok::Ident("bit_count".into())]);
        assert_eq!(toks("is less"), vec![Tok::Ident("is".into()), Tok::Ident("less".into())]);
    }

    #[test]
    fn lexical_errors_are_located() {
        let e = tokenize("a # b", 10).unwrap_err();
        assert_eq!((e.span.start, e.span.end), (12, 13));
        assert!(tokenize("99999999999999999999", 0).is_err());
    }

    #[test]
    fn identifier_rule() {
        assert!(is_identifier("signal_A"));
        assert!(!is_identifier("_x"));
        assert!(!is_identifier("9x"));
        assert!(!is_identifier("true"));
        assert!(!is_identifier("last"));
        assert!(is_identifier("the"));
    }
}
