use crate::diag::{Diagnostic, FileId, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Dot,
    DotDot,
    Arrow,
    Slash,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    pub fn text(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::Arrow => "->",
            Tok::Slash => "/",
            Tok::Assign => "=",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub const KEYWORDS: &[&str] = &[
    "enum", "component", "port", "in", "out", "instance", "connect", "automaton", "var", "state",
    "initial", "true", "false", "Boolean", "Int", "and", "or", "not",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Tokenizes the whole input. Unknown characters are reported and skipped.
pub fn lex(text: &str, file: FileId) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut lexer = Lexer { chars: text.char_indices().peekable(), text, file, line: 1, col: 1 };
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let mut last = Span::new(file, 1, 1);
    loop {
        lexer.skip_trivia(&mut diags);
        let span = lexer.span();
        let Some(c) = lexer.bump() else { break };
        last = span;
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            '/' => Tok::Slash,
            '+' => Tok::Plus,
            '.' if lexer.eat('.') => Tok::DotDot,
            '.' => Tok::Dot,
            '-' if lexer.eat('>') => Tok::Arrow,
            '-' => Tok::Minus,
            '=' if lexer.eat('=') => Tok::EqEq,
            '=' => Tok::Assign,
            '!' if lexer.eat('=') => Tok::NotEq,
            '<' if lexer.eat('=') => Tok::Le,
            '<' => Tok::Lt,
            '>' if lexer.eat('=') => Tok::Ge,
            '>' => Tok::Gt,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::from(c);
                while let Some(&(_, n)) = lexer.chars.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' {
                        s.push(n);
                        lexer.bump();
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            c if c.is_ascii_digit() => {
                let mut s = String::from(c);
                while let Some(&(_, n)) = lexer.chars.peek() {
                    if n.is_ascii_digit() {
                        s.push(n);
                        lexer.bump();
                    } else {
                        break;
                    }
                }
                match s.parse::<i64>() {
                    Ok(v) => Tok::Int(v),
                    Err(_) => {
                        diags.push(Diagnostic::error(
                            "P003",
                            span,
                            format!("integer literal `{s}` is out of range"),
                        ));
                        Tok::Int(0)
                    }
                }
            }
            other => {
                diags.push(Diagnostic::error("P001", span, format!("unknown character `{other}`")));
                continue;
            }
        };
        tokens.push(Token { tok, span });
    }
    // EOF is reported at the last token so diagnostics stay inside the text.
    let eof_span = if tokens.is_empty() && !text.is_empty() { lexer.last_char_span(last) } else { last };
    tokens.push(Token { tok: Tok::Eof, span: eof_span });
    (tokens, diags)
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
    file: FileId,
    line: u32,
    col: u32,
}

impl Lexer<'_> {
    fn span(&self) -> Span {
        Span::new(self.file, self.line, self.col)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn eat(&mut self, want: char) -> bool {
        if self.chars.peek().map(|&(_, c)| c) == Some(want) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn peek2(&self) -> Option<char> {
        let (i, _) = *self.chars.clone().peek()?;
        self.text[i..].chars().nth(1)
    }

    fn skip_trivia(&mut self, diags: &mut Vec<Diagnostic>) {
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '/' && self.peek2() == Some('/') {
                while let Some(&(_, c)) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c == '/' && self.peek2() == Some('*') {
                let start = self.span();
                self.bump();
                self.bump();
                let mut closed = false;
                while let Some(c) = self.bump() {
                    if c == '*' && self.eat('/') {
                        closed = true;
                        break;
                    }
                }
                if !closed {
                    diags.push(Diagnostic::error("P004", start, "unterminated block comment"));
                }
            } else {
                break;
            }
        }
    }

    /// Position of the final character of a text that holds no tokens.
    fn last_char_span(&self, fallback: Span) -> Span {
        let mut line = 1;
        let mut col = 1;
        let mut last = fallback;
        for c in self.text.chars() {
            last = Span::new(self.file, line, col);
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        last
    }
}
