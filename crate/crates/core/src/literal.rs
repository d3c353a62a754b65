//! A small tokenizer for the Python-literal annotation lists found in the
//! upstream `.txt` corpora: nested lists and tuples of quoted strings and
//! integers, e.g. `[['burger', 'food quality', 'positive', 'loved']]` or
//! `[([1, 2], [4], 'POS')]`. Nothing is evaluated.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    List(Vec<Literal>),
    Tuple(Vec<Literal>),
    Str(String),
    Int(i64),
}

impl Literal {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            Literal::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Literal::Int(i) => Some(*i),
            _ => None,
        }
    }

    /// Items of a list or a tuple.
    pub fn items(&self) -> Option<&[Literal]> {
        match self {
            Literal::List(v) | Literal::Tuple(v) => Some(v),
            _ => None,
        }
    }
}

pub fn parse_literal(input: &str) -> Result<Literal, String> {
    let mut p = Parser {
        chars: input.char_indices().collect(),
        pos: 0,
    };
    let value = p.value()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(format!("trailing input at offset {}", p.offset()));
    }
    Ok(value)
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(
            self.chars.last().map_or(0, |(i, c)| i + c.len_utf8()),
            |(i, _)| *i,
        )
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn value(&mut self) -> Result<Literal, String> {
        self.skip_ws();
        match self.peek() {
            Some('[') => self.seq(']').map(Literal::List),
            Some('(') => self.seq(')').map(Literal::Tuple),
            Some(q @ ('\'' | '"')) => self.string(q).map(Literal::Str),
            Some(c) if c == '-' || c.is_ascii_digit() => self.int(),
            Some(c) => Err(format!("unexpected `{c}` at offset {}", self.offset())),
            None => Err("unexpected end of input".to_string()),
        }
    }

    fn seq(&mut self, close: char) -> Result<Vec<Literal>, String> {
        let open_at = self.offset();
        self.bump();
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c == close => {
                    self.bump();
                    return Ok(items);
                }
                None => return Err(format!("unbalanced bracket opened at offset {open_at}")),
                _ => {}
            }
            items.push(self.value()?);
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some(c) if c == close => {}
                Some(c) => {
                    return Err(format!(
                        "expected `,` or `{close}` but found `{c}` at offset {}",
                        self.offset()
                    ))
                }
                None => return Err(format!("unbalanced bracket opened at offset {open_at}")),
            }
        }
    }

    fn string(&mut self, quote: char) -> Result<String, String> {
        let open_at = self.offset();
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(format!("unterminated string opened at offset {open_at}")),
                Some('\\') => match self.bump() {
                    Some(c @ ('\'' | '"' | '\\')) => out.push(c),
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some(c) => {
                        out.push('\\');
                        out.push(c);
                    }
                    None => return Err(format!("unterminated string opened at offset {open_at}")),
                },
                Some(c) if c == quote => return Ok(out),
                Some(c) => out.push(c),
            }
        }
    }

    fn int(&mut self) -> Result<Literal, String> {
        let start = self.pos;
        if self.peek() == Some('-') {
            self.bump();
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        let text: String = self.chars[start..self.pos].iter().map(|(_, c)| c).collect();
        text.parse::<i64>()
            .map(Literal::Int)
            .map_err(|_| format!("bad integer `{text}`"))
    }
}
