use num_rational::BigRational;

use super::{validate, Branch, ConstructionProgram, Ctor, Kind, ParseError, Radius, Step};
use crate::geom::GliderParam;
use crate::numeric::parse_rational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(BigRational),
    LParen,
    RParen,
    Comma,
    Eq,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(q) => format!("number {q}"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Eq => "'='".into(),
            Tok::End => "end of line".into(),
        }
    }
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Lexer { chars: src.chars().collect(), pos: 0, line, _src: src }
    }

    fn err(&self, col: usize, expected: &[&'static str], found: String) -> ParseError {
        ParseError::SyntaxError { line: self.line, col, expected: expected.to_vec(), found }
    }

    /// Next token with its 1-based column.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        let col = self.pos + 1;
        let Some(&c) = self.chars.get(self.pos) else {
            return Ok((Tok::End, col));
        };
        if c == '#' {
            self.pos = self.chars.len();
            return Ok((Tok::End, col));
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            return Ok((t, col));
        }
        if c.is_alphabetic() || c == '_' {
            let start = self.pos;
            while self.pos < self.chars.len() && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
            {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.chars[start..self.pos].iter().collect()), col));
        }
        if c == '-' || c == '.' || c.is_ascii_digit() {
            let start = self.pos;
            self.pos += 1;
            while self.pos < self.chars.len() && matches!(self.chars[self.pos], '0'..='9' | '.' | '/') {
                self.pos += 1;
            }
            let text: String = self.chars[start..self.pos].iter().collect();
            return match parse_rational(&text) {
                Some(q) => Ok((Tok::Num(q), col)),
                None => Err(self.err(col, &["number"], format!("`{text}`"))),
            };
        }
        Err(self.err(col, &["identifier", "number", "'('", "')'", "','", "'='"], format!("'{c}'")))
    }
}

enum Arg {
    Name(String),
    Num(BigRational),
}

/// Parses a program. Blank lines and `#` comments are ignored; LF and CRLF
/// line endings are both accepted.
pub fn parse_program(text: &str) -> Result<ConstructionProgram, ParseError> {
    let mut steps = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if let Some(step) = parse_line(line, i + 1)? {
            steps.push(step);
            lines.push(i + 1);
        }
    }
    validate(&steps, &lines)?;
    Ok(ConstructionProgram { steps })
}

fn parse_line(src: &str, line: usize) -> Result<Option<Step>, ParseError> {
    let mut lx = Lexer::new(src, line);
    let (kind_tok, col) = lx.next()?;
    let kind = match kind_tok {
        Tok::End => return Ok(None),
        Tok::Ident(ref s) => match Kind::from_keyword(s) {
            Some(k) => k,
            None => return Err(lx.err(col, &["object kind"], kind_tok.describe())),
        },
        other => return Err(lx.err(col, &["object kind"], other.describe())),
    };
    let name = match lx.next()? {
        (Tok::Ident(s), _) => s,
        (other, col) => return Err(lx.err(col, &["identifier"], other.describe())),
    };
    expect(&mut lx, Tok::Eq, "'='")?;
    let (ctor_name, ctor_col) = match lx.next()? {
        (Tok::Ident(s), col) => (s, col),
        (other, col) => return Err(lx.err(col, &["constructor"], other.describe())),
    };
    expect(&mut lx, Tok::LParen, "'('")?;
    let mut args: Vec<(Arg, usize)> = Vec::new();
    let (first, col) = lx.next()?;
    if first != Tok::RParen {
        let mut tok = (first, col);
        loop {
            match tok {
                (Tok::Ident(s), c) => args.push((Arg::Name(s), c)),
                (Tok::Num(q), c) => args.push((Arg::Num(q), c)),
                (other, c) => return Err(lx.err(c, &["identifier", "number"], other.describe())),
            }
            match lx.next()? {
                (Tok::Comma, _) => tok = lx.next()?,
                (Tok::RParen, _) => break,
                (other, c) => return Err(lx.err(c, &["','", "')'"], other.describe())),
            }
        }
    }
    match lx.next()? {
        (Tok::End, _) => {}
        (other, c) => return Err(lx.err(c, &["end of line"], other.describe())),
    }
    let ctor = build_ctor(&lx, kind, &ctor_name, ctor_col, args)?;
    Ok(Some(Step { name, ctor }))
}

fn expect(lx: &mut Lexer, want: Tok, label: &'static str) -> Result<(), ParseError> {
    let (t, col) = lx.next()?;
    if t == want {
        Ok(())
    } else {
        Err(lx.err(col, &[label], t.describe()))
    }
}

fn build_ctor(lx: &Lexer, kind: Kind, ctor: &str, col: usize, args: Vec<(Arg, usize)>) -> Result<Ctor, ParseError> {
    let line = lx.line;
    let arity = |expected: &str, found: usize| ParseError::Arity {
        line,
        ctor: ctor.to_string(),
        expected: expected.to_string(),
        found,
    };
    let n = args.len();
    let name = |a: &(Arg, usize)| -> Result<String, ParseError> {
        match a {
            (Arg::Name(s), _) => Ok(s.clone()),
            (Arg::Num(q), c) => Err(lx.err(*c, &["identifier"], format!("number {q}"))),
        }
    };
    let num = |a: &(Arg, usize)| -> Result<BigRational, ParseError> {
        match a {
            (Arg::Num(q), _) => Ok(q.clone()),
            (Arg::Name(s), c) => Err(lx.err(*c, &["number"], format!("`{s}`"))),
        }
    };
    let built = match ctor {
        "free" => match kind {
            Kind::Point if n == 2 => Ctor::FreePoint(num(&args[0])?, num(&args[1])?),
            Kind::Point => return Err(arity("2", n)),
            Kind::Number if n == 1 => Ctor::FreeNumber(num(&args[0])?),
            Kind::Number => return Err(arity("1", n)),
            _ => {
                return Err(ParseError::KindMismatch { line, declared: kind, ctor: ctor.into() });
            }
        },
        "intersect" => {
            if n != 3 {
                return Err(arity("3", n));
            }
            let branch = match &args[2] {
                (Arg::Name(s), _) if s == "first" => Branch::First,
                (Arg::Name(s), _) if s == "second" => Branch::Second,
                (Arg::Name(s), c) => return Err(lx.err(*c, &["first", "second"], format!("`{s}`"))),
                (Arg::Num(q), c) => return Err(lx.err(*c, &["first", "second"], format!("number {q}"))),
            };
            Ctor::Intersect { c1: name(&args[0])?, c2: name(&args[1])?, branch }
        }
        "on_circle" => {
            if n != 2 {
                return Err(arity("2", n));
            }
            let t = match &args[1] {
                (Arg::Num(q), _) => GliderParam::Finite(q.clone()),
                (Arg::Name(s), _) if s == "inf" => GliderParam::Infinity,
                (Arg::Name(s), c) => return Err(lx.err(*c, &["number", "inf"], format!("`{s}`"))),
            };
            Ctor::OnCircle { circle: name(&args[0])?, t }
        }
        "midpoint" | "segment" | "circle_through" => {
            if n != 2 {
                return Err(arity("2", n));
            }
            let (a, b) = (name(&args[0])?, name(&args[1])?);
            match ctor {
                "midpoint" => Ctor::Midpoint(a, b),
                "segment" => Ctor::Segment(a, b),
                _ => Ctor::CircleThrough { center: a, through: b },
            }
        }
        "circle" => {
            if n != 2 {
                return Err(arity("2", n));
            }
            let radius = match &args[1] {
                (Arg::Num(q), _) => Radius::Literal(q.clone()),
                (Arg::Name(s), _) => Radius::Ref(s.clone()),
            };
            Ctor::CircleRadius { center: name(&args[0])?, radius }
        }
        "circumcircle" => {
            if n != 3 {
                return Err(arity("3", n));
            }
            Ctor::Circumcircle(name(&args[0])?, name(&args[1])?, name(&args[2])?)
        }
        "polygon" => {
            if n < 3 {
                return Err(arity("at least 3", n));
            }
            Ctor::Polygon(args.iter().map(name).collect::<Result<_, _>>()?)
        }
        _ => {
            return Err(lx.err(
                col,
                &[
                    "free",
                    "intersect",
                    "on_circle",
                    "midpoint",
                    "circle",
                    "circle_through",
                    "circumcircle",
                    "segment",
                    "polygon",
                ],
                format!("`{ctor}`"),
            ))
        }
    };
    if built.kind() != kind {
        return Err(ParseError::KindMismatch { line, declared: kind, ctor: ctor.into() });
    }
    Ok(built)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_step_program() {
        let p = parse_program("point A = free(-2.97, 2.45)\ncircle c = circle(A, 5)").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.to_string(), "point A = free(-2.97, 2.45)\ncircle c = circle(A, 5)\n");
    }

    #[test]
    fn crlf_comments_and_blanks() {
        let p = parse_program("# header\r\n\r\npoint A = free(1/3, 0) # trailing\r\nnumber r = free(2)\r\n").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.steps()[0].to_string(), "point A = free(1/3, 0)");
    }

    #[test]
    fn reference_errors() {
        assert_eq!(
            parse_program("point P = free(0,0)\npoint P = free(1,1)"),
            Err(ParseError::DuplicateName { line: 2, name: "P".into() })
        );
        assert_eq!(
            parse_program("circle c = circle(B, 5)"),
            Err(ParseError::UnknownReference { line: 1, name: "B".into() })
        );
        assert_eq!(
            parse_program("circle c = circle(B, 5)\npoint B = free(0,0)"),
            Err(ParseError::ForwardReference { line: 1, name: "B".into() })
        );
        assert_eq!(
            parse_program("point M = midpoint(M, M)"),
            Err(ParseError::CyclicDefinition { line: 1, name: "M".into() })
        );
        assert!(matches!(
            parse_program("point A = free(0,0)\ncircle c = circle(A, A)"),
            Err(ParseError::TypeMismatch { line: 2, .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_program("point A = free(1, 2") {
            Err(ParseError::SyntaxError { line: 1, col, expected, .. }) => {
                assert_eq!(col, 20);
                assert_eq!(expected, vec!["','", "')'"]);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_program("pt A = free(1,2)"), Err(ParseError::SyntaxError { col: 1, .. })));
        assert!(matches!(parse_program("point A free(1,2)"), Err(ParseError::SyntaxError { col: 9, .. })));
        assert!(matches!(parse_program("circle c = midpoint(A, B)"), Err(ParseError::KindMismatch { .. })));
        assert!(matches!(parse_program("point A = free(1)"), Err(ParseError::Arity { .. })));
    }
}
