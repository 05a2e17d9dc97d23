//! The factor-product expression language:
//!
//! ```text
//! expr := atom ('*' atom)*
//! atom := '1' | 'mon(' fam ',' m ',' p ',' r ')' | 'mc(' wt ';' int ';' int ')'
//!       | 'a(' wt ')' | 'astar(' wt ')' | 'd(' cwt ')'
//! wt   := '[' ints ']' | [int] 'rho'
//! cwt  := '[' re ',' im (';' re ',' im)* ']'
//! ```
//!
//! Basis indices in `mc` are 1-based.

use std::fmt;

use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Coords(Vec<i64>),
    /// `k rho`.
    Rho(i64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    Unit,
    Mon { fam: u8, m: u32, p: u32, r: u32 },
    Mc { wt: WeightSpec, l: usize, v: usize },
    A(WeightSpec),
    AStar(WeightSpec),
    D(Vec<C64>),
}

/// A product of atoms, kept flat (left-associated).
#[derive(Debug, Clone, PartialEq)]
pub struct Expression(pub Vec<Atom>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownAtom,
    Arity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at byte {}", self.msg, self.pos)
    }
}

impl std::error::Error for ParseError {}

struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Reader<'a> {
    fn err<T>(&self, pos: usize, kind: ParseErrorKind, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError { pos, kind, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> PResult<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => self.err(self.pos, ParseErrorKind::Syntax, format!("expected '{}', found '{}'", c as char, x as char)),
            None => self.err(self.pos, ParseErrorKind::Syntax, format!("expected '{}', found end of input", c as char)),
        }
    }

    fn ident(&mut self) -> (usize, &'a str) {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        (start, std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    /// A numeric literal token (sign, digits, '.', exponent).
    fn number_token(&mut self) -> (usize, &'a str) {
        self.skip_ws();
        let start = self.pos;
        let mut prev = b' ';
        while let Some(&c) = self.src.get(self.pos) {
            let ok = c.is_ascii_digit()
                || c == b'.'
                || c == b'e'
                || c == b'E'
                || ((c == b'-' || c == b'+') && (self.pos == start || prev == b'e' || prev == b'E'));
            if !ok {
                break;
            }
            prev = c;
            self.pos += 1;
        }
        (start, std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn int(&mut self) -> PResult<i64> {
        let (start, tok) = self.number_token();
        tok.parse().or_else(|_| self.err(start, ParseErrorKind::Syntax, format!("expected an integer, found {tok:?}")))
    }

    fn uint(&mut self) -> PResult<u32> {
        self.skip_ws();
        let start = self.pos;
        let x = self.int()?;
        u32::try_from(x).or_else(|_| self.err(start, ParseErrorKind::Syntax, format!("expected a non-negative integer, found {x}")))
    }

    fn float(&mut self) -> PResult<f64> {
        let (start, tok) = self.number_token();
        tok.parse().or_else(|_| self.err(start, ParseErrorKind::Syntax, format!("expected a number, found {tok:?}")))
    }

    fn weight(&mut self) -> PResult<WeightSpec> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let mut v = vec![self.int()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    v.push(self.int()?);
                }
                self.expect(b']')?;
                Ok(WeightSpec::Coords(v))
            }
            Some(c) if c.is_ascii_digit() || c == b'-' || c == b'r' => {
                let k = if c == b'r' { 1 } else { self.int()? };
                let (start, id) = self.ident();
                if id != "rho" {
                    return self.err(start, ParseErrorKind::Syntax, format!("expected 'rho', found {id:?}"));
                }
                Ok(WeightSpec::Rho(k))
            }
            _ => self.err(self.pos, ParseErrorKind::Syntax, "expected a weight '[..]' or 'rho'"),
        }
    }

    fn complex_weight(&mut self) -> PResult<Vec<C64>> {
        self.expect(b'[')?;
        let mut out = Vec::new();
        loop {
            let re = self.float()?;
            self.expect(b',')?;
            let im = self.float()?;
            out.push(C64::new(re, im));
            if self.peek() == Some(b';') {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.expect(b']')?;
        Ok(out)
    }

    /// Closes an argument list, reporting surplus arguments as an arity error.
    fn close(&mut self, start: usize, name: &str, want: usize) -> PResult<()> {
        match self.peek() {
            Some(b')') => {
                self.pos += 1;
                Ok(())
            }
            Some(b',') | Some(b';') => self.err(start, ParseErrorKind::Arity, format!("{name} takes {want} arguments")),
            _ => self.expect(b')'),
        }
    }

    /// Separator between arguments; a premature ')' is an arity error.
    fn sep(&mut self, c: u8, start: usize, name: &str, want: usize) -> PResult<()> {
        if self.peek() == Some(b')') {
            return self.err(start, ParseErrorKind::Arity, format!("{name} takes {want} arguments"));
        }
        self.expect(c)
    }

    fn atom(&mut self) -> PResult<Atom> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'1') {
            self.pos += 1;
            return Ok(Atom::Unit);
        }
        let (_, name) = self.ident();
        if name.is_empty() {
            return match self.peek() {
                Some(c) => self.err(start, ParseErrorKind::Syntax, format!("unexpected '{}'", c as char)),
                None => self.err(start, ParseErrorKind::Syntax, "expected a factor, found end of input"),
            };
        }
        if !matches!(name, "mon" | "mc" | "a" | "astar" | "d") {
            return self.err(start, ParseErrorKind::UnknownAtom, format!("unknown atom {name:?}"));
        }
        self.expect(b'(')?;
        let atom = match name {
            "mon" => {
                let fam_pos = self.pos;
                let fam = self.uint()?;
                if fam != 1 && fam != 2 {
                    return self.err(fam_pos, ParseErrorKind::Syntax, format!("monomial family must be 1 or 2, got {fam}"));
                }
                self.sep(b',', start, name, 4)?;
                let m = self.uint()?;
                self.sep(b',', start, name, 4)?;
                let p = self.uint()?;
                self.sep(b',', start, name, 4)?;
                let r = self.uint()?;
                self.close(start, name, 4)?;
                Atom::Mon { fam: fam as u8, m, p, r }
            }
            "mc" => {
                let wt = self.weight()?;
                self.sep(b';', start, name, 3)?;
                let l = self.uint()? as usize;
                self.sep(b';', start, name, 3)?;
                let v = self.uint()? as usize;
                self.close(start, name, 3)?;
                Atom::Mc { wt, l, v }
            }
            "a" | "astar" => {
                let wt = self.weight()?;
                self.close(start, name, 1)?;
                if name == "a" {
                    Atom::A(wt)
                } else {
                    Atom::AStar(wt)
                }
            }
            _ => {
                let l = self.complex_weight()?;
                self.close(start, name, 1)?;
                Atom::D(l)
            }
        };
        Ok(atom)
    }
}

pub fn parse_expression(text: &str) -> Result<Expression, ParseError> {
    let mut r = Reader { src: text.as_bytes(), pos: 0 };
    let mut atoms = vec![r.atom()?];
    while r.peek() == Some(b'*') {
        r.pos += 1;
        atoms.push(r.atom()?);
    }
    if let Some(c) = r.peek() {
        return r.err(r.pos, ParseErrorKind::Syntax, format!("unexpected '{}' after expression", c as char));
    }
    Ok(Expression(atoms))
}

/// Complex pairs `re,im;re,im`, optionally bracketed.
pub fn parse_complex_list(text: &str) -> Result<Vec<C64>, ParseError> {
    let t = text.trim();
    let wrapped = if t.starts_with('[') { t.to_string() } else { format!("[{t}]") };
    let shift = if t.starts_with('[') { 0 } else { 1 };
    let mut r = Reader { src: wrapped.as_bytes(), pos: 0 };
    let out = r.complex_weight().map_err(|e| ParseError { pos: e.pos.saturating_sub(shift), ..e })?;
    if r.peek().is_some() {
        return Err(ParseError { pos: r.pos - shift, kind: ParseErrorKind::Syntax, msg: "trailing input".into() });
    }
    Ok(out)
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Coords(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
            WeightSpec::Rho(1) => write!(f, "rho"),
            WeightSpec::Rho(k) => write!(f, "{k}rho"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Unit => write!(f, "1"),
            Atom::Mon { fam, m, p, r } => write!(f, "mon({fam},{m},{p},{r})"),
            Atom::Mc { wt, l, v } => write!(f, "mc({wt};{l};{v})"),
            Atom::A(w) => write!(f, "a({w})"),
            Atom::AStar(w) => write!(f, "astar({w})"),
            Atom::D(l) => {
                let parts: Vec<String> = l.iter().map(|z| format!("{:?},{:?}", z.re, z.im)).collect();
                write!(f, "d([{}])", parts.join(";"))
            }
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(" * "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(parse_expression("1").unwrap(), Expression(vec![Atom::Unit]));
        assert_eq!(parse_expression("mon(1,0,1,1)").unwrap().0, vec![Atom::Mon { fam: 1, m: 0, p: 1, r: 1 }]);
        let e = parse_expression("a([1,1]) * astar([1,1]) * mc([1,0];1;3)").unwrap();
        assert_eq!(e.0.len(), 3);
        assert_eq!(e.to_string(), "a([1,1]) * astar([1,1]) * mc([1,0];1;3)");
        let e = parse_expression("a(2rho)*astar( 2 rho )").unwrap();
        assert_eq!(e.to_string(), "a(2rho) * astar(2rho)");
        let e = parse_expression("d([0,-2; 0.5,-2e0])").unwrap();
        assert_eq!(e.to_string(), "d([0.0,-2.0;0.5,-2.0])");
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse_expression("mc([1,0];1;3) * foo(1)").unwrap_err();
        assert_eq!((e.kind, e.pos), (ParseErrorKind::UnknownAtom, 16));
        let e = parse_expression("mon(1,0,1)").unwrap_err();
        assert_eq!((e.kind, e.pos), (ParseErrorKind::Arity, 0));
        let e = parse_expression("1 * a([1,x])").unwrap_err();
        assert_eq!((e.kind, e.pos), (ParseErrorKind::Syntax, 9));
        let e = parse_expression("a([1]) a([1])").unwrap_err();
        assert_eq!((e.kind, e.pos), (ParseErrorKind::Syntax, 7));
        let e = parse_expression("mc([1];1;2;3)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Arity);
        assert!(parse_expression("").is_err());
        assert!(parse_expression("mon(3,0,0,0)").is_err());
    }

    #[test]
    fn lambda_lists() {
        assert_eq!(parse_complex_list("[0,-2]").unwrap(), vec![C64::new(0.0, -2.0)]);
        assert_eq!(parse_complex_list("0,-2;0,-2").unwrap().len(), 2);
        assert_eq!(parse_complex_list("0,-2;x").unwrap_err().pos, 5);
    }

    fn weight_spec() -> impl Strategy<Value = WeightSpec> {
        prop_oneof![
            prop::collection::vec(-3i64..4, 1..4).prop_map(WeightSpec::Coords),
            (-2i64..4).prop_map(WeightSpec::Rho),
        ]
    }

    fn atom() -> impl Strategy<Value = Atom> {
        prop_oneof![
            Just(Atom::Unit),
            (1u8..3, 0u32..5, 0u32..5, 0u32..5).prop_map(|(fam, m, p, r)| Atom::Mon { fam, m, p, r }),
            (weight_spec(), 0usize..9, 0usize..9).prop_map(|(wt, l, v)| Atom::Mc { wt, l, v }),
            weight_spec().prop_map(Atom::A),
            weight_spec().prop_map(Atom::AStar),
            prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..4)
                .prop_map(|v| Atom::D(v.into_iter().map(|(a, b)| C64::new(a, b)).collect())),
        ]
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(atoms in prop::collection::vec(atom(), 1..5)) {
            let e = Expression(atoms);
            let printed = e.to_string();
            let back = parse_expression(&printed).unwrap();
            prop_assert_eq!(&back, &e);
            prop_assert_eq!(back.to_string(), printed);
        }

        #[test]
        fn parser_never_panics(s in "[ -~]{0,40}") {
            let _ = parse_expression(&s);
        }
    }
}
