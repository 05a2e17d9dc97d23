//! Recursive-descent reader for the rendering grammar of [`RatQ`]:
//! integers, `q`, `+ - * /`, integer powers `^`, and parentheses.

use super::{QnumError, RatQ};

struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, QnumError> {
        Err(QnumError::Parse { pos: self.pos, msg: msg.to_string() })
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<i64, QnumError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .map_or_else(|| self.err("integer overflow"), Ok)
    }

    fn expr(&mut self) -> Result<RatQ, QnumError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatQ, QnumError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(QnumError::Parse { pos: at, msg: "division by zero".into() });
                }
                acc = &acc / &d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatQ, QnumError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let e = self.integer()?;
            let e = i32::try_from(e).map_err(|_| QnumError::Parse {
                pos: self.pos,
                msg: "exponent too large".into(),
            })?;
            return base.pow(if neg { -e } else { e });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatQ, QnumError> {
        match self.peek() {
            Some(b'q') => {
                self.pos += 1;
                Ok(RatQ::q_pow(1))
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => Ok(RatQ::from(self.integer()?)),
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses strings such as `(q^2-1)/(q^4-1)` or `-3/2*q^-1`.
pub fn parse_ratq(s: &str) -> Result<RatQ, QnumError> {
    let mut r = Reader { src: s.as_bytes(), pos: 0 };
    let v = r.expr()?;
    if r.peek().is_some() {
        return r.err("trailing input");
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_closed_form() {
        let x = parse_ratq("(-q)*(q^2-1)/(q^4-1)").unwrap();
        assert_eq!(x.to_string(), "-q/(q^2+1)");
    }

    #[test]
    fn error_positions() {
        match parse_ratq("q + * 2") {
            Err(QnumError::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(parse_ratq("1/(q-q)").is_err());
    }
}
