use num_bigint::BigInt;
use thiserror::Error;

use super::{Context, Expr, Func, Rational, SymbolRole};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Prime,
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        offset,
        message: message.into(),
    }
}

fn decimal_to_rational(digits: &str, offset: usize) -> Result<Rational, ParseError> {
    let (mantissa, exponent) = match digits.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = digits[i + 1..]
                .parse()
                .map_err(|_| syntax(offset, "malformed exponent"))?;
            (&digits[..i], e)
        }
        None => (digits, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let all: String = format!("{int_part}{frac_part}");
    let n: BigInt = if all.is_empty() {
        return Err(syntax(offset, "malformed number"));
    } else {
        all.parse().map_err(|_| syntax(offset, "malformed number"))?
    };
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(n);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(value)
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, toks: vec![] };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit())) {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                if text.matches('.').count() > 1 {
                    return Err(syntax(start, "malformed number"));
                }
                lx.toks.push((Tok::Num(decimal_to_rational(text, start)?), start));
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                lx.toks.push((Tok::Ident(src[start..i].to_string()), start));
            } else {
                let t = match c {
                    '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '\'' => Tok::Prime,
                    _ => return Err(syntax(i, format!("unexpected character `{c}`"))),
                };
                lx.toks.push((t, i));
                i += c.len_utf8();
            }
        }
        lx.toks.push((Tok::End, lx.src.len()));
        Ok(lx.toks)
    }
}

struct Parser<'c> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    ctx: &'c Context,
}

impl<'c> Parser<'c> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.offset(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    terms.push(self.term()?.neg());
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::add(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = Expr::mul([acc, rhs]);
                }
                Tok::Op('/') => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.div(&rhs);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let e = self.unary()?;
            return Ok(Expr::pow(base, e));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(r) => Ok(Expr::constant(r)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(name, at),
            Tok::End => Err(syntax(at, "unexpected end of input")),
            t => Err(syntax(at, format!("unexpected token {t:?}"))),
        }
    }

    fn identifier(&mut self, name: String, at: usize) -> Result<Expr, ParseError> {
        let mut primes = 0u32;
        while *self.peek() == Tok::Prime {
            self.bump();
            primes += 1;
        }
        if *self.peek() == Tok::LParen {
            if let Some(f) = Func::from_name(&name) {
                if primes > 0 {
                    return Err(syntax(at, format!("`{name}` cannot carry primes")));
                }
                self.bump();
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(match f {
                    Func::Sqrt => Expr::sqrt(arg),
                    _ => Expr::call(f, arg),
                });
            }
            if self.ctx.is_function(&name) {
                self.bump();
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Expr::ufunc(&name, primes, arg));
            }
            return Err(ParseError::UnknownIdentifier { name, offset: at });
        }
        if primes > 0 {
            return Err(syntax(self.offset(), "expected `(` after primes"));
        }
        match self.ctx.role(&name) {
            Some(SymbolRole::Parameter) | Some(SymbolRole::Variable) => Ok(Expr::symbol(&name)),
            Some(SymbolRole::Function) => Err(syntax(self.offset(), format!("function `{name}` needs an argument"))),
            None => Err(ParseError::UnknownIdentifier { name, offset: at }),
        }
    }
}

/// Parse `text` against the symbols declared in `ctx`.
pub fn parse(text: &str, ctx: &Context) -> Result<Expr, ParseError> {
    let toks = Lexer::run(text)?;
    let mut p = Parser { toks, pos: 0, ctx };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.offset(), "unexpected trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::canonicalize;

    fn ctx() -> Context {
        Context::new()
            .with_param("lambda")
            .with_param("beta")
            .with_var("x")
            .with_func("F")
            .with_func("zeta")
    }

    #[test]
    fn precedence_and_associativity() {
        let c = ctx();
        let e = parse("2^3^2", &c).unwrap();
        assert_eq!(e, Expr::int(512));
        let e = parse("-x^2", &c).unwrap();
        assert_eq!(e, Expr::powi(Expr::symbol("x"), 2).neg());
        let e = parse("1 - 2 - 3", &c).unwrap();
        assert_eq!(e, Expr::int(-4));
        let e = parse("8/2/2", &c).unwrap();
        assert_eq!(e, Expr::int(2));
    }

    #[test]
    fn decimals_are_exact() {
        let e = parse("0.1 + 0.2", &ctx()).unwrap();
        assert_eq!(e, Expr::rational(3, 10));
        let e = parse("1.5e-3", &ctx()).unwrap();
        assert_eq!(e, Expr::rational(3, 2000));
    }

    #[test]
    fn derivatives_of_unspecified_functions() {
        let e = parse("F''(x) + zeta'(T)", &ctx()).unwrap();
        let names = e.ufunc_names();
        assert!(names.contains("F") && names.contains("zeta"));
        assert!(e.to_string().contains("F''(x)"));
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("x + * 2", &ctx()) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match parse("x + mystery", &ctx()) {
            Err(ParseError::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "mystery");
                assert_eq!(offset, 4);
            }
            other => panic!("{other:?}"),
        }
        assert!(parse("(x", &ctx()).is_err());
        assert!(parse("G(x)", &ctx()).is_err());
        assert!(parse("sin'(x)", &ctx()).is_err());
    }

    #[test]
    fn rendering_round_trips() {
        let c = ctx();
        for src in [
            "lambda*x^2/3 - 2*exp(-x)",
            "(x + 1)^(1/2) * F'(x^2 - 1)",
            "-x/(1 + x^beta)",
            "arccos(x) + arctan(1/x) - ln(rho)*T",
            "2^(1/2)*x^(-3) - (-2)^3",
        ] {
            let e = parse(src, &c).unwrap();
            let back = parse(&e.to_string(), &c).unwrap();
            assert_eq!(canonicalize(&back).unwrap(), canonicalize(&e).unwrap(), "{src} -> {e}");
        }
    }
}
