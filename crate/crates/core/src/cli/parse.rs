//! Text syntax for expressions in scenario files.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number ['i'] | 'i' | 'z' | 'pi' | '(' expr ')'
//!         | 'exp' '(' expr ')' | 'sqrt' '(' expr ')' | 'poly' '(' '[' expr (',' expr)* ']' ')'
//! ```
//!
//! Exponents must be integers unless the base is a constant; `sqrt` and the
//! entries of `poly` must be constants.

use num_complex::Complex64;

use crate::exprjet::Expression;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Number(text.parse().map_err(|_| format!("bad number '{text}'"))?));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()[],".contains(ch) {
            out.push(Token::Op(ch));
            i += 1;
        } else {
            return Err(format!("unexpected character '{ch}'"));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), String> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(format!("expected '{op}' at token {}", self.pos))
        }
    }

    fn expr(&mut self) -> Result<Expression, String> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expression, String> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let den = self.unary()?;
                acc = Expression::quotient(acc, den).map_err(|e| e.to_string())?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expression, String> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expression, String> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let exponent = self.unary()?;
        let k = exponent
            .constant_value()
            .ok_or_else(|| "exponent must be a constant".to_string())?;
        if k.im == 0.0 && k.re.fract() == 0.0 && k.re.abs() <= 64.0 {
            return Ok(Expression::power(base, k.re as i32));
        }
        let b = base
            .constant_value()
            .ok_or_else(|| "non-integer exponent needs a constant base".to_string())?;
        Ok(Expression::constant(b.powc(k)))
    }

    fn constant_arg(&mut self, name: &str) -> Result<Complex64, String> {
        self.expect('(')?;
        let e = self.expr()?;
        self.expect(')')?;
        e.constant_value().ok_or_else(|| format!("{name} takes a constant argument"))
    }

    fn atom(&mut self) -> Result<Expression, String> {
        let tok = self.peek().cloned().ok_or_else(|| "unexpected end of input".to_string())?;
        self.pos += 1;
        match tok {
            Token::Number(x) => {
                if self.peek() == Some(&Token::Ident("i".into())) {
                    self.pos += 1;
                    Ok(Expression::constant(Complex64::new(0.0, x)))
                } else {
                    Ok(Expression::real(x))
                }
            }
            Token::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Token::Ident(name) => match name.as_str() {
                "z" => Ok(Expression::z()),
                "i" => Ok(Expression::constant(Complex64::new(0.0, 1.0))),
                "pi" => Ok(Expression::real(std::f64::consts::PI)),
                "exp" => {
                    self.expect('(')?;
                    let e = self.expr()?;
                    self.expect(')')?;
                    Ok(Expression::exp(e))
                }
                "sqrt" => Ok(Expression::constant(self.constant_arg("sqrt")?.sqrt())),
                "poly" => {
                    self.expect('(')?;
                    self.expect('[')?;
                    let mut coeffs = Vec::new();
                    loop {
                        let e = self.expr()?;
                        coeffs.push(
                            e.constant_value()
                                .ok_or_else(|| "poly coefficients must be constants".to_string())?,
                        );
                        if !self.eat(',') {
                            break;
                        }
                    }
                    self.expect(']')?;
                    self.expect(')')?;
                    Ok(Expression::polynomial(&coeffs))
                }
                other => Err(format!("unknown identifier '{other}'")),
            },
            Token::Op(op) => Err(format!("unexpected '{op}'")),
        }
    }
}

/// Parses an expression in `z`.
pub fn parse_expression(s: &str) -> Result<Expression, String> {
    let mut p = Parser {
        tokens: tokenize(s)?,
        pos: 0,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(format!("trailing input after token {}", p.pos));
    }
    Ok(e)
}

/// Parses a constant such as `0.5`, `1+2i`, `i`, `sqrt(2)/2`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    parse_expression(s)?
        .constant_value()
        .ok_or_else(|| format!("'{s}' is not a constant"))
}
