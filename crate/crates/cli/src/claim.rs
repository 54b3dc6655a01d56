//! Claim expressions over terminal prices.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := number | 'S' name '[T]' | 'max(' expr ',' expr ')'
//!         | 'min(' expr ',' expr ')' | '(' expr ')'
//! ```

use rwval_core::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Price(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn fail<T>(&self, what: &str) -> Result<T, String> {
        Err(format!("{what} at offset {}", self.pos))
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), String> {
        if self.eat(token) {
            Ok(())
        } else {
            self.fail(&format!("expected {token:?}"))
        }
    }

    fn expr(&mut self) -> Result<Expr, String> {
        let mut lhs = self.term()?;
        loop {
            if self.eat("+") {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat("-") {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, String> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat("*") {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat("/") {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn pair(&mut self) -> Result<(Box<Expr>, Box<Expr>), String> {
        let a = self.expr()?;
        self.expect(",")?;
        let b = self.expr()?;
        self.expect(")")?;
        Ok((Box::new(a), Box::new(b)))
    }

    fn factor(&mut self) -> Result<Expr, String> {
        self.skip_ws();
        if self.eat("max(") {
            let (a, b) = self.pair()?;
            return Ok(Expr::Max(a, b));
        }
        if self.eat("min(") {
            let (a, b) = self.pair()?;
            return Ok(Expr::Min(a, b));
        }
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        match self.peek() {
            Some('S') => {
                self.pos += 1;
                self.skip_ws();
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if !(c.is_alphanumeric() || c == '_' || c == '-' || c == '.') {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
                if start == self.pos {
                    return self.fail("expected asset name after 'S'");
                }
                let name = self.src[start..self.pos].to_string();
                self.expect("[T]")?;
                Ok(Expr::Price(name))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if !(c.is_ascii_digit() || c == '.') {
                        break;
                    }
                    self.pos += 1;
                }
                parse_rational(&self.src[start..self.pos])
                    .map(Expr::Num)
                    .map_err(|e| e.to_string())
            }
            _ => self.fail("expected number, price, max, min or '('"),
        }
    }
}

pub fn parse_claim(src: &str) -> Result<Expr, String> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return p.fail("unexpected trailing input");
    }
    Ok(e)
}

impl Expr {
    /// Evaluates with `price(name)` giving the terminal price of an asset.
    pub fn eval(&self, price: &dyn Fn(&str) -> Option<Rational>) -> Result<Rational, String> {
        let bin = |a: &Expr, b: &Expr| -> Result<(Rational, Rational), String> {
            Ok((a.eval(price)?, b.eval(price)?))
        };
        Ok(match self {
            Expr::Num(x) => x.clone(),
            Expr::Price(name) => price(name).ok_or_else(|| format!("unknown asset {name:?}"))?,
            Expr::Add(a, b) => {
                let (x, y) = bin(a, b)?;
                x + y
            }
            Expr::Sub(a, b) => {
                let (x, y) = bin(a, b)?;
                x - y
            }
            Expr::Mul(a, b) => {
                let (x, y) = bin(a, b)?;
                x * y
            }
            Expr::Div(a, b) => {
                let (x, y) = bin(a, b)?;
                if y == Rational::from_integer(0.into()) {
                    return Err("division by zero".into());
                }
                x / y
            }
            Expr::Max(a, b) => {
                let (x, y) = bin(a, b)?;
                x.max(y)
            }
            Expr::Min(a, b) => {
                let (x, y) = bin(a, b)?;
                x.min(y)
            }
        })
    }

    /// Asset names referenced by the expression.
    pub fn assets(&self) -> Vec<&str> {
        match self {
            Expr::Num(_) => vec![],
            Expr::Price(n) => vec![n.as_str()],
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Max(a, b)
            | Expr::Min(a, b) => {
                let mut v = a.assets();
                v.extend(b.assets());
                v
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rwval_core::rat;

    fn prices(name: &str) -> Option<Rational> {
        match name {
            "stock" => Some(rat(2, 1)),
            "bond" => Some(rat(1, 1)),
            _ => None,
        }
    }

    #[test]
    fn call_and_arithmetic() {
        let e = parse_claim("max(S stock[T] - 1, 0)").unwrap();
        assert_eq!(e.eval(&prices).unwrap(), rat(1, 1));
        let e = parse_claim("1/3 + 2 * (S stock[T] - S bond[T])").unwrap();
        assert_eq!(e.eval(&prices).unwrap(), rat(7, 3));
        let e = parse_claim("min(S stock[T], 0.5)").unwrap();
        assert_eq!(e.eval(&prices).unwrap(), rat(1, 2));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_claim("max(S stock[T] 1)").is_err());
        assert!(parse_claim("S stock[2]").is_err());
        assert!(parse_claim("1 +").is_err());
        assert!(parse_claim("2 3").is_err());
        let e = parse_claim("S gold[T]").unwrap();
        assert!(e.eval(&prices).is_err());
        assert!(parse_claim("1/(S stock[T]-2)")
            .unwrap()
            .eval(&prices)
            .is_err());
    }
}
