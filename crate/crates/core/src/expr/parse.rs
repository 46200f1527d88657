//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := factor ("*" factor)*
//! factor   := atom ("^" int)?
//! atom     := rational | ident | "exp" "(" linform ")" | "(" expr ")" | "-" factor
//! linform  := (rational "*")? ident (("+" | "-") (rational "*")? ident)*
//! rational := int ("/" posint)?
//! ```
//!
//! The argument of `exp` is parsed as a general expression and then required to be
//! a rational-linear form without constant term, which accepts every `linform`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{linear_weights, Chart, Coeff, ExprError, ScalarExpr};

pub fn parse_expr(text: &str, chart: &Chart) -> Result<ScalarExpr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, chart };
    p.skip_ws();
    if p.at_end() {
        return Err(p.syntax("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.syntax(&format!("unexpected `{}`", p.peek().unwrap() as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    chart: &'a Chart,
}

impl<'a> Parser<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn syntax(&self, msg: &str) -> ExprError {
        ExprError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn nvars(&self) -> usize {
        self.chart.dim()
    }

    fn expr(&mut self) -> Result<ScalarExpr, ExprError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc += t;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc -= &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ScalarExpr, ExprError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                let f = self.factor()?;
                acc = &acc * &f;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<ScalarExpr, ExprError> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let digits = self.digits();
        if digits.is_empty() || matches!(self.peek(), Some(b'.') | Some(b'/')) {
            return Err(ExprError::NonIntegerExponent { pos: start });
        }
        let k: i32 = digits.parse().map_err(|_| ExprError::NonIntegerExponent { pos: start })?;
        base.pow(if neg { -k } else { k })
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<ScalarExpr, ExprError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(c) if c.is_ascii_digit() => self.rational(),
            Some(c) if c.is_ascii_alphabetic() => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if name == "exp" {
                    self.skip_ws();
                    if self.peek() != Some(b'(') {
                        return Err(self.syntax("expected `(` after exp"));
                    }
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.skip_ws();
                    if self.peek() != Some(b')') {
                        return Err(self.syntax("expected `)`"));
                    }
                    self.pos += 1;
                    let w = linear_weights(&arg).ok_or(ExprError::NonLinearExp { pos: start })?;
                    return Ok(ScalarExpr::exp_linear(w));
                }
                match self.chart.index_of(name) {
                    Some(i) => Ok(ScalarExpr::coordinate(self.nvars(), i)),
                    None => Err(ExprError::UnknownCoordinate { name: name.to_string(), pos: start }),
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(c) => Err(self.syntax(&format!("unexpected `{}`", c as char))),
        }
    }

    fn rational(&mut self) -> Result<ScalarExpr, ExprError> {
        let num: BigInt = self.digits().parse().unwrap();
        if self.peek() == Some(b'.') {
            return Err(self.syntax("decimal literals are not allowed; use a rational p/q"));
        }
        let save = self.pos;
        self.skip_ws();
        if self.peek() != Some(b'/') {
            self.pos = save;
            return Ok(ScalarExpr::constant(self.nvars(), Coeff::from_integer(num)));
        }
        self.pos += 1;
        self.skip_ws();
        let d = self.digits();
        if d.is_empty() {
            return Err(self.syntax("`/` must be followed by a positive integer"));
        }
        let den: BigInt = d.parse().unwrap();
        if den.is_zero() {
            return Err(self.syntax("zero denominator"));
        }
        Ok(ScalarExpr::constant(self.nvars(), Coeff::new(num, den)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{rat, Monomial, Weight};

    fn chart() -> Chart {
        Chart::phase_space(2)
    }

    #[test]
    fn single_term_reading() {
        let c = chart();
        let e = parse_expr("2*q1^-2", &c).unwrap();
        let expected = ScalarExpr::term(
            4,
            rat(2, 1),
            Monomial::new(vec![-2, 0, 0, 0], vec![Weight::from_integer(0); 4]),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn exp_times_momentum() {
        let c = chart();
        let e = parse_expr("exp(q1 - q2)*p1", &c).unwrap();
        let w = vec![Weight::from_integer(1), Weight::from_integer(-1), Weight::from_integer(0), Weight::from_integer(0)];
        let expected = ScalarExpr::term(4, rat(1, 1), Monomial::new(vec![0, 0, 1, 0], w));
        assert_eq!(e, expected);
    }

    #[test]
    fn whitespace_is_insignificant() {
        let c = chart();
        assert_eq!(
            parse_expr("  1 / 2 * p1 ^ 2 ", &c).unwrap(),
            parse_expr("1/2*p1^2", &c).unwrap()
        );
    }

    #[test]
    fn rational_weights_in_exp() {
        let c = chart();
        let e = parse_expr("exp(1/2*q1 - 3*p2)", &c).unwrap();
        let (m, _) = e.terms().next().unwrap();
        assert_eq!(m.weights()[0], Weight::new(1, 2));
        assert_eq!(m.weights()[3], Weight::from_integer(-3));
    }

    #[test]
    fn errors_carry_positions() {
        let c = chart();
        assert!(matches!(
            parse_expr("q1 + z3", &c),
            Err(ExprError::UnknownCoordinate { ref name, pos: 5 }) if name == "z3"
        ));
        assert!(matches!(parse_expr("q1^1.5", &c), Err(ExprError::NonIntegerExponent { pos: 3 })));
        assert!(matches!(parse_expr("q1^p1", &c), Err(ExprError::NonIntegerExponent { .. })));
        assert!(matches!(parse_expr("exp(q1*q2)", &c), Err(ExprError::NonLinearExp { pos: 0 })));
        assert!(matches!(parse_expr("exp(q1 + 1)", &c), Err(ExprError::NonLinearExp { .. })));
        assert!(matches!(parse_expr("q1 +", &c), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("(q1", &c), Err(ExprError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_expr("", &c), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("1/0", &c), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("0.5*q1", &c), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn unary_minus_binds_to_factor() {
        let c = chart();
        assert_eq!(parse_expr("-q1^2", &c).unwrap(), parse_expr("-(q1^2)", &c).unwrap());
        assert_eq!(parse_expr("p1 - -p1", &c).unwrap(), parse_expr("2*p1", &c).unwrap());
    }
}
