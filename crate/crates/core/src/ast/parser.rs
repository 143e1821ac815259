//! Recursive-descent parser for the clingo-style surface language.

use super::lexer::{Lexer, Token, TokenKind};
use super::*;
use crate::error::{Error, Result};

pub struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

/// Parses a complete program.
pub fn parse_program(src: &str) -> Result<Program> {
    Parser::new(src)?.program()
}

/// Parses a single term (including theory expressions).
pub fn parse_term(src: &str) -> Result<Term> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str) -> Result<Self> {
        Ok(Parser { src, toks: Lexer::new(src).tokenize()?, pos: 0 })
    }

    pub fn peek(&self) -> &TokenKind {
        &self.toks[self.pos].kind
    }

    pub fn peek_at(&self, k: usize) -> &TokenKind {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].kind
    }

    pub fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    pub fn advance(&mut self) -> TokenKind {
        let k = self.toks[self.pos].kind.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        k
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        let s = self.span();
        Error::Parse { line: s.line, col: s.col, msg: msg.into() }
    }

    pub fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == kind {
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, kind: &TokenKind, what: &str) -> Result<()> {
        if self.eat(kind) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    pub fn expect_eof(&self) -> Result<()> {
        if *self.peek() == TokenKind::Eof {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", describe(self.peek()))))
        }
    }

    pub fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            TokenKind::Ident(s) => {
                self.advance();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {}", describe(&other)))),
        }
    }

    fn program(&mut self) -> Result<Program> {
        let mut statements = Vec::new();
        while *self.peek() != TokenKind::Eof {
            statements.push(self.statement()?);
        }
        Ok(Program { statements })
    }

    fn statement(&mut self) -> Result<Statement> {
        let span = self.span();
        if let TokenKind::Directive(d) = self.peek().clone() {
            match d.as_str() {
                "external" => {
                    self.advance();
                    let atom = self.term()?;
                    let condition = if self.eat(&TokenKind::Colon) {
                        self.condition()?
                    } else {
                        Vec::new()
                    };
                    self.expect(&TokenKind::Dot, "'.'")?;
                    return Ok(Statement::External { atom, condition, span });
                }
                "show" => {
                    self.advance();
                    return self.show(span);
                }
                "const" => {
                    self.advance();
                    let name = self.ident()?;
                    self.expect(&TokenKind::Eq, "'='")?;
                    let value = self.term()?;
                    self.expect(&TokenKind::Dot, "'.'")?;
                    return Ok(Statement::Const { name, value, span });
                }
                "type" => return self.type_decl(span),
                "sup" | "supremum" | "inf" | "infimum" => {}
                other => return Err(self.error(format!("unsupported directive #{other}"))),
            }
        }
        self.rule(span).map(Statement::Rule)
    }

    fn show(&mut self, span: Span) -> Result<Statement> {
        if self.eat(&TokenKind::Dot) {
            return Ok(Statement::Show { show: Show::Nothing, span });
        }
        if let (TokenKind::Ident(name), TokenKind::Slash, TokenKind::Integer(arity), TokenKind::Dot) =
            (self.peek().clone(), self.peek_at(1).clone(), self.peek_at(2).clone(), self.peek_at(3).clone())
        {
            for _ in 0..4 {
                self.advance();
            }
            return Ok(Statement::Show { show: Show::Signature { name, arity: arity as usize }, span });
        }
        let term = self.term()?;
        let condition = if self.eat(&TokenKind::Colon) { self.condition()? } else { Vec::new() };
        self.expect(&TokenKind::Dot, "'.'")?;
        Ok(Statement::Show { show: Show::Term { term, condition }, span })
    }

    fn type_decl(&mut self, span: Span) -> Result<Statement> {
        let start = self.toks[self.pos].offset;
        self.advance();
        let mut depth = 0usize;
        loop {
            match self.advance() {
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => {
                    depth = depth.saturating_sub(1);
                    if depth == 0 && *self.peek() == TokenKind::Dot {
                        let end = self.toks[self.pos].offset + 1;
                        self.advance();
                        return Ok(Statement::TypeDecl { text: self.src[start..end].to_string(), span });
                    }
                }
                TokenKind::Eof => {
                    return Err(Error::Parse {
                        line: span.line,
                        col: span.col,
                        msg: "unterminated #type block".into(),
                    })
                }
                _ => {}
            }
        }
    }

    fn rule(&mut self, span: Span) -> Result<Rule> {
        let head = if *self.peek() == TokenKind::If {
            Head::Disjunction(Vec::new())
        } else if self.eat(&TokenKind::LBrace) {
            let mut els = Vec::new();
            if !self.eat(&TokenKind::RBrace) {
                loop {
                    els.push(self.head_element()?);
                    if self.eat(&TokenKind::Semi) {
                        continue;
                    }
                    self.expect(&TokenKind::RBrace, "'}'")?;
                    break;
                }
            }
            Head::Choice(els)
        } else {
            let mut els = vec![self.head_element()?];
            while self.eat(&TokenKind::Semi) || self.eat(&TokenKind::Pipe) {
                els.push(self.head_element()?);
            }
            Head::Disjunction(els)
        };
        let mut body = Vec::new();
        if self.eat(&TokenKind::If) && *self.peek() != TokenKind::Dot {
            body = self.body()?;
        }
        if head.is_constraint() && body.is_empty() && *self.peek() != TokenKind::Dot {
            return Err(self.error("malformed rule"));
        }
        if *self.peek() != TokenKind::Dot {
            return Err(self.error(format!(
                "expected '.' to terminate rule, found {}",
                describe(self.peek())
            )));
        }
        self.advance();
        Ok(Rule { head, body, span })
    }

    fn head_element(&mut self) -> Result<HeadElement> {
        let atom = self.term()?;
        let condition = if self.eat(&TokenKind::Colon) { self.condition()? } else { Vec::new() };
        Ok(HeadElement { atom, condition })
    }

    fn body(&mut self) -> Result<Vec<Literal>> {
        let mut out = Vec::new();
        loop {
            let lit = self.simple_literal()?;
            if self.eat(&TokenKind::Colon) {
                let Literal::Atom { sign, atom } = lit else {
                    return Err(self.error("a comparison cannot carry a condition"));
                };
                let condition = self.condition()?;
                out.push(Literal::Conditional { sign, atom, condition });
                if self.eat(&TokenKind::Semi) {
                    continue;
                }
                return Ok(out);
            }
            out.push(lit);
            if self.eat(&TokenKind::Comma) || self.eat(&TokenKind::Semi) {
                continue;
            }
            return Ok(out);
        }
    }

    fn condition(&mut self) -> Result<Vec<Literal>> {
        let mut out = vec![self.simple_literal()?];
        while self.eat(&TokenKind::Comma) {
            out.push(self.simple_literal()?);
        }
        Ok(out)
    }

    fn simple_literal(&mut self) -> Result<Literal> {
        let negated = matches!(self.peek(), TokenKind::Ident(s) if s == "not")
            && !matches!(self.peek_at(1), TokenKind::LParen | TokenKind::Comma | TokenKind::Dot);
        if negated {
            self.advance();
        }
        let lhs = self.term()?;
        let op = match self.peek() {
            TokenKind::Lt => Some(CmpOp::Lt),
            TokenKind::Le => Some(CmpOp::Le),
            TokenKind::Gt => Some(CmpOp::Gt),
            TokenKind::Ge => Some(CmpOp::Ge),
            TokenKind::Eq => Some(CmpOp::Eq),
            TokenKind::Ne => Some(CmpOp::Ne),
            _ => None,
        };
        match op {
            Some(op) if !negated => {
                self.advance();
                let rhs = self.term()?;
                Ok(Literal::Comparison { lhs, op, rhs })
            }
            Some(_) => Err(self.error("negated comparisons are not supported")),
            None => Ok(Literal::Atom {
                sign: if negated { Sign::Negative } else { Sign::Positive },
                atom: lhs,
            }),
        }
    }

    pub fn term(&mut self) -> Result<Term> {
        let lo = self.additive()?;
        if self.eat(&TokenKind::DotDot) {
            let hi = self.additive()?;
            return Ok(Term::Range(Box::new(lo), Box::new(hi)));
        }
        Ok(lo)
    }

    fn additive(&mut self) -> Result<Term> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.multiplicative()?;
            lhs = Term::BinOp(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn multiplicative(&mut self) -> Result<Term> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                TokenKind::Backslash => BinOp::Mod,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Term::BinOp(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Term> {
        if self.eat(&TokenKind::Minus) {
            if let TokenKind::Integer(v) = *self.peek() {
                self.advance();
                return Ok(Term::Integer(-v));
            }
            return Ok(Term::Minus(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn args(&mut self) -> Result<Vec<Term>> {
        let mut args = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.eat(&TokenKind::Comma) {
                continue;
            }
            self.expect(&TokenKind::RParen, "')'")?;
            return Ok(args);
        }
    }

    fn primary(&mut self) -> Result<Term> {
        match self.peek().clone() {
            TokenKind::Integer(v) => {
                self.advance();
                Ok(Term::Integer(v))
            }
            TokenKind::Str(s) => {
                self.advance();
                Ok(Term::Str(s))
            }
            TokenKind::Variable(v) => {
                self.advance();
                Ok(Term::Variable(v))
            }
            TokenKind::Ident(name) => {
                self.advance();
                if self.eat(&TokenKind::LParen) {
                    let args = self.args()?;
                    Ok(Term::func(&name, args))
                } else {
                    Ok(Term::Symbol(name))
                }
            }
            TokenKind::Directive(d) => match d.as_str() {
                "sup" | "supremum" => {
                    self.advance();
                    Ok(Term::Supremum)
                }
                "inf" | "infimum" => {
                    self.advance();
                    Ok(Term::Infimum)
                }
                _ => Err(self.error(format!("unexpected directive #{d} in term"))),
            },
            TokenKind::Amp => {
                self.advance();
                let op = self.ident()?;
                let args = if self.eat(&TokenKind::LParen) { self.args()? } else { Vec::new() };
                Ok(Term::Theory(op, args))
            }
            TokenKind::LParen => {
                self.advance();
                let t = self.term()?;
                self.expect(&TokenKind::RParen, "')'")?;
                Ok(t)
            }
            other => Err(self.error(format!("expected term, found {}", describe(&other)))),
        }
    }
}

fn describe(k: &TokenKind) -> String {
    match k {
        TokenKind::Ident(s) | TokenKind::Variable(s) => format!("'{s}'"),
        TokenKind::Integer(i) => format!("'{i}'"),
        TokenKind::Str(s) => format!("\"{s}\""),
        TokenKind::Directive(d) => format!("'#{d}'"),
        TokenKind::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(name: &str, args: &[&str]) -> Term {
        Term::func(
            name,
            args.iter()
                .map(|a| if a.starts_with(char::is_uppercase) { Term::var(a) } else { Term::sym(a) })
                .collect(),
        )
    }

    #[test]
    fn parses_normal_rule() {
        let p = parse_program("red(L) :- not green(L), light(L).").unwrap();
        let r = p.rules().next().unwrap();
        assert_eq!(r.head, Head::Disjunction(vec![HeadElement::new(atom("red", &["L"]))]));
        assert_eq!(
            r.body,
            vec![Literal::neg(atom("green", &["L"])), Literal::pos(atom("light", &["L"]))]
        );
    }

    #[test]
    fn empty_input() {
        assert!(parse_program("").unwrap().is_empty());
        assert!(parse_program("  % only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn parses_theory_head() {
        let p = parse_program("&next(&eventually(green(L))) :- push(L).").unwrap();
        let r = p.rules().next().unwrap();
        let expected = Term::theory("next", vec![Term::theory("eventually", vec![atom("green", &["L"])])]);
        assert_eq!(r.head.elements()[0].atom, expected);
    }

    #[test]
    fn parses_directives() {
        let p = parse_program(
            "#const n = 2. #external green(L) : push(L). #show green/1. #show s(X) : p(X). #show.",
        )
        .unwrap();
        assert_eq!(p.statements.len(), 5);
        assert_eq!(p.constants(), vec![("n".to_string(), Term::Integer(2))]);
        assert_eq!(p.statements[2].to_string(), "#show green/1.");
        assert_eq!(p.statements[1].to_string(), "#external green(L) : push(L).");
    }

    #[test]
    fn parses_choice_constraint_and_conditionals() {
        let p = parse_program(
            "{ a; b }. :- a, b. p :- q(X) : r(X); s. &eventually(green(L)) : light(L) :- t.",
        )
        .unwrap();
        let rules: Vec<_> = p.rules().collect();
        assert!(matches!(&rules[0].head, Head::Choice(e) if e.len() == 2));
        assert!(rules[1].head.is_constraint());
        assert!(matches!(&rules[2].body[0], Literal::Conditional { condition, .. } if condition.len() == 1));
        assert_eq!(rules[2].body.len(), 2);
        assert_eq!(rules[3].head.elements()[0].condition.len(), 1);
    }

    #[test]
    fn negative_integers_are_literals() {
        assert_eq!(parse_term("p(-2)").unwrap(), Term::func("p", vec![Term::Integer(-2)]));
        assert_eq!(parse_term("-X").unwrap(), Term::Minus(Box::new(Term::var("X"))));
    }

    #[test]
    fn arithmetic_and_ranges() {
        let t = parse_term("time(0..n)").unwrap();
        assert_eq!(
            t,
            Term::func("time", vec![Term::Range(Box::new(Term::Integer(0)), Box::new(Term::sym("n")))])
        );
        let r = parse_program("p(T+1) :- p(T), T < n.").unwrap();
        assert_eq!(r.statements[0].to_string(), "p(T+1) :- p(T), T<n.");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_program("p :- q(.") {
            Err(Error::Parse { line: 1, col: 8, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_program("p :- q\nr.") {
            Err(Error::Parse { line: 2, col: 1, msg }) => assert!(msg.contains("'.'"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(parse_program("p(a").is_err());
        assert!(parse_program("p(a)) .").is_err());
    }

    #[test]
    fn type_blocks_are_kept_raw() {
        let src = "#type tel { subtypes: [atom] }.\np.";
        let p = parse_program(src).unwrap();
        assert_eq!(p.type_declarations(), "#type tel { subtypes: [atom] }.");
        assert_eq!(p.rules().count(), 1);
    }

    #[test]
    fn rule_display_round_trips() {
        for src in [
            "red(L) :- not green(L), light(L).",
            "&next(&eventually(green(L))) :- push(L).",
            "a | b.",
            "{ a; b } :- c.",
            ":- &initial, not &eventually(&star(&seq(green(l1),red(l1))),&final).",
            "p :- q(X): r(X); s.",
        ] {
            let p = parse_program(src).unwrap();
            let printed = p.to_string();
            assert_eq!(parse_program(&printed).unwrap(), p, "{printed}");
        }
    }
}
