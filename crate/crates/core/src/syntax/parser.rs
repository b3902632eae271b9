use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::lexer::{tokenize, Tok, Token};
use super::{Clause, SourceProgram, Span, SyntaxError};
use crate::term::{ArithOp, Formula, Prim, PrimOp, Term, Var, VarGen};

pub(super) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    gen: VarGen,
    scope: BTreeMap<String, Var>,
}

impl Parser {
    pub(super) fn new(text: &str) -> Result<Self, SyntaxError> {
        let toks = tokenize(text).map_err(|e| SyntaxError::Char {
            line: e.line,
            col: e.col,
            ch: e.ch,
        })?;
        Ok(Parser {
            toks,
            pos: 0,
            gen: VarGen::new(),
            scope: BTreeMap::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> Span {
        let t = &self.toks[self.pos];
        Span {
            line: t.line,
            col: t.col,
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, SyntaxError> {
        let sp = self.here();
        Err(SyntaxError::Unexpected {
            line: sp.line,
            col: sp.col,
            expected: expected.to_string(),
            found: self.peek().describe(),
        })
    }

    fn invalid<T>(&self, at: Span, message: String) -> Result<T, SyntaxError> {
        Err(SyntaxError::Invalid {
            line: at.line,
            col: at.col,
            message,
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(what)
        }
    }

    fn is_name(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == s)
    }

    pub(super) fn program(&mut self) -> Result<SourceProgram, SyntaxError> {
        let mut clauses: Vec<Clause> = Vec::new();
        let mut seen: BTreeMap<(Arc<str>, usize), Span> = BTreeMap::new();
        while *self.peek() != Tok::Eof {
            let clause = self.clause()?;
            let key = (clause.name.clone(), clause.params.len());
            if let Some(first) = seen.get(&key) {
                return Err(SyntaxError::Duplicate {
                    name: clause.name.to_string(),
                    arity: clause.params.len(),
                    line: clause.span.line,
                    col: clause.span.col,
                    first_line: first.line,
                    first_col: first.col,
                });
            }
            seen.insert(key, clause.span);
            clauses.push(clause);
        }
        Ok(SourceProgram {
            file: None,
            clauses,
        })
    }

    fn clause(&mut self) -> Result<Clause, SyntaxError> {
        self.scope.clear();
        let span = self.here();
        let name = match self.peek().clone() {
            Tok::Name(n) if !is_keyword(&n) => n,
            _ => return self.unexpected("clause head"),
        };
        self.bump();
        let params = if *self.peek() == Tok::LParen {
            self.bump();
            let ts = self.term_list()?;
            self.expect(Tok::RParen, "`)` or `,`")?;
            ts
        } else {
            Vec::new()
        };
        let body = if *self.peek() == Tok::Neck {
            self.bump();
            self.formula()?
        } else {
            Formula::True
        };
        self.expect(Tok::Dot, "`.`")?;
        Ok(Clause {
            name: Arc::from(name.as_str()),
            params,
            body,
            span,
        })
    }

    /// A goal formula terminated by `.` and end of input.
    pub(super) fn goal(&mut self) -> Result<Formula, SyntaxError> {
        self.scope.clear();
        let f = self.formula()?;
        self.expect(Tok::Dot, "`.`")?;
        if *self.peek() != Tok::Eof {
            return self.unexpected("end of input");
        }
        Ok(f)
    }

    pub(super) fn term_only(&mut self) -> Result<Term, SyntaxError> {
        let t = self.expr()?;
        if *self.peek() != Tok::Eof {
            return self.unexpected("end of input");
        }
        Ok(t)
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let left = self.conj()?;
        if self.is_name("or") {
            self.bump();
            let right = self.formula()?;
            return Ok(Formula::or(left, right));
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<Formula, SyntaxError> {
        let left = self.atom()?;
        if *self.peek() == Tok::Amp {
            self.bump();
            let right = self.conj()?;
            return Ok(Formula::and(left, right));
        }
        Ok(left)
    }

    fn atom(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::LParen => {
                let saved = (self.pos, self.gen.clone(), self.scope.clone());
                self.bump();
                let attempt = self.formula().and_then(|f| {
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(f)
                });
                match attempt {
                    Ok(f) if !self.at_operator() => Ok(f),
                    _ => {
                        (self.pos, self.gen, self.scope) = saved;
                        self.term_constraint()
                    }
                }
            }
            Tok::Name(n) => {
                let next_is_paren = *self.peek_at(1) == Tok::LParen;
                match n.as_str() {
                    "true" if !self.operator_at(1) => {
                        self.bump();
                        Ok(Formula::True)
                    }
                    "false" if !self.operator_at(1) => {
                        self.bump();
                        Ok(Formula::False)
                    }
                    "delay" if next_is_paren => self.delay(),
                    "foreach" if next_is_paren => self.foreach(),
                    _ => {
                        if let Some(op) = PrimOp::from_prefix_name(&n) {
                            if next_is_paren && op != PrimOp::Foreach {
                                return self.prefix_prim(op);
                            }
                        }
                        if is_keyword(&n) && !matches!(n.as_str(), "true" | "false" | "ris") {
                            return self.unexpected("constraint or clause call");
                        }
                        let start = self.pos;
                        let t = self.expr()?;
                        if self.at_infix() {
                            return self.finish_constraint(t);
                        }
                        match t {
                            Term::Atom(name) => Ok(Formula::Call(name, Vec::new())),
                            Term::Ctor(name, args) => Ok(Formula::Call(name, args)),
                            _ => {
                                let sp = Span {
                                    line: self.toks[start].line,
                                    col: self.toks[start].col,
                                };
                                self.invalid(sp, "expected a constraint or clause call".into())
                            }
                        }
                    }
                }
            }
            _ => self.term_constraint(),
        }
    }

    fn operator_at(&self, n: usize) -> bool {
        is_infix_tok(self.peek_at(n)) || is_arith_tok(self.peek_at(n))
    }

    fn at_operator(&self) -> bool {
        self.operator_at(0)
    }

    fn at_infix(&self) -> bool {
        is_infix_tok(self.peek())
    }

    fn term_constraint(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.expr()?;
        self.finish_constraint(lhs)
    }

    fn finish_constraint(&mut self, lhs: Term) -> Result<Formula, SyntaxError> {
        let op = match self.peek() {
            Tok::Eq => PrimOp::Eq,
            Tok::Lt => PrimOp::Lt,
            Tok::Le => PrimOp::Le,
            Tok::Gt => PrimOp::Gt,
            Tok::Ge => PrimOp::Ge,
            Tok::Name(n) if n == "neq" => PrimOp::Neq,
            Tok::Name(n) if n == "in" => PrimOp::In,
            Tok::Name(n) if n == "nin" => PrimOp::Nin,
            _ => return self.unexpected("constraint operator"),
        };
        self.bump();
        let rhs = self.expr()?;
        Ok(Formula::Prim(Prim::new(op, vec![lhs, rhs])))
    }

    fn prefix_prim(&mut self, op: PrimOp) -> Result<Formula, SyntaxError> {
        let at = self.here();
        self.bump();
        self.expect(Tok::LParen, "`(`")?;
        let args = self.term_list()?;
        self.expect(Tok::RParen, "`)` or `,`")?;
        if args.len() != op.arity() {
            return self.invalid(
                at,
                format!(
                    "`{}` expects {} arguments, found {}",
                    op.name(),
                    op.arity(),
                    args.len()
                ),
            );
        }
        Ok(Formula::Prim(Prim::new(op, args)))
    }

    fn delay(&mut self) -> Result<Formula, SyntaxError> {
        self.bump();
        self.expect(Tok::LParen, "`(`")?;
        let g = self.formula()?;
        self.expect(Tok::Comma, "`,`")?;
        if !self.is_name("false") {
            return self.unexpected("`false` (the only supported delay condition)");
        }
        self.bump();
        self.expect(Tok::RParen, "`)`")?;
        Ok(Formula::Delayed(Box::new(g)))
    }

    fn foreach(&mut self) -> Result<Formula, SyntaxError> {
        self.bump();
        self.expect(Tok::LParen, "`(`")?;
        let ris = self.ris_body()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(Formula::Prim(Prim::new(PrimOp::Foreach, vec![ris])))
    }

    /// `VAR in domain, filter`, shared by `ris(...)` and `foreach(...)`.
    fn ris_body(&mut self) -> Result<Term, SyntaxError> {
        let name = match self.peek().clone() {
            Tok::Var(v) if v != "_" => v,
            _ => return self.unexpected("bound variable"),
        };
        self.bump();
        if !self.is_name("in") {
            return self.unexpected("`in`");
        }
        self.bump();
        let at = self.here();
        let domain = self.expr()?;
        if !domain.is_set_positioned() {
            return self.invalid(at, "domain must be a set term or variable".into());
        }
        self.expect(Tok::Comma, "`,`")?;
        let bound = self.gen.named(&name);
        let shadowed = self.scope.insert(name.clone(), bound.clone());
        let filter = self.formula();
        match shadowed {
            Some(v) => self.scope.insert(name, v),
            None => self.scope.remove(&name),
        };
        Ok(Term::ris(bound, domain, filter?))
    }

    fn term_list(&mut self) -> Result<Vec<Term>, SyntaxError> {
        let mut out = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<Term, SyntaxError> {
        let mut left = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.product()?;
            left = Term::arith(op, left, right);
        }
    }

    fn product(&mut self) -> Result<Term, SyntaxError> {
        let mut left = self.primary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let right = self.primary()?;
            left = Term::arith(ArithOp::Mul, left, right);
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<Term, SyntaxError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                if v == "_" {
                    return Ok(Term::Var(self.gen.fresh("G")));
                }
                if let Some(var) = self.scope.get(&v) {
                    return Ok(Term::Var(var.clone()));
                }
                let var = self.gen.named(&v);
                self.scope.insert(v, var.clone());
                Ok(Term::Var(var))
            }
            Tok::Int(i) => {
                self.bump();
                Ok(Term::Int(i))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(i) => {
                        self.bump();
                        Ok(Term::Int(-i))
                    }
                    _ => self.unexpected("integer after `-`"),
                }
            }
            Tok::Name(n) => {
                if is_keyword(&n) && n != "ris" && n != "true" && n != "false" {
                    return self.unexpected("term");
                }
                self.bump();
                if *self.peek() != Tok::LParen {
                    if n == "ris" {
                        return self.unexpected("`(`");
                    }
                    return Ok(Term::Atom(Arc::from(n.as_str())));
                }
                self.bump();
                if n == "ris" {
                    let r = self.ris_body()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(r);
                }
                let args = self.term_list()?;
                self.expect(Tok::RParen, "`)` or `,`")?;
                Ok(Term::Ctor(Arc::from(n.as_str()), args))
            }
            Tok::LBrack => {
                self.bump();
                let items = self.term_list()?;
                self.expect(Tok::RBrack, "`]` or `,`")?;
                if items.len() < 2 {
                    return self.invalid(at, "tuples need at least two components".into());
                }
                Ok(Term::Tuple(items))
            }
            Tok::LBrace => {
                self.bump();
                if *self.peek() == Tok::RBrace {
                    self.bump();
                    return Ok(Term::Empty);
                }
                let elems = self.term_list()?;
                let tail = if *self.peek() == Tok::Slash {
                    self.bump();
                    let rest_at = self.here();
                    let rest = self.expr()?;
                    if !rest.is_set_positioned() {
                        return self.invalid(
                            rest_at,
                            "rest of a set must be `{}`, a variable, a set or a ris".into(),
                        );
                    }
                    rest
                } else {
                    Term::Empty
                };
                self.expect(Tok::RBrace, "`}`, `,` or `/`")?;
                Ok(Term::set_with_tail(elems, tail))
            }
            Tok::LParen => {
                self.bump();
                let t = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => self.unexpected("term"),
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s,
        "or" | "in" | "nin" | "neq" | "ris" | "delay" | "true" | "false" | "foreach"
    )
}

fn is_infix_tok(t: &Tok) -> bool {
    match t {
        Tok::Eq | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge => true,
        Tok::Name(n) => matches!(n.as_str(), "neq" | "in" | "nin"),
        _ => false,
    }
}

fn is_arith_tok(t: &Tok) -> bool {
    matches!(t, Tok::Plus | Tok::Minus | Tok::Star)
}
