use alloc::string::{String, ToString};
use core::fmt::{self, Display, Formatter, Write};

use crate::ground;
use crate::term::{ArithOp, Formula, Prim, PrimOp, Term};

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

fn arith_prec(op: ArithOp) -> u8 {
    match op {
        ArithOp::Add | ArithOp::Sub => 1,
        ArithOp::Mul => 2,
    }
}

fn write_list(f: &mut Formatter<'_>, items: &[Term]) -> fmt::Result {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write_term(f, t, 0)?;
    }
    Ok(())
}

/// `min_prec` is the weakest arithmetic operator allowed without parentheses.
fn write_term(f: &mut Formatter<'_>, t: &Term, min_prec: u8) -> fmt::Result {
    match t {
        Term::Var(v) => f.write_str(&v.name),
        Term::Int(i) => write!(f, "{i}"),
        Term::Atom(a) => f.write_str(a),
        Term::Tuple(ts) => {
            f.write_char('[')?;
            write_list(f, ts)?;
            f.write_char(']')
        }
        Term::Ctor(n, ts) => {
            write!(f, "{n}(")?;
            write_list(f, ts)?;
            f.write_char(')')
        }
        Term::Empty => f.write_str("{}"),
        Term::SetCons(..) => {
            let (elems, tail) = t.set_parts();
            f.write_char('{')?;
            for (i, e) in elems.iter().enumerate() {
                if i > 0 {
                    f.write_char(',')?;
                }
                write_term(f, e, 0)?;
            }
            if *tail != Term::Empty {
                f.write_char('/')?;
                write_term(f, tail, 0)?;
            }
            f.write_char('}')
        }
        Term::Ris(r) => write!(f, "ris({} in {}, {})", r.bound.name, r.domain, r.filter),
        Term::Arith(op, a, b) => {
            let p = arith_prec(*op);
            let paren = p < min_prec;
            if paren {
                f.write_char('(')?;
            }
            write_term(f, a, p)?;
            write!(f, " {} ", op.symbol())?;
            write_term(f, b, p + 1)?;
            if paren {
                f.write_char(')')?;
            }
            Ok(())
        }
    }
}

impl Display for Prim {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.op == PrimOp::Foreach {
            if let [Term::Ris(r)] = self.args.as_slice() {
                return write!(f, "foreach({} in {}, {})", r.bound.name, r.domain, r.filter);
            }
        }
        if self.op.is_infix() && self.args.len() == 2 {
            return write!(f, "{} {} {}", self.args[0], self.op.name(), self.args[1]);
        }
        write!(f, "{}(", self.op.name())?;
        write_list(f, &self.args)?;
        f.write_char(')')
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

/// Levels: 0 disjunction, 1 conjunction, 2 atom.
fn write_formula(f: &mut Formatter<'_>, g: &Formula, level: u8) -> fmt::Result {
    match g {
        Formula::True => f.write_str("true"),
        Formula::False => f.write_str("false"),
        Formula::Prim(p) => write!(f, "{p}"),
        Formula::Call(n, args) => {
            f.write_str(n)?;
            if !args.is_empty() {
                f.write_char('(')?;
                write_list(f, args)?;
                f.write_char(')')?;
            }
            Ok(())
        }
        Formula::Delayed(inner) => write!(f, "delay({inner}, false)"),
        Formula::Or(a, b) => {
            if level > 0 {
                f.write_char('(')?;
            }
            write_formula(f, a, 1)?;
            f.write_str(" or ")?;
            write_formula(f, b, 0)?;
            if level > 0 {
                f.write_char(')')?;
            }
            Ok(())
        }
        Formula::And(a, b) => {
            if level > 1 {
                f.write_char('(')?;
            }
            write_formula(f, a, 2)?;
            f.write_str(" & ")?;
            write_formula(f, b, 1)?;
            if level > 1 {
                f.write_char(')')?;
            }
            Ok(())
        }
    }
}

/// Prints `t` with every fully ground set normalised (sorted, duplicates removed).
pub fn canonical_display(t: &Term) -> String {
    ground::normalize(t).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_goal, parse_term};
    use crate::term::Var;
    use alloc::vec;

    #[test]
    fn prints_sets_and_tuples() {
        assert_eq!(
            Term::set(vec![Term::int(1), Term::int(2)]).to_string(),
            "{1,2}"
        );
        assert_eq!(
            Term::pair(Term::atom("hello"), Term::atom("world")).to_string(),
            "[hello,world]"
        );
        let t = Term::ctor("goodT", vec![Term::Var(Var::new(0, "T"))]);
        assert_eq!(t.to_string(), "goodT(T)");
        let open = Term::set_with_tail(vec![Term::int(1)], Term::Var(Var::new(1, "X")));
        assert_eq!(open.to_string(), "{1/X}");
    }

    #[test]
    fn arithmetic_parentheses() {
        for s in [
            "X - (Y - Z)",
            "X - Y - Z",
            "(X + Y) * 3",
            "X + Y * 3",
            "X - -3",
        ] {
            assert_eq!(parse_term(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn formula_nesting_round_trips() {
        for s in [
            "a & b or c",
            "a & (b or c)",
            "(a & b) & c",
            "(a or b) or c",
            "un(A,B,C) & X neq {1/A}",
            "foreach(X in S, 0 < X & X =< 3)",
            "delay(p(X), false) & q",
        ] {
            let g = parse_goal(&alloc::format!("{s}.")).unwrap();
            assert_eq!(g.to_string(), s);
        }
    }

    #[test]
    fn canonical_ground_sets() {
        let t = parse_term("{3,1,[b,2],1,[a,9]}").unwrap();
        assert_eq!(canonical_display(&t), "{1,3,[a,9],[b,2]}");
    }
}
