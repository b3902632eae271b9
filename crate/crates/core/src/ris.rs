//! Restricted intensional sets and restricted universal quantification.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::term::{Formula, PrimOp, Ris, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RisError {
    #[error("clause call inside the filter of `{0}`")]
    CallInFilter(Term),
    #[error("filter `{0}` has no expression with negated constraints")]
    UnsupportedNegation(Formula),
}

/// `φ[bound := x]`.
pub fn instantiate(r: &Ris, x: &Term) -> Result<Formula, RisError> {
    if r.filter.has_call() {
        return Err(RisError::CallInFilter(Term::Ris(alloc::boxed::Box::new(
            r.clone(),
        ))));
    }
    let map: BTreeMap<_, _> = [(r.bound.clone(), x.clone())].into_iter().collect();
    Ok(r.filter.rename(&map))
}

/// `¬φ[bound := x]`.
pub fn instantiate_negated(r: &Ris, x: &Term) -> Result<Formula, RisError> {
    let f = instantiate(r, x)?;
    f.negate()
        .ok_or(RisError::UnsupportedNegation(r.filter.clone()))
}

/// `x in ris(X in A, φ)` as `x in A & φ[x]`.
pub fn member(x: &Term, r: &Ris) -> Result<Formula, RisError> {
    Ok(Formula::and(
        Formula::prim(PrimOp::In, vec![x.clone(), r.domain.clone()]),
        instantiate(r, x)?,
    ))
}

/// `x nin ris(X in A, φ)` as `x nin A or (x in A & ¬φ[x])`.
pub fn non_member(x: &Term, r: &Ris) -> Result<Formula, RisError> {
    Ok(Formula::or(
        Formula::prim(PrimOp::Nin, vec![x.clone(), r.domain.clone()]),
        Formula::and(
            Formula::prim(PrimOp::In, vec![x.clone(), r.domain.clone()]),
            instantiate_negated(r, x)?,
        ),
    ))
}

/// `foreach(X in A, φ)` as `subset(A, ris(X in A, φ))`.
pub fn foreach_expand(r: &Ris) -> Formula {
    Formula::prim(
        PrimOp::Subset,
        vec![
            r.domain.clone(),
            Term::Ris(alloc::boxed::Box::new(r.clone())),
        ],
    )
}

/// A RIS whose domain bottoms out in a variable.
pub fn is_variable_like(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::Ris(r) => is_variable_like(&r.domain),
        _ => false,
    }
}

/// One unfolding step of a RIS whose domain is `{}` or `{d / D}`.
///
/// Returns alternatives `(condition, replacement)`; `None` when the domain is
/// variable-like or not a set.
pub fn unfold(t: &Term) -> Option<Result<Vec<(Formula, Term)>, RisError>> {
    let Term::Ris(r) = t else { return None };
    if let Some(inner) = unfold(&r.domain) {
        // Unfold the domain first and rebuild around each alternative.
        return Some(inner.map(|alts| {
            alts.into_iter()
                .map(|(cond, dom)| (cond, Term::ris(r.bound.clone(), dom, r.filter.clone())))
                .collect()
        }));
    }
    match &r.domain {
        Term::Empty => Some(Ok(vec![(Formula::True, Term::Empty)])),
        Term::SetCons(d, rest) => {
            let step = || -> Result<Vec<(Formula, Term)>, RisError> {
                let shrunk = Term::ris(r.bound.clone(), (**rest).clone(), r.filter.clone());
                Ok(vec![
                    (
                        instantiate(r, d)?,
                        Term::cons((**d).clone(), shrunk.clone()),
                    ),
                    (instantiate_negated(r, d)?, shrunk),
                ])
            };
            Some(step())
        }
        _ => None,
    }
}

/// Like [`unfold`] but also looks at the tail of an extensional chain.
pub fn unfold_in_tail(t: &Term) -> Option<Result<Vec<(Formula, Term)>, RisError>> {
    match t {
        Term::SetCons(e, rest) => unfold_in_tail(rest).map(|alts| {
            alts.map(|v| {
                v.into_iter()
                    .map(|(c, r)| (c, Term::cons((**e).clone(), r)))
                    .collect()
            })
        }),
        _ => unfold(t),
    }
}

/// True when the extensional chain ends in a RIS.
pub fn has_ris_tail(t: &Term) -> bool {
    matches!(t.set_parts().1, Term::Ris(_))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground;
    use crate::syntax::{parse_goal, parse_term};

    fn ris(s: &str) -> Ris {
        match parse_term(s).unwrap() {
            Term::Ris(r) => *r,
            other => panic!("{other}"),
        }
    }

    #[test]
    fn membership_instantiates_filter() {
        let r = ris("ris(X in {1,2,3}, 1 < X)");
        let f = member(&Term::int(2), &r).unwrap();
        assert_eq!(ground::eval_formula(&f), Some(true));
        let f = member(&Term::int(1), &r).unwrap();
        assert_eq!(ground::eval_formula(&f), Some(false));
    }

    #[test]
    fn non_membership_needs_negatable_filter() {
        let g = parse_goal("Y nin ris(X in {1}, p(X)).").unwrap();
        let Formula::Prim(p) = g else { panic!() };
        let Term::Ris(r) = &p.args[1] else { panic!() };
        assert!(matches!(
            non_member(&p.args[0], r),
            Err(RisError::CallInFilter(_))
        ));
    }

    #[test]
    fn unfold_splits_on_first_element() {
        let t = parse_term("ris(X in {1,2}, 0 < X)").unwrap();
        let alts = unfold(&t).unwrap().unwrap();
        assert_eq!(alts.len(), 2);
        assert_eq!(alts[0].0.to_string(), "0 < 1");
        assert_eq!(alts[1].0.to_string(), "0 >= 1");
        assert!(unfold(&parse_term("ris(X in D, 0 < X)").unwrap()).is_none());
    }

    #[test]
    fn empty_domain_unfolds_to_empty() {
        let t = parse_term("ris(X in {}, false)").unwrap();
        assert_eq!(
            unfold(&t).unwrap().unwrap(),
            vec![(Formula::True, Term::Empty)]
        );
    }

    #[test]
    fn foreach_is_subset_of_ris() {
        let r = ris("ris(X in {1,2}, 0 < X)");
        assert_eq!(
            foreach_expand(&r).to_string(),
            "subset({1,2},ris(X in {1,2}, 0 < X))"
        );
    }
}
