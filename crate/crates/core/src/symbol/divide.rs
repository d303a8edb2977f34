use super::DiffOp;
use crate::error::{Error, Result};

/// Outcome of [`DiffOp::exact_divide`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Division {
    /// `numerator = quotient · divisor` exactly.
    Exact(DiffOp),
    /// The quotient is not a polynomial operator.
    NotDivisible,
}

impl Division {
    pub fn quotient(&self) -> Option<&DiffOp> {
        match self {
            Division::Exact(q) => Some(q),
            Division::NotDivisible => None,
        }
    }
}

/// Division by a single polynomial under the lexicographic term order.
///
/// If `d | n` then every intermediate remainder is a multiple of `d`, so its
/// leading monomial is divisible by `LM(d)`; the first non-divisible leading
/// monomial therefore certifies `d ∤ n`.
pub(super) fn exact_divide(n: &DiffOp, d: &DiffOp) -> Result<Division> {
    let (lead_idx, lead_c) = match d.leading_term() {
        Some((i, c)) => (*i, c.clone()),
        None => return Err(Error::ZeroDivisor),
    };
    let inv_lead = lead_c.recip();
    let mut rem = n.clone();
    let mut quotient = DiffOp::zero(n.dim());
    while let Some((ri, rc)) = rem.leading_term().map(|(i, c)| (*i, c.clone())) {
        let Some(shift) = ri.checked_sub(&lead_idx) else {
            return Ok(Division::NotDivisible);
        };
        let c = &rc * &inv_lead;
        let step = DiffOp::monomial(n.dim(), shift, c);
        rem = rem.sub(&step.mul(d)?)?;
        quotient = quotient.add(&step)?;
        debug_assert!(rem.leading_term().map(|(i, _)| *i < ri).unwrap_or(true));
    }
    Ok(Division::Exact(quotient))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{Coeff, MultiIndex};
    use proptest::prelude::*;

    fn op(s: &str) -> DiffOp {
        DiffOp::parse(s, 1).unwrap()
    }

    #[test]
    fn airy_pair_divides() {
        let q = op("-dt^2 + dx^6").exact_divide(&op("dt + dx^3")).unwrap();
        assert_eq!(q, Division::Exact(op("-dt + dx^3")));
    }

    #[test]
    fn dalembertian_over_telegraph_is_not_a_pdo() {
        let tel = op("dt^2 + 1/2 dt - lap");
        let box_op = DiffOp::dalembertian(1);
        assert_eq!(box_op.exact_divide(&tel).unwrap(), Division::NotDivisible);
        let tel3 = DiffOp::parse("dt^2 + 1/2 dt - lap", 3).unwrap();
        assert_eq!(DiffOp::dalembertian(3).exact_divide(&tel3).unwrap(), Division::NotDivisible);
    }

    #[test]
    fn self_division_and_zero() {
        let a = op("1/2 dt^3 + dt^2 - dx^2 - 1/4 dt dx^2");
        assert_eq!(a.exact_divide(&a).unwrap(), Division::Exact(DiffOp::identity(1)));
        assert_eq!(a.exact_divide(&DiffOp::zero(1)), Err(Error::ZeroDivisor));
        assert_eq!(DiffOp::zero(1).exact_divide(&a).unwrap(), Division::Exact(DiffOp::zero(1)));
    }

    fn small_op() -> impl Strategy<Value = DiffOp> {
        proptest::collection::vec(((0u32..3, 0u32..4), -5i64..6, 1i64..4), 1..5).prop_map(|ts| {
            DiffOp::from_terms(1, ts.into_iter().map(|((a, b), n, d)| (MultiIndex([a, b, 0, 0]), Coeff::ratio(n, d))))
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn divides_products(q in small_op(), d in small_op()) {
            prop_assume!(!d.is_zero());
            let n = q.mul(&d).unwrap();
            prop_assert_eq!(n.exact_divide(&d).unwrap(), Division::Exact(q));
        }
    }
}
