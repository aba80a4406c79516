use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use qform_codes::code::{Code, Method};
use qform_codes::cyclotomic::CycInt;
use qform_codes::field::{Field, Fx};
use qform_codes::qform::{count_on_subspace, CountMethod, FormSpec};
use qform_codes::subspaces::{Pairing, Subspace};

const SHAPES: [(u32, usize); 5] = [(3, 3), (5, 2), (7, 2), (3, 4), (5, 3)];

fn fields() -> &'static Vec<Arc<Field>> {
    static F: OnceLock<Vec<Arc<Field>>> = OnceLock::new();
    F.get_or_init(|| SHAPES.iter().map(|&(p, e)| Arc::new(Field::new(p, e).unwrap())).collect())
}

fn field_and(n: usize) -> impl Strategy<Value = (Arc<Field>, Vec<Fx>)> {
    (0..SHAPES.len()).prop_flat_map(move |i| {
        let f = fields()[i].clone();
        let q = f.q();
        (Just(f), proptest::collection::vec((0..q).prop_map(Fx::from_index), n))
    })
}

fn nondegenerate_form() -> impl Strategy<Value = FormSpec> {
    field_and(5).prop_filter_map("degenerate", |(f, xs)| {
        let coeffs = xs[..f.e()].to_vec();
        FormSpec::new(f, coeffs).ok().filter(FormSpec::is_nondegenerate)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_is_a_commutative_ring_with_inverses((f, xs) in field_and(3)) {
        let (a, b, c) = (xs[0], xs[1], xs[2]);
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        }
    }

    #[test]
    fn frobenius_and_trace((f, xs) in field_and(2)) {
        let (a, b) = (xs[0], xs[1]);
        prop_assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
        prop_assert_eq!(f.frobenius(f.mul(a, b), 1), f.mul(f.frobenius(a, 1), f.frobenius(b, 1)));
        prop_assert_eq!(f.frobenius(a, f.e()), a);
        prop_assert_eq!(f.trace(f.add(a, b)), (f.trace(a) + f.trace(b)) % f.p());
        prop_assert_eq!(f.trace(f.frobenius(a, 1)), f.trace(a));
        prop_assert!(f.in_prime_subfield(f.constant(f.trace(a) as i64)));
    }

    #[test]
    fn span_is_canonical((f, xs) in field_and(3), k in 1u32..5) {
        let (p, e) = (f.p(), f.e());
        let gens: Vec<Vec<u32>> = xs.iter().map(|&x| f.coords(x)).collect();
        let h = Subspace::span(p, e, &gens);
        let mixed: Vec<u32> = (0..e).map(|i| (gens[0][i] + k * gens[1][i]) % p).collect();
        let again = Subspace::span(p, e, &[gens[2].clone(), mixed, gens[1].clone()]);
        prop_assert_eq!(&h, &again);
        let pairing = Pairing::trace(&f, 1);
        let d = h.dual(&pairing);
        prop_assert_eq!(d.dim(), e - h.dim());
        prop_assert_eq!(&d.dual(&pairing), &h);
        prop_assert_eq!(h.elements().count() as u128, h.size());
    }

    #[test]
    fn galois_action_is_a_ring_map(p in prop::sample::select(vec![3u32, 5, 7, 11]), a in proptest::collection::vec(-4i64..5, 11), b in proptest::collection::vec(-4i64..5, 11), z in 1i64..11) {
        prop_assume!(z % p as i64 != 0);
        let x = CycInt::from_exponent_counts(p, &a[..p as usize]);
        let y = CycInt::from_exponent_counts(p, &b[..p as usize]);
        prop_assert_eq!((&x * &y).galois(z).unwrap(), &x.galois(z).unwrap() * &y.galois(z).unwrap());
        prop_assert_eq!((&x + &y).galois(z).unwrap(), &x.galois(z).unwrap() + &y.galois(z).unwrap());
        prop_assert_eq!(x.galois(1).unwrap(), x);
    }

    #[test]
    fn subspace_counts_match(form in nondegenerate_form(), xs in proptest::collection::vec(0usize..1 << 16, 2), a in 0u32..7) {
        let f = form.field().clone();
        let gens: Vec<Vec<u32>> = xs.iter().map(|&x| f.coords(Fx::from_index(x % f.q()))).collect();
        let h = Subspace::span(f.p(), f.e(), &gens);
        let a = a % f.p();
        prop_assert_eq!(
            count_on_subspace(&form, &h, a, CountMethod::Formula).unwrap(),
            count_on_subspace(&form, &h, a, CountMethod::Oracle).unwrap()
        );
    }

    #[test]
    fn codeword_weight_formula_matches_count(form in nondegenerate_form(), alpha in 1usize..1 << 16, u in 0usize..1 << 16, v in 0usize..1 << 16) {
        let f = form.field().clone();
        prop_assume!(f.e() >= 2 && f.q() <= 125);
        let q = f.q();
        let alpha = Fx::from_index(1 + alpha % (q - 1));
        let (u, v) = (Fx::from_index(u % q), Fx::from_index(v % q));
        prop_assume!(!(u.is_zero() && v.is_zero()));
        let code = Code::new(form, alpha).unwrap();
        prop_assert_eq!(code.codeword_weight(u, v, Method::Formula).unwrap(), code.codeword_weight(u, v, Method::Enumerate).unwrap());
    }
}
