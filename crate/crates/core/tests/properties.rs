use proptest::prelude::*;

use qtl::algebra::{bracket, AlgebraKind, BasisKey, GradedElement};
use qtl::cohomology::closed_form_cocycle;
use qtl::lattice::{LatticeVector, NormalFormSpec, QuantumTorus, RootOfUnity};
use qtl::scalar::{Formal, GammaScalar, Scalar};
use qtl::symmetry::{CanonicalAutomorphism, Character};

fn torus(which: usize) -> QuantumTorus {
    let (d, z, orders) = match which {
        0 => (2, 1, vec![2, 2]),
        1 => (2, 1, vec![3, 3]),
        _ => (3, 1, vec![3, 3, 1]),
    };
    QuantumTorus::from_normal_form(NormalFormSpec::new(d, z, orders).unwrap())
}

fn point(d: usize, r: i64) -> impl Strategy<Value = LatticeVector> {
    prop::collection::vec(-r..=r, d).prop_map(LatticeVector::new)
}

fn nonzero(d: usize) -> impl Strategy<Value = LatticeVector> {
    point(d, 3).prop_filter("nonzero", |m| !m.is_zero())
}

/// a/b + ζ_6^e (γ|m)/(γ|m').
fn scalar() -> impl Strategy<Value = GammaScalar> {
    (-5i64..=5, 1i64..=4, 0i64..6, point(2, 2), nonzero(2)).prop_map(|(a, b, e, m, m2)| {
        GammaScalar::ratio(a, b).plus(
            &GammaScalar::root(RootOfUnity::new(6, e))
                .times(&GammaScalar::inner(&m))
                .try_div(&GammaScalar::inner(&m2))
                .unwrap(),
        )
    })
}

/// Products of roots and ratios of linear forms: always invertible.
fn unit() -> impl Strategy<Value = GammaScalar> {
    (1i64..=5, 0i64..6, nonzero(2), nonzero(2))
        .prop_map(|(a, e, m, m2)| {
            GammaScalar::from_integer(a)
                .times(&GammaScalar::root(RootOfUnity::new(6, e)))
                .times(&GammaScalar::inner(&m))
                .try_div(&GammaScalar::inner(&m2))
                .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(x in scalar(), y in scalar(), z in scalar(), u in unit()) {
        prop_assert_eq!(x.plus(&y).plus(&z), x.plus(&y.plus(&z)));
        prop_assert_eq!(x.times(&y).times(&z), x.times(&y.times(&z)));
        prop_assert_eq!(x.times(&y.plus(&z)), x.times(&y).plus(&x.times(&z)));
        prop_assert_eq!(x.times(&y), y.times(&x));
        prop_assert_eq!(x.minus(&x), GammaScalar::zero());
        prop_assert_eq!(x.times(&u).try_div(&u).unwrap(), x.clone());
        prop_assert_eq!(GammaScalar::one().try_div(&u).unwrap().times(&u), GammaScalar::one());
    }

    #[test]
    fn sigma_is_a_bicharacter(w in 0usize..3, a in point(3, 4), b in point(3, 4), c in point(3, 4)) {
        let t = torus(w);
        let d = t.d();
        let cut = |p: &LatticeVector| LatticeVector::new(p.coords()[..d].iter().copied());
        let (a, b, c) = (cut(&a), cut(&b), cut(&c));
        let s = |x: &LatticeVector, y: &LatticeVector| t.sigma(x, y).unwrap().reduced();
        prop_assert_eq!(s(&(&a + &b), &c), s(&a, &c).mul(&s(&b, &c)).reduced());
        prop_assert_eq!(s(&a, &(&b + &c)), s(&a, &b).mul(&s(&a, &c)).reduced());
        prop_assert!(s(&a, &LatticeVector::zero(d)).is_one());
        if t.radical_contains(&a) {
            prop_assert!(s(&a, &b).is_one());
            prop_assert!(s(&b, &a).is_one());
        }
    }

    #[test]
    fn brackets_are_antisymmetric(w in 0usize..3, a in point(3, 2), b in point(3, 2), i in 0usize..3, j in 0usize..3) {
        let t = torus(w);
        let d = t.d();
        let cut = |p: &LatticeVector| LatticeVector::new(p.coords()[..d].iter().copied());
        let (a, b) = (cut(&a), cut(&b));
        for kind in [AlgebraKind::G, AlgebraKind::Ext] {
            let x = GradedElement::basis(&t, kind, BasisKey::L(a.clone())).unwrap();
            let y = GradedElement::basis(&t, kind, BasisKey::L(b.clone())).unwrap();
            let xy = bracket(&t, &x, &y).unwrap();
            let yx = bracket(&t, &y, &x).unwrap();
            prop_assert!(xy.add(&yx).unwrap().is_zero());
        }
        let key = |m: &LatticeVector, k: usize| {
            if t.radical_contains(m) { BasisKey::T(m.clone(), k % d) } else { BasisKey::Ad(m.clone()) }
        };
        let x = GradedElement::basis(&t, AlgebraKind::DerQT, key(&a, i)).unwrap();
        let y = GradedElement::basis(&t, AlgebraKind::DerQT, key(&b, j)).unwrap();
        prop_assert!(bracket(&t, &x, &y).unwrap().add(&bracket(&t, &y, &x).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn cocycles_are_antisymmetric(w in 0usize..3, a in point(3, 4), b in point(3, 4)) {
        let t = torus(w);
        let d = t.d();
        let cut = |p: &LatticeVector| LatticeVector::new(p.coords()[..d].iter().copied());
        let (a, b) = (cut(&a), cut(&b));
        let c = closed_form_cocycle(&t, GammaScalar::one(), GammaScalar::from_integer(3)).unwrap();
        let ab = c.value(&Formal, &t, &a, &b).unwrap();
        let ba = c.value(&Formal, &t, &b, &a).unwrap();
        prop_assert_eq!(ab.plus(&ba), GammaScalar::zero());
        let minus_b = -&b;
        let same = c.value(&Formal, &t, &b, &minus_b).unwrap();
        prop_assert_eq!(same, c.diagonal(&Formal, &t, &b).unwrap());
    }

    #[test]
    fn automorphism_group_laws(e in prop::collection::vec(0i64..3, 2), f in prop::collection::vec(0i64..3, 2), l in prop::bool::ANY, l2 in prop::bool::ANY) {
        let make = |e: &[i64], l: bool| {
            let roots: Vec<_> = e.iter().map(|&c| RootOfUnity::new(3, c)).collect();
            CanonicalAutomorphism::new(if l { 1 } else { -1 }, Character::from_roots(&roots)).unwrap()
        };
        let a = make(&e, l);
        let b = make(&f, l2);
        let id = CanonicalAutomorphism::identity(2);
        prop_assert_eq!(a.then(&a.inverse().unwrap()).unwrap(), id.clone());
        prop_assert_eq!(a.inverse().unwrap().then(&a).unwrap(), id);
        let t = torus(1);
        let x = GradedElement::l(&t, &[1, 2]).unwrap();
        let composed = a.then(&b).unwrap().apply(&t, &x).unwrap();
        prop_assert_eq!(composed, b.apply(&t, &a.apply(&t, &x).unwrap()).unwrap());
    }
}
