use std::collections::BTreeSet;

use ringrep::dlgeom::{gram, gram_check, span_check, DlContext, Variety};
use ringrep::torus::{predicted_gram, transport, weyl_cosets};

fn context(q: u64) -> DlContext {
    DlContext::new(q).unwrap()
}

#[test]
fn xtil_pieces_follow_the_itemization() {
    for q in [2, 3] {
        let ctx = context(q);
        for row in ctx.xtil_itemization().unwrap() {
            assert!(row.pass, "q={q} {row:?}");
        }
        let (sum, total) = ctx.isotypic_dimensions(Variety::Xtil).unwrap();
        assert_eq!((sum, total), ((q.pow(4) - q * q) as i64, (q.pow(4) - q * q) as i64));
    }
}

#[test]
fn xtil_prime_pieces() {
    let ctx = context(3);
    let xp = ctx.xtil_prime().unwrap();
    let gamma = ctx.gamma(Variety::XtilPrime).unwrap();
    let shifts: Vec<usize> = (0..xp.gamma_elements.len()).filter(|&i| xp.gamma_elements[i].sign == 1).collect();
    let pieces = ctx.assemble_all(Variety::XtilPrime).unwrap();
    assert_eq!(pieces.len(), 6);
    let degrees = ctx.table.table.degrees();
    let mut seen = BTreeSet::new();
    for vc in &pieces {
        if gamma.trivial_on(&vc.character, &shifts) {
            // Functions on (c0, d0) up to sign: pulled back from SL_2(F_3).
            assert!(vc.as_signed_irreducible().is_none());
            assert_eq!(vc.degree(), 4);
        } else {
            let (sign, index) = vc.as_signed_irreducible().expect("irreducible");
            assert_eq!((sign, degrees[index]), (1, 4));
            assert!(seen.insert(index));
        }
    }
    assert_eq!(seen.len(), 4);
    let trivial = pieces.iter().find(|vc| gamma.is_trivial(&vc.character)).unwrap();
    let one = ctx
        .table
        .table
        .irreducibles
        .iter()
        .position(|chi| chi.values.iter().all(|v| v.as_integer() == Some(1.into())))
        .unwrap();
    assert_eq!(trivial.multiplicities[one], 1);
    let (sum, total) = ctx.isotypic_dimensions(Variety::XtilPrime).unwrap();
    assert_eq!((sum, total), (24, 24));
}

#[test]
fn xtilpp_matches_signed_itemization() {
    for q in [2, 3] {
        let ctx = context(q);
        for row in ctx.xtilpp_itemization().unwrap() {
            assert!(row.pass, "q={q} {row:?}");
        }
        let total: i64 = ctx.assemble_all(Variety::XtilPp).unwrap().iter().map(|v| v.degree()).sum();
        let id = ctx.gamma(Variety::XtilPp).unwrap().identity();
        assert_eq!(total, ctx.lefschetz().unwrap()[0][id]);
    }
}

#[test]
fn regular_nonsplit_characters_give_discrete_series() {
    let ctx = context(3);
    let ns = &ctx.nonsplit;
    let cosets = weyl_cosets(ns, ns).unwrap();
    let regular: Vec<_> = ns.characters().into_iter().filter(|c| ns.is_regular(c).unwrap()).collect();
    assert_eq!(regular.len(), 8);
    let rs: Vec<_> = regular.iter().map(|c| ctx.assemble(Variety::XtilPp, c).unwrap()).collect();
    let mut irreducibles = BTreeSet::new();
    for (theta, vc) in regular.iter().zip(&rs) {
        let stabilizer = cosets.iter().filter(|w| transport(ns, ns, w, theta).unwrap() == *theta).count();
        assert_eq!(stabilizer, 1);
        let (_, index) = vc.as_signed_irreducible().unwrap();
        assert_eq!(ctx.table.table.degrees()[index], 6);
        irreducibles.insert(index);
    }
    assert_eq!(irreducibles.len(), 4);
    let g = gram(&rs);
    for (i, a) in regular.iter().enumerate() {
        for (j, b) in regular.iter().enumerate() {
            assert_eq!(g[i][j], predicted_gram(ns, a, ns, b).unwrap() as i64);
        }
    }
}

#[test]
fn span_at_two() {
    let ctx = context(2);
    let rep = span_check(&ctx).unwrap();
    assert_eq!((rep.family_size, rep.num_irreducibles), (10, 10));
    assert!(rep.rank <= 10);
    // Every irreducible outside the family's support is also outside its span.
    for i in &rep.outside {
        assert!(rep.not_in_span.contains(i));
    }
    assert_eq!(rep.regular_solution.is_some(), rep.not_in_span.is_empty());
}

#[test]
fn inequivalent_pairs_are_orthogonal() {
    for (q, pairs) in [(2, 32), (3, 208)] {
        let rep = gram_check(&context(q), 4).unwrap();
        assert!(rep.pass(), "q={q} {:?} {:?}", rep.predicted_mismatches, rep.nonorthogonal);
        assert_eq!(rep.nonequivalent_pairs, pairs);
        for (i, m) in rep.members.iter().enumerate() {
            assert!(rep.matrix[i][i] > 0, "{m:?}");
        }
    }
}

#[test]
fn xtil_prime_itemization_reports_the_reducible_pieces() {
    let ctx = context(3);
    let rows = ctx.xtil_prime_itemization().unwrap();
    assert_eq!(rows.len(), 6);
    let failing: Vec<_> = rows.iter().filter(|r| !r.pass).map(|r| r.found.clone()).collect();
    assert_eq!(failing.len(), 2);
    let mut failing = failing;
    failing.sort();
    assert_eq!(failing, vec![vec![1, 3], vec![2, 2]]);
}
