use proptest::prelude::*;
use psigma::character::Character;
use psigma::idealedge::{blowup, build_complex, enumerate, Filter, Side};

#[test]
fn rank_three_complex_is_the_clique_complex() {
    let c = build_complex(3, Filter::All).unwrap();
    let n = c.vertex_count();
    let compat: Vec<Vec<bool>> =
        (0..n).map(|a| (0..n).map(|b| c.edges[a].compatible(&c.edges[b]).unwrap()).collect()).collect();
    let mut cliques = 0;
    for mask in 1u32..(1 << n) {
        let face: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let clique = face.iter().all(|&a| face.iter().all(|&b| a == b || compat[a][b]));
        assert_eq!(clique, c.complex.contains_face(&face), "{face:?}");
        cliques += usize::from(clique);
    }
    assert_eq!(c.complex.face_counts().iter().sum::<usize>(), cliques);
}

#[test]
fn edge_counts() {
    for n in 2..=6 {
        assert_eq!(enumerate(n).unwrap().len(), 2 * n * ((1 << (n - 1)) - 1));
    }
}

proptest! {
    #[test]
    fn compatibility_is_symmetric_and_flip_invariant(n in 2usize..=4, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let edges = enumerate(n).unwrap();
        let (x, y) = (a.get(&edges), b.get(&edges));
        let c = x.compatible(y).unwrap();
        prop_assert_eq!(y.compatible(x).unwrap(), c);
        prop_assert_eq!(x.flip().compatible(&y.flip()).unwrap(), c);
        prop_assert_eq!(&x.flip().flip(), x);
        prop_assert!(x.compatible(x).unwrap());
    }

    #[test]
    fn one_side_of_each_pair_ascends(n in 2usize..=5, seed in any::<u64>()) {
        let chi = Character::random_generic(n, seed).unwrap();
        let edges = enumerate(n).unwrap();
        for e in edges.iter().filter(|e| e.side() == Side::Out) {
            prop_assert!(e.is_ascending(&chi).unwrap() != e.flip().is_ascending(&chi).unwrap());
            prop_assert_eq!(e.flip().is_ascending(&chi.antipode()).unwrap(), e.is_ascending(&chi).unwrap());
        }
        let asc = build_complex(n, Filter::Ascending(&chi)).unwrap();
        prop_assert_eq!(asc.vertex_count(), edges.len() / 2);
    }

    #[test]
    fn blowup_height_decides_ascent(n in 2usize..=4, seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let chi = Character::random_generic(n, seed).unwrap();
        let edges = enumerate(n).unwrap();
        let e = pick.get(&edges);
        let bu = blowup(e);
        let h = bu.relative_height(&chi).unwrap();
        prop_assert_eq!(e.is_ascending(&chi).unwrap(), h > num_traits::Zero::zero());
        let other = bu.relative_tree_height(&chi, &bu.other_tree()).unwrap();
        prop_assert_eq!(h, other.max(num_traits::Zero::zero()));
        let m = bu.relative_marking(&bu.other_tree()).unwrap();
        let w = e.whitehead().unwrap();
        prop_assert_eq!(m, if e.side() == Side::Out { w } else { w.inverse().unwrap() });
    }
}
