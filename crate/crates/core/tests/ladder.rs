use ksquare::biunitary::enumerate_biunitaries;
use ksquare::exact::{blocks, qi, SubAlgebra, TraceForm};
use ksquare::groups::{biunitary_from_subgroup, orbit_data, OrbitData};
use ksquare::ladder::experimental::basic_construction;
use ksquare::ladder::{markov_data, GroupLadder};
use ksquare::perm::Perm;
use ksquare::squares::{square_from_biunitary, std_algebras as sa};

fn od(gens: &[Perm]) -> OrbitData {
    orbit_data(&biunitary_from_subgroup(gens).unwrap()).unwrap()
}

#[test]
fn cyclic_groups_pass_to_depth_two() {
    for n in 2..=4 {
        let c = Perm::cycle(n, &(0..n).collect::<Vec<_>>());
        let gl = GroupLadder::build(&od(&[c]), 2).unwrap();
        let r = gl.check_group_expectations().unwrap();
        assert!(r.all_pass(), "Z_{n}: {:?}", r.failures());
        // H is trivial so C_n = A_n
        for lv in gl.levels() {
            assert!(lv.c.same_span(&lv.a));
        }
    }
}

#[test]
fn s3_dimensions_and_graph() {
    let gl = GroupLadder::build(&od(&[Perm::transposition(3, 0, 1), Perm::cycle(3, &[0, 1, 2])]), 2).unwrap();
    for (n, lv) in gl.levels().iter().enumerate() {
        let big = 3usize.pow(n as u32);
        assert_eq!(lv.b.dim(), big * big);
        assert_eq!(lv.a.dim(), big * big * 6);
        assert_eq!(lv.c.dim(), big * big * 3);
    }
    let g = gl.graph();
    assert_eq!((g.vertex_count(), g.edge_count()), (12, 18));
    assert!(g.is_connected());
    let dot = g.to_dot();
    assert_eq!(dot.matches("->").count(), 18);
    let first = dot.find("[1,2,3]").unwrap();
    assert!(first < dot.find("[1,3,2]").unwrap());
    let json = g.to_json();
    let mult: u64 = json["edges"].as_array().unwrap().iter().map(|e| e["multiplicity"].as_u64().unwrap()).sum();
    assert_eq!(mult, 18);
}

#[test]
fn c_row_blocks_agree_with_generic_decomposition() {
    let gl = GroupLadder::build(&od(&[Perm::transposition(3, 0, 1), Perm::cycle(3, &[0, 1, 2])]), 1).unwrap();
    for n in 0..=1 {
        let generic = blocks(&gl.level(n).c).unwrap();
        assert_eq!(generic.len(), 3);
        assert!(generic.iter().all(|b| b.size == 3usize.pow(n as u32) && b.rep_multiplicity == 2));
    }
    let inc = gl.c_inclusion(1).unwrap();
    assert_eq!(inc.components(), 1);
}

#[test]
fn grpsq_markov_is_p_squared() {
    for gens in [vec![Perm::transposition(2, 0, 1)], vec![Perm::transposition(3, 0, 1), Perm::cycle(3, &[0, 1, 2])]] {
        let gl = GroupLadder::build(&od(&gens), 1).unwrap();
        let sq = gl.grpsq().unwrap();
        let md = markov_data(sq.b0(), sq.b1(), sq.trace()).unwrap();
        let p = gl.p() as i64;
        assert_eq!(md.beta, qi(p * p));
        assert!(md.amb_trace.windows(2).all(|w| w[0] == w[1]));
    }
}

#[test]
fn mu_and_embedding_commute() {
    let gl = GroupLadder::build(&od(&[Perm::transposition(3, 0, 1), Perm::cycle(3, &[0, 1, 2])]), 2).unwrap();
    for x in gl.level(1).a.basis().iter().step_by(7) {
        for g in 0..6 {
            assert_eq!(gl.embed(2, &gl.mu(1, g, x)).unwrap(), gl.mu(2, g, &gl.embed(2, x).unwrap()));
        }
    }
}

/// Exploratory: the generic basic construction at level one of the
/// four-row ladder. Only its dimension postcondition is asserted.
#[test]
fn experimental_level_one_basic_construction() {
    for u in enumerate_biunitaries(2, 2).unwrap() {
        let sq = square_from_biunitary(&u).unwrap();
        let tr = TraceForm::normalized(4);
        let bc = basic_construction(sq.b0(), sq.b1(), &tr).unwrap();
        assert_eq!(bc.algebra.dim(), bc.expected_dim);
        assert!(bc.jones.is_projection());
        let middle = sa::one_delta(2, 2).permuted(u.map());
        let inner = basic_construction(&middle, &sa::mp_delta(2, 2), &tr).unwrap();
        assert_eq!(inner.algebra.dim(), inner.expected_dim);
    }
    let bc = basic_construction(&SubAlgebra::scalars(3), &SubAlgebra::full(3), &TraceForm::normalized(3)).unwrap();
    assert_eq!(bc.expected_dim, 81);
}
