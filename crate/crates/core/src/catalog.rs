//! Named quivers and QPs used across tests, benches and the CLI examples.
//!
//! Vertex numbering is 1-based throughout; quivers drawn with 0-based
//! labels elsewhere are shifted by one.

use crate::path_algebra::{Grading, Potential, Word};
use crate::qp::QP;
use crate::quiver::{Arrow, Quiver};
use crate::rat_int;

/// A2: single arrow 1 -> 2, both vertices principal.
pub fn a2() -> Quiver {
    Quiver::named("a2", 2, 2, vec![Arrow::new("a", 1, 2)]).unwrap()
}

/// A3: 1 -> 2 -> 3, linear orientation.
pub fn a3() -> Quiver {
    Quiver::named("a3", 3, 3, vec![Arrow::new("a", 1, 2), Arrow::new("b", 2, 3)]).unwrap()
}

/// Kronecker quiver: two arrows 1 -> 2.
pub fn kronecker() -> Quiver {
    Quiver::named("kronecker", 2, 2, vec![Arrow::new("a", 1, 2), Arrow::new("b", 1, 2)]).unwrap()
}

/// Oriented 3-cycle 1 -> 2 -> 3 -> 1 with b: 1->2, a: 2->3, c: 3->1,
/// so that W = abc is a composable cyclic word.
pub fn cycle3() -> Quiver {
    Quiver::named(
        "cycle3",
        3,
        3,
        vec![Arrow::new("a", 2, 3), Arrow::new("b", 1, 2), Arrow::new("c", 3, 1)],
    )
    .unwrap()
}

/// The word `abc` on [`cycle3`].
pub fn cycle3_word(q: &Quiver) -> Word {
    vec![
        q.find_arrow("a").unwrap(),
        q.find_arrow("b").unwrap(),
        q.find_arrow("c").unwrap(),
    ]
}

pub fn cycle3_qp_parts() -> (Quiver, Potential) {
    let q = cycle3();
    let w0 = cycle3_word(&q);
    let mut w = Potential::zero();
    w.add_cycle(&q, &w0, rat_int(1)).unwrap();
    (q, w)
}

/// The 3-cycle with W = abc, graded by path length (degree 3).
pub fn cycle3_qp() -> QP {
    let (q, w) = cycle3_qp_parts();
    let g = Grading::from_quiver(&q, 3);
    QP::new(q, w, Some(g)).unwrap()
}

/// A 2-cycle quiver (only for path-algebra level tests; not mutable).
pub fn two_cycle() -> Quiver {
    Quiver::named("two_cycle", 2, 2, vec![Arrow::new("a", 1, 2), Arrow::new("b", 2, 1)]).unwrap()
}

/// Conifold quiver: two vertices, two arrows each way, quartic potential
/// W = a01 a10 b01 b10 - a01 b10 b01 a10, with the standard cut
/// (weight 1 on a01, 0 elsewhere).
pub fn conifold() -> Quiver {
    Quiver::named(
        "conifold",
        2,
        2,
        vec![
            Arrow::weighted("a01", 1, 2, 1),
            Arrow::weighted("a10", 2, 1, 0),
            Arrow::weighted("b01", 1, 2, 0),
            Arrow::weighted("b10", 2, 1, 0),
        ],
    )
    .unwrap()
}

pub fn conifold_qp_parts() -> (Quiver, Potential) {
    let q = conifold();
    let a01 = q.find_arrow("a01").unwrap();
    let a10 = q.find_arrow("a10").unwrap();
    let b01 = q.find_arrow("b01").unwrap();
    let b10 = q.find_arrow("b10").unwrap();
    let mut w = Potential::zero();
    w.add_cycle(&q, &[a01, a10, b01, b10], rat_int(1)).unwrap();
    w.add_cycle(&q, &[a01, b10, b01, a10], rat_int(-1)).unwrap();
    (q, w)
}

/// Somos-5 quiver on five vertices (shifted from 0-based labels), with the
/// grading that puts weight 1 on edges 1->5, 2->4, 2->5 and 0 elsewhere.
/// Every simple cycle then has weight 1.
pub fn somos5() -> Quiver {
    Quiver::named(
        "somos5",
        5,
        5,
        vec![
            Arrow::weighted("a32", 3, 2, 0),
            Arrow::weighted("a24", 2, 4, 1),
            Arrow::weighted("a43x", 4, 3, 0),
            Arrow::weighted("a43y", 4, 3, 0),
            Arrow::weighted("a31", 3, 1, 0),
            Arrow::weighted("a12", 1, 2, 0),
            Arrow::weighted("a41", 4, 1, 0),
            Arrow::weighted("a54x", 5, 4, 0),
            Arrow::weighted("a54y", 5, 4, 0),
            Arrow::weighted("a25", 2, 5, 1),
            Arrow::weighted("a15", 1, 5, 1),
        ],
    )
    .unwrap()
}

/// The graded Somos-5 QP: all simple cycles with coefficient 1, homogeneous
/// of degree 1 under the catalog grading.
pub fn somos5_qp() -> QP {
    let q = somos5();
    let mut w = Potential::zero();
    for cyc in crate::quiver::enumerate_simple_cycles(&q, 5) {
        w.add_cycle(&q, &cyc, rat_int(1)).unwrap();
    }
    let g = Grading::from_quiver(&q, 1);
    QP::new(q, w, Some(g)).unwrap()
}

/// The nine-vertex quiver with three 4-cycles and two 6-cycles admitting no
/// graded nondegenerate potential (weights force 3d = 2d).
pub fn nine_vertex() -> Quiver {
    Quiver::named(
        "nine_vertex",
        9,
        9,
        vec![
            Arrow::new("e01", 1, 2),
            Arrow::new("e20", 3, 1),
            Arrow::new("e07", 1, 8),
            Arrow::new("e80", 9, 1),
            Arrow::new("e13", 2, 4),
            Arrow::new("e32", 4, 3),
            Arrow::new("e43", 5, 4),
            Arrow::new("e35", 4, 6),
            Arrow::new("e64", 7, 5),
            Arrow::new("e56", 6, 7),
            Arrow::new("e76", 8, 7),
            Arrow::new("e68", 7, 9),
        ],
    )
    .unwrap()
}

/// The five-vertex quiver admitting no grading with all simple cycles of
/// equal positive weight.
pub fn five_vertex() -> Quiver {
    Quiver::named(
        "five_vertex",
        5,
        5,
        vec![
            Arrow::new("e12", 2, 3),
            Arrow::new("e31", 4, 2),
            Arrow::new("e14", 2, 5),
            Arrow::new("e01", 1, 2),
            Arrow::new("e23", 3, 4),
            Arrow::new("e42", 5, 3),
            Arrow::new("e20", 3, 1),
            Arrow::new("e34", 4, 5),
            Arrow::new("e03", 1, 4),
            Arrow::new("e40", 5, 1),
        ],
    )
    .unwrap()
}
