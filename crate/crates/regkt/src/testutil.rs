//! Shared constructors for the small groups used across unit tests.

use crate::fingroup::{FiniteGroup, Subgroup, DEFAULT_GROUP_CAP};

pub fn cyclic(n: usize) -> FiniteGroup {
    let rows = (0..n)
        .map(|i| (0..n).map(|j| ((i + j) % n) as u32).collect())
        .collect();
    FiniteGroup::from_table(&format!("C{n}"), rows).unwrap()
}

fn perms(name: &str, degree: usize, gens: &[Vec<u32>]) -> FiniteGroup {
    FiniteGroup::from_permutations(name, degree, gens, DEFAULT_GROUP_CAP).unwrap()
}

pub fn v4() -> FiniteGroup {
    perms("v4", 4, &[vec![1, 0, 3, 2], vec![2, 3, 0, 1]])
}

pub fn s3() -> FiniteGroup {
    perms("s3", 3, &[vec![1, 0, 2], vec![1, 2, 0]])
}

pub fn d4() -> FiniteGroup {
    perms("d4", 4, &[vec![1, 2, 3, 0], vec![2, 1, 0, 3]])
}

pub fn q8() -> FiniteGroup {
    perms(
        "q8",
        8,
        &[
            vec![1, 4, 3, 6, 5, 0, 7, 2],
            vec![2, 7, 4, 1, 6, 3, 0, 5],
        ],
    )
}

pub fn a4() -> FiniteGroup {
    perms("a4", 4, &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]])
}

pub fn a5() -> FiniteGroup {
    perms("a5", 5, &[vec![1, 2, 3, 4, 0], vec![1, 2, 0, 3, 4]])
}

pub fn c2cubed() -> FiniteGroup {
    perms(
        "c2cubed",
        6,
        &[
            vec![1, 0, 2, 3, 4, 5],
            vec![0, 1, 3, 2, 4, 5],
            vec![0, 1, 2, 3, 5, 4],
        ],
    )
}

/// Finds a normal subgroup of the requested order as the normal closure
/// of a single element; panics when none exists.
pub fn normal_of_order(group: &FiniteGroup, order: usize) -> Subgroup {
    if order == 1 {
        return group.trivial_subgroup();
    }
    if order == group.order() {
        return group.full_subgroup();
    }
    for x in 1..group.order() as u32 {
        let sub = group.normal_closure(&[x]);
        if sub.order() == order {
            return sub;
        }
    }
    panic!("no normal subgroup of order {order} in {}", group.name());
}
