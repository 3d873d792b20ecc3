//! Bundled example loops and small-group generators.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::table::{LoopTable, Perm};

/// Order-27 power-associative CC-loop of exponent 3.
pub const T27_TBL: &str = include_str!("../fixtures/t27.tbl");
/// Order-16 power-associative WIP CC-loop.
pub const T16_TBL: &str = include_str!("../fixtures/t16.tbl");

pub fn t27() -> LoopTable {
    LoopTable::parse_tbl(T27_TBL).expect("bundled t27.tbl is valid")
}

pub fn t16() -> LoopTable {
    LoopTable::parse_tbl(T16_TBL).expect("bundled t16.tbl is valid")
}

pub fn cyclic(n: usize) -> LoopTable {
    LoopTable::cyclic(n)
}

/// `Z_2 x Z_2`.
pub fn klein() -> LoopTable {
    LoopTable::from_fn(4, |x, y| x ^ y).unwrap()
}

/// `(Z_2)^k` under xor.
pub fn elementary_abelian_2(k: u32) -> LoopTable {
    LoopTable::from_fn(1 << k, |x, y| x ^ y).unwrap()
}

/// Dihedral group of order `2m`: element `s*m + r` is `t^s r^r`.
pub fn dihedral(m: usize) -> LoopTable {
    LoopTable::from_fn(2 * m, |x, y| {
        let (s1, r1) = (x / m, x % m);
        let (s2, r2) = (y / m, y % m);
        // t^s1 r^r1 t^s2 r^r2 = t^(s1+s2) r^((-1)^s2 r1 + r2)
        let r = if s2 == 0 { (r1 + r2) % m } else { (m - r1 + r2) % m };
        ((s1 + s2) % 2) * m + r
    })
    .unwrap()
}

/// Unit loop of the `2^k`-dimensional Cayley-Dickson algebra, order `2^(k+1)`.
/// `k = 2` gives the quaternion group, `k = 3` the octonion (Cayley) loop.
/// Element `i` is `+e_i`, element `2^k + i` is `-e_i`.
pub fn cayley_dickson_units(k: u32) -> LoopTable {
    let dim = 1usize << k;
    LoopTable::from_fn(2 * dim, |x, y| {
        let (sx, ix) = (x / dim, x % dim);
        let (sy, iy) = (y / dim, y % dim);
        let s = cd_sign(ix, iy, k) * if (sx ^ sy) == 1 { -1 } else { 1 };
        let idx = ix ^ iy;
        if s > 0 {
            idx
        } else {
            dim + idx
        }
    })
    .unwrap()
}

/// Sign of `e_i e_j` under `(a,b)(c,d) = (ac - d*b, da + bc*)`.
fn cd_sign(i: usize, j: usize, k: u32) -> i32 {
    if k == 0 {
        return 1;
    }
    let half = 1usize << (k - 1);
    let conj = |m: usize| if m == 0 { 1 } else { -1 };
    match (i >= half, j >= half) {
        (false, false) => cd_sign(i, j, k - 1),
        (false, true) => cd_sign(j - half, i, k - 1),
        (true, false) => cd_sign(i - half, j, k - 1) * conj(j),
        (true, true) => -conj(j - half) * cd_sign(j - half, i - half, k - 1),
    }
}

pub fn quaternion() -> LoopTable {
    cayley_dickson_units(2)
}

/// The octonion unit loop of order 16 (an extra loop).
pub fn cayley_loop() -> LoopTable {
    cayley_dickson_units(3)
}

/// A random small group: a random member of a few families, randomly
/// relabeled (identity kept at `0`).
pub fn random_group<R: Rng>(rng: &mut R) -> LoopTable {
    let base = match rng.gen_range(0..6) {
        0 => cyclic(rng.gen_range(1..=12)),
        1 => dihedral(rng.gen_range(2..=6)),
        2 => cyclic(rng.gen_range(2..=4)).direct_product(&cyclic(rng.gen_range(2..=4))),
        3 => elementary_abelian_2(rng.gen_range(1..=3)),
        4 => quaternion(),
        _ => dihedral(3).direct_product(&cyclic(2)),
    };
    random_relabel(&base, rng)
}

pub fn random_relabel<R: Rng>(q: &LoopTable, rng: &mut R) -> LoopTable {
    let mut rest: Vec<usize> = (1..q.order()).collect();
    rest.shuffle(rng);
    let mut images = vec![0];
    images.extend(rest);
    q.relabel(&Perm::from_images(images).unwrap())
}
