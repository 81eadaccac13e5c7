#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use signsym::exact::rat;
use signsym::{ExactMatrix, PartialMatrix, Rational};

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..left.len() {
            let v = left.remove(k);
            prefix.push(v);
            rec(prefix, left, out);
            prefix.pop();
            left.insert(k, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

fn parity(perm: &[usize]) -> bool {
    let mut inversions = 0;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

/// Leibniz sum over all permutations.
pub fn leibniz_det(m: &ExactMatrix) -> Rational {
    let n = m.order();
    let mut acc = rat(0, 1);
    for perm in permutations(n) {
        let mut term = rat(1, 1);
        for (i, &j) in perm.iter().enumerate() {
            term *= m.get(i, j);
        }
        if parity(&perm) {
            acc -= term;
        } else {
            acc += term;
        }
    }
    acc
}

/// Every principal minor via the Leibniz oracle, keyed by 0-based bitmask.
pub fn leibniz_minors(m: &ExactMatrix) -> Vec<(u32, Rational)> {
    let n = m.order();
    (1u32..1 << n)
        .map(|mask| {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let rows = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| m.get(i, j).clone()).collect())
                .collect();
            (mask, leibniz_det(&ExactMatrix::new(rows).unwrap()))
        })
        .collect()
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-9..=9), rng.gen_range(1..=5))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ExactMatrix {
    let rows = (0..n)
        .map(|_| (0..n).map(|_| random_rational(rng)).collect())
        .collect();
    ExactMatrix::new(rows).unwrap()
}

/// Positive diagonal with small sign symmetric twins, so that membership in
/// the stronger classes is common.
pub fn random_sign_symmetric(rng: &mut ChaCha8Rng, n: usize) -> ExactMatrix {
    let mut rows = vec![vec![rat(0, 1); n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = match rng.gen_range(0..6) {
            0 => rat(0, 1),
            _ => rat(rng.gen_range(1..=6), rng.gen_range(1..=3)),
        };
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.3) {
                continue;
            }
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            rows[i][j] = rat(sign * rng.gen_range(1..=6), rng.gen_range(1..=4));
            rows[j][i] = rat(sign * rng.gen_range(1..=6), rng.gen_range(1..=4));
        }
    }
    ExactMatrix::new(rows).unwrap()
}

/// Loopless partial matrix whose specified twin pairs are sign compatible.
pub fn random_loopless_member(rng: &mut ChaCha8Rng, n: usize) -> PartialMatrix {
    let mut rows: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let sign = match rng.gen_range(0..5) {
                0 => 0,
                1 | 2 => 1,
                _ => -1,
            };
            let mut value = || {
                if sign == 0 {
                    rat(0, 1)
                } else {
                    rat(sign * rng.gen_range(1..=12), rng.gen_range(1..=7))
                }
            };
            let forward = value();
            let backward = value();
            match rng.gen_range(0..4) {
                0 => {}
                1 => rows[i][j] = Some(forward),
                2 => rows[j][i] = Some(backward),
                _ => {
                    rows[i][j] = Some(forward);
                    rows[j][i] = Some(backward);
                }
            }
        }
    }
    PartialMatrix::new(rows).unwrap()
}
