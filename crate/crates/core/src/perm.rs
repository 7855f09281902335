//! Lexicographic permutation enumeration with incrementally tracked sign.

use serde::Serialize;

use crate::field::{FieldElement, FieldSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn to_field(self, spec: &FieldSpec) -> FieldElement {
        spec.from_i64(self.as_i8() as i64)
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Sign from the parity of the inversion count.
pub fn inversion_sign(perm: &[usize]) -> Sign {
    let inversions = (0..perm.len())
        .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| perm[i] > perm[j])
        .count();
    if inversions % 2 == 0 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// All permutations of `0..n` in lexicographic order, each with its sign.
///
/// Each step of the classic next-permutation algorithm is one swap followed
/// by reversing a suffix of length `l`, i.e. `1 + l/2` transpositions, so the
/// sign is updated without recounting inversions.
pub struct Permutations {
    current: Vec<usize>,
    sign: Sign,
    done: bool,
}

impl Permutations {
    pub fn new(n: usize) -> Self {
        Permutations {
            current: (0..n).collect(),
            sign: Sign::Plus,
            done: false,
        }
    }
}

impl Iterator for Permutations {
    type Item = (Vec<usize>, Sign);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = (self.current.clone(), self.sign);
        let a = &mut self.current;
        let n = a.len();
        match (0..n.saturating_sub(1)).rev().find(|&i| a[i] < a[i + 1]) {
            None => self.done = true,
            Some(i) => {
                let j = (i + 1..n)
                    .rev()
                    .find(|&j| a[j] > a[i])
                    .expect("a[i+1] > a[i]");
                a.swap(i, j);
                a[i + 1..].reverse();
                let transpositions = 1 + (n - i - 1) / 2;
                if transpositions % 2 == 1 {
                    self.sign = self.sign.flip();
                }
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumerations() {
        let all: Vec<_> = Permutations::new(3).collect();
        assert_eq!(
            all.iter().map(|p| p.0.clone()).collect::<Vec<_>>(),
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
        assert_eq!(Permutations::new(1).count(), 1);
        assert_eq!(Permutations::new(0).count(), 1);
    }

    #[test]
    fn incremental_sign_matches_inversions() {
        for n in 1..=6 {
            let mut count = 0u64;
            let mut prev: Option<Vec<usize>> = None;
            for (p, s) in Permutations::new(n) {
                assert_eq!(s, inversion_sign(&p), "{p:?}");
                if let Some(q) = &prev {
                    assert!(q < &p);
                }
                prev = Some(p);
                count += 1;
            }
            assert_eq!(count, factorial(n));
        }
    }
}
