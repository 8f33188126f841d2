//! Small exact combinatorics: binomials, permutations, cycle counts.

/// `C(n, k)` as an exact integer; panics on overflow of `u128`.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn binomial(n: u64, k: u64) -> f64 {
    binomial_u128(n, k) as f64
}

pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

/// `x (x+1) ... (x+t-1)`.
pub fn rising_factorial(x: f64, t: usize) -> f64 {
    (0..t).map(|i| x + i as f64).product()
}

/// All permutations of `0..t` in lexicographic order; `perm[i]` is the image
/// of `i`.
pub fn permutations(t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..t).collect();
    loop {
        out.push(current.clone());
        // Next lexicographic permutation.
        let Some(i) = (1..t).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..t).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

/// Number of cycles, fixed points included.
pub fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
        }
    }
    cycles
}

pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}
