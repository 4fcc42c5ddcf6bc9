use num_bigint::BigUint;

/// `sum_{d=1}^{n-1} (n!)^d * d^(n(n-1))`: ordered sequences of `d`
/// degree-1 topologies times the ways to place each of the `n(n-1)` flows
/// on one of them.
pub fn search_space_size(n: usize) -> BigUint {
    let factorial: BigUint = (1..=n as u64).map(BigUint::from).product();
    let flows = (n * (n - 1)) as u32;
    (1..n as u64).map(|d| factorial.pow(d as u32) * BigUint::from(d).pow(flows)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(search_space_size(2), BigUint::from(2u32));
        // d=1: 6; d=2: 36 * 2^6 = 2304.
        assert_eq!(search_space_size(3), BigUint::from(2310u32));
    }

    #[test]
    fn eight_nodes_exact() {
        let s = search_space_size(8).to_string();
        assert_eq!(s.len(), 80);
        assert!(s.starts_with("36655"), "{s}");
    }
}
