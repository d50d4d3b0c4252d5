use std::cmp::Ordering;

/// Orders identifiers such as `F2`, `F10`, `R106` by alphabetic prefix and then
/// by numeric suffix, so `F2 < F10`. Identifiers without a numeric suffix fall
/// back to plain string comparison.
pub fn compare_ids(a: &str, b: &str) -> Ordering {
    match (split_id(a), split_id(b)) {
        (Some((pa, na)), Some((pb, nb))) => pa
            .cmp(pb)
            .then(na.cmp(&nb))
            .then_with(|| a.cmp(b)),
        _ => a.cmp(b),
    }
}

fn split_id(id: &str) -> Option<(&str, u64)> {
    let digits = id.len() - id.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    if digits == 0 || digits > 18 {
        return None;
    }
    let (prefix, num) = id.split_at(id.len() - digits);
    num.parse().ok().map(|n| (prefix, n))
}
