//! Number formatting shared by the report tables.

/// `3958` → `"3,958"`.
pub fn group_thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// `part / whole` as a percentage in tenths, rounded half-up with exact
/// integer arithmetic.
pub fn percent_tenths(part: usize, whole: usize) -> u64 {
    if whole == 0 {
        return 0;
    }
    let (part, whole) = (part as u128, whole as u128);
    ((part * 2000 + whole) / (2 * whole)) as u64
}

/// `33, 53` → `"62.3%"`.
pub fn format_percent(part: usize, whole: usize) -> String {
    let t = percent_tenths(part, whole);
    format!("{}.{}%", t / 10, t % 10)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thousands() {
        assert_eq!(group_thousands(0), "0");
        assert_eq!(group_thousands(157), "157");
        assert_eq!(group_thousands(2503), "2,503");
        assert_eq!(group_thousands(1234567), "1,234,567");
    }

    #[test]
    fn half_up_rounding() {
        assert_eq!(format_percent(33, 53), "62.3%");
        assert_eq!(format_percent(1, 51), "2.0%");
        assert_eq!(format_percent(9, 53), "17.0%");
        // exactly 12.25% rounds up
        assert_eq!(format_percent(49, 400), "12.3%");
        assert_eq!(format_percent(1, 1), "100.0%");
        assert_eq!(format_percent(0, 0), "0.0%");
    }
}
