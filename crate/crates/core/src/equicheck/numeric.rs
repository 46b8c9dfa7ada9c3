/// Correctly rounded sum (Shewchuk's exact partials).
///
/// Independent of summation order and odd under negation, which is what
/// makes group averages come out bit-identical across equivalent inputs.
pub fn exact_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for value in values {
        let mut x = value;
        let mut kept = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }

    let Some(&top) = partials.last() else {
        return 0.0;
    };
    let mut hi = top;
    let mut lo = 0.0;
    let mut k = partials.len() - 1;
    while k > 0 {
        k -= 1;
        let x = hi;
        let y = partials[k];
        hi = x + y;
        lo = y - (hi - x);
        if lo != 0.0 {
            break;
        }
    }
    // half-way case: round using the sign of the remaining partials
    if k > 0 && ((lo < 0.0 && partials[k - 1] < 0.0) || (lo > 0.0 && partials[k - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

/// Mean that returns the common value exactly when all inputs agree and
/// otherwise divides the correctly rounded sum.
pub fn symmetric_mean(values: &[f64]) -> f64 {
    match values.first() {
        None => 0.0,
        Some(&first) if values.iter().all(|v| v.to_bits() == first.to_bits()) => first,
        Some(_) => exact_sum(values.iter().copied()) / values.len() as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancels_exactly() {
        assert_eq!(exact_sum([1e100, 1.0, -1e100]), 1.0);
        assert_eq!(exact_sum([0.1; 10]), 1.0);
    }

    #[test]
    fn order_and_sign_symmetry() {
        let v = [0.1, 0.7, -0.3, 1e-17, 3.3];
        let mut r = v;
        r.reverse();
        assert_eq!(exact_sum(v), exact_sum(r));
        assert_eq!(exact_sum(v.iter().map(|x| -x)), -exact_sum(v));
    }

    #[test]
    fn mean_of_copies_is_exact() {
        assert_eq!(symmetric_mean(&[0.1; 6]), 0.1);
        assert_eq!(symmetric_mean(&[1.0, -1.0]), 0.0);
    }
}
