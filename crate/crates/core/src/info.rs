//! Shannon helpers shared by the other modules. Base 2 throughout.

/// `x * log2(y)` with the `0 * log(0) = 0` convention.
#[inline]
pub fn xlog2(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.log2()
    }
}

/// Shannon entropy of a probability vector. Zero entries contribute nothing.
pub fn entropy(probs: &[f64]) -> f64 {
    -probs.iter().map(|&p| xlog2(p, p)).sum::<f64>()
}

/// Entropy of `weights / total` without materialising the normalised vector.
pub fn normalized_entropy(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    -weights
        .iter()
        .map(|&w| xlog2(w / total, w / total))
        .sum::<f64>()
}

/// Validates a probability vector: every entry strictly positive and the
/// total within `1e-12` of one.
pub fn check_simplex(probs: &[f64]) -> crate::Result<()> {
    if probs.is_empty() {
        return Err(crate::Error::TooFewValues { needed: 1, got: 0 });
    }
    for (index, &value) in probs.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(crate::Error::InvalidProbability { index, value });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(crate::Error::NotNormalized(sum));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_of_uniform() {
        assert!((entropy(&[0.25; 4]) - 2.0).abs() < 1e-15);
        assert_eq!(entropy(&[1.0]), 0.0);
        assert!((normalized_entropy(&[2.0, 2.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn simplex_checks() {
        assert!(check_simplex(&[0.5, 0.5]).is_ok());
        assert!(check_simplex(&[0.5, 0.0, 0.5]).is_err());
        assert!(matches!(
            check_simplex(&[0.5, 0.6]),
            Err(crate::Error::NotNormalized(_))
        ));
    }
}
