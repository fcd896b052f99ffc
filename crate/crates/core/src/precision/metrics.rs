use crate::error::{contract, Error, Result};

/// `||low - reference||_2 / ||reference||_2`.
pub fn relative_error(low: &[f64], reference: &[f64]) -> Result<f64> {
    if low.len() != reference.len() {
        return Err(contract(format!(
            "length mismatch: {} vs {}",
            low.len(),
            reference.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in low.iter().zip(reference) {
        num += (a - b) * (a - b);
        den += b * b;
    }
    if den == 0.0 {
        return Err(Error::Undefined("reference vector has zero norm".into()));
    }
    Ok((num / den).sqrt())
}
