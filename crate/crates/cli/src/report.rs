//! Fixed-width number formatting shared by every text output.

/// 17 significant digits, so reports diff cleanly between runs.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A named output file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub name: String,
    pub contents: String,
}

impl Report {
    pub fn new(name: &str, contents: String) -> Self {
        Self {
            name: name.to_string(),
            contents,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
    }
}
