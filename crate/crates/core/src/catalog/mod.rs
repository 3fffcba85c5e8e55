//! Built-in example systems.

use crate::substitution::{SubstitutionError, SubstitutionSystem, SystemConfig};

const ENTRIES: &[(&str, &str)] = &[
    ("fibonacci", include_str!("fibonacci.json")),
    ("thue_morse", include_str!("thue_morse.json")),
    ("period_doubling", include_str!("period_doubling.json")),
    ("nonpisot13", include_str!("nonpisot13.json")),
    ("chair2d", include_str!("chair2d.json")),
    ("nonprimitive", include_str!("nonprimitive.json")),
    ("integer_doubling", include_str!("integer_doubling.json")),
];

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|(n, _)| *n).collect()
}

/// Raw JSON text of a catalog entry.
pub fn source(name: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn config(name: &str) -> Option<SystemConfig> {
    source(name).map(|s| SystemConfig::from_json(s).expect("catalog entries parse"))
}

pub fn load(name: &str) -> Result<SubstitutionSystem, SubstitutionError> {
    let src = source(name).ok_or_else(|| SubstitutionError::Config {
        field: "name".into(),
        message: format!("unknown catalog entry {name}"),
    })?;
    SubstitutionSystem::from_json(src)
}

/// Loads a catalog entry, panicking on unknown names.
pub fn system(name: &str) -> SubstitutionSystem {
    load(name).unwrap_or_else(|e| panic!("catalog entry {name}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_loads() {
        assert!(names().len() >= 6);
        for n in names() {
            let sys = system(n);
            assert_eq!(sys.name(), n);
        }
        assert!(load("nonexistent").is_err());
    }

    #[test]
    fn substitution_matrices() {
        assert_eq!(system("fibonacci").substitution_matrix().s, vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(system("nonpisot13").substitution_matrix().s, vec![vec![1, 1], vec![3, 0]]);
        assert_eq!(system("integer_doubling").substitution_matrix().s, vec![vec![2]]);
    }
}
