//! Root data shipped with the crate.

pub const BUNDLED: &[(&str, &str)] = &[
    ("a1", include_str!("../data/a1.json")),
    ("a1_unequal", include_str!("../data/a1_unequal.json")),
    ("a1_torsion2", include_str!("../data/a1_torsion2.json")),
    ("gl2", include_str!("../data/gl2.json")),
    ("a2", include_str!("../data/a2.json")),
    ("c2", include_str!("../data/c2.json")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
