//! Campaign files compiled into the binary.

pub const RECIPES: &[(&str, &str)] = &[
    ("coherent_threshold", include_str!("../recipes/coherent_threshold.toml")),
    ("duality_table", include_str!("../recipes/duality_table.toml")),
    ("ensemble_geometry", include_str!("../recipes/ensemble_geometry.toml")),
    ("entanglement_arcs", include_str!("../recipes/entanglement_arcs.toml")),
    ("floquet_spectra", include_str!("../recipes/floquet_spectra.toml")),
    ("xy_line_scan", include_str!("../recipes/xy_line_scan.toml")),
];

pub fn find(name: &str) -> Option<&'static str> {
    RECIPES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_recipe_validates() {
        for (name, text) in RECIPES {
            let cfg = crate::config::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!cfg.description.is_empty(), "{name}");
        }
    }
}
