//! Reference inputs bundled with the library.

/// Five linguistic constants on a `[0, 1]` score axis.
pub const LINGUISTIC_CONSTANTS: &str = include_str!("../fixtures/linguistic_constants.json");

/// Two D numbers over the five linguistic constants, before discounting.
pub const LINGUISTIC_DNUMBERS: &str = include_str!("../fixtures/linguistic_dnumbers.json");

/// The default intrusion model; see [`crate::intrusion::default_model`].
pub const DEFAULT_MODEL: &str = include_str!("../fixtures/default_model.json");

/// Six reference scenarios for the intrusion model.
pub const REFERENCE_SCENARIOS: &str = include_str!("../fixtures/reference_scenarios.json");
