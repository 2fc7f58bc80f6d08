use std::path::PathBuf;

use donor_readout::config::Config;

fn default_file() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../config/default.toml")
}

#[test]
fn shipped_default_matches_builtin_default() {
    let cfg = Config::load(&default_file()).unwrap();
    assert_eq!(cfg, Config::default());
}

#[test]
fn missing_file_is_a_config_error() {
    let err = Config::load(&default_file().with_file_name("absent.toml")).unwrap_err();
    assert!(err.to_string().contains("absent.toml"), "{err}");
}
