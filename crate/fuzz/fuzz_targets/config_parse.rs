#![no_main]

use boussinesq_cli::config::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = ExperimentConfig::parse(text) {
        let once = config.to_toml();
        let again = ExperimentConfig::parse(&once).expect("serialised config parses");
        assert_eq!(again.to_toml(), once);
    }
});
